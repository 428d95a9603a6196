//! Discrete-continuous scalar laws.

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};

/// Tolerance on the atom weights summing to one.
const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(value: f64, weight: f64) -> Self {
        Self { value, weight }
    }
}

/// The absolutely continuous part of a [`DceDistribution`].
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousLaw {
    Gaussian { mean: f64, variance: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Continuous part of an independent sum. Kept symbolic; only sampling is supported.
    Sum(Box<DceDistribution>, Box<DceDistribution>),
}

impl ContinuousLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            ContinuousLaw::Gaussian { mean, variance } => {
                if !mean.is_finite() || !(variance > 0.0 && variance.is_finite()) {
                    return Err(Error::InvalidDistribution(format!(
                        "gaussian needs finite mean and variance > 0 (got {mean}, {variance})"
                    )));
                }
            }
            ContinuousLaw::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidDistribution(format!(
                        "uniform needs lo < hi (got {lo}, {hi})"
                    )));
                }
            }
            ContinuousLaw::Sum(ref a, ref b) => {
                if a.alpha == 0.0 && b.alpha == 0.0 {
                    return Err(Error::InvalidDistribution(
                        "sum continuous part needs a continuous summand".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ContinuousLaw::Gaussian { mean, variance } => Normal::new(*mean, variance.sqrt())
                .expect("validated gaussian")
                .sample(rng),
            ContinuousLaw::Uniform { lo, hi } => Uniform::new(*lo, *hi)
                .expect("validated uniform")
                .sample(rng),
            ContinuousLaw::Sum(a, b) => {
                // condition the pair of Bernoulli flags on "not both discrete"
                let w_ab = a.alpha * b.alpha;
                let w_a = a.alpha * (1.0 - b.alpha);
                let w_b = (1.0 - a.alpha) * b.alpha;
                let u = rng.random::<f64>() * (w_ab + w_a + w_b);
                if u < w_ab {
                    a.sample_continuous(rng) + b.sample_continuous(rng)
                } else if u < w_ab + w_a {
                    a.sample_continuous(rng) + b.sample_atom(rng)
                } else {
                    a.sample_atom(rng) + b.sample_continuous(rng)
                }
            }
        }
    }
}

/// An alpha-discrete-continuous law: with probability `alpha` a draw from the
/// continuous part, otherwise a draw from a finite atom list.
#[derive(Debug, Clone, PartialEq)]
pub struct DceDistribution {
    alpha: f64,
    atoms: Vec<Atom>,
    continuous: Option<ContinuousLaw>,
}

impl DceDistribution {
    pub fn new(alpha: f64, atoms: Vec<Atom>, continuous: Option<ContinuousLaw>) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidDistribution(format!(
                "continuity chance {alpha} outside [0, 1]"
            )));
        }
        if alpha < 1.0 || !atoms.is_empty() {
            validate_atoms(&atoms)?;
        }
        match &continuous {
            Some(law) => law.validate()?,
            None if alpha > 0.0 => {
                return Err(Error::InvalidDistribution(
                    "alpha > 0 requires a continuous component".into(),
                ))
            }
            None => {}
        }
        Ok(Self {
            alpha,
            atoms,
            continuous,
        })
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        Self::new(
            1.0,
            Vec::new(),
            Some(ContinuousLaw::Gaussian { mean, variance }),
        )
    }

    /// Atom at zero with probability `1 - alpha`, standard normal otherwise.
    pub fn bernoulli_gaussian(alpha: f64) -> Result<Self> {
        Self::new(
            alpha,
            vec![Atom::new(0.0, 1.0)],
            Some(ContinuousLaw::Gaussian {
                mean: 0.0,
                variance: 1.0,
            }),
        )
    }

    /// Fair +-1 law.
    pub fn rademacher() -> Self {
        Self::discrete(vec![Atom::new(-1.0, 0.5), Atom::new(1.0, 0.5)])
            .expect("rademacher atoms are valid")
    }

    pub fn discrete(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(0.0, atoms, None)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn continuous(&self) -> Option<&ContinuousLaw> {
        self.continuous.as_ref()
    }

    /// Most probable atom (first one on ties), used when a decoder has to guess.
    pub fn modal_atom(&self) -> Option<f64> {
        self.atoms
            .iter()
            .fold(None::<Atom>, |best, a| match best {
                Some(b) if b.weight >= a.weight => Some(b),
                _ => Some(*a),
            })
            .map(|a| a.value)
    }

    pub fn sample_continuous<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.continuous
            .as_ref()
            .expect("continuous component present when drawn")
            .sample(rng)
    }

    pub fn sample_atom<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.weight;
            if u < acc {
                return a.value;
            }
        }
        self.atoms
            .iter()
            .rev()
            .find(|a| a.weight > 0.0)
            .expect("atom list non-empty when drawn")
            .value
    }

    /// One excitation draw: `(value, nu)` with `nu = true` for a continuous draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, bool) {
        let nu = rng.random::<f64>() < self.alpha;
        if nu {
            (self.sample_continuous(rng), true)
        } else {
            (self.sample_atom(rng), false)
        }
    }
}

fn validate_atoms(atoms: &[Atom]) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::InvalidDistribution(
            "alpha < 1 requires at least one atom".into(),
        ));
    }
    let mut sum = 0.0;
    for (i, a) in atoms.iter().enumerate() {
        if !a.value.is_finite() || !a.weight.is_finite() || a.weight < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "atom {i} ({}, {}) is not a finite value with nonnegative weight",
                a.value, a.weight
            )));
        }
        if atoms[..i].iter().any(|b| b.value == a.value) {
            return Err(Error::InvalidDistribution(format!(
                "duplicate atom value {}",
                a.value
            )));
        }
        sum += a.weight;
    }
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidDistribution(format!(
            "atom weights sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// Draws `count` excitation values with their continuity flags.
pub fn sample_excitation<R: Rng + ?Sized>(
    dist: &DceDistribution,
    count: usize,
    rng: &mut R,
) -> (Vec<f64>, Vec<bool>) {
    (0..count).map(|_| dist.sample(rng)).unzip()
}

/// Law of the independent sum `X1 + X2`.
///
/// The sum is atomic only when both summands are, so the atomic mass is
/// `(1 - a1)(1 - a2)` and the atom list is the convolution of the two lists.
pub fn compose_sum_distribution(d1: &DceDistribution, d2: &DceDistribution) -> DceDistribution {
    let alpha = 1.0 - (1.0 - d1.alpha) * (1.0 - d2.alpha);
    let atoms = if alpha < 1.0 {
        let mut out: Vec<Atom> = Vec::new();
        for a in &d1.atoms {
            for b in &d2.atoms {
                let v = a.value + b.value;
                let w = a.weight * b.weight;
                let scale = 1.0_f64.max(v.abs());
                match out.iter_mut().find(|c| (c.value - v).abs() <= 1e-12 * scale) {
                    Some(c) => c.weight += w,
                    None => out.push(Atom::new(v, w)),
                }
            }
        }
        out.retain(|a| a.weight > 0.0);
        out.sort_by(|a, b| a.value.total_cmp(&b.value));
        out
    } else {
        Vec::new()
    };
    let continuous = if alpha > 0.0 {
        Some(ContinuousLaw::Sum(Box::new(d1.clone()), Box::new(d2.clone())))
    } else {
        None
    };
    DceDistribution {
        alpha,
        atoms,
        continuous,
    }
}
