//! Linear compression of DCE-ARMA blocks: Gaussian encoders and decoders that
//! search over affine singular components.
//!
//! Every rate in a sweep shares one `n x n` Gaussian matrix (its leading rows form the
//! encoder) and the same simulated paths, so success is non-decreasing in the rate
//! trial by trial.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::affine::{build_component, component_of_path, NuPattern, SingularComponent};
use crate::arma::{build_toeplitz, simulate_path, ArmaModel, ToeplitzSet};
use crate::error::{Error, Result};
use crate::rng::SeedStream;

pub const DEFAULT_SUCCESS_TOL: f64 = 1e-6;
pub const DEFAULT_SEARCH_BUDGET: usize = 64;
/// `sigma_min / sigma_max` of `A B` below which a decode is refused.
pub const CONDITION_FLOOR: f64 = 1e-10;
/// A search candidate is accepted when its residual is below this fraction of `||y||`.
pub const SEARCH_RESIDUAL_TOL: f64 = 1e-8;

const ENCODER_STREAM: u64 = 1;
const PATH_STREAM: u64 = 2;
const SEARCH_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderMode {
    /// Told the realized pattern and atom values.
    Genie,
    /// Tries up to `budget` likely patterns with modal atoms in the discrete slots.
    Search { budget: usize },
}

impl DecoderMode {
    pub fn label(&self) -> String {
        match self {
            DecoderMode::Genie => "genie".to_string(),
            DecoderMode::Search { budget } => format!("search:{budget}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTrialConfig {
    pub n: usize,
    pub rate: f64,
    pub trials: usize,
    pub decoder: DecoderMode,
    pub success_tol: f64,
}

impl RateTrialConfig {
    pub fn new(n: usize, rate: f64, trials: usize) -> Self {
        Self {
            n,
            rate,
            trials,
            decoder: DecoderMode::Genie,
            success_tol: DEFAULT_SUCCESS_TOL,
        }
    }

    /// `floor(R n)`, computed so that e.g. `0.7 * 80` gives 56.
    pub fn measurement_count(&self) -> usize {
        measurement_count(self.rate, self.n)
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rate) {
            return Err(Error::InvalidArgument(format!("rate {} outside [0, 1]", self.rate)));
        }
        if let DecoderMode::Search { budget: 0 } = self.decoder {
            return Err(Error::InvalidArgument("search budget must be at least 1".into()));
        }
        if !(self.success_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "success tolerance {} must be positive",
                self.success_tol
            )));
        }
        Ok(())
    }
}

pub fn measurement_count(rate: f64, n: usize) -> usize {
    (rate * n as f64 + 1e-9).floor() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTrialResult {
    pub config: RateTrialConfig,
    pub successes: u64,
    pub measurement_count: usize,
    /// Mean realized `d_V`.
    pub mean_dv: f64,
    /// Trials whose decode was refused for conditioning (all counted as failures).
    pub ill_conditioned: u64,
}

impl RateTrialResult {
    pub fn success_fraction(&self) -> f64 {
        self.successes as f64 / self.config.trials.max(1) as f64
    }
}

/// Per-trial record, exposed so callers can compare success with `m >= d_V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub d_v: usize,
    pub success: bool,
    pub ill_conditioned: bool,
}

/// `rows x n` matrix with i.i.d. `N(0, 1/n)` entries.
pub fn gaussian_encoder<R: Rng + ?Sized>(rows: usize, n: usize, rng: &mut R) -> DMatrix<f64> {
    let normal = Normal::new(0.0, 1.0 / (n.max(1) as f64).sqrt()).expect("positive scale");
    DMatrix::from_fn(rows, n, |_, _| normal.sample(rng))
}

pub fn linear_encode(a: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    a * x
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub x_hat: DVector<f64>,
    /// `min_c ||A (B c + offset) - y||_2`.
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Least-squares fit of `y` on the component's affine set, mapped back to `R^n`.
pub fn decode_on_component(
    y: &DVector<f64>,
    a: &DMatrix<f64>,
    comp: &SingularComponent,
) -> Result<Decoded> {
    if a.ncols() != comp.n() || a.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "encoder {}x{}, measurement {}, component in R^{}",
            a.nrows(),
            a.ncols(),
            y.len(),
            comp.n()
        )));
    }
    let rhs = y - a * &comp.offset;
    if comp.dim == 0 {
        return Ok(Decoded {
            x_hat: comp.offset.clone(),
            residual: rhs.norm(),
            sigma_min: f64::INFINITY,
            sigma_max: 0.0,
        });
    }
    if a.nrows() < comp.dim {
        return Err(Error::IllConditioned { ratio: 0.0 });
    }
    let ab = a * &comp.basis;
    let svd = ab.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    let ratio = if sigma_max > 0.0 { sigma_min / sigma_max } else { 0.0 };
    if ratio < CONDITION_FLOOR {
        return Err(Error::IllConditioned { ratio });
    }
    let coords = svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let residual = (&ab * &coords - &rhs).norm();
    Ok(Decoded {
        x_hat: &comp.basis * coords + &comp.offset,
        residual,
        sigma_min,
        sigma_max,
    })
}

/// `||x_hat - x||_inf / (1 + ||x||_inf)`.
pub fn relative_error(x_hat: &DVector<f64>, x: &DVector<f64>) -> f64 {
    (x_hat - x).amax() / (1.0 + x.amax())
}

/// Up to `budget` distinct patterns drawn from `Bern(alpha)`, most likely first.
pub fn search_candidates<R: Rng + ?Sized>(
    window: usize,
    alpha: f64,
    budget: usize,
    rng: &mut R,
) -> Vec<NuPattern> {
    let mut out: Vec<NuPattern> = Vec::with_capacity(budget);
    // Bounded number of draws so degenerate alphas (few distinct patterns) terminate.
    for _ in 0..budget.saturating_mul(4) {
        if out.len() == budget {
            break;
        }
        let pat = NuPattern::sample(window, alpha, rng);
        if !out.contains(&pat) {
            out.push(pat);
        }
    }
    out.sort_by(|a, b| b.log_likelihood(alpha).total_cmp(&a.log_likelihood(alpha)));
    out
}

/// First candidate whose fit leaves a residual below `SEARCH_RESIDUAL_TOL * ||y||`.
pub fn decode_search(
    y: &DVector<f64>,
    a: &DMatrix<f64>,
    candidates: &[SingularComponent],
) -> Option<Decoded> {
    let tol = SEARCH_RESIDUAL_TOL * y.norm();
    candidates.iter().find_map(|comp| {
        decode_on_component(y, a, comp)
            .ok()
            .filter(|d| d.residual <= tol)
    })
}

/// Simulates `trials` paths once and decodes each at every rate in `rates`.
///
/// Result `i` corresponds to `rates[i]`; all share `n`, `trials`, `decoder` and `success_tol`.
pub fn rate_curve(
    model: &ArmaModel,
    n: usize,
    rates: &[f64],
    trials: usize,
    decoder: DecoderMode,
    success_tol: f64,
    streams: &SeedStream,
) -> Result<Vec<RateTrialResult>> {
    let configs: Vec<RateTrialConfig> = rates
        .iter()
        .map(|&rate| RateTrialConfig {
            n,
            rate,
            trials,
            decoder,
            success_tol,
        })
        .collect();
    let outcomes = trial_outcomes(model, &configs, streams)?;
    Ok(configs
        .iter()
        .enumerate()
        .map(|(i, cfg)| {
            let per_rate = outcomes.iter().map(|o| o[i]);
            let (successes, ill, dv) = per_rate.fold((0u64, 0u64, 0u64), |(s, c, d), o| {
                (s + o.success as u64, c + o.ill_conditioned as u64, d + o.d_v as u64)
            });
            RateTrialResult {
                config: *cfg,
                successes,
                measurement_count: cfg.measurement_count(),
                mean_dv: dv as f64 / trials.max(1) as f64,
                ill_conditioned: ill,
            }
        })
        .collect())
}

pub fn rate_trial(model: &ArmaModel, cfg: &RateTrialConfig, streams: &SeedStream) -> Result<RateTrialResult> {
    let mut out = rate_curve(
        model,
        cfg.n,
        &[cfg.rate],
        cfg.trials,
        cfg.decoder,
        cfg.success_tol,
        streams,
    )?;
    Ok(out.remove(0))
}

/// `outcomes[t][i]` is trial `t` decoded under `configs[i]`. All configs must share
/// `n`, `trials` and the decoder mode.
pub fn trial_outcomes(
    model: &ArmaModel,
    configs: &[RateTrialConfig],
    streams: &SeedStream,
) -> Result<Vec<Vec<TrialOutcome>>> {
    let Some(first) = configs.first() else {
        return Ok(Vec::new());
    };
    for cfg in configs {
        cfg.validate()?;
        if cfg.n != first.n || cfg.trials != first.trials || cfg.decoder != first.decoder {
            return Err(Error::InvalidArgument(
                "configs in one sweep must share n, trials and decoder".into(),
            ));
        }
    }
    model.ensure_stable()?;
    let n = first.n;
    let ts = build_toeplitz(model, n)?;
    let encoder = gaussian_encoder(n, n, &mut streams.fork(ENCODER_STREAM).trial(0));
    let path_streams = streams.fork(PATH_STREAM);
    let search_streams = streams.fork(SEARCH_STREAM);
    let encoders: Vec<DMatrix<f64>> = configs
        .iter()
        .map(|c| encoder.rows(0, c.measurement_count()).into_owned())
        .collect();

    (0..first.trials as u64)
        .into_par_iter()
        .map(|t| {
            let path = simulate_path(model, n, None, &mut path_streams.trial(t))?;
            let x = DVector::from_column_slice(&path.x);
            let truth = component_of_path(&ts, &path)?;
            let candidates = match first.decoder {
                DecoderMode::Genie => vec![truth.clone()],
                DecoderMode::Search { budget } => {
                    let mut rng = search_streams.trial(t);
                    search_components(model, &ts, budget, &mut rng)?
                }
            };
            Ok(configs
                .iter()
                .zip(&encoders)
                .map(|(cfg, a)| {
                    let y = linear_encode(a, &x);
                    let (decoded, ill) = match first.decoder {
                        DecoderMode::Genie => match decode_on_component(&y, a, &truth) {
                            Ok(d) => (Some(d), false),
                            Err(Error::IllConditioned { .. }) => (None, true),
                            Err(_) => (None, false),
                        },
                        DecoderMode::Search { .. } => (decode_search(&y, a, &candidates), false),
                    };
                    TrialOutcome {
                        d_v: truth.dim,
                        success: decoded
                            .is_some_and(|d| relative_error(&d.x_hat, &x) < cfg.success_tol),
                        ill_conditioned: ill,
                    }
                })
                .collect())
        })
        .collect()
}

fn search_components<R: Rng + ?Sized>(
    model: &ArmaModel,
    ts: &ToeplitzSet,
    budget: usize,
    rng: &mut R,
) -> Result<Vec<SingularComponent>> {
    let atom = model.excitation().modal_atom().unwrap_or(0.0);
    search_candidates(ts.window_len(), model.alpha(), budget, rng)
        .into_iter()
        .map(|pat| {
            let atoms = vec![atom; pat.discrete_count()];
            build_component(ts, &pat, &atoms)
        })
        .collect()
}
