//! Plain-text model description.
//!
//! ```text
//! # (2,3) model driven by Bernoulli-Gaussian noise
//! p = 2
//! q = 3
//! phi = -0.1, -0.2
//! theta = 0.5, -0.3, 0.2
//! alpha = 0.6
//! atoms = 0:1
//! continuous = gaussian:0:1
//! ```
//!
//! `p` and `q` are optional and checked against the list lengths. `atoms` is a
//! comma list of `value:weight`; `continuous` is `gaussian:mean:var`,
//! `uniform:lo:hi` or `none`. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use super::distribution::{Atom, ContinuousLaw, DceDistribution};
use super::model::ArmaModel;
use crate::error::{Error, Result};

pub fn parse_model_spec(text: &str) -> Result<ArmaModel> {
    let mut p = None;
    let mut q = None;
    let mut phi = Vec::new();
    let mut theta = Vec::new();
    let mut alpha = None;
    let mut atoms = Vec::new();
    let mut continuous = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "p" => p = Some(parse_usize(value).map_err(err)?),
            "q" => q = Some(parse_usize(value).map_err(err)?),
            "phi" => phi = parse_list(value).map_err(err)?,
            "theta" => theta = parse_list(value).map_err(err)?,
            "alpha" => alpha = Some(parse_f64(value).map_err(err)?),
            "atoms" => atoms = parse_atoms(value).map_err(err)?,
            "continuous" => continuous = parse_continuous(value).map_err(err)?,
            other => return Err(err(format!("unknown key '{other}'"))),
        }
    }

    if let Some(p) = p {
        if p != phi.len() {
            return Err(Error::Parse {
                line: 0,
                message: format!("p = {p} but phi has {} entries", phi.len()),
            });
        }
    }
    if let Some(q) = q {
        if q != theta.len() {
            return Err(Error::Parse {
                line: 0,
                message: format!("q = {q} but theta has {} entries", theta.len()),
            });
        }
    }
    let alpha = alpha.ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing alpha".into(),
    })?;
    let excitation = DceDistribution::new(alpha, atoms, continuous)?;
    ArmaModel::new(phi, theta, excitation)
}

/// Inverse of [`parse_model_spec`] for laws with a Gaussian or uniform continuous part.
pub fn format_model_spec(model: &ArmaModel) -> String {
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let ex = model.excitation();
    let mut out = String::new();
    let _ = writeln!(out, "p = {}", model.p());
    let _ = writeln!(out, "q = {}", model.q());
    let _ = writeln!(out, "phi = {}", join(model.phi()));
    let _ = writeln!(out, "theta = {}", join(model.theta()));
    let _ = writeln!(out, "alpha = {:?}", ex.alpha());
    let atoms = ex
        .atoms()
        .iter()
        .map(|a| format!("{:?}:{:?}", a.value, a.weight))
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(out, "atoms = {atoms}");
    let cont = match ex.continuous() {
        Some(ContinuousLaw::Gaussian { mean, variance }) => format!("gaussian:{mean:?}:{variance:?}"),
        Some(ContinuousLaw::Uniform { lo, hi }) => format!("uniform:{lo:?}:{hi:?}"),
        Some(ContinuousLaw::Sum(..)) | None => "none".to_string(),
    };
    let _ = writeln!(out, "continuous = {cont}");
    out
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|_| format!("expected a nonnegative integer, got '{s}'"))
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("expected a number, got '{s}'"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number '{s}'"))
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| parse_f64(t.trim())).collect()
}

fn parse_atoms(s: &str) -> std::result::Result<Vec<Atom>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let (v, w) = t
                .trim()
                .split_once(':')
                .ok_or_else(|| format!("atom '{}' is not value:weight", t.trim()))?;
            Ok(Atom::new(parse_f64(v.trim())?, parse_f64(w.trim())?))
        })
        .collect()
}

fn parse_continuous(s: &str) -> std::result::Result<Option<ContinuousLaw>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    match parts.as_slice() {
        ["none"] | [""] => Ok(None),
        ["gaussian", mean, var] => Ok(Some(ContinuousLaw::Gaussian {
            mean: parse_f64(mean)?,
            variance: parse_f64(var)?,
        })),
        ["uniform", lo, hi] => Ok(Some(ContinuousLaw::Uniform {
            lo: parse_f64(lo)?,
            hi: parse_f64(hi)?,
        })),
        _ => Err(format!(
            "continuous must be gaussian:mean:var, uniform:lo:hi or none, got '{s}'"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = "\
# comment
p = 2
q = 3
phi = -0.1, -0.2
theta = 0.5, -0.3, 0.2
alpha = 0.6
atoms = 0:1
continuous = gaussian:0:1
";

    #[test]
    fn parses_full_spec() {
        let m = parse_model_spec(SPEC).unwrap();
        assert_eq!(m.phi(), &[-0.1, -0.2]);
        assert_eq!(m.theta(), &[0.5, -0.3, 0.2]);
        assert_eq!(m.alpha(), 0.6);
        assert_eq!(m.excitation().atoms(), &[Atom::new(0.0, 1.0)]);
    }

    #[test]
    fn format_then_parse_is_identity() {
        let m = parse_model_spec(SPEC).unwrap();
        assert_eq!(parse_model_spec(&format_model_spec(&m)).unwrap(), m);
    }

    #[test]
    fn rademacher_without_continuous() {
        let m = parse_model_spec("phi = -0.3333333333333333\nalpha = 0\natoms = -1:0.5, 1:0.5\n").unwrap();
        assert_eq!(m.p(), 1);
        assert_eq!(m.q(), 0);
        assert!(m.excitation().continuous().is_none());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_model_spec("alpha = 0.5\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_model_spec("p = 2\nphi = 0.1\nalpha = 1\ncontinuous = gaussian:0:1").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        assert!(parse_model_spec("phi = 0.1\n").is_err());
        assert!(parse_model_spec("alpha = 0.5\natoms = 0:1\ncontinuous = cauchy:0:1").is_err());
    }
}
