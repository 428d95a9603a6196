use crate::affine::{check_concentration, empirical_dimension_histogram, ConcentrationCheck, DimensionHistogram};
use crate::arma::{ArmaModel, DceDistribution, SamplePath};
use crate::compressor::{rate_curve, DecoderMode, RateTrialResult, DEFAULT_SUCCESS_TOL};
use crate::dimension::{bid_bounds, IdrPoint, RidEstimate, TailVariant};
use crate::error::Result;
use crate::hankel::{HankelCheck, RankHistogram, ShiftedRank};
use crate::rng::SeedStream;

use super::demos::{cantor_cdf, joint_scatter, sample_bernoulli_convolution, sup_distance, ScatterPoint};
use super::svg::{bar_chart, line_plot, scatter_plot, Series};
use super::table::{Cell, Table};

/// One named output: `<name>.csv` and optionally `<name>.svg`.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub table: Table,
    pub svg: Option<String>,
}

impl Artifact {
    fn new(name: &str, table: Table, svg: Option<String>) -> Self {
        Self {
            name: name.to_string(),
            table,
            svg,
        }
    }
}

/// AR(2) used for the bounds figure; the bounds depend only on `(p, q, alpha)`.
pub fn default_ar2(alpha: f64) -> Result<ArmaModel> {
    ArmaModel::new(vec![-0.5, 0.2], vec![], DceDistribution::bernoulli_gaussian(alpha)?)
}

pub fn default_arma23(alpha: f64) -> Result<ArmaModel> {
    ArmaModel::new(vec![-0.5, 0.2], vec![0.4, -0.3, 0.25], DceDistribution::bernoulli_gaussian(alpha)?)
}

pub fn default_arma11(alpha: f64) -> Result<ArmaModel> {
    ArmaModel::new(vec![-0.5], vec![0.3], DceDistribution::bernoulli_gaussian(alpha)?)
}

/// `X_t = xi_t - 0.5 X_{t-1}` with Bernoulli-Gaussian(0.5) excitation.
pub fn default_scatter_ar1() -> Result<ArmaModel> {
    ArmaModel::new(vec![0.5], vec![], DceDistribution::bernoulli_gaussian(0.5)?)
}

pub fn path_table(path: &SamplePath) -> Table {
    let mut t = Table::new(&["t", "x", "xi", "nu"]);
    let first = path.xi_start.min(1);
    for time in first..=path.n() as i64 {
        t.push(vec![
            time.into(),
            path.x_at(time).into(),
            path.xi_at(time).into(),
            path.nu_at(time).into(),
        ]);
    }
    t
}

pub fn rid_table(est: &RidEstimate) -> Table {
    let mut t = Table::new(&["m", "entropy_bits", "samples"]);
    for p in &est.curve.points {
        t.push(vec![p.m.into(), p.entropy_bits.into(), p.sample_count.into()]);
    }
    t
}

/// Bounds over `m = 1..=m_max`, with the genie estimate repeated on every row when given.
pub fn bid_table(m_max: usize, p: usize, q: usize, alpha: f64, oracle: Option<(f64, usize)>) -> Table {
    let mut t = Table::new(&["m", "lower", "upper", "oracle_estimate", "trials"]);
    for m in 1..=m_max {
        let (lo, hi) = bid_bounds(m, p, q, alpha);
        t.push(vec![
            m.into(),
            lo.into(),
            hi.into(),
            oracle.map(|o| o.0).into(),
            oracle.map(|o| o.1).into(),
        ]);
    }
    t
}

pub fn idr_table(points: &[IdrPoint]) -> Table {
    let mut t = Table::new(&["n", "m", "value", "samples"]);
    for p in points {
        t.push(vec![p.n.into(), p.m.into(), p.value.into(), p.samples.into()]);
    }
    t
}

pub fn histogram_table(h: &DimensionHistogram) -> Table {
    let mut t = Table::new(&["d_v", "count", "trials", "n", "p", "q", "alpha"]);
    for (d, &c) in h.counts.iter().enumerate() {
        t.push(vec![
            d.into(),
            c.into(),
            h.trials.into(),
            h.n.into(),
            h.p.into(),
            h.q.into(),
            h.alpha.into(),
        ]);
    }
    t
}

pub fn concentration_table(rows: &[ConcentrationCheck]) -> Table {
    let mut t = Table::new(&["k", "regime", "empirical", "bound", "slack", "satisfied"]);
    for r in rows {
        let satisfied: Cell = match r.satisfied {
            Some(true) => "true".into(),
            Some(false) => "false".into(),
            None => "n/a".into(),
        };
        t.push(vec![
            r.k.into(),
            r.regime.name().into(),
            r.empirical.into(),
            r.bound.into(),
            r.slack.into(),
            satisfied,
        ]);
    }
    t
}

pub fn rate_table(results: &[RateTrialResult]) -> Table {
    let mut t = Table::new(&["n", "rate", "measurements", "trials", "successes", "mean_dv"]);
    for r in results {
        t.push(vec![
            r.config.n.into(),
            r.config.rate.into(),
            r.measurement_count.into(),
            r.config.trials.into(),
            r.successes.into(),
            r.mean_dv.into(),
        ]);
    }
    t
}

pub fn rank_table(h: &RankHistogram) -> Table {
    let mut t = Table::new(&["rank", "count", "trials"]);
    for (r, &c) in h.counts.iter().enumerate() {
        t.push(vec![r.into(), c.into(), h.trials.into()]);
    }
    t
}

pub fn hankel_table(base: &HankelCheck, shifted: &[ShiftedRank]) -> Table {
    let mut t = Table::new(&["kind", "i", "start", "size", "rank", "sigma_ratio", "full"]);
    t.push(vec![
        "nonsingular".into(),
        Cell::Empty,
        0usize.into(),
        base.size.into(),
        Cell::Empty,
        base.sigma_ratio.into(),
        base.nonsingular.into(),
    ]);
    for s in shifted {
        t.push(vec![
            "shifted".into(),
            s.i.into(),
            s.start.into(),
            Cell::Empty,
            s.rank.into(),
            s.sigma_ratio.into(),
            s.full.into(),
        ]);
    }
    t
}

pub fn scatter_table(points: &[ScatterPoint]) -> Table {
    let mut t = Table::new(&["x_t", "x_t_lag", "tagged"]);
    for p in points {
        t.push(vec![p.x_t.into(), p.x_lagged.into(), p.tagged.into()]);
    }
    t
}

/// Empirical and analytic CDF on a uniform grid over the support.
pub fn cantor_table(samples: &[f64], grid: usize) -> Table {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len().max(1) as f64;
    let mut t = Table::new(&["x", "empirical_cdf", "cantor_cdf"]);
    for i in 0..=grid {
        let x = -1.5 + 3.0 * i as f64 / grid as f64;
        let below = sorted.partition_point(|&v| v <= x) as f64;
        t.push(vec![x.into(), (below / n).into(), cantor_cdf(x).into()]);
    }
    t
}

pub fn figure_bid(
    model: &ArmaModel,
    m_max: usize,
    n: usize,
    trials: usize,
    streams: &SeedStream,
    svg: bool,
) -> Result<Artifact> {
    let oracle = empirical_dimension_histogram(model, n, trials, streams)?.mean_normalized();
    let (p, q, alpha) = (model.p(), model.q(), model.alpha());
    let table = bid_table(m_max, p, q, alpha, Some((oracle, trials)));
    let plot = svg.then(|| {
        let pts = |f: fn((f64, f64)) -> f64| {
            (1..=m_max)
                .map(|m| (m as f64, f(bid_bounds(m, p, q, alpha))))
                .collect::<Vec<_>>()
        };
        line_plot(
            "block-average dimension bounds",
            "m",
            "d(X^{m+p}) / (m+p)",
            &[
                Series::new("lower", pts(|b| b.0)),
                Series::new("upper", pts(|b| b.1)),
                Series::new("alpha", vec![(1.0, alpha), (m_max as f64, alpha)]),
            ],
        )
    });
    Ok(Artifact::new("bid", table, plot))
}

/// Histogram of `d_V` and the matching concentration report over all `k`.
pub fn figure_histogram(
    model: &ArmaModel,
    n: usize,
    trials: usize,
    variant: TailVariant,
    streams: &SeedStream,
    svg: bool,
) -> Result<Vec<Artifact>> {
    let hist = empirical_dimension_histogram(model, n, trials, streams)?;
    let k_grid: Vec<usize> = (0..=n).collect();
    let rows = check_concentration(&hist, &k_grid, variant)?;
    let plot = svg.then(|| {
        let bars: Vec<(f64, f64)> = hist
            .counts
            .iter()
            .enumerate()
            .map(|(d, &c)| (d as f64, c as f64 / hist.trials.max(1) as f64))
            .collect();
        bar_chart("singular dimension", "d_V", "frequency", &bars)
    });
    let conc_plot = svg.then(|| {
        let series = |f: fn(&ConcentrationCheck) -> Option<f64>, label: &str| {
            Series::new(
                label,
                rows.iter()
                    .filter_map(|r| f(r).map(|v| (r.k as f64, v)))
                    .collect(),
            )
        };
        line_plot(
            "tail probabilities",
            "k",
            "probability",
            &[series(|r| r.empirical, "empirical"), series(|r| r.bound, "bound")],
        )
    });
    Ok(vec![
        Artifact::new("histogram", histogram_table(&hist), plot),
        Artifact::new("concentration", concentration_table(&rows), conc_plot),
    ])
}

pub fn figure_cantor(depth: usize, count: usize, streams: &SeedStream, svg: bool) -> Result<(Artifact, f64)> {
    let xs = sample_bernoulli_convolution(1.0 / 3.0, depth, count, &mut streams.trial(0))?;
    let distance = sup_distance(&xs, cantor_cdf);
    let table = cantor_table(&xs, 600);
    let plot = svg.then(|| {
        let col = |j: usize| -> Vec<(f64, f64)> {
            table
                .rows()
                .iter()
                .map(|r| (r[0].parse().unwrap_or(f64::NAN), r[j].parse().unwrap_or(f64::NAN)))
                .collect()
        };
        line_plot(
            "Bernoulli convolution, a = 1/3",
            "x",
            "CDF",
            &[Series::new("empirical", col(1)), Series::new("Cantor", col(2))],
        )
    });
    Ok((Artifact::new("cantor", table, plot), distance))
}

pub fn figure_scatter(
    model: &ArmaModel,
    lag: usize,
    count: usize,
    streams: &SeedStream,
    svg: bool,
) -> Result<Artifact> {
    let pts = joint_scatter(model, lag, count, &mut streams.trial(0))?;
    let plot = svg.then(|| {
        let pick = |tagged: bool| -> Vec<(f64, f64)> {
            pts.iter()
                .filter(|p| p.tagged == tagged)
                .map(|p| (p.x_t, p.x_lagged))
                .collect()
        };
        scatter_plot(
            "lagged pairs",
            "X_t",
            "X_{t+lag}",
            &[Series::new("mixed", pick(false)), Series::new("all atoms", pick(true))],
        )
    });
    Ok(Artifact::new("scatter", scatter_table(&pts), plot))
}

pub fn figure_rate(
    model: &ArmaModel,
    n: usize,
    rates: &[f64],
    trials: usize,
    decoder: DecoderMode,
    streams: &SeedStream,
    svg: bool,
) -> Result<(Artifact, Vec<RateTrialResult>)> {
    let res = rate_curve(model, n, rates, trials, decoder, DEFAULT_SUCCESS_TOL, streams)?;
    let plot = svg.then(|| {
        let pts = res.iter().map(|r| (r.config.rate, r.success_fraction())).collect();
        line_plot("recovery rate", "R", "success fraction", &[Series::new(&decoder.label(), pts)])
    });
    Ok((Artifact::new("rate", rate_table(&res), plot), res))
}
