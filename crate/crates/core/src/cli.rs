//! Command-line front end. Every subcommand writes CSV artifacts into `--out`
//! (plus SVG with `--svg`) and prints a short summary.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::affine::{check_concentration, empirical_dimension_histogram};
use crate::arma::{build_toeplitz, parse_model_spec, simulate_path, ArmaModel};
use crate::compressor::{DecoderMode, DEFAULT_SEARCH_BUDGET};
use crate::dimension::{estimate_idr, estimate_rid, EntropyMethod, TailVariant};
use crate::error::Error;
use crate::hankel::{
    check_hankel_nonsingular, random_column_rank_distribution, shifted_hankel_full_rank,
    shifted_hankel_threshold, RationalFilter,
};
use crate::reports::{self, Artifact, Table};
use crate::rng::SeedStream;

#[derive(Debug, Parser)]
#[command(name = "dce-arma", version, about = "Dimension and compressibility experiments for ARMA processes with mixed excitation")]
pub struct Cli {
    /// Master seed; every output is a function of it.
    #[arg(long, global = true, env = "DCE_ARMA_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    PlugIn,
    MillerMadow,
}

impl From<MethodArg> for EntropyMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::PlugIn => EntropyMethod::PlugIn,
            MethodArg::MillerMadow => EntropyMethod::MillerMadow,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureKind {
    Bid,
    Histogram,
    Cantor,
    Scatter,
    Rate,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoderArg(pub DecoderMode);

impl FromStr for DecoderArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "genie" => Ok(DecoderArg(DecoderMode::Genie)),
            None if s == "search" => Ok(DecoderArg(DecoderMode::Search {
                budget: DEFAULT_SEARCH_BUDGET,
            })),
            Some(("search", k)) => match k.parse::<usize>() {
                Ok(budget) if budget >= 1 => Ok(DecoderArg(DecoderMode::Search { budget })),
                _ => Err(format!("search budget must be a positive integer, got '{k}'")),
            },
            _ => Err(format!("expected 'genie' or 'search:K', got '{s}'")),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one stationary block with its excitation window.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long)]
        burn_in: Option<usize>,
    },
    /// Information dimension of the excitation law from quantized entropies.
    Rid {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256,512,1024,2048,4096")]
        m_grid: Vec<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::PlugIn)]
        method: MethodArg,
    },
    /// Block-average dimension bounds and the genie estimate.
    Bid {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 200)]
        m_max: usize,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Normalized joint quantized entropy of short blocks.
    Idr {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 16)]
        m: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::PlugIn)]
        method: MethodArg,
    },
    /// Histogram of the singular dimension over sampled continuity patterns.
    Histogram {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Empirical tails of the singular dimension against the KL bounds.
    Concentration {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Defaults to every k in 0..=n.
        #[arg(long, value_delimiter = ',')]
        k_grid: Option<Vec<usize>>,
        /// Use (k+q)/(n+q-p) in the upper-tail bound.
        #[arg(long)]
        appendix_variant: bool,
    },
    /// Success of linear compression against the rate.
    Compress {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 80)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65,0.7,0.75,0.8")]
        rates: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// `genie` or `search:K`.
        #[arg(long, default_value = "genie")]
        decoder: DecoderArg,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Hankel rank checks for the model's filter and random column-rank tallies of Theta.
    Hankel {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Empirical CDF of the a = 1/3 Bernoulli convolution against the Cantor function.
    Cantor {
        #[arg(long, default_value_t = 25)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Regenerate the standard figures with built-in models (override with --model).
    Figures {
        #[arg(value_enum)]
        which: FigureKind,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Monte Carlo trials for the bid, histogram and rate figures.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

/// Parses `args` (program name first), runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn load_model(path: &Path) -> Result<ArmaModel, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read model {}: {e}", path.display())))?;
    let model = parse_model_spec(&text)?;
    model.ensure_stable()?;
    Ok(model)
}

fn emit(cli: &Cli, artifacts: &[Artifact]) -> Result<Vec<String>, Failure> {
    fs::create_dir_all(&cli.out)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", cli.out.display())))?;
    let mut written = Vec::new();
    for a in artifacts {
        let csv = cli.out.join(format!("{}.csv", a.name));
        write_table(&csv, &a.table, cli.seed)?;
        written.push(format!("wrote {}", csv.display()));
        if let (true, Some(svg)) = (cli.svg, &a.svg) {
            let path = cli.out.join(format!("{}.svg", a.name));
            fs::write(&path, svg)
                .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
            written.push(format!("wrote {}", path.display()));
        }
    }
    Ok(written)
}

fn write_table(path: &Path, table: &Table, seed: u64) -> Result<(), Failure> {
    table
        .write(path, seed)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn plain(name: &str, table: Table) -> Artifact {
    Artifact {
        name: name.to_string(),
        table,
        svg: None,
    }
}

fn run(cli: &Cli) -> Result<Vec<String>, Failure> {
    let streams = SeedStream::new(cli.seed);
    let mut summary = Vec::new();
    let artifacts: Vec<Artifact> = match &cli.command {
        Command::Simulate { model, n, burn_in } => {
            let model = load_model(model)?;
            let path = simulate_path(&model, *n, *burn_in, &mut streams.trial(0))?;
            summary.push(format!("n={} burn_in={}", path.n(), path.burn_in));
            let plot = cli.svg.then(|| {
                let pts = path.x.iter().enumerate().map(|(i, &x)| ((i + 1) as f64, x)).collect();
                reports::line_plot("sample path", "t", "X_t", &[reports::Series::new("X", pts)])
            });
            vec![Artifact {
                name: "path".into(),
                table: reports::path_table(&path),
                svg: plot,
            }]
        }
        Command::Rid {
            model,
            m_grid,
            samples,
            method,
        } => {
            let model = load_model(model)?;
            let dist = model.excitation().clone();
            let est = estimate_rid(
                1,
                |rng, row| row[0] = dist.sample(rng).0,
                m_grid,
                *samples,
                (*method).into(),
                &mut streams.trial(0),
            )?;
            summary.push(format!(
                "slope={:.6} stderr={:.6} fit_range={}..{}",
                est.slope, est.stderr, est.m_range.0, est.m_range.1
            ));
            vec![plain("rid", reports::rid_table(&est))]
        }
        Command::Bid {
            model,
            m_max,
            n,
            trials,
        } => {
            let model = load_model(model)?;
            let art = reports::figure_bid(&model, *m_max, *n, *trials, &streams, cli.svg)?;
            summary.push(format!("oracle_estimate={}", art.table.rows()[0][3]));
            vec![art]
        }
        Command::Idr {
            model,
            m,
            n_grid,
            samples,
            method,
        } => {
            let model = load_model(model)?;
            let pts = estimate_idr(&model, *m, n_grid, *samples, (*method).into(), &mut streams.trial(0))?;
            for p in &pts {
                summary.push(format!("n={} m={} value={:.6}", p.n, p.m, p.value));
            }
            vec![plain("idr", reports::idr_table(&pts))]
        }
        Command::Histogram { model, n, trials } => {
            let model = load_model(model)?;
            let h = empirical_dimension_histogram(&model, *n, *trials, &streams)?;
            summary.push(format!(
                "mean_dv_over_n={:.6} mode={}",
                h.mean_normalized(),
                h.mode()
            ));
            let plot = cli.svg.then(|| {
                let bars: Vec<(f64, f64)> = h
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(d, &c)| (d as f64, c as f64))
                    .collect();
                reports::bar_chart("singular dimension", "d_V", "count", &bars)
            });
            vec![Artifact {
                name: "histogram".into(),
                table: reports::histogram_table(&h),
                svg: plot,
            }]
        }
        Command::Concentration {
            model,
            n,
            trials,
            k_grid,
            appendix_variant,
        } => {
            let model = load_model(model)?;
            let h = empirical_dimension_histogram(&model, *n, *trials, &streams)?;
            let ks: Vec<usize> = k_grid.clone().unwrap_or_else(|| (0..=*n).collect());
            if let Some(&k) = ks.iter().find(|&&k| k > *n) {
                return Err(Failure::Config(format!("k = {k} exceeds n = {n}")));
            }
            let variant = if *appendix_variant {
                TailVariant::Appendix
            } else {
                TailVariant::Theorem
            };
            let rows = check_concentration(&h, &ks, variant)?;
            let failed = rows.iter().filter(|r| r.satisfied == Some(false)).count();
            let checked = rows.iter().filter(|r| r.satisfied.is_some()).count();
            summary.push(format!("checked={checked} violated={failed}"));
            vec![plain("concentration", reports::concentration_table(&rows))]
        }
        Command::Compress {
            model,
            n,
            rates,
            trials,
            decoder,
            tol,
        } => {
            let model = load_model(model)?;
            if !(*tol > 0.0) {
                return Err(Failure::Config(format!("tolerance {tol} must be positive")));
            }
            let res = crate::compressor::rate_curve(&model, *n, rates, *trials, decoder.0, *tol, &streams)?;
            for r in &res {
                summary.push(format!(
                    "rate={} measurements={} success={:.4}",
                    r.config.rate,
                    r.measurement_count,
                    r.success_fraction()
                ));
            }
            let plot = cli.svg.then(|| {
                let pts = res.iter().map(|r| (r.config.rate, r.success_fraction())).collect();
                reports::line_plot(
                    "recovery rate",
                    "R",
                    "success fraction",
                    &[reports::Series::new(&decoder.0.label(), pts)],
                )
            });
            vec![Artifact {
                name: "rate".into(),
                table: reports::rate_table(&res),
                svg: plot,
            }]
        }
        Command::Hankel { model, n, trials } => {
            let model = load_model(model)?;
            let filter = RationalFilter::from_model(&model)?;
            let base = check_hankel_nonsingular(&filter);
            let mut shifted = Vec::new();
            if let Some(thr) =
                shifted_hankel_threshold(filter.nonzero_pole_count(), filter.zero_pole_count())
            {
                for i in thr..thr + 3 {
                    shifted.push(shifted_hankel_full_rank(&filter, i)?);
                }
            }
            summary.push(format!(
                "hankel size={} nonsingular={} shifted_full={}/{}",
                base.size,
                base.nonsingular,
                shifted.iter().filter(|s| s.full).count(),
                shifted.len()
            ));
            let ts = build_toeplitz(&model, *n)?;
            let ranks = random_column_rank_distribution(&ts.theta_mat, model.alpha(), *trials, &streams);
            vec![
                plain("hankel", reports::hankel_table(&base, &shifted)),
                plain("rank_histogram", reports::rank_table(&ranks)),
            ]
        }
        Command::Cantor { depth, samples } => {
            let (art, d) = reports::figure_cantor(*depth, *samples, &streams, cli.svg)?;
            summary.push(format!("sup_distance={d:.6}"));
            vec![art]
        }
        Command::Figures {
            which,
            model,
            trials,
            n,
        } => figures(cli, *which, model.as_deref(), *trials, *n, &streams, &mut summary)?,
    };
    let mut lines = summary;
    lines.extend(emit(cli, &artifacts)?);
    Ok(lines)
}

fn figures(
    cli: &Cli,
    which: FigureKind,
    model: Option<&Path>,
    trials: Option<usize>,
    n: Option<usize>,
    streams: &SeedStream,
    summary: &mut Vec<String>,
) -> Result<Vec<Artifact>, Failure> {
    let pick = |default: Result<ArmaModel, Error>| -> Result<ArmaModel, Failure> {
        match model {
            Some(p) => load_model(p),
            None => Ok(default?),
        }
    };
    let kinds: Vec<FigureKind> = match which {
        FigureKind::All => vec![
            FigureKind::Bid,
            FigureKind::Histogram,
            FigureKind::Cantor,
            FigureKind::Scatter,
            FigureKind::Rate,
        ],
        k => vec![k],
    };
    let mut out = Vec::new();
    for kind in kinds {
        match kind {
            FigureKind::Bid => {
                let m = pick(reports::default_ar2(0.5))?;
                out.push(reports::figure_bid(&m, 200, n.unwrap_or(200), trials.unwrap_or(2000), streams, cli.svg)?);
            }
            FigureKind::Histogram => {
                let m = pick(reports::default_arma23(0.6))?;
                out.extend(reports::figure_histogram(
                    &m,
                    n.unwrap_or(100),
                    trials.unwrap_or(10_000),
                    TailVariant::Theorem,
                    streams,
                    cli.svg,
                )?);
            }
            FigureKind::Cantor => {
                let (art, d) = reports::figure_cantor(25, 100_000, streams, cli.svg)?;
                summary.push(format!("cantor sup_distance={d:.6}"));
                out.push(art);
            }
            FigureKind::Scatter => {
                let m = pick(reports::default_scatter_ar1())?;
                out.push(reports::figure_scatter(&m, 1, 2000, streams, cli.svg)?);
            }
            FigureKind::Rate => {
                let m = pick(reports::default_arma11(0.5))?;
                let rates: Vec<f64> = (0..=10).map(|i| 0.3 + 0.05 * i as f64).collect();
                let (art, _) = reports::figure_rate(
                    &m,
                    n.unwrap_or(80),
                    &rates,
                    trials.unwrap_or(500),
                    DecoderMode::Genie,
                    streams,
                    cli.svg,
                )?;
                out.push(art);
            }
            FigureKind::All => unreachable!("expanded above"),
        }
    }
    Ok(out)
}
