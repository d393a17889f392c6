use std::path::PathBuf;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use hexcov_core::montecarlo::{sample_guarded_nearest_distance, OutageEstimate, Simulation};
use hexcov_core::rng::SplitMix64;
use hexcov_core::stats::ks_statistic;
use hexcov_core::theory;
use serde_json::{json, Value};

use hexcov::config::{self, PartialConfig, RunConfig};
use hexcov::emit::{num, opt_num, Format, Report};
use hexcov::{driver, CliError};

#[derive(Parser, Debug)]
#[command(name = "hexcov", version, about = "Coverage simulator for clustered cellular networks")]
struct Cli {
    /// JSON config file; flags override file values. Falls back to the
    /// HEXCOV_CONFIG environment variable.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Debug)]
struct Flags {
    /// Base-station density.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Cluster density; K = lambda / eta.
    #[arg(long, global = true)]
    eta: Option<f64>,
    /// Interior-zone area fraction in (0, 1].
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// Path-loss exponent (> 2).
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Main-lobe gain support lower end.
    #[arg(long, global = true)]
    delta1: Option<f64>,
    /// Main-lobe gain support upper end.
    #[arg(long, global = true)]
    delta2: Option<f64>,
    /// Side-lobe gain level.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Outage threshold.
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Antenna count; omitted = unlimited nulling.
    #[arg(long, global = true)]
    m_antennas: Option<u32>,
    /// Hexagon rings in the simulation window.
    #[arg(long, global = true)]
    rings: Option<u32>,
    /// Serving-link law: rayleigh | exact-cell.
    #[arg(long, global = true)]
    link_mode: Option<String>,
    /// Side-lobe law: constant | uniform.
    #[arg(long, global = true)]
    sidelobe_mode: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Mobile placement: center | typical.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Cluster sizes for sweep/theory, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    k_values: Option<Vec<f64>>,
    #[arg(long, global = true)]
    n_trials: Option<u64>,
    /// Tail thresholds, comma separated, increasing.
    #[arg(long, global = true, value_delimiter = ',')]
    x_grid: Option<Vec<f64>>,
    /// Inner truncation radius for the shot-noise tail.
    #[arg(long, global = true)]
    r: Option<f64>,
    /// Outer truncation radius for the shot-noise tail.
    #[arg(long, global = true)]
    r_out: Option<f64>,
    /// Window sizes compared by `convergence`, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    rings_sweep: Option<Vec<u32>>,
    /// Advisory worker count; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

impl Flags {
    fn into_partial(self) -> PartialConfig {
        PartialConfig {
            lambda: self.lambda,
            eta: self.eta,
            nu: self.nu,
            alpha: self.alpha,
            delta1: self.delta1,
            delta2: self.delta2,
            delta: self.delta,
            theta: self.theta,
            m_antennas: self.m_antennas,
            rings: self.rings,
            link_mode: self.link_mode,
            sidelobe_mode: self.sidelobe_mode,
            seed: self.seed,
            mode: self.mode,
            k_values: self.k_values,
            n_trials: self.n_trials,
            x_grid: self.x_grid,
            r: self.r,
            r_out: self.r_out,
            rings_sweep: self.rings_sweep,
            threads: self.threads,
        }
    }
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Closed-form outage exponent table over the K list.
    Theory,
    /// Single-point Monte Carlo outage estimate.
    Outage,
    /// Outage sweep over K with a log-linear exponent fit.
    Sweep,
    /// Empirical CCDF of the link power or the truncated shot noise.
    Tail {
        #[arg(long, value_enum, default_value = "link")]
        kind: TailKind,
    },
    /// Distance-law goodness-of-fit checks (KS statistics).
    Geomcheck,
    /// Window-truncation bias check across ring counts.
    Convergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum TailKind {
    Link,
    Shot,
}

fn main() {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            // clap reserves exit code 2 for usage errors; here 2 means a
            // runtime failure, so usage problems exit 1 like any other
            // validation error.
            if e.use_stderr() {
                e.print().expect("stderr");
                std::process::exit(1);
            }
            e.exit(); // --help / --version
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("matches parse back");
    let started = Instant::now();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    eprintln!("wall time: {:.3}s", started.elapsed().as_secs_f64());
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = config::resolve(cli.flags.into_partial(), cli.config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Engine(format!("thread pool: {e}")))?;
    let report = pool.install(|| dispatch(cli.cmd, &cfg))?;
    report.write(cli.format, cli.output.as_deref())
}

fn dispatch(cmd: Cmd, cfg: &RunConfig) -> Result<Report, CliError> {
    match cmd {
        Cmd::Theory => theory_cmd(cfg),
        Cmd::Outage => outage_cmd(cfg),
        Cmd::Sweep => sweep_cmd(cfg),
        Cmd::Tail { kind } => tail_cmd(cfg, kind),
        Cmd::Geomcheck => geomcheck_cmd(cfg),
        Cmd::Convergence => convergence_cmd(cfg),
    }
}

fn theory_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let params = cfg.params()?;
    let mut rep = Report::new(
        cfg,
        "theory",
        &["K", "psi_center", "psi_typical_lo", "psi_typical_hi", "psi_typical_lo_alt", "regime"],
    );
    for k in cfg.k_points() {
        let (center, bounds) = driver::theory_rows(&params, k);
        rep.push_row(vec![
            num(k),
            num(center),
            num(bounds.lo),
            num(bounds.hi),
            num(bounds.lo_alt),
            Value::String(format!("{:?}", bounds.regime)),
        ]);
    }
    Ok(rep)
}

fn estimate_row(k: f64, n: u64, est: &OutageEstimate) -> Vec<Value> {
    vec![
        num(k),
        json!(n),
        json!(est.n_outage),
        num(est.p_hat),
        num(est.ci_lo),
        num(est.ci_hi),
        opt_num(est.psi_hat),
    ]
}

fn outage_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let params = cfg.params()?;
    let mode = cfg.mobile_mode()?;
    let sim = Simulation::new(params).map_err(CliError::engine)?;
    let est = driver::estimate_outage(&sim, mode, cfg.n_trials, 0)?;
    let mut rep = Report::new(
        cfg,
        "outage",
        &["n", "n_accepted", "n_outage", "p_hat", "ci_lo", "ci_hi", "psi_hat", "acceptance_rate"],
    );
    rep.push_row(vec![
        json!(cfg.n_trials),
        json!(est.n_accepted),
        json!(est.n_outage),
        num(est.p_hat),
        num(est.ci_lo),
        num(est.ci_hi),
        opt_num(est.psi_hat),
        num(est.acceptance_rate),
    ]);
    Ok(rep)
}

fn sweep_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let params = cfg.params()?;
    let mode = cfg.mobile_mode()?;
    let points = driver::sweep_k(&params, &cfg.k_points(), cfg.n_trials, mode)?;
    let mut rep = Report::new(
        cfg,
        "sweep",
        &[
            "K",
            "n",
            "n_outage",
            "p_hat",
            "ci_lo",
            "ci_hi",
            "psi_hat",
            "psi_theory_center",
            "psi_theory_lo",
            "psi_theory_hi",
            "acceptance_rate",
        ],
    );
    let mut fit_points = Vec::new();
    for (k, est) in &points {
        let (center, bounds) = driver::theory_rows(&params, *k);
        let mut row = estimate_row(*k, cfg.n_trials, est);
        row.extend([num(center), num(bounds.lo), num(bounds.hi), num(est.acceptance_rate)]);
        rep.push_row(row);
        if est.p_hat > 0.0 && est.p_hat < 1.0 {
            fit_points.push((*k, est.p_hat));
        }
    }
    match theory::fit_exponent(&fit_points, theory::exponent_center(&params, 1.0)) {
        Ok(fit) => {
            rep.extra.insert(
                "fit".into(),
                json!({
                    "slope": fit.slope,
                    "intercept": fit.intercept,
                    "r_squared": fit.r_squared,
                    "ratio_to_theory": fit.ratio_to_theory,
                }),
            );
        }
        Err(e) => {
            rep.extra.insert("fit_error".into(), Value::String(e.to_string()));
        }
    }
    Ok(rep)
}

fn tail_cmd(cfg: &RunConfig, kind: TailKind) -> Result<Report, CliError> {
    let params = cfg.params()?;
    if cfg.x_grid.is_empty() {
        return Err(CliError::Validation("x_grid: tail needs at least one threshold".into()));
    }
    let curve = match kind {
        TailKind::Link => driver::link_power_tail(&params, &cfg.x_grid, cfg.n_trials, 0)?,
        TailKind::Shot => {
            driver::shot_noise_tail(&params, cfg.r, cfg.r_out, &cfg.x_grid, cfg.n_trials, 0)?
        }
    };
    let mut rep = Report::new(cfg, "tail", &["x", "p_hat", "ci_lo", "ci_hi"]);
    rep.extra.insert(
        "kind".into(),
        Value::String(match kind {
            TailKind::Link => "link".into(),
            TailKind::Shot => "shot".into(),
        }),
    );
    rep.extra.insert("n".into(), json!(curve.n));
    for i in 0..curve.thresholds.len() {
        rep.push_row(vec![
            num(curve.thresholds[i]),
            num(curve.p_hat[i]),
            num(curve.ci_lo[i]),
            num(curve.ci_hi[i]),
        ]);
    }
    Ok(rep)
}

fn geomcheck_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let params = cfg.params()?;
    let sim = Simulation::new(params.clone()).map_err(CliError::engine)?;
    let n = cfg.n_trials as usize;
    let mut rep = Report::new(cfg, "geomcheck", &["law", "n", "ks", "threshold", "pass"]);

    let mut rng = SplitMix64::new(params.seed);
    let mut nearest = Vec::with_capacity(n);
    while nearest.len() < n {
        if let Some(l) = sample_guarded_nearest_distance(&params, sim.region(), &mut rng) {
            nearest.push(l);
        }
    }
    let ks_l =
        ks_statistic(&mut nearest, |tau| 1.0 - theory::nearest_distance_ccdf(params.lambda, tau));
    rep.push_row(vec![
        Value::String("nearest-distance".into()),
        json!(n),
        num(ks_l),
        num(0.01),
        Value::Bool(ks_l < 0.01),
    ]);

    let rho = sim.region().lattice().rho();
    let a = params.nu.sqrt() * rho;
    let mut margins: Vec<f64> = (0..n)
        .map(|_| {
            use hexcov_core::geometry::{hex_depth, sample_uniform_hexagon, Point};
            a - hex_depth(sample_uniform_hexagon(Point::ORIGIN, a, &mut rng), Point::ORIGIN)
        })
        .collect();
    let ks_d = ks_statistic(&mut margins, |d| {
        1.0 - theory::boundary_distance_ccdf(params.nu, rho, d.clamp(0.0, a)).unwrap_or(0.0)
    });
    rep.push_row(vec![
        Value::String("boundary-distance".into()),
        json!(n),
        num(ks_d),
        num(0.01),
        Value::Bool(ks_d < 0.01),
    ]);
    Ok(rep)
}

fn convergence_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let params = cfg.params()?;
    let mode = cfg.mobile_mode()?;
    if cfg.rings_sweep.is_empty() {
        return Err(CliError::Validation("rings_sweep: needs at least one entry".into()));
    }
    let mut rep = Report::new(
        cfg,
        "convergence",
        &[
            "rings",
            "n",
            "n_outage",
            "p_hat",
            "ci_lo",
            "ci_hi",
            "acceptance_rate",
            "ci_overlaps_first",
        ],
    );
    let mut first: Option<(f64, f64)> = None;
    for &rings in &cfg.rings_sweep {
        let p = hexcov_core::netmodel::SimParams { rings, ..params.clone() };
        let sim = Simulation::new(p).map_err(CliError::engine)?;
        let est = driver::estimate_outage(&sim, mode, cfg.n_trials, 0)?;
        let overlaps = match first {
            None => {
                first = Some((est.ci_lo, est.ci_hi));
                Value::Null
            }
            Some((lo0, hi0)) => Value::Bool(est.ci_lo <= hi0 && lo0 <= est.ci_hi),
        };
        rep.push_row(vec![
            json!(rings),
            json!(cfg.n_trials),
            json!(est.n_outage),
            num(est.p_hat),
            num(est.ci_lo),
            num(est.ci_hi),
            num(est.acceptance_rate),
            overlaps,
        ]);
    }
    Ok(rep)
}
