//! `eval`, `simulate` and `fit` subcommands.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::detector::{gamma_c, CoincidenceModelParams};
use crate::error::{Error, Result};
use crate::fitting::{fit, phase_scan, residual_report, FitProblem, FitResult};
use crate::histogram::CoincidenceHistogram;
use crate::interferometer::{check_validity, gamma_approx, FullCorrelation};
use crate::montecarlo::{run_simulation, run_simulation_with_workers};
use crate::opo::gamma0_normalized;

const NS: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "opo-interference",
    version,
    about = "Model, simulate and fit two-photon interference of multimode OPO pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate Γ₀, the interference models and Γ_c over the window.
    Eval(Common),
    /// Generate a Monte Carlo coincidence histogram.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (output does not depend on this).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Fit C₁, C₂ and θ to one or more histograms.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(required = true)]
        histograms: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta_over_pi: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::read(p)?,
            None => RunConfig::default(),
        };
        if let Some(t) = self.theta_over_pi {
            cfg.theta_over_pi = t;
        }
        Ok(cfg)
    }
}

fn write_header(out: &mut String, title: &str, cfg: &RunConfig) {
    let _ = writeln!(out, "# {title}");
    for (k, v) in cfg.entries() {
        let _ = writeln!(out, "# {k} = {v}");
    }
}

/// Model table at the bin centres of the configured window. The first three
/// columns use the physical delay `τ − τ₀` and unit scale; `gamma_c` uses
/// the configured `c1`, `c2` and θ.
pub fn eval_table(cfg: &RunConfig) -> Result<String> {
    let opo = cfg.opo()?;
    let ifm = cfg.ifm()?;
    let det = cfg.det()?;
    let (lo, hi) = cfg.window();
    let grid = CoincidenceHistogram::uniform(lo, hi, cfg.bin_width_ns * NS)?;
    let model = CoincidenceModelParams::new(cfg.c1, cfg.c2, cfg.theta(), ifm.delay_t()).map_err(
        |e| match e {
            Error::Param {
                field: "theta",
                reason,
            } => Error::Param {
                field: "theta_over_pi",
                reason,
            },
            Error::Param {
                field: "delay_T",
                reason,
            } => Error::Param {
                field: "delay_T_ns",
                reason,
            },
            other => other,
        },
    )?;
    let full = FullCorrelation::new(&opo, &ifm);

    let mut out = String::new();
    write_header(&mut out, "model curves", cfg);
    let _ = writeln!(out, "# delta = {}", crate::opo::delta(&opo));
    for c in check_validity(&opo, &ifm).checks {
        let _ = writeln!(
            out,
            "# validity {} = {} (value {:e}, margin {:e})",
            c.condition.name(),
            if c.passed { "pass" } else { "fail" },
            c.value,
            c.margin
        );
    }
    let _ = writeln!(out, "tau_ns,gamma0,gamma_approx,gamma_full,gamma_c");
    let tau0 = det.electric_delay();
    for tau in grid.centers() {
        let s = tau - tau0;
        let _ = writeln!(
            out,
            "{:.6},{:e},{:e},{:e},{:e}",
            tau / NS,
            gamma0_normalized(s, &opo),
            gamma_approx(s, &opo, &ifm),
            full.eval(s),
            gamma_c(tau, &opo, &det, &model)
        );
    }
    Ok(out)
}

/// Simulated histogram tagged with the full configuration.
pub fn simulate(cfg: &RunConfig, workers: Option<usize>) -> Result<CoincidenceHistogram> {
    let sim = cfg.sim_config()?;
    let mut hist = match workers {
        Some(w) => run_simulation_with_workers(&sim, w)?,
        None => run_simulation(&sim)?,
    };
    for (k, v) in cfg.entries() {
        hist.set_meta(k, v);
    }
    Ok(hist)
}

/// Text report of fitting every histogram, and the number of failed fits.
pub struct FitReport {
    pub text: String,
    pub results: Vec<Result<FitResult>>,
}

impl FitReport {
    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| r.is_err()).count()
    }
}

fn write_fit(out: &mut String, problem: &FitProblem, r: &FitResult) {
    let [s1, s2, st] = r.uncertainties;
    let branches: Vec<String> = r
        .theta_branches
        .iter()
        .map(|b| format!("{:.6}", b / PI))
        .collect();
    let _ = writeln!(out, "converged = {}", r.converged);
    let _ = writeln!(out, "iterations = {}", r.iterations);
    let _ = writeln!(out, "c1 = {} +- {}", r.c1, s1);
    let _ = writeln!(out, "c2 = {} +- {}", r.c2, s2);
    let _ = writeln!(
        out,
        "theta_over_pi = {} +- {}",
        r.theta_canonical / PI,
        st / PI
    );
    let _ = writeln!(out, "theta_branches_over_pi = {}", branches.join(" "));
    let _ = writeln!(out, "residual_sum = {}", r.residual_sum);
    let _ = writeln!(out, "reduced_chi2 = {}", r.reduced_chi2);
    let _ = writeln!(out, "gradient_norm = {:e}", r.gradient_norm);
    let _ = writeln!(out, "bins_used = {}", r.bins_used);
    for w in &r.warnings {
        let _ = writeln!(out, "warning = {w}");
    }
    match residual_report(problem, r) {
        Ok(rep) => {
            let _ = writeln!(out, "worst_bin_ns = {:.6}", rep.centers[rep.worst_bin] / NS);
            let _ = writeln!(out, "bin_center_ns,counts,model,residual,pull");
            for i in 0..rep.centers.len() {
                let _ = writeln!(
                    out,
                    "{:.6},{},{:.6},{:.6},{:.4}",
                    rep.centers[i] / NS,
                    rep.counts[i],
                    rep.model[i],
                    rep.residuals[i],
                    rep.pulls[i]
                );
            }
        }
        Err(e) => {
            let _ = writeln!(out, "residuals unavailable: {e}");
        }
    }
}

/// Fits each file. When there are at least two inputs and all carry a
/// `theta_over_pi` tag, a phase scan (fitted against set phase) is appended.
pub fn fit_files(cfg: &RunConfig, paths: &[PathBuf]) -> Result<FitReport> {
    let base = cfg.fit_problem(CoincidenceHistogram::uniform(0.0, 1.0, 1.0)?)?;
    let loaded: Vec<Result<CoincidenceHistogram>> = paths
        .iter()
        .map(|p| CoincidenceHistogram::read(p))
        .collect();
    let tags: Option<Vec<f64>> = loaded
        .iter()
        .map(|h| h.as_ref().ok()?.meta("theta_over_pi")?.parse::<f64>().ok())
        .collect();

    let (problems, results): (Vec<Option<FitProblem>>, Vec<Result<FitResult>>) = loaded
        .into_par_iter()
        .map(|h| match h {
            Ok(histogram) => {
                let problem = FitProblem {
                    histogram,
                    ..base.clone()
                };
                let r = fit(&problem);
                (Some(problem), r)
            }
            Err(e) => (None, Err(e)),
        })
        .unzip();

    let mut out = String::new();
    write_header(&mut out, "fit report", cfg);
    for ((path, problem), result) in paths.iter().zip(&problems).zip(&results) {
        let _ = writeln!(out, "\n[fit {}]", path.display());
        match (problem, result) {
            (Some(p), Ok(r)) => write_fit(&mut out, p, r),
            (_, Err(e)) => {
                let _ = writeln!(out, "error = {e}");
            }
            (None, Ok(_)) => unreachable!("a result needs a loaded histogram"),
        }
    }

    if let (Some(tags), true) = (tags, paths.len() >= 2) {
        let data = problems
            .into_iter()
            .zip(&tags)
            .map(|(p, t)| (t * PI, p.expect("tagged inputs were loaded").histogram))
            .collect();
        let scan = phase_scan(&base, data);
        let _ = writeln!(out, "\n[phase scan]");
        let _ = writeln!(
            out,
            "theta_set_over_pi,theta_fit_over_pi,sigma_theta_over_pi,status"
        );
        for row in &scan.rows {
            let status = match &row.outcome {
                Ok(_) => "ok".to_string(),
                Err(e) => e.replace(',', ";"),
            };
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{}",
                row.theta_set / PI,
                row.theta_fit / PI,
                row.sigma_theta / PI,
                status
            );
        }
        let _ = writeln!(out, "slope = {}", scan.slope);
        let _ = writeln!(out, "intercept_over_pi = {}", scan.intercept / PI);
    }
    Ok(FitReport { text: out, results })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Eval(common) => {
            let cfg = common.load()?;
            emit(common.out.as_deref(), &eval_table(&cfg)?)?;
            Ok(0)
        }
        Command::Simulate {
            common,
            seed,
            workers,
        } => {
            let mut cfg = common.load()?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            emit(common.out.as_deref(), &simulate(&cfg, workers)?.to_text())?;
            Ok(0)
        }
        Command::Fit { common, histograms } => {
            let cfg = common.load()?;
            let report = fit_files(&cfg, &histograms)?;
            emit(common.out.as_deref(), &report.text)?;
            for (path, r) in histograms.iter().zip(&report.results) {
                if let Err(e) = r {
                    eprintln!("fit of {} failed: {e}", path.display());
                }
            }
            Ok(if report.failures() == report.results.len() {
                1
            } else {
                0
            })
        }
    }
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 when the run fails, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
