//! Flat `key = value` run configuration in command-line units.
//!
//! Time-valued keys carry an `_ns` suffix, frequencies are `Ω/2π` in MHz and
//! the phase is given in units of π so the `jπ/8` grid is exact. Blank lines
//! and `#` comments are ignored; unknown or repeated keys are errors.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::detector::DetectorParams;
use crate::error::{Error, Result};
use crate::fitting::{FitProblem, Weighting};
use crate::histogram::CoincidenceHistogram;
use crate::interferometer::InterferometerParams;
use crate::montecarlo::{SamplingMode, SimConfig};
use crate::opo::OpoParams;

const NS: f64 = 1e-9;
const MHZ: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// ε/2π in MHz.
    pub epsilon_mhz: f64,
    pub finesse: f64,
    pub finesse_lossless: f64,
    /// Ω_c/2π in MHz.
    pub omega_c_mhz: f64,
    pub tau_r_ns: f64,
    pub n_side_modes: u32,
    pub delay_t_ns: f64,
    pub theta_over_pi: f64,
    pub tau0_ns: f64,
    pub t_r_ns: f64,
    /// `None` picks the truncation from the window.
    pub comb_n_max: Option<u32>,
    pub n_events: u64,
    pub background_fraction: f64,
    pub window_lo_ns: f64,
    pub window_hi_ns: f64,
    pub bin_width_ns: f64,
    pub fit_lo_ns: f64,
    pub fit_hi_ns: f64,
    pub seed: u64,
    pub sampling: SamplingMode,
    pub weighting: Weighting,
    /// Scale and background used for the `gamma_c` column of `eval`.
    pub c1: f64,
    pub c2: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            epsilon_mhz: 1.1,
            finesse: 44.0,
            finesse_lossless: 44.0,
            omega_c_mhz: 11.0,
            tau_r_ns: 2.07,
            n_side_modes: 103,
            delay_t_ns: 0.97,
            theta_over_pi: 0.0,
            tau0_ns: 47.5,
            t_r_ns: 0.28,
            comb_n_max: None,
            n_events: 1_000_000,
            background_fraction: 0.4,
            window_lo_ns: 18.0,
            window_hi_ns: 77.0,
            bin_width_ns: 0.1,
            fit_lo_ns: 18.0,
            fit_hi_ns: 77.0,
            seed: 1,
            sampling: SamplingMode::DetectorModel,
            weighting: Weighting::Poisson,
            c1: 1.0,
            c2: 0.0,
        }
    }
}

pub const KEYS: [&str; 23] = [
    "epsilon_mhz",
    "finesse",
    "finesse_lossless",
    "omega_c_mhz",
    "tau_r_ns",
    "n_side_modes",
    "delay_T_ns",
    "theta_over_pi",
    "tau0_ns",
    "T_R_ns",
    "comb_n_max",
    "n_events",
    "background_fraction",
    "window_lo_ns",
    "window_hi_ns",
    "bin_width_ns",
    "fit_lo_ns",
    "fit_hi_ns",
    "seed",
    "sampling",
    "weighting",
    "c1",
    "c2",
];

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        msg: format!("cannot parse `{value}` for `{key}`"),
    })
}

/// Config key that carries a given internal parameter.
fn key_for(field: &'static str) -> &'static str {
    match field {
        "epsilon" => "epsilon_mhz",
        "omega_c" => "omega_c_mhz",
        "tau_r" => "tau_r_ns",
        "delay_T" => "delay_T_ns",
        "theta" => "theta_over_pi",
        "T_R" => "T_R_ns",
        "tau0" => "tau0_ns",
        "window_lo" => "window_lo_ns",
        "window_hi" => "window_hi_ns",
        "n_max" => "comb_n_max",
        other => other,
    }
}

fn rename(e: Error) -> Error {
    match e {
        Error::Param { field, reason } => Error::Param {
            field: key_for(field),
            reason,
        },
        other => other,
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::Config {
                    line,
                    msg: format!("duplicate key `{key}`"),
                });
            }
            cfg.set(line, key, value)?;
            seen.push(key.to_string());
        }
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Assigns one key; `line` is used for error messages.
    pub fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        match key {
            "epsilon_mhz" => self.epsilon_mhz = parse_value(line, key, value)?,
            "finesse" => self.finesse = parse_value(line, key, value)?,
            "finesse_lossless" => self.finesse_lossless = parse_value(line, key, value)?,
            "omega_c_mhz" => self.omega_c_mhz = parse_value(line, key, value)?,
            "tau_r_ns" => self.tau_r_ns = parse_value(line, key, value)?,
            "n_side_modes" => self.n_side_modes = parse_value(line, key, value)?,
            "delay_T_ns" => self.delay_t_ns = parse_value(line, key, value)?,
            "theta_over_pi" => self.theta_over_pi = parse_value(line, key, value)?,
            "tau0_ns" => self.tau0_ns = parse_value(line, key, value)?,
            "T_R_ns" => self.t_r_ns = parse_value(line, key, value)?,
            "comb_n_max" => {
                self.comb_n_max = if value == "auto" {
                    None
                } else {
                    Some(parse_value(line, key, value)?)
                }
            }
            "n_events" => self.n_events = parse_value(line, key, value)?,
            "background_fraction" => self.background_fraction = parse_value(line, key, value)?,
            "window_lo_ns" => self.window_lo_ns = parse_value(line, key, value)?,
            "window_hi_ns" => self.window_hi_ns = parse_value(line, key, value)?,
            "bin_width_ns" => self.bin_width_ns = parse_value(line, key, value)?,
            "fit_lo_ns" => self.fit_lo_ns = parse_value(line, key, value)?,
            "fit_hi_ns" => self.fit_hi_ns = parse_value(line, key, value)?,
            "seed" => self.seed = parse_value(line, key, value)?,
            "sampling" => {
                self.sampling = SamplingMode::parse(value).ok_or_else(|| Error::Config {
                    line,
                    msg: format!("`sampling` must be `detector` or `ideal`, got `{value}`"),
                })?
            }
            "weighting" => {
                self.weighting = Weighting::parse(value).ok_or_else(|| Error::Config {
                    line,
                    msg: format!("`weighting` must be `poisson` or `unweighted`, got `{value}`"),
                })?
            }
            "c1" => self.c1 = parse_value(line, key, value)?,
            "c2" => self.c2 = parse_value(line, key, value)?,
            _ => {
                return Err(Error::Config {
                    line,
                    msg: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    /// `(key, value)` pairs in canonical order; [`RunConfig::parse`] of
    /// [`RunConfig::emit`] is the identity.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let values = [
            self.epsilon_mhz.to_string(),
            self.finesse.to_string(),
            self.finesse_lossless.to_string(),
            self.omega_c_mhz.to_string(),
            self.tau_r_ns.to_string(),
            self.n_side_modes.to_string(),
            self.delay_t_ns.to_string(),
            self.theta_over_pi.to_string(),
            self.tau0_ns.to_string(),
            self.t_r_ns.to_string(),
            self.comb_n_max
                .map_or("auto".to_string(), |n| n.to_string()),
            self.n_events.to_string(),
            self.background_fraction.to_string(),
            self.window_lo_ns.to_string(),
            self.window_hi_ns.to_string(),
            self.bin_width_ns.to_string(),
            self.fit_lo_ns.to_string(),
            self.fit_hi_ns.to_string(),
            self.seed.to_string(),
            self.sampling.as_str().to_string(),
            self.weighting.as_str().to_string(),
            self.c1.to_string(),
            self.c2.to_string(),
        ];
        KEYS.iter().copied().zip(values).collect()
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn opo(&self) -> Result<OpoParams> {
        OpoParams::new(
            2.0 * PI * self.epsilon_mhz * MHZ,
            self.finesse,
            self.finesse_lossless,
            2.0 * PI * self.omega_c_mhz * MHZ,
            self.tau_r_ns * NS,
            self.n_side_modes,
        )
        .map_err(rename)
    }

    pub fn ifm(&self) -> Result<InterferometerParams> {
        InterferometerParams::new(self.delay_t_ns * NS, self.theta_over_pi * PI).map_err(rename)
    }

    pub fn theta(&self) -> f64 {
        self.theta_over_pi * PI
    }

    pub fn window(&self) -> (f64, f64) {
        (self.window_lo_ns * NS, self.window_hi_ns * NS)
    }

    pub fn fit_range(&self) -> (f64, f64) {
        (self.fit_lo_ns * NS, self.fit_hi_ns * NS)
    }

    /// Detector parameters; the automatic comb truncation covers both the
    /// histogram window and the fit range.
    pub fn det(&self) -> Result<DetectorParams> {
        let (w_lo, w_hi) = self.window();
        let (f_lo, f_hi) = self.fit_range();
        let span = (w_lo.min(f_lo), w_hi.max(f_hi));
        let det = match self.comb_n_max {
            Some(n) => DetectorParams::new(self.t_r_ns * NS, self.tau0_ns * NS, n),
            None => DetectorParams::for_window(
                self.t_r_ns * NS,
                self.tau0_ns * NS,
                span,
                &self.opo()?,
                self.delay_t_ns * NS,
            ),
        };
        det.map_err(rename)
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let cfg = SimConfig {
            opo: self.opo()?,
            ifm: self.ifm()?,
            det: self.det()?,
            n_events: self.n_events,
            background_fraction: self.background_fraction,
            window: self.window(),
            bin_width: self.bin_width_ns * NS,
            seed: self.seed,
            sampling: self.sampling,
        };
        cfg.validate().map_err(rename)?;
        Ok(cfg)
    }

    pub fn fit_problem(&self, histogram: CoincidenceHistogram) -> Result<FitProblem> {
        Ok(FitProblem {
            histogram,
            opo: self.opo()?,
            det: self.det()?,
            delay_t: self.delay_t_ns * NS,
            fit_range: self.fit_range(),
            initial_guess: None,
            weighting: self.weighting,
        })
    }
}
