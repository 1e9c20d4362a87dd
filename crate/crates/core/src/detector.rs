//! Coincidence-count model after averaging over the detector resolving time.
//!
//! Each comb tooth at `τ₀ + nτ_r` is replaced by the response kernel
//! `(1 + x)e^(−x)`, `x = 2|t| ln2 / T_R`, all under one bandwidth envelope
//! centred on the electric delay τ₀:
//!
//! ```text
//! Γ_c⁽⁰⁾(τ) = e^(−Ω_c|τ−τ₀|) Σ_n (1 + x_n) e^(−x_n),  x_n = 2|τ − nτ_r − τ₀| ln2 / T_R
//! Γ_c(τ)    = C₁[4Γ_c⁽⁰⁾(τ)cos²θ + Γ_c⁽⁰⁾(τ−T) + Γ_c⁽⁰⁾(τ+T)] + C₂
//! ```

use std::f64::consts::LN_2;

use crate::error::{finite, non_negative, positive, Error, Result};
use crate::opo::OpoParams;

/// Kernel argument beyond which a tooth contributes less than `41·e⁻⁴⁰ ≈ 2e−16`.
const KERNEL_CUTOFF_X: f64 = 40.0;

/// Margin, in units of `max(T_R, 1/Ω_c)`, added around the evaluation window
/// when choosing the comb truncation. The kernel mass beyond 16·T_R is ~3e−9.
const TRUNCATION_MARGIN: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    resolving_time: f64,
    electric_delay: f64,
    n_max: u32,
}

impl DetectorParams {
    pub fn new(resolving_time: f64, electric_delay: f64, n_max: u32) -> Result<Self> {
        positive("T_R", resolving_time)?;
        finite("tau0", electric_delay)?;
        Ok(Self {
            resolving_time,
            electric_delay,
            n_max,
        })
    }

    /// Picks `n_max` so the comb sum is converged over `window` (and its ±T
    /// shifted copies).
    pub fn for_window(
        resolving_time: f64,
        electric_delay: f64,
        window: (f64, f64),
        opo: &OpoParams,
        delay_t: f64,
    ) -> Result<Self> {
        let probe = Self::new(resolving_time, electric_delay, 0)?;
        Ok(Self {
            n_max: default_n_max(&probe, window, opo, delay_t)?,
            ..probe
        })
    }

    pub fn resolving_time(&self) -> f64 {
        self.resolving_time
    }

    pub fn electric_delay(&self) -> f64 {
        self.electric_delay
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn with_n_max(self, n_max: u32) -> Self {
        Self { n_max, ..self }
    }

    /// `2 ln2 / T_R`, the inverse length scale of the kernel.
    pub(crate) fn kernel_rate(&self) -> f64 {
        2.0 * LN_2 / self.resolving_time
    }

    /// Offset beyond which a comb tooth no longer contributes at f64 precision.
    pub fn kernel_reach(&self) -> f64 {
        KERNEL_CUTOFF_X / self.kernel_rate()
    }
}

fn default_n_max(
    d: &DetectorParams,
    window: (f64, f64),
    opo: &OpoParams,
    delay_t: f64,
) -> Result<u32> {
    let (lo, hi) = window;
    finite("window_lo", lo)?;
    finite("window_hi", hi)?;
    let far = (lo - d.electric_delay)
        .abs()
        .max((hi - d.electric_delay).abs());
    let margin = TRUNCATION_MARGIN * d.resolving_time.max(1.0 / opo.omega_c());
    let n = ((far + delay_t.abs() + margin) / opo.tau_r()).ceil();
    if n > f64::from(u32::MAX / 2) {
        return Err(Error::param(
            "n_max",
            format!("comb truncation {n} too large for window {lo}..{hi}"),
        ));
    }
    Ok(n as u32)
}

/// Scale `C₁`, background `C₂`, phase θ and delay T of the coincidence model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceModelParams {
    pub c1: f64,
    pub c2: f64,
    pub theta: f64,
    pub delay_t: f64,
}

impl CoincidenceModelParams {
    pub fn new(c1: f64, c2: f64, theta: f64, delay_t: f64) -> Result<Self> {
        non_negative("c1", c1)?;
        non_negative("c2", c2)?;
        finite("theta", theta)?;
        positive("delay_T", delay_t)?;
        Ok(Self {
            c1,
            c2,
            theta,
            delay_t,
        })
    }
}

/// `(1 + 2|t| ln2/T_R) exp(−2|t| ln2/T_R)`.
pub fn response_kernel(t: f64, d: &DetectorParams) -> f64 {
    let x = d.kernel_rate() * t.abs();
    (1.0 + x) * (-x).exp()
}

/// Γ_c⁽⁰⁾(τ): detector-averaged comb with `|n| ≤ n_max` teeth.
pub fn gamma_c0(tau: f64, opo: &OpoParams, d: &DetectorParams) -> f64 {
    let offset = tau - d.electric_delay;
    let tau_r = opo.tau_r();
    let reach = d.kernel_reach();
    let n_max = f64::from(d.n_max);
    let first = ((offset - reach) / tau_r).ceil().max(-n_max);
    let last = ((offset + reach) / tau_r).floor().min(n_max);
    let rate = d.kernel_rate();

    let mut sum = 0.0;
    if first <= last {
        for n in first as i64..=last as i64 {
            let x = rate * (offset - n as f64 * tau_r).abs();
            sum += (1.0 + x) * (-x).exp();
        }
    }
    (-opo.omega_c() * offset.abs()).exp() * sum
}

/// Shape of Γ_c with `C₁ = 1, C₂ = 0`: `4Γ_c⁽⁰⁾(τ)cos²θ + Γ_c⁽⁰⁾(τ−T) + Γ_c⁽⁰⁾(τ+T)`.
pub fn coincidence_shape(
    tau: f64,
    opo: &OpoParams,
    d: &DetectorParams,
    theta: f64,
    delay_t: f64,
) -> f64 {
    let c = theta.cos();
    4.0 * gamma_c0(tau, opo, d) * c * c
        + gamma_c0(tau - delay_t, opo, d)
        + gamma_c0(tau + delay_t, opo, d)
}

/// Measurable coincidence model Γ_c(τ).
pub fn gamma_c(tau: f64, opo: &OpoParams, d: &DetectorParams, m: &CoincidenceModelParams) -> f64 {
    m.c1 * coincidence_shape(tau, opo, d, m.theta, m.delay_t) + m.c2
}
