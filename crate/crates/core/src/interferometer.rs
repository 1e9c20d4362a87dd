//! Correlation function at one output port of the unbalanced interferometer.
//!
//! A photon pair whose members take the same arm (Case 1) keeps its comb
//! position `nτ_r` and interferes with phase `2θ`; a pair split between the
//! arms (Case 2) is shifted by `±T ≈ τ_r/2` and does not interfere.
//!
//! Every term of the correlation carries the overall OPO scale
//! `A = |ε|²(F/F₀)²`, so both forms here are returned normalized to `A = 1`;
//! δ still follows from ε. Multiply by [`OpoParams::scale`] for absolute values.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{finite, positive, Result};
use crate::opo::{delta, gamma0_normalized, peak_width, OpoParams};

/// Largest δ treated as "far below threshold" by [`check_validity`].
pub const DELTA_THRESHOLD: f64 = 0.1;

/// Path delay `T = T_L − T_S` and locked phase θ. θ is stored in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerParams {
    delay_t: f64,
    theta: f64,
}

impl InterferometerParams {
    pub fn new(delay_t: f64, theta: f64) -> Result<Self> {
        positive("delay_T", delay_t)?;
        finite("theta", theta)?;
        Ok(Self {
            delay_t,
            theta: canonical_phase(theta),
        })
    }

    pub fn delay_t(&self) -> f64 {
        self.delay_t
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        Self::new(self.delay_t, theta)
    }
}

/// Maps a finite phase into `[0, 2π)`.
pub fn canonical_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Full interferometer correlation Γ(τ), with the τ-independent multi-pair
/// term evaluated once per parameter set.
#[derive(Debug, Clone)]
pub struct FullCorrelation {
    opo: OpoParams,
    delay_t: f64,
    cos_theta: f64,
    phase: Complex64,
    delta: f64,
    constant_term: f64,
}

impl FullCorrelation {
    pub fn new(opo: &OpoParams, ifm: &InterferometerParams) -> Self {
        let d = delta(opo);
        let phase = Complex64::from_polar(1.0, ifm.theta);
        let t = ifm.delay_t;
        let constant_term = multi_pair_term(
            phase,
            (d * gamma0_normalized(0.0, opo)).sqrt(),
            (d * gamma0_normalized(-t, opo)).sqrt(),
            (d * gamma0_normalized(t, opo)).sqrt(),
        );
        Self {
            opo: *opo,
            delay_t: t,
            cos_theta: ifm.theta.cos(),
            phase,
            delta: d,
            constant_term,
        }
    }

    /// The τ-independent second term.
    pub fn constant_term(&self) -> f64 {
        self.constant_term
    }

    pub fn eval(&self, tau: f64) -> f64 {
        let t = self.delay_t;
        let g_mid = gamma0_normalized(tau, &self.opo);
        let g_minus = gamma0_normalized(tau - t, &self.opo);
        let g_plus = gamma0_normalized(tau + t, &self.opo);

        let bracket = (2.0 * g_mid.sqrt() * self.cos_theta + g_minus.sqrt() + g_plus.sqrt()) / 4.0;
        let d = self.delta;
        let third = multi_pair_term(
            self.phase,
            (d * g_mid).sqrt(),
            (d * g_minus).sqrt(),
            (d * g_plus).sqrt(),
        );
        bracket * bracket + self.constant_term + third
    }
}

/// `|(2a + e^{iθ} b + e^{−iθ} c)/4|²`
fn multi_pair_term(phase: Complex64, a: f64, b: f64, c: f64) -> f64 {
    let z = (Complex64::new(2.0 * a, 0.0) + phase * b + phase.conj() * c) / 4.0;
    z.norm_sqr()
}

/// Full correlation Γ(τ) with principal square roots of Γ₀ at every argument.
pub fn gamma_full(tau: f64, opo: &OpoParams, ifm: &InterferometerParams) -> f64 {
    FullCorrelation::new(opo, ifm).eval(tau)
}

/// Approximate correlation
/// `Γ₀(τ)cos²θ/4 + [Γ₀(τ−T) + Γ₀(τ+T)]/16 + δΓ₀(0)/4`.
pub fn gamma_approx(tau: f64, opo: &OpoParams, ifm: &InterferometerParams) -> f64 {
    let t = ifm.delay_t;
    let c = ifm.theta.cos();
    gamma0_normalized(tau, opo) * c * c / 4.0
        + (gamma0_normalized(tau - t, opo) + gamma0_normalized(tau + t, opo)) / 16.0
        + delta(opo) * gamma0_normalized(0.0, opo) / 4.0
}

/// Which approximation condition a [`ValidityCheck`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `|T − τ_r/2|` exceeds the comb-tooth width, so Case-1 and Case-2 teeth do not overlap.
    TeethSeparated,
    /// `T mod τ_r` lies within τ_r/4 of τ_r/2.
    DelayNearHalfRoundTrip,
    /// δ below [`DELTA_THRESHOLD`].
    FarBelowThreshold,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::TeethSeparated => "teeth_separated",
            Condition::DelayNearHalfRoundTrip => "delay_near_half_round_trip",
            Condition::FarBelowThreshold => "far_below_threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityCheck {
    pub condition: Condition,
    pub passed: bool,
    /// Positive when the condition holds; same units as the compared quantity
    /// (seconds for the delay conditions, dimensionless for δ).
    pub margin: f64,
    /// The raw quantity being compared.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub checks: Vec<ValidityCheck>,
}

impl ValidityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, condition: Condition) -> &ValidityCheck {
        self.checks
            .iter()
            .find(|c| c.condition == condition)
            .expect("every condition is reported")
    }
}

/// Reports the conditions under which [`gamma_approx`] approximates [`gamma_full`].
pub fn check_validity(opo: &OpoParams, ifm: &InterferometerParams) -> ValidityReport {
    let half = opo.tau_r() / 2.0;
    let t = ifm.delay_t;

    let separation = (t - half).abs();
    let separated = separation - peak_width(opo);

    let folded = (t.rem_euclid(opo.tau_r()) - half).abs();
    let near_half = opo.tau_r() / 4.0 - folded;

    let d = delta(opo);
    let below = DELTA_THRESHOLD - d;

    ValidityReport {
        checks: vec![
            ValidityCheck {
                condition: Condition::TeethSeparated,
                passed: separated > 0.0,
                margin: separated,
                value: separation,
            },
            ValidityCheck {
                condition: Condition::DelayNearHalfRoundTrip,
                passed: near_half > 0.0,
                margin: near_half,
                value: folded,
            },
            ValidityCheck {
                condition: Condition::FarBelowThreshold,
                passed: below > 0.0,
                margin: below,
                value: d,
            },
        ],
    }
}
