//! Bare correlation function of the multimode two-photon OPO output.
//!
//! The OPO output far below threshold is a comb of `2N+1` longitudinal modes
//! spaced by the free spectral range `Ω_F = 2π/τ_r`. Its intensity correlation
//! is a squared Dirichlet kernel under an exponential envelope set by the
//! cavity bandwidth:
//!
//! ```text
//! Γ₀(τ) = |ε|² (F/F₀)² e^(−Ω_c|τ|) sin²[(2N+1)Ω_F τ/2] / sin²(Ω_F τ/2)
//! ```
//!
//! The overall factor `A = |ε|²(F/F₀)²` is kept separate so callers that fit
//! an absolute scale anyway can evaluate the normalized form with `A = 1`.

use std::f64::consts::PI;

use crate::error::{non_negative, positive, Error, Result};

/// Below this value of `|sin(Ω_F τ/2)|` the kernel is evaluated through the
/// ratio of derivatives instead of the direct quotient.
const SINGULAR_SIN: f64 = 1e-9;

/// Physical description of the OPO output comb. All times in seconds,
/// angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpoParams {
    epsilon: f64,
    finesse: f64,
    finesse_lossless: f64,
    omega_c: f64,
    tau_r: f64,
    n_side_modes: u32,
}

impl OpoParams {
    pub fn new(
        epsilon: f64,
        finesse: f64,
        finesse_lossless: f64,
        omega_c: f64,
        tau_r: f64,
        n_side_modes: u32,
    ) -> Result<Self> {
        non_negative("epsilon", epsilon)?;
        positive("finesse", finesse)?;
        positive("finesse_lossless", finesse_lossless)?;
        if finesse > finesse_lossless {
            return Err(Error::param(
                "finesse",
                format!("must not exceed finesse_lossless ({finesse} > {finesse_lossless})"),
            ));
        }
        positive("omega_c", omega_c)?;
        positive("tau_r", tau_r)?;
        Ok(Self {
            epsilon,
            finesse,
            finesse_lossless,
            omega_c,
            tau_r,
            n_side_modes,
        })
    }

    /// Parameters with `A = |ε|²(F/F₀)² = 1`.
    pub fn normalized(omega_c: f64, tau_r: f64, n_side_modes: u32) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, omega_c, tau_r, n_side_modes)
    }

    /// Same cavity with a different single-pass gain.
    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(
            epsilon,
            self.finesse,
            self.finesse_lossless,
            self.omega_c,
            self.tau_r,
            self.n_side_modes,
        )
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn finesse(&self) -> f64 {
        self.finesse
    }

    pub fn finesse_lossless(&self) -> f64 {
        self.finesse_lossless
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn tau_r(&self) -> f64 {
        self.tau_r
    }

    pub fn n_side_modes(&self) -> u32 {
        self.n_side_modes
    }

    /// Number of longitudinal modes, `2N+1`.
    pub fn mode_count(&self) -> u32 {
        2 * self.n_side_modes + 1
    }

    /// `Ω_F = 2π/τ_r`; the comb teeth of Γ₀ sit at multiples of τ_r.
    pub fn free_spectral_range(&self) -> f64 {
        2.0 * PI / self.tau_r
    }

    /// Overall scale `A = |ε|²(F/F₀)²`.
    pub fn scale(&self) -> f64 {
        let ratio = self.finesse / self.finesse_lossless;
        self.epsilon * self.epsilon * ratio * ratio
    }
}

/// Squared Dirichlet kernel `sin²(Mx)/sin²(x)` with `x = π τ/τ_r` and `M` modes.
///
/// The argument is reduced to the nearest tooth first so the value is exactly
/// τ_r-periodic up to the rounding of `τ/τ_r`.
pub fn comb_kernel(tau: f64, tau_r: f64, modes: u32) -> f64 {
    let m = f64::from(modes);
    let r = tau / tau_r;
    let frac = r - r.round();
    let x = PI * frac;
    let s = x.sin();
    if s.abs() < SINGULAR_SIN {
        let ratio = m * (m * x).cos() / x.cos();
        ratio * ratio
    } else {
        let ratio = (m * x).sin() / s;
        ratio * ratio
    }
}

/// Γ₀(τ) with `A = 1`: envelope times comb kernel.
pub fn gamma0_normalized(tau: f64, p: &OpoParams) -> f64 {
    (-p.omega_c * tau.abs()).exp() * comb_kernel(tau, p.tau_r, p.mode_count())
}

/// Bare two-photon correlation Γ₀(τ), including the overall scale `A`.
pub fn gamma0(tau: f64, p: &OpoParams) -> f64 {
    p.scale() * gamma0_normalized(tau, p)
}

/// Multi-pair parameter `δ = 4ε²/Ω_c²`.
pub fn delta(p: &OpoParams) -> f64 {
    4.0 * p.epsilon * p.epsilon / (p.omega_c * p.omega_c)
}

/// Nominal comb-tooth width `τ_r/(2N+1)`.
pub fn peak_width(p: &OpoParams) -> f64 {
    p.tau_r / f64::from(p.mode_count())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU_R: f64 = 2.07e-9;

    fn unit(n: u32, omega_c_tau_r: f64) -> OpoParams {
        OpoParams::normalized(omega_c_tau_r / TAU_R, TAU_R, n).unwrap()
    }

    /// |Σ_{k=-N}^{N} e^{ikΩ_F τ}|² summed term by term.
    fn mode_sum(tau: f64, tau_r: f64, n: u32) -> f64 {
        let phase = 2.0 * PI * tau / tau_r;
        let (mut re, mut im) = (0.0_f64, 0.0_f64);
        for k in -(n as i64)..=(n as i64) {
            let a = k as f64 * phase;
            re += a.cos();
            im += a.sin();
        }
        re * re + im * im
    }

    #[test]
    fn central_peak_is_mode_count_squared() {
        let p = unit(3, 0.2);
        assert_eq!(gamma0(0.0, &p), 49.0);
    }

    #[test]
    fn neighbouring_tooth_decays_with_envelope() {
        let p = unit(3, 0.2);
        let expected = 49.0 * (-0.2_f64).exp();
        assert!((gamma0(TAU_R, &p) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn half_period_has_unit_kernel() {
        for n in [0, 1, 3, 10, 103] {
            let p = unit(n, 0.2);
            let expected = (-0.1_f64).exp();
            let got = gamma0(TAU_R / 2.0, &p);
            assert!((got - expected).abs() < 1e-12, "N={n}: {got}");
        }
    }

    #[test]
    fn first_null_region_matches_mode_sum() {
        let n = 3;
        let p = OpoParams::normalized(1e-3, TAU_R, n).unwrap();
        let tau = TAU_R / f64::from(2 * n + 1);
        let got = gamma0(tau, &p);
        let oracle = mode_sum(tau, TAU_R, n) * (-p.omega_c() * tau).exp();
        assert!(
            got < 1e-20 * 49.0,
            "value at comb null should vanish: {got}"
        );
        assert!((got - oracle).abs() < 1e-20);
    }

    #[test]
    fn agrees_with_mode_sum_off_the_grid() {
        let p = unit(5, 0.2);
        for i in 0..200 {
            let tau = -2.3 * TAU_R + i as f64 * 0.0231 * TAU_R;
            let oracle = mode_sum(tau, TAU_R, 5) * (-p.omega_c() * tau.abs()).exp();
            let got = gamma0(tau, &p);
            assert!(
                (got - oracle).abs() <= 1e-10 * oracle.max(1e-6),
                "tau={tau}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn delta_values() {
        let omega_c = 2.0 * PI * 11e6;
        let p = OpoParams::new(omega_c / 2.0, 1.0, 1.0, omega_c, TAU_R, 3).unwrap();
        assert!((delta(&p) - 1.0).abs() < 1e-15);
        assert_eq!(delta(&p.with_epsilon(0.0).unwrap()), 0.0);
        let p = p.with_epsilon(2.0 * PI * 1.1e6).unwrap();
        assert!((delta(&p) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn peak_width_values() {
        let p = unit(3, 0.2);
        assert!((peak_width(&p) - 2.07e-9 / 7.0).abs() < 1e-24);
        assert!((peak_width(&p) * 1e9 - 0.2957).abs() < 1e-4);
        assert_eq!(peak_width(&unit(0, 0.2)), TAU_R);
        assert!((peak_width(&unit(103, 0.2)) - 0.01e-9).abs() < 1e-22);
    }

    #[test]
    fn scale_factor() {
        let p = OpoParams::new(3.0, 1.0, 2.0, 1e7, TAU_R, 2).unwrap();
        assert_eq!(p.scale(), 9.0 * 0.25);
        assert_eq!(gamma0(0.0, &p), 9.0 * 0.25 * 25.0);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let bad = [
            OpoParams::new(-1.0, 1.0, 1.0, 1e7, TAU_R, 1),
            OpoParams::new(1.0, 2.0, 1.0, 1e7, TAU_R, 1),
            OpoParams::new(1.0, 0.0, 1.0, 1e7, TAU_R, 1),
            OpoParams::new(1.0, 1.0, 1.0, 0.0, TAU_R, 1),
            OpoParams::new(1.0, 1.0, 1.0, 1e7, -TAU_R, 1),
            OpoParams::new(f64::NAN, 1.0, 1.0, 1e7, TAU_R, 1),
            OpoParams::new(1.0, 1.0, 1.0, f64::INFINITY, TAU_R, 1),
        ];
        for b in bad {
            assert!(matches!(b, Err(Error::Param { .. })), "{b:?}");
        }
    }

    #[test]
    fn continuous_at_removable_singularities() {
        let p = unit(7, 0.2);
        let h = 1e-9 * TAU_R;
        for m in -3..=3 {
            let at = m as f64 * TAU_R;
            let centre = gamma0(at, &p);
            for side in [at - h, at + h] {
                let v = gamma0(side, &p);
                assert!(
                    (v - centre).abs() <= 1e-6 * centre,
                    "m={m}: {v} vs {centre}"
                );
            }
        }
    }
}
