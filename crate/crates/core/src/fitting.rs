//! Recovery of `(C₁, C₂, θ)` from a coincidence histogram by weighted
//! nonlinear least squares against Γ_c.
//!
//! The model depends on θ only through cos²θ, so `{±θ, π∓θ}` are
//! indistinguishable; results carry a canonical phase in `[0, π/2]` plus all
//! equivalent branches, and [`phase_scan`] picks the branch closest to each
//! set phase.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::detector::{gamma_c0, DetectorParams};
use crate::error::{Error, Result};
use crate::histogram::CoincidenceHistogram;
use crate::opo::OpoParams;

pub const MAX_ITERATIONS: usize = 500;
/// Relative change of the weighted SSR below which the fit has converged.
pub const SSR_TOLERANCE: f64 = 1e-10;
/// Largest residual/Jacobian-column cosine accepted as a stationary point.
pub const GRADIENT_TOLERANCE: f64 = 1e-8;
/// Minimum number of non-empty bins inside the fit range.
pub const MIN_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// `σᵢ² = max(countsᵢ, 1)`.
    #[default]
    Poisson,
    Unweighted,
}

impl Weighting {
    pub fn as_str(self) -> &'static str {
        match self {
            Weighting::Poisson => "poisson",
            Weighting::Unweighted => "unweighted",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "poisson" => Some(Weighting::Poisson),
            "unweighted" => Some(Weighting::Unweighted),
            _ => None,
        }
    }

    fn weight(self, count: f64) -> f64 {
        match self {
            Weighting::Poisson => 1.0 / count.max(1.0),
            Weighting::Unweighted => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialGuess {
    pub c1: f64,
    pub c2: f64,
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub struct FitProblem {
    pub histogram: CoincidenceHistogram,
    pub opo: OpoParams,
    pub det: DetectorParams,
    pub delay_t: f64,
    /// Inclusive range of bin centres used, seconds.
    pub fit_range: (f64, f64),
    /// `None` derives the guess from the data.
    pub initial_guess: Option<InitialGuess>,
    pub weighting: Weighting,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub c1: f64,
    pub c2: f64,
    /// Phase as left by the optimizer (any branch).
    pub theta: f64,
    /// Representative in `[0, π/2]`.
    pub theta_canonical: f64,
    /// Equivalent phases in `[0, 2π)`.
    pub theta_branches: Vec<f64>,
    /// Weighted sum of squared residuals.
    pub residual_sum: f64,
    pub reduced_chi2: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest cosine between the weighted residual and a Jacobian column.
    pub gradient_norm: f64,
    /// 1σ estimates for `(c1, c2, θ)` from the local quadratic model.
    pub uncertainties: [f64; 3],
    pub bins_used: usize,
    pub warnings: Vec<String>,
}

/// Data and fixed comb responses over the bins in the fit range.
struct Prepared {
    centers: Vec<f64>,
    counts: Vec<f64>,
    weights: Vec<f64>,
    /// Γ_c⁽⁰⁾ at τ, τ−T and τ+T.
    central: Vec<f64>,
    side: Vec<f64>,
}

impl Prepared {
    fn new(problem: &FitProblem) -> Result<Self> {
        let (lo, hi) = problem.fit_range;
        let h = &problem.histogram;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Fit(format!(
                "fit range must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        if h.is_empty() {
            return Err(Error::Fit("histogram has no bins".into()));
        }
        let slack = 1e-9 * (h.hi() - h.lo());
        if lo < h.lo() - slack || hi > h.hi() + slack {
            return Err(Error::Fit(format!(
                "fit range [{:.4} ns, {:.4} ns] is not inside the histogram support [{:.4} ns, {:.4} ns]",
                lo * 1e9,
                hi * 1e9,
                h.lo() * 1e9,
                h.hi() * 1e9
            )));
        }
        let t = problem.delay_t;
        let mut p = Prepared {
            centers: Vec::new(),
            counts: Vec::new(),
            weights: Vec::new(),
            central: Vec::new(),
            side: Vec::new(),
        };
        for (c, &y) in h.centers().into_iter().zip(&h.counts) {
            if c < lo || c > hi {
                continue;
            }
            p.centers.push(c);
            p.counts.push(y);
            p.weights.push(problem.weighting.weight(y));
            p.central.push(gamma_c0(c, &problem.opo, &problem.det));
            p.side.push(
                gamma_c0(c - t, &problem.opo, &problem.det)
                    + gamma_c0(c + t, &problem.opo, &problem.det),
            );
        }
        let nonzero = p.counts.iter().filter(|&&y| y > 0.0).count();
        if nonzero < MIN_BINS {
            return Err(Error::Fit(format!(
                "need at least {MIN_BINS} non-empty bins in the fit range, found {nonzero}"
            )));
        }
        Ok(p)
    }

    fn len(&self) -> usize {
        self.counts.len()
    }

    fn shape(&self, i: usize, cos2: f64) -> f64 {
        4.0 * cos2 * self.central[i] + self.side[i]
    }

    fn model(&self, i: usize, p: &Vector3<f64>) -> f64 {
        let c = p[2].cos();
        p[0] * self.shape(i, c * c) + p[1]
    }

    fn ssr(&self, p: &Vector3<f64>) -> f64 {
        (0..self.len())
            .map(|i| {
                let r = self.counts[i] - self.model(i, p);
                self.weights[i] * r * r
            })
            .sum()
    }

    /// Normal matrix `JᵀWJ`, gradient `JᵀWr` and SSR.
    fn normal_equations(&self, p: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>, f64) {
        let c = p[2].cos();
        let cos2 = c * c;
        let dtheta = -4.0 * (2.0 * p[2]).sin();
        let mut a = Matrix3::zeros();
        let mut g = Vector3::zeros();
        let mut ssr = 0.0;
        for i in 0..self.len() {
            let j = Vector3::new(self.shape(i, cos2), 1.0, p[0] * dtheta * self.central[i]);
            let r = self.counts[i] - (p[0] * self.shape(i, cos2) + p[1]);
            let w = self.weights[i];
            a += w * j * j.transpose();
            g += w * r * j;
            ssr += w * r * r;
        }
        (a, g, ssr)
    }

    fn initial_guess(&self) -> InitialGuess {
        let c2 = self
            .counts
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        let theta = FRAC_PI_4;
        let cos2 = theta.cos().powi(2);
        let peak_excess = self.counts.iter().map(|y| y - c2).fold(0.0, f64::max);
        let peak_shape = (0..self.len())
            .map(|i| self.shape(i, cos2))
            .fold(0.0, f64::max);
        let c1 = if peak_shape > 0.0 {
            peak_excess / peak_shape
        } else {
            0.0
        };
        InitialGuess { c1, c2, theta }
    }
}

fn project(p: &mut Vector3<f64>) {
    p[0] = p[0].max(0.0);
    p[1] = p[1].max(0.0);
}

fn gradient_cosine(a: &Matrix3<f64>, g: &Vector3<f64>, ssr: f64) -> f64 {
    (0..3)
        .map(|j| {
            let denom = (a[(j, j)] * ssr).sqrt();
            if denom > 0.0 {
                g[j].abs() / denom
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// Canonical representative of θ in `[0, π/2]` under `θ → −θ, π − θ`.
pub fn canonical_theta(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t > FRAC_PI_2 {
        PI - t
    } else {
        t
    }
}

/// The distinct phases in `[0, 2π)` equivalent to θ.
pub fn theta_branches(theta: f64) -> Vec<f64> {
    let c = canonical_theta(theta);
    let mut out: Vec<f64> = Vec::with_capacity(4);
    for b in [c, PI - c, PI + c, TAU - c] {
        let b = if b >= TAU { b - TAU } else { b };
        if !out.iter().any(|x| (x - b).abs() < 1e-12) {
            out.push(b);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Equivalent phase closest to `reference` (not restricted to `[0, 2π)`).
pub fn nearest_branch(theta: f64, reference: f64) -> f64 {
    let c = canonical_theta(theta);
    let k0 = (reference / PI).floor();
    let mut best = c;
    for k in [k0 - 1.0, k0, k0 + 1.0] {
        for cand in [c + k * PI, -c + k * PI] {
            if (cand - reference).abs() < (best - reference).abs() {
                best = cand;
            }
        }
    }
    best
}

/// Weighted SSR of the model `(c1, c2, θ)` over the fit range.
pub fn objective(problem: &FitProblem, c1: f64, c2: f64, theta: f64) -> Result<f64> {
    Ok(Prepared::new(problem)?.ssr(&Vector3::new(c1, c2, theta)))
}

/// Damped least-squares fit of Γ_c. Non-convergence is reported through
/// `converged = false`, not as an error.
pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    let data = Prepared::new(problem)?;
    let guess = problem
        .initial_guess
        .unwrap_or_else(|| data.initial_guess());
    if !(guess.c1 >= 0.0 && guess.c2 >= 0.0 && guess.theta.is_finite()) {
        return Err(Error::Fit(format!(
            "initial guess must have c1, c2 >= 0 and finite theta, got {guess:?}"
        )));
    }
    let mut p = Vector3::new(guess.c1, guess.c2, guess.theta);
    let (mut a, mut g, mut ssr) = data.normal_equations(&p);
    let signal: f64 = (0..data.len())
        .map(|i| data.weights[i] * data.counts[i].powi(2))
        .sum();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        if ssr <= 1e-28 * signal || gradient_cosine(&a, &g, ssr) < GRADIENT_TOLERANCE {
            converged = true;
            break;
        }
        iterations += 1;
        let floor = 1e-30 * a.diagonal().max().max(f64::MIN_POSITIVE);
        let mut damped = a;
        for j in 0..3 {
            damped[(j, j)] += lambda * a[(j, j)].max(floor);
        }
        let Some(step) = damped.cholesky().map(|c| c.solve(&g)) else {
            lambda *= 10.0;
            continue;
        };
        let mut trial = p + step;
        project(&mut trial);
        let trial_ssr = data.ssr(&trial);
        let change = (ssr - trial_ssr).abs() / ssr.max(f64::MIN_POSITIVE);
        if trial_ssr < ssr {
            p = trial;
            (a, g, ssr) = data.normal_equations(&p);
            lambda = (lambda * 0.3).max(1e-15);
            if change < SSR_TOLERANCE {
                converged = true;
                break;
            }
        } else {
            if change < SSR_TOLERANCE {
                converged = true;
                break;
            }
            lambda *= 4.0;
            if lambda > 1e30 {
                break;
            }
        }
    }

    let n = data.len();
    let dof = n.saturating_sub(3).max(1) as f64;
    let reduced_chi2 = ssr / dof;
    let cov_scale = match problem.weighting {
        Weighting::Poisson => 1.0,
        Weighting::Unweighted => reduced_chi2,
    };
    let uncertainties = match a.try_inverse() {
        Some(inv) => [0, 1, 2].map(|j| {
            let v = inv[(j, j)] * cov_scale;
            if v >= 0.0 {
                v.sqrt()
            } else {
                f64::INFINITY
            }
        }),
        None => {
            // only the unidentifiable parameters lose their error bars
            let mut u = [f64::INFINITY; 3];
            let sub = Matrix3::new(
                a[(0, 0)],
                a[(0, 1)],
                0.0,
                a[(1, 0)],
                a[(1, 1)],
                0.0,
                0.0,
                0.0,
                1.0,
            );
            if let Some(inv) = sub.try_inverse() {
                u[0] = (inv[(0, 0)] * cov_scale).sqrt();
                u[1] = (inv[(1, 1)] * cov_scale).sqrt();
            }
            u
        }
    };

    let mut warnings = Vec::new();
    let max_count = data.counts.iter().cloned().fold(0.0, f64::max);
    let spread = max_count - data.counts.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread <= 1e-12 * max_count.max(1.0)
        || p[0] * data.central.iter().cloned().fold(0.0, f64::max) < 1e-9 * max_count.max(1.0)
    {
        warnings.push(
            "data are consistent with a flat model: c1 ≈ 0 and theta is undetermined".to_string(),
        );
    }
    if !converged {
        warnings.push(format!("no convergence within {MAX_ITERATIONS} iterations"));
    }

    Ok(FitResult {
        c1: p[0],
        c2: p[1],
        theta: p[2],
        theta_canonical: canonical_theta(p[2]),
        theta_branches: theta_branches(p[2]),
        residual_sum: ssr,
        reduced_chi2,
        iterations,
        converged,
        gradient_norm: gradient_cosine(&a, &g, ssr),
        uncertainties,
        bins_used: n,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub centers: Vec<f64>,
    pub counts: Vec<f64>,
    pub model: Vec<f64>,
    /// `counts − model`.
    pub residuals: Vec<f64>,
    /// Residuals scaled by `√wᵢ`.
    pub pulls: Vec<f64>,
    pub residual_sum: f64,
    /// `SSR/(n_bins − 3)`.
    pub reduced_chi2: f64,
    /// Index into the vectors above of the largest `|residual|`.
    pub worst_bin: usize,
}

pub fn residual_report(problem: &FitProblem, result: &FitResult) -> Result<ResidualReport> {
    let data = Prepared::new(problem)?;
    let p = Vector3::new(result.c1, result.c2, result.theta);
    let model: Vec<f64> = (0..data.len()).map(|i| data.model(i, &p)).collect();
    let residuals: Vec<f64> = data.counts.iter().zip(&model).map(|(y, m)| y - m).collect();
    let pulls: Vec<f64> = residuals
        .iter()
        .zip(&data.weights)
        .map(|(r, w)| r * w.sqrt())
        .collect();
    let residual_sum: f64 = pulls.iter().map(|z| z * z).sum();
    let worst_bin = residuals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let dof = data.len().saturating_sub(3).max(1) as f64;
    Ok(ResidualReport {
        centers: data.centers,
        counts: data.counts,
        model,
        residuals,
        pulls,
        residual_sum,
        reduced_chi2: residual_sum / dof,
        worst_bin,
    })
}

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub theta_set: f64,
    /// Fitted phase on the branch nearest `theta_set`.
    pub theta_fit: f64,
    pub sigma_theta: f64,
    pub outcome: std::result::Result<FitResult, String>,
}

#[derive(Debug, Clone)]
pub struct PhaseScan {
    pub rows: Vec<ScanRow>,
    /// Least-squares slope of `theta_fit` against `theta_set` over the successful rows.
    pub slope: f64,
    pub intercept: f64,
}

/// Fits every `(θ_set, histogram)` pair with the fixed parameters of `base`.
/// Failed fits are kept as rows with `NaN` phase and excluded from the slope.
pub fn phase_scan(base: &FitProblem, data: Vec<(f64, CoincidenceHistogram)>) -> PhaseScan {
    let rows: Vec<ScanRow> = data
        .into_par_iter()
        .map(|(theta_set, histogram)| {
            let problem = FitProblem {
                histogram,
                ..base.clone()
            };
            match fit(&problem) {
                Ok(r) => ScanRow {
                    theta_set,
                    theta_fit: nearest_branch(r.theta, theta_set),
                    sigma_theta: r.uncertainties[2],
                    outcome: Ok(r),
                },
                Err(e) => ScanRow {
                    theta_set,
                    theta_fit: f64::NAN,
                    sigma_theta: f64::NAN,
                    outcome: Err(e.to_string()),
                },
            }
        })
        .collect();

    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.outcome.is_ok())
        .map(|r| (r.theta_set, r.theta_fit))
        .collect();
    let (slope, intercept) = linear_fit(&pts);
    PhaseScan {
        rows,
        slope,
        intercept,
    }
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{gamma_c, CoincidenceModelParams};

    const NS: f64 = 1e-9;

    fn problem_for(theta: f64, c1: f64, c2: f64) -> FitProblem {
        let opo = OpoParams::normalized(2.0 * PI * 11e6, 2.07 * NS, 103).unwrap();
        let window = (18.0 * NS, 77.0 * NS);
        let det =
            DetectorParams::for_window(0.28 * NS, 47.5 * NS, window, &opo, 0.97 * NS).unwrap();
        let mut h = CoincidenceHistogram::uniform(window.0, window.1, 0.1 * NS).unwrap();
        let m = CoincidenceModelParams::new(c1, c2, theta, 0.97 * NS).unwrap();
        h.counts = h
            .centers()
            .iter()
            .map(|&c| gamma_c(c, &opo, &det, &m))
            .collect();
        FitProblem {
            histogram: h,
            opo,
            det,
            delay_t: 0.97 * NS,
            fit_range: window,
            initial_guess: None,
            weighting: Weighting::Poisson,
        }
    }

    #[test]
    fn canonical_and_branches() {
        assert!((canonical_theta(-0.3) - 0.3).abs() < 1e-15);
        assert!((canonical_theta(PI - 0.3) - 0.3).abs() < 1e-15);
        assert!((canonical_theta(PI + 0.3) - 0.3).abs() < 1e-14);
        assert_eq!(theta_branches(0.0), vec![0.0, PI]);
        assert_eq!(theta_branches(0.3).len(), 4);
        assert!((nearest_branch(0.3, 0.9 * PI) - (PI - 0.3)).abs() < 1e-15);
        assert!((nearest_branch(-0.3, 7.0 * PI / 8.0) - (PI - 0.3)).abs() < 1e-15);
        assert!((nearest_branch(0.3, 0.2) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn noiseless_round_trip() {
        let truth = (350.0, 120.0, PI / 4.0);
        let p = problem_for(truth.2, truth.0, truth.1);
        let r = fit(&p).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.c1 - truth.0).abs() < 1e-6 * truth.0, "{r:?}");
        assert!((r.c2 - truth.1).abs() < 1e-6 * truth.1);
        assert!((r.theta_canonical - truth.2).abs() < 1e-6 * truth.2);
        let rep = residual_report(&p, &r).unwrap();
        assert!(rep.residuals.iter().all(|x| x.abs() < 1e-6 * truth.0));
    }

    #[test]
    fn flat_data_give_flat_model() {
        let mut p = problem_for(0.0, 1.0, 0.0);
        p.histogram.counts.iter_mut().for_each(|c| *c = 42.0);
        let r = fit(&p).unwrap();
        assert!(r.c1 < 1e-6, "{r:?}");
        assert!((r.c2 - 42.0).abs() < 1e-6);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn branch_symmetry_of_objective() {
        let p = problem_for(0.4, 300.0, 80.0);
        let base = objective(&p, 280.0, 90.0, 0.5).unwrap();
        for th in [-0.5, PI - 0.5, PI + 0.5] {
            let v = objective(&p, 280.0, 90.0, th).unwrap();
            assert!((v - base).abs() <= 1e-12 * base, "{th}: {v} vs {base}");
        }
    }

    #[test]
    fn spike_bin_dominates_residuals() {
        let mut p = problem_for(0.6, 300.0, 80.0);
        p.histogram.counts[123] += 5000.0;
        let r = fit(&p).unwrap();
        let rep = residual_report(&p, &r).unwrap();
        assert_eq!(rep.worst_bin, 123);
        let spike = rep.pulls[123].powi(2);
        assert!(spike > 0.5 * rep.residual_sum);
    }

    #[test]
    fn rejects_bad_problems() {
        let mut p = problem_for(0.6, 300.0, 80.0);
        p.fit_range = (10.0 * NS, 77.0 * NS);
        assert!(matches!(fit(&p), Err(Error::Fit(_))));
        let mut p = problem_for(0.6, 300.0, 80.0);
        p.histogram.counts.iter_mut().skip(5).for_each(|c| *c = 0.0);
        assert!(matches!(fit(&p), Err(Error::Fit(_))));
        let mut p = problem_for(0.6, 300.0, 80.0);
        p.initial_guess = Some(InitialGuess {
            c1: -1.0,
            c2: 0.0,
            theta: 0.0,
        });
        assert!(matches!(fit(&p), Err(Error::Fit(_))));
    }

    #[test]
    fn iteration_budget_exhaustion_is_reported() {
        // a very poor start needs more than one iteration
        let mut p = problem_for(1.2, 300.0, 80.0);
        p.initial_guess = Some(InitialGuess {
            c1: 1e-6,
            c2: 1e6,
            theta: 0.01,
        });
        let r = fit(&p).unwrap();
        assert!(r.iterations > 1);
        assert!(r.iterations <= MAX_ITERATIONS);
        if !r.converged {
            assert!(r.warnings.iter().any(|w| w.contains("convergence")));
        }
    }

    #[test]
    fn unweighted_scale_equivariance() {
        let mut p = problem_for(0.7, 300.0, 80.0);
        p.weighting = Weighting::Unweighted;
        // mild deterministic perturbation so the minimum is not exact
        for (i, c) in p.histogram.counts.iter_mut().enumerate() {
            *c += 3.0 * ((i as f64) * 1.7).sin();
        }
        let r1 = fit(&p).unwrap();
        let k = 7.5;
        let mut q = p.clone();
        q.histogram.counts.iter_mut().for_each(|c| *c *= k);
        let r2 = fit(&q).unwrap();
        assert!((r2.c1 - k * r1.c1).abs() < 1e-6 * r2.c1);
        assert!((r2.c2 - k * r1.c2).abs() < 1e-6 * r2.c2);
        assert!((r2.theta_canonical - r1.theta_canonical).abs() < 1e-9);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = problem_for(0.4, 300.0, 80.0);
        let data = Prepared::new(&p).unwrap();
        let at = Vector3::new(280.0, 90.0, 0.55);
        let (_, g, _) = data.normal_equations(&at);
        for (j, h) in [(0, 1e-3), (1, 1e-3), (2, 1e-6)] {
            let mut up = at;
            let mut down = at;
            up[j] += h;
            down[j] -= h;
            let numeric = -(data.ssr(&up) - data.ssr(&down)) / (4.0 * h);
            assert!(
                (numeric - g[j]).abs() < 1e-5 * g[j].abs().max(1.0),
                "{j}: {numeric} vs {}",
                g[j]
            );
        }
    }

    #[test]
    fn linear_fit_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..9).map(|j| (j as f64, 2.0 * j as f64 + 1.0)).collect();
        let (s, i) = linear_fit(&pts);
        assert!((s - 2.0).abs() < 1e-12 && (i - 1.0).abs() < 1e-12);
        assert!(linear_fit(&pts[..1]).0.is_nan());
    }
}
