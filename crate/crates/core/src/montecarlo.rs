//! Synthetic coincidence histograms by event sampling.
//!
//! Quantum interference cannot be reproduced by classical photon paths, so
//! events are drawn from the analytic delay density instead. Two samplers
//! are provided:
//!
//! * [`SamplingMode::DetectorModel`] (default) draws delays whose density is
//!   exactly the measurable model Γ_c on the window: a comb tooth is picked
//!   by its Γ_c coefficient, the two photon timestamps receive independent
//!   Laplace jitter, and the event is kept with the bandwidth envelope
//!   evaluated at the measured delay. Bin expectations are then given by
//!   [`expected_counts`].
//! * [`SamplingMode::IdealComb`] draws the ideal delay from the finite-mode
//!   Γ₀ comb (tooth by weight, inverse CDF within the tooth) and then applies
//!   the jitter. Its expectation is the Γ₀ comb convolved with the detector
//!   kernel, which approaches Γ_c only for many modes and a slow envelope.
//!
//! Events are generated in fixed-size chunks, each with its own ChaCha8
//! stream derived from `(seed, chunk index)`, so the histogram does not
//! depend on the number of worker threads.

use std::f64::consts::{LN_2, PI};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::detector::{coincidence_shape, CoincidenceModelParams, DetectorParams};
use crate::error::{Error, Result};
use crate::histogram::{uniform_bin_count, CoincidenceHistogram};
use crate::interferometer::InterferometerParams;
use crate::opo::OpoParams;

/// Events per RNG stream.
pub const CHUNK_EVENTS: u64 = 1 << 16;

/// Consecutive rejected proposals after which a density is declared degenerate.
const MAX_ATTEMPTS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    #[default]
    DetectorModel,
    IdealComb,
}

impl SamplingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplingMode::DetectorModel => "detector",
            SamplingMode::IdealComb => "ideal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "detector" => Some(SamplingMode::DetectorModel),
            "ideal" => Some(SamplingMode::IdealComb),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub opo: OpoParams,
    pub ifm: InterferometerParams,
    pub det: DetectorParams,
    pub n_events: u64,
    /// Fraction of events drawn uniformly over the window.
    pub background_fraction: f64,
    /// Histogram support `[lo, hi)` in seconds.
    pub window: (f64, f64),
    pub bin_width: f64,
    pub seed: u64,
    pub sampling: SamplingMode,
}

impl SimConfig {
    pub fn validate(&self) -> Result<usize> {
        let bf = self.background_fraction;
        if !(0.0..=1.0).contains(&bf) {
            return Err(Error::param(
                "background_fraction",
                format!("must lie in [0, 1], got {bf}"),
            ));
        }
        uniform_bin_count(self.window.0, self.window.1, self.bin_width)
    }

    /// Γ_c parameters whose bin-centre values approximate the expected counts
    /// of a [`SamplingMode::DetectorModel`] run.
    pub fn equivalent_model(&self) -> Result<CoincidenceModelParams> {
        self.validate()?;
        let (lo, hi) = self.window;
        let n = self.n_events as f64;
        let bf = self.background_fraction;
        let mass = integrate_shape(self, lo, hi);
        let c1 = if bf < 1.0 {
            if !mass.is_finite() || mass <= 0.0 {
                return Err(degenerate(self));
            }
            n * (1.0 - bf) * self.bin_width / mass
        } else {
            0.0
        };
        let c2 = n * bf * self.bin_width / (hi - lo);
        CoincidenceModelParams::new(c1, c2, self.ifm.theta(), self.ifm.delay_t())
    }
}

fn degenerate(cfg: &SimConfig) -> Error {
    Error::Sampling(format!(
        "delay density vanishes on the window [{:.4} ns, {:.4} ns]; move the window towards the \
         electric delay ({:.4} ns) or raise background_fraction",
        cfg.window.0 * 1e9,
        cfg.window.1 * 1e9,
        cfg.det.electric_delay() * 1e9
    ))
}

/// Laplace scale `b = T_R/(2 ln2)` of the per-detector timing jitter.
pub fn jitter_scale(det: &DetectorParams) -> f64 {
    det.resolving_time() / (2.0 * LN_2)
}

fn laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    if rng.random::<bool>() {
        scale * e
    } else {
        -scale * e
    }
}

/// Jitters both photon timestamps of a pair with delay `t` and returns the
/// measured delay. The perturbation density is `(1/4b)(1 + |t|/b)e^(−|t|/b)`,
/// the normalized response kernel.
pub fn apply_jitter<R: Rng + ?Sized>(rng: &mut R, t: f64, det: &DetectorParams) -> f64 {
    let b = jitter_scale(det);
    let start = laplace(rng, b);
    let stop = laplace(rng, b);
    t + (stop - start)
}

#[derive(Debug, Clone, Copy)]
struct Tooth {
    centre: f64,
    /// Centre of the bandwidth envelope for this tooth's component.
    envelope_centre: f64,
    /// Upper bound of the envelope over the tooth, for rejection.
    envelope_max: f64,
}

/// The three comb components: Case 1 at `0` and Case 2 at `±T`, with relative weights.
fn components(ifm: &InterferometerParams) -> [(f64, f64); 3] {
    let c = ifm.theta().cos();
    let t = ifm.delay_t();
    [(0.0, 4.0 * c * c), (t, 1.0), (-t, 1.0)]
}

/// Sampler for the measurable model Γ_c restricted to the window.
#[derive(Debug, Clone)]
pub struct DetectorModelSampler {
    teeth: Vec<Tooth>,
    choose: Option<WeightedIndex<f64>>,
    omega_c: f64,
    window: (f64, f64),
    det: DetectorParams,
}

impl DetectorModelSampler {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let d = &cfg.det;
        let tau_r = cfg.opo.tau_r();
        let reach = d.kernel_reach();
        let (lo, hi) = cfg.window;
        let n_max = i64::from(d.n_max());
        let mut teeth = Vec::new();
        let mut weights = Vec::new();
        for (shift, weight) in components(&cfg.ifm) {
            if weight == 0.0 {
                continue;
            }
            let base = d.electric_delay() + shift;
            let first = (((lo - reach - base) / tau_r).ceil() as i64).max(-n_max);
            let last = (((hi + reach - base) / tau_r).floor() as i64).min(n_max);
            for n in first..=last {
                teeth.push(Tooth {
                    centre: base + n as f64 * tau_r,
                    envelope_centre: base,
                    envelope_max: 1.0,
                });
                weights.push(weight);
            }
        }
        let choose = if teeth.is_empty() {
            None
        } else {
            Some(WeightedIndex::new(&weights).map_err(|e| Error::Sampling(e.to_string()))?)
        };
        Ok(Self {
            teeth,
            choose,
            omega_c: cfg.opo.omega_c(),
            window: cfg.window,
            det: *d,
        })
    }

    /// Draws one coincidence delay inside the window.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        let choose = self.choose.as_ref()?;
        let (lo, hi) = self.window;
        for _ in 0..MAX_ATTEMPTS {
            let tooth = self.teeth[choose.sample(rng)];
            let tau = apply_jitter(rng, tooth.centre, &self.det);
            if !(tau >= lo && tau < hi) {
                continue;
            }
            let keep = (-self.omega_c * (tau - tooth.envelope_centre).abs()).exp();
            if rng.random::<f64>() < keep {
                return Some(tau);
            }
        }
        None
    }
}

/// Tabulated inverse CDF of one period of the squared Dirichlet kernel.
#[derive(Debug, Clone)]
struct DirichletTooth {
    /// Offsets from the tooth centre, `[−τ_r/2, τ_r/2]`.
    offsets: Vec<f64>,
    cdf: Vec<f64>,
}

impl DirichletTooth {
    fn new(tau_r: f64, modes: u32) -> Self {
        let m = modes as usize;
        let points = 32 * m + 1024;
        let mf = m as f64;
        let mut offsets = Vec::with_capacity(points + 1);
        let mut cdf = Vec::with_capacity(points + 1);
        let mut running = 0.0_f64;
        for i in 0..=points {
            let x = -PI / 2.0 + PI * i as f64 / points as f64;
            // ∫_{−π/2}^{x} sin²(Mx)/sin²(x) = M(x + π/2) + Σ_{j<M} (M−j) sin(2jx)/j
            let (s1, c1) = (2.0 * x).sin_cos();
            let (mut s_prev, mut s_cur) = (0.0_f64, s1);
            let mut acc = mf * (x + PI / 2.0);
            for j in 1..m {
                acc += (mf - j as f64) * s_cur / j as f64;
                let s_next = 2.0 * c1 * s_cur - s_prev;
                s_prev = s_cur;
                s_cur = s_next;
            }
            let v = (acc / (mf * PI)).clamp(0.0, 1.0);
            running = running.max(v);
            offsets.push(x / PI * tau_r);
            cdf.push(running);
        }
        let last = cdf.len() - 1;
        cdf[0] = 0.0;
        cdf[last] = 1.0;
        Self { offsets, cdf }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = self
            .cdf
            .partition_point(|&c| c <= u)
            .clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (x0, x1) = (self.offsets[i - 1], self.offsets[i]);
        if c1 > c0 {
            x0 + (u - c0) / (c1 - c0) * (x1 - x0)
        } else {
            x0
        }
    }
}

/// Sampler for the ideal (pre-detector) delay density
/// `Γ₀(τ)cos²θ/4 + [Γ₀(τ−T) + Γ₀(τ+T)]/16`, shifted by τ₀, on a support interval.
#[derive(Debug, Clone)]
pub struct IdealDelaySampler {
    teeth: Vec<Tooth>,
    choose: Option<WeightedIndex<f64>>,
    shape: DirichletTooth,
    omega_c: f64,
    support: (f64, f64),
    background_fraction: f64,
}

impl IdealDelaySampler {
    pub fn new(cfg: &SimConfig, support: (f64, f64)) -> Result<Self> {
        let tau_r = cfg.opo.tau_r();
        let half = tau_r / 2.0;
        let (lo, hi) = support;
        let c = cfg.ifm.theta().cos();
        let t = cfg.ifm.delay_t();
        let parts = [(0.0, c * c / 4.0), (t, 1.0 / 16.0), (-t, 1.0 / 16.0)];
        let mut teeth = Vec::new();
        let mut weights = Vec::new();
        for (shift, weight) in parts {
            if weight == 0.0 {
                continue;
            }
            let base = cfg.det.electric_delay() + shift;
            let first = ((lo - half - base) / tau_r).ceil() as i64;
            let last = ((hi + half - base) / tau_r).floor() as i64;
            for n in first..=last {
                let gap = ((n as f64).abs() * tau_r - half).max(0.0);
                let envelope_max = (-cfg.opo.omega_c() * gap).exp();
                if envelope_max > 0.0 {
                    teeth.push(Tooth {
                        centre: base + n as f64 * tau_r,
                        envelope_centre: base,
                        envelope_max,
                    });
                    weights.push(weight * envelope_max);
                }
            }
        }
        let choose = if teeth.is_empty() {
            None
        } else {
            Some(WeightedIndex::new(&weights).map_err(|e| Error::Sampling(e.to_string()))?)
        };
        Ok(Self {
            teeth,
            choose,
            shape: DirichletTooth::new(tau_r, cfg.opo.mode_count()),
            omega_c: cfg.opo.omega_c(),
            support,
            background_fraction: cfg.background_fraction,
        })
    }

    /// Draws from the comb density only (no background branch).
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        let choose = self.choose.as_ref()?;
        let (lo, hi) = self.support;
        for _ in 0..MAX_ATTEMPTS {
            let tooth = self.teeth[choose.sample(rng)];
            let tau = tooth.centre + self.shape.sample(rng);
            if !(tau >= lo && tau < hi) {
                continue;
            }
            let envelope = (-self.omega_c * (tau - tooth.envelope_centre).abs()).exp();
            if rng.random::<f64>() * tooth.envelope_max < envelope {
                return Some(tau);
            }
        }
        None
    }

    /// Background-mixed draw: uniform over the support with probability
    /// `background_fraction`, otherwise from the comb density.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        if self.background_fraction > 0.0 && rng.random::<f64>() < self.background_fraction {
            let (lo, hi) = self.support;
            return Some(lo + (hi - lo) * rng.random::<f64>());
        }
        self.sample_pair(rng)
    }
}

/// One draw of the ideal delay over `cfg.window`. Builds the sampler on
/// every call; use [`IdealDelaySampler`] directly for repeated draws.
pub fn sample_ideal_delay<R: Rng + ?Sized>(rng: &mut R, cfg: &SimConfig) -> Result<f64> {
    cfg.validate()?;
    let sampler = IdealDelaySampler::new(cfg, cfg.window)?;
    sampler.sample(rng).ok_or_else(|| degenerate(cfg))
}

/// Generates a histogram using the global rayon pool.
pub fn run_simulation(cfg: &SimConfig) -> Result<CoincidenceHistogram> {
    simulate_chunks(cfg)
}

/// Generates a histogram on a dedicated pool of `workers` threads. The
/// result is identical for every worker count.
pub fn run_simulation_with_workers(
    cfg: &SimConfig,
    workers: usize,
) -> Result<CoincidenceHistogram> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Sampling(format!("cannot start worker pool: {e}")))?;
    pool.install(|| simulate_chunks(cfg))
}

enum Sampler {
    Detector(DetectorModelSampler),
    Ideal(IdealDelaySampler),
}

impl Sampler {
    fn pair<R: Rng + ?Sized>(&self, rng: &mut R, cfg: &SimConfig) -> Option<f64> {
        match self {
            Sampler::Detector(s) => s.sample(rng),
            Sampler::Ideal(s) => {
                let (lo, hi) = cfg.window;
                for _ in 0..MAX_ATTEMPTS {
                    let ideal = s.sample_pair(rng)?;
                    let tau = apply_jitter(rng, ideal, &cfg.det);
                    if tau >= lo && tau < hi {
                        return Some(tau);
                    }
                }
                None
            }
        }
    }
}

fn simulate_chunks(cfg: &SimConfig) -> Result<CoincidenceHistogram> {
    cfg.validate()?;
    let (lo, hi) = cfg.window;
    let mut hist = CoincidenceHistogram::uniform(lo, hi, cfg.bin_width)?;
    hist.set_meta("source", "simulation");
    hist.set_meta("sampling", cfg.sampling.as_str());
    hist.set_meta("n_events", cfg.n_events.to_string());
    hist.set_meta("seed", cfg.seed.to_string());
    if cfg.n_events == 0 {
        return Ok(hist);
    }

    let need_pairs = cfg.background_fraction < 1.0;
    let sampler = match cfg.sampling {
        SamplingMode::DetectorModel => Sampler::Detector(DetectorModelSampler::new(cfg)?),
        SamplingMode::IdealComb => {
            let pad = cfg.det.kernel_reach();
            Sampler::Ideal(IdealDelaySampler::new(cfg, (lo - pad, hi + pad))?)
        }
    };
    if need_pairs {
        let mass = match cfg.sampling {
            SamplingMode::DetectorModel => integrate_shape(cfg, lo, hi),
            SamplingMode::IdealComb => 1.0,
        };
        let empty = match &sampler {
            Sampler::Detector(s) => s.choose.is_none(),
            Sampler::Ideal(s) => s.choose.is_none(),
        };
        if empty || !mass.is_finite() || mass <= 0.0 {
            return Err(degenerate(cfg));
        }
    }

    let chunks = cfg.n_events.div_ceil(CHUNK_EVENTS);
    let n_bins = hist.len();
    let counts = (0..chunks)
        .into_par_iter()
        .try_fold(
            || vec![0_u64; n_bins],
            |mut acc, chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(chunk);
                let start = chunk * CHUNK_EVENTS;
                let events = CHUNK_EVENTS.min(cfg.n_events - start);
                for _ in 0..events {
                    let tau = if cfg.background_fraction > 0.0
                        && rng.random::<f64>() < cfg.background_fraction
                    {
                        lo + (hi - lo) * rng.random::<f64>()
                    } else {
                        sampler.pair(&mut rng, cfg).ok_or_else(|| degenerate(cfg))?
                    };
                    // lo + (hi−lo)·u can round up to hi
                    let bin = hist.bin_index(tau).unwrap_or(n_bins - 1);
                    acc[bin] += 1;
                }
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(
            || vec![0_u64; n_bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    hist.counts = counts.into_iter().map(|c| c as f64).collect();
    Ok(hist)
}

/// 5-point Gauss–Legendre nodes and weights on `[−1, 1]`.
const GAUSS_5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Sub-intervals per integration cell; the kernel varies on the T_R scale.
fn panels(cfg: &SimConfig, width: f64) -> usize {
    let scale = cfg.det.resolving_time().min(cfg.opo.tau_r());
    ((4.0 * width / scale).ceil() as usize).clamp(4, 4096)
}

fn integrate_shape(cfg: &SimConfig, a: f64, b: f64) -> f64 {
    let theta = cfg.ifm.theta();
    let t = cfg.ifm.delay_t();
    let k = panels(cfg, b - a);
    let h = (b - a) / k as f64;
    let mut sum = 0.0;
    for p in 0..k {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GAUSS_5 {
            sum += w * coincidence_shape(mid + 0.5 * h * x, &cfg.opo, &cfg.det, theta, t);
        }
    }
    sum * 0.5 * h
}

/// Expected bin contents of a [`SamplingMode::DetectorModel`] run:
/// `N[(1−β) ∫_bin Γ_c / ∫_window Γ_c + β Δ/W]`.
pub fn expected_counts(cfg: &SimConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let (lo, hi) = cfg.window;
    let hist = CoincidenceHistogram::uniform(lo, hi, cfg.bin_width)?;
    let n = cfg.n_events as f64;
    let bf = cfg.background_fraction;
    let per_bin: Vec<f64> = if bf < 1.0 {
        (0..hist.len())
            .map(|i| integrate_shape(cfg, hist.bin_edges[i], hist.bin_edges[i + 1]))
            .collect()
    } else {
        vec![0.0; hist.len()]
    };
    let mass: f64 = per_bin.iter().sum();
    if bf < 1.0 && (!mass.is_finite() || mass <= 0.0) {
        return Err(degenerate(cfg));
    }
    Ok((0..hist.len())
        .map(|i| {
            let signal = if bf < 1.0 {
                (1.0 - bf) * per_bin[i] / mass
            } else {
                0.0
            };
            n * (signal + bf * hist.bin_width(i) / (hi - lo))
        })
        .collect())
}
