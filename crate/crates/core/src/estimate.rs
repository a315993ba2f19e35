//! Classical emulation of the quantum Betti-number estimators.
//!
//! Phase estimation is modeled by drawing a uniformly random eigenindex of
//! the sector Laplacian and rounding the eigenvalue to the t-bit readout
//! grid. On top of that sit QBNE (sector-restricted), LLSD (arbitrary PSD
//! matrix), and the two-stage DQC1 estimator with its propagated error
//! bound.

use crate::complex::CochainComplex;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

/// Fraction of full-space density below which DQC1 refuses to run.
pub const DEFAULT_DENSITY_FLOOR: f64 = 0.05;

const CHUNK: usize = 1024;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EstimatorConfig {
    /// Spectral threshold b ≥ 0.
    pub b: f64,
    /// Resolution slack δ > 0.
    pub delta: f64,
    /// Additive accuracy ε ∈ (0, 1).
    pub eps: f64,
    /// Success probability μ ∈ (1/2, 1).
    pub mu: f64,
    /// Phase-readout bits; None is the exact-readout marker.
    pub t_bits: Option<u32>,
    pub seed: u64,
    /// Replace sampling by exact counting over the eigenvalue list.
    pub enumerate: bool,
}

impl EstimatorConfig {
    pub fn new(b: f64, delta: f64, eps: f64, mu: f64) -> Self {
        EstimatorConfig {
            b,
            delta,
            eps,
            mu,
            t_bits: None,
            seed: 0,
            enumerate: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.b.is_finite()
            && self.b >= 0.0
            && self.delta.is_finite()
            && self.delta > 0.0
            && self.eps > 0.0
            && self.eps < 1.0
            && self.mu > 0.5
            && self.mu < 1.0;
        if !ok {
            return Err(Error::Invalid(format!(
                "estimator config out of range: b={}, delta={}, eps={}, mu={}",
                self.b, self.delta, self.eps, self.mu
            )));
        }
        Ok(())
    }

    /// Hoeffding sample count N = ⌈ln(2/(1−μ)) / (2ε²)⌉.
    pub fn sample_count(&self) -> usize {
        ((2.0 / (1.0 - self.mu)).ln() / (2.0 * self.eps * self.eps)).ceil() as usize
    }

    fn with_accuracy(&self, eps: f64, mu: f64) -> Self {
        EstimatorConfig {
            eps,
            mu,
            ..*self
        }
    }
}

/// Smallest power of two (nonnegative exponent) at or above `lambda_max`.
pub fn lambda_scale(lambda_max: f64) -> f64 {
    let mut scale = 1.0f64;
    while scale < lambda_max {
        scale *= 2.0;
    }
    scale
}

/// Readout grid spacing λ_scale / 2^t_bits.
pub fn grid_spacing(lambda_max: f64, t_bits: u32) -> f64 {
    lambda_scale(lambda_max) / (1u64 << t_bits) as f64
}

/// The phase-estimation readout model: PSD-checked eigenvalues plus an
/// optional rounding grid.
struct EigenSampler {
    readouts: Vec<f64>,
}

impl EigenSampler {
    fn new(evals: &[f64], t_bits: Option<u32>) -> Result<Self> {
        if evals.is_empty() {
            return Err(Error::EmptySector { l: 0 });
        }
        let lambda_max = evals.iter().fold(0.0f64, |a, &e| a.max(e));
        let scale = lambda_max.abs().max(1.0);
        if let Some(&bad) = evals.iter().find(|&&e| e < -1e-10 * scale) {
            return Err(Error::NotPsd { value: bad });
        }
        let readouts = match t_bits {
            None => evals.to_vec(),
            Some(t) => {
                let spacing = grid_spacing(lambda_max, t);
                evals
                    .iter()
                    .map(|&e| (e / spacing).round() * spacing)
                    .collect()
            }
        };
        Ok(EigenSampler { readouts })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        self.readouts[rng.gen_range(0..self.readouts.len())]
    }

    fn exact_fraction_below(&self, threshold: f64) -> f64 {
        let c = self.readouts.iter().filter(|&&e| e <= threshold).count();
        c as f64 / self.readouts.len() as f64
    }
}

/// One modeled phase-estimation readout: a uniformly random eigenvalue of a
/// Hermitian PSD matrix, rounded to the t-bit grid (None = exact).
pub fn sample_eigenvalue<R: Rng>(
    m: &DMatrix<Complex64>,
    rng: &mut R,
    t_bits: Option<u32>,
) -> Result<f64> {
    let evals = crate::linalg::hermitian_spectrum(m)?;
    Ok(EigenSampler::new(&evals, t_bits)?.draw(rng))
}

/// Deterministic chunked Bernoulli average: chunk k draws from the ChaCha
/// substream with stream id k, so the result does not depend on thread
/// scheduling.
fn parallel_fraction<F>(n: usize, seed: u64, hit: F) -> f64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let total: usize = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64 + 1);
            let lo = k * CHUNK;
            let hi = ((k + 1) * CHUNK).min(n);
            (lo..hi).filter(|_| hit(&mut rng)).count()
        })
        .sum();
    total as f64 / n as f64
}

fn estimate_from_spectrum(evals: &[f64], cfg: &EstimatorConfig) -> Result<(f64, usize)> {
    cfg.validate()?;
    let sampler = EigenSampler::new(evals, cfg.t_bits)?;
    if let Some(t) = cfg.t_bits {
        let lambda_max = evals.iter().fold(0.0f64, |a, &e| a.max(e));
        let spacing = grid_spacing(lambda_max, t);
        if spacing >= cfg.delta / 2.0 {
            return Err(Error::GridTooCoarse {
                spacing,
                delta: cfg.delta,
            });
        }
    }
    let threshold = cfg.b + cfg.delta / 2.0;
    let n = cfg.sample_count();
    if cfg.enumerate {
        return Ok((sampler.exact_fraction_below(threshold), n));
    }
    let chi = parallel_fraction(n, cfg.seed, |rng| sampler.draw(rng) <= threshold);
    Ok((chi, n))
}

/// The documented JSON surface for estimator runs.
#[derive(Clone, Debug, Serialize)]
pub struct EstimatorReport {
    pub chi: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub b: f64,
    pub delta: f64,
    pub eps: f64,
    pub mu: f64,
    pub seed: u64,
    pub stage: serde_json::Value,
}

fn base_report(chi: f64, n: usize, cfg: &EstimatorConfig, stage: serde_json::Value) -> EstimatorReport {
    EstimatorReport {
        chi,
        n,
        b: cfg.b,
        delta: cfg.delta,
        eps: cfg.eps,
        mu: cfg.mu,
        seed: cfg.seed,
        stage,
    }
}

/// Quasi-Betti-number estimation on sector l: the fraction of N eigenvalue
/// readouts at or below b + δ/2.
pub fn qbne(c: &CochainComplex, l: usize, cfg: &EstimatorConfig) -> Result<EstimatorReport> {
    let dim = c.space().sector_dim(l)?;
    if dim == 0 {
        return Err(Error::EmptySector { l });
    }
    let evals = c.sector_spectrum(l)?;
    let (chi, n) = estimate_from_spectrum(&evals, cfg)?;
    Ok(base_report(
        chi,
        n,
        cfg,
        json!({
            "type": "qbne",
            "l": l,
            "dim": dim,
            "t_bits": cfg.t_bits,
            "enumerate": cfg.enumerate,
        }),
    ))
}

/// Low-lying spectral density estimation on an arbitrary Hermitian PSD
/// matrix.
pub fn llsd(m: &DMatrix<Complex64>, cfg: &EstimatorConfig) -> Result<EstimatorReport> {
    let evals = crate::linalg::hermitian_spectrum(m)?;
    let (chi, n) = estimate_from_spectrum(&evals, cfg)?;
    Ok(base_report(
        chi,
        n,
        cfg,
        json!({
            "type": "llsd",
            "dim": m.nrows(),
            "t_bits": cfg.t_bits,
        }),
    ))
}

/// Two-stage DQC1 estimator: stage 1 samples the full maximally mixed space
/// and counts draws that land in V^l with readout ≤ b + δ/2; stage 2
/// estimates the relative sector dimension; the quotient approximates
/// N_Δ(b, V^l) with the propagated bound.
pub fn dqc1_qbne(
    c: &CochainComplex,
    l: usize,
    cfg: &EstimatorConfig,
    density_floor: f64,
) -> Result<EstimatorReport> {
    cfg.validate()?;
    let dim = c.space().sector_dim(l)?;
    if dim == 0 {
        return Err(Error::EmptySector { l });
    }
    let m = c.m();
    let evals = c.sector_spectrum(l)?;
    let sampler = EigenSampler::new(&evals, cfg.t_bits)?;
    let threshold = cfg.b + cfg.delta / 2.0;

    // Split the budget: each stage gets ε/3 accuracy and half the failure
    // probability, so the propagated quotient stays within the combined
    // bound with probability ≥ μ.
    let stage_cfg = cfg.with_accuracy(cfg.eps / 3.0, (1.0 + cfg.mu) / 2.0);
    let n_stage = stage_cfg.sample_count();
    let space = c.space();
    let full = 1u64 << m;

    // Stage 1: p̂₁ ≈ β̃_l / 2^m (membership filter + eigenvalue readout).
    let p1 = parallel_fraction(n_stage, cfg.seed, |rng| {
        let word = rng.gen_range(0..full) as u32;
        let s = crate::fock::FockState::new(word, m);
        s.fermion_number() == l
            && space.member(s).unwrap_or(false)
            && sampler.draw(rng) <= threshold
    });
    // Stage 2: q̂ ≈ dim V^l / 2^m, on an independent substream.
    let q = parallel_fraction(n_stage, cfg.seed.wrapping_add(0x9e3779b97f4a7c15), |rng| {
        let word = rng.gen_range(0..full) as u32;
        let s = crate::fock::FockState::new(word, m);
        s.fermion_number() == l && space.member(s).unwrap_or(false)
    });

    if q < density_floor {
        return Err(Error::DensityFloor {
            density: q,
            floor: density_floor,
        });
    }
    let chi = p1 / q;
    let eps_stage = cfg.eps / 3.0;
    // (p ± ε')/(q ∓ ε') expansion: |χ̂ − χ| ≤ (ε' + χ̂ ε') / (q̂ − ε').
    let bound = if q > eps_stage {
        (eps_stage + chi * eps_stage) / (q - eps_stage)
    } else {
        f64::INFINITY
    };
    Ok(base_report(
        chi,
        2 * n_stage,
        cfg,
        json!({
            "type": "dqc1",
            "l": l,
            "p1": p1,
            "q": q,
            "n_stage": n_stage,
            "bound": bound,
            "density_floor": density_floor,
        }),
    ))
}
