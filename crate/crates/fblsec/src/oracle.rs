//! Independent validation layer: Monte-Carlo estimators driven by the
//! physical fading sampler, exhaustive grid searches, and finite-difference
//! derivative checks.
//!
//! Everything here deliberately avoids the analytic shortcuts it is used to
//! validate: leakage estimators sample actual channel vectors and form the
//! defining expectation; throughput estimators re-solve the adaptive rate per
//! realization; the multi-antenna-eavesdropper estimator builds the null-space
//! basis and inverts the interference covariance of an MMSE receiver.
//!
//! Estimates are accumulated in fixed-size chunks with per-chunk derived
//! seeds, so results are bit-exact per seed and chunk merges are associative.

use num_complex::Complex64;

use crate::channel::{null_space_basis, AnAllocation, ChannelSampler, ChannelSnapshot, SystemParams};
use crate::leakage::decode_success;
use crate::multi_opt::{ao_optimize, MultiOptError, AO_DEFAULT_EPS};
use crate::single_opt::{gamma_b_circ, p_success, AdaptiveSingleDesign, DesignPoint, SingleOptError};

/// A Monte-Carlo estimate: sample mean, its standard error, and the
/// provenance needed to reproduce it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Streaming moment accumulator; merging two accumulators pools them.
#[derive(Debug, Clone, Copy, Default)]
pub struct McAccumulator {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl McAccumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    /// Pooled combination; associative, and order-independent up to floating
    /// rounding.
    pub fn merge(self, other: Self) -> Self {
        McAccumulator {
            n: self.n + other.n,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    pub fn estimate(&self, seed: u64) -> McEstimate {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0);
        McEstimate { mean, stderr: (var / n).sqrt(), n_samples: self.n, seed }
    }
}

const CHUNK: usize = 10_000;

/// SplitMix64 step, used to derive independent per-chunk seeds.
fn mix_seed(seed: u64, chunk: u64) -> u64 {
    let mut z = seed ^ chunk.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mc_run<F>(params: &SystemParams, n_samples: usize, seed: u64, mut value: F) -> McEstimate
where
    F: FnMut(&mut ChannelSampler) -> f64,
{
    assert!(n_samples >= 1);
    let mut acc = McAccumulator::default();
    let chunks = n_samples.div_ceil(CHUNK);
    for c in 0..chunks {
        let mut sampler = ChannelSampler::new(params, mix_seed(seed, c as u64));
        let take = CHUNK.min(n_samples - c * CHUNK);
        let mut local = McAccumulator::default();
        for _ in 0..take {
            local.push(value(&mut sampler));
        }
        acc = acc.merge(local);
    }
    acc.estimate(seed)
}

/// Monte-Carlo estimate of the information-leakage probability: the mean of
/// the eavesdropper's successful-decoding probability over sampled fading,
/// with the SINR computed from raw channel vectors (beam plus null-space AN
/// at `alpha = 1`).
pub fn mc_leakage(
    params: &SystemParams,
    phi: f64,
    n: usize,
    r_e: f64,
    n_samples: usize,
    seed: u64,
) -> McEstimate {
    let alloc = AnAllocation { phi, alpha: 1.0 };
    mc_run(params, n_samples, seed, |sampler| {
        let draw = sampler.draw();
        decode_success(draw.eve_sinr(params, &alloc), n, r_e)
    })
}

/// Which design rule the throughput estimator replays per realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThroughputScheme {
    /// Re-solve the optimal secrecy rate for every sampled gain.
    Adaptive,
    /// Evaluate the fixed design everywhere above its threshold.
    NonAdaptive,
}

/// Monte-Carlo secrecy throughput: the sample mean of
/// `R_s(eta) p_s(eta) 1{eta > mu}`.
///
/// In adaptive mode the rate (and for `M >= 2` the power split) is re-solved
/// per sample; in non-adaptive mode the supplied design is evaluated as is.
pub fn mc_throughput(
    params: &SystemParams,
    design: &DesignPoint,
    scheme: ThroughputScheme,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate, SingleOptError> {
    match scheme {
        ThroughputScheme::NonAdaptive => Ok(mc_run(params, n_samples, seed, |sampler| {
            let eta = sampler.draw().snapshot.eta;
            if eta > design.mu {
                let gamma_eff = design.phi * params.p_b * eta;
                design.r_s * p_success(gamma_eff, design.n, design.r_t())
            } else {
                0.0
            }
        })),
        ThroughputScheme::Adaptive if params.m == 1 => {
            let rule = AdaptiveSingleDesign {
                r_e_star: design.r_e,
                mu_star: design.mu,
                gamma_b_circ: gamma_b_circ(design.r_e, design.n)?,
                n: design.n,
            };
            Ok(mc_run(params, n_samples, seed, |sampler| {
                let snapshot = sampler.draw().snapshot;
                rule.conditional_opt(params, &snapshot).throughput
            }))
        }
        ThroughputScheme::Adaptive => mc_throughput_adaptive_multi(params, n_samples, seed),
    }
}

fn mc_throughput_adaptive_multi(
    params: &SystemParams,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate, SingleOptError> {
    let mut failure: Option<MultiOptError> = None;
    let est = mc_run(params, n_samples, seed, |sampler| {
        let snapshot = sampler.draw().snapshot;
        match ao_optimize(params, &snapshot, AO_DEFAULT_EPS, 60) {
            Ok(res) => res.design.throughput,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    });
    if let Some(e) = failure {
        return Err(SingleOptError::Leakage(match e {
            MultiOptError::Leakage(inner) => inner,
            other => {
                return Err(SingleOptError::Numeric(crate::specfun::SpecFunError::Domain {
                    arg: "ao_optimize",
                    value: f64::NAN,
                    constraint: match other {
                        MultiOptError::RequiresMultiAntenna { .. } => "requires M >= 2",
                        _ => "alternating optimization failed",
                    },
                }))
            }
        }));
    }
    Ok(est)
}

// ---------------------------------------------------------------------------
// Multi-antenna-eavesdropper MMSE sampler
// ---------------------------------------------------------------------------

/// One sampled post-MMSE SINR of an `M_e`-antenna eavesdropper under
/// null-space AN at `alpha = 1`, built from raw channel draws: beamformer and
/// null basis from the legitimate channel, interference covariance inversion
/// at the eavesdropper.
pub fn sample_mmse_sinr(params: &SystemParams, phi: f64, sampler: &mut ChannelSampler) -> f64 {
    let m = params.m;
    let draw = sampler.draw();
    // Unit per-entry variance: the P_e-normalized convention.
    let h_rows = sampler.draw_eve_matrix(1.0);
    let norm_b: f64 = draw.snapshot.eta.sqrt();
    let w: Vec<Complex64> = draw.h_b.iter().map(|c| c.conj() / norm_b).collect();
    let basis = null_space_basis(&draw.h_b);
    let m_e = params.m_e;
    // Desired column g = H_e w and AN mixing matrix G = H_e W_perp.
    let g: Vec<Complex64> = h_rows
        .iter()
        .map(|row| row.iter().zip(&w).map(|(h, wi)| h * wi).sum())
        .collect();
    let gmat: Vec<Vec<Complex64>> = h_rows
        .iter()
        .map(|row| {
            basis
                .iter()
                .map(|col| row.iter().zip(col).map(|(h, ci)| h * ci).sum())
                .collect()
        })
        .collect();
    // Sigma = I + c G G^H with c = (1 - phi) P_e / (M - 1).
    let c = if m >= 2 { (1.0 - phi) * params.p_e / (m as f64 - 1.0) } else { 0.0 };
    let mut sigma = vec![vec![Complex64::new(0.0, 0.0); m_e]; m_e];
    for i in 0..m_e {
        for j in 0..m_e {
            let mut acc = Complex64::new(0.0, 0.0);
            for (gi, gj) in gmat[i].iter().zip(&gmat[j]) {
                acc += gi * gj.conj();
            }
            sigma[i][j] = acc * c;
        }
        sigma[i][i] += 1.0;
    }
    let x = solve_hermitian(sigma, &g);
    let quad: Complex64 = g.iter().zip(&x).map(|(gi, xi)| gi.conj() * xi).sum();
    phi * params.p_e * quad.re
}

/// Gaussian elimination with partial pivoting on a small complex system.
#[allow(clippy::needless_range_loop)]
fn solve_hermitian(mut a: Vec<Vec<Complex64>>, b: &[Complex64]) -> Vec<Complex64> {
    let n = b.len();
    let mut x: Vec<Complex64> = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        x.swap(col, pivot);
        let diag = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / diag;
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let xv = x[col];
            x[row] -= factor * xv;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    x
}

/// Empirical CDF estimate of the MMSE SINR at a point.
pub fn mc_cdf_mmse_sinr(
    params: &SystemParams,
    phi: f64,
    x: f64,
    n_samples: usize,
    seed: u64,
) -> McEstimate {
    mc_run(params, n_samples, seed, |sampler| {
        if sample_mmse_sinr(params, phi, sampler) <= x {
            1.0
        } else {
            0.0
        }
    })
}

/// Monte-Carlo leakage against the multi-antenna eavesdropper: the defining
/// expectation of the MMSE receiver's successful-decoding probability.
pub fn mc_leakage_multi_eve(
    params: &SystemParams,
    phi: f64,
    n: usize,
    r_e: f64,
    n_samples: usize,
    seed: u64,
) -> McEstimate {
    mc_run(params, n_samples, seed, |sampler| {
        decode_success(sample_mmse_sinr(params, phi, sampler), n, r_e)
    })
}

/// Empirical CDF estimate of the legitimate receiver's SNR `phi P_b eta`.
pub fn mc_cdf_bob_snr(
    params: &SystemParams,
    phi: f64,
    gamma: f64,
    n_samples: usize,
    seed: u64,
) -> McEstimate {
    mc_run(params, n_samples, seed, |sampler| {
        if phi * params.p_b * sampler.draw().snapshot.eta <= gamma {
            1.0
        } else {
            0.0
        }
    })
}

/// Empirical CDF estimate of the single-antenna eavesdropper's SINR under
/// null-space AN at `alpha = 1`.
pub fn mc_cdf_eve_sinr(
    params: &SystemParams,
    phi: f64,
    gamma: f64,
    n_samples: usize,
    seed: u64,
) -> McEstimate {
    let alloc = AnAllocation { phi, alpha: 1.0 };
    mc_run(params, n_samples, seed, |sampler| {
        if sampler.draw().eve_sinr(params, &alloc) <= gamma {
            1.0
        } else {
            0.0
        }
    })
}

/// Expected conditional throughput by sampling, for cross-checking the
/// quadrature in the adaptive analysis.
pub fn mc_expected_conditional<F>(
    params: &SystemParams,
    n_samples: usize,
    seed: u64,
    mut conditional: F,
) -> McEstimate
where
    F: FnMut(&ChannelSnapshot) -> f64,
{
    mc_run(params, n_samples, seed, |sampler| conditional(&sampler.draw().snapshot))
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

/// Exhaustive 1-D maximization over `steps + 1` equispaced points; ties break
/// toward the smaller coordinate.
pub fn grid_search_1d<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, steps: usize) -> (f64, f64) {
    assert!(steps >= 1 && hi > lo);
    let mut best = (lo, f(lo));
    for i in 1..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Exhaustive 2-D maximization on a product grid; ties break toward smaller
/// coordinates in row-major order.
pub fn grid_search_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    x_axis: (f64, f64, usize),
    y_axis: (f64, f64, usize),
) -> ((f64, f64), f64) {
    let (x_lo, x_hi, x_steps) = x_axis;
    let (y_lo, y_hi, y_steps) = y_axis;
    assert!(x_steps >= 1 && y_steps >= 1);
    let mut best = ((x_lo, y_lo), f64::NEG_INFINITY);
    for i in 0..=x_steps {
        let x = x_lo + (x_hi - x_lo) * i as f64 / x_steps as f64;
        for j in 0..=y_steps {
            let y = y_lo + (y_hi - y_lo) * j as f64 / y_steps as f64;
            let v = f(x, y);
            if v > best.1 {
                best = ((x, y), v);
            }
        }
    }
    best
}

/// Maximal relative error between an analytic derivative and the central
/// finite difference of `f` over the given points.
pub fn fd_check<F, D>(mut f: F, mut df: D, points: &[f64], step: f64) -> f64
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let mut worst = 0.0f64;
    for &x in points {
        let fd = (f(x + step) - f(x - step)) / (2.0 * step);
        let an = df(x);
        let rel = (fd - an).abs() / an.abs().max(1e-12);
        worst = worst.max(rel);
    }
    worst
}
