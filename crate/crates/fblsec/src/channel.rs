//! Scenario parameters, SINR algebra, and the fading distributions of the
//! legitimate and wiretap links.
//!
//! Quasi-static Rayleigh fading: the channel vectors stay constant over a
//! codeword and are redrawn independently between codewords. The transmitter
//! beamforms along the main channel and may inject artificial noise (AN)
//! uniformly in its null space; `phi` is the power fraction on the beam
//! direction and `alpha` the information fraction within it.
//!
//! Sampling uses `ChaCha8` keyed by a `u64` seed, so every Monte-Carlo result
//! in this crate is bit-exactly reproducible per seed.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::specfun::reg_upper_gamma_raw;

/// A scenario parameter failed validation; `field` names the offender.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamError {
    pub field: &'static str,
    pub value: f64,
    pub constraint: &'static str,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {}: {} ({})", self.field, self.value, self.constraint)
    }
}

impl std::error::Error for ParamError {}

/// Static scenario parameters shared by every analysis in the crate.
///
/// Powers are normalized by the respective receiver noise variances:
/// `p_b = P / w_b^2`, `p_e = P / w_e^2`. The mean channel gains are
/// `Gamma_b = p_b * sigma_b2` and `Gamma_e = p_e * sigma_e2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Transmit antennas, `>= 1`.
    pub m: usize,
    /// Eavesdropper antennas, `>= 1` (1 unless the MMSE-receiver analysis is used).
    pub m_e: usize,
    /// Normalized power toward the legitimate receiver, linear, `> 0`.
    pub p_b: f64,
    /// Normalized power toward the eavesdropper, linear, `> 0`.
    pub p_e: f64,
    /// Main-channel variance per antenna, `> 0`.
    pub sigma_b2: f64,
    /// Wiretap-channel variance per antenna, `> 0`.
    pub sigma_e2: f64,
    /// Information-leakage threshold, in `[0, 1]`.
    pub delta: f64,
    /// Maximal blocklength (channel uses), `>= 1`.
    pub n_max: usize,
    /// Robust design switch: treat the eavesdropper as noise-free. The
    /// leakage threshold then becomes `Lambda / (1 - phi)` in closed form
    /// instead of a huge numeric `Gamma_e`, which avoids overflow.
    pub worst_case_eve: bool,
}

impl SystemParams {
    /// Single-eavesdropper-antenna scenario with the given parameters.
    pub fn new(
        m: usize,
        p_b: f64,
        p_e: f64,
        sigma_b2: f64,
        sigma_e2: f64,
        delta: f64,
        n_max: usize,
    ) -> Result<Self, ParamError> {
        let p = SystemParams {
            m,
            m_e: 1,
            p_b,
            p_e,
            sigma_b2,
            sigma_e2,
            delta,
            n_max,
            worst_case_eve: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_eve_antennas(mut self, m_e: usize) -> Self {
        self.m_e = m_e;
        self
    }

    pub fn with_worst_case_eve(mut self, on: bool) -> Self {
        self.worst_case_eve = on;
        self
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        fn err(field: &'static str, value: f64, constraint: &'static str) -> ParamError {
            ParamError { field, value, constraint }
        }
        if self.m < 1 {
            return Err(err("m", self.m as f64, "must be >= 1"));
        }
        if self.m_e < 1 {
            return Err(err("m_e", self.m_e as f64, "must be >= 1"));
        }
        if !(self.p_b > 0.0 && self.p_b.is_finite()) {
            return Err(err("p_b", self.p_b, "must be finite and > 0"));
        }
        if !(self.p_e > 0.0 && self.p_e.is_finite()) {
            return Err(err("p_e", self.p_e, "must be finite and > 0"));
        }
        if !(self.sigma_b2 > 0.0 && self.sigma_b2.is_finite()) {
            return Err(err("sigma_b2", self.sigma_b2, "must be finite and > 0"));
        }
        if !(self.sigma_e2 > 0.0 && self.sigma_e2.is_finite()) {
            return Err(err("sigma_e2", self.sigma_e2, "must be finite and > 0"));
        }
        if !(self.delta >= 0.0 && self.delta <= 1.0) {
            return Err(err("delta", self.delta, "must lie in [0, 1]"));
        }
        if self.n_max < 1 {
            return Err(err("n_max", self.n_max as f64, "must be >= 1"));
        }
        Ok(())
    }

    /// Mean SNR of the legitimate link, `Gamma_b = p_b * sigma_b2`.
    pub fn gamma_bar_b(&self) -> f64 {
        self.p_b * self.sigma_b2
    }

    /// Mean SNR of the wiretap link, `Gamma_e = p_e * sigma_e2`.
    pub fn gamma_bar_e(&self) -> f64 {
        self.p_e * self.sigma_e2
    }
}

/// One realization of the main-channel power gain `eta = ||h_b||^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSnapshot {
    pub eta: f64,
}

impl ChannelSnapshot {
    pub fn new(eta: f64) -> Self {
        assert!(eta >= 0.0, "eta must be >= 0");
        ChannelSnapshot { eta }
    }
}

/// Power split of the transmitted signal: `phi` on the beam direction,
/// `alpha` of that on the information symbol (the rest is in-beam AN).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnAllocation {
    pub phi: f64,
    pub alpha: f64,
}

impl AnAllocation {
    pub fn new(phi: f64, alpha: f64) -> Self {
        assert!((0.0..=1.0).contains(&phi), "phi must lie in [0, 1]");
        assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1]");
        AnAllocation { phi, alpha }
    }

    /// No AN at all: everything on the information beam.
    pub fn beamforming() -> Self {
        AnAllocation { phi: 1.0, alpha: 1.0 }
    }
}

/// SINR seen when a fraction `alpha` of a received power `x` carries the
/// signal and the remainder interferes: `x alpha / (x (1 - alpha) + 1)`.
///
/// Increasing in `x` for `alpha > 0`; equals `x` at `alpha = 1` and 0 at
/// `alpha = 0`.
pub fn kappa(x: f64, alpha: f64) -> f64 {
    assert!(x >= 0.0, "x must be >= 0");
    assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1]");
    x * alpha / (x * (1.0 - alpha) + 1.0)
}

/// Legitimate receiver's SINR for a given snapshot and power split:
/// `alpha phi P_b eta / ((1 - alpha) phi P_b eta + 1)`.
pub fn sinr_bob(params: &SystemParams, snapshot: &ChannelSnapshot, alloc: &AnAllocation) -> f64 {
    kappa(alloc.phi * params.p_b * snapshot.eta, alloc.alpha)
}

/// CDF of the legitimate receiver's SNR `gamma_b = phi P_b eta` under full
/// information allocation (`alpha = 1`): a Gamma(M) law with scale
/// `phi Gamma_b`.
///
/// `phi = 0` is the degenerate zero-power limit (point mass at 0), for which
/// the CDF is 1 everywhere on `gamma >= 0`.
pub fn cdf_gamma_b(params: &SystemParams, phi: f64, gamma: f64) -> f64 {
    assert!(gamma >= 0.0, "gamma must be >= 0");
    assert!((0.0..=1.0).contains(&phi), "phi must lie in [0, 1]");
    if phi == 0.0 {
        return 1.0;
    }
    1.0 - reg_upper_gamma_raw(params.m as u32, gamma / (phi * params.gamma_bar_b()))
}

#[inline]
pub(crate) fn an_xi(m: usize, phi: f64) -> f64 {
    if m >= 2 {
        (1.0 / phi - 1.0) / (m as f64 - 1.0)
    } else {
        0.0
    }
}

/// CDF of the single-antenna eavesdropper's SINR under null-space AN with
/// `alpha = 1`: `1 - e^{-gamma/(phi Gamma_e)} (1 + xi gamma)^{1-M}` with
/// `xi = (phi^{-1} - 1)/(M - 1)`.
///
/// For `M = 1` the AN term vanishes and this is the exponential CDF.
pub fn cdf_gamma_e(params: &SystemParams, phi: f64, gamma: f64) -> f64 {
    assert!(gamma >= 0.0, "gamma must be >= 0");
    assert!(phi > 0.0 && phi <= 1.0, "phi must lie in (0, 1]");
    let xi = an_xi(params.m, phi);
    let scale = phi * params.gamma_bar_e();
    1.0 - (-gamma / scale).exp() * (1.0 + xi * gamma).powi(1 - params.m as i32)
}

/// Density matching [`cdf_gamma_e`]:
/// `(1/(phi Gamma_e (1+xi g)^{M-1}) + xi (M-1)/(1+xi g)^M) e^{-g/(phi Gamma_e)}`.
///
/// Nonnegative, integrates to one, and decreases in `gamma`.
pub fn pdf_gamma_e(params: &SystemParams, phi: f64, gamma: f64) -> f64 {
    assert!(gamma >= 0.0, "gamma must be >= 0");
    assert!(phi > 0.0 && phi <= 1.0, "phi must lie in (0, 1]");
    let m = params.m as f64;
    let xi = an_xi(params.m, phi);
    let scale = phi * params.gamma_bar_e();
    let base = 1.0 + xi * gamma;
    ((1.0 / (scale * base.powi(params.m as i32 - 1)))
        + xi * (m - 1.0) / base.powi(params.m as i32))
        * (-gamma / scale).exp()
}

/// CDF of an `M_e`-antenna eavesdropper's post-MMSE SINR under null-space AN,
/// parameterized by the effective mean power `p_eff` of each receive branch.
///
/// `A_n(x)` switches between 1 (enough antennas to null the AN) and a damped
/// binomial sum otherwise.
pub fn cdf_mmse_sinr(m: usize, m_e: usize, phi: f64, p_eff: f64, x: f64) -> f64 {
    assert!(x >= 0.0, "x must be >= 0");
    assert!(phi > 0.0 && phi <= 1.0, "phi must lie in (0, 1]");
    assert!(m >= 1 && m_e >= 1);
    let xi = an_xi(m, phi);
    let scale = phi * p_eff;
    let z = x / scale;
    let ez = (-z).exp();
    let mut sum = 0.0;
    let mut pow = 1.0; // z^{n-1} / (n-1)!
    for n in 1..=m_e {
        if n > 1 {
            pow *= z / (n as f64 - 1.0);
        }
        sum += a_n_factor(m, m_e, n, xi * x) * pow;
    }
    (1.0 - ez * sum).clamp(0.0, 1.0)
}

/// The `A_n(x)` weight of the MMSE SINR law.
fn a_n_factor(m: usize, m_e: usize, n: usize, xi_x: f64) -> f64 {
    if m_e >= m - 1 + n {
        return 1.0;
    }
    // sum_{k=0}^{M_e - n} C(M-1, k) (xi x)^k / (1 + xi x)^{M-1}
    let mut num = 0.0;
    let mut binom = 1.0;
    let mut pow = 1.0;
    for k in 0..=(m_e - n) {
        if k > 0 {
            binom *= (m - k) as f64 / k as f64;
            pow *= xi_x;
        }
        num += binom * pow;
    }
    num / (1.0 + xi_x).powi(m as i32 - 1)
}

/// CDF of the multi-antenna eavesdropper's MMSE SINR in the `P_e`
/// normalization (unit per-antenna channel variance, scale `phi P_e`).
///
/// Callers preferring the `Gamma_e` convention can use [`cdf_mmse_sinr`]
/// with `p_eff = params.gamma_bar_e()`.
pub fn cdf_gamma_e_multi(params: &SystemParams, phi: f64, x: f64) -> f64 {
    cdf_mmse_sinr(params.m, params.m_e, phi, params.p_e, x)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// One fading draw: both channel vectors and the derived snapshot.
#[derive(Debug, Clone)]
pub struct FadingDraw {
    /// Main-channel coefficients, i.i.d. complex Gaussian, variance `sigma_b2`.
    pub h_b: Vec<Complex64>,
    /// Wiretap-channel coefficients, i.i.d. complex Gaussian, variance `sigma_e2`.
    pub h_e: Vec<Complex64>,
    pub snapshot: ChannelSnapshot,
}

impl FadingDraw {
    /// Eavesdropper's physical SINR for this draw under beamforming plus
    /// null-space AN. Uses the unitary-basis identity
    /// `||h_e^T W_perp||^2 = ||h_e||^2 - |h_e^T w|^2`, exact for any
    /// orthonormal completion of the beam direction.
    pub fn eve_sinr(&self, params: &SystemParams, alloc: &AnAllocation) -> f64 {
        let m = params.m as f64;
        let eta = self.snapshot.eta;
        if eta == 0.0 {
            return 0.0;
        }
        let norm_b = eta.sqrt();
        // h_e^T w with w = conj(h_b)/||h_b||.
        let proj: Complex64 =
            self.h_e.iter().zip(&self.h_b).map(|(e, b)| e * b.conj()).sum::<Complex64>()
                / norm_b;
        let beam_gain = proj.norm_sqr();
        let total: f64 = self.h_e.iter().map(|e| e.norm_sqr()).sum();
        let null_gain = (total - beam_gain).max(0.0);
        let signal = alloc.alpha * alloc.phi * params.p_e * beam_gain;
        let in_beam_an = (1.0 - alloc.alpha) * alloc.phi * params.p_e * beam_gain;
        let null_an = if params.m >= 2 {
            (1.0 - alloc.phi) * params.p_e * null_gain / (m - 1.0)
        } else {
            0.0
        };
        signal / (in_beam_an + null_an + 1.0)
    }

    /// Legitimate receiver's SINR for this draw.
    pub fn bob_sinr(&self, params: &SystemParams, alloc: &AnAllocation) -> f64 {
        sinr_bob(params, &self.snapshot, alloc)
    }
}

/// Rayleigh-fading sampler owning its generator state.
///
/// Create one per worker; never share a sampler across threads. The stream is
/// a deterministic function of the seed.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    params: SystemParams,
    rng: ChaCha8Rng,
}

impl ChannelSampler {
    pub fn new(params: &SystemParams, seed: u64) -> Self {
        ChannelSampler { params: params.clone(), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Draw both channel vectors.
    pub fn draw(&mut self) -> FadingDraw {
        let h_b = self.complex_gaussian_vec(self.params.m, self.params.sigma_b2);
        let h_e = self.complex_gaussian_vec(self.params.m, self.params.sigma_e2);
        let eta = h_b.iter().map(|c| c.norm_sqr()).sum();
        FadingDraw { h_b, h_e, snapshot: ChannelSnapshot { eta } }
    }

    /// Draw the eavesdropper's channel matrix (rows per receive antenna) for
    /// the multi-antenna-eavesdropper analysis, with unit per-entry variance
    /// to match the `P_e` normalization.
    pub fn draw_eve_matrix(&mut self, variance: f64) -> Vec<Vec<Complex64>> {
        (0..self.params.m_e)
            .map(|_| self.complex_gaussian_vec(self.params.m, variance))
            .collect()
    }

    fn complex_gaussian_vec(&mut self, len: usize, variance: f64) -> Vec<Complex64> {
        let std = (variance / 2.0).sqrt();
        (0..len)
            .map(|_| {
                let (re, im) = self.standard_normal_pair();
                Complex64::new(re * std, im * std)
            })
            .collect()
    }

    /// Box-Muller from two uniform draws; hand-rolled so the stream depends
    /// only on ChaCha8 and this transform.
    fn standard_normal_pair(&mut self) -> (f64, f64) {
        let u1: f64 = loop {
            let u = self.rng.random::<f64>();
            if u > 0.0 {
                break u;
            }
        };
        let u2: f64 = self.rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        (r * t.cos(), r * t.sin())
    }
}

/// Convenience single draw: deterministic in `(params, seed)`.
pub fn sample_snapshot(params: &SystemParams, seed: u64) -> FadingDraw {
    ChannelSampler::new(params, seed).draw()
}

/// Orthonormal basis of the null space of `h_b` (w.r.t. the transpose
/// product used by the receive model), built by Gram-Schmidt against the
/// beam direction `conj(h_b)/||h_b||`.
pub(crate) fn null_space_basis(h_b: &[Complex64]) -> Vec<Vec<Complex64>> {
    let m = h_b.len();
    let norm: f64 = h_b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let w: Vec<Complex64> = h_b.iter().map(|c| c.conj() / norm).collect();
    let mut basis: Vec<Vec<Complex64>> = vec![w];
    for j in 0..m {
        if basis.len() == m {
            break;
        }
        // Start from the j-th standard basis vector.
        let mut v: Vec<Complex64> = (0..m)
            .map(|i| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        for u in &basis {
            let inner: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= inner * ui;
            }
        }
        let nv: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-9 {
            for vi in v.iter_mut() {
                *vi /= nv;
            }
            basis.push(v);
        }
    }
    basis.remove(0);
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, Tolerance};

    fn params() -> SystemParams {
        SystemParams::new(4, 1.0, 1.0, 1.0, 1.0, 0.2, 500).unwrap()
    }

    #[test]
    fn validation_names_fields() {
        let mut p = params();
        p.delta = 1.5;
        let err = p.validate().unwrap_err();
        assert_eq!(err.field, "delta");
        let mut p = params();
        p.p_b = -1.0;
        assert_eq!(p.validate().unwrap_err().field, "p_b");
    }

    #[test]
    fn kappa_edges() {
        assert_eq!(kappa(3.7, 1.0), 3.7);
        assert_eq!(kappa(3.7, 0.0), 0.0);
        assert!((kappa(1.0, 0.5) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_monotone_in_x() {
        for &alpha in &[0.2, 0.5, 0.9, 1.0] {
            let mut prev = -1.0;
            for i in 0..60 {
                let x = i as f64 * 0.5;
                let v = kappa(x, alpha);
                assert!(v > prev || (v == 0.0 && prev == 0.0));
                prev = v;
            }
        }
    }

    #[test]
    fn sinr_bob_matches_kappa() {
        let p = params();
        let snap = ChannelSnapshot::new(2.3);
        for &(phi, alpha) in &[(1.0, 1.0), (0.6, 0.8), (0.3, 0.0)] {
            let alloc = AnAllocation::new(phi, alpha);
            let direct = sinr_bob(&p, &snap, &alloc);
            let via_kappa = kappa(phi * p.p_b * snap.eta, alpha);
            assert_eq!(direct, via_kappa);
        }
        // alpha = 1 collapses the denominator.
        let alloc = AnAllocation::new(0.7, 1.0);
        assert!((sinr_bob(&p, &snap, &alloc) - 0.7 * p.p_b * snap.eta).abs() < 1e-15);
    }

    #[test]
    fn cdf_gamma_b_single_antenna_is_exponential() {
        let p = SystemParams::new(1, 2.0, 1.0, 1.5, 1.0, 0.2, 500).unwrap();
        for &g in &[0.0, 0.5, 2.0, 10.0] {
            let expect = 1.0 - (-g / p.gamma_bar_b()).exp();
            assert!((cdf_gamma_b(&p, 1.0, g) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn cdfs_are_proper() {
        let p = params();
        for &phi in &[0.2, 0.6, 1.0] {
            assert_eq!(cdf_gamma_b(&p, phi, 0.0), 0.0);
            assert_eq!(cdf_gamma_e(&p, phi, 0.0), 0.0);
            assert_eq!(cdf_gamma_e_multi(&p, phi, 0.0), 0.0);
            let mut prev_b = -1.0;
            let mut prev_e = -1.0;
            for i in 0..200 {
                let g = i as f64 * 0.25;
                let fb = cdf_gamma_b(&p, phi, g);
                let fe = cdf_gamma_e(&p, phi, g);
                assert!(fb >= prev_b && (0.0..=1.0).contains(&fb));
                assert!(fe >= prev_e && (0.0..=1.0).contains(&fe));
                prev_b = fb;
                prev_e = fe;
            }
            assert!(cdf_gamma_b(&p, phi, 1e6) > 1.0 - 1e-12);
            assert!(cdf_gamma_e(&p, phi, 1e6) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn cdf_gamma_e_no_an_is_exponential() {
        let p = params();
        for &g in &[0.1, 1.0, 4.0] {
            let expect = 1.0 - (-g / p.gamma_bar_e()).exp();
            assert!((cdf_gamma_e(&p, 1.0, g) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn pdf_gamma_e_normalizes_and_matches_cdf() {
        let p = params();
        let tol = Tolerance::default();
        for &phi in &[0.3, 0.5, 0.9] {
            let total =
                integrate(|g| pdf_gamma_e(&p, phi, g), 0.0, f64::INFINITY, &tol).unwrap();
            assert!((total - 1.0).abs() < 1e-8, "phi = {phi}, total = {total}");
        }
        // Central difference of the CDF; Gamma_e = 4 keeps the tail large
        // enough that the difference is not drowned by cancellation in 1 - F.
        let p = SystemParams::new(4, 1.0, 4.0, 1.0, 1.0, 0.2, 500).unwrap();
        for &phi in &[0.3, 0.5, 0.9] {
            for &g in &[0.1, 1.0, 5.0] {
                let h = 1e-5;
                let fd = (cdf_gamma_e(&p, phi, g + h) - cdf_gamma_e(&p, phi, g - h)) / (2.0 * h);
                let pd = pdf_gamma_e(&p, phi, g);
                assert!((fd - pd).abs() / pd < 1e-4, "phi = {phi}, g = {g}");
            }
        }
    }

    #[test]
    fn pdf_gamma_e_decreasing() {
        let p = params();
        for &phi in &[0.3, 0.7] {
            let mut prev = f64::INFINITY;
            for i in 0..100 {
                let g = i as f64 * 0.1;
                let d = pdf_gamma_e(&p, phi, g);
                assert!(d <= prev);
                prev = d;
            }
        }
    }

    #[test]
    fn mmse_cdf_reduces_to_single_antenna_form() {
        let p = params(); // m = 4, m_e = 1
        for &x in &[0.2, 1.0, 3.0] {
            let multi = cdf_gamma_e_multi(&p, 0.5, x);
            // Single-eavesdropper-antenna AN law with the P_e scaling.
            let xi = an_xi(4, 0.5);
            let expect = 1.0 - (-x / (0.5 * p.p_e)).exp() * (1.0 + xi * x).powi(-3);
            assert!((multi - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn mmse_cdf_gamma_case_when_antennas_dominate() {
        // M = 1: A_n = 1 for every n, leaving the Gamma(M_e) CDF.
        let p = SystemParams::new(1, 1.0, 2.0, 1.0, 1.0, 0.2, 500).unwrap().with_eve_antennas(3);
        for &x in &[0.5, 2.0, 6.0] {
            let got = cdf_gamma_e_multi(&p, 1.0, x);
            let expect = 1.0 - reg_upper_gamma_raw(3, x / p.p_e);
            assert!((got - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn noise_free_eve_with_enough_antennas_never_decodes_late() {
        // P_e -> infinity with M_e >= M: the MMSE receiver removes all AN,
        // the SINR diverges, and the CDF collapses to zero.
        let p = SystemParams::new(4, 1.0, 1e12, 1.0, 1.0, 0.2, 500)
            .unwrap()
            .with_eve_antennas(4);
        for &x in &[1.0, 1e3, 1e4] {
            assert!(cdf_gamma_e_multi(&p, 0.5, x) < 1e-6, "x = {x}");
        }
        // Residual mass is of order x / (phi P_e) from the receiver noise.
        assert!(cdf_gamma_e_multi(&p, 0.5, 1e6) < 1e-5);
    }

    #[test]
    fn sampler_is_deterministic() {
        let p = params();
        let a = sample_snapshot(&p, 42);
        let b = sample_snapshot(&p, 42);
        assert_eq!(a.snapshot.eta, b.snapshot.eta);
        assert_eq!(a.h_b, b.h_b);
        let c = sample_snapshot(&p, 43);
        assert_ne!(a.snapshot.eta, c.snapshot.eta);
    }

    #[test]
    fn eta_mean_matches_chi_square() {
        let p = params();
        let mut sampler = ChannelSampler::new(&p, 7);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let eta = sampler.draw().snapshot.eta;
            sum += eta;
            sumsq += eta * eta;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        let stderr = (var / n as f64).sqrt();
        let expect = p.m as f64 * p.sigma_b2;
        assert!(
            (mean - expect).abs() < 3.0 * stderr,
            "mean = {mean}, expect = {expect}, stderr = {stderr}"
        );
    }

    #[test]
    fn empirical_snr_cdf_passes_ks_test() {
        // M = 1: P_b eta is exponential with mean Gamma_b.
        let p = SystemParams::new(1, 1.6, 1.0, 0.9, 1.0, 0.2, 500).unwrap();
        let mut sampler = ChannelSampler::new(&p, 11);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| p.p_b * sampler.draw().snapshot.eta).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let gb = p.gamma_bar_b();
        let mut d: f64 = 0.0;
        for (i, x) in xs.iter().enumerate() {
            let f = 1.0 - (-x / gb).exp();
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            d = d.max((f - lo).abs()).max((f - hi).abs());
        }
        // 1% critical value of the Kolmogorov distribution.
        assert!(d < 1.63 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn null_space_basis_is_orthonormal_and_null() {
        let p = params();
        let draw = sample_snapshot(&p, 3);
        let basis = null_space_basis(&draw.h_b);
        assert_eq!(basis.len(), p.m - 1);
        for (i, u) in basis.iter().enumerate() {
            // h_b^T u = 0 (transpose, not conjugate, product).
            let along: Complex64 = draw.h_b.iter().zip(u).map(|(b, ui)| b * ui).sum();
            assert!(along.norm() < 1e-10);
            for (j, v) in basis.iter().enumerate() {
                let inner: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((inner.norm() - expect).abs() < 1e-10);
            }
        }
    }
}
