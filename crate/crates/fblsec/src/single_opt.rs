//! Secrecy-throughput analysis and maximization for the single-antenna
//! transmitter, in adaptive (per-realization) and non-adaptive (statistical)
//! designs.
//!
//! Both designs share the same skeleton: pick the smallest rate redundancy
//! meeting the leakage constraint, derive the on-off threshold that keeps the
//! codeword rate below capacity, use the maximal blocklength (throughput is
//! monotone in blocklength under the on-off policy), then optimize the
//! secrecy rate. The conditional throughput is concave in the secrecy rate,
//! so the rate step reduces to one safeguarded Newton solve; the non-adaptive
//! design reduces to a scalar root of a decreasing score function.

use std::fmt;

use crate::channel::{ChannelSnapshot, SystemParams};
use crate::leakage::{decode_success, invert_redundancy, LeakageError, LeakageModel};
use crate::specfun::{
    capacity_raw, dispersion_raw, find_root, find_root_growing, find_root_newton, integrate,
    lambert_w0, normal_pdf, q_raw, SpecFunError, Tolerance,
};

/// A candidate transmission design together with its achieved throughput.
///
/// For the single-antenna scenario `phi = alpha = 1`; the multi-antenna
/// optimizers fill in the AN power split.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignPoint {
    /// On-off threshold on the main-channel gain.
    pub mu: f64,
    /// Blocklength in channel uses.
    pub n: usize,
    /// Secrecy rate (bits/s/Hz/channel use).
    pub r_s: f64,
    /// Rate redundancy.
    pub r_e: f64,
    /// Beam-direction power fraction.
    pub phi: f64,
    /// Information fraction within the beam power.
    pub alpha: f64,
    /// Achieved secrecy throughput.
    pub throughput: f64,
}

impl DesignPoint {
    /// Total codeword rate `R_t = R_s + R_e`.
    pub fn r_t(&self) -> f64 {
        self.r_s + self.r_e
    }

    pub(crate) fn silent(mu: f64, n: usize, r_e: f64, phi: f64) -> Self {
        DesignPoint { mu, n, r_s: 0.0, r_e, phi, alpha: 1.0, throughput: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SingleOptError {
    /// This module models a single-antenna transmitter.
    RequiresSingleAntenna { m: usize },
    Leakage(LeakageError),
    Numeric(SpecFunError),
}

impl fmt::Display for SingleOptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingleOptError::RequiresSingleAntenna { m } => {
                write!(f, "single-antenna analysis invoked with M = {m} transmit antennas")
            }
            SingleOptError::Leakage(e) => write!(f, "{e}"),
            SingleOptError::Numeric(e) => write!(f, "numeric failure: {e}"),
        }
    }
}

impl std::error::Error for SingleOptError {}

impl From<LeakageError> for SingleOptError {
    fn from(e: LeakageError) -> Self {
        SingleOptError::Leakage(e)
    }
}

impl From<SpecFunError> for SingleOptError {
    fn from(e: SpecFunError) -> Self {
        SingleOptError::Numeric(e)
    }
}

fn require_single(params: &SystemParams) -> Result<(), SingleOptError> {
    if params.m != 1 {
        return Err(SingleOptError::RequiresSingleAntenna { m: params.m });
    }
    Ok(())
}

/// Successful decoding probability at SNR `gamma_b`, blocklength `n`, and
/// codeword rate `r_t`: `1 - Q((C - R_t) sqrt(n / V))`.
///
/// At `gamma_b = 0` the dispersion vanishes and the probability degenerates
/// to 0 for any positive rate (1 for `r_t = 0`).
pub fn p_success(gamma_b: f64, n: usize, r_t: f64) -> f64 {
    assert!(gamma_b >= 0.0, "gamma_b must be >= 0");
    assert!(r_t >= 0.0, "r_t must be >= 0");
    assert!(n >= 1);
    decode_success(gamma_b, n, r_t)
}

// ---------------------------------------------------------------------------
// Conditional secrecy-rate step (shared with the multi-antenna module)
// ---------------------------------------------------------------------------

/// Derivative of the conditional throughput `R_s * p_s` with respect to the
/// secrecy rate at fixed redundancy:
/// `1 - Q(u) - R_s sqrt(n / (2 pi V)) e^{-u^2/2}` with
/// `u = (C - R_s - R_e) sqrt(n / V)`.
pub fn conditional_rate_gradient(gamma_b: f64, n: usize, r_s: f64, r_e: f64) -> f64 {
    let v = dispersion_raw(gamma_b);
    if v == 0.0 {
        return 0.0;
    }
    let s = (n as f64 / v).sqrt();
    let u = s * (capacity_raw(gamma_b) - r_s - r_e);
    1.0 - q_raw(u) - r_s * s * normal_pdf(u)
}

/// Maximizer of `R_s * p_success(gamma_b, n, R_s + r_e)` over
/// `0 < R_s <= C(gamma_b) - r_e`, assuming `C(gamma_b) > r_e`.
///
/// Boundary rule: the full margin `C - r_e` is optimal iff
/// `C - sqrt(pi V / (2n)) <= r_e`; otherwise the gradient has a unique
/// interior zero found by safeguarded Newton.
pub(crate) fn solve_rs_conditional(gamma_b: f64, n: usize, r_e: f64) -> f64 {
    let c = capacity_raw(gamma_b);
    let v = dispersion_raw(gamma_b);
    let margin = c - r_e;
    debug_assert!(margin > 0.0);
    let nf = n as f64;
    if c - (std::f64::consts::PI * v / (2.0 * nf)).sqrt() <= r_e {
        return margin;
    }
    let s = (nf / v).sqrt();
    let f = |r_s: f64| {
        let u = s * (margin - r_s);
        1.0 - q_raw(u) - r_s * s * normal_pdf(u)
    };
    let df = |r_s: f64| {
        let u = s * (margin - r_s);
        -s * normal_pdf(u) * (2.0 + r_s * s * u)
    };
    let tol = Tolerance { abs_tol: 1e-13, rel_tol: 1e-13, max_iter: 200 };
    find_root_newton(f, df, 0.0, margin, &tol).unwrap_or(margin)
}

// ---------------------------------------------------------------------------
// Adaptive design
// ---------------------------------------------------------------------------

/// The channel-independent part of the adaptive design at blocklength `n`:
/// rate redundancy, on-off threshold, and the SNR below which the full rate
/// margin is optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveSingleDesign {
    pub r_e_star: f64,
    pub mu_star: f64,
    /// SNR boundary of the full-margin region of the rate step.
    pub gamma_b_circ: f64,
    pub n: usize,
}

impl AdaptiveSingleDesign {
    /// Solve the redundancy and threshold at the maximal blocklength.
    pub fn new(params: &SystemParams) -> Result<Self, SingleOptError> {
        Self::at_blocklength(params, params.n_max)
    }

    /// Same, at an explicit blocklength `n <= n_max`.
    pub fn at_blocklength(params: &SystemParams, n: usize) -> Result<Self, SingleOptError> {
        require_single(params)?;
        let r_e_star = invert_redundancy(
            params,
            1.0,
            n,
            params.delta,
            LeakageModel::default_for_antennas(params.m),
        )?;
        let mu_star = (2f64.powf(r_e_star) - 1.0) / params.p_b;
        let gamma_b_circ = gamma_b_circ(r_e_star, n)?;
        Ok(AdaptiveSingleDesign { r_e_star, mu_star, gamma_b_circ, n })
    }

    /// Optimal design conditioned on one realized channel gain.
    pub fn conditional_opt(&self, params: &SystemParams, snapshot: &ChannelSnapshot) -> DesignPoint {
        let eta = snapshot.eta;
        if eta <= self.mu_star {
            return DesignPoint::silent(self.mu_star, self.n, self.r_e_star, 1.0);
        }
        let gamma_b = params.p_b * eta;
        let r_s = if gamma_b <= self.gamma_b_circ {
            capacity_raw(gamma_b) - self.r_e_star
        } else {
            solve_rs_conditional(gamma_b, self.n, self.r_e_star)
        };
        let throughput = r_s * p_success(gamma_b, self.n, r_s + self.r_e_star);
        DesignPoint {
            mu: self.mu_star,
            n: self.n,
            r_s,
            r_e: self.r_e_star,
            phi: 1.0,
            alpha: 1.0,
            throughput,
        }
    }
}

/// SNR at which the rate step switches from the full margin to an interior
/// optimum: the unique root of `C(gamma) - sqrt(pi V(gamma) / (2n)) = r_e`,
/// bracketed between the minimizer of the left side and
/// `e^{sqrt(pi/(2n)) + r_e ln 2} - 1`.
pub fn gamma_b_circ(r_e: f64, n: usize) -> Result<f64, SpecFunError> {
    let nf = n as f64;
    let psi = |gamma: f64| {
        capacity_raw(gamma) - (std::f64::consts::PI * dispersion_raw(gamma) / (2.0 * nf)).sqrt()
    };
    let lo = (0.5 + (0.25 + std::f64::consts::PI / (2.0 * nf)).sqrt()).sqrt() - 1.0;
    let hi = ((std::f64::consts::PI / (2.0 * nf)).sqrt() + r_e * std::f64::consts::LN_2).exp() - 1.0;
    let tol = Tolerance { abs_tol: 1e-13, rel_tol: 1e-13, max_iter: 200 };
    match find_root(|g| psi(g) - r_e, lo, hi, &tol) {
        Ok(root) => Ok(root),
        // The analytic bracket should always hold; fall back to growth if a
        // borderline rounding breaks it.
        Err(SpecFunError::NoSignChange { .. }) => find_root_growing(|g| psi(g) - r_e, lo, hi, &tol),
        Err(e) => Err(e),
    }
}

/// Optimal adaptive design for one channel realization: redundancy from the
/// leakage constraint, on-off threshold `(2^{R_e*} - 1)/P_b`, blocklength
/// `n = N`, and the concave-rate step above.
pub fn adaptive_conditional_opt(
    params: &SystemParams,
    snapshot: &ChannelSnapshot,
) -> Result<DesignPoint, SingleOptError> {
    Ok(AdaptiveSingleDesign::new(params)?.conditional_opt(params, snapshot))
}

/// Closed-form lower bound on the adaptive secrecy rate:
/// `C_b - R_e* - sqrt((2 V_b / n) ln(1/2 + (C_b - R_e*)/sqrt(2 pi V_b / n)))`,
/// clamped at 0. The square-root term is the rate loss due to finite
/// blocklength and vanishes as `n` grows.
pub fn rs_lower_bound(
    params: &SystemParams,
    snapshot: &ChannelSnapshot,
    r_e_star: f64,
    n: usize,
) -> f64 {
    let gamma_b = params.p_b * snapshot.eta;
    let c = capacity_raw(gamma_b);
    let v = dispersion_raw(gamma_b);
    let margin = c - r_e_star;
    if margin <= 0.0 || v == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let arg = 0.5 + margin / (2.0 * std::f64::consts::PI * v / nf).sqrt();
    // arg <= 1 is exactly the full-margin region, where the bound is the
    // margin itself.
    let loss = if arg > 1.0 { (2.0 * v / nf * arg.ln()).sqrt() } else { 0.0 };
    (margin - loss).max(0.0)
}

/// Expected adaptive secrecy throughput: the conditional optimum integrated
/// against the exponential SNR density above the on-off threshold.
pub fn adaptive_expected_throughput(params: &SystemParams) -> Result<f64, SingleOptError> {
    require_single(params)?;
    let design = AdaptiveSingleDesign::new(params)?;
    let gamma_bar = params.gamma_bar_b();
    let lower = params.p_b * design.mu_star;
    let tol = Tolerance { abs_tol: 1e-10, rel_tol: 1e-10, max_iter: 400 };
    let value = integrate(
        |gamma| {
            let snap = ChannelSnapshot { eta: gamma / params.p_b };
            let point = design.conditional_opt(params, &snap);
            point.throughput * (-gamma / gamma_bar).exp() / gamma_bar
        },
        lower,
        f64::INFINITY,
        &tol,
    )?;
    Ok(value)
}

// ---------------------------------------------------------------------------
// Non-adaptive design
// ---------------------------------------------------------------------------

/// Non-adaptive secrecy throughput at a fixed secrecy rate and blocklength,
/// using the piecewise-linear decoding surrogate the design theory is proven
/// for: `T = (R_s / 2) (1 + Y) e^{-theta^2 / Gamma_b}` with
/// `theta^2 = 2^{R_s + R_e*} - 1` and
/// `Y = (2 beta Gamma_b / theta)(1 - e^{-theta/(2 beta Gamma_b)})`.
pub fn nonadaptive_throughput(
    params: &SystemParams,
    r_s: f64,
    n: usize,
) -> Result<f64, SingleOptError> {
    require_single(params)?;
    let r_e_star =
        invert_redundancy(params, 1.0, n, params.delta, LeakageModel::ExactQuadrature)?;
    Ok(nonadaptive_throughput_with_re(params, r_s, n, r_e_star))
}

/// The throughput formula above with the redundancy supplied by the caller.
pub fn nonadaptive_throughput_with_re(
    params: &SystemParams,
    r_s: f64,
    n: usize,
    r_e_star: f64,
) -> f64 {
    assert!(r_s >= 0.0 && r_e_star >= 0.0);
    if r_s == 0.0 {
        return 0.0;
    }
    let gamma_bar = params.gamma_bar_b();
    let theta2 = 2f64.powf(r_s + r_e_star) - 1.0;
    let theta = theta2.sqrt();
    let beta = (n as f64).sqrt() / (2.0 * std::f64::consts::PI);
    let y = y_factor(theta, beta, gamma_bar);
    0.5 * r_s * (1.0 + y) * (-theta2 / gamma_bar).exp()
}

fn y_factor(theta: f64, beta: f64, gamma_bar: f64) -> f64 {
    let x = theta / (2.0 * beta * gamma_bar);
    if x < 1e-8 {
        // (1 - e^-x)/x -> 1.
        return 1.0 - 0.5 * x;
    }
    (1.0 - (-x).exp()) / x
}

/// Exact-Q evaluation of the non-adaptive throughput, for cross-checking the
/// piecewise-linear surrogate: `R_s` times the average successful decoding
/// probability above the on-off threshold.
pub fn nonadaptive_throughput_exact_q(
    params: &SystemParams,
    r_s: f64,
    n: usize,
) -> Result<f64, SingleOptError> {
    require_single(params)?;
    let r_e_star =
        invert_redundancy(params, 1.0, n, params.delta, LeakageModel::ExactQuadrature)?;
    let r_t = r_s + r_e_star;
    let gamma_bar = params.gamma_bar_b();
    let lower = 2f64.powf(r_t) - 1.0;
    let tol = Tolerance { abs_tol: 1e-10, rel_tol: 1e-10, max_iter: 400 };
    let avg = integrate(
        |gamma| decode_success(gamma, n, r_t) * (-gamma / gamma_bar).exp() / gamma_bar,
        lower,
        f64::INFINITY,
        &tol,
    )?;
    Ok(r_s * avg)
}

/// Score function whose unique zero over `theta_b > sqrt(2^{R_e*} - 1)` is
/// the optimal non-adaptive rate parameter; it is positive at the left end,
/// decreasing, and proportional to the throughput derivative in `theta_b`.
pub fn theta_b_optimality(params: &SystemParams, r_e_star: f64, n: usize, theta_b: f64) -> f64 {
    let gamma_bar = params.gamma_bar_b();
    let beta = (n as f64).sqrt() / (2.0 * std::f64::consts::PI);
    let y = y_factor(theta_b, beta, gamma_bar);
    let g = (0.5 / theta_b + 0.25 / (beta * gamma_bar) + theta_b / gamma_bar) * y
        + theta_b / gamma_bar
        - 0.5 / theta_b;
    let r_s = (1.0 + theta_b * theta_b).log2() - r_e_star;
    (1.0 + y) / std::f64::consts::LN_2 - r_s * (1.0 + theta_b * theta_b) / theta_b * g
}

/// Optimal non-adaptive design: redundancy from the leakage constraint at
/// `n = N`, then the unique root of [`theta_b_optimality`] fixes the secrecy
/// rate; the on-off threshold is `theta_b^2 / P_b`.
pub fn nonadaptive_opt(params: &SystemParams) -> Result<DesignPoint, SingleOptError> {
    require_single(params)?;
    let n = params.n_max;
    let r_e_star =
        invert_redundancy(params, 1.0, n, params.delta, LeakageModel::ExactQuadrature)?;
    let theta_lo = (2f64.powf(r_e_star) - 1.0).sqrt().max(1e-9);
    let tol = Tolerance { abs_tol: 1e-12, rel_tol: 1e-12, max_iter: 200 };
    let theta_star = find_root_growing(
        |theta| theta_b_optimality(params, r_e_star, n, theta),
        theta_lo,
        theta_lo + 1.0,
        &tol,
    )?;
    let r_s = (1.0 + theta_star * theta_star).log2() - r_e_star;
    let throughput = nonadaptive_throughput_with_re(params, r_s, n, r_e_star);
    Ok(DesignPoint {
        mu: theta_star * theta_star / params.p_b,
        n,
        r_s,
        r_e: r_e_star,
        phi: 1.0,
        alpha: 1.0,
        throughput,
    })
}

/// Closed-form approximations of the optimal non-adaptive secrecy rate in the
/// large mean-gain regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsApprox {
    /// `log2(e) * W0(Gamma_b 2^{-R_e*})`.
    pub lambert_form: f64,
    /// Log expansion of the same quantity; `NaN` if the inner logarithm is
    /// not yet positive (mean gain too small for the expansion).
    pub expansion_form: f64,
}

/// Both closed-form rate approximations; accurate for large `Gamma_b`.
pub fn nonadaptive_rs_approx(params: &SystemParams) -> Result<RsApprox, SingleOptError> {
    require_single(params)?;
    let n = params.n_max;
    let r_e_star =
        invert_redundancy(params, 1.0, n, params.delta, LeakageModel::ExactQuadrature)?;
    let gamma_bar = params.gamma_bar_b();
    let w_arg = gamma_bar * 2f64.powf(-r_e_star);
    let lambert_form = std::f64::consts::LOG2_E * lambert_w0(w_arg)?;
    let inner = gamma_bar.ln() - r_e_star * std::f64::consts::LN_2;
    let expansion_form = if inner > 0.0 {
        gamma_bar.log2() - r_e_star - inner.log2()
    } else {
        f64::NAN
    };
    Ok(RsApprox { lambert_form, expansion_form })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// fig2-preset-style parameter set: P_b = 0 dB, Gamma_e = 0 dB, delta = 0.2.
    fn params(n_max: usize) -> SystemParams {
        SystemParams::new(1, 1.0, 1.0, 1.0, 1.0, 0.2, n_max).unwrap()
    }

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    #[test]
    fn p_success_edges() {
        let gamma = 2.0;
        let c = capacity_raw(gamma);
        assert!((p_success(gamma, 300, c) - 0.5).abs() < 1e-12);
        assert!(p_success(gamma, 10_000, 0.0) > 1.0 - 1e-6);
        assert_eq!(p_success(0.0, 100, 0.5), 0.0);
        assert_eq!(p_success(0.0, 100, 0.0), 1.0);
    }

    #[test]
    fn p_success_increases_with_blocklength_below_capacity() {
        let gamma = 3.0;
        let r_t = 0.8 * capacity_raw(gamma);
        let mut prev = 0.0;
        for &n in &[50usize, 100, 200, 400, 800] {
            let v = p_success(gamma, n, r_t);
            assert!(v > prev, "n = {n}");
            prev = v;
        }
    }

    #[test]
    fn silent_below_threshold() {
        let p = params(500);
        let design = AdaptiveSingleDesign::new(&p).unwrap();
        let snap = ChannelSnapshot { eta: design.mu_star * 0.9 };
        let point = design.conditional_opt(&p, &snap);
        assert_eq!(point.throughput, 0.0);
        assert_eq!(point.r_s, 0.0);
    }

    #[test]
    fn adaptive_matches_grid_search_oracle() {
        // eta = 9 dB, N = 500 under the fig2 preset parameters.
        let p = params(500);
        let snap = ChannelSnapshot { eta: db(9.0) };
        let point = adaptive_conditional_opt(&p, &snap).unwrap();
        let design = AdaptiveSingleDesign::new(&p).unwrap();
        let gamma_b = p.p_b * snap.eta;
        let margin = capacity_raw(gamma_b) - design.r_e_star;
        let steps = (margin / 1e-4) as usize;
        let mut best = (0.0f64, 0.0f64);
        for i in 1..=steps {
            let r_s = i as f64 * 1e-4;
            let t = r_s * p_success(gamma_b, 500, r_s + design.r_e_star);
            if t > best.1 {
                best = (r_s, t);
            }
        }
        assert!(
            (point.throughput - best.1).abs() < 1e-4,
            "analytic {} vs grid {}",
            point.throughput,
            best.1
        );
        assert!((point.r_s - best.0).abs() < 2e-4);
    }

    #[test]
    fn rate_gradient_matches_finite_difference() {
        let p = params(500);
        let design = AdaptiveSingleDesign::new(&p).unwrap();
        let gamma_b = 4.0;
        for &r_s in &[0.3, 0.8, 1.5] {
            let h = 1e-6;
            let t = |r: f64| r * p_success(gamma_b, 500, r + design.r_e_star);
            let fd = (t(r_s + h) - t(r_s - h)) / (2.0 * h);
            let an = conditional_rate_gradient(gamma_b, 500, r_s, design.r_e_star);
            assert!((fd - an).abs() / an.abs().max(1e-9) < 1e-5, "r_s = {r_s}");
        }
    }

    #[test]
    fn conditional_throughput_concave_in_rate() {
        let p = params(500);
        let design = AdaptiveSingleDesign::new(&p).unwrap();
        for &eta in &[db(3.0), db(6.0), db(9.0)] {
            let gamma_b = p.p_b * eta;
            let margin = capacity_raw(gamma_b) - design.r_e_star;
            let t = |r: f64| r * p_success(gamma_b, 500, r + design.r_e_star);
            let step = margin / 200.0;
            for i in 1..199 {
                let r = i as f64 * step;
                let dd = t(r + step) - 2.0 * t(r) + t(r - step);
                assert!(dd <= 1e-9, "eta = {eta}, r = {r}, dd = {dd}");
            }
        }
    }

    #[test]
    fn rate_bound_holds_and_is_tight_for_large_blocklength() {
        for &n in &[200usize, 500, 1000, 2000] {
            let p = params(n);
            let design = AdaptiveSingleDesign::new(&p).unwrap();
            for &eta_db in &[3.0, 6.0, 9.0, 12.0] {
                let snap = ChannelSnapshot { eta: db(eta_db) };
                let point = design.conditional_opt(&p, &snap);
                let bound = rs_lower_bound(&p, &snap, design.r_e_star, n);
                assert!(
                    point.r_s >= bound - 1e-9,
                    "n = {n}, eta = {eta_db} dB: r_s = {}, bound = {bound}",
                    point.r_s
                );
                if n >= 1000 && point.throughput > 0.0 {
                    let gamma_b = p.p_b * snap.eta;
                    let t_bound = bound * p_success(gamma_b, n, bound + design.r_e_star);
                    assert!(
                        t_bound >= 0.95 * point.throughput,
                        "n = {n}, eta = {eta_db}: bound throughput {t_bound} vs {}",
                        point.throughput
                    );
                }
            }
        }
    }

    #[test]
    fn lower_bound_loss_vanishes_with_blocklength() {
        let p = params(500);
        let design = AdaptiveSingleDesign::new(&p).unwrap();
        let snap = ChannelSnapshot { eta: db(9.0) };
        let gamma_b = p.p_b * snap.eta;
        let margin = capacity_raw(gamma_b) - design.r_e_star;
        let bound = rs_lower_bound(&p, &snap, design.r_e_star, 1_000_000_000);
        assert!((bound - margin).abs() < 1e-3);
    }

    #[test]
    fn adaptive_rate_nondecreasing_in_gain() {
        let p = params(500);
        let design = AdaptiveSingleDesign::new(&p).unwrap();
        let mut prev = -1.0;
        for i in 0..60 {
            let eta = design.mu_star * 1.01 + 0.25 * i as f64;
            let point = design.conditional_opt(&p, &ChannelSnapshot { eta });
            assert!(point.r_s >= prev - 1e-12, "eta = {eta}");
            prev = point.r_s;
        }
    }

    #[test]
    fn expected_throughput_nondecreasing_in_blocklength() {
        let mut prev = 0.0;
        for &n in &[100usize, 200, 500, 1000] {
            let p = params(n);
            let t = adaptive_expected_throughput(&p).unwrap();
            assert!(t >= prev - 1e-10, "n = {n}: {t} < {prev}");
            prev = t;
        }
    }

    #[test]
    fn expected_throughput_trivial_constraint() {
        // delta = 1 removes the secrecy cost entirely: R_e* = 0, mu* = 0.
        let mut p = params(400);
        p.delta = 1.0;
        let design = AdaptiveSingleDesign::new(&p).unwrap();
        assert_eq!(design.r_e_star, 0.0);
        assert_eq!(design.mu_star, 0.0);
        let t = adaptive_expected_throughput(&p).unwrap();
        assert!(t > 0.0);
    }

    #[test]
    fn nonadaptive_throughput_basics() {
        let p = params(500);
        assert_eq!(nonadaptive_throughput_with_re(&p, 0.0, 500, 1.0), 0.0);
        // Increasing in n at fixed R_s.
        let mut prev = 0.0;
        for &n in &[100usize, 200, 500, 1000, 2000] {
            let t = nonadaptive_throughput(&p, 1.0, n).unwrap();
            assert!(t > prev, "n = {n}");
            prev = t;
        }
    }

    #[test]
    fn nonadaptive_opt_residual_and_oracle() {
        // Gamma_b = 3 dB scenario.
        let p = SystemParams::new(1, 1.0, 1.0, db(3.0), 1.0, 0.2, 500).unwrap();
        let point = nonadaptive_opt(&p).unwrap();
        let theta = (2f64.powf(point.r_s + point.r_e) - 1.0).sqrt();
        let g = theta_b_optimality(&p, point.r_e, 500, theta);
        assert!(g.abs() < 1e-8, "residual {g}");
        // 1-D grid over R_s at step 1e-4.
        let mut best = 0.0f64;
        for i in 1..60_000 {
            let r_s = i as f64 * 1e-4;
            let t = nonadaptive_throughput_with_re(&p, r_s, 500, point.r_e);
            if t > best {
                best = t;
            }
        }
        assert!((point.throughput - best).abs() < 1e-4);
        assert!(point.throughput >= best - 1e-9);
    }

    #[test]
    fn nonadaptive_rate_increases_with_mean_gain() {
        let mut prev = 0.0;
        for &s_db in &[0.0, 3.0, 6.0, 9.0] {
            let p = SystemParams::new(1, 1.0, 1.0, db(s_db), 1.0, 0.2, 500).unwrap();
            let point = nonadaptive_opt(&p).unwrap();
            assert!(point.r_s > prev, "sigma_b2 = {s_db} dB");
            prev = point.r_s;
        }
    }

    #[test]
    fn on_off_thresholds_ordered() {
        let p = params(500);
        let design = AdaptiveSingleDesign::new(&p).unwrap();
        for &r_s in &[0.2, 1.0, 2.5] {
            let mu_non = (2f64.powf(r_s + design.r_e_star) - 1.0) / p.p_b;
            assert!(design.mu_star <= mu_non);
        }
    }

    #[test]
    fn rate_approximations_close_at_high_gain() {
        // The two forms converge as the mean gain grows; the residual of the
        // two-term expansion is ln(ln y)/ln y, about 4% at 40 dB and below
        // 2% by 80 dB.
        let mut prev_gap = f64::INFINITY;
        for &s_db in &[40.0, 60.0, 80.0] {
            let p = SystemParams::new(1, 1.0, 1.0, db(s_db), 1.0, 0.2, 500).unwrap();
            let approx = nonadaptive_rs_approx(&p).unwrap();
            let gap = (approx.lambert_form - approx.expansion_form).abs() / approx.lambert_form;
            assert!(gap < prev_gap, "gap not shrinking at {s_db} dB");
            assert!(approx.lambert_form > 0.0);
            prev_gap = gap;
        }
        assert!(prev_gap < 0.02, "gap at 80 dB = {prev_gap}");

        // 20 dB: throughput at the approximate rate within 1% of optimal.
        let p = SystemParams::new(1, 1.0, 1.0, db(20.0), 1.0, 0.2, 500).unwrap();
        let opt = nonadaptive_opt(&p).unwrap();
        let approx = nonadaptive_rs_approx(&p).unwrap();
        let t_approx = nonadaptive_throughput_with_re(&p, approx.lambert_form, 500, opt.r_e);
        assert!(t_approx >= 0.99 * opt.throughput, "{t_approx} vs {}", opt.throughput);
    }

    #[test]
    fn exact_q_mode_agrees_roughly_with_surrogate() {
        let p = SystemParams::new(1, 1.0, 1.0, db(3.0), 1.0, 0.2, 500).unwrap();
        let surrogate = nonadaptive_throughput(&p, 1.0, 500).unwrap();
        let exact = nonadaptive_throughput_exact_q(&p, 1.0, 500).unwrap();
        assert!((surrogate - exact).abs() < 0.02, "surrogate {surrogate}, exact {exact}");
    }

    #[test]
    fn multi_antenna_params_rejected() {
        let p = SystemParams::new(4, 1.0, 1.0, 1.0, 1.0, 0.2, 500).unwrap();
        assert!(matches!(
            adaptive_expected_throughput(&p),
            Err(SingleOptError::RequiresSingleAntenna { m: 4 })
        ));
    }
}
