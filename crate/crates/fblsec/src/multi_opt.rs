//! Secrecy-throughput analysis and maximization for the multi-antenna
//! transmitter with null-space artificial noise, in adaptive and non-adaptive
//! designs, plus the high-SNR closed forms.
//!
//! Putting all beam power on the information symbol (`alpha = 1`) is optimal,
//! so public optimizers fix it and search over the beam/AN split `phi` and
//! the secrecy rate. The conditional throughput is concave in each block:
//! the `phi` step reduces to one derivative root (or a beamforming shortcut
//! at high main-channel SNR), the rate step reuses the single-antenna
//! machinery with effective SNR `phi rho_b` and redundancy `log2 lambda_e`,
//! and the alternating pass produces a nondecreasing throughput trace.

use std::fmt;

use crate::channel::{ChannelSnapshot, SystemParams};
use crate::leakage::{drho_e_dphi, lambda_cap, rho_e, LeakageError};
pub use crate::leakage::leakage_multi_eve;
use crate::single_opt::{p_success, solve_rs_conditional, DesignPoint};
use crate::specfun::{
    capacity_raw, find_root, find_root_growing, integrate, lambert_w0, q_raw,
    reg_upper_gamma_raw, SpecFunError, Tolerance,
};

#[derive(Debug, Clone, PartialEq)]
pub enum MultiOptError {
    /// The AN design needs at least two transmit antennas.
    RequiresMultiAntenna { m: usize },
    Leakage(LeakageError),
    Numeric(SpecFunError),
}

impl fmt::Display for MultiOptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiOptError::RequiresMultiAntenna { m } => {
                write!(f, "AN design requires M >= 2 transmit antennas, got M = {m}")
            }
            MultiOptError::Leakage(e) => write!(f, "{e}"),
            MultiOptError::Numeric(e) => write!(f, "numeric failure: {e}"),
        }
    }
}

impl std::error::Error for MultiOptError {}

impl From<LeakageError> for MultiOptError {
    fn from(e: LeakageError) -> Self {
        MultiOptError::Leakage(e)
    }
}

impl From<SpecFunError> for MultiOptError {
    fn from(e: SpecFunError) -> Self {
        MultiOptError::Numeric(e)
    }
}

fn require_multi(params: &SystemParams) -> Result<(), MultiOptError> {
    if params.m < 2 {
        return Err(MultiOptError::RequiresMultiAntenna { m: params.m });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Conditional throughput pieces
// ---------------------------------------------------------------------------

/// The pair `(lambda_b, lambda_e) = (1 + phi rho_b, 1 + phi rho_e(phi))`:
/// one plus the received SINRs of the legitimate receiver and of the
/// eavesdropper's leakage threshold at full information allocation.
pub fn lambda_pair(
    params: &SystemParams,
    snapshot: &ChannelSnapshot,
    phi: f64,
) -> Result<(f64, f64), MultiOptError> {
    require_multi(params)?;
    let rho_b = params.p_b * snapshot.eta;
    let rho = rho_e(params, phi, params.delta)?;
    Ok((1.0 + phi * rho_b, 1.0 + phi * rho))
}

/// Successful decoding probability written in the lambda variables:
/// `1 - Q(sqrt(n) lambda_b (ln lambda_b - ln lambda_e - R_s ln 2) /
/// sqrt(lambda_b^2 - 1))`.
///
/// Algebraically identical to `p_success(lambda_b - 1, n, R_s + log2 lambda_e)`.
pub fn ps_from_lambdas(lambda_b: f64, lambda_e: f64, r_s: f64, n: usize) -> f64 {
    assert!(lambda_b > 1.0, "lambda_b must exceed 1");
    assert!(lambda_e >= 1.0);
    let num = lambda_b * ((lambda_b / lambda_e).ln() - r_s * std::f64::consts::LN_2);
    let arg = (n as f64).sqrt() * num / (lambda_b * lambda_b - 1.0).sqrt();
    1.0 - q_raw(arg)
}

/// Conditional decoding probability of the AN design at split `phi`.
pub fn ps_multi(
    params: &SystemParams,
    snapshot: &ChannelSnapshot,
    phi: f64,
    r_s: f64,
    n: usize,
) -> Result<f64, MultiOptError> {
    let (lb, le) = lambda_pair(params, snapshot, phi)?;
    Ok(ps_from_lambdas(lb, le, r_s, n))
}

/// The concave objective whose maximizer in `phi` also maximizes the
/// conditional throughput at fixed rate:
/// `lambda_b / sqrt(lambda_b^2 - 1) (ln(lambda_b/lambda_e) - R_s ln 2)`.
pub fn l_function(
    params: &SystemParams,
    snapshot: &ChannelSnapshot,
    phi: f64,
    r_s: f64,
) -> Result<f64, MultiOptError> {
    let (lb, le) = lambda_pair(params, snapshot, phi)?;
    Ok(lb / (lb * lb - 1.0).sqrt() * ((lb / le).ln() - r_s * std::f64::consts::LN_2))
}

/// Analytic derivative of [`l_function`] in `phi`:
/// `((1 - A) lambda_b - 1) / (phi sqrt(lambda_b^2 - 1))
///  - (lambda_b - 1)(ln lambda_b - B) / (phi (lambda_b^2 - 1)^{3/2})`
/// with `A = (phi/lambda_e)(rho_e + phi drho_e/dphi)` and
/// `B = ln lambda_e + R_s ln 2`.
pub fn dl_dphi(
    params: &SystemParams,
    snapshot: &ChannelSnapshot,
    phi: f64,
    r_s: f64,
) -> Result<f64, MultiOptError> {
    require_multi(params)?;
    assert!(phi > 0.0 && phi <= 1.0);
    let rho_b = params.p_b * snapshot.eta;
    let rho = rho_e(params, phi, params.delta)?;
    let drho = drho_e_dphi(params, phi, params.delta)?;
    let lb = 1.0 + phi * rho_b;
    let le = 1.0 + phi * rho;
    let a = phi / le * (rho + phi * drho);
    let b = le.ln() + r_s * std::f64::consts::LN_2;
    let lb2m1 = lb * lb - 1.0;
    Ok(((1.0 - a) * lb - 1.0) / (phi * lb2m1.sqrt())
        - (lb - 1.0) * (lb.ln() - b) / (phi * lb2m1.powf(1.5)))
}

/// Beamforming-boundary score: the sign of the `phi` derivative at `phi = 1`
/// expressed in the main-channel SNR, `X(rho_b) = (1 - A_1)(1 + rho_b) - 1 -
/// (ln(1 + rho_b) - B_1)/(2 + rho_b)`. Increasing in `rho_b` whenever
/// `A_1 < 1`. Finite-noise eavesdropper only.
pub fn x_function(params: &SystemParams, rho_b: f64, r_s: f64) -> Result<f64, MultiOptError> {
    require_multi(params)?;
    let (a1, b1) = a1_b1(params, r_s)?;
    Ok((1.0 - a1) * (1.0 + rho_b) - 1.0 - ((1.0 + rho_b).ln() - b1) / (2.0 + rho_b))
}

/// `A_phi` and `B_phi` at `phi = 1`.
fn a1_b1(params: &SystemParams, r_s: f64) -> Result<(f64, f64), MultiOptError> {
    let rho1 = rho_e(params, 1.0, params.delta)?;
    if !rho1.is_finite() {
        // Worst-case mode: the threshold diverges at phi = 1 and the
        // beamforming shortcut never applies.
        return Ok((f64::INFINITY, f64::INFINITY));
    }
    let drho1 = drho_e_dphi(params, 1.0, params.delta)?;
    let le1 = 1.0 + rho1;
    Ok(((rho1 + drho1) / le1, le1.ln() + r_s * std::f64::consts::LN_2))
}

/// The first positive-going root of [`x_function`], solved with a
/// geometrically grown bracket: the SNR at which the beamforming boundary
/// condition flips on. Returns 0 when `X(0) >= 0` already, and infinity when
/// `A_1 >= 1` (no SNR makes beamforming optimal).
///
/// Diagnostic: in the regime where X dips below zero before rising, SNRs
/// inside the dip fail the boundary condition even above this root, so the
/// optimizer tests the `phi = 1` gradient directly instead.
pub fn rho_b_circ(params: &SystemParams, r_s: f64) -> Result<f64, MultiOptError> {
    require_multi(params)?;
    let (a1, _) = a1_b1(params, r_s)?;
    if a1 >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let f = |rho: f64| x_function(params, rho, r_s).unwrap_or(f64::NAN);
    if f(0.0) >= 0.0 {
        return Ok(0.0);
    }
    let tol = Tolerance { abs_tol: 1e-12, rel_tol: 1e-12, max_iter: 200 };
    Ok(find_root_growing(f, 0.0, 1.0, &tol)?)
}

/// Optimal beam-power fraction at a fixed secrecy rate.
///
/// `phi* = 1` when the main channel is strong enough (boundary condition via
/// [`rho_b_circ`], only reachable with a finite-noise eavesdropper), else the
/// unique zero of [`dl_dphi`] inside the band where a positive rate margin
/// exists. `None` means no split supports the requested rate on this
/// realization (zero-throughput marker).
pub fn adaptive_phi_opt(
    params: &SystemParams,
    snapshot: &ChannelSnapshot,
    r_s: f64,
) -> Result<Option<f64>, MultiOptError> {
    require_multi(params)?;
    assert!(r_s >= 0.0);
    let rho_b = params.p_b * snapshot.eta;
    if rho_b <= 0.0 {
        return Ok(None);
    }
    // Beamforming boundary: by concavity of L, phi = 1 is optimal exactly
    // when the derivative there is still nonnegative. This is the condition
    // the score X(rho_b) encodes, tested directly because X(0) >= 0 does not
    // imply X(rho_b) >= 0 in the regime where X dips before rising.
    if !params.worst_case_eve && dl_dphi(params, snapshot, 1.0, r_s)? >= 0.0 {
        return Ok(Some(1.0));
    }
    // Interior search over the positive-margin band. The derivative of the
    // concave objective decreases in phi, so a grid scan plus bisection on
    // the sign change nails the unique zero.
    let include_one = !params.worst_case_eve;
    let grid_n = 2048usize;
    let grid_phi = |i: usize| -> f64 {
        if include_one && i == grid_n {
            1.0
        } else {
            (i as f64 + 0.5) / (grid_n as f64 + 1.0)
        }
    };
    let top = if include_one { grid_n } else { grid_n - 1 };
    let mut feasible: Vec<usize> = Vec::new();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for i in 0..=top {
        let phi = grid_phi(i);
        let l = l_function(params, snapshot, phi, r_s)?;
        if l > 0.0 {
            feasible.push(i);
            if l > best.0 {
                best = (l, i);
            }
        }
    }
    if feasible.is_empty() {
        return Ok(None);
    }
    let lo_i = *feasible.first().unwrap();
    let hi_i = *feasible.last().unwrap();
    let d_at = |i: usize| dl_dphi(params, snapshot, grid_phi(i), r_s).unwrap_or(f64::NAN);
    if d_at(lo_i) <= 0.0 {
        return Ok(Some(grid_phi(lo_i)));
    }
    if d_at(hi_i) >= 0.0 {
        return Ok(Some(grid_phi(hi_i)));
    }
    // Binary search on the grid for the sign change of the derivative.
    let (mut a, mut b) = (lo_i, hi_i);
    while b - a > 1 {
        let mid = (a + b) / 2;
        if d_at(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let tol = Tolerance { abs_tol: 1e-12, rel_tol: 1e-12, max_iter: 200 };
    let phi_star = find_root(
        |phi| dl_dphi(params, snapshot, phi, r_s).unwrap_or(f64::NAN),
        grid_phi(a),
        grid_phi(b),
        &tol,
    )?;
    Ok(Some(phi_star))
}

// ---------------------------------------------------------------------------
// Alternating optimization
// ---------------------------------------------------------------------------

/// One iterate of the alternating pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoState {
    pub iteration: usize,
    pub phi: f64,
    pub r_s: f64,
    pub throughput: f64,
    pub converged: bool,
}

/// Outcome of [`ao_optimize`]: the best design, the full iterate trace
/// (throughput nondecreasing), and whether the stopping rule was met.
#[derive(Debug, Clone, PartialEq)]
pub struct AoResult {
    pub design: DesignPoint,
    pub trace: Vec<AoState>,
    pub converged: bool,
}

/// Default relative-throughput stopping threshold of the alternating pass.
pub const AO_DEFAULT_EPS: f64 = 1e-10;

/// On-off threshold of the adaptive AN design: `rho_e(0) / P_b`. Below it no
/// power split yields a positive rate margin.
pub fn mu_star_multi(params: &SystemParams) -> Result<f64, MultiOptError> {
    require_multi(params)?;
    Ok(rho_e(params, 0.0, params.delta)? / params.p_b)
}

/// Alternating optimization of `(phi, R_s)` for one channel realization at
/// `n = N`, `alpha = 1`: the `phi` step applies [`adaptive_phi_opt`] at the
/// current rate, the rate step reuses the concave-rate machinery with
/// effective SNR `phi rho_b` and redundancy `log2 lambda_e`, and the loop
/// stops once the relative throughput change drops below `eps`.
pub fn ao_optimize(
    params: &SystemParams,
    snapshot: &ChannelSnapshot,
    eps: f64,
    max_iter: usize,
) -> Result<AoResult, MultiOptError> {
    require_multi(params)?;
    let mu = mu_star_multi(params)?;
    let n = params.n_max;
    if snapshot.eta <= mu {
        let design = DesignPoint::silent(mu, n, f64::NAN, 0.0);
        let trace =
            vec![AoState { iteration: 0, phi: 0.0, r_s: 0.0, throughput: 0.0, converged: true }];
        return Ok(AoResult { design, trace, converged: true });
    }
    let rho_b = params.p_b * snapshot.eta;

    // Initial split: maximize the rate margin ln(lambda_b / lambda_e) on a
    // coarse grid, which is the r_s = 0 instance of the phi objective.
    let mut phi = {
        let mut best = (f64::NEG_INFINITY, 0.5);
        for i in 0..64 {
            let cand = (i as f64 + 0.5) / 64.0;
            let (lb, le) = lambda_pair(params, snapshot, cand)?;
            let margin = (lb / le).ln();
            if margin > best.0 {
                best = (margin, cand);
            }
        }
        best.1
    };
    let rate_step = |phi: f64| -> Result<(f64, f64, f64), MultiOptError> {
        let (lb, le) = lambda_pair(params, snapshot, phi)?;
        let r_e = le.log2();
        let gamma_eff = phi * rho_b;
        debug_assert!((gamma_eff - (lb - 1.0)).abs() < 1e-12);
        if capacity_raw(gamma_eff) <= r_e {
            return Ok((0.0, r_e, 0.0));
        }
        let r_s = solve_rs_conditional(gamma_eff, n, r_e);
        let t = r_s * p_success(gamma_eff, n, r_s + r_e);
        Ok((r_s, r_e, t))
    };

    let (mut r_s, mut r_e, mut t) = rate_step(phi)?;
    let mut trace =
        vec![AoState { iteration: 0, phi, r_s, throughput: t, converged: false }];
    let mut converged = false;
    for k in 1..=max_iter {
        if let Some(next_phi) = adaptive_phi_opt(params, snapshot, r_s)? {
            phi = next_phi;
        }
        let (rs_k, re_k, t_k) = rate_step(phi)?;
        r_s = rs_k;
        r_e = re_k;
        let rel = if t > 0.0 { ((t_k - t) / t).abs() } else { t_k.abs() };
        t = t_k;
        converged = rel < eps;
        trace.push(AoState { iteration: k, phi, r_s, throughput: t, converged });
        if converged {
            break;
        }
    }
    let design = DesignPoint { mu, n, r_s, r_e, phi, alpha: 1.0, throughput: t };
    Ok(AoResult { design, trace, converged })
}

/// Expected adaptive throughput of the AN design: the per-realization
/// alternating optimum integrated against the Gamma(M) density of the
/// main-channel gain.
///
/// The underlying theory optimizes conditionally on each realization; this
/// averaging layer is an extension of it, provided for sweeps and scheme
/// comparisons.
pub fn adaptive_expected_throughput_multi(params: &SystemParams) -> Result<f64, MultiOptError> {
    require_multi(params)?;
    let mu = mu_star_multi(params)?;
    let m = params.m as f64;
    let s2 = params.sigma_b2;
    let log_norm = -ln_factorial(params.m - 1) - m * s2.ln();
    let pdf = |eta: f64| (log_norm + (m - 1.0) * eta.ln() - eta / s2).exp();
    let tol = Tolerance { abs_tol: 1e-8, rel_tol: 1e-8, max_iter: 300 };
    let value = integrate(
        |eta| {
            let ao = ao_optimize(params, &ChannelSnapshot { eta }, AO_DEFAULT_EPS, 50);
            match ao {
                Ok(res) => res.design.throughput * pdf(eta),
                Err(_) => f64::NAN,
            }
        },
        mu,
        f64::INFINITY,
        &tol,
    )?;
    Ok(value)
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

// ---------------------------------------------------------------------------
// Non-adaptive design
// ---------------------------------------------------------------------------

/// Pieces shared by the non-adaptive throughput and its derivatives.
struct NaParts {
    theta: f64,
    theta2: f64,
    beta: f64,
    q_m_rho1: f64,
    q_m_rho2: f64,
    /// `rho1^M e^{-rho1} / (M-1)!`
    peak1: f64,
    delta_gamma: f64,
    /// `phi Gamma_b beta / theta`
    w: f64,
}

fn na_parts(params: &SystemParams, phi: f64, r_s: f64, n: usize, lambda_e: f64) -> NaParts {
    let m = params.m;
    let gamma_b = params.gamma_bar_b();
    let theta2 = 2f64.powf(r_s) * lambda_e - 1.0;
    let theta = theta2.sqrt();
    let beta = (n as f64).sqrt() / (2.0 * std::f64::consts::PI);
    let rho1 = theta2 / (phi * gamma_b);
    let rho2 = rho1 + theta / (2.0 * beta * phi * gamma_b);
    let q_m_rho1 = reg_upper_gamma_raw(m as u32, rho1);
    let q_m_rho2 = reg_upper_gamma_raw(m as u32, rho2);
    let peak1 = ((m as f64) * rho1.ln() - rho1 - ln_factorial(m - 1)).exp();
    let delta_gamma = gamma_tail_sum(m, rho1) - gamma_tail_sum(m, rho2);
    let w = phi * gamma_b * beta / theta;
    NaParts { theta, theta2, beta, q_m_rho1, q_m_rho2, peak1, delta_gamma, w }
}

/// `sum_{k=0}^{M-1} Qbar(k+1, x) = sum_{j=0}^{M-1} (M - j) e^{-x} x^j / j!`.
fn gamma_tail_sum(m: usize, x: f64) -> f64 {
    let ex = (-x).exp();
    if ex == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    let mut sum = m as f64;
    for j in 1..m {
        term *= x / j as f64;
        sum += (m - j) as f64 * term;
    }
    ex * sum
}

/// Non-adaptive AN throughput at fixed `(phi, R_s, n)` with the redundancy
/// implied by the asymptotic leakage constraint:
/// `T = R_s (Qbar(M, rho1)/2 + (phi Gamma_b beta / theta) DeltaGamma)`.
pub fn nonadaptive_throughput_multi(
    params: &SystemParams,
    phi: f64,
    r_s: f64,
    n: usize,
) -> Result<f64, MultiOptError> {
    require_multi(params)?;
    assert!(phi > 0.0 && phi <= 1.0);
    let lambda_e = 1.0 + phi * rho_e(params, phi, params.delta)?;
    Ok(nonadaptive_throughput_multi_with_re(params, phi, r_s, n, lambda_e.log2()))
}

/// The same evaluator with the redundancy supplied directly (also usable at
/// `M = 1`, where it reduces to the single-antenna surrogate formula).
pub fn nonadaptive_throughput_multi_with_re(
    params: &SystemParams,
    phi: f64,
    r_s: f64,
    n: usize,
    r_e: f64,
) -> f64 {
    assert!(r_s >= 0.0 && r_e >= 0.0);
    if r_s == 0.0 {
        return 0.0;
    }
    let parts = na_parts(params, phi, r_s, n, 2f64.powf(r_e));
    r_s * (0.5 * parts.q_m_rho1 + parts.w * parts.delta_gamma)
}

/// Analytic `phi` derivative of the non-adaptive throughput at fixed rate.
pub fn nonadaptive_dt_dphi(
    params: &SystemParams,
    phi: f64,
    r_s: f64,
    n: usize,
) -> Result<f64, MultiOptError> {
    require_multi(params)?;
    assert!(phi > 0.0 && phi <= 1.0);
    let rho = rho_e(params, phi, params.delta)?;
    let drho = drho_e_dphi(params, phi, params.delta)?;
    let lambda_e = 1.0 + phi * rho;
    let dlambda_e = rho + phi * drho;
    let p = na_parts(params, phi, r_s, n, lambda_e);
    let two_rs = 2f64.powf(r_s);
    let w1 = 1.0 / phi - two_rs / p.theta2 * dlambda_e;
    let w2 = 1.0 / phi - two_rs / (2.0 * p.theta2) * dlambda_e;
    Ok(r_s
        * (w1 * p.peak1 / 2.0 + p.w * w2 * p.delta_gamma + p.beta * p.theta * w1 * p.q_m_rho1
            - (p.beta * p.theta * w1 + 0.5 * w2) * p.q_m_rho2))
}

/// Analytic rate derivative of the non-adaptive throughput at fixed `phi`;
/// first positive then negative in `R_s`.
pub fn nonadaptive_dt_drs(
    params: &SystemParams,
    phi: f64,
    r_s: f64,
    n: usize,
) -> Result<f64, MultiOptError> {
    require_multi(params)?;
    let rho = rho_e(params, phi, params.delta)?;
    let lambda_e = 1.0 + phi * rho;
    let p = na_parts(params, phi, r_s, n, lambda_e);
    let d = lambda_e * r_s * 2f64.powf(r_s) * std::f64::consts::LN_2 / p.theta;
    Ok(0.5 * p.q_m_rho1 + p.w * p.delta_gamma
        - d * (p.beta * p.q_m_rho1
            + p.w * p.delta_gamma / (2.0 * p.theta)
            + p.peak1 / (2.0 * p.theta)
            - (p.beta + 0.25 / p.theta) * p.q_m_rho2))
}

/// Optimal non-adaptive secrecy rate at a fixed power split: the unique
/// positive root of [`nonadaptive_dt_drs`], found with a growing bracket.
pub fn nonadaptive_opt_rate(
    params: &SystemParams,
    phi: f64,
    n: usize,
) -> Result<f64, MultiOptError> {
    require_multi(params)?;
    let tol = Tolerance { abs_tol: 1e-12, rel_tol: 1e-12, max_iter: 200 };
    Ok(find_root_growing(
        |r_s| nonadaptive_dt_drs(params, phi, r_s, n).unwrap_or(f64::NAN),
        1e-9,
        1.0,
        &tol,
    )?)
}

/// Outcome of the alternating non-adaptive solve.
#[derive(Debug, Clone, PartialEq)]
pub struct JointOptResult {
    pub design: DesignPoint,
    pub iterations: usize,
    pub converged: bool,
    /// `|dT/dphi|` at the returned point (0 when `phi* = 1`).
    pub dphi_residual: f64,
    /// `|dT/dR_s|` at the returned point.
    pub drs_residual: f64,
}

/// Joint non-adaptive design: alternate the unique-root `phi` solve (its
/// derivative decreases in `phi`; `phi* = 1` if still positive there) with
/// the unique-root rate solve, until the throughput stabilizes.
pub fn nonadaptive_opt_multi(params: &SystemParams) -> Result<JointOptResult, MultiOptError> {
    require_multi(params)?;
    let n = params.n_max;
    let tol = Tolerance { abs_tol: 1e-12, rel_tol: 1e-12, max_iter: 200 };
    let phi_floor = 1e-6;
    let phi_ceil = if params.worst_case_eve { 1.0 - 1e-9 } else { 1.0 };

    let phi_step = |r_s: f64| -> Result<f64, MultiOptError> {
        // Strict positivity: an exact 0.0 here is underflow of every gamma
        // term (throughput numerically 0 at full beam power), not optimality.
        let d_hi = nonadaptive_dt_dphi(params, phi_ceil, r_s, n)?;
        if d_hi > 0.0 {
            return Ok(phi_ceil);
        }
        // The derivative decreases in phi, but at very small phi every gamma
        // term underflows to an exact 0. Scan for the last strictly positive
        // point, then bisect across the sign change.
        let grid = 256usize;
        let phi_at =
            |i: usize| phi_floor + (phi_ceil - phi_floor) * i as f64 / grid as f64;
        let mut last_pos: Option<usize> = None;
        for i in (0..grid).rev() {
            let d = nonadaptive_dt_dphi(params, phi_at(i), r_s, n)?;
            if d > 0.0 {
                last_pos = Some(i);
                break;
            }
        }
        let Some(i) = last_pos else {
            // Optimum below grid resolution; fall back to the throughput
            // argmax over the scan points.
            let mut best = (f64::NEG_INFINITY, phi_floor);
            for i in 0..=grid {
                let t = nonadaptive_throughput_multi(params, phi_at(i), r_s, n)?;
                if t > best.0 {
                    best = (t, phi_at(i));
                }
            }
            return Ok(best.1);
        };
        Ok(find_root(
            |phi| nonadaptive_dt_dphi(params, phi, r_s, n).unwrap_or(f64::NAN),
            phi_at(i),
            if i + 1 < grid { phi_at(i + 1) } else { phi_ceil },
            &tol,
        )?)
    };
    let rate_step = |phi: f64| nonadaptive_opt_rate(params, phi, n);

    let mut phi = 0.5f64.min(phi_ceil);
    let mut r_s = rate_step(phi)?;
    let mut t = nonadaptive_throughput_multi(params, phi, r_s, n)?;
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=200 {
        iterations = k;
        phi = phi_step(r_s)?;
        r_s = rate_step(phi)?;
        let t_k = nonadaptive_throughput_multi(params, phi, r_s, n)?;
        let rel = if t > 0.0 { ((t_k - t) / t).abs() } else { t_k.abs() };
        t = t_k;
        if rel < 1e-12 {
            converged = true;
            break;
        }
    }
    let dphi_residual =
        if phi < phi_ceil { nonadaptive_dt_dphi(params, phi, r_s, n)?.abs() } else { 0.0 };
    let drs_residual = nonadaptive_dt_drs(params, phi, r_s, n)?.abs();
    let lambda_e = 1.0 + phi * rho_e(params, phi, params.delta)?;
    let design = DesignPoint {
        mu: (2f64.powf(r_s) * lambda_e - 1.0) / (phi * params.p_b),
        n,
        r_s,
        r_e: lambda_e.log2(),
        phi,
        alpha: 1.0,
        throughput: t,
    };
    Ok(JointOptResult { design, iterations, converged, dphi_residual, drs_residual })
}

// ---------------------------------------------------------------------------
// High-SNR closed forms
// ---------------------------------------------------------------------------

/// High-mean-gain approximation of the non-adaptive AN design under the
/// worst-case (noise-free) eavesdropper: throughput
/// `R_s (1 - rho1^M / (2 M!))`, independent of the blocklength, with
/// closed-form optima for both variables.
#[derive(Debug, Clone, PartialEq)]
pub struct HighSnrApprox {
    /// Worst-case AN constant `Lambda`.
    pub lambda: f64,
    /// `1 / (sqrt(Lambda) + 1)`.
    pub phi_star: f64,
    /// `(W0(2 e M! Gamma_b^M / (sqrt(Lambda)+1)^{2M}) - 1) / (M ln 2)`.
    pub r_s_star: f64,
    m: usize,
    gamma_bar_b: f64,
}

impl HighSnrApprox {
    /// The approximate throughput surface; note the absence of a blocklength
    /// argument.
    pub fn throughput(&self, phi: f64, r_s: f64) -> f64 {
        assert!(phi > 0.0 && phi < 1.0);
        let lambda_e = 1.0 + phi * self.lambda / (1.0 - phi);
        let rho1 = (2f64.powf(r_s) * lambda_e - 1.0) / (phi * self.gamma_bar_b);
        r_s * (1.0 - rho1.powi(self.m as i32) / (2.0 * factorial(self.m)))
    }
}

/// Closed-form high-SNR design (worst-case eavesdropper model).
pub fn high_snr_approx(params: &SystemParams) -> Result<HighSnrApprox, MultiOptError> {
    require_multi(params)?;
    let m = params.m;
    let lambda = lambda_cap(m, params.delta);
    let phi_star = 1.0 / (lambda.sqrt() + 1.0);
    let gamma_bar_b = params.gamma_bar_b();
    let arg = 2.0 * std::f64::consts::E * factorial(m) * gamma_bar_b.powi(m as i32)
        / (lambda.sqrt() + 1.0).powi(2 * m as i32);
    let r_s_star = (lambert_w0(arg)? - 1.0) / (m as f64 * std::f64::consts::LN_2);
    Ok(HighSnrApprox { lambda, phi_star, r_s_star, m, gamma_bar_b })
}
