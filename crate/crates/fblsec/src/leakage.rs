//! Information-leakage probability and its inversion to the optimal rate
//! redundancy.
//!
//! The leakage probability is the expected complement of the eavesdropper's
//! decoding error at the redundancy rate: the chance that a finite-blocklength
//! wiretap codeword gives up its bin. Three evaluation models are provided:
//!
//! - **ExactQuadrature** integrates the Gaussian-approximation error
//!   probability against the eavesdropper's fading density.
//! - **PiecewiseLinear** replaces the Q-function with a piecewise-linear ramp,
//!   turning the expectation into a short finite integral of the fading CDF.
//! - **Asymptotic** is the large-blocklength tail form available for the
//!   multi-antenna AN transmitter; it is a pure function of the SINR
//!   threshold and drives all closed-form design results.
//!
//! Default model per scenario: ExactQuadrature for a single-antenna
//! transmitter, Asymptotic for the multi-antenna design paths, with
//! PiecewiseLinear retained for cross-model validation.

use std::fmt;

use crate::channel::{an_xi, cdf_gamma_e, cdf_gamma_e_multi, pdf_gamma_e, SystemParams};
use crate::specfun::{
    capacity_raw, dispersion_raw, find_root_growing, integrate, q_raw, SpecFunError, Tolerance,
};

/// Selector among the three leakage evaluation models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeakageModel {
    ExactQuadrature,
    PiecewiseLinear,
    /// Valid only for the multi-antenna (`M >= 2`) AN scenario.
    Asymptotic,
}

impl LeakageModel {
    /// The model each design path uses by default.
    pub fn default_for_antennas(m: usize) -> Self {
        if m >= 2 {
            LeakageModel::Asymptotic
        } else {
            LeakageModel::ExactQuadrature
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LeakageError {
    /// `delta = 0` cannot be met: leakage is strictly positive at any finite
    /// redundancy rate.
    InfeasibleDelta { delta: f64 },
    /// The piecewise-linear model needs `R_e > log2(1 + pi^2 / n)` so that
    /// its lower integration limit stays positive.
    PiecewiseBlocklength { r_e: f64, n: usize, bound: f64 },
    /// The asymptotic model and the AN threshold machinery require `M >= 2`;
    /// use `ExactQuadrature` for a single-antenna transmitter.
    NeedsMultiAntenna { m: usize },
    Numeric(SpecFunError),
}

impl fmt::Display for LeakageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeakageError::InfeasibleDelta { delta } => {
                write!(f, "leakage threshold delta = {delta} is infeasible: leakage is strictly positive for every finite redundancy rate")
            }
            LeakageError::PiecewiseBlocklength { r_e, n, bound } => write!(
                f,
                "piecewise-linear model needs R_e > log2(1 + pi^2/n) = {bound} for n = {n}, got R_e = {r_e}"
            ),
            LeakageError::NeedsMultiAntenna { m } => write!(
                f,
                "model requires a multi-antenna transmitter (M >= 2), got M = {m}; use ExactQuadrature"
            ),
            LeakageError::Numeric(e) => write!(f, "numeric failure: {e}"),
        }
    }
}

impl std::error::Error for LeakageError {}

impl From<SpecFunError> for LeakageError {
    fn from(e: SpecFunError) -> Self {
        LeakageError::Numeric(e)
    }
}

fn quad_tol() -> Tolerance {
    Tolerance { abs_tol: 1e-11, rel_tol: 1e-11, max_iter: 400 }
}

/// Complement of the decoding error probability at SNR `gamma`, blocklength
/// `n`, and rate `r`: the probability the receiver decodes successfully.
pub(crate) fn decode_success(gamma: f64, n: usize, r: f64) -> f64 {
    let v = dispersion_raw(gamma);
    if v == 0.0 {
        return if r > 0.0 { 0.0 } else { 1.0 };
    }
    // 1 - Q((C - r) sqrt(n/V)) evaluated as Q((r - C) sqrt(n/V)) so tiny
    // values keep full relative precision.
    q_raw((r - capacity_raw(gamma)) * (n as f64 / v).sqrt())
}

/// Exact-quadrature leakage: expectation of the eavesdropper's successful
/// decoding probability at rate `r_e` over its fading density.
///
/// Lies in [0, 1] and decreases in `r_e` and in `n`.
pub fn leakage_exact(
    params: &SystemParams,
    phi: f64,
    n: usize,
    r_e: f64,
) -> Result<f64, LeakageError> {
    assert!(n >= 1, "n must be >= 1");
    assert!(r_e >= 0.0, "r_e must be >= 0");
    let tol = quad_tol();
    let value = integrate(
        |gamma| decode_success(gamma, n, r_e) * pdf_gamma_e(params, phi, gamma),
        0.0,
        f64::INFINITY,
        &tol,
    )?;
    Ok(value.clamp(0.0, 1.0))
}

/// Interval and slope of the piecewise-linear Q-function surrogate at rate
/// `r`: returns `(theta, beta, tau_lo, tau_hi)`.
pub(crate) fn ramp_interval(n: usize, r: f64) -> (f64, f64, f64, f64) {
    let theta = (2f64.powf(r) - 1.0).sqrt();
    let beta = (n as f64).sqrt() / (2.0 * std::f64::consts::PI);
    let half = theta / (2.0 * beta);
    (theta, beta, theta * theta - half, theta * theta + half)
}

/// Piecewise-linear leakage: `1 - (beta/theta_e) * integral of the fading CDF
/// over the ramp interval`.
///
/// Requires `r_e > log2(1 + pi^2/n)` so the interval stays positive.
pub fn leakage_piecewise(
    params: &SystemParams,
    phi: f64,
    n: usize,
    r_e: f64,
) -> Result<f64, LeakageError> {
    leakage_piecewise_of(n, r_e, |gamma| cdf_gamma_e(params, phi, gamma))
}

/// Piecewise-linear leakage against the multi-antenna eavesdropper's MMSE
/// SINR law; supports the vanishing-noise diagnostic (`p_e` huge).
pub fn leakage_multi_eve(
    params: &SystemParams,
    phi: f64,
    n: usize,
    r_e: f64,
) -> Result<f64, LeakageError> {
    leakage_piecewise_of(n, r_e, |gamma| cdf_gamma_e_multi(params, phi, gamma))
}

fn leakage_piecewise_of<F: Fn(f64) -> f64>(
    n: usize,
    r_e: f64,
    cdf: F,
) -> Result<f64, LeakageError> {
    assert!(n >= 1, "n must be >= 1");
    let (theta, beta, tau_lo, tau_hi) = ramp_interval(n, r_e);
    if tau_lo <= 0.0 {
        let bound = (1.0 + std::f64::consts::PI.powi(2) / n as f64).log2();
        return Err(LeakageError::PiecewiseBlocklength { r_e, n, bound });
    }
    let tol = quad_tol();
    let integral = integrate(&cdf, tau_lo, tau_hi, &tol)?;
    Ok((1.0 - beta / theta * integral).clamp(0.0, 1.0))
}

/// Asymptotic leakage for the AN transmitter as a function of the SINR
/// threshold: `e^{-Phi_e/(phi Gamma_e)} (1 + xi Phi_e)^{1-M}`, the survival
/// function of the eavesdropper's SINR. In worst-case-eavesdropper mode the
/// exponential factor is dropped (`Gamma_e -> infinity`).
pub fn leakage_asymptotic(
    params: &SystemParams,
    phi: f64,
    phi_e: f64,
) -> Result<f64, LeakageError> {
    if params.m < 2 {
        return Err(LeakageError::NeedsMultiAntenna { m: params.m });
    }
    assert!(phi > 0.0 && phi <= 1.0, "phi must lie in (0, 1]");
    assert!(phi_e >= 0.0, "phi_e must be >= 0");
    let xi = an_xi(params.m, phi);
    let an_term = (1.0 + xi * phi_e).powi(1 - params.m as i32);
    if params.worst_case_eve {
        return Ok(an_term);
    }
    Ok((-phi_e / (phi * params.gamma_bar_e())).exp() * an_term)
}

/// Leakage at redundancy rate `r_e` under the chosen model (the asymptotic
/// model maps `r_e` to its SINR threshold `2^{r_e} - 1`).
pub fn leakage(
    params: &SystemParams,
    phi: f64,
    n: usize,
    r_e: f64,
    model: LeakageModel,
) -> Result<f64, LeakageError> {
    match model {
        LeakageModel::ExactQuadrature => leakage_exact(params, phi, n, r_e),
        LeakageModel::PiecewiseLinear => leakage_piecewise(params, phi, n, r_e),
        LeakageModel::Asymptotic => leakage_asymptotic(params, phi, 2f64.powf(r_e) - 1.0),
    }
}

/// Optimal rate redundancy: the smallest `R_e` meeting the leakage
/// constraint, i.e. the inverse of the leakage curve at `delta`.
///
/// `delta = 1` makes the constraint vacuous and returns 0. `delta = 0` is
/// infeasible. Root finding uses a bracket grown geometrically from `[~0, 1]`.
pub fn invert_redundancy(
    params: &SystemParams,
    phi: f64,
    n: usize,
    delta: f64,
    model: LeakageModel,
) -> Result<f64, LeakageError> {
    if delta <= 0.0 {
        return Err(LeakageError::InfeasibleDelta { delta });
    }
    if delta >= 1.0 {
        return Ok(0.0);
    }
    let tol = Tolerance { abs_tol: 1e-12, rel_tol: 1e-12, max_iter: 200 };
    match model {
        LeakageModel::Asymptotic => {
            let phi_e = sinr_threshold(params, phi, delta)?;
            Ok((1.0 + phi_e).log2())
        }
        LeakageModel::ExactQuadrature => {
            if leakage_exact(params, phi, n, 0.0)? <= delta {
                return Ok(0.0);
            }
            let f = |re: f64| leakage_exact(params, phi, n, re).unwrap_or(f64::NAN) - delta;
            Ok(find_root_growing(f, 0.0, 1.0, &tol)?)
        }
        LeakageModel::PiecewiseLinear => {
            let lo = (1.0 + std::f64::consts::PI.powi(2) / n as f64).log2() * (1.0 + 1e-9);
            if leakage_piecewise(params, phi, n, lo)? <= delta {
                // The true inverse lies below the model's domain.
                return Err(LeakageError::PiecewiseBlocklength { r_e: lo, n, bound: lo });
            }
            let f = |re: f64| leakage_piecewise(params, phi, n, re).unwrap_or(f64::NAN) - delta;
            Ok(find_root_growing(f, lo, 1.0, &tol)?)
        }
    }
}

/// The SINR threshold solving the asymptotic leakage constraint
/// `leakage_asymptotic(Phi_e) = delta` at allocation `phi`.
fn sinr_threshold(params: &SystemParams, phi: f64, delta: f64) -> Result<f64, LeakageError> {
    Ok(phi * rho_e(params, phi, delta)?)
}

/// Worst-case AN constant `Lambda = (M - 1)(delta^{1/(1-M)} - 1)`.
pub fn lambda_cap(m: usize, delta: f64) -> f64 {
    assert!(m >= 2, "Lambda is defined for M >= 2");
    assert!(delta > 0.0 && delta <= 1.0);
    let mf = m as f64;
    (mf - 1.0) * (delta.powf(1.0 / (1.0 - mf)) - 1.0)
}

/// Normalized SINR threshold `rho_e(phi) = Phi_e(phi)/phi`: the unique
/// `rho > 0` with `e^{-rho/Gamma_e} (1 + (1-phi) rho / (M-1))^{1-M} = delta`.
///
/// This form stays valid at `phi = 0`. In worst-case-eavesdropper mode the
/// closed form `Lambda / (1 - phi)` is used, which is infinite at `phi = 1`.
/// Increasing in `phi`.
pub fn rho_e(params: &SystemParams, phi: f64, delta: f64) -> Result<f64, LeakageError> {
    if params.m < 2 {
        return Err(LeakageError::NeedsMultiAntenna { m: params.m });
    }
    if delta <= 0.0 {
        return Err(LeakageError::InfeasibleDelta { delta });
    }
    assert!((0.0..=1.0).contains(&phi), "phi must lie in [0, 1]");
    if delta >= 1.0 {
        return Ok(0.0);
    }
    if params.worst_case_eve {
        let lambda = lambda_cap(params.m, delta);
        return Ok(if phi >= 1.0 { f64::INFINITY } else { lambda / (1.0 - phi) });
    }
    let gamma_e = params.gamma_bar_e();
    let m1 = params.m as f64 - 1.0;
    let ln_delta = delta.ln();
    let f = |rho: f64| {
        -rho / gamma_e + (1.0 - params.m as f64) * (1.0 + (1.0 - phi) * rho / m1).ln() - ln_delta
    };
    let tol = Tolerance { abs_tol: 1e-13, rel_tol: 1e-13, max_iter: 200 };
    Ok(find_root_growing(f, 0.0, gamma_e.max(1.0), &tol)?)
}

/// Closed-form derivative of [`rho_e`] with respect to `phi`:
/// `rho_e / ((1 + phi rho_e xi)/Gamma_e + 1 - phi)`, positive everywhere.
pub fn drho_e_dphi(params: &SystemParams, phi: f64, delta: f64) -> Result<f64, LeakageError> {
    if params.worst_case_eve {
        let lambda = lambda_cap(params.m, delta);
        let om = 1.0 - phi;
        return Ok(lambda / (om * om));
    }
    let rho = rho_e(params, phi, delta)?;
    // phi * rho * xi = rho (1 - phi) / (M - 1), finite at phi = 0 as well.
    let m1 = params.m as f64 - 1.0;
    let cross = rho * (1.0 - phi) / m1;
    Ok(rho / ((1.0 + cross) / params.gamma_bar_e() + 1.0 - phi))
}
