//! Scalar special functions and numeric primitives.
//!
//! Everything downstream (fading statistics, leakage integrals, throughput
//! optimizers) is built from the handful of functions in this module: the
//! Gaussian Q-function and its inverse, Shannon capacity and channel
//! dispersion, the principal Lambert W branch, the regularized upper
//! incomplete gamma function for integer shape, adaptive Gauss-Kronrod
//! quadrature, and bracketed root finding.
//!
//! All functions are pure and deterministic; they can be called concurrently
//! from any number of threads.

use std::fmt;

/// Convergence control for iterative routines (root finding, quadrature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Absolute tolerance, must be positive.
    pub abs_tol: f64,
    /// Relative tolerance, must be positive.
    pub rel_tol: f64,
    /// Iteration / refinement budget, at least 1.
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self, SpecFunError> {
        if abs_tol.is_nan() || abs_tol <= 0.0 {
            return Err(SpecFunError::domain("abs_tol", abs_tol, "must be > 0"));
        }
        if rel_tol.is_nan() || rel_tol <= 0.0 {
            return Err(SpecFunError::domain("rel_tol", rel_tol, "must be > 0"));
        }
        if max_iter < 1 {
            return Err(SpecFunError::domain("max_iter", 0.0, "must be >= 1"));
        }
        Ok(Tolerance { abs_tol, rel_tol, max_iter })
    }
}

impl Default for Tolerance {
    /// `abs_tol = rel_tol = 1e-10`, `max_iter = 200`.
    fn default() -> Self {
        Tolerance { abs_tol: 1e-10, rel_tol: 1e-10, max_iter: 200 }
    }
}

/// Errors from the numeric primitives.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFunError {
    /// An argument lies outside the function's domain.
    Domain { arg: &'static str, value: f64, constraint: &'static str },
    /// A root bracket does not change sign; the caller must widen it.
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    /// Iteration budget exhausted; `best` carries the last estimate.
    NoConvergence { best: f64, error_estimate: f64, iters: usize },
}

impl SpecFunError {
    pub(crate) fn domain(arg: &'static str, value: f64, constraint: &'static str) -> Self {
        SpecFunError::Domain { arg, value, constraint }
    }

    /// Last estimate carried by a `NoConvergence` error, if any.
    pub fn best_estimate(&self) -> Option<f64> {
        match self {
            SpecFunError::NoConvergence { best, .. } => Some(*best),
            _ => None,
        }
    }
}

impl fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecFunError::Domain { arg, value, constraint } => {
                write!(f, "domain error: {arg} = {value} ({constraint})")
            }
            SpecFunError::NoSignChange { lo, hi, f_lo, f_hi } => write!(
                f,
                "no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}"
            ),
            SpecFunError::NoConvergence { best, error_estimate, iters } => write!(
                f,
                "no convergence after {iters} iterations (best {best}, error estimate {error_estimate})"
            ),
        }
    }
}

impl std::error::Error for SpecFunError {}

// ---------------------------------------------------------------------------
// Q-function and inverse
// ---------------------------------------------------------------------------

/// Complementary error function, accurate to ~1e-15 relative over the range
/// that matters here (|x| <= 27; underflows to 0 beyond x ~ 27.3).
///
/// Strategy: Maclaurin series of erf for |x| < 2 (largest alternating term is
/// O(1), so at most one decimal digit is lost to cancellation), Legendre
/// continued fraction of the upper incomplete gamma Q(1/2, x^2) for |x| >= 2,
/// where it converges in a few dozen terms.
pub(crate) fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_cf(x)
    }
}

/// erf(x) by its Maclaurin series; callers restrict to 0 <= x < 2.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    // term_n = (-1)^n x^(2n+1) / (n! (2n+1)); build iteratively.
    for n in 1..200 {
        let nf = n as f64;
        term *= -x2 / nf;
        let contrib = term / (2.0 * nf + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs() + 1e-300 {
            break;
        }
    }
    sum * std::f64::consts::FRAC_2_SQRT_PI
}

/// erfc(x) = e^{-x^2}/sqrt(pi) * CF, with the Legendre continued fraction for
/// the upper incomplete gamma function evaluated by the modified Lentz method.
fn erfc_cf(x: f64) -> f64 {
    let z = x * x;
    // Q(1/2, z) continued fraction: b0 = z + 1 - a, a = 1/2.
    let a = 0.5;
    let tiny = 1e-300;
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..300 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    // erfc(x) = Q(1/2, x^2) = e^{-z} z^{1/2} h / Gamma(1/2)
    (-z).exp() * z.sqrt() * h * FRAC_1_SQRT_PI
}

// std lacks 1/sqrt(pi).
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3_f64;

use std::f64::consts::FRAC_1_SQRT_2;

/// Gaussian tail probability Q(x) = P[N(0,1) > x], unchecked.
#[inline]
pub(crate) fn q_raw(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal density.
#[inline]
pub(crate) fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() * FRAC_1_SQRT_PI * FRAC_1_SQRT_2
}

/// Gaussian tail probability `Q(x) = (1/sqrt(2 pi)) \int_x^inf e^{-t^2/2} dt`.
///
/// Strictly decreasing; satisfies `Q(-x) = 1 - Q(x)`.
pub fn q_function(x: f64) -> Result<f64, SpecFunError> {
    if !x.is_finite() {
        return Err(SpecFunError::domain("x", x, "must be finite"));
    }
    Ok(q_raw(x))
}

/// Inverse of [`q_function`] on (0, 1).
///
/// A rational approximation seeds the estimate, which is then polished with a
/// few Newton steps on Q itself; the result round-trips through `q_function`
/// to better than 1e-13 in the argument.
pub fn q_inverse(p: f64) -> Result<f64, SpecFunError> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(SpecFunError::domain("p", p, "must lie in (0, 1)"));
    }
    let mut x = q_inverse_guess(p);
    // Newton on f(x) = Q(x) - p, f'(x) = -phi(x).
    for _ in 0..4 {
        let f = q_raw(x) - p;
        let d = normal_pdf(x);
        if d <= 0.0 {
            break;
        }
        let step = f / d;
        x += step;
        if step.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(x)
}

/// Acklam-style rational initial guess for the inverse normal CDF, |err| < 2e-9.
fn q_inverse_guess(p: f64) -> f64 {
    // Invert the lower-tail CDF at 1 - p, i.e. return x with Phi(x) = 1 - p.
    let pl = 1.0 - p;
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if pl < P_LOW {
        let q = (-2.0 * pl.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if pl <= 1.0 - P_LOW {
        let q = pl - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - pl).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}

// ---------------------------------------------------------------------------
// Capacity and dispersion
// ---------------------------------------------------------------------------

#[inline]
pub(crate) fn capacity_raw(gamma: f64) -> f64 {
    gamma.ln_1p() * std::f64::consts::LOG2_E
}

#[inline]
pub(crate) fn dispersion_raw(gamma: f64) -> f64 {
    // 1 - (1+g)^-2 written as g(g+2)/(1+g)^2 to stay exact for small g.
    let one_plus = 1.0 + gamma;
    let frac = gamma * (gamma + 2.0) / (one_plus * one_plus);
    frac * std::f64::consts::LOG2_E * std::f64::consts::LOG2_E
}

/// Shannon capacity `log2(1 + gamma)` in bits per channel use.
pub fn capacity(gamma: f64) -> Result<f64, SpecFunError> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(SpecFunError::domain("gamma", gamma, "must be >= 0"));
    }
    Ok(capacity_raw(gamma))
}

/// Channel dispersion `(1 - (1 + gamma)^-2) log2^2(e)`.
///
/// Nondecreasing in `gamma`, with values in `[0, log2^2 e)`.
pub fn dispersion(gamma: f64) -> Result<f64, SpecFunError> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(SpecFunError::domain("gamma", gamma, "must be >= 0"));
    }
    Ok(dispersion_raw(gamma))
}

// ---------------------------------------------------------------------------
// Lambert W, principal branch
// ---------------------------------------------------------------------------

/// Principal branch of the Lambert W function: the `w >= -1` solving
/// `w e^w = x`, defined for `x >= -1/e`.
///
/// Halley iteration from a branch-point, linear, or log-based initial guess;
/// converges to full double precision in a handful of steps.
pub fn lambert_w0(x: f64) -> Result<f64, SpecFunError> {
    let neg_inv_e = -(-1.0_f64).exp();
    if !x.is_finite() || x < neg_inv_e - 1e-15 {
        return Err(SpecFunError::domain("x", x, "must be >= -1/e"));
    }
    let x = x.max(neg_inv_e);
    if x == neg_inv_e {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < 0.0 {
        // Series around the branch point in p = sqrt(2 (e x + 1)).
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x <= std::f64::consts::E {
        x.ln_1p()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        // Halley step for f(w) = w e^w - x.
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-16 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
// Regularized upper incomplete gamma, integer shape
// ---------------------------------------------------------------------------

/// Regularized upper incomplete gamma function at integer shape `m >= 1`:
/// the finite sum `e^{-x} sum_{k=0}^{m-1} x^k / k!`.
///
/// Decreasing in `x`; equals `e^{-x}` for `m = 1` and 1 at `x = 0`.
pub fn reg_upper_gamma(m: u32, x: f64) -> Result<f64, SpecFunError> {
    if m < 1 {
        return Err(SpecFunError::domain("m", m as f64, "must be >= 1"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(SpecFunError::domain("x", x, "must be >= 0"));
    }
    Ok(reg_upper_gamma_raw(m, x))
}

pub(crate) fn reg_upper_gamma_raw(m: u32, x: f64) -> f64 {
    let ex = (-x).exp();
    if ex == 0.0 {
        // Underflow: for x >> m the tail probability is far below 1e-300.
        return 0.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..m {
        term *= x / k as f64;
        sum += term;
    }
    (ex * sum).min(1.0)
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule, on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 15(7) panel: returns (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let fc = f(center);
    let mut result_gauss = fc * WG[3];
    let mut result_kronrod = fc * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        result_kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let integral = result_kronrod * half;
    let err = ((result_kronrod - result_gauss) * half).abs();
    (integral, err)
}

/// Adaptive quadrature of `f` over `[a, b]`; `b` may be `f64::INFINITY`.
///
/// Semi-infinite ranges are mapped to [0, 1) by `t = a + u/(1-u)`, which
/// suits the exponentially decaying integrands used throughout this crate.
/// Panels are split worst-error-first until the summed error estimate drops
/// below `max(abs_tol, rel_tol * |I|)`; exceeding `max_iter` splits yields a
/// `NoConvergence` error carrying the best estimate.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<f64, SpecFunError> {
    if !a.is_finite() {
        return Err(SpecFunError::domain("a", a, "must be finite"));
    }
    if b.is_nan() {
        return Err(SpecFunError::domain("b", b, "must not be NaN"));
    }
    if b.is_infinite() {
        let g = move |u: f64| {
            let om = 1.0 - u;
            let t = a + u / om;
            f(t) / (om * om)
        };
        return integrate_finite(&g, 0.0, 1.0, tol);
    }
    integrate_finite(&f, a, b, tol)
}

fn integrate_finite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<f64, SpecFunError> {
    if a == b {
        return Ok(0.0);
    }
    // Initial split into a few panels helps when the integrand is
    // concentrated in a small part of the range.
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let init = 8;
    for i in 0..init {
        let lo = a + (b - a) * i as f64 / init as f64;
        let hi = a + (b - a) * (i + 1) as f64 / init as f64;
        let (int, err) = gk15(f, lo, hi);
        panels.push((lo, hi, int, err));
    }
    for _ in 0..tol.max_iter {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err_total: f64 = panels.iter().map(|p| p.3).sum();
        let target = tol.abs_tol.max(tol.rel_tol * total.abs());
        if err_total <= target {
            return Ok(total);
        }
        // Split the worst panel.
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Panel width at machine precision; accept its estimate as is.
            let (int, _) = gk15(f, lo, hi);
            panels.push((lo, hi, int, 0.0));
            continue;
        }
        let (i1, e1) = gk15(f, lo, mid);
        let (i2, e2) = gk15(f, mid, hi);
        panels.push((lo, mid, i1, e1));
        panels.push((mid, hi, i2, e2));
    }
    let total: f64 = panels.iter().map(|p| p.2).sum();
    let err_total: f64 = panels.iter().map(|p| p.3).sum();
    Err(SpecFunError::NoConvergence { best: total, error_estimate: err_total, iters: tol.max_iter })
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Bisection on a bracket `[lo, hi]` with `f(lo) * f(hi) <= 0`.
///
/// Deterministic; stops when the bracket width falls below
/// `max(abs_tol, rel_tol * |mid|)` or an exact zero is hit.
pub fn find_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<f64, SpecFunError> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() * f_hi.signum() > 0.0 {
        return Err(SpecFunError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    for _ in 0..tol.max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol.abs_tol.max(tol.rel_tol * mid.abs()) {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton iteration safeguarded by a sign-change bracket: steps that leave the
/// bracket, or stall, fall back to bisection. Used for the stationarity
/// conditions whose analytic derivatives are available.
pub fn find_root_newton<F, D>(
    f: F,
    df: D,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<f64, SpecFunError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() * f_hi.signum() > 0.0 {
        return Err(SpecFunError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..tol.max_iter {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        if hi - lo <= tol.abs_tol.max(tol.rel_tol * x.abs()) {
            return Ok(0.5 * (lo + hi));
        }
        let dfx = df(x);
        let newton = if dfx != 0.0 { x - fx / dfx } else { f64::NAN };
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(0.5 * (lo + hi))
}

/// Grow `hi` geometrically (doubling) until `f` changes sign on `[lo, hi]`,
/// then bisect. `f(lo)` fixes the reference sign.
pub fn find_root_growing<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi0: f64,
    tol: &Tolerance,
) -> Result<f64, SpecFunError> {
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let mut hi = hi0.max(lo + tol.abs_tol);
    for _ in 0..200 {
        let f_hi = f(hi);
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo.signum() * f_hi.signum() < 0.0 {
            return find_root(f, lo, hi, tol);
        }
        hi = lo + (hi - lo) * 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    Err(SpecFunError::NoSignChange { lo, hi, f_lo, f_hi: f(hi) })
}
