//! Closed-form quantities the Monte Carlo estimates are validated
//! against: outage-exponent scalings, distance laws, the link-power tail
//! law with its exact finite-x quadrature oracle, the truncated
//! shot-noise exponent band, and the Campbell-formula mean.

use alloc::string::String;
use alloc::vec::Vec;

use libm::{exp, log, pow, sqrt, tgamma};

use crate::error::Error;
use crate::netmodel::{SidelobeMode, SimParams};
use crate::stats::ols;
use crate::Result;

const PI: f64 = core::f64::consts::PI;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Asymptotic exponent of the outage probability for a mobile at a
/// cluster center: `(pi/(2*sqrt(3))) * (d1/(d*theta))^(2/alpha) *
/// (2 - sqrt(nu))^2 * K`.
pub fn exponent_center(params: &SimParams, k: f64) -> f64 {
    let s = pow(params.delta1 / (params.delta * params.theta), 2.0 / params.alpha);
    PI / (2.0 * SQRT3) * s * (2.0 - sqrt(params.nu)) * (2.0 - sqrt(params.nu)) * k
}

/// Scaling regime of the typical-mobile exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentRegime {
    Exponential,
    /// `nu = 1`: the outage probability no longer decays exponentially
    /// in K (power-law regime); bounds are reported as zero.
    NonExponential,
}

/// Lower/upper asymptotic exponent bounds for the typical mobile.
#[derive(Debug, Clone, Copy)]
pub struct TypicalExponentBounds {
    /// `N / (1 + 4x)^2` with `N = (2*pi/sqrt(3)) * (d1/(d*theta))^(2/alpha)
    /// * (1 - sqrt(nu))^2 * K` and `x = (d1/(d*theta))^(1/alpha)`.
    pub lo: f64,
    /// `N`.
    pub hi: f64,
    /// The tighter `N / (1 + 2x)^2` that follows from the lower-bound
    /// lemma with the apothem convention; reported alongside, not in
    /// place of, the stated constant.
    pub lo_alt: f64,
    pub regime: ExponentRegime,
}

/// Asymptotic exponent bounds of the typical mobile's outage probability.
pub fn exponent_typical_bounds(params: &SimParams, k: f64) -> TypicalExponentBounds {
    if params.nu >= 1.0 {
        return TypicalExponentBounds {
            lo: 0.0,
            hi: 0.0,
            lo_alt: 0.0,
            regime: ExponentRegime::NonExponential,
        };
    }
    let ratio = params.delta1 / (params.delta * params.theta);
    let s = pow(ratio, 2.0 / params.alpha);
    let x = pow(ratio, 1.0 / params.alpha);
    let n = 2.0 * PI / SQRT3 * s * (1.0 - sqrt(params.nu)) * (1.0 - sqrt(params.nu)) * k;
    TypicalExponentBounds {
        lo: n / ((1.0 + 4.0 * x) * (1.0 + 4.0 * x)),
        hi: n,
        lo_alt: n / ((1.0 + 2.0 * x) * (1.0 + 2.0 * x)),
        regime: ExponentRegime::Exponential,
    }
}

/// Asymptotic tail exponent of the generic link power:
/// `-log Pr(PG > x) ~ pi*lambda*(d1/d)^(2/alpha) * x^(2/alpha)`.
pub fn lemma1_exponent(params: &SimParams, x: f64) -> f64 {
    PI * params.lambda
        * pow(params.delta1 / params.delta, 2.0 / params.alpha)
        * pow(x, 2.0 / params.alpha)
}

/// Exact finite-x law of the link-power tail:
/// `Pr(PG > x) = E[exp(-pi*lambda*(beta*x)^(2/alpha))]` with
/// `beta = W/G`, evaluated by adaptive quadrature over the configured
/// `W` and `G` laws (absolute tolerance 1e-10). Independent of any
/// Monte Carlo path.
pub fn lemma1_oracle(params: &SimParams, x: f64) -> Result<f64> {
    Ok(exp(-lemma1_oracle_exponent(params, x)?))
}

/// `-log` of [`lemma1_oracle`], computed in the log domain so it stays
/// finite even where the probability itself underflows f64.
pub fn lemma1_oracle_exponent(params: &SimParams, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(alloc::format!("x must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let gamma = 2.0 / params.alpha;
    let pl = PI * params.lambda;
    // Factor out the minimal exponent over the (W, G) support so the
    // shifted kernel lives in (0, 1] and the expectation never
    // underflows; G is at most `delta` in both side-lobe modes.
    let m = pl * pow(params.delta1 / params.delta * x, gamma);
    let kernel = |w: f64, g: f64| exp(m - pl * pow(w / g * x, gamma));
    const TOL: f64 = 1e-10;

    let inner = |g: f64| -> Result<f64> {
        if params.delta1 == params.delta2 {
            Ok(kernel(params.delta1, g))
        } else {
            let v = adaptive_simpson(&|w| kernel(w, g), params.delta1, params.delta2, TOL)?;
            Ok(v / (params.delta2 - params.delta1))
        }
    };
    let shifted = match params.sidelobe_mode {
        SidelobeMode::Constant => inner(params.delta)?,
        SidelobeMode::Uniform => {
            // Inner integral is itself smooth in g; a nested quadrature
            // at the same tolerance keeps the total error ~1e-10.
            let lo = params.delta / 2.0;
            let hi = params.delta;
            let v = adaptive_simpson(&|g| inner(g).unwrap_or(f64::NAN), lo, hi, TOL)?;
            if v.is_nan() {
                return Err(Error::Quadrature(String::from("inner quadrature failed")));
            }
            v / (hi - lo)
        }
    };
    Ok(m - log(shifted))
}

/// Asymptotic lower/upper exponent band of the truncated shot noise:
/// `(c*r^2*x^(2/alpha), 2^alpha * c*r^2*x^(2/alpha))` with
/// `c = pi*lambda*(d1/d)^(2/alpha)`.
pub fn corollary1_band(params: &SimParams, r: f64, x: f64) -> (f64, f64) {
    let c = PI * params.lambda * pow(params.delta1 / params.delta, 2.0 / params.alpha);
    let lo = c * r * r * pow(x, 2.0 / params.alpha);
    (lo, pow(2.0, params.alpha) * lo)
}

/// Nearest-BS distance CCDF: `Pr(L >= tau) = exp(-pi*lambda*tau^2)`.
pub fn nearest_distance_ccdf(lambda: f64, tau: f64) -> f64 {
    exp(-PI * lambda * tau * tau)
}

/// Boundary-distance CCDF of a uniform point in the interior hexagon:
/// `Pr(D >= d) = (1 - d/(sqrt(nu)*rho))^2` for `0 <= d <= sqrt(nu)*rho`.
pub fn boundary_distance_ccdf(nu: f64, rho: f64, d: f64) -> Result<f64> {
    let a = sqrt(nu) * rho;
    if !(0.0..=a).contains(&d) {
        return Err(Error::Domain(alloc::format!("d = {d} outside [0, {a}]")));
    }
    let t = 1.0 - d / a;
    Ok(t * t)
}

/// Mean of the truncated shot noise on the annulus `[r, r_out]` by
/// Campbell's formula: `lambda * E[PG] * 2*pi * (r^(2-alpha) -
/// r_out^(2-alpha)) / (alpha - 2)`, with `E[PG] = E[L^alpha] * E[1/W] *
/// E[G]` and `E[L^alpha] = Gamma(alpha/2 + 1) / (pi*lambda)^(alpha/2)`.
pub fn campbell_mean(params: &SimParams, r: f64, r_out: f64) -> Result<f64> {
    if !(r > 0.0) || !(r_out > r) {
        return Err(Error::Domain(alloc::format!("need 0 < r < r_out, got {r}, {r_out}")));
    }
    let a = params.alpha;
    let e_l_alpha = tgamma(a / 2.0 + 1.0) / pow(PI * params.lambda, a / 2.0);
    let e_inv_w = if params.delta1 == params.delta2 {
        1.0 / params.delta1
    } else {
        log(params.delta2 / params.delta1) / (params.delta2 - params.delta1)
    };
    let e_g = match params.sidelobe_mode {
        SidelobeMode::Constant => params.delta,
        SidelobeMode::Uniform => 0.75 * params.delta,
    };
    let radial = (pow(r, 2.0 - a) - pow(r_out, 2.0 - a)) / (a - 2.0);
    Ok(params.lambda * e_l_alpha * e_inv_w * e_g * 2.0 * PI * radial)
}

/// Log-linear regression of outage estimates against K.
#[derive(Debug, Clone, Copy)]
pub struct ExponentFit {
    /// Fitted `d(-log p)/dK`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `slope` divided by the supplied theoretical per-K constant.
    pub ratio_to_theory: f64,
}

/// Fits `-log p_hat = intercept + slope * K` by ordinary least squares.
/// Requires at least three points with `p_hat` strictly inside (0, 1).
pub fn fit_exponent(points: &[(f64, f64)], theory_const_per_k: f64) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::Domain(alloc::format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let mut xy = Vec::with_capacity(points.len());
    for &(k, p) in points {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(alloc::format!(
                "p_hat must lie in (0, 1), got {p} at K = {k}"
            )));
        }
        xy.push((k, -log(p)));
    }
    let (slope, intercept, r_squared) =
        ols(&xy).ok_or_else(|| Error::Domain(String::from("degenerate abscissae")))?;
    Ok(ExponentFit { slope, intercept, r_squared, ratio_to_theory: slope / theory_const_per_k })
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let err = left + right - whole;
        if err.abs() <= 15.0 * tol {
            return Ok(left + right + err / 15.0);
        }
        if depth == 0 {
            return Err(Error::Quadrature(String::from("max recursion depth reached")));
        }
        let l = recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)?;
        let r = recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 48)
}
