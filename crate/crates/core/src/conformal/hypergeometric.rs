//! The Gauss hypergeometric function `₂F₁(a, b; c; z)` for real parameters.

use num_complex::Complex64;
use statrs::function::beta::beta;

use super::quadrature::{integrate, QuadOptions};
use crate::error::{Error, Result};

/// Modulus up to which the power series is used.
pub const SERIES_RADIUS: f64 = 0.9;

const MAX_TERMS: usize = 20_000;

fn check_c(c: f64) -> Result<()> {
    if !c.is_finite() || (c <= 0.0 && c == c.round()) {
        return Err(Error::HypergeometricPole(c));
    }
    Ok(())
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re >= 1.0
}

/// `₂F₁` on the slit plane `ℂ ∖ [1, ∞)`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: Complex64) -> Result<Complex64> {
    check_c(c)?;
    if on_cut(z) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::param("z", format!("{z} lies on the branch cut [1, ∞)")));
    }
    if z.norm() <= SERIES_RADIUS {
        hyp2f1_series(a, b, c, z)
    } else {
        hyp2f1_euler(a, b, c, z)
    }
}

/// Direct summation of the power series; requires `|z| < 1`.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: Complex64) -> Result<Complex64> {
    check_c(c)?;
    let modulus = z.norm();
    if modulus >= 1.0 {
        return Err(Error::SeriesDivergence { modulus, terms: 0 });
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
        if ratio == 0.0 {
            return Ok(sum);
        }
        term *= z * ratio;
        sum += term;
        // once the term ratio has settled below 1 the tail is a geometric series
        let q = ((a + nf + 1.0) * (b + nf + 1.0) / ((c + nf + 1.0) * (nf + 2.0))).abs() * modulus;
        if n > 2 && q < 1.0 {
            let tail = term.norm() * q / (1.0 - q);
            if tail < 1e-16 * sum.norm().max(1e-300) || tail < 1e-300 {
                return Ok(sum);
            }
        }
    }
    Err(Error::SeriesDivergence {
        modulus,
        terms: MAX_TERMS,
    })
}

/// Euler's integral `B(b, c-b)⁻¹ ∫₀¹ t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a} dt`.
///
/// Needs `c > b > 0` or, using the symmetry in `a` and `b`, `c > a > 0`.
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, z: Complex64) -> Result<Complex64> {
    check_c(c)?;
    if on_cut(z) {
        return Err(Error::param("z", format!("{z} lies on the branch cut [1, ∞)")));
    }
    let (a, b) = if c > b && b > 0.0 {
        (a, b)
    } else if c > a && a > 0.0 {
        (b, a)
    } else {
        return Err(Error::param(
            "c",
            format!("Euler integral needs c > b > 0 or c > a > 0 (a={a}, b={b}, c={c})"),
        ));
    };
    let e0 = b - 1.0;
    let e1 = c - b - 1.0;
    let one = Complex64::new(1.0, 0.0);
    let tail = |t: f64| -> Complex64 { (one - z * t).powf(-a) };
    let opts = QuadOptions::default();
    // [0, 1/2]: t^{b-1} removed by t = s^{1/b} when singular
    let left = if e0 < 0.0 {
        let p = 1.0 / b;
        integrate(
            |s| {
                let t = s.powf(p);
                tail(t) * (1.0 - t).powf(e1) / b
            },
            0.0,
            0.5f64.powf(b),
            opts,
        )?
    } else {
        integrate(|t| tail(t) * t.powf(e0) * (1.0 - t).powf(e1), 0.0, 0.5, opts)?
    };
    // [1/2, 1] in u = 1 - t: u^{c-b-1} removed by u = s^{1/(c-b)} when singular
    let right = if e1 < 0.0 {
        let p = 1.0 / (c - b);
        integrate(
            |s| {
                let u = s.powf(p);
                tail(1.0 - u) * (1.0 - u).powf(e0) / (c - b)
            },
            0.0,
            0.5f64.powf(c - b),
            opts,
        )?
    } else {
        integrate(|u| tail(1.0 - u) * (1.0 - u).powf(e0) * u.powf(e1), 0.0, 0.5, opts)?
    };
    Ok((left.value + right.value) / beta(b, c - b))
}
