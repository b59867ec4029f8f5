//! The hypergeometric Schwarz–Christoffel map of the upper half-plane onto a
//! quadrilateral, with vertex formulas, forward evaluation and Newton inversion.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta;

use super::hypergeometric::hyp2f1;
use super::quadrature::{integrate, QuadOptions};
use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, Domain, Point2};
use crate::metric::rho_halfplane;

/// Distance below which a contour counts as passing through a prevertex.
pub const DETOUR_DISTANCE: f64 = 1e-6;
/// Points closer than this to a prevertex (but not on it) are rejected.
pub const SINGULAR_DISTANCE: f64 = 1e-12;
/// Residual accepted by [`QuadrilateralMap::inverse`].
pub const INVERSE_RESIDUAL: f64 = 1e-9;
pub const NEWTON_MAX_ITER: usize = 50;
/// Side of the polar seed mesh used to start Newton's method.
pub const SEED_MESH: usize = 64;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// First-clause parameters of the quadrilateral map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub r: f64,
}

impl QuadParams {
    /// Checks `0 < a, b < 1`, `max(a+b, 1) ≤ c ≤ 1 + min(a, b)`, `0 < r < 1`.
    /// Returns whether the parameters sit within `1e-9` of the region boundary.
    pub fn validate(&self) -> Result<bool> {
        let QuadParams { a, b, c, r } = *self;
        for (name, v) in [("a", a), ("b", b)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::param(name, format!("must lie in (0, 1), got {v}")));
            }
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::param("r", format!("must lie in (0, 1), got {r}")));
        }
        let (lo, hi) = ((a + b).max(1.0), 1.0 + a.min(b));
        if !(c >= lo && c <= hi) {
            return Err(Error::param("c", format!("must lie in [{lo}, {hi}], got {c}")));
        }
        if c == hi {
            return Err(Error::param("c", "c = 1 + min(a, b) collapses a vertex angle to zero"));
        }
        Ok(c - lo < 1e-9 || hi - c < 1e-9)
    }

    /// Interior angles at `f(0), f(1), f(1/r²), f(∞)`.
    pub fn angles(&self) -> [f64; 4] {
        let QuadParams { a, b, c, .. } = *self;
        [b * PI, (c - b) * PI, (1.0 - a) * PI, (a + 1.0 - c) * PI]
    }
}

/// The conformal map `f(z) = C ∫₀^z t^{b-1}(1-t)^{c-b-1}(1-r²t)^{-a} dt`, `C = 1/B(b, c-b)`.
pub struct QuadrilateralMap {
    params: QuadParams,
    norm: f64,
    vertices: [Complex64; 4],
    near_degenerate: bool,
    /// `(z, f(z))` pairs on a polar mesh of the Cayley disk.
    seeds: Vec<(Complex64, Complex64)>,
}

impl fmt::Debug for QuadrilateralMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadrilateralMap")
            .field("params", &self.params)
            .field("vertices", &self.vertices)
            .finish_non_exhaustive()
    }
}

/// A factor of the integrand that vanishes at a leg endpoint.
#[derive(Clone, Copy)]
struct Singular {
    factor: usize,
}

impl QuadrilateralMap {
    pub fn new(params: QuadParams) -> Result<Self> {
        let near_degenerate = params.validate()?;
        let QuadParams { a, b, c, r } = params;
        let r2 = r * r;
        let rp2 = 1.0 - r2;
        let denom = beta(b, c - b);
        let f1 = hyp2f1(a, b, c, c64(r2, 0.0))?;
        let f_inv = f1
            + Complex64::from_polar(1.0, (b + 1.0 - c) * PI)
                * (beta(c - b, 1.0 - a) / denom)
                * rp2.powf(c - a - b)
                * hyp2f1(c - a, c - b, c + 1.0 - a - b, c64(rp2, 0.0))?;
        let f_inf = f_inv
            + Complex64::from_polar(1.0, (a + b + 1.0 - c) * PI)
                * (beta(1.0 - a, a + 1.0 - c) / denom)
                * r2.powf(1.0 - c)
                * rp2.powf(c - a - b)
                * hyp2f1(1.0 - b, 1.0 - a, 2.0 - c, c64(r2, 0.0))?;
        let mut map = QuadrilateralMap {
            params,
            norm: 1.0 / denom,
            vertices: [c64(0.0, 0.0), f1, f_inv, f_inf],
            near_degenerate,
            seeds: Vec::new(),
        };
        let angle_sum: f64 = params.angles().iter().sum();
        debug_assert!((angle_sum - 2.0 * PI).abs() < 1e-12);
        map.seeds = map.build_seeds();
        Ok(map)
    }

    pub fn params(&self) -> QuadParams {
        self.params
    }

    /// `C = 1/B(b, c-b)`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// `f(0), f(1), f(1/r²), f(∞)` from the closed-form vertex formulas.
    pub fn vertices(&self) -> [Point2; 4] {
        self.vertices.map(Point2::from)
    }

    pub fn angles(&self) -> [f64; 4] {
        self.params.angles()
    }

    /// True when the parameters lie within `1e-9` of the admissible region's boundary.
    pub fn near_degenerate(&self) -> bool {
        self.near_degenerate
    }

    /// The quadrilateral `f(H)` as a polygonal domain.
    pub fn domain(&self) -> Result<Domain> {
        Domain::polygon(self.vertices().to_vec())
    }

    fn prevertices(&self) -> [f64; 2] {
        [1.0, 1.0 / (self.params.r * self.params.r)]
    }

    /// The integrand `t^{b-1}(1-t)^{c-b-1}(1-r²t)^{-a}` with principal branches,
    /// continuous on the closed upper half-plane.
    pub fn integrand(&self, t: Complex64) -> Complex64 {
        let QuadParams { a, b, c, r } = self.params;
        let r2 = r * r;
        let b1 = branch(c64(1.0 - t.re, -t.im));
        let b2 = branch(c64(1.0 - r2 * t.re, -r2 * t.im));
        t.powf(b - 1.0) * b1.powf(c - b - 1.0) * b2.powf(-a)
    }

    /// `f'(z) = C·g(z)`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.integrand(z) * self.norm
    }

    /// `∫ g` along the straight leg `t0 → t1`, removing a vanishing factor at
    /// either endpoint by a power substitution.
    fn leg(&self, t0: Complex64, t1: Complex64, start: Option<Singular>, end: Option<Singular>) -> Result<Complex64> {
        let QuadParams { a, b, c, r } = self.params;
        let r2 = r * r;
        let exps = [b - 1.0, c - b - 1.0, -a];
        let delta = t1 - t0;
        // base_k(t) = β_k + κ_k·t with κ = (1, -1, -r²)
        let kappa = [1.0, -1.0, -r2];
        let at = |t: Complex64| [t, c64(1.0 - t.re, -t.im), c64(1.0 - r2 * t.re, -r2 * t.im)];
        let base0 = at(t0);
        let base1 = at(t1);
        let opts = QuadOptions::default();

        // s measured from t0 on the first half, u = 1 - s measured from t1 on the second
        let eval = |s: f64, from_start: bool, skip: Option<usize>| -> Complex64 {
            let mut v = delta;
            for k in 0..3 {
                if Some(k) == skip {
                    continue;
                }
                let base = if from_start {
                    base0[k] + delta * (kappa[k] * s)
                } else {
                    base1[k] - delta * (kappa[k] * s)
                };
                v *= branch(base).powf(exps[k]);
            }
            v
        };

        let half = |from_start: bool, sing: Option<Singular>| -> Result<Complex64> {
            match sing {
                Some(Singular { factor }) if exps[factor] < 0.0 => {
                    let e = exps[factor];
                    let p = 1.0 / (e + 1.0);
                    // near the endpoint base_k = ±κ_k·δ·s exactly
                    let sign = if from_start { 1.0 } else { -1.0 };
                    let coef = branch(delta * (kappa[factor] * sign)).powf(e) * p;
                    let res = integrate(
                        |v| eval(v.powf(p), from_start, Some(factor)),
                        0.0,
                        0.5f64.powf(e + 1.0),
                        opts,
                    )?;
                    Ok(res.value * coef)
                }
                _ => Ok(integrate(|s| eval(s, from_start, None), 0.0, 0.5, opts)?.value),
            }
        };
        Ok(half(true, start)? + half(false, end)?)
    }

    /// `f(z)` for `z` in the closed upper half-plane.
    pub fn forward(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im >= 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::param("z", format!("{z} is not in the closed upper half-plane")));
        }
        if z == c64(0.0, 0.0) {
            return Ok(z);
        }
        let pv = self.prevertices();
        for p in [0.0, pv[0], pv[1]] {
            let d = (z - c64(p, 0.0)).norm();
            if d > 0.0 && d < SINGULAR_DISTANCE {
                return Err(Error::ContourFailure { point: p, distance: d });
            }
        }
        let end = if z == c64(pv[0], 0.0) {
            Some(Singular { factor: 1 })
        } else if z == c64(pv[1], 0.0) {
            Some(Singular { factor: 2 })
        } else {
            None
        };
        let start = Some(Singular { factor: 0 });
        let zp = Point2::from(z);
        let close = pv.iter().any(|&p| {
            Point2::new(p, 0.0) != zp
                && point_segment_distance(Point2::new(p, 0.0), Point2::ORIGIN, zp) < DETOUR_DISTANCE
        });
        let value = if close {
            let corner = c64(0.0, z.norm());
            self.leg(c64(0.0, 0.0), corner, start, None)? + self.leg(corner, z, None, end)?
        } else {
            self.leg(c64(0.0, 0.0), z, start, end)?
        };
        Ok(value * self.norm)
    }

    pub fn forward_point(&self, z: Point2) -> Result<Point2> {
        self.forward(z.to_complex()).map(Point2::from)
    }

    /// `f(∞)` by quadrature along the imaginary axis, independent of the closed form.
    pub fn infinity_by_quadrature(&self) -> Result<Complex64> {
        let QuadParams { a, c, .. } = self.params;
        let head = self.forward(c64(0.0, 1.0))?;
        // ∫_i^{i∞} g(t) dt with t = i/v
        let e = a - c;
        let p = 1.0 / (e + 1.0);
        let g = |v: f64| self.integrand(c64(0.0, 1.0 / v)) * c64(0.0, 1.0 / (v * v));
        let opts = QuadOptions::default();
        let near = integrate(
            |s| {
                let v = s.powf(p);
                g(v) * (p * s.powf(p - 1.0))
            },
            0.0,
            0.5f64.powf(e + 1.0),
            opts,
        )?;
        let far = integrate(g, 0.5, 1.0, opts)?;
        Ok(head + (near.value + far.value) * self.norm)
    }

    /// `f(z1) - f(z0)` along the straight segment, falling back to a full
    /// evaluation when the segment runs close to a prevertex.
    fn advance(&self, z0: Complex64, f0: Complex64, z1: Complex64) -> Result<Complex64> {
        let (a, b) = (Point2::from(z0), Point2::from(z1));
        let len = a.dist(b);
        let clearance = [0.0, self.prevertices()[0], self.prevertices()[1]]
            .iter()
            .map(|&p| point_segment_distance(Point2::new(p, 0.0), a, b))
            .fold(f64::INFINITY, f64::min);
        if clearance < 0.5 * len.max(1e-3) {
            return self.forward(z1);
        }
        Ok(f0 + self.leg(z0, z1, None, None)? * self.norm)
    }

    fn build_seeds(&self) -> Vec<(Complex64, Complex64)> {
        let n = SEED_MESH;
        (0..n * n)
            .into_par_iter()
            .filter_map(|idx| {
                let (k, l) = (idx / n, idx % n);
                let rho = 1.0 - (1.0 - (k as f64 + 0.5) / n as f64).powi(2);
                let theta = 2.0 * PI * (l as f64 + 0.5) / n as f64;
                let zeta = Complex64::from_polar(rho, theta);
                let z = c64(0.0, 1.0) * (1.0 + zeta) / (1.0 - zeta);
                let z = c64(z.re, z.im.max(0.0));
                self.forward(z).ok().map(|w| (z, w))
            })
            .collect()
    }

    /// Newton's method for `f(z) = w`, seeded from the precomputed mesh.
    pub fn inverse_complex(&self, w: Complex64) -> Result<Complex64> {
        let fail = |residual: f64| Error::Inversion {
            x: w.re,
            y: w.im,
            residual,
        };
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(fail(f64::INFINITY));
        }
        let &(mut z, mut fz) = self
            .seeds
            .iter()
            .min_by(|p, q| (p.1 - w).norm().total_cmp(&(q.1 - w).norm()))
            .ok_or_else(|| fail(f64::INFINITY))?;
        let scale = w.norm().max(1.0);
        let mut verified = true;
        for _ in 0..NEWTON_MAX_ITER {
            let res = fz - w;
            if res.norm() < 1e-13 * scale {
                if !verified {
                    fz = self.forward(z)?;
                    verified = true;
                    continue;
                }
                return Ok(z);
            }
            let d = self.derivative(z);
            if !(d.norm() > 0.0) || !d.re.is_finite() {
                break;
            }
            let step = -res / d;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let cand = z + step * lambda;
                if cand.im >= 0.0 {
                    if let Ok(fc) = self.advance(z, fz, cand) {
                        if (fc - w).norm() < res.norm() {
                            z = cand;
                            fz = fc;
                            accepted = true;
                            break;
                        }
                    }
                }
                lambda *= 0.5;
            }
            verified = false;
            if !accepted {
                break;
            }
            if (step * lambda).norm() <= 1e-15 * z.norm().max(1.0) {
                break;
            }
        }
        let full = self.forward(z)?;
        let residual = (full - w).norm();
        if residual < INVERSE_RESIDUAL {
            Ok(z)
        } else {
            Err(fail(residual))
        }
    }

    pub fn inverse(&self, w: Point2) -> Result<Point2> {
        self.inverse_complex(w.to_complex()).map(Point2::from)
    }

    /// `ρ_H(f⁻¹(w1), f⁻¹(w2))`.
    pub fn pullback_weight(&self, w1: Point2, w2: Point2) -> Result<f64> {
        if w1 == w2 {
            return Ok(0.0);
        }
        rho_halfplane(self.inverse(w1)?, self.inverse(w2)?)
    }
}

/// Gives negative reals a `-0` imaginary part so that they sit on the lower
/// side of the principal cut, as limits from the upper half-plane do.
fn branch(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        c64(z.re, -0.0)
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_map() -> QuadrilateralMap {
        QuadrilateralMap::new(QuadParams {
            a: 0.4,
            b: 0.5,
            c: 1.1,
            r: 0.5,
        })
        .unwrap()
    }

    #[test]
    fn parameter_checks() {
        let ok = QuadParams {
            a: 0.4,
            b: 0.5,
            c: 1.1,
            r: 0.5,
        };
        assert!(!ok.validate().unwrap());
        assert!(QuadParams { c: 0.95, ..ok }.validate().is_err());
        assert!(QuadParams { c: 1.4, ..ok }.validate().is_err());
        assert!(QuadParams { r: 1.0, ..ok }.validate().is_err());
        assert!(QuadParams { a: 0.0, ..ok }.validate().is_err());
        assert!(QuadParams { c: 1.0, ..ok }.validate().unwrap());
    }

    #[test]
    fn angles_sum() {
        let m = reference_map();
        assert!((m.angles().iter().sum::<f64>() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn vertices_match_quadrature() {
        let m = reference_map();
        let v = m.vertices;
        assert_eq!(v[0], c64(0.0, 0.0));
        assert!(v[1].im == 0.0 && v[1].re > 0.0);
        assert!((m.forward(c64(1.0, 0.0)).unwrap() - v[1]).norm() < 1e-10);
        assert!((m.forward(c64(4.0, 0.0)).unwrap() - v[2]).norm() < 1e-9);
        assert!((m.infinity_by_quadrature().unwrap() - v[3]).norm() < 1e-9);
        // the edge from f(∞) back to 0 leaves the origin at angle bπ
        assert!((v[3].arg() - 0.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn detour_matches_straight_contour() {
        let m = reference_map();
        // just above the real axis between the prevertices both contours are valid
        let z = c64(2.0, 1e-3);
        let straight = m.leg(c64(0.0, 0.0), z, Some(Singular { factor: 0 }), None).unwrap() * m.norm;
        assert!((m.forward(z).unwrap() - straight).norm() < 1e-9);
        let on_axis = m.forward(c64(2.0, 0.0)).unwrap();
        assert!((on_axis - straight).norm() < 1e-2);
    }

    #[test]
    fn singular_neighbourhood_is_rejected() {
        let m = reference_map();
        assert!(matches!(
            m.forward(c64(1.0 + 1e-13, 0.0)),
            Err(Error::ContourFailure { .. })
        ));
        assert!(m.forward(c64(0.0, -1.0)).is_err());
    }

    #[test]
    fn conformality() {
        let m = reference_map();
        let z = c64(0.3, 0.7);
        let hs = 1e-4;
        let (f0, f1, f2) = (
            m.forward(z).unwrap(),
            m.forward(z + hs).unwrap(),
            m.forward(z + c64(0.0, hs)).unwrap(),
        );
        let angle = ((f2 - f0) / (f1 - f0)).arg();
        assert!((angle - PI / 2.0).abs() < 1e-4);
    }

    #[test]
    fn round_trip() {
        let m = reference_map();
        for &z in &[
            c64(0.3, 0.2),
            c64(-2.0, 4.0),
            c64(0.0, 2.0),
            c64(5.0, 0.1),
            c64(-30.0, 2.0),
        ] {
            let w = m.forward(z).unwrap();
            let back = m.inverse_complex(w).unwrap();
            assert!((back - z).norm() < 1e-8 * z.norm().max(1.0), "{z} -> {back}");
        }
    }

    #[test]
    fn pullback_matches_halfplane_distance() {
        let m = reference_map();
        let (z1, z2) = (Point2::new(-2.0, 4.0), Point2::new(0.0, 2.0));
        let (w1, w2) = (m.forward_point(z1).unwrap(), m.forward_point(z2).unwrap());
        let w = m.pullback_weight(w1, w2).unwrap();
        assert!((w - 1.5f64.acosh()).abs() < 1e-7);
        assert_eq!(m.pullback_weight(w1, w1).unwrap(), 0.0);
        assert_eq!(w, m.pullback_weight(w2, w1).unwrap());
    }
}
