//! Circle-domain geometry: circles, multiply connected circle domains,
//! Moebius maps with spinor weights, and the per-component normalization
//! that sends a chosen boundary circle to the unit circle.
//!
//! Conventions used throughout the crate:
//!   component 0 is the outer circle (sign +1), components 1.. are holes
//!   (sign -1); the outward normal on component j at local angle theta is
//!   nu_out = sigma_j e^{i theta}, and the canonical half-normal branch is
//!   nu_half = e^{i theta/2} on the outer circle, i e^{i theta/2} on holes,
//!   so that nu_half^2 = nu_out and nu_half is anti-periodic in theta.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for a degenerate Moebius determinant.
const DET_TOL: f64 = 1e-14;
/// Relative tolerance for "pole sits on the circle" in `map_circle`.
const POLE_ON_CIRCLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 || !center.re.is_finite() || !center.im.is_finite()
        {
            return Err(Error::InvalidDomain(format!(
                "circle must have finite center and positive radius, got center {center}, radius {radius}"
            )));
        }
        Ok(Circle { center, radius })
    }

    /// Point at local angle theta.
    pub fn point_at(&self, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, theta)
    }

    /// Signed distance from z to the circle: positive outside, negative inside.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        (z - self.center).norm() - self.radius
    }
}

/// Boundary component orientation sign: +1 for the outer circle, -1 for holes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentSign {
    Outer,
    Hole,
}

impl ComponentSign {
    pub fn factor(self) -> f64 {
        match self {
            ComponentSign::Outer => 1.0,
            ComponentSign::Hole => -1.0,
        }
    }
}

/// A bounded circle domain: the inside of `outer` minus the closed disks
/// bounded by `holes`. `margin` is the smallest gap between any two
/// boundary circles, computed at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleDomain {
    outer: Circle,
    holes: Vec<Circle>,
    margin: f64,
}

impl CircleDomain {
    /// Validates that every hole lies strictly inside the outer circle and
    /// that holes are pairwise disjoint, all with strictly positive gaps.
    /// Errors name the offending pair of components.
    pub fn new(outer: Circle, holes: Vec<Circle>) -> Result<Self> {
        let mut margin = outer.radius;
        for (i, h) in holes.iter().enumerate() {
            let gap = outer.radius - ((h.center - outer.center).norm() + h.radius);
            if gap <= 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "hole {} is not strictly inside the outer circle (components 0 and {}, gap {:.3e})",
                    i + 1,
                    i + 1,
                    gap
                )));
            }
            margin = margin.min(gap);
        }
        for i in 0..holes.len() {
            for k in (i + 1)..holes.len() {
                let gap = (holes[i].center - holes[k].center).norm()
                    - (holes[i].radius + holes[k].radius);
                if gap <= 0.0 {
                    return Err(Error::InvalidDomain(format!(
                        "holes overlap (components {} and {}, gap {:.3e})",
                        i + 1,
                        k + 1,
                        gap
                    )));
                }
                margin = margin.min(gap);
            }
        }
        Ok(CircleDomain {
            outer,
            holes,
            margin,
        })
    }

    pub fn disk(outer: Circle) -> Self {
        let margin = outer.radius;
        CircleDomain {
            outer,
            holes: Vec::new(),
            margin,
        }
    }

    pub fn outer(&self) -> &Circle {
        &self.outer
    }

    pub fn holes(&self) -> &[Circle] {
        &self.holes
    }

    /// Smallest gap between boundary circles (outer radius for a disk).
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn n_components(&self) -> usize {
        1 + self.holes.len()
    }

    pub fn is_disk(&self) -> bool {
        self.holes.is_empty()
    }

    pub fn circle(&self, j: usize) -> Result<&Circle> {
        match j {
            0 => Ok(&self.outer),
            _ => self
                .holes
                .get(j - 1)
                .ok_or_else(|| self.bad_component(j)),
        }
    }

    pub fn sign(&self, j: usize) -> Result<ComponentSign> {
        if j == 0 {
            Ok(ComponentSign::Outer)
        } else if j <= self.holes.len() {
            Ok(ComponentSign::Hole)
        } else {
            Err(self.bad_component(j))
        }
    }

    fn bad_component(&self, j: usize) -> Error {
        Error::InvalidComponent {
            j,
            count: self.n_components(),
        }
    }

    /// Outward normal and its canonical half-power on component j at angle
    /// theta. Returns (nu_out, nu_half) with nu_half^2 = nu_out exactly,
    /// nu_half anti-periodic across a full turn.
    pub fn outward_normal(&self, j: usize, theta: f64) -> Result<(Complex64, Complex64)> {
        let sign = self.sign(j)?;
        let e = Complex64::from_polar(1.0, theta);
        let h = Complex64::from_polar(1.0, 0.5 * theta);
        Ok(match sign {
            ComponentSign::Outer => (e, h),
            ComponentSign::Hole => (-e, Complex64::new(0.0, 1.0) * h),
        })
    }

    /// True if z lies in the open domain.
    pub fn contains(&self, z: Complex64) -> bool {
        self.outer.signed_distance(z) < 0.0
            && self.holes.iter().all(|h| h.signed_distance(z) > 0.0)
    }

    /// Distance from z to the nearest boundary circle (unsigned).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let mut d = self.outer.signed_distance(z).abs();
        for h in &self.holes {
            d = d.min(h.signed_distance(z).abs());
        }
        d
    }

    /// Geometry key with centers and radii rounded to 1e-12, for memoizing
    /// solver builds on repeated sub-domains.
    pub fn fingerprint(&self) -> GeometryKey {
        let mut q = Vec::with_capacity(self.n_components());
        q.push(quantize_circle(&self.outer));
        for h in &self.holes {
            q.push(quantize_circle(h));
        }
        GeometryKey(q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeometryKey(Vec<[i128; 3]>);

fn quantize_circle(c: &Circle) -> [i128; 3] {
    let q = |x: f64| (x * 1e12).round() as i128;
    [q(c.center.re), q(c.center.im), q(c.radius)]
}

/// Moebius map z -> (a z + b) / (c z + d), with the square-root branch of
/// the derivative fixed at construction: `branch_seed` is the principal
/// square root of ad - bc, and spinor_weight(z) = branch_seed / (c z + d),
/// which squares to the derivative and is continuous off the pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    branch_seed: Complex64,
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = (a.norm() * d.norm() + b.norm() * c.norm()).max(f64::MIN_POSITIVE);
        if det.norm() <= DET_TOL * scale {
            return Err(Error::DegenerateMap {
                det_mag: det.norm(),
            });
        }
        Ok(MoebiusMap {
            a,
            b,
            c,
            d,
            branch_seed: det.sqrt(),
        })
    }

    pub fn identity() -> Self {
        MoebiusMap::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .expect("identity map is nondegenerate")
    }

    /// Affine map z -> alpha z + beta.
    pub fn affine(alpha: Complex64, beta: Complex64) -> Result<Self> {
        MoebiusMap::new(
            alpha,
            beta,
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// The branch seed s with s^2 = ad - bc chosen at construction.
    pub fn branch_seed(&self) -> Complex64 {
        self.branch_seed
    }

    pub fn is_affine(&self) -> bool {
        self.c == Complex64::new(0.0, 0.0)
    }

    /// Pole location, or None for affine maps.
    pub fn pole(&self) -> Option<Complex64> {
        if self.is_affine() {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        let scale = (self.c.norm() * z.norm()).max(self.d.norm());
        if den.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::PoleAtPoint {
                point: format!("{z}"),
            });
        }
        Ok((self.a * z + self.b) / den)
    }

    /// M'(z) = (ad - bc) / (cz + d)^2.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        let scale = (self.c.norm() * z.norm()).max(self.d.norm());
        if den.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::PoleAtPoint {
                point: format!("{z}"),
            });
        }
        Ok(self.det() / (den * den))
    }

    /// s(z) with s(z)^2 = M'(z), branch fixed by the stored seed. Single
    /// valued along any circle avoiding the pole, so transported spinors
    /// need no per-circle branch bookkeeping.
    pub fn spinor_weight(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        let scale = (self.c.norm() * z.norm()).max(self.d.norm());
        if den.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::PoleAtPoint {
                point: format!("{z}"),
            });
        }
        Ok(self.branch_seed / den)
    }

    /// Inverse with the same determinant, so that the spinor weights of M
    /// and M^{-1} compose to exactly +1 along any closed path:
    /// (d, -b, -c, a) has det = ad - bc again.
    pub fn inverse(&self) -> Result<Self> {
        MoebiusMap::new(self.d, -self.b, -self.c, self.a)
    }

    /// self after other: (self . other)(z) = self(other(z)).
    pub fn compose(&self, other: &MoebiusMap) -> Result<Self> {
        MoebiusMap::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    /// Image of a circle. Errors with `ImageIsLine` when the pole lies on
    /// the circle (within 1e-12 of the radius, relatively), tagging the
    /// offending component index supplied by the caller.
    pub fn map_circle_tagged(&self, circle: &Circle, component: usize) -> Result<Circle> {
        if self.is_affine() {
            let alpha = self.a / self.d;
            let beta = self.b / self.d;
            return Circle::new(alpha * circle.center + beta, alpha.norm() * circle.radius);
        }
        // Write M = a/c + k / (cz + d), k = (bc - ad)/c, and push the circle
        // through the affine part, the inversion, and the outer affine part.
        let big_a = self.c * circle.center + self.d;
        let big_r = self.c.norm() * circle.radius;
        let denom = big_a.norm_sqr() - big_r * big_r;
        if denom.abs() <= POLE_ON_CIRCLE_TOL * big_r * (big_a.norm() + big_r) {
            return Err(Error::ImageIsLine { component });
        }
        let inv_center = big_a.conj() / denom;
        let inv_radius = big_r / denom.abs();
        let k = (self.b * self.c - self.a * self.d) / self.c;
        Circle::new(
            self.a / self.c + k * inv_center,
            k.norm() * inv_radius,
        )
    }

    pub fn map_circle(&self, circle: &Circle) -> Result<Circle> {
        self.map_circle_tagged(circle, 0)
    }
}

/// Normalization of `domain` relative to component j: returns (M, filled)
/// where M is a Moebius map sending component j onto the unit circle and
/// the rest of the domain into the complement of the closed unit disk, and
/// `filled` is the image domain with the unit disk glued back in (one
/// fewer boundary component).
///
/// A hole is normalized by the affine map (z - a_j)/r_j. The outer circle
/// is first inverted about the center of hole 1 and the resulting hole is
/// then normalized affinely; the composition is returned as a single map.
pub fn normalize_component(domain: &CircleDomain, j: usize) -> Result<(MoebiusMap, CircleDomain)> {
    let n = domain.n_components();
    if j >= n {
        return Err(Error::InvalidComponent { j, count: n });
    }
    if j == 0 {
        if domain.is_disk() {
            return Err(Error::SimplyConnected);
        }
        let p = domain.holes()[0].center;
        let inv = MoebiusMap::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            -p,
        )?;
        let gamma0 = inv.map_circle_tagged(domain.outer(), 0)?;
        let affine = MoebiusMap::new(
            Complex64::new(1.0, 0.0),
            -gamma0.center,
            Complex64::new(0.0, 0.0),
            Complex64::new(gamma0.radius, 0.0),
        )?;
        let map = affine.compose(&inv)?;
        // Hole 1 becomes the outer circle of the filled domain; the other
        // holes stay holes.
        let new_outer = map.map_circle_tagged(&domain.holes()[0], 1)?;
        let mut new_holes = Vec::with_capacity(domain.holes().len() - 1);
        for (i, h) in domain.holes().iter().enumerate().skip(1) {
            new_holes.push(map.map_circle_tagged(h, i + 1)?);
        }
        let filled = CircleDomain::new(new_outer, new_holes)?;
        check_unit_disk_inside(&filled)?;
        Ok((map, filled))
    } else {
        let hole = &domain.holes()[j - 1];
        let map = MoebiusMap::new(
            Complex64::new(1.0, 0.0),
            -hole.center,
            Complex64::new(0.0, 0.0),
            Complex64::new(hole.radius, 0.0),
        )?;
        let new_outer = map.map_circle_tagged(domain.outer(), 0)?;
        let mut new_holes = Vec::with_capacity(domain.holes().len() - 1);
        for (i, h) in domain.holes().iter().enumerate() {
            if i + 1 != j {
                new_holes.push(map.map_circle_tagged(h, i + 1)?);
            }
        }
        let filled = CircleDomain::new(new_outer, new_holes)?;
        check_unit_disk_inside(&filled)?;
        Ok((map, filled))
    }
}

/// The normalized picture only makes sense if the closed unit disk sits
/// strictly inside the filled domain; violations indicate a corrupted
/// input rather than a reachable state for validated domains.
fn check_unit_disk_inside(filled: &CircleDomain) -> Result<()> {
    let gap_outer = filled.outer().radius - (filled.outer().center.norm() + 1.0);
    if gap_outer <= 0.0 {
        return Err(Error::InvalidDomain(format!(
            "normalized component does not enclose the unit disk (gap {gap_outer:.3e})"
        )));
    }
    for (i, h) in filled.holes().iter().enumerate() {
        let gap = h.center.norm() - (h.radius + 1.0);
        if gap <= 0.0 {
            return Err(Error::InvalidDomain(format!(
                "normalized hole {} intersects the unit disk (gap {:.3e})",
                i + 1,
                gap
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn annulus(r_inner: f64, r_outer: f64) -> CircleDomain {
        CircleDomain::new(
            Circle::new(c(0.0, 0.0), r_outer).unwrap(),
            vec![Circle::new(c(0.0, 0.0), r_inner).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn moebius_apply_cayley_like() {
        // (z - 1)/(z + 1) sends i to i.
        let m = MoebiusMap::new(c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let w = m.apply(c(0.0, 1.0)).unwrap();
        assert_relative_eq!(w.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn moebius_pole_is_reported() {
        let m = MoebiusMap::new(c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(matches!(
            m.apply(c(-1.0, 0.0)),
            Err(Error::PoleAtPoint { .. })
        ));
    }

    #[test]
    fn degenerate_map_rejected() {
        assert!(matches!(
            MoebiusMap::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)),
            Err(Error::DegenerateMap { .. })
        ));
    }

    #[test]
    fn map_circle_inversion() {
        // 1/z on C(3, 1) gives C(3/8, 1/8).
        let m = MoebiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let img = m
            .map_circle(&Circle::new(c(3.0, 0.0), 1.0).unwrap())
            .unwrap();
        assert_relative_eq!(img.center.re, 3.0 / 8.0, epsilon = 1e-15);
        assert_relative_eq!(img.center.im, 0.0, epsilon = 1e-15);
        assert_relative_eq!(img.radius, 1.0 / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn map_circle_through_pole_is_line() {
        let m = MoebiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let r = m.map_circle_tagged(&Circle::new(c(1.0, 0.0), 1.0).unwrap(), 2);
        assert!(matches!(r, Err(Error::ImageIsLine { component: 2 })));
    }

    #[test]
    fn map_circle_matches_mapped_points() {
        let m = MoebiusMap::new(c(1.0, 0.5), c(0.3, -0.2), c(0.2, 0.1), c(1.0, 0.0)).unwrap();
        let circle = Circle::new(c(0.4, -0.3), 0.7).unwrap();
        let img = m.map_circle(&circle).unwrap();
        for i in 0..16 {
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / 16.0;
            let w = m.apply(circle.point_at(theta)).unwrap();
            assert_relative_eq!((w - img.center).norm(), img.radius, epsilon = 1e-12);
        }
    }

    #[test]
    fn spinor_weight_examples() {
        let id = MoebiusMap::identity();
        assert_eq!(id.spinor_weight(c(0.3, 0.4)).unwrap(), c(1.0, 0.0));

        let scale = MoebiusMap::affine(c(2.0, 0.0), c(0.0, 0.0)).unwrap();
        let s = scale.spinor_weight(c(-1.0, 2.0)).unwrap();
        assert_relative_eq!(s.re, 2.0_f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(s.im, 0.0, epsilon = 1e-15);

        let inv = MoebiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let s = inv.spinor_weight(c(2.0, 0.0)).unwrap();
        assert_relative_eq!(s.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(s.im, 0.5, epsilon = 1e-15);
        let sq = s * s;
        let d = inv.derivative(c(2.0, 0.0)).unwrap();
        assert_relative_eq!(sq.re, d.re, epsilon = 1e-15);
        assert_relative_eq!(sq.im, d.im, epsilon = 1e-15);
    }

    #[test]
    fn spinor_weight_squares_to_derivative_on_circle() {
        let m = MoebiusMap::new(c(0.8, 0.1), c(0.2, 0.0), c(0.3, -0.4), c(2.0, 0.5)).unwrap();
        for i in 0..32 {
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / 32.0;
            let z = c(0.1, -0.2) + Complex64::from_polar(0.9, theta);
            let s = m.spinor_weight(z).unwrap();
            let d = m.derivative(z).unwrap();
            assert_relative_eq!((s * s - d).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn inverse_round_trips_spinor_sign() {
        // With inverse() = (d, -b, -c, a) the determinant is preserved and
        // sqrt(psi')(M(z)) * sqrt(M')(z) = +1 exactly, no sign flip.
        let m = MoebiusMap::new(c(0.3, 1.0), c(-0.4, 0.2), c(0.5, -0.1), c(1.2, 0.3)).unwrap();
        let inv = m.inverse().unwrap();
        for i in 0..8 {
            let z = c(0.2 * i as f64 - 0.5, 0.3);
            let w = m.apply(z).unwrap();
            let back = inv.apply(w).unwrap();
            assert_relative_eq!((back - z).norm(), 0.0, epsilon = 1e-12);
            let prod = inv.spinor_weight(w).unwrap() * m.spinor_weight(z).unwrap();
            assert_relative_eq!(prod.re, 1.0, epsilon = 1e-12);
            assert_relative_eq!(prod.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn domain_validation_names_pair() {
        let outer = Circle::new(c(0.0, 0.0), 2.0).unwrap();
        let h1 = Circle::new(c(-0.8, 0.0), 0.5).unwrap();
        let h2 = Circle::new(c(0.0, 0.0), 0.5).unwrap();
        let err = CircleDomain::new(outer, vec![h1, h2]).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("components 1 and 2"), "message was: {msg}");
    }

    #[test]
    fn domain_margin_is_min_gap() {
        let dom = CircleDomain::new(
            Circle::new(c(0.0, 0.0), 2.0).unwrap(),
            vec![Circle::new(c(0.9, 0.0), 0.5).unwrap()],
        )
        .unwrap();
        // gap to outer: 2 - (0.9 + 0.5) = 0.6
        assert_relative_eq!(dom.margin(), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn outward_normal_hole_at_zero_angle() {
        let dom = annulus(1.0, 2.0);
        let (nu, nu_half) = dom.outward_normal(1, 0.0).unwrap();
        assert_relative_eq!(nu.re, -1.0, epsilon = 1e-15);
        assert_relative_eq!(nu.im, 0.0, epsilon = 1e-15);
        assert_relative_eq!(nu_half.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(nu_half.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn half_normal_squares_and_antiperiodicity() {
        let dom = annulus(1.0, 2.0);
        for j in 0..2 {
            for i in 0..11 {
                let theta = 0.6 * i as f64;
                let (nu, h) = dom.outward_normal(j, theta).unwrap();
                assert_relative_eq!((h * h - nu).norm(), 0.0, epsilon = 1e-14);
                let (_, h_shift) = dom.outward_normal(j, theta + 2.0 * std::f64::consts::PI).unwrap();
                assert_relative_eq!((h_shift + h).norm(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn normalize_hole_is_affine() {
        // Outer C(0,4), hole C(1, 0.5): map is (z-1)/0.5, filled = C(-2, 8).
        let dom = CircleDomain::new(
            Circle::new(c(0.0, 0.0), 4.0).unwrap(),
            vec![Circle::new(c(1.0, 0.0), 0.5).unwrap()],
        )
        .unwrap();
        let (map, filled) = normalize_component(&dom, 1).unwrap();
        let w = map.apply(c(1.5, 0.0)).unwrap();
        assert_relative_eq!(w.re, 1.0, epsilon = 1e-15);
        assert!(filled.is_disk());
        assert_relative_eq!(filled.outer().center.re, -2.0, epsilon = 1e-14);
        assert_relative_eq!(filled.outer().radius, 8.0, epsilon = 1e-14);
    }

    #[test]
    fn normalize_outer_of_annulus() {
        // Annulus 1 < |z| < 2, outer component: map is 2/z, filled = C(0,2).
        let dom = annulus(1.0, 2.0);
        let (map, filled) = normalize_component(&dom, 0).unwrap();
        for i in 0..8 {
            let z = Complex64::from_polar(1.7, 0.8 * i as f64);
            let w = map.apply(z).unwrap();
            let expect = 2.0 / z;
            assert_relative_eq!((w - expect).norm(), 0.0, epsilon = 1e-13);
        }
        assert!(filled.is_disk());
        assert_relative_eq!(filled.outer().center.norm(), 0.0, epsilon = 1e-13);
        assert_relative_eq!(filled.outer().radius, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn normalize_outer_needs_a_hole() {
        let disk = CircleDomain::disk(Circle::new(c(0.0, 0.0), 1.0).unwrap());
        assert!(matches!(
            normalize_component(&disk, 0),
            Err(Error::SimplyConnected)
        ));
    }

    #[test]
    fn normalize_outer_three_connected() {
        let dom = CircleDomain::new(
            Circle::new(c(0.0, 0.0), 3.0).unwrap(),
            vec![
                Circle::new(c(-1.2, 0.1), 0.5).unwrap(),
                Circle::new(c(1.3, -0.2), 0.6).unwrap(),
            ],
        )
        .unwrap();
        let (map, filled) = normalize_component(&dom, 0).unwrap();
        assert_eq!(filled.n_components(), 2);
        // The distinguished outer circle lands on the unit circle.
        for i in 0..12 {
            let z = dom.outer().point_at(0.5 * i as f64);
            let w = map.apply(z).unwrap();
            assert_relative_eq!(w.norm(), 1.0, epsilon = 1e-12);
        }
        // Interior points land outside the closed unit disk, inside filled.
        for &z in &[c(2.0, 0.5), c(-2.0, -0.7), c(0.0, 2.2)] {
            assert!(dom.contains(z));
            let w = map.apply(z).unwrap();
            assert!(w.norm() > 1.0);
            assert!(filled.contains(w));
        }
    }

    #[test]
    fn fingerprint_distinguishes_and_matches() {
        let a = annulus(1.0, 2.0);
        let b = annulus(1.0, 2.0);
        let c_ = annulus(1.0, 2.0 + 1e-9);
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c_.fingerprint());
    }
}
