//! Holomorphic functions as explicit evaluators.
//!
//! A `HoloFunction` is a finite sum of power blocks, principal-part blocks
//! and spinor transports of other holomorphic functions:
//!
//! ```text
//! F(z) = sum_b  T_b(z - c_b)            (Taylor blocks)
//!      + sum_b  P_b(1 / (z - c_b))      (principal blocks)
//!      + sum_i  s_i(z) G_i(M_i(z))      (transported children)
//! ```
//!
//! where s_i is the spinor weight of the Moebius map M_i, with
//! s_i(z)^2 = M_i'(z). The representation is closed under real-linear
//! combination, transport and restriction to boundary circles, which is
//! all the solver needs. `add_scaled` merges blocks with equal centers
//! and children carrying the identical map, so repeated superposition
//! keeps the evaluator flat instead of growing a new node per summand.

use num_complex::Complex64;

use crate::boundary::{self, BoundaryFunction, ComponentFunction, Side};
use crate::error::{Error, Result};
use crate::geometry::{Circle, CircleDomain, ComponentSign, MoebiusMap};

/// Polynomial in (z - center).
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorBlock {
    pub center: Complex64,
    /// coeffs[m] multiplies (z - center)^m.
    pub coeffs: Vec<Complex64>,
}

/// Polynomial in 1/(z - center) without constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalBlock {
    pub center: Complex64,
    /// coeffs[k] multiplies (z - center)^{-(k+1)}.
    pub coeffs: Vec<Complex64>,
}

/// A child evaluated through a spinor transport.
#[derive(Debug, Clone, PartialEq)]
pub struct ChildBlock {
    pub map: MoebiusMap,
    pub child: HoloFunction,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HoloFunction {
    taylor: Vec<TaylorBlock>,
    principal: Vec<PrincipalBlock>,
    children: Vec<ChildBlock>,
    domain: Option<CircleDomain>,
}

fn bits(z: Complex64) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

/// Exact identity of maps as stored objects. Children are only merged when
/// they were transported through the very same map value, which is the
/// case for all superpositions formed by the solver.
fn same_map(a: &MoebiusMap, b: &MoebiusMap) -> bool {
    bits(a.a) == bits(b.a)
        && bits(a.b) == bits(b.b)
        && bits(a.c) == bits(b.c)
        && bits(a.d) == bits(b.d)
        && bits(a.branch_seed()) == bits(b.branch_seed())
}

impl HoloFunction {
    pub fn zero() -> Self {
        HoloFunction::default()
    }

    pub fn from_taylor(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        HoloFunction {
            taylor: vec![TaylorBlock { center, coeffs }],
            ..Default::default()
        }
    }

    pub fn from_principal(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        HoloFunction {
            principal: vec![PrincipalBlock { center, coeffs }],
            ..Default::default()
        }
    }

    /// z^k centered at the origin; negative k gives the pure principal part.
    pub fn monomial(k: i64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        if k >= 0 {
            let mut coeffs = vec![zero; k as usize + 1];
            coeffs[k as usize] = one;
            HoloFunction::from_taylor(zero, coeffs)
        } else {
            let mut coeffs = vec![zero; (-k) as usize];
            coeffs[(-k) as usize - 1] = one;
            HoloFunction::from_principal(zero, coeffs)
        }
    }

    /// Wraps `child` behind the spinor transport of `map`, where `map`
    /// sends the new function's variable into the child's domain:
    /// result(z) = s(z) child(map(z)).
    pub fn transported(map: MoebiusMap, child: HoloFunction) -> Self {
        HoloFunction {
            children: vec![ChildBlock { map, child }],
            ..Default::default()
        }
    }

    pub fn with_domain(mut self, domain: CircleDomain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn domain(&self) -> Option<&CircleDomain> {
        self.domain.as_ref()
    }

    pub fn taylor_blocks(&self) -> &[TaylorBlock] {
        &self.taylor
    }

    pub fn principal_blocks(&self) -> &[PrincipalBlock] {
        &self.principal
    }

    pub fn children(&self) -> &[ChildBlock] {
        &self.children
    }

    pub fn from_parts(
        taylor: Vec<TaylorBlock>,
        principal: Vec<PrincipalBlock>,
        children: Vec<ChildBlock>,
        domain: Option<CircleDomain>,
    ) -> Self {
        HoloFunction {
            taylor,
            principal,
            children,
            domain,
        }
    }

    /// Evaluates without any domain check; used for boundary restriction
    /// where the point sits on a boundary circle rather than inside.
    pub fn eval_raw(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for b in &self.taylor {
            let w = z - b.center;
            let mut h = Complex64::new(0.0, 0.0);
            for c in b.coeffs.iter().rev() {
                h = h * w + c;
            }
            acc += h;
        }
        for b in &self.principal {
            let w = z - b.center;
            if w.norm() == 0.0 {
                return Err(Error::PoleAtPoint {
                    point: format!("{z}"),
                });
            }
            let inv = 1.0 / w;
            let mut h = Complex64::new(0.0, 0.0);
            for c in b.coeffs.iter().rev() {
                h = (h + c) * inv;
            }
            acc += h;
        }
        for ch in &self.children {
            let w = ch.map.apply(z)?;
            let s = ch.map.spinor_weight(z)?;
            acc += s * ch.child.eval_raw(w)?;
        }
        Ok(acc)
    }

    /// Evaluates at an interior point of the attached domain.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let domain = self.domain.as_ref().ok_or_else(|| {
            Error::BadInput("evaluate needs a function with an attached domain".into())
        })?;
        if !domain.contains(z) {
            return Err(Error::OutsideDomain {
                point: format!("{z}"),
            });
        }
        self.eval_raw(z)
    }

    /// self += alpha * other (real-linear).
    pub fn add_scaled(&mut self, other: &HoloFunction, alpha: f64) {
        self.add_scaled_complex(other, Complex64::new(alpha, 0.0));
    }

    /// self += alpha * other for complex alpha. Complex scaling commutes
    /// with the spinor transports because it acts on values.
    pub fn add_scaled_complex(&mut self, other: &HoloFunction, alpha: Complex64) {
        for b in &other.taylor {
            match self
                .taylor
                .iter_mut()
                .find(|t| bits(t.center) == bits(b.center))
            {
                Some(t) => {
                    if t.coeffs.len() < b.coeffs.len() {
                        t.coeffs.resize(b.coeffs.len(), Complex64::new(0.0, 0.0));
                    }
                    for (dst, src) in t.coeffs.iter_mut().zip(&b.coeffs) {
                        *dst += alpha * src;
                    }
                }
                None => self.taylor.push(TaylorBlock {
                    center: b.center,
                    coeffs: b.coeffs.iter().map(|c| alpha * c).collect(),
                }),
            }
        }
        for b in &other.principal {
            match self
                .principal
                .iter_mut()
                .find(|t| bits(t.center) == bits(b.center))
            {
                Some(t) => {
                    if t.coeffs.len() < b.coeffs.len() {
                        t.coeffs.resize(b.coeffs.len(), Complex64::new(0.0, 0.0));
                    }
                    for (dst, src) in t.coeffs.iter_mut().zip(&b.coeffs) {
                        *dst += alpha * src;
                    }
                }
                None => self.principal.push(PrincipalBlock {
                    center: b.center,
                    coeffs: b.coeffs.iter().map(|c| alpha * c).collect(),
                }),
            }
        }
        for ch in &other.children {
            match self.children.iter_mut().find(|c| same_map(&c.map, &ch.map)) {
                Some(c) => c.child.add_scaled_complex(&ch.child, alpha),
                None => {
                    let mut scaled = ch.child.clone();
                    scaled.scale_complex(alpha);
                    self.children.push(ChildBlock {
                        map: ch.map.clone(),
                        child: scaled,
                    });
                }
            }
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.scale_complex(Complex64::new(alpha, 0.0));
    }

    pub fn scale_complex(&mut self, alpha: Complex64) {
        for b in &mut self.taylor {
            for c in &mut b.coeffs {
                *c *= alpha;
            }
        }
        for b in &mut self.principal {
            for c in &mut b.coeffs {
                *c *= alpha;
            }
        }
        for ch in &mut self.children {
            ch.child.scale_complex(alpha);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.taylor.is_empty() && self.principal.is_empty() && self.children.is_empty()
    }
}

/// Restriction of F to one boundary circle as a truncated Fourier series
/// in the circle's local angle; samples at the default node count.
pub fn restrict_component(
    f: &HoloFunction,
    circle: &Circle,
    j: usize,
    sign: ComponentSign,
    cutoff: usize,
) -> Result<ComponentFunction> {
    let (cf, mass, norm) = restrict_component_raw(f, circle, j, sign, cutoff)?;
    boundary::alias_gate(j, mass, norm)?;
    Ok(cf)
}

fn restrict_component_raw(
    f: &HoloFunction,
    circle: &Circle,
    j: usize,
    sign: ComponentSign,
    cutoff: usize,
) -> Result<(ComponentFunction, f64, f64)> {
    let p = boundary::default_node_count(cutoff);
    let mut samples = Vec::with_capacity(p);
    for i in 0..p {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / p as f64;
        samples.push(f.eval_raw(circle.point_at(theta))?);
    }
    boundary::to_coefficients_raw(j, sign, &samples, cutoff)
}

/// Restriction of F to the whole boundary of `domain`. Per-component
/// aliasing mass is gated against the norm of the whole trace, so a
/// component carrying a negligible share of the function is not held to
/// a meaningless relative standard.
pub fn restrict(f: &HoloFunction, domain: &CircleDomain, cutoff: usize) -> Result<BoundaryFunction> {
    restrict_with_floor(f, domain, cutoff, 0.0)
}

/// Like `restrict`, with an explicit lower bound on the reference norm
/// used by the aliasing gate. Internal callers that know the natural
/// scale of the surrounding computation (for instance the unit-size basis
/// functions of the inductive solver) pass that scale, so restrictions of
/// absolutely negligible data are not rejected for having poor relative
/// spectral decay.
pub(crate) fn restrict_with_floor(
    f: &HoloFunction,
    domain: &CircleDomain,
    cutoff: usize,
    floor: f64,
) -> Result<BoundaryFunction> {
    let mut parts = Vec::with_capacity(domain.n_components());
    let mut masses = Vec::with_capacity(domain.n_components());
    let mut total_sq = 0.0;
    for j in 0..domain.n_components() {
        let (cf, mass, norm) =
            restrict_component_raw(f, domain.circle(j)?, j, domain.sign(j)?, cutoff)?;
        total_sq += norm * norm;
        parts.push(cf);
        masses.push(mass);
    }
    let reference = total_sq.sqrt().max(floor);
    for (j, mass) in masses.into_iter().enumerate() {
        boundary::alias_gate(j, mass, reference)?;
    }
    BoundaryFunction::from_components(parts)
}

/// T F = P_in of the boundary restriction: the part of the trace seen by
/// the spinor boundary condition.
pub fn t_apply(f: &HoloFunction, domain: &CircleDomain, cutoff: usize) -> Result<BoundaryFunction> {
    Ok(restrict(f, domain, cutoff)?.project(Side::In))
}

/// U F = P_out of the boundary restriction.
pub fn u_apply(f: &HoloFunction, domain: &CircleDomain, cutoff: usize) -> Result<BoundaryFunction> {
    Ok(restrict(f, domain, cutoff)?.project(Side::Out))
}

/// Oriented contour integral of F^2 over one boundary circle, with the
/// domain's boundary orientation (outer counterclockwise, holes
/// clockwise). Uniform trapezoid rule, spectrally accurate for analytic F.
pub fn contour_integral_sq(
    f: &HoloFunction,
    circle: &Circle,
    sign: ComponentSign,
    samples: usize,
) -> Result<Complex64> {
    let orientation = sign.factor();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
        let z = circle.point_at(theta);
        let v = f.eval_raw(z)?;
        acc += v * v * Complex64::from_polar(1.0, theta);
    }
    let h = 2.0 * std::f64::consts::PI / samples as f64;
    Ok(acc * Complex64::new(0.0, circle.radius * h) * orientation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CircleDomain;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn annulus(r_in: f64, r_out: f64) -> CircleDomain {
        CircleDomain::new(
            Circle::new(c(0.0, 0.0), r_out).unwrap(),
            vec![Circle::new(c(0.0, 0.0), r_in).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn blocks_evaluate_like_laurent_series() {
        // F(z) = 3 + 2(z-1) + (z-1)^2 + 5/z - i/z^2
        let mut f = HoloFunction::from_taylor(c(1.0, 0.0), vec![c(3.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        f.add_scaled(
            &HoloFunction::from_principal(c(0.0, 0.0), vec![c(5.0, 0.0), c(0.0, -1.0)]),
            1.0,
        );
        let z = c(0.7, -0.4);
        let w = z - c(1.0, 0.0);
        let expect = c(3.0, 0.0) + c(2.0, 0.0) * w + w * w + c(5.0, 0.0) / z - c(0.0, 1.0) / (z * z);
        assert_relative_eq!((f.eval_raw(z).unwrap() - expect).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn eval_at_pole_errors() {
        let f = HoloFunction::from_principal(c(0.5, 0.0), vec![c(1.0, 0.0)]);
        assert!(matches!(
            f.eval_raw(c(0.5, 0.0)),
            Err(Error::PoleAtPoint { .. })
        ));
    }

    #[test]
    fn evaluate_checks_domain() {
        let dom = annulus(1.0, 2.0);
        let f = HoloFunction::monomial(-1).with_domain(dom);
        assert_relative_eq!(
            (f.evaluate(c(1.5, 0.0)).unwrap() - c(2.0 / 3.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            f.evaluate(c(0.5, 0.0)),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(matches!(
            f.evaluate(c(2.5, 0.0)),
            Err(Error::OutsideDomain { .. })
        ));
        // boundary points are not interior
        assert!(matches!(
            f.evaluate(c(2.0, 0.0)),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn evaluate_needs_domain() {
        let f = HoloFunction::monomial(1);
        assert!(matches!(f.evaluate(c(0.0, 0.0)), Err(Error::BadInput(_))));
    }

    #[test]
    fn transport_matches_direct_composition() {
        // child(w) = w^2, map z -> 2z + 1, weight sqrt(2).
        let map = MoebiusMap::affine(c(2.0, 0.0), c(1.0, 0.0)).unwrap();
        let g = HoloFunction::transported(map.clone(), HoloFunction::monomial(2));
        let z = c(0.3, 0.8);
        let expect = map.spinor_weight(z).unwrap() * (c(2.0, 0.0) * z + c(1.0, 0.0)).powi(2);
        assert_relative_eq!((g.eval_raw(z).unwrap() - expect).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn add_scaled_merges_children_with_identical_maps() {
        let map = MoebiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let mut f = HoloFunction::transported(map.clone(), HoloFunction::monomial(1));
        let g = HoloFunction::transported(map, HoloFunction::monomial(2));
        f.add_scaled(&g, 2.0);
        assert_eq!(f.children().len(), 1);
        // and a different map stays a separate child
        let other = MoebiusMap::affine(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        f.add_scaled(&HoloFunction::transported(other, HoloFunction::monomial(0)), 1.0);
        assert_eq!(f.children().len(), 2);
        // value check of the merged sum at a point
        let z = c(0.4, 0.2);
        let w = 1.0 / z;
        let s = f.children()[0].map.spinor_weight(z).unwrap();
        let expect_first = s * (w + 2.0 * w * w);
        let s2 = f.children()[1].map.spinor_weight(z).unwrap();
        let expect = expect_first + s2;
        assert_relative_eq!((f.eval_raw(z).unwrap() - expect).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn restriction_of_laurent_series_has_expected_modes() {
        // F = 1/z on the circle |z| = 2: single mode k = -1 with value 1/2.
        let dom = annulus(1.0, 2.0);
        let f = HoloFunction::monomial(-1);
        let bf = restrict(&f, &dom, 6).unwrap();
        assert_relative_eq!(
            (bf.component(0).coeff(-1) - c(0.5, 0.0)).norm(),
            0.0,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            (bf.component(1).coeff(-1) - c(1.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-13
        );
        assert_relative_eq!(bf.component(0).coeff(0).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn t_apply_of_key_basis_element_on_annulus() {
        // F = 1/z + 1/2 on the annulus 1 < |z| < 2: its in-projection
        // vanishes on the outer circle and equals (3/4)(1 + e^{-i theta})
        // on the hole.
        let dom = annulus(1.0, 2.0);
        let mut f = HoloFunction::monomial(-1);
        f.add_scaled(&HoloFunction::from_taylor(c(0.0, 0.0), vec![c(0.5, 0.0)]), 1.0);
        let t = t_apply(&f, &dom, 8).unwrap();
        for k in -8..=8i64 {
            assert_relative_eq!(t.component(0).coeff(k).norm(), 0.0, epsilon = 1e-12);
        }
        assert_relative_eq!((t.component(1).coeff(0) - c(0.75, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!((t.component(1).coeff(-1) - c(0.75, 0.0)).norm(), 0.0, epsilon = 1e-12);
        let mut rest: f64 = 0.0;
        for k in -8..=8i64 {
            if k != 0 && k != -1 {
                rest = rest.max(t.component(1).coeff(k).norm());
            }
        }
        assert!(rest <= 1e-12);
    }

    #[test]
    fn oriented_boundary_integrals_of_holomorphic_square_cancel() {
        // F holomorphic on the domain: the oriented sum of the component
        // integrals of F^2 vanishes (deformation through the interior).
        let outer = Circle::new(c(0.0, 0.0), 4.0).unwrap();
        let h1 = Circle::new(c(-1.5, 0.0), 0.6).unwrap();
        let h2 = Circle::new(c(1.5, 1.0), 0.5).unwrap();
        let dom = CircleDomain::new(outer, vec![h1, h2]).unwrap();
        let mut f = HoloFunction::from_principal(c(-1.5, 0.0), vec![c(1.0, 0.0)]);
        f.add_scaled(
            &HoloFunction::from_principal(c(1.5, 1.0), vec![c(0.0, 0.0), c(3.0, 0.0)]),
            1.0,
        );
        f.add_scaled(&HoloFunction::monomial(1), 0.25);
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..dom.n_components() {
            total += contour_integral_sq(
                &f,
                dom.circle(j).unwrap(),
                dom.sign(j).unwrap(),
                512,
            )
            .unwrap();
        }
        assert_relative_eq!(total.norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn contour_integral_picks_up_residue() {
        // F = 1/z + 1: F^2 has residue 2 at the origin.
        let mut f = HoloFunction::monomial(-1);
        f.add_scaled(&HoloFunction::monomial(0), 1.0);
        let circle = Circle::new(c(0.0, 0.0), 1.0).unwrap();
        let v = contour_integral_sq(&f, &circle, ComponentSign::Outer, 256).unwrap();
        let expect = c(0.0, 4.0 * std::f64::consts::PI);
        assert_relative_eq!((v - expect).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn out_trace_squares_to_positive_density() {
        // If the trace of F on a circle lies in L^2_out, then F = rho nu^{-1/2}
        // pointwise with rho real, and (1/i) F^2 (dz/dtheta)_oriented equals
        // |F|^2 r >= 0. Outer circle: F = 1 + r/z with r = 1.5.
        let r = 1.5;
        let mut f = HoloFunction::monomial(-1);
        f.scale(r);
        f.add_scaled(&HoloFunction::monomial(0), 1.0);
        let circle = Circle::new(c(0.0, 0.0), r).unwrap();
        for i in 0..40 {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / 40.0;
            let z = circle.point_at(theta);
            let v = f.eval_raw(z).unwrap();
            let dz_dtheta = Complex64::new(0.0, r) * Complex64::from_polar(1.0, theta);
            let lhs = v * v * dz_dtheta / Complex64::new(0.0, 1.0);
            assert_relative_eq!(lhs.im, 0.0, epsilon = 1e-12);
            assert_relative_eq!(lhs.re, v.norm_sqr() * r, epsilon = 1e-12);
        }
        // Hole version with the clockwise orientation: F = 1 - r/(z - a).
        let a = c(0.3, -0.2);
        let rh = 0.8;
        let mut g = HoloFunction::from_principal(a, vec![c(-rh, 0.0)]);
        g.add_scaled(&HoloFunction::monomial(0), 1.0);
        let hole = Circle::new(a, rh).unwrap();
        for i in 0..40 {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / 40.0;
            let z = hole.point_at(theta);
            let v = g.eval_raw(z).unwrap();
            let dz_dtheta =
                Complex64::new(0.0, rh) * Complex64::from_polar(1.0, theta) * (-1.0);
            let lhs = v * v * dz_dtheta / Complex64::new(0.0, 1.0);
            assert_relative_eq!(lhs.im, 0.0, epsilon = 1e-12);
            assert_relative_eq!(lhs.re, v.norm_sqr() * rh, epsilon = 1e-12);
        }
    }

    #[test]
    fn transport_preserves_boundary_line_fields() {
        // M(w) = 1/w maps the circle |w| = 1/2 (a hole of the w-domain)
        // onto |z| = 2 (the outer circle of the z-domain). The transported
        // G = s (F o M) satisfies the squared line-field identity
        // (s nu~_half)^2 = |M'| (nu_half o M)^2 and the modulus identity
        // |Im(G nu~_half)| = sqrt(|M'|) |Im(F nu_half o M)|.
        let zdom = annulus(1.0, 2.0);
        let wdom = CircleDomain::new(
            Circle::new(c(0.0, 0.0), 1.0).unwrap(),
            vec![Circle::new(c(0.0, 0.0), 0.5).unwrap()],
        )
        .unwrap();
        let map = MoebiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let mut f = HoloFunction::from_taylor(c(0.0, 0.0), vec![c(0.3, 0.1), c(1.0, 0.0)]);
        f.add_scaled(&HoloFunction::monomial(-1), 0.7);
        let g = HoloFunction::transported(map.clone(), f.clone());
        let wcircle = Circle::new(c(0.0, 0.0), 0.5).unwrap();
        for i in 0..64 {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
            let w = wcircle.point_at(phi);
            let z = map.apply(w).unwrap();
            let dm = map.derivative(w).unwrap();
            let (_nw, nw_half) = wdom.outward_normal(1, phi).unwrap();
            let theta = z.arg();
            let (nz, nz_half) = zdom.outward_normal(0, theta).unwrap();
            let s = map.spinor_weight(w).unwrap();
            // squared line-field identity
            let lhs = (s * nw_half) * (s * nw_half);
            let rhs = dm.norm() * nz * Complex64::new(1.0, 0.0);
            assert_relative_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-12);
            // modulus identity for the boundary condition density
            let gv = g.eval_raw(w).unwrap();
            let fv = f.eval_raw(z).unwrap();
            assert_relative_eq!(
                (gv * nw_half).im.abs(),
                dm.norm().sqrt() * (fv * nz_half).im.abs(),
                epsilon = 1e-11
            );
        }
    }
}
