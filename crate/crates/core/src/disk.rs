//! Closed-form solver for the spinor boundary condition on a disk.
//!
//! On the unit disk the condition Im((F - f) nu^{1/2}) = 0 with data in
//! L^2_in has the explicit inverse F = 2 sum_{k >= 0} c_k z^k: doubling
//! the nonnegative modes reproduces exactly the in-projection of the
//! trace (the self-paired top mode of the truncated band is carried
//! undoubled). A general disk C(a, r) reduces to the unit disk by the affine
//! change of variable u = (z - a)/r; the spinor weights sqrt(r) and
//! 1/sqrt(r) of the two transports cancel against each other, leaving
//! F(z) = 2 sum c_k ((z - a)/r)^k in the original coordinates.

use num_complex::Complex64;

use crate::boundary::{ComponentFunction, Side};
use crate::error::{Error, Result};
use crate::geometry::{Circle, CircleDomain, ComponentSign};
use crate::holo::HoloFunction;

/// Relative size of the out-of-space part above which data is rejected.
pub const TOL_IN: f64 = 1e-8;

/// Solves on a general disk. The data must be labeled with the outer
/// sign (a disk's boundary is an outer circle) and lie in L^2_in up to
/// `TOL_IN` relative; marginally off inputs are projected rather than
/// rejected, so downstream assembly can feed numerically projected data.
pub fn solve_disk(circle: &Circle, data: &ComponentFunction) -> Result<HoloFunction> {
    if data.sign != ComponentSign::Outer {
        return Err(Error::BadInput(
            "disk data must carry the outer component sign".into(),
        ));
    }
    let norm = data.l2_norm();
    let residual = data.membership_residual(Side::In);
    if residual > TOL_IN * norm && norm > 0.0 {
        return Err(Error::NotInLIn {
            residual: residual / norm,
            tol: TOL_IN,
        });
    }
    let c = data.project(Side::In);
    let m = c.cutoff() as i64;
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    let mut radial = 1.0;
    for k in 0..=m {
        // The top mode of the truncated band is self-paired by the cyclic
        // projector convention, so it enters with factor 1, not 2; genuine
        // band-limited in-data has no mass there anyway. This keeps the
        // discrete identity P_in[R(F)] = data exact at every mode.
        let factor = if k == m { 1.0 } else { 2.0 };
        coeffs.push(c.coeff(k) * factor * radial);
        radial /= circle.radius;
    }
    let domain = CircleDomain::disk(*circle);
    Ok(HoloFunction::from_taylor(circle.center, coeffs).with_domain(domain))
}

/// Unit-disk specialization.
pub fn solve_unit_disk(data: &ComponentFunction) -> Result<HoloFunction> {
    let unit = Circle::new(Complex64::new(0.0, 0.0), 1.0).expect("unit circle");
    solve_disk(&unit, data)
}
