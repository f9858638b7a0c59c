//! The induced boundary-condition metric: for an interior point w, solve
//! the spinor boundary problem with data -1/(z - w), so that
//! G(z, w) = 1/(z - w) + H_w(z) satisfies the condition on the whole
//! boundary, and read off ell(w) = H_w(w) (the regular part at the pole,
//! no numerical limit needed). On concentric annuli ell has a closed-form
//! Laurent series used as a golden reference.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::holo::{self, HoloFunction};
use crate::solver::SolverOperator;

/// Fraction of the domain margin below which evaluation points are
/// rejected: the data spectrum on the nearest circle decays like the
/// distance ratio, so points essentially touching the boundary cannot be
/// resolved at any fixed cutoff.
pub const DISTANCE_GUARD_DIVISOR: f64 = 20.0;

/// Relative bound on the spurious imaginary part of the computed limit.
pub const IM_RESIDUAL_LIMIT: f64 = 1e-6;

/// Largest tolerated spectral tail ratio q^M of the pole data on any
/// boundary circle (q = distance ratio of w to that circle, measured both
/// in the original coordinates and after each component's normalization
/// map). Points whose tail would exceed this cannot be represented
/// cleanly at the solver's cutoff and are rejected as too close.
pub const RESOLVABLE_TAIL: f64 = 3e-4;

/// Annulus reference series flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinStructure {
    Even,
    Odd,
}

/// One metric evaluation: the point, the (strictly positive) metric
/// coefficient, and the magnitude of the imaginary contamination.
#[derive(Debug, Clone, Copy)]
pub struct MetricSample {
    pub w: Complex64,
    pub ell: f64,
    pub im_residual: f64,
}

/// Grid entry: evaluated, or flagged (not errored) when the point is not
/// usable. Solver failures still propagate as errors.
#[derive(Debug, Clone, Copy)]
pub enum GridOutcome {
    Sample(MetricSample),
    Outside { w: Complex64 },
    TooClose { w: Complex64, dist: f64 },
}

/// Metric coefficient at one interior point.
pub fn ising_ell(solver: &SolverOperator, w: Complex64) -> Result<MetricSample> {
    let domain = solver.domain();
    if !domain.contains(w) {
        return Err(Error::OutsideDomain {
            point: format!("{w}"),
        });
    }
    let dist = domain.boundary_distance(w);
    let min = domain.margin() / DISTANCE_GUARD_DIVISOR;
    if dist < min {
        return Err(Error::PointTooCloseToBoundary {
            point: format!("{w}"),
            dist,
            min,
        });
    }
    // The pole data's spectrum on circle j decays geometrically with the
    // distance ratio q_j; at the solver's cutoff the discarded tail is
    // q_j^M, which must stay well under the aliasing gate.
    let m = solver.cutoff() as i32;
    for j in 0..domain.n_components() {
        let circle = domain.circle(j)?;
        let reach = (w - circle.center).norm();
        let q = match domain.sign(j)? {
            crate::geometry::ComponentSign::Outer => reach / circle.radius,
            crate::geometry::ComponentSign::Hole => circle.radius / reach,
        };
        if q.powi(m) > RESOLVABLE_TAIL {
            let q_ok = RESOLVABLE_TAIL.powf(1.0 / m as f64);
            let min_resolvable = match domain.sign(j)? {
                crate::geometry::ComponentSign::Outer => circle.radius * (1.0 - q_ok),
                crate::geometry::ComponentSign::Hole => circle.radius * (1.0 / q_ok - 1.0),
            };
            return Err(Error::PointTooCloseToBoundary {
                point: format!("{w}"),
                dist: circle.signed_distance(w).abs(),
                min: min_resolvable,
            });
        }
    }
    // Each component solve transports the data through that component's
    // normalization map, where the spectral ratio is governed by the image
    // of w relative to the unit circle. Affine hole maps reproduce the
    // raw ratios above, but the outer component's inversion can bring the
    // image much closer to the circle than the point is in the original
    // coordinates; gate on the mapped ratio as well.
    for comp in solver.components() {
        let image = comp.map().apply(w)?;
        let gap = image.norm() - 1.0;
        let q = 1.0 / image.norm();
        if !gap.is_finite() || gap <= 0.0 || q.powi(m) > RESOLVABLE_TAIL {
            let q_ok = RESOLVABLE_TAIL.powf(1.0 / m as f64);
            return Err(Error::PointTooCloseToBoundary {
                point: format!("{w}"),
                dist: gap.max(0.0),
                min: 1.0 / q_ok - 1.0,
            });
        }
    }
    let pole = HoloFunction::from_principal(w, vec![Complex64::new(-1.0, 0.0)]);
    let data = holo::restrict(&pole, domain, solver.cutoff())?;
    let h = solver.solve(&data)?;
    let v = h.evaluate(w)?;
    let sample = MetricSample {
        w,
        ell: v.re,
        im_residual: v.im.abs(),
    };
    if sample.ell <= 0.0 || sample.im_residual > IM_RESIDUAL_LIMIT * sample.ell {
        return Err(Error::MetricInvariant {
            point: format!("{w}"),
            ell: sample.ell,
            im: v.im,
        });
    }
    Ok(sample)
}

/// Metric over a list of points; exterior and boundary-hugging points are
/// flagged in place rather than failing the whole grid.
pub fn metric_grid(solver: &SolverOperator, grid: &[Complex64]) -> Result<Vec<GridOutcome>> {
    grid.par_iter()
        .map(|&w| match ising_ell(solver, w) {
            Ok(sample) => Ok(GridOutcome::Sample(sample)),
            Err(Error::OutsideDomain { .. }) => Ok(GridOutcome::Outside { w }),
            Err(Error::PointTooCloseToBoundary { dist, .. }) => {
                Ok(GridOutcome::TooClose { w, dist })
            }
            Err(e) => Err(e),
        })
        .collect()
}

/// Closed-form reference on the concentric annulus 1 < |z| < R:
///
/// ```text
/// even: sum_{n in Z} |w|^{2n} / (1 + R^{2n+1})
/// odd:  sum_{n in Z} |w|^{2n+1} / (1 + R^{2n})
/// ```
///
/// truncated symmetrically at |n| <= K. Both tails are geometric with
/// ratios |w|^2/R^2 (upward) and 1/|w|^2 (downward); see
/// `annulus_reference_tail_bound`.
pub fn annulus_reference(
    w: Complex64,
    r_outer: f64,
    structure: SpinStructure,
    k_trunc: usize,
) -> Result<f64> {
    let a = w.norm();
    if !r_outer.is_finite() || r_outer <= 1.0 {
        return Err(Error::BadInput(format!(
            "annulus outer radius must exceed 1, got {r_outer}"
        )));
    }
    if a <= 1.0 || a >= r_outer {
        return Err(Error::OutsideDomain {
            point: format!("{w}"),
        });
    }
    let k = k_trunc as i64;
    let mut sum = 0.0;
    for n in -k..=k {
        sum += match structure {
            SpinStructure::Even => a.powi(2 * n as i32) / (1.0 + r_outer.powi(2 * n as i32 + 1)),
            SpinStructure::Odd => a.powi(2 * n as i32 + 1) / (1.0 + r_outer.powi(2 * n as i32)),
        };
    }
    Ok(sum)
}

/// Upper bound on the mass discarded by truncating the reference series
/// at |n| <= K.
pub fn annulus_reference_tail_bound(
    w: Complex64,
    r_outer: f64,
    structure: SpinStructure,
    k_trunc: usize,
) -> f64 {
    let a = w.norm();
    let q_up = (a * a) / (r_outer * r_outer);
    let q_down = 1.0 / (a * a);
    // Upward terms are bounded by |w|^{2n} R^{-2n-1} (even) or
    // |w|^{2n+1} R^{-2n} (odd); downward by |w|^{2n} resp. |w|^{2n+1}.
    let head = match structure {
        SpinStructure::Even => 1.0 / r_outer,
        SpinStructure::Odd => a,
    };
    let up = head * q_up.powi(k_trunc as i32 + 1) / (1.0 - q_up);
    let down_head = match structure {
        SpinStructure::Even => 1.0,
        SpinStructure::Odd => a,
    };
    let down = down_head * q_down.powi(k_trunc as i32 + 1) / (1.0 - q_down);
    up + down
}
