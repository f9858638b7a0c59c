//! Independent least-squares collocation solver for the spinor boundary
//! condition, used as ground truth against the inductive solver.
//!
//! The ansatz is a global Laurent-type basis: Taylor powers about the
//! outer center plus inverse powers about each hole center. Each
//! collocation node contributes one real equation Im((F - f) nu^{1/2}) = 0,
//! weighted by arc length; the overdetermined real system is solved by
//! column-pivoted QR after sup-norm column scaling.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::boundary::BoundaryFunction;
use crate::error::{Error, Result};
use crate::geometry::CircleDomain;
use crate::holo::HoloFunction;

/// Condition limit of the scaled collocation matrix.
pub const COND_LIMIT: f64 = 1e10;

/// Fit summary: worst pointwise defect of the boundary condition over the
/// collocation nodes, and the condition estimate of the scaled system.
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    pub max_residual: f64,
    pub condition: f64,
}

/// One complex basis function: a Taylor power about the outer center or
/// an inverse power about a hole center.
enum BasisElement {
    Taylor { center: Complex64, m: usize },
    Principal { center: Complex64, k: usize },
}

impl BasisElement {
    fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            BasisElement::Taylor { center, m } => (z - center).powu(*m as u32),
            BasisElement::Principal { center, k, .. } => (z - center).powi(-(*k as i32)),
        }
    }
}

/// Pointwise defect Im((F - f) nu^{1/2}) at uniform nodes on every circle;
/// returns the maximum absolute value.
pub fn boundary_defect(
    f_sol: &HoloFunction,
    data: &BoundaryFunction,
    domain: &CircleDomain,
    nodes: usize,
    offset: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for c in 0..domain.n_components() {
        let circle = domain.circle(c)?;
        for i in 0..nodes {
            let theta = 2.0 * std::f64::consts::PI * (i as f64 + offset) / nodes as f64;
            let z = circle.point_at(theta);
            let (_, nu_half) = domain.outward_normal(c, theta)?;
            let fv = data
                .component(c)
                .eval_on_circle(Complex64::from_polar(1.0, theta));
            let d = ((f_sol.eval_raw(z)? - fv) * nu_half).im.abs();
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

/// Least-squares solve of the boundary condition with Taylor degree
/// `degrees.0` and per-hole inverse-power degree `degrees.1`.
pub fn solve_ls(
    domain: &CircleDomain,
    f: &BoundaryFunction,
    degrees: (usize, usize),
    oversample: usize,
) -> Result<(HoloFunction, OracleReport)> {
    let (m_t, n_p) = degrees;
    if m_t == 0 || n_p == 0 {
        return Err(Error::BadInput("basis degrees must be positive".into()));
    }
    if oversample < 2 {
        return Err(Error::BadInput(format!(
            "oversample factor must be at least 2, got {oversample}"
        )));
    }
    if f.components().len() != domain.n_components() {
        return Err(Error::BadInput(format!(
            "data has {} components, domain has {}",
            f.components().len(),
            domain.n_components()
        )));
    }
    let nodes = oversample * (2 * m_t.max(n_p) + 1);
    let n_comp = domain.n_components();
    let n_holes = n_comp - 1;

    let mut basis: Vec<BasisElement> = Vec::with_capacity(m_t + 1 + n_holes * n_p);
    let outer_center = domain.outer().center;
    for m in 0..=m_t {
        basis.push(BasisElement::Taylor {
            center: outer_center,
            m,
        });
    }
    for hole in 1..n_comp {
        let center = domain.circle(hole)?.center;
        for k in 1..=n_p {
            basis.push(BasisElement::Principal { center, k });
        }
    }

    // One row of complex basis values and data per node, assembled in
    // parallel; each yields one real equation.
    struct Row {
        values: Vec<Complex64>,
        rhs: f64,
        weight: f64,
    }
    let node_list: Vec<(usize, usize)> = (0..n_comp)
        .flat_map(|c| (0..nodes).map(move |i| (c, i)))
        .collect();
    let rows = node_list
        .par_iter()
        .map(|&(c, i)| -> Result<Row> {
            let circle = domain.circle(c)?;
            let theta = 2.0 * std::f64::consts::PI * i as f64 / nodes as f64;
            let z = circle.point_at(theta);
            let (_, nu_half) = domain.outward_normal(c, theta)?;
            let values: Vec<Complex64> = basis.iter().map(|b| b.eval(z) * nu_half).collect();
            let fv = f
                .component(c)
                .eval_on_circle(Complex64::from_polar(1.0, theta));
            let weight = (2.0 * std::f64::consts::PI * circle.radius / nodes as f64).sqrt();
            Ok(Row {
                values,
                rhs: (fv * nu_half).im,
                weight,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Sup-norm column scaling tames the exponential spread of the inverse
    // powers across circles of different radii.
    let n_basis = basis.len();
    let mut sup = vec![0.0f64; n_basis];
    for row in &rows {
        for (b, v) in row.values.iter().enumerate() {
            sup[b] = sup[b].max(v.norm());
        }
    }
    for s in sup.iter_mut() {
        if *s == 0.0 {
            *s = 1.0;
        }
    }

    let n_rows = rows.len();
    let n_cols = 2 * n_basis;
    let mut a = DMatrix::<f64>::zeros(n_rows, n_cols);
    let mut b = DVector::<f64>::zeros(n_rows);
    for (r, row) in rows.iter().enumerate() {
        for (i, v) in row.values.iter().enumerate() {
            let scaled = v / sup[i];
            // Coefficient x = xi + i eta contributes xi Im(b nu) + eta Re(b nu).
            a[(r, 2 * i)] = row.weight * scaled.im;
            a[(r, 2 * i + 1)] = row.weight * scaled.re;
        }
        b[r] = row.weight * row.rhs;
    }

    let qr = a.col_piv_qr();
    let r_factor = qr.r();
    let diag = r_factor.diagonal();
    let d_max = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let d_min = diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    let condition = if d_min > 0.0 {
        d_max / d_min
    } else {
        f64::INFINITY
    };
    if condition > COND_LIMIT {
        return Err(Error::RankDeficient { cond: condition });
    }
    let mut x = qr.q().transpose() * &b;
    if !r_factor.solve_upper_triangular_mut(&mut x) {
        return Err(Error::BadInput(
            "least-squares solve failed: singular triangular factor".into(),
        ));
    }
    qr.p().inv_permute_rows(&mut x);

    // Unscale and pack into evaluator blocks.
    let coeff = |i: usize| Complex64::new(x[2 * i], x[2 * i + 1]) / sup[i];
    let taylor: Vec<Complex64> = (0..=m_t).map(coeff).collect();
    let mut sol = HoloFunction::from_taylor(outer_center, taylor);
    for hole in 1..n_comp {
        let center = domain.circle(hole)?.center;
        let offset = m_t + 1 + (hole - 1) * n_p;
        let principal: Vec<Complex64> = (0..n_p).map(|k| coeff(offset + k)).collect();
        sol.add_scaled(&HoloFunction::from_principal(center, principal), 1.0);
    }
    let sol = sol.with_domain(domain.clone());

    let max_residual = boundary_defect(&sol, f, domain, nodes, 0.0)?;
    Ok((sol, OracleReport { max_residual, condition }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundaryFunction, Side};
    use crate::geometry::Circle;
    use crate::holo;
    use crate::solver;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn annulus() -> CircleDomain {
        CircleDomain::new(
            Circle::new(c(0.0, 0.0), 2.0).unwrap(),
            vec![Circle::new(c(0.0, 0.0), 1.0).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn recovers_representable_function() {
        // f = R(G) for G = z^2: exactly representable, so the minimizer is
        // G itself by uniqueness.
        let domain = annulus();
        let mut g = HoloFunction::monomial(2);
        g.add_scaled(&HoloFunction::monomial(0), -0.5);
        let f = holo::restrict(&g, &domain, 32).unwrap();
        let (sol, report) = solve_ls(&domain, &f, (8, 4), 2).unwrap();
        for &z in &[c(1.2, 0.3), c(-1.5, 0.4), c(0.1, 1.8)] {
            assert!(
                (sol.eval_raw(z).unwrap() - g.eval_raw(z).unwrap()).norm() <= 1e-10,
                "mismatch at {z}"
            );
        }
        assert!(report.max_residual <= 1e-10);
        assert!(report.condition < COND_LIMIT);
    }

    #[test]
    fn zero_data_gives_zero_min_norm_solution() {
        let domain = annulus();
        let f = BoundaryFunction::zeros(&domain, 16);
        let (sol, report) = solve_ls(&domain, &f, (8, 4), 2).unwrap();
        for &z in &[c(1.3, 0.0), c(0.0, -1.5)] {
            assert!(sol.eval_raw(z).unwrap().norm() <= 1e-12);
        }
        assert!(report.max_residual <= 1e-12);
    }

    #[test]
    fn constant_data_matches_inductive_solver() {
        let domain = annulus();
        let mut f = BoundaryFunction::zeros(&domain, 64);
        *f.component_mut(0).coeff_mut(0) = c(1.0, 0.0);
        *f.component_mut(1).coeff_mut(0) = c(1.0, 0.0);
        let (ls, report) = solve_ls(&domain, &f, (32, 32), 2).unwrap();
        assert!(report.max_residual <= 1e-8, "residual {}", report.max_residual);
        let solver = solver::build_solver(&domain, 32, 64).unwrap();
        let ind = solver.solve(&f).unwrap();
        for &z in &[c(1.4, 0.2), c(-0.3, 1.6), c(-1.7, -0.6)] {
            assert!(
                (ls.eval_raw(z).unwrap() - ind.evaluate(z).unwrap()).norm() <= 1e-6,
                "solver mismatch at {z}"
            );
        }
    }

    #[test]
    fn held_out_nodes_see_comparable_residual() {
        let domain = annulus();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut f = BoundaryFunction::zeros(&domain, 32);
        for j in 0..2 {
            for k in -6..=6i64 {
                *f.component_mut(j).coeff_mut(k) =
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let f = f.project(Side::In);
        let degrees = (12usize, 12usize);
        let (sol, report) = solve_ls(&domain, &f, degrees, 2).unwrap();
        let nodes = 2 * (2 * 12 + 1);
        let held_out = boundary_defect(&sol, &f, &domain, nodes, 0.5).unwrap();
        assert!(
            held_out <= 10.0 * report.max_residual,
            "held out {held_out} vs fitted {}",
            report.max_residual
        );
    }

    #[test]
    fn invariant_under_oversampling_and_hole_order() {
        let outer = Circle::new(c(0.0, 0.0), 3.0).unwrap();
        let h1 = Circle::new(c(-1.2, 0.0), 0.6).unwrap();
        let h2 = Circle::new(c(1.4, 0.3), 0.5).unwrap();
        let d12 = CircleDomain::new(outer, vec![h1, h2]).unwrap();
        let d21 = CircleDomain::new(outer, vec![h2, h1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut f12 = BoundaryFunction::zeros(&d12, 24);
        for j in 0..3 {
            for k in -4..=4i64 {
                *f12.component_mut(j).coeff_mut(k) =
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        // Same data with the hole components swapped to match d21's order.
        let mut f21 = BoundaryFunction::zeros(&d21, 24);
        for (dst, src) in [(0usize, 0usize), (1, 2), (2, 1)] {
            for k in -24..=24i64 {
                *f21.component_mut(dst).coeff_mut(k) = f12.component(src).coeff(k);
            }
        }
        let (a, _) = solve_ls(&d12, &f12, (10, 8), 2).unwrap();
        let (b, _) = solve_ls(&d12, &f12, (10, 8), 4).unwrap();
        let (g, _) = solve_ls(&d21, &f21, (10, 8), 2).unwrap();
        for &z in &[c(2.2, 0.4), c(-0.1, -2.0), c(0.3, 0.9)] {
            let va = a.eval_raw(z).unwrap();
            assert!((va - b.eval_raw(z).unwrap()).norm() <= 1e-8, "oversample at {z}");
            assert!((va - g.eval_raw(z).unwrap()).norm() <= 1e-8, "hole order at {z}");
        }
    }

    #[test]
    fn validates_inputs() {
        let domain = annulus();
        let f = BoundaryFunction::zeros(&domain, 8);
        assert!(matches!(
            solve_ls(&domain, &f, (0, 4), 2),
            Err(Error::BadInput(_))
        ));
        assert!(matches!(
            solve_ls(&domain, &f, (4, 4), 1),
            Err(Error::BadInput(_))
        ));
    }
}
