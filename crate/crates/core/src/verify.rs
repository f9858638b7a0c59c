//! Seeded end-to-end verification: solves random problems on a given
//! domain and checks the structural invariants (roundtrip accuracy,
//! superposition, operator spectra, metric positivity, agreement with the
//! least-squares oracle). Shared by the CLI `verify` subcommand and the
//! acceptance tests; identical seeds reproduce identical reports.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{BoundaryFunction, Side};
use crate::error::{Error, Result};
use crate::geometry::CircleDomain;
use crate::holo;
use crate::metric;
use crate::oracle;
use crate::solver::{build_solver, ComponentSolver, SolverOperator};

/// Default seed for the CLI suite.
pub const DEFAULT_SEED: u64 = 7;

/// Degrees of the least-squares comparison solve.
const ORACLE_DEGREES: (usize, usize) = (40, 40);

/// One invariant check: passes when `value <= threshold` (and is finite).
#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, threshold: f64) -> VerifyCheck {
    VerifyCheck {
        name,
        value,
        threshold,
        pass: value.is_finite() && value <= threshold,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub modes: usize,
    pub cutoff: usize,
    pub all_pass: bool,
    pub checks: Vec<VerifyCheck>,
}

/// Fixed-width pass/fail table for terminal output.
pub fn render_table(report: &VerifyReport) -> String {
    let mut out = format!(
        "verification: seed {}, {} modes, cutoff {}\n{:<28} {:>12} {:>12}  result\n",
        report.seed, report.modes, report.cutoff, "check", "value", "threshold"
    );
    for c in &report.checks {
        out.push_str(&format!(
            "{:<28} {:>12.3e} {:>12.3e}  {}\n",
            c.name,
            c.value,
            c.threshold,
            if c.pass { "pass" } else { "FAIL" }
        ));
    }
    out.push_str(if report.all_pass {
        "all checks passed\n"
    } else {
        "SOME CHECKS FAILED\n"
    });
    out
}

/// Random band-limited data projected onto L^2_in, the solvable subspace.
pub fn random_in_data(
    domain: &CircleDomain,
    cutoff: usize,
    band: i64,
    rng: &mut ChaCha8Rng,
) -> BoundaryFunction {
    let mut f = BoundaryFunction::zeros(domain, cutoff);
    for j in 0..domain.n_components() {
        for k in -band..=band {
            *f.component_mut(j).coeff_mut(k) = Complex64::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
        }
    }
    f.project(Side::In)
}

/// Collects every component solver in the recursion tree, including the
/// components of filled sub-domains.
pub fn walk_components<'a>(op: &'a SolverOperator, out: &mut Vec<&'a ComponentSolver>) {
    for comp in op.components() {
        out.push(comp);
        walk_components(comp.filled(), out);
    }
}

fn roundtrip_check(solver: &SolverOperator, rng: &mut ChaCha8Rng) -> Result<VerifyCheck> {
    let domain = solver.domain();
    let band = (solver.n_neg() as i64 / 4).clamp(2, 8);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let f = random_in_data(domain, solver.cutoff(), band, rng);
        let (_, report) = solver.solve_with_report(&f)?;
        worst = worst.max(report.in_residual / report.data_norm);
    }
    Ok(check("roundtrip_residual", worst, 1e-6))
}

fn superposition_check(solver: &SolverOperator, rng: &mut ChaCha8Rng) -> Result<VerifyCheck> {
    let domain = solver.domain();
    let band = (solver.n_neg() as i64 / 4).clamp(2, 6);
    let mut worst = 0.0f64;
    for j in 0..domain.n_components() {
        let mut f = BoundaryFunction::zeros(domain, solver.cutoff());
        for k in -band..=band {
            *f.component_mut(j).coeff_mut(k) = Complex64::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
        }
        let f = f.project(Side::In);
        let data_norm = f.norm(domain);
        if data_norm == 0.0 {
            continue;
        }
        let sol = solver.solve(&f)?;
        let mut trace_in = holo::restrict(&sol, domain, solver.cutoff())?.project(Side::In);
        let m = solver.cutoff() as i64;
        for k in -m..=m {
            *trace_in.component_mut(j).coeff_mut(k) = Complex64::new(0.0, 0.0);
        }
        worst = worst.max(trace_in.norm(domain) / data_norm);
    }
    Ok(check("superposition_leakage", worst, 1e-6))
}

fn spectrum_checks(solver: &SolverOperator) -> Vec<VerifyCheck> {
    let mut comps = Vec::new();
    walk_components(solver, &mut comps);
    if comps.is_empty() {
        return Vec::new();
    }
    let mut spectrum_defect = 0.0f64;
    let mut q_negativity = 0.0f64;
    for comp in comps {
        let d = comp.diagnostics();
        spectrum_defect = spectrum_defect.max(1.0 - d.min_eig_oot);
        q_negativity = q_negativity.max(-d.min_sym_eig_q);
    }
    vec![
        check("operator_spectrum_defect", spectrum_defect, 1e-6),
        check("q_negativity", q_negativity, 1e-10),
    ]
}

fn metric_checks(solver: &SolverOperator, rng: &mut ChaCha8Rng) -> Result<Vec<VerifyCheck>> {
    let outer = solver.domain().outer();
    let mut min_ell = f64::INFINITY;
    let mut max_im_ratio = 0.0f64;
    let mut collected = 0;
    for _ in 0..200 {
        if collected >= 5 {
            break;
        }
        let w = outer.center
            + Complex64::new(
                rng.gen_range(-outer.radius..outer.radius),
                rng.gen_range(-outer.radius..outer.radius),
            );
        match metric::ising_ell(solver, w) {
            Ok(sample) => {
                min_ell = min_ell.min(sample.ell);
                max_im_ratio = max_im_ratio.max(sample.im_residual / sample.ell);
                collected += 1;
            }
            Err(Error::MetricInvariant { ell, im, .. }) => {
                min_ell = min_ell.min(ell);
                if ell > 0.0 {
                    max_im_ratio = max_im_ratio.max(im.abs() / ell);
                }
                collected += 1;
            }
            Err(Error::OutsideDomain { .. }) | Err(Error::PointTooCloseToBoundary { .. }) => {
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    if collected == 0 {
        return Err(Error::BadInput(
            "could not sample any usable interior point for the metric checks".into(),
        ));
    }
    Ok(vec![
        check("metric_positivity_defect", -min_ell, 0.0),
        check("metric_im_residual", max_im_ratio, 1e-6),
    ])
}

fn oracle_check(solver: &SolverOperator, rng: &mut ChaCha8Rng) -> Result<VerifyCheck> {
    let domain = solver.domain();
    let f = random_in_data(domain, solver.cutoff(), 4, rng);
    let sol = solver.solve(&f)?;
    let (ls, _) = oracle::solve_ls(domain, &f, ORACLE_DEGREES, 2)?;
    // Compare on rings pulled slightly inside each boundary circle; the
    // defect there bounds the boundary defect by the maximum principle.
    let delta = (domain.margin() / 4.0).min(0.05);
    let nodes = 64;
    let mut sup_diff = 0.0f64;
    let mut sup_ref = 0.0f64;
    for j in 0..domain.n_components() {
        let circle = domain.circle(j)?;
        let r = match domain.sign(j)? {
            crate::geometry::ComponentSign::Outer => circle.radius - delta,
            crate::geometry::ComponentSign::Hole => circle.radius + delta,
        };
        for i in 0..nodes {
            let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.37) / nodes as f64;
            let z = circle.center + Complex64::from_polar(r, th);
            let a = sol.eval_raw(z)?;
            let b = ls.eval_raw(z)?;
            sup_diff = sup_diff.max((a - b).norm());
            sup_ref = sup_ref.max(b.norm());
        }
    }
    let value = if sup_ref > 0.0 {
        sup_diff / sup_ref
    } else {
        sup_diff
    };
    Ok(check("oracle_disagreement", value, 1e-6))
}

/// Runs the full invariant suite with seeded randomness.
pub fn run_verification(
    domain: &CircleDomain,
    n_neg: usize,
    cutoff: usize,
    seed: u64,
) -> Result<VerifyReport> {
    let solver = build_solver(domain, n_neg, cutoff)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    checks.push(roundtrip_check(&solver, &mut rng)?);
    if domain.n_components() > 1 {
        checks.push(superposition_check(&solver, &mut rng)?);
    }
    checks.extend(spectrum_checks(&solver));
    checks.extend(metric_checks(&solver, &mut rng)?);
    checks.push(oracle_check(&solver, &mut rng)?);
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        seed,
        modes: n_neg,
        cutoff,
        all_pass,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Circle;

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
    fn annulus_suite_passes_at_default_seed() {
        let report = run_verification(&annulus(), 32, 64, DEFAULT_SEED).unwrap();
        assert!(
            report.all_pass,
            "failing checks: {:?}",
            report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .collect::<Vec<_>>()
        );
        let names: Vec<&str> = report.checks.iter().map(|c| c.name).collect();
        assert_eq!(
            names,
            [
                "roundtrip_residual",
                "superposition_leakage",
                "operator_spectrum_defect",
                "q_negativity",
                "metric_positivity_defect",
                "metric_im_residual",
                "oracle_disagreement"
            ]
        );
    }

    #[test]
    fn identical_seeds_reproduce_identical_reports() {
        let a = run_verification(&annulus(), 16, 32, 11).unwrap();
        let b = run_verification(&annulus(), 16, 32, 11).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        let c = run_verification(&annulus(), 16, 32, 12).unwrap();
        let jc = serde_json::to_string(&c).unwrap();
        assert_ne!(ja, jc);
    }

    #[test]
    fn disk_suite_runs_without_multi_checks() {
        let disk = CircleDomain::disk(Circle::new(c(0.3, 0.0), 1.5).unwrap());
        let report = run_verification(&disk, 16, 32, 5).unwrap();
        let names: Vec<&str> = report.checks.iter().map(|c| c.name).collect();
        assert!(!names.contains(&"superposition_leakage"));
        assert!(!names.contains(&"operator_spectrum_defect"));
        assert!(report.all_pass, "checks: {:?}", report.checks);
    }

    #[test]
    fn table_rendering_reports_failures_loudly() {
        let report = VerifyReport {
            seed: 3,
            modes: 8,
            cutoff: 16,
            all_pass: false,
            checks: vec![
                VerifyCheck {
                    name: "roundtrip_residual",
                    value: 2.0e-3,
                    threshold: 1e-6,
                    pass: false,
                },
                VerifyCheck {
                    name: "q_negativity",
                    value: 0.0,
                    threshold: 1e-10,
                    pass: true,
                },
            ],
        };
        let table = render_table(&report);
        assert!(table.contains("roundtrip_residual"));
        assert!(table.contains("FAIL"));
        assert!(table.contains("SOME CHECKS FAILED"));
    }
}
