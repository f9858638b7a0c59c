//! Inductive solver for the spinor boundary condition on multiply
//! connected circle domains.
//!
//! For each boundary component j the domain is normalized so that j
//! becomes the unit circle S; gluing the unit disk back in drops the
//! connectivity by one and the solver recurses on that filled domain
//! (base case: the disk). On the distinguished circle the solver works
//! in the basis
//!
//! ```text
//! phi_k^{Re} = z^k - S(P_in[zeta^k]),   phi_k^{Im} = i z^k - S(P_in[i zeta^k]),
//! ```
//!
//! k = -1..-N, where S solves on the filled domain. Each phi has
//! vanishing in-projection on every other component, so matching data on
//! S reduces to the real-linear system (Id + Q) c = 2 F_-(t) with
//! Q = J o F_+ o R_S o Phi; Q is positive semi-definite in the real
//! pairing, which keeps Id + Q invertible at every truncation. The full
//! inverse is the superposition of the per-component solutions.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::boundary::{self, BoundaryFunction, ComponentFunction, Side};
use crate::disk;
use crate::error::{Error, Result};
use crate::geometry::{normalize_component, Circle, CircleDomain, ComponentSign, MoebiusMap};
use crate::holo::{self, HoloFunction};

/// Default number of negative modes per component.
pub const DEFAULT_N_NEG: usize = 64;
/// Relative membership tolerance for solve_component inputs.
pub const TOL_MEMBERSHIP: f64 = 1e-8;
/// Condition-number limit on the factorized component operators.
pub const COND_LIMIT: f64 = 1e8;

/// Default restriction cutoff for a given mode count.
pub fn default_cutoff(n_neg: usize) -> usize {
    2 * n_neg
}

/// How the component systems (Id + Q) c = rhs are inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InversionStrategy {
    /// Dense LU of O.
    #[default]
    Direct,
    /// c = O^T (O O^T)^{-1} rhs; same result, used by the spectrum tests.
    NormalEquations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    Re,
    Im,
}

/// One basis function phi_k^{Re/Im} with its prescribed pole at the
/// distinguished hole.
#[derive(Debug, Clone)]
pub struct PhiBasisElement {
    pub k: i64,
    pub kind: PhiKind,
    pub value: HoloFunction,
}

/// Spectral health of one factorized component operator.
#[derive(Debug, Clone, Copy)]
pub struct ComponentDiagnostics {
    /// Smallest eigenvalue of (Q + Q^T)/2; nonnegative up to roundoff.
    pub min_sym_eig_q: f64,
    /// Smallest eigenvalue of O O^T; at least 1 up to truncation.
    pub min_eig_oot: f64,
    /// Condition number sigma_max / sigma_min of O.
    pub cond: f64,
}

/// Everything needed to solve with data concentrated on one component.
#[derive(Debug, Clone)]
pub struct ComponentSolver {
    j: usize,
    map: MoebiusMap,
    inv_map: MoebiusMap,
    filled_domain: CircleDomain,
    filled: Arc<SolverOperator>,
    phi: Vec<PhiBasisElement>,
    o_matrix: DMatrix<f64>,
    o_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    diagnostics: ComponentDiagnostics,
}

impl ComponentSolver {
    pub fn j(&self) -> usize {
        self.j
    }

    /// Map from the domain into normalized coordinates (component j on
    /// the unit circle).
    pub fn map(&self) -> &MoebiusMap {
        &self.map
    }

    pub fn filled_domain(&self) -> &CircleDomain {
        &self.filled_domain
    }

    pub fn filled(&self) -> &SolverOperator {
        &self.filled
    }

    pub fn phi(&self) -> &[PhiBasisElement] {
        &self.phi
    }

    pub fn o_matrix(&self) -> &DMatrix<f64> {
        &self.o_matrix
    }

    /// Q = O - Id.
    pub fn q_matrix(&self) -> DMatrix<f64> {
        let d = self.o_matrix.nrows();
        &self.o_matrix - DMatrix::<f64>::identity(d, d)
    }

    pub fn diagnostics(&self) -> &ComponentDiagnostics {
        &self.diagnostics
    }
}

/// A built solver: either the disk base case or the recursive stack of
/// per-component operators. Immutable after build and safe to share.
#[derive(Debug, Clone)]
pub enum SolverOperator {
    Disk {
        domain: CircleDomain,
        n_neg: usize,
        cutoff: usize,
    },
    Multi {
        domain: CircleDomain,
        n_neg: usize,
        cutoff: usize,
        strategy: InversionStrategy,
        components: Vec<ComponentSolver>,
    },
}

/// Counts of recursive sub-solver constructions (memoized fills are
/// built once).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub multi_builds: usize,
    pub disk_builds: usize,
}

/// Residual summary attached to a solve: the in-plane part is the actual
/// defect of the boundary condition, the out-of-plane part is the data
/// component the problem does not constrain.
#[derive(Debug, Clone, Copy)]
pub struct SolveReport {
    pub in_residual: f64,
    pub out_residual: f64,
    pub data_norm: f64,
}

struct BuildCtx {
    memo: HashMap<crate::geometry::GeometryKey, Arc<SolverOperator>>,
    strategy: InversionStrategy,
    stats: BuildStats,
}

fn unit_circle() -> Circle {
    Circle::new(Complex64::new(0.0, 0.0), 1.0).expect("unit circle")
}

pub fn build_solver(domain: &CircleDomain, n_neg: usize, cutoff: usize) -> Result<SolverOperator> {
    build_solver_with_stats(domain, n_neg, cutoff, InversionStrategy::Direct).map(|(s, _)| s)
}

pub fn build_solver_with_stats(
    domain: &CircleDomain,
    n_neg: usize,
    cutoff: usize,
    strategy: InversionStrategy,
) -> Result<(SolverOperator, BuildStats)> {
    if n_neg == 0 {
        return Err(Error::BadInput("mode count must be positive".into()));
    }
    if cutoff < 2 * n_neg {
        return Err(Error::BadInput(format!(
            "restriction cutoff {cutoff} must be at least twice the mode count {n_neg}"
        )));
    }
    let mut ctx = BuildCtx {
        memo: HashMap::new(),
        strategy,
        stats: BuildStats::default(),
    };
    let op = build_any(domain, n_neg, cutoff, &mut ctx)?;
    Ok((op, ctx.stats))
}

fn build_any(
    domain: &CircleDomain,
    n_neg: usize,
    cutoff: usize,
    ctx: &mut BuildCtx,
) -> Result<SolverOperator> {
    if domain.is_disk() {
        Ok(SolverOperator::Disk {
            domain: domain.clone(),
            n_neg,
            cutoff,
        })
    } else {
        build_multi(domain, n_neg, cutoff, ctx)
    }
}

fn build_sub(
    domain: &CircleDomain,
    n_neg: usize,
    cutoff: usize,
    ctx: &mut BuildCtx,
) -> Result<Arc<SolverOperator>> {
    let key = domain.fingerprint();
    if let Some(op) = ctx.memo.get(&key) {
        return Ok(op.clone());
    }
    if domain.is_disk() {
        ctx.stats.disk_builds += 1;
    } else {
        ctx.stats.multi_builds += 1;
    }
    let op = Arc::new(build_any(domain, n_neg, cutoff, ctx)?);
    ctx.memo.insert(key, op.clone());
    Ok(op)
}

fn build_multi(
    domain: &CircleDomain,
    n_neg: usize,
    cutoff: usize,
    ctx: &mut BuildCtx,
) -> Result<SolverOperator> {
    let mut components = Vec::with_capacity(domain.n_components());
    for j in 0..domain.n_components() {
        let (map, filled_domain) = normalize_component(domain, j)?;
        let filled = build_sub(&filled_domain, n_neg, cutoff, ctx)?;
        let inv_map = map.inverse()?;
        let specs: Vec<(i64, PhiKind)> = (1..=n_neg)
            .flat_map(|t| {
                let k = -(t as i64);
                [(k, PhiKind::Re), (k, PhiKind::Im)]
            })
            .collect();
        let phi = specs
            .par_iter()
            .map(|&(k, kind)| build_phi(&filled, &filled_domain, k, kind, cutoff))
            .collect::<Result<Vec<_>>>()?;
        let (o_matrix, diagnostics) = assemble_o(&phi, n_neg, cutoff, j)?;
        if diagnostics.cond > COND_LIMIT {
            return Err(Error::IllConditioned {
                component: j,
                cond: diagnostics.cond,
            });
        }
        let o_lu = o_matrix.clone().lu();
        components.push(ComponentSolver {
            j,
            map,
            inv_map,
            filled_domain,
            filled,
            phi,
            o_matrix,
            o_lu,
            diagnostics,
        });
    }
    Ok(SolverOperator::Multi {
        domain: domain.clone(),
        n_neg,
        cutoff,
        strategy: ctx.strategy,
        components,
    })
}

/// Below this norm (relative to the unit scale of z^k on the distinguished
/// circle) the filled-domain correction is numerically zero and is skipped.
const NEGLIGIBLE_CORRECTION: f64 = 1e-13;

fn build_phi(
    filled: &SolverOperator,
    filled_domain: &CircleDomain,
    k: i64,
    kind: PhiKind,
    cutoff: usize,
) -> Result<PhiBasisElement> {
    let mut base = HoloFunction::monomial(k);
    if kind == PhiKind::Im {
        base.scale_complex(Complex64::new(0.0, 1.0));
    }
    // z^k has unit size on the distinguished circle; deep modes restricted
    // to the far circles of the filled domain are exponentially small, so
    // the aliasing gate runs against the unit reference scale.
    let data = holo::restrict_with_floor(&base, filled_domain, cutoff, 1.0)?;
    let size: f64 = data
        .components()
        .iter()
        .map(|c| c.l2_norm().powi(2))
        .sum::<f64>()
        .sqrt();
    let mut value = base;
    if size > NEGLIGIBLE_CORRECTION {
        let correction = filled.solve_floored(&data, 1.0)?;
        value.add_scaled(&correction, -1.0);
    }
    Ok(PhiBasisElement { k, kind, value })
}

/// Column col of Q is J(F_+(R_S(phi_col))) in interleaved coordinates:
/// row pair (2t, 2t+1) holds Re and Im of the mode -1-t entry.
fn assemble_o(
    phi: &[PhiBasisElement],
    n_neg: usize,
    cutoff: usize,
    j: usize,
) -> Result<(DMatrix<f64>, ComponentDiagnostics)> {
    let d = 2 * n_neg;
    let s_circle = unit_circle();
    let mut o = DMatrix::<f64>::identity(d, d);
    for (col, el) in phi.iter().enumerate() {
        let cf = holo::restrict_component(&el.value, &s_circle, j, ComponentSign::Hole, cutoff)?;
        let q_col = cf.nonnegative_part().j_flip();
        for t in 0..n_neg {
            let v = q_col.coeff(-1 - t as i64);
            o[(2 * t, col)] += v.re;
            o[(2 * t + 1, col)] += v.im;
        }
    }
    let q = &o - DMatrix::<f64>::identity(d, d);
    let sym = (&q + q.transpose()) * 0.5;
    let min_sym_eig_q = nalgebra::SymmetricEigen::new(sym).eigenvalues.min();
    let singular = o.clone().svd(false, false).singular_values;
    let s_min = singular.min();
    let s_max = singular.max();
    let cond = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    let diagnostics = ComponentDiagnostics {
        min_sym_eig_q,
        min_eig_oot: s_min * s_min,
        cond,
    };
    Ok((o, diagnostics))
}

/// Phi(c) = sum_k Re(c_k) phi_k^{Re} + Im(c_k) phi_k^{Im} over the basis.
pub fn apply_phi(basis: &[PhiBasisElement], c: &ComponentFunction) -> Result<HoloFunction> {
    let pos = c.nonnegative_part().l2_norm();
    if pos > 1e-12 * c.l2_norm().max(1e-300) {
        return Err(Error::BadInput(
            "apply_phi takes coefficients with negative modes only".into(),
        ));
    }
    let mut g = HoloFunction::zero();
    for el in basis {
        let v = c.coeff(el.k);
        let a = match el.kind {
            PhiKind::Re => v.re,
            PhiKind::Im => v.im,
        };
        if a != 0.0 {
            g.add_scaled(&el.value, a);
        }
    }
    Ok(g)
}

impl SolverOperator {
    pub fn domain(&self) -> &CircleDomain {
        match self {
            SolverOperator::Disk { domain, .. } | SolverOperator::Multi { domain, .. } => domain,
        }
    }

    pub fn n_neg(&self) -> usize {
        match self {
            SolverOperator::Disk { n_neg, .. } | SolverOperator::Multi { n_neg, .. } => *n_neg,
        }
    }

    pub fn cutoff(&self) -> usize {
        match self {
            SolverOperator::Disk { cutoff, .. } | SolverOperator::Multi { cutoff, .. } => *cutoff,
        }
    }

    /// Per-component operators; empty for the disk base case.
    pub fn components(&self) -> &[ComponentSolver] {
        match self {
            SolverOperator::Disk { .. } => &[],
            SolverOperator::Multi { components, .. } => components,
        }
    }

    pub fn component(&self, j: usize) -> Option<&ComponentSolver> {
        self.components().get(j)
    }

    /// Solves with data supported on component j only. The data must lie
    /// in L^2_in of that component up to the membership tolerance.
    pub fn solve_component(&self, j: usize, t: &ComponentFunction) -> Result<HoloFunction> {
        let strategy = match self {
            SolverOperator::Disk { .. } => InversionStrategy::Direct,
            SolverOperator::Multi { strategy, .. } => *strategy,
        };
        self.solve_component_via(j, t, strategy)
    }

    pub fn solve_component_via(
        &self,
        j: usize,
        t: &ComponentFunction,
        strategy: InversionStrategy,
    ) -> Result<HoloFunction> {
        self.solve_component_floored(j, t, strategy, 0.0)
    }

    fn solve_component_floored(
        &self,
        j: usize,
        t: &ComponentFunction,
        strategy: InversionStrategy,
        floor: f64,
    ) -> Result<HoloFunction> {
        match self {
            SolverOperator::Disk { domain, .. } => {
                if j != 0 {
                    return Err(Error::InvalidComponent { j, count: 1 });
                }
                check_membership(t)?;
                disk::solve_disk(domain.outer(), &t.project(Side::In))
            }
            SolverOperator::Multi {
                domain,
                n_neg,
                cutoff,
                components,
                ..
            } => {
                let comp = components.get(j).ok_or(Error::InvalidComponent {
                    j,
                    count: components.len(),
                })?;
                check_membership(t)?;
                let t_in = t.project(Side::In);
                if t_in.l2_norm() == 0.0 {
                    return Ok(HoloFunction::zero().with_domain(domain.clone()));
                }
                let t_s = transport_data_to_s(domain, comp, &t_in, *cutoff, floor)?;
                let d = 2 * n_neg;
                let mut rhs = DVector::<f64>::zeros(d);
                for s in 0..*n_neg {
                    let v = t_s.coeff(-1 - s as i64);
                    rhs[2 * s] = 2.0 * v.re;
                    rhs[2 * s + 1] = 2.0 * v.im;
                }
                let c = match strategy {
                    InversionStrategy::Direct => {
                        comp.o_lu.solve(&rhs).ok_or(Error::IllConditioned {
                            component: j,
                            cond: comp.diagnostics.cond,
                        })?
                    }
                    InversionStrategy::NormalEquations => {
                        let ot = comp.o_matrix.transpose();
                        let oot = &comp.o_matrix * &ot;
                        let y = oot.lu().solve(&rhs).ok_or(Error::IllConditioned {
                            component: j,
                            cond: comp.diagnostics.cond,
                        })?;
                        &ot * y
                    }
                };
                let mut g = HoloFunction::zero();
                for (i, el) in comp.phi.iter().enumerate() {
                    if c[i] != 0.0 {
                        g.add_scaled(&el.value, c[i]);
                    }
                }
                Ok(HoloFunction::transported(comp.map.clone(), g).with_domain(domain.clone()))
            }
        }
    }

    /// Full solve: per-component in-projections, superposed per-component
    /// solutions. Data with a large out-of-plane part is accepted; the
    /// boundary condition only constrains the in-plane part.
    pub fn solve(&self, f: &BoundaryFunction) -> Result<HoloFunction> {
        self.solve_floored(f, 0.0)
    }

    /// Solve with an explicit reference-scale floor for the intermediate
    /// aliasing gates; used by the basis construction, whose data is
    /// exponentially small against a unit external scale.
    pub(crate) fn solve_floored(&self, f: &BoundaryFunction, floor: f64) -> Result<HoloFunction> {
        match self {
            SolverOperator::Disk { domain, .. } => {
                if f.components().len() != 1 {
                    return Err(Error::BadInput(format!(
                        "disk solver takes single-component data, got {}",
                        f.components().len()
                    )));
                }
                disk::solve_disk(domain.outer(), &f.component(0).project(Side::In))
            }
            SolverOperator::Multi {
                domain, strategy, ..
            } => {
                if f.components().len() != domain.n_components() {
                    return Err(Error::BadInput(format!(
                        "data has {} components, domain has {}",
                        f.components().len(),
                        domain.n_components()
                    )));
                }
                let mut total = HoloFunction::zero();
                for j in 0..domain.n_components() {
                    let g = f.component(j).project(Side::In);
                    if g.l2_norm() > 0.0 {
                        let fj = self.solve_component_floored(j, &g, *strategy, floor)?;
                        total.add_scaled(&fj, 1.0);
                    }
                }
                Ok(total.with_domain(domain.clone()))
            }
        }
    }

    /// Solve plus the boundary residual split into the constrained
    /// in-plane part and the unconstrained out-of-plane part.
    pub fn solve_with_report(&self, f: &BoundaryFunction) -> Result<(HoloFunction, SolveReport)> {
        let sol = self.solve(f)?;
        let domain = self.domain();
        let trace = holo::restrict(&sol, domain, f.cutoff())?;
        let diff = trace.sub(f);
        let report = SolveReport {
            in_residual: diff.project(Side::In).norm(domain),
            out_residual: diff.project(Side::Out).norm(domain),
            data_norm: f.norm(domain),
        };
        Ok((sol, report))
    }

    /// Materializes the twisted Hilbert transform W = U o T^{-1} and the
    /// candidate for its inverse, (-j) o W o j, as real matrices.
    ///
    /// Coordinates: an element of L^2_in is encoded by the Re/Im pairs of
    /// its modes -1..-N per component; an element of L^2_out is encoded
    /// by the same coordinates of its j-image (multiplication by i). With
    /// that identification the complex structure j has matrix Id from out
    /// to in and -Id from in to out, so the map identity W j W = j reads
    /// W^2 = -Id at the matrix level, and (-j) o W o j is simply -W.
    pub fn w_transform(&self, cutoff: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let domain = self.domain();
        let n_neg = self.n_neg();
        let nc = domain.n_components();
        let d = 2 * n_neg * nc;
        let mut w = DMatrix::<f64>::zeros(d, d);
        for jj in 0..nc {
            let sigma = domain.sign(jj)?.factor();
            for t in 0..n_neg {
                for (ki, val) in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]
                    .into_iter()
                    .enumerate()
                {
                    let mut bf = BoundaryFunction::zeros(domain, cutoff);
                    *bf.component_mut(jj).coeff_mut(-1 - t as i64) = val;
                    *bf.component_mut(jj).coeff_mut(t as i64) = -sigma * val.conj();
                    let sol = self.solve(&bf)?;
                    let h = holo::u_apply(&sol, domain, cutoff)?;
                    let col = jj * 2 * n_neg + 2 * t + ki;
                    for j2 in 0..nc {
                        for s in 0..n_neg {
                            let v = Complex64::new(0.0, 1.0) * h.component(j2).coeff(-1 - s as i64);
                            w[(j2 * 2 * n_neg + 2 * s, col)] = v.re;
                            w[(j2 * 2 * n_neg + 2 * s + 1, col)] = v.im;
                        }
                    }
                }
            }
        }
        let w_inv_candidate = -w.clone();
        Ok((w, w_inv_candidate))
    }
}

fn check_membership(t: &ComponentFunction) -> Result<()> {
    let norm = t.l2_norm();
    let residual = t.membership_residual(Side::In);
    if norm > 0.0 && residual > TOL_MEMBERSHIP * norm {
        return Err(Error::NotInLIn {
            residual: residual / norm,
            tol: TOL_MEMBERSHIP,
        });
    }
    Ok(())
}

/// Pulls component data back to the distinguished unit circle in
/// normalized coordinates: sample, weight by the inverse map's spinor
/// factor, transform, and re-project (the transport preserves L^2_in
/// exactly; re-projection removes sampling noise).
fn transport_data_to_s(
    domain: &CircleDomain,
    comp: &ComponentSolver,
    t_in: &ComponentFunction,
    cutoff: usize,
    floor: f64,
) -> Result<ComponentFunction> {
    let circle_j = domain.circle(comp.j)?;
    let p = boundary::default_node_count(cutoff);
    let mut samples = Vec::with_capacity(p);
    for i in 0..p {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / p as f64;
        let w = Complex64::from_polar(1.0, theta);
        let z = comp.inv_map.apply(w)?;
        let mut u = (z - circle_j.center) / circle_j.radius;
        let len = u.norm();
        if len > 0.0 {
            u /= len;
        }
        let weight = comp.inv_map.spinor_weight(w)?;
        samples.push(weight * t_in.eval_on_circle(u));
    }
    let (raw, mass, norm) =
        boundary::to_coefficients_raw(comp.j, ComponentSign::Hole, &samples, cutoff)?;
    boundary::alias_gate(comp.j, mass, norm.max(floor))?;
    Ok(raw.project(Side::In))
}
