//! JSON and CSV interchange formats for domains, boundary data, solutions,
//! operator exports, and metric grids.
//!
//! Complex numbers serialize as [re, im] arrays throughout. Map orderings
//! are BTree-based and struct fields have fixed order, so identical inputs
//! produce byte-identical output files.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::{self, BoundaryFunction, ComponentFunction};
use crate::error::{Error, Result};
use crate::geometry::{Circle, CircleDomain, MoebiusMap};
use crate::holo::{ChildBlock, HoloFunction, PrincipalBlock, TaylorBlock};
use crate::metric::GridOutcome;
use crate::solver::{ComponentDiagnostics, SolveReport, SolverOperator};

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Serializes any report with stable formatting: pretty-printed JSON plus
/// a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleDto {
    pub center: [f64; 2],
    pub radius: f64,
}

impl CircleDto {
    fn from_circle(c: &Circle) -> Self {
        CircleDto {
            center: pair(c.center),
            radius: c.radius,
        }
    }

    fn build(&self) -> Result<Circle> {
        Circle::new(cx(self.center), self.radius)
    }
}

/// Domain description: `{"outer": {...}, "holes": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainDto {
    pub outer: CircleDto,
    #[serde(default)]
    pub holes: Vec<CircleDto>,
}

impl DomainDto {
    pub fn from_domain(domain: &CircleDomain) -> Self {
        DomainDto {
            outer: CircleDto::from_circle(domain.outer()),
            holes: domain.holes().iter().map(CircleDto::from_circle).collect(),
        }
    }

    pub fn build(&self) -> Result<CircleDomain> {
        let holes = self
            .holes
            .iter()
            .map(CircleDto::build)
            .collect::<Result<Vec<_>>>()?;
        CircleDomain::new(self.outer.build()?, holes)
    }
}

pub fn domain_from_json(text: &str) -> Result<CircleDomain> {
    let dto: DomainDto = serde_json::from_str(text)?;
    dto.build()
}

pub fn domain_to_json(domain: &CircleDomain) -> Result<String> {
    to_json_pretty(&DomainDto::from_domain(domain))
}

/// Boundary data for one component: either explicit Fourier modes
/// `{"modes": {"-1": [re, im], ...}}` or uniform angular samples
/// `{"samples": [[re, im], ...]}` (power-of-two count, converted on load).
/// Exactly one of the two fields must be present.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ComponentDataDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<BTreeMap<i64, [f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 2]>>,
}

impl ComponentDataDto {
    pub fn from_modes(modes: BTreeMap<i64, [f64; 2]>) -> Self {
        ComponentDataDto {
            modes: Some(modes),
            samples: None,
        }
    }

    pub fn from_samples(samples: Vec<[f64; 2]>) -> Self {
        ComponentDataDto {
            modes: None,
            samples: Some(samples),
        }
    }
}

/// Loads boundary data (one entry per boundary circle, outer first) onto
/// the given domain at the given cutoff.
pub fn boundary_from_json(
    text: &str,
    domain: &CircleDomain,
    cutoff: usize,
) -> Result<BoundaryFunction> {
    let dtos: Vec<ComponentDataDto> = serde_json::from_str(text)?;
    if dtos.len() != domain.n_components() {
        return Err(Error::BadInput(format!(
            "boundary data has {} components, domain has {}",
            dtos.len(),
            domain.n_components()
        )));
    }
    let mut components = Vec::with_capacity(dtos.len());
    for (j, dto) in dtos.iter().enumerate() {
        let sign = domain.sign(j)?;
        let f = match (&dto.modes, &dto.samples) {
            (Some(modes), None) => {
                let pairs: Vec<(i64, Complex64)> =
                    modes.iter().map(|(&k, &v)| (k, cx(v))).collect();
                ComponentFunction::from_modes(j, sign, cutoff, &pairs)?
            }
            (None, Some(samples)) => {
                let vals: Vec<Complex64> = samples.iter().map(|&p| cx(p)).collect();
                boundary::to_coefficients(j, sign, &vals, cutoff)?.0
            }
            _ => {
                return Err(Error::BadInput(format!(
                    "component {j}: boundary data needs exactly one of \"modes\" or \"samples\""
                )));
            }
        };
        components.push(f);
    }
    BoundaryFunction::from_components(components)
}

/// Exports boundary data in the modes form, omitting exact zeros.
pub fn boundary_to_dto(f: &BoundaryFunction) -> Vec<ComponentDataDto> {
    f.components()
        .iter()
        .map(|c| {
            let m = c.cutoff() as i64;
            let mut modes = BTreeMap::new();
            for k in -m..=m {
                let v = c.coeff(k);
                if v != Complex64::new(0.0, 0.0) {
                    modes.insert(k, pair(v));
                }
            }
            ComponentDataDto::from_modes(modes)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyDto {
    pub center: [f64; 2],
    pub coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChildDto {
    pub map: MoebiusMap,
    pub child: HoloDto,
}

/// Holomorphic function serialization: polynomial and principal-part
/// blocks plus spinor-transported children (map coefficients with their
/// branch seed).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct HoloDto {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub taylor: Vec<PolyDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub principal: Vec<PolyDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ChildDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainDto>,
}

fn coeffs_to_pairs(coeffs: &[Complex64]) -> Vec<[f64; 2]> {
    coeffs.iter().map(|&z| pair(z)).collect()
}

fn pairs_to_coeffs(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|&p| cx(p)).collect()
}

pub fn holo_to_dto(f: &HoloFunction) -> HoloDto {
    HoloDto {
        taylor: f
            .taylor_blocks()
            .iter()
            .map(|b| PolyDto {
                center: pair(b.center),
                coeffs: coeffs_to_pairs(&b.coeffs),
            })
            .collect(),
        principal: f
            .principal_blocks()
            .iter()
            .map(|b| PolyDto {
                center: pair(b.center),
                coeffs: coeffs_to_pairs(&b.coeffs),
            })
            .collect(),
        children: f
            .children()
            .iter()
            .map(|c| ChildDto {
                map: c.map.clone(),
                child: holo_to_dto(&c.child),
            })
            .collect(),
        domain: f.domain().map(DomainDto::from_domain),
    }
}

/// Deserialized maps bypass the constructor, so re-validate: the map must
/// be nondegenerate and the stored branch seed must square to its
/// determinant.
fn validate_map(map: &MoebiusMap) -> Result<()> {
    let det = map.det();
    let seed = map.branch_seed();
    let scale = (map.a.norm() * map.d.norm() + map.b.norm() * map.c.norm())
        .max(f64::MIN_POSITIVE);
    if det.norm() <= 1e-14 * scale {
        return Err(Error::DegenerateMap {
            det_mag: det.norm(),
        });
    }
    if (seed * seed - det).norm() > 1e-10 * det.norm() {
        return Err(Error::BadInput(format!(
            "branch seed {seed} does not square to the map determinant {det}"
        )));
    }
    Ok(())
}

pub fn holo_from_dto(dto: &HoloDto) -> Result<HoloFunction> {
    let taylor = dto
        .taylor
        .iter()
        .map(|b| TaylorBlock {
            center: cx(b.center),
            coeffs: pairs_to_coeffs(&b.coeffs),
        })
        .collect();
    let principal = dto
        .principal
        .iter()
        .map(|b| PrincipalBlock {
            center: cx(b.center),
            coeffs: pairs_to_coeffs(&b.coeffs),
        })
        .collect();
    let children = dto
        .children
        .iter()
        .map(|c| {
            validate_map(&c.map)?;
            Ok(ChildBlock {
                map: c.map.clone(),
                child: holo_from_dto(&c.child)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let domain = dto.domain.as_ref().map(|d| d.build()).transpose()?;
    Ok(HoloFunction::from_parts(taylor, principal, children, domain))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReportDto {
    pub in_residual: f64,
    pub out_residual: f64,
    pub data_norm: f64,
}

impl SolveReportDto {
    pub fn from_report(r: &SolveReport) -> Self {
        SolveReportDto {
            in_residual: r.in_residual,
            out_residual: r.out_residual,
            data_norm: r.data_norm,
        }
    }
}

/// Output of the `solve` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDto {
    pub modes: usize,
    pub cutoff: usize,
    pub report: SolveReportDto,
    pub solution: HoloDto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentDiagDto {
    pub component: usize,
    pub min_sym_eig_q: f64,
    pub min_eig_oot: f64,
    pub cond: f64,
}

impl ComponentDiagDto {
    pub fn new(j: usize, d: &ComponentDiagnostics) -> Self {
        ComponentDiagDto {
            component: j,
            min_sym_eig_q: d.min_sym_eig_q,
            min_eig_oot: d.min_eig_oot,
            cond: d.cond,
        }
    }
}

/// Output of the `operators` subcommand: the twisted transform matrix, its
/// inverse candidate, and per-component spectral diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorsDto {
    pub modes: usize,
    pub cutoff: usize,
    pub dim: usize,
    pub diagnostics: Vec<ComponentDiagDto>,
    pub w: Vec<Vec<f64>>,
    pub w_inv: Vec<Vec<f64>>,
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

/// Collects diagnostics for the requested component, or all of them.
pub fn collect_diagnostics(
    solver: &SolverOperator,
    component: Option<usize>,
) -> Result<Vec<ComponentDiagDto>> {
    let comps = solver.components();
    match component {
        Some(j) => {
            let c = solver.component(j).ok_or(Error::InvalidComponent {
                j,
                count: comps.len(),
            })?;
            Ok(vec![ComponentDiagDto::new(j, c.diagnostics())])
        }
        None => Ok(comps
            .iter()
            .map(|c| ComponentDiagDto::new(c.j(), c.diagnostics()))
            .collect()),
    }
}

/// Grid input: a JSON array of [re, im] points.
pub fn grid_from_json(text: &str) -> Result<Vec<Complex64>> {
    let pts: Vec<[f64; 2]> = serde_json::from_str(text)?;
    Ok(pts.into_iter().map(cx).collect())
}

/// One metric grid entry, tagged by status.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GridEntryDto {
    Ok {
        w: [f64; 2],
        ell: f64,
        im_residual: f64,
    },
    Outside {
        w: [f64; 2],
    },
    TooClose {
        w: [f64; 2],
        dist: f64,
    },
}

impl GridEntryDto {
    pub fn from_outcome(o: &GridOutcome) -> Self {
        match *o {
            GridOutcome::Sample(s) => GridEntryDto::Ok {
                w: pair(s.w),
                ell: s.ell,
                im_residual: s.im_residual,
            },
            GridOutcome::Outside { w } => GridEntryDto::Outside { w: pair(w) },
            GridOutcome::TooClose { w, dist } => GridEntryDto::TooClose { w: pair(w), dist },
        }
    }
}

pub fn grid_to_json(outcomes: &[GridOutcome]) -> Result<String> {
    let dtos: Vec<GridEntryDto> = outcomes.iter().map(GridEntryDto::from_outcome).collect();
    to_json_pretty(&dtos)
}

/// CSV export with columns w_re, w_im, ell, im_residual; flagged points
/// keep their coordinates and leave the value cells empty.
pub fn grid_to_csv(outcomes: &[GridOutcome]) -> String {
    let mut out = String::from("w_re,w_im,ell,im_residual\n");
    for o in outcomes {
        match *o {
            GridOutcome::Sample(s) => {
                out.push_str(&format!("{},{},{},{}\n", s.w.re, s.w.im, s.ell, s.im_residual));
            }
            GridOutcome::Outside { w } | GridOutcome::TooClose { w, .. } => {
                out.push_str(&format!("{},{},,\n", w.re, w.im));
            }
        }
    }
    out
}
