//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("degenerate Moebius map: |ad - bc| = {det_mag:.3e} below tolerance")]
    DegenerateMap { det_mag: f64 },

    #[error("Moebius pole at evaluation point {point}")]
    PoleAtPoint { point: String },

    #[error("circle through Moebius pole maps to a line, not a circle (component {component})")]
    ImageIsLine { component: usize },

    #[error("component index {j} out of range for domain with {count} components")]
    InvalidComponent { j: usize, count: usize },

    #[error("domain is simply connected; operation needs at least one hole")]
    SimplyConnected,

    #[error("need a power-of-two sample count >= {min}, got {got}")]
    BadSampleCount { min: usize, got: usize },

    #[error("aliasing mass {mass:.3e} exceeds {limit:.3e} x input norm on component {component}")]
    Aliasing {
        component: usize,
        mass: f64,
        limit: f64,
    },

    #[error("boundary data is not in L^2_in: membership residual {residual:.3e} (tolerance {tol:.3e})")]
    NotInLIn { residual: f64, tol: f64 },

    #[error("solver operator ill-conditioned on component {component}: cond = {cond:.3e}")]
    IllConditioned { component: usize, cond: f64 },

    #[error("least-squares system rank-deficient: cond = {cond:.3e}")]
    RankDeficient { cond: f64 },

    #[error("evaluation point {point} outside the open domain")]
    OutsideDomain { point: String },

    #[error("point {point} too close to the boundary: distance {dist:.3e} < {min:.3e}")]
    PointTooCloseToBoundary { point: String, dist: f64, min: f64 },

    #[error("metric sample failed its invariant at {point}: ell = {ell:.6e}, im residual = {im:.3e}")]
    MetricInvariant { point: String, ell: f64, im: f64 },

    #[error("{0}")]
    BadInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code: 1 for input/validation problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::IllConditioned { .. }
            | Error::RankDeficient { .. }
            | Error::MetricInvariant { .. } => 2,
            _ => 1,
        }
    }

    /// Stable machine-readable tag for the JSON error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDomain(_) => "invalid_domain",
            Error::DegenerateMap { .. } => "degenerate_map",
            Error::PoleAtPoint { .. } => "pole_at_point",
            Error::ImageIsLine { .. } => "image_is_line",
            Error::InvalidComponent { .. } => "invalid_component",
            Error::SimplyConnected => "simply_connected",
            Error::BadSampleCount { .. } => "bad_sample_count",
            Error::Aliasing { .. } => "aliasing",
            Error::NotInLIn { .. } => "not_in_l2_in",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::OutsideDomain { .. } => "outside_domain",
            Error::PointTooCloseToBoundary { .. } => "too_close_to_boundary",
            Error::MetricInvariant { .. } => "metric_invariant",
            Error::BadInput(_) => "bad_input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
