use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("axis must be a unit vector, got |axis| = {norm}")]
    NonUnitAxis { norm: f64 },

    #[error("transformer is not unit: |L conj(L) - 1| = {deviation:e}")]
    NotUnit { deviation: f64 },

    #[error("finite-difference step {h:e} underflows coordinate scale {scale:e}")]
    StepUnderflow { h: f64, scale: f64 },

    #[error("point is on declared singularity `{label}` (distance {distance:e})")]
    Singular { label: String, distance: f64 },

    #[error("probe list is empty")]
    EmptyProbes,

    #[error("expected a bivector, scalar part has magnitude {scalar:e}")]
    NotBivector { scalar: f64 },

    #[error(
        "evaluation point lies on the hypersurface (clearance {clearance:e} < {resolution:e})"
    )]
    OnSurface { clearance: f64, resolution: f64 },

    #[error("quadrature underflow: {0}")]
    QuadratureUnderflow(String),

    #[error("`{name}` must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("unknown {what} `{name}`")]
    UnknownName { what: &'static str, name: String },

    #[error("field point is on the worldline (retarded distance {xi:e})")]
    OnWorldline { xi: f64 },

    #[error("could not bracket the retarded time: {0}")]
    BracketFailure(String),

    #[error("invalid worldline: {0}")]
    InvalidWorldline(String),

    #[error("region contains singularity `{label}` and has no exclusion around it")]
    SingularRegion { label: String },

    #[error("invalid region: {0}")]
    InvalidRegion(String),
}
