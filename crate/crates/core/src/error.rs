use thiserror::Error;

/// Errors raised by every module of the crate.
///
/// Messages are prefixed with the module that produced them so that the CLI
/// can surface them verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quat: invalid input: {0}")]
    InvalidQuaternion(String),

    #[error("surface: grid too small ({nx}x{ny}); need at least {min}x{min}")]
    GridTooSmall { nx: usize, ny: usize, min: usize },

    #[error("surface: grid shape mismatch: {0}")]
    GridShape(String),

    #[error("surface: value at node ({i}, {j}) violates the {ambient} constraint (deviation {deviation:e})")]
    AmbientViolation {
        i: usize,
        j: usize,
        ambient: &'static str,
        deviation: f64,
    },

    #[error("surface: degenerate node ({i}, {j}): {what}")]
    DegenerateNode { i: usize, j: usize, what: String },

    #[error("surface: grid is not conformal (relative residual {residual:e} at ({i}, {j}) exceeds {tolerance:e})")]
    NotConformal {
        i: usize,
        j: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("surface: wrong ambient: expected {expected}, found {found}")]
    WrongAmbient {
        expected: &'static str,
        found: &'static str,
    },

    #[error("cousin: not integrable: input not {expected} (loop residual density {density:e} at plaquette ({i}, {j}) exceeds {tolerance:e})")]
    NotIntegrable {
        expected: &'static str,
        i: usize,
        j: usize,
        density: f64,
        tolerance: f64,
    },

    #[error("cousin: integration unstable: unit-norm drift {drift:e} exceeds {limit:e}")]
    IntegrationUnstable { drift: f64, limit: f64 },

    #[error("cousin: orientation sign error: integrated surface has mean curvature {mean_curvature:.6} instead of +1")]
    OrientationSign { mean_curvature: f64 },

    #[error("cousin: invalid path: {0}")]
    InvalidPath(String),

    #[error("cousin: period forms disagree: {direct:e} vs {cousin:e} (tolerance {tolerance:e})")]
    PeriodMismatch {
        direct: f64,
        cousin: f64,
        tolerance: f64,
    },

    #[error("delaunay: necksize {0} out of range")]
    NecksizeOutOfRange(f64),

    #[error("delaunay: helicoid parameter n = {0} does not give an immersion")]
    HelicoidNotImmersed(f64),

    #[error("delaunay: no interior minimum of the half-parallel lengths (argmin at column {0})")]
    NoInteriorMinimum(usize),

    #[error("delaunay: integration quality: {0}")]
    IntegrationQuality(String),

    #[error("moduli: points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),

    #[error("moduli: necksize component {index} = {value} outside (0, pi]")]
    NecksizeComponent { index: usize, value: f64 },

    #[error("moduli: necksizes {0:?} violate the spherical triangle inequalities")]
    Inadmissible([f64; 3]),

    #[error("moduli: weights {0:?} cannot close a force triangle")]
    ForceClosure([f64; 3]),

    #[error("moduli: boundary component {component} is not a Hopf fiber (cluster radius {radius:e} exceeds {tolerance:e})")]
    NotHopfFiber {
        component: usize,
        radius: f64,
        tolerance: f64,
    },

    #[error("moduli: expected 2 or 3 boundary components, found {0}")]
    BoundaryCount(usize),

    #[error("devmap: arc is not minimizing (length {0})")]
    NonMinimizingArc(f64),

    #[error("devmap: join length mismatch: {0} vs {1}")]
    JoinLengthMismatch(f64, f64),

    #[error("devmap: join orientation mismatch: developments fold onto each other across the arc")]
    JoinOrientation,

    #[error("devmap: developments do not meet along the requested arcs")]
    JoinMisaligned,

    #[error("devmap: no boundary arc with index {0}")]
    NoSuchArc(usize),

    #[error("devmap: query point lies on a measure-zero boundary set ({0})")]
    QueryOnBoundary(String),

    #[error("io: {0}")]
    Io(String),

    #[error("io: malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
