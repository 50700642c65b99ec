//! Crate-wide error type.

/// Errors reported by model construction, tree walks, grid measurement and
/// the renewal solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A code word entry does not address a map of its level's IFS.
    #[error("code entry {entry} out of range at level {level} (IFS has {len} maps)")]
    InvalidCode { level: u32, entry: u32, len: usize },

    /// A radius argument outside its admissible range.
    #[error("radius {got} outside the admissible range ({requirement})")]
    BadRadius { got: f64, requirement: &'static str },

    /// Measurement requested below the grid resolution floor.
    #[error("radius {radius} is below the resolution floor {floor}; refine the grid")]
    Resolution { radius: f64, floor: f64 },

    /// A tree walk would need more levels than the environment realizes.
    #[error("construction needs depth {required}, configured maximum is {max}")]
    DepthLimit { required: u32, max: u32 },

    /// Geometry fed to the rasterizer does not fit the grid.
    #[error("polygon outside grid bounds: {0}")]
    OutOfGrid(String),

    /// Distance transform invoked on an empty seed mask.
    #[error("distance transform needs at least one foreground cell")]
    EmptySeeds,

    /// Curvature order not handled by the called operation.
    #[error("curvature order k={0} is not supported by this operation")]
    UnsupportedOrder(u8),

    /// An improper integral with a non-integrable weight.
    #[error("divergent integral: {0}")]
    Divergence(String),

    /// The lattice series has no summable tail for the requested order.
    #[error("lattice series not summable: {0}")]
    NonSummable(String),

    /// Aggregation over too few rows or samples.
    #[error("insufficient data: need {need}, got {got}")]
    InsufficientData { need: usize, got: usize },

    /// Model document violates a structural invariant.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Radius schedule violates a structural invariant.
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

pub type Result<T> = std::result::Result<T, Error>;
