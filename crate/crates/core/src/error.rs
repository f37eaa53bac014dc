use thiserror::Error;

/// Errors produced by grid construction, mode synthesis and propagation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size must be an even integer >= 8, got {0}")]
    BadGridSize(usize),

    #[error("grid half-width must be positive and finite, got {0}")]
    BadHalfWidth(f64),

    #[error("refractive indices must be positive and finite, got n_o = {no}, n_e = {ne}")]
    BadIndices { no: f64, ne: f64 },

    #[error("plate thickness must be positive and finite, got {0}")]
    BadThickness(f64),

    #[error("waist {w0} is under-resolved: need w0 >= 8 * step = {min}")]
    UnderResolvedMode { w0: f64, min: f64 },

    #[error("radial index p must be non-negative and waist positive, got w0 = {0}")]
    BadWaist(f64),

    #[error("Jones vector has zero norm")]
    ZeroJonesVector,

    #[error("field has zero energy")]
    ZeroEnergy,

    #[error("exact-kernel propagation is capped at n <= {cap} (O(n^4) cost), grid has n = {n}")]
    ExactKernelGridCap { n: usize, cap: usize },

    #[error("field dimensions {rows}x{cols} do not match grid n = {n}")]
    DimensionMismatch { rows: usize, cols: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
