use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode index {0}; expected 1, 2, 3 or 4")]
    InvalidMode(u8),

    #[error("state leaves the one-particle-per-side subspace: {0}")]
    OutsideSubspace(String),

    #[error("coherent branch list would grow to {0} branches (limit {limit})", limit = crate::mode::coherent::MAX_BRANCHES)]
    BranchExplosion(usize),

    #[error("coherent branch ({0}, {1}) is not of the form |a,0> or |0,a>")]
    NotSingleModeBranch(num_complex::Complex64, num_complex::Complex64),

    #[error("setting grid is empty")]
    EmptyGrid,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("packet too narrow for grid: sigma {sigma} must exceed 2*dx = {min}")]
    PacketTooNarrow { sigma: f64, min: f64 },

    #[error("momentum {momentum} is outside the resolvable band (|p| + 4 sigma_p must stay below {limit})")]
    MomentumOutOfBand { momentum: f64, limit: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("spectral leakage {leakage:.3e} exceeds {limit:.0e}: field is not resolved by the grid")]
    BandwidthViolation { leakage: f64, limit: f64 },

    #[error("operation requires a {expected}D field, got {got}D")]
    WrongDimension { expected: usize, got: usize },

    #[error("kick region [{lo}, {hi}] does not cover any grid cell")]
    RegionMisaligned { lo: f64, hi: f64 },

    #[error("kick strength must be non-negative, got {0}")]
    NegativeKick(f64),

    #[error("branch weight {0:.3e} is too small to condition on")]
    BranchTooSmall(f64),

    #[error("node proximity: |psi|^2 = {density:.3e} at the evaluation point")]
    NodeProximity { density: f64 },

    #[error("ensemble size must be at least 1")]
    EmptyEnsemble,

    #[error("trajectory {0} ends inside the crossing window")]
    Inconclusive(usize),

    #[error("packets fail to reach the crossing point before t_final = {t_final} (crossing at {t_cross})")]
    NoCrossing { t_final: f64, t_cross: f64 },

    #[error("branch approaches the periodic boundary: {0}")]
    BoundaryProximity(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("physics invariant violated: {0}")]
    Physics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
