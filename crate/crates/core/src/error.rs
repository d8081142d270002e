use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported derivative order {0} (supported: 0..=3)")]
    UnsupportedOrder(u32),

    #[error("group velocity {c} outside the range {range} of Λ' on (0,∞): no stationary point")]
    OutOfRange { c: f64, range: String },

    #[error("band {band} is not resolvable on a lattice with Nyquist frequency {nyquist}")]
    BandOutOfLattice { band: String, nyquist: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("time {t} exceeds the wraparound guard time {guard}")]
    WrapAround { t: f64, guard: f64 },

    #[error("near-singular denominator {which}: |{value:e}| < {tol:e}")]
    NearSingular {
        which: &'static str,
        value: f64,
        tol: f64,
    },

    #[error("degenerate box: {0}")]
    DegenerateBox(String),

    #[error("infeasible sample: {0}")]
    InfeasibleSample(String),

    #[error("blowup at t = {t}: sup norm {sup} exceeds ceiling {ceiling}")]
    Blowup { t: f64, sup: f64, ceiling: f64 },

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("time {t_new} does not advance past {last_t}")]
    NonMonotoneTime { t_new: f64, last_t: f64 },

    #[error("time step from {from} to {to} has Δlog s = {dlog} > {max}")]
    StepTooCoarse {
        from: f64,
        to: f64,
        dlog: f64,
        max: f64,
    },

    #[error("band lower edge {xi_min} is below the threshold {threshold}")]
    BandBelowThreshold { xi_min: f64, threshold: f64 },

    #[error("dense multiplier of {required} bytes exceeds the budget of {budget} bytes")]
    MemoryBudget { required: usize, budget: usize },

    #[error("multiplier does not decay at the box edge: edge/peak = {ratio:e}")]
    NonDecayedEdge { ratio: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
