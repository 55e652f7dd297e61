use thiserror::Error;

/// Library-wide error type. Variants are grouped by how a caller should
/// react: `Domain`/`Precondition`/`Parse`/`TableTooShort` are input problems,
/// `PanelBudget`/`Tolerance`/`TailBound` mean a numeric budget was exhausted,
/// `Completeness` means a zero-table certification failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cache format error: {0}")]
    CacheFormat(String),

    #[error("cache checksum mismatch: stored {stored}, computed {computed}")]
    ChecksumMismatch { stored: String, computed: String },

    #[error("zero table too short: height {have:.3} available, {need:.3} required ({what})")]
    TableTooShort { have: f64, need: f64, what: String },

    #[error("completeness certification failed near t = {t:.6}: {msg}")]
    Completeness { t: f64, msg: String },

    #[error("panel budget exhausted: {used} panels (cap {cap}) on [{lo:.6e}, {hi:.6e}]")]
    PanelBudget { used: u64, cap: u64, lo: f64, hi: f64 },

    #[error("tolerance not met: requested {requested:.3e}, achieved estimate {achieved:.3e}")]
    Tolerance { requested: f64, achieved: f64 },

    #[error("zero-sum tail bound {bound:.3e} exceeds budget {budget:.3e}; table height ~{need:.0} required")]
    TailBound { bound: f64, budget: f64, need: f64 },

    #[error("fit needs at least {need} usable points, got {got} ({dropped} dropped)")]
    FitInsufficient { need: usize, got: usize, dropped: usize },

    #[error("unsupported derivative order {order} (max {max})")]
    UnsupportedOrder { order: u32, max: u32 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the failure is an exhausted numeric budget rather than bad
    /// input: callers map this to a distinct exit status.
    pub fn is_numeric_budget(&self) -> bool {
        matches!(
            self,
            Error::PanelBudget { .. } | Error::Tolerance { .. } | Error::TailBound { .. }
        )
    }
}
