use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical modules.
///
/// Every variant carries the name of the module that raised it so that the
/// CLI can attribute failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("[{module}] invalid density matrix: {invariant} violated ({detail})")]
    Invariant {
        module: &'static str,
        invariant: &'static str,
        detail: String,
    },

    #[error("[{module}] shape mismatch: expected {expected}, found {found}")]
    Shape {
        module: &'static str,
        expected: String,
        found: String,
    },

    #[error("[{module}] domain error: {detail}")]
    Domain { module: &'static str, detail: String },

    #[error("[{module}] truncation too small: {detail}")]
    Truncation { module: &'static str, detail: String },

    #[error("[{module}] boundary leakage {deficiency:.3e} exceeds {limit:.1e}; enlarge the momentum cutoff")]
    Leakage {
        module: &'static str,
        deficiency: f64,
        limit: f64,
    },

    #[error("[kraus] completeness deficit 1 - sum J_n^2 = {deficit:.3e} with n_cut = {n_cut} (need n_cut >= {required})")]
    CompletenessDeficit {
        deficit: f64,
        n_cut: usize,
        required: usize,
    },

    #[error("[kraus] quadrature under-resolved: n_theta = {n_theta}, need at least {required}")]
    Quadrature { n_theta: usize, required: usize },

    #[error("[{module}] unsupported sector: {detail}")]
    UnsupportedSector { module: &'static str, detail: String },

    #[error("[{module}] did not converge: {detail}")]
    NonConvergence { module: &'static str, detail: String },

    #[error("[{module}] integration unstable: {detail}")]
    Unstable { module: &'static str, detail: String },
}

impl Error {
    pub(crate) fn domain(module: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            module,
            detail: detail.into(),
        }
    }

    pub(crate) fn shape(
        module: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::Shape {
            module,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
