use thiserror::Error;

/// Structured error taxonomy shared by all solver modules.
///
/// The CLI prints the variant name on stderr and exits 1, so variant names
/// are part of the external contract.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("InvalidProfile: {0}")]
    InvalidProfile(String),
    #[error("InvalidGeometry: {0}")]
    InvalidGeometry(String),
    #[error("DiscontinuousProfile: {0}")]
    DiscontinuousProfile(String),
    #[error("PoleProximity: {0}")]
    PoleProximity(String),
    #[error("OddMZero: odd-parity quantization has no m=0 branch")]
    OddMZero,
    #[error("NoConvergence: {0}")]
    NoConvergence(String),
    #[error("ParityMismatch: {0}")]
    ParityMismatch(String),
    #[error("DegenerateDerivative: {0}")]
    DegenerateDerivative(String),
    #[error("WindingInconsistency: {0}")]
    WindingInconsistency(String),
    #[error("NoGap: {0}")]
    NoGap(String),
    #[error("SupportOverlap: {0}")]
    SupportOverlap(String),
    #[error("ExactEigenmode: {0}")]
    ExactEigenmode(String),
    #[error("SingularFactorization: {0}")]
    SingularFactorization(String),
    #[error("FitUnstable: {0}")]
    FitUnstable(String),
    #[error("CFLViolation: {0}")]
    CflViolation(String),
    #[error("NearSpectrum: {0}")]
    NearSpectrum(String),
    #[error("LocalizationViolation: {0}")]
    LocalizationViolation(String),
    #[error("UsageError: {0}")]
    Usage(String),
    #[error("IoError: {0}")]
    Io(String),
}

impl Error {
    /// Short structured name, stable for scripting against stderr.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidProfile(_) => "InvalidProfile",
            Error::InvalidGeometry(_) => "InvalidGeometry",
            Error::DiscontinuousProfile(_) => "DiscontinuousProfile",
            Error::PoleProximity(_) => "PoleProximity",
            Error::OddMZero => "OddMZero",
            Error::NoConvergence(_) => "NoConvergence",
            Error::ParityMismatch(_) => "ParityMismatch",
            Error::DegenerateDerivative(_) => "DegenerateDerivative",
            Error::WindingInconsistency(_) => "WindingInconsistency",
            Error::NoGap(_) => "NoGap",
            Error::SupportOverlap(_) => "SupportOverlap",
            Error::ExactEigenmode(_) => "ExactEigenmode",
            Error::SingularFactorization(_) => "SingularFactorization",
            Error::FitUnstable(_) => "FitUnstable",
            Error::CflViolation(_) => "CFLViolation",
            Error::NearSpectrum(_) => "NearSpectrum",
            Error::LocalizationViolation(_) => "LocalizationViolation",
            Error::Usage(_) => "UsageError",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
