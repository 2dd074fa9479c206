use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element has zero norm and no inverse")]
    ZeroNorm,

    #[error("expected a {expected} but the multivector has nonzero {found} components")]
    GradeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resonant ratio {which}: the first-order orbit diverges at alpha = {which}")]
    ResonantDivergence { which: u8 },

    #[error(
        "alpha is within {distance:e} of resonant ratio {which}; pass an explicit override to proceed"
    )]
    NearResonance { which: u8, distance: f64 },

    #[error("homogeneous coefficient paths disagree (max relative difference {max_rel:e}); transcription error in the closed forms")]
    TranscriptionMismatch { max_rel: f64 },

    #[error("electron reached |r| = {radius:e} at t = {t}; integration aborted (near-resonant runs are expected to collapse)")]
    SingularRadius { t: f64, radius: f64 },

    #[error("trajectory covers [{have_start}, {have_end}] but comparison window is [{want_start}, {want_end}]")]
    WindowMismatch {
        have_start: f64,
        have_end: f64,
        want_start: f64,
        want_end: f64,
    },
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositiveParameter { name, value })
    }
}
