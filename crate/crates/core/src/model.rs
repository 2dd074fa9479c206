//! Problem configuration, nondimensionalization and the unperturbed orbit.
//!
//! Everything downstream works in scaled units: lengths in `r0`, time in
//! `1/ω0`, and the forcing strength `eps = q a / (m ω0² r0)`.

use serde::{Deserialize, Serialize};

use crate::clifford::{rotor, vec_of, Vec2};
use crate::error::{finite, positive, Error, Result};

/// Forcing strength above which the first-order model is outside its
/// validity regime. Exceeding it is a warning, not an error.
pub const EPS_WARN_THRESHOLD: f64 = 0.1;

/// Hydrogen-like atom in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomConfig {
    /// Electrostatic constant.
    pub k: f64,
    /// Charge magnitude of electron and proton.
    pub q: f64,
    /// Electron mass.
    pub m: f64,
    /// Orbit radius.
    pub r0: f64,
    /// Initial rotational phase, radians.
    pub phi0: f64,
}

/// Circularly polarized field `E = e1 a e^{i(ωt + δ)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightConfig {
    pub a: f64,
    pub delta: f64,
    pub omega: f64,
}

/// Dimensionless problem statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledConfig {
    /// Frequency ratio ω/ω0.
    pub alpha: f64,
    /// Forcing strength q a / (m ω0² r0).
    pub eps: f64,
    pub phi0: f64,
    pub delta: f64,
}

impl AtomConfig {
    pub fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        positive("q", self.q)?;
        positive("m", self.m)?;
        positive("r0", self.r0)?;
        finite("phi0", self.phi0)?;
        Ok(())
    }
}

impl LightConfig {
    pub fn validate(&self) -> Result<()> {
        finite("a", self.a)?;
        if self.a < 0.0 {
            return Err(Error::InvalidInput(format!(
                "field amplitude must be >= 0, got {}",
                self.a
            )));
        }
        finite("delta", self.delta)?;
        finite("omega", self.omega)?;
        Ok(())
    }
}

impl ScaledConfig {
    pub fn new(alpha: f64, eps: f64, phi0: f64, delta: f64) -> Result<Self> {
        let cfg = Self {
            alpha,
            eps,
            phi0,
            delta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        finite("alpha", self.alpha)?;
        finite("eps", self.eps)?;
        finite("phi0", self.phi0)?;
        finite("delta", self.delta)?;
        if self.eps < 0.0 {
            return Err(Error::InvalidInput(format!(
                "eps must be >= 0, got {}",
                self.eps
            )));
        }
        Ok(())
    }

    /// True when eps is beyond the perturbative regime.
    pub fn outside_perturbative_regime(&self) -> bool {
        self.eps > EPS_WARN_THRESHOLD
    }

    /// Scaled complex field amplitude `eps e^{iδ}`.
    pub fn amplitude(&self) -> crate::clifford::ComplexAmp {
        rotor(self.delta) * self.eps
    }
}

/// `ω0 = sqrt(k q² / (m r0³))`.
pub fn kepler_frequency(cfg: &AtomConfig) -> Result<f64> {
    cfg.validate()?;
    Ok((cfg.k * cfg.q * cfg.q / (cfg.m * cfg.r0.powi(3))).sqrt())
}

/// Converts physical inputs to the scaled problem. Phases pass through unreduced.
pub fn scale(atom: &AtomConfig, light: &LightConfig) -> Result<ScaledConfig> {
    light.validate()?;
    let omega0 = kepler_frequency(atom)?;
    let eps = atom.q * light.a / (atom.m * omega0 * omega0 * atom.r0);
    ScaledConfig::new(light.omega / omega0, eps, atom.phi0, light.delta)
}

/// Circular orbit `(cos(t + φ0), sin(t + φ0))` in units of r0.
pub fn unperturbed_position(cfg: &ScaledConfig, t: f64) -> Vec2 {
    vec_of(rotor(t + cfg.phi0))
}

/// `α_k = α - k`.
pub fn alpha_k(alpha: f64, k: i32) -> f64 {
    alpha - f64::from(k)
}

/// The ratio sharing the same five-harmonic basis: `2 - α`.
pub fn conjugate(alpha: f64) -> f64 {
    2.0 - alpha
}
