//! Unit conventions tying coherent amplitudes to phase-space quadratures.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Oscillator unit system: action scale `hbar` and ground-state width
/// `delta`, related to the trap parameters through m·ω = ħ/δ².
///
/// A coherent amplitude α sits at the phase-space point
/// x₀ = √2·δ·Re α, p₀ = √2·ħ·Im α/δ, so that |α⟩ and |iα⟩ are
/// position- and momentum-displaced partners of equal size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeGeometry {
    hbar: f64,
    delta: f64,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),
    #[error("delta must be positive and finite, got {0}")]
    InvalidDelta(f64),
}

impl ModeGeometry {
    pub fn new(hbar: f64, delta: f64) -> Result<Self, GeometryError> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(GeometryError::InvalidHbar(hbar));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(GeometryError::InvalidDelta(delta));
        }
        Ok(Self { hbar, delta })
    }

    /// ħ = δ = 1.
    pub fn standard() -> Self {
        Self { hbar: 1.0, delta: 1.0 }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// m·ω implied by the ground-state width.
    pub fn mass_omega(&self) -> f64 {
        self.hbar / (self.delta * self.delta)
    }

    /// Position center x₀ of the coherent state |α⟩.
    pub fn x_center(&self, alpha: C64) -> f64 {
        SQRT_2 * self.delta * alpha.re
    }

    /// Momentum center p₀ of the coherent state |α⟩.
    pub fn p_center(&self, alpha: C64) -> f64 {
        SQRT_2 * self.hbar * alpha.im / self.delta
    }

    /// Coherent amplitude whose centers are (x, p).
    pub fn amplitude_from_xp(&self, x: f64, p: f64) -> C64 {
        C64::new(x / (SQRT_2 * self.delta), p * self.delta / (SQRT_2 * self.hbar))
    }

    /// Dimensionless phase-space coordinate ζ = (x/δ + i·p·δ/ħ)/√2; a
    /// coherent state α is centered at ζ = α.
    pub fn zeta(&self, x: f64, p: f64) -> C64 {
        C64::new(x / self.delta, p * self.delta / self.hbar) / SQRT_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_roundtrip() {
        let g = ModeGeometry::new(2.0, 0.7).unwrap();
        let a = C64::new(1.3, -0.4);
        let x = g.x_center(a);
        let p = g.p_center(a);
        let back = g.amplitude_from_xp(x, p);
        assert!((back - a).norm() < 1e-14);
        assert!((g.zeta(x, p) - a).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModeGeometry::new(0.0, 1.0).is_err());
        assert!(ModeGeometry::new(1.0, -2.0).is_err());
        assert!(ModeGeometry::new(f64::NAN, 1.0).is_err());
    }
}
