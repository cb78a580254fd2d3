//! Compass-state coefficient quadruples in the coherent and cat bases,
//! the linear map between them, and the bipartite compass constructor.

use num_complex::Complex64 as C64;

use crate::geometry::ModeGeometry;
use crate::state::{BipartiteComponent, BipartiteState, StateError};

/// Which four-coefficient parameterization a quadruple lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffBasis {
    /// {a, b, c, d} weighting the eight coherent product kets.
    Coherent,
    /// {A, B, C, D} weighting symmetrized products of even/odd cat states.
    Cat,
}

/// A coefficient quadruple tagged with its basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompassCoefficients {
    basis: CoeffBasis,
    values: [C64; 4],
}

impl CompassCoefficients {
    pub fn coherent(a: C64, b: C64, c: C64, d: C64) -> Result<Self, StateError> {
        Self::new(CoeffBasis::Coherent, [a, b, c, d])
    }

    pub fn cat(a: C64, b: C64, c: C64, d: C64) -> Result<Self, StateError> {
        Self::new(CoeffBasis::Cat, [a, b, c, d])
    }

    pub fn new(basis: CoeffBasis, values: [C64; 4]) -> Result<Self, StateError> {
        for v in &values {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(StateError::NonFinite);
            }
        }
        if values.iter().all(|v| v.norm() == 0.0) {
            return Err(StateError::ZeroCoefficients);
        }
        Ok(Self { basis, values })
    }

    pub fn basis(&self) -> CoeffBasis {
        self.basis
    }

    pub fn values(&self) -> [C64; 4] {
        self.values
    }

    /// Sub-Planck admissibility: at least one of the tuples (a, b) or (c, d)
    /// has both entries nonzero. Evaluated on the coherent-basis quadruple,
    /// converting first when needed (hence the α dependence).
    pub fn is_admissible(&self, alpha: C64) -> Result<bool, StateError> {
        let coh = match self.basis {
            CoeffBasis::Coherent => *self,
            CoeffBasis::Cat => self.converted(alpha)?,
        };
        let [a, b, c, d] = coh.values;
        Ok((a.norm() > 0.0 && b.norm() > 0.0) || (c.norm() > 0.0 && d.norm() > 0.0))
    }

    /// The same quadruple expressed in the other basis.
    ///
    /// The map is assembled from the cat-state expansions including their
    /// normalization constants; it is singular only at α = 0, where the odd
    /// cats vanish. Round-trips are exact to rounding.
    pub fn converted(&self, alpha: C64) -> Result<Self, StateError> {
        let q = (-2.0 * alpha.norm_sqr()).exp();
        if 1.0 - q <= 0.0 {
            return Err(StateError::SingularConversion);
        }
        let np_sq = 1.0 / (2.0 * (1.0 + q)); // even-cat normalization², same for x- and p-cats
        let nm_sq = 1.0 / (2.0 * (1.0 - q));
        let npm = (np_sq * nm_sq).sqrt();
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let [v0, v1, v2, v3] = self.values;
        let values = match self.basis {
            CoeffBasis::Cat => {
                // coherent-ket weights of the four cat-product groups
                let (ca, cb, cc, cd) = (v0, v1, v2, v3);
                [
                    k * (ca * np_sq + cb * nm_sq + (cc + cd) * npm),
                    k * (ca * np_sq + cb * nm_sq - (cc + cd) * npm),
                    k * (ca * np_sq - cb * nm_sq + (cd - cc) * npm),
                    k * (ca * np_sq - cb * nm_sq + (cc - cd) * npm),
                ]
            }
            CoeffBasis::Coherent => {
                let (a, b, c, d) = (v0, v1, v2, v3);
                let s2 = std::f64::consts::SQRT_2;
                [
                    (a + b + c + d) * ((1.0 + q) / s2),
                    (a + b - c - d) * ((1.0 - q) / s2),
                    (a - b - c + d) * ((1.0 - q * q).sqrt() / s2),
                    (a - b + c - d) * ((1.0 - q * q).sqrt() / s2),
                ]
            }
        };
        let basis = match self.basis {
            CoeffBasis::Cat => CoeffBasis::Coherent,
            CoeffBasis::Coherent => CoeffBasis::Cat,
        };
        Self::new(basis, values)
    }
}

/// The eight coherent product kets of the bipartite compass state, in the
/// canonical (a, a, b, b, c, c, d, d) grouping.
pub fn compass_kets(alpha: C64) -> [(usize, C64, C64); 8] {
    let i = C64::new(0.0, 1.0);
    [
        (0, alpha, i * alpha),
        (0, i * alpha, alpha),
        (1, -alpha, -i * alpha),
        (1, -i * alpha, -alpha),
        (2, alpha, -i * alpha),
        (2, i * alpha, -alpha),
        (3, -alpha, i * alpha),
        (3, -i * alpha, alpha),
    ]
}

/// Normalized bipartite compass state
/// a(|α,iα⟩+|iα,α⟩) + b(|−α,−iα⟩+|−iα,−α⟩) + c(|α,−iα⟩+|iα,−α⟩) + d(|−α,iα⟩+|−iα,α⟩).
///
/// Cat-basis coefficients are converted first. States that cancel exactly
/// (e.g. antisymmetric choices at α = 0) are rejected as degenerate.
pub fn make_compass_bipartite(
    geometry: ModeGeometry,
    coeffs: &CompassCoefficients,
    alpha: C64,
) -> Result<BipartiteState, StateError> {
    let coherent = match coeffs.basis() {
        CoeffBasis::Coherent => *coeffs,
        CoeffBasis::Cat => coeffs.converted(alpha)?,
    };
    let values = coherent.values();
    let comps: Vec<BipartiteComponent> = compass_kets(alpha)
        .into_iter()
        .map(|(g, c1, c2)| BipartiteComponent::new(values[g], c1, c2))
        .collect();
    BipartiteState::normalized(geometry, comps)
}
