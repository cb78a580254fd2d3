//! Finite superpositions of coherent states: construction, overlaps,
//! displacement, rotation, and position-space wavefunctions.
//!
//! Every state is an immutable list of complex-weighted coherent components;
//! all inner products are evaluated exactly through the pairwise coherent
//! overlap (Gram sums), so no basis truncation enters anywhere in this module.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::geometry::{GeometryError, ModeGeometry};

/// Centers closer than this are merged into one component.
pub const MERGE_TOL: f64 = 1e-12;
/// A constructed state with squared norm below this (relative to the
/// component weight scale) is rejected as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum StateError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("geometry mismatch between states")]
    GeometryMismatch,
    #[error("degenerate state: squared norm {norm_sq:.3e} is below threshold")]
    Degenerate { norm_sq: f64 },
    #[error("all coefficients are zero")]
    ZeroCoefficients,
    #[error("operation requires |alpha| > 0")]
    ZeroAmplitude,
    #[error("coefficient conversion is singular (alpha = 0)")]
    SingularConversion,
    #[error("non-finite weight or center")]
    NonFinite,
    #[error("state must have at least one component")]
    Empty,
}

/// ⟨β|α⟩ = exp(−|α|²/2 − |β|²/2 + β̄·α).
pub fn coherent_overlap(alpha: C64, beta: C64) -> C64 {
    (beta.conj() * alpha - 0.5 * (alpha.norm_sqr() + beta.norm_sqr())).exp()
}

/// ⟨x|α⟩ on the ground-state Gaussian envelope: the displaced vacuum
/// D(α)|0⟩ in the coordinate basis, phase convention
/// exp(i·p₀·x/ħ − i·p₀·x₀/(2ħ)).
pub fn gaussian_amplitude(geometry: &ModeGeometry, alpha: C64, x: f64) -> C64 {
    let x0 = geometry.x_center(alpha);
    let p0 = geometry.p_center(alpha);
    let d = geometry.delta();
    let hb = geometry.hbar();
    let envelope = -((x - x0) * (x - x0)) / (2.0 * d * d);
    let phase = p0 * x / hb - p0 * x0 / (2.0 * hb);
    PI.powf(-0.25) / d.sqrt() * C64::new(envelope, phase).exp()
}

/// One coherent component: `weight`·|`center`⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    pub weight: C64,
    pub center: C64,
}

impl GaussianComponent {
    pub fn new(weight: C64, center: C64) -> Self {
        Self { weight, center }
    }
}

/// Which parity of cat state to build: |α⟩ + |−α⟩ or |α⟩ − |−α⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Mode selector for two-mode operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSelect {
    Mode1,
    Mode2,
    Both,
}

fn check_finite_c(v: C64) -> Result<(), StateError> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(StateError::NonFinite)
    }
}

fn weyl_phase(gamma: C64, center: C64) -> C64 {
    // D(γ)|α⟩ = exp((γ·ᾱ − γ̄·α)/2)·|α + γ⟩
    (0.5 * (gamma * center.conj() - gamma.conj() * center)).exp()
}

/// A single-mode superposition Σ wₖ|αₖ⟩ with a fixed unit convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    geometry: ModeGeometry,
    components: Vec<GaussianComponent>,
}

impl SingleModeState {
    /// Build from raw components; canonicalizes (sorts, merges duplicate
    /// centers) and rejects empty or numerically null states.
    pub fn new(
        geometry: ModeGeometry,
        components: Vec<GaussianComponent>,
    ) -> Result<Self, StateError> {
        if components.is_empty() {
            return Err(StateError::Empty);
        }
        for c in &components {
            check_finite_c(c.weight)?;
            check_finite_c(c.center)?;
        }
        let components = canonicalize_single(components);
        let state = Self { geometry, components };
        state.check_not_degenerate()?;
        Ok(state)
    }

    /// Same as [`SingleModeState::new`] followed by normalization.
    pub fn normalized(
        geometry: ModeGeometry,
        components: Vec<GaussianComponent>,
    ) -> Result<Self, StateError> {
        let mut s = Self::new(geometry, components)?;
        let n = s.norm();
        for c in &mut s.components {
            c.weight /= n;
        }
        Ok(s)
    }

    fn check_not_degenerate(&self) -> Result<(), StateError> {
        let scale: f64 = self.components.iter().map(|c| c.weight.norm_sqr()).sum();
        let norm_sq = self.norm_sqr();
        if norm_sq < DEGENERACY_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(StateError::Degenerate { norm_sq });
        }
        Ok(())
    }

    pub fn geometry(&self) -> &ModeGeometry {
        &self.geometry
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    /// ⟨self|other⟩ evaluated by the closed-form Gram sum.
    pub fn inner(&self, other: &Self) -> Result<C64, StateError> {
        if self.geometry != other.geometry {
            return Err(StateError::GeometryMismatch);
        }
        let mut acc = C64::new(0.0, 0.0);
        for bra in &self.components {
            for ket in &other.components {
                acc += bra.weight.conj() * ket.weight * coherent_overlap(ket.center, bra.center);
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).expect("same geometry").re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().max(0.0).sqrt()
    }

    /// D(γ): every center shifts by γ, weights pick up the exact Weyl phase.
    pub fn displaced(&self, gamma: C64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| GaussianComponent {
                weight: c.weight * weyl_phase(gamma, c.center),
                center: c.center + gamma,
            })
            .collect();
        Self { geometry: self.geometry, components: canonicalize_single(components) }
    }

    /// exp(−iθ·â†â): every center rotates by e^{−iθ}, weights unchanged.
    pub fn rotated(&self, theta: f64) -> Self {
        let rot = C64::new(0.0, -theta).exp();
        let components = self
            .components
            .iter()
            .map(|c| GaussianComponent { weight: c.weight, center: rot * c.center })
            .collect();
        Self { geometry: self.geometry, components: canonicalize_single(components) }
    }

    /// ⟨x|ψ⟩ as a sum of displaced Gaussians.
    pub fn position_amplitude(&self, x: f64) -> C64 {
        self.components
            .iter()
            .map(|c| c.weight * gaussian_amplitude(&self.geometry, c.center, x))
            .sum()
    }

    /// Scale all weights by a constant (yields an unnormalized state).
    pub fn scaled(&self, factor: C64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| GaussianComponent { weight: factor * c.weight, center: c.center })
            .collect();
        Self { geometry: self.geometry, components }
    }
}

/// The vacuum |0⟩.
pub fn vacuum(geometry: ModeGeometry) -> SingleModeState {
    SingleModeState {
        geometry,
        components: vec![GaussianComponent::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))],
    }
}

/// Normalized cat state (|α⟩ ± |−α⟩)/N.
///
/// The odd cat at α = 0 cancels exactly and is rejected as degenerate.
pub fn make_cat(
    geometry: ModeGeometry,
    alpha: C64,
    parity: Parity,
) -> Result<SingleModeState, StateError> {
    check_finite_c(alpha)?;
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    SingleModeState::normalized(
        geometry,
        vec![
            GaussianComponent::new(C64::new(1.0, 0.0), alpha),
            GaussianComponent::new(C64::new(sign, 0.0), -alpha),
        ],
    )
}

/// Normalized single-particle compass state |α⟩+|−α⟩+|iα⟩+|−iα⟩.
pub fn make_compass_single(
    geometry: ModeGeometry,
    alpha: C64,
) -> Result<SingleModeState, StateError> {
    check_finite_c(alpha)?;
    if alpha.norm() == 0.0 {
        return Err(StateError::ZeroAmplitude);
    }
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    SingleModeState::normalized(
        geometry,
        vec![
            GaussianComponent::new(one, alpha),
            GaussianComponent::new(one, -alpha),
            GaussianComponent::new(one, i * alpha),
            GaussianComponent::new(one, -i * alpha),
        ],
    )
}

/// One two-mode coherent component: `weight`·|`center1`⟩₁|`center2`⟩₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteComponent {
    pub weight: C64,
    pub center1: C64,
    pub center2: C64,
}

impl BipartiteComponent {
    pub fn new(weight: C64, center1: C64, center2: C64) -> Self {
        Self { weight, center1, center2 }
    }
}

/// A two-mode superposition Σ wₖ|αₖ⟩₁|βₖ⟩₂; both modes share one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    geometry: ModeGeometry,
    components: Vec<BipartiteComponent>,
}

impl BipartiteState {
    pub fn new(
        geometry: ModeGeometry,
        components: Vec<BipartiteComponent>,
    ) -> Result<Self, StateError> {
        if components.is_empty() {
            return Err(StateError::Empty);
        }
        for c in &components {
            check_finite_c(c.weight)?;
            check_finite_c(c.center1)?;
            check_finite_c(c.center2)?;
        }
        let components = canonicalize_bipartite(components);
        let state = Self { geometry, components };
        state.check_not_degenerate()?;
        Ok(state)
    }

    pub fn normalized(
        geometry: ModeGeometry,
        components: Vec<BipartiteComponent>,
    ) -> Result<Self, StateError> {
        let mut s = Self::new(geometry, components)?;
        let n = s.norm();
        for c in &mut s.components {
            c.weight /= n;
        }
        Ok(s)
    }

    fn check_not_degenerate(&self) -> Result<(), StateError> {
        let scale: f64 = self.components.iter().map(|c| c.weight.norm_sqr()).sum();
        let norm_sq = self.norm_sqr();
        if norm_sq < DEGENERACY_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(StateError::Degenerate { norm_sq });
        }
        Ok(())
    }

    pub fn geometry(&self) -> &ModeGeometry {
        &self.geometry
    }

    pub fn components(&self) -> &[BipartiteComponent] {
        &self.components
    }

    pub fn inner(&self, other: &Self) -> Result<C64, StateError> {
        if self.geometry != other.geometry {
            return Err(StateError::GeometryMismatch);
        }
        let mut acc = C64::new(0.0, 0.0);
        for bra in &self.components {
            for ket in &other.components {
                acc += bra.weight.conj()
                    * ket.weight
                    * coherent_overlap(ket.center1, bra.center1)
                    * coherent_overlap(ket.center2, bra.center2);
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).expect("same geometry").re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().max(0.0).sqrt()
    }

    /// D₁(γ₁)D₂(γ₂).
    pub fn displaced(&self, gamma1: C64, gamma2: C64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| BipartiteComponent {
                weight: c.weight * weyl_phase(gamma1, c.center1) * weyl_phase(gamma2, c.center2),
                center1: c.center1 + gamma1,
                center2: c.center2 + gamma2,
            })
            .collect();
        Self { geometry: self.geometry, components: canonicalize_bipartite(components) }
    }

    /// exp(−iθ·â†â) on the selected mode(s).
    pub fn rotated(&self, theta: f64, mode: ModeSelect) -> Self {
        let rot = C64::new(0.0, -theta).exp();
        let (r1, r2) = match mode {
            ModeSelect::Mode1 => (rot, C64::new(1.0, 0.0)),
            ModeSelect::Mode2 => (C64::new(1.0, 0.0), rot),
            ModeSelect::Both => (rot, rot),
        };
        let components = self
            .components
            .iter()
            .map(|c| BipartiteComponent {
                weight: c.weight,
                center1: r1 * c.center1,
                center2: r2 * c.center2,
            })
            .collect();
        Self { geometry: self.geometry, components: canonicalize_bipartite(components) }
    }

    /// Ψ(x₁, x₂).
    pub fn position_amplitude(&self, x1: f64, x2: f64) -> C64 {
        self.components
            .iter()
            .map(|c| {
                c.weight
                    * gaussian_amplitude(&self.geometry, c.center1, x1)
                    * gaussian_amplitude(&self.geometry, c.center2, x2)
            })
            .sum()
    }

    /// The state with particle labels exchanged.
    pub fn exchanged(&self) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| BipartiteComponent {
                weight: c.weight,
                center1: c.center2,
                center2: c.center1,
            })
            .collect();
        Self { geometry: self.geometry, components: canonicalize_bipartite(components) }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| BipartiteComponent { weight: factor * c.weight, ..*c })
            .collect();
        Self { geometry: self.geometry, components }
    }

    /// |⟨self|other⟩|² / (‖self‖²·‖other‖²).
    pub fn fidelity(&self, other: &Self) -> Result<f64, StateError> {
        let ov = self.inner(other)?;
        Ok(ov.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }
}

fn canonicalize_single(mut comps: Vec<GaussianComponent>) -> Vec<GaussianComponent> {
    comps.sort_by(|a, b| {
        a.center
            .re
            .total_cmp(&b.center.re)
            .then(a.center.im.total_cmp(&b.center.im))
    });
    let mut out: Vec<GaussianComponent> = Vec::with_capacity(comps.len());
    for c in comps {
        match out.last_mut() {
            Some(last) if (last.center - c.center).norm() <= MERGE_TOL => {
                last.weight += c.weight;
            }
            _ => out.push(c),
        }
    }
    drop_null_weights(&mut out, |c| c.weight.norm());
    out
}

fn canonicalize_bipartite(mut comps: Vec<BipartiteComponent>) -> Vec<BipartiteComponent> {
    comps.sort_by(|a, b| {
        a.center1
            .re
            .total_cmp(&b.center1.re)
            .then(a.center1.im.total_cmp(&b.center1.im))
            .then(a.center2.re.total_cmp(&b.center2.re))
            .then(a.center2.im.total_cmp(&b.center2.im))
    });
    let mut out: Vec<BipartiteComponent> = Vec::with_capacity(comps.len());
    for c in comps {
        match out.last_mut() {
            Some(last)
                if (last.center1 - c.center1).norm() <= MERGE_TOL
                    && (last.center2 - c.center2).norm() <= MERGE_TOL =>
            {
                last.weight += c.weight;
            }
            _ => out.push(c),
        }
    }
    drop_null_weights(&mut out, |c| c.weight.norm());
    out
}

// Weights cancelled by merging are dropped, but at least one component is
// always kept so degeneracy is detected by the norm check, not emptiness.
fn drop_null_weights<T>(comps: &mut Vec<T>, weight_of: impl Fn(&T) -> f64) {
    let max_w = comps.iter().map(|c| weight_of(c)).fold(0.0_f64, f64::max);
    if max_w > 0.0 {
        comps.retain(|c| weight_of(c) > 1e-15 * max_w);
    }
    if comps.is_empty() {
        // all weights cancelled exactly; keep nothing to represent the null
        // vector is impossible here, so leave one null-weight marker
        // (callers reject it through the degeneracy check)
        return;
    }
}
