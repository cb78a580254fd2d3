//! Wigner functions of coherent-state superpositions.
//!
//! The analytic route expands W as the exact pairwise sum over Gaussian
//! components: each ordered pair of coherent centers contributes a Gaussian
//! at their phase-space midpoint modulated by a plane wave set by their
//! separation. The numeric route evaluates the defining correlation-function
//! integral by trapezoid quadrature of the position wavefunction and serves
//! as an independent oracle for the closed form.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::geometry::ModeGeometry;
use crate::state::{BipartiteState, SingleModeState, StateError};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum WignerError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("imaginary residue {residue:.3e} of the pairwise sum exceeds tolerance")]
    ImaginaryResidue { residue: f64 },
    #[error("integration window too small: edge/peak ratio {edge_ratio:.3e}")]
    WindowTooSmall { edge_ratio: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidQuadrature(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid slice binding: {0}")]
    InvalidBinding(String),
    #[error("grid does not cover the state on axis {axis}")]
    CoverageFailure { axis: &'static str },
    #[error("no sign change found along axis {axis}")]
    NoZeroCrossings { axis: &'static str },
    #[error("need at least {needed} zeros on axis {axis}, found {found}")]
    InsufficientZeros { axis: &'static str, needed: usize, found: usize },
    #[error("unsupported axis for this operation: {0}")]
    UnsupportedAxis(&'static str),
    #[error("non-finite value encountered")]
    NonFinite,
}

/// Imaginary residue of the pairwise sum above this aborts with an error.
pub const RESIDUE_LIMIT: f64 = 1e-9;

/// One of the four phase-space coordinates of a two-particle state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseAxis {
    X1,
    P1,
    X2,
    P2,
}

impl PhaseAxis {
    pub const ALL: [PhaseAxis; 4] = [PhaseAxis::X1, PhaseAxis::P1, PhaseAxis::X2, PhaseAxis::P2];

    pub fn name(&self) -> &'static str {
        match self {
            PhaseAxis::X1 => "x1",
            PhaseAxis::P1 => "p1",
            PhaseAxis::X2 => "x2",
            PhaseAxis::P2 => "p2",
        }
    }

    pub fn is_position(&self) -> bool {
        matches!(self, PhaseAxis::X1 | PhaseAxis::X2)
    }

    /// 0 for particle one, 1 for particle two.
    pub fn mode(&self) -> usize {
        match self {
            PhaseAxis::X1 | PhaseAxis::P1 => 0,
            PhaseAxis::X2 | PhaseAxis::P2 => 1,
        }
    }
}

/// A point (x₁, p₁; x₂, p₂) of the four-dimensional phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub x1: f64,
    pub p1: f64,
    pub x2: f64,
    pub p2: f64,
}

impl PhaseSpacePoint {
    pub const ORIGIN: PhaseSpacePoint = PhaseSpacePoint { x1: 0.0, p1: 0.0, x2: 0.0, p2: 0.0 };

    pub fn new(x1: f64, p1: f64, x2: f64, p2: f64) -> Self {
        Self { x1, p1, x2, p2 }
    }

    pub fn get(&self, axis: PhaseAxis) -> f64 {
        match axis {
            PhaseAxis::X1 => self.x1,
            PhaseAxis::P1 => self.p1,
            PhaseAxis::X2 => self.x2,
            PhaseAxis::P2 => self.p2,
        }
    }

    pub fn set(&mut self, axis: PhaseAxis, value: f64) {
        match axis {
            PhaseAxis::X1 => self.x1 = value,
            PhaseAxis::P1 => self.p1 = value,
            PhaseAxis::X2 => self.x2 = value,
            PhaseAxis::P2 => self.p2 = value,
        }
    }
}

/// Wigner cross-kernel of |ket⟩⟨bra| at ζ, without the 1/(πħ) prefactor:
/// exp(−2|ζ|² + 2·b̄·ζ + 2·k·ζ̄ − k·b̄ − (|k|² + |b|²)/2).
#[inline]
fn pair_kernel(ket: C64, bra: C64, zeta: C64) -> C64 {
    let lin = 2.0 * (bra.conj() * zeta + ket * zeta.conj());
    let cst = ket * bra.conj();
    let re0 = -2.0 * zeta.norm_sqr() - 0.5 * (ket.norm_sqr() + bra.norm_sqr());
    (C64::new(re0, 0.0) + lin - cst).exp()
}

fn check_residue(sum: C64, scale: f64) -> Result<f64, WignerError> {
    let allowed = RESIDUE_LIMIT * scale.max(f64::MIN_POSITIVE);
    if sum.im.abs() > allowed {
        return Err(WignerError::ImaginaryResidue { residue: sum.im.abs() });
    }
    Ok(sum.re)
}

/// Closed-form Wigner function of a single-mode state at (x, p).
pub fn wigner_analytic_single(state: &SingleModeState, x: f64, p: f64) -> Result<f64, WignerError> {
    let g = state.geometry();
    let zeta = g.zeta(x, p);
    let mut sum = C64::new(0.0, 0.0);
    for j in state.components() {
        for k in state.components() {
            sum += j.weight * k.weight.conj() * pair_kernel(j.center, k.center, zeta);
        }
    }
    let wsum: f64 = state.components().iter().map(|c| c.weight.norm()).sum();
    let scale = wsum * wsum / (PI * g.hbar());
    Ok(check_residue(sum, scale)? / (PI * g.hbar()))
}

/// Closed-form Wigner function of a bipartite state at a 4-D point.
pub fn wigner_analytic(state: &BipartiteState, pt: &PhaseSpacePoint) -> Result<f64, WignerError> {
    let g = state.geometry();
    let z1 = g.zeta(pt.x1, pt.p1);
    let z2 = g.zeta(pt.x2, pt.p2);
    let mut sum = C64::new(0.0, 0.0);
    for j in state.components() {
        for k in state.components() {
            sum += j.weight
                * k.weight.conj()
                * pair_kernel(j.center1, k.center1, z1)
                * pair_kernel(j.center2, k.center2, z2);
        }
    }
    let wsum: f64 = state.components().iter().map(|c| c.weight.norm()).sum();
    let pf = (PI * g.hbar()) * (PI * g.hbar());
    Ok(check_residue(sum, wsum * wsum / pf)? / pf)
}

/// Trapezoid window for the correlation-variable integral of the Wigner
/// transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Window half-width L; the integral runs over [−L, L].
    pub half_width: f64,
    /// Sample count M (even, ≥ 16).
    pub points: usize,
}

impl QuadratureSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self, WignerError> {
        let spec = Self { half_width, points };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), WignerError> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(WignerError::InvalidQuadrature(format!(
                "half-width must be positive, got {}",
                self.half_width
            )));
        }
        if self.points < 16 || self.points % 2 != 0 {
            return Err(WignerError::InvalidQuadrature(format!(
                "points must be even and at least 16, got {}",
                self.points
            )));
        }
        Ok(())
    }

    fn auto(
        geom: &ModeGeometry,
        x_centers: &[f64],
        p_centers: &[f64],
        p_eval: f64,
    ) -> QuadratureSpec {
        let d = geom.delta();
        let hb = geom.hbar();
        let x_spread = spread(x_centers);
        // the pair envelope in the correlation variable is centered at the
        // center separation with width ~√2·δ
        let half_width = x_spread + 14.0 * d;
        // fastest phase rate: |p − (p_j + p_k)/2| / ħ
        let p_abs = p_centers.iter().fold(0.0_f64, |m, &p| m.max(p.abs()));
        let rate = (p_eval.abs() + p_abs) / hb;
        let h = 2.0 * PI / (rate + 16.0 / d);
        let mut points = (2.0 * half_width / h).ceil() as usize + 2;
        points = points.max(64);
        if points % 2 == 1 {
            points += 1;
        }
        QuadratureSpec { half_width, points }
    }

    /// Window adequate for `state` probed at momentum `p`.
    pub fn auto_for_single(state: &SingleModeState, p: f64) -> QuadratureSpec {
        let g = state.geometry();
        let xc: Vec<f64> = state.components().iter().map(|c| g.x_center(c.center)).collect();
        let pc: Vec<f64> = state.components().iter().map(|c| g.p_center(c.center)).collect();
        Self::auto(g, &xc, &pc, p)
    }

    /// Window adequate for both modes of `state` probed at `pt`.
    pub fn auto_for_bipartite(state: &BipartiteState, pt: &PhaseSpacePoint) -> QuadratureSpec {
        let g = state.geometry();
        let x1: Vec<f64> = state.components().iter().map(|c| g.x_center(c.center1)).collect();
        let p1: Vec<f64> = state.components().iter().map(|c| g.p_center(c.center1)).collect();
        let x2: Vec<f64> = state.components().iter().map(|c| g.x_center(c.center2)).collect();
        let p2: Vec<f64> = state.components().iter().map(|c| g.p_center(c.center2)).collect();
        let a = Self::auto(g, &x1, &p1, pt.p1);
        let b = Self::auto(g, &x2, &p2, pt.p2);
        QuadratureSpec {
            half_width: a.half_width.max(b.half_width),
            points: a.points.max(b.points),
        }
    }
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    let hi = v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    (hi - lo).max(0.0)
}

/// Edge-to-peak guard shared by the quadrature routines.
const EDGE_MASS_LIMIT: f64 = 1e-16;

/// Numeric Wigner value of a single-mode state: trapezoid evaluation of
/// (1/2πħ)·∫ ψ(x−a/2)·ψ̄(x+a/2)·e^{ipa/ħ} da.
pub fn wigner_numeric_single(
    state: &SingleModeState,
    x: f64,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<f64, WignerError> {
    quad.validate()?;
    let g = state.geometry();
    let hb = g.hbar();
    let m = quad.points;
    let l = quad.half_width;
    let h = 2.0 * l / (m - 1) as f64;
    let mut sum = C64::new(0.0, 0.0);
    let mut peak = 0.0_f64;
    let mut edge = 0.0_f64;
    for i in 0..m {
        let a = -l + i as f64 * h;
        let left = state.position_amplitude(x - 0.5 * a);
        let right = state.position_amplitude(x + 0.5 * a).conj();
        let phase = C64::new(0.0, p * a / hb).exp();
        let val = left * right * phase;
        let mag = val.norm();
        peak = peak.max(mag);
        if i == 0 || i == m - 1 {
            edge = edge.max(mag);
            sum += 0.5 * val;
        } else {
            sum += val;
        }
    }
    if peak > 0.0 && edge > EDGE_MASS_LIMIT * peak {
        return Err(WignerError::WindowTooSmall { edge_ratio: edge / peak });
    }
    let w = sum * h / (2.0 * PI * hb);
    check_residue(w, 1.0 / (PI * hb))
}

/// Numeric Wigner value of a bipartite state: 2-D trapezoid over the two
/// correlation variables, built from the position wavefunction.
pub fn wigner_numeric(
    state: &BipartiteState,
    pt: &PhaseSpacePoint,
    quad: &QuadratureSpec,
) -> Result<f64, WignerError> {
    quad.validate()?;
    let g = *state.geometry();
    let hb = g.hbar();
    let m = quad.points;
    let l = quad.half_width;
    let h = 2.0 * l / (m - 1) as f64;
    let n = state.components().len();

    // per-axis tables of the single-mode Gaussian factors; the full Ψ at
    // shifted arguments is then an O(n) contraction per grid node
    let mut g1l = vec![C64::new(0.0, 0.0); n * m];
    let mut g1r = vec![C64::new(0.0, 0.0); n * m];
    let mut g2l = vec![C64::new(0.0, 0.0); n * m];
    let mut g2r = vec![C64::new(0.0, 0.0); n * m];
    for (k, comp) in state.components().iter().enumerate() {
        for i in 0..m {
            let a = -l + i as f64 * h;
            g1l[k * m + i] = crate::state::gaussian_amplitude(&g, comp.center1, pt.x1 - 0.5 * a);
            g1r[k * m + i] =
                crate::state::gaussian_amplitude(&g, comp.center1, pt.x1 + 0.5 * a).conj();
            g2l[k * m + i] = crate::state::gaussian_amplitude(&g, comp.center2, pt.x2 - 0.5 * a);
            g2r[k * m + i] =
                crate::state::gaussian_amplitude(&g, comp.center2, pt.x2 + 0.5 * a).conj();
        }
    }
    let phase1: Vec<C64> = (0..m)
        .map(|i| C64::new(0.0, pt.p1 * (-l + i as f64 * h) / hb).exp())
        .collect();
    let phase2: Vec<C64> = (0..m)
        .map(|i| C64::new(0.0, pt.p2 * (-l + i as f64 * h) / hb).exp())
        .collect();
    let weights: Vec<C64> = state.components().iter().map(|c| c.weight).collect();

    let mut sum = C64::new(0.0, 0.0);
    let mut peak = 0.0_f64;
    let mut edge = 0.0_f64;
    for ia in 0..m {
        let wa = if ia == 0 || ia == m - 1 { 0.5 } else { 1.0 };
        for ib in 0..m {
            let wb = if ib == 0 || ib == m - 1 { 0.5 } else { 1.0 };
            let mut left = C64::new(0.0, 0.0);
            let mut right = C64::new(0.0, 0.0);
            for k in 0..n {
                left += weights[k] * g1l[k * m + ia] * g2l[k * m + ib];
                right += weights[k].conj() * g1r[k * m + ia] * g2r[k * m + ib];
            }
            let val = left * right * phase1[ia] * phase2[ib];
            let mag = val.norm();
            peak = peak.max(mag);
            if ia == 0 || ia == m - 1 || ib == 0 || ib == m - 1 {
                edge = edge.max(mag);
            }
            sum += (wa * wb) * val;
        }
    }
    if peak > 0.0 && edge > EDGE_MASS_LIMIT * peak {
        return Err(WignerError::WindowTooSmall { edge_ratio: edge / peak });
    }
    let pf = 2.0 * PI * hb;
    let w = sum * h * h / (pf * pf);
    check_residue(w, 1.0 / (PI * hb * PI * hb))
}

/// Numeric estimate plus the change under doubling of the sample count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedEstimate {
    pub value: f64,
    /// |W(2M) − W(M)|; the returned value is the 2M evaluation.
    pub refinement_delta: f64,
}

pub fn wigner_numeric_refined(
    state: &BipartiteState,
    pt: &PhaseSpacePoint,
    quad: &QuadratureSpec,
) -> Result<RefinedEstimate, WignerError> {
    let coarse = wigner_numeric(state, pt, quad)?;
    let fine_spec = QuadratureSpec { half_width: quad.half_width, points: quad.points * 2 };
    let fine = wigner_numeric(state, pt, &fine_spec)?;
    Ok(RefinedEstimate { value: fine, refinement_delta: (fine - coarse).abs() })
}

/// Uniform sample layout along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self, WignerError> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(WignerError::InvalidGrid(format!(
                "need finite min < max, got [{min}, {max}]"
            )));
        }
        if n < 2 {
            return Err(WignerError::InvalidGrid(format!("need n >= 2, got {n}")));
        }
        Ok(Self { min, max, n })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + i as f64 * self.spacing()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.value(i))
    }

    /// Symmetric grid about zero.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self, WignerError> {
        Self::new(-half_width, half_width, n)
    }
}

/// Two free axes of a 2-D slice plus fixed values for the remaining two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceBinding {
    free: [PhaseAxis; 2],
    base: PhaseSpacePoint,
}

impl SliceBinding {
    /// `fixed` gives the values of the two axes not listed in `free`, in
    /// canonical (x1, p1, x2, p2) order.
    pub fn new(free: [PhaseAxis; 2], fixed: [f64; 2]) -> Result<Self, WignerError> {
        if free[0] == free[1] {
            return Err(WignerError::InvalidBinding("free axes must be distinct".into()));
        }
        let mut base = PhaseSpacePoint::ORIGIN;
        let mut k = 0;
        for axis in PhaseAxis::ALL {
            if !free.contains(&axis) {
                if !fixed[k].is_finite() {
                    return Err(WignerError::InvalidBinding("fixed values must be finite".into()));
                }
                base.set(axis, fixed[k]);
                k += 1;
            }
        }
        Ok(Self { free, base })
    }

    /// The standard x₁p₁ slice at fixed (x₂, p₂).
    pub fn x1p1(x2: f64, p2: f64) -> Self {
        Self::new([PhaseAxis::X1, PhaseAxis::P1], [x2, p2]).expect("static axes are valid")
    }

    pub fn x2p2(x1: f64, p1: f64) -> Self {
        Self::new([PhaseAxis::X2, PhaseAxis::P2], [x1, p1]).expect("static axes are valid")
    }

    pub fn free(&self) -> [PhaseAxis; 2] {
        self.free
    }

    pub fn bound_axes(&self) -> Vec<(PhaseAxis, f64)> {
        PhaseAxis::ALL
            .into_iter()
            .filter(|a| !self.free.contains(a))
            .map(|a| (a, self.base.get(a)))
            .collect()
    }

    /// The 4-D point with the free axes set to (u, v).
    pub fn point_at(&self, u: f64, v: f64) -> PhaseSpacePoint {
        let mut pt = self.base;
        pt.set(self.free[0], u);
        pt.set(self.free[1], v);
        pt
    }
}

/// How a slice was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Numeric,
    Mesoscopic,
    Synthetic,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Numeric => "numeric",
            Method::Mesoscopic => "mesoscopic",
            Method::Synthetic => "synthetic",
        }
    }
}

/// A sampled 2-D slice of the Wigner function, row-major over
/// (free axis 0, free axis 1).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerSlice {
    pub binding: SliceBinding,
    pub grid0: GridSpec,
    pub grid1: GridSpec,
    pub values: Vec<f64>,
    pub method: Method,
}

impl WignerSlice {
    pub fn value(&self, i0: usize, i1: usize) -> f64 {
        self.values[i0 * self.grid1.n + i1]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Assemble a slice from an arbitrary function of the two free axes
    /// (used for synthetic test patterns).
    pub fn from_fn(
        binding: SliceBinding,
        grid0: GridSpec,
        grid1: GridSpec,
        f: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(grid0.n * grid1.n);
        for u in grid0.values() {
            for v in grid1.values() {
                values.push(f(u, v));
            }
        }
        Self { binding, grid0, grid1, values, method: Method::Synthetic }
    }
}

/// Sample a 2-D slice of the Wigner function.
///
/// The magnitude bound |W| ≤ ‖ψ‖²·(πħ)⁻² is enforced for the analytic and
/// numeric methods; the mesoscopic method is an approximation and is only
/// checked for finiteness.
pub fn wigner_slice(
    state: &BipartiteState,
    binding: &SliceBinding,
    grid0: &GridSpec,
    grid1: &GridSpec,
    method: Method,
) -> Result<WignerSlice, WignerError> {
    let mut values = Vec::with_capacity(grid0.n * grid1.n);
    let quad = match method {
        Method::Numeric => {
            // a window that covers every slice point: momentum phase rates
            // grow with |p|, so size for the largest sampled momentum
            let mut worst = PhaseSpacePoint::ORIGIN;
            for axis in binding.free() {
                let m = grid0.max.abs().max(grid0.min.abs());
                let m1 = grid1.max.abs().max(grid1.min.abs());
                let v = if axis == binding.free()[0] { m } else { m1 };
                worst.set(axis, v);
            }
            for (axis, v) in binding.bound_axes() {
                worst.set(axis, v);
            }
            Some(QuadratureSpec::auto_for_bipartite(state, &worst))
        }
        _ => None,
    };
    for u in grid0.values() {
        for v in grid1.values() {
            let pt = binding.point_at(u, v);
            let w = match method {
                Method::Analytic => wigner_analytic(state, &pt)?,
                Method::Numeric => wigner_numeric(state, &pt, quad.as_ref().unwrap())?,
                Method::Mesoscopic => mesoscopic_wigner(state, &pt)?.value,
                Method::Synthetic => {
                    return Err(WignerError::InvalidBinding(
                        "synthetic slices are built with WignerSlice::from_fn".into(),
                    ))
                }
            };
            if !w.is_finite() {
                return Err(WignerError::NonFinite);
            }
            values.push(w);
        }
    }
    if matches!(method, Method::Analytic | Method::Numeric) {
        let hb = state.geometry().hbar();
        let bound = state.norm_sqr() / (PI * hb * PI * hb) + 1e-9;
        for w in &values {
            if w.abs() > bound {
                return Err(WignerError::NonFinite);
            }
        }
    }
    Ok(WignerSlice { binding: *binding, grid0: *grid0, grid1: *grid1, values, method })
}

/// Per-axis grids for the full 4-D normalization integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid4 {
    pub x1: GridSpec,
    pub p1: GridSpec,
    pub x2: GridSpec,
    pub p2: GridSpec,
}

impl Grid4 {
    /// Grids covering all pair midpoints to ±8σ of the pair Gaussians.
    pub fn auto(state: &BipartiteState, n: usize) -> Result<Self, WignerError> {
        let g = state.geometry();
        let (d, hb) = (g.delta(), g.hbar());
        let sx = d / std::f64::consts::SQRT_2;
        let sp = hb / (d * std::f64::consts::SQRT_2);
        let axis = |centers: &[f64], sigma: f64| -> Result<GridSpec, WignerError> {
            let lo = centers.iter().fold(f64::INFINITY, |m, &v| m.min(v)) - 8.0 * sigma;
            let hi = centers.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) + 8.0 * sigma;
            GridSpec::new(lo, hi, n)
        };
        let x1: Vec<f64> = state.components().iter().map(|c| g.x_center(c.center1)).collect();
        let p1: Vec<f64> = state.components().iter().map(|c| g.p_center(c.center1)).collect();
        let x2: Vec<f64> = state.components().iter().map(|c| g.x_center(c.center2)).collect();
        let p2: Vec<f64> = state.components().iter().map(|c| g.p_center(c.center2)).collect();
        Ok(Self {
            x1: axis(&x1, sx)?,
            p1: axis(&p1, sp)?,
            x2: axis(&x2, sx)?,
            p2: axis(&p2, sp)?,
        })
    }
}

/// ∫∫∫∫ W d⁴z over the given grids; equals the squared norm for adequate
/// coverage. Uses the separable structure of each pair kernel, so the cost
/// is per-axis rather than a raw 4-D sum.
pub fn integrate_wigner(state: &BipartiteState, grid: &Grid4) -> Result<f64, WignerError> {
    let g = state.geometry();
    let (d, hb) = (g.delta(), g.hbar());
    let sx = d / std::f64::consts::SQRT_2;
    let sp = hb / (d * std::f64::consts::SQRT_2);

    // coverage: every pair midpoint must sit ≥ 6σ inside the grid
    let mut mid_x = [Vec::new(), Vec::new()];
    let mut mid_p = [Vec::new(), Vec::new()];
    for j in state.components() {
        for k in state.components() {
            for (mode, (cj, ck)) in
                [(j.center1, k.center1), (j.center2, k.center2)].into_iter().enumerate()
            {
                let mid = 0.5 * (cj + ck);
                mid_x[mode].push(g.x_center(mid));
                mid_p[mode].push(g.p_center(mid));
            }
        }
    }
    let check = |grid: &GridSpec, centers: &[f64], sigma: f64, axis: &'static str| {
        let lo = centers.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        let hi = centers.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        if grid.min > lo - 6.0 * sigma || grid.max < hi + 6.0 * sigma {
            Err(WignerError::CoverageFailure { axis })
        } else {
            Ok(())
        }
    };
    check(&grid.x1, &mid_x[0], sx, "x1")?;
    check(&grid.p1, &mid_p[0], sp, "p1")?;
    check(&grid.x2, &mid_x[1], sx, "x2")?;
    check(&grid.p2, &mid_p[1], sp, "p2")?;

    // x-part of the kernel exponent: −u² + √2·(k + b̄)·u, u = x/δ
    // p-part: −q² + i·√2·q·(k − b̄), q = p·δ/ħ
    let trap_x = |spec: &GridSpec, ket: C64, bra: C64| -> C64 {
        let coef = std::f64::consts::SQRT_2 * (ket + bra.conj());
        let h = spec.spacing();
        let mut acc = C64::new(0.0, 0.0);
        for (i, x) in spec.values().enumerate() {
            let u = x / d;
            let w = if i == 0 || i == spec.n - 1 { 0.5 } else { 1.0 };
            acc += w * (coef * u - u * u).exp();
        }
        acc * h
    };
    let trap_p = |spec: &GridSpec, ket: C64, bra: C64| -> C64 {
        let coef = C64::new(0.0, std::f64::consts::SQRT_2) * (ket - bra.conj());
        let h = spec.spacing();
        let mut acc = C64::new(0.0, 0.0);
        for (i, p) in spec.values().enumerate() {
            let q = p * d / hb;
            let w = if i == 0 || i == spec.n - 1 { 0.5 } else { 1.0 };
            acc += w * (coef * q - q * q).exp();
        }
        acc * h
    };

    let pf = (PI * hb) * (PI * hb);
    let mut sum = C64::new(0.0, 0.0);
    for j in state.components() {
        for k in state.components() {
            let const1 = -j.center1 * k.center1.conj()
                - 0.5 * (j.center1.norm_sqr() + k.center1.norm_sqr());
            let const2 = -j.center2 * k.center2.conj()
                - 0.5 * (j.center2.norm_sqr() + k.center2.norm_sqr());
            let i1 = trap_x(&grid.x1, j.center1, k.center1)
                * trap_p(&grid.p1, j.center1, k.center1)
                * const1.exp();
            let i2 = trap_x(&grid.x2, j.center2, k.center2)
                * trap_p(&grid.p2, j.center2, k.center2)
                * const2.exp();
            sum += j.weight * k.weight.conj() * i1 * i2;
        }
    }
    let wsum: f64 = state.components().iter().map(|c| c.weight.norm()).sum();
    check_residue(sum / pf, wsum * wsum)
}

/// Single-mode version of [`integrate_wigner`].
pub fn integrate_wigner_single(
    state: &SingleModeState,
    grid_x: &GridSpec,
    grid_p: &GridSpec,
) -> Result<f64, WignerError> {
    let g = state.geometry();
    let (d, hb) = (g.delta(), g.hbar());
    let sx = d / std::f64::consts::SQRT_2;
    let sp = hb / (d * std::f64::consts::SQRT_2);
    let mut mx = Vec::new();
    let mut mp = Vec::new();
    for j in state.components() {
        for k in state.components() {
            let mid = 0.5 * (j.center + k.center);
            mx.push(g.x_center(mid));
            mp.push(g.p_center(mid));
        }
    }
    let lo_x = mx.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let hi_x = mx.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    if grid_x.min > lo_x - 6.0 * sx || grid_x.max < hi_x + 6.0 * sx {
        return Err(WignerError::CoverageFailure { axis: "x" });
    }
    let lo_p = mp.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let hi_p = mp.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    if grid_p.min > lo_p - 6.0 * sp || grid_p.max < hi_p + 6.0 * sp {
        return Err(WignerError::CoverageFailure { axis: "p" });
    }
    let mut sum = C64::new(0.0, 0.0);
    for j in state.components() {
        for k in state.components() {
            let cst = -j.center * k.center.conj()
                - 0.5 * (j.center.norm_sqr() + k.center.norm_sqr());
            let coef_x = std::f64::consts::SQRT_2 * (j.center + k.center.conj());
            let coef_p = C64::new(0.0, std::f64::consts::SQRT_2) * (j.center - k.center.conj());
            let mut ix = C64::new(0.0, 0.0);
            for (i, x) in grid_x.values().enumerate() {
                let u = x / d;
                let w = if i == 0 || i == grid_x.n - 1 { 0.5 } else { 1.0 };
                ix += w * (coef_x * u - u * u).exp();
            }
            ix *= grid_x.spacing();
            let mut ip = C64::new(0.0, 0.0);
            for (i, p) in grid_p.values().enumerate() {
                let q = p * d / hb;
                let w = if i == 0 || i == grid_p.n - 1 { 0.5 } else { 1.0 };
                ip += w * (coef_p * q - q * q).exp();
            }
            ip *= grid_p.spacing();
            sum += j.weight * k.weight.conj() * ix * ip * cst.exp();
        }
    }
    let wsum: f64 = state.components().iter().map(|c| c.weight.norm()).sum();
    check_residue(sum / (PI * hb), wsum * wsum)
}

fn momentum_window(geom: &ModeGeometry, p_centers: &[f64]) -> (f64, f64, usize) {
    let (d, hb) = (geom.delta(), geom.hbar());
    let lo = p_centers.iter().fold(f64::INFINITY, |m, &v| m.min(v)) - 8.0 * hb / d;
    let hi = p_centers.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) + 8.0 * hb / d;
    // plane-wave rate in p is set by position-center separations
    let n = 1025;
    (lo, hi, n)
}

/// Position density of one particle from the Wigner side: the other
/// particle is traced out in closed form, the conjugate momentum is
/// integrated by trapezoid. Only the position axes are supported.
pub fn marginal(
    state: &BipartiteState,
    axis: PhaseAxis,
    grid: &GridSpec,
) -> Result<Vec<(f64, f64)>, WignerError> {
    if !axis.is_position() {
        return Err(WignerError::UnsupportedAxis(axis.name()));
    }
    let g = state.geometry();
    let hb = g.hbar();
    let comps = state.components();
    // (ket center on the marginal mode, bra center, trace of the other mode)
    let pairs: Vec<(C64, C64, C64)> = comps
        .iter()
        .flat_map(|j| {
            comps.iter().map(move |k| match axis.mode() {
                0 => (
                    j.center1,
                    k.center1,
                    j.weight * k.weight.conj() * crate::state::coherent_overlap(j.center2, k.center2),
                ),
                _ => (
                    j.center2,
                    k.center2,
                    j.weight * k.weight.conj() * crate::state::coherent_overlap(j.center1, k.center1),
                ),
            })
        })
        .collect();
    let p_centers: Vec<f64> = pairs.iter().map(|(kc, _, _)| g.p_center(*kc)).collect();
    let (plo, phi, np) = momentum_window(g, &p_centers);
    let hp = (phi - plo) / (np - 1) as f64;
    let mut out = Vec::with_capacity(grid.n);
    let wsum: f64 = comps.iter().map(|c| c.weight.norm()).sum();
    for x in grid.values() {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..np {
            let p = plo + i as f64 * hp;
            let zeta = g.zeta(x, p);
            let w = if i == 0 || i == np - 1 { 0.5 } else { 1.0 };
            let mut point = C64::new(0.0, 0.0);
            for (ket, bra, coef) in &pairs {
                point += coef * pair_kernel(*ket, *bra, zeta);
            }
            acc += w * point;
        }
        acc *= hp / (PI * hb);
        let density = check_residue(acc, wsum * wsum / (PI * hb))?;
        out.push((x, density));
    }
    Ok(out)
}

/// Single-mode position density from the Wigner side.
pub fn marginal_single(
    state: &SingleModeState,
    grid: &GridSpec,
) -> Result<Vec<(f64, f64)>, WignerError> {
    let g = state.geometry();
    let hb = g.hbar();
    let p_centers: Vec<f64> =
        state.components().iter().map(|c| g.p_center(c.center)).collect();
    let (plo, phi, np) = momentum_window(g, &p_centers);
    let hp = (phi - plo) / (np - 1) as f64;
    let wsum: f64 = state.components().iter().map(|c| c.weight.norm()).sum();
    let mut out = Vec::with_capacity(grid.n);
    for x in grid.values() {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..np {
            let p = plo + i as f64 * hp;
            let zeta = g.zeta(x, p);
            let w = if i == 0 || i == np - 1 { 0.5 } else { 1.0 };
            for j in state.components() {
                for k in state.components() {
                    acc += w
                        * j.weight
                        * k.weight.conj()
                        * pair_kernel(j.center, k.center, zeta);
                }
            }
        }
        acc *= hp / (PI * hb);
        let density = check_residue(acc, wsum * wsum / (PI * hb))?;
        out.push((x, density));
    }
    Ok(out)
}

/// Mesoscopic-limit estimate: only the component pairs whose centers are
/// exactly opposite in both modes are kept. These are the origin-centered
/// oscillatory terms; everything dropped carries a Gaussian suppression
/// set by the component separations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MesoscopicEstimate {
    pub value: f64,
    /// Smallest x₀²/δ²-equivalent of a kept pair; the approximation is
    /// trustworthy for values ≳ 9.
    pub regime_metric: f64,
    pub regime_ok: bool,
}

/// Threshold on the squared displacement (in ground-state widths) below
/// which the mesoscopic truncation is flagged.
pub const MESOSCOPIC_REGIME_MIN: f64 = 9.0;

pub fn mesoscopic_wigner(
    state: &BipartiteState,
    pt: &PhaseSpacePoint,
) -> Result<MesoscopicEstimate, WignerError> {
    let g = state.geometry();
    let z1 = g.zeta(pt.x1, pt.p1);
    let z2 = g.zeta(pt.x2, pt.p2);
    let tol = 1e-9;
    let mut sum = C64::new(0.0, 0.0);
    let mut metric = f64::INFINITY;
    let mut kept = 0usize;
    for j in state.components() {
        for k in state.components() {
            let opposite = (j.center1 + k.center1).norm() <= tol
                && (j.center2 + k.center2).norm() <= tol;
            if !opposite {
                continue;
            }
            kept += 1;
            // per-mode displacement measured as x₀²/δ² of the kept pair
            metric = metric.min(2.0 * j.center1.norm_sqr());
            metric = metric.min(2.0 * j.center2.norm_sqr());
            sum += j.weight
                * k.weight.conj()
                * pair_kernel(j.center1, k.center1, z1)
                * pair_kernel(j.center2, k.center2, z2);
        }
    }
    if kept == 0 {
        return Ok(MesoscopicEstimate { value: 0.0, regime_metric: 0.0, regime_ok: false });
    }
    let pf = (PI * g.hbar()) * (PI * g.hbar());
    let wsum: f64 = state.components().iter().map(|c| c.weight.norm()).sum();
    let value = check_residue(sum, wsum * wsum)? / pf;
    Ok(MesoscopicEstimate {
        value,
        regime_metric: metric,
        regime_ok: metric >= MESOSCOPIC_REGIME_MIN,
    })
}

/// True when a compass amplitude α is deep enough in the mesoscopic regime
/// for the truncated expansion.
pub fn mesoscopic_regime_ok(alpha: C64) -> bool {
    2.0 * alpha.norm_sqr() >= MESOSCOPIC_REGIME_MIN
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{make_compass_bipartite, CompassCoefficients};
    use crate::state::{make_cat, vacuum, BipartiteComponent, GaussianComponent, Parity};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn std_geom() -> ModeGeometry {
        ModeGeometry::standard()
    }

    #[test]
    fn vacuum_wigner_peak() {
        let g = std_geom();
        let v = vacuum(g);
        let w = wigner_analytic_single(&v, 0.0, 0.0).unwrap();
        assert!((w - 1.0 / PI).abs() < 1e-14);
        // product vacuum at the 4-D origin
        let vv = BipartiteState::normalized(
            g,
            vec![BipartiteComponent::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))],
        )
        .unwrap();
        let w2 = wigner_analytic(&vv, &PhaseSpacePoint::ORIGIN).unwrap();
        assert!((w2 - 1.0 / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn vacuum_numeric_matches_closed_form() {
        let g = std_geom();
        let v = vacuum(g);
        let quad = QuadratureSpec::new(14.0, 256).unwrap();
        let w = wigner_numeric_single(&v, 0.0, 0.0, &quad).unwrap();
        assert!((w - 1.0 / PI).abs() < 1e-10);
    }

    #[test]
    fn numeric_rejects_small_window() {
        let g = std_geom();
        let s = SingleModeState::normalized(
            g,
            vec![GaussianComponent::new(c(1.0, 0.0), c(3.0, 0.0))],
        )
        .unwrap();
        // window misses the displaced Gaussian pair envelope
        let quad = QuadratureSpec::new(2.0, 64).unwrap();
        match wigner_numeric_single(&s, 3.0 * std::f64::consts::SQRT_2, 0.0, &quad) {
            Err(WignerError::WindowTooSmall { .. }) => {}
            other => panic!("expected WindowTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn analytic_matches_numeric_on_random_single_mode_states() {
        let g = ModeGeometry::new(1.0, 0.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..12 {
            let n = rng.random_range(1..=4);
            let comps: Vec<GaussianComponent> = (0..n)
                .map(|_| {
                    GaussianComponent::new(
                        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                        c(rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5)),
                    )
                })
                .collect();
            let Ok(s) = SingleModeState::normalized(g, comps) else { continue };
            for _ in 0..5 {
                let x = rng.random_range(-3.0..3.0);
                let p = rng.random_range(-3.0..3.0);
                let quad = QuadratureSpec::auto_for_single(&s, p);
                let wa = wigner_analytic_single(&s, x, p).unwrap();
                let wn = wigner_numeric_single(&s, x, p, &quad).unwrap();
                assert!((wa - wn).abs() < 1e-8, "x={x} p={p}: {wa} vs {wn}");
            }
        }
    }

    #[test]
    fn analytic_matches_numeric_on_compass_bipartite() {
        let g = std_geom();
        let cc = CompassCoefficients::coherent(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(3.0, 0.0)).unwrap();
        let quad = QuadratureSpec::auto_for_bipartite(&s, &PhaseSpacePoint::ORIGIN);
        let wa = wigner_analytic(&s, &PhaseSpacePoint::ORIGIN).unwrap();
        let est = wigner_numeric_refined(&s, &PhaseSpacePoint::ORIGIN, &quad).unwrap();
        assert!((wa - est.value).abs() < 1e-8, "{wa} vs {:?}", est);
        assert!(est.refinement_delta < 1e-9);
        // an off-origin point with all four coordinates engaged
        let pt = PhaseSpacePoint::new(0.21, -0.4, 0.55, 0.13);
        let quad = QuadratureSpec::auto_for_bipartite(&s, &pt);
        let wa = wigner_analytic(&s, &pt).unwrap();
        let wn = wigner_numeric(&s, &pt, &quad).unwrap();
        assert!((wa - wn).abs() < 1e-8, "{wa} vs {wn}");
    }

    #[test]
    fn magnitude_bound_holds() {
        let g = std_geom();
        let cc = CompassCoefficients::coherent(c(0.9, 0.2), c(1.0, 0.0), c(0.4, -0.6), c(0.0, 0.8))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(2.0, 0.0)).unwrap();
        let bound = 1.0 / (PI * PI) + 1e-9;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let pt = PhaseSpacePoint::new(
                rng.random_range(-4.0..4.0),
                rng.random_range(-4.0..4.0),
                rng.random_range(-4.0..4.0),
                rng.random_range(-4.0..4.0),
            );
            let w = wigner_analytic(&s, &pt).unwrap();
            assert!(w.abs() <= bound);
        }
    }

    #[test]
    fn displacement_covariance() {
        let g = std_geom();
        let cc = CompassCoefficients::coherent(c(1.0, 0.0), c(0.5, 0.3), c(0.2, 0.0), c(0.0, 0.4))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(2.0, 0.0)).unwrap();
        let (g1, g2) = (c(0.3, -0.5), c(-0.7, 0.2));
        let moved = s.displaced(g1, g2);
        let shift = |gam: C64| (g.x_center(gam), g.p_center(gam));
        let (dx1, dp1) = shift(g1);
        let (dx2, dp2) = shift(g2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let pt = PhaseSpacePoint::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let translated =
                PhaseSpacePoint::new(pt.x1 + dx1, pt.p1 + dp1, pt.x2 + dx2, pt.p2 + dp2);
            let w0 = wigner_analytic(&s, &pt).unwrap();
            let w1 = wigner_analytic(&moved, &translated).unwrap();
            assert!((w0 - w1).abs() < 1e-8);
        }
    }

    #[test]
    fn exchange_symmetry_of_symmetric_states() {
        let g = std_geom();
        let cc = CompassCoefficients::coherent(c(1.0, 0.0), c(0.8, 0.0), c(0.5, 0.0), c(0.5, 0.0))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(2.5, 0.0)).unwrap();
        assert!((s.fidelity(&s.exchanged()).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let pt = PhaseSpacePoint::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            let swapped = PhaseSpacePoint::new(pt.x2, pt.p2, pt.x1, pt.p1);
            let a = wigner_analytic(&s, &pt).unwrap();
            let b = wigner_analytic(&s, &swapped).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn integral_equals_squared_norm() {
        let g = std_geom();
        let vv = BipartiteState::normalized(
            g,
            vec![BipartiteComponent::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))],
        )
        .unwrap();
        let grid = Grid4::auto(&vv, 257).unwrap();
        let total = integrate_wigner(&vv, &grid).unwrap();
        assert!((total - 1.0).abs() < 1e-10);

        let cc = CompassCoefficients::coherent(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(3.0, 0.0)).unwrap();
        let grid = Grid4::auto(&s, 257).unwrap();
        let total = integrate_wigner(&s, &grid).unwrap();
        assert!((total - 1.0).abs() < 1e-6, "got {total}");

        // linearity: scaled state integrates to its squared norm
        let scaled = s.scaled(c(std::f64::consts::SQRT_2, 0.0));
        let total2 = integrate_wigner(&scaled, &grid).unwrap();
        assert!((total2 - 2.0).abs() < 1e-6, "got {total2}");
    }

    #[test]
    fn integral_coverage_check_fires() {
        let g = std_geom();
        let cc = CompassCoefficients::coherent(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(3.0, 0.0)).unwrap();
        let tight = GridSpec::symmetric(2.0, 65).unwrap();
        let grid = Grid4 { x1: tight, p1: tight, x2: tight, p2: tight };
        assert!(matches!(
            integrate_wigner(&s, &grid),
            Err(WignerError::CoverageFailure { .. })
        ));
    }

    #[test]
    fn marginal_matches_position_density_single() {
        let g = std_geom();
        // vacuum
        let v = vacuum(g);
        let grid = GridSpec::symmetric(3.0, 31).unwrap();
        for (x, dens) in marginal_single(&v, &grid).unwrap() {
            let expect = v.position_amplitude(x).norm_sqr();
            assert!((dens - expect).abs() < 1e-6, "x={x}");
        }
        // even cat: double-humped density
        let cat = make_cat(g, c(2.0, 0.0), Parity::Even).unwrap();
        let grid = GridSpec::symmetric(6.0, 61).unwrap();
        for (x, dens) in marginal_single(&cat, &grid).unwrap() {
            let expect = cat.position_amplitude(x).norm_sqr();
            assert!((dens - expect).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn marginal_matches_reduced_density_bipartite() {
        let g = std_geom();
        let cc = CompassCoefficients::coherent(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(2.0, 0.0)).unwrap();
        let grid = GridSpec::symmetric(5.0, 21).unwrap();
        let wig = marginal(&s, PhaseAxis::X1, &grid).unwrap();
        // oracle: 1-D quadrature of |Ψ(x₁, x₂)|² over x₂
        let (lo, hi, n) = (-9.0, 9.0, 4001);
        let h = (hi - lo) / (n - 1) as f64;
        for (x1, dens) in wig {
            let mut acc = 0.0;
            for i in 0..n {
                let x2 = lo + i as f64 * h;
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                acc += w * s.position_amplitude(x1, x2).norm_sqr();
            }
            acc *= h;
            assert!((dens - acc).abs() < 1e-6, "x1={x1}: {dens} vs {acc}");
        }
        assert!(matches!(
            marginal(&s, PhaseAxis::P1, &grid),
            Err(WignerError::UnsupportedAxis(_))
        ));
    }

    #[test]
    fn slice_checkerboard_and_symmetry() {
        let g = std_geom();
        let cc = CompassCoefficients::coherent(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(3.0, 0.0)).unwrap();
        let grid = GridSpec::symmetric(0.9, 61).unwrap();
        let slice = wigner_slice(&s, &SliceBinding::x1p1(0.0, 0.0), &grid, &grid, Method::Analytic)
            .unwrap();
        // alternating-sign extrema: both signs present well away from zero
        let max = slice.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = slice.values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max > 0.01 && min < -0.01, "max {max} min {min}");

        // exchange symmetry between the two particle planes
        let s12 = wigner_slice(&s, &SliceBinding::x1p1(0.31, -0.17), &grid, &grid, Method::Analytic)
            .unwrap();
        let s21 = wigner_slice(&s, &SliceBinding::x2p2(0.31, -0.17), &grid, &grid, Method::Analytic)
            .unwrap();
        for (a, b) in s12.values.iter().zip(&s21.values) {
            assert!((a - b).abs() < 1e-10);
        }

        // a vacuum-pair slice is a single positive bump
        let vv = BipartiteState::normalized(
            g,
            vec![BipartiteComponent::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))],
        )
        .unwrap();
        let vs = wigner_slice(&vv, &SliceBinding::x1p1(0.0, 0.0), &grid, &grid, Method::Analytic)
            .unwrap();
        assert!(vs.values.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn slice_numeric_agrees_with_analytic_elementwise() {
        let g = std_geom();
        let cc = CompassCoefficients::coherent(c(1.0, 0.0), c(0.7, 0.2), c(0.0, 0.0), c(0.0, 0.0))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(1.5, 0.0)).unwrap();
        let grid = GridSpec::symmetric(0.8, 7).unwrap();
        let binding = SliceBinding::x1p1(0.1, -0.2);
        let a = wigner_slice(&s, &binding, &grid, &grid, Method::Analytic).unwrap();
        let n = wigner_slice(&s, &binding, &grid, &grid, Method::Numeric).unwrap();
        for (x, y) in a.values.iter().zip(&n.values) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn mesoscopic_limit_tracks_full_wigner_near_origin() {
        let g = std_geom();
        let cc = CompassCoefficients::coherent(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))
            .unwrap();
        let s = make_compass_bipartite(g, &cc, c(4.0, 0.0)).unwrap();
        let mut max_w = 0.0_f64;
        let mut max_err = 0.0_f64;
        let steps = 5;
        for i in 0..steps {
            for j in 0..steps {
                for k in 0..steps {
                    for l in 0..steps {
                        let f = |t: usize| (t as f64 / (steps - 1) as f64) - 0.5;
                        let pt = PhaseSpacePoint::new(f(i) * 1.0, f(j) * 1.0, f(k), f(l));
                        let full = wigner_analytic(&s, &pt).unwrap();
                        let meso = mesoscopic_wigner(&s, &pt).unwrap();
                        assert!(meso.regime_ok);
                        max_w = max_w.max(full.abs());
                        max_err = max_err.max((full - meso.value).abs());
                    }
                }
            }
        }
        assert!(max_err <= 1e-4 * max_w, "err {max_err} vs cap {:.3e}", 1e-4 * max_w);
    }

    #[test]
    fn mesoscopic_structure_by_coefficient_family() {
        let g = std_geom();
        let a4 = c(4.0, 0.0);
        // cat-basis pure-A state: even cos·cos pattern only (symmetric in
        // sign flips of both free variables)
        let cat = CompassCoefficients::cat(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
            .unwrap();
        let s = make_compass_bipartite(g, &cat, a4).unwrap();
        for (u, v) in [(0.11, 0.07), (0.2, -0.15), (0.05, 0.31)] {
            let w = |x1: f64, p1: f64| {
                mesoscopic_wigner(&s, &PhaseSpacePoint::new(x1, p1, 0.0, 0.0)).unwrap().value
            };
            assert!((w(u, v) - w(-u, v)).abs() < 1e-12);
            assert!((w(u, v) - w(u, -v)).abs() < 1e-12);
        }
        // On the x₁p₁ slice at a generic bound point the x₁ oscillation is
        // |K|·cos(2p₀x₁/ħ + arg K) with K = a·b̄·e^{−2ix₀p₂/ħ} + c·d̄·e^{+2ix₀p₂/ħ}.
        // The pure-A cat state has a = b = c = d, K stays real and the
        // pattern stays on the even cosine lattice; with only c,d ≠ 0 the
        // sine component shifts it.
        let at = |s: &BipartiteState, x1: f64| {
            mesoscopic_wigner(s, &PhaseSpacePoint::new(x1, 0.0, 0.0, 0.1)).unwrap().value
        };
        let cd = CompassCoefficients::coherent(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))
            .unwrap();
        let s_cd = make_compass_bipartite(g, &cd, a4).unwrap();
        let asym_cd = (at(&s_cd, 0.17) - at(&s_cd, -0.17)).abs();
        let asym_a = (at(&s, 0.17) - at(&s, -0.17)).abs();
        assert!(asym_cd > 1e-4, "expected shifted pattern, asym {asym_cd}");
        assert!(asym_a < 1e-12, "pure-A state should stay on the even lattice");
        // pure-a state keeps no opposite pairs at all
        let a_only =
            CompassCoefficients::coherent(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
                .unwrap();
        let s3 = make_compass_bipartite(g, &a_only, a4).unwrap();
        let m = mesoscopic_wigner(&s3, &PhaseSpacePoint::ORIGIN).unwrap();
        assert_eq!(m.value, 0.0);
        assert!(!m.regime_ok);
    }
}
