//! Zero-line detection and fundamental-tile measurement on Wigner slices.
//!
//! The checkerboard zeros of a compass-state slice sit on lines; along a
//! scan line parallel to a free axis the crossings are equally spaced
//! exactly when the conjugate offset sits a quarter cell off the slice
//! center, where the competing oscillation passes through zero. Scan-line
//! selection therefore ranks candidate grid lines by crossing count and
//! spacing uniformity rather than assuming the center line, and the
//! refinement stage re-tunes the offset on the analytic evaluator before
//! polishing each root.

use crate::state::BipartiteState;
use crate::wigner::{
    wigner_analytic, PhaseAxis, SliceBinding, WignerError, WignerSlice,
};

/// Crossings found along one free axis of a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisZeros {
    /// The free axis the scan runs along.
    pub axis: PhaseAxis,
    /// Value of the other free axis on the chosen scan line.
    pub offset: f64,
    /// Crossing positions in increasing order.
    pub zeros: Vec<f64>,
    /// (max gap − min gap)/mean gap over adjacent crossings; 0 when fewer
    /// than three crossings.
    pub spacing_spread: f64,
}

/// Zero crossings along both free axes of a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroScan {
    pub axes: [AxisZeros; 2],
}

/// Sign-change crossings by linear interpolation; samples below `noise`
/// in magnitude are treated as numerically zero and skipped.
fn crossings_from_samples(positions: &[f64], values: &[f64], noise: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..values.len().saturating_sub(1) {
        let (f0, f1) = (values[i], values[i + 1]);
        if f0.abs() <= noise || f1.abs() <= noise {
            continue;
        }
        if f0 * f1 < 0.0 {
            let t = positions[i] - f0 * (positions[i + 1] - positions[i]) / (f1 - f0);
            out.push(t);
        }
    }
    out
}

fn spacing_spread(zeros: &[f64]) -> f64 {
    if zeros.len() < 3 {
        return 0.0;
    }
    let gaps: Vec<f64> = zeros.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let lo = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mean <= 0.0 {
        return f64::INFINITY;
    }
    (hi - lo) / mean
}

/// Detect zero crossings along both free axes of a sampled slice.
///
/// For each axis every grid line parallel to it is scanned; the line with
/// the most robust crossings wins, ties resolved by spacing uniformity and
/// then by distance of the line from the grid center.
pub fn find_zero_crossings(slice: &WignerSlice) -> Result<ZeroScan, WignerError> {
    let noise = 1e-12 * slice.max_abs().max(f64::MIN_POSITIVE);
    let free = slice.binding.free();
    let mut results: Vec<AxisZeros> = Vec::with_capacity(2);
    for axis_idx in 0..2 {
        let (scan_grid, line_grid) = if axis_idx == 0 {
            (&slice.grid0, &slice.grid1)
        } else {
            (&slice.grid1, &slice.grid0)
        };
        let positions: Vec<f64> = scan_grid.values().collect();
        let line_center = 0.5 * (line_grid.min + line_grid.max);
        let mut best: Option<AxisZeros> = None;
        for (li, offset) in line_grid.values().enumerate() {
            let values: Vec<f64> = (0..scan_grid.n)
                .map(|si| {
                    if axis_idx == 0 {
                        slice.value(si, li)
                    } else {
                        slice.value(li, si)
                    }
                })
                .collect();
            let zeros = crossings_from_samples(&positions, &values, noise);
            if zeros.len() < 2 {
                continue;
            }
            let cand = AxisZeros {
                axis: free[axis_idx],
                offset,
                spacing_spread: spacing_spread(&zeros),
                zeros,
            };
            let better = match &best {
                None => true,
                Some(b) => {
                    (cand.zeros.len(), -cand.spacing_spread, -(cand.offset - line_center).abs())
                        .partial_cmp(&(
                            b.zeros.len(),
                            -b.spacing_spread,
                            -(b.offset - line_center).abs(),
                        ))
                        .map(|o| o == std::cmp::Ordering::Greater)
                        .unwrap_or(false)
                }
            };
            if better {
                best = Some(cand);
            }
        }
        match best {
            Some(b) => results.push(b),
            None => {
                return Err(WignerError::NoZeroCrossings { axis: free[axis_idx].name() })
            }
        }
    }
    let [a, b] = [results.remove(0), results.remove(0)];
    Ok(ZeroScan { axes: [a, b] })
}

/// Safeguarded secant root polish inside a sign-change bracket.
fn refine_root(mut lo: f64, mut hi: f64, mut flo: f64, mut fhi: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    debug_assert!(flo * fhi < 0.0);
    let span = (hi - lo).abs();
    for _ in 0..80 {
        if (hi - lo).abs() <= 1e-13 * span.max(1.0) {
            break;
        }
        let mut mid = lo - flo * (hi - lo) / (fhi - flo);
        // fall back to bisection when secant stalls at an endpoint
        let margin = 0.01 * (hi - lo);
        if !(mid > lo + margin && mid < hi - margin) {
            mid = 0.5 * (lo + hi);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

struct LineScan {
    zeros: Vec<f64>,
    spread: f64,
}

fn scan_line(
    state: &BipartiteState,
    binding: &SliceBinding,
    axis_idx: usize,
    offset: f64,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<LineScan, WignerError> {
    let eval = |t: f64| -> Result<f64, WignerError> {
        let (u, v) = if axis_idx == 0 { (t, offset) } else { (offset, t) };
        wigner_analytic(state, &binding.point_at(u, v))
    };
    let h = (hi - lo) / (n - 1) as f64;
    let mut positions = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let t = lo + i as f64 * h;
        positions.push(t);
        values.push(eval(t)?);
    }
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let noise = 1e-12 * peak.max(f64::MIN_POSITIVE);
    let brackets = crossings_from_samples(&positions, &values, noise);
    let mut zeros = Vec::with_capacity(brackets.len());
    for t in brackets {
        // rebuild the bracket around the interpolated crossing
        let i = (((t - lo) / h).floor() as usize).min(n - 2);
        let (tlo, thi) = (positions[i], positions[i + 1]);
        let (flo, fhi) = (values[i], values[i + 1]);
        if flo * fhi < 0.0 {
            let f = |x: f64| eval(x).unwrap_or(f64::NAN);
            zeros.push(refine_root(tlo, thi, flo, fhi, &f));
        }
    }
    let spread = if zeros.len() < 2 { f64::INFINITY } else { spacing_spread(&zeros) };
    Ok(LineScan { spread, zeros })
}

/// Re-measure a zero scan on the analytic evaluator: the scan-line offset
/// is tuned to the most uniform crossing spacing within two grid cells of
/// the sampled choice, then every crossing is root-polished.
pub fn refine_zero_scan(
    state: &BipartiteState,
    slice: &WignerSlice,
    scan: &ZeroScan,
) -> Result<ZeroScan, WignerError> {
    let binding = &slice.binding;
    let mut refined: Vec<AxisZeros> = Vec::with_capacity(2);
    for axis_idx in 0..2 {
        let (scan_grid, line_grid) = if axis_idx == 0 {
            (&slice.grid0, &slice.grid1)
        } else {
            (&slice.grid1, &slice.grid0)
        };
        let seed = &scan.axes[axis_idx];
        let n = scan_grid.n.max(65);
        let cell = line_grid.spacing();
        let (lo, hi) = (scan_grid.min, scan_grid.max);
        let spread_at = |o: f64| -> f64 {
            scan_line(state, binding, axis_idx, o, lo, hi, n)
                .map(|s| s.spread)
                .unwrap_or(f64::INFINITY)
        };
        // coarse bracket over ±2 cells, then golden-section on the winner
        let mut best_o = seed.offset;
        let mut best_s = spread_at(best_o);
        let m = 9;
        for k in 0..=m {
            let o = seed.offset - 2.0 * cell + 4.0 * cell * k as f64 / m as f64;
            let s = spread_at(o);
            if s < best_s {
                best_s = s;
                best_o = o;
            }
        }
        if best_s.is_finite() {
            let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
            let (mut a, mut b) = (best_o - 0.5 * cell, best_o + 0.5 * cell);
            let mut c1 = b - phi * (b - a);
            let mut c2 = a + phi * (b - a);
            let (mut f1, mut f2) = (spread_at(c1), spread_at(c2));
            for _ in 0..40 {
                if f1 < f2 {
                    b = c2;
                    c2 = c1;
                    f2 = f1;
                    c1 = b - phi * (b - a);
                    f1 = spread_at(c1);
                } else {
                    a = c1;
                    c1 = c2;
                    f1 = f2;
                    c2 = a + phi * (b - a);
                    f2 = spread_at(c2);
                }
            }
            let o = 0.5 * (a + b);
            if spread_at(o) < best_s {
                best_o = o;
            }
        }
        let line = scan_line(state, binding, axis_idx, best_o, lo, hi, n)?;
        if line.zeros.len() < 2 {
            return Err(WignerError::NoZeroCrossings {
                axis: binding.free()[axis_idx].name(),
            });
        }
        refined.push(AxisZeros {
            axis: binding.free()[axis_idx],
            offset: best_o,
            spacing_spread: line.spread,
            zeros: line.zeros,
        });
    }
    let [a, b] = [refined.remove(0), refined.remove(0)];
    Ok(ZeroScan { axes: [a, b] })
}

/// Adjacent-zero spacings, fundamental tile area, and the ratios of the
/// measured area to the two closed-form reference values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileMetrics {
    /// Mean adjacent-zero spacing along each free axis.
    pub spacing: [f64; 2],
    /// Number of zeros detected per free axis.
    pub counts: [usize; 2],
    /// Product of the two spacings.
    pub area: f64,
    /// (2πħ)²/(4·x₀·p₀).
    pub area_formula_quoted: f64,
    /// π²ħ²/(4·x₀·p₀), the area implied by adjacent cosine zeros.
    pub area_formula_cosine: f64,
    pub ratio_quoted: f64,
    pub ratio_cosine: f64,
}

/// Reduce a zero scan to tile metrics against the reference scales x₀, p₀.
pub fn tile_metrics(
    scan: &ZeroScan,
    x0: f64,
    p0: f64,
    hbar: f64,
) -> Result<TileMetrics, WignerError> {
    let mut spacing = [0.0; 2];
    let mut counts = [0; 2];
    for (i, ax) in scan.axes.iter().enumerate() {
        counts[i] = ax.zeros.len();
        if ax.zeros.len() < 2 {
            return Err(WignerError::InsufficientZeros {
                axis: ax.axis.name(),
                needed: 2,
                found: ax.zeros.len(),
            });
        }
        let gaps: Vec<f64> = ax.zeros.windows(2).map(|w| w[1] - w[0]).collect();
        spacing[i] = gaps.iter().sum::<f64>() / gaps.len() as f64;
    }
    let area = spacing[0] * spacing[1];
    let denom = 4.0 * x0 * p0;
    let area_formula_quoted = (2.0 * std::f64::consts::PI * hbar).powi(2) / denom;
    let area_formula_cosine = std::f64::consts::PI.powi(2) * hbar * hbar / denom;
    Ok(TileMetrics {
        spacing,
        counts,
        area,
        area_formula_quoted,
        area_formula_cosine,
        ratio_quoted: area / area_formula_quoted,
        ratio_cosine: area / area_formula_cosine,
    })
}

/// Full pipeline: sample a slice, locate the checkerboard zeros, refine
/// them on the analytic evaluator, and reduce to tile metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct TileAnalysis {
    pub sampled: ZeroScan,
    pub refined: ZeroScan,
    pub metrics: TileMetrics,
}

pub fn measure_tiles(
    state: &BipartiteState,
    slice: &WignerSlice,
    x0: f64,
    p0: f64,
) -> Result<TileAnalysis, WignerError> {
    let sampled = find_zero_crossings(slice)?;
    let refined = refine_zero_scan(state, slice, &sampled)?;
    let metrics = tile_metrics(&refined, x0, p0, state.geometry().hbar())?;
    Ok(TileAnalysis { sampled, refined, metrics })
}
