//! Critical scaling of the concurrence derivative.
//!
//! Peak positions `γ_m` of `|dC/dγ|` approach `γ_c = 0` as
//! `γ_c − γ_m = N^(−θ)`, and the peak heights grow as a power of the
//! system size `N = n_B^k` after `k` RG steps.

use crate::entanglement::{concurrence_at, concurrence_curve, ConcurrenceCurve, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::xy_model::Dimension;

/// Largest finite-difference step used for pointwise derivatives.
pub const DERIVATIVE_STEP: f64 = 1e-6;
/// Pointwise steps never exceed this fraction of the distance to `γ = 0`.
pub const RELATIVE_DERIVATIVE_STEP: f64 = 1e-3;
/// Golden-section stopping width.
pub const REFINE_TOL: f64 = 1e-8;
/// Smallest `|γ|` probed when the peak sits next to the critical point.
pub const EDGE_FLOOR: f64 = 1e-10;
/// Relative margin within which the value at [`EDGE_FLOOR`] counts as the maximum.
pub const EDGE_REL_TOL: f64 = 1e-3;
/// Log-spaced probes inside the bracketing grid interval.
const SCAN_POINTS: usize = 64;
/// The critical anisotropy.
pub const GAMMA_C: f64 = 0.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeCurve {
    pub dimension: Dimension,
    pub rg_step: usize,
    pub gamma_grid: Vec<f64>,
    pub abs_derivative: Vec<f64>,
}

/// `|dC/dγ|` on the curve's grid: central differences inside, one-sided at the ends.
pub fn derivative_curve(curve: &ConcurrenceCurve) -> Result<DerivativeCurve> {
    let g = &curve.gamma_grid;
    let c = &curve.values;
    let n = g.len();
    if n < 5 || c.len() != n {
        return Err(Error::TooFewPoints { needed: 5, got: n.min(c.len()) });
    }
    let abs_derivative = (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            ((c[b] - c[a]) / (g[b] - g[a])).abs()
        })
        .collect();
    Ok(DerivativeCurve {
        dimension: curve.dimension,
        rg_step: curve.rg_step,
        gamma_grid: g.clone(),
        abs_derivative,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakLocation {
    pub gamma_m: f64,
    pub max_abs_derivative: f64,
    /// Grid interval that bracketed the peak, ordered by `|γ|`.
    pub bracket: (f64, f64),
    /// The derivative at the smallest probed `|γ|` already matches the
    /// maximum (within [`EDGE_REL_TOL`]): `|dC/dγ|` peaks at the critical
    /// point itself and `γ_m` cannot be resolved from it.
    pub at_critical_edge: bool,
}

/// `|dC/dγ|` at `gamma` after `rg_step` steps by a central difference.
///
/// The step is `min(1e-6, 1e-3·|γ|)` so that the stencil never straddles
/// `γ = 0` and stays narrow relative to peaks close to it.
pub fn abs_derivative_at(dimension: Dimension, rg_step: usize, gamma: f64) -> Result<f64> {
    let x = gamma.abs();
    let h = if x > 0.0 {
        DERIVATIVE_STEP.min(RELATIVE_DERIVATIVE_STEP * x)
    } else {
        DERIVATIVE_STEP
    };
    let (lo, hi) = ((gamma - h).max(-1.0), (gamma + h).min(1.0));
    let c_lo = concurrence_at(dimension, lo, rg_step)?;
    let c_hi = concurrence_at(dimension, hi, rg_step)?;
    Ok(((c_hi - c_lo) / (hi - lo)).abs())
}

/// Position and height of the `|dC/dγ|` maximum on one side of `γ = 0`.
///
/// The grid argmax fixes a bracketing interval. Inside it the derivative is
/// recomputed pointwise, first on a log-spaced scan (peaks near the
/// critical point are far narrower than the grid spacing), then by
/// golden-section search down to [`REFINE_TOL`].
pub fn locate_max(curve: &DerivativeCurve, side: Side) -> Result<PeakLocation> {
    let s = side.sign();
    let on_side: Vec<usize> = (0..curve.gamma_grid.len())
        .filter(|&i| s * curve.gamma_grid[i] > 0.0)
        .collect();
    let best = on_side
        .iter()
        .copied()
        .max_by(|&a, &b| curve.abs_derivative[a].total_cmp(&curve.abs_derivative[b]))
        .ok_or(Error::TooFewPoints { needed: 1, got: 0 })?;
    if !(curve.abs_derivative[best] > 0.0) {
        return Err(Error::ZeroCurve);
    }

    let x_at = |i: usize| (s * curve.gamma_grid[i]).max(0.0);
    let n = curve.gamma_grid.len();
    let (ia, ib) = (best.saturating_sub(1), (best + 1).min(n - 1));
    let (mut x_lo, mut x_hi) = (x_at(ia), x_at(ib));
    if x_lo > x_hi {
        std::mem::swap(&mut x_lo, &mut x_hi);
    }
    let bracket = (s * x_lo, s * x_hi);

    let f = |x: f64| abs_derivative_at(curve.dimension, curve.rg_step, s * x);

    let scan_lo = x_lo.max(EDGE_FLOOR);
    let ratio = (x_hi / scan_lo).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let mut xs = Vec::with_capacity(SCAN_POINTS);
    let mut x = scan_lo;
    for k in 0..SCAN_POINTS {
        xs.push(if k == SCAN_POINTS - 1 { x_hi } else { x });
        x *= ratio;
    }
    let values = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let j = (0..SCAN_POINTS)
        .max_by(|&a, &b| values[a].total_cmp(&values[b]).then(b.cmp(&a)))
        .expect("scan is nonempty");

    if x_lo == 0.0 && values[0] >= (1.0 - EDGE_REL_TOL) * values[j] {
        return Ok(PeakLocation {
            gamma_m: s * xs[0],
            max_abs_derivative: values[0],
            bracket,
            at_critical_edge: true,
        });
    }

    let (mut a, mut b) = (xs[j.saturating_sub(1)], xs[(j + 1).min(SCAN_POINTS - 1)]);
    let tol = REFINE_TOL.min(1e-6 * a.max(EDGE_FLOOR));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (x_m, f_m) = [(c, fc), (d, fd), (xs[j], values[j])]
        .into_iter()
        .fold((0.0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    Ok(PeakLocation {
        gamma_m: s * x_m,
        max_abs_derivative: f_m,
        bracket,
        at_critical_edge: false,
    })
}

/// Number of original sites represented after `rg_step` steps, `n_B^k`.
pub fn system_size(dimension: Dimension, rg_step: usize) -> Result<u64> {
    if rg_step == 0 {
        return Err(Error::InvalidParameter {
            field: "rg_step",
            reason: "step 0 has no scaling point".into(),
        });
    }
    let exp = u32::try_from(rg_step).map_err(|_| Error::InvalidParameter {
        field: "rg_step",
        reason: format!("{rg_step} is too large"),
    })?;
    (dimension.block_size() as u64)
        .checked_pow(exp)
        .ok_or_else(|| Error::InvalidParameter {
            field: "rg_step",
            reason: format!("n_B^{rg_step} overflows"),
        })
}

/// Default RG steps for the scaling fits.
pub fn default_steps(dimension: Dimension) -> Vec<usize> {
    match dimension {
        Dimension::One => (1..=6).collect(),
        Dimension::Two => (1..=4).collect(),
        Dimension::Three => (1..=3).collect(),
    }
}

/// Ordinary least-squares line through `(x, y)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: points.len() });
    }
    if let Some(p) = points.iter().find(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "points",
            reason: format!("non-finite point {p:?}"),
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            field: "points",
            reason: "all abscissae coincide".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(ScalingFit {
        points: points.to_vec(),
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub theta: f64,
    pub gamma_c: f64,
    pub fit: ScalingFit,
}

/// One peak per RG step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub step: usize,
    pub n: u64,
    pub gamma_m: f64,
    pub max_abs_derivative: f64,
    pub at_critical_edge: bool,
}

/// Peaks on the negative side (so that `γ_c − γ_m > 0`) for each step,
/// each from a concurrence curve on `grid` points.
pub fn scaling_points(dimension: Dimension, steps: &[usize], grid: usize) -> Result<Vec<ScalingPoint>> {
    if steps.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: steps.len() });
    }
    steps
        .iter()
        .map(|&step| {
            let n = system_size(dimension, step)?;
            let curve = concurrence_curve(dimension, step, grid)?;
            let peak = locate_max(&derivative_curve(&curve)?, Side::Negative)?;
            Ok(ScalingPoint {
                step,
                n,
                gamma_m: peak.gamma_m,
                max_abs_derivative: peak.max_abs_derivative,
                at_critical_edge: peak.at_critical_edge,
            })
        })
        .collect()
}

/// `ln|dC/dγ|_max` against `ln N`.
pub fn derivative_fit(points: &[ScalingPoint]) -> Result<ScalingFit> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((p.n as f64).ln(), p.max_abs_derivative.ln()))
        .collect();
    fit_line(&xy)
}

/// `θ = −slope` of `ln(γ_c − γ_m)` against `ln N`.
pub fn exponent_fit(points: &[ScalingPoint]) -> Result<ExponentEstimate> {
    if let Some(p) = points
        .iter()
        .find(|p| p.at_critical_edge || GAMMA_C - p.gamma_m < 1e-12)
    {
        return Err(Error::Underflow {
            step: p.step,
            gamma_m: p.gamma_m,
        });
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((p.n as f64).ln(), (GAMMA_C - p.gamma_m).ln()))
        .collect();
    let fit = fit_line(&xy)?;
    Ok(ExponentEstimate {
        theta: -fit.slope,
        gamma_c: GAMMA_C,
        fit,
    })
}

/// Entanglement exponent from the default-size curves at `steps`.
pub fn entanglement_exponent(dimension: Dimension, steps: &[usize]) -> Result<ExponentEstimate> {
    exponent_fit(&scaling_points(dimension, steps, DEFAULT_GRID)?)
}

/// Peak-height scaling from the default-size curves at `steps`.
pub fn derivative_scaling(dimension: Dimension, steps: &[usize]) -> Result<ScalingFit> {
    derivative_fit(&scaling_points(dimension, steps, DEFAULT_GRID)?)
}
