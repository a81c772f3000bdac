use std::path::PathBuf;

use anyhow::Context;
use qrg_core::analysis::{
    default_steps, derivative_curve, derivative_fit, exponent_fit, scaling_points, DERIVATIVE_STEP,
    GAMMA_C, RELATIVE_DERIVATIVE_STEP,
};
use qrg_core::entanglement::{concurrence_curve, concurrence_j_sweep};
use qrg_core::rg_flow::{fixed_points, gamma_map, ground_doublet, rg_trajectory, uniform_grid};
use qrg_core::spin_space::basis_label;
use qrg_core::xy_model::{block_geometry, CouplingParams, Dimension};
use serde::Serialize;

use crate::config::Format;
use crate::output::{to_json, Cell, Table};

/// Rendered command output plus an error to report after it is written.
pub struct Rendered {
    pub text: String,
    pub error: Option<anyhow::Error>,
}

impl From<String> for Rendered {
    fn from(text: String) -> Self {
        Self { text, error: None }
    }
}

fn render_table(table: &Table, format: Format) -> anyhow::Result<Rendered> {
    Ok(match format {
        Format::Csv => table.to_csv().into(),
        Format::Json => to_json(&table.to_json_value())?.into(),
    })
}

pub fn flow(dim: Dimension, j: f64, gamma0: f64, steps: usize, format: Format) -> anyhow::Result<Rendered> {
    let params = CouplingParams::new(j, gamma0)?;
    let trajectory = rg_trajectory(params, dim, steps)?;
    let mut table = Table::new(vec!["dim", "step", "gamma", "j"]);
    for (k, p) in trajectory.steps.iter().enumerate() {
        table.push(vec![
            Cell::Int(dim.value().into()),
            Cell::Int(k as u64),
            Cell::Float(p.gamma()),
            Cell::Float(p.j()),
        ]);
    }
    render_table(&table, format)
}

pub fn concurrence(dim: Dimension, steps: &[usize], grid: usize, format: Format) -> anyhow::Result<Rendered> {
    let mut table = Table::new(vec!["dim", "step", "gamma", "concurrence", "abs_derivative"]);
    for &step in steps {
        let curve = concurrence_curve(dim, step, grid)?;
        let deriv = derivative_curve(&curve)?;
        for ((g, c), d) in curve.gamma_grid.iter().zip(&curve.values).zip(&deriv.abs_derivative) {
            table.push(vec![
                Cell::Int(dim.value().into()),
                Cell::Int(step as u64),
                Cell::Float(*g),
                Cell::Float(*c),
                Cell::Float(*d),
            ]);
        }
    }
    render_table(&table, format)
}

#[derive(Serialize)]
struct ScalingJson {
    dimension: u32,
    points: Vec<PointJson>,
    derivative_fit: FitJson,
    exponent_fit: Option<ExponentJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent_error: Option<String>,
    conventions: Conventions,
}

#[derive(Serialize)]
struct PointJson {
    step: usize,
    #[serde(rename = "N")]
    n: u64,
    gamma_m: f64,
    max_abs_derivative: f64,
    at_critical_edge: bool,
}

#[derive(Serialize)]
struct FitJson {
    slope: f64,
    intercept: f64,
    r2: f64,
}

#[derive(Serialize)]
struct ExponentJson {
    theta: f64,
    intercept: f64,
    r2: f64,
}

#[derive(Serialize)]
struct Conventions {
    #[serde(rename = "N_definition")]
    n_definition: String,
    step_range: Vec<usize>,
    gamma_c: f64,
    peak_side: &'static str,
    fit: &'static str,
    grid: usize,
    derivative_step: String,
}

pub fn scaling(dim: Dimension, steps: Option<Vec<usize>>, grid: usize, format: Format) -> anyhow::Result<Rendered> {
    let steps = steps.unwrap_or_else(|| default_steps(dim));
    let points = scaling_points(dim, &steps, grid)?;
    let dfit = derivative_fit(&points)?;
    let exponent = exponent_fit(&points);

    if format == Format::Csv {
        let mut table = Table::new(vec!["step", "N", "gamma_m", "max_abs_derivative", "at_critical_edge"]);
        for p in &points {
            table.push(vec![
                Cell::Int(p.step as u64),
                Cell::Int(p.n),
                Cell::Float(p.gamma_m),
                Cell::Float(p.max_abs_derivative),
                Cell::Text(p.at_critical_edge.to_string()),
            ]);
        }
        let mut rendered = render_table(&table, format)?;
        rendered.error = exponent.err().map(Into::into);
        return Ok(rendered);
    }

    let (exponent_fit, exponent_error) = match &exponent {
        Ok(e) => (
            Some(ExponentJson {
                theta: e.theta,
                intercept: e.fit.intercept,
                r2: e.fit.r_squared,
            }),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    };
    let report = ScalingJson {
        dimension: dim.value(),
        points: points
            .iter()
            .map(|p| PointJson {
                step: p.step,
                n: p.n,
                gamma_m: p.gamma_m,
                max_abs_derivative: p.max_abs_derivative,
                at_critical_edge: p.at_critical_edge,
            })
            .collect(),
        derivative_fit: FitJson {
            slope: dfit.slope,
            intercept: dfit.intercept,
            r2: dfit.r_squared,
        },
        exponent_fit,
        exponent_error,
        conventions: Conventions {
            n_definition: format!("N = n_B^k with n_B = {} and k the RG step", dim.block_size()),
            step_range: steps,
            gamma_c: GAMMA_C,
            peak_side: "negative",
            fit: "ordinary least squares on (ln N, ln y)",
            grid,
            derivative_step: format!("min({DERIVATIVE_STEP:e}, {RELATIVE_DERIVATIVE_STEP:e}*|gamma|)"),
        },
    };
    Ok(Rendered {
        text: to_json(&report)?,
        error: exponent.err().map(Into::into),
    })
}

pub fn groundstate(dim: Dimension, j: f64, gamma: f64, format: Format) -> anyhow::Result<Rendered> {
    let geometry = block_geometry(dim);
    let doublet = ground_doublet(CouplingParams::new(j, gamma)?, &geometry)?;
    let n = geometry.n_sites;
    let mut table = Table::new(vec!["basis_index", "basis_label", "phi1", "phi2"]);
    for (i, (a, b)) in doublet
        .phi1
        .amplitudes()
        .iter()
        .zip(doublet.phi2.amplitudes())
        .enumerate()
    {
        table.push(vec![
            Cell::Int(i as u64),
            Cell::Text(basis_label(i, n)),
            Cell::Fixed(*a),
            Cell::Fixed(*b),
        ]);
    }
    render_table(&table, format)
}

#[derive(Serialize)]
struct RootJson {
    gamma: f64,
    stability: &'static str,
    slope_at_root: f64,
}

pub fn fixed_points_cmd(
    dim: Dimension,
    grid: usize,
    curve_out: Option<&PathBuf>,
    format: Format,
) -> anyhow::Result<Rendered> {
    let roots = fixed_points(dim, grid)?;
    if let Some(path) = curve_out {
        let mut curve = Table::new(vec!["gamma", "gamma_prime"]);
        for g in uniform_grid(grid) {
            curve.push(vec![Cell::Float(g), Cell::Float(gamma_map(dim, g)?)]);
        }
        std::fs::write(path, curve.to_csv())
            .with_context(|| format!("writing curve to {}", path.display()))?;
    }
    match format {
        Format::Json => {
            let list: Vec<RootJson> = roots
                .iter()
                .map(|r| RootJson {
                    gamma: r.gamma,
                    stability: r.stability.as_str(),
                    slope_at_root: r.slope,
                })
                .collect();
            Ok(to_json(&list)?.into())
        }
        Format::Csv => {
            let mut table = Table::new(vec!["gamma", "stability", "slope_at_root"]);
            for r in &roots {
                table.push(vec![
                    Cell::Float(r.gamma),
                    Cell::Text(r.stability.as_str().into()),
                    Cell::Float(r.slope),
                ]);
            }
            render_table(&table, format)
        }
    }
}

#[derive(Serialize)]
struct JSweepJson {
    rows: serde_json::Value,
    max_j_spread: f64,
}

pub fn jsweep(
    dim: Dimension,
    gamma_points: usize,
    j_values: &[f64],
    step: usize,
    format: Format,
) -> anyhow::Result<Rendered> {
    let gammas = uniform_grid(gamma_points);
    let grid = concurrence_j_sweep(dim, &gammas, j_values, step)?;
    let mut table = Table::new(vec!["gamma", "j", "concurrence"]);
    let mut spread: f64 = 0.0;
    for (g, row) in gammas.iter().zip(&grid) {
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        spread = spread.max(hi - lo);
        for (j, c) in j_values.iter().zip(row) {
            table.push(vec![Cell::Float(*g), Cell::Float(*j), Cell::Float(*c)]);
        }
    }
    Ok(match format {
        Format::Csv => {
            let mut text = table.to_csv();
            text.push_str(&format!("# max_j_spread={}\n", crate::output::fmt_g(spread)));
            text.into()
        }
        Format::Json => to_json(&JSweepJson {
            rows: table.to_json_value(),
            max_j_spread: spread,
        })?
        .into(),
    })
}
