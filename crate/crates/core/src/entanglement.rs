//! Two-spin entanglement of the block ground state.
//!
//! The pair state is the partial trace of `|φ₁⟩⟨φ₁|` onto two corner spins
//! and its entanglement is the Wootters concurrence
//! `C = max(0, √λ₄ − √λ₃ − √λ₂ − √λ₁)` with `λ` the eigenvalues of `ρρ̃`,
//! `ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{eigh_symmetric, sqrt_psd, symmetrize, DenseMatrix};
use crate::rg_flow::{cached_doublet, ground_doublet, iterate_gamma, rg_trajectory, uniform_grid};
use crate::spin_space::{two_site_term, PauliAxis, SpinState};
use crate::xy_model::{block_geometry, BlockGeometry, CouplingParams, Dimension};

const TRACE_TOL: f64 = 1e-10;

/// Default number of γ samples on `[−1, 1]` for sweeps (odd, so γ = 0 is included).
pub const DEFAULT_GRID: usize = 2001;

/// `|ψ⟩⟨ψ|` of a normalized state.
pub fn density_matrix(state: &SpinState) -> Result<DenseMatrix> {
    state.check_normalized()?;
    Ok(DenseMatrix::outer(state.amplitudes()))
}

/// Two-spin reduced state, legs ordered as `pair`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    rho: DenseMatrix,
    pair: (usize, usize),
}

impl ReducedDensityMatrix {
    /// Validates shape, symmetry and unit trace.
    pub fn new(rho: DenseMatrix, pair: (usize, usize)) -> Result<Self> {
        if rho.rows() != 4 || rho.cols() != 4 {
            return Err(Error::ShapeMismatch {
                expected: "4x4".into(),
                got: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        rho.check_symmetric()?;
        check_trace(&rho)?;
        Ok(Self { rho, pair })
    }

    pub fn rho(&self) -> &DenseMatrix {
        &self.rho
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }
}

fn check_trace(rho: &DenseMatrix) -> Result<()> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidParameter {
            field: "rho",
            reason: format!("trace must be 1, got {tr}"),
        });
    }
    Ok(())
}

/// Traces out every spin except `keep.0` and `keep.1`.
pub fn partial_trace_pair(rho: &DenseMatrix, keep: (usize, usize)) -> Result<ReducedDensityMatrix> {
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    let dim = rho.rows();
    if !dim.is_power_of_two() || dim < 4 {
        return Err(Error::ShapeMismatch {
            expected: "2^n x 2^n with n >= 2".into(),
            got: format!("{dim}x{dim}"),
        });
    }
    let n = dim.trailing_zeros() as usize;
    let (i, j) = keep;
    for site in [i, j] {
        if site >= n {
            return Err(Error::SiteOutOfRange { site, n_spins: n });
        }
    }
    if i == j {
        return Err(Error::CoincidentSites { site: i });
    }
    check_trace(rho)?;

    let bit = |site: usize| 1usize << (n - 1 - site);
    let (bi, bj) = (bit(i), bit(j));
    let offsets = [0, bj, bi, bi | bj];
    // Indices with both kept bits cleared, i.e. every configuration of the traced spins.
    let rest: Vec<usize> = (0..dim).filter(|x| x & (bi | bj) == 0).collect();

    let mut out = DenseMatrix::zeros(4, 4);
    for (a, &oa) in offsets.iter().enumerate() {
        for (b, &ob) in offsets.iter().enumerate() {
            out[(a, b)] = rest.iter().map(|&r| rho[(r | oa, r | ob)]).sum();
        }
    }
    ReducedDensityMatrix::new(out, keep)
}

/// Wootters concurrence of a two-spin state.
///
/// `ρ` is real, so `ρ̃ = Y ρ Y` with `Y = σʸ⊗σʸ` (a real matrix). The
/// eigenvalues of `ρρ̃` equal those of `√ρ ρ̃ √ρ = (√ρ Y √ρ)²`, so the
/// `√λ` are the absolute eigenvalues of the symmetric matrix `√ρ Y √ρ`.
/// Taking them this way avoids a second square root of rounding-level
/// eigenvalues.
pub fn wootters_concurrence(rdm: &ReducedDensityMatrix) -> Result<f64> {
    let r = spin_flip_roots(rdm)?;
    Ok((r[0] - r[1] - r[2] - r[3]).max(0.0))
}

/// Spin-flip eigenvalues `λ` of `√ρ ρ̃ √ρ` in descending order.
pub fn spin_flip_eigenvalues(rdm: &ReducedDensityMatrix) -> Result<[f64; 4]> {
    Ok(spin_flip_roots(rdm)?.map(|r| r * r))
}

fn spin_flip_roots(rdm: &ReducedDensityMatrix) -> Result<[f64; 4]> {
    let sqrt_rho = sqrt_psd(rdm.rho())?;
    let yy = two_site_term(PauliAxis::Y, 0, 1, 2)?;
    let m = sqrt_rho.matmul(&yy)?.matmul(&sqrt_rho)?;
    let eig = eigh_symmetric(&symmetrize(&m))?;
    let mut roots = [0.0; 4];
    for (r, mu) in roots.iter_mut().zip(&eig.eigenvalues) {
        *r = mu.abs();
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConcurrence {
    pub pair: (usize, usize),
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockConcurrence {
    pub per_pair: Vec<PairConcurrence>,
    /// `(∏ C)^(1/#pairs)`, zero as soon as one pair has `C = 0`.
    pub geometric_mean: f64,
}

/// Geometric mean with the convention that any zero gives zero.
pub fn geometric_mean(values: &[f64]) -> f64 {
    if values.is_empty() || values.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
}

/// Concurrence of every pair of corner spins in `state`.
pub fn corner_concurrences(state: &SpinState, geometry: &BlockGeometry) -> Result<BlockConcurrence> {
    let rho = density_matrix(state)?;
    let per_pair = geometry
        .corner_pairs()
        .into_iter()
        .map(|pair| {
            let rdm = partial_trace_pair(&rho, pair)?;
            Ok(PairConcurrence {
                pair,
                value: wootters_concurrence(&rdm)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = per_pair.iter().map(|p| p.value).collect();
    Ok(BlockConcurrence {
        geometric_mean: geometric_mean(&values),
        per_pair,
    })
}

/// Corner-pair concurrences of the even ground state at `params`.
///
/// The doublet is solved at the given `J` (no cache), so comparing
/// different couplings is a genuine check of `J`-independence.
pub fn block_concurrence(params: CouplingParams, dimension: Dimension) -> Result<BlockConcurrence> {
    let geometry = block_geometry(dimension);
    let doublet = ground_doublet(params, &geometry)?;
    corner_concurrences(&doublet.phi1, &geometry)
}

/// Geometric-mean concurrence after `rg_step` RG steps from `gamma0`,
/// using the memoized `J = 1` doublets.
pub fn concurrence_at(dimension: Dimension, gamma0: f64, rg_step: usize) -> Result<f64> {
    let gamma = iterate_gamma(dimension, gamma0, rg_step)?;
    let doublet = cached_doublet(dimension, gamma)?;
    Ok(corner_concurrences(&doublet.phi1, &block_geometry(dimension))?.geometric_mean)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceCurve {
    pub dimension: Dimension,
    pub rg_step: usize,
    pub gamma_grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// `C(γ₀)` on a uniform odd grid over `[−1, 1]`, evaluated after `rg_step`
/// RG steps. Grid points are evaluated in parallel on the current rayon
/// pool; results are gathered in grid order.
pub fn concurrence_curve(dimension: Dimension, rg_step: usize, grid: usize) -> Result<ConcurrenceCurve> {
    if grid < 3 || grid.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            field: "grid",
            reason: format!("must be odd and >= 3, got {grid}"),
        });
    }
    let gamma_grid = uniform_grid(grid);
    let values = gamma_grid
        .par_iter()
        .map(|&g| concurrence_at(dimension, g, rg_step))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConcurrenceCurve {
        dimension,
        rg_step,
        gamma_grid,
        values,
    })
}

/// `C(γ, J)` after `rg_step` steps, one row per γ. Each entry follows the
/// full `(J, γ)` trajectory and solves the final block at its own `J`.
pub fn concurrence_j_sweep(
    dimension: Dimension,
    gamma_grid: &[f64],
    j_grid: &[f64],
    rg_step: usize,
) -> Result<Vec<Vec<f64>>> {
    if let Some(&bad) = j_grid.iter().find(|&&j| !(j > 0.0)) {
        return Err(Error::InvalidParameter {
            field: "j",
            reason: format!("must be > 0, got {bad}"),
        });
    }
    gamma_grid
        .par_iter()
        .map(|&gamma| {
            j_grid
                .iter()
                .map(|&j| {
                    let start = CouplingParams::new(j, gamma)?;
                    let end = *rg_trajectory(start, dimension, rg_step)?
                        .steps
                        .last()
                        .expect("trajectory includes the start");
                    Ok(block_concurrence(end, dimension)?.geometric_mean)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}
