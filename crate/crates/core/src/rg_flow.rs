//! One step of the block renormalization group and the flow it generates.
//!
//! The two degenerate ground states of a block (one in each parity sector)
//! span the effective spin-1/2. Projecting a corner spin operator onto that
//! doublet gives `σˣ → ξₓ σ′ˣ` and `σʸ → ξᵧ σ′ʸ`, and an interblock bond
//! `(J/4)[(1+γ)σˣσˣ + (1−γ)σʸσʸ]` renormalizes to
//!
//! ```text
//! tₓ = (J/4)(1+γ) ξₓ²,   tᵧ = (J/4)(1−γ) ξᵧ²
//! γ′ = (tₓ − tᵧ)/(tₓ + tᵧ),   J′ = 2(tₓ + tᵧ)
//! ```
//!
//! Only the ratio enters `γ′`, so the number of corner bonds joining two
//! neighboring blocks drops out; `J′` is reported for a single bond.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::numerics::{eigh_householder_ql, eigh_symmetric, DenseMatrix};
use crate::spin_space::{embed_imag_y, embed_pauli, parity_operator, parity_sign, PauliAxis, SpinState};
use crate::xy_model::{block_geometry, block_hamiltonian, BlockGeometry, CouplingParams, Dimension, LatticeAxis, Side};

/// Relative degeneracy tolerance, scaled by the spectral width.
pub const DEGENERACY_REL_TOL: f64 = 1e-8;

/// Allowed deviation of a projected operator from pure `σ′ˣ`/`σ′ʸ` form.
pub const STRUCTURE_TOL: f64 = 1e-9;

/// Longest trajectory accepted by [`rg_trajectory`].
pub const MAX_TRAJECTORY_STEPS: usize = 64;

const PARITY_MIXING_TOL: f64 = 1e-12;
const GAUGE_TIE_TOL: f64 = 1e-12;
const CLAMP_TOL: f64 = 1e-12;
const CACHE_CAPACITY: usize = 250_000;

/// Degenerate ground level of a block, split into parity eigenstates.
#[derive(Debug, Clone)]
pub struct GroundDoublet {
    pub dimension: Dimension,
    pub energy: f64,
    /// Even-parity ground state.
    pub phi1: SpinState,
    /// Odd-parity ground state.
    pub phi2: SpinState,
    /// `E₃ − max(E₁, E₂)`.
    pub gap_to_third: f64,
    /// `|E₁ − E₂|`.
    pub splitting: f64,
}

/// Makes the largest-magnitude amplitude positive (first index wins ties).
fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(lead) = v.iter().find(|x| x.abs() >= max - GAUGE_TIE_TOL * max) {
        if *lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn degeneracy_checks(e_even: [f64; 2], e_odd: [f64; 2], width: f64) -> Result<(f64, f64, f64)> {
    let tol = DEGENERACY_REL_TOL * width;
    let splitting = (e_even[0] - e_odd[0]).abs();
    if splitting > tol {
        return Err(Error::DegeneracyViolation {
            e1: e_even[0].min(e_odd[0]),
            e2: e_even[0].max(e_odd[0]),
        });
    }
    let top = e_even[0].max(e_odd[0]);
    let gap = e_even[1].min(e_odd[1]) - top;
    if gap <= tol {
        return Err(Error::GapViolation { gap });
    }
    Ok((0.5 * (e_even[0] + e_odd[0]), gap, splitting))
}

/// Lowest state of each parity sector of the block Hamiltonian.
///
/// The Hamiltonian only flips spins in pairs, so it is block diagonal in
/// the even/odd parity sectors and each sector is diagonalized on its own.
pub fn ground_doublet(params: CouplingParams, geometry: &BlockGeometry) -> Result<GroundDoublet> {
    let n = geometry.n_sites;
    let h = block_hamiltonian(params, geometry)?;
    let dim = h.rows();
    let (even, odd): (Vec<usize>, Vec<usize>) = (0..dim).partition(|&i| parity_sign(i) > 0.0);

    let scale = h.max_abs();
    let mut mixing = 0.0_f64;
    for &i in &even {
        for &j in &odd {
            mixing = mixing.max(h[(i, j)].abs());
        }
    }
    if mixing > PARITY_MIXING_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::ParityViolation { coupling: mixing });
    }

    let even_eig = eigh_householder_ql(&h.principal_submatrix(&even))?;
    let odd_eig = eigh_householder_ql(&h.principal_submatrix(&odd))?;
    let lowest = even_eig.eigenvalues[0].min(odd_eig.eigenvalues[0]);
    let highest = even_eig.eigenvalues[even.len() - 1].max(odd_eig.eigenvalues[odd.len() - 1]);
    let (energy, gap, splitting) = degeneracy_checks(
        [even_eig.eigenvalues[0], even_eig.eigenvalues[1]],
        [odd_eig.eigenvalues[0], odd_eig.eigenvalues[1]],
        highest - lowest,
    )?;

    let lift = |indices: &[usize], sector: Vec<f64>| -> Result<SpinState> {
        let mut full = vec![0.0; dim];
        for (&i, a) in indices.iter().zip(sector) {
            full[i] = a;
        }
        fix_sign(&mut full);
        SpinState::new(n, full)
    };
    Ok(GroundDoublet {
        dimension: geometry.dimension,
        energy,
        phi1: lift(&even, even_eig.eigenvector(0))?,
        phi2: lift(&odd, odd_eig.eigenvector(0))?,
        gap_to_third: gap,
        splitting,
    })
}

/// Ground doublet from a full-space Jacobi diagonalization, with the
/// two-dimensional ground eigenspace rotated onto parity eigenstates.
///
/// Independent of [`ground_doublet`] (different eigensolver, no sector
/// split), which makes it a cross-check for the fast path.
pub fn ground_doublet_by_rotation(params: CouplingParams, geometry: &BlockGeometry) -> Result<GroundDoublet> {
    let n = geometry.n_sites;
    let h = block_hamiltonian(params, geometry)?;
    let eig = eigh_symmetric(&h)?;
    let ev = &eig.eigenvalues;
    let tol = DEGENERACY_REL_TOL * (ev[ev.len() - 1] - ev[0]);
    if ev[1] - ev[0] > tol {
        return Err(Error::DegeneracyViolation { e1: ev[0], e2: ev[1] });
    }
    let gap = ev[2] - ev[1];
    if gap <= tol {
        return Err(Error::GapViolation { gap });
    }

    let v0 = eig.eigenvector(0);
    let v1 = eig.eigenvector(1);
    let p = parity_operator(n)?;
    let pv0 = p.mul_vec(&v0)?;
    let pv1 = p.mul_vec(&v1)?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let m = DenseMatrix::from_rows(&[[dot(&v0, &pv0), dot(&v0, &pv1)], [dot(&v1, &pv0), dot(&v1, &pv1)]])?;
    let rot = eigh_symmetric(&crate::numerics::symmetrize(&m))?;
    // A parity-invariant eigenspace has P restricted to it with eigenvalues exactly ±1.
    let deviation = (rot.eigenvalues[0] + 1.0).abs().max((rot.eigenvalues[1] - 1.0).abs());
    if deviation > STRUCTURE_TOL {
        return Err(Error::ParityViolation { coupling: deviation });
    }
    let combine = |u: Vec<f64>| -> Result<SpinState> {
        let mut full: Vec<f64> = v0.iter().zip(&v1).map(|(a, b)| u[0] * a + u[1] * b).collect();
        fix_sign(&mut full);
        SpinState::new(n, full)
    };
    Ok(GroundDoublet {
        dimension: geometry.dimension,
        energy: 0.5 * (ev[0] + ev[1]),
        phi1: combine(rot.eigenvector(1))?,
        phi2: combine(rot.eigenvector(0))?,
        gap_to_third: gap,
        splitting: ev[1] - ev[0],
    })
}

/// Corner spin operators projected onto the doublet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormalizedOperators {
    /// `π σˣ_corner π† = xi_x σ′ˣ`.
    pub xi_x: f64,
    /// `π σʸ_corner π† = xi_y σ′ʸ`.
    pub xi_y: f64,
    pub corner: usize,
}

pub fn renormalized_operators(doublet: &GroundDoublet, corner: usize) -> Result<RenormalizedOperators> {
    let geometry = block_geometry(doublet.dimension);
    let n = geometry.n_sites;
    if !geometry.is_corner(corner) {
        return Err(Error::InvalidParameter {
            field: "corner",
            reason: format!("site {corner} is not a corner of the {}D block", doublet.dimension),
        });
    }
    let projected = |op: &DenseMatrix| -> Result<[[f64; 2]; 2]> {
        let s = [&doublet.phi1, &doublet.phi2];
        let mut m = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                m[a][b] = s[a].matrix_element(op, s[b])?;
            }
        }
        Ok(m)
    };

    let mx = projected(&embed_pauli(PauliAxis::X, corner, n)?)?;
    let dev_x = mx[0][0].abs().max(mx[1][1].abs()).max((mx[0][1] - mx[1][0]).abs());
    if dev_x > STRUCTURE_TOL {
        return Err(Error::StructureViolation {
            operator: "sigma-x",
            deviation: dev_x,
        });
    }
    // σʸ = i·A with A real antisymmetric; σ′ʸ = i·[[0,-1],[1,0]], so the
    // coefficient is the (1,0) entry of the projected A.
    let my = projected(&embed_imag_y(corner, n)?)?;
    let dev_y = my[0][0].abs().max(my[1][1].abs()).max((my[0][1] + my[1][0]).abs());
    if dev_y > STRUCTURE_TOL {
        return Err(Error::StructureViolation {
            operator: "sigma-y",
            deviation: dev_y,
        });
    }
    Ok(RenormalizedOperators {
        xi_x: 0.5 * (mx[0][1] + mx[1][0]),
        xi_y: 0.5 * (my[1][0] - my[0][1]),
        corner,
    })
}

type CacheKey = (Dimension, u64);

fn doublet_cache() -> &'static RwLock<HashMap<CacheKey, Arc<GroundDoublet>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<GroundDoublet>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Ground doublet of the canonical block at `J = 1`, memoized per `(dimension, γ)`.
///
/// The eigenvectors do not depend on `J` (it only scales `H_B`), so every
/// quantity built from them is shared across couplings. The key is the exact
/// bit pattern of `γ`: a cached value is always the one that would have been
/// computed, regardless of which caller or thread filled the slot.
pub fn cached_doublet(dimension: Dimension, gamma: f64) -> Result<Arc<GroundDoublet>> {
    let key = (dimension, gamma.to_bits());
    if let Some(hit) = doublet_cache().read().expect("cache lock").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let params = CouplingParams::new(1.0, gamma)?;
    let doublet = Arc::new(ground_doublet(params, &block_geometry(dimension))?);
    let mut cache = doublet_cache().write().expect("cache lock");
    if cache.len() >= CACHE_CAPACITY {
        cache.clear();
    }
    cache.insert(key, Arc::clone(&doublet));
    Ok(doublet)
}

/// Squared projection coefficients `(ξₓ², ξᵧ²)` on the representative bond
/// along x, taken at the `(x,+)` corner.
pub fn renormalization_factors(dimension: Dimension, gamma: f64) -> Result<(f64, f64)> {
    let doublet = cached_doublet(dimension, gamma)?;
    let corner = block_geometry(dimension)
        .corner(LatticeAxis::X, Side::Plus)
        .expect("every block has an (x,+) corner")
        .site;
    let ops = renormalized_operators(&doublet, corner)?;
    Ok((ops.xi_x * ops.xi_x, ops.xi_y * ops.xi_y))
}

/// Renormalized couplings from given projection coefficients.
pub fn renormalize(params: CouplingParams, xi_x_sq: f64, xi_y_sq: f64) -> Result<CouplingParams> {
    // At γ = 0 a spin rotation about z swaps x and y and leaves the block
    // invariant, so ξₓ² = ξᵧ² exactly; equalize away the rounding difference.
    let (xi_x_sq, xi_y_sq) = if params.gamma() == 0.0 {
        let mean = 0.5 * (xi_x_sq + xi_y_sq);
        (mean, mean)
    } else {
        (xi_x_sq, xi_y_sq)
    };
    let quarter = params.j() / 4.0;
    let tx = quarter * (1.0 + params.gamma()) * xi_x_sq;
    let ty = quarter * (1.0 - params.gamma()) * xi_y_sq;
    let total = tx + ty;
    if !(total > 1e-300) {
        return Err(Error::DegenerateCoupling(total));
    }
    let mut gamma = (tx - ty) / total;
    if gamma.abs() > 1.0 && gamma.abs() - 1.0 <= CLAMP_TOL {
        gamma = gamma.clamp(-1.0, 1.0);
    }
    CouplingParams::new(2.0 * total, gamma)
}

/// One RG step `(J, γ) → (J′, γ′)`.
pub fn rg_map(params: CouplingParams, dimension: Dimension) -> Result<CouplingParams> {
    let (xx, yy) = renormalization_factors(dimension, params.gamma())?;
    renormalize(params, xx, yy)
}

/// `γ′(γ)` alone; independent of `J`.
pub fn gamma_map(dimension: Dimension, gamma: f64) -> Result<f64> {
    Ok(rg_map(CouplingParams::new(1.0, gamma)?, dimension)?.gamma())
}

/// `γ` after `steps` applications of the RG map.
pub fn iterate_gamma(dimension: Dimension, gamma: f64, steps: usize) -> Result<f64> {
    (0..steps).try_fold(gamma, |g, _| gamma_map(dimension, g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RgTrajectory {
    pub dimension: Dimension,
    /// `steps[0]` is the initial point, `steps[k]` the k-th iterate.
    pub steps: Vec<CouplingParams>,
}

pub fn rg_trajectory(initial: CouplingParams, dimension: Dimension, n_steps: usize) -> Result<RgTrajectory> {
    if n_steps > MAX_TRAJECTORY_STEPS {
        return Err(Error::InvalidParameter {
            field: "steps",
            reason: format!("at most {MAX_TRAJECTORY_STEPS} RG steps, got {n_steps}"),
        });
    }
    let mut steps = Vec::with_capacity(n_steps + 1);
    steps.push(initial);
    for _ in 0..n_steps {
        let next = rg_map(*steps.last().expect("non-empty"), dimension)?;
        steps.push(next);
    }
    Ok(RgTrajectory { dimension, steps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub gamma: f64,
    pub stability: Stability,
    /// `dγ′/dγ` at the root.
    pub slope: f64,
}

const SLOPE_STEP: f64 = 1e-6;
const ROOT_VALUE_TOL: f64 = 1e-12;
const ROOT_BRACKET_TOL: f64 = 1e-12;

/// `dγ′/dγ` by finite differences, one-sided at the ends of `[−1, 1]`.
pub fn gamma_map_slope(dimension: Dimension, gamma: f64) -> Result<f64> {
    let h = SLOPE_STEP;
    let lo = (gamma - h).max(-1.0);
    let hi = (gamma + h).min(1.0);
    Ok((gamma_map(dimension, hi)? - gamma_map(dimension, lo)?) / (hi - lo))
}

/// Roots of `γ′(γ) − γ` on `[−1, 1]`, classified by `|dγ′/dγ|`.
pub fn fixed_points(dimension: Dimension, grid: usize) -> Result<Vec<FixedPoint>> {
    if grid < 100 {
        return Err(Error::TooFewPoints { needed: 100, got: grid });
    }
    let gammas = uniform_grid(grid);
    let residual = |g: f64| -> Result<f64> { Ok(gamma_map(dimension, g)? - g) };
    let values = gammas.iter().map(|&g| residual(g)).collect::<Result<Vec<_>>>()?;

    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&last| (r - last).abs() > 1e-9) {
            roots.push(r);
        }
    };
    for i in 0..grid {
        if values[i].abs() <= ROOT_VALUE_TOL {
            push(gammas[i], &mut roots);
            continue;
        }
        if i + 1 < grid && values[i + 1].abs() > ROOT_VALUE_TOL && values[i].signum() != values[i + 1].signum() {
            let (mut lo, mut hi) = (gammas[i], gammas[i + 1]);
            let mut f_lo = values[i];
            while hi - lo > ROOT_BRACKET_TOL {
                let mid = 0.5 * (lo + hi);
                let f_mid = residual(mid)?;
                if f_mid == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if f_mid.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            push(0.5 * (lo + hi), &mut roots);
        }
    }

    roots
        .into_iter()
        .map(|gamma| {
            let slope = gamma_map_slope(dimension, gamma)?;
            let stability = if slope.abs() < 1.0 - 1e-6 {
                Stability::Stable
            } else if slope.abs() > 1.0 + 1e-6 {
                Stability::Unstable
            } else {
                Stability::Marginal
            };
            Ok(FixedPoint { gamma, stability, slope })
        })
        .collect()
}

/// `n` uniformly spaced points on `[−1, 1]`, symmetric about zero.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| {
                    // Build from the nearer end so that g[i] == -g[n-1-i] exactly.
                    let k = i.min(n - 1 - i) as f64;
                    let mag = 1.0 - 2.0 * k / last;
                    if 2 * i < n - 1 {
                        -mag
                    } else if 2 * i == n - 1 {
                        0.0
                    } else {
                        mag
                    }
                })
                .collect()
        }
    }
}
