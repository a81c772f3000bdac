//! Kadanoff block geometry and the XY block Hamiltonian.
//!
//! A block in `d` dimensions is a central spin bonded to `2d` corner spins,
//! one on each side of every lattice axis. Site numbering is fixed:
//!
//! | d | center | corners (x−, x+, y−, y+, z−, z+) |
//! |---|--------|-----------------------------------|
//! | 1 | 1      | 0, 2                              |
//! | 2 | 0      | 1, 2, 3, 4                        |
//! | 3 | 0      | 1, 2, 3, 4, 5, 6                  |
//!
//! The block Hamiltonian is
//! `H_B = (J/4) Σ_bonds c_axis [(1+γ) σˣ_c σˣ_a + (1−γ) σʸ_c σʸ_a]`.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::spin_space::{two_site_term, PauliAxis};

/// Spatial dimension of the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    One,
    Two,
    Three,
}

impl Dimension {
    pub const ALL: [Dimension; 3] = [Dimension::One, Dimension::Two, Dimension::Three];

    pub fn value(self) -> u32 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    /// Spins per block, `2d + 1`.
    pub fn block_size(self) -> usize {
        2 * self.value() as usize + 1
    }

    fn index(self) -> usize {
        self.value() as usize - 1
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(d: u32) -> Result<Self> {
        match d {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Exchange strength `J > 0` and anisotropy `γ ∈ [−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    j: f64,
    gamma: f64,
}

impl CouplingParams {
    pub fn new(j: f64, gamma: f64) -> Result<Self> {
        if !(j.is_finite() && j > 0.0) {
            return Err(Error::InvalidParameter {
                field: "j",
                reason: format!("must be finite and > 0, got {j}"),
            });
        }
        if !(gamma.is_finite() && gamma.abs() <= 1.0) {
            return Err(Error::InvalidParameter {
                field: "gamma",
                reason: format!("must lie in [-1, 1], got {gamma}"),
            });
        }
        Ok(Self { j, gamma })
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeAxis {
    X,
    Y,
    Z,
}

impl LatticeAxis {
    pub const ALL: [LatticeAxis; 3] = [LatticeAxis::X, LatticeAxis::Y, LatticeAxis::Z];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Corner {
    pub site: usize,
    pub axis: LatticeAxis,
    pub side: Side,
}

/// Bond between the block center and one corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntraBond {
    pub center: usize,
    pub corner: usize,
    pub axis: LatticeAxis,
}

/// Bond between a corner of one block and the facing corner of its neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterblockBond {
    /// The `(axis, +)` corner of the left block.
    pub from: Corner,
    /// The `(axis, −)` corner of the right block.
    pub to: Corner,
    pub axis: LatticeAxis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockGeometry {
    pub dimension: Dimension,
    pub n_sites: usize,
    pub center: usize,
    pub corners: Vec<Corner>,
    pub intra_bonds: Vec<IntraBond>,
}

impl BlockGeometry {
    pub fn corner(&self, axis: LatticeAxis, side: Side) -> Option<Corner> {
        self.corners
            .iter()
            .copied()
            .find(|c| c.axis == axis && c.side == side)
    }

    pub fn is_corner(&self, site: usize) -> bool {
        self.corners.iter().any(|c| c.site == site)
    }

    /// Corner sites in ascending order.
    pub fn corner_sites(&self) -> Vec<usize> {
        let mut sites: Vec<usize> = self.corners.iter().map(|c| c.site).collect();
        sites.sort_unstable();
        sites
    }

    /// All unordered pairs of corner sites, `(i, j)` with `i < j`, lexicographic.
    pub fn corner_pairs(&self) -> Vec<(usize, usize)> {
        let sites = self.corner_sites();
        let mut pairs = Vec::new();
        for (a, &i) in sites.iter().enumerate() {
            for &j in &sites[a + 1..] {
                pairs.push((i, j));
            }
        }
        pairs
    }
}

pub fn block_geometry(dimension: Dimension) -> BlockGeometry {
    let n_sites = dimension.block_size();
    let axes = &LatticeAxis::ALL[..dimension.value() as usize];
    let (center, corners) = match dimension {
        Dimension::One => (
            1,
            vec![
                Corner {
                    site: 0,
                    axis: LatticeAxis::X,
                    side: Side::Minus,
                },
                Corner {
                    site: 2,
                    axis: LatticeAxis::X,
                    side: Side::Plus,
                },
            ],
        ),
        _ => {
            let corners = axes
                .iter()
                .enumerate()
                .flat_map(|(a, &axis)| {
                    [
                        Corner {
                            site: 1 + 2 * a,
                            axis,
                            side: Side::Minus,
                        },
                        Corner {
                            site: 2 + 2 * a,
                            axis,
                            side: Side::Plus,
                        },
                    ]
                })
                .collect();
            (0, corners)
        }
    };
    let intra_bonds = corners
        .iter()
        .map(|c: &Corner| IntraBond {
            center,
            corner: c.site,
            axis: c.axis,
        })
        .collect();
    BlockGeometry {
        dimension,
        n_sites,
        center,
        corners,
        intra_bonds,
    }
}

/// Per-axis bond weights `c₁, c₂, c₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl AxisCoefficients {
    pub fn for_axis(&self, axis: LatticeAxis) -> f64 {
        match axis {
            LatticeAxis::X => self.c1,
            LatticeAxis::Y => self.c2,
            LatticeAxis::Z => self.c3,
        }
    }
}

/// `c₁ = 1`, `c₂ = (d−1)/2^((d−1)(d−2)/2)`, `c₃ = (d−1)(d−2)/2`.
pub fn axis_coefficients(dimension: Dimension) -> AxisCoefficients {
    let d = dimension.value() as i32;
    let pairs = (d - 1) * (d - 2) / 2;
    AxisCoefficients {
        c1: 1.0,
        c2: f64::from(d - 1) / 2f64.powi(pairs),
        c3: f64::from(pairs),
    }
}

/// `Σ c_axis σˣ_c σˣ_a` and `Σ c_axis σʸ_c σʸ_a` over the block bonds.
struct BondSums {
    xx: DenseMatrix,
    yy: DenseMatrix,
}

fn bond_sums(geometry: &BlockGeometry) -> Result<BondSums> {
    let n = geometry.n_sites;
    let coeffs = axis_coefficients(geometry.dimension);
    let dim = 1 << n;
    let mut xx = DenseMatrix::zeros(dim, dim);
    let mut yy = DenseMatrix::zeros(dim, dim);
    for bond in &geometry.intra_bonds {
        let c = coeffs.for_axis(bond.axis);
        if c == 0.0 {
            continue;
        }
        xx = xx.add_scaled(c, &two_site_term(PauliAxis::X, bond.center, bond.corner, n)?)?;
        yy = yy.add_scaled(c, &two_site_term(PauliAxis::Y, bond.center, bond.corner, n)?)?;
    }
    Ok(BondSums { xx, yy })
}

fn canonical_bond_sums(dimension: Dimension) -> &'static BondSums {
    static CACHE: [OnceLock<BondSums>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[dimension.index()].get_or_init(|| {
        bond_sums(&block_geometry(dimension)).expect("canonical geometry is well formed")
    })
}

/// Block Hamiltonian `H_B(J, γ)` as a dense `2ⁿ × 2ⁿ` real symmetric matrix.
pub fn block_hamiltonian(params: CouplingParams, geometry: &BlockGeometry) -> Result<DenseMatrix> {
    let quarter = params.j / 4.0;
    let wx = quarter * (1.0 + params.gamma);
    let wy = quarter * (1.0 - params.gamma);
    let assemble = |sums: &BondSums| sums.xx.scaled(wx).add_scaled(wy, &sums.yy);
    if *geometry == block_geometry(geometry.dimension) {
        assemble(canonical_bond_sums(geometry.dimension))
    } else {
        assemble(&bond_sums(geometry)?)
    }
}

/// One representative interblock bond per lattice axis present in the block.
pub fn interblock_bonds(geometry: &BlockGeometry) -> Vec<InterblockBond> {
    LatticeAxis::ALL
        .iter()
        .filter_map(|&axis| {
            let from = geometry.corner(axis, Side::Plus)?;
            let to = geometry.corner(axis, Side::Minus)?;
            Some(InterblockBond { from, to, axis })
        })
        .collect()
}
