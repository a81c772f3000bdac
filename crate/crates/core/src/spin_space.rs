//! Pauli operators and states on an n-spin Hilbert space.
//!
//! Basis convention: spin `k` of an `n`-spin register is bit `n-1-k` of the
//! basis index (spin 0 is the most significant bit), `0 = ↑` and `1 = ↓`.
//! With this ordering an operator on spin `k` is the `k`-th factor of the
//! Kronecker product `I ⊗ … ⊗ σ ⊗ … ⊗ I`.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{kron, DenseMatrix};

/// Largest register handled here (a 3D block has seven spins).
pub const MAX_SPINS: usize = 7;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// Real single-spin building blocks. `ImagY` is `-iσʸ = [[0,-1],[1,0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LocalOp {
    X,
    ImagY,
    Z,
}

impl LocalOp {
    fn matrix(self) -> DenseMatrix {
        let rows: [[f64; 2]; 2] = match self {
            LocalOp::X => [[0.0, 1.0], [1.0, 0.0]],
            LocalOp::ImagY => [[0.0, -1.0], [1.0, 0.0]],
            LocalOp::Z => [[1.0, 0.0], [0.0, -1.0]],
        };
        DenseMatrix::from_rows(&rows).expect("2x2 literal")
    }
}

fn check_register(n_spins: usize) -> Result<()> {
    if n_spins == 0 || n_spins > MAX_SPINS {
        return Err(Error::TooManySpins {
            n_spins,
            max: MAX_SPINS,
        });
    }
    Ok(())
}

fn check_site(site: usize, n_spins: usize) -> Result<()> {
    if site >= n_spins {
        return Err(Error::SiteOutOfRange { site, n_spins });
    }
    Ok(())
}

/// Kronecker product with the given factors placed on their sites and identities elsewhere.
fn embed_product(factors: &[(usize, LocalOp)], n_spins: usize) -> DenseMatrix {
    let id = DenseMatrix::identity(2);
    let mut out = DenseMatrix::identity(1);
    for k in 0..n_spins {
        let factor = factors
            .iter()
            .find(|(site, _)| *site == k)
            .map_or_else(|| id.clone(), |(_, op)| op.matrix());
        out = kron(&out, &factor);
    }
    out
}

/// Single-site Pauli operator `I ⊗ … ⊗ σ^axis ⊗ … ⊗ I` on `site`.
///
/// `σʸ` alone is purely imaginary, so `PauliAxis::Y` is rejected; use
/// [`two_site_term`] (where the imaginary units cancel) or
/// [`embed_imag_y`] instead.
pub fn embed_pauli(axis: PauliAxis, site: usize, n_spins: usize) -> Result<DenseMatrix> {
    check_register(n_spins)?;
    check_site(site, n_spins)?;
    let op = match axis {
        PauliAxis::X => LocalOp::X,
        PauliAxis::Z => LocalOp::Z,
        PauliAxis::Y => return Err(Error::ComplexOperator),
    };
    Ok(embed_product(&[(site, op)], n_spins))
}

/// Real matrix of `-iσʸ` on `site`, so that `σʸ_site = i · embed_imag_y(site)`.
pub fn embed_imag_y(site: usize, n_spins: usize) -> Result<DenseMatrix> {
    check_register(n_spins)?;
    check_site(site, n_spins)?;
    Ok(embed_product(&[(site, LocalOp::ImagY)], n_spins))
}

/// Two-site interaction `σ^axis_a σ^axis_b`, a real symmetric matrix for every axis.
pub fn two_site_term(
    axis: PauliAxis,
    site_a: usize,
    site_b: usize,
    n_spins: usize,
) -> Result<DenseMatrix> {
    check_register(n_spins)?;
    check_site(site_a, n_spins)?;
    check_site(site_b, n_spins)?;
    if site_a == site_b {
        return Err(Error::CoincidentSites { site: site_a });
    }
    Ok(match axis {
        PauliAxis::X => embed_product(&[(site_a, LocalOp::X), (site_b, LocalOp::X)], n_spins),
        PauliAxis::Z => embed_product(&[(site_a, LocalOp::Z), (site_b, LocalOp::Z)], n_spins),
        // σʸσʸ = (i·A)(i·A) = -A⊗A with A = -iσʸ real.
        PauliAxis::Y => embed_product(
            &[(site_a, LocalOp::ImagY), (site_b, LocalOp::ImagY)],
            n_spins,
        )
        .scaled(-1.0),
    })
}

/// `⊗ σᶻ` over all spins: diagonal with `(-1)^popcount(index)`.
pub fn parity_operator(n_spins: usize) -> Result<DenseMatrix> {
    check_register(n_spins)?;
    let diag: Vec<f64> = (0..1usize << n_spins).map(parity_sign).collect();
    Ok(DenseMatrix::from_diag(&diag))
}

/// `+1` for basis states with an even number of down spins, `-1` otherwise.
pub fn parity_sign(index: usize) -> f64 {
    if index.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Arrow label of a basis index, spin 0 first (`"↑↓↑"` for index 2 of 3 spins).
pub fn basis_label(index: usize, n_spins: usize) -> String {
    (0..n_spins)
        .map(|k| {
            if index >> (n_spins - 1 - k) & 1 == 0 {
                '↑'
            } else {
                '↓'
            }
        })
        .collect()
}

/// Real state vector of an n-spin register.
#[derive(Clone, PartialEq)]
pub struct SpinState {
    n_spins: usize,
    amplitudes: Vec<f64>,
}

impl SpinState {
    pub fn new(n_spins: usize, amplitudes: Vec<f64>) -> Result<Self> {
        check_register(n_spins)?;
        let expected = 1usize << n_spins;
        if amplitudes.len() != expected {
            return Err(Error::StateLength {
                expected,
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            n_spins,
            amplitudes,
        })
    }

    /// Like [`SpinState::new`] but also requires unit norm (within 1e-10).
    pub fn normalized(n_spins: usize, amplitudes: Vec<f64>) -> Result<Self> {
        let s = Self::new(n_spins, amplitudes)?;
        s.check_normalized()?;
        Ok(s)
    }

    /// Computational basis state.
    pub fn basis(n_spins: usize, index: usize) -> Result<Self> {
        check_register(n_spins)?;
        let mut amps = vec![0.0; 1 << n_spins];
        let slot = amps.get_mut(index).ok_or(Error::SiteOutOfRange {
            site: index,
            n_spins: 1 << n_spins,
        })?;
        *slot = 1.0;
        Self::new(n_spins, amps)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let norm_sq = self.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn negated(&self) -> Self {
        Self {
            n_spins: self.n_spins,
            amplitudes: self.amplitudes.iter().map(|a| -a).collect(),
        }
    }

    /// `⟨self| op |other⟩`.
    pub fn matrix_element(&self, op: &DenseMatrix, other: &Self) -> Result<f64> {
        op.bilinear(&self.amplitudes, &other.amplitudes)
    }
}

impl fmt::Debug for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_map();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if *a != 0.0 {
                list.entry(&basis_label(i, self.n_spins), a);
            }
        }
        list.finish()
    }
}
