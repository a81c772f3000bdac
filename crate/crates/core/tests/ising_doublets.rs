mod common;

use common::{reference_doublets, matching_permutations};
use qrg_core::entanglement::{density_matrix, partial_trace_pair, wootters_concurrence};
use qrg_core::numerics::eigh_symmetric;
use qrg_core::rg_flow::{ground_doublet, renormalized_operators};
use qrg_core::spin_space::SpinState;
use qrg_core::xy_model::{block_geometry, CouplingParams, Dimension};

fn ising_doublet(d: Dimension) -> qrg_core::rg_flow::GroundDoublet {
    ground_doublet(CouplingParams::new(1.0, 1.0).unwrap(), &block_geometry(d)).unwrap()
}

#[test]
fn reference_vectors_are_orthonormal_with_expected_support() {
    for d in Dimension::ALL {
        let n = d.block_size();
        let (a1, a2) = reference_doublets(d);
        let amp = 2f64.powf((1.0 - n as f64) / 2.0);
        for v in [&a1, &a2] {
            assert_eq!(v.iter().filter(|x| **x != 0.0).count(), 1 << (n - 1));
            assert!(v.iter().all(|x| *x == 0.0 || (x.abs() - amp).abs() < 1e-12));
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(a1.iter().zip(&a2).map(|(x, y)| x * y).sum::<f64>(), 0.0);
    }
}

#[test]
fn computed_doublet_has_uniform_amplitudes() {
    for d in Dimension::ALL {
        let n = d.block_size();
        let amp = 2f64.powf((1.0 - n as f64) / 2.0);
        let doublet = ising_doublet(d);
        for ours in [&doublet.phi1, &doublet.phi2] {
            let support: Vec<usize> = (0..1 << n).filter(|&i| ours.amplitudes()[i].abs() > 1e-9).collect();
            assert_eq!(support.len(), 1 << (n - 1));
            for &i in &support {
                assert!((ours.amplitudes()[i].abs() - amp).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn chain_doublet_matches_without_relabeling() {
    let doublet = ising_doublet(Dimension::One);
    let found = matching_permutations(Dimension::One, &doublet, 1e-9);
    assert!(found.contains(&(vec![0, 1, 2], false)), "{found:?}");
}

// The reference square and cube kets list the center spin first, like this
// crate's numbering. Any ordering of the corners matches because the γ = 1
// doublet is symmetric under corner exchange. The reference first square
// state is the odd one.
#[test]
fn square_and_cube_doublets_match_with_center_first() {
    for (d, swapped) in [(Dimension::Two, true), (Dimension::Three, false)] {
        let n = d.block_size();
        let found = matching_permutations(d, &ising_doublet(d), 1e-9);
        let corner_orders: usize = (1..n).product();
        assert_eq!(found.len(), corner_orders, "{d}");
        assert!(found.iter().all(|(p, s)| p[0] == 0 && *s == swapped), "{d}");
        assert_eq!(found[0].0, (0..n).collect::<Vec<_>>());
    }
}

#[test]
fn reference_chain_state_reduced_to_its_ends() {
    let (a1, _) = reference_doublets(Dimension::One);
    let phi = SpinState::new(3, a1).unwrap();
    let rho = density_matrix(&phi).unwrap();
    assert_eq!((rho.rows(), rho.cols()), (8, 8));
    assert!((rho.trace() - 1.0).abs() < 1e-12);

    let rdm = partial_trace_pair(&rho, (0, 2)).unwrap();
    let mut eig = eigh_symmetric(rdm.rho()).unwrap().eigenvalues;
    eig.sort_by(|a, b| b.total_cmp(a));
    for (got, want) in eig.iter().zip([0.5, 0.5, 0.0, 0.0]) {
        assert!((got - want).abs() < 1e-12, "{eig:?}");
    }
    assert!(wootters_concurrence(&rdm).unwrap().abs() <= 1e-10);
}

#[test]
fn ising_chain_transfers_sigma_x_exactly() {
    let ops = renormalized_operators(&ising_doublet(Dimension::One), 2).unwrap();
    assert!((ops.xi_x.abs() - 1.0).abs() < 1e-10);
}

