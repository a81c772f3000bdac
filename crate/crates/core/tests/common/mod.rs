//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use qrg_core::rg_flow::GroundDoublet;
use qrg_core::xy_model::Dimension;
use rand::Rng;

/// Reference flow table: initial γ, then the 1st and 2nd step values for 1D, 2D, 3D.
pub const FLOW_TABLE: [(f64, [f64; 3], [f64; 3]); 12] = [
    (-1.0, [-1.0, -1.0, -1.0], [-1.0, -1.0, -1.0]),
    (-0.96, [-0.999983, -1.0, -1.0], [-1.0, -1.0, -1.0]),
    (-0.76, [-0.994941, -1.0, -1.0], [-1.0, -1.0, -1.0]),
    (-0.51, [-0.933916, -0.999898, -1.0], [-0.99992, -1.0, -1.0]),
    (-0.26, [-0.663099, -0.989406, -0.999821], [-0.983511, -1.0, -1.0]),
    (-0.01, [-0.029992, -0.109531, -0.225734], [-0.0897608, -0.825471, -0.999508]),
    (0.04, [0.11949, 0.41218, 0.717215], [0.345383, 0.999333, 1.0]),
    (0.24, [0.625703, 0.984742, 0.999678], [0.975885, 1.0, 1.0]),
    (0.49, [0.922891, 0.999848, 1.0], [0.999871, 1.0, 1.0]),
    (0.74, [0.993349, 1.0, 1.0], [1.0, 1.0, 1.0]),
    (0.95, [0.999966, 1.0, 1.0], [1.0, 1.0, 1.0]),
    (1.0, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]),
];

/// Known one-step map of the three-site chain.
pub fn chain_closed_form(g: f64) -> f64 {
    g * (3.0 + g * g) / (1.0 + 3.0 * g * g)
}

pub fn dim_index(d: Dimension) -> usize {
    d.value() as usize - 1
}

const REFERENCE: &str = include_str!("../fixtures/reference_doublets.txt");

/// Reference γ = 1 doublet as `(φ₁, φ₂)` in ket order (leftmost spin = most significant bit).
pub fn reference_doublets(d: Dimension) -> (Vec<f64>, Vec<f64>) {
    let n = d.block_size();
    let mut out = [vec![0.0; 1 << n], vec![0.0; 1 << n]];
    for line in REFERENCE.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f[0].parse::<u32>().unwrap() != d.value() {
            continue;
        }
        let which: usize = f[1].parse().unwrap();
        let amp: f64 = f[2].parse().unwrap();
        assert_eq!(f[3].len(), n, "{line}");
        let idx = usize::from_str_radix(f[3], 2).unwrap();
        assert_eq!(out[which - 1][idx], 0.0, "duplicate ket {line}");
        out[which - 1][idx] = amp;
    }
    let [a, b] = out;
    (a, b)
}

/// Moves ket position `p` to site `perm[p]`.
pub fn permute_legs(v: &[f64], perm: &[usize]) -> Vec<f64> {
    let n = perm.len();
    let mut out = vec![0.0; v.len()];
    for (idx, &amp) in v.iter().enumerate() {
        let mut target = 0;
        for (p, &site) in perm.iter().enumerate() {
            if idx >> (n - 1 - p) & 1 == 1 {
                target |= 1 << (n - 1 - site);
            }
        }
        out[target] = amp;
    }
    out
}

pub fn equal_up_to_sign(a: &[f64], b: &[f64], tol: f64) -> bool {
    [1.0, -1.0]
        .iter()
        .any(|s| a.iter().zip(b).all(|(x, y)| (x - s * y).abs() <= tol))
}

/// `Some(swapped)` when the reference pair equals the computed pair up to
/// per-vector signs, with `swapped` set if the parity labels are exchanged.
pub fn match_doublet(doublet: &GroundDoublet, a1: &[f64], a2: &[f64], tol: f64) -> Option<bool> {
    let (p1, p2) = (doublet.phi1.amplitudes(), doublet.phi2.amplitudes());
    if equal_up_to_sign(a1, p1, tol) && equal_up_to_sign(a2, p2, tol) {
        Some(false)
    } else if equal_up_to_sign(a1, p2, tol) && equal_up_to_sign(a2, p1, tol) {
        Some(true)
    } else {
        None
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All leg permutations (lexicographic) under which the reference doublet matches.
pub fn matching_permutations(d: Dimension, doublet: &GroundDoublet, tol: f64) -> Vec<(Vec<usize>, bool)> {
    let (a1, a2) = reference_doublets(d);
    permutations(d.block_size())
        .into_iter()
        .filter_map(|perm| {
            let (b1, b2) = (permute_legs(&a1, &perm), permute_legs(&a2, &perm));
            match_doublet(doublet, &b1, &b2, tol).map(|swapped| (perm, swapped))
        })
        .collect()
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.gen_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

pub fn random_state<R: Rng>(rng: &mut R, n_spins: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..1 << n_spins).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Number of eigenvalues of symmetric `a` below `lambda`, from the signs of
/// the Gaussian-elimination pivots of `a − λI`.
fn count_below(a: &[Vec<f64>], lambda: f64) -> usize {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, &x)| if i == j { x - lambda } else { x }).collect())
        .collect();
    let mut negatives = 0;
    for k in 0..n {
        let mut pivot = m[k][k];
        if pivot == 0.0 {
            pivot = -1e-300;
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let factor = m[i][k] / pivot;
            for j in k + 1..n {
                m[i][j] -= factor * m[k][j];
            }
        }
    }
    negatives
}

/// Ascending eigenvalues of a symmetric matrix by inertia-count bisection.
pub fn bisection_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let radius = a
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(a, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Reduced state of spins `(i, j)` by summing over every pair of full basis indices.
pub fn brute_force_partial_trace(psi: &[f64], n: usize, i: usize, j: usize) -> [[f64; 4]; 4] {
    let bit = |idx: usize, site: usize| idx >> (n - 1 - site) & 1;
    let mut out = [[0.0; 4]; 4];
    for r in 0..psi.len() {
        for c in 0..psi.len() {
            let traced_equal = (0..n)
                .filter(|&s| s != i && s != j)
                .all(|s| bit(r, s) == bit(c, s));
            if traced_equal {
                let a = 2 * bit(r, i) + bit(r, j);
                let b = 2 * bit(c, i) + bit(c, j);
                out[a][b] += psi[r] * psi[c];
            }
        }
    }
    out
}

fn matmul4(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Eigenvalues of the non-symmetric product `ρ ρ̃` (descending by real part),
/// from the characteristic polynomial (Faddeev–LeVerrier) solved by
/// Durand–Kerner iteration in complex arithmetic.
pub fn general_spin_flip_eigenvalues(rho: &[[f64; 4]; 4]) -> [f64; 4] {
    let y = Complex64::new(0.0, 1.0);
    let sy = [[Complex64::new(0.0, 0.0), -y], [y, Complex64::new(0.0, 0.0)]];
    let mut yy = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let v = sy[a >> 1][b >> 1] * sy[a & 1][b & 1];
            assert!(v.im.abs() < 1e-15);
            yy[a][b] = v.re;
        }
    }
    let tilde = matmul4(&matmul4(&yy, rho), &yy);
    let m = matmul4(rho, &tilde);

    // p(λ) = λ⁴ + c[1]λ³ + c[2]λ² + c[3]λ + c[4], with
    // M_k = m·M_{k−1} + c[k−1]·I and c[k] = −tr(m·M_k)/k.
    let mut c = [1.0, 0.0, 0.0, 0.0, 0.0];
    let mut mk = [[0.0; 4]; 4];
    for k in 1..=4 {
        let mut next = matmul4(&m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += c[k - 1];
        }
        mk = next;
        let am = matmul4(&m, &mk);
        c[k] = -(0..4).map(|i| am[i][i]).sum::<f64>() / k as f64;
    }

    let p = |z: Complex64| (((z + c[1]) * z + c[2]) * z + c[3]) * z + c[4];
    let mut roots: Vec<Complex64> = (0..4).map(|k| Complex64::new(0.4, 0.9).powu(k as u32)).collect();
    for _ in 0..500 {
        for i in 0..4 {
            let zi = roots[i];
            let denom = (0..4)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (zi - roots[j]));
            roots[i] = zi - p(zi) / denom;
        }
    }
    let mut re: Vec<f64> = roots.iter().map(|z| z.re).collect();
    re.sort_by(|a, b| b.total_cmp(a));
    [re[0], re[1], re[2], re[3]]
}
