//! Reference formulas computed independently of the library internals.

use monotangle::{DensityOperator, C64};
use nalgebra::DMatrix;

/// Wootters concurrence from the spectrum of `sqrt(rho) rho~ sqrt(rho)`,
/// with `rho~ = (Y x Y) rho* (Y x Y)`.
pub fn wootters_concurrence(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    assert_eq!(m.nrows(), 4);
    let eig = m.clone().symmetric_eigen();
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    let sqrt_rho = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();
    let mut yy = DMatrix::<C64>::zeros(4, 4);
    for (i, s) in [(0, -1.0), (1, 1.0), (2, 1.0), (3, -1.0)] {
        yy[(i, 3 - i)] = C64::new(s, 0.0);
    }
    let tilde = &yy * m.map(|z| z.conj()) * &yy;
    let r = &sqrt_rho * tilde * &sqrt_rho;
    let r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = r.symmetric_eigen().eigenvalues.iter().map(|&mu| mu.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Three-tangle `4 |d1 - 2 d2 + 4 d3|` of a 3-qubit pure state (Cayley
/// hyperdeterminant), amplitudes indexed `a[4 i + 2 j + k]`.
pub fn hyperdeterminant_three_tangle(a: &[C64]) -> f64 {
    let x = |i: usize, j: usize, k: usize| a[4 * i + 2 * j + k];
    let d1 = x(0, 0, 0).powi(2) * x(1, 1, 1).powi(2)
        + x(0, 0, 1).powi(2) * x(1, 1, 0).powi(2)
        + x(0, 1, 0).powi(2) * x(1, 0, 1).powi(2)
        + x(1, 0, 0).powi(2) * x(0, 1, 1).powi(2);
    let d2 = x(0, 0, 0) * x(1, 1, 1) * x(0, 1, 1) * x(1, 0, 0)
        + x(0, 0, 0) * x(1, 1, 1) * x(1, 0, 1) * x(0, 1, 0)
        + x(0, 0, 0) * x(1, 1, 1) * x(1, 1, 0) * x(0, 0, 1)
        + x(0, 1, 1) * x(1, 0, 0) * x(1, 0, 1) * x(0, 1, 0)
        + x(0, 1, 1) * x(1, 0, 0) * x(1, 1, 0) * x(0, 0, 1)
        + x(1, 0, 1) * x(0, 1, 0) * x(1, 1, 0) * x(0, 0, 1);
    let d3 = x(0, 0, 0) * x(1, 1, 0) * x(1, 0, 1) * x(0, 1, 1) + x(1, 1, 1) * x(0, 0, 1) * x(0, 1, 0) * x(1, 0, 0);
    4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm()
}

/// `4 det rho_1` for the first qubit of a pure state, from the 2x2 block
/// sums written out directly.
pub fn one_tangle_first_qubit(a: &[C64]) -> f64 {
    let half = a.len() / 2;
    let (u, v) = a.split_at(half);
    let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let uv: C64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
    4.0 * (uu * vv - uv.norm_sqr())
}

/// Reduced density matrix on the given 1-based labels, by direct summation
/// over the traced-out bits (label 1 is the most significant bit).
pub fn reduce(a: &[C64], n: usize, keep: &[usize]) -> DMatrix<C64> {
    let k = keep.len();
    let sub = |i: usize| {
        keep.iter()
            .fold(0, |acc, &l| (acc << 1) | ((i >> (n - l)) & 1))
    };
    let env_mask: usize = (1..=n)
        .filter(|l| !keep.contains(l))
        .map(|l| 1 << (n - l))
        .sum();
    let mut rho = DMatrix::<C64>::zeros(1 << k, 1 << k);
    for i in 0..a.len() {
        for j in 0..a.len() {
            if i & env_mask == j & env_mask {
                rho[(sub(i), sub(j))] += a[i] * a[j].conj();
            }
        }
    }
    rho
}
