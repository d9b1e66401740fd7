//! Seeded samplers for generic states and unitaries.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::qstate::{DensityOperator, StateVector, C64};

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state: normalized independent complex Gaussians.
pub fn haar_state(num_qubits: usize, rng: &mut impl Rng) -> Result<StateVector> {
    let amps = (0..1usize << num_qubits).map(|_| gaussian(rng)).collect();
    StateVector::new(num_qubits, amps)
}

/// [`haar_state`] from a fresh generator seeded with `seed`.
pub fn haar_state_seeded(num_qubits: usize, seed: u64) -> Result<StateVector> {
    haar_state(num_qubits, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Haar-random `n x n` unitary via QR of a complex Ginibre matrix with the
/// phases of `diag(R)` divided out.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

/// Random mixed state of the given rank on labels `1..=num_qubits`:
/// `G G^dagger / tr` with `G` a `2^n x rank` Ginibre matrix.
pub fn random_density(num_qubits: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityOperator> {
    let dim = 1usize << num_qubits;
    let g = DMatrix::from_fn(dim, rank.clamp(1, dim), |_, _| gaussian(rng));
    let mut rho = &g * g.adjoint();
    let tr = rho.trace();
    rho /= tr;
    // Restore exact Hermiticity lost to rounding.
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    DensityOperator::new((1..=num_qubits).collect(), rho)
}
