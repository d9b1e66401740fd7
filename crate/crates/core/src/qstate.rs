//! Dense multi-qubit pure and mixed states.
//!
//! Qubits carry 1-based labels. Within any state or operator the first
//! (smallest) label is the most significant bit of the basis index, so the
//! ket `|b_1 b_2 ... b_n>` is stored at the binary index `b_1 b_2 ... b_n`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{input, invalid, Error, Result};

pub type C64 = Complex<f64>;

/// Largest supported register; dense storage needs 2^n amplitudes.
pub const MAX_QUBITS: usize = 12;

/// Squared-norm tolerance for accepting a state without renormalizing.
pub const NORM_TOL: f64 = 1e-12;

/// Elementwise Hermiticity and trace tolerance for density operators.
pub const MATRIX_TOL: f64 = 1e-12;

/// Most negative eigenvalue tolerated in a density operator.
pub const PSD_TOL: f64 = 1e-10;

/// An ordered set of qubit labels, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct QubitSubset {
    labels: Vec<usize>,
}

impl QubitSubset {
    /// Builds a subset from labels in any order. Duplicates and label 0 are
    /// rejected.
    pub fn new(labels: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut labels: Vec<usize> = labels.into_iter().collect();
        labels.sort_unstable();
        if labels.first() == Some(&0) {
            return input("qubit labels are 1-based; got 0");
        }
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return input(format!("duplicate qubit label in {labels:?}"));
        }
        Ok(Self { labels })
    }

    /// All labels `1..=n`.
    pub fn full(n: usize) -> Self {
        Self {
            labels: (1..=n).collect(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: usize) -> bool {
        self.labels.binary_search(&label).is_ok()
    }

    /// Fails unless every label lies in `1..=n`.
    pub fn check_within(&self, n: usize) -> Result<()> {
        match self.labels.last() {
            Some(&max) if max > n => input(format!(
                "qubit label {max} out of range for a {n}-qubit state"
            )),
            _ => Ok(()),
        }
    }

    pub fn is_subset_of(&self, other: &[usize]) -> bool {
        self.labels.iter().all(|l| other.contains(l))
    }
}

impl TryFrom<Vec<usize>> for QubitSubset {
    type Error = Error;

    fn try_from(labels: Vec<usize>) -> Result<Self> {
        Self::new(labels)
    }
}

impl From<QubitSubset> for Vec<usize> {
    fn from(s: QubitSubset) -> Self {
        s.labels
    }
}

/// Normalized pure state of `num_qubits` qubits labelled `1..=num_qubits`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateFile", into = "StateFile")]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
    renormalized: bool,
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    num_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateFile> for StateVector {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        let amps = f.amplitudes.iter().map(|&[re, im]| C64::new(re, im)).collect();
        StateVector::new(f.num_qubits, amps)
    }
}

impl From<StateVector> for StateFile {
    fn from(s: StateVector) -> Self {
        StateFile {
            num_qubits: s.num_qubits,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

fn check_register(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return input(format!(
            "number of qubits must be in 1..={MAX_QUBITS}, got {num_qubits}"
        ));
    }
    Ok(())
}

impl StateVector {
    /// Validates the amplitude count and normalizes if the squared norm is
    /// off by more than [`NORM_TOL`]. A renormalized state reports
    /// [`was_renormalized`](Self::was_renormalized).
    pub fn new(num_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        check_register(num_qubits)?;
        if amplitudes.len() != 1 << num_qubits {
            return input(format!(
                "{num_qubits} qubits need {} amplitudes, got {}",
                1usize << num_qubits,
                amplitudes.len()
            ));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("non-finite amplitude");
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr == 0.0 {
            return invalid("state has zero norm");
        }
        let renormalized = (norm_sqr - 1.0).abs() > NORM_TOL;
        if renormalized {
            let scale = norm_sqr.sqrt().recip();
            amplitudes.iter_mut().for_each(|z| *z *= scale);
        }
        Ok(Self {
            num_qubits,
            amplitudes,
            renormalized,
        })
    }

    /// Builds a state from `(bitstring, amplitude)` pairs, e.g. `("010", 1.0)`.
    /// The leftmost character is qubit 1.
    pub fn from_basis_terms<S, I>(num_qubits: usize, terms: I) -> Result<Self>
    where
        S: AsRef<str>,
        I: IntoIterator<Item = (S, C64)>,
    {
        check_register(num_qubits)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        let mut seen = vec![false; amps.len()];
        for (bits, amp) in terms {
            let bits = bits.as_ref();
            if bits.len() != num_qubits {
                return input(format!(
                    "bitstring {bits:?} has length {}, expected {num_qubits}",
                    bits.len()
                ));
            }
            let idx = usize::from_str_radix(bits, 2)
                .map_err(|_| Error::Input(format!("bitstring {bits:?} is not binary")))?;
            if bits.starts_with('+') || std::mem::replace(&mut seen[idx], true) {
                return input(format!("duplicate or malformed bitstring {bits:?}"));
            }
            amps[idx] = amp;
        }
        Self::new(num_qubits, amps)
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_register(num_qubits)?;
        if index >= 1 << num_qubits {
            return input(format!("basis index {index} out of range"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(num_qubits, amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// True when construction rescaled the input amplitudes.
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn labels(&self) -> QubitSubset {
        QubitSubset::full(self.num_qubits)
    }

    /// Fails unless `label` names a qubit of this state.
    pub fn check_label(&self, label: usize) -> Result<()> {
        if label == 0 || label > self.num_qubits {
            return input(format!(
                "qubit label {label} out of range for a {}-qubit state",
                self.num_qubits
            ));
        }
        Ok(())
    }

    /// The projector `|psi><psi|`.
    pub fn density(&self) -> DensityOperator {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityOperator {
            labels: (1..=self.num_qubits).collect(),
            matrix: &v * v.adjoint(),
        }
    }

    /// Reduced state on `keep`, computed from the amplitudes without forming
    /// the full projector.
    pub fn reduce(&self, keep: &QubitSubset) -> Result<DensityOperator> {
        if keep.is_empty() {
            return input("cannot reduce onto an empty subsystem");
        }
        keep.check_within(self.num_qubits)?;
        let positions: Vec<usize> = keep.labels().iter().map(|l| l - 1).collect();
        Ok(DensityOperator {
            labels: keep.labels().to_vec(),
            matrix: reduce_amplitudes(&self.amplitudes, self.num_qubits, &positions),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Unit-trace positive semidefinite operator on a labelled set of qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityFile", into = "DensityFile")]
pub struct DensityOperator {
    labels: Vec<usize>,
    matrix: DMatrix<C64>,
}

#[derive(Serialize, Deserialize)]
struct DensityFile {
    qubit_labels: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<DensityFile> for DensityOperator {
    type Error = Error;

    fn try_from(f: DensityFile) -> Result<Self> {
        let dim = f.matrix.len();
        if f.matrix.iter().any(|row| row.len() != dim) {
            return input("density matrix rows must all have the same length as the row count");
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            let [re, im] = f.matrix[i][j];
            C64::new(re, im)
        });
        DensityOperator::new(f.qubit_labels, m)
    }
}

impl From<DensityOperator> for DensityFile {
    fn from(d: DensityOperator) -> Self {
        let dim = d.matrix.nrows();
        DensityFile {
            qubit_labels: d.labels,
            matrix: (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| {
                            let z = d.matrix[(i, j)];
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl DensityOperator {
    /// Validates labels, dimension, Hermiticity, unit trace and positivity.
    pub fn new(labels: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let subset = QubitSubset::new(labels.iter().copied())?;
        if subset.labels() != labels.as_slice() {
            return input(format!("qubit labels must be strictly increasing, got {labels:?}"));
        }
        check_register(labels.len())?;
        let dim = 1usize << labels.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return input(format!(
                "{} qubits need a {dim}x{dim} matrix, got {}x{}",
                labels.len(),
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        for i in 0..dim {
            for j in i..dim {
                if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > MATRIX_TOL {
                    return invalid(format!("matrix is not Hermitian at ({i}, {j})"));
                }
            }
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > MATRIX_TOL || trace.im.abs() > MATRIX_TOL {
            return invalid(format!("trace is {trace}, expected 1"));
        }
        let rho = Self { labels, matrix };
        let (eigs, _) = rho.eigen();
        if let Some(&min) = eigs.last() {
            if min < -PSD_TOL {
                return invalid(format!("minimum eigenvalue {min:e} is negative"));
            }
        }
        Ok(rho)
    }

    /// Skips validation; for operators produced by trusted internal routes.
    pub(crate) fn from_parts(labels: Vec<usize>, matrix: DMatrix<C64>) -> Self {
        Self { labels, matrix }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Position of `label` within this operator's label list.
    pub fn position_of(&self, label: usize) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| {
                Error::Input(format!(
                    "qubit {label} is not part of the operator on {:?}",
                    self.labels
                ))
            })
    }

    /// Eigenvalues in decreasing order with matching eigenvector columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        hermitian_eigen(&self.matrix)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Reduces `rho` onto `keep` by summing over the traced-out basis states.
pub fn partial_trace(rho: &DensityOperator, keep: &QubitSubset) -> Result<DensityOperator> {
    if keep.is_empty() {
        return input("cannot trace down to an empty subsystem");
    }
    if !keep.is_subset_of(&rho.labels) {
        return input(format!(
            "labels {:?} are not a subset of {:?}",
            keep.labels(),
            rho.labels
        ));
    }
    let positions: Vec<usize> = keep
        .labels()
        .iter()
        .map(|&l| rho.position_of(l))
        .collect::<Result<_>>()?;
    let (kept, traced) = index_maps(rho.num_qubits(), &positions);
    let d = kept.len();
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for &e in &traced {
                acc += rho.matrix[(kept[i] | e, kept[j] | e)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityOperator::from_parts(keep.labels().to_vec(), out))
}

/// Full-register offsets for every basis state of the kept positions and of
/// the complementary (traced) positions. Position `p` of an `n`-qubit
/// register is bit `n - 1 - p`.
pub(crate) fn index_maps(n: usize, keep_positions: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let traced_positions: Vec<usize> = (0..n).filter(|p| !keep_positions.contains(p)).collect();
    (
        scatter_all(n, keep_positions),
        scatter_all(n, &traced_positions),
    )
}

fn scatter_all(n: usize, positions: &[usize]) -> Vec<usize> {
    let k = positions.len();
    (0..1usize << k)
        .map(|local| {
            positions.iter().enumerate().fold(0, |acc, (slot, &pos)| {
                let bit = (local >> (k - 1 - slot)) & 1;
                acc | (bit << (n - 1 - pos))
            })
        })
        .collect()
}

/// `tr_E |psi><psi|` for the qubits at `keep_positions` (0-based, sorted).
pub(crate) fn reduce_amplitudes(amps: &[C64], n: usize, keep_positions: &[usize]) -> DMatrix<C64> {
    let (kept, traced) = index_maps(n, keep_positions);
    let d = kept.len();
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let mut acc = C64::new(0.0, 0.0);
            for &e in &traced {
                acc += amps[kept[i] | e] * amps[kept[j] | e].conj();
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc.conj();
        }
    }
    out
}

/// Amplitude matrix `W` with `W W^dagger = tr_E |psi><psi|`: rows indexed by
/// the kept positions, columns by the environment.
pub(crate) fn amplitude_factor(amps: &[C64], n: usize, keep_positions: &[usize]) -> DMatrix<C64> {
    let (kept, traced) = index_maps(n, keep_positions);
    DMatrix::from_fn(kept.len(), traced.len(), |i, e| amps[kept[i] | traced[e]])
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues decreasing.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}
