//! Convex-roof minimization over pure-state decompositions.
//!
//! Every decomposition of a density operator with at most `R` members is a
//! unitary mixture of the (zero-padded) spectral ensemble. The search below
//! parameterizes that `R x R` unitary as a product of complex Givens
//! rotations times column phases and minimizes the ensemble average
//! `sum_h p_h sqrt(tau_h)` with multi-start coordinate-wise line searches
//! refinement.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::qstate::{hermitian_eigen, DensityOperator, QubitSubset, StateVector, C64};

/// Ensemble members lighter than this are dropped.
pub const MIN_WEIGHT: f64 = 1e-12;

/// Unitarity tolerance for user-supplied mixing matrices.
pub const UNITARY_TOL: f64 = 1e-10;

/// Bracket length at which a line search stops.
const LINE_TOL: f64 = 1e-8;

/// Perturbed restarts from the best local minimum, and their amplitude.
const POLISH_HOPS: usize = 8;
const POLISH_KICK: f64 = 0.1;

/// Smallest search half-width kept for a coordinate.
const MIN_WIDTH: f64 = 1e-5;

/// Search configuration. Serializes as
/// `{"seed", "restarts", "padding", "max_sweeps", "tol"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoofConfig {
    pub seed: u64,
    /// Random starts run in addition to the spectral-ensemble start.
    pub restarts: usize,
    /// Extra zero members appended to the spectral ensemble; the mixing
    /// unitary is `(rank + padding) x (rank + padding)`.
    pub padding: usize,
    pub max_sweeps: usize,
    /// A start stops once a full sweep improves the roof value by less
    /// than this.
    pub tol: f64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 32,
            padding: 2,
            max_sweeps: 500,
            tol: 1e-10,
        }
    }
}

impl RoofConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return input(format!("roof tolerance must be positive, got {}", self.tol));
        }
        if self.max_sweeps == 0 {
            return input("max_sweeps must be at least 1");
        }
        Ok(())
    }
}

/// A pure-state functional evaluated on each member of a decomposition.
pub trait PureFunctional: Sync {
    /// `amplitudes` is a normalized state of `num_qubits` qubits and `focus`
    /// the 0-based position of the hub qubit.
    fn evaluate(&self, amplitudes: &[C64], num_qubits: usize, focus: usize) -> PureValue;
}

/// Value of a pure functional plus diagnostics from any nested roofs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureValue {
    pub value: f64,
    pub converged: bool,
    /// Smallest raw pure tangle met while evaluating, including nested
    /// decompositions. `+inf` when nothing was nested.
    pub min_seen: f64,
}

impl PureValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            converged: true,
            min_seen: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub probability: f64,
    pub state: StateVector,
}

/// Probability-weighted pure states on a fixed set of qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedEnsemble {
    pub labels: Vec<usize>,
    pub members: Vec<EnsembleMember>,
}

impl WeightedEnsemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.members.iter().map(|m| m.probability).sum()
    }

    /// `sum_h p_h |psi_h><psi_h|`.
    pub fn density(&self) -> DensityOperator {
        let dim = 1usize << self.labels.len();
        let mut m = DMatrix::zeros(dim, dim);
        for member in &self.members {
            let v = nalgebra::DVector::from_column_slice(member.state.amplitudes());
            m += (&v * v.adjoint()) * C64::new(member.probability, 0.0);
        }
        DensityOperator::from_parts(self.labels.clone(), m)
    }

    /// `sum_h p_h sqrt(max(0, f(psi_h)))`, the quantity the roof minimizes.
    pub fn objective<F: PureFunctional + ?Sized>(&self, functional: &F, focus: usize) -> Result<f64> {
        let pos = self.position_of(focus)?;
        let n = self.labels.len();
        Ok(self
            .members
            .iter()
            .map(|m| {
                let v = functional.evaluate(m.state.amplitudes(), n, pos).value;
                m.probability * v.max(0.0).sqrt()
            })
            .sum())
    }

    fn position_of(&self, label: usize) -> Result<usize> {
        match self.labels.iter().position(|&l| l == label) {
            Some(p) => Ok(p),
            None => input(format!("qubit {label} not in ensemble labels {:?}", self.labels)),
        }
    }

    /// Unnormalized members `sqrt(p_h) |psi_h>` as rows of a flat buffer.
    fn weighted_rows(&self) -> Vec<C64> {
        self.members
            .iter()
            .flat_map(|m| {
                let w = m.probability.sqrt();
                m.state.amplitudes().iter().map(move |&z| z * w)
            })
            .collect()
    }
}

/// Builds an ensemble from unnormalized rows, dropping near-empty ones.
fn ensemble_from_rows(labels: &[usize], rows: &[C64], dim: usize) -> WeightedEnsemble {
    let n = labels.len();
    let members = rows
        .chunks(dim)
        .filter_map(|row| {
            let p: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            if p < MIN_WEIGHT {
                return None;
            }
            let scale = p.sqrt().recip();
            let state = StateVector::new(n, row.iter().map(|&z| z * scale).collect())
                .expect("nonzero row of the right length");
            Some(EnsembleMember { probability: p, state })
        })
        .collect();
    WeightedEnsemble {
        labels: labels.to_vec(),
        members,
    }
}

/// Spectral decomposition: eigenvectors weighted by eigenvalues above
/// [`MIN_WEIGHT`], largest first.
pub fn canonical_ensemble(rho: &DensityOperator) -> WeightedEnsemble {
    let (eigs, vecs) = rho.eigen();
    let dim = rho.dim();
    let mut rows = Vec::new();
    for (k, &lambda) in eigs.iter().enumerate() {
        if lambda > MIN_WEIGHT {
            let w = lambda.sqrt();
            rows.extend(vecs.column(k).iter().map(|&z| z * w));
        }
    }
    ensemble_from_rows(rho.labels(), &rows, dim)
}

/// Mixes the members of `ensemble` with the unitary `mixing`:
/// `|phi_h~> = sum_j u_hj sqrt(p_j) |psi_j>`, padding with zero vectors up
/// to the unitary's size.
pub fn hjw_mix(ensemble: &WeightedEnsemble, mixing: &DMatrix<C64>) -> Result<WeightedEnsemble> {
    let size = mixing.nrows();
    if mixing.ncols() != size {
        return input("mixing matrix must be square");
    }
    if size < ensemble.len() {
        return input(format!(
            "mixing matrix of size {size} cannot mix {} members",
            ensemble.len()
        ));
    }
    let defect = (mixing.adjoint() * mixing - DMatrix::<C64>::identity(size, size)).camax();
    if defect > UNITARY_TOL {
        return input(format!("mixing matrix is not unitary (defect {defect:e})"));
    }
    let dim = 1usize << ensemble.labels.len();
    let rows = ensemble.weighted_rows();
    let mut out = vec![C64::new(0.0, 0.0); size * dim];
    for h in 0..size {
        for j in 0..ensemble.len() {
            let u = mixing[(h, j)];
            for k in 0..dim {
                out[h * dim + k] += u * rows[j * dim + k];
            }
        }
    }
    Ok(ensemble_from_rows(&ensemble.labels, &out, dim))
}

/// Outcome of a roof search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofResult {
    /// `[min sum_h p_h sqrt(tau_h)]^2` over the searched decompositions.
    pub value: f64,
    /// Rotation angles and phases of the best mixing (see [`mixing_unitary`]).
    pub best_mixing: Vec<f64>,
    pub restarts_used: usize,
    pub converged: bool,
    /// Smallest raw pure tangle evaluated; negative values are evidence
    /// against nonnegativity of the pure functional.
    pub min_pure_tangle_seen: f64,
    /// Roof value of the unmixed spectral ensemble.
    pub canonical_value: f64,
    pub rank: usize,
    /// Size of the mixing unitary (rank + padding).
    pub columns: usize,
}

/// Mixed-state tangle of `rho` with hub `focus` and the remaining qubits
/// `partners`, as the convex roof of `functional`.
pub fn m_tangle_mixed<F: PureFunctional + ?Sized>(
    rho: &DensityOperator,
    focus: usize,
    partners: &QubitSubset,
    functional: &F,
    config: &RoofConfig,
) -> Result<RoofResult> {
    config.validate()?;
    if partners.is_empty() {
        return input("at least one partner qubit is required");
    }
    if partners.contains(focus) {
        return input(format!("focus {focus} also listed as a partner"));
    }
    let expected = QubitSubset::new(partners.labels().iter().copied().chain([focus]))?;
    if expected.labels() != rho.labels() {
        return input(format!(
            "operator acts on {:?}, but focus and partners give {:?}",
            rho.labels(),
            expected.labels()
        ));
    }
    let focus_pos = rho.position_of(focus)?;
    Ok(roof_minimize(rho.matrix(), focus_pos, functional, config))
}

/// Roof search on a raw density matrix; `focus` is a 0-based position.
pub(crate) fn roof_minimize<F: PureFunctional + ?Sized>(
    rho: &DMatrix<C64>,
    focus: usize,
    functional: &F,
    config: &RoofConfig,
) -> RoofResult {
    let dim = rho.nrows();
    let num_qubits = dim.trailing_zeros() as usize;
    let (eigs, vecs) = hermitian_eigen(rho);
    let mut rows = Vec::new();
    for (k, &lambda) in eigs.iter().enumerate() {
        if lambda > MIN_WEIGHT {
            let w = lambda.sqrt();
            rows.extend(vecs.column(k).iter().map(|&z| z * w));
        }
    }
    let rank = rows.len() / dim;
    let problem = RoofProblem::new(functional, rows, rank, rank + config.padding, dim, num_qubits, focus);

    let zero = vec![0.0; problem.num_params()];
    let mut scratch = problem.scratch();
    let canonical = problem.evaluate(&zero, &mut scratch);
    let canonical_value = canonical.sum * canonical.sum;

    // The objective is nonnegative, so a start within `tol` of zero cannot
    // improve by more than `tol`; a single member admits no other mixture.
    if rank <= 1 || canonical_value <= config.tol {
        return RoofResult {
            value: canonical_value,
            best_mixing: zero,
            restarts_used: 0,
            converged: canonical.converged,
            min_pure_tangle_seen: canonical.min_seen,
            canonical_value,
            rank,
            columns: problem.size,
        };
    }

    let runs: Vec<LocalRun> = (0..=config.restarts)
        .into_par_iter()
        .map(|start| {
            let x0 = if start == 0 {
                zero.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(start as u64);
                problem.random_params(&mut rng)
            };
            problem.local_search(x0, config)
        })
        .collect();

    let mut min_seen = runs.iter().map(|r| r.min_seen).fold(canonical.min_seen, f64::min);
    // Ties resolve to the lowest start index, so the reduction is
    // independent of scheduling.
    let mut best = runs
        .into_iter()
        .reduce(|a, b| if b.sum < a.sum { b } else { a })
        .expect("at least the spectral start");

    // Kicks off the best point escape kinks where members reach zero tangle.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(config.restarts as u64 + 1);
    for _ in 0..POLISH_HOPS {
        let x0 = best
            .params
            .iter()
            .map(|&v| v + POLISH_KICK * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        let run = problem.local_search(x0, config);
        min_seen = min_seen.min(run.min_seen);
        if run.sum < best.sum {
            best = run;
        }
    }
    RoofResult {
        value: best.sum * best.sum,
        best_mixing: best.params,
        restarts_used: config.restarts,
        converged: best.converged,
        min_pure_tangle_seen: min_seen,
        canonical_value,
        rank,
        columns: problem.size,
    }
}

/// Unitary `U` such that the mixture produced by `params` is
/// `U (sqrt(p_1)|psi_1>, ..., sqrt(p_rank)|psi_rank>, 0, ...)^T` for the
/// spectral ensemble. `size` is rank + padding.
pub fn mixing_unitary(params: &[f64], rank: usize, size: usize) -> Result<DMatrix<C64>> {
    let pairs = givens_pairs(size);
    if params.len() != num_mixing_params(rank, size) {
        return input(format!(
            "expected {} mixing parameters for rank {rank}, size {size}; got {}",
            num_mixing_params(rank, size),
            params.len()
        ));
    }
    let mut rows: Vec<C64> = DMatrix::<C64>::identity(size, size).iter().copied().collect();
    apply_mixing(params, &pairs, rank, size, &mut rows);
    // rows is row-major U
    Ok(DMatrix::from_row_slice(size, size, &rows))
}

pub fn num_mixing_params(rank: usize, size: usize) -> usize {
    size * (size - 1) + rank.saturating_sub(1)
}

fn givens_pairs(size: usize) -> Vec<(usize, usize)> {
    (0..size)
        .flat_map(|p| (p + 1..size).map(move |q| (p, q)))
        .collect()
}

/// Applies the column phases, then the Givens rotations in reverse order,
/// to `rows` (row-major, `size` rows).
fn apply_mixing(params: &[f64], pairs: &[(usize, usize)], rank: usize, size: usize, rows: &mut [C64]) {
    for op in 0..num_ops(rank, pairs.len()) {
        apply_op(params, pairs, rank, size, op, rows);
    }
}

fn num_ops(rank: usize, num_pairs: usize) -> usize {
    rank.saturating_sub(1) + num_pairs
}

/// Operation `op` in application order: the first `rank - 1` are column
/// phases, the rest are rotations from the last pair down to the first.
fn apply_op(params: &[f64], pairs: &[(usize, usize)], rank: usize, size: usize, op: usize, rows: &mut [C64]) {
    let width = rows.len() / size;
    let phases = rank.saturating_sub(1);
    if op < phases {
        let j = op + 1;
        let phase = C64::from_polar(1.0, params[2 * pairs.len() + op]);
        rows[j * width..(j + 1) * width].iter_mut().for_each(|z| *z *= phase);
        return;
    }
    let k = pairs.len() - 1 - (op - phases);
    let (p, q) = pairs[k];
    let (theta, phi) = (params[2 * k], params[2 * k + 1]);
    if theta == 0.0 {
        return;
    }
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(s, phi);
    for col in 0..width {
        let xp = rows[p * width + col];
        let xq = rows[q * width + col];
        rows[p * width + col] = xp * c - e * xq;
        rows[q * width + col] = e.conj() * xp + xq * c;
    }
}

/// Parameter indices moved by operation `op`.
fn op_coordinates(op: usize, rank: usize, num_pairs: usize) -> std::ops::Range<usize> {
    let phases = rank.saturating_sub(1);
    if op < phases {
        let i = 2 * num_pairs + op;
        i..i + 1
    } else {
        let k = num_pairs - 1 - (op - phases);
        2 * k..2 * k + 2
    }
}

struct RoofProblem<'a, F: ?Sized> {
    functional: &'a F,
    rows: Vec<C64>,
    rank: usize,
    size: usize,
    dim: usize,
    num_qubits: usize,
    focus: usize,
    pairs: Vec<(usize, usize)>,
}

struct Scratch {
    mixed: Vec<C64>,
    member: Vec<C64>,
}

#[derive(Clone, Copy)]
struct Evaluation {
    sum: f64,
    converged: bool,
    min_seen: f64,
}

struct LocalRun {
    sum: f64,
    params: Vec<f64>,
    converged: bool,
    min_seen: f64,
}

impl<'a, F: PureFunctional + ?Sized> RoofProblem<'a, F> {
    fn new(
        functional: &'a F,
        rows: Vec<C64>,
        rank: usize,
        size: usize,
        dim: usize,
        num_qubits: usize,
        focus: usize,
    ) -> Self {
        Self {
            functional,
            rows,
            rank,
            size,
            dim,
            num_qubits,
            focus,
            pairs: givens_pairs(size),
        }
    }

    fn num_params(&self) -> usize {
        num_mixing_params(self.rank, self.size)
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            mixed: vec![C64::new(0.0, 0.0); self.size * self.dim],
            member: vec![C64::new(0.0, 0.0); self.dim],
        }
    }

    fn random_params(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x: Vec<f64> = Vec::with_capacity(self.num_params());
        for _ in &self.pairs {
            x.push(rng.random_range(0.0..PI));
            x.push(rng.random_range(0.0..TAU));
        }
        for _ in 1..self.rank {
            x.push(rng.random_range(0.0..TAU));
        }
        x
    }

    fn initial_rows(&self) -> Vec<C64> {
        let mut mixed = vec![C64::new(0.0, 0.0); self.size * self.dim];
        mixed[..self.rows.len()].copy_from_slice(&self.rows);
        mixed
    }

    fn evaluate(&self, params: &[f64], scratch: &mut Scratch) -> Evaluation {
        let prefix = self.initial_rows();
        self.evaluate_from(params, &prefix, 0, scratch)
    }

    /// Objective for `params`, given `prefix` holding the rows with the first
    /// `from_op` operations already applied.
    fn evaluate_from(&self, params: &[f64], prefix: &[C64], from_op: usize, scratch: &mut Scratch) -> Evaluation {
        let Scratch { mixed, member } = scratch;
        mixed.copy_from_slice(prefix);
        for op in from_op..num_ops(self.rank, self.pairs.len()) {
            apply_op(params, &self.pairs, self.rank, self.size, op, mixed);
        }
        let mut eval = Evaluation {
            sum: 0.0,
            converged: true,
            min_seen: f64::INFINITY,
        };
        for row in mixed.chunks(self.dim) {
            let p: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            if p < MIN_WEIGHT {
                continue;
            }
            let scale = p.sqrt().recip();
            member.iter_mut().zip(row).for_each(|(m, &z)| *m = z * scale);
            let v = self.functional.evaluate(member, self.num_qubits, self.focus);
            eval.sum += p * v.value.max(0.0).sqrt();
            eval.converged &= v.converged;
            eval.min_seen = eval.min_seen.min(v.value).min(v.min_seen);
        }
        eval
    }

    /// Coordinate descent. Coordinates are visited in the order their
    /// operations are applied, so the rows produced by all earlier
    /// operations can be reused for every trial point of a line search.
    fn local_search(&self, mut x: Vec<f64>, config: &RoofConfig) -> LocalRun {
        let mut scratch = self.scratch();
        let mut current = self.evaluate(&x, &mut scratch);
        let mut min_seen = current.min_seen;
        let mut widths = vec![PI / 2.0; x.len()];
        let mut converged = false;
        let ops = num_ops(self.rank, self.pairs.len());
        let mut prefix = self.initial_rows();
        for _ in 0..config.max_sweeps {
            let before = current.sum * current.sum;
            let start = x.clone();
            prefix.copy_from_slice(&self.initial_rows());
            for op in 0..ops {
                for k in op_coordinates(op, self.rank, self.pairs.len()) {
                    let origin = x[k];
                    let (t, eval) = brent(origin - widths[k], origin + widths[k], origin, current, |t| {
                        x[k] = t;
                        let e = self.evaluate_from(&x, &prefix, op, &mut scratch);
                        min_seen = min_seen.min(e.min_seen);
                        e
                    });
                    if eval.sum < current.sum {
                        x[k] = t;
                        current = eval;
                        widths[k] = (3.0 * (t - origin).abs()).clamp(MIN_WIDTH, PI / 2.0);
                    } else {
                        x[k] = origin;
                        widths[k] = (0.5 * widths[k]).max(MIN_WIDTH);
                    }
                }
                apply_op(&x, &self.pairs, self.rank, self.size, op, &mut prefix);
            }
            // Extrapolate along the net move of the sweep, which tracks
            // valleys that no single coordinate follows.
            let step: Vec<f64> = x.iter().zip(&start).map(|(a, b)| a - b).collect();
            if step.iter().any(|&d| d != 0.0) {
                let base = x.clone();
                let mut trial = x.clone();
                let (t, eval) = brent(-1.0, 3.0, 0.0, current, |t| {
                    trial.iter_mut().zip(base.iter().zip(&step)).for_each(|(y, (b, d))| *y = b + t * d);
                    let e = self.evaluate(&trial, &mut scratch);
                    min_seen = min_seen.min(e.min_seen);
                    e
                });
                if eval.sum < current.sum {
                    x.iter_mut().zip(base.iter().zip(&step)).for_each(|(y, (b, d))| *y = b + t * d);
                    current = eval;
                }
            }
            if before - current.sum * current.sum < config.tol {
                converged = true;
                break;
            }
        }
        LocalRun {
            sum: current.sum,
            params: x,
            converged: converged && current.converged,
            min_seen,
        }
    }
}

/// Brent's minimization of `f` on `[lo, hi]`, started from the interior
/// point `x0` whose value `f0` is already known.
fn brent(
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    f0: Evaluation,
    mut f: impl FnMut(f64) -> Evaluation,
) -> (f64, Evaluation) {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (f0, f0.sum, f0.sum);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        let tol1 = 0.5 * LINE_TOL + 1e-10 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (hi - lo) {
            return (x, fx);
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx.sum - fv);
            let mut q = (x - v) * (fx.sum - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (lo - x) && p < q * (hi - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { lo - x } else { hi - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu.sum <= fx.sum {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx.sum);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu.sum <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu.sum);
            } else if fu.sum <= fv || v == x || v == w {
                (v, fv) = (u, fu.sum);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Bipartite;

    impl PureFunctional for Bipartite {
        fn evaluate(&self, a: &[C64], _n: usize, _focus: usize) -> PureValue {
            PureValue::exact(4.0 * (a[0] * a[3] - a[1] * a[2]).norm_sqr())
        }
    }

    fn diag(values: &[f64]) -> DensityOperator {
        let n = values.len().trailing_zeros() as usize;
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| C64::new(v, 0.0)),
        ));
        DensityOperator::new((1..=n).collect(), m).unwrap()
    }

    #[test]
    fn canonical_ensemble_examples() {
        let pure = StateVector::basis(2, 1).unwrap().density();
        let e = canonical_ensemble(&pure);
        assert_eq!(e.len(), 1);
        assert!((e.members[0].probability - 1.0).abs() < 1e-15);

        let mixed = diag(&[0.5, 0.5]);
        let e = canonical_ensemble(&mixed);
        assert_eq!(e.len(), 2);
        for m in &e.members {
            assert!((m.probability - 0.5).abs() < 1e-15);
        }
        assert!((e.density().matrix() - mixed.matrix()).camax() < 1e-12);
    }

    #[test]
    fn hjw_identity_and_permutation() {
        let rho = diag(&[0.7, 0.0, 0.0, 0.3]);
        let e = canonical_ensemble(&rho);
        let id = DMatrix::<C64>::identity(2, 2);
        assert_eq!(hjw_mix(&e, &id).unwrap(), e);

        let swap = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        );
        let s = hjw_mix(&e, &swap).unwrap();
        assert_eq!(s.members[0], e.members[1]);
        assert_eq!(s.members[1], e.members[0]);
    }

    #[test]
    fn hjw_rejects_bad_mixings() {
        let e = canonical_ensemble(&diag(&[0.5, 0.5]));
        let not_unitary = DMatrix::<C64>::identity(2, 2) * C64::new(2.0, 0.0);
        assert!(hjw_mix(&e, &not_unitary).is_err());
        assert!(hjw_mix(&e, &DMatrix::<C64>::identity(1, 1)).is_err());
    }

    #[test]
    fn mixing_unitary_is_unitary_and_matches_search_mixing() {
        let size = 4;
        let rank = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params: Vec<f64> = (0..num_mixing_params(rank, size))
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        let u = mixing_unitary(&params, rank, size).unwrap();
        let defect = (u.adjoint() * &u - DMatrix::<C64>::identity(size, size)).camax();
        assert!(defect < 1e-13);
        assert!(mixing_unitary(&params[1..], rank, size).is_err());
    }

    #[test]
    fn zero_params_give_identity() {
        let u = mixing_unitary(&vec![0.0; num_mixing_params(3, 5)], 3, 5).unwrap();
        assert!((u - DMatrix::<C64>::identity(5, 5)).camax() < 1e-15);
    }

    #[test]
    fn pure_input_returns_functional_value() {
        let t: f64 = 0.25;
        let s = StateVector::new(
            2,
            vec![C64::new((1.0 - t).sqrt(), 0.0), C64::default(), C64::default(), C64::new(t.sqrt(), 0.0)],
        )
        .unwrap();
        let r = m_tangle_mixed(
            &s.density(),
            1,
            &QubitSubset::new([2]).unwrap(),
            &Bipartite,
            &RoofConfig::default(),
        )
        .unwrap();
        assert!((r.value - 0.75).abs() < 1e-12);
        assert_eq!(r.rank, 1);
        assert!(r.converged);
    }

    #[test]
    fn x_state_matches_concurrence() {
        let h = 0.5;
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                C64::new(h, 0.0), C64::default(), C64::default(), C64::new(0.1, 0.0),
                C64::default(), C64::default(), C64::default(), C64::default(),
                C64::default(), C64::default(), C64::default(), C64::default(),
                C64::new(0.1, 0.0), C64::default(), C64::default(), C64::new(h, 0.0),
            ],
        );
        let rho = DensityOperator::new(vec![1, 2], m).unwrap();
        let config = RoofConfig {
            restarts: 4,
            ..RoofConfig::default()
        };
        let r = m_tangle_mixed(&rho, 1, &QubitSubset::new([2]).unwrap(), &Bipartite, &config).unwrap();
        // concurrence of this X state is max(0, 2*0.1 - 0) = 0.2
        assert!((r.value - 0.04).abs() < 1e-6, "{}", r.value);
        assert!(r.value <= r.canonical_value + 1e-12);
    }

    #[test]
    fn operator_labels_must_match_focus_and_partners() {
        let rho = diag(&[0.5, 0.5, 0.0, 0.0]);
        let cfg = RoofConfig::default();
        assert!(m_tangle_mixed(&rho, 1, &QubitSubset::new([3]).unwrap(), &Bipartite, &cfg).is_err());
        assert!(m_tangle_mixed(&rho, 1, &QubitSubset::new([]).unwrap(), &Bipartite, &cfg).is_err());
        assert!(m_tangle_mixed(&rho, 1, &QubitSubset::new([1, 2]).unwrap(), &Bipartite, &cfg).is_err());
    }

    #[test]
    fn config_json_shape() {
        let cfg: RoofConfig =
            serde_json::from_str(r#"{"seed": 5, "restarts": 3, "padding": 1, "max_sweeps": 10, "tol": 1e-9}"#)
                .unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.padding, 1);
        let partial: RoofConfig = serde_json::from_str(r#"{"seed": 9}"#).unwrap();
        assert_eq!(partial.restarts, 32);
        assert!(serde_json::from_str::<RoofConfig>(r#"{"sed": 9}"#).is_err());
        assert!(RoofConfig { tol: 0.0, ..RoofConfig::default() }.validate().is_err());
    }
}
