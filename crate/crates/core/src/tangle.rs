//! Tangle functionals: one-tangle, two-qubit concurrence and tangle, and
//! the recursive n-tangle with convex-roof mixed-state terms.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::qstate::{
    amplitude_factor, hermitian_eigen, reduce_amplitudes, DensityOperator, QubitSubset, StateVector, C64,
};
use crate::roof::{roof_minimize, PureFunctional, PureValue, RoofConfig, RoofResult};

/// Spectral weights below this are zero when factoring a two-qubit operator.
pub const SPECTRAL_FLOOR: f64 = 1e-14;

/// Mixed-state tangle values at or above `-NEGATIVE_CLAMP` are clamped to 0
/// before exponentiation.
pub const NEGATIVE_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangleValue {
    pub value: f64,
    pub level: usize,
}

/// Hub qubit plus the increasing list of partner labels of an m-tangle term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexVector {
    pub focus: usize,
    pub partners: Vec<usize>,
}

impl IndexVector {
    pub fn level(&self) -> usize {
        self.partners.len() + 1
    }
}

/// How partner subsets of the recursive n-tangle are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum IndexOrdering {
    /// Each subset once.
    #[default]
    Combinations,
    /// Each subset weighted by the (m-1)! orderings of its partners.
    Permutations,
}

impl IndexOrdering {
    pub fn multiplicity(self, level: usize) -> usize {
        match self {
            Self::Combinations => 1,
            Self::Permutations => (1..level).product(),
        }
    }
}

/// `4 det rho_focus` for a pure state.
pub fn one_tangle(state: &StateVector, focus: usize) -> Result<TangleValue> {
    state.check_label(focus)?;
    Ok(TangleValue {
        value: one_tangle_amps(state.amplitudes(), state.num_qubits(), focus - 1),
        level: 1,
    })
}

/// Bipartite tangle of a pure state between `focus` and the rest. The leaf
/// functional of the roof search.
pub fn pure_tangle_bipartite(state: &StateVector, focus: usize) -> Result<TangleValue> {
    let t = one_tangle(state, focus)?;
    Ok(TangleValue {
        value: t.value,
        level: 2.min(state.num_qubits()),
    })
}

/// Wootters concurrence of a two-qubit operator.
pub fn concurrence_2q(rho: &DensityOperator) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return input(format!(
            "concurrence needs a two-qubit operator, got {} qubits",
            rho.num_qubits()
        ));
    }
    Ok(concurrence_from_factor(&spectral_factor(rho.matrix())))
}

/// Two-qubit tangle, the square of the concurrence.
pub fn two_tangle(rho: &DensityOperator) -> Result<TangleValue> {
    let c = concurrence_2q(rho)?;
    Ok(TangleValue {
        value: c * c,
        level: 2,
    })
}

/// `det rho_A` of the focus qubit, written as the Lagrange sum
/// `sum_{x<y} |u_x v_y - u_y v_x|^2` over the focus-0 and focus-1 branches.
/// Every term is nonnegative, so tiny tangles keep their relative accuracy.
pub(crate) fn one_tangle_amps(amps: &[C64], n: usize, focus: usize) -> f64 {
    let bit = 1usize << (n - 1 - focus);
    let branch = |b: usize| {
        (0..amps.len())
            .filter(move |i| (i & bit == 0) == (b == 0))
            .map(move |i| amps[i])
    };
    let d = amps.len() / 2;
    if d > 64 {
        let (mut uu, mut vv, mut uv) = (0.0, 0.0, C64::new(0.0, 0.0));
        for (u, v) in branch(0).zip(branch(1)) {
            uu += u.norm_sqr();
            vv += v.norm_sqr();
            uv += u.conj() * v;
        }
        return (4.0 * (uu * vv - uv.norm_sqr())).max(0.0);
    }
    let mut u = [C64::new(0.0, 0.0); 64];
    let mut v = [C64::new(0.0, 0.0); 64];
    for (k, (a, b)) in branch(0).zip(branch(1)).enumerate() {
        u[k] = a;
        v[k] = b;
    }
    let mut det = 0.0;
    for x in 0..d {
        for y in x + 1..d {
            det += (u[x] * v[y] - u[y] * v[x]).norm_sqr();
        }
    }
    4.0 * det
}

/// `W` with `W W^dagger = rho`, built from eigenvectors whose eigenvalues
/// exceed [`SPECTRAL_FLOOR`].
fn spectral_factor(rho: &DMatrix<C64>) -> DMatrix<C64> {
    let (eigs, vecs) = hermitian_eigen(rho);
    let kept: Vec<usize> = (0..eigs.len()).filter(|&k| eigs[k] > SPECTRAL_FLOOR).collect();
    DMatrix::from_fn(rho.nrows(), kept.len(), |r, c| {
        vecs[(r, kept[c])] * eigs[kept[c]].sqrt()
    })
}

/// Concurrence from any factor `W` (4 x k) of a two-qubit operator
/// `rho = W W^dagger`.
///
/// The decreasing square roots of the spectrum of `rho (Y rho^* Y)`, with
/// `Y = sigma_y (x) sigma_y`, are the singular values of the symmetric
/// matrix `W^T Y W`, so no square roots of near-zero eigenvalues are taken.
fn concurrence_from_factor(w: &DMatrix<C64>) -> f64 {
    // W^T Y W only depends on W W^dagger; compress wide factors to 4 columns.
    let w = if w.ncols() > 4 {
        w.adjoint().qr().r().adjoint()
    } else {
        w.clone()
    };
    let k = w.ncols();
    if k == 0 {
        return 0.0;
    }
    // Rows of Y W: Y maps |00>,|01>,|10>,|11> to -|11>,|10>,|01>,-|00>.
    let yw = DMatrix::from_fn(4, k, |r, c| match r {
        0 => -w[(3, c)],
        1 => w[(2, c)],
        2 => w[(1, c)],
        _ => -w[(0, c)],
    });
    let a = w.transpose() * yw;
    match k {
        1 => a[(0, 0)].norm(),
        2 => {
            // (s1 - s2)^2 = |A|_F^2 - 2 |det A|
            let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let det = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).norm();
            (frob - 2.0 * det).max(0.0).sqrt()
        }
        _ => {
            let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
            s.sort_by(|x, y| y.total_cmp(x));
            (s[0] - s[1..].iter().sum::<f64>()).max(0.0)
        }
    }
}

/// Two-tangle of the reduction of a pure state onto two positions.
pub(crate) fn pair_tangle_amps(amps: &[C64], n: usize, positions: [usize; 2]) -> f64 {
    let c = concurrence_from_factor(&amplitude_factor(amps, n, &positions));
    c * c
}

/// The leaf functional `4 det rho_focus`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BipartiteTangle;

impl PureFunctional for BipartiteTangle {
    fn evaluate(&self, amplitudes: &[C64], num_qubits: usize, focus: usize) -> PureValue {
        PureValue::exact(one_tangle_amps(amplitudes, num_qubits, focus))
    }
}

/// Recursive pure-state n-tangle: the one-tangle minus every lower-level
/// mixed tangle of the hub with each partner subset, raised to `m/2`.
/// Two-qubit terms use the concurrence; higher terms are convex roofs of
/// this same functional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NTangle {
    pub roof: RoofConfig,
    pub ordering: IndexOrdering,
}

impl NTangle {
    pub fn new(roof: RoofConfig) -> Self {
        Self {
            roof,
            ordering: IndexOrdering::default(),
        }
    }
}

impl PureFunctional for NTangle {
    fn evaluate(&self, amplitudes: &[C64], num_qubits: usize, focus: usize) -> PureValue {
        let h = hierarchy(amplitudes, num_qubits, focus, self, false);
        PureValue {
            value: h.residual(),
            converged: h.converged(),
            min_seen: h.min_seen(),
        }
    }
}

/// One mixed-state term of the hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Term {
    /// 0-based positions of the partners in the parent register.
    pub partners: Vec<usize>,
    pub level: usize,
    pub value: f64,
    pub pow: f64,
    pub multiplicity: usize,
    pub roof: Option<RoofResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Hierarchy {
    pub one_tangle: f64,
    pub terms: Vec<Term>,
}

impl Hierarchy {
    pub fn residual(&self) -> f64 {
        self.one_tangle
            - self
                .terms
                .iter()
                .map(|t| t.multiplicity as f64 * t.pow)
                .sum::<f64>()
    }

    pub fn converged(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.roof.as_ref().is_none_or(|r| r.converged))
    }

    pub fn min_seen(&self) -> f64 {
        self.terms
            .iter()
            .filter_map(|t| t.roof.as_ref())
            .map(|r| r.min_pure_tangle_seen)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Exponentiates a mixed-state tangle after clamping small negatives.
pub(crate) fn clamped_pow(value: f64, level: usize) -> f64 {
    let v = if value >= -NEGATIVE_CLAMP { value.max(0.0) } else { 0.0 };
    v.powf(level as f64 / 2.0)
}

/// Every mixed-state term of the n-tangle of a pure state, in order of
/// level and then of increasing partner positions.
pub(crate) fn hierarchy(amps: &[C64], n: usize, focus: usize, functional: &NTangle, parallel: bool) -> Hierarchy {
    let others: Vec<usize> = (0..n).filter(|&p| p != focus).collect();
    let jobs: Vec<(usize, Vec<usize>)> = (2..n)
        .flat_map(|m| combinations(&others, m - 1).into_iter().map(move |c| (m, c)))
        .collect();
    let term = |(m, partners): &(usize, Vec<usize>)| -> Term {
        let mut keep = partners.clone();
        keep.push(focus);
        keep.sort_unstable();
        let (value, roof) = if *m == 2 {
            (pair_tangle_amps(amps, n, [keep[0], keep[1]]), None)
        } else {
            let rho = reduce_amplitudes(amps, n, &keep);
            let local_focus = keep.iter().position(|&p| p == focus).expect("focus kept");
            let r = roof_minimize(&rho, local_focus, functional, &functional.roof);
            (r.value, Some(r))
        };
        Term {
            partners: partners.clone(),
            level: *m,
            value,
            pow: clamped_pow(value, *m),
            multiplicity: functional.ordering.multiplicity(*m),
            roof,
        }
    };
    let terms = if parallel {
        jobs.par_iter().map(term).collect()
    } else {
        jobs.iter().map(term).collect()
    };
    Hierarchy {
        one_tangle: one_tangle_amps(amps, n, focus),
        terms,
    }
}

/// All size-`k` subsets of `items`, each in increasing order, listed
/// lexicographically.
pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Index vectors of level `m` (hub plus `m - 1` partners) for an `n`-qubit
/// register, partners in increasing order.
pub fn enumerate_index_vectors(n: usize, focus: usize, m: usize) -> Result<Vec<IndexVector>> {
    if focus == 0 || focus > n {
        return input(format!("focus {focus} out of range for {n} qubits"));
    }
    if m < 2 || m + 1 > n {
        return input(format!("level {m} out of range 2..={} for {n} qubits", n.saturating_sub(1)));
    }
    let others: Vec<usize> = (1..=n).filter(|&l| l != focus).collect();
    Ok(combinations(&others, m - 1)
        .into_iter()
        .map(|partners| IndexVector { focus, partners })
        .collect())
}

/// Outcome of a pure-state n-tangle evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NTangleOutcome {
    pub tangle: TangleValue,
    /// False when any nested roof stopped on its sweep budget.
    pub converged: bool,
    /// Smallest raw pure tangle met inside the nested roofs, if any.
    pub min_pure_tangle_seen: Option<f64>,
}

/// n-tangle of a pure state with hub `focus`; `partners` must be every
/// other qubit of the state.
pub fn n_tangle_pure(
    state: &StateVector,
    focus: usize,
    partners: &QubitSubset,
    functional: &NTangle,
) -> Result<NTangleOutcome> {
    state.check_label(focus)?;
    functional.roof.validate()?;
    let n = state.num_qubits();
    let expected: Vec<usize> = (1..=n).filter(|&l| l != focus).collect();
    if partners.is_empty() || partners.labels() != expected.as_slice() {
        return input(format!(
            "partners {:?} must be all qubits other than the focus, i.e. {expected:?}",
            partners.labels()
        ));
    }
    let v = functional.evaluate(state.amplitudes(), n, focus - 1);
    Ok(NTangleOutcome {
        tangle: TangleValue { value: v.value, level: n },
        converged: v.converged,
        min_pure_tangle_seen: v.min_seen.is_finite().then_some(v.min_seen),
    })
}
