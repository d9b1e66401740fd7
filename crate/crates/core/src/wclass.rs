//! Generalized W-class states `a|0...0> + sum_j b_j |0..1_j..0>`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::qstate::{DensityOperator, QubitSubset, StateVector, C64, MAX_QUBITS, NORM_TOL};
use crate::tangle::TangleValue;

/// Coefficients of a generalized W-class state; `b[j - 1]` multiplies the
/// single excitation of qubit `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsFile", into = "ParamsFile")]
pub struct WClassParams {
    a: C64,
    b: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct ParamsFile {
    a: [f64; 2],
    b: Vec<[f64; 2]>,
}

impl TryFrom<ParamsFile> for WClassParams {
    type Error = Error;

    fn try_from(f: ParamsFile) -> Result<Self> {
        WClassParams::new(
            C64::new(f.a[0], f.a[1]),
            f.b.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        )
    }
}

impl From<WClassParams> for ParamsFile {
    fn from(p: WClassParams) -> Self {
        ParamsFile {
            a: [p.a.re, p.a.im],
            b: p.b.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl WClassParams {
    /// Requires `|a|^2 + sum |b_j|^2 = 1` within [`NORM_TOL`].
    pub fn new(a: C64, b: Vec<C64>) -> Result<Self> {
        if b.is_empty() || b.len() > MAX_QUBITS {
            return input(format!("need 1..={MAX_QUBITS} excitation coefficients, got {}", b.len()));
        }
        let norm = a.norm_sqr() + b.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return input(format!("W-class coefficients have squared norm {norm}, expected 1"));
        }
        Ok(Self { a, b })
    }

    /// `a = 0`, `b_j = 1/sqrt(n)`.
    pub fn w_state(n: usize) -> Result<Self> {
        if n == 0 {
            return input("W state needs at least one qubit");
        }
        let b = C64::new((n as f64).recip().sqrt(), 0.0);
        Self::new(C64::new(0.0, 0.0), vec![b; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    /// `b_j` for label `j` (1-based).
    pub fn b_of(&self, label: usize) -> C64 {
        self.b[label - 1]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// The state vector of `params`.
pub fn wclass_state(params: &WClassParams) -> StateVector {
    let n = params.num_qubits();
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[0] = params.a;
    for (k, &b) in params.b.iter().enumerate() {
        amps[1 << (n - 1 - k)] = b;
    }
    StateVector::new(n, amps).expect("normalized parameters give a valid state")
}

/// Random parameters: `(|a|^2, |b_1|^2, ..., |b_n|^2)` uniform on the
/// simplex, independent uniform phases. Deterministic in `seed`.
pub fn wclass_random(n: usize, seed: u64) -> Result<WClassParams> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return input(format!("random W-class states need 2..={MAX_QUBITS} qubits, got {n}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..=n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    let coeffs: Vec<C64> = weights
        .iter()
        .map(|w| C64::from_polar((w / total).sqrt(), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    // Squared norm is 1 up to rounding of the weight sum; renormalize exactly.
    let norm = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut coeffs = coeffs.into_iter().map(|z| z / norm);
    let a = coeffs.next().expect("n + 1 coefficients");
    WClassParams::new(a, coeffs.collect())
}

/// `4 |b_1|^2 sum_{j>=2} |b_j|^2`.
pub fn wclass_one_tangle(params: &WClassParams) -> TangleValue {
    let rest: f64 = params.b[1..].iter().map(|z| z.norm_sqr()).sum();
    TangleValue {
        value: 4.0 * params.b[0].norm_sqr() * rest,
        level: 1,
    }
}

/// `4 |b_1|^2 |b_j|^2` for `2 <= j <= n`.
pub fn wclass_two_tangle(params: &WClassParams, j: usize) -> Result<TangleValue> {
    if j < 2 || j > params.num_qubits() {
        return input(format!("partner label {j} out of range 2..={}", params.num_qubits()));
    }
    Ok(TangleValue {
        value: 4.0 * params.b[0].norm_sqr() * params.b_of(j).norm_sqr(),
        level: 2,
    })
}

/// Reduced state of a W-class state on qubits containing qubit 1, written
/// as `p |x><x| + q |0...0><0...0|` with `|x>` again W-class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WClassReduction {
    pub p: f64,
    pub x_state: StateVector,
    pub q: f64,
    pub labels: QubitSubset,
}

impl WClassReduction {
    pub fn density(&self) -> DensityOperator {
        let x = self.x_state.density();
        let mut m = x.matrix() * C64::new(self.p, 0.0);
        m[(0, 0)] += C64::new(self.q, 0.0);
        DensityOperator::from_parts(self.labels.labels().to_vec(), m)
    }
}

/// Mixture form of the reduction of `params` onto `keep`.
pub fn wclass_reduction(params: &WClassParams, keep: &QubitSubset) -> Result<WClassReduction> {
    let n = params.num_qubits();
    keep.check_within(n)?;
    if !keep.contains(1) {
        return Err(Error::Unsupported(format!(
            "reductions must keep qubit 1, got {:?}",
            keep.labels()
        )));
    }
    if keep.len() < 2 || keep.len() + 1 > n {
        return input(format!(
            "reduction must keep between 2 and {} qubits, got {}",
            n.saturating_sub(1),
            keep.len()
        ));
    }
    let k = keep.len();
    let mut x = vec![C64::new(0.0, 0.0); 1 << k];
    x[0] = params.a;
    for (slot, &label) in keep.labels().iter().enumerate() {
        x[1 << (k - 1 - slot)] = params.b_of(label);
    }
    let q: f64 = (1..=n)
        .filter(|l| !keep.contains(*l))
        .map(|l| params.b_of(l).norm_sqr())
        .sum();
    let p: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    let x_state = if p > 0.0 {
        StateVector::new(k, x)?
    } else {
        StateVector::basis(k, 0)?
    };
    Ok(WClassReduction {
        p,
        x_state,
        q,
        labels: keep.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangle::{one_tangle, two_tangle};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn w_state_construction() {
        let s = wclass_state(&WClassParams::w_state(3).unwrap());
        let v = 1.0 / 3f64.sqrt();
        for (i, z) in s.amplitudes().iter().enumerate() {
            let expect = if [1, 2, 4].contains(&i) { v } else { 0.0 };
            assert!((z.re - expect).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn two_qubit_substitution() {
        let p = WClassParams::new(c(0.5f64.sqrt()), vec![c(0.5), c(0.5)]).unwrap();
        let s = wclass_state(&p);
        assert_eq!(s.amplitudes()[0], c(0.5f64.sqrt()));
        assert_eq!(s.amplitudes()[2], c(0.5)); // |10>
        assert_eq!(s.amplitudes()[1], c(0.5)); // |01>
        assert_eq!(s.amplitudes()[3], c(0.0));
    }

    #[test]
    fn only_first_excitation_is_product() {
        let p = WClassParams::new(c(0.8), vec![c(0.6), c(0.0), c(0.0)]).unwrap();
        assert!(one_tangle(&wclass_state(&p), 1).unwrap().value < 1e-30);
        assert_eq!(wclass_one_tangle(&p).value, 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(WClassParams::new(c(0.9), vec![c(0.1)]).is_err());
        assert!(WClassParams::new(c(1.0), vec![]).is_err());
        assert!(WClassParams::from_json(r#"{"a":[0.6,0],"b":[[0,0.8]]}"#).is_ok());
        assert!(WClassParams::from_json(r#"{"a":[0.6,0],"b":[[0,0.7]]}"#).is_err());
    }

    #[test]
    fn random_params() {
        assert_eq!(wclass_random(3, 42).unwrap(), wclass_random(3, 42).unwrap());
        assert_ne!(wclass_random(3, 42).unwrap(), wclass_random(3, 43).unwrap());
        let p = wclass_random(4, 5).unwrap();
        let norm = p.a().norm_sqr() + p.b().iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(wclass_random(1, 0).is_err());
    }

    #[test]
    fn random_params_uniform_on_simplex() {
        let mean = (0..10_000u64)
            .map(|s| wclass_random(3, s).unwrap().a().norm_sqr())
            .sum::<f64>()
            / 10_000.0;
        assert!((mean - 0.25).abs() < 0.02, "mean |a|^2 = {mean}");
    }

    #[test]
    fn closed_form_tangles() {
        let w3 = WClassParams::w_state(3).unwrap();
        let w4 = WClassParams::w_state(4).unwrap();
        assert!((wclass_one_tangle(&w3).value - 8.0 / 9.0).abs() < 1e-15);
        assert!((wclass_one_tangle(&w4).value - 0.75).abs() < 1e-15);
        assert!((wclass_two_tangle(&w3, 2).unwrap().value - 4.0 / 9.0).abs() < 1e-15);
        assert!((wclass_two_tangle(&w4, 3).unwrap().value - 0.25).abs() < 1e-15);
        let no_b1 = WClassParams::new(c(0.6), vec![c(0.0), c(0.8)]).unwrap();
        assert_eq!(wclass_one_tangle(&no_b1).value, 0.0);
        let no_b2 = WClassParams::new(c(0.6), vec![c(0.8), c(0.0)]).unwrap();
        assert_eq!(wclass_two_tangle(&no_b2, 2).unwrap().value, 0.0);
        assert!(wclass_two_tangle(&w3, 1).is_err());
        assert!(wclass_two_tangle(&w3, 4).is_err());
    }

    #[test]
    fn closed_forms_match_numerics() {
        let p = wclass_random(5, 9).unwrap();
        let s = wclass_state(&p);
        assert!((wclass_one_tangle(&p).value - one_tangle(&s, 1).unwrap().value).abs() < 1e-10);
        for j in 2..=5 {
            let rho = s.reduce(&QubitSubset::new([1, j]).unwrap()).unwrap();
            let numeric = two_tangle(&rho).unwrap().value;
            assert!((wclass_two_tangle(&p, j).unwrap().value - numeric).abs() < 1e-9);
        }
    }

    #[test]
    fn reduction_examples() {
        let w3 = WClassParams::w_state(3).unwrap();
        let keep = QubitSubset::new([1, 2]).unwrap();
        let r = wclass_reduction(&w3, &keep).unwrap();
        assert!((r.p - 2.0 / 3.0).abs() < 1e-15 && (r.q - 1.0 / 3.0).abs() < 1e-15);
        let exact = wclass_state(&w3).reduce(&keep).unwrap();
        assert!((r.density().matrix() - exact.matrix()).camax() < 1e-9);
        let (eigs, _) = exact.eigen();
        assert!(eigs[2].abs() < 1e-10);

        let prod = WClassParams::new(c(0.6), vec![c(0.8), c(0.0), c(0.0)]).unwrap();
        let r = wclass_reduction(&prod, &QubitSubset::new([1, 2]).unwrap()).unwrap();
        assert_eq!(r.q, 0.0);
        assert!((r.p - 1.0).abs() < 1e-15);

        let p5 = wclass_random(5, 77).unwrap();
        let keep = QubitSubset::new([1, 3, 4]).unwrap();
        let r = wclass_reduction(&p5, &keep).unwrap();
        let exact = wclass_state(&p5).reduce(&keep).unwrap();
        assert!((r.density().matrix() - exact.matrix()).camax() < 1e-9);
        assert!((r.p + r.q - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reduction_errors() {
        let w4 = WClassParams::w_state(4).unwrap();
        assert!(matches!(
            wclass_reduction(&w4, &QubitSubset::new([2, 3]).unwrap()),
            Err(Error::Unsupported(_))
        ));
        assert!(wclass_reduction(&w4, &QubitSubset::new([1]).unwrap()).is_err());
        assert!(wclass_reduction(&w4, &QubitSubset::full(4)).is_err());
        assert!(wclass_reduction(&w4, &QubitSubset::new([1, 5]).unwrap()).is_err());
    }
}
