//! CKW and strong-monogamy residuals assembled from the tangle hierarchy.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::qstate::{QubitSubset, StateVector};
use crate::roof::RoofResult;
use crate::tangle::{hierarchy, one_tangle, pair_tangle_amps, Hierarchy, NTangle, NEGATIVE_CLAMP};
use crate::wclass::{wclass_one_tangle, wclass_state, wclass_two_tangle, WClassParams};

/// Default qubit cap for full strong-monogamy evaluation.
pub const DEFAULT_MAX_QUBITS: usize = 7;

/// Verdict tolerances: closed-form terms versus roof-dependent terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub closed: f64,
    pub roof: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closed: 1e-9,
            roof: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyConfig {
    pub tangle: NTangle,
    pub tolerances: Tolerances,
    pub max_qubits: usize,
}

impl Default for MonogamyConfig {
    fn default() -> Self {
        Self {
            tangle: NTangle::default(),
            tolerances: Tolerances::default(),
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

/// Roof search summary attached to an m >= 3 term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofDiagnostics {
    pub converged: bool,
    pub restarts_used: usize,
    pub min_pure_tangle_seen: Option<f64>,
    pub canonical_value: f64,
    pub rank: usize,
    pub columns: usize,
}

impl From<&RoofResult> for RoofDiagnostics {
    fn from(r: &RoofResult) -> Self {
        Self {
            converged: r.converged,
            restarts_used: r.restarts_used,
            min_pure_tangle_seen: r.min_pure_tangle_seen.is_finite().then_some(r.min_pure_tangle_seen),
            canonical_value: r.canonical_value,
            rank: r.rank,
            columns: r.columns,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyTerm {
    pub partners: Vec<usize>,
    pub m: usize,
    pub value: f64,
    /// `value^(m/2)` after clamping.
    pub pow: f64,
    /// Number of partner orderings this subset stands for.
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub roof: Option<RoofDiagnostics>,
}

/// Outcome of the W-class saturation assertions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationVerdict {
    pub saturated: bool,
    pub max_roof_term: f64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyReport {
    pub focus: usize,
    pub num_qubits: usize,
    pub one_tangle: f64,
    pub terms: Vec<MonogamyTerm>,
    pub ckw_residual: f64,
    pub sm_residual: f64,
    pub saturated_ckw: bool,
    pub saturated_sm: bool,
    /// `sm_residual` below minus the applicable tolerance.
    pub sm_violation_candidate: bool,
    /// Every roof search met its improvement tolerance.
    pub converged: bool,
    pub min_pure_tangle_seen: Option<f64>,
    /// A nested pure tangle below `-1e-9` was met (and clamped).
    pub negative_pure_tangle: bool,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub saturation: Option<SaturationVerdict>,
}

impl MonogamyReport {
    fn from_hierarchy(focus: usize, num_qubits: usize, h: Hierarchy, tolerances: Tolerances) -> Self {
        let terms: Vec<MonogamyTerm> = h
            .terms
            .iter()
            .map(|t| MonogamyTerm {
                partners: t.partners.iter().map(|p| p + 1).collect(),
                m: t.level,
                value: t.value,
                pow: t.pow,
                multiplicity: t.multiplicity,
                roof: t.roof.as_ref().map(RoofDiagnostics::from),
            })
            .collect();
        let min_seen = h.min_seen();
        let mut report = Self {
            focus,
            num_qubits,
            one_tangle: h.one_tangle,
            terms,
            ckw_residual: 0.0,
            sm_residual: 0.0,
            saturated_ckw: false,
            saturated_sm: false,
            sm_violation_candidate: false,
            converged: h.converged(),
            min_pure_tangle_seen: min_seen.is_finite().then_some(min_seen),
            negative_pure_tangle: min_seen < -NEGATIVE_CLAMP,
            tolerances,
            saturation: None,
        };
        report.ckw_residual = report.recompute_ckw();
        report.sm_residual = report.recompute_sm();
        let sm_tol = report.sm_tolerance();
        report.saturated_ckw = report.ckw_residual.abs() <= tolerances.closed;
        report.saturated_sm = report.sm_residual.abs() <= sm_tol;
        report.sm_violation_candidate = report.sm_residual < -sm_tol;
        report
    }

    /// One-tangle minus the two-tangles, from the stored terms.
    pub fn recompute_ckw(&self) -> f64 {
        self.one_tangle - self.terms.iter().filter(|t| t.m == 2).map(|t| t.value).sum::<f64>()
    }

    /// One-tangle minus every weighted `value^(m/2)`, from the stored terms.
    pub fn recompute_sm(&self) -> f64 {
        self.one_tangle
            - self
                .terms
                .iter()
                .map(|t| t.multiplicity as f64 * t.pow)
                .sum::<f64>()
    }

    /// Roof terms exist when `n >= 4`; their verdicts use the looser
    /// tolerance.
    pub fn sm_tolerance(&self) -> f64 {
        if self.terms.iter().any(|t| t.m >= 3) {
            self.tolerances.roof
        } else {
            self.tolerances.closed
        }
    }

    /// Largest m >= 3 term value, 0 when there are none.
    pub fn max_roof_term(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.m >= 3)
            .map(|t| t.value)
            .fold(0.0, f64::max)
    }
}

/// Per-partner two-tangles with their CKW residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CkwReport {
    pub focus: usize,
    pub num_qubits: usize,
    pub one_tangle: f64,
    pub two_tangles: Vec<PairTangle>,
    pub ckw_residual: f64,
    pub saturated_ckw: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTangle {
    pub partner: usize,
    pub value: f64,
}

/// `tau(focus | rest) - sum_j tau(rho_{focus, j})` with closed-form
/// two-tangles.
pub fn ckw_residual(state: &StateVector, focus: usize) -> Result<f64> {
    Ok(ckw_report(state, focus, Tolerances::default())?.ckw_residual)
}

pub fn ckw_report(state: &StateVector, focus: usize, tolerances: Tolerances) -> Result<CkwReport> {
    let n = state.num_qubits();
    if n < 2 {
        return input("CKW residual needs at least two qubits");
    }
    let one = one_tangle(state, focus)?.value;
    let two_tangles: Vec<PairTangle> = (1..=n)
        .filter(|&j| j != focus)
        .map(|j| {
            let mut pos = [focus - 1, j - 1];
            pos.sort_unstable();
            PairTangle {
                partner: j,
                value: pair_tangle_amps(state.amplitudes(), n, pos),
            }
        })
        .collect();
    let residual = one - two_tangles.iter().map(|t| t.value).sum::<f64>();
    Ok(CkwReport {
        focus,
        num_qubits: n,
        one_tangle: one,
        two_tangles,
        ckw_residual: residual,
        saturated_ckw: residual.abs() <= tolerances.closed,
    })
}

fn check_sm_input(state: &StateVector, focus: usize, config: &MonogamyConfig) -> Result<()> {
    state.check_label(focus)?;
    config.tangle.roof.validate()?;
    let n = state.num_qubits();
    if n < 3 {
        return input(format!("strong monogamy needs at least 3 qubits, got {n}"));
    }
    if n > config.max_qubits {
        return input(format!(
            "{n} qubits exceeds the strong-monogamy cap of {}",
            config.max_qubits
        ));
    }
    Ok(())
}

/// Full strong-monogamy report for hub `focus`: two-tangles in closed form,
/// every m >= 3 term by convex roof.
pub fn sm_residual(state: &StateVector, focus: usize, config: &MonogamyConfig) -> Result<MonogamyReport> {
    check_sm_input(state, focus, config)?;
    let n = state.num_qubits();
    let h = hierarchy(state.amplitudes(), n, focus - 1, &config.tangle, true);
    Ok(MonogamyReport::from_hierarchy(focus, n, h, config.tolerances))
}

/// [`sm_residual`] for every choice of hub.
pub fn sm_sweep(state: &StateVector, config: &MonogamyConfig) -> Result<Vec<MonogamyReport>> {
    (1..=state.num_qubits())
        .map(|focus| sm_residual(state, focus, config))
        .collect()
}

/// Builds the W-class state, evaluates strong monogamy with hub 1 and
/// checks that every m >= 3 term and the residual vanish.
pub fn verify_saturation(params: &WClassParams, config: &MonogamyConfig) -> Result<MonogamyReport> {
    let state = wclass_state(params);
    let mut report = sm_residual(&state, 1, config)?;
    let tol = config.tolerances;
    let mut failures = Vec::new();

    let closed_one = wclass_one_tangle(params).value;
    if (closed_one - report.one_tangle).abs() > tol.closed {
        failures.push(format!(
            "one-tangle {:e} differs from closed form {closed_one:e}",
            report.one_tangle
        ));
    }
    for t in report.terms.iter().filter(|t| t.m == 2) {
        let closed = wclass_two_tangle(params, t.partners[0])?.value;
        if (closed - t.value).abs() > tol.closed {
            failures.push(format!(
                "two-tangle with qubit {} is {:e}, closed form {closed:e}",
                t.partners[0], t.value
            ));
        }
    }
    for t in report.terms.iter().filter(|t| t.m >= 3) {
        if t.value > tol.roof {
            failures.push(format!("{}-tangle on {:?} is {:e}", t.m, t.partners, t.value));
        }
    }
    if report.sm_residual.abs() > report.sm_tolerance() {
        failures.push(format!("residual {:e} exceeds tolerance", report.sm_residual));
    }
    report.saturation = Some(SaturationVerdict {
        saturated: failures.is_empty(),
        max_roof_term: report.max_roof_term(),
        failures,
    });
    Ok(report)
}

/// The label set `{1..=n} \ {focus}` used as partners of a full n-tangle.
pub fn all_partners(n: usize, focus: usize) -> QubitSubset {
    QubitSubset::new((1..=n).filter(|&l| l != focus)).expect("distinct labels")
}
