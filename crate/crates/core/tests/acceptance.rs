//! Acceptance checks, run sequentially so the timed ones are measured on
//! an otherwise idle process. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{c, ghz, oracle};
use monotangle::monogamy::{ckw_report, sm_residual, verify_saturation};
use monotangle::random::{haar_state_seeded, haar_unitary, random_density};
use monotangle::roof::{canonical_ensemble, hjw_mix, m_tangle_mixed};
use monotangle::tangle::{n_tangle_pure, one_tangle, two_tangle, BipartiteTangle};
use monotangle::wclass::{wclass_random, wclass_reduction, wclass_state, wclass_two_tangle};
use monotangle::{MonogamyConfig, MonogamyReport, NTangle, QubitSubset, RoofConfig, RoofResult, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }
}

/// Residual pairs `(sm, ckw)` of every state evaluated in criteria 1 and 6.
type Chain = Vec<(String, f64, f64)>;

fn wclass_seed(n: usize, k: usize) -> u64 {
    (1000 * n + k) as u64
}

fn criterion_1(chain: &mut Chain) -> (Outcome, String) {
    let mut out = Outcome::new();
    let config = MonogamyConfig::default();
    let (mut max_res, mut max_term) = (0.0f64, 0.0f64);
    let mut reports: Vec<MonogamyReport> = Vec::new();
    for n in 3..=6 {
        for k in 0..100 {
            let params = wclass_random(n, wclass_seed(n, k)).unwrap();
            let r = verify_saturation(&params, &config).unwrap();
            max_res = max_res.max(r.sm_residual.abs());
            max_term = max_term.max(r.max_roof_term());
            out.check(r.sm_residual.abs() <= 1e-6, || format!("n={n} k={k}: sm_residual {:e}", r.sm_residual));
            for t in r.terms.iter().filter(|t| t.m >= 3) {
                out.check(t.value <= 1e-6, || format!("n={n} k={k}: {}-term {:?} = {:e}", t.m, t.partners, t.value));
            }
            out.check(r.saturation.as_ref().is_some_and(|s| s.saturated), || {
                format!("n={n} k={k}: {:?}", r.saturation.as_ref().map(|s| &s.failures))
            });
            chain.push((format!("wclass n={n} k={k}"), r.sm_residual, r.ckw_residual));
            reports.push(r);
        }
    }
    out.detail = format!("400 states, max |sm_residual| {max_res:.2e}, max m>=3 term {max_term:.2e}");
    (out, serde_json::to_string(&reports).unwrap())
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let (mut worst_sum, mut worst_pair) = (0.0f64, 0.0f64);
    for n in 3..=6 {
        for k in 0..500 {
            let params = wclass_random(n, 50_000 + wclass_seed(n, k)).unwrap();
            let state = wclass_state(&params);
            let b1 = params.b_of(1).norm_sqr();
            let one = one_tangle(&state, 1).unwrap().value;
            let mut sum = 0.0;
            for j in 2..=n {
                let closed = 4.0 * b1 * params.b_of(j).norm_sqr();
                let library_closed = wclass_two_tangle(&params, j).unwrap().value;
                let numeric = two_tangle(&state.reduce(&QubitSubset::new([1, j]).unwrap()).unwrap())
                    .unwrap()
                    .value;
                let err = (closed - numeric).abs().max((closed - library_closed).abs());
                worst_pair = worst_pair.max(err);
                out.check(err <= 1e-9, || format!("n={n} k={k} j={j}: closed {closed} numeric {numeric}"));
                sum += closed;
            }
            let err = (one - sum).abs();
            worst_sum = worst_sum.max(err);
            out.check(err <= 1e-10, || format!("n={n} k={k}: one-tangle {one} vs sum {sum}"));
        }
    }
    out.detail = format!(
        "2000 states, max |one-tangle - sum| {worst_sum:.2e}, max two-tangle mismatch {worst_pair:.2e}"
    );
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_eig, mut worst_rec) = (0.0f64, 0.0f64);
    for k in 0..200 {
        let n = rng.random_range(3..=6);
        let params = wclass_random(n, 70_000 + k).unwrap();
        let size = rng.random_range(2..n);
        let mut others: Vec<usize> = (2..=n).collect();
        rand::seq::SliceRandom::shuffle(others.as_mut_slice(), &mut rng);
        let keep = QubitSubset::new(std::iter::once(1).chain(others.into_iter().take(size - 1))).unwrap();
        let red = wclass_reduction(&params, &keep).unwrap();
        let direct = wclass_state(&params).reduce(&keep).unwrap();
        let (eigs, _) = direct.eigen();
        let third = eigs.get(2).copied().unwrap_or(0.0).abs();
        let rec = (red.density().matrix() - direct.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst_eig = worst_eig.max(third);
        worst_rec = worst_rec.max(rec);
        out.check(third <= 1e-10, || format!("k={k} keep={:?}: third eigenvalue {third:e}", keep.labels()));
        out.check(rec <= 1e-9, || format!("k={k} keep={:?}: reconstruction error {rec:e}", keep.labels()));
        out.check((red.p + red.q - 1.0).abs() <= 1e-12, || format!("k={k}: p + q = {}", red.p + red.q));
    }
    out.detail = format!("200 reductions, max third eigenvalue {worst_eig:.2e}, max reconstruction error {worst_rec:.2e}");
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    let config = MonogamyConfig::default();
    let mut worst = 0.0f64;
    for k in 0..50 {
        let params = wclass_random(5, 90_000 + k).unwrap();
        let r = sm_residual(&wclass_state(&params), 1, &config).unwrap();
        let three = r.terms.iter().filter(|t| t.m == 3).count();
        let four = r.terms.iter().filter(|t| t.m == 4).count();
        out.check(three == 6 && four == 4, || format!("k={k}: {three} three-qubit and {four} four-qubit terms"));
        for t in r.terms.iter().filter(|t| t.m >= 3) {
            worst = worst.max(t.value);
            out.check(t.value <= 1e-6, || format!("k={k}: {}-term {:?} = {:e}", t.m, t.partners, t.value));
        }
    }
    out.detail = format!("50 states x 10 roof terms, max term {worst:.2e}");
    out
}

fn criterion_5_run(threads: usize) -> (Vec<RoofResult>, Vec<f64>, Duration) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let partners = QubitSubset::new([2]).unwrap();
    let config = RoofConfig::default();
    let mut results = Vec::new();
    let mut oracles = Vec::new();
    let start = Instant::now();
    for _ in 0..200 {
        let rank = rng.random_range(1..=4);
        let rho = random_density(2, rank, &mut rng).unwrap();
        results.push(pool.install(|| m_tangle_mixed(&rho, 1, &partners, &BipartiteTangle, &config).unwrap()));
        oracles.push(oracle::wootters_concurrence(&rho).powi(2));
    }
    (results, oracles, start.elapsed())
}

fn criterion_5(threads: usize) -> (Outcome, String) {
    let mut out = Outcome::new();
    let (results, oracles, elapsed) = criterion_5_run(threads);
    let mut worst = 0.0f64;
    for (k, (r, expected)) in results.iter().zip(&oracles).enumerate() {
        let err = (r.value - expected).abs();
        worst = worst.max(err);
        out.check(err <= 1e-4, || format!("state {k} (rank {}): roof {} vs {expected}", r.rank, r.value));
    }
    out.check(elapsed < Duration::from_secs(120), || format!("took {elapsed:.1?}"));
    out.detail = format!("200 states, max error {worst:.2e}, {elapsed:.1?} with a {threads}-thread pool");
    let values: Vec<(f64, &Vec<f64>)> = results.iter().map(|r| (r.value, &r.best_mixing)).collect();
    (out, serde_json::to_string(&values).unwrap())
}

fn criterion_6(chain: &mut Chain) -> Outcome {
    let mut out = Outcome::new();
    let config = MonogamyConfig::default();
    let mut min_ckw = f64::INFINITY;
    let mut worst_hyper = 0.0f64;
    for k in 0..500 {
        let state = haar_state_seeded(3, 110_000 + k).unwrap();
        let ckw = ckw_report(&state, 1, config.tolerances).unwrap().ckw_residual;
        min_ckw = min_ckw.min(ckw);
        out.check(ckw >= -1e-9, || format!("state {k}: ckw_residual {ckw:e}"));
        let sm = sm_residual(&state, 1, &config).unwrap();
        let hyper = oracle::hyperdeterminant_three_tangle(state.amplitudes());
        worst_hyper = worst_hyper.max((ckw - hyper).abs());
        out.check((ckw - hyper).abs() <= 1e-9, || format!("state {k}: residual {ckw} vs three-tangle {hyper}"));
        chain.push((format!("haar k={k}"), sm.sm_residual, sm.ckw_residual));
    }
    let g = ghz(3);
    let ghz_ckw = ckw_report(&g, 1, config.tolerances).unwrap().ckw_residual;
    let tau3 = n_tangle_pure(&g, 1, &QubitSubset::new([2, 3]).unwrap(), &NTangle::default())
        .unwrap()
        .tangle
        .value;
    out.check((ghz_ckw - 1.0).abs() <= 1e-9, || format!("GHZ residual {ghz_ckw}"));
    out.check((tau3 - 1.0).abs() <= 1e-9, || format!("GHZ three-tangle {tau3}"));
    let sm = sm_residual(&g, 1, &config).unwrap();
    chain.push(("ghz3".into(), sm.sm_residual, sm.ckw_residual));
    out.detail = format!(
        "500 states, min ckw_residual {min_ckw:.2e}, max |residual - hyperdeterminant| {worst_hyper:.2e}, GHZ residual {ghz_ckw:.3}, three-tangle {tau3:.3}"
    );
    out
}

fn criterion_7(chain: &Chain) -> Outcome {
    let mut out = Outcome::new();
    let mut worst = f64::NEG_INFINITY;
    for (name, sm, ckw) in chain {
        worst = worst.max(sm - ckw);
        out.check(*sm <= ckw + 1e-9, || format!("{name}: sm {sm:e} > ckw {ckw:e}"));
    }
    out.detail = format!("{} states, max sm - ckw {worst:.2e}", chain.len());
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let s = 1.0 / 3f64.sqrt();
    let w3 = StateVector::new(3, vec![c(0.0), c(s), c(s), c(0.0), c(s), c(0.0), c(0.0), c(0.0)]).unwrap();
    let rho = w3.reduce(&QubitSubset::new([1, 2]).unwrap()).unwrap();
    let base = canonical_ensemble(&rho);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let size = base.len() + rng.random_range(0..=3);
        let mixed = hjw_mix(&base, &haar_unitary(size, &mut rng)).unwrap();
        let objective = mixed.objective(&BipartiteTangle, 1).unwrap();
        worst = worst.max((objective - 2.0 / 3.0).abs());
        out.check((objective - 2.0 / 3.0).abs() <= 1e-8, || format!("mixing {k}: objective {objective}"));
    }
    out.detail = format!("100 mixings, max |objective - 2/3| {worst:.2e}");
    out
}

fn criterion_9(first_1: &str, first_5: &str, threads: usize) -> Outcome {
    let mut out = Outcome::new();
    let dir = tempfile::TempDir::new().unwrap();
    let mut chain = Chain::new();
    let (_, again_1) = criterion_1(&mut chain);
    let (_, again_5) = criterion_5(threads);
    for (name, a, b) in [("criterion 1", first_1, &again_1), ("criterion 5", first_5, &again_5)] {
        let (pa, pb) = (dir.path().join(format!("{name}.a.json")), dir.path().join(format!("{name}.b.json")));
        std::fs::write(&pa, a).unwrap();
        std::fs::write(&pb, b).unwrap();
        let same = std::fs::read(&pa).unwrap() == std::fs::read(&pb).unwrap();
        out.check(same, || format!("{name} reports differ on rerun"));
    }
    out.detail = format!(
        "reran criteria 1 and 5 (criterion 5 with a {threads}-thread pool), {} + {} report bytes identical",
        first_1.len(),
        first_5.len()
    );
    out
}

fn report(id: usize, title: &str, started: Instant, outcome: Outcome) -> bool {
    let pass = outcome.failures.is_empty();
    println!(
        "criterion {id} [{}] {title}: {} ({:.1?})",
        if pass { "PASS" } else { "FAIL" },
        outcome.detail,
        started.elapsed()
    );
    for f in outcome.failures.iter().filter(|f| !f.is_empty()) {
        println!("    {f}");
    }
    if outcome.failures.len() > 5 {
        println!("    ... {} failures in total", outcome.failures.len());
    }
    pass
}

fn main() {
    let mut chain = Chain::new();
    let mut all = true;

    let t = Instant::now();
    let (o1, json_1) = criterion_1(&mut chain);
    let t1 = t.elapsed();
    let mut o1 = o1;
    o1.check(t1 < Duration::from_secs(600), || format!("took {t1:.1?}"));
    all &= report(1, "W-class strong-monogamy saturation", t, o1);

    let t = Instant::now();
    all &= report(2, "W-class CKW equality and closed-form two-tangles", t, criterion_2());
    let t = Instant::now();
    all &= report(3, "W-class reductions are rank-2 mixtures", t, criterion_3());
    let t = Instant::now();
    all &= report(4, "vanishing 3- and 4-tangles of 5-qubit W-class states", t, criterion_4());
    let t = Instant::now();
    let threads = rayon::current_num_threads();
    let (o5, json_5) = criterion_5(threads);
    all &= report(5, "roof search against two-qubit concurrence", t, o5);
    let t = Instant::now();
    all &= report(6, "CKW inequality on Haar-random 3-qubit states and GHZ", t, criterion_6(&mut chain));
    let t = Instant::now();
    all &= report(7, "strong-monogamy residual never exceeds CKW residual", t, criterion_7(&chain));
    let t = Instant::now();
    all &= report(8, "W-state pair objective independent of decomposition", t, criterion_8());
    let t = Instant::now();
    let rerun_threads = if threads == 1 { 2 } else { 1 };
    all &= report(9, "seeded reruns are bit-identical", t, criterion_9(&json_1, &json_5, rerun_threads));

    if !all {
        std::process::exit(1);
    }
}
