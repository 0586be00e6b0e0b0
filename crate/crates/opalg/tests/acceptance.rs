//! Acceptance suite: one test per top-level criterion, each printing a
//! single PASS/FAIL line (run with `--nocapture` to see them) and holding
//! the stated runtime budget.
//!
//! Criterion 8 is expected to stay red on one sub-check: the printed
//! majorant `2δ` for μ(S) is genuinely refuted by interval arithmetic (the
//! closed form evaluates to `4δ + O(δ²)`), and this suite reports the
//! refutation rather than weakening the check. See `threshold_vn` for the
//! other, intentionally flagged, discrepancy.

use std::time::Instant;

use opalg::certify::{
    replay_quant_chain, threshold_length, threshold_nuclear, threshold_vn, Interval, StepStatus,
};
use opalg::harness;
use opalg::matcore::BlockAlgebra;
use opalg::opspace::{amplified_norm, cb_norm, LinMap};

const SEED: u64 = 20260809;

fn report(id: u32, name: &str, pass: bool, secs: f64, detail: &str) {
    println!(
        "ACCEPTANCE {id} ({name}): {} in {secs:.1}s — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn acceptance_1_polar_distance_formula() {
    let start = Instant::now();
    let (rep, _) = harness::run_lemma_unit(&[vec![2], vec![3]], 500, SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = rep.ok() && secs < 30.0;
    report(
        1,
        "nearest-unitary distance formula",
        pass,
        secs,
        &format!(
            "{}/{} instances; worst formula gap {:.2e}, worst brute-force gap {:.2e}",
            rep.passed, rep.total, rep.stats["max_formula_gap"], rep.stats["max_bruteforce_gap"]
        ),
    );
    assert!(rep.ok(), "failures: {:?}", rep.failures);
    assert!(secs < 30.0, "runtime budget exceeded: {secs:.1}s");
}

#[test]
fn acceptance_2_invertibility_condition_both_directions() {
    let start = Instant::now();
    let (rep, _) = harness::run_lemma_inver(&[4], 200, 1000, SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = rep.ok() && secs < 60.0;
    report(
        2,
        "column/row invertibility condition",
        pass,
        secs,
        &format!("{}/{} instances at 1000+1000 tests each", rep.passed, rep.total),
    );
    assert!(rep.ok(), "failures: {:?}", rep.failures);
    assert!(secs < 60.0, "runtime budget exceeded: {secs:.1}s");
}

#[test]
fn acceptance_3_block_unitary_product_bound() {
    let start = Instant::now();
    let (rep_a, _) = harness::run_lemma_unitmult(&[2], 300, SEED).unwrap();
    let (rep_b, _) = harness::run_lemma_unitmult(&[3], 200, SEED + 1).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = rep_a.ok() && rep_b.ok() && secs < 30.0;
    report(
        3,
        "2x2 block product bound",
        pass,
        secs,
        &format!(
            "{}/{} on M2, {}/{} on M3",
            rep_a.passed, rep_a.total, rep_b.passed, rep_b.total
        ),
    );
    assert!(rep_a.ok(), "M2 failures: {:?}", rep_a.failures);
    assert!(rep_b.ok(), "M3 failures: {:?}", rep_b.failures);
    assert!(secs < 30.0, "runtime budget exceeded: {secs:.1}s");
}

#[test]
fn acceptance_4_defect_bounds_batch() {
    let start = Instant::now();
    let (rep, dumps) =
        harness::run_defect_suite(&[2, 3], &[1e-2, 1e-3, 1e-4], 1000, 3, SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = rep.ok() && secs < 600.0;
    report(
        4,
        "defect bounds on 1000 instances",
        pass,
        secs,
        &format!(
            "{}/{}; worst bound fill: mult {:.1}%, sa {:.1}%",
            rep.passed,
            rep.total,
            100.0 * rep.stats["max_mult_fill"],
            100.0 * rep.stats["max_sa_fill"]
        ),
    );
    assert!(
        rep.ok(),
        "a violated defect bound is a genuine counterexample: {:?} ({} dumps)",
        rep.failures,
        dumps.len()
    );
    assert!(secs < 600.0, "runtime budget exceeded: {secs:.1}s");
}

#[test]
fn acceptance_5_cb_norm_oracle() {
    let start = Instant::now();
    let m2 = BlockAlgebra::full(2).unwrap();
    let transpose = LinMap::transpose_map(&m2);

    let level1 = amplified_norm(&transpose, 1, 16, SEED).unwrap();
    let level2 = amplified_norm(&transpose, 2, 16, SEED).unwrap();
    let ok_l1 = level1.value >= 1.0 - 1e-6 && level1.value <= 1.0 + 1e-9;
    let ok_l2 = level2.value >= 2.0 - 1e-3 && level2.value <= 2.0 + 1e-9;

    let id = LinMap::identity(&m2);
    let id_est = cb_norm(&id, 8, SEED).unwrap();
    let ok_id = (id_est.value - 1.0).abs() <= 1e-6;

    let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
    let mut rng = opalg::matcore::random::rng_from_seed(SEED);
    let hom = harness::star_isomorphism(&alg, &mut rng);
    let hom_est = cb_norm(&hom, 8, SEED).unwrap();
    let ok_hom = (hom_est.value - 1.0).abs() <= 1e-6;

    let secs = start.elapsed().as_secs_f64();
    let pass = ok_l1 && ok_l2 && ok_id && ok_hom && secs < 10.0;
    report(
        5,
        "cb-norm oracle",
        pass,
        secs,
        &format!(
            "transpose level 1 = {:.9}, level 2 = {:.9}, id = {:.9}, hom = {:.9}",
            level1.value, level2.value, id_est.value, hom_est.value
        ),
    );
    assert!(ok_l1, "transpose level-1 value {}", level1.value);
    assert!(ok_l2, "transpose level-2 value {}", level2.value);
    assert!(ok_id, "identity value {}", id_est.value);
    assert!(ok_hom, "homomorphism value {}", hom_est.value);
    assert!(secs < 10.0, "runtime budget exceeded: {secs:.1}s");
}

#[test]
fn acceptance_6_correction_contract() {
    let start = Instant::now();
    let dims: Vec<Vec<usize>> = vec![vec![2], vec![3], vec![2, 2], vec![2, 3], vec![3, 3]];
    let (rep, _) = harness::run_correction_suite(&dims, 100, 1e-2, SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = rep.ok() && secs < 300.0;
    report(
        6,
        "constructive correction contract",
        pass,
        secs,
        &format!(
            "{}/{}; max iterations {}, worst residual {:.2e}, worst ratio {:.1}, worst ‖Φ−id‖/ε₀ {:.2}",
            rep.passed,
            rep.total,
            rep.stats["max_iterations"],
            rep.stats["max_mult_residual"],
            rep.stats["max_contraction_ratio"],
            rep.stats["max_phi_distance_over_eps0"]
        ),
    );
    assert!(rep.ok(), "failures: {:?}", rep.failures);
    assert!(secs < 300.0, "runtime budget exceeded: {secs:.1}s");
}

#[test]
fn acceptance_7_recovery_pipeline() {
    let start = Instant::now();
    let (rep, dumps) = harness::run_recover_suite(&[2, 3], 1e-3, 50, 4, SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = rep.ok() && secs < 600.0;
    report(
        7,
        "recovery pipeline",
        pass,
        secs,
        &format!(
            "{}/{}; worst residuals: mult {:.2e}, sa {:.2e}, unitary {:.2e}",
            rep.passed,
            rep.total,
            rep.stats["max_mult_residual"],
            rep.stats["max_sa_residual"],
            rep.stats["max_unitary_residual"]
        ),
    );
    assert!(rep.ok(), "failures: {:?} ({} dumps)", rep.failures, dumps.len());
    assert!(secs < 600.0, "runtime budget exceeded: {secs:.1}s");
}

#[test]
fn acceptance_8_constant_certification() {
    let start = Instant::now();
    let mut all_ok = true;
    let mut lines: Vec<String> = Vec::new();

    // nuclear threshold certifies the printed value
    let nuclear = threshold_nuclear();
    let nuclear_ok = nuclear.step("nuclear-threshold").unwrap().status == StepStatus::Certified;
    all_ok &= nuclear_ok;
    lines.push(format!("nuclear threshold certified: {nuclear_ok}"));

    // quantitative chain on the δ-grid: every step must certify
    for &delta in &[1e-10, 1e-9, 1e-8, 1e-7, 2e-7] {
        let chain = replay_quant_chain(Interval::point(delta));
        for step in &chain.steps {
            if step.status != StepStatus::Certified {
                all_ok = false;
                lines.push(format!(
                    "δ = {delta:.0e}: step {} is {:?} (derived {}, claimed {})",
                    step.id,
                    step.status,
                    step.derived.map(|d| format!("{d}")).unwrap_or_else(|| "-".into()),
                    step.claimed
                ));
            }
        }
    }

    // the von Neumann threshold discrepancy is reproduced and flagged
    let vn = threshold_vn();
    let vn_flagged = vn.step("vn-epsilon0").unwrap().status == StepStatus::Violated;
    let vn_max = vn.step("vn-max-delta").unwrap().claimed;
    let vn_max_ok = (vn_max.midpoint() - 1.0672e-6).abs() < 1e-9;
    let vn_alt_ok =
        vn.step("vn-epsilon0-closed-form").unwrap().status == StepStatus::Certified;
    all_ok &= vn_flagged && vn_max_ok && vn_alt_ok;
    lines.push(format!(
        "vn discrepancy flagged: {vn_flagged}, max δ ≈ {:.4e}, alternate reading certified: {vn_alt_ok}",
        vn_max.midpoint()
    ));

    // length thresholds over the grid
    for ell in 1..=6 {
        for k in [1u32, 2, 10] {
            let rep = threshold_length(ell, k).unwrap();
            if !rep.all_certified() {
                all_ok = false;
                lines.push(format!("length gate failed at ℓ = {ell}, K = {k}"));
            }
        }
    }

    let secs = start.elapsed().as_secs_f64();
    let pass = all_ok && secs < 5.0;
    report(
        8,
        "constant certification",
        pass,
        secs,
        &lines.join("; "),
    );
    assert!(secs < 5.0, "runtime budget exceeded: {secs:.1}s");
    // Expected red: the μ(S) ≤ 2δ step of the chain is genuinely violated
    // (derived 4δ + O(δ²)); the certifier reports it instead of loosening.
    assert!(
        all_ok,
        "constant certification incomplete:\n{}",
        lines.join("\n")
    );
}

#[test]
fn acceptance_9_quotient_inverse_stability() {
    let start = Instant::now();
    let (rep, _) = harness::run_lemma_l2(200, SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = rep.ok() && secs < 30.0;
    report(
        9,
        "quotient-inverse stability",
        pass,
        secs,
        &format!(
            "{}/{}; worst measured/bound ratio {:.4}",
            rep.passed, rep.total, rep.stats["max_measured_over_bound"]
        ),
    );
    assert!(rep.ok(), "failures: {:?}", rep.failures);
    assert!(secs < 30.0, "runtime budget exceeded: {secs:.1}s");
}
