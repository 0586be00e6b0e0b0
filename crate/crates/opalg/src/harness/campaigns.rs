//! Batch verification campaigns and replayable failure dumps.
//!
//! Every campaign is deterministic in `(config, seed)`: per-instance
//! generators draw from substreams indexed by instance, so reports are
//! byte-identical across runs and failures can be replayed in isolation
//! from their dump files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::generators;
use crate::defect::{verify_defmult, DefectOptions};
use crate::error::{Error, Result};
use crate::matcore::{check_condition_c, find_violating_projection, polar, random, AlgElement, BlockAlgebra};
use crate::opspace::LinMap;
use crate::perturb::{
    correct_multiplication, recover_isomorphism, stability_surjectivity, RecoverOptions,
};

/// Aggregate result of one campaign.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignReport {
    pub name: String,
    pub total: usize,
    pub passed: usize,
    /// Scalar summary statistics, ordered for deterministic serialization.
    pub stats: BTreeMap<String, f64>,
    /// One line per failing instance.
    pub failures: Vec<String>,
    /// Per-instance table (CSV payload), when the campaign produces one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    /// Plot series (CSV payload), e.g. defect-vs-step curves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_csv: Option<String>,
}

impl CampaignReport {
    fn new(name: &str) -> CampaignReport {
        CampaignReport {
            name: name.into(),
            total: 0,
            passed: 0,
            stats: BTreeMap::new(),
            failures: Vec::new(),
            csv: None,
            series_csv: None,
        }
    }

    pub fn ok(&self) -> bool {
        self.total == self.passed
    }

    fn stat_max(&mut self, key: &str, value: f64) {
        let e = self.stats.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        *e = e.max(value);
    }
}

/// A self-contained failing case: everything needed to re-execute one
/// verdict deterministically.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReplayCase {
    Defmult {
        map: LinMap,
        opts: DefectOptions,
    },
    Recover {
        map: LinMap,
        opts: RecoverOptions,
        residual_bound: f64,
    },
    LemmaUnit {
        x: AlgElement,
        seed: u64,
        tol_formula: f64,
        tol_brute: f64,
    },
    LemmaInver {
        x: AlgElement,
        samples: usize,
        seed: u64,
        tol: f64,
    },
    LemmaUnitmult {
        u: AlgElement,
        v: AlgElement,
        x: AlgElement,
        tol: f64,
    },
    LemmaL2 {
        t: LinMap,
        s: LinMap,
        k: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReplayVerdict {
    pub pass: bool,
    pub detail: String,
}

/// Re-execute a single dumped case; same inputs, same verdict.
pub fn replay_case(case: &ReplayCase) -> Result<ReplayVerdict> {
    match case {
        ReplayCase::Defmult { map, opts } => {
            let report = verify_defmult(map, opts)?;
            Ok(ReplayVerdict {
                pass: report.satisfied(),
                detail: format!(
                    "mult {} vs bound {} ({}); sa {} vs bound {} ({})",
                    report.mult_defect.value,
                    report.bound_mult,
                    report.mult_satisfied,
                    report.sa_defect.value,
                    report.bound_sa,
                    report.sa_satisfied
                ),
            })
        }
        ReplayCase::Recover {
            map,
            opts,
            residual_bound,
        } => {
            let (_, rep) = recover_isomorphism(map, opts)?;
            let worst = rep.mult_residual.max(rep.sa_residual).max(rep.unitary_residual);
            Ok(ReplayVerdict {
                pass: worst < *residual_bound,
                detail: format!(
                    "mult {} sa {} unitary {} (bound {})",
                    rep.mult_residual, rep.sa_residual, rep.unitary_residual, residual_bound
                ),
            })
        }
        ReplayCase::LemmaUnit {
            x,
            seed,
            tol_formula,
            tol_brute,
        } => {
            let p = polar(x)?;
            let formula = crate::matcore::nearest_unitary_distance_formula(x)?;
            let mut rng = random::rng_from_seed(*seed);
            let brute = generators::nearest_unitary_bruteforce(x, 300, &mut rng);
            let pass = (p.distance_to_unitary - formula).abs() <= *tol_formula
                && (p.distance_to_unitary - brute).abs() <= *tol_brute;
            Ok(ReplayVerdict {
                pass,
                detail: format!(
                    "polar {} formula {formula} brute {brute}",
                    p.distance_to_unitary
                ),
            })
        }
        ReplayCase::LemmaInver {
            x,
            samples,
            seed,
            tol,
        } => {
            let (pass, detail) = lemma_inver_single(x, *samples, *seed, *tol)?;
            Ok(ReplayVerdict { pass, detail })
        }
        ReplayCase::LemmaUnitmult { u, v, x, tol } => {
            let (pass, detail) = lemma_unitmult_single(u, v, x, *tol)?;
            Ok(ReplayVerdict { pass, detail })
        }
        ReplayCase::LemmaL2 { t, s, k } => {
            let b = stability_surjectivity(t, s, *k)?;
            Ok(ReplayVerdict {
                pass: b.satisfied,
                detail: format!(
                    "measured {} vs bound {} at distance {}",
                    b.measured_inverse_norm, b.bound, b.map_distance
                ),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Lemma campaigns
// ---------------------------------------------------------------------------

/// Polar distance formula vs brute-force minimization over unitaries.
pub fn run_lemma_unit(
    dims_list: &[Vec<usize>],
    samples: usize,
    seed: u64,
) -> Result<(CampaignReport, Vec<ReplayCase>)> {
    let mut report = CampaignReport::new("lemma-unit");
    let mut dumps = Vec::new();
    let tol_formula = 1e-9;
    let tol_brute = 1e-6;
    for idx in 0..samples {
        let alg = BlockAlgebra::new(dims_list[idx % dims_list.len()].clone())?;
        let mut rng = random::rng_for_substream(seed, idx as u64);
        let x = generators::random_invertible_scaled(&alg, 0.15, &mut rng);
        let p = polar(&x)?;
        let formula = crate::matcore::nearest_unitary_distance_formula(&x)?;
        let brute = generators::nearest_unitary_bruteforce(&x, 300, &mut rng);
        let gap_formula = (p.distance_to_unitary - formula).abs();
        let gap_brute = (p.distance_to_unitary - brute).abs();
        report.total += 1;
        report.stat_max("max_formula_gap", gap_formula);
        report.stat_max("max_bruteforce_gap", gap_brute);
        if gap_formula <= tol_formula && gap_brute <= tol_brute {
            report.passed += 1;
        } else {
            report.failures.push(format!(
                "instance {idx}: polar {} formula {formula} brute {brute}",
                p.distance_to_unitary
            ));
            dumps.push(ReplayCase::LemmaUnit {
                x,
                seed: seed.wrapping_add(idx as u64),
                tol_formula,
                tol_brute,
            });
        }
    }
    Ok((report, dumps))
}

fn lemma_inver_single(
    x: &AlgElement,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<(bool, String)> {
    let alg = x.algebra().clone();
    let alpha = x.smallest_singular_value().powi(2);
    let mut rng = random::rng_from_seed(seed);
    for _ in 0..samples {
        let p = random::random_projection(&alg, &mut rng);
        if !check_condition_c(x, alpha, &p, tol)? {
            return Ok((false, "condition (C) failed against a projection".into()));
        }
        let y = random::random_contraction(&alg, &mut rng);
        if !check_condition_c(x, alpha, &y, tol)? {
            return Ok((false, "condition (C) failed against a contraction".into()));
        }
    }
    // inflating α by 1% must produce a violating spectral projection
    let inflated = alpha * 1.01;
    match find_violating_projection(x, inflated, tol)? {
        Some(p) => {
            if check_condition_c(x, inflated, &p, tol)? {
                Ok((false, "returned witness does not actually violate (C)".into()))
            } else {
                Ok((true, format!("alpha {alpha:.6}")))
            }
        }
        None => Ok((false, "no violating projection found for inflated alpha".into())),
    }
}

/// Condition (C) both ways: maximal α holds against random tests, inflated
/// α is refuted by a spectral projection.
pub fn run_lemma_inver(
    dims: &[usize],
    instances: usize,
    samples: usize,
    seed: u64,
) -> Result<(CampaignReport, Vec<ReplayCase>)> {
    let alg = BlockAlgebra::new(dims.to_vec())?;
    let mut report = CampaignReport::new("lemma-inver");
    let mut dumps = Vec::new();
    let tol = 1e-9;
    for idx in 0..instances {
        let mut rng = random::rng_for_substream(seed, idx as u64);
        let x = random::random_invertible(&alg, &mut rng, 0.1);
        let sub_seed = seed.wrapping_add(0x1000 + idx as u64);
        let (pass, detail) = lemma_inver_single(&x, samples, sub_seed, tol)?;
        report.total += 1;
        if pass {
            report.passed += 1;
        } else {
            report.failures.push(format!("instance {idx}: {detail}"));
            dumps.push(ReplayCase::LemmaInver {
                x,
                samples,
                seed: sub_seed,
                tol,
            });
        }
    }
    Ok((report, dumps))
}

fn lemma_unitmult_single(
    u: &AlgElement,
    v: &AlgElement,
    x: &AlgElement,
    tol: f64,
) -> Result<(bool, String)> {
    let alg = u.algebra().clone();
    let minus_one = alg.unit().scale_re(-1.0);
    let block = AlgElement::block2x2(u, x, &minus_one, v)?;
    let c = (block.op_norm() / std::f64::consts::SQRT_2).max(1.0);
    let lhs = x.sub(&u.mul(v)?)?.op_norm();
    let rhs = 2.0 * (c * c - 1.0).max(0.0).sqrt();
    Ok((
        lhs <= rhs + tol,
        format!("‖x−uv‖ = {lhs:.6}, bound = {rhs:.6}, c = {c:.6}"),
    ))
}

/// The 2×2 block bound `‖x − uv‖ ≤ 2√(c²−1)`.
pub fn run_lemma_unitmult(
    dims: &[usize],
    samples: usize,
    seed: u64,
) -> Result<(CampaignReport, Vec<ReplayCase>)> {
    let alg = BlockAlgebra::new(dims.to_vec())?;
    let mut report = CampaignReport::new("lemma-unitmult");
    let mut dumps = Vec::new();
    let tol = 1e-9;
    for idx in 0..samples {
        let mut rng = random::rng_for_substream(seed, idx as u64);
        let u = random::random_unitary(&alg, &mut rng);
        let v = random::random_unitary(&alg, &mut rng);
        // mix near-product and generic test points
        let x = if idx % 2 == 0 {
            let noise = random::random_element(&alg, &mut rng);
            let eta: f64 = rng.gen_range(0.0..1.0);
            u.mul(&v)?
                .add(&noise.scale_re(eta / noise.op_norm().max(1e-12)))?
        } else {
            random::random_contraction(&alg, &mut rng).scale_re(2.0)
        };
        let (pass, detail) = lemma_unitmult_single(&u, &v, &x, tol)?;
        report.total += 1;
        if pass {
            report.passed += 1;
        } else {
            report.failures.push(format!("instance {idx}: {detail}"));
            dumps.push(ReplayCase::LemmaUnitmult { u, v, x, tol });
        }
    }
    Ok((report, dumps))
}

use rand::Rng;

/// Quotient-inverse stability on random full-rank pairs.
pub fn run_lemma_l2(instances: usize, seed: u64) -> Result<(CampaignReport, Vec<ReplayCase>)> {
    let dom = BlockAlgebra::new(vec![2, 2])?;
    let cod = BlockAlgebra::new(vec![2])?;
    let mut report = CampaignReport::new("lemma-l2");
    let mut dumps = Vec::new();
    for idx in 0..instances {
        let mut rng = random::rng_for_substream(seed, idx as u64);
        let t = {
            let mut m = crate::matcore::CMat::zeros(cod.coord_dim(), dom.coord_dim());
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    m[(r, c)] = num_complex::Complex64::new(
                        rng.gen::<f64>() - 0.5,
                        rng.gen::<f64>() - 0.5,
                    );
                }
            }
            LinMap::new(dom.clone(), cod.clone(), m)?
        };
        let k = crate::perturb::quotient_inverse_norm(&t)?;
        let noise = {
            let mut m = crate::matcore::CMat::zeros(cod.coord_dim(), dom.coord_dim());
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    m[(r, c)] = num_complex::Complex64::new(
                        rng.gen::<f64>() - 0.5,
                        rng.gen::<f64>() - 0.5,
                    );
                }
            }
            let lm = LinMap::new(dom.clone(), cod.clone(), m)?;
            lm.scale(1.0 / lm.coord_norm())
        };
        let rho: f64 = 0.05 + 0.85 * rng.gen::<f64>();
        let s = t.add(&noise.scale(rho / k))?;
        let b = stability_surjectivity(&t, &s, k)?;
        report.total += 1;
        report.stat_max("max_measured_over_bound", b.measured_inverse_norm / b.bound);
        if b.satisfied {
            report.passed += 1;
        } else {
            report.failures.push(format!(
                "instance {idx}: measured {} bound {}",
                b.measured_inverse_norm, b.bound
            ));
            dumps.push(ReplayCase::LemmaL2 { t, s, k });
        }
    }
    Ok((report, dumps))
}

// ---------------------------------------------------------------------------
// Defect and recovery campaigns
// ---------------------------------------------------------------------------

/// Randomized verification of the defect bounds on unitized symmetrized
/// perturbations of planted *-isomorphisms. A violation is a genuine
/// counterexample (defect norms are certified lower bounds) and fails the
/// campaign.
pub fn run_defect_suite(
    dims: &[usize],
    eps_list: &[f64],
    instances: usize,
    restarts: usize,
    seed: u64,
) -> Result<(CampaignReport, Vec<ReplayCase>)> {
    let alg = BlockAlgebra::new(dims.to_vec())?;
    let mut report = CampaignReport::new("defect-suite");
    let mut dumps = Vec::new();
    let mut csv = format!("instance,eps,{}\n", crate::defect::DefectReport::csv_header());
    for idx in 0..instances {
        let eps = eps_list[idx % eps_list.len()];
        let mut rng = random::rng_for_substream(seed, idx as u64);
        let t = generators::defmult_instance(&alg, eps, &mut rng)?;
        let opts = DefectOptions {
            restarts,
            seed: seed.wrapping_add(0x2000 + idx as u64),
            level: None,
            tol: 1e-9,
        };
        let rep = verify_defmult(&t, &opts)?;
        csv.push_str(&format!("{idx},{eps},{}\n", rep.csv_row()));
        report.total += 1;
        report.stat_max("max_mu", rep.mu);
        if rep.bound_mult > 0.0 {
            report.stat_max("max_mult_fill", rep.mult_defect.value / rep.bound_mult);
        }
        if rep.bound_sa > 0.0 {
            report.stat_max("max_sa_fill", rep.sa_defect.value / rep.bound_sa);
        }
        if rep.satisfied() {
            report.passed += 1;
        } else {
            report.failures.push(format!(
                "instance {idx} (ε = {eps}): mult {} > {} or sa {} > {}",
                rep.mult_defect.value, rep.bound_mult, rep.sa_defect.value, rep.bound_sa
            ));
            dumps.push(ReplayCase::Defmult { map: t, opts });
        }
    }
    report.csv = Some(csv);
    Ok((report, dumps))
}

/// Plant-and-recover: `L = (id + εG)∘π₀` must recover a *-isomorphism with
/// small residuals, staying within the distance budget `1808·√(excess)`.
pub fn run_recover_suite(
    dims: &[usize],
    eps: f64,
    instances: usize,
    restarts: usize,
    seed: u64,
) -> Result<(CampaignReport, Vec<ReplayCase>)> {
    let alg = BlockAlgebra::new(dims.to_vec())?;
    let mut report = CampaignReport::new("recover");
    let mut dumps = Vec::new();
    let residual_bound = 1e-9;
    let mut csv = String::from(
        "instance,defect_norm,iterations,mult_residual,sa_residual,unitary_residual,distance_to_input,excess,distance_budget\n",
    );
    let mut series = String::from("instance,step,eps\n");
    for idx in 0..instances {
        let mut rng = random::rng_for_substream(seed, idx as u64);
        let l = generators::perturbed_isomorphism(&alg, eps, &mut rng);
        let opts = RecoverOptions {
            restarts,
            seed: seed.wrapping_add(0x3000 + idx as u64),
            tol: 1e-11,
            max_iter: 25,
            residual_samples: 50,
        };
        let (_pi, rep) = recover_isomorphism(&l, &opts)?;
        let budget = 1808.0 * rep.measured_excess.max(0.0).sqrt();
        series.push_str(&format!("{idx},0,{}\n", rep.trace.eps0));
        for (s, step) in rep.trace.steps.iter().enumerate() {
            series.push_str(&format!("{idx},{},{}\n", s + 1, step.eps));
        }
        csv.push_str(&format!(
            "{idx},{},{},{},{},{},{},{},{budget}\n",
            rep.defect_norm,
            rep.trace.steps.len(),
            rep.mult_residual,
            rep.sa_residual,
            rep.unitary_residual,
            rep.distance_to_input.value,
            rep.measured_excess
        ));
        report.total += 1;
        report.stat_max("max_mult_residual", rep.mult_residual);
        report.stat_max("max_sa_residual", rep.sa_residual);
        report.stat_max("max_unitary_residual", rep.unitary_residual);
        report.stat_max("max_iterations", rep.trace.steps.len() as f64);
        let ok = rep.mult_residual < residual_bound
            && rep.sa_residual < residual_bound
            && rep.unitary_residual < residual_bound
            && rep.distance_to_input.value <= budget;
        if ok {
            report.passed += 1;
        } else {
            report.failures.push(format!(
                "instance {idx}: residuals ({}, {}, {}), distance {} vs budget {budget}",
                rep.mult_residual, rep.sa_residual, rep.unitary_residual, rep.distance_to_input.value
            ));
            dumps.push(ReplayCase::Recover {
                map: l,
                opts,
                residual_bound,
            });
        }
    }
    report.csv = Some(csv);
    report.series_csv = Some(series);
    Ok((report, dumps))
}

/// Plant-and-recover for the correction iteration alone: quadratic
/// contraction, iteration budget, and the transport staying within `10·ε₀`
/// of the identity.
pub fn run_correction_suite(
    dims_list: &[Vec<usize>],
    instances: usize,
    plant_scale: f64,
    seed: u64,
) -> Result<(CampaignReport, Vec<ReplayCase>)> {
    let mut report = CampaignReport::new("correction");
    let mut series = String::from("instance,step,eps\n");
    for idx in 0..instances {
        let alg = BlockAlgebra::new(dims_list[idx % dims_list.len()].clone())?;
        let mut rng = random::rng_for_substream(seed, idx as u64);
        let (m, phi0) = generators::planted_multiplication(&alg, plant_scale, &mut rng)?;
        let eps0 = m.defect_coord_norm();
        let (phi, trace) = correct_multiplication(&m, 1e-11, 25)?;
        series.push_str(&format!("{idx},0,{}\n", trace.eps0));
        for (s, step) in trace.steps.iter().enumerate() {
            series.push_str(&format!("{idx},{},{}\n", s + 1, step.eps));
        }

        // multiplicative residual of Φ on random pairs
        let mut mult_residual = 0.0f64;
        for _ in 0..100 {
            let x = random::random_contraction(&alg, &mut rng);
            let y = random::random_contraction(&alg, &mut rng);
            let lhs = phi.apply(&m.eval(&x, &y)?)?;
            let rhs = phi.apply(&x)?.mul(&phi.apply(&y)?)?;
            mult_residual = mult_residual.max(lhs.sub(&rhs)?.op_norm());
        }
        let dist = phi
            .sub(&LinMap::identity(&alg))?
            .coord_norm();
        let worst_ratio = trace
            .steps
            .iter()
            .filter(|s| s.eps > 1e-13)
            .map(|s| s.ratio)
            .fold(0.0f64, f64::max);
        // Φ∘Φ₀⁻¹ must be an automorphism of the block algebra
        let auto = phi.compose(&phi0.try_inverse()?)?;
        let mut auto_defect = 0.0f64;
        for _ in 0..20 {
            let x = random::random_contraction(&alg, &mut rng);
            let y = random::random_contraction(&alg, &mut rng);
            let lhs = auto.apply(&x.mul(&y)?)?;
            let rhs = auto.apply(&x)?.mul(&auto.apply(&y)?)?;
            auto_defect = auto_defect.max(lhs.sub(&rhs)?.op_norm());
        }

        report.total += 1;
        report.stat_max("max_iterations", trace.steps.len() as f64);
        report.stat_max("max_mult_residual", mult_residual);
        report.stat_max("max_contraction_ratio", worst_ratio);
        report.stat_max("max_phi_distance_over_eps0", if eps0 > 0.0 { dist / eps0 } else { 0.0 });
        report.stat_max("max_automorphism_defect", auto_defect);
        let ok = trace.converged
            && trace.steps.len() <= 8
            && mult_residual < 1e-10
            && dist <= 10.0 * eps0 + 1e-8
            && worst_ratio <= 20.0
            && auto_defect <= 1e-8;
        if ok {
            report.passed += 1;
        } else {
            report.failures.push(format!(
                "instance {idx} dims {:?}: iters {}, residual {mult_residual}, dist {dist} vs 10ε₀ = {}, ratio {worst_ratio}, auto {auto_defect}",
                alg.dims(),
                trace.steps.len(),
                10.0 * eps0
            ));
        }
    }
    report.series_csv = Some(series);
    Ok((report, Vec::new()))
}

/// Parse a failing-case dump and re-run it.
pub fn replay_from_json(payload: &str) -> Result<ReplayVerdict> {
    let case: ReplayCase = serde_json::from_str(payload).map_err(Error::Json)?;
    replay_case(&case)
}
