//! Experiment harness: instance generators and batch verification
//! campaigns. The `opalg` binary is a thin CLI over this module.

mod campaigns;
mod generators;

pub use campaigns::{
    replay_case, replay_from_json, run_correction_suite, run_defect_suite, run_lemma_inver,
    run_lemma_l2, run_lemma_unit, run_lemma_unitmult, run_recover_suite, CampaignReport,
    ReplayCase, ReplayVerdict,
};
pub use generators::{
    defmult_instance, nearest_unitary_bruteforce, perturbed_isomorphism, planted_multiplication,
    random_invertible_scaled, star_isomorphism, unit_norm_noise,
};
