//! Outward-rounded interval arithmetic and machine-checked replay of the
//! explicit constant chains behind the defect and recovery bounds.

mod chains;
mod interval;

pub use chains::{
    defmult_bounds, imageunit_bound, lemma_constant_checks, mu_bound, replay_quant_chain,
    s_norm_bound, threshold_length, threshold_nuclear, threshold_nuclear_at, threshold_vn,
    threshold_vn_at, unitmult_bound, ChainReport, ChainStep, StepStatus,
};
pub use interval::Interval;
