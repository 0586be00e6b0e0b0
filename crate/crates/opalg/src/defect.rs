//! Defect functionals of a linear map between block algebras.
//!
//! For a cb-isomorphism `T` this module computes the defect of
//! multiplicativity `T∨(a,b) = T(ab) − T(a)T(b)`, the defect of
//! selfadjointness `T − T⋆` (with `T⋆(x) = T(x*)*`), the unitization
//! `S = L(1)⁻¹L`, the symmetrization `T = ½(S + S⋆)`, the scalar
//!
//! ```text
//! μ(T) = max{ ‖T‖_cb − 1, 1 − √(2/‖T⁻¹‖²_cb − ‖T‖²_cb) }
//! ```
//!
//! controlling how far `T` moves unitaries from the unitary group, and the
//! two quantitative bounds
//!
//! ```text
//! ‖T∨‖_cb   ≤ 2√((‖T‖_cb + μ(T)/√2)² − 1) + μ(T)(1 + ‖T‖_cb)
//! ‖T−T⋆‖_cb ≤ 2√((‖T‖_cb + μ(T)/√2)² − 1) + 2μ(T)
//! ```
//!
//! valid for unital `T` with `‖T‖_cb‖T⁻¹‖_cb < √2`. Defect norms are
//! certified lower-bound estimates, so a violated bound is a genuine
//! counterexample, never an artifact of the estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{random, AlgElement};
use crate::opspace::{bilinear_h_norm, cb_norm, BilMap, LinMap, NormEstimate};

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Estimation knobs shared by the defect operations.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DefectOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Amplification level for the bilinear defect estimate; `None` uses the
    /// level at which linear cb-norms into the codomain stabilize.
    pub level: Option<usize>,
    /// Comparison tolerance for the satisfaction flags.
    pub tol: f64,
}

impl Default for DefectOptions {
    fn default() -> Self {
        DefectOptions {
            restarts: 32,
            seed: 0,
            level: None,
            tol: 1e-9,
        }
    }
}

impl DefectOptions {
    pub fn with_seed(seed: u64) -> Self {
        DefectOptions {
            seed,
            ..Default::default()
        }
    }

    pub fn fast(seed: u64) -> Self {
        DefectOptions {
            restarts: 6,
            seed,
            level: None,
            tol: 1e-9,
        }
    }
}

/// `T∨(a,b) = T(ab) − T(a)T(b)` as an exact tensor.
pub fn mult_defect(map: &LinMap) -> Result<BilMap> {
    BilMap::from_action(map.domain(), map.codomain(), |a, b| {
        let lhs = map.apply(&a.mul(b)?)?;
        let rhs = map.apply(a)?.mul(&map.apply(b)?)?;
        lhs.sub(&rhs)
    })
}

/// `T⋆(x) = T(x*)*`; an exact (conjugation + permutation) involution.
pub fn star_map(map: &LinMap) -> LinMap {
    map.star()
}

/// The selfadjointness defect `T − T⋆` as a linear map.
pub fn sa_defect(map: &LinMap) -> Result<LinMap> {
    map.sub(&map.star())
}

/// μ from cb-norm values; `Err` when the √2 hypothesis fails. The inner
/// expression `2/‖T⁻¹‖² − ‖T‖²` is clamped at zero near the hypothesis
/// boundary (continuity of the formula at the degenerate edge), and the
/// result at zero, i.e. `max(‖T‖−1, 1)`.
pub fn mu_from_norms(norm_t: f64, norm_tinv: f64) -> Result<f64> {
    let product = norm_t * norm_tinv;
    if product >= SQRT_2 {
        return Err(Error::HypothesisNotMet {
            what: "‖T‖_cb‖T⁻¹‖_cb < √2".into(),
            product,
            limit: SQRT_2,
        });
    }
    let inner = (2.0 / (norm_tinv * norm_tinv) - norm_t * norm_t).max(0.0);
    Ok((norm_t - 1.0).max(1.0 - inner.sqrt()).max(0.0))
}

/// μ(T) from fresh cb-norm estimates of `T` and `T⁻¹`.
pub fn mu(map: &LinMap, opts: &DefectOptions) -> Result<f64> {
    let inv = map.try_inverse()?;
    let nt = cb_norm(map, opts.restarts, opts.seed)?;
    let ni = cb_norm(&inv, opts.restarts, opts.seed.wrapping_add(1))?;
    mu_from_norms(nt.value, ni.value)
}

/// Result of unitizing a map, with the invertibility certificate for `L(1)`.
#[derive(Clone, Debug)]
pub struct Unitized {
    /// `S = L(1)⁻¹ L`, which satisfies `S(1) = 1`.
    pub map: LinMap,
    /// Measured `‖L(1)⁻¹‖`.
    pub l1_inverse_norm: f64,
    /// The certificate bound `‖L⁻¹‖_cb / √(2 − ‖L‖²_cb‖L⁻¹‖²_cb)`.
    pub certificate_bound: f64,
    /// Whether the measured value observes the certificate.
    pub within_certificate: bool,
    pub cb_l: NormEstimate,
    pub cb_l_inv: NormEstimate,
}

/// Unitize `L`: requires `‖L‖_cb‖L⁻¹‖_cb < √2` so that `L(1)` is invertible
/// with a quantitative bound on `‖L(1)⁻¹‖`.
pub fn unitize(map: &LinMap, opts: &DefectOptions) -> Result<Unitized> {
    let inv = map.try_inverse()?;
    let cb_l = cb_norm(map, opts.restarts, opts.seed)?;
    let cb_l_inv = cb_norm(&inv, opts.restarts, opts.seed.wrapping_add(1))?;
    let product = cb_l.value * cb_l_inv.value;
    if product >= SQRT_2 {
        return Err(Error::HypothesisNotMet {
            what: "‖L‖_cb‖L⁻¹‖_cb < √2 (unitization)".into(),
            product,
            limit: SQRT_2,
        });
    }
    let l1 = map.apply(&map.domain().unit())?;
    let l1_inv = l1.try_inverse().map_err(|_| {
        Error::NotInvertible("L(1) is numerically singular; unitization hypothesis fails".into())
    })?;
    let l1_inverse_norm = l1_inv.op_norm();
    let certificate_bound = cb_l_inv.value / (2.0 - product * product).sqrt();
    let s = LinMap::left_mul(&l1_inv).compose(map)?;
    Ok(Unitized {
        within_certificate: l1_inverse_norm <= certificate_bound + crate::tol::OPTIMIZATION,
        map: s,
        l1_inverse_norm,
        certificate_bound,
        cb_l,
        cb_l_inv,
    })
}

/// `½(S + S⋆)`; the result is exactly *-preserving.
pub fn symmetrize(map: &LinMap) -> LinMap {
    map.add(&map.star()).expect("same spaces").scale(0.5)
}

/// Everything `verify_defmult` measures, with the two bounds and flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DefectReport {
    pub cb_t: NormEstimate,
    pub cb_t_inv: NormEstimate,
    pub mu: f64,
    pub mult_defect: NormEstimate,
    pub sa_defect: NormEstimate,
    pub bound_mult: f64,
    pub bound_sa: f64,
    pub mult_satisfied: bool,
    pub sa_satisfied: bool,
}

impl DefectReport {
    pub fn satisfied(&self) -> bool {
        self.mult_satisfied && self.sa_satisfied
    }

    pub fn csv_header() -> &'static str {
        "cb_t,cb_t_inv,mu,mult_defect,bound_mult,mult_satisfied,sa_defect,bound_sa,sa_satisfied"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.cb_t.value,
            self.cb_t_inv.value,
            self.mu,
            self.mult_defect.value,
            self.bound_mult,
            self.mult_satisfied,
            self.sa_defect.value,
            self.bound_sa,
            self.sa_satisfied
        )
    }
}

/// Compute both defect estimates for a unital map and compare them against
/// the quantitative bounds. `value` estimates (upper-leaning) are used for
/// `‖T‖_cb` and `‖T⁻¹‖_cb` inside μ so the computed bound is conservative.
pub fn verify_defmult(map: &LinMap, opts: &DefectOptions) -> Result<DefectReport> {
    if !map.is_unital(1e-9) {
        return Err(Error::InvalidArgument(
            "verify_defmult needs a unital map (unitize first)".into(),
        ));
    }
    let inv = map.try_inverse()?;
    let cb_t = cb_norm(map, opts.restarts, opts.seed)?;
    let cb_t_inv = cb_norm(&inv, opts.restarts, opts.seed.wrapping_add(1))?;
    let mu = mu_from_norms(cb_t.value, cb_t_inv.value)?;
    let level = opts.level.unwrap_or_else(|| map.codomain().max_block().max(1));

    let mult = mult_defect(map)?;
    let mult_est = bilinear_h_norm(&mult, level, opts.restarts, opts.seed.wrapping_add(2))?;
    let sa = sa_defect(map)?;
    let sa_est = cb_norm(&sa, opts.restarts, opts.seed.wrapping_add(3))?;

    let common = 2.0 * (((cb_t.value + mu / SQRT_2).powi(2) - 1.0).max(0.0)).sqrt();
    let bound_mult = common + mu * (1.0 + cb_t.value);
    let bound_sa = common + 2.0 * mu;

    Ok(DefectReport {
        mult_satisfied: mult_est.value <= bound_mult + opts.tol,
        sa_satisfied: sa_est.value <= bound_sa + opts.tol,
        cb_t,
        cb_t_inv,
        mu,
        mult_defect: mult_est,
        sa_defect: sa_est,
        bound_mult,
        bound_sa,
    })
}

/// The ℓ-fold defect `S^{∨ℓ}(x₁,…,x_ℓ) = S(x₁⋯x_ℓ) − S(x₁)⋯S(x_ℓ)` with the
/// chained bound `‖S^{∨ℓ}‖_cb ≤ ‖S∨‖_cb Σ_{k=0}^{ℓ−2} ‖S‖^k_cb`.
pub struct IteratedDefect {
    map: LinMap,
    pub arity: usize,
    /// `‖S∨‖_cb Σ_{k=0}^{ℓ−2} ‖S‖^k_cb` from the stored estimates.
    pub bound: f64,
    pub cb_s: NormEstimate,
    pub cb_defect: NormEstimate,
}

impl IteratedDefect {
    pub fn eval(&self, args: &[AlgElement]) -> Result<AlgElement> {
        if args.len() != self.arity {
            return Err(Error::InvalidArgument(format!(
                "iterated defect expects {} arguments, got {}",
                self.arity,
                args.len()
            )));
        }
        let mut prod = args[0].clone();
        for x in &args[1..] {
            prod = prod.mul(x)?;
        }
        let mut img_prod = self.map.apply(&args[0])?;
        for x in &args[1..] {
            img_prod = img_prod.mul(&self.map.apply(x)?)?;
        }
        self.map.apply(&prod)?.sub(&img_prod)
    }

    /// Max over `samples` random contraction tuples of
    /// `‖S^{∨ℓ}(x₁..x_ℓ)‖ / Π‖xᵢ‖`; the chained bound must dominate this.
    pub fn spot_check(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut worst = 0.0f64;
        for idx in 0..samples {
            let mut rng = random::rng_for_substream(seed, idx as u64);
            let args: Vec<AlgElement> = (0..self.arity)
                .map(|_| random::random_contraction(self.map.domain(), &mut rng))
                .collect();
            let scale: f64 = args.iter().map(|x| x.op_norm()).product();
            if scale < 1e-12 {
                continue;
            }
            let val = self.eval(&args)?.op_norm() / scale;
            worst = worst.max(val);
        }
        Ok(worst)
    }
}

pub fn iterated_defect(map: &LinMap, arity: usize, opts: &DefectOptions) -> Result<IteratedDefect> {
    if arity < 2 {
        return Err(Error::InvalidArgument("iterated defect needs ℓ ≥ 2".into()));
    }
    let cb_s = cb_norm(map, opts.restarts, opts.seed)?;
    let defect = mult_defect(map)?;
    let level = opts.level.unwrap_or_else(|| map.codomain().max_block().max(1));
    let cb_defect = bilinear_h_norm(&defect, level, opts.restarts, opts.seed.wrapping_add(2))?;
    let geom: f64 = (0..=arity - 2).map(|k| cb_s.value.powi(k as i32)).sum();
    Ok(IteratedDefect {
        map: map.clone(),
        arity,
        bound: cb_defect.value * geom,
        cb_s,
        cb_defect,
    })
}
