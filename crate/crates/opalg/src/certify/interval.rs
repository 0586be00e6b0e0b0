//! Outward-rounded interval arithmetic on f64.
//!
//! Directed rounding is implemented by next-representable-value stepping
//! after each primitive operation, which is portable (no rounding-mode
//! control). Each primitive computes its exact rounding error through a
//! compensated identity (TwoSum for ±, an FMA residual for ×, ÷, √), so the
//! step is taken only when the primitive actually rounded and only in the
//! direction that was lost; exact operations stay exact. `exp` has no such
//! residual and is stepped two ulps outward unconditionally.

use serde::{Deserialize, Serialize};

/// A closed interval `[lo, hi]` of finite f64 values with `lo ≤ hi`;
/// arithmetic guarantees the true result set is contained in the output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// Round `lo` down when the computed value is known to exceed the true one.
#[inline]
fn guard_lo(value: f64, err_sign: f64) -> f64 {
    if err_sign < 0.0 {
        value.next_down()
    } else {
        value
    }
}

/// Round `hi` up when the computed value is known to undershoot.
#[inline]
fn guard_hi(value: f64, err_sign: f64) -> f64 {
    if err_sign > 0.0 {
        value.next_up()
    } else {
        value
    }
}

/// TwoSum: the exact error of `a + b` (no overflow assumed).
#[inline]
fn add_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

fn add_dir(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, add_err(a, b, s))
}

fn mul_dir(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[allow(clippy::should_implement_trait)]
impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(lo.is_finite() && hi.is_finite() && lo <= hi, "bad interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    /// Const point constructor for finite literals.
    pub const fn point_const(x: f64) -> Interval {
        Interval { lo: x, hi: x }
    }

    pub fn from_int(n: i64) -> Interval {
        Interval::point(n as f64)
    }

    /// The rational `p/q`, outward-rounded.
    pub fn from_ratio(p: i64, q: i64) -> Interval {
        Interval::from_int(p).div(Interval::from_int(q))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn add(self, rhs: Interval) -> Interval {
        let (lo, elo) = add_dir(self.lo, rhs.lo);
        let (hi, ehi) = add_dir(self.hi, rhs.hi);
        Interval::new(guard_lo(lo, elo), guard_hi(hi, ehi))
    }

    pub fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }

    pub fn sub(self, rhs: Interval) -> Interval {
        self.add(rhs.neg())
    }

    pub fn mul(self, rhs: Interval) -> Interval {
        let candidates = [
            mul_dir(self.lo, rhs.lo),
            mul_dir(self.lo, rhs.hi),
            mul_dir(self.hi, rhs.lo),
            mul_dir(self.hi, rhs.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(v, e) in &candidates {
            lo = lo.min(guard_lo(v, e));
            hi = hi.max(guard_hi(v, e));
        }
        Interval::new(lo, hi)
    }

    pub fn scale(self, c: i64) -> Interval {
        self.mul(Interval::from_int(c))
    }

    /// Division; panics if the divisor interval contains zero.
    pub fn div(self, rhs: Interval) -> Interval {
        assert!(
            rhs.lo > 0.0 || rhs.hi < 0.0,
            "division by an interval containing zero: [{}, {}]",
            rhs.lo,
            rhs.hi
        );
        let quot = |a: f64, b: f64| -> (f64, f64) {
            let q = a / b;
            // r = q·b − a is exact; the true quotient exceeds q iff r and b
            // have opposite signs.
            let r = q.mul_add(b, -a);
            (q, -r * b.signum())
        };
        let candidates = [
            quot(self.lo, rhs.lo),
            quot(self.lo, rhs.hi),
            quot(self.hi, rhs.lo),
            quot(self.hi, rhs.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(v, e) in &candidates {
            lo = lo.min(guard_lo(v, e));
            hi = hi.max(guard_hi(v, e));
        }
        Interval::new(lo, hi)
    }

    /// Square root; requires `lo ≥ 0`.
    pub fn sqrt(self) -> Interval {
        assert!(self.lo >= 0.0, "sqrt of an interval reaching below zero");
        let root = |x: f64| -> (f64, f64) {
            let r = x.sqrt();
            let resid = r.mul_add(r, -x); // r² − x, exact
            (r, -resid)
        };
        let (lo, elo) = root(self.lo);
        let (hi, ehi) = root(self.hi);
        Interval::new(guard_lo(lo, elo).max(0.0), guard_hi(hi, ehi))
    }

    /// Square root after clamping the lower end at zero (for expressions
    /// that may dip below zero by rounding near a degenerate edge).
    pub fn sqrt_clamped(self) -> Interval {
        if self.hi < 0.0 {
            return Interval::point(0.0);
        }
        Interval::new(self.lo.max(0.0), self.hi).sqrt()
    }

    /// `exp`, stepped two ulps outward (the libm result is faithful but not
    /// exactly rounded).
    pub fn exp(self) -> Interval {
        let lo = self.lo.exp().next_down().next_down();
        let hi = self.hi.exp().next_up().next_up();
        Interval::new(lo, hi)
    }

    /// Integer power by repeated multiplication (n ≥ 0).
    pub fn powi(self, n: u32) -> Interval {
        let mut acc = Interval::point(1.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn max(self, rhs: Interval) -> Interval {
        Interval::new(self.lo.max(rhs.lo), self.hi.max(rhs.hi))
    }

    pub fn min(self, rhs: Interval) -> Interval {
        Interval::new(self.lo.min(rhs.lo), self.hi.min(rhs.hi))
    }

    /// Clamp the interval from below at zero.
    pub fn max_zero(self) -> Interval {
        self.max(Interval::point(0.0))
    }

    /// `self ≤ rhs` holds for every pair of members.
    pub fn provably_le(&self, rhs: &Interval) -> bool {
        self.hi <= rhs.lo
    }

    /// `self > rhs` holds for every pair of members.
    pub fn provably_gt(&self, rhs: &Interval) -> bool {
        self.lo > rhs.hi
    }

    /// Widen the radius around the midpoint by `factor` (≥ 1), outward.
    pub fn inflate(self, factor: f64) -> Interval {
        assert!(factor >= 1.0);
        let mid = self.midpoint();
        let rad = (self.hi - self.lo) * 0.5;
        let new_rad = (rad * factor).max(rad);
        Interval::new(
            (mid - new_rad).next_down().min(self.lo),
            (mid + new_rad).next_up().max(self.hi),
        )
    }

    /// Widen both endpoints by `n` ulps.
    pub fn widen_ulps(self, n: usize) -> Interval {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for _ in 0..n {
            lo = lo.next_down();
            hi = hi.next_up();
        }
        Interval::new(lo, hi)
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::add(self, rhs)
    }
}

impl std::ops::Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::sub(self, rhs)
    }
}

impl std::ops::Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        Interval::mul(self, rhs)
    }
}

impl std::ops::Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        Interval::div(self, rhs)
    }
}

impl std::ops::Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::neg(self)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.lo == self.hi {
            write!(f, "[{:.6e}]", self.lo)
        } else {
            write!(f, "[{:.6e}, {:.6e}]", self.lo, self.hi)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn exact_operations_stay_exact() {
        let one = Interval::point(1.0);
        let sq = one.mul(one);
        assert_eq!(sq, Interval::point(1.0));
        let two = one.add(one);
        assert_eq!(two, Interval::point(2.0));
        let z = two.sub(two);
        assert_eq!(z, Interval::point(0.0));
        assert_eq!(Interval::point(4.0).sqrt(), Interval::point(2.0));
        assert_eq!(Interval::point(1.0).div(Interval::point(4.0)), Interval::point(0.25));
    }

    #[test]
    fn inexact_operations_step_outward() {
        let third = Interval::from_ratio(1, 3);
        assert!(third.lo() < third.hi());
        assert!(third.contains(1.0 / 3.0));
        // 0.1 + 0.2 rounds; the true value must stay inside
        let a = Interval::point(0.1);
        let b = Interval::point(0.2);
        let s = a.add(b);
        // true 0.3 is below the f64 sum 0.30000000000000004
        assert!(s.lo() < 0.1 + 0.2);
        assert!(s.contains(0.1 + 0.2));
    }

    #[test]
    fn soundness_fuzz_primitives() {
        // for random point inputs, the f64 evaluation lies inside the
        // interval evaluation of every primitive
        let mut rng = crate::matcore::random::rng_from_seed(99);
        for _ in 0..1_000_000 {
            let a = (rng.gen::<f64>() - 0.5) * 1e3;
            let b = (rng.gen::<f64>() - 0.5) * 1e3;
            let ia = Interval::point(a);
            let ib = Interval::point(b);
            assert!(ia.add(ib).contains(a + b));
            assert!(ia.sub(ib).contains(a - b));
            assert!(ia.mul(ib).contains(a * b));
            if b.abs() > 1e-6 {
                assert!(ia.div(ib).contains(a / b));
            }
            let p = a.abs();
            assert!(Interval::point(p).sqrt().contains(p.sqrt()));
        }
    }

    #[test]
    fn soundness_fuzz_composites() {
        // composite chains mirror the certifier formulas
        let mut rng = crate::matcore::random::rng_from_seed(101);
        for _ in 0..100_000 {
            let d: f64 = rng.gen::<f64>() * 0.004 + 1e-12;
            let id = Interval::point(d);
            // (1+d)/sqrt(2-(1+d)^2)
            let s = Interval::point(1.0).add(id);
            let inner = Interval::point(2.0).sub(s.mul(s));
            let iv = s.div(inner.sqrt());
            let pv = (1.0 + d) / (2.0 - (1.0 + d) * (1.0 + d)).sqrt();
            assert!(iv.contains(pv), "{iv} vs {pv}");
            let e = id.exp();
            assert!(e.contains(d.exp()));
        }
    }

    #[test]
    fn widths_stay_tight() {
        // a few chained ops should cost only a few ulps
        let d = Interval::point(2e-7);
        let s = Interval::point(1.0).add(d);
        let val = s.div(Interval::point(2.0).sub(s.mul(s)).sqrt());
        assert!(val.width() < 1e-12);
    }

    #[test]
    fn inflate_preserves_containment() {
        let x = Interval::from_ratio(1, 7);
        let w = x.inflate(2.0);
        assert!(w.lo() <= x.lo() && x.hi() <= w.hi());
        assert!(w.width() >= 1.9 * x.width());
    }

    #[test]
    fn comparisons() {
        let a = Interval::new(0.0, 1.0);
        let b = Interval::new(1.5, 2.0);
        assert!(a.provably_le(&b));
        assert!(b.provably_gt(&a));
        assert!(!b.provably_le(&a));
    }
}
