//! `f64` backend: round-to-nearest hardware arithmetic corrected to directed
//! rounding with error-free transformations (TwoSum, FMA residuals).

use super::{pow2_f64, PrecisionContext, PrecisionMode, Real, Round};

/// Below this magnitude FMA residuals may be inexact (gradual underflow), so
/// directed results are nudged unconditionally.
const UNDERFLOW_GUARD: f64 = 1.0e-290;

fn nudge(x: f64, round: Round, inexact_below: bool, inexact_above: bool) -> f64 {
    match round {
        Round::Nearest => x,
        Round::Down if inexact_below => x.next_down(),
        Round::Up if inexact_above => x.next_up(),
        _ => x,
    }
}

/// Directed rounding of an overflowed result: the exact value is finite, so
/// rounding toward zero from infinity lands on the largest finite double.
fn overflow(x: f64, round: Round) -> f64 {
    match round {
        Round::Down if x == f64::INFINITY => f64::MAX,
        Round::Up if x == f64::NEG_INFINITY => f64::MIN,
        _ => x,
    }
}

impl Real for f64 {
    const MODE: PrecisionMode = PrecisionMode::Fixed64;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn pow2(k: i64) -> Self {
        pow2_f64(k)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn neg(&self) -> Self {
        -*self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn mul_pow2(&self, k: i64) -> Self {
        if (-1022..=1023).contains(&k) {
            *self * pow2_f64(k)
        } else {
            // two exact steps when 2^k alone is not a normal double
            let h = k / 2;
            *self * pow2_f64(h) * pow2_f64(k - h)
        }
    }

    fn add(&self, rhs: &Self, round: Round, _ctx: &PrecisionContext) -> Self {
        let (a, b) = (*self, *rhs);
        let s = a + b;
        if round == Round::Nearest {
            return s;
        }
        if !s.is_finite() {
            return if a.is_finite() && b.is_finite() {
                overflow(s, round)
            } else {
                s
            };
        }
        // TwoSum: s + err == a + b exactly
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        nudge(s, round, err < 0.0, err > 0.0)
    }

    fn mul(&self, rhs: &Self, round: Round, _ctx: &PrecisionContext) -> Self {
        let (a, b) = (*self, *rhs);
        if a == 0.0 || b == 0.0 {
            // also resolves 0 · ∞ to 0, the value an endpoint product takes
            return 0.0;
        }
        let p = a * b;
        if round == Round::Nearest {
            return p;
        }
        if !p.is_finite() {
            return if a.is_finite() && b.is_finite() {
                overflow(p, round)
            } else {
                p
            };
        }
        if p.abs() < UNDERFLOW_GUARD {
            return nudge(p, round, true, true);
        }
        let err = a.mul_add(b, -p);
        nudge(p, round, err < 0.0, err > 0.0)
    }

    fn div(&self, rhs: &Self, round: Round, _ctx: &PrecisionContext) -> Self {
        let (a, b) = (*self, *rhs);
        let q = a / b;
        if round == Round::Nearest || q == 0.0 && a == 0.0 {
            return q;
        }
        if !q.is_finite() {
            return if a.is_finite() && b.is_finite() && b != 0.0 {
                overflow(q, round)
            } else {
                q
            };
        }
        if q.abs() < UNDERFLOW_GUARD || a.abs() < UNDERFLOW_GUARD {
            return nudge(q, round, true, true);
        }
        // a = q b + rem exactly; the true quotient is q + rem / b
        let rem = (-q).mul_add(b, a);
        let correction_positive = (rem > 0.0) == (b > 0.0) && rem != 0.0;
        let correction_negative = (rem < 0.0) == (b > 0.0) && rem != 0.0;
        nudge(q, round, correction_negative, correction_positive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::fixed64()
    }

    #[test]
    fn exact_sums_are_not_nudged() {
        assert_eq!(1.0.add(&2.0, Round::Down, &ctx()), 3.0);
        assert_eq!(1.0.add(&2.0, Round::Up, &ctx()), 3.0);
    }

    #[test]
    fn inexact_sum_brackets_the_exact_value() {
        let lo = 0.1.add(&0.2, Round::Down, &ctx());
        let hi = 0.1.add(&0.2, Round::Up, &ctx());
        assert_eq!(hi, lo.next_up());
    }

    #[test]
    fn inexact_product_brackets() {
        let lo = 0.1.mul(&0.1, Round::Down, &ctx());
        let hi = 0.1.mul(&0.1, Round::Up, &ctx());
        assert!(lo < hi);
        assert_eq!(hi, lo.next_up());
    }

    #[test]
    fn quotient_brackets_one_third() {
        let lo = 1.0.div(&3.0, Round::Down, &ctx());
        let hi = 1.0.div(&3.0, Round::Up, &ctx());
        assert_eq!(hi, lo.next_up());
        assert!(lo * 3.0 <= 1.0);
        let lo = (-1.0).div(&3.0, Round::Down, &ctx());
        let hi = (-1.0).div(&3.0, Round::Up, &ctx());
        assert_eq!(hi, lo.next_up());
        assert_eq!(4.0.div(&2.0, Round::Down, &ctx()), 2.0);
    }

    #[test]
    fn overflow_stays_sound() {
        let big = f64::MAX;
        assert_eq!(big.add(&big, Round::Up, &ctx()), f64::INFINITY);
        assert_eq!(big.add(&big, Round::Down, &ctx()), f64::MAX);
        assert_eq!(big.mul(&2.0, Round::Up, &ctx()), f64::INFINITY);
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(0.0.mul(&f64::INFINITY, Round::Down, &ctx()), 0.0);
    }
}
