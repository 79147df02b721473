//! Dyadic numbers `m · 2^e` with an arbitrary-size significand, rounded to the
//! context's number of significand bits after every operation.
//!
//! Additions round to `bits + 1` significand bits. A sum of two operands in
//! `[-M, M]` can reach `2M`, and the extra bit keeps the rounding error below
//! `M · 2^(1-bits)`, the unit roundoff of the context.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

use super::{PrecisionContext, PrecisionMode, Real, Round};

/// A finite dyadic rational. Canonical form: the significand is odd, or zero
/// with a zero exponent and positive sign.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    negative: bool,
    mag: BigUint,
    exp: i64,
}

impl Dyadic {
    /// `(-1)^negative · mag · 2^exp`, normalized but not rounded.
    pub fn from_parts(negative: bool, mag: BigUint, exp: i64) -> Self {
        let mut d = Dyadic { negative, mag, exp };
        d.normalize();
        d
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn significand(&self) -> &BigUint {
        &self.mag
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Number of significand bits in the canonical form.
    pub fn significant_bits(&self) -> u64 {
        self.mag.bits()
    }

    fn normalize(&mut self) {
        match self.mag.trailing_zeros() {
            None => {
                self.negative = false;
                self.exp = 0;
            }
            Some(0) => {}
            Some(tz) => {
                self.mag >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    /// Position one above the leading bit: `2^(top-1) <= |x| < 2^top`.
    fn top(&self) -> i64 {
        self.exp + self.mag.bits() as i64
    }

    /// Rounds `(-1)^negative · mag · 2^exp` to `bits` significand bits.
    fn round(negative: bool, mag: BigUint, exp: i64, bits: u64, round: Round) -> Self {
        let len = mag.bits();
        if len <= bits {
            return Dyadic::from_parts(negative, mag, exp);
        }
        let shift = len - bits;
        let kept = &mag >> shift;
        let tz = mag.trailing_zeros().unwrap_or(0);
        let inexact = tz < shift;
        let away = match round {
            Round::Down => negative && inexact,
            Round::Up => !negative && inexact,
            Round::Nearest => {
                let half = mag.bit(shift - 1);
                let sticky = tz < shift - 1;
                half && (sticky || kept.bit(0))
            }
        };
        let kept = if away { kept + 1u32 } else { kept };
        Dyadic::from_parts(negative, kept, exp + shift as i64)
    }

    fn cmp_mag(&self, other: &Dyadic) -> Ordering {
        if self.mag.bits() == 0 || other.mag.bits() == 0 {
            return self.mag.bits().cmp(&other.mag.bits());
        }
        match self.top().cmp(&other.top()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // same leading position: align exponents
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.mag.cmp(&other.mag),
            Ordering::Greater => (&self.mag << (self.exp - other.exp) as u64).cmp(&other.mag),
            Ordering::Less => self.mag.cmp(&(&other.mag << (other.exp - self.exp) as u64)),
        }
    }

    fn add_rounded(&self, rhs: &Dyadic, bits: u64, round: Round) -> Dyadic {
        if rhs.mag.bits() == 0 {
            return Dyadic::round(self.negative, self.mag.clone(), self.exp, bits, round);
        }
        if self.mag.bits() == 0 {
            return Dyadic::round(rhs.negative, rhs.mag.clone(), rhs.exp, bits, round);
        }
        let (big, small) = if self.cmp_mag(rhs) == Ordering::Less {
            (rhs, self)
        } else {
            (self, rhs)
        };
        // A far smaller operand only influences the rounding direction:
        // replace it by a one-bit sticky value well below the rounding point.
        let guard = bits as i64 + 3;
        let sticky;
        let small = if big.top() - small.top() > guard && small.top() < big.exp {
            let pos = (big.top() - guard - 1).min(big.exp - 2);
            sticky = Dyadic {
                negative: small.negative,
                mag: BigUint::from(1u32),
                exp: pos,
            };
            &sticky
        } else {
            small
        };
        let exp = big.exp.min(small.exp);
        let a = &big.mag << (big.exp - exp) as u64;
        let b = &small.mag << (small.exp - exp) as u64;
        if big.negative == small.negative {
            Dyadic::round(big.negative, a + b, exp, bits, round)
        } else {
            // |big| >= |small| (the sticky replacement preserves the order)
            Dyadic::round(big.negative, a - b, exp, bits, round)
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let sign = |d: &Dyadic| {
            if d.mag.bits() == 0 {
                0
            } else if d.negative {
                -1
            } else {
                1
            }
        };
        match sign(self).cmp(&sign(other)) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mag = self.cmp_mag(other);
        if self.negative {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}*2^{}",
            if self.negative { "-" } else { "" },
            self.mag,
            self.exp
        )
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

fn bits_of(ctx: &PrecisionContext) -> u64 {
    ctx.bits() as u64
}

impl Real for Dyadic {
    const MODE: PrecisionMode = PrecisionMode::Dyadic;

    fn zero() -> Self {
        Dyadic {
            negative: false,
            mag: BigUint::default(),
            exp: 0,
        }
    }

    fn one() -> Self {
        Dyadic {
            negative: false,
            mag: BigUint::from(1u32),
            exp: 0,
        }
    }

    /// Panics on a non-finite double: dyadic numbers never overflow.
    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite value {x} has no dyadic representation");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Dyadic::from_parts(negative, BigUint::from(mant), exp)
    }

    fn pow2(k: i64) -> Self {
        Dyadic {
            negative: false,
            mag: BigUint::from(1u32),
            exp: k,
        }
    }

    fn to_f64(&self) -> f64 {
        if self.mag.bits() == 0 {
            return 0.0;
        }
        let r = Dyadic::round(self.negative, self.mag.clone(), self.exp, 53, Round::Nearest);
        let m = r
            .mag
            .iter_u64_digits()
            .next()
            .unwrap_or(0) as f64;
        let v = m.mul_pow2(r.exp);
        if r.negative {
            -v
        } else {
            v
        }
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn is_zero(&self) -> bool {
        self.mag.bits() == 0
    }

    fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            negative: !self.negative,
            mag: self.mag.clone(),
            exp: self.exp,
        }
    }

    fn abs(&self) -> Self {
        Dyadic {
            negative: false,
            mag: self.mag.clone(),
            exp: self.exp,
        }
    }

    fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            negative: self.negative,
            mag: self.mag.clone(),
            exp: self.exp + k,
        }
    }

    fn add(&self, rhs: &Self, round: Round, ctx: &PrecisionContext) -> Self {
        self.add_rounded(rhs, bits_of(ctx) + 1, round)
    }

    fn mul(&self, rhs: &Self, round: Round, ctx: &PrecisionContext) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Dyadic::round(
            self.negative != rhs.negative,
            &self.mag * &rhs.mag,
            self.exp + rhs.exp,
            bits_of(ctx),
            round,
        )
    }

    /// Panics on division by zero.
    fn div(&self, rhs: &Self, round: Round, ctx: &PrecisionContext) -> Self {
        assert!(!rhs.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let bits = bits_of(ctx);
        let la = self.mag.bits() as i64;
        let lb = rhs.mag.bits() as i64;
        let shift = (bits as i64 + 2 + lb - la).max(0);
        let num = &self.mag << shift as u64;
        let quot = &num / &rhs.mag;
        let exact = &quot * &rhs.mag == num;
        let mut exp = self.exp - shift - rhs.exp;
        let quot = if exact {
            quot
        } else {
            // sticky bit below the kept precision
            exp -= 1;
            (quot << 1u32) + 1u32
        };
        Dyadic::round(self.negative != rhs.negative, quot, exp, bits, round)
    }
}
