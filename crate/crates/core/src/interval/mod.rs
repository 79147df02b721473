//! Interval arithmetic over representable numbers.
//!
//! Two number sets are supported, both behind the [`Real`] trait:
//!
//! * `f64` ("Fixed64"): IEEE-754 doubles with outward rounding. The unit
//!   roundoff is fixed and a precision raise aborts the computation.
//! * [`Dyadic`]: arbitrary-size integer significand times a power of two,
//!   rounded to a runtime number of significand bits that can be raised.
//!
//! Every operation takes an explicit [`PrecisionContext`]. Results satisfy, for
//! operands inside `[-M, M]` with `M >= 1`,
//!
//! ```text
//! [a,b] + [c,d] ⊆ [a+c - M u, b+d + M u]
//! [a,b] * [c,d] ⊆ [min(ac,ad,bc,bd) - M² u, max(ac,ad,bc,bd) + M² u]
//! ```
//!
//! where `u` is [`PrecisionContext::u_prec`].

mod dyadic;
mod fixed;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use dyadic::Dyadic;

/// Which number set backs the interval endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrecisionMode {
    Fixed64,
    Dyadic,
}

/// log2 of the unit roundoff used for the `f64` backend.
///
/// Directed rounding of a sum `s` with `|s| <= 2M` errs by less than one ulp of
/// `s`, which is at most `2M * 2^-52`; `2^-51` is the smallest power of two that
/// makes the addition bound hold for every `M >= 1`.
pub const FIXED64_U_PREC_LOG2: i64 = -51;

/// Working precision: backend plus significand size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    mode: PrecisionMode,
    bits: u32,
}

impl PrecisionContext {
    pub fn fixed64() -> Self {
        PrecisionContext {
            mode: PrecisionMode::Fixed64,
            bits: 53,
        }
    }

    /// Dyadic backend rounding to `bits` significand bits (at least 2).
    pub fn dyadic(bits: u32) -> Self {
        assert!(bits >= 2, "dyadic precision needs at least 2 bits");
        PrecisionContext {
            mode: PrecisionMode::Dyadic,
            bits,
        }
    }

    pub fn mode(&self) -> PrecisionMode {
        self.mode
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// log2 of the unit roundoff.
    pub fn u_prec_log2(&self) -> i64 {
        match self.mode {
            PrecisionMode::Fixed64 => FIXED64_U_PREC_LOG2,
            PrecisionMode::Dyadic => 1 - self.bits as i64,
        }
    }

    /// The unit roundoff as a double (flushes to zero below the `f64` range).
    pub fn u_prec(&self) -> f64 {
        pow2_f64(self.u_prec_log2())
    }

    /// The unit roundoff as an exact value of the backend `E`.
    pub fn u_prec_as<E: Real>(&self) -> E {
        E::pow2(self.u_prec_log2())
    }

    /// Doubles the number of significand bits.
    ///
    /// The `f64` backend cannot raise its precision and reports
    /// [`Error::PrecisionExhausted`].
    pub fn raise_precision(&self) -> Result<Self> {
        match self.mode {
            PrecisionMode::Fixed64 => Err(Error::PrecisionExhausted(
                "fixed 64-bit precision cannot be raised",
            )),
            PrecisionMode::Dyadic => Ok(PrecisionContext::dyadic(self.bits.saturating_mul(2))),
        }
    }

    /// Raises precision until `u_prec <= bound`.
    pub fn require_u_prec_at_most<E: Real>(&mut self, bound: &E) -> Result<()> {
        if !(*bound > E::zero()) {
            return Err(Error::PrecisionExhausted("unit roundoff bound is not positive"));
        }
        while self.u_prec_as::<E>() > *bound {
            *self = self.raise_precision()?;
        }
        Ok(())
    }
}

impl fmt::Display for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            PrecisionMode::Fixed64 => write!(f, "fixed64"),
            PrecisionMode::Dyadic => write!(f, "dyadic{}", self.bits),
        }
    }
}

pub(crate) fn pow2_f64(k: i64) -> f64 {
    if k < -1074 {
        0.0
    } else if k > 1023 {
        f64::INFINITY
    } else if k < -1022 {
        // subnormal range
        2f64.powi(-1022) * 2f64.powi((k + 1022) as i32)
    } else {
        2f64.powi(k as i32)
    }
}

/// Rounding direction for a single operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// A set of representable reals with directed-rounding arithmetic.
pub trait Real:
    Clone + fmt::Debug + fmt::Display + PartialEq + PartialOrd + Send + Sync + 'static
{
    const MODE: PrecisionMode;

    fn zero() -> Self;
    fn one() -> Self;
    /// Exact conversion; every finite double is representable in both backends.
    fn from_f64(x: f64) -> Self;
    /// Exact power of two.
    fn pow2(k: i64) -> Self;
    /// Nearest double.
    fn to_f64(&self) -> f64;
    fn is_finite(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    /// Multiplication by `2^k`, exact unless the backend under/overflows.
    fn mul_pow2(&self, k: i64) -> Self;

    fn add(&self, rhs: &Self, round: Round, ctx: &PrecisionContext) -> Self;
    fn mul(&self, rhs: &Self, round: Round, ctx: &PrecisionContext) -> Self;
    fn div(&self, rhs: &Self, round: Round, ctx: &PrecisionContext) -> Self;

    fn sub(&self, rhs: &Self, round: Round, ctx: &PrecisionContext) -> Self {
        self.add(&rhs.neg(), round, ctx)
    }
}

pub(crate) fn max_of<E: Real>(a: E, b: E) -> E {
    if b > a || a.partial_cmp(&a).is_none() {
        b
    } else {
        a
    }
}

pub(crate) fn min_of<E: Real>(a: E, b: E) -> E {
    if b < a || a.partial_cmp(&a).is_none() {
        b
    } else {
        a
    }
}

// ---------------------------------------------------------------------------
// Real intervals
// ---------------------------------------------------------------------------

/// A nonempty closed interval `[lo, hi]`; endpoints may be infinite in the
/// `f64` backend after overflow.
#[derive(Clone, Debug, PartialEq)]
pub struct RealInterval<E = f64> {
    lo: E,
    hi: E,
}

impl<E: Real> RealInterval<E> {
    /// Panics if `lo > hi` or an endpoint is NaN.
    pub fn new(lo: E, hi: E) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        RealInterval { lo, hi }
    }

    pub fn try_new(lo: E, hi: E) -> Option<Self> {
        (lo <= hi).then_some(RealInterval { lo, hi })
    }

    pub fn point(x: E) -> Self {
        RealInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        Self::point(E::zero())
    }

    /// `[-r, r]` for `r >= 0`.
    pub fn symmetric(r: E) -> Self {
        RealInterval {
            lo: r.neg(),
            hi: r,
        }
    }

    pub fn from_f64(lo: f64, hi: f64) -> Self {
        Self::new(E::from_f64(lo), E::from_f64(hi))
    }

    pub fn lo(&self) -> &E {
        &self.lo
    }

    pub fn hi(&self) -> &E {
        &self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_exact_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn contains(&self, x: &E) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        RealInterval {
            lo: min_of(self.lo.clone(), other.lo.clone()),
            hi: max_of(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn neg(&self) -> Self {
        RealInterval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn add(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        RealInterval {
            lo: self.lo.add(&rhs.lo, Round::Down, ctx),
            hi: self.hi.add(&rhs.hi, Round::Up, ctx),
        }
    }

    pub fn sub(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        RealInterval {
            lo: self.lo.sub(&rhs.hi, Round::Down, ctx),
            hi: self.hi.sub(&rhs.lo, Round::Up, ctx),
        }
    }

    pub fn mul(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return Self::zero();
        }
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo = pairs[0].0.mul(pairs[0].1, Round::Down, ctx);
        let mut hi = pairs[0].0.mul(pairs[0].1, Round::Up, ctx);
        for (a, b) in &pairs[1..] {
            lo = min_of(lo, a.mul(b, Round::Down, ctx));
            hi = max_of(hi, a.mul(b, Round::Up, ctx));
        }
        RealInterval { lo, hi }
    }

    /// Product with an exact scalar.
    pub fn scale(&self, c: &E, ctx: &PrecisionContext) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let a = self.lo.mul(c, Round::Down, ctx);
        let b = self.hi.mul(c, Round::Down, ctx);
        let a_up = self.lo.mul(c, Round::Up, ctx);
        let b_up = self.hi.mul(c, Round::Up, ctx);
        if *c > E::zero() {
            RealInterval { lo: a, hi: b_up }
        } else {
            RealInterval { lo: b, hi: a_up }
        }
    }

    /// `max(|lo|, |hi|)`, exact.
    pub fn mag(&self) -> E {
        max_of(self.lo.abs(), self.hi.abs())
    }

    /// `hi - lo`, rounded up.
    pub fn width(&self, ctx: &PrecisionContext) -> E {
        self.hi.sub(&self.lo, Round::Up, ctx)
    }

    /// A representable member close to the center.
    pub fn mid(&self, ctx: &PrecisionContext) -> E {
        if self.lo == self.hi {
            return self.lo.clone();
        }
        if !self.is_bounded() {
            // an unbounded interval has no center; pick a finite member if any
            return if self.lo.is_finite() {
                self.lo.clone()
            } else if self.hi.is_finite() {
                self.hi.clone()
            } else {
                E::zero()
            };
        }
        let half_sum = self
            .lo
            .mul_pow2(-1)
            .add(&self.hi.mul_pow2(-1), Round::Nearest, ctx);
        min_of(max_of(half_sum, self.lo.clone()), self.hi.clone())
    }

    /// Outward enclosure of `1/r` for `r > 0`.
    pub fn reciprocal_of(r: &E, ctx: &PrecisionContext) -> Self {
        let one = E::one();
        RealInterval {
            lo: one.div(r, Round::Down, ctx),
            hi: one.div(r, Round::Up, ctx),
        }
    }
}

impl<E: Real> fmt::Display for RealInterval<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

// ---------------------------------------------------------------------------
// Complex points and boxes
// ---------------------------------------------------------------------------

/// A complex number with representable parts.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoint<E = f64> {
    pub re: E,
    pub im: E,
}

impl<E: Real> CPoint<E> {
    pub fn new(re: E, im: E) -> Self {
        CPoint { re, im }
    }

    pub fn zero() -> Self {
        CPoint::new(E::zero(), E::zero())
    }

    pub fn one() -> Self {
        CPoint::new(E::one(), E::zero())
    }

    pub fn from_complex(z: Complex64) -> Self {
        CPoint::new(E::from_f64(z.re), E::from_f64(z.im))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Real ∞-norm `max(|re|, |im|)`.
    pub fn norm(&self) -> E {
        max_of(self.re.abs(), self.im.abs())
    }

    pub fn neg(&self) -> Self {
        CPoint::new(self.re.neg(), self.im.neg())
    }

    pub fn add(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        CPoint::new(
            self.re.add(&rhs.re, Round::Nearest, ctx),
            self.im.add(&rhs.im, Round::Nearest, ctx),
        )
    }

    pub fn sub(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        CPoint::new(
            self.re.sub(&rhs.re, Round::Nearest, ctx),
            self.im.sub(&rhs.im, Round::Nearest, ctx),
        )
    }

    pub fn mul(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        let n = Round::Nearest;
        let re = self
            .re
            .mul(&rhs.re, n, ctx)
            .sub(&self.im.mul(&rhs.im, n, ctx), n, ctx);
        let im = self
            .re
            .mul(&rhs.im, n, ctx)
            .add(&self.im.mul(&rhs.re, n, ctx), n, ctx);
        CPoint::new(re, im)
    }

    pub fn scale(&self, c: &E, ctx: &PrecisionContext) -> Self {
        CPoint::new(
            self.re.mul(c, Round::Nearest, ctx),
            self.im.mul(c, Round::Nearest, ctx),
        )
    }

    /// Unchecked complex division.
    pub fn div(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        let n = Round::Nearest;
        // scale by the larger component to avoid overflow in |rhs|²
        let s = rhs.norm();
        let c = rhs.re.div(&s, n, ctx);
        let d = rhs.im.div(&s, n, ctx);
        let denom = c.mul(&c, n, ctx).add(&d.mul(&d, n, ctx), n, ctx);
        let conj = CPoint::new(c, d.neg());
        let num = self.mul(&conj, ctx);
        CPoint::new(
            num.re.div(&denom, n, ctx).div(&s, n, ctx),
            num.im.div(&denom, n, ctx).div(&s, n, ctx),
        )
    }
}

impl<E: Real> fmt::Display for CPoint<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

/// Rectangular enclosure of complex numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBox<E = f64> {
    pub re: RealInterval<E>,
    pub im: RealInterval<E>,
}

impl<E: Real> ComplexBox<E> {
    pub fn new(re: RealInterval<E>, im: RealInterval<E>) -> Self {
        ComplexBox { re, im }
    }

    pub fn point(z: &CPoint<E>) -> Self {
        ComplexBox::new(
            RealInterval::point(z.re.clone()),
            RealInterval::point(z.im.clone()),
        )
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::point(&CPoint::from_complex(z))
    }

    pub fn real(x: RealInterval<E>) -> Self {
        ComplexBox::new(x, RealInterval::zero())
    }

    pub fn zero() -> Self {
        ComplexBox::new(RealInterval::zero(), RealInterval::zero())
    }

    pub fn one() -> Self {
        Self::point(&CPoint::one())
    }

    /// The unit ball of the real ∞-norm: `[-1,1] + [-1,1]i`.
    pub fn unit() -> Self {
        ComplexBox::new(
            RealInterval::symmetric(E::one()),
            RealInterval::symmetric(E::one()),
        )
    }

    pub fn is_bounded(&self) -> bool {
        self.re.is_bounded() && self.im.is_bounded()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_exact_zero() && self.im.is_exact_zero()
    }

    pub fn contains(&self, z: &CPoint<E>) -> bool {
        self.re.contains(&z.re) && self.im.contains(&z.im)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.re.is_subset_of(&other.re) && self.im.is_subset_of(&other.im)
    }

    pub fn neg(&self) -> Self {
        ComplexBox::new(self.re.neg(), self.im.neg())
    }

    pub fn add(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        ComplexBox::new(self.re.add(&rhs.re, ctx), self.im.add(&rhs.im, ctx))
    }

    pub fn sub(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        ComplexBox::new(self.re.sub(&rhs.re, ctx), self.im.sub(&rhs.im, ctx))
    }

    /// Complex product: `re = Z.re W.re - Z.im W.im`, `im = Z.re W.im + Z.im W.re`.
    pub fn mul(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return Self::zero();
        }
        let re = self
            .re
            .mul(&rhs.re, ctx)
            .sub(&self.im.mul(&rhs.im, ctx), ctx);
        let im = self
            .re
            .mul(&rhs.im, ctx)
            .add(&self.im.mul(&rhs.re, ctx), ctx);
        ComplexBox::new(re, im)
    }

    /// Product with an exact complex scalar.
    pub fn mul_point(&self, c: &CPoint<E>, ctx: &PrecisionContext) -> Self {
        if c.im.is_zero() {
            return self.scale_exact(&c.re, ctx);
        }
        let re = self
            .re
            .scale(&c.re, ctx)
            .sub(&self.im.scale(&c.im, ctx), ctx);
        let im = self
            .re
            .scale(&c.im, ctx)
            .add(&self.im.scale(&c.re, ctx), ctx);
        ComplexBox::new(re, im)
    }

    /// Product with an exact real scalar.
    pub fn scale_exact(&self, c: &E, ctx: &PrecisionContext) -> Self {
        ComplexBox::new(self.re.scale(c, ctx), self.im.scale(c, ctx))
    }

    /// Product with a real interval.
    pub fn scale(&self, s: &RealInterval<E>, ctx: &PrecisionContext) -> Self {
        ComplexBox::new(self.re.mul(s, ctx), self.im.mul(s, ctx))
    }

    /// `self · ([-1,1] + [-1,1]i)`, which is `[-m, m] + [-m, m]i` with
    /// `m = |re| + |im|` rounded up.
    pub fn mul_unit(&self, ctx: &PrecisionContext) -> Self {
        let m = self.re.mag().add(&self.im.mag(), Round::Up, ctx);
        ComplexBox::new(RealInterval::symmetric(m.clone()), RealInterval::symmetric(m))
    }

    /// Adds `[-r, r]` to both parts.
    pub fn inflate(&self, r: &E, ctx: &PrecisionContext) -> Self {
        let ball = RealInterval::symmetric(r.clone());
        ComplexBox::new(self.re.add(&ball, ctx), self.im.add(&ball, ctx))
    }

    /// Real ∞-norm magnitude `sup |z|`, exact.
    pub fn mag(&self) -> E {
        max_of(self.re.mag(), self.im.mag())
    }

    pub fn width(&self, ctx: &PrecisionContext) -> E {
        max_of(self.re.width(ctx), self.im.width(ctx))
    }

    pub fn mid(&self, ctx: &PrecisionContext) -> CPoint<E> {
        CPoint::new(self.re.mid(ctx), self.im.mid(ctx))
    }

    pub fn hull(&self, other: &Self) -> Self {
        ComplexBox::new(self.re.hull(&other.re), self.im.hull(&other.im))
    }
}

impl<E: Real> fmt::Display for ComplexBox<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

// ---------------------------------------------------------------------------
// Vectors and matrices
// ---------------------------------------------------------------------------

pub type PointVector<E = f64> = Vec<CPoint<E>>;

/// A vector of complex boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxVector<E = f64>(pub Vec<ComplexBox<E>>);

impl<E: Real> BoxVector<E> {
    pub fn new(entries: Vec<ComplexBox<E>>) -> Self {
        BoxVector(entries)
    }

    pub fn from_points(x: &[CPoint<E>]) -> Self {
        BoxVector(x.iter().map(ComplexBox::point).collect())
    }

    /// `x + rB`, with outward-rounded endpoints.
    pub fn ball(x: &[CPoint<E>], r: &E, ctx: &PrecisionContext) -> Self {
        BoxVector(
            x.iter()
                .map(|z| ComplexBox::point(z).inflate(r, ctx))
                .collect(),
        )
    }

    /// The unit ball `B` of dimension `n`.
    pub fn unit(n: usize) -> Self {
        BoxVector(vec![ComplexBox::unit(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[ComplexBox<E>] {
        &self.0
    }

    pub fn is_bounded(&self) -> bool {
        self.0.iter().all(ComplexBox::is_bounded)
    }

    pub fn contains(&self, x: &[CPoint<E>]) -> bool {
        x.len() == self.0.len() && self.0.iter().zip(x).all(|(b, z)| b.contains(z))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset_of(b))
    }

    pub fn add(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        check_dim(self.len(), rhs.len())?;
        Ok(BoxVector(
            self.0.iter().zip(&rhs.0).map(|(a, b)| a.add(b, ctx)).collect(),
        ))
    }

    pub fn sub(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        check_dim(self.len(), rhs.len())?;
        Ok(BoxVector(
            self.0.iter().zip(&rhs.0).map(|(a, b)| a.sub(b, ctx)).collect(),
        ))
    }

    /// `sup_{x,y∈X} ‖x − y‖`, rounded up; `+∞` when unbounded.
    pub fn width(&self, ctx: &PrecisionContext) -> E {
        self.0
            .iter()
            .map(|b| b.width(ctx))
            .fold(E::zero(), max_of)
    }

    /// `sup_{x∈X} ‖x‖`, exact.
    pub fn magnitude(&self) -> E {
        self.0.iter().map(ComplexBox::mag).fold(E::zero(), max_of)
    }

    /// A representable member of `X`, componentwise close to the center.
    pub fn midpoint(&self, ctx: &PrecisionContext) -> PointVector<E> {
        self.0.iter().map(|b| b.mid(ctx)).collect()
    }

    /// Hausdorff distance for the ∞-norm, rounded up.
    pub fn hausdorff(&self, other: &Self, ctx: &PrecisionContext) -> Result<E> {
        check_dim(self.len(), other.len())?;
        // |a − b| rounded up, subtracting the smaller from the larger
        let abs_diff = |a: &E, b: &E| {
            if a >= b {
                a.sub(b, Round::Up, ctx)
            } else {
                b.sub(a, Round::Up, ctx)
            }
        };
        let dist = |x: &RealInterval<E>, y: &RealInterval<E>| {
            max_of(abs_diff(&x.lo, &y.lo), abs_diff(&x.hi, &y.hi))
        };
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| max_of(dist(&x.re, &y.re), dist(&x.im, &y.im)))
            .fold(E::zero(), max_of))
    }
}

impl<E: Real> fmt::Display for BoxVector<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

pub fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A square matrix of complex boxes, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxMatrix<E = f64> {
    n: usize,
    entries: Vec<ComplexBox<E>>,
}

impl<E: Real> BoxMatrix<E> {
    pub fn from_row_major(n: usize, entries: Vec<ComplexBox<E>>) -> Result<Self> {
        check_dim(n * n, entries.len())?;
        Ok(BoxMatrix { n, entries })
    }

    pub fn from_points(m: &PointMatrix<E>) -> Self {
        BoxMatrix {
            n: m.n,
            entries: m.entries.iter().map(ComplexBox::point).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_points(&PointMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ComplexBox<E> {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[ComplexBox<E>] {
        &self.entries
    }

    /// Row-wise sums of complex box products.
    pub fn mat_vec(&self, v: &BoxVector<E>, ctx: &PrecisionContext) -> Result<BoxVector<E>> {
        check_dim(self.n, v.len())?;
        Ok(BoxVector(
            (0..self.n)
                .map(|i| {
                    let row = &self.entries[i * self.n..(i + 1) * self.n];
                    row.iter()
                        .zip(&v.0)
                        .map(|(a, b)| a.mul(b, ctx))
                        .reduce(|acc, p| acc.add(&p, ctx))
                        .unwrap_or_else(ComplexBox::zero)
                })
                .collect(),
        ))
    }

    pub fn midpoint(&self, ctx: &PrecisionContext) -> PointMatrix<E> {
        PointMatrix {
            n: self.n,
            entries: self.entries.iter().map(|b| b.mid(ctx)).collect(),
        }
    }

    pub fn magnitude(&self) -> E {
        self.entries.iter().map(ComplexBox::mag).fold(E::zero(), max_of)
    }

    pub fn contains(&self, m: &PointMatrix<E>) -> bool {
        self.n == m.n && self.entries.iter().zip(&m.entries).all(|(b, z)| b.contains(z))
    }
}

/// A square matrix of representable complex numbers, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMatrix<E = f64> {
    n: usize,
    entries: Vec<CPoint<E>>,
}

impl<E: Real> PointMatrix<E> {
    pub fn from_row_major(n: usize, entries: Vec<CPoint<E>>) -> Result<Self> {
        check_dim(n * n, entries.len())?;
        Ok(PointMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| CPoint::one()).collect())
    }

    pub fn diagonal(d: Vec<CPoint<E>>) -> Self {
        let n = d.len();
        let mut entries = vec![CPoint::zero(); n * n];
        for (i, z) in d.into_iter().enumerate() {
            entries[i * n + i] = z;
        }
        PointMatrix { n, entries }
    }

    pub fn from_complex_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            entries.extend(row.iter().map(|z| CPoint::from_complex(*z)));
        }
        Ok(PointMatrix { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &CPoint<E> {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: CPoint<E>) {
        self.entries[i * self.n + j] = z;
    }

    pub fn entries(&self) -> &[CPoint<E>] {
        &self.entries
    }

    pub fn to_complex_rows(&self) -> Vec<Vec<Complex64>> {
        self.entries
            .chunks(self.n)
            .map(|row| row.iter().map(CPoint::to_complex).collect())
            .collect()
    }

    /// Interval product `self · v`, the point matrix taken as singleton boxes.
    pub fn apply(&self, v: &BoxVector<E>, ctx: &PrecisionContext) -> Result<BoxVector<E>> {
        check_dim(self.n, v.len())?;
        Ok(BoxVector(
            (0..self.n)
                .map(|i| {
                    self.entries[i * self.n..(i + 1) * self.n]
                        .iter()
                        .zip(&v.0)
                        .map(|(a, b)| b.mul_point(a, ctx))
                        .reduce(|acc, p| acc.add(&p, ctx))
                        .unwrap_or_else(ComplexBox::zero)
                })
                .collect(),
        ))
    }

    /// Interval product `self · M`.
    pub fn apply_matrix(&self, m: &BoxMatrix<E>, ctx: &PrecisionContext) -> Result<BoxMatrix<E>> {
        check_dim(self.n, m.n)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let e = (0..n)
                    .map(|k| m.get(k, j).mul_point(self.get(i, k), ctx))
                    .reduce(|acc, p| acc.add(&p, ctx))
                    .unwrap_or_else(ComplexBox::zero);
                entries.push(e);
            }
        }
        Ok(BoxMatrix { n, entries })
    }

    /// Unchecked inverse by Gaussian elimination with partial pivoting.
    ///
    /// A pivot whose norm is zero, or below `n · u_prec` times the largest
    /// entry of the input, is reported as [`Error::SingularJacobian`].
    pub fn inverse(&self, ctx: &PrecisionContext) -> Result<Self> {
        let n = self.n;
        let scale = self.entries.iter().map(CPoint::norm).fold(E::zero(), max_of);
        if !scale.is_finite() || scale.is_zero() {
            return Err(Error::SingularJacobian);
        }
        let threshold = scale.mul(
            &ctx.u_prec_as::<E>().mul(&E::from_f64(n as f64), Round::Up, ctx),
            Round::Up,
            ctx,
        );
        let mut a = self.entries.clone();
        let mut inv = PointMatrix::<E>::identity(n).entries;
        for col in 0..n {
            let (pivot_row, pivot_norm) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, E::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_norm > threshold) {
                return Err(Error::SingularJacobian);
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                    inv.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pivot = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] = a[col * n + j].div(&pivot, ctx);
                inv[col * n + j] = inv[col * n + j].div(&pivot, ctx);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let da = factor.mul(&a[col * n + j], ctx);
                    a[r * n + j] = a[r * n + j].sub(&da, ctx);
                    let di = factor.mul(&inv[col * n + j], ctx);
                    inv[r * n + j] = inv[r * n + j].sub(&di, ctx);
                }
            }
        }
        if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::SingularJacobian);
        }
        Ok(PointMatrix { n, entries: inv })
    }

    /// Point product `self · x` in round-to-nearest arithmetic.
    pub fn mul_vec(&self, x: &[CPoint<E>], ctx: &PrecisionContext) -> PointVector<E> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).mul(&x[j], ctx))
                    .fold(CPoint::zero(), |acc, p| acc.add(&p, ctx))
            })
            .collect()
    }
}
