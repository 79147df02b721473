//! Test oracles: exact rational evaluation of circuits and a high-precision
//! point Newton iteration.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use algpath::circuit::{ArithmeticDomain, Circuit, System};
use algpath::interval::{CPoint, ComplexBox, Dyadic, PointMatrix, PrecisionContext, Real, RealInterval};

pub type Q = BigRational;

pub trait ToQ {
    fn to_q(&self) -> Q;
}

impl ToQ for f64 {
    fn to_q(&self) -> Q {
        Q::from_float(*self).expect("finite double")
    }
}

impl ToQ for Dyadic {
    fn to_q(&self) -> Q {
        let sign = if self.is_negative() { Sign::Minus } else { Sign::Plus };
        let m = BigInt::from_biguint(sign, self.significand().clone());
        let e = self.exponent();
        let p = BigInt::from_biguint(Sign::Plus, BigUint::one() << e.unsigned_abs());
        if e >= 0 {
            Q::from_integer(m * p)
        } else {
            Q::new(m, p)
        }
    }
}

/// An exact complex rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Cq {
    pub re: Q,
    pub im: Q,
}

impl Cq {
    pub fn from_complex(z: Complex64) -> Self {
        Cq {
            re: z.re.to_q(),
            im: z.im.to_q(),
        }
    }

    pub fn from_point<E: Real + ToQ>(z: &CPoint<E>) -> Self {
        Cq {
            re: z.re.to_q(),
            im: z.im.to_q(),
        }
    }

    pub fn zero() -> Self {
        Cq {
            re: Q::zero(),
            im: Q::zero(),
        }
    }

    pub fn add(&self, o: &Cq) -> Cq {
        Cq {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Cq) -> Cq {
        Cq {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn mul(&self, o: &Cq) -> Cq {
        Cq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    /// Real ∞-norm `max(|re|, |im|)`.
    pub fn norm(&self) -> Q {
        let (a, b) = (self.re.abs(), self.im.abs());
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn to_f64(&self) -> Complex64 {
        use num_traits::ToPrimitive;
        Complex64::new(self.re.to_f64().unwrap(), self.im.to_f64().unwrap())
    }
}

pub fn norm_vec(v: &[Cq]) -> Q {
    v.iter().map(Cq::norm).fold(Q::zero(), |a, b| if b > a { b } else { a })
}

pub fn interval_contains<E: Real + ToQ>(x: &RealInterval<E>, q: &Q) -> bool {
    x.is_bounded() && x.lo().to_q() <= *q && *q <= x.hi().to_q()
}

pub fn box_contains<E: Real + ToQ>(b: &ComplexBox<E>, z: &Cq) -> bool {
    interval_contains(&b.re, &z.re) && interval_contains(&b.im, &z.im)
}

/// Exact evaluation of circuits over ℚ(i).
pub struct RationalArithmetic;

impl ArithmeticDomain for RationalArithmetic {
    type Value = Cq;

    fn constant(&self, c: Complex64) -> Cq {
        Cq::from_complex(c)
    }

    fn add(&self, a: &Cq, b: &Cq) -> Cq {
        a.add(b)
    }

    fn mul(&self, a: &Cq, b: &Cq) -> Cq {
        a.mul(b)
    }
}

/// Round-to-nearest complex point arithmetic over dyadics.
pub struct DyadicPoints {
    pub ctx: PrecisionContext,
}

impl ArithmeticDomain for DyadicPoints {
    type Value = CPoint<Dyadic>;

    fn constant(&self, c: Complex64) -> CPoint<Dyadic> {
        CPoint::from_complex(c)
    }

    fn add(&self, a: &CPoint<Dyadic>, b: &CPoint<Dyadic>) -> CPoint<Dyadic> {
        a.add(b, &self.ctx)
    }

    fn mul(&self, a: &CPoint<Dyadic>, b: &CPoint<Dyadic>) -> CPoint<Dyadic> {
        a.mul(b, &self.ctx)
    }
}

/// A zero found by the Newton oracle.
#[derive(Clone, Debug)]
pub struct OracleRoot {
    pub zeta: Vec<CPoint<Dyadic>>,
    /// `‖f(ζ)‖` evaluated exactly.
    pub residual: f64,
}

impl OracleRoot {
    pub fn to_complex(&self) -> Vec<Complex64> {
        self.zeta.iter().map(|z| z.to_complex()).collect()
    }

    pub fn to_q(&self) -> Vec<Cq> {
        self.zeta.iter().map(Cq::from_point).collect()
    }
}

/// Newton's method in 320-bit point arithmetic from `x0`; `None` if it does
/// not settle within 200 iterations.
pub fn newton_oracle(sys: &System, x0: &[Complex64]) -> Option<OracleRoot> {
    let ctx = PrecisionContext::dyadic(320);
    let dom = DyadicPoints { ctx };
    let n = x0.len();
    let mut x: Vec<CPoint<Dyadic>> = x0.iter().map(|&z| CPoint::from_complex(z)).collect();
    let tol = Dyadic::pow2(-280);
    for _ in 0..200 {
        let fx = sys.f().evaluate(&dom, &x).ok()?;
        let jac = sys.df().evaluate(&dom, &x).ok()?;
        let inv = PointMatrix::from_row_major(n, jac).ok()?.inverse(&ctx).ok()?;
        let step = inv.mul_vec(&fx, &ctx);
        x = x.iter().zip(&step).map(|(a, b)| a.sub(b, &ctx)).collect();
        let size = step
            .iter()
            .map(|z| if z.re.abs() > z.im.abs() { z.re.abs() } else { z.im.abs() })
            .fold(Dyadic::zero(), |a, b| if b > a { b } else { a });
        if size <= tol {
            let exact: Vec<Cq> = x.iter().map(Cq::from_point).collect();
            let fz = sys.f().evaluate(&RationalArithmetic, &exact).ok()?;
            use num_traits::ToPrimitive;
            return Some(OracleRoot {
                zeta: x,
                residual: norm_vec(&fz).to_f64().unwrap_or(f64::INFINITY),
            });
        }
        if !size.is_finite() {
            return None;
        }
    }
    None
}

/// `‖x − ζ‖` exactly, for a point with representable parts.
pub fn dist_q<E: Real + ToQ>(x: &[CPoint<E>], zeta: &[Cq]) -> Q {
    let d: Vec<Cq> = x.iter().zip(zeta).map(|(a, z)| Cq::from_point(a).sub(z)).collect();
    norm_vec(&d)
}

pub fn compile(src: &str) -> Circuit {
    algpath::circuit::parse_system(src).unwrap().to_circuit().unwrap()
}

/// Deterministic uniform doubles in `[0, 1)` for test corpora.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn complex(&mut self, s: f64) -> Complex64 {
        Complex64::new(self.range(-s, s), self.range(-s, s))
    }
}
