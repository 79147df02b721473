//! Moore boxes and the interval certification predicate.
//!
//! For a square system `f` with interval extensions `□f`, `□df`, a point `x`,
//! a radius `r` and a matrix `A`, the Krawczyk image is
//!
//! ```text
//! K = −r⁻¹ A·□f(x) + (I − A·□df(x + rB))·B
//! ```
//!
//! where `B` is the unit ball of the real ∞-norm on ℂⁿ. If `‖K‖ ≤ ρ < 1` then
//! `f` has a unique zero in `x + rB`, and `(x, r, A)` is a ρ-Moore box.

use serde::{Deserialize, Serialize};

use crate::circuit::{BoxSystem, ParametricSystem};
use crate::error::{Error, Result};
use crate::interval::{
    check_dim, BoxVector, CPoint, PointMatrix, PointVector, PrecisionContext, Real,
    RealInterval, Round,
};

#[derive(Clone, Debug, PartialEq)]
pub struct MooreBox<E = f64> {
    pub x: PointVector<E>,
    pub r: E,
    pub a: PointMatrix<E>,
    pub rho: E,
}

impl<E: Real> MooreBox<E> {
    pub fn new(x: PointVector<E>, r: E, a: PointMatrix<E>, rho: E) -> Result<Self> {
        if !(r > E::zero()) || !r.is_finite() {
            return Err(Error::InvalidArgument("Moore box radius must be positive".into()));
        }
        if !(rho > E::zero() && rho < E::one()) {
            return Err(Error::InvalidArgument("contraction factor must lie in (0, 1)".into()));
        }
        check_dim(x.len(), a.dim())?;
        Ok(MooreBox { x, r, a, rho })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The enclosure `x + rB` of the associated zero.
    pub fn ball(&self, ctx: &PrecisionContext) -> BoxVector<E> {
        BoxVector::ball(&self.x, &self.r, ctx)
    }

    /// Re-runs the certification predicate at the box's own ρ.
    pub fn certifies<S: BoxSystem<E>>(&self, sys: &S, ctx: &PrecisionContext) -> Result<bool> {
        certify(sys, &self.x, &self.r, &self.a, &self.rho, ctx)
    }

    pub fn to_record(&self) -> MooreBoxRecord {
        MooreBoxRecord {
            x: self.x.iter().map(|z| [z.re.to_f64(), z.im.to_f64()]).collect(),
            r: self.r.to_f64(),
            a: self
                .a
                .to_complex_rows()
                .into_iter()
                .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            rho: self.rho.to_f64(),
        }
    }

    /// Whether `x + rB` and `other`'s ball are disjoint (with outward
    /// rounding, so touching balls count as overlapping).
    pub fn is_disjoint_from(&self, other: &Self, ctx: &PrecisionContext) -> bool {
        let (p, q) = (self.ball(ctx), other.ball(ctx));
        p.0.iter().zip(&q.0).any(|(a, b)| {
            a.re.hi() < b.re.lo() || b.re.hi() < a.re.lo() || a.im.hi() < b.im.lo() || b.im.hi() < a.im.lo()
        })
    }
}

/// JSON form `{"x": [[re,im],…], "r": …, "A": [[[re,im],…],…], "rho": …}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MooreBoxRecord {
    pub x: Vec<[f64; 2]>,
    pub r: f64,
    #[serde(rename = "A")]
    pub a: Vec<Vec<[f64; 2]>>,
    pub rho: f64,
}

impl MooreBoxRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))
    }

    /// Converts to a box over `E`. The conversion from doubles is exact.
    pub fn to_box<E: Real>(&self) -> Result<MooreBox<E>> {
        let finite = |v: f64| {
            if v.is_finite() {
                Ok(E::from_f64(v))
            } else {
                Err(Error::Json("non-finite number in Moore box".into()))
            }
        };
        let point = |z: &[f64; 2]| Ok(CPoint::new(finite(z[0])?, finite(z[1])?));
        let x = self.x.iter().map(point).collect::<Result<Vec<_>>>()?;
        let n = x.len();
        if self.a.len() != n || self.a.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.a.len(),
            });
        }
        let a = self.a.iter().flatten().map(point).collect::<Result<Vec<_>>>()?;
        MooreBox::new(x, finite(self.r)?, PointMatrix::from_row_major(n, a)?, finite(self.rho)?)
    }
}

/// Computes `K = −r⁻¹A·□f(x) + (I − A·□df(x+rB))·B`.
pub fn krawczyk_image<E: Real, S: BoxSystem<E>>(
    sys: &S,
    x: &[CPoint<E>],
    r: &E,
    a: &PointMatrix<E>,
    ctx: &PrecisionContext,
) -> Result<BoxVector<E>> {
    let n = sys.dim();
    check_dim(n, x.len())?;
    check_dim(n, a.dim())?;

    let fx = sys.eval_f(&BoxVector::from_points(x), ctx)?;
    let inv_r = RealInterval::reciprocal_of(r, ctx);
    let first = a.apply(&fx, ctx)?;

    let jac = sys.eval_df(&BoxVector::ball(x, r, ctx), ctx)?;
    let ajac = a.apply_matrix(&jac, ctx)?;

    let one = RealInterval::point(E::one());
    let k = (0..n)
        .map(|i| {
            // row i of (I − A·J)·B is [−s, s] + [−s, s]i with s = Σ_j |re| + |im|
            let s = (0..n).fold(E::zero(), |acc, j| {
                let e = ajac.get(i, j);
                let re = if i == j { one.sub(&e.re, ctx) } else { e.re.neg() };
                let m = re.mag().add(&e.im.mag(), Round::Up, ctx);
                acc.add(&m, Round::Up, ctx)
            });
            first.0[i].scale(&inv_r, ctx).neg().inflate(&s, ctx)
        })
        .collect();
    Ok(BoxVector(k))
}

/// The certification predicate: `‖K‖ ≤ ρ`. A `true` answer proves that `f`
/// has a unique zero in `x + rB`; `false` proves nothing.
pub fn certify<E: Real, S: BoxSystem<E>>(
    sys: &S,
    x: &[CPoint<E>],
    r: &E,
    a: &PointMatrix<E>,
    rho: &E,
    ctx: &PrecisionContext,
) -> Result<bool> {
    let k = krawczyk_image(sys, x, r, a, ctx)?;
    Ok(k.is_bounded() && k.magnitude() <= *rho)
}

/// Certifies `(x, r, A)` for `F_t` simultaneously for every `t ∈ T`.
pub fn certify_over_interval<E: Real>(
    sys: &ParametricSystem,
    t: &RealInterval<E>,
    b: &MooreBox<E>,
    rho: &E,
    ctx: &PrecisionContext,
) -> Result<bool> {
    certify(&sys.at(t.clone()), &b.x, &b.r, &b.a, rho, ctx)
}
