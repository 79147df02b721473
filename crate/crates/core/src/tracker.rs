//! Certified continuation of a Moore box from `t = 0` to `t = 1`.
//!
//! [`track_plain`] certifies each step by evaluating the Krawczyk image with
//! the parameter ranging over an interval. [`track`] moves the box along a
//! polynomial predictor `𝒳(η)` and certifies the step by evaluating the
//! Krawczyk image in Taylor-model arithmetic on `[0, h]`.

use serde::Serialize;

use crate::circuit::ParametricSystem;
use crate::error::{Error, Result};
use crate::interval::{
    check_dim, BoxVector, CPoint, ComplexBox, PointMatrix, PointVector, PrecisionContext, Real,
    RealInterval, Round,
};
use crate::moore::{certify, certify_over_interval, MooreBox};
use crate::refine::{refine, RefineOptions};
use crate::taylor::{TaylorArithmetic, TaylorModel};

/// Contraction factor demanded of every step.
pub const STEP_RHO: f64 = 0.875;
/// Contraction factor the box is refined to before each step.
pub const REFINE_TAU: f64 = 0.125;
/// Step growth factor of the predictor tracker.
pub const GROWTH: f64 = 1.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictorKind {
    /// No predictor: interval-parameter stepping.
    None,
    Tangent,
    #[default]
    Hermite,
}

impl PredictorKind {
    /// Taylor-model order used to validate steps of this predictor.
    pub fn order(self) -> usize {
        match self {
            PredictorKind::None => 0,
            PredictorKind::Tangent => 2,
            PredictorKind::Hermite => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Certified,
    PrecisionFailure,
    BudgetExhausted,
    SingularJacobian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOptions {
    pub max_steps: u64,
    pub max_rejected: u64,
    /// Dyadic precision beyond this many bits counts as a precision failure.
    pub max_bits: u32,
    pub refine: RefineOptions,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            max_steps: 100_000,
            max_rejected: 1_000_000,
            max_bits: 4096,
            refine: RefineOptions::default(),
        }
    }
}

/// One accepted or rejected step trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: f64,
    pub h: f64,
    pub accepted: bool,
    pub r: f64,
    #[serde(rename = "magnitude_K")]
    pub magnitude_k: Option<f64>,
}

/// Data from the previous accepted step, for the Hermite predictor.
#[derive(Clone, Debug, PartialEq)]
pub struct History<E> {
    pub x_prev: PointVector<E>,
    pub v_prev: PointVector<E>,
    pub h_prev: E,
}

#[derive(Clone, Debug)]
pub struct PathState<E> {
    pub t: E,
    pub h: E,
    pub b: MooreBox<E>,
    pub history: Option<History<E>>,
    pub steps: u64,
    pub rejected: u64,
    pub ctx: PrecisionContext,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathResult<E> {
    pub status: PathStatus,
    pub steps: u64,
    pub rejected: u64,
    pub t_reached: f64,
    /// Present iff `status` is `Certified`.
    pub final_box: Option<MooreBox<E>>,
    /// Working precision at the end of the run.
    pub ctx: PrecisionContext,
}

fn e<E: Real>(x: f64) -> E {
    E::from_f64(x)
}

fn failure_status(err: &Error) -> Option<PathStatus> {
    match err {
        Error::PrecisionExhausted(_) => Some(PathStatus::PrecisionFailure),
        Error::StepBudgetExceeded(_) => Some(PathStatus::BudgetExhausted),
        Error::SingularJacobian => Some(PathStatus::SingularJacobian),
        _ => None,
    }
}

impl<E: Real> PathState<E> {
    fn new(start: &MooreBox<E>, h: E, ctx: PrecisionContext) -> Self {
        PathState {
            t: E::zero(),
            h,
            b: start.clone(),
            history: None,
            steps: 0,
            rejected: 0,
            ctx,
        }
    }

    fn finish(&self, status: PathStatus, final_box: Option<MooreBox<E>>) -> PathResult<E> {
        PathResult {
            status,
            steps: self.steps,
            rejected: self.rejected,
            t_reached: self.t_reached(),
            final_box,
            ctx: self.ctx,
        }
    }

    /// `t` as a double, rounded so that `t < 1` reports below 1.
    fn t_reached(&self) -> f64 {
        let t = self.t.to_f64();
        if self.t < E::one() && t >= 1.0 {
            1.0 - f64::EPSILON / 2.0
        } else {
            t
        }
    }

    fn check_bits(&self, opts: &TrackOptions) -> Result<()> {
        if self.ctx.bits() > opts.max_bits {
            return Err(Error::PrecisionExhausted("precision limit exceeded"));
        }
        Ok(())
    }

    fn refine_here(&mut self, sys: &ParametricSystem, opts: &TrackOptions) -> Result<()> {
        let f_t = sys.at(RealInterval::point(self.t.clone()));
        self.b = refine(&f_t, &self.b, &e(REFINE_TAU), &mut self.ctx, &opts.refine)?;
        self.check_bits(opts)
    }

    /// `h ← min(h, 1 − t)`, with `1 − t` rounded up; returns whether clamped.
    fn clamp(&mut self) -> bool {
        let rest = E::one().sub(&self.t, Round::Up, &self.ctx);
        if self.h >= rest {
            self.h = rest;
            true
        } else {
            false
        }
    }

    fn reject(&mut self, opts: &TrackOptions) -> Result<()> {
        self.rejected += 1;
        if self.rejected > opts.max_rejected {
            return Err(Error::StepBudgetExceeded(opts.max_rejected));
        }
        Ok(())
    }

    fn accept(&mut self, opts: &TrackOptions) -> Result<()> {
        self.steps += 1;
        if self.steps >= opts.max_steps && self.t < E::one() {
            return Err(Error::StepBudgetExceeded(opts.max_steps));
        }
        Ok(())
    }

    /// Refines the box at `t = 1` and re-checks it at `ρ = 7/8`.
    fn final_box(&mut self, sys: &ParametricSystem, opts: &TrackOptions) -> Result<MooreBox<E>> {
        self.refine_here(sys, opts)?;
        let f1 = sys.at(RealInterval::point(E::one()));
        if !certify(&f1, &self.b.x, &self.b.r, &self.b.a, &e(STEP_RHO), &self.ctx)? {
            return Err(Error::PrecisionExhausted("final box failed to re-certify"));
        }
        Ok(self.b.clone())
    }
}

fn run<E: Real>(
    state: &mut PathState<E>,
    mut body: impl FnMut(&mut PathState<E>) -> Result<()>,
    sys: &ParametricSystem,
    opts: &TrackOptions,
) -> Result<PathResult<E>> {
    let outcome = (|| {
        while state.t < E::one() {
            body(state)?;
        }
        state.final_box(sys, opts)
    })();
    match outcome {
        Ok(b) => Ok(state.finish(PathStatus::Certified, Some(b))),
        Err(err) => match failure_status(&err) {
            Some(status) => Ok(state.finish(status, None)),
            None => Err(err),
        },
    }
}

fn check_start<E: Real>(sys: &ParametricSystem, start: &MooreBox<E>) -> Result<()> {
    check_dim(sys.dim(), start.dim())
}

/// Interval-parameter tracking: certify `(x, r, A)` for all `t' ∈ [t, t+h]`,
/// doubling `h` after each success and halving it after each failure.
pub fn track_plain<E: Real>(
    sys: &ParametricSystem,
    start: &MooreBox<E>,
    ctx: PrecisionContext,
    opts: &TrackOptions,
) -> Result<PathResult<E>> {
    track_plain_observed(sys, start, ctx, opts, &mut |_| {})
}

pub fn track_plain_observed<E: Real>(
    sys: &ParametricSystem,
    start: &MooreBox<E>,
    ctx: PrecisionContext,
    opts: &TrackOptions,
    observer: &mut dyn FnMut(&TraceRecord),
) -> Result<PathResult<E>> {
    check_start(sys, start)?;
    let rho = e::<E>(STEP_RHO);
    let mut state = PathState::new(start, E::one(), ctx);
    run(
        &mut state,
        |st| {
            st.refine_here(sys, opts)?;
            st.h = st.h.mul_pow2(1);
            st.clamp();
            loop {
                let hi = st.t.add(&st.h, Round::Up, &st.ctx);
                let tt = RealInterval::new(st.t.clone(), hi.clone());
                let ok = certify_over_interval(sys, &tt, &st.b, &rho, &st.ctx)?;
                observer(&TraceRecord {
                    t: st.t.to_f64(),
                    h: st.h.to_f64(),
                    accepted: ok,
                    r: st.b.r.to_f64(),
                    magnitude_k: None,
                });
                if ok {
                    st.t = if hi > E::one() { E::one() } else { hi };
                    st.b.rho = rho.clone();
                    return st.accept(opts);
                }
                st.reject(opts)?;
                st.h = st.h.mul_pow2(-1);
                st.ctx.require_u_prec_at_most(&st.h)?;
                st.check_bits(opts)?;
            }
        },
        sys,
        opts,
    )
}

/// Tracks with a Taylor-model validated predictor. `PredictorKind::None`
/// delegates to [`track_plain`].
pub fn track<E: Real>(
    sys: &ParametricSystem,
    start: &MooreBox<E>,
    predictor: PredictorKind,
    ctx: PrecisionContext,
    opts: &TrackOptions,
) -> Result<PathResult<E>> {
    track_observed(sys, start, predictor, ctx, opts, &mut |_| {})
}

pub fn track_observed<E: Real>(
    sys: &ParametricSystem,
    start: &MooreBox<E>,
    predictor: PredictorKind,
    ctx: PrecisionContext,
    opts: &TrackOptions,
    observer: &mut dyn FnMut(&TraceRecord),
) -> Result<PathResult<E>> {
    if predictor == PredictorKind::None {
        return track_plain_observed(sys, start, ctx, opts, observer);
    }
    check_start(sys, start)?;
    let rho = e::<E>(STEP_RHO);
    let order = predictor.order();
    let mut state = PathState::new(start, e(0.5), ctx);
    run(
        &mut state,
        |st| {
            st.refine_here(sys, opts)?;
            st.h = st.h.mul(&e(GROWTH), Round::Nearest, &st.ctx);
            let clamped = st.clamp();
            let ctx = st.ctx;
            let dom = RealInterval::new(E::zero(), st.h.clone());
            let v = speed_vector(sys, &st.t, &st.b.x, &st.b.a, &ctx)?;
            let xs = match (&st.history, predictor) {
                (Some(hist), PredictorKind::Hermite) => predict_hermite(
                    &st.b.x,
                    &v,
                    &hist.x_prev,
                    &hist.v_prev,
                    &hist.h_prev,
                    order,
                    &dom,
                    &ctx,
                )?,
                _ => predict_tangent(&st.b.x, &v, order, &dom)?,
            };
            let k = KrawczykModels::new(sys, &st.t, &xs, &st.b.r, &st.b.a, order, &dom, &ctx)?;

            let half = st.h.mul_pow2(-1);
            let mut accepted = None;
            for (h_step, full) in [(st.h.clone(), true), (half.clone(), false)] {
                let mag = k.magnitude_on(&RealInterval::new(E::zero(), h_step.clone()), &ctx)?;
                let ok = mag.as_ref().is_some_and(|m| *m <= rho);
                observer(&TraceRecord {
                    t: st.t.to_f64(),
                    h: h_step.to_f64(),
                    accepted: ok,
                    r: st.b.r.to_f64(),
                    magnitude_k: mag.map(|m| m.to_f64()),
                });
                if ok {
                    accepted = Some((h_step, full));
                    break;
                }
                st.reject(opts)?;
            }

            let Some((h_step, full)) = accepted else {
                st.h = half;
                return st.ctx.require_u_prec_at_most(&st.h).and_then(|_| st.check_bits(opts));
            };
            if !full {
                st.h = half;
            }
            let t_new = if clamped && full {
                E::one()
            } else {
                let t = st.t.add(&h_step, Round::Down, &ctx);
                if t > E::one() { E::one() } else { t }
            };
            let eta = t_new.sub(&st.t, Round::Nearest, &ctx);
            let eta = if eta > h_step { h_step.clone() } else { eta };
            let x_new = xs
                .iter()
                .map(|m| Ok(m.eval_point(&eta, &ctx)?.mid(&ctx)))
                .collect::<Result<PointVector<E>>>()?;
            st.history = Some(History {
                x_prev: std::mem::replace(&mut st.b.x, x_new),
                v_prev: v,
                h_prev: eta,
            });
            st.b.rho = rho.clone();
            st.t = t_new;
            st.accept(opts)
        },
        sys,
        opts,
    )
}

/// `v = mid(−A·□Ḟ_t(x))`, the first-order motion of the zero.
pub fn speed_vector<E: Real>(
    sys: &ParametricSystem,
    t: &E,
    x: &[CPoint<E>],
    a: &PointMatrix<E>,
    ctx: &PrecisionContext,
) -> Result<PointVector<E>> {
    let fdot = sys
        .at(RealInterval::point(t.clone()))
        .eval_fdot(&BoxVector::from_points(x), ctx)?;
    let v = a.apply(&fdot, ctx)?;
    Ok(v.0.iter().map(|b| b.neg().mid(ctx)).collect())
}

fn point_model<E: Real>(
    coeffs: Vec<CPoint<E>>,
    order: usize,
    dom: &RealInterval<E>,
) -> Result<TaylorModel<E>> {
    TaylorModel::from_coeffs(order, coeffs.iter().map(ComplexBox::point).collect(), dom.clone())
}

/// `𝒳(η) = x + vη`.
pub fn predict_tangent<E: Real>(
    x: &[CPoint<E>],
    v: &[CPoint<E>],
    order: usize,
    dom: &RealInterval<E>,
) -> Result<Vec<TaylorModel<E>>> {
    check_dim(x.len(), v.len())?;
    x.iter()
        .zip(v)
        .map(|(xi, vi)| point_model(vec![xi.clone(), vi.clone()], order, dom))
        .collect()
}

/// The cubic with `𝒳(0) = x`, `𝒳'(0) = v`, `𝒳(−h_prev) = x_prev`,
/// `𝒳'(−h_prev) = v_prev`, with coefficients in point arithmetic.
#[allow(clippy::too_many_arguments)]
pub fn predict_hermite<E: Real>(
    x: &[CPoint<E>],
    v: &[CPoint<E>],
    x_prev: &[CPoint<E>],
    v_prev: &[CPoint<E>],
    h_prev: &E,
    order: usize,
    dom: &RealInterval<E>,
    ctx: &PrecisionContext,
) -> Result<Vec<TaylorModel<E>>> {
    let n = x.len();
    for len in [v.len(), x_prev.len(), v_prev.len()] {
        check_dim(n, len)?;
    }
    if !(*h_prev > E::zero()) {
        return Err(Error::InvalidArgument("h_prev must be positive".into()));
    }
    if order < 2 {
        return Err(Error::InvalidArgument("a cubic predictor needs order at least 2".into()));
    }
    let inv_h = E::one().div(h_prev, Round::Nearest, ctx);
    let three = e::<E>(3.0);
    let two = e::<E>(2.0);
    (0..n)
        .map(|i| {
            let dx = x[i].sub(&x_prev[i], ctx).scale(&inv_h, ctx);
            let w = v[i].add(&v_prev[i], ctx);
            let c2 = v[i].add(&w, ctx).sub(&dx.scale(&three, ctx), ctx).scale(&inv_h, ctx);
            let c3 = w
                .sub(&dx.scale(&two, ctx), ctx)
                .scale(&inv_h, ctx)
                .scale(&inv_h, ctx);
            point_model(vec![x[i].clone(), v[i].clone(), c2, c3], order, dom)
        })
        .collect()
}

/// `𝒦 = −r⁻¹A·□F_{t+η}(𝒳) + (I − A·□dF_{t+η}(𝒳 + rB))·B` as Taylor models:
/// the first term per component and `A·□dF` per matrix entry.
#[derive(Clone, Debug)]
pub struct KrawczykModels<E> {
    pub first: Vec<TaylorModel<E>>,
    pub ajac: Vec<TaylorModel<E>>,
}

impl<E: Real> KrawczykModels<E> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sys: &ParametricSystem,
        t: &E,
        xs: &[TaylorModel<E>],
        r: &E,
        a: &PointMatrix<E>,
        order: usize,
        dom: &RealInterval<E>,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let n = sys.dim();
        check_dim(n, xs.len())?;
        check_dim(n, a.dim())?;
        let arith = TaylorArithmetic::new(ctx, order, dom.clone());
        let tvar = TaylorModel::variable(order, ComplexBox::point(&CPoint::new(t.clone(), E::zero())), dom.clone())?;

        let mut inputs = Vec::with_capacity(n + 1);
        inputs.push(tvar.clone());
        inputs.extend(xs.iter().cloned());
        let fx = sys.f().evaluate(&arith, &inputs)?;
        let neg_inv_r = ComplexBox::real(RealInterval::reciprocal_of(r, ctx).neg());
        let first = (0..n)
            .map(|i| Ok(combine(a, i, |j| &fx[j], ctx)?.mul_box(&neg_inv_r, ctx)))
            .collect::<Result<Vec<_>>>()?;

        let mut inputs = Vec::with_capacity(n + 1);
        inputs.push(tvar);
        inputs.extend(xs.iter().map(|m| m.inflate(r, ctx)));
        let jac = sys.df().evaluate(&arith, &inputs)?;
        let mut ajac = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                ajac.push(combine(a, i, |k| &jac[k * n + j], ctx)?);
            }
        }
        Ok(KrawczykModels { first, ajac })
    }

    /// Encloses `‖𝒦(η)‖` over `η ∈ J`; `None` when unbounded.
    pub fn magnitude_on(&self, j: &RealInterval<E>, ctx: &PrecisionContext) -> Result<Option<E>> {
        let n = self.first.len();
        let one = RealInterval::point(E::one());
        let mut mag = E::zero();
        for i in 0..n {
            let mut s = E::zero();
            for k in 0..n {
                let b = self.ajac[i * n + k].range(j, ctx)?;
                let re = if i == k { one.sub(&b.re, ctx) } else { b.re.neg() };
                s = s.add(&re.mag().add(&b.im.mag(), Round::Up, ctx), Round::Up, ctx);
            }
            let ki = self.first[i].range(j, ctx)?.inflate(&s, ctx);
            if !ki.is_bounded() {
                return Ok(None);
            }
            let m = ki.mag();
            if m > mag {
                mag = m;
            }
        }
        Ok(Some(mag))
    }
}

/// `Σ_j A_ij · m_j`.
fn combine<'m, E: Real + 'm>(
    a: &PointMatrix<E>,
    i: usize,
    m: impl Fn(usize) -> &'m TaylorModel<E>,
    ctx: &PrecisionContext,
) -> Result<TaylorModel<E>> {
    let mut acc = m(0).mul_point(a.get(i, 0), ctx);
    for j in 1..a.dim() {
        let term = m(j).mul_point(a.get(i, j), ctx);
        acc = acc.add(&term, ctx)?;
    }
    Ok(acc)
}

/// Whether the boxes of `boxes` are pairwise disjoint.
pub fn pairwise_disjoint<E: Real>(boxes: &[MooreBox<E>], ctx: &PrecisionContext) -> bool {
    boxes
        .iter()
        .enumerate()
        .all(|(i, p)| boxes[i + 1..].iter().all(|q| p.is_disjoint_from(q, ctx)))
}
