//! Refinement of a 7/8-Moore box into a τ-Moore box with the same zero.

use crate::circuit::BoxSystem;
use crate::error::{Error, Result};
use crate::interval::{BoxMatrix, BoxVector, CPoint, PointMatrix, PointVector, PrecisionContext, Real, Round};
use crate::moore::{certify, MooreBox};

/// The constants of the refinement loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineConstants {
    /// Contraction factor of the input box.
    pub rho_in: f64,
    /// A quasi-Newton step smaller than `alpha·τ·s` triggers shrinking.
    pub alpha: f64,
    /// Shrink factor for the radius.
    pub lambda: f64,
    /// Roundoff in `y − δ` above `beta·‖δ‖` demands more precision.
    pub beta: f64,
    /// Shrinking below `shrink_floor_factor·τ·r` demands `u_prec ≤ s²`.
    pub shrink_floor_factor: f64,
}

pub const REFINE_CONSTANTS: RefineConstants = RefineConstants {
    rho_in: 0.875,
    alpha: 1.0 / 64.0,
    lambda: 0.5,
    beta: 1.0 / 40.0,
    shrink_floor_factor: 1.0 / 16.0,
};

/// Which matrix multiplies `□f(y)` in the quasi-Newton step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DeltaMatrix {
    /// The matrix of the input box, for the whole run.
    #[default]
    Entry,
    /// The latest midpoint inverse `U`.
    Current,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineOptions {
    /// Guarded quasi-Newton iterations before the first certification.
    pub warmup: usize,
    pub delta_matrix: DeltaMatrix,
    pub max_iterations: u64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            warmup: 2,
            delta_matrix: DeltaMatrix::Entry,
            max_iterations: 1_000_000,
        }
    }
}

/// Progress notifications, for tests and tracing.
#[derive(Clone, Debug, PartialEq)]
pub enum RefineEvent<E> {
    QuasiNewton { from: PointVector<E>, to: PointVector<E> },
    Shrink { s: E },
    PrecisionRaised { bits: u32 },
    Grow { s: E },
}

/// Result of one quasi-Newton step `y ← mid(y − A·□f(y))`.
#[derive(Clone, Debug)]
pub struct QuasiNewtonStep<E> {
    pub delta: BoxVector<E>,
    /// The interval `y − δ`, whose width measures roundoff.
    pub moved: BoxVector<E>,
    pub y_new: PointVector<E>,
}

pub fn quasi_newton_step<E: Real, S: BoxSystem<E>>(
    sys: &S,
    y: &[CPoint<E>],
    a: &PointMatrix<E>,
    ctx: &PrecisionContext,
) -> Result<QuasiNewtonStep<E>> {
    let yb = BoxVector::from_points(y);
    let delta = a.apply(&sys.eval_f(&yb, ctx)?, ctx)?;
    let moved = yb.sub(&delta, ctx)?;
    let y_new = moved.midpoint(ctx);
    Ok(QuasiNewtonStep { delta, moved, y_new })
}

/// `mid(M)⁻¹` in unchecked point arithmetic.
pub fn midpoint_inverse<E: Real>(m: &BoxMatrix<E>, ctx: &PrecisionContext) -> Result<PointMatrix<E>> {
    m.midpoint(ctx).inverse(ctx)
}

fn scaled<E: Real>(c: f64, x: &E, ctx: &PrecisionContext) -> E {
    E::from_f64(c).mul(x, Round::Nearest, ctx)
}

/// Whether the roundoff in `y − δ` is too large relative to the step.
fn roundoff_dominates<E: Real>(step: &QuasiNewtonStep<E>, beta: f64, ctx: &PrecisionContext) -> bool {
    let w = step.moved.width(ctx);
    !w.is_finite() || w > scaled(beta, &step.delta.magnitude(), ctx)
}

fn raise<E>(ctx: &mut PrecisionContext, observer: &mut dyn FnMut(&RefineEvent<E>)) -> Result<()> {
    *ctx = ctx.raise_precision()?;
    observer(&RefineEvent::PrecisionRaised { bits: ctx.bits() });
    Ok(())
}

/// Refines `b` into a τ-Moore box for `sys` with the same associated zero.
///
/// `ctx` may be raised along the way; in `Fixed64` mode a raise is reported
/// as [`Error::PrecisionExhausted`].
pub fn refine<E: Real, S: BoxSystem<E>>(
    sys: &S,
    b: &MooreBox<E>,
    tau: &E,
    ctx: &mut PrecisionContext,
    opts: &RefineOptions,
) -> Result<MooreBox<E>> {
    refine_observed(sys, b, tau, ctx, opts, &mut |_| {})
}

pub fn refine_observed<E: Real, S: BoxSystem<E>>(
    sys: &S,
    b: &MooreBox<E>,
    tau: &E,
    ctx: &mut PrecisionContext,
    opts: &RefineOptions,
    observer: &mut dyn FnMut(&RefineEvent<E>),
) -> Result<MooreBox<E>> {
    if !(*tau > E::zero() && *tau < E::one()) {
        return Err(Error::InvalidArgument("tau must lie in (0, 1)".into()));
    }
    let k = REFINE_CONSTANTS;
    let mut y = b.x.clone();
    let mut s = b.r.clone();
    let mut u = b.a.clone();
    // a = α·τ, floor = τ·r/16
    let alpha_tau = scaled(k.alpha, tau, ctx);
    let floor = scaled(k.shrink_floor_factor, &tau.mul(&b.r, Round::Nearest, ctx), ctx);

    let delta_matrix = |u: &PointMatrix<E>| match opts.delta_matrix {
        DeltaMatrix::Entry => b.a.clone(),
        DeltaMatrix::Current => u.clone(),
    };

    for _ in 0..opts.warmup {
        let step = quasi_newton_step(sys, &y, &delta_matrix(&u), ctx)?;
        let small = step.delta.magnitude() <= alpha_tau.mul(&s, Round::Nearest, ctx);
        if small || roundoff_dominates(&step, k.beta, ctx) {
            break;
        }
        observer(&RefineEvent::QuasiNewton {
            from: y.clone(),
            to: step.y_new.clone(),
        });
        y = step.y_new;
        u = midpoint_inverse(&sys.eval_df(&BoxVector::from_points(&y), ctx)?, ctx)?;
    }

    let mut iterations = 0u64;
    while !certify(sys, &y, &s, &u, tau, ctx)? {
        iterations += 1;
        if iterations > opts.max_iterations {
            return Err(Error::StepBudgetExceeded(opts.max_iterations));
        }
        let step = quasi_newton_step(sys, &y, &delta_matrix(&u), ctx)?;
        if step.delta.magnitude() <= alpha_tau.mul(&s, Round::Nearest, ctx) {
            s = s.mul_pow2(-1);
            observer(&RefineEvent::Shrink { s: s.clone() });
            if s < floor {
                // u_prec = o(s), realized as u_prec ≤ s²
                let target = s.mul(&s, Round::Down, ctx);
                while ctx.u_prec_as::<E>() > target {
                    raise(ctx, observer)?;
                }
            }
        } else if roundoff_dominates(&step, k.beta, ctx) {
            raise(ctx, observer)?;
        } else {
            observer(&RefineEvent::QuasiNewton {
                from: y.clone(),
                to: step.y_new.clone(),
            });
            y = step.y_new;
            u = midpoint_inverse(&sys.eval_df(&BoxVector::from_points(&y), ctx)?, ctx)?;
        }
    }

    // grow around the returned center y
    loop {
        let doubled = s.mul_pow2(1);
        if doubled > E::one() || !certify(sys, &y, &doubled, &u, tau, ctx)? {
            break;
        }
        s = doubled;
        observer(&RefineEvent::Grow { s: s.clone() });
    }
    MooreBox::new(y, s, u, tau.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_system, System};
    use crate::interval::Dyadic;

    fn system(src: &str) -> System {
        System::new(parse_system(src).unwrap().to_circuit().unwrap()).unwrap()
    }

    fn pts(v: &[f64]) -> Vec<CPoint<f64>> {
        v.iter().map(|&x| CPoint::new(x, 0.0)).collect()
    }

    fn diag(v: &[f64]) -> PointMatrix<f64> {
        PointMatrix::diagonal(pts(v))
    }

    #[test]
    fn constants_satisfy_correctness_constraints() {
        let k = REFINE_CONSTANTS;
        assert!(k.alpha + k.rho_in < 1.0);
        assert!((k.rho_in + k.beta) / (1.0 - k.beta) < 1.0);
        assert!(k.lambda < 1.0);
    }

    #[test]
    fn linear_zero_grows_radius() {
        let f = system("vars: x\nx - 1");
        let mut ctx = PrecisionContext::fixed64();
        let b = MooreBox::new(pts(&[1.0]), 0.25, diag(&[1.0]), 0.875).unwrap();
        let out = refine(&f, &b, &0.125, &mut ctx, &RefineOptions::default()).unwrap();
        assert_eq!(out.x, pts(&[1.0]));
        assert!(out.r >= 0.25 && out.r <= 1.0);
        assert!(out.certifies(&f, &ctx).unwrap());
    }

    #[test]
    fn square_root_of_two() {
        let f = system("vars: x\nx^2 - 2");
        let mut ctx = PrecisionContext::fixed64();
        let b = MooreBox::new(pts(&[1.5]), 0.25, diag(&[1.0 / 3.0]), 0.875).unwrap();
        assert!(b.certifies(&f, &ctx).unwrap());
        let out = refine(&f, &b, &0.125, &mut ctx, &RefineOptions::default()).unwrap();
        assert!(out.certifies(&f, &ctx).unwrap());
        let dist = (out.x[0].re - 2f64.sqrt()).abs().max(out.x[0].im.abs());
        assert!(dist <= out.r);
        assert!(out.r <= 1.0);
    }

    #[test]
    fn two_dimensional_product() {
        let f = system("vars: x y\nx^2 - 2\ny^2 - 3");
        let mut ctx = PrecisionContext::fixed64();
        let b = MooreBox::new(pts(&[1.5, 1.7]), 0.2, diag(&[1.0 / 3.0, 1.0 / 3.4]), 0.875).unwrap();
        assert!(b.certifies(&f, &ctx).unwrap());
        let out = refine(&f, &b, &0.125, &mut ctx, &RefineOptions::default()).unwrap();
        assert!(out.ball(&ctx).contains(&pts(&[2f64.sqrt(), 3f64.sqrt()])));
        assert!(out.certifies(&f, &ctx).unwrap());
    }

    #[test]
    fn without_warmup_and_with_current_matrix() {
        let f = system("vars: x\nx^2 - 2");
        let b = MooreBox::new(pts(&[1.5]), 0.25, diag(&[1.0 / 3.0]), 0.875).unwrap();
        for delta_matrix in [DeltaMatrix::Entry, DeltaMatrix::Current] {
            let opts = RefineOptions {
                warmup: 0,
                delta_matrix,
                ..Default::default()
            };
            let mut ctx = PrecisionContext::fixed64();
            let out = refine(&f, &b, &0.125, &mut ctx, &opts).unwrap();
            assert!(out.ball(&ctx).contains(&pts(&[2f64.sqrt()])));
        }
    }

    #[test]
    fn quasi_newton_examples() {
        let ctx = PrecisionContext::fixed64();
        let lin = system("vars: x\nx - 1");
        let s = quasi_newton_step(&lin, &pts(&[2.0]), &diag(&[1.0]), &ctx).unwrap();
        assert_eq!(s.y_new, pts(&[1.0]));

        let q = system("vars: x\nx^2 - 2");
        let s = quasi_newton_step(&q, &pts(&[1.5]), &diag(&[1.0 / 3.0]), &ctx).unwrap();
        assert!((s.y_new[0].re - (1.5 - 0.25 / 3.0)).abs() < 1e-15);

        let s = quasi_newton_step(&lin, &pts(&[1.0]), &diag(&[1.0]), &ctx).unwrap();
        assert_eq!(s.delta.magnitude(), 0.0);
        assert_eq!(s.y_new, pts(&[1.0]));
    }

    #[test]
    fn midpoint_inverse_examples() {
        let ctx = PrecisionContext::fixed64();
        let id = BoxMatrix::<f64>::identity(3);
        assert_eq!(midpoint_inverse(&id, &ctx).unwrap(), PointMatrix::identity(3));
        let d = BoxMatrix::from_points(&diag(&[2.0, 4.0]));
        assert_eq!(midpoint_inverse(&d, &ctx).unwrap(), diag(&[0.5, 0.25]));
    }

    #[test]
    fn shrinking_far_below_floor_exhausts_fixed_precision() {
        // x² has a double root: certification keeps failing while δ stays tiny
        let f = system("vars: x\nx^2");
        let mut ctx = PrecisionContext::fixed64();
        let b = MooreBox::new(pts(&[0.0]), 0.25, diag(&[1.0]), 0.875).unwrap();
        let err = refine(&f, &b, &0.125, &mut ctx, &RefineOptions::default()).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted(_)));
    }

    #[test]
    fn dyadic_refine_terminates_quickly() {
        let f = system("vars: x\nx^2 - 2");
        for k in [2, 5, 10, 20] {
            let mut ctx = PrecisionContext::dyadic(53);
            let r = Dyadic::pow2(-k);
            let x = vec![CPoint::new(Dyadic::from_f64(2f64.sqrt()), Dyadic::zero())];
            let a = PointMatrix::diagonal(vec![CPoint::new(Dyadic::from_f64(0.3535533905932738), Dyadic::zero())]);
            let b = MooreBox::new(x, r, a, Dyadic::from_f64(0.875)).unwrap();
            let mut count = 0;
            let out = refine_observed(
                &f,
                &b,
                &Dyadic::from_f64(0.125),
                &mut ctx,
                &RefineOptions::default(),
                &mut |_| count += 1,
            )
            .unwrap();
            assert!(count < 200);
            assert!(out.certifies(&f, &ctx).unwrap());
        }
    }

    #[test]
    fn rejects_bad_tau() {
        let f = system("vars: x\nx - 1");
        let mut ctx = PrecisionContext::fixed64();
        let b = MooreBox::new(pts(&[1.0]), 0.25, diag(&[1.0]), 0.875).unwrap();
        assert!(refine(&f, &b, &1.0, &mut ctx, &RefineOptions::default()).is_err());
    }
}
