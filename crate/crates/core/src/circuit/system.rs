use num_complex::Complex64;

use super::{BoxArithmetic, Circuit, PointArithmetic};
use crate::error::{Error, Result};
use crate::interval::{BoxMatrix, BoxVector, ComplexBox, PrecisionContext, Real, RealInterval};

/// Interval extensions `□f` and `□df` of a square system `f : ℂⁿ → ℂⁿ`.
pub trait BoxSystem<E: Real> {
    fn dim(&self) -> usize;
    fn eval_f(&self, x: &BoxVector<E>, ctx: &PrecisionContext) -> Result<BoxVector<E>>;
    fn eval_df(&self, x: &BoxVector<E>, ctx: &PrecisionContext) -> Result<BoxMatrix<E>>;
}

fn jacobian_circuit(f: &Circuit, first: usize, n: usize) -> Result<Circuit> {
    let wrt: Vec<usize> = (first..first + n).collect();
    let m = f.n_outputs();
    f.differentiate(&wrt)?
        .select_outputs(&(m..m + m * n).collect::<Vec<_>>())
}

/// A square polynomial system without parameter, with its Jacobian circuit.
#[derive(Clone, Debug)]
pub struct System {
    n: usize,
    f: Circuit,
    df: Circuit,
}

impl System {
    pub fn new(f: Circuit) -> Result<Self> {
        let n = f.n_inputs();
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        if f.n_outputs() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.n_outputs(),
            });
        }
        let df = jacobian_circuit(&f, 0, n)?;
        Ok(System { n, f, df })
    }

    pub fn f(&self) -> &Circuit {
        &self.f
    }

    pub fn df(&self) -> &Circuit {
        &self.df
    }

    pub fn eval_point(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.f.evaluate(&PointArithmetic, x)
    }

    /// Row-major Jacobian at a point.
    pub fn eval_point_df(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.df.evaluate(&PointArithmetic, x)
    }
}

impl<E: Real> BoxSystem<E> for System {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval_f(&self, x: &BoxVector<E>, ctx: &PrecisionContext) -> Result<BoxVector<E>> {
        self.f
            .evaluate(&BoxArithmetic::new(ctx), &x.0)
            .map(BoxVector)
    }

    fn eval_df(&self, x: &BoxVector<E>, ctx: &PrecisionContext) -> Result<BoxMatrix<E>> {
        let entries = self.df.evaluate(&BoxArithmetic::new(ctx), &x.0)?;
        BoxMatrix::from_row_major(self.n, entries)
    }
}

/// `F : ℂ × ℂⁿ → ℂⁿ` with input 0 the parameter `t`, together with circuits
/// for `dF` (Jacobian in `x`) and `Ḟ = ∂F/∂t`.
#[derive(Clone, Debug)]
pub struct ParametricSystem {
    n: usize,
    f: Circuit,
    df: Circuit,
    fdot: Circuit,
}

impl ParametricSystem {
    pub fn new(f: Circuit) -> Result<Self> {
        if f.n_inputs() == 0 {
            return Err(Error::NotParametric);
        }
        let n = f.n_inputs() - 1;
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        if f.n_outputs() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.n_outputs(),
            });
        }
        let df = jacobian_circuit(&f, 1, n)?;
        let fdot = f
            .differentiate(&[0])?
            .select_outputs(&(n..2 * n).collect::<Vec<_>>())?;
        Ok(ParametricSystem { n, f, df, fdot })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> &Circuit {
        &self.f
    }

    pub fn df(&self) -> &Circuit {
        &self.df
    }

    pub fn fdot(&self) -> &Circuit {
        &self.fdot
    }

    /// `F_T` for an interval of parameter values (a point when `T` is
    /// degenerate).
    pub fn at<E: Real>(&self, t: RealInterval<E>) -> Specialized<'_, E> {
        Specialized {
            system: self,
            t: ComplexBox::real(t),
        }
    }

    pub fn at_f64<E: Real>(&self, t: f64) -> Specialized<'_, E> {
        self.at(RealInterval::point(E::from_f64(t)))
    }

    pub fn eval_point(&self, t: Complex64, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.f.specialize(t)?.evaluate(&PointArithmetic, x)
    }

    pub fn eval_point_df(&self, t: Complex64, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.df.specialize(t)?.evaluate(&PointArithmetic, x)
    }

    pub fn eval_point_fdot(&self, t: Complex64, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.fdot.specialize(t)?.evaluate(&PointArithmetic, x)
    }
}

/// A parametric system with the parameter bound to a real interval `T`.
#[derive(Clone, Debug)]
pub struct Specialized<'a, E> {
    system: &'a ParametricSystem,
    t: ComplexBox<E>,
}

impl<E: Real> Specialized<'_, E> {
    pub fn param(&self) -> &ComplexBox<E> {
        &self.t
    }

    /// `□Ḟ_T(x)`.
    pub fn eval_fdot(&self, x: &BoxVector<E>, ctx: &PrecisionContext) -> Result<BoxVector<E>> {
        self.system
            .fdot
            .specialize(self.t.clone())?
            .evaluate(&BoxArithmetic::new(ctx), &x.0)
            .map(BoxVector)
    }
}

impl<E: Real> BoxSystem<E> for Specialized<'_, E> {
    fn dim(&self) -> usize {
        self.system.n
    }

    fn eval_f(&self, x: &BoxVector<E>, ctx: &PrecisionContext) -> Result<BoxVector<E>> {
        self.system
            .f
            .specialize(self.t.clone())?
            .evaluate(&BoxArithmetic::new(ctx), &x.0)
            .map(BoxVector)
    }

    fn eval_df(&self, x: &BoxVector<E>, ctx: &PrecisionContext) -> Result<BoxMatrix<E>> {
        let entries = self
            .system
            .df
            .specialize(self.t.clone())?
            .evaluate(&BoxArithmetic::new(ctx), &x.0)?;
        BoxMatrix::from_row_major(self.system.n, entries)
    }
}
