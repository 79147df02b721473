//! Univariate Taylor models `a₀ + a₁η + ⋯ + a_{ν+1}η^{ν+1}` with complex box
//! coefficients on a real domain `I ∋ 0`.
//!
//! A model encloses a function `f` on `I` when `f(η) ∈ P(η)` for all `η ∈ I`.
//! The top coefficient absorbs truncation: [`TaylorModel::squeeze`] folds
//! `a_ν η^ν + a_{ν+1} η^{ν+1}` into `(a_ν + a_{ν+1}·I) η^ν`.

use num_complex::Complex64;

use crate::circuit::ArithmeticDomain;
use crate::error::{Error, Result};
use crate::interval::{CPoint, ComplexBox, PrecisionContext, Real, RealInterval};

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorModel<E = f64> {
    coeffs: Vec<ComplexBox<E>>,
    domain: RealInterval<E>,
}

impl<E: Real> TaylorModel<E> {
    /// `coeffs` holds `a₀ … a_{ν+1}`, so its length is `order + 2`.
    pub fn new(coeffs: Vec<ComplexBox<E>>, domain: RealInterval<E>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument(
                "a Taylor model needs at least two coefficients".into(),
            ));
        }
        if !domain.contains(&E::zero()) {
            return Err(Error::InvalidArgument(
                "Taylor model domain must contain 0".into(),
            ));
        }
        Ok(TaylorModel { coeffs, domain })
    }

    /// Model of order `order` from the leading coefficients given, padded
    /// with zeros. At most `order + 2` coefficients are accepted.
    pub fn from_coeffs(
        order: usize,
        mut coeffs: Vec<ComplexBox<E>>,
        domain: RealInterval<E>,
    ) -> Result<Self> {
        if coeffs.len() > order + 2 {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for order {order}",
                coeffs.len()
            )));
        }
        coeffs.resize(order + 2, ComplexBox::zero());
        Self::new(coeffs, domain)
    }

    pub fn constant(order: usize, c: ComplexBox<E>, domain: RealInterval<E>) -> Result<Self> {
        Self::from_coeffs(order, vec![c], domain)
    }

    /// The model `t + η` of the parameter along a step.
    pub fn variable(order: usize, t: ComplexBox<E>, domain: RealInterval<E>) -> Result<Self> {
        Self::from_coeffs(order, vec![t, ComplexBox::one()], domain)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 2
    }

    pub fn coeffs(&self) -> &[ComplexBox<E>] {
        &self.coeffs
    }

    pub fn domain(&self) -> &RealInterval<E> {
        &self.domain
    }

    fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(ComplexBox::is_exact_zero)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.coeffs.len() != other.coeffs.len() || self.domain != other.domain {
            return Err(Error::InvalidArgument(
                "Taylor models differ in order or domain".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self, ctx: &PrecisionContext) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.add_unchecked(other, ctx))
    }

    fn add_unchecked(&self, other: &Self, ctx: &PrecisionContext) -> Self {
        TaylorModel {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b, ctx))
                .collect(),
            domain: self.domain.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        TaylorModel {
            coeffs: self.coeffs.iter().map(ComplexBox::neg).collect(),
            domain: self.domain.clone(),
        }
    }

    pub fn sub(&self, other: &Self, ctx: &PrecisionContext) -> Result<Self> {
        self.add(&other.neg(), ctx)
    }

    /// Reduces the order by one. Fails on order-0 models.
    pub fn squeeze(&self, ctx: &PrecisionContext) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::InvalidArgument("cannot squeeze an order-0 model".into()));
        }
        let mut coeffs = self.coeffs.clone();
        squeeze_vec(&mut coeffs, &self.domain, ctx);
        Ok(TaylorModel {
            coeffs,
            domain: self.domain.clone(),
        })
    }

    pub fn mul(&self, other: &Self, ctx: &PrecisionContext) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.mul_unchecked(other, ctx))
    }

    /// Full convolution to order `2ν+1`, then `ν+1` squeezes back to `ν`.
    fn mul_unchecked(&self, other: &Self, ctx: &PrecisionContext) -> Self {
        if other.is_constant() {
            return self.mul_box(&other.coeffs[0], ctx);
        }
        if self.is_constant() {
            return other.mul_box(&self.coeffs[0], ctx);
        }
        let len = self.coeffs.len();
        let mut prod: Vec<Option<ComplexBox<E>>> = vec![None; 2 * len - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                let p = a.mul(b, ctx);
                prod[i + j] = Some(match prod[i + j].take() {
                    None => p,
                    Some(acc) => acc.add(&p, ctx),
                });
            }
        }
        let mut coeffs: Vec<ComplexBox<E>> = prod
            .into_iter()
            .map(|c| c.unwrap_or_else(ComplexBox::zero))
            .collect();
        while coeffs.len() > len {
            squeeze_vec(&mut coeffs, &self.domain, ctx);
        }
        TaylorModel {
            coeffs,
            domain: self.domain.clone(),
        }
    }

    /// Coefficientwise product with a constant box.
    pub fn mul_box(&self, c: &ComplexBox<E>, ctx: &PrecisionContext) -> Self {
        TaylorModel {
            coeffs: self.coeffs.iter().map(|a| a.mul(c, ctx)).collect(),
            domain: self.domain.clone(),
        }
    }

    pub fn mul_point(&self, c: &CPoint<E>, ctx: &PrecisionContext) -> Self {
        TaylorModel {
            coeffs: self.coeffs.iter().map(|a| a.mul_point(c, ctx)).collect(),
            domain: self.domain.clone(),
        }
    }

    /// Adds `[-r, r] + [-r, r]i` to the constant coefficient.
    pub fn inflate(&self, r: &E, ctx: &PrecisionContext) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = coeffs[0].inflate(r, ctx);
        TaylorModel {
            coeffs,
            domain: self.domain.clone(),
        }
    }

    /// Encloses `{f(j) : j ∈ J}` for every enclosed `f`, by Horner's scheme.
    pub fn range(&self, j: &RealInterval<E>, ctx: &PrecisionContext) -> Result<ComplexBox<E>> {
        if !j.is_subset_of(&self.domain) {
            return Err(Error::InvalidArgument(
                "range interval is not inside the model domain".into(),
            ));
        }
        let mut it = self.coeffs.iter().rev();
        let top = it.next().expect("nonempty").clone();
        Ok(it.fold(top, |acc, a| a.add(&acc.scale(j, ctx), ctx)))
    }

    pub fn eval_point(&self, e: &E, ctx: &PrecisionContext) -> Result<ComplexBox<E>> {
        self.range(&RealInterval::point(e.clone()), ctx)
    }
}

fn squeeze_vec<E: Real>(coeffs: &mut Vec<ComplexBox<E>>, domain: &RealInterval<E>, ctx: &PrecisionContext) {
    let top = coeffs.pop().expect("nonempty");
    let last = coeffs.last_mut().expect("two coefficients");
    if !top.is_exact_zero() {
        *last = last.add(&top.scale(domain, ctx), ctx);
    }
}

/// Taylor-model arithmetic of fixed order on a fixed domain.
#[derive(Clone, Debug)]
pub struct TaylorArithmetic<'a, E> {
    pub ctx: &'a PrecisionContext,
    pub order: usize,
    pub domain: RealInterval<E>,
}

impl<'a, E: Real> TaylorArithmetic<'a, E> {
    pub fn new(ctx: &'a PrecisionContext, order: usize, domain: RealInterval<E>) -> Self {
        TaylorArithmetic { ctx, order, domain }
    }

    pub fn constant_box(&self, c: ComplexBox<E>) -> TaylorModel<E> {
        TaylorModel::from_coeffs(self.order, vec![c], self.domain.clone())
            .expect("domain checked at construction")
    }

    /// Builds a model of this arithmetic's order from polynomial coefficients.
    pub fn polynomial(&self, coeffs: Vec<ComplexBox<E>>) -> Result<TaylorModel<E>> {
        TaylorModel::from_coeffs(self.order, coeffs, self.domain.clone())
    }
}

impl<E: Real> ArithmeticDomain for TaylorArithmetic<'_, E> {
    type Value = TaylorModel<E>;

    fn constant(&self, c: Complex64) -> TaylorModel<E> {
        self.constant_box(ComplexBox::from_complex(c))
    }

    fn add(&self, a: &TaylorModel<E>, b: &TaylorModel<E>) -> TaylorModel<E> {
        a.add_unchecked(b, self.ctx)
    }

    fn mul(&self, a: &TaylorModel<E>, b: &TaylorModel<E>) -> TaylorModel<E> {
        a.mul_unchecked(b, self.ctx)
    }
}
