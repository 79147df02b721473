//! Generators for the benchmark families.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::rng::SplitMix64;
use crate::circuit::{Circuit, CircuitBuilder, PolySystem, Term};
use crate::error::{Error, Result};

fn var_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// All exponent vectors of `n` variables with total degree at most `d`.
fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for e in (0..=d).rev() {
        for mut rest in monomials(n - 1, d - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

fn from_map(map: BTreeMap<Vec<u32>, Complex64>) -> Vec<Term> {
    map.into_iter()
        .rev()
        .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
        .map(|(exps, coeff)| Term { coeff, exps })
        .collect()
}

/// `n` polynomials in `n` variables, each with every monomial of degree at
/// most `d` and standard complex Gaussian coefficients.
pub fn dense(n: usize, d: u32, seed: u64) -> Result<PolySystem> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("dense systems need n ≥ 1 and d ≥ 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let monos = monomials(n, d);
    let polys = (0..n)
        .map(|_| {
            monos
                .iter()
                .map(|exps| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Term {
                        coeff: Complex64::new(re * scale, im * scale),
                        exps: exps.clone(),
                    }
                })
                .collect()
        })
        .collect();
    Ok(PolySystem {
        vars: var_names("x", n),
        param: None,
        polys,
    })
}

/// `n` polynomials `±1 + Σ_{k=1}^{5} (Σ_j a_kj x_j)^d` with `a_kj` uniform in
/// `{−1, 0, 1}`, as a circuit that never expands the powers.
pub fn structured(n: usize, d: u32, seed: u64) -> Result<Circuit> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("structured systems need n ≥ 1 and d ≥ 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut b = CircuitBuilder::new(n);
    let xs: Vec<usize> = (0..n).map(|i| b.input(i)).collect();
    for _ in 0..n {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let mut terms = vec![b.real(sign)];
        for _ in 0..5 {
            let mut lin = Vec::new();
            for &x in &xs {
                match rng.random_range(-1i32..=1) {
                    1 => lin.push(x),
                    -1 => lin.push(b.neg(x)),
                    _ => {}
                }
            }
            if !lin.is_empty() {
                let l = b.sum(&lin);
                terms.push(b.pow(l, d));
            }
        }
        let out = b.sum(&terms);
        b.output(out);
    }
    Ok(b.build()?.deduplicated())
}

/// The Katsura system in `n` variables `u_0 … u_{n−1}`, with `2^{n−1}`
/// solutions:
///
/// ```text
/// Σ_{l=−m'}^{m'} u_|l| u_|m−l| − u_m = 0   for m = 0 … n−2
/// u_0 + 2 Σ_{l≥1} u_l − 1 = 0
/// ```
///
/// where `u_k = 0` for `k ≥ n`.
pub fn katsura(n: usize) -> Result<PolySystem> {
    if n < 2 {
        return Err(Error::InvalidArgument("katsura needs at least 2 variables".into()));
    }
    let last = n as i64 - 1;
    let unit = |k: usize| {
        let mut e = vec![0u32; n];
        e[k] += 1;
        e
    };
    let mut polys = Vec::with_capacity(n);
    for m in 0..last {
        let mut map: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for l in -last..=last {
            let (i, j) = (l.unsigned_abs() as usize, (m - l).unsigned_abs() as usize);
            if i >= n || j >= n {
                continue;
            }
            let mut e = unit(i);
            e[j] += 1;
            *map.entry(e).or_default() += 1.0;
        }
        *map.entry(unit(m as usize)).or_default() -= 1.0;
        polys.push(from_map(map));
    }
    let mut lin: Vec<Term> = (0..n)
        .map(|k| Term {
            coeff: Complex64::new(if k == 0 { 1.0 } else { 2.0 }, 0.0),
            exps: unit(k),
        })
        .collect();
    lin.push(Term {
        coeff: Complex64::new(-1.0, 0.0),
        exps: vec![0; n],
    });
    polys.push(lin);
    Ok(PolySystem {
        vars: (0..n).map(|k| format!("u{k}")).collect(),
        param: None,
        polys,
    })
}

/// Parameters of the near-singular demonstrator.
pub const NEAR_SINGULAR_DEGREE: u32 = 10;
pub const NEAR_SINGULAR_EPS2: f64 = 1e-20;

/// `x^d − (t − ½)² − ε²` in expanded form. All `d` roots pass within
/// `ε^{1/d}`-scale of each other at `t = ½`, where resolving the constant
/// term needs a unit roundoff far below `ε²`.
pub fn near_singular(d: u32, eps2: f64) -> PolySystem {
    let term = |re: f64, t: u32, x: u32| Term {
        coeff: Complex64::new(re, 0.0),
        exps: vec![t, x],
    };
    PolySystem {
        vars: vec!["x".into()],
        param: Some("t".into()),
        polys: vec![vec![
            term(1.0, 0, d),
            term(-1.0, 2, 0),
            term(1.0, 1, 0),
            term(-0.25, 0, 0),
            term(-eps2, 0, 0),
        ]],
    }
}

/// The `d` start zeros `(¼ + ε²)^{1/d}·e^{2πik/d}` of [`near_singular`] at `t = 0`.
pub fn near_singular_starts(d: u32, eps2: f64) -> Vec<Vec<Complex64>> {
    let rho = (0.25 + eps2).powf(1.0 / d as f64);
    (0..d)
        .map(|k| vec![Complex64::from_polar(rho, std::f64::consts::TAU * k as f64 / d as f64)])
        .collect()
}
