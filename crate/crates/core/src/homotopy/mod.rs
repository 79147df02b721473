//! Homotopies `F_t` from a start system at `t = 0` to a target at `t = 1`,
//! together with certified start boxes.

pub mod corpus;
mod rng;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use rng::{random_gamma, SplitMix64};

use crate::circuit::{BoxSystem, Circuit, CircuitBuilder, ParametricSystem, System};
use crate::error::{Error, Result};
use crate::interval::{BoxVector, CPoint, PointMatrix, PrecisionContext, Real};
use crate::moore::{certify, MooreBox};
use crate::refine::midpoint_inverse;

/// Contraction factor of emitted start boxes.
pub const START_RHO: f64 = 0.875;
const FIRST_RADIUS: f64 = 1e-3;
const MIN_RADIUS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomotopyKind {
    TotalDegree,
    Newton,
    Parametric,
}

#[derive(Clone, Debug)]
pub struct Homotopy {
    pub kind: HomotopyKind,
    pub system: ParametricSystem,
    /// Start-system multipliers (total degree only).
    pub gamma: Vec<Complex64>,
    /// Degrees `d_i` of the target (total degree only).
    pub degrees: Vec<u32>,
    /// Approximate zeros of `F_0`, one per path.
    pub starts: Vec<Vec<Complex64>>,
}

impl Homotopy {
    pub fn n_paths(&self) -> usize {
        self.starts.len()
    }

    /// A certified `7/8`-Moore box for `F_0` around start `i`.
    pub fn start_box<E: Real>(&self, i: usize, ctx: &PrecisionContext) -> Result<MooreBox<E>> {
        let start = self
            .starts
            .get(i)
            .ok_or_else(|| Error::InvalidArgument(format!("no start point {i}")))?;
        let x: Vec<CPoint<E>> = start.iter().map(|&z| CPoint::from_complex(z)).collect();
        let f0 = self.system.at_f64::<E>(0.0);
        match self.kind {
            HomotopyKind::TotalDegree => {
                // A = diag(1 / (γ_i d_i x_i^{d_i − 1}))
                let diag = start
                    .iter()
                    .zip(&self.gamma)
                    .zip(&self.degrees)
                    .map(|((&x, &g), &d)| {
                        CPoint::from_complex(1.0 / (g * d as f64 * x.powu(d - 1)))
                    })
                    .collect();
                certify_candidate_with(&f0, &x, PointMatrix::diagonal(diag), ctx)
            }
            _ => certify_candidate(&f0, &x, ctx),
        }
    }

    pub fn start_boxes<E: Real>(&self, ctx: &PrecisionContext) -> Result<Vec<MooreBox<E>>> {
        (0..self.n_paths()).map(|i| self.start_box(i, ctx)).collect()
    }
}

fn check_square(target: &Circuit) -> Result<usize> {
    let n = target.n_inputs();
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    if target.n_outputs() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.n_outputs(),
        });
    }
    Ok(n)
}

/// `F_t = t·f + (1 − t)·g` with `g_i = γ_i (x_i^{d_i} − 1)`, `d_i = deg f_i`,
/// and `γ` from [`random_gamma`]. Starts are all tuples of roots of unity.
pub fn build_total_degree(target: &Circuit, seed: u64) -> Result<Homotopy> {
    let n = check_square(target)?;
    let degrees = target.output_degrees(&(0..n).collect::<Vec<_>>());
    if let Some(i) = degrees.iter().position(|&d| d == 0) {
        return Err(Error::InvalidArgument(format!("polynomial {i} is constant")));
    }
    let gamma = random_gamma(seed, n);

    let mut b = CircuitBuilder::new(n + 1);
    let t = b.input(0);
    let one = b.real(1.0);
    let omt = b.sub(one, t);
    let xs: Vec<usize> = (1..=n).map(|i| b.input(i)).collect();
    let fs = b.import(target, &xs);
    for i in 0..n {
        let p = b.pow(xs[i], degrees[i]);
        let p = b.sub(p, one);
        let g = b.scale(gamma[i], p);
        let tf = b.mul(t, fs[i]);
        let sg = b.mul(omt, g);
        let out = b.add(tf, sg);
        b.output(out);
    }
    let system = ParametricSystem::new(b.build()?.deduplicated())?;

    let roots: Vec<Vec<Complex64>> = degrees
        .iter()
        .map(|&d| {
            (0..d)
                .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64))
                .collect()
        })
        .collect();
    let mut starts: Vec<Vec<Complex64>> = vec![Vec::new()];
    for r in &roots {
        starts = starts
            .into_iter()
            .flat_map(|p| {
                r.iter().map(move |&z| {
                    let mut q = p.clone();
                    q.push(z);
                    q
                })
            })
            .collect();
    }
    Ok(Homotopy {
        kind: HomotopyKind::TotalDegree,
        system,
        gamma,
        degrees,
        starts,
    })
}

/// `F_t = f(x) − (1 − t)·f(x₀)`, with `f(x₀)` evaluated once in `f64`.
pub fn build_newton(target: &Circuit, x0: &[Complex64]) -> Result<Homotopy> {
    let n = check_square(target)?;
    crate::interval::check_dim(n, x0.len())?;
    let sys = System::new(target.clone())?;
    let c = sys.eval_point(x0)?;
    let jac = sys.eval_point_df(x0)?;
    PointMatrix::<f64>::from_row_major(n, jac.into_iter().map(CPoint::from_complex).collect())?
        .inverse(&PrecisionContext::fixed64())?;

    let mut b = CircuitBuilder::new(n + 1);
    let t = b.input(0);
    let one = b.real(1.0);
    let omt = b.sub(one, t);
    let xs: Vec<usize> = (1..=n).map(|i| b.input(i)).collect();
    let fs = b.import(target, &xs);
    for (i, &ci) in c.iter().enumerate() {
        let k = b.constant(ci);
        let shift = b.mul(omt, k);
        let out = b.sub(fs[i], shift);
        b.output(out);
    }
    Ok(Homotopy {
        kind: HomotopyKind::Newton,
        system: ParametricSystem::new(b.build()?.deduplicated())?,
        gamma: Vec::new(),
        degrees: Vec::new(),
        starts: vec![x0.to_vec()],
    })
}

/// A user-supplied parametric system (parameter as input 0) with start points.
pub fn build_parametric(f: Circuit, starts: Vec<Vec<Complex64>>) -> Result<Homotopy> {
    let system = ParametricSystem::new(f)?;
    for s in &starts {
        crate::interval::check_dim(system.dim(), s.len())?;
    }
    Ok(Homotopy {
        kind: HomotopyKind::Parametric,
        system,
        gamma: Vec::new(),
        degrees: Vec::new(),
        starts,
    })
}

/// Wraps an approximate zero in a `7/8`-Moore box with
/// `A = mid(□df(x))⁻¹`.
pub fn certify_candidate<E: Real, S: BoxSystem<E>>(
    f: &S,
    x: &[CPoint<E>],
    ctx: &PrecisionContext,
) -> Result<MooreBox<E>> {
    let a = midpoint_inverse(&f.eval_df(&BoxVector::from_points(x), ctx)?, ctx)?;
    certify_candidate_with(f, x, a, ctx)
}

/// Radius search for a given `A`: from `10⁻³` halve down to `10⁻¹²` until the
/// box certifies, or if `10⁻³` certifies, double up to 1 while it still does.
pub fn certify_candidate_with<E: Real, S: BoxSystem<E>>(
    f: &S,
    x: &[CPoint<E>],
    a: PointMatrix<E>,
    ctx: &PrecisionContext,
) -> Result<MooreBox<E>> {
    let rho = E::from_f64(START_RHO);
    let ok = |r: &E| certify(f, x, r, &a, &rho, ctx);
    let mut r = E::from_f64(FIRST_RADIUS);
    if ok(&r)? {
        loop {
            let up = r.mul_pow2(1);
            if up > E::one() || !ok(&up)? {
                break;
            }
            r = up;
        }
    } else {
        let floor = E::from_f64(MIN_RADIUS);
        loop {
            r = r.mul_pow2(-1);
            if r < floor {
                return Err(Error::CandidateRejected);
            }
            if ok(&r)? {
                break;
            }
        }
    }
    MooreBox::new(x.to_vec(), r, a, rho)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartPoint {
    pub point: Vec<[f64; 2]>,
}

/// Parses start points from JSON lines `{"point": [[re, im], …]}`; blank
/// lines are skipped.
pub fn parse_start_points(text: &str) -> Result<Vec<Vec<Complex64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let p: StartPoint = serde_json::from_str(l)
                .map_err(|e| Error::Json(format!("line {}: {e}", i + 1)))?;
            Ok(p.point.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        })
        .collect()
}

pub fn start_point_line(x: &[Complex64]) -> String {
    serde_json::to_string(&StartPoint {
        point: x.iter().map(|z| [z.re, z.im]).collect(),
    })
    .expect("finite start point")
}
