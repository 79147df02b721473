//! Arithmetic circuits (straight-line programs) over the complex numbers.
//!
//! A [`Circuit`] is a topologically ordered list of [`Node`]s. It can be
//! evaluated over any [`ArithmeticDomain`]: complex points, complex boxes, or
//! Taylor models. Derivatives are obtained by forward-mode differentiation,
//! which produces another circuit.

mod builder;
mod parse;
mod system;

use std::collections::HashMap;
use std::marker::PhantomData;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interval::{ComplexBox, PrecisionContext, Real};

pub use builder::CircuitBuilder;
pub use parse::{parse_system, PolySystem, Term};
pub use system::{BoxSystem, ParametricSystem, Specialized, System};

/// One gate of a circuit. Operands always refer to earlier nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Node {
    Input(usize),
    Const(Complex64),
    Add(usize, usize),
    Mul(usize, usize),
}

/// Values a circuit can be evaluated on.
pub trait ArithmeticDomain {
    type Value: Clone;

    fn constant(&self, c: Complex64) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
}

/// Plain `Complex64` arithmetic, rounded to nearest. No enclosure is claimed.
#[derive(Clone, Copy, Debug, Default)]
pub struct PointArithmetic;

impl ArithmeticDomain for PointArithmetic {
    type Value = Complex64;

    fn constant(&self, c: Complex64) -> Complex64 {
        c
    }

    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }

    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }
}

/// Interval arithmetic on complex boxes at a fixed precision.
#[derive(Debug)]
pub struct BoxArithmetic<'a, E> {
    pub ctx: &'a PrecisionContext,
    _endpoint: PhantomData<E>,
}

impl<'a, E> BoxArithmetic<'a, E> {
    pub fn new(ctx: &'a PrecisionContext) -> Self {
        BoxArithmetic {
            ctx,
            _endpoint: PhantomData,
        }
    }
}

impl<E: Real> ArithmeticDomain for BoxArithmetic<'_, E> {
    type Value = ComplexBox<E>;

    fn constant(&self, c: Complex64) -> ComplexBox<E> {
        ComplexBox::from_complex(c)
    }

    fn add(&self, a: &ComplexBox<E>, b: &ComplexBox<E>) -> ComplexBox<E> {
        a.add(b, self.ctx)
    }

    fn mul(&self, a: &ComplexBox<E>, b: &ComplexBox<E>) -> ComplexBox<E> {
        a.mul(b, self.ctx)
    }
}

/// Per-output Lipschitz data: `width(□f(X)) ≤ width_coeff · width(X) +
/// roundoff_coeff · u_prec` whenever every node value lies in `[-M, M]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzBound {
    pub width_coeff: f64,
    pub roundoff_coeff: f64,
}

impl LipschitzBound {
    /// The single constant `L` with `width(□f(X)) ≤ L (width(X) + u_prec)`.
    pub fn constant(&self) -> f64 {
        self.width_coeff.max(self.roundoff_coeff)
    }
}

/// A directed acyclic graph of input, constant, addition and multiplication
/// nodes with a list of designated outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    nodes: Vec<Node>,
    outputs: Vec<usize>,
    n_inputs: usize,
}

impl Circuit {
    pub fn new(nodes: Vec<Node>, outputs: Vec<usize>, n_inputs: usize) -> Result<Self> {
        for (k, node) in nodes.iter().enumerate() {
            match *node {
                Node::Input(i) if i >= n_inputs => {
                    return Err(Error::InvalidCircuit(format!(
                        "node {k} reads input {i} of {n_inputs}"
                    )))
                }
                Node::Const(c) if !(c.re.is_finite() && c.im.is_finite()) => {
                    return Err(Error::InvalidCircuit(format!("node {k} is not finite")))
                }
                Node::Add(a, b) | Node::Mul(a, b) if a >= k || b >= k => {
                    return Err(Error::InvalidCircuit(format!(
                        "node {k} references a later node"
                    )))
                }
                _ => {}
            }
        }
        if let Some(&o) = outputs.iter().find(|&&o| o >= nodes.len()) {
            return Err(Error::InvalidCircuit(format!("output {o} out of range")));
        }
        Ok(Circuit {
            nodes,
            outputs,
            n_inputs,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    fn run<D, F>(&self, domain: &D, input: F) -> Vec<D::Value>
    where
        D: ArithmeticDomain,
        F: Fn(usize) -> D::Value,
    {
        let mut vals: Vec<D::Value> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Input(i) => input(i),
                Node::Const(c) => domain.constant(c),
                Node::Add(a, b) => domain.add(&vals[a], &vals[b]),
                Node::Mul(a, b) => domain.mul(&vals[a], &vals[b]),
            };
            vals.push(v);
        }
        self.outputs.iter().map(|&o| vals[o].clone()).collect()
    }

    /// Single forward pass over `domain`.
    pub fn evaluate<D: ArithmeticDomain>(
        &self,
        domain: &D,
        inputs: &[D::Value],
    ) -> Result<Vec<D::Value>> {
        if inputs.len() != self.n_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs,
                found: inputs.len(),
            });
        }
        Ok(self.run(domain, |i| inputs[i].clone()))
    }

    /// Binds input 0 (the parameter) to `value`.
    pub fn specialize<V: Clone>(&self, value: V) -> Result<Bound<'_, V>> {
        if self.n_inputs == 0 {
            return Err(Error::NotParametric);
        }
        Ok(Bound {
            circuit: self,
            param: value,
        })
    }

    /// Forward-mode differentiation with respect to the inputs in `wrt`.
    ///
    /// The returned circuit keeps the original outputs first, followed by
    /// `∂output_j/∂input_{wrt[k]}` at position `m + j·|wrt| + k`.
    pub fn differentiate(&self, wrt: &[usize]) -> Result<Circuit> {
        if let Some(&i) = wrt.iter().find(|&&i| i >= self.n_inputs) {
            return Err(Error::InvalidArgument(format!(
                "cannot differentiate with respect to input {i}"
            )));
        }
        let mut nodes = self.nodes.clone();
        nodes.push(Node::Const(Complex64::new(1.0, 0.0)));
        let one = nodes.len() - 1;
        nodes.push(Node::Const(Complex64::new(0.0, 0.0)));
        let zero = nodes.len() - 1;

        let m = self.outputs.len();
        let mut derivs = vec![zero; m * wrt.len()];
        for (k, &var) in wrt.iter().enumerate() {
            let mut tangent: Vec<Option<usize>> = Vec::with_capacity(self.nodes.len());
            for node in &self.nodes {
                let d = match *node {
                    Node::Input(i) => (i == var).then_some(one),
                    Node::Const(_) => None,
                    Node::Add(a, b) => match (tangent[a], tangent[b]) {
                        (None, None) => None,
                        (Some(d), None) | (None, Some(d)) => Some(d),
                        (Some(da), Some(db)) => {
                            nodes.push(Node::Add(da, db));
                            Some(nodes.len() - 1)
                        }
                    },
                    Node::Mul(a, b) => {
                        let mut scaled = |d: usize, other: usize| {
                            if d == one {
                                other
                            } else {
                                nodes.push(Node::Mul(d, other));
                                nodes.len() - 1
                            }
                        };
                        match (tangent[a], tangent[b]) {
                            (None, None) => None,
                            (Some(da), None) => Some(scaled(da, b)),
                            (None, Some(db)) => Some(scaled(db, a)),
                            (Some(da), Some(db)) => {
                                let p = scaled(da, b);
                                let q = scaled(db, a);
                                nodes.push(Node::Add(p, q));
                                Some(nodes.len() - 1)
                            }
                        }
                    }
                };
                tangent.push(d);
            }
            for (j, &o) in self.outputs.iter().enumerate() {
                derivs[j * wrt.len() + k] = tangent[o].unwrap_or(zero);
            }
        }
        let mut outputs = self.outputs.clone();
        outputs.extend(derivs);
        Circuit::new(nodes, outputs, self.n_inputs).map(|c| c.pruned())
    }

    /// Keeps the listed outputs (by position) and drops unreachable nodes.
    pub fn select_outputs(&self, which: &[usize]) -> Result<Circuit> {
        let outputs = which
            .iter()
            .map(|&k| {
                self.outputs.get(k).copied().ok_or_else(|| {
                    Error::InvalidArgument(format!("output {k} of {}", self.outputs.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            nodes: self.nodes.clone(),
            outputs,
            n_inputs: self.n_inputs,
        }
        .pruned())
    }

    /// Dead-code elimination.
    fn pruned(self) -> Circuit {
        let mut live = vec![false; self.nodes.len()];
        for &o in &self.outputs {
            live[o] = true;
        }
        for k in (0..self.nodes.len()).rev() {
            if live[k] {
                if let Node::Add(a, b) | Node::Mul(a, b) = self.nodes[k] {
                    live[a] = true;
                    live[b] = true;
                }
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (k, node) in self.nodes.iter().enumerate() {
            if !live[k] {
                continue;
            }
            remap[k] = nodes.len();
            nodes.push(match *node {
                Node::Add(a, b) => Node::Add(remap[a], remap[b]),
                Node::Mul(a, b) => Node::Mul(remap[a], remap[b]),
                other => other,
            });
        }
        let outputs = self.outputs.iter().map(|&o| remap[o]).collect();
        Circuit {
            nodes,
            outputs,
            n_inputs: self.n_inputs,
        }
    }

    /// Common-subexpression elimination: structurally equal nodes (up to
    /// operand order of `Add` and `Mul`) are merged.
    pub fn deduplicated(&self) -> Circuit {
        #[derive(Hash, PartialEq, Eq)]
        enum Key {
            Input(usize),
            Const(u64, u64),
            Add(usize, usize),
            Mul(usize, usize),
        }
        let mut seen: HashMap<Key, usize> = HashMap::new();
        let mut remap = Vec::with_capacity(self.nodes.len());
        let mut nodes = Vec::new();
        for node in &self.nodes {
            let (key, new) = match *node {
                Node::Input(i) => (Key::Input(i), Node::Input(i)),
                Node::Const(c) => (Key::Const(c.re.to_bits(), c.im.to_bits()), Node::Const(c)),
                Node::Add(a, b) => {
                    let (a, b) = sorted(remap[a], remap[b]);
                    (Key::Add(a, b), Node::Add(a, b))
                }
                Node::Mul(a, b) => {
                    let (a, b) = sorted(remap[a], remap[b]);
                    (Key::Mul(a, b), Node::Mul(a, b))
                }
            };
            let idx = *seen.entry(key).or_insert_with(|| {
                nodes.push(new);
                nodes.len() - 1
            });
            remap.push(idx);
        }
        Circuit {
            nodes,
            outputs: self.outputs.iter().map(|&o| remap[o]).collect(),
            n_inputs: self.n_inputs,
        }
        .pruned()
    }

    /// Upper bounds on the total degree of each output in the inputs listed
    /// in `vars` (other inputs count as degree 0).
    pub fn output_degrees(&self, vars: &[usize]) -> Vec<u32> {
        let mut deg: Vec<u32> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            deg.push(match *node {
                Node::Input(i) => vars.contains(&i) as u32,
                Node::Const(_) => 0,
                Node::Add(a, b) => deg[a].max(deg[b]),
                Node::Mul(a, b) => deg[a] + deg[b],
            });
        }
        self.outputs.iter().map(|&o| deg[o]).collect()
    }

    /// Composes per-node width/roundoff bounds for the complex box domain.
    ///
    /// For boxes whose node values all lie in `[-M, M]²` (`M ≥ 1`), an addition
    /// contributes `w₁ + w₂ + 2M·u` and a multiplication `2M(w₁ + w₂) + 8M²·u`
    /// to the width. The same bound holds with Hausdorff distances in place of
    /// widths. The result is the worst bound over all outputs.
    pub fn lipschitz_bound(&self, m: f64) -> LipschitzBound {
        assert!(m >= 1.0, "lipschitz_bound needs M >= 1");
        let mut bounds: Vec<(f64, f64)> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            bounds.push(match *node {
                Node::Input(_) => (1.0, 0.0),
                Node::Const(_) => (0.0, 0.0),
                Node::Add(a, b) => {
                    let (x, y) = (bounds[a], bounds[b]);
                    (x.0 + y.0, x.1 + y.1 + 2.0 * m)
                }
                Node::Mul(a, b) => {
                    let (x, y) = (bounds[a], bounds[b]);
                    (2.0 * m * (x.0 + y.0), 2.0 * m * (x.1 + y.1) + 8.0 * m * m)
                }
            });
        }
        // slack for the f64 evaluation of the recurrences themselves
        let slack = 1.0 + 1e-12;
        let (a, b) = self
            .outputs
            .iter()
            .map(|&o| bounds[o])
            .fold((0.0f64, 0.0f64), |acc, x| (acc.0.max(x.0), acc.1.max(x.1)));
        LipschitzBound {
            width_coeff: a * slack,
            roundoff_coeff: b * slack,
        }
    }
}

fn sorted(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A circuit whose input 0 is bound to a fixed value of some domain.
#[derive(Clone, Debug)]
pub struct Bound<'c, V> {
    circuit: &'c Circuit,
    param: V,
}

impl<V: Clone> Bound<'_, V> {
    pub fn param(&self) -> &V {
        &self.param
    }

    /// Evaluates with input 0 fixed; `x` supplies inputs `1..n_inputs`.
    pub fn evaluate<D: ArithmeticDomain<Value = V>>(&self, domain: &D, x: &[V]) -> Result<Vec<V>> {
        let expected = self.circuit.n_inputs - 1;
        if x.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: x.len(),
            });
        }
        Ok(self.circuit.run(domain, |i| {
            if i == 0 {
                self.param.clone()
            } else {
                x[i - 1].clone()
            }
        }))
    }
}

#[cfg(test)]
mod tests;
