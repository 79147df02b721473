use std::collections::HashMap;

use num_complex::Complex64;

use super::{Circuit, Node};
use crate::error::Result;

/// Incremental construction of a [`Circuit`]. Inputs and constants are
/// shared; everything else is appended as requested.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    nodes: Vec<Node>,
    outputs: Vec<usize>,
    n_inputs: usize,
    inputs: HashMap<usize, usize>,
    consts: HashMap<[u64; 2], usize>,
}

impl CircuitBuilder {
    pub fn new(n_inputs: usize) -> Self {
        CircuitBuilder {
            nodes: Vec::new(),
            outputs: Vec::new(),
            n_inputs,
            inputs: HashMap::new(),
            consts: HashMap::new(),
        }
    }

    fn push(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn input(&mut self, i: usize) -> usize {
        if let Some(&k) = self.inputs.get(&i) {
            return k;
        }
        let k = self.push(Node::Input(i));
        self.inputs.insert(i, k);
        k
    }

    pub fn constant(&mut self, c: Complex64) -> usize {
        // normalize -0.0 so that equal constants share a node
        let c = Complex64::new(c.re + 0.0, c.im + 0.0);
        let key = [c.re.to_bits(), c.im.to_bits()];
        if let Some(&k) = self.consts.get(&key) {
            return k;
        }
        let k = self.push(Node::Const(c));
        self.consts.insert(key, k);
        k
    }

    pub fn real(&mut self, x: f64) -> usize {
        self.constant(Complex64::new(x, 0.0))
    }

    pub fn add(&mut self, a: usize, b: usize) -> usize {
        self.push(Node::Add(a, b))
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.push(Node::Mul(a, b))
    }

    /// `c · a`, omitting the product when `c = 1`.
    pub fn scale(&mut self, c: Complex64, a: usize) -> usize {
        if c == Complex64::new(1.0, 0.0) {
            return a;
        }
        let k = self.constant(c);
        self.mul(k, a)
    }

    pub fn neg(&mut self, a: usize) -> usize {
        self.scale(Complex64::new(-1.0, 0.0), a)
    }

    pub fn sub(&mut self, a: usize, b: usize) -> usize {
        let nb = self.neg(b);
        self.add(a, nb)
    }

    /// Sum of the given nodes; the empty sum is the constant 0.
    pub fn sum(&mut self, terms: &[usize]) -> usize {
        match terms.split_first() {
            None => self.real(0.0),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &t| self.add(acc, t)),
        }
    }

    /// Product of the given nodes; the empty product is the constant 1.
    pub fn product(&mut self, factors: &[usize]) -> usize {
        match factors.split_first() {
            None => self.real(1.0),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &t| self.mul(acc, t)),
        }
    }

    /// `a^k` by repeated squaring.
    pub fn pow(&mut self, a: usize, k: u32) -> usize {
        match k {
            0 => self.real(1.0),
            1 => a,
            _ if k.is_multiple_of(2) => {
                let h = self.pow(a, k / 2);
                self.mul(h, h)
            }
            _ => {
                let h = self.pow(a, k - 1);
                self.mul(h, a)
            }
        }
    }

    /// Copies `other` into this builder with its inputs wired to the given
    /// nodes and returns the nodes holding its outputs.
    pub fn import(&mut self, other: &Circuit, inputs: &[usize]) -> Vec<usize> {
        assert_eq!(inputs.len(), other.n_inputs(), "import: input count");
        let mut map = Vec::with_capacity(other.size());
        for node in other.nodes() {
            let k = match *node {
                Node::Input(i) => inputs[i],
                Node::Const(c) => self.constant(c),
                Node::Add(a, b) => self.add(map[a], map[b]),
                Node::Mul(a, b) => self.mul(map[a], map[b]),
            };
            map.push(k);
        }
        other.outputs().iter().map(|&o| map[o]).collect()
    }

    pub fn output(&mut self, a: usize) {
        self.outputs.push(a);
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::new(self.nodes, self.outputs, self.n_inputs)
    }
}
