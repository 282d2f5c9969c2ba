//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::sync::atomic::{AtomicUsize, Ordering};

use feupdate::fe::{ElementSection, FrameElement, Node, StructureModel};
use feupdate::optimize::{Objective, ObjectiveError};
use rand::Rng;

/// A connected random frame: each new node hangs off a random earlier one.
pub fn random_model<R: Rng>(rng: &mut R) -> StructureModel {
    let n_nodes = rng.random_range(3..=8);
    let mut nodes = vec![Node { id: 0, x: 0.0, y: 0.0 }];
    let mut elements = Vec::new();
    for id in 1..n_nodes {
        let parent = rng.random_range(0..id);
        let length = rng.random_range(0.1..0.5);
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let p = nodes[parent];
        nodes.push(Node {
            id,
            x: p.x + length * angle.cos(),
            y: p.y + length * angle.sin(),
        });
        let section = ElementSection::rectangle(
            rng.random_range(0.01..0.05),
            rng.random_range(0.005..0.03),
            rng.random_range(2000.0..8000.0),
        )
        .unwrap();
        elements.push(FrameElement {
            id,
            node_a: parent,
            node_b: id,
            section,
            modulus: rng.random_range(5.0e10..2.0e11),
        });
    }
    StructureModel::new(nodes, elements, vec![]).unwrap()
}

/// Straight free-free beam along x with `n` equal elements.
pub fn free_free_beam(n: usize, length: f64, section: ElementSection, modulus: f64) -> StructureModel {
    let nodes = (0..=n)
        .map(|i| Node {
            id: i,
            x: length * i as f64 / n as f64,
            y: 0.0,
        })
        .collect();
    let elements = (0..n)
        .map(|i| FrameElement {
            id: i + 1,
            node_a: i,
            node_b: i + 1,
            section,
            modulus,
        })
        .collect();
    StructureModel::new(nodes, elements, vec![]).unwrap()
}

/// Roots of cos(x)·cosh(x) = 1 for x in (0, 14), by bisection.
pub fn free_free_beta_l() -> Vec<f64> {
    let f = |x: f64| x.cos() * x.cosh() - 1.0;
    let mut roots = Vec::new();
    let step = 0.01;
    let mut a = 1.0;
    while a < 14.0 {
        let b = a + step;
        if f(a).signum() != f(b).signum() {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo).signum() == f(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
    }
    roots
}

/// Wraps an objective and counts calls.
pub struct Counting<O> {
    pub inner: O,
    pub calls: AtomicUsize,
}

impl<O> Counting<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<O: Objective> Objective for Counting<O> {
    fn evaluate(&self, params: &[f64]) -> Result<f64, ObjectiveError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(params)
    }
}

/// `(Σ|ab|)² / (Σa² Σb²)` row by row, written out with plain loops.
pub fn comac_oracle(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::new();
    for j in 0..a.len() {
        let mut cross = 0.0;
        let mut aa = 0.0;
        let mut bb = 0.0;
        for i in 0..a[j].len() {
            cross += (a[j][i] * b[j][i]).abs();
            aa += a[j][i] * a[j][i];
            bb += b[j][i] * b[j][i];
        }
        out.push(cross * cross / (aa * bb));
    }
    out
}
