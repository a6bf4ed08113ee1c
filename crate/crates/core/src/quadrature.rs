//! Adaptive Gauss-Legendre quadrature with interval bisection.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadConfig {
    /// Nodes per panel.
    pub nodes: usize,
    /// Absolute tolerance on the whole integral.
    pub tolerance: f64,
    /// Total node evaluations allowed.
    pub budget: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { nodes: 16, tolerance: 1e-10, budget: 1 << 15 }
    }
}

/// A Gauss-Legendre rule on `[-1, 1]` and its adaptive driver.
#[derive(Clone, Debug)]
pub struct Quadrature {
    cfg: QuadConfig,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(cfg: QuadConfig) -> Result<Self> {
        let deg = NonZeroUsize::new(cfg.nodes)
            .ok_or_else(|| Error::OutOfRange("quadrature needs at least one node".into()))?;
        let rule = GaussLegendre::new(deg);
        let (nodes, weights) = rule.into_node_weight_pairs().into_vec().into_iter().unzip();
        Ok(Quadrature { cfg, nodes, weights })
    }

    /// Shared default rule: 16 nodes, tolerance `1e-10`, budget `2^15`.
    pub fn standard() -> &'static Quadrature {
        static RULE: OnceLock<Quadrature> = OnceLock::new();
        RULE.get_or_init(|| Quadrature::new(QuadConfig::default()).expect("valid default"))
    }

    pub fn config(&self) -> QuadConfig {
        self.cfg
    }

    fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        h * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(c + h * t))
            .sum::<f64>()
    }

    /// `int_a^b f`, bisecting panels until each agrees with its two halves.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let k = self.nodes.len();
        let width = (b - a).abs();
        let mut used = k;
        let mut total = 0.0;
        let mut stack = vec![(a, b, self.panel(&f, a, b))];
        while let Some((lo, hi, whole)) = stack.pop() {
            let mid = (lo + hi) / 2.0;
            let left = self.panel(&f, lo, mid);
            let right = self.panel(&f, mid, hi);
            used += 2 * k;
            let halves = left + right;
            let local = self.cfg.tolerance * ((hi - lo).abs() / width);
            let floor = 64.0 * f64::EPSILON * halves.abs();
            if (whole - halves).abs() <= local.max(floor) {
                total += halves;
                continue;
            }
            if used > self.cfg.budget {
                return Err(Error::QuadratureNonConvergence { budget: self.cfg.budget });
            }
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
        Ok(total)
    }
}
