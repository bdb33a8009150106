//! One-dimensional meshes and Gauss-Legendre quadrature.

use crate::error::{FemError, Result};

/// Ordered node coordinates partitioning `[x_l, x_r]` into elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
}

impl Mesh {
    /// `n` equal elements on `[x_l, x_r]`.
    pub fn uniform(x_l: f64, x_r: f64, n: usize) -> Result<Self> {
        if !(x_l < x_r) {
            return Err(FemError::DegenerateDomain { x_l, x_r });
        }
        if n < 2 {
            return Err(FemError::TooFewElements(n));
        }
        let width = x_r - x_l;
        let mut nodes: Vec<f64> = (0..=n)
            .map(|i| x_l + width * (i as f64) / (n as f64))
            .collect();
        nodes[n] = x_r;
        Ok(Self { nodes })
    }

    /// Mesh from explicit coordinates; they must be strictly increasing.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(FemError::TooFewElements(nodes.len().saturating_sub(1)));
        }
        if let Some(index) = nodes.windows(2).position(|p| !(p[0] < p[1])) {
            return Err(FemError::NonMonotoneMesh { index: index + 1 });
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn x_l(&self) -> f64 {
        self.nodes[0]
    }

    pub fn x_r(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Largest element width.
    pub fn h_max(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(0.0, f64::max)
    }

    /// Endpoints of element `k`.
    pub fn element(&self, k: usize) -> Result<(f64, f64)> {
        if k >= self.n_elements() {
            return Err(FemError::ElementIndexOutOfRange {
                index: k,
                elements: self.n_elements(),
            });
        }
        Ok((self.nodes[k], self.nodes[k + 1]))
    }

    /// Iterator over `(k, x_k, x_{k+1})`.
    pub fn elements(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.nodes
            .windows(2)
            .enumerate()
            .map(|(k, p)| (k, p[0], p[1]))
    }

    /// Index of the element containing `x`. A node shared by two elements
    /// belongs to the element on its right, except the last node.
    pub fn locate(&self, x: f64) -> Result<usize> {
        let (lo, hi) = (self.x_l(), self.x_r());
        if !(x >= lo && x <= hi) {
            return Err(FemError::PointOutsideDomain { x, lo, hi });
        }
        // First node strictly greater than x.
        let above = self.nodes.partition_point(|&node| node <= x);
        Ok(above.saturating_sub(1).min(self.n_elements() - 1))
    }
}

/// Gauss-Legendre rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

pub const MAX_GAUSS_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights for `order` points, computed by Newton
/// iteration on the Legendre polynomial `P_order`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_GAUSS_ORDER {
        return Err(FemError::UnsupportedQuadratureOrder(order));
    }
    let n = order;
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Roots come in +/- pairs; solve for the positive half and mirror.
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_slope(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_slope(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        if 2 * i + 1 == n {
            x = 0.0;
        }
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok(QuadratureRule { points, weights })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_slope(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = next;
    }
    let slope = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, slope)
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Physical points and weights for the interval `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(&xi, &w)| (mid + half * xi, w * half))
    }

    /// Integral of `g` over `[a, b]` with the affinely mapped rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, g: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * g(x)).sum()
    }

    /// Composite integral: `[a, b]` split into `parts` equal pieces.
    pub fn integrate_subdivided<F: Fn(f64) -> f64>(&self, a: f64, b: f64, parts: usize, g: F) -> f64 {
        let parts = parts.max(1);
        let width = (b - a) / parts as f64;
        (0..parts)
            .map(|p| {
                let lo = a + width * p as f64;
                let hi = if p + 1 == parts { b } else { lo + width };
                self.integrate(lo, hi, &g)
            })
            .sum()
    }
}

/// Integral of `g` over the element `[a, b]`.
pub fn integrate_element<F: Fn(f64) -> f64>(rule: &QuadratureRule, a: f64, b: f64, g: F) -> f64 {
    rule.integrate(a, b, g)
}
