//! Hat functions, the element weight `w(x) = (x - x_k)(x - x_{k+1})`, the
//! enriched trial functions and the per-element bubble.
//!
//! On element `k` the enriched trial function of node `i` is
//!
//! ```text
//!     psi_i = phi_i - 1/2 (beta'/beta) w phi_i' + 1/2 (q/beta) w phi_i
//! ```
//!
//! and the bubble is `-1/2 (f/beta) w`. The trial object of the compact
//! method is affine: `sum_j c_j psi_j + bubble`.

use crate::error::{FemError, Result};
use crate::geometry::Mesh;
use crate::problem::{finite_difference, ProblemSpec, ScalarField};

/// Value and first derivative at a point.
pub type ValueSlope = (f64, f64);

/// Hat function of node `i` at `x`. Slopes are one-sided: the element
/// returned by [`Mesh::locate`] decides which side.
pub fn hat(mesh: &Mesh, i: usize, x: f64) -> Result<ValueSlope> {
    if i >= mesh.n_nodes() {
        return Err(FemError::NodeIndexOutOfRange {
            index: i,
            nodes: mesh.n_nodes(),
        });
    }
    let k = mesh.locate(x)?;
    Ok(local_hat(mesh, k, i, x))
}

/// Hat `i` restricted to element `k` (zero unless `i` is one of its nodes).
pub(crate) fn local_hat(mesh: &Mesh, k: usize, i: usize, x: f64) -> ValueSlope {
    let nodes = mesh.nodes();
    let (a, b) = (nodes[k], nodes[k + 1]);
    let h = b - a;
    if i == k {
        ((b - x) / h, -1.0 / h)
    } else if i == k + 1 {
        ((x - a) / h, 1.0 / h)
    } else {
        (0.0, 0.0)
    }
}

/// `w(x) = (x - x_k)(x - x_{k+1})` and `w'(x)` on element `k`.
pub fn element_weight(mesh: &Mesh, k: usize, x: f64) -> Result<ValueSlope> {
    let (a, b) = mesh.element(k)?;
    if !(x >= a && x <= b) {
        return Err(FemError::PointOutsideElement { x, element: k, a, b });
    }
    Ok(weight(a, b, x))
}

#[inline]
pub(crate) fn weight(a: f64, b: f64, x: f64) -> ValueSlope {
    ((x - a) * (x - b), 2.0 * x - a - b)
}

/// Coefficient ratios driving the enrichment at one point:
/// `r = beta'/beta`, `s = q/beta`, `t = f/beta`, each with its slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enrichment {
    pub r: ValueSlope,
    pub s: ValueSlope,
    pub t: ValueSlope,
}

impl Enrichment {
    pub fn at(problem: &ProblemSpec, x: f64) -> Result<Self> {
        let beta = problem.beta();
        let b = beta.eval(x);
        if !(b > 0.0) {
            return Err(FemError::CoercivityViolation { x, beta: b });
        }
        Ok(Self {
            r: log_slope(beta, x, problem.domain())?,
            s: ratio(problem.q(), beta, x, problem.domain())?,
            t: ratio(problem.f(), beta, x, problem.domain())?,
        })
    }

    /// Enriched trial value/slope for a hat with value `p` and slope `d`
    /// on an element with weight `(w, dw)`.
    #[inline]
    pub fn trial(&self, (p, d): ValueSlope, (w, dw): ValueSlope) -> ValueSlope {
        let (r, dr) = self.r;
        let (s, ds) = self.s;
        let value = p - 0.5 * r * w * d + 0.5 * s * w * p;
        let slope = d - 0.5 * (dr * w + r * dw) * d + 0.5 * (ds * w + s * dw) * p + 0.5 * s * w * d;
        (value, slope)
    }

    /// Bubble value/slope: `-1/2 (f/beta) w`.
    #[inline]
    pub fn bubble(&self, (w, dw): ValueSlope) -> ValueSlope {
        let (t, dt) = self.t;
        (-0.5 * t * w, -0.5 * (dt * w + t * dw))
    }
}

/// `beta'/beta` and its derivative. Quotient rule when `beta'` and `beta''`
/// are analytic, otherwise a finite difference of the ratio.
fn log_slope(beta: &ScalarField, x: f64, domain: (f64, f64)) -> Result<ValueSlope> {
    if beta.constant_value().is_some() {
        return Ok((0.0, 0.0));
    }
    let b = beta.eval(x);
    let db = beta.deriv(x)?;
    let r = db / b;
    let dr = match (beta.analytic_deriv(x), beta.analytic_second_deriv(x)) {
        (Some(db), Some(d2b)) => (d2b * b - db * db) / (b * b),
        _ => finite_difference(&|t| Ok(beta.deriv(t)? / beta.eval(t)), x, Some(domain))?,
    };
    Ok((r, dr))
}

/// `num/beta` and its derivative, with the same analytic-or-FD policy.
fn ratio(num: &ScalarField, beta: &ScalarField, x: f64, domain: (f64, f64)) -> Result<ValueSlope> {
    if num.constant_value() == Some(0.0) {
        return Ok((0.0, 0.0));
    }
    let b = beta.eval(x);
    let n = num.eval(x);
    let dv = match (num.analytic_deriv(x), beta.analytic_deriv(x)) {
        (Some(dn), Some(db)) => (dn * b - n * db) / (b * b),
        _ => finite_difference(&|t| Ok(num.eval(t) / beta.eval(t)), x, Some(domain))?,
    };
    Ok((n / b, dv))
}

/// Enriched trial function `psi_i` at `x` (value and slope).
pub fn modified_trial(problem: &ProblemSpec, mesh: &Mesh, i: usize, x: f64) -> Result<ValueSlope> {
    let hat_i = hat(mesh, i, x)?;
    let k = mesh.locate(x)?;
    let (a, b) = mesh.element(k)?;
    let e = Enrichment::at(problem, x)?;
    Ok(e.trial(hat_i, weight(a, b, x)))
}

/// Bubble `-1/2 (f/beta) w` of element `k` at `x`.
pub fn bubble(problem: &ProblemSpec, mesh: &Mesh, k: usize, x: f64) -> Result<ValueSlope> {
    let w = element_weight(mesh, k, x)?;
    let e = Enrichment::at(problem, x)?;
    Ok(e.bubble(w))
}
