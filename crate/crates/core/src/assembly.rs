//! Tridiagonal assembly for the classical P1 method and the compact method.
//!
//! Both methods test against the original hats. The compact method uses
//! the enriched trial functions and moves the bubble's action to the load,
//! so the matrix keeps the three-band structure of the P1 system.

use crate::basis::{local_hat, weight, Enrichment};
use crate::error::{FemError, Result};
use crate::geometry::{Mesh, QuadratureRule};
use crate::problem::{BoundaryCondition, ProblemSpec};

/// `A U = F` with `A` stored by bands. `sub[i]` is `A[i+1][i]` and
/// `sup[i]` is `A[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let system = Self { sub, diag, sup, rhs };
        system.check()?;
        Ok(system)
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            sub: vec![0.0; m.saturating_sub(1)],
            diag: vec![0.0; m],
            sup: vec![0.0; m.saturating_sub(1)],
            rhs: vec![0.0; m],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub(crate) fn check(&self) -> Result<()> {
        let m = self.diag.len();
        if m == 0 {
            return Err(FemError::MalformedSystem("empty system".into()));
        }
        if self.sub.len() != m - 1 || self.sup.len() != m - 1 || self.rhs.len() != m {
            return Err(FemError::MalformedSystem(format!(
                "band lengths sub={} diag={} sup={} rhs={}",
                self.sub.len(),
                m,
                self.sup.len(),
                self.rhs.len()
            )));
        }
        Ok(())
    }

    /// Row-major dense copy of the matrix.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let m = self.len();
        let mut a = vec![vec![0.0; m]; m];
        for i in 0..m {
            a[i][i] = self.diag[i];
            if i + 1 < m {
                a[i][i + 1] = self.sup[i];
                a[i + 1][i] = self.sub[i];
            }
        }
        a
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.len();
        (0..m)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < m {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Largest entry magnitude.
    pub fn scale(&self) -> f64 {
        self.sub
            .iter()
            .chain(&self.diag)
            .chain(&self.sup)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Add a local 2x2 element matrix and load for nodes `k`, `k + 1`.
    fn scatter(&mut self, k: usize, local: [[f64; 2]; 2], load: [f64; 2]) {
        self.diag[k] += local[0][0];
        self.sup[k] += local[0][1];
        self.sub[k] += local[1][0];
        self.diag[k + 1] += local[1][1];
        self.rhs[k] += load[0];
        self.rhs[k + 1] += load[1];
    }
}

/// A system with boundary conditions applied, plus what is needed to
/// rebuild the full nodal vector from its solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub system: TridiagonalSystem,
    /// Node index of the first unknown.
    pub offset: usize,
    pub left_value: Option<f64>,
    pub right_value: Option<f64>,
}

impl ReducedSystem {
    /// Number of unknown coefficients.
    pub fn unknowns(&self) -> usize {
        self.system.len()
    }

    /// Nodal vector with Dirichlet values reinserted.
    pub fn reconstruct(&self, solution: &[f64]) -> Vec<f64> {
        let mut coeffs = Vec::with_capacity(solution.len() + 2);
        coeffs.extend(self.left_value);
        coeffs.extend_from_slice(solution);
        coeffs.extend(self.right_value);
        coeffs
    }
}

/// Classical Galerkin system over all nodes, before boundary conditions:
/// `a_ij = int(beta phi_i' phi_j' + q phi_i phi_j)`, `F_i = int(f phi_i)`.
pub fn assemble_classical_full(problem: &ProblemSpec, mesh: &Mesh, rule: &QuadratureRule) -> Result<TridiagonalSystem> {
    problem.validate_on(mesh, rule)?;
    let mut system = TridiagonalSystem::zeros(mesh.n_nodes());
    for (k, a, b) in mesh.elements() {
        let mut local = [[0.0; 2]; 2];
        let mut load = [0.0; 2];
        for (x, wq) in rule.mapped(a, b) {
            let beta = problem.beta().eval(x);
            let q = problem.q().eval(x);
            let f = problem.f().eval(x);
            let hats = [local_hat(mesh, k, k, x), local_hat(mesh, k, k + 1, x)];
            for (i, &(pi, di)) in hats.iter().enumerate() {
                for (j, &(pj, dj)) in hats.iter().enumerate() {
                    local[i][j] += wq * (beta * di * dj + q * pi * pj);
                }
                load[i] += wq * f * pi;
            }
        }
        system.scatter(k, local, load);
    }
    Ok(system)
}

/// Petrov-Galerkin system of the compact method over all nodes, before
/// boundary conditions: trial `psi_j`, test `phi_i`,
/// `a_ij = int(beta psi_j' phi_i' + q psi_j phi_i)` and
/// `F_i = int(f phi_i) - int(beta B' phi_i' + q B phi_i)` with `B` the bubble.
///
/// Every correction `c` (the enrichment of `psi_j`, or `B`) vanishes at
/// element ends and `phi_i'` is constant per element, so the stiffness part
/// is integrated as `int_e beta c' phi_i' = -phi_i' int_e beta' c`.
pub fn assemble_compact_full(problem: &ProblemSpec, mesh: &Mesh, rule: &QuadratureRule) -> Result<TridiagonalSystem> {
    problem.validate_on(mesh, rule)?;
    let mut system = TridiagonalSystem::zeros(mesh.n_nodes());
    let beta_field = problem.beta();
    let constant_beta = beta_field.constant_value().is_some();
    for (k, a, b) in mesh.elements() {
        let mut local = [[0.0; 2]; 2];
        let mut load = [0.0; 2];
        for (x, wq) in rule.mapped(a, b) {
            let beta = beta_field.eval(x);
            let dbeta = if constant_beta { 0.0 } else { beta_field.deriv(x)? };
            let q = problem.q().eval(x);
            let f = problem.f().eval(x);
            let enrich = Enrichment::at(problem, x)?;
            let w = weight(a, b, x);
            let hats = [local_hat(mesh, k, k, x), local_hat(mesh, k, k + 1, x)];
            let trials = [enrich.trial(hats[0], w).0, enrich.trial(hats[1], w).0];
            let (bub, _) = enrich.bubble(w);
            for (i, &(pi, di)) in hats.iter().enumerate() {
                for (j, (&(pj, dj), &tj)) in hats.iter().zip(&trials).enumerate() {
                    let correction = tj - pj;
                    local[i][j] += wq * (beta * di * dj - dbeta * correction * di + q * tj * pi);
                }
                load[i] += wq * (f * pi + dbeta * bub * di - q * bub * pi);
            }
        }
        system.scatter(k, local, load);
    }
    Ok(system)
}

/// Impose boundary conditions on a full-node system.
///
/// Dirichlet nodes are eliminated and their data moved to the load of the
/// neighbouring row. Neumann adds `beta(endpoint) g` to the load; Robin adds
/// `alpha` to the diagonal and `g` to the load.
pub fn apply_boundary(mut full: TridiagonalSystem, problem: &ProblemSpec) -> Result<ReducedSystem> {
    full.check()?;
    let m = full.len();
    let (x_l, x_r) = problem.domain();
    let last = m - 1;

    let natural = |sys: &mut TridiagonalSystem, row: usize, bc: BoundaryCondition, x: f64| match bc {
        BoundaryCondition::Neumann(g) => sys.rhs[row] += problem.beta().eval(x) * g,
        BoundaryCondition::Robin { alpha, g } => {
            sys.diag[row] += alpha;
            sys.rhs[row] += g;
        }
        BoundaryCondition::Dirichlet(_) => {}
    };
    natural(&mut full, 0, problem.bc_left(), x_l);
    natural(&mut full, last, problem.bc_right(), x_r);

    let left_value = match problem.bc_left() {
        BoundaryCondition::Dirichlet(g) => Some(g),
        _ => None,
    };
    let right_value = match problem.bc_right() {
        BoundaryCondition::Dirichlet(g) => Some(g),
        _ => None,
    };
    if let Some(g) = left_value {
        full.rhs[1] -= full.sub[0] * g;
    }
    if let Some(g) = right_value {
        full.rhs[last - 1] -= full.sup[last - 1] * g;
    }

    let lo = usize::from(left_value.is_some());
    let hi = if right_value.is_some() { last } else { m };
    if lo >= hi {
        return Err(FemError::MalformedSystem("no unknowns left after elimination".into()));
    }
    let system = TridiagonalSystem {
        sub: full.sub[lo..hi - 1].to_vec(),
        diag: full.diag[lo..hi].to_vec(),
        sup: full.sup[lo..hi - 1].to_vec(),
        rhs: full.rhs[lo..hi].to_vec(),
    };
    Ok(ReducedSystem {
        system,
        offset: lo,
        left_value,
        right_value,
    })
}

/// Classical P1 system with boundary conditions applied.
pub fn assemble_classical(problem: &ProblemSpec, mesh: &Mesh, rule: &QuadratureRule) -> Result<ReducedSystem> {
    apply_boundary(assemble_classical_full(problem, mesh, rule)?, problem)
}

/// Compact-method system with boundary conditions applied.
pub fn assemble_compact(problem: &ProblemSpec, mesh: &Mesh, rule: &QuadratureRule) -> Result<ReducedSystem> {
    apply_boundary(assemble_compact_full(problem, mesh, rule)?, problem)
}
