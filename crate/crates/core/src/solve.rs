//! Tridiagonal solve and the three end-to-end methods.

use std::fmt;
use std::str::FromStr;

use crate::assembly::{assemble_classical, assemble_compact, TridiagonalSystem};
use crate::basis::{weight, Enrichment, ValueSlope};
use crate::error::{FemError, Result};
use crate::geometry::{gauss_legendre, Mesh};
use crate::problem::ProblemSpec;

/// Solves a tridiagonal system by forward elimination and back substitution.
pub fn thomas_solve(system: &TridiagonalSystem) -> Result<Vec<f64>> {
    system.check()?;
    let m = system.len();
    let tiny = 1e-300 * system.scale().max(f64::MIN_POSITIVE);
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];

    let singular = |p: f64| p == 0.0 || p.abs() < tiny || !p.is_finite();
    let mut pivot = system.diag[0];
    if singular(pivot) {
        return Err(FemError::SingularSystem { row: 0 });
    }
    if m > 1 {
        c[0] = system.sup[0] / pivot;
    }
    d[0] = system.rhs[0] / pivot;
    for i in 1..m {
        let l = system.sub[i - 1];
        pivot = system.diag[i] - l * c[i - 1];
        if singular(pivot) {
            return Err(FemError::SingularSystem { row: i });
        }
        if i + 1 < m {
            c[i] = system.sup[i] / pivot;
        }
        d[i] = (system.rhs[i] - l * d[i - 1]) / pivot;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Which discretization produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Classical piecewise-linear Galerkin.
    P1,
    /// P1 plus the `-w f / (2 beta)` correction; constant beta and q = 0 only.
    PosteriorCorrected,
    /// Enriched trial space with bubble, tested against hats.
    Compact,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::P1, Method::PosteriorCorrected, Method::Compact];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::P1 => "p1",
            Method::PosteriorCorrected => "posterior",
            Method::Compact => "compact",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = FemError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p1" => Ok(Method::P1),
            "posterior" => Ok(Method::PosteriorCorrected),
            "compact" => Ok(Method::Compact),
            other => Err(FemError::InvalidParameter(format!(
                "unknown method '{other}' (expected p1, posterior or compact)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Gauss points per element for assembly integrals.
    pub assembly_order: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { assembly_order: 5 }
    }
}

/// Nodal coefficients plus the method-specific evaluator.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    method: Method,
    mesh: Mesh,
    coeffs: Vec<f64>,
    problem: ProblemSpec,
}

impl DiscreteSolution {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// One coefficient per mesh node, boundary values included.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    /// Value and derivative of the discrete solution at `x`.
    pub fn evaluate(&self, x: f64) -> Result<ValueSlope> {
        let k = self.mesh.locate(x)?;
        self.evaluate_in(k, x)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?.0)
    }

    pub fn slope(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?.1)
    }

    /// Evaluate on element `k`; `x` is assumed to lie in it.
    pub(crate) fn evaluate_in(&self, k: usize, x: f64) -> Result<ValueSlope> {
        let nodes = self.mesh.nodes();
        let (a, b) = (nodes[k], nodes[k + 1]);
        let h = b - a;
        let (ca, cb) = (self.coeffs[k], self.coeffs[k + 1]);
        let linear = ca * ((b - x) / h) + cb * ((x - a) / h);
        let slope = (cb - ca) / h;
        match self.method {
            Method::P1 => Ok((linear, slope)),
            Method::PosteriorCorrected => {
                let beta = self.problem.beta().eval(x);
                let f = self.problem.f().eval(x);
                let df = self.problem.f().deriv(x)?;
                let (w, dw) = weight(a, b, x);
                let scale = -0.5 / beta;
                Ok((linear + scale * w * f, slope + scale * (dw * f + w * df)))
            }
            Method::Compact => {
                // Enrichment applied to the piecewise-linear part, plus the bubble.
                let e = Enrichment::at(&self.problem, x)?;
                let w = weight(a, b, x);
                let (u, du) = e.trial((linear, slope), w);
                let (bub, dbub) = e.bubble(w);
                Ok((u + bub, du + dbub))
            }
        }
    }
}

/// Classical P1 solution on `n` uniform elements.
pub fn solve_p1(problem: &ProblemSpec, n: usize, options: &SolveOptions) -> Result<DiscreteSolution> {
    solve_on_mesh(problem, uniform_mesh_for(problem, n)?, Method::P1, options)
}

/// P1 solution with the interpolation-error correction added on every
/// element. Requires constant `beta` and `q = 0`.
pub fn solve_posterior(problem: &ProblemSpec, n: usize, options: &SolveOptions) -> Result<DiscreteSolution> {
    solve_on_mesh(problem, uniform_mesh_for(problem, n)?, Method::PosteriorCorrected, options)
}

/// Compact third-order solution on `n` uniform elements.
pub fn solve_compact(problem: &ProblemSpec, n: usize, options: &SolveOptions) -> Result<DiscreteSolution> {
    solve_on_mesh(problem, uniform_mesh_for(problem, n)?, Method::Compact, options)
}

pub fn solve(problem: &ProblemSpec, n: usize, method: Method, options: &SolveOptions) -> Result<DiscreteSolution> {
    solve_on_mesh(problem, uniform_mesh_for(problem, n)?, method, options)
}

fn uniform_mesh_for(problem: &ProblemSpec, n: usize) -> Result<Mesh> {
    let (x_l, x_r) = problem.domain();
    Mesh::uniform(x_l, x_r, n)
}

/// Solve on an arbitrary mesh spanning the problem domain.
pub fn solve_on_mesh(problem: &ProblemSpec, mesh: Mesh, method: Method, options: &SolveOptions) -> Result<DiscreteSolution> {
    problem.check_mesh(&mesh)?;
    let rule = gauss_legendre(options.assembly_order)?;
    if method == Method::PosteriorCorrected {
        require_constant_coefficients(problem)?;
    }
    let reduced = match method {
        Method::P1 | Method::PosteriorCorrected => assemble_classical(problem, &mesh, &rule)?,
        Method::Compact => assemble_compact(problem, &mesh, &rule)?,
    };
    let interior = thomas_solve(&reduced.system)?;
    let coeffs = reduced.reconstruct(&interior);
    Ok(DiscreteSolution {
        method,
        mesh,
        coeffs,
        problem: problem.clone(),
    })
}

const CONSTANCY_SAMPLES: usize = 64;

/// Constant `beta` (relative spread <= 1e-12) and `q = 0` (|q| <= 1e-14),
/// sampled at 64 points unless the fields are flagged constant.
fn require_constant_coefficients(problem: &ProblemSpec) -> Result<()> {
    let (x_l, x_r) = problem.domain();
    let samples = (0..CONSTANCY_SAMPLES).map(|i| x_l + (x_r - x_l) * i as f64 / (CONSTANCY_SAMPLES - 1) as f64);

    if problem.beta().constant_value().is_none() {
        let values: Vec<f64> = samples.clone().map(|x| problem.beta().eval(x)).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi - lo <= 1e-12 * hi.abs()) {
            return Err(FemError::ConstantCoefficientRequired(format!(
                "posterior correction needs constant beta, sampled range [{lo}, {hi}]"
            )));
        }
    }
    match problem.q().constant_value() {
        Some(0.0) => {}
        Some(q) => {
            return Err(FemError::ConstantCoefficientRequired(format!(
                "posterior correction needs q = 0, got q = {q}"
            )))
        }
        None => {
            if let Some(x) = samples.clone().find(|&x| problem.q().eval(x).abs() > 1e-14) {
                return Err(FemError::ConstantCoefficientRequired(format!(
                    "posterior correction needs q = 0, got q({x}) = {}",
                    problem.q().eval(x)
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{catalog_poisson, catalog_variable, BoundaryCondition, ScalarField};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let m = b.len();
        for c in 0..m {
            let piv = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
            a.swap(c, piv);
            b.swap(c, piv);
            for r in c + 1..m {
                let factor = a[r][c] / a[c][c];
                for cc in c..m {
                    a[r][cc] -= factor * a[c][cc];
                }
                b[r] -= factor * b[c];
            }
        }
        let mut x = vec![0.0; m];
        for r in (0..m).rev() {
            let s: f64 = (r + 1..m).map(|c| a[r][c] * x[c]).sum();
            x[r] = (b[r] - s) / a[r][r];
        }
        x
    }

    fn unit_source_problem() -> ProblemSpec {
        // u = x (1 - x) / 2
        ProblemSpec::new(
            (0.0, 1.0),
            ScalarField::constant(1.0),
            ScalarField::constant(0.0),
            ScalarField::constant(1.0),
        )
        .unwrap()
        .with_exact(ScalarField::new(|x| 0.5 * x * (1.0 - x)).with_deriv(|x| 0.5 - x))
    }

    #[test]
    fn thomas_examples() {
        let id = TridiagonalSystem::new(vec![0.0; 3], vec![1.0; 4], vec![0.0; 3], vec![1.0, -2.0, 3.0, 4.5]).unwrap();
        assert_eq!(thomas_solve(&id).unwrap(), vec![1.0, -2.0, 3.0, 4.5]);

        let s = TridiagonalSystem::new(vec![-1.0], vec![2.0, 2.0], vec![-1.0], vec![1.0, 1.0]).unwrap();
        let x = thomas_solve(&s).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);

        let single = TridiagonalSystem::new(vec![], vec![4.0], vec![], vec![2.0]).unwrap();
        assert_eq!(thomas_solve(&single).unwrap(), vec![0.5]);
    }

    #[test]
    fn thomas_detects_singular_systems() {
        let s = TridiagonalSystem::new(vec![1.0], vec![1.0, 1.0], vec![1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(thomas_solve(&s), Err(FemError::SingularSystem { row: 1 }));
        let z = TridiagonalSystem::new(vec![], vec![0.0], vec![], vec![1.0]).unwrap();
        assert_eq!(thomas_solve(&z), Err(FemError::SingularSystem { row: 0 }));
    }

    #[test]
    fn thomas_matches_dense_oracle_on_random_systems() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
        for _ in 0..200 {
            let m: usize = rng.gen_range(1..=64);
            let sub: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sup: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let diag: Vec<f64> = (0..m)
                .map(|i| {
                    let off = sub.get(i.wrapping_sub(1)).map_or(0.0, |v: &f64| v.abs())
                        + sup.get(i).map_or(0.0, |v: &f64| v.abs());
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    sign * (off + rng.gen_range(0.1..2.0))
                })
                .collect();
            let rhs: Vec<f64> = (0..m).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let sys = TridiagonalSystem::new(sub, diag, sup, rhs.clone()).unwrap();
            let x = thomas_solve(&sys).unwrap();
            let oracle = dense_solve(sys.to_dense(), rhs);
            let norm = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (u, v) in x.iter().zip(&oracle) {
                assert!((u - v).abs() <= 1e-12 * norm);
            }
        }
    }

    #[test]
    fn p1_is_nodally_exact_for_unit_source() {
        let p = unit_source_problem();
        for n in [2, 3, 8, 33] {
            let s = solve_p1(&p, n, &SolveOptions::default()).unwrap();
            for (x, c) in s.mesh().nodes().iter().zip(s.coeffs()) {
                assert!((c - 0.5 * x * (1.0 - x)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn zero_source_gives_zero_solution() {
        let p = ProblemSpec::new(
            (0.0, 1.0),
            ScalarField::new(f64::exp),
            ScalarField::new(|x| x * x),
            ScalarField::constant(0.0),
        )
        .unwrap();
        for method in Method::ALL {
            if method == Method::PosteriorCorrected {
                continue;
            }
            let s = solve(&p, 10, method, &SolveOptions::default()).unwrap();
            assert!(s.coeffs().iter().all(|&c| c == 0.0));
            assert_eq!(s.evaluate(0.37).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn posterior_recovers_quadratic_exactly() {
        let p = unit_source_problem();
        let s = solve_posterior(&p, 4, &SolveOptions::default()).unwrap();
        for j in 0..=400 {
            let x = j as f64 / 400.0;
            let (v, d) = s.evaluate(x).unwrap();
            assert!((v - 0.5 * x * (1.0 - x)).abs() <= 1e-12);
            assert!((d - (0.5 - x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn posterior_requires_constant_coefficients() {
        let p = catalog_variable(5.0 * PI, 0.0).unwrap();
        let err = solve_posterior(&p, 8, &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, FemError::ConstantCoefficientRequired(_)));
        assert!(err.is_numerical());

        let q_only = ProblemSpec::new(
            (0.0, 1.0),
            ScalarField::new(|_| 2.0),
            ScalarField::new(|x| x),
            ScalarField::constant(1.0),
        )
        .unwrap();
        assert!(matches!(
            solve_posterior(&q_only, 8, &SolveOptions::default()),
            Err(FemError::ConstantCoefficientRequired(_))
        ));

        // Unflagged but constant beta passes the sampled check.
        let sampled = ProblemSpec::new(
            (0.0, 1.0),
            ScalarField::new(|_| 2.0),
            ScalarField::new(|_| 0.0),
            ScalarField::constant(1.0),
        )
        .unwrap();
        assert!(solve_posterior(&sampled, 8, &SolveOptions::default()).is_ok());
    }

    #[test]
    fn compact_coincides_with_posterior_for_poisson() {
        let p = catalog_poisson(5.0 * PI).unwrap();
        let opts = SolveOptions::default();
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for n in [8, 16, 32] {
            let p1 = solve_p1(&p, n, &opts).unwrap();
            let post = solve_posterior(&p, n, &opts).unwrap();
            let comp = solve_compact(&p, n, &opts).unwrap();
            for (a, b) in comp.coeffs().iter().zip(p1.coeffs()) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
            for _ in 0..200 {
                let x: f64 = rng.gen();
                let (u, du) = comp.evaluate(x).unwrap();
                let (v, dv) = post.evaluate(x).unwrap();
                assert!((u - v).abs() <= 1e-12);
                assert!((du - dv).abs() <= 1e-10 * dv.abs().max(1.0));
            }
        }
    }

    #[test]
    fn dirichlet_nodes_carry_boundary_data() {
        let p = catalog_poisson(PI)
            .unwrap()
            .with_boundary(BoundaryCondition::Dirichlet(0.25), BoundaryCondition::Dirichlet(-1.5))
            .unwrap();
        for method in Method::ALL {
            let s = solve(&p, 6, method, &SolveOptions::default()).unwrap();
            assert_eq!(s.coeffs().len(), 7);
            assert_eq!(s.coeffs()[0], 0.25);
            assert_eq!(s.coeffs()[6], -1.5);
        }
    }

    #[test]
    fn minimal_mesh_has_one_unknown() {
        let p = catalog_poisson(PI).unwrap();
        let s = solve_compact(&p, 2, &SolveOptions::default()).unwrap();
        assert_eq!(s.coeffs().len(), 3);
        assert!(s.coeffs()[1] > 0.0);
    }

    /// Nonhomogeneous Neumann/Robin data: u = cos(x) + 2 on [0, 1] with
    /// beta = 1, q = 1, f = 2 cos(x) + 2. u'(0) = 0, so the left outward
    /// normal derivative is 0; at x = 1, beta u' + alpha u = -sin 1 + alpha (cos 1 + 2).
    #[test]
    fn natural_conditions_converge() {
        let alpha = 1.5;
        let g = -(1.0f64).sin() + alpha * ((1.0f64).cos() + 2.0);
        let p = ProblemSpec::new(
            (0.0, 1.0),
            ScalarField::constant(1.0),
            ScalarField::constant(1.0),
            ScalarField::new(|x: f64| 2.0 * x.cos() + 2.0),
        )
        .unwrap()
        .with_boundary(BoundaryCondition::Neumann(0.0), BoundaryCondition::Robin { alpha, g })
        .unwrap();
        let err = |n: usize| {
            let s = solve_p1(&p, n, &SolveOptions::default()).unwrap();
            s.mesh()
                .nodes()
                .iter()
                .zip(s.coeffs())
                .map(|(x, c)| (c - (x.cos() + 2.0)).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e2 < 1e-3);
        assert!((e1 / e2).log2() > 1.8);
    }

    #[test]
    fn method_parsing() {
        for m in Method::ALL {
            assert_eq!(m.tag().parse::<Method>().unwrap(), m);
        }
        assert!("spline".parse::<Method>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn evaluation_at_nodes_returns_coefficients(
            n in 2usize..40,
            k1 in 1.0f64..20.0,
            k2 in 0.0f64..10.0,
            method_index in 0usize..3,
        ) {
            let method = Method::ALL[method_index];
            let p = if method == Method::PosteriorCorrected {
                catalog_poisson(k1).unwrap()
            } else {
                catalog_variable(k1, k2).unwrap()
            };
            let s = solve(&p, n, method, &SolveOptions::default()).unwrap();
            for (x, c) in s.mesh().nodes().iter().zip(s.coeffs()) {
                let v = s.value(*x).unwrap();
                prop_assert!((v - c).abs() <= 1e-14 * c.abs().max(1.0));
            }
        }
    }
}
