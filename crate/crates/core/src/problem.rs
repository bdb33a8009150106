//! Coefficient fields, boundary conditions and the boundary value problem
//!
//! ```text
//!     -(beta(x) u'(x))' + q(x) u(x) = f(x),   x_l < x < x_r
//! ```
//!
//! together with the built-in catalog of manufactured problems.

use std::fmt;
use std::sync::Arc;

use crate::error::{FemError, Result};
use crate::geometry::{Mesh, QuadratureRule};

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of one variable, optionally with analytic derivatives.
#[derive(Clone)]
pub struct ScalarField {
    eval: Eval,
    deriv: Option<Eval>,
    deriv2: Option<Eval>,
    constant: Option<f64>,
    domain: Option<(f64, f64)>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_deriv", &self.deriv.is_some())
            .field("analytic_deriv2", &self.deriv2.is_some())
            .field("constant", &self.constant)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ScalarField {
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            deriv: None,
            deriv2: None,
            constant: None,
            domain: None,
        }
    }

    /// A field known to be constant; its derivatives are exactly zero.
    pub fn constant(value: f64) -> Self {
        Self {
            eval: Arc::new(move |_| value),
            deriv: Some(Arc::new(|_| 0.0)),
            deriv2: Some(Arc::new(|_| 0.0)),
            constant: Some(value),
            domain: None,
        }
    }

    pub fn with_deriv<F>(mut self, deriv: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    pub fn with_second_deriv<F>(mut self, deriv2: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.deriv2 = Some(Arc::new(deriv2));
        self
    }

    /// Restrict finite-difference stencils to `[lo, hi]`.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn has_deriv(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn has_second_deriv(&self) -> bool {
        self.deriv2.is_some()
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }

    /// Analytic derivative if attached.
    pub fn analytic_deriv(&self, x: f64) -> Option<f64> {
        self.deriv.as_ref().map(|d| d(x))
    }

    pub fn analytic_second_deriv(&self, x: f64) -> Option<f64> {
        self.deriv2.as_ref().map(|d| d(x))
    }

    /// First derivative at `x`; see [`field_deriv`].
    pub fn deriv(&self, x: f64) -> Result<f64> {
        field_deriv(self, x)
    }

    /// Second derivative: analytic when attached, otherwise a finite
    /// difference of the first derivative.
    pub fn second_deriv(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        if let Some(d2) = &self.deriv2 {
            return Ok(d2(x));
        }
        finite_difference(&|t| field_deriv(self, t), x, self.domain)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        match self.domain {
            Some((lo, hi)) if !(x >= lo && x <= hi) => Err(FemError::PointOutsideDomain { x, lo, hi }),
            _ => Ok(()),
        }
    }
}

/// Derivative of a field at `x`: the analytic derivative when present,
/// otherwise a five-point finite difference (one-sided near domain ends).
pub fn field_deriv(field: &ScalarField, x: f64) -> Result<f64> {
    field.check_domain(x)?;
    if let Some(d) = &field.deriv {
        return Ok(d(x));
    }
    finite_difference(&|t| Ok(field.eval(t)), x, field.domain)
}

/// Fourth-order five-point derivative of `g` at `x`, step
/// `max(1, |x|) * eps^(1/5)`. Stencils never leave `domain`.
pub fn finite_difference(g: &dyn Fn(f64) -> Result<f64>, x: f64, domain: Option<(f64, f64)>) -> Result<f64> {
    let h = x.abs().max(1.0) * f64::EPSILON.powf(0.2);
    let (lo, hi) = domain.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    if x - 2.0 * h >= lo && x + 2.0 * h <= hi {
        let (m2, m1, p1, p2) = (g(x - 2.0 * h)?, g(x - h)?, g(x + h)?, g(x + 2.0 * h)?);
        return Ok((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h));
    }
    // One-sided; the sign of the step points into the domain.
    let s = if x - 2.0 * h < lo { h } else { -h };
    let f: Vec<f64> = (0..5).map(|j| g(x + s * j as f64)).collect::<Result<_>>()?;
    Ok((-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * s))
}

/// Boundary data at one endpoint.
///
/// With outward normal `n` (−1 on the left, +1 on the right):
/// `Dirichlet(g)`: `u = g`; `Neumann(g)`: `u' n = g`;
/// `Robin { alpha, g }`: `beta u' n + alpha u = g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet(f64),
    Neumann(f64),
    Robin { alpha: f64, g: f64 },
}

impl BoundaryCondition {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BoundaryCondition::Robin { alpha, .. } if !(alpha >= 0.0) => Err(FemError::InvalidParameter(
                format!("Robin coefficient must be non-negative, got {alpha}"),
            )),
            _ => Ok(()),
        }
    }
}

/// The boundary value problem `-(beta u')' + q u = f` on `[x_l, x_r]`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    name: String,
    domain: (f64, f64),
    beta: ScalarField,
    q: ScalarField,
    f: ScalarField,
    bc_left: BoundaryCondition,
    bc_right: BoundaryCondition,
    exact: Option<ScalarField>,
}

impl ProblemSpec {
    /// Problem with homogeneous Dirichlet conditions at both ends.
    pub fn new(domain: (f64, f64), beta: ScalarField, q: ScalarField, f: ScalarField) -> Result<Self> {
        let (x_l, x_r) = domain;
        if !(x_l < x_r) {
            return Err(FemError::DegenerateDomain { x_l, x_r });
        }
        let bound = |s: ScalarField| s.with_domain(x_l, x_r);
        Ok(Self {
            name: "custom".to_string(),
            domain,
            beta: bound(beta),
            q: bound(q),
            f: bound(f),
            bc_left: BoundaryCondition::Dirichlet(0.0),
            bc_right: BoundaryCondition::Dirichlet(0.0),
            exact: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_boundary(mut self, left: BoundaryCondition, right: BoundaryCondition) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        self.bc_left = left;
        self.bc_right = right;
        Ok(self)
    }

    /// Attach the exact solution (with its derivative for H1 errors).
    pub fn with_exact(mut self, u: ScalarField) -> Self {
        self.exact = Some(u.with_domain(self.domain.0, self.domain.1));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn beta(&self) -> &ScalarField {
        &self.beta
    }

    pub fn q(&self) -> &ScalarField {
        &self.q
    }

    pub fn f(&self) -> &ScalarField {
        &self.f
    }

    pub fn bc_left(&self) -> BoundaryCondition {
        self.bc_left
    }

    pub fn bc_right(&self) -> BoundaryCondition {
        self.bc_right
    }

    pub fn exact(&self) -> Option<&ScalarField> {
        self.exact.as_ref()
    }

    /// Mesh must cover exactly the problem domain.
    pub fn check_mesh(&self, mesh: &Mesh) -> Result<()> {
        let (x_l, x_r) = self.domain;
        if mesh.x_l() != x_l || mesh.x_r() != x_r {
            return Err(FemError::MeshDomainMismatch { x_l, x_r });
        }
        Ok(())
    }

    /// Sample `beta > 0` and `q >= 0` at every quadrature point of the mesh.
    /// Returns the smallest sampled `beta` (the coercivity constant).
    pub fn validate_on(&self, mesh: &Mesh, rule: &QuadratureRule) -> Result<f64> {
        self.check_mesh(mesh)?;
        let mut beta_0 = f64::INFINITY;
        for (_, a, b) in mesh.elements() {
            for (x, _) in rule.mapped(a, b) {
                let beta = self.beta.eval(x);
                if !(beta > 0.0) {
                    return Err(FemError::CoercivityViolation { x, beta });
                }
                let q = self.q.eval(x);
                if !(q >= 0.0) {
                    return Err(FemError::NegativeReaction { x, q });
                }
                beta_0 = beta_0.min(beta);
            }
        }
        Ok(beta_0)
    }
}

/// `sin(a x)` with its first three derivatives.
#[derive(Debug, Clone, Copy)]
struct Sine(f64);

impl Sine {
    fn d(&self, order: u32, x: f64) -> f64 {
        let a = self.0;
        let (s, c) = (a * x).sin_cos();
        let amp = a.powi(order as i32);
        match order % 4 {
            0 => amp * s,
            1 => amp * c,
            2 => -amp * s,
            _ => -amp * c,
        }
    }
}

/// Poisson problem: `u = sin(k x)` on `[0, 1]` with `beta = 1`, `q = 0`,
/// `f = k^2 sin(k x)` and homogeneous Dirichlet data.
pub fn catalog_poisson(k: f64) -> Result<ProblemSpec> {
    if k == 0.0 || !k.is_finite() {
        return Err(FemError::InvalidParameter(format!("wave number must be nonzero and finite, got {k}")));
    }
    let s = Sine(k);
    let f = ScalarField::new(move |x| -s.d(2, x)).with_deriv(move |x| -s.d(3, x));
    let exact = ScalarField::new(move |x| s.d(0, x))
        .with_deriv(move |x| s.d(1, x))
        .with_second_deriv(move |x| s.d(2, x));
    Ok(ProblemSpec::new((0.0, 1.0), ScalarField::constant(1.0), ScalarField::constant(0.0), f)?
        .with_name(format!("poisson(k={k})"))
        .with_exact(exact))
}

/// Variable-coefficient problem: `u = sin(k1 x) cos(k2 x)` on `[0, 1]` with `beta = e^x`,
/// `q = x^2` and `f = -e^x (u'' + u') + x^2 u` (expanded analytically).
pub fn catalog_variable(k1: f64, k2: f64) -> Result<ProblemSpec> {
    if (k1 == 0.0 && k2 == 0.0) || !k1.is_finite() || !k2.is_finite() {
        return Err(FemError::InvalidParameter(format!(
            "(k1, k2) must be finite and not both zero, got ({k1}, {k2})"
        )));
    }
    // sin(k1 x) cos(k2 x) = (sin((k1 + k2) x) + sin((k1 - k2) x)) / 2
    let (p, m) = (Sine(k1 + k2), Sine(k1 - k2));
    let u = move |order: u32, x: f64| 0.5 * (p.d(order, x) + m.d(order, x));

    let f = ScalarField::new(move |x| -x.exp() * (u(2, x) + u(1, x)) + x * x * u(0, x)).with_deriv(move |x| {
        -x.exp() * (u(3, x) + 2.0 * u(2, x) + u(1, x)) + 2.0 * x * u(0, x) + x * x * u(1, x)
    });
    let beta = ScalarField::new(f64::exp)
        .with_deriv(f64::exp)
        .with_second_deriv(f64::exp);
    let q = ScalarField::new(|x| x * x)
        .with_deriv(|x| 2.0 * x)
        .with_second_deriv(|_| 2.0);
    let exact = ScalarField::new(move |x| u(0, x))
        .with_deriv(move |x| u(1, x))
        .with_second_deriv(move |x| u(2, x));
    Ok(ProblemSpec::new((0.0, 1.0), beta, q, f)?
        .with_name(format!("variable(k1={k1}, k2={k2})"))
        .with_exact(exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gauss_legendre;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn poisson_catalog_basics() {
        let p = catalog_poisson(5.0 * PI).unwrap();
        let u = p.exact().unwrap();
        assert_eq!(u.eval(0.0), 0.0);
        assert!(u.eval(1.0).abs() < 1e-12);
        let expect = (5.0 * PI).powi(2);
        assert!((p.f().eval(0.1) - expect).abs() <= 1e-12 * expect);
        assert_eq!(p.domain(), (0.0, 1.0));
        assert_eq!(p.bc_left(), BoundaryCondition::Dirichlet(0.0));
        assert!(catalog_poisson(0.0).is_err());
    }

    #[test]
    fn variable_catalog_reductions() {
        let p = catalog_variable(5.0 * PI, 0.0).unwrap();
        let u = p.exact().unwrap();
        let p2 = catalog_variable(5.0 * PI, 5.0 * PI).unwrap();
        let u2 = p2.exact().unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((u.eval(x) - (5.0 * PI * x).sin()).abs() < 1e-14);
            assert!((u2.eval(x) - 0.5 * (10.0 * PI * x).sin()).abs() < 1e-14);
        }
        assert!(catalog_variable(0.0, 0.0).is_err());
        assert!(catalog_variable(0.0, 3.0).is_ok());
    }

    #[test]
    fn endpoints_vanish_for_paper_parameters() {
        let pairs = [(5.0, 0.0), (50.0, 0.0), (5.0, 5.0), (50.0, 50.0)];
        for k in [5.0, 50.0] {
            let u = catalog_poisson(k * PI).unwrap();
            let u = u.exact().unwrap();
            assert!(u.eval(0.0).abs() <= 1e-12 && u.eval(1.0).abs() <= 1e-12);
        }
        for (a, b) in pairs {
            let p = catalog_variable(a * PI, b * PI).unwrap();
            let u = p.exact().unwrap();
            assert!(u.eval(0.0).abs() <= 1e-12 && u.eval(1.0).abs() <= 1e-12);
        }
    }

    /// Product-rule oracle for `-(beta u')' + q u`, independent of the
    /// sum-to-product form the catalog uses.
    fn variable_residual_oracle(k1: f64, k2: f64, x: f64) -> f64 {
        let (s1, c1) = (k1 * x).sin_cos();
        let (s2, c2) = (k2 * x).sin_cos();
        let u = s1 * c2;
        let du = k1 * c1 * c2 - k2 * s1 * s2;
        let d2u = -(k1 * k1 + k2 * k2) * s1 * c2 - 2.0 * k1 * k2 * c1 * s2;
        -(x.exp() * du + x.exp() * d2u) + x * x * u
    }

    #[test]
    fn manufacturing_consistency() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for (a, b) in [(5.0, 0.0), (50.0, 0.0), (5.0, 5.0), (50.0, 50.0), (3.0, 1.5)] {
            let (k1, k2) = (a * PI, b * PI);
            let p = catalog_variable(k1, k2).unwrap();
            let scale = k1 * k1 + k2 * k2;
            for _ in 0..100 {
                let x: f64 = rng.gen();
                let oracle = variable_residual_oracle(k1, k2, x);
                let got = p.f().eval(x);
                assert!((got - oracle).abs() <= 1e-9 * oracle.abs().max(scale * 1e-3), "x={x}");
            }
        }
        for a in [5.0, 50.0] {
            let k = a * PI;
            let p = catalog_poisson(k).unwrap();
            let u = p.exact().unwrap();
            for _ in 0..100 {
                let x: f64 = rng.gen();
                // -u'' with beta = 1, q = 0
                let oracle = -u.analytic_second_deriv(x).unwrap();
                assert!((p.f().eval(x) - oracle).abs() <= 1e-9 * oracle.abs().max(1.0));
            }
        }
    }

    #[test]
    fn source_derivatives_match_finite_differences() {
        let p = catalog_variable(5.0 * PI, 5.0 * PI).unwrap();
        for i in 1..10 {
            let x = i as f64 / 10.0;
            let analytic = p.f().deriv(x).unwrap();
            let fd = finite_difference(&|t| Ok(p.f().eval(t)), x, Some((0.0, 1.0))).unwrap();
            assert!((analytic - fd).abs() <= 1e-6 * analytic.abs().max(100.0), "x={x}");
        }
    }

    #[test]
    fn field_deriv_examples() {
        let beta = ScalarField::new(f64::exp).with_deriv(f64::exp);
        assert_eq!(field_deriv(&beta, 0.0).unwrap(), 1.0);

        let cubic = ScalarField::new(|x| x * x * x);
        assert!((field_deriv(&cubic, 2.0).unwrap() - 12.0).abs() < 1e-8);

        let c = ScalarField::new(|_| 3.5);
        for x in [-10.0, 0.0, 0.3, 7.0] {
            assert!(field_deriv(&c, x).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn fallback_agrees_with_analytic_on_catalog_fields() {
        let p = catalog_variable(5.0 * PI, 0.0).unwrap();
        for field in [p.beta(), p.q(), p.f(), p.exact().unwrap()] {
            let (lo, hi) = field.domain().unwrap();
            let stripped = ScalarField::new({
                let g = field.clone();
                move |x| g.eval(x)
            })
            .with_domain(lo, hi);
            let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
            let scale = xs
                .iter()
                .map(|&x| field.deriv(x).unwrap().abs())
                .fold(1.0, f64::max);
            for &x in &xs {
                let a = field.deriv(x).unwrap();
                let fd = stripped.deriv(x).unwrap();
                assert!((a - fd).abs() <= 1e-8 * scale, "x={x} a={a} fd={fd}");
            }
        }
    }

    #[test]
    fn one_sided_near_domain_ends() {
        let g = ScalarField::new(|x: f64| x.sqrt()).with_domain(0.0, 1.0);
        // The centred stencil would evaluate sqrt at negative x.
        let d = g.deriv(1e-3).unwrap();
        assert!(d.is_finite());
        assert!(matches!(g.deriv(1.5), Err(FemError::PointOutsideDomain { .. })));
        let cubic = ScalarField::new(|x| x * x * x).with_domain(0.0, 1.0);
        assert!((cubic.deriv(1.0).unwrap() - 3.0).abs() < 1e-8);
        assert!(cubic.deriv(0.0).unwrap().abs() < 1e-8);
    }

    #[test]
    fn coercivity_is_validated() {
        let p = ProblemSpec::new(
            (-1.0, 1.0),
            ScalarField::new(|x| x),
            ScalarField::constant(0.0),
            ScalarField::constant(1.0),
        )
        .unwrap();
        let mesh = Mesh::uniform(-1.0, 1.0, 8).unwrap();
        let rule = gauss_legendre(5).unwrap();
        assert!(matches!(p.validate_on(&mesh, &rule), Err(FemError::CoercivityViolation { .. })));

        let p = ProblemSpec::new(
            (0.0, 1.0),
            ScalarField::constant(1.0),
            ScalarField::new(|x| x - 0.5),
            ScalarField::constant(1.0),
        )
        .unwrap();
        let mesh = Mesh::uniform(0.0, 1.0, 8).unwrap();
        assert!(matches!(p.validate_on(&mesh, &rule), Err(FemError::NegativeReaction { .. })));

        let p = catalog_variable(5.0 * PI, 0.0).unwrap();
        let beta_0 = p.validate_on(&mesh, &rule).unwrap();
        assert!(beta_0 > 1.0 && beta_0 < 1.01);
    }

    #[test]
    fn robin_alpha_must_be_nonnegative() {
        let p = catalog_poisson(PI).unwrap();
        let bad = BoundaryCondition::Robin { alpha: -1.0, g: 0.0 };
        assert!(p.clone().with_boundary(bad, BoundaryCondition::Dirichlet(0.0)).is_err());
        let ok = BoundaryCondition::Robin { alpha: 2.0, g: 1.0 };
        assert!(p.with_boundary(ok, BoundaryCondition::Neumann(1.0)).is_ok());
    }
}
