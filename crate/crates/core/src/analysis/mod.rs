//! Error norms, convergence orders and grid-refinement studies.

mod table;

pub use table::{format_order, format_sci, parse_csv, CSV_HEADER};

use crate::error::{FemError, Result};
use crate::geometry::gauss_legendre;
use crate::problem::{ProblemSpec, ScalarField};
use crate::solve::{solve, DiscreteSolution, Method, SolveOptions};

/// Quadrature used for error norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    /// Gauss points per sub-interval.
    pub order: usize,
    /// Equal sub-intervals per element.
    pub subdivisions: usize,
    /// Report the full H1 norm instead of the H1 seminorm.
    pub full_h1: bool,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            order: 7,
            subdivisions: 4,
            full_h1: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1: f64,
}

/// L2 and H1 errors of `solution` against `exact` in one sweep.
pub fn error_norms(solution: &DiscreteSolution, exact: &ScalarField, options: &NormOptions) -> Result<ErrorNorms> {
    if !exact.has_deriv() {
        return Err(FemError::MissingExactDerivative);
    }
    let (l2_sq, semi_sq) = squared_errors(solution, exact, options, true)?;
    let h1_sq = if options.full_h1 { semi_sq + l2_sq } else { semi_sq };
    Ok(ErrorNorms {
        l2: l2_sq.sqrt(),
        h1: h1_sq.sqrt(),
    })
}

/// `sqrt(int (u - u_h)^2)`.
pub fn error_l2(solution: &DiscreteSolution, exact: &ScalarField, options: &NormOptions) -> Result<f64> {
    Ok(squared_errors(solution, exact, options, false)?.0.sqrt())
}

/// H1 seminorm of the error, `sqrt(int (u' - u_h')^2)`, or the full H1
/// norm when `options.full_h1` is set.
pub fn error_h1(solution: &DiscreteSolution, exact: &ScalarField, options: &NormOptions) -> Result<f64> {
    Ok(error_norms(solution, exact, options)?.h1)
}

fn squared_errors(
    solution: &DiscreteSolution,
    exact: &ScalarField,
    options: &NormOptions,
    with_slope: bool,
) -> Result<(f64, f64)> {
    let rule = gauss_legendre(options.order)?;
    let parts = options.subdivisions.max(1);
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for (k, a, b) in solution.mesh().elements() {
        let width = (b - a) / parts as f64;
        for p in 0..parts {
            let lo = a + width * p as f64;
            let hi = if p + 1 == parts { b } else { lo + width };
            for (x, w) in rule.mapped(lo, hi) {
                let (uh, duh) = solution.evaluate_in(k, x)?;
                let e = exact.eval(x) - uh;
                l2 += w * e * e;
                if with_slope {
                    let de = exact.analytic_deriv(x).ok_or(FemError::MissingExactDerivative)? - duh;
                    semi += w * de * de;
                }
            }
        }
    }
    Ok((l2, semi))
}

/// Observed order between two meshes: `|log(e1/e2) / log(n2/n1)|`.
pub fn convergence_order(e1: f64, e2: f64, n1: usize, n2: usize) -> Result<f64> {
    if !(e1 > 0.0 && e2 > 0.0) {
        return Err(FemError::InvalidParameter(format!(
            "errors must be positive to compute an order, got {e1} and {e2}"
        )));
    }
    if n1 == n2 || n1 == 0 || n2 == 0 {
        return Err(FemError::InvalidParameter(format!(
            "mesh sizes must be distinct and positive, got {n1} and {n2}"
        )));
    }
    Ok(((e1 / e2).ln() / (n2 as f64 / n1 as f64).ln()).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StudyOptions {
    pub solve: SolveOptions,
    pub norm: NormOptions,
}

/// One line of a refinement table. Orders are absent on the first row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementRow {
    pub n: usize,
    pub l2_error: f64,
    pub l2_order: Option<f64>,
    pub h1_error: f64,
    pub h1_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub method: Method,
    pub problem: String,
    pub norm: NormOptions,
    pub rows: Vec<RefinementRow>,
}

impl RefinementReport {
    /// Build a report from `(N, errors)` pairs, filling orders from
    /// consecutive rows.
    pub fn from_errors(method: Method, problem: &str, norm: NormOptions, levels: &[(usize, ErrorNorms)]) -> Result<Self> {
        let mut rows: Vec<RefinementRow> = Vec::with_capacity(levels.len());
        for (i, &(n, e)) in levels.iter().enumerate() {
            let (l2_order, h1_order) = match i.checked_sub(1).map(|j| levels[j]) {
                Some((n0, e0)) => (
                    order_or_none(e0.l2, e.l2, n0, n),
                    order_or_none(e0.h1, e.h1, n0, n),
                ),
                None => (None, None),
            };
            rows.push(RefinementRow {
                n,
                l2_error: e.l2,
                l2_order,
                h1_error: e.h1,
                h1_order,
            });
        }
        Ok(Self {
            method,
            problem: problem.to_string(),
            norm,
            rows,
        })
    }

    pub fn last(&self) -> &RefinementRow {
        &self.rows[self.rows.len() - 1]
    }

    pub fn row(&self, n: usize) -> Option<&RefinementRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

// An exact zero error (e.g. a quadratic solution) has no defined order.
fn order_or_none(e1: f64, e2: f64, n1: usize, n2: usize) -> Option<f64> {
    convergence_order(e1, e2, n1, n2).ok()
}

pub(crate) fn check_levels(levels: &[usize]) -> Result<()> {
    if levels.len() < 2 {
        return Err(FemError::InvalidParameter(format!(
            "a refinement study needs at least 2 levels, got {}",
            levels.len()
        )));
    }
    if levels.windows(2).any(|p| p[0] >= p[1]) {
        return Err(FemError::InvalidParameter("levels must be strictly increasing".into()));
    }
    Ok(())
}

/// Solve at every level and tabulate L2 / H1 errors with observed orders.
pub fn refinement_study(problem: &ProblemSpec, method: Method, levels: &[usize], options: &StudyOptions) -> Result<RefinementReport> {
    check_levels(levels)?;
    let exact = problem.exact().ok_or(FemError::MissingExactSolution)?;
    let errors = levels
        .iter()
        .map(|&n| {
            let solution = solve(problem, n, method, &options.solve)?;
            Ok((n, error_norms(&solution, exact, &options.norm)?))
        })
        .collect::<Result<Vec<_>>>()?;
    RefinementReport::from_errors(method, problem.name(), options.norm, &errors)
}
