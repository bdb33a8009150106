//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function is a thin wrapper over a plain function returning
//! `compact_fem::Result`, so the numerics are testable natively.

use std::f64::consts::PI;

use compact_fem::{
    catalog_poisson, catalog_variable, hat, modified_trial, refinement_study, solve, FemError, Mesh, Method,
    ProblemSpec, Result, SolveOptions, StudyOptions,
};
use wasm_bindgen::prelude::*;

pub fn problem(name: &str, k1_pi: f64, k2_pi: f64) -> Result<ProblemSpec> {
    match name {
        "poisson" => catalog_poisson(k1_pi * PI),
        "variable" => catalog_variable(k1_pi * PI, k2_pi * PI),
        other => Err(FemError::InvalidParameter(format!("unknown problem '{other}'"))),
    }
}

/// Samples as interleaved rows `[x, uh, u, duh, du]`.
pub fn solution_samples(p: &ProblemSpec, method: Method, n: usize, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(FemError::InvalidParameter(format!("need at least 2 samples, got {samples}")));
    }
    let sol = solve(p, n, method, &SolveOptions::default())?;
    let exact = p.exact().ok_or(FemError::MissingExactSolution)?;
    let (x_l, x_r) = p.domain();
    let mut out = Vec::with_capacity(5 * samples);
    for j in 0..samples {
        let x = if j + 1 == samples { x_r } else { x_l + (x_r - x_l) * j as f64 / (samples - 1) as f64 };
        let (uh, duh) = sol.evaluate(x)?;
        out.extend_from_slice(&[x, uh, exact.eval(x), duh, exact.deriv(x)?]);
    }
    Ok(out)
}

/// Hat function and enriched trial function of node `node`, rows `[x, hat, psi]`,
/// sampled over the node's support.
pub fn basis_samples(p: &ProblemSpec, n: usize, node: usize, samples: usize) -> Result<Vec<f64>> {
    let (x_l, x_r) = p.domain();
    let mesh = Mesh::uniform(x_l, x_r, n)?;
    if node == 0 || node >= n {
        return Err(FemError::NodeIndexOutOfRange { index: node, nodes: n + 1 });
    }
    let nodes = mesh.nodes();
    let (a, b) = (nodes[node - 1], nodes[node + 1]);
    let samples = samples.max(2);
    let mut out = Vec::with_capacity(3 * samples);
    for j in 0..samples {
        let x = a + (b - a) * j as f64 / (samples - 1) as f64;
        out.extend_from_slice(&[x, hat(&mesh, node, x)?.0, modified_trial(p, &mesh, node, x)?.0]);
    }
    Ok(out)
}

fn parse_method(tag: &str) -> Result<Method> {
    tag.parse()
}

fn js(e: FemError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn solution_curve(
    problem_name: &str,
    k1_pi: f64,
    k2_pi: f64,
    method: &str,
    n: usize,
    samples: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    let p = problem(problem_name, k1_pi, k2_pi).map_err(js)?;
    solution_samples(&p, parse_method(method).map_err(js)?, n, samples).map_err(js)
}

/// Refinement table as CSV, one row per level.
#[wasm_bindgen]
pub fn refinement_csv(
    problem_name: &str,
    k1_pi: f64,
    k2_pi: f64,
    method: &str,
    levels: Vec<u32>,
) -> std::result::Result<String, JsError> {
    let p = problem(problem_name, k1_pi, k2_pi).map_err(js)?;
    let levels: Vec<usize> = levels.into_iter().map(|n| n as usize).collect();
    let report =
        refinement_study(&p, parse_method(method).map_err(js)?, &levels, &StudyOptions::default()).map_err(js)?;
    Ok(report.to_csv())
}

#[wasm_bindgen]
pub fn trial_function(
    problem_name: &str,
    k1_pi: f64,
    k2_pi: f64,
    n: usize,
    node: usize,
    samples: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    let p = problem(problem_name, k1_pi, k2_pi).map_err(js)?;
    basis_samples(&p, n, node, samples).map_err(js)
}
