//! Powell's COBYLA without constraints.
//!
//! The method keeps a simplex of `m + 1` points around the best point found so far
//! (the pole), fits the linear interpolant of the objective on it and steps to the
//! edge of a trust region of radius `ρ` along the model's descent direction. When a
//! step fails to reduce the objective enough, either the simplex geometry is repaired
//! or `ρ` is halved, until `ρ` reaches `rho_end`.

use crate::error::{Error, Result};

use super::{Minimizer, Objective, OptimizationResult};

/// Distance of a vertex from the opposite face must stay above `ALPHA·ρ`.
const ALPHA: f64 = 0.25;
/// Edge lengths must stay below `BETA·ρ`.
const BETA: f64 = 2.1;
/// Length of a geometry-repair step, relative to `ρ`.
const GAMMA: f64 = 0.5;
/// Edge-length threshold used when choosing which vertex a trust-region step replaces.
const DELTA: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cobyla {
    /// Cap on objective evaluations after the initial simplex.
    pub max_iterations: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
}

impl Default for Cobyla {
    fn default() -> Self {
        Cobyla { max_iterations: 1000, rho_begin: 1.0, rho_end: 1e-4 }
    }
}

impl Cobyla {
    pub fn new(max_iterations: usize, rho_begin: f64, rho_end: f64) -> Result<Self> {
        if max_iterations == 0 {
            return Err(Error::Config("COBYLA needs max_iterations ≥ 1".into()));
        }
        if !(rho_begin > rho_end && rho_end > 0.0) {
            return Err(Error::Config(format!(
                "COBYLA needs rho_begin > rho_end > 0, got {rho_begin} and {rho_end}"
            )));
        }
        Ok(Cobyla { max_iterations, rho_begin, rho_end })
    }
}

/// Convenience wrapper over [`Cobyla`].
pub fn cobyla_minimize(
    objective: &mut Objective<'_>,
    x0: &[f64],
    max_iterations: usize,
    rho_begin: f64,
    rho_end: f64,
) -> Result<OptimizationResult> {
    Cobyla::new(max_iterations, rho_begin, rho_end)?.minimize(objective, x0)
}

struct Tracker<'a, 'f> {
    objective: &'a mut Objective<'f>,
    calls: usize,
}

impl Tracker<'_, '_> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let v = (self.objective)(x)?;
        self.calls += 1;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("objective returned {v} at {x:?}")));
        }
        Ok(v)
    }
}

/// Inverse of a square matrix given by rows, or `None` when (numerically) singular.
fn invert(rows: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    let scale = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        a.swap(col, pivot);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let factor = a[r][col];
                if factor != 0.0 {
                    for c in col..2 * n {
                        a[r][c] -= factor * a[col][c];
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Simplex {
    pole: Vec<f64>,
    f_pole: f64,
    vertices: Vec<Vec<f64>>,
    f_vertices: Vec<f64>,
}

struct Geometry {
    /// Rows: `vertex_j − pole`.
    edges: Vec<Vec<f64>>,
    /// Columns `c_j` satisfy `edge_i · c_j = δ_ij`; stored as rows of the transpose.
    dual: Vec<Vec<f64>>,
    gradient: Vec<f64>,
    /// Distance of each vertex from the face spanned by the others.
    sigma: Vec<f64>,
    /// Edge lengths.
    eta: Vec<f64>,
}

impl Simplex {
    /// Makes the best vertex the pole.
    fn promote_best(&mut self) {
        let best = (0..self.vertices.len())
            .filter(|&j| self.f_vertices[j] < self.f_pole)
            .min_by(|&a, &b| self.f_vertices[a].total_cmp(&self.f_vertices[b]));
        if let Some(j) = best {
            std::mem::swap(&mut self.pole, &mut self.vertices[j]);
            std::mem::swap(&mut self.f_pole, &mut self.f_vertices[j]);
        }
    }

    fn geometry(&self) -> Option<Geometry> {
        let m = self.pole.len();
        let edges: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(&self.pole).map(|(a, b)| a - b).collect())
            .collect();
        let inv = invert(&edges)?;
        // column j of the inverse
        let dual: Vec<Vec<f64>> = (0..m).map(|j| (0..m).map(|i| inv[i][j]).collect()).collect();
        let df: Vec<f64> = self.f_vertices.iter().map(|f| f - self.f_pole).collect();
        let gradient: Vec<f64> = (0..m).map(|i| dot(&inv[i], &df)).collect();
        let sigma = dual.iter().map(|c| 1.0 / norm(c)).collect();
        let eta = edges.iter().map(|e| norm(e)).collect();
        Some(Geometry { edges, dual, gradient, sigma, eta })
    }
}

impl Minimizer for Cobyla {
    fn minimize(&self, objective: &mut Objective<'_>, x0: &[f64]) -> Result<OptimizationResult> {
        let m = x0.len();
        let mut t = Tracker { objective, calls: 0 };
        let f0 = t.eval(x0)?;
        if m == 0 {
            return Ok(OptimizationResult {
                best_params: Vec::new(),
                best_value: f0,
                evaluations: 0,
                function_calls: 1,
                converged: true,
            });
        }

        let mut rho = self.rho_begin;
        let mut simplex = Simplex { pole: x0.to_vec(), f_pole: f0, vertices: Vec::new(), f_vertices: Vec::new() };
        for j in 0..m {
            let mut x = x0.to_vec();
            x[j] += rho;
            let f = t.eval(&x)?;
            simplex.vertices.push(x);
            simplex.f_vertices.push(f);
        }
        let setup_calls = t.calls;
        let budget_left = |t: &Tracker| t.calls - setup_calls < self.max_iterations;

        // Geometry repairs are only considered after a failed trust-region step.
        let mut trust_mode = false;
        let mut converged = false;

        loop {
            simplex.promote_best();
            let Some(geo) = simplex.geometry() else {
                // Degenerate simplex: rebuild it around the pole at the current radius.
                if t.calls - setup_calls + m > self.max_iterations {
                    break;
                }
                for j in 0..m {
                    let mut x = simplex.pole.clone();
                    x[j] += rho;
                    simplex.f_vertices[j] = t.eval(&x)?;
                    simplex.vertices[j] = x;
                }
                trust_mode = false;
                continue;
            };
            let acceptable = geo.sigma.iter().all(|&s| s >= ALPHA * rho)
                && geo.eta.iter().all(|&e| e <= BETA * rho);

            if !trust_mode && !acceptable {
                if !budget_left(&t) {
                    break;
                }
                let worst_edge = (0..m).max_by(|&a, &b| geo.eta[a].total_cmp(&geo.eta[b])).unwrap();
                let drop = if geo.eta[worst_edge] > BETA * rho {
                    worst_edge
                } else {
                    (0..m).min_by(|&a, &b| geo.sigma[a].total_cmp(&geo.sigma[b])).unwrap()
                };
                let scale = GAMMA * rho * geo.sigma[drop];
                let mut dx: Vec<f64> = geo.dual[drop].iter().map(|c| scale * c).collect();
                if dot(&geo.gradient, &dx) > 0.0 {
                    dx.iter_mut().for_each(|v| *v = -*v);
                }
                let x: Vec<f64> = simplex.pole.iter().zip(&dx).map(|(a, b)| a + b).collect();
                simplex.f_vertices[drop] = t.eval(&x)?;
                simplex.vertices[drop] = x;
                continue;
            }
            trust_mode = true;

            let gnorm = norm(&geo.gradient);
            let mut poor_step = true;
            if gnorm > 0.0 {
                if !budget_left(&t) {
                    break;
                }
                let dx: Vec<f64> = geo.gradient.iter().map(|g| -rho * g / gnorm).collect();
                let x: Vec<f64> = simplex.pole.iter().zip(&dx).map(|(a, b)| a + b).collect();
                let f = t.eval(&x)?;
                let predicted = rho * gnorm;
                let reduction = simplex.f_pole - f;

                // Vertex to replace: the one whose opposite face the step crosses most,
                // overridden by a far-away vertex when one exists.
                let mut drop = None;
                let mut best = if reduction <= 0.0 { 1.0 } else { 0.0 };
                let mut sigbar = vec![0.0; m];
                for j in 0..m {
                    let w = dot(&geo.dual[j], &dx).abs();
                    if w > best {
                        drop = Some(j);
                        best = w;
                    }
                    sigbar[j] = w * geo.sigma[j];
                }
                let mut edge_max = DELTA * rho;
                for j in 0..m {
                    if sigbar[j] >= ALPHA * rho || sigbar[j] >= geo.sigma[j] {
                        let len = if reduction > 0.0 {
                            norm(&dx.iter().zip(&geo.edges[j]).map(|(a, b)| a - b).collect::<Vec<_>>())
                        } else {
                            geo.eta[j]
                        };
                        if len > edge_max {
                            drop = Some(j);
                            edge_max = len;
                        }
                    }
                }
                if let Some(j) = drop {
                    simplex.vertices[j] = x;
                    simplex.f_vertices[j] = f;
                }
                poor_step = !(reduction > 0.0 && reduction >= 0.1 * predicted);
                if drop.is_some() && !poor_step {
                    continue;
                }
            }
            if poor_step && !acceptable {
                trust_mode = false;
                continue;
            }
            if rho <= self.rho_end {
                converged = true;
                break;
            }
            rho *= 0.5;
            if rho <= 1.5 * self.rho_end {
                rho = self.rho_end;
            }
        }

        simplex.promote_best();
        Ok(OptimizationResult {
            best_params: simplex.pole,
            best_value: simplex.f_pole,
            evaluations: t.calls - setup_calls,
            function_calls: t.calls,
            converged,
        })
    }
}
