use crate::error::{Error, Result};

use super::{Minimizer, Objective, OptimizationResult};

/// Downhill simplex; a debugging stand-in for [`super::Cobyla`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iterations: usize,
    pub initial_step: f64,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { max_iterations: 1000, initial_step: 0.5, f_tol: 1e-8, x_tol: 1e-6 }
    }
}

impl Minimizer for NelderMead {
    fn minimize(&self, objective: &mut Objective<'_>, x0: &[f64]) -> Result<OptimizationResult> {
        let m = x0.len();
        let mut calls = 0usize;
        let mut eval = |x: &[f64], calls: &mut usize| -> Result<f64> {
            let v = objective(x)?;
            *calls += 1;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("objective returned {v} at {x:?}")));
            }
            Ok(v)
        };

        let mut pts = vec![x0.to_vec()];
        for j in 0..m {
            let mut x = x0.to_vec();
            x[j] += self.initial_step;
            pts.push(x);
        }
        let mut vals = Vec::with_capacity(m + 1);
        for p in &pts {
            vals.push(eval(p, &mut calls)?);
        }
        let setup = calls;
        let mut converged = m == 0;

        while !converged && calls - setup < self.max_iterations {
            let mut order: Vec<usize> = (0..=m).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();

            let spread = vals[m] - vals[0];
            let size = pts[1..]
                .iter()
                .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= self.f_tol && size <= self.x_tol {
                converged = true;
                break;
            }

            let centroid: Vec<f64> = (0..m).map(|i| pts[..m].iter().map(|p| p[i]).sum::<f64>() / m as f64).collect();
            let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[m]).map(|(c, w)| c + t * (c - w)).collect() };

            let xr = along(1.0);
            let fr = eval(&xr, &mut calls)?;
            if fr < vals[0] {
                let xe = along(2.0);
                let fe = eval(&xe, &mut calls)?;
                if fe < fr {
                    pts[m] = xe;
                    vals[m] = fe;
                } else {
                    pts[m] = xr;
                    vals[m] = fr;
                }
            } else if fr < vals[m - 1] {
                pts[m] = xr;
                vals[m] = fr;
            } else {
                let (xc, fc) = if fr < vals[m] {
                    let xc = along(0.5);
                    let fc = eval(&xc, &mut calls)?;
                    (xc, fc)
                } else {
                    let xc = along(-0.5);
                    let fc = eval(&xc, &mut calls)?;
                    (xc, fc)
                };
                if fc < vals[m].min(fr) {
                    pts[m] = xc;
                    vals[m] = fc;
                } else {
                    for j in 1..=m {
                        pts[j] = pts[j].iter().zip(&pts[0]).map(|(p, b)| b + 0.5 * (p - b)).collect();
                        vals[j] = eval(&pts[j].clone(), &mut calls)?;
                    }
                }
            }
        }

        let best = (0..=m).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        Ok(OptimizationResult {
            best_params: pts[best].clone(),
            best_value: vals[best],
            evaluations: calls - setup,
            function_calls: calls,
            converged,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_valley_floor() {
        let mut f = |x: &[f64]| -> Result<f64> { Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)) };
        let nm = NelderMead { max_iterations: 5000, ..NelderMead::default() };
        let r = nm.minimize(&mut f, &[-1.0, 1.0]).unwrap();
        assert!((r.best_params[0] - 1.0).abs() < 1e-3, "{r:?}");
        assert!(r.converged);
    }
}
