//! Nonnegative least squares (Lawson–Hanson active set).
//!
//! Solves `min ||A x - b||` subject to `x >= 0`. Used as the membership
//! oracle for finitely generated cones: `b` lies in `cone(columns of A)`
//! exactly when the optimal residual is zero.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub coeffs: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[usize]) -> Vec<f64> {
    let sub = a.select_columns(passive);
    let svd = sub.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = 1e-13 * smax.max(f64::MIN_POSITIVE);
    match svd.solve(b, eps) {
        Ok(s) => s.as_slice().to_vec(),
        Err(_) => vec![0.0; passive.len()],
    }
}

pub fn nnls(a: &DMatrix<f64>, b: &[f64]) -> Result<NnlsSolution> {
    let (m, n) = a.shape();
    Error::check_len(m, b.len())?;
    let bv = DVector::from_column_slice(b);
    let bnorm = bv.norm();
    if n == 0 || bnorm == 0.0 {
        return Ok(NnlsSolution {
            coeffs: vec![0.0; n],
            residual: bnorm,
            iterations: 0,
        });
    }
    let anorm = a.norm();
    let w_tol = 1e-13 * anorm * bnorm.max(1.0) * (m.max(n) as f64);
    let max_iter = 3 * n + 50;

    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    // Indices briefly barred from re-entry after failing to make progress.
    let mut barred = vec![false; n];
    let mut iterations = 0;

    loop {
        let resid = &bv - a * &x;
        let w = a.transpose() * &resid;
        let pick = (0..n)
            .filter(|&j| !passive[j] && !barred[j] && w[j] > w_tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = pick else { break };
        iterations += 1;
        if iterations > max_iter {
            return Err(Error::Numeric {
                message: "nnls did not converge".into(),
                residual: resid.norm(),
            });
        }
        passive[t] = true;
        let mut first = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let s_p = solve_passive(a, &bv, &idx);
            let mut s = DVector::<f64>::zeros(n);
            for (k, &j) in idx.iter().enumerate() {
                s[j] = s_p[k];
            }
            if idx.iter().all(|&j| s[j] > 0.0) {
                x = s;
                barred.iter_mut().for_each(|b| *b = false);
                break;
            }
            if first && s[t] <= 0.0 {
                // Rounding made the entering column useless.
                passive[t] = false;
                barred[t] = true;
                break;
            }
            first = false;
            let mut alpha = f64::INFINITY;
            for &j in &idx {
                if s[j] <= 0.0 {
                    let d = x[j] - s[j];
                    if d > 0.0 {
                        alpha = alpha.min(x[j] / d);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            x = &x + (&s - &x) * alpha;
            for &j in &idx {
                if x[j] <= 1e-15 * (1.0 + s[j].abs()) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
            iterations += 1;
            if iterations > max_iter {
                return Err(Error::Numeric {
                    message: "nnls inner loop did not converge".into(),
                    residual: (&bv - a * &x).norm(),
                });
            }
        }
    }
    let residual = (&bv - a * &x).norm();
    Ok(NnlsSolution {
        coeffs: x.as_slice().to_vec(),
        residual,
        iterations,
    })
}
