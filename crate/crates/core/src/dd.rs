//! Double description: extreme rays of a pointed polyhedral cone
//! `{y : A y >= 0}` where `A` has full column rank.
//!
//! Constraints are added one at a time. Rays are split by the sign of the
//! new constraint and every adjacent (positive, negative) pair spawns a ray
//! on the new hyperplane. Adjacency uses the combinatorial test: the common
//! zero set has at least `k - 2` members and no third ray shares it.


use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance for classifying a constraint value as zero; rows and rays are
/// kept at unit length.
pub const ZERO_TOL: f64 = 1e-9;

#[derive(Clone)]
struct Ray {
    v: Vec<f64>,
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bits_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn popcount(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

fn superset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == *y)
}

/// Pick `k` linearly independent rows greedily (Gram–Schmidt).
fn independent_rows(rows: &[Vec<f64>], k: usize) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut v = r.clone();
        for b in &basis {
            let c = linalg::dot(&v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let n = linalg::norm(&v);
        if n > 1e-8 {
            basis.push(linalg::scale(&v, 1.0 / n));
            chosen.push(i);
            if chosen.len() == k {
                break;
            }
        }
    }
    chosen
}

/// Extreme rays of `{y in R^k : a_i . y >= 0}`. Fails with a capacity
/// error once the working ray list grows beyond `cap`.
pub fn extreme_rays(constraints: &[Vec<f64>], k: usize, cap: usize) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let rows: Vec<Vec<f64>> = constraints.iter().map(|r| linalg::normalized(r)).collect();
    let m = rows.len();
    let words = m.div_ceil(64).max(1);
    let init = independent_rows(&rows, k);
    if init.len() < k {
        return Err(Error::Input(format!(
            "constraint matrix has rank {} < {k}",
            init.len()
        )));
    }
    let a_s = linalg::rows(k, &init.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>());
    let inv = a_s.try_inverse().ok_or_else(|| Error::Numeric {
        message: "singular initial constraint block".into(),
        residual: 0.0,
    })?;
    let mut processed = vec![false; m];
    for &i in &init {
        processed[i] = true;
    }
    let mut rays: Vec<Ray> = (0..k)
        .map(|j| {
            let v = linalg::normalized(&inv.column(j).iter().cloned().collect::<Vec<_>>());
            let mut zeros = vec![0u64; words];
            for &i in &init {
                if linalg::dot(&rows[i], &v).abs() <= ZERO_TOL {
                    bit_set(&mut zeros, i);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    let need = k.saturating_sub(2);
    for i in 0..m {
        if processed[i] {
            continue;
        }
        processed[i] = true;
        let vals: Vec<f64> = rays.iter().map(|r| linalg::dot(&rows[i], &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&r| vals[r] > ZERO_TOL).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&r| vals[r] < -ZERO_TOL).collect();
        if neg.is_empty() {
            for (r, val) in rays.iter_mut().zip(&vals) {
                if val.abs() <= ZERO_TOL {
                    bit_set(&mut r.zeros, i);
                }
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = bits_and(&rays[p].zeros, &rays[n].zeros);
                if popcount(&common) < need {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(r, ray)| r != p && r != n && superset(&ray.zeros, &common));
                if blocked {
                    continue;
                }
                let mut v: Vec<f64> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(xn, xp)| vals[p] * xn - vals[n] * xp)
                    .collect();
                v = linalg::normalized(&v);
                let mut zeros = common;
                bit_set(&mut zeros, i);
                next.push(Ray { v, zeros });
            }
        }
        for (r, ray) in rays.iter().enumerate() {
            if vals[r] >= -ZERO_TOL {
                let mut ray = ray.clone();
                if vals[r].abs() <= ZERO_TOL {
                    bit_set(&mut ray.zeros, i);
                }
                next.push(ray);
            }
        }
        if next.len() > cap {
            return Err(Error::Capacity {
                what: "double description rays".into(),
                requested: next.len(),
                cap,
            });
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut rays: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        for r in rays.iter_mut() {
            for x in r.iter_mut() {
                *x = (*x * 1e8).round() / 1e8;
            }
        }
        rays.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rays
    }

    #[test]
    fn positive_orthant() {
        let rows = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let rays = sorted(extreme_rays(&rows, 3, 64).unwrap());
        assert_eq!(rays.len(), 3);
    }

    #[test]
    fn square_pyramid_has_four_rays() {
        // x >= |y|, x >= |z|: rays (1, +-1, +-1).
        let rows = vec![
            vec![1.0, 1.0, 0.0],
            vec![1.0, -1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 0.0, -1.0],
        ];
        let rays = extreme_rays(&rows, 3, 64).unwrap();
        assert_eq!(rays.len(), 4);
        let s = 1.0 / 3f64.sqrt();
        for r in &rays {
            assert!((r[0] - s).abs() < 1e-12);
            assert!((r[1].abs() - s).abs() < 1e-12);
            assert!((r[2].abs() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_direction_drops_everything() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        assert!(extreme_rays(&rows, 2, 64).unwrap().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        // A cone over an octagon has 8 rays.
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|i| {
                let a = std::f64::consts::PI * 2.0 * i as f64 / 8.0;
                vec![1.0, a.cos(), a.sin()]
            })
            .collect();
        assert_eq!(extreme_rays(&rows, 3, 64).unwrap().len(), 8);
        assert!(matches!(
            extreme_rays(&rows, 3, 4),
            Err(Error::Capacity { .. })
        ));
    }
}
