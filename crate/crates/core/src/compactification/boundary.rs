//! Boundary limits by generalized Richardson extrapolation.
//!
//! Quantities built from `rho_s` behave like `F(r) = F_0 + sum_j c_j r^{e_j}`
//! with exponents `e = 2 gamma a + 2 b` (`a >= -1`, `b >= 0`): the branch ratio
//! contributes `r^{2 gamma}`, the normal-form warp `r^2`, and dividing by
//! `rho^{2 gamma}` shifts by `-2 gamma`. Sampling geometrically in
//! `z = r^{e_1}` (halving `z` per level) keeps the fit well conditioned.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolation {
    pub value: f64,
    /// Change against the fit with one level fewer.
    pub error: f64,
    pub exponents: Vec<f64>,
    pub r_min: f64,
}

/// First `count` distinct positive exponents `2 gamma a + 2 b`, `a >= -1`, `b >= 0`.
pub fn correction_exponents(gamma: f64, count: usize) -> Vec<f64> {
    let g2 = 2.0 * gamma;
    let mut out = Vec::new();
    for b in 0..=count as i64 {
        for a in -1..=(count as i64 * 4) {
            let e = g2 * a as f64 + 2.0 * b as f64;
            if e > 1e-9 {
                out.push(e);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    out.truncate(count);
    out
}

/// Fit `F(r_i)` at `r_i = r0 2^{-i/e_1}` with `exponents.len() + 1` points
/// and return the constant term.
pub fn richardson(f: impl Fn(f64) -> Result<f64>, r0: f64, exponents: &[f64]) -> Result<Extrapolation> {
    if exponents.is_empty() || !(r0 > 0.0) {
        return Err(Error::Domain("richardson needs exponents and r0 > 0".into()));
    }
    let e1 = exponents[0];
    let levels = exponents.len() + 1;
    let rs: Vec<f64> = (0..levels).map(|i| r0 * 2f64.powf(-(i as f64) / e1)).collect();
    let vals = rs.iter().map(|r| f(*r)).collect::<Result<Vec<f64>>>()?;
    let full = fit(&rs, &vals, r0, exponents)?;
    let reduced = fit(&rs[1..], &vals[1..], r0, &exponents[..exponents.len() - 1])?;
    Ok(Extrapolation {
        value: full,
        error: (full - reduced).abs(),
        exponents: exponents.to_vec(),
        r_min: *rs.last().expect("non-empty"),
    })
}

fn fit(rs: &[f64], vals: &[f64], r0: f64, exponents: &[f64]) -> Result<f64> {
    let m = exponents.len() + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for i in 0..m {
        a[i][0] = 1.0;
        for (j, e) in exponents.iter().enumerate() {
            a[i][j + 1] = (rs[i] / r0).powf(*e);
        }
        a[i][m] = vals[i];
    }
    let x = solve(a)?;
    Ok(x[0])
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::Consistency("singular extrapolation system".into()));
        }
        a.swap(col, piv);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot = &top[col];
        for row in rest.iter_mut() {
            let factor = row[col] / pivot[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x -= factor * p;
            }
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = a[row][m];
        for c in row + 1..m {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_sets() {
        assert_eq!(correction_exponents(0.5, 4), vec![1.0, 2.0, 3.0, 4.0]);
        let e = correction_exponents(0.25, 4);
        assert!((e[0] - 0.5).abs() < 1e-12 && (e[3] - 2.0).abs() < 1e-12);
        // leading correction for gamma > 1/2 is 2 - 2 gamma
        let e = correction_exponents(0.75, 2);
        assert!((e[0] - 0.5).abs() < 1e-12);
        assert!((e[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn recovers_constant_term() {
        let g = 0.3;
        let f = |r: f64| Ok(2.5 + 0.7 * r.powf(0.6) - 1.1 * r.powf(1.2) + 0.4 * r.powf(1.4) + r * r);
        let ex = richardson(f, 0.05, &correction_exponents(g, 6)).unwrap();
        assert!((ex.value - 2.5).abs() < 1e-10, "{ex:?}");
    }
}
