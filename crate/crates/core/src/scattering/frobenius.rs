//! Boundary Frobenius branches `r^mu (1 + a_2 r^2 + a_4 r^4 + ...)`.
//!
//! In `r` the radial equation reads
//! `theta^2 u - n (1+x)/(1-x) theta u + s(n-s) u = 0`, `theta = r d/dr`,
//! `x = k r^2/4`. Expanding `(1+x)/(1-x) = 1 + 2 sum_{i>=1} x^i` gives
//! `P(mu+2j) a_{2j} = (n k / 2) sum_{l<j} (k/4)^{j-1-l} (mu+2l) a_{2l}`
//! with `P(m) = (m - s)(m - (n - s))`. The series converges for `x < 1`,
//! i.e. on the whole filling.

use num_traits::{FromPrimitive, Num, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special_fn::QCurvParams;

/// Largest supported power `2J` of a branch.
pub const MAX_SERIES_ORDER: usize = 24;

/// Coefficients `a_0 = 1, a_2, ..., a_order` (even powers only, stored densely
/// by `j`). Works over any field with exact or floating arithmetic.
pub fn frobenius_coefficients<T>(n: &T, s: &T, k: &T, mu: &T, order: usize) -> Result<Vec<T>>
where
    T: Num + Clone + FromPrimitive + ToPrimitive,
{
    if !order.is_multiple_of(2) || order > MAX_SERIES_ORDER {
        return Err(Error::Series(format!(
            "series order {order} must be even and at most {MAX_SERIES_ORDER}"
        )));
    }
    let c = |v: i64| T::from_i64(v).expect("small integer");
    let lambda = s.clone() * (n.clone() - s.clone());
    let quarter_k = k.clone() / c(4);
    let half_nk = n.clone() * k.clone() / c(2);
    let mut a = vec![T::one()];
    // acc_j = sum_{l<j} (k/4)^{j-1-l} (mu+2l) a_l, updated as
    // acc_{j+1} = (k/4) acc_j + (mu+2j) a_j.
    let mut acc = T::zero();
    for j in 1..=order / 2 {
        let prev = mu.clone() + c(2 * (j as i64 - 1));
        acc = quarter_k.clone() * acc + prev * a[j - 1].clone();
        let m = mu.clone() + c(2 * j as i64);
        let indicial = m.clone() * m.clone() - n.clone() * m.clone() + lambda.clone();
        if indicial.is_zero() {
            return Err(Error::Resonance {
                exponent: m.to_f64().unwrap_or(f64::NAN),
                step: j,
            });
        }
        a.push(half_nk.clone() * acc.clone() / indicial);
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrobeniusBranch {
    pub n: u32,
    pub lambda: f64,
    pub k: f64,
    pub mu: f64,
    /// `coeffs[j]` multiplies `r^{mu + 2j}`.
    pub coeffs: Vec<f64>,
}

impl FrobeniusBranch {
    pub fn order(&self) -> usize {
        2 * (self.coeffs.len() - 1)
    }

    /// `sum_j a_j (2j)^q r^{2j}` for `q = 0..=3`, i.e. `theta^q` of the
    /// series part without the `r^mu` prefactor.
    pub fn theta_moments(&self, r: f64) -> [f64; 4] {
        let r2 = r * r;
        let mut out = [0.0; 4];
        let mut pw = 1.0;
        for (j, a) in self.coeffs.iter().enumerate() {
            let e = 2.0 * j as f64;
            let t = a * pw;
            out[0] += t;
            out[1] += t * e;
            out[2] += t * e * e;
            out[3] += t * e * e * e;
            pw *= r2;
        }
        out
    }

    pub fn value(&self, r: f64) -> f64 {
        r.powf(self.mu) * self.theta_moments(r)[0]
    }

    /// `theta U / U = mu + (sum 2j a_j r^{2j}) / (sum a_j r^{2j})`.
    pub fn log_theta(&self, r: f64) -> f64 {
        let m = self.theta_moments(r);
        self.mu + m[1] / m[0]
    }

    /// Magnitude of the last retained term relative to the sum.
    pub fn truncation_estimate(&self, r: f64) -> f64 {
        let j = self.coeffs.len() - 1;
        let last = self.coeffs[j].abs() * r.powi(2 * j as i32);
        last / self.theta_moments(r)[0].abs()
    }

    /// Largest relative residual of the recursion when the coefficients are
    /// substituted back.
    pub fn recursion_residual(&self) -> f64 {
        let nf = f64::from(self.n);
        let mut worst: f64 = 0.0;
        for j in 1..self.coeffs.len() {
            let m = self.mu + 2.0 * j as f64;
            let lhs = (m * m - nf * m + self.lambda) * self.coeffs[j];
            let mut rhs = 0.0;
            let mut scale = lhs.abs();
            for l in 0..j {
                let term = 0.5
                    * nf
                    * self.k
                    * (0.25 * self.k).powi((j - 1 - l) as i32)
                    * (self.mu + 2.0 * l as f64)
                    * self.coeffs[l];
                rhs += term;
                scale = scale.max(term.abs());
            }
            if scale > 0.0 {
                worst = worst.max((lhs - rhs).abs() / scale);
            }
        }
        worst
    }
}

/// Branch with leading exponent `mu` for the scattering problem `p`.
pub fn frobenius_branch(p: &QCurvParams, mu: f64, order: usize) -> Result<FrobeniusBranch> {
    let s = p.s();
    let nf = p.nf();
    let tol = 1e-12;
    if (mu - s).abs() > tol && (mu - (nf - s)).abs() > tol {
        return Err(Error::Domain(format!(
            "frobenius_branch: mu = {mu} is not an indicial root ({}, {s})",
            nf - s
        )));
    }
    branch_raw(p.n, s, p.k, mu, order)
}

/// Same recursion without the `gamma` range restriction; used for the Lee
/// potential (`s = n + 1`).
pub fn branch_raw(n: u32, s: f64, k: f64, mu: f64, order: usize) -> Result<FrobeniusBranch> {
    let nf = f64::from(n);
    let coeffs = frobenius_coefficients(&nf, &s, &k, &mu, order)?;
    Ok(FrobeniusBranch {
        n,
        lambda: s * (nf - s),
        k,
        mu,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet_algebra::rat;
    use approx::assert_relative_eq;
    use num_rational::BigRational;

    #[test]
    fn u2_matches_closed_form() {
        let p = QCurvParams::new(4, 0.5, 1.0).unwrap();
        let b = frobenius_branch(&p, p.dirichlet_exponent(), 8).unwrap();
        assert_relative_eq!(b.coeffs[1], 1.5, max_relative = 1e-15);
        assert!(b.recursion_residual() < 1e-13);
    }

    #[test]
    fn u2_exact_rational() {
        // n = 5, gamma = 1/3, k = 3/2
        let (n, g, k) = (rat(5, 1), rat(1, 3), rat(3, 2));
        let s = &n / rat(2, 1) + &g;
        let mu = &n - &s;
        let a: Vec<BigRational> = frobenius_coefficients(&n, &s, &k, &mu, 4).unwrap();
        let j_hat = &n * &k / rat(2, 1);
        let expect = (&n - rat(2, 1) * &g) * j_hat / (rat(8, 1) * (rat(1, 1) - g));
        assert_eq!(a[1], expect);
    }

    #[test]
    fn flat_warp_gives_pure_power() {
        let a = frobenius_coefficients(&4.0, &2.5, &0.0, &1.5, 12).unwrap();
        assert_eq!(a[0], 1.0);
        assert!(a[1..].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn lee_branch_is_exact() {
        let b = branch_raw(5, 6.0, 1.0, -1.0, 4).unwrap();
        assert_relative_eq!(b.coeffs[1], 0.25, max_relative = 1e-15);
        assert_eq!(b.coeffs[2], 0.0);
        // r V = 1 + k r^2 / 4 to all orders for odd n
        let b = branch_raw(7, 8.0, 2.0, -1.0, 24).unwrap();
        assert!(b.coeffs[2..].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn lee_resonance_for_even_n() {
        // 2j = n + 2 = 6
        let err = branch_raw(4, 5.0, 1.0, -1.0, 8).unwrap_err();
        assert!(matches!(err, Error::Resonance { step: 3, .. }));
        assert!(branch_raw(4, 5.0, 1.0, -1.0, 4).is_ok());
    }

    #[test]
    fn non_root_exponent_rejected() {
        let p = QCurvParams::new(4, 0.5, 1.0).unwrap();
        assert!(frobenius_branch(&p, 0.3, 8).is_err());
        assert!(frobenius_branch(&p, p.s(), 26).is_err());
        assert!(frobenius_branch(&p, p.s(), 7).is_err());
    }

    #[test]
    fn branch_solves_ode_pointwise() {
        let p = QCurvParams::new(6, 0.3, 2.0).unwrap();
        for mu in [p.dirichlet_exponent(), p.s()] {
            let b = frobenius_branch(&p, mu, 24).unwrap();
            let r = 0.1;
            let m = b.theta_moments(r);
            let x = 0.25 * p.k * r * r;
            // theta^q (r^mu S) = r^mu sum (mu + 2j)^q a_j r^{2j}
            let t1 = mu * m[0] + m[1];
            let t2 = mu * mu * m[0] + 2.0 * mu * m[1] + m[2];
            let res = t2 - 6.0 * (1.0 + x) / (1.0 - x) * t1 + p.spectral() * m[0];
            assert!(res.abs() < 1e-13 * t2.abs().max(1.0), "res = {res}");
        }
    }
}
