//! Exact certificate for the small-`r` expansion of the asymptotic
//! Heintze-Karcher ratio
//! `int_{dX_r} V/H dS / ((n+1)/n int_{X_r} V dV) = 1 + beta r^4 + O(r^5)`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::jet::Jet;
use super::poly::{int, rat, rational_string, Monomial, Poly, Symbol};
use super::{boundary_integral, expand_normal_form, normal_form_from_traces, v4_coefficient, IntegralClass};
use crate::error::{Error, Result};

/// One exact equality; `lhs`/`rhs` are rendered rationals or polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

impl ExactCheck {
    fn rational(name: &str, lhs: &BigRational, rhs: &BigRational) -> Self {
        Self {
            name: name.to_string(),
            lhs: rational_string(lhs),
            rhs: rational_string(rhs),
            pass: lhs == rhs,
        }
    }

    fn poly(name: &str, lhs: &Poly, rhs: &Poly) -> Self {
        Self {
            name: name.to_string(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            pass: lhs == rhs,
        }
    }

    fn jet(name: &str, lhs: &Jet, rhs: &Jet) -> Self {
        Self {
            name: name.to_string(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            pass: lhs == rhs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Prop21Certificate {
    pub n: u32,
    /// `r^4` coefficient of `n r V / H_r`.
    pub alpha: Poly,
    pub alpha1: IntegralClass,
    pub alpha2: IntegralClass,
    pub beta1: IntegralClass,
    pub beta2: IntegralClass,
    /// `alpha2 - beta2`; divided by `Vol` this is the `r^4` deviation.
    pub beta: IntegralClass,
    pub checks: Vec<ExactCheck>,
}

impl Prop21Certificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ExactCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Coefficient of `int |E|^2 / Vol` in the deviation.
    pub fn beta_e2_coefficient(&self) -> BigRational {
        self.beta.int_e2()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": "prop21",
            "n": self.n,
            "alpha": self.alpha.to_string_map(),
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "beta_times_vol": self.beta,
            "beta_e2_coefficient": rational_string(&self.beta_e2_coefficient()),
            "checks": self.checks,
            "verdict": if self.passed() { "equality" } else { "fail" },
        })
    }
}

/// Rebuild the expansion chain from the normal-form jets and certify every
/// stated coefficient by exact rational comparison.
pub fn verify_prop21(n: u32) -> Result<Prop21Certificate> {
    if n < 5 {
        return Err(Error::Domain(format!("verify_prop21 requires n >= 5, got {n}")));
    }
    let ni = i64::from(n);
    let jets = expand_normal_form(n)?;
    let mut checks = Vec::new();

    let (det_traces, h_traces) = normal_form_from_traces(n)?;
    checks.push(ExactCheck::jet("det_jet_trace_route", &det_traces, &jets.det_jet));
    checks.push(ExactCheck::jet("h_jet_trace_route", &h_traces, &jets.h_jet));

    // n r V / H_r = (r V) (H_r / n)^{-1}
    let h_over_n = jets.h_jet.scale(&rat(1, ni));
    let v_over_h = jets.v_jet.mul(&h_over_n.invert()?);
    let j = Poly::symbol(Symbol::J);
    let j2 = Poly::term(Monomial::pow(Symbol::J, 2), int(1));
    let a2 = Poly::symbol(Symbol::A2);

    checks.push(ExactCheck::poly(
        "v_over_h_r2",
        &v_over_h.coeff(2),
        &j.scale(&rat(-1, 2 * ni)),
    ));
    let alpha = v_over_h.coeff(4);
    let alpha_stated = &(&v4_coefficient(n) - &a2.scale(&rat(1, 2 * ni))) + &j2.scale(&rat(1, 2 * ni * ni));
    checks.push(ExactCheck::poly("alpha", &alpha, &alpha_stated));

    // Surface integral: r^{-n-1}/n * int (n r V/H) sqrt(det) dS.
    let surface = v_over_h.mul(&jets.det_jet);
    let alpha1 = boundary_integral(&surface.coeff(2), n)?;
    let alpha2 = boundary_integral(&surface.coeff(4), n)?;
    let alpha2_stated_density = &(&alpha + &(&j2 - &a2).scale(&rat(1, 8))) + &j2.scale(&rat(1, 4 * ni));
    checks.push(ExactCheck::poly(
        "alpha2_density",
        &surface.coeff(4),
        &alpha2_stated_density,
    ));

    // Volume integral: int_r t^{-n-2+2j} dt = r^{-n-1+2j}/(n+1-2j) + const,
    // written as r^{-n-1}/(n+1) * sum (n+1)/(n+1-2j) P_j r^{2j}.
    let volume = jets.v_jet.mul(&jets.det_jet);
    let weight = |jdx: i64| rat(ni + 1, ni + 1 - 2 * jdx);
    let beta1 = boundary_integral(&volume.coeff(2), n)?.scale(&weight(1));
    let beta2 = boundary_integral(&volume.coeff(4), n)?.scale(&weight(2));
    checks.push(ExactCheck::rational(
        "volume_r0",
        &volume.coeff(0).as_constant().unwrap_or_else(BigRational::zero),
        &int(1),
    ));

    let first_order = rat(-(ni + 1), 2 * ni);
    checks.push(ExactCheck::rational(
        "alpha1_int_j",
        &alpha1.int_j(),
        &first_order,
    ));
    checks.push(ExactCheck::rational("beta1_int_j", &beta1.int_j(), &first_order));
    checks.push(ExactCheck {
        name: "alpha1_eq_beta1".into(),
        lhs: format!("{:?}", alpha1.to_string_map()),
        rhs: format!("{:?}", beta1.to_string_map()),
        pass: alpha1 == beta1,
    });

    let beta = alpha2.sub(&beta2);
    let expected_e2 = rat(1, ni * (ni - 2).pow(3));
    checks.push(ExactCheck::rational("beta_int_e2", &beta.int_e2(), &expected_e2));
    checks.push(ExactCheck::rational("beta_int_j2", &beta.int_j2(), &int(0)));
    checks.push(ExactCheck::rational("beta_vol", &beta.vol(), &int(0)));
    checks.push(ExactCheck {
        name: "beta_only_e2".into(),
        lhs: format!("{:?}", beta.to_string_map()),
        rhs: format!("{{\"int(E2)\": \"{}\"}}", rational_string(&expected_e2)),
        pass: beta.to_string_map().len() == 1,
    });

    Ok(Prop21Certificate {
        n,
        alpha,
        alpha1,
        alpha2,
        beta1,
        beta2,
        beta,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct closed form of `alpha2 - beta2` per channel after
    /// `int Lap J = 0` and `|A|^2 = E2/(n-2)^2 + J^2/n`; written out by hand,
    /// independent of the jet pipeline.
    fn hand_beta(n: i64) -> (BigRational, BigRational) {
        let nr = int(n);
        let one = int(1);
        // v4 -> (-J^2 + n A2) / (8 n (n-2))
        let v4_j2 = -&one / (int(8) * &nr * int(n - 2));
        let v4_a2 = &nr / (int(8) * &nr * int(n - 2));
        // alpha2 density = v4 - A2/(2n) + J^2/(2n^2) + (J^2 - A2)/8 + J^2/(4n)
        let a_j2 = &v4_j2 + &one / (int(2) * &nr * &nr) + rat(1, 8) + &one / (int(4) * &nr);
        let a_a2 = &v4_a2 - &one / (int(2) * &nr) - rat(1, 8);
        // beta2 density = (n+1)/(n-3) (v4 + (J^2 - A2)/8 - J^2/(4n))
        let w = rat(n + 1, n - 3);
        let b_j2 = &w * (&v4_j2 + rat(1, 8) - &one / (int(4) * &nr));
        let b_a2 = &w * (&v4_a2 - rat(1, 8));
        let d_j2 = a_j2 - b_j2;
        let d_a2 = a_a2 - b_a2;
        let e2 = &d_a2 / int((n - 2) * (n - 2));
        let j2 = &d_j2 + &d_a2 / &nr;
        (e2, j2)
    }

    #[test]
    fn certificate_passes_for_n_5_to_12() {
        for n in 5..=12 {
            let cert = verify_prop21(n).unwrap();
            let failures: Vec<_> = cert.failures().collect();
            assert!(failures.is_empty(), "n = {n}: {failures:?}");
            let (e2, j2) = hand_beta(i64::from(n));
            assert_eq!(cert.beta.int_e2(), e2);
            assert!(j2.is_zero());
            assert!(cert.beta.int_j2().is_zero());
        }
    }

    #[test]
    fn frozen_beta_values() {
        assert_eq!(verify_prop21(5).unwrap().beta_e2_coefficient(), rat(1, 135));
        assert_eq!(verify_prop21(6).unwrap().beta_e2_coefficient(), rat(1, 384));
    }

    #[test]
    fn einstein_boundary_has_zero_beta() {
        let cert = verify_prop21(8).unwrap();
        let pointwise = cert.beta_e2_coefficient() * int(0);
        assert!(pointwise.is_zero());
        // every other channel is exactly zero, so E2 = 0 forces beta = 0
        assert_eq!(cert.beta.to_string_map().len(), 1);
    }

    #[test]
    fn json_uses_rational_strings() {
        let v = verify_prop21(5).unwrap().to_json();
        assert_eq!(v["beta_e2_coefficient"], "1/135");
        assert_eq!(v["beta_times_vol"]["int(E2)"], "1/135");
        assert_eq!(v["verdict"], "equality");
    }

    #[test]
    fn small_n_rejected() {
        assert!(verify_prop21(4).is_err());
    }
}
