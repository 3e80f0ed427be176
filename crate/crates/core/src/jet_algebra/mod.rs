//! Exact-rational series algebra over formal boundary curvature scalars.
//!
//! Everything here is a function of a concrete boundary dimension `n`; no
//! floating point is involved.

mod jet;
mod poly;
mod prop21;
mod trace_words;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

pub use jet::{jet_combine, Jet, JetOp, MAX_ORDER};
pub use poly::{int, rat, rational_string, Monomial, Poly, Symbol};
pub use prop21::{verify_prop21, ExactCheck, Prop21Certificate};
pub use trace_words::MatSeries;

use crate::error::{Error, Result};

/// Jets of the normal-form expansion near the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormJets {
    /// `sqrt(det g_r / det g_0)`.
    pub det_jet: Jet,
    /// Mean curvature of the level set `{r}` for `g_+`.
    pub h_jet: Jet,
    /// `r V` for the Lee potential `V`.
    pub v_jet: Jet,
}

fn sym(s: Symbol) -> Poly {
    Poly::symbol(s)
}

fn j2() -> Poly {
    Poly::term(Monomial::pow(Symbol::J, 2), int(1))
}

/// Coefficient `v_4` of the Lee potential, `(Lap J - J^2 + n |A|^2) / (8 n (n - 2))`.
pub fn v4_coefficient(n: u32) -> Poly {
    let n = i64::from(n);
    let inner = &(&sym(Symbol::LapJ) - &j2()) + &sym(Symbol::A2).scale(&int(n));
    inner.scale(&rat(1, 8 * n * (n - 2)))
}

pub(crate) fn normal_form_jets(n: u32) -> Result<NormalFormJets> {
    if n < 3 {
        return Err(Error::Domain(format!("normal form needs n >= 3, got {n}")));
    }
    let ni = i64::from(n);
    let j = sym(Symbol::J);
    let a2 = sym(Symbol::A2);

    let det4 = (&j2() - &a2).scale(&rat(1, 8));
    let det_jet = Jet::new(4, vec![Poly::one(), j.scale(&rat(-1, 2)), det4])?;

    let h_jet = Jet::new(4, vec![Poly::constant(int(ni)), j.clone(), a2.scale(&rat(1, 2))])?;

    let v_jet = Jet::new(4, vec![Poly::one(), j.scale(&rat(1, 2 * ni)), v4_coefficient(n)])?;

    Ok(NormalFormJets {
        det_jet,
        h_jet,
        v_jet,
    })
}

/// Normal-form jets from the trace inputs `tr g_2 = -J`, `tr g_2^2 = |A|^2`,
/// `tr g_4 = |A|^2/4`, truncated at `r^4`.
pub fn expand_normal_form(n: u32) -> Result<NormalFormJets> {
    if n < 5 {
        return Err(Error::Domain(format!(
            "expansion requires n >= 5 (volume weight (n+1)/(n-3)), got {n}"
        )));
    }
    normal_form_jets(n)
}

/// The same determinant and mean-curvature jets rebuilt from matrix-series
/// traces: `sqrt(det) = exp(tr log G / 2)` and `H = n - tr(G^{-1} r dG/dr) / 2`.
pub fn normal_form_from_traces(n: u32) -> Result<(Jet, Jet)> {
    let g = MatSeries::normal_form_metric(4);
    let half = rat(1, 2);
    let det = g.log().trace(n)?.scale(&half).exp_nilpotent()?;
    let log_derivative = g.inverse().mul(&g.euler()).trace(n)?;
    let h = Jet::constant(4, Poly::constant(int(i64::from(n))))?.sub(&log_derivative.scale(&half));
    Ok((det, h))
}

/// Closed-manifold integral of a polynomial density, expressed over the
/// independent channels `Vol`, `int J`, `int J^2`, `int |E|^2`, ...
///
/// Keys are monomials over `J` and `E2` only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntegralClass {
    terms: BTreeMap<Monomial, BigRational>,
}

impl IntegralClass {
    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn vol(&self) -> BigRational {
        self.coeff(&Monomial::ONE)
    }

    pub fn int_j(&self) -> BigRational {
        self.coeff(&Monomial::symbol(Symbol::J))
    }

    pub fn int_j2(&self) -> BigRational {
        self.coeff(&Monomial::pow(Symbol::J, 2))
    }

    pub fn int_e2(&self) -> BigRational {
        self.coeff(&Monomial::symbol(Symbol::E2))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let e = out.terms.entry(*m).or_insert_with(BigRational::zero);
            *e -= c;
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (*m, v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// Channels as `{"Vol": "p/q", "int(J)": ..., "int(E2)": ...}`.
    pub fn to_string_map(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let key = if *m == Monomial::ONE {
                    "Vol".to_string()
                } else {
                    format!("int({m})")
                };
                (key, rational_string(c))
            })
            .collect()
    }
}

impl Serialize for IntegralClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string_map().serialize(s)
    }
}

/// Integrate a boundary density over a closed manifold: `int Lap J = 0`, then
/// `|A|^2 = |E|^2/(n-2)^2 + J^2/n` pointwise.
pub fn boundary_integral(p: &Poly, n: u32) -> Result<IntegralClass> {
    if n < 3 {
        return Err(Error::Domain(format!("boundary_integral: n = {n} < 3")));
    }
    let mut reduced = Poly::zero();
    for (m, c) in p.terms() {
        let lap = m.exponent(Symbol::LapJ);
        if lap == 0 {
            reduced.add_term(*m, c.clone());
        } else if *m != Monomial::symbol(Symbol::LapJ) {
            return Err(Error::UnsupportedIntegral(format!(
                "monomial {m} contains Lap J in a product"
            )));
        }
    }
    let ni = i64::from(n);
    let a2 = &sym(Symbol::E2).scale(&rat(1, (ni - 2) * (ni - 2))) + &j2().scale(&rat(1, ni));
    let reduced = reduced.substitute(Symbol::A2, &a2);
    Ok(IntegralClass {
        terms: reduced.terms().map(|(m, c)| (*m, c.clone())).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_coefficients() {
        let jets = expand_normal_form(6).unwrap();
        assert_eq!(
            jets.det_jet.coeff(4),
            (&j2() - &sym(Symbol::A2)).scale(&rat(1, 8))
        );
        assert_eq!(jets.h_jet.coeff(4), sym(Symbol::A2).scale(&rat(1, 2)));
        assert_eq!(jets.h_jet.coeff(2), sym(Symbol::J));
        assert!(matches!(expand_normal_form(4), Err(Error::Domain(_))));
    }

    #[test]
    fn det_jet_matches_model_determinant() {
        // Round sphere data J = n k / 2, |A|^2 = n k^2 / 4 with k = 1:
        // sqrt(det) = (1 - r^2/4)^n.
        for n in 3..=12u32 {
            let ni = i64::from(n);
            let jets = normal_form_jets(n).unwrap();
            let vals = [(Symbol::J, rat(ni, 2)), (Symbol::A2, rat(ni, 4))];
            let binom2 = ni * (ni - 1) / 2;
            assert_eq!(jets.det_jet.coeff(2).evaluate(&vals).unwrap(), rat(-ni, 4));
            assert_eq!(jets.det_jet.coeff(4).evaluate(&vals).unwrap(), rat(binom2, 16));
        }
        let jets = normal_form_jets(4).unwrap();
        let vals = [(Symbol::J, int(2)), (Symbol::A2, int(1))];
        assert_eq!(jets.det_jet.coeff(2).evaluate(&vals).unwrap(), int(-1));
        assert_eq!(jets.det_jet.coeff(4).evaluate(&vals).unwrap(), rat(3, 8));
    }

    #[test]
    fn trace_routes_agree_with_stated_inputs() {
        for n in 5..=12 {
            let jets = expand_normal_form(n).unwrap();
            let (det, h) = normal_form_from_traces(n).unwrap();
            assert_eq!(det, jets.det_jet, "det n = {n}");
            assert_eq!(h, jets.h_jet, "h n = {n}");
        }
    }

    #[test]
    fn v4_vanishes_on_round_spheres() {
        for n in 3..=12u32 {
            let ni = i64::from(n);
            for (kp, kq) in [(1, 1), (1, 2), (3, 1), (7, 5)] {
                let k = rat(kp, kq);
                let vals = [
                    (Symbol::J, &k * rat(ni, 2)),
                    (Symbol::A2, &k * &k * rat(ni, 4)),
                    (Symbol::LapJ, int(0)),
                ];
                assert!(v4_coefficient(n).evaluate(&vals).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn v_det_product_r4_coefficient() {
        let n = 7;
        let jets = expand_normal_form(n).unwrap();
        let prod = jets.v_jet.mul(&jets.det_jet);
        let expect = &(&v4_coefficient(n) + &(&j2() - &sym(Symbol::A2)).scale(&rat(1, 8)))
            - &j2().scale(&rat(1, 4 * 7));
        assert_eq!(prod.coeff(4), expect);
    }

    #[test]
    fn integral_rules() {
        let lap = sym(Symbol::LapJ);
        assert!(boundary_integral(&lap, 5).unwrap().is_zero());

        let a2 = boundary_integral(&sym(Symbol::A2), 5).unwrap();
        assert_eq!(a2.int_e2(), rat(1, 9));
        assert_eq!(a2.int_j2(), rat(1, 5));

        let bad = &sym(Symbol::J) * &lap;
        assert!(matches!(
            boundary_integral(&bad, 5),
            Err(Error::UnsupportedIntegral(_))
        ));
        let bad2 = lap.pow(2);
        assert!(boundary_integral(&bad2, 5).is_err());
    }
}
