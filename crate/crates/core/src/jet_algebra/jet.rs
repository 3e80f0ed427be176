use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{int, Poly};
use crate::error::{Error, Result};

/// Highest supported truncation power.
pub const MAX_ORDER: u32 = 8;

/// Truncated even power series `c_0 + c_2 r^2 + ... + c_order r^order` with
/// polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jet {
    order: u32,
    coeffs: Vec<Poly>,
}

/// Operations accepted by [`jet_combine`].
#[derive(Debug, Clone)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    /// Inverse of the left operand; the right operand is ignored.
    Invert,
    Scale(BigRational),
}

impl Jet {
    pub fn new(order: u32, coeffs: Vec<Poly>) -> Result<Self> {
        check_order(order)?;
        let len = (order / 2 + 1) as usize;
        if coeffs.len() > len {
            return Err(Error::Series(format!(
                "{} coefficients exceed truncation order {order}",
                coeffs.len()
            )));
        }
        let mut coeffs = coeffs;
        coeffs.resize(len, Poly::zero());
        Ok(Self { order, coeffs })
    }

    pub fn zero(order: u32) -> Result<Self> {
        Self::new(order, Vec::new())
    }

    pub fn constant(order: u32, c: Poly) -> Result<Self> {
        Self::new(order, vec![c])
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficient of `r^power`; zero for odd powers or beyond the order.
    pub fn coeff(&self, power: u32) -> Poly {
        if power % 2 == 1 || power > self.order {
            return Poly::zero();
        }
        self.coeffs[(power / 2) as usize].clone()
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    fn common(&self, other: &Jet) -> u32 {
        self.order.min(other.order)
    }

    fn truncated(&self, order: u32) -> Jet {
        Jet {
            order,
            coeffs: self.coeffs[..=(order / 2) as usize].to_vec(),
        }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let order = self.common(other);
        let coeffs = (0..=order / 2)
            .map(|i| &self.coeffs[i as usize] + &other.coeffs[i as usize])
            .collect();
        Jet { order, coeffs }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Jet {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.common(other);
        let len = (order / 2 + 1) as usize;
        let mut coeffs = vec![Poly::zero(); len];
        for i in 0..len {
            for j in 0..len - i {
                coeffs[i + j] = &coeffs[i + j] + &(&self.coeffs[i] * &other.coeffs[j]);
            }
        }
        Jet { order, coeffs }
    }

    /// Multiplicative inverse; requires the constant term to be exactly 1.
    pub fn invert(&self) -> Result<Jet> {
        if self.coeffs[0] != Poly::one() {
            return Err(Error::Series(format!(
                "cannot invert: leading coefficient {} is not 1",
                self.coeffs[0]
            )));
        }
        // (1 + X)^{-1} = sum (-X)^k, X nilpotent to this order.
        let x = self.sub(&Jet::constant(self.order, Poly::one()).expect("valid order"));
        let minus_x = x.scale(&-BigRational::one());
        Ok(geometric_sum(&minus_x, |_| BigRational::one()))
    }

    /// `exp` of a jet with zero constant term.
    pub fn exp_nilpotent(&self) -> Result<Jet> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Series("exp requires a zero constant term".into()));
        }
        Ok(geometric_sum(self, |k| {
            let fact: i64 = (1..=k as i64).product();
            BigRational::new(1.into(), fact.into())
        }))
    }

    /// `log` of a jet with constant term 1.
    pub fn log_unit(&self) -> Result<Jet> {
        if self.coeffs[0] != Poly::one() {
            return Err(Error::Series("log requires constant term 1".into()));
        }
        let x = self.sub(&Jet::constant(self.order, Poly::one()).expect("valid order"));
        let mut out = geometric_sum(&x, |k| {
            if k == 0 {
                BigRational::zero()
            } else {
                let sign = if k % 2 == 1 { 1 } else { -1 };
                BigRational::new(sign.into(), (k as i64).into())
            }
        });
        out.coeffs[0] = Poly::zero();
        Ok(out)
    }

    /// Euler operator `r d/dr`: multiplies the `r^{2j}` coefficient by `2j`.
    pub fn euler(&self) -> Jet {
        Jet {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, p)| p.scale(&int(2 * j as i64)))
                .collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Jet {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn truncate(&self, order: u32) -> Result<Jet> {
        check_order(order)?;
        if order > self.order {
            return Err(Error::Series(format!(
                "cannot extend a jet of order {} to {order}",
                self.order
            )));
        }
        Ok(self.truncated(order))
    }
}

fn check_order(order: u32) -> Result<()> {
    if !order.is_multiple_of(2) || order > MAX_ORDER {
        return Err(Error::Series(format!(
            "truncation order {order} must be even and at most {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// `sum_k w(k) x^k` for nilpotent `x` (zero constant term).
fn geometric_sum(x: &Jet, weight: impl Fn(u32) -> BigRational) -> Jet {
    let order = x.order;
    let mut power = Jet::constant(order, Poly::one()).expect("valid order");
    let mut acc = Jet::zero(order).expect("valid order");
    for k in 0..=order / 2 {
        acc = acc.add(&power.scale(&weight(k)));
        power = power.mul(x);
    }
    acc
}

/// Exact truncated arithmetic on two jets at their common order.
pub fn jet_combine(a: &Jet, b: &Jet, op: JetOp) -> Result<Jet> {
    Ok(match op {
        JetOp::Add => a.add(b),
        JetOp::Sub => a.sub(b),
        JetOp::Mul => a.mul(b),
        JetOp::Invert => a.invert()?,
        JetOp::Scale(c) => a.scale(&c),
    })
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) r^{}", 2 * j)?;
        }
        write!(f, " + O(r^{})", self.order + 2)
    }
}

#[cfg(test)]
mod tests {
    use super::super::poly::{rat, Monomial, Symbol};
    use super::*;

    fn j() -> Poly {
        Poly::symbol(Symbol::J)
    }

    #[test]
    fn difference_of_squares() {
        let half_j = j().scale(&rat(1, 2));
        let a = Jet::new(4, vec![Poly::one(), -&half_j]).unwrap();
        let b = Jet::new(4, vec![Poly::one(), half_j]).unwrap();
        let p = jet_combine(&a, &b, JetOp::Mul).unwrap();
        assert_eq!(p.coeff(0), Poly::one());
        assert!(p.coeff(2).is_zero());
        assert_eq!(p.coeff(4), Poly::term(Monomial::pow(Symbol::J, 2), rat(-1, 4)));
    }

    #[test]
    fn geometric_inverse() {
        let n = 7;
        let a = Jet::new(4, vec![Poly::one(), j().scale(&rat(1, n))]).unwrap();
        let inv = jet_combine(&a, &a, JetOp::Invert).unwrap();
        assert_eq!(inv.coeff(2), j().scale(&rat(-1, n)));
        assert_eq!(
            inv.coeff(4),
            Poly::term(Monomial::pow(Symbol::J, 2), rat(1, n * n))
        );
        assert_eq!(inv.mul(&a), Jet::constant(4, Poly::one()).unwrap());
    }

    #[test]
    fn invert_requires_unit_leading_term() {
        let a = Jet::new(4, vec![Poly::constant(int(2))]).unwrap();
        assert!(a.invert().is_err());
        let b = Jet::new(4, vec![j()]).unwrap();
        assert!(jet_combine(&b, &b, JetOp::Invert).is_err());
    }

    #[test]
    fn order_never_silently_extends() {
        let a = Jet::new(2, vec![Poly::one(), j()]).unwrap();
        let b = Jet::new(6, vec![Poly::one(), j(), j(), j()]).unwrap();
        assert_eq!(a.mul(&b).order(), 2);
        assert_eq!(a.add(&b).order(), 2);
        assert!(a.truncate(4).is_err());
        assert!(Jet::new(3, vec![]).is_err());
        assert!(Jet::new(10, vec![]).is_err());
        assert!(Jet::new(2, vec![Poly::one(); 3]).is_err());
    }

    #[test]
    fn exp_log_roundtrip() {
        let x = Jet::new(8, vec![Poly::zero(), j(), Poly::symbol(Symbol::A2), j()]).unwrap();
        let back = x.exp_nilpotent().unwrap().log_unit().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn euler_operator() {
        let a = Jet::new(4, vec![Poly::one(), j(), j()]).unwrap();
        let e = a.euler();
        assert!(e.coeff(0).is_zero());
        assert_eq!(e.coeff(2), j().scale(&int(2)));
        assert_eq!(e.coeff(4), j().scale(&int(4)));
    }
}
