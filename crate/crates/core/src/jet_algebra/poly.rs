use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Formal boundary scalars: `J`, `|A|^2`, `|E|^2` and `Lap J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    J,
    A2,
    E2,
    LapJ,
}

impl Symbol {
    pub const ALL: [Symbol; 4] = [Symbol::J, Symbol::A2, Symbol::E2, Symbol::LapJ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::J => "J",
            Symbol::A2 => "A2",
            Symbol::E2 => "E2",
            Symbol::LapJ => "LapJ",
        }
    }
}

/// Exponent vector over [`Symbol::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub [u8; 4]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 4]);

    pub fn symbol(s: Symbol) -> Self {
        let mut e = [0; 4];
        e[s.index()] = 1;
        Monomial(e)
    }

    pub fn pow(s: Symbol, k: u8) -> Self {
        let mut e = [0; 4];
        e[s.index()] = k;
        Monomial(e)
    }

    pub fn exponent(&self, s: Symbol) -> u8 {
        self.0[s.index()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn without(&self, s: Symbol) -> Self {
        let mut e = self.0;
        e[s.index()] = 0;
        Monomial(e)
    }

    pub fn times(&self, other: &Monomial) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Monomial::ONE {
            return write!(f, "1");
        }
        let mut first = true;
        for s in Symbol::ALL {
            let e = self.exponent(s);
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", s.name())?;
            } else {
                write!(f, "{}^{}", s.name(), e)?;
            }
        }
        Ok(())
    }
}

/// `p/q` (or `p` when the denominator is 1).
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Sparse polynomial with exact rational coefficients. Zero terms are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::term(Monomial::symbol(s), BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Constant term, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Replace one symbol by a polynomial.
    pub fn substitute(&self, s: Symbol, value: &Poly) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            let rest = Poly::term(m.without(s), c.clone());
            out = &out + &(&rest * &value.pow(u32::from(e)));
        }
        out
    }

    /// Evaluate with every symbol replaced by a rational value.
    pub fn evaluate(&self, values: &[(Symbol, BigRational)]) -> Option<BigRational> {
        let mut p = self.clone();
        for (s, v) in values {
            p = p.substitute(*s, &Poly::constant(v.clone()));
        }
        p.as_constant()
    }

    /// Coefficient map serialized as `{"J^2": "p/q", ...}`.
    pub fn to_string_map(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(m, c)| (m.to_string(), rational_string(c)))
            .collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let abs = c.abs();
            if *m == Monomial::ONE {
                write!(f, "{}", rational_string(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", rational_string(&abs))?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}
