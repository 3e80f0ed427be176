//! Noncommutative matrix series `I + r^2 G2 + r^4 G4` and their traces.
//!
//! Only the traces of words up to weight 4 are needed for the normal-form
//! expansion: `tr I = n`, `tr G2 = -J`, `tr G2 G2 = |A|^2`, `tr G4 = |A|^2/4`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::jet::Jet;
use super::poly::{int, rat, Monomial, Poly, Symbol};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gen {
    G2,
    G4,
}

impl Gen {
    fn weight(self) -> u32 {
        match self {
            Gen::G2 => 2,
            Gen::G4 => 4,
        }
    }
}

type Word = Vec<Gen>;

fn word_weight(w: &Word) -> u32 {
    w.iter().map(|g| g.weight()).sum()
}

/// Matrix-valued even series in `r`; each word carries `r^{weight}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatSeries {
    order: u32,
    terms: BTreeMap<Word, BigRational>,
}

impl MatSeries {
    pub fn identity(order: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), BigRational::one());
        Self { order, terms }
    }

    /// `g_r` relative to `g_0`: `I + r^2 G2 + r^4 G4`.
    pub fn normal_form_metric(order: u32) -> Self {
        let mut m = Self::identity(order);
        m.add_word(vec![Gen::G2], BigRational::one());
        m.add_word(vec![Gen::G4], BigRational::one());
        m
    }

    fn add_word(&mut self, w: Word, c: BigRational) {
        if word_weight(&w) > self.order || c.is_zero() {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self {
            order: self.order.min(other.order),
            terms: BTreeMap::new(),
        };
        for (w, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_word(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self {
            order: self.order,
            terms: BTreeMap::new(),
        };
        for (w, v) in &self.terms {
            out.add_word(w.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self {
            order: self.order.min(other.order),
            terms: BTreeMap::new(),
        };
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_word(w, ca * cb);
            }
        }
        out
    }

    fn minus_identity(&self) -> Self {
        self.add(&Self::identity(self.order).scale(&-BigRational::one()))
    }

    /// `(I + X)^{-1}` for `X` of positive weight.
    pub fn inverse(&self) -> Self {
        let minus_x = self.minus_identity().scale(&-BigRational::one());
        let mut acc = Self::identity(self.order);
        let mut power = Self::identity(self.order);
        for _ in 0..self.order / 2 {
            power = power.mul(&minus_x);
            acc = acc.add(&power);
        }
        acc
    }

    /// Matrix logarithm of `I + X`.
    pub fn log(&self) -> Self {
        let x = self.minus_identity();
        let mut acc = Self {
            order: self.order,
            terms: BTreeMap::new(),
        };
        let mut power = Self::identity(self.order);
        for k in 1..=self.order / 2 {
            power = power.mul(&x);
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&power.scale(&rat(sign, i64::from(k))));
        }
        acc
    }

    /// Euler operator `r d/dr` applied entrywise.
    pub fn euler(&self) -> Self {
        let mut out = Self {
            order: self.order,
            terms: BTreeMap::new(),
        };
        for (w, c) in &self.terms {
            out.add_word(w.clone(), c * int(i64::from(word_weight(w))));
        }
        out
    }

    /// Trace as a scalar jet in `r`.
    pub fn trace(&self, n: u32) -> Result<Jet> {
        if self.order > 4 {
            return Err(Error::Series("word traces are only known up to weight 4".into()));
        }
        let mut coeffs = vec![Poly::zero(); (self.order / 2 + 1) as usize];
        for (w, c) in &self.terms {
            let tr = word_trace(w, n)?;
            let slot = (word_weight(w) / 2) as usize;
            coeffs[slot] = &coeffs[slot] + &tr.scale(c);
        }
        Jet::new(self.order, coeffs)
    }
}

fn word_trace(w: &[Gen], n: u32) -> Result<Poly> {
    let a2 = Poly::symbol(Symbol::A2);
    Ok(match w {
        [] => Poly::constant(int(i64::from(n))),
        [Gen::G2] => Poly::term(Monomial::symbol(Symbol::J), -BigRational::one()),
        [Gen::G2, Gen::G2] => a2,
        // tr g_4 = |A|^2/4, i.e. the Bach-type term is trace free.
        [Gen::G4] => a2.scale(&rat(1, 4)),
        _ => {
            return Err(Error::Series(format!("no trace rule for word {w:?}")));
        }
    })
}
