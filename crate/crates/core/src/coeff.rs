//! Coefficient rings: exact rationals, and polynomials over them in named
//! formal parameters (used for solution families such as `α, β, γ`).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Shorthand for a small rational `num/den`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A commutative ring of exact coefficients containing the rationals.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, factor: &Rational) -> Self;
    fn from_rational(value: Rational) -> Self;
    /// The value if this coefficient is a rational constant.
    fn as_rational(&self) -> Option<Rational>;

    fn sub_assign(&mut self, other: &Self) {
        self.add_assign(&other.neg());
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, factor: &Rational) -> Self {
        self * factor
    }
    fn from_rational(value: Rational) -> Self {
        value
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

/// Index of a formal parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Param(pub u32);

/// Monomial as sorted `(parameter, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Param, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(p: Param) -> Self {
        Monomial(alloc::vec![(p, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Param, u32)] {
        &self.0
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out: BTreeMap<Param, u32> = self.0.iter().copied().collect();
        for &(p, e) in &other.0 {
            *out.entry(p).or_insert(0) += e;
        }
        Monomial(out.into_iter().collect())
    }
}

/// Polynomial with rational coefficients in the formal parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&c) {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(p: Param) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(p), One::one());
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Constant term.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Zero::zero)
    }

    /// Coefficient of the linear monomial in `p`.
    pub fn linear_coeff(&self, p: Param) -> Rational {
        self.terms
            .get(&Monomial::var(p))
            .cloned()
            .unwrap_or_else(Zero::zero)
    }

    /// Substitute rational values for every parameter in `values`.
    pub fn evaluate(&self, values: &BTreeMap<Param, Rational>) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(p, e) in &m.0 {
                match values.get(&p) {
                    Some(v) => {
                        for _ in 0..e {
                            coeff *= v;
                        }
                    }
                    None => rest.push((p, e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if Zero::is_zero(&c) {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Zero::zero);
        *entry += c;
        if Zero::is_zero(entry) {
            self.terms.remove(&m);
        }
    }
}

impl Coeff for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(One::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
    fn scale(&self, factor: &Rational) -> Self {
        if Zero::is_zero(factor) {
            return Poly::default();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }
    fn from_rational(value: Rational) -> Self {
        Poly::constant(value)
    }
    fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Zero::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rational(q: &Rational) -> alloc::string::String {
    use alloc::string::ToString;
    if q.is_integer() {
        q.numer().to_string()
    } else {
        alloc::format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let unit = One::is_one(&a);
            if !unit || m.0.is_empty() {
                write!(f, "{}", fmt_rational(&a))?;
                if !m.0.is_empty() {
                    write!(f, "*")?;
                }
            }
            for (j, (p, e)) in m.0.iter().enumerate() {
                if j > 0 {
                    write!(f, "*")?;
                }
                write!(f, "p{}", p.0)?;
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arithmetic() {
        let a = Poly::var(Param(0));
        let b = Poly::var(Param(1));
        let mut s = a.clone();
        s.add_assign(&b);
        let sq = s.mul(&s);
        assert_eq!(sq.total_degree(), 2);
        let mut vals = BTreeMap::new();
        vals.insert(Param(0), qi(2));
        vals.insert(Param(1), qi(3));
        assert_eq!(sq.evaluate(&vals).as_rational(), Some(qi(25)));
        let mut z = s.clone();
        z.sub_assign(&s);
        assert!(Coeff::is_zero(&z));
    }

    #[test]
    fn constants_are_rational() {
        assert_eq!(Poly::constant(q(1, 2)).as_rational(), Some(q(1, 2)));
        assert_eq!(Poly::var(Param(3)).as_rational(), None);
        assert_eq!(Poly::var(Param(3)).linear_coeff(Param(3)), qi(1));
    }
}
