//! Monomials, polynomials and the standard-graded ring `F_p[x_1, ..., x_n]`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactla::PrimeField;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, t: usize) -> Self {
        let mut e = vec![0; nvars];
        e[t] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn times_var(&self, t: usize) -> Monomial {
        let mut e = self.0.clone();
        e[t] += 1;
        Monomial(e)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Variables with multiplicity, in index order: x^2 y -> [0, 0, 1].
    pub fn factors(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(t, &e)| std::iter::repeat_n(t, e as usize))
            .collect()
    }
}

/// All monomials of degree `deg` in `nvars` variables, in descending lex order
/// (for two variables: x^2, xy, y^2).
pub fn monomials_of_degree(nvars: usize, deg: u32) -> Vec<Monomial> {
    fn go(nvars: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == nvars {
            prefix.push(deg);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e);
            go(nvars, deg - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if deg == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    go(nvars, deg, &mut Vec::with_capacity(nvars), &mut out);
    out
}

/// Number of monomials of degree `deg` in `nvars` variables: C(deg + n - 1, n - 1).
pub fn monomial_count(nvars: usize, deg: i64) -> usize {
    if deg < 0 {
        return 0;
    }
    if nvars == 0 {
        return usize::from(deg == 0);
    }
    let (n, k) = (deg as u128 + nvars as u128 - 1, nvars as u128 - 1);
    let mut c = 1u128;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c as usize
}

/// A polynomial with coefficients in F_p. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, u32>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: i64) -> Self {
        Self::monomial(field, Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, t: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(nvars, t), 1);
        Self { nvars, terms }
    }

    pub fn monomial(field: PrimeField, m: Monomial, c: i64) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        let c = field.reduce(c);
        if c != 0 {
            terms.insert(m, c);
        }
        Self { nvars, terms }
    }

    /// Sums duplicate monomials and drops zero coefficients.
    pub fn from_terms(field: PrimeField, nvars: usize, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Self {
        let mut map: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            let e = map.entry(m).or_insert(0);
            *e = field.add(*e, c % field.modulus());
        }
        map.retain(|_, c| *c != 0);
        Self { nvars, terms: map }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Total degree of a homogeneous polynomial; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn add(&self, field: PrimeField, other: &Polynomial) -> Polynomial {
        Self::from_terms(
            field,
            self.nvars,
            self.terms().chain(other.terms()).map(|(m, c)| (m.clone(), c)),
        )
    }

    pub fn neg(&self, field: PrimeField) -> Polynomial {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), field.neg(c))).collect(),
        }
    }

    pub fn sub(&self, field: PrimeField, other: &Polynomial) -> Polynomial {
        self.add(field, &other.neg(field))
    }

    pub fn mul(&self, field: PrimeField, other: &Polynomial) -> Polynomial {
        let mut out: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let e = out.entry(a.mul(b)).or_insert(0);
                *e = field.add(*e, field.mul(ca, cb));
            }
        }
        out.retain(|_, c| *c != 0);
        Self {
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn pow(&self, field: PrimeField, e: u32) -> Polynomial {
        let mut r = Self::constant(field, self.nvars, 1);
        for _ in 0..e {
            r = r.mul(field, self);
        }
        r
    }

    pub fn scale(&self, field: PrimeField, c: u32) -> Polynomial {
        Self::from_terms(
            field,
            self.nvars,
            self.terms().map(|(m, v)| (m.clone(), field.mul(v, c))),
        )
    }

    /// Writes the polynomial with the given variable names, highest lex term first.
    pub fn display<'a>(&'a self, field: PrimeField, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay {
            poly: self,
            field,
            names,
        }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    field: PrimeField,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let s = self.field.signed(*c);
            let (neg, mag) = (s < 0, s.unsigned_abs());
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            for (t, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.names[t].clone()),
                    _ => factors.push(format!("{}^{}", self.names[t], e)),
                }
            }
            if factors.is_empty() || mag != 1 {
                factors.insert(0, mag.to_string());
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// The standard-graded polynomial ring over F_p; every variable has degree 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    field: PrimeField,
    names: Vec<String>,
}

impl RingSpec {
    pub fn new(field: PrimeField, names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Input("a ring needs at least one variable".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Input(format!("duplicate variable name {n}")));
            }
        }
        Ok(Self { field, names })
    }

    /// `F_p[x, y, z, ...]`-style ring with default names (x, y, z, w, then x4, x5, ...).
    pub fn standard(field: PrimeField, nvars: usize) -> Self {
        let base = ["x", "y", "z", "w"];
        let names = (0..nvars)
            .map(|i| base.get(i).map_or_else(|| format!("x{i}"), |s| s.to_string()))
            .collect();
        Self { field, names }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var(&self, t: usize) -> Polynomial {
        Polynomial::var(self.nvars(), t)
    }

    pub fn vars(&self) -> Vec<Polynomial> {
        (0..self.nvars()).map(|t| self.var(t)).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Linear form with the given coefficients.
    pub fn linear_form(&self, coeffs: &[u32]) -> Polynomial {
        Polynomial::from_terms(
            self.field,
            self.nvars(),
            coeffs
                .iter()
                .enumerate()
                .map(|(t, &c)| (Monomial::var(self.nvars(), t), c)),
        )
    }

    pub fn show(&self, p: &Polynomial) -> String {
        p.display(self.field, &self.names).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_enumeration() {
        let ms = monomials_of_degree(2, 2);
        assert_eq!(
            ms,
            vec![Monomial(vec![2, 0]), Monomial(vec![1, 1]), Monomial(vec![0, 2])]
        );
        for n in 1..4 {
            for d in 0..6 {
                assert_eq!(monomials_of_degree(n, d).len(), monomial_count(n, d as i64));
            }
        }
        assert_eq!(monomial_count(3, -1), 0);
    }

    #[test]
    fn arithmetic_and_display() {
        let k = PrimeField::new(7).unwrap();
        let r = RingSpec::standard(k, 2);
        let x = r.var(0);
        let y = r.var(1);
        let s = x.add(k, &y);
        let sq = s.pow(k, 2);
        assert_eq!(r.show(&sq), "x^2 + 2*x*y + y^2");
        assert_eq!(sq.homogeneous_degree(), Some(2));
        let d = x.sub(k, &y);
        assert_eq!(r.show(&d), "x - y");
        assert!(!x.add(k, &Polynomial::constant(k, 2, 1)).is_homogeneous());
        assert!(x.sub(k, &x).is_zero());
    }
}
