use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use super::{binomial, format_rational, parse_rational, sign_pow, to_f64, Rational, UniPoly};
use crate::error::{Error, Result};
use crate::render::{format_terms, Style};

/// Bivariate polynomial in `(s, t)`; the key `(i, j)` holds the coefficient
/// of `s^i t^j`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<(usize, usize), Rational>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(c: Rational, s_pow: usize, t_pow: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(s_pow, t_pow, c);
        p
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((usize, usize), Rational)>,
    {
        let mut p = Self::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// `a(s) * b(t)`
    pub fn outer(a: &UniPoly, b: &UniPoly) -> Self {
        let mut p = Self::zero();
        for (i, ca) in a.coeffs().iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.coeffs().iter().enumerate() {
                p.add_term(i, j, ca * cb);
            }
        }
        p
    }

    pub fn in_s(a: &UniPoly) -> Self {
        Self::outer(a, &UniPoly::one())
    }

    pub fn in_t(b: &UniPoly) -> Self {
        Self::outer(&UniPoly::one(), b)
    }

    /// `(t − s)^m`
    pub fn t_minus_s_pow(m: usize) -> Self {
        Self::from_terms((0..=m).map(|k| {
            let c = Rational::from_integer(binomial(m, k)) * sign_pow(m - k);
            ((m - k, k), c)
        }))
    }

    fn add_term(&mut self, i: usize, j: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, s_pow: usize, t_pow: usize) -> Rational {
        self.terms
            .get(&(s_pow, t_pow))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms in ascending lexicographic order of `(s power, t power)`.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&(usize, usize), &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_s(&self) -> Option<usize> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    pub fn degree_t(&self) -> Option<usize> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(&k, v)| (k, v * c)))
    }

    /// `(s, t) ↦ p(t, s)`
    pub fn swap(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())))
    }

    pub fn eval(&self, s: &Rational, t: &Rational) -> Rational {
        self.at_s(s).eval(t)
    }

    pub fn eval_f64(&self, s: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| to_f64(c) * s.powi(i as i32) * t.powi(j as i32))
            .sum()
    }

    /// Restriction to the diagonal, `t ↦ p(t, t)`.
    pub fn diagonal(&self) -> UniPoly {
        let len = self
            .terms
            .keys()
            .map(|&(i, j)| i + j + 1)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![Rational::zero(); len];
        for (&(i, j), c) in &self.terms {
            coeffs[i + j] += c;
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// `t ↦ p(value, t)`
    pub fn at_s(&self, value: &Rational) -> UniPoly {
        let len = self.degree_t().map_or(0, |d| d + 1);
        let mut coeffs = vec![Rational::zero(); len];
        for (&(i, j), c) in &self.terms {
            coeffs[j] += c * super::pow(value, i);
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// `s ↦ p(s, value)`
    pub fn at_t(&self, value: &Rational) -> UniPoly {
        self.swap().at_s(value)
    }

    /// `k`-th partial derivative in `t`.
    pub fn derivative_t(&self, k: usize) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(_, j), _)| j >= k)
                .map(|(&(i, j), c)| {
                    let falling: BigInt = ((j - k + 1)..=j).map(BigInt::from).product();
                    ((i, j - k), c * Rational::from_integer(falling))
                }),
        )
    }

    /// `k`-th partial derivative in `s`.
    pub fn derivative_s(&self, k: usize) -> Self {
        self.swap().derivative_t(k).swap()
    }

    pub fn to_plain(&self) -> String {
        self.render(Style::Plain)
    }

    pub fn to_latex(&self) -> String {
        self.render(Style::Latex)
    }

    fn render(&self, style: Style) -> String {
        let terms = self
            .terms
            .iter()
            .rev()
            .map(|(&(i, j), c)| (c, vec![("s", i), ("t", j)]));
        format_terms(terms, style)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;

    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;

    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;

    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;

    fn neg(self) -> BiPoly {
        self.scale(&-Rational::one())
    }
}

impl Serialize for BiPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<(usize, usize, String)> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| (i, j, format_rational(c)))
            .collect();
        terms.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<(usize, usize, String)>::deserialize(de)?;
        let mut terms = Vec::with_capacity(raw.len());
        for (i, j, text) in raw {
            terms.push(((i, j), parse_rational(&text).map_err(D::Error::custom)?));
        }
        Ok(Self::from_terms(terms))
    }
}

/// A function on `[0,1]²` given by `lower` on `s ≤ t` and `upper` on `s ≥ t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PiecewiseBiPoly {
    lower: BiPoly,
    upper: BiPoly,
}

impl PiecewiseBiPoly {
    /// Fails when the pieces disagree on the diagonal.
    pub fn new(lower: BiPoly, upper: BiPoly) -> Result<Self> {
        if lower.diagonal() != upper.diagonal() {
            return Err(Error::Discontinuous);
        }
        Ok(Self { lower, upper })
    }

    /// Symmetric function determined by its lower piece.
    pub fn symmetric(lower: BiPoly) -> Self {
        let upper = lower.swap();
        Self { lower, upper }
    }

    /// One polynomial valid everywhere.
    pub fn uniform(p: BiPoly) -> Self {
        Self {
            lower: p.clone(),
            upper: p,
        }
    }

    pub fn zero() -> Self {
        Self::uniform(BiPoly::zero())
    }

    pub fn lower(&self) -> &BiPoly {
        &self.lower
    }

    pub fn upper(&self) -> &BiPoly {
        &self.upper
    }

    pub fn is_zero(&self) -> bool {
        self.lower.is_zero() && self.upper.is_zero()
    }

    pub fn eval(&self, s: &Rational, t: &Rational) -> Rational {
        if s <= t {
            self.lower.eval(s, t)
        } else {
            self.upper.eval(s, t)
        }
    }

    pub fn eval_f64(&self, s: f64, t: f64) -> f64 {
        if s <= t {
            self.lower.eval_f64(s, t)
        } else {
            self.upper.eval_f64(s, t)
        }
    }

    /// `(s, t) ↦ f(t, s)`
    pub fn transpose(&self) -> Self {
        Self {
            lower: self.upper.swap(),
            upper: self.lower.swap(),
        }
    }

    /// Exact symmetry: `lower(s,t) = upper(t,s)` as polynomials.
    pub fn is_symmetric(&self) -> bool {
        self.lower == self.upper.swap()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            lower: self.lower.scale(c),
            upper: self.upper.scale(c),
        }
    }

    /// `t ↦ ∫₀¹ f(s,t) w(s) ds`, split at `s = t`.
    pub fn integrate_s(&self, weight: &UniPoly) -> UniPoly {
        bipoly_definite_integral_s(self, weight)
    }
}

impl Add for &PiecewiseBiPoly {
    type Output = PiecewiseBiPoly;

    fn add(self, rhs: &PiecewiseBiPoly) -> PiecewiseBiPoly {
        PiecewiseBiPoly {
            lower: &self.lower + &rhs.lower,
            upper: &self.upper + &rhs.upper,
        }
    }
}

impl Sub for &PiecewiseBiPoly {
    type Output = PiecewiseBiPoly;

    fn sub(self, rhs: &PiecewiseBiPoly) -> PiecewiseBiPoly {
        PiecewiseBiPoly {
            lower: &self.lower - &rhs.lower,
            upper: &self.upper - &rhs.upper,
        }
    }
}

impl<'de> Deserialize<'de> for PiecewiseBiPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lower: BiPoly,
            upper: BiPoly,
        }
        let raw = Raw::deserialize(de)?;
        PiecewiseBiPoly::new(raw.lower, raw.upper).map_err(D::Error::custom)
    }
}

/// `t ↦ ∫₀ᵗ lower(s,t) w(s) ds + ∫ₜ¹ upper(s,t) w(s) ds`, exactly.
pub fn bipoly_definite_integral_s(p: &PiecewiseBiPoly, weight: &UniPoly) -> UniPoly {
    let weighted_lower = &p.lower * &BiPoly::in_s(weight);
    let weighted_upper = &p.upper * &BiPoly::in_s(weight);

    let mut result = UniPoly::zero();
    // ∫₀ᵗ s^i ds = t^{i+1}/(i+1)
    for (&(i, j), c) in weighted_lower.terms() {
        let c = c / Rational::from_integer(BigInt::from(i + 1));
        result = &result + &UniPoly::monomial(c, i + j + 1);
    }
    // ∫ₜ¹ s^i ds = (1 − t^{i+1})/(i+1)
    for (&(i, j), c) in weighted_upper.terms() {
        let c = c / Rational::from_integer(BigInt::from(i + 1));
        result = &result + &UniPoly::monomial(c.clone(), j);
        result = &result - &UniPoly::monomial(c, i + j + 1);
    }
    result
}
