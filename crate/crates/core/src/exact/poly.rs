use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use super::{format_rational, parse_rational, pow, to_f64, Rational};
use crate::render::{format_terms, Style};

/// Univariate polynomial with rational coefficients; `coeffs[i]` multiplies
/// `t^i`. Trailing zeros are never stored, so the zero polynomial has an
/// empty coefficient list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The identity polynomial `t`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// `c * t^degree`
    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `order`-th derivative.
    pub fn derivative(&self, order: usize) -> Self {
        if order == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= order {
            return Self::zero();
        }
        let coeffs = (order..self.coeffs.len())
            .map(|i| {
                // i (i-1) ... (i-order+1)
                let falling: BigInt = ((i - order + 1)..=i).map(BigInt::from).product();
                &self.coeffs[i] * Rational::from_integer(falling)
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / Rational::from_integer(BigInt::from(i + 1)));
        }
        Self::from_coeffs(coeffs)
    }

    pub fn definite_integral(&self, lo: &Rational, hi: &Rational) -> Rational {
        let anti = self.antiderivative();
        anti.eval(hi) - anti.eval(lo)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// Value of the `order`-th derivative at `x`.
    pub fn eval_derivative(&self, order: usize, x: &Rational) -> Rational {
        self.derivative(order).eval(x)
    }

    /// `t ↦ p(scale * t + shift)`.
    pub fn compose_affine(&self, scale: &Rational, shift: &Rational) -> Self {
        let inner = Self::from_coeffs(vec![shift.clone(), scale.clone()]);
        let mut result = Self::zero();
        for c in self.coeffs.iter().rev() {
            result = &(&result * &inner) + &Self::constant(c.clone());
        }
        result
    }

    /// `t ↦ p(t / h)` for `h ≠ 0`.
    pub fn rescale(&self, h: &Rational) -> Self {
        let inv = h.recip();
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * pow(&inv, i))
                .collect(),
        )
    }

    pub fn to_plain(&self, var: &str) -> String {
        self.render(var, Style::Plain)
    }

    pub fn to_latex(&self, var: &str) -> String {
        self.render(var, Style::Latex)
    }

    fn render(&self, var: &str, style: Style) -> String {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .map(|(i, c)| (c, vec![(var, i)]));
        format_terms(terms, style)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain("t"))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;

    fn add(self, rhs: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;

    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;

    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;

    fn neg(self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for UniPoly {
            type Output = UniPoly;
            fn $method(self, rhs: UniPoly) -> UniPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for UniPoly {
    type Output = UniPoly;

    fn neg(self) -> UniPoly {
        -&self
    }
}

// Canonical JSON: nonzero terms as `[i, "num/den"]`, ascending degree.
impl Serialize for UniPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<(usize, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, format_rational(c)))
            .collect();
        terms.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for UniPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let terms = Vec::<(usize, String)>::deserialize(de)?;
        let len = terms.iter().map(|(i, _)| i + 1).max().unwrap_or(0);
        let mut coeffs = vec![Rational::zero(); len];
        for (i, text) in terms {
            coeffs[i] += parse_rational(&text).map_err(D::Error::custom)?;
        }
        Ok(Self::from_coeffs(coeffs))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn derivative_of_square() {
        let p = UniPoly::monomial(int(1), 2);
        assert_eq!(p.derivative(1), UniPoly::from_i64(&[0, 2]));
        assert_eq!(p.derivative(2), UniPoly::from_i64(&[2]));
        assert_eq!(p.derivative(3), UniPoly::zero());
    }

    #[test]
    fn rescale_square() {
        // t² with t ↦ t/(1 − 1/2)
        let p = UniPoly::monomial(int(1), 2);
        let h = int(1) - rat(1, 2);
        assert_eq!(p.rescale(&h), UniPoly::monomial(int(4), 2));
        assert_eq!(
            p.compose_affine(&int(2), &int(0)),
            UniPoly::monomial(int(4), 2)
        );
    }

    #[test]
    fn integral_of_three_t_squared() {
        let p = UniPoly::monomial(int(3), 2);
        assert_eq!(p.antiderivative().coeff(0), int(0));
        assert_eq!(p.definite_integral(&int(0), &int(1)), int(1));
    }

    #[test]
    fn zero_degree_sentinel() {
        assert_eq!(UniPoly::zero().degree(), None);
        assert_eq!(UniPoly::from_i64(&[1, 0, 0]).degree(), Some(0));
        assert!(UniPoly::from_coeffs(vec![int(0), int(0)]).is_zero());
    }

    #[test]
    fn compose_shift() {
        // (t + 1)^2 = t^2 + 2t + 1
        let p = UniPoly::monomial(int(1), 2);
        assert_eq!(
            p.compose_affine(&int(1), &int(1)),
            UniPoly::from_i64(&[1, 2, 1])
        );
    }

    #[test]
    fn display_forms() {
        let p = UniPoly::from_coeffs(vec![int(0), int(-1), rat(1, 2)]);
        assert_eq!(p.to_string(), "1/2 t^2 - t");
        assert_eq!(p.to_latex("x"), "\\frac{1}{2} x^{2} - x");
    }

    #[test]
    fn json_form() {
        let p = UniPoly::from_coeffs(vec![rat(1, 3), int(0), int(-2)]);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"[[0,"1/3"],[2,"-2/1"]]"#);
        let back: UniPoly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    pub(crate) fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| rat(n, d))
    }

    pub(crate) fn arb_poly(max_len: usize) -> impl Strategy<Value = UniPoly> {
        proptest::collection::vec(arb_rational(), 0..max_len).prop_map(UniPoly::from_coeffs)
    }

    proptest! {
        #[test]
        fn derivative_undoes_antiderivative(p in arb_poly(8)) {
            prop_assert_eq!(p.antiderivative().derivative(1), p);
        }

        #[test]
        fn product_rule(p in arb_poly(6), q in arb_poly(6)) {
            let lhs = (&p * &q).derivative(1);
            let rhs = &(&p.derivative(1) * &q) + &(&p * &q.derivative(1));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn compose_matches_pointwise(p in arb_poly(6), a in arb_rational(), b in arb_rational(), x in arb_rational()) {
            let composed = p.compose_affine(&a, &b);
            prop_assert_eq!(composed.eval(&x), p.eval(&(&a * &x + &b)));
        }

        #[test]
        fn json_roundtrip(p in arb_poly(8)) {
            let text = serde_json::to_string(&p).unwrap();
            let back: UniPoly = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
