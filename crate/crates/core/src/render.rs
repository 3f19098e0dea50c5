//! Text and LaTeX rendering of polynomial terms.
//!
//! Terms are written in the order supplied by the caller; bivariate
//! polynomials feed them in pure lexicographic order with `s > t`
//! (descending power of `s`, then of `t`).

use num_traits::{One, Signed, Zero};

use crate::exact::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Plain,
    Latex,
}

pub(crate) fn format_terms<'a, I>(terms: I, style: Style) -> String
where
    I: IntoIterator<Item = (&'a Rational, Vec<(&'a str, usize)>)>,
{
    let mut out = String::new();
    for (coeff, vars) in terms {
        if coeff.is_zero() {
            continue;
        }
        let negative = coeff.is_negative();
        match (out.is_empty(), negative) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        let magnitude = coeff.abs();
        let monomial: Vec<String> = vars
            .iter()
            .filter(|(_, p)| *p > 0)
            .map(|(v, p)| match (style, *p) {
                (_, 1) => (*v).to_string(),
                (Style::Plain, p) => format!("{v}^{p}"),
                (Style::Latex, p) => format!("{v}^{{{p}}}"),
            })
            .collect();
        let show_coeff = monomial.is_empty() || !magnitude.is_one();
        if show_coeff {
            out.push_str(&coefficient(&magnitude, style));
            if !monomial.is_empty() {
                out.push(' ');
            }
        }
        out.push_str(&monomial.join(" "));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn coefficient(r: &Rational, style: Style) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    match style {
        Style::Plain => format!("{}/{}", r.numer(), r.denom()),
        Style::Latex => format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom()),
    }
}
