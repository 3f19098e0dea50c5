//! Prediction decomposition of a bridge at time `t₀`:
//!
//! ```text
//! Y(t + t₀) = Ỹ_{t₀}(t) + Σ_i Q_{i,t₀}(t) Y^(i)(t₀),   t ∈ [0, 1 − t₀]
//! Ỹ_{t₀}(t) = X̃_n(t) − Σ_j P̃_{j,t₀}(t) X̃_j(1 − t₀)
//! ```
//!
//! where `X̃` is an independent copy of `X`. With `c = 1 − t₀`,
//! `P̃_{j,t₀}(t) = c^{n−j} P_j(t/c)` and `Q_{i,t₀}(t) = c^i ψ̃_i(t/c)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bridge::{drift_polys, psi_tilde};
use crate::error::{Error, Result};
use crate::exact::{display_rational, pow, serde_rational, Rational, UniPoly};
use crate::hermite::{hermite_solve, HermiteSpec};
use crate::index_sets::{j_to_i, IndexSetJ};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionModel {
    pub n: usize,
    #[serde(rename = "J")]
    pub j: IndexSetJ,
    #[serde(with = "serde_rational")]
    pub t0: Rational,
    /// `P̃_{j,t₀}` on the shifted clock `[0, 1 − t₀]`.
    pub p_tilde: BTreeMap<usize, UniPoly>,
    /// `Q_{i,t₀}` on the shifted clock.
    pub q: Vec<UniPoly>,
}

pub fn predict(j_set: &IndexSetJ, t0: &Rational) -> Result<PredictionModel> {
    if outside_horizon(t0) {
        return Err(Error::BadHorizon(display_rational(t0)));
    }
    let n = j_set.n();
    let c = Rational::one() - t0;
    let p_tilde = drift_polys(j_set)
        .into_iter()
        .map(|(j, p)| (j, p.rescale(&c).scale(&pow(&c, n - j))))
        .collect();
    let q = psi_tilde(j_set)
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.rescale(&c).scale(&pow(&c, i)))
        .collect();
    Ok(PredictionModel {
        n,
        j: j_set.clone(),
        t0: t0.clone(),
        p_tilde,
        q,
    })
}

fn outside_horizon(t0: &Rational) -> bool {
    *t0 < Rational::zero() || *t0 >= Rational::one()
}

/// Interpolant on `[0, c]` with `p^(ι)(0) = a_ι` and `p^(ι)(c) = b_ι`,
/// obtained on `[0, 1]` and mapped back by `t ↦ t/c`.
fn hermite_on_interval(
    j_set: &IndexSetJ,
    c: &Rational,
    a: &[Rational],
    b: &BTreeMap<usize, Rational>,
) -> UniPoly {
    let set = j_to_i(j_set);
    let a_unit = a.iter().enumerate().map(|(i, v)| v * pow(c, i)).collect();
    let b_unit = b.iter().map(|(&i, v)| (i, v * pow(c, i))).collect();
    let spec = HermiteSpec::new(set, a_unit, b_unit).expect("conditions match the index set");
    hermite_solve(&spec).rescale(c)
}

fn boundary_data(
    j_set: &IndexSetJ,
    at_zero: impl Fn(usize) -> bool,
    at_end: impl Fn(usize) -> bool,
) -> (Vec<Rational>, BTreeMap<usize, Rational>) {
    let n = j_set.n();
    let indicator = |flag: bool| {
        if flag {
            Rational::one()
        } else {
            Rational::zero()
        }
    };
    let a = (0..n).map(|i| indicator(at_zero(i))).collect();
    let b = j_to_i(j_set)
        .elems()
        .iter()
        .map(|&i| (i, indicator(at_end(i))))
        .collect();
    (a, b)
}

/// Checks the boundary systems on `[0, 1 − t₀]` exactly and compares each
/// polynomial with an independent Hermite reconstruction.
pub fn verify_prediction(m: &PredictionModel) -> bool {
    if outside_horizon(&m.t0) || m.q.len() != m.n || m.j.n() != m.n {
        return false;
    }
    let c = Rational::one() - &m.t0;
    let zero = Rational::zero();
    let set = j_to_i(&m.j);
    let drift_ok = m.j.elems().iter().all(|&j| {
        let Some(p) = m.p_tilde.get(&j) else {
            return false;
        };
        let (a, b) = boundary_data(&m.j, |_| false, |i| i == m.n - j);
        let conditions = a
            .iter()
            .enumerate()
            .all(|(i, v)| p.eval_derivative(i, &zero) == *v)
            && b.iter().all(|(&i, v)| p.eval_derivative(i, &c) == *v);
        conditions && *p == hermite_on_interval(&m.j, &c, &a, &b)
    });
    let q_ok = m.q.iter().enumerate().all(|(k, p)| {
        let (a, b) = boundary_data(&m.j, |i| i == k, |_| false);
        let conditions = a
            .iter()
            .enumerate()
            .all(|(i, v)| p.eval_derivative(i, &zero) == *v)
            && set
                .elems()
                .iter()
                .all(|&i| p.eval_derivative(i, &c).is_zero());
        conditions && *p == hermite_on_interval(&m.j, &c, &a, &b)
    });
    drift_ok && q_ok && m.p_tilde.len() == m.j.len()
}

impl PredictionModel {
    /// The same polynomials on the absolute clock `τ = t + t₀ ∈ [t₀, 1]`.
    pub fn to_absolute(&self) -> Self {
        let shift = -self.t0.clone();
        let one = Rational::one();
        Self {
            n: self.n,
            j: self.j.clone(),
            t0: self.t0.clone(),
            p_tilde: self
                .p_tilde
                .iter()
                .map(|(&j, p)| (j, p.compose_affine(&one, &shift)))
                .collect(),
            q: self
                .q
                .iter()
                .map(|p| p.compose_affine(&one, &shift))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn derivative_label(i: usize) -> String {
        match i {
            0 => "Y(t0)".into(),
            1 => "Y'(t0)".into(),
            _ => format!("Y^({i})(t0)"),
        }
    }

    pub fn to_plain(&self) -> String {
        let t0 = display_rational(&self.t0);
        let mut rep = "Y(t + t0) = Ytilde(t)".to_string();
        for (i, q) in self.q.iter().enumerate() {
            rep.push_str(&format!(
                " + ({}) {}",
                q.to_plain("t"),
                Self::derivative_label(i)
            ));
        }
        let mut lines = vec![format!("n = {}, J = {}, t0 = {t0}", self.n, self.j), rep];
        for (i, q) in self.q.iter().enumerate() {
            lines.push(format!("Q_{i}(t) = {}", q.to_plain("t")));
        }
        for (j, p) in &self.p_tilde {
            lines.push(format!("Ptilde_{j}(t) = {}", p.to_plain("t")));
        }
        lines.join("\n")
    }

    pub fn to_latex(&self) -> String {
        let mut rep = "Y(t+t_0) = \\tilde{Y}_{t_0}(t)".to_string();
        for (i, q) in self.q.iter().enumerate() {
            let label = match i {
                0 => "Y(t_0)".to_string(),
                1 => "Y'(t_0)".to_string(),
                _ => format!("Y^{{({i})}}(t_0)"),
            };
            rep.push_str(&format!(" + \\left({}\\right) {label}", q.to_latex("t")));
        }
        let mut lines = vec![rep];
        for (j, p) in &self.p_tilde {
            lines.push(format!("\\tilde{{P}}_{{{j},t_0}}(t) = {}", p.to_latex("t")));
        }
        lines.join(" \\\\\n")
    }
}
