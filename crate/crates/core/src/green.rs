//! Green functions of `v^(2n) = (−1)^n u` on `[0, 1]` with
//! `v^(i)(0) = 0` for `i < n` and `v^(ι)(1) = 0` for `ι ∈ I`.
//!
//! With `σ = (−1)^n` and `R_ι` the Hermite basis for `I`,
//!
//! ```text
//! G_I(s,t) = σ 1{s ≤ t} (t−s)^{2n−1}/(2n−1)! − σ Σ_ι (1−s)^{2n−1−ι}/(2n−1−ι)! R_ι(t)
//! ```
//!
//! and `v(t) = ∫₀¹ G_I(s,t) u(s) ds`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{inv_factorial, sign_pow, BiPoly, PiecewiseBiPoly, Rational, UniPoly};
use crate::hermite::hermite_basis;
use crate::index_sets::{dual_set, IndexSetI};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreenFunction {
    pub n: usize,
    #[serde(rename = "I")]
    pub set: IndexSetI,
    pub piece: PiecewiseBiPoly,
    pub basis: BTreeMap<usize, UniPoly>,
}

impl GreenFunction {
    pub fn is_symmetric(&self) -> bool {
        self.piece.is_symmetric()
    }
}

/// `Σ_ι (1−s)^{2n−1−ι}/(2n−1−ι)! R_ι(t)`
fn boundary_correction(n: usize, basis: &BTreeMap<usize, UniPoly>) -> BiPoly {
    let one_minus_s = UniPoly::from_i64(&[1, -1]);
    basis.iter().fold(BiPoly::zero(), |acc, (&iota, r)| {
        let m = 2 * n - 1 - iota;
        let mut weight = UniPoly::constant(inv_factorial(m as i64));
        for _ in 0..m {
            weight = &weight * &one_minus_s;
        }
        &acc + &BiPoly::outer(&weight, r)
    })
}

pub fn green_function(set: &IndexSetI) -> GreenFunction {
    let n = set.n();
    let sigma = sign_pow(n);
    let basis = hermite_basis(set);
    let upper = boundary_correction(n, &basis).scale(&-&sigma);
    let jump = BiPoly::t_minus_s_pow(2 * n - 1).scale(&(&sigma * inv_factorial(2 * n as i64 - 1)));
    let lower = &jump + &upper;
    GreenFunction {
        n,
        set: set.clone(),
        piece: PiecewiseBiPoly::new(lower, upper).expect("the jump term vanishes on s = t"),
        basis,
    }
}

pub fn is_symmetric(g: &GreenFunction) -> bool {
    g.is_symmetric()
}

/// `G₁(s,t) = G₂(t,s)` on both pieces.
pub fn check_duality(g1: &GreenFunction, g2: &GreenFunction) -> bool {
    g1.n == g2.n && g1.piece == g2.piece.transpose()
}

/// `G_{I₁} − G_{I₂}`
pub fn green_difference(i1: &IndexSetI, i2: &IndexSetI) -> Result<PiecewiseBiPoly> {
    if i1.n() != i2.n() {
        return Err(Error::DimensionMismatch(format!(
            "sets of orders {} and {}",
            i1.n(),
            i2.n()
        )));
    }
    Ok(&green_function(i1).piece - &green_function(i2).piece)
}

/// `v(t) = ∫₀¹ G_I(s,t) u(s) ds`
pub fn bvp_solve(set: &IndexSetI, u: &UniPoly) -> UniPoly {
    green_function(set).piece.integrate_s(u)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BvpReport {
    /// `v^(2n) − (−1)^n u`
    pub ode_residual: UniPoly,
    /// `v^(i)(0)` for `i < n`
    #[serde(with = "rational_list")]
    pub bc0_values: Vec<Rational>,
    /// `v^(ι)(1)` for `ι ∈ I`, ascending
    #[serde(with = "rational_list")]
    pub bc1_values: Vec<Rational>,
    pub passed: bool,
}

mod rational_list {
    use crate::exact::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(de)?
            .iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}

pub fn bvp_verify(v: &UniPoly, u: &UniPoly, set: &IndexSetI) -> BvpReport {
    let n = set.n();
    let ode_residual = &v.derivative(2 * n) - &u.scale(&sign_pow(n));
    let zero = Rational::zero();
    let one = Rational::one();
    let bc0_values: Vec<Rational> = (0..n).map(|i| v.eval_derivative(i, &zero)).collect();
    let bc1_values: Vec<Rational> = set
        .elems()
        .iter()
        .map(|&i| v.eval_derivative(i, &one))
        .collect();
    let passed = ode_residual.is_zero()
        && bc0_values.iter().all(Zero::is_zero)
        && bc1_values.iter().all(Zero::is_zero);
    BvpReport {
        ode_residual,
        bc0_values,
        bc1_values,
        passed,
    }
}

/// Green function pair `(G_I, G_{dual(I)})` laid out the way a computer
/// algebra session would print it.
///
/// The session kernel omits the factor `σ = (−1)^n` and lists its `s > t`
/// branch with the arguments exchanged, so
/// `lower = σ·G_I(s,t)` for `s ≤ t` and `upper = σ·G_I(t,s)` for `s ≥ t`.
/// The difference lines are `σ·(G_I − G_{dual})` and its negative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreenReport {
    pub n: usize,
    #[serde(rename = "I1")]
    pub set: IndexSetI,
    pub lower: BiPoly,
    pub upper: BiPoly,
    pub symmetric: bool,
    #[serde(rename = "I2")]
    pub dual: IndexSetI,
    pub difference_lower: BiPoly,
    pub difference_upper: BiPoly,
    pub equality_lower: bool,
    pub equality_upper: bool,
}

impl GreenReport {
    pub fn new(set: &IndexSetI) -> Self {
        let n = set.n();
        let sigma = sign_pow(n);
        let dual = dual_set(set);
        let g1 = green_function(set);
        let g2 = green_function(&dual);
        let diff = g1.piece.upper() - g2.piece.upper();
        Self {
            n,
            set: set.clone(),
            lower: g1.piece.lower().scale(&sigma),
            upper: g1.piece.upper().swap().scale(&sigma),
            symmetric: g1.is_symmetric(),
            dual,
            difference_lower: diff.scale(&sigma),
            difference_upper: diff.scale(&-&sigma),
            equality_lower: *g1.piece.lower() == g2.piece.upper().swap(),
            equality_upper: *g2.piece.lower() == g1.piece.upper().swap(),
        }
    }

    pub fn passed(&self) -> bool {
        self.equality_lower && self.equality_upper
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_plain(&self) -> String {
        let list = |s: &IndexSetI| {
            let items: Vec<String> = s.elems().iter().map(usize::to_string).collect();
            format!("[{}]", items.join(","))
        };
        [
            format!(
                "value of n = {}, differentiating indices set I_1 = {}",
                self.n,
                list(&self.set)
            ),
            "Green function for s<t: GI_1(s,t) =".into(),
            format!("      {}", self.lower.to_plain()),
            "Green function for s>t: GI_1(s,t) =".into(),
            format!("      {}", self.upper.to_plain()),
            format!("symmetry test: GI_1(s,t)=GI_1(t,s)? = {}", self.symmetric),
            format!("complementary set of 2n+1-I_1: I_2 = {}", list(&self.dual)),
            "difference between the two Green functions for s<t:".into(),
            format!(
                "      GI_1(s,t)-GI_2(s,t) = {}",
                self.difference_lower.to_plain()
            ),
            "difference between the two Green functions for s>t:".into(),
            format!(
                "      GI_1(s,t)-GI_2(s,t) = {}",
                self.difference_upper.to_plain()
            ),
            format!(
                "equality test between the two Green functions for s<t: GI_1(s,t)=GI_2(t,s)? = {}",
                self.equality_lower
            ),
            format!(
                "equality test between the two Green functions for s>t: GI_1(s,t)=GI_2(t,s)? = {}",
                self.equality_upper
            ),
        ]
        .join("\n")
    }

    pub fn to_latex(&self) -> String {
        [
            format!("n = {},\\ I_1 = {}", self.n, latex_set(&self.set)),
            format!("G_{{I_1}}(s,t) = {} \\quad (s<t)", self.lower.to_latex()),
            format!("G_{{I_1}}(s,t) = {} \\quad (s>t)", self.upper.to_latex()),
            format!("I_2 = {}", latex_set(&self.dual)),
            format!(
                "G_{{I_1}}(s,t) - G_{{I_2}}(s,t) = {} \\quad (s<t)",
                self.difference_lower.to_latex()
            ),
            format!(
                "G_{{I_1}}(s,t) - G_{{I_2}}(s,t) = {} \\quad (s>t)",
                self.difference_upper.to_latex()
            ),
        ]
        .join(" \\\\\n")
    }
}

fn latex_set(s: &IndexSetI) -> String {
    let items: Vec<String> = s.elems().iter().map(usize::to_string).collect();
    format!("\\{{{}\\}}", items.join(","))
}
