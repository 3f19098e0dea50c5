//! Covariances of `X_n` and of its bridges `Y = X_n | {X_j(1) = 0 : j ∈ J}`.
//!
//! For `s ≤ t`, `c_{X_n}(s,t) = Σ_k φ_k(s) ψ_k(t)` with
//! `φ_k(s) = (−1)^{n−1−k} s^{2n−1−k}/(2n−1−k)!` and `ψ_k(t) = t^k/k!`.
//! Conditioning replaces `ψ_k` by `ψ̃_k = ψ_k − Σ_j ψ_k^{(n−j)}(1) P_j`, where
//! the drift polynomials `P_j` solve the Gram system
//! `Σ_j E[X_j(1)X_k(1)] P_j(t) = E[X_n(t)X_k(1)]`, `k ∈ J`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    binomial, factorial, inv_factorial, sign_pow, solve_linear, BiPoly, PiecewiseBiPoly, RatMatrix,
    Rational, UniPoly,
};
use crate::index_sets::IndexSetJ;

/// Order `n ≥ 1` of the iterated integral: `X_1` is Brownian motion and
/// `X_{k+1}(t) = ∫₀ᵗ X_k(u) du`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProcessOrder(usize);

impl ProcessOrder {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("order n must be at least 1".into()));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

fn order_of(j: &IndexSetJ) -> ProcessOrder {
    ProcessOrder(j.n())
}

fn inv_fact(m: usize) -> Rational {
    inv_factorial(m as i64)
}

/// `(φ_k, ψ_k)` for `k = 0..n−1`.
pub fn phi_psi(n: ProcessOrder) -> (Vec<UniPoly>, Vec<UniPoly>) {
    let n = n.get();
    let phi = (0..n)
        .map(|k| {
            let m = 2 * n - 1 - k;
            UniPoly::monomial(sign_pow(n - 1 - k) * inv_fact(m), m)
        })
        .collect();
    let psi = (0..n).map(|k| UniPoly::monomial(inv_fact(k), k)).collect();
    (phi, psi)
}

/// Covariance of `X_n`.
pub fn cov_xn(n: ProcessOrder) -> PiecewiseBiPoly {
    let (phi, psi) = phi_psi(n);
    let lower = phi
        .iter()
        .zip(&psi)
        .fold(BiPoly::zero(), |acc, (f, g)| &acc + &BiPoly::outer(f, g));
    PiecewiseBiPoly::symmetric(lower)
}

/// `∫₀ˢ (s−u)^{j−1}/(j−1)! (t−u)^{k−1}/(k−1)! du` for `s ≤ t`, expanding
/// `(t−u)^{k−1} = Σ_m C(k−1,m) (t−s)^{k−1−m} (s−u)^m`.
fn cross_cov_lower(j: usize, k: usize) -> BiPoly {
    let scale = Rational::new(BigInt::one(), factorial(j - 1) * factorial(k - 1));
    let mut acc = BiPoly::zero();
    for m in 0..k {
        let c = Rational::new(binomial(k - 1, m), BigInt::from(j + m));
        let s_part = BiPoly::term(c, j + m, 0);
        acc = &acc + &(&s_part * &BiPoly::t_minus_s_pow(k - 1 - m));
    }
    acc.scale(&scale)
}

/// `E[X_j(s) X_k(t)]` for `1 ≤ j, k ≤ n`.
pub fn cross_cov(n: ProcessOrder, j: usize, k: usize) -> Result<PiecewiseBiPoly> {
    let n = n.get();
    if !(1..=n).contains(&j) || !(1..=n).contains(&k) {
        return Err(Error::DimensionMismatch(format!(
            "cross-covariance orders ({j}, {k}) outside 1..={n}"
        )));
    }
    Ok(
        PiecewiseBiPoly::new(cross_cov_lower(j, k), cross_cov_lower(k, j).swap())
            .expect("both pieces integrate over [0, s∧t]"),
    )
}

/// `t ↦ E[X_n(t) X_k(1)]` on `[0, 1]`.
pub fn terminal_cov(n: ProcessOrder, k: usize) -> UniPoly {
    cross_cov_lower(n.get(), k).at_t(&Rational::one())
}

/// `E[X_j(1) X_k(1)] = 1/((j−1)!(k−1)!(j+k−1))` over `j, k ∈ J`.
pub fn gram_matrix(j_set: &IndexSetJ) -> Result<RatMatrix> {
    if j_set.is_empty() {
        return Err(Error::EmptyJ);
    }
    let e = j_set.elems();
    Ok(RatMatrix::from_fn(e.len(), e.len(), |a, b| {
        let (j, k) = (e[a], e[b]);
        Rational::new(
            BigInt::one(),
            factorial(j - 1) * factorial(k - 1) * BigInt::from(j + k - 1),
        )
    }))
}

/// Drift polynomials `P_j`, `j ∈ J`, from the Gram system.
pub fn drift_polys(j_set: &IndexSetJ) -> BTreeMap<usize, UniPoly> {
    if j_set.is_empty() {
        return BTreeMap::new();
    }
    let n = order_of(j_set);
    let e = j_set.elems();
    let gram = gram_matrix(j_set).expect("nonempty J");
    let width = 2 * n.get();
    let rhs_polys: Vec<UniPoly> = e.iter().map(|&k| terminal_cov(n, k)).collect();
    let rhs = RatMatrix::from_fn(e.len(), width, |r, c| rhs_polys[r].coeff(c));
    let sol = solve_linear(&gram, &rhs).expect("Gram matrix is positive definite");
    e.iter()
        .enumerate()
        .map(|(r, &j)| (j, UniPoly::from_coeffs(sol.row(r).to_vec())))
        .collect()
}

fn psi_tilde_from(n: ProcessOrder, drift: &BTreeMap<usize, UniPoly>) -> Vec<UniPoly> {
    let (_, psi) = phi_psi(n);
    let n = n.get();
    let one = Rational::one();
    psi.into_iter()
        .map(|psi_k| {
            drift.iter().fold(psi_k.clone(), |acc, (&j, p)| {
                let weight = psi_k.eval_derivative(n - j, &one);
                if weight.is_zero() {
                    acc
                } else {
                    &acc - &p.scale(&weight)
                }
            })
        })
        .collect()
}

/// `ψ̃_k`, `k = 0..n−1`.
pub fn psi_tilde(j_set: &IndexSetJ) -> Vec<UniPoly> {
    psi_tilde_from(order_of(j_set), &drift_polys(j_set))
}

fn cov_from_psi_tilde(n: ProcessOrder, psi_tilde: &[UniPoly]) -> PiecewiseBiPoly {
    let (phi, _) = phi_psi(n);
    let lower = phi
        .iter()
        .zip(psi_tilde)
        .fold(BiPoly::zero(), |acc, (f, g)| &acc + &BiPoly::outer(f, g));
    PiecewiseBiPoly::symmetric(lower)
}

/// Covariance of the bridge.
pub fn cov_bridge(j_set: &IndexSetJ) -> PiecewiseBiPoly {
    let n = order_of(j_set);
    cov_from_psi_tilde(n, &psi_tilde(j_set))
}

/// `Q(s,t) = Σ_j E[X_n(s)X_j(1)] P_j(t)`, so that `c_Y = c_{X_n} − Q`.
pub fn q_polynomial(j_set: &IndexSetJ) -> PiecewiseBiPoly {
    let n = order_of(j_set);
    let q = drift_polys(j_set)
        .iter()
        .fold(BiPoly::zero(), |acc, (&j, p)| {
            &acc + &BiPoly::outer(&terminal_cov(n, j), p)
        });
    PiecewiseBiPoly::uniform(q)
}

/// `Σ_k [φ_k ψ_k^{(i)} − φ_k^{(i)} ψ_k]`, which must be the constant
/// `(−1)^n δ_{i,2n−1}`.
pub fn wronskian_sum_check(n: ProcessOrder, i: usize) -> Result<Rational> {
    let (phi, psi) = phi_psi(n);
    let sum = phi.iter().zip(&psi).fold(UniPoly::zero(), |acc, (f, g)| {
        &(&acc + &(f * &g.derivative(i))) - &(&f.derivative(i) * g)
    });
    if !sum.is_constant() {
        return Err(Error::NonConstant(sum.to_plain("t")));
    }
    Ok(sum.coeff(0))
}

/// Everything needed to describe one bridge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeModel {
    pub n: usize,
    #[serde(rename = "J")]
    pub j: IndexSetJ,
    pub drift: BTreeMap<usize, UniPoly>,
    pub psi_tilde: Vec<UniPoly>,
    pub cov: PiecewiseBiPoly,
}

impl BridgeModel {
    pub fn new(j_set: &IndexSetJ) -> Self {
        let n = order_of(j_set);
        let drift = drift_polys(j_set);
        let psi_tilde = psi_tilde_from(n, &drift);
        let cov = cov_from_psi_tilde(n, &psi_tilde);
        Self {
            n: n.get(),
            j: j_set.clone(),
            drift,
            psi_tilde,
            cov,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Bridge as a drift-corrected process: `Y(t) = X_n(t) − Σ_j P_j(t) X_j(1)`.
    pub fn representation_plain(&self) -> String {
        let mut out = format!("Y(t) = X_{}(t)", self.n);
        for (j, p) in &self.drift {
            out.push_str(&format!(" - ({}) X_{j}(1)", p.to_plain("t")));
        }
        out
    }

    pub fn to_plain(&self) -> String {
        let mut lines = vec![
            format!("n = {}, J = {}", self.n, self.j),
            self.representation_plain(),
        ];
        for (j, p) in &self.drift {
            lines.push(format!("P_{j}(t) = {}", p.to_plain("t")));
        }
        for (k, p) in self.psi_tilde.iter().enumerate() {
            lines.push(format!("psi~_{k}(t) = {}", p.to_plain("t")));
        }
        lines.push(format!(
            "c(s,t) = {}    (s <= t)",
            self.cov.lower().to_plain()
        ));
        lines.push(format!(
            "c(s,t) = {}    (s >= t)",
            self.cov.upper().to_plain()
        ));
        lines.join("\n")
    }

    pub fn to_latex(&self) -> String {
        let mut rep = format!("Y(t) = X_{{{}}}(t)", self.n);
        for (j, p) in &self.drift {
            rep.push_str(&format!(
                " - \\left({}\\right) X_{{{j}}}(1)",
                p.to_latex("t")
            ));
        }
        let mut lines = vec![rep];
        for (j, p) in &self.drift {
            lines.push(format!("P_{{{j}}}(t) = {}", p.to_latex("t")));
        }
        for (k, p) in self.psi_tilde.iter().enumerate() {
            lines.push(format!("\\tilde\\psi_{{{k}}}(t) = {}", p.to_latex("t")));
        }
        lines.push(format!(
            "c(s,t) = {} \\quad (s \\le t)",
            self.cov.lower().to_latex()
        ));
        lines.join(" \\\\\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::hermite::{hermite_basis, hermite_solve, HermiteSpec};
    use crate::index_sets::j_to_i;

    fn order(n: usize) -> ProcessOrder {
        ProcessOrder::new(n).unwrap()
    }

    fn jset(n: usize, e: &[usize]) -> IndexSetJ {
        IndexSetJ::new(n, e).unwrap()
    }

    fn poly(coeffs: &[Rational]) -> UniPoly {
        UniPoly::from_coeffs(coeffs.to_vec())
    }

    #[test]
    fn phi_psi_examples() {
        let (phi, psi) = phi_psi(order(1));
        assert_eq!(phi, vec![UniPoly::x()]);
        assert_eq!(psi, vec![UniPoly::one()]);

        let (phi, psi) = phi_psi(order(2));
        assert_eq!(
            phi,
            vec![
                UniPoly::monomial(rat(-1, 6), 3),
                UniPoly::monomial(rat(1, 2), 2)
            ]
        );
        assert_eq!(psi, vec![UniPoly::one(), UniPoly::x()]);

        let (phi, _) = phi_psi(order(3));
        assert_eq!(phi[0], UniPoly::monomial(rat(1, 120), 5));
    }

    #[test]
    fn cov_xn_examples() {
        assert_eq!(cov_xn(order(1)).lower(), &BiPoly::term(int(1), 1, 0));
        let c2 = cov_xn(order(2));
        let expected = BiPoly::from_terms([((2, 1), rat(1, 2)), ((3, 0), rat(-1, 6))]);
        assert_eq!(c2.lower(), &expected);
        assert_eq!(c2.eval(&rat(1, 2), &rat(1, 2)), rat(1, 24));
        assert!(c2.is_symmetric());
    }

    #[test]
    fn cov_xn_matches_cross_cov() {
        for n in 1..=6 {
            assert_eq!(cov_xn(order(n)), cross_cov(order(n), n, n).unwrap());
        }
    }

    #[test]
    fn cross_cov_examples() {
        let c = cross_cov(order(1), 1, 1).unwrap();
        assert_eq!(c.lower(), &BiPoly::term(int(1), 1, 0));
        let c = cross_cov(order(2), 1, 2).unwrap();
        let expected = BiPoly::from_terms([((1, 1), int(1)), ((2, 0), rat(-1, 2))]);
        assert_eq!(c.lower(), &expected);
        assert!(cross_cov(order(2), 0, 1).is_err());
        assert!(cross_cov(order(2), 1, 3).is_err());
    }

    #[test]
    fn cross_cov_transpose_symmetry() {
        for n in 1..=5 {
            for j in 1..=n {
                for k in 1..=n {
                    let a = cross_cov(order(n), j, k).unwrap();
                    let b = cross_cov(order(n), k, j).unwrap();
                    assert_eq!(a.transpose(), b);
                }
            }
        }
    }

    #[test]
    fn terminal_derivatives() {
        let one = int(1);
        for n in 1..=6 {
            for k in 1..=n {
                let p = terminal_cov(order(n), k);
                for i in n..2 * n {
                    let expected = if i == k + n - 1 {
                        sign_pow(k - 1)
                    } else {
                        int(0)
                    };
                    assert_eq!(p.eval_derivative(i, &one), expected, "n={n} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn gram_examples() {
        assert_eq!(gram_matrix(&jset(2, &[1])).unwrap(), RatMatrix::identity(1));
        assert_eq!(
            gram_matrix(&jset(2, &[1, 2])).unwrap(),
            RatMatrix::from_rows(vec![vec![int(1), rat(1, 2)], vec![rat(1, 2), rat(1, 3)]])
                .unwrap()
        );
        assert_eq!(
            gram_matrix(&jset(2, &[2])).unwrap(),
            RatMatrix::from_rows(vec![vec![rat(1, 3)]]).unwrap()
        );
        assert_eq!(
            gram_matrix(&IndexSetJ::empty(2).unwrap()),
            Err(Error::EmptyJ)
        );
    }

    #[test]
    fn gram_positive_definite() {
        for n in 1..=6 {
            for j in IndexSetJ::all(n).unwrap().iter().filter(|j| !j.is_empty()) {
                let minors = gram_matrix(j).unwrap().leading_principal_minors().unwrap();
                assert!(minors.iter().all(|m| *m > int(0)), "J={j}");
            }
        }
    }

    #[test]
    fn drift_examples() {
        let d = drift_polys(&jset(2, &[1]));
        assert_eq!(d[&1], UniPoly::monomial(rat(1, 2), 2));

        let d = drift_polys(&jset(2, &[1, 2]));
        assert_eq!(d[&1], UniPoly::from_i64(&[0, 0, -1, 1]));
        assert_eq!(d[&2], UniPoly::from_i64(&[0, 0, 3, -2]));

        let d = drift_polys(&jset(2, &[2]));
        assert_eq!(d[&2], poly(&[int(0), int(0), rat(3, 2), rat(-1, 2)]));

        assert!(drift_polys(&IndexSetJ::empty(3).unwrap()).is_empty());
    }

    #[test]
    fn drift_agrees_with_hermite_basis() {
        for n in 1..=5 {
            for j in IndexSetJ::all(n).unwrap() {
                let basis = hermite_basis(&j_to_i(&j));
                for (jj, p) in drift_polys(&j) {
                    assert_eq!(p, basis[&(n - jj)], "n={n} J={j} j={jj}");
                }
            }
        }
    }

    #[test]
    fn psi_tilde_examples() {
        let empty = psi_tilde(&IndexSetJ::empty(3).unwrap());
        assert_eq!(empty, phi_psi(order(3)).1);

        let pt = psi_tilde(&jset(2, &[1, 2]));
        assert_eq!(pt[0], UniPoly::from_i64(&[1, 0, -3, 2]));
        assert_eq!(pt[1], UniPoly::from_i64(&[0, 1, -2, 1]));
    }

    #[test]
    fn psi_tilde_agrees_with_hermite_solve() {
        for n in 1..=5 {
            for j in IndexSetJ::all(n).unwrap() {
                let set = j_to_i(&j);
                for (k, p) in psi_tilde(&j).into_iter().enumerate() {
                    let a = (0..n)
                        .map(|i| if i == k { int(1) } else { int(0) })
                        .collect();
                    let b = vec![int(0); n];
                    let spec = HermiteSpec::from_lists(set.clone(), a, b).unwrap();
                    assert_eq!(p, hermite_solve(&spec), "n={n} J={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn bridge_cov_examples() {
        let c = cov_bridge(&jset(1, &[1]));
        let expected = BiPoly::from_terms([((1, 0), int(1)), ((1, 1), int(-1))]);
        assert_eq!(c.lower(), &expected);

        let c = cov_bridge(&jset(2, &[1]));
        let expected = BiPoly::from_terms([
            ((2, 1), rat(1, 2)),
            ((3, 0), rat(-1, 6)),
            ((2, 2), rat(-1, 4)),
        ]);
        assert_eq!(c.lower(), &expected);

        // s²(1−t)²(3t − s − 2st)/6
        let s2 = BiPoly::term(int(1), 2, 0);
        let one_minus_t_sq = BiPoly::in_t(&UniPoly::from_i64(&[1, -2, 1]));
        let last = BiPoly::from_terms([((0, 1), int(3)), ((1, 0), int(-1)), ((1, 1), int(-2))]);
        let expected = (&(&s2 * &one_minus_t_sq) * &last).scale(&rat(1, 6));
        assert_eq!(cov_bridge(&jset(2, &[1, 2])).lower(), &expected);
    }

    #[test]
    fn q_examples() {
        assert!(q_polynomial(&IndexSetJ::empty(2).unwrap()).is_zero());
        assert_eq!(
            q_polynomial(&jset(2, &[1])).lower(),
            &BiPoly::term(rat(1, 4), 2, 2)
        );
        let three_minus = UniPoly::from_i64(&[0, 0, 3, -1]);
        let expected = BiPoly::outer(&three_minus, &three_minus).scale(&rat(1, 12));
        assert_eq!(q_polynomial(&jset(2, &[2])).lower(), &expected);
    }

    #[test]
    fn bridge_is_xn_minus_q() {
        for n in 1..=5 {
            for j in IndexSetJ::all(n).unwrap() {
                let c = cov_bridge(&j);
                assert!(c.is_symmetric(), "n={n} J={j}");
                let q = q_polynomial(&j);
                assert!(q.is_symmetric());
                assert_eq!(&cov_xn(order(n)) - &q, c, "n={n} J={j}");
            }
        }
    }

    #[test]
    fn diagonal_variance_nonnegative() {
        for n in 1..=4 {
            for j in IndexSetJ::all(n).unwrap() {
                let diag = cov_bridge(&j).lower().diagonal();
                for step in 0..=20 {
                    assert!(
                        diag.eval(&rat(step, 20)) >= int(0),
                        "n={n} J={j} t={step}/20"
                    );
                }
            }
        }
    }

    #[test]
    fn wronskian_examples() {
        assert_eq!(wronskian_sum_check(order(1), 0).unwrap(), int(0));
        assert_eq!(wronskian_sum_check(order(1), 1).unwrap(), int(-1));
        assert_eq!(wronskian_sum_check(order(3), 5).unwrap(), int(-1));
        for n in 1..=6 {
            for i in 0..2 * n {
                let expected = if i == 2 * n - 1 { sign_pow(n) } else { int(0) };
                assert_eq!(wronskian_sum_check(order(n), i).unwrap(), expected);
            }
        }
    }

    #[test]
    fn model_round_trips_through_json() {
        let model = BridgeModel::new(&jset(3, &[1, 3]));
        assert_eq!(BridgeModel::from_json(&model.to_json()).unwrap(), model);
        assert!(model.to_latex().contains("X_{3}(t)"));
        assert!(model.to_plain().starts_with("n = 3, J = {1,3}"));
    }

    #[test]
    fn zero_order_rejected() {
        assert!(ProcessOrder::new(0).is_err());
    }

    #[test]
    fn bridge_covariance_is_positive_semidefinite() {
        let grid: Vec<f64> = (1..=12).map(|k| k as f64 / 13.0).collect();
        for n in 1..=3 {
            for j in IndexSetJ::all(n).unwrap() {
                let cov = cov_bridge(&j);
                let m = nalgebra::DMatrix::from_fn(grid.len(), grid.len(), |a, b| {
                    cov.eval_f64(grid[a], grid[b])
                });
                let min = m.symmetric_eigen().eigenvalues.min();
                assert!(min >= -1e-10, "J={j}: {min}");
            }
        }
    }
}
