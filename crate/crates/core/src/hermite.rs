//! Two-point Hermite interpolation: all derivatives of order `< n` at 0 and
//! the derivative orders in `I` at 1.
//!
//! Writing `P(t) = Σ c_j t^j / j!`, the conditions at 0 fix `c_0..c_{n−1}`
//! directly. The remaining unknowns solve `A₀ x = rhs` with
//! `A₀[r][j] = 1/(n + j − i_r)!`, which is factored as `L·U` by a sequence of
//! unit bidiagonal column transforms.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{factorial, inv_factorial, RatMatrix, Rational, UniPoly};
use crate::index_sets::IndexSetI;

/// Interpolation data: `P^(i)(0) = a_i` for `i < n`, `P^(ι)(1) = b_ι` for `ι ∈ I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteSpec {
    set: IndexSetI,
    a: Vec<Rational>,
    b: BTreeMap<usize, Rational>,
}

impl HermiteSpec {
    pub fn new(set: IndexSetI, a: Vec<Rational>, b: BTreeMap<usize, Rational>) -> Result<Self> {
        let n = set.n();
        if a.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} values at 0, expected {n}",
                a.len()
            )));
        }
        if b.len() != n || b.keys().any(|k| !set.contains(*k)) {
            let keys: Vec<usize> = b.keys().copied().collect();
            return Err(Error::BadIndexSet(format!(
                "values at 1 given for orders {keys:?}, expected exactly {set}"
            )));
        }
        Ok(Self { set, a, b })
    }

    /// Conditions given positionally: `b[r]` is the value for the `r`-th
    /// smallest element of `I`.
    pub fn from_lists(set: IndexSetI, a: Vec<Rational>, b: Vec<Rational>) -> Result<Self> {
        if b.len() != set.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} values at 1, expected {}",
                b.len(),
                set.n()
            )));
        }
        let b = set.elems().iter().copied().zip(b).collect();
        Self::new(set, a, b)
    }

    pub fn n(&self) -> usize {
        self.set.n()
    }

    pub fn set(&self) -> &IndexSetI {
        &self.set
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn b(&self) -> &BTreeMap<usize, Rational> {
        &self.b
    }

    /// True when `p` meets every condition exactly.
    pub fn is_satisfied_by(&self, p: &UniPoly) -> bool {
        let zero = Rational::zero();
        let one = Rational::one();
        self.a
            .iter()
            .enumerate()
            .all(|(i, ai)| p.eval_derivative(i, &zero) == *ai)
            && self
                .b
                .iter()
                .all(|(&i, bi)| p.eval_derivative(i, &one) == *bi)
    }
}

/// `A₀[r][j] = 1/(n + j − i_r)!` with `1/m! = 0` for `m < 0`.
pub fn build_a0(set: &IndexSetI) -> RatMatrix {
    let n = set.n();
    let e = set.elems();
    RatMatrix::from_fn(n, n, |r, j| inv_factorial((n + j) as i64 - e[r] as i64))
}

/// `A₀ = L·U` with `L` lower and `U` upper triangular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LuFactors {
    pub l: RatMatrix,
    pub u: RatMatrix,
}

impl LuFactors {
    /// Solves `L·U·x = rhs` by forward then backward substitution.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.l.rows();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {}, expected {n}",
                rhs.len()
            )));
        }
        let mut y: Vec<Rational> = Vec::with_capacity(n);
        for (r, value) in rhs.iter().enumerate() {
            let mut acc = value.clone();
            for (c, yc) in y.iter().enumerate() {
                acc -= &self.l[(r, c)] * yc;
            }
            let d = &self.l[(r, r)];
            if d.is_zero() {
                return Err(Error::Singular);
            }
            y.push(acc / d);
        }
        let mut x = vec![Rational::zero(); n];
        for r in (0..n).rev() {
            let mut acc = y[r].clone();
            for (c, xc) in x.iter().enumerate().skip(r + 1) {
                acc -= &self.u[(r, c)] * xc;
            }
            let d = &self.u[(r, r)];
            if d.is_zero() {
                return Err(Error::Singular);
            }
            x[r] = acc / d;
        }
        Ok(x)
    }

    pub fn product(&self) -> RatMatrix {
        &self.l * &self.u
    }
}

/// Column transform `k` (1-based): column `j ≥ k` becomes
/// `C_j − coef_k(j)·C_{j−1}` with
/// `coef_k(j) = Π_{m<k}(n+j−i_m−1) / Π_{m≤k}(n+j−i_m)`.
fn column_transform(n: usize, e: &[usize], k: usize) -> RatMatrix {
    let mut u = RatMatrix::identity(n);
    for j in k..n {
        let shift = (n + j) as i64;
        let mut coef = Rational::one();
        for &im in &e[..k - 1] {
            coef *= Rational::from_integer((shift - im as i64 - 1).into());
        }
        for &im in &e[..k] {
            coef /= Rational::from_integer((shift - im as i64).into());
        }
        u[(j - 1, j)] = -coef;
    }
    u
}

/// Unit upper-triangular inverse by back-substitution.
fn invert_unit_upper(m: &RatMatrix) -> RatMatrix {
    let n = m.rows();
    let mut inv = RatMatrix::identity(n);
    for col in 0..n {
        for r in (0..col).rev() {
            let mut acc = Rational::zero();
            for c in (r + 1)..=col {
                acc -= &m[(r, c)] * &inv[(c, col)];
            }
            inv[(r, col)] = acc;
        }
    }
    inv
}

pub fn lu_factorize_a0(set: &IndexSetI) -> LuFactors {
    let n = set.n();
    let e = set.elems();
    let mut l = build_a0(set);
    let mut acc = RatMatrix::identity(n);
    for k in 1..n {
        let uk = column_transform(n, e, k);
        l = &l * &uk;
        acc = &acc * &uk;
    }
    LuFactors {
        l,
        u: invert_unit_upper(&acc),
    }
}

/// The unique polynomial of degree `≤ 2n − 1` meeting `spec`.
pub fn hermite_solve(spec: &HermiteSpec) -> UniPoly {
    let factors = lu_factorize_a0(spec.set());
    solve_with(spec, &factors)
}

fn solve_with(spec: &HermiteSpec, factors: &LuFactors) -> UniPoly {
    let rhs: Vec<Rational> = spec
        .set()
        .elems()
        .iter()
        .map(|&i| {
            let mut v = spec.b[&i].clone();
            for (j, aj) in spec.a.iter().enumerate() {
                v -= aj * inv_factorial(j as i64 - i as i64);
            }
            v
        })
        .collect();
    let tail = factors
        .solve(&rhs)
        .expect("A0 is regular for every index set of size n");
    let coeffs = spec
        .a
        .iter()
        .chain(tail.iter())
        .enumerate()
        .map(|(j, c)| c / Rational::from_integer(factorial(j)))
        .collect();
    UniPoly::from_coeffs(coeffs)
}

/// `R_ι` for `ι ∈ I`: zero data at 0 and `R_ι^(i)(1) = δ_{ι,i}`.
pub fn hermite_basis(set: &IndexSetI) -> BTreeMap<usize, UniPoly> {
    let n = set.n();
    let factors = lu_factorize_a0(set);
    set.elems()
        .iter()
        .map(|&iota| {
            let b = set
                .elems()
                .iter()
                .map(|&i| {
                    (
                        i,
                        if i == iota {
                            Rational::one()
                        } else {
                            Rational::zero()
                        },
                    )
                })
                .collect();
            let spec = HermiteSpec::new(set.clone(), vec![Rational::zero(); n], b)
                .expect("well-formed basis spec");
            (iota, solve_with(&spec, &factors))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn iset(n: usize, e: &[usize]) -> IndexSetI {
        IndexSetI::new(n, e).unwrap()
    }

    fn mat(rows: Vec<Vec<Rational>>) -> RatMatrix {
        RatMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn a0_examples() {
        assert_eq!(build_a0(&iset(1, &[0])), mat(vec![vec![int(1)]]));
        assert_eq!(
            build_a0(&iset(2, &[0, 1])),
            mat(vec![vec![rat(1, 2), rat(1, 6)], vec![int(1), rat(1, 2)]])
        );
        assert_eq!(
            build_a0(&iset(2, &[2, 3])),
            mat(vec![vec![int(1), int(1)], vec![int(0), int(1)]])
        );
    }

    #[test]
    fn lu_for_n1() {
        for iota in 0..2 {
            let f = lu_factorize_a0(&iset(1, &[iota]));
            assert_eq!(f.l, mat(vec![vec![inv_factorial(1 - iota as i64)]]));
            assert_eq!(f.u, RatMatrix::identity(1));
        }
    }

    #[test]
    fn lu_is_exact_and_triangular_up_to_order_8() {
        for n in 1..=8 {
            for set in IndexSetI::all(n).unwrap() {
                let f = lu_factorize_a0(&set);
                assert!(f.l.is_lower_triangular(), "L for {set}");
                assert!(f.u.is_upper_triangular(), "U for {set}");
                assert!(
                    f.l.diagonal().iter().all(|d| !d.is_zero()),
                    "L diag for {set}"
                );
                assert!(
                    f.u.diagonal().iter().all(|d| !d.is_zero()),
                    "U diag for {set}"
                );
                assert_eq!(f.product(), build_a0(&set), "LU for {set}");
            }
        }
    }

    fn spec(n: usize, e: &[usize], a: &[Rational], b: &[Rational]) -> HermiteSpec {
        HermiteSpec::from_lists(iset(n, e), a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            hermite_solve(&spec(1, &[0], &[int(0)], &[int(1)])),
            UniPoly::x()
        );
        assert_eq!(
            hermite_solve(&spec(2, &[0, 1], &[int(0), int(0)], &[int(0), int(1)])),
            UniPoly::from_i64(&[0, 0, -1, 1])
        );
        assert_eq!(
            hermite_solve(&spec(2, &[0, 2], &[int(0), int(0)], &[int(1), int(0)])),
            UniPoly::from_coeffs(vec![int(0), int(0), rat(3, 2), rat(-1, 2)])
        );
    }

    #[test]
    fn basis_examples() {
        let r = hermite_basis(&iset(1, &[0]));
        assert_eq!(r[&0], UniPoly::x());

        let r = hermite_basis(&iset(2, &[0, 3]));
        assert_eq!(r[&0], UniPoly::monomial(int(1), 2));
        assert_eq!(
            r[&3],
            UniPoly::from_coeffs(vec![int(0), int(0), rat(-1, 6), rat(1, 6)])
        );

        let set = iset(2, &[2, 3]);
        let r = hermite_basis(&set);
        for (&iota, p) in &r {
            assert!(p.degree().unwrap() <= 3);
            for &i in set.elems() {
                let expected = if i == iota { int(1) } else { int(0) };
                assert_eq!(p.eval_derivative(i, &int(1)), expected);
            }
            assert_eq!(p.eval_derivative(0, &int(0)), int(0));
            assert_eq!(p.eval_derivative(1, &int(0)), int(0));
        }
    }

    #[test]
    fn spec_validation() {
        let set = iset(2, &[0, 3]);
        assert!(HermiteSpec::from_lists(set.clone(), vec![int(0)], vec![int(0), int(0)]).is_err());
        let wrong: BTreeMap<usize, Rational> = [(0, int(1)), (2, int(1))].into_iter().collect();
        assert!(HermiteSpec::new(set, vec![int(0), int(0)], wrong).is_err());
    }

    fn arb_spec() -> impl Strategy<Value = HermiteSpec> {
        (1usize..=5)
            .prop_flat_map(|n| {
                let sets = IndexSetI::all(n).unwrap();
                let values = proptest::collection::vec((-20i64..20, 1i64..6), 2 * n);
                (proptest::sample::select(sets), values)
            })
            .prop_map(|(set, values)| {
                let n = set.n();
                let vals: Vec<Rational> = values.into_iter().map(|(p, q)| rat(p, q)).collect();
                HermiteSpec::from_lists(set, vals[..n].to_vec(), vals[n..].to_vec()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn solution_meets_conditions(spec in arb_spec()) {
            let p = hermite_solve(&spec);
            prop_assert!(p.degree().is_none_or(|d| d < 2 * spec.n()));
            prop_assert!(spec.is_satisfied_by(&p));
        }

        #[test]
        fn solve_is_linear(s1 in arb_spec(), seed in proptest::collection::vec((-20i64..20, 1i64..6), 10)) {
            let n = s1.n();
            let vals: Vec<Rational> = seed.into_iter().map(|(p, q)| rat(p, q)).collect();
            let s2 = HermiteSpec::from_lists(s1.set().clone(), vals[..n].to_vec(), vals[n..2 * n].to_vec()).unwrap();
            let sum = HermiteSpec::new(
                s1.set().clone(),
                s1.a().iter().zip(s2.a()).map(|(x, y)| x + y).collect(),
                s1.b().iter().map(|(k, v)| (*k, v + &s2.b()[k])).collect(),
            ).unwrap();
            prop_assert_eq!(hermite_solve(&sum), hermite_solve(&s1) + hermite_solve(&s2));
        }
    }
}
