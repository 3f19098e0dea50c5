#![allow(dead_code)]

use std::io::Write;

use num_traits::{One, Zero};
use polybridge_core::exact::{
    binomial, inv_factorial, rat, solve_linear, BiPoly, RatMatrix, Rational, UniPoly,
};
use polybridge_core::hermite::HermiteSpec;
use polybridge_core::index_sets::IndexSetI;
use rand::Rng;

/// Solves the full `2n × 2n` interpolation system by plain elimination:
/// rows `i < n` read `c_i = a_i`, rows `ι ∈ I` read `Σ_j c_j/(j−ι)! = b_ι`,
/// with `P(t) = Σ c_j t^j/j!`.
pub fn dense_hermite(spec: &HermiteSpec) -> UniPoly {
    let n = spec.n();
    let rows: Vec<usize> = (0..n).chain(spec.set().elems().iter().copied()).collect();
    let a = RatMatrix::from_fn(2 * n, 2 * n, |r, j| {
        if r < n {
            if j == r {
                Rational::one()
            } else {
                Rational::zero()
            }
        } else {
            inv_factorial(j as i64 - rows[r] as i64)
        }
    });
    let rhs = RatMatrix::column(
        spec.a()
            .iter()
            .cloned()
            .chain(spec.set().elems().iter().map(|i| spec.b()[i].clone()))
            .collect(),
    );
    let c = solve_linear(&a, &rhs).expect("interpolation system is regular");
    UniPoly::from_coeffs(
        (0..2 * n)
            .map(|j| &c[(j, 0)] * inv_factorial(j as i64))
            .collect(),
    )
}

/// Boundary correction `S(s) · (Mᵀ)⁻¹ · T(t)` with `M[r][k] = C(n+k, i_r)`,
/// `S_r(s) = (1−s)^{2n−1−i_r} / (i_r! (2n−1−i_r)!)` and `T_k(t) = t^{n+k}`.
pub fn session_correction(set: &IndexSetI) -> BiPoly {
    let n = set.n();
    let e = set.elems();
    let m = RatMatrix::from_fn(n, n, |r, k| Rational::from_integer(binomial(n + k, e[r])));
    let inv = m.transpose().inverse().expect("binomial matrix is regular");
    let one_minus_s = UniPoly::from_i64(&[1, -1]);
    let mut acc = BiPoly::zero();
    for (r, &i) in e.iter().enumerate() {
        let mut w =
            UniPoly::constant(inv_factorial(i as i64) * inv_factorial((2 * n - 1 - i) as i64));
        for _ in 0..(2 * n - 1 - i) {
            w = &w * &one_minus_s;
        }
        for k in 0..n {
            let t_part = UniPoly::monomial(Rational::one(), n + k);
            acc = &acc + &BiPoly::outer(&w.scale(&inv[(r, k)]), &t_part);
        }
    }
    acc
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.random_range(-20..=20), rng.random_range(1..=9))
}

pub fn random_poly<R: Rng>(rng: &mut R, max_degree: usize) -> UniPoly {
    let len = rng.random_range(0..=max_degree + 1);
    UniPoly::from_coeffs((0..len).map(|_| random_rational(rng)).collect())
}

pub fn random_set<R: Rng>(rng: &mut R, n: usize) -> IndexSetI {
    let mut pool: Vec<usize> = (0..2 * n).collect();
    let mut chosen = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.random_range(0..pool.len());
        chosen.push(pool.swap_remove(k));
    }
    IndexSetI::new(n, &chosen).expect("n distinct elements of 0..2n")
}

/// Writes straight to the process stdout so the line shows even when the
/// harness captures test output.
pub fn report(criterion: u32, passed: bool, summary: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    let line = format!("criterion {criterion:>2} [{status}] {summary}\n");
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}
