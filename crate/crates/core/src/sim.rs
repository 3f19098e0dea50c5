//! Monte Carlo check of the exact covariances.
//!
//! The vector `(X_n, …, X_1)` is a linear SDE driven by one Brownian motion,
//! so each grid step is an exact Gaussian transition: a Taylor shift of the
//! state plus noise with covariance
//! `Σ_ab(h) = h^{a+b−1} / ((a−1)!(b−1)!(a+b−1))` between `X_a` and `X_b`.
//! Bridges are obtained from free paths by subtracting the random drift
//! `Σ_j P_j(t) X_j(1)`.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bridge::{cov_bridge, drift_polys};
use crate::error::{Error, Result};
use crate::exact::{factorial, pow, RatMatrix, Rational, UniPoly};
use crate::index_sets::IndexSetJ;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    /// Number of steps of the uniform grid on `[0, 1]`.
    pub steps: usize,
    pub num_paths: usize,
    pub seed: u64,
    #[serde(rename = "J")]
    pub j: IndexSetJ,
    /// Keep every `record_stride`-th grid time; must divide `steps`.
    pub record_stride: usize,
}

impl SimConfig {
    pub fn new(j: IndexSetJ, steps: usize, num_paths: usize, seed: u64) -> Self {
        Self {
            n: j.n(),
            steps,
            num_paths,
            seed,
            j,
            record_stride: 1,
        }
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.j.n() != self.n {
            return Err(Error::InvalidConfig(format!(
                "order {} does not match conditioning set {}",
                self.n, self.j
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidConfig("at least 2 steps required".into()));
        }
        if self.num_paths < 1 {
            return Err(Error::InvalidConfig("at least 1 path required".into()));
        }
        if self.record_stride == 0 || !self.steps.is_multiple_of(self.record_stride) {
            return Err(Error::InvalidConfig(format!(
                "record stride {} does not divide {} steps",
                self.record_stride, self.steps
            )));
        }
        Ok(())
    }

    fn recorded_len(&self) -> usize {
        self.steps / self.record_stride + 1
    }
}

/// Simulated states on the recorded grid. Component `i` of a state is the
/// `i`-th derivative of the top-order process, i.e. `X_{n−i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub config: SimConfig,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PathEnsemble {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn num_paths(&self) -> usize {
        self.config.num_paths
    }

    fn stride(&self) -> usize {
        self.times.len() * self.config.n
    }

    /// State of `path` at recorded time index `k`.
    pub fn state(&self, path: usize, k: usize) -> &[f64] {
        let n = self.config.n;
        let start = path * self.stride() + k * n;
        &self.values[start..start + n]
    }

    /// Top-order component along one path.
    pub fn top(&self, path: usize) -> Vec<f64> {
        (0..self.times.len())
            .map(|k| self.state(path, k)[0])
            .collect()
    }
}

/// `Σ(h)` with rows and columns ordered `X_1, …, X_n`.
pub fn noise_covariance(n: usize, h: &Rational) -> RatMatrix {
    RatMatrix::from_fn(n, n, |a, b| {
        let (a, b) = (a + 1, b + 1);
        pow(h, a + b - 1)
            / Rational::from_integer(factorial(a - 1) * factorial(b - 1) * BigInt::from(a + b - 1))
    })
}

/// Lower Cholesky factor of `Σ(h)` in derivative order (`X_n` first).
fn noise_factor(n: usize, h: &Rational) -> Result<DMatrix<f64>> {
    let exact = noise_covariance(n, h).to_f64();
    let reordered = DMatrix::from_fn(n, n, |i, k| exact[n - 1 - i][n - 1 - k]);
    reordered
        .cholesky()
        .map(|c| c.l())
        .ok_or_else(|| Error::InvalidConfig("noise covariance is not positive definite".into()))
}

/// `X_{n−i}(t+h) = Σ_m h^m/m! X_{n−i−m}(t)`, in derivative order.
fn taylor_shift(n: usize, h: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, k| {
        if k < i {
            0.0
        } else {
            let m = (k - i) as i32;
            h.powi(m) / (1..=m).map(f64::from).product::<f64>()
        }
    })
}

/// Free paths of `(X_n, …, X_1)`; path `p` uses stream `p` of a ChaCha8
/// generator keyed by the seed, so results do not depend on thread count.
pub fn simulate_xn(config: &SimConfig) -> Result<PathEnsemble> {
    config.validate()?;
    let n = config.n;
    let h = Rational::new(BigInt::from(1), BigInt::from(config.steps));
    let chol = noise_factor(n, &h)?;
    let shift = taylor_shift(n, 1.0 / config.steps as f64);
    let recorded = config.recorded_len();
    let times: Vec<f64> = (0..recorded)
        .map(|k| (k * config.record_stride) as f64 / config.steps as f64)
        .collect();
    let mut values = vec![0.0; config.num_paths * recorded * n];
    values
        .par_chunks_mut(recorded * n)
        .enumerate()
        .for_each(|(path, out)| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(path as u64);
            let mut state = DVector::<f64>::zeros(n);
            let mut xi = DVector::<f64>::zeros(n);
            for step in 1..=config.steps {
                for v in xi.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                state = &shift * &state + &chol * &xi;
                if step % config.record_stride == 0 {
                    let k = step / config.record_stride;
                    out[k * n..(k + 1) * n].copy_from_slice(state.as_slice());
                }
            }
        });
    Ok(PathEnsemble {
        config: config.clone(),
        times,
        values,
    })
}

/// Bridge paths `Y^(i)(t) = X_{n−i}(t) − Σ_j P_j^(i)(t) X_j(1)` for every
/// derivative order `i`.
pub fn make_bridge_paths(ens: &PathEnsemble, j_set: &IndexSetJ) -> Result<PathEnsemble> {
    let n = ens.config.n;
    if j_set.n() != n {
        return Err(Error::InvalidConfig(format!(
            "conditioning set {j_set} is for order {}, ensemble has order {n}",
            j_set.n()
        )));
    }
    let drift: Vec<(usize, Vec<UniPoly>)> = drift_polys(j_set)
        .into_iter()
        .map(|(j, p)| (j, (0..n).map(|i| p.derivative(i)).collect()))
        .collect();
    // table[k][i][r] = P_{j_r}^(i)(t_k)
    let table: Vec<Vec<Vec<f64>>> = ens
        .times
        .iter()
        .map(|&t| {
            (0..n)
                .map(|i| drift.iter().map(|(_, ds)| ds[i].eval_f64(t)).collect())
                .collect()
        })
        .collect();
    let last = ens.times.len() - 1;
    let stride = ens.stride();
    let mut values = ens.values.clone();
    values.par_chunks_mut(stride).for_each(|path| {
        let terminal: Vec<f64> = drift
            .iter()
            .map(|(j, _)| path[last * n + (n - j)])
            .collect();
        for (k, row) in table.iter().enumerate() {
            for (i, weights) in row.iter().enumerate() {
                let correction: f64 = weights.iter().zip(&terminal).map(|(w, x)| w * x).sum();
                path[k * n + i] -= correction;
            }
        }
    });
    let mut config = ens.config.clone();
    config.j = j_set.clone();
    Ok(PathEnsemble {
        config,
        times: ens.times.clone(),
        values,
    })
}

/// Largest `|Y^(n−j)(1)|` over paths and `j ∈ J`; zero up to rounding for a
/// correctly drift-corrected ensemble.
pub fn terminal_residual(bridge: &PathEnsemble) -> f64 {
    let n = bridge.config.n;
    let last = bridge.times.len() - 1;
    (0..bridge.num_paths())
        .flat_map(|p| {
            let state = bridge.state(p, last);
            bridge
                .config
                .j
                .elems()
                .iter()
                .map(move |&j| state[n - j].abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovComparison {
    pub num_paths: usize,
    pub grid: Vec<(f64, f64)>,
    pub empirical: Vec<f64>,
    pub exact: Vec<f64>,
    pub z_scores: Vec<f64>,
    pub max_abs_err: f64,
    pub max_z_score: f64,
}

impl CovComparison {
    pub fn passes(&self, z_cap: f64, abs_cap: f64) -> bool {
        self.max_z_score <= z_cap && self.max_abs_err <= abs_cap
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparison serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:>6} {:>6} {:>12} {:>12} {:>8}\n",
            "s", "t", "empirical", "exact", "z"
        );
        for (k, (s, t)) in self.grid.iter().enumerate() {
            out.push_str(&format!(
                "{s:>6.3} {t:>6.3} {:>12.6} {:>12.6} {:>8.3}\n",
                self.empirical[k], self.exact[k], self.z_scores[k]
            ));
        }
        out.push_str(&format!(
            "paths = {}, max |err| = {:.6}, max z = {:.3}",
            self.num_paths, self.max_abs_err, self.max_z_score
        ));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,t,empirical,exact,z\n");
        for (k, (s, t)) in self.grid.iter().enumerate() {
            out.push_str(&format!(
                "{s},{t},{},{},{}\n",
                self.empirical[k], self.exact[k], self.z_scores[k]
            ));
        }
        out
    }
}

/// Empirical `E[Y(s)Y(t)]` against the exact bridge covariance on the
/// interior recorded times, taking every `grid_stride`-th one.
pub fn compare_covariance(
    bridge: &PathEnsemble,
    j_set: &IndexSetJ,
    grid_stride: usize,
) -> Result<CovComparison> {
    let paths = bridge.num_paths();
    if paths < 2 {
        return Err(Error::InvalidConfig(format!(
            "{paths} path(s); at least 2 needed for a standard error"
        )));
    }
    if grid_stride == 0 {
        return Err(Error::InvalidConfig("grid stride must be positive".into()));
    }
    let cov = cov_bridge(j_set);
    let last = bridge.times.len() - 1;
    let idx: Vec<usize> = (grid_stride..last).step_by(grid_stride).collect();
    let tops: Vec<Vec<f64>> = (0..paths)
        .into_par_iter()
        .map(|p| idx.iter().map(|&k| bridge.state(p, k)[0]).collect())
        .collect();
    let count = paths as f64;
    let mut cmp = CovComparison {
        num_paths: paths,
        grid: Vec::new(),
        empirical: Vec::new(),
        exact: Vec::new(),
        z_scores: Vec::new(),
        max_abs_err: 0.0,
        max_z_score: 0.0,
    };
    for (a, &ka) in idx.iter().enumerate() {
        for (b, &kb) in idx.iter().enumerate() {
            let (s, t) = (bridge.times[ka], bridge.times[kb]);
            let (sum, sum_sq) = tops.iter().fold((0.0, 0.0), |(m, q), y| {
                let prod = y[a] * y[b];
                (m + prod, q + prod * prod)
            });
            let mean = sum / count;
            let var = (sum_sq - count * mean * mean) / (count - 1.0);
            let se = (var.max(0.0) / count).sqrt();
            let exact = cov.eval_f64(s, t);
            let err = (mean - exact).abs();
            let z = if se > 0.0 {
                err / se
            } else if err == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            cmp.grid.push((s, t));
            cmp.empirical.push(mean);
            cmp.exact.push(exact);
            cmp.z_scores.push(z);
            cmp.max_abs_err = cmp.max_abs_err.max(err);
            cmp.max_z_score = cmp.max_z_score.max(z);
        }
    }
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::{cross_cov, ProcessOrder};
    use crate::exact::{rat, to_f64};

    fn jset(n: usize, e: &[usize]) -> IndexSetJ {
        IndexSetJ::new(n, e).unwrap()
    }

    #[test]
    fn noise_matches_cross_covariance() {
        for n in 1..=3 {
            for h in [rat(1, 100), rat(1, 7), rat(1, 2)] {
                let sigma = noise_covariance(n, &h);
                for a in 1..=n {
                    for b in 1..=n {
                        let exact = cross_cov(ProcessOrder::new(n).unwrap(), a, b)
                            .unwrap()
                            .eval(&h, &h);
                        let float = to_f64(&sigma[(a - 1, b - 1)]);
                        assert!((float - to_f64(&exact)).abs() <= 1e-12 * to_f64(&exact).abs());
                    }
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        let j = jset(2, &[1]);
        assert!(SimConfig::new(j.clone(), 1, 10, 0).validate().is_err());
        assert!(SimConfig::new(j.clone(), 10, 0, 0).validate().is_err());
        assert!(SimConfig::new(j.clone(), 10, 5, 0)
            .with_record_stride(3)
            .validate()
            .is_err());
        assert!(SimConfig::new(j, 10, 5, 0)
            .with_record_stride(5)
            .validate()
            .is_ok());
    }

    #[test]
    fn starts_at_zero_and_is_deterministic() {
        let cfg = SimConfig::new(jset(3, &[]), 20, 4, 7);
        let a = simulate_xn(&cfg).unwrap();
        let b = simulate_xn(&cfg).unwrap();
        assert_eq!(a, b);
        for p in 0..4 {
            assert!(a.state(p, 0).iter().all(|&v| v == 0.0));
        }
        let other = simulate_xn(&SimConfig::new(jset(3, &[]), 20, 4, 8)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn stride_keeps_matching_states() {
        let full = simulate_xn(&SimConfig::new(jset(2, &[]), 20, 3, 1)).unwrap();
        let thin =
            simulate_xn(&SimConfig::new(jset(2, &[]), 20, 3, 1).with_record_stride(5)).unwrap();
        assert_eq!(thin.times().len(), 5);
        for p in 0..3 {
            for k in 0..5 {
                assert_eq!(thin.state(p, k), full.state(p, 5 * k));
            }
        }
    }

    #[test]
    fn brownian_bridge_pins_endpoint() {
        let ens = simulate_xn(&SimConfig::new(jset(1, &[]), 10, 50, 3)).unwrap();
        let bridge = make_bridge_paths(&ens, &jset(1, &[1])).unwrap();
        assert!(terminal_residual(&bridge) <= 1e-12);
        let same = make_bridge_paths(&ens, &jset(1, &[])).unwrap();
        assert_eq!(same.values, ens.values);
    }

    #[test]
    fn too_few_paths_rejected() {
        let ens = simulate_xn(&SimConfig::new(jset(1, &[]), 10, 1, 3)).unwrap();
        let bridge = make_bridge_paths(&ens, &jset(1, &[1])).unwrap();
        assert!(compare_covariance(&bridge, &jset(1, &[1]), 1).is_err());
    }

    #[test]
    fn variance_of_free_processes() {
        let ens = simulate_xn(&SimConfig::new(jset(2, &[]), 10, 40_000, 11)).unwrap();
        let last = ens.times().len() - 1;
        let count = ens.num_paths() as f64;
        let var_top: f64 = (0..ens.num_paths())
            .map(|p| ens.state(p, last)[0].powi(2))
            .sum::<f64>()
            / count;
        let var_bm: f64 = (0..ens.num_paths())
            .map(|p| ens.state(p, 5)[1].powi(2))
            .sum::<f64>()
            / count;
        // standard errors are about 0.0024 and 0.0035
        assert!((var_top - 1.0 / 3.0).abs() < 0.012, "{var_top}");
        assert!((var_bm - 0.5).abs() < 0.018, "{var_bm}");
    }

    #[test]
    fn prediction_residual_is_uncorrelated_with_present() {
        let j = jset(2, &[2]);
        let ens = simulate_xn(&SimConfig::new(j.clone(), 100, 40_000, 5)).unwrap();
        let bridge = make_bridge_paths(&ens, &j).unwrap();
        let m = crate::prediction::predict(&j, &rat(1, 2)).unwrap();
        let (k0, k1) = (50, 75);
        let t = bridge.times()[k1] - bridge.times()[k0];
        let count = bridge.num_paths();
        let mut residual = Vec::with_capacity(count);
        let mut present = [Vec::with_capacity(count), Vec::with_capacity(count)];
        for p in 0..count {
            let now = bridge.state(p, k0);
            let predicted: f64 =
                m.q.iter()
                    .enumerate()
                    .map(|(i, q)| q.eval_f64(t) * now[i])
                    .sum();
            residual.push(bridge.state(p, k1)[0] - predicted);
            present[0].push(now[0]);
            present[1].push(now[1]);
        }
        for x in &present {
            let corr = correlation(&residual, x);
            assert!(corr.abs() < 4.0 / (count as f64).sqrt(), "{corr}");
        }
    }

    fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }
}
