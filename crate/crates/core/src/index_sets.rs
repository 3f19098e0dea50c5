//! Conditioning sets `J ⊆ {1..n}` and differentiating sets `I ⊆ {0..2n−1}`.
//!
//! A bridge conditions `X_n` on `X_j(1) = 0` for `j ∈ J`; the matching
//! boundary problem imposes `v^(i)(1) = 0` for `i ∈ I`. The two are linked by
//! `I = (n − J) ∪ ({n..2n−1} \ (J + n − 1))`, and a set `I` arises this way
//! exactly when `I` and `2n − 1 − I` partition `{0..2n−1}`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn format_set(elems: &[usize]) -> String {
    let inner: Vec<String> = elems.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn sorted_unique(elems: &[usize]) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = elems.iter().copied().collect();
    if set.len() != elems.len() {
        return Err(Error::BadIndexSet(format!(
            "duplicate elements in {elems:?}"
        )));
    }
    Ok(set.into_iter().collect())
}

/// Conditioning set: which terminal values `X_j(1)` are pinned to zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSetJ {
    n: usize,
    elems: Vec<usize>,
}

impl IndexSetJ {
    pub fn new(n: usize, elems: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadIndexSet("order n must be at least 1".into()));
        }
        let elems = sorted_unique(elems)?;
        if let Some(bad) = elems.iter().find(|&&j| j == 0 || j > n) {
            return Err(Error::BadIndexSet(format!("{bad} is outside {{1..{n}}}")));
        }
        Ok(Self { n, elems })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, &[])
    }

    /// `J = {1, …, n}`: every terminal derivative pinned.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, &(1..=n).collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.elems.binary_search(&j).is_ok()
    }

    /// All `2^n` conditioning sets, ordered by size and then lexicographically.
    pub fn all(n: usize) -> Result<Vec<Self>> {
        let mut sets: Vec<Self> = (0u64..(1u64 << n))
            .map(|mask| {
                let elems: Vec<usize> = (1..=n).filter(|j| mask & (1 << (j - 1)) != 0).collect();
                Self::new(n, &elems)
            })
            .collect::<Result<_>>()?;
        sets.sort_by(|a, b| {
            a.elems
                .len()
                .cmp(&b.elems.len())
                .then(a.elems.cmp(&b.elems))
        });
        Ok(sets)
    }
}

impl fmt::Display for IndexSetJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_set(&self.elems))
    }
}

/// Differentiating set: which derivative orders of the solution vanish at 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSetI {
    n: usize,
    elems: Vec<usize>,
}

impl IndexSetI {
    pub fn new(n: usize, elems: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadIndexSet("order n must be at least 1".into()));
        }
        let elems = sorted_unique(elems)?;
        if elems.len() != n {
            return Err(Error::BadIndexSet(format!(
                "{} has {} elements, expected {n}",
                format_set(&elems),
                elems.len()
            )));
        }
        if let Some(bad) = elems.iter().find(|&&i| i >= 2 * n) {
            return Err(Error::BadIndexSet(format!(
                "{bad} is outside {{0..{}}}",
                2 * n - 1
            )));
        }
        Ok(Self { n, elems })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Elements in ascending order, `i_1 < i_2 < … < i_n`.
    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn contains(&self, i: usize) -> bool {
        self.elems.binary_search(&i).is_ok()
    }

    /// All `C(2n, n)` sets in lexicographic order.
    pub fn all(n: usize) -> Result<Vec<Self>> {
        if n == 0 {
            return Err(Error::BadIndexSet("order n must be at least 1".into()));
        }
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        combinations(2 * n, n, 0, &mut current, &mut out);
        Ok(out.into_iter().map(|elems| Self { n, elems }).collect())
    }
}

fn combinations(
    universe: usize,
    k: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    let remaining = k - current.len();
    for x in start..=(universe - remaining) {
        current.push(x);
        combinations(universe, k, x + 1, current, out);
        current.pop();
    }
}

impl fmt::Display for IndexSetI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_set(&self.elems))
    }
}

/// Parses `"1,2,3"`, `"{1,2,3}"`, `"{}"` or `""` into a list of integers.
pub fn parse_index_list(text: &str) -> Result<Vec<usize>> {
    let inner = text
        .trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("not an index: {part:?}")))
        })
        .collect()
}

/// `I = (n − J) ∪ ({n..2n−1} \ (J + n − 1))`
pub fn j_to_i(j: &IndexSetJ) -> IndexSetI {
    let n = j.n;
    let mut elems: Vec<usize> = j.elems.iter().map(|&x| n - x).collect();
    elems.extend((n..2 * n).filter(|&i| !j.contains(i + 1 - n)));
    elems.sort_unstable();
    IndexSetI { n, elems }
}

/// `J = (n − I) ∩ {1..n}`, defined only for admissible `I`.
pub fn i_to_j(i: &IndexSetI) -> Result<IndexSetJ> {
    if !is_admissible(i) {
        return Err(Error::NotABridge(i.to_string()));
    }
    let n = i.n;
    let mut elems: Vec<usize> = i.elems.iter().filter(|&&x| x < n).map(|&x| n - x).collect();
    elems.sort_unstable();
    Ok(IndexSetJ { n, elems })
}

/// For each `i < n`, exactly one of `i` and `2n − 1 − i` lies in `I`.
pub fn is_admissible(i: &IndexSetI) -> bool {
    let n = i.n;
    (0..n).all(|k| i.contains(k) != i.contains(2 * n - 1 - k))
}

/// `{0..2n−1} \ (2n − 1 − I)`
pub fn dual_set(i: &IndexSetI) -> IndexSetI {
    let n = i.n;
    let elems = (0..2 * n).filter(|&k| !i.contains(2 * n - 1 - k)).collect();
    IndexSetI { n, elems }
}

pub fn admissible_sets(n: usize) -> Result<Vec<IndexSetI>> {
    Ok(IndexSetI::all(n)?
        .into_iter()
        .filter(is_admissible)
        .collect())
}

/// Non-admissible sets paired with their duals, each pair listed once with the
/// lexicographically smaller set first.
pub fn non_admissible_pairs(n: usize) -> Result<Vec<(IndexSetI, IndexSetI)>> {
    Ok(IndexSetI::all(n)?
        .into_iter()
        .filter(|i| !is_admissible(i))
        .filter_map(|i| {
            let dual = dual_set(&i);
            (i.elems < dual.elems).then_some((i, dual))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetFilter {
    All,
    Admissible,
    NonAdmissiblePairs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    Sets(Vec<IndexSetI>),
    Pairs(Vec<(IndexSetI, IndexSetI)>),
}

pub fn enumerate(n: usize, filter: SetFilter) -> Result<Enumeration> {
    Ok(match filter {
        SetFilter::All => Enumeration::Sets(IndexSetI::all(n)?),
        SetFilter::Admissible => Enumeration::Sets(admissible_sets(n)?),
        SetFilter::NonAdmissiblePairs => Enumeration::Pairs(non_admissible_pairs(n)?),
    })
}
