//! The `N`-th symmetric tensor product `Sym(X, N)` of a base scheme, handled at the
//! level of multi-indices. Dense materialization is only offered for the oracle.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krawtchouk;
use crate::linalg::CMatrix;
use crate::scheme::AssociationScheme;

/// Default bound on the order of materialized matrices.
pub const DEFAULT_SIZE_GUARD: usize = 4096;

/// A composition `(b_0, .., b_d)` of `N`: how many tensor factors sit in each base class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    /// `N e_i` with `d + 1` entries.
    pub fn unit(len: usize, i: usize, weight: usize) -> Self {
        let mut v = vec![0; len];
        v[i] = weight;
        Self(v)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// `self - e_s + e_t`, if `self_s > 0`.
    pub fn moved(&self, s: usize, t: usize) -> Option<Self> {
        if self.0[s] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[s] -= 1;
        v[t] += 1;
        Some(Self(v))
    }

    /// Dash-joined label such as `2-1-0`.
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// The sorted arrangement `(0,..,0,1,..,1,..)` of this multiset.
    pub fn first_arrangement(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c))
            .collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("-"))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Accepts `2-1-0`, `2,1,0` or `(2,1,0)`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        trimmed
            .split(['-', ','])
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidParameter(format!("bad multi-index '{s}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// All compositions of `n` into `d + 1` parts, first coordinate descending, then the
/// rest recursively in the same order. For `n = 3, d = 2` this starts
/// `(3,0,0), (2,1,0), (2,0,1), (1,2,0), ..`.
pub fn enumerate_indices(n: usize, d: usize) -> Vec<MultiIndex> {
    fn fill(remaining: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in (0..=remaining).rev() {
            prefix.push(v);
            fill(remaining - v, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(n, d + 1, &mut Vec::with_capacity(d + 1), &mut out);
    out
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `N! / prod(b_i!)`.
pub fn multinomial(n: usize, index: &MultiIndex) -> Result<BigUint> {
    check_weight(index, n)?;
    let denom = index.0.iter().fold(BigUint::one(), |acc, &b| acc * factorial(b));
    Ok(factorial(n) / denom)
}

pub fn big_to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

pub(crate) fn check_weight(index: &MultiIndex, expected: usize) -> Result<()> {
    let found = index.weight();
    if found != expected {
        return Err(Error::WeightMismatch {
            index: index.label(),
            found,
            expected,
        });
    }
    Ok(())
}

/// Symbolic handle on `Sym(X, N)`.
#[derive(Clone, Debug)]
pub struct ExtensionScheme {
    base: AssociationScheme,
    copies: usize,
    index_set: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
}

impl ExtensionScheme {
    pub fn new(base: AssociationScheme, copies: usize) -> Self {
        let index_set = enumerate_indices(copies, base.class_number());
        let positions = index_set.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        Self {
            base,
            copies,
            index_set,
            positions,
        }
    }

    pub fn base(&self) -> &AssociationScheme {
        &self.base
    }

    /// `N`.
    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn index_set(&self) -> &[MultiIndex] {
        &self.index_set
    }

    pub fn position(&self, index: &MultiIndex) -> Option<usize> {
        self.positions.get(index).copied()
    }

    /// `|X|^N`, or `None` on overflow.
    pub fn point_count(&self) -> Option<usize> {
        self.base.size().checked_pow(self.copies as u32)
    }

    /// `N e_i`.
    pub fn extreme(&self, i: usize) -> MultiIndex {
        MultiIndex::unit(self.base.classes(), i, self.copies)
    }

    pub fn check_index(&self, index: &MultiIndex) -> Result<()> {
        if index.len() != self.base.classes() {
            return Err(Error::DimensionMismatch(format!(
                "multi-index {index} has {} entries, expected {}",
                index.len(),
                self.base.classes()
            )));
        }
        check_weight(index, self.copies)
    }

    /// `k_beta = multinomial(N; beta) * prod k_i^{beta_i}`.
    pub fn class_valency(&self, beta: &MultiIndex) -> Result<BigUint> {
        self.check_index(beta)?;
        Ok(multinomial(self.copies, beta)? * weighted_power(self.base.valencies(), beta))
    }

    /// `m_alpha = multinomial(N; alpha) * prod m_i^{alpha_i}`.
    pub fn multiplicity(&self, alpha: &MultiIndex) -> Result<BigUint> {
        self.check_index(alpha)?;
        Ok(multinomial(self.copies, alpha)? * weighted_power(self.base.multiplicities(), alpha))
    }

    /// Cosine `c_{alpha,beta}` of the extension: eigenvalue of `A_beta` on `E_alpha`
    /// divided by `k_beta`, equal to `K(beta, alpha, N, C)` for the base cosine matrix `C`.
    pub fn extension_cosine(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Result<Complex64> {
        self.check_index(alpha)?;
        self.check_index(beta)?;
        krawtchouk::krawtchouk_series(beta, alpha, self.copies, self.base.cosine())
    }

    /// Full cosine matrix, rows `alpha`, columns `beta`, both in index-set order.
    pub fn cosine_matrix(&self) -> CMatrix {
        let n = self.index_set.len();
        let mut out = CMatrix::zeros(n, n);
        for (a, alpha) in self.index_set.iter().enumerate() {
            let row = krawtchouk::krawtchouk_genfun(alpha, self.copies, self.base.cosine())
                .expect("index set members have weight N");
            for (b, beta) in self.index_set.iter().enumerate() {
                out[(a, b)] = row[beta];
            }
        }
        out
    }

    /// Dense 0/1 matrix of class `beta` on `X^N`: the sum, over each distinct arrangement
    /// of the multiset `beta` (lexicographic order), of the tensor product of base
    /// adjacency matrices.
    pub fn materialize_class(&self, beta: &MultiIndex, guard: usize) -> Result<DMatrix<u8>> {
        self.check_index(beta)?;
        let order = self.guarded_order(guard)?;
        let base = &self.base;
        let size = base.size();
        let neighbours: Vec<Vec<Vec<usize>>> = base
            .adjacency()
            .iter()
            .map(|a| (0..size).map(|x| (0..size).filter(|&y| a[(x, y)] != 0).collect()).collect())
            .collect();

        let mut out = DMatrix::<u8>::zeros(order, order);
        let mut arrangement = beta.first_arrangement();
        loop {
            for x in 0..order {
                let digits = to_digits(x, size, self.copies);
                // Enumerate every y with A_{arr[q]}[x_q][y_q] = 1 for all q.
                let lists: Vec<&Vec<usize>> = arrangement
                    .iter()
                    .zip(&digits)
                    .map(|(&rel, &xq)| &neighbours[rel][xq])
                    .collect();
                for_each_product(&lists, |ys| {
                    let y = from_digits(ys, size);
                    out[(x, y)] += 1;
                });
            }
            if !next_permutation(&mut arrangement) {
                break;
            }
        }
        Ok(out)
    }

    pub(crate) fn guarded_order(&self, guard: usize) -> Result<usize> {
        match self.point_count() {
            Some(order) if order <= guard => Ok(order),
            Some(order) => Err(Error::SizeGuard { requested: order, guard }),
            None => Err(Error::SizeGuard {
                requested: usize::MAX,
                guard,
            }),
        }
    }
}

fn weighted_power(base: &[u64], index: &MultiIndex) -> BigUint {
    base.iter()
        .zip(index.entries())
        .fold(BigUint::one(), |acc, (&k, &e)| acc * BigUint::from(k).pow(e as u32))
}

/// Coordinates of `x` in base `size`, most significant (first tensor factor) first.
pub(crate) fn to_digits(mut x: usize, size: usize, len: usize) -> Vec<usize> {
    let mut digits = vec![0; len];
    for q in (0..len).rev() {
        digits[q] = x % size;
        x /= size;
    }
    digits
}

pub(crate) fn from_digits(digits: &[usize], size: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * size + d)
}

fn for_each_product(lists: &[&Vec<usize>], mut f: impl FnMut(&[usize])) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut cursor = vec![0usize; lists.len()];
    let mut current: Vec<usize> = lists.iter().map(|l| l[0]).collect();
    loop {
        f(&current);
        let mut q = lists.len();
        loop {
            if q == 0 {
                return;
            }
            q -= 1;
            cursor[q] += 1;
            if cursor[q] < lists[q].len() {
                current[q] = lists[q][cursor[q]];
                break;
            }
            cursor[q] = 0;
            current[q] = lists[q][0];
        }
    }
}

/// Advances to the next lexicographic permutation; `false` once the last is reached.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
