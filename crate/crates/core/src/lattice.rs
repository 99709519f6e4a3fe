//! Multi-index arithmetic and the residue-class splitting `l = nk + j`.
//!
//! Truncations are by total degree `|l| <= D` and every enumeration is in
//! graded lexicographic order: by `|l|` first, then lexicographically.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent of a monomial `z^k = z_1^{k_1} ... z_N^{k_N}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyIndex);
        }
        Ok(MultiIndex(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        MultiIndex(vec![0; dim])
    }

    pub fn ones(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        MultiIndex(vec![1; dim])
    }

    /// `d * e_axis`.
    pub fn axis(dim: usize, axis: usize, d: u32) -> Self {
        let mut v = vec![0; dim];
        v[axis] = d;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Total degree `|k|`.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&x| u64::from(x)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        other.check_dim(self.dim())?;
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// `self - other`, or `None` if some entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise `self < other`.
    pub fn lt(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a < b)
    }

    pub fn graded_cmp(&self, other: &MultiIndex) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Parses comma-separated integers, optionally wrapped in parentheses:
/// `2,3` or `(2,3)`.
impl FromStr for MultiIndex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        if body.trim().is_empty() {
            return Err("empty multi-index".to_string());
        }
        let entries = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| format!("bad multi-index entry {t:?}: {e}"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        MultiIndex::new(entries).map_err(|e| e.to_string())
    }
}

impl From<ShiftExponent> for MultiIndex {
    fn from(n: ShiftExponent) -> Self {
        n.0
    }
}

/// The exponent `n` of `M_{z^n}`; every entry is at least 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct ShiftExponent(MultiIndex);

impl ShiftExponent {
    pub fn new(n: MultiIndex) -> Result<Self> {
        if n.entries().contains(&0) {
            return Err(Error::ZeroShiftEntry(n.to_string()));
        }
        Ok(ShiftExponent(n))
    }

    pub fn as_index(&self) -> &MultiIndex {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn entries(&self) -> &[u32] {
        self.0.entries()
    }

    /// All entries equal to 1: `M_{z^n}` is the identity-class case.
    pub fn is_trivial(&self) -> bool {
        self.entries().iter().all(|&x| x == 1)
    }

    /// Number of residue classes, `prod n_i`.
    pub fn class_count(&self) -> u64 {
        self.entries().iter().map(|&x| u64::from(x)).product()
    }

    /// `(m, n_m)` with `n_m = min n_i`; ties go to the smallest coordinate.
    pub fn min_coordinate(&self) -> (usize, u32) {
        let mut best = (0, self.entries()[0]);
        for (i, &x) in self.entries().iter().enumerate().skip(1) {
            if x < best.1 {
                best = (i, x);
            }
        }
        best
    }

    /// Every residue class `0 <= j < n` in lexicographic order.
    pub fn classes(&self) -> Vec<ResidueClass> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &ni in self.entries() {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..ni).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|v| ResidueClass(MultiIndex(v)))
            .collect()
    }
}

impl fmt::Display for ShiftExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A remainder `j` with `0 <= j_i < n_i`; labels the subspace `A_j`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct ResidueClass(MultiIndex);

impl ResidueClass {
    pub fn new(j: MultiIndex, n: &ShiftExponent) -> Result<Self> {
        j.check_dim(n.dim())?;
        if !j.lt(n.as_index()) {
            return Err(Error::ResidueOutOfRange {
                j: j.to_string(),
                n: n.to_string(),
            });
        }
        Ok(ResidueClass(j))
    }

    pub fn as_index(&self) -> &MultiIndex {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn entries(&self) -> &[u32] {
        self.0.entries()
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Splits `l` as `nk + j` with `0 <= j < n`.
pub fn residue_decompose(l: &MultiIndex, n: &ShiftExponent) -> Result<(MultiIndex, ResidueClass)> {
    l.check_dim(n.dim())?;
    let (k, j): (Vec<u32>, Vec<u32>) = l
        .entries()
        .iter()
        .zip(n.entries())
        .map(|(&li, &ni)| (li / ni, li % ni))
        .unzip();
    Ok((MultiIndex(k), ResidueClass(MultiIndex(j))))
}

/// `nk + j`. The class is re-validated against `n`.
pub fn compose(k: &MultiIndex, j: &ResidueClass, n: &ShiftExponent) -> Result<MultiIndex> {
    k.check_dim(n.dim())?;
    let j = ResidueClass::new(j.as_index().clone(), n)?;
    Ok(MultiIndex(
        k.entries()
            .iter()
            .zip(n.entries())
            .zip(j.entries())
            .map(|((&ki, &ni), &ji)| ni * ki + ji)
            .collect(),
    ))
}

/// All `l` in `N` variables with `|l| <= max_degree`, graded-lex.
///
/// The count is `binomial(N + D, N)`.
pub fn enumerate_upto(dim: usize, max_degree: u32) -> Vec<MultiIndex> {
    assert!(dim >= 1, "dimension must be >= 1");
    let mut out = Vec::new();
    let mut buf = vec![0u32; dim];
    for d in 0..=max_degree {
        compositions(d, 0, &mut buf, &mut out);
    }
    out
}

// Writes every composition of `remaining` into buf[pos..] in lex order.
fn compositions(remaining: u32, pos: usize, buf: &mut [u32], out: &mut Vec<MultiIndex>) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for x in 0..=remaining {
        buf[pos] = x;
        compositions(remaining - x, pos + 1, buf, out);
    }
}

/// All `k` with `|nk + j| <= max_degree`, graded-lex in `k`.
pub fn enumerate_class(n: &ShiftExponent, j: &ResidueClass, max_degree: u32) -> Result<Vec<MultiIndex>> {
    let j = ResidueClass::new(j.as_index().clone(), n)?;
    let jdeg = j.as_index().degree();
    if jdeg > u64::from(max_degree) {
        return Ok(Vec::new());
    }
    let budget = u64::from(max_degree) - jdeg;
    let (_, n_min) = n.min_coordinate();
    let kmax = (budget / u64::from(n_min)) as u32;
    Ok(enumerate_upto(n.dim(), kmax)
        .into_iter()
        .filter(|k| weighted_degree(k, n) <= budget)
        .collect())
}

fn weighted_degree(k: &MultiIndex, n: &ShiftExponent) -> u64 {
    k.entries()
        .iter()
        .zip(n.entries())
        .map(|(&a, &b)| u64::from(a) * u64::from(b))
        .sum()
}

/// `binomial(N + D, N)`, the size of the degree-`D` truncation.
pub fn truncation_size(dim: usize, max_degree: u32) -> u64 {
    let (n, d) = (dim as u64, u64::from(max_degree));
    (1..=n).fold(1u64, |acc, i| acc * (d + i) / i)
}
