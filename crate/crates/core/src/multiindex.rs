//! Multi-indices in `Z^m_+` labelling partial derivatives.
//!
//! Direction `mu` is 1-based throughout the crate (`1..=m`), matching the
//! textual form `u1_[...]`. Direction 1 is the distinguished one used by the
//! constraint coordinates; directions `2..=m` are the "transverse" ones.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// An element `(i^1, ..., i^m)` of `Z^m_+`.
///
/// Ordered by total degree `|i|` first, then lexicographically on entries.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(SmallVec<[u32; 4]>);

/// Membership of a multi-index in the index splits used by the constraint
/// coordinates: `I_0 = {i^1 = 0}`, `I_1 = {i^1 <= 1}` and their complements.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct IndexClass {
    pub in_i0: bool,
    pub in_i1: bool,
    pub in_i0_prime: bool,
    pub in_i1_prime: bool,
    pub degree: u32,
}

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, dim))
    }

    pub fn new(entries: impl IntoIterator<Item = u32>) -> Self {
        MultiIndex(entries.into_iter().collect())
    }

    /// The unit index `(mu)`, 1-based direction.
    pub fn unit(dim: usize, mu: usize) -> Self {
        assert!(mu >= 1 && mu <= dim, "direction {mu} out of range 1..={dim}");
        let mut i = Self::zero(dim);
        i.0[mu - 1] = 1;
        i
    }

    /// `i + (mu)`.
    pub fn bump(&self, mu: usize) -> Self {
        let mut out = self.clone();
        out.0[mu - 1] += 1;
        out
    }

    /// `i - (mu)`, absent when that entry is already zero.
    pub fn lower(&self, mu: usize) -> Option<Self> {
        let mut out = self.clone();
        let e = &mut out.0[mu - 1];
        *e = e.checked_sub(1)?;
        Some(out)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Entry along a 1-based direction.
    pub fn get(&self, mu: usize) -> u32 {
        self.0[mu - 1]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Componentwise difference; `Ok(None)` when an entry would go negative.
    pub fn checked_sub(&self, other: &Self) -> Result<Option<Self>> {
        self.check_dim(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<SmallVec<_>>>()
            .map(MultiIndex))
    }

    /// `prod_mu binom(i^mu, k^mu)`, zero unless `k <= i` componentwise.
    pub fn binomial(&self, k: &Self) -> Result<BigUint> {
        self.check_dim(k)?;
        let mut acc = BigUint::one();
        for (&n, &r) in self.0.iter().zip(&k.0) {
            if r > n {
                return Ok(BigUint::default());
            }
            acc *= binomial(n, r);
        }
        Ok(acc)
    }

    pub fn classify(&self) -> IndexClass {
        let first = self.0.first().copied().unwrap_or(0);
        IndexClass {
            in_i0: first == 0,
            in_i1: first <= 1,
            in_i0_prime: first > 0,
            in_i1_prime: first > 1,
            degree: self.degree(),
        }
    }

    /// All `k <= self` componentwise, in canonical order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(SmallVec::new())];
        for &e in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=e).map(move |v| {
                        let mut p = prefix.clone();
                        p.0.push(v);
                        p
                    })
                })
                .collect();
        }
        out.sort();
        out
    }

    /// Every multi-index of dimension `dim` with `|i| <= max_degree`, canonical order.
    pub fn all_up_to(dim: usize, max_degree: u32) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(SmallVec::new())];
        for _ in 0..dim {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    let used = prefix.degree();
                    (0..=max_degree - used).map(move |v| {
                        let mut p = prefix.clone();
                        p.0.push(v);
                        p
                    })
                })
                .collect();
        }
        out.sort();
        out
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn binomial(n: u32, r: u32) -> BigUint {
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for j in 0..r {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, e) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}
