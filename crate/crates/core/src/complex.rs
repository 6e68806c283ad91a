//! Abstract simplicial complexes over site indices.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// Sorted, duplicate-free site indices.
pub type Simplex = Vec<u32>;

/// A downward-closed set of simplices, with one witnessing canvas cell per
/// maximal simplex when built from a diagram.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractComplex {
    simplices: BTreeSet<Simplex>,
    witness: BTreeMap<Simplex, usize>,
}

/// Sorts and deduplicates a vertex list.
pub fn normalize(s: &[u32]) -> Simplex {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// All non-empty subsets of a sorted simplex (including itself).
pub fn faces(s: &[u32]) -> Vec<Simplex> {
    let k = s.len();
    let mut out = Vec::with_capacity((1usize << k) - 1);
    for mask in 1u32..(1u32 << k) {
        out.push(
            (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| s[i])
                .collect(),
        );
    }
    out
}

/// Codimension-one faces; entry `i` omits vertex `i`.
pub fn facets(s: &[u32]) -> Vec<Simplex> {
    (0..s.len())
        .map(|skip| {
            s.iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

impl AbstractComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Complex generated by the given simplices.
    pub fn from_simplices<I, S>(generators: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u32]>,
    {
        let mut c = Self::new();
        for s in generators {
            c.insert_with_faces(s.as_ref());
        }
        c
    }

    /// Inserts `s` and all of its faces.
    pub fn insert_with_faces(&mut self, s: &[u32]) {
        let s = normalize(s);
        if s.is_empty() || self.simplices.contains(&s) {
            return;
        }
        for f in faces(&s) {
            self.simplices.insert(f);
        }
    }

    /// Records `cell` as witness of `s` unless one is already recorded.
    pub fn add_witness(&mut self, s: &[u32], cell: usize) {
        self.witness.entry(normalize(s)).or_insert(cell);
    }

    /// Keeps witnesses only for maximal simplices.
    pub fn prune_witnesses(&mut self) {
        let maximal: BTreeSet<Simplex> = self.maximal().into_iter().collect();
        self.witness.retain(|s, _| maximal.contains(s));
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        self.simplices.contains(&normalize(s))
    }

    pub fn simplices(&self) -> &BTreeSet<Simplex> {
        &self.simplices
    }

    pub fn witnesses(&self) -> &BTreeMap<Simplex, usize> {
        &self.witness
    }

    pub fn witness(&self, s: &[u32]) -> Option<usize> {
        self.witness.get(&normalize(s)).copied()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Largest simplex dimension, or `None` when empty.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len() - 1).max()
    }

    /// Simplices of dimension `k`.
    pub fn of_dim(&self, k: usize) -> impl Iterator<Item = &Simplex> + '_ {
        self.simplices.iter().filter(move |s| s.len() == k + 1)
    }

    /// Simplices that are not a proper face of another member.
    pub fn maximal(&self) -> Vec<Simplex> {
        let mut covered: BTreeSet<&[u32]> = BTreeSet::new();
        let mut scratch: Vec<Simplex> = Vec::new();
        for s in &self.simplices {
            if s.len() > 1 {
                scratch.extend(facets(s));
            }
        }
        for f in &scratch {
            covered.insert(f.as_slice());
        }
        self.simplices
            .iter()
            .filter(|s| !covered.contains(s.as_slice()))
            .cloned()
            .collect()
    }

    pub fn is_downward_closed(&self) -> bool {
        self.simplices
            .iter()
            .all(|s| s.len() == 1 || facets(s).iter().all(|f| self.simplices.contains(f)))
    }

    /// Whether every maximal simplex has dimension `dim`.
    pub fn is_pure(&self, dim: usize) -> bool {
        self.maximal().iter().all(|s| s.len() == dim + 1)
    }

    /// Site indices used by some simplex.
    pub fn vertices(&self) -> Vec<u32> {
        self.of_dim(0).map(|s| s[0]).collect()
    }

    /// Simplices of `self` missing from `other`.
    pub fn difference(&self, other: &AbstractComplex) -> Vec<Simplex> {
        self.simplices.difference(&other.simplices).cloned().collect()
    }
}
