use std::collections::BTreeSet;

use crate::error::{invalid, Result};
use crate::instance::Triple;

/// A set of triples that uses every coordinate value at most once per axis,
/// with forward and inverse lookups and the unused values of each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialAssignment {
    n: usize,
    fwd1: Vec<Option<(usize, usize)>>,
    inv2: Vec<Option<usize>>,
    inv3: Vec<Option<usize>>,
    unmatched: [BTreeSet<usize>; 3],
}

impl PartialAssignment {
    pub fn new(n: usize) -> Self {
        let all: BTreeSet<usize> = (0..n).collect();
        Self {
            n,
            fwd1: vec![None; n],
            inv2: vec![None; n],
            inv3: vec![None; n],
            unmatched: [all.clone(), all.clone(), all],
        }
    }

    pub fn from_triples(n: usize, triples: &[Triple]) -> Result<Self> {
        let mut s = Self::new(n);
        for &t in triples {
            s.insert(t)?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n - self.unmatched[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_complete(&self) -> bool {
        self.unmatched[0].is_empty()
    }

    /// The triple whose first coordinate is `i`.
    #[inline]
    pub fn triple_of(&self, i: usize) -> Option<Triple> {
        self.fwd1[i].map(|(j, k)| [i, j, k])
    }

    /// First coordinate of the triple using second coordinate `j`.
    #[inline]
    pub fn owner2(&self, j: usize) -> Option<usize> {
        self.inv2[j]
    }

    /// First coordinate of the triple using third coordinate `k`.
    #[inline]
    pub fn owner3(&self, k: usize) -> Option<usize> {
        self.inv3[k]
    }

    pub fn contains(&self, t: Triple) -> bool {
        t[0] < self.n && self.fwd1[t[0]] == Some((t[1], t[2]))
    }

    pub fn unmatched1(&self) -> &BTreeSet<usize> {
        &self.unmatched[0]
    }

    pub fn unmatched2(&self) -> &BTreeSet<usize> {
        &self.unmatched[1]
    }

    pub fn unmatched3(&self) -> &BTreeSet<usize> {
        &self.unmatched[2]
    }

    /// First coordinates currently in use, ascending.
    pub fn matched1(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| self.fwd1[i].is_some())
    }

    /// All triples ordered by first coordinate.
    pub fn triples(&self) -> Vec<Triple> {
        (0..self.n).filter_map(|i| self.triple_of(i)).collect()
    }

    pub fn is_free(&self, t: Triple) -> bool {
        t.iter().all(|&c| c < self.n)
            && self.fwd1[t[0]].is_none()
            && self.inv2[t[1]].is_none()
            && self.inv3[t[2]].is_none()
    }

    pub fn insert(&mut self, t: Triple) -> Result<()> {
        if !self.is_free(t) {
            return Err(invalid(format!(
                "triple {t:?} conflicts with the assignment or is out of bounds"
            )));
        }
        let [i, j, k] = t;
        self.fwd1[i] = Some((j, k));
        self.inv2[j] = Some(i);
        self.inv3[k] = Some(i);
        for (axis, c) in t.into_iter().enumerate() {
            self.unmatched[axis].remove(&c);
        }
        Ok(())
    }

    /// Removes the triple with first coordinate `i` and returns it.
    pub fn remove(&mut self, i: usize) -> Result<Triple> {
        let t = self
            .triple_of(i)
            .ok_or_else(|| invalid(format!("first coordinate {i} is not assigned")))?;
        self.fwd1[i] = None;
        self.inv2[t[1]] = None;
        self.inv3[t[2]] = None;
        for (axis, c) in t.into_iter().enumerate() {
            self.unmatched[axis].insert(c);
        }
        Ok(t)
    }

    /// Full consistency scan of the maps and unmatched sets.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        let mut count = 0;
        for i in 0..n {
            if let Some((j, k)) = self.fwd1[i] {
                count += 1;
                if self.inv2[j] != Some(i) || self.inv3[k] != Some(i) {
                    return Err(invalid(format!(
                        "inverse maps disagree for triple ({i}, {j}, {k})"
                    )));
                }
            }
        }
        for (axis, inv) in [(1usize, &self.inv2), (2, &self.inv3)] {
            for (c, owner) in inv.iter().enumerate() {
                if let Some(i) = owner {
                    let t = self
                        .triple_of(*i)
                        .ok_or_else(|| invalid("inverse map points at an unassigned row"))?;
                    if t[axis] != c {
                        return Err(invalid(format!(
                            "axis {} value {c} owned by ({i}) inconsistently",
                            axis + 1
                        )));
                    }
                }
            }
        }
        for axis in 0..3 {
            if self.unmatched[axis].len() + count != n {
                return Err(invalid(format!(
                    "unmatched set of axis {} has the wrong size",
                    axis + 1
                )));
            }
        }
        let used = |axis: usize, c: usize| match axis {
            0 => self.fwd1[c].is_some(),
            1 => self.inv2[c].is_some(),
            _ => self.inv3[c].is_some(),
        };
        for axis in 0..3 {
            if let Some(c) = self.unmatched[axis].iter().find(|&&c| used(axis, c)) {
                return Err(invalid(format!(
                    "value {c} of axis {} is both used and unmatched",
                    axis + 1
                )));
            }
        }
        Ok(())
    }
}
