//! Alternating-path trees.
//!
//! A tree adds one unassigned first coordinate `i0` through a root triple
//! `(i0, a, b)` whose second and third values are taken from two assigned
//! triples. Those triples are deleted and their first coordinates re-added
//! one level down, recursively, until the leaves use only unassigned second
//! and third values. Even levels hold added triples and odd levels deleted
//! ones; a depth-`2k` tree adds `2^{k+1} - 1` triples and deletes
//! `2^{k+1} - 2`.
//!
//! The bottom-up search works on owners: an assigned first coordinate `p`
//! is a level-`l` candidate when some triple `(p, sigma2(q), sigma3(r))` of
//! cost at most `w` exists with `q`, `r` distinct level-`(l-1)` candidates
//! (or, at level 0, some `(p, xi, eta)` with `xi`, `eta` unassigned). The
//! cheapest concrete tree in which no owner and no unassigned value is used
//! twice is then materialized top-down.

use serde::{Deserialize, Serialize};

use super::schedule::candidate_targets;
use super::state::PartialAssignment;
use crate::error::{Error, Result};
use crate::instance::{CostTensor, Triple};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentingTree {
    pub root: Triple,
    /// Added triples, root first.
    pub added: Vec<Triple>,
    /// Current cost of each added triple when the tree was built.
    pub added_costs: Vec<f64>,
    pub deleted: Vec<Triple>,
    /// Number of levels below the root.
    pub depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Lower limit on candidates kept per level; the limit is
    /// `max(ceil(nu_l), min_candidates)`, cheapest first.
    pub min_candidates: usize,
    /// Option trials allowed while materializing one tree.
    pub node_budget: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            min_candidates: 64,
            node_budget: 200_000,
        }
    }
}

/// Net cost change, added triples with their current costs, deleted triples.
pub(super) type Found = (f64, Vec<(Triple, f64)>, Vec<Triple>);

#[derive(Debug, Clone, Copy)]
struct Choice {
    cost: f64,
    // Change in assignment cost from this choice alone: `cost` minus the
    // current costs of the two triples it deletes.
    key: f64,
    // Unassigned (second, third) values at level 0, child owners above it.
    a: usize,
    b: usize,
}

fn sort_choices(v: &mut [Choice]) {
    v.sort_by(|x, y| {
        x.key
            .total_cmp(&y.key)
            .then(x.a.cmp(&y.a))
            .then(x.b.cmp(&y.b))
    });
}

/// Searches for a depth-`2k` tree adding `i0`, every added triple having
/// current cost at most `w`, and returns the one that lowers the assignment
/// cost most (added minus deleted) among those found within the node budget.
/// `None` when no tree is found.
pub fn find_augmenting_tree(
    state: &PartialAssignment,
    t: &CostTensor,
    i0: usize,
    w: f64,
    k: u32,
    cfg: &SearchConfig,
) -> Option<AugmentingTree> {
    let n = state.n();
    if k == 0 || i0 >= n || state.triple_of(i0).is_some() || w.is_nan() || w <= 0.0 {
        return None;
    }
    let leaves = 1usize << k;
    let free2: Vec<usize> = state.unmatched2().iter().copied().collect();
    let free3: Vec<usize> = state.unmatched3().iter().copied().collect();
    if free2.len() < leaves || free3.len() < leaves {
        return None;
    }
    let owners: Vec<usize> = state.matched1().collect();
    let sigma = |p: usize| state.triple_of(p).expect("candidate is assigned");
    let mut held = vec![0.0; n];
    for &p in &owners {
        let [_, j, k] = sigma(p);
        held[p] = t.value3(p, j, k);
    }
    let caps: Vec<usize> = candidate_targets(n, k, w, state.unmatched1().len())
        .into_iter()
        .map(|nu| (nu.ceil().min(n as f64) as usize).max(cfg.min_candidates))
        .collect();

    // choices[l][p]: ways to re-home p with a level-l subtree; level k is the root.
    let levels = k as usize;
    let mut choices: Vec<Vec<Vec<Choice>>> = vec![vec![Vec::new(); n]; levels + 1];
    let mut cands: Vec<Vec<usize>> = Vec::with_capacity(levels);

    for l in 0..levels {
        let mut level_cands: Vec<(f64, usize)> = Vec::new();
        for &p in &owners {
            let plane = t.plane(p);
            let mut opts = Vec::new();
            if l == 0 {
                for &a in &free2 {
                    let row = &plane[a * n..(a + 1) * n];
                    opts.extend(free3.iter().filter(|&&b| row[b] <= w).map(|&b| Choice {
                        cost: row[b],
                        key: row[b],
                        a,
                        b,
                    }));
                }
            } else {
                for &q in &cands[l - 1] {
                    if q == p {
                        continue;
                    }
                    let row = &plane[sigma(q)[1] * n..(sigma(q)[1] + 1) * n];
                    for &r in &cands[l - 1] {
                        if r == p || r == q {
                            continue;
                        }
                        let c = row[sigma(r)[2]];
                        if c <= w {
                            opts.push(Choice {
                                cost: c,
                                key: c - held[q] - held[r],
                                a: q,
                                b: r,
                            });
                        }
                    }
                }
            }
            if !opts.is_empty() {
                sort_choices(&mut opts);
                level_cands.push((opts[0].key - held[p], p));
                choices[l][p] = opts;
            }
        }
        level_cands.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        level_cands.truncate(caps[l]);
        if level_cands.len() < 2 {
            return None;
        }
        // Dropped candidates must not be reachable from the level above.
        let mut keep = vec![false; n];
        for &(_, p) in &level_cands {
            keep[p] = true;
        }
        for (p, opts) in choices[l].iter_mut().enumerate() {
            if !keep[p] {
                opts.clear();
            }
        }
        cands.push(level_cands.into_iter().map(|(_, p)| p).collect());
    }

    let top = &cands[levels - 1];
    let root_plane = t.plane(i0);
    let mut root_opts = Vec::new();
    for &q in top {
        let row = &root_plane[sigma(q)[1] * n..(sigma(q)[1] + 1) * n];
        for &r in top {
            let c = row[sigma(r)[2]];
            if r != q && c <= w {
                root_opts.push(Choice {
                    cost: c,
                    key: c - held[q] - held[r],
                    a: q,
                    b: r,
                });
            }
        }
    }
    if root_opts.is_empty() {
        return None;
    }
    sort_choices(&mut root_opts);
    choices[levels][i0] = root_opts;

    // floor[l]: lower bound on the cost change of any level-l subtree.
    let mut floor = Vec::with_capacity(levels);
    for l in 0..levels {
        let below = if l == 0 { 0.0 } else { 2.0 * floor[l - 1] };
        let best = cands[l]
            .iter()
            .map(|&p| choices[l][p][0].key)
            .fold(f64::INFINITY, f64::min);
        floor.push(best + below);
    }

    let mut builder = Builder {
        state,
        choices: &choices,
        floor,
        budget: cfg.node_budget,
        used_owner: vec![false; n],
        used2: vec![false; n],
        used3: vec![false; n],
        partial: 0.0,
        added: Vec::new(),
        deleted: Vec::new(),
        best: None,
    };
    builder.solve(&mut vec![(i0, levels)]);
    let (_, added, deleted) = builder.best?;
    let (added, added_costs): (Vec<Triple>, Vec<f64>) = added.into_iter().unzip();
    Some(AugmentingTree {
        root: added[0],
        added,
        added_costs,
        deleted,
        depth: 2 * levels,
    })
}

// Branch and bound over the candidate structure on the net cost change. The
// node budget caps the search; the best tree seen by then is returned.
struct Builder<'a> {
    state: &'a PartialAssignment,
    choices: &'a [Vec<Vec<Choice>>],
    floor: Vec<f64>,
    budget: usize,
    used_owner: Vec<bool>,
    used2: Vec<bool>,
    used3: Vec<bool>,
    partial: f64,
    added: Vec<(Triple, f64)>,
    deleted: Vec<Triple>,
    best: Option<Found>,
}

impl Builder<'_> {
    // Lower bound on the cost change of re-homing `p` with a level subtree.
    fn cheapest(&self, p: usize, level: usize) -> f64 {
        let own = self.choices[level][p]
            .first()
            .map_or(f64::INFINITY, |c| c.key);
        if level == 0 {
            own
        } else {
            own + 2.0 * self.floor[level - 1]
        }
    }

    fn beaten(&self, bound: f64) -> bool {
        self.best.as_ref().is_some_and(|b| bound >= b.0)
    }

    fn solve(&mut self, pending: &mut Vec<(usize, usize)>) {
        let Some((p, level)) = pending.pop() else {
            if !self.beaten(self.partial) {
                self.best = Some((self.partial, self.added.clone(), self.deleted.clone()));
            }
            return;
        };
        let rest: f64 = pending.iter().map(|&(q, l)| self.cheapest(q, l)).sum();
        let choices = self.choices;
        let under = if level == 0 {
            0.0
        } else {
            2.0 * self.floor[level - 1]
        };
        for c in &choices[level][p] {
            if self.budget == 0 || self.beaten(self.partial + rest + c.key + under) {
                break;
            }
            self.budget -= 1;
            if level == 0 {
                if self.used2[c.a] || self.used3[c.b] {
                    continue;
                }
                self.used2[c.a] = true;
                self.used3[c.b] = true;
                self.added.push(([p, c.a, c.b], c.cost));
                self.partial += c.cost;
                self.solve(pending);
                self.partial -= c.cost;
                self.added.pop();
                self.used2[c.a] = false;
                self.used3[c.b] = false;
            } else {
                let (q, r) = (c.a, c.b);
                if self.used_owner[q] || self.used_owner[r] {
                    continue;
                }
                let below = self.cheapest(q, level - 1) + self.cheapest(r, level - 1);
                if self.beaten(self.partial + rest + c.key + below) {
                    continue;
                }
                let tq = self.state.triple_of(q).expect("owner is assigned");
                let tr = self.state.triple_of(r).expect("owner is assigned");
                self.used_owner[q] = true;
                self.used_owner[r] = true;
                self.added.push(([p, tq[1], tr[2]], c.cost));
                self.deleted.push(tq);
                self.deleted.push(tr);
                self.partial += c.key;
                pending.push((r, level - 1));
                pending.push((q, level - 1));
                self.solve(pending);
                pending.truncate(pending.len() - 2);
                self.partial -= c.key;
                self.deleted.truncate(self.deleted.len() - 2);
                self.added.pop();
                self.used_owner[q] = false;
                self.used_owner[r] = false;
            }
        }
        pending.push((p, level));
    }
}

/// Replaces the deleted triples by the added ones. The tree is revalidated
/// against `state`; on any conflict `state` is left untouched.
pub fn apply_tree(state: &mut PartialAssignment, tree: &AugmentingTree) -> Result<()> {
    if tree.added.len() != tree.deleted.len() + 1 {
        return Err(Error::StaleTree(format!(
            "{} additions for {} deletions",
            tree.added.len(),
            tree.deleted.len()
        )));
    }
    let mut next = state.clone();
    for d in &tree.deleted {
        if !next.contains(*d) {
            return Err(Error::StaleTree(format!(
                "deleted triple {d:?} is not in the assignment"
            )));
        }
        next.remove(d[0]).expect("presence checked");
    }
    for a in &tree.added {
        next.insert(*a)
            .map_err(|_| Error::StaleTree(format!("added triple {a:?} conflicts")))?;
    }
    debug_assert!(next.check_invariants().is_ok());
    debug_assert_eq!(next.len(), state.len() + 1);
    *state = next;
    Ok(())
}
