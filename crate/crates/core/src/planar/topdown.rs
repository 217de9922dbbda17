//! Top-down augmentation used once too few unassigned values remain for
//! bottom-up trees. The new first coordinate takes any triple of cost at most
//! `w`; each assigned triple it collides with is deleted and its first
//! coordinate re-added the same way one level down. At the last level only
//! values that are free at that moment may be used, which includes values
//! released by the deletions above (the `(p1, i2, p3)` pattern, where `p1`
//! keeps its own third value `p3`).

use std::rc::Rc;

use super::state::PartialAssignment;
use super::tree::{AugmentingTree, Found};
use crate::instance::{CostTensor, Triple};

/// Finds a top-down move adding `i` with at most `depth` levels of
/// displacement, every added triple of current cost at most `w`. Among the
/// moves found within the node budget the one with the smallest net cost
/// change (added minus deleted) wins.
pub fn find_topdown_move(
    state: &PartialAssignment,
    t: &CostTensor,
    i: usize,
    w: f64,
    depth: u32,
    node_budget: usize,
) -> Option<AugmentingTree> {
    let n = state.n();
    if i >= n || state.triple_of(i).is_some() || w.is_nan() || w <= 0.0 {
        return None;
    }
    let max_held = state
        .triples()
        .iter()
        .map(|&[a, b, c]| t.value3(a, b, c))
        .fold(0.0, f64::max);
    let mut search = TopDown {
        t,
        w,
        max_held,
        work: state.clone(),
        protected: vec![false; n],
        cache: vec![None; n],
        partial: 0.0,
        added: Vec::new(),
        deleted: Vec::new(),
        best: None,
        budget: node_budget,
    };
    search.solve(&mut vec![(i, depth)]);
    let (_, added, deleted) = search.best?;
    let (added, added_costs): (Vec<Triple>, Vec<f64>) = added.into_iter().unzip();
    Some(AugmentingTree {
        root: added[0],
        added,
        added_costs,
        deleted,
        depth: 2 * depth as usize,
    })
}

type Options = Rc<[(f64, usize, usize)]>;

// Branch and bound on the net cost change. A node at depth `d` can delete at
// most `2^{d+1} - 2` further triples, each costing at most `max_held`, which
// gives the lower bounds. Triples added by the current move are never
// displaced again.
struct TopDown<'a> {
    t: &'a CostTensor,
    w: f64,
    max_held: f64,
    work: PartialAssignment,
    protected: Vec<bool>,
    cache: Vec<Option<Options>>,
    partial: f64,
    added: Vec<(Triple, f64)>,
    deleted: Vec<Triple>,
    best: Option<Found>,
    budget: usize,
}

impl TopDown<'_> {
    fn options(&mut self, p: usize) -> Options {
        let w = self.w;
        let n = self.t.n();
        let t = self.t;
        self.cache[p]
            .get_or_insert_with(|| {
                let mut opts: Vec<(f64, usize, usize)> = t
                    .plane(p)
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c <= w)
                    .map(|(e, &c)| (c, e / n, e % n))
                    .collect();
                opts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
                opts.into()
            })
            .clone()
    }

    // At the last level only currently free value pairs qualify, so they are
    // listed directly rather than filtered out of the whole plane.
    fn free_options(&self, p: usize) -> Options {
        let plane = self.t.plane(p);
        let n = self.t.n();
        let mut opts = Vec::new();
        for &a in self.work.unmatched2() {
            for &b in self.work.unmatched3() {
                let c = plane[a * n + b];
                if c <= self.w {
                    opts.push((c, a, b));
                }
            }
        }
        opts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        opts.into()
    }

    fn cheapest(&mut self, p: usize) -> f64 {
        self.options(p).first().map_or(f64::INFINITY, |o| o.0)
    }

    fn floor(&mut self, p: usize, d: u32) -> f64 {
        self.cheapest(p) - ((1u64 << (d + 1)) - 2) as f64 * self.max_held
    }

    fn beaten(&self, bound: f64) -> bool {
        self.best.as_ref().is_some_and(|b| bound >= b.0)
    }

    fn solve(&mut self, pending: &mut Vec<(usize, u32)>) {
        let Some((p, d)) = pending.pop() else {
            if !self.beaten(self.partial) {
                self.best = Some((self.partial, self.added.clone(), self.deleted.clone()));
            }
            return;
        };
        let mut rest = 0.0;
        for &(q, dq) in pending.iter() {
            rest += self.floor(q, dq);
        }
        let reach = ((1u64 << (d + 1)) - 2) as f64 * self.max_held;
        let opts = if d == 0 {
            self.free_options(p)
        } else {
            self.options(p)
        };
        for &(c, a, b) in opts.iter() {
            if self.budget == 0 || self.beaten(self.partial + rest + c - reach) {
                break;
            }
            self.budget -= 1;
            let o2 = self.work.owner2(a);
            let o3 = self.work.owner3(b);
            let mut displaced: Vec<usize> = o2.into_iter().chain(o3).collect();
            displaced.dedup();
            if displaced.iter().any(|&o| self.protected[o]) || (d == 0 && !displaced.is_empty()) {
                continue;
            }
            let removed: Vec<Triple> = displaced
                .iter()
                .map(|&o| self.work.triple_of(o).expect("owner is assigned"))
                .collect();
            let mut delta = c;
            for &[a, b, c] in &removed {
                delta -= self.t.value3(a, b, c);
            }
            let mut below = 0.0;
            for &o in &displaced {
                below += self.floor(o, d - 1);
            }
            if self.beaten(self.partial + rest + delta + below) {
                continue;
            }
            for &o in &displaced {
                self.work.remove(o).expect("owner is assigned");
            }
            self.work.insert([p, a, b]).expect("coordinates were freed");
            self.protected[p] = true;
            self.added.push(([p, a, b], c));
            self.deleted.extend_from_slice(&removed);
            self.partial += delta;
            for &o in displaced.iter().rev() {
                pending.push((o, d - 1));
            }
            self.solve(pending);
            pending.truncate(pending.len() - displaced.len());
            self.partial -= delta;
            self.deleted.truncate(self.deleted.len() - removed.len());
            self.added.pop();
            self.protected[p] = false;
            self.work.remove(p).expect("just inserted");
            for r in removed {
                self.work.insert(r).expect("restoring removed triple");
            }
        }
        pending.push((p, d));
    }
}
