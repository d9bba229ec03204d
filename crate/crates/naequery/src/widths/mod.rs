//! Vertex orderings, elimination hypergraph sequences, fractional edge
//! covers, optimal-width planning, and tree decompositions.

pub mod lp;

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Var};
pub use lp::{fractional_edge_cover, BagCover};

/// A listing of all vertices of a hypergraph. When `free_prefix` is set, the
/// first `|F|` positions are exactly the free variables (the ordering lies in
/// Σ_F). Elimination proceeds from the back of the order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrdering {
    pub order: Vec<Var>,
    pub free_prefix: Option<BTreeSet<Var>>,
}

impl VertexOrdering {
    pub fn new(order: Vec<Var>) -> Self {
        VertexOrdering {
            order,
            free_prefix: None,
        }
    }

    pub fn f_first(order: Vec<Var>, free: BTreeSet<Var>) -> Result<Self> {
        let prefix: BTreeSet<Var> = order.iter().take(free.len()).copied().collect();
        if prefix != free {
            return Err(Error::PlanError(format!(
                "ordering {:?} does not start with the free variables {:?}",
                order, free
            )));
        }
        Ok(VertexOrdering {
            order,
            free_prefix: Some(free),
        })
    }

    pub fn is_permutation_of(&self, h: &Hypergraph) -> bool {
        let set: BTreeSet<Var> = self.order.iter().copied().collect();
        set == h.vertices && self.order.len() == h.vertices.len()
    }
}

/// One step of the elimination hypergraph sequence: the variable eliminated,
/// the set J of all variables it touches, and the hypergraph in which the
/// step took place.
#[derive(Debug, Clone)]
pub struct ElimStep {
    pub var: Var,
    pub j_set: BTreeSet<Var>,
    pub graph: Hypergraph,
}

/// The elimination hypergraph sequence of `order`, listed in elimination
/// order (last position of the ordering first). Each step removes the edges
/// incident to the eliminated vertex and adds the edge J - {v}.
pub fn elimination_sequence(h: &Hypergraph, order: &VertexOrdering) -> Result<Vec<ElimStep>> {
    if !order.is_permutation_of(h) {
        return Err(Error::PlanError(format!(
            "ordering {:?} is not a permutation of the vertex set",
            order.order
        )));
    }
    let mut current = h.clone();
    let mut steps = Vec::with_capacity(order.order.len());
    for &v in order.order.iter().rev() {
        let incident: Vec<BTreeSet<Var>> = current
            .edges
            .iter()
            .filter(|e| e.contains(&v))
            .cloned()
            .collect();
        let mut j: BTreeSet<Var> = BTreeSet::from([v]);
        for e in &incident {
            j.extend(e.iter().copied());
        }
        steps.push(ElimStep {
            var: v,
            j_set: j.clone(),
            graph: current.clone(),
        });
        current.edges.retain(|e| !e.contains(&v));
        let mut new_edge = j;
        new_edge.remove(&v);
        if !new_edge.is_empty() {
            current.edges.push(new_edge);
        }
        current.vertices.remove(&v);
    }
    Ok(steps)
}

/// J(v, eliminated): the bag produced when `v` is eliminated after the set
/// `eliminated`, independent of the order inside `eliminated`. Vertices of
/// `eliminated` reachable from `v` through eliminated vertices pull their
/// incident edges into the bag.
fn bag_after(h: &Hypergraph, v: Var, eliminated: &BTreeSet<Var>) -> BTreeSet<Var> {
    let mut reach: BTreeSet<Var> = BTreeSet::from([v]);
    loop {
        let mut grew = false;
        for e in &h.edges {
            if e.iter().any(|u| reach.contains(u)) {
                for u in e {
                    if eliminated.contains(u) && reach.insert(*u) {
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut bag: BTreeSet<Var> = BTreeSet::from([v]);
    for e in &h.edges {
        if e.iter().any(|u| reach.contains(u)) {
            bag.extend(e.iter().copied());
        }
    }
    bag.retain(|u| !eliminated.contains(u));
    bag
}

/// Exact per-bag covers with the maximum as the width value.
#[derive(Debug, Clone)]
pub struct WidthEstimate {
    pub value: BigRational,
    pub bags: Vec<BagCover>,
    /// Set when the ordering came from the heuristic rather than the exact
    /// subset DP.
    pub heuristic: bool,
}

impl WidthEstimate {
    pub fn verify(&self) -> bool {
        self.bags.iter().all(|b| b.verify())
            && self.value
                == self
                    .bags
                    .iter()
                    .map(|b| b.cost.clone())
                    .max()
                    .unwrap_or_else(BigRational::zero)
    }
}

/// Induced fractional hypertree width of an ordering: max over elimination
/// steps of ρ*_H(J), with ρ* always taken in the original hypergraph.
pub fn induced_fhtw(h: &Hypergraph, order: &VertexOrdering) -> Result<WidthEstimate> {
    let steps = elimination_sequence(h, order)?;
    let mut bags = Vec::with_capacity(steps.len());
    let mut value = BigRational::zero();
    for step in &steps {
        let cover = fractional_edge_cover(h, &step.j_set)?;
        if cover.cost > value {
            value = cover.cost.clone();
        }
        bags.push(cover);
    }
    Ok(WidthEstimate {
        value,
        bags,
        heuristic: false,
    })
}

struct DpContext<'a> {
    h: &'a Hypergraph,
    verts: Vec<Var>,
    cover_memo: HashMap<BTreeSet<Var>, BigRational>,
}

impl<'a> DpContext<'a> {
    fn cost(&mut self, v: Var, eliminated: &BTreeSet<Var>) -> Result<BigRational> {
        let bag = bag_after(self.h, v, eliminated);
        if let Some(c) = self.cover_memo.get(&bag) {
            return Ok(c.clone());
        }
        let cover = fractional_edge_cover(self.h, &bag)?;
        self.cover_memo.insert(bag, cover.cost.clone());
        Ok(cover.cost)
    }

    fn mask_to_set(&self, group: &[usize], mask: usize) -> BTreeSet<Var> {
        group
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, gi)| self.verts[*gi])
            .collect()
    }
}

/// Exact minimizer of the induced fractional hypertree width over Σ_F via
/// dynamic programming over subsets of eliminated vertices: all non-free
/// variables are eliminated first, then the free ones.
pub fn optimal_ordering(
    h: &Hypergraph,
    free: &BTreeSet<Var>,
    cap: usize,
) -> Result<(VertexOrdering, WidthEstimate)> {
    let n = h.num_vertices();
    if n > cap {
        return Err(Error::PlanningBudgetExceeded { vertices: n, cap });
    }
    let verts: Vec<Var> = h.vertices.iter().copied().collect();
    let bound: Vec<usize> = (0..n).filter(|i| !free.contains(&verts[*i])).collect();
    let free_idx: Vec<usize> = (0..n).filter(|i| free.contains(&verts[*i])).collect();
    let mut ctx = DpContext {
        h,
        verts: verts.clone(),
        cover_memo: HashMap::new(),
    };

    // Phase over one vertex group: dp[mask] = minimal max bag cost to
    // eliminate exactly `mask`, with `base` already gone.
    let run_phase = |ctx: &mut DpContext,
                         group: &[usize],
                         base: &BTreeSet<Var>|
     -> Result<(Vec<Option<BigRational>>, Vec<usize>)> {
        let full = 1usize << group.len();
        let mut dp: Vec<Option<BigRational>> = vec![None; full];
        let mut choice: Vec<usize> = vec![usize::MAX; full];
        dp[0] = Some(BigRational::zero());
        for mask in 1..full {
            let mut best: Option<BigRational> = None;
            let mut best_v = usize::MAX;
            for (i, gi) in group.iter().enumerate() {
                if mask >> i & 1 == 0 {
                    continue;
                }
                let prev_mask = mask & !(1 << i);
                let prev = dp[prev_mask].clone().unwrap();
                let mut eliminated = ctx.mask_to_set(group, prev_mask);
                eliminated.extend(base.iter().copied());
                let step_cost = ctx.cost(ctx.verts[*gi], &eliminated)?;
                let total = prev.max(step_cost);
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                    best_v = i;
                }
            }
            dp[mask] = best;
            choice[mask] = best_v;
        }
        Ok((dp, choice))
    };

    let (dp1, choice1) = run_phase(&mut ctx, &bound, &BTreeSet::new())?;
    let all_bound: BTreeSet<Var> = bound.iter().map(|i| verts[*i]).collect();
    let (dp2, choice2) = run_phase(&mut ctx, &free_idx, &all_bound)?;

    // Reconstruct: elimination order = bound vertices (phase 1) then free.
    let mut elim: Vec<Var> = Vec::with_capacity(n);
    let mut mask = (1usize << bound.len()) - 1;
    while mask != 0 {
        let i = choice1[mask];
        elim.push(verts[bound[i]]);
        mask &= !(1 << i);
    }
    // Phase-1 reconstruction walks from the full mask down: the recorded
    // choice is the LAST vertex eliminated within that mask, so collect then
    // reverse within the phase.
    elim.reverse();
    let mut elim2: Vec<Var> = Vec::new();
    let mut mask = (1usize << free_idx.len()) - 1;
    while mask != 0 {
        let i = choice2[mask];
        elim2.push(verts[free_idx[i]]);
        mask &= !(1 << i);
    }
    elim2.reverse();

    // Full elimination order: bound first, then free; the positional
    // ordering is its reverse, which puts the free variables first.
    let mut order: Vec<Var> = Vec::with_capacity(n);
    order.extend(elim2.iter().rev());
    order.extend(elim.iter().rev());
    let ordering = VertexOrdering::f_first(order, free.clone())?;

    let estimate = induced_fhtw(h, &ordering)?;
    let expected = dp2[(1usize << free_idx.len()) - 1]
        .clone()
        .unwrap()
        .max(dp1[(1usize << bound.len()) - 1].clone().unwrap());
    debug_assert_eq!(estimate.value, expected, "DP width mismatch");
    Ok((ordering, estimate))
}

/// Min-fill heuristic ordering for hypergraphs past the planning cap.
/// Eliminates non-free vertices first; ties break to the smallest variable.
pub fn min_fill_ordering(h: &Hypergraph, free: &BTreeSet<Var>) -> VertexOrdering {
    let verts: Vec<Var> = h.vertices.iter().copied().collect();
    let mut adj: HashMap<Var, BTreeSet<Var>> = verts.iter().map(|v| (*v, BTreeSet::new())).collect();
    for e in &h.edges {
        for a in e {
            for b in e {
                if a != b {
                    adj.get_mut(a).unwrap().insert(*b);
                }
            }
        }
    }
    let mut remaining: BTreeSet<Var> = h.vertices.clone();
    let mut elim: Vec<Var> = Vec::with_capacity(verts.len());
    while !remaining.is_empty() {
        let candidates: Vec<Var> = remaining
            .iter()
            .copied()
            .filter(|v| !free.contains(v))
            .collect();
        let pool = if candidates.is_empty() {
            remaining.iter().copied().collect::<Vec<_>>()
        } else {
            candidates
        };
        let fill = |v: Var, adj: &HashMap<Var, BTreeSet<Var>>| -> usize {
            let nbrs: Vec<Var> = adj[&v]
                .iter()
                .copied()
                .filter(|u| remaining.contains(u))
                .collect();
            let mut count = 0;
            for (i, a) in nbrs.iter().enumerate() {
                for b in nbrs.iter().skip(i + 1) {
                    if !adj[a].contains(b) {
                        count += 1;
                    }
                }
            }
            count
        };
        let v = pool
            .iter()
            .copied()
            .min_by_key(|v| (fill(*v, &adj), *v))
            .unwrap();
        let nbrs: Vec<Var> = adj[&v]
            .iter()
            .copied()
            .filter(|u| remaining.contains(u))
            .collect();
        for (i, a) in nbrs.iter().enumerate() {
            for b in nbrs.iter().skip(i + 1) {
                adj.get_mut(a).unwrap().insert(*b);
                adj.get_mut(b).unwrap().insert(*a);
            }
        }
        remaining.remove(&v);
        elim.push(v);
    }
    let order: Vec<Var> = elim.into_iter().rev().collect();
    VertexOrdering {
        order,
        free_prefix: Some(free.clone()),
    }
}

/// Plan an ordering: exact subset DP within the cap, min-fill beyond it
/// (flagged as heuristic in the estimate).
pub fn plan_ordering(
    h: &Hypergraph,
    free: &BTreeSet<Var>,
    cap: usize,
) -> Result<(VertexOrdering, WidthEstimate)> {
    match optimal_ordering(h, free, cap) {
        Ok(pair) => Ok(pair),
        Err(Error::PlanningBudgetExceeded { .. }) => {
            let ordering = min_fill_ordering(h, free);
            let mut estimate = induced_fhtw(h, &ordering)?;
            estimate.heuristic = true;
            Ok((ordering, estimate))
        }
        Err(e) => Err(e),
    }
}

/// A tree decomposition: bags, tree edges, and an optional F-connex witness
/// (indices of bags whose union is exactly F, forming a connected subtree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<Var>>,
    pub edges: Vec<(usize, usize)>,
    pub witness: Option<Vec<usize>>,
}

impl TreeDecomposition {
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|(a, b)| {
                if *a == i {
                    Some(*b)
                } else if *b == i {
                    Some(*a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Structural validation: every hyperedge covered, running intersection
    /// holds, the tree is a tree, and the witness (if any) is connected with
    /// union exactly `free`.
    pub fn validate(&self, h: &Hypergraph, free: Option<&BTreeSet<Var>>) -> Result<()> {
        let nb = self.bags.len();
        if nb == 0 {
            return Err(Error::PlanError("empty tree decomposition".into()));
        }
        if self.edges.len() != nb - 1 {
            return Err(Error::PlanError("decomposition is not a tree".into()));
        }
        // Connectivity of the whole tree.
        if self.component(0, |_| true).len() != nb {
            return Err(Error::PlanError("decomposition tree is disconnected".into()));
        }
        for e in &h.edges {
            if !self.bags.iter().any(|b| e.is_subset(b)) {
                return Err(Error::PlanError(format!("hyperedge {e:?} uncovered")));
            }
        }
        let vertices: BTreeSet<Var> = self.bags.iter().flatten().copied().collect();
        for v in &vertices {
            let holders: Vec<usize> = (0..nb).filter(|i| self.bags[*i].contains(v)).collect();
            let start = holders[0];
            let comp = self.component(start, |i| self.bags[i].contains(v));
            if comp.len() != holders.len() {
                return Err(Error::PlanError(format!(
                    "running intersection fails for X{v}"
                )));
            }
        }
        if let (Some(witness), Some(free)) = (&self.witness, free) {
            let union: BTreeSet<Var> = witness
                .iter()
                .flat_map(|i| self.bags[*i].iter().copied())
                .collect();
            if &union != free {
                return Err(Error::PlanError("witness union is not F".into()));
            }
            if !witness.is_empty() {
                let wset: BTreeSet<usize> = witness.iter().copied().collect();
                let comp = self.component(witness[0], |i| wset.contains(&i));
                if comp.len() != witness.len() {
                    return Err(Error::PlanError("witness subtree disconnected".into()));
                }
            }
        }
        Ok(())
    }

    fn component(&self, start: usize, keep: impl Fn(usize) -> bool) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in self.neighbors(i) {
                if keep(j) && seen.insert(j) {
                    stack.push(j);
                }
            }
        }
        seen
    }
}

/// Builds the tree decomposition whose bags are the elimination sets J of
/// `order`: the parent of bag j is the bag of the highest-position vertex in
/// J - {v_j}. Bags subsumed by a neighbor are merged away, so a chain query
/// yields exactly its path of two-variable bags.
pub fn ordering_to_tree_decomposition(
    h: &Hypergraph,
    order: &VertexOrdering,
) -> Result<TreeDecomposition> {
    let steps = elimination_sequence(h, order)?;
    let n = order.order.len();
    let pos: HashMap<Var, usize> = order
        .order
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, i))
        .collect();
    // steps[k] eliminates order[n-1-k]; bag index by position j = n-1-k.
    let mut bags: Vec<BTreeSet<Var>> = vec![BTreeSet::new(); n];
    for (k, step) in steps.iter().enumerate() {
        bags[n - 1 - k] = step.j_set.clone();
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for (j, bag) in bags.iter().enumerate() {
        let parent = bag
            .iter()
            .filter(|v| pos[v] != j)
            .map(|v| pos[v])
            .max();
        match parent {
            Some(p) => edges.push((p, j)),
            None => roots.push(j),
        }
    }
    for pair in roots.windows(2) {
        edges.push((pair[0], pair[1]));
    }

    let f = order.free_prefix.clone().unwrap_or_default();
    let witness: Option<Vec<usize>> = if f.is_empty() {
        None
    } else {
        Some((0..f.len()).collect())
    };

    let mut td = TreeDecomposition {
        bags,
        edges,
        witness,
    };
    prune_subsumed(&mut td);
    Ok(td)
}

/// Merge bags that are subsets of a neighbor. Witness bags only merge into
/// witness bags so the F-connex property survives.
fn prune_subsumed(td: &mut TreeDecomposition) {
    loop {
        let witness: BTreeSet<usize> = td.witness.iter().flatten().copied().collect();
        let mut merged = None;
        'outer: for i in 0..td.bags.len() {
            for j in td.neighbors(i) {
                if td.bags[i].is_subset(&td.bags[j])
                    && (!witness.contains(&i) || witness.contains(&j))
                {
                    merged = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((gone, into)) = merged else { break };
        let mut new_edges: Vec<(usize, usize)> = Vec::new();
        for (a, b) in &td.edges {
            let (a, b) = (*a, *b);
            if (a, b) == (gone, into) || (b, a) == (gone, into) {
                continue;
            }
            let a2 = if a == gone { into } else { a };
            let b2 = if b == gone { into } else { b };
            if a2 != b2 {
                new_edges.push((a2, b2));
            }
        }
        td.edges = new_edges;
        td.bags.remove(gone);
        let remap = |x: usize| if x > gone { x - 1 } else { x };
        td.edges = td
            .edges
            .iter()
            .map(|(a, b)| (remap(*a), remap(*b)))
            .collect();
        if let Some(w) = &mut td.witness {
            let mut next: Vec<usize> = w
                .iter()
                .filter(|x| **x != gone)
                .map(|x| remap(*x))
                .collect();
            if witness.contains(&gone) && !next.contains(&remap(into)) {
                next.push(remap(into));
            }
            next.sort();
            next.dedup();
            *w = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn elimination_on_path() {
        let h = Hypergraph::from_edges([[1, 2], [2, 3]]);
        let steps =
            elimination_sequence(&h, &VertexOrdering::new(vec![1, 2, 3])).unwrap();
        assert_eq!(steps[0].j_set, BTreeSet::from([2, 3]));
        assert_eq!(steps[1].j_set, BTreeSet::from([1, 2]));
        assert_eq!(steps[2].j_set, BTreeSet::from([1]));
    }

    #[test]
    fn elimination_single_vertex() {
        let h = Hypergraph::new([7]);
        let steps = elimination_sequence(&h, &VertexOrdering::new(vec![7])).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].j_set, BTreeSet::from([7]));
    }

    #[test]
    fn elimination_triangle_last_step_full() {
        let h = Hypergraph::from_edges([[1, 2], [2, 3], [1, 3]]);
        let steps =
            elimination_sequence(&h, &VertexOrdering::new(vec![1, 2, 3])).unwrap();
        assert_eq!(steps[0].j_set, BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn induced_width_path_is_one() {
        let h = Hypergraph::from_edges([[0, 1], [1, 2], [2, 3]]);
        let w = induced_fhtw(&h, &VertexOrdering::new(vec![0, 1, 2, 3])).unwrap();
        assert_eq!(w.value, rat(1, 1));
        assert!(w.verify());
    }

    #[test]
    fn induced_width_triangle_three_halves() {
        let h = Hypergraph::from_edges([[0, 1], [1, 2], [0, 2]]);
        for perm in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
            let w = induced_fhtw(&h, &VertexOrdering::new(perm.to_vec())).unwrap();
            assert_eq!(w.value, rat(3, 2));
        }
    }

    #[test]
    fn induced_width_single_edge() {
        let h = Hypergraph::from_edges([[0, 1, 2]]);
        let w = induced_fhtw(&h, &VertexOrdering::new(vec![0, 1, 2])).unwrap();
        assert_eq!(w.value, rat(1, 1));
    }

    #[test]
    fn optimal_walk_body_width_one() {
        // k-walk body: path of binary edges.
        let h = Hypergraph::from_edges([[0, 1], [1, 2], [2, 3], [3, 4]]);
        let (ordering, w) = optimal_ordering(&h, &BTreeSet::new(), 16).unwrap();
        assert_eq!(w.value, rat(1, 1));
        assert!(ordering.is_permutation_of(&h));
    }

    #[test]
    fn optimal_triangle_three_halves() {
        let h = Hypergraph::from_edges([[0, 1], [1, 2], [0, 2]]);
        let (_, w) = optimal_ordering(&h, &BTreeSet::new(), 16).unwrap();
        assert_eq!(w.value, rat(3, 2));
    }

    #[test]
    fn optimal_single_edge_with_free() {
        let h = Hypergraph::from_edges([[0, 1]]);
        let free = BTreeSet::from([0, 1]);
        let (ordering, w) = optimal_ordering(&h, &free, 16).unwrap();
        assert_eq!(w.value, rat(1, 1));
        let prefix: BTreeSet<Var> = ordering.order.iter().take(2).copied().collect();
        assert_eq!(prefix, free);
    }

    #[test]
    fn cap_exceeded_reported() {
        let h = Hypergraph::from_edges([[0, 1], [1, 2]]);
        let err = optimal_ordering(&h, &BTreeSet::new(), 2).unwrap_err();
        assert!(matches!(err, Error::PlanningBudgetExceeded { .. }));
    }

    #[test]
    fn bag_after_matches_incremental_definition() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..60 {
            let n = rng.gen_range(2..7usize);
            let mut h = Hypergraph::new(0..n);
            for _ in 0..rng.gen_range(1..6) {
                let k = rng.gen_range(1..=3.min(n));
                let mut verts: Vec<Var> = (0..n).collect();
                verts.shuffle(&mut rng);
                h.add_edge(verts.into_iter().take(k));
            }
            let mut order: Vec<Var> = (0..n).collect();
            order.shuffle(&mut rng);
            let ordering = VertexOrdering::new(order.clone());
            let steps = elimination_sequence(&h, &ordering).unwrap();
            let mut eliminated = BTreeSet::new();
            for step in &steps {
                let direct = bag_after(&h, step.var, &eliminated);
                assert_eq!(direct, step.j_set, "order {order:?}");
                eliminated.insert(step.var);
            }
        }
    }

    /// Random hypergraph over 0..n with every vertex covered by some edge,
    /// mirroring the range-restriction guarantee on query hypergraphs.
    fn random_covering_hypergraph(
        rng: &mut StdRng,
        n: usize,
        edges: usize,
        max_arity: usize,
    ) -> Hypergraph {
        let mut h = Hypergraph::new(0..n);
        for _ in 0..edges {
            let k = rng.gen_range(1..=max_arity.min(n));
            let mut verts: Vec<Var> = (0..n).collect();
            verts.shuffle(rng);
            h.add_edge(verts.into_iter().take(k));
        }
        for v in 0..n {
            if h.incident(v).next().is_none() {
                h.add_edge([v]);
            }
        }
        h
    }

    #[test]
    fn random_orderings_never_beat_optimal() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..30 {
            let n = rng.gen_range(3..8usize);
            let edges = rng.gen_range(1..7);
            let h = random_covering_hypergraph(&mut rng, n, edges, 3);
            let (_, best) = optimal_ordering(&h, &BTreeSet::new(), 16).unwrap();
            for _ in 0..5 {
                let mut order: Vec<Var> = (0..n).collect();
                order.shuffle(&mut rng);
                let w = induced_fhtw(&h, &VertexOrdering::new(order)).unwrap();
                assert!(w.value >= best.value);
            }
        }
    }

    #[test]
    fn chain_decomposition_has_five_two_var_bags() {
        // Chain body E(X1,X2),...,E(X5,X6) as in the colors-as-join example.
        let h = Hypergraph::from_edges([[1, 2], [2, 3], [3, 4], [4, 5], [5, 6]]);
        let ordering = VertexOrdering::new(vec![1, 2, 3, 4, 5, 6]);
        let td = ordering_to_tree_decomposition(&h, &ordering).unwrap();
        td.validate(&h, None).unwrap();
        assert_eq!(td.bags.len(), 5);
        let mut bags = td.bags.clone();
        bags.sort();
        let expect: Vec<BTreeSet<Var>> = (1..=5)
            .map(|i| BTreeSet::from([i, i + 1]))
            .collect();
        assert_eq!(bags, expect);
    }

    #[test]
    fn single_edge_decomposition_single_bag() {
        let h = Hypergraph::from_edges([[0, 1, 2]]);
        let td =
            ordering_to_tree_decomposition(&h, &VertexOrdering::new(vec![0, 1, 2])).unwrap();
        assert_eq!(td.bags.len(), 1);
        td.validate(&h, None).unwrap();
    }

    #[test]
    fn random_decompositions_validate() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..40 {
            let n = rng.gen_range(2..8usize);
            let edges = rng.gen_range(1..6);
            let h = random_covering_hypergraph(&mut rng, n, edges, 3);
            let f_len = rng.gen_range(0..=n);
            let mut verts: Vec<Var> = (0..n).collect();
            verts.shuffle(&mut rng);
            let free: BTreeSet<Var> = verts.iter().take(f_len).copied().collect();
            let (ordering, _) = optimal_ordering(&h, &free, 16).unwrap();
            let prefix: BTreeSet<Var> =
                ordering.order.iter().take(free.len()).copied().collect();
            assert_eq!(prefix, free, "F-prefix property violated");
            let td = ordering_to_tree_decomposition(&h, &ordering).unwrap();
            let f_opt = if free.is_empty() { None } else { Some(&free) };
            td.validate(&h, f_opt).unwrap();
        }
    }

    #[test]
    fn min_fill_produces_valid_ordering() {
        let h = Hypergraph::from_edges([[0, 1], [1, 2], [2, 3], [3, 0], [0, 2]]);
        let free = BTreeSet::from([0]);
        let ordering = min_fill_ordering(&h, &free);
        assert!(ordering.is_permutation_of(&h));
        assert_eq!(ordering.order[0], 0);
        induced_fhtw(&h, &ordering).unwrap();
    }
}
