use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Var};

/// Fractional edge cover of one bag: nonnegative edge weights covering every
/// bag vertex with total weight >= 1, together with the cover cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BagCover {
    pub bag: BTreeSet<Var>,
    /// Weights over the distinct nonempty restricted edges of H[bag].
    pub weights: Vec<(BTreeSet<Var>, BigRational)>,
    pub cost: BigRational,
}

impl BagCover {
    /// Replays the weights: exact check, no tolerance.
    pub fn verify(&self) -> bool {
        if self.weights.iter().any(|(_, w)| w < &BigRational::zero()) {
            return false;
        }
        for v in &self.bag {
            let total: BigRational = self
                .weights
                .iter()
                .filter(|(e, _)| e.contains(v))
                .map(|(_, w)| w.clone())
                .sum();
            if total < BigRational::one() {
                return false;
            }
        }
        let total: BigRational = self.weights.iter().map(|(_, w)| w.clone()).sum();
        total == self.cost
    }
}

/// Exact fractional edge cover number ρ*_H(B) of the restriction H[B].
///
/// Solved through the dual (fractional independent set) LP, which starts
/// feasible at zero: maximize Σ y_v subject to Σ_{v∈e} y_v <= 1 per edge.
/// Simplex with Bland's rule over rationals terminates without tolerances;
/// the primal weights are read off the slack columns of the objective row.
pub fn fractional_edge_cover(h: &Hypergraph, bag: &BTreeSet<Var>) -> Result<BagCover> {
    if bag.is_empty() {
        return Ok(BagCover {
            bag: bag.clone(),
            weights: Vec::new(),
            cost: BigRational::zero(),
        });
    }
    let mut edges: Vec<BTreeSet<Var>> = h
        .edges
        .iter()
        .map(|e| e.intersection(bag).copied().collect::<BTreeSet<_>>())
        .filter(|e: &BTreeSet<Var>| !e.is_empty())
        .collect();
    edges.sort();
    edges.dedup();

    let vars: Vec<Var> = bag.iter().copied().collect();
    for v in &vars {
        if !edges.iter().any(|e| e.contains(v)) {
            return Err(Error::InfeasibleCover(format!("X{v}")));
        }
    }

    let n = vars.len();
    let m = edges.len();
    let cols = n + m + 1;
    let rhs = cols - 1;
    // Row 0 is the objective; rows 1..=m the edge constraints with slacks.
    let mut t: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); cols]; m + 1];
    for j in 0..n {
        t[0][j] = -BigRational::one();
    }
    for (i, e) in edges.iter().enumerate() {
        for (j, v) in vars.iter().enumerate() {
            if e.contains(v) {
                t[i + 1][j] = BigRational::one();
            }
        }
        t[i + 1][n + i] = BigRational::one();
        t[i + 1][rhs] = BigRational::one();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Bland: entering column = lowest index with negative reduced cost.
        let Some(enter) = (0..n + m).find(|j| t[0][*j] < BigRational::zero()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 1..=m {
            if t[i][enter] > BigRational::zero() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[i - 1] < basis[leave.unwrap() - 1])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return Err(Error::ConstructionBug(
                "edge cover dual unbounded after coverage check".into(),
            ));
        };
        let pivot = t[leave][enter].clone();
        for x in t[leave].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..=m {
            if i != leave && !t[i][enter].is_zero() {
                let factor = t[i][enter].clone();
                for j in 0..cols {
                    let delta = &factor * &t[leave][j];
                    t[i][j] -= delta;
                }
            }
        }
        basis[leave - 1] = enter;
    }

    let cost = t[0][rhs].clone();
    let weights: Vec<(BTreeSet<Var>, BigRational)> = edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), t[0][n + i].clone()))
        .filter(|(_, w)| !w.is_zero())
        .collect();
    let cover = BagCover {
        bag: bag.clone(),
        weights,
        cost,
    };
    debug_assert!(cover.verify(), "LP certificate failed to replay");
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn triangle_is_three_halves() {
        let h = Hypergraph::from_edges([[0, 1], [1, 2], [0, 2]]);
        let cover = fractional_edge_cover(&h, &BTreeSet::from([0, 1, 2])).unwrap();
        assert_eq!(cover.cost, rat(3, 2));
        assert!(cover.verify());
    }

    #[test]
    fn single_edge_bag_costs_one() {
        let h = Hypergraph::from_edges([[0, 1, 2]]);
        let cover = fractional_edge_cover(&h, &BTreeSet::from([0, 1, 2])).unwrap();
        assert_eq!(cover.cost, rat(1, 1));
    }

    #[test]
    fn path_needs_two_edges() {
        let h = Hypergraph::from_edges([[0, 1], [1, 2]]);
        let cover = fractional_edge_cover(&h, &BTreeSet::from([0, 1, 2])).unwrap();
        assert_eq!(cover.cost, rat(2, 1));
    }

    #[test]
    fn uncovered_vertex_is_infeasible() {
        let mut h = Hypergraph::from_edges([[0, 1]]);
        h.vertices.insert(9);
        let err = fractional_edge_cover(&h, &BTreeSet::from([0, 1, 9])).unwrap_err();
        assert!(matches!(err, Error::InfeasibleCover(_)));
    }

    #[test]
    fn empty_bag_costs_zero() {
        let h = Hypergraph::from_edges([[0, 1]]);
        let cover = fractional_edge_cover(&h, &BTreeSet::new()).unwrap();
        assert!(cover.cost.is_zero());
    }

    /// Brute-force check on small instances: compare against a fine grid of
    /// basic solutions via vertex covers of all subsets (LP optimum must be
    /// <= any integral cover and >= matching-based lower bounds).
    #[test]
    fn k4_clique_is_two() {
        let h = Hypergraph::from_edges([[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]);
        let cover = fractional_edge_cover(&h, &BTreeSet::from([0, 1, 2, 3])).unwrap();
        assert_eq!(cover.cost, rat(2, 1));
    }

    #[test]
    fn pentagon_is_five_halves() {
        let h = Hypergraph::from_edges([[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]);
        let cover = fractional_edge_cover(&h, &BTreeSet::from([0, 1, 2, 3, 4])).unwrap();
        assert_eq!(cover.cost, rat(5, 2));
    }
}
