//! Rewrites negated bounded-degree atoms into NAE-form subqueries: a negated
//! relation splits into matchings, each matching's negation becomes a
//! disjunction of unary complements and one NAE gadget, and distributing the
//! disjunctions yields negation-free disjuncts.

use std::collections::{BTreeMap, BTreeSet};

use crate::data::{Instance, Relation};
use crate::error::{Error, Result};
use crate::hypergraph::Var;
use crate::parser::{Atom, QueryIR};

/// A relation in which any two distinct tuples differ in every coordinate.
#[derive(Debug, Clone)]
pub struct Matching(pub Relation);

impl Matching {
    pub fn try_new(rel: Relation) -> Option<Matching> {
        if is_matching(&rel.tuples) {
            Some(Matching(rel))
        } else {
            None
        }
    }
}

pub fn is_matching(tuples: &[Vec<u32>]) -> bool {
    for (i, a) in tuples.iter().enumerate() {
        for b in tuples.iter().skip(i + 1) {
            if a != b && a.iter().zip(b).any(|(x, y)| x == y) {
                return false;
            }
        }
    }
    true
}

/// Maximum number of tuples sharing one value in one column; 0 for an empty
/// relation.
pub fn column_degree(rel: &Relation) -> usize {
    let mut best = 0;
    for col in 0..rel.arity {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for t in &rel.tuples {
            *counts.entry(t[col]).or_default() += 1;
        }
        best = best.max(counts.values().copied().max().unwrap_or(0));
    }
    best
}

/// Greedy matching decomposition: scan tuples in sorted order and place each
/// into the lowest-index matching with no coordinate-value conflict. Uses at
/// most k(ℓ-1)+1 matchings for arity k and column degree ℓ.
pub fn matching_decompose(rel: &Relation) -> Vec<Matching> {
    let mut buckets: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut used: Vec<Vec<BTreeSet<u32>>> = Vec::new();
    for t in &rel.tuples {
        let slot = (0..buckets.len())
            .find(|m| (0..rel.arity).all(|i| !used[*m][i].contains(&t[i])))
            .unwrap_or_else(|| {
                buckets.push(Vec::new());
                used.push(vec![BTreeSet::new(); rel.arity]);
                buckets.len() - 1
            });
        for i in 0..rel.arity {
            used[slot][i].insert(t[i]);
        }
        buckets[slot].push(t.clone());
    }
    buckets
        .into_iter()
        .enumerate()
        .map(|(i, tuples)| {
            Matching(Relation::new(
                format!("{}#{}", rel.name, i + 1),
                rel.arity,
                tuples,
            ))
        })
        .collect()
}

/// One branch of a matching's negation: extra positive atoms, at most one
/// NAE atom, and the fresh variables the branch introduced.
#[derive(Debug, Clone)]
pub struct Branch {
    pub atoms: Vec<Atom>,
    pub nae: Option<BTreeSet<Var>>,
    pub fresh_vars: Vec<Var>,
}

/// The rewrite of one negated matching: the disjunction of `branches` equals
/// ¬M on the active domains, and `relations` are the generated W and
/// projection relations to register.
#[derive(Debug, Clone)]
pub struct RewriteFragment {
    pub branches: Vec<Branch>,
    pub relations: Vec<Relation>,
}

/// ¬M(X_S) for a k-ary matching with pivot position `pivot`:
/// one unary branch W_i(X_i) = Dom(X_i) \ π_i M per non-pivot position, and
/// one gadget branch binding fresh Y_j through M_{pivot,j} with
/// NAE(X_pivot, Y_...). Relation names carry `tag` to stay out of the user
/// namespace.
#[allow(clippy::too_many_arguments)]
pub fn negate_matching(
    ir: &mut QueryIR,
    matching: &Matching,
    atom_vars: &[Var],
    pivot: usize,
    domains: &BTreeMap<Var, std::sync::Arc<BTreeSet<u32>>>,
    tag: &str,
) -> Result<RewriteFragment> {
    let rel = &matching.0;
    let k = rel.arity;
    assert_eq!(atom_vars.len(), k);
    let mut branches = Vec::new();
    let mut relations = Vec::new();

    if k == 1 {
        // ¬M(X) on a unary relation is just the domain complement.
        let var = atom_vars[0];
        let dom = domains
            .get(&var)
            .ok_or_else(|| Error::RangeRestriction(ir.var_name(var).to_string()))?;
        let present = rel.column_ids(0);
        let w: Vec<Vec<u32>> = dom
            .iter()
            .filter(|id| !present.contains(id))
            .map(|id| vec![*id])
            .collect();
        let name = format!("__W_{tag}_0");
        relations.push(Relation::new(name.clone(), 1, w));
        branches.push(Branch {
            atoms: vec![Atom {
                relation: name,
                vars: vec![var],
            }],
            nae: None,
            fresh_vars: Vec::new(),
        });
        return Ok(RewriteFragment {
            branches,
            relations,
        });
    }

    for j in 0..k {
        if j == pivot {
            continue;
        }
        let var = atom_vars[j];
        let dom = domains
            .get(&var)
            .ok_or_else(|| Error::RangeRestriction(ir.var_name(var).to_string()))?;
        let present = rel.column_ids(j);
        let w: Vec<Vec<u32>> = dom
            .iter()
            .filter(|id| !present.contains(id))
            .map(|id| vec![*id])
            .collect();
        let name = format!("__W_{tag}_{j}");
        relations.push(Relation::new(name.clone(), 1, w));
        branches.push(Branch {
            atoms: vec![Atom {
                relation: name,
                vars: vec![var],
            }],
            nae: None,
            fresh_vars: Vec::new(),
        });
    }

    let mut gadget_atoms = Vec::new();
    let mut nae_vars = BTreeSet::from([atom_vars[pivot]]);
    let mut fresh_vars = Vec::new();
    for j in 0..k {
        if j == pivot {
            continue;
        }
        let y = ir.fresh_var(format!("_y_{tag}_{j}"));
        fresh_vars.push(y);
        nae_vars.insert(y);
        let name = format!("__M_{tag}_{pivot}_{j}");
        relations.push(Relation::new(
            name.clone(),
            2,
            rel.project(&[pivot, j]),
        ));
        gadget_atoms.push(Atom {
            relation: name,
            vars: vec![y, atom_vars[j]],
        });
    }
    branches.push(Branch {
        atoms: gadget_atoms,
        nae: Some(nae_vars),
        fresh_vars,
    });
    Ok(RewriteFragment {
        branches,
        relations,
    })
}

#[derive(Debug, Clone)]
pub struct NegatedAtomInfo {
    pub relation: String,
    pub arity: usize,
    pub column_degree: usize,
    pub matchings: usize,
    /// True when the relation was empty, making its negation vacuous.
    pub vacuous: bool,
}

/// The result of untangling: negation-free disjuncts over an extended
/// instance, the disjunct count B, and the degree-based bound on B.
#[derive(Debug, Clone)]
pub struct UntangledQuery {
    pub disjuncts: Vec<QueryIR>,
    pub instance: Instance,
    pub b: usize,
    pub bound: u128,
    pub atoms: Vec<NegatedAtomInfo>,
}

/// Reduce a negated atom with repeated variables to a distinct-variable atom
/// over the diagonal selection of its relation.
fn reduce_repeats(atom: &Atom, rel: &Relation) -> (Vec<Var>, Relation) {
    let mut vars: Vec<Var> = Vec::new();
    let mut keep: Vec<usize> = Vec::new();
    for (col, v) in atom.vars.iter().enumerate() {
        if !vars.contains(v) {
            vars.push(*v);
            keep.push(col);
        }
    }
    if vars.len() == atom.vars.len() {
        return (vars, rel.clone());
    }
    let tuples: Vec<Vec<u32>> = rel
        .tuples
        .iter()
        .filter(|t| {
            atom.vars.iter().enumerate().all(|(col, v)| {
                let first = atom.vars.iter().position(|w| w == v).unwrap();
                t[col] == t[first]
            })
        })
        .map(|t| keep.iter().map(|c| t[*c]).collect())
        .collect();
    (
        vars,
        Relation::new(format!("{}__diag", rel.name), keep.len(), tuples),
    )
}

/// Prop-4 style bound |S|^(|S|(D-1)+1) per negated atom, from the greedy
/// matching count D, saturating on overflow.
pub fn untangle_bound(atoms: &[NegatedAtomInfo]) -> u128 {
    let mut bound: u128 = 1;
    for info in atoms {
        if info.vacuous || info.arity < 2 {
            continue;
        }
        let exp = info.arity as u128 * (info.matchings.max(1) as u128 - 1) + 1;
        let exp = exp.min(127);
        let factor = (info.arity as u128).saturating_pow(exp as u32);
        bound = bound.saturating_mul(factor);
    }
    bound
}

fn negated_atom_infos(ir: &QueryIR, instance: &Instance) -> Result<Vec<NegatedAtomInfo>> {
    ir.negated
        .iter()
        .map(|atom| {
            let rel = instance.relation(&atom.relation)?;
            let (vars, reduced) = reduce_repeats(atom, &rel);
            let degree = column_degree(&reduced);
            let matchings = if reduced.is_empty() {
                0
            } else {
                matching_decompose(&reduced).len()
            };
            Ok(NegatedAtomInfo {
                relation: atom.relation.clone(),
                arity: vars.len(),
                column_degree: degree,
                matchings,
                vacuous: reduced.is_empty(),
            })
        })
        .collect()
}

/// Estimate the exact number of disjuncts full untangling would produce,
/// without materializing them.
pub fn estimate_disjuncts(ir: &QueryIR, instance: &Instance) -> Result<u128> {
    let infos = negated_atom_infos(ir, instance)?;
    let mut b: u128 = 1;
    for info in &infos {
        if info.vacuous {
            continue;
        }
        if info.arity == 0 {
            // A nonempty nullary relation makes its negation false.
            return Ok(0);
        }
        for _ in 0..info.matchings {
            b = b.saturating_mul(info.arity.max(1) as u128);
        }
    }
    Ok(b)
}

/// Untangle `ir` into a disjunction of NAE-form queries (Prop-4 rewrite):
/// each negated relation splits into matchings, each matching's negation
/// into |S| branches, and the cross product of branch choices yields the
/// disjuncts. Generated relations are registered in the returned instance.
pub fn untangle_query(ir: &QueryIR, instance: &Instance) -> Result<UntangledQuery> {
    untangle_with_cap(ir, instance, usize::MAX)
}

pub fn untangle_with_cap(
    ir: &QueryIR,
    instance: &Instance,
    cap: usize,
) -> Result<UntangledQuery> {
    let domains = crate::data::resolve_domains(ir, instance)?;
    let mut base = ir.clone();
    base.negated.clear();

    let infos = negated_atom_infos(ir, instance)?;
    let mut extended = instance.clone();
    let mut fragments: Vec<RewriteFragment> = Vec::new();
    let mut unsatisfiable = false;

    for (ai, atom) in ir.negated.iter().enumerate() {
        let rel = instance.relation(&atom.relation)?;
        let (vars, reduced) = reduce_repeats(atom, &rel);
        if reduced.is_empty() {
            continue; // ¬∅ is vacuously true
        }
        if vars.is_empty() {
            unsatisfiable = true;
            continue;
        }
        for (mi, matching) in matching_decompose(&reduced).into_iter().enumerate() {
            let tag = format!("{}_{ai}_m{mi}", atom.relation);
            let fragment = negate_matching(&mut base, &matching, &vars, 0, &domains, &tag)?;
            for rel in &fragment.relations {
                extended = extended.with_relation(rel.clone());
            }
            fragments.push(fragment);
        }
    }

    let mut disjuncts: Vec<QueryIR> = if unsatisfiable {
        Vec::new()
    } else {
        vec![base.clone()]
    };
    for fragment in &fragments {
        let mut next = Vec::with_capacity(disjuncts.len() * fragment.branches.len());
        for d in &disjuncts {
            for branch in &fragment.branches {
                if next.len() > cap {
                    return Err(Error::BudgetExceeded(format!(
                        "untangling produces more than {cap} disjuncts"
                    )));
                }
                let mut q = d.clone();
                q.positive.extend(branch.atoms.iter().cloned());
                if let Some(nae) = &branch.nae {
                    q.nae.push(nae.clone());
                }
                next.push(q);
            }
        }
        disjuncts = next;
    }

    debug_assert!(disjuncts.iter().all(|d| d.negated.is_empty()));
    let b = disjuncts.len();
    let bound = untangle_bound(&infos);
    debug_assert!(unsatisfiable || b as u128 <= bound);
    Ok(UntangledQuery {
        disjuncts,
        instance: extended,
        b,
        bound,
        atoms: infos,
    })
}

/// Compact untangling: a single NAE-form disjunct. Every matching projection
/// is augmented with a bottom sentinel row per uncovered domain value, which
/// folds the unary W branches into the NAE gadget, so no cross product of
/// branches arises. Used when the Prop-4 disjunct count exceeds the budget.
pub fn compact_untangle(ir: &QueryIR, instance: &Instance) -> Result<UntangledQuery> {
    let domains = crate::data::resolve_domains(ir, instance)?;
    let bottom = instance.synthetic_id();
    let mut base = ir.clone();
    base.negated.clear();
    let infos = negated_atom_infos(ir, instance)?;
    let mut extended = instance.clone();
    let mut unsatisfiable = false;

    for (ai, atom) in ir.negated.iter().enumerate() {
        let rel = instance.relation(&atom.relation)?;
        let (vars, reduced) = reduce_repeats(atom, &rel);
        if reduced.is_empty() {
            continue;
        }
        if vars.is_empty() {
            unsatisfiable = true;
            continue;
        }
        let k = vars.len();
        if k == 1 {
            let dom = domains
                .get(&vars[0])
                .ok_or_else(|| Error::RangeRestriction(ir.var_name(vars[0]).to_string()))?;
            let present = reduced.column_ids(0);
            let w: Vec<Vec<u32>> = dom
                .iter()
                .filter(|id| !present.contains(id))
                .map(|id| vec![*id])
                .collect();
            let name = format!("__W_{}_{ai}", atom.relation);
            extended = extended.with_relation(Relation::new(name.clone(), 1, w));
            base.positive.push(Atom {
                relation: name,
                vars: vec![vars[0]],
            });
            continue;
        }
        for (mi, matching) in matching_decompose(&reduced).into_iter().enumerate() {
            let pivot = 0usize;
            let mut nae_vars = BTreeSet::from([vars[pivot]]);
            for j in 1..k {
                let y = base.fresh_var(format!("_y_{}_{ai}_m{mi}_{j}", atom.relation));
                nae_vars.insert(y);
                // π_{pivot,j} M plus a bottom row for every domain value of
                // X_j without a partner: the sentinel differs from every
                // real pivot value, so NAE holds exactly when ¬M does.
                let mut pairs = matching.0.project(&[pivot, j]);
                let covered: BTreeSet<u32> = pairs.iter().map(|t| t[1]).collect();
                let dom = domains.get(&vars[j]).ok_or_else(|| {
                    Error::RangeRestriction(ir.var_name(vars[j]).to_string())
                })?;
                for id in dom.iter() {
                    if !covered.contains(id) {
                        pairs.push(vec![bottom, *id]);
                    }
                }
                let name = format!("__M_{}_{ai}_m{mi}_{pivot}_{j}", atom.relation);
                extended = extended.with_relation(Relation::new(name.clone(), 2, pairs));
                base.positive.push(Atom {
                    relation: name,
                    vars: vec![y, vars[j]],
                });
            }
            base.nae.push(nae_vars);
        }
    }

    let disjuncts = if unsatisfiable { Vec::new() } else { vec![base] };
    let b = disjuncts.len();
    let bound = untangle_bound(&infos);
    Ok(UntangledQuery {
        disjuncts,
        instance: extended,
        b,
        bound,
        atoms: infos,
    })
}
