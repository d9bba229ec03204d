use std::collections::BTreeSet;

use crate::data::Relation;
use crate::error::{Error, Result};
use crate::hypergraph::Var;
use crate::semiring::Semiring;

/// A sparse factor: an ordered schema and a map tuple -> semiring value with
/// implicit zero elsewhere. Canonical form stores no zeros and keeps entries
/// sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor<V> {
    pub schema: Vec<Var>,
    pub entries: Vec<(Vec<u32>, V)>,
}

impl<V: Clone> Factor<V> {
    pub fn new<S: Semiring<Value = V>>(
        semiring: &S,
        schema: Vec<Var>,
        mut entries: Vec<(Vec<u32>, V)>,
    ) -> Self {
        entries.retain(|(_, v)| !semiring.is_zero(v));
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        // Merge duplicate keys additively.
        let mut merged: Vec<(Vec<u32>, V)> = Vec::with_capacity(entries.len());
        for (key, value) in entries {
            match merged.last_mut() {
                Some((last, acc)) if *last == key => semiring.plus_assign(acc, &value),
                _ => merged.push((key, value)),
            }
        }
        merged.retain(|(_, v)| !semiring.is_zero(v));
        Factor {
            schema,
            entries: merged,
        }
    }

    /// Boolean-style factor from a bound relation atom: value `one` on every
    /// tuple. Repeated variables inside the atom induce an equality
    /// selection and a deduplicated schema.
    pub fn from_atom<S: Semiring<Value = V>>(
        semiring: &S,
        rel: &Relation,
        atom_vars: &[Var],
    ) -> Self {
        let mut schema: Vec<Var> = Vec::new();
        let mut keep_cols: Vec<usize> = Vec::new();
        for (col, v) in atom_vars.iter().enumerate() {
            if !schema.contains(v) {
                schema.push(*v);
                keep_cols.push(col);
            }
        }
        let entries: Vec<(Vec<u32>, V)> = rel
            .tuples
            .iter()
            .filter(|t| {
                atom_vars.iter().enumerate().all(|(col, v)| {
                    let first = atom_vars.iter().position(|w| w == v).unwrap();
                    t[col] == t[first]
                })
            })
            .map(|t| {
                (
                    keep_cols.iter().map(|c| t[*c]).collect(),
                    semiring.one(),
                )
            })
            .collect();
        Factor::new(semiring, schema, entries)
    }

    /// Unary factor assigning `one` to each id in `ids`.
    pub fn unary_ones<S: Semiring<Value = V>>(
        semiring: &S,
        var: Var,
        ids: impl IntoIterator<Item = u32>,
    ) -> Self {
        let entries = ids
            .into_iter()
            .map(|id| (vec![id], semiring.one()))
            .collect();
        Factor::new(semiring, vec![var], entries)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value_of<S: Semiring<Value = V>>(&self, semiring: &S, key: &[u32]) -> V {
        match self
            .entries
            .binary_search_by(|(k, _)| k.as_slice().cmp(key))
        {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => semiring.zero(),
        }
    }

    /// Reorder columns to `new_schema` (a permutation of the schema).
    pub fn reordered<S: Semiring<Value = V>>(&self, semiring: &S, new_schema: &[Var]) -> Self {
        assert_eq!(new_schema.len(), self.schema.len());
        let perm: Vec<usize> = new_schema
            .iter()
            .map(|v| self.schema.iter().position(|w| w == v).unwrap())
            .collect();
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| {
                (
                    perm.iter().map(|i| k[*i]).collect::<Vec<u32>>(),
                    v.clone(),
                )
            })
            .collect();
        Factor::new(semiring, new_schema.to_vec(), entries)
    }
}

/// Indicator projection of `f` onto `T`: schema(f) ∩ T, value one wherever
/// some extension has nonzero value.
pub fn indicator_projection<S: Semiring>(
    semiring: &S,
    f: &Factor<S::Value>,
    target: &BTreeSet<Var>,
) -> Result<Factor<S::Value>> {
    let keep: Vec<usize> = f
        .schema
        .iter()
        .enumerate()
        .filter(|(_, v)| target.contains(v))
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyProjection);
    }
    let schema: Vec<Var> = keep.iter().map(|i| f.schema[*i]).collect();
    let mut keys: Vec<Vec<u32>> = f
        .entries
        .iter()
        .map(|(k, _)| keep.iter().map(|i| k[*i]).collect())
        .collect();
    keys.sort();
    keys.dedup();
    let entries = keys.into_iter().map(|k| (k, semiring.one())).collect();
    Ok(Factor::new(semiring, schema, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Boolean;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn indicator_basic() {
        let s = Boolean;
        let f = Factor::new(&s, vec![0, 1], vec![(vec![1, 2], true)]);
        let p = indicator_projection(&s, &f, &BTreeSet::from([0])).unwrap();
        assert_eq!(p.schema, vec![0]);
        assert_eq!(p.entries, vec![(vec![1], true)]);
    }

    #[test]
    fn indicator_idempotent_on_extensions() {
        let s = Boolean;
        let f = Factor::new(
            &s,
            vec![0, 1],
            vec![(vec![1, 2], true), (vec![1, 3], true)],
        );
        let p = indicator_projection(&s, &f, &BTreeSet::from([0])).unwrap();
        assert_eq!(p.entries.len(), 1);
    }

    #[test]
    fn indicator_disjoint_schema_errors() {
        let s = Boolean;
        let f = Factor::new(&s, vec![0, 1], vec![(vec![1, 2], true)]);
        let err = indicator_projection(&s, &f, &BTreeSet::from([7])).unwrap_err();
        assert!(matches!(err, Error::EmptyProjection));
    }

    /// Random Boolean factor versus brute-force existential projection.
    #[test]
    fn indicator_matches_bruteforce() {
        let s = Boolean;
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let arity = rng.gen_range(1..4usize);
            let schema: Vec<Var> = (0..arity).collect();
            let mut entries = Vec::new();
            for _ in 0..rng.gen_range(0..20) {
                let key: Vec<u32> = (0..arity).map(|_| rng.gen_range(0..4)).collect();
                entries.push((key, true));
            }
            let f = Factor::new(&s, schema.clone(), entries);
            let t_len = rng.gen_range(1..=arity);
            let target: BTreeSet<Var> = (0..t_len).collect();
            let p = indicator_projection(&s, &f, &target).unwrap();
            let keep: Vec<usize> = schema
                .iter()
                .enumerate()
                .filter(|(_, v)| target.contains(v))
                .map(|(i, _)| i)
                .collect();
            let mut expect: Vec<Vec<u32>> = f
                .entries
                .iter()
                .map(|(k, _)| keep.iter().map(|i| k[*i]).collect())
                .collect();
            expect.sort();
            expect.dedup();
            let got: Vec<Vec<u32>> = p.entries.iter().map(|(k, _)| k.clone()).collect();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn repeated_var_atom_selects_equal_columns() {
        let s = Boolean;
        let rel = Relation::new(
            "R",
            2,
            vec![vec![1, 1], vec![1, 2], vec![3, 3]],
        );
        let f = Factor::from_atom(&s, &rel, &[5, 5]);
        assert_eq!(f.schema, vec![5]);
        let keys: Vec<Vec<u32>> = f.entries.iter().map(|(k, _)| k.clone()).collect();
        assert_eq!(keys, vec![vec![1], vec![3]]);
    }
}
