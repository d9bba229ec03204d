use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hypergraph::Var;
use crate::parser::{DomainDecl, QueryIR};

/// Per-column dictionary: dense ids in first-seen order.
#[derive(Debug, Clone, Default)]
pub struct Dict {
    pub values: Vec<String>,
    index: HashMap<String, u32>,
}

impl Dict {
    pub fn intern(&mut self, value: &str) -> u32 {
        if let Some(id) = self.index.get(value) {
            return *id;
        }
        let id = self.values.len() as u32;
        self.values.push(value.to_string());
        self.index.insert(value.to_string(), id);
        id
    }

    pub fn id(&self, value: &str) -> Option<u32> {
        self.index.get(value).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// An ingested table: column names, per-column dictionaries, and the
/// dictionary-encoded rows, deduplicated and sorted lexicographically.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub dicts: Vec<Dict>,
    pub rows: Vec<Vec<u32>>,
}

impl Table {
    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn decode_row(&self, row: &[u32]) -> Vec<String> {
        row.iter()
            .enumerate()
            .map(|(i, id)| self.dicts[i].values[*id as usize].clone())
            .collect()
    }
}

/// The ingested database. `n_max` is the maximum relation cardinality N.
#[derive(Debug, Clone, Default)]
pub struct Database {
    pub tables: BTreeMap<String, Table>,
    pub n_max: usize,
}

/// Dictionary-encode raw tables. Ids are dense per column domain in
/// first-seen order; duplicate rows collapse.
pub fn encode_database(
    raw: impl IntoIterator<Item = (String, Vec<String>, Vec<Vec<String>>)>,
) -> Result<Database> {
    let mut db = Database::default();
    for (name, columns, rows) in raw {
        let arity = columns.len();
        let mut dicts = vec![Dict::default(); arity];
        let mut encoded: Vec<Vec<u32>> = Vec::with_capacity(rows.len());
        for (ri, row) in rows.iter().enumerate() {
            if row.len() != arity {
                return Err(Error::Ingest {
                    table: name.clone(),
                    row: ri,
                    got: row.len(),
                    expected: arity,
                });
            }
            let ids = row
                .iter()
                .enumerate()
                .map(|(ci, v)| dicts[ci].intern(v))
                .collect();
            encoded.push(ids);
        }
        encoded.sort();
        encoded.dedup();
        db.n_max = db.n_max.max(encoded.len());
        db.tables.insert(
            name.clone(),
            Table {
                name,
                columns,
                dicts,
                rows: encoded,
            },
        );
    }
    Ok(db)
}

/// Load every `*.csv` file in a directory as one relation named after the
/// file stem. The header row carries the column names.
pub fn load_csv_dir(dir: &Path, delimiter: u8) -> Result<Database> {
    let mut raw = Vec::new();
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    for path in paths {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("table")
            .to_string();
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .has_headers(true)
            .flexible(true)
            .from_path(&path)?;
        let columns: Vec<String> = reader
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            rows.push(record.iter().map(|f| f.trim().to_string()).collect());
        }
        raw.push((name, columns, rows));
    }
    encode_database(raw)
}

/// A relation bound into a query instance: tuples over the instance's
/// unified id space, duplicate-free and sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: Vec<Vec<u32>>,
}

impl Relation {
    pub fn new(name: impl Into<String>, arity: usize, mut tuples: Vec<Vec<u32>>) -> Self {
        debug_assert!(tuples.iter().all(|t| t.len() == arity));
        tuples.sort();
        tuples.dedup();
        Relation {
            name: name.into(),
            arity,
            tuples,
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[u32]) -> bool {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }

    /// Projection onto the given column indices, deduplicated.
    pub fn project(&self, cols: &[usize]) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = self
            .tuples
            .iter()
            .map(|t| cols.iter().map(|c| t[*c]).collect())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn column_ids(&self, col: usize) -> BTreeSet<u32> {
        self.tuples.iter().map(|t| t[col]).collect()
    }
}

/// A query bound against a database: relations re-encoded into one shared id
/// space so that joins and NAE comparisons compare ids directly, plus the
/// per-variable active domains. Immutable once built.
#[derive(Debug, Clone)]
pub struct Instance {
    pub store: BTreeMap<String, Arc<Relation>>,
    pub domains: BTreeMap<Var, Arc<BTreeSet<u32>>>,
    /// Unified id -> value. Ids at or past `values.len()` are synthetic
    /// sentinels introduced by rewriting and never reach user output.
    pub values: Vec<String>,
    /// Domain declarations resolved to (relation, 0-based column).
    pub decl_columns: BTreeMap<Var, (String, usize)>,
    pub n_max: usize,
}

impl Instance {
    /// Active domain of a variable.
    pub fn active_domain(&self, var: Var, ir: &QueryIR) -> Result<Arc<BTreeSet<u32>>> {
        self.domains
            .get(&var)
            .cloned()
            .ok_or_else(|| Error::UnknownVariable(ir.var_name(var).to_string()))
    }

    pub fn decode(&self, id: u32) -> &str {
        self.values
            .get(id as usize)
            .map(|s| s.as_str())
            .unwrap_or("_")
    }

    pub fn relation(&self, name: &str) -> Result<Arc<Relation>> {
        self.store
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    /// Registers a derived relation, returning a new instance (instances are
    /// immutable; rewrites extend a clone).
    pub fn with_relation(&self, rel: Relation) -> Instance {
        let mut next = self.clone();
        next.store.insert(rel.name.clone(), Arc::new(rel));
        next
    }

    pub fn with_domain(&self, var: Var, dom: BTreeSet<u32>) -> Instance {
        let mut next = self.clone();
        next.domains.insert(var, Arc::new(dom));
        next
    }

    /// Allocates a fresh synthetic id (used for the bottom sentinel).
    pub fn synthetic_id(&self) -> u32 {
        self.values.len() as u32
    }
}

/// Re-encode the relations referenced by `ir` into a single id space and
/// resolve every variable's active domain. Ids are assigned in sorted value
/// order, deterministically.
pub fn bind(db: &Database, ir: &QueryIR) -> Result<Instance> {
    let mut needed: BTreeSet<&str> = BTreeSet::new();
    for atom in ir.positive.iter().chain(&ir.negated) {
        needed.insert(&atom.relation);
    }
    for decl in ir.domain_decls.values() {
        needed.insert(&decl.relation);
    }

    // Unified dictionary over every value in every referenced table.
    let mut all_values: BTreeSet<&str> = BTreeSet::new();
    for name in &needed {
        let table = db
            .tables
            .get(*name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
        for dict in &table.dicts {
            all_values.extend(dict.values.iter().map(|v| v.as_str()));
        }
    }
    let values: Vec<String> = all_values.iter().map(|v| v.to_string()).collect();
    let index: HashMap<&str, u32> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i as u32))
        .collect();

    let mut store = BTreeMap::new();
    let mut n_max = 0;
    for name in &needed {
        let table = &db.tables[*name];
        let tuples: Vec<Vec<u32>> = table
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(ci, id)| index[table.dicts[ci].values[*id as usize].as_str()])
                    .collect()
            })
            .collect();
        let rel = Relation::new(name.to_string(), table.arity(), tuples);
        n_max = n_max.max(rel.len());
        store.insert(name.to_string(), Arc::new(rel));
    }

    // Active domains: union over positive-atom occurrences, then domain
    // declarations for variables not covered positively.
    let mut domains: BTreeMap<Var, BTreeSet<u32>> = BTreeMap::new();
    for atom in &ir.positive {
        let rel = &store[&atom.relation];
        if rel.arity != atom.vars.len() {
            return Err(Error::ArityMismatch {
                relation: atom.relation.clone(),
                got: atom.vars.len(),
                expected: rel.arity,
            });
        }
        for (col, var) in atom.vars.iter().enumerate() {
            let ids = rel.column_ids(col);
            domains.entry(*var).or_default().extend(ids);
        }
    }
    for atom in &ir.negated {
        let rel = &store[&atom.relation];
        if rel.arity != atom.vars.len() {
            return Err(Error::ArityMismatch {
                relation: atom.relation.clone(),
                got: atom.vars.len(),
                expected: rel.arity,
            });
        }
    }
    let mut decl_columns = BTreeMap::new();
    for (var, decl) in &ir.domain_decls {
        let rel = &store[&decl.relation];
        let col = decl.resolve_column(db.tables.get(&decl.relation))?;
        if col >= rel.arity {
            return Err(Error::ArityMismatch {
                relation: decl.relation.clone(),
                got: col + 1,
                expected: rel.arity,
            });
        }
        domains.entry(*var).or_default().extend(rel.column_ids(col));
        decl_columns.insert(*var, (decl.relation.clone(), col));
    }

    Ok(Instance {
        store,
        domains: domains
            .into_iter()
            .map(|(v, d)| (v, Arc::new(d)))
            .collect(),
        values,
        decl_columns,
        n_max,
    })
}

/// Per-variable active domains of `ir` against an instance store: union of
/// positive-atom column ids, plus declared domains. Every range-restricted
/// variable of a rewritten disjunct resolves here.
pub fn resolve_domains(
    ir: &QueryIR,
    instance: &Instance,
) -> Result<BTreeMap<Var, Arc<BTreeSet<u32>>>> {
    let mut domains: BTreeMap<Var, BTreeSet<u32>> = BTreeMap::new();
    for atom in &ir.positive {
        let rel = instance.relation(&atom.relation)?;
        for (col, var) in atom.vars.iter().enumerate() {
            domains.entry(*var).or_default().extend(rel.column_ids(col));
        }
    }
    for (var, (rel_name, col)) in &instance.decl_columns {
        let rel = instance.relation(rel_name)?;
        domains
            .entry(*var)
            .or_default()
            .extend(rel.column_ids(*col));
    }
    Ok(domains
        .into_iter()
        .map(|(v, d)| (v, Arc::new(d)))
        .collect())
}

impl DomainDecl {
    /// Resolve a 1-based index or a named column to a 0-based position.
    pub fn resolve_column(&self, table: Option<&Table>) -> Result<usize> {
        match &self.column {
            crate::parser::ColumnRef::Index(i) => {
                if *i == 0 {
                    return Err(Error::UnknownRelation(format!(
                        "{}.0 (columns are 1-based)",
                        self.relation
                    )));
                }
                Ok(i - 1)
            }
            crate::parser::ColumnRef::Name(name) => {
                let table =
                    table.ok_or_else(|| Error::UnknownRelation(self.relation.clone()))?;
                table
                    .columns
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| {
                        Error::UnknownRelation(format!("{}.{}", self.relation, name))
                    })
            }
        }
    }
}
