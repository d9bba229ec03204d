use std::collections::BTreeSet;

/// Variable identifier; an index into a query's symbol table.
pub type Var = usize;

/// A multi-hypergraph over variables. Edges form a multiset: the same vertex
/// set may occur with multiplicity, and singleton edges are permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub vertices: BTreeSet<Var>,
    pub edges: Vec<BTreeSet<Var>>,
}

impl Hypergraph {
    pub fn new(vertices: impl IntoIterator<Item = Var>) -> Self {
        Hypergraph {
            vertices: vertices.into_iter().collect(),
            edges: Vec::new(),
        }
    }

    pub fn from_edges<I, E>(edges: I) -> Self
    where
        I: IntoIterator<Item = E>,
        E: IntoIterator<Item = Var>,
    {
        let edges: Vec<BTreeSet<Var>> = edges
            .into_iter()
            .map(|e| e.into_iter().collect())
            .collect();
        let vertices = edges.iter().flatten().copied().collect();
        Hypergraph { vertices, edges }
    }

    pub fn add_edge(&mut self, edge: impl IntoIterator<Item = Var>) {
        let edge: BTreeSet<Var> = edge.into_iter().collect();
        self.vertices.extend(edge.iter().copied());
        self.edges.push(edge);
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Edges incident to `v`.
    pub fn incident(&self, v: Var) -> impl Iterator<Item = &BTreeSet<Var>> {
        self.edges.iter().filter(move |e| e.contains(&v))
    }

    /// Maximum vertex degree (number of incident edges, multiplicity counted).
    pub fn max_degree(&self) -> usize {
        self.vertices
            .iter()
            .map(|v| self.incident(*v).count())
            .max()
            .unwrap_or(0)
    }

    /// The restriction H[B]: vertex set `B`, edges `e ∩ B` for every edge
    /// meeting `B`. Duplicate restricted edges are kept (multiset semantics);
    /// callers that only need the distinct sets can dedup.
    pub fn restrict(&self, bag: &BTreeSet<Var>) -> Hypergraph {
        let edges: Vec<BTreeSet<Var>> = self
            .edges
            .iter()
            .map(|e| e.intersection(bag).copied().collect::<BTreeSet<_>>())
            .filter(|e: &BTreeSet<Var>| !e.is_empty())
            .collect();
        Hypergraph {
            vertices: bag.clone(),
            edges,
        }
    }

    /// True when every pair of distinct vertices inside `block` avoids
    /// containing a full hyperedge (used by quotient enumeration).
    pub fn edge_inside(&self, block: &BTreeSet<Var>) -> bool {
        self.edges.iter().any(|e| e.is_subset(block))
    }
}
