//! In-memory engine for conjunctive queries with negated bounded-degree
//! relations. Negation is rewritten into not-all-equal (NAE) predicates, the
//! NAE conjunction is decomposed into a low-rank Boolean tensor via
//! generalized color coding, and the result is evaluated with semiring-based
//! variable elimination, matching the data complexity of the positive
//! subquery.

pub mod data;
pub mod error;
pub mod factor;
pub mod hypergraph;
pub mod parser;
pub mod semiring;
pub mod untangle;
pub mod widths;

pub use data::{bind, encode_database, load_csv_dir, Database, Instance, Relation};
pub use error::{Error, Result};
pub use hypergraph::{Hypergraph, Var};
pub use parser::{parse_query, validate_query, QueryIR};
