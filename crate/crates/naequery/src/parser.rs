use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::data::Database;
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Var};

/// Reference to a relation column in a `dom(X, R.col)` declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    /// 1-based position.
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainDecl {
    pub relation: String,
    pub column: ColumnRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub relation: String,
    pub vars: Vec<Var>,
}

/// A unary predicate attached to one variable. Materialized id sets arise
/// internally (rewrites, tensor terms); the surface syntax produces none.
#[derive(Debug, Clone)]
pub enum UnaryPredicate {
    Ids(Arc<BTreeSet<u32>>),
}

impl PartialEq for UnaryPredicate {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (UnaryPredicate::Ids(a), UnaryPredicate::Ids(b)) => a == b,
        }
    }
}
impl Eq for UnaryPredicate {}

/// The query intermediate representation every rewriting pass transforms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryIR {
    pub head_name: String,
    /// Symbol table: variable id -> name.
    pub var_names: Vec<String>,
    pub free: Vec<Var>,
    pub positive: Vec<Atom>,
    pub negated: Vec<Atom>,
    /// Not-all-equal atoms; each is a set of >= 2 variables.
    pub nae: Vec<BTreeSet<Var>>,
    pub filters: Vec<(Var, UnaryPredicate)>,
    pub domain_decls: BTreeMap<Var, DomainDecl>,
}

impl QueryIR {
    pub fn var_name(&self, v: Var) -> &str {
        &self.var_names[v]
    }

    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = self.free.iter().copied().collect();
        for atom in self.positive.iter().chain(&self.negated) {
            out.extend(atom.vars.iter().copied());
        }
        for s in &self.nae {
            out.extend(s.iter().copied());
        }
        for (v, _) in &self.filters {
            out.insert(*v);
        }
        out.extend(self.domain_decls.keys().copied());
        out
    }

    pub fn fresh_var(&mut self, name: String) -> Var {
        let v = self.var_names.len();
        self.var_names.push(name);
        v
    }

    /// Hypergraph of the positive body plus declared/filtered singletons.
    pub fn body_hypergraph(&self) -> Hypergraph {
        let mut h = Hypergraph::new(self.all_vars());
        for atom in &self.positive {
            h.add_edge(atom.vars.iter().copied());
        }
        for (v, _) in &self.filters {
            h.add_edge([*v]);
        }
        for v in self.domain_decls.keys() {
            h.add_edge([*v]);
        }
        h
    }

    /// Hypergraph G = (U, A) of the NAE conjunction.
    pub fn nae_structure(&self) -> Hypergraph {
        let mut h = Hypergraph::new(self.nae.iter().flatten().copied());
        for s in &self.nae {
            h.add_edge(s.iter().copied());
        }
        h
    }

    /// Canonical surface syntax; `parse ∘ print` is the identity on the IR.
    pub fn print(&self) -> String {
        let mut items: Vec<String> = Vec::new();
        for atom in &self.positive {
            items.push(self.print_atom(atom));
        }
        for atom in &self.negated {
            items.push(format!("!{}", self.print_atom(atom)));
        }
        for s in &self.nae {
            let names: Vec<&str> = s.iter().map(|v| self.var_name(*v)).collect();
            if names.len() == 2 {
                items.push(format!("{} != {}", names[0], names[1]));
            } else {
                items.push(format!("NAE({})", names.join(",")));
            }
        }
        for (v, decl) in &self.domain_decls {
            let col = match &decl.column {
                ColumnRef::Index(i) => i.to_string(),
                ColumnRef::Name(n) => n.clone(),
            };
            items.push(format!(
                "dom({}, {}.{})",
                self.var_name(*v),
                decl.relation,
                col
            ));
        }
        let head_vars: Vec<&str> = self.free.iter().map(|v| self.var_name(*v)).collect();
        format!(
            "{}({}) :- {}.",
            self.head_name,
            head_vars.join(","),
            items.join(", ")
        )
    }

    fn print_atom(&self, atom: &Atom) -> String {
        let names: Vec<&str> = atom.vars.iter().map(|v| self.var_name(*v)).collect();
        format!("{}({})", atom.relation, names.join(","))
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Neq,
    Implies,
    Eof,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'%') | Some(b'#') => {
                    while let Some(c) = self.bump() {
                        if c == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize, usize)> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, line, col));
        };
        let tok = match c {
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b'.' => {
                self.bump();
                Tok::Dot
            }
            b'!' => {
                self.bump();
                if self.peek() == Some(b'=') {
                    self.bump();
                    Tok::Neq
                } else {
                    Tok::Bang
                }
            }
            b':' => {
                self.bump();
                if self.peek() == Some(b'-') {
                    self.bump();
                    Tok::Implies
                } else {
                    return Err(self.err("expected ':-'"));
                }
            }
            c if c.is_ascii_digit() => {
                let mut n = 0usize;
                while let Some(d) = self.peek() {
                    if d.is_ascii_digit() {
                        n = n * 10 + (d - b'0') as usize;
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Int(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut s = String::new();
                while let Some(d) = self.peek() {
                    if d.is_ascii_alphanumeric() || d == b'_' {
                        s.push(d as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => return Err(self.err(format!("unexpected character '{}'", other as char))),
        };
        Ok((tok, line, col))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self> {
        let mut lex = Lexer::new(src);
        let (tok, line, col) = lex.next()?;
        Ok(Parser {
            lex,
            tok,
            line,
            col,
        })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn advance(&mut self) -> Result<()> {
        let (tok, line, col) = self.lex.next()?;
        self.tok = tok;
        self.line = line;
        self.col = col;
        Ok(())
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.tok == tok {
            self.advance()
        } else {
            Err(self.err(format!("expected {what}, found {:?}", self.tok)))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match std::mem::replace(&mut self.tok, Tok::Eof) {
            Tok::Ident(s) => {
                self.advance()?;
                Ok(s)
            }
            other => {
                self.tok = other;
                Err(self.err(format!("expected {what}, found {:?}", self.tok)))
            }
        }
    }
}

/// Parse the surface syntax
/// `Head(vars) :- Atom, ..., !Atom, ..., X != Y, NAE(X,Y,Z), dom(X, Rel.col).`
pub fn parse_query(text: &str) -> Result<QueryIR> {
    let mut p = Parser::new(text)?;
    let head_name = p.ident("head name")?;
    let mut ir = QueryIR {
        head_name,
        var_names: Vec::new(),
        free: Vec::new(),
        positive: Vec::new(),
        negated: Vec::new(),
        nae: Vec::new(),
        filters: Vec::new(),
        domain_decls: BTreeMap::new(),
    };
    let mut vars: BTreeMap<String, Var> = BTreeMap::new();
    let mut intern = |ir: &mut QueryIR, name: String| -> Var {
        *vars.entry(name.clone()).or_insert_with(|| {
            ir.var_names.push(name);
            ir.var_names.len() - 1
        })
    };

    p.expect(Tok::LParen, "'('")?;
    if p.tok != Tok::RParen {
        loop {
            let name = p.ident("head variable")?;
            let v = intern(&mut ir, name);
            ir.free.push(v);
            if p.tok == Tok::Comma {
                p.advance()?;
            } else {
                break;
            }
        }
    }
    p.expect(Tok::RParen, "')'")?;
    p.expect(Tok::Implies, "':-'")?;

    loop {
        match p.tok.clone() {
            Tok::Bang => {
                p.advance()?;
                let name = p.ident("relation name")?;
                let atom = parse_atom(&mut p, &mut ir, &mut intern, name)?;
                ir.negated.push(atom);
            }
            Tok::Ident(name) => {
                p.advance()?;
                if name == "NAE" {
                    let atom = parse_atom(&mut p, &mut ir, &mut intern, name)?;
                    let set: BTreeSet<Var> = atom.vars.into_iter().collect();
                    if set.len() < 2 {
                        return Err(p.err("NAE needs at least 2 distinct variables"));
                    }
                    ir.nae.push(set);
                } else if name == "dom" {
                    p.expect(Tok::LParen, "'('")?;
                    let var_name = p.ident("variable")?;
                    let v = intern(&mut ir, var_name);
                    p.expect(Tok::Comma, "','")?;
                    let rel = p.ident("relation name")?;
                    let column = if p.tok == Tok::Dot {
                        p.advance()?;
                        match p.tok.clone() {
                            Tok::Int(i) => {
                                p.advance()?;
                                ColumnRef::Index(i)
                            }
                            Tok::Ident(n) => {
                                p.advance()?;
                                ColumnRef::Name(n)
                            }
                            _ => return Err(p.err("expected column index or name")),
                        }
                    } else {
                        ColumnRef::Index(1)
                    };
                    p.expect(Tok::RParen, "')'")?;
                    ir.domain_decls.insert(
                        v,
                        DomainDecl {
                            relation: rel,
                            column,
                        },
                    );
                } else if p.tok == Tok::LParen {
                    let atom = parse_atom(&mut p, &mut ir, &mut intern, name)?;
                    ir.positive.push(atom);
                } else if p.tok == Tok::Neq {
                    // X != Y desugars to binary NAE.
                    p.advance()?;
                    let rhs = p.ident("variable")?;
                    let a = intern(&mut ir, name);
                    let b = intern(&mut ir, rhs);
                    if a == b {
                        return Err(p.err("disequality needs two distinct variables"));
                    }
                    ir.nae.push(BTreeSet::from([a, b]));
                } else {
                    return Err(p.err("expected '(', '!=' after identifier"));
                }
            }
            Tok::Dot => break,
            _ => return Err(p.err(format!("unexpected token {:?}", p.tok))),
        }
        match p.tok {
            Tok::Comma => p.advance()?,
            Tok::Dot => break,
            _ => return Err(p.err(format!("expected ',' or '.', found {:?}", p.tok))),
        }
    }
    p.expect(Tok::Dot, "'.'")?;

    // Head safety: every free variable must occur somewhere in the body.
    let body_vars: BTreeSet<Var> = ir
        .positive
        .iter()
        .chain(&ir.negated)
        .flat_map(|a| a.vars.iter().copied())
        .chain(ir.nae.iter().flatten().copied())
        .chain(ir.domain_decls.keys().copied())
        .collect();
    for v in &ir.free {
        if !body_vars.contains(v) {
            return Err(Error::UnsafeHead(ir.var_name(*v).to_string()));
        }
    }
    Ok(ir)
}

fn parse_atom(
    p: &mut Parser,
    ir: &mut QueryIR,
    intern: &mut impl FnMut(&mut QueryIR, String) -> Var,
    relation: String,
) -> Result<Atom> {
    p.expect(Tok::LParen, "'('")?;
    let mut vars = Vec::new();
    if p.tok != Tok::RParen {
        loop {
            let name = p.ident("variable")?;
            vars.push(intern(ir, name));
            if p.tok == Tok::Comma {
                p.advance()?;
            } else {
                break;
            }
        }
    }
    p.expect(Tok::RParen, "')'")?;
    Ok(Atom { relation, vars })
}

/// Check the IR against a database: referenced relations exist with the
/// right arity, and every variable used in the head, a negated atom, or an
/// NAE atom is range-restricted by a positive atom or a domain declaration.
pub fn validate_query(ir: &QueryIR, db: &Database) -> Result<()> {
    for atom in ir.positive.iter().chain(&ir.negated) {
        let table = db
            .tables
            .get(&atom.relation)
            .ok_or_else(|| Error::UnknownRelation(atom.relation.clone()))?;
        if table.arity() != atom.vars.len() {
            return Err(Error::ArityMismatch {
                relation: atom.relation.clone(),
                got: atom.vars.len(),
                expected: table.arity(),
            });
        }
    }
    for (v, decl) in &ir.domain_decls {
        let table = db
            .tables
            .get(&decl.relation)
            .ok_or_else(|| Error::UnknownRelation(decl.relation.clone()))?;
        let col = decl.resolve_column(Some(table))?;
        if col >= table.arity() {
            return Err(Error::ArityMismatch {
                relation: decl.relation.clone(),
                got: col + 1,
                expected: table.arity(),
            });
        }
        let _ = v;
    }
    let restricted: BTreeSet<Var> = ir
        .positive
        .iter()
        .flat_map(|a| a.vars.iter().copied())
        .chain(ir.domain_decls.keys().copied())
        .collect();
    let must_restrict: BTreeSet<Var> = ir
        .free
        .iter()
        .copied()
        .chain(ir.negated.iter().flat_map(|a| a.vars.iter().copied()))
        .chain(ir.nae.iter().flatten().copied())
        .chain(ir.filters.iter().map(|(v, _)| *v))
        .collect();
    for v in must_restrict {
        if !restricted.contains(&v) {
            return Err(Error::RangeRestriction(ir.var_name(v).to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::encode_database;

    fn small_db() -> Database {
        encode_database([
            (
                "R".to_string(),
                vec!["a".to_string(), "b".to_string()],
                vec![vec!["1".to_string(), "2".to_string()]],
            ),
            (
                "S".to_string(),
                vec!["a".to_string(), "b".to_string()],
                vec![vec!["2".to_string(), "3".to_string()]],
            ),
            (
                "T".to_string(),
                vec!["a".to_string(), "b".to_string()],
                vec![vec!["1".to_string(), "3".to_string()]],
            ),
        ])
        .unwrap()
    }

    #[test]
    fn worked_example_shape() {
        let ir = parse_query("C() :- R(X,Y), S(Y,Z), !T(X,Z).").unwrap();
        assert_eq!(ir.positive.len(), 2);
        assert_eq!(ir.negated.len(), 1);
        assert!(ir.free.is_empty());
        validate_query(&ir, &small_db()).unwrap();
    }

    #[test]
    fn k_path_disequalities() {
        let ir = parse_query("P() :- E(X1,X2), E(X2,X3), E(X3,X4), X1 != X3, X1 != X4, X2 != X4.")
            .unwrap();
        assert_eq!(ir.positive.len(), 3);
        assert_eq!(ir.nae.len(), 3);
        assert!(ir.nae.iter().all(|s| s.len() == 2));
    }

    #[test]
    fn identity_query() {
        let ir = parse_query("Q(X) :- R(X).").unwrap();
        assert_eq!(ir.free.len(), 1);
        assert_eq!(ir.positive.len(), 1);
    }

    #[test]
    fn unsafe_head_rejected() {
        let err = parse_query("Q(W) :- R(X,Y).").unwrap_err();
        assert!(matches!(err, Error::UnsafeHead(ref v) if v == "W"));
    }

    #[test]
    fn unrestricted_negation_rejected() {
        let ir = parse_query("Q() :- !T(X,Y).").unwrap();
        let err = validate_query(&ir, &small_db()).unwrap_err();
        assert!(matches!(err, Error::RangeRestriction(_)));
    }

    #[test]
    fn nae_only_var_with_domain_decl_passes() {
        let ir = parse_query("Q() :- R(X,Y), NAE(X,W), dom(W, R.1).").unwrap();
        validate_query(&ir, &small_db()).unwrap();
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_query("Q() :- R(X,©").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, .. }));
    }

    #[test]
    fn print_parse_round_trip() {
        let texts = [
            "C() :- R(X,Y), S(Y,Z), !T(X,Z).",
            "Q(X,Z) :- R(X,Y), S(Y,Z), X != Z, NAE(X,Y,Z), dom(X, R.1).",
            "Q(X) :- R(X,X).",
        ];
        for text in texts {
            let ir = parse_query(text).unwrap();
            let printed = ir.print();
            let reparsed = parse_query(&printed).unwrap();
            assert_eq!(ir, reparsed, "round trip failed for {text}");
            assert_eq!(printed, reparsed.print());
        }
    }
}
