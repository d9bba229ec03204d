//! Reed-Solomon outer codes and Kautz-Singleton style disjunct matrices.

use super::gf::{next_prime_power, Gf};
use crate::error::{Error, Result};

/// A Reed-Solomon code over F_q: codeword j is the evaluation of the
/// degree-(d-1) polynomial whose coefficients are the base-q digits of j at
/// n fixed points. Minimum distance n-d+1; any symbol of any codeword is
/// computable on demand (strongly explicit).
#[derive(Debug, Clone)]
pub struct RsCode {
    pub q: usize,
    pub d: usize,
    pub n: usize,
    field: Gf,
    points: Vec<u32>,
}

impl RsCode {
    pub fn new(q: usize, d: usize, n: usize) -> Result<RsCode> {
        if d == 0 || d > n || n > q {
            return Err(Error::RsParams { d, n, q });
        }
        let field = Gf::new(q).ok_or(Error::RsParams { d, n, q })?;
        let points: Vec<u32> = (0..n as u32).collect();
        Ok(RsCode {
            q,
            d,
            n,
            field,
            points,
        })
    }

    pub fn num_codewords(&self) -> u128 {
        (self.q as u128).pow(self.d as u32)
    }

    pub fn min_distance(&self) -> usize {
        self.n - self.d + 1
    }

    /// Symbol at `pos` of codeword `msg` (Horner evaluation).
    pub fn symbol(&self, msg: u128, pos: usize) -> u32 {
        let mut coeffs = Vec::with_capacity(self.d);
        let mut m = msg;
        for _ in 0..self.d {
            coeffs.push((m % self.q as u128) as u32);
            m /= self.q as u128;
        }
        let x = self.points[pos];
        let mut acc = 0u32;
        for &c in coeffs.iter().rev() {
            acc = self.field.add(self.field.mul(acc, x), c);
        }
        acc
    }

    pub fn codeword(&self, msg: u128) -> Vec<u32> {
        (0..self.n).map(|i| self.symbol(msg, i)).collect()
    }

    /// Generator matrix (d x n): row r holds the evaluations of x^r.
    pub fn generator_matrix(&self) -> Vec<Vec<u32>> {
        (0..self.d)
            .map(|r| {
                self.points
                    .iter()
                    .map(|x| self.field.pow(*x, r))
                    .collect()
            })
            .collect()
    }
}

/// A t x N binary matrix where no column is covered by the union of any k
/// others; rows double as {0,1}-valued hash functions for star structures.
#[derive(Debug, Clone)]
pub struct DisjunctMatrix {
    pub rows: usize,
    pub cols: usize,
    pub k: usize,
    /// Column-major bitsets: columns[j] holds `rows` bits.
    columns: Vec<Vec<u64>>,
}

impl DisjunctMatrix {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col][row / 64] >> (row % 64) & 1 == 1
    }

    pub fn row(&self, row: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(row, c) as u8).collect()
    }

    /// Exhaustive k-disjunctness check: for every column j and every k-set
    /// S avoiding j, some row has 1 at j and 0 across S.
    pub fn verify(&self, k: usize) -> bool {
        let words = self.columns[0].len();
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        for j in 0..self.cols {
            if !self.check_column(j, k, 0, &mut chosen, &vec![0u64; words]) {
                return false;
            }
        }
        true
    }

    fn check_column(
        &self,
        j: usize,
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        union: &[u64],
    ) -> bool {
        if chosen.len() == k {
            // Some row must have a 1 in column j outside the union.
            return self.columns[j]
                .iter()
                .zip(union)
                .any(|(cj, u)| cj & !u != 0);
        }
        for s in start..self.cols {
            if s == j {
                continue;
            }
            let mut next = union.to_vec();
            for (w, c) in next.iter_mut().zip(&self.columns[s]) {
                *w |= c;
            }
            chosen.push(s);
            if !self.check_column(j, k, s + 1, chosen, &next) {
                chosen.pop();
                return false;
            }
            chosen.pop();
        }
        true
    }
}

/// Identity matrix: trivially (N-1)-disjunct.
fn identity_matrix(n: usize, k: usize) -> DisjunctMatrix {
    let words = n.div_ceil(64);
    let mut columns = vec![vec![0u64; words]; n];
    for (j, col) in columns.iter_mut().enumerate() {
        col[j / 64] |= 1 << (j % 64);
    }
    DisjunctMatrix {
        rows: n,
        cols: n,
        k,
        columns,
    }
}

/// Kautz-Singleton construction: concatenate a Reed-Solomon outer code with
/// the one-hot identity inner code. Any k+1 codewords pairwise agree in at
/// most d-1 positions, so with n = k(d-1)+1 every column keeps a private
/// row against any k others. Verified exhaustively when N is within budget.
pub fn disjunct_matrix(k: usize, n_cols: usize, verify_budget: usize) -> Result<DisjunctMatrix> {
    if k == 0 || n_cols == 0 {
        return Err(Error::ConstructionBug("disjunct matrix needs k,N >= 1".into()));
    }
    let matrix = if k * k >= n_cols {
        identity_matrix(n_cols, k)
    } else {
        let mut q = 2;
        let (q, d, len) = loop {
            q = next_prime_power(q);
            let d = (n_cols as f64).log(q as f64).ceil().max(1.0) as usize;
            // Guard against floating point at integer boundaries.
            let d = if (q as u128).pow(d as u32) >= n_cols as u128 {
                let mut d = d;
                while d > 1 && (q as u128).pow(d as u32 - 1) >= n_cols as u128 {
                    d -= 1;
                }
                d
            } else {
                d + 1
            };
            let len = k * (d - 1) + 1;
            if q >= len && d <= len {
                break (q, d, len);
            }
            q += 1;
        };
        let code = RsCode::new(q, d, len)?;
        let rows = len * q;
        let words = rows.div_ceil(64);
        let mut columns = vec![vec![0u64; words]; n_cols];
        for (j, col) in columns.iter_mut().enumerate() {
            for pos in 0..len {
                let sym = code.symbol(j as u128, pos) as usize;
                let row = pos * q + sym;
                col[row / 64] |= 1 << (row % 64);
            }
        }
        DisjunctMatrix {
            rows,
            cols: n_cols,
            k,
            columns,
        }
    };
    if n_cols <= verify_budget && !matrix.verify(k) {
        return Err(Error::ConstructionBug(format!(
            "constructed matrix is not {k}-disjunct for N={n_cols}"
        )));
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rs_constant_polynomials_repeat() {
        // d=1: constant polynomials, distance n.
        let code = RsCode::new(4, 1, 3).unwrap();
        for msg in 0..4u128 {
            let w = code.codeword(msg);
            assert!(w.iter().all(|s| *s == w[0]));
        }
        assert_eq!(code.min_distance(), 3);
    }

    fn check_distance_exhaustively(q: usize, d: usize, n: usize) {
        let code = RsCode::new(q, d, n).unwrap();
        let total = code.num_codewords();
        let words: Vec<Vec<u32>> = (0..total).map(|m| code.codeword(m)).collect();
        let mut min = n;
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                let dist = words[i]
                    .iter()
                    .zip(&words[j])
                    .filter(|(a, b)| a != b)
                    .count();
                min = min.min(dist);
            }
        }
        assert_eq!(min, code.min_distance(), "q={q} d={d} n={n}");
    }

    #[test]
    fn rs_distance_exhaustive_small() {
        check_distance_exhaustively(5, 2, 4);
        check_distance_exhaustively(3, 2, 3);
        check_distance_exhaustively(4, 2, 4);
    }

    #[test]
    fn rs_rejects_bad_params() {
        assert!(RsCode::new(4, 5, 4).is_err());
        assert!(RsCode::new(4, 2, 5).is_err());
        assert!(RsCode::new(6, 2, 4).is_err()); // 6 is not a prime power
    }

    #[test]
    fn generator_matrix_spans_codewords() {
        let code = RsCode::new(5, 2, 4).unwrap();
        let gen = code.generator_matrix();
        let f = Gf::new(5).unwrap();
        for msg in 0..25u128 {
            let m0 = (msg % 5) as u32;
            let m1 = (msg / 5) as u32;
            let expect: Vec<u32> = (0..4)
                .map(|i| f.add(f.mul(m0, gen[0][i]), f.mul(m1, gen[1][i])))
                .collect();
            assert_eq!(code.codeword(msg), expect);
        }
    }

    #[test]
    fn identity_is_fully_disjunct() {
        let m = disjunct_matrix(3, 9, 64).unwrap();
        // k^2 >= N triggers the identity construction.
        assert_eq!(m.rows, 9);
        assert!(m.verify(3));
        assert!(m.verify(8));
    }

    #[test]
    fn kautz_singleton_two_disjunct() {
        let m = disjunct_matrix(2, 9, 64).unwrap();
        assert!(m.verify(2));
    }

    #[test]
    fn larger_two_disjunct_has_few_rows() {
        let m = disjunct_matrix(2, 100, 0).unwrap();
        assert!(m.verify(2));
        assert!(m.rows < 100, "rows = {} should be O(log N)", m.rows);
    }
}
