//! Finite field arithmetic GF(p^k) for small prime powers, with exp/log
//! tables over a generator for constant-time multiplication.

/// Decompose a prime power q = p^k; None when q is not a prime power >= 2.
pub fn prime_power(q: usize) -> Option<(usize, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 0;
    for cand in 2..=q {
        if q % cand == 0 {
            p = cand;
            break;
        }
    }
    let mut m = q;
    let mut k = 0;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    if m == 1 {
        Some((p, k))
    } else {
        None
    }
}

/// Smallest prime power >= lo.
pub fn next_prime_power(lo: usize) -> usize {
    let mut q = lo.max(2);
    while prime_power(q).is_none() {
        q += 1;
    }
    q
}

#[derive(Debug, Clone)]
pub struct Gf {
    pub q: usize,
    pub p: usize,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Gf {
    pub fn new(q: usize) -> Option<Gf> {
        let (p, k) = prime_power(q)?;
        let poly = irreducible(p, k);
        // Elements are base-p digit strings encoded as usize < q.
        let mul_slow = |a: usize, b: usize| -> usize { poly_mul_mod(a, b, p, k, &poly) };
        // Find a generator of the multiplicative group.
        let mut generator = 0;
        'outer: for g in 1..q {
            let mut seen = vec![false; q];
            let mut x = 1usize;
            let mut count = 0;
            loop {
                if seen[x] {
                    break;
                }
                seen[x] = true;
                count += 1;
                x = mul_slow(x, g);
            }
            if count == q - 1 {
                generator = g;
                break 'outer;
            }
        }
        assert!(generator != 0, "no generator found for GF({q})");
        let mut exp = vec![0u32; 2 * (q - 1)];
        let mut log = vec![0u32; q];
        let mut x = 1usize;
        for (i, e) in exp.iter_mut().enumerate().take(q - 1) {
            *e = x as u32;
            log[x] = i as u32;
            x = mul_slow(x, generator);
        }
        for i in q - 1..2 * (q - 1) {
            exp[i] = exp[i - (q - 1)];
        }
        Some(Gf { q, p, exp, log })
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a as usize, b as usize);
        let mut out = 0usize;
        let mut place = 1usize;
        while a > 0 || b > 0 {
            out += ((a + b) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// a^e by repeated squaring through the log table.
    pub fn pow(&self, a: u32, e: usize) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let idx = (self.log[a as usize] as usize * e) % (self.q - 1);
        self.exp[idx]
    }
}

/// Polynomial multiplication of digit-encoded elements modulo the monic
/// irreducible `poly` (coefficient vector of length k+1, poly[k] = 1).
fn poly_mul_mod(a: usize, b: usize, p: usize, k: u32, poly: &[usize]) -> usize {
    let k = k as usize;
    let digits = |mut x: usize| -> Vec<usize> {
        let mut d = vec![0; 2 * k];
        for slot in d.iter_mut().take(k) {
            *slot = x % p;
            x /= p;
        }
        d
    };
    let da = digits(a);
    let db = digits(b);
    let mut prod = vec![0usize; 2 * k];
    for (i, &x) in da.iter().enumerate().take(k) {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate().take(k) {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // Reduce modulo poly: x^k = -(poly[0] + ... + poly[k-1] x^{k-1}).
    for i in (k..2 * k).rev() {
        let coeff = prod[i];
        if coeff == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..k {
            let sub = (coeff * poly[j]) % p;
            prod[i - k + j] = (prod[i - k + j] + p - sub) % p;
        }
    }
    let mut out = 0usize;
    for i in (0..k).rev() {
        out = out * p + prod[i];
    }
    out
}

/// Brute-force search for a monic irreducible polynomial of degree k over
/// F_p (trial division by all lower-degree monic polynomials).
fn irreducible(p: usize, k: u32) -> Vec<usize> {
    let k = k as usize;
    if k == 1 {
        return vec![0, 1];
    }
    let total = p.pow(k as u32);
    'candidates: for lower in 0..total {
        let mut poly = vec![0usize; k + 1];
        let mut x = lower;
        for slot in poly.iter_mut().take(k) {
            *slot = x % p;
            x /= p;
        }
        poly[k] = 1;
        // Divisor degrees 1..=k/2 suffice.
        for d in 1..=k / 2 {
            let dtotal = p.pow(d as u32);
            for dl in 0..dtotal {
                let mut div = vec![0usize; d + 1];
                let mut x = dl;
                for slot in div.iter_mut().take(d) {
                    *slot = x % p;
                    x /= p;
                }
                div[d] = 1;
                if poly_divides(&div, &poly, p) {
                    continue 'candidates;
                }
            }
        }
        return poly;
    }
    unreachable!("an irreducible polynomial of degree {k} over F_{p} exists")
}

fn poly_divides(div: &[usize], poly: &[usize], p: usize) -> bool {
    let mut rem: Vec<usize> = poly.to_vec();
    let dd = div.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            // Monic divisor: subtract lead * div * x^shift.
            let shift = rem.len() - 1 - dd;
            for (i, &c) in div.iter().enumerate() {
                let sub = (lead * c) % p;
                rem[shift + i] = (rem[shift + i] + p - sub) % p;
            }
        }
        debug_assert_eq!(*rem.last().unwrap(), 0);
        rem.pop();
    }
    rem.iter().all(|c| *c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(12), None);
        assert_eq!(next_prime_power(6), 7);
        assert_eq!(next_prime_power(10), 11);
    }

    fn field_axioms(q: usize) {
        let f = Gf::new(q).unwrap();
        for a in 0..q as u32 {
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.mul(a, 0), 0);
            assert_eq!(f.add(a, 0), a);
            for b in 0..q as u32 {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.add(a, b), f.add(b, a));
                for c in 0..q as u32 {
                    assert_eq!(
                        f.mul(a, f.add(b, c)),
                        f.add(f.mul(a, b), f.mul(a, c)),
                        "distributivity fails in GF({q}) at {a},{b},{c}"
                    );
                }
            }
        }
        // Every nonzero element has an inverse (group order q-1).
        for a in 1..q as u32 {
            assert_eq!(f.pow(a, q - 1), 1);
        }
    }

    #[test]
    fn small_fields_are_fields() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            field_axioms(q);
        }
    }

    #[test]
    fn pow_matches_repeated_mul() {
        for q in [5, 8, 9] {
            let f = Gf::new(q).unwrap();
            for a in 0..q as u32 {
                let mut acc = 1u32;
                for e in 0..12 {
                    assert_eq!(f.pow(a, e), acc, "GF({q}): {a}^{e}");
                    acc = f.mul(acc, a);
                }
            }
        }
    }
}
