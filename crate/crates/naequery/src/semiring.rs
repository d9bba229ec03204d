use std::fmt::Debug;
use std::hash::Hash;

/// A commutative semiring: plus and times commute, times distributes over
/// plus, and zero annihilates. Instances carry runtime data (the bit-vector
/// width), so operations take `&self`.
pub trait Semiring: Clone {
    type Value: Clone + Eq + Ord + Hash + Debug;

    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn plus(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn times(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    fn is_zero(&self, v: &Self::Value) -> bool {
        *v == self.zero()
    }

    /// In-place accumulate `acc ⊕= v`; overridden where it saves allocation.
    fn plus_assign(&self, acc: &mut Self::Value, v: &Self::Value) {
        *acc = self.plus(acc, v);
    }

    /// In-place multiply `acc ⊗= v`.
    fn times_assign(&self, acc: &mut Self::Value, v: &Self::Value) {
        *acc = self.times(acc, v);
    }
}

/// The Boolean semiring (∨, ∧).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boolean;

impl Semiring for Boolean {
    type Value = bool;

    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn plus(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn times(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
}

/// Counting semiring over the naturals (+, ×).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NaturalCount;

impl Semiring for NaturalCount {
    type Value = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn plus(&self, a: &u64, b: &u64) -> u64 {
        a + b
    }
    fn times(&self, a: &u64, b: &u64) -> u64 {
        a * b
    }
}

/// An `r`-bit vector packed into machine words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bits(pub Vec<u64>);

impl Bits {
    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn any(&self) -> bool {
        self.0.iter().any(|w| *w != 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| wi * 64 + b)
        })
    }
}

/// Semiring of r-bit vectors: plus is bit-wise max (∨), times bit-wise min
/// (∧). One evaluation over `BitVector(r)` carries r Boolean runs at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitVector {
    pub bits: usize,
    words: usize,
}

impl BitVector {
    pub fn new(bits: usize) -> Self {
        BitVector {
            bits,
            words: bits.div_ceil(64),
        }
    }

    /// All-zero value with the final word's unused bits kept clear.
    pub fn empty(&self) -> Bits {
        Bits(vec![0u64; self.words])
    }
}

impl Semiring for BitVector {
    type Value = Bits;

    fn zero(&self) -> Bits {
        Bits(vec![0u64; self.words])
    }

    fn one(&self) -> Bits {
        let mut v = vec![!0u64; self.words];
        let extra = self.words * 64 - self.bits;
        if extra > 0 && self.words > 0 {
            v[self.words - 1] >>= extra;
        }
        Bits(v)
    }

    fn plus(&self, a: &Bits, b: &Bits) -> Bits {
        Bits(a.0.iter().zip(&b.0).map(|(x, y)| x | y).collect())
    }

    fn times(&self, a: &Bits, b: &Bits) -> Bits {
        Bits(a.0.iter().zip(&b.0).map(|(x, y)| x & y).collect())
    }

    fn is_zero(&self, v: &Bits) -> bool {
        v.0.iter().all(|w| *w == 0)
    }

    fn plus_assign(&self, acc: &mut Bits, v: &Bits) {
        for (a, b) in acc.0.iter_mut().zip(&v.0) {
            *a |= b;
        }
    }

    fn times_assign(&self, acc: &mut Bits, v: &Bits) {
        for (a, b) in acc.0.iter_mut().zip(&v.0) {
            *a &= b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn axioms<S: Semiring>(s: &S, sample: impl Fn(&mut StdRng) -> S::Value) {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10_000 {
            let a = sample(&mut rng);
            let b = sample(&mut rng);
            let c = sample(&mut rng);
            assert_eq!(s.plus(&a, &b), s.plus(&b, &a));
            assert_eq!(s.times(&a, &b), s.times(&b, &a));
            assert_eq!(
                s.times(&a, &s.plus(&b, &c)),
                s.plus(&s.times(&a, &b), &s.times(&a, &c))
            );
            assert_eq!(s.times(&a, &s.zero()), s.zero());
            assert_eq!(s.plus(&a, &s.zero()), a);
            assert_eq!(s.times(&a, &s.one()), a);
        }
    }

    #[test]
    fn boolean_axioms() {
        axioms(&Boolean, |rng| rng.gen());
    }

    #[test]
    fn counting_axioms() {
        axioms(&NaturalCount, |rng| rng.gen_range(0u64..1000));
    }

    #[test]
    fn bitvector_axioms() {
        let s = BitVector::new(130);
        axioms(&s, |rng| {
            let mut v = s.empty();
            for i in 0..130 {
                if rng.gen() {
                    v.set(i);
                }
            }
            v
        });
    }

    /// BitVector(r) agrees bit-by-bit with r independent Boolean semirings.
    #[test]
    fn bitvector_matches_boolean_lanes() {
        let r = 100;
        let s = BitVector::new(r);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let mut a = s.empty();
            let mut b = s.empty();
            let mut lanes_a = vec![false; r];
            let mut lanes_b = vec![false; r];
            for i in 0..r {
                if rng.gen() {
                    a.set(i);
                    lanes_a[i] = true;
                }
                if rng.gen() {
                    b.set(i);
                    lanes_b[i] = true;
                }
            }
            let plus = s.plus(&a, &b);
            let times = s.times(&a, &b);
            for i in 0..r {
                assert_eq!(plus.get(i), lanes_a[i] || lanes_b[i]);
                assert_eq!(times.get(i), lanes_a[i] && lanes_b[i]);
            }
        }
    }

    #[test]
    fn one_keeps_unused_bits_clear() {
        let s = BitVector::new(70);
        let one = s.one();
        assert!(one.get(69));
        assert_eq!(one.0[1], (1u64 << 6) - 1);
    }
}
