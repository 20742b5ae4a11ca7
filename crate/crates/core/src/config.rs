//! Packed bit configurations `ω ∈ {0,1}^E`.
//!
//! Bit `i` of a configuration is coordinate `i` (zero based). When a
//! configuration fits in a machine word it is also exchanged as a `u64`
//! whose bit `i` holds coordinate `i`.

use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    len: usize,
    words: Vec<u64>,
}

impl Configuration {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut c = Self { len, words: vec![u64::MAX; len.div_ceil(64)] };
        c.clear_tail();
        c
    }

    /// Low `len` bits of `mask`.
    pub fn from_u64(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "configuration of {len} bits does not fit a word");
        let mut c = Self::zeros(len);
        if len > 0 {
            c.words[0] = mask;
            c.clear_tail();
        }
        c
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut c = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                c.set(i, true);
            }
        }
        c
    }

    /// Independent Bernoulli(`p`) coordinates.
    pub fn bernoulli<R: Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> Self {
        let mut c = Self::zeros(len);
        if p >= 1.0 {
            return Self::ones(len);
        }
        if p > 0.0 {
            for i in 0..len {
                if rng.gen::<f64>() < p {
                    c.words[i / 64] |= 1 << (i % 64);
                }
            }
        }
        c
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Bitwise complement.
    pub fn complement(&self) -> Self {
        let mut c = Self { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        c.clear_tail();
        c
    }

    /// Coordinatewise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            l if l <= 64 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_rng;

    #[test]
    fn set_get_flip_and_complement() {
        let mut c = Configuration::zeros(70);
        c.set(3, true);
        c.set(69, true);
        c.flip(4);
        assert_eq!(c.iter_ones().collect::<Vec<_>>(), vec![3, 4, 69]);
        let d = c.complement();
        assert_eq!(d.count_ones(), 67);
        assert_eq!(d.complement(), c);
        assert!(Configuration::zeros(70).le(&c));
        assert!(!c.le(&Configuration::zeros(70)));
    }

    #[test]
    fn bernoulli_extremes() {
        let mut rng = replica_rng(1, 0);
        assert_eq!(Configuration::bernoulli(100, 0.0, &mut rng).count_ones(), 0);
        assert_eq!(Configuration::bernoulli(100, 1.0, &mut rng).count_ones(), 100);
    }

    #[test]
    fn word_round_trip() {
        let c = Configuration::from_u64(5, 0b1110_0101);
        assert_eq!(c.to_u64(), Some(0b00101));
    }
}
