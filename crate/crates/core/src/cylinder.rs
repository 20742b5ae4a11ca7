//! Tables indexed by cylinders of `{0,1}^m`: every coordinate is closed,
//! open or free, encoded as a base-3 digit (0, 1, 2). An entry with free
//! digits is the merge of its two children at the lowest free digit, so a
//! single ascending pass fills the table.

use crate::error::{Error, Result};

/// Ternary tables cover at most this many coordinates.
pub const MAX_TERNARY_BITS: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct TernaryTable<T> {
    m: usize,
    pow: Vec<usize>,
    entries: Vec<T>,
}

impl<T: Clone> TernaryTable<T> {
    pub fn build(m: usize, leaf: impl Fn(u64) -> T, merge: impl Fn(&T, &T) -> T) -> Result<Self> {
        if m > MAX_TERNARY_BITS {
            return Err(Error::TooLarge { what: format!("cylinder table over {m} coordinates"), cap: MAX_TERNARY_BITS });
        }
        let pow: Vec<usize> = (0..=m).map(|i| 3usize.pow(i as u32)).collect();
        let total = pow[m];
        let mut entries: Vec<T> = Vec::with_capacity(total);
        for c in 0..total {
            let mut rest = c;
            let mut mask = 0u64;
            let mut free = None;
            for i in 0..m {
                match rest % 3 {
                    2 => {
                        free = Some(i);
                        break;
                    }
                    1 => mask |= 1 << i,
                    _ => {}
                }
                rest /= 3;
            }
            let value = match free {
                None => leaf(mask),
                Some(i) => merge(&entries[c - 2 * pow[i]], &entries[c - pow[i]]),
            };
            entries.push(value);
        }
        Ok(Self { m, pow, entries })
    }

    pub fn bits(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Code of the cylinder fixing the coordinates in `fixed` to `values`.
    pub fn code(&self, fixed: u64, values: u64) -> usize {
        (0..self.m).fold(0, |acc, i| {
            let d = if fixed >> i & 1 == 0 { 2 } else { (values >> i & 1) as usize };
            acc + d * self.pow[i]
        })
    }

    pub fn get(&self, fixed: u64, values: u64) -> &T {
        &self.entries[self.code(fixed, values)]
    }

    pub fn at(&self, code: usize) -> &T {
        &self.entries[code]
    }

    /// `3^i`
    pub fn power(&self, i: usize) -> usize {
        self.pow[i]
    }

    /// Base-3 digits of `code`, lowest coordinate first.
    pub fn digits(&self, mut code: usize) -> Vec<u8> {
        (0..self.m)
            .map(|_| {
                let d = (code % 3) as u8;
                code /= 3;
                d
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_sums() {
        let t = TernaryTable::build(3, |w| w as f64, |a, b| a + b).unwrap();
        assert_eq!(t.len(), 27);
        assert_eq!(*t.get(0, 0), (0..8).sum::<u64>() as f64);
        assert_eq!(*t.get(0b001, 0b001), 1.0 + 3.0 + 5.0 + 7.0);
        assert_eq!(*t.get(0b111, 0b101), 5.0);
        assert_eq!(t.digits(t.code(0b011, 0b010)), vec![0, 1, 2]);
        assert!(TernaryTable::build(16, |_| 0u8, |a, _| *a).is_err());
    }
}
