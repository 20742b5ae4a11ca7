//! Generators for the monotone functions used by the exact suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::boolfn::{low_mask, BooleanFunctionTable};
use crate::error::{Error, Result};

/// Every monotone function on `n ≤ 4` bits (Dedekind numbers 3, 6, 20, 168).
pub fn all_monotone(n: usize) -> Result<Vec<BooleanFunctionTable>> {
    if n == 0 || n > 4 {
        return Err(Error::TooLarge { what: format!("exhaustive monotone enumeration over {n} bits"), cap: 4 });
    }
    let len = 1usize << n;
    let mut out = Vec::new();
    for table in 0u64..1 << len {
        let f = BooleanFunctionTable::from_fn(n, |w| table >> w & 1 == 1)?;
        if f.verify_monotone().is_ok() {
            out.push(f.into_monotone()?);
        }
    }
    Ok(out)
}

/// The named monotone families at bit count `n`: dictators, AND, OR,
/// every `k`-out-of-`n` threshold, majority, and tribes of each width
/// dividing `n`.
pub fn named_monotone(n: usize) -> Result<Vec<BooleanFunctionTable>> {
    let mut out = vec![
        BooleanFunctionTable::dictator(n, 0)?,
        BooleanFunctionTable::dictator(n, n - 1)?,
        BooleanFunctionTable::and_all(n)?,
        BooleanFunctionTable::or_all(n)?,
    ];
    for k in 2..n {
        out.push(BooleanFunctionTable::from_fn(n, |w| w.count_ones() as usize >= k)?);
    }
    if n % 2 == 1 {
        out.push(BooleanFunctionTable::majority(n)?);
    }
    for width in 2..n {
        if n % width == 0 {
            out.push(BooleanFunctionTable::tribes(n, width)?);
        }
    }
    out.into_iter().map(BooleanFunctionTable::into_monotone).collect()
}

/// A random monotone function: either the up-closure of a few random
/// minterms or a positive-weight threshold function, chosen evenly.
pub fn random_monotone<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BooleanFunctionTable> {
    let f = if rng.gen_bool(0.5) {
        let count = rng.gen_range(1..=2 * n);
        let density = rng.gen_range(0.2..0.7);
        let minterms: Vec<u64> = (0..count)
            .map(|_| (0..n).filter(|_| rng.gen_bool(density)).fold(0u64, |m, i| m | 1 << i))
            .collect();
        BooleanFunctionTable::from_fn(n, |w| minterms.iter().any(|&m| w & m == m))?
    } else {
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let cut = rng.gen_range(0.05..0.95) * total;
        BooleanFunctionTable::from_fn(n, |w| {
            (0..n).filter(|&i| w >> i & 1 == 1).map(|i| weights[i]).sum::<f64>() >= cut
        })?
    };
    f.into_monotone()
}

/// A uniformly random (not necessarily monotone) function.
pub fn random_function<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BooleanFunctionTable> {
    let len = 1usize << n;
    let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
    BooleanFunctionTable::from_values(n, &bits)
}

/// A random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Full mask on `n` bits.
pub fn full_mask(n: usize) -> u64 {
    low_mask(n)
}
