//! Small named groups and partitions used as examples and test corpora.

use crate::actions::{is_prime, translation};
use crate::blocks::BlockSystem;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{gcd, Permutation};

/// `x ↦ a·x mod n` for a unit `a`.
pub fn multiplication(n: usize, a: usize) -> Result<Permutation> {
    if n == 0 || gcd(a as u64, n as u64) != 1 {
        return Err(Error::InvalidArgument(format!(
            "{a} is not a unit modulo {n}"
        )));
    }
    Permutation::from_fn(n, |x| a * x % n)
}

/// `AGL(1, p) = {x ↦ ax + b}`.
pub fn affine_group(p: usize) -> Result<PermGroup> {
    if !is_prime(p as u64) {
        return Err(Error::InvalidPrime(p as u64));
    }
    let mut gens = vec![translation(p)];
    gens.extend(
        (2..p)
            .map(|a| multiplication(p, a))
            .collect::<Result<Vec<_>>>()?,
    );
    PermGroup::new(p, gens)
}

/// `⟨x ↦ x + 1, x ↦ (1 + p)x⟩` on `Z_{p²}`, a group of order `p³`.
pub fn order_p3_example(p: usize) -> Result<PermGroup> {
    if p == 2 || !is_prime(p as u64) {
        return Err(Error::InvalidPrime(p as u64));
    }
    let n = p * p;
    PermGroup::new(n, vec![translation(n), multiplication(n, 1 + p)?])
}

/// `⟨δ, (Z_3³)_L⟩` with `δ(i, j, k) = (i, j, k + i)`, on triples encoded as `9i + 3j + k`.
pub fn sim_neq_equiv_example() -> PermGroup {
    let enc = |i: usize, j: usize, k: usize| 9 * (i % 3) + 3 * (j % 3) + k % 3;
    let map = |f: &dyn Fn(usize, usize, usize) -> usize| {
        Permutation::from_fn(27, |x| f(x / 9, x / 3 % 3, x % 3))
            .expect("affine maps of Z_3^3 are bijections")
    };
    let delta = map(&|i, j, k| enc(i, j, k + i));
    let t1 = map(&|i, j, k| enc(i + 1, j, k));
    let t2 = map(&|i, j, k| enc(i, j + 1, k));
    let t3 = map(&|i, j, k| enc(i, j, k + 1));
    PermGroup::new(27, vec![delta, t1, t2, t3]).expect("generators share the degree")
}

/// The blocks `{9i + 3j + k : j, k}` of [`sim_neq_equiv_example`].
pub fn sim_neq_equiv_blocks() -> BlockSystem {
    BlockSystem::from_labels(&(0..27).map(|x| x / 9).collect::<Vec<_>>())
        .expect("labels are balanced")
}

/// The dihedral group of order `2n` on `Z_n`.
pub fn dihedral(n: usize) -> Result<PermGroup> {
    if n < 3 {
        return Err(Error::InvalidArgument(
            "dihedral groups need at least 3 points".into(),
        ));
    }
    PermGroup::new(
        n,
        vec![translation(n), Permutation::from_fn(n, |x| (n - x) % n)?],
    )
}

/// The classes of `x mod m` on `0..n`, for `m` dividing `n`.
pub fn residue_system(n: usize, m: usize) -> Result<BlockSystem> {
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::InvalidArgument(format!("{m} does not divide {n}")));
    }
    BlockSystem::from_labels(&(0..n).map(|x| x % m).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(affine_group(5).unwrap().order(), 20);
        assert_eq!(order_p3_example(3).unwrap().order(), 27);
        assert_eq!(order_p3_example(5).unwrap().order(), 125);
        assert_eq!(sim_neq_equiv_example().order(), 81);
        assert_eq!(dihedral(9).unwrap().order(), 18);
        assert!(multiplication(9, 3).is_err());
        assert!(residue_system(9, 2).is_err());
        assert!(affine_group(6).is_err());
    }
}
