//! Block systems of `⟨τ⟩` on `Z_{p^n}`, primary keys and the groups `Π(k)`.
//!
//! `B_i` has the `p^{n-i}` blocks `B_{i,j} = {j + t·p^{n-i}}` of size `p^i`;
//! in canonical order block `B_{i,j}` has index `j`, so the quotient by `B_1`
//! is already labelled by `j` and is compared with `Π(k_1..k_{n-1})` as is.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::actions::{
    is_prime, permutation_isomorphism, translation, DEFAULT_ISOMORPHISM_NODE_CAP,
};
use crate::blocks::{kernel_fix, quotient, BlockSystem};
use crate::closure::{closure_52, induced_fixer, Caps};
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::subgroups::Lattice;

/// Largest `p^n` accepted by the constructions here.
pub const MAX_CHAIN_DEGREE: usize = 4096;
/// Longest key `enumerate_keys` will list.
pub const MAX_KEY_LENGTH: usize = 8;

fn checked_degree(p: usize, n: usize) -> Result<usize> {
    if p == 2 || !is_prime(p as u64) {
        return Err(Error::InvalidPrime(p as u64));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("exponent must be positive".into()));
    }
    let degree = (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(p))
        .filter(|&d| d <= MAX_CHAIN_DEGREE);
    degree.ok_or(Error::DegreeTooLarge {
        degree: p.saturating_pow(n as u32),
        limit: MAX_CHAIN_DEGREE,
    })
}

/// The chain `B_0 ≺ B_1 ≺ … ≺ B_n` of block systems of `⟨τ_n⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicChain {
    pub p: usize,
    pub n: usize,
    pub systems: Vec<BlockSystem>,
}

impl CyclicChain {
    pub fn degree(&self) -> usize {
        self.systems[0].degree()
    }

    pub fn system(&self, i: usize) -> &BlockSystem {
        &self.systems[i]
    }
}

pub fn cyclic_chain(p: usize, n: usize) -> Result<CyclicChain> {
    let degree = checked_degree(p, n)?;
    let systems = (0..=n)
        .map(|i| {
            let m = p.pow((n - i) as u32);
            BlockSystem::from_labels(&(0..degree).map(|x| x % m).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CyclicChain { p, n, systems })
}

/// A monotone vector with `k_i < i` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimaryKey(Vec<usize>);

impl PrimaryKey {
    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(k_1, …, k_{n-1})`.
    pub fn truncated(&self) -> Option<PrimaryKey> {
        (self.0.len() > 1).then(|| PrimaryKey(self.0[..self.0.len() - 1].to_vec()))
    }
}

impl std::fmt::Display for PrimaryKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn validate_key(entries: &[usize]) -> Result<PrimaryKey> {
    if entries.is_empty() {
        return Err(Error::InvalidKey("a key needs at least one entry".into()));
    }
    for (i, &k) in entries.iter().enumerate() {
        if k > i {
            return Err(Error::InvalidKey(format!(
                "entry {} is {k}, must be below {}",
                i + 1,
                i + 1
            )));
        }
        if i > 0 && entries[i - 1] > k {
            return Err(Error::InvalidKey(format!(
                "entries {} and {} decrease",
                i,
                i + 1
            )));
        }
    }
    Ok(PrimaryKey(entries.to_vec()))
}

/// All keys of length `n`, lexicographically.
pub fn enumerate_keys(n: usize) -> Result<Vec<PrimaryKey>> {
    if n == 0 || n > MAX_KEY_LENGTH {
        return Err(Error::InvalidArgument(format!(
            "key length must be in 1..={MAX_KEY_LENGTH}"
        )));
    }
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<PrimaryKey>) {
        let i = prefix.len();
        if i == n {
            out.push(PrimaryKey(prefix.clone()));
            return;
        }
        let low = prefix.last().copied().unwrap_or(0);
        for k in low..=i {
            prefix.push(k);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    Ok(out)
}

/// `P_{i,k} = ⟨τ^{p^{i-1}}|_B : B ∈ B_{n-k}⟩`.
pub fn p_layer(chain: &CyclicChain, i: usize, k: usize) -> Result<PermGroup> {
    if i == 0 || i > chain.n || k >= i {
        return Err(Error::InvalidArgument(format!(
            "layer ({i}, {k}) needs 1 <= i <= n and k < i"
        )));
    }
    let degree = chain.degree();
    let power = translation(degree).pow(chain.p.pow(i as u32 - 1) as u64);
    let system = chain.system(chain.n - k);
    let gens = system
        .blocks()
        .iter()
        .map(|b| power.restrict(b))
        .collect::<Result<Vec<_>>>()?;
    PermGroup::new(degree, gens)
}

/// `Π(k) = ⟨P_{i,k_i} : 1 ≤ i ≤ n⟩` on `p^n` points.
pub fn pi_group(p: usize, key: &PrimaryKey) -> Result<PermGroup> {
    let chain = cyclic_chain(p, key.len())?;
    let mut gens = Vec::new();
    for (idx, &k) in key.entries().iter().enumerate() {
        gens.extend(p_layer(&chain, idx + 1, k)?.generators().iter().cloned());
    }
    PermGroup::new(chain.degree(), gens)
}

/// Whether `Π(k)/B_1`, blocks labelled by `B_{1,j} ↦ j`, equals `Π(k_1..k_{n-1})`.
pub fn key_quotient_check(p: usize, key: &PrimaryKey) -> Result<bool> {
    let short = key.truncated().ok_or_else(|| {
        Error::InvalidArgument("the quotient check needs a key of length at least 2".into())
    })?;
    let chain = cyclic_chain(p, key.len())?;
    let q = quotient(&pi_group(p, key)?, chain.system(1))?;
    Ok(q.same_group(&pi_group(p, &short)?))
}

/// Reverses base-`p` digits: `Σ d_t p^t ↦ Σ d_t p^{n-1-t}`.
pub fn digit_reversal(p: usize, n: usize) -> Result<Permutation> {
    let degree = checked_degree(p, n)?;
    Permutation::from_fn(degree, |mut x| {
        let mut y = 0;
        for _ in 0..n {
            y = y * p + x % p;
            x /= p;
        }
        y
    })
}

/// The Sylow `p`-subgroup of `S_{p^n}` containing `τ_n`: `Π(0, 1, …, n-1)`,
/// which is the iterated wreath power of `Z_p` relabelled by digit reversal.
pub fn sylow_with_cycle(p: usize, n: usize) -> Result<PermGroup> {
    pi_group(p, &PrimaryKey((0..n).collect()))
}

/// `E_1, …, E_n`: `E_i` is induced by the `B_i/B_{i-1}`-fixer system of `G/B_{i-1}`.
pub fn fixer_chain(group: &PermGroup, chain: &CyclicChain) -> Result<Vec<BlockSystem>> {
    (1..=chain.n)
        .map(|i| induced_fixer(group, chain.system(i - 1), chain.system(i)))
        .collect()
}

/// Whether `group` is permutation isomorphic to `A ≀ B` for transitive
/// factors of degree above 1; returns the block system that realises it.
///
/// `G` embeds in `(G/C) ≀ (Stab_G(C)^C)` for any block system `C`, so `G` is
/// such a wreath product exactly when the orders agree for some nontrivial `C`.
pub fn wreath_decomposition(group: &PermGroup) -> Result<Option<BlockSystem>> {
    for system in crate::blocks::all_block_systems(group)? {
        if system.is_trivial() {
            continue;
        }
        let top = quotient(group, &system)?.order();
        let block = system.block(0);
        let bottom = crate::actions::constituent(&group.setwise_stabilizer(block), block)?
            .group
            .order();
        let full = (0..system.num_blocks()).try_fold(top, |acc, _| acc.checked_mul(bottom));
        if full == Some(group.order()) {
            return Ok(Some(system));
        }
    }
    Ok(None)
}

/// Finds the key whose `Π` matches `group`, first by literal equality, then
/// by permutation isomorphism.
pub fn match_key(p: usize, n: usize, group: &PermGroup) -> Result<Option<(PrimaryKey, bool)>> {
    let keys = enumerate_keys(n)?;
    let pis = keys
        .iter()
        .map(|k| pi_group(p, k))
        .collect::<Result<Vec<_>>>()?;
    for (k, pi) in keys.iter().zip(&pis) {
        if pi.same_group(group) {
            return Ok(Some((k.clone(), true)));
        }
    }
    for (k, pi) in keys.iter().zip(&pis) {
        if permutation_isomorphism(group, pi, DEFAULT_ISOMORPHISM_NODE_CAP)?.is_some() {
            return Ok(Some((k.clone(), false)));
        }
    }
    Ok(None)
}

/// Which subgroups the Sylow check examines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SylowMode {
    /// Every subgroup of the Sylow subgroup containing `τ`.
    Exhaustive,
    /// Random subgroups containing `τ`.
    Sampled { samples: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct SylowCase {
    pub generators: Vec<String>,
    pub order: String,
    pub closure_order: String,
    pub closure_exhaustive: bool,
    pub key: Option<PrimaryKey>,
    /// Matched by literal equality rather than a relabelling.
    pub literal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SylowReport {
    pub p: usize,
    pub n: usize,
    pub mode: SylowMode,
    pub instances: usize,
    pub key_counts: BTreeMap<String, usize>,
    /// Matches found by equality rather than a relabelling.
    pub literal_matches: usize,
    pub exceptions: Vec<SylowCase>,
}

/// For transitive `p`-groups `P` with `⟨τ_n⟩ ≤ P`, checks that the
/// 5/2-closure of `P` is some `Π(k)`.
pub fn sylow_classification_check(
    p: usize,
    n: usize,
    mode: SylowMode,
    caps: &Caps,
) -> Result<SylowReport> {
    let degree = checked_degree(p, n)?;
    let sylow = sylow_with_cycle(p, n)?;
    let tau = translation(degree);
    let subjects: Vec<PermGroup> = match mode {
        SylowMode::Exhaustive => {
            let lattice = Lattice::build(
                &sylow,
                caps.subgroup_order_cap,
                crate::subgroups::DEFAULT_SUBGROUP_COUNT_CAP,
            )?;
            let t = lattice
                .table
                .index_of(&tau)
                .expect("τ lies in the Sylow subgroup");
            lattice
                .subgroups
                .iter()
                .filter(|s| s.members.binary_search(&(t as u32)).is_ok())
                .map(|s| lattice.to_group(s))
                .collect()
        }
        SylowMode::Sampled { samples } => {
            sample_cycle_overgroups(p, n, &sylow, samples, caps.seed)?
        }
    };
    let mut key_counts = BTreeMap::new();
    let mut literal_matches = 0;
    let mut exceptions = Vec::new();
    for subject in &subjects {
        let closure = closure_52(subject, caps)?;
        let found = if closure.complete {
            match_key(p, n, &closure.group)?
        } else {
            None
        };
        let (key, literal) = match found {
            Some((k, lit)) => (Some(k), lit),
            None => (None, false),
        };
        let case = SylowCase {
            generators: subject
                .generators()
                .iter()
                .map(ToString::to_string)
                .collect(),
            order: subject.order().to_string(),
            closure_order: closure.group.order().to_string(),
            closure_exhaustive: closure.exhaustive,
            key: key.clone(),
            literal,
        };
        match key {
            Some(k) => {
                *key_counts.entry(k.to_string()).or_insert(0) += 1;
                literal_matches += usize::from(literal);
            }
            None => exceptions.push(case),
        }
    }
    Ok(SylowReport {
        p,
        n,
        mode,
        instances: subjects.len(),
        key_counts,
        literal_matches,
        exceptions,
    })
}

/// Random subgroups `⟨τ, r_1, …⟩` of the Sylow subgroup, with the `r_j` drawn
/// from a rotating list of its subgroups so small and large groups both occur.
fn sample_cycle_overgroups(
    p: usize,
    n: usize,
    sylow: &PermGroup,
    samples: usize,
    seed: u64,
) -> Result<Vec<PermGroup>> {
    let degree = sylow.degree();
    let tau = translation(degree);
    let chain = cyclic_chain(p, n)?;
    let mut sources = vec![sylow.clone()];
    for i in 1..n {
        sources.push(kernel_fix(sylow, chain.system(i))?);
    }
    for key in enumerate_keys(n)? {
        let pi = pi_group(p, &key)?;
        for i in 1..n {
            let kernel = kernel_fix(&pi, chain.system(i))?;
            if !kernel.is_trivial() {
                sources.push(kernel);
            }
        }
        sources.push(pi);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for s in 0..samples {
        let source = &sources[s % sources.len()];
        let extra = 1 + rng.gen_range(0..2);
        let mut gens = vec![tau.clone()];
        gens.extend((0..extra).map(|_| source.random_element(&mut rng)));
        out.push(PermGroup::new(degree, gens)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::cyclic_regular;
    use crate::blocks::all_block_systems;
    use crate::wreath::iterated_wreath;

    fn key(v: &[usize]) -> PrimaryKey {
        validate_key(v).unwrap()
    }

    #[test]
    fn chains() {
        let c = cyclic_chain(3, 2).unwrap();
        assert_eq!(
            c.system(1).blocks(),
            &[vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]]
        );
        let c = cyclic_chain(3, 1).unwrap();
        assert!(c.systems.iter().all(BlockSystem::is_trivial));
        let c = cyclic_chain(3, 3).unwrap();
        let sizes: Vec<usize> = c.systems.iter().map(BlockSystem::block_size).collect();
        assert_eq!(sizes, vec![1, 3, 9, 27]);
        assert_eq!(
            c.systems,
            all_block_systems(&cyclic_regular(27).unwrap()).unwrap()
        );
        assert!(matches!(cyclic_chain(2, 3), Err(Error::InvalidPrime(2))));
        assert!(matches!(cyclic_chain(9, 1), Err(Error::InvalidPrime(9))));
    }

    #[test]
    fn keys() {
        assert!(validate_key(&[0, 0, 2]).is_ok());
        assert!(validate_key(&[1, 1]).is_err());
        assert!(validate_key(&[0, 1, 0]).is_err());
        assert_eq!(enumerate_keys(1).unwrap(), vec![key(&[0])]);
        let three: Vec<String> = enumerate_keys(3)
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(
            three,
            ["(0,0,0)", "(0,0,1)", "(0,0,2)", "(0,1,1)", "(0,1,2)"]
        );
        // brute force over all vectors with k_i < i
        for n in 1..=6 {
            let mut count = 0;
            let total: usize = (1..=n).product();
            for code in 0..total {
                let mut v = Vec::new();
                let mut c = code;
                for i in 1..=n {
                    v.push(c % i);
                    c /= i;
                }
                if validate_key(&v).is_ok() {
                    count += 1;
                }
            }
            assert_eq!(enumerate_keys(n).unwrap().len(), count);
        }
        assert_eq!(enumerate_keys(4).unwrap().len(), 14);
    }

    #[test]
    fn layers_and_pi_groups() {
        let c = cyclic_chain(3, 2).unwrap();
        assert!(p_layer(&c, 1, 0)
            .unwrap()
            .same_group(&cyclic_regular(9).unwrap()));
        assert_eq!(p_layer(&c, 2, 1).unwrap().order(), 27);
        assert_eq!(p_layer(&c, 2, 0).unwrap().order(), 3);
        assert_eq!(pi_group(3, &key(&[0, 0])).unwrap().order(), 9);
        assert_eq!(pi_group(3, &key(&[0, 1])).unwrap().order(), 81);
        let orders: Vec<u128> = enumerate_keys(3)
            .unwrap()
            .iter()
            .map(|k| pi_group(3, k).unwrap().order())
            .collect();
        assert_eq!(orders, [27, 243, 177147, 3u128.pow(7), 3u128.pow(13)]);
        for k in enumerate_keys(3).unwrap() {
            assert!(pi_group(3, &k).unwrap().contains(&translation(27)));
        }
    }

    #[test]
    fn digit_reversal_relabels_the_wreath_power() {
        for n in 1..=3 {
            let r = digit_reversal(3, n).unwrap();
            let w = iterated_wreath(&cyclic_regular(3).unwrap(), n).unwrap();
            assert!(w
                .conjugate_by(&r)
                .same_group(&sylow_with_cycle(3, n).unwrap()));
        }
    }

    #[test]
    fn quotients_of_pi_groups() {
        for n in 2..=4 {
            for k in enumerate_keys(n).unwrap() {
                assert!(key_quotient_check(3, &k).unwrap(), "{k}");
            }
        }
    }

    #[test]
    fn wreath_shapes() {
        let w = pi_group(3, &key(&[0, 1])).unwrap();
        assert!(wreath_decomposition(&w).unwrap().is_some());
        assert!(wreath_decomposition(&cyclic_regular(9).unwrap())
            .unwrap()
            .is_none());
        assert!(
            wreath_decomposition(&pi_group(3, &key(&[0, 0, 1])).unwrap())
                .unwrap()
                .is_none()
        );
        assert!(
            wreath_decomposition(&pi_group(3, &key(&[0, 0, 2])).unwrap())
                .unwrap()
                .is_some()
        );
        assert!(
            wreath_decomposition(&pi_group(3, &key(&[0, 1, 1])).unwrap())
                .unwrap()
                .is_some()
        );
    }

    #[test]
    fn prime_degree_sylow_check() {
        let r = sylow_classification_check(3, 1, SylowMode::Exhaustive, &Caps::default()).unwrap();
        assert_eq!(r.instances, 1);
        assert_eq!(r.key_counts.get("(0)"), Some(&1));
        assert!(r.exceptions.is_empty());
    }

    #[test]
    fn fixer_chains_are_monotone() {
        for n in 1..=3 {
            let chain = cyclic_chain(3, n).unwrap();
            for k in enumerate_keys(n).unwrap() {
                let e = fixer_chain(&pi_group(3, &k).unwrap(), &chain).unwrap();
                assert!(e.windows(2).all(|w| w[0].refines(&w[1])), "{k}");
            }
        }
    }

    #[test]
    fn distinct_keys_distinct_groups() {
        for n in 1..=3 {
            let groups: Vec<PermGroup> = enumerate_keys(n)
                .unwrap()
                .iter()
                .map(|k| pi_group(3, k).unwrap())
                .collect();
            for (i, a) in groups.iter().enumerate() {
                for b in &groups[i + 1..] {
                    assert!(!a.same_group(b));
                    assert!(permutation_isomorphism(a, b, DEFAULT_ISOMORPHISM_NODE_CAP)
                        .unwrap()
                        .is_none());
                }
            }
        }
    }

    #[test]
    fn sylow_check_degree_nine() {
        let r = sylow_classification_check(3, 2, SylowMode::Exhaustive, &Caps::default()).unwrap();
        assert!(r.instances > 1);
        assert!(r.exceptions.is_empty());
        assert_eq!(r.key_counts.values().sum::<usize>(), r.instances);
        assert!(r.key_counts.keys().all(|k| k == "(0,0)" || k == "(0,1)"));
    }

    #[test]
    fn sylow_check_sampled() {
        let r =
            sylow_classification_check(3, 3, SylowMode::Sampled { samples: 12 }, &Caps::default())
                .unwrap();
        assert_eq!(r.instances, 12);
        assert!(r.exceptions.is_empty(), "{:?}", r.exceptions);
    }
}
