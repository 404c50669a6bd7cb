//! The 5/2-closed test, the 5/2-closure, brute-force k-closures and the
//! hypothesis of the quotient theorem.
//!
//! `G` is 5/2-closed when, for every transitive `H ≤ G`, every normal block
//! system `B_H` of `H` with fixer system `E`, every block `E ∈ E` and every
//! `g ∈ G` fixing each `B_H`-block inside `E`, the restriction `g|_E` is in `G`.
//!
//! Reductions used here:
//! * `H` up to conjugacy in `G`: conjugating `H`, `B_H`, `E` and `g` by an
//!   element of `G` maps one instance of the condition onto another.
//! * one block `E` per `H`: `H` is transitive on the blocks of `E`, and
//!   `(h s h⁻¹)|_{hE} = h (s|_E) h⁻¹`.
//! * generators only: the `g` in question form the subgroup `S_E`, and
//!   restriction to `E` is a homomorphism on `S_E`, so the good `g` form a
//!   subgroup too.
//!
//! The closure adjoins every failing restriction found in a sweep and repeats.
//! Every 5/2-closed overgroup of the current group contains what is adjoined
//! (the witness only involves `H`, its fixer system and an element already
//! present), so the fixed point is the intersection of all such overgroups.
//!
//! Transitive subgroups come from the full lattice when `|G|` is at most the
//! order cap. Above it they are sampled: `G` itself, a regular seed `R`, `R`
//! joined with each block kernel, and `R` joined with random elements. A
//! sampled "closed" is a semi-decision; a sampled witness is always genuine.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::actions::{translation, tuple_orbit_labels};
use crate::blocks::{all_block_systems, kernel_fix, quotient, BlockSystem};
use crate::error::{Error, Result};
use crate::fixer::{fast_fixer_system, fixer_system};
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::subgroups::{transitive_subgroups_capped, DEFAULT_SUBGROUP_ORDER_CAP};

/// Largest degree accepted by [`k_closure`].
pub const K_CLOSURE_MAX_DEGREE: usize = 9;

/// Limits for transitive-subgroup enumeration and the closure iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Groups up to this order get an exact subgroup-lattice treatment.
    pub subgroup_order_cap: usize,
    /// Lattices with more subgroups than this fall back to sampling.
    pub subgroup_count_cap: usize,
    /// Random supplements tried in sampled mode.
    pub samples: usize,
    pub seed: u64,
    /// Closure sweeps before giving up.
    pub max_sweeps: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            subgroup_order_cap: DEFAULT_SUBGROUP_ORDER_CAP,
            subgroup_count_cap: 20_000,
            samples: 24,
            seed: 0x5eed,
            max_sweeps: 64,
        }
    }
}

/// A certificate that a group is not 5/2-closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureWitness {
    pub subgroup: Vec<Permutation>,
    pub base: BlockSystem,
    pub fixer_block: Vec<usize>,
    pub element: Permutation,
    pub restriction: Permutation,
}

impl ClosureWitness {
    /// Re-checks the three defining conditions against `group`.
    pub fn is_valid_for(&self, group: &PermGroup) -> bool {
        let fixes_blocks = self
            .fixer_block
            .iter()
            .all(|&x| self.base.block_of(self.element.apply(x)) == self.base.block_of(x));
        group.contains(&self.element)
            && fixes_blocks
            && self.element.restrict(&self.fixer_block).as_ref() == Ok(&self.restriction)
            && !group.contains(&self.restriction)
    }
}

impl Serialize for ClosureWitness {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            subgroup: Vec<String>,
            base: &'a BlockSystem,
            fixer_block: &'a [usize],
            element: String,
            restriction: String,
        }
        View {
            subgroup: self.subgroup.iter().map(ToString::to_string).collect(),
            base: &self.base,
            fixer_block: &self.fixer_block,
            element: self.element.to_string(),
            restriction: self.restriction.to_string(),
        }
        .serialize(serializer)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedVerdict {
    pub closed: bool,
    /// Whether every transitive subgroup class was examined.
    pub exhaustive: bool,
    pub subgroups_checked: usize,
    pub witness: Option<ClosureWitness>,
}

#[derive(Clone, Debug)]
pub struct Closure {
    pub group: PermGroup,
    pub adjoined: usize,
    pub sweeps: usize,
    pub exhaustive: bool,
    /// False when `max_sweeps` ran out before a fixed point.
    pub complete: bool,
}

/// Transitive subgroups of `group` to test, and whether the list is complete
/// up to conjugacy.
pub fn transitive_candidates(group: &PermGroup, caps: &Caps) -> Result<(Vec<PermGroup>, bool)> {
    if !group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    if group.order() <= caps.subgroup_order_cap as u128 {
        match transitive_subgroups_capped(group, caps.subgroup_order_cap, caps.subgroup_count_cap) {
            Ok(reps) => return Ok((reps, true)),
            Err(Error::CapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((sampled_candidates(group, caps)?, false))
}

fn sampled_candidates(group: &PermGroup, caps: &Caps) -> Result<Vec<PermGroup>> {
    let n = group.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(caps.seed);
    let tau = translation(n);
    let seed_group = if group.contains(&tau) {
        PermGroup::new(n, vec![tau])?
    } else {
        let mut gens = Vec::new();
        loop {
            gens.push(group.random_element(&mut rng));
            let h = PermGroup::new(n, gens.clone())?;
            if h.is_transitive() {
                break h;
            }
            if gens.len() >= 8 {
                break group.clone();
            }
        }
    };
    let mut list = vec![group.clone(), seed_group.clone()];
    for system in all_block_systems(group)? {
        if system.is_trivial() {
            continue;
        }
        let kernel = kernel_fix(group, &system)?;
        list.push(seed_group.join_with(kernel.generators())?);
        if !kernel.is_trivial() {
            list.push(seed_group.join_with(&[kernel.random_element(&mut rng)])?);
        }
    }
    for i in 0..caps.samples {
        let extra: Vec<Permutation> = (0..1 + i % 2)
            .map(|_| group.random_element(&mut rng))
            .collect();
        list.push(seed_group.join_with(&extra)?);
    }
    let mut unique: Vec<PermGroup> = Vec::new();
    for h in list {
        if !unique.iter().any(|u| u.same_group(&h)) {
            unique.push(h);
        }
    }
    Ok(unique)
}

/// Checks the 5/2 condition for one transitive `h ≤ group`, collecting
/// witnesses (only the first when `first_only`).
fn witnesses_for(
    group: &PermGroup,
    h: &PermGroup,
    first_only: bool,
    seen: &mut HashSet<Vec<usize>>,
    out: &mut Vec<ClosureWitness>,
) -> Result<()> {
    let n = group.degree();
    for system in all_block_systems(h)? {
        if system.is_trivial() {
            continue;
        }
        if kernel_fix(h, &system)?.orbits().cells != system.blocks() {
            continue;
        }
        let fixer = fast_fixer_system(h, &system);
        if fixer.num_blocks() == 1 {
            continue;
        }
        let block = fixer.block(fixer.block_of(0)).to_vec();
        let mut labels = vec![usize::MAX; n];
        for &x in &block {
            labels[x] = system.block_of(x);
        }
        if !seen.insert(labels.clone()) {
            continue;
        }
        let stab = group.labelled_partition_stabilizer(&labels);
        for s in stab.generators() {
            let r = s
                .restrict(&block)
                .expect("the element fixes the fixer block");
            if !group.contains(&r) {
                out.push(ClosureWitness {
                    subgroup: h.generators().to_vec(),
                    base: system.clone(),
                    fixer_block: block.clone(),
                    element: s.clone(),
                    restriction: r,
                });
                if first_only {
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

fn search_witnesses(
    group: &PermGroup,
    candidates: &[PermGroup],
    first_only: bool,
) -> Result<Vec<ClosureWitness>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for h in candidates {
        witnesses_for(group, h, first_only, &mut seen, &mut out)?;
        if first_only && !out.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// Decides whether `group` is 5/2-closed (exactly below the order cap).
pub fn is_52_closed(group: &PermGroup, caps: &Caps) -> Result<ClosedVerdict> {
    let (candidates, exhaustive) = transitive_candidates(group, caps)?;
    let witness = search_witnesses(group, &candidates, true)?
        .into_iter()
        .next();
    Ok(ClosedVerdict {
        closed: witness.is_none(),
        exhaustive,
        subgroups_checked: candidates.len(),
        witness,
    })
}

/// The 5/2-closure as the fixed point of adjoining witness restrictions.
pub fn closure_52(group: &PermGroup, caps: &Caps) -> Result<Closure> {
    let mut current = group.clone();
    let mut adjoined = 0;
    let mut exhaustive = true;
    for sweep in 1..=caps.max_sweeps {
        let (candidates, exact) = transitive_candidates(&current, caps)?;
        exhaustive &= exact;
        let found = search_witnesses(&current, &candidates, false)?;
        if found.is_empty() {
            return Ok(Closure {
                group: current,
                adjoined,
                sweeps: sweep,
                exhaustive,
                complete: true,
            });
        }
        let extra: Vec<Permutation> = found.into_iter().map(|w| w.restriction).collect();
        let before = current.order();
        current = current.join_with(&extra)?;
        adjoined += extra.len();
        debug_assert!(current.order() > before);
    }
    Ok(Closure {
        group: current,
        adjoined,
        sweeps: caps.max_sweeps,
        exhaustive,
        complete: false,
    })
}

/// `G^(k)`: every permutation preserving each orbit of `G` on `k`-tuples.
pub fn k_closure(group: &PermGroup, k: usize) -> Result<PermGroup> {
    if !(1..=3).contains(&k) {
        return Err(Error::UnsupportedArity { k });
    }
    let n = group.degree();
    if n > K_CLOSURE_MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: n,
            limit: K_CLOSURE_MAX_DEGREE,
        });
    }
    let labels = tuple_orbit_labels(group, k);
    // tuples over 0..=p that use p, as index lists
    let mut by_last: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    let mut digits = vec![0usize; k];
    for t in 0..n.pow(k as u32) {
        let mut rest = t;
        for d in digits.iter_mut().rev() {
            *d = rest % n;
            rest /= n;
        }
        let top = *digits.iter().max().unwrap();
        by_last[top].push(digits.clone());
    }
    let encode = |tuple: &mut dyn Iterator<Item = usize>| tuple.fold(0, |acc, d| acc * n + d);
    let ok = |p: usize, g: &Permutation| {
        by_last[p].iter().all(|t| {
            labels[encode(&mut t.iter().copied())]
                == labels[encode(&mut t.iter().map(|&d| g.apply(d)))]
        })
    };
    let full = PermGroup::symmetric(n);
    Ok(full.search_subgroup(&ok, &|g| (0..n).all(|p| ok(p, g))))
}

/// Whether `group` satisfies the hypothesis of the quotient theorem for `system`:
/// for each transitive `H ≤ G` and normal system `C ⪰ B` of `H`, the system
/// induced by the `C/B`-fixer system of `H/B` is refined by the `B`-fixer
/// system of `G`.
pub fn quotient_hypothesis_check(
    group: &PermGroup,
    system: &BlockSystem,
    caps: &Caps,
) -> Result<bool> {
    let e = fixer_system(group, system)?;
    let (candidates, _) = transitive_candidates(group, caps)?;
    for h in &candidates {
        for c in all_block_systems(h)? {
            if !system.refines(&c) || kernel_fix(h, &c)?.orbits().cells != c.blocks() {
                continue;
            }
            let f = induced_fixer(h, system, &c)?;
            if !e.refines(&f) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The system of `h` induced by the `C/B`-fixer system of `h/B`.
pub(crate) fn induced_fixer(
    h: &PermGroup,
    b: &BlockSystem,
    c: &BlockSystem,
) -> Result<BlockSystem> {
    let q = quotient(h, b)?;
    let cb = b.quotient_partition(c)?;
    let fb = fixer_system(&q, &cb)?;
    BlockSystem::new(
        h.degree(),
        fb.blocks().iter().map(|cell| b.union_of(cell)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::is_normal_block_system;
    use crate::subgroups::all_subgroups;

    fn mult(n: usize, a: usize) -> Permutation {
        Permutation::from_fn(n, |x| a * x % n).unwrap()
    }

    fn p27() -> PermGroup {
        PermGroup::new(9, vec![translation(9), mult(9, 4)]).unwrap()
    }

    fn agl15() -> PermGroup {
        PermGroup::new(5, vec![translation(5), mult(5, 2)]).unwrap()
    }

    fn residues(n: usize, m: usize) -> BlockSystem {
        BlockSystem::from_labels(&(0..n).map(|x| x % m).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_verdicts() {
        let caps = Caps::default();
        let c9 = crate::actions::cyclic_regular(9).unwrap();
        assert!(is_52_closed(&c9, &caps).unwrap().closed);
        let agl = agl15();
        assert_eq!(agl.order(), 20);
        assert!(is_52_closed(&agl, &caps).unwrap().closed);
        let v = is_52_closed(&p27(), &caps).unwrap();
        assert!(!v.closed && v.exhaustive);
        let w = v.witness.unwrap();
        assert!(w.is_valid_for(&p27()));
        assert_eq!(w.base, residues(9, 3));
        assert_eq!(w.fixer_block.len(), 3);
    }

    #[test]
    fn closure_of_the_order_27_group() {
        let c = closure_52(&p27(), &Caps::default()).unwrap();
        assert!(c.complete && c.exhaustive);
        assert_eq!(c.group.order(), 81);
        assert_eq!(kernel_fix(&c.group, &residues(9, 3)).unwrap().order(), 27);
        assert!(p27().is_subgroup_of(&c.group));
        let again = closure_52(&c.group, &Caps::default()).unwrap();
        assert!(again.group.same_group(&c.group));
        assert_eq!(again.adjoined, 0);
        let c9 = crate::actions::cyclic_regular(9).unwrap();
        assert!(closure_52(&c9, &Caps::default())
            .unwrap()
            .group
            .same_group(&c9));
    }

    #[test]
    fn closure_ignores_generator_order() {
        let g = PermGroup::new(9, vec![mult(9, 4), translation(9), translation(9).pow(4)]).unwrap();
        let c = closure_52(&g, &Caps::default()).unwrap();
        assert!(c
            .group
            .same_group(&closure_52(&p27(), &Caps::default()).unwrap().group));
    }

    #[test]
    fn k_closures() {
        let s5 = k_closure(&agl15(), 2).unwrap();
        assert_eq!(s5.order(), 120);
        assert!(k_closure(&p27(), 3).unwrap().same_group(&p27()));
        assert!(k_closure(&PermGroup::symmetric(4), 3)
            .unwrap()
            .same_group(&PermGroup::symmetric(4)));
        let c9 = crate::actions::cyclic_regular(9).unwrap();
        let c2 = k_closure(&c9, 2).unwrap();
        assert!(c2.same_group(&c9));
        assert!(matches!(
            k_closure(&c9, 4),
            Err(Error::UnsupportedArity { k: 4 })
        ));
        assert!(matches!(
            k_closure(&crate::actions::cyclic_regular(10).unwrap(), 2),
            Err(Error::DegreeTooLarge { .. })
        ));
        // 2-closed groups are 5/2-closed
        let p2 = k_closure(&p27(), 2).unwrap();
        assert!(p27().is_subgroup_of(&p2));
        assert!(is_52_closed(&p2, &Caps::default()).unwrap().closed);
    }

    #[test]
    fn k_closure_matches_filter() {
        let g = PermGroup::new(
            6,
            vec![
                Permutation::parse("(0 1 2)(3 4 5)", 6).unwrap(),
                Permutation::parse("(0 3)", 6).unwrap(),
            ],
        )
        .unwrap();
        let all = PermGroup::symmetric(6).elements(720).unwrap();
        for k in 1..=3 {
            let labels = tuple_orbit_labels(&g, k);
            let n: usize = 6;
            let keep = all.iter().filter(|s| {
                (0..n.pow(k as u32)).all(|t| {
                    let mut d = vec![0; k];
                    let mut r = t;
                    for x in d.iter_mut().rev() {
                        *x = r % n;
                        r /= n;
                    }
                    let img = d.iter().fold(0, |a, &x| a * n + s.apply(x));
                    labels[t] == labels[img]
                })
            });
            assert_eq!(keep.count() as u128, k_closure(&g, k).unwrap().order());
        }
    }

    #[test]
    fn quotient_hypothesis() {
        let caps = Caps::default();
        let closed = closure_52(&p27(), &caps).unwrap().group;
        let b1 = residues(9, 3);
        assert!(is_normal_block_system(&closed, &b1).unwrap());
        assert!(quotient_hypothesis_check(&closed, &b1, &caps).unwrap());
        assert!(
            is_52_closed(&quotient(&closed, &b1).unwrap(), &caps)
                .unwrap()
                .closed
        );
        let c9 = crate::actions::cyclic_regular(9).unwrap();
        assert!(quotient_hypothesis_check(&c9, &b1, &caps).unwrap());
        assert!(quotient_hypothesis_check(&c9, &BlockSystem::whole(9), &caps).unwrap());
    }

    #[test]
    fn sampled_mode_finds_genuine_witnesses() {
        let caps = Caps {
            subgroup_order_cap: 10,
            ..Caps::default()
        };
        let v = is_52_closed(&p27(), &caps).unwrap();
        assert!(!v.exhaustive);
        assert!(!v.closed);
        assert!(v.witness.unwrap().is_valid_for(&p27()));
        let c = closure_52(&p27(), &caps).unwrap();
        assert_eq!(c.group.order(), 81);
    }

    #[test]
    fn witnesses_are_certificates() {
        // every subgroup of S4 on 4 points that is transitive
        for h in all_subgroups(&PermGroup::symmetric(4), 2000).unwrap() {
            if !h.is_transitive() {
                continue;
            }
            let v = is_52_closed(&h, &Caps::default()).unwrap();
            if let Some(w) = v.witness {
                assert!(w.is_valid_for(&h));
            }
        }
    }
}
