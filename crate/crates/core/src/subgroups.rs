//! Brute-force subgroup lattices of small groups.
//!
//! Elements are indexed and multiplied through a full Cayley table; every
//! subgroup is a bitset over element indices. Starting from the trivial group,
//! each subgroup `A` is joined with one element from every double coset
//! `A x A` outside `A` (`⟨A, x⟩ = ⟨A, a x b⟩`). Every subgroup is reached since
//! any subgroup is a chain of such one-element joins.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;

/// Default order cap for subgroup enumeration.
pub const DEFAULT_SUBGROUP_ORDER_CAP: usize = 2000;
/// Default cap on the number of subgroups in one lattice.
pub const DEFAULT_SUBGROUP_COUNT_CAP: usize = 200_000;

type Bits = Vec<u64>;

fn bit(bits: &Bits, i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(bits: &mut Bits, i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

/// Indexed elements with a multiplication table (`a ∘ b`).
pub(crate) struct ElementTable {
    pub elements: Vec<Permutation>,
    index: HashMap<Permutation, u32>,
    mul: Vec<u32>,
}

impl ElementTable {
    pub fn new(group: &PermGroup, cap: usize) -> Result<Self> {
        let elements = group.elements(cap)?;
        let m = elements.len();
        let index: HashMap<Permutation, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i as u32))
            .collect();
        let mut mul = vec![0u32; m * m];
        for a in 0..m {
            for b in 0..m {
                mul[a * m + b] = index[&elements[a].compose(&elements[b])];
            }
        }
        Ok(ElementTable {
            elements,
            index,
            mul,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.len() + b] as usize
    }

    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    pub fn identity(&self) -> usize {
        self.elements
            .iter()
            .position(Permutation::is_identity)
            .expect("identity present")
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Subgroup {
    pub bits: Bits,
    pub members: Vec<u32>,
    pub gens: Vec<u32>,
}

pub(crate) struct Lattice {
    pub table: ElementTable,
    pub subgroups: Vec<Subgroup>,
}

impl Lattice {
    pub fn build(group: &PermGroup, order_cap: usize, count_cap: usize) -> Result<Lattice> {
        if group.order() > order_cap as u128 {
            return Err(Error::CapExceeded {
                what: "subgroup enumeration (group order)",
                cap: order_cap,
            });
        }
        let table = ElementTable::new(group, order_cap)?;
        let m = table.len();
        let words = m.div_ceil(64);
        let e = table.identity();
        let mut trivial_bits = vec![0u64; words];
        set_bit(&mut trivial_bits, e);
        let mut seen: HashSet<Bits> = HashSet::new();
        seen.insert(trivial_bits.clone());
        let mut subgroups = vec![Subgroup {
            bits: trivial_bits,
            members: vec![e as u32],
            gens: Vec::new(),
        }];
        let mut next = 0;
        while next < subgroups.len() {
            let a = subgroups[next].clone();
            next += 1;
            let mut covered = a.bits.clone();
            for x in 0..m {
                if bit(&covered, x) {
                    continue;
                }
                for &l in &a.members {
                    let lx = table.mul(l as usize, x);
                    for &r in &a.members {
                        set_bit(&mut covered, table.mul(lx, r as usize));
                    }
                }
                let joined = join(&table, &a, x);
                if seen.insert(joined.bits.clone()) {
                    if subgroups.len() >= count_cap {
                        return Err(Error::CapExceeded {
                            what: "subgroup count",
                            cap: count_cap,
                        });
                    }
                    subgroups.push(joined);
                }
            }
        }
        subgroups.sort_by(|a, b| {
            a.members
                .len()
                .cmp(&b.members.len())
                .then_with(|| a.bits.cmp(&b.bits))
        });
        Ok(Lattice { table, subgroups })
    }

    pub fn to_group(&self, sub: &Subgroup) -> PermGroup {
        let degree = self.table.elements[0].degree();
        PermGroup::new(
            degree,
            sub.gens
                .iter()
                .map(|&g| self.table.elements[g as usize].clone())
                .collect(),
        )
        .expect("elements share the degree")
    }

    fn is_transitive(&self, sub: &Subgroup) -> bool {
        let degree = self.table.elements[0].degree();
        let mut seen = vec![false; degree];
        seen[0] = true;
        let mut count = 1;
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for &g in &sub.gens {
                let y = self.table.elements[g as usize].apply(x);
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == degree
    }

    /// Representatives of the conjugacy classes (under the ambient group) of
    /// transitive subgroups, in lattice order.
    pub fn transitive_class_reps(&self, ambient_gens: &[Permutation]) -> Vec<&Subgroup> {
        self.transitive_classes(ambient_gens)
            .into_iter()
            .map(|class| class[0])
            .collect()
    }

    /// Conjugacy classes of transitive subgroups, each led by its representative.
    pub fn transitive_classes(&self, ambient_gens: &[Permutation]) -> Vec<Vec<&Subgroup>> {
        let m = self.table.len();
        let conj: Vec<Vec<u32>> = ambient_gens
            .iter()
            .map(|s| {
                (0..m)
                    .map(|x| {
                        self.table
                            .index_of(&self.table.elements[x].conjugate_by(s))
                            .unwrap() as u32
                    })
                    .collect()
            })
            .collect();
        let mut visited: HashSet<&Bits> = HashSet::new();
        let by_bits: HashMap<&Bits, &Subgroup> =
            self.subgroups.iter().map(|s| (&s.bits, s)).collect();
        let mut classes = Vec::new();
        for sub in &self.subgroups {
            if visited.contains(&sub.bits) || !self.is_transitive(sub) {
                continue;
            }
            let mut class = vec![sub];
            visited.insert(&sub.bits);
            let mut head = 0;
            while head < class.len() {
                let h = class[head];
                head += 1;
                for c in &conj {
                    let mut bits = vec![0u64; h.bits.len()];
                    for &x in &h.members {
                        set_bit(&mut bits, c[x as usize] as usize);
                    }
                    let image = by_bits[&bits];
                    if visited.insert(&image.bits) {
                        class.push(image);
                    }
                }
            }
            classes.push(class);
        }
        classes
    }
}

fn join(table: &ElementTable, a: &Subgroup, x: usize) -> Subgroup {
    let mut bits = a.bits.clone();
    let mut members = a.members.clone();
    let mut gens = a.gens.clone();
    gens.push(x as u32);
    let mut head = 0;
    while head < members.len() {
        let y = members[head] as usize;
        head += 1;
        for &s in &gens {
            let z = table.mul(y, s as usize);
            if !bit(&bits, z) {
                set_bit(&mut bits, z);
                members.push(z as u32);
            }
        }
    }
    members.sort_unstable();
    Subgroup {
        bits,
        members,
        gens,
    }
}

/// Every subgroup of `group`, ordered by size; fails when `|group| > cap`.
pub fn all_subgroups(group: &PermGroup, cap: usize) -> Result<Vec<PermGroup>> {
    let lattice = Lattice::build(group, cap, DEFAULT_SUBGROUP_COUNT_CAP)?;
    Ok(lattice
        .subgroups
        .iter()
        .map(|s| lattice.to_group(s))
        .collect())
}

/// Representatives of the transitive subgroups of `group` up to conjugacy in `group`.
pub fn transitive_subgroups_up_to_conjugacy(
    group: &PermGroup,
    cap: usize,
) -> Result<Vec<PermGroup>> {
    transitive_subgroups_capped(group, cap, DEFAULT_SUBGROUP_COUNT_CAP)
}

/// As [`transitive_subgroups_up_to_conjugacy`], failing once the lattice has
/// more than `count_cap` subgroups.
pub fn transitive_subgroups_capped(
    group: &PermGroup,
    cap: usize,
    count_cap: usize,
) -> Result<Vec<PermGroup>> {
    let lattice = Lattice::build(group, cap, count_cap)?;
    Ok(lattice
        .transitive_class_reps(group.generators())
        .into_iter()
        .map(|s| lattice.to_group(s))
        .collect())
}

/// Conjugacy classes (under `group`) of its transitive subgroups, each led
/// by the representative [`transitive_subgroups_up_to_conjugacy`] returns.
pub fn transitive_subgroup_classes(group: &PermGroup, cap: usize) -> Result<Vec<Vec<PermGroup>>> {
    let lattice = Lattice::build(group, cap, DEFAULT_SUBGROUP_COUNT_CAP)?;
    Ok(lattice
        .transitive_classes(group.generators())
        .into_iter()
        .map(|class| class.into_iter().map(|s| lattice.to_group(s)).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{cyclic_regular, regular_rep};

    #[test]
    fn subgroup_counts() {
        assert_eq!(
            all_subgroups(&PermGroup::symmetric(3), 2000).unwrap().len(),
            6
        );
        let orders: Vec<u128> = all_subgroups(&cyclic_regular(9).unwrap(), 2000)
            .unwrap()
            .iter()
            .map(PermGroup::order)
            .collect();
        assert_eq!(orders, vec![1, 3, 9]);
        let table: Vec<Vec<usize>> = (0..9)
            .map(|x| {
                (0..9)
                    .map(|y| (x % 3 + y % 3) % 3 + 3 * ((x / 3 + y / 3) % 3))
                    .collect()
            })
            .collect();
        let z33 = regular_rep(&table).unwrap();
        let subs = all_subgroups(&z33, 2000).unwrap();
        assert_eq!(subs.len(), 6);
        assert_eq!(subs.iter().filter(|s| s.order() == 3).count(), 4);
        // textbook counts: S4 has 30 subgroups, A5 has 59, S5 has 156
        assert_eq!(
            all_subgroups(&PermGroup::symmetric(4), 2000).unwrap().len(),
            30
        );
        assert_eq!(
            all_subgroups(&PermGroup::symmetric(5), 2000).unwrap().len(),
            156
        );
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            all_subgroups(&PermGroup::symmetric(7), 2000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn transitive_classes_of_s4() {
        // transitive subgroups of S4 up to conjugacy: C4, V4, D4, A4, S4
        let reps = transitive_subgroups_up_to_conjugacy(&PermGroup::symmetric(4), 2000).unwrap();
        let orders: Vec<u128> = reps.iter().map(PermGroup::order).collect();
        assert_eq!(orders, vec![4, 4, 8, 12, 24]);
    }

    #[test]
    fn transitive_class_sizes() {
        // S4: 3 cyclic C4, 1 normal V4, 3 D4, A4, S4
        let classes = transitive_subgroup_classes(&PermGroup::symmetric(4), 2000).unwrap();
        let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 1, 3, 1, 1]);
        for class in &classes {
            assert!(class
                .iter()
                .all(|h| h.order() == class[0].order() && h.is_transitive()));
        }
    }
}
