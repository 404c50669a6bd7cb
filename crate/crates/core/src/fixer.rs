//! Wreath stabilizers, the `≡` and `∼` relations on a normal block system,
//! and the fixer block system built from `≡`.
//!
//! `wstab` starts from the pointwise stabilizer of the block inside the block
//! kernel and repeatedly passes to the pointwise stabilizer of any block on
//! which the current group is neither trivial nor transitive. Every subgroup
//! with the defining property lies in the starting group and is trivial on
//! such a block (its constituent sits inside an intransitive one), so the
//! descent never loses it, and the end point has the property itself.

use serde::Serialize;

use crate::blocks::{is_normal_block_system, BlockSystem};
use crate::error::{Error, Result};
use crate::group::PermGroup;

/// How a group acts on one block it fixes setwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstituentKind {
    Trivial,
    Transitive,
    Other,
}

/// Kind of the constituent of `group` on `block`, which `group` must fix setwise.
pub fn constituent_kind(group: &PermGroup, block: &[usize]) -> ConstituentKind {
    if group
        .generators()
        .iter()
        .all(|g| block.iter().all(|&x| g.apply(x) == x))
    {
        return ConstituentKind::Trivial;
    }
    let mut member = vec![false; group.degree()];
    for &x in block {
        member[x] = true;
    }
    let mut reached = vec![false; group.degree()];
    reached[block[0]] = true;
    let mut stack = vec![block[0]];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for g in group.generators() {
            let y = g.apply(x);
            debug_assert!(member[y]);
            if !reached[y] {
                reached[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    if count == block.len() {
        ConstituentKind::Transitive
    } else {
        ConstituentKind::Other
    }
}

fn require_normal(group: &PermGroup, system: &BlockSystem) -> Result<()> {
    if !is_normal_block_system(group, system)? {
        return Err(Error::NotNormal);
    }
    Ok(())
}

fn require_index(system: &BlockSystem, b: usize) -> Result<()> {
    if b >= system.num_blocks() {
        return Err(Error::BlockOutOfRange {
            index: b,
            count: system.num_blocks(),
        });
    }
    Ok(())
}

/// Pointwise stabilizer of block `b` inside `fix_G(B)`, without the normality check.
pub(crate) fn pstab_unchecked(group: &PermGroup, system: &BlockSystem, b: usize) -> PermGroup {
    let labels = system.labels();
    let inside: Vec<bool> = (0..group.degree()).map(|x| labels[x] == b).collect();
    let ok = |p: usize, g: &crate::Permutation| {
        let y = g.apply(p);
        labels[y] == labels[p] && (!inside[p] || y == p)
    };
    group.search_subgroup(&ok, &|g| (0..group.degree()).all(|p| ok(p, g)))
}

/// `PStab_{fix_G(B)}(B_b)`.
pub fn pstab(group: &PermGroup, system: &BlockSystem, b: usize) -> Result<PermGroup> {
    require_normal(group, system)?;
    require_index(system, b)?;
    Ok(pstab_unchecked(group, system, b))
}

/// Shrinks `k` until every block constituent is trivial or transitive,
/// scanning blocks in the given order.
pub(crate) fn shrink_to_wstab(
    mut k: PermGroup,
    system: &BlockSystem,
    order: &[usize],
) -> PermGroup {
    'restart: loop {
        for &b in order {
            if constituent_kind(&k, system.block(b)) == ConstituentKind::Other {
                k = k.pointwise_stabilizer(system.block(b));
                continue 'restart;
            }
        }
        return k;
    }
}

/// `WStab_G(B_b)` without the normality check.
pub(crate) fn wstab_unchecked(group: &PermGroup, system: &BlockSystem, b: usize) -> PermGroup {
    let order: Vec<usize> = (0..system.num_blocks()).collect();
    shrink_to_wstab(pstab_unchecked(group, system, b), system, &order)
}

/// `WStab_G(B_b)`: the largest subgroup of `fix_G(B)` trivial on block `b`
/// and trivial or transitive on every block.
pub fn wstab(group: &PermGroup, system: &BlockSystem, b: usize) -> Result<PermGroup> {
    require_normal(group, system)?;
    require_index(system, b)?;
    Ok(wstab_unchecked(group, system, b))
}

/// Groups block indices by equality of the given per-block groups.
fn classes_by_equality(groups: &[PermGroup]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'next: for (i, g) in groups.iter().enumerate() {
        for class in &mut classes {
            if groups[class[0]].same_group(g) {
                class.push(i);
                continue 'next;
            }
        }
        classes.push(vec![i]);
    }
    classes
}

/// Blocks grouped by equal wreath stabilizers, classes ordered by least index.
pub fn equiv_classes(group: &PermGroup, system: &BlockSystem) -> Result<Vec<Vec<usize>>> {
    require_normal(group, system)?;
    let wstabs: Vec<PermGroup> = (0..system.num_blocks())
        .map(|b| wstab_unchecked(group, system, b))
        .collect();
    Ok(classes_by_equality(&wstabs))
}

/// Blocks grouped by equal pointwise stabilizers in the kernel.
pub fn sim_classes(group: &PermGroup, system: &BlockSystem) -> Result<Vec<Vec<usize>>> {
    require_normal(group, system)?;
    let pstabs: Vec<PermGroup> = (0..system.num_blocks())
        .map(|b| pstab_unchecked(group, system, b))
        .collect();
    Ok(classes_by_equality(&pstabs))
}

fn system_from_classes(system: &BlockSystem, classes: &[Vec<usize>]) -> Result<BlockSystem> {
    BlockSystem::new(
        system.degree(),
        classes.iter().map(|c| system.union_of(c)).collect(),
    )
}

/// The fixer block system: unions of `≡`-classes.
pub fn fixer_system(group: &PermGroup, system: &BlockSystem) -> Result<BlockSystem> {
    require_normal(group, system)?;
    Ok(fast_fixer_system(group, system))
}

/// Fixer system from a single wreath stabilizer.
///
/// `B ≡ B'` exactly when `WStab(B)` is trivial on `B'`: one direction is
/// immediate, and if `WStab(B)` is trivial on `B'` it satisfies the defining
/// property there, so `WStab(B) ≤ WStab(B')`, and the two are conjugate hence
/// equal. The class of block 0 is thus read off one group, and the other
/// classes are its images under `G`.
pub(crate) fn fast_fixer_system(group: &PermGroup, system: &BlockSystem) -> BlockSystem {
    let w = wstab_unchecked(group, system, 0);
    let class: Vec<usize> = (0..system.num_blocks())
        .filter(|&b| constituent_kind(&w, system.block(b)) == ConstituentKind::Trivial)
        .collect();
    let first = system.union_of(&class);
    let mut cells: Vec<Vec<usize>> = vec![first.clone()];
    let mut owner = vec![usize::MAX; group.degree()];
    for &x in &first {
        owner[x] = 0;
    }
    let mut head = 0;
    while head < cells.len() {
        let cell = cells[head].clone();
        head += 1;
        for g in group.generators() {
            let image: Vec<usize> = cell.iter().map(|&x| g.apply(x)).collect();
            if owner[image[0]] == usize::MAX {
                for &x in &image {
                    owner[x] = cells.len();
                }
                cells.push(image);
            }
        }
    }
    BlockSystem::new(group.degree(), cells)
        .expect("images of a block of a transitive group partition the points")
}

/// Everything computed about one normal block system.
#[derive(Clone, Debug)]
pub struct FixerData {
    pub base: BlockSystem,
    pub wstabs: Vec<PermGroup>,
    pub pstabs: Vec<PermGroup>,
    pub equiv_classes: Vec<Vec<usize>>,
    pub sim_classes: Vec<Vec<usize>>,
    pub fixer_system: BlockSystem,
}

pub fn fixer_data(group: &PermGroup, system: &BlockSystem) -> Result<FixerData> {
    require_normal(group, system)?;
    let nb = system.num_blocks();
    let pstabs: Vec<PermGroup> = (0..nb).map(|b| pstab_unchecked(group, system, b)).collect();
    let order: Vec<usize> = (0..nb).collect();
    let wstabs: Vec<PermGroup> = pstabs
        .iter()
        .map(|k| shrink_to_wstab(k.clone(), system, &order))
        .collect();
    let equiv = classes_by_equality(&wstabs);
    let sim = classes_by_equality(&pstabs);
    let fixer = system_from_classes(system, &equiv)?;
    Ok(FixerData {
        base: system.clone(),
        wstabs,
        pstabs,
        equiv_classes: equiv,
        sim_classes: sim,
        fixer_system: fixer,
    })
}

/// JSON view of [`FixerData`].
#[derive(Clone, Debug, Serialize)]
pub struct FixerReport {
    pub base: BlockSystem,
    pub wstab_generators: Vec<Vec<String>>,
    pub wstab_orders: Vec<String>,
    pub equiv_classes: Vec<Vec<usize>>,
    pub sim_classes: Vec<Vec<usize>>,
    pub fixer_system: BlockSystem,
}

impl From<&FixerData> for FixerReport {
    fn from(d: &FixerData) -> Self {
        FixerReport {
            base: d.base.clone(),
            wstab_generators: d
                .wstabs
                .iter()
                .map(|w| w.generators().iter().map(|g| g.to_string()).collect())
                .collect(),
            wstab_orders: d.wstabs.iter().map(|w| w.order().to_string()).collect(),
            equiv_classes: d.equiv_classes.clone(),
            sim_classes: d.sim_classes.clone(),
            fixer_system: d.fixer_system.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{cyclic_regular, regular_rep, translation};
    use crate::blocks::{all_block_systems, kernel_fix};
    use crate::subgroups::all_subgroups;
    use crate::Permutation;

    fn residues(n: usize, m: usize) -> BlockSystem {
        BlockSystem::from_labels(&(0..n).map(|x| x % m).collect::<Vec<_>>()).unwrap()
    }

    fn mult(n: usize, a: usize) -> Permutation {
        Permutation::from_fn(n, |x| a * x % n).unwrap()
    }

    fn p27() -> PermGroup {
        PermGroup::new(9, vec![translation(9), mult(9, 4)]).unwrap()
    }

    pub(crate) fn sim_neq_equiv_group() -> PermGroup {
        crate::named::sim_neq_equiv_example()
    }

    fn defining_property(k: &PermGroup, system: &BlockSystem, b: usize) -> bool {
        constituent_kind(k, system.block(b)) == ConstituentKind::Trivial
            && (0..system.num_blocks())
                .all(|c| constituent_kind(k, system.block(c)) != ConstituentKind::Other)
    }

    #[test]
    fn small_example_stabilizers() {
        let g = p27();
        assert_eq!(g.order(), 27);
        let b1 = residues(9, 3);
        let block0 = b1.block_of(0);
        let delta = PermGroup::new(9, vec![mult(9, 4)]).unwrap();
        assert!(pstab(&g, &b1, block0).unwrap().same_group(&delta));
        assert!(wstab(&g, &b1, block0).unwrap().same_group(&delta));
        let classes = equiv_classes(&g, &b1).unwrap();
        assert_eq!(classes, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(fixer_system(&g, &b1).unwrap(), b1);

        let c9 = cyclic_regular(9).unwrap();
        for b in 0..3 {
            assert!(pstab(&c9, &b1, b).unwrap().is_trivial());
            assert!(wstab(&c9, &b1, b).unwrap().is_trivial());
        }
        assert_eq!(equiv_classes(&c9, &b1).unwrap(), vec![vec![0, 1, 2]]);
        assert_eq!(sim_classes(&c9, &b1).unwrap(), vec![vec![0, 1, 2]]);
        assert_eq!(fixer_system(&c9, &b1).unwrap(), BlockSystem::whole(9));
    }

    #[test]
    fn sim_differs_from_equiv() {
        let g = sim_neq_equiv_group();
        assert_eq!(g.order(), 81);
        // orbits of ⟨τ2, τ3, δ⟩ are the sets with fixed first coordinate
        let system = BlockSystem::from_labels(&(0..27).map(|x| x / 9).collect::<Vec<_>>()).unwrap();
        assert!(is_normal_block_system(&g, &system).unwrap());
        let data = fixer_data(&g, &system).unwrap();
        assert_eq!(data.sim_classes, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(data.equiv_classes, vec![vec![0, 1, 2]]);
        assert!(data.wstabs[0].is_trivial());
        assert_eq!(data.pstabs[0].order(), 3);
        assert_eq!(data.fixer_system, BlockSystem::whole(27));
        assert_eq!(fast_fixer_system(&g, &system), data.fixer_system);
    }

    #[test]
    fn errors() {
        let g = p27();
        assert!(matches!(
            wstab(&g, &residues(9, 3), 3),
            Err(Error::BlockOutOfRange { .. })
        ));
        let s3reg = {
            let s3 = PermGroup::symmetric(3).elements(10).unwrap();
            let idx = |g: &Permutation| s3.iter().position(|h| h == g).unwrap();
            let table: Vec<Vec<usize>> = s3
                .iter()
                .map(|a| s3.iter().map(|b| idx(&a.compose(b))).collect())
                .collect();
            regular_rep(&table).unwrap()
        };
        let non_normal = all_block_systems(&s3reg)
            .unwrap()
            .into_iter()
            .find(|s| !is_normal_block_system(&s3reg, s).unwrap())
            .unwrap();
        assert!(matches!(
            fixer_system(&s3reg, &non_normal),
            Err(Error::NotNormal)
        ));
    }

    #[test]
    fn shrink_order_does_not_matter() {
        let g = sim_neq_equiv_group();
        let wr =
            crate::wreath::wreath(&cyclic_regular(3).unwrap(), &PermGroup::symmetric(3)).unwrap();
        for (group, system) in [
            (
                g.clone(),
                BlockSystem::from_labels(&(0..27).map(|x| x / 9).collect::<Vec<_>>()).unwrap(),
            ),
            (
                g,
                BlockSystem::from_labels(&(0..27).map(|x| x / 3).collect::<Vec<_>>()).unwrap(),
            ),
            (
                wr,
                BlockSystem::from_labels(&(0..9).map(|x| x / 3).collect::<Vec<_>>()).unwrap(),
            ),
        ] {
            if !is_normal_block_system(&group, &system).unwrap() {
                continue;
            }
            let nb = system.num_blocks();
            for b in 0..nb {
                let forward = wstab_unchecked(&group, &system, b);
                let reversed: Vec<usize> = (0..nb).rev().collect();
                let back = shrink_to_wstab(pstab_unchecked(&group, &system, b), &system, &reversed);
                assert!(forward.same_group(&back));
                assert!(defining_property(&forward, &system, b));
            }
        }
    }

    #[test]
    fn wstab_is_the_lattice_join() {
        let groups = vec![
            p27(),
            crate::wreath::wreath(&cyclic_regular(3).unwrap(), &cyclic_regular(3).unwrap())
                .unwrap(),
            crate::wreath::wreath(&cyclic_regular(2).unwrap(), &PermGroup::symmetric(3)).unwrap(),
            crate::wreath::wreath(&PermGroup::symmetric(3), &cyclic_regular(2).unwrap()).unwrap(),
            PermGroup::new(8, vec![translation(8), mult(8, 5)]).unwrap(),
        ];
        for g in groups {
            for system in all_block_systems(&g).unwrap() {
                if !is_normal_block_system(&g, &system).unwrap() {
                    continue;
                }
                let kernel = kernel_fix(&g, &system).unwrap();
                let subs = all_subgroups(&kernel, 2000).unwrap();
                for b in 0..system.num_blocks() {
                    let valid: Vec<Permutation> = subs
                        .iter()
                        .filter(|k| defining_property(k, &system, b))
                        .flat_map(|k| k.generators().to_vec())
                        .collect();
                    let join = PermGroup::new(g.degree(), valid).unwrap();
                    assert!(join.same_group(&wstab(&g, &system, b).unwrap()));
                }
            }
        }
    }

    #[test]
    fn conjugation_moves_wreath_stabilizers() {
        let g = sim_neq_equiv_group();
        let system = BlockSystem::from_labels(&(0..27).map(|x| x / 3).collect::<Vec<_>>()).unwrap();
        assert!(is_normal_block_system(&g, &system).unwrap());
        let ws: Vec<PermGroup> = (0..9).map(|b| wstab(&g, &system, b).unwrap()).collect();
        for s in g.generators() {
            for b in 0..9 {
                let image = system.block_of(s.apply(system.block(b)[0]));
                assert!(ws[image].same_group(&ws[b].conjugate_by(s)));
            }
        }
    }
}
