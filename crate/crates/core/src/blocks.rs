//! Block systems: detection, enumeration, normality, kernels and quotients.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;

/// Upper bound on the number of block systems `all_block_systems` will list.
pub const DEFAULT_BLOCK_SYSTEM_LIMIT: usize = 10_000;

/// A partition of `0..degree` into equal-size blocks, stored canonically:
/// points sorted inside each block, blocks sorted by least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "BlockSystemJson", into = "BlockSystemJson")]
pub struct BlockSystem {
    degree: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct BlockSystemJson {
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<BlockSystemJson> for BlockSystem {
    type Error = Error;
    fn try_from(value: BlockSystemJson) -> Result<Self> {
        let degree = value.blocks.iter().map(Vec::len).sum();
        BlockSystem::new(degree, value.blocks)
    }
}

impl From<BlockSystem> for BlockSystemJson {
    fn from(value: BlockSystem) -> Self {
        BlockSystemJson {
            blocks: value.blocks,
        }
    }
}

impl BlockSystem {
    /// Validates and canonicalizes a partition into equal-size blocks.
    pub fn new(degree: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        check_partition(degree, &blocks)?;
        let size = blocks[0].len();
        if blocks.iter().any(|b| b.len() != size) {
            return Err(Error::NotPartition("blocks have different sizes".into()));
        }
        Ok(Self::canonical(degree, blocks))
    }

    fn canonical(degree: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        let mut block_of = vec![0; degree];
        for (i, b) in blocks.iter().enumerate() {
            for &x in b {
                block_of[x] = i;
            }
        }
        BlockSystem {
            degree,
            blocks,
            block_of,
        }
    }

    /// Partition by label; labels need not be contiguous.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for (x, &l) in labels.iter().enumerate() {
            map.entry(l).or_insert_with(Vec::new).push(x);
        }
        BlockSystem::new(labels.len(), map.into_values().collect())
    }

    pub fn singletons(degree: usize) -> Self {
        Self::canonical(degree, (0..degree).map(|x| vec![x]).collect())
    }

    pub fn whole(degree: usize) -> Self {
        Self::canonical(degree, vec![(0..degree).collect()])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }

    /// Singleton or whole-set system.
    pub fn is_trivial(&self) -> bool {
        self.block_size() == 1 || self.num_blocks() == 1
    }

    /// `self ⪯ other`: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &BlockSystem) -> bool {
        self.degree == other.degree
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&x| other.block_of[x] == other.block_of[b[0]]))
    }

    /// `self ≺ other`: refines and differs.
    pub fn strictly_refines(&self, other: &BlockSystem) -> bool {
        self != other && self.refines(other)
    }

    /// Action of `g` on block indices; `g` must permute the blocks.
    pub fn block_action(&self, g: &Permutation) -> Result<Permutation> {
        let images: Vec<usize> = self
            .blocks
            .iter()
            .map(|b| self.block_of[g.apply(b[0])])
            .collect();
        for (i, b) in self.blocks.iter().enumerate() {
            if b.iter().any(|&x| self.block_of[g.apply(x)] != images[i]) {
                return Err(Error::NotBlockSystem);
            }
        }
        Permutation::from_images(images).map_err(|_| Error::NotBlockSystem)
    }

    /// For `self ⪯ coarser`, the partition of block indices of `self` induced by `coarser`.
    pub fn quotient_partition(&self, coarser: &BlockSystem) -> Result<BlockSystem> {
        if !self.refines(coarser) {
            return Err(Error::InvalidArgument(
                "system does not refine the coarser system".into(),
            ));
        }
        let labels: Vec<usize> = self.blocks.iter().map(|b| coarser.block_of(b[0])).collect();
        BlockSystem::from_labels(&labels)
    }

    /// Union of the given blocks, sorted.
    pub fn union_of(&self, block_indices: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = block_indices
            .iter()
            .flat_map(|&i| self.blocks[i].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

fn check_partition(degree: usize, cells: &[Vec<usize>]) -> Result<()> {
    if cells.is_empty() || cells.iter().any(Vec::is_empty) {
        return Err(Error::NotPartition("empty cell".into()));
    }
    let mut seen = vec![false; degree];
    let mut count = 0;
    for cell in cells {
        for &x in cell {
            if x >= degree || seen[x] {
                return Err(Error::NotPartition(format!(
                    "point {x} repeated or out of range"
                )));
            }
            seen[x] = true;
            count += 1;
        }
    }
    if count != degree {
        return Err(Error::NotPartition("cells do not cover every point".into()));
    }
    Ok(())
}

/// Whether every generator maps blocks onto blocks.
pub fn is_block_system(group: &PermGroup, system: &BlockSystem) -> bool {
    system.degree == group.degree()
        && group
            .generators()
            .iter()
            .all(|g| system.block_action(g).is_ok())
}

/// Raw-cell variant: errors on a non-partition, `false` on unequal cells.
pub fn is_block_system_cells(group: &PermGroup, cells: &[Vec<usize>]) -> Result<bool> {
    check_partition(group.degree(), cells)?;
    if cells.iter().any(|c| c.len() != cells[0].len()) {
        return Ok(false);
    }
    Ok(is_block_system(
        group,
        &BlockSystem::new(group.degree(), cells.to_vec())?,
    ))
}

/// Finest partition invariant under `gens` with each pair merged.
fn finest_invariant_partition(
    degree: usize,
    gens: &[Permutation],
    pairs: &[(usize, usize)],
) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut queue = Vec::new();
    for &(a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
            queue.push((a, b));
        }
    }
    while let Some((a, b)) = queue.pop() {
        for g in gens {
            let (ga, gb) = (g.apply(a), g.apply(b));
            let (ra, rb) = (find(&mut parent, ga), find(&mut parent, gb));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
                queue.push((ga, gb));
            }
        }
    }
    (0..degree).map(|x| find(&mut parent, x)).collect()
}

/// The minimal block system in which `0` and `y` share a block.
pub fn minimal_block_system(group: &PermGroup, y: usize) -> Result<BlockSystem> {
    if !group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let labels = finest_invariant_partition(group.degree(), group.generators(), &[(0, y)]);
    BlockSystem::from_labels(&labels)
}

/// Finest block system coarser than both inputs.
pub fn join_systems(group: &PermGroup, a: &BlockSystem, b: &BlockSystem) -> Result<BlockSystem> {
    let mut pairs = Vec::new();
    for sys in [a, b] {
        for block in sys.blocks() {
            pairs.extend(block.iter().skip(1).map(|&x| (block[0], x)));
        }
    }
    let labels = finest_invariant_partition(group.degree(), group.generators(), &pairs);
    BlockSystem::from_labels(&labels)
}

/// Every block system of a transitive group, trivial ones included, sorted by
/// block size and then canonically.
pub fn all_block_systems(group: &PermGroup) -> Result<Vec<BlockSystem>> {
    all_block_systems_limited(group, DEFAULT_BLOCK_SYSTEM_LIMIT)
}

pub fn all_block_systems_limited(group: &PermGroup, limit: usize) -> Result<Vec<BlockSystem>> {
    if !group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let n = group.degree();
    let mut found: HashSet<BlockSystem> = HashSet::new();
    let mut list = vec![BlockSystem::singletons(n)];
    found.insert(list[0].clone());
    let mut minimal = Vec::new();
    for y in 1..n {
        let sys = minimal_block_system(group, y)?;
        if found.insert(sys.clone()) {
            minimal.push(sys.clone());
            list.push(sys);
        }
    }
    let mut head = 1;
    while head < list.len() {
        let current = list[head].clone();
        head += 1;
        for m in &minimal {
            if m.refines(&current) {
                continue;
            }
            let joined = join_systems(group, &current, m)?;
            if found.insert(joined.clone()) {
                if list.len() >= limit {
                    return Err(Error::CapExceeded {
                        what: "block system count",
                        cap: limit,
                    });
                }
                list.push(joined);
            }
        }
    }
    list.sort_by(|a, b| a.block_size().cmp(&b.block_size()).then_with(|| a.cmp(b)));
    Ok(list)
}

fn require_block_system(group: &PermGroup, system: &BlockSystem) -> Result<()> {
    if system.degree != group.degree() {
        return Err(Error::DegreeMismatch {
            expected: group.degree(),
            found: system.degree,
        });
    }
    if !is_block_system(group, system) {
        return Err(Error::NotBlockSystem);
    }
    Ok(())
}

/// `fix_G(B)`: elements fixing every block setwise.
pub fn kernel_fix(group: &PermGroup, system: &BlockSystem) -> Result<PermGroup> {
    require_block_system(group, system)?;
    Ok(group.labelled_partition_stabilizer(system.labels()))
}

/// Whether the system is the orbit partition of its own block kernel.
pub fn is_normal_block_system(group: &PermGroup, system: &BlockSystem) -> Result<bool> {
    let kernel = kernel_fix(group, system)?;
    Ok(kernel.orbits().cells == system.blocks)
}

/// `G/B` acting on block indices in canonical order.
pub fn quotient(group: &PermGroup, system: &BlockSystem) -> Result<PermGroup> {
    require_block_system(group, system)?;
    let gens = group
        .generators()
        .iter()
        .map(|g| system.block_action(g))
        .collect::<Result<Vec<_>>>()?;
    PermGroup::new(system.num_blocks(), gens)
}

/// `g/B` for a single element.
pub fn quotient_element(g: &Permutation, system: &BlockSystem) -> Result<Permutation> {
    system.block_action(g)
}

/// The block system of `G` whose blocks are unions of `B`-blocks grouped by a
/// block system `on_blocks` of `G/B`.
pub fn induce(
    group: &PermGroup,
    system: &BlockSystem,
    on_blocks: &BlockSystem,
) -> Result<BlockSystem> {
    let quot = quotient(group, system)?;
    if on_blocks.degree != system.num_blocks() || !is_block_system(&quot, on_blocks) {
        return Err(Error::NotBlockSystem);
    }
    let cells = on_blocks
        .blocks
        .iter()
        .map(|cell| system.union_of(cell))
        .collect();
    let induced = BlockSystem::new(group.degree(), cells)?;
    debug_assert!(is_block_system(group, &induced));
    Ok(induced)
}
