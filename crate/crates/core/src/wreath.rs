//! Imprimitive wreath products. The point `(x, y)` of `X × Y` is encoded as
//! `x·|Y| + y`, so the fibres `{x} × Y` are runs of consecutive points.

use crate::blocks::{is_normal_block_system, BlockSystem};
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;

/// `G ≀ H`: `G` permutes the fibres, an independent copy of `H` acts on each.
pub fn wreath(top: &PermGroup, bottom: &PermGroup) -> Result<PermGroup> {
    let (m, n) = (top.degree(), bottom.degree());
    let mut gens = Vec::new();
    for g in top.generators() {
        gens.push(Permutation::from_fn(m * n, |p| g.apply(p / n) * n + p % n)?);
    }
    for x in 0..m {
        for h in bottom.generators() {
            gens.push(Permutation::from_fn(m * n, |p| {
                if p / n == x {
                    x * n + h.apply(p % n)
                } else {
                    p
                }
            })?);
        }
    }
    PermGroup::new(m * n, gens)
}

/// The fibre partition `{{x} × Y}` on `m·n` points.
pub fn lexi_partition(m: usize, n: usize) -> Result<BlockSystem> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "wreath factors need positive degree".into(),
        ));
    }
    BlockSystem::new(
        m * n,
        (0..m).map(|x| (x * n..(x + 1) * n).collect()).collect(),
    )
}

/// `G ≀ G ≀ … ≀ G` with `t` factors, nested to the left.
pub fn iterated_wreath(group: &PermGroup, t: usize) -> Result<PermGroup> {
    if t == 0 {
        return Err(Error::InvalidArgument(
            "wreath power needs at least one factor".into(),
        ));
    }
    let mut result = group.clone();
    for _ in 1..t {
        result = wreath(&result, group)?;
    }
    Ok(result)
}

/// The system `{{x} × B}` of `G1 ≀ G2` coming from a normal system `B` of `G2`.
pub fn normal_system_from_bottom(
    top: &PermGroup,
    bottom: &PermGroup,
    system: &BlockSystem,
) -> Result<BlockSystem> {
    if !top.is_transitive() || !bottom.is_transitive() {
        return Err(Error::NotTransitive);
    }
    if !is_normal_block_system(bottom, system)? {
        return Err(Error::NotNormal);
    }
    let (m, n) = (top.degree(), bottom.degree());
    let mut blocks = Vec::new();
    for x in 0..m {
        for b in system.blocks() {
            blocks.push(b.iter().map(|&y| x * n + y).collect());
        }
    }
    BlockSystem::new(m * n, blocks)
}
