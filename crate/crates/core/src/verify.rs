//! Named verification suites. Each suite runs one statement over a seeded
//! corpus and records a certificate for every instance that fails.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::actions::{action_properties, constituent, cyclic_regular, translation};
use crate::blocks::{
    all_block_systems, induce, is_block_system, is_normal_block_system, kernel_fix, quotient,
    BlockSystem,
};
use crate::closure::{
    closure_52, induced_fixer, is_52_closed, k_closure, quotient_hypothesis_check,
    transitive_candidates, Caps,
};
use crate::cyclic_keys::{
    cyclic_chain, enumerate_keys, fixer_chain, key_quotient_check, pi_group,
    sylow_classification_check, sylow_with_cycle, SylowMode,
};
use crate::error::{Error, Result};
use crate::fixer::{equiv_classes, fixer_system, pstab, sim_classes, wstab};
use crate::group::PermGroup;
use crate::incidence::{
    aut_group, circulant, fano_plane, is_m_intersecting, orbit_set_system, random_one_intersecting,
    set_to_tuple, ColoredTupleSystem,
};
use crate::named::{
    affine_group, dihedral, multiplication, order_p3_example, sim_neq_equiv_blocks,
    sim_neq_equiv_example,
};
use crate::perm::Permutation;
use crate::subgroups::transitive_subgroups_up_to_conjugacy;
use crate::wreath::{iterated_wreath, wreath};

pub const DEFAULT_SEED: u64 = 20_231_017;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub anchor: &'static str,
    /// Target instance count when `SuiteParams::instances` is zero.
    pub default_instances: usize,
}

const SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        name: "wstab-conjugacy",
        anchor: "wreath stabilizers of blocks in one orbit are conjugate",
        default_instances: 100,
    },
    SuiteInfo {
        name: "equiv-properties",
        anchor: "the equivalence classes form a block system refined by the base",
        default_instances: 100,
    },
    SuiteInfo {
        name: "wstab-vs-pstab",
        anchor:
            "the wreath stabilizer is normal in the kernel and lies in the pointwise stabilizer",
        default_instances: 100,
    },
    SuiteInfo {
        name: "quasiprimitive-equivalence",
        anchor: "quasiprimitive kernel constituents make the two relations agree",
        default_instances: 100,
    },
    SuiteInfo {
        name: "quotient-normal",
        anchor: "systems of the quotient induce (normal) block systems",
        default_instances: 100,
    },
    SuiteInfo {
        name: "key-tool",
        anchor: "the fixer system of the maximal lift is the quotient fixer system",
        default_instances: 100,
    },
    SuiteInfo {
        name: "quotient-theorem",
        anchor: "quotients of 5/2-closed groups are 5/2-closed under the refinement hypothesis",
        default_instances: 100,
    },
    SuiteInfo {
        name: "one-intersecting",
        anchor: "automorphism groups of point-transitive 1-intersecting systems are 5/2-closed",
        default_instances: 30,
    },
    SuiteInfo {
        name: "wreath-closure",
        anchor: "the closure of a wreath product is the wreath product of the closures",
        default_instances: 169,
    },
    SuiteInfo {
        name: "pgroup-closure",
        anchor: "the closure of a transitive p-group is a p-group",
        default_instances: 100,
    },
    SuiteInfo {
        name: "monotone-closure",
        anchor: "closure is monotone on transitive groups",
        default_instances: 100,
    },
    SuiteInfo {
        name: "ef-relationship",
        anchor: "for nested normal systems either C refines E or E strictly refines F",
        default_instances: 100,
    },
    SuiteInfo {
        name: "bottom",
        anchor: "noncyclic p-groups containing the long cycle have kernel of order at least p^2",
        default_instances: 100,
    },
    SuiteInfo {
        name: "pk-fixers",
        anchor: "fixer systems along the cyclic chain are monotone",
        default_instances: 100,
    },
    SuiteInfo {
        name: "key-quotient",
        anchor: "the quotient of a key group by B_1 is the group of the truncated key",
        default_instances: 30,
    },
    SuiteInfo {
        name: "sylow-classification",
        anchor: "closures of p-groups containing the long cycle are key groups",
        default_instances: 100,
    },
    SuiteInfo {
        name: "example-p3-closure",
        anchor: "the order p^3 example: closure kernel of order p^p",
        default_instances: 2,
    },
    SuiteInfo {
        name: "example-agl",
        anchor: "groups of prime degree are 5/2-closed but not always 2-closed",
        default_instances: 3,
    },
    SuiteInfo {
        name: "example-sim-neq-equiv",
        anchor: "the two block relations can differ",
        default_instances: 1,
    },
];

/// The catalogue, restricted to names containing `filter`.
pub fn list_suites(filter: &str) -> Vec<SuiteInfo> {
    SUITES
        .iter()
        .filter(|s| s.name.contains(filter))
        .copied()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteParams {
    pub seed: u64,
    /// Largest degree of generated instances.
    pub max_degree: usize,
    /// Target instance count; zero picks the suite default.
    pub instances: usize,
    pub caps: Caps,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            seed: DEFAULT_SEED,
            max_degree: 27,
            instances: 0,
            caps: Caps::default(),
        }
    }
}

/// An instance that failed, with enough input to rerun it.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub instance: usize,
    pub input: Value,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub anchor: String,
    pub seed: u64,
    pub instances: usize,
    /// Instances dropped because a hypothesis failed or a cap was hit.
    pub skipped: usize,
    /// Instances whose closure computations ran below the order cap.
    pub exhaustive: usize,
    pub failures: Vec<Certificate>,
    pub notes: BTreeMap<String, Value>,
    pub passed: bool,
    pub elapsed_ms: u128,
}

#[derive(Default)]
struct Tally {
    instances: usize,
    skipped: usize,
    exhaustive: usize,
    failures: Vec<Certificate>,
    notes: BTreeMap<String, Value>,
}

impl Tally {
    fn check(&mut self, ok: bool, input: impl FnOnce() -> Value, reason: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(Certificate {
                instance: self.instances,
                input: input(),
                reason: reason(),
            });
        }
        self.instances += 1;
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn note(&mut self, key: &str, value: Value) {
        self.notes.insert(key.to_string(), value);
    }
}

fn group_json(g: &PermGroup) -> Value {
    crate::io::group_to_json(g)
}

fn system_json(b: &BlockSystem) -> Value {
    json!(b.blocks())
}

pub fn run_suite(name: &str, params: &SuiteParams) -> Result<SuiteReport> {
    let info = SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    let target = if params.instances == 0 {
        info.default_instances
    } else {
        params.instances
    };
    let ctx = Ctx { params, target };
    let start = Instant::now();
    let mut t = Tally::default();
    match name {
        "wstab-conjugacy" => wstab_conjugacy(&ctx, &mut t)?,
        "equiv-properties" => equiv_properties(&ctx, &mut t)?,
        "wstab-vs-pstab" => wstab_vs_pstab(&ctx, &mut t)?,
        "quasiprimitive-equivalence" => quasiprimitive_equivalence(&ctx, &mut t)?,
        "quotient-normal" => quotient_normal(&ctx, &mut t)?,
        "key-tool" => key_tool(&ctx, &mut t)?,
        "quotient-theorem" => quotient_theorem(&ctx, &mut t)?,
        "one-intersecting" => one_intersecting(&ctx, &mut t)?,
        "wreath-closure" => wreath_closure(&ctx, &mut t)?,
        "pgroup-closure" => pgroup_closure(&ctx, &mut t)?,
        "monotone-closure" => monotone_closure(&ctx, &mut t)?,
        "ef-relationship" => ef_relationship(&ctx, &mut t)?,
        "bottom" => bottom(&ctx, &mut t)?,
        "pk-fixers" => pk_fixers(&ctx, &mut t)?,
        "key-quotient" => key_quotient(&ctx, &mut t)?,
        "sylow-classification" => sylow_classification(&ctx, &mut t)?,
        "example-p3-closure" => example_p3_closure(&ctx, &mut t)?,
        "example-agl" => example_agl(&ctx, &mut t)?,
        "example-sim-neq-equiv" => example_sim_neq_equiv(&mut t)?,
        _ => unreachable!("catalogue and dispatch agree"),
    }
    Ok(SuiteReport {
        suite: info.name.to_string(),
        anchor: info.anchor.to_string(),
        seed: params.seed,
        instances: t.instances,
        skipped: t.skipped,
        exhaustive: t.exhaustive,
        passed: t.failures.is_empty(),
        failures: t.failures,
        notes: t.notes,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

struct Ctx<'a> {
    params: &'a SuiteParams,
    target: usize,
}

impl Ctx<'_> {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        rng.set_stream(stream);
        rng
    }

    fn caps(&self) -> &Caps {
        &self.params.caps
    }
}

/// Transitive groups of degree 2 to 5, one per conjugacy class.
fn small_transitive_groups() -> Result<Vec<PermGroup>> {
    let mut out = Vec::new();
    for d in 2..=5 {
        out.extend(transitive_subgroups_up_to_conjugacy(
            &PermGroup::symmetric(d),
            200,
        )?);
    }
    Ok(out)
}

/// A random transitive subgroup of `top ≀ bottom`.
fn random_wreath_subgroup(
    top: &PermGroup,
    bottom: &PermGroup,
    rng: &mut ChaCha8Rng,
) -> Result<PermGroup> {
    let w = wreath(top, bottom)?;
    for _ in 0..20 {
        let mut gens: Vec<Permutation> = (0..2).map(|_| w.random_element(rng)).collect();
        if rng.gen_bool(0.5) {
            let base = crate::wreath::lexi_partition(top.degree(), bottom.degree())?;
            gens.push(kernel_fix(&w, &base)?.random_element(rng));
        }
        let g = PermGroup::new(w.degree(), gens)?;
        if g.is_transitive() {
            return Ok(g);
        }
    }
    Ok(w)
}

/// Paper examples, key groups of degree at most 27, and seeded random
/// imprimitive groups of degree at most 12.
fn group_corpus(ctx: &Ctx, random: usize) -> Result<Vec<PermGroup>> {
    let max_degree = ctx.params.max_degree;
    let mut out = vec![
        order_p3_example(3)?,
        sim_neq_equiv_example(),
        affine_group(5)?,
        dihedral(12)?,
        cyclic_regular(27)?,
    ];
    for n in 1..=3 {
        for k in enumerate_keys(n)? {
            out.push(pi_group(3, &k)?);
        }
    }
    for k in enumerate_keys(2)? {
        out.push(pi_group(5, &k)?);
    }
    let small = small_transitive_groups()?;
    let mut rng = ctx.rng(1);
    let mut made = 0;
    while made < random {
        let top = &small[rng.gen_range(0..small.len())];
        let bottom = &small[rng.gen_range(0..small.len())];
        if top.degree() * bottom.degree() > 12 {
            continue;
        }
        out.push(random_wreath_subgroup(top, bottom, &mut rng)?);
        made += 1;
    }
    out.retain(|g| g.degree() <= max_degree);
    Ok(out)
}

fn normal_systems(g: &PermGroup) -> Result<Vec<BlockSystem>> {
    let mut out = Vec::new();
    for b in all_block_systems(g)? {
        if is_normal_block_system(g, &b)? {
            out.push(b);
        }
    }
    Ok(out)
}

fn nontrivial_normal_systems(g: &PermGroup) -> Result<Vec<BlockSystem>> {
    Ok(normal_systems(g)?
        .into_iter()
        .filter(|b| !b.is_trivial())
        .collect())
}

/// Corpus large enough that suites stop at their target before running out.
fn large_corpus(ctx: &Ctx) -> Result<Vec<PermGroup>> {
    group_corpus(ctx, 8 * ctx.target)
}

/// `(G, B)` pairs with `B` a nontrivial normal system, at least `target` of them when possible.
fn normal_pairs(ctx: &Ctx) -> Result<Vec<(PermGroup, BlockSystem)>> {
    let mut out = Vec::new();
    for g in large_corpus(ctx)? {
        if out.len() >= ctx.target {
            break;
        }
        for b in nontrivial_normal_systems(&g)? {
            out.push((g.clone(), b));
        }
    }
    Ok(out)
}

fn wstab_conjugacy(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let mut rng = ctx.rng(2);
    for (g, b) in normal_pairs(ctx)? {
        let w0 = wstab(&g, &b, 0)?;
        for _ in 0..2 {
            let x = g.random_element(&mut rng);
            let target = b.block_of(x.apply(b.block(0)[0]));
            let ok = wstab(&g, &b, target)?.same_group(&w0.conjugate_by(&x));
            t.check(
                ok,
                || json!({"group": group_json(&g), "system": system_json(&b), "element": x.to_string()}),
                || format!("wreath stabilizer of block {target} is not the conjugate"),
            );
        }
    }
    Ok(())
}

fn equiv_properties(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for (g, b) in normal_pairs(ctx)? {
        let classes = equiv_classes(&g, &b)?;
        let e = fixer_system(&g, &b)?;
        let mut covered: Vec<usize> = classes.iter().flatten().copied().collect();
        covered.sort_unstable();
        let partition = covered == (0..b.num_blocks()).collect::<Vec<_>>();
        let unions: Vec<Vec<usize>> = classes.iter().map(|c| b.union_of(c)).collect();
        let from_classes = BlockSystem::new(g.degree(), unions).ok();
        let ok = partition
            && is_block_system(&g, &e)
            && b.refines(&e)
            && from_classes.as_ref() == Some(&e);
        t.check(
            ok,
            || json!({"group": group_json(&g), "system": system_json(&b)}),
            || "fixer system is not a block system built from the classes".into(),
        );
    }
    Ok(())
}

fn wstab_vs_pstab(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for (g, b) in normal_pairs(ctx)? {
        let fix = kernel_fix(&g, &b)?;
        let w = wstab(&g, &b, 0)?;
        let p = pstab(&g, &b, 0)?;
        let equiv = equiv_classes(&g, &b)?;
        let sim = sim_classes(&g, &b)?;
        let nested = sim
            .iter()
            .all(|s| equiv.iter().any(|e| s.iter().all(|x| e.contains(x))));
        let ok =
            w.is_subgroup_of(&p) && w.is_normalized_by(&fix) && w.is_normalized_by(&p) && nested;
        t.check(
            ok,
            || json!({"group": group_json(&g), "system": system_json(&b)}),
            || "wreath stabilizer is not normal in the kernel or classes do not nest".into(),
        );
    }
    Ok(())
}

fn quasiprimitive_equivalence(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for (g, b) in normal_pairs(ctx)? {
        let fix = kernel_fix(&g, &b)?;
        let local = constituent(&fix, b.block(0))?.group;
        if !action_properties(&local)?.quasiprimitive {
            t.skip();
            continue;
        }
        let same_stabs = (0..b.num_blocks()).all(
            |i| matches!((pstab(&g, &b, i), wstab(&g, &b, i)), (Ok(p), Ok(w)) if p.same_group(&w)),
        );
        let ok = same_stabs && sim_classes(&g, &b)? == equiv_classes(&g, &b)?;
        t.check(
            ok,
            || json!({"group": group_json(&g), "system": system_json(&b)}),
            || "quasiprimitive kernel constituent but the relations differ".into(),
        );
    }
    Ok(())
}

fn quotient_normal(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for g in large_corpus(ctx)? {
        if t.instances >= ctx.target {
            break;
        }
        for b in nontrivial_normal_systems(&g)? {
            let q = quotient(&g, &b)?;
            for cb in all_block_systems(&q)? {
                if cb.is_trivial() {
                    continue;
                }
                let c = induce(&g, &b, &cb)?;
                let normal_above = is_normal_block_system(&q, &cb)?;
                let ok =
                    is_block_system(&g, &c) && (!normal_above || is_normal_block_system(&g, &c)?);
                t.check(
                    ok,
                    || json!({"group": group_json(&g), "system": system_json(&b), "quotient_system": system_json(&cb)}),
                    || "induced partition is not a (normal) block system".into(),
                );
            }
        }
    }
    Ok(())
}

/// Corpus groups above this order are not closed for the closed-group suites.
const CLOSED_CORPUS_ORDER_CAP: u128 = 600;

/// Calls `visit` on distinct 5/2-closed groups, exhaustively verified, until
/// the tally reaches the target.
fn for_each_closed(
    ctx: &Ctx,
    t: &mut Tally,
    mut visit: impl FnMut(&PermGroup, &mut Tally) -> Result<()>,
) -> Result<()> {
    let cap = ctx.caps().subgroup_order_cap as u128;
    let mut seen: Vec<PermGroup> = Vec::new();
    for g in large_corpus(ctx)? {
        if t.instances >= ctx.target {
            break;
        }
        if g.order() > CLOSED_CORPUS_ORDER_CAP || g.degree() > 12 {
            continue;
        }
        let c = closure_52(&g, ctx.caps())?;
        if !(c.complete && c.exhaustive && c.group.order() <= cap)
            || seen.iter().any(|h| h.same_group(&c.group))
        {
            continue;
        }
        visit(&c.group, t)?;
        seen.push(c.group);
    }
    Ok(())
}

fn key_tool(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for_each_closed(ctx, t, |g, t| {
        for b in nontrivial_normal_systems(g)? {
            let e = fixer_system(g, &b)?;
            let fix = kernel_fix(g, &b)?;
            let (candidates, _) = transitive_candidates(g, ctx.caps())?;
            for h in candidates {
                let hq = quotient(&h, &b)?;
                let lift = h.join_with(fix.generators())?;
                for cq in all_block_systems(&hq)? {
                    if cq.is_trivial() || !is_normal_block_system(&hq, &cq)? {
                        continue;
                    }
                    let c = induce(&h, &b, &cq)?;
                    let e_prime = induced_fixer(&h, &b, &c)?;
                    if !e.refines(&e_prime) {
                        t.skip();
                        continue;
                    }
                    let ok = fixer_system(&lift, &c)
                        .map(|f| f == e_prime)
                        .unwrap_or(false);
                    t.check(
                        ok,
                        || json!({"group": group_json(g), "system": system_json(&b), "subgroup": group_json(&h), "upper": system_json(&c)}),
                        || "fixer system of the lift differs from the quotient fixer system".into(),
                    );
                }
            }
        }
        Ok(())
    })
}

fn quotient_theorem(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for_each_closed(ctx, t, |g, t| {
        for b in nontrivial_normal_systems(g)? {
            if !quotient_hypothesis_check(g, &b, ctx.caps())? {
                t.skip();
                continue;
            }
            let q = quotient(g, &b)?;
            let verdict = is_52_closed(&q, ctx.caps())?;
            if verdict.exhaustive {
                t.exhaustive += 1;
            }
            t.check(
                verdict.closed,
                || json!({"group": group_json(g), "system": system_json(&b)}),
                || "quotient is not 5/2-closed".into(),
            );
        }
        Ok(())
    })
}

const ONE_INTERSECTING_AUT_CAP: u128 = 10_000;

fn one_intersecting(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let mut rng = ctx.rng(3);
    let mut systems: Vec<(String, ColoredTupleSystem)> =
        vec![("fano".into(), set_to_tuple(&fano_plane())?)];
    // circulants on 9 points with random coloured connection sets
    let mut tries = 0;
    while systems.len() < ctx.target / 2 + 1 && tries < 50 * ctx.target {
        tries += 1;
        let colors = rng.gen_range(1..=3u32);
        let mut conn: Vec<(Vec<i64>, u32)> = (0..colors).map(|c| (Vec::new(), c)).collect();
        for s in 1..9i64 {
            let slot = rng.gen_range(0..=colors) as usize;
            if slot < colors as usize {
                conn[slot].0.push(s);
            }
        }
        conn.retain(|(r, _)| !r.is_empty());
        if conn.is_empty() {
            continue;
        }
        systems.push((format!("circulant {conn:?}"), circulant(9, &conn)?));
    }
    // random systems: orbits of seed sets under small transitive groups, and greedy sets
    let sources = [
        cyclic_regular(7)?,
        dihedral(8)?,
        affine_group(7)?,
        cyclic_regular(9)?,
        dihedral(9)?,
        order_p3_example(3)?,
        cyclic_regular(6)?,
    ];
    tries = 0;
    while systems.len() < ctx.target && tries < 200 * ctx.target {
        tries += 1;
        let g = &sources[tries % sources.len()];
        let n = g.degree();
        let seeds: Vec<Vec<usize>> = (0..rng.gen_range(1..=2))
            .map(|_| {
                let size = rng.gen_range(2..=3);
                rand::seq::index::sample(&mut rng, n, size).into_vec()
            })
            .collect();
        let s = orbit_set_system(g, &seeds)?;
        if is_m_intersecting(&s, 1) && !s.sets().is_empty() {
            systems.push((
                format!("orbits of {seeds:?} under {}", group_json(g)),
                set_to_tuple(&s)?,
            ));
        }
        if tries % 7 == 0 {
            let s = random_one_intersecting(rng.gen_range(5..=9), 3, 12, 2, &mut rng)?;
            systems.push(("greedy".into(), set_to_tuple(&s)?));
        }
    }
    let mut large = 0;
    for (label, system) in systems {
        let aut = aut_group(&system)?;
        if !aut.is_transitive() {
            t.skip();
            continue;
        }
        if aut.order() > ONE_INTERSECTING_AUT_CAP {
            large += 1;
            t.skip();
            continue;
        }
        let verdict = is_52_closed(&aut, ctx.caps())?;
        if verdict.exhaustive {
            t.exhaustive += 1;
        }
        t.check(
            verdict.closed,
            || json!({"system": label, "tuples": serde_json::to_value(&system).unwrap_or(Value::Null)}),
            || "automorphism group is not 5/2-closed".into(),
        );
    }
    t.note("automorphism_group_over_cap", json!(large));
    Ok(())
}

/// Order cap for exhaustive closures of wreath products in the suite; larger
/// products are checked in sampled mode.
const WREATH_SUITE_ORDER_CAP: usize = 500;

fn wreath_closure(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let factors = small_transitive_groups()?;
    let caps = Caps {
        subgroup_order_cap: WREATH_SUITE_ORDER_CAP.min(ctx.caps().subgroup_order_cap),
        ..ctx.caps().clone()
    };
    let closures: Vec<PermGroup> = factors
        .iter()
        .map(|g| closure_52(g, ctx.caps()).map(|c| c.group))
        .collect::<Result<_>>()?;
    'outer: for (a, ca) in factors.iter().zip(&closures) {
        for (b, cb) in factors.iter().zip(&closures) {
            if t.instances >= ctx.target {
                break 'outer;
            }
            if a.degree() * b.degree() > ctx.params.max_degree {
                t.skip();
                continue;
            }
            let w = wreath(a, b)?;
            let c = closure_52(&w, &caps)?;
            if c.exhaustive {
                t.exhaustive += 1;
            }
            let expected = wreath(ca, cb)?;
            t.check(
                c.complete && c.group.same_group(&expected),
                || json!({"top": group_json(a), "bottom": group_json(b)}),
                || {
                    format!(
                        "closure has order {}, expected {}",
                        c.group.order(),
                        expected.order()
                    )
                },
            );
        }
    }
    Ok(())
}

fn is_power_of(mut n: u128, p: u128) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

fn pgroup_closure(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let mut rng = ctx.rng(4);
    let shapes: Vec<(usize, usize)> = [(2, 2), (2, 3), (3, 2), (5, 1), (3, 3), (5, 2), (2, 4)]
        .into_iter()
        .filter(|&(p, n): &(usize, usize)| p.pow(n as u32) <= ctx.params.max_degree)
        .collect();
    let sylows: Vec<PermGroup> = shapes
        .iter()
        .map(|&(p, n)| iterated_wreath(&cyclic_regular(p)?, n))
        .collect::<Result<_>>()?;
    let mut i = 0;
    while t.instances < ctx.target && i < 20 * ctx.target {
        let (p, _) = shapes[i % shapes.len()];
        let sylow = &sylows[i % shapes.len()];
        i += 1;
        let gens: Vec<Permutation> = (0..rng.gen_range(1..=3))
            .map(|_| sylow.random_element(&mut rng))
            .collect();
        let g = PermGroup::new(sylow.degree(), gens)?;
        if !g.is_transitive() {
            continue;
        }
        let c = closure_52(&g, ctx.caps())?;
        if c.exhaustive {
            t.exhaustive += 1;
        }
        t.check(
            is_power_of(c.group.order(), p as u128),
            || group_json(&g),
            || format!("closure has order {}", c.group.order()),
        );
    }
    Ok(())
}

fn monotone_closure(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let mut rng = ctx.rng(5);
    for g in large_corpus(ctx)? {
        if t.instances >= ctx.target {
            break;
        }
        if g.order() > CLOSED_CORPUS_ORDER_CAP {
            continue;
        }
        let cg = closure_52(&g, ctx.caps())?;
        if !(cg.complete && cg.exhaustive) {
            t.skip();
            continue;
        }
        let (candidates, _) = transitive_candidates(&g, ctx.caps())?;
        let picks = [rng.gen_range(0..candidates.len()), 0];
        for &k in &picks[..candidates.len().min(2)] {
            let h = &candidates[k];
            let ch = closure_52(h, ctx.caps())?;
            if !(ch.complete && ch.exhaustive) {
                t.skip();
                continue;
            }
            t.exhaustive += 1;
            t.check(
                ch.group.is_subgroup_of(&cg.group),
                || json!({"group": group_json(&g), "subgroup": group_json(h)}),
                || "closure of the subgroup is not contained in the closure of the group".into(),
            );
        }
    }
    Ok(())
}

fn ef_relationship(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for g in large_corpus(ctx)? {
        if t.instances >= ctx.target {
            break;
        }
        let systems = normal_systems(&g)?;
        for b in &systems {
            for c in &systems {
                if !b.strictly_refines(c) || (b.num_blocks() == g.degree() && c.num_blocks() == 1) {
                    continue;
                }
                let e = fixer_system(&g, b)?;
                let f = induced_fixer(&g, b, c)?;
                t.check(
                    c.refines(&e) || e.strictly_refines(&f),
                    || json!({"group": group_json(&g), "lower": system_json(b), "upper": system_json(c)}),
                    || "neither C refines E nor E strictly refines F".into(),
                );
            }
        }
    }
    Ok(())
}

/// Random `⟨τ, r_1, …⟩` inside the Sylow subgroup containing `τ`, for odd `p`.
fn cycle_overgroups(
    ctx: &Ctx,
    stream: u64,
    with_multipliers: bool,
) -> Result<Vec<(usize, usize, PermGroup)>> {
    let mut rng = ctx.rng(stream);
    let shapes: Vec<(usize, usize)> = [(3, 2), (3, 3), (5, 2)]
        .into_iter()
        .filter(|&(p, n): &(usize, usize)| p.pow(n as u32) <= ctx.params.max_degree)
        .collect();
    let sylows: Vec<PermGroup> = shapes
        .iter()
        .map(|&(p, n)| sylow_with_cycle(p, n))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..2 * ctx.target {
        if shapes.is_empty() {
            break;
        }
        let (p, n) = shapes[i % shapes.len()];
        let sylow = &sylows[i % shapes.len()];
        let degree = sylow.degree();
        let mut gens = vec![translation(degree)];
        gens.extend((0..rng.gen_range(1..=2)).map(|_| sylow.random_element(&mut rng)));
        if with_multipliers && rng.gen_bool(0.5) {
            let units: Vec<usize> = (2..degree).filter(|a| a % p != 0).collect();
            gens.push(multiplication(
                degree,
                units[rng.gen_range(0..units.len())],
            )?);
        }
        out.push((p, n, PermGroup::new(degree, gens)?));
    }
    Ok(out)
}

fn bottom(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for (p, n, g) in cycle_overgroups(ctx, 6, false)? {
        if t.instances >= ctx.target {
            break;
        }
        if g.order() == (p as u128).pow(n as u32) {
            t.skip();
            continue;
        }
        let chain = cyclic_chain(p, n)?;
        let k = kernel_fix(&g, chain.system(1))?.order();
        t.check(
            k >= (p * p) as u128,
            || group_json(&g),
            || format!("kernel on B_1 has order {k}"),
        );
    }
    Ok(())
}

fn pk_fixers(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for (p, n, g) in cycle_overgroups(ctx, 7, true)? {
        if t.instances >= ctx.target {
            break;
        }
        let chain = cyclic_chain(p, n)?;
        let e = fixer_chain(&g, &chain)?;
        t.check(
            e.windows(2).all(|w| w[0].refines(&w[1])),
            || group_json(&g),
            || "fixer chain is not monotone".into(),
        );
    }
    Ok(())
}

fn key_quotient(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for (p, max_n) in [(3usize, 4usize), (5, 3)] {
        for n in 2..=max_n {
            if p.pow(n as u32) > ctx.params.max_degree.max(125) {
                continue;
            }
            for k in enumerate_keys(n)? {
                t.check(
                    key_quotient_check(p, &k)?,
                    || json!({"p": p, "key": k}),
                    || "quotient differs".into(),
                );
            }
        }
    }
    Ok(())
}

fn sylow_classification(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let caps = Caps {
        seed: ctx.params.seed,
        ..ctx.caps().clone()
    };
    let exhaustive = sylow_classification_check(3, 2, SylowMode::Exhaustive, &caps)?;
    let sampled = sylow_classification_check(
        3,
        3,
        SylowMode::Sampled {
            samples: ctx.target,
        },
        &caps,
    )?;
    for report in [&exhaustive, &sampled] {
        for case in &report.exceptions {
            t.failures.push(Certificate {
                instance: t.instances,
                input: serde_json::to_value(case).unwrap_or(Value::Null),
                reason: format!(
                    "closure matches no key at degree {}",
                    3usize.pow(report.n as u32)
                ),
            });
        }
        t.instances += report.instances;
    }
    t.exhaustive = exhaustive.instances;
    t.note("degree_9_keys", json!(exhaustive.key_counts));
    t.note("degree_27_keys", json!(sampled.key_counts));
    Ok(())
}

fn example_p3_closure(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for p in [3usize, 5] {
        let g = order_p3_example(p)?;
        let chain = cyclic_chain(p, 2)?;
        let b1 = chain.system(1);
        let c = closure_52(&g, ctx.caps())?;
        let kernel = kernel_fix(&c.group, b1)?.order();
        let w = wstab(&g, b1, b1.block_of(0))?;
        let expected_w = PermGroup::new(p * p, vec![multiplication(p * p, 1 + p)?])?;
        let pp = (p as u128).pow(p as u32);
        t.note(
            &format!("closure_order_p{p}"),
            json!(c.group.order().to_string()),
        );
        if c.exhaustive {
            t.exhaustive += 1;
        }
        t.check(
            c.group.order() == pp * p as u128 && kernel == pp && w.same_group(&expected_w),
            || json!({"p": p}),
            || format!("closure order {}, kernel order {kernel}", c.group.order()),
        );
    }
    Ok(())
}

fn example_agl(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for p in [3usize, 5, 7] {
        let mut groups = if p <= 5 {
            transitive_subgroups_up_to_conjugacy(&PermGroup::symmetric(p), 200)?
        } else {
            let psl = aut_group(&set_to_tuple(&fano_plane())?)?;
            vec![
                cyclic_regular(7)?,
                dihedral(7)?,
                affine_group(7)?,
                psl,
                PermGroup::symmetric(7),
            ]
        };
        groups.push(affine_group(p)?);
        let mut all_closed = true;
        for g in &groups {
            let v = is_52_closed(g, ctx.caps())?;
            all_closed &= v.closed;
        }
        let two = k_closure(&affine_group(p)?, 2)?;
        let factorial: u128 = (1..=p as u128).product();
        t.check(
            all_closed && two.order() == factorial,
            || json!({"p": p}),
            || "a prime-degree group is not 5/2-closed or AGL(1,p) is not 2-dense".into(),
        );
    }
    let p27 = order_p3_example(3)?;
    t.check(
        k_closure(&p27, 3)?.same_group(&p27),
        || group_json(&p27),
        || "the order 27 example is not 3-closed".into(),
    );
    Ok(())
}

fn example_sim_neq_equiv(t: &mut Tally) -> Result<()> {
    let g = sim_neq_equiv_example();
    let b = sim_neq_equiv_blocks();
    let sim = sim_classes(&g, &b)?;
    let equiv = equiv_classes(&g, &b)?;
    let e = fixer_system(&g, &b)?;
    t.check(
        sim == vec![vec![0], vec![1], vec![2]] && equiv.len() == 1 && e == BlockSystem::whole(27),
        || group_json(&g),
        || format!("sim classes {sim:?}, equiv classes {equiv:?}"),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue() {
        assert_eq!(list_suites("").len(), 19);
        let closure: Vec<&str> = list_suites("closure").iter().map(|s| s.name).collect();
        assert_eq!(
            closure,
            [
                "wreath-closure",
                "pgroup-closure",
                "monotone-closure",
                "example-p3-closure"
            ]
        );
        assert!(matches!(
            run_suite("no-such-suite", &SuiteParams::default()),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn examples_pass() {
        for name in [
            "example-p3-closure",
            "example-sim-neq-equiv",
            "key-quotient",
        ] {
            let r = run_suite(name, &SuiteParams::default()).unwrap();
            assert!(r.passed, "{name}: {:?}", r.failures);
            assert!(r.instances > 0);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let params = SuiteParams {
            instances: 12,
            ..SuiteParams::default()
        };
        let a = run_suite("wstab-conjugacy", &params).unwrap();
        let b = run_suite("wstab-conjugacy", &params).unwrap();
        assert!(a.passed);
        assert_eq!(a.instances, b.instances);
        assert_eq!(
            serde_json::to_value(&a.failures).unwrap(),
            serde_json::to_value(&b.failures).unwrap()
        );
    }
}
