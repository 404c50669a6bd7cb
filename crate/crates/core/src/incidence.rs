//! Coloured tuple and set systems and their automorphism groups.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;

/// Largest ground set `aut_group` accepts.
pub const MAX_AUT_POINTS: usize = 30;
/// Largest set size `set_to_tuple` expands.
pub const MAX_EXPANSION_SIZE: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColoredTuple {
    #[serde(rename = "t")]
    pub tuple: Vec<usize>,
    #[serde(rename = "c")]
    pub color: u32,
}

/// Tuples on `0..points`, each with a colour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTuples")]
pub struct ColoredTupleSystem {
    points: usize,
    tuples: Vec<ColoredTuple>,
}

#[derive(Deserialize)]
struct RawTuples {
    points: usize,
    tuples: Vec<ColoredTuple>,
}

impl TryFrom<RawTuples> for ColoredTupleSystem {
    type Error = Error;

    fn try_from(raw: RawTuples) -> Result<Self> {
        ColoredTupleSystem::new(raw.points, raw.tuples)
    }
}

impl ColoredTupleSystem {
    /// Tuples must be nonempty, shorter than `points`, in range and pairwise distinct.
    pub fn new(points: usize, tuples: Vec<ColoredTuple>) -> Result<Self> {
        let mut seen = HashSet::new();
        for t in &tuples {
            if t.tuple.is_empty() || t.tuple.len() >= points {
                return Err(Error::InvalidTupleSystem(format!(
                    "tuple length {} must lie in 1..{points}",
                    t.tuple.len()
                )));
            }
            if let Some(&x) = t.tuple.iter().find(|&&x| x >= points) {
                return Err(Error::InvalidTupleSystem(format!("point {x} out of range")));
            }
            if !seen.insert(t) {
                return Err(Error::InvalidTupleSystem(format!(
                    "duplicate tuple {:?} colour {}",
                    t.tuple, t.color
                )));
            }
        }
        Ok(ColoredTupleSystem { points, tuples })
    }

    /// Like [`ColoredTupleSystem::new`] with duplicates dropped.
    pub fn deduplicated(points: usize, tuples: Vec<ColoredTuple>) -> Result<Self> {
        let unique: BTreeSet<ColoredTuple> = tuples.into_iter().collect();
        Self::new(points, unique.into_iter().collect())
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn tuples(&self) -> &[ColoredTuple] {
        &self.tuples
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColoredSet {
    #[serde(rename = "s")]
    pub set: Vec<usize>,
    #[serde(rename = "c")]
    pub color: u32,
}

/// Sets on `0..points`, each with a colour; stored sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetSystem {
    points: usize,
    sets: Vec<ColoredSet>,
}

impl SetSystem {
    /// Sets must be nonempty, smaller than the ground set and in range.
    pub fn new(points: usize, sets: Vec<ColoredSet>) -> Result<Self> {
        let mut unique = BTreeSet::new();
        for s in sets {
            let members: BTreeSet<usize> = s.set.iter().copied().collect();
            if members.is_empty() || members.len() >= points {
                return Err(Error::InvalidTupleSystem(format!(
                    "set size {} must lie in 1..{points}",
                    members.len()
                )));
            }
            if let Some(&x) = members.iter().find(|&&x| x >= points) {
                return Err(Error::InvalidTupleSystem(format!("point {x} out of range")));
            }
            unique.insert(ColoredSet {
                set: members.into_iter().collect(),
                color: s.color,
            });
        }
        Ok(SetSystem {
            points,
            sets: unique.into_iter().collect(),
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn sets(&self) -> &[ColoredSet] {
        &self.sets
    }
}

pub fn underlying_set_system(system: &ColoredTupleSystem) -> SetSystem {
    let sets = system
        .tuples
        .iter()
        .map(|t| ColoredSet {
            set: t.tuple.clone(),
            color: t.color,
        })
        .collect();
    SetSystem::new(system.points, sets).expect("coordinate sets of valid tuples are valid")
}

/// Distinct member sets meet in at most `m` points; colours are ignored.
pub fn is_m_intersecting(system: &SetSystem, m: usize) -> bool {
    let distinct: Vec<&Vec<usize>> = system
        .sets
        .iter()
        .map(|s| &s.set)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    distinct.iter().enumerate().all(|(i, a)| {
        distinct[i + 1..]
            .iter()
            .all(|b| a.iter().filter(|x| b.binary_search(x).is_ok()).count() <= m)
    })
}

/// Every ordering of every set, coloured as the set.
pub fn set_to_tuple(system: &SetSystem) -> Result<ColoredTupleSystem> {
    let mut tuples = Vec::new();
    for s in &system.sets {
        if s.set.len() > MAX_EXPANSION_SIZE {
            return Err(Error::CapExceeded {
                what: "set size for tuple expansion",
                cap: MAX_EXPANSION_SIZE,
            });
        }
        let mut order = s.set.clone();
        permutations(&mut order, 0, &mut |t| {
            tuples.push(ColoredTuple {
                tuple: t.to_vec(),
                color: s.color,
            })
        });
    }
    ColoredTupleSystem::deduplicated(system.points, tuples)
}

fn permutations(items: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Colour-preserving permutations of the ground set that map the system onto itself.
pub fn aut_group(system: &ColoredTupleSystem) -> Result<PermGroup> {
    let items: Vec<(Vec<usize>, u32)> = system
        .tuples
        .iter()
        .map(|t| (t.tuple.clone(), t.color))
        .collect();
    automorphisms(system.points, &items, false)
}

/// Automorphism group of a set system, computed on the sets themselves.
pub fn set_aut_group(system: &SetSystem) -> Result<PermGroup> {
    let items: Vec<(Vec<usize>, u32)> = system
        .sets
        .iter()
        .map(|s| (s.set.clone(), s.color))
        .collect();
    automorphisms(system.points, &items, true)
}

fn image_of(g: &Permutation, item: &[usize], unordered: bool) -> Vec<usize> {
    let mut image: Vec<usize> = item.iter().map(|&x| g.apply(x)).collect();
    if unordered {
        image.sort_unstable();
    }
    image
}

fn automorphisms(points: usize, items: &[(Vec<usize>, u32)], unordered: bool) -> Result<PermGroup> {
    if points > MAX_AUT_POINTS {
        return Err(Error::DegreeTooLarge {
            degree: points,
            limit: MAX_AUT_POINTS,
        });
    }
    let present: HashSet<(Vec<usize>, u32)> = items.iter().cloned().collect();
    let labels = refined_labels(points, items, unordered);
    // Items become checkable once their largest point has its image fixed.
    let mut completed_at: Vec<Vec<usize>> = vec![Vec::new(); points];
    for (idx, (item, _)) in items.iter().enumerate() {
        completed_at[*item.iter().max().expect("items are nonempty")].push(idx);
    }
    let maps_item = |g: &Permutation, idx: usize| {
        let (item, color) = &items[idx];
        present.contains(&(image_of(g, item, unordered), *color))
    };
    let prune = |p: usize, g: &Permutation| {
        labels[p] == labels[g.apply(p)] && completed_at[p].iter().all(|&idx| maps_item(g, idx))
    };
    let accept = |g: &Permutation| (0..items.len()).all(|idx| maps_item(g, idx));
    Ok(PermGroup::symmetric(points).search_subgroup(&prune, &accept))
}

/// Point labels that every automorphism preserves, from iterated refinement
/// on (colour, position, labels of the other coordinates).
/// A point label with the sorted (colour, position, context) of its items.
type Signature = (usize, Vec<(u32, usize, Vec<usize>)>);

fn refined_labels(points: usize, items: &[(Vec<usize>, u32)], unordered: bool) -> Vec<usize> {
    let mut labels = vec![0usize; points];
    let mut classes = 1;
    loop {
        let mut signatures: Vec<Signature> = (0..points).map(|x| (labels[x], Vec::new())).collect();
        for (item, color) in items {
            let context: Vec<usize> = item.iter().map(|&y| labels[y]).collect();
            for (pos, &x) in item.iter().enumerate() {
                let mut ctx = context.clone();
                if unordered {
                    ctx.sort_unstable();
                }
                signatures[x]
                    .1
                    .push((*color, if unordered { 0 } else { pos }, ctx));
            }
        }
        for s in &mut signatures {
            s.1.sort_unstable();
        }
        let mut ids: HashMap<&Signature, usize> = HashMap::new();
        let mut sorted: Vec<&Signature> = signatures.iter().collect();
        sorted.sort();
        for s in sorted {
            let next = ids.len();
            ids.entry(s).or_insert(next);
        }
        let fresh: Vec<usize> = signatures.iter().map(|s| ids[s]).collect();
        let count = ids.len();
        labels = fresh;
        if count == classes {
            return labels;
        }
        classes = count;
    }
}

/// Arcs `(i, i + s mod n)` for each residue `s`, coloured per class.
pub fn circulant(n: usize, connection: &[(Vec<i64>, u32)]) -> Result<ColoredTupleSystem> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "circulant needs at least one point".into(),
        ));
    }
    let mut tuples = Vec::new();
    for (residues, color) in connection {
        for &s in residues {
            let r = s.rem_euclid(n as i64) as usize;
            if r == 0 {
                return Err(Error::ZeroResidue(s));
            }
            tuples.extend((0..n).map(|i| ColoredTuple {
                tuple: vec![i, (i + r) % n],
                color: *color,
            }));
        }
    }
    ColoredTupleSystem::deduplicated(n, tuples)
}

pub fn point_transitive(system: &ColoredTupleSystem) -> Result<bool> {
    Ok(aut_group(system)?.is_transitive())
}

/// The lines `{i, i+1, i+3}` of the Fano plane on `Z_7`.
pub fn fano_plane() -> SetSystem {
    let sets = (0..7)
        .map(|i| ColoredSet {
            set: vec![i, (i + 1) % 7, (i + 3) % 7],
            color: 0,
        })
        .collect();
    SetSystem::new(7, sets).expect("Fano lines are valid")
}

/// Greedy random 1-intersecting set system: random sets of size
/// `2..=max_size` are kept when they meet every kept set in at most one point.
/// Not a uniform sampler.
pub fn random_one_intersecting<R: Rng + ?Sized>(
    points: usize,
    max_size: usize,
    attempts: usize,
    colors: u32,
    rng: &mut R,
) -> Result<SetSystem> {
    if points < 3 || max_size < 2 {
        return Err(Error::InvalidArgument(
            "need at least 3 points and sets of size 2".into(),
        ));
    }
    let max_size = max_size.min(points - 1);
    let mut kept: Vec<ColoredSet> = Vec::new();
    for _ in 0..attempts {
        let size = rng.gen_range(2..=max_size);
        let set: Vec<usize> = rand::seq::index::sample(rng, points, size)
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if kept.iter().all(|k| {
            k.set
                .iter()
                .filter(|x| set.binary_search(x).is_ok())
                .count()
                <= 1
        }) {
            kept.push(ColoredSet {
                set,
                color: rng.gen_range(0..colors.max(1)),
            });
        }
    }
    SetSystem::new(points, kept)
}

/// The union of the orbits of `seeds` under `group`, seed `i` coloured `i`.
pub fn orbit_set_system(group: &PermGroup, seeds: &[Vec<usize>]) -> Result<SetSystem> {
    let elements = group.elements(crate::group::DEFAULT_ENUMERATION_CAP)?;
    let mut sets = Vec::new();
    for (color, seed) in seeds.iter().enumerate() {
        for g in &elements {
            sets.push(ColoredSet {
                set: seed.iter().map(|&x| g.apply(x)).collect(),
                color: color as u32,
            });
        }
    }
    SetSystem::new(group.degree(), sets)
}
