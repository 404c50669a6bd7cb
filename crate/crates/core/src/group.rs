//! Permutation groups given by generators, backed by a stabilizer chain.
//!
//! The chain always uses the full ascending base `0, 1, .., n-1`. Levels whose
//! basic orbit is a single point cost nothing, and the fixed base order gives
//! two properties the rest of the crate leans on: equal groups have equal
//! chain shapes, and in the transversal product `g = u_0 ∘ u_1 ∘ … ∘ u_{n-1}`
//! the images of points `0..=i` are final once `u_0..u_i` are chosen. The
//! backtrack search in [`PermGroup::search_subgroup`] prunes on exactly that.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Default cap on explicit element enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

#[derive(Clone, Debug)]
struct Level {
    /// Indices into `strong` of generators fixing every earlier base point.
    gens: Vec<usize>,
    /// Basic orbit of this level's point, in discovery order.
    orbit: Vec<u32>,
    /// `transversal[x]` maps the level point to `x`.
    transversal: Vec<Option<Permutation>>,
}

/// A permutation group with a verified stabilizer chain.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    strong: Vec<Permutation>,
    levels: Vec<Level>,
    /// One past the deepest level with a nontrivial basic orbit.
    depth: usize,
    order: u128,
}

impl PermGroup {
    /// Builds the group generated by `gens` on `degree` points.
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument("degree must be positive".into()));
        }
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let mut group = PermGroup {
            degree,
            generators: Vec::new(),
            strong: Vec::new(),
            levels: Vec::new(),
            depth: 0,
            order: 1,
        };
        let mut kept = Vec::new();
        let mut seen = HashSet::new();
        for g in gens {
            if !g.is_identity() && seen.insert(g.clone()) {
                kept.push(g);
            }
        }
        group.generators = kept;
        group.strong = group.generators.clone();
        group.schreier_sims();
        Ok(group)
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, Vec::new()).expect("positive degree")
    }

    /// The full symmetric group.
    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree > 1 {
            gens.push(Permutation::from_fn(degree, |x| (x + 1) % degree).unwrap());
            gens.push(Permutation::from_cycles(degree, &[vec![0, 1]]).unwrap());
        }
        PermGroup::new(degree, gens).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    /// Group order, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Base points with nontrivial basic orbits.
    pub fn base(&self) -> Vec<usize> {
        (0..self.depth)
            .filter(|&i| self.levels[i].orbit.len() > 1)
            .collect()
    }

    /// Sizes of the basic orbits along the full ascending base.
    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    fn level_gens(&self, i: usize) -> Vec<usize> {
        (0..self.strong.len())
            .filter(|&s| (0..i).all(|p| self.strong[s].apply(p) == p))
            .collect()
    }

    fn rebuild_level(&mut self, i: usize) {
        let n = self.degree;
        let gens = self.level_gens(i);
        let mut transversal: Vec<Option<Permutation>> = vec![None; n];
        transversal[i] = Some(Permutation::identity(n));
        let mut orbit = vec![i as u32];
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head] as usize;
            head += 1;
            for &s in &gens {
                let y = self.strong[s].apply(x);
                if transversal[y].is_none() {
                    let u = self.strong[s].compose(transversal[x].as_ref().unwrap());
                    transversal[y] = Some(u);
                    orbit.push(y as u32);
                }
            }
        }
        self.levels[i] = Level {
            gens,
            orbit,
            transversal,
        };
    }

    /// Sifts `g` starting at level `from`; returns the residue and the level
    /// where sifting stopped (`degree` when it passed every level).
    fn strip(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for i in from..self.degree {
            let beta = h.apply(i);
            match &self.levels[i].transversal[beta] {
                Some(u) => {
                    if beta != i {
                        h = u.inverse().compose(&h);
                    }
                }
                None => return (h, i),
            }
        }
        (h, self.degree)
    }

    fn schreier_sims(&mut self) {
        let n = self.degree;
        self.levels = vec![
            Level {
                gens: Vec::new(),
                orbit: Vec::new(),
                transversal: Vec::new(),
            };
            n
        ];
        for i in 0..n {
            self.rebuild_level(i);
        }
        let mut i = n as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            let mut added = None;
            'scan: for oi in 0..self.levels[lvl].orbit.len() {
                let beta = self.levels[lvl].orbit[oi] as usize;
                for gi in 0..self.levels[lvl].gens.len() {
                    let s = &self.strong[self.levels[lvl].gens[gi]];
                    let u_beta = self.levels[lvl].transversal[beta].as_ref().unwrap();
                    let image = s.apply(beta);
                    let u_image = self.levels[lvl].transversal[image].as_ref().unwrap();
                    let schreier = u_image.inverse().compose(&s.compose(u_beta));
                    if schreier.is_identity() {
                        continue;
                    }
                    let (h, stop) = self.strip(&schreier, lvl + 1);
                    if !h.is_identity() {
                        added = Some((h, stop));
                        break 'scan;
                    }
                }
            }
            match added {
                Some((h, stop)) => {
                    self.strong.push(h);
                    for l in (lvl + 1)..=stop.min(n - 1) {
                        self.rebuild_level(l);
                    }
                    i = stop.min(n - 1) as isize;
                }
                None => i -= 1,
            }
        }
        self.depth = (0..n)
            .rev()
            .find(|&l| self.levels[l].orbit.len() > 1)
            .map_or(0, |l| l + 1);
        self.order = self
            .levels
            .iter()
            .fold(1u128, |acc, l| acc.saturating_mul(l.orbit.len() as u128));
    }

    /// Membership by sifting.
    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.strip(g, 0).0.is_identity()
    }

    /// Membership with an explicit degree check.
    pub fn try_contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: g.degree(),
            });
        }
        Ok(self.contains(g))
    }

    /// `self ≤ other` (same degree, every generator contained).
    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree
            && self.order <= other.order
            && other.order.is_multiple_of(self.order.max(1))
            && self.generators.iter().all(|g| other.contains(g))
    }

    /// Literal equality of the underlying permutation sets.
    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.order == other.order && self.is_subgroup_of(other)
    }

    /// Every element, when there are at most `cap` of them.
    pub fn elements(&self, cap: usize) -> Result<Vec<Permutation>> {
        if self.order > cap as u128 {
            return Err(Error::CapExceeded {
                what: "element enumeration",
                cap,
            });
        }
        let mut out = vec![Permutation::identity(self.degree)];
        for i in (0..self.depth).rev() {
            let level = &self.levels[i];
            if level.orbit.len() == 1 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &x in &level.orbit {
                let u = level.transversal[x as usize].as_ref().unwrap();
                for g in &out {
                    next.push(u.compose(g));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// A uniformly random element.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for i in 0..self.depth {
            let level = &self.levels[i];
            let x = level.orbit[rng.gen_range(0..level.orbit.len())] as usize;
            g = g.compose(level.transversal[x].as_ref().unwrap());
        }
        g
    }

    /// Orbit of a single point.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[x] = true;
        let mut orbit = vec![x];
        let mut head = 0;
        while head < orbit.len() {
            let y = orbit[head];
            head += 1;
            for g in &self.generators {
                let z = g.apply(y);
                if !seen[z] {
                    seen[z] = true;
                    orbit.push(z);
                }
            }
        }
        orbit.sort_unstable();
        orbit
    }

    /// Orbit partition, cells sorted internally and by least element.
    pub fn orbits(&self) -> OrbitPartition {
        orbits_of(self.degree, &self.generators)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 1 || self.orbit(0).len() == self.degree
    }

    /// Point stabilizer of `x`.
    pub fn stabilizer(&self, x: usize) -> PermGroup {
        self.search_subgroup(&|p, g| p != x || g.apply(x) == x, &|g| g.apply(x) == x)
    }

    /// `{g ∈ G : g(S) = S}`.
    pub fn setwise_stabilizer(&self, set: &[usize]) -> PermGroup {
        let mut member = vec![false; self.degree];
        for &x in set {
            member[x] = true;
        }
        self.search_subgroup(&|p, g| member[p] == member[g.apply(p)], &|g| {
            (0..self.degree).all(|p| member[p] == member[g.apply(p)])
        })
    }

    /// Elements mapping every point into the cell with the same label.
    pub fn labelled_partition_stabilizer(&self, labels: &[usize]) -> PermGroup {
        self.search_subgroup(&|p, g| labels[p] == labels[g.apply(p)], &|g| {
            (0..self.degree).all(|p| labels[p] == labels[g.apply(p)])
        })
    }

    /// Pointwise stabilizer of a point set.
    pub fn pointwise_stabilizer(&self, set: &[usize]) -> PermGroup {
        let mut member = vec![false; self.degree];
        for &x in set {
            member[x] = true;
        }
        self.search_subgroup(&|p, g| !member[p] || g.apply(p) == p, &|g| {
            set.iter().all(|&p| g.apply(p) == p)
        })
    }

    /// Backtrack search for the subgroup `{g ∈ G : accept(g)}`.
    ///
    /// `accept` must define a subgroup. `prune(p, g)` is called as soon as the
    /// images of points `0..=p` in the candidate `g` are final, and must return
    /// `false` only if no extension can be accepted.
    pub fn search_subgroup(
        &self,
        prune: &dyn Fn(usize, &Permutation) -> bool,
        accept: &dyn Fn(&Permutation) -> bool,
    ) -> PermGroup {
        let n = self.degree;
        let mut found: Vec<Permutation> = Vec::new();
        for i in (0..self.depth).rev() {
            let level = &self.levels[i];
            if level.orbit.len() == 1 {
                continue;
            }
            // Orbit of i under the part of the answer found so far (all fix 0..i-1).
            let mut reached = vec![false; n];
            let mut orbit = vec![i];
            reached[i] = true;
            let grow = |orbit: &mut Vec<usize>, reached: &mut Vec<bool>, gens: &[Permutation]| {
                let mut head = 0;
                while head < orbit.len() {
                    let y = orbit[head];
                    head += 1;
                    for g in gens {
                        let z = g.apply(y);
                        if !reached[z] {
                            reached[z] = true;
                            orbit.push(z);
                        }
                    }
                }
            };
            grow(&mut orbit, &mut reached, &found);
            let mut targets: Vec<usize> = level.orbit.iter().map(|&x| x as usize).collect();
            targets.sort_unstable();
            for beta in targets {
                if reached[beta] {
                    continue;
                }
                let u = level.transversal[beta].as_ref().unwrap();
                let mut ok = true;
                for p in 0..=i {
                    if !prune(p, u) {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                if let Some(g) = self.search_from(i + 1, u.clone(), prune, accept) {
                    found.push(g);
                    let (mut orb, mut rch) = (orbit.clone(), reached.clone());
                    grow(&mut orb, &mut rch, &found);
                    orbit = orb;
                    reached = rch;
                }
            }
        }
        PermGroup::new(n, found).expect("search results share the degree")
    }

    fn search_from(
        &self,
        level: usize,
        prefix: Permutation,
        prune: &dyn Fn(usize, &Permutation) -> bool,
        accept: &dyn Fn(&Permutation) -> bool,
    ) -> Option<Permutation> {
        if level >= self.depth {
            for p in level..self.degree {
                if !prune(p, &prefix) {
                    return None;
                }
            }
            return accept(&prefix).then_some(prefix);
        }
        let lvl = &self.levels[level];
        for &x in &lvl.orbit {
            let u = lvl.transversal[x as usize].as_ref().unwrap();
            let next = if x as usize == level {
                prefix.clone()
            } else {
                prefix.compose(u)
            };
            if !prune(level, &next) {
                continue;
            }
            if let Some(g) = self.search_from(level + 1, next, prune, accept) {
                return Some(g);
            }
        }
        None
    }

    /// Searches the whole group for one element satisfying `accept`, pruning as in
    /// [`PermGroup::search_subgroup`]. `accept` need not define a subgroup.
    pub fn find_element(
        &self,
        prune: &dyn Fn(usize, &Permutation) -> bool,
        accept: &dyn Fn(&Permutation) -> bool,
    ) -> Option<Permutation> {
        self.search_from(0, Permutation::identity(self.degree), prune, accept)
    }

    /// The subgroup generated by `self` and extra elements.
    pub fn join_with(&self, extra: &[Permutation]) -> Result<PermGroup> {
        let mut gens = self.generators.clone();
        gens.extend(extra.iter().filter(|g| !self.contains(g)).cloned());
        if gens.len() == self.generators.len() {
            return Ok(self.clone());
        }
        PermGroup::new(self.degree, gens)
    }

    /// Image of the group under conjugation by `g`: `g G g⁻¹`.
    pub fn conjugate_by(&self, g: &Permutation) -> PermGroup {
        PermGroup::new(
            self.degree,
            self.generators.iter().map(|h| h.conjugate_by(g)).collect(),
        )
        .unwrap()
    }

    /// Whether `self` is normalized by every generator of `other`.
    pub fn is_normalized_by(&self, other: &PermGroup) -> bool {
        other.generators.iter().all(|s| {
            self.generators
                .iter()
                .all(|x| self.contains(&x.conjugate_by(s)))
        })
    }
}

/// A partition of the points into orbits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbitPartition {
    pub cells: Vec<Vec<usize>>,
}

impl OrbitPartition {
    pub fn cell_of(&self, x: usize) -> usize {
        self.cells
            .iter()
            .position(|c| c.contains(&x))
            .expect("point in some cell")
    }
}

pub(crate) fn orbits_of(degree: usize, gens: &[Permutation]) -> OrbitPartition {
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        for x in 0..degree {
            let (a, b) = (find(&mut parent, x), find(&mut parent, g.apply(x)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; degree];
    for x in 0..degree {
        let r = find(&mut parent, x);
        if slot[r] == usize::MAX {
            slot[r] = cells.len();
            cells.push(Vec::new());
        }
        cells[slot[r]].push(x);
    }
    OrbitPartition { cells }
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_group(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse(s, n).unwrap()
    }

    fn closure_count(n: usize, gens: &[Permutation]) -> usize {
        let mut seen: HashSet<Permutation> = HashSet::new();
        let id = Permutation::identity(n);
        seen.insert(id.clone());
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for g in gens {
                let y = g.compose(&x);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn orders_match_closure_enumeration() {
        let tau = Permutation::from_fn(9, |x| (x + 1) % 9).unwrap();
        let four = Permutation::from_fn(9, |x| 4 * x % 9).unwrap();
        let cases = vec![
            (9, vec![tau.clone()]),
            (9, vec![tau.clone(), four.clone()]),
            (5, vec![p("(0 1 2 3 4)", 5), p("(0 1)", 5)]),
            (
                6,
                vec![p("(0 1 2)", 6), p("(3 4)", 6), p("(0 3)(1 4)(2 5)", 6)],
            ),
            (7, vec![p("(0 1 2 3 4 5 6)", 7), p("(1 2 4)(3 6 5)", 7)]),
        ];
        for (n, gens) in cases {
            let g = PermGroup::new(n, gens.clone()).unwrap();
            assert_eq!(g.order(), closure_count(n, &gens) as u128);
        }
        assert_eq!(PermGroup::new(9, vec![tau, four]).unwrap().order(), 27);
        assert_eq!(PermGroup::trivial(3).order(), 1);
        assert_eq!(PermGroup::symmetric(6).order(), 720);
    }

    #[test]
    fn rejects_degree_mismatch() {
        assert_eq!(
            PermGroup::new(4, vec![p("(0 1)", 3)]).unwrap_err(),
            Error::DegreeMismatch {
                expected: 4,
                found: 3
            }
        );
    }

    #[test]
    fn membership() {
        let c3 = PermGroup::new(3, vec![p("(0 1 2)", 3)]).unwrap();
        assert!(c3.contains(&Permutation::identity(3)));
        assert!(!c3.contains(&p("(0 1)", 3)));
        let tau = Permutation::from_fn(9, |x| (x + 1) % 9).unwrap();
        let four = Permutation::from_fn(9, |x| 4 * x % 9).unwrap();
        let seven = Permutation::from_fn(9, |x| 7 * x % 9).unwrap();
        let g = PermGroup::new(9, vec![tau, four]).unwrap();
        assert!(g.contains(&seven));
        assert!(!g.contains(&Permutation::from_fn(9, |x| 2 * x % 9).unwrap()));
        assert!(c3.try_contains(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn enumeration_agrees_with_membership() {
        let g = PermGroup::new(5, vec![p("(0 1 2 3 4)", 5), p("(1 4)(2 3)", 5)]).unwrap();
        let elems = g.elements(100).unwrap();
        assert_eq!(elems.len(), 10);
        assert!(elems.iter().all(|e| g.contains(e)));
        let unique: HashSet<_> = elems.iter().cloned().collect();
        assert_eq!(unique.len(), 10);
        assert!(PermGroup::symmetric(7).elements(100).is_err());
    }

    #[test]
    fn orbit_partitions() {
        let g = PermGroup::new(4, vec![p("(0 1)(2 3)", 4)]).unwrap();
        assert_eq!(g.orbits().cells, vec![vec![0, 1], vec![2, 3]]);
        let g = PermGroup::new(5, vec![p("(0 1 2)", 5)]).unwrap();
        assert_eq!(g.orbits().cells, vec![vec![0, 1, 2], vec![3], vec![4]]);
    }

    #[test]
    fn searches() {
        let s3 = PermGroup::symmetric(3);
        let st = s3.setwise_stabilizer(&[0, 1]);
        assert_eq!(st.order(), 2);
        assert!(st.contains(&p("(0 1)", 3)));
        let tau = Permutation::from_fn(9, |x| (x + 1) % 9).unwrap();
        let c9 = PermGroup::new(9, vec![tau.clone()]).unwrap();
        let st = c9.setwise_stabilizer(&[0, 3, 6]);
        assert_eq!(st.order(), 3);
        assert!(st.contains(&tau.pow(3)));
        assert!(c9
            .setwise_stabilizer(&(0..9).collect::<Vec<_>>())
            .same_group(&c9));
        let s5 = PermGroup::symmetric(5);
        assert_eq!(s5.stabilizer(2).order(), 24);
        assert_eq!(s5.pointwise_stabilizer(&[0, 4]).order(), 6);
    }

    #[test]
    fn search_matches_filter() {
        let g = PermGroup::new(
            8,
            vec![
                p("(0 1 2 3 4 5 6 7)", 8),
                p("(1 7)(2 6)(3 5)", 8),
                p("(0 4)", 8),
            ],
        )
        .unwrap();
        let elems = g.elements(100_000).unwrap();
        let set = [0usize, 2, 5];
        let expected = elems
            .iter()
            .filter(|e| e.maps_set_onto_itself(&set))
            .count();
        assert_eq!(g.setwise_stabilizer(&set).order(), expected as u128);
    }
}
