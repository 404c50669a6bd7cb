//! Constituents, regular representations, normal closures and action flags.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{PermGroup, DEFAULT_ENUMERATION_CAP};
use crate::perm::Permutation;

/// The action of a group on a union of its orbits, relabelled to `0..len`.
#[derive(Clone, Debug)]
pub struct Constituent {
    pub group: PermGroup,
    /// `points[i]` is the original point relabelled as `i` (increasing).
    pub points: Vec<usize>,
}

/// Transitive constituent of `group` on `set`, which must be a union of orbits.
pub fn constituent(group: &PermGroup, set: &[usize]) -> Result<Constituent> {
    let mut points = set.to_vec();
    points.sort_unstable();
    points.dedup();
    if points.is_empty() || points.iter().any(|&x| x >= group.degree()) {
        return Err(Error::NotUnionOfOrbits);
    }
    let mut label = vec![usize::MAX; group.degree()];
    for (i, &x) in points.iter().enumerate() {
        label[x] = i;
    }
    let mut gens = Vec::new();
    for g in group.generators() {
        let mut images = Vec::with_capacity(points.len());
        for &x in &points {
            let y = label[g.apply(x)];
            if y == usize::MAX {
                return Err(Error::NotUnionOfOrbits);
            }
            images.push(y);
        }
        gens.push(Permutation::from_images(images)?);
    }
    Ok(Constituent {
        group: PermGroup::new(points.len(), gens)?,
        points,
    })
}

/// Restriction of a permutation to a setwise-fixed point set.
pub fn restrict(g: &Permutation, set: &[usize]) -> Result<Permutation> {
    g.restrict(set)
}

/// The translation `i ↦ i + 1 (mod m)`.
pub fn translation(m: usize) -> Permutation {
    Permutation::from_fn(m, |i| (i + 1) % m).expect("translation is a bijection")
}

/// `⟨i ↦ i + 1 mod m⟩`, regular cyclic of order `m`.
pub fn cyclic_regular(m: usize) -> Result<PermGroup> {
    if m == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    PermGroup::new(m, vec![translation(m)])
}

/// Left regular representation `g ↦ (x ↦ gx)` of a group given by its
/// multiplication table, `table[a][b] = a·b`.
pub fn regular_rep(table: &[Vec<usize>]) -> Result<PermGroup> {
    let m = table.len();
    let bad = |msg: &str| Error::InvalidGroupTable(msg.to_string());
    if m == 0 {
        return Err(bad("empty table"));
    }
    if table
        .iter()
        .any(|row| row.len() != m || row.iter().any(|&x| x >= m))
    {
        return Err(bad("table is not square over 0..m"));
    }
    let identity = (0..m)
        .find(|&e| (0..m).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| bad("no identity element"))?;
    for (a, row) in table.iter().enumerate() {
        if !(0..m).any(|b| row[b] == identity && table[b][a] == identity) {
            return Err(bad(&format!("element {a} has no inverse")));
        }
    }
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(bad(&format!("associativity fails at ({a}, {b}, {c})")));
                }
            }
        }
    }
    let mut group = PermGroup::trivial(m);
    for row in table {
        let left =
            Permutation::from_images(row.clone()).map_err(|_| bad("row is not a permutation"))?;
        if !group.contains(&left) {
            group = group.join_with(&[left])?;
        }
    }
    Ok(group)
}

/// Smallest normal subgroup of `group` containing `g`.
pub fn normal_closure(group: &PermGroup, g: &Permutation) -> Result<PermGroup> {
    if !group.try_contains(g)? {
        return Err(Error::NotMember);
    }
    normal_closure_of(group, std::slice::from_ref(g))
}

pub(crate) fn normal_closure_of(group: &PermGroup, elems: &[Permutation]) -> Result<PermGroup> {
    let mut closure = PermGroup::new(group.degree(), elems.to_vec())?;
    loop {
        let mut extra = Vec::new();
        for s in group.generators() {
            for x in closure.generators() {
                let y = x.conjugate_by(s);
                if !closure.contains(&y) && !extra.contains(&y) {
                    extra.push(y);
                }
            }
        }
        if extra.is_empty() {
            return Ok(closure);
        }
        closure = closure.join_with(&extra)?;
    }
}

/// Transitivity, semiregularity, regularity and quasiprimitivity flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ActionProperties {
    pub transitive: bool,
    pub semiregular: bool,
    pub regular: bool,
    pub quasiprimitive: bool,
}

pub fn action_properties(group: &PermGroup) -> Result<ActionProperties> {
    action_properties_capped(group, DEFAULT_ENUMERATION_CAP)
}

pub fn action_properties_capped(group: &PermGroup, cap: usize) -> Result<ActionProperties> {
    let transitive = group.is_transitive();
    let semiregular = group
        .orbits()
        .cells
        .iter()
        .all(|cell| cell.len() as u128 == group.order());
    let quasiprimitive = transitive && is_quasiprimitive(group, cap)?;
    Ok(ActionProperties {
        transitive,
        semiregular,
        regular: transitive && semiregular,
        quasiprimitive,
    })
}

/// Every minimal normal subgroup is the normal closure of an element of prime
/// order, so checking one element per conjugacy class of prime-order elements
/// decides quasiprimitivity.
fn is_quasiprimitive(group: &PermGroup, cap: usize) -> Result<bool> {
    if group.is_trivial() {
        return Ok(group.degree() == 1);
    }
    let elements = group.elements(cap)?;
    let mut visited: HashSet<Permutation> = HashSet::new();
    for x in &elements {
        if x.is_identity() || visited.contains(x) || !is_prime(x.order()) {
            continue;
        }
        let mut queue = vec![x.clone()];
        visited.insert(x.clone());
        while let Some(y) = queue.pop() {
            for s in group.generators() {
                let z = y.conjugate_by(s);
                if visited.insert(z.clone()) {
                    queue.push(z);
                }
            }
        }
        if !normal_closure_of(group, std::slice::from_ref(x))?.is_transitive() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Default node budget for [`permutation_isomorphism`].
pub const DEFAULT_ISOMORPHISM_NODE_CAP: usize = 2_000_000;

/// Finds `σ` with `σ G σ⁻¹ = H`, or `None` when the two groups are not
/// permutation isomorphic.
///
/// Both groups must be transitive. Since `H` is transitive, `σ(0) = 0` can
/// be assumed. Points are assigned in order and every partial map must send
/// orbitals of `G` to orbitals of `H` through one consistent bijection; full
/// maps are checked exactly. Fails with `CapExceeded` past `node_cap` nodes.
pub fn permutation_isomorphism(
    g: &PermGroup,
    h: &PermGroup,
    node_cap: usize,
) -> Result<Option<Permutation>> {
    let n = g.degree();
    if n != h.degree() {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: h.degree(),
        });
    }
    if !g.is_transitive() || !h.is_transitive() {
        return Err(Error::NotTransitive);
    }
    if g.order() != h.order() {
        return Ok(None);
    }
    if g.same_group(h) {
        return Ok(Some(Permutation::identity(n)));
    }
    let lg = tuple_orbit_labels(g, 2);
    let lh = tuple_orbit_labels(h, 2);
    let count = |l: &[u32]| l.iter().max().map_or(0, |&m| m as usize + 1);
    let colours = count(&lg);
    if colours != count(&lh) {
        return Ok(None);
    }
    let sizes = |l: &[u32]| {
        let mut s = vec![0usize; colours];
        for &c in l {
            s[c as usize] += 1;
        }
        s.sort_unstable();
        s
    };
    if sizes(&lg) != sizes(&lh) {
        return Ok(None);
    }
    let mut state = IsoSearch {
        n,
        lg,
        lh,
        g,
        h,
        image: vec![usize::MAX; n],
        used: vec![false; n],
        fwd: vec![u32::MAX; colours],
        back: vec![u32::MAX; colours],
        nodes: 0,
        cap: node_cap,
    };
    state.image[0] = 0;
    state.used[0] = true;
    if !state.bind(0, 0) {
        return Ok(None);
    }
    state.extend(1)
}

struct IsoSearch<'a> {
    n: usize,
    lg: Vec<u32>,
    lh: Vec<u32>,
    g: &'a PermGroup,
    h: &'a PermGroup,
    image: Vec<usize>,
    used: Vec<bool>,
    fwd: Vec<u32>,
    back: Vec<u32>,
    nodes: usize,
    cap: usize,
}

impl IsoSearch<'_> {
    /// Records colour correspondences for pairs among assigned points and
    /// `x`; returns false on a clash. Leaves partial bindings on failure,
    /// callers snapshot and restore.
    fn bind(&mut self, x: usize, y: usize) -> bool {
        let n = self.n;
        let mut pairs = vec![(x, y, x, y)];
        for a in 0..x {
            let b = self.image[a];
            pairs.push((a, b, x, y));
            pairs.push((x, y, a, b));
        }
        for (a, b, c, d) in pairs {
            let cg = self.lg[a * n + c] as usize;
            let ch = self.lh[b * n + d] as usize;
            if self.fwd[cg] == u32::MAX && self.back[ch] == u32::MAX {
                self.fwd[cg] = ch as u32;
                self.back[ch] = cg as u32;
            } else if self.fwd[cg] != ch as u32 || self.back[ch] != cg as u32 {
                return false;
            }
        }
        true
    }

    fn extend(&mut self, x: usize) -> Result<Option<Permutation>> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::CapExceeded {
                what: "permutation isomorphism search nodes",
                cap: self.cap,
            });
        }
        if x == self.n {
            let sigma =
                Permutation::from_images_unchecked(self.image.iter().map(|&y| y as u32).collect());
            let ok = self
                .g
                .generators()
                .iter()
                .all(|s| self.h.contains(&s.conjugate_by(&sigma)));
            return Ok(ok.then_some(sigma));
        }
        for y in 0..self.n {
            if self.used[y] {
                continue;
            }
            let (fwd, back) = (self.fwd.clone(), self.back.clone());
            if self.bind(x, y) {
                self.image[x] = y;
                self.used[y] = true;
                if let Some(s) = self.extend(x + 1)? {
                    return Ok(Some(s));
                }
                self.used[y] = false;
                self.image[x] = usize::MAX;
            }
            self.fwd = fwd;
            self.back = back;
        }
        Ok(None)
    }
}

/// Orbit labels of `group` on `k`-tuples, tuples indexed in base `n`.
pub(crate) fn tuple_orbit_labels(group: &PermGroup, k: usize) -> Vec<u32> {
    let n = group.degree();
    let total = n.pow(k as u32);
    let mut label = vec![u32::MAX; total];
    let mut next = 0u32;
    let mut digits = vec![0usize; k];
    for start in 0..total {
        if label[start] != u32::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            let mut rest = t;
            for d in digits.iter_mut().rev() {
                *d = rest % n;
                rest /= n;
            }
            for g in group.generators() {
                let image = digits.iter().fold(0, |acc, &d| acc * n + g.apply(d));
                if label[image] == u32::MAX {
                    label[image] = next;
                    stack.push(image);
                }
            }
        }
        next += 1;
    }
    label
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse(s, n).unwrap()
    }

    fn cyclic_table(m: usize) -> Vec<Vec<usize>> {
        (0..m)
            .map(|a| (0..m).map(|b| (a + b) % m).collect())
            .collect()
    }

    #[test]
    fn constituents() {
        let g = PermGroup::new(5, vec![p("(0 1)(2 3 4)", 5)]).unwrap();
        let c = constituent(&g, &[2, 3, 4]).unwrap();
        assert_eq!(c.group.order(), 3);
        assert_eq!(c.points, vec![2, 3, 4]);
        assert!(c.group.contains(&p("(0 1 2)", 3)));
        let g = PermGroup::new(4, vec![p("(0 1)(2 3)", 4)]).unwrap();
        assert_eq!(constituent(&g, &[0, 1]).unwrap().group.order(), 2);
        assert!(matches!(
            constituent(&g, &[0, 2]),
            Err(Error::NotUnionOfOrbits)
        ));
        let g = PermGroup::new(
            9,
            vec![
                translation(9),
                Permutation::from_fn(9, |x| 4 * x % 9).unwrap(),
            ],
        )
        .unwrap();
        let c = constituent(&g, &(0..9).collect::<Vec<_>>()).unwrap();
        assert!(c.group.same_group(&g));
    }

    #[test]
    fn cyclic_regular_groups() {
        let c9 = cyclic_regular(9).unwrap();
        let props = action_properties(&c9).unwrap();
        assert!(props.transitive && props.semiregular && props.regular);
        assert_eq!(c9.order(), 9);
        assert_eq!(cyclic_regular(1).unwrap().order(), 1);
        assert_eq!(cyclic_regular(27).unwrap().order(), 27);
    }

    #[test]
    fn regular_representations() {
        let z3 = regular_rep(&cyclic_table(3)).unwrap();
        assert!(z3.same_group(&PermGroup::new(3, vec![p("(0 1 2)", 3)]).unwrap()));
        // Z3 x Z3 encoded as a + 3b
        let table: Vec<Vec<usize>> = (0..9)
            .map(|x| {
                (0..9)
                    .map(|y| (x % 3 + y % 3) % 3 + 3 * ((x / 3 + y / 3) % 3))
                    .collect()
            })
            .collect();
        let z33 = regular_rep(&table).unwrap();
        assert_eq!(z33.order(), 9);
        assert!(action_properties(&z33).unwrap().regular);
        assert!(z33.generators().iter().all(|g| g.order() <= 3));
        // S3 as permutations of 3 points, indexed by enumeration order
        let s3 = PermGroup::symmetric(3).elements(10).unwrap();
        let idx = |g: &Permutation| s3.iter().position(|h| h == g).unwrap();
        let table: Vec<Vec<usize>> = s3
            .iter()
            .map(|a| s3.iter().map(|b| idx(&a.compose(b))).collect())
            .collect();
        let reg = regular_rep(&table).unwrap();
        assert_eq!((reg.degree(), reg.order()), (6, 6));
        assert!(reg.stabilizer(0).is_trivial());
    }

    #[test]
    fn bad_tables() {
        assert!(regular_rep(&[vec![0, 1], vec![0, 1]]).is_err());
        assert!(regular_rep(&[vec![0, 1], vec![1, 1]]).is_err());
        // a Latin square without associativity
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(regular_rep(&t), Err(Error::InvalidGroupTable(_))));
    }

    #[test]
    fn cyclic_quasiprimitivity() {
        // Z9 has the intransitive normal subgroup <τ^3>.
        let props = action_properties(&cyclic_regular(9).unwrap()).unwrap();
        assert_eq!(
            props,
            ActionProperties {
                transitive: true,
                semiregular: true,
                regular: true,
                quasiprimitive: false
            }
        );
        let a5 = PermGroup::new(5, vec![p("(0 1 2 3 4)", 5), p("(0 1 2)", 5)]).unwrap();
        assert_eq!(a5.order(), 60);
        assert!(action_properties(&a5).unwrap().quasiprimitive);
        let t = PermGroup::new(3, vec![p("(0 1)", 3)]).unwrap();
        assert!(!action_properties(&t).unwrap().transitive);
        assert!(
            action_properties(&cyclic_regular(7).unwrap())
                .unwrap()
                .quasiprimitive
        );
    }

    #[test]
    fn isomorphism_search() {
        let c4 = cyclic_regular(4).unwrap();
        let v4 = PermGroup::new(4, vec![p("(0 1)(2 3)", 4), p("(0 2)(1 3)", 4)]).unwrap();
        assert_eq!(permutation_isomorphism(&c4, &v4, 1000).unwrap(), None);
        let other = PermGroup::new(4, vec![p("(0 2 1 3)", 4)]).unwrap();
        let s = permutation_isomorphism(&c4, &other, 1000).unwrap().unwrap();
        assert!(c4.conjugate_by(&s).same_group(&other));
        // a relabelled D4 is found again
        let d4 = PermGroup::new(
            8,
            vec![
                translation(8),
                Permutation::from_fn(8, |x| 7 * x % 8).unwrap(),
            ],
        )
        .unwrap();
        let sigma = p("(1 5 2)(3 7)", 8);
        let moved = d4.conjugate_by(&sigma);
        let s = permutation_isomorphism(&d4, &moved, 100_000)
            .unwrap()
            .unwrap();
        assert!(d4.conjugate_by(&s).same_group(&moved));
        let z8 = cyclic_regular(8).unwrap();
        let z2z4 = PermGroup::new(
            8,
            vec![p("(0 1 2 3)(4 5 6 7)", 8), p("(0 4)(1 5)(2 6)(3 7)", 8)],
        )
        .unwrap();
        assert_eq!(permutation_isomorphism(&z8, &z2z4, 100_000).unwrap(), None);
    }

    #[test]
    fn normal_closures() {
        let s3 = PermGroup::symmetric(3);
        let a3 = normal_closure(&s3, &p("(0 1 2)", 3)).unwrap();
        assert_eq!(a3.order(), 3);
        let c9 = cyclic_regular(9).unwrap();
        let g = translation(9).pow(3);
        assert_eq!(normal_closure(&c9, &g).unwrap().order(), 3);
        let big = PermGroup::new(
            9,
            vec![
                translation(9),
                Permutation::from_fn(9, |x| 4 * x % 9).unwrap(),
            ],
        )
        .unwrap();
        let n = normal_closure(&big, &g).unwrap();
        assert_eq!(n.order(), 3);
        assert!(n.is_normalized_by(&big));
        assert_eq!(normal_closure(&s3, &p("(0 1)", 3)).unwrap().order(), 6);
        assert!(matches!(
            normal_closure(&c9, &Permutation::from_fn(9, |x| 2 * x % 9).unwrap()),
            Err(Error::NotMember)
        ));
    }
}
