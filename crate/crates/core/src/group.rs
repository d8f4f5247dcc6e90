//! Permutation groups at desk scale: orbits, blocks, element closure,
//! derived series and minimal normal subgroups.
//!
//! Everything is exhaustive. Group elements are enumerated by breadth-first
//! closure and capped; no stabilizer chains.

use std::sync::OnceLock;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::perm::{PermError, Permutation, MAX_DEGREE};

/// Default ceiling on the number of enumerated group elements.
pub const DEFAULT_ELEMENT_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group has more than {cap} elements")]
    CapExceeded { cap: usize },
    #[error("a group needs at least one generator")]
    NoGenerators,
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A subgroup of `S_d` given by generators.
///
/// The element set is computed on first request and cached; the generators
/// never change after construction.
#[derive(Debug, Clone)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: OnceLock<Vec<Permutation>>,
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                }
                .into());
            }
        }
        Ok(PermutationGroup {
            degree,
            generators,
            elements: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Result<Self, GroupError> {
        Self::new(degree, vec![Permutation::identity(degree)?])
    }

    /// Wraps a known closed, sorted element set.
    fn with_elements(degree: usize, generators: Vec<Permutation>, elements: Vec<Permutation>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        let generators = if generators.is_empty() {
            vec![Permutation::identity_unchecked(degree)]
        } else {
            generators
        };
        PermutationGroup {
            degree,
            generators,
            elements: OnceLock::from(elements),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Orbit partition of `{0, .., d-1}`; parts sorted, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.degree);
        for g in &self.generators {
            for x in 0..self.degree {
                uf.union(x, g.apply(x));
            }
        }
        uf.classes()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    /// The finest block system in which `0` and `point` share a block.
    pub fn minimal_block_system(&self, point: usize) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.degree);
        uf.merge_closed(&self.generators, 0, point);
        uf.classes()
    }

    /// Transitive with no nontrivial block system. Intransitive groups and
    /// degree 1 give `false`.
    pub fn is_primitive(&self) -> bool {
        primitive_on(&self.generators, self.degree)
    }

    /// All elements, sorted by image sequence.
    pub fn elements(&self, cap: usize) -> Result<&[Permutation], GroupError> {
        if let Some(e) = self.elements.get() {
            return Ok(e);
        }
        let elements = closure(&self.generators, self.degree, cap)?;
        Ok(self.elements.get_or_init(|| elements))
    }

    pub fn order(&self, cap: usize) -> Result<usize, GroupError> {
        Ok(self.elements(cap)?.len())
    }

    pub fn contains(&self, p: &Permutation, cap: usize) -> Result<bool, GroupError> {
        Ok(self.elements(cap)?.binary_search(p).is_ok())
    }

    /// Two groups are equal when their element sets are.
    pub fn same_elements(&self, other: &Self, cap: usize) -> Result<bool, GroupError> {
        Ok(self.degree == other.degree && self.elements(cap)? == other.elements(cap)?)
    }

    pub fn is_subgroup_of(&self, other: &Self, cap: usize) -> Result<bool, GroupError> {
        let big = other.elements(cap)?;
        Ok(self
            .elements(cap)?
            .iter()
            .all(|x| big.binary_search(x).is_ok()))
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| g[i].then(&g[j]) == g[j].then(&g[i])))
    }

    pub fn stabilizer(&self, point: usize, cap: usize) -> Result<Vec<Permutation>, GroupError> {
        Ok(self
            .elements(cap)?
            .iter()
            .filter(|g| g.apply(point) == point)
            .copied()
            .collect())
    }

    /// The smallest normal subgroup of `self` containing `seeds`.
    pub fn normal_closure(&self, seeds: &[Permutation], cap: usize) -> Result<Self, GroupError> {
        let mut sub = Generated::from_seeds(self.degree, seeds, cap)?;
        let mut i = 0;
        while i < sub.gens.len() {
            let n = sub.gens[i];
            for h in &self.generators {
                let c = n.conjugate_by(h);
                if !sub.set.contains(&c) {
                    sub.add(c, cap)?;
                }
            }
            i += 1;
        }
        Ok(sub.into_group())
    }

    /// `[G, G]`, the normal closure of the commutators of the generators.
    pub fn derived_subgroup(&self, cap: usize) -> Result<Self, GroupError> {
        let g = &self.generators;
        let mut seeds = Vec::new();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                seeds.push(g[i].commutator(&g[j]));
            }
        }
        self.normal_closure(&seeds, cap)
    }

    /// `G = G^(0) > G^(1) > ...` until the series stabilizes.
    pub fn derived_series(&self, cap: usize) -> Result<DerivedSeries, GroupError> {
        let mut series = vec![self.clone()];
        self.elements(cap)?;
        loop {
            let last = series.last().unwrap();
            let next = last.derived_subgroup(cap)?;
            if next.order(cap)? == last.order(cap)? {
                break;
            }
            series.push(next);
        }
        let solvable = series.last().unwrap().order(cap)? == 1;
        Ok(DerivedSeries { series, solvable })
    }

    /// Solvability with two shortcuts that avoid enumerating large groups:
    /// an intransitive group is solvable iff each orbit restriction is, and a
    /// primitive group of degree `d >= 5` containing an element with a
    /// `p`-cycle power (`p` prime, `p <= d - 3`) contains `A_d` (Jordan), so
    /// it is not solvable. Everything else goes through the derived series.
    pub fn is_solvable(&self, cap: usize) -> Result<bool, GroupError> {
        if self.elements.get().is_none() {
            let orbits = self.orbits();
            if orbits.len() > 1 {
                for orbit in &orbits {
                    if orbit.len() > 1 && !self.restrict_to(orbit).is_solvable(cap)? {
                        return Ok(false);
                    }
                }
                return Ok(true);
            }
            if self.degree >= 5 && self.is_primitive() {
                match closure_until(&self.generators, self.degree, cap, has_jordan_power)? {
                    Closure::Found => return Ok(false),
                    Closure::Complete(elements) => {
                        let _ = self.elements.set(elements);
                    }
                }
            }
        }
        Ok(self.derived_series(cap)?.solvable)
    }

    /// The action on one orbit, relabelled onto `0..orbit.len()`.
    pub fn restrict_to(&self, orbit: &[usize]) -> Self {
        let mut index = [usize::MAX; crate::perm::MAX_DEGREE];
        for (i, &x) in orbit.iter().enumerate() {
            index[x] = i;
        }
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let images: Vec<usize> = orbit.iter().map(|&x| index[g.apply(x)]).collect();
                Permutation::from_images(&images).expect("orbit is invariant")
            })
            .collect();
        PermutationGroup {
            degree: orbit.len(),
            generators: gens,
            elements: OnceLock::new(),
        }
    }

    /// Conjugacy classes of the group, each sorted, ordered by least element.
    pub fn conjugacy_classes(&self, cap: usize) -> Result<Vec<Vec<Permutation>>, GroupError> {
        let elements = self.elements(cap)?;
        let mut assigned = FxHashSet::default();
        let mut classes = Vec::new();
        for &x in elements {
            if assigned.contains(&x) {
                continue;
            }
            let mut class = vec![x];
            assigned.insert(x);
            let mut i = 0;
            while i < class.len() {
                let y = class[i];
                for g in &self.generators {
                    let z = y.conjugate_by(g);
                    if assigned.insert(z) {
                        class.push(z);
                    }
                }
                i += 1;
            }
            class.sort_unstable();
            classes.push(class);
        }
        Ok(classes)
    }

    /// Minimal normal subgroups, found as the inclusion-minimal normal
    /// closures of single nontrivial elements. Sorted by order, then elements.
    pub fn minimal_normal_subgroups(&self, cap: usize) -> Result<Vec<MinimalNormal>, GroupError> {
        let mut candidates: Vec<PermutationGroup> = Vec::new();
        for class in self.conjugacy_classes(cap)? {
            if class[0].is_identity() {
                continue;
            }
            // A union of classes generates a normal subgroup directly.
            let n = Generated::from_seeds(self.degree, &class, cap)?.into_group();
            let mut dup = false;
            for c in &candidates {
                if c.same_elements(&n, cap)? {
                    dup = true;
                    break;
                }
            }
            if !dup {
                candidates.push(n);
            }
        }
        let mut minimal = Vec::new();
        for (i, n) in candidates.iter().enumerate() {
            let mut is_min = true;
            for (j, m) in candidates.iter().enumerate() {
                if i != j && m.order(cap)? < n.order(cap)? && m.is_subgroup_of(n, cap)? {
                    is_min = false;
                    break;
                }
            }
            if is_min {
                minimal.push(n.clone());
            }
        }
        minimal.sort_by(|a, b| {
            let (ea, eb) = (a.elements.get().unwrap(), b.elements.get().unwrap());
            ea.len().cmp(&eb.len()).then_with(|| ea.cmp(eb))
        });
        minimal
            .into_iter()
            .map(|group| {
                let elementary_abelian_p = elementary_abelian_prime(&group, cap)?;
                let regular = group.is_transitive() && group.order(cap)? == group.degree;
                Ok(MinimalNormal {
                    group,
                    elementary_abelian_p,
                    regular,
                })
            })
            .collect()
    }
}

fn elementary_abelian_prime(group: &PermutationGroup, cap: usize) -> Result<Option<u64>, GroupError> {
    if !group.is_abelian() {
        return Ok(None);
    }
    let mut prime = None;
    for x in group.elements(cap)?.iter().filter(|x| !x.is_identity()) {
        let o = x.order();
        match prime {
            None if crate::arith::is_prime(o) => prime = Some(o),
            Some(p) if p == o => {}
            _ => return Ok(None),
        }
    }
    Ok(prime)
}

#[derive(Debug, Clone)]
pub struct DerivedSeries {
    /// `series[0]` is the group itself; the last entry is where it stabilized.
    pub series: Vec<PermutationGroup>,
    pub solvable: bool,
}

impl DerivedSeries {
    /// Number of proper steps taken before stabilizing.
    pub fn length(&self) -> usize {
        self.series.len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct MinimalNormal {
    pub group: PermutationGroup,
    /// `Some(p)` when the subgroup is an elementary abelian `p`-group.
    pub elementary_abelian_p: Option<u64>,
    /// Transitive with order equal to the degree.
    pub regular: bool,
}

/// `true` when some power of `g` is a single `p`-cycle with `p` prime and
/// `p <= d - 3`: exactly one cycle length is divisible by `p`, and it is `p`.
pub(crate) fn has_jordan_power(g: &Permutation) -> bool {
    let d = g.degree();
    let (lens, n) = g.cycle_lengths();
    let lens = &lens[..n];
    (2..=d.saturating_sub(3)).filter(|&p| crate::arith::is_prime(p as u64)).any(|p| {
        let mut divisible = lens.iter().filter(|&&l| (l as usize).is_multiple_of(p));
        matches!((divisible.next(), divisible.next()), (Some(&l), None) if l as usize == p)
    })
}

enum Closure {
    Complete(Vec<Permutation>),
    Found,
}

fn closure(gens: &[Permutation], degree: usize, cap: usize) -> Result<Vec<Permutation>, GroupError> {
    match closure_until(gens, degree, cap, |_| false)? {
        Closure::Complete(e) => Ok(e),
        Closure::Found => unreachable!(),
    }
}

/// Breadth-first closure from the identity, stopping early at the first
/// element satisfying `stop`.
fn closure_until(
    gens: &[Permutation],
    degree: usize,
    cap: usize,
    stop: impl Fn(&Permutation) -> bool,
) -> Result<Closure, GroupError> {
    let id = Permutation::identity_unchecked(degree);
    let mut seen = FxHashSet::default();
    seen.insert(id);
    let mut order = vec![id];
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for g in gens {
            let y = x.then(g);
            if seen.insert(y) {
                if stop(&y) {
                    return Ok(Closure::Found);
                }
                if order.len() >= cap {
                    return Err(GroupError::CapExceeded { cap });
                }
                order.push(y);
            }
        }
        i += 1;
    }
    order.sort_unstable();
    Ok(Closure::Complete(order))
}

/// A subgroup grown one generator at a time; a seed only becomes a generator
/// when it is not already in the closure, which keeps generator lists short.
struct Generated {
    degree: usize,
    gens: Vec<Permutation>,
    set: FxHashSet<Permutation>,
    elements: Vec<Permutation>,
}

impl Generated {
    fn from_seeds(degree: usize, seeds: &[Permutation], cap: usize) -> Result<Self, GroupError> {
        let id = Permutation::identity_unchecked(degree);
        let mut g = Generated {
            degree,
            gens: Vec::new(),
            set: std::iter::once(id).collect(),
            elements: vec![id],
        };
        for s in seeds {
            if !g.set.contains(s) {
                g.add(*s, cap)?;
            }
        }
        Ok(g)
    }

    fn add(&mut self, s: Permutation, cap: usize) -> Result<(), GroupError> {
        self.gens.push(s);
        // Every element of the new group is an old element times a word in
        // the generators, so seeding the queue with the old group suffices.
        let mut i = 0;
        while i < self.elements.len() {
            let x = self.elements[i];
            for g in &self.gens {
                let y = x.then(g);
                if self.set.insert(y) {
                    if self.elements.len() >= cap {
                        return Err(GroupError::CapExceeded { cap });
                    }
                    self.elements.push(y);
                }
            }
            i += 1;
        }
        Ok(())
    }

    fn into_group(mut self) -> PermutationGroup {
        self.elements.sort_unstable();
        PermutationGroup::with_elements(self.degree, self.gens, self.elements)
    }
}

#[derive(Clone, Copy)]
struct UnionFind {
    parent: [u8; MAX_DEGREE],
    n: usize,
    count: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        let mut parent = [0u8; MAX_DEGREE];
        for (i, p) in parent.iter_mut().enumerate() {
            *p = i as u8;
        }
        UnionFind { parent, n, count: n }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            self.parent[x] = self.parent[self.parent[x] as usize];
            x = self.parent[x] as usize;
        }
        x
    }

    /// Returns `true` if two distinct classes were merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo as u8;
        self.count -= 1;
        true
    }

    /// Merges `a` and `b` and closes the relation under `gens`.
    fn merge_closed(&mut self, gens: &[Permutation], a: usize, b: usize) {
        let mut stack = [(0u8, 0u8); MAX_DEGREE];
        let mut top = 0;
        if self.union(a, b) {
            stack[0] = (a as u8, b as u8);
            top = 1;
        }
        while top > 0 {
            top -= 1;
            let (a, b) = (stack[top].0 as usize, stack[top].1 as usize);
            for g in gens {
                let (ga, gb) = (g.apply(a), g.apply(b));
                if self.union(ga, gb) {
                    stack[top] = (ga as u8, gb as u8);
                    top += 1;
                }
            }
        }
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            by_root[r].push(x);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

/// Primitivity of the group generated by `gens` on `0..d`, without
/// allocating.
pub(crate) fn primitive_on(gens: &[Permutation], d: usize) -> bool {
    if d < 2 {
        return false;
    }
    let mut orbits = UnionFind::new(d);
    for g in gens {
        for x in 0..d {
            orbits.union(x, g.apply(x));
        }
    }
    if orbits.count != 1 {
        return false;
    }
    (1..d).all(|point| {
        let mut uf = UnionFind::new(d);
        uf.merge_closed(gens, 0, point);
        uf.count == 1
    })
}
