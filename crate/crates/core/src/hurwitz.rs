//! Exhaustive enumeration of branch tuples with prescribed data, their
//! canonical forms under simultaneous conjugation, and the census built from
//! them.
//!
//! The search fixes `σ₁` per subtree (this is the unit of parallel work),
//! walks `σ₂ .. σ_{l-1}` depth-first and forces `σ_l` as the inverse of the
//! running product. Subtrees share nothing; their fragments are merged in
//! `σ₁` order, so results do not depend on the number of workers.

use std::collections::hash_map::Entry;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith;
use crate::cover::{classify_cover, BranchTuple, CoverError};
use crate::group::{has_jordan_power, primitive_on, DEFAULT_ELEMENT_CAP};
use crate::perm::{CycleType, PermError, Permutation, MAX_DEGREE};

/// Default limit on visited search nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Largest degree the enumerator accepts.
pub const MAX_ENUM_DEGREE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HurwitzError {
    #[error("search needs about {estimate} nodes, budget is {budget}")]
    SearchTooLarge { estimate: u128, budget: u64 },
    #[error("invalid enumeration spec: {0}")]
    InvalidSpec(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// What to enumerate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumSpec {
    pub degree: usize,
    pub points: usize,
    /// Per-point cycle types; `None` entries are unconstrained.
    #[serde(serialize_with = "serialize_cycle_types")]
    pub cycle_types: Option<Vec<Option<CycleType>>>,
    pub require_transitive: bool,
    pub require_ps: bool,
    pub genus_filter: Option<i64>,
    pub up_to_conjugation: bool,
}

fn serialize_cycle_types<S: Serializer>(
    ct: &Option<Vec<Option<CycleType>>>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match ct {
        None => s.serialize_none(),
        Some(v) => s.collect_seq(v.iter().map(|c| match c {
            Some(c) => c.to_string(),
            None => "*".to_string(),
        })),
    }
}

impl EnumSpec {
    pub fn new(degree: usize, points: usize) -> Self {
        EnumSpec {
            degree,
            points,
            cycle_types: None,
            require_transitive: false,
            require_ps: false,
            genus_filter: None,
            up_to_conjugation: false,
        }
    }

    /// Parses the `2,1|2,1|*` syntax: parts comma-separated, points
    /// pipe-separated, `*` for an unconstrained point.
    pub fn parse_cycle_types(text: &str) -> Result<Vec<Option<CycleType>>, PermError> {
        text.split('|')
            .map(|t| {
                let t = t.trim();
                if t == "*" {
                    Ok(None)
                } else {
                    t.parse().map(Some)
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), HurwitzError> {
        let bad = |m: String| Err(HurwitzError::InvalidSpec(m));
        if self.degree == 0 || self.degree > MAX_ENUM_DEGREE {
            return bad(format!("degree must be in 1..={MAX_ENUM_DEGREE}"));
        }
        if self.points == 0 {
            return bad("points must be at least 1".into());
        }
        if let Some(ct) = &self.cycle_types {
            if ct.len() != self.points {
                return bad(format!(
                    "{} cycle types given for {} points",
                    ct.len(),
                    self.points
                ));
            }
            for c in ct.iter().flatten() {
                if c.degree() != self.degree {
                    return bad(format!("cycle type {c} is not a partition of {}", self.degree));
                }
            }
        }
        Ok(())
    }

    fn constraint(&self, i: usize) -> Option<&CycleType> {
        self.cycle_types.as_ref().and_then(|v| v[i].as_ref())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub jobs: usize,
    pub node_budget: u64,
    pub element_cap: usize,
    /// Keep the tuple stream (all tuples, or class representatives when
    /// enumerating up to conjugation).
    pub collect_tuples: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            jobs: 1,
            node_budget: DEFAULT_NODE_BUDGET,
            element_cap: DEFAULT_ELEMENT_CAP,
            collect_tuples: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub spec: EnumSpec,
    pub tuple_count: u64,
    pub class_count: u64,
    /// Counts tuples, or classes when enumerating up to conjugation.
    #[serde(serialize_with = "serialize_histogram")]
    pub genus_histogram: BTreeMap<i64, u64>,
    pub ps_tuple_count: u64,
    pub ps_class_count: u64,
    pub zariski_violations: u64,
    pub hurwitz_dim: i64,
    pub image_dim: i64,
    pub nodes: u64,
}

fn serialize_histogram<S: Serializer>(h: &BTreeMap<i64, u64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(h.iter().map(|(g, c)| [*g, *c as i64]))
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub census: Census,
    /// Sorted by canonical form, then by the tuple itself. Empty unless
    /// [`SearchOptions::collect_tuples`] is set.
    pub tuples: Vec<BranchTuple>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ClassStats {
    count: u64,
    genus: i64,
    ps: bool,
    zariski_ok: bool,
}

#[derive(Default)]
struct Fragment {
    classes: Vec<(BranchTuple, ClassStats)>,
    tuples: Vec<(BranchTuple, BranchTuple)>,
    nodes: u64,
}

pub fn enumerate_covers(spec: &EnumSpec, opts: &SearchOptions) -> Result<Enumeration, HurwitzError> {
    spec.validate()?;
    let d = spec.degree;
    let l = spec.points;
    let searched = l - 1;

    let mut estimate: u128 = 0;
    let mut prefix: u128 = 1;
    for i in 0..searched {
        prefix = prefix.saturating_mul(candidate_count(spec, i));
        estimate = estimate.saturating_add(prefix);
    }
    if estimate > opts.node_budget as u128 {
        return Err(HurwitzError::SearchTooLarge {
            estimate,
            budget: opts.node_budget,
        });
    }

    let mut by_type: FxHashMap<Option<CycleType>, Arc<Vec<Permutation>>> = FxHashMap::default();
    let candidates: Vec<Arc<Vec<Permutation>>> = (0..searched)
        .map(|i| {
            let key = spec.constraint(i).cloned();
            by_type
                .entry(key.clone())
                .or_insert_with(|| Arc::new(candidate_list(d, key.as_ref())))
                .clone()
        })
        .collect();

    // Largest number of orbit merges each position can still contribute.
    let mut merge_suffix = vec![0usize; l + 1];
    for i in (0..l).rev() {
        let most = spec
            .constraint(i)
            .map_or(d - 1, CycleType::branch_multiplicity);
        merge_suffix[i] = merge_suffix[i + 1] + most;
    }

    let ctx = SearchCtx {
        spec,
        opts,
        candidates: &candidates,
        last_type: spec.constraint(l - 1).map(|c| c.parts().to_vec()),
        merge_suffix,
        prune_disconnected: spec.require_transitive || spec.require_ps,
        classified: Mutex::new(FxHashMap::default()),
    };

    let fragments: Vec<Result<Fragment, HurwitzError>> = if searched == 0 {
        Vec::new()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs.max(1))
            .build()
            .map_err(|e| HurwitzError::InvalidInput(e.to_string()))?;
        pool.install(|| {
            candidates[0]
                .par_iter()
                .map(|first| ctx.search_subtree(*first))
                .collect()
        })
    };

    // keyed by class key first, then re-keyed by lexicographically least form
    let mut by_key: BTreeMap<BranchTuple, ClassStats> = BTreeMap::new();
    let mut tuples = Vec::new();
    let mut nodes = 0;
    for fragment in fragments {
        let fragment = fragment?;
        nodes += fragment.nodes;
        for (key, stats) in fragment.classes {
            by_key
                .entry(key)
                .and_modify(|s| {
                    debug_assert_eq!((s.genus, s.ps), (stats.genus, stats.ps));
                    s.count += stats.count;
                })
                .or_insert(stats);
        }
        tuples.extend(fragment.tuples);
    }
    let mut least: FxHashMap<BranchTuple, BranchTuple> = FxHashMap::default();
    let mut classes: BTreeMap<BranchTuple, ClassStats> = BTreeMap::new();
    for (key, stats) in by_key {
        let canon = canonical_form(&key);
        least.insert(key, canon.clone());
        classes.insert(canon, stats);
    }
    let mut tuples: Vec<(BranchTuple, BranchTuple)> = tuples
        .into_iter()
        .map(|(key, t)| (least[&key].clone(), t))
        .collect();

    let mut genus_histogram = BTreeMap::new();
    let (mut tuple_count, mut ps_tuple_count, mut ps_class_count, mut zariski_violations) =
        (0, 0, 0, 0);
    for stats in classes.values() {
        tuple_count += stats.count;
        let weight = if spec.up_to_conjugation { 1 } else { stats.count };
        *genus_histogram.entry(stats.genus).or_insert(0) += weight;
        if stats.ps {
            ps_class_count += 1;
            ps_tuple_count += stats.count;
            if !stats.zariski_ok {
                zariski_violations += stats.count;
            }
        }
    }

    let tuples = if !opts.collect_tuples {
        Vec::new()
    } else if spec.up_to_conjugation {
        classes.keys().cloned().collect()
    } else {
        tuples.sort_unstable();
        tuples.into_iter().map(|(_, t)| t).collect()
    };

    Ok(Enumeration {
        census: Census {
            spec: spec.clone(),
            tuple_count,
            class_count: classes.len() as u64,
            genus_histogram,
            ps_tuple_count,
            ps_class_count,
            zariski_violations,
            hurwitz_dim: l as i64,
            image_dim: l as i64 - 3,
            nodes,
        },
        tuples,
    })
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn candidate_count(spec: &EnumSpec, i: usize) -> u128 {
    match spec.constraint(i) {
        Some(c) => {
            let mut denom: u128 = 1;
            let mut parts = c.parts().to_vec();
            parts.dedup();
            for &len in &parts {
                let m = c.parts().iter().filter(|&&x| x == len).count();
                denom *= factorial(m) * (len as u128).pow(m as u32);
            }
            factorial(spec.degree) / denom
        }
        None => factorial(spec.degree) - 1,
    }
}

fn candidate_list(d: usize, constraint: Option<&CycleType>) -> Vec<Permutation> {
    match constraint {
        Some(c) => c.members(),
        None => crate::perm::symmetric_group(d)
            .expect("degree checked")
            .into_iter()
            .filter(|p| !p.is_identity())
            .collect(),
    }
}

#[derive(Clone, Copy)]
struct Components {
    parent: [u8; MAX_DEGREE],
    count: usize,
}

impl Components {
    fn new(d: usize) -> Self {
        let mut parent = [0u8; MAX_DEGREE];
        for (i, p) in parent.iter_mut().enumerate() {
            *p = i as u8;
        }
        Components { parent, count: d }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            x = self.parent[x] as usize;
        }
        x
    }

    fn absorb(&mut self, p: &Permutation) {
        for x in 0..p.degree() {
            let (a, b) = (self.find(x), self.find(p.apply(x)));
            if a != b {
                self.parent[a.max(b)] = a.min(b) as u8;
                self.count -= 1;
            }
        }
    }
}

struct SearchCtx<'a> {
    spec: &'a EnumSpec,
    opts: &'a SearchOptions,
    candidates: &'a [Arc<Vec<Permutation>>],
    last_type: Option<Vec<usize>>,
    merge_suffix: Vec<usize>,
    prune_disconnected: bool,
    /// Classification by class key, shared by all subtrees. Entries are
    /// pure functions of the key, so sharing cannot affect results.
    classified: Mutex<FxHashMap<BranchTuple, Option<ClassStats>>>,
}

impl SearchCtx<'_> {
    fn classify(&self, canon: &BranchTuple) -> Result<Option<ClassStats>, HurwitzError> {
        if let Some(stats) = self.classified.lock().expect("poisoned").get(canon) {
            return Ok(*stats);
        }
        let stats = classify_class(canon, self.spec, self.opts.element_cap)?;
        self.classified
            .lock()
            .expect("poisoned")
            .insert(canon.clone(), stats);
        Ok(stats)
    }
}

struct Subtree<'a> {
    ctx: &'a SearchCtx<'a>,
    entries: Vec<Permutation>,
    cache: FxHashMap<BranchTuple, (Option<ClassStats>, u64)>,
    tuples: Vec<(BranchTuple, BranchTuple)>,
    nodes: u64,
}

impl SearchCtx<'_> {
    fn search_subtree(&self, first: Permutation) -> Result<Fragment, HurwitzError> {
        let d = self.spec.degree;
        let mut comps = Components::new(d);
        comps.absorb(&first);
        let mut sub = Subtree {
            ctx: self,
            entries: vec![first],
            cache: FxHashMap::default(),
            tuples: Vec::new(),
            nodes: 1,
        };
        if self.prune_disconnected && comps.count > 1 + self.merge_suffix[1] {
            return Ok(Fragment {
                nodes: 1,
                ..Fragment::default()
            });
        }
        let r = d - first.orbit_count();
        sub.descend(first, comps, r)?;

        let mut classes: Vec<(BranchTuple, ClassStats)> = sub
            .cache
            .into_iter()
            .filter_map(|(canon, (stats, count))| {
                stats.map(|s| (canon, ClassStats { count, ..s }))
            })
            .filter(|(_, s)| s.count > 0)
            .collect();
        classes.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Ok(Fragment {
            classes,
            tuples: sub.tuples,
            nodes: sub.nodes,
        })
    }
}

impl Subtree<'_> {
    fn descend(&mut self, product: Permutation, comps: Components, r: usize) -> Result<(), HurwitzError> {
        let ctx = self.ctx;
        let depth = self.entries.len();
        let l = ctx.spec.points;
        let d = ctx.spec.degree;
        if depth == l - 1 {
            let last = product.inverse();
            if last.is_identity() {
                return Ok(());
            }
            if let Some(parts) = &ctx.last_type {
                if !has_cycle_type(&last, parts) {
                    return Ok(());
                }
            }
            return self.leaf(last, comps, r + d - last.orbit_count());
        }
        let candidates = ctx.candidates[depth].clone();
        for s in candidates.iter() {
            self.nodes += 1;
            let mut c = comps;
            if ctx.prune_disconnected {
                c.absorb(s);
                if c.count > 1 + ctx.merge_suffix[depth + 1] {
                    continue;
                }
            }
            self.entries.push(*s);
            let res = self.descend(product.then(s), c, r + d - s.orbit_count());
            self.entries.pop();
            res?;
        }
        Ok(())
    }

    fn leaf(&mut self, last: Permutation, mut comps: Components, r: usize) -> Result<(), HurwitzError> {
        let ctx = self.ctx;
        let spec = ctx.spec;
        let d = spec.degree;
        debug_assert!(r.is_multiple_of(2));
        let genus = 1 - d as i64 + r as i64 / 2;
        if let Some(g) = spec.genus_filter {
            if g != genus {
                return Ok(());
            }
        }
        comps.absorb(&last);
        let transitive = comps.count == 1;
        if (spec.require_transitive || spec.require_ps) && !transitive {
            return Ok(());
        }
        self.entries.push(last);
        let tuple = BranchTuple::from_parts(d, self.entries.clone());
        self.entries.pop();

        if spec.require_ps && !maybe_ps(&tuple) {
            return Ok(());
        }

        let key = class_key(&tuple);
        let slot = match self.cache.entry(key.clone()) {
            Entry::Occupied(o) => o.into_mut(),
            Entry::Vacant(v) => {
                let stats = ctx.classify(v.key())?;
                v.insert((stats, 0))
            }
        };
        if slot.0.is_some() {
            slot.1 += 1;
            if ctx.opts.collect_tuples && !spec.up_to_conjugation {
                self.tuples.push((key, tuple));
            }
        }
        Ok(())
    }
}

/// Classifies a class representative; `None` if the class is filtered out.
fn classify_class(
    canon: &BranchTuple,
    spec: &EnumSpec,
    cap: usize,
) -> Result<Option<ClassStats>, HurwitzError> {
    let report = classify_cover(canon, cap)?;
    if spec.require_ps && !report.ps {
        return Ok(None);
    }
    Ok(Some(ClassStats {
        count: 0,
        genus: report.genus,
        ps: report.ps,
        zariski_ok: report.zariski_holds(),
    }))
}

/// Cheap necessary test for primitive solvable monodromy: the group must be
/// primitive, and for `d >= 5` no entry or product of two entries may have
/// a power that is a short prime cycle (Jordan: that forces `A_d`).
fn maybe_ps(t: &BranchTuple) -> bool {
    let e = t.entries();
    if e.iter().any(has_jordan_power) {
        return false;
    }
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            if has_jordan_power(&e[i].then(&e[j])) {
                return false;
            }
        }
    }
    primitive_on(e, t.degree())
}

fn has_cycle_type(p: &Permutation, parts: &[usize]) -> bool {
    let (lens, n) = p.cycle_lengths();
    if n != parts.len() {
        return false;
    }
    let mut lens: Vec<usize> = lens[..n].iter().map(|&x| x as usize).collect();
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens == parts
}

/// Lexicographically least simultaneous conjugate of tuples whose first
/// entry is fixed.
///
/// Only relabellings carrying the first entry onto the least member of its
/// cycle type can win. That least member puts the `f` fixed points on labels
/// `0..f` and the cycles on consecutive blocks after them. The cycle part of
/// a winning relabelling is enumerated outright; the fixed-point part is
/// found by branch and bound, label by label, since the key at label `j` of
/// the second entry only depends on labels already placed or on the next one.
pub struct Canonicalizer {
    first: Permutation,
    rep: Permutation,
    fixed: Vec<u8>,
    /// Point-to-label maps on the moved points of `first`, one per way of
    /// laying its cycles onto the target blocks.
    cycle_parts: Vec<[u8; MAX_DEGREE]>,
}

const UNSET: u8 = u8::MAX;

impl Canonicalizer {
    pub fn new(first: &Permutation) -> Self {
        let ct = first.cycle_data().cycle_type;
        let rep = ct.least_member();
        let cycles = first.cycles();
        let fixed: Vec<u8> = cycles
            .iter()
            .filter(|c| c.len() == 1)
            .map(|c| c[0] as u8)
            .collect();
        let moving: Vec<Vec<usize>> = cycles.into_iter().filter(|c| c.len() > 1).collect();

        let mut lengths: Vec<usize> = moving.iter().map(Vec::len).collect();
        lengths.sort_unstable();
        let mut targets = Vec::new();
        let mut start = fixed.len();
        for len in lengths {
            targets.push((start, len));
            start += len;
        }

        let mut cycle_parts = Vec::new();
        let mut labels = [UNSET; MAX_DEGREE];
        let mut used = vec![false; targets.len()];
        assign_cycles(&moving, 0, &targets, &mut used, &mut labels, &mut cycle_parts);
        Canonicalizer {
            first: *first,
            rep,
            fixed,
            cycle_parts,
        }
    }

    /// Size of the centralizer of the first entry.
    pub fn relabelling_count(&self) -> usize {
        self.cycle_parts.len() * (1..=self.fixed.len()).product::<usize>()
    }

    pub fn canonicalize(&self, t: &BranchTuple) -> BranchTuple {
        let e = t.entries();
        assert_eq!(e.first(), Some(&self.first), "tuple must start with the fixed entry");
        let d = t.degree();
        let tail = &e[1..];
        let mut search = FixedSearch {
            d,
            f: self.fixed.len(),
            fixed: &self.fixed,
            tail,
            label: [UNSET; MAX_DEGREE],
            point: [UNSET; MAX_DEGREE],
            best: Vec::new(),
            cur: vec![0; d * tail.len()],
        };
        if !tail.is_empty() {
            for part in &self.cycle_parts {
                search.label = *part;
                search.point = [UNSET; MAX_DEGREE];
                for (x, &label) in part.iter().enumerate().take(d) {
                    if label != UNSET {
                        search.point[label as usize] = x as u8;
                    }
                }
                let state = if search.best.is_empty() { Order::Less } else { Order::Equal };
                search.place(0, None, state);
            }
        }
        let mut entries = Vec::with_capacity(e.len());
        entries.push(self.rep);
        for chunk in search.best.chunks(d) {
            let images: Vec<usize> = chunk.iter().map(|&v| v as usize).collect();
            entries.push(Permutation::from_images(&images).expect("conjugate is a bijection"));
        }
        BranchTuple::from_parts(d, entries)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Order {
    /// Current prefix equals the best key's prefix.
    Equal,
    /// Current prefix is already smaller (or there is no best yet).
    Less,
}

struct FixedSearch<'a> {
    d: usize,
    f: usize,
    fixed: &'a [u8],
    tail: &'a [Permutation],
    /// point -> label
    label: [u8; MAX_DEGREE],
    /// label -> point
    point: [u8; MAX_DEGREE],
    best: Vec<u8>,
    cur: Vec<u8>,
}

impl FixedSearch<'_> {
    /// Records key value `v` at `pos`; `None` when the branch is worse than
    /// the best key.
    fn push(&mut self, pos: usize, v: u8, state: Order) -> Option<Order> {
        self.cur[pos] = v;
        match state {
            Order::Less => Some(Order::Less),
            Order::Equal => match v.cmp(&self.best[pos]) {
                std::cmp::Ordering::Less => Some(Order::Less),
                std::cmp::Ordering::Equal => Some(Order::Equal),
                std::cmp::Ordering::Greater => None,
            },
        }
    }

    /// Places label `j` on a fixed point of the first entry. `forced` is
    /// the point that must take it, if the previous label demanded one.
    /// Returns `true` if the best key was replaced.
    fn place(&mut self, j: usize, forced: Option<u8>, mut state: Order) -> bool {
        if j == self.f {
            return self.finish(state);
        }
        let second = self.tail[0];
        // key value at position j for candidate x, and the point it forces onto j + 1
        let value = |s: &Self, x: u8| -> (u8, Option<u8>) {
            let y = second.apply(x as usize) as u8;
            if s.label[y as usize] != UNSET {
                (s.label[y as usize], None)
            } else if y == x {
                (j as u8, None)
            } else {
                (j as u8 + 1, Some(y))
            }
        };
        let mut cands = [0u8; MAX_DEGREE];
        let mut n = 0;
        match forced {
            Some(x) => {
                cands[0] = x;
                n = 1;
            }
            None => {
                let mut min = UNSET;
                for &x in self.fixed {
                    if self.label[x as usize] != UNSET {
                        continue;
                    }
                    let v = value(self, x).0;
                    if v < min {
                        min = v;
                        n = 0;
                    }
                    if v == min {
                        cands[n] = x;
                        n += 1;
                    }
                }
            }
        }
        let mut improved = false;
        for &x in &cands[..n] {
            let (v, next) = value(self, x);
            self.label[x as usize] = j as u8;
            self.point[j] = x;
            if let Some(s) = self.push(j, v, state) {
                if self.place(j + 1, next, s) {
                    // the new best shares this prefix
                    state = Order::Equal;
                    improved = true;
                }
            }
            self.label[x as usize] = UNSET;
            self.point[j] = UNSET;
        }
        improved
    }

    /// All labels are placed: evaluate the rest of the key.
    fn finish(&mut self, mut state: Order) -> bool {
        let d = self.d;
        for (b, s) in self.tail.iter().enumerate() {
            let from = if b == 0 { self.f } else { 0 };
            for j in from..d {
                let v = self.label[s.apply(self.point[j] as usize)];
                match self.push(b * d + j, v, state) {
                    Some(next) => state = next,
                    None => return false,
                }
            }
        }
        if state == Order::Less {
            self.best.clone_from(&self.cur);
        }
        state == Order::Less
    }
}

fn assign_cycles(
    source: &[Vec<usize>],
    idx: usize,
    targets: &[(usize, usize)],
    used: &mut [bool],
    labels: &mut [u8; MAX_DEGREE],
    out: &mut Vec<[u8; MAX_DEGREE]>,
) {
    if idx == source.len() {
        out.push(*labels);
        return;
    }
    let cycle = &source[idx];
    let len = cycle.len();
    for (k, &(start, tlen)) in targets.iter().enumerate() {
        // equal-length blocks are interchangeable; try each free one once
        if used[k] || tlen != len {
            continue;
        }
        used[k] = true;
        for rot in 0..len {
            for (j, &x) in cycle.iter().enumerate() {
                labels[x] = (start + (j + rot) % len) as u8;
            }
            assign_cycles(source, idx + 1, targets, used, labels, out);
        }
        used[k] = false;
    }
}

/// A complete conjugation invariant, cheaper than [`canonical_form`]: each
/// orbit is relabelled breadth-first from its best starting point, and the
/// relabelled orbits are laid out in sorted order. Two tuples get the same
/// key exactly when they are simultaneously conjugate.
pub fn class_key(t: &BranchTuple) -> BranchTuple {
    let e = t.entries();
    let d = t.degree();
    if e.is_empty() {
        return t.clone();
    }
    let mut orbit_of = [UNSET; MAX_DEGREE];
    let mut orbits: Vec<Vec<u8>> = Vec::new();
    for x in 0..d {
        if orbit_of[x] != UNSET {
            continue;
        }
        let id = orbits.len() as u8;
        let mut orbit = vec![x as u8];
        orbit_of[x] = id;
        let mut i = 0;
        while i < orbit.len() {
            let p = orbit[i] as usize;
            for s in e {
                let q = s.apply(p);
                if orbit_of[q] == UNSET {
                    orbit_of[q] = id;
                    orbit.push(q as u8);
                }
            }
            i += 1;
        }
        orbits.push(orbit);
    }

    // per orbit: (local key, breadth-first order of its points)
    let mut forms: Vec<(Vec<u8>, Vec<u8>)> = Vec::with_capacity(orbits.len());
    let mut local = [UNSET; MAX_DEGREE];
    for orbit in &orbits {
        let n = orbit.len();
        let mut best: Option<(Vec<u8>, Vec<u8>)> = None;
        for &start in orbit {
            for &x in orbit {
                local[x as usize] = UNSET;
            }
            let mut order = Vec::with_capacity(n);
            order.push(start);
            local[start as usize] = 0;
            let mut i = 0;
            while i < order.len() {
                let p = order[i] as usize;
                for s in e {
                    let q = s.apply(p);
                    if local[q] == UNSET {
                        local[q] = order.len() as u8;
                        order.push(q as u8);
                    }
                }
                i += 1;
            }
            let mut key = Vec::with_capacity(n * e.len() + 1);
            key.push(n as u8);
            for s in e {
                key.extend(order.iter().map(|&p| local[s.apply(p as usize)]));
            }
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, order));
            }
        }
        forms.push(best.expect("orbits are nonempty"));
    }
    forms.sort_unstable();

    let mut label = [0u8; MAX_DEGREE];
    let mut next = 0u8;
    for (_, order) in &forms {
        for &p in order {
            label[p as usize] = next;
            next += 1;
        }
    }
    let entries = e
        .iter()
        .map(|s| {
            let mut images = [0usize; MAX_DEGREE];
            for x in 0..d {
                images[label[x] as usize] = label[s.apply(x)] as usize;
            }
            Permutation::from_images(&images[..d]).expect("relabelling is a bijection")
        })
        .collect();
    BranchTuple::from_parts(d, entries)
}

/// Least simultaneous conjugate `(τσ₁τ⁻¹, .., τσ_lτ⁻¹)`, comparing the
/// concatenated image sequences.
pub fn canonical_form(t: &BranchTuple) -> BranchTuple {
    match t.entries().first() {
        None => t.clone(),
        Some(first) => Canonicalizer::new(first).canonicalize(t),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchPointBound {
    pub l_max: i64,
    /// `l_max - 3`, the dimension bound for the image in moduli.
    pub dim_bound: i64,
    /// Set when `p^k < 5`.
    pub small_degree_warning: bool,
}

/// Largest `l` with `2g - 2 >= -2p^k + l (p^k - p^(k-1)) / 2`.
pub fn max_branch_points(g: i64, p: u64, k: u32) -> Result<BranchPointBound, HurwitzError> {
    if g < 0 {
        return Err(HurwitzError::InvalidInput(format!("genus {g} is negative")));
    }
    if !arith::is_prime(p) {
        return Err(HurwitzError::InvalidInput(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(HurwitzError::InvalidInput("k must be positive".into()));
    }
    let q = (p as i64)
        .checked_pow(k)
        .ok_or_else(|| HurwitzError::InvalidInput("p^k overflows".into()))?;
    let l_max = 2 * (2 * g - 2 + 2 * q) / (q - q / p as i64);
    Ok(BranchPointBound {
        l_max,
        dim_bound: l_max - 3,
        small_degree_warning: q < 5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::PermutationGroup;
    use crate::perm::symmetric_group;

    fn perm(s: &str, d: usize) -> Permutation {
        Permutation::parse(s, d).unwrap()
    }

    /// Oracle: minimum over all of S_d.
    fn brute_canonical(t: &BranchTuple) -> BranchTuple {
        symmetric_group(t.degree())
            .unwrap()
            .iter()
            .map(|tau| t.conjugated_by(tau))
            .min()
            .unwrap()
    }

    #[test]
    fn canonical_matches_brute_force() {
        let cases = [
            (4, "(0 1);(1 2);(2 3);(0 1 2 3)"),
            (5, "(0 1 2 3 4);(1 2 4 3);(0 4 1 2)"),
            (5, "(0 1)(2 3);(0 2)(1 3);(0 3)(1 2)"),
            (6, "(0 5)(1 4);(2 3);(0 5)(1 4)(2 3)"),
            (6, "(0 1 2)(3 4 5);(0 3)(1 4)(2 5)"),
            (6, "(0 1)(2 3);(1 2 4);(0 5)"),
        ];
        for (d, s) in cases {
            let mut entries: Vec<Permutation> = s.split(';').map(|e| perm(e, d)).collect();
            let product = entries.iter().fold(Permutation::identity(d).unwrap(), |a, b| a.then(b));
            if !product.is_identity() {
                entries.push(product.inverse());
            }
            let t = BranchTuple::new(d, entries).unwrap();
            assert_eq!(canonical_form(&t), brute_canonical(&t), "{s}");
        }
    }

    #[test]
    fn canonical_matches_brute_force_exhaustively() {
        for (d, l) in [(4, 4), (5, 3)] {
            let e = enumerate_covers(
                &EnumSpec::new(d, l),
                &SearchOptions {
                    collect_tuples: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(!e.tuples.is_empty());
            let mut pairs = FxHashMap::default();
            for t in &e.tuples {
                let canon = canonical_form(t);
                assert_eq!(canon, brute_canonical(t), "{t}");
                // class keys and least forms induce the same partition
                let key = class_key(t);
                assert_eq!(class_key(&canon), key, "{t}");
                assert_eq!(pairs.entry(key).or_insert_with(|| canon.clone()), &canon);
            }
        }
    }

    #[test]
    fn canonicalizer_size_is_centralizer_order() {
        let c = Canonicalizer::new(&perm("(0 1)", 5));
        assert_eq!(c.relabelling_count(), 12);
        let c = Canonicalizer::new(&perm("(0 1)(2 3)", 6));
        assert_eq!(c.relabelling_count(), 16);
        let c = Canonicalizer::new(&perm("(0 1 2 3 4 5)", 6));
        assert_eq!(c.relabelling_count(), 6);
    }

    #[test]
    fn census_d2_l4() {
        let e = enumerate_covers(
            &EnumSpec::new(2, 4),
            &SearchOptions {
                collect_tuples: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(e.census.tuple_count, 1);
        assert_eq!(e.census.class_count, 1);
        assert_eq!(e.census.genus_histogram, BTreeMap::from([(1, 1)]));
        assert_eq!(e.tuples[0].to_string(), "(0 1);(0 1);(0 1);(0 1)");
    }

    fn transposition_spec(d: usize, l: usize) -> EnumSpec {
        let t: CycleType = {
            let mut parts = vec![2];
            parts.extend(std::iter::repeat_n(1, d - 2));
            CycleType::new(parts, d).unwrap()
        };
        EnumSpec {
            cycle_types: Some(vec![Some(t); l]),
            require_transitive: true,
            ..EnumSpec::new(d, l)
        }
    }

    #[test]
    fn census_d3_transpositions() {
        let spec = transposition_spec(3, 4);
        let e = enumerate_covers(
            &spec,
            &SearchOptions {
                collect_tuples: true,
                ..Default::default()
            },
        )
        .unwrap();
        let c = &e.census;
        assert_eq!(c.tuple_count, 24);
        assert_eq!(c.class_count, 4);
        assert_eq!(c.genus_histogram, BTreeMap::from([(0, 24)]));
        assert_eq!(c.ps_class_count, 4);
        assert_eq!(c.zariski_violations, 0);
        assert_eq!(e.tuples.len(), 24);
        let mut canon: Vec<_> = e.tuples.iter().map(canonical_form).collect();
        canon.dedup();
        assert_eq!(canon.len(), 4);
    }

    #[test]
    fn census_d3_oracle_counts() {
        // oracle: all 4-tuples of transpositions with identity product
        let trans: Vec<Permutation> = ["(0 1)", "(0 2)", "(1 2)"].iter().map(|s| perm(s, 3)).collect();
        let mut all = 0;
        let mut transitive = 0;
        for a in &trans {
            for b in &trans {
                for c in &trans {
                    for e in &trans {
                        if a.then(b).then(c).then(e).is_identity() {
                            all += 1;
                            let g = PermutationGroup::new(3, vec![*a, *b, *c, *e]).unwrap();
                            transitive += g.is_transitive() as u32;
                        }
                    }
                }
            }
        }
        assert_eq!((all, transitive), (27, 24));
        let mut spec = transposition_spec(3, 4);
        spec.require_transitive = false;
        let e = enumerate_covers(&spec, &SearchOptions::default()).unwrap();
        assert_eq!(e.census.tuple_count, 27);
    }

    #[test]
    fn up_to_conjugation_stream() {
        let mut spec = transposition_spec(3, 4);
        spec.up_to_conjugation = true;
        let e = enumerate_covers(
            &spec,
            &SearchOptions {
                collect_tuples: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(e.tuples.len(), 4);
        assert_eq!(e.census.genus_histogram, BTreeMap::from([(0, 4)]));
        assert!(e.tuples.windows(2).all(|w| w[0] < w[1]));
        for t in &e.tuples {
            assert_eq!(&canonical_form(t), t);
        }
    }

    #[test]
    fn pruning_does_not_change_counts() {
        // Transitive counts with pruning equal an unpruned count filtered afterwards.
        let mut spec = transposition_spec(5, 6);
        let pruned = enumerate_covers(&spec, &SearchOptions { collect_tuples: true, ..Default::default() }).unwrap();
        spec.require_transitive = false;
        let all = enumerate_covers(&spec, &SearchOptions { collect_tuples: true, ..Default::default() }).unwrap();
        let filtered: Vec<_> = all
            .tuples
            .into_iter()
            .filter(|t| t.monodromy_group().is_transitive())
            .collect();
        assert_eq!(pruned.tuples, filtered);
        assert!(pruned.census.nodes < all.census.nodes);
    }

    #[test]
    fn genus_filter() {
        let mut spec = EnumSpec::new(3, 4);
        spec.genus_filter = Some(0);
        spec.require_transitive = true;
        let e = enumerate_covers(&spec, &SearchOptions { collect_tuples: true, ..Default::default() }).unwrap();
        assert!(e.tuples.iter().all(|t| crate::cover::cover_genus(t).unwrap() == 0));
        assert_eq!(e.census.genus_histogram.keys().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(e.census.tuple_count, 24);
    }

    #[test]
    fn degree_six_has_no_ps_tuples() {
        let mut spec = EnumSpec::new(6, 3);
        spec.require_ps = true;
        let e = enumerate_covers(&spec, &SearchOptions::default()).unwrap();
        assert_eq!(e.census.tuple_count, 0);
        assert_eq!(e.census.nodes, 719 + 719 * 719);
    }

    #[test]
    fn ps_filter_keeps_every_ps_tuple() {
        let mut cases = vec![EnumSpec::new(4, 4), EnumSpec::new(5, 3)];
        let mut d8 = EnumSpec::new(8, 3);
        d8.cycle_types = Some(EnumSpec::parse_cycle_types("7,1|2,2,2,2|*").unwrap());
        cases.push(d8);
        for mut spec in cases {
            spec.up_to_conjugation = true;
            let all = enumerate_covers(&spec, &SearchOptions::default()).unwrap().census;
            spec.require_ps = true;
            let ps = enumerate_covers(&spec, &SearchOptions::default()).unwrap().census;
            assert!(all.ps_tuple_count > 0);
            assert_eq!(ps.tuple_count, all.ps_tuple_count);
            assert_eq!((ps.ps_tuple_count, ps.ps_class_count), (all.ps_tuple_count, all.ps_class_count));
            assert_eq!(ps.class_count, all.ps_class_count);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = EnumSpec::new(4, 4);
        let opts = SearchOptions { collect_tuples: true, ..Default::default() };
        let one = enumerate_covers(&spec, &opts).unwrap();
        let many = enumerate_covers(&spec, &SearchOptions { jobs: 4, ..opts }).unwrap();
        assert_eq!(one.census, many.census);
        assert_eq!(one.tuples, many.tuples);
    }

    #[test]
    fn budget_is_enforced() {
        let spec = EnumSpec::new(7, 4);
        let err = enumerate_covers(&spec, &SearchOptions::default()).unwrap_err();
        assert!(matches!(err, HurwitzError::SearchTooLarge { .. }));
        let spec = EnumSpec::new(4, 4);
        let err = enumerate_covers(&spec, &SearchOptions { node_budget: 100, ..Default::default() }).unwrap_err();
        assert!(matches!(err, HurwitzError::SearchTooLarge { .. }));
    }

    #[test]
    fn spec_validation() {
        let mut spec = EnumSpec::new(3, 2);
        spec.cycle_types = Some(vec![Some("2,1".parse().unwrap())]);
        assert!(matches!(enumerate_covers(&spec, &SearchOptions::default()), Err(HurwitzError::InvalidSpec(_))));
        spec.cycle_types = Some(vec![Some("2,2".parse().unwrap()), None]);
        assert!(matches!(enumerate_covers(&spec, &SearchOptions::default()), Err(HurwitzError::InvalidSpec(_))));
        assert!(enumerate_covers(&EnumSpec::new(11, 2), &SearchOptions::default()).is_err());
        assert!(enumerate_covers(&EnumSpec::new(3, 0), &SearchOptions::default()).is_err());
    }

    #[test]
    fn single_point_is_empty() {
        let e = enumerate_covers(&EnumSpec::new(3, 1), &SearchOptions::default()).unwrap();
        assert_eq!(e.census.tuple_count, 0);
        assert_eq!(e.census.image_dim, -2);
    }

    #[test]
    fn cycle_type_syntax() {
        let v = EnumSpec::parse_cycle_types("2,1|3|*").unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[0].as_ref().unwrap().parts(), &[2, 1]);
        assert!(v[2].is_none());
        assert!(EnumSpec::parse_cycle_types("2,x").is_err());
    }

    #[test]
    fn branch_point_bounds() {
        let b = max_branch_points(7, 2, 3).unwrap();
        assert_eq!((b.l_max, b.dim_bound, b.small_degree_warning), (14, 11, false));
        let b = max_branch_points(7, 3, 2).unwrap();
        assert_eq!((b.l_max, b.dim_bound), (10, 7));
        let b = max_branch_points(7, 5, 1).unwrap();
        assert_eq!((b.l_max, b.dim_bound), (11, 8));
        assert!(max_branch_points(7, 2, 2).unwrap().small_degree_warning);
        assert!(max_branch_points(7, 4, 1).is_err());
        assert!(max_branch_points(-1, 2, 1).is_err());
        assert!(max_branch_points(3, 2, 0).is_err());
    }

    #[test]
    fn census_json_shape() {
        let spec = transposition_spec(3, 4);
        let e = enumerate_covers(&spec, &SearchOptions::default()).unwrap();
        let v = serde_json::to_value(&e.census).unwrap();
        assert_eq!(v["genus_histogram"], serde_json::json!([[0, 24]]));
        assert_eq!(v["spec"]["cycle_types"], serde_json::json!(["2,1", "2,1", "2,1", "2,1"]));
        assert_eq!(v["image_dim"], 1);
    }
}
