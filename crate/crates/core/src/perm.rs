//! Permutations of `{0, .., d-1}` and their cycle structure.
//!
//! Composition is left-to-right throughout the crate: `p.compose(&q)` is the
//! permutation `x -> q(p(x))`. This is the order in which loops around branch
//! points are concatenated, so a branch tuple's product reads in tuple order.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest supported degree. Everything here is desk-scale.
pub const MAX_DEGREE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree {0} is out of range 1..={MAX_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("image sequence is not a bijection")]
    NotBijection,
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("point {0} repeated in cycle notation")]
    RepeatedPoint(usize),
    #[error("malformed cycle notation: {0}")]
    Syntax(String),
    #[error("parts {parts:?} do not form a partition of {degree}")]
    BadCycleType { parts: Vec<usize>, degree: usize },
}

/// A bijection of `{0, .., degree-1}`.
///
/// Images beyond `degree` are padded with the identity, so the derived
/// equality, hashing and ordering only ever see meaningful data. For equal
/// degrees the ordering is lexicographic on the image sequence.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    degree: u8,
    images: [u8; MAX_DEGREE],
}

const PADDED_IDENTITY: [u8; MAX_DEGREE] = {
    let mut a = [0u8; MAX_DEGREE];
    let mut i = 0;
    while i < MAX_DEGREE {
        a[i] = i as u8;
        i += 1;
    }
    a
};

fn check_degree(degree: usize) -> Result<(), PermError> {
    if degree == 0 || degree > MAX_DEGREE {
        Err(PermError::DegreeOutOfRange(degree))
    } else {
        Ok(())
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Result<Self, PermError> {
        check_degree(degree)?;
        Ok(Self::identity_unchecked(degree))
    }

    pub(crate) fn identity_unchecked(degree: usize) -> Self {
        Permutation {
            degree: degree as u8,
            images: PADDED_IDENTITY,
        }
    }

    /// Builds a permutation from its image sequence `[p(0), p(1), ..]`.
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        let degree = images.len();
        check_degree(degree)?;
        let mut seen = [false; MAX_DEGREE];
        let mut out = PADDED_IDENTITY;
        for (i, &img) in images.iter().enumerate() {
            if img >= degree || seen[img] {
                return Err(PermError::NotBijection);
            }
            seen[img] = true;
            out[i] = img as u8;
        }
        Ok(Permutation {
            degree: degree as u8,
            images: out,
        })
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        check_degree(degree)?;
        let mut out = PADDED_IDENTITY;
        let mut seen = [false; MAX_DEGREE];
        for cycle in cycles {
            for &x in cycle {
                if x >= degree {
                    return Err(PermError::PointOutOfRange { point: x, degree });
                }
                if seen[x] {
                    return Err(PermError::RepeatedPoint(x));
                }
                seen[x] = true;
            }
            for (i, &x) in cycle.iter().enumerate() {
                out[x] = cycle[(i + 1) % cycle.len()] as u8;
            }
        }
        Ok(Permutation {
            degree: degree as u8,
            images: out,
        })
    }

    /// Parses cycle notation such as `(0 1)(2 3)`; `()` is the identity.
    pub fn parse(text: &str, degree: usize) -> Result<Self, PermError> {
        check_degree(degree)?;
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(PermError::Syntax("empty string".into()));
        }
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| PermError::Syntax(format!("expected '(' at {rest:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| PermError::Syntax("unclosed '('".into()))?;
            let inner = &body[..close];
            if inner.contains('(') {
                return Err(PermError::Syntax("nested '('".into()));
            }
            let cycle = inner
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| PermError::Syntax(format!("bad point {tok:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            cycles.push(cycle);
            rest = body[close + 1..].trim_start();
        }
        // "()" is only meaningful on its own.
        if cycles.len() > 1 && cycles.iter().any(Vec::is_empty) {
            return Err(PermError::Syntax("empty cycle inside product".into()));
        }
        Self::from_cycles(degree, &cycles)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u8] {
        &self.images[..self.degree()]
    }

    pub fn is_identity(&self) -> bool {
        self.images == PADDED_IDENTITY
    }

    /// Left-to-right product: the result sends `x` to `other(self(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree != other.degree {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.then(other))
    }

    /// [`compose`](Self::compose) without the degree check.
    #[inline]
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree, other.degree);
        let mut out = PADDED_IDENTITY;
        for (o, &x) in out.iter_mut().zip(&self.images[..self.degree()]) {
            *o = other.images[x as usize];
        }
        Permutation {
            degree: self.degree,
            images: out,
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut out = PADDED_IDENTITY;
        for i in 0..self.degree() {
            out[self.images[i] as usize] = i as u8;
        }
        Permutation {
            degree: self.degree,
            images: out,
        }
    }

    /// Relabels the points by `tau`: the result sends `tau(x)` to `tau(self(x))`.
    #[inline]
    pub fn conjugate_by(&self, tau: &Permutation) -> Permutation {
        let mut out = PADDED_IDENTITY;
        for x in 0..self.degree() {
            out[tau.images[x] as usize] = tau.images[self.images[x] as usize];
        }
        Permutation {
            degree: self.degree,
            images: out,
        }
    }

    /// `g^-1 h^-1 g h`.
    pub fn commutator(&self, other: &Permutation) -> Permutation {
        self.inverse()
            .then(&other.inverse())
            .then(self)
            .then(other)
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = *self;
        let mut acc = Self::identity_unchecked(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// Disjoint cycles, each starting at its least point, ordered by that point.
    /// Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = [false; MAX_DEGREE];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths in no particular order; cheaper than [`cycle_data`](Self::cycle_data).
    pub(crate) fn cycle_lengths(&self) -> ([u8; MAX_DEGREE], usize) {
        let mut seen = [false; MAX_DEGREE];
        let mut lens = [0u8; MAX_DEGREE];
        let mut n = 0;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u8;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = self.apply(x);
            }
            lens[n] = len;
            n += 1;
        }
        (lens, n)
    }

    /// Number of cycles, fixed points included.
    pub fn orbit_count(&self) -> usize {
        self.cycle_lengths().1
    }

    pub fn fixed_points(&self) -> usize {
        (0..self.degree()).filter(|&x| self.apply(x) == x).count()
    }

    pub fn cycle_data(&self) -> CycleData {
        let (lens, n) = self.cycle_lengths();
        let mut parts: Vec<usize> = lens[..n].iter().map(|&l| l as usize).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let fixed_points = parts.iter().filter(|&&l| l == 1).count();
        CycleData {
            cycle_type: CycleType { parts },
            orbit_count: n,
            fixed_points,
        }
    }

    pub fn order(&self) -> u64 {
        let (lens, n) = self.cycle_lengths();
        lens[..n].iter().fold(1u64, |acc, &l| lcm(acc, l as u64))
    }

    /// `true` for odd permutations.
    pub fn is_odd(&self) -> bool {
        let (_, n) = self.cycle_lengths();
        (self.degree() - n) % 2 == 1
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            f.write_str("(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}[{}]", self.degree)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A partition of the degree by cycle lengths, parts in nonincreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    pub fn new(mut parts: Vec<usize>, degree: usize) -> Result<Self, PermError> {
        if parts.is_empty() || parts.contains(&0) || parts.iter().sum::<usize>() != degree {
            return Err(PermError::BadCycleType { parts, degree });
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn degree(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn orbit_count(&self) -> usize {
        self.parts.len()
    }

    /// The branch multiplicity `d - orb` of any permutation of this type.
    pub fn branch_multiplicity(&self) -> usize {
        self.degree() - self.parts.len()
    }

    /// Every permutation with this cycle type, sorted by image sequence.
    pub fn members(&self) -> Vec<Permutation> {
        let d = self.degree();
        let mut remaining = self.parts.clone();
        let mut out = Vec::new();
        let mut images = PADDED_IDENTITY;
        let mut used = [false; MAX_DEGREE];
        fill_cycles(d, &mut remaining, &mut used, &mut images, &mut out);
        out.sort_unstable();
        out
    }

    /// The lexicographically least member: fixed points first, then cycles
    /// of increasing length laid out on consecutive points.
    pub fn least_member(&self) -> Permutation {
        let d = self.degree();
        let mut images = PADDED_IDENTITY;
        let mut start = 0;
        for &len in self.parts.iter().rev() {
            for j in 0..len {
                images[start + j] = (start + (j + 1) % len) as u8;
            }
            start += len;
        }
        Permutation {
            degree: d as u8,
            images,
        }
    }
}

// Each cycle is anchored at the least unused point, so every member is
// produced exactly once.
fn fill_cycles(
    d: usize,
    remaining: &mut Vec<usize>,
    used: &mut [bool; MAX_DEGREE],
    images: &mut [u8; MAX_DEGREE],
    out: &mut Vec<Permutation>,
) {
    let Some(start) = (0..d).find(|&x| !used[x]) else {
        out.push(Permutation {
            degree: d as u8,
            images: *images,
        });
        return;
    };
    let mut tried = Vec::new();
    for idx in 0..remaining.len() {
        let len = remaining[idx];
        if tried.contains(&len) {
            continue;
        }
        tried.push(len);
        remaining.swap_remove(idx);
        used[start] = true;
        let mut cycle = vec![start];
        extend_cycle(d, len, &mut cycle, remaining, used, images, out);
        used[start] = false;
        remaining.push(len);
        let last = remaining.len() - 1;
        remaining.swap(idx, last);
    }
}

fn extend_cycle(
    d: usize,
    len: usize,
    cycle: &mut Vec<usize>,
    remaining: &mut Vec<usize>,
    used: &mut [bool; MAX_DEGREE],
    images: &mut [u8; MAX_DEGREE],
    out: &mut Vec<Permutation>,
) {
    if cycle.len() == len {
        for (i, &x) in cycle.iter().enumerate() {
            images[x] = cycle[(i + 1) % len] as u8;
        }
        fill_cycles(d, remaining, used, images, out);
        for &x in cycle.iter() {
            images[x] = x as u8;
        }
        return;
    }
    for x in cycle[0] + 1..d {
        if used[x] {
            continue;
        }
        used[x] = true;
        cycle.push(x);
        extend_cycle(d, len, cycle, remaining, used, images, out);
        cycle.pop();
        used[x] = false;
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for CycleType {
    type Err = PermError;

    /// Comma-separated parts, e.g. `2,1,1`.
    fn from_str(s: &str) -> Result<Self, PermError> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| PermError::Syntax(format!("bad cycle-type part {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let degree = parts.iter().sum();
        CycleType::new(parts, degree)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleData {
    pub cycle_type: CycleType,
    pub orbit_count: usize,
    pub fixed_points: usize,
}

/// All permutations of degree `d`, sorted by image sequence.
pub fn symmetric_group(d: usize) -> Result<Vec<Permutation>, PermError> {
    check_degree(d)?;
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..d).collect();
    loop {
        out.push(Permutation::from_images(&current)?);
        // next lexicographic permutation
        let Some(i) = (0..d.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..d).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    Ok(out)
}
