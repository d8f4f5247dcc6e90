//! Branch tuples and the numerical invariants of the covers they describe.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, Rational};
use crate::group::{GroupError, PermutationGroup};
use crate::perm::{PermError, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("entry {index} has degree {found}, expected {expected}")]
    DegreeMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("entry {index} is the identity")]
    IdentityEntry { index: usize },
    #[error("product of the entries is {product}, not the identity")]
    ProductNotIdentity { product: String },
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Monodromy around `l` branch points: `(σ₁, .., σ_l)`, none the identity,
/// with left-to-right product equal to the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchTuple {
    degree: usize,
    entries: Vec<Permutation>,
}

impl BranchTuple {
    pub fn new(degree: usize, entries: Vec<Permutation>) -> Result<Self, CoverError> {
        validate_branch_tuple(degree, entries)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_parts(degree: usize, entries: Vec<Permutation>) -> Self {
        BranchTuple { degree, entries }
    }

    /// Parses entries in cycle notation joined by `;`. An empty string is the
    /// empty tuple.
    pub fn parse(text: &str, degree: usize) -> Result<Self, CoverError> {
        let entries = if text.trim().is_empty() {
            Vec::new()
        } else {
            text.split(';')
                .map(|s| Permutation::parse(s, degree))
                .collect::<Result<Vec<_>, _>>()?
        };
        Permutation::identity(degree)?;
        validate_branch_tuple(degree, entries)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn entries(&self) -> &[Permutation] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The group generated by the entries (trivial for the empty tuple).
    pub fn monodromy_group(&self) -> PermutationGroup {
        let gens = if self.entries.is_empty() {
            vec![Permutation::identity_unchecked(self.degree)]
        } else {
            self.entries.clone()
        };
        PermutationGroup::new(self.degree, gens).expect("validated degrees")
    }

    /// Moves the first `k` entries to the back. The product stays the identity.
    pub fn rotated(&self, k: usize) -> Self {
        let mut entries = self.entries.clone();
        if !entries.is_empty() {
            let k = k % entries.len();
            entries.rotate_left(k);
        }
        BranchTuple::from_parts(self.degree, entries)
    }

    /// Simultaneous relabelling of every entry by `tau`.
    pub fn conjugated_by(&self, tau: &Permutation) -> Self {
        BranchTuple::from_parts(
            self.degree,
            self.entries.iter().map(|s| s.conjugate_by(tau)).collect(),
        )
    }

    /// `b(y_i) = d - orb(σ_i)` for each branch point.
    pub fn branch_multiplicities(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|s| self.degree - s.orbit_count())
            .collect()
    }
}

impl fmt::Display for BranchTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Serialize for BranchTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn validate_branch_tuple(
    degree: usize,
    entries: Vec<Permutation>,
) -> Result<BranchTuple, CoverError> {
    let mut product = Permutation::identity(degree)?;
    for (index, s) in entries.iter().enumerate() {
        if s.degree() != degree {
            return Err(CoverError::DegreeMismatch {
                index,
                expected: degree,
                found: s.degree(),
            });
        }
        if s.is_identity() {
            return Err(CoverError::IdentityEntry { index });
        }
        product = product.then(s);
    }
    if !product.is_identity() {
        return Err(CoverError::ProductNotIdentity {
            product: product.to_string(),
        });
    }
    Ok(BranchTuple { degree, entries })
}

/// Riemann–Hurwitz: `2g - 2 = -2d + r` with `r = Σ (d - orb(σ_i))`.
pub fn cover_genus(t: &BranchTuple) -> Result<i64, CoverError> {
    let r: usize = t.branch_multiplicities().iter().sum();
    if !r.is_multiple_of(2) {
        return Err(CoverError::TheoremViolation(format!(
            "odd ramification total {r} for a product-identity tuple"
        )));
    }
    Ok(1 - t.degree as i64 + r as i64 / 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub degree: usize,
    pub l: usize,
    pub genus: i64,
    pub ramification_total: usize,
    pub branch_multiplicities: Vec<usize>,
    pub transitive: bool,
    pub primitive: bool,
    pub solvable: bool,
    pub ps: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_power: Option<(u64, u32)>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "arith::serialize_opt_rational"
    )]
    pub zariski_bound: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zariski_pass: Option<Vec<bool>>,
}

impl CoverReport {
    /// `false` only for a primitive solvable cover with a branch point below
    /// the bound.
    pub fn zariski_holds(&self) -> bool {
        self.zariski_pass
            .as_ref()
            .is_none_or(|v| v.iter().all(|&ok| ok))
    }
}

pub fn classify_cover(t: &BranchTuple, cap: usize) -> Result<CoverReport, CoverError> {
    let genus = cover_genus(t)?;
    let branch_multiplicities = t.branch_multiplicities();
    let ramification_total = branch_multiplicities.iter().sum();
    let group = t.monodromy_group();
    let transitive = group.is_transitive();
    let primitive = group.is_primitive();
    if transitive && genus < 0 {
        return Err(CoverError::TheoremViolation(format!(
            "connected cover with genus {genus}"
        )));
    }
    let solvable = group.is_solvable(cap)?;
    let ps = primitive && solvable;

    let (mut prime_power, mut zariski_bound, mut zariski_pass) = (None, None, None);
    if ps {
        let d = t.degree as u64;
        let (p, k) = arith::prime_power(d).ok_or_else(|| {
            CoverError::TheoremViolation(format!(
                "primitive solvable monodromy in degree {d}, not a prime power"
            ))
        })?;
        let bound = Rational::new((d - d / p) as i64, 2);
        zariski_pass = Some(
            branch_multiplicities
                .iter()
                .map(|&b| Rational::from_integer(b as i64) >= bound)
                .collect(),
        );
        prime_power = Some((p, k));
        zariski_bound = Some(bound);
    }

    Ok(CoverReport {
        degree: t.degree,
        l: t.len(),
        genus,
        ramification_total,
        branch_multiplicities,
        transitive,
        primitive,
        solvable,
        ps,
        prime_power,
        zariski_bound,
        zariski_pass,
    })
}
