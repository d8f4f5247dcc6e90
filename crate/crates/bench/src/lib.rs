//! Shared fixtures for the benchmarks.

use zc_core::cover::BranchTuple;
use zc_core::hurwitz::{EnumSpec, SearchOptions};
use zc_core::perm::Permutation;

fn perm(text: &str, d: usize) -> Permutation {
    Permutation::parse(text, d).expect("fixture parses")
}

/// AGL(1,9) on GF(3)[x]/(x^2 - x - 1), points written in base 3.
pub fn agl_1_9() -> Vec<Permutation> {
    vec![perm("(0 1 2)(3 4 5)(6 7 8)", 9), perm("(1 3 4 7 2 6 8 5)", 9)]
}

pub fn s6() -> Vec<Permutation> {
    vec![perm("(0 1)", 6), perm("(0 1 2 3 4 5)", 6)]
}

/// A tuple in degree 9 whose first entry is a transposition, the worst case
/// for relabelling-based canonical forms.
pub fn wide_tuple() -> BranchTuple {
    let entries = vec![
        perm("(0 1)", 9),
        perm("(1 2 3 4 5 6 7 8)", 9),
        perm("(0 2)(3 5)", 9),
    ];
    let closing = entries
        .iter()
        .fold(Permutation::identity(9).unwrap(), |acc, p| acc.then(p))
        .inverse();
    let mut all = entries;
    all.push(closing);
    BranchTuple::new(9, all).expect("fixture is a branch tuple")
}

/// The full d = 6, l = 3 primitive solvable scan.
pub fn sextic_scan() -> (EnumSpec, SearchOptions) {
    let mut spec = EnumSpec::new(6, 3);
    spec.require_ps = true;
    (spec, SearchOptions::default())
}

/// A transposition-constrained census in degree 5, up to conjugation.
pub fn quintic_census(jobs: usize) -> (EnumSpec, SearchOptions) {
    let mut spec = EnumSpec::new(5, 5);
    spec.cycle_types = Some(EnumSpec::parse_cycle_types("2,1,1,1|2,1,1,1|4,1|*|*").expect("types parse"));
    spec.up_to_conjugation = true;
    let opts = SearchOptions {
        jobs,
        ..SearchOptions::default()
    };
    (spec, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use zc_core::group::{PermutationGroup, DEFAULT_ELEMENT_CAP};

    #[test]
    fn fixtures() {
        let g = PermutationGroup::new(9, agl_1_9()).unwrap();
        assert_eq!(g.order(DEFAULT_ELEMENT_CAP).unwrap(), 72);
        assert!(g.is_primitive() && g.is_solvable(DEFAULT_ELEMENT_CAP).unwrap());
        let s = PermutationGroup::new(6, s6()).unwrap();
        assert_eq!(s.order(DEFAULT_ELEMENT_CAP).unwrap(), 720);
        assert_eq!(wide_tuple().len(), 4);
    }
}
