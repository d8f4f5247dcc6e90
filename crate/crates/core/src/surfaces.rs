//! Intersection theory on the smooth quadric and cubic surfaces, and the
//! invariants of complete-intersection curves lying on them.
//!
//! Basis conventions: the quadric uses the two rulings; the cubic uses the
//! pulled-back line class `L` followed by the exceptional curves `E₁..E₆`.

use std::fmt;
use std::sync::OnceLock;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, binomial, Rational};
use crate::moduli;

/// `h⁰(T_P³)`: the Euler sequence gives `4·h⁰(O(1)) - h⁰(O) = 16 - 1`.
pub const H0_TANGENT_P3: i64 = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("unsupported surface degree {0}; only 2 and 3 are handled")]
    UnsupportedDegree(i64),
    #[error("classes live on different surfaces")]
    LatticeMismatch,
    #[error("class has {found} coordinates, lattice rank is {rank}")]
    RankMismatch { found: usize, rank: usize },
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SurfaceKind {
    Quadric,
    Cubic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DivisorClass {
    surface: SurfaceKind,
    coords: Vec<i64>,
}

impl DivisorClass {
    pub fn surface(&self) -> SurfaceKind {
        self.surface
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn scaled(&self, k: i64) -> Self {
        DivisorClass {
            surface: self.surface,
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self, SurfaceError> {
        if self.surface != other.surface {
            return Err(SurfaceError::LatticeMismatch);
        }
        Ok(DivisorClass {
            surface: self.surface,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: &[&str] = match self.surface {
            SurfaceKind::Quadric => &["R1", "R2"],
            SurfaceKind::Cubic => &["L", "E1", "E2", "E3", "E4", "E5", "E6"],
        };
        let mut first = true;
        for (c, name) in self.coords.iter().zip(names) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{name}")?;
            } else {
                write!(f, "{sign}{mag}{name}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// An integral lattice with its Gram form and distinguished classes.
#[derive(Debug, Clone)]
pub struct SurfaceLattice {
    kind: SurfaceKind,
    gram: Vec<Vec<i64>>,
    lines: Vec<DivisorClass>,
    hyperplane: DivisorClass,
    canonical: DivisorClass,
}

impl SurfaceLattice {
    pub fn quadric() -> &'static SurfaceLattice {
        static Q: OnceLock<SurfaceLattice> = OnceLock::new();
        Q.get_or_init(|| {
            let class = |coords: Vec<i64>| DivisorClass {
                surface: SurfaceKind::Quadric,
                coords,
            };
            SurfaceLattice {
                kind: SurfaceKind::Quadric,
                gram: vec![vec![0, 1], vec![1, 0]],
                lines: vec![class(vec![1, 0]), class(vec![0, 1])],
                hyperplane: class(vec![1, 1]),
                canonical: class(vec![-2, -2]),
            }
        })
    }

    pub fn cubic() -> &'static SurfaceLattice {
        static C: OnceLock<SurfaceLattice> = OnceLock::new();
        C.get_or_init(|| {
            let class = |coords: Vec<i64>| DivisorClass {
                surface: SurfaceKind::Cubic,
                coords,
            };
            let mut gram = vec![vec![0; 7]; 7];
            gram[0][0] = 1;
            for (i, row) in gram.iter_mut().enumerate().skip(1) {
                row[i] = -1;
            }
            let unit = |i: usize| {
                let mut v = vec![0; 7];
                v[i] = 1;
                v
            };
            let mut lines = Vec::with_capacity(27);
            // E_i
            for i in 1..=6 {
                lines.push(class(unit(i)));
            }
            // F_ij = L - E_i - E_j
            for i in 1..=6 {
                for j in i + 1..=6 {
                    let mut v = unit(0);
                    v[i] = -1;
                    v[j] = -1;
                    lines.push(class(v));
                }
            }
            // G_j = 2L - sum_{i != j} E_i
            for j in 1..=6 {
                let mut v = vec![2, -1, -1, -1, -1, -1, -1];
                v[j] = 0;
                lines.push(class(v));
            }
            let hyperplane = class(vec![3, -1, -1, -1, -1, -1, -1]);
            let canonical = hyperplane.scaled(-1);
            SurfaceLattice {
                kind: SurfaceKind::Cubic,
                gram,
                lines,
                hyperplane,
                canonical,
            }
        })
    }

    /// The surface of degree `a` in P³.
    pub fn of_degree(a: i64) -> Result<&'static SurfaceLattice, SurfaceError> {
        match a {
            2 => Ok(Self::quadric()),
            3 => Ok(Self::cubic()),
            _ => Err(SurfaceError::UnsupportedDegree(a)),
        }
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn lines(&self) -> &[DivisorClass] {
        &self.lines
    }

    pub fn hyperplane(&self) -> &DivisorClass {
        &self.hyperplane
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    pub fn class(&self, coords: Vec<i64>) -> Result<DivisorClass, SurfaceError> {
        if coords.len() != self.rank() {
            return Err(SurfaceError::RankMismatch {
                found: coords.len(),
                rank: self.rank(),
            });
        }
        Ok(DivisorClass {
            surface: self.kind,
            coords,
        })
    }

    /// `D1ᵀ · G · D2`.
    pub fn intersect(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<i64, SurfaceError> {
        if d1.surface != self.kind || d2.surface != self.kind {
            return Err(SurfaceError::LatticeMismatch);
        }
        let mut total = 0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                total += d1.coords[i] * g * d2.coords[j];
            }
        }
        Ok(total)
    }

    /// The class of a complete intersection of the surface with a degree-`b`
    /// surface, `b·H`.
    pub fn complete_intersection(&self, b: i64) -> DivisorClass {
        self.hyperplane.scaled(b)
    }

    /// `1 + (C² + C·K) / 2`.
    pub fn adjunction_genus(&self, c: &DivisorClass) -> Result<i64, SurfaceError> {
        let twice = self.intersect(c, c)? + self.intersect(c, &self.canonical)?;
        if twice % 2 != 0 {
            return Err(SurfaceError::TheoremViolation(format!(
                "odd C² + C·K = {twice}"
            )));
        }
        Ok(1 + twice / 2)
    }
}

fn check_range(a: i64, b: i64) -> Result<(), SurfaceError> {
    if a < 2 || b < a {
        return Err(SurfaceError::InvalidRange(format!(
            "need b >= a >= 2 (got a={a}, b={b})"
        )));
    }
    Ok(())
}

/// `ab(a + b - 4)/2 + 1`.
pub fn genus_ci(a: i64, b: i64) -> Result<i64, SurfaceError> {
    check_range(a, b)?;
    let twice = a * b * (a + b - 4);
    if twice % 2 != 0 {
        return Err(SurfaceError::TheoremViolation(format!(
            "non-integral genus for ({a}, {b})"
        )));
    }
    Ok(twice / 2 + 1)
}

/// `h⁰(O_P³(t))`.
pub fn h0_p3(t: i64) -> i64 {
    if t < 0 {
        0
    } else {
        binomial(t + 3, 3)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gonality {
    pub gonality: i64,
    /// Most points of the curve on a single line lying on the surface.
    pub max_line_points: i64,
    /// First line class (in basis order) attaining the maximum.
    pub maximizer: DivisorClass,
    pub maximizer_count: usize,
}

/// Gonality `ab - l`, where `l` is the most points of the curve on a line:
/// either a line on the surface, or any other line, which meets the surface
/// (hence the curve) in at most `a` points.
pub fn gonality_ci(a: i64, b: i64) -> Result<Gonality, SurfaceError> {
    check_range(a, b)?;
    let lattice = SurfaceLattice::of_degree(a)?;
    let c = lattice.complete_intersection(b);
    let mut best: Option<(i64, &DivisorClass, usize)> = None;
    for line in lattice.lines() {
        let n = lattice.intersect(&c, line)?;
        match &mut best {
            Some((m, _, count)) if n == *m => *count += 1,
            Some((m, _, _)) if n < *m => {}
            _ => best = Some((n, line, 1)),
        }
    }
    let (on_surface, maximizer, maximizer_count) = best.expect("surfaces carry lines");
    let max_line_points = on_surface.max(a);
    Ok(Gonality {
        gonality: a * b - max_line_points,
        max_line_points,
        maximizer: maximizer.clone(),
        maximizer_count,
    })
}

/// Dimension of the Hilbert scheme of complete intersections of type `(a, b)`.
pub fn hilbert_dim(a: i64, b: i64) -> Result<i64, SurfaceError> {
    check_range(a, b)?;
    let dim = binomial(a + 3, 3) + binomial(b + 3, 3) - binomial(b - a + 3, 3) - 2 - h0_p3(a - b);
    let closed = image_dim_closed_form(a, b) + H0_TANGENT_P3;
    if Rational::from_integer(dim) != closed {
        return Err(SurfaceError::TheoremViolation(format!(
            "Hilbert dimension {dim} disagrees with closed form {closed} at ({a}, {b})"
        )));
    }
    Ok(dim)
}

/// `(a³ + 11a)/3 + (b²a - ba²)/2 + 2ba - 16 - h⁰(O(a - b))`.
pub fn image_dim_closed_form(a: i64, b: i64) -> Rational {
    Ratio::new(a.pow(3) + 11 * a, 3) + Ratio::new(b * b * a - b * a * a, 2)
        + Rational::from_integer(2 * b * a - 16 - h0_p3(a - b))
}

/// Lower bound for the dimension of the image in moduli: Hilbert scheme
/// dimension minus the fiber bound `h⁰(T_P³)`.
pub fn image_dim_lower(a: i64, b: i64) -> Result<i64, SurfaceError> {
    Ok(hilbert_dim(a, b)? - H0_TANGENT_P3)
}

/// `(a³ + 11a)/3 + (2b²a - 2ba² - b²a²)/4 + 3ba - 21 - h⁰(O(a - b))`, as printed.
pub fn c_lower_printed(a: i64, b: i64) -> Rational {
    Ratio::new(a.pow(3) + 11 * a, 3)
        + Ratio::new(2 * b * b * a - 2 * b * a * a - b * b * a * a, 4)
        + Rational::from_integer(3 * b * a - 21 - h0_p3(a - b))
}

/// `(18b - 3b²)/4 - 1`, the printed specialization at `a = 3`.
pub fn c_lower_printed_cubic(b: i64) -> Rational {
    Ratio::new(18 * b - 3 * b * b, 4) - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Gonality at most 4: every such curve is solvable.
    AllSolvable,
    /// The solvable sublocus has positive codimension.
    PositiveCodim,
    /// Gonality at least 5 but the bound is not positive.
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::AllSolvable => "AllSolvable",
            Classification::PositiveCodim => "PositiveCodim",
            Classification::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodimBound {
    /// `image_dim_lower - (g + 4)`.
    #[serde(serialize_with = "arith::serialize_rational")]
    pub derived: Rational,
    #[serde(serialize_with = "arith::serialize_rational")]
    pub stated: Rational,
    /// The `a = 3` specialization, when it applies.
    #[serde(serialize_with = "arith::serialize_opt_rational")]
    pub stated_cubic: Option<Rational>,
    /// `⌈derived⌉`.
    pub codim_int: i64,
    pub classification: Classification,
    /// Set when `stated` (or its specialization) differs from `derived`.
    pub discrepancy: bool,
}

pub fn c_lower(a: i64, b: i64) -> Result<CodimBound, SurfaceError> {
    check_range(a, b)?;
    let gon = gonality_ci(a, b)?.gonality;
    if gon <= 4 {
        let zero = Rational::from_integer(0);
        return Ok(CodimBound {
            derived: zero,
            stated: zero,
            stated_cubic: None,
            codim_int: 0,
            classification: Classification::AllSolvable,
            discrepancy: false,
        });
    }
    let g = genus_ci(a, b)?;
    let derived = Rational::from_integer(image_dim_lower(a, b)? - (g + 4));
    let stated = c_lower_printed(a, b);
    let stated_cubic = (a == 3).then(|| c_lower_printed_cubic(b));
    let discrepancy = stated != derived || stated_cubic.is_some_and(|s| s != derived);
    let classification = if derived > Rational::from_integer(0) {
        Classification::PositiveCodim
    } else {
        Classification::Inconclusive
    };
    Ok(CodimBound {
        derived,
        stated,
        stated_cubic,
        codim_int: derived.ceil().to_integer(),
        classification,
        discrepancy,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertPolynomial {
    /// Coefficient of `t`: the degree `ab`.
    pub leading: i64,
    /// `1 - g`.
    pub constant: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CIReport {
    pub a: i64,
    pub b: i64,
    pub genus: i64,
    pub hilbert_poly: HilbertPolynomial,
    pub gonality: i64,
    pub max_line_points: i64,
    pub maximizing_line: String,
    pub hilbert_dim: i64,
    pub h0_tangent: i64,
    pub image_dim_lower: i64,
    pub dim_mg: i64,
    #[serde(serialize_with = "arith::serialize_rational")]
    pub c_lower_derived: Rational,
    #[serde(serialize_with = "arith::serialize_rational")]
    pub c_lower_stated: Rational,
    #[serde(serialize_with = "arith::serialize_opt_rational")]
    pub c_lower_stated_cubic: Option<Rational>,
    pub codim_int: i64,
    pub classification: Classification,
    pub discrepancy: bool,
}

pub fn ci_report(a: i64, b: i64) -> Result<CIReport, SurfaceError> {
    let genus = genus_ci(a, b)?;
    let lattice = SurfaceLattice::of_degree(a)?;
    let by_lattice = lattice.adjunction_genus(&lattice.complete_intersection(b))?;
    if by_lattice != genus {
        return Err(SurfaceError::TheoremViolation(format!(
            "genus formula {genus} vs adjunction {by_lattice} at ({a}, {b})"
        )));
    }
    let gon = gonality_ci(a, b)?;
    let codim = c_lower(a, b)?;
    Ok(CIReport {
        a,
        b,
        genus,
        hilbert_poly: HilbertPolynomial {
            leading: a * b,
            constant: 1 - genus,
        },
        gonality: gon.gonality,
        max_line_points: gon.max_line_points,
        maximizing_line: gon.maximizer.to_string(),
        hilbert_dim: hilbert_dim(a, b)?,
        h0_tangent: H0_TANGENT_P3,
        image_dim_lower: image_dim_lower(a, b)?,
        dim_mg: moduli::dim_mg(genus),
        c_lower_derived: codim.derived,
        c_lower_stated: codim.stated,
        c_lower_stated_cubic: codim.stated_cubic,
        codim_int: codim.codim_int,
        classification: codim.classification,
        discrepancy: codim.discrepancy,
    })
}
