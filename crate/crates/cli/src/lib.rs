//! The `zc` command line: argument parsing, dispatch and report output.
//!
//! Exit codes: 0 success, 1 invalid input, 2 resource limit, 3 internal
//! consistency failure.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use zc_core::arith::{prime_power, rational_string};
use zc_core::cover::{classify_cover, BranchTuple, CoverError};
use zc_core::group::{GroupError, PermutationGroup, DEFAULT_ELEMENT_CAP};
use zc_core::hurwitz::{self, EnumSpec, HurwitzError, SearchOptions, DEFAULT_NODE_BUDGET};
use zc_core::moduli::{self, ModuliError};
use zc_core::perm::{PermError, Permutation, MAX_DEGREE};
use zc_core::surfaces::{self, SurfaceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// Overrides the enumeration node budget.
pub const NODE_BUDGET_ENV: &str = "ZC_NODE_BUDGET";

pub const K3_TABLE_HEADER: &str = "g\tdim_Pg\tdim_image\tcodim_bound\tstated_bound";
pub const SURFACE_TABLE_HEADER: &str =
    "a\tb\tgenus\tgonality\thilbert_dim\timage_dim_lower\tc_derived\tc_stated\tclassification\tdiscrepancy";

#[derive(Parser, Debug)]
#[command(name = "zc", version, about = "Monodromy, Hurwitz and moduli-dimension calculators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Permutation groups given by generators
    #[command(subcommand)]
    Group(GroupCmd),
    /// Branched covers given by monodromy tuples
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Enumeration of monodromy tuples
    #[command(subcommand)]
    Hurwitz(HurwitzCmd),
    /// Dimension counts on moduli of curves
    #[command(subcommand)]
    Moduli(ModuliCmd),
    /// Complete-intersection curves on quadric and cubic surfaces
    #[command(subcommand)]
    Surface(SurfaceCmd),
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Order, orbits, primitivity, derived series, minimal normal subgroups
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=MAX_DEGREE as i64))]
        degree: u8,
        /// Generators separated by ';'
        #[arg(long)]
        gens: String,
        #[arg(long, default_value_t = DEFAULT_ELEMENT_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand, Debug)]
enum CoverCmd {
    /// Genus, branch multiplicities and monodromy classification
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=MAX_DEGREE as i64))]
        degree: u8,
        /// Entries separated by ';', product must be the identity
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = DEFAULT_ELEMENT_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand, Debug)]
enum HurwitzCmd {
    /// Exhaustive census of tuples with prescribed data
    Enumerate(EnumerateArgs),
    /// Least simultaneous conjugate of a tuple
    Canonical {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=MAX_DEGREE as i64))]
        degree: u8,
        #[arg(long)]
        tuple: String,
    },
    /// Largest branch-point count for a primitive solvable cover of degree p^k
    MaxBranch {
        #[arg(long, value_parser = clap::value_parser!(i64).range(0..))]
        g: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=60))]
        k: u32,
    },
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=hurwitz::MAX_ENUM_DEGREE as i64))]
    degree: u8,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..=64))]
    points: u16,
    /// Per-point cycle types, e.g. "2,1|2,1|*"
    #[arg(long)]
    cycle_types: Option<String>,
    #[arg(long)]
    require_transitive: bool,
    #[arg(long)]
    require_ps: bool,
    #[arg(long, allow_hyphen_values = true)]
    genus: Option<i64>,
    #[arg(long = "up-to-conj")]
    up_to_conj: bool,
    /// Print tuples (or class representatives) one per line before the census
    #[arg(long)]
    stream: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..=1024))]
    jobs: u16,
    #[arg(long, default_value_t = DEFAULT_ELEMENT_CAP)]
    cap: usize,
}

#[derive(Subcommand, Debug)]
enum ModuliCmd {
    /// Brill–Noether number
    Bn {
        #[arg(long)]
        g: i64,
        #[arg(long)]
        r: i64,
        #[arg(long)]
        d: i64,
    },
    /// Dimension of the k-gonal locus
    Gonal {
        #[arg(long)]
        g: i64,
        #[arg(long)]
        k: i64,
    },
    /// Dimension bound for families with a primitive solvable cover
    PsBound {
        #[arg(long)]
        g: i64,
    },
    /// Loci of curves on K3 surfaces
    K3 {
        #[arg(long, required_unless_present = "table")]
        g: Option<i64>,
        /// TSV over a genus range
        #[arg(long, requires_all = ["gmin", "gmax"])]
        table: bool,
        #[arg(long)]
        gmin: Option<i64>,
        #[arg(long)]
        gmax: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum SurfaceCmd {
    /// Full report for one (a, b)
    Report {
        #[arg(long)]
        a: i64,
        #[arg(long, required_unless_present = "table")]
        b: Option<i64>,
        /// TSV for b = a ..= bmax
        #[arg(long, requires = "bmax")]
        table: bool,
        #[arg(long)]
        bmax: Option<i64>,
    },
    /// TSV for b = a ..= bmax
    Table {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        bmax: i64,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<PermError> for Failure {
    fn from(e: PermError) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        let code = match e {
            GroupError::CapExceeded { .. } => EXIT_LIMIT,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CoverError> for Failure {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::TheoremViolation(_) => Failure {
                code: EXIT_VIOLATION,
                message: e.to_string(),
            },
            CoverError::Group(g) => g.into(),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

impl From<HurwitzError> for Failure {
    fn from(e: HurwitzError) -> Self {
        match e {
            HurwitzError::SearchTooLarge { .. } => Failure {
                code: EXIT_LIMIT,
                message: e.to_string(),
            },
            HurwitzError::Cover(c) => c.into(),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

impl From<ModuliError> for Failure {
    fn from(e: ModuliError) -> Self {
        let code = match e {
            ModuliError::TheoremViolation(_) => EXIT_VIOLATION,
            ModuliError::InvalidInput(_) => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SurfaceError> for Failure {
    fn from(e: SurfaceError) -> Self {
        let code = match e {
            SurfaceError::TheoremViolation(_) => EXIT_VIOLATION,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::invalid(format!("write failed: {e}"))
    }
}

/// Runs the command line `args` (including the program name), writing the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INVALID
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Group(GroupCmd::Classify { degree, gens, cap }) => {
            let report = group_report(degree as usize, &gens, cap)?;
            emit_json(out, &report)
        }
        Command::Cover(CoverCmd::Classify { degree, tuple, cap }) => {
            let t = parse_tuple(&tuple, degree as usize)?;
            emit_json(out, &classify_cover(&t, cap)?)
        }
        Command::Hurwitz(cmd) => hurwitz_cmd(cmd, out),
        Command::Moduli(cmd) => moduli_cmd(cmd, out),
        Command::Surface(cmd) => surface_cmd(cmd, out),
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    writeln!(out, "{text}")?;
    Ok(())
}

fn parse_tuple(text: &str, degree: usize) -> Result<BranchTuple, Failure> {
    BranchTuple::parse(text, degree).map_err(|e| Failure::invalid(format!("--tuple: {e}")))
}

#[derive(Serialize)]
struct MinimalNormalReport {
    order: usize,
    generators: Vec<Permutation>,
    elementary_abelian_p: Option<u64>,
    regular: bool,
}

#[derive(Serialize)]
struct GroupReport {
    degree: usize,
    generators: Vec<Permutation>,
    order: usize,
    orbits: Vec<Vec<usize>>,
    transitive: bool,
    primitive: bool,
    solvable: bool,
    derived_series: Vec<usize>,
    minimal_normal: Vec<MinimalNormalReport>,
    /// Most fixed points of a nonidentity element.
    max_fixed_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    prime_power: Option<(u64, u32)>,
}

fn group_report(degree: usize, gens: &str, cap: usize) -> Result<GroupReport, Failure> {
    let generators = gens
        .split(';')
        .map(|g| Permutation::parse(g, degree))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::invalid(format!("--gens: {e}")))?;
    let group = PermutationGroup::new(degree, generators.clone())
        .map_err(|e| Failure::invalid(format!("--gens: {e}")))?;
    let order = group.order(cap)?;
    let series = group.derived_series(cap)?;
    let minimal_normal = group
        .minimal_normal_subgroups(cap)?
        .into_iter()
        .map(|m| {
            Ok(MinimalNormalReport {
                order: m.group.order(cap)?,
                generators: m.group.generators().to_vec(),
                elementary_abelian_p: m.elementary_abelian_p,
                regular: m.regular,
            })
        })
        .collect::<Result<Vec<_>, GroupError>>()?;
    let max_fixed_points = group
        .elements(cap)?
        .iter()
        .filter(|x| !x.is_identity())
        .map(Permutation::fixed_points)
        .max()
        .unwrap_or(0);
    Ok(GroupReport {
        degree,
        generators,
        order,
        orbits: group.orbits(),
        transitive: group.is_transitive(),
        primitive: group.is_primitive(),
        solvable: series.solvable,
        derived_series: series
            .series
            .iter()
            .map(|g| g.order(cap))
            .collect::<Result<_, _>>()?,
        minimal_normal,
        max_fixed_points,
        prime_power: prime_power(degree as u64),
    })
}

fn node_budget() -> Result<u64, Failure> {
    match std::env::var(NODE_BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::invalid(format!("{NODE_BUDGET_ENV}: not a node count: {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_NODE_BUDGET),
        Err(e) => Err(Failure::invalid(format!("{NODE_BUDGET_ENV}: {e}"))),
    }
}

fn hurwitz_cmd(cmd: HurwitzCmd, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        HurwitzCmd::Enumerate(args) => {
            let cycle_types = args
                .cycle_types
                .as_deref()
                .map(EnumSpec::parse_cycle_types)
                .transpose()
                .map_err(|e| Failure::invalid(format!("--cycle-types: {e}")))?;
            let spec = EnumSpec {
                cycle_types,
                require_transitive: args.require_transitive,
                require_ps: args.require_ps,
                genus_filter: args.genus,
                up_to_conjugation: args.up_to_conj,
                ..EnumSpec::new(args.degree as usize, args.points as usize)
            };
            let opts = SearchOptions {
                jobs: args.jobs as usize,
                node_budget: node_budget()?,
                element_cap: args.cap,
                collect_tuples: args.stream,
            };
            let e = hurwitz::enumerate_covers(&spec, &opts)?;
            for t in &e.tuples {
                writeln!(out, "{t}")?;
            }
            emit_json(out, &e.census)
        }
        HurwitzCmd::Canonical { degree, tuple } => {
            let t = parse_tuple(&tuple, degree as usize)?;
            writeln!(out, "{}", hurwitz::canonical_form(&t))?;
            Ok(())
        }
        HurwitzCmd::MaxBranch { g, p, k } => emit_json(out, &hurwitz::max_branch_points(g, p, k)?),
    }
}

#[derive(Serialize)]
struct BnReport {
    g: i64,
    r: i64,
    d: i64,
    brill_noether: i64,
}

fn moduli_cmd(cmd: ModuliCmd, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        ModuliCmd::Bn { g, r, d } => emit_json(
            out,
            &BnReport {
                g,
                r,
                d,
                brill_noether: moduli::brill_noether(g, r, d)?,
            },
        ),
        ModuliCmd::Gonal { g, k } => emit_json(out, &moduli::gonal_stratum_dim(g, k)?),
        ModuliCmd::PsBound { g } => emit_json(out, &moduli::ps_dim_bound(g)?),
        ModuliCmd::K3 { g, table, gmin, gmax } => {
            if !table {
                let g = g.expect("clap enforces --g");
                return emit_json(out, &moduli::k3_report(g)?);
            }
            let (lo, hi) = (gmin.expect("clap"), gmax.expect("clap"));
            if lo > hi {
                return Err(Failure::invalid(format!("--gmin {lo} exceeds --gmax {hi}")));
            }
            writeln!(out, "{K3_TABLE_HEADER}")?;
            for g in lo..=hi {
                let r = moduli::k3_report(g)?;
                let codim = r.codim_bound.map_or_else(|| "-".to_string(), |c| c.to_string());
                let stated = if r.stated_bound.is_empty() {
                    "-".to_string()
                } else {
                    r.stated_bound
                        .iter()
                        .map(i64::to_string)
                        .collect::<Vec<_>>()
                        .join(",")
                };
                writeln!(out, "{}\t{}\t{}\t{codim}\t{stated}", r.g, r.dim_pg, r.dim_image)?;
            }
            Ok(())
        }
    }
}

fn surface_table(a: i64, bmax: i64, out: &mut dyn Write) -> Result<(), Failure> {
    if bmax < a {
        return Err(Failure::invalid(format!("--bmax {bmax} is below --a {a}")));
    }
    writeln!(out, "{SURFACE_TABLE_HEADER}")?;
    for b in a..=bmax {
        let r = surfaces::ci_report(a, b)?;
        writeln!(
            out,
            "{a}\t{b}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.genus,
            r.gonality,
            r.hilbert_dim,
            r.image_dim_lower,
            rational_string(&r.c_lower_derived),
            rational_string(&r.c_lower_stated),
            r.classification,
            r.discrepancy
        )?;
    }
    Ok(())
}

fn surface_cmd(cmd: SurfaceCmd, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        SurfaceCmd::Report { a, b, table, bmax } => {
            if table {
                surface_table(a, bmax.expect("clap enforces --bmax"), out)
            } else {
                emit_json(out, &surfaces::ci_report(a, b.expect("clap enforces --b"))?)
            }
        }
        SurfaceCmd::Table { a, bmax } => surface_table(a, bmax, out),
    }
}
