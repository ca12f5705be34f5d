//! Command-line front end. [`run`] parses arguments, dispatches, writes the
//! report and returns the process exit code:
//!
//! * `0` success
//! * `1` a negative mathematical answer, with a valid report
//! * `2` invalid input
//! * `3` numerically inconclusive, or glue infeasible after all retries

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cosets::{
    double_cosets, left_cosets, pm_double_cosets, right_cosets, CosetPartition, FiniteGroup, GroupSpec, PartitionJson,
    Subgroup,
};
use crate::dline::{
    compose_diffeo, diffeo_classes, phi_ex, psi, same_structure, ClassesJson, DiffeoJson, StructureAnswer,
    StructureSpec, Verdict,
};
use crate::exact::Real;
use crate::germs::{
    compose, in_diff, invert, make_wa, smoothness_at_zero, Germ, GermMap, Jet, Order, Provenance, SmoothnessReport,
};
use crate::join::{
    uniform_tolerances, verify_ck_numeric_refined, CollapseOrder, JoinReport, JoinSpec, MapSpec, SmoothCert,
    DEFAULT_TOLERANCES,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dline", version, about = "Smooth structures on the line with two origins")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Double, (D,±) double, left or right coset partition of a finite group.
    Cosets(CosetsArgs),
    /// Diffeomorphisms between the structures of w_a and w_b.
    Classify(ClassifyArgs),
    /// Germ algebra on germ JSON files.
    #[command(subcommand)]
    Germ(GermCommand),
    /// Questions about structures of special minimal atlases.
    #[command(subcommand)]
    Structure(StructureCommand),
    /// The order-two self-diffeomorphism of the structure of w_a.
    Psi(PsiArgs),
    /// Collapse a chain of interval charts to one chart.
    Join(JoinArgs),
    /// Finite-difference C^k certificate for a piecewise or sampled map.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CosetsArgs {
    /// Group JSON: {"elements", "table", "subgroups"}.
    pub group: PathBuf,
    /// Left subgroup: a name from "subgroups" or comma-separated elements.
    #[arg(long = "C")]
    pub c: Option<String>,
    /// Right subgroup, same forms as --C.
    #[arg(long = "D")]
    pub d: Option<String>,
    /// Partition into D h D ∪ D h⁻¹ D instead.
    #[arg(long)]
    pub pm: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, required_unless_present = "grid")]
    pub a: Option<Real>,
    #[arg(long, required_unless_present = "grid")]
    pub b: Option<Real>,
    #[arg(long, default_value = "1")]
    pub k: Order,
    /// Classify every ordered pair from this comma-separated list.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["a", "b"])]
    pub grid: Option<Vec<Real>>,
}

#[derive(Debug, Subcommand)]
pub enum GermCommand {
    /// outer ∘ inner.
    Compose { outer: PathBuf, inner: PathBuf },
    Invert { germ: PathBuf },
    /// Jet at 0 and the C^k report.
    Jet {
        germ: PathBuf,
        #[arg(long, default_value = "2")]
        k: Order,
    },
    /// Print w_a.
    Wa {
        #[arg(long)]
        a: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum StructureCommand {
    /// Whether P_h and P_g define the same C^k structure.
    Same {
        /// Germ JSON or {"special_atlas": {"h": germ}, "k": ..}.
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        g: PathBuf,
        /// Defaults to the order in the h file, then 1.
        #[arg(long)]
        k: Option<Order>,
    },
}

#[derive(Debug, Args)]
pub struct PsiArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value = "2")]
    pub k: Order,
    /// Check ψ∘ψ = id, the presentations and the V-chart certificate.
    #[arg(long)]
    pub selfcheck: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OrderArg {
    LeftToRight,
    MiddleOut,
}

#[derive(Debug, Args)]
pub struct JoinArgs {
    pub spec: PathBuf,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Uniform certification tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// {"pieces": [...]} or {"samples": [...], "seams": [...]}.
    pub map: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Uniform tolerance; per-order defaults 1e-6, 1e-5, 1e-3, 1e-2 otherwise.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Halve grid and difference steps this many times.
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::GlueInfeasible { .. } | Error::Indeterminate(_) | Error::Verification(_) => EXIT_INDETERMINATE,
        Error::Chain { source, .. } => exit_code(source),
        Error::IncompatiblePresentations { .. } => EXIT_NEGATIVE,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Cosets(a) => cosets(a, cli.json, out),
        Command::Classify(a) => classify(a, cli.json, out),
        Command::Germ(g) => germ(g, cli.json, out),
        Command::Structure(StructureCommand::Same { h, g, k }) => structure_same(h, g, *k, cli.json, out),
        Command::Psi(a) => psi_cmd(a, cli.json, out),
        Command::Join(a) => join(a, cli.json, out),
        Command::Verify(a) => verify(a, cli.json, out),
    }
}

fn subgroup_arg(g: &FiniteGroup, named: &BTreeMap<String, Subgroup>, arg: &str) -> Result<Subgroup> {
    if let Some(s) = named.get(arg) {
        return Ok(*s);
    }
    let names: Vec<&str> = arg.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    g.subgroup_by_names(&names)
        .map_err(|e| Error::Input(format!("--C/--D {arg:?} is neither a named subgroup nor a subgroup: {e}")))
}

fn cosets(a: &CosetsArgs, json: bool, out: &mut dyn Write) -> Result<i32> {
    let spec: GroupSpec = read_json(&a.group)?;
    let (g, named) = spec.build().map_err(|e| Error::Input(e.to_string()))?;
    let c = a.c.as_deref().map(|s| subgroup_arg(&g, &named, s)).transpose()?;
    let d = a.d.as_deref().map(|s| subgroup_arg(&g, &named, s)).transpose()?;
    let partition: CosetPartition = match (a.pm, c, d) {
        (true, None, Some(d)) => pm_double_cosets(&g, &d)?,
        (true, Some(c), Some(d)) if c == d => pm_double_cosets(&g, &d)?,
        (true, ..) => return Err(Error::Input("--pm takes --D (and optionally an equal --C)".into())),
        (false, Some(c), Some(d)) => double_cosets(&g, &c, &d)?,
        (false, Some(c), None) => right_cosets(&g, &c)?,
        (false, None, Some(d)) => left_cosets(&g, &d)?,
        (false, None, None) => return Err(Error::Input("give --C, --D or both".into())),
    };
    let report: PartitionJson = partition.to_json(&g);
    if json {
        emit(out, &report)?;
    } else {
        writeln!(out, "{}", partition.render(&g))?;
    }
    Ok(EXIT_OK)
}

/// One line of `classify --grid`.
#[derive(Debug, Serialize, Deserialize)]
pub struct GridEntry {
    pub a: String,
    pub b: String,
    pub diffeomorphic: bool,
    pub cells: Vec<String>,
}

fn classify(a: &ClassifyArgs, json: bool, out: &mut dyn Write) -> Result<i32> {
    if let Some(grid) = &a.grid {
        let pairs: Vec<(&Real, &Real)> = grid.iter().flat_map(|x| grid.iter().map(move |y| (x, y))).collect();
        let entries = pairs
            .par_iter()
            .map(|(x, y)| {
                let c = crate::cosets::classify_wa_pair(x, y, a.k)?;
                Ok(GridEntry {
                    a: c.a.clone(),
                    b: c.b.clone(),
                    diffeomorphic: c.diffeomorphic(),
                    cells: c.cells.iter().filter(|(_, &v)| v).map(|(k, _)| k.label().to_string()).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if json {
            emit(out, &entries)?;
        } else {
            for e in &entries {
                writeln!(out, "a={:<8} b={:<8} {}", e.a, e.b, if e.cells.is_empty() { "-".into() } else { e.cells.join(" ") })?;
            }
        }
        return Ok(EXIT_OK);
    }
    let (x, y) = (a.a.as_ref().expect("required"), a.b.as_ref().expect("required"));
    let classes = diffeo_classes(x, y, a.k)?;
    let c = &classes.classification;
    if json {
        let report: ClassesJson = classes.to_json();
        emit(out, &report)?;
    } else {
        writeln!(out, "W_{} -> W_{}  (C^{})", c.a, c.b, c.k)?;
        write!(out, "{}", c.table())?;
        writeln!(out, "fixing: {}   exchanging: {}", c.fix_type, c.ex_type)?;
        if c.diffeomorphic() {
            for w in &classes.witnesses {
                writeln!(out, "{:<4} {:?}: {}", w.cell.label(), w.kind, w.diffeo)?;
            }
        } else {
            writeln!(
                out,
                "not diffeomorphic: both intersection types are {} ({} and {})",
                c.fix_type, c.fix_type, c.ex_type
            )?;
        }
    }
    Ok(if c.diffeomorphic() { EXIT_OK } else { EXIT_NEGATIVE })
}

/// A germ that may only be available numerically.
#[derive(Debug, Serialize, Deserialize)]
pub struct GermResult {
    pub exact: bool,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub germ: Option<Germ>,
    /// `[x, h(x)]` at a few points on each side.
    pub samples: Vec<[f64; 2]>,
}

fn germ_result(h: &GermMap) -> GermResult {
    let provenance = match h.provenance() {
        Provenance::Exact => "exact",
        Provenance::ComposedNumerically => "composed_numerically",
        Provenance::InvertedNumerically => "inverted_numerically",
        Provenance::Sampled => "sampled",
    };
    let xs = [-0.5, -0.1, -0.01, 0.01, 0.1, 0.5];
    GermResult {
        exact: h.is_exact(),
        provenance: provenance.into(),
        germ: h.as_exact().cloned(),
        samples: xs.iter().map(|&x| [x, h.eval(x)]).collect(),
    }
}

fn print_germ(out: &mut dyn Write, h: &GermMap, json: bool) -> Result<()> {
    if json {
        return emit(out, &germ_result(h));
    }
    match h.as_exact() {
        Some(g) => writeln!(out, "{g}")?,
        None => {
            let r = germ_result(h);
            writeln!(out, "numeric germ ({}, {:?})", r.provenance, h.orientation())?;
            for [x, y] in r.samples {
                writeln!(out, "  h({x}) = {y}")?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JetReport {
    pub jet: Jet,
    pub smoothness: SmoothnessReport,
}

fn germ(cmd: &GermCommand, json: bool, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        GermCommand::Compose { outer, inner } => {
            let (g, h): (Germ, Germ) = (read_json(outer)?, read_json(inner)?);
            print_germ(out, &compose(&g.into(), &h.into()), json)?;
        }
        GermCommand::Invert { germ } => {
            let g: Germ = read_json(germ)?;
            print_germ(out, &invert(&g.into()), json)?;
        }
        GermCommand::Jet { germ, k } => {
            let g: GermMap = read_json::<Germ>(germ)?.into();
            let (n, _) = k.resolve()?;
            let report = JetReport { jet: Jet::of(&g, n)?, smoothness: smoothness_at_zero(&g, *k)? };
            if json {
                emit(out, &report)?;
            } else {
                let fmt = |v: &[Option<f64>]| {
                    v.iter().map(|d| d.map_or("none".to_string(), |x| format!("{x}"))).collect::<Vec<_>>().join(", ")
                };
                writeln!(out, "x<0: {}", fmt(report.jet.neg()))?;
                writeln!(out, "x>0: {}", fmt(report.jet.pos()))?;
                writeln!(out, "{}", report.smoothness)?;
            }
        }
        GermCommand::Wa { a } => {
            let g = make_wa(*a)?;
            if json {
                emit(out, &g)?;
            } else {
                writeln!(out, "{g}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AtlasInput {
    Spec(StructureSpec),
    Germ(Germ),
}

fn read_atlas(path: &Path) -> Result<(Germ, Option<Order>)> {
    Ok(match read_json::<AtlasInput>(path)? {
        AtlasInput::Spec(s) => (s.special_atlas.h, s.k),
        AtlasInput::Germ(g) => (g, None),
    })
}

fn structure_same(h: &Path, g: &Path, k: Option<Order>, json: bool, out: &mut dyn Write) -> Result<i32> {
    let ((h, kh), (g, kg)) = (read_atlas(h)?, read_atlas(g)?);
    let k = k.or(kh).or(kg).unwrap_or(Order::Finite(1));
    let answer: StructureAnswer = same_structure(&h.into(), &g.into(), k)?;
    if json {
        emit(out, &answer)?;
    } else {
        writeln!(out, "{}", answer.verdict)?;
        writeln!(out, "  g∘h⁻¹: {}", answer.forward)?;
        writeln!(out, "  inverse: {}", answer.inverse)?;
    }
    Ok(match answer.verdict {
        Verdict::True => EXIT_OK,
        Verdict::False => EXIT_NEGATIVE,
        Verdict::Indeterminate => EXIT_INDETERMINATE,
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PsiReport {
    pub a: f64,
    pub k: Order,
    pub psi: DiffeoJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selfcheck: Option<PsiCheck>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PsiCheck {
    /// `ψ ∘ ψ` is the identity of the structure.
    pub involution: bool,
    pub exchanges_origins: bool,
    /// `U`-presentation is `-√a·x` and `V`-presentation is `-x/√a`.
    pub presentations: bool,
    /// The `V`-chart presentation is in `Diff^k(R,0)`.
    pub v_presentation_in_diff: bool,
    pub pass: bool,
}

fn psi_cmd(a: &PsiArgs, json: bool, out: &mut dyn Write) -> Result<i32> {
    let p = psi(a.a, a.k)?;
    let selfcheck = if a.selfcheck {
        let s = a.a.sqrt();
        // A few ulps: √a is rounded once, its reciprocal a second time.
        let ulps = 4.0 * f64::EPSILON * s.max(1.0 / s);
        let same = |m: &GermMap, c: f64| m.as_exact().is_some_and(|g| g.approx_eq(&Germ::linear(c).unwrap(), ulps));
        let involution = compose_diffeo(&p, &p)?.is_identity();
        let exchanges = p.origin_action() == crate::dline::OriginAction::Exchange;
        let presentations = same(p.u_presentation(), -s) && same(p.v_presentation(), -1.0 / s);
        let v_in_diff = in_diff(&phi_ex(&p)?, a.k)?;
        Some(PsiCheck {
            involution,
            exchanges_origins: exchanges,
            presentations,
            v_presentation_in_diff: v_in_diff,
            pass: involution && exchanges && presentations && v_in_diff,
        })
    } else {
        None
    };
    let pass = selfcheck.as_ref().is_none_or(|c| c.pass);
    let report = PsiReport { a: a.a, k: a.k, psi: p.to_json(), selfcheck };
    if json {
        emit(out, &report)?;
    } else {
        writeln!(out, "psi: {p}")?;
        if let Some(c) = &report.selfcheck {
            writeln!(out, "  psi∘psi = id: {}", c.involution)?;
            writeln!(out, "  exchanges origins: {}", c.exchanges_origins)?;
            writeln!(out, "  presentations -sqrt(a)x, -x/sqrt(a): {}", c.presentations)?;
            writeln!(out, "  V presentation in Diff^{}: {}", a.k, c.v_presentation_in_diff)?;
        }
    }
    Ok(if pass { EXIT_OK } else { EXIT_NEGATIVE })
}

fn join(a: &JoinArgs, json: bool, out: &mut dyn Write) -> Result<i32> {
    let mut spec: JoinSpec = read_json(&a.spec)?;
    if let Some(o) = a.order {
        spec.order = Some(match o {
            OrderArg::LeftToRight => CollapseOrder::LeftToRight,
            OrderArg::MiddleOut => CollapseOrder::MiddleOut,
        });
    }
    spec.k = a.k.or(spec.k);
    spec.tolerance = a.tol.or(spec.tolerance);
    let (_, report): (_, JoinReport) = spec.run()?;
    if let Some(path) = &a.out {
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    if json {
        emit(out, &report)?;
    } else {
        writeln!(
            out,
            "joined {} charts into one chart on ({}; {}), C^{} {}",
            report.charts.len(),
            report.image[0],
            report.image[1],
            report.k,
            if report.certified { "certified" } else { "NOT certified" }
        )?;
        for s in &report.steps {
            let eps = s.eps.map_or("identity transition".to_string(), |e| format!("eps = {e}"));
            writeln!(out, "  + chart {} on the {}: {eps}; p {}, q {}", s.chart, s.side, pass(&s.p), pass(&s.q))?;
        }
        for c in &report.charts {
            writeln!(out, "  chart {} {:?}: presentation {}", c.index, c.image, pass(&c.cert))?;
        }
    }
    Ok(if report.certified { EXIT_OK } else { EXIT_NEGATIVE })
}

fn pass(c: &SmoothCert) -> &'static str {
    if c.pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn verify(a: &VerifyArgs, json: bool, out: &mut dyn Write) -> Result<i32> {
    let spec: MapSpec = read_json(&a.map)?;
    let map = spec.to_seamed()?;
    let tol = a.tol.map(uniform_tolerances).unwrap_or_else(|| DEFAULT_TOLERANCES.to_vec());
    let cert = verify_ck_numeric_refined(&*map, a.k, &tol, a.refine)?;
    if json {
        emit(out, &cert)?;
    } else {
        writeln!(out, "C^{}: {}", cert.order, pass(&cert))?;
        for s in &cert.seams {
            writeln!(out, "  seam {}: left {:?} right {:?}", s.x, s.left, s.right)?;
        }
        writeln!(out, "  max residuals {:?} (tolerances {:?})", cert.max_residuals, cert.tolerances)?;
        writeln!(out, "  min derivative {}", cert.min_derivative)?;
    }
    Ok(if cert.pass { EXIT_OK } else { EXIT_NEGATIVE })
}
