use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use confring::action::{epsilon_apply, verify_action_properties, GroupElement};
use confring::assembly::{
    d_n_matrix, permanent_cycles, projective_cohomology, punctured_projective_cohomology,
    sphere_orbit_cohomology, GradedGroupTable, GroupEntry, PermanentCycles, TableCoeff,
};
use confring::expr::{self, Expr, Idx};
use confring::invariants::{invariant_presentation_check, invariants_match_prediction, SpaceKind};
use confring::linalg::rank;
use confring::presentations::{verify_relation_tables, RelationTable};
use confring::tc::{cat_tc_bounds, zcl, TcBudget, TcReport, ZclMode};
use confring::{Coeff, Error, Presentation};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "confring", version, about = "Cohomology rings of orbit configuration spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Coefficients: q, f3, f5, f7, f2 or z.
    #[arg(long, default_value = "q", global = true)]
    coeff: String,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BettiSpace {
    Orbit,
    Arnold,
    SphereOrbit,
    Rpn,
    RpnPunctured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Relations,
    Action,
    Invariants,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalOp {
    Normalize,
    Multiply,
    Act,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TcMode {
    Bounds,
    WitnessSearch,
    ExactSmall,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Tc,
    Zcl,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers or integral groups of a space.
    Betti {
        #[arg(long, value_enum)]
        space: BettiSpace,
        #[arg(long)]
        n: u32,
        /// Number of points (orbit ring).
        #[arg(long)]
        m: Option<u32>,
        /// Number of points.
        #[arg(long)]
        k: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        /// Random samples for the action suite.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Normalize, multiply or act on an element.
    Eval {
        expr: String,
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Number of points; inferred from the expression when omitted.
        #[arg(long)]
        m: Option<u32>,
        /// Use the Arnold ring instead of the orbit ring.
        #[arg(long)]
        arnold: bool,
        #[arg(long, value_enum)]
        op: Option<EvalOp>,
        /// Right factor for `--op multiply`.
        #[arg(long)]
        by: Option<String>,
        /// Group element as comma-separated indices, e.g. `1` or `1,3`.
        #[arg(long)]
        act: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Invariant subring against the predicted basis.
    Invariants {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        /// Use the subgroup for the punctured space.
        #[arg(long)]
        punctured: bool,
        #[command(flatten)]
        common: Common,
    },
    /// LS-category and higher topological complexity bounds.
    Tc {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, value_enum, default_value_t = TcMode::WitnessSearch)]
        mode: TcMode,
        #[arg(long, value_enum, default_value_t = Quantity::Tc)]
        quantity: Quantity,
        /// Largest tensor-power dimension to search.
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Differential and permanent cycles for the sphere fibration, even n.
    Spectral {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        common: Common,
    },
}

/// Result of a subcommand before printing.
struct Outcome {
    json: serde_json::Value,
    text: String,
    code: u8,
}

impl Outcome {
    fn new<T: Serialize>(value: &T, text: String, ok: bool) -> anyhow::Result<Outcome> {
        Ok(Outcome { json: serde_json::to_value(value)?, text, code: if ok { 0 } else { EXIT_VERIFY } })
    }
}

fn table_coeff(s: &str) -> anyhow::Result<TableCoeff> {
    s.parse::<TableCoeff>().map_err(|e| anyhow!(e))
}

fn field(s: &str) -> anyhow::Result<Coeff> {
    match table_coeff(s)? {
        TableCoeff::Field(c) => Ok(c),
        TableCoeff::Integers => Ok(Coeff::Rational),
    }
}

fn points(m: Option<u32>, k: Option<u32>) -> anyhow::Result<u32> {
    match (m, k) {
        (Some(m), None) | (None, Some(m)) => Ok(m),
        (Some(_), Some(_)) => Err(anyhow!(Error::InvalidParameter("give only one of --m and --k".into()))),
        (None, None) => Err(anyhow!(Error::InvalidParameter("missing --m or --k".into()))),
    }
}

#[derive(Serialize)]
struct BettiOut {
    #[serde(flatten)]
    table: GradedGroupTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    poincare: Option<Vec<usize>>,
}

fn ring_table(p: &Presentation, space: &str, coeff: &str) -> GradedGroupTable {
    let g = (p.n() - 1) as usize;
    let groups = p
        .poincare_polynomial()
        .into_iter()
        .enumerate()
        .filter(|(_, b)| *b > 0)
        .map(|(j, rank)| GroupEntry { degree: j * g, rank, torsion: Vec::new() })
        .collect();
    GradedGroupTable { space: space.into(), n: p.n(), k: p.points(), coeff: coeff.into(), groups }
}

fn cmd_betti(space: BettiSpace, n: u32, k: u32, c: &Common) -> anyhow::Result<Outcome> {
    let tc = table_coeff(&c.coeff)?;
    let (table, poincare) = match space {
        BettiSpace::Orbit | BettiSpace::Arnold => {
            let p = if space == BettiSpace::Orbit {
                Presentation::orbit(n, k, field(&c.coeff)?)?
            } else {
                Presentation::arnold(n, k, field(&c.coeff)?)?
            };
            let name = if space == BettiSpace::Orbit { "orbit" } else { "arnold" };
            (ring_table(&p, name, &tc.to_string()), Some(p.poincare_polynomial()))
        }
        BettiSpace::SphereOrbit => (sphere_orbit_cohomology(n, k, tc)?, None),
        BettiSpace::Rpn => (projective_cohomology(n, k, tc)?.table, None),
        BettiSpace::RpnPunctured => (punctured_projective_cohomology(n, k, tc)?.table, None),
    };
    let mut text = String::new();
    if let Some(p) = &poincare {
        text.push_str(&format!("poincare {p:?}\n"));
    }
    text.push_str(&table.to_string());
    Outcome::new(&BettiOut { table, poincare }, text, true)
}

fn relation_tables(n: u32) -> Vec<RelationTable> {
    if n % 2 == 1 {
        vec![RelationTable::Orbit, RelationTable::C]
    } else {
        vec![RelationTable::Orbit, RelationTable::D, RelationTable::I, RelationTable::ID0]
    }
}

fn cmd_verify(suite: Suite, n: u32, m: u32, samples: usize, c: &Common) -> anyhow::Result<Outcome> {
    let p = Presentation::orbit(n, m, field(&c.coeff)?)?;
    let mut report = serde_json::Map::new();
    let mut text = String::new();
    let mut failures: Vec<String> = Vec::new();
    if matches!(suite, Suite::Relations | Suite::All) {
        let mut out = Vec::new();
        for t in relation_tables(n) {
            let r = verify_relation_tables(&p, t)?;
            for id in r.identities.iter().filter(|i| !i.passed) {
                failures.push(format!("{:?} {}: {}", t, id.label, id.first_failure.clone().unwrap_or_default()));
            }
            text.push_str(&format!(
                "relations {:?}: {} ({} identities)\n",
                t,
                if r.passed { "pass" } else { "FAIL" },
                r.identities.len()
            ));
            out.push(r);
        }
        report.insert("relations".into(), serde_json::to_value(out)?);
    }
    if matches!(suite, Suite::Action | Suite::All) {
        let r = verify_action_properties(&p, samples, c.seed)?;
        failures.extend(r.failures.iter().map(|f| format!("action: {f}")));
        text.push_str(&format!("action: {}\n", if r.passed { "pass" } else { "FAIL" }));
        report.insert("action".into(), serde_json::to_value(r)?);
    }
    if matches!(suite, Suite::Invariants | Suite::All) {
        let mut out = Vec::new();
        for punctured in [false, true] {
            let kind = SpaceKind::for_parity(n, punctured);
            let r = invariants_match_prediction(&p, kind)?;
            for d in r.degrees.iter().filter(|d| !d.matches) {
                failures.push(format!("invariants {kind} degree {}: {} vs {}", d.degree, d.computed_dim, d.predicted_dim));
            }
            text.push_str(&format!("invariants {kind}: {} {:?}\n", if r.passed { "pass" } else { "FAIL" }, r.poincare));
            out.push(r);
        }
        report.insert("invariants".into(), serde_json::to_value(out)?);
        if n % 2 == 1 {
            let r = invariant_presentation_check(SpaceKind::OddFull, n, m)?;
            failures.extend(r.failures.iter().map(|f| format!("presentation: {f}")));
            text.push_str(&format!("arnold isomorphism: {}\n", if r.passed { "pass" } else { "FAIL" }));
            report.insert("presentation".into(), serde_json::to_value(r)?);
        }
    }
    let ok = failures.is_empty();
    report.insert("passed".into(), ok.into());
    report.insert("failures".into(), serde_json::to_value(&failures)?);
    for f in &failures {
        text.push_str(&format!("  failure: {f}\n"));
    }
    Outcome::new(&report, text, ok)
}

fn max_index(e: &Expr) -> Option<u32> {
    match e {
        Expr::Num { .. } => Some(0),
        Expr::Atom { idx, .. } => idx.iter().try_fold(0, |acc, i| match i {
            Idx::Lit(v) => Some(acc.max(v.unsigned_abs() as u32)),
            Idx::Var { .. } => None,
        }),
        Expr::Sum(xs) => xs.iter().try_fold(0, |acc, (_, x)| Some(acc.max(max_index(x)?))),
        Expr::Product(xs) => xs.iter().try_fold(0, |acc, x| Some(acc.max(max_index(x)?))),
        Expr::Pow(b, _, _) => max_index(b),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    src: &str,
    n: u32,
    m: Option<u32>,
    arnold: bool,
    op: Option<EvalOp>,
    by: Option<&str>,
    act: Option<&str>,
    c: &Common,
) -> anyhow::Result<Outcome> {
    let op = op.unwrap_or(match (act, by) {
        (Some(_), _) => EvalOp::Act,
        (None, Some(_)) => EvalOp::Multiply,
        _ => EvalOp::Normalize,
    });
    let m = match m {
        Some(m) => m,
        None => {
            let mut best = max_index(&expr::parse(src)?)
                .ok_or_else(|| anyhow!(Error::InvalidParameter("symbolic indices need --m".into())))?;
            if let Some(b) = by {
                best = best.max(max_index(&expr::parse(b)?).unwrap_or(0));
            }
            best.max(1)
        }
    };
    let coeff = field(&c.coeff)?;
    let p = if arnold { Presentation::arnold(n, m, coeff)? } else { Presentation::orbit(n, m, coeff)? };
    let x = expr::parse_element(&p, src)?;
    let result = match op {
        EvalOp::Normalize => x,
        EvalOp::Multiply => {
            let b = by.ok_or_else(|| anyhow!(Error::InvalidParameter("--op multiply needs --by".into())))?;
            p.try_multiply(&x, &expr::parse_element(&p, b)?)?
        }
        EvalOp::Act => {
            let spec = act.ok_or_else(|| anyhow!(Error::InvalidParameter("--op act needs --act".into())))?;
            let mut ls = Vec::new();
            for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
                ls.push(part.trim().parse::<u32>().map_err(|_| {
                    anyhow!(Error::InvalidParameter(format!("bad group index {part:?}")))
                })?);
            }
            epsilon_apply(&p, &GroupElement::from_indices(&ls)?, &x)?
        }
    };
    let s = result.to_string();
    Outcome::new(&serde_json::json!({ "n": n, "m": m, "result": s }), format!("{s}\n"), true)
}

fn cmd_invariants(n: u32, m: u32, punctured: bool, c: &Common) -> anyhow::Result<Outcome> {
    let p = Presentation::orbit(n, m, field(&c.coeff)?)?;
    let kind = SpaceKind::for_parity(n, punctured);
    let r = invariants_match_prediction(&p, kind)?;
    let mut text = format!("{kind} n={n} m={m}: poincare {:?}\n", r.poincare);
    for d in &r.degrees {
        text.push_str(&format!(
            "  grade {}: computed {} predicted {} {}\n",
            d.degree,
            d.computed_dim,
            d.predicted_dim,
            if d.matches { "ok" } else { "MISMATCH" }
        ));
    }
    let ok = r.passed;
    Outcome::new(&r, text, ok)
}

fn tc_text(r: &TcReport) -> String {
    let mut t = format!(
        "{} s={}: lower {} upper {} exact {}\n",
        r.space,
        r.s,
        r.lower,
        r.upper,
        r.exact.map_or("unknown".to_string(), |e| e.to_string())
    );
    for w in &r.witness {
        t.push_str(&format!("  {w}\n"));
    }
    t
}

fn cmd_tc(
    n: u32,
    k: u32,
    s: u32,
    mode: TcMode,
    quantity: Quantity,
    budget: Option<usize>,
    c: &Common,
) -> anyhow::Result<Outcome> {
    let mut b = TcBudget::default();
    if let Some(d) = budget {
        b.max_tensor_dim = d;
    }
    if s == 1 || mode == TcMode::Bounds {
        if quantity == Quantity::Zcl {
            bail!(Error::InvalidParameter("zcl needs s >= 2 and a search mode".into()));
        }
        let r = cat_tc_bounds(n, k, s, None)?;
        return Outcome::new(&r, tc_text(&r), true);
    }
    let zmode = if mode == TcMode::ExactSmall { ZclMode::ExactSmall } else { ZclMode::WitnessSearch };
    let p = Presentation::orbit(n, k, field(&c.coeff)?)?;
    match zcl(&p, s, zmode, &b) {
        Ok(z) => {
            let r = match quantity {
                Quantity::Zcl => z,
                Quantity::Tc => TcReport { witness: z.witness, ..cat_tc_bounds(n, k, s, Some(z.lower))? },
            };
            Outcome::new(&r, tc_text(&r), true)
        }
        Err(Error::BudgetExceeded(msg)) => {
            let r = cat_tc_bounds(n, k, s, None)?;
            eprintln!("budget exhausted: {msg}; reporting bounds without search");
            let mut o = Outcome::new(&r, tc_text(&r), true)?;
            o.code = EXIT_BUDGET;
            Ok(o)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct SpectralOut {
    n: u32,
    k: u32,
    permanent_cycles: PermanentCycles,
    /// `d_n_ranks[j]` is the rank of `d_n` out of fiber grade `j`.
    d_n_ranks: Vec<usize>,
    table: GradedGroupTable,
}

fn cmd_spectral(n: u32, k: u32, c: &Common) -> anyhow::Result<Outcome> {
    let tc = table_coeff(&c.coeff)?;
    let pc = permanent_cycles(n, k)?;
    let f = field(&c.coeff)?;
    let mut d_n_ranks = Vec::new();
    for j in 0..k as usize {
        let mat = d_n_matrix(n, k, j * (n - 1) as usize, f)?;
        d_n_ranks.push(if mat.rows() == 0 || mat.cols() == 0 { 0 } else { rank(&mat)? });
    }
    let table = sphere_orbit_cohomology(n, k, tc)?;
    let mut text = format!("permanent cycles dims {:?}\nd_n ranks {:?}\n", pc.dims, d_n_ranks);
    for (j, b) in pc.bases.iter().enumerate() {
        text.push_str(&format!("  K^{j}: {}\n", if b.is_empty() { "0".to_string() } else { b.join(", ") }));
    }
    text.push_str(&table.to_string());
    Outcome::new(&SpectralOut { n, k, permanent_cycles: pc, d_n_ranks, table }, text, true)
}

fn run(cli: Cli) -> anyhow::Result<(Outcome, Format)> {
    let (out, common) = match &cli.command {
        Command::Betti { space, n, m, k, common } => (cmd_betti(*space, *n, points(*m, *k)?, common)?, common),
        Command::Verify { suite, n, m, samples, common } => (cmd_verify(*suite, *n, *m, *samples, common)?, common),
        Command::Eval { expr, n, m, arnold, op, by, act, common } => {
            (cmd_eval(expr, *n, *m, *arnold, *op, by.as_deref(), act.as_deref(), common)?, common)
        }
        Command::Invariants { n, m, punctured, common } => (cmd_invariants(*n, *m, *punctured, common)?, common),
        Command::Tc { n, k, s, mode, quantity, budget, common } => {
            (cmd_tc(*n, *k, *s, *mode, *quantity, *budget, common)?, common)
        }
        Command::Spectral { n, k, common } => (cmd_spectral(*n, *k, common)?, common),
    };
    Ok((out, common.format))
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("CONFRING_THREADS") {
        let t: usize = v.parse().with_context(|| format!("CONFRING_THREADS={v:?} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded(_)) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli) {
        Ok((out, format)) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string(&out.json).expect("json")),
                Format::Table => print!("{}", out.text),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
