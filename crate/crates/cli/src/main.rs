//! `drinfeld`: construct, inspect, transform and judge finite-index subgroups
//! of `SL_2(F_q[t])` and `GL_2(F_q[t])`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drinfeld_core::algebra::{Field, Poly};
use drinfeld_core::autos::refute_genuineness;
use drinfeld_core::genuine::{self, facts_lookup, Ambient, FactQuery};
use drinfeld_core::io::{verdict_json, scan_json, AutoSpecFile, Construction, SubgroupFile};
use drinfeld_core::matrices::{Mat2, Mode};
use drinfeld_core::oracles;
use drinfeld_core::subgroups::SubgroupHandle;
use drinfeld_core::suite::{run_suite, RunConfig, Status};
use drinfeld_core::{Caps, Error, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "drinfeld", version, about = "Finite-index subgroups of SL2 and GL2 over F_q[t]")]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = RunConfig::default().seed)]
    seed: u64,
    /// Largest finite group that may be saturated.
    #[arg(long, global = true, default_value_t = Caps::default().group_order)]
    group_order: u64,
    /// Largest residue enumeration.
    #[arg(long, global = true, default_value_t = Caps::default().enumeration)]
    enumeration: u64,
    /// Candidate automorphisms tried by a refutation search.
    #[arg(long, global = true, default_value_t = Caps::default().search_budget)]
    budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Subgroup construction and invariants.
    #[command(subcommand)]
    Subgroup(SubgroupCmd),
    /// Automorphism specs.
    #[command(subcommand)]
    Auto(AutoCmd),
    /// Genuineness verdicts.
    #[command(subcommand)]
    Genuine(GenuineCmd),
    /// Reference facts.
    #[command(subcommand)]
    Facts(FactsCmd),
    /// Brute-force reference computations.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Run the reproduction suite.
    #[command(alias = "verify")]
    VerifyPaper,
}

#[derive(Args)]
struct SpecArg {
    /// Subgroup spec file.
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    PrincipalCongruence,
    AbelianQuasiLevel,
}

#[derive(Subcommand)]
enum SubgroupCmd {
    /// Write an explicit subgroup spec for a standard construction.
    New {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        q: u32,
        /// Modulus (principal congruence) or conductor (abelian quotient).
        #[arg(long)]
        modulus: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Sl)]
        mode: ModeArg,
        /// Comma-separated basis of the quasi-level modulo the conductor.
        #[arg(long, value_delimiter = ',')]
        basis: Vec<String>,
    },
    /// Quasi-level and level.
    Ql(SpecArg),
    /// Level.
    Level(SpecArg),
    /// Index and normality.
    Index(SpecArg),
    /// Whether the subgroup is a congruence subgroup.
    Congruence(SpecArg),
    /// The normal core, as an explicit spec.
    Core(SpecArg),
}

#[derive(Subcommand)]
enum AutoCmd {
    /// Check an automorphism spec against an ambient mode.
    Validate {
        #[arg(long)]
        auto: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Sl)]
        mode: ModeArg,
    },
    /// The image of a subgroup under an automorphism.
    Apply {
        #[arg(long)]
        auto: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Search for an automorphism carrying the subgroup onto a congruence
    /// subgroup.
    Refute(SpecArg),
}

#[derive(Subcommand)]
enum GenuineCmd {
    Verdict(SpecArg),
    /// Verdicts over all small representable subgroups.
    Scan {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Sl)]
        mode: ModeArg,
        #[arg(long, default_value_t = 4)]
        max_index: u64,
        #[arg(long, default_value = "t^4")]
        conductor: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AmbientArg {
    G,
    Gamma,
}

#[derive(Subcommand)]
enum FactsCmd {
    Get {
        /// One of m_sl2, rank_zero, n0, dim_a_n0, nncs, ncs.
        key: String,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long)]
        delta: Option<u32>,
        #[arg(long, value_enum)]
        ambient: Option<AmbientArg>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Sl,
    Gl,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Sl => Mode::SL,
            ModeArg::Gl => Mode::GL,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Sl2,
    Gl2,
}

#[derive(Args)]
struct GroupSel {
    #[arg(long, value_enum, default_value_t = GroupArg::Sl2)]
    group: GroupArg,
    #[arg(long)]
    modulus: String,
    #[arg(long)]
    q: u32,
}

impl GroupSel {
    fn resolve(&self) -> Result<(Field, Poly, Mode)> {
        let k = Field::of_order(self.q)?;
        let f = Poly::parse_expr(&self.modulus, &k)?;
        let mode = match self.group {
            GroupArg::Sl2 => Mode::SL,
            GroupArg::Gl2 => Mode::GL,
        };
        Ok((k, f, mode))
    }
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Order of the matrix group, by running through all quadruples.
    Enumerate(GroupSel),
    /// Order of the derived subgroup, from all commutators.
    Derived(GroupSel),
    /// Order of the subgroup generated by matrices given as a JSON list of
    /// `[a, b, c, d]` polynomial strings.
    Closure {
        #[command(flatten)]
        group: GroupSel,
        #[arg(long)]
        gens: String,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_subgroup(path: &Path, caps: Caps) -> Result<SubgroupHandle> {
    SubgroupFile::from_json(&read(path)?, caps)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data")
}

fn spec_file(v: Value) -> Report {
    Report { file: true, ..v.into() }
}

fn ql_value(h: &SubgroupHandle) -> Result<Value> {
    let ql = h.quasi_level()?;
    let (basis, conductor) = ql.describe();
    let k = h.field();
    Ok(json!({
        "quasi_level": {"basis": basis, "conductor": conductor, "codim": ql.codim()},
        "level": ql.level().to_digits(k),
    }))
}

/// A report together with whether it describes a success.
struct Report {
    value: Value,
    text: Option<String>,
    ok: bool,
    cap: bool,
    /// Spec files are printed as JSON regardless of `--json`.
    file: bool,
}

impl From<Value> for Report {
    fn from(value: Value) -> Self {
        Report { value, text: None, ok: true, cap: false, file: false }
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let caps = Caps { group_order: cli.group_order, enumeration: cli.enumeration, search_budget: cli.budget };
    Ok(match &cli.command {
        Command::Subgroup(cmd) => match cmd {
            SubgroupCmd::New { kind, q, modulus, mode, basis } => {
                let k = Field::of_order(*q)?;
                let digits = |s: &str| Poly::parse_expr(s, &k).map(|p| p.to_digits(&k));
                let construction = match kind {
                    Kind::PrincipalCongruence => Construction::PrincipalCongruence {
                        field: k.to_string(),
                        modulus: digits(modulus)?,
                        mode: (*mode).into(),
                    },
                    Kind::AbelianQuasiLevel => Construction::AbelianQuasiLevel {
                        field: k.to_string(),
                        conductor: digits(modulus)?,
                        basis: basis.iter().map(|b| digits(b)).collect::<Result<_>>()?,
                    },
                };
                let h = SubgroupFile::Built { construction }.load(caps)?;
                spec_file(to_value(&SubgroupFile::save(&h)))
            }
            SubgroupCmd::Ql(a) => ql_value(&load_subgroup(&a.spec, caps)?)?.into(),
            SubgroupCmd::Level(a) => {
                let h = load_subgroup(&a.spec, caps)?;
                json!({"level": h.quasi_level()?.level().to_digits(h.field())}).into()
            }
            SubgroupCmd::Index(a) => {
                let h = load_subgroup(&a.spec, caps)?;
                json!({"index": h.index(), "normal": h.is_normal(), "core_index": h.core_index()}).into()
            }
            SubgroupCmd::Congruence(a) => {
                json!({"congruence": load_subgroup(&a.spec, caps)?.is_congruence()?}).into()
            }
            SubgroupCmd::Core(a) => {
                let core = load_subgroup(&a.spec, caps)?.core()?;
                spec_file(to_value(&SubgroupFile::save(&core)))
            }
        },
        Command::Auto(cmd) => match cmd {
            AutoCmd::Validate { auto, mode } => {
                AutoSpecFile::from_json(&read(auto)?)?.validate((*mode).into())?;
                json!({"valid": true}).into()
            }
            AutoCmd::Apply { auto, spec } => {
                let a = AutoSpecFile::from_json(&read(auto)?)?;
                let h = load_subgroup(spec, caps)?;
                a.validate(h.mode())?;
                let moved = a.apply(&h)?;
                let mut v = ql_value(&moved)?;
                v["index"] = json!(moved.index());
                v["subgroup"] = to_value(&SubgroupFile::save(&moved));
                v.into()
            }
            AutoCmd::Refute(a) => {
                let h = load_subgroup(&a.spec, caps)?;
                let w = refute_genuineness(&h, caps.search_budget)?;
                json!({"witness": w.map(|a| to_value(&AutoSpecFile::save(&a)))}).into()
            }
        },
        Command::Genuine(cmd) => match cmd {
            GenuineCmd::Verdict(a) => {
                let h = load_subgroup(&a.spec, caps)?;
                verdict_json(&genuine::verdict(&h, caps.search_budget)?).into()
            }
            GenuineCmd::Scan { q, mode, max_index, conductor } => {
                let k = Field::of_order(*q)?;
                let c = Poly::parse_expr(conductor, &k)?;
                let rep = genuine::low_index_scan(&k, (*mode).into(), *max_index, &c, caps, caps.search_budget)?;
                Report { text: Some(scan_text(&rep)), ..scan_json(&rep).into() }
            }
        },
        Command::Facts(FactsCmd::Get { key, q, g, delta, ambient }) => {
            let query = FactQuery {
                q: *q,
                g: *g,
                delta: *delta,
                ambient: ambient.map(|a| match a {
                    AmbientArg::G => Ambient::G,
                    AmbientArg::Gamma => Ambient::Gamma,
                }),
            };
            json!({"key": key, "value": facts_lookup(key, query)?}).into()
        }
        Command::Oracle(cmd) => match cmd {
            OracleCmd::Enumerate(sel) => {
                let (k, f, mode) = sel.resolve()?;
                json!({"order": oracles::brute_matrix_group(&k, &f, mode)?.len()}).into()
            }
            OracleCmd::Derived(sel) => {
                let (k, f, mode) = sel.resolve()?;
                json!({"derived_order": oracles::derived_order_brute(&k, &f, mode)?}).into()
            }
            OracleCmd::Closure { group, gens } => {
                let (k, f, mode) = group.resolve()?;
                let ms: Vec<Vec<String>> =
                    serde_json::from_str(gens).map_err(|e| Error::Parse(format!("--gens: {e}")))?;
                let r = oracles::NaiveRing::new(&k, &f)?;
                let gs = ms
                    .iter()
                    .map(|m| {
                        let x = r.reduce_mat(&Mat2::parse(m, &k)?);
                        if !r.admits(&x, mode) {
                            return Err(Error::Precondition(format!("{m:?} is not in the group")));
                        }
                        Ok(x)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let lim = caps.group_limit() as usize;
                let c = oracles::naive_closure(r.identity(), &gs, |a, b| r.mat_mul(a, b), lim)?;
                json!({"order": c.len()}).into()
            }
        },
        Command::VerifyPaper => {
            let report = run_suite(&RunConfig { caps, seed: cli.seed });
            let skipped = report.results.iter().any(|r| r.status == Status::Skipped);
            let failed = report.results.iter().any(|r| r.status == Status::Fail);
            Report {
                value: to_value(&report),
                text: Some(report.render()),
                ok: report.all_passed(),
                cap: skipped && !failed,
                file: false,
            }
        }
    })
}

fn render_text(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, x)| match x {
                Value::String(s) => format!("{k}: {s}\n"),
                other => format!("{k}: {other}\n"),
            })
            .collect(),
        other => format!("{other}\n"),
    }
}

fn scan_text(rep: &genuine::ScanReport) -> String {
    let mut out = String::from("index  normal  congruence  verdict       description\n");
    for r in &rep.rows {
        out += &format!(
            "{:<6} {:<7} {:<11} {:<13} {}\n",
            r.index,
            r.normal,
            r.congruence,
            r.verdict.label(),
            r.description
        );
    }
    let show = |v: Option<u64>| v.map_or("none".to_string(), |x| x.to_string());
    out += &format!("min non-congruence: {}\n", show(rep.min_noncongruence));
    out += &format!("min normal non-congruence: {}\n", show(rep.min_normal_noncongruence));
    out += &format!("min genuine (within the scanned class): {}\n", show(rep.min_genuine_in_class));
    out += &format!(
        "min normal genuine (within the scanned class): {}\n",
        show(rep.min_normal_genuine_in_class)
    );
    out
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            if cli.json || rep.file {
                emit(&format!("{}\n", serde_json::to_string_pretty(&rep.value).expect("plain data")));
            } else if let Some(t) = &rep.text {
                emit(t);
            } else {
                emit(&render_text(&rep.value));
            }
            match (rep.ok, rep.cap) {
                (true, _) => ExitCode::SUCCESS,
                (false, true) => ExitCode::from(2),
                (false, false) => ExitCode::from(1),
            }
        }
        Err(e) => {
            if cli.json {
                emit(&format!("{}\n", json!({"error": e.to_string(), "cap": e.is_cap()})));
            }
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap() { 2 } else { 1 })
        }
    }
}
