//! Batch command-line front end. Exit codes: 0 success, 1 domain error,
//! 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{
    asymptotic_report, best_lower_bound, best_upper_bound, bound_table, build_witness, fmt_rat, parse_rational,
    BoundError, BoundResult, Recipe,
};
use crate::constructor::{compose_decompositions, compose_decompositions_tower, toom_construct};
use crate::gf_core::{field_of_order, prime_power};
use crate::tensor_decomp::{
    brute_force_rank, decomposition_from_json, decomposition_to_json, BilinearDecomposition, SearchOutcome,
    DEFAULT_BUDGET,
};
use crate::towers::{check_lemma_inequalities, FamilyKind, TowerFamily};

pub const BUDGET_ENV: &str = "BILMULT_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "bilmult", version, about = "Bilinear multiplication algorithms and bounds over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    GsT2,
    GsT3,
    KummerP2,
    KummerP,
}

impl From<FamilyArg> for FamilyKind {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::GsT2 => FamilyKind::GsT2,
            FamilyArg::GsT3 => FamilyKind::GsT3,
            FamilyArg::KummerP2 => FamilyKind::KummerP2,
            FamilyArg::KummerP => FamilyKind::KummerP,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best lower and upper bound for mu_q(n).
    Bound {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Bounds for n = 1..=n_max.
    Table {
        #[arg(long)]
        q: u64,
        #[arg(long = "n-max")]
        n_max: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit a verified decomposition for F_{q^n}/F_q.
    Construct {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compose two decomposition files (order is detected).
    Compose {
        file1: PathBuf,
        file2: PathBuf,
        /// Keep the product basis of the tower instead of a single-step modulus.
        #[arg(long)]
        keep_tower_basis: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a decomposition file on all basis pairs.
    Verify { file: PathBuf },
    /// Exhaustive search for the least rank.
    RankSearch {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long = "r-max")]
        r_max: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Genus and place data of a tower family.
    Tower {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long = "k-max")]
        k_max: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Bounds on the slopes m_q and M_q.
    Asymptotic {
        #[arg(long)]
        q: u64,
        /// Lower bound for A(q), as num/den.
        #[arg(long)]
        aq: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) => m,
        }
    }
}

fn domain(e: impl ToString) -> Failure {
    Failure::Domain(e.to_string())
}

fn from_bound(e: BoundError) -> Failure {
    match e {
        BoundError::InvalidInput(m) => Failure::Usage(m),
        e => Failure::Domain(e.to_string()),
    }
}

fn check_q(q: u64) -> Result<(), Failure> {
    prime_power(q).map(|_| ()).ok_or_else(|| Failure::Usage(format!("q = {q} is not a prime power")))
}

fn check_pos(name: &str, v: u64) -> Result<(), Failure> {
    if v == 0 {
        return Err(Failure::Usage(format!("{name} must be positive")));
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Bound { q, n, format } => cmd_bound(q, n, format, out),
        Command::Table { q, n_max, format, output } => cmd_table(q, n_max, format, output.as_deref(), out),
        Command::Construct { q, n, output } => cmd_construct(q, n, output.as_deref(), out),
        Command::Compose { file1, file2, keep_tower_basis, output } => {
            cmd_compose(&file1, &file2, keep_tower_basis, output.as_deref(), out)
        }
        Command::Verify { file } => cmd_verify(&file, out),
        Command::RankSearch { q, n, r_max, budget } => cmd_rank_search(q, n, r_max, budget, out),
        Command::Tower { family, p, r, k_max, format } => cmd_tower(family, p, r, k_max, format, out),
        Command::Asymptotic { q, aq, format } => cmd_asymptotic(q, aq.as_deref(), format, out),
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| domain(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(domain),
    }
}

fn result_json(r: &BoundResult) -> serde_json::Value {
    json!({
        "value": r.value,
        "method": r.method.id(),
        "citation": r.citation,
        "params": r.params,
        "construction": r.construction.as_ref().map(Recipe::to_string),
        "witness_rank": r.witness.as_ref().map(BilinearDecomposition::rank),
    })
}

fn cmd_bound(q: u64, n: u64, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    check_q(q)?;
    check_pos("n", n)?;
    let lo = best_lower_bound(q, n).map_err(from_bound)?;
    let up = best_upper_bound(q, n).map_err(from_bound)?;
    let text = match format {
        Format::Json => {
            let v = json!({ "q": q, "n": n, "lower": result_json(&lo), "upper": result_json(&up) });
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
        Format::Csv => format!(
            "q,n,lower,upper,method,citation\n{q},{n},{},{},{},{}\n",
            lo.value,
            up.value,
            up.method.id(),
            up.citation
        ),
        Format::Text => {
            let mut s = format!("mu_{q}({n}): {} <= mu <= {}\n", lo.value, up.value);
            s.push_str(&format!("lower {} [{}] {}\n", lo.value, lo.method.id(), lo.citation));
            s.push_str(&format!("upper {} [{}] {}\n", up.value, up.method.id(), up.citation));
            if !up.params.is_empty() {
                s.push_str(&format!("params {}\n", up.params_string()));
            }
            if let Some(c) = &up.construction {
                s.push_str(&format!("construction {c}\n"));
            }
            if let Some(w) = &up.witness {
                s.push_str(&format!("witness rank {} (verified)\n", w.rank()));
            }
            s
        }
    };
    emit(&text, None, out)
}

fn cmd_table(q: u64, n_max: u64, format: Format, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    check_q(q)?;
    check_pos("n-max", n_max)?;
    let t = bound_table(q, n_max).map_err(from_bound)?;
    let text = match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&t.to_json()).unwrap()),
        Format::Csv | Format::Text => t.to_csv(),
    };
    emit(&text, path, out)
}

fn cmd_construct(q: u64, n: u64, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    check_q(q)?;
    check_pos("n", n)?;
    let base = field_of_order(q).map_err(domain)?;
    let d = if 2 * n <= q + 2 {
        toom_construct(&base, n as usize).map_err(domain)?
    } else {
        // fall back to whatever constructive recipe reaches the best bound
        let best = best_upper_bound(q, n).map_err(from_bound)?;
        match (best.witness, best.construction) {
            (Some(w), _) => w,
            (None, Some(recipe)) => build_witness(q, n, &recipe).map_err(domain)?,
            (None, None) => toom_construct(&base, n as usize).map_err(domain)?,
        }
    };
    if d.failing_pair().map_err(domain)?.is_some() {
        return Err(Failure::Domain("internal error: constructed decomposition does not verify".into()));
    }
    emit(&decomposition_to_json(&d), path, out)
}

fn load(path: &Path, skip_verify: bool) -> Result<BilinearDecomposition, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))?;
    decomposition_from_json(&text, skip_verify).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn cmd_compose(
    f1: &Path,
    f2: &Path,
    keep_tower: bool,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let a = load(f1, false)?;
    let b = load(f2, false)?;
    let (outer, inner) = if a.base() == b.extension() {
        (&a, &b)
    } else if b.base() == a.extension() {
        (&b, &a)
    } else {
        return Err(Failure::Domain(
            "field mismatch: neither file's extension field is the other's base field".into(),
        ));
    };
    let d = if keep_tower {
        compose_decompositions_tower(outer, inner)
    } else {
        compose_decompositions(outer, inner)
    }
    .map_err(domain)?;
    emit(&decomposition_to_json(&d), path, out)
}

fn cmd_verify(file: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let d = load(file, true)?;
    match d.failing_pair().map_err(domain)? {
        None => {
            writeln!(out, "VALID rank={} n={} q={}", d.rank(), d.n(), d.base().cardinality()).map_err(domain)?;
            Ok(())
        }
        Some((j, k)) => {
            writeln!(out, "INVALID basis pair ({j},{k})").map_err(domain)?;
            Err(Failure::Domain(format!("decomposition fails on basis pair ({j},{k})")))
        }
    }
}

fn cmd_rank_search(q: u64, n: usize, r_max: usize, budget: Option<u64>, out: &mut dyn Write) -> Result<(), Failure> {
    check_q(q)?;
    check_pos("n", n as u64)?;
    let budget = match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{BUDGET_ENV}={v:?} is not an integer")))?,
        Err(_) => budget.unwrap_or(DEFAULT_BUDGET),
    };
    let base = field_of_order(q).map_err(domain)?;
    let rep = brute_force_rank(&base, n, r_max, budget).map_err(|e| Failure::Usage(e.to_string()))?;
    let (outcome, rank, decomposition) = match &rep.outcome {
        SearchOutcome::Found(d) => {
            let v: serde_json::Value = serde_json::from_str(&decomposition_to_json(d)).unwrap();
            ("found", Some(d.rank()), Some(v))
        }
        SearchOutcome::ExhaustedNoneExists => ("exhausted", None, None),
        SearchOutcome::Aborted { .. } => ("aborted", None, None),
    };
    let v = json!({
        "q": q,
        "n": n,
        "r_max": r_max,
        "budget": budget,
        "outcome": outcome,
        "rank": rank,
        "nodes_explored": rep.nodes_explored,
        "decomposition": decomposition,
    });
    emit(&format!("{}\n", serde_json::to_string_pretty(&v).unwrap()), None, out)
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn cmd_tower(fam: FamilyArg, p: u64, r: u32, k_max: u32, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let family = TowerFamily::new(fam.into(), p, r).map_err(|e| Failure::Usage(e.to_string()))?;
    let report = check_lemma_inequalities(&family, k_max);
    let steps: Vec<_> = family.steps().take_while(|s| s.k <= k_max).collect();
    let text = match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = steps
                .iter()
                .map(|st| {
                    json!({
                        "k": st.k,
                        "s": st.s,
                        "genus_exact": st.genus_exact.as_ref().map(ToString::to_string),
                        "genus_upper": st.genus_upper.to_string(),
                        "places_lower": st.places_lower.to_string(),
                        "n1": st.n1,
                        "n2": st.n2,
                        "tabulated": st.tabulated,
                        "lemma_status": report.step_status(st.k, st.s),
                    })
                })
                .collect();
            let v = json!({
                "family": family.kind.name(),
                "p": p,
                "r": r,
                "constant_field": family.constant_field(),
                "lemma_checks": { "pass": report.passes(), "fail": report.failures() },
                "steps": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
        Format::Csv | Format::Text => {
            let mut s = String::from("k,s,genus_exact,genus_upper,places_lower,n1,n2,tabulated,lemma_status\n");
            for st in &steps {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    st.k,
                    opt(&st.s),
                    opt(&st.genus_exact),
                    st.genus_upper,
                    st.places_lower,
                    opt(&st.n1),
                    opt(&st.n2),
                    st.tabulated,
                    report.step_status(st.k, st.s)
                ));
            }
            s
        }
    };
    emit(&text, None, out)
}

fn cmd_asymptotic(q: u64, aq: Option<&str>, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    check_q(q)?;
    let aq = aq.map(parse_rational).transpose().map_err(from_bound)?;
    let rep = asymptotic_report(q, aq).map_err(from_bound)?;
    let text = match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rep.to_json()).unwrap()),
        Format::Csv => {
            let mut s = String::from("quantity,kind,value,applicable,conditional,status,citation\n");
            for e in &rep.entries {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    e.quantity,
                    e.kind,
                    e.value.as_ref().map(fmt_rat).unwrap_or_default(),
                    e.applicable,
                    e.conditional,
                    e.status,
                    e.citation.replace(',', ";")
                ));
            }
            s
        }
        Format::Text => {
            let a = rep.aq.as_ref().map(fmt_rat).unwrap_or_else(|| "unknown".into());
            let mut s = format!("q = {q}; A(q) >= {a} ({})\n", rep.aq_source);
            for e in &rep.entries {
                let rel = if e.kind == crate::bounds::BoundKind::Lower { ">=" } else { "<=" };
                let val = e.value.as_ref().map(fmt_rat).unwrap_or_else(|| "-".into());
                let flag = if e.conditional { " [conditional]" } else { "" };
                s.push_str(&format!("{} {rel} {val}  {}{flag}  ({})\n", e.quantity, e.status, e.citation));
            }
            for note in &rep.notes {
                s.push_str(&format!("note: {note}\n"));
            }
            s
        }
    };
    emit(&text, None, out)
}
