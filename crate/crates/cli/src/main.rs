use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coha_core::charvar::{
    brute_relation_count, relation_count, stack_count, stack_count_series, CountConfig, StackOracle,
};
use coha_core::group::build_group;
use coha_core::lie::{bcstar_series, pt_mod_glr_bm_vir_series, VirtualDimension};
use coha_core::quiver::{kac_polynomial, DimVector, KacOptions, Quiver};
use coha_core::verify::{
    extract_bps, extract_ic, run_check, CheckKind, CheckReport, CheckSpec, Corruption,
    DEFAULT_Q_MAX, DEFAULT_Q_MIN,
};
use coha_core::{GradedSeries, TruncationPolicy};

/// Exact series checks for cohomological Hall algebras of surface groups.
#[derive(Parser)]
#[command(name = "coha", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification check and print its JSON report.
    Check {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        common: Window,
        /// Deliberately corrupt a fixture (harness self-test).
        #[arg(long)]
        corrupt: Option<Corruption>,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Extract the BPS or IC series from a stack series.
    Extract {
        #[arg(value_enum)]
        what: Extracted,
        #[command(flatten)]
        common: Window,
        /// Stack series in JSON; counted from the surface group when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Point counts of the twisted relation variety.
    Count {
        #[arg(long, default_value_t = 1)]
        genus: u32,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        twist: i64,
        #[arg(long, value_enum, default_value_t = Oracle::Auto)]
        oracle: Oracle,
        /// Field sizes at which to evaluate the count.
        #[arg(long, value_delimiter = ',')]
        at: Vec<u64>,
        /// Also count by full enumeration at each field size.
        #[arg(long)]
        brute: bool,
        #[arg(long, default_value_t = coha_core::charvar::DEFAULT_TUPLE_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Kac polynomial of a quiver at a dimension vector.
    Kac {
        /// Quiver file (`vertices: n` and `arrow: s t` lines).
        #[arg(long)]
        quiver: PathBuf,
        /// Comma-separated dimension vector.
        #[arg(long)]
        dim: DimVector,
        #[arg(long, default_value_t = 4)]
        max_total_dim: u64,
    },
    /// Print a named series as JSON.
    Series {
        #[arg(value_enum)]
        which: Named,
        #[command(flatten)]
        common: Window,
        #[arg(long, default_value_t = 1)]
        rank: usize,
    },
}

#[derive(Args)]
struct Window {
    #[arg(long, default_value_t = 0)]
    genus: u32,
    #[arg(long, default_value_t = 2)]
    rmax: usize,
    #[arg(long, default_value_t = DEFAULT_Q_MIN, allow_hyphen_values = true)]
    qmin: i64,
    #[arg(long, default_value_t = DEFAULT_Q_MAX, allow_hyphen_values = true)]
    qmax: i64,
    /// Cap on tuples enumerated by brute-force counting.
    #[arg(long)]
    budget: Option<u128>,
    /// Cap on group sizes enumerated.
    #[arg(long)]
    group_cap: Option<u128>,
}

impl Window {
    fn policy(&self) -> Result<TruncationPolicy> {
        Ok(TruncationPolicy::ints(self.rmax, self.qmin, self.qmax)?)
    }

    fn spec(&self, name: &str) -> Result<CheckSpec> {
        let mut spec =
            CheckSpec::new(name, self.genus, self.rmax).with_q_window(self.qmin, self.qmax)?;
        if let Some(b) = self.budget {
            spec.budgets.tuple_budget = b;
        }
        if let Some(c) = self.group_cap {
            spec.budgets.group_cap = c;
        }
        Ok(spec)
    }

    fn config(&self) -> CountConfig {
        let mut cfg = CountConfig::default();
        if let Some(c) = self.group_cap {
            cfg.group_cap = c;
        }
        cfg
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Kind {
    Genus0,
    Genus1,
    Echeck,
    Psws,
    Ic,
}

impl From<Kind> for CheckKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Genus0 => CheckKind::Genus0,
            Kind::Genus1 => CheckKind::Genus1,
            Kind::Echeck => CheckKind::Echeck,
            Kind::Psws => CheckKind::Psws,
            Kind::Ic => CheckKind::Ic,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Extracted {
    Bps,
    Ic,
}

#[derive(Copy, Clone, ValueEnum)]
enum Oracle {
    Auto,
    Frobenius,
    ClassCounts,
}

impl From<Oracle> for StackOracle {
    fn from(o: Oracle) -> Self {
        match o {
            Oracle::Auto => StackOracle::Auto,
            Oracle::Frobenius => StackOracle::Frobenius,
            Oracle::ClassCounts => StackOracle::ClassCounts,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum Named {
    /// `H(pt/C*)`
    Bcstar,
    /// Counting series of `pt/GL_r`.
    PtGl,
    /// Stack series of the surface group, ranks up to `--rmax`.
    Stack,
}

/// Writes to stdout; a closed pipe (`coha ... | head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(v: &Value) -> Result<()> {
    emit(&serde_json::to_string_pretty(v)?)
}

/// `1 + sum_r t^r` times the counted stack series per rank.
fn counted_stack(w: &Window) -> Result<GradedSeries> {
    let p = w.policy()?;
    let cfg = w.config();
    let mut out = GradedSeries::one(p);
    for r in 1..=w.rmax {
        let vdim = VirtualDimension::surface(w.genus as i64, r as i64);
        let (s, _) = stack_count_series(w.genus, r, 0, vdim, StackOracle::Auto, &cfg, p)?;
        out = out.add(&s.shift_rank(r))?;
    }
    Ok(out)
}

fn check(
    kind: Kind,
    w: &Window,
    corrupt: Option<Corruption>,
    report: Option<PathBuf>,
) -> Result<bool> {
    let mut spec = w.spec(CheckKind::from(kind).name())?;
    spec.corruption = corrupt;
    let rep: CheckReport = run_check(kind.into(), &spec)?;
    let text = serde_json::to_string_pretty(&rep)?;
    emit(&text)?;
    if let Some(path) = report {
        fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(wit) = &rep.witness {
        eprintln!("{}: FAIL, {wit}", rep.name);
    } else {
        eprintln!("{}: pass", rep.name);
    }
    Ok(rep.pass)
}

#[allow(clippy::too_many_arguments)]
fn count(
    genus: u32,
    rank: usize,
    twist: i64,
    oracle: Oracle,
    at: &[u64],
    brute: bool,
    budget: u128,
    format: Format,
) -> Result<()> {
    let cfg = CountConfig::default();
    let (n, used) = relation_count(genus, rank, twist, oracle.into(), &cfg)?;
    let (stack, _) = stack_count(genus, rank, twist, oracle.into(), &cfg)?;
    let mut rows = Vec::new();
    for &q in at {
        let value = n.eval_i64(q as i64);
        let enumerated = if brute {
            let group = build_group(rank, q, cfg.group_cap)?;
            let central = group.central_twist(twist)?;
            Some(brute_relation_count(&group, genus, central, budget)?.to_string())
        } else {
            None
        };
        rows.push((q, value.to_string(), enumerated));
    }
    if format == Format::Csv {
        let mut csv = format!("q,count{}", if brute { ",enumerated" } else { "" });
        for (q, v, e) in &rows {
            csv.push_str(&format!("\n{q},{v}"));
            if let Some(e) = e {
                csv.push_str(&format!(",{e}"));
            }
        }
        return emit(&csv);
    }
    let values: Vec<Value> = rows
        .iter()
        .map(|(q, v, e)| {
            let mut o = json!({ "q": q, "count": v });
            if let Some(e) = e {
                o["enumerated"] = json!(e);
            }
            o
        })
        .collect();
    print_json(&json!({
        "genus": genus,
        "rank": rank,
        "twist": twist,
        "relation_count": n.to_string(),
        "stack_count": stack.to_string(),
        "oracle": used,
        "values": values,
    }))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check {
            kind,
            common,
            corrupt,
            report,
        } => check(kind, &common, corrupt, report),
        Command::Extract {
            what,
            common,
            input,
        } => {
            let stack = match input {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    GradedSeries::from_json(&serde_json::from_str(&text)?)?
                }
                None => counted_stack(&common)?,
            };
            let out = match what {
                Extracted::Bps => extract_bps(&stack)?,
                Extracted::Ic => extract_ic(&stack)?,
            };
            print_json(&out.to_json())?;
            Ok(true)
        }
        Command::Count {
            genus,
            rank,
            twist,
            oracle,
            at,
            brute,
            budget,
            format,
        } => {
            count(genus, rank, twist, oracle, &at, brute, budget, format)?;
            Ok(true)
        }
        Command::Kac {
            quiver,
            dim,
            max_total_dim,
        } => {
            let text = fs::read_to_string(&quiver)
                .with_context(|| format!("reading {}", quiver.display()))?;
            let q = Quiver::parse(&text)?;
            let opts = KacOptions {
                max_total_dim,
                ..KacOptions::default()
            };
            let a = kac_polynomial(&q, &dim, &opts)?;
            print_json(&json!({ "dim": dim.to_string(), "kac": a.poly().to_string() }))?;
            Ok(true)
        }
        Command::Series {
            which,
            common,
            rank,
        } => {
            let p = common.policy()?;
            let s = match which {
                Named::Bcstar => bcstar_series(p)?,
                Named::PtGl => pt_mod_glr_bm_vir_series(rank, common.genus as i64, p)?,
                Named::Stack => counted_stack(&common)?,
            };
            print_json(&s.to_json())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
