use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use jtrace::dihedral::coinvariant_table;
use jtrace::exactlin::Scalar;
use jtrace::lietrees::{eta, Tree};
use jtrace::omega2::{equivariant_decomposition_with_seed, paper_comparison, MultisetQuotients, MAX_EQUIVARIANT_HAIRS};
use jtrace::registry::character_algorithms;
use jtrace::selftest::{self, Fault, MODULES};
use jtrace::symfunc::{CycleType, Partition, FROBENIUS_MAX_N};
use jtrace::traces::{es_trace, tr_c_rank1, tr_c_rank2};
use jtrace::Error;

#[derive(Parser, Debug)]
#[command(name = "jtrace", version, about = "Dihedral coinvariants, trees and trace maps, and the rank-2 quotient")]
struct Cli {
    /// Output format. TSV is available for coinvariants, omega2 and selftest.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for the primes used to cross-check ranks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Genus of H for tree input. Defaults to the largest letter index, at least 4.
    #[arg(long, global = true, env = "JTRACE_GENUS")]
    genus: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Twist {
    Auto,
    On,
    Off,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Character value χ_λ(μ), by every registered algorithm.
    Characters {
        #[arg(long)]
        lambda: Partition,
        #[arg(long)]
        mu: CycleType,
        /// One algorithm, or all of them when omitted.
        #[arg(long)]
        algorithm: Option<String>,
    },
    /// Multiplicities of the dihedral coinvariants of H^{⊗s}.
    Coinvariants {
        s: usize,
        #[arg(long, value_enum, default_value_t = Twist::Auto)]
        twist: Twist,
    },
    /// Quotient dimension, character and decomposition of the rank-2 space.
    Omega2 { h: usize },
    /// Traces of one tree, e.g. "((p1,q1),p2,q2)".
    Trace { tree: String },
    /// Runs the acceptance criteria.
    Selftest {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(MODULES))]
        only: Option<String>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

enum Failure {
    Usage(String),
    Consistency(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Consistency(_) => Failure::Consistency(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// A document and whether the checks inside it held.
struct Report {
    text: String,
    ok: bool,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn scalar_json(x: &Scalar) -> serde_json::Value {
    if x.is_integer() {
        json!(x.to_integer().to_string().parse::<i64>().expect("small integer"))
    } else {
        json!(x.to_string())
    }
}

fn characters(lambda: &Partition, mu: &CycleType, algorithm: Option<&str>) -> Result<Report, Failure> {
    if lambda.size() != mu.size() {
        return Err(Error::SizeMismatch { lambda: lambda.size(), mu: mu.size() }.into());
    }
    if lambda.size() > FROBENIUS_MAX_N {
        return Err(Failure::Usage(format!("|lambda| = {} exceeds {FROBENIUS_MAX_N}", lambda.size())));
    }
    let registry = character_algorithms();
    let chosen: Vec<&str> = match algorithm {
        Some(name) => {
            registry.get(name)?;
            vec![registry.names().into_iter().find(|n| *n == name).expect("registered")]
        }
        None => registry.names(),
    };
    let mut values = serde_json::Map::new();
    let mut seen = Vec::new();
    for name in chosen {
        let v = registry.get(name)?.character(lambda, mu)?;
        values.insert(name.to_string(), json!(v));
        seen.push(v);
    }
    let agree = seen.windows(2).all(|w| w[0] == w[1]);
    let doc = json!({
        "command": "characters",
        "lambda": lambda,
        "mu": mu,
        "value": seen[0],
        "values": values,
        "agree": agree,
    });
    Ok(Report { text: to_json(&doc), ok: agree })
}

fn coinvariants(s: usize, twist: Twist, format: Format) -> Result<Report, Failure> {
    if !(3..=12).contains(&s) {
        return Err(Failure::Usage(format!("s = {s} outside 3..=12")));
    }
    let twist = match twist {
        Twist::Auto => s % 2 == 0,
        Twist::On => true,
        Twist::Off => false,
    };
    let table = coinvariant_table(s, twist)?;
    let text = match format {
        Format::Json => {
            let entries: Vec<_> = table.nonzero().map(|(p, m)| json!({"partition": p, "mult": m})).collect();
            to_json(&json!({"command": "coinvariants", "s": s, "twist": twist, "entries": entries}))
        }
        Format::Tsv => {
            let mut out = String::from("partition\tmult\n");
            for (p, m) in table.nonzero() {
                out.push_str(&format!("{p}\t{m}\n"));
            }
            out
        }
    };
    Ok(Report { text, ok: true })
}

fn omega2(h: usize, seed: u64, format: Format) -> Result<Report, Failure> {
    if h > MAX_EQUIVARIANT_HAIRS {
        return Err(Failure::Usage(format!("h = {h} exceeds {MAX_EQUIVARIANT_HAIRS}")));
    }
    let e = equivariant_decomposition_with_seed(h, seed)?;
    let cmp = paper_comparison(h, &e.decomposition);
    let text = match format {
        Format::Json => {
            let character: Vec<_> =
                e.character.values.iter().map(|(mu, v)| json!({"cycle_type": mu, "value": scalar_json(v)})).collect();
            let decomposition: Vec<_> =
                e.decomposition.iter().map(|(p, m)| json!({"partition": p, "mult": m})).collect();
            let modular: Vec<_> = e.rank_check.modular.iter().map(|(p, r)| json!({"prime": p, "rank": r})).collect();
            let comparison = cmp.map(|c| {
                json!({
                    "printed": c.printed,
                    "reading": c.reading.map(|r| r.iter().map(|(p, m)| json!({"partition": p, "mult": m})).collect::<Vec<_>>()),
                    "status": c.status,
                    "note": c.note,
                })
            });
            to_json(&json!({
                "command": "omega2",
                "h": h,
                "generators": e.generators.len(),
                "rank": e.rank_check.rank,
                "modular_ranks": modular,
                "dim": e.dim(),
                "character": character,
                "decomposition": decomposition,
                "checksum": e.checksum() as u64,
                "paper_comparison": comparison,
            }))
        }
        Format::Tsv => {
            let mut out = format!("# h={h} dim={} checksum={}\npartition\tmult\n", e.dim(), e.checksum());
            for (p, m) in &e.decomposition {
                out.push_str(&format!("{p}\t{m}\n"));
            }
            out
        }
    };
    Ok(Report { text, ok: e.checksum() == e.dim() as u128 && e.rank_check.agrees() })
}

fn trace(src: &str, genus: Option<usize>) -> Result<Report, Failure> {
    let t = Tree::parse(src)?;
    let mut top = 0;
    for x in t.leaves() {
        for l in t.vector(x)?.terms().keys() {
            top = top.max(l.genus_index());
        }
    }
    let g = genus.unwrap_or(top.max(4));
    if top > g {
        return Err(Failure::Usage(format!("tree uses letters of index {top} but the genus is {g}")));
    }
    let es = es_trace(&eta(&t)?)?;
    let r1 = tr_c_rank1(&t)?;
    let r2 = tr_c_rank2(&t, &mut MultisetQuotients::new())?;
    let identity = r1.scaled(&Scalar::from_integer(2.into())) == es;
    let doc = json!({
        "command": "trace",
        "tree": t.to_string(),
        "order": t.order(),
        "genus": g,
        "es_trace": es.to_string(),
        "rank1": r1.to_string(),
        "rank2": r2.to_string(),
        "identity_holds": identity,
    });
    Ok(Report { text: to_json(&doc), ok: identity })
}

fn selftest_cmd(only: Option<String>, fault: bool, seed: u64, format: Format) -> Result<Report, Failure> {
    let opts = selftest::Options { only, fault: fault.then_some(Fault::ReflectionTwist), seed };
    let results = selftest::run(&opts);
    let ok = results.iter().all(|r| r.passed);
    let text = match format {
        Format::Json => {
            let rows: Vec<_> = results
                .iter()
                .map(|r| json!({"id": r.id, "module": r.module, "name": r.name, "passed": r.passed, "detail": r.detail}))
                .collect();
            to_json(&json!({"command": "selftest", "passed": ok, "criteria": rows}))
        }
        Format::Tsv => results.iter().map(|r| r.line() + "\n").collect(),
    };
    Ok(Report { text, ok })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let tsv_ok = matches!(cli.command, Command::Coinvariants { .. } | Command::Omega2 { .. } | Command::Selftest { .. });
    if cli.format == Format::Tsv && !tsv_ok {
        eprintln!("error: --format tsv is only available for coinvariants, omega2 and selftest");
        return ExitCode::from(1);
    }
    let result = match &cli.command {
        Command::Characters { lambda, mu, algorithm } => characters(lambda, mu, algorithm.as_deref()),
        Command::Coinvariants { s, twist } => coinvariants(*s, *twist, cli.format),
        Command::Omega2 { h } => omega2(*h, cli.seed, cli.format),
        Command::Trace { tree } => trace(tree, cli.genus),
        Command::Selftest { only, inject_fault } => selftest_cmd(only.clone(), *inject_fault, cli.seed, cli.format),
    };
    match result {
        Ok(r) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(r.text.as_bytes());
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Consistency(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
