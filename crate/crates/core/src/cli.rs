//! Command-line front end: argument parsing, dispatch, and JSON/CSV output
//! with a provenance header.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::characters::{l_function, theorem58_bound, unit_group_structure, DirichletChar};
use crate::cosets::{degree, right_coset_reps};
use crate::error::{Error, Result};
use crate::hecke::verify_lemma47;
use crate::normal_forms::DivisorType;
use crate::number::{factorize, format_rational, parse_rational, primes_up_to, rational_to_f64, Rational};
use crate::oracle::{
    budget_from_env, coset_distinctness, degree_oracle, generator_images, group_closure, parse_budget, sp4_order,
    surjectivity_check,
};
use crate::symplectic::Similitude;
use crate::thermo::{global_partition, kms_phase, local_zeta_closed, local_zeta_series};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug, Serialize)]
#[command(name = "siegel-hecke", version, about = "Exact Hecke combinatorics and thermodynamics for GSp4")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; CSV is derived from the JSON result.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Memory budget for group enumeration, e.g. 4G; overrides SIEGEL_HECKE_MEMORY_BUDGET.
    #[arg(long, global = true)]
    pub memory_budget: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Right-coset representatives of a double coset.
    Cosets {
        /// Divisor type a1,a2,d2,d1.
        #[arg(long = "type")]
        divisor_type: DivisorType,
        /// Print at most this many representatives.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Degree of a double coset.
    Degree {
        #[arg(long = "type")]
        divisor_type: DivisorType,
        /// Require the multiplier to be a power of this prime.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Local zeta function at a prime, closed form or partial sums.
    Zeta {
        #[arg(long)]
        p: u64,
        /// Inverse temperature, decimal or a/b.
        #[arg(long)]
        beta: String,
        /// Evaluate the closed form (exact for integer β).
        #[arg(long)]
        closed: bool,
        /// Number of terms for the series.
        #[arg(long, default_value_t = 30)]
        lmax: u32,
    },
    /// Global partition function against the zeta quotient, swept over β and prime bounds.
    Partition {
        /// Comma-separated β values.
        #[arg(long, value_delimiter = ',')]
        beta: Vec<String>,
        /// Comma-separated prime bounds.
        #[arg(long, value_delimiter = ',', default_value = "10000")]
        bound: Vec<u64>,
    },
    /// Pointwise check of the stratum expansion identities.
    HeckeVerify {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        radius: i64,
        /// Omit per-point rows.
        #[arg(long)]
        summary: bool,
    },
    /// KMS phase at β with its witness.
    Phase {
        #[arg(long)]
        beta: String,
    },
    /// Dirichlet characters, L-values and the ergodicity bound.
    Characters(CharactersArgs),
    /// Brute-force oracles.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct CharactersArgs {
    /// Modulus.
    #[arg(long = "mod")]
    pub modulus: u64,
    /// Evaluate L(s, χ) for each character.
    #[arg(long)]
    pub s: Option<f64>,
    /// Terms in the L-series.
    #[arg(long, default_value_t = 1 << 20)]
    pub terms: u64,
    /// Evaluate the bound at this β for every nontrivial character.
    #[arg(long)]
    pub bound_beta: Option<f64>,
    /// Prime cutoffs for the bound sweep (primes dividing the modulus are excluded).
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    pub cutoffs: Vec<u64>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleCommand {
    /// Order of the closure of the symplectic generators mod N.
    Closure {
        #[arg(long = "mod")]
        modulus: u32,
        /// Also close over every parameter α mod N and compare with |Sp4(Z/N)|.
        #[arg(long)]
        surjectivity: bool,
    },
    /// Degree as the index of a congruence stabilizer.
    Degree {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        l: u32,
        #[arg(long = "type")]
        divisor_type: DivisorType,
    },
    /// Pairwise right-coset distinctness of a representative list.
    Distinct {
        /// JSON file: a list of 16-entry matrices, or the output of `cosets`.
        #[arg(long)]
        reps: PathBuf,
    },
}

fn config_hash(cli: &Cli) -> String {
    let canonical = serde_json::to_string(&json!({
        "command": &cli.command,
        "format": cli.format,
        "memory_budget": cli.memory_budget,
    }))
    .expect("config serializes");
    format!("{:x}", Sha256::digest(canonical.as_bytes()))
}

fn command_line(cli: &Cli) -> String {
    let v = serde_json::to_value(&cli.command).expect("command serializes");
    match v {
        Value::String(s) => s,
        Value::Object(m) => m.keys().next().cloned().unwrap_or_default(),
        _ => String::new(),
    }
}

pub fn provenance(cli: &Cli) -> Value {
    let mut name = command_line(cli);
    if let Command::Oracle { command } = &cli.command {
        if let Ok(Value::Object(m)) = serde_json::to_value(command) {
            if let Some(k) = m.keys().next() {
                name = format!("oracle {k}");
            }
        }
    }
    json!({ "command": name, "config_hash": config_hash(cli), "version": VERSION })
}

fn budget(cli: &Cli) -> Result<u64> {
    match &cli.memory_budget {
        Some(s) => parse_budget(s),
        None => budget_from_env(),
    }
}

fn beta_value(s: &str) -> Result<Rational> {
    let b = parse_rational(s)?;
    if b <= Rational::from_integer(0.into()) {
        return Err(Error::InvalidArgument(format!("β must be positive, got {s}")));
    }
    Ok(b)
}

/// Matrix literal: row-major list of entry strings.
fn rep_json(m: &[i64; 16]) -> Value {
    json!(m.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

/// Runs one command and returns its JSON result.
pub fn execute(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Cosets { divisor_type, limit } => {
            let reps = right_coset_reps(divisor_type)?;
            let shown: Vec<Value> =
                reps.iter().take(limit.unwrap_or(usize::MAX)).map(|r| rep_json(&r.matrix())).collect();
            let mut out = json!({
                "type": divisor_type.to_string(),
                "multiplier": divisor_type.multiplier(),
                "degree": reps.len(),
                "reps": shown,
            });
            if let [(p, l)] = factorize(divisor_type.multiplier())[..] {
                out["p"] = json!(p);
                out["l"] = json!(l);
            }
            Ok(out)
        }
        Command::Degree { divisor_type, p } => {
            if let Some(p) = p {
                if divisor_type.exponents(*p).is_none() {
                    return Err(Error::InvalidArgument(format!("{divisor_type} is not a power of {p}")));
                }
            }
            Ok(json!({ "type": divisor_type.to_string(), "degree": degree(divisor_type)? }))
        }
        Command::Zeta { p, beta, closed, lmax } => {
            let b = beta_value(beta)?;
            if *closed {
                let v = local_zeta_closed(*p, &b)?;
                let value = match &v.exact {
                    Some(q) => json!(q),
                    None => json!(v.approx),
                };
                Ok(json!({ "p": p, "beta": format_rational(&b), "value": value, "approx": v.approx }))
            } else {
                let s = local_zeta_series(*p, rational_to_f64(&b), *lmax)?;
                let closed = local_zeta_closed(*p, &b).ok().map(|v| v.approx);
                Ok(json!({
                    "p": p,
                    "beta": format_rational(&b),
                    "lmax": lmax,
                    "value": s.value,
                    "tail_bound": s.tail_bound,
                    "diverging": s.diverging,
                    "closed_form": closed,
                    "partial_sums": s.partial_sums,
                }))
            }
        }
        Command::Partition { beta, bound } => {
            if beta.is_empty() {
                return Err(Error::InvalidArgument("need at least one β".into()));
            }
            let mut rows = Vec::new();
            for b in beta {
                let bv = rational_to_f64(&beta_value(b)?);
                for &n in bound {
                    let r = global_partition(bv, n)?;
                    rows.push(json!({
                        "beta": b,
                        "prime_bound": n,
                        "euler_product": r.euler_product,
                        "zeta_quotient": r.zeta_quotient,
                        "relative_gap": r.relative_gap,
                    }));
                }
            }
            Ok(json!({ "rows": rows }))
        }
        Command::HeckeVerify { p, radius, summary } => {
            let mut report = serde_json::to_value(verify_lemma47(*p, *radius)?).expect("report serializes");
            if *summary {
                if let Some(ids) = report.get_mut("identities").and_then(Value::as_array_mut) {
                    for id in ids {
                        if let Some(o) = id.as_object_mut() {
                            o.remove("points");
                        }
                    }
                }
            }
            Ok(report)
        }
        Command::Phase { beta } => {
            let b = beta_value(beta)?;
            let mut v = serde_json::to_value(kms_phase(&b)?).expect("verdict serializes");
            if let Value::Object(m) = &mut v {
                m.insert("beta".into(), json!(format_rational(&b)));
            }
            Ok(v)
        }
        Command::Characters(args) => characters(args),
        Command::Oracle { command } => oracle(cli, command),
    }
}

fn characters(args: &CharactersArgs) -> Result<Value> {
    let group = unit_group_structure(args.modulus)?;
    let chars = DirichletChar::all(args.modulus)?;
    let mut list = Vec::new();
    for c in &chars {
        let mut entry = Map::new();
        entry.insert("character".into(), json!(c.to_string()));
        entry.insert("exponents".into(), json!(c.exponents));
        entry.insert("principal".into(), json!(c.is_principal()));
        entry.insert("order".into(), json!(c.order()));
        if let Some(s) = args.s {
            match l_function(c, s, args.terms) {
                Ok(l) => {
                    entry.insert("l_value".into(), json!({ "re": l.re, "im": l.im, "tail_bound": l.tail_bound }));
                }
                Err(e) => {
                    entry.insert("l_value".into(), json!({ "error": e.to_string() }));
                }
            }
        }
        if let (Some(beta), false) = (args.bound_beta, c.is_principal()) {
            let mut sweep = Vec::new();
            for &cut in &args.cutoffs {
                let f: Vec<u64> = primes_up_to(cut).into_iter().filter(|p| args.modulus % p != 0).collect();
                let r = theorem58_bound(c, beta, &f, args.terms)?;
                sweep.push(json!({
                    "cutoff": cut,
                    "final_bound": r.final_bound,
                    "restricted": r.restricted,
                    "intermediate": r.intermediate,
                    "numerator": r.numerator,
                    "denominator": r.denominator,
                }));
            }
            entry.insert("bound_sweep".into(), json!(sweep));
        }
        list.push(Value::Object(entry));
    }
    Ok(json!({
        "modulus": args.modulus,
        "generators": group.generators,
        "orders": group.orders,
        "characters": list,
    }))
}

fn parse_reps(text: &str) -> Result<Vec<Similitude>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("reps file: {e}")))?;
    let list = match &v {
        Value::Array(a) => a.clone(),
        Value::Object(o) => match o.get("result").and_then(|r| r.get("reps")).or_else(|| o.get("reps")) {
            Some(Value::Array(a)) => a.clone(),
            _ => return Err(Error::Parse("reps file has no \"reps\" list".into())),
        },
        _ => return Err(Error::Parse("reps file must hold a list of matrices".into())),
    };
    list.iter()
        .map(|m| {
            let entries = m.as_array().ok_or_else(|| Error::Parse("each rep must be a list of 16 entries".into()))?;
            let items: Vec<String> = entries
                .iter()
                .map(|x| match x {
                    Value::Number(n) => Ok(n.to_string()),
                    Value::String(s) => Ok(s.clone()),
                    _ => Err(Error::Parse(format!("bad matrix entry {x}"))),
                })
                .collect::<Result<_>>()?;
            Similitude::new(crate::matrix::MatQ::from_literal(&items)?)
        })
        .collect()
}

fn oracle(cli: &Cli, command: &OracleCommand) -> Result<Value> {
    let budget = budget(cli)?;
    match command {
        OracleCommand::Closure { modulus, surjectivity } => {
            if *surjectivity {
                return Ok(serde_json::to_value(surjectivity_check(*modulus, budget)?).expect("serializes"));
            }
            let g = group_closure(&generator_images(*modulus, false)?, *modulus, budget)?;
            Ok(json!({
                "modulus": modulus,
                "order": g.order,
                "bfs_levels": g.levels,
                "sp4_order": sp4_order(*modulus as u64),
            }))
        }
        OracleCommand::Degree { p, l, divisor_type } => {
            let f = factorize(divisor_type.multiplier());
            let ok = (*l == 0 && f.is_empty()) || (f.len() == 1 && f[0] == (*p, *l));
            if !ok {
                return Err(Error::InvalidArgument(format!("type {divisor_type} does not have multiplier {p}^{l}")));
            }
            let o = degree_oracle(divisor_type, *p, budget)?;
            Ok(json!({
                "type": divisor_type.to_string(),
                "p": p,
                "l": l,
                "degree": o.degree,
                "method": o.method,
                "enumerated_degree": degree(divisor_type)?,
            }))
        }
        OracleCommand::Distinct { reps } => {
            let text = std::fs::read_to_string(reps).map_err(|e| Error::Parse(format!("{}: {e}", reps.display())))?;
            let list = parse_reps(&text)?;
            Ok(serde_json::to_value(coset_distinctness(&list)?).expect("serializes"))
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Dimension(_) => "dimension",
        Error::Singular => "singular",
        Error::ZeroMultiplier => "zero_multiplier",
        Error::NotSimilitude => "not_similitude",
        Error::MultiplierMismatch(..) => "multiplier_mismatch",
        Error::NonIntegral => "non_integral",
        Error::InvalidDivisorType(_) => "invalid_divisor_type",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Divergent(_) => "divergent",
        Error::Resource(_) => "resource",
        Error::Parse(_) => "parse",
        Error::Overflow(_) => "overflow",
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar_text(other))),
    }
}

const TABLE_KEYS: [&str; 4] = ["rows", "identities", "characters", "weights"];

/// CSV view of a JSON result: the first list of objects found (top level,
/// `rows`, `characters`, `identities`, …) becomes the table; otherwise a
/// single row of the flattened fields.
pub fn to_csv(envelope: &Value) -> Result<String> {
    let result = envelope.get("result").or_else(|| envelope.get("error")).cloned().unwrap_or(Value::Null);
    if let Some(Value::Array(reps)) = result.get("reps") {
        // one row per representative, entries as columns m11..m44
        let rows: Vec<Value> = reps
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut row = Map::new();
                row.insert("index".into(), json!(i));
                for (k, x) in m.as_array().into_iter().flatten().enumerate() {
                    row.insert(format!("m{}{}", k / 4 + 1, k % 4 + 1), x.clone());
                }
                Value::Object(row)
            })
            .collect();
        return csv_table(envelope, &rows);
    }
    let rows: Vec<Value> = match &result {
        Value::Array(a) => a.clone(),
        Value::Object(m) => {
            let table = |x: &Value| match x {
                Value::Array(a) if a.first().is_some_and(Value::is_object) => Some(a.clone()),
                _ => None,
            };
            TABLE_KEYS
                .iter()
                .find_map(|k| m.get(*k).and_then(table))
                .or_else(|| m.values().find_map(table))
                .unwrap_or_else(|| vec![result.clone()])
        }
        other => vec![json!({ "value": other })],
    };
    csv_table(envelope, &rows)
}

fn csv_table(envelope: &Value, rows: &[Value]) -> Result<String> {
    let flat: Vec<Vec<(String, String)>> = rows
        .iter()
        .map(|r| {
            let mut out = Vec::new();
            flatten("", r, &mut out);
            out
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for row in &flat {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let map_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    w.write_record(&header).map_err(map_err)?;
    for row in &flat {
        let rec: Vec<&str> = header
            .iter()
            .map(|h| row.iter().find(|(k, _)| k == h).map(|(_, v)| v.as_str()).unwrap_or(""))
            .collect();
        w.write_record(rec).map_err(map_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?)
        .map_err(|e| Error::Parse(format!("csv: {e}")))?;
    let p = &envelope["provenance"];
    Ok(format!(
        "# command={} config_hash={} version={}\n{body}",
        scalar_text(&p["command"]),
        scalar_text(&p["config_hash"]),
        scalar_text(&p["version"])
    ))
}

/// Parses, runs and writes the output; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let prov = provenance(&cli);
    let (envelope, code) = match execute(&cli) {
        Ok(result) => (json!({ "provenance": prov, "result": result }), 0),
        Err(e) => (json!({ "provenance": prov, "error": { "kind": error_kind(&e), "message": e.to_string() } }), 1),
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&envelope).expect("json") + "\n",
        Format::Csv => match to_csv(&envelope) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("{e}");
                return 1;
            }
        },
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("cannot write output: {e}");
        return 1;
    }
    code
}
