//! The `wordmeasure` command line.
//!
//! Every subcommand prints one JSON document (or a plain-text rendering with
//! `--format table`). Exit codes: 0 success, 1 usage or input error, 2 when
//! a verification finds a mismatch. Errors in JSON mode look like
//! `{"error":{"code":"budget","message":"..."}}`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::characters::{
    compute_character_table, format_chartab, format_complex, fs_indicators, load_chartab, save_chartab,
    CharacterError, CharacterTable, CHARACTER_TOLERANCE,
};
use crate::complex::{classify, classify_surface, ComplexError};
use crate::divisibility::verify_dim_divides_order;
use crate::group::{load_group_file, preset, FiniteGroup, GroupError, PRESET_NAMES};
use crate::measure::{
    brute_force_distribution_with_budget, count_via_zeta, cross_validate, ratio_to_f64, surface_indicators,
    word_indicator_bruteforce, MeasureError, DEFAULT_BUDGET,
};
use crate::so3::{density_at_identity, density_target, EstimatorConfig, So3Error, DEFAULT_EPS, DEFAULT_SAMPLES};
use crate::word::{parse_word_with_arity, Word, WordError};
use crate::zeta::{group_stats, so3_zeta, zeta_finite, zeta_finite_real, DegreeMultiset, ZetaError};

#[derive(Debug, Parser)]
#[command(name = "wordmeasure", version, about = "Word maps on finite groups and SO(3)")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Zeta,
    Both,
}

#[derive(Debug, Args)]
struct GroupArgs {
    /// Preset name (C1..C12, C2xC2, S3, D4, Q8, A4, S4) or path to a .grp file.
    #[arg(long)]
    group: String,
    /// Read the character table from a .chr file instead of computing it.
    #[arg(long)]
    chartab: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WordArgs {
    #[arg(long)]
    word: String,
    /// Number of free generators; defaults to the letters used.
    #[arg(long)]
    arity: Option<usize>,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Maximum number of tuples to enumerate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Surface type of the word's polygon.
    Classify(WordArgs),
    /// Number of solutions of w = 1.
    Count {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Exact counts of w(t) = g for every element g.
    Distribution {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        word: WordArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Per-irreducible averages of characters under the word measure.
    Indicators {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        word: WordArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Compute, show or save a character table.
    Chartab {
        #[command(flatten)]
        group: GroupArgs,
        /// Write the table to this .chr path.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Witten zeta of a finite group or of SO(3).
    Zeta {
        #[arg(long, required_unless_present = "so3", conflicts_with = "so3")]
        group: Option<String>,
        #[arg(long)]
        chartab: Option<PathBuf>,
        #[arg(long)]
        so3: bool,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
    },
    /// Invariants read off the irreducible degrees.
    Stats {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Monte Carlo density at the identity of SO(3).
    McSo3 {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Check that irreducible degrees divide the group order.
    Divides {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Compare enumeration with the character formulas.
    Verify {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        word: WordArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Surface(#[from] ComplexError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    So3(#[from] So3Error),
}

impl CliError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Word(_) => "word",
            CliError::Group(GroupError::Io(_)) | CliError::Character(CharacterError::Io(_)) => "io",
            CliError::Group(GroupError::Format { .. }) => "group_format",
            CliError::Group(_) => "group",
            CliError::Character(CharacterError::Format { .. }) => "chartab_format",
            CliError::Character(_) => "chartab",
            CliError::Surface(ComplexError::NotASurface { .. }) => "not_surface",
            CliError::Surface(_) => "word",
            CliError::Measure(MeasureError::BudgetExceeded { .. }) => "budget",
            CliError::Measure(MeasureError::Surface(_)) => "not_surface",
            CliError::Measure(MeasureError::Character(_)) => "chartab",
            CliError::Measure(_) => "measure",
            CliError::Zeta(_) => "divergent",
            CliError::So3(So3Error::NotASurface(_)) => "not_surface",
            CliError::So3(So3Error::Divergent(_)) => "divergent",
            CliError::So3(_) => "usage",
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    value: Value,
    ok: bool,
}

impl Report {
    fn new(value: impl Serialize, ok: bool) -> Self {
        Report {
            value: serde_json::to_value(value).expect("serializable report"),
            ok,
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let table_mode = args.windows(2).any(|w| w[0] == "--format" && w[1] == "table")
        || args.iter().any(|a| a == "--format=table");
    let format = if table_mode { Format::Table } else { Format::Json };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                };
            }
            return error_outcome(&CliError::Usage(e.to_string().trim_end().to_string()), format);
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            let stdout = match cli.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.value).expect("json")),
                Format::Table => render_table(&report.value),
            };
            Outcome {
                code: if report.ok { 0 } else { 2 },
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => error_outcome(&e, cli.format),
    }
}

fn error_outcome(e: &CliError, format: Format) -> Outcome {
    match format {
        Format::Json => Outcome {
            code: 1,
            stdout: format!(
                "{}\n",
                json!({"error": {"code": e.code(), "message": e.to_string()}})
            ),
            stderr: String::new(),
        },
        Format::Table => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error[{}]: {e}\n", e.code()),
        },
    }
}

fn load_group(source: &str) -> Result<FiniteGroup, CliError> {
    if PRESET_NAMES.contains(&source) {
        return Ok(preset(source)?);
    }
    let path = Path::new(source);
    if path.exists() || source.ends_with(".grp") {
        return Ok(load_group_file(path)?);
    }
    Err(GroupError::UnknownPreset(source.to_string()).into())
}

fn load_table(group: &FiniteGroup, chartab: Option<&Path>) -> Result<CharacterTable, CliError> {
    Ok(match chartab {
        Some(path) => load_chartab(path)?.aligned_to(group)?,
        None => compute_character_table(group)?,
    })
}

fn load_word(args: &WordArgs) -> Result<Word, CliError> {
    Ok(parse_word_with_arity(&args.word, args.arity)?)
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

#[derive(Serialize)]
struct CountReport {
    group: String,
    word: String,
    n: usize,
    method: &'static str,
    gamma: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_brute: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_zeta: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<bool>,
}

fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Classify(word) => {
            let w = load_word(word)?;
            let mut value = serde_json::to_value(classify(&w)?).expect("json");
            value["word"] = json!(w.to_string());
            Ok(Report { value, ok: true })
        }
        Command::Count {
            group,
            word,
            method,
            budget,
        } => {
            let g = load_group(&group.group)?;
            let w = load_word(word)?;
            let brute = match method {
                Method::Zeta => None,
                _ => Some(brute_force_distribution_with_budget(&g, &w, budget.budget)?.solutions()),
            };
            let zeta = match method {
                Method::Brute => None,
                _ => {
                    let t = load_table(&g, group.chartab.as_deref())?;
                    Some(count_via_zeta(&g, &t, &w)?)
                }
            };
            let agreement = brute.zip(zeta).map(|(b, z)| b == z);
            let report = CountReport {
                group: g.name().to_string(),
                word: w.to_string(),
                n: w.arity(),
                method: match method {
                    Method::Brute => "brute",
                    Method::Zeta => "zeta",
                    Method::Both => "both",
                },
                gamma: brute.or(zeta).expect("some method ran"),
                gamma_brute: brute,
                gamma_zeta: zeta,
                agreement,
            };
            Ok(Report::new(report, agreement != Some(false)))
        }
        Command::Distribution { group, word, budget } => {
            let g = load_group(&group.group)?;
            let w = load_word(word)?;
            let d = brute_force_distribution_with_budget(&g, &w, budget.budget)?;
            let value = json!({
                "group": g.name(),
                "word": w.to_string(),
                "n": w.arity(),
                "method": "brute",
                "total": d.total(),
                "gamma": d.solutions(),
                "counts": d.counts(),
                "class_function": d.is_class_function(),
            });
            Ok(Report { value, ok: true })
        }
        Command::Indicators { group, word, budget } => {
            let g = load_group(&group.group)?;
            let w = load_word(word)?;
            let t = load_table(&g, group.chartab.as_deref())?;
            let d = brute_force_distribution_with_budget(&g, &w, budget.budget)?;
            let surface = classify_surface(&w).ok();
            let formula = match surface {
                Some(s) => Some(surface_indicators(&g, &t, s)?),
                None => None,
            };
            let fs = fs_indicators(&t, &g)?;
            let mut rows = Vec::new();
            let mut agreement = true;
            for i in 0..t.num_irreducibles() {
                let b = word_indicator_bruteforce(&d, &t, i)?;
                let mut row = json!({
                    "irreducible": i,
                    "degree": t.degrees()[i],
                    "fs": fs[i],
                    "brute": complex_json(b),
                });
                if let Some(f) = &formula {
                    let exact = &f[i];
                    let close = (b - Complex64::new(ratio_to_f64(exact), 0.0)).norm() <= CHARACTER_TOLERANCE;
                    agreement &= close;
                    row["formula"] = json!(exact.to_string());
                    row["agreement"] = json!(close);
                }
                rows.push(row);
            }
            let mut value = json!({
                "group": g.name(),
                "word": w.to_string(),
                "n": w.arity(),
                "surface": surface.map(|s| s.to_string()),
                "indicators": rows,
            });
            if formula.is_some() {
                value["agreement"] = json!(agreement);
            }
            Ok(Report { value, ok: agreement })
        }
        Command::Chartab { group, save } => {
            let g = load_group(&group.group)?;
            let t = load_table(&g, group.chartab.as_deref())?;
            if let Some(path) = save {
                save_chartab(&t, path)?;
            }
            let values: Vec<Vec<String>> = (0..t.num_irreducibles())
                .map(|i| t.row(i).iter().map(|&z| format_complex(z)).collect())
                .collect();
            let value = json!({
                "group": g.name(),
                "order": g.order(),
                "sizes": t.class_sizes(),
                "reps": t.class_reps(),
                "degrees": t.degrees(),
                "values": values,
                "fs": fs_indicators(&t, &g)?,
                "saved": save.as_ref().map(|p| p.display().to_string()),
                "chr": format_chartab(&t),
            });
            Ok(Report { value, ok: true })
        }
        Command::Zeta { group, chartab, so3, s } => {
            if *so3 {
                let value = json!({"group": "SO(3)", "s": s, "value": so3_zeta(*s)?});
                return Ok(Report { value, ok: true });
            }
            let g = load_group(group.as_deref().expect("clap requires --group"))?;
            let t = load_table(&g, chartab.as_deref())?;
            let d = DegreeMultiset::from_table(&t);
            let mut value = json!({"group": g.name(), "s": s, "value": zeta_finite_real(&d, *s)});
            if s.fract() == 0.0 && s.abs() <= 1e6 {
                value["exact"] = json!(zeta_finite(&d, *s as i64).to_string());
            }
            Ok(Report { value, ok: true })
        }
        Command::Stats { group } => {
            let g = load_group(&group.group)?;
            let t = load_table(&g, group.chartab.as_deref())?;
            let mut value = serde_json::to_value(group_stats(&DegreeMultiset::from_table(&t), g.order()))
                .expect("json");
            value["group"] = json!(g.name());
            Ok(Report { value, ok: true })
        }
        Command::McSo3 { word, n, eps, seed } => {
            let w = load_word(word)?;
            let cfg = EstimatorConfig::new(*n, *eps, *seed)?;
            let target = density_target(&w)?;
            let est = density_at_identity(&w, &cfg)?;
            let value = json!({
                "word": w.to_string(),
                "n": n,
                "eps": eps,
                "seed": seed,
                "hits": est.hits,
                "estimate": est.estimate,
                "std_error": est.std_error,
                "target": target,
                "z_score": (est.estimate - target) / est.std_error,
            });
            Ok(Report { value, ok: true })
        }
        Command::Divides { group } => {
            let g = load_group(&group.group)?;
            let t = load_table(&g, group.chartab.as_deref())?;
            let r = verify_dim_divides_order(&g, &t)?;
            let ok = r.passes();
            let mut value = serde_json::to_value(r).expect("json");
            value["group"] = json!(g.name());
            Ok(Report { value, ok })
        }
        Command::Verify { group, word, budget } => {
            let g = load_group(&group.group)?;
            let w = load_word(word)?;
            let t = load_table(&g, group.chartab.as_deref())?;
            let r = cross_validate(&g, &t, &w, budget.budget, CHARACTER_TOLERANCE)?;
            let ok = r.agreement;
            Ok(Report::new(r, ok))
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".to_string(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        Value::Object(map) if map.len() == 2 && map.contains_key("re") => {
            let re = map["re"].as_f64().unwrap_or(f64::NAN);
            let im = map["im"].as_f64().unwrap_or(f64::NAN);
            format_complex(Complex64::new(re, im))
        }
        other => other.to_string(),
    }
}

/// One `key  value` line per field; arrays of records become indented rows.
fn render_table(value: &Value) -> String {
    let mut out = String::new();
    let Value::Object(map) = value else {
        return format!("{}\n", scalar(value));
    };
    if let Some(Value::String(chr)) = map.get("chr") {
        return chr.clone();
    }
    let width = map.keys().map(String::len).max().unwrap_or(0);
    for (key, v) in map {
        match v {
            Value::Array(items) if items.iter().any(Value::is_object) => {
                out.push_str(&format!("{key}\n"));
                for item in items {
                    let fields: Vec<String> = item
                        .as_object()
                        .map(|o| o.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect())
                        .unwrap_or_else(|| vec![scalar(item)]);
                    out.push_str(&format!("  {}\n", fields.join("  ")));
                }
            }
            _ => out.push_str(&format!("{key:<width$}  {}\n", scalar(v))),
        }
    }
    out
}
