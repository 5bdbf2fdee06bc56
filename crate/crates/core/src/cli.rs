//! The `svol` command line. Every subcommand maps onto one library
//! operation, prints a JSON document or a short text rendering of it, and
//! exits with 0 on success, 1 on domain errors and 2 on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bounds::KnowledgeBase;
use crate::complex::{verify_fundamental_cycle, verify_relative_cycle, Chain, Model, SCHEMA_VERSION};
use crate::error::{Result, SvolError};
use crate::homology::{complex_homology, elementary_divisor_primes, homology, ChainComplex};
use crate::minimize::{
    minimal_norm, scaling_sequence, simultaneous_cycle, stream_item_json, threads_from_env, upper_bound_stream,
    verify_witness, MinimizationProblem, Strategy, DEFAULT_NODE_BUDGET, DEFAULT_STREAM_BUDGET,
};
use crate::models::{
    circle_model, cyclic_cover, sphere_model, sphere_with_ball, stable_volume_surface, surface_cycle,
    surface_minimality_certificate, torus_model,
};
use crate::rational::{format_rational, parse_rational};
use crate::rings::{parse_ring_spec, RingSpec};

#[derive(Parser, Debug)]
#[command(name = "svol", version, about = "Simplicial volumes over seminormed rings")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the result to a file instead of standard output.
    #[arg(short = 'o', long = "out", visible_alias = "output", global = true)]
    pub out: Option<PathBuf>,
    /// Report the elapsed time on standard error.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Seminorm of a single coefficient.
    Norm {
        #[arg(long)]
        ring: String,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Minimal norm of a class over a ring.
    Minimize(MinimizeArgs),
    /// Emit one of the built-in models.
    #[command(subcommand)]
    Generate(Generate),
    /// Check that a chain is a relative (fundamental) cycle.
    Verify {
        #[arg(long)]
        model: PathBuf,
        /// Chain file; defaults to the model's reference cycle.
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long)]
        ring: String,
    },
    /// Homology of a model or of a raw chain complex.
    Homology {
        #[arg(long, conflicts_with = "complex", required_unless_present = "complex")]
        model: Option<PathBuf>,
        #[arg(long)]
        complex: Option<PathBuf>,
        #[arg(long, default_value = "Z")]
        ring: String,
        #[arg(long)]
        relative: bool,
    },
    /// Lower-bound certificate for a surface cycle.
    CertifySurface {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long, default_value = "Q")]
        ring: String,
        /// Genus and boundary count; read from a `Sigma_g` / `Sigma_g,b` label when omitted.
        #[arg(long)]
        genus: Option<usize>,
        #[arg(long)]
        boundary: Option<usize>,
    },
    /// `p^m · min(p^m · class)` over `(ℤ, |·|_p)` for `m = 0..=max-m`.
    Scaling {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        class: Option<PathBuf>,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        max_m: u32,
    },
    /// One integral cycle close to the minima at several primes at once.
    Simultaneous {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        class: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long)]
        n: u32,
    },
    /// Non-increasing sequence of upper bounds from enumerated cycles.
    Stream {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        class: Option<PathBuf>,
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = DEFAULT_STREAM_BUDGET)]
        budget: u64,
    },
    /// Propagate interval bounds from a facts document.
    Bounds {
        #[arg(long)]
        facts: PathBuf,
    },
    /// `(4 g_k − 2)/k` along the cyclic covers of a closed surface.
    StableSurface {
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value_t = 64)]
        k_max: usize,
    },
    /// Run the acceptance corpus.
    Selftest {
        /// Only run the listed criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub ring: String,
    /// Class representative; defaults to the model's reference cycle.
    #[arg(long)]
    pub class: Option<PathBuf>,
    #[arg(long, default_value = "auto")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget_nodes: u64,
    #[arg(long)]
    pub any_witness: bool,
}

#[derive(Subcommand, Debug)]
pub enum Generate {
    /// `Σ_{g,b}` with its small relative fundamental cycle.
    Surface {
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value_t = 0)]
        boundary: usize,
    },
    Circle,
    Sphere {
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    Torus,
    /// The 2-sphere with a solid tetrahedron attached; its reference cycle has nontrivial shifts.
    Ball,
    /// The k-sheeted cyclic cover of `Σ_g`.
    Cover {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        sheets: usize,
    },
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 2 { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let start = Instant::now();
    let outcome = execute(&cli.command);
    let code = match outcome {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&out.doc).expect("serializable")),
                Format::Text => out.text,
            };
            let written = match &cli.out {
                Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    };
    if cli.timing {
        let _ = writeln!(stderr, "elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    code
}

struct Output {
    doc: Value,
    text: String,
    code: i32,
}

impl Output {
    fn new(doc: Value, text: String) -> Output {
        Output { doc: stamped(doc), text, code: 0 }
    }

    fn plain(doc: Value) -> Output {
        let text = render(&doc);
        Output::new(doc, text)
    }
}

fn stamped(mut doc: Value) -> Value {
    if let Some(obj) = doc.as_object_mut() {
        obj.insert("svol-schema".into(), json!(SCHEMA_VERSION));
    }
    doc
}

/// `key: value` lines for the scalar fields of a document.
fn render(doc: &Value) -> String {
    let mut out = String::new();
    if let Some(obj) = doc.as_object() {
        for (k, v) in obj {
            match v {
                Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
                Value::Object(_) | Value::Array(_) => {}
                other => out.push_str(&format!("{k}: {other}\n")),
            }
        }
    }
    out
}

fn read_json(path: &Path) -> Result<Value> {
    let input = |message: String| SvolError::Input { path: path.to_path_buf(), message };
    let text = fs::read_to_string(path).map_err(|e| input(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| input(format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column())))
}

/// Attaches the file name to errors raised while interpreting its contents.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        SvolError::Input { path: inner, message } => SvolError::Input {
            path: PathBuf::from(format!("{}:{}", path.display(), inner.display())),
            message,
        },
        other => SvolError::Input { path: path.to_path_buf(), message: other.to_string() },
    })
}

fn load_model(path: &Path) -> Result<Model> {
    let v = read_json(path)?;
    in_file(path, Model::from_json(&v))
}

fn load_chain(model: &Model, path: Option<&PathBuf>) -> Result<Chain> {
    let Some(path) = path else { return Ok(model.reference().clone()) };
    let v = read_json(path)?;
    let chain = in_file(path, Chain::from_json(&v))?;
    in_file(path, chain.validate(model))?;
    Ok(chain)
}

fn ring(tag: &str) -> Result<RingSpec> {
    parse_ring_spec(tag)
}

fn execute(command: &Command) -> Result<Output> {
    match command {
        Command::Norm { ring: tag, value } => {
            let r = ring(tag)?;
            let q = parse_rational(value)?;
            let norm = r.norm_of(&q)?;
            let doc = json!({"ring": r.to_string(), "value": format_rational(&q), "norm": format_rational(&norm)});
            Ok(Output::new(doc, format!("{}\n", format_rational(&norm))))
        }
        Command::Minimize(args) => minimize(args),
        Command::Generate(g) => generate(g),
        Command::Verify { model, chain, ring: tag } => {
            let m = load_model(model)?;
            let c = load_chain(&m, chain.as_ref())?;
            let r = ring(tag)?;
            let doc = json!({
                "ring": r.to_string(),
                "relative_cycle": verify_relative_cycle(&m, &c, &r)?,
                "fundamental": verify_fundamental_cycle(&m, &c, &r)?,
                "norm": format_rational(&c.reduce(&r)?.norm(&r)?),
                "support": c.support_size(),
            });
            Ok(Output::plain(doc))
        }
        Command::Homology { model, complex, ring: tag, relative } => {
            let r = ring(tag)?;
            let (summary, primes) = match (model, complex) {
                (Some(path), _) => {
                    let m = load_model(path)?;
                    (homology(&m, &r, *relative)?, Some(elementary_divisor_primes(&m)))
                }
                (None, Some(path)) => {
                    let v = read_json(path)?;
                    let cc = in_file(path, ChainComplex::from_json(&v))?;
                    (complex_homology(&cc, &r, *relative)?, None)
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            let mut doc = serde_json::to_value(&summary).expect("serializable");
            if let Some(primes) = primes {
                doc["elementary_divisor_primes"] = json!(primes);
            }
            let mut text = String::new();
            for d in &summary.degrees {
                let torsion = if d.torsion.is_empty() { String::new() } else { format!(" torsion {}", d.torsion.join(" ")) };
                text.push_str(&format!("H_{} rank {}{torsion}\n", d.degree, d.rank));
            }
            Ok(Output::new(doc, text))
        }
        Command::CertifySurface { model, chain, ring: tag, genus, boundary } => {
            let m = load_model(model)?;
            let c = load_chain(&m, chain.as_ref())?;
            let (g, b) = match (genus, boundary) {
                (Some(g), Some(b)) => (*g, *b),
                _ => {
                    let (lg, lb) = label_topology(&m).ok_or_else(|| {
                        SvolError::Input { path: model.clone(), message: "pass --genus and --boundary".into() }
                    })?;
                    (genus.unwrap_or(lg), boundary.unwrap_or(lb))
                }
            };
            let cert = surface_minimality_certificate(&m, &c, g, b, &ring(tag)?)?;
            let doc = cert.to_json();
            let mut text = render(&doc);
            for step in &cert.steps {
                text.push_str(&format!("  [{}] {}: {}\n", if step.holds { "ok" } else { "no" }, step.name, step.statement));
            }
            Ok(Output::new(doc, text))
        }
        Command::Scaling { model, class, p, max_m } => {
            let m = load_model(model)?;
            let c = load_chain(&m, class.as_ref())?;
            let s = scaling_sequence(&m, &c, *p, *max_m)?;
            let text: String = s.terms.iter().map(|t| format!("m={} {}\n", t.m, format_rational(&t.value))).collect();
            Ok(Output::new(s.to_json(), text))
        }
        Command::Simultaneous { model, class, primes, n } => simultaneous(model, class.as_ref(), primes, *n),
        Command::Stream { model, class, ring: tag, budget } => {
            let m = load_model(model)?;
            let c = load_chain(&m, class.as_ref())?;
            let items: Vec<Value> = upper_bound_stream(&m, &c, ring(tag)?, *budget)?.map(|i| stream_item_json(&i)).collect();
            let text: String = items
                .iter()
                .map(|i| format!("{} after {}\n", i["bound"].as_str().unwrap_or_default(), i["evaluated"]))
                .collect();
            Ok(Output::new(json!({"ring": tag, "budget": budget, "items": items}), text))
        }
        Command::Bounds { facts } => {
            let v = read_json(facts)?;
            let mut kb = in_file(facts, KnowledgeBase::from_json(&v))?;
            let summary = kb.propagate()?;
            let table = kb.export_table();
            let mut doc = table.to_json();
            doc["passes"] = json!(summary.passes);
            doc["converged"] = json!(summary.converged);
            let mut text = String::new();
            for row in &table.rows {
                let hi = row.interval.hi.as_ref().map_or("inf".to_string(), format_rational);
                text.push_str(&format!("{:<24} {:<12} [{}, {}]\n", row.space, row.ring, format_rational(&row.interval.lo), hi));
            }
            for s in &table.separations {
                text.push_str(&format!("separation {} at p={}: {} gap {}\n", s.space, s.p, s.kind, format_rational(&s.gap)));
            }
            Ok(Output::new(doc, text))
        }
        Command::StableSurface { genus, k_max } => {
            let s = stable_volume_surface(*genus, *k_max)?;
            let doc = serde_json::to_value(&s).expect("serializable");
            let text = format!("infimum {} over k <= {}, limit {}\n", s.infimum, k_max, s.limit);
            Ok(Output::new(doc, text))
        }
        Command::Selftest { only } => {
            let outcomes = crate::selftest::run_selected(only);
            let all = outcomes.iter().all(|o| o.passed);
            let text: String = outcomes.iter().map(|o| format!("{}\n", o.line())).collect();
            let doc = json!({"criteria": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>(), "passed": all});
            let mut out = Output::new(doc, text);
            out.code = i32::from(!all);
            Ok(out)
        }
    }
}

fn minimize(args: &MinimizeArgs) -> Result<Output> {
    let m = load_model(&args.model)?;
    let class = load_chain(&m, args.class.as_ref())?;
    let mut problem = MinimizationProblem::new(&m, ring(&args.ring)?)
        .with_class(class.clone())
        .with_strategy(args.strategy)
        .with_budget(args.budget_nodes);
    problem.any_witness = args.any_witness;
    problem.threads = threads_from_env();
    let result = minimal_norm(&problem)?;
    let mut doc = result.to_json();
    doc["verified"] = json!(verify_witness(&m, &class, &result)?);
    let mut text = render(&doc);
    for (id, q) in result.witness.iter() {
        text.push_str(&format!("  {} {id}\n", format_rational(q)));
    }
    Ok(Output::new(doc, text))
}

/// Models are emitted as JSON in either format so that `-o` always yields a loadable file.
fn model_output(doc: Value) -> Output {
    let doc = stamped(doc);
    let text = format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"));
    Output { doc, text, code: 0 }
}

fn generate(g: &Generate) -> Result<Output> {
    let model = match g {
        Generate::Surface { genus, boundary } => surface_cycle(*genus, *boundary)?.0,
        Generate::Circle => circle_model(),
        Generate::Sphere { dim } => sphere_model(*dim)?,
        Generate::Torus => torus_model(),
        Generate::Ball => sphere_with_ball(),
        Generate::Cover { genus, sheets } => {
            let cov = cyclic_cover(*genus, *sheets)?;
            return Ok(model_output(json!({
                "total": cov.total.to_json(),
                "base": cov.base.to_json(),
                "projection": cov.projection,
                "sheets": cov.sheets,
            })));
        }
    };
    Ok(model_output(model.to_json()))
}

fn simultaneous(model: &Path, class: Option<&PathBuf>, primes: &[u64], n: u32) -> Result<Output> {
    let m = load_model(model)?;
    let c = load_chain(&m, class)?;
    let mut witnesses = BTreeMap::new();
    let mut minima = BTreeMap::new();
    for &p in primes {
        let r = minimal_norm(&MinimizationProblem::new(&m, RingSpec::zp(p)).with_class(c.clone()))?;
        minima.insert(p, r.value.clone());
        witnesses.insert(p, r.witness);
    }
    let combined = simultaneous_cycle(&m, &witnesses, n)?;
    let mut doc = combined.to_json();
    let mut text = String::new();
    let mut rows = Vec::new();
    for (&p, min) in &minima {
        let norm = combined.cycle.norm(&RingSpec::zp(p))?;
        text.push_str(&format!("p={p} minimum {} combined {}\n", format_rational(min), format_rational(&norm)));
        rows.push(json!({"p": p, "minimum": format_rational(min), "combined_norm": format_rational(&norm)}));
    }
    doc["per_prime"] = json!(rows);
    doc["mass"] = json!(format_rational(&combined.cycle.mass()));
    Ok(Output::new(doc, text))
}

/// Reads `(g, b)` from a `Sigma_g` or `Sigma_g,b` label.
fn label_topology(model: &Model) -> Option<(usize, usize)> {
    let rest = model.label()?.strip_prefix("Sigma_")?;
    match rest.split_once(',') {
        Some((g, b)) => Some((g.parse().ok()?, b.parse().ok()?)),
        None => Some((rest.parse().ok()?, 0)),
    }
}
