//! `reedy` — validate and analyze finite Reedy categories from the shell.
//!
//! Exit codes: 0 the requested property holds (or the command succeeded),
//! 1 the property fails, 2 invalid input or a resource limit was hit.
//! All output is deterministic for a fixed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use reedy_core::files::{self, load_diagram, load_functor, LoadedCategory};
use reedy_core::quillen::{self, FiberingReport};
use reedy_core::{catalog, counterexample, setdiag, size, Error};

#[derive(Parser)]
#[command(name = "reedy", version, about = "Finite Reedy categories: validation, fibering analysis, limits, and catalog export")]
struct RunConfig {
    /// Override the global size guard (equivalent to REEDY_LIMIT).
    #[arg(long, global = true)]
    limit: Option<usize>,

    /// Output format for verdict-style commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a category, functor, or diagram file.
    Validate {
        /// Path to the JSON file; its kind is detected from the keys.
        path: PathBuf,
    },
    /// Decide whether a Reedy functor is fibering and/or cofibering.
    Analyze {
        /// Path to a functor file between Reedy categories.
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        /// List the failing anchors (α, β, σ) behind a negative verdict.
        #[arg(long)]
        witness: bool,
    },
    /// Compute the index set S, its quotient T, and the index map at an anchor.
    Matchprod {
        /// Path to a functor file between Reedy categories.
        path: PathBuf,
        /// Source object α.
        #[arg(long)]
        alpha: String,
        /// Target object β (in the target category).
        #[arg(long)]
        beta: String,
    },
    /// Compute a limit-style construction of a set-valued diagram.
    Limits {
        /// Path to a diagram file.
        path: PathBuf,
        #[arg(long, value_enum)]
        op: LimitOp,
        /// Anchor object (required for matching/latching).
        #[arg(long)]
        alpha: Option<String>,
        /// Functor file to extend along (required for kan).
        #[arg(long)]
        along: Option<PathBuf>,
        /// Which Kan extension (required for kan).
        #[arg(long, value_enum)]
        side: Option<SideArg>,
    },
    /// Decide left/right cofinality of a functor.
    Cofinal {
        /// Path to a functor file.
        path: PathBuf,
        #[arg(long, value_enum)]
        side: SideArg,
    },
    /// Write a named catalog category or functor to disk.
    Catalog {
        /// Builder name; `list` prints all known names.
        name: String,
        /// Output directory (created if missing).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Maximum degree (for `delta` and `delta-rest`).
        #[arg(long)]
        max_degree: Option<usize>,
        /// Simplex dimension bound n (for `diagonal`).
        #[arg(long)]
        n: Option<usize>,
        /// Number of factors m (for `diagonal`).
        #[arg(long)]
        m: Option<usize>,
        /// Seed (for `random` and `random-category`).
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Fibering,
    Cofibering,
    Both,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LimitOp {
    Limit,
    Colimit,
    Matching,
    Latching,
    Kan,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    if let Some(limit) = config.limit {
        size::set_limit(limit);
    }
    match run(&config) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(config: &RunConfig) -> Result<u8, Error> {
    match &config.command {
        Command::Validate { path } => cmd_validate(path, config.format),
        Command::Analyze { path, mode, witness } => {
            cmd_analyze(path, *mode, *witness, config.format)
        }
        Command::Matchprod { path, alpha, beta } => {
            cmd_matchprod(path, alpha, beta, config.format)
        }
        Command::Limits { path, op, alpha, along, side } => {
            cmd_limits(path, *op, alpha.as_deref(), along.as_deref(), *side)
        }
        Command::Cofinal { path, side } => cmd_cofinal(path, *side, config.format),
        Command::Catalog { name, out, max_degree, n, m, seed } => {
            cmd_catalog(name, out, *max_degree, *n, *m, *seed)
        }
    }
}

fn emit(format: Format, value: &Value, text: impl FnOnce() -> String) {
    match format {
        Format::Json => print!("{}", files::canonical_json(value)),
        Format::Text => println!("{}", text()),
    }
}

/// Detect the file kind from its top-level keys and run the validator.
fn cmd_validate(path: &Path, format: Format) -> Result<u8, Error> {
    let text = files::read_file(path)?;
    let value: Value = serde_json::from_str(&text)?;
    let keys = value.as_object().ok_or_else(|| Error::PreconditionFailed {
        detail: "top-level JSON value is not an object".into(),
    })?;

    let (kind, detail, sentence) = if keys.contains_key("on_objects") {
        let functor = load_functor(path)?;
        let data = functor.data();
        let kind = if functor.reedy().is_some() { "reedy functor" } else { "functor" };
        let (s, t) = (data.source().object_count(), data.target().object_count());
        (
            kind,
            json!({ "source_objects": s, "target_objects": t }),
            format!("{s} source objects, {t} target objects"),
        )
    } else if keys.contains_key("sets") {
        let (shape, diagram) = load_diagram(path)?;
        let objects = shape.base().object_count();
        let elements: usize = (0..objects).map(|o| diagram.set_len(o)).sum();
        (
            "diagram",
            json!({ "objects": objects, "elements": elements }),
            format!("{objects} objects, {elements} elements"),
        )
    } else if keys.contains_key("objects") {
        let category = files::parse_category(&text)?;
        let kind = match &category {
            LoadedCategory::Reedy(_) => "reedy category",
            LoadedCategory::Plain(_) => "category",
        };
        let (o, m) = (
            category.base().object_count(),
            category.base().morphism_count(),
        );
        (
            kind,
            json!({ "objects": o, "morphisms": m }),
            format!("{o} objects, {m} morphisms"),
        )
    } else {
        return Err(Error::PreconditionFailed {
            detail: "file is neither a category, functor, nor diagram (unrecognized keys)".into(),
        });
    };

    emit(format, &json!({ "valid": true, "kind": kind, "summary": detail }), || {
        format!("valid {kind}: {sentence}")
    });
    Ok(0)
}

fn witness_values(report: &FiberingReport) -> Vec<Value> {
    report
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "alpha": w.alpha,
                "beta": w.beta,
                "sigma": w.sigma,
                "side": w.side,
                "components": w.components,
                "empty": w.empty,
            })
        })
        .collect()
}

fn witness_lines(report: &FiberingReport, out: &mut String) {
    for w in &report.witnesses {
        out.push_str(&format!(
            "  witness: alpha={} beta={} sigma={} components={} empty={}\n",
            w.alpha, w.beta, w.sigma, w.components, w.empty
        ));
    }
}

fn cmd_analyze(path: &Path, mode: Mode, witness: bool, format: Format) -> Result<u8, Error> {
    let functor = load_functor(path)?;
    let g = functor.reedy().ok_or_else(|| Error::PreconditionFailed {
        detail: "analyze needs a functor between Reedy categories (objects with degrees)".into(),
    })?;

    let mut verdicts = serde_json::Map::new();
    let mut witnesses = Vec::new();
    let mut text = String::new();
    let mut all_hold = true;

    let mut push = |label: &str, report: FiberingReport| {
        all_hold &= report.holds;
        text.push_str(&format!(
            "{label}: {}\n",
            if report.holds { "holds" } else { "fails" }
        ));
        if witness && !report.holds {
            witness_lines(&report, &mut text);
        }
        witnesses.extend(witness_values(&report));
        verdicts.insert(label.to_string(), Value::Bool(report.holds));
    };

    if mode != Mode::Cofibering {
        push("fibering", quillen::is_fibering(g)?);
    }
    if mode != Mode::Fibering {
        push("cofibering", quillen::is_cofibering(g)?);
    }
    verdicts.insert("witnesses".into(), Value::Array(witnesses));

    emit(format, &Value::Object(verdicts), || text.trim_end().to_string());
    Ok(if all_hold { 0 } else { 1 })
}

fn cmd_matchprod(path: &Path, alpha: &str, beta: &str, format: Format) -> Result<u8, Error> {
    let functor = load_functor(path)?;
    let g = functor.reedy().ok_or_else(|| Error::PreconditionFailed {
        detail: "matchprod needs a functor between Reedy categories".into(),
    })?;
    let report = counterexample::index_report(g, alpha, beta)?;

    emit(format, &serde_json::to_value(&report)?, || {
        let mut text = format!(
            "anchor: alpha={alpha} beta={beta}\nS: {} elements\nT: {} classes\nindex map: {}\nmatching product: {}",
            report.elements.len(),
            report.classes.len(),
            if report.injective { "injective" } else { "not injective" },
            if report.matching_product_holds { "holds" } else { "fails" },
        );
        for (name, class) in report.class_names.iter().zip(&report.classes) {
            let members: Vec<String> = class
                .iter()
                .map(|&e| {
                    let el = &report.elements[e];
                    format!("({}|{})", el.nu, el.mu)
                })
                .collect();
            text.push_str(&format!("\n  class {name}: [{}]", members.join(", ")));
        }
        text
    });
    Ok(if report.matching_product_holds { 0 } else { 1 })
}

fn cmd_limits(
    path: &Path,
    op: LimitOp,
    alpha: Option<&str>,
    along: Option<&Path>,
    side: Option<SideArg>,
) -> Result<u8, Error> {
    let (shape, diagram) = load_diagram(path)?;

    let need_alpha = || {
        alpha.ok_or_else(|| Error::PreconditionFailed {
            detail: "this operation needs --alpha".into(),
        })
    };
    let need_reedy = || {
        shape.reedy().ok_or_else(|| Error::PreconditionFailed {
            detail: "this operation needs a Reedy shape (objects with degrees)".into(),
        })
    };

    let value = match op {
        LimitOp::Limit => {
            let l = setdiag::limit(&diagram)?;
            json!({ "op": "limit", "size": l.names.len(), "elements": l.names })
        }
        LimitOp::Colimit => {
            let c = setdiag::colimit(&diagram)?;
            let members: Vec<Vec<String>> = c
                .classes
                .iter()
                .map(|class| {
                    class
                        .iter()
                        .map(|&(o, e)| {
                            format!(
                                "{}.{}",
                                shape.base().object_id(o),
                                diagram.set(o)[e as usize]
                            )
                        })
                        .collect()
                })
                .collect();
            json!({ "op": "colimit", "size": c.names.len(), "classes": c.names, "members": members })
        }
        LimitOp::Matching => {
            let data = setdiag::matching_object(need_reedy()?, &diagram, need_alpha()?)?;
            json!({
                "op": "matching",
                "alpha": alpha,
                "category_objects": data.category.object_arrows,
                "size": data.object.names.len(),
                "elements": data.object.names,
                "map": serde_json::to_value(&data.map)?,
            })
        }
        LimitOp::Latching => {
            let data = setdiag::latching_object(need_reedy()?, &diagram, need_alpha()?)?;
            json!({
                "op": "latching",
                "alpha": alpha,
                "category_objects": data.category.object_arrows,
                "size": data.object.names.len(),
                "classes": data.object.names,
                "map": serde_json::to_value(&data.map)?,
            })
        }
        LimitOp::Kan => {
            let along = along.ok_or_else(|| Error::PreconditionFailed {
                detail: "kan needs --along <functor file>".into(),
            })?;
            let side = side.ok_or_else(|| Error::PreconditionFailed {
                detail: "kan needs --side left|right".into(),
            })?;
            let functor = load_functor(along)?;
            let extended = match side {
                SideArg::Left => setdiag::left_kan(functor.data(), &diagram)?,
                SideArg::Right => setdiag::right_kan(functor.data(), &diagram)?,
            };
            let target = functor.data().target();
            let sets: serde_json::Map<String, Value> = (0..target.object_count())
                .map(|o| {
                    (
                        target.object_id(o).to_string(),
                        Value::Array(
                            extended.set(o).iter().map(|e| Value::String(e.clone())).collect(),
                        ),
                    )
                })
                .collect();
            json!({
                "op": "kan",
                "side": if side == SideArg::Left { "left" } else { "right" },
                "sets": sets,
            })
        }
    };

    print!("{}", files::canonical_json(&value));
    Ok(0)
}

fn cmd_cofinal(path: &Path, side: SideArg, format: Format) -> Result<u8, Error> {
    let functor = load_functor(path)?;
    let report = match side {
        SideArg::Left => setdiag::is_left_cofinal(functor.data())?,
        SideArg::Right => setdiag::is_right_cofinal(functor.data())?,
    };
    let side_name = if side == SideArg::Left { "left" } else { "right" };
    emit(
        format,
        &json!({
            "side": side_name,
            "holds": report.holds,
            "failing": report.failing,
            "checked": report.checked,
        }),
        || match &report.failing {
            Some(object) => format!("{side_name} cofinal: fails at `{object}`"),
            None => format!("{side_name} cofinal: holds ({} objects checked)", report.checked),
        },
    );
    Ok(if report.holds { 0 } else { 1 })
}

fn cmd_catalog(
    name: &str,
    out: &Path,
    max_degree: Option<usize>,
    n: Option<usize>,
    m: Option<usize>,
    seed: Option<u64>,
) -> Result<u8, Error> {
    let entries = catalog::catalog_functors()?;
    if name == "list" {
        println!("delta (--max-degree)");
        println!("delta-rest (--max-degree)");
        println!("diagonal (--n, --m)");
        println!("random (--seed)");
        println!("random-category (--seed)");
        for (entry, _) in &entries {
            println!("{entry}");
        }
        return Ok(0);
    }

    std::fs::create_dir_all(out)?;
    let need = |flag: &str, missing: bool| {
        if missing {
            Err(Error::PreconditionFailed {
                detail: format!("`{name}` needs {flag}"),
            })
        } else {
            Ok(())
        }
    };

    let written: Vec<PathBuf> = match name {
        "delta" => {
            need("--max-degree", max_degree.is_none())?;
            let degree = max_degree.unwrap();
            let delta = catalog::delta_truncated(degree)?;
            let path = out.join(format!("delta{degree}.json"));
            files::write_category(&path, &delta)?;
            vec![path]
        }
        "delta-rest" => {
            need("--max-degree", max_degree.is_none())?;
            let degree = max_degree.unwrap();
            let (_, inclusion) = catalog::delta_rest_truncated(degree)?;
            files::write_functor_files(out, &format!("delta-rest{degree}"), &inclusion)?
        }
        "diagonal" => {
            need("--n", n.is_none())?;
            need("--m", m.is_none())?;
            let functor = catalog::diagonal_functor(n.unwrap(), m.unwrap())?;
            files::write_functor_files(out, &format!("diagonal{}x{}", n.unwrap(), m.unwrap()), &functor)?
        }
        "random" => {
            need("--seed", seed.is_none())?;
            let functor = catalog::random_reedy_functor(seed.unwrap(), &Default::default())?;
            files::write_functor_files(out, &format!("random{}", seed.unwrap()), &functor)?
        }
        "random-category" => {
            need("--seed", seed.is_none())?;
            let category = catalog::random_reedy(seed.unwrap(), &Default::default())?;
            let path = out.join(format!("random-category{}.json", seed.unwrap()));
            files::write_category(&path, &category)?;
            vec![path]
        }
        other => match entries.iter().find(|(entry, _)| entry == other) {
            Some((entry, functor)) => files::write_functor_files(out, entry, functor)?,
            None => {
                return Err(Error::PreconditionFailed {
                    detail: format!("unknown catalog name `{other}` (try `reedy catalog list`)"),
                })
            }
        },
    };

    for path in &written {
        println!("{}", path.display());
    }
    Ok(0)
}
