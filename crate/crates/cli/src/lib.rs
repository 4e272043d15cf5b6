//! Command-line surface for `ctxcat`.
//!
//! Exit codes: 0 success, 1 usage, parse or validation error, 2 internal
//! invariant violation (order cycles, ambiguous restrictions, failed
//! functoriality).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::{json, Value};

use ctxcat::io::{
    datasheets_to_json, ingest_datasheets, load_model, parse_projection, poset_dot, poset_to_json,
    projection_to_json, write_atomic,
};
use ctxcat::presheaf::check_functoriality;
use ctxcat::topologimeter::{
    build_topologimeter, maximality_check, measure, topology_report, ContextTag, GridModel, Mode,
};
use ctxcat::{daseinise, minimax_contexts, ContextId, Error};

#[derive(Debug, Parser)]
#[command(
    name = "ctxcat",
    version,
    about = "Context categories, daseinisation and minimax contexts"
)]
struct Cli {
    /// Print machine-readable JSON on standard output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate the contexts generated by a model and write the poset.
    Enumerate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Outer and inner daseinisation of a projection.
    #[command(group(ArgGroup::new("target").required(true).args(["context", "all"])))]
    Daseinise {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        projection: PathBuf,
        #[arg(long)]
        context: Option<usize>,
        #[arg(long)]
        all: bool,
    },
    /// Resolution-maximal, redundancy-minimal contexts.
    Minimax {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Verify that restriction maps compose along every chain.
    PresheafCheck {
        #[arg(long)]
        model: PathBuf,
    },
    /// Line-versus-circle toy model on an m × n grid.
    Topologimeter {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        measure: bool,
        #[arg(long, default_value_t = 0, requires = "measure")]
        seed: u64,
        #[arg(long)]
        full_matrix: bool,
    },
    /// Reshape CSV datasheets into rows × cols tables.
    Ingest {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Input(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_invariant_violation() {
            Failure::Invariant(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Invariant(_) => 2,
        }
    }
}

struct Output {
    json: Value,
    text: String,
    code: i32,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output {
            json,
            text,
            code: 0,
        }
    }
}

pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(o) => {
            let printed = if cli.json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&o.json).unwrap_or_default()
                )
            } else {
                write!(out, "{}", o.text)
            };
            if printed.is_err() {
                return 1;
            }
            o.code
        }
        Err(f) => {
            let _ = match &f {
                Failure::Input(msg) => writeln!(err, "error: {msg}"),
                Failure::Invariant(msg) => writeln!(err, "invariant violation: {msg}"),
            };
            f.code()
        }
    }
}

fn execute(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Enumerate { model, out } => {
            let model = load_model(model)?;
            let poset = model.enumerate()?;
            let text = poset_to_json(&poset, &model.observable_names(), &model.tolerance)?;
            write_atomic(out, text.as_bytes())?;
            let contexts: Vec<Value> = poset
                .ids()
                .map(|id| {
                    let c = poset.context(id).expect("id from poset");
                    json!({"id": id, "dim": c.dim(), "points": c.algebra_dim(), "key": c.key_hex()})
                })
                .collect();
            Ok(Output::ok(
                json!({
                    "contexts": contexts,
                    "hasse_edges": poset.hasse_edges(),
                    "out": out,
                }),
                format!(
                    "{} contexts, {} Hasse edges; written to {}\n",
                    poset.len(),
                    poset.hasse_edges().len(),
                    out.display()
                ),
            ))
        }
        Command::Daseinise {
            model,
            projection,
            context,
            all,
        } => {
            let model = load_model(model)?;
            let poset = model.enumerate()?;
            let text = std::fs::read_to_string(projection).map_err(Error::from)?;
            let p = parse_projection(&text, &model.tolerance)?;
            let ids: Vec<ContextId> = if *all {
                poset.ids().collect()
            } else {
                let id = ContextId(context.expect("clap group requires one"));
                poset.context(id)?;
                vec![id]
            };
            let mut results = Vec::new();
            let mut text = String::new();
            for id in ids {
                let v = poset.context(id)?;
                if v.dim() != p.dim() {
                    if *all {
                        continue;
                    }
                    return Err(Error::DimensionMismatch {
                        left: p.dim(),
                        right: v.dim(),
                    }
                    .into());
                }
                let r = daseinise(&p, id, v, &model.tolerance)?;
                text.push_str(&format!(
                    "{id}: inner rank {}, outer rank {}\n",
                    r.inner.rank(),
                    r.outer.rank()
                ));
                results.push(json!({
                    "context": id,
                    "inner": projection_to_json(&r.inner),
                    "outer": projection_to_json(&r.outer),
                }));
            }
            Ok(Output::ok(
                json!({"projection_rank": p.rank(), "results": results}),
                text,
            ))
        }
        Command::Minimax { model, dot } => {
            let model = load_model(model)?;
            let poset = model.enumerate()?;
            let registry = model.registry(&poset)?;
            let report = minimax_contexts(&poset, &registry)?;
            if let Some(path) = dot {
                let s = poset_dot(&poset, &model.observable_names(), &registry, &report)?;
                write_atomic(path, s.as_bytes())?;
            }
            let list = |ids: &[ContextId]| {
                ids.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let mut text = format!(
                "resolution-maximal: {}\nredundancy-minimal: {}\nminimax: {}\n",
                list(&report.resolution_maximal),
                list(&report.redundancy_minimal),
                list(&report.minimax)
            );
            for tie in &report.ties {
                text.push_str(&format!("tie: {}\n", list(tie)));
            }
            for cycle in &report.redundancy_cycles {
                text.push_str(&format!("redundancy cycle: {}\n", list(cycle)));
            }
            Ok(Output::ok(
                serde_json::to_value(&report).expect("report serializes"),
                text,
            ))
        }
        Command::PresheafCheck { model } => {
            let model = load_model(model)?;
            let poset = model.enumerate()?;
            let report = check_functoriality(&poset, &model.tolerance)?;
            let text = format!(
                "{} chains checked, {} violations\n",
                report.chains_checked,
                report.violations.len()
            );
            let code = if report.passed() { 0 } else { 2 };
            Ok(Output {
                json: serde_json::to_value(&report).expect("report serializes"),
                text,
                code,
            })
        }
        Command::Topologimeter {
            m,
            n,
            measure: do_measure,
            seed,
            full_matrix,
        } => {
            let grid = GridModel::new(*m, *n)?;
            let tol = ctxcat::ToleranceConfig::default();
            let mode = if *full_matrix {
                Mode::FullMatrix
            } else {
                Mode::Structured
            };
            let model = build_topologimeter(grid, mode, &tol)?;
            let mut contexts = BTreeMap::new();
            let mut b1 = BTreeMap::new();
            let mut text = String::new();
            for tag in [ContextTag::A1, ContextTag::A2] {
                let report = topology_report(&model.spectrum_graph(tag));
                text.push_str(&format!(
                    "{tag}: {} points, {} components, b1 total {}\n",
                    model.spectrum_size(tag),
                    report.total_b0,
                    report.total_b1
                ));
                for c in &report.components {
                    text.push_str(&format!(
                        "  {:?}: {} vertices, {} edges, b1 {} ({:?})\n",
                        c.block.expect("one block per component"),
                        c.vertices,
                        c.edges,
                        c.b1,
                        c.class
                    ));
                }
                b1.insert(tag.to_string(), report.total_b1);
                contexts.insert(
                    tag.to_string(),
                    json!({"spectrum_size": model.spectrum_size(tag), "topology": report}),
                );
            }
            let mut result = json!({
                "grid": grid,
                "mode": mode,
                "contexts": contexts,
                "b1_totals": b1,
            });
            if *do_measure {
                let mut outcomes = Vec::new();
                for tag in [ContextTag::A1, ContextTag::A2] {
                    let o = measure(&model, tag, *seed)?;
                    text.push_str(&format!(
                        "measure {tag} (seed {seed}): {:?} block, {:?}\n",
                        o.block, o.topology.class
                    ));
                    outcomes.push(o);
                }
                result["measurements"] = serde_json::to_value(&outcomes).expect("serializes");
            }
            if *full_matrix {
                let agree = model.cross_mode_agreement(&tol)?;
                for (tag, ok) in &agree {
                    text.push_str(&format!(
                        "cross-mode {tag}: {}\n",
                        if *ok { "agree" } else { "DIFFER" }
                    ));
                }
                result["cross_mode"] = json!(agree
                    .iter()
                    .map(|(t, ok)| (t.to_string(), *ok))
                    .collect::<BTreeMap<_, _>>());
                if grid.ambient_dim() <= ctxcat::matrix::MAX_COMMUTANT_DIM {
                    let rep = maximality_check(grid, &tol)?;
                    for (tag, e) in &rep.entries {
                        text.push_str(&format!(
                            "maximality {tag}: commutant {} vs context {} ({})\n",
                            e.commutant_dim,
                            e.context_dim,
                            if e.maximal { "maximal" } else { "not maximal" }
                        ));
                    }
                    result["maximality"] = serde_json::to_value(&rep).expect("serializes");
                }
                if agree.values().any(|ok| !ok) {
                    return Ok(Output {
                        json: result,
                        text,
                        code: 2,
                    });
                }
            }
            Ok(Output::ok(result, text))
        }
        Command::Ingest {
            csv,
            rows,
            cols,
            out,
        } => {
            let file = std::fs::File::open(csv).map_err(Error::from)?;
            let tables = ingest_datasheets(file, *rows, *cols)?;
            let value = datasheets_to_json(&tables);
            let text = serde_json::to_string_pretty(&value).expect("serializes");
            write_atomic(out, text.as_bytes())?;
            Ok(Output::ok(
                json!({"tables": tables.len(), "rows": rows, "cols": cols, "out": out}),
                format!(
                    "{} tables ({rows}x{cols}) written to {}\n",
                    tables.len(),
                    out.display()
                ),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        let cycle = Error::CycleDetected(ContextId(0), ContextId(1));
        assert_eq!(Failure::from(cycle).code(), 2);
        assert_eq!(
            Failure::from(Error::AmbiguousRestriction { index: 3 }).code(),
            2
        );
        assert_eq!(Failure::from(Error::Validation("x".into())).code(), 1);
        assert_eq!(Failure::from(Error::Parse("x".into())).code(), 1);
    }

    #[test]
    fn help_exits_zero() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run_cli(["ctxcat", "--help"], &mut out, &mut err), 0);
        assert!(String::from_utf8(out).unwrap().contains("presheaf-check"));
    }
}
