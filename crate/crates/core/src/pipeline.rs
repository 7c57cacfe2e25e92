//! The end-to-end flow behind the command line: parse PDDLS inputs, resolve
//! conditional predicates against the ontology, emit plain PDDL, and run the
//! planner. Also hosts the smaller single-step entry points (translate,
//! canonicalize, query) so they stay testable as library calls.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::alias::{build_translation_maps, render_translations};
use crate::context::{jsonld_to_string, resolve_remote_context, to_jsonld};
use crate::diag::{render_report, Diagnostic};
use crate::planner::{goal_formula, ground, initial_state, search, Plan};
use crate::rdf::{parse_turtle, rdfs_closure, RdfGraph};
use crate::repo::repo_lookup;
use crate::resolver::{emit, resolve_with_options};
use crate::sparql::{evaluate, parse_query};
use crate::syntax::{parse_document, PddlsDocument, Symbol};

/// Exit codes: 0 success, 1 parse error, 2 resolve or rule error, 3 no plan.
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_RESOLVE: i32 = 2;
pub const EXIT_NO_PLAN: i32 = 3;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Resolve(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Parse(_) => EXIT_PARSE,
            PipelineError::Resolve(_) => EXIT_RESOLVE,
        }
    }
}

fn parse_err(context: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Parse(format!("{}: {e}", context.display()))
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Directory for resolving `(:context <URI>)` references locally.
    pub context_dir: Option<PathBuf>,
    /// Entailment closure on by default; disable to evaluate rules over the
    /// raw dataset.
    pub closure_enabled: bool,
    /// Diagnostics go here when set, otherwise to stderr (CLI's choice).
    pub report_path: Option<PathBuf>,
    /// Repository root for domain sources given as IRIs.
    pub repo_root: Option<PathBuf>,
    /// Where `domain.pddl`/`problem.pddl` are written; a fresh temp
    /// directory when unset.
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            context_dir: None,
            closure_enabled: true,
            report_path: None,
            repo_root: None,
            out_dir: None,
        }
    }
}

#[derive(Debug)]
pub struct PipelineOutcome {
    /// `None` when the reachable space is exhausted: the no-plan exit.
    pub plan: Option<Plan>,
    pub domain_path: PathBuf,
    pub problem_path: PathBuf,
    pub diagnostics: Vec<Diagnostic>,
}

fn read_pddls(path: &Path, context_dir: Option<&Path>) -> Result<PddlsDocument, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(path, e))?;
    let mut doc = parse_document(&text).map_err(|e| parse_err(path, e))?;
    if doc.context_ref.is_some() {
        match context_dir {
            Some(dir) => resolve_remote_context(&mut doc, dir).map_err(|e| parse_err(path, e))?,
            None => {
                return Err(parse_err(
                    path,
                    "document uses a (:context <URI>) reference but no --context-dir was given",
                ));
            }
        }
    }
    Ok(doc)
}

/// Parses and unions Turtle files. Blank-node labels are namespaced per
/// file so anonymous nodes never merge across files.
pub fn load_graphs(paths: &[PathBuf]) -> Result<RdfGraph, PipelineError> {
    let mut union = RdfGraph::new();
    for (i, path) in paths.iter().enumerate() {
        let text = std::fs::read_to_string(path).map_err(|e| parse_err(path, e))?;
        let g = parse_turtle(&text, None).map_err(|e| parse_err(path, e))?;
        if paths.len() > 1 {
            union.extend(&g.with_blank_prefix(&format!("g{i}x")));
        } else {
            union.extend(&g);
        }
    }
    Ok(union)
}

fn load_domains(
    cfg: &RunConfig,
    domain_sources: &[String],
) -> Result<Vec<PddlsDocument>, PipelineError> {
    let mut domains = Vec::new();
    for source in domain_sources {
        let path = Path::new(source);
        if path.exists() {
            domains.push(read_pddls(path, cfg.context_dir.as_deref())?);
        } else if source.contains(':') {
            let root = cfg.repo_root.as_ref().ok_or_else(|| {
                PipelineError::Parse(format!(
                    "domain source `{source}` looks like an IRI but no --repo was given"
                ))
            })?;
            match repo_lookup(root, source) {
                Ok(Some(doc)) => domains.push(doc),
                Ok(None) => {
                    return Err(PipelineError::Resolve(format!(
                        "IRI `{source}` is not in the repository"
                    )));
                }
                Err(e) => return Err(PipelineError::Resolve(e.to_string())),
            }
        } else {
            return Err(PipelineError::Parse(format!("domain source `{source}` not found")));
        }
    }
    Ok(domains)
}

/// parse -> resolve -> emit -> plan. Diagnostics are written to the report
/// file when configured; the caller prints the plan and maps the outcome to
/// an exit code.
pub fn run_pipeline(
    cfg: &RunConfig,
    problem_path: &Path,
    domain_sources: &[String],
    ontology_paths: &[PathBuf],
) -> Result<PipelineOutcome, PipelineError> {
    let problem = read_pddls(problem_path, cfg.context_dir.as_deref())?;
    let domains = load_domains(cfg, domain_sources)?;
    let ontology = load_graphs(ontology_paths)?;

    let bundle = resolve_with_options(&problem, &domains, &ontology, cfg.closure_enabled)
        .map_err(|e| PipelineError::Resolve(e.to_string()))?;

    let out_dir = match &cfg.out_dir {
        Some(dir) => dir.clone(),
        None => std::env::temp_dir().join(format!("pddls-run-{}", std::process::id())),
    };
    let (domain_path, problem_path) =
        emit(&bundle, &out_dir).map_err(|e| PipelineError::Resolve(e.to_string()))?;

    if let Some(report) = &cfg.report_path {
        std::fs::write(report, render_report(&bundle.diagnostics))
            .map_err(|e| PipelineError::Resolve(e.to_string()))?;
    }

    let actions = ground(bundle.domain(), &bundle.problem)
        .map_err(|e| PipelineError::Resolve(e.to_string()))?;
    let init = initial_state(&bundle.problem);
    let goal =
        goal_formula(&bundle.problem).map_err(|e| PipelineError::Resolve(e.to_string()))?;
    let plan = search(&init, &goal, &actions);

    Ok(PipelineOutcome { plan, domain_path, problem_path, diagnostics: bundle.diagnostics })
}

/// The `resolve` subcommand: everything but planning.
pub fn resolve_files(
    cfg: &RunConfig,
    problem_path: &Path,
    domain_sources: &[String],
    ontology_paths: &[PathBuf],
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf, Vec<Diagnostic>), PipelineError> {
    let problem = read_pddls(problem_path, cfg.context_dir.as_deref())?;
    let domains = load_domains(cfg, domain_sources)?;
    let ontology = load_graphs(ontology_paths)?;
    let bundle = resolve_with_options(&problem, &domains, &ontology, cfg.closure_enabled)
        .map_err(|e| PipelineError::Resolve(e.to_string()))?;
    let (d, p) = emit(&bundle, out_dir).map_err(|e| PipelineError::Resolve(e.to_string()))?;
    if let Some(report) = &cfg.report_path {
        std::fs::write(report, render_report(&bundle.diagnostics))
            .map_err(|e| PipelineError::Resolve(e.to_string()))?;
    }
    Ok((d, p, bundle.diagnostics))
}

/// The `plan` subcommand over already-plain PDDL files.
pub fn plan_files(domain_path: &Path, problem_path: &Path) -> Result<Option<Plan>, PipelineError> {
    let domain = read_pddls(domain_path, None)?;
    let problem = read_pddls(problem_path, None)?;
    let actions = ground(&domain, &problem).map_err(|e| PipelineError::Resolve(e.to_string()))?;
    let init = initial_state(&problem);
    let goal = goal_formula(&problem).map_err(|e| PipelineError::Resolve(e.to_string()))?;
    Ok(search(&init, &goal, &actions))
}

/// The `translate` subcommand: PDDLS to its JSON-LD form.
pub fn translate_file(path: &Path, context_dir: Option<&Path>) -> Result<String, PipelineError> {
    let doc = read_pddls(path, context_dir)?;
    Ok(jsonld_to_string(&to_jsonld(&doc)))
}

/// The `canonicalize` subcommand: per-domain translation maps as text.
pub fn canonicalize_files(
    problem_path: &Path,
    domain_paths: &[PathBuf],
) -> Result<String, PipelineError> {
    let problem = read_pddls(problem_path, None)?;
    let mut ctxs: Vec<(Symbol, crate::context::ContextMap)> = Vec::new();
    for path in domain_paths {
        let doc = read_pddls(path, None)?;
        ctxs.push((doc.name.clone(), doc.context.clone()));
    }
    let canon = build_translation_maps(&problem.context, &ctxs)
        .map_err(|e| PipelineError::Resolve(e.to_string()))?;
    Ok(render_translations(&canon.translations))
}

/// The `query` subcommand: tab-separated sorted bindings.
pub fn query_files(
    graph_paths: &[PathBuf],
    sparql_path: &Path,
    closure: bool,
) -> Result<String, PipelineError> {
    let graph = load_graphs(graph_paths)?;
    let graph = if closure { rdfs_closure(&graph) } else { graph };
    let text = std::fs::read_to_string(sparql_path).map_err(|e| parse_err(sparql_path, e))?;
    let query = parse_query(&text).map_err(|e| parse_err(sparql_path, e))?;
    Ok(evaluate(&query, &graph).to_tsv())
}
