//! `pddls`: parse PDDLS, resolve conditional predicates against an RDF
//! ontology, emit plain PDDL, and plan.
//!
//! Exit codes: 0 success, 1 parse error, 2 resolve/rule error, 3 no plan.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pddls_core::diag::render_report;
use pddls_core::pipeline::{
    canonicalize_files, plan_files, query_files, resolve_files, run_pipeline, translate_file,
    PipelineError, RunConfig, EXIT_NO_PLAN,
};
use pddls_core::repo::{load_index, repo_add, repo_lookup};
use pddls_core::syntax::print_pddl;

#[derive(Parser)]
#[command(name = "pddls", version, about = "PDDLS resolver, translator and planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a PDDLS document to its JSON-LD form
    Translate {
        file: PathBuf,
        /// Write JSON here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Directory for resolving (:context <URI>) references
        #[arg(long)]
        context_dir: Option<PathBuf>,
    },
    /// Build and print per-domain symbol translation maps
    Canonicalize {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long = "domain", required = true)]
        domains: Vec<PathBuf>,
    },
    /// Evaluate a SPARQL query over one or more Turtle graphs
    Query {
        #[arg(long = "graph", required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long)]
        sparql: PathBuf,
        /// Materialize entailments before evaluating
        #[arg(long)]
        closure: bool,
    },
    /// Resolve a problem against domains and an ontology; emit plain PDDL
    Resolve {
        #[arg(long)]
        problem: PathBuf,
        /// Domain file path or repository IRI; repeatable
        #[arg(long = "domain", required = true)]
        domains: Vec<String>,
        #[arg(long = "ontology")]
        ontology: Vec<PathBuf>,
        #[arg(long = "objects")]
        objects: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        /// Write diagnostics to this file instead of stderr
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        context_dir: Option<PathBuf>,
        /// Repository root for IRI domain sources
        #[arg(long)]
        repo: Option<PathBuf>,
        /// Evaluate rules over the raw dataset, skipping entailment closure
        #[arg(long)]
        no_closure: bool,
    },
    /// Find a shortest plan for a plain PDDL domain/problem pair
    Plan {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        domain: PathBuf,
    },
    /// Full pipeline: parse, resolve, emit, plan, print the plan
    Run {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long = "domain", required = true)]
        domains: Vec<String>,
        #[arg(long = "ontology")]
        ontology: Vec<PathBuf>,
        #[arg(long = "objects")]
        objects: Vec<PathBuf>,
        /// Where to write domain.pddl/problem.pddl (temp dir when omitted)
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        context_dir: Option<PathBuf>,
        #[arg(long)]
        repo: Option<PathBuf>,
        #[arg(long)]
        no_closure: bool,
    },
    /// Manage the IRI-indexed domain repository
    Repo {
        #[command(subcommand)]
        action: RepoAction,
    },
}

#[derive(Subcommand)]
enum RepoAction {
    /// Add a PDDLS domain file to the repository
    Add {
        #[arg(long)]
        root: PathBuf,
        file: PathBuf,
    },
    /// List indexed IRIs and their files
    List {
        #[arg(long)]
        root: PathBuf,
    },
    /// Print the domain stored under an IRI
    Get {
        #[arg(long)]
        root: PathBuf,
        iri: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, PipelineError> {
    match cli.command {
        Command::Translate { file, output, context_dir } => {
            let json = translate_file(&file, context_dir.as_deref())?;
            match output {
                Some(path) => std::fs::write(path, json)
                    .map_err(|e| PipelineError::Resolve(e.to_string()))?,
                None => print!("{json}"),
            }
            Ok(0)
        }
        Command::Canonicalize { problem, domains } => {
            print!("{}", canonicalize_files(&problem, &domains)?);
            Ok(0)
        }
        Command::Query { graphs, sparql, closure } => {
            print!("{}", query_files(&graphs, &sparql, closure)?);
            Ok(0)
        }
        Command::Resolve {
            problem,
            domains,
            ontology,
            objects,
            out,
            report,
            context_dir,
            repo,
            no_closure,
        } => {
            let cfg = RunConfig {
                context_dir,
                closure_enabled: !no_closure,
                report_path: report.clone(),
                repo_root: repo,
                out_dir: Some(out.clone()),
            };
            let graphs = [ontology, objects].concat();
            let (domain_path, problem_path, diagnostics) =
                resolve_files(&cfg, &problem, &domains, &graphs, &out)?;
            if report.is_none() && !diagnostics.is_empty() {
                eprint!("{}", render_report(&diagnostics));
            }
            println!("{}", domain_path.display());
            println!("{}", problem_path.display());
            Ok(0)
        }
        Command::Plan { problem, domain } => match plan_files(&domain, &problem)? {
            Some(plan) => {
                print!("{}", plan.render());
                Ok(0)
            }
            None => {
                eprintln!("no plan found");
                Ok(EXIT_NO_PLAN as u8)
            }
        },
        Command::Run {
            problem,
            domains,
            ontology,
            objects,
            out,
            report,
            context_dir,
            repo,
            no_closure,
        } => {
            let cfg = RunConfig {
                context_dir,
                closure_enabled: !no_closure,
                report_path: report.clone(),
                repo_root: repo,
                out_dir: out,
            };
            let graphs = [ontology, objects].concat();
            let outcome = run_pipeline(&cfg, &problem, &domains, &graphs)?;
            if report.is_none() && !outcome.diagnostics.is_empty() {
                eprint!("{}", render_report(&outcome.diagnostics));
            }
            match outcome.plan {
                Some(plan) => {
                    print!("{}", plan.render());
                    Ok(0)
                }
                None => {
                    eprintln!("no plan found");
                    Ok(EXIT_NO_PLAN as u8)
                }
            }
        }
        Command::Repo { action } => match action {
            RepoAction::Add { root, file } => {
                let index =
                    repo_add(&root, &file).map_err(|e| PipelineError::Resolve(e.to_string()))?;
                eprintln!("indexed {} IRI(s)", index.len());
                Ok(0)
            }
            RepoAction::List { root } => {
                let index =
                    load_index(&root).map_err(|e| PipelineError::Resolve(e.to_string()))?;
                for (iri, path) in index.entries() {
                    println!("{iri}\t{path}");
                }
                Ok(0)
            }
            RepoAction::Get { root, iri } => {
                match repo_lookup(&root, &iri)
                    .map_err(|e| PipelineError::Resolve(e.to_string()))?
                {
                    Some(doc) => {
                        print!("{}", print_pddl(&doc, false));
                        Ok(0)
                    }
                    None => Err(PipelineError::Resolve(format!("IRI `{iri}` not found"))),
                }
            }
        },
    }
}
