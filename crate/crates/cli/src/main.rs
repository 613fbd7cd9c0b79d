mod project;
mod server;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ontopop_core::expansion::{run_expansion, ManchesterOptions, PrepareError};
use ontopop_core::io::{fetch_ontology, sniff_format, FetchOptions};
use ontopop_core::error::FetchError;
use ontopop_core::validation::{autocomplete, CellStatus};

use project::{cell_ref, load_binding, load_registry, read, write, InputError, Project};

#[derive(Parser)]
#[command(name = "ontopop", version, about = "Populate ontologies from ontology-constrained table templates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every cell of a table against its column's range.
    Validate {
        #[arg(long)]
        descriptor: PathBuf,
        #[arg(long)]
        table: PathBuf,
    },
    /// Expand table rows through patterns into OWL.
    Expand {
        #[arg(long)]
        descriptor: PathBuf,
        #[arg(long)]
        table: PathBuf,
        /// Pattern file; repeat to apply several patterns in order.
        #[arg(long = "pattern", required = true)]
        patterns: Vec<PathBuf>,
        /// JSON map from variable name to column name.
        #[arg(long)]
        binding: PathBuf,
        /// Mint registry; updated in place.
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Expand only these 0-based rows.
        #[arg(long = "row")]
        rows: Vec<usize>,
        /// Include rdfs:label annotations in the Manchester output.
        #[arg(long)]
        labels: bool,
    },
    /// Download an ontology document.
    Fetch {
        #[arg(long)]
        url: String,
        #[arg(long)]
        out: PathBuf,
        /// Timeout in seconds.
        #[arg(long, default_value_t = 30)]
        timeout: u64,
    },
    /// List completions for text typed into a column.
    Complete {
        #[arg(long)]
        descriptor: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Serve the HTTP/JSON API for the grid.
    Serve {
        #[arg(long)]
        descriptor: PathBuf,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { descriptor, table } => validate(descriptor, table),
        Command::Expand {
            descriptor,
            table,
            patterns,
            binding,
            registry,
            out,
            rows,
            labels,
        } => expand(descriptor, table, patterns, binding, registry, out, rows, labels),
        Command::Fetch { url, out, timeout } => fetch(&url, out, timeout),
        Command::Complete {
            descriptor,
            column,
            query,
            limit,
        } => complete(descriptor, &column, &query, limit),
        Command::Serve {
            descriptor,
            table,
            registry,
            port,
        } => server::run(descriptor, table, registry, port),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn status_name(status: &CellStatus) -> String {
    format!("{:?}", status.kind())
}

fn validate(descriptor: PathBuf, table: PathBuf) -> Result<ExitCode, InputError> {
    let project = Project::load(&descriptor)?;
    let doc = project.load_table(&table)?;
    let vtable = project.validate(&doc)?;
    let issues = vtable.issues(&project.descriptor);
    for issue in &issues {
        let col = doc.column_index(&issue.column).expect("issue column from table header");
        println!(
            "{}\trow {}\t{}\t{}\t{}",
            cell_ref(col, issue.row),
            issue.row,
            issue.column,
            status_name(&issue.status),
            issue.raw
        );
    }
    for e in &vtable.errors {
        eprintln!("row {} column {:?}: {}", e.row, e.column, e.message);
    }
    let s = &vtable.summary;
    eprintln!(
        "{} resolved, {} unknown, {} out of range, {} ambiguous, {} empty; {} issue(s)",
        s.resolved,
        s.unknown,
        s.out_of_range,
        s.ambiguous,
        s.empty,
        issues.len()
    );
    Ok(if issues.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[allow(clippy::too_many_arguments)]
fn expand(
    descriptor: PathBuf,
    table: PathBuf,
    patterns: Vec<PathBuf>,
    binding: PathBuf,
    registry_path: PathBuf,
    out: PathBuf,
    rows: Vec<usize>,
    labels: bool,
) -> Result<ExitCode, InputError> {
    let project = Project::load(&descriptor)?;
    let doc = project.load_table(&table)?;
    let vtable = project.validate(&doc)?;
    let texts = patterns.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
    let binding = load_binding(&binding)?;
    let mut registry = load_registry(&registry_path)?;
    let selection = if rows.is_empty() { None } else { Some(rows.as_slice()) };
    let (expansion, rendered) = match run_expansion(
        &texts,
        &binding,
        &project.descriptor,
        &project.graphs,
        &vtable,
        &mut registry,
        selection,
        ManchesterOptions { labels },
    ) {
        Ok(done) => done,
        Err(PrepareError::Violations(violations)) => {
            for v in &violations {
                match v.pattern {
                    Some(i) => eprintln!("{}: {}", patterns[i].display(), v.violation),
                    None => eprintln!("binding: {}", v.violation),
                }
            }
            return Ok(ExitCode::from(1));
        }
        Err(PrepareError::Pattern { index, error }) => {
            return Err(InputError(format!("{}: {error}", patterns[index].display())))
        }
        Err(PrepareError::Expansion(e)) => return Err(InputError(e.to_string())),
    };
    fs::create_dir_all(&out).map_err(|e| InputError(format!("{}: {e}", out.display())))?;
    write(&out.join("ontology.omn"), &rendered.manchester)?;
    write(&out.join("ontology.ofn"), &rendered.functional)?;
    write(&out.join("report.csv"), &rendered.report_csv)?;
    write(&registry_path, &registry.to_json())?;
    let report = &expansion.report;
    let expanded = report
        .per_row
        .iter()
        .filter(|o| matches!(o, ontopop_core::expansion::RowOutcome::Expanded { .. }))
        .count();
    eprintln!(
        "{} axiom(s) from {expanded} of {} row(s); {} minted ({} new), {} term request(s)",
        expansion.ontology.axioms().len(),
        report.per_row.len(),
        report.minted.len(),
        report.minted.iter().filter(|m| m.fresh).count(),
        report.term_requests.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn fetch(url: &str, out: PathBuf, timeout: u64) -> Result<ExitCode, InputError> {
    let options = FetchOptions {
        timeout: std::time::Duration::from_secs(timeout),
        ..FetchOptions::default()
    };
    match fetch_ontology(url, &options) {
        Ok(text) => {
            write(&out, &text)?;
            match sniff_format(&text) {
                Some(format) => println!("{format}"),
                None => println!("unknown"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(FetchError::InvalidUrl(_)) => {
            Err(InputError(format!("invalid URL {url:?}")))
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn complete(descriptor: PathBuf, column: &str, query: &str, limit: usize) -> Result<ExitCode, InputError> {
    let project = Project::load(&descriptor)?;
    let spec = project
        .descriptor
        .column(column)
        .ok_or_else(|| InputError(format!("no column named {column:?}")))?;
    let vset = project
        .cache
        .get_or_materialize(&project.graphs, &spec.range)
        .map_err(|e| InputError(e.to_string()))?;
    for c in autocomplete(query, &vset, limit) {
        println!("{}\t{}", c.iri, c.label);
    }
    Ok(ExitCode::SUCCESS)
}
