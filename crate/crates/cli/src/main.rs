//! `rdfforge`: convert RDF(S) to a type-store SQLite database and serve a
//! REST API over it.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rdfforge_core::pipeline::{self, Conversion, LoadError, Options};
use rdfforge_core::rdf::DEFAULT_BASE;
use rdfforge_server::{ServerError, ServerOptions};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "rdfforge", version, about = "Convert RDF(S) datasets into relational databases with a REST API")]
struct Cli {
    /// Namespace for skolem IRIs replacing blank nodes
    #[arg(long, global = true, default_value = DEFAULT_BASE)]
    base: String,
    /// Number skolem IRIs with a counter instead of random UUIDs
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Page size of list endpoints when `limit` is not given
    #[arg(long, default_value_t = 1000)]
    limit_default: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print dataset and generated-database statistics as JSON
    Stats { input: PathBuf },
    /// Print the property classification and relational schema as JSON
    Analyze {
        input: PathBuf,
        /// Write the report to this file instead of stdout
        #[arg(long)]
        schema_out: Option<PathBuf>,
    },
    /// Create the SQLite database (and optionally a SQL dump)
    Generate {
        input: PathBuf,
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        sql_dump: Option<PathBuf>,
        /// Serve the database once generated
        #[arg(long)]
        serve: bool,
        #[command(flatten)]
        server: ServeArgs,
    },
    /// Serve the REST API over a generated database
    Serve {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        server: ServeArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: impl std::fmt::Display) -> Failure {
        Failure { code: EXIT_IO, message: message.to_string() }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Failure {
        let code = match e {
            LoadError::Io { .. } => EXIT_IO,
            LoadError::Parse { .. } => EXIT_PARSE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(Failure::io)
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn convert(cli: &Cli, input: &Path) -> Result<Conversion, Failure> {
    let graph = pipeline::load(input)?;
    let options = Options { base: cli.base.clone(), deterministic: cli.deterministic, ..Options::default() };
    Ok(pipeline::convert(&graph, &options))
}

fn serve(cli: &Cli, db: &Path, args: &ServeArgs) -> Result<(), Failure> {
    let options = ServerOptions { limit_default: args.limit_default, base: cli.base.clone(), ..ServerOptions::default() };
    let runtime = tokio::runtime::Runtime::new().map_err(Failure::io)?;
    runtime
        .block_on(rdfforge_server::serve(db, &args.host, args.port, &options, |addr| {
            eprintln!("listening on http://{addr}");
        }))
        .map_err(|e| match e {
            ServerError::Store(_) => Failure { code: EXIT_USAGE, message: e.to_string() },
            other => Failure::io(other),
        })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Stats { input } => {
            let c = convert(cli, input)?;
            write_out(None, &to_json(&c.stats()))
        }
        Command::Analyze { input, schema_out } => {
            let c = convert(cli, input)?;
            write_out(schema_out.as_deref(), &to_json(&c.analysis()))
        }
        Command::Generate { input, db, sql_dump, serve: then_serve, server } => {
            let c = convert(cli, input)?;
            c.write_database(db).map_err(|e| Failure::io(format!("{}: {e}", db.display())))?;
            if let Some(dump) = sql_dump {
                write_out(Some(dump), &c.dump())?;
            }
            log::info!("{} tables written to {}", c.schema.table_count() + 1, db.display());
            if *then_serve {
                serve(cli, db, server)?;
            }
            Ok(())
        }
        Command::Serve { db, server } => {
            if !db.is_file() {
                return Err(Failure::io(format!("{}: no such database file", db.display())));
            }
            serve(cli, db, server)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rdfforge: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
