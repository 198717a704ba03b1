use std::fs::File;
use std::io::BufWriter;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use qx::batch::{run_batch, write_jsonl, BatchConfig};
use qx::corpus_io::{ingest_corpus, CorpusFormat};
use qx::export::{export_logs, ExportFormat};
use qx::http_generator::HttpGenerator;
use qx::session_log::SessionLog;
use qx::settings::Settings;
use qx::workbench::Workbench;
use qx::{index_store, SystemClock, ENV_GENERATOR_KEY, ENV_GENERATOR_URL, ENV_LOG_DIR};
use qx_core::pipeline::BM25;
use qx_core::{Generator, GeneratorConfig, Index, PipelineRegistry, PromptTemplate, StubGenerator};

#[derive(Debug, Parser)]
#[command(name = "qx", version, about = "Query-by-example search workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeneratorChoice {
    Stub,
    Http,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an index directory from a JSONL corpus.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = CorpusFormat::Jsonl)]
        format: CorpusFormat,
    },
    /// Serve the JSON API over an index.
    Serve {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = ENV_LOG_DIR, default_value = "logs")]
        log_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = GeneratorChoice::Stub)]
        generator: GeneratorChoice,
        /// Seed for the stub generator.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Directory of static UI assets served under `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
    /// Export the three interaction logs into one file.
    ExportLogs {
        #[arg(long, env = ENV_LOG_DIR)]
        log_dir: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate queries for example documents and retrieve with them.
    BatchQbe {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        docs: PathBuf,
        #[arg(long, value_enum, default_value_t = GeneratorChoice::Stub)]
        generator: GeneratorChoice,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = qx_core::DEFAULT_K)]
        k: usize,
        #[arg(long, default_value = BM25)]
        pipeline: String,
    },
}

fn generator_config(choice: GeneratorChoice, seed: u64) -> anyhow::Result<GeneratorConfig> {
    Ok(match choice {
        GeneratorChoice::Stub => GeneratorConfig::stub(seed),
        GeneratorChoice::Http => {
            let url = std::env::var(ENV_GENERATOR_URL)
                .with_context(|| format!("--generator http requires {ENV_GENERATOR_URL}"))?;
            GeneratorConfig::http(url)
        }
    })
}

fn load_index(dir: &std::path::Path) -> anyhow::Result<Arc<Index>> {
    let index = index_store::load(dir).with_context(|| format!("cannot load index from {}", dir.display()))?;
    Ok(Arc::new(index))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Index { corpus, out, format } => {
            let corpus = ingest_corpus(&corpus, format)?;
            let index = Index::build(&corpus)?;
            let manifest = index_store::save(&index, &out)?;
            println!("{}", serde_json::to_string(&manifest)?);
        }
        Command::Serve { index, port, host, log_dir, generator, seed, static_dir } => {
            let index = load_index(&index)?;
            let settings = Settings { generator: generator_config(generator, seed)?, ..Settings::default() };
            let clock = Arc::new(SystemClock);
            let log = Arc::new(SessionLog::open(&log_dir, clock.clone())?);
            let workbench = Workbench::new(index, log, clock, settings)?
                .with_generator_key(std::env::var(ENV_GENERATOR_KEY).ok());
            let addr: SocketAddr = format!("{host}:{port}").parse().context("invalid --host/--port")?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(qx::server::serve(addr, Arc::new(workbench), static_dir))?;
        }
        Command::ExportLogs { log_dir, format, out } => {
            if !log_dir.is_dir() {
                bail!("log directory {} does not exist", log_dir.display());
            }
            let n = export_logs(&log_dir, format, &out)?;
            eprintln!("exported {n} records to {}", out.display());
        }
        Command::BatchQbe { index, docs, generator, out, seed, k, pipeline } => {
            let index = load_index(&index)?;
            let docs = ingest_corpus(&docs, CorpusFormat::Jsonl)?.into_documents();
            let config = generator_config(generator, seed)?;
            let backend: Box<dyn Generator> = match generator {
                GeneratorChoice::Stub => Box::new(StubGenerator::new(index.clone(), seed)),
                GeneratorChoice::Http => Box::new(HttpGenerator::new(
                    config.endpoint_url.clone().unwrap_or_default(),
                    std::env::var(ENV_GENERATOR_KEY).ok(),
                )),
            };
            let template = PromptTemplate::default();
            let batch = BatchConfig { template: &template, generator: &config, pipeline: &pipeline, k };
            let records = run_batch(&index, &PipelineRegistry::new(), backend.as_ref(), &SystemClock, &docs, &batch)?;
            write_jsonl(BufWriter::new(File::create(&out)?), &records)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
