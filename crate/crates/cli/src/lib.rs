//! `broker` command-line tool: loads fixtures into snapshots, generates
//! synthetic networks, runs one-shot queries and starts the HTTP server.
//!
//! Exit codes: 0 success (for `query`: at least one provider), 1 `query`
//! found nothing, 2 error.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use socialbroker_core::snapshot::{load_snapshot, merge_into_snapshot, write_snapshot};
use socialbroker_core::{
    parse_social_requirement, Broker, BrokerRequest, BrokerResponse, GenSpec, Key, ParseError,
    ServiceRequirements,
};
use socialbroker_server::{parse_category, ServerConfig};

pub const EXIT_FOUND: u8 = 0;
pub const EXIT_EMPTY: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "broker", version, about = "Social service broker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge records from INPUT into SNAPSHOT (created if missing).
    Load { snapshot: PathBuf, input: PathBuf },
    /// Rank providers for one request against a snapshot.
    Query {
        snapshot: PathBuf,
        #[arg(long)]
        consumer: String,
        /// tmodelKey:keyValue, repeatable.
        #[arg(long = "category")]
        categories: Vec<String>,
        #[arg(long = "keyword")]
        keywords: Vec<String>,
        /// Required tModel key, repeatable.
        #[arg(long = "tmodel")]
        tmodels: Vec<String>,
        #[arg(long, default_value = "")]
        social: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Write a seeded synthetic network to OUT.
    Generate {
        #[arg(long)]
        actors: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long)]
        providers: usize,
        #[arg(long)]
        seed: u64,
        out: PathBuf,
    },
    /// Start the HTTP API.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
}

pub fn run(cli: Cli) -> u8 {
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::Load { snapshot, input } => cmd_load(&snapshot, &input, &mut stdout),
        Command::Query {
            snapshot,
            consumer,
            categories,
            keywords,
            tmodels,
            social,
            format,
        } => {
            let args = QueryArgs {
                consumer,
                categories,
                keywords,
                tmodels,
                social,
                format,
            };
            cmd_query(&snapshot, &args, &mut stdout)
        }
        Command::Generate {
            actors,
            edges,
            providers,
            seed,
            out,
        } => {
            let spec = GenSpec {
                n_actors: actors,
                n_edges: edges,
                n_providers: providers,
                seed,
            };
            cmd_generate(&spec, &out, &mut stdout).map(|_| EXIT_FOUND)
        }
        Command::Serve { config } => cmd_serve(&config).map(|_| EXIT_FOUND),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

pub fn cmd_load(snapshot: &Path, input: &Path, out: &mut impl Write) -> anyhow::Result<u8> {
    let counts = merge_into_snapshot(snapshot, input)
        .with_context(|| format!("loading {} into {}", input.display(), snapshot.display()))?;
    writeln!(out, "{counts}")?;
    Ok(EXIT_FOUND)
}

#[derive(Debug, Clone)]
pub struct QueryArgs {
    pub consumer: String,
    pub categories: Vec<String>,
    pub keywords: Vec<String>,
    pub tmodels: Vec<String>,
    pub social: String,
    pub format: Format,
}

impl QueryArgs {
    pub fn to_request(&self) -> anyhow::Result<BrokerRequest> {
        let consumer = Key::parse(&self.consumer).context("--consumer")?;
        let categories = self
            .categories
            .iter()
            .map(|c| parse_category(c).map_err(|e| anyhow!("--category: {}", e.message)))
            .collect::<anyhow::Result<_>>()?;
        let required_tmodels = self
            .tmodels
            .iter()
            .map(|t| Key::parse(t).context("--tmodel"))
            .collect::<anyhow::Result<_>>()?;
        let social_req = parse_social_requirement(&self.social)
            .map_err(|e| anyhow!("--social\n{}", render_parse_error(&self.social, &e)))?;
        Ok(BrokerRequest {
            consumer,
            service_req: ServiceRequirements {
                categories,
                keywords: self.keywords.clone(),
                required_tmodels,
            },
            social_req,
        })
    }
}

/// The input with a caret under the failing byte, then the message.
pub fn render_parse_error(text: &str, err: &ParseError) -> String {
    let column = text
        .get(..err.position())
        .map_or(err.position(), |prefix| prefix.chars().count());
    format!("  {text}\n  {}^\n{err}", " ".repeat(column))
}

pub fn cmd_query(snapshot: &Path, args: &QueryArgs, out: &mut impl Write) -> anyhow::Result<u8> {
    let request = args.to_request()?;
    let stores = load_snapshot(snapshot)?;
    let response = Broker::new(&stores.registry, &stores.graph).query(&request)?;
    match args.format {
        Format::Json => writeln!(out, "{}", response.to_json())?,
        Format::Table => out.write_all(render_table(&response).as_bytes())?,
    }
    Ok(if response.providers.is_empty() {
        EXIT_EMPTY
    } else {
        EXIT_FOUND
    })
}

fn format_score(v: Option<f64>) -> String {
    match v {
        Some(x) if x.fract() == 0.0 => format!("{x:.0}"),
        Some(x) => format!("{x:.4}"),
        None => "unreachable".into(),
    }
}

/// Fixed-width text table, one row per provider.
pub fn render_table(response: &BrokerResponse) -> String {
    let rows: Vec<[String; 4]> = response
        .providers
        .iter()
        .map(|p| {
            let services = p
                .matched_services
                .iter()
                .map(|s| s.name.as_str())
                .collect::<Vec<_>>()
                .join("; ");
            let scores = p
                .scores
                .0
                .iter()
                .map(|s| format!("{}={}", s.criterion.metric, format_score(s.value.as_f64())))
                .collect::<Vec<_>>()
                .join(" ");
            [p.rank.to_string(), p.provider.name.clone(), services, scores]
        })
        .collect();
    let header = ["RANK", "PROVIDER", "SERVICES", "SCORES"].map(String::from);
    let mut widths = header.clone().map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut text = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        let line = row
            .iter()
            .zip(widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        text.push_str(line.trim_end());
        text.push('\n');
    }
    text.push_str(&format!(
        "{} provider(s), {} excluded by social requirements\n",
        rows.len(),
        response.excluded_count
    ));
    text
}

pub fn cmd_generate(spec: &GenSpec, out_path: &Path, out: &mut impl Write) -> anyhow::Result<()> {
    let stores = spec.generate()?;
    write_snapshot(out_path, &stores)?;
    writeln!(out, "{}", stores.counts())?;
    Ok(())
}

pub fn cmd_serve(config_path: &Path) -> anyhow::Result<()> {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .try_init();
    let config = ServerConfig::load(config_path)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(socialbroker_server::serve(config))?;
    Ok(())
}
