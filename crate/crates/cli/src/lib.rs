//! The `mesoscope` command line: argument definitions and command bodies.

mod config;
mod report;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use mesoscope_core::analysis::{analyze, AnalysisConfig, AnalysisDocument, Feature};
use mesoscope_core::corpus::{ingest_jsonl, Corpus};
use mesoscope_core::textproc::StopList;
use mesoscope_service::{AppState, ServiceConfig, DEFAULT_BODY_LIMIT, DEFAULT_PORT};

pub use config::{AnalysisArgs, ConfigError};
pub use report::{write_report, Manifest, ReportError, ReportSpec, REPORT_FORMAT};

#[derive(Debug, Parser)]
#[command(name = "mesoscope", version, about = "Compare many LLM responses at once")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one analysis and print its JSON.
    Analyze {
        /// JSONL corpus, one response per line.
        #[arg(long)]
        input: PathBuf,
        /// exact_matches, unique_words or pdc.
        #[arg(long, value_parser = parse_analysis_feature)]
        feature: Feature,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Export every analysis and view model into a static directory.
    Report {
        #[arg(long)]
        input: PathBuf,
        /// Row dimension of the grid.
        #[arg(long)]
        rows: String,
        /// Column dimension of the grid.
        #[arg(long)]
        cols: String,
        /// Fix a dimension to one value (repeatable).
        #[arg(long = "fix", value_name = "DIM=VALUE", value_parser = parse_fixed)]
        fix: Vec<(String, String)>,
        /// Badge dimension of the interleaved view [default: --cols].
        #[arg(long)]
        badge: Option<String>,
        /// Grouping dimension of the linear view [default: --rows].
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "MESOSCOPE_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, env = "MESOSCOPE_HOST", default_value = "127.0.0.1")]
        host: String,
        /// Print the UI address once listening.
        #[arg(long)]
        open: bool,
        /// Largest accepted request body, in bytes.
        #[arg(long, env = "MESOSCOPE_BODY_LIMIT", default_value_t = DEFAULT_BODY_LIMIT)]
        body_limit: usize,
        /// Recompute analyses on every request.
        #[arg(long)]
        no_cache: bool,
        /// Load corpora from and save them to this directory.
        #[arg(long, env = "MESOSCOPE_SNAPSHOT")]
        snapshot: Option<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Print the stop list in use.
    Stopwords {
        #[arg(long, env = "MESOSCOPE_STOP_LIST")]
        stop_list: Option<PathBuf>,
    },
}

fn parse_analysis_feature(s: &str) -> Result<Feature, String> {
    match s.parse::<Feature>() {
        Ok(Feature::None) | Err(_) => Err(format!(
            "unknown feature `{s}` (expected exact_matches, unique_words or pdc)"
        )),
        Ok(f) => Ok(f),
    }
}

fn parse_fixed(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((d, v)) if !d.is_empty() => Ok((d.to_string(), v.to_string())),
        _ => Err(format!("`{s}` is not of the form DIM=VALUE")),
    }
}

pub fn read_corpus(path: &PathBuf) -> Result<Corpus> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let corpus =
        ingest_jsonl(BufReader::new(file)).with_context(|| format!("{}", path.display()))?;
    if corpus.is_empty() {
        bail!("{}: no records", path.display());
    }
    Ok(corpus)
}

/// Pretty `{feature, params, result}` document with a trailing newline.
pub fn analysis_json(corpus: &Corpus, feature: Feature, config: &AnalysisConfig) -> Result<String> {
    let result = analyze(corpus, feature, config)?
        .ok_or_else(|| anyhow!("feature `{feature}` has no analysis"))?;
    let mut text = serde_json::to_string_pretty(&AnalysisDocument {
        feature,
        params: config.params_summary(feature),
        result: &result,
    })?;
    text.push('\n');
    Ok(text)
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run(Cli::try_parse_from(args)?)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            input,
            feature,
            out,
            analysis,
        } => {
            let config = analysis.analysis_config()?;
            let corpus = read_corpus(&input)?;
            let text = analysis_json(&corpus, feature, &config)?;
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => std::io::stdout().lock().write_all(text.as_bytes())?,
            }
        }
        Command::Report {
            input,
            rows,
            cols,
            fix,
            badge,
            group,
            out,
            analysis,
        } => {
            let config = analysis.analysis_config()?;
            let palette = analysis.palette()?;
            let corpus = read_corpus(&input)?;
            let mut fixed = BTreeMap::new();
            for (d, v) in fix {
                if fixed.insert(d.clone(), v).is_some() {
                    bail!("dimension `{d}` is fixed twice");
                }
            }
            let spec = ReportSpec {
                rows,
                cols,
                fixed,
                badge,
                group,
            };
            let manifest = write_report(&corpus, &spec, &config, &palette, &out)?;
            for (file, err) in &manifest.errors {
                eprintln!("warning: {file}: {err}");
            }
            eprintln!("wrote {} files to {}", manifest.files.len(), out.display());
        }
        Command::Serve {
            port,
            host,
            open,
            body_limit,
            no_cache,
            snapshot,
            analysis,
        } => {
            let config = ServiceConfig {
                port,
                body_limit,
                analysis: analysis.analysis_config()?,
                palette: analysis.palette()?,
                cache: !no_cache,
                snapshot_dir: snapshot,
            };
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .with_context(|| format!("invalid listen address {host}:{port}"))?;
            serve(config, addr, open)?;
        }
        Command::Stopwords { stop_list } => {
            let list = match stop_list {
                Some(path) => StopList::from_path(&path)?,
                None => StopList::builtin().clone(),
            };
            let mut out = std::io::stdout().lock();
            writeln!(out, "# {}", list.version())?;
            for w in list.words() {
                writeln!(out, "{w}")?;
            }
        }
    }
    Ok(())
}

fn serve(config: ServiceConfig, addr: SocketAddr, open: bool) -> Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot listen on {addr}"))?;
        let state = Arc::new(AppState::new(config));
        let loaded = state.load_snapshot().await.context("cannot load snapshot")?;
        if loaded > 0 {
            eprintln!("loaded {loaded} corpora from snapshot");
        }
        let local = listener.local_addr()?;
        eprintln!("listening on http://{local}");
        if open {
            println!("http://{local}/");
        }
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        mesoscope_service::serve(listener, state, shutdown)
            .await
            .context("server error")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn serve_defaults_to_7341() {
        let cli = Cli::try_parse_from(["mesoscope", "serve"]).unwrap();
        let Command::Serve { port, .. } = cli.command else { panic!() };
        if std::env::var_os("MESOSCOPE_PORT").is_none() {
            assert_eq!(port, 7341);
        }
    }

    #[test]
    fn feature_parser_rejects_none() {
        assert!(parse_analysis_feature("none").is_err());
        assert!(parse_analysis_feature("fuzzy").is_err());
        assert_eq!(parse_analysis_feature("pdc"), Ok(Feature::Pdc));
    }

    #[test]
    fn fixed_parser() {
        assert_eq!(parse_fixed("a=b=c"), Ok(("a".into(), "b=c".into())));
        assert!(parse_fixed("=x").is_err());
        assert!(parse_fixed("plain").is_err());
    }

    #[test]
    fn threshold_flag_reaches_params() {
        let cli = Cli::try_parse_from([
            "mesoscope", "analyze", "--input", "x", "--feature", "pdc", "--pdc-threshold", "1.5",
        ])
        .unwrap();
        let Command::Analyze { analysis, .. } = cli.command else { panic!() };
        let config = analysis.analysis_config().unwrap();
        assert_eq!(config.pdc.threshold, 1.5);
        assert_eq!(config.params(Feature::Pdc)["threshold"], 1.5);
    }
}
