//! Command-line surface: configuration, data files, caching and reports.
//!
//! Payload files are pure functions of the configuration and its input
//! files. Logs go to `padic-theta.log` beside them and are not payload.

pub mod basis;
pub mod cache;
pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

pub use basis::{load_eigenbasis, synthetic_basis, BasisFile, ExpansionFile, LoadedBasis};
pub use cache::{cached_ideals, write_atomic};
pub use commands::Payload;
pub use config::{PipelineConfig, Validated};

use crate::error::{Error, Result};

pub const LOG_FILE: &str = "padic-theta.log";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "padic-theta", version, about = "Λ-adic theta families, ordinary projection, triple products, Euler factors and Tate curves")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// TOML pipeline configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// p-adic precision N (overrides the config).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// q-expansion cap Q (overrides the config).
    #[arg(long, global = true)]
    pub qcap: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Verb {
    /// Classical theta series of η₁ and η₂.
    Theta,
    /// The Λ-adic family g_Col or g_Hida.
    Family,
    /// Ordinary projection against an ingested basis.
    Ordproj,
    /// The synthetic triple-product pipeline.
    Triple,
    /// The Euler-factor consistency table.
    Euler,
    /// Tate-curve logarithms of a Heegner point.
    Tate,
    /// Built-in checks of every module.
    Selfcheck,
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Theta => "theta",
            Verb::Family => "family",
            Verb::Ordproj => "ordproj",
            Verb::Triple => "triple",
            Verb::Euler => "euler",
            Verb::Tate => "tate",
            Verb::Selfcheck => "selfcheck",
        }
    }
}

/// Routes `log` records to whichever sidecar file the current run opened.
struct Sidecar;

static SIDECAR: Mutex<Option<std::fs::File>> = Mutex::new(None);

impl std::io::Write for Sidecar {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        match SIDECAR.lock().unwrap().as_mut() {
            Some(f) => f.write(buf),
            None => Ok(buf.len()),
        }
    }
    fn flush(&mut self) -> std::io::Result<()> {
        match SIDECAR.lock().unwrap().as_mut() {
            Some(f) => f.flush(),
            None => Ok(()),
        }
    }
}

fn init_logging(out: &Path) -> Result<()> {
    let path = out.join(LOG_FILE);
    let f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    *SIDECAR.lock().unwrap() = Some(f);
    // a second init in the same process keeps the first logger, which
    // already writes through SIDECAR
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Pipe(Box::new(Sidecar)))
        .try_init();
    Ok(())
}

fn load_config(cli: &Cli) -> Result<Option<PipelineConfig>> {
    let Some(path) = &cli.config else { return Ok(None) };
    let mut cfg = PipelineConfig::load(path)?;
    if let Some(n) = cli.precision {
        cfg.precision = n;
    }
    if let Some(q) = cli.qcap {
        cfg.qcap = q;
    }
    Ok(Some(cfg))
}

fn require(cfg: Option<PipelineConfig>, verb: Verb) -> Result<PipelineConfig> {
    cfg.ok_or_else(|| Error::validation("config", format!("`{}` needs --config", verb.name())))
}

/// Payloads for one verb, plus whether every internal check passed.
pub fn execute(cli: &Cli) -> Result<(Vec<Payload>, bool)> {
    let cfg = load_config(cli)?;
    let cache = cli.out.join(".cache");
    let payloads = match cli.verb {
        Verb::Theta => commands::cmd_theta(&require(cfg, cli.verb)?, &cache)?,
        Verb::Family => commands::cmd_family(&require(cfg, cli.verb)?)?,
        Verb::Ordproj => commands::cmd_ordproj(&require(cfg, cli.verb)?)?,
        Verb::Triple => commands::cmd_triple(&require(cfg, cli.verb)?)?,
        Verb::Euler => {
            let p = match cfg {
                Some(c) => {
                    c.validate()?;
                    c.p
                }
                None => 5,
            };
            commands::cmd_euler(p)?
        }
        Verb::Tate => commands::cmd_tate(&require(cfg, cli.verb)?)?,
        Verb::Selfcheck => return commands::cmd_selfcheck(),
    };
    Ok((payloads, true))
}

/// Write payloads and a manifest of their SHA-256 digests.
pub fn write_payloads(out: &Path, verb: Verb, payloads: &[Payload]) -> Result<()> {
    let mut files = serde_json::Map::new();
    for p in payloads {
        write_atomic(&out.join(&p.name), &p.bytes)?;
        files.insert(p.name.clone(), json!(hex::encode(Sha256::digest(&p.bytes))));
    }
    let manifest = Payload::json(MANIFEST, &json!({ "verb": verb.name(), "files": files }));
    write_atomic(&out.join(MANIFEST), &manifest.bytes)
}

fn run_cli(cli: &Cli) -> Result<bool> {
    std::fs::create_dir_all(&cli.out).map_err(|e| Error::Io(format!("{}: {e}", cli.out.display())))?;
    init_logging(&cli.out)?;
    log::info!("verb {} out {}", cli.verb.name(), cli.out.display());
    let work = || -> Result<bool> {
        let (payloads, ok) = execute(cli)?;
        write_payloads(&cli.out, cli.verb, &payloads)?;
        Ok(ok)
    };
    let r = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::validation("threads", e.to_string()))?
            .install(work),
        None => work(),
    };
    if let Err(e) = &r {
        log::error!("{e}");
    }
    r
}

/// Parse arguments, run, and return the process exit code:
/// 0 ok, 2 validation, 3 parse, 4 numeric.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("error: some checks failed");
            4
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests;
