//! Output directory bookkeeping and the per-run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::CliError;

/// The resolved configuration is echoed here; passing it back through
/// `--config` repeats the run.
pub const CONFIG_ECHO: &str = "run.toml";
pub const MANIFEST: &str = "manifest.json";

pub struct Run {
    dir: PathBuf,
    command: &'static str,
    config: RunConfig,
    started: DateTime<Utc>,
    outputs: Vec<String>,
    summary: Map<String, Value>,
}

impl Run {
    pub fn start(dir: &Path, command: &'static str, config: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        let mut run = Run {
            dir: dir.to_path_buf(),
            command,
            config: config.clone(),
            started: Utc::now(),
            outputs: Vec::new(),
            summary: Map::new(),
        };
        let text = config.to_toml();
        run.write_with(CONFIG_ECHO, |w| w.write_all(text.as_bytes()).map_err(unicd::Error::from))?;
        log::info!("writing to {}", dir.display());
        Ok(run)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Creates `name` in the output directory and hands a buffered writer to
    /// `body`.
    pub fn write_with<F>(&mut self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> unicd::Result<()>,
    {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::Io(path.clone(), e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush().map_err(|e| CliError::Io(path, e))?;
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }

    /// Adds a key to the manifest summary and prints it.
    pub fn report<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        println!("{key} = {}", match &v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        });
        self.summary.insert(key.to_string(), v);
    }

    pub fn finish(self, error: Option<&CliError>) -> Result<(), CliError> {
        let finished = Utc::now();
        let stamp = |t: DateTime<Utc>| t.to_rfc3339_opts(SecondsFormat::Millis, true);
        let manifest = json!({
            "tool": "unicd",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "argv": std::env::args().collect::<Vec<_>>(),
            "seed": self.config.global.seed,
            "started": stamp(self.started),
            "finished": stamp(finished),
            "status": if error.is_some() { "error" } else { "ok" },
            "exit_code": error.map(|e| e.exit_code()).unwrap_or(0),
            "error": error.map(|e| e.to_string()),
            "outputs": self.outputs,
            "summary": self.summary,
            "config": serde_json::to_value(&self.config).unwrap_or(Value::Null),
        });
        let path = self.path(MANIFEST);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(path, e))?;
        Ok(())
    }
}
