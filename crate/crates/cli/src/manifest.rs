//! Run manifest written next to every report, including failed runs.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub threads: usize,
    /// Effective configuration in `key=value` form, when one was resolved.
    pub config: Option<String>,
    pub inputs: Vec<InputDigest>,
    pub timings: Vec<StageTiming>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub status: String,
    pub exit_code: i32,
    pub error: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, threads: usize) -> Self {
        RunManifest {
            tool: "casq",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv: std::env::args().collect(),
            threads,
            config: None,
            inputs: Vec::new(),
            timings: Vec::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
            status: "running".into(),
            exit_code: 0,
            error: None,
        }
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        let digest = Sha256::digest(bytes);
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            bytes: bytes.len(),
        });
    }

    /// Run `f`, recording its wall time under `stage`.
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), text + "\n")
    }
}
