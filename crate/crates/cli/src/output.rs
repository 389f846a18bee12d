use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use porosity_core::muckenhoupt::CriticalAlpha;
use serde_json::{json, Value};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

/// Writes report files into one directory.
///
/// JSON files hold `{command, config, generated_at, report}`; CSV files
/// start with a `# generated_at` line. Both timestamps can be switched off.
pub struct Writer {
    dir: PathBuf,
    command: String,
    format: Format,
    generated_at: Option<String>,
}

impl Writer {
    pub fn new(
        dir: &Path,
        command: &str,
        format: Format,
        timestamp: bool,
    ) -> Result<Writer, Failure> {
        fs::create_dir_all(dir)
            .map_err(|e| Failure(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            command: command.into(),
            format,
            generated_at: timestamp
                .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn put(&self, file: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.dir.join(file);
        fs::write(&path, bytes)
            .map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))
    }

    pub fn json(&self, name: &str, config: &Value, report: &Value) -> Result<(), Failure> {
        if self.format == Format::Csv {
            return Ok(());
        }
        let mut doc = json!({
            "command": self.command,
            "config": config,
            "report": report,
        });
        if let Some(t) = &self.generated_at {
            doc["generated_at"] = json!(t);
        }
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.put(&format!("{name}.json"), text.as_bytes())
    }

    pub fn csv(
        &self,
        name: &str,
        body: impl FnOnce(&mut Vec<u8>) -> porosity_core::Result<()>,
    ) -> Result<(), Failure> {
        if self.format == Format::Json {
            return Ok(());
        }
        let mut bytes = Vec::new();
        if let Some(t) = &self.generated_at {
            writeln!(bytes, "# generated_at {t}")?;
        }
        body(&mut bytes)?;
        self.put(&format!("{name}.csv"), &bytes)
    }
}

/// File-name-safe form of a set label.
pub fn slug(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '-' | '.' => out.push(c),
            _ if !out.ends_with('_') => out.push('_'),
            _ => {}
        }
    }
    out.trim_matches('_').to_string()
}

/// `stage,alpha,diverging` with stage `bisection` or `grid`.
pub fn write_critical_csv(result: &CriticalAlpha, out: &mut Vec<u8>) -> porosity_core::Result<()> {
    writeln!(out, "stage,alpha,diverging")?;
    for (stage, points) in [("bisection", &result.bisection), ("grid", &result.grid)] {
        for p in points {
            writeln!(out, "{stage},{},{}", p.alpha, p.diverging)?;
        }
    }
    Ok(())
}

/// `eps,measure` from a dimension suite's details.
pub fn write_dimension_csv(details: &Value, out: &mut Vec<u8>) -> porosity_core::Result<()> {
    writeln!(out, "eps,measure")?;
    let column = |key: &str| details[key].as_array().cloned().unwrap_or_default();
    for (e, m) in column("eps").iter().zip(column("measures").iter()) {
        writeln!(out, "{e},{m}")?;
    }
    Ok(())
}
