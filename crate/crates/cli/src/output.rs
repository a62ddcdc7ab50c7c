//! Input parsing and provenance-stamped output files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::failure::Failure;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Parses JSON, reporting the failing field path and position.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, Failure> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.inner();
        Failure::input(format!(
            "{}: field `{field}`: {inner} (line {}, column {})",
            path.display(),
            inner.line(),
            inner.column()
        ))
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InputFile {
    pub file: String,
    pub sha256: String,
}

/// Reads an input file, remembering its name and digest for provenance.
pub fn read_input<T: DeserializeOwned>(path: &Path, inputs: &mut Vec<InputFile>) -> Result<T, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|_| Failure::input(format!("{}: not UTF-8", path.display())))?;
    let value = parse_json(path, &text)?;
    inputs.push(InputFile {
        file: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
    });
    Ok(value)
}

pub struct Output {
    pub dir: PathBuf,
    pub config_hash: String,
    pub inputs: Vec<InputFile>,
}

/// Seventeen significant digits, no locale.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Output {
    pub fn new(dir: PathBuf, config_hash: String) -> Self {
        Output { dir, config_hash, inputs: Vec::new() }
    }

    fn provenance(&self) -> Value {
        json!({
            "tool": "holorigid",
            "version": VERSION,
            "config_hash": self.config_hash,
            "model_files": self.inputs,
        })
    }

    fn create(&self, name: &str) -> Result<(PathBuf, fs::File), Failure> {
        fs::create_dir_all(&self.dir).map_err(|e| Failure::io(&self.dir, e))?;
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| Failure::io(&path, e))?;
        Ok((path, file))
    }

    /// Writes `value` as pretty JSON with a `provenance` member added.
    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let mut v = serde_json::to_value(value).map_err(|e| Failure::input(e.to_string()))?;
        match &mut v {
            Value::Object(map) => {
                map.insert("provenance".into(), self.provenance());
            }
            other => {
                v = json!({ "result": other.take(), "provenance": self.provenance() });
            }
        }
        let (path, mut file) = self.create(name)?;
        let text = serde_json::to_string_pretty(&v).map_err(|e| Failure::input(e.to_string()))?;
        writeln!(file, "{text}")?;
        Ok(path)
    }

    /// Writes a CSV preceded by one `#` provenance comment line.
    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, Failure> {
        let (path, mut file) = self.create(name)?;
        let inputs: Vec<String> = self.inputs.iter().map(|i| format!("{}@{}", i.file, &i.sha256[..16])).collect();
        writeln!(file, "# holorigid {VERSION} config={} inputs={}", self.config_hash, inputs.join(";"))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn parse_error_names_field() {
        let e = parse_json::<holorigid_core::MapSpec>(Path::new("m.json"), r#"{"branches": [{"domain": 3}]}"#)
            .unwrap_err();
        assert!(e.message.contains("branches[0].domain"), "{}", e.message);
    }
}
