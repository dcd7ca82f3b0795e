//! JSON distributions in, CSV tables out.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use renyi_core::{JointPmf, Pmf};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointJson {
    pub alphabet_x: Vec<String>,
    pub alphabet_y: Vec<String>,
    /// Rows indexed by `x`.
    pub pmf: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmfJson {
    pub alphabet: Vec<String>,
    pub pmf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Joint(JointPmf),
    Marginal(Pmf),
}

fn parse_error(path: &str, e: serde_json::Error) -> CliError {
    CliError::Parse { path: path.into(), line: e.line(), column: e.column(), message: e.to_string() }
}

fn invalid(path: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Invalid { path: path.into(), message: e.to_string() }
}

/// Parses a joint or a marginal; `path` only labels errors.
pub fn parse_input(text: &str, path: &str) -> Result<Input, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    if value.get("alphabet_x").is_some() {
        let j: JointJson = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
        let nx = j.alphabet_x.len();
        if j.pmf.len() != nx {
            return Err(invalid(path, format!("pmf has {} rows but alphabet_x has {nx} symbols", j.pmf.len())));
        }
        let ny = j.alphabet_y.len();
        if let Some((x, row)) = j.pmf.iter().enumerate().find(|(_, r)| r.len() != ny) {
            return Err(invalid(path, format!("row {x} has {} entries but alphabet_y has {ny} symbols", row.len())));
        }
        let flat = j.pmf.into_iter().flatten().collect();
        JointPmf::new(j.alphabet_x, j.alphabet_y, flat).map(Input::Joint).map_err(|e| invalid(path, e))
    } else {
        let p: PmfJson = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
        Pmf::new(p.alphabet, p.pmf).map(Input::Marginal).map_err(|e| invalid(path, e))
    }
}

pub fn read_input(path: &Path) -> Result<Input, CliError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    parse_input(&text, &shown)
}

pub fn read_joint(path: &Path) -> Result<JointPmf, CliError> {
    match read_input(path)? {
        Input::Joint(j) => Ok(j),
        Input::Marginal(_) => Err(invalid(&path.display().to_string(), "expected a joint distribution")),
    }
}

pub fn joint_to_json(j: &JointPmf) -> String {
    let rows = (0..j.nx()).map(|x| j.row(x).to_vec()).collect();
    let out = JointJson { alphabet_x: j.alphabet_x().to_vec(), alphabet_y: j.alphabet_y().to_vec(), pmf: rows };
    serde_json::to_string(&out).expect("plain data serializes")
}

pub fn pmf_to_json(p: &Pmf) -> String {
    let out = PmfJson { alphabet: p.alphabet().to_vec(), pmf: p.probs().to_vec() };
    serde_json::to_string(&out).expect("plain data serializes")
}

/// Shortest decimal that parses back to the same `f64`; `-0` prints as `0`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// A CSV table with a leading `#` comment line, buffered until written.
pub struct Table {
    comment: String,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(comment: &str, header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Table { comment: comment.replace('\n', " "), writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        Ok(self.writer.write_record(fields)?)
    }

    pub fn into_bytes(self) -> Result<Vec<u8>, CliError> {
        let body = self.writer.into_inner().map_err(|e| CliError::Compute(e.to_string()))?;
        let mut out = format!("# {}\n", self.comment).into_bytes();
        out.extend(body);
        Ok(out)
    }
}

/// Writes to `out`, or to stdout when `None`.
pub fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

/// Reads a table written by [`Table`], skipping the comment line.
pub fn read_table(bytes: &[u8]) -> Result<Vec<csv::StringRecord>, CliError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes);
    let header = reader.headers()?.clone();
    let mut rows = vec![header];
    for r in reader.records() {
        rows.push(r?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_round_trips_bit_exactly() {
        let text = r#"{"alphabet_x":["a","b"],"alphabet_y":["0","1","2"],"pmf":[[0.1,0.2,0.05],[0.3,0.25,0.1]]}"#;
        let Input::Joint(j) = parse_input(text, "t").unwrap() else { panic!("joint expected") };
        assert_eq!(j.get(1, 1), 0.25);
        let back = joint_to_json(&j);
        assert_eq!(back, text);
        assert_eq!(parse_input(&back, "t").unwrap(), Input::Joint(j));
    }

    #[test]
    fn marginals_parse() {
        let Input::Marginal(p) = parse_input(r#"{"alphabet":["h","t"],"pmf":[0.5,0.5]}"#, "t").unwrap() else {
            panic!("marginal expected")
        };
        assert_eq!(pmf_to_json(&p), r#"{"alphabet":["h","t"],"pmf":[0.5,0.5]}"#);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_input("{\n  \"alphabet\": [\"a\"],\n  \"pmf\": [1.0,,]\n}", "bad.json").unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let err = parse_input(r#"{"alphabet":["a","b"],"pmf":[0.5,0.499]}"#, "x.json").unwrap_err();
        assert!(matches!(err, CliError::Invalid { .. }), "{err:?}");
        let err = parse_input(r#"{"alphabet_x":["a"],"alphabet_y":["0","1"],"pmf":[[0.5]]}"#, "x.json").unwrap_err();
        assert!(err.to_string().contains("row 0"), "{err}");
    }

    #[test]
    fn tables_have_a_comment_and_a_header() {
        let mut t = Table::new("renyi test", &["a", "b"]).unwrap();
        t.row(["1", "x,y"]).unwrap();
        let bytes = t.into_bytes().unwrap();
        assert_eq!(String::from_utf8(bytes.clone()).unwrap(), "# renyi test\na,b\n1,\"x,y\"\n");
        let rows = read_table(&bytes).unwrap();
        assert_eq!(rows[1].get(1), Some("x,y"));
    }
}
