//! Line-oriented text dump of a [`Dataset`]:
//!
//! ```text
//! slim-lstm-dataset 1
//! classes <k>
//! t_max <T>
//! vocab_size <V>
//! examples <N>
//! class <name>            (k lines, label order)
//! <label> <t|v> <id>...   (N lines, T ids each; t = train, v = validation)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Dataset, Example, Split};
use crate::error::{Error, Result};

pub const DATASET_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "slim-lstm-dataset";

pub fn write_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render(dataset)).map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text).map_err(|e| match e {
        Error::Data(msg) => Error::data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn render(ds: &Dataset) -> String {
    let mut out = format!(
        "{MAGIC} {DATASET_FORMAT_VERSION}\nclasses {}\nt_max {}\nvocab_size {}\nexamples {}\n",
        ds.class_count,
        ds.t_max,
        ds.vocab_size,
        ds.len()
    );
    for name in &ds.class_names {
        let _ = writeln!(out, "class {name}");
    }
    for (ex, split) in ds.examples.iter().zip(&ds.split) {
        let tag = match split {
            Split::Train => 't',
            Split::Validation => 'v',
        };
        let _ = write!(out, "{} {tag}", ex.label);
        for id in &ex.tokens {
            let _ = write!(out, " {id}");
        }
        out.push('\n');
    }
    out
}

fn parse(text: &str) -> Result<Dataset> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::data(format!("unexpected end of file, expected {what}")))
    };

    let (_, header) = next("header")?;
    match header.split_once(' ') {
        Some((MAGIC, v)) if v == DATASET_FORMAT_VERSION.to_string() => {}
        Some((MAGIC, v)) => {
            return Err(Error::data(format!(
                "unsupported dataset format version {v}, expected {DATASET_FORMAT_VERSION}"
            )))
        }
        _ => return Err(Error::data("missing dataset header")),
    }

    let mut field = |key: &str| -> Result<usize> {
        let (no, line) = next(key)?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::data(format!("line {no}: expected `{key} <count>`")))
    };
    let class_count = field("classes")?;
    let t_max = field("t_max")?;
    let vocab_size = field("vocab_size")?;
    let n = field("examples")?;

    let mut class_names = Vec::with_capacity(class_count);
    for _ in 0..class_count {
        let (no, line) = next("class name")?;
        let name = line
            .strip_prefix("class ")
            .ok_or_else(|| Error::data(format!("line {no}: expected `class <name>`")))?;
        class_names.push(name.to_string());
    }

    let mut examples = Vec::with_capacity(n);
    let mut split = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, line) = next("example")?;
        let bad = || Error::data(format!("line {no}: malformed example"));
        let mut fields = line.split(' ');
        let label = fields.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        split.push(match fields.next() {
            Some("t") => Split::Train,
            Some("v") => Split::Validation,
            _ => return Err(bad()),
        });
        let tokens = fields
            .map(|v| v.parse().map_err(|_| bad()))
            .collect::<Result<Vec<usize>>>()?;
        examples.push(Example { tokens, label });
    }
    if let Some((no, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::data(format!(
            "line {no}: trailing content after {n} examples"
        )));
    }

    let ds = Dataset {
        examples,
        class_count,
        t_max,
        vocab_size,
        class_names,
        split,
    };
    ds.validate()?;
    Ok(ds)
}
