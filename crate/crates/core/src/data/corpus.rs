use std::fs;
use std::path::Path;

use super::vocab::{encode, Vocab};
use super::{Dataset, Example};
use crate::error::{Error, Result};

/// Plain-text documents labelled by the directory they live in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub texts: Vec<String>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

fn sorted_entries(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut paths = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?;
    paths.sort();
    Ok(paths)
}

/// Reads `root/<class_name>/<document>`: one subdirectory per class (sorted by
/// name to assign labels), one document per regular file. Files directly under
/// `root` are ignored. Documents are decoded as UTF-8, replacing invalid bytes.
pub fn load_corpus(root: impl AsRef<Path>) -> Result<Corpus> {
    let root = root.as_ref();
    let mut corpus = Corpus {
        texts: Vec::new(),
        labels: Vec::new(),
        class_names: Vec::new(),
    };
    for class_dir in sorted_entries(root)?.into_iter().filter(|p| p.is_dir()) {
        let label = corpus.class_names.len();
        let name = class_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        corpus.class_names.push(name);
        for doc in sorted_entries(&class_dir)?
            .into_iter()
            .filter(|p| p.is_file())
        {
            let bytes = fs::read(&doc).map_err(|e| Error::io(&doc, e))?;
            corpus
                .texts
                .push(String::from_utf8_lossy(&bytes).into_owned());
            corpus.labels.push(label);
        }
    }
    if corpus.class_names.is_empty() {
        return Err(Error::data(format!(
            "corpus {} has no class directories",
            root.display()
        )));
    }
    Ok(corpus)
}

impl Corpus {
    /// Encodes every document to `t_max` ids with `vocab`.
    pub fn to_dataset(&self, vocab: &Vocab, t_max: usize) -> Result<Dataset> {
        if t_max == 0 {
            return Err(Error::config("t_max must be at least 1"));
        }
        let examples = self
            .texts
            .iter()
            .zip(&self.labels)
            .map(|(text, &label)| Example {
                tokens: encode(vocab, text, t_max),
                label,
            })
            .collect();
        let mut ds = Dataset::new(examples, self.class_names.len(), t_max, vocab.len())?;
        ds.class_names = self.class_names.clone();
        Ok(ds)
    }
}
