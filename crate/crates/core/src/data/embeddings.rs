use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::vocab::{Vocab, PAD_ID};
use crate::error::{Error, Result};
use crate::linalg::{glorot_uniform, Matrix, Rng};

/// Word vectors read from a GloVe-style text file (`token v1 v2 ... vd` per line).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub dim: usize,
    pub vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// Parses the whole file, keeping only words accepted by `keep`. Every line
    /// is still checked for a consistent dimension.
    pub fn read(path: impl AsRef<Path>, mut keep: impl FnMut(&str) -> bool) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut dim = None;
        let mut vectors = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::io(path, e))?;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let values = fields
                .map(|v| {
                    v.parse::<f64>().map_err(|_| {
                        Error::data(format!(
                            "{}:{line_no}: `{v}` is not a number",
                            path.display()
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            match dim {
                None if values.is_empty() => {
                    return Err(Error::data(format!(
                        "{}:{line_no}: word without a vector",
                        path.display()
                    )))
                }
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::data(format!(
                        "{}:{line_no}: expected {d} values, found {}",
                        path.display(),
                        values.len()
                    )))
                }
                Some(_) => {}
            }
            if keep(word) {
                vectors.insert(word.to_string(), values);
            }
        }
        let dim =
            dim.ok_or_else(|| Error::data(format!("{} contains no vectors", path.display())))?;
        Ok(Self { dim, vectors })
    }

    /// `vocab.len() x dim` matrix in vocabulary id order. Words missing from
    /// the table get a Glorot row (`+-sqrt(6 / (1 + dim))`); the padding row is zero.
    pub fn to_matrix(&self, vocab: &Vocab, rng: &mut Rng) -> Matrix {
        let mut table = Matrix::zeros(vocab.len(), self.dim);
        for id in 0..vocab.len() {
            if id == PAD_ID {
                continue;
            }
            let row = match vocab.token(id).and_then(|w| self.vectors.get(w)) {
                Some(v) => v.clone(),
                None => glorot_uniform(1, self.dim, rng).into_vec(),
            };
            table.row_mut(id).copy_from_slice(&row);
        }
        table
    }
}

/// Reads a GloVe text file and lays its vectors out in `vocab` id order.
pub fn load_embeddings(path: impl AsRef<Path>, vocab: &Vocab, rng: &mut Rng) -> Result<Matrix> {
    let table = EmbeddingTable::read(path, |w| vocab.get(w).is_some())?;
    Ok(table.to_matrix(vocab, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::build_vocab;
    use std::io::Write;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn copies_known_rows_and_fills_unknown() {
        let vocab = build_vocab(&["a a b"], 10).unwrap();
        let f = file_with("a 1.0 2.0\nzzz 5 5\n");
        let m = load_embeddings(f.path(), &vocab, &mut Rng::new(0)).unwrap();
        assert_eq!(m.shape(), (4, 2));
        assert_eq!(m.row(vocab.id("a")), &[1.0, 2.0]);
        assert_eq!(m.row(PAD_ID), &[0.0, 0.0]);
        let bound = (6.0f64 / 3.0).sqrt();
        for id in [1, vocab.id("b")] {
            assert!(m.row(id).iter().all(|v| v.abs() <= bound));
            assert!(m.row(id).iter().any(|&v| v != 0.0));
        }
    }

    #[test]
    fn inconsistent_dimension_reports_line() {
        let vocab = build_vocab(&["a"], 10).unwrap();
        let f = file_with("a 1.0 2.0\nb 1 2 3\n");
        let err = load_embeddings(f.path(), &vocab, &mut Rng::new(0)).unwrap_err();
        assert!(matches!(err, Error::Data(_)));
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    #[test]
    fn unreadable_file_is_io_error() {
        let vocab = build_vocab(&["a"], 10).unwrap();
        let err = load_embeddings("/no/such/glove.txt", &vocab, &mut Rng::new(0)).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn vocab_ids_are_unchanged() {
        let vocab = build_vocab(&["x y z y"], 10).unwrap();
        let before = vocab.clone();
        let f = file_with("z 0.5\ny -0.5\n");
        let m = load_embeddings(f.path(), &vocab, &mut Rng::new(3)).unwrap();
        assert_eq!(vocab, before);
        assert_eq!(m.row(vocab.id("y")), &[-0.5]);
        assert_eq!(m.row(vocab.id("z")), &[0.5]);
    }
}
