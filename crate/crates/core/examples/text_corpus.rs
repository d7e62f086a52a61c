//! Loads a directory-per-class text corpus with a pretrained embedding file
//! and trains a Slim3 classifier on it.
//!
//! With no argument a tiny corpus is written to a temporary directory.
//! Otherwise the argument is a corpus root laid out as `root/<class>/<doc>`.

use std::fs;
use std::path::{Path, PathBuf};

use slim_lstm::data::{CorpusTaskSpec, TaskSpec};
use slim_lstm::layers::ArchitectureSpec;
use slim_lstm::train::{fit_model, ExperimentConfig};
use slim_lstm::{ActivationKind, Error, Result, Variant};

const DOCS: [(&str, &[&str]); 2] = [
    (
        "negative",
        &[
            "awful boring plot",
            "terrible acting and a dull story",
            "boring and awful",
        ],
    ),
    (
        "positive",
        &[
            "great fun film",
            "wonderful acting and a great story",
            "fun and wonderful",
        ],
    ),
];

fn write_demo(root: &Path) -> Result<PathBuf> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |e| Error::io(p, e)
    };
    for (class, docs) in DOCS {
        let dir = root.join("corpus").join(class);
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        for copy in 0..10 {
            for (i, text) in docs.iter().enumerate() {
                let path = dir.join(format!("{copy}_{i}.txt"));
                fs::write(&path, text).map_err(io(&path))?;
            }
        }
    }
    let vectors = root.join("vectors.txt");
    let lines = [
        "great 0.9 0.1 0.0 0.2",
        "awful -0.8 0.0 0.1 -0.3",
        "fun 0.7 0.2 0.1 0.0",
    ];
    fs::write(&vectors, lines.join("\n")).map_err(io(&vectors))?;
    Ok(root.to_path_buf())
}

fn main() -> Result<()> {
    let scratch = std::env::temp_dir().join("slim-lstm-corpus-demo");
    let (corpus, embeddings) = match std::env::args().nth(1) {
        Some(root) => (PathBuf::from(root), None),
        None => {
            let root = write_demo(&scratch)?;
            (root.join("corpus"), Some(root.join("vectors.txt")))
        }
    };
    let task = TaskSpec::Corpus(CorpusTaskSpec {
        path: corpus,
        vocab_size: 200,
        t_max: 8,
        embeddings,
        embedding_seed: 0,
    });
    let loaded = task.load()?;
    println!(
        "{} documents, classes {:?}, vocabulary {}",
        loaded.dataset.len(),
        loaded.dataset.class_names,
        loaded.dataset.vocab_size
    );

    let mut config = ExperimentConfig::new(Variant::Slim3, ActivationKind::Tanh, 5e-3, 15, 0);
    config.task = task;
    config.architecture = ArchitectureSpec::compact();
    let outcome = fit_model(&config, &loaded.dataset, loaded.embeddings.as_ref())?;
    for r in &outcome.records {
        println!(
            "epoch {:>2}: val_acc {:.3}, val_loss {:.4}",
            r.epoch, r.val_acc, r.val_loss
        );
    }
    Ok(())
}
