use serde::{Deserialize, Serialize};

use super::vocab::PAD_ID;
use super::{Dataset, Example};
use crate::error::{Error, Result};
use crate::linalg::Rng;

/// Symbol `s` is stored as token id `s + SYMBOL_OFFSET`; ids 0 and 1 stay reserved.
const SYMBOL_OFFSET: usize = 2;
const MAJORITY_MARGIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    /// Label is the most frequent of the first `classes` symbols, ahead of
    /// every other such symbol by at least two occurrences.
    MajorityToken,
    /// Label is the class (`symbol mod classes`) of the first non-padding token.
    FirstTokenEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticTaskSpec {
    pub kind: SyntheticKind,
    pub alphabet: usize,
    pub length: usize,
    pub examples: usize,
    pub classes: usize,
    pub seed: u64,
}

impl Default for SyntheticTaskSpec {
    fn default() -> Self {
        Self {
            kind: SyntheticKind::MajorityToken,
            alphabet: 4,
            length: 20,
            examples: 2000,
            classes: 4,
            seed: 0,
        }
    }
}

impl SyntheticTaskSpec {
    pub fn vocab_size(&self) -> usize {
        self.alphabet + SYMBOL_OFFSET
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 || self.classes > self.alphabet {
            return Err(Error::config(format!(
                "synthetic task needs 2 <= classes <= alphabet, got {} classes over {} symbols",
                self.classes, self.alphabet
            )));
        }
        if self.examples == 0 {
            return Err(Error::config("synthetic task needs at least one example"));
        }
        let min_len = match self.kind {
            SyntheticKind::MajorityToken => MAJORITY_MARGIN,
            SyntheticKind::FirstTokenEcho => 1,
        };
        if self.length < min_len {
            return Err(Error::config(format!(
                "synthetic sequence length must be at least {min_len}, got {}",
                self.length
            )));
        }
        Ok(())
    }
}

/// Generates a dataset fully determined by `spec`. Labels are assigned
/// round-robin and shuffled, so class sizes differ by at most one.
pub fn gen_synthetic(spec: &SyntheticTaskSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = Rng::new(spec.seed);
    let mut labels: Vec<usize> = (0..spec.examples).map(|i| i % spec.classes).collect();
    rng.shuffle(&mut labels);
    let examples = labels
        .into_iter()
        .map(|label| {
            let symbols = match spec.kind {
                SyntheticKind::MajorityToken => majority_sequence(spec, label, &mut rng),
                SyntheticKind::FirstTokenEcho => echo_sequence(spec, label, &mut rng),
            };
            let tokens = symbols
                .into_iter()
                .map(|s| s.map_or(PAD_ID, |s| s + SYMBOL_OFFSET))
                .collect();
            Example { tokens, label }
        })
        .collect();
    let mut ds = Dataset::new(examples, spec.classes, spec.length, spec.vocab_size())?;
    ds.class_names = (0..spec.classes).map(|c| format!("symbol{c}")).collect();
    Ok(ds)
}

fn majority_sequence(spec: &SyntheticTaskSpec, label: usize, rng: &mut Rng) -> Vec<Option<usize>> {
    let mut seq: Vec<usize> = (0..spec.length)
        .map(|_| rng.next_below(spec.alphabet))
        .collect();
    let mut counts = vec![0usize; spec.alphabet];
    for &s in &seq {
        counts[s] += 1;
    }
    loop {
        let rival = (0..spec.classes)
            .filter(|&c| c != label)
            .max_by_key(|&c| (counts[c], std::cmp::Reverse(c)))
            .expect("at least two classes");
        if counts[label] >= counts[rival] + MAJORITY_MARGIN {
            break;
        }
        // Overwrite a random occurrence of the rival, or of a non-class symbol
        // when the rival is absent.
        let victims: Vec<usize> = (0..seq.len())
            .filter(|&t| seq[t] == rival || (counts[rival] == 0 && seq[t] != label))
            .collect();
        let t = victims[rng.next_below(victims.len())];
        counts[seq[t]] -= 1;
        seq[t] = label;
        counts[label] += 1;
    }
    seq.into_iter().map(Some).collect()
}

fn echo_sequence(spec: &SyntheticTaskSpec, label: usize, rng: &mut Rng) -> Vec<Option<usize>> {
    let pad = rng.next_below(spec.length.div_ceil(2));
    let cycles = (spec.alphabet - label).div_ceil(spec.classes);
    let first = label + spec.classes * rng.next_below(cycles);
    let mut seq = vec![None; pad];
    seq.push(Some(first));
    while seq.len() < spec.length {
        seq.push(Some(rng.next_below(spec.alphabet)));
    }
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn recount(tokens: &[usize], classes: usize) -> Vec<usize> {
        let mut counts = vec![0; classes];
        for &id in tokens {
            if id >= SYMBOL_OFFSET && id - SYMBOL_OFFSET < classes {
                counts[id - SYMBOL_OFFSET] += 1;
            }
        }
        counts
    }

    #[test]
    fn majority_labels_match_recount_with_margin() {
        let ds = gen_synthetic(&SyntheticTaskSpec::default()).unwrap();
        assert_eq!(ds.len(), 2000);
        assert_eq!(ds.vocab_size, 6);
        for ex in &ds.examples {
            let counts = recount(&ex.tokens, 4);
            let winner = (0..4).max_by_key(|&c| counts[c]).unwrap();
            assert_eq!(winner, ex.label);
            for c in (0..4).filter(|&c| c != ex.label) {
                assert!(counts[ex.label] >= counts[c] + 2, "{counts:?}");
            }
        }
    }

    #[test]
    fn same_spec_same_dataset() {
        let spec = SyntheticTaskSpec {
            examples: 300,
            ..Default::default()
        };
        assert_eq!(gen_synthetic(&spec).unwrap(), gen_synthetic(&spec).unwrap());
        let other = SyntheticTaskSpec {
            seed: 1,
            ..spec.clone()
        };
        assert_ne!(
            gen_synthetic(&spec).unwrap(),
            gen_synthetic(&other).unwrap()
        );
    }

    #[test]
    fn classes_are_balanced() {
        for kind in [SyntheticKind::MajorityToken, SyntheticKind::FirstTokenEcho] {
            let spec = SyntheticTaskSpec {
                kind,
                examples: 1000,
                ..Default::default()
            };
            let ds = gen_synthetic(&spec).unwrap();
            let mut hist = [0usize; 4];
            for ex in &ds.examples {
                hist[ex.label] += 1;
            }
            for h in hist {
                assert!((225..=275).contains(&h), "{hist:?}");
            }
        }
    }

    #[test]
    fn echo_label_is_first_real_token_class() {
        let spec = SyntheticTaskSpec {
            kind: SyntheticKind::FirstTokenEcho,
            alphabet: 7,
            classes: 3,
            examples: 500,
            ..Default::default()
        };
        let ds = gen_synthetic(&spec).unwrap();
        let mut saw_padding = false;
        for ex in &ds.examples {
            let first = *ex.tokens.iter().find(|&&id| id != PAD_ID).unwrap();
            saw_padding |= ex.tokens[0] == PAD_ID;
            assert_eq!((first - SYMBOL_OFFSET) % 3, ex.label);
        }
        assert!(saw_padding);
    }

    #[test]
    fn invalid_specs_are_config_errors() {
        let too_many = SyntheticTaskSpec {
            classes: 5,
            ..Default::default()
        };
        assert!(matches!(
            gen_synthetic(&too_many).unwrap_err(),
            Error::Config(_)
        ));
        let too_short = SyntheticTaskSpec {
            length: 1,
            ..Default::default()
        };
        assert!(gen_synthetic(&too_short).is_err());
    }

    #[test]
    fn kind_names() {
        let spec: SyntheticTaskSpec =
            toml::from_str("kind = \"first-token-echo\"\nalphabet = 6").unwrap();
        assert_eq!(spec.kind, SyntheticKind::FirstTokenEcho);
        assert_eq!(spec.length, 20);
    }

    proptest! {
        #[test]
        fn majority_holds_for_any_shape(alphabet in 2usize..8, extra in 0usize..4, length in 2usize..30, seed in any::<u64>()) {
            let classes = (2 + extra).min(alphabet);
            let spec = SyntheticTaskSpec { alphabet, classes, length, examples: 20, seed, ..Default::default() };
            let ds = gen_synthetic(&spec).unwrap();
            for ex in &ds.examples {
                let counts = recount(&ex.tokens, classes);
                for c in (0..classes).filter(|&c| c != ex.label) {
                    prop_assert!(counts[ex.label] >= counts[c] + 2);
                }
            }
        }
    }
}
