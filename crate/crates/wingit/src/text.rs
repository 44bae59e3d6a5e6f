//! Corpus preprocessing: tokenization with punctuation removal and
//! collocation merging, empirical stationary distributions, and
//! overlapping-window trajectory extraction.

use std::collections::HashMap;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{Distribution, Trajectory};

/// A multi-token phrase merged into one token before interning
/// (e.g. recurring character names in a novel).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollocationRule {
    pub phrase: Vec<String>,
    pub replacement: String,
}

/// Tokenized corpus: interned token stream plus the empirical unigram
/// distribution that serves as the stationary law in corpus experiments.
#[derive(Debug, Clone)]
pub struct Corpus {
    token_names: Vec<String>,
    token_ids: HashMap<String, u32>,
    tokens: Vec<u32>,
    empirical_pi: Distribution,
}

/// Characters removed before whitespace splitting. Covers ASCII
/// punctuation, the Unicode General Punctuation block (curly quotes,
/// dashes, ellipses), and the Latin-1 marks common in older typesetting.
/// Hyphens and apostrophes are deleted, not turned into separators.
fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || ('\u{2000}'..='\u{206f}').contains(&c)
        || matches!(c, '¡' | '§' | '«' | '¶' | '·' | '»' | '¿')
}

fn clean_words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .chars()
        .map(|c| if is_punctuation(c) { '\0' } else { c })
        .collect::<String>()
        .replace('\0', "")
        .split_whitespace()
        .map(str::to_owned)
        .collect()
}

fn apply_rules(words: Vec<String>, rules: &[CollocationRule]) -> Vec<String> {
    if rules.is_empty() {
        return words;
    }
    let mut out = Vec::with_capacity(words.len());
    let mut i = 0;
    'outer: while i < words.len() {
        for rule in rules {
            let len = rule.phrase.len();
            if i + len <= words.len() && words[i..i + len] == rule.phrase[..] {
                out.push(rule.replacement.clone());
                i += len;
                continue 'outer;
            }
        }
        out.push(words[i].clone());
        i += 1;
    }
    out
}

/// Lowercase, strip punctuation, split on whitespace, merge collocations
/// greedily left-to-right (first matching rule wins), intern tokens in
/// first-appearance order, and tabulate empirical frequencies.
pub fn tokenize(text: &str, rules: &[CollocationRule]) -> Result<Corpus> {
    let words = apply_rules(clean_words(text), rules);
    if words.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut token_names: Vec<String> = Vec::new();
    let mut token_ids: HashMap<String, u32> = HashMap::new();
    let mut tokens: Vec<u32> = Vec::with_capacity(words.len());
    for word in words {
        let id = match token_ids.get(&word) {
            Some(&id) => id,
            None => {
                let id = token_names.len() as u32;
                token_names.push(word.clone());
                token_ids.insert(word, id);
                id
            }
        };
        tokens.push(id);
    }
    let empirical_pi = empirical_distribution(&tokens, token_names.len())?;
    Ok(Corpus { token_names, token_ids, tokens, empirical_pi })
}

fn empirical_distribution(tokens: &[u32], vocab: usize) -> Result<Distribution> {
    let mut counts = vec![0u64; vocab];
    for &t in tokens {
        counts[t as usize] += 1;
    }
    let n = tokens.len() as f64;
    Distribution::new(counts.iter().map(|&c| c as f64 / n).collect())
}

impl Corpus {
    /// Total token count N.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn vocabulary_size(&self) -> usize {
        self.token_names.len()
    }

    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }

    pub fn token_name(&self, id: u32) -> Option<&str> {
        self.token_names.get(id as usize).map(String::as_str)
    }

    pub fn token_id(&self, name: &str) -> Option<u32> {
        self.token_ids.get(name).copied()
    }

    pub fn empirical_pi(&self) -> &Distribution {
        &self.empirical_pi
    }

    /// Write the token-per-line cache at `out` and a JSON sidecar (same
    /// stem, .json extension) with N, vocabulary size, and frequencies.
    pub fn write_cache(&self, out: &Path) -> Result<()> {
        let mut body = String::new();
        for &t in &self.tokens {
            body.push_str(&self.token_names[t as usize]);
            body.push('\n');
        }
        std::fs::write(out, body)?;
        let sidecar = CorpusSidecar {
            n_tokens: self.len(),
            vocabulary_size: self.vocabulary_size(),
            frequencies: self
                .token_names
                .iter()
                .enumerate()
                .map(|(id, name)| (name.clone(), self.empirical_pi.prob(id as u32)))
                .collect(),
        };
        let mut f = std::fs::File::create(out.with_extension("json"))?;
        serde_json::to_writer_pretty(&mut f, &sidecar)?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CorpusSidecar {
    pub n_tokens: usize,
    pub vocabulary_size: usize,
    pub frequencies: std::collections::BTreeMap<String, f64>,
}

/// Overlapping length-n windows with starts 0, stride, 2*stride, ...
/// while the window fits; stride = max(1, floor(n/15)).
pub fn extract_trajectories(corpus: &Corpus, n: usize) -> Result<Vec<Trajectory>> {
    let total = corpus.len();
    if n == 0 {
        return Err(Error::SequenceTooShort { n: 0, min: 1 });
    }
    if n > total {
        return Err(Error::WindowTooLong { n, total });
    }
    let stride = (n / 15).max(1);
    let mut out = Vec::new();
    let mut start = 0;
    while start + n <= total {
        out.push(Trajectory::new(corpus.tokens[start..start + n].to_vec())?);
        start += stride;
    }
    Ok(out)
}

/// Parse collocation rules, one per line: `token token ... => merged`.
/// Blank lines and `#` comments are skipped.
pub fn parse_collocation_rules(text: &str) -> Result<Vec<CollocationRule>> {
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let (lhs, rhs) = line.split_once("=>").ok_or_else(|| Error::InvalidRule {
            line: lineno,
            reason: "missing `=>`".into(),
        })?;
        let phrase: Vec<String> = lhs.split_whitespace().map(str::to_owned).collect();
        if phrase.len() < 2 {
            return Err(Error::InvalidRule {
                line: lineno,
                reason: "phrase must have at least 2 tokens".into(),
            });
        }
        let replacement = rhs.trim();
        if replacement.is_empty() || replacement.split_whitespace().count() != 1 {
            return Err(Error::InvalidRule {
                line: lineno,
                reason: "replacement must be a single token".into(),
            });
        }
        rules.push(CollocationRule { phrase, replacement: replacement.to_owned() });
    }
    Ok(rules)
}

/// Read a trajectory file in the shared token-per-line format. With
/// `numeric`, lines parse directly as symbol ids; otherwise tokens are
/// interned in first-appearance order.
pub fn read_trajectory_file(path: &Path, numeric: bool) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)?;
    let mut symbols = Vec::new();
    if numeric {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let id: u32 = line.parse().map_err(|_| Error::InvalidSpec {
                field: "trajectory",
                reason: format!("line {}: `{line}` is not a symbol id", idx + 1),
            })?;
            symbols.push(id);
        }
    } else {
        let mut ids: HashMap<&str, u32> = HashMap::new();
        for line in text.lines() {
            let tok = line.trim();
            if tok.is_empty() {
                continue;
            }
            let next = ids.len() as u32;
            symbols.push(*ids.entry(tok).or_insert(next));
        }
    }
    Trajectory::new(symbols)
}
