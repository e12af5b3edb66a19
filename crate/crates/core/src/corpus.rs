//! Corpus ingestion, domain management, SPIS low-resource sampling,
//! vocabulary construction, and example encoding.
//!
//! Input files are UTF-8 with one record per line, tab-separated:
//! `domain \t utterance \t serialized_parse`, stored in directories as
//! `<domain>_<split>.tsv`. Utterances are lower-cased and whitespace
//! tokenized at load; parses are canonicalized.
//!
//! Corpora are immutable after load; sampling and encoding are pure given
//! `(input, seed)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tree::{self, LabelKind, ParseTree, TreeError};

/// Unknown-token placeholder for encoder inputs. Unseen source tokens map to
/// it but remain copyable by position.
pub const UNK_TOKEN: &str = "<unk>";

/// The node-closing ontology token.
pub const CLOSE_TOKEN: &str = "]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A domain-tagged (utterance, canonical parse) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    domain: String,
    utterance: Vec<String>,
    parse: ParseTree,
}

impl Example {
    /// Canonicalizes the parse; the utterance must be non-empty.
    pub fn new(
        domain: &str,
        utterance: Vec<String>,
        parse: ParseTree,
    ) -> Result<Self, CorpusError> {
        if utterance.is_empty() {
            return Err(CorpusError::MalformedRecord {
                line: 0,
                reason: "empty utterance".into(),
            });
        }
        Ok(Example {
            domain: domain.to_string(),
            utterance,
            parse: parse.canonicalize(),
        })
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn utterance(&self) -> &[String] {
        &self.utterance
    }

    pub fn parse(&self) -> &ParseTree {
        &self.parse
    }

    /// Distinct label texts (`IN:X` / `SL:Y`) occurring in the parse.
    pub fn label_set(&self) -> BTreeSet<String> {
        self.parse.labels().iter().map(|l| l.text()).collect()
    }
}

/// An immutable list of examples for one split, possibly spanning domains.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    split: Split,
    examples: Vec<Example>,
    domains: BTreeSet<String>,
}

impl Corpus {
    pub fn new(split: Split, examples: Vec<Example>) -> Self {
        let domains = examples.iter().map(|e| e.domain.clone()).collect();
        Corpus { split, examples, domains }
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn domains(&self) -> &BTreeSet<String> {
        &self.domains
    }

    pub fn filter_domain(&self, domain: &str) -> Corpus {
        Corpus::new(
            self.split,
            self.examples
                .iter()
                .filter(|e| e.domain == domain)
                .cloned()
                .collect(),
        )
    }

    /// Concatenates corpora; the split tag of the first is kept.
    pub fn concat(parts: &[&Corpus]) -> Corpus {
        let split = parts.first().map_or(Split::Train, |c| c.split);
        Corpus::new(
            split,
            parts.iter().flat_map(|c| c.examples.iter().cloned()).collect(),
        )
    }

    /// Duplicates every example `factor` times; `factor == 1` is the identity.
    pub fn upsample(&self, factor: usize) -> Corpus {
        assert!(factor >= 1, "upsample factor must be >= 1");
        Corpus::new(
            self.split,
            self.examples
                .iter()
                .flat_map(|e| std::iter::repeat_n(e.clone(), factor))
                .collect(),
        )
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("parse error at line {line}: {source}")]
    ParseError { line: usize, source: TreeError },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("unknown domain {0:?}")]
    UnknownDomain(String),
    #[error("invalid SPIS value {0}; must be >= 1")]
    InvalidSpis(usize),
    #[error("leaf-slot token {token:?} does not occur in the utterance")]
    TokenNotInSource { token: String },
    #[error("parse is not in canonical form: tokens under a non-leaf node")]
    NotCanonical,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Loads a TSV corpus file. Utterances are lower-cased and whitespace
/// tokenized; parses have their utterance-token leaves lower-cased and are
/// canonicalized. A leading `domain/utterance/semantic_parse` header row is
/// skipped if present.
pub fn load_corpus(path: &Path, split: Split) -> Result<Corpus, CorpusError> {
    if !path.exists() {
        return Err(CorpusError::FileNotFound(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut examples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if idx == 0 && is_header(&fields) {
            continue;
        }
        if fields.len() != 3 {
            return Err(CorpusError::MalformedRecord {
                line: line_no,
                reason: format!("expected 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let (domain, utterance_text, parse_text) = (fields[0], fields[1], fields[2]);
        if domain.trim().is_empty() {
            return Err(CorpusError::MalformedRecord {
                line: line_no,
                reason: "empty domain field".into(),
            });
        }
        let utterance: Vec<String> = utterance_text
            .to_lowercase()
            .split_whitespace()
            .map(str::to_string)
            .collect();
        if utterance.is_empty() {
            return Err(CorpusError::MalformedRecord {
                line: line_no,
                reason: "empty utterance field".into(),
            });
        }
        let parse = tree::parse_serialized(parse_text)
            .and_then(|t| t.map_tokens(|tok| tok.to_lowercase()))
            .map_err(|source| CorpusError::ParseError { line: line_no, source })?;
        examples.push(Example::new(domain, utterance, parse)?);
    }
    if examples.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(Corpus::new(split, examples))
}

fn is_header(fields: &[&str]) -> bool {
    fields.len() >= 2
        && fields[0].eq_ignore_ascii_case("domain")
        && fields[1].eq_ignore_ascii_case("utterance")
}

/// Resolves `<dir>/<domain>_<split>.tsv`. For the valid split,
/// `<domain>_eval.tsv` is accepted as a fallback to match the public
/// TOPv2 file naming.
pub fn split_path(dir: &Path, domain: &str, split: Split) -> PathBuf {
    let primary = dir.join(format!("{domain}_{split}.tsv"));
    if split == Split::Valid && !primary.exists() {
        let alt = dir.join(format!("{domain}_eval.tsv"));
        if alt.exists() {
            return alt;
        }
    }
    primary
}

/// Loads one domain+split file from a corpus directory.
pub fn load_domain_split(
    dir: &Path,
    domain: &str,
    split: Split,
) -> Result<Corpus, CorpusError> {
    load_corpus(&split_path(dir, domain, split), split)
}

/// Writes a corpus back out in the TSV input format.
pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<(), CorpusError> {
    let mut out = String::new();
    for e in corpus.examples() {
        out.push_str(e.domain());
        out.push('\t');
        out.push_str(&e.utterance().join(" "));
        out.push('\t');
        out.push_str(&e.parse().serialize());
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Distinct intent and slot labels occurring in one domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelInventory {
    pub intents: BTreeSet<String>,
    pub slots: BTreeSet<String>,
}

pub fn label_inventory(
    corpus: &Corpus,
    domain: &str,
) -> Result<LabelInventory, CorpusError> {
    if !corpus.domains().contains(domain) {
        return Err(CorpusError::UnknownDomain(domain.to_string()));
    }
    let mut intents = BTreeSet::new();
    let mut slots = BTreeSet::new();
    for e in corpus.examples().iter().filter(|e| e.domain() == domain) {
        for label in e.parse().labels() {
            match label.kind() {
                LabelKind::Intent => intents.insert(label.name().to_string()),
                LabelKind::Slot => slots.insert(label.name().to_string()),
            };
        }
    }
    Ok(LabelInventory { intents, slots })
}

/// Greedy-random SPIS sampling: visit labels in random order and, for each
/// label short of its quota, draw random unselected examples containing it
/// until `min(spis, available)` selected examples cover it. Deterministic
/// given the seed.
pub fn spis_sample(
    corpus: &Corpus,
    domain: &str,
    spis: usize,
    seed: u64,
) -> Result<Corpus, CorpusError> {
    let pool: Vec<&Example> = corpus
        .examples()
        .iter()
        .filter(|e| e.domain() == domain)
        .collect();
    if pool.is_empty() {
        return Err(CorpusError::UnknownDomain(domain.to_string()));
    }
    let picked = sample_indices(&pool, spis, seed)?;
    Ok(Corpus::new(
        corpus.split(),
        picked.into_iter().map(|i| pool[i].clone()).collect(),
    ))
}

/// Samples a train subset and a validation subset at the same SPIS with
/// independent seeds; the two subsets are disjoint (validation draws from
/// the examples left over after the train draw).
pub fn spis_sample_disjoint_pair(
    corpus: &Corpus,
    domain: &str,
    spis: usize,
    train_seed: u64,
    valid_seed: u64,
) -> Result<(Corpus, Corpus), CorpusError> {
    let pool: Vec<&Example> = corpus
        .examples()
        .iter()
        .filter(|e| e.domain() == domain)
        .collect();
    if pool.is_empty() {
        return Err(CorpusError::UnknownDomain(domain.to_string()));
    }
    let train_idx = sample_indices(&pool, spis, train_seed)?;
    let chosen: BTreeSet<usize> = train_idx.iter().copied().collect();
    let rest: Vec<&Example> = pool
        .iter()
        .enumerate()
        .filter(|(i, _)| !chosen.contains(i))
        .map(|(_, e)| *e)
        .collect();
    let valid_idx = if rest.is_empty() {
        Vec::new()
    } else {
        sample_indices(&rest, spis, valid_seed)?
    };
    let train = Corpus::new(
        Split::Train,
        train_idx.into_iter().map(|i| pool[i].clone()).collect(),
    );
    let valid = Corpus::new(
        Split::Valid,
        valid_idx.into_iter().map(|i| rest[i].clone()).collect(),
    );
    Ok((train, valid))
}

fn sample_indices(
    pool: &[&Example],
    spis: usize,
    seed: u64,
) -> Result<Vec<usize>, CorpusError> {
    if spis == 0 {
        return Err(CorpusError::InvalidSpis(spis));
    }
    // Sorted label map for a deterministic visit baseline before shuffling.
    let mut by_label: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, e) in pool.iter().enumerate() {
        for label in e.label_set() {
            by_label.entry(label).or_default().push(i);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<&String> = by_label.keys().collect();
    shuffle(&mut order, &mut rng);

    let mut selected = vec![false; pool.len()];
    for label in order {
        let containing = &by_label[label];
        let quota = spis.min(containing.len());
        let mut have = containing.iter().filter(|&&i| selected[i]).count();
        if have >= quota {
            continue;
        }
        let mut candidates: Vec<usize> =
            containing.iter().copied().filter(|&i| !selected[i]).collect();
        while have < quota {
            let j = rng.random_range(0..candidates.len());
            selected[candidates.swap_remove(j)] = true;
            have += 1;
        }
    }
    Ok((0..pool.len()).filter(|&i| selected[i]).collect())
}

/// Fisher-Yates; kept local so sampling depends only on the ChaCha stream,
/// not on `rand`'s shuffle implementation details.
fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

/// Source-token and ontology-token vocabularies with disjoint id spaces:
/// ontology ids occupy `0..ontology_size()` and source ids
/// `ontology_size()..ontology_size()+source_size()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    ontology: Vec<String>,
    ontology_index: HashMap<String, usize>,
    source: Vec<String>,
    source_index: HashMap<String, usize>,
    unk_row: usize,
}

impl Vocabulary {
    /// Builds from one or more corpora: the source vocabulary over all
    /// utterance tokens plus [`UNK_TOKEN`], the ontology vocabulary over all
    /// labels plus [`CLOSE_TOKEN`]. Sorted, so ids are stable across builds.
    pub fn build(corpora: &[&Corpus]) -> Result<Vocabulary, CorpusError> {
        if corpora.iter().all(|c| c.is_empty()) {
            return Err(CorpusError::EmptyCorpus);
        }
        let mut source_set: BTreeSet<String> = BTreeSet::new();
        let mut ontology_set: BTreeSet<String> = BTreeSet::new();
        ontology_set.insert(CLOSE_TOKEN.to_string());
        source_set.insert(UNK_TOKEN.to_string());
        for corpus in corpora {
            for e in corpus.examples() {
                source_set.extend(e.utterance().iter().cloned());
                ontology_set
                    .extend(e.parse().labels().iter().map(|l| l.opening_token()));
            }
        }
        let ontology: Vec<String> = ontology_set.into_iter().collect();
        let source: Vec<String> = source_set.into_iter().collect();
        let ontology_index =
            ontology.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let source_index =
            source.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let unk_row = source.iter().position(|t| t == UNK_TOKEN).unwrap();
        Ok(Vocabulary { ontology, ontology_index, source, source_index, unk_row })
    }

    pub fn ontology_size(&self) -> usize {
        self.ontology.len()
    }

    pub fn source_size(&self) -> usize {
        self.source.len()
    }

    /// Ontology-token id in `0..ontology_size()`.
    pub fn ontology_id(&self, token: &str) -> Option<usize> {
        self.ontology_index.get(token).copied()
    }

    pub fn ontology_token(&self, id: usize) -> Option<&str> {
        self.ontology.get(id).map(String::as_str)
    }

    pub fn close_id(&self) -> usize {
        self.ontology_index[CLOSE_TOKEN]
    }

    /// Row of a source token in the source embedding table, with the UNK
    /// fallback for unseen tokens.
    pub fn source_row(&self, token: &str) -> usize {
        self.source_index.get(token).copied().unwrap_or(self.unk_row)
    }

    pub fn source_token(&self, row: usize) -> Option<&str> {
        self.source.get(row).map(String::as_str)
    }

    /// Global id of a source token: offset past the ontology id range.
    pub fn source_global_id(&self, token: &str) -> usize {
        self.ontology_size() + self.source_row(token)
    }

    pub fn ontology_tokens(&self) -> &[String] {
        &self.ontology
    }

    pub fn source_tokens(&self) -> &[String] {
        &self.source
    }
}

/// Builds the vocabulary of a single corpus.
pub fn build_vocab(corpus: &Corpus) -> Result<Vocabulary, CorpusError> {
    Vocabulary::build(&[corpus])
}

/// One output symbol: generate an ontology token or copy a source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputSym {
    Generate(usize),
    Copy(usize),
}

/// The target symbol sequence for one example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedTarget {
    pub symbols: Vec<OutputSym>,
}

impl EncodedTarget {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Renders back to a serialized-parse string against an utterance:
    /// `Generate(id)` becomes the ontology token, `Copy(i)` the utterance
    /// token at position `i`.
    pub fn render(
        &self,
        vocab: &Vocabulary,
        utterance: &[String],
    ) -> Option<String> {
        let mut parts: Vec<&str> = Vec::with_capacity(self.symbols.len());
        for sym in &self.symbols {
            match *sym {
                OutputSym::Generate(id) => parts.push(vocab.ontology_token(id)?),
                OutputSym::Copy(i) => parts.push(utterance.get(i)?.as_str()),
            }
        }
        Some(parts.join(" "))
    }
}

/// Encodes a canonical example: labels and `]` map to `Generate` ids;
/// each leaf-slot token maps to `Copy(position)` choosing the leftmost
/// not-yet-consumed matching source position, with positions consumed
/// per slot.
pub fn encode_example(
    example: &Example,
    vocab: &Vocabulary,
) -> Result<EncodedTarget, CorpusError> {
    use crate::tree::{Child, TreeNode};

    fn walk(
        node: &TreeNode,
        utterance: &[String],
        vocab: &Vocabulary,
        out: &mut Vec<OutputSym>,
    ) -> Result<(), CorpusError> {
        let open = node.label().opening_token();
        let id = vocab
            .ontology_id(&open)
            .ok_or_else(|| CorpusError::UnknownDomain(open.clone()))?;
        out.push(OutputSym::Generate(id));
        if node.is_leaf_slot() {
            let mut consumed = vec![false; utterance.len()];
            for child in node.children() {
                if let Child::Token(tok) = child {
                    let pos = utterance
                        .iter()
                        .enumerate()
                        .position(|(i, w)| !consumed[i] && w == tok)
                        .ok_or_else(|| CorpusError::TokenNotInSource {
                            token: tok.clone(),
                        })?;
                    consumed[pos] = true;
                    out.push(OutputSym::Copy(pos));
                }
            }
        } else {
            for child in node.children() {
                match child {
                    Child::Node(n) => walk(n, utterance, vocab, out)?,
                    Child::Token(_) => return Err(CorpusError::NotCanonical),
                }
            }
        }
        out.push(OutputSym::Generate(vocab.close_id()));
        Ok(())
    }

    let mut symbols = Vec::new();
    walk(example.parse().root(), example.utterance(), vocab, &mut symbols)?;
    Ok(EncodedTarget { symbols })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn example(domain: &str, utterance: &str, parse: &str) -> Example {
        Example::new(
            domain,
            utterance.split_whitespace().map(str::to_string).collect(),
            tree::parse_serialized(parse).unwrap(),
        )
        .unwrap()
    }

    fn tmp_corpus(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for line in lines {
            writeln!(f, "{line}").unwrap();
        }
        f
    }

    #[test]
    fn load_three_line_fixture() {
        let f = tmp_corpus(&[
            "alarm\tSet alarm for NOON\t[IN:CREATE_ALARM [SL:DATE_TIME for NOON ] ]",
            "alarm\tdelete my alarm\t[IN:DELETE_ALARM ]",
            "weather\thow cold is it\t[IN:GET_WEATHER [SL:WEATHER_ATTRIBUTE cold ] ]",
        ]);
        let c = load_corpus(f.path(), Split::Train).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(
            c.domains().iter().cloned().collect::<Vec<_>>(),
            ["alarm", "weather"]
        );
        // lower-casing applies to the utterance and the parse leaves
        assert_eq!(c.examples()[0].utterance()[3], "noon");
        assert_eq!(
            c.examples()[0].parse().serialize(),
            "[IN:CREATE_ALARM [SL:DATE_TIME for noon ] ]"
        );
        let inv = label_inventory(&c, "alarm").unwrap();
        assert_eq!(
            inv.intents.iter().cloned().collect::<Vec<_>>(),
            ["CREATE_ALARM", "DELETE_ALARM"]
        );
        assert_eq!(inv.slots.iter().cloned().collect::<Vec<_>>(), ["DATE_TIME"]);
    }

    #[test]
    fn load_skips_header_row() {
        let f = tmp_corpus(&[
            "domain\tutterance\tsemantic_parse",
            "alarm\tset alarm\t[IN:CREATE_ALARM ]",
        ]);
        assert_eq!(load_corpus(f.path(), Split::Train).unwrap().len(), 1);
    }

    #[test]
    fn load_reports_line_numbers() {
        let f = tmp_corpus(&[
            "alarm\tset alarm\t[IN:CREATE_ALARM ]",
            "alarm\tmissing field",
        ]);
        match load_corpus(f.path(), Split::Train) {
            Err(CorpusError::MalformedRecord { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected MalformedRecord, got {other:?}"),
        }
        let f = tmp_corpus(&["alarm\tset alarm\t[IN:CREATE_ALARM"]);
        match load_corpus(f.path(), Split::Train) {
            Err(CorpusError::ParseError { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn load_empty_file_is_empty_corpus() {
        let f = tmp_corpus(&[]);
        assert!(matches!(
            load_corpus(f.path(), Split::Train),
            Err(CorpusError::EmptyCorpus)
        ));
    }

    #[test]
    fn load_missing_file() {
        assert!(matches!(
            load_corpus(Path::new("/nonexistent/x.tsv"), Split::Train),
            Err(CorpusError::FileNotFound(_))
        ));
    }

    #[test]
    fn label_inventory_single_example() {
        let c = Corpus::new(Split::Train, vec![example("d", "x", "[IN:A [SL:B x ] ]")]);
        let inv = label_inventory(&c, "d").unwrap();
        assert_eq!(inv.intents.iter().cloned().collect::<Vec<_>>(), ["A"]);
        assert_eq!(inv.slots.iter().cloned().collect::<Vec<_>>(), ["B"]);
        assert!(matches!(
            label_inventory(&c, "nope"),
            Err(CorpusError::UnknownDomain(_))
        ));
    }

    #[test]
    fn spis_disjoint_labels_select_quota_times_labels() {
        // 100 labels, 30 examples each, every example carries exactly one label.
        let mut examples = Vec::new();
        for l in 0..100 {
            for _ in 0..30 {
                examples.push(example("d", "tok", &format!("[IN:L{l:03} ]")));
            }
        }
        let c = Corpus::new(Split::Train, examples);
        let s = spis_sample(&c, "d", 25, 7).unwrap();
        assert_eq!(s.len(), 2500);
    }

    #[test]
    fn spis_quota_clipped_at_availability() {
        let examples = vec![example("d", "x", "[IN:L ]"); 5];
        let c = Corpus::new(Split::Train, examples);
        let s = spis_sample(&c, "d", 25, 3).unwrap();
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn spis_rejects_zero_and_unknown_domain() {
        let c = Corpus::new(Split::Train, vec![example("d", "x", "[IN:A ]")]);
        assert!(matches!(
            spis_sample(&c, "d", 0, 1),
            Err(CorpusError::InvalidSpis(0))
        ));
        assert!(matches!(
            spis_sample(&c, "other", 1, 1),
            Err(CorpusError::UnknownDomain(_))
        ));
    }

    #[test]
    fn spis_deterministic_per_seed() {
        let c = crate::synthetic::random_sampling_corpus(11);
        let a = spis_sample(&c, "d0", 3, 42).unwrap();
        let b = spis_sample(&c, "d0", 3, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spis_disjoint_pair_is_disjoint_and_covering() {
        let c = crate::synthetic::random_sampling_corpus(5);
        let (train, valid) = spis_sample_disjoint_pair(&c, "d0", 3, 1, 2).unwrap();
        assert!(!train.is_empty());
        assert!(!valid.is_empty());
        for e in valid.examples() {
            assert!(!train.examples().contains(e));
        }
    }

    #[test]
    fn spis_mean_size_monotone_in_spis() {
        let c = crate::synthetic::random_sampling_corpus(3);
        let mean_size = |spis: usize| -> f64 {
            (0..20)
                .map(|seed| spis_sample(&c, "d0", spis, seed).unwrap().len())
                .sum::<usize>() as f64
                / 20.0
        };
        let (m1, m3, m9) = (mean_size(1), mean_size(3), mean_size(9));
        assert!(m1 <= m3 && m3 <= m9, "sizes not monotone: {m1} {m3} {m9}");
    }

    #[test]
    fn vocab_minimal_ontology() {
        let c = Corpus::new(Split::Train, vec![example("d", "x", "[IN:A [SL:B x ] ]")]);
        let v = build_vocab(&c).unwrap();
        assert_eq!(v.ontology_size(), 3);
        assert_eq!(v.ontology_tokens(), ["[IN:A", "[SL:B", "]"]);
        assert_eq!(v.ontology_id("[IN:A"), Some(0));
        assert_eq!(v.close_id(), 2);
    }

    #[test]
    fn vocab_ids_stable_and_disjoint() {
        let c = crate::synthetic::random_sampling_corpus(9);
        let v1 = build_vocab(&c).unwrap();
        let v2 = build_vocab(&c).unwrap();
        assert_eq!(v1, v2);
        // every source global id is past the ontology range
        for tok in v1.source_tokens() {
            assert!(v1.source_global_id(tok) >= v1.ontology_size());
        }
        assert_eq!(build_vocab(&Corpus::new(Split::Train, vec![]))
            .err()
            .map(|e| matches!(e, CorpusError::EmptyCorpus)), Some(true));
    }

    #[test]
    fn vocab_unk_fallback() {
        let c = Corpus::new(Split::Train, vec![example("d", "x", "[IN:A ]")]);
        let v = build_vocab(&c).unwrap();
        assert_eq!(v.source_row("never-seen"), v.source_row(UNK_TOKEN));
    }

    #[test]
    fn encode_alarm_example_positions() {
        let e = example(
            "alarm",
            "set alarm for noon tomorrow",
            "[IN:CREATE_ALARM [SL:DATE_TIME for noon tomorrow ] ]",
        );
        let v = build_vocab(&Corpus::new(Split::Train, vec![e.clone()])).unwrap();
        let enc = encode_example(&e, &v).unwrap();
        let gen = |t: &str| OutputSym::Generate(v.ontology_id(t).unwrap());
        assert_eq!(
            enc.symbols,
            vec![
                gen("[IN:CREATE_ALARM"),
                gen("[SL:DATE_TIME"),
                OutputSym::Copy(2),
                OutputSym::Copy(3),
                OutputSym::Copy(4),
                gen("]"),
                gen("]"),
            ]
        );
    }

    #[test]
    fn encode_tokenless_parse_is_all_generate() {
        let e = example("d", "whatever words", "[IN:A [SL:B [IN:C ] ] ]");
        let v = build_vocab(&Corpus::new(Split::Train, vec![e.clone()])).unwrap();
        let enc = encode_example(&e, &v).unwrap();
        assert!(enc
            .symbols
            .iter()
            .all(|s| matches!(s, OutputSym::Generate(_))));
        assert_eq!(enc.len(), 6);
    }

    #[test]
    fn encode_leftmost_unconsumed_rule() {
        let e = example("d", "a b a", "[IN:X [SL:Y a a ] ]");
        let v = build_vocab(&Corpus::new(Split::Train, vec![e.clone()])).unwrap();
        let enc = encode_example(&e, &v).unwrap();
        let copies: Vec<usize> = enc
            .symbols
            .iter()
            .filter_map(|s| match s {
                OutputSym::Copy(i) => Some(*i),
                _ => None,
            })
            .collect();
        assert_eq!(copies, [0, 2]);
    }

    #[test]
    fn encode_missing_token_errors() {
        let e = example("d", "a b", "[IN:X [SL:Y c ] ]");
        let v = build_vocab(&Corpus::new(Split::Train, vec![e.clone()])).unwrap();
        assert!(matches!(
            encode_example(&e, &v),
            Err(CorpusError::TokenNotInSource { .. })
        ));
    }

    #[test]
    fn encode_render_round_trips_canonical_parse() {
        let e = example(
            "d",
            "text yes to bill and mindy",
            "[IN:SEND_MESSAGE [SL:RECIPIENT mindy ] [SL:RECIPIENT bill ] \
             [SL:CONTENT_EXACT yes ] ]",
        );
        let v = build_vocab(&Corpus::new(Split::Train, vec![e.clone()])).unwrap();
        let enc = encode_example(&e, &v).unwrap();
        let rendered = enc.render(&v, e.utterance()).unwrap();
        let reparsed = tree::parse_serialized(&rendered).unwrap().canonicalize();
        assert_eq!(&reparsed, e.parse());
    }

    #[test]
    fn upsample_counts() {
        let c = Corpus::new(Split::Train, vec![example("d", "x", "[IN:A ]"); 5]);
        assert_eq!(c.upsample(10).len(), 50);
        assert_eq!(c.upsample(1), c);
        let big = Corpus::new(Split::Train, vec![example("d", "x", "[IN:A ]"); 493]);
        assert_eq!(big.upsample(100).len(), 49300);
    }
}
