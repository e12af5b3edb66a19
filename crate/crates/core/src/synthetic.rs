//! Seeded synthetic data: random valid parse trees for property tests and a
//! multi-domain toy grammar for desk-scale training benchmarks.
//!
//! Everything here is a pure function of its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Example, Split};
use crate::seeding::mix;
use crate::tree::{Child, Label, LabelKind, ParseTree, TreeNode};

const INTENT_NAMES: &[&str] = &[
    "ALPHA", "BRAVO", "CHARLIE", "DELTA", "ECHO", "FOXTROT", "GOLF", "HOTEL",
];
const SLOT_NAMES: &[&str] = &[
    "ITEM", "TIME", "PLACE", "PERSON", "AMOUNT", "REASON", "TARGET", "STYLE",
];
const TOKEN_POOL: &[&str] = &[
    "a", "b", "red", "blue", "dog", "cat", "one", "two", "seven", "north",
    "cold", "late",
];

fn pick<'a, T: Copy>(rng: &mut ChaCha8Rng, items: &'a [T]) -> T {
    items[rng.random_range(0..items.len())]
}

/// A random tree satisfying all structural invariants: intent root, strict
/// intent/slot alternation, non-empty bracket-free tokens.
pub fn random_tree(seed: u64) -> ParseTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = random_node(&mut rng, LabelKind::Intent, 1, 5);
    ParseTree::new(root).expect("generated tree must be valid")
}

fn random_node(
    rng: &mut ChaCha8Rng,
    kind: LabelKind,
    depth: usize,
    max_depth: usize,
) -> TreeNode {
    let name = match kind {
        LabelKind::Intent => pick(rng, INTENT_NAMES),
        LabelKind::Slot => pick(rng, SLOT_NAMES),
    };
    let label = Label::new(kind, name).unwrap();
    let n_children = rng.random_range(0..=3);
    let child_kind = match kind {
        LabelKind::Intent => LabelKind::Slot,
        LabelKind::Slot => LabelKind::Intent,
    };
    let children = (0..n_children)
        .map(|_| {
            if depth < max_depth && rng.random_bool(0.4) {
                Child::Node(random_node(rng, child_kind, depth + 1, max_depth))
            } else {
                Child::Token(pick(rng, TOKEN_POOL).to_string())
            }
        })
        .collect();
    TreeNode::new(label, children)
}

/// Permutes the relative order of sibling nodes everywhere in the tree,
/// leaving tokens in place. Canonicalization must erase the difference.
pub fn shuffle_siblings(tree: &ParseTree, seed: u64) -> ParseTree {
    fn walk(node: &TreeNode, rng: &mut ChaCha8Rng) -> TreeNode {
        let mut children: Vec<Child> = node.children().to_vec();
        let node_slots: Vec<usize> = children
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, Child::Node(_)))
            .map(|(i, _)| i)
            .collect();
        let mut nodes: Vec<Child> = node_slots
            .iter()
            .map(|&i| children[i].clone())
            .collect();
        for i in (1..nodes.len()).rev() {
            let j = rng.random_range(0..=i);
            nodes.swap(i, j);
        }
        for (slot, c) in node_slots.into_iter().zip(nodes) {
            children[slot] = c;
        }
        let children = children
            .into_iter()
            .map(|c| match c {
                Child::Node(n) => Child::Node(walk(&n, rng)),
                t => t,
            })
            .collect();
        TreeNode::new(node.label().clone(), children)
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ParseTree::new(walk(tree.root(), &mut rng)).expect("permutation preserves validity")
}

/// A single-domain corpus (domain name `d0`) with a randomized label mix,
/// sized 60-140 examples, for exercising SPIS coverage guarantees.
pub fn random_sampling_corpus(seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 0xc0de));
    let n = rng.random_range(60..140);
    let mut examples = Vec::with_capacity(n);
    for _ in 0..n {
        let mut leaf_tokens: Vec<String> = Vec::new();
        let intent = Label::intent(pick(&mut rng, INTENT_NAMES)).unwrap();
        let n_slots = rng.random_range(0..=3);
        let mut children = Vec::new();
        for _ in 0..n_slots {
            let slot = Label::slot(pick(&mut rng, SLOT_NAMES)).unwrap();
            if rng.random_bool(0.15) {
                // nested intent under the slot
                let inner_intent = Label::intent(pick(&mut rng, INTENT_NAMES)).unwrap();
                let tok = pick(&mut rng, TOKEN_POOL).to_string();
                leaf_tokens.push(tok.clone());
                let inner_slot = TreeNode::new(
                    Label::slot(pick(&mut rng, SLOT_NAMES)).unwrap(),
                    vec![Child::Token(tok)],
                );
                children.push(Child::Node(TreeNode::new(
                    slot,
                    vec![Child::Node(TreeNode::new(
                        inner_intent,
                        vec![Child::Node(inner_slot)],
                    ))],
                )));
            } else {
                let n_tok = rng.random_range(1..=2);
                let toks: Vec<String> = (0..n_tok)
                    .map(|_| pick(&mut rng, TOKEN_POOL).to_string())
                    .collect();
                leaf_tokens.extend(toks.iter().cloned());
                children.push(Child::Node(TreeNode::new(
                    slot,
                    toks.into_iter().map(Child::Token).collect(),
                )));
            }
        }
        let parse = ParseTree::new(TreeNode::new(intent, children)).unwrap();
        // utterance = all leaf tokens plus a couple of distractors
        let mut utterance = leaf_tokens;
        for _ in 0..rng.random_range(1..=3) {
            utterance.push(pick(&mut rng, TOKEN_POOL).to_string());
        }
        examples.push(Example::new("d0", utterance, parse).unwrap());
    }
    Corpus::new(Split::Train, examples)
}

// ---------------------------------------------------------------------------
// Toy multi-domain grammar benchmark
// ---------------------------------------------------------------------------

const CARRIER_NOUNS: &[&str] = &["box", "lamp", "song", "game", "note", "list", "plan", "ride"];
const TIME_WORDS: &[&str] = &["noon", "tonight", "monday", "today", "friday", "morning"];

/// Generates one toy-domain corpus. Domains share utterance templates and
/// carrier vocabulary but carry domain-specific intent/slot labels and some
/// domain-specific content words, mirroring a multi-domain assistant corpus.
pub fn toy_domain_corpus(domain: &str, seed: u64, n: usize, split: Split) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 0x70d0));
    let upper = domain.to_uppercase();
    let domain_words: Vec<String> = (0..5).map(|i| format!("{domain}{i}")).collect();
    let mut examples = Vec::with_capacity(n);
    for _ in 0..n {
        let obj = if rng.random_bool(0.5) {
            pick(&mut rng, CARRIER_NOUNS).to_string()
        } else {
            domain_words[rng.random_range(0..domain_words.len())].clone()
        };
        let time = pick(&mut rng, TIME_WORDS).to_string();
        let roll: f64 = rng.random();
        let (utterance, parse_text) = if roll < 0.30 {
            let verb = if rng.random_bool(0.5) { "find" } else { "show" };
            let mut u = vec![verb.to_string()];
            if rng.random_bool(0.5) {
                u.push("the".into());
            }
            u.push(obj.clone());
            if rng.random_bool(0.3) {
                u.push("please".into());
            }
            (u, format!("[IN:{upper}_FIND [SL:{upper}_ITEM {obj} ] ]"))
        } else if roll < 0.55 {
            let u = vec!["set".into(), obj.clone(), "for".into(), time.clone()];
            (
                u,
                format!(
                    "[IN:{upper}_SET [SL:{upper}_ITEM {obj} ] \
                     [SL:{upper}_TIME for {time} ] ]"
                ),
            )
        } else if roll < 0.80 {
            let mut u = vec!["get".into()];
            if rng.random_bool(0.5) {
                u.push("the".into());
            }
            u.extend([obj.clone(), "at".into(), time.clone()]);
            (
                u,
                format!(
                    "[IN:{upper}_GET [SL:{upper}_REF [IN:{upper}_FIND \
                     [SL:{upper}_ITEM {obj} ] ] ] [SL:{upper}_TIME at {time} ] ]"
                ),
            )
        } else {
            let verb = if rng.random_bool(0.5) { "stop" } else { "cancel" };
            let mut u = vec![verb.to_string()];
            if rng.random_bool(0.5) {
                u.push("now".into());
            }
            (u, format!("[IN:{upper}_CANCEL ]"))
        };
        let parse = crate::tree::parse_serialized(&parse_text).unwrap();
        examples.push(Example::new(domain, utterance, parse).unwrap());
    }
    Corpus::new(split, examples)
}

/// The desk-scale multi-domain benchmark: six source domains plus one
/// low-resource target domain.
#[derive(Debug, Clone)]
pub struct ToyBenchmark {
    pub source_domains: Vec<String>,
    pub target_domain: String,
    /// All source-domain training data concatenated.
    pub source_train: Corpus,
    /// Held-out source data for validation during source/meta training.
    pub source_valid: Corpus,
    /// Full target-domain pool; SPIS-sample train/valid subsets from it.
    pub target_pool: Corpus,
    pub target_test: Corpus,
}

pub fn toy_benchmark(seed: u64) -> ToyBenchmark {
    let source_domains: Vec<String> = ["alpha", "bravo", "copper", "delta", "ember", "flint"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let target_domain = "garnet".to_string();
    let mut train_parts = Vec::new();
    let mut valid_parts = Vec::new();
    for (i, d) in source_domains.iter().enumerate() {
        let salt = (i as u64 + 1) * 11;
        train_parts.push(toy_domain_corpus(d, mix(seed, salt), 120, Split::Train));
        valid_parts.push(toy_domain_corpus(d, mix(seed, salt + 1), 30, Split::Valid));
    }
    let source_train = Corpus::concat(&train_parts.iter().collect::<Vec<_>>());
    let source_valid = Corpus::concat(&valid_parts.iter().collect::<Vec<_>>());
    let target_pool = toy_domain_corpus(&target_domain, mix(seed, 977), 260, Split::Train);
    let target_test = toy_domain_corpus(&target_domain, mix(seed, 991), 70, Split::Test);
    ToyBenchmark {
        source_domains,
        target_domain,
        source_train,
        source_valid,
        target_pool,
        target_test,
    }
}
