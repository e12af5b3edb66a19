//! TOP-style serialized semantic-parse trees.
//!
//! A parse is a tree of alternating intent and slot nodes with utterance
//! tokens at the leaves, written as a space-separated token stream where
//! `[IN:X` / `[SL:Y` open a node and `]` closes the innermost open one:
//!
//! ```text
//! [IN:CREATE_ALARM [SL:DATE_TIME for noon tomorrow ] ]
//! ```
//!
//! All values are immutable after construction and all operations are pure,
//! so trees are safe to share across threads.

use thiserror::Error;

/// Whether a label names an intent or a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelKind {
    Intent,
    Slot,
}

impl LabelKind {
    fn prefix(self) -> &'static str {
        match self {
            LabelKind::Intent => "IN:",
            LabelKind::Slot => "SL:",
        }
    }
}

/// An intent or slot label, e.g. `IN:GET_WEATHER` or `SL:DATE_TIME`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    kind: LabelKind,
    name: String,
}

impl Label {
    pub fn new(kind: LabelKind, name: &str) -> Result<Self, TreeError> {
        if name.is_empty()
            || name.chars().any(|c| c.is_whitespace() || c == '[' || c == ']')
        {
            return Err(TreeError::InvalidLabel(name.to_string()));
        }
        Ok(Label { kind, name: name.to_string() })
    }

    pub fn intent(name: &str) -> Result<Self, TreeError> {
        Label::new(LabelKind::Intent, name)
    }

    pub fn slot(name: &str) -> Result<Self, TreeError> {
        Label::new(LabelKind::Slot, name)
    }

    /// Parses the textual form `IN:NAME` / `SL:NAME`.
    pub fn from_text(text: &str) -> Result<Self, TreeError> {
        if let Some(name) = text.strip_prefix("IN:") {
            Label::new(LabelKind::Intent, name)
        } else if let Some(name) = text.strip_prefix("SL:") {
            Label::new(LabelKind::Slot, name)
        } else {
            Err(TreeError::InvalidLabel(text.to_string()))
        }
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Textual form without the bracket, e.g. `IN:CREATE_ALARM`.
    pub fn text(&self) -> String {
        format!("{}{}", self.kind.prefix(), self.name)
    }

    /// The token that opens this node in the serialized format,
    /// e.g. `[IN:CREATE_ALARM`.
    pub fn opening_token(&self) -> String {
        format!("[{}{}", self.kind.prefix(), self.name)
    }
}

/// A child of a tree node: either a nested node or an utterance token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Child {
    Node(TreeNode),
    Token(String),
}

/// A labeled node with an ordered list of children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeNode {
    label: Label,
    children: Vec<Child>,
}

impl TreeNode {
    pub fn new(label: Label, children: Vec<Child>) -> Self {
        TreeNode { label, children }
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn children(&self) -> &[Child] {
        &self.children
    }

    fn child_nodes(&self) -> impl Iterator<Item = &TreeNode> {
        self.children.iter().filter_map(|c| match c {
            Child::Node(n) => Some(n),
            Child::Token(_) => None,
        })
    }

    fn child_tokens(&self) -> impl Iterator<Item = &str> {
        self.children.iter().filter_map(|c| match c {
            Child::Token(t) => Some(t.as_str()),
            Child::Node(_) => None,
        })
    }

    /// A leaf slot is a slot node without nested nodes; only its tokens
    /// survive canonicalization.
    pub fn is_leaf_slot(&self) -> bool {
        self.label.kind == LabelKind::Slot && self.child_nodes().next().is_none()
    }

    fn depth(&self) -> usize {
        1 + self.child_nodes().map(TreeNode::depth).max().unwrap_or(0)
    }

    fn serialize_into(&self, out: &mut String) {
        out.push_str(&self.label.opening_token());
        for child in &self.children {
            out.push(' ');
            match child {
                Child::Node(n) => n.serialize_into(out),
                Child::Token(t) => out.push_str(t),
            }
        }
        out.push_str(" ]");
    }

    fn validate(&self, parent_kind: Option<LabelKind>) -> Result<(), TreeError> {
        match (parent_kind, self.label.kind) {
            (None, LabelKind::Slot) => {
                return Err(TreeError::AlternationViolation(format!(
                    "root node {} must be an intent",
                    self.label.text()
                )));
            }
            (Some(p), k) if p == k => {
                return Err(TreeError::AlternationViolation(format!(
                    "{} nested directly under a node of the same kind",
                    self.label.text()
                )));
            }
            _ => {}
        }
        for child in &self.children {
            match child {
                Child::Node(n) => n.validate(Some(self.label.kind))?,
                Child::Token(t) => {
                    if t.is_empty() || t.contains('[') || t.contains(']') {
                        return Err(TreeError::InvalidToken(t.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    fn canonicalize(&self) -> TreeNode {
        let mut nodes: Vec<TreeNode> =
            self.child_nodes().map(TreeNode::canonicalize).collect();
        // Primary key: serialized label; secondary: full serialized subtree.
        nodes.sort_by_cached_key(|n| (n.label.opening_token(), n.serialized()));
        let children: Vec<Child> = if nodes.is_empty() && self.is_leaf_slot() {
            // Leaf slot: tokens survive in their original relative order.
            self.child_tokens()
                .map(|t| Child::Token(t.to_string()))
                .collect()
        } else {
            nodes.into_iter().map(Child::Node).collect()
        };
        TreeNode::new(self.label.clone(), children)
    }

    fn serialized(&self) -> String {
        let mut out = String::new();
        self.serialize_into(&mut out);
        out
    }
}

/// Per-tree structural statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeStats {
    pub depth: usize,
    pub is_flat: bool,
}

/// Aggregate statistics over a list of trees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusTreeStats {
    /// Fraction of trees with depth <= 2, in `[0, 1]`.
    pub flat_fraction: f64,
    pub mean_depth: f64,
}

impl CorpusTreeStats {
    pub fn flat_percent(&self) -> f64 {
        self.flat_fraction * 100.0
    }
}

/// A validated hierarchical intent/slot parse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParseTree {
    root: TreeNode,
}

impl ParseTree {
    /// Validates the full invariant set: the root is an intent, intent and
    /// slot labels strictly alternate along every path, and every token is
    /// non-empty and bracket-free.
    pub fn new(root: TreeNode) -> Result<Self, TreeError> {
        root.validate(None)?;
        Ok(ParseTree { root })
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Serialized form: single-space-separated tokens, `[IN:X`/`[SL:Y`
    /// opening and `]` closing.
    pub fn serialize(&self) -> String {
        self.root.serialized()
    }

    /// Canonical form: utterance tokens are kept only under leaf slots and
    /// sibling nodes are sorted by (label, serialized subtree). Idempotent.
    pub fn canonicalize(&self) -> ParseTree {
        ParseTree { root: self.root.canonicalize() }
    }

    /// Number of label nodes on the deepest root-to-leaf path; >= 1.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn is_flat(&self) -> bool {
        self.depth() <= 2
    }

    pub fn stats(&self) -> TreeStats {
        let depth = self.depth();
        TreeStats { depth, is_flat: depth <= 2 }
    }

    /// All labels in the tree, in serialization (pre-order) order.
    pub fn labels(&self) -> Vec<&Label> {
        fn walk<'a>(node: &'a TreeNode, out: &mut Vec<&'a Label>) {
            out.push(&node.label);
            for child in node.child_nodes() {
                walk(child, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// Tokens under leaf slots, in serialization order.
    pub fn leaf_slot_tokens(&self) -> Vec<&str> {
        fn walk<'a>(node: &'a TreeNode, out: &mut Vec<&'a str>) {
            if node.is_leaf_slot() {
                out.extend(node.child_tokens());
            } else {
                for child in node.child_nodes() {
                    walk(child, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// Rebuilds the tree with every utterance token rewritten by `f`.
    /// Used by corpus ingestion for lower-casing; labels are untouched.
    pub fn map_tokens(&self, f: impl Fn(&str) -> String) -> Result<ParseTree, TreeError> {
        fn walk(
            node: &TreeNode,
            f: &impl Fn(&str) -> String,
        ) -> Result<TreeNode, TreeError> {
            let children = node
                .children
                .iter()
                .map(|c| {
                    Ok(match c {
                        Child::Node(n) => Child::Node(walk(n, f)?),
                        Child::Token(t) => Child::Token(f(t)),
                    })
                })
                .collect::<Result<_, TreeError>>()?;
            Ok(TreeNode::new(node.label.clone(), children))
        }
        ParseTree::new(walk(&self.root, &f)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("unbalanced brackets: {0}")]
    UnbalancedBrackets(String),
    #[error("alternation violation: {0}")]
    AlternationViolation(String),
    #[error("empty input")]
    EmptyInput,
    #[error("token {0:?} outside any tree node")]
    TokenOutsideTree(String),
    #[error("invalid label {0:?}")]
    InvalidLabel(String),
    #[error("invalid utterance token {0:?}")]
    InvalidToken(String),
    #[error("empty corpus")]
    EmptyCorpus,
}

/// Parses the serialized format. Every `[IN:X`/`[SL:Y` opens a node and every
/// `]` closes the innermost open node; anything else is an utterance token
/// attached to the innermost open node.
pub fn parse_serialized(text: &str) -> Result<ParseTree, TreeError> {
    let mut stack: Vec<TreeNode> = Vec::new();
    let mut root: Option<TreeNode> = None;
    let mut seen_any = false;

    for sym in text.split_whitespace() {
        seen_any = true;
        if sym == "]" {
            let node = stack.pop().ok_or_else(|| {
                TreeError::UnbalancedBrackets("more ] than opens".into())
            })?;
            match stack.last_mut() {
                Some(parent) => parent.children.push(Child::Node(node)),
                None => root = Some(node),
            }
        } else if root.is_some() {
            // The root already closed; nothing may follow.
            return Err(TreeError::TokenOutsideTree(sym.to_string()));
        } else if let Some(label_text) = sym.strip_prefix('[') {
            let label = Label::from_text(label_text)?;
            match stack.last() {
                Some(parent) if parent.label.kind == label.kind => {
                    return Err(TreeError::AlternationViolation(format!(
                        "{} under {}",
                        label.text(),
                        parent.label.text()
                    )));
                }
                None if label.kind == LabelKind::Slot => {
                    return Err(TreeError::AlternationViolation(format!(
                        "root node {} must be an intent",
                        label.text()
                    )));
                }
                _ => {}
            }
            stack.push(TreeNode::new(label, Vec::new()));
        } else if sym.contains('[') || sym.contains(']') {
            return Err(TreeError::InvalidToken(sym.to_string()));
        } else {
            match stack.last_mut() {
                Some(parent) => parent.children.push(Child::Token(sym.to_string())),
                None => return Err(TreeError::TokenOutsideTree(sym.to_string())),
            }
        }
    }

    if !seen_any {
        return Err(TreeError::EmptyInput);
    }
    if !stack.is_empty() {
        return Err(TreeError::UnbalancedBrackets(format!(
            "{} unclosed node(s) at end of input",
            stack.len()
        )));
    }
    ParseTree::new(root.ok_or(TreeError::EmptyInput)?)
}

/// Aggregate flat percentage and mean depth over a non-empty list of trees.
pub fn tree_stats(trees: &[ParseTree]) -> Result<CorpusTreeStats, TreeError> {
    if trees.is_empty() {
        return Err(TreeError::EmptyCorpus);
    }
    let n = trees.len() as f64;
    let depths: Vec<usize> = trees.iter().map(ParseTree::depth).collect();
    let flat = depths.iter().filter(|&&d| d <= 2).count() as f64;
    let total: usize = depths.iter().sum();
    Ok(CorpusTreeStats {
        flat_fraction: flat / n,
        mean_depth: total as f64 / n,
    })
}
