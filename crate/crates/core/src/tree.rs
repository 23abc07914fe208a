//! Finite planar rooted trees.
//!
//! A [`PlanarTree`] is either the empty tree `1` or a root vertex carrying an
//! ordered list of subtrees. Vertices are addressed by [`Position`]s, paths
//! of 1-based child indices from the root. The *degree* of a tree is its
//! number of leaves, the *arity* of a vertex its number of children; the
//! empty tree has degree 0 and no vertices.
//!
//! Text form: `1` for the empty tree (top level only), `x` for a single
//! vertex, `(T1 ... Tm)` for a root with subtrees `T1..Tm`, `m >= 1`. So
//! `(x (x x))` is the 4-vertex tree whose root has a leaf first child and a
//! 2-leaf second child.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Default bound on the size parameter accepted by the exhaustive
/// enumerators. Catalan growth makes anything much larger than this
/// impractical to materialize.
pub const DEFAULT_ENUM_CAP: usize = 10;

/// Errors from tree construction, parsing, addressing and enumeration.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    /// Malformed text at a byte offset of the input literal.
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    /// `1` may only appear as the whole literal, never as a subtree.
    #[error("syntax error at byte {offset}: the empty tree `1` cannot be a subtree")]
    NestedEmpty { offset: usize },
    /// A vertex must have at least one child to be written `( ... )`.
    #[error("syntax error at byte {offset}: a parenthesized vertex needs at least one subtree")]
    EmptyParens { offset: usize },
    /// Grafting requires at least one subtree.
    #[error("grafting requires at least one subtree")]
    EmptyGraft,
    /// The empty tree cannot appear below a root.
    #[error("the empty tree cannot be grafted as a subtree")]
    EmptyChild,
    /// Position does not address a vertex of the tree.
    #[error("position {position} is not a vertex of the tree")]
    InvalidPosition { position: Position },
    /// Malformed position text.
    #[error("invalid position string {text:?}")]
    PositionSyntax { text: String },
    /// The operation needs a nonempty tree.
    #[error("the empty tree has no vertices")]
    EmptyTree,
    /// The tree is not right-sided, so it has no right factor.
    #[error("tree {tree} is not right-sided")]
    NotRightSided { tree: PlanarTree },
    /// Requested enumeration size exceeds the configured cap.
    #[error("size {requested} exceeds the enumeration cap {cap}")]
    EnumerationCap { requested: usize, cap: usize },
    /// A leaf-substitution was given the wrong number of replacement trees.
    #[error("expected {expected} replacement trees, got {got}")]
    LeafCountMismatch { expected: usize, got: usize },
    /// Vertex set does not form a valid subtree selection.
    #[error("invalid subtree selection: {reason}")]
    InvalidSelection { reason: String },
    /// Two selections that should share a host do not.
    #[error("selections have different host trees")]
    HostMismatch,
}

/// An isomorphism class of finite planar rooted trees.
///
/// Either the empty tree or a root with an ordered, nonempty-by-construction
/// list of subtrees. The `Node` children must themselves be `Node`s: the
/// empty tree never occurs below a root. Use [`PlanarTree::graft`] or the
/// parser to build values; both enforce the invariant.
///
/// The derived equality is structural. The ordering compares root arities
/// first and then children left to right, which coincides with lexicographic
/// order of the preorder arity sequences (the empty tree sorts first).
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum PlanarTree {
    /// The empty tree, written `1`. Unit for the grafting product.
    Empty,
    /// A root vertex with ordered subtrees; a leaf is `Node(vec![])`.
    Node(Vec<PlanarTree>),
}

use PlanarTree::{Empty, Node};

impl PlanarTree {
    /// The one-vertex tree `x`.
    pub fn leaf() -> Self {
        Node(Vec::new())
    }

    /// Grafts `subtrees` onto a fresh root. Fails on an empty list or on an
    /// empty-tree operand; `graft([t])` is allowed and yields an arity-1
    /// root, so the result is not reduced in that case.
    pub fn graft(subtrees: &[PlanarTree]) -> Result<Self, TreeError> {
        if subtrees.is_empty() {
            return Err(TreeError::EmptyGraft);
        }
        if subtrees.iter().any(|t| t.is_empty()) {
            return Err(TreeError::EmptyChild);
        }
        Ok(Node(subtrees.to_vec()))
    }

    /// Monoid product with the empty tree as unit: `1 * t = t * 1 = t`, and
    /// for nonempty operands the binary graft `(s t)`.
    pub fn product(&self, other: &PlanarTree) -> PlanarTree {
        match (self, other) {
            (Empty, _) => other.clone(),
            (_, Empty) => self.clone(),
            _ => Node(vec![self.clone(), other.clone()]),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Empty)
    }

    /// True for the one-vertex tree only (the empty tree is not a leaf).
    pub fn is_leaf(&self) -> bool {
        matches!(self, Node(cs) if cs.is_empty())
    }

    /// Ordered subtrees of the root; empty slice for `1` and `x`.
    pub fn children(&self) -> &[PlanarTree] {
        match self {
            Empty => &[],
            Node(cs) => cs,
        }
    }

    /// Number of children of the root; 0 for the empty tree.
    pub fn root_arity(&self) -> usize {
        self.children().len()
    }

    /// Number of leaves. The empty tree has degree 0, `x` has degree 1.
    pub fn degree(&self) -> usize {
        match self {
            Empty => 0,
            Node(cs) if cs.is_empty() => 1,
            Node(cs) => cs.iter().map(PlanarTree::degree).sum(),
        }
    }

    /// Total number of vertices; 0 for the empty tree.
    pub fn vertex_count(&self) -> usize {
        match self {
            Empty => 0,
            Node(cs) => 1 + cs.iter().map(PlanarTree::vertex_count).sum::<usize>(),
        }
    }

    /// A tree is reduced when no vertex has exactly one child. The empty
    /// tree and `x` are reduced.
    pub fn is_reduced(&self) -> bool {
        match self {
            Empty => true,
            Node(cs) => cs.len() != 1 && cs.iter().all(PlanarTree::is_reduced),
        }
    }

    /// Preorder sequence of vertex arities; empty for the empty tree.
    /// Complete arity sequences are prefix-free, so this determines the tree.
    pub fn arity_sequence(&self) -> Vec<usize> {
        fn walk(t: &PlanarTree, out: &mut Vec<usize>) {
            if let Node(cs) = t {
                out.push(cs.len());
                for c in cs {
                    walk(c, out);
                }
            }
        }
        let mut out = Vec::with_capacity(self.vertex_count());
        walk(self, &mut out);
        out
    }

    /// All vertex positions in planar (preorder) order; empty for `1`.
    pub fn positions(&self) -> Vec<Position> {
        fn walk(t: &PlanarTree, here: &mut Vec<usize>, out: &mut Vec<Position>) {
            out.push(Position(here.clone()));
            for (i, c) in t.children().iter().enumerate() {
                here.push(i + 1);
                walk(c, here, out);
                here.pop();
            }
        }
        let mut out = Vec::with_capacity(self.vertex_count());
        if let Node(_) = self {
            walk(self, &mut Vec::new(), &mut out);
        }
        out
    }

    /// Leaf positions in planar order; empty for the empty tree.
    pub fn leaf_positions(&self) -> Vec<Position> {
        fn walk(t: &PlanarTree, here: &mut Vec<usize>, out: &mut Vec<Position>) {
            let cs = t.children();
            if cs.is_empty() {
                out.push(Position(here.clone()));
            }
            for (i, c) in cs.iter().enumerate() {
                here.push(i + 1);
                walk(c, here, out);
                here.pop();
            }
        }
        let mut out = Vec::with_capacity(self.degree());
        if let Node(_) = self {
            walk(self, &mut Vec::new(), &mut out);
        }
        out
    }

    /// Position of the planar-first leaf. Fails on the empty tree.
    pub fn first_leaf(&self) -> Result<Position, TreeError> {
        let mut path = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Empty => return Err(TreeError::EmptyTree),
                Node(cs) if cs.is_empty() => return Ok(Position(path)),
                Node(cs) => {
                    path.push(1);
                    cur = &cs[0];
                }
            }
        }
    }

    /// Borrow of the vertex's subtree at `position`.
    pub fn subtree_at(&self, position: &Position) -> Result<&PlanarTree, TreeError> {
        let mut cur = self;
        for &i in &position.0 {
            let cs = cur.children();
            if i == 0 || i > cs.len() {
                return Err(TreeError::InvalidPosition {
                    position: position.clone(),
                });
            }
            cur = &cs[i - 1];
        }
        if cur.is_empty() {
            // Only reachable when self is the empty tree and position is the
            // root path; the empty tree has no vertices at all.
            return Err(TreeError::InvalidPosition {
                position: position.clone(),
            });
        }
        Ok(cur)
    }

    /// The closed subtree rooted at `position`: that vertex and everything
    /// below it, as an owned tree.
    pub fn closed_subtree_at(&self, position: &Position) -> Result<PlanarTree, TreeError> {
        self.subtree_at(position).cloned()
    }

    /// Arity of the vertex at `position`.
    pub fn arity_at(&self, position: &Position) -> Result<usize, TreeError> {
        Ok(self.subtree_at(position)?.root_arity())
    }

    /// A tree is right-sided when it is `x`, or its root has arity 2 with a
    /// leaf first subtree and arbitrary second subtree. Equivalently, it is
    /// `x * t'` for a unique tree `t'` (empty exactly when the tree is `x`).
    pub fn is_right_sided(&self) -> bool {
        match self {
            Node(cs) if cs.is_empty() => true,
            Node(cs) => cs.len() == 2 && cs[0].is_leaf(),
            Empty => false,
        }
    }

    /// The unique `t'` with `self = x * t'` for a right-sided tree: the
    /// empty tree for `x`, otherwise the second subtree of the root.
    pub fn right_factor(&self) -> Result<PlanarTree, TreeError> {
        match self {
            Node(cs) if cs.is_empty() => Ok(Empty),
            Node(cs) if cs.len() == 2 && cs[0].is_leaf() => Ok(cs[1].clone()),
            _ => Err(TreeError::NotRightSided { tree: self.clone() }),
        }
    }

    /// Replaces the leaves of `self`, in planar order, by the given nonempty
    /// trees. A replacement equal to `x` keeps that leaf a leaf. The number
    /// of replacements must equal the degree; the empty tree (degree 0) only
    /// accepts an empty list and is returned unchanged.
    pub fn replace_leaves(&self, replacements: &[PlanarTree]) -> Result<PlanarTree, TreeError> {
        if replacements.iter().any(PlanarTree::is_empty) {
            return Err(TreeError::EmptyChild);
        }
        let expected = self.degree();
        if replacements.len() != expected {
            return Err(TreeError::LeafCountMismatch {
                expected,
                got: replacements.len(),
            });
        }
        fn walk(t: &PlanarTree, replacements: &[PlanarTree], next: &mut usize) -> PlanarTree {
            match t {
                Empty => Empty,
                Node(cs) if cs.is_empty() => {
                    let r = replacements[*next].clone();
                    *next += 1;
                    r
                }
                Node(cs) => Node(cs.iter().map(|c| walk(c, replacements, next)).collect()),
            }
        }
        let mut next = 0;
        Ok(walk(self, replacements, &mut next))
    }

    /// Text form, the same as `Display`.
    pub fn to_literal(&self) -> String {
        self.to_string()
    }

    /// Space-separated preorder arity sequence, e.g. `"2 0 2 0 0"`.
    /// The empty tree renders as the empty string.
    pub fn to_arity_word(&self) -> String {
        let seq = self.arity_sequence();
        let mut out = String::new();
        for (i, a) in seq.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&a.to_string());
        }
        out
    }

    /// Graphviz digraph with vertices named by position and edges labeled by
    /// child index, so planar order survives the export.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  node [shape=point];\n");
        for p in self.positions() {
            out.push_str(&format!("  \"{}\";\n", p.dot_name()));
        }
        for p in self.positions() {
            for i in 1..=self.arity_at(&p).expect("position came from the tree") {
                let c = p.child(i);
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [order={}];\n",
                    p.dot_name(),
                    c.dot_name(),
                    i
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Empty => f.write_str("1"),
            Node(cs) if cs.is_empty() => f.write_str("x"),
            Node(cs) => {
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ord for PlanarTree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Empty, Empty) => Ordering::Equal,
            (Empty, _) => Ordering::Less,
            (_, Empty) => Ordering::Greater,
            (Node(a), Node(b)) => a
                .len()
                .cmp(&b.len())
                .then_with(|| a.iter().cmp(b.iter())),
        }
    }
}

impl PartialOrd for PlanarTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for PlanarTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tree(s)
    }
}

/// A vertex address: the path of 1-based child indices from the root. The
/// root is the empty path and prints as the empty string; `2.1` is the first
/// child of the root's second child. Ordering is lexicographic on the index
/// path, which matches planar preorder among positions of one tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn from_indices(indices: Vec<usize>) -> Result<Self, TreeError> {
        if indices.contains(&0) {
            return Err(TreeError::PositionSyntax {
                text: format!("{indices:?}"),
            });
        }
        Ok(Position(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Address of the `i`-th child (1-based) of this vertex.
    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn parent(&self) -> Option<Position> {
        if self.0.is_empty() {
            None
        } else {
            Some(Position(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// True when `self` lies on the path from the root to `other`,
    /// inclusive.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Concatenation: `other` read relative to `self`.
    pub fn join(&self, other: &Position) -> Position {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Position(v)
    }

    /// Inverse of `join`: strips `self` from the front of `other`.
    pub fn relativize(&self, other: &Position) -> Option<Position> {
        if self.is_prefix_of(other) {
            Some(Position(other.0[self.0.len()..].to_vec()))
        } else {
            None
        }
    }

    fn dot_name(&self) -> String {
        if self.0.is_empty() {
            "r".to_string()
        } else {
            format!("r.{self}")
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ix) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{ix}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{self}>")
    }
}

impl FromStr for Position {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Ok(Position::root());
        }
        let mut indices = Vec::new();
        for part in s.split('.') {
            let ix: usize = part.parse().map_err(|_| TreeError::PositionSyntax {
                text: s.to_string(),
            })?;
            if ix == 0 {
                return Err(TreeError::PositionSyntax {
                    text: s.to_string(),
                });
            }
            indices.push(ix);
        }
        Ok(Position(indices))
    }
}

/// Parses the text form described in the module docs. `1` is accepted only
/// as the entire (whitespace-trimmed) input. Subtrees inside parentheses
/// must be separated by whitespace. Errors carry the byte offset of the
/// offending input.
pub fn parse_tree(input: &str) -> Result<PlanarTree, TreeError> {
    let bytes = input.as_bytes();
    let mut pos = 0usize;
    skip_ws(bytes, &mut pos);
    if pos < bytes.len() && bytes[pos] == b'1' {
        pos += 1;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(TreeError::Syntax {
                offset: pos,
                message: "unexpected input after the empty tree".to_string(),
            });
        }
        return Ok(Empty);
    }
    let tree = parse_nonempty(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(TreeError::Syntax {
            offset: pos,
            message: "unexpected input after the tree".to_string(),
        });
    }
    Ok(tree)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) -> bool {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    *pos > start
}

fn parse_nonempty(bytes: &[u8], pos: &mut usize) -> Result<PlanarTree, TreeError> {
    match bytes.get(*pos) {
        Some(b'x') => {
            *pos += 1;
            Ok(PlanarTree::leaf())
        }
        Some(b'(') => {
            let open_at = *pos;
            *pos += 1;
            let mut children = Vec::new();
            loop {
                let had_ws = skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    Some(b')') => {
                        *pos += 1;
                        if children.is_empty() {
                            return Err(TreeError::EmptyParens { offset: open_at });
                        }
                        return Ok(Node(children));
                    }
                    Some(_) if !children.is_empty() && !had_ws => {
                        return Err(TreeError::Syntax {
                            offset: *pos,
                            message: "expected whitespace between subtrees or `)`".to_string(),
                        });
                    }
                    Some(_) => children.push(parse_nonempty(bytes, pos)?),
                    None => {
                        return Err(TreeError::Syntax {
                            offset: bytes.len(),
                            message: "unclosed `(`".to_string(),
                        });
                    }
                }
            }
        }
        Some(b'1') => Err(TreeError::NestedEmpty { offset: *pos }),
        Some(c) => Err(TreeError::Syntax {
            offset: *pos,
            message: format!("unexpected character {:?}", *c as char),
        }),
        None => Err(TreeError::Syntax {
            offset: bytes.len(),
            message: "unexpected end of input".to_string(),
        }),
    }
}

/// Output formats for [`render_tree`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TreeFormat {
    /// Parenthesized text form, re-parseable by [`parse_tree`].
    Literal,
    /// Space-separated preorder arity sequence.
    ArityWord,
    /// Graphviz digraph with `order` edge attributes.
    Dot,
}

pub fn render_tree(t: &PlanarTree, format: TreeFormat) -> String {
    match format {
        TreeFormat::Literal => t.to_literal(),
        TreeFormat::ArityWord => t.to_arity_word(),
        TreeFormat::Dot => t.to_dot(),
    }
}

fn check_cap(requested: usize, cap: usize) -> Result<(), TreeError> {
    if requested > cap {
        Err(TreeError::EnumerationCap { requested, cap })
    } else {
        Ok(())
    }
}

/// All planar rooted trees with exactly `n` vertices, sorted. Uses the
/// default cap; see [`enumerate_pt_with_cap`].
pub fn enumerate_pt(n: usize) -> Result<Vec<PlanarTree>, TreeError> {
    enumerate_pt_with_cap(n, DEFAULT_ENUM_CAP)
}

/// All planar rooted trees with exactly `n` vertices, sorted. There are
/// `Catalan(n - 1)` of them; `n = 0` yields an empty list.
pub fn enumerate_pt_with_cap(n: usize, cap: usize) -> Result<Vec<PlanarTree>, TreeError> {
    check_cap(n, cap)?;
    // forests[k] = ordered forests (child lists) with k vertices in total.
    let mut forests: Vec<Vec<Vec<PlanarTree>>> = vec![vec![Vec::new()]];
    let mut trees: Vec<Vec<PlanarTree>> = vec![Vec::new()];
    for k in 1..=n.max(1) {
        let layer: Vec<PlanarTree> = forests[k - 1].iter().map(|f| Node(f.clone())).collect();
        trees.push(layer);
        if k == n.max(1) {
            break;
        }
        let mut fs = Vec::new();
        for first_size in 1..=k {
            for first in &trees[first_size] {
                for rest in &forests[k - first_size] {
                    let mut f = Vec::with_capacity(1 + rest.len());
                    f.push(first.clone());
                    f.extend(rest.iter().cloned());
                    fs.push(f);
                }
            }
        }
        forests.push(fs);
    }
    let mut out = if n == 0 { Vec::new() } else { trees.swap_remove(n) };
    out.sort();
    Ok(out)
}

/// All reduced planar rooted trees with exactly `d` leaves, sorted. Uses the
/// default cap; see [`enumerate_prt_with_cap`].
pub fn enumerate_prt(d: usize) -> Result<Vec<PlanarTree>, TreeError> {
    enumerate_prt_with_cap(d, DEFAULT_ENUM_CAP)
}

/// All reduced planar rooted trees with exactly `d` leaves, sorted. These
/// are counted by the little Schroeder numbers 1, 1, 3, 11, 45, 197, ... and
/// `d = 0` yields an empty list.
pub fn enumerate_prt_with_cap(d: usize, cap: usize) -> Result<Vec<PlanarTree>, TreeError> {
    check_cap(d, cap)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut trees: Vec<Vec<PlanarTree>> = vec![Vec::new(), vec![PlanarTree::leaf()]];
    for k in 2..=d {
        // Ordered child lists of length >= 2, reduced parts, k leaves total.
        fn lists(k: usize, min_len: usize, trees: &[Vec<PlanarTree>]) -> Vec<Vec<PlanarTree>> {
            let mut out = Vec::new();
            if k == 0 {
                if min_len == 0 {
                    out.push(Vec::new());
                }
                return out;
            }
            for first_leaves in 1..=k {
                if k - first_leaves == 0 && min_len > 1 {
                    continue;
                }
                for first in &trees[first_leaves] {
                    for rest in lists(k - first_leaves, min_len.saturating_sub(1), trees) {
                        let mut l = Vec::with_capacity(1 + rest.len());
                        l.push(first.clone());
                        l.extend(rest);
                        out.push(l);
                    }
                }
            }
            out
        }
        let layer: Vec<PlanarTree> = lists(k, 2, &trees).into_iter().map(Node).collect();
        trees.push(layer);
    }
    let mut out = trees.swap_remove(d);
    out.sort();
    Ok(out)
}

/// All right-sided trees with exactly `d` leaves whose right factor is
/// reduced, sorted. Uses the default cap.
pub fn enumerate_right_sided(d: usize) -> Result<Vec<PlanarTree>, TreeError> {
    enumerate_right_sided_with_cap(d, DEFAULT_ENUM_CAP)
}

/// All right-sided trees `x * t'` with `d` leaves and reduced `t'`, sorted.
/// For `d = 1` this is just `x`; for `d >= 2` there is one tree per reduced
/// `t'` with `d - 1` leaves.
pub fn enumerate_right_sided_with_cap(d: usize, cap: usize) -> Result<Vec<PlanarTree>, TreeError> {
    check_cap(d, cap)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    if d == 1 {
        return Ok(vec![PlanarTree::leaf()]);
    }
    let x = PlanarTree::leaf();
    let mut out: Vec<PlanarTree> = enumerate_prt_with_cap(d - 1, cap)?
        .iter()
        .map(|t| x.product(t))
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> PlanarTree {
        parse_tree(s).unwrap()
    }

    fn p(s: &str) -> Position {
        s.parse().unwrap()
    }

    #[test]
    fn parses_basic_literals() {
        assert_eq!(t("1"), Empty);
        assert_eq!(t("x"), PlanarTree::leaf());
        assert_eq!(t("(x x)"), Node(vec![PlanarTree::leaf(), PlanarTree::leaf()]));
        assert_eq!(
            t("(x (x x) x)").arity_sequence(),
            vec![3, 0, 2, 0, 0, 0]
        );
        assert_eq!(t("  ( x   ( x x ) )  "), t("(x (x x))"));
        assert_eq!(t("((x))").arity_sequence(), vec![1, 1, 0]);
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(matches!(
            parse_tree("(x 1)"),
            Err(TreeError::NestedEmpty { offset: 3 })
        ));
        assert!(matches!(
            parse_tree("()"),
            Err(TreeError::EmptyParens { offset: 0 })
        ));
        assert!(matches!(
            parse_tree("(x"),
            Err(TreeError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse_tree("(x x) x"),
            Err(TreeError::Syntax { offset: 6, .. })
        ));
        assert!(matches!(
            parse_tree("(x(x x))"),
            Err(TreeError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse_tree("y"),
            Err(TreeError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse_tree(""),
            Err(TreeError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse_tree("1 x"),
            Err(TreeError::Syntax { .. })
        ));
    }

    #[test]
    fn renders_all_formats() {
        let tree = t("(x (x x))");
        assert_eq!(render_tree(&tree, TreeFormat::Literal), "(x (x x))");
        assert_eq!(render_tree(&tree, TreeFormat::ArityWord), "2 0 2 0 0");
        let dot = render_tree(&tree, TreeFormat::Dot);
        assert!(dot.contains("\"r\" -> \"r.1\" [order=1];"));
        assert!(dot.contains("\"r.2\" -> \"r.2.2\" [order=2];"));
        assert_eq!(render_tree(&Empty, TreeFormat::Literal), "1");
        assert_eq!(render_tree(&Empty, TreeFormat::ArityWord), "");
    }

    #[test]
    fn display_round_trips_enumerated_trees() {
        for n in 0..=6 {
            for tree in enumerate_pt(n).unwrap() {
                assert_eq!(parse_tree(&tree.to_string()).unwrap(), tree);
            }
        }
    }

    #[test]
    fn graft_checks_operands() {
        let x = PlanarTree::leaf();
        assert_eq!(PlanarTree::graft(&[x.clone(), x.clone()]).unwrap(), t("(x x)"));
        assert_eq!(PlanarTree::graft(&[x.clone()]).unwrap(), t("(x)"));
        assert!(!PlanarTree::graft(&[x.clone()]).unwrap().is_reduced());
        assert_eq!(PlanarTree::graft(&[]), Err(TreeError::EmptyGraft));
        assert_eq!(
            PlanarTree::graft(&[x.clone(), Empty]),
            Err(TreeError::EmptyChild)
        );
    }

    #[test]
    fn product_has_empty_unit() {
        let a = t("(x x)");
        assert_eq!(Empty.product(&a), a);
        assert_eq!(a.product(&Empty), a);
        assert_eq!(a.product(&t("x")), t("((x x) x)"));
        assert_eq!(t("x").product(&a), t("(x (x x))"));
    }

    #[test]
    fn degree_and_vertex_bookkeeping() {
        assert_eq!(Empty.degree(), 0);
        assert_eq!(Empty.vertex_count(), 0);
        assert_eq!(t("x").degree(), 1);
        assert_eq!(t("(x (x x) x)").degree(), 4);
        assert_eq!(t("(x (x x) x)").vertex_count(), 6);
        assert_eq!(t("((x))").degree(), 1);
        assert_eq!(t("((x))").vertex_count(), 3);
    }

    #[test]
    fn degree_adds_under_graft() {
        for a in enumerate_pt(4).unwrap() {
            for b in enumerate_pt(3).unwrap() {
                let g = PlanarTree::graft(&[a.clone(), b.clone()]).unwrap();
                assert_eq!(g.degree(), a.degree() + b.degree());
                assert_eq!(g.vertex_count(), 1 + a.vertex_count() + b.vertex_count());
            }
        }
    }

    #[test]
    fn reduced_recognition() {
        assert!(Empty.is_reduced());
        assert!(t("x").is_reduced());
        assert!(t("(x x x)").is_reduced());
        assert!(!t("((x))").is_reduced());
        assert!(!t("(x (x) x)").is_reduced());
    }

    #[test]
    fn positions_and_subtrees() {
        let tree = t("(x (x x))");
        let ps = tree.positions();
        assert_eq!(
            ps,
            vec![p(""), p("1"), p("2"), p("2.1"), p("2.2")]
        );
        assert_eq!(tree.leaf_positions(), vec![p("1"), p("2.1"), p("2.2")]);
        assert_eq!(tree.first_leaf().unwrap(), p("1"));
        assert_eq!(tree.closed_subtree_at(&p("2")).unwrap(), t("(x x)"));
        assert_eq!(tree.closed_subtree_at(&p("")).unwrap(), tree);
        assert_eq!(tree.arity_at(&p("2")).unwrap(), 2);
        assert_eq!(
            tree.closed_subtree_at(&p("3")),
            Err(TreeError::InvalidPosition { position: p("3") })
        );
        assert_eq!(
            tree.closed_subtree_at(&p("2.1.1")),
            Err(TreeError::InvalidPosition { position: p("2.1.1") })
        );
        assert_eq!(Empty.first_leaf(), Err(TreeError::EmptyTree));
        assert!(Empty.positions().is_empty());
    }

    #[test]
    fn position_text_round_trip() {
        assert_eq!(p("").indices(), &[] as &[usize]);
        assert_eq!(p("2.1").indices(), &[2, 1]);
        assert_eq!(p("2.1").to_string(), "2.1");
        assert_eq!(Position::root().to_string(), "");
        assert!("0".parse::<Position>().is_err());
        assert!("2.".parse::<Position>().is_err());
        assert!("a".parse::<Position>().is_err());
        assert_eq!(p("2").child(1), p("2.1"));
        assert_eq!(p("2.1").parent(), Some(p("2")));
        assert_eq!(p("").parent(), None);
        assert!(p("2").is_prefix_of(&p("2.1")));
        assert!(!p("2").is_prefix_of(&p("1")));
        assert!(p("").is_prefix_of(&p("2.1")));
        assert_eq!(p("2").join(&p("1.3")), p("2.1.3"));
        assert_eq!(p("2").relativize(&p("2.1.3")), Some(p("1.3")));
        assert_eq!(p("2").relativize(&p("1")), None);
    }

    #[test]
    fn position_order_is_preorder() {
        let tree = t("(x (x x) x)");
        let ps = tree.positions();
        let mut sorted = ps.clone();
        sorted.sort();
        assert_eq!(ps, sorted);
    }

    #[test]
    fn right_sided_recognition_and_factor() {
        assert!(t("x").is_right_sided());
        assert!(t("(x x)").is_right_sided());
        assert!(t("(x (x x))").is_right_sided());
        assert!(!t("((x x) x)").is_right_sided());
        assert!(!t("(x x x)").is_right_sided());
        assert!(!Empty.is_right_sided());
        assert_eq!(t("x").right_factor().unwrap(), Empty);
        assert_eq!(t("(x (x x))").right_factor().unwrap(), t("(x x)"));
        assert_eq!(
            t("(x x x)").right_factor(),
            Err(TreeError::NotRightSided { tree: t("(x x x)") })
        );
    }

    #[test]
    fn right_sided_iff_x_product() {
        // t is right-sided iff t = x * t' for some t' (empty or nonempty).
        for n in 1..=6 {
            for tree in enumerate_pt(n).unwrap() {
                let factored = tree.right_factor();
                assert_eq!(tree.is_right_sided(), factored.is_ok());
                if let Ok(tp) = factored {
                    assert_eq!(PlanarTree::leaf().product(&tp), tree);
                }
            }
        }
    }

    #[test]
    fn replace_leaves_grafts_in_planar_order() {
        let host = t("(x x)");
        assert_eq!(
            host.replace_leaves(&[t("(x x)"), t("x")]).unwrap(),
            t("((x x) x)")
        );
        assert_eq!(
            host.replace_leaves(&[t("x"), t("x")]).unwrap(),
            host
        );
        assert_eq!(
            host.replace_leaves(&[t("x")]),
            Err(TreeError::LeafCountMismatch { expected: 2, got: 1 })
        );
        assert_eq!(
            host.replace_leaves(&[t("x"), Empty]),
            Err(TreeError::EmptyChild)
        );
        assert_eq!(Empty.replace_leaves(&[]).unwrap(), Empty);
    }

    #[test]
    fn tree_order_matches_arity_sequence_order() {
        let mut all = Vec::new();
        for n in 1..=6 {
            all.extend(enumerate_pt(n).unwrap());
        }
        for a in &all {
            for b in &all {
                assert_eq!(
                    a.cmp(b),
                    a.arity_sequence().cmp(&b.arity_sequence()),
                    "order mismatch for {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn enumerate_pt_counts_are_catalan() {
        let catalan = [1usize, 1, 2, 5, 14, 42, 132, 429];
        for n in 1..=8 {
            let trees = enumerate_pt(n).unwrap();
            assert_eq!(trees.len(), catalan[n - 1], "n = {n}");
            for tree in &trees {
                assert_eq!(tree.vertex_count(), n);
            }
            let mut sorted = trees.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted, trees);
        }
        assert!(enumerate_pt(0).unwrap().is_empty());
    }

    #[test]
    fn enumerate_prt_counts_match_independent_recurrence() {
        // Counts by leaves satisfy (n + 1) s_{n+1} = 3 (2n - 1) s_n - (n - 2) s_{n-1}
        // with s_1 = s_2 = 1; this oracle is independent of the enumerator.
        let mut s = vec![0i64, 1, 1];
        for n in 2..=9usize {
            let next = (3 * (2 * n as i64 - 1) * s[n] - (n as i64 - 2) * s[n - 1]) / (n as i64 + 1);
            s.push(next);
        }
        assert_eq!(&s[1..=6], &[1, 1, 3, 11, 45, 197]);
        for d in 1..=7 {
            let trees = enumerate_prt(d).unwrap();
            assert_eq!(trees.len() as i64, s[d], "d = {d}");
            for tree in &trees {
                assert!(tree.is_reduced());
                assert_eq!(tree.degree(), d);
            }
        }
        assert!(enumerate_prt(0).unwrap().is_empty());
    }

    #[test]
    fn enumerate_prt_agrees_with_filtered_pt() {
        // Second oracle: filter the full Catalan enumeration by leaf count
        // and reducedness. A reduced tree with d leaves has at most 2d - 1
        // vertices.
        for d in 1..=5 {
            let mut filtered = Vec::new();
            for n in 1..=(2 * d - 1) {
                for tree in enumerate_pt(n).unwrap() {
                    if tree.is_reduced() && tree.degree() == d {
                        filtered.push(tree);
                    }
                }
            }
            filtered.sort();
            assert_eq!(enumerate_prt(d).unwrap(), filtered);
        }
    }

    #[test]
    fn enumerate_right_sided_matches_reduced_factor_filter() {
        for d in 1..=6 {
            let trees = enumerate_right_sided(d).unwrap();
            let expected = if d == 1 {
                1
            } else {
                enumerate_prt(d - 1).unwrap().len()
            };
            assert_eq!(trees.len(), expected, "d = {d}");
            for tree in &trees {
                assert!(tree.is_right_sided());
                assert_eq!(tree.degree(), d);
                assert!(tree.right_factor().unwrap().is_reduced());
            }
        }
        assert_eq!(enumerate_right_sided(1).unwrap(), vec![t("x")]);
        assert_eq!(enumerate_right_sided(2).unwrap(), vec![t("(x x)")]);
        assert_eq!(
            enumerate_right_sided(3).unwrap(),
            vec![t("(x (x x))")]
        );
    }

    #[test]
    fn enumeration_respects_cap() {
        assert_eq!(
            enumerate_pt(11),
            Err(TreeError::EnumerationCap { requested: 11, cap: 10 })
        );
        assert_eq!(
            enumerate_prt_with_cap(5, 4),
            Err(TreeError::EnumerationCap { requested: 5, cap: 4 })
        );
        assert!(enumerate_pt_with_cap(11, 11).is_ok());
    }

    #[test]
    fn enumerations_are_sorted_and_first_elements_match() {
        // Smallest tree at each size in the arity-sequence order.
        assert_eq!(enumerate_pt(4).unwrap()[0], t("(((x)))"));
        let deg4 = enumerate_right_sided(4).unwrap();
        assert_eq!(
            deg4,
            vec![t("(x (x (x x)))"), t("(x ((x x) x))"), t("(x (x x x))")]
        );
    }
}
