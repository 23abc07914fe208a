//! Right-sided flags, their word encoding, and right-sided decompositions.
//!
//! A [`Flag`] on a right-sided host `T` is an increasing chain of open
//! subtrees ending at `T`, every stage but the last completely right-sided,
//! with two side conditions: stages grow strictly, and a leaf shared by two
//! consecutive stages must already be a host leaf (so every unfinished leaf
//! keeps growing). Flags encode as Lukasiewicz words over the tree alphabet
//! ([`encode_flag`] / [`decode_flag`]): the word length equals the host
//! degree and the codec is a bijection onto those words.
//!
//! A [`Decomposition`] covers the host with relatively open right-sided
//! pieces glued root-to-leaf, plus one singleton at every covered leaf that
//! is not the first leaf of its covering piece. Flags and decompositions of
//! a host correspond bijectively ([`flag_to_decomposition`] /
//! [`decomposition_to_flag`]): the first stage is the root piece and each
//! later stage adds the pieces rooted at the current unfinished leaves.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::luk::{LukError, TreeLetter, Word};
use crate::subtree::{enumerate_open_subtrees, SubtreeSelection};
use crate::tree::{PlanarTree, Position, TreeError};

/// Errors from flag and decomposition construction and codecs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlagError {
    /// Flags and decompositions only exist on right-sided hosts.
    #[error("host tree {host} is not right-sided")]
    HostNotRightSided { host: PlanarTree },
    /// The stages do not form a flag.
    #[error("invalid flag: {reason}")]
    InvalidFlag { reason: String },
    /// The pieces do not form a decomposition.
    #[error("invalid decomposition: {reason}")]
    InvalidDecomposition { reason: String },
    /// Containment precondition violated: the first selection is not a
    /// subset of the second.
    #[error("the selections are not nested")]
    NotNested,
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Word(#[from] LukError),
}

/// Renders a selection's vertex set as `{ρ, 1, 2.1}`.
fn vertex_set_string(s: &SubtreeSelection) -> String {
    let mut out = String::from("{");
    for (i, v) in s.vertices().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        if v.is_root() {
            out.push('ρ');
        } else {
            out.push_str(&v.to_string());
        }
    }
    out.push('}');
    out
}

fn position_strings(s: &SubtreeSelection) -> Vec<String> {
    s.vertices().iter().map(Position::to_string).collect()
}

/// True when every leaf of `s` that is also a leaf of `s2` is a leaf of the
/// common host. Precondition: same host and `vertices(s) ⊆ vertices(s2)`.
///
/// In a flag this is required of each consecutive stage pair; it forces
/// every non-host-leaf leaf of a stage to grow at the next stage.
pub fn is_strictly_contained(
    s: &SubtreeSelection,
    s2: &SubtreeSelection,
) -> Result<bool, FlagError> {
    if s.host() != s2.host() {
        return Err(FlagError::Tree(TreeError::HostMismatch));
    }
    if !s.vertices().is_subset(s2.vertices()) {
        return Err(FlagError::NotNested);
    }
    let host_leaves: BTreeSet<Position> = s.host().leaf_positions().into_iter().collect();
    let outer_leaves: BTreeSet<Position> = s2.leaves().into_iter().collect();
    Ok(s.leaves()
        .iter()
        .all(|leaf| !outer_leaves.contains(leaf) || host_leaves.contains(leaf)))
}

/// A right-sided open flag: stages `S_1 ⊊ … ⊊ S_r = host`.
#[derive(Clone, PartialEq, Eq)]
pub struct Flag {
    host: PlanarTree,
    stages: Vec<SubtreeSelection>,
}

impl Flag {
    /// Validates the stage chain: host right-sided; every stage a selection
    /// of this host; last stage full; all earlier stages completely
    /// right-sided; strict growth; consecutive stages strictly contained.
    pub fn new(host: PlanarTree, stages: Vec<SubtreeSelection>) -> Result<Self, FlagError> {
        if !host.is_right_sided() {
            return Err(FlagError::HostNotRightSided { host });
        }
        if stages.is_empty() {
            return Err(FlagError::InvalidFlag {
                reason: "a flag has at least one stage".to_string(),
            });
        }
        for s in &stages {
            if s.host() != &host {
                return Err(FlagError::Tree(TreeError::HostMismatch));
            }
        }
        let last = stages.last().unwrap();
        if last.len() != host.vertex_count() {
            return Err(FlagError::InvalidFlag {
                reason: "the last stage must be the full host".to_string(),
            });
        }
        for (i, s) in stages.iter().enumerate().take(stages.len() - 1) {
            if !s.is_completely_right_sided() {
                return Err(FlagError::InvalidFlag {
                    reason: format!(
                        "stage {} ({}) is not completely right-sided",
                        i + 1,
                        vertex_set_string(s)
                    ),
                });
            }
        }
        for (i, pair) in stages.windows(2).enumerate() {
            if !(pair[0].vertices().is_subset(pair[1].vertices())
                && pair[0].len() < pair[1].len())
            {
                return Err(FlagError::InvalidFlag {
                    reason: format!("stage {} does not grow strictly into stage {}", i + 1, i + 2),
                });
            }
            if !is_strictly_contained(&pair[0], &pair[1])? {
                return Err(FlagError::InvalidFlag {
                    reason: format!(
                        "a non-host leaf of stage {} is still a leaf of stage {}",
                        i + 1,
                        i + 2
                    ),
                });
            }
        }
        Ok(Flag { host, stages })
    }

    /// The unique flag on the one-vertex host: the single stage `{ρ}`.
    pub fn trivial() -> Flag {
        let x = PlanarTree::leaf();
        let full = SubtreeSelection::full(x.clone()).expect("x has a vertex");
        Flag {
            host: x,
            stages: vec![full],
        }
    }

    /// The one-stage flag `(T)` on a right-sided host.
    pub fn whole(host: PlanarTree) -> Result<Flag, FlagError> {
        if !host.is_right_sided() {
            return Err(FlagError::HostNotRightSided { host });
        }
        let full = SubtreeSelection::full(host.clone())?;
        Flag::new(host, vec![full])
    }

    pub fn host(&self) -> &PlanarTree {
        &self.host
    }

    pub fn stages(&self) -> &[SubtreeSelection] {
        &self.stages
    }

    /// Number of stages `r`.
    pub fn rank(&self) -> usize {
        self.stages.len()
    }

    /// Stage vertex sets as position strings (root = `""`), for JSON output.
    pub fn stage_position_strings(&self) -> Vec<Vec<String>> {
        self.stages.iter().map(position_strings).collect()
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.stages.iter().enumerate() {
            if i > 0 {
                f.write_str(" < ")?;
            }
            f.write_str(&vertex_set_string(s))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "flag on {}: {}", self.host, self)
    }
}

/// All flags on `t`, sorted by rank and then by stage vertex sets; the
/// one-stage flag `(T)` always comes first.
pub fn enumerate_flags(t: &PlanarTree) -> Result<Vec<Flag>, FlagError> {
    if !t.is_right_sided() {
        return Err(FlagError::HostNotRightSided { host: t.clone() });
    }
    let full = SubtreeSelection::full(t.clone())?;
    let crs: Vec<SubtreeSelection> = enumerate_open_subtrees(t)?
        .into_iter()
        .filter(|s| *s != full && s.is_completely_right_sided())
        .collect();

    fn extend(
        last: &SubtreeSelection,
        full: &SubtreeSelection,
        crs: &[SubtreeSelection],
        prefix: &mut Vec<SubtreeSelection>,
        chains: &mut Vec<Vec<SubtreeSelection>>,
    ) -> Result<(), FlagError> {
        if is_strictly_contained(last, full)? {
            let mut chain = prefix.clone();
            chain.push(full.clone());
            chains.push(chain);
        }
        for s in crs {
            if s.len() > last.len()
                && last.vertices().is_subset(s.vertices())
                && is_strictly_contained(last, s)?
            {
                prefix.push(s.clone());
                extend(s, full, crs, prefix, chains)?;
                prefix.pop();
            }
        }
        Ok(())
    }

    let mut chains: Vec<Vec<SubtreeSelection>> = vec![vec![full.clone()]];
    for s in &crs {
        let mut prefix = vec![s.clone()];
        extend(s, &full, &crs, &mut prefix, &mut chains)?;
    }
    chains.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            let ka: Vec<&BTreeSet<Position>> = a.iter().map(SubtreeSelection::vertices).collect();
            let kb: Vec<&BTreeSet<Position>> = b.iter().map(SubtreeSelection::vertices).collect();
            ka.cmp(&kb)
        })
    });
    chains
        .into_iter()
        .map(|stages| Flag::new(t.clone(), stages))
        .collect()
}

/// The flag restricted to the component at leaf `b` of its first stage:
/// stages from the second on, intersected with the closed subtree at `b`,
/// rebased to local coordinates, with consecutive duplicates collapsed.
fn restrict_flag(flag: &Flag, b: &Position) -> Result<Flag, FlagError> {
    let component = flag.host().closed_subtree_at(b)?;
    let mut local_stages: Vec<SubtreeSelection> = Vec::new();
    for stage in &flag.stages()[1..] {
        let local: BTreeSet<Position> = stage
            .vertices()
            .iter()
            .filter_map(|v| b.relativize(v))
            .collect();
        if local_stages
            .last()
            .map(|prev| prev.vertices() == &local)
            .unwrap_or(false)
        {
            continue;
        }
        local_stages.push(SubtreeSelection::new(component.clone(), local)?);
    }
    Flag::new(component, local_stages)
}

/// Encodes a flag as a word over the tree alphabet. The word's letters:
///
/// - one-stage flag on `T = x·T'` of degree `d`: the letter `T'` followed by
///   `d - 1` empty-tree letters (for the host `x` this is the single
///   empty-tree letter);
/// - more stages: the right factor of the first stage's shape, followed by
///   the encodings of the flag's restrictions to the components at the
///   first stage's non-first leaves, left to right.
///
/// The result is always a Lukasiewicz word whose length is the host degree.
pub fn encode_flag(flag: &Flag) -> Result<Word<TreeLetter>, FlagError> {
    if flag.rank() == 1 {
        let factor = flag.host().right_factor()?;
        let m = factor.degree();
        let mut letters = vec![TreeLetter(factor)];
        letters.extend(std::iter::repeat(TreeLetter(PlanarTree::Empty)).take(m));
        return Ok(Word::new(letters));
    }
    let s1 = &flag.stages()[0];
    let shape = s1.shape();
    let head = shape.right_factor().map_err(|_| FlagError::InvalidFlag {
        reason: format!("first-stage shape {shape} is not right-sided"),
    })?;
    let mut letters = vec![TreeLetter(head)];
    for b in s1.leaves().iter().skip(1) {
        let sub = restrict_flag(flag, b)?;
        letters.extend(encode_flag(&sub)?.letters().iter().cloned());
    }
    let word = Word::new(letters);
    debug_assert!(word.is_luk());
    debug_assert_eq!(word.len(), flag.host().degree());
    Ok(word)
}

/// Decodes a Lukasiewicz word over the tree alphabet back into a flag,
/// reconstructing the host. Inverse of [`encode_flag`].
///
/// The head letter `A` has one argument word per leaf of `A`; each argument
/// decodes to a component flag. The host is `x · A[leaves := component
/// hosts]`; the first stage is the new root, its first leaf, and the copy of
/// `A`; later stages merge the component stages in lockstep (a component
/// that finishes early stays full).
pub fn decode_flag(w: &Word<TreeLetter>) -> Result<Flag, FlagError> {
    let (head, parts) = w.head_decompose()?;
    let a = head.0;
    if a.is_empty() {
        return Ok(Flag::trivial());
    }
    let subs: Vec<Flag> = parts.iter().map(decode_flag).collect::<Result<_, _>>()?;
    let hosts: Vec<PlanarTree> = subs.iter().map(|f| f.host().clone()).collect();
    let tprime = a.replace_leaves(&hosts)?;
    let host = PlanarTree::leaf().product(&tprime);

    let full = SubtreeSelection::full(host.clone())?;
    if subs.iter().all(|f| f.host().is_leaf()) {
        return Flag::new(host, vec![full]);
    }

    let two = Position::root().child(2);
    let mut s1: BTreeSet<Position> = BTreeSet::new();
    s1.insert(Position::root());
    s1.insert(Position::root().child(1));
    for p in a.positions() {
        s1.insert(two.join(&p));
    }
    let attach: Vec<Position> = a.leaf_positions().iter().map(|p| two.join(p)).collect();

    let rank = 1 + subs.iter().map(Flag::rank).max().expect("degree >= 1");
    let mut stages = vec![SubtreeSelection::new(host.clone(), s1.iter().cloned())?];
    for j in 2..=rank {
        let mut set = s1.clone();
        for (i, sub) in subs.iter().enumerate() {
            let stage = &sub.stages()[sub.rank().min(j - 1) - 1];
            for v in stage.vertices() {
                set.insert(attach[i].join(v));
            }
        }
        stages.push(SubtreeSelection::new(host.clone(), set)?);
    }
    Flag::new(host, stages)
}

/// A right-sided decomposition: a set of pieces covering the host.
#[derive(Clone, PartialEq, Eq)]
pub struct Decomposition {
    host: PlanarTree,
    pieces: Vec<SubtreeSelection>,
}

/// Returns the first violated decomposition rule, or `None` when the pieces
/// form a decomposition. Hard errors only for mismatched hosts or a
/// non-right-sided host.
fn decomposition_violation(
    host: &PlanarTree,
    pieces: &[SubtreeSelection],
) -> Result<Option<String>, FlagError> {
    if !host.is_right_sided() {
        return Err(FlagError::HostNotRightSided { host: host.clone() });
    }
    for p in pieces {
        if p.host() != host {
            return Err(FlagError::Tree(TreeError::HostMismatch));
        }
    }
    if host.is_leaf() {
        // The one-vertex host decomposes exactly as the root singleton.
        let ok = pieces.len() == 1 && pieces[0].len() == 1;
        return Ok(if ok {
            None
        } else {
            Some("the one-vertex host decomposes as {{ρ}} only".to_string())
        });
    }

    let host_leaves: BTreeSet<Position> = host.leaf_positions().into_iter().collect();

    // (a) singleton or right-sided shape.
    for p in pieces {
        if p.len() > 1 && !p.shape().is_right_sided() {
            return Ok(Some(format!(
                "piece {} is neither a singleton nor right-sided",
                vertex_set_string(p)
            )));
        }
    }

    // (b) the pieces cover the host.
    let mut covered: BTreeSet<Position> = BTreeSet::new();
    for p in pieces {
        covered.extend(p.vertices().iter().cloned());
    }
    if covered.len() != host.vertex_count() {
        return Ok(Some("the pieces do not cover the host".to_string()));
    }

    // (c) distinct roots; one root piece; pairwise overlaps are a single
    // vertex that is the root of one piece and a leaf of the other.
    let mut roots: BTreeSet<Position> = BTreeSet::new();
    for p in pieces {
        if !roots.insert(p.root_pos().clone()) {
            return Ok(Some(format!(
                "two pieces share the root {}",
                vertex_set_string(p)
            )));
        }
    }
    if pieces.iter().filter(|p| p.root_pos().is_root()).count() != 1 {
        return Ok(Some("exactly one piece must be rooted at the host root".to_string()));
    }
    for (i, p) in pieces.iter().enumerate() {
        for q in &pieces[i + 1..] {
            let shared: Vec<&Position> = p.vertices().intersection(q.vertices()).collect();
            if shared.is_empty() {
                continue;
            }
            if shared.len() > 1 {
                return Ok(Some(format!(
                    "pieces {} and {} share more than one vertex",
                    vertex_set_string(p),
                    vertex_set_string(q)
                )));
            }
            let v = shared[0];
            let ok = (v == p.root_pos() && q.leaves().contains(v))
                || (v == q.root_pos() && p.leaves().contains(v));
            if !ok {
                return Ok(Some(format!(
                    "shared vertex {v} must be the root of one piece and a leaf of the other"
                )));
            }
        }
    }

    // (d) each non-singleton piece starts at a host leaf.
    for p in pieces {
        if p.len() > 1 && !host_leaves.contains(&p.first_leaf()) {
            return Ok(Some(format!(
                "the first leaf of piece {} is not a host leaf",
                vertex_set_string(p)
            )));
        }
    }

    // (e) unfinished leaves continue into other non-singleton pieces.
    let nonsingleton_roots: BTreeSet<Position> = pieces
        .iter()
        .filter(|p| p.len() > 1)
        .map(|p| p.root_pos().clone())
        .collect();
    for p in pieces {
        if p.len() == 1 {
            continue;
        }
        for leaf in p.leaves() {
            if !host_leaves.contains(&leaf) && !nonsingleton_roots.contains(&leaf) {
                return Ok(Some(format!(
                    "leaf {leaf} of piece {} roots no further piece",
                    vertex_set_string(p)
                )));
            }
        }
    }

    // (f) singletons exactly at covered host leaves other than the first
    // leaf of the covering piece.
    let singleton_roots: BTreeSet<Position> = pieces
        .iter()
        .filter(|p| p.len() == 1)
        .map(|p| p.root_pos().clone())
        .collect();
    for s in &singleton_roots {
        if !host_leaves.contains(s) {
            return Ok(Some(format!("singleton at {s} is not at a host leaf")));
        }
    }
    for leaf in &host_leaves {
        let covering: Vec<&SubtreeSelection> = pieces
            .iter()
            .filter(|p| p.len() > 1 && p.contains(leaf))
            .collect();
        if covering.len() != 1 {
            return Ok(Some(format!(
                "host leaf {leaf} must lie in exactly one non-singleton piece"
            )));
        }
        let expected = covering[0].first_leaf() != *leaf;
        if expected != singleton_roots.contains(leaf) {
            return Ok(Some(if expected {
                format!("host leaf {leaf} needs a singleton piece")
            } else {
                format!("host leaf {leaf} is a first leaf and takes no singleton")
            }));
        }
    }

    Ok(None)
}

/// True when the pieces satisfy all decomposition rules on this host.
pub fn is_decomposition(
    host: &PlanarTree,
    pieces: &[SubtreeSelection],
) -> Result<bool, FlagError> {
    Ok(decomposition_violation(host, pieces)?.is_none())
}

impl Decomposition {
    /// Validates the pieces; stores them sorted by root position.
    pub fn new(host: PlanarTree, pieces: Vec<SubtreeSelection>) -> Result<Self, FlagError> {
        if let Some(reason) = decomposition_violation(&host, &pieces)? {
            return Err(FlagError::InvalidDecomposition { reason });
        }
        let mut pieces = pieces;
        pieces.sort_by(|a, b| a.vertices().cmp(b.vertices()));
        Ok(Decomposition { host, pieces })
    }

    pub fn host(&self) -> &PlanarTree {
        &self.host
    }

    /// Pieces in planar order of their roots.
    pub fn pieces(&self) -> &[SubtreeSelection] {
        &self.pieces
    }

    /// Piece vertex sets as position strings (root = `""`), for JSON output.
    pub fn piece_position_strings(&self) -> Vec<Vec<String>> {
        self.pieces.iter().map(position_strings).collect()
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            f.write_str(&vertex_set_string(p))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "decomposition of {}: {}", self.host, self)
    }
}

/// Ways to cover the closed subtree at `at` with non-singleton pieces: a
/// piece rooted at `at` (relatively open, right-sided shape, first leaf a
/// host leaf) plus recursive covers at the piece's non-host-leaf leaves.
fn tile(
    host: &PlanarTree,
    at: &Position,
    host_leaves: &BTreeSet<Position>,
) -> Result<Vec<Vec<SubtreeSelection>>, FlagError> {
    let sub = host.closed_subtree_at(at)?;
    let mut out = Vec::new();
    for local in enumerate_open_subtrees(&sub)? {
        if local.len() == 1 || !local.shape().is_right_sided() {
            continue;
        }
        let piece = SubtreeSelection::new(
            host.clone(),
            local.vertices().iter().map(|v| at.join(v)),
        )?;
        if !host_leaves.contains(&piece.first_leaf()) {
            continue;
        }
        let active: Vec<Position> = piece
            .leaves()
            .into_iter()
            .filter(|l| !host_leaves.contains(l))
            .collect();
        let mut products: Vec<Vec<SubtreeSelection>> = vec![vec![piece]];
        for site in &active {
            let continuations = tile(host, site, host_leaves)?;
            if continuations.is_empty() {
                products.clear();
                break;
            }
            let mut next = Vec::with_capacity(products.len() * continuations.len());
            for base in &products {
                for cont in &continuations {
                    let mut combined = base.clone();
                    combined.extend(cont.iter().cloned());
                    next.push(combined);
                }
            }
            products = next;
        }
        out.extend(products);
    }
    Ok(out)
}

/// All decompositions of `t`, duplicate-free, sorted by their piece lists.
pub fn enumerate_decompositions(t: &PlanarTree) -> Result<Vec<Decomposition>, FlagError> {
    if !t.is_right_sided() {
        return Err(FlagError::HostNotRightSided { host: t.clone() });
    }
    if t.is_leaf() {
        let root = SubtreeSelection::singleton(t.clone(), Position::root())?;
        return Ok(vec![Decomposition::new(t.clone(), vec![root])?]);
    }
    let host_leaves: BTreeSet<Position> = t.leaf_positions().into_iter().collect();
    let mut out = Vec::new();
    for tiling in tile(t, &Position::root(), &host_leaves)? {
        let firsts: BTreeSet<Position> = tiling.iter().map(SubtreeSelection::first_leaf).collect();
        let mut pieces = tiling;
        for leaf in &host_leaves {
            if !firsts.contains(leaf) {
                pieces.push(SubtreeSelection::singleton(t.clone(), leaf.clone())?);
            }
        }
        out.push(Decomposition::new(t.clone(), pieces)?);
    }
    out.sort_by(|a, b| {
        let ka: Vec<&BTreeSet<Position>> = a.pieces.iter().map(SubtreeSelection::vertices).collect();
        let kb: Vec<&BTreeSet<Position>> = b.pieces.iter().map(SubtreeSelection::vertices).collect();
        ka.cmp(&kb)
    });
    Ok(out)
}

/// The decomposition matching a flag: the first stage, plus, for every
/// consecutive stage pair, the parts of the later stage hanging at the
/// earlier stage's non-host-leaf leaves, plus the mandated singletons.
pub fn flag_to_decomposition(flag: &Flag) -> Result<Decomposition, FlagError> {
    let host = flag.host().clone();
    if host.is_leaf() {
        let root = SubtreeSelection::singleton(host.clone(), Position::root())?;
        return Decomposition::new(host, vec![root]);
    }
    let host_leaves: BTreeSet<Position> = host.leaf_positions().into_iter().collect();
    let mut pieces = vec![flag.stages()[0].clone()];
    for pair in flag.stages().windows(2) {
        for b in pair[0].leaves() {
            if host_leaves.contains(&b) {
                continue;
            }
            let verts: Vec<Position> = pair[1]
                .vertices()
                .iter()
                .filter(|v| b.is_prefix_of(v))
                .cloned()
                .collect();
            pieces.push(SubtreeSelection::new(host.clone(), verts)?);
        }
    }
    let firsts: BTreeSet<Position> = pieces.iter().map(SubtreeSelection::first_leaf).collect();
    for leaf in &host_leaves {
        if !firsts.contains(leaf) {
            pieces.push(SubtreeSelection::singleton(host.clone(), leaf.clone())?);
        }
    }
    Decomposition::new(host, pieces)
}

/// The flag matching a decomposition: start from the root piece and extend
/// each stage by the pieces rooted at its non-host-leaf leaves until the
/// full host is reached. Inverse of [`flag_to_decomposition`].
pub fn decomposition_to_flag(d: &Decomposition) -> Result<Flag, FlagError> {
    let host = d.host().clone();
    if host.is_leaf() {
        return Ok(Flag::trivial());
    }
    let host_leaves: BTreeSet<Position> = host.leaf_positions().into_iter().collect();
    let by_root: BTreeMap<&Position, &SubtreeSelection> = d
        .pieces()
        .iter()
        .filter(|p| p.len() > 1)
        .map(|p| (p.root_pos(), p))
        .collect();
    let root_piece = by_root
        .get(&Position::root())
        .ok_or_else(|| FlagError::InvalidDecomposition {
            reason: "no non-singleton piece at the host root".to_string(),
        })?;
    let total = host.vertex_count();
    let mut current: BTreeSet<Position> = root_piece.vertices().clone();
    let mut stages = Vec::new();
    loop {
        let stage = SubtreeSelection::new(host.clone(), current.iter().cloned())?;
        let done = stage.len() == total;
        stages.push(stage);
        if done {
            break;
        }
        let mut grew = false;
        for b in stages.last().unwrap().leaves() {
            if host_leaves.contains(&b) {
                continue;
            }
            let piece = by_root.get(&b).ok_or_else(|| FlagError::InvalidDecomposition {
                reason: format!("no piece rooted at the unfinished leaf {b}"),
            })?;
            current.extend(piece.vertices().iter().cloned());
            grew = true;
        }
        if !grew {
            return Err(FlagError::InvalidDecomposition {
                reason: "the stages stop growing before reaching the full host".to_string(),
            });
        }
    }
    Flag::new(host, stages)
}
