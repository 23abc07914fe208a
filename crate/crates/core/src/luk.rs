//! Generalized Lukasiewicz words over a graded alphabet.
//!
//! A [`Letter`] carries a degree in `N`; its *weight* is `degree - 1`. The
//! weight of a word is the sum over its letters. A nonempty word `w` is a
//! *Lukasiewicz word* when its weight is `-1` and every proper prefix has
//! weight `>= 0`; equivalently it is the preorder letter sequence of a tree
//! whose vertices branch according to the letter degrees.
//!
//! The set of all such words over an alphabet is a prefix code, and every
//! word of weight `-r` whose proper prefixes stay above `-r` factors
//! uniquely into `r` Lukasiewicz words. Both facts are constructive here:
//! [`Word::factor`] cuts at the running minima of the weight.
//!
//! Two alphabets matter in this crate: [`NatLetter`] (degree `n` for the
//! symbol `n`) underlies the preorder-arity codec for planar trees
//! ([`encode_pt`], [`decode_pt`]); [`TreeLetter`] (a tree graded by its leaf
//! count) underlies the flag codec in [`crate::flags`].

use std::fmt;

use thiserror::Error;

use crate::tree::{parse_tree, PlanarTree, TreeError};

/// Errors from word analysis, composition and parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LukError {
    /// The word fails the Lukasiewicz criterion.
    #[error("not a Lukasiewicz word: weight {delta}, lowest proper-prefix weight {min_prefix}")]
    NotLukWord { delta: i64, min_prefix: i64 },
    /// The word is not a product of Lukasiewicz words (empty, or some proper
    /// prefix already reaches the total weight).
    #[error("not a product of Lukasiewicz words")]
    NotProduct,
    /// Head degree and argument count disagree.
    #[error("a degree-{expected} head takes {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    /// Malformed text at a byte offset of the input.
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    /// A letter of a tree-alphabet word failed to parse.
    #[error("letter {index}: {source}")]
    BadLetter { index: usize, source: TreeError },
    /// The empty tree has no preorder arity sequence.
    #[error("the empty tree cannot be encoded as a word")]
    EmptyTree,
}

/// A graded alphabet symbol.
pub trait Letter: Clone + Eq + fmt::Display {
    fn degree(&self) -> usize;

    /// Weight `degree - 1`, the quantity whose running sums classify words.
    fn weight(&self) -> i64 {
        self.degree() as i64 - 1
    }
}

/// The alphabet with one symbol per natural number, graded by itself.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct NatLetter(pub usize);

impl Letter for NatLetter {
    fn degree(&self) -> usize {
        self.0
    }
}

impl fmt::Display for NatLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The alphabet of planar trees, graded by leaf count. The empty tree is
/// the unique degree-0 symbol in play for flag words.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct TreeLetter(pub PlanarTree);

impl Letter for TreeLetter {
    fn degree(&self) -> usize {
        self.0.degree()
    }
}

impl fmt::Display for TreeLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite word over a graded alphabet.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Word<L>(Vec<L>);

impl<L: Letter> Word<L> {
    pub fn new(letters: Vec<L>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[L] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word<L>) -> Word<L> {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    /// Sum of letter weights (degree minus one per letter); 0 for the empty
    /// word.
    pub fn delta(&self) -> i64 {
        self.0.iter().map(Letter::weight).sum()
    }

    /// Lukasiewicz criterion: total weight `-1`, proper prefixes `>= 0`.
    pub fn is_luk(&self) -> bool {
        self.is_product_of_luk() == Some(1)
    }

    /// When the word is a concatenation of `r >= 1` Lukasiewicz words,
    /// returns `Some(r)`; otherwise `None`. The criterion: total weight `-r`
    /// and every proper prefix strictly above `-r`.
    pub fn is_product_of_luk(&self) -> Option<usize> {
        if self.0.is_empty() {
            return None;
        }
        let total = self.delta();
        if total >= 0 {
            return None;
        }
        let mut running = 0i64;
        for letter in &self.0[..self.0.len() - 1] {
            running += letter.weight();
            if running <= total {
                return None;
            }
        }
        Some((-total) as usize)
    }

    /// Unique factorization into Lukasiewicz words: cuts after each letter
    /// where the running weight reaches a new minimum. Fails when the word
    /// is not such a product.
    pub fn factor(&self) -> Result<Vec<Word<L>>, LukError> {
        self.is_product_of_luk().ok_or(LukError::NotProduct)?;
        let mut factors = Vec::new();
        let mut current = Vec::new();
        let mut running = 0i64;
        let mut min_seen = 0i64;
        for letter in &self.0 {
            running += letter.weight();
            current.push(letter.clone());
            if running < min_seen {
                min_seen = running;
                factors.push(Word(std::mem::take(&mut current)));
            }
        }
        debug_assert!(current.is_empty());
        debug_assert!(factors.iter().all(Word::is_luk));
        Ok(factors)
    }

    /// Splits a Lukasiewicz word into its head letter and the unique list of
    /// Lukasiewicz arguments, one per unit of head degree.
    pub fn head_decompose(&self) -> Result<(L, Vec<Word<L>>), LukError> {
        if !self.is_luk() {
            return Err(self.not_luk_error());
        }
        let head = self.0[0].clone();
        let rest = Word(self.0[1..].to_vec());
        let parts = if rest.is_empty() {
            Vec::new()
        } else {
            rest.factor()?
        };
        debug_assert_eq!(parts.len(), head.degree());
        Ok((head, parts))
    }

    /// Height of a Lukasiewicz word: 0 for a single degree-0 letter, and one
    /// more than the highest argument otherwise. Under the tree codec this
    /// is the maximum root-to-leaf edge count.
    pub fn height(&self) -> Result<usize, LukError> {
        let (head, parts) = self.head_decompose()?;
        if head.degree() == 0 {
            return Ok(0);
        }
        let deepest = parts
            .iter()
            .map(|p| p.height())
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .max()
            .expect("positive head degree means at least one argument");
        Ok(1 + deepest)
    }

    fn not_luk_error(&self) -> LukError {
        let mut running = 0i64;
        let mut min_prefix = 0i64;
        for letter in self.0.iter().take(self.0.len().saturating_sub(1)) {
            running += letter.weight();
            min_prefix = min_prefix.min(running);
        }
        LukError::NotLukWord {
            delta: self.delta(),
            min_prefix,
        }
    }
}

impl<L: Letter> FromIterator<L> for Word<L> {
    fn from_iter<T: IntoIterator<Item = L>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Inverse of [`Word::head_decompose`]: prepends `head` to the concatenation
/// of `parts`. Requires exactly `degree(head)` parts, each a Lukasiewicz
/// word; the result is then a Lukasiewicz word.
pub fn luk_compose<L: Letter>(head: L, parts: &[Word<L>]) -> Result<Word<L>, LukError> {
    if parts.len() != head.degree() {
        return Err(LukError::ArityMismatch {
            expected: head.degree(),
            got: parts.len(),
        });
    }
    for part in parts {
        if !part.is_luk() {
            return Err(part.not_luk_error());
        }
    }
    let mut letters = vec![head];
    for part in parts {
        letters.extend(part.letters().iter().cloned());
    }
    let word = Word(letters);
    debug_assert!(word.is_luk());
    Ok(word)
}

/// Preorder arity sequence of a nonempty tree, as a word over [`NatLetter`].
/// Always a Lukasiewicz word; a leaf encodes as the single letter `0`.
pub fn encode_pt(t: &PlanarTree) -> Result<Word<NatLetter>, LukError> {
    if t.is_empty() {
        return Err(LukError::EmptyTree);
    }
    Ok(Word(t.arity_sequence().into_iter().map(NatLetter).collect()))
}

/// Rebuilds the tree from its preorder arity sequence. Fails exactly when
/// the word is not a Lukasiewicz word over `N`.
pub fn decode_pt(w: &Word<NatLetter>) -> Result<PlanarTree, LukError> {
    fn build(letters: &[NatLetter], cursor: &mut usize) -> Option<PlanarTree> {
        let arity = letters.get(*cursor)?.0;
        *cursor += 1;
        let mut children = Vec::with_capacity(arity);
        for _ in 0..arity {
            children.push(build(letters, cursor)?);
        }
        Some(PlanarTree::Node(children))
    }
    let mut cursor = 0;
    match build(&w.0, &mut cursor) {
        Some(tree) if cursor == w.len() => Ok(tree),
        _ => Err(w.not_luk_error()),
    }
}

/// Parses a space-separated list of natural numbers, e.g. `"3 0 1 2 0 0 1 0"`.
/// Whitespace-only input yields the empty word.
pub fn parse_nat_word(input: &str) -> Result<Word<NatLetter>, LukError> {
    let bytes = input.as_bytes();
    let mut letters = Vec::new();
    let mut pos = 0usize;
    while pos < bytes.len() {
        if bytes[pos].is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let token = &input[start..pos];
        let value: usize = token.parse().map_err(|_| LukError::Syntax {
            offset: start,
            message: format!("expected a natural number, got {token:?}"),
        })?;
        letters.push(NatLetter(value));
    }
    Ok(Word(letters))
}

/// Space-separated rendering, inverse of [`parse_nat_word`].
pub fn format_nat_word(w: &Word<NatLetter>) -> String {
    w.letters()
        .iter()
        .map(|l| l.0.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a semicolon-separated list of tree literals, e.g. `"(x x); 1; 1"`.
/// Each letter uses the tree text form, with `1` allowed (it is the unique
/// degree-0 letter). Whitespace-only input yields the empty word.
pub fn parse_tree_word(input: &str) -> Result<Word<TreeLetter>, LukError> {
    if input.trim().is_empty() {
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    for (index, segment) in input.split(';').enumerate() {
        let tree = parse_tree(segment).map_err(|source| LukError::BadLetter { index, source })?;
        letters.push(TreeLetter(tree));
    }
    Ok(Word(letters))
}

/// Semicolon-separated rendering, inverse of [`parse_tree_word`].
pub fn format_tree_word(w: &Word<TreeLetter>) -> String {
    w.letters()
        .iter()
        .map(|l| l.0.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{enumerate_pt, parse_tree};

    fn nat(letters: &[usize]) -> Word<NatLetter> {
        Word::new(letters.iter().map(|&n| NatLetter(n)).collect())
    }

    #[test]
    fn delta_sums_letter_weights() {
        assert_eq!(nat(&[]).delta(), 0);
        assert_eq!(nat(&[0]).delta(), -1);
        assert_eq!(nat(&[3, 0, 1, 2, 0, 0, 1, 0]).delta(), -1);
        // Dropping one 0 from the word above leaves weight 0, so the
        // 7-letter variant cannot be a Lukasiewicz word.
        assert_eq!(nat(&[3, 1, 2, 0, 0, 1, 0]).delta(), 0);
        assert!(!nat(&[3, 1, 2, 0, 0, 1, 0]).is_luk());
    }

    #[test]
    fn luk_membership() {
        assert!(nat(&[0]).is_luk());
        assert!(nat(&[1, 0]).is_luk());
        assert!(nat(&[2, 0, 0]).is_luk());
        assert!(nat(&[3, 0, 1, 2, 0, 0, 1, 0]).is_luk());
        assert!(!nat(&[]).is_luk());
        assert!(!nat(&[2, 0]).is_luk());
        assert!(!nat(&[0, 0]).is_luk());
        assert!(!nat(&[0, 2, 0, 0]).is_luk());
        assert!(!nat(&[2, 0, 0, 0]).is_luk());
    }

    #[test]
    fn product_membership_counts_factors() {
        assert_eq!(nat(&[0]).is_product_of_luk(), Some(1));
        assert_eq!(nat(&[0, 0]).is_product_of_luk(), Some(2));
        assert_eq!(nat(&[0, 2, 0, 0]).is_product_of_luk(), Some(2));
        assert_eq!(nat(&[2, 0, 0, 2, 0, 0, 0]).is_product_of_luk(), Some(3));
        assert_eq!(nat(&[]).is_product_of_luk(), None);
        assert_eq!(nat(&[2, 0]).is_product_of_luk(), None);
        assert_eq!(nat(&[1]).is_product_of_luk(), None);
        assert_eq!(nat(&[0, 0, 1, 0]).is_product_of_luk(), Some(3));
        // A proper prefix that already reaches the total weight disqualifies
        // the word: here the prefix [0, 0] reaches the total -2 early.
        assert_eq!(nat(&[0, 0, 2, 0]).is_product_of_luk(), None);
    }

    #[test]
    fn factor_cuts_at_running_minima() {
        let w = nat(&[0, 1, 2, 0, 0, 1, 0]);
        let parts = w.factor().unwrap();
        assert_eq!(
            parts,
            vec![nat(&[0]), nat(&[1, 2, 0, 0]), nat(&[1, 0])]
        );
        assert_eq!(nat(&[0]).factor().unwrap(), vec![nat(&[0])]);
        assert_eq!(nat(&[2, 0]).factor(), Err(LukError::NotProduct));
        assert_eq!(nat(&[]).factor(), Err(LukError::NotProduct));
    }

    #[test]
    fn factor_round_trips_random_concatenations() {
        // Deterministic pseudo-random concatenations of small Lukasiewicz
        // words; factoring must recover the parts exactly.
        let pool: Vec<Word<NatLetter>> = (1..=6)
            .flat_map(|n| enumerate_pt(n).unwrap())
            .map(|t| encode_pt(&t).unwrap())
            .collect();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..500 {
            let count = 1 + (next() % 5) as usize;
            let parts: Vec<Word<NatLetter>> = (0..count)
                .map(|_| pool[(next() % pool.len() as u64) as usize].clone())
                .collect();
            let mut whole = Word::empty();
            for part in &parts {
                whole = whole.concat(part);
            }
            assert_eq!(whole.is_product_of_luk(), Some(count));
            assert_eq!(whole.factor().unwrap(), parts);
        }
    }

    #[test]
    fn head_decomposition() {
        let w = nat(&[3, 0, 1, 2, 0, 0, 1, 0]);
        let (head, parts) = w.head_decompose().unwrap();
        assert_eq!(head, NatLetter(3));
        assert_eq!(
            parts,
            vec![nat(&[0]), nat(&[1, 2, 0, 0]), nat(&[1, 0])]
        );
        assert_eq!(nat(&[0]).head_decompose().unwrap(), (NatLetter(0), vec![]));
        assert_eq!(
            nat(&[2, 0, 0]).head_decompose().unwrap(),
            (NatLetter(2), vec![nat(&[0]), nat(&[0])])
        );
        assert!(nat(&[2, 0]).head_decompose().is_err());
    }

    #[test]
    fn compose_inverts_head_decomposition() {
        let w = nat(&[3, 0, 1, 2, 0, 0, 1, 0]);
        let (head, parts) = w.head_decompose().unwrap();
        assert_eq!(luk_compose(head, &parts).unwrap(), w);
        assert_eq!(
            luk_compose(NatLetter(2), &[nat(&[0]), nat(&[1, 0])]).unwrap(),
            nat(&[2, 0, 1, 0])
        );
        assert_eq!(
            luk_compose(NatLetter(2), &[nat(&[0])]),
            Err(LukError::ArityMismatch { expected: 2, got: 1 })
        );
        assert!(luk_compose(NatLetter(1), &[nat(&[2, 0])]).is_err());
    }

    #[test]
    fn height_examples() {
        assert_eq!(nat(&[0]).height().unwrap(), 0);
        assert_eq!(nat(&[1, 0]).height().unwrap(), 1);
        assert_eq!(nat(&[2, 0, 0]).height().unwrap(), 1);
        assert_eq!(nat(&[2, 0, 1, 0]).height().unwrap(), 2);
        assert_eq!(nat(&[3, 0, 1, 2, 0, 0, 1, 0]).height().unwrap(), 3);
        assert!(nat(&[2, 0]).height().is_err());
    }

    #[test]
    fn tree_codec_examples() {
        let x = parse_tree("x").unwrap();
        assert_eq!(encode_pt(&x).unwrap(), nat(&[0]));
        let t = parse_tree("(x (x x))").unwrap();
        assert_eq!(encode_pt(&t).unwrap(), nat(&[2, 0, 2, 0, 0]));
        let figure = parse_tree("(x ((x x)) (x))").unwrap();
        assert_eq!(encode_pt(&figure).unwrap(), nat(&[3, 0, 1, 2, 0, 0, 1, 0]));
        assert_eq!(decode_pt(&nat(&[3, 0, 1, 2, 0, 0, 1, 0])).unwrap(), figure);
        assert_eq!(encode_pt(&PlanarTree::Empty), Err(LukError::EmptyTree));
        assert!(decode_pt(&nat(&[2, 0])).is_err());
        assert!(decode_pt(&nat(&[0, 0])).is_err());
        assert!(decode_pt(&nat(&[])).is_err());
    }

    #[test]
    fn tree_codec_is_a_bijection_on_small_trees() {
        for n in 1..=6 {
            for t in enumerate_pt(n).unwrap() {
                let w = encode_pt(&t).unwrap();
                assert!(w.is_luk());
                assert_eq!(w.len(), t.vertex_count());
                assert_eq!(decode_pt(&w).unwrap(), t);
            }
        }
    }

    #[test]
    fn nat_word_text_round_trip() {
        let w = nat(&[3, 0, 1, 2, 0, 0, 1, 0]);
        assert_eq!(format_nat_word(&w), "3 0 1 2 0 0 1 0");
        assert_eq!(parse_nat_word("3 0 1 2 0 0 1 0").unwrap(), w);
        assert_eq!(parse_nat_word("  3   0 ").unwrap(), nat(&[3, 0]));
        assert_eq!(parse_nat_word("").unwrap(), nat(&[]));
        assert_eq!(
            parse_nat_word("3 -1"),
            Err(LukError::Syntax {
                offset: 2,
                message: "expected a natural number, got \"-1\"".to_string()
            })
        );
    }

    #[test]
    fn tree_word_text_round_trip() {
        let w = parse_tree_word("(x x); 1; 1").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.letters()[0], TreeLetter(parse_tree("(x x)").unwrap()));
        assert_eq!(w.letters()[1], TreeLetter(PlanarTree::Empty));
        assert_eq!(w.delta(), 1 + (-1) + (-1));
        assert!(w.is_luk());
        assert_eq!(format_tree_word(&w), "(x x); 1; 1");
        assert_eq!(parse_tree_word(format_tree_word(&w).as_str()).unwrap(), w);
        assert_eq!(parse_tree_word("").unwrap(), Word::empty());
        assert!(matches!(
            parse_tree_word("(x x); ; 1"),
            Err(LukError::BadLetter { index: 1, .. })
        ));
    }
}
