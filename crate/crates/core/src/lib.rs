//! Planar rooted trees, generalized Lukasiewicz languages, right-sided flags
//! and decompositions, and exact planar-tree power series.
//!
//! The central objects:
//!
//! - [`tree::PlanarTree`] — isomorphism classes of finite planar rooted trees,
//!   with grafting products, subtree machinery and exhaustive enumeration.
//! - [`luk::Word`] — words over an arbitrary graded alphabet, with the
//!   Lukasiewicz membership test, unique factorization, head decomposition,
//!   height, and the preorder-arity codec between nonempty planar trees and
//!   `Luk(N)`.
//! - [`flags::Flag`] and [`flags::Decomposition`] — right-sided open flags on
//!   a right-sided tree, their encoding as `Luk(PRT')` words, right-sided
//!   decompositions, and the bijection between the two.
//! - [`series::TreeSeries`] — degree-truncated planar-tree power series over
//!   exact rationals, with product, reciprocal, substitution, and three
//!   independent solvers for the inversion equation `g = x * f(g(x))`.
//!
//! All values are immutable after construction and all operations are pure;
//! enumerators return fully materialized, deterministically ordered lists.

pub mod flags;
pub mod luk;
pub mod series;
pub mod subtree;
pub mod tree;
pub mod verify;

pub use flags::{Decomposition, Flag};
pub use luk::{NatLetter, TreeLetter, Word};
pub use series::{Order, Rational, TreeSeries};
pub use subtree::{Forest, SubtreeSelection};
pub use tree::{PlanarTree, Position};
pub use verify::{run_verify, CheckOutcome, VerifySuite};
