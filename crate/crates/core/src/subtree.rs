//! Subtrees of a host tree, viewed as vertex selections.
//!
//! A [`SubtreeSelection`] pins down a *relatively open* subtree: a nonempty,
//! connected set of vertices that takes, at each of its vertices, either all
//! of the host's children or none of them. Its *leaves* are the vertices
//! that keep none; cutting the selection out of the host leaves one closed
//! subtree hanging at each of those leaves (a [`Forest`]).
//!
//! The selection is *open* when it contains the host root. An open selection
//! whose shape has at least two leaves and whose leaves all root right-sided
//! closed subtrees is *completely right-sided*; those are the building
//! stages of flags.

use std::collections::BTreeSet;
use std::fmt;

use crate::tree::{PlanarTree, Position, TreeError};

/// A relatively open subtree of a fixed host tree.
///
/// Holds its own copy of the host, the subtree's root position, and the
/// selected vertex set. Construction validates the defining conditions, so
/// every value of this type is a genuine relatively open subtree:
///
/// - every position addresses a vertex of the host,
/// - the set is connected and has a unique minimal vertex (the root),
/// - each selected vertex keeps either all of its host children or none.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubtreeSelection {
    host: PlanarTree,
    root_pos: Position,
    vertices: BTreeSet<Position>,
}

impl SubtreeSelection {
    /// Validates `vertices` as a relatively open subtree of `host`.
    pub fn new(
        host: PlanarTree,
        vertices: impl IntoIterator<Item = Position>,
    ) -> Result<Self, TreeError> {
        let vertices: BTreeSet<Position> = vertices.into_iter().collect();
        if vertices.is_empty() {
            return Err(TreeError::InvalidSelection {
                reason: "the vertex set is empty".to_string(),
            });
        }
        for v in &vertices {
            host.subtree_at(v)?;
        }
        let min_depth = vertices.iter().map(Position::depth).min().unwrap();
        let mut roots = vertices.iter().filter(|v| v.depth() == min_depth);
        let root_pos = roots.next().unwrap().clone();
        if roots.next().is_some() {
            return Err(TreeError::InvalidSelection {
                reason: "the vertex set is not connected (several minimal vertices)".to_string(),
            });
        }
        for v in &vertices {
            if *v == root_pos {
                continue;
            }
            match v.parent() {
                Some(parent) if vertices.contains(&parent) => {}
                _ => {
                    return Err(TreeError::InvalidSelection {
                        reason: format!("vertex {v} is not connected to the root {root_pos}"),
                    });
                }
            }
        }
        for v in &vertices {
            let arity = host.arity_at(v).expect("vertex was checked above");
            let kept = (1..=arity).filter(|&i| vertices.contains(&v.child(i))).count();
            if kept != 0 && kept != arity {
                return Err(TreeError::InvalidSelection {
                    reason: format!(
                        "vertex {v} keeps {kept} of its {arity} children; a relatively open \
                         subtree keeps all or none"
                    ),
                });
            }
        }
        Ok(SubtreeSelection {
            host,
            root_pos,
            vertices,
        })
    }

    /// The one-vertex selection at `position`.
    pub fn singleton(host: PlanarTree, position: Position) -> Result<Self, TreeError> {
        SubtreeSelection::new(host, [position])
    }

    /// The selection of every vertex of the host. Fails on the empty tree.
    pub fn full(host: PlanarTree) -> Result<Self, TreeError> {
        let vertices = host.positions();
        SubtreeSelection::new(host, vertices)
    }

    /// The closed subtree at `position`, as a selection: that vertex and all
    /// of its descendants.
    pub fn closed_at(host: PlanarTree, position: Position) -> Result<Self, TreeError> {
        let sub = host.subtree_at(&position)?;
        let vertices: Vec<Position> = sub
            .positions()
            .into_iter()
            .map(|p| position.join(&p))
            .collect();
        SubtreeSelection::new(host, vertices)
    }

    pub fn host(&self) -> &PlanarTree {
        &self.host
    }

    pub fn root_pos(&self) -> &Position {
        &self.root_pos
    }

    /// Selected vertices in planar (preorder) order.
    pub fn vertices(&self) -> &BTreeSet<Position> {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, position: &Position) -> bool {
        self.vertices.contains(position)
    }

    /// True when the selection keeps all host children of `position` (which
    /// must be selected). Host leaves keep all zero of their children.
    fn keeps_children(&self, position: &Position) -> bool {
        let arity = self
            .host
            .arity_at(position)
            .expect("selection vertices address the host");
        arity > 0 && self.vertices.contains(&position.child(1))
    }

    /// Leaves of the selection: selected vertices none of whose host
    /// children are selected. In planar order.
    pub fn leaves(&self) -> Vec<Position> {
        self.vertices
            .iter()
            .filter(|v| !self.keeps_children(v))
            .cloned()
            .collect()
    }

    /// The planar-first leaf of the selection.
    pub fn first_leaf(&self) -> Position {
        let mut cur = self.root_pos.clone();
        while self.keeps_children(&cur) {
            cur = cur.child(1);
        }
        cur
    }

    /// The selection's own tree shape: its vertices with the induced
    /// child relation.
    pub fn shape(&self) -> PlanarTree {
        fn build(sel: &SubtreeSelection, at: &Position) -> PlanarTree {
            if !sel.keeps_children(at) {
                return PlanarTree::leaf();
            }
            let arity = sel.host.arity_at(at).expect("selected vertex");
            let children = (1..=arity).map(|i| build(sel, &at.child(i))).collect();
            PlanarTree::Node(children)
        }
        build(self, &self.root_pos)
    }

    /// Open means the selection contains the host root.
    pub fn is_open(&self) -> bool {
        self.root_pos.is_root()
    }

    /// Open, shape of degree at least 2, and every leaf roots a right-sided
    /// closed subtree of the host.
    pub fn is_completely_right_sided(&self) -> bool {
        self.is_open()
            && self.shape().degree() >= 2
            && self.leaves().iter().all(|leaf| {
                self.host
                    .subtree_at(leaf)
                    .expect("selection vertices address the host")
                    .is_right_sided()
            })
    }

    /// Cuts the selection's interior out of the host: the closed subtrees
    /// hanging at the selection's leaves, in planar order. Their degrees sum
    /// to the host degree, and the host is recovered by replacing the shape's
    /// leaves with the components.
    pub fn remove_interior(&self) -> Forest {
        let components = self
            .leaves()
            .into_iter()
            .map(|leaf| {
                let tree = self
                    .host
                    .closed_subtree_at(&leaf)
                    .expect("selection vertices address the host");
                (leaf, tree)
            })
            .collect();
        Forest { components }
    }
}

impl fmt::Debug for SubtreeSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if v.is_root() {
                write!(f, "<>")?;
            } else {
                write!(f, "<{v}>")?;
            }
        }
        write!(f, "}} in {}", self.host)
    }
}

/// An ordered list of closed subtrees cut from a host, each tagged with the
/// position of its root in the host. Ordered by planar order of the roots.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Forest {
    pub components: Vec<(Position, PlanarTree)>,
}

impl Forest {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn trees(&self) -> Vec<PlanarTree> {
        self.components.iter().map(|(_, t)| t.clone()).collect()
    }
}

/// Vertex sets of the open subtrees of the closed subtree of `host` rooted
/// at `at`, in host coordinates. Each is either `{at}` alone or `at` plus a
/// choice, for every kept child, of one of that child's sets.
fn open_sets_below(host: &PlanarTree, at: &Position) -> Vec<BTreeSet<Position>> {
    let arity = host.arity_at(at).expect("caller passes a valid position");
    let mut out = vec![BTreeSet::from([at.clone()])];
    if arity == 0 {
        return out;
    }
    let child_choices: Vec<Vec<BTreeSet<Position>>> = (1..=arity)
        .map(|i| open_sets_below(host, &at.child(i)))
        .collect();
    let mut products: Vec<BTreeSet<Position>> = vec![BTreeSet::from([at.clone()])];
    for choices in &child_choices {
        let mut next = Vec::with_capacity(products.len() * choices.len());
        for base in &products {
            for choice in choices {
                let mut set = base.clone();
                set.extend(choice.iter().cloned());
                next.push(set);
            }
        }
        products = next;
    }
    out.extend(products);
    out
}

/// All open subtrees of `t` (selections containing the root), including the
/// one-vertex selection and the full tree. Deterministic order; there are
/// `prod over internal vertices v of (1 + e(v))`-style counts, e.g. 2 for
/// `(x x)`. Fails on the empty tree.
pub fn enumerate_open_subtrees(t: &PlanarTree) -> Result<Vec<SubtreeSelection>, TreeError> {
    if t.is_empty() {
        return Err(TreeError::EmptyTree);
    }
    open_sets_below(t, &Position::root())
        .into_iter()
        .map(|set| SubtreeSelection::new(t.clone(), set))
        .collect()
}

/// All relatively open subtrees of `t`: one batch of open subtrees per
/// rooting vertex, in planar order of the roots. Fails on the empty tree.
pub fn enumerate_relatively_open(t: &PlanarTree) -> Result<Vec<SubtreeSelection>, TreeError> {
    if t.is_empty() {
        return Err(TreeError::EmptyTree);
    }
    let mut out = Vec::new();
    for root in t.positions() {
        for set in open_sets_below(t, &root) {
            out.push(SubtreeSelection::new(t.clone(), set)?);
        }
    }
    Ok(out)
}
