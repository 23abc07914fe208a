//! Planar-tree power series with exact rational coefficients.
//!
//! A [`TreeSeries`] assigns a [`Rational`] coefficient to the unit monomial
//! `1` and to every reduced planar tree up to a fixed truncation degree.
//! The product extends `1·T = T·1 = T` and `V·W = (V W)` bilinearly; it is
//! unital but not associative, so [`TreeSeries::reciprocal`] produces the
//! right inverse: `mul(f, reciprocal(f)) = 1`.
//!
//! [`TreeSeries::substitute`] plugs a series of order at least one into the
//! leaves of every monomial. The equation `g = x·f(g)` has a unique
//! solution with zero constant term; [`solve_inversion_recurrence`],
//! [`solve_inversion_gamma`], and [`solve_inversion_iterate`] compute it in
//! three independent ways, and [`compositional_check`] verifies a solution
//! through the identity `φ_g(x·(1/f)) = x`. [`classical_lagrange`] is the
//! one-variable coefficient extraction the abelianized solution must match.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flags::{enumerate_decompositions, FlagError};
use crate::subtree::enumerate_open_subtrees;
use crate::tree::{
    enumerate_right_sided_with_cap, parse_tree, PlanarTree, TreeError,
};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Errors from series construction and arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    /// Operations combine series only at equal truncation degrees.
    #[error("series have different truncation degrees: {left} and {right}")]
    DegreeMismatch { left: usize, right: usize },
    /// A monomial key lies above the truncation degree.
    #[error("monomial {tree} has degree {degree}, above the truncation degree {max_degree}")]
    KeyTooLarge {
        tree: PlanarTree,
        degree: usize,
        max_degree: usize,
    },
    /// Monomial keys are the unit and reduced trees.
    #[error("monomial {tree} is not a reduced tree")]
    NotReduced { tree: PlanarTree },
    /// Reciprocals need a nonzero constant coefficient.
    #[error("the constant coefficient is zero, so the series has no reciprocal")]
    NotInvertible,
    /// Substitution and graft products need operands without constant term.
    #[error("the operation requires a series of order at least 1")]
    OrderTooSmall,
    /// A graft product needs at least two factors.
    #[error("a graft product takes at least two factors, got {got}")]
    TooFewFactors { got: usize },
    /// The classical coefficient extraction needs a positive degree bound.
    #[error("the coefficient extraction needs a positive degree bound")]
    ZeroDegreeBound,
    /// Malformed JSON series data.
    #[error("malformed series data: {0}")]
    Json(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Flag(#[from] FlagError),
}

/// Order of a series: the least degree carrying a nonzero coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Finite(usize),
    /// Order of the zero series.
    Infinite,
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("infinity"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesJson {
    max_degree: usize,
    coefficients: Vec<CoefficientJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientJson {
    tree: String,
    value: String,
}

/// A planar-tree power series truncated at a fixed degree.
///
/// Keys are the unit monomial (the empty tree) and reduced trees of degree
/// at most `max_degree`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct TreeSeries {
    max_degree: usize,
    coeffs: BTreeMap<PlanarTree, Rational>,
}

fn check_key(tree: &PlanarTree, max_degree: usize) -> Result<(), SeriesError> {
    if !tree.is_empty() && !tree.is_reduced() {
        return Err(SeriesError::NotReduced { tree: tree.clone() });
    }
    let degree = tree.degree();
    if degree > max_degree {
        return Err(SeriesError::KeyTooLarge {
            tree: tree.clone(),
            degree,
            max_degree,
        });
    }
    Ok(())
}

impl TreeSeries {
    pub fn zero(max_degree: usize) -> TreeSeries {
        TreeSeries {
            max_degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The unit series `1`.
    pub fn one(max_degree: usize) -> TreeSeries {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(PlanarTree::Empty, Rational::one());
        TreeSeries { max_degree, coeffs }
    }

    /// The series `x`; needs `max_degree >= 1`.
    pub fn x(max_degree: usize) -> Result<TreeSeries, SeriesError> {
        TreeSeries::monomial(max_degree, PlanarTree::leaf(), Rational::one())
    }

    pub fn monomial(
        max_degree: usize,
        tree: PlanarTree,
        coefficient: Rational,
    ) -> Result<TreeSeries, SeriesError> {
        check_key(&tree, max_degree)?;
        let mut coeffs = BTreeMap::new();
        if !coefficient.is_zero() {
            coeffs.insert(tree, coefficient);
        }
        Ok(TreeSeries { max_degree, coeffs })
    }

    /// Builds a series from `(tree, coefficient)` pairs, accumulating
    /// repeated keys and dropping zeros.
    pub fn from_coeffs(
        max_degree: usize,
        entries: impl IntoIterator<Item = (PlanarTree, Rational)>,
    ) -> Result<TreeSeries, SeriesError> {
        let mut coeffs: BTreeMap<PlanarTree, Rational> = BTreeMap::new();
        for (tree, value) in entries {
            check_key(&tree, max_degree)?;
            let slot = coeffs.entry(tree).or_insert_with(Rational::zero);
            *slot += value;
        }
        coeffs.retain(|_, v| !v.is_zero());
        Ok(TreeSeries { max_degree, coeffs })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// The coefficient of a monomial (zero when absent).
    pub fn coeff(&self, tree: &PlanarTree) -> Rational {
        self.coeffs.get(tree).cloned().unwrap_or_else(Rational::zero)
    }

    fn coeff_ref(&self, tree: &PlanarTree) -> Option<&Rational> {
        self.coeffs.get(tree)
    }

    /// Nonzero coefficients in monomial order.
    pub fn iter(&self) -> impl Iterator<Item = (&PlanarTree, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Least degree with a nonzero coefficient; infinite for zero.
    pub fn order(&self) -> Order {
        self.coeffs
            .keys()
            .map(PlanarTree::degree)
            .min()
            .map_or(Order::Infinite, Order::Finite)
    }

    fn check_same_degree(&self, other: &TreeSeries) -> Result<(), SeriesError> {
        if self.max_degree != other.max_degree {
            return Err(SeriesError::DegreeMismatch {
                left: self.max_degree,
                right: other.max_degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TreeSeries) -> Result<TreeSeries, SeriesError> {
        self.check_same_degree(other)?;
        let mut coeffs = self.coeffs.clone();
        for (tree, value) in &other.coeffs {
            let slot = coeffs.entry(tree.clone()).or_insert_with(Rational::zero);
            *slot += value;
        }
        coeffs.retain(|_, v| !v.is_zero());
        Ok(TreeSeries {
            max_degree: self.max_degree,
            coeffs,
        })
    }

    pub fn scale(&self, factor: &Rational) -> TreeSeries {
        if factor.is_zero() {
            return TreeSeries::zero(self.max_degree);
        }
        TreeSeries {
            max_degree: self.max_degree,
            coeffs: self
                .coeffs
                .iter()
                .map(|(t, v)| (t.clone(), v * factor))
                .collect(),
        }
    }

    /// The bilinear extension of the tree product `V·W = (V W)` with unit
    /// `1`, truncated at `max_degree`. Not associative.
    pub fn mul(&self, other: &TreeSeries) -> Result<TreeSeries, SeriesError> {
        self.check_same_degree(other)?;
        let mut coeffs: BTreeMap<PlanarTree, Rational> = BTreeMap::new();
        for (v, cv) in &self.coeffs {
            for (w, cw) in &other.coeffs {
                if v.degree() + w.degree() > self.max_degree {
                    continue;
                }
                let product = v.product(w);
                let slot = coeffs.entry(product).or_insert_with(Rational::zero);
                *slot += cv * cw;
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        Ok(TreeSeries {
            max_degree: self.max_degree,
            coeffs,
        })
    }

    /// Substitutes `g` for `x` in every monomial: the unit maps to the
    /// unit, `x` to `g`, and a branching monomial to the graft product of
    /// its children's images. Requires `order(g) >= 1` and equal truncation
    /// degrees.
    pub fn substitute(&self, g: &TreeSeries) -> Result<TreeSeries, SeriesError> {
        self.check_same_degree(g)?;
        if g.coeff_ref(&PlanarTree::Empty).is_some() {
            return Err(SeriesError::OrderTooSmall);
        }
        let mut memo: BTreeMap<PlanarTree, TreeSeries> = BTreeMap::new();
        let mut acc = TreeSeries::zero(self.max_degree);
        for (tree, value) in &self.coeffs {
            let image = substitute_tree(tree, g, &mut memo)?;
            acc = acc.add(&image.scale(value))?;
        }
        Ok(acc)
    }

    /// The right inverse for [`TreeSeries::mul`]: `mul(self, reciprocal) =
    /// 1`. Exists exactly when the constant coefficient is nonzero.
    ///
    /// The coefficients satisfy a triangular recurrence: a monomial `U`
    /// factors as `V·W` with `V, W ≠ 1` only when its root has arity two,
    /// and then `V, W` are the two child subtrees, so
    /// `γ(U) = -(c_U·γ(1) + c_{U_1}·γ(U_2)) / c_1` with the second term
    /// present only in the arity-two case.
    pub fn reciprocal(&self) -> Result<TreeSeries, SeriesError> {
        let c1 = self
            .coeff_ref(&PlanarTree::Empty)
            .ok_or(SeriesError::NotInvertible)?
            .clone();
        let mut gamma: BTreeMap<PlanarTree, Rational> = BTreeMap::new();
        gamma.insert(PlanarTree::Empty, c1.recip());
        for degree in 1..=self.max_degree {
            for tree in reduced_trees(degree)? {
                let mut numerator = self.coeff(&tree) * gamma[&PlanarTree::Empty].clone();
                if tree.root_arity() == 2 {
                    let children = tree.children();
                    let left = self.coeff(&children[0]);
                    if !left.is_zero() {
                        if let Some(right) = gamma.get(&children[1]) {
                            numerator += left * right;
                        }
                    }
                }
                if !numerator.is_zero() {
                    gamma.insert(tree, -numerator / &c1);
                }
            }
        }
        TreeSeries::from_coeffs(self.max_degree, gamma)
    }

    /// Coefficient sums by degree: entry `n` is the sum over all monomials
    /// of degree `n`, for `n = 0..=max_degree`.
    pub fn abelianize(&self) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); self.max_degree + 1];
        for (tree, value) in &self.coeffs {
            sums[tree.degree()] += value;
        }
        sums
    }

    /// Serializes to the JSON interchange format. Deterministic: monomials
    /// appear in their canonical order.
    pub fn to_json(&self) -> String {
        let data = SeriesJson {
            max_degree: self.max_degree,
            coefficients: self
                .coeffs
                .iter()
                .map(|(tree, value)| CoefficientJson {
                    tree: tree.to_literal(),
                    value: value.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&data).expect("serialization cannot fail")
    }

    /// Parses the JSON interchange format; unknown fields, unparsable
    /// trees, non-reduced monomials, and oversized degrees are rejected.
    pub fn from_json(text: &str) -> Result<TreeSeries, SeriesError> {
        let data: SeriesJson =
            serde_json::from_str(text).map_err(|e| SeriesError::Json(e.to_string()))?;
        let mut entries = Vec::with_capacity(data.coefficients.len());
        for entry in &data.coefficients {
            let tree = parse_tree(&entry.tree)?;
            let value = parse_rational(&entry.value)
                .map_err(|e| SeriesError::Json(format!("bad rational {:?}: {e}", entry.value)))?;
            entries.push((tree, value));
        }
        TreeSeries::from_coeffs(data.max_degree, entries)
    }
}

impl std::fmt::Debug for TreeSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TreeSeries(max_degree={}", self.max_degree)?;
        for (tree, value) in &self.coeffs {
            write!(f, ", {tree}: {value}")?;
        }
        f.write_str(")")
    }
}

/// Parses `p` or `p/q` with a nonzero denominator; the builtin parser
/// panics on a zero denominator instead of erroring.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let n: BigInt = numer.trim().parse().map_err(|e| format!("{e}"))?;
    let d: BigInt = denom.trim().parse().map_err(|e| format!("{e}"))?;
    if d.is_zero() {
        return Err("zero denominator".to_string());
    }
    Ok(Rational::new(n, d))
}

/// Reduced trees of one degree, unbounded by the public enumeration cap.
fn reduced_trees(degree: usize) -> Result<Vec<PlanarTree>, TreeError> {
    crate::tree::enumerate_prt_with_cap(degree, usize::MAX)
}

fn right_sided_trees(degree: usize) -> Result<Vec<PlanarTree>, TreeError> {
    enumerate_right_sided_with_cap(degree, usize::MAX)
}

/// The graft `(f_1 … f_m)` of `m >= 2` series, each of order at least one,
/// extended multilinearly and truncated at the common degree.
pub fn graft_product(factors: &[&TreeSeries]) -> Result<TreeSeries, SeriesError> {
    if factors.len() < 2 {
        return Err(SeriesError::TooFewFactors { got: factors.len() });
    }
    let max_degree = factors[0].max_degree;
    for f in factors {
        factors[0].check_same_degree(f)?;
        if f.coeff_ref(&PlanarTree::Empty).is_some() {
            return Err(SeriesError::OrderTooSmall);
        }
    }

    fn expand(
        factors: &[&TreeSeries],
        children: &mut Vec<PlanarTree>,
        value: Rational,
        degree: usize,
        max_degree: usize,
        out: &mut BTreeMap<PlanarTree, Rational>,
    ) -> Result<(), SeriesError> {
        if let Some((first, rest)) = factors.split_first() {
            for (tree, coeff) in &first.coeffs {
                if degree + tree.degree() > max_degree {
                    continue;
                }
                children.push(tree.clone());
                expand(
                    rest,
                    children,
                    value.clone() * coeff,
                    degree + tree.degree(),
                    max_degree,
                    out,
                )?;
                children.pop();
            }
            return Ok(());
        }
        let tree = PlanarTree::graft(children)?;
        let slot = out.entry(tree).or_insert_with(Rational::zero);
        *slot += value;
        Ok(())
    }

    let mut out = BTreeMap::new();
    let mut children = Vec::with_capacity(factors.len());
    expand(factors, &mut children, Rational::one(), 0, max_degree, &mut out)?;
    TreeSeries::from_coeffs(max_degree, out)
}

fn substitute_tree(
    tree: &PlanarTree,
    g: &TreeSeries,
    memo: &mut BTreeMap<PlanarTree, TreeSeries>,
) -> Result<TreeSeries, SeriesError> {
    if tree.is_empty() {
        return Ok(TreeSeries::one(g.max_degree));
    }
    if tree.is_leaf() {
        return Ok(g.clone());
    }
    if let Some(done) = memo.get(tree) {
        return Ok(done.clone());
    }
    let images: Vec<TreeSeries> = tree
        .children()
        .iter()
        .map(|child| substitute_tree(child, g, memo))
        .collect::<Result<_, _>>()?;
    let refs: Vec<&TreeSeries> = images.iter().collect();
    let image = graft_product(&refs)?;
    memo.insert(tree.clone(), image.clone());
    Ok(image)
}

/// Solves `g = x·f(g)` by the subtree recurrence: for `T = x·T'`, sum over
/// the open subtrees `S'` of `T'` the coefficient of the shape of `S'` in
/// `f` times the solution's values on the closed subtrees hanging at the
/// leaves of `S'`. Components that are not right-sided contribute zero.
pub fn solve_inversion_recurrence(f: &TreeSeries) -> Result<TreeSeries, SeriesError> {
    let max_degree = f.max_degree;
    let mut solution: BTreeMap<PlanarTree, Rational> = BTreeMap::new();
    for degree in 1..=max_degree {
        for tree in right_sided_trees(degree)? {
            let factor = tree.right_factor()?;
            let value = if factor.is_empty() {
                f.coeff(&PlanarTree::Empty)
            } else {
                let mut acc = Rational::zero();
                for s in enumerate_open_subtrees(&factor)? {
                    let head = f.coeff(&s.shape());
                    if head.is_zero() {
                        continue;
                    }
                    let mut term = head;
                    for (_, component) in &s.remove_interior().components {
                        match solution.get(component) {
                            Some(v) if !v.is_zero() => term *= v,
                            _ => {
                                term = Rational::zero();
                                break;
                            }
                        }
                    }
                    acc += term;
                }
                acc
            };
            solution.insert(tree, value);
        }
    }
    TreeSeries::from_coeffs(max_degree, solution)
}

/// Solves `g = x·f(g)` by summing over decompositions: the coefficient of
/// a right-sided `T` is the sum over decompositions of `T` of the product
/// of piece weights, a singleton weighing the constant coefficient of `f`
/// and a larger piece the coefficient of the right factor of its shape.
pub fn solve_inversion_gamma(f: &TreeSeries) -> Result<TreeSeries, SeriesError> {
    let max_degree = f.max_degree;
    let mut solution: BTreeMap<PlanarTree, Rational> = BTreeMap::new();
    for degree in 1..=max_degree {
        for tree in right_sided_trees(degree)? {
            let mut acc = Rational::zero();
            for q in enumerate_decompositions(&tree)? {
                let mut term = Rational::one();
                for piece in q.pieces() {
                    let weight = if piece.len() == 1 {
                        f.coeff(&PlanarTree::Empty)
                    } else {
                        f.coeff(&piece.shape().right_factor()?)
                    };
                    if weight.is_zero() {
                        term = Rational::zero();
                        break;
                    }
                    term *= weight;
                }
                acc += term;
            }
            solution.insert(tree, acc);
        }
    }
    TreeSeries::from_coeffs(max_degree, solution)
}

/// Solves `g = x·f(g)` by fixed-point iteration from the zero series. Each
/// step substitutes the current approximation into `f` and multiplies by
/// `x` on the left; coefficients stabilize degree by degree, so at most
/// `max_degree` productive steps occur.
pub fn solve_inversion_iterate(f: &TreeSeries) -> Result<TreeSeries, SeriesError> {
    if f.max_degree == 0 {
        return Ok(TreeSeries::zero(0));
    }
    let x = TreeSeries::x(f.max_degree)?;
    let mut g = TreeSeries::zero(f.max_degree);
    for _ in 0..=f.max_degree {
        let next = x.mul(&f.substitute(&g)?)?;
        if next == g {
            return Ok(g);
        }
        g = next;
    }
    Ok(g)
}

/// The unique series `v` with `mul(v, f) = x`, the quotient of `x` by `f`.
/// Triangular like the reciprocal: `v(x) = 1/c_1(f)`; for a root of arity
/// two, `v(W_1·W_2) = -v(W_1)·c_{W_2}(f)/c_1(f)`; zero elsewhere. In an
/// associative algebra this would be `x·(1/f)`, but the product is not
/// associative and the two differ from degree three on.
fn x_quotient(f: &TreeSeries) -> Result<TreeSeries, SeriesError> {
    let c1 = f
        .coeff_ref(&PlanarTree::Empty)
        .ok_or(SeriesError::NotInvertible)?;
    let mut v: BTreeMap<PlanarTree, Rational> = BTreeMap::new();
    if f.max_degree >= 1 {
        v.insert(PlanarTree::leaf(), c1.recip());
    }
    for degree in 2..=f.max_degree {
        for tree in reduced_trees(degree)? {
            if tree.root_arity() != 2 {
                continue;
            }
            let left = match v.get(&tree.children()[0]) {
                Some(value) => value.clone(),
                None => continue,
            };
            let right = f.coeff(&tree.children()[1]);
            if !right.is_zero() {
                v.insert(tree, -(left * right) / c1);
            }
        }
    }
    TreeSeries::from_coeffs(f.max_degree, v)
}

/// Verifies a solution of `g = x·f(g)` compositionally: substituting `g`
/// into the quotient `v` of `x` by `f` must give back the bare `x` series,
/// because `φ_g(v)·f(g) = φ_g(v·f) = g = x·f(g)` and right multiplication
/// by a series with nonzero constant term is injective. Requires an
/// invertible `f`.
pub fn compositional_check(f: &TreeSeries, g: &TreeSeries) -> Result<bool, SeriesError> {
    f.check_same_degree(g)?;
    let quotient = x_quotient(f)?;
    if f.max_degree == 0 {
        return Ok(g.is_zero());
    }
    Ok(quotient.substitute(g)? == TreeSeries::x(f.max_degree)?)
}

/// One-variable Lagrange inversion: the coefficients of the solution `G`
/// of `G = t·F(G)` up to degree `bound`, from the coefficients of `F`
/// (index = power, missing entries zero). Entry `n` of the result is
/// `[t^n] G = (1/n)·[u^(n-1)] F(u)^n`; entry `0` is zero.
pub fn classical_lagrange(f: &[Rational], bound: usize) -> Result<Vec<Rational>, SeriesError> {
    if bound == 0 {
        return Err(SeriesError::ZeroDegreeBound);
    }
    // Polynomials as coefficient vectors truncated past u^(bound-1).
    let width = bound;
    let mut f_poly = vec![Rational::zero(); width];
    for (i, value) in f.iter().enumerate().take(width) {
        f_poly[i] = value.clone();
    }
    let mut power = vec![Rational::zero(); width];
    power[0] = Rational::one();
    let mut result = vec![Rational::zero(); bound + 1];
    for n in 1..=bound {
        let mut next = vec![Rational::zero(); width];
        for (i, a) in power.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in f_poly.iter().enumerate().take(width - i) {
                if !b.is_zero() {
                    next[i + j] += a * b;
                }
            }
        }
        power = next;
        result[n] = power[n - 1].clone() / Rational::from(BigInt::from(n as i64));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_tree;

    fn t(s: &str) -> PlanarTree {
        parse_tree(s).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ri(n: i64) -> Rational {
        Rational::from(BigInt::from(n))
    }

    /// 1 + x + x², the running example.
    fn one_x_xx(max_degree: usize) -> TreeSeries {
        TreeSeries::from_coeffs(
            max_degree,
            [
                (PlanarTree::Empty, ri(1)),
                (t("x"), ri(1)),
                (t("(x x)"), ri(1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn key_validation() {
        assert!(matches!(
            TreeSeries::monomial(6, t("(x (x) x)"), ri(1)),
            Err(SeriesError::NotReduced { .. })
        ));
        assert!(matches!(
            TreeSeries::monomial(2, t("(x x x)"), ri(1)),
            Err(SeriesError::KeyTooLarge { .. })
        ));
        assert!(matches!(
            TreeSeries::x(0),
            Err(SeriesError::KeyTooLarge { .. })
        ));
        // Accumulation drops keys that cancel.
        let s = TreeSeries::from_coeffs(4, [(t("x"), ri(2)), (t("x"), ri(-2))]).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn order_and_degree_bookkeeping() {
        assert_eq!(TreeSeries::zero(4).order(), Order::Infinite);
        assert_eq!(TreeSeries::one(4).order(), Order::Finite(0));
        assert_eq!(TreeSeries::x(4).unwrap().order(), Order::Finite(1));
        assert!(Order::Finite(3) < Order::Infinite);
        assert!(Order::Finite(0) < Order::Finite(1));
        let sum = TreeSeries::one(4).add(&TreeSeries::x(4).unwrap()).unwrap();
        assert_eq!(sum.order(), Order::Finite(0));
        assert_eq!(
            TreeSeries::one(4).add(&TreeSeries::one(5)),
            Err(SeriesError::DegreeMismatch { left: 4, right: 5 })
        );
    }

    #[test]
    fn mul_squares_one_plus_x() {
        let f = TreeSeries::one(4).add(&TreeSeries::x(4).unwrap()).unwrap();
        let sq = f.mul(&f).unwrap();
        assert_eq!(sq.coeff(&PlanarTree::Empty), ri(1));
        assert_eq!(sq.coeff(&t("x")), ri(2));
        assert_eq!(sq.coeff(&t("(x x)")), ri(1));
        assert_eq!(sq.iter().count(), 3);
    }

    #[test]
    fn mul_truncates_and_has_unit() {
        let x = TreeSeries::x(1).unwrap();
        assert!(x.mul(&x).unwrap().is_zero());
        let f = one_x_xx(3);
        assert_eq!(f.mul(&TreeSeries::one(3)).unwrap(), f);
        assert_eq!(TreeSeries::one(3).mul(&f).unwrap(), f);
    }

    #[test]
    fn mul_coefficient_matches_factorization_formula() {
        // c_U(f·h) = c_1(f)c_U(h) + c_U(f)c_1(h) + c_{U_1}(f)c_{U_2}(h),
        // the last term only when the root of U has arity two. Checked
        // against the convolution for dense f, h on all monomials.
        let max_degree = 3;
        let mut keys = vec![PlanarTree::Empty];
        for d in 1..=max_degree {
            keys.extend(reduced_trees(d).unwrap());
        }
        let f = TreeSeries::from_coeffs(
            max_degree,
            keys.iter()
                .enumerate()
                .map(|(i, k)| (k.clone(), ri(2 * i as i64 + 1))),
        )
        .unwrap();
        let h = TreeSeries::from_coeffs(
            max_degree,
            keys.iter()
                .enumerate()
                .map(|(i, k)| (k.clone(), ri(3 * i as i64 - 4))),
        )
        .unwrap();
        let product = f.mul(&h).unwrap();
        for u in &keys {
            let expected = if u.is_empty() {
                f.coeff(u) * h.coeff(u)
            } else {
                let mut v = f.coeff(&PlanarTree::Empty) * h.coeff(u)
                    + f.coeff(u) * h.coeff(&PlanarTree::Empty);
                if u.root_arity() == 2 {
                    v += f.coeff(&u.children()[0]) * h.coeff(&u.children()[1]);
                }
                v
            };
            assert_eq!(product.coeff(u), expected, "coefficient of {u}");
        }
    }

    #[test]
    fn reciprocal_of_one_plus_x() {
        let f = TreeSeries::one(3).add(&TreeSeries::x(3).unwrap()).unwrap();
        let gamma = f.reciprocal().unwrap();
        assert_eq!(gamma.coeff(&PlanarTree::Empty), ri(1));
        assert_eq!(gamma.coeff(&t("x")), ri(-1));
        assert_eq!(gamma.coeff(&t("(x x)")), ri(1));
        assert_eq!(gamma.coeff(&t("(x (x x))")), ri(-1));
        assert_eq!(gamma.coeff(&t("((x x) x)")), ri(0));
        assert_eq!(gamma.coeff(&t("(x x x)")), ri(0));
        assert_eq!(f.mul(&gamma).unwrap(), TreeSeries::one(3));
    }

    #[test]
    fn reciprocal_needs_constant_term() {
        assert_eq!(
            TreeSeries::x(3).unwrap().reciprocal(),
            Err(SeriesError::NotInvertible)
        );
    }

    #[test]
    fn graft_product_basics() {
        let x = TreeSeries::x(4).unwrap();
        let xx = graft_product(&[&x, &x]).unwrap();
        assert_eq!(xx.coeff(&t("(x x)")), ri(1));
        assert_eq!(xx.iter().count(), 1);
        let xxx = graft_product(&[&x, &x, &x]).unwrap();
        assert_eq!(xxx.coeff(&t("(x x x)")), ri(1));
        assert_eq!(
            graft_product(&[&x]),
            Err(SeriesError::TooFewFactors { got: 1 })
        );
        assert_eq!(
            graft_product(&[&x, &TreeSeries::one(4)]),
            Err(SeriesError::OrderTooSmall)
        );
    }

    #[test]
    fn substitution_is_unital_and_respects_grafts() {
        let g = TreeSeries::x(4)
            .unwrap()
            .add(&TreeSeries::monomial(4, t("(x x)"), ri(1)).unwrap())
            .unwrap();
        assert_eq!(TreeSeries::one(4).substitute(&g).unwrap(), TreeSeries::one(4));
        assert_eq!(TreeSeries::x(4).unwrap().substitute(&g).unwrap(), g);
        // x² ↦ g·g.
        let sq = TreeSeries::monomial(4, t("(x x)"), ri(1)).unwrap();
        assert_eq!(sq.substitute(&g).unwrap(), graft_product(&[&g, &g]).unwrap());
        assert_eq!(
            one_x_xx(4).substitute(&TreeSeries::one(4)),
            Err(SeriesError::OrderTooSmall)
        );
    }

    /// Independent closed forms for the low-degree solution coefficients,
    /// written directly in the coefficients of f.
    fn closed_forms(f: &TreeSeries) -> Vec<(PlanarTree, Rational)> {
        let a = |s: &str| f.coeff(&t(s));
        vec![
            (t("x"), a("1")),
            (t("(x x)"), a("1") * a("x")),
            (
                t("(x (x x))"),
                a("1") * a("x") * a("x") + a("1") * a("1") * a("(x x)"),
            ),
            (t("(x (x x x))"), a("1") * a("1") * a("1") * a("(x x x)")),
            (
                t("(x (x (x x)))"),
                a("1") * a("x") * a("x") * a("x")
                    + ri(2) * a("1") * a("1") * a("x") * a("(x x)")
                    + a("1") * a("1") * a("1") * a("(x (x x))"),
            ),
        ]
    }

    #[test]
    fn solvers_match_closed_forms() {
        let f = TreeSeries::from_coeffs(
            4,
            [
                (PlanarTree::Empty, ri(2)),
                (t("x"), ri(3)),
                (t("(x x)"), ri(5)),
                (t("(x (x x))"), ri(7)),
                (t("((x x) x)"), ri(11)),
                (t("(x x x)"), ri(13)),
            ],
        )
        .unwrap();
        let by_recurrence = solve_inversion_recurrence(&f).unwrap();
        let by_gamma = solve_inversion_gamma(&f).unwrap();
        let by_iterate = solve_inversion_iterate(&f).unwrap();
        assert_eq!(by_recurrence, by_gamma);
        assert_eq!(by_recurrence, by_iterate);
        for (tree, expected) in closed_forms(&f) {
            assert_eq!(by_recurrence.coeff(&tree), expected, "coefficient of {tree}");
        }
        // Non-right-sided monomials never appear.
        assert!(by_recurrence
            .iter()
            .all(|(tree, _)| tree.is_right_sided()));
    }

    #[test]
    fn solution_satisfies_fixed_point_and_compositional_check() {
        let f = one_x_xx(5);
        let g = solve_inversion_recurrence(&f).unwrap();
        let x = TreeSeries::x(5).unwrap();
        assert_eq!(g, x.mul(&f.substitute(&g).unwrap()).unwrap());
        assert!(compositional_check(&f, &g).unwrap());
        // A corrupted solution fails the check.
        let bad = g
            .add(&TreeSeries::monomial(5, t("(x (x x))"), ri(1)).unwrap())
            .unwrap();
        assert!(!compositional_check(&f, &bad).unwrap());
    }

    #[test]
    fn x_quotient_divides_on_the_right() {
        let x = TreeSeries::x(5).unwrap();
        for f in [
            one_x_xx(5),
            TreeSeries::one(5).add(&TreeSeries::x(5).unwrap()).unwrap(),
        ] {
            let v = x_quotient(&f).unwrap();
            assert_eq!(v.mul(&f).unwrap(), x);
            // The product is not associative: multiplying the reciprocal by
            // x on the left gives a different series from degree 3 on, and
            // that series does not divide f back to x.
            let naive = x.mul(&f.reciprocal().unwrap()).unwrap();
            assert_ne!(naive, v);
            assert_ne!(naive.mul(&f).unwrap(), x);
        }
        assert_eq!(x_quotient(&TreeSeries::x(5).unwrap()), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn abelianized_solution_matches_classical_lagrange() {
        // f = 1 + x + x² abelianizes to F = 1 + u + u²; the solutions of
        // g = x·f(g) and G = t·F(G) must abelianize alike.
        let f = one_x_xx(6);
        let g = solve_inversion_gamma(&f).unwrap();
        let f_abelian = f.abelianize();
        let classical = classical_lagrange(&f_abelian, 6).unwrap();
        assert_eq!(g.abelianize(), classical);
        // Schroeder-like growth for this f: 1, 1, 2, 5, 14, 42 would be
        // Catalan for all-ones F; here F = 1+u+u² gives the Motzkin-style
        // count 1, 1, 2, 4, 9, 21.
        let values: Vec<i64> = classical[1..]
            .iter()
            .map(|v| {
                assert!(v.is_integer());
                i64::try_from(v.numer()).unwrap()
            })
            .collect();
        assert_eq!(values, vec![1, 1, 2, 4, 9, 21]);
    }

    #[test]
    fn classical_lagrange_examples() {
        let ones: Vec<Rational> = (0..6).map(|_| ri(1)).collect();
        let catalan = classical_lagrange(&ones, 5).unwrap();
        assert_eq!(
            catalan,
            vec![ri(0), ri(1), ri(1), ri(2), ri(5), ri(14)]
        );
        // F = 1 + u²: only odd powers survive.
        let f = vec![ri(1), ri(0), ri(1)];
        let g = classical_lagrange(&f, 7).unwrap();
        assert_eq!(
            g,
            vec![ri(0), ri(1), ri(0), ri(1), ri(0), ri(2), ri(0), ri(5)]
        );
        assert_eq!(
            classical_lagrange(&ones, 0),
            Err(SeriesError::ZeroDegreeBound)
        );
    }

    #[test]
    fn all_ones_solution_sums() {
        // With every coefficient of f equal to one, the degree sums of the
        // solution count right-sided trees weighted by their
        // decompositions: 1, 1, 2, 7 in degrees 1 to 4.
        let mut entries = vec![(PlanarTree::Empty, ri(1))];
        for d in 1..=4 {
            for tree in reduced_trees(d).unwrap() {
                entries.push((tree, ri(1)));
            }
        }
        let f = TreeSeries::from_coeffs(4, entries).unwrap();
        let g = solve_inversion_iterate(&f).unwrap();
        let sums = g.abelianize();
        assert_eq!(sums[1..], [ri(1), ri(1), ri(2), ri(7)]);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let f = TreeSeries::from_coeffs(
            4,
            [
                (PlanarTree::Empty, ri(1)),
                (t("x"), r(-3, 7)),
                (t("(x (x x))"), r(22, 9)),
            ],
        )
        .unwrap();
        let text = f.to_json();
        let back = TreeSeries::from_json(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_json(), text);

        assert!(matches!(
            TreeSeries::from_json("{\"max_degree\": 2}"),
            Err(SeriesError::Json(_))
        ));
        assert!(matches!(
            TreeSeries::from_json(
                "{\"max_degree\": 2, \"coefficients\": [], \"extra\": 1}"
            ),
            Err(SeriesError::Json(_))
        ));
        assert!(matches!(
            TreeSeries::from_json(
                "{\"max_degree\": 2, \"coefficients\": [{\"tree\": \"(x\", \"value\": \"1\"}]}"
            ),
            Err(SeriesError::Tree(_))
        ));
        assert!(matches!(
            TreeSeries::from_json(
                "{\"max_degree\": 2, \"coefficients\": [{\"tree\": \"x\", \"value\": \"1/0\"}]}"
            ),
            Err(SeriesError::Json(_))
        ));
    }
}
