//! Runtime self-checks: each suite re-validates a family of library
//! invariants at a configurable size and reports one outcome per check.
//!
//! The checks mirror the unit-test oracles (independent counting
//! recurrences, exhaustive small-case enumeration, seeded random series)
//! so a packaged binary can re-establish the library's claims without the
//! test harness. All randomness is seeded and reproducible.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flags::{
    decomposition_to_flag, encode_flag, decode_flag, enumerate_decompositions, enumerate_flags,
    flag_to_decomposition, Decomposition,
};
use crate::luk::{encode_pt, decode_pt, format_tree_word, NatLetter, TreeLetter, Word};
use crate::series::{
    classical_lagrange, compositional_check, solve_inversion_gamma, solve_inversion_iterate,
    solve_inversion_recurrence, Rational, TreeSeries,
};
use crate::tree::{
    enumerate_prt_with_cap, enumerate_pt_with_cap, enumerate_right_sided_with_cap, parse_tree,
    PlanarTree, Position,
};

/// Result of one verification check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> CheckOutcome {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Which family of invariants to re-validate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifySuite {
    All,
    /// Lukasiewicz language: prefix code, factorization, tree codec, height.
    Luk,
    /// Enumeration counts, flag codec, flag-decomposition correspondence.
    Bijections,
    /// Series arithmetic and the three inversion solvers.
    Inversion,
}

/// Runs a suite at the given size; `max_degree` bounds tree degrees and
/// series truncation, `seed` drives the randomized series checks.
pub fn run_verify(suite: VerifySuite, max_degree: usize, seed: u64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    if matches!(suite, VerifySuite::All | VerifySuite::Luk) {
        luk_checks(&mut out, max_degree);
    }
    if matches!(suite, VerifySuite::All | VerifySuite::Bijections) {
        bijection_checks(&mut out, max_degree);
    }
    if matches!(suite, VerifySuite::All | VerifySuite::Inversion) {
        inversion_checks(&mut out, max_degree, seed);
    }
    out
}

fn nat_word(letters: &[usize]) -> Word<NatLetter> {
    Word::new(letters.iter().map(|&n| NatLetter(n)).collect())
}

/// All words over the alphabet `{0..=max_letter}` of length `1..=max_len`
/// that are Lukasiewicz words.
fn small_luk_words(max_letter: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut found = Vec::new();
    let mut current = Vec::new();
    fn step(
        current: &mut Vec<usize>,
        max_letter: usize,
        max_len: usize,
        found: &mut Vec<Vec<usize>>,
    ) {
        if !current.is_empty() && nat_word(current).is_luk() {
            found.push(current.clone());
            // A prefix code: no extension of a member is a member, but
            // extensions are still enumerated to let the check see them.
        }
        if current.len() == max_len {
            return;
        }
        for letter in 0..=max_letter {
            current.push(letter);
            step(current, max_letter, max_len, found);
            current.pop();
        }
    }
    step(&mut current, max_letter, max_len, &mut found);
    found
}

fn luk_checks(out: &mut Vec<CheckOutcome>, max_degree: usize) {
    let max_len = (max_degree + 1).min(7);

    // Sorted adjacent-pair prefix test: any word lexically between u and an
    // extension of u also extends u, so neighbors suffice.
    {
        let mut words = small_luk_words(4, max_len);
        words.sort();
        let violations = words
            .windows(2)
            .filter(|pair| pair[1].starts_with(&pair[0]))
            .count();
        out.push(CheckOutcome::new(
            "luk-prefix-code",
            violations == 0,
            format!(
                "{} words over letters 0..=4, length <= {max_len}, {violations} prefix violations",
                words.len()
            ),
        ));
    }

    // Every product of Lukasiewicz words factors back uniquely; the weight
    // criterion and the greedy factorization must agree word by word.
    {
        let mut checked = 0usize;
        let mut products = 0usize;
        let mut failures = 0usize;
        let mut current: Vec<usize> = Vec::new();
        fn walk(
            current: &mut Vec<usize>,
            max_len: usize,
            checked: &mut usize,
            products: &mut usize,
            failures: &mut usize,
        ) {
            if !current.is_empty() {
                *checked += 1;
                let word = nat_word(current);
                match (word.is_product_of_luk(), word.factor()) {
                    (Some(r), Ok(parts)) => {
                        *products += 1;
                        let glued: Vec<usize> =
                            parts.iter().flat_map(|p| p.letters()).map(|l| l.0).collect();
                        if parts.len() != r
                            || !parts.iter().all(|p| p.is_luk())
                            || glued != *current
                        {
                            *failures += 1;
                        }
                    }
                    (None, Err(_)) => {}
                    _ => *failures += 1,
                }
            }
            if current.len() == max_len {
                return;
            }
            for letter in 0..=3 {
                current.push(letter);
                walk(current, max_len, checked, products, failures);
                current.pop();
            }
        }
        walk(&mut current, max_len, &mut checked, &mut products, &mut failures);
        out.push(CheckOutcome::new(
            "luk-unique-factorization",
            failures == 0,
            format!("{checked} words scanned, {products} products refactored, {failures} failures"),
        ));
    }

    // Tree codec: encode is injective on trees of each size, round-trips,
    // and hits exactly the Catalan count of Lukasiewicz words per length.
    {
        let max_vertices = (max_degree + 2).min(8);
        let mut failures = 0usize;
        let mut total = 0usize;
        for n in 1..=max_vertices {
            let trees = match enumerate_pt_with_cap(n, usize::MAX) {
                Ok(ts) => ts,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
            for tree in &trees {
                total += 1;
                let word = match encode_pt(tree) {
                    Ok(w) => w,
                    Err(_) => {
                        failures += 1;
                        continue;
                    }
                };
                let raw: Vec<usize> = word.letters().iter().map(|l| l.0).collect();
                if word.len() != n
                    || !word.is_luk()
                    || decode_pt(&word) != Ok(tree.clone())
                    || !seen.insert(raw)
                {
                    failures += 1;
                }
            }
            if seen.len() != catalan(n - 1) {
                failures += 1;
            }
        }
        out.push(CheckOutcome::new(
            "luk-tree-codec",
            failures == 0,
            format!("{total} trees up to {max_vertices} vertices, {failures} failures"),
        ));
    }

    // Word height equals the largest root-to-leaf distance of the tree.
    {
        let max_vertices = (max_degree + 2).min(8);
        let mut failures = 0usize;
        let mut total = 0usize;
        for n in 1..=max_vertices {
            for tree in enumerate_pt_with_cap(n, usize::MAX).unwrap_or_default() {
                total += 1;
                let depth = tree
                    .leaf_positions()
                    .iter()
                    .map(Position::depth)
                    .max()
                    .unwrap_or(0);
                let height = encode_pt(&tree).ok().and_then(|w| w.height().ok());
                if height != Some(depth) {
                    failures += 1;
                }
            }
        }
        out.push(CheckOutcome::new(
            "luk-height",
            failures == 0,
            format!("{total} trees checked, {failures} failures"),
        ));
    }

    // Worked fixture: the eight-letter word encodes the three-branch tree
    // of height three; the seven-letter variant sometimes quoted for it
    // has weight zero and is not a Lukasiewicz word.
    {
        let word = nat_word(&[3, 0, 1, 2, 0, 0, 1, 0]);
        let tree = parse_tree("(x ((x x)) (x))").expect("fixture parses");
        let variant = nat_word(&[3, 0, 1, 2, 0, 1, 0]);
        let ok = word.is_luk()
            && decode_pt(&word) == Ok(tree.clone())
            && encode_pt(&tree) == Ok(word.clone())
            && word.height() == Ok(3)
            && variant.delta() == 0
            && !variant.is_luk();
        out.push(CheckOutcome::new(
            "luk-figure-word",
            ok,
            "8-letter word round-trips at height 3; 7-letter variant rejected".to_string(),
        ));
    }
}

/// Catalan numbers by the convolution recurrence.
fn catalan(n: usize) -> usize {
    let mut c = vec![0usize; n + 1];
    c[0] = 1;
    for m in 1..=n {
        c[m] = (0..m).map(|i| c[i] * c[m - 1 - i]).sum();
    }
    c[n]
}

/// Super-Catalan numbers `s_1..=s_n` by the three-term recurrence
/// `(m+1)s_{m+1} = 3(2m-1)s_m - (m-2)s_{m-1}`.
fn super_catalan(n: usize) -> Vec<i128> {
    let mut s = vec![0i128; n + 1];
    if n >= 1 {
        s[1] = 1;
    }
    if n >= 2 {
        s[2] = 1;
    }
    for m in 2..n {
        let numer = 3 * (2 * m as i128 - 1) * s[m] - (m as i128 - 2) * s[m - 1];
        debug_assert_eq!(numer % (m as i128 + 1), 0);
        s[m + 1] = numer / (m as i128 + 1);
    }
    s[1..].to_vec()
}

/// Lukasiewicz words over the tree alphabet (reduced trees and the empty
/// tree) of the exact length, smallest lengths first in the cache.
fn luk_tree_words(length: usize, cache: &mut BTreeMap<usize, Vec<Word<TreeLetter>>>) -> Vec<Word<TreeLetter>> {
    if let Some(done) = cache.get(&length) {
        return done.clone();
    }
    let mut words = Vec::new();
    if length == 1 {
        words.push(Word::new(vec![TreeLetter(PlanarTree::Empty)]));
    } else {
        for head_degree in 1..length {
            let heads = enumerate_prt_with_cap(head_degree, usize::MAX).expect("uncapped");
            let mut part_sets: Vec<Vec<Vec<Word<TreeLetter>>>> = Vec::new();
            compositions(length - 1, head_degree, &mut Vec::new(), &mut |parts| {
                let choice: Vec<Vec<Word<TreeLetter>>> =
                    parts.iter().map(|&p| luk_tree_words(p, cache)).collect();
                part_sets.push(choice);
            });
            for head in heads {
                for choice in &part_sets {
                    let mut stems: Vec<Vec<Word<TreeLetter>>> = vec![Vec::new()];
                    for options in choice {
                        let mut next = Vec::with_capacity(stems.len() * options.len());
                        for stem in &stems {
                            for option in options {
                                let mut extended = stem.clone();
                                extended.push(option.clone());
                                next.push(extended);
                            }
                        }
                        stems = next;
                    }
                    for parts in stems {
                        let mut letters = vec![TreeLetter(head.clone())];
                        for part in &parts {
                            letters.extend(part.letters().iter().cloned());
                        }
                        words.push(Word::new(letters));
                    }
                }
            }
        }
    }
    cache.insert(length, words.clone());
    words
}

/// Ordered compositions of `total` into `parts` positive summands.
fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if parts == 1 {
        if total >= 1 {
            prefix.push(total);
            emit(prefix);
            prefix.pop();
        }
        return;
    }
    for first in 1..=total.saturating_sub(parts - 1) {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, emit);
        prefix.pop();
    }
}

/// Rebuilds the host of a decomposition from the shapes of its pieces.
fn glue_decomposition(d: &Decomposition) -> Option<PlanarTree> {
    let host_leaves: BTreeSet<Position> = d.host().leaf_positions().into_iter().collect();
    let by_root: BTreeMap<&Position, &crate::subtree::SubtreeSelection> = d
        .pieces()
        .iter()
        .filter(|p| p.len() > 1)
        .map(|p| (p.root_pos(), p))
        .collect();
    fn build(
        at: &Position,
        by_root: &BTreeMap<&Position, &crate::subtree::SubtreeSelection>,
        host_leaves: &BTreeSet<Position>,
    ) -> Option<PlanarTree> {
        let piece = by_root.get(at)?;
        let shape = piece.shape();
        let mut replacements = Vec::new();
        for leaf in piece.leaves() {
            if host_leaves.contains(&leaf) {
                replacements.push(PlanarTree::leaf());
            } else {
                replacements.push(build(&leaf, by_root, host_leaves)?);
            }
        }
        shape.replace_leaves(&replacements).ok()
    }
    if d.host().is_leaf() {
        return Some(PlanarTree::leaf());
    }
    build(&Position::root(), &by_root, &host_leaves)
}

fn bijection_checks(out: &mut Vec<CheckOutcome>, max_degree: usize) {
    // Enumeration counts against the independent recurrences.
    {
        let mut failures = 0usize;
        let max_vertices = (max_degree + 2).min(8);
        for n in 1..=max_vertices {
            match enumerate_pt_with_cap(n, usize::MAX) {
                Ok(trees) if trees.len() == catalan(n - 1) => {}
                _ => failures += 1,
            }
        }
        let max_deg = max_degree.min(7).max(1);
        let schroeder = super_catalan(max_deg);
        for d in 1..=max_deg {
            match enumerate_prt_with_cap(d, usize::MAX) {
                Ok(trees) if trees.len() as i128 == schroeder[d - 1] => {}
                _ => failures += 1,
            }
            let expected_rs = if d == 1 { 1 } else { schroeder[d - 2] };
            match enumerate_right_sided_with_cap(d, usize::MAX) {
                Ok(trees) if trees.len() as i128 == expected_rs => {}
                _ => failures += 1,
            }
        }
        out.push(CheckOutcome::new(
            "tree-counts",
            failures == 0,
            format!(
                "planar counts to {max_vertices} vertices, reduced and right-sided to degree {max_deg}, {failures} mismatches"
            ),
        ));
    }

    let flag_deg = max_degree.min(6).max(1);
    let hosts: Vec<PlanarTree> = (1..=flag_deg)
        .filter_map(|d| enumerate_right_sided_with_cap(d, usize::MAX).ok())
        .flatten()
        .collect();

    // Flag codec: every flag encodes to a Lukasiewicz word of the host's
    // degree and decodes back; words are globally distinct across hosts.
    {
        let mut failures = 0usize;
        let mut words: BTreeSet<String> = BTreeSet::new();
        let mut flags = 0usize;
        for host in &hosts {
            for flag in enumerate_flags(host).unwrap_or_default() {
                flags += 1;
                match encode_flag(&flag) {
                    Ok(word) => {
                        let ok = word.is_luk()
                            && word.len() == host.degree()
                            && decode_flag(&word).as_ref() == Ok(&flag)
                            && words.insert(format_tree_word(&word));
                        if !ok {
                            failures += 1;
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
        }
        out.push(CheckOutcome::new(
            "flag-codec",
            failures == 0,
            format!("{flags} flags on hosts of degree <= {flag_deg}, {failures} failures"),
        ));

        // Surjectivity: the encoded words are exactly the Lukasiewicz
        // words over the tree alphabet of each length.
        let mut cache = BTreeMap::new();
        let mut expected: BTreeSet<String> = BTreeSet::new();
        for len in 1..=flag_deg {
            for word in luk_tree_words(len, &mut cache) {
                expected.insert(format_tree_word(&word));
            }
        }
        out.push(CheckOutcome::new(
            "flag-word-surjectivity",
            words == expected,
            format!(
                "{} encoded words vs {} enumerated words of length <= {flag_deg}",
                words.len(),
                expected.len()
            ),
        ));
    }

    // Flags and decompositions correspond one to one on every host.
    {
        let mut failures = 0usize;
        let mut pairs = 0usize;
        for host in &hosts {
            let flags = enumerate_flags(host).unwrap_or_default();
            let decomps = enumerate_decompositions(host).unwrap_or_default();
            if flags.len() != decomps.len() {
                failures += 1;
                continue;
            }
            let mut seen: BTreeSet<Vec<Vec<String>>> = BTreeSet::new();
            for flag in &flags {
                pairs += 1;
                match flag_to_decomposition(flag) {
                    Ok(q) => {
                        let ok = decomps.contains(&q)
                            && decomposition_to_flag(&q).as_ref() == Ok(flag)
                            && seen.insert(q.piece_position_strings());
                        if !ok {
                            failures += 1;
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
        }
        out.push(CheckOutcome::new(
            "flag-decomposition-bijection",
            failures == 0,
            format!("{pairs} flag-decomposition pairs, {failures} failures"),
        ));
    }

    // Every decomposition's pieces glue back to the host tree.
    {
        let mut failures = 0usize;
        let mut total = 0usize;
        for host in &hosts {
            for q in enumerate_decompositions(host).unwrap_or_default() {
                total += 1;
                if glue_decomposition(&q).as_ref() != Some(host) {
                    failures += 1;
                }
            }
        }
        out.push(CheckOutcome::new(
            "decomposition-gluing",
            failures == 0,
            format!("{total} decompositions reassembled, {failures} failures"),
        ));
    }

    // Named count fixtures plus the degree sums against the classical
    // formula applied to the super-Catalan generating function.
    {
        let fixtures = [
            ("(x x)", 1usize),
            ("(x (x x))", 2),
            ("(x (x x x))", 1),
            ("(x (x (x x)))", 4),
        ];
        let mut failures = 0usize;
        for (literal, expected) in fixtures {
            let host = parse_tree(literal).expect("fixture parses");
            let flags = enumerate_flags(&host).map(|fs| fs.len());
            let decomps = enumerate_decompositions(&host).map(|qs| qs.len());
            if flags != Ok(expected) || decomps != Ok(expected) {
                failures += 1;
            }
        }
        let mut by_degree = vec![0i64; flag_deg + 1];
        for host in &hosts {
            by_degree[host.degree()] +=
                enumerate_flags(host).map(|fs| fs.len()).unwrap_or(0) as i64;
        }
        let f_abelian: Vec<Rational> = std::iter::once(Rational::one())
            .chain(
                super_catalan(flag_deg.max(1))
                    .iter()
                    .map(|&s| Rational::from(BigInt::from(s))),
            )
            .collect();
        match classical_lagrange(&f_abelian, flag_deg) {
            Ok(classical) => {
                for d in 1..=flag_deg {
                    if classical[d] != Rational::from(BigInt::from(by_degree[d])) {
                        failures += 1;
                    }
                }
            }
            Err(_) => failures += 1,
        }
        out.push(CheckOutcome::new(
            "flag-count-oracle",
            failures == 0,
            format!(
                "fixture counts 1, 2, 1, 4 and degree sums {:?} against the classical formula",
                &by_degree[1..]
            ),
        ));
    }
}

fn rand_rational(rng: &mut ChaCha8Rng) -> Rational {
    let numer = rng.gen_range(-9i64..=9);
    let denom = rng.gen_range(1i64..=9);
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// A random series supported on all monomials of degree at most
/// `support_degree`, with numerators in [-9, 9] and denominators in [1, 9].
pub fn random_series(
    rng: &mut ChaCha8Rng,
    max_degree: usize,
    support_degree: usize,
    force_invertible: bool,
) -> TreeSeries {
    let mut entries = vec![(PlanarTree::Empty, rand_rational(rng))];
    if force_invertible {
        let numer = rng.gen_range(1i64..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let denom = rng.gen_range(1i64..=9);
        entries[0].1 = Rational::new(BigInt::from(numer), BigInt::from(denom));
    }
    for d in 1..=support_degree.min(max_degree) {
        for tree in enumerate_prt_with_cap(d, usize::MAX).expect("uncapped") {
            entries.push((tree, rand_rational(rng)));
        }
    }
    TreeSeries::from_coeffs(max_degree, entries).expect("keys in range")
}

/// The five low-degree closed forms for the solution coefficients, as
/// `(tree, value)` pairs computed directly from the coefficients of `f`.
pub fn closed_form_coefficients(f: &TreeSeries) -> Vec<(PlanarTree, Rational)> {
    let a = |s: &str| f.coeff(&parse_tree(s).expect("closed-form key"));
    vec![
        (parse_tree("x").unwrap(), a("1")),
        (parse_tree("(x x)").unwrap(), a("1") * a("x")),
        (
            parse_tree("(x (x x))").unwrap(),
            a("1") * a("x") * a("x") + a("1") * a("1") * a("(x x)"),
        ),
        (
            parse_tree("(x (x x x))").unwrap(),
            a("1") * a("1") * a("1") * a("(x x x)"),
        ),
        (
            parse_tree("(x (x (x x)))").unwrap(),
            a("1") * a("x") * a("x") * a("x")
                + Rational::from(BigInt::from(2)) * a("1") * a("1") * a("x") * a("(x x)")
                + a("1") * a("1") * a("1") * a("(x (x x))"),
        ),
    ]
}

fn inversion_checks(out: &mut Vec<CheckOutcome>, max_degree: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_degree = max_degree.max(1);
    let support = max_degree.min(4);

    // The three solvers agree coefficient for coefficient, and the common
    // solution satisfies the defining fixed-point equation.
    {
        let mut agreement_failures = 0usize;
        let mut fixed_point_failures = 0usize;
        let trials = 5;
        for _ in 0..trials {
            let f = random_series(&mut rng, max_degree, support, false);
            let by_recurrence = solve_inversion_recurrence(&f);
            let by_gamma = solve_inversion_gamma(&f);
            let by_iterate = solve_inversion_iterate(&f);
            if by_recurrence != by_gamma || by_recurrence != by_iterate {
                agreement_failures += 1;
            }
            if let Ok(g) = &by_recurrence {
                let step = TreeSeries::x(max_degree)
                    .and_then(|x| Ok(x.mul(&f.substitute(g)?)?));
                if step.as_ref() != Ok(g) {
                    fixed_point_failures += 1;
                }
            } else {
                fixed_point_failures += 1;
            }
        }
        out.push(CheckOutcome::new(
            "inversion-triple-agreement",
            agreement_failures == 0,
            format!("{trials} random series at degree {max_degree}, {agreement_failures} disagreements"),
        ));
        out.push(CheckOutcome::new(
            "inversion-fixed-point",
            fixed_point_failures == 0,
            format!("{trials} random series at degree {max_degree}, {fixed_point_failures} failures"),
        ));
    }

    // Right reciprocal and the compositional verification of solutions.
    {
        let mut reciprocal_failures = 0usize;
        let mut compositional_failures = 0usize;
        let trials = 5;
        for _ in 0..trials {
            let f = random_series(&mut rng, max_degree, support.min(3), true);
            match f.reciprocal() {
                Ok(gamma) => {
                    if f.mul(&gamma) != Ok(TreeSeries::one(max_degree)) {
                        reciprocal_failures += 1;
                    }
                }
                Err(_) => reciprocal_failures += 1,
            }
            match solve_inversion_recurrence(&f) {
                Ok(g) => {
                    if compositional_check(&f, &g) != Ok(true) {
                        compositional_failures += 1;
                    }
                }
                Err(_) => compositional_failures += 1,
            }
        }
        out.push(CheckOutcome::new(
            "series-reciprocal",
            reciprocal_failures == 0,
            format!("{trials} invertible series, {reciprocal_failures} failures"),
        ));
        out.push(CheckOutcome::new(
            "inversion-compositional",
            compositional_failures == 0,
            format!("{trials} invertible series, {compositional_failures} failures"),
        ));
    }

    // Closed forms of the first five solution coefficients.
    {
        let mut failures = 0usize;
        let trials = 10;
        let degree = max_degree.max(4).min(5);
        for _ in 0..trials {
            let f = random_series(&mut rng, degree, 4, false);
            match solve_inversion_recurrence(&f) {
                Ok(g) => {
                    for (tree, expected) in closed_form_coefficients(&f) {
                        if tree.degree() <= degree && g.coeff(&tree) != expected {
                            failures += 1;
                        }
                    }
                }
                Err(_) => failures += 1,
            }
        }
        out.push(CheckOutcome::new(
            "inversion-closed-forms",
            failures == 0,
            format!("{trials} random series, five coefficients each, {failures} mismatches"),
        ));
    }

    // Abelianization sends the tree solution to the classical one.
    {
        let mut failures = 0usize;
        let trials = 5;
        for _ in 0..trials {
            let f = random_series(&mut rng, max_degree, support, false);
            let ok = match solve_inversion_gamma(&f) {
                Ok(g) => {
                    classical_lagrange(&f.abelianize(), max_degree) == Ok(g.abelianize())
                }
                Err(_) => false,
            };
            if !ok {
                failures += 1;
            }
        }
        out.push(CheckOutcome::new(
            "inversion-abelianized",
            failures == 0,
            format!("{trials} random series at degree {max_degree}, {failures} failures"),
        ));
    }

    // All-ones coefficients: the degree sums of the solution start
    // 1, 1, 2, 7 and keep matching the classical formula.
    {
        let degree = max_degree.min(5).max(1);
        let mut entries = vec![(PlanarTree::Empty, Rational::one())];
        for d in 1..=degree {
            for tree in enumerate_prt_with_cap(d, usize::MAX).expect("uncapped") {
                entries.push((tree, Rational::one()));
            }
        }
        let f = TreeSeries::from_coeffs(degree, entries).expect("keys in range");
        let g = solve_inversion_iterate(&f);
        let mut ok = g.is_ok();
        let mut sums_text = String::new();
        if let Ok(g) = &g {
            let sums = g.abelianize();
            let expected = [1i64, 1, 2, 7];
            for (d, want) in expected.iter().enumerate().take(degree).map(|(i, w)| (i + 1, w)) {
                if sums[d] != Rational::from(BigInt::from(*want)) {
                    ok = false;
                }
            }
            if classical_lagrange(&f.abelianize(), degree) != Ok(sums.clone()) {
                ok = false;
            }
            sums_text = sums[1..]
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ");
        }
        out.push(CheckOutcome::new(
            "inversion-all-ones",
            ok,
            format!("degree sums {sums_text} at degree {degree}"),
        ));
    }
}
