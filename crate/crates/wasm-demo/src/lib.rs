//! Browser demo bindings.
//!
//! The payload builders return JSON strings and inline SVG so the page
//! needs no framework and the functions can be tested on the host; the
//! `#[wasm_bindgen]` exports at the bottom only forward to them.

use std::collections::BTreeMap;

use serde_json::json;
use wasm_bindgen::prelude::*;

use planar_lagrange::flags::{encode_flag, enumerate_flags, flag_to_decomposition};
use planar_lagrange::luk::format_tree_word;
use planar_lagrange::series::{
    parse_rational, solve_inversion_gamma, solve_inversion_iterate, solve_inversion_recurrence,
    TreeSeries,
};
use planar_lagrange::tree::{
    enumerate_prt_with_cap, enumerate_pt_with_cap, enumerate_right_sided_with_cap, parse_tree,
    PlanarTree, Position,
};

/// Size cap for interactive enumeration; generous enough for every
/// interesting small case while keeping the page responsive.
const DEMO_CAP: usize = 8;

const MAX_INVERT_DEGREE: usize = 6;

/// Stage and piece colors, cycled when a flag has more stages.
const PALETTE: [&str; 6] = [
    "#4363d8", "#e6194b", "#3cb44b", "#f58231", "#911eb4", "#469990",
];

fn node_layout(t: &PlanarTree) -> BTreeMap<Position, (f64, usize)> {
    // Leaves take consecutive horizontal slots; internal vertices sit at
    // the midpoint of their children, one level per depth unit.
    let mut slots = BTreeMap::new();
    let mut next_leaf = 0usize;
    fn place(
        t: &PlanarTree,
        at: Position,
        depth: usize,
        next_leaf: &mut usize,
        slots: &mut BTreeMap<Position, (f64, usize)>,
    ) -> f64 {
        let node = t.subtree_at(&at).expect("position from the tree");
        let x = if node.is_leaf() {
            let x = *next_leaf as f64;
            *next_leaf += 1;
            x
        } else {
            let arity = node.root_arity();
            let mut first = 0.0;
            let mut last = 0.0;
            for i in 1..=arity {
                let child_x = place(t, at.child(i), depth + 1, next_leaf, slots);
                if i == 1 {
                    first = child_x;
                }
                last = child_x;
            }
            (first + last) / 2.0
        };
        slots.insert(at, (x, depth));
        x
    }
    if !matches!(t, PlanarTree::Empty) {
        place(t, Position::root(), 0, &mut next_leaf, &mut slots);
    }
    slots
}

/// Renders a tree as standalone SVG; `colors` assigns an optional fill
/// class index per vertex (missing = neutral).
fn tree_svg(t: &PlanarTree, colors: &BTreeMap<Position, usize>) -> String {
    if matches!(t, PlanarTree::Empty) {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"40\" height=\"40\" \
                viewBox=\"0 0 40 40\"><circle cx=\"20\" cy=\"20\" r=\"5\" fill=\"none\" \
                stroke=\"#888\" stroke-dasharray=\"2 2\"/></svg>"
            .to_string();
    }
    let layout = node_layout(t);
    let max_x = layout.values().map(|(x, _)| *x).fold(0.0, f64::max);
    let max_depth = layout.values().map(|(_, d)| *d).max().unwrap_or(0);
    let step_x = 34.0;
    let step_y = 40.0;
    let pad = 20.0;
    let width = max_x * step_x + 2.0 * pad;
    let height = max_depth as f64 * step_y + 2.0 * pad;
    let coord = |p: &Position| {
        let (x, d) = layout[p];
        (pad + x * step_x, pad + d as f64 * step_y)
    };
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    for p in t.positions() {
        let (x, y) = coord(&p);
        for i in 1..=t.arity_at(&p).expect("position from the tree") {
            let (cx, cy) = coord(&p.child(i));
            svg.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{y:.1}\" x2=\"{cx:.1}\" y2=\"{cy:.1}\" \
                 stroke=\"#999\" stroke-width=\"1.5\"/>"
            ));
        }
    }
    for p in t.positions() {
        let (x, y) = coord(&p);
        let fill = colors
            .get(&p)
            .map(|i| PALETTE[i % PALETTE.len()])
            .unwrap_or("#bbb");
        svg.push_str(&format!(
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"6\" fill=\"{fill}\" \
             stroke=\"#333\" stroke-width=\"1\"/>"
        ));
    }
    svg.push_str("</svg>");
    svg
}

/// Tree gallery: all trees of one kind and size, rendered as SVG.
pub fn trees_payload(kind: &str, size: usize) -> Result<String, String> {
    let trees = match kind {
        "pt" => enumerate_pt_with_cap(size, DEMO_CAP),
        "prt" => enumerate_prt_with_cap(size, DEMO_CAP),
        "right-sided" => enumerate_right_sided_with_cap(size, DEMO_CAP),
        other => return Err(format!("unknown kind {other:?}; use pt, prt, or right-sided")),
    }
    .map_err(|e| e.to_string())?;
    let items: Vec<serde_json::Value> = trees
        .iter()
        .map(|t| {
            json!({
                "literal": t.to_string(),
                "svg": tree_svg(t, &BTreeMap::new()),
            })
        })
        .collect();
    Ok(json!({ "count": items.len(), "items": items }).to_string())
}

/// Flag explorer: every flag of a right-sided tree with its codec word
/// and partner decomposition, plus SVGs colored by stage and by piece.
pub fn flags_payload(tree_literal: &str) -> Result<String, String> {
    let host = parse_tree(tree_literal.trim()).map_err(|e| e.to_string())?;
    if host.degree() > DEMO_CAP {
        return Err(format!("degree {} exceeds the demo cap {DEMO_CAP}", host.degree()));
    }
    let flags = enumerate_flags(&host).map_err(|e| e.to_string())?;
    let mut items = Vec::with_capacity(flags.len());
    for flag in &flags {
        let word = encode_flag(flag).map_err(|e| e.to_string())?;
        let partner = flag_to_decomposition(flag).map_err(|e| e.to_string())?;

        // Color each vertex by the first stage containing it.
        let mut stage_colors = BTreeMap::new();
        for (i, stage) in flag.stages().iter().enumerate() {
            for v in stage.vertices() {
                stage_colors.entry(v.clone()).or_insert(i);
            }
        }
        // Color each vertex by the first piece containing it; pieces may
        // share glue vertices, so first-wins keeps this deterministic.
        let mut piece_colors = BTreeMap::new();
        for (i, piece) in partner.pieces().iter().enumerate() {
            for v in piece.vertices() {
                piece_colors.entry(v.clone()).or_insert(i);
            }
        }
        items.push(json!({
            "stages": flag.to_string(),
            "word": format_tree_word(&word),
            "pieces": partner.to_string(),
            "flag_svg": tree_svg(&host, &stage_colors),
            "decomposition_svg": tree_svg(&host, &piece_colors),
        }));
    }
    Ok(json!({
        "host": host.to_string(),
        "count": items.len(),
        "items": items,
    })
    .to_string())
}

/// Inversion playground. `coefficients` is one `tree = value` pair per
/// line; the solution of g = x * f(g) is reported with all three solver
/// outputs cross-checked and the degree sums attached.
pub fn invert_payload(coefficients: &str, max_degree: usize) -> Result<String, String> {
    if max_degree == 0 || max_degree > MAX_INVERT_DEGREE {
        return Err(format!("max degree must be between 1 and {MAX_INVERT_DEGREE}"));
    }
    let mut entries = Vec::new();
    for line in coefficients.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (tree_text, value_text) = line
            .split_once('=')
            .ok_or_else(|| format!("expected `tree = value`, got {line:?}"))?;
        let tree = parse_tree(tree_text.trim()).map_err(|e| e.to_string())?;
        let value = parse_rational(value_text.trim())?;
        entries.push((tree, value));
    }
    let f = TreeSeries::from_coeffs(max_degree, entries).map_err(|e| e.to_string())?;
    let g = solve_inversion_recurrence(&f).map_err(|e| e.to_string())?;
    let agreed = solve_inversion_gamma(&f) == Ok(g.clone())
        && solve_inversion_iterate(&f) == Ok(g.clone());
    let fixed_point = TreeSeries::x(max_degree)
        .and_then(|x| Ok(x.mul(&f.substitute(&g)?)? == g))
        .unwrap_or(false);
    let coefficients: Vec<serde_json::Value> = g
        .iter()
        .map(|(tree, value)| {
            json!({
                "tree": tree.to_string(),
                "value": value.to_string(),
                "svg": tree_svg(tree, &BTreeMap::new()),
            })
        })
        .collect();
    let sums: Vec<String> = g.abelianize().iter().map(|v| v.to_string()).collect();
    Ok(json!({
        "max_degree": max_degree,
        "coefficients": coefficients,
        "degree_sums": sums,
        "solvers_agree": agreed,
        "fixed_point_holds": fixed_point,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn demo_trees(kind: &str, size: usize) -> Result<String, JsValue> {
    trees_payload(kind, size).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn demo_flags(tree_literal: &str) -> Result<String, JsValue> {
    flags_payload(tree_literal).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn demo_invert(coefficients: &str, max_degree: usize) -> Result<String, JsValue> {
    invert_payload(coefficients, max_degree).map_err(|e| JsValue::from_str(&e))
}
