//! Explicit gluing tables for the surfaces `Σ_{g,b}`.
//!
//! Closed surfaces come from the fan triangulation of the 4g-gon with word
//! `a_1 b_1 ā_1 b̄_1 ⋯`, all corners glued to one vertex. Boundary circles
//! are produced by triple blocks: three triangles spanning a strip between
//! two edges `L, R : B → T` that carry one boundary loop `h` at an inner
//! vertex, so that the signed block has boundary `R − L + h`.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{boundary, verify_relative_cycle, Chain, Model, ModelBuilder};
use crate::error::{Result, SvolError};
use crate::rational::rat;
use crate::rings::RingSpec;

#[derive(Default)]
struct Gluing {
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
    triangles: Vec<(String, [String; 3], i64)>,
    boundary: Vec<String>,
}

impl Gluing {
    fn vertex(&mut self, id: &str) {
        self.vertices.push(id.to_string());
    }

    fn edge(&mut self, id: &str, from: &str, to: &str) {
        self.edges.push((id.to_string(), from.to_string(), to.to_string()));
    }

    /// A triangle given by its faces `d_0, d_1, d_2` and its sign in the cycle.
    fn triangle(&mut self, id: &str, d0: &str, d1: &str, d2: &str, sign: i64) {
        self.triangles.push((id.to_string(), [d0.to_string(), d1.to_string(), d2.to_string()], sign));
    }

    fn mark(&mut self, id: &str) {
        self.boundary.push(id.to_string());
    }

    /// Triple block `i` spanning `left, right : base → top` with a new boundary loop.
    fn block(&mut self, i: usize, base: &str, top: &str, left: &str, right: &str) {
        let (t, r, l, s, h) = (format!("t{i}"), format!("r{i}"), format!("l{i}"), format!("s{i}"), format!("h{i}"));
        self.vertex(&t);
        self.edge(&r, base, &t);
        self.edge(&l, base, &t);
        self.edge(&s, top, &t);
        self.edge(&h, &t, &t);
        self.triangle(&format!("M{i}"), &h, &l, &r, 1);
        self.triangle(&format!("R{i}"), &s, &r, right, 1);
        self.triangle(&format!("L{i}"), &s, &l, left, -1);
        self.mark(&t);
        self.mark(&h);
    }

    fn build(self, label: String) -> Result<(Model, Chain)> {
        let mut b = ModelBuilder::new(2);
        b.label(label);
        for v in &self.vertices {
            b.vertex(v.clone());
        }
        for (id, from, to) in &self.edges {
            b.simplex(id.clone(), &[to, from]);
        }
        for (id, faces, sign) in &self.triangles {
            b.simplex(id.clone(), faces);
            b.reference_term(id.clone(), rat(*sign));
        }
        for id in &self.boundary {
            b.mark_boundary(id.clone());
        }
        let model = b.build()?;
        let chain = model.reference().clone();
        Ok((model, chain))
    }
}

/// Side `j` of the 4g-gon (from corner `j−1` to corner `j`): its edge and
/// whether the edge runs along the side's direction.
fn side(j: usize) -> (String, bool) {
    let handle = (j - 1) / 4 + 1;
    match (j - 1) % 4 {
        0 => (format!("a{handle}"), true),
        1 => (format!("b{handle}"), true),
        2 => (format!("a{handle}"), false),
        _ => (format!("b{handle}"), false),
    }
}

/// The diagonal from corner 0 to corner `j`.
fn diagonal(g: usize, j: usize) -> String {
    if j == 1 {
        "a1".to_string()
    } else if j == 4 * g - 1 {
        format!("b{g}")
    } else {
        format!("f{j}")
    }
}

/// Fan triangulation of the 4g-gon. With `slit`, the last triangle uses a
/// fresh edge `X` in place of `b_g`, leaving `∂ = b_g − X`.
fn fan(gl: &mut Gluing, g: usize, slit: bool) {
    gl.vertex("v");
    for i in 1..=g {
        gl.edge(&format!("a{i}"), "v", "v");
        gl.edge(&format!("b{i}"), "v", "v");
    }
    for j in 2..=(4 * g - 2) {
        gl.edge(&format!("f{j}"), "v", "v");
    }
    if slit {
        gl.edge("X", "v", "v");
    }
    let last = 4 * g - 2;
    for k in 1..=last {
        let (e, forward) = side(k + 1);
        let near = diagonal(g, k);
        let far = if slit && k == last { "X".to_string() } else { diagonal(g, k + 1) };
        if forward {
            gl.triangle(&format!("T{k}"), &e, &far, &near, 1);
        } else {
            gl.triangle(&format!("T{k}"), &e, &near, &far, -1);
        }
    }
}

/// A model of `Σ_{g,b}` with a relative fundamental cycle of support
/// `4g − 2`, `1`, `2`, `3b − 4` or `4g + 3b − 4` depending on the case.
pub fn surface_cycle(g: usize, b: usize) -> Result<(Model, Chain)> {
    let mut gl = Gluing::default();
    match (g, b) {
        (0, 0) => {
            return Err(SvolError::Unsupported("the sphere Σ_{0,0} is built by sphere_model(2)".into()))
        }
        (0, 1) => {
            for v in ["x0", "x1", "x2"] {
                gl.vertex(v);
                gl.mark(v);
            }
            for (e, from, to) in [("e01", "x0", "x1"), ("e02", "x0", "x2"), ("e12", "x1", "x2")] {
                gl.edge(e, from, to);
                gl.mark(e);
            }
            gl.triangle("D", "e12", "e02", "e01", 1);
        }
        (0, _) => {
            for v in ["B", "T"] {
                gl.vertex(v);
                gl.mark(v);
            }
            let last = format!("c{}", b - 2);
            gl.edge("o", "B", "B");
            gl.edge("h0", "T", "T");
            gl.edge("u", "B", "T");
            for i in 0..=(b - 2) {
                gl.edge(&format!("c{i}"), "B", "T");
            }
            gl.mark("o");
            gl.mark("h0");
            gl.triangle("O", "u", &last, "o", 1);
            gl.triangle("P", "h0", "u", "c0", 1);
            for i in 1..=(b - 2) {
                gl.block(i, "B", "T", &format!("c{}", i - 1), &format!("c{i}"));
            }
        }
        (_, 0) => fan(&mut gl, g, false),
        (_, _) => {
            fan(&mut gl, g, true);
            let chain_edge = |i: usize| match i {
                0 if b == 1 => "X".to_string(),
                0 => "Y".to_string(),
                i if i == b - 1 => "X".to_string(),
                i => format!("c{i}"),
            };
            gl.edge("h0", "v", "v");
            if b >= 2 {
                gl.edge("Y", "v", "v");
            }
            for i in 1..b.saturating_sub(1) {
                gl.edge(&format!("c{i}"), "v", "v");
            }
            gl.mark("v");
            gl.mark("h0");
            gl.triangle("H", "h0", &format!("b{g}"), &chain_edge(0), 1);
            for i in 1..b {
                gl.block(i, "v", "v", &chain_edge(i - 1), &chain_edge(i));
            }
        }
    }
    let label = if b == 0 { format!("Sigma_{g}") } else { format!("Sigma_{g},{b}") };
    let (model, chain) = gl.build(label)?;
    validate_surface(&model, &chain, g, b)?;
    Ok((model, chain))
}

/// The expected support size of [`surface_cycle`].
pub fn surface_support_size(g: usize, b: usize) -> usize {
    match (g, b) {
        (0, 0) => 2,
        (0, 1) => 1,
        (0, 2) => 2,
        (0, _) => 3 * b - 4,
        (_, 0) => 4 * g - 2,
        _ => 4 * g + 3 * b - 4,
    }
}

/// Connected components of the boundary subcomplex, as sorted edge lists
/// (an isolated boundary vertex gives an empty list).
pub fn boundary_components(model: &Model) -> Vec<Vec<String>> {
    let bd = model.boundary_ids();
    let vertices: Vec<&str> = model.ids(0).iter().filter(|v| bd.contains(*v)).map(String::as_str).collect();
    let mut parent: BTreeMap<&str, &str> = vertices.iter().map(|v| (*v, *v)).collect();
    fn find<'a>(parent: &mut BTreeMap<&'a str, &'a str>, x: &'a str) -> &'a str {
        let p = parent[x];
        if p == x {
            return x;
        }
        let root = find(parent, p);
        parent.insert(x, root);
        root
    }
    let edges: Vec<&str> = model.ids(1).iter().filter(|e| bd.contains(*e)).map(String::as_str).collect();
    for e in &edges {
        let (x, y) = (model.face(e, 0), model.face(e, 1));
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        if rx != ry {
            parent.insert(rx.max(ry), rx.min(ry));
        }
    }
    let mut groups: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for v in &vertices {
        let root = find(&mut parent, v);
        groups.entry(root).or_default();
    }
    for e in &edges {
        let root = find(&mut parent, model.face(e, 1));
        groups.entry(root).or_default().push(e.to_string());
    }
    groups.into_values().collect()
}

/// Checks the cycle, the Euler characteristic and that `∂(chain)` is a
/// fundamental cycle of every boundary circle.
pub fn validate_surface(model: &Model, chain: &Chain, g: usize, b: usize) -> Result<()> {
    let fail = |m: String| Err(SvolError::InvalidModel(m));
    if !verify_relative_cycle(model, chain, &RingSpec::Z)? {
        return fail("surface chain is not a relative cycle".into());
    }
    let chi = 2 - 2 * g as i64 - b as i64;
    if model.euler_characteristic() != chi {
        return fail(format!("Euler characteristic {} ≠ {chi}", model.euler_characteristic()));
    }
    let components = boundary_components(model);
    if components.len() != b {
        return fail(format!("{} boundary components, expected {b}", components.len()));
    }
    let bd = boundary(model, chain)?;
    for edges in &components {
        let restricted = Chain::from_terms(1, edges.iter().map(|e| (e.clone(), bd.get(e))));
        let covers: BTreeSet<&str> = restricted.support().collect();
        let unit = restricted.iter().all(|(_, q)| *q == rat(1) || *q == rat(-1));
        if covers.len() != edges.len() || !unit || !boundary(model, &restricted)?.is_zero() {
            return fail(format!("boundary of the chain does not wrap the circle {edges:?} once"));
        }
    }
    Ok(())
}
