//! Concrete models: surfaces, circles, spheres, the torus and cyclic covers.

mod certificate;
mod surface;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::complex::{voltage_cover, CoveringData, Model, ModelBuilder};
use crate::error::{Result, SvolError};
use crate::rational::{format_rational, rat, ratio, Rational};

pub use certificate::{surface_minimality_certificate, CertificateStatus, CertificateStep, SurfaceCertificate};
pub use surface::{boundary_components, surface_cycle, surface_support_size, validate_surface};

/// One vertex, one loop; the reference cycle is the loop.
pub fn circle_model() -> Model {
    let mut b = ModelBuilder::new(1);
    b.label("S1").vertex("v").simplex("e", &["v", "v"]).reference_term("e", rat(1));
    b.build().expect("circle model is valid")
}

/// The one-vertex two-triangle torus with reference `T1 − T2`.
pub fn torus_model() -> Model {
    let (mut model, _) = surface_cycle(1, 0).expect("torus model is valid");
    model.set_label("T2");
    model
}

/// `S^1` for `d = 1`, two triangles glued along their boundary for `d = 2`,
/// and `∂Δ^{d+1}` with the alternating reference cycle for `d ≥ 3`.
pub fn sphere_model(d: usize) -> Result<Model> {
    match d {
        0 => Err(SvolError::Unsupported("sphere_model needs d ≥ 1".into())),
        1 => Ok(circle_model()),
        2 => {
            let mut b = ModelBuilder::new(2);
            b.label("S2");
            for v in ["x", "y", "z"] {
                b.vertex(v);
            }
            b.simplex("xy", &["y", "x"]).simplex("xz", &["z", "x"]).simplex("yz", &["z", "y"]);
            b.simplex("s1", &["yz", "xz", "xy"]).simplex("s2", &["yz", "xz", "xy"]);
            b.reference_term("s1", rat(1)).reference_term("s2", rat(-1));
            b.build()
        }
        _ => simplex_boundary(d + 1, &format!("S{d}")),
    }
}

fn simplex_id(vertices: &[usize]) -> String {
    let parts: Vec<String> = vertices.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(","))
}

/// Subsets of `{0..n}` of a given size, in lexicographic order.
fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            cur.push(x);
            go(x + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

fn add_simplex_with_faces(b: &mut ModelBuilder, vertices: &[usize]) {
    let faces: Vec<String> = if vertices.len() == 1 {
        Vec::new()
    } else {
        (0..vertices.len())
            .map(|i| {
                let mut f = vertices.to_vec();
                f.remove(i);
                simplex_id(&f)
            })
            .collect()
    };
    b.simplex(simplex_id(vertices), &faces);
}

/// `∂Δ^n` as a closed `(n−1)`-dimensional model.
fn simplex_boundary(n: usize, label: &str) -> Result<Model> {
    let mut b = ModelBuilder::new(n - 1);
    b.label(label);
    for size in 1..=n {
        for s in subsets(n, size) {
            add_simplex_with_faces(&mut b, &s);
        }
    }
    let full: Vec<usize> = (0..=n).collect();
    for i in 0..=n {
        let mut f = full.clone();
        f.remove(i);
        b.reference_term(simplex_id(&f), rat(if i % 2 == 0 { 1 } else { -1 }));
    }
    b.build()
}

/// A 2-sphere `∂[0,1,2,3]` with a solid tetrahedron `[0,1,2,4]` attached
/// along the face `[0,1,2]`. The reference cycle is `∂[0,1,2,3]`; the
/// 3-cell makes `∂[0,1,2,4]` a boundary, so the class has many representatives.
pub fn sphere_with_ball() -> Model {
    let mut b = ModelBuilder::new(2);
    b.label("S2+ball");
    let mut seen = std::collections::BTreeSet::new();
    for top in [[0, 1, 2, 3], [0, 1, 2, 4]] {
        for size in 1..=3 {
            for s in subsets(3, size) {
                let vs: Vec<usize> = s.iter().map(|&i| top[i]).collect();
                if seen.insert(vs.clone()) {
                    add_simplex_with_faces(&mut b, &vs);
                }
            }
        }
    }
    add_simplex_with_faces(&mut b, &[0, 1, 2, 4]);
    for (i, f) in [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]].iter().enumerate() {
        b.reference_term(simplex_id(f), rat(if i % 2 == 0 { 1 } else { -1 }));
    }
    b.build().expect("sphere with ball is valid")
}

/// One vertex, one loop `e` and two triangles with faces `(e, e, e)`, plus a
/// 3-simplex with faces `(s1, s2, s1, s2)`. Its boundary is `2(s1 − s2)`, so the
/// reference class `s1 − s2` has order two: it dies over `ℚ` and over `ℤ_(p)` for odd `p`.
pub fn torsion_model() -> Model {
    let mut b = ModelBuilder::new(2);
    b.label("Z2-torsion");
    b.vertex("v");
    b.simplex("e", &["v", "v"]);
    b.simplex("s1", &["e", "e", "e"]).simplex("s2", &["e", "e", "e"]);
    b.simplex("t", &["s1", "s2", "s1", "s2"]);
    b.reference_term("s1", rat(1)).reference_term("s2", rat(-1));
    b.build().expect("torsion model is valid")
}

/// The k-sheeted cyclic cover of `Σ_g` (or of the torus) classified by
/// `a_1 ↦ 1`, all other generators `↦ 0`. Its total space has genus `kg − k + 1`.
pub fn cyclic_cover(g: usize, k: usize) -> Result<CoveringData> {
    if g == 0 || k == 0 {
        return Err(SvolError::Unsupported(format!("cyclic cover of Σ_{g} with {k} sheets")));
    }
    let (base, _) = surface_cycle(g, 0)?;
    let mut voltages = BTreeMap::new();
    voltages.insert("a1".to_string(), 1);
    // the diagonal to corner 2 is homotopic to a_1 b_1; later diagonals close up a_1
    voltages.insert("f2".to_string(), 1);
    let mut cov = voltage_cover(&base, &voltages, k)?;
    let genus = k * g - k + 1;
    cov.total.set_label(format!("Sigma_{genus}"));
    Ok(cov)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableTerm {
    pub k: usize,
    pub genus: usize,
    pub value: String,
    pub running_infimum: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableVolume {
    pub genus: usize,
    pub terms: Vec<StableTerm>,
    pub infimum: String,
    pub limit: String,
}

/// `(4 g_k − 2)/k` for `k = 1..k_max`, with `g_k = kg − k + 1`, and its running infimum.
pub fn stable_volume_surface(g: usize, k_max: usize) -> Result<StableVolume> {
    if g < 2 || k_max == 0 {
        return Err(SvolError::Unsupported(format!("stable volume needs g ≥ 2 and k_max ≥ 1 (got {g}, {k_max})")));
    }
    let mut terms = Vec::new();
    let mut inf: Option<Rational> = None;
    for k in 1..=k_max {
        let genus = k * g - k + 1;
        let value = ratio(4 * genus as i64 - 2, k as i64);
        let next = match inf {
            Some(ref cur) if *cur <= value => cur.clone(),
            _ => value.clone(),
        };
        terms.push(StableTerm {
            k,
            genus,
            value: format_rational(&value),
            running_infimum: format_rational(&next),
        });
        inf = Some(next);
    }
    Ok(StableVolume {
        genus: g,
        terms,
        infimum: format_rational(&inf.expect("k_max ≥ 1")),
        limit: format_rational(&rat(4 * g as i64 - 4)),
    })
}

/// Parses a stable-volume term back into an exact rational.
pub fn stable_value(term: &StableTerm) -> Rational {
    crate::rational::parse_rational(&term.value).expect("formatted rational")
}
