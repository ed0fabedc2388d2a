//! Small worked instances used by tests, the acceptance suite and the CLI
//! examples. Each has a JSON twin under `fixtures/`.

use crate::complex::{FilteredComplex, Simplex, SimplicialComplex};
use crate::cover::{CoverPiece, SimplicialMap};
use crate::instance::Instance;

fn s(v: &[u32]) -> Simplex {
    Simplex::new(v.to_vec()).expect("fixture simplex")
}

fn closure(list: &[&[u32]]) -> SimplicialComplex {
    SimplicialComplex::closure(list.iter().map(|v| s(v)))
}

fn triangle_boundary() -> SimplicialComplex {
    closure(&[&[0, 1], &[1, 2], &[0, 2]])
}

fn arcs() -> Vec<CoverPiece> {
    vec![
        CoverPiece::new(1, closure(&[&[0, 1], &[1, 2]])),
        CoverPiece::new(2, closure(&[&[0, 2]])),
    ]
}

fn constant(c: &SimplicialComplex) -> FilteredComplex {
    FilteredComplex::build(c.iter().map(|x| (x.clone(), 1))).expect("closed").0
}

/// Boundary of a triangle at level 1, covered by two arcs.
pub fn circle() -> Instance {
    Instance::identity(constant(&triangle_boundary()), arcs()).expect("valid fixture")
}

/// The hexagon wrapped twice around the triangle boundary, `w_j ↦ j mod 3`,
/// with the two-arc cover of the triangle.
pub fn double_cover() -> Instance {
    let hex = hexagon();
    let map = SimplicialMap::new((0..6).map(|j| (j, j % 3)).collect());
    Instance::new(constant(&hex), triangle_boundary(), map, arcs()).expect("valid fixture")
}

fn hexagon() -> SimplicialComplex {
    SimplicialComplex::closure((0..6).map(|j| s(&[j, (j + 1) % 6])))
}

/// The hexagon with edge `{0,5}` leaving first: it is present only in `K_0`.
pub fn filtered_circle() -> Instance {
    let entries = hexagon()
        .simplices(1)
        .iter()
        .map(|e| (e.clone(), if *e == s(&[0, 5]) { 1 } else { 2 }))
        .collect::<Vec<_>>();
    let k = FilteredComplex::build(entries).expect("valid").0;
    let pieces = vec![
        CoverPiece::new(1, closure(&[&[0, 1], &[1, 2], &[2, 3]])),
        CoverPiece::new(2, closure(&[&[3, 4], &[4, 5], &[0, 5]])),
    ];
    Instance::identity(k, pieces).expect("valid fixture")
}

fn torus_vertex(a: u32, b: u32) -> u32 {
    3 * (a % 3) + (b % 3)
}

/// Triangles of the 3×3 grid torus lying in band `a`, i.e. with first
/// coordinates in `{a, a+1}`.
fn band_triangles(a: u32) -> Vec<Simplex> {
    (0..3)
        .flat_map(|b| {
            [
                s(&[torus_vertex(a, b), torus_vertex(a + 1, b), torus_vertex(a + 1, b + 1)]),
                s(&[torus_vertex(a, b), torus_vertex(a, b + 1), torus_vertex(a + 1, b + 1)]),
            ]
        })
        .collect()
}

fn torus() -> SimplicialComplex {
    SimplicialComplex::closure((0..3).flat_map(band_triangles))
}

fn bands() -> Vec<CoverPiece> {
    (0..3)
        .map(|a| CoverPiece::new(a as i64, SimplicialComplex::closure(band_triangles(a))))
        .collect()
}

/// The minimal 9-vertex torus covered by its three bands.
pub fn torus_band() -> Instance {
    Instance::identity(constant(&torus()), bands()).expect("valid fixture")
}

/// The band torus with band 0 surviving one step longer than the rest.
pub fn torus_band_filtered() -> Instance {
    let keep = band_triangles(0);
    let entries = torus()
        .simplices(2)
        .iter()
        .map(|t| (t.clone(), if keep.contains(t) { 2 } else { 1 }))
        .collect::<Vec<_>>();
    let k = FilteredComplex::build(entries).expect("valid").0;
    Instance::identity(k, bands()).expect("valid fixture")
}

/// The torus projected onto its first coordinate circle, with the two-arc
/// cover of the triangle boundary.
pub fn torus_over_circle() -> Instance {
    let map = SimplicialMap::new((0..3).flat_map(|a| (0..3).map(move |b| (torus_vertex(a, b), a))).collect());
    Instance::new(constant(&torus()), triangle_boundary(), map, arcs()).expect("valid fixture")
}

/// Every fixture by name.
pub fn all() -> Vec<(&'static str, Instance)> {
    vec![
        ("circle", circle()),
        ("double_cover", double_cover()),
        ("filtered_circle", filtered_circle()),
        ("torus_band", torus_band()),
        ("torus_band_filtered", torus_band_filtered()),
        ("torus_over_circle", torus_over_circle()),
    ]
}
