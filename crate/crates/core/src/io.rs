//! The instance file format, band covers and SVG barcode plots.
//!
//! An instance file is JSON laid out one record per line:
//!
//! ```json
//! {
//!   "field": 2,
//!   "levels": 2,
//!   "complex": [
//!     {"vertices": [0], "level": 2},
//!     {"vertices": [0, 1], "level": 1}
//!   ],
//!   "target": [[0], [1], [0, 1]],
//!   "map": [[0, 0], [1, 1]],
//!   "cover": [
//!     {"id": 1, "simplices": [[0, 1]]}
//!   ]
//! }
//! ```
//!
//! `level` is the first filtration index at which the simplex is gone. With
//! `"ascending": true` it is read as a birth time in an increasing
//! filtration instead, and indices are reversed. `target` and `map` may be
//! omitted together for the identity map; cover pieces are closed under
//! faces on load.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::{BuildWarning, FilteredComplex, Simplex, SimplicialComplex};
use crate::cover::{CoverPiece, SimplicialMap};
use crate::error::{Error, Result};
use crate::field::FieldChoice;
use crate::instance::Instance;
use crate::persistence::Barcode;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub vertices: Simplex,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceEntry {
    pub id: i64,
    pub simplices: Vec<Simplex>,
}

fn default_field() -> u32 {
    2
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default = "default_field")]
    pub field: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub ascending: bool,
    pub complex: Vec<ComplexEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<Simplex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<(u32, u32)>>,
    pub cover: Vec<PieceEntry>,
}

/// A validated instance together with its field and any build notes.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub instance: Instance,
    pub field: FieldChoice,
    pub warnings: Vec<BuildWarning>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn field_choice(&self) -> Result<FieldChoice> {
        Ok(FieldChoice::new(self.field)?)
    }

    pub fn build(&self) -> Result<Loaded> {
        let field = self.field_choice()?;
        let entries = self.complex.iter().map(|e| (e.vertices.clone(), e.level));
        let (complex, warnings) = if self.ascending {
            let last = self
                .levels
                .unwrap_or_else(|| self.complex.iter().map(|e| e.level).max().unwrap_or(0));
            FilteredComplex::from_ascending(entries, last)?
        } else {
            let (k, w) = FilteredComplex::build(entries)?;
            match self.levels {
                Some(n) => (k.with_len(n)?, w),
                None => (k, w),
            }
        };
        let pieces: Vec<CoverPiece> = self
            .cover
            .iter()
            .map(|p| CoverPiece::new(p.id, SimplicialComplex::closure(p.simplices.iter().cloned())))
            .collect();

        let instance = match (&self.target, &self.map) {
            (None, None) => Instance::identity(complex, pieces)?,
            (target, map) => {
                let x = complex.full();
                let map = match map {
                    Some(pairs) => {
                        let mut vm = BTreeMap::new();
                        for &(a, b) in pairs {
                            if vm.insert(a, b).is_some_and(|old| old != b) {
                                return Err(Error::Invalid(format!("vertex {a} is mapped twice")));
                            }
                        }
                        SimplicialMap::new(vm)
                    }
                    None => SimplicialMap::identity(&x),
                };
                let target = match target {
                    Some(list) => SimplicialComplex::from_simplices(list.iter().cloned()),
                    None => SimplicialComplex::closure(
                        x.iter()
                            .filter_map(|s| map.image(s))
                            .chain(pieces.iter().flat_map(|p| p.complex.iter().cloned())),
                    ),
                };
                if let Some((face, coface)) = target.missing_face() {
                    return Err(Error::Invalid(format!("target contains {coface} but not its face {face}")));
                }
                Instance::new(complex, target, map, pieces)?
            }
        };
        Ok(Loaded {
            instance,
            field,
            warnings,
        })
    }

    /// The explicit form of an instance: every simplex with its level, the
    /// full target and vertex map, and each piece by its maximal simplices.
    pub fn from_instance(inst: &Instance, field: FieldChoice) -> Self {
        let complex = inst
            .complex
            .entries()
            .map(|(s, level)| ComplexEntry {
                vertices: s.clone(),
                level,
            })
            .collect();
        let system = &inst.system;
        InstanceFile {
            field: field.characteristic(),
            levels: Some(inst.complex.len()),
            ascending: false,
            complex,
            target: Some(system.target().iter().cloned().collect()),
            map: Some(system.map().vertex_map().iter().map(|(&a, &b)| (a, b)).collect()),
            cover: system
                .pieces()
                .iter()
                .map(|p| PieceEntry {
                    id: p.id,
                    simplices: maximal_simplices(&p.complex),
                })
                .collect(),
        }
    }

    /// Line-oriented JSON: one complex entry, map pair or piece per line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"field\": {},", self.field);
        if let Some(n) = self.levels {
            let _ = writeln!(out, "  \"levels\": {n},");
        }
        if self.ascending {
            out.push_str("  \"ascending\": true,\n");
        }
        let items: Vec<String> = self.complex.iter().map(line).collect();
        push_list(&mut out, "complex", &items, true);
        if let Some(t) = &self.target {
            let items: Vec<String> = t.iter().map(line).collect();
            let _ = writeln!(out, "  \"target\": [{}],", items.join(", "));
        }
        if let Some(m) = &self.map {
            let items: Vec<String> = m.iter().map(line).collect();
            let _ = writeln!(out, "  \"map\": [{}],", items.join(", "));
        }
        let items: Vec<String> = self.cover.iter().map(line).collect();
        push_list(&mut out, "cover", &items, false);
        out.push_str("}\n");
        out
    }
}

/// Compact JSON with a space after separators. The records hold no strings,
/// so the textual replacement is safe.
fn line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v)
        .expect("plain data serializes")
        .replace(',', ", ")
        .replace("\":", "\": ")
}

fn push_list(out: &mut String, key: &str, items: &[String], trailing_comma: bool) {
    let tail = if trailing_comma { "," } else { "" };
    if items.is_empty() {
        let _ = writeln!(out, "  \"{key}\": []{tail}");
        return;
    }
    let _ = writeln!(out, "  \"{key}\": [");
    for (k, item) in items.iter().enumerate() {
        let sep = if k + 1 < items.len() { "," } else { "" };
        let _ = writeln!(out, "    {item}{sep}");
    }
    let _ = writeln!(out, "  ]{tail}");
}

/// Simplices of `c` that are not a face of another simplex of `c`.
pub fn maximal_simplices(c: &SimplicialComplex) -> Vec<Simplex> {
    let faces: BTreeSet<Simplex> = c.iter().flat_map(|s| s.proper_faces()).collect();
    c.iter().filter(|s| !faces.contains(*s)).cloned().collect()
}

pub fn load(path: &std::path::Path) -> Result<Loaded> {
    InstanceFile::read(path)?.build()
}

/// Clamps a signed slice index into `[0, N]`: every `i ≤ 0` names `K_0` and
/// every `i ≥ N` names the empty slice.
pub fn clamp_slice(i: i64, len: usize) -> usize {
    i.clamp(0, len as i64) as usize
}

/// The path (or cycle) on `vertices` vertices, split into `bands`
/// consecutive intervals that overlap in exactly one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandCover {
    pub target: SimplicialComplex,
    pub pieces: Vec<CoverPiece>,
}

pub fn band_cover(vertices: u32, bands: usize, cyclic: bool) -> Result<BandCover> {
    if vertices == 0 {
        return Err(Error::Invalid("a band cover needs at least one vertex".into()));
    }
    if cyclic && vertices < 3 {
        return Err(Error::Invalid("a cycle needs at least three vertices".into()));
    }
    let edges: Vec<Simplex> = (0..vertices)
        .filter_map(|v| {
            let w = v + 1;
            if w < vertices {
                Some(Simplex::new(vec![v, w]))
            } else if cyclic {
                Some(Simplex::new(vec![v, 0]))
            } else {
                None
            }
        })
        .collect::<std::result::Result<_, _>>()?;
    let target = SimplicialComplex::closure(edges.iter().cloned().chain((0..vertices).map(Simplex::vertex)));
    if edges.is_empty() {
        if bands != 1 {
            return Err(Error::Invalid("a single vertex admits only one band".into()));
        }
        return Ok(BandCover {
            pieces: vec![CoverPiece::new(0, target.clone())],
            target,
        });
    }
    if bands == 0 || bands > edges.len() {
        return Err(Error::Invalid(format!(
            "band count must lie in [1, {}], got {bands}",
            edges.len()
        )));
    }
    let e = edges.len();
    let pieces = (0..bands)
        .map(|k| {
            let range = k * e / bands..(k + 1) * e / bands;
            CoverPiece::new(k as i64, SimplicialComplex::closure(edges[range].iter().cloned()))
        })
        .collect();
    Ok(BandCover { target, pieces })
}

const SVG_ROW: usize = 18;
const SVG_LEFT: usize = 60;
const SVG_WIDTH: usize = 480;

/// A static SVG 1.1 plot with one horizontal bar per interval, grouped by
/// degree, on the index axis `0..N`.
pub fn barcode_svg(len: usize, barcodes: &[(usize, &Barcode)]) -> String {
    let rows: usize = barcodes.iter().map(|(_, b)| b.len().max(1)).sum();
    let height = (rows + 3) * SVG_ROW;
    let width = SVG_LEFT + SVG_WIDTH + 40;
    let scale = SVG_WIDTH as f64 / len.max(1) as f64;
    let x = |i: usize| SVG_LEFT as f64 + i as f64 * scale;
    let mut s = String::new();
    let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
    let axis_y = (rows + 1) * SVG_ROW;
    let _ = writeln!(
        s,
        "<line x1=\"{:.1}\" y1=\"{axis_y}\" x2=\"{:.1}\" y2=\"{axis_y}\" stroke=\"black\"/>",
        x(0),
        x(len)
    );
    for i in 0..=len {
        let _ = writeln!(
            s,
            "<line x1=\"{0:.1}\" y1=\"{axis_y}\" x2=\"{0:.1}\" y2=\"{1}\" stroke=\"black\"/><text x=\"{0:.1}\" y=\"{2}\" font-size=\"11\" text-anchor=\"middle\">{i}</text>",
            x(i),
            axis_y + 4,
            axis_y + 16
        );
    }
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let mut row = 0;
    for (degree, bc) in barcodes {
        let color = COLORS[degree % COLORS.len()];
        let _ = writeln!(
            s,
            "<text x=\"8\" y=\"{}\" font-size=\"12\">H^{degree}</text>",
            (row + 1) * SVG_ROW - 4
        );
        for bar in bc.bars() {
            let y = row * SVG_ROW + SVG_ROW / 2;
            let end = bar.death.unwrap_or(len);
            let w = (x(end) - x(bar.birth)).max(2.0);
            let _ = writeln!(
                s,
                "<rect x=\"{:.1}\" y=\"{y}\" width=\"{w:.1}\" height=\"{}\" fill=\"{color}\"/>",
                x(bar.birth),
                SVG_ROW / 2
            );
            if bar.death.is_none() {
                let tip = x(end);
                let _ = writeln!(
                    s,
                    "<polygon points=\"{:.1},{} {:.1},{} {:.1},{}\" fill=\"{color}\"/>",
                    tip,
                    y - 2,
                    tip + 8.0,
                    y + SVG_ROW / 4,
                    tip,
                    y + SVG_ROW / 2 + 2
                );
            }
            row += 1;
        }
        if bc.is_empty() {
            row += 1;
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::persistence::Interval;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    const CIRCLE: &str = r#"{
  "complex": [
    {"vertices": [0], "level": 1}, {"vertices": [1], "level": 1}, {"vertices": [2], "level": 1},
    {"vertices": [0, 1], "level": 1}, {"vertices": [1, 2], "level": 1}, {"vertices": [0, 2], "level": 1}
  ],
  "cover": [
    {"id": 1, "simplices": [[0, 1], [1, 2]]},
    {"id": 2, "simplices": [[0, 2]]}
  ]
}"#;

    #[test]
    fn parses_the_circle() {
        let loaded = InstanceFile::parse(CIRCLE).unwrap().build().unwrap();
        assert!(loaded.warnings.is_empty());
        assert_eq!(loaded.field, FieldChoice::new(2).unwrap());
        let c = fixtures::circle();
        assert_eq!(loaded.instance.complex, c.complex);
        assert_eq!(loaded.instance.system.pieces(), c.system.pieces());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = InstanceFile::parse("{\n  \"complex\": [\n    {\"vertices\": [0, 0], \"level\": 1}\n  ], \"cover\": []\n}").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = InstanceFile::parse("{\"complex\": [}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn missing_face_is_reported() {
        let text = r#"{"complex": [{"vertices": [0, 1], "level": 1}, {"vertices": [0], "level": 1}],
                       "cover": [{"id": 0, "simplices": [[0, 1]]}]}"#;
        let loaded = InstanceFile::parse(text).unwrap().build().unwrap();
        assert_eq!(
            loaded.warnings,
            vec![BuildWarning::InsertedFace {
                face: s(&[1]),
                level: 1
            }]
        );
    }

    #[test]
    fn uncovered_edge_is_an_error() {
        let text = r#"{"complex": [{"vertices": [0], "level": 1}, {"vertices": [1], "level": 1}, {"vertices": [0, 1], "level": 1}],
                       "cover": [{"id": 0, "simplices": [[0], [1]]}]}"#;
        let err = InstanceFile::parse(text).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::Cover(crate::error::CoverError::NotCovering(ref m)) if m == &vec![s(&[0, 1])]));
    }

    #[test]
    fn round_trip_on_every_fixture() {
        for (name, inst) in fixtures::all() {
            let file = InstanceFile::from_instance(&inst, FieldChoice::new(3).unwrap());
            let text = file.to_text();
            let again = InstanceFile::parse(&text).unwrap();
            assert_eq!(again, file, "{name}");
            let rebuilt = again.build().unwrap();
            assert!(rebuilt.warnings.is_empty());
            assert_eq!(rebuilt.instance.complex, inst.complex, "{name}");
            assert_eq!(rebuilt.instance.system.target(), inst.system.target());
            assert_eq!(rebuilt.instance.system.map(), inst.system.map());
            assert_eq!(rebuilt.instance.system.pieces(), inst.system.pieces());
            assert_eq!(InstanceFile::from_instance(&rebuilt.instance, rebuilt.field).to_text(), text);
        }
    }

    #[test]
    fn ascending_input_is_reversed() {
        let text = r#"{"ascending": true, "levels": 1,
            "complex": [{"vertices": [0], "level": 0}, {"vertices": [1], "level": 0}, {"vertices": [0, 1], "level": 1}],
            "cover": [{"id": 0, "simplices": [[0, 1]]}]}"#;
        let k = InstanceFile::parse(text).unwrap().build().unwrap().instance.complex;
        assert_eq!(k.level(&s(&[0, 1])), Some(1));
        assert_eq!(k.level(&s(&[0])), Some(2));
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn slice_clamping() {
        assert_eq!(clamp_slice(-3, 4), 0);
        assert_eq!(clamp_slice(2, 4), 2);
        assert_eq!(clamp_slice(9, 4), 4);
    }

    #[test]
    fn band_covers() {
        let b = band_cover(7, 3, false).unwrap();
        assert_eq!(b.pieces.len(), 3);
        assert_eq!(b.pieces[0].complex.count(1), 2);
        let shared = b.pieces[0].complex.intersection(&b.pieces[1].complex);
        assert_eq!(shared, SimplicialComplex::from_simplices([s(&[2])]));
        let c = band_cover(6, 3, true).unwrap();
        let wrap = c.pieces[2].complex.intersection(&c.pieces[0].complex);
        assert_eq!(wrap, SimplicialComplex::from_simplices([s(&[0])]));
        assert!(band_cover(4, 4, false).is_err());
        assert!(band_cover(2, 1, true).is_err());
        assert_eq!(band_cover(1, 1, false).unwrap().pieces.len(), 1);
    }

    #[test]
    fn svg_has_one_rect_per_bar() {
        let bc = Barcode::new(vec![Interval::new(0, 2), Interval { birth: 1, death: None }]);
        let svg = barcode_svg(3, &[(0, &bc)]);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("version=\"1.1\""));
        assert_eq!(svg.matches("<rect").count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 1);
    }
}
