//! JSON reports for the command-line tool.
//!
//! Every report carries `schema_version` and serializes maps in a fixed
//! numeric order, so that output bytes depend only on the input. Timing is
//! left out unless asked for.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::field::{Field, FieldChoice};
use crate::instance::Instance;
use crate::persistence::{interval_decomposition, persistent_page_modules, ph_compare_tower, Barcode, DegreeComparison, SpectralTower};
use crate::spectral::{check_e2, e2_as_cech, eta_on_page, page, restriction_respects_filtration, restriction_square_failures, run_to_infinity, SpectralSlice};

pub const SCHEMA_VERSION: u32 = 1;

/// A map keyed by bidegree, written as `{"(p,q)": value}` in `(p, q)` order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Bidegrees<V>(pub BTreeMap<(usize, usize), V>);

impl<V: Serialize> Serialize for Bidegrees<V> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for ((p, q), v) in &self.0 {
            m.serialize_entry(&format!("({p},{q})"), v)?;
        }
        m.end()
    }
}

impl<V> FromIterator<((usize, usize), V)> for Bidegrees<V> {
    fn from_iter<I: IntoIterator<Item = ((usize, usize), V)>>(iter: I) -> Self {
        Bidegrees(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PagesReport {
    pub schema_version: u32,
    pub field: String,
    pub slice: usize,
    pub page: usize,
    pub dims: Bidegrees<usize>,
    pub differential_ranks: Bidegrees<usize>,
}

/// Non-zero dimensions of `E_r^{p,q}` at slice `i` and the ranks of the
/// non-zero `d_r`.
pub fn pages_report<S: Field>(inst: &Instance, field: FieldChoice, i: usize, r: usize) -> Result<PagesReport> {
    let slice = SpectralSlice::<S>::build(&inst.complex, &inst.system, i)?;
    let pg = page(&slice, r)?;
    Ok(PagesReport {
        schema_version: SCHEMA_VERSION,
        field: field.to_string(),
        slice: i,
        page: r,
        dims: Bidegrees(pg.dims()),
        differential_ranks: Bidegrees(pg.differential_ranks()),
    })
}

/// A bar for display. With `open_start`, a bar born at index 0 is shown
/// with birth `null`, standing for all indices `≤ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DisplayBar {
    pub birth: Option<usize>,
    pub death: Option<usize>,
}

impl Serialize for DisplayBar {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        (self.birth, self.death).serialize(s)
    }
}

pub fn display_bars(b: &Barcode, open_start: bool) -> Vec<DisplayBar> {
    b.bars()
        .iter()
        .map(|bar| DisplayBar {
            birth: if open_start && bar.birth == 0 { None } else { Some(bar.birth) },
            death: bar.death,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeBarcodes {
    pub degree: usize,
    pub oracle: Vec<DisplayBar>,
    pub spectral: Vec<DisplayBar>,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BarcodeReport {
    pub schema_version: u32,
    pub field: String,
    pub len: usize,
    pub degrees: Vec<DegreeBarcodes>,
}

/// Oracle and spectral barcodes, for one degree or for every degree up to
/// the dimension of `K`.
pub fn barcode_report<S: Field>(inst: &Instance, field: FieldChoice, degree: Option<usize>, open_start: bool) -> Result<(BarcodeReport, Vec<(usize, Barcode)>)> {
    let tower = SpectralTower::<S>::build(&inst.complex, &inst.system, None)?;
    let cmp = ph_compare_tower(&inst.complex, &tower)?;
    // degrees above the dimension of K carry no bars
    let top = inst.complex.dim().unwrap_or(0);
    let chosen: Vec<&DegreeComparison> = cmp
        .degrees
        .iter()
        .filter(|d| match degree {
            Some(n) => n == d.degree,
            None => d.degree <= top,
        })
        .collect();
    let mut degrees: Vec<DegreeBarcodes> = chosen
        .iter()
        .map(|d| DegreeBarcodes {
            degree: d.degree,
            oracle: display_bars(&d.oracle, open_start),
            spectral: display_bars(&d.spectral, open_start),
            agree: d.spectral == d.oracle,
        })
        .collect();
    let mut plain: Vec<(usize, Barcode)> = chosen.iter().map(|d| (d.degree, d.spectral.clone())).collect();
    if let (Some(n), true) = (degree, degrees.is_empty()) {
        // above the top degree everything vanishes
        degrees.push(DegreeBarcodes {
            degree: n,
            oracle: Vec::new(),
            spectral: Vec::new(),
            agree: true,
        });
        plain.push((n, Barcode::default()));
    }
    Ok((
        BarcodeReport {
            schema_version: SCHEMA_VERSION,
            field: field.to_string(),
            len: inst.complex.len(),
            degrees,
        },
        plain,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeRow {
    pub degree: usize,
    pub e_infinity: usize,
    pub cohomology: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceReport {
    pub index: usize,
    pub r_stable: usize,
    pub e2: Bidegrees<usize>,
    pub e2_routes_agree: bool,
    pub e_infinity: Bidegrees<usize>,
    pub degrees: Vec<DegreeRow>,
    pub converges: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub index: usize,
    pub degree: usize,
    pub e_infinity: usize,
    pub cohomology: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Checks {
    /// Total dimension of the stable page equals cohomology at every slice.
    pub convergence: bool,
    /// Both computations of `E_2` agree at every slice.
    pub e2_routes: bool,
    /// The persistent stable page has the dimensions of persistent cohomology.
    pub persistent_dims: bool,
    /// Assembled, tower and oracle barcodes coincide in every degree.
    pub barcodes: bool,
    /// Restriction commutes with both differentials and respects the
    /// horizontal filtration between consecutive slices.
    pub restriction_squares: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub schema_version: u32,
    pub field: String,
    pub len: usize,
    pub pieces: Vec<i64>,
    pub stable_page: usize,
    pub slices: Vec<SliceReport>,
    pub persistence: Vec<DegreeComparison>,
    pub page_modules: Bidegrees<Barcode>,
    pub mismatches: Vec<Mismatch>,
    pub checks: Checks,
    /// Dimension-level checks only: convergence and persistent dimensions.
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

pub fn compare_report<S: Field>(inst: &Instance, field: FieldChoice, timing: bool) -> Result<CompareReport> {
    let start = Instant::now();
    let k = &inst.complex;
    let tower = SpectralTower::<S>::build(k, &inst.system, None)?;
    let slices = tower
        .slices
        .par_iter()
        .map(|slice| slice_report(slice, k.dim().unwrap_or(0)))
        .collect::<Result<Vec<_>>>()?;
    let cmp = ph_compare_tower(k, &tower)?;
    let modules = persistent_page_modules(&tower.slices, &tower.pages)?;
    let page_modules: Bidegrees<Barcode> = modules
        .iter()
        .filter(|(_, m)| !m.is_empty())
        .map(|(&pq, m)| (pq, interval_decomposition(m)))
        .collect();
    let squares = tower.slices.windows(2).all(|w| {
        restriction_square_failures(&w[0].dc, &w[1].dc).is_empty() && restriction_respects_filtration(&w[0], &w[1])
    });
    let mismatches: Vec<Mismatch> = slices
        .iter()
        .flat_map(|s| {
            s.degrees.iter().filter(|d| d.e_infinity != d.cohomology).map(|d| Mismatch {
                index: s.index,
                degree: d.degree,
                e_infinity: d.e_infinity,
                cohomology: d.cohomology,
            })
        })
        .collect();
    let checks = Checks {
        convergence: mismatches.is_empty(),
        e2_routes: slices.iter().all(|s| s.e2_routes_agree),
        persistent_dims: cmp.dims_agree(),
        barcodes: cmp.barcodes_agree(),
        restriction_squares: squares,
    };
    let ok = checks.convergence && checks.persistent_dims;
    Ok(CompareReport {
        schema_version: SCHEMA_VERSION,
        field: field.to_string(),
        len: k.len(),
        pieces: inst.system.ids(),
        stable_page: tower.r,
        slices,
        persistence: cmp.degrees,
        page_modules,
        mismatches,
        checks,
        ok,
        timing_ms: timing.then(|| start.elapsed().as_millis()),
    })
}

fn slice_report<S: Field>(slice: &SpectralSlice<S>, top: usize) -> Result<SliceReport> {
    let stable = run_to_infinity(slice)?;
    let e2 = page(slice, 2)?;
    let cech = e2_as_cech(&slice.dc)?;
    let e2_routes_agree = check_e2(slice, &e2).is_ok();
    let degrees: Vec<DegreeRow> = (0..=top.max(slice.dc.max_n()))
        .map(|n| DegreeRow {
            degree: n,
            e_infinity: stable.page.total_dim(n),
            cohomology: slice.dc.slice().cohomology_dim::<S>(n),
        })
        .collect();
    let converges = degrees.iter().all(|d| d.e_infinity == d.cohomology);
    Ok(SliceReport {
        index: slice.index(),
        r_stable: stable.r_stable,
        e2: cech.into_iter().filter(|(_, d)| *d > 0).collect(),
        e2_routes_agree,
        e_infinity: Bidegrees(stable.page.dims()),
        degrees,
        converges,
    })
}

/// `η` on every page from 0 to `r_max` between consecutive slices: every
/// induced map must be well defined.
pub fn eta_well_defined<S: Field>(tower: &SpectralTower<S>, r_max: usize) -> Result<()> {
    for r in 0..=r_max {
        let pages = tower
            .slices
            .par_iter()
            .map(|s| page(s, r))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for i in 0..tower.slices.len().saturating_sub(1) {
            eta_on_page(&tower.slices[i], &pages[i], &tower.slices[i + 1], &pages[i + 1])?;
        }
    }
    Ok(())
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}
