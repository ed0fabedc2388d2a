//! Persistence modules over a field, their graded-module view, barcodes,
//! and the persistent pages assembled from the spectral sequence.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::complex::{restriction, FilteredComplex, SimplicialComplex};
use crate::cover::CoverSystem;
use crate::error::{Error, LinalgError, SpectralError};
use crate::field::Field;
use crate::linalg::{induced_map, intersect_spans, subquotient_dim, Matrix, Subquotient};
use crate::oracle;
use crate::spectral::{eta_on_page, page, Page, SpectralSlice};

/// Vector spaces `M_0, …, M_N` with maps `φ_i: M_i -> M_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistenceModule<S> {
    dims: Vec<usize>,
    maps: Vec<Matrix<S>>,
}

impl<S: Field> PersistenceModule<S> {
    /// `maps.len()` must be `dims.len() - 1` with matching shapes.
    pub fn new(dims: Vec<usize>, maps: Vec<Matrix<S>>) -> Result<Self, LinalgError> {
        if maps.len() + 1 != dims.len().max(1) {
            return Err(LinalgError::DimensionMismatch {
                expected: dims.len().saturating_sub(1),
                found: maps.len(),
            });
        }
        for (i, m) in maps.iter().enumerate() {
            if m.shape() != (dims[i + 1], dims[i]) {
                return Err(LinalgError::DimensionMismatch {
                    expected: dims[i + 1] * 1000 + dims[i],
                    found: m.rows() * 1000 + m.cols(),
                });
            }
        }
        Ok(PersistenceModule { dims, maps })
    }

    pub fn zero(len: usize) -> Self {
        PersistenceModule {
            dims: vec![0; len + 1],
            maps: (0..len).map(|_| Matrix::zeros(0, 0)).collect(),
        }
    }

    /// `N`: the module lives on `[0, N]`.
    pub fn len(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims.get(i).copied().unwrap_or(0)
    }

    pub fn map(&self, i: usize) -> &Matrix<S> {
        &self.maps[i]
    }

    pub fn maps(&self) -> &[Matrix<S>] {
        &self.maps
    }

    /// `φ_{j-1} ∘ … ∘ φ_i`; the identity for `i = j`.
    pub fn composite(&self, i: usize, j: usize) -> Matrix<S> {
        assert!(i <= j && j <= self.len());
        let mut m = Matrix::identity(self.dims[i]);
        for k in i..j {
            m = self.maps[k].mul(&m);
        }
        m
    }

    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.composite(i, j).rank()
    }

    /// Block-diagonal sum of modules of equal length.
    pub fn direct_sum(parts: &[&PersistenceModule<S>], len: usize) -> Self {
        let dims: Vec<usize> = (0..=len).map(|i| parts.iter().map(|m| m.dim(i)).sum()).collect();
        let maps = (0..len)
            .map(|i| {
                let mut m = Matrix::zeros(dims[i + 1], dims[i]);
                let (mut r, mut c) = (0, 0);
                for part in parts {
                    m.set_block(r, c, part.map(i));
                    r += part.dim(i + 1);
                    c += part.dim(i);
                }
                m
            })
            .collect();
        PersistenceModule { dims, maps }
    }

    /// Replaces the basis of `M_i` by the columns of the invertible `change[i]`.
    pub fn change_basis(&self, change: &[Matrix<S>], inverses: &[Matrix<S>]) -> Self {
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, m)| inverses[i + 1].mul(&m.mul(&change[i])))
            .collect();
        PersistenceModule {
            dims: self.dims.clone(),
            maps,
        }
    }
}

/// A half-open interval `[birth, death)`; `death = None` means the class is
/// still alive at `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub birth: usize,
    pub death: Option<usize>,
}

impl Interval {
    pub fn new(birth: usize, death: usize) -> Self {
        Interval {
            birth,
            death: Some(death),
        }
    }

    /// Whether `[i, j] ⊆ [birth, death)`.
    pub fn contains_range(&self, i: usize, j: usize) -> bool {
        self.birth <= i && self.death.is_none_or(|d| j < d)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.death {
            Some(d) => write!(f, "[{}, {})", self.birth, d),
            None => write!(f, "[{}, inf)", self.birth),
        }
    }
}

impl Serialize for Interval {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        (self.birth, self.death).serialize(s)
    }
}

/// A multiset of intervals, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct Barcode(Vec<Interval>);

impl Barcode {
    pub fn new(mut bars: Vec<Interval>) -> Self {
        bars.sort();
        Barcode(bars)
    }

    pub fn bars(&self) -> &[Interval] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_containing(&self, i: usize, j: usize) -> usize {
        self.0.iter().filter(|b| b.contains_range(i, j)).count()
    }

    /// Checks `#{bars ⊇ [i, j]} = rank(φ_{j-1} ∘ … ∘ φ_i)` for all `i ≤ j`.
    pub fn consistent_with<S: Field>(&self, m: &PersistenceModule<S>) -> bool {
        (0..=m.len()).all(|i| (i..=m.len()).all(|j| self.count_containing(i, j) == m.rank(i, j)))
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Interval decomposition by left-to-right column reduction along the tower.
///
/// The basis of each `M_i` is tagged with birth indices. At each step the
/// images under `φ_i` are reduced oldest first, adding only older columns
/// into younger ones; a column reducing to zero ends its bar (the younger
/// class dies). Surviving images keep their births, and unit vectors at the
/// non-pivot rows complete the basis of `M_{i+1}` as new births.
pub fn interval_decomposition<S: Field>(m: &PersistenceModule<S>) -> Barcode {
    let mut bars = Vec::new();
    let n = m.len();
    let mut basis: Vec<(usize, Vec<S>)> = unit_vectors(m.dim(0)).into_iter().map(|v| (0, v)).collect();
    for i in 0..n {
        basis.sort_by_key(|(b, _)| *b);
        let target_dim = m.dim(i + 1);
        let mut cols: Vec<Vec<S>> = basis.iter().map(|(_, v)| m.map(i).mul_vec(v)).collect();
        let mut pivot_owner: BTreeMap<usize, usize> = BTreeMap::new();
        let mut survivors = Vec::new();
        for j in 0..cols.len() {
            while let Some(piv) = lowest_nonzero(&cols[j]) {
                let Some(&k) = pivot_owner.get(&piv) else {
                    break;
                };
                let factor = cols[j][piv].clone() * cols[k][piv].inverse().expect("pivot");
                let ck = cols[k].clone();
                for (x, y) in cols[j].iter_mut().zip(ck) {
                    *x = x.clone() - factor.clone() * y;
                }
            }
            match lowest_nonzero(&cols[j]) {
                Some(piv) => {
                    pivot_owner.insert(piv, j);
                    survivors.push(j);
                }
                None => bars.push(Interval::new(basis[j].0, i + 1)),
            }
        }
        let mut next: Vec<(usize, Vec<S>)> = survivors.iter().map(|&j| (basis[j].0, cols[j].clone())).collect();
        for (r, e) in unit_vectors(target_dim).into_iter().enumerate() {
            if !pivot_owner.contains_key(&r) {
                next.push((i + 1, e));
            }
        }
        basis = next;
    }
    bars.extend(basis.into_iter().map(|(b, _)| Interval { birth: b, death: None }));
    Barcode::new(bars)
}

fn unit_vectors<S: Field>(n: usize) -> Vec<Vec<S>> {
    (0..n)
        .map(|k| {
            let mut v = vec![S::zero(); n];
            v[k] = S::one();
            v
        })
        .collect()
}

fn lowest_nonzero<S: Field>(v: &[S]) -> Option<usize> {
    v.iter().rposition(|x| !x.is_zero())
}

/// An element of `α(M) = ⊕_i M_i`, as its non-zero homogeneous parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedElement<S> {
    parts: BTreeMap<usize, Vec<S>>,
}

impl<S: Field> GradedElement<S> {
    pub fn homogeneous(grade: usize, v: Vec<S>) -> Self {
        let mut parts = BTreeMap::new();
        if v.iter().any(|x| !x.is_zero()) {
            parts.insert(grade, v);
        }
        GradedElement { parts }
    }

    pub fn zero() -> Self {
        GradedElement { parts: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, grade: usize) -> Option<&[S]> {
        self.parts.get(&grade).map(Vec::as_slice)
    }

    pub fn grades(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts.keys().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        for (g, v) in &other.parts {
            let slot = parts.entry(*g).or_insert_with(|| vec![S::zero(); v.len()]);
            for (a, b) in slot.iter_mut().zip(v) {
                *a = a.clone() + b.clone();
            }
        }
        parts.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        GradedElement { parts }
    }
}

/// The graded `F[t]`-module `α(M)`: `t` sends grade `i` to grade `i+1`
/// through `φ_i`.
#[derive(Clone, Debug)]
pub struct GradedModule<S> {
    module: PersistenceModule<S>,
}

impl<S: Field> GradedModule<S> {
    pub fn components(&self) -> &[usize] {
        self.module.dims()
    }

    /// Matrix of `t` on grade `i`.
    pub fn t_matrix(&self, i: usize) -> &Matrix<S> {
        self.module.map(i)
    }

    /// `t · x`. Parts in the top grade `N` go to `M_{N+1} = 0`.
    pub fn act_t(&self, x: &GradedElement<S>) -> GradedElement<S> {
        let mut out = GradedElement::zero();
        for (g, v) in &x.parts {
            if *g < self.module.len() {
                out = out.add(&GradedElement::homogeneous(g + 1, self.module.map(*g).mul_vec(v)));
            }
        }
        out
    }

    pub fn act_t_pow(&self, k: usize, x: &GradedElement<S>) -> GradedElement<S> {
        (0..k).fold(x.clone(), |acc, _| self.act_t(&acc))
    }

    /// Homogeneous generators: the unit vectors of every grade.
    pub fn generators(&self) -> Vec<GradedElement<S>> {
        self.module
            .dims()
            .iter()
            .enumerate()
            .flat_map(|(g, &d)| unit_vectors::<S>(d).into_iter().map(move |v| GradedElement::homogeneous(g, v)))
            .collect()
    }

    pub fn module(&self) -> &PersistenceModule<S> {
        &self.module
    }
}

pub fn alpha<S: Field>(m: &PersistenceModule<S>) -> GradedModule<S> {
    GradedModule { module: m.clone() }
}

/// `H^k(K_0) -> H^k(K_1) -> … -> H^k(K_N)` with cochain data kept for the
/// persistent-group queries.
#[derive(Clone, Debug)]
pub struct CohomologyTower<S> {
    pub degree: usize,
    pub module: PersistenceModule<S>,
    slices: Vec<SimplicialComplex>,
    groups: Vec<Subquotient<S>>,
}

impl<S: Field> CohomologyTower<S> {
    pub fn group(&self, i: usize) -> &Subquotient<S> {
        &self.groups[i]
    }

    pub fn len(&self) -> usize {
        self.module.len()
    }

    pub fn is_empty(&self) -> bool {
        self.module.is_empty()
    }
}

pub fn cohomology_tower<S: Field>(k: &FilteredComplex, degree: usize) -> CohomologyTower<S> {
    let slices: Vec<SimplicialComplex> = (0..=k.len()).map(|i| k.slice(i).expect("in range")).collect();
    let groups: Vec<Subquotient<S>> = slices.iter().map(|s| s.cohomology::<S>(degree)).collect();
    let maps = (0..k.len())
        .map(|i| {
            let res = restriction::<S>(&slices[i], &slices[i + 1], degree);
            induced_map(&groups[i], &groups[i + 1], &res).expect("restriction is a cochain map")
        })
        .collect();
    let dims = groups.iter().map(Subquotient::dim).collect();
    CohomologyTower {
        degree,
        module: PersistenceModule::new(dims, maps).expect("shapes chain"),
        slices,
        groups,
    }
}

/// `rank(φ_{i+p-1} ∘ … ∘ φ_i)`, indices clamped to `[0, N]`.
pub fn persistent_dim_by_rank<S: Field>(tower: &CohomologyTower<S>, i: usize, p: usize) -> usize {
    let n = tower.len();
    let i = i.min(n);
    tower.module.rank(i, (i + p).min(n))
}

/// `dim Z_i / (B_{i+p} ∩ Z_i)`, with `Z_i` carried into `C^k(K_{i+p})` by
/// restriction.
pub fn persistent_dim_by_subquotient<S: Field>(tower: &CohomologyTower<S>, i: usize, p: usize) -> usize {
    let n = tower.len();
    let i = i.min(n);
    let j = (i + p).min(n);
    let res = restriction::<S>(&tower.slices[i], &tower.slices[j], tower.degree);
    let cycles = res.mul(tower.groups[i].cycles());
    let common = intersect_spans(&cycles, tower.groups[j].boundaries());
    subquotient_dim(cycles.rows(), cycles, common).expect("intersection lies in Z")
}

/// The `p`-persistent group dimension, computed both ways.
pub fn persistent_dim<S: Field>(tower: &CohomologyTower<S>, i: usize, p: usize) -> Result<usize, LinalgError> {
    let a = persistent_dim_by_rank(tower, i, p);
    let b = persistent_dim_by_subquotient(tower, i, p);
    if a == b {
        Ok(a)
    } else {
        Err(LinalgError::InvariantViolation(format!(
            "persistent dimension at i={i}, p={p}: composite rank {a}, subquotient {b}"
        )))
    }
}

/// The module `i ↦ E_{r,i}^{p,q}` for every bidegree, with maps `η_{r,i}`.
pub fn persistent_page_modules<S: Field>(slices: &[SpectralSlice<S>], pages: &[Page<S>]) -> Result<BTreeMap<(usize, usize), PersistenceModule<S>>, SpectralError> {
    let len = slices.len().saturating_sub(1);
    let page_maps = (0..len)
        .map(|i| eta_on_page(&slices[i], &pages[i], &slices[i + 1], &pages[i + 1]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = BTreeMap::new();
    let Some(first) = pages.first() else {
        return Ok(out);
    };
    for (p, q) in first.all_bidegrees() {
        let dims = pages.iter().map(|pg| pg.dim(p, q)).collect();
        let maps = page_maps
            .iter()
            .map(|pm| pm.map(p, q).cloned().expect("bidegree present"))
            .collect();
        out.insert((p, q), PersistenceModule::new(dims, maps)?);
    }
    Ok(out)
}

pub fn persistent_page_module<S: Field>(slices: &[SpectralSlice<S>], pages: &[Page<S>], p: usize, q: usize) -> Result<PersistenceModule<S>, SpectralError> {
    let all = persistent_page_modules(slices, pages)?;
    Ok(all
        .get(&(p, q))
        .cloned()
        .unwrap_or_else(|| PersistenceModule::zero(slices.len().saturating_sub(1))))
}

/// Every slice of an instance with its stable page.
#[derive(Clone, Debug)]
pub struct SpectralTower<S> {
    pub slices: Vec<SpectralSlice<S>>,
    pub pages: Vec<Page<S>>,
    pub r: usize,
}

impl<S: Field> SpectralTower<S> {
    /// Builds every slice and its page `r`; `None` selects a page number at
    /// which every slice has stabilised.
    pub fn build(k: &FilteredComplex, system: &CoverSystem, r: Option<usize>) -> Result<Self, Error> {
        let slices = (0..=k.len())
            .into_par_iter()
            .map(|i| SpectralSlice::build(k, system, i))
            .collect::<Result<Vec<_>, _>>()?;
        let r = r.unwrap_or_else(|| slices.iter().map(SpectralSlice::shape_bound).max().unwrap_or(0));
        let pages = slices
            .par_iter()
            .map(|s| page(s, r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SpectralTower { slices, pages, r })
    }

    pub fn max_n(&self) -> usize {
        self.slices.first().map_or(0, |s| s.dc.max_n())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceDims {
    pub index: usize,
    pub e_infinity: usize,
    pub cohomology: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeComparison {
    pub degree: usize,
    pub slices: Vec<SliceDims>,
    pub dims_agree: bool,
    pub spectral: Barcode,
    pub tower: Barcode,
    pub oracle: Barcode,
    pub barcodes_agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhComparison {
    pub page: usize,
    pub degrees: Vec<DegreeComparison>,
}

impl PhComparison {
    pub fn dims_agree(&self) -> bool {
        self.degrees.iter().all(|d| d.dims_agree)
    }

    pub fn barcodes_agree(&self) -> bool {
        self.degrees.iter().all(|d| d.barcodes_agree)
    }
}

/// Compares the persistent stable page, summed over `p + q = n`, with
/// persistent cohomology computed directly: dimensions at every index and
/// barcodes per degree.
pub fn ph_compare<S: Field>(k: &FilteredComplex, system: &CoverSystem) -> Result<PhComparison, Error> {
    let tower = SpectralTower::<S>::build(k, system, None)?;
    ph_compare_tower(k, &tower)
}

pub fn ph_compare_tower<S: Field>(k: &FilteredComplex, tower: &SpectralTower<S>) -> Result<PhComparison, Error> {
    let len = k.len();
    let modules = persistent_page_modules(&tower.slices, &tower.pages)?;
    let top = tower.max_n().max(k.dim().unwrap_or(0));
    let degrees = (0..=top)
        .into_par_iter()
        .map(|n| {
            let slices: Vec<SliceDims> = tower
                .slices
                .iter()
                .zip(&tower.pages)
                .map(|(s, pg)| SliceDims {
                    index: s.index(),
                    e_infinity: pg.total_dim(n),
                    cohomology: s.dc.slice().cohomology_dim::<S>(n),
                })
                .collect();
            let dims_agree = slices.iter().all(|d| d.e_infinity == d.cohomology);
            let parts: Vec<&PersistenceModule<S>> = modules
                .iter()
                .filter(|((p, q), _)| p + q == n)
                .map(|(_, m)| m)
                .collect();
            let assembled = PersistenceModule::direct_sum(&parts, len);
            let spectral = interval_decomposition(&assembled);
            let tower_barcode = interval_decomposition(&cohomology_tower::<S>(k, n).module);
            let oracle_barcode = oracle::direct_barcode::<S>(k, n);
            let barcodes_agree = spectral == oracle_barcode && tower_barcode == oracle_barcode;
            DegreeComparison {
                degree: n,
                slices,
                dims_agree,
                spectral,
                tower: tower_barcode,
                oracle: oracle_barcode,
                barcodes_agree,
            }
        })
        .collect();
    Ok(PhComparison {
        page: tower.r,
        degrees,
    })
}
