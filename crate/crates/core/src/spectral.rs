//! Pages of the spectral sequence of the horizontally filtered total
//! complex, their differentials, and the maps induced by restriction along
//! the filtration.
//!
//! With `F^p` the horizontal filtration and `D` the total differential,
//!
//! ```text
//! Z_r^{p}   = { x ∈ F^p Tot^n : D x ∈ F^{p+r} Tot^{n+1} }
//! E_r^{p,q} = Z_r^{p} / ( Z_{r-1}^{p+1} + D Z_{r-1}^{p-r+1} )      (n = p + q)
//! ```
//!
//! and `d_r: E_r^{p,q} -> E_r^{p+r,q-r+1}` is induced by `D`. Every page is
//! kept as an explicit [`Subquotient`] of `Tot^n`, so `d_r` and the
//! restriction maps `η` are computed with [`induced_map`], which rejects
//! maps that are not well defined.

use std::collections::BTreeMap;

use crate::complex::{restriction, FilteredComplex};
use crate::cover::CoverSystem;
use crate::doublecomplex::{total, total_restriction, DoubleComplexSlice, TotalComplex};
use crate::error::{Error, SpectralError};
use crate::field::Field;
use crate::linalg::{induced_map, kernel, Matrix, Subquotient};

/// A double complex slice together with its total complex.
#[derive(Clone, Debug)]
pub struct SpectralSlice<S> {
    pub dc: DoubleComplexSlice<S>,
    pub tc: TotalComplex<S>,
}

impl<S: Field> SpectralSlice<S> {
    pub fn build(k: &FilteredComplex, system: &CoverSystem, i: usize) -> Result<Self, Error> {
        let dc = DoubleComplexSlice::build(k, system, i)?;
        let tc = total(&dc)?;
        Ok(SpectralSlice { dc, tc })
    }

    pub fn index(&self) -> usize {
        self.dc.index()
    }

    /// First page number from which every differential vanishes for shape
    /// reasons: `d_r` leaves the box once `r > max_p` or `r > max_q + 1`.
    pub fn shape_bound(&self) -> usize {
        self.dc.n_pieces().min(self.dc.max_q() + 2)
    }

    /// `Z_r^p` in `Tot^n`, as spanning columns. `r ≤ 0` gives `F^p`.
    fn z(&self, n: i64, p: i64, r: i64) -> Matrix<S> {
        let dim = self.tc.dim(n);
        let start = self.tc.filtration_start(n, p);
        if start >= dim {
            return Matrix::zeros(dim, 0);
        }
        let cut = self.tc.filtration_start(n + 1, p.saturating_add(r.max(0)));
        let d = self.tc.differential(n);
        let ker = kernel(&d.submatrix(0..cut, start..dim));
        ker.embed_rows(dim, start)
    }

    fn e(&self, p: usize, q: usize, r: usize) -> Subquotient<S> {
        let (n, p_, r_) = ((p + q) as i64, p as i64, r as i64);
        let dim = self.tc.dim(n);
        let cycles = self.z(n, p_, r_);
        let lower = self.z(n, p_ + 1, r_ - 1);
        let image = self.tc.differential(n - 1).mul(&self.z(n - 1, p_ - r_ + 1, r_ - 1));
        let boundaries = Matrix::hstack(dim, &[&lower, &image]);
        Subquotient::new(dim, cycles, boundaries).expect("E_r boundaries lie in Z_r")
    }

    /// `E_∞^{p,q}` directly: `(F^p ∩ ker D) / (F^p ∩ im D)`.
    pub fn e_infinity_direct(&self, p: usize, q: usize) -> Subquotient<S> {
        self.e(p, q, usize::MAX / 4)
    }
}

/// `E_r` at one filtration index.
#[derive(Clone, Debug)]
pub struct Page<S> {
    r: usize,
    index: usize,
    entries: BTreeMap<(usize, usize), Subquotient<S>>,
    differentials: BTreeMap<(usize, usize), Matrix<S>>,
}

impl<S: Field> Page<S> {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn entry(&self, p: usize, q: usize) -> Option<&Subquotient<S>> {
        self.entries.get(&(p, q))
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.entry(p, q).map_or(0, Subquotient::dim)
    }

    /// Non-zero entries only.
    pub fn dims(&self) -> BTreeMap<(usize, usize), usize> {
        self.entries
            .iter()
            .filter(|(_, e)| e.dim() > 0)
            .map(|(&k, e)| (k, e.dim()))
            .collect()
    }

    pub fn all_bidegrees(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.keys().copied()
    }

    /// `Σ_{p+q=n} dim E^{p,q}`.
    pub fn total_dim(&self, n: usize) -> usize {
        self.entries
            .iter()
            .filter(|((p, q), _)| p + q == n)
            .map(|(_, e)| e.dim())
            .sum()
    }

    /// `d_r^{p,q}`; a zero matrix when the target leaves the box.
    pub fn differential(&self, p: usize, q: usize) -> Matrix<S> {
        match self.differentials.get(&(p, q)) {
            Some(m) => m.clone(),
            None => {
                let target = (q + 1).checked_sub(self.r).map_or(0, |qt| self.dim(p + self.r, qt));
                Matrix::zeros(target, self.dim(p, q))
            }
        }
    }

    /// Ranks of the non-zero differentials.
    pub fn differential_ranks(&self) -> BTreeMap<(usize, usize), usize> {
        self.differentials
            .iter()
            .map(|(&k, m)| (k, m.rank()))
            .filter(|(_, r)| *r > 0)
            .collect()
    }

    pub fn differentials_vanish(&self) -> bool {
        self.differentials.values().all(Matrix::is_zero)
    }
}

/// Computes `E_r` as subquotients of the total complex, with `d_r`.
pub fn page<S: Field>(slice: &SpectralSlice<S>, r: usize) -> Result<Page<S>, SpectralError> {
    let max_p = slice.dc.max_p();
    let max_q = slice.dc.max_q();
    let mut entries = BTreeMap::new();
    if slice.dc.n_pieces() > 0 {
        for p in 0..=max_p {
            for q in 0..=max_q {
                entries.insert((p, q), slice.e(p, q, r));
            }
        }
    }
    let mut differentials = BTreeMap::new();
    for (&(p, q), src) in &entries {
        let Some(qt) = (q + 1).checked_sub(r) else {
            continue;
        };
        let Some(dst) = entries.get(&(p + r, qt)) else {
            continue;
        };
        let d = slice.tc.differential((p + q) as i64);
        differentials.insert((p, q), induced_map(src, dst, &d)?);
    }
    Ok(Page {
        r,
        index: slice.index(),
        entries,
        differentials,
    })
}

/// The stable page together with the page number from which all
/// differentials vanish.
#[derive(Clone, Debug)]
pub struct Stable<S> {
    pub page: Page<S>,
    pub r_stable: usize,
}

/// Runs pages until they stop changing.
///
/// All differentials vanish from [`SpectralSlice::shape_bound`] on, so the
/// iteration is finite; `r_stable` is one past the last page with a non-zero
/// differential.
pub fn run_to_infinity<S: Field>(slice: &SpectralSlice<S>) -> Result<Stable<S>, SpectralError> {
    let bound = slice.shape_bound();
    let hard = slice.dc.n_pieces().max(slice.dc.max_q()) + 1;
    let mut pages = Vec::with_capacity(bound + 1);
    for r in 0..=bound {
        pages.push(page(slice, r)?);
    }
    if !pages[bound].differentials_vanish() {
        return Err(SpectralError::NonTermination(bound));
    }
    let r_stable = (0..bound)
        .rev()
        .find(|&r| !pages[r].differentials_vanish())
        .map_or(0, |r| r + 1);
    if r_stable > hard {
        return Err(SpectralError::NonTermination(hard));
    }
    let stable = pages.swap_remove(r_stable);
    let next = page(slice, r_stable + 1)?;
    if next.dims() != stable.dims() {
        return Err(SpectralError::NonTermination(r_stable + 1));
    }
    Ok(Stable {
        page: stable,
        r_stable,
    })
}

/// `E_2^{p,q}` computed the other way: cohomology of each intersection,
/// then Čech cohomology of the cover with those coefficients. Uses only the
/// intersection complexes of the slice, none of its matrices.
pub fn e2_as_cech<S: Field>(dc: &DoubleComplexSlice<S>) -> Result<BTreeMap<(usize, usize), usize>, SpectralError> {
    let n_pieces = dc.n_pieces();
    let mut dims = BTreeMap::new();
    if n_pieces == 0 {
        return Ok(dims);
    }
    for q in 0..=dc.max_q() {
        let coeffs: Vec<Vec<Subquotient<S>>> = (0..n_pieces)
            .map(|p| dc.layer(p).complexes.iter().map(|c| c.cohomology::<S>(q)).collect())
            .collect();
        let total: Vec<usize> = coeffs.iter().map(|h| h.iter().map(Subquotient::dim).sum()).collect();
        let offsets: Vec<Vec<usize>> = coeffs
            .iter()
            .map(|h| {
                let mut acc = vec![0];
                for x in h {
                    acc.push(acc.last().unwrap() + x.dim());
                }
                acc
            })
            .collect();
        let mut ranks = vec![0usize; n_pieces];
        for p in 0..n_pieces.saturating_sub(1) {
            let lower = dc.layer(p);
            let upper = dc.layer(p + 1);
            let mut delta: Matrix<S> = Matrix::zeros(total[p + 1], total[p]);
            for (kt, t) in upper.tuples.iter().enumerate() {
                for j in 0..=p + 1 {
                    let face = t.omit(j);
                    let kf = lower.tuples.iter().position(|x| *x == face).expect("face tuple");
                    let res = restriction::<S>(&lower.complexes[kf], &upper.complexes[kt], q);
                    let block = induced_map(&coeffs[p][kf], &coeffs[p + 1][kt], &res)?.scale(&S::sign(j));
                    let (r0, c0) = (offsets[p + 1][kt], offsets[p][kf]);
                    for a in 0..block.rows() {
                        for b in 0..block.cols() {
                            let v = delta[(r0 + a, c0 + b)].clone() + block[(a, b)].clone();
                            delta[(r0 + a, c0 + b)] = v;
                        }
                    }
                }
            }
            ranks[p] = delta.rank();
        }
        for p in 0..n_pieces {
            let below = if p == 0 { 0 } else { ranks[p - 1] };
            dims.insert((p, q), total[p] - ranks[p] - below);
        }
    }
    Ok(dims)
}

/// Compares [`e2_as_cech`] with the filtered-complex page 2.
pub fn check_e2<S: Field>(slice: &SpectralSlice<S>, page2: &Page<S>) -> Result<(), SpectralError> {
    assert_eq!(page2.r(), 2);
    let cech = e2_as_cech(&slice.dc)?;
    for (&(p, q), &c) in &cech {
        let d = page2.dim(p, q);
        if c != d {
            return Err(SpectralError::Mismatch { p, q, page: d, cech: c });
        }
    }
    for ((p, q), d) in page2.dims() {
        if !cech.contains_key(&(p, q)) {
            return Err(SpectralError::Mismatch { p, q, page: d, cech: 0 });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCheck {
    pub n: usize,
    pub e_infinity: usize,
    pub cohomology: usize,
}

impl DegreeCheck {
    pub fn ok(&self) -> bool {
        self.e_infinity == self.cohomology
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub index: usize,
    pub r_stable: usize,
    pub degrees: Vec<DegreeCheck>,
}

impl ConvergenceReport {
    pub fn ok(&self) -> bool {
        self.degrees.iter().all(DegreeCheck::ok)
    }

    pub fn violations(&self) -> impl Iterator<Item = &DegreeCheck> {
        self.degrees.iter().filter(|d| !d.ok())
    }
}

/// `Σ_{p+q=n} dim E_∞^{p,q}` against `dim H^n(K_i)` computed directly on the
/// slice, for every total degree.
pub fn convergence_check<S: Field>(slice: &SpectralSlice<S>) -> Result<ConvergenceReport, SpectralError> {
    let stable = run_to_infinity(slice)?;
    let k = slice.dc.slice();
    let top = slice.dc.max_n().max(k.dim().unwrap_or(0));
    let degrees = (0..=top)
        .map(|n| DegreeCheck {
            n,
            e_infinity: stable.page.total_dim(n),
            cohomology: k.cohomology_dim::<S>(n),
        })
        .collect();
    Ok(ConvergenceReport {
        index: slice.index(),
        r_stable: stable.r_stable,
        degrees,
    })
}

/// Maps `E_{r,i}^{p,q} -> E_{r,j}^{p,q}` induced by cochain restriction.
#[derive(Clone, Debug)]
pub struct PageMap<S> {
    pub r: usize,
    pub source: usize,
    pub target: usize,
    pub maps: BTreeMap<(usize, usize), Matrix<S>>,
}

impl<S: Field> PageMap<S> {
    pub fn map(&self, p: usize, q: usize) -> Option<&Matrix<S>> {
        self.maps.get(&(p, q))
    }
}

/// Induced map between pages at the same `r` for slices `i ≤ j`.
pub fn induced_page_map<S: Field>(
    from: &SpectralSlice<S>,
    from_page: &Page<S>,
    to: &SpectralSlice<S>,
    to_page: &Page<S>,
) -> Result<PageMap<S>, SpectralError> {
    if from_page.r() != to_page.r() || to.index() < from.index() {
        return Err(SpectralError::PageMismatch {
            r0: from_page.r(),
            i0: from.index(),
            r1: to_page.r(),
            i1: to.index(),
        });
    }
    let mut maps = BTreeMap::new();
    let mut restrictions: BTreeMap<usize, Matrix<S>> = BTreeMap::new();
    for (p, q) in from_page.all_bidegrees() {
        let n = p + q;
        let res = restrictions
            .entry(n)
            .or_insert_with(|| total_restriction(&from.dc, &from.tc, &to.dc, &to.tc, n));
        let src = from_page.entry(p, q).expect("bidegree listed");
        let dst = match to_page.entry(p, q) {
            Some(e) => e.clone(),
            None => Subquotient::zero(to.tc.dim(n as i64)),
        };
        maps.insert((p, q), induced_map(src, &dst, res)?);
    }
    Ok(PageMap {
        r: from_page.r(),
        source: from.index(),
        target: to.index(),
        maps,
    })
}

/// `η_{r,i}: E_{r,i} -> E_{r,i+1}`.
pub fn eta_on_page<S: Field>(
    from: &SpectralSlice<S>,
    from_page: &Page<S>,
    to: &SpectralSlice<S>,
    to_page: &Page<S>,
) -> Result<PageMap<S>, SpectralError> {
    if to.index() != from.index() + 1 || from_page.index() != from.index() || to_page.index() != to.index() {
        return Err(SpectralError::PageMismatch {
            r0: from_page.r(),
            i0: from_page.index(),
            r1: to_page.r(),
            i1: to_page.index(),
        });
    }
    induced_page_map(from, from_page, to, to_page)
}

/// Cochain-level commuting squares for the restriction `i -> j`:
/// `d ∘ η = η ∘ d` and `δ ∘ η = η ∘ δ` on every block. Returns the failing
/// bidegrees.
pub fn restriction_square_failures<S: Field>(from: &DoubleComplexSlice<S>, to: &DoubleComplexSlice<S>) -> Vec<(usize, usize, &'static str)> {
    let mut bad = Vec::new();
    for p in 0..=from.max_p() {
        for q in 0..=from.max_q() {
            let eta = from.restriction_to(to, p, q);
            let lhs = to.vert_d(p, q).mul(&eta);
            let rhs = from.restriction_to(to, p, q + 1).mul(&from.vert_d(p, q));
            if lhs != rhs {
                bad.push((p, q, "vertical"));
            }
            let lhs = to.delta(p, q).mul(&eta);
            let rhs = from.restriction_to(to, p + 1, q).mul(&from.delta(p, q));
            if lhs != rhs {
                bad.push((p, q, "cech"));
            }
        }
    }
    bad
}

/// Restriction preserves the horizontal filtration: `η(F^p Tot_i) ⊆ F^p Tot_j`.
pub fn restriction_respects_filtration<S: Field>(from: &SpectralSlice<S>, to: &SpectralSlice<S>) -> bool {
    (0..=from.dc.max_n()).all(|n| {
        let res = total_restriction(&from.dc, &from.tc, &to.dc, &to.tc, n);
        (0..=from.dc.max_p()).all(|p| {
            let src = from.tc.filtration_start(n as i64, p as i64);
            let dst = to.tc.filtration_start(n as i64, p as i64);
            let block = res.submatrix(0..dst, src..res.cols());
            block.is_zero()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Simplex, SimplicialComplex};
    use crate::cover::{CoverPiece, SimplicialMap};
    use crate::field::Fp;

    type F2 = Fp<2>;
    type F3 = Fp<3>;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn circle() -> (FilteredComplex, CoverSystem) {
        let c = SimplicialComplex::closure([s(&[0, 1]), s(&[0, 2]), s(&[1, 2])]);
        let k = FilteredComplex::build(c.iter().map(|x| (x.clone(), 1))).unwrap().0;
        let pieces = vec![
            CoverPiece::new(1, SimplicialComplex::closure([s(&[0, 1]), s(&[1, 2])])),
            CoverPiece::new(2, SimplicialComplex::closure([s(&[0, 2])])),
        ];
        let sys = CoverSystem::new(&c, c.clone(), SimplicialMap::identity(&c), pieces).unwrap();
        (k, sys)
    }

    #[test]
    fn circle_pages() {
        let (k, sys) = circle();
        let sl = SpectralSlice::<F2>::build(&k, &sys, 0).unwrap();
        let e0 = page(&sl, 0).unwrap();
        assert_eq!(e0.dim(0, 0), 5);
        assert_eq!(e0.dim(1, 0), 2);
        assert_eq!(e0.dim(0, 1), 3);

        let e1 = page(&sl, 1).unwrap();
        assert_eq!(e1.dims(), BTreeMap::from([((0, 0), 2), ((1, 0), 2)]));
        assert_eq!(e1.differential(0, 0).rank(), 1);

        let e2 = page(&sl, 2).unwrap();
        assert_eq!(e2.dims(), BTreeMap::from([((0, 0), 1), ((1, 0), 1)]));
        check_e2(&sl, &e2).unwrap();

        let st = run_to_infinity(&sl).unwrap();
        assert_eq!(st.r_stable, 2);
        let report = convergence_check(&sl).unwrap();
        assert!(report.ok());
        assert_eq!(report.degrees[1], DegreeCheck { n: 1, e_infinity: 1, cohomology: 1 });
    }

    #[test]
    fn page_recurrence_and_shrinking() {
        let (k, sys) = circle();
        let sl = SpectralSlice::<F3>::build(&k, &sys, 0).unwrap();
        for r in 0..3 {
            let cur = page(&sl, r).unwrap();
            let next = page(&sl, r + 1).unwrap();
            for (p, q) in cur.all_bidegrees() {
                let out = cur.differential(p, q).rank();
                let inc = if p >= r && q + r >= 1 {
                    cur.differential(p - r, q + r - 1).rank()
                } else {
                    0
                };
                assert_eq!(next.dim(p, q), cur.dim(p, q) - out - inc, "r={r} ({p},{q})");
                assert!(next.dim(p, q) <= cur.dim(p, q));
            }
        }
    }

    #[test]
    fn single_piece_collapses_at_page_one() {
        let c = SimplicialComplex::closure([s(&[0, 1]), s(&[0, 2]), s(&[1, 2]), s(&[2, 3])]);
        let k = FilteredComplex::build(c.iter().map(|x| (x.clone(), 1))).unwrap().0;
        let sys = CoverSystem::new(&c, c.clone(), SimplicialMap::identity(&c), vec![CoverPiece::new(0, c.clone())]).unwrap();
        let sl = SpectralSlice::<F2>::build(&k, &sys, 0).unwrap();
        let e1 = page(&sl, 1).unwrap();
        for q in 0..=1 {
            assert_eq!(e1.dim(0, q), c.cohomology_dim::<F2>(q));
        }
        let st = run_to_infinity(&sl).unwrap();
        assert_eq!(st.r_stable, 1);
        assert_eq!(e2_as_cech(&sl.dc).unwrap()[&(0, 1)], 1);
    }

    #[test]
    fn empty_slice_is_all_zero() {
        let (k, sys) = circle();
        let sl = SpectralSlice::<F2>::build(&k, &sys, 1).unwrap();
        let e2 = page(&sl, 2).unwrap();
        assert!(e2.dims().is_empty());
        assert!(e2_as_cech(&sl.dc).unwrap().values().all(|&d| d == 0));
        let rep = convergence_check(&sl).unwrap();
        assert!(rep.ok());
        assert!(rep.degrees.iter().all(|d| d.cohomology == 0));
    }

    #[test]
    fn stable_page_matches_direct_e_infinity() {
        let (k, sys) = circle();
        let sl = SpectralSlice::<F3>::build(&k, &sys, 0).unwrap();
        let st = run_to_infinity(&sl).unwrap();
        for (p, q) in st.page.all_bidegrees() {
            assert_eq!(st.page.dim(p, q), sl.e_infinity_direct(p, q).dim());
        }
    }

    #[test]
    fn page_maps_reject_mismatched_pages() {
        let (k, sys) = circle();
        let a = SpectralSlice::<F2>::build(&k, &sys, 0).unwrap();
        let b = SpectralSlice::<F2>::build(&k, &sys, 1).unwrap();
        let pa = page(&a, 2).unwrap();
        let pb = page(&b, 1).unwrap();
        assert!(matches!(eta_on_page(&a, &pa, &b, &pb), Err(SpectralError::PageMismatch { .. })));
        let pb2 = page(&b, 2).unwrap();
        let m = eta_on_page(&a, &pa, &b, &pb2).unwrap();
        assert!(m.maps.values().all(|x| x.rows() == 0));
        assert!(matches!(eta_on_page(&b, &pb2, &a, &pa), Err(SpectralError::PageMismatch { .. })));
    }
}
