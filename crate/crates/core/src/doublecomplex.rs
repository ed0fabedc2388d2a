//! The Čech–cochain double complex of a pulled-back cover at one filtration
//! index, and its total complex.
//!
//! `C^{p,q}_i = ⊕_{α_0<…<α_p} C^q(K_i ∩ f^{-1}(U_{α_0…α_p}))`. The basis of
//! `C^{p,q}` runs over tuples in lexicographic order and, within a tuple,
//! over `q`-simplices of the intersection in canonical order. The total
//! complex orders `Tot^n = ⊕_{p+q=n} C^{p,q}` by increasing `p`, so the
//! horizontal filtration `F^p Tot^n = ⊕_{p'≥p} C^{p',n-p'}` is a suffix of
//! the basis.

use std::collections::{BTreeMap, HashMap};

use crate::complex::{restriction, FilteredComplex, SimplicialComplex};
use crate::cover::{CoverSystem, NerveTuple};
use crate::error::{ComplexError, SpectralError};
use crate::field::Field;
use crate::linalg::Matrix;

/// Intersections for all tuples of one Čech degree.
#[derive(Clone, Debug)]
pub struct TupleLayer {
    pub tuples: Vec<NerveTuple>,
    pub complexes: Vec<SimplicialComplex>,
    lookup: HashMap<NerveTuple, usize>,
}

impl TupleLayer {
    fn position(&self, t: &NerveTuple) -> usize {
        self.lookup[t]
    }
}

#[derive(Clone, Debug)]
pub struct DoubleComplexSlice<S> {
    index: usize,
    max_q: usize,
    slice: SimplicialComplex,
    layers: Vec<TupleLayer>,
    // offsets[p][q][k] = first basis index of tuple k in C^{p,q}; last entry is the dim
    offsets: Vec<Vec<Vec<usize>>>,
    delta: BTreeMap<(usize, usize), Matrix<S>>,
    vert: BTreeMap<(usize, usize), Matrix<S>>,
}

impl<S: Field> DoubleComplexSlice<S> {
    /// Builds the slice at filtration index `i`. Shapes use the dimension of
    /// the whole complex so that slices at different indices line up.
    pub fn build(k: &FilteredComplex, system: &CoverSystem, i: usize) -> Result<Self, ComplexError> {
        let slice = k.slice(i)?;
        let max_q = k.dim().unwrap_or(0);
        let n_pieces = system.n_pieces();

        let layers: Vec<TupleLayer> = (0..n_pieces)
            .map(|p| {
                let tuples = NerveTuple::all_of_degree(n_pieces, p);
                let complexes = tuples.iter().map(|t| system.intersect(t, &slice)).collect();
                let lookup = tuples.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect();
                TupleLayer {
                    tuples,
                    complexes,
                    lookup,
                }
            })
            .collect();

        let offsets: Vec<Vec<Vec<usize>>> = layers
            .iter()
            .map(|layer| {
                (0..=max_q)
                    .map(|q| {
                        let mut acc = vec![0];
                        for c in &layer.complexes {
                            acc.push(acc.last().unwrap() + c.count(q));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();

        let mut dc = DoubleComplexSlice {
            index: i,
            max_q,
            slice,
            layers,
            offsets,
            delta: BTreeMap::new(),
            vert: BTreeMap::new(),
        };
        for p in 0..n_pieces {
            for q in 0..=max_q {
                if dc.dim(p, q) == 0 {
                    continue;
                }
                let d = dc.build_delta(p, q);
                dc.delta.insert((p, q), d);
                let v = dc.build_vert(p, q);
                dc.vert.insert((p, q), v);
            }
        }
        Ok(dc)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn slice(&self) -> &SimplicialComplex {
        &self.slice
    }

    pub fn n_pieces(&self) -> usize {
        self.layers.len()
    }

    /// Largest `p` with a possibly non-zero column.
    pub fn max_p(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn max_q(&self) -> usize {
        self.max_q
    }

    /// Largest total degree with a possibly non-zero block.
    pub fn max_n(&self) -> usize {
        self.max_p() + self.max_q
    }

    pub fn layer(&self, p: usize) -> &TupleLayer {
        &self.layers[p]
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.offsets
            .get(p)
            .and_then(|o| o.get(q))
            .map_or(0, |o| *o.last().unwrap())
    }

    /// Keys `(p, q)` of non-zero blocks.
    pub fn nonzero_blocks(&self) -> Vec<(usize, usize)> {
        self.delta.keys().copied().collect()
    }

    fn offset(&self, p: usize, q: usize, k: usize) -> usize {
        self.offsets[p][q][k]
    }

    /// Čech differential: the component at `(α_0…α_{p+1})` is
    /// `Σ_j (-1)^j` times the restriction from the tuple omitting `α_j`.
    fn build_delta(&self, p: usize, q: usize) -> Matrix<S> {
        let mut m = Matrix::zeros(self.dim(p + 1, q), self.dim(p, q));
        let Some(upper) = self.layers.get(p + 1) else {
            return m;
        };
        let lower = &self.layers[p];
        for (kt, (t, c)) in upper.tuples.iter().zip(&upper.complexes).enumerate() {
            let row0 = self.offset(p + 1, q, kt);
            for (r, sigma) in c.simplices(q).iter().enumerate() {
                for j in 0..=p + 1 {
                    let face = t.omit(j);
                    let kf = lower.position(&face);
                    let pos = lower.complexes[kf]
                        .position(sigma)
                        .expect("smaller intersection contains the larger one");
                    let col = self.offset(p, q, kf) + pos;
                    let v = m[(row0 + r, col)].clone() + S::sign(j);
                    m[(row0 + r, col)] = v;
                }
            }
        }
        m
    }

    fn build_vert(&self, p: usize, q: usize) -> Matrix<S> {
        let mut m = Matrix::zeros(self.dim(p, q + 1), self.dim(p, q));
        if q >= self.max_q {
            return m;
        }
        for (k, c) in self.layers[p].complexes.iter().enumerate() {
            if c.count(q) == 0 {
                continue;
            }
            let block = c.coboundary::<S>(q);
            m.set_block(self.offset(p, q + 1, k), self.offset(p, q, k), &block);
        }
        m
    }

    /// `δ: C^{p,q} -> C^{p+1,q}`.
    pub fn delta(&self, p: usize, q: usize) -> Matrix<S> {
        self.delta
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim(p + 1, q), self.dim(p, q)))
    }

    /// `d: C^{p,q} -> C^{p,q+1}`.
    pub fn vert_d(&self, p: usize, q: usize) -> Matrix<S> {
        self.vert
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim(p, q + 1), self.dim(p, q)))
    }

    /// Cochain restriction `C^{p,q}_i -> C^{p,q}_j` for a slice at a later
    /// index `j ≥ i` of the same filtration and cover.
    pub fn restriction_to(&self, later: &DoubleComplexSlice<S>, p: usize, q: usize) -> Matrix<S> {
        let mut m = Matrix::zeros(later.dim(p, q), self.dim(p, q));
        if self.dim(p, q) == 0 || later.dim(p, q) == 0 {
            return m;
        }
        for (k, (from, to)) in self.layers[p]
            .complexes
            .iter()
            .zip(&later.layers[p].complexes)
            .enumerate()
        {
            let block = restriction::<S>(from, to, q);
            m.set_block(later.offset(p, q, k), self.offset(p, q, k), &block);
        }
        m
    }

    /// Bidegrees `(p, q)` with `p + q = n` inside the first quadrant box.
    pub fn bidegrees(&self, n: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.max_p().min(n))
            .map(move |p| (p, n - p))
            .filter(move |&(_, q)| q <= self.max_q)
    }
}

pub fn build_slice<S: Field>(k: &FilteredComplex, system: &CoverSystem, i: usize) -> Result<DoubleComplexSlice<S>, ComplexError> {
    DoubleComplexSlice::build(k, system, i)
}

pub fn cech_delta<S: Field>(slice: &DoubleComplexSlice<S>, p: usize, q: usize) -> Matrix<S> {
    slice.delta(p, q)
}

/// One degree of the total complex.
#[derive(Clone, Debug)]
pub struct TotalDegree<S> {
    pub dim: usize,
    /// `p -> (start, len)` for each column block present in this degree.
    pub blocks: BTreeMap<usize, (usize, usize)>,
    /// `D_n: Tot^n -> Tot^{n+1}`.
    pub differential: Matrix<S>,
}

#[derive(Clone, Debug)]
pub struct TotalComplex<S> {
    degrees: Vec<TotalDegree<S>>,
}

impl<S: Field> TotalComplex<S> {
    pub fn max_n(&self) -> usize {
        self.degrees.len().saturating_sub(1)
    }

    pub fn dim(&self, n: i64) -> usize {
        self.degree(n).map_or(0, |d| d.dim)
    }

    pub fn degree(&self, n: i64) -> Option<&TotalDegree<S>> {
        usize::try_from(n).ok().and_then(|n| self.degrees.get(n))
    }

    /// `D_n`, with zero matrices outside the stored range.
    pub fn differential(&self, n: i64) -> Matrix<S> {
        match self.degree(n) {
            Some(d) => d.differential.clone(),
            None => Matrix::zeros(self.dim(n + 1), self.dim(n)),
        }
    }

    /// First basis index of `F^p Tot^n`. Returns 0 for `p ≤ 0` and the full
    /// dimension when `p` exceeds every column present.
    pub fn filtration_start(&self, n: i64, p: i64) -> usize {
        let Some(d) = self.degree(n) else {
            return 0;
        };
        if p <= 0 {
            return 0;
        }
        d.blocks
            .range(p as usize..)
            .next()
            .map_or(d.dim, |(_, &(start, _))| start)
    }

    /// Basis range of the column block `C^{p, n-p}` inside `Tot^n`.
    pub fn block_range(&self, n: usize, p: usize) -> std::ops::Range<usize> {
        match self.degrees.get(n).and_then(|d| d.blocks.get(&p)) {
            Some(&(start, len)) => start..start + len,
            None => 0..0,
        }
    }
}

// dimension of Tot^n and p -> (start, len) of each column block
type DegreeLayout = (usize, BTreeMap<usize, (usize, usize)>);

/// Assembles `D = δ + (-1)^p d` and checks `D² = 0`.
pub fn total<S: Field>(slice: &DoubleComplexSlice<S>) -> Result<TotalComplex<S>, SpectralError> {
    let max_n = slice.max_n();
    let layout: Vec<DegreeLayout> = (0..=max_n + 1)
        .map(|n| {
            let mut blocks = BTreeMap::new();
            let mut off = 0;
            for (p, q) in slice.bidegrees(n) {
                let len = slice.dim(p, q);
                blocks.insert(p, (off, len));
                off += len;
            }
            (off, blocks)
        })
        .collect();

    let mut degrees = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        let (dim, blocks) = &layout[n];
        let (next_dim, next_blocks) = &layout[n + 1];
        let mut dn = Matrix::zeros(*next_dim, *dim);
        for (&p, &(start, len)) in blocks {
            if len == 0 {
                continue;
            }
            let q = n - p;
            if let Some(&(row, rlen)) = next_blocks.get(&(p + 1)) {
                if rlen > 0 {
                    dn.set_block(row, start, &slice.delta(p, q));
                }
            }
            if let Some(&(row, rlen)) = next_blocks.get(&p) {
                if rlen > 0 {
                    dn.set_block(row, start, &slice.vert_d(p, q).scale(&S::sign(p)));
                }
            }
        }
        degrees.push(TotalDegree {
            dim: *dim,
            blocks: blocks.clone(),
            differential: dn,
        });
    }
    let tc = TotalComplex { degrees };
    for n in 0..max_n {
        let dd = tc.differential(n as i64 + 1).mul(&tc.differential(n as i64));
        if !dd.is_zero() {
            return Err(SpectralError::SignError(n as i64));
        }
    }
    Ok(tc)
}

/// `dim ker D_n − rank D_{n−1}`.
pub fn total_cohomology_dim<S: Field>(tc: &TotalComplex<S>, n: usize) -> usize {
    let n = n as i64;
    tc.dim(n) - tc.differential(n).rank() - tc.differential(n - 1).rank()
}

/// Cochain restriction `Tot^n_i -> Tot^n_j` for `j ≥ i`, block diagonal in `p`.
pub fn total_restriction<S: Field>(
    from: &DoubleComplexSlice<S>,
    from_tc: &TotalComplex<S>,
    to: &DoubleComplexSlice<S>,
    to_tc: &TotalComplex<S>,
    n: usize,
) -> Matrix<S> {
    let mut m = Matrix::zeros(to_tc.dim(n as i64), from_tc.dim(n as i64));
    for (p, q) in from.bidegrees(n) {
        let src = from_tc.block_range(n, p);
        let dst = to_tc.block_range(n, p);
        if src.is_empty() || dst.is_empty() {
            continue;
        }
        m.set_block(dst.start, src.start, &from.restriction_to(to, p, q));
    }
    m
}
