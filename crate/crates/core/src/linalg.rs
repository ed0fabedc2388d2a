//! Exact dense linear algebra over a [`Field`].
//!
//! Matrices act on column vectors. Subspaces are always carried as matrices
//! whose columns span them; nothing here assumes the spanning set is
//! independent unless stated.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::LinalgError;
use crate::field::Field;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Field> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<S>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged row");
            data.extend(row);
        }
        Matrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column of wrong length");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    /// Integer entries reduced into the field.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| S::from_i64(x)).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "incompatible shapes for product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let v = out[(i, j)].clone() + a.clone() * b.clone();
                        out[(i, j)] = v;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "vector of wrong length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.shape(), rhs.shape(), "incompatible shapes for sum");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Horizontal concatenation. All blocks must have `rows` rows.
    pub fn hstack(rows: usize, blocks: &[&Matrix<S>]) -> Matrix<S> {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.cols;
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix<S> {
        let mut out = Self::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Copy of the block `rows x cols` given as half-open ranges.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix<S> {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (ii, i) in rows.enumerate() {
            for (jj, j) in cols.clone().enumerate() {
                out[(ii, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<S>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Embeds the columns of `self` into a larger ambient space, placing
    /// row `i` at row `offset + i`.
    pub fn embed_rows(&self, ambient: usize, offset: usize) -> Matrix<S> {
        let mut out = Self::zeros(ambient, self.cols);
        out.set_block(offset, 0, self);
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        reduce(&mut m).len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.data[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|x| format!("{x:?}"))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
fn reduce<S: Field>(m: &mut Matrix<S>) -> Vec<usize> {
    reduce_leading(m, m.cols)
}

/// Like [`reduce`] but only pivots within the first `lead` columns; the
/// remaining columns are carried along as augmentation.
fn reduce_leading<S: Field>(m: &mut Matrix<S>, lead: usize) -> Vec<usize> {
    let (rows, cols) = m.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..lead {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = m[(r, c)].inverse().expect("nonzero pivot");
        for j in c..cols {
            let v = m[(r, j)].clone() * inv.clone();
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let factor = m[(i, c)].clone();
            for j in c..cols {
                if m[(r, j)].is_zero() {
                    continue;
                }
                let v = m[(i, j)].clone() - factor.clone() * m[(r, j)].clone();
                m[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Field>(m: &Matrix<S>) -> usize {
    m.rank()
}

/// Basis of the null space, one kernel vector per column.
pub fn kernel<S: Field>(m: &Matrix<S>) -> Matrix<S> {
    let mut r = m.clone();
    let pivots = reduce(&mut r);
    let n = m.cols();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
    let mut out = Matrix::zeros(n, free.len());
    for (k, &f) in free.iter().enumerate() {
        out[(f, k)] = S::one();
        for (row, &p) in pivots.iter().enumerate() {
            out[(p, k)] = -r[(row, f)].clone();
        }
    }
    out
}

/// Indices of a maximal independent subset of the columns, chosen greedily
/// left to right.
pub fn independent_columns<S: Field>(m: &Matrix<S>) -> Vec<usize> {
    let mut r = m.clone();
    reduce(&mut r)
}

/// An independent subset of the columns spanning the same space.
pub fn column_basis<S: Field>(m: &Matrix<S>) -> Matrix<S> {
    m.select_columns(&independent_columns(m))
}

/// Some `x` with `a x = b`, or `None` when `b` is outside the column space.
pub fn solve<S: Field>(a: &Matrix<S>, b: &[S]) -> Result<Option<Vec<S>>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let n = a.cols();
    let rhs = Matrix::from_columns(a.rows(), &[b.to_vec()]);
    let mut aug = Matrix::hstack(a.rows(), &[a, &rhs]);
    let pivots = reduce_leading(&mut aug, n);
    let rank = pivots.len();
    if (rank..a.rows()).any(|i| !aug[(i, n)].is_zero()) {
        return Ok(None);
    }
    let mut x = vec![S::zero(); n];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = aug[(row, n)].clone();
    }
    Ok(Some(x))
}

/// Basis of `span(a) ∩ span(b)`.
pub fn intersect_spans<S: Field>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    assert_eq!(a.rows(), b.rows());
    let neg_b = b.scale(&-S::one());
    let stacked = Matrix::hstack(a.rows(), &[a, &neg_b]);
    let ker = kernel(&stacked);
    let a_part = ker.submatrix(0..a.cols(), 0..ker.cols());
    column_basis(&a.mul(&a_part))
}

/// Coordinates with respect to a fixed independent set of columns.
///
/// Built once by eliminating `[basis | I]`; afterwards every membership test
/// and coordinate lookup is a matrix-vector product.
#[derive(Clone, Debug)]
pub struct SpanSolver<S> {
    basis: Matrix<S>,
    top: Matrix<S>,
    bottom: Matrix<S>,
}

impl<S: Field> SpanSolver<S> {
    /// `columns` may be dependent; a greedy basis is extracted first.
    pub fn new(columns: &Matrix<S>) -> Self {
        let basis = column_basis(columns);
        Self::from_independent(basis)
    }

    fn from_independent(basis: Matrix<S>) -> Self {
        let n = basis.rows();
        let k = basis.cols();
        let id = Matrix::identity(n);
        let mut aug = Matrix::hstack(n, &[&basis, &id]);
        let pivots = reduce_leading(&mut aug, k);
        debug_assert_eq!(pivots.len(), k, "basis columns must be independent");
        SpanSolver {
            top: aug.submatrix(0..k, k..k + n),
            bottom: aug.submatrix(k..n, k..k + n),
            basis,
        }
    }

    pub fn basis(&self) -> &Matrix<S> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    pub fn contains(&self, v: &[S]) -> bool {
        self.bottom.mul_vec(v).iter().all(|x| x.is_zero())
    }

    pub fn coordinates(&self, v: &[S]) -> Option<Vec<S>> {
        self.contains(v).then(|| self.top.mul_vec(v))
    }
}

/// A subquotient `span(Z) / span(B)` of an ambient coordinate space, with
/// a chosen basis of representatives for the quotient.
#[derive(Clone, Debug)]
pub struct Subquotient<S> {
    ambient: usize,
    cycles: Matrix<S>,
    boundaries: Matrix<S>,
    boundary_rank: usize,
    reps: Matrix<S>,
    // spans Z; coordinates are [boundary basis | reps]
    solver: SpanSolver<S>,
}

impl<S: Field> Subquotient<S> {
    pub fn new(ambient: usize, cycles: Matrix<S>, boundaries: Matrix<S>) -> Result<Self, LinalgError> {
        for m in [&cycles, &boundaries] {
            if m.rows() != ambient {
                return Err(LinalgError::DimensionMismatch {
                    expected: ambient,
                    found: m.rows(),
                });
            }
        }
        let both = Matrix::hstack(ambient, &[&boundaries, &cycles]);
        let idx = independent_columns(&both);
        let nb = boundaries.cols();
        let boundary_idx: Vec<usize> = idx.iter().copied().filter(|&j| j < nb).collect();
        let rep_idx: Vec<usize> = idx.iter().copied().filter(|&j| j >= nb).collect();
        let cycle_rank = cycles.rank();
        if idx.len() != cycle_rank {
            return Err(LinalgError::InvariantViolation(format!(
                "span(B) is not contained in span(Z): rank(Z) = {}, rank(Z + B) = {}",
                cycle_rank,
                idx.len()
            )));
        }
        let reps = both.select_columns(&rep_idx);
        let solver = SpanSolver::from_independent(both.select_columns(&idx));
        Ok(Subquotient {
            ambient,
            cycles,
            boundaries,
            boundary_rank: boundary_idx.len(),
            reps,
            solver,
        })
    }

    /// The zero subquotient of an ambient space.
    pub fn zero(ambient: usize) -> Self {
        Self::new(ambient, Matrix::zeros(ambient, 0), Matrix::zeros(ambient, 0))
            .expect("zero subquotient is valid")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.reps.cols()
    }

    pub fn cycles(&self) -> &Matrix<S> {
        &self.cycles
    }

    pub fn boundaries(&self) -> &Matrix<S> {
        &self.boundaries
    }

    pub fn cycle_rank(&self) -> usize {
        self.solver.dim()
    }

    pub fn boundary_rank(&self) -> usize {
        self.boundary_rank
    }

    /// Representatives of the quotient basis, one per column.
    pub fn representatives(&self) -> &Matrix<S> {
        &self.reps
    }

    fn boundary_basis(&self) -> Matrix<S> {
        self.solver
            .basis()
            .submatrix(0..self.ambient, 0..self.boundary_rank)
    }

    pub fn contains_cycle(&self, v: &[S]) -> bool {
        self.solver.contains(v)
    }

    /// Coordinates of the class of `v` in the quotient basis; `None` if `v`
    /// is not in `span(Z)`.
    pub fn class_of(&self, v: &[S]) -> Option<Vec<S>> {
        self.solver
            .coordinates(v)
            .map(|c| c[self.boundary_rank..].to_vec())
    }

    pub fn is_boundary(&self, v: &[S]) -> bool {
        self.class_of(v)
            .is_some_and(|c| c.iter().all(|x| x.is_zero()))
    }
}

/// Dimension of `span(Z) / span(B)`, validating `span(B) ⊆ span(Z)`.
pub fn subquotient_dim<S: Field>(ambient: usize, cycles: Matrix<S>, boundaries: Matrix<S>) -> Result<usize, LinalgError> {
    Subquotient::new(ambient, cycles, boundaries).map(|s| s.dim())
}

/// Matrix of the map `source -> target` induced by the linear map `map`
/// between ambient spaces, in the quotient bases.
///
/// Fails with [`LinalgError::NotWellDefined`] if `map` does not carry cycles
/// to cycles and boundaries to boundaries.
pub fn induced_map<S: Field>(source: &Subquotient<S>, target: &Subquotient<S>, map: &Matrix<S>) -> Result<Matrix<S>, LinalgError> {
    if map.cols() != source.ambient() {
        return Err(LinalgError::DimensionMismatch {
            expected: source.ambient(),
            found: map.cols(),
        });
    }
    if map.rows() != target.ambient() {
        return Err(LinalgError::DimensionMismatch {
            expected: target.ambient(),
            found: map.rows(),
        });
    }
    let boundary_basis = source.boundary_basis();
    for j in 0..boundary_basis.cols() {
        let image = map.mul_vec(&boundary_basis.column(j));
        if !target.is_boundary(&image) {
            return Err(LinalgError::NotWellDefined(format!(
                "boundary generator {j} maps outside the target boundaries"
            )));
        }
    }
    let reps = source.representatives();
    let mut columns = Vec::with_capacity(reps.cols());
    for j in 0..reps.cols() {
        let image = map.mul_vec(&reps.column(j));
        let class = target.class_of(&image).ok_or_else(|| {
            LinalgError::NotWellDefined(format!("cycle representative {j} maps outside the target cycles"))
        })?;
        columns.push(class);
    }
    Ok(Matrix::from_columns(target.dim(), &columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::Rational;
    use num_traits::Zero;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type F2 = Fp<2>;
    type F3 = Fp<3>;

    fn m2(rows: &[&[i64]]) -> Matrix<F2> {
        Matrix::from_i64_rows(rows)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::<F2>::zeros(0, 0).rank(), 0);
        assert_eq!(Matrix::<F2>::identity(3).rank(), 3);
        assert_eq!(m2(&[&[1, 1], &[1, 1]]).rank(), 1);
        // Over Q the same pattern with a sign is still rank one, over F_2 this
        // one is rank one and over F_3 rank two.
        let m = &[&[1i64, 1][..], &[1, -1][..]];
        assert_eq!(Matrix::<F2>::from_i64_rows(m).rank(), 1);
        assert_eq!(Matrix::<F3>::from_i64_rows(m).rank(), 2);
        assert_eq!(Matrix::<Rational>::from_i64_rows(m).rank(), 2);
    }

    #[test]
    fn solve_examples() {
        let id = Matrix::<F2>::identity(2);
        let b = vec![F2::new(1), F2::new(0)];
        assert_eq!(solve(&id, &b).unwrap(), Some(b.clone()));
        assert_eq!(solve(&Matrix::<F2>::zeros(2, 2), &b).unwrap(), None);
        let a = m2(&[&[1, 1]]);
        let x = solve(&a, &[F2::new(1)]).unwrap().unwrap();
        assert!(x == vec![F2::new(1), F2::new(0)] || x == vec![F2::new(0), F2::new(1)]);
        assert_eq!(a.mul_vec(&x), vec![F2::new(1)]);
        assert!(matches!(
            solve(&a, &[F2::new(1), F2::new(0)]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn subquotient_dim_examples() {
        let id = Matrix::<F2>::identity(2);
        let empty = Matrix::<F2>::zeros(2, 0);
        assert_eq!(subquotient_dim(2, id.clone(), empty).unwrap(), 2);
        assert_eq!(subquotient_dim(2, id.clone(), id.clone()).unwrap(), 0);
        let diag = m2(&[&[1], &[1]]);
        assert_eq!(subquotient_dim(2, id, diag.clone()).unwrap(), 1);
        let e1 = m2(&[&[1], &[0]]);
        assert!(matches!(
            subquotient_dim(2, e1, diag),
            Err(LinalgError::InvariantViolation(_))
        ));
    }

    #[test]
    fn induced_map_identity_and_zero() {
        let z = m2(&[&[1, 0, 1], &[0, 1, 1], &[0, 0, 0]]);
        let b = m2(&[&[1], &[1], &[0]]);
        let s = Subquotient::new(3, z, b).unwrap();
        let id = induced_map(&s, &s, &Matrix::identity(3)).unwrap();
        assert_eq!(id, Matrix::identity(s.dim()));
        let zero = induced_map(&s, &s, &Matrix::zeros(3, 3)).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.shape(), (1, 1));
    }

    /// Brute force over F_2^2: the class of each vector in the target is
    /// determined by enumerating the cosets of span{(1,1)}.
    #[test]
    fn induced_map_onto_quotient_matches_coset_enumeration() {
        let s = Subquotient::new(2, Matrix::<F2>::identity(2), Matrix::zeros(2, 0)).unwrap();
        let t = Subquotient::new(2, Matrix::<F2>::identity(2), m2(&[&[1], &[1]])).unwrap();
        let map = induced_map(&s, &t, &Matrix::identity(2)).unwrap();

        let vectors: Vec<[u32; 2]> = vec![[0, 0], [0, 1], [1, 0], [1, 1]];
        let coset = |v: [u32; 2]| (v[0] + v[1]) % 2;
        let cosets: std::collections::BTreeSet<u32> = vectors.iter().map(|&v| coset(v)).collect();
        assert_eq!(cosets.len(), 2);
        let image_cosets: std::collections::BTreeSet<u32> = vectors
            .iter()
            .map(|v| {
                let img = Matrix::<F2>::identity(2).mul_vec(&[F2::new(v[0]), F2::new(v[1])]);
                coset([img[0].value(), img[1].value()])
            })
            .collect();
        let oracle_rank = (image_cosets.len() as f64).log2() as usize;

        assert_eq!(map.shape(), (1, 2));
        assert_eq!(map.rank(), oracle_rank);
        assert_eq!(oracle_rank, 1);
        // Both basis vectors land on the non-trivial coset.
        for v in &vectors {
            let x = [F2::new(v[0]), F2::new(v[1])];
            let class = t.class_of(&x).unwrap();
            assert_eq!(class[0].is_zero(), coset(*v) == 0);
        }
    }

    #[test]
    fn induced_map_rejects_broken_squares() {
        let s = Subquotient::new(2, Matrix::<F2>::identity(2), m2(&[&[1], &[0]])).unwrap();
        let t = Subquotient::new(2, Matrix::<F2>::identity(2), Matrix::zeros(2, 0)).unwrap();
        assert!(matches!(
            induced_map(&s, &t, &Matrix::identity(2)),
            Err(LinalgError::NotWellDefined(_))
        ));
        let t2 = Subquotient::new(2, m2(&[&[1], &[0]]), Matrix::zeros(2, 0)).unwrap();
        let s2 = Subquotient::new(2, Matrix::<F2>::identity(2), Matrix::zeros(2, 0)).unwrap();
        assert!(matches!(
            induced_map(&s2, &t2, &Matrix::identity(2)),
            Err(LinalgError::NotWellDefined(_))
        ));
    }

    #[test]
    fn kernel_and_intersection() {
        let a = Matrix::<F3>::from_i64_rows(&[&[1, 1, 0], &[0, 1, 1]]);
        let k = kernel(&a);
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).is_zero());
        let x = Matrix::<F3>::from_i64_rows(&[&[1, 0], &[0, 1], &[0, 0]]);
        let y = Matrix::<F3>::from_i64_rows(&[&[1, 0], &[1, 0], &[0, 1]]);
        let i = intersect_spans(&x, &y);
        assert_eq!(i.cols(), 1);
        assert_eq!(i.column(0)[2], F3::new(0));
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<F3> {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.gen_bool(0.4) {
                    m[(i, j)] = F3::new(rng.gen_range(0..3));
                }
            }
        }
        m
    }

    fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix<F3> {
        loop {
            let m = random_matrix(rng, n, n);
            if m.rank() == n {
                return m;
            }
        }
    }

    proptest! {
        #[test]
        fn rank_of_product_is_bounded(seed in any::<u64>(), r in 0usize..6, k in 0usize..6, c in 0usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, r, k);
            let b = random_matrix(&mut rng, k, c);
            let ab = a.mul(&b).rank();
            prop_assert!(ab <= a.rank().min(b.rank()));
            prop_assert!(a.rank() <= r.min(k));
        }

        #[test]
        fn solve_reproduces_rhs(seed in any::<u64>(), r in 1usize..7, c in 0usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, r, c);
            let b: Vec<F3> = (0..r).map(|_| F3::new(rng.gen_range(0..3))).collect();
            match solve(&a, &b).unwrap() {
                Some(x) => prop_assert_eq!(a.mul_vec(&x), b),
                None => {
                    let aug = Matrix::hstack(r, &[&a, &Matrix::from_columns(r, &[b])]);
                    prop_assert!(aug.rank() > a.rank());
                }
            }
        }

        #[test]
        fn subquotient_dim_ignores_column_mixing(seed in any::<u64>(), n in 1usize..7, kz in 0usize..6, kb in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = random_matrix(&mut rng, n, kz);
            let b = z.mul(&random_matrix(&mut rng, kz, kb));
            let dim = subquotient_dim(n, z.clone(), b.clone()).unwrap();
            prop_assert_eq!(dim, z.rank() - b.rank());
            let z2 = z.mul(&random_invertible(&mut rng, kz));
            let b2 = b.mul(&random_invertible(&mut rng, kb));
            prop_assert_eq!(subquotient_dim(n, z2, b2).unwrap(), dim);
        }

        #[test]
        fn induced_identity_is_identity(seed in any::<u64>(), n in 1usize..7, kz in 0usize..6, kb in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = random_matrix(&mut rng, n, kz);
            let b = z.mul(&random_matrix(&mut rng, kz, kb));
            let s = Subquotient::new(n, z, b).unwrap();
            let m = induced_map(&s, &s, &Matrix::identity(n)).unwrap();
            prop_assert_eq!(m, Matrix::identity(s.dim()));
        }
    }
}
