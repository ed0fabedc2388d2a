//! Simplicial complexes, descending filtrations and their cochain complexes.
//!
//! A [`FilteredComplex`] stores, for every simplex, its *level*: the first
//! filtration index at which it is gone. Hence `σ ∈ K_i` iff `i < level(σ)`,
//! `K_0` is the whole complex and `K_N` is empty.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ComplexError;
use crate::field::Field;
use crate::linalg::{kernel, Matrix, Subquotient};

/// A simplex, as its strictly increasing list of vertex ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Simplex(Vec<u32>);

impl Simplex {
    /// Sorts `vertices`; rejects empty and repeated vertex lists.
    pub fn new(mut vertices: Vec<u32>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::EmptySimplex);
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::RepeatedVertex(vertices));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertex(v: u32) -> Self {
        Simplex(vec![v])
    }

    /// Deduplicating constructor for images under vertex maps.
    pub fn from_image(vertices: impl IntoIterator<Item = u32>) -> Self {
        let set: BTreeSet<u32> = vertices.into_iter().collect();
        Simplex(set.into_iter().collect())
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces; item `j` omits vertex `j`.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        (0..n).filter(move |_| n > 1).map(move |j| {
            let mut v = self.0.clone();
            v.remove(j);
            Simplex(v)
        })
    }

    /// Every non-empty proper face.
    pub fn proper_faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        let full = (1u64 << n) - 1;
        (1..full)
            .map(|mask| {
                Simplex(
                    (0..n)
                        .filter(|&k| mask & (1 << k) != 0)
                        .map(|k| self.0[k])
                        .collect(),
                )
            })
            .collect()
    }
}

impl TryFrom<Vec<u32>> for Simplex {
    type Error = ComplexError;
    fn try_from(v: Vec<u32>) -> Result<Self, ComplexError> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<u32> {
    fn from(s: Simplex) -> Vec<u32> {
        s.0
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", v.join(","))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite set of simplices grouped by dimension, each group in canonical
/// (lexicographic) order. The ordering fixes every cochain basis.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl SimplicialComplex {
    /// No closure check; see [`SimplicialComplex::is_closed`].
    pub fn from_simplices(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let set: BTreeSet<Simplex> = simplices.into_iter().collect();
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        for s in set {
            let d = s.dim();
            if by_dim.len() <= d {
                by_dim.resize_with(d + 1, Vec::new);
            }
            by_dim[d].push(s);
        }
        let index = by_dim
            .iter()
            .map(|group| group.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        SimplicialComplex { by_dim, index }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Closure of a set of simplices under taking faces.
    pub fn closure(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut set = BTreeSet::new();
        for s in simplices {
            set.extend(s.proper_faces());
            set.insert(s);
        }
        Self::from_simplices(set)
    }

    /// `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    pub fn count(&self, q: usize) -> usize {
        self.by_dim.get(q).map_or(0, Vec::len)
    }

    pub fn simplices(&self, q: usize) -> &[Simplex] {
        self.by_dim.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn position(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.dim())?.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.position(s).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.simplices(0).iter().map(|s| s.vertices()[0])
    }

    /// First face missing from the complex, if any.
    pub fn missing_face(&self) -> Option<(Simplex, Simplex)> {
        self.iter()
            .flat_map(|s| s.facets().map(move |f| (f, s.clone())))
            .find(|(f, _)| !self.contains(f))
    }

    pub fn is_closed(&self) -> bool {
        self.missing_face().is_none()
    }

    pub fn intersection(&self, other: &SimplicialComplex) -> SimplicialComplex {
        Self::from_simplices(self.iter().filter(|s| other.contains(s)).cloned())
    }

    pub fn is_subset_of(&self, other: &SimplicialComplex) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Matrix of `d: C^q -> C^{q+1}`, the transpose of the simplicial
    /// boundary. A `(q+1)`-simplex `τ` receives `(-1)^j` from the face
    /// omitting its `j`-th vertex.
    pub fn coboundary<S: Field>(&self, q: usize) -> Matrix<S> {
        let mut d = Matrix::zeros(self.count(q + 1), self.count(q));
        for (row, tau) in self.simplices(q + 1).iter().enumerate() {
            for (j, face) in tau.facets().enumerate() {
                let col = self.position(&face).expect("complex is closed under faces");
                d[(row, col)] = S::sign(j);
            }
        }
        d
    }

    /// `H^q` as the subquotient `ker d^q / im d^{q-1}` of `C^q`.
    pub fn cohomology<S: Field>(&self, q: usize) -> Subquotient<S> {
        let n = self.count(q);
        let cycles = kernel(&self.coboundary::<S>(q));
        let boundaries = if q == 0 {
            Matrix::zeros(n, 0)
        } else {
            self.coboundary::<S>(q - 1)
        };
        Subquotient::new(n, cycles, boundaries).expect("d^2 = 0")
    }

    pub fn cohomology_dim<S: Field>(&self, q: usize) -> usize {
        let d = self.coboundary::<S>(q);
        let below = if q == 0 { 0 } else { self.coboundary::<S>(q - 1).rank() };
        self.count(q) - d.rank() - below
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(q, g)| if q % 2 == 0 { g.len() as i64 } else { -(g.len() as i64) })
            .sum()
    }
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Restriction of `q`-cochains from `from` to a subcomplex `to`: the dual of
/// the inclusion, keeping the coefficient of each simplex of `to`.
pub fn restriction<S: Field>(from: &SimplicialComplex, to: &SimplicialComplex, q: usize) -> Matrix<S> {
    let mut m = Matrix::zeros(to.count(q), from.count(q));
    for (row, s) in to.simplices(q).iter().enumerate() {
        if let Some(col) = from.position(s) {
            m[(row, col)] = S::one();
        }
    }
    m
}

/// Non-fatal notes produced while building a filtered complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuildWarning {
    InsertedFace { face: Simplex, level: usize },
}

impl fmt::Display for BuildWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildWarning::InsertedFace { face, level } => {
                write!(f, "inserted missing face {face} at level {level}")
            }
        }
    }
}

/// A finite descending filtration `K_0 ⊇ K_1 ⊇ … ⊇ K_N = ∅`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FilteredComplex {
    levels: BTreeMap<Simplex, usize>,
    len: usize,
}

impl FilteredComplex {
    /// Validates the `(simplex, level)` pairs, inserting missing faces at the
    /// largest level among their cofaces.
    pub fn build(entries: impl IntoIterator<Item = (Simplex, usize)>) -> Result<(Self, Vec<BuildWarning>), ComplexError> {
        let mut explicit: BTreeMap<Simplex, usize> = BTreeMap::new();
        for (s, level) in entries {
            if level == 0 {
                return Err(ComplexError::ZeroLevel(s));
            }
            if let Some(&prev) = explicit.get(&s) {
                if prev != level {
                    return Err(ComplexError::DuplicateSimplex {
                        simplex: s,
                        first: prev,
                        second: level,
                    });
                }
            }
            explicit.insert(s, level);
        }
        for (s, &level) in &explicit {
            for face in s.proper_faces() {
                if let Some(&fl) = explicit.get(&face) {
                    if fl < level {
                        return Err(ComplexError::LevelMonotonicity {
                            face,
                            face_level: fl,
                            coface: s.clone(),
                            coface_level: level,
                        });
                    }
                }
            }
        }

        let mut levels = explicit.clone();
        let top = explicit.keys().map(Simplex::dim).max();
        let mut inserted = BTreeMap::new();
        if let Some(top) = top {
            for d in (1..=top).rev() {
                let layer: Vec<(Simplex, usize)> = levels
                    .iter()
                    .filter(|(s, _)| s.dim() == d)
                    .map(|(s, &l)| (s.clone(), l))
                    .collect();
                for (s, level) in layer {
                    for face in s.facets() {
                        if explicit.contains_key(&face) {
                            continue;
                        }
                        let entry = levels.entry(face.clone()).or_insert(0);
                        *entry = (*entry).max(level);
                        inserted.insert(face, *entry);
                    }
                }
            }
        }
        let warnings = inserted
            .into_iter()
            .map(|(face, level)| BuildWarning::InsertedFace { face, level })
            .collect();

        let len = levels.values().copied().max().unwrap_or(0);
        let complex = FilteredComplex { levels, len };
        debug_assert!(complex.check_monotone().is_ok());
        Ok((complex, warnings))
    }

    /// Builds from an ascending filtration `L_0 ⊆ … ⊆ L_M` given by birth
    /// times, reversing indices so that `K_i = L_{M-i}`.
    pub fn from_ascending(entries: impl IntoIterator<Item = (Simplex, usize)>, last_time: usize) -> Result<(Self, Vec<BuildWarning>), ComplexError> {
        let entries: Vec<_> = entries.into_iter().collect();
        if let Some((_, t)) = entries.iter().find(|(_, t)| *t > last_time) {
            return Err(ComplexError::IndexOutOfRange {
                index: *t,
                len: last_time,
            });
        }
        let (mut k, w) = Self::build(entries.into_iter().map(|(s, t)| (s, last_time - t + 1)))?;
        k.len = k.len.max(last_time + 1);
        Ok((k, w))
    }

    /// Extends `N` past the largest level; the extra slices are empty.
    pub fn with_len(mut self, len: usize) -> Result<Self, ComplexError> {
        if len < self.len {
            return Err(ComplexError::LengthTooShort {
                declared: len,
                max_level: self.len,
            });
        }
        self.len = len;
        Ok(self)
    }

    fn check_monotone(&self) -> Result<(), ComplexError> {
        for (s, &level) in &self.levels {
            for face in s.facets() {
                let fl = *self.levels.get(&face).expect("closed");
                if fl < level {
                    return Err(ComplexError::LevelMonotonicity {
                        face,
                        face_level: fl,
                        coface: s.clone(),
                        coface_level: level,
                    });
                }
            }
        }
        Ok(())
    }

    /// `N`, the index of the first empty slice.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, s: &Simplex) -> Option<usize> {
        self.levels.get(s).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Simplex, usize)> {
        self.levels.iter().map(|(s, &l)| (s, l))
    }

    pub fn dim(&self) -> Option<usize> {
        self.levels.keys().map(Simplex::dim).max()
    }

    /// `K_i`. Errors for `i > N`.
    pub fn slice(&self, i: usize) -> Result<SimplicialComplex, ComplexError> {
        if i > self.len {
            return Err(ComplexError::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(SimplicialComplex::from_simplices(
            self.levels
                .iter()
                .filter(|(_, &l)| i < l)
                .map(|(s, _)| s.clone()),
        ))
    }

    /// `K_i` with the conventions `K_i = K` for `i ≤ 0` and `K_i = ∅` for
    /// `i ≥ N`.
    pub fn slice_clamped(&self, i: i64) -> SimplicialComplex {
        let i = i.clamp(0, self.len as i64) as usize;
        self.slice(i).expect("clamped")
    }

    pub fn full(&self) -> SimplicialComplex {
        self.slice_clamped(0)
    }
}

pub fn build_complex(entries: impl IntoIterator<Item = (Simplex, usize)>) -> Result<(FilteredComplex, Vec<BuildWarning>), ComplexError> {
    FilteredComplex::build(entries)
}
