//! Simplicial maps, covers of the target by subcomplexes, and their
//! pullbacks to the source.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{FilteredComplex, Simplex, SimplicialComplex};
use crate::error::{ComplexError, CoverError};

/// A simplicial map given by its action on vertices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimplicialMap {
    vertex_map: BTreeMap<u32, u32>,
}

impl SimplicialMap {
    pub fn new(vertex_map: BTreeMap<u32, u32>) -> Self {
        SimplicialMap { vertex_map }
    }

    pub fn identity(x: &SimplicialComplex) -> Self {
        SimplicialMap {
            vertex_map: x.vertices().map(|v| (v, v)).collect(),
        }
    }

    pub fn vertex_map(&self) -> &BTreeMap<u32, u32> {
        &self.vertex_map
    }

    pub fn apply_vertex(&self, v: u32) -> Option<u32> {
        self.vertex_map.get(&v).copied()
    }

    /// Deduplicated image of a simplex; `None` if a vertex is unmapped.
    pub fn image(&self, s: &Simplex) -> Option<Simplex> {
        let verts: Option<Vec<u32>> = s.vertices().iter().map(|&v| self.apply_vertex(v)).collect();
        verts.map(Simplex::from_image)
    }

    /// Checks that the map is defined on every vertex of `x` and sends
    /// simplices to simplices of `y` (collapses allowed).
    pub fn validate(&self, x: &SimplicialComplex, y: &SimplicialComplex) -> Result<(), CoverError> {
        for v in x.vertices() {
            if self.apply_vertex(v).is_none() {
                return Err(CoverError::MissingVertex(v));
            }
        }
        for s in x.iter() {
            let image = self.image(s).expect("total on vertices");
            if !y.contains(&image) {
                return Err(CoverError::NotSimplicial {
                    simplex: s.clone(),
                    image,
                });
            }
        }
        Ok(())
    }
}

pub fn validate_map(f: &SimplicialMap, x: &SimplicialComplex, y: &SimplicialComplex) -> Result<(), CoverError> {
    f.validate(x, y)
}

/// One member `U_α` of a cover of the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPiece {
    pub id: i64,
    pub complex: SimplicialComplex,
}

impl CoverPiece {
    pub fn new(id: i64, complex: SimplicialComplex) -> Self {
        CoverPiece { id, complex }
    }

    fn check_closed(&self) -> Result<(), CoverError> {
        match self.complex.missing_face() {
            Some((face, _)) => Err(CoverError::NotSubcomplex { piece: self.id, face }),
            None => Ok(()),
        }
    }
}

/// `f^{-1}(U) = {σ ∈ X : f(σ) ∈ U}`.
pub fn pullback(f: &SimplicialMap, piece: &CoverPiece, x: &SimplicialComplex) -> Result<SimplicialComplex, CoverError> {
    piece.check_closed()?;
    Ok(SimplicialComplex::from_simplices(
        x.iter()
            .filter(|s| f.image(s).is_some_and(|im| piece.complex.contains(&im)))
            .cloned(),
    ))
}

/// A strictly increasing tuple of cover positions `α_0 < … < α_p`.
///
/// Positions index [`CoverSystem::pieces`], which are sorted by id, so the
/// order agrees with the order of ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NerveTuple(Vec<usize>);

impl NerveTuple {
    pub fn new(indices: Vec<usize>, n_pieces: usize) -> Result<Self, CoverError> {
        let ok = !indices.is_empty()
            && indices.windows(2).all(|w| w[0] < w[1])
            && indices.last().is_some_and(|&l| l < n_pieces);
        if ok {
            Ok(NerveTuple(indices))
        } else {
            Err(CoverError::BadTuple(indices))
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Čech degree `p` of a `(p+1)`-tuple.
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    /// The tuple with its `j`-th entry removed.
    pub fn omit(&self, j: usize) -> NerveTuple {
        let mut v = self.0.clone();
        v.remove(j);
        NerveTuple(v)
    }

    /// All tuples of `n_pieces` positions with exactly `p + 1` entries,
    /// lexicographically.
    pub fn all_of_degree(n_pieces: usize, p: usize) -> Vec<NerveTuple> {
        let k = p + 1;
        if k > n_pieces {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(NerveTuple(cur.clone()));
            let Some(i) = (0..k).rev().find(|&i| cur[i] < n_pieces - k + i) else {
                break;
            };
            cur[i] += 1;
            for j in i + 1..k {
                cur[j] = cur[j - 1] + 1;
            }
        }
        out
    }
}

/// A simplicial map `f: X -> Y` together with an indexed cover of `Y` whose
/// pullback covers `X`.
#[derive(Clone, Debug)]
pub struct CoverSystem {
    target: SimplicialComplex,
    map: SimplicialMap,
    pieces: Vec<CoverPiece>,
    pullbacks: Vec<SimplicialComplex>,
}

impl CoverSystem {
    /// Validates the map against `x` and `target`, each piece, and the
    /// covering condition on `x`.
    pub fn new(x: &SimplicialComplex, target: SimplicialComplex, map: SimplicialMap, mut pieces: Vec<CoverPiece>) -> Result<Self, CoverError> {
        map.validate(x, &target)?;
        pieces.sort_by_key(|p| p.id);
        if let Some(w) = pieces.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(CoverError::DuplicatePiece(w[0].id));
        }
        for piece in &pieces {
            piece.check_closed()?;
            if let Some(s) = piece.complex.iter().find(|s| !target.contains(s)) {
                return Err(CoverError::OutsideTarget {
                    piece: piece.id,
                    simplex: s.clone(),
                });
            }
        }
        let pullbacks = pieces
            .iter()
            .map(|p| pullback(&map, p, x))
            .collect::<Result<Vec<_>, _>>()?;
        let system = CoverSystem {
            target,
            map,
            pieces,
            pullbacks,
        };
        system.check_cover(x)?;
        Ok(system)
    }

    pub fn target(&self) -> &SimplicialComplex {
        &self.target
    }

    pub fn map(&self) -> &SimplicialMap {
        &self.map
    }

    pub fn pieces(&self) -> &[CoverPiece] {
        &self.pieces
    }

    pub fn ids(&self) -> Vec<i64> {
        self.pieces.iter().map(|p| p.id).collect()
    }

    pub fn n_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn pullbacks(&self) -> &[SimplicialComplex] {
        &self.pullbacks
    }

    /// Every simplex of `x` must lie in some pullback piece. Local finiteness
    /// holds automatically since the cover is finite.
    pub fn check_cover(&self, x: &SimplicialComplex) -> Result<(), CoverError> {
        let missing: Vec<Simplex> = x
            .iter()
            .filter(|s| !self.pullbacks.iter().any(|p| p.contains(s)))
            .cloned()
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(CoverError::NotCovering(missing))
        }
    }

    /// Ids of a tuple, for display.
    pub fn tuple_ids(&self, t: &NerveTuple) -> Vec<i64> {
        t.indices().iter().map(|&k| self.pieces[k].id).collect()
    }

    /// `slice ∩ f^{-1}(U_{α_0}) ∩ … ∩ f^{-1}(U_{α_p})`.
    pub fn intersect(&self, t: &NerveTuple, slice: &SimplicialComplex) -> SimplicialComplex {
        SimplicialComplex::from_simplices(
            slice
                .iter()
                .filter(|s| t.indices().iter().all(|&k| self.pullbacks[k].contains(s)))
                .cloned(),
        )
    }

    /// `K_i ∩ f^{-1}(U_{α_0 … α_p})`.
    pub fn intersection(&self, t: &NerveTuple, k: &FilteredComplex, i: usize) -> Result<SimplicialComplex, ComplexError> {
        Ok(self.intersect(t, &k.slice(i)?))
    }
}

pub fn check_cover(system: &CoverSystem, x: &SimplicialComplex) -> Result<(), CoverError> {
    system.check_cover(x)
}

/// Vertex ids used by a complex, for diagnostics.
pub fn vertex_set(c: &SimplicialComplex) -> BTreeSet<u32> {
    c.vertices().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn closure(list: &[&[u32]]) -> SimplicialComplex {
        SimplicialComplex::closure(list.iter().map(|v| s(v)))
    }

    fn circle() -> SimplicialComplex {
        closure(&[&[0, 1], &[0, 2], &[1, 2]])
    }

    fn hexagon() -> SimplicialComplex {
        closure(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[4, 5], &[0, 5]])
    }

    fn triple_cover_map() -> SimplicialMap {
        SimplicialMap::new((0..6).map(|j| (j, j % 3)).collect())
    }

    #[test]
    fn identity_and_double_cover_are_simplicial() {
        let c = circle();
        assert!(validate_map(&SimplicialMap::identity(&c), &c, &c).is_ok());
        let hex = hexagon();
        assert_eq!(hex.len(), 12);
        let f = triple_cover_map();
        for e in hex.simplices(1) {
            let im = f.image(e).unwrap();
            assert_eq!(im.dim(), 1, "{e} collapses");
            assert!(c.contains(&im));
        }
        assert!(f.validate(&hex, &c).is_ok());
    }

    #[test]
    fn collapse_to_vertex_is_allowed() {
        let edge = closure(&[&[0, 1]]);
        let point = closure(&[&[7]]);
        let f = SimplicialMap::new([(0, 7), (1, 7)].into_iter().collect());
        assert!(f.validate(&edge, &point).is_ok());
        assert_eq!(f.image(&s(&[0, 1])).unwrap(), s(&[7]));
    }

    #[test]
    fn non_simplicial_and_partial_maps_are_rejected() {
        let edge = closure(&[&[0, 1]]);
        let two_points = SimplicialComplex::from_simplices([s(&[0]), s(&[1])]);
        let f = SimplicialMap::identity(&edge);
        assert!(matches!(f.validate(&edge, &two_points), Err(CoverError::NotSimplicial { .. })));
        let partial = SimplicialMap::new([(0, 0)].into_iter().collect());
        assert_eq!(partial.validate(&edge, &edge), Err(CoverError::MissingVertex(1)));
    }

    #[test]
    fn pullback_examples() {
        let c = circle();
        let id = SimplicialMap::identity(&c);
        assert_eq!(pullback(&id, &CoverPiece::new(0, c.clone()), &c).unwrap(), c);
        assert!(pullback(&id, &CoverPiece::new(0, SimplicialComplex::empty()), &c)
            .unwrap()
            .is_empty());

        let hex = hexagon();
        let u2 = CoverPiece::new(2, closure(&[&[0, 2]]));
        let pulled = pullback(&triple_cover_map(), &u2, &hex).unwrap();
        let expected = closure(&[&[2, 3], &[0, 5]]);
        assert_eq!(pulled, expected);
        assert_eq!(pulled.len(), 6);

        let open = CoverPiece::new(5, SimplicialComplex::from_simplices([s(&[0, 1])]));
        assert!(matches!(pullback(&id, &open, &c), Err(CoverError::NotSubcomplex { piece: 5, .. })));
    }

    #[test]
    fn two_arc_cover_of_circle() {
        let c = circle();
        let pieces = vec![
            CoverPiece::new(1, closure(&[&[0, 1], &[1, 2]])),
            CoverPiece::new(2, closure(&[&[0, 2]])),
        ];
        let sys = CoverSystem::new(&c, c.clone(), SimplicialMap::identity(&c), pieces).unwrap();
        let both = NerveTuple::new(vec![0, 1], 2).unwrap();
        let k = FilteredComplex::build(c.iter().map(|s| (s.clone(), 1))).unwrap().0;
        let inter = sys.intersection(&both, &k, 0).unwrap();
        assert_eq!(inter, SimplicialComplex::from_simplices([s(&[0]), s(&[2])]));
        let single = NerveTuple::new(vec![1], 2).unwrap();
        assert_eq!(sys.intersection(&single, &k, 0).unwrap(), sys.pullbacks()[1]);
        assert!(sys.intersection(&both, &k, 1).unwrap().is_empty());
        assert_eq!(sys.tuple_ids(&both), vec![1, 2]);
    }

    #[test]
    fn uncovered_edge_is_reported() {
        let c = circle();
        let pieces = vec![
            CoverPiece::new(1, closure(&[&[0, 1], &[1, 2]])),
            CoverPiece::new(2, closure(&[&[0], &[2]])),
        ];
        let err = CoverSystem::new(&c, c.clone(), SimplicialMap::identity(&c), pieces).unwrap_err();
        assert_eq!(err, CoverError::NotCovering(vec![s(&[0, 2])]));
    }

    #[test]
    fn single_piece_cover() {
        let c = circle();
        let sys = CoverSystem::new(&c, c.clone(), SimplicialMap::identity(&c), vec![CoverPiece::new(0, c.clone())]);
        assert!(sys.is_ok());
    }

    #[test]
    fn duplicate_ids_and_foreign_simplices() {
        let c = circle();
        let dup = vec![CoverPiece::new(1, c.clone()), CoverPiece::new(1, c.clone())];
        assert_eq!(
            CoverSystem::new(&c, c.clone(), SimplicialMap::identity(&c), dup).unwrap_err(),
            CoverError::DuplicatePiece(1)
        );
        let foreign = vec![CoverPiece::new(1, c.clone()), CoverPiece::new(2, closure(&[&[8]]))];
        assert!(matches!(
            CoverSystem::new(&c, c.clone(), SimplicialMap::identity(&c), foreign),
            Err(CoverError::OutsideTarget { piece: 2, .. })
        ));
    }

    #[test]
    fn nerve_tuples() {
        assert_eq!(NerveTuple::all_of_degree(4, 0).len(), 4);
        assert_eq!(NerveTuple::all_of_degree(4, 1).len(), 6);
        assert_eq!(NerveTuple::all_of_degree(4, 3).len(), 1);
        assert!(NerveTuple::all_of_degree(2, 2).is_empty());
        let t = NerveTuple::new(vec![0, 2, 3], 4).unwrap();
        assert_eq!(t.omit(1).indices(), &[0, 3]);
        assert!(NerveTuple::new(vec![2, 1], 4).is_err());
        assert!(NerveTuple::new(vec![4], 4).is_err());
        assert!(NerveTuple::new(vec![], 4).is_err());
        let all = NerveTuple::all_of_degree(5, 2);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all.len(), 10);
    }

    proptest! {
        #[test]
        fn pullback_commutes_with_intersection(
            y_raw in prop::collection::vec(prop::collection::btree_set(0u32..4, 1..3), 1..6),
            x_raw in prop::collection::vec(prop::collection::btree_set(0u32..6, 1..4), 1..8),
            vmap in prop::collection::vec(0u32..4, 6),
            a_raw in prop::collection::vec(any::<bool>(), 16),
            b_raw in prop::collection::vec(any::<bool>(), 16),
        ) {
            let y = SimplicialComplex::closure(y_raw.into_iter().map(|v| Simplex::new(v.into_iter().collect()).unwrap()));
            let f = SimplicialMap::new((0..6).map(|v| (v, vmap[v as usize])).collect());
            // keep only simplices of X that map into Y
            let x = SimplicialComplex::closure(
                x_raw.into_iter()
                    .map(|v| Simplex::new(v.into_iter().collect()).unwrap())
                    .filter(|s| y.contains(&f.image(s).unwrap())),
            );
            let pick = |mask: &[bool]| {
                let chosen: Vec<Simplex> = y.iter().zip(mask.iter().cycle()).filter(|(_, &m)| m).map(|(s, _)| s.clone()).collect();
                SimplicialComplex::closure(chosen)
            };
            let ua = CoverPiece::new(0, pick(&a_raw));
            let ub = CoverPiece::new(1, pick(&b_raw));
            let uab = CoverPiece::new(2, ua.complex.intersection(&ub.complex));
            let pa = pullback(&f, &ua, &x).unwrap();
            let pb = pullback(&f, &ub, &x).unwrap();
            let pab = pullback(&f, &uab, &x).unwrap();
            prop_assert!(pa.is_closed() && pb.is_closed() && pab.is_closed());
            prop_assert_eq!(pa.intersection(&pb), pab);
        }
    }
}
