use crate::complex::{FilteredComplex, SimplicialComplex};
use crate::cover::{CoverPiece, CoverSystem, SimplicialMap};
use crate::error::Error;

/// A filtered source complex, a simplicial map to a target, and a cover of
/// the target whose pullback covers the source.
#[derive(Clone, Debug)]
pub struct Instance {
    pub complex: FilteredComplex,
    pub system: CoverSystem,
}

impl Instance {
    pub fn new(complex: FilteredComplex, target: SimplicialComplex, map: SimplicialMap, pieces: Vec<CoverPiece>) -> Result<Self, Error> {
        let system = CoverSystem::new(&complex.full(), target, map, pieces)?;
        Ok(Instance { complex, system })
    }

    /// Identity map, target equal to the full source complex.
    pub fn identity(complex: FilteredComplex, pieces: Vec<CoverPiece>) -> Result<Self, Error> {
        let x = complex.full();
        let map = SimplicialMap::identity(&x);
        Self::new(complex, x, map, pieces)
    }

    /// The same complex and map with the one-piece cover `{Y}`.
    pub fn with_single_piece(&self) -> Result<Self, Error> {
        let y = self.system.target().clone();
        Self::new(
            self.complex.clone(),
            y.clone(),
            self.system.map().clone(),
            vec![CoverPiece::new(0, y)],
        )
    }

    /// `N`.
    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }
}
