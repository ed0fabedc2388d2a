//! Persistent cohomology of a filtered simplicial complex computed through
//! the Mayer–Vietoris spectral sequence of a cover pulled back along a
//! simplicial map, with an independent direct computation to compare
//! against.
//!
//! All linear algebra is exact and generic over [`field::Field`]; the
//! aliases below name the fields used most often.

pub mod complex;
pub mod cover;
pub mod doublecomplex;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod instance;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod persistence;
pub mod report;
pub mod spectral;

pub use complex::{FilteredComplex, Simplex, SimplicialComplex};
pub use cover::{CoverPiece, CoverSystem, SimplicialMap};
pub use error::{Error, Result};
pub use field::{Field, FieldChoice, Fp};
pub use instance::Instance;
pub use linalg::{Matrix, Subquotient};
pub use persistence::{Barcode, Interval, PersistenceModule};

/// Exact rationals.
pub type Rational = num_rational::BigRational;
pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
