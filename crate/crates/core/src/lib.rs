//! Complementary subspaces in finite classical geometries: the spectrum of
//! the opposition graph, exact density bounds for non-degenerate
//! subspaces, and brute-force oracles that check both.

pub mod bounds;
pub mod error;
pub mod exactnum;
pub mod forms;
pub mod gf;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod spectrum;

pub use bounds::{BoundReport, QuadExt, SweepRanges, VerifyReport};
pub use error::{Error, Result};
pub use exactnum::{ClassicalCase, ExactRational, PrimePower, Sign};
pub use forms::{ClassicalForm, FormKind};
pub use gf::{Field, FieldElem};
pub use linalg::{MatGF, Subspace};
pub use oracle::{Biadjacency, CountMethod, CountReport, MixingSuiteReport, YCase, YSet};
pub use spectrum::{HalfInteger, SpectrumResult};
