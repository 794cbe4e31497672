//! Exact local cohomology and local homology of graded modules over `F_p[x_1, ..., x_n]`.
//!
//! Everything is computed degree by degree on an explicit [`graded::Window`]:
//! presented modules are realized as finite-dimensional pieces with
//! variable actions, Koszul complexes on powers of a sequence give level
//! systems, and (co)limits of those systems are read off once the transition
//! maps stabilize.

pub mod artinian;
pub mod cli;
pub mod error;
pub mod exactla;
pub mod graded;
pub mod harness;
pub mod invariants;
pub mod koszul;
pub mod limits;
pub mod modfile;
pub mod poly;

pub use error::{Error, Result};
