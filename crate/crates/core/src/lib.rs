//! Spin networks on hypercube variants and their quantum-walk dynamics.
//!
//! The crate builds n-cubes, Godsil-McKay switched cubes, partially switched
//! and blended cubes, evolves single excitations under `H = A(G)`, and
//! detects and characterises perfect state transfer (PST).
//!
//! ```
//! use pstlab_core::{graph::hypercube, pst::find_pst_pairs};
//! use std::f64::consts::FRAC_PI_2;
//!
//! let q3 = hypercube(3).unwrap();
//! let report = find_pst_pairs(&q3, FRAC_PI_2, 1e-6).unwrap();
//! assert_eq!(report.pairs.len(), 4);
//! ```

pub mod error;
pub mod evolution;
pub mod graph;
pub mod io;
pub mod pst;
pub mod spectral;
pub mod switching;

pub use error::{Error, Result};
pub use evolution::{EvolutionSchedule, FidelityTrace, Segment};
pub use graph::{ConnectionSet, Graph};
pub use pst::{DerivativeReport, PstReport};
pub use spectral::SpectralDecomposition;
pub use switching::{Block, BlockSpec, Partition};
