//! Generalized knotoid diagrams on the sphere and their invariants.

pub mod bracket;
pub mod curves;
pub mod diagram;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod gkd;
pub mod harness;
pub mod height;
pub mod index;
pub mod involute;
pub mod laurent;
pub mod moves;
pub mod oracle;
pub mod regions;
pub mod topo;

pub use diagram::*;
pub use error::{Error, Result};
pub use gkd::{parse_gkd, serialize_gkd};
pub use involute::{involute, Involution};
pub use laurent::{Mono, Poly, Sub, Var};
pub use regions::{regions, RegionMap};
pub use topo::{validate, Topo, ValidationReport};
