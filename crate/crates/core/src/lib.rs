//! Geometry of horospherical products of pointed hyperbolic spaces.

pub mod boundary;
pub mod census;
pub mod component;
pub mod dl;
pub mod error;
pub mod geodesy;
pub mod horo;
pub mod horoball;
pub mod ledger;
pub mod norms;
pub mod parse;
pub mod plane;
pub mod scalar;
pub mod space;
pub mod tree;

pub use component::{AnySpace, ComponentKind, ComponentPoint};
pub use dl::{DlGraph, DlPoint, DlSpace};
pub use error::{GeomError, Result};
pub use horo::{HoroPoint, HoroSpace, PathPlan};
pub use ledger::{ConstantsLedger, ThresholdId};
pub use norms::AdmissibleNorm;
pub use plane::{PlanePoint, PlaneSpace};
pub use scalar::BigScalar;
pub use space::Space;
pub use tree::{TreeSpace, TreeVertex};
