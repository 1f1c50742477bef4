//! Exact and Monte Carlo smoothness statistics for curves on Hirzebruch
//! surfaces over finite fields.

pub mod antibertini;
pub mod census;
pub mod error;
pub mod field;
pub mod gf;
pub mod hirzebruch;
pub mod localfactor;
pub mod poly;
pub mod residue;
pub mod smoothcheck;
pub mod stabmap;

pub use error::{Error, Result};
pub use field::Field;
pub use gf::{closed_point_count, ext_field, field_new, Fe, FieldCtx, SpaceKind};
pub use poly::{BinaryForm, UniPoly};
