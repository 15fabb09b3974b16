//! Exact workbench for formula size lower bounds of Boolean functions via
//! the rectangle-cover linear program over Karchmer-Wigderson communication
//! matrices, strengthened with clique and rank constraints.
//!
//! Everything numeric is an arbitrary-precision rational; no bound value is
//! ever rounded. The pipeline is:
//!
//! 1. build a Boolean function ([`bool_fn`]) and its communication matrix
//!    ([`matrix`], [`submatrix`]),
//! 2. bound the disjoint monochromatic rectangle cover from below by the LP
//!    dual, solved exactly by constraint generation against a rectangle
//!    separation oracle ([`lp`], [`oracle`], [`bound`]),
//! 3. or verify a hand-built dual certificate ([`certificate`], [`builders`]),
//! 4. cross-check against exact covers and brute-forced formula sizes
//!    ([`cover`], [`brute`]).

pub mod bool_fn;
pub mod bound;
pub mod brute;
pub mod builders;
pub mod certificate;
pub mod cover;
pub mod error;
pub mod formula;
pub mod lp;
pub mod matrix;
pub mod mis;
pub mod oracle;
pub mod rat;
pub mod rect;
pub mod report;
pub mod submatrix;

pub use bool_fn::{brec_eval, brec_maj, maj, urec_maj, BitVector, BooleanFunction};
pub use error::{Error, Result};
pub use formula::{brec_formula, maj3_formula, urec_formula, Formula};
pub use matrix::{build_matrix, CellRef, CommMatrix, IndexSet, Mode, Restriction};
pub use rat::Rat;
pub use rect::Rect;
pub use submatrix::{brec2_submatrix, brec_submatrix, urec_submatrix};
