//! Certified conjugation word norms for symplectic groups over `Z` and `Z/m`.
//!
//! Every construction in this crate returns explicit words whose evaluation can be
//! re-checked by matrix multiplication; nothing is trusted without evaluation.

pub mod bounds;
pub mod decomposition;
pub mod reduction;
pub mod rings;
pub mod search;
pub mod symplectic;
pub mod words;
