//! Reference implementations used only by tests: exact rational arithmetic,
//! dense LU, a literal dense ILU(0), and seeded random problem generators.

pub mod dense;
pub mod exact;
pub mod gen;
pub mod suite;
