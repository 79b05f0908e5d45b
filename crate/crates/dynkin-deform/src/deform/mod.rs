pub mod admissible;
pub mod hom;

pub use admissible::*;
pub use hom::*;
