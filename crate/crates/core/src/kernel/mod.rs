mod object;
mod theory;
mod graph;
mod check;

pub use object::*;
pub use theory::*;
pub use graph::*;
pub use check::*;
