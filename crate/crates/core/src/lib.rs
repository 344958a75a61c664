pub mod kernel;
pub mod morphisms;
pub mod foundation;
pub mod integration;
pub mod syntax;
pub mod prelude;
