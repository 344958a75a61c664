mod lexer;
mod parser;
mod printer;
mod json;

pub use lexer::*;
pub use parser::*;
pub use printer::*;
pub use json::*;
