use crate::syntax::Program;

/// The logical framework every typed fixture sits on. Theories whose
/// meta-chain root is `LF` get the Pi/lambda typing rules; everything else
/// is treated as untyped structure.
pub const PRELUDE: &str = "theory LF {
  kind;
  type : kind;
  Pi;
  lambda;
  arrow;
}
";

pub fn base_program() -> Program {
    let mut p = Program::new();
    p.parse_into(PRELUDE, "<prelude>").expect("prelude parses");
    p
}
