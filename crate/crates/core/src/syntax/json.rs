use serde_json::Value;

use crate::kernel::{GraphDecl, Object, TheoryGraph};

/// JSON import/export. Export is plain serde; import re-validates the
/// structural object invariants (nonempty applications, flat heads,
/// nonempty distinct binder contexts) but does not canonicalize — a value
/// that violates them is rejected, not repaired.
pub fn export_object(o: &Object) -> Value {
    serde_json::to_value(o).expect("object serialization is infallible")
}

pub fn import_object(v: &Value) -> Result<Object, String> {
    let o: Object = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    o.validate()?;
    Ok(o)
}

pub fn export_graph(g: &TheoryGraph) -> Value {
    serde_json::to_value(g).expect("graph serialization is infallible")
}

pub fn import_graph(v: &Value) -> Result<TheoryGraph, String> {
    let g: TheoryGraph = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    for d in &g.decls {
        match d {
            GraphDecl::Theory(t) => {
                for s in &t.body {
                    for o in s.ty.iter().chain(s.def.iter()) {
                        o.validate().map_err(|e| format!("{}/{}: {e}", t.name, s.name))?;
                    }
                }
            }
            GraphDecl::View(view) => {
                for a in &view.body {
                    a.image.validate().map_err(|e| format!("{}/{}: {e}", view.name, a.symbol))?;
                }
            }
        }
    }
    Ok(g)
}
