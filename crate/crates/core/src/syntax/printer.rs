use std::fmt::Write;

use crate::kernel::{Context, GraphDecl, Object, Substitution, Theory, TheoryGraph};
use crate::morphisms::{MorphismExpr, View};

use super::lexer::is_bare_name;
use super::parser::BundleDecl;

/// Canonical form: every symbol fully qualified, applications as
/// `@(h, a, ...)`, one binding per `bind`, names quoted only when they do
/// not lex bare. `print_graph(parse(print_graph(g))) == print_graph(g)`.
fn q(name: &str) -> String {
    if is_bare_name(name) {
        name.to_string()
    } else {
        format!("\"{name}\"")
    }
}

pub fn print_object(o: &Object) -> String {
    let mut s = String::new();
    obj(&mut s, o);
    s
}

fn obj(out: &mut String, o: &Object) {
    match o {
        Object::Sym { theory, name } => {
            let _ = write!(out, "{}/{}", q(theory), q(name));
        }
        Object::Var { name } => {
            let _ = write!(out, "${}", q(name));
        }
        Object::App { head, args } => {
            out.push_str("@(");
            obj(out, head);
            for a in args {
                out.push_str(", ");
                obj(out, a);
            }
            out.push(')');
        }
        Object::Bind { binder, bound, body } => {
            out.push_str("bind(");
            obj(out, binder);
            out.push_str(", ");
            ctx(out, bound);
            out.push_str(", ");
            obj(out, body);
            out.push(')');
        }
        Object::Hid => out.push_str("?hid"),
    }
}

pub fn print_context(c: &Context) -> String {
    let mut s = String::new();
    ctx(&mut s, c);
    s
}

fn ctx(out: &mut String, c: &Context) {
    out.push('[');
    for (i, d) in c.0.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "${}", q(&d.name));
        if let Some(ty) = &d.ty {
            out.push_str(" : ");
            obj(out, ty);
        }
    }
    out.push(']');
}

pub fn print_subst(s: &Substitution) -> String {
    let mut out = String::new();
    out.push('[');
    for (i, p) in s.0.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "${} := {}", q(&p.name), print_object(&p.value));
    }
    out.push(']');
    out
}

pub fn print_morph(m: &MorphismExpr) -> String {
    fn collect(m: &MorphismExpr, out: &mut Vec<String>) {
        match m {
            MorphismExpr::Named { view } => out.push(q(view)),
            MorphismExpr::Ident { theory } => out.push(format!("id({})", q(theory))),
            MorphismExpr::Comp { first, then } => {
                collect(first, out);
                collect(then, out);
            }
        }
    }
    let mut parts = Vec::new();
    collect(m, &mut parts);
    parts.join(" ; ")
}

pub fn print_theory(t: &Theory) -> String {
    let mut s = String::new();
    let _ = write!(s, "theory {}", q(&t.name));
    if let Some(meta) = &t.meta {
        let _ = write!(s, " : {}", q(meta));
    }
    s.push_str(" {\n");
    for d in &t.body {
        let _ = write!(s, "  {}", q(&d.name));
        if let Some(ty) = &d.ty {
            let _ = write!(s, " : {}", print_object(ty));
        }
        if let Some(def) = &d.def {
            let _ = write!(s, " = {}", print_object(def));
        }
        s.push_str(";\n");
    }
    s.push('}');
    s
}

pub fn print_view(v: &View) -> String {
    let mut s = String::new();
    let _ = write!(s, "view {} : {} -> {}", q(&v.name), q(&v.from), q(&v.to));
    if let Some(m) = &v.meta_morph {
        let _ = write!(s, " meta {}", print_morph(m));
    }
    s.push_str(" {\n");
    for a in &v.body {
        let _ = write!(s, "  {} := {};\n", q(&a.symbol), print_object(&a.image));
    }
    s.push('}');
    s
}

pub fn print_graph(g: &TheoryGraph) -> String {
    let mut blocks = Vec::with_capacity(g.decls.len());
    for d in &g.decls {
        blocks.push(match d {
            GraphDecl::Theory(t) => print_theory(t),
            GraphDecl::View(v) => print_view(v),
        });
    }
    let mut s = blocks.join("\n\n");
    if !s.is_empty() {
        s.push('\n');
    }
    s
}

pub fn print_bundle(b: &BundleDecl) -> String {
    let mut s = String::new();
    let _ = write!(s, "bundle {} {{\n  spec {};\n", q(&b.name), q(&b.spec));
    for (kw, sys) in [("sys1", &b.sys1), ("sys2", &b.sys2)] {
        let _ = write!(s, "  {kw} {} via {}", q(&sys.sys), print_morph(&sys.via));
        if let Some(inv) = &sys.inv {
            let _ = write!(s, " inv {}", print_morph(inv));
        }
        s.push_str(";\n");
    }
    s.push('}');
    s
}
