use crate::integration::{ExtAssign, Query, WideningInput};
use crate::kernel::{
    Context, GraphDecl, Name, Object, QName, Span, SpanKey, SpanMap, SubstPair, Substitution,
    SymbolDecl, Theory, TheoryGraph, VarDecl,
};
use crate::morphisms::{Assignment, MorphismExpr, View};

use super::lexer::{lex, Lexeme, ParseError, Tok};

const LF_ARROW: (&str, &str) = ("LF", "arrow");
const LF_PI: (&str, &str) = ("LF", "Pi");

/// A set of sources parsed into one growing graph. Later files resolve
/// against everything parsed earlier (this is how the prelude becomes
/// visible to fixtures).
#[derive(Debug, Default)]
pub struct Program {
    pub graph: TheoryGraph,
    pub spans: SpanMap,
    pub bundles: Vec<BundleDecl>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundleDecl {
    pub name: Name,
    pub spec: Name,
    pub sys1: SysDecl,
    pub sys2: SysDecl,
    /// Source file the declaration was parsed from.
    pub src_file: Name,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SysDecl {
    pub sys: Name,
    pub via: MorphismExpr,
    pub inv: Option<MorphismExpr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryFile {
    pub query: Query,
    pub solution: Option<SolutionDecl>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionDecl {
    pub subst: Substitution,
    pub proof: Object,
}

impl Program {
    pub fn new() -> Program {
        Program::default()
    }

    pub fn parse_into(&mut self, text: &str, file: &str) -> Result<(), ParseError> {
        let mut p = P::new(text, file)?;
        while let Some(tok) = p.peek() {
            match tok {
                Tok::Name(n) if n == "theory" => parse_theory(&mut p, self)?,
                Tok::Name(n) if n == "view" => parse_view(&mut p, self)?,
                Tok::Name(n) if n == "bundle" => parse_bundle(&mut p, self)?,
                _ => return Err(p.err_here("expected theory, view, or bundle")),
            }
        }
        Ok(())
    }
}

/// Parses a standalone graph source (no prelude, no bundles expected).
pub fn parse_graph(text: &str) -> Result<TheoryGraph, ParseError> {
    let mut prog = Program::new();
    prog.parse_into(text, "<input>")?;
    Ok(prog.graph)
}

/// Parses an object written in the surface grammar, resolving unqualified
/// names over theory `over`. The whole input must be consumed.
pub fn parse_object_str(
    graph: &TheoryGraph,
    text: &str,
    file: &str,
    over: &str,
) -> Result<Object, ParseError> {
    let mut p = P::new(text, file)?;
    let o = parse_obj(&mut p, graph, over)?;
    p.expect_eof()?;
    Ok(o)
}

pub fn parse_morph_str(
    graph: &TheoryGraph,
    text: &str,
    file: &str,
) -> Result<MorphismExpr, ParseError> {
    let mut p = P::new(text, file)?;
    let m = parse_morph(&mut p, graph)?;
    p.expect_eof()?;
    Ok(m)
}

pub fn parse_context_str(
    graph: &TheoryGraph,
    text: &str,
    file: &str,
    over: &str,
) -> Result<Context, ParseError> {
    let mut p = P::new(text, file)?;
    let c = parse_ctx(&mut p, graph, over)?;
    p.expect_eof()?;
    Ok(c)
}

/// Query files: `query { [ctx CTX ;] goal OBJ ; }` optionally followed by
/// `solution { [assign $x := OBJ ;]* proof OBJ ; }`. Query objects resolve
/// over `goal_theory`, solution objects over `proof_theory`.
pub fn parse_query_file(
    graph: &TheoryGraph,
    text: &str,
    file: &str,
    goal_theory: &str,
    proof_theory: &str,
) -> Result<QueryFile, ParseError> {
    let mut p = P::new(text, file)?;
    p.expect_kw("query")?;
    p.expect(&Tok::LBrace)?;
    let mut ctx = Context::default();
    if p.at_kw("ctx") {
        p.next();
        ctx = parse_ctx(&mut p, graph, goal_theory)?;
        p.expect(&Tok::Semi)?;
    }
    p.expect_kw("goal")?;
    let formula = parse_obj(&mut p, graph, goal_theory)?;
    p.expect(&Tok::Semi)?;
    p.expect(&Tok::RBrace)?;
    let query = Query { context: ctx, formula };

    let mut solution = None;
    if p.at_kw("solution") {
        solution = Some(parse_solution_block(&mut p, graph, proof_theory)?);
    }
    p.expect_eof()?;
    Ok(QueryFile { query, solution })
}

/// A solution block on its own: `solution { [assign $x := OBJ ;]* proof OBJ ; }`.
pub fn parse_solution_file(
    graph: &TheoryGraph,
    text: &str,
    file: &str,
    proof_theory: &str,
) -> Result<SolutionDecl, ParseError> {
    let mut p = P::new(text, file)?;
    let s = parse_solution_block(&mut p, graph, proof_theory)?;
    p.expect_eof()?;
    Ok(s)
}

fn parse_solution_block(
    p: &mut P,
    graph: &TheoryGraph,
    proof_theory: &str,
) -> Result<SolutionDecl, ParseError> {
    p.expect_kw("solution")?;
    p.expect(&Tok::LBrace)?;
    let mut pairs = Vec::new();
    while p.at_kw("assign") {
        p.next();
        p.expect(&Tok::Dollar)?;
        let (name, ..) = p.expect_name()?;
        p.expect(&Tok::ColonEq)?;
        let value = parse_obj(p, graph, proof_theory)?;
        p.expect(&Tok::Semi)?;
        pairs.push(SubstPair { name, value });
    }
    p.expect_kw("proof")?;
    let proof = parse_obj(p, graph, proof_theory)?;
    p.expect(&Tok::Semi)?;
    p.expect(&Tok::RBrace)?;
    Ok(SolutionDecl { subst: Substitution(pairs), proof })
}

/// Widening files:
/// ```text
/// widening {
///   spec NAME { symdecl* }
///   extend mu1 { NAME := OBJ ; ... }
///   extend eta1 { [THEORY/]NAME := OBJ ; ... }
///   ...
/// }
/// ```
/// New-spec declarations resolve over a copy of `spec` requalified to NAME;
/// mu images resolve over the respective system theory; eta images resolve
/// over the new specification.
pub fn parse_widening_file(
    graph: &TheoryGraph,
    text: &str,
    file: &str,
    spec: &str,
    sys1: &str,
    sys2: &str,
) -> Result<WideningInput, ParseError> {
    let mut p = P::new(text, file)?;
    p.expect_kw("widening")?;
    p.expect(&Tok::LBrace)?;
    p.expect_kw("spec")?;
    let (new_spec, nl, nc) = p.expect_name()?;
    if graph.theory(&new_spec).is_some() {
        return Err(p.err_at(nl, nc, format!("theory {new_spec} already exists")));
    }
    let base = graph
        .theory(spec)
        .ok_or_else(|| p.err_at(nl, nc, format!("unknown theory {spec}")))?;

    // Resolution environment: the base graph plus the requalified copy of
    // the specification, which then accumulates the new declarations.
    let mut env = graph.clone();
    env.decls.push(GraphDecl::Theory(base.requalified(&new_spec)));
    let idx = env.decls.len() - 1;

    p.expect(&Tok::LBrace)?;
    let mut ext = Vec::new();
    loop {
        if p.eat(&Tok::RBrace) {
            break;
        }
        let (sname, sl, sc) = p.expect_name()?;
        if env.symbol(&new_spec, &sname).is_some() {
            return Err(p.err_at(sl, sc, format!("{new_spec} already declares {sname}")));
        }
        let mut ty = None;
        if p.eat(&Tok::Colon) {
            ty = Some(parse_obj(&mut p, &env, &new_spec)?);
        }
        let mut def = None;
        if p.eat(&Tok::Eq) {
            def = Some(parse_obj(&mut p, &env, &new_spec)?);
        }
        p.expect(&Tok::Semi)?;
        let decl = SymbolDecl { name: sname, ty, def };
        ext.push(decl.clone());
        if let GraphDecl::Theory(t) = &mut env.decls[idx] {
            t.body.push(decl);
        }
    }

    let mut out = WideningInput { new_spec: new_spec.clone(), ext, ..Default::default() };
    loop {
        if p.eat(&Tok::RBrace) {
            break;
        }
        p.expect_kw("extend")?;
        let (role, rl, rc) = p.expect_name()?;
        p.expect(&Tok::LBrace)?;
        match role.as_str() {
            "mu1" | "mu2" => {
                let over = if role == "mu1" { sys1 } else { sys2 };
                let dst = if role == "mu1" { &mut out.mu1 } else { &mut out.mu2 };
                loop {
                    if p.eat(&Tok::RBrace) {
                        break;
                    }
                    let (symbol, ..) = p.expect_name()?;
                    p.expect(&Tok::ColonEq)?;
                    let image = parse_obj(&mut p, graph, over)?;
                    p.expect(&Tok::Semi)?;
                    dst.push(Assignment { symbol, image });
                }
            }
            "eta1" | "eta2" => {
                let dst = if role == "eta1" { &mut out.eta1 } else { &mut out.eta2 };
                loop {
                    if p.eat(&Tok::RBrace) {
                        break;
                    }
                    let (first, fl, fc) = p.expect_name()?;
                    let (theory, symbol) = if p.eat(&Tok::Slash) {
                        let (sym, sl, sc) = p.expect_name()?;
                        if graph.theory(&first).is_none() {
                            return Err(p.err_at(fl, fc, format!("unknown theory {first}")));
                        }
                        if graph.symbol(&first, &sym).is_none() {
                            return Err(
                                p.err_at(sl, sc, format!("theory {first} has no symbol {sym}"))
                            );
                        }
                        (Some(first), sym)
                    } else {
                        (None, first)
                    };
                    p.expect(&Tok::ColonEq)?;
                    let image = parse_obj(&mut p, &env, &new_spec)?;
                    p.expect(&Tok::Semi)?;
                    dst.push(ExtAssign { theory, symbol, image });
                }
            }
            other => {
                return Err(p.err_at(
                    rl,
                    rc,
                    format!("unknown extension role {other} (expected mu1, mu2, eta1, or eta2)"),
                ))
            }
        }
    }
    p.expect_eof()?;
    Ok(out)
}

struct P<'a> {
    toks: Vec<Lexeme>,
    pos: usize,
    file: &'a str,
}

impl<'a> P<'a> {
    fn new(text: &str, file: &'a str) -> Result<P<'a>, ParseError> {
        Ok(P { toks: lex(text, file)?, pos: 0, file })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|l| &l.tok)
    }

    fn next(&mut self) -> Option<Lexeme> {
        let l = self.toks.get(self.pos).cloned();
        if l.is_some() {
            self.pos += 1;
        }
        l
    }

    fn here(&self) -> (u32, u32) {
        match self.toks.get(self.pos) {
            Some(l) => (l.line, l.col),
            None => self.toks.last().map(|l| (l.line, l.col)).unwrap_or((1, 1)),
        }
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(self.file, line, col, message)
    }

    fn err_at(&self, line: u32, col: u32, message: impl Into<String>) -> ParseError {
        ParseError::new(self.file, line, col, message)
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == Some(t)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(n)) if n == kw)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.err_here(match self.peek() {
                Some(found) => format!("expected {t}, found {found}"),
                None => format!("expected {t}, found end of input"),
            }))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_kw(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err_here(match self.peek() {
                Some(found) => format!("expected {kw}, found {found}"),
                None => format!("expected {kw}, found end of input"),
            }))
        }
    }

    fn expect_name(&mut self) -> Result<(Name, u32, u32), ParseError> {
        match self.next() {
            Some(Lexeme { tok: Tok::Name(n), line, col }) => Ok((n, line, col)),
            Some(l) => Err(self.err_at(l.line, l.col, format!("expected a name, found {}", l.tok))),
            None => Err(self.err_here("expected a name, found end of input")),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err_here(format!("unexpected {t} after the end of the input"))),
        }
    }
}

/// Innermost-first resolution: the theory itself (as parsed so far), then up
/// the meta chain. Each level of the chain is a single theory, so the
/// grammar's same-level ambiguity cannot arise.
fn resolve_unqual(graph: &TheoryGraph, over: &str, name: &str) -> Option<QName> {
    let chain = graph.meta_chain(over).ok()?;
    chain
        .iter()
        .rev()
        .find(|th| th.decl(name).is_some())
        .map(|th| (th.name.clone(), name.to_string()))
}

fn parse_obj(p: &mut P, graph: &TheoryGraph, over: &str) -> Result<Object, ParseError> {
    let Some(lx) = p.next() else {
        return Err(p.err_here("expected an object, found end of input"));
    };
    match lx.tok {
        Tok::Hid => Ok(Object::Hid),
        Tok::Dollar => {
            let (name, ..) = p.expect_name()?;
            Ok(Object::var(name))
        }
        Tok::At => {
            p.expect(&Tok::LParen)?;
            let head = parse_obj(p, graph, over)?;
            let mut args = Vec::new();
            p.expect(&Tok::Comma)?;
            args.push(parse_obj(p, graph, over)?);
            while p.eat(&Tok::Comma) {
                args.push(parse_obj(p, graph, over)?);
            }
            p.expect(&Tok::RParen)?;
            if head.is_sym(LF_ARROW.0, LF_ARROW.1) && args.len() >= 2 {
                // A → B → C sugar: right-fold into Pis binding `_`.
                let mut acc = args.pop().unwrap();
                for a in args.into_iter().rev() {
                    acc = Object::Bind {
                        binder: Box::new(Object::sym(LF_PI.0, LF_PI.1)),
                        bound: Context(vec![VarDecl::typed("_", a)]),
                        body: Box::new(acc),
                    };
                }
                Ok(acc)
            } else {
                Ok(Object::app(head, args))
            }
        }
        Tok::Name(n) => {
            if p.at(&Tok::Slash) {
                p.next();
                let (sym, sl, sc) = p.expect_name()?;
                if graph.theory(&n).is_none() {
                    return Err(p.err_at(lx.line, lx.col, format!("unknown theory {n}")));
                }
                if graph.symbol(&n, &sym).is_none() {
                    return Err(p.err_at(sl, sc, format!("theory {n} has no symbol {sym}")));
                }
                Ok(Object::sym(n, sym))
            } else if n == "bind" && p.at(&Tok::LParen) {
                p.next();
                let binder = parse_obj(p, graph, over)?;
                p.expect(&Tok::Comma)?;
                let ctx = parse_ctx(p, graph, over)?;
                p.expect(&Tok::Comma)?;
                let body = parse_obj(p, graph, over)?;
                p.expect(&Tok::RParen)?;
                // Multi-bindings are nested single binders; parsing
                // canonicalizes immediately.
                let mut acc = body;
                for d in ctx.0.into_iter().rev() {
                    acc = Object::Bind {
                        binder: Box::new(binder.clone()),
                        bound: Context(vec![d]),
                        body: Box::new(acc),
                    };
                }
                Ok(acc)
            } else {
                match resolve_unqual(graph, over, &n) {
                    Some((t, c)) => Ok(Object::sym(t, c)),
                    None => Err(p.err_at(
                        lx.line,
                        lx.col,
                        format!("cannot resolve {n} over theory {over}"),
                    )),
                }
            }
        }
        other => Err(p.err_at(lx.line, lx.col, format!("expected an object, found {other}"))),
    }
}

fn parse_ctx(p: &mut P, graph: &TheoryGraph, over: &str) -> Result<Context, ParseError> {
    p.expect(&Tok::LBracket)?;
    let mut decls = Vec::new();
    loop {
        p.expect(&Tok::Dollar)?;
        let (name, ..) = p.expect_name()?;
        let ty = if p.eat(&Tok::Colon) { Some(parse_obj(p, graph, over)?) } else { None };
        decls.push(VarDecl { name, ty });
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect(&Tok::RBracket)?;
    Ok(Context(decls))
}

fn parse_morph_atom(p: &mut P, graph: &TheoryGraph) -> Result<MorphismExpr, ParseError> {
    let (n, l, c) = p.expect_name()?;
    if n == "id" && p.at(&Tok::LParen) {
        p.next();
        let (t, tl, tc) = p.expect_name()?;
        if graph.theory(&t).is_none() {
            return Err(p.err_at(tl, tc, format!("unknown theory {t}")));
        }
        p.expect(&Tok::RParen)?;
        Ok(MorphismExpr::ident(t))
    } else {
        if graph.view(&n).is_none() {
            return Err(p.err_at(l, c, format!("unknown view {n}")));
        }
        Ok(MorphismExpr::named(n))
    }
}

/// `f;g` composes left-associatively. A `;` continues the morphism only when
/// what follows is itself a morphism (a declared view, or `id(`); otherwise
/// the `;` belongs to the surrounding declaration.
fn parse_morph(p: &mut P, graph: &TheoryGraph) -> Result<MorphismExpr, ParseError> {
    let mut m = parse_morph_atom(p, graph)?;
    while p.at(&Tok::Semi) {
        let continues = match p.peek2() {
            Some(Tok::Name(n)) => n == "id" || graph.view(n).is_some(),
            _ => false,
        };
        if !continues {
            break;
        }
        p.next();
        let rhs = parse_morph_atom(p, graph)?;
        m = MorphismExpr::comp(m, rhs);
    }
    Ok(m)
}

fn parse_theory(p: &mut P, prog: &mut Program) -> Result<(), ParseError> {
    p.expect_kw("theory")?;
    let (tname, tl, tc) = p.expect_name()?;
    prog.spans.insert(
        SpanKey::Theory(tname.clone()),
        Span { file: p.file.to_string(), line: tl, col: tc },
    );
    let mut meta = None;
    if p.eat(&Tok::Colon) {
        let (m, ml, mc) = p.expect_name()?;
        if prog.graph.theory(&m).is_none() {
            return Err(p.err_at(ml, mc, format!("unknown meta-theory {m}")));
        }
        meta = Some(m);
    }
    p.expect(&Tok::LBrace)?;
    prog.graph.decls.push(GraphDecl::Theory(Theory::new(tname.clone(), meta)));
    let idx = prog.graph.decls.len() - 1;
    loop {
        if p.eat(&Tok::RBrace) {
            break;
        }
        let (sname, sl, sc) = p.expect_name()?;
        prog.spans.insert(
            SpanKey::Symbol(tname.clone(), sname.clone()),
            Span { file: p.file.to_string(), line: sl, col: sc },
        );
        let mut ty = None;
        if p.eat(&Tok::Colon) {
            ty = Some(parse_obj(p, &prog.graph, &tname)?);
        }
        let mut def = None;
        if p.eat(&Tok::Eq) {
            def = Some(parse_obj(p, &prog.graph, &tname)?);
        }
        p.expect(&Tok::Semi)?;
        if let GraphDecl::Theory(t) = &mut prog.graph.decls[idx] {
            t.body.push(SymbolDecl { name: sname, ty, def });
        }
    }
    Ok(())
}

fn parse_view(p: &mut P, prog: &mut Program) -> Result<(), ParseError> {
    p.expect_kw("view")?;
    let (vname, vl, vc) = p.expect_name()?;
    prog.spans.insert(
        SpanKey::View(vname.clone()),
        Span { file: p.file.to_string(), line: vl, col: vc },
    );
    p.expect(&Tok::Colon)?;
    let (from, fl, fc) = p.expect_name()?;
    if prog.graph.theory(&from).is_none() {
        return Err(p.err_at(fl, fc, format!("unknown theory {from}")));
    }
    p.expect(&Tok::Arrow)?;
    let (to, tl, tc) = p.expect_name()?;
    if prog.graph.theory(&to).is_none() {
        return Err(p.err_at(tl, tc, format!("unknown theory {to}")));
    }
    let mut meta_morph = None;
    if p.at_kw("meta") {
        p.next();
        meta_morph = Some(parse_morph(p, &prog.graph)?);
    }
    p.expect(&Tok::LBrace)?;
    let mut body = Vec::new();
    loop {
        if p.eat(&Tok::RBrace) {
            break;
        }
        let (sname, sl, sc) = p.expect_name()?;
        prog.spans.insert(
            SpanKey::Assign(vname.clone(), sname.clone()),
            Span { file: p.file.to_string(), line: sl, col: sc },
        );
        p.expect(&Tok::ColonEq)?;
        let image = parse_obj(p, &prog.graph, &to)?;
        p.expect(&Tok::Semi)?;
        body.push(Assignment { symbol: sname, image });
    }
    prog.graph.decls.push(GraphDecl::View(View { name: vname, from, to, meta_morph, body }));
    Ok(())
}

fn parse_bundle(p: &mut P, prog: &mut Program) -> Result<(), ParseError> {
    p.expect_kw("bundle")?;
    let (name, ..) = p.expect_name()?;
    p.expect(&Tok::LBrace)?;
    p.expect_kw("spec")?;
    let (spec, sl, sc) = p.expect_name()?;
    if prog.graph.theory(&spec).is_none() {
        return Err(p.err_at(sl, sc, format!("unknown theory {spec}")));
    }
    p.expect(&Tok::Semi)?;
    let sys1 = parse_sys(p, prog, "sys1")?;
    let sys2 = parse_sys(p, prog, "sys2")?;
    p.expect(&Tok::RBrace)?;
    prog.bundles.push(BundleDecl { name, spec, sys1, sys2, src_file: p.file.to_string() });
    Ok(())
}

fn parse_sys(p: &mut P, prog: &Program, kw: &str) -> Result<SysDecl, ParseError> {
    p.expect_kw(kw)?;
    let (sys, sl, sc) = p.expect_name()?;
    if prog.graph.theory(&sys).is_none() {
        return Err(p.err_at(sl, sc, format!("unknown theory {sys}")));
    }
    p.expect_kw("via")?;
    let via = parse_morph(p, &prog.graph)?;
    let mut inv = None;
    if p.at_kw("inv") {
        p.next();
        inv = Some(parse_morph(p, &prog.graph)?);
    }
    p.expect(&Tok::Semi)?;
    Ok(SysDecl { sys, via, inv })
}
