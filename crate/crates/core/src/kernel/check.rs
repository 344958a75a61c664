use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::foundation::{self, DEFAULT_FUEL};
use crate::kernel::{GraphDecl, Name, Theory, TheoryGraph};
use crate::morphisms::{self, morphism_signature, MorphismExpr, View};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Span {
    pub file: String,
    pub line: u32,
    pub col: u32,
}

/// Key for attaching source positions to graph items.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpanKey {
    Theory(Name),
    View(Name),
    Symbol(Name, Name),
    Assign(Name, Name),
}

pub type SpanMap = BTreeMap<SpanKey, Span>;

#[derive(Clone, Debug)]
pub struct CheckOpts {
    pub fuel: u64,
    pub strict_filtering: bool,
}

impl Default for CheckOpts {
    fn default() -> CheckOpts {
        CheckOpts { fuel: DEFAULT_FUEL, strict_filtering: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Code {
    DuplicateTheory,
    DuplicateView,
    DuplicateSymbol,
    UnknownMeta,
    MetaCycle,
    UnknownTheoryRef,
    HidInDeclaration,
    SymbolNotAccessible,
    UnboundVariable,
    IllFormedObject,
    MissingAssignment,
    DuplicateAssignment,
    UnknownDomainSymbol,
    MissingMetaMorphism,
    UnexpectedMetaMorphism,
    BadMetaMorphism,
    DefinitionCycle,
    BadDeclaration,
    TypeCheckFailed,
    EqCheckFailed,
    StrictFiltering,
    FuelExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub code: Code,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<Name>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub view: Option<Name>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<Name>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<Span>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.violations.extend(other.violations);
    }
}

/// Two-phase well-formedness: structural shape first (names, references,
/// declaration order, assignment coverage, hid placement, cycles), then —
/// only on structurally sound graphs — per-declaration foundation checks and
/// per-view assignment conditions.
pub fn well_formed_graph(graph: &TheoryGraph, opts: &CheckOpts, spans: &SpanMap) -> CheckReport {
    let mut rep = CheckReport::default();
    structural(graph, &mut rep);
    attach_spans(&mut rep, spans);
    if !rep.ok() {
        return rep;
    }
    semantic(graph, opts, &mut rep);
    attach_spans(&mut rep, spans);
    rep
}

fn attach_spans(rep: &mut CheckReport, spans: &SpanMap) {
    if spans.is_empty() {
        return;
    }
    for v in &mut rep.violations {
        if v.span.is_some() {
            continue;
        }
        let key = match (&v.theory, &v.view, &v.symbol) {
            (Some(t), _, Some(s)) => SpanKey::Symbol(t.clone(), s.clone()),
            (_, Some(w), Some(s)) => SpanKey::Assign(w.clone(), s.clone()),
            (Some(t), _, None) => SpanKey::Theory(t.clone()),
            (_, Some(w), None) => SpanKey::View(w.clone()),
            _ => continue,
        };
        v.span = spans.get(&key).cloned().or_else(|| match key {
            SpanKey::Symbol(t, _) => spans.get(&SpanKey::Theory(t)).cloned(),
            SpanKey::Assign(w, _) => spans.get(&SpanKey::View(w)).cloned(),
            _ => None,
        });
    }
}

fn vio(code: Code, message: String) -> Violation {
    Violation { code, message, theory: None, view: None, symbol: None, span: None }
}

fn structural(graph: &TheoryGraph, rep: &mut CheckReport) {
    let mut theories_seen: BTreeSet<&str> = BTreeSet::new();
    let mut views_seen: BTreeSet<&str> = BTreeSet::new();
    for decl in &graph.decls {
        match decl {
            GraphDecl::Theory(t) => {
                if !theories_seen.insert(&t.name) {
                    rep.violations.push(Violation {
                        theory: Some(t.name.clone()),
                        ..vio(
                            Code::DuplicateTheory,
                            format!("theory {} is declared more than once", t.name),
                        )
                    });
                    continue;
                }
                check_theory_structural(graph, t, &theories_seen, rep);
            }
            GraphDecl::View(v) => {
                if !views_seen.insert(&v.name) {
                    rep.violations.push(Violation {
                        view: Some(v.name.clone()),
                        ..vio(
                            Code::DuplicateView,
                            format!("view {} is declared more than once", v.name),
                        )
                    });
                    continue;
                }
                check_view_structural(graph, v, &theories_seen, &views_seen, rep);
            }
        }
    }
    for cycle in foundation::detect_def_cycles(graph) {
        let names =
            cycle.iter().map(|(t, c)| format!("{t}/{c}")).collect::<Vec<_>>().join(", ");
        rep.violations.push(Violation {
            theory: Some(cycle[0].0.clone()),
            symbol: Some(cycle[0].1.clone()),
            ..vio(Code::DefinitionCycle, format!("definitions form a cycle: {names}"))
        });
    }
}

fn check_theory_structural(
    graph: &TheoryGraph,
    t: &Theory,
    theories_seen: &BTreeSet<&str>,
    rep: &mut CheckReport,
) {
    let mut meta_ok = true;
    if let Some(m) = &t.meta {
        // The meta must exist and come strictly earlier, so every graph we
        // accept can be printed and reparsed in declaration order.
        if !theories_seen.contains(m.as_str()) || m == &t.name {
            meta_ok = false;
            rep.violations.push(Violation {
                theory: Some(t.name.clone()),
                ..vio(
                    Code::UnknownMeta,
                    format!("meta-theory {m} of {} is not declared before it", t.name),
                )
            });
        }
    }
    if meta_ok && graph.meta_chain(&t.name).is_err() {
        rep.violations.push(Violation {
            theory: Some(t.name.clone()),
            ..vio(Code::MetaCycle, format!("meta-theory chain of {} is cyclic", t.name))
        });
        meta_ok = false;
    }

    // Symbols accessible to declarations of this theory: the meta chain plus
    // earlier symbols of the body itself.
    let mut allowed: BTreeSet<(&str, &str)> = BTreeSet::new();
    if meta_ok {
        if let Ok(chain) = graph.meta_chain(&t.name) {
            for th in chain {
                if th.name == t.name {
                    continue;
                }
                for d in &th.body {
                    allowed.insert((&th.name, &d.name));
                }
            }
        }
    }
    let mut body_seen: BTreeSet<&str> = BTreeSet::new();
    for d in &t.body {
        if !body_seen.insert(&d.name) {
            rep.violations.push(Violation {
                theory: Some(t.name.clone()),
                symbol: Some(d.name.clone()),
                ..vio(
                    Code::DuplicateSymbol,
                    format!("symbol {} is declared twice in {}", d.name, t.name),
                )
            });
        }
        for o in d.ty.iter().chain(d.def.iter()) {
            if let Err(e) = o.validate() {
                rep.violations.push(Violation {
                    theory: Some(t.name.clone()),
                    symbol: Some(d.name.clone()),
                    ..vio(Code::IllFormedObject, e)
                });
                continue;
            }
            if o.contains_hid() {
                rep.violations.push(Violation {
                    theory: Some(t.name.clone()),
                    symbol: Some(d.name.clone()),
                    ..vio(
                        Code::HidInDeclaration,
                        format!("declaration of {} contains hid", d.name),
                    )
                });
            }
            if meta_ok {
                for (qt, qn) in o.symbols() {
                    if !allowed.contains(&(qt.as_str(), qn.as_str())) {
                        rep.violations.push(Violation {
                            theory: Some(t.name.clone()),
                            symbol: Some(d.name.clone()),
                            ..vio(
                                Code::SymbolNotAccessible,
                                format!(
                                    "{} refers to {qt}/{qn}, which is not accessible here",
                                    d.name
                                ),
                            )
                        });
                    }
                }
            }
            for v in o.free_vars() {
                rep.violations.push(Violation {
                    theory: Some(t.name.clone()),
                    symbol: Some(d.name.clone()),
                    ..vio(
                        Code::UnboundVariable,
                        format!("declaration of {} has unbound variable ${v}", d.name),
                    )
                });
            }
        }
        allowed.insert((&t.name, &d.name));
    }
}

fn check_view_structural(
    graph: &TheoryGraph,
    v: &View,
    theories_seen: &BTreeSet<&str>,
    views_seen: &BTreeSet<&str>,
    rep: &mut CheckReport,
) {
    let mut sig_ok = true;
    for end in [&v.from, &v.to] {
        if !theories_seen.contains(end.as_str()) {
            sig_ok = false;
            rep.violations.push(Violation {
                view: Some(v.name.clone()),
                ..vio(
                    Code::UnknownTheoryRef,
                    format!("view {} refers to theory {end}, which is not declared before it", v.name),
                )
            });
        }
    }
    if !sig_ok {
        return;
    }
    let dom = graph.theory(&v.from).unwrap();

    match (&dom.meta, &v.meta_morph) {
        (Some(_), None) => {
            rep.violations.push(Violation {
                view: Some(v.name.clone()),
                ..vio(
                    Code::MissingMetaMorphism,
                    format!("domain {} has a meta-theory but {} has no meta-morphism", v.from, v.name),
                )
            });
        }
        (None, Some(_)) => {
            rep.violations.push(Violation {
                view: Some(v.name.clone()),
                ..vio(
                    Code::UnexpectedMetaMorphism,
                    format!("domain {} has no meta-theory but {} has a meta-morphism", v.from, v.name),
                )
            });
        }
        (Some(meta), Some(mm)) => {
            if let Some(bad) = morph_ref_problem(mm, theories_seen, views_seen) {
                rep.violations.push(Violation {
                    view: Some(v.name.clone()),
                    ..vio(Code::BadMetaMorphism, bad)
                });
            } else {
                match morphism_signature(graph, mm) {
                    Err(e) => rep.violations.push(Violation {
                        view: Some(v.name.clone()),
                        ..vio(Code::BadMetaMorphism, e.to_string())
                    }),
                    Ok((mf, mt)) => {
                        if &mf != meta {
                            rep.violations.push(Violation {
                                view: Some(v.name.clone()),
                                ..vio(
                                    Code::BadMetaMorphism,
                                    format!(
                                        "meta-morphism of {} starts at {mf}, expected the domain's meta-theory {meta}",
                                        v.name
                                    ),
                                )
                            });
                        }
                        match graph.meta_chain(&v.to) {
                            Ok(chain) if chain.iter().any(|th| th.name == mt) => {}
                            _ => rep.violations.push(Violation {
                                view: Some(v.name.clone()),
                                ..vio(
                                    Code::BadMetaMorphism,
                                    format!(
                                        "meta-morphism of {} lands in {mt}, which is not in the meta-chain of {}",
                                        v.name, v.to
                                    ),
                                )
                            }),
                        }
                    }
                }
            }
        }
        (None, None) => {}
    }

    // Exactly one assignment per domain-body symbol.
    let mut assigned: BTreeSet<&str> = BTreeSet::new();
    for a in &v.body {
        if dom.decl(&a.symbol).is_none() {
            rep.violations.push(Violation {
                view: Some(v.name.clone()),
                symbol: Some(a.symbol.clone()),
                ..vio(
                    Code::UnknownDomainSymbol,
                    format!("{} assigns {}, which {} does not declare", v.name, a.symbol, v.from),
                )
            });
            continue;
        }
        if !assigned.insert(&a.symbol) {
            rep.violations.push(Violation {
                view: Some(v.name.clone()),
                symbol: Some(a.symbol.clone()),
                ..vio(
                    Code::DuplicateAssignment,
                    format!("{} assigns {} more than once", v.name, a.symbol),
                )
            });
            continue;
        }
        if let Err(e) = a.image.validate() {
            rep.violations.push(Violation {
                view: Some(v.name.clone()),
                symbol: Some(a.symbol.clone()),
                ..vio(Code::IllFormedObject, e)
            });
            continue;
        }
        match graph.over_theory_offender(&v.to, &a.image, &Default::default()) {
            Ok(None) => {}
            Ok(Some(crate::kernel::OverOffender::Symbol(th, c))) => {
                rep.violations.push(Violation {
                    view: Some(v.name.clone()),
                    symbol: Some(a.symbol.clone()),
                    ..vio(
                        Code::SymbolNotAccessible,
                        format!(
                            "image of {} refers to {th}/{c}, which is not accessible to {}",
                            a.symbol, v.to
                        ),
                    )
                });
            }
            Ok(Some(crate::kernel::OverOffender::FreeVar(x))) => {
                rep.violations.push(Violation {
                    view: Some(v.name.clone()),
                    symbol: Some(a.symbol.clone()),
                    ..vio(
                        Code::UnboundVariable,
                        format!("image of {} has unbound variable ${x}", a.symbol),
                    )
                });
            }
            Err(e) => {
                rep.violations.push(Violation {
                    view: Some(v.name.clone()),
                    symbol: Some(a.symbol.clone()),
                    ..vio(Code::UnknownTheoryRef, e.to_string())
                });
            }
        }
    }
    for d in &dom.body {
        if !assigned.contains(d.name.as_str()) {
            rep.violations.push(Violation {
                view: Some(v.name.clone()),
                symbol: Some(d.name.clone()),
                ..vio(
                    Code::MissingAssignment,
                    format!("{} has no assignment for {}/{}", v.name, v.from, d.name),
                )
            });
        }
    }
}

fn morph_ref_problem(
    m: &MorphismExpr,
    theories_seen: &BTreeSet<&str>,
    views_seen: &BTreeSet<&str>,
) -> Option<String> {
    match m {
        MorphismExpr::Named { view } => (!views_seen.contains(view.as_str()))
            .then(|| format!("view {view} is not declared before it is used")),
        MorphismExpr::Ident { theory } => (!theories_seen.contains(theory.as_str()))
            .then(|| format!("theory {theory} is not declared before it is used")),
        MorphismExpr::Comp { first, then } => morph_ref_problem(first, theories_seen, views_seen)
            .or_else(|| morph_ref_problem(then, theories_seen, views_seen)),
    }
}

fn semantic(graph: &TheoryGraph, opts: &CheckOpts, rep: &mut CheckReport) {
    for t in graph.theories() {
        for d in &t.body {
            match foundation::check_decl(graph, &t.name, d, opts.fuel) {
                Ok(r) if r.holds => {}
                Ok(r) => {
                    let code =
                        if r.fuel_exhausted { Code::FuelExhausted } else { Code::BadDeclaration };
                    rep.violations.push(Violation {
                        theory: Some(t.name.clone()),
                        symbol: Some(d.name.clone()),
                        ..vio(
                            code,
                            format!(
                                "declaration of {} is not well-typed: {}",
                                d.name,
                                r.reason.unwrap_or_default()
                            ),
                        )
                    });
                }
                Err(e) => rep.violations.push(Violation {
                    theory: Some(t.name.clone()),
                    symbol: Some(d.name.clone()),
                    ..vio(Code::BadDeclaration, e.to_string())
                }),
            }
        }
    }
    for v in graph.views() {
        rep.violations
            .extend(morphisms::check_view(graph, v, opts.fuel, opts.strict_filtering));
    }
}
