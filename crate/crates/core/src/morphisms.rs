use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foundation::{self, JudgeError};
use crate::kernel::{
    Code, Context, KernelError, Name, Object, QName, Substitution, SubstPair, TheoryGraph,
    VarDecl, Violation,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub symbol: Name,
    pub image: Object,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct View {
    pub name: Name,
    pub from: Name,
    pub to: Name,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta_morph: Option<MorphismExpr>,
    pub body: Vec<Assignment>,
}

impl View {
    pub fn assignment(&self, symbol: &str) -> Option<&Assignment> {
        self.body.iter().find(|a| a.symbol == symbol)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MorphismExpr {
    Named { view: Name },
    Ident { theory: Name },
    Comp { first: Box<MorphismExpr>, then: Box<MorphismExpr> },
}

impl MorphismExpr {
    pub fn named(v: impl Into<Name>) -> MorphismExpr {
        MorphismExpr::Named { view: v.into() }
    }

    pub fn ident(t: impl Into<Name>) -> MorphismExpr {
        MorphismExpr::Ident { theory: t.into() }
    }

    /// Diagram order: apply `first`, then `then`.
    pub fn comp(first: MorphismExpr, then: MorphismExpr) -> MorphismExpr {
        MorphismExpr::Comp { first: Box::new(first), then: Box::new(then) }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorphError {
    #[error("unknown view {0}")]
    UnknownView(Name),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("composition mismatch: codomain {0} does not chain with domain {1}")]
    CompositionMismatch(Name, Name),
    #[error("signature mismatch: ({0} -> {1}) vs ({2} -> {3})")]
    SignatureMismatch(Name, Name, Name, Name),
    #[error("not an object over {theory}: {detail}")]
    NotAnObjectOver { theory: Name, detail: String },
    #[error("view {view} has no assignment for {symbol}")]
    MissingAssignment { view: Name, symbol: Name },
    #[error("view {view} needs a meta-morphism to translate symbol {theory}/{symbol}")]
    MissingMetaMorphism { view: Name, theory: Name, symbol: Name },
    #[error(transparent)]
    Judge(#[from] JudgeError),
}

pub fn morphism_signature(
    graph: &TheoryGraph,
    m: &MorphismExpr,
) -> Result<(Name, Name), MorphError> {
    match m {
        MorphismExpr::Named { view } => {
            let v = graph.view(view).ok_or_else(|| MorphError::UnknownView(view.clone()))?;
            Ok((v.from.clone(), v.to.clone()))
        }
        MorphismExpr::Ident { theory } => {
            if graph.theory(theory).is_none() {
                return Err(KernelError::UnknownTheory(theory.clone()).into());
            }
            Ok((theory.clone(), theory.clone()))
        }
        MorphismExpr::Comp { first, then } => {
            let (a, b) = morphism_signature(graph, first)?;
            let (c, d) = morphism_signature(graph, then)?;
            if b != c {
                return Err(MorphError::CompositionMismatch(b, c));
            }
            Ok((a, d))
        }
    }
}

/// Homomorphic extension of a morphism to whole objects. Total on objects
/// over the domain; the result may contain Hid.
pub fn apply_morphism(
    graph: &TheoryGraph,
    m: &MorphismExpr,
    o: &Object,
) -> Result<Object, MorphError> {
    let (dom, _) = morphism_signature(graph, m)?;
    if let Some(off) = graph.over_theory_offender(&dom, o, &Context::default())? {
        if !matches!(off, crate::kernel::OverOffender::FreeVar(_)) {
            return Err(MorphError::NotAnObjectOver { theory: dom, detail: off.to_string() });
        }
    }
    apply_unchecked(graph, m, o)
}

fn apply_unchecked(
    graph: &TheoryGraph,
    m: &MorphismExpr,
    o: &Object,
) -> Result<Object, MorphError> {
    match m {
        MorphismExpr::Ident { .. } => Ok(o.clone()),
        MorphismExpr::Comp { first, then } => {
            let mid = apply_unchecked(graph, first, o)?;
            apply_unchecked(graph, then, &mid)
        }
        MorphismExpr::Named { view } => {
            let v = graph.view(view).ok_or_else(|| MorphError::UnknownView(view.clone()))?;
            apply_view(graph, v, o)
        }
    }
}

fn apply_view(graph: &TheoryGraph, v: &View, o: &Object) -> Result<Object, MorphError> {
    match o {
        Object::Var { .. } | Object::Hid => Ok(o.clone()),
        Object::Sym { theory, name } => {
            if *theory == v.from {
                match v.assignment(name) {
                    Some(a) => Ok(a.image.clone()),
                    None => Err(MorphError::MissingAssignment {
                        view: v.name.clone(),
                        symbol: name.clone(),
                    }),
                }
            } else {
                match &v.meta_morph {
                    Some(mm) => apply_unchecked(graph, mm, o),
                    None => Err(MorphError::MissingMetaMorphism {
                        view: v.name.clone(),
                        theory: theory.clone(),
                        symbol: name.clone(),
                    }),
                }
            }
        }
        Object::App { head, args } => Ok(Object::app(
            apply_view(graph, v, head)?,
            args.iter().map(|a| apply_view(graph, v, a)).collect::<Result<_, _>>()?,
        )),
        Object::Bind { binder, bound, body } => {
            let mut decls = Vec::with_capacity(bound.len());
            for d in &bound.0 {
                decls.push(VarDecl {
                    name: d.name.clone(),
                    ty: d.ty.as_ref().map(|t| apply_view(graph, v, t)).transpose()?,
                });
            }
            Ok(Object::Bind {
                binder: Box::new(apply_view(graph, v, binder)?),
                bound: Context(decls),
                body: Box::new(apply_view(graph, v, body)?),
            })
        }
    }
}

pub fn apply_morphism_context(
    graph: &TheoryGraph,
    m: &MorphismExpr,
    c: &Context,
) -> Result<Context, MorphError> {
    let mut out = Vec::with_capacity(c.len());
    for d in &c.0 {
        out.push(VarDecl {
            name: d.name.clone(),
            ty: d.ty.as_ref().map(|t| apply_morphism(graph, m, t)).transpose()?,
        });
    }
    Ok(Context(out))
}

pub fn apply_morphism_subst(
    graph: &TheoryGraph,
    m: &MorphismExpr,
    s: &Substitution,
) -> Result<Substitution, MorphError> {
    let mut out = Vec::with_capacity(s.0.len());
    for p in &s.0 {
        out.push(SubstPair { name: p.name.clone(), value: apply_morphism(graph, m, &p.value)? });
    }
    Ok(Substitution(out))
}

/// True iff the image of `o` under `m` contains a Hid node.
pub fn filters(graph: &TheoryGraph, m: &MorphismExpr, o: &Object) -> Result<bool, MorphError> {
    Ok(apply_morphism(graph, m, o)?.contains_hid())
}

fn filters_symbol(graph: &TheoryGraph, m: &MorphismExpr, q: &QName) -> Result<bool, MorphError> {
    Ok(apply_unchecked(graph, m, &Object::sym(q.0.clone(), q.1.clone()))?.contains_hid())
}

/// Per-assignment conditions of the weakened strictness rule (and optionally
/// the stricter prior rule), reported as violations. Structural problems with
/// the view (missing/unknown assignments, bad meta-morphism) are reported by
/// well_formed_graph; this checks the typing/equality side only and skips
/// assignments it cannot interpret structurally.
pub fn check_view(
    graph: &TheoryGraph,
    v: &View,
    fuel: u64,
    strict_filtering: bool,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let dom = match graph.theory(&v.from) {
        Some(t) => t,
        None => return out,
    };
    let morph = MorphismExpr::named(v.name.clone());
    for a in &v.body {
        let decl = match dom.decl(&a.symbol) {
            Some(d) => d,
            None => continue,
        };
        if matches!(a.image, Object::Hid) {
            continue;
        }
        let mut filtered_ty = None;
        if let Some(ty) = &decl.ty {
            match apply_morphism(graph, &morph, ty) {
                Ok(img) => filtered_ty = Some((img.contains_hid(), img)),
                Err(e) => {
                    out.push(view_violation(v, a, Code::BadMetaMorphism, e.to_string()));
                    continue;
                }
            }
        }
        let mut filtered_def = None;
        if let Some(def) = &decl.def {
            match apply_morphism(graph, &morph, def) {
                Ok(img) => filtered_def = Some((img.contains_hid(), img)),
                Err(e) => {
                    out.push(view_violation(v, a, Code::BadMetaMorphism, e.to_string()));
                    continue;
                }
            }
        }
        if strict_filtering {
            let ty_f = filtered_ty.as_ref().is_some_and(|(f, _)| *f);
            let def_f = filtered_def.as_ref().is_some_and(|(f, _)| *f);
            if ty_f || def_f {
                let what = match (ty_f, def_f) {
                    (true, true) => "type and definiens are",
                    (true, false) => "type is",
                    _ => "definiens is",
                };
                out.push(view_violation(
                    v,
                    a,
                    Code::StrictFiltering,
                    format!(
                        "assignment {} := ... maps an unfiltered symbol whose {} filtered",
                        a.symbol, what
                    ),
                ));
            }
        }
        if a.image.contains_hid() {
            let needs_check = filtered_ty.as_ref().is_some_and(|(f, _)| !*f)
                || filtered_def.as_ref().is_some_and(|(f, _)| !*f);
            if needs_check {
                out.push(view_violation(
                    v,
                    a,
                    Code::TypeCheckFailed,
                    format!(
                        "image of {} contains hid but its type or definiens is unfiltered",
                        a.symbol
                    ),
                ));
            }
            continue;
        }
        if let Some((false, ty_img)) = &filtered_ty {
            match foundation::check_type(graph, &v.to, &Context::default(), &a.image, ty_img, fuel)
            {
                Ok(r) if r.holds => {}
                Ok(r) => {
                    let code =
                        if r.fuel_exhausted { Code::FuelExhausted } else { Code::TypeCheckFailed };
                    out.push(view_violation(
                        v,
                        a,
                        code,
                        format!(
                            "image of {} does not have the translated type: {}",
                            a.symbol,
                            r.reason.unwrap_or_default()
                        ),
                    ));
                }
                Err(e) => out.push(view_violation(v, a, Code::TypeCheckFailed, e.to_string())),
            }
        }
        if let Some((false, def_img)) = &filtered_def {
            match foundation::check_eq(graph, &v.to, &Context::default(), &a.image, def_img, fuel) {
                Ok(r) if r.holds => {}
                Ok(r) => {
                    let code =
                        if r.fuel_exhausted { Code::FuelExhausted } else { Code::EqCheckFailed };
                    out.push(view_violation(
                        v,
                        a,
                        code,
                        format!(
                            "image of {} is not equal to the translated definiens: {}",
                            a.symbol,
                            r.reason.unwrap_or_default()
                        ),
                    ));
                }
                Err(e) => out.push(view_violation(v, a, Code::EqCheckFailed, e.to_string())),
            }
        }
    }
    out
}

fn view_violation(v: &View, a: &Assignment, code: Code, message: String) -> Violation {
    Violation {
        code,
        message,
        theory: None,
        view: Some(v.name.clone()),
        symbol: Some(a.symbol.clone()),
        span: None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorphismCompare {
    pub holds: bool,
    pub fuel_exhausted: bool,
    /// Symbols whose images failed the per-symbol equality, with reasons.
    pub failures: Vec<(QName, String)>,
}

fn compare_morphisms(
    graph: &TheoryGraph,
    m1: &MorphismExpr,
    m2: &MorphismExpr,
    fuel: u64,
    skip_filtered_by_m1: bool,
) -> Result<MorphismCompare, MorphError> {
    let (s1, t1) = morphism_signature(graph, m1)?;
    let (s2, t2) = morphism_signature(graph, m2)?;
    if s1 != s2 || t1 != t2 {
        return Err(MorphError::SignatureMismatch(s1, t1, s2, t2));
    }
    let mut failures = Vec::new();
    let mut fuel_exhausted = false;
    for q in graph.accessible_symbols(&s1)? {
        let sym = Object::sym(q.0.clone(), q.1.clone());
        let o1 = apply_unchecked(graph, m1, &sym)?;
        if o1.contains_hid() {
            if skip_filtered_by_m1 {
                continue;
            }
            failures.push((q, "image under the first morphism is filtered".to_string()));
            continue;
        }
        let o2 = apply_unchecked(graph, m2, &sym)?;
        if o2.contains_hid() {
            failures.push((q, "image under the second morphism is filtered".to_string()));
            continue;
        }
        match foundation::check_eq(graph, &t1, &Context::default(), &o1, &o2, fuel) {
            Ok(r) if r.holds => {}
            Ok(r) => {
                if r.fuel_exhausted {
                    fuel_exhausted = true;
                }
                failures.push((q, r.reason.unwrap_or_else(|| "images differ".to_string())));
            }
            Err(e) => failures.push((q, e.to_string())),
        }
    }
    Ok(MorphismCompare { holds: failures.is_empty(), fuel_exhausted, failures })
}

/// ⊢ m1 = m2: images of every symbol accessible to the shared domain are
/// equal over the codomain; a filtered image on either side fails that symbol.
pub fn morphism_eq(
    graph: &TheoryGraph,
    m1: &MorphismExpr,
    m2: &MorphismExpr,
    fuel: u64,
) -> Result<MorphismCompare, MorphError> {
    compare_morphisms(graph, m1, m2, fuel, false)
}

/// ⊢ m1 ≤ m2: as morphism_eq but symbols filtered by m1 are exempt.
pub fn morphism_leq(
    graph: &TheoryGraph,
    m1: &MorphismExpr,
    m2: &MorphismExpr,
    fuel: u64,
) -> Result<MorphismCompare, MorphError> {
    compare_morphisms(graph, m1, m2, fuel, true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseReport {
    pub holds: bool,
    pub fuel_exhausted: bool,
    /// ⊢ mu;eta = id on the source theory.
    pub eq: MorphismCompare,
    /// ⊢ eta;mu ≤ id on the target theory.
    pub leq: MorphismCompare,
}

/// eta : T -> S is a partial inverse of mu : S -> T iff
/// ⊢ mu;eta = id_S and ⊢ eta;mu ≤ id_T.
pub fn is_partial_inverse(
    graph: &TheoryGraph,
    eta: &MorphismExpr,
    mu: &MorphismExpr,
    fuel: u64,
) -> Result<InverseReport, MorphError> {
    let (ms, mt) = morphism_signature(graph, mu)?;
    let (es, et) = morphism_signature(graph, eta)?;
    if ms != et || mt != es {
        return Err(MorphError::SignatureMismatch(es, et, mt, ms));
    }
    let eq = morphism_eq(
        graph,
        &MorphismExpr::comp(mu.clone(), eta.clone()),
        &MorphismExpr::ident(ms.clone()),
        fuel,
    )?;
    let leq = morphism_leq(
        graph,
        &MorphismExpr::comp(eta.clone(), mu.clone()),
        &MorphismExpr::ident(mt),
        fuel,
    )?;
    Ok(InverseReport {
        holds: eq.holds && leq.holds,
        fuel_exhausted: eq.fuel_exhausted || leq.fuel_exhausted,
        eq,
        leq,
    })
}

/// Symbols accessible to the domain of `m` that `m` filters.
pub fn filtered_symbols(graph: &TheoryGraph, m: &MorphismExpr) -> Result<Vec<QName>, MorphError> {
    let (dom, _) = morphism_signature(graph, m)?;
    let mut out = Vec::new();
    for q in graph.accessible_symbols(&dom)? {
        if filters_symbol(graph, m, &q)? {
            out.push(q);
        }
    }
    Ok(out)
}
