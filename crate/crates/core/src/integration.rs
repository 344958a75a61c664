use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foundation::{self, JudgeError};
use crate::kernel::{
    alpha_eq, subst_apply, CheckOpts, CheckReport, Context, GraphDecl, KernelError, Name, Object,
    QName, Substitution, SymbolDecl, TheoryGraph,
};
use crate::morphisms::{
    self, apply_morphism, apply_morphism_context, apply_morphism_subst, filters,
    morphism_signature, Assignment, MorphError, MorphismExpr, View,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemImpl {
    pub spec: Name,
    pub sys: Name,
    /// spec -> sys.
    pub mu: MorphismExpr,
    /// sys -> spec; absent for a system that only receives (directed mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<MorphismExpr>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BundleLaws {
    /// i;o agrees with the identity at every symbol i does not filter.
    /// None when the bundle is directed (no i).
    pub io_id: Option<bool>,
    pub mu1_o_eq_mu2: bool,
    pub mu2_i_eq_mu1: Option<bool>,
    /// Informational: the partial-inverse laws for each system and for (i, o).
    pub s1_inverse: bool,
    pub s2_inverse: Option<bool>,
    pub io_partial_inverse: Option<bool>,
    pub fuel_exhausted: bool,
}

impl BundleLaws {
    pub fn all_hold(&self) -> bool {
        self.io_id.unwrap_or(true)
            && self.mu1_o_eq_mu2
            && self.mu2_i_eq_mu1.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrationBundle {
    pub spec: Name,
    pub s1: SystemImpl,
    pub s2: SystemImpl,
    /// sys2 -> sys1 (eta2;mu1); absent in directed mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<MorphismExpr>,
    /// sys1 -> sys2 (eta1;mu2).
    pub o: MorphismExpr,
    pub laws: BundleLaws,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub context: Context,
    pub formula: Object,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProofSketch {
    pub steps: Vec<Object>,
    pub gaps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    /// Theory the transported answer lives over (sys2).
    pub theory: Name,
    pub subst: Substitution,
    pub proof: Object,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sketch: Option<ProofSketch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One `extend` assignment for widening. A bare left-hand side (theory:
/// None) adds or replaces an assignment of the extended view's own body; a
/// qualified one re-routes the image of a meta-chain symbol inside the
/// view's materialized meta-morphism.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtAssign {
    pub theory: Option<Name>,
    pub symbol: Name,
    pub image: Object,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct WideningInput {
    pub new_spec: Name,
    pub ext: Vec<SymbolDecl>,
    pub mu1: Vec<Assignment>,
    pub mu2: Vec<Assignment>,
    pub eta1: Vec<ExtAssign>,
    pub eta2: Vec<ExtAssign>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegError {
    #[error("system {0} has no inverse view (eta), required here")]
    MissingEta(Name),
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("query cannot be translated; filtered symbols: {}", fmt_qnames(.offenders))]
    FilteredQuery { offenders: Vec<QName> },
    #[error("ill-formed query: {0}")]
    BadQuery(String),
    #[error("substitution does not fit the translated context: {0}")]
    BadSubstitution(String),
    #[error("proof does not check against the translated goal: {0}")]
    BadProof(String),
    #[error("fuel exhausted while {0}")]
    FuelExhausted(String),
    #[error("widening not supported here: {0}")]
    Unsupported(String),
    #[error("bad extension: {0}")]
    BadExtension(String),
}

fn fmt_qnames(qs: &[QName]) -> String {
    qs.iter().map(|(t, c)| format!("{t}/{c}")).collect::<Vec<_>>().join(", ")
}

/// Assembles i = eta2;mu1 and o = eta1;mu2 and evaluates the bundle laws.
/// eta1 is always required (answers must come back); a missing eta2 yields a
/// directed bundle where i and the laws involving it are absent. Law
/// failures are recorded in the result, not raised.
pub fn build_bundle(
    graph: &TheoryGraph,
    spec: &str,
    s1: SystemImpl,
    s2: SystemImpl,
    fuel: u64,
) -> Result<IntegrationBundle, IntegError> {
    if s1.spec != spec || s2.spec != spec {
        return Err(IntegError::BadQuery(format!(
            "systems implement {} and {}, expected {spec}",
            s1.spec, s2.spec
        )));
    }
    for s in [&s1, &s2] {
        let (f, t) = morphism_signature(graph, &s.mu)?;
        if f != spec || t != s.sys {
            return Err(MorphError::SignatureMismatch(f, t, spec.to_string(), s.sys.clone()).into());
        }
        if let Some(eta) = &s.eta {
            let (ef, et) = morphism_signature(graph, eta)?;
            if ef != s.sys || et != spec {
                return Err(
                    MorphError::SignatureMismatch(ef, et, s.sys.clone(), spec.to_string()).into()
                );
            }
        }
    }
    let eta1 = s1.eta.clone().ok_or_else(|| IntegError::MissingEta(s1.sys.clone()))?;
    let o = MorphismExpr::comp(eta1.clone(), s2.mu.clone());
    let i = s2.eta.clone().map(|eta2| MorphismExpr::comp(eta2, s1.mu.clone()));

    let mut fuel_exhausted = false;
    let mut track = |cmp: morphisms::MorphismCompare| {
        fuel_exhausted |= cmp.fuel_exhausted;
        cmp.holds
    };

    let mu1_o_eq_mu2 = track(morphisms::morphism_eq(
        graph,
        &MorphismExpr::comp(s1.mu.clone(), o.clone()),
        &s2.mu,
        fuel,
    )?);
    let (io_id, mu2_i_eq_mu1, io_partial_inverse) = match &i {
        Some(i) => {
            let io = track(morphisms::morphism_leq(
                graph,
                &MorphismExpr::comp(i.clone(), o.clone()),
                &MorphismExpr::ident(s2.sys.clone()),
                fuel,
            )?);
            let tri = track(morphisms::morphism_eq(
                graph,
                &MorphismExpr::comp(s2.mu.clone(), i.clone()),
                &s1.mu,
                fuel,
            )?);
            let inv = morphisms::is_partial_inverse(graph, i, &o, fuel)?;
            fuel_exhausted |= inv.fuel_exhausted;
            (Some(io), Some(tri), Some(inv.holds))
        }
        None => (None, None, None),
    };
    let s1_inv = morphisms::is_partial_inverse(graph, &eta1, &s1.mu, fuel)?;
    fuel_exhausted |= s1_inv.fuel_exhausted;
    let s2_inverse = match &s2.eta {
        Some(eta2) => {
            let r = morphisms::is_partial_inverse(graph, eta2, &s2.mu, fuel)?;
            fuel_exhausted |= r.fuel_exhausted;
            Some(r.holds)
        }
        None => None,
    };

    Ok(IntegrationBundle {
        spec: spec.to_string(),
        s1,
        s2,
        i,
        o,
        laws: BundleLaws {
            io_id,
            mu1_o_eq_mu2,
            mu2_i_eq_mu1,
            s1_inverse: s1_inv.holds,
            s2_inverse,
            io_partial_inverse,
            fuel_exhausted,
        },
    })
}

fn query_symbols(q: &Query) -> BTreeSet<QName> {
    let mut syms = q.formula.symbols();
    for d in &q.context.0 {
        if let Some(ty) = &d.ty {
            syms.extend(ty.symbols());
        }
    }
    syms
}

fn validate_query(q: &Query) -> Result<(), IntegError> {
    if !q.context.names_distinct() {
        return Err(IntegError::BadQuery("context binds a variable twice".to_string()));
    }
    if q.formula.contains_hid() || q.context.0.iter().any(|d| d.ty.as_ref().is_some_and(Object::contains_hid)) {
        return Err(IntegError::BadQuery("query contains hid".to_string()));
    }
    let bound: BTreeSet<&str> = q.context.0.iter().map(|d| d.name.as_str()).collect();
    for v in q.formula.free_vars() {
        if !bound.contains(v.as_str()) {
            return Err(IntegError::BadQuery(format!(
                "formula has free variable ${v} not bound by the context"
            )));
        }
    }
    Ok(())
}

/// Translates a query into sys1. Bidirectionally this is (I(C), I(F)) and
/// fails with the offending symbols if i filters any of them. In directed
/// mode (no i) the query must be written over the specification and mu1
/// plays the role of i.
pub fn translate_query(
    graph: &TheoryGraph,
    b: &IntegrationBundle,
    q: &Query,
) -> Result<(Context, Object), IntegError> {
    validate_query(q)?;
    match &b.i {
        Some(i) => {
            let mut offenders = Vec::new();
            for (t, c) in query_symbols(q) {
                if filters(graph, i, &Object::sym(t.clone(), c.clone()))? {
                    offenders.push((t, c));
                }
            }
            if !offenders.is_empty() {
                return Err(IntegError::FilteredQuery { offenders });
            }
            Ok((apply_morphism_context(graph, i, &q.context)?, apply_morphism(graph, i, &q.formula)?))
        }
        None => {
            let mut offenders = Vec::new();
            for (t, c) in query_symbols(q) {
                if !graph.is_accessible(&b.spec, &t, &c)? {
                    offenders.push((t, c));
                }
            }
            if !offenders.is_empty() {
                return Err(IntegError::FilteredQuery { offenders });
            }
            let mu1 = &b.s1.mu;
            Ok((
                apply_morphism_context(graph, mu1, &q.context)?,
                apply_morphism(graph, mu1, &q.formula)?,
            ))
        }
    }
}

/// Checks a sys1 answer (s, p) against the translated query, transports it
/// through o, and re-checks the transported proof over sys2 when it survives
/// filtering; a filtered transported proof yields a sketch-only solution.
pub fn verify_solution(
    graph: &TheoryGraph,
    b: &IntegrationBundle,
    q: &Query,
    s: &Substitution,
    p: &Object,
    fuel: u64,
) -> Result<Solution, IntegError> {
    let (ic, iff) = translate_query(graph, b, q)?;
    let sys1 = &b.s1.sys;
    let sys2 = &b.s2.sys;

    let sub_check = foundation::check_subst(graph, sys1, s, &ic, fuel)?;
    if sub_check.fuel_exhausted {
        return Err(IntegError::FuelExhausted("checking the substitution".to_string()));
    }
    if !sub_check.holds {
        return Err(IntegError::BadSubstitution(sub_check.reason.unwrap_or_default()));
    }

    let goal1 = subst_apply(&iff, s);
    let proof_check = foundation::check_type(graph, sys1, &Context::default(), p, &goal1, fuel)?;
    if proof_check.fuel_exhausted {
        return Err(IntegError::FuelExhausted("checking the proof".to_string()));
    }
    if !proof_check.holds {
        return Err(IntegError::BadProof(proof_check.reason.unwrap_or_default()));
    }

    let os = apply_morphism_subst(graph, &b.o, s)?;
    let op = apply_morphism(graph, &b.o, p)?;

    if op.contains_hid() {
        return Ok(Solution {
            theory: sys2.clone(),
            subst: os,
            proof: op.clone(),
            verified: false,
            sketch: Some(extract_sketch(&op)),
            note: None,
        });
    }

    // The formula over sys2: given directly in bidirectional mode, through
    // mu2 when the query was stated over the specification.
    let f2 = match &b.i {
        Some(_) => q.formula.clone(),
        None => apply_morphism(graph, &b.s2.mu, &q.formula)?,
    };
    let os_filtered = os.0.iter().any(|pair| pair.value.contains_hid());
    if os_filtered {
        return Ok(Solution {
            theory: sys2.clone(),
            subst: os,
            proof: op.clone(),
            verified: false,
            sketch: Some(extract_sketch(&op)),
            note: Some("the transported substitution is filtered".to_string()),
        });
    }
    let goal2 = subst_apply(&f2, &os);
    let recheck = foundation::check_type(graph, sys2, &Context::default(), &op, &goal2, fuel)?;
    if recheck.fuel_exhausted {
        return Err(IntegError::FuelExhausted("re-checking the transported proof".to_string()));
    }
    Ok(Solution {
        theory: sys2.clone(),
        subst: os,
        proof: op,
        verified: recheck.holds,
        sketch: None,
        note: if recheck.holds {
            None
        } else {
            Some(format!(
                "transported proof failed to re-check: {}",
                recheck.reason.unwrap_or_default()
            ))
        },
    })
}

/// The maximal hid-free subobjects of `o` in left-to-right order, plus the
/// number of hid leaves elided.
pub fn extract_sketch(o: &Object) -> ProofSketch {
    fn go(o: &Object, steps: &mut Vec<Object>, gaps: &mut usize) {
        if !o.contains_hid() {
            steps.push(o.clone());
            return;
        }
        match o {
            Object::Hid => *gaps += 1,
            Object::App { head, args } => {
                go(head, steps, gaps);
                for a in args {
                    go(a, steps, gaps);
                }
            }
            Object::Bind { binder, bound, body } => {
                go(binder, steps, gaps);
                for d in &bound.0 {
                    if let Some(ty) = &d.ty {
                        go(ty, steps, gaps);
                    }
                }
                go(body, steps, gaps);
            }
            Object::Sym { .. } | Object::Var { .. } => unreachable!("hid-free handled above"),
        }
    }
    let mut steps = Vec::new();
    let mut gaps = 0;
    go(o, &mut steps, &mut gaps);
    ProofSketch { steps, gaps }
}

/// Lookup-only obligation discharge: a step holds if it is the declared type
/// of an accessible constant (up to check_eq) or repeats an earlier step (up
/// to alpha). Indices are 0-based.
pub fn check_sketch_obligations(
    graph: &TheoryGraph,
    t: &str,
    sk: &ProofSketch,
    fuel: u64,
) -> Result<Vec<(usize, bool)>, IntegError> {
    let decls = graph.accessible_decls(t)?;
    let mut out = Vec::with_capacity(sk.steps.len());
    for (i, step) in sk.steps.iter().enumerate() {
        let mut ok = sk.steps[..i].iter().any(|earlier| alpha_eq(earlier, step));
        if !ok {
            for (_, d) in &decls {
                let Some(ty) = &d.ty else { continue };
                match foundation::check_eq(graph, t, &Context::default(), step, ty, fuel) {
                    Ok(r) if r.holds => {
                        ok = true;
                        break;
                    }
                    _ => {}
                }
            }
        }
        out.push((i, ok));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidenedNames {
    pub mu1: Name,
    pub mu2: Name,
    pub eta1: Name,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta2: Option<Name>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidenOutcome {
    pub graph: TheoryGraph,
    pub report: CheckReport,
    /// Present when the widened graph is well-formed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle: Option<IntegrationBundle>,
    pub new_spec: Name,
    pub names: WidenedNames,
    pub eta1_filtered_before: Vec<QName>,
    pub eta1_filtered_after: Vec<QName>,
}

fn named_view<'g>(graph: &'g TheoryGraph, m: &MorphismExpr, role: &str) -> Result<&'g View, IntegError> {
    match m {
        MorphismExpr::Named { view } => graph
            .view(view)
            .ok_or_else(|| MorphError::UnknownView(view.clone()).into()),
        _ => Err(IntegError::Unsupported(format!(
            "{role} must be a named view to be widened"
        ))),
    }
}

fn suffixed(graph: &TheoryGraph, base: &str) -> Result<Name, IntegError> {
    let name = format!("{base}_w");
    if graph.view(&name).is_some() || graph.theory(&name).is_some() {
        return Err(IntegError::BadExtension(format!("the name {name} is already taken")));
    }
    Ok(name)
}

/// Copies a view that maps back into the specification so it lands in the
/// widened specification instead: images are requalified, and qualified
/// extension assignments override images of the copy's domain symbols.
fn widen_eta(
    graph: &TheoryGraph,
    old: &View,
    exts: &[ExtAssign],
    spec: &str,
    new_spec: &str,
) -> Result<(View, Option<View>), IntegError> {
    let mut body: Vec<Assignment> = old
        .body
        .iter()
        .map(|a| Assignment { symbol: a.symbol.clone(), image: a.image.rename_theory(spec, new_spec) })
        .collect();
    let dom = graph.theory(&old.from).expect("checked by caller");
    for e in exts.iter().filter(|e| e.theory.is_none()) {
        if dom.decl(&e.symbol).is_none() {
            return Err(IntegError::BadExtension(format!(
                "{} does not declare {}, so {} cannot re-route it",
                old.from, e.symbol, old.name
            )));
        }
        match body.iter_mut().find(|a| a.symbol == e.symbol) {
            Some(a) => a.image = e.image.clone(),
            None => body.push(Assignment { symbol: e.symbol.clone(), image: e.image.clone() }),
        }
    }

    let qualified: Vec<&ExtAssign> = exts.iter().filter(|e| e.theory.is_some()).collect();
    let (meta_morph, meta_copy) = match &old.meta_morph {
        None => {
            if let Some(e) = qualified.first() {
                return Err(IntegError::BadExtension(format!(
                    "{} has no meta-morphism to carry the assignment for {}/{}",
                    old.name,
                    e.theory.clone().unwrap_or_default(),
                    e.symbol
                )));
            }
            (None, None)
        }
        Some(MorphismExpr::Ident { theory }) => {
            if let Some(e) = qualified.first() {
                return Err(IntegError::BadExtension(format!(
                    "meta-morphism of {} is the identity on {theory}; {}/{} cannot be re-routed",
                    old.name,
                    e.theory.clone().unwrap_or_default(),
                    e.symbol
                )));
            }
            (Some(MorphismExpr::ident(theory.clone())), None)
        }
        Some(MorphismExpr::Named { view }) => {
            let mv = graph
                .view(view)
                .ok_or_else(|| IntegError::Morph(MorphError::UnknownView(view.clone())))?;
            if mv.to != spec {
                if let Some(e) = qualified.first() {
                    return Err(IntegError::BadExtension(format!(
                        "meta-morphism of {} lands in {}, not the specification; {}/{} cannot be re-routed",
                        old.name,
                        mv.to,
                        e.theory.clone().unwrap_or_default(),
                        e.symbol
                    )));
                }
                (Some(MorphismExpr::named(view.clone())), None)
            } else {
                match &mv.meta_morph {
                    None | Some(MorphismExpr::Ident { .. }) => {}
                    Some(MorphismExpr::Named { view: inner }) => {
                        let iv = graph
                            .view(inner)
                            .ok_or_else(|| IntegError::Morph(MorphError::UnknownView(inner.clone())))?;
                        if iv.to == spec {
                            return Err(IntegError::Unsupported(
                                "nested meta-morphisms into the specification".to_string(),
                            ));
                        }
                    }
                    Some(MorphismExpr::Comp { .. }) => {
                        return Err(IntegError::Unsupported(
                            "composite meta-morphisms".to_string(),
                        ))
                    }
                }
                let mut mbody: Vec<Assignment> = mv
                    .body
                    .iter()
                    .map(|a| Assignment {
                        symbol: a.symbol.clone(),
                        image: a.image.rename_theory(spec, new_spec),
                    })
                    .collect();
                for e in &qualified {
                    let qt = e.theory.as_deref().unwrap();
                    if qt != mv.from {
                        return Err(IntegError::BadExtension(format!(
                            "{qt}/{} is not a domain symbol of the meta-morphism {} of {}",
                            e.symbol, mv.name, old.name
                        )));
                    }
                    if graph.symbol(qt, &e.symbol).is_none() {
                        return Err(IntegError::BadExtension(format!(
                            "{qt} does not declare {}",
                            e.symbol
                        )));
                    }
                    match mbody.iter_mut().find(|a| a.symbol == e.symbol) {
                        Some(a) => a.image = e.image.clone(),
                        None => {
                            mbody.push(Assignment { symbol: e.symbol.clone(), image: e.image.clone() })
                        }
                    }
                }
                let copy_name = suffixed(graph, &mv.name)?;
                let copy = View {
                    name: copy_name.clone(),
                    from: mv.from.clone(),
                    to: new_spec.to_string(),
                    meta_morph: mv.meta_morph.clone(),
                    body: mbody,
                };
                (Some(MorphismExpr::named(copy_name)), Some(copy))
            }
        }
        Some(MorphismExpr::Comp { .. }) => {
            return Err(IntegError::Unsupported("composite meta-morphisms".to_string()))
        }
    };

    let new_name = suffixed(graph, &old.name)?;
    Ok((
        View {
            name: new_name,
            from: old.from.clone(),
            to: new_spec.to_string(),
            meta_morph,
            body,
        },
        meta_copy,
    ))
}

/// Extends a mu view to the widened specification: same images for the old
/// symbols, extension assignments for the new ones (which must be covered
/// exactly).
fn widen_mu(
    graph: &TheoryGraph,
    old: &View,
    exts: &[Assignment],
    new_decls: &[SymbolDecl],
    new_spec: &str,
) -> Result<View, IntegError> {
    let new_names: BTreeSet<&str> = new_decls.iter().map(|d| d.name.as_str()).collect();
    for e in exts {
        if !new_names.contains(e.symbol.as_str()) {
            return Err(IntegError::BadExtension(format!(
                "{} extension assigns {}, which is not a new specification symbol",
                old.name, e.symbol
            )));
        }
    }
    let mut body = old.body.clone();
    for d in new_decls {
        let img = exts.iter().find(|e| e.symbol == d.name).ok_or_else(|| {
            IntegError::BadExtension(format!("no {} extension image for {}", old.name, d.name))
        })?;
        body.push(img.clone());
    }
    Ok(View {
        name: suffixed(graph, &old.name)?,
        from: new_spec.to_string(),
        to: old.to.clone(),
        meta_morph: old.meta_morph.clone(),
        body,
    })
}

/// Builds the widened graph and bundle: Spec' = requalified Spec body ++
/// extension declarations; each bundle view gets a suffixed copy adjusted to
/// Spec'; the whole graph is re-checked and the laws re-evaluated.
pub fn widen(
    graph: &TheoryGraph,
    b: &IntegrationBundle,
    input: &WideningInput,
    opts: &CheckOpts,
) -> Result<WidenOutcome, IntegError> {
    let spec = &b.spec;
    let new_spec = &input.new_spec;
    if graph.theory(new_spec).is_some() {
        return Err(IntegError::BadExtension(format!("theory {new_spec} already exists")));
    }
    let spec_theory = graph
        .theory(spec)
        .ok_or_else(|| KernelError::UnknownTheory(spec.clone()))?;
    for d in &input.ext {
        if spec_theory.decl(&d.name).is_some() {
            return Err(IntegError::BadExtension(format!(
                "{} already declares {}",
                spec, d.name
            )));
        }
    }

    let mu1 = named_view(graph, &b.s1.mu, "mu1")?;
    let mu2 = named_view(graph, &b.s2.mu, "mu2")?;
    let eta1_m = b.s1.eta.clone().ok_or_else(|| IntegError::MissingEta(b.s1.sys.clone()))?;
    let eta1 = named_view(graph, &eta1_m, "eta1")?;
    let eta2 = match &b.s2.eta {
        Some(m) => Some(named_view(graph, m, "eta2")?),
        None => {
            if !input.eta2.is_empty() {
                return Err(IntegError::BadExtension(
                    "eta2 extensions given, but the bundle is directed".to_string(),
                ));
            }
            None
        }
    };

    let mut new_theory = spec_theory.requalified(new_spec);
    new_theory.body.extend(input.ext.iter().cloned());

    let mu1_w = widen_mu(graph, mu1, &input.mu1, &input.ext, new_spec)?;
    let mu2_w = widen_mu(graph, mu2, &input.mu2, &input.ext, new_spec)?;
    let (eta1_w, eta1_meta_copy) = widen_eta(graph, eta1, &input.eta1, spec, new_spec)?;
    let eta2_w = match eta2 {
        Some(v) => Some(widen_eta(graph, v, &input.eta2, spec, new_spec)?),
        None => None,
    };

    let eta1_filtered_before = morphisms::filtered_symbols(graph, &eta1_m)?;

    let mut out = graph.clone();
    out.decls.push(GraphDecl::Theory(new_theory));
    if let Some(c) = eta1_meta_copy {
        out.decls.push(GraphDecl::View(c));
    }
    if let Some((_, Some(c))) = &eta2_w {
        out.decls.push(GraphDecl::View(c.clone()));
    }
    let eta1_w_name = eta1_w.name.clone();
    let mu1_w_name = mu1_w.name.clone();
    let mu2_w_name = mu2_w.name.clone();
    let eta2_w_name = eta2_w.as_ref().map(|(v, _)| v.name.clone());
    out.decls.push(GraphDecl::View(mu1_w));
    out.decls.push(GraphDecl::View(mu2_w));
    out.decls.push(GraphDecl::View(eta1_w));
    if let Some((v, _)) = eta2_w {
        out.decls.push(GraphDecl::View(v));
    }

    let report = crate::kernel::well_formed_graph(&out, opts, &Default::default());

    let eta1_filtered_after =
        morphisms::filtered_symbols(&out, &MorphismExpr::named(eta1_w_name.clone()))?;

    let names = WidenedNames {
        mu1: mu1_w_name,
        mu2: mu2_w_name,
        eta1: eta1_w_name,
        eta2: eta2_w_name,
    };
    let bundle = if report.ok() {
        Some(build_bundle(
            &out,
            new_spec,
            SystemImpl {
                spec: new_spec.clone(),
                sys: b.s1.sys.clone(),
                mu: MorphismExpr::named(names.mu1.clone()),
                eta: Some(MorphismExpr::named(names.eta1.clone())),
            },
            SystemImpl {
                spec: new_spec.clone(),
                sys: b.s2.sys.clone(),
                mu: MorphismExpr::named(names.mu2.clone()),
                eta: names.eta2.clone().map(MorphismExpr::named),
            },
            opts.fuel,
        )?)
    } else {
        None
    };

    Ok(WidenOutcome {
        graph: out,
        report,
        bundle,
        new_spec: new_spec.clone(),
        names,
        eta1_filtered_before,
        eta1_filtered_after,
    })
}
