use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{
    alpha_eq, subst_apply, Context, KernelError, Name, Object, OverOffender, QName, SubstPair,
    Substitution, SymbolDecl, TheoryGraph, VarDecl,
};

pub const DEFAULT_FUEL: u64 = 100_000;

/// Name of the distinguished framework theory. A theory whose meta-chain
/// root carries this name is governed by LF_LITE; everything else falls back
/// to STRUCTURAL.
pub const LF_THEORY: &str = "LF";

const SORT_TYPE: &str = "type";
const SORT_KIND: &str = "kind";
const BINDER_PI: &str = "Pi";
const BINDER_LAMBDA: &str = "lambda";

const TRACE_CAP: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Foundation {
    LfLite,
    Structural,
}

pub fn foundation_for(graph: &TheoryGraph, t: &str) -> Result<Foundation, KernelError> {
    let chain = graph.meta_chain(t)?;
    Ok(if chain.first().is_some_and(|r| r.name == LF_THEORY) {
        Foundation::LfLite
    } else {
        Foundation::Structural
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyCut {
    #[serde(default)]
    pub d_type: BTreeSet<QName>,
    #[serde(default)]
    pub d_def: BTreeSet<QName>,
}

impl DependencyCut {
    pub fn is_subset(&self, other: &DependencyCut) -> bool {
        self.d_type.is_subset(&other.d_type) && self.d_def.is_subset(&other.d_def)
    }

    pub fn union(&self, other: &DependencyCut) -> DependencyCut {
        DependencyCut {
            d_type: self.d_type.union(&other.d_type).cloned().collect(),
            d_def: self.d_def.union(&other.d_def).cloned().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JudgmentResult {
    pub holds: bool,
    /// Meaningful when holds: the dependencies of the derivation that was
    /// found (not necessarily minimal).
    pub cut: DependencyCut,
    pub fuel_exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Judgment {
    Type { ctx: Context, obj: Object, ty: Object },
    Eq { ctx: Context, lhs: Object, rhs: Object },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JudgeError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("judgment inputs must not contain hid")]
    FilteredObject,
    #[error("symbol {0}/{1} is not accessible to {2}")]
    NotAccessible(Name, Name, Name),
    #[error("unbound variable ${0}")]
    UnboundVar(Name),
    #[error("duplicate variable ${0}")]
    DuplicateVar(Name),
}

pub fn check_type(
    graph: &TheoryGraph,
    t: &str,
    ctx: &Context,
    o: &Object,
    ty: &Object,
    fuel: u64,
) -> Result<JudgmentResult, JudgeError> {
    validate_inputs(graph, t, ctx, &[o, ty])?;
    Ok(run(graph, t, None, fuel, |ck| {
        let mut env = ctx.0.clone();
        ck.check_type(&mut env, o, ty)
    }))
}

pub fn check_eq(
    graph: &TheoryGraph,
    t: &str,
    ctx: &Context,
    lhs: &Object,
    rhs: &Object,
    fuel: u64,
) -> Result<JudgmentResult, JudgeError> {
    validate_inputs(graph, t, ctx, &[lhs, rhs])?;
    Ok(run(graph, t, None, fuel, |ck| ck.check_eq(lhs, rhs)))
}

/// Re-runs a judgment with TOtype restricted to `cut.d_type` and definiens
/// expansion restricted to `cut.d_def`.
pub fn check_with_cut(
    graph: &TheoryGraph,
    t: &str,
    judgment: &Judgment,
    cut: &DependencyCut,
    fuel: u64,
) -> Result<bool, JudgeError> {
    Ok(check_with_cut_result(graph, t, judgment, cut, fuel)?.holds)
}

pub fn check_with_cut_result(
    graph: &TheoryGraph,
    t: &str,
    judgment: &Judgment,
    cut: &DependencyCut,
    fuel: u64,
) -> Result<JudgmentResult, JudgeError> {
    for q in cut.d_type.iter().chain(cut.d_def.iter()) {
        if !graph.is_accessible(t, &q.0, &q.1)? {
            return Err(JudgeError::NotAccessible(q.0.clone(), q.1.clone(), t.to_string()));
        }
    }
    let (ctx, objs): (&Context, Vec<&Object>) = match judgment {
        Judgment::Type { ctx, obj, ty } => (ctx, vec![obj, ty]),
        Judgment::Eq { ctx, lhs, rhs } => (ctx, vec![lhs, rhs]),
    };
    validate_inputs(graph, t, ctx, &objs)?;
    Ok(run(graph, t, Some(cut), fuel, |ck| {
        let mut env = ctx.0.clone();
        match judgment {
            Judgment::Type { obj, ty, .. } => ck.check_type(&mut env, obj, ty),
            Judgment::Eq { lhs, rhs, .. } => ck.check_eq(lhs, rhs),
        }
    }))
}

/// Declaration-level well-typedness under the governing foundation.
/// LF_LITE: a declared type must classify (it is `kind`, or its type is a
/// sort) and a definiens must inhabit the declared type (or be inferable
/// when no type is declared). STRUCTURAL: vacuous — object-over-theory
/// checks happen at graph level.
pub fn check_decl(
    graph: &TheoryGraph,
    t: &str,
    decl: &SymbolDecl,
    fuel: u64,
) -> Result<JudgmentResult, JudgeError> {
    let objs: Vec<&Object> = decl.ty.iter().chain(decl.def.iter()).collect();
    validate_inputs(graph, t, &Context::default(), &objs)?;
    if foundation_for(graph, t)? == Foundation::Structural {
        return Ok(run(graph, t, None, fuel, |_| Ok(())));
    }
    Ok(run(graph, t, None, fuel, |ck| {
        let mut env = Vec::new();
        if let Some(ty) = &decl.ty {
            ck.classify(&mut env, ty)?;
        }
        match (&decl.ty, &decl.def) {
            (Some(ty), Some(def)) => ck.check_type(&mut env, def, ty),
            (None, Some(def)) => ck.infer(&mut env, def).map(|_| ()),
            _ => Ok(()),
        }
    }))
}

/// Checks `s` against a target context over `t`: every entry of `target`
/// must be assigned exactly once, in-order, and typed entries must receive
/// images of the instantiated entry type.
pub fn check_subst(
    graph: &TheoryGraph,
    t: &str,
    s: &Substitution,
    target: &Context,
    fuel: u64,
) -> Result<JudgmentResult, JudgeError> {
    if !s.names_distinct() {
        let mut seen = BTreeSet::new();
        for p in &s.0 {
            if !seen.insert(&p.name) {
                return Err(JudgeError::DuplicateVar(p.name.clone()));
            }
        }
    }
    let values: Vec<&Object> = s.0.iter().map(|p| &p.value).collect();
    validate_inputs(graph, t, &Context::default(), &values)?;
    validate_inputs(graph, t, target, &[])?;
    Ok(run(graph, t, None, fuel, |ck| {
        for p in &s.0 {
            if target.lookup(&p.name).is_none() {
                return Err(Stop::Fail(format!(
                    "substitution assigns ${} which is not in the target context",
                    p.name
                )));
            }
        }
        let mut done: Vec<SubstPair> = Vec::new();
        for d in &target.0 {
            let image = match s.lookup(&d.name) {
                Some(o) => o.clone(),
                None => {
                    return Err(Stop::Fail(format!("no image for context variable ${}", d.name)))
                }
            };
            if let Some(ty) = &d.ty {
                let want = subst_apply(ty, &Substitution(done.clone()));
                let mut env = Vec::new();
                ck.check_type(&mut env, &image, &want)?;
            }
            done.push(SubstPair { name: d.name.clone(), value: image });
        }
        Ok(())
    }))
}

/// Strongly-connected components of the "definiens mentions a defined
/// symbol" relation with size > 1, plus self-loops. A nonempty result means
/// delta-normalization may diverge.
pub fn detect_def_cycles(graph: &TheoryGraph) -> Vec<Vec<QName>> {
    let nodes: Vec<QName> = graph
        .theories()
        .flat_map(|t| {
            t.body
                .iter()
                .filter(|d| d.def.is_some())
                .map(|d| (t.name.clone(), d.name.clone()))
        })
        .collect();
    let index_of = |q: &QName| nodes.iter().position(|n| n == q);
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, q) in nodes.iter().enumerate() {
        let def = graph.symbol(&q.0, &q.1).and_then(|d| d.def.as_ref()).unwrap();
        for mention in def.symbols() {
            if let Some(j) = index_of(&mention) {
                edges[i].push(j);
            }
        }
    }

    // Tarjan.
    struct St {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        sccs: Vec<Vec<usize>>,
    }
    fn strong(v: usize, edges: &[Vec<usize>], st: &mut St) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in &edges[v] {
            if st.index[w].is_none() {
                strong(w, edges, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.index[w].unwrap());
            }
        }
        if st.low[v] == st.index[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().unwrap();
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.sccs.push(comp);
        }
    }
    let n = nodes.len();
    let mut st = St {
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        sccs: Vec::new(),
    };
    for v in 0..n {
        if st.index[v].is_none() {
            strong(v, &edges, &mut st);
        }
    }
    let mut out = Vec::new();
    for mut comp in st.sccs {
        comp.sort_unstable();
        let cyclic = comp.len() > 1 || edges[comp[0]].contains(&comp[0]);
        if cyclic {
            out.push(comp.into_iter().map(|i| nodes[i].clone()).collect::<Vec<_>>());
        }
    }
    out.sort();
    out
}

fn validate_inputs(
    graph: &TheoryGraph,
    t: &str,
    ctx: &Context,
    objs: &[&Object],
) -> Result<(), JudgeError> {
    if graph.theory(t).is_none() {
        return Err(KernelError::UnknownTheory(t.to_string()).into());
    }
    if !ctx.names_distinct() {
        let mut seen = BTreeSet::new();
        for d in &ctx.0 {
            if !seen.insert(&d.name) {
                return Err(JudgeError::DuplicateVar(d.name.clone()));
            }
        }
    }
    let mut prefix = Context::default();
    for d in &ctx.0 {
        if let Some(ty) = &d.ty {
            if ty.contains_hid() {
                return Err(JudgeError::FilteredObject);
            }
            check_over(graph, t, ty, &prefix)?;
        }
        prefix.0.push(d.clone());
    }
    for o in objs {
        if o.contains_hid() {
            return Err(JudgeError::FilteredObject);
        }
        check_over(graph, t, o, ctx)?;
    }
    Ok(())
}

fn check_over(graph: &TheoryGraph, t: &str, o: &Object, ctx: &Context) -> Result<(), JudgeError> {
    match graph.over_theory_offender(t, o, ctx)? {
        None => Ok(()),
        Some(OverOffender::Symbol(th, c)) => Err(JudgeError::NotAccessible(th, c, t.to_string())),
        Some(OverOffender::FreeVar(v)) => Err(JudgeError::UnboundVar(v)),
    }
}

fn run(
    graph: &TheoryGraph,
    t: &str,
    restrict: Option<&DependencyCut>,
    fuel: u64,
    body: impl FnOnce(&mut Ck) -> Result<(), Stop>,
) -> JudgmentResult {
    let lf = matches!(foundation_for(graph, t), Ok(Foundation::LfLite));
    let mut ck = Ck {
        g: graph,
        lf,
        fuel,
        steps: 0,
        d_type: BTreeSet::new(),
        d_def: BTreeSet::new(),
        restrict,
        trace: Vec::new(),
    };
    let outcome = body(&mut ck);
    let cut = DependencyCut { d_type: ck.d_type, d_def: ck.d_def };
    let trace = if ck.trace.is_empty() { None } else { Some(ck.trace) };
    match outcome {
        Ok(()) => JudgmentResult { holds: true, cut, fuel_exhausted: false, reason: None, trace },
        Err(Stop::Fail(reason)) => JudgmentResult {
            holds: false,
            cut,
            fuel_exhausted: false,
            reason: Some(reason),
            trace,
        },
        Err(Stop::Fuel) => JudgmentResult {
            holds: false,
            cut,
            fuel_exhausted: true,
            reason: Some(format!("fuel exhausted after {} steps", fuel)),
            trace,
        },
    }
}

enum Stop {
    Fail(String),
    Fuel,
}

type R<T> = Result<T, Stop>;

struct Ck<'a> {
    g: &'a TheoryGraph,
    lf: bool,
    fuel: u64,
    steps: u64,
    d_type: BTreeSet<QName>,
    d_def: BTreeSet<QName>,
    restrict: Option<&'a DependencyCut>,
    trace: Vec<String>,
}

fn is_lf_sym(o: &Object, name: &str) -> bool {
    o.is_sym(LF_THEORY, name)
}

fn describe(o: &Object) -> String {
    match o {
        Object::Sym { theory, name } => format!("{theory}/{name}"),
        Object::Var { name } => format!("${name}"),
        Object::App { head, .. } => format!("application of {}", describe(head)),
        Object::Bind { binder, .. } => format!("binding with {}", describe(binder)),
        Object::Hid => "hid".to_string(),
    }
}

impl<'a> Ck<'a> {
    fn spend(&mut self) -> R<()> {
        if self.steps >= self.fuel {
            return Err(Stop::Fuel);
        }
        self.steps += 1;
        Ok(())
    }

    fn note(&mut self, line: impl FnOnce() -> String) {
        if self.trace.len() < TRACE_CAP {
            self.trace.push(line());
        } else if self.trace.len() == TRACE_CAP {
            self.trace.push("...".to_string());
        }
    }

    fn is_sort(&self, o: &Object) -> bool {
        self.lf && (is_lf_sym(o, SORT_TYPE) || is_lf_sym(o, SORT_KIND))
    }

    /// Definiens lookup for delta. None means opaque: no definiens, or the
    /// symbol is outside the restricting cut (which silently blocks the
    /// unfold rather than erroring — a blocked delta can only make equality
    /// smaller, never unsound).
    fn delta(&mut self, theory: &str, name: &str) -> R<Option<Object>> {
        let Some(decl) = self.g.symbol(theory, name) else { return Ok(None) };
        let Some(def) = &decl.def else { return Ok(None) };
        let q = (theory.to_string(), name.to_string());
        if let Some(cut) = self.restrict {
            if !cut.d_def.contains(&q) {
                return Ok(None);
            }
        }
        self.spend()?;
        let def = def.clone();
        self.d_def.insert(q);
        self.note(|| format!("delta {theory}/{name}"));
        Ok(Some(def))
    }

    /// Declared-type lookup (TOtype). Unlike delta, a blocked lookup is a
    /// hard failure: there is no way to type the symbol without it.
    fn totype(&mut self, theory: &str, name: &str) -> R<Object> {
        let q = (theory.to_string(), name.to_string());
        if let Some(cut) = self.restrict {
            if !cut.d_type.contains(&q) {
                return Err(Stop::Fail(format!(
                    "type lookup of {theory}/{name} is outside the dependency cut"
                )));
            }
        }
        let decl = self
            .g
            .symbol(theory, name)
            .ok_or_else(|| Stop::Fail(format!("unknown symbol {theory}/{name}")))?;
        let ty = decl
            .ty
            .clone()
            .ok_or_else(|| Stop::Fail(format!("{theory}/{name} has no declared type")))?;
        self.d_type.insert(q);
        self.note(|| format!("type-of {theory}/{name}"));
        Ok(ty)
    }

    /// Weak head normal form. Delta on head symbols in both foundations;
    /// beta only under LF_LITE. Each delta/beta step costs one fuel unit.
    fn whnf(&mut self, o: Object) -> R<Object> {
        let mut cur = o;
        loop {
            match cur {
                Object::Sym { ref theory, ref name } => {
                    let (t, n) = (theory.clone(), name.clone());
                    match self.delta(&t, &n)? {
                        Some(def) => cur = def,
                        None => return Ok(cur),
                    }
                }
                Object::App { head, mut args } => {
                    let h = self.whnf(*head)?;
                    match h {
                        Object::Bind { binder, bound, body }
                            if self.lf && is_lf_sym(&binder, BINDER_LAMBDA) =>
                        {
                            self.spend()?;
                            self.note(|| "beta".to_string());
                            let mut decls = bound.0;
                            let first = decls.remove(0);
                            let arg = args.remove(0);
                            let inner = if decls.is_empty() {
                                *body
                            } else {
                                Object::Bind { binder, bound: Context(decls), body }
                            };
                            let reduced =
                                subst_apply(&inner, &Substitution::single(first.name, arg));
                            cur = Object::app(reduced, args);
                        }
                        h => return Ok(Object::app(h, args)),
                    }
                }
                other => return Ok(other),
            }
        }
    }

    /// Full normal form: whnf, then normalize subterms.
    fn nf(&mut self, o: Object) -> R<Object> {
        match self.whnf(o)? {
            Object::App { head, args } => {
                let h = self.nf(*head)?;
                let args = args.into_iter().map(|a| self.nf(a)).collect::<R<Vec<_>>>()?;
                Ok(Object::app(h, args))
            }
            Object::Bind { binder, bound, body } => {
                let binder = self.nf(*binder)?;
                let mut decls = Vec::with_capacity(bound.len());
                for d in bound.0 {
                    decls.push(VarDecl { name: d.name, ty: d.ty.map(|t| self.nf(t)).transpose()? });
                }
                let body = self.nf(*body)?;
                Ok(Object::Bind { binder: Box::new(binder), bound: Context(decls), body: Box::new(body) })
            }
            other => Ok(other),
        }
    }

    fn conv(&mut self, a: &Object, b: &Object) -> R<bool> {
        if alpha_eq(a, b) {
            return Ok(true);
        }
        let na = self.nf(a.clone())?;
        let nb = self.nf(b.clone())?;
        Ok(alpha_eq(&na, &nb))
    }

    fn check_eq(&mut self, lhs: &Object, rhs: &Object) -> R<()> {
        if self.conv(lhs, rhs)? {
            Ok(())
        } else {
            Err(Stop::Fail(format!(
                "{} and {} have distinct normal forms",
                describe(lhs),
                describe(rhs)
            )))
        }
    }

    fn check_type(&mut self, env: &mut Vec<VarDecl>, o: &Object, ty: &Object) -> R<()> {
        let inferred = self.infer(env, o)?;
        if self.conv(&inferred, ty)? {
            Ok(())
        } else {
            Err(Stop::Fail(format!(
                "{} has type {} which does not convert to the expected type",
                describe(o),
                describe(&inferred)
            )))
        }
    }

    fn infer(&mut self, env: &mut Vec<VarDecl>, o: &Object) -> R<Object> {
        match o {
            Object::Hid => Err(Stop::Fail("cannot type a filtered object".to_string())),
            Object::Var { name } => {
                let d = env
                    .iter()
                    .rev()
                    .find(|d| d.name == *name)
                    .ok_or_else(|| Stop::Fail(format!("unbound variable ${name}")))?;
                d.ty.clone()
                    .ok_or_else(|| Stop::Fail(format!("variable ${name} has no declared type")))
            }
            Object::Sym { theory, name } => {
                if self.lf && theory == LF_THEORY && name == SORT_TYPE {
                    return Ok(Object::sym(LF_THEORY, SORT_KIND));
                }
                if self.lf && theory == LF_THEORY && name == SORT_KIND {
                    return Err(Stop::Fail("kind is the top sort and has no type".to_string()));
                }
                self.totype(theory, name)
            }
            Object::App { head, args } => {
                if !self.lf {
                    return Err(Stop::Fail(
                        "this foundation has no typing rule for applications".to_string(),
                    ));
                }
                let mut ty = self.infer(env, head)?;
                for arg in args {
                    let (dom, x, cod) = self.expect_pi(ty)?;
                    let ty_arg = self.infer(env, arg)?;
                    if !self.conv(&ty_arg, &dom)? {
                        return Err(Stop::Fail(format!(
                            "argument {} does not have the function's domain type",
                            describe(arg)
                        )));
                    }
                    ty = subst_apply(&cod, &Substitution::single(x, arg.clone()));
                }
                Ok(ty)
            }
            Object::Bind { binder, bound, body } => {
                if !self.lf {
                    return Err(Stop::Fail(
                        "this foundation has no typing rule for binders".to_string(),
                    ));
                }
                if is_lf_sym(binder, BINDER_PI) {
                    self.infer_pi(env, &bound.0, body)
                } else if is_lf_sym(binder, BINDER_LAMBDA) {
                    self.infer_lambda(env, &bound.0, body)
                } else {
                    Err(Stop::Fail(format!(
                        "no typing rule for binder {}",
                        describe(binder)
                    )))
                }
            }
        }
    }

    /// Sort of a Pi: every bound type must be sorted; the result is the sort
    /// of the body (all four formation rules of the calculus are allowed).
    fn infer_pi(&mut self, env: &mut Vec<VarDecl>, bound: &[VarDecl], body: &Object) -> R<Object> {
        let depth = env.len();
        let result = (|| {
            for d in bound {
                let ty = d.ty.as_ref().ok_or_else(|| {
                    Stop::Fail(format!("bound variable ${} needs a type annotation", d.name))
                })?;
                self.infer_sort(env, ty)?;
                env.push(d.clone());
            }
            let s = self.infer_sort(env, body)?;
            Ok(s)
        })();
        env.truncate(depth);
        result
    }

    fn infer_lambda(
        &mut self,
        env: &mut Vec<VarDecl>,
        bound: &[VarDecl],
        body: &Object,
    ) -> R<Object> {
        let depth = env.len();
        let result = (|| {
            for d in bound {
                let ty = d.ty.as_ref().ok_or_else(|| {
                    Stop::Fail(format!("bound variable ${} needs a type annotation", d.name))
                })?;
                self.infer_sort(env, ty)?;
                env.push(d.clone());
            }
            let ty_body = self.infer(env, body)?;
            // The Pi this lambda inhabits must itself be sorted.
            self.infer_sort(env, &ty_body)?;
            Ok(ty_body)
        })();
        env.truncate(depth);
        let ty_body = result?;
        Ok(Object::Bind {
            binder: Box::new(Object::sym(LF_THEORY, BINDER_PI)),
            bound: Context(bound.to_vec()),
            body: Box::new(ty_body),
        })
    }

    /// Infers `o`'s type and requires it to reduce to a sort; returns the sort.
    fn infer_sort(&mut self, env: &mut Vec<VarDecl>, o: &Object) -> R<Object> {
        let ty = self.infer(env, o)?;
        let ty = self.whnf(ty)?;
        if self.is_sort(&ty) {
            Ok(ty)
        } else {
            Err(Stop::Fail(format!("{} is not a type or kind", describe(o))))
        }
    }

    /// Splits off the first argument position of a function type.
    fn expect_pi(&mut self, ty: Object) -> R<(Object, Name, Object)> {
        match self.whnf(ty)? {
            Object::Bind { binder, bound, body } if is_lf_sym(&binder, BINDER_PI) => {
                let mut decls = bound.0;
                let first = decls.remove(0);
                let dom = first.ty.ok_or_else(|| {
                    Stop::Fail(format!("bound variable ${} needs a type annotation", first.name))
                })?;
                let cod = if decls.is_empty() {
                    *body
                } else {
                    Object::Bind { binder, bound: Context(decls), body }
                };
                Ok((dom, first.name, cod))
            }
            other => Err(Stop::Fail(format!(
                "expected a function type, found {}",
                describe(&other)
            ))),
        }
    }

    /// A declared type classifies iff it is the top sort itself or its type
    /// is a sort.
    fn classify(&mut self, env: &mut Vec<VarDecl>, ty: &Object) -> R<()> {
        let head = self.whnf(ty.clone())?;
        if is_lf_sym(&head, SORT_KIND) {
            return Ok(());
        }
        self.infer_sort(env, ty)?;
        Ok(())
    }
}
