use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub type Name = String;

/// Fully qualified symbol: (theory name, symbol name).
pub type QName = (Name, Name);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: Name,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none", default)]
    pub ty: Option<Object>,
}

impl VarDecl {
    pub fn untyped(name: impl Into<Name>) -> VarDecl {
        VarDecl { name: name.into(), ty: None }
    }

    pub fn typed(name: impl Into<Name>, ty: Object) -> VarDecl {
        VarDecl { name: name.into(), ty: Some(ty) }
    }
}

/// Ordered, possibly dependent variable context: the type of a later entry
/// may mention earlier entries' variables.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Context(pub Vec<VarDecl>);

impl Context {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn lookup(&self, x: &str) -> Option<&VarDecl> {
        self.0.iter().rev().find(|d| d.name == x)
    }

    pub fn names_distinct(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.0.iter().all(|d| seen.insert(&d.name))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstPair {
    pub name: Name,
    pub value: Object,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Substitution(pub Vec<SubstPair>);

impl Substitution {
    pub fn single(name: impl Into<Name>, value: Object) -> Substitution {
        Substitution(vec![SubstPair { name: name.into(), value }])
    }

    pub fn lookup(&self, x: &str) -> Option<&Object> {
        self.0.iter().find(|p| p.name == x).map(|p| &p.value)
    }

    pub fn names_distinct(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.0.iter().all(|p| seen.insert(&p.name))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Object {
    Sym { theory: Name, name: Name },
    Var { name: Name },
    App { head: Box<Object>, args: Vec<Object> },
    Bind { binder: Box<Object>, bound: Context, body: Box<Object> },
    Hid,
}

impl Object {
    pub fn sym(theory: impl Into<Name>, name: impl Into<Name>) -> Object {
        Object::Sym { theory: theory.into(), name: name.into() }
    }

    pub fn var(name: impl Into<Name>) -> Object {
        Object::Var { name: name.into() }
    }

    /// Spine-flattening application: an App head is never itself an App,
    /// and zero arguments collapse to the head.
    pub fn app(head: Object, args: Vec<Object>) -> Object {
        if args.is_empty() {
            return head;
        }
        match head {
            Object::App { head: h, args: mut a } => {
                a.extend(args);
                Object::App { head: h, args: a }
            }
            h => Object::App { head: Box::new(h), args },
        }
    }

    pub fn bind(binder: Object, bound: Context, body: Object) -> Object {
        assert!(!bound.is_empty(), "binder context must be nonempty");
        assert!(bound.names_distinct(), "binder context names must be distinct");
        Object::Bind { binder: Box::new(binder), bound, body: Box::new(body) }
    }

    pub fn is_sym(&self, theory: &str, name: &str) -> bool {
        matches!(self, Object::Sym { theory: t, name: n } if t == theory && n == name)
    }

    pub fn size(&self) -> usize {
        match self {
            Object::Sym { .. } | Object::Var { .. } | Object::Hid => 1,
            Object::App { head, args } => {
                1 + head.size() + args.iter().map(Object::size).sum::<usize>()
            }
            Object::Bind { binder, bound, body } => {
                1 + binder.size()
                    + bound.0.iter().map(|d| d.ty.as_ref().map_or(0, Object::size)).sum::<usize>()
                    + body.size()
            }
        }
    }

    pub fn contains_hid(&self) -> bool {
        match self {
            Object::Hid => true,
            Object::Sym { .. } | Object::Var { .. } => false,
            Object::App { head, args } => head.contains_hid() || args.iter().any(Object::contains_hid),
            Object::Bind { binder, bound, body } => {
                binder.contains_hid()
                    || bound.0.iter().any(|d| d.ty.as_ref().is_some_and(Object::contains_hid))
                    || body.contains_hid()
            }
        }
    }

    pub fn count_hid(&self) -> usize {
        match self {
            Object::Hid => 1,
            Object::Sym { .. } | Object::Var { .. } => 0,
            Object::App { head, args } => {
                head.count_hid() + args.iter().map(Object::count_hid).sum::<usize>()
            }
            Object::Bind { binder, bound, body } => {
                binder.count_hid()
                    + bound.0.iter().map(|d| d.ty.as_ref().map_or(0, Object::count_hid)).sum::<usize>()
                    + body.count_hid()
            }
        }
    }

    /// All qualified symbols mentioned anywhere in the object.
    pub fn symbols(&self) -> BTreeSet<QName> {
        let mut out = BTreeSet::new();
        self.symbols_into(&mut out);
        out
    }

    pub fn symbols_into(&self, out: &mut BTreeSet<QName>) {
        match self {
            Object::Sym { theory, name } => {
                out.insert((theory.clone(), name.clone()));
            }
            Object::Var { .. } | Object::Hid => {}
            Object::App { head, args } => {
                head.symbols_into(out);
                for a in args {
                    a.symbols_into(out);
                }
            }
            Object::Bind { binder, bound, body } => {
                binder.symbols_into(out);
                for d in &bound.0 {
                    if let Some(t) = &d.ty {
                        t.symbols_into(out);
                    }
                }
                body.symbols_into(out);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut bound = Vec::new();
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut bound, &mut out);
        out
    }

    fn free_vars_into(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Object::Var { name } => {
                if !bound.iter().any(|b| b == name) {
                    out.insert(name.clone());
                }
            }
            Object::Sym { .. } | Object::Hid => {}
            Object::App { head, args } => {
                head.free_vars_into(bound, out);
                for a in args {
                    a.free_vars_into(bound, out);
                }
            }
            Object::Bind { binder, bound: ctx, body } => {
                binder.free_vars_into(bound, out);
                let depth = bound.len();
                for d in &ctx.0 {
                    if let Some(t) = &d.ty {
                        t.free_vars_into(bound, out);
                    }
                    bound.push(d.name.clone());
                }
                body.free_vars_into(bound, out);
                bound.truncate(depth);
            }
        }
    }

    /// Structural invariants: App arguments nonempty, App heads not Apps,
    /// Bind contexts nonempty with distinct names. Used on imported objects;
    /// the constructors maintain these for objects built internally.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Object::Sym { .. } | Object::Var { .. } | Object::Hid => Ok(()),
            Object::App { head, args } => {
                if args.is_empty() {
                    return Err("application with no arguments".into());
                }
                if matches!(**head, Object::App { .. }) {
                    return Err("application head is itself an application".into());
                }
                head.validate()?;
                args.iter().try_for_each(Object::validate)
            }
            Object::Bind { binder, bound, body } => {
                if bound.is_empty() {
                    return Err("binder with empty context".into());
                }
                if !bound.names_distinct() {
                    return Err("binder context with duplicate variable names".into());
                }
                binder.validate()?;
                for d in &bound.0 {
                    if let Some(t) = &d.ty {
                        t.validate()?;
                    }
                }
                body.validate()
            }
        }
    }

    /// Requalifies every Sym of theory `from` to theory `to`.
    pub fn rename_theory(&self, from: &str, to: &str) -> Object {
        match self {
            Object::Sym { theory, name } if theory == from => Object::sym(to, name.clone()),
            Object::Sym { .. } | Object::Var { .. } | Object::Hid => self.clone(),
            Object::App { head, args } => Object::App {
                head: Box::new(head.rename_theory(from, to)),
                args: args.iter().map(|a| a.rename_theory(from, to)).collect(),
            },
            Object::Bind { binder, bound, body } => Object::Bind {
                binder: Box::new(binder.rename_theory(from, to)),
                bound: Context(
                    bound
                        .0
                        .iter()
                        .map(|d| VarDecl {
                            name: d.name.clone(),
                            ty: d.ty.as_ref().map(|t| t.rename_theory(from, to)),
                        })
                        .collect(),
                ),
                body: Box::new(body.rename_theory(from, to)),
            },
        }
    }
}

/// Smallest positive integer suffix on `base` that avoids the given set.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    for i in 1u64.. {
        let cand = format!("{base}{i}");
        if !avoid.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

pub fn alpha_eq(a: &Object, b: &Object) -> bool {
    alpha_env(a, b, &mut Vec::new())
}

fn alpha_env(a: &Object, b: &Object, env: &mut Vec<(Name, Name)>) -> bool {
    match (a, b) {
        (Object::Sym { theory: t1, name: n1 }, Object::Sym { theory: t2, name: n2 }) => {
            t1 == t2 && n1 == n2
        }
        (Object::Var { name: x }, Object::Var { name: y }) => {
            for (ea, eb) in env.iter().rev() {
                let ma = ea == x;
                let mb = eb == y;
                if ma || mb {
                    return ma && mb;
                }
            }
            x == y
        }
        (Object::App { head: h1, args: a1 }, Object::App { head: h2, args: a2 }) => {
            a1.len() == a2.len()
                && alpha_env(h1, h2, env)
                && a1.iter().zip(a2).all(|(x, y)| alpha_env(x, y, env))
        }
        (
            Object::Bind { binder: b1, bound: c1, body: o1 },
            Object::Bind { binder: b2, bound: c2, body: o2 },
        ) => {
            if c1.len() != c2.len() || !alpha_env(b1, b2, env) {
                return false;
            }
            let depth = env.len();
            let mut ok = true;
            for (d1, d2) in c1.0.iter().zip(&c2.0) {
                ok = match (&d1.ty, &d2.ty) {
                    (None, None) => true,
                    (Some(t1), Some(t2)) => alpha_env(t1, t2, env),
                    _ => false,
                };
                if !ok {
                    break;
                }
                env.push((d1.name.clone(), d2.name.clone()));
            }
            let r = ok && alpha_env(o1, o2, env);
            env.truncate(depth);
            r
        }
        (Object::Hid, Object::Hid) => true,
        _ => false,
    }
}

/// Capture-avoiding simultaneous substitution; total on all objects.
pub fn subst_apply(o: &Object, s: &Substitution) -> Object {
    let entries: Vec<(Name, Object)> =
        s.0.iter().map(|p| (p.name.clone(), p.value.clone())).collect();
    subst_go(o, &entries)
}

fn subst_go(o: &Object, sub: &[(Name, Object)]) -> Object {
    if sub.is_empty() {
        return o.clone();
    }
    match o {
        Object::Var { name } => sub
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| o.clone()),
        Object::Sym { .. } | Object::Hid => o.clone(),
        Object::App { head, args } => Object::app(
            subst_go(head, sub),
            args.iter().map(|a| subst_go(a, sub)).collect(),
        ),
        Object::Bind { binder, bound, body } => {
            let binder2 = subst_go(binder, sub);
            let mut cur: Vec<(Name, Object)> = sub.to_vec();
            let mut decls: Vec<VarDecl> = Vec::with_capacity(bound.len());
            for (i, d) in bound.0.iter().enumerate() {
                let ty2 = d.ty.as_ref().map(|t| subst_go(t, &cur));
                cur.retain(|(n, _)| n != &d.name);
                // Remainder of the original binder scope this variable is visible in.
                let mut rem_fv: BTreeSet<Name> = body.free_vars();
                for later in &bound.0[i + 1..] {
                    if let Some(t) = &later.ty {
                        rem_fv.extend(t.free_vars());
                    }
                }
                let capture = cur.iter().any(|(n, img)| {
                    rem_fv.contains(n) && img.free_vars().contains(&d.name)
                });
                let name2 = if capture {
                    let mut avoid: BTreeSet<Name> = rem_fv;
                    for (n, img) in &cur {
                        avoid.insert(n.clone());
                        avoid.extend(img.free_vars());
                    }
                    for dd in &bound.0 {
                        avoid.insert(dd.name.clone());
                    }
                    for dd in &decls {
                        avoid.insert(dd.name.clone());
                    }
                    let fresh = fresh_name(&d.name, &avoid);
                    cur.push((d.name.clone(), Object::var(fresh.clone())));
                    fresh
                } else {
                    d.name.clone()
                };
                decls.push(VarDecl { name: name2, ty: ty2 });
            }
            let body2 = subst_go(body, &cur);
            Object::Bind {
                binder: Box::new(binder2),
                bound: Context(decls),
                body: Box::new(body2),
            }
        }
    }
}

/// s1 ∘ s2: applies s2 to s1's values, then appends s2's bindings for
/// variables not bound by s1; o[s1][s2] is alpha-equal to o[s1 ∘ s2].
pub fn compose_subst(s1: &Substitution, s2: &Substitution) -> Substitution {
    let mut out: Vec<SubstPair> = s1
        .0
        .iter()
        .map(|p| SubstPair { name: p.name.clone(), value: subst_apply(&p.value, s2) })
        .collect();
    for p in &s2.0 {
        if s1.lookup(&p.name).is_none() {
            out.push(p.clone());
        }
    }
    Substitution(out)
}

/// Applies a substitution to every type in a context (telescope-aware:
/// entries shadow the substitution for later entries).
pub fn subst_context(c: &Context, s: &Substitution) -> Context {
    let mut cur: Vec<(Name, Object)> =
        s.0.iter().map(|p| (p.name.clone(), p.value.clone())).collect();
    let mut out = Vec::with_capacity(c.len());
    for d in &c.0 {
        let ty2 = d.ty.as_ref().map(|t| subst_go(t, &cur));
        cur.retain(|(n, _)| n != &d.name);
        out.push(VarDecl { name: d.name.clone(), ty: ty2 });
    }
    Context(out)
}
