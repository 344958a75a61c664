#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use mmtk_core::kernel::{
    Context, Name, Object, QName, SubstPair, Substitution, Theory, TheoryGraph, VarDecl,
};
use mmtk_core::prelude::base_program;
use mmtk_core::syntax::{BundleDecl, Program};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

/// Parses fixture files on top of the built-in prelude.
pub fn load_fixtures(names: &[&str]) -> (TheoryGraph, Vec<BundleDecl>) {
    let mut p: Program = base_program();
    for name in names {
        let text = fixture_text(name);
        p.parse_into(&text, name)
            .unwrap_or_else(|e| panic!("parse {name}: {e}"));
    }
    (p.graph, p.bundles)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Oracle 1: alpha-equivalence via an independent de Bruijn translation.
//
// Binders are erased into indices; two objects are alpha-equivalent exactly
// when their translations are structurally equal.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Db {
    Sym(Name, Name),
    Free(Name),
    Bound(usize),
    App(Box<Db>, Vec<Db>),
    Bind(Box<Db>, Vec<Option<Db>>, Box<Db>),
    Hid,
}

fn to_db(o: &Object, env: &mut Vec<Name>) -> Db {
    match o {
        Object::Sym { theory, name } => Db::Sym(theory.clone(), name.clone()),
        Object::Var { name } => {
            // Innermost binding wins, as in named scoping.
            match env.iter().rposition(|n| n == name) {
                Some(i) => Db::Bound(env.len() - 1 - i),
                None => Db::Free(name.clone()),
            }
        }
        Object::App { head, args } => Db::App(
            Box::new(to_db(head, env)),
            args.iter().map(|a| to_db(a, env)).collect(),
        ),
        Object::Bind { binder, bound, body } => {
            let b = to_db(binder, env);
            let mut tys = Vec::new();
            let depth = env.len();
            for vd in &bound.0 {
                tys.push(vd.ty.as_ref().map(|t| to_db(t, env)));
                env.push(vd.name.clone());
            }
            let body = to_db(body, env);
            env.truncate(depth);
            Db::Bind(Box::new(b), tys, Box::new(body))
        }
        Object::Hid => Db::Hid,
    }
}

pub fn alpha_eq_oracle(a: &Object, b: &Object) -> bool {
    to_db(a, &mut Vec::new()) == to_db(b, &mut Vec::new())
}

// ---------------------------------------------------------------------------
// Oracle 2: capture-avoiding substitution in a locally-nameless style.
//
// Translate to de Bruijn (free variables stay named), substitute a closed-
// or-open replacement for a free name, and read back with fresh names.  The
// read-back shifts indices of the replacement implicitly because the
// replacement is itself re-translated at each insertion point.

fn db_subst(t: &Db, x: &str, v: &Db, depth: usize) -> Db {
    match t {
        Db::Free(n) if n == x => shift(v, depth),
        Db::Sym(..) | Db::Free(_) | Db::Bound(_) | Db::Hid => t.clone(),
        Db::App(h, args) => Db::App(
            Box::new(db_subst(h, x, v, depth)),
            args.iter().map(|a| db_subst(a, x, v, depth)).collect(),
        ),
        Db::Bind(b, tys, body) => {
            let nb = db_subst(b, x, v, depth);
            let mut d = depth;
            let mut ntys = Vec::new();
            for ty in tys {
                ntys.push(ty.as_ref().map(|t| db_subst(t, x, v, d)));
                d += 1;
            }
            let nbody = db_subst(body, x, v, d);
            Db::Bind(Box::new(nb), ntys, Box::new(nbody))
        }
    }
}

/// The replacement is translated at depth 0; entering binders leaves its
/// free variables free and its bound indices must skip the local binders.
fn shift(v: &Db, by: usize) -> Db {
    fn go(t: &Db, by: usize, cutoff: usize) -> Db {
        match t {
            Db::Bound(i) if *i >= cutoff => Db::Bound(i + by),
            Db::Sym(..) | Db::Free(_) | Db::Bound(_) | Db::Hid => t.clone(),
            Db::App(h, args) => Db::App(
                Box::new(go(h, by, cutoff)),
                args.iter().map(|a| go(a, by, cutoff)).collect(),
            ),
            Db::Bind(b, tys, body) => {
                let nb = go(b, by, cutoff);
                let mut c = cutoff;
                let mut ntys = Vec::new();
                for ty in tys {
                    ntys.push(ty.as_ref().map(|t| go(t, by, c)));
                    c += 1;
                }
                Db::Bind(Box::new(nb), ntys, Box::new(go(body, by, c)))
            }
        }
    }
    go(v, by, 0)
}

fn db_free_names(t: &Db, out: &mut BTreeSet<Name>) {
    match t {
        Db::Free(n) => {
            out.insert(n.clone());
        }
        Db::Sym(..) | Db::Bound(_) | Db::Hid => {}
        Db::App(h, args) => {
            db_free_names(h, out);
            for a in args {
                db_free_names(a, out);
            }
        }
        Db::Bind(b, tys, body) => {
            db_free_names(b, out);
            for ty in tys.iter().flatten() {
                db_free_names(ty, out);
            }
            db_free_names(body, out);
        }
    }
}

fn from_db(t: &Db, env: &mut Vec<Name>, avoid: &BTreeSet<Name>) -> Object {
    match t {
        Db::Sym(th, n) => Object::sym(th.clone(), n.clone()),
        Db::Free(n) => Object::var(n.clone()),
        Db::Bound(i) => Object::var(env[env.len() - 1 - i].clone()),
        Db::Hid => Object::Hid,
        Db::App(h, args) => Object::app(
            from_db(h, env, avoid),
            args.iter().map(|a| from_db(a, env, avoid)).collect(),
        ),
        Db::Bind(b, tys, body) => {
            let binder = from_db(b, env, avoid);
            let depth = env.len();
            let mut ctx = Vec::new();
            for (k, ty) in tys.iter().enumerate() {
                let ty = ty.as_ref().map(|t| from_db(t, env, avoid));
                let mut name = format!("v{}", env.len());
                while avoid.contains(&name) || env.contains(&name) {
                    name = format!("{name}'");
                }
                ctx.push(match ty {
                    Some(t) => VarDecl::typed(name.clone(), t),
                    None => VarDecl::untyped(name.clone()),
                });
                let _ = k;
                env.push(name);
            }
            let body = from_db(body, env, avoid);
            env.truncate(depth);
            Object::bind(binder, Context(ctx), body)
        }
    }
}

/// Independent `o[x := v]`, result alpha-comparable with the kernel's.
pub fn subst_oracle(o: &Object, x: &str, v: &Object) -> Object {
    let t = to_db(o, &mut Vec::new());
    let dv = to_db(v, &mut Vec::new());
    let r = db_subst(&t, x, &dv, 0);
    let mut avoid = BTreeSet::new();
    db_free_names(&r, &mut avoid);
    from_db(&r, &mut Vec::new(), &avoid)
}

// ---------------------------------------------------------------------------
// Oracle 3: meta-reachability by naive graph walk.

pub fn reachable_meta_oracle(graph: &TheoryGraph, t: &str) -> Option<Vec<Name>> {
    // Root-first chain; None on unknown theory or a cycle.
    let mut chain = Vec::new();
    let mut seen = BTreeSet::new();
    let mut cur = t.to_string();
    loop {
        if !seen.insert(cur.clone()) {
            return None;
        }
        let th = graph.theory(&cur)?;
        chain.push(th.name.clone());
        match &th.meta {
            Some(m) => cur = m.clone(),
            None => break,
        }
    }
    chain.reverse();
    Some(chain)
}

pub fn accessible_oracle(graph: &TheoryGraph, t: &str) -> Option<Vec<QName>> {
    let chain = reachable_meta_oracle(graph, t)?;
    let mut out = Vec::new();
    for name in chain {
        let th = graph.theory(&name)?;
        for d in &th.body {
            out.push((th.name.clone(), d.name.clone()));
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Oracle 4: strongly connected components by Kosaraju's algorithm, for
// definitional-cycle detection.

pub fn sccs_oracle(nodes: &[QName], edges: &BTreeMap<QName, BTreeSet<QName>>) -> Vec<Vec<QName>> {
    let idx: BTreeMap<&QName, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let n = nodes.len();
    let mut fwd = vec![Vec::new(); n];
    let mut rev = vec![Vec::new(); n];
    for (from, tos) in edges {
        let Some(&i) = idx.get(from) else { continue };
        for to in tos {
            if let Some(&j) = idx.get(to) {
                fwd[i].push(j);
                rev[j].push(i);
            }
        }
    }
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    fn dfs1(u: usize, g: &[Vec<usize>], seen: &mut [bool], order: &mut Vec<usize>) {
        seen[u] = true;
        for &v in &g[u] {
            if !seen[v] {
                dfs1(v, g, seen, order);
            }
        }
        order.push(u);
    }
    for u in 0..n {
        if !seen[u] {
            dfs1(u, &fwd, &mut seen, &mut order);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &u in order.iter().rev() {
        if comp[u] != usize::MAX {
            continue;
        }
        let mut stack = vec![u];
        comp[u] = c;
        while let Some(x) = stack.pop() {
            for &v in &rev[x] {
                if comp[v] == usize::MAX {
                    comp[v] = c;
                    stack.push(v);
                }
            }
        }
        c += 1;
    }
    let mut groups = vec![Vec::new(); c];
    for (u, &cu) in comp.iter().enumerate() {
        groups[cu].push(nodes[u].clone());
    }
    // Cyclic components only: size > 1, or a self-loop.
    let mut out: Vec<Vec<QName>> = groups
        .into_iter()
        .filter(|g| {
            g.len() > 1
                || edges
                    .get(&g[0])
                    .map(|s| s.contains(&g[0]))
                    .unwrap_or(false)
        })
        .map(|mut g| {
            g.sort();
            g
        })
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Oracle 5: a small-step beta/delta reducer, independent of the kernel's
// machine.  Two strategies; both must agree with each other and the kernel
// on terminating inputs.

#[derive(Clone, Copy, PartialEq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
}

fn defs_of(graph: &TheoryGraph) -> BTreeMap<QName, Object> {
    let mut out = BTreeMap::new();
    for th in graph.theories() {
        for d in &th.body {
            if let Some(def) = &d.def {
                out.insert((th.name.clone(), d.name.clone()), def.clone());
            }
        }
    }
    out
}

/// One reduction step, or None if `o` is normal.  Beta on single-entry
/// binders applied to one or more arguments; delta on defined symbols.
fn step(o: &Object, defs: &BTreeMap<QName, Object>, strat: Strategy) -> Option<Object> {
    // Redex at the root?
    let root = |o: &Object| -> Option<Object> {
        match o {
            Object::Sym { theory, name } => {
                defs.get(&(theory.clone(), name.clone())).cloned()
            }
            Object::App { head, args } => {
                if let Object::Bind { binder, bound, body } = &**head {
                    if binder.is_sym("LF", "lambda") && bound.0.len() == 1 && !args.is_empty() {
                        let s = Substitution(vec![SubstPair {
                            name: bound.0[0].name.clone(),
                            value: args[0].clone(),
                        }]);
                        let reduced = mmtk_core::kernel::subst_apply(body, &s);
                        return Some(Object::app(reduced, args[1..].to_vec()));
                    }
                }
                None
            }
            _ => None,
        }
    };
    let sub = |o: &Object| -> Option<Object> {
        match o {
            Object::App { head, args } => {
                let mut parts: Vec<&Object> = Vec::with_capacity(args.len() + 1);
                parts.push(head);
                parts.extend(args.iter());
                let order: Vec<usize> = match strat {
                    Strategy::LeftmostOutermost => (0..parts.len()).collect(),
                    Strategy::RightmostInnermost => (0..parts.len()).rev().collect(),
                };
                for i in order {
                    if let Some(r) = step(parts[i], defs, strat) {
                        let mut nh = head.as_ref().clone();
                        let mut na = args.clone();
                        if i == 0 {
                            nh = r;
                        } else {
                            na[i - 1] = r;
                        }
                        return Some(Object::app(nh, na));
                    }
                }
                None
            }
            Object::Bind { binder, bound, body } => {
                if let Some(r) = step(binder, defs, strat) {
                    return Some(Object::bind(r, bound.clone(), body.as_ref().clone()));
                }
                let mut ctx = bound.clone();
                for (i, vd) in bound.0.iter().enumerate() {
                    if let Some(ty) = &vd.ty {
                        if let Some(r) = step(ty, defs, strat) {
                            ctx.0[i].ty = Some(r);
                            return Some(Object::bind(binder.as_ref().clone(), ctx, body.as_ref().clone()));
                        }
                    }
                }
                step(body, defs, strat)
                    .map(|r| Object::bind(binder.as_ref().clone(), bound.clone(), r))
            }
            _ => None,
        }
    };
    match strat {
        Strategy::LeftmostOutermost => root(o).or_else(|| sub(o)),
        Strategy::RightmostInnermost => sub(o).or_else(|| root(o)),
    }
}

/// Drives `o` to normal form; None if the budget runs out.
pub fn normalize_oracle(
    graph: &TheoryGraph,
    o: &Object,
    strat: Strategy,
    budget: usize,
) -> Option<Object> {
    let defs = defs_of(graph);
    let mut cur = o.clone();
    for _ in 0..budget {
        match step(&cur, &defs, strat) {
            Some(next) => cur = next,
            None => return Some(cur),
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Oracle 6: proof-sketch extraction by brute-force position scan.

fn subobjects_preorder<'a>(o: &'a Object, out: &mut Vec<&'a Object>) {
    out.push(o);
    match o {
        Object::App { head, args } => {
            subobjects_preorder(head, out);
            for a in args {
                subobjects_preorder(a, out);
            }
        }
        Object::Bind { binder, bound, body } => {
            subobjects_preorder(binder, out);
            for vd in &bound.0 {
                if let Some(ty) = &vd.ty {
                    subobjects_preorder(ty, out);
                }
            }
            subobjects_preorder(body, out);
        }
        _ => {}
    }
}

/// (steps, gaps): hid-free subobjects whose immediate parent contains a
/// hidden leaf (or the hid-free root), in left-to-right order; gaps count
/// hidden leaves.
pub fn sketch_oracle(o: &Object) -> (Vec<Object>, usize) {
    fn walk(o: &Object, parent_has_hid: bool, steps: &mut Vec<Object>, gaps: &mut usize) {
        if !o.contains_hid() {
            if parent_has_hid {
                steps.push(o.clone());
            }
            return;
        }
        if let Object::Hid = o {
            *gaps += 1;
            return;
        }
        match o {
            Object::App { head, args } => {
                walk(head, true, steps, gaps);
                for a in args {
                    walk(a, true, steps, gaps);
                }
            }
            Object::Bind { binder, bound, body } => {
                walk(binder, true, steps, gaps);
                for vd in &bound.0 {
                    if let Some(ty) = &vd.ty {
                        walk(ty, true, steps, gaps);
                    }
                }
                walk(body, true, steps, gaps);
            }
            _ => unreachable!("hid-free cases handled above"),
        }
    }
    let mut steps = Vec::new();
    let mut gaps = 0;
    if !o.contains_hid() {
        return (vec![o.clone()], 0);
    }
    walk(o, true, &mut steps, &mut gaps);
    // The root itself contains hid, so the initial call must not count it
    // as a step; `walk` on a hid-containing root recurses immediately.
    (steps, gaps)
}

// ---------------------------------------------------------------------------
// Random object generator (closed and open terms over a tiny signature).

pub struct ObjGen {
    pub theories: Vec<(Name, Vec<Name>)>,
    pub binders: Vec<(Name, Name)>,
    pub var_pool: Vec<Name>,
    pub allow_hid: bool,
}

impl Default for ObjGen {
    fn default() -> Self {
        ObjGen {
            theories: vec![
                ("T".into(), vec!["c".into(), "d".into(), "e".into()]),
                ("U".into(), vec!["u".into()]),
            ],
            binders: vec![("LF".into(), "lambda".into()), ("LF".into(), "Pi".into())],
            var_pool: vec!["x".into(), "y".into(), "z".into(), "w".into()],
            allow_hid: false,
        }
    }
}

impl ObjGen {
    /// A random well-formed object of roughly the given size.  `scope` is
    /// the set of variables allowed to appear free.
    pub fn gen(&self, rng: &mut StdRng, size: usize, scope: &mut Vec<Name>) -> Object {
        if size <= 1 {
            let n_leaf = 2 + usize::from(self.allow_hid) + usize::from(!scope.is_empty());
            match rng.gen_range(0..n_leaf) {
                0 | 1 => {
                    let (t, syms) = &self.theories[rng.gen_range(0..self.theories.len())];
                    let s = &syms[rng.gen_range(0..syms.len())];
                    Object::sym(t.clone(), s.clone())
                }
                2 if !scope.is_empty() => {
                    Object::var(scope[rng.gen_range(0..scope.len())].clone())
                }
                _ => Object::Hid,
            }
        } else if rng.gen_bool(0.55) {
            let nargs = rng.gen_range(1..=3.min(size - 1));
            let each = (size - 1) / (nargs + 1);
            let head = self.gen_head(rng, each.max(1), scope);
            let args = (0..nargs)
                .map(|_| self.gen(rng, each.max(1), scope))
                .collect();
            Object::app(head, args)
        } else {
            let (bt, bn) = &self.binders[rng.gen_range(0..self.binders.len())];
            let binder = Object::sym(bt.clone(), bn.clone());
            let fresh: Vec<Name> = self
                .var_pool
                .iter()
                .filter(|v| !scope.contains(v))
                .cloned()
                .collect();
            if fresh.is_empty() {
                return self.gen(rng, 1, scope);
            }
            let v = fresh[rng.gen_range(0..fresh.len())].clone();
            let ty = if rng.gen_bool(0.7) {
                Some(self.gen(rng, (size - 1) / 3 + 1, scope))
            } else {
                None
            };
            scope.push(v.clone());
            let body = self.gen(rng, size - 1 - size / 3, scope);
            scope.pop();
            let vd = match ty {
                Some(t) => VarDecl::typed(v, t),
                None => VarDecl::untyped(v),
            };
            Object::bind(binder, Context(vec![vd]), body)
        }
    }

    /// Application heads must not themselves be applications.
    fn gen_head(&self, rng: &mut StdRng, size: usize, scope: &mut Vec<Name>) -> Object {
        loop {
            let o = if size > 1 && rng.gen_bool(0.3) {
                self.gen(rng, size, scope)
            } else {
                self.gen(rng, 1, scope)
            };
            match o {
                Object::App { .. } => continue,
                Object::Hid if !self.allow_hid => continue,
                o => return o,
            }
        }
    }
}

/// Exhaustive pool of small objects for pairwise alpha comparisons.
pub fn exhaustive_pool(max_depth: usize) -> Vec<Object> {
    let mut layers = vec![vec![
        Object::sym("T", "c"),
        Object::var("x"),
        Object::var("y"),
        Object::Hid,
    ]];
    for d in 1..=max_depth {
        let prev = &layers[d - 1];
        let mut next = Vec::new();
        for a in prev {
            // Unary applications of a fixed head keep the pool small.
            if !matches!(a, Object::Hid) {
                next.push(Object::app(Object::sym("T", "f"), vec![a.clone()]));
            }
            for bn in ["lambda", "Pi"] {
                for v in ["x", "y"] {
                    next.push(Object::bind(
                        Object::sym("LF", bn),
                        Context(vec![VarDecl::untyped(v)]),
                        a.clone(),
                    ));
                }
            }
        }
        layers.push(next);
    }
    layers.into_iter().flatten().collect()
}

// ---------------------------------------------------------------------------
// Random theory-graph generator for preservation testing (both foundations).

pub struct GenGraph {
    pub graph: TheoryGraph,
    /// Theories eligible as view domains (generated, non-framework).
    pub leaves: Vec<Name>,
}

/// A generated theory chain: either structural (no meta) or rooted at LF.
/// Theory count stays <= 12 including the optional LF root.
pub fn gen_graph(rng: &mut StdRng, lf: bool) -> GenGraph {
    let mut graph = TheoryGraph::default();
    if lf {
        let p = base_program();
        graph = p.graph;
    }
    let n_theories = rng.gen_range(1..=4usize);
    let mut prev: Option<Name> = None;
    let mut leaves = Vec::new();
    for ti in 0..n_theories {
        let tname: Name = format!("G{ti}");
        let meta = match &prev {
            Some(p) => Some(p.clone()),
            None if lf => Some("LF".into()),
            None => None,
        };
        let mut th = Theory::new(tname.clone(), meta);
        let n_syms = rng.gen_range(1..=4usize);
        for si in 0..n_syms {
            let sname: Name = format!("s{ti}_{si}");
            if lf {
                gen_lf_decl(rng, &graph, &mut th, sname);
            } else {
                gen_structural_decl(rng, &graph, &mut th, sname);
            }
        }
        graph.push_theory(th);
        leaves.push(tname.clone());
        prev = Some(tname);
    }
    GenGraph { graph, leaves }
}

/// Structural declarations: plain names, or typed/defined by an accessible
/// symbol or a small application of accessible symbols.
fn gen_structural_decl(rng: &mut StdRng, graph: &TheoryGraph, th: &mut Theory, name: Name) {
    let mut pool: Vec<Object> = Vec::new();
    for t in graph.theories() {
        for d in &t.body {
            pool.push(Object::sym(t.name.clone(), d.name.clone()));
        }
    }
    for d in &th.body {
        pool.push(Object::sym(th.name.clone(), d.name.clone()));
    }
    let pick = |rng: &mut StdRng, pool: &[Object]| -> Option<Object> {
        if pool.is_empty() {
            return None;
        }
        let base = pool[rng.gen_range(0..pool.len())].clone();
        Some(if rng.gen_bool(0.3) && pool.len() >= 2 {
            let arg = pool[rng.gen_range(0..pool.len())].clone();
            Object::app(base, vec![arg])
        } else {
            base
        })
    };
    let ty = if rng.gen_bool(0.5) { pick(rng, &pool) } else { None };
    let def = if rng.gen_bool(0.35) { pick(rng, &pool) } else { None };
    th.body.push(mmtk_core::kernel::SymbolDecl {
        name,
        ty,
        def,
    });
}

/// Framework declarations: a base type per theory, then constants of
/// first-order types over the accessible base types, with occasional
/// definitions by earlier constants of the same type.
fn gen_lf_decl(rng: &mut StdRng, graph: &TheoryGraph, th: &mut Theory, name: Name) {
    // Accessible base types: symbols declared `: type`.
    let is_type = |d: &mmtk_core::kernel::SymbolDecl| {
        matches!(&d.ty, Some(t) if t.is_sym("LF", "type")) && d.def.is_none()
    };
    let mut bases: Vec<Object> = Vec::new();
    for t in graph.theories() {
        for d in &t.body {
            if is_type(d) {
                bases.push(Object::sym(t.name.clone(), d.name.clone()));
            }
        }
    }
    for d in &th.body {
        if is_type(d) {
            bases.push(Object::sym(th.name.clone(), d.name.clone()));
        }
    }
    if bases.is_empty() || rng.gen_bool(0.25) {
        th.body.push(mmtk_core::kernel::SymbolDecl {
            name,
            ty: Some(Object::sym("LF", "type")),
            def: None,
        });
        return;
    }
    // A first-order type b1 -> ... -> bk (k >= 1) as nested Pi.
    let k = rng.gen_range(1..=3usize);
    let picks: Vec<Object> = (0..k)
        .map(|_| bases[rng.gen_range(0..bases.len())].clone())
        .collect();
    let mut ty = picks[k - 1].clone();
    for b in picks[..k - 1].iter().rev() {
        ty = Object::bind(
            Object::sym("LF", "Pi"),
            Context(vec![VarDecl::typed("_", b.clone())]),
            ty,
        );
    }
    // Maybe define it by an earlier constant with an alpha-equal type.
    let mut def = None;
    if rng.gen_bool(0.3) {
        let mut candidates = Vec::new();
        for t in graph.theories().chain(std::iter::once(&*th)) {
            for d in &t.body {
                if let Some(dty) = &d.ty {
                    if mmtk_core::kernel::alpha_eq(dty, &ty) {
                        candidates.push(Object::sym(t.name.clone(), d.name.clone()));
                    }
                }
            }
        }
        if !candidates.is_empty() {
            def = Some(candidates[rng.gen_range(0..candidates.len())].clone());
        }
    }
    th.body.push(mmtk_core::kernel::SymbolDecl {
        name,
        ty: Some(ty),
        def,
    });
}
