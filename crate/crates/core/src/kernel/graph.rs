use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

use super::object::{Context, Name, Object, QName};
use super::theory::{SymbolDecl, Theory};
use crate::morphisms::View;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("unknown theory {0}")]
    UnknownTheory(Name),
    #[error("meta-theory cycle at {0}")]
    MetaCycle(Name),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decl", rename_all = "lowercase")]
pub enum GraphDecl {
    Theory(Theory),
    View(View),
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct TheoryGraph {
    pub decls: Vec<GraphDecl>,
}

impl TheoryGraph {
    pub fn new() -> TheoryGraph {
        TheoryGraph::default()
    }

    pub fn theories(&self) -> impl Iterator<Item = &Theory> {
        self.decls.iter().filter_map(|d| match d {
            GraphDecl::Theory(t) => Some(t),
            _ => None,
        })
    }

    pub fn views(&self) -> impl Iterator<Item = &View> {
        self.decls.iter().filter_map(|d| match d {
            GraphDecl::View(v) => Some(v),
            _ => None,
        })
    }

    pub fn theory(&self, name: &str) -> Option<&Theory> {
        self.theories().find(|t| t.name == name)
    }

    pub fn view(&self, name: &str) -> Option<&View> {
        self.views().find(|v| v.name == name)
    }

    pub fn push_theory(&mut self, t: Theory) {
        self.decls.push(GraphDecl::Theory(t));
    }

    pub fn push_view(&mut self, v: View) {
        self.decls.push(GraphDecl::View(v));
    }

    pub fn symbol(&self, theory: &str, name: &str) -> Option<&SymbolDecl> {
        self.theory(theory).and_then(|t| t.decl(name))
    }

    /// Meta-theory chain of `t`, root first, ending with `t` itself.
    pub fn meta_chain(&self, t: &str) -> Result<Vec<&Theory>, KernelError> {
        let mut chain = Vec::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut cur = self.theory(t).ok_or_else(|| KernelError::UnknownTheory(t.to_string()))?;
        loop {
            if !seen.insert(&cur.name) {
                return Err(KernelError::MetaCycle(cur.name.clone()));
            }
            chain.push(cur);
            match &cur.meta {
                Some(m) => {
                    cur = self
                        .theory(m)
                        .ok_or_else(|| KernelError::UnknownTheory(m.clone()))?;
                }
                None => break,
            }
        }
        chain.reverse();
        Ok(chain)
    }

    /// Symbols accessible to `t`: the meta-chain root's body first, down to
    /// t's own body last, declaration order within each theory.
    pub fn accessible_symbols(&self, t: &str) -> Result<Vec<QName>, KernelError> {
        Ok(self
            .accessible_decls(t)?
            .into_iter()
            .map(|(th, d)| (th, d.name.clone()))
            .collect())
    }

    pub fn accessible_decls(&self, t: &str) -> Result<Vec<(Name, &SymbolDecl)>, KernelError> {
        let chain = self.meta_chain(t)?;
        let mut out = Vec::new();
        for th in chain {
            for d in &th.body {
                out.push((th.name.clone(), d));
            }
        }
        Ok(out)
    }

    pub fn is_accessible(&self, t: &str, q_theory: &str, q_name: &str) -> Result<bool, KernelError> {
        let chain = self.meta_chain(t)?;
        Ok(chain
            .iter()
            .any(|th| th.name == q_theory && th.decl(q_name).is_some()))
    }

    /// True iff every symbol in `o` is accessible to `t` and every free
    /// variable is bound in `c`. Hid nodes are permitted.
    pub fn is_object_over(&self, t: &str, o: &Object, c: &Context) -> Result<bool, KernelError> {
        Ok(self.over_theory_offender(t, o, c)?.is_none())
    }

    /// First reason `o` fails to be an object over `t`, if any.
    pub fn over_theory_offender(
        &self,
        t: &str,
        o: &Object,
        c: &Context,
    ) -> Result<Option<OverOffender>, KernelError> {
        let chain = self.meta_chain(t)?;
        for (qt, qn) in o.symbols() {
            let ok = chain.iter().any(|th| th.name == qt && th.decl(&qn).is_some());
            if !ok {
                return Ok(Some(OverOffender::Symbol(qt, qn)));
            }
        }
        let ctx_names: BTreeSet<&str> = c.0.iter().map(|d| d.name.as_str()).collect();
        if let Some(v) = o.free_vars().into_iter().find(|v| !ctx_names.contains(v.as_str())) {
            return Ok(Some(OverOffender::FreeVar(v)));
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OverOffender {
    Symbol(Name, Name),
    FreeVar(Name),
}

impl std::fmt::Display for OverOffender {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OverOffender::Symbol(t, c) => write!(f, "symbol {t}/{c} is not accessible"),
            OverOffender::FreeVar(v) => write!(f, "variable ${v} is unbound"),
        }
    }
}
