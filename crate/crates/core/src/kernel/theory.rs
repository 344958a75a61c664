use serde::{Deserialize, Serialize};

use super::object::{Name, Object};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDecl {
    pub name: Name,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none", default)]
    pub ty: Option<Object>,
    #[serde(rename = "definiens", skip_serializing_if = "Option::is_none", default)]
    pub def: Option<Object>,
}

impl SymbolDecl {
    pub fn plain(name: impl Into<Name>) -> SymbolDecl {
        SymbolDecl { name: name.into(), ty: None, def: None }
    }

    pub fn typed(name: impl Into<Name>, ty: Object) -> SymbolDecl {
        SymbolDecl { name: name.into(), ty: Some(ty), def: None }
    }

    pub fn defined(name: impl Into<Name>, ty: Option<Object>, def: Object) -> SymbolDecl {
        SymbolDecl { name: name.into(), ty, def: Some(def) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theory {
    pub name: Name,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<Name>,
    pub body: Vec<SymbolDecl>,
}

impl Theory {
    pub fn new(name: impl Into<Name>, meta: Option<Name>) -> Theory {
        Theory { name: name.into(), meta, body: Vec::new() }
    }

    pub fn decl(&self, symbol: &str) -> Option<&SymbolDecl> {
        self.body.iter().find(|d| d.name == symbol)
    }

    /// Copy of this theory under a new name with every self-reference in the
    /// body requalified to the new name.
    pub fn requalified(&self, new_name: &str) -> Theory {
        Theory {
            name: new_name.to_string(),
            meta: self.meta.clone(),
            body: self
                .body
                .iter()
                .map(|d| SymbolDecl {
                    name: d.name.clone(),
                    ty: d.ty.as_ref().map(|t| t.rename_theory(&self.name, new_name)),
                    def: d.def.as_ref().map(|t| t.rename_theory(&self.name, new_name)),
                })
                .collect(),
        }
    }
}
