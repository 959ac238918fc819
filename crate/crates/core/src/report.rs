//! Named residual reports shared by the checking operations.

use crate::expr::Expr;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Residual {
    pub name: String,
    pub value: Expr,
    /// Informational entries are reported but never decide pass/fail.
    pub informational: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Report {
    pub entries: Vec<Residual>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: Expr) {
        self.entries.push(Residual {
            name: name.into(),
            value,
            informational: false,
        });
    }

    pub fn push_info(&mut self, name: impl Into<String>, value: Expr) {
        self.entries.push(Residual {
            name: name.into(),
            value,
            informational: true,
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    /// True when every non-informational residual is zero.
    pub fn passes(&self) -> bool {
        self.entries
            .iter()
            .filter(|r| !r.informational)
            .all(|r| r.value.is_zero())
    }

    pub fn get(&self, name: &str) -> Option<&Expr> {
        self.entries.iter().find(|r| r.name == name).map(|r| &r.value)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &Residual> {
        self.entries.iter().filter(|r| !r.value.is_zero())
    }
}
