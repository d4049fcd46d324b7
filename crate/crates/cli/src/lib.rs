//! Experiment harness for `xebspoof`: configuration files, figure recipes,
//! CSV and plot-data output, and reproducible run manifests.

pub mod bayes;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod recipes;
pub mod spoof_run;
pub mod theory_check;

pub use error::{CliError, Result};

/// One named pass/fail condition of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

pub(crate) fn checks_table(checks: &[Check]) -> output::Table {
    let mut t = output::Table::new(vec!["check", "passed", "detail"]);
    for c in checks {
        t.push(vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]);
    }
    t
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
