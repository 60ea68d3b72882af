//! Spec files, task runners and reports behind the `lexichoice` binary.
//!
//! A spec names a ground set, choice and exclusion functions, and a task
//! list. Running it yields a [`report::Report`] whose failure records carry
//! everything needed to rebuild and re-check the failure.

pub mod report;
pub mod spec;
pub mod tasks;
pub mod theorems;
pub mod tree;
