//! A small text format for describing examples, its runner, and the example catalogue.

pub mod dsl;
pub mod fixtures;
pub mod run;

pub use dsl::{parse_document, DslError};
pub use fixtures::{all_fixtures, find_fixture, run_fixture, Fixture, FixtureOutcome};
pub use run::{run_document, RunOptions};
