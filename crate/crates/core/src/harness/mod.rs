//! Fixtures, sampling, structure files, suite dispatch and report output.

pub mod fixtures;
pub mod report;
pub mod sampling;
pub mod structure_file;
pub mod suites;

pub use fixtures::{fixture, fixture_names, fixtures, Fixture};
pub use sampling::sample_points;
pub use structure_file::{export_structure, load_structure_file, parse_structure, Structure};
pub use suites::{run_suite, run_suites, Suite, SuiteOptions};
