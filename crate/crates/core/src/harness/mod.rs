//! Verification suites: identity and inequality checks run over seeded
//! random instances, with deterministic reports.

pub mod config;
pub mod identities;
pub mod inequalities;
pub mod result;
pub mod runner;

pub use config::SuiteConfig;
pub use identities::{cosine_self_adjointness, identity_checks, perturbed_cosine_self_adjointness};
pub use inequalities::inequality_checks;
pub use result::{CheckResult, Relation, Report, ReportFormat, Summary, Witness};
pub use runner::{
    check_result, instance_seed, replay, run_check, run_suite, CheckSpec, Instance, Outcome, Suite,
};
