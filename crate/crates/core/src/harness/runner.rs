//! Check registry and suite execution.

use rayon::prelude::*;

use super::config::{id_key, SuiteConfig};
use super::result::{CheckResult, Relation, Report, Witness};
use super::{identities, inequalities};
use crate::error::{invalid, Result};
use crate::geometry::BodyHandle;
use crate::rng::{derive_seed, tags};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Inequalities,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::Identities => "identities",
            Self::Inequalities => "inequalities",
        }
    }

    pub fn checks(self) -> Vec<CheckSpec> {
        match self {
            Self::Identities => identities::identity_checks(),
            Self::Inequalities => inequalities::inequality_checks(),
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Self::Identities),
            "inequalities" => Ok(Self::Inequalities),
            _ => invalid(format!("unknown suite {s:?}")),
        }
    }
}

/// One seeded instance of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
}

/// What a check computes for one instance.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub se: f64,
    pub tol: f64,
    pub bodies: Vec<BodyHandle>,
    pub note: String,
}

impl Outcome {
    pub fn new(relation: Relation, lhs: f64, rhs: f64, se: f64, tol: f64) -> Self {
        Self {
            relation,
            lhs,
            rhs,
            se,
            tol,
            bodies: Vec::new(),
            note: String::new(),
        }
    }

    pub fn eq(lhs: f64, rhs: f64, se: f64, tol: f64) -> Self {
        Self::new(Relation::Eq, lhs, rhs, se, tol)
    }

    pub fn with_bodies(mut self, bodies: Vec<BodyHandle>) -> Self {
        self.bodies = bodies;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn gap(&self) -> f64 {
        self.relation.gap(self.lhs, self.rhs)
    }

    pub fn passes(&self) -> bool {
        let gap = self.gap();
        !gap.is_nan() && self.relation.passes(gap, self.tol)
    }

    /// How close the outcome is to failing: `gap / tol` for equalities,
    /// failing outcomes first.
    fn severity(&self) -> f64 {
        if !self.passes() {
            return f64::INFINITY;
        }
        let gap = self.gap();
        match self.relation {
            Relation::Eq => {
                if self.tol > 0.0 {
                    gap / self.tol
                } else {
                    0.0
                }
            }
            Relation::Ge => -gap,
            Relation::Gt | Relation::Lt => -(gap - self.tol),
        }
    }

    /// The worst of several pointwise outcomes; the first one wins ties.
    pub fn worst(outcomes: impl IntoIterator<Item = Outcome>) -> Result<Outcome> {
        let mut best: Option<Outcome> = None;
        for o in outcomes {
            if best.as_ref().is_none_or(|b| o.severity() > b.severity()) {
                best = Some(o);
            }
        }
        best.ok_or_else(|| crate::Error::InvalidInput("no outcomes to compare".into()))
    }
}

pub type CheckFn = fn(&SuiteConfig, &Instance) -> Result<Outcome>;

/// A registered check: an id, the identity or inequality it exercises, an
/// instance count and the per-instance computation.
#[derive(Clone, Copy)]
pub struct CheckSpec {
    pub id: &'static str,
    pub anchor: &'static str,
    pub instances: fn(&SuiteConfig) -> usize,
    pub run: CheckFn,
}

impl std::fmt::Debug for CheckSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CheckSpec")
            .field("id", &self.id)
            .field("anchor", &self.anchor)
            .finish()
    }
}

pub fn instance_seed(cfg: &SuiteConfig, id: &str, index: usize) -> u64 {
    derive_seed(
        derive_seed(cfg.seed, tags::SUITE, id_key(id)),
        0,
        index as u64,
    )
}

/// Turns an outcome (or an error) into a result, attaching a witness when
/// the check fails.
pub fn check_result(
    suite: Suite,
    cfg: &SuiteConfig,
    spec: &CheckSpec,
    inst: Instance,
    outcome: Result<Outcome>,
) -> CheckResult {
    let outcome = outcome.unwrap_or_else(|e| {
        Outcome::new(Relation::Eq, f64::NAN, f64::NAN, f64::NAN, 0.0)
            .with_note(format!("error: {e}"))
    });
    let gap = outcome.gap();
    let pass = outcome.passes();
    let witness = (!pass).then(|| Witness {
        suite: suite.name().to_string(),
        check: spec.id.to_string(),
        index: inst.index,
        seed: inst.seed,
        config: cfg.clone(),
        bodies: outcome.bodies.iter().map(BodyHandle::to_json).collect(),
        note: outcome.note.clone(),
    });
    CheckResult {
        id: spec.id.to_string(),
        anchor: spec.anchor.to_string(),
        relation: outcome.relation,
        lhs: outcome.lhs,
        rhs: outcome.rhs,
        gap,
        tol: outcome.tol,
        pass,
        index: inst.index,
        seed: inst.seed,
        se: outcome.se,
        witness,
    }
}

pub fn run_check(suite: Suite, cfg: &SuiteConfig, spec: &CheckSpec, index: usize) -> CheckResult {
    let inst = Instance {
        index,
        seed: instance_seed(cfg, spec.id, index),
    };
    check_result(suite, cfg, spec, inst, (spec.run)(cfg, &inst))
}

/// Runs every instance of every check in `suite`. Check failures and
/// numerical errors become failing results; only an invalid configuration
/// is an error.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let checks = suite.checks();
    let tasks: Vec<(usize, usize)> = checks
        .iter()
        .enumerate()
        .flat_map(|(c, spec)| (0..(spec.instances)(cfg)).map(move |k| (c, k)))
        .collect();
    let results: Vec<CheckResult> = tasks
        .par_iter()
        .map(|&(c, k)| run_check(suite, cfg, &checks[c], k))
        .collect();
    Ok(Report::new(suite.name(), cfg.clone(), results))
}

/// Re-runs the single instance recorded in a witness.
pub fn replay(witness: &Witness) -> Result<CheckResult> {
    let suite: Suite = witness.suite.parse()?;
    witness.config.validate()?;
    let mut candidates = suite.checks();
    if suite == Suite::Identities {
        candidates.extend(identities::sanity_checks());
    }
    let spec = candidates
        .into_iter()
        .find(|s| s.id == witness.check)
        .ok_or_else(|| crate::Error::InvalidInput(format!("unknown check {:?}", witness.check)))?;
    if witness.index >= (spec.instances)(&witness.config) {
        return invalid(format!(
            "instance {} out of range for {}",
            witness.index, spec.id
        ));
    }
    let result = run_check(suite, &witness.config, &spec, witness.index);
    if result.seed != witness.seed {
        return invalid("witness seed does not match its configuration");
    }
    Ok(result)
}
