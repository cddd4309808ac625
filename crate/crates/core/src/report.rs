//! Verdicts and counterexample witnesses shared by every checker.

use serde::Serialize;

use crate::logic::{BeliefSet, InputSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Every evaluated instance held, but some instances needed sets
    /// outside the bounded universe and were skipped.
    PassWithSkips,
    Fail,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        !matches!(self, Verdict::Fail)
    }
}

/// A concrete failing instance: the input sets in the order the postulate
/// quantifies them and the outcomes it looked at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub inputs: Vec<InputSet>,
    pub outcomes: Vec<BeliefSet>,
}

impl Witness {
    pub fn new(inputs: Vec<InputSet>, outcomes: Vec<BeliefSet>) -> Self {
        Witness { inputs, outcomes }
    }

    pub fn inputs(inputs: Vec<InputSet>) -> Self {
        Witness {
            inputs,
            outcomes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PostulateReport<P> {
    pub postulate: P,
    pub verdict: Verdict,
    pub instances: u64,
    pub skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl<P> PostulateReport<P> {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Running count of instances while a quantified formula is evaluated.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    instances: u64,
    skipped: u64,
    witness: Option<Witness>,
}

impl Tally {
    /// Record an instance; returns false once a counterexample is stored.
    pub(crate) fn check(&mut self, holds: bool, witness: impl FnOnce() -> Witness) -> bool {
        self.instances += 1;
        if !holds && self.witness.is_none() {
            self.witness = Some(witness());
        }
        self.witness.is_none()
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    pub(crate) fn finish<P>(self, postulate: P) -> PostulateReport<P> {
        let verdict = match (&self.witness, self.skipped) {
            (Some(_), _) => Verdict::Fail,
            (None, 0) => Verdict::Pass,
            (None, _) => Verdict::PassWithSkips,
        };
        PostulateReport {
            postulate,
            verdict,
            instances: self.instances,
            skipped: self.skipped,
            witness: self.witness,
        }
    }
}

/// Outcome of checking one implication between postulates on a single
/// operator or relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImplicationStatus {
    Confirmed,
    /// The antecedent postulates do not all hold.
    NotApplicable,
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplicationCheck {
    pub name: &'static str,
    pub status: ImplicationStatus,
}

impl ImplicationCheck {
    /// `antecedent ⇒ consequent`
    pub(crate) fn implication(name: &'static str, antecedent: bool, consequent: bool) -> Self {
        let status = match (antecedent, consequent) {
            (false, _) => ImplicationStatus::NotApplicable,
            (true, true) => ImplicationStatus::Confirmed,
            (true, false) => ImplicationStatus::Violated,
        };
        ImplicationCheck { name, status }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplicationReport {
    pub items: Vec<ImplicationCheck>,
}

impl ImplicationReport {
    pub fn violations(&self) -> impl Iterator<Item = &ImplicationCheck> {
        self.items
            .iter()
            .filter(|c| c.status == ImplicationStatus::Violated)
    }

    pub fn all_hold(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn status(&self, name: &str) -> Option<ImplicationStatus> {
        self.items.iter().find(|c| c.name == name).map(|c| c.status)
    }
}
