//! Machine checks of the structural results: facet censuses, comparisons between
//! parameter choices, local convex hulls, closure identities, the closure chain,
//! LP bounds and an exact solver.

mod census;
mod chain;
mod closure;
mod compare;
mod hull;
mod solve;
mod suite;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use census::{census_report, facet_census, facet_predicate, FacetCensus, RowCensus};
pub use chain::{chain_witness, clique_lhs, verify_chain, ChainStep, ChainWitness};
pub use closure::{intersect_x_systems, verify_closure, ClosureKind};
pub use compare::{
    compare_pair, dl_antisymmetric_report, facet_interior_d, mtz_facet_pair_report, mtz_rigidity_report,
    mtz_strict_improvement, mtz_strict_report, scf_incomparability_report, Comparison, Relation,
};
pub use hull::{hull_systems, verify_local_hull, HullFamily};
pub use solve::{
    cutting_plane_bound, known_inclusions, lp_bound, lp_bound_table, solve_atsp, BoundRow, BoundTable, SolveResult,
    Strategy,
};
pub use suite::{
    census_params, hull_pairs, hull_report, projection_report, run_suite, solver_report, validity_report, SuiteOptions,
};

use crate::error::Result;
use crate::formulations::{x_names, BuildOptions, FormulationId};
use crate::graph::ArcSpace;
use crate::lp::{includes, Inclusion, LinSys};
use crate::point::XPoint;
use crate::projection::membership;
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Verified => "verified",
            Verdict::Refuted => "refuted",
            Verdict::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A point together with formulations that must contain it and formulations that
/// must not. Formulations are stored as JSON so the witness can be re-checked from a
/// serialized report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointWitness {
    pub label: String,
    pub x: Value,
    pub inside: Vec<Value>,
    pub outside: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub id: String,
    pub n: usize,
    pub params: Vec<Value>,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub checks: Vec<Check>,
    pub witnesses: Vec<PointWitness>,
    pub notes: Vec<String>,
    pub runtime_ms: u64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl PropositionReport {
    pub fn new(id: &str, n: usize) -> Self {
        PropositionReport {
            id: id.to_string(),
            n,
            params: Vec::new(),
            verdict: Verdict::Skipped,
            reason: None,
            checks: Vec::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
            runtime_ms: 0,
            started: Some(Instant::now()),
        }
    }

    pub fn param(&mut self, v: Value) {
        self.params.push(v);
    }

    /// Records a sub-check and returns its outcome.
    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn witness(
        &mut self,
        label: impl Into<String>,
        x: &XPoint,
        inside: &[&FormulationId],
        outside: &[&FormulationId],
    ) {
        self.witnesses.push(PointWitness {
            label: label.into(),
            x: x.to_json(),
            inside: inside.iter().map(|f| f.to_json()).collect(),
            outside: outside.iter().map(|f| f.to_json()).collect(),
        });
    }

    /// Sets the verdict from the recorded checks: verified iff there is at least one
    /// check and all passed.
    pub fn finish(mut self) -> Self {
        if let Some(t) = self.started.take() {
            self.runtime_ms = t.elapsed().as_millis() as u64;
        }
        if self.verdict == Verdict::Skipped && self.reason.is_some() {
            return self;
        }
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        if self.checks.is_empty() {
            self.verdict = Verdict::Skipped;
            self.reason.get_or_insert_with(|| "no checks ran".into());
        } else if failed.is_empty() {
            self.verdict = Verdict::Verified;
        } else {
            self.verdict = Verdict::Refuted;
            self.reason = Some(format!("failed: {}", failed.join(", ")));
        }
        self
    }

    pub fn skip(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Skipped;
        self.reason = Some(reason.into());
        self.finish()
    }

    pub fn verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }

    /// Re-evaluates every point witness by exact membership; `Ok(false)` names no
    /// culprit, use [`Self::recheck_details`] for that.
    pub fn recheck(&self) -> Result<bool> {
        Ok(self.recheck_details()?.is_empty())
    }

    pub fn recheck_details(&self) -> Result<Vec<String>> {
        if self.witnesses.is_empty() {
            return Ok(Vec::new());
        }
        let space = ArcSpace::new(self.n)?;
        let opts = BuildOptions::pruned();
        let mut bad = Vec::new();
        for w in &self.witnesses {
            let x = XPoint::from_json(&w.x, &space)?;
            for (list, want) in [(&w.inside, true), (&w.outside, false)] {
                for f in list {
                    let id = FormulationId::from_json(f, &space)?;
                    if membership(&id, &x, &opts)?.member != want {
                        bad.push(format!("{}: {} {}", w.label, if want { "not in" } else { "in" }, id));
                    }
                }
            }
        }
        Ok(bad)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| crate::error::Error::arg(format!("malformed report: {e}")))
    }

    /// One table line: id, n, verdict, passed/total checks, runtime.
    pub fn summary_line(&self) -> String {
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let mut s = format!(
            "{:<28} n={:<2} {:<9} {:>3}/{:<3} checks {:>7} ms",
            self.id,
            self.n,
            self.verdict,
            passed,
            self.checks.len(),
            self.runtime_ms
        );
        if let Some(r) = &self.reason {
            s.push_str(&format!("  ({r})"));
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = self.summary_line();
        s.push('\n');
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            s.push_str(&format!("  [{mark}] {}: {}\n", c.name, c.detail));
        }
        for n in &self.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
        s
    }
}

/// Both inclusions between the `x`-projections of two systems.
pub fn mutual_inclusion(a: &LinSys, b: &LinSys, space: &ArcSpace) -> Result<(Inclusion, Inclusion)> {
    let vars = x_names(space);
    Ok((includes(a, b, &vars)?, includes(b, a, &vars)?))
}

/// Equality of `x`-projections, with a short explanation when they differ.
pub fn same_projection(a: &LinSys, b: &LinSys, space: &ArcSpace) -> Result<(bool, String)> {
    let (ab, ba) = mutual_inclusion(a, b, space)?;
    Ok(match (&ab, &ba) {
        (Inclusion::Included { .. }, Inclusion::Included { .. }) => (true, "mutual inclusion".into()),
        (Inclusion::NotIncluded { row, .. }, _) => (false, format!("first not inside second: row {}", row.tag)),
        (_, Inclusion::NotIncluded { row, .. }) => (false, format!("second not inside first: row {}", row.tag)),
    })
}

/// The `x` part of a named point.
pub fn x_point(space: &ArcSpace, named: &BTreeMap<String, Rat>) -> Result<XPoint> {
    let vals = x_names(space)
        .iter()
        .map(|k| named.get(k).cloned().unwrap_or_default())
        .collect();
    XPoint::from_values(space, vals)
}
