use serde::{Deserialize, Serialize};

use crate::MARGIN_TOL;

/// Outcome of evaluating an uncertainty relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Satisfied,
    Violated,
    /// The lower bound is vacuous in this regime (for example negative where
    /// the left-hand side is nonnegative by construction).
    TriviallySatisfied,
}

/// Identifies which relation a [`UrReport`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UrKind {
    Heisenberg,
    Linear,
    Schrodinger,
    BonaFide,
    DetCov,
    Shannon,
    Renyi,
    EntropyVariance,
    CgEntropic,
    CgEntropicBialy,
    CgVariance,
    CgK,
    WitnessVariance,
    WitnessVarianceNaive,
    WitnessEntropy,
}

impl std::fmt::Display for UrKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_string(self).map_err(|_| std::fmt::Error)?;
        write!(f, "{}", s.trim_matches('"'))
    }
}

/// Evaluated uncertainty relation: left-hand side, lower bound, and verdict.
///
/// `margin = lhs - bound`; the verdict is `Violated` only when the margin is
/// below `-`[`MARGIN_TOL`]. Annotations carry qualifications such as
/// unfaithful coverage or which theorem authorizes the bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UrReport {
    pub kind: UrKind,
    pub lhs: f64,
    pub bound: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub annotations: Vec<String>,
}

impl UrReport {
    /// Builds a report from the two sides, assigning the verdict from the
    /// sign of the margin at tolerance [`MARGIN_TOL`].
    pub fn evaluate(kind: UrKind, lhs: f64, bound: f64) -> Self {
        let margin = lhs - bound;
        let verdict = if margin >= -MARGIN_TOL {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        };
        UrReport {
            kind,
            lhs,
            bound,
            margin,
            verdict,
            annotations: Vec::new(),
        }
    }

    pub fn with_annotation(mut self, note: impl Into<String>) -> Self {
        self.annotations.push(note.into());
        self
    }

    /// Marks the relation as vacuously satisfied while keeping lhs/bound.
    pub fn trivially_satisfied(mut self) -> Self {
        self.verdict = Verdict::TriviallySatisfied;
        self
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    /// Serializes to a single JSON line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_tracks_margin_sign() {
        let r = UrReport::evaluate(UrKind::Heisenberg, 1.0, 0.25);
        assert_eq!(r.verdict, Verdict::Satisfied);
        let r = UrReport::evaluate(UrKind::Heisenberg, 0.2, 0.25);
        assert_eq!(r.verdict, Verdict::Violated);
        // within tolerance of zero counts as satisfied
        let r = UrReport::evaluate(UrKind::Heisenberg, 0.25 - 1e-12, 0.25);
        assert_eq!(r.verdict, Verdict::Satisfied);
    }

    #[test]
    fn json_line_round_trips() {
        let r = UrReport::evaluate(UrKind::CgEntropic, 2.0, 1.0).with_annotation("cco");
        let line = r.to_json_line();
        let back: UrReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back.kind, UrKind::CgEntropic);
        assert_eq!(back.annotations, vec!["cco".to_string()]);
    }
}
