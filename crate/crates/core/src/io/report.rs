//! Versioned JSON reports.
//!
//! Two documents exist: a `ReconstructionReport` (one row of reconstructed
//! kinematics per processed recording) and a `ComparisonReport` (paired
//! headband/reference peaks with agreement statistics, overall and grouped by
//! impact location). Aggregates are always recomputed from the per-impact
//! rows on construction, so a report is self-consistent by definition.
//! serde_json emits shortest round-trip decimals, so write-then-read
//! reproduces all numerics exactly.

use crate::error::{Error, Result};
use crate::filtering::FilterDecision;
use crate::fusion::ImpactLocation;
use crate::metrics::{
    bland_altman, ccc, nrmse, pearson_r, BlandAltman, CoraRating, PairedPeaks,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Version tag written into every report document.
pub const SCHEMA_VERSION: u32 = 1;

/// One reconstructed recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedImpact {
    pub label: String,
    pub source: String,
    pub location: ImpactLocation,
    pub prv: f64,
    pub pra: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pla: Option<f64>,
    pub decision: FilterDecision,
}

/// Output of the `reconstruct` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub schema_version: u32,
    pub impacts: Vec<ReconstructedImpact>,
}

impl ReconstructionReport {
    pub fn new(impacts: Vec<ReconstructedImpact>) -> Self {
        Self { schema_version: SCHEMA_VERSION, impacts }
    }
}

/// One headband-vs-reference pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactComparison {
    pub label: String,
    pub location: ImpactLocation,
    pub prv_headband: f64,
    pub prv_reference: f64,
    pub pra_headband: f64,
    pub pra_reference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<FilterDecision>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cora: Option<CoraRating>,
}

/// Agreement statistics for one peak quantity over a set of impacts.
///
/// Correlation fields are absent when undefined (fewer than two impacts or
/// zero variance); the normalized errors are absent when the reference peaks
/// cannot normalize them (zero or negative values).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ccc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nrmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bland_altman: Option<BlandAltman>,
}

impl StatBlock {
    fn compute(reference: Vec<f64>, candidate: Vec<f64>) -> Self {
        let Ok(pairs) = PairedPeaks::new(reference, candidate) else {
            return Self { r: None, ccc: None, nrmse: None, bland_altman: None };
        };
        Self {
            r: pearson_r(&pairs).ok(),
            ccc: ccc(&pairs).ok(),
            nrmse: nrmse(&pairs).ok(),
            bland_altman: bland_altman(&pairs).ok(),
        }
    }
}

/// Statistics over one group of impacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub n: usize,
    pub prv: StatBlock,
    pub pra: StatBlock,
}

impl AggregateStats {
    fn compute(rows: &[&ImpactComparison]) -> Self {
        Self {
            n: rows.len(),
            prv: StatBlock::compute(
                rows.iter().map(|r| r.prv_reference).collect(),
                rows.iter().map(|r| r.prv_headband).collect(),
            ),
            pra: StatBlock::compute(
                rows.iter().map(|r| r.pra_reference).collect(),
                rows.iter().map(|r| r.pra_headband).collect(),
            ),
        }
    }
}

/// Output of the `evaluate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub impacts: Vec<ImpactComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overall: Option<AggregateStats>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub by_location: BTreeMap<String, AggregateStats>,
}

impl ComparisonReport {
    /// Assemble a report, computing all aggregates from the rows.
    pub fn from_impacts(impacts: Vec<ImpactComparison>) -> Self {
        let overall = if impacts.is_empty() {
            None
        } else {
            Some(AggregateStats::compute(&impacts.iter().collect::<Vec<_>>()))
        };
        let mut by_location: BTreeMap<String, Vec<&ImpactComparison>> = BTreeMap::new();
        for row in &impacts {
            by_location.entry(row.location.to_string()).or_default().push(row);
        }
        let by_location = by_location
            .into_iter()
            .map(|(loc, rows)| (loc, AggregateStats::compute(&rows)))
            .collect();
        Self { schema_version: SCHEMA_VERSION, impacts, overall, by_location }
    }

    /// Aggregates recomputed from the rows, for self-consistency checks.
    pub fn recomputed(&self) -> Self {
        Self::from_impacts(self.impacts.clone())
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Schema(format!("report serialization failed: {e}")))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path.display().to_string(), e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: format!("{}: {e}", path.display()),
    })
}

impl ComparisonReport {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json(self, path.as_ref())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let report: Self = read_json(path.as_ref())?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported report schema version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }
}

impl ReconstructionReport {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json(self, path.as_ref())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let report: Self = read_json(path.as_ref())?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported report schema version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }
}
