use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridRegion;
use crate::measures::Fun;
use crate::value::ExtendedValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Regions and the values that exhibit a violation (or, for inconclusive reports, the
/// probes whose values had not settled).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub regions: Vec<GridRegion>,
    pub values: Vec<ExtendedValue>,
}

impl Witness {
    /// Total stored cells, used to prefer small witnesses.
    pub fn size(&self) -> usize {
        self.regions.iter().map(|r| r.cells().members().len()).sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub probes: u64,
    pub depth: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub stats: Stats,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Most witnesses kept per report.
pub const MAX_WITNESSES: usize = 4;

/// Accumulates probe outcomes for one check.
pub(crate) struct Tally {
    check: String,
    probes: u64,
    depth: u32,
    fails: Vec<Witness>,
    unsettled: Vec<Witness>,
    unsettled_count: u64,
}

impl Tally {
    pub fn new(check: impl Into<String>, depth: u32) -> Self {
        Tally {
            check: check.into(),
            probes: 0,
            depth,
            fails: Vec::new(),
            unsettled: Vec::new(),
            unsettled_count: 0,
        }
    }

    pub fn probe(&mut self) {
        self.probes += 1;
    }

    /// Keep the smallest witnesses seen so far (ties go to the earliest).
    pub fn fail(&mut self, w: Witness) {
        let size = w.size();
        let at = self.fails.partition_point(|f| f.size() <= size);
        if at < MAX_WITNESSES {
            self.fails.insert(at, w);
            self.fails.truncate(MAX_WITNESSES);
        }
    }

    pub fn unsettled(&mut self, w: Witness) {
        self.unsettled_count += 1;
        if self.unsettled.len() < MAX_WITNESSES {
            self.unsettled.push(w);
        }
    }

    pub fn has_fail(&self) -> bool {
        !self.fails.is_empty()
    }

    pub fn finish(self) -> CheckReport {
        let (verdict, witnesses) = if !self.fails.is_empty() {
            (Verdict::Fail, self.fails)
        } else if self.unsettled_count > 0 {
            (Verdict::Inconclusive, self.unsettled)
        } else {
            (Verdict::Pass, Vec::new())
        };
        CheckReport {
            check: self.check,
            verdict,
            witnesses,
            stats: Stats { probes: self.probes, depth: self.depth },
        }
    }
}

/// A value together with whether it is exact. `None` when the function refused to produce
/// a value because its underlying search had not stabilized.
pub(crate) fn sample(f: &Fun, r: &GridRegion) -> Result<Option<(ExtendedValue, bool)>> {
    match f.eval(r) {
        Ok(v) => Ok(Some((v, f.settled(r)?))),
        Err(Error::VariationUnstable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Merge reports deterministically by check name; the worst verdict wins for duplicates.
pub fn merge_reports(mut reports: Vec<CheckReport>) -> Vec<CheckReport> {
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    reports
}

/// Worst verdict over a list of reports (`PASS` when empty).
pub fn overall(reports: &[CheckReport]) -> Verdict {
    reports.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Pass)
}
