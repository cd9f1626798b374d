use std::sync::Arc;

use serde::Serialize;

use super::probes::ProbeFamily;
use super::report::{CheckReport, Verdict};
use super::suites::{
    check_additivity_compacts, check_nonnegativity, check_regularity, check_subadditivity,
    check_tm1,
};
use crate::error::Result;
use crate::measures::{Class, Fun};
use crate::variations::{VariationConfig, VariationFn, VariationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Sdtm,
    Stm,
    Dtm,
    Tm,
    Classify,
}

impl std::str::FromStr for Suite {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sdtm" => Suite::Sdtm,
            "stm" => Suite::Stm,
            "dtm" => Suite::Dtm,
            "tm" => Suite::Tm,
            "classify" => Suite::Classify,
            _ => return Err(crate::error::Error::parse("suite", format!("unknown suite `{s}`"))),
        })
    }
}

/// Run the axiom checks of one class. `Classify` runs the full ladder.
pub fn run_suite(suite: Suite, f: &Fun, probe: &ProbeFamily, cfg: &VariationConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Dtm | Suite::Tm) {
        out.push(check_nonnegativity(f, probe)?);
    }
    match suite {
        Suite::Classify => return Ok(classify(f, probe, cfg)?.reports),
        _ => {
            out.push(check_additivity_compacts(f, probe)?);
            out.push(check_regularity(f, probe)?);
        }
    }
    if matches!(suite, Suite::Stm | Suite::Tm) {
        out.push(check_tm1(f, probe)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    /// Strongest class certified on the probes.
    pub class: Class,
    /// Every check run, including the failing ones that exclude stronger classes.
    pub reports: Vec<CheckReport>,
}

impl Classification {
    pub fn report(&self, check: &str) -> Option<&CheckReport> {
        self.reports.iter().find(|r| r.check == check)
    }
}

/// Climb the ladder signed deficient → signed topological → signed measure, reading
/// nonnegative functions as deficient → topological → measure.
pub fn classify(f: &Fun, probe: &ProbeFamily, cfg: &VariationConfig) -> Result<Classification> {
    let nonneg = check_nonnegativity(f, probe)?;
    let additive = check_additivity_compacts(f, probe)?;
    let regular = check_regularity(f, probe)?;
    let positive = nonneg.passed();
    let deficient = additive.passed() && regular.passed();
    let mut reports = vec![nonneg, additive, regular];
    if !deficient {
        return Ok(Classification { class: Class::Unknown, reports });
    }
    let tm1 = check_tm1(f, probe)?;
    let topological = tm1.passed();
    reports.push(tm1);
    if !topological {
        let class = if positive { Class::Dtm } else { Class::Sdtm };
        return Ok(Classification { class, reports });
    }
    let measure_like = if positive {
        let r = check_subadditivity(f, probe, "subadditivity")?;
        let ok = r.passed();
        reports.push(r);
        ok
    } else {
        let mut ok = true;
        for kind in [VariationKind::Plus, VariationKind::Minus] {
            let var: Fun = Arc::new(VariationFn::new(f.clone(), kind, cfg.clone()));
            let r = check_subadditivity(&var, probe, &format!("subadditivity_{}", kind.symbol()))?;
            ok &= r.verdict == Verdict::Pass;
            reports.push(r);
        }
        ok
    };
    let class = match (positive, measure_like) {
        (true, true) => Class::Measure,
        (true, false) => Class::Tm,
        (false, true) => Class::Sm,
        (false, false) => Class::Stm,
    };
    Ok(Classification { class, reports })
}
