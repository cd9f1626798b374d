use std::sync::Arc;

use super::{VariationConfig, VariationFn, VariationKind};
use crate::checkers::{
    check_additivity_compacts, check_nonnegativity, check_regularity, CheckReport, ProbeFamily,
    Tally, Witness,
};
use crate::error::Result;
use crate::grid::GridRegion;
use crate::measures::Fun;
use crate::par;
use crate::value::ExtendedValue;

/// Exact Jordan identities `f = f⁺ − f⁻` and `|f| = f⁺ + f⁻` on every probe region.
///
/// Regions where a variation did not stabilize count as inconclusive, never as failures.
pub fn jordan_check(f: &Fun, probe: &ProbeFamily, cfg: &VariationConfig) -> Result<CheckReport> {
    let pre = check_additivity_compacts(f, probe)?;
    if pre.failed() {
        return Ok(CheckReport { check: "jordan".into(), ..pre });
    }
    let vars: Vec<Arc<VariationFn>> = [VariationKind::Plus, VariationKind::Minus, VariationKind::Total]
        .into_iter()
        .map(|k| VariationFn::new(f.clone(), k, cfg.clone()).shared())
        .collect();
    let regions = probe.regions();
    let rows = par::map(&regions, |r| -> Result<(GridRegion, Vec<ExtendedValue>, bool)> {
        let mut values = vec![f.eval(r)?];
        let mut stable = true;
        for v in &vars {
            let (x, s) = v.value_with_flag(r)?;
            values.push(x.into());
            stable &= s;
        }
        Ok((r.clone(), values, stable))
    });
    let mut tally = Tally::new("jordan", cfg.level_cap);
    for row in rows {
        let (r, values, stable) = row?;
        let w = || Witness { regions: vec![r.clone()], values: values.clone() };
        if !stable {
            tally.unsettled(w());
            continue;
        }
        tally.probe();
        let (v, plus, minus, total) = (values[0], values[1], values[2], values[3]);
        if v != plus.checked_sub(minus)? || total != plus.checked_add(minus)? {
            tally.fail(w());
        }
    }
    Ok(tally.finish())
}

/// The deficient-measure suite on `f⁺`, `f⁻` and `|f|`, the bounds `f⁺ ≥ f` and
/// `f⁻ ≥ −f`, and minimality: every candidate `κ ≥ f` on the probes dominates `f⁺`.
pub fn variation_is_dtm_check(
    f: &Fun,
    probe: &ProbeFamily,
    cfg: &VariationConfig,
    candidates: &[Fun],
) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let mut vars = Vec::new();
    for kind in [VariationKind::Plus, VariationKind::Minus, VariationKind::Total] {
        let v: Fun = Arc::new(VariationFn::new(f.clone(), kind, cfg.clone()));
        for mut rep in [
            check_nonnegativity(&v, probe)?,
            check_additivity_compacts(&v, probe)?,
            check_regularity(&v, probe)?,
        ] {
            rep.check = format!("{}_{}", kind.symbol(), rep.check);
            out.push(rep);
        }
        vars.push(v);
    }
    let regions = probe.regions();
    let mut bounds = Tally::new("variation_bounds", cfg.level_cap);
    for r in &regions {
        let v = f.eval(r)?;
        let plus = vars[0].eval(r)?;
        let minus = vars[1].eval(r)?;
        let w = || Witness { regions: vec![r.clone()], values: vec![v, plus, minus] };
        let settled = vars[0].settled(r)? && vars[1].settled(r)?;
        if plus >= v && minus >= -v {
            bounds.probe();
        } else if settled {
            bounds.fail(w());
        } else {
            bounds.unsettled(w());
        }
    }
    out.push(bounds.finish());
    let mut minimal = Tally::new("variation_minimality", cfg.level_cap);
    for kappa in candidates {
        let mut dominates = true;
        for r in &regions {
            dominates &= kappa.eval(r)? >= f.eval(r)?;
        }
        if !dominates {
            continue;
        }
        for r in &regions {
            let k = kappa.eval(r)?;
            let plus = vars[0].eval(r)?;
            if k >= plus {
                minimal.probe();
            } else {
                let w = Witness { regions: vec![r.clone()], values: vec![k, plus] };
                if vars[0].settled(r)? {
                    minimal.fail(w);
                } else {
                    minimal.unsettled(w);
                }
            }
        }
    }
    out.push(minimal.finish());
    Ok(out)
}
