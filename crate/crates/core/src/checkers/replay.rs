use std::sync::Arc;

use super::report::Witness;
use super::suites::{
    additivity_instance, limit_instance, nonnegativity_instance, regularity_instance,
    simple_instance, subadditivity_instance, Approach, Outcome,
};
use crate::error::{Error, Result};
use crate::measures::Fun;
use crate::variations::{VariationConfig, VariationFn, VariationKind};

/// Re-run a single check on a witness. True when the violation reproduces with exactly the
/// recorded values.
pub fn replay_witness(check: &str, f: &Fun, w: &Witness, depth: u32, cfg: &VariationConfig) -> Result<bool> {
    let r = &w.regions;
    let need = |n: usize| {
        if r.len() < n {
            Err(Error::Precondition(format!("witness for {check} needs {n} regions")))
        } else {
            Ok(())
        }
    };
    let outcome = match check {
        "additivity_compacts" | "additivity_open" | "tm1" | "additivity_equivalence" => {
            need(2)?;
            additivity_instance(f, r)?
        }
        "nonnegativity" => {
            need(1)?;
            nonnegativity_instance(f, &r[0])?
        }
        "simple" => {
            need(1)?;
            simple_instance(f, &r[0])?
        }
        "regularity" => {
            need(1)?;
            regularity_instance(f, &r[0], depth)?
        }
        "tau_smooth" | "solid_limits" => {
            need(3)?;
            let approach = if r[0].is_open() { Approach::Below } else { Approach::Above };
            let tail = vec![(depth.saturating_sub(1), r[1].clone()), (depth, r[2].clone())];
            limit_instance(f, &r[0], &tail, approach)?
        }
        "subadditivity" => {
            need(2)?;
            subadditivity_instance(f, &r[0], &r[1])?
        }
        "subadditivity_plus" | "subadditivity_minus" => {
            need(2)?;
            let kind =
                if check.ends_with("plus") { VariationKind::Plus } else { VariationKind::Minus };
            let var: Fun = Arc::new(VariationFn::new(f.clone(), kind, cfg.clone()));
            subadditivity_instance(&var, &r[0], &r[1])?
        }
        _ => return Err(Error::Precondition(format!("no replay rule for check `{check}`"))),
    };
    Ok(match outcome {
        Outcome::Violation(found) => found.values == w.values,
        _ => false,
    })
}
