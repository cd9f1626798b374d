//! Executable axiom suites over probe families, with replayable witnesses.

mod classify;
mod probes;
mod replay;
mod report;
mod suites;

pub use classify::{classify, run_suite, Classification, Suite};
pub use probes::{Labeling, ProbeFamily, EXHAUSTIVE_CELLS, EXHAUSTIVE_LABEL_CELLS};
pub use replay::replay_witness;
pub use report::{merge_reports, overall, CheckReport, Stats, Verdict, Witness, MAX_WITNESSES};
pub use suites::{
    check_additivity_compacts, check_additivity_equivalence, check_nonnegativity,
    check_open_additivity, check_regularity, check_simple, check_small_sets,
    check_solid_limits, check_subadditivity, check_tau_smooth, check_tm1,
};

pub(crate) use report::Tally;
