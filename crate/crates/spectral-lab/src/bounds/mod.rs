//! Lempert-function bound engines: spectral lower bounds, disc-search and
//! transfer upper bounds, and sandwich reports with per-bound provenance.

pub mod bharali;
pub mod disc;
pub mod report;
pub mod search;

pub use bharali::{bharali_lower, bharali_lower_with_hints};
pub use disc::AnalyticDisc;
pub use report::{
    lift_upper_cyclic, lift_upper_cyclic_with_hints, sandwich_report, sandwich_report_with_hints,
    BoundEntry, BoundKind, BoundReport, BoundSpace, DiscWitness, Verdict,
};
pub use search::disc_search_upper;
