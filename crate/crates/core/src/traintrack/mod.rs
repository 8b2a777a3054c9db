//! Graph self-maps, strata, growth, lamination support and polynomially
//! growing normal forms.

pub mod graph;
pub mod growth;
pub mod lamination;
pub mod upg;
pub mod strata;

pub use graph::{GraphMap, MarkedGraph};
pub use strata::{analyze_strata, check_one_eg, growth_degrees, validate_rtt, GrowthReport, GrowthType, RttReport, Strata, StratumKind};
