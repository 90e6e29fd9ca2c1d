//! The poset `N(G)_x` of Newton strata in an Iwahori double coset, with
//! codimensions, closed-stratum descriptions and explicit witnesses.

mod poset;
mod predicate;
mod table;
mod witness;

pub use poset::{
    adlv_nonempty, ambient_interval, codim, codim_roottheoretic, conjecture_rhs, enumerate_ng,
    generic_slope, height, is_exceptional, materialize, poset_of, segment_length, Poset,
    SlopeSource, StrataPoset, EXCEPTION_MIN_N,
};
pub use predicate::{predicate_for, stratum_predicate, Case, StratumPredicate};
pub use table::{lower_corner, table_entry, uncorrected_table_entry, Shape, TableEntry};
pub use witness::{witness, witness_prec, witness_with, Witness, DEFAULT_P};
