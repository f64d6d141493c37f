//! Splice unknotting numbers of knot projections and crosscap numbers of
//! alternating knots.
//!
//! Projections are 4-valent maps on the sphere ([`CurveMap`]) built from
//! signed Gauss codes. [`u_minus`] computes the minimum number of S- splices
//! needed to reach the simple closed curve, [`u_upper`] bounds the variant
//! that also allows S+ and RI+ moves, and [`crosscap_alt`] runs the
//! minimal-genus state branching for the alternating knot on a projection.

pub mod curvemap;
pub mod error;
pub mod families;
pub mod pipeline;
pub mod search;
pub mod splice;
pub mod surfaces;

pub use curvemap::{
    parse_record, CanonicalKey, CurveMap, DartRef, Face, FaceReport, Pairing, Sign,
    SignedGaussCode,
};
pub use error::{Error, Result};
pub use families::{
    classify, connected_sum, connected_sum_default, decompose_prime, gen_family, match_family,
    pretzel_columns, ClassLabel, FamilySpec,
};
pub use pipeline::{
    emit_report, ingest_external, ingest_table, parse_external, parse_table, verify_observation,
    ExternalCrosscapRow, ReportRow, Summary, TableEntry,
};
pub use search::{
    enumerate_descents, reduce_ri, u_minus, u_upper, verify_witness, DescentSolver, SearchBudget,
    Step, UResult, UStatus, Witness, WitnessCheck,
};
pub use splice::{
    apply_state, is_seifert_state, ri_plus, s_plus, seifert_genus, smooth, state_chi,
    twist_move, Side, SmoothingChoice, SpliceKind, State, TwistVariant,
};
pub use surfaces::{
    ak_min_genus, check_upper_bound, crosscap_alt, equality_report, sigma_from_witness,
    AKResult, EqualityReport, PartialState,
};
