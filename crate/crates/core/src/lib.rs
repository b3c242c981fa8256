//! Multivariate multicycle (MM) CSS codes built from Koszul complexes over
//! binary quotient rings `F2[x1..xD] / <xi^li - 1>`.
//!
//! The pipeline is: parse generator polynomials ([`ring`]), turn them into
//! circulant blocks ([`circulant`]), assemble the Koszul boundary maps and
//! read off the checks and metachecks ([`koszul`]), then measure the code
//! ([`params`]) or search for new ones ([`search`]).
//!
//! Heavy enumeration runs on rayon when the default `parallel` feature is
//! enabled and falls back to sequential loops otherwise.

pub mod circulant;
pub mod error;
pub mod gf2;
pub mod io;
pub mod koszul;
pub mod par;
pub mod params;
pub mod ring;
pub mod search;

pub use circulant::{circulant_commute_check, poly_to_circulant};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVec, RrefCache};
pub use io::{read_alist, read_mtx, write_alist, write_mtx};
pub use koszul::{extract_mcss, instantiate, symbolic_boundaries, verify_complex, MCssCode, Provenance};
pub use params::{
    analyze, check_weight_stats, confinement_profile, distance_exhaustive, distance_randomized, logical_count,
    single_shot_distance, AnalysisOptions, Budget, CodeReport, ConfinementMode, ConfinementProfile, DistanceBound,
    PauliType, RandomizedOptions,
};
pub use ring::{parse_poly, parse_poly_with, GroupSpec, RingElem, Variables};
pub use search::{evaluate_candidate, run_search, sample_generators, SearchConfig};
