//! Truncated Fock-space representations of eta-canonical (anti)commutation
//! relations over Krein triplets.
//!
//! Given a finite-dimensional Hilbert space with a selfadjoint unitary
//! metric `eta`, the crate builds the Bose/Fermi Fock spaces truncated at a
//! total particle number, realizes the smeared annihilators `a(f)` together
//! with their two adjoints (`a*(f)` for the positive-definite inner product
//! and `a†(f) = a*(eta f)` for the indefinite form `(v|w) = <v|Gamma(eta)w>`),
//! and numerically certifies the algebra these operators satisfy:
//!
//! * `a(f) a†(g) -+ a†(g) a(f) = <f|eta g> I` (eta-CCR / eta-CAR),
//! * the adjoint pairing `(a†(f) v|w) = (v|a(f) w)`,
//! * vacuum annihilation and cyclicity of the vacuum,
//! * the involution swap `x† = Gamma(eta) x* Gamma(eta)*`,
//! * `P± Gamma(eta) = Gamma(eta) P±` and the Krein structure of the
//!   truncated spaces.
//!
//! The [`models`] module ships ready-made configurations (abnormal
//! relations, paired and interleaved metrics, the Feynman-gauge metric, a
//! 2x2 BRS representation, a discretized two-field model), and [`suite`]
//! turns any configuration into a structured verification report.

pub mod field;
pub mod fock;
pub mod krein;
pub mod linalg;
pub mod models;
pub mod suite;

pub use field::{
    annihilator_full, anticommutator, check_adjoint_pairing, check_cyclicity, check_eta_car,
    check_eta_ccr, check_relations, check_vacuum, commutator, compressed_field, creator_full,
    dagger, default_probes, direct_bose, direct_fermi, vacuum_residual, CyclicityCheck, FieldError,
    FieldOperatorPair, FockRep, PairingCheck, Probe, ProbeResult, RelationCheck, RelationKind,
};
pub use fock::{
    antisymmetrizer, check_projection_commutation, embed_symmetric, enumerate_basis,
    fock_projection, second_quantization, symmetrizer, FockError, GradedOperator, SectorBasis,
    Statistics, DEFAULT_BASIS_CAP,
};
pub use krein::{
    fundamental_decomposition, gram_matrix, validate_metric, FundamentalDecomposition, KreinError,
    KreinTriplet, MetricResiduals, DEFAULT_METRIC_TOL,
};
