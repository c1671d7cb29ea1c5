//! Linear-programming machinery: a generic sparse model, one solver facade
//! for the whole crate, CPLEX-LP export, the two ratio-bound LP families, and
//! exact rational verification of dual certificates.

pub mod bounds;
pub mod certify;
pub mod export;
pub mod interval;
pub mod model;

pub use bounds::{
    bound_from_primal, build_mrr_dual, build_mrr_lp, build_sampling_dual, build_sampling_lp,
    compute_delta_terms, MrrLpConfig, SamplingLpConfig,
};
pub use certify::{
    rationalize_mrr_certificate, rationalize_sampling_certificate, verify_certificate,
    verify_mrr_certificate, verify_sampling_certificate, DualCertificate, MrrCertConfig,
    MrrCertificate, SamplingCertConfig, SamplingCertificate, Verdict, DEFAULT_SAFETY,
};
pub use export::write_lp;
pub use model::{LpModel, LpSolution, Relation, Sense};
