//! Independent oracles and randomized verification suites.

mod bruteforce;
mod suite;

pub use bruteforce::{
    curvature_direct, d_scalar_bruteforce, fn_extract, insert_bruteforce, jacobi_sum,
    nijenhuis_classical, r_extended_bruteforce,
};
pub use suite::{
    run_suite, Check, Status, SuiteConfig, SuiteInstance, SuiteName, VerificationReport, Witness,
};
