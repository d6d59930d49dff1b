//! Command-line front end for `ccc4-core`.
//!
//! Every command writes machine-readable output (JSON, CSV, or a fixed-order
//! table) and reports its outcome through the exit code:
//!
//! | code | meaning                                            |
//! |------|----------------------------------------------------|
//! | 0    | success                                            |
//! | 1    | a check failed, or the inverse problem is infeasible |
//! | 2    | the solver did not converge                        |
//! | 3    | distinct converged endpoints (uniqueness alarm)    |
//! | 64   | malformed arguments                                |
//! | 66   | unreadable or invalid input file                   |
//! | 73   | output file cannot be written                      |

pub mod app;
pub mod cert;
pub mod identities;
pub mod scan;

pub use app::run;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_ALARM: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_CANT_CREATE: i32 = 73;
