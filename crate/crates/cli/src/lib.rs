//! Library half of the command-line harness: curve fitting, sweep
//! orchestration, and output plumbing. The binary in `main.rs` is a thin
//! argument-parsing layer over these modules and the core library.

pub mod fit;
pub mod output;
pub mod svg;
pub mod sweep;
