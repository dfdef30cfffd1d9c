//! File formats, job plumbing, and report rendering for the `trfca` binary.

pub mod formats;
pub mod pipeline;
pub mod report;
