//! Batch front end for the treeshift library: parse tree-spec files or
//! invoke the built-in generators, classify, cross-check against the matrix
//! oracle, and emit JSON, text, or DOT output.

pub mod report;
pub mod run;
pub mod spec_format;
