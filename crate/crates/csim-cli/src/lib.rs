//! Command-line front end for the CSIM search engine: single solves with
//! partial inputs, benchmark sweeps over types and strategies, and a
//! regression check of the solver against the known-values table.

pub mod commands;
pub mod table;
