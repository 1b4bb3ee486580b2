//! Library half of the `sybilvote` binary: the election file format and
//! the command bodies, separated from arg parsing so tests can drive them
//! directly.

pub mod commands;
pub mod election;
