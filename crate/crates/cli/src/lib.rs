//! Scenario files, tensor documents and worked examples behind the
//! `dualform` command.

pub mod demos;
pub mod scenario;
pub mod tensor_file;
