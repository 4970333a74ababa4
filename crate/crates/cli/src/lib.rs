//! Library surface behind the `entcert` binary, exposed so integration tests
//! can drive the pipeline in-process.

pub mod commands;
pub mod error;
pub mod io;
pub mod policy;
