//! File formats, LP backends, benchmark harness and CLI support for
//! `coalition-core`.

pub mod backend;
pub mod bench;
pub mod error;
pub mod io;
pub mod lpdump;
pub mod metrics;
pub mod plot;

pub use error::{Error, Result};
