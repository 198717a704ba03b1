//! Std side of the query-by-example workbench: corpus and index files,
//! interaction logs, HTTP generator and translation clients, the JSON
//! service, and the batch and export tools behind the `qx` binary.

pub mod batch;
pub mod corpus_io;
pub mod export;
pub mod http_generator;
pub mod http_translator;
pub mod index_store;
pub mod server;
pub mod session_log;
pub mod settings;
pub mod workbench;

use qx_core::Clock;

pub const ENV_GENERATOR_URL: &str = "QX_GENERATOR_URL";
pub const ENV_GENERATOR_KEY: &str = "QX_GENERATOR_KEY";
pub const ENV_LOG_DIR: &str = "QX_LOG_DIR";

/// Wall clock in epoch milliseconds.
#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap_or_default()
            .as_millis() as u64
    }
}
