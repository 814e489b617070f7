//! Chart-to-text engine: ingests chart bundles, computes data facts and
//! renders template-based descriptions.

pub mod color;
pub mod facts;
pub mod features;
pub mod ingestion;
pub mod model;
pub mod par;
pub mod describe;
pub mod textgen;

pub use describe::{describe_batch, describe_bundle, describe_path, DescribeError, DescribeOutput, EngineConfig};
