pub mod api;
pub mod bundled;
pub mod cli;
pub mod dataset;
pub mod kpi;
pub mod olap;
pub mod report;
pub mod stats;
pub mod store;
pub mod workspace;

mod serde_float;
