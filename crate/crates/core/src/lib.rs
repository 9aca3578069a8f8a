pub mod cli;
pub mod corpus;
pub mod dedup;
pub mod filters;
pub mod fraction;
pub mod pipeline;
pub mod report;
pub mod service;
pub mod spectroscopy;
pub mod synthetic;
