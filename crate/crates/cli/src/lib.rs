//! Library side of the experiment CLI: config handling, batch execution,
//! CSV/SVG emission, and trajectory analysis.

pub mod batch;
pub mod config;
pub mod csvio;
pub mod report;
pub mod svg;
