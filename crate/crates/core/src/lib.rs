//! Single-room building simulation: IDF editing, schedule compilation,
//! weather and ESO I/O, simulation engines, orchestration and a REST API.

#![recursion_limit = "256"]

pub mod api;
pub mod cli;
pub mod engine;
pub mod eso;
pub mod idf;
pub mod orchestrator;
pub mod room;
pub mod schedule;
pub mod weather;
