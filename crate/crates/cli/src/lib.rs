//! Experiment driver around `devlab-core`: problem configs with an
//! arithmetic formula language, approximation/dual recipes, and
//! deterministic JSON/CSV reports.

pub mod commands;
pub mod config;
pub mod expr;
pub mod recipes;
pub mod report;
