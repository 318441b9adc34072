//! Week-ahead road congestion forecasting.
//!
//! `jamcast` predicts a road segment's jam factor (a congestion score on
//! `[0, 10]`) from time of day, day of week and weather using an epsilon-SVR
//! with an RBF kernel, and benchmarks it against an adaptive moving-window
//! regression baseline.
//!
//! | module | contents |
//! |---|---|
//! | [`featureset`] | observation schema, cyclic encoding, standardization |
//! | [`svr`] | RBF kernel, SMO solver, model file format |
//! | [`amwr`] | Lomb-Scargle periodogram and the adaptive moving-window baseline |
//! | [`pipeline`] | week split, per-road training and week-ahead forecasting, grid search |
//! | [`evaluation`] | RMSE, per-road reports, method comparison, naive baselines |
//! | [`ingestion`] | provider payloads, polling, CSV storage, synthetic data |
//! | [`plot`] | SVG line and bar charts |
//! | [`cli`] | the `synth`, `experiment` and `collect` commands |

pub mod error;
pub mod featureset;
pub mod svr;
pub mod amwr;
pub mod ingestion;
pub mod pipeline;
pub mod evaluation;
pub mod plot;
pub mod cli;

pub use error::{Error, Result};
