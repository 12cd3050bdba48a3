//! Social-influence measurement library over retweet cascades.
//!
//! The pipeline goes: repost events → influence graph → Louvain communities,
//! chain records → cascades with interpolated timestamps, then labeled
//! adoption instances with a twelve-column feature vector per instance
//! (neighborhood, structural diversity, influence locality, cascade,
//! temporal and metadata measures). On top of that sit from-scratch
//! classifiers with a 70:30 + 10-fold evaluation protocol and three
//! experiment drivers: binned adoption probability, measurement-group
//! comparison and a negative:positive imbalance sweep. A synthetic
//! generator with planted communities and a configurable adoption model
//! makes every experiment runnable without the original microblog corpus.

pub mod cascade;
pub mod community;
pub mod config;
pub mod error;
pub mod experiments;
pub mod features;
pub mod graph;
pub mod learners;
pub mod pipeline;
pub mod sampling;
pub mod seeding;

pub use error::{Error, Result};
