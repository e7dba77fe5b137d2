//! Channel-coding workbench for binary LDPC codes.
//!
//! The centrepiece is the l2-box ADMM decoder ([`admm::l2box_decode`]),
//! which replaces the binary constraint of maximum-likelihood decoding by
//! the intersection of the unit box with an l2 sphere and needs no penalty
//! parameter. Penalized ADMM-LP and message-passing decoders serve as
//! baselines, and [`harness`] runs Monte Carlo WER experiments over them.

pub mod admm;
pub mod channel;
pub mod cli;
pub mod code;
pub mod decoder;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod mp;

pub use code::{BinaryWord, GeneratorMatrix, ParityCheckMatrix};
pub use decoder::{DecodeResult, DecoderConfig, DecoderKind, Termination};
pub use error::{Error, Result};
