//! The decoder interface shared by the ADMM and message-passing decoders.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::admm::{self, L2BoxParams, PenalizedParams};
use crate::code::{BinaryWord, ParityCheckMatrix};
use crate::error::{Error, Result};
use crate::mp::{self, MpParams, MpVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIters,
    EarlyCodeword,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
            Termination::EarlyCodeword => "early_codeword",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub word: BinaryWord,
    pub is_valid_codeword: bool,
    pub iterations: usize,
    pub termination: Termination,
    /// Seconds spent inside the decoder.
    pub wall_time: f64,
    /// `gamma . x` at exit (for message passing, evaluated on the hard decision).
    pub objective: f64,
}

/// Decoder identifiers as spelled on the command line and in result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    L2box,
    Penalized,
    Bp,
    Minsum,
    Normminsum,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 5] =
        [Self::L2box, Self::Penalized, Self::Bp, Self::Minsum, Self::Normminsum];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::L2box => "l2box",
            Self::Penalized => "penalized",
            Self::Bp => "bp",
            Self::Minsum => "minsum",
            Self::Normminsum => "normminsum",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownDecoder(s.to_string()))
    }
}

/// A decoder together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decoder", content = "params", rename_all = "lowercase")]
pub enum DecoderConfig {
    L2box(L2BoxParams),
    Penalized(PenalizedParams),
    Mp(MpParams),
}

impl DecoderConfig {
    /// Default parameters for `kind`.
    pub fn default_for(kind: DecoderKind) -> Self {
        match kind {
            DecoderKind::L2box => Self::L2box(L2BoxParams::default()),
            DecoderKind::Penalized => Self::Penalized(PenalizedParams::default()),
            DecoderKind::Bp => Self::Mp(MpParams::new(MpVariant::SumProduct)),
            DecoderKind::Minsum => Self::Mp(MpParams::new(MpVariant::MinSum)),
            DecoderKind::Normminsum => Self::Mp(MpParams::new(MpVariant::NormalizedMinSum)),
        }
    }

    pub fn kind(&self) -> DecoderKind {
        match self {
            Self::L2box(_) => DecoderKind::L2box,
            Self::Penalized(_) => DecoderKind::Penalized,
            Self::Mp(p) => match p.variant {
                MpVariant::SumProduct => DecoderKind::Bp,
                MpVariant::MinSum => DecoderKind::Minsum,
                MpVariant::NormalizedMinSum => DecoderKind::Normminsum,
            },
        }
    }

    /// Checks the parameters against `h` without decoding anything.
    pub fn validate(&self, h: &ParityCheckMatrix) -> Result<()> {
        match self {
            Self::L2box(p) => p.validate(),
            Self::Penalized(p) => p.validate(h),
            Self::Mp(p) => p.validate(),
        }
    }

    pub fn decode(&self, h: &ParityCheckMatrix, gamma: &[f64]) -> Result<DecodeResult> {
        match self {
            Self::L2box(p) => admm::l2box_decode(h, gamma, p, None),
            Self::Penalized(p) => admm::penalized_decode(h, gamma, p),
            Self::Mp(p) => mp::mp_decode(h, gamma, p),
        }
    }
}

pub(crate) fn check_inputs(h: &ParityCheckMatrix, gamma: &[f64]) -> Result<()> {
    if gamma.len() != h.n_vars() {
        return Err(Error::LengthMismatch { expected: h.n_vars(), got: gamma.len() });
    }
    if let Some(i) = gamma.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFiniteLlr(i));
    }
    Ok(())
}

/// Threshold at 1/2; ties go to 0.
pub fn round_to_word(x: &[f64]) -> BinaryWord {
    BinaryWord::from_bools(x.iter().map(|&v| v > 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_to_word(&[0.9, 0.2]).bits(), &[1, 0]);
        assert_eq!(round_to_word(&[0.5]).bits(), &[0]);
        assert_eq!(round_to_word(&[1.0, 0.0, 1.0]).bits(), &[1, 0, 1]);
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in DecoderKind::ALL {
            assert_eq!(k.as_str().parse::<DecoderKind>().unwrap(), k);
            assert_eq!(DecoderConfig::default_for(k).kind(), k);
        }
        assert!(matches!("ldpc".parse::<DecoderKind>(), Err(Error::UnknownDecoder(_))));
    }
}
