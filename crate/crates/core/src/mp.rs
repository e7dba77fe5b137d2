//! Flooding-schedule message passing in the LLR domain.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::admm::EdgeLayout;
use crate::code::{satisfies_all_checks, BinaryWord, ParityCheckMatrix};
use crate::decoder::{check_inputs, DecodeResult, Termination};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MpVariant {
    SumProduct,
    MinSum,
    /// Min-sum with check messages scaled by `normalization`.
    NormalizedMinSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpParams {
    pub max_iters: usize,
    pub variant: MpVariant,
    pub normalization: f64,
    pub llr_clip: f64,
}

impl MpParams {
    pub fn new(variant: MpVariant) -> Self {
        Self { max_iters: 60, variant, normalization: 0.75, llr_clip: 30.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        if !(self.normalization > 0.0 && self.normalization <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "normalization must lie in (0, 1], got {}",
                self.normalization
            )));
        }
        if self.llr_clip.is_nan() || self.llr_clip <= 0.0 {
            return Err(Error::InvalidParams(format!("llr_clip must be positive, got {}", self.llr_clip)));
        }
        Ok(())
    }
}

/// Extrinsic check-to-variable messages for one check: `out[k]` combines
/// every input except `inputs[k]`. Results are clipped to `+-clip`.
pub fn check_messages(variant: MpVariant, normalization: f64, clip: f64, inputs: &[f64], out: &mut [f64]) {
    debug_assert_eq!(inputs.len(), out.len());
    match variant {
        MpVariant::SumProduct => {
            // Leave-one-out products of tanh(m/2) via prefix/suffix sweeps.
            let mut acc = 1.0;
            for (o, m) in out.iter_mut().zip(inputs) {
                *o = acc;
                acc *= (m / 2.0).tanh();
            }
            acc = 1.0;
            for (o, m) in out.iter_mut().zip(inputs).rev() {
                let t = (*o * acc).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                *o = (2.0 * t.atanh()).clamp(-clip, clip);
                acc *= (m / 2.0).tanh();
            }
        }
        MpVariant::MinSum | MpVariant::NormalizedMinSum => {
            let scale = if variant == MpVariant::MinSum { 1.0 } else { normalization };
            let (mut min1, mut min2, mut at) = (f64::INFINITY, f64::INFINITY, usize::MAX);
            let mut negative = false;
            for (k, &m) in inputs.iter().enumerate() {
                let a = m.abs();
                negative ^= m < 0.0;
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    at = k;
                } else if a < min2 {
                    min2 = a;
                }
            }
            for (k, (o, &m)) in out.iter_mut().zip(inputs).enumerate() {
                let mag = if k == at { min2 } else { min1 };
                let mag = if mag.is_finite() { mag } else { clip };
                let neg = negative ^ (m < 0.0);
                let v = scale * if neg { -mag } else { mag };
                *o = v.clamp(-clip, clip);
            }
        }
    }
}

pub fn mp_decode(h: &ParityCheckMatrix, gamma: &[f64], params: &MpParams) -> Result<DecodeResult> {
    params.validate()?;
    check_inputs(h, gamma)?;
    let start = Instant::now();
    let layout = EdgeLayout::new(h);
    let clip = params.llr_clip;
    let n_edges = h.n_edges();
    let mut v2c: Vec<f64> = (0..n_edges).map(|e| gamma[layout.var(e)].clamp(-clip, clip)).collect();
    let mut c2v = vec![0.0; n_edges];
    let mut hard = vec![0u8; h.n_vars()];
    let mut iter = 0;
    let termination = loop {
        for j in 0..layout.n_checks() {
            let r = layout.range(j);
            check_messages(params.variant, params.normalization, clip, &v2c[r.clone()], &mut c2v[r]);
        }
        for (i, (&g, bit)) in gamma.iter().zip(hard.iter_mut()).enumerate() {
            let edges = layout.var_edges(i);
            let total = g + edges.iter().map(|&e| c2v[e]).sum::<f64>();
            *bit = u8::from(total < 0.0);
            for &e in edges {
                v2c[e] = (total - c2v[e]).clamp(-clip, clip);
            }
        }
        iter += 1;
        if satisfies_all_checks(h, &hard) {
            break Termination::EarlyCodeword;
        }
        if iter >= params.max_iters {
            break Termination::MaxIters;
        }
    };
    let objective = gamma.iter().zip(&hard).map(|(g, &b)| g * f64::from(b)).sum();
    let is_valid_codeword = termination == Termination::EarlyCodeword;
    Ok(DecodeResult {
        word: BinaryWord::new(hard).expect("hard decisions are binary"),
        is_valid_codeword,
        iterations: iter,
        termination,
        wall_time: start.elapsed().as_secs_f64(),
        objective,
    })
}
