//! ADMM decoders over the local parity polytopes.
//!
//! [`l2box_decode`] solves
//!
//! ```text
//! min gamma.x  s.t.  x in [0,1]^N,  y = x,  ||y - 1/2||^2 = N/4,
//!                    z_j = P_j x,  z_j in PP_{d_j}
//! ```
//!
//! by cycling x -> y -> z -> (lambda1, lambda2) on the augmented Lagrangian.
//! The sphere constraint together with the box forces binary solutions, so
//! no penalty weight has to be tuned. [`penalized_decode`] is the ADMM LP
//! decoder with the concave penalty `-alpha (x - 1/2)^2` per bit.
//!
//! Per-check quantities (`z`, `lambda1`) are stored flat in edge order:
//! check 0's variables in `h.row(0)` order, then check 1's, and so on.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::code::{satisfies_all_checks, ParityCheckMatrix};
use crate::decoder::{check_inputs, round_to_word, DecodeResult, Termination};
use crate::error::{Error, Result};
use crate::geometry::{self, ParityProjector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L2BoxParams {
    pub mu1: f64,
    pub mu2: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub early_exit_on_codeword: bool,
}

impl Default for L2BoxParams {
    fn default() -> Self {
        Self { mu1: 3.0, mu2: 10.0, epsilon: 1e-5, max_iters: 1000, early_exit_on_codeword: false }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")))
    }
}

impl L2BoxParams {
    pub fn validate(&self) -> Result<()> {
        positive("mu1", self.mu1)?;
        positive("mu2", self.mu2)?;
        positive("epsilon", self.epsilon)?;
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenalizedParams {
    pub alpha: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub early_exit_on_codeword: bool,
}

impl Default for PenalizedParams {
    fn default() -> Self {
        Self { alpha: 3.0, mu: 5.0, epsilon: 1e-5, max_iters: 1000, early_exit_on_codeword: true }
    }
}

impl PenalizedParams {
    /// Requires `mu * min_i |N(i)| > 2 alpha` so every x-subproblem is
    /// strictly convex.
    pub fn validate(&self, h: &ParityCheckMatrix) -> Result<()> {
        positive("mu", self.mu)?;
        positive("epsilon", self.epsilon)?;
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        let min_deg = h.min_col_degree();
        if self.mu * min_deg as f64 <= 2.0 * self.alpha {
            return Err(Error::InvalidParams(format!(
                "penalized x-update not convex: mu * min variable degree = {} <= 2 alpha = {}",
                self.mu * min_deg as f64,
                2.0 * self.alpha
            )));
        }
        Ok(())
    }
}

/// Iterates of the l2-box ADMM.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Replica of `P_j x` per check, flat in edge order.
    pub z: Vec<f64>,
    /// Duals of `z_j = P_j x`, flat in edge order.
    pub lambda1: Vec<f64>,
    /// Dual of `y = x`.
    pub lambda2: Vec<f64>,
    pub iter: usize,
    /// `max_j ||P_j x - z_j||_inf`.
    pub primal_residual_pp: f64,
    /// `||x - y||_inf`.
    pub primal_residual_box: f64,
}

impl AdmmState {
    /// Centre start: `x = 1/2`, `y` on the sphere along `e_1`, `z_j` the
    /// projection of `1/2` onto each parity polytope, zero duals.
    pub fn initial(h: &ParityCheckMatrix) -> Self {
        let n = h.n_vars();
        let mut y = vec![0.0; n];
        geometry::sphere_point_along(&vec![0.0; n], &mut y);
        Self {
            x: vec![0.5; n],
            y,
            z: initial_replicas(h),
            lambda1: vec![0.0; h.n_edges()],
            lambda2: vec![0.0; n],
            iter: 0,
            primal_residual_pp: f64::INFINITY,
            primal_residual_box: f64::INFINITY,
        }
    }

    fn check_shape(&self, h: &ParityCheckMatrix) -> Result<()> {
        let (n, e) = (h.n_vars(), h.n_edges());
        for (len, want) in [
            (self.x.len(), n),
            (self.y.len(), n),
            (self.lambda2.len(), n),
            (self.z.len(), e),
            (self.lambda1.len(), e),
        ] {
            if len != want {
                return Err(Error::LengthMismatch { expected: want, got: len });
            }
        }
        Ok(())
    }

    /// The `d_j` entries of `z` belonging to check `j`.
    pub fn z_check<'a>(&'a self, layout: &EdgeLayout, j: usize) -> &'a [f64] {
        &self.z[layout.range(j)]
    }
}

fn initial_replicas(h: &ParityCheckMatrix) -> Vec<f64> {
    let mut proj = ParityProjector::new();
    let mut z = Vec::with_capacity(h.n_edges());
    for row in h.rows() {
        let mut half = vec![0.5; row.len()];
        proj.project(&mut half);
        z.extend_from_slice(&half);
    }
    z
}

/// Edge bookkeeping for the flat per-check storage.
#[derive(Debug, Clone)]
pub struct EdgeLayout {
    row_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
}

impl EdgeLayout {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        let mut row_start = Vec::with_capacity(h.n_checks() + 1);
        let mut edge_var = Vec::with_capacity(h.n_edges());
        let mut var_edges = vec![Vec::new(); h.n_vars()];
        row_start.push(0);
        for row in h.rows() {
            for &i in row {
                var_edges[i].push(edge_var.len());
                edge_var.push(i);
            }
            row_start.push(edge_var.len());
        }
        Self { row_start, edge_var, var_edges }
    }

    pub fn range(&self, j: usize) -> std::ops::Range<usize> {
        self.row_start[j]..self.row_start[j + 1]
    }

    pub fn n_checks(&self) -> usize {
        self.row_start.len() - 1
    }

    /// Variable index of edge `e`.
    pub fn var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    /// Edges incident to variable `i`.
    pub fn var_edges(&self, i: usize) -> &[usize] {
        &self.var_edges[i]
    }
}

/// `sum_{j in N(i)} (mu1 z_j^(i) - lambda1_j^(i))` for variable `i`.
fn replica_pull(layout: &EdgeLayout, z: &[f64], lambda1: &[f64], mu1: f64, i: usize) -> f64 {
    layout.var_edges(i).iter().map(|&e| mu1 * z[e] - lambda1[e]).sum()
}

pub fn l2box_x_update(state: &mut AdmmState, gamma: &[f64], params: &L2BoxParams, layout: &EdgeLayout) {
    let AdmmState { x, y, z, lambda1, lambda2, .. } = state;
    for (i, xi) in x.iter_mut().enumerate() {
        let pull = replica_pull(layout, z, lambda1, params.mu1, i);
        let deg = layout.var_edges(i).len() as f64;
        let v = (pull - gamma[i] - lambda2[i] + params.mu2 * y[i]) / (params.mu1 * deg + params.mu2);
        *xi = v.clamp(0.0, 1.0);
    }
}

/// The y-subproblem maximizes a linear function over the sphere, so only the
/// direction of `mu2 (x - 1/2) + lambda2` matters.
pub fn l2box_y_update(state: &mut AdmmState, params: &L2BoxParams, dir: &mut Vec<f64>) {
    dir.clear();
    dir.extend(state.x.iter().zip(&state.lambda2).map(|(x, l)| params.mu2 * (x - 0.5) + l));
    geometry::sphere_point_along(dir, &mut state.y);
}

/// `z_j = Pi_PP(P_j x + lambda1_j / mu1)` for every check.
pub fn l2box_z_update(state: &mut AdmmState, mu1: f64, layout: &EdgeLayout, proj: &mut ParityProjector) {
    replica_update(&state.x, &mut state.z, &state.lambda1, mu1, layout, proj);
}

fn replica_update(x: &[f64], z: &mut [f64], lambda1: &[f64], mu: f64, layout: &EdgeLayout, proj: &mut ParityProjector) {
    for j in 0..layout.n_checks() {
        let r = layout.range(j);
        for e in r.clone() {
            z[e] = x[layout.var(e)] + lambda1[e] / mu;
        }
        proj.project(&mut z[r]);
    }
}

/// Dual ascent on both couplings; also refreshes the primal residuals.
pub fn l2box_dual_update(state: &mut AdmmState, params: &L2BoxParams, layout: &EdgeLayout) {
    state.primal_residual_pp = check_dual_update(&state.x, &state.z, &mut state.lambda1, params.mu1, layout);
    let mut res = 0.0f64;
    for ((l, x), y) in state.lambda2.iter_mut().zip(&state.x).zip(&state.y) {
        let r = x - y;
        *l += params.mu2 * r;
        res = res.max(r.abs());
    }
    state.primal_residual_box = res;
}

fn check_dual_update(x: &[f64], z: &[f64], lambda1: &mut [f64], mu: f64, layout: &EdgeLayout) -> f64 {
    let mut res = 0.0f64;
    for (e, (l, zv)) in lambda1.iter_mut().zip(z).enumerate() {
        let r = x[layout.var(e)] - zv;
        *l += mu * r;
        res = res.max(r.abs());
    }
    res
}

fn objective(gamma: &[f64], x: &[f64]) -> f64 {
    gamma.iter().zip(x).map(|(g, v)| g * v).sum()
}

/// Decodes with the l2-box ADMM, starting from `init` or [`AdmmState::initial`].
pub fn l2box_decode(
    h: &ParityCheckMatrix,
    gamma: &[f64],
    params: &L2BoxParams,
    init: Option<AdmmState>,
) -> Result<DecodeResult> {
    l2box_decode_observed(h, gamma, params, init, |_| {})
}

/// [`l2box_decode`] with a callback after every complete iteration.
pub fn l2box_decode_observed(
    h: &ParityCheckMatrix,
    gamma: &[f64],
    params: &L2BoxParams,
    init: Option<AdmmState>,
    mut observe: impl FnMut(&AdmmState),
) -> Result<DecodeResult> {
    params.validate()?;
    check_inputs(h, gamma)?;
    let mut state = match init {
        Some(s) => {
            s.check_shape(h)?;
            s
        }
        None => AdmmState::initial(h),
    };
    let start = Instant::now();
    let layout = EdgeLayout::new(h);
    let mut proj = ParityProjector::new();
    let mut dir = Vec::with_capacity(h.n_vars());
    let mut hard = vec![0u8; h.n_vars()];
    let termination = loop {
        l2box_x_update(&mut state, gamma, params, &layout);
        l2box_y_update(&mut state, params, &mut dir);
        l2box_z_update(&mut state, params.mu1, &layout, &mut proj);
        l2box_dual_update(&mut state, params, &layout);
        state.iter += 1;
        debug_assert!(state.x.iter().all(|v| (0.0..=1.0).contains(v)));
        observe(&state);

        if state.primal_residual_pp < params.epsilon && state.primal_residual_box < params.epsilon {
            break Termination::Converged;
        }
        if params.early_exit_on_codeword {
            fill_hard(&state.x, &mut hard);
            if satisfies_all_checks(h, &hard) {
                break Termination::EarlyCodeword;
            }
        }
        if state.iter >= params.max_iters {
            break Termination::MaxIters;
        }
    };
    Ok(finish(h, gamma, &state.x, state.iter, termination, start))
}

fn fill_hard(x: &[f64], out: &mut [u8]) {
    for (o, &v) in out.iter_mut().zip(x) {
        *o = u8::from(v > 0.5);
    }
}

fn finish(h: &ParityCheckMatrix, gamma: &[f64], x: &[f64], iterations: usize, termination: Termination, start: Instant) -> DecodeResult {
    let word = round_to_word(x);
    DecodeResult {
        is_valid_codeword: satisfies_all_checks(h, word.bits()),
        word,
        iterations,
        termination,
        wall_time: start.elapsed().as_secs_f64(),
        objective: objective(gamma, x),
    }
}

/// ADMM on the l2-penalized LP relaxation.
pub fn penalized_decode(h: &ParityCheckMatrix, gamma: &[f64], params: &PenalizedParams) -> Result<DecodeResult> {
    params.validate(h)?;
    check_inputs(h, gamma)?;
    let start = Instant::now();
    let layout = EdgeLayout::new(h);
    let mut proj = ParityProjector::new();
    let n = h.n_vars();
    let mut x = vec![0.5; n];
    let mut z = initial_replicas(h);
    let mut lambda1 = vec![0.0; h.n_edges()];
    let mut hard = vec![0u8; n];
    let (mu, alpha) = (params.mu, params.alpha);
    let mut iter = 0;
    let termination = loop {
        for (i, xi) in x.iter_mut().enumerate() {
            let pull = replica_pull(&layout, &z, &lambda1, mu, i);
            let deg = layout.var_edges(i).len() as f64;
            *xi = ((pull - gamma[i] - alpha) / (mu * deg - 2.0 * alpha)).clamp(0.0, 1.0);
        }
        replica_update(&x, &mut z, &lambda1, mu, &layout, &mut proj);
        let residual = check_dual_update(&x, &z, &mut lambda1, mu, &layout);
        iter += 1;
        if residual < params.epsilon {
            break Termination::Converged;
        }
        if params.early_exit_on_codeword {
            fill_hard(&x, &mut hard);
            if satisfies_all_checks(h, &hard) {
                break Termination::EarlyCodeword;
            }
        }
        if iter >= params.max_iters {
            break Termination::MaxIters;
        }
    };
    Ok(finish(h, gamma, &x, iter, termination, start))
}

/// Writes one CSV row per iteration: `iteration,residual_pp,residual_box,objective`.
pub struct TraceWriter<W: Write> {
    out: W,
    gamma: Vec<f64>,
    error: Option<std::io::Error>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W, gamma: &[f64]) -> std::io::Result<Self> {
        writeln!(out, "iteration,residual_pp,residual_box,objective")?;
        Ok(Self { out, gamma: gamma.to_vec(), error: None })
    }

    pub fn record(&mut self, s: &AdmmState) {
        if self.error.is_some() {
            return;
        }
        let obj = objective(&self.gamma, &s.x);
        if let Err(e) = writeln!(self.out, "{},{:e},{:e},{}", s.iter, s.primal_residual_pp, s.primal_residual_box, obj) {
            self.error = Some(e);
        }
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        if let Some(e) = self.error {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}
