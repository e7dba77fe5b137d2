//! Euclidean projections used by the ADMM decoders.
//!
//! * the unit box `[0,1]^N`,
//! * the l2 sphere centred at `1/2` with radius `sqrt(N)/2`, which meets the
//!   box exactly in the binary points,
//! * the parity polytope `PP_d`, the convex hull of the even-weight binary
//!   vectors of length `d`.
//!
//! `PP_d` is the box cut by the "odd-set" inequalities
//! `sum_{i in S} v_i - sum_{i not in S} v_i <= |S| - 1` for every odd `S`.
//! After clamping to the box at most one of them can be violated, and the
//! greedy choice (`S` = coordinates above 1/2, parity repaired by toggling
//! the coordinate closest to 1/2) finds it. If it is violated the projection
//! lies on that facet, which after reflecting the coordinates outside `S`
//! becomes the slice `{w in [0,1]^d : sum w = d - 1}`.

use serde::{Deserialize, Serialize};

/// Default membership tolerance for [`pp_contains`].
pub const PP_MEMBERSHIP_TOL: f64 = 1e-7;

/// The sphere `||x - 1/2||_2 = sqrt(N)/2` in `N` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereSpec {
    pub dim: usize,
}

impl SphereSpec {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn radius(&self) -> f64 {
        (self.dim as f64).sqrt() / 2.0
    }

    pub fn radius_squared(&self) -> f64 {
        self.dim as f64 / 4.0
    }

    /// Squared distance of `v` from the centre.
    pub fn offset_norm_squared(v: &[f64]) -> f64 {
        v.iter().map(|x| (x - 0.5) * (x - 0.5)).sum()
    }
}

/// Parity polytope of dimension `d >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityPolytopeSpec {
    pub dim: usize,
}

impl ParityPolytopeSpec {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "parity polytope needs d >= 1");
        Self { dim }
    }
}

pub fn project_box(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.clamp(0.0, 1.0)).collect()
}

pub fn project_box_in_place(v: &mut [f64]) {
    for x in v {
        *x = x.clamp(0.0, 1.0);
    }
}

/// Projection onto the sphere. The centre itself maps to `1/2 + r e_1`.
pub fn project_sphere(v: &[f64], spec: SphereSpec) -> Vec<f64> {
    debug_assert_eq!(v.len(), spec.dim);
    let dir: Vec<f64> = v.iter().map(|x| x - 0.5).collect();
    let mut out = vec![0.0; v.len()];
    sphere_point_along(&dir, &mut out);
    out
}

/// Writes `1/2 + (sqrt(N)/2) dir/||dir||` into `out`; a zero direction
/// falls back to `e_1`.
pub fn sphere_point_along(dir: &[f64], out: &mut [f64]) {
    let n = dir.len();
    let radius = (n as f64).sqrt() / 2.0;
    let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        out.fill(0.5);
        if let Some(first) = out.first_mut() {
            *first += radius;
        }
        return;
    }
    let scale = radius / norm;
    for (o, d) in out.iter_mut().zip(dir) {
        *o = 0.5 + scale * d;
    }
}

/// Most violated odd-set inequality of a point inside the box: returns the
/// membership mask of `S` and `sum_S u - sum_notS u - (|S| - 1)`.
fn greedy_odd_set(u: &[f64], in_set: &mut [bool]) -> f64 {
    let mut count = 0usize;
    let mut closest = 0usize;
    let mut closest_gap = f64::INFINITY;
    for (i, (&x, s)) in u.iter().zip(in_set.iter_mut()).enumerate() {
        *s = x > 0.5;
        count += usize::from(*s);
        let gap = (x - 0.5).abs();
        if gap < closest_gap {
            closest_gap = gap;
            closest = i;
        }
    }
    if count.is_multiple_of(2) {
        in_set[closest] = !in_set[closest];
        count = if in_set[closest] { count + 1 } else { count - 1 };
    }
    let signed: f64 = u.iter().zip(in_set.iter()).map(|(&x, &s)| if s { x } else { -x }).sum();
    signed - (count as f64 - 1.0)
}

/// Membership in `PP_d` up to `tol`.
pub fn pp_contains(v: &[f64], spec: ParityPolytopeSpec, tol: f64) -> bool {
    debug_assert_eq!(v.len(), spec.dim);
    if v.iter().any(|&x| !(x >= -tol && x <= 1.0 + tol)) {
        return false;
    }
    let clamped = project_box(v);
    let mut in_set = vec![false; v.len()];
    greedy_odd_set(&clamped, &mut in_set) <= tol
}

/// Reusable buffers for [`ParityProjector::project`].
#[derive(Debug, Default, Clone)]
pub struct ParityProjector {
    in_set: Vec<bool>,
    flipped: Vec<f64>,
    breaks: Vec<(f64, bool)>,
}

impl ParityProjector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Projects `v` onto `PP_d` (`d = v.len()`), in place.
    pub fn project(&mut self, v: &mut [f64]) {
        let d = v.len();
        debug_assert!(d >= 1);
        self.in_set.clear();
        self.in_set.resize(d, false);
        self.flipped.clear();
        self.flipped.extend(v.iter().map(|x| x.clamp(0.0, 1.0)));
        if greedy_odd_set(&self.flipped, &mut self.in_set) <= 0.0 {
            v.copy_from_slice(&self.flipped);
            return;
        }
        // Reflect coordinates outside S; the facet becomes sum w = d - 1.
        for ((f, &x), &s) in self.flipped.iter_mut().zip(v.iter()).zip(&self.in_set) {
            *f = if s { x } else { 1.0 - x };
        }
        let tau = capped_slice_shift(&self.flipped, d as f64 - 1.0, &mut self.breaks);
        for ((out, &t), &s) in v.iter_mut().zip(&self.flipped).zip(&self.in_set) {
            let w = (t - tau).clamp(0.0, 1.0);
            *out = if s { w } else { 1.0 - w };
        }
    }
}

/// Finds `tau` with `sum_i clamp(t_i - tau, 0, 1) = target` for
/// `0 <= target <= len(t)`, by sorting the breakpoints `t_i - 1` (where a
/// coordinate leaves the upper bound) and `t_i` (where it hits zero) and
/// scanning the piecewise-linear sum.
fn capped_slice_shift(t: &[f64], target: f64, breaks: &mut Vec<(f64, bool)>) -> f64 {
    breaks.clear();
    for &x in t {
        breaks.push((x - 1.0, true));
        breaks.push((x, false));
    }
    breaks.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut value = t.len() as f64;
    let mut active = 0i64;
    let mut prev = breaks[0].0;
    for &(point, entering) in breaks.iter() {
        let next_value = value - active as f64 * (point - prev);
        if next_value <= target {
            return if active > 0 { prev + (value - target) / active as f64 } else { prev };
        }
        value = next_value;
        prev = point;
        active += if entering { 1 } else { -1 };
    }
    prev
}

/// Allocating convenience wrapper around [`ParityProjector`].
pub fn project_pp(v: &[f64], spec: ParityPolytopeSpec) -> Vec<f64> {
    debug_assert_eq!(v.len(), spec.dim);
    let mut out = v.to_vec();
    ParityProjector::new().project(&mut out);
    out
}
