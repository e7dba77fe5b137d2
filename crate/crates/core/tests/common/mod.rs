//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use l2box::channel::stream_rng;
use l2box::ParityCheckMatrix;
use rand::Rng;

/// Vertices of the parity polytope: all even-weight vectors of length `d`.
pub fn even_vertices(d: usize) -> Vec<Vec<f64>> {
    (0u32..1 << d)
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| (0..d).map(|i| f64::from((m >> i) & 1)).collect())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            let (top, rest) = a.split_at_mut(r);
            for (x, p) in rest[0][c..].iter_mut().zip(&top[c][c..]) {
                *x -= f * p;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Euclidean projection onto the parity polytope by Wolfe's min-norm-point
/// algorithm over the shifted vertex set `{u - v}`.
pub fn pp_project_bruteforce(v: &[f64]) -> Vec<f64> {
    let pts: Vec<Vec<f64>> =
        even_vertices(v.len()).into_iter().map(|u| u.iter().zip(v).map(|(a, b)| a - b).collect()).collect();
    let combo = |set: &[usize], w: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; v.len()];
        for (&i, &wi) in set.iter().zip(w) {
            for (xk, pk) in x.iter_mut().zip(&pts[i]) {
                *xk += wi * pk;
            }
        }
        x
    };
    let start = (0..pts.len()).min_by(|&i, &j| dot(&pts[i], &pts[i]).total_cmp(&dot(&pts[j], &pts[j]))).unwrap();
    let mut set = vec![start];
    let mut w = vec![1.0];
    for _ in 0..10_000 {
        let x = combo(&set, &w);
        let j = (0..pts.len()).min_by(|&a, &b| dot(&x, &pts[a]).total_cmp(&dot(&x, &pts[b]))).unwrap();
        if dot(&x, &x) - dot(&x, &pts[j]) <= 1e-13 || set.contains(&j) {
            return x.iter().zip(v).map(|(a, b)| a + b).collect();
        }
        set.push(j);
        w.push(0.0);
        loop {
            // Affine minimizer of the current set.
            let m = set.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            for r in 0..m {
                for c in 0..m {
                    a[r][c] = dot(&pts[set[r]], &pts[set[c]]);
                }
                a[r][m] = 1.0;
                a[m][r] = 1.0;
            }
            let mut rhs = vec![0.0; m + 1];
            rhs[m] = 1.0;
            let Some(sol) = solve(a, rhs) else {
                // Affinely dependent set: drop the newest point and stop.
                set.pop();
                w.pop();
                let x = combo(&set, &w);
                return x.iter().zip(v).map(|(a, b)| a + b).collect();
            };
            let mu = &sol[..m];
            if mu.iter().all(|&t| t > 1e-12) {
                w = mu.to_vec();
                break;
            }
            let theta = (0..m)
                .filter(|&i| mu[i] <= 1e-12)
                .map(|i| w[i] / (w[i] - mu[i]))
                .fold(f64::INFINITY, f64::min)
                .clamp(0.0, 1.0);
            for i in 0..m {
                w[i] += theta * (mu[i] - w[i]);
            }
            let keep: Vec<bool> = w.iter().map(|&t| t > 1e-12).collect();
            let mut k = 0;
            set.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            w.retain(|&t| t > 1e-12);
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|t| *t /= total);
        }
    }
    panic!("min-norm-point iteration did not terminate");
}

/// Every codeword of `h`, by scanning all `2^N` words (N <= 20).
pub fn all_codewords(h: &ParityCheckMatrix) -> Vec<Vec<u8>> {
    let n = h.n_vars();
    assert!(n <= 20);
    let masks: Vec<u32> = h.rows().iter().map(|r| r.iter().fold(0u32, |m, &i| m | 1 << i)).collect();
    (0u32..1 << n)
        .filter(|w| masks.iter().all(|m| (w & m).count_ones() % 2 == 0))
        .map(|w| (0..n).map(|i| ((w >> i) & 1) as u8).collect())
        .collect()
}

/// Maximum-likelihood word by exhaustive search; `None` when the optimum is
/// not unique to within `1e-9`.
pub fn ml_unique(codewords: &[Vec<u8>], gamma: &[f64]) -> Option<Vec<u8>> {
    let cost = |c: &Vec<u8>| c.iter().zip(gamma).map(|(&b, g)| f64::from(b) * g).sum::<f64>();
    let mut scored: Vec<(f64, &Vec<u8>)> = codewords.iter().map(|c| (cost(c), c)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    if scored.len() > 1 && scored[1].0 - scored[0].0 < 1e-9 {
        return None;
    }
    Some(scored[0].1.clone())
}

/// Random full-rank `m x n` code with column weight 3 (`n > m >= 4`).
pub fn random_small_code(n: usize, m: usize, seed: u64) -> ParityCheckMatrix {
    assert!(n > m && m >= 4);
    let mut rng = stream_rng(seed, 0x5eed, 0);
    loop {
        let mut rows = vec![Vec::new(); m];
        for i in 0..n {
            let mut picked = Vec::new();
            while picked.len() < 3 {
                let j = rng.random_range(0..m);
                if !picked.contains(&j) {
                    picked.push(j);
                }
            }
            for j in picked {
                rows[j].push(i);
            }
        }
        if rows.iter().any(Vec::is_empty) {
            continue;
        }
        let h = ParityCheckMatrix::from_rows(n, rows).unwrap();
        if h.rank() == m {
            return h;
        }
    }
}

pub fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).abs() <= tol, "coordinate {i}: {x} vs {y} (tol {tol}); {a:?} vs {b:?}");
    }
}
