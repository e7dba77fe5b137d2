//! Binary linear codes described by sparse parity-check matrices.
//!
//! A [`ParityCheckMatrix`] stores the Tanner graph twice: per check the
//! sorted list of participating variables, and per variable the sorted list
//! of checks it participates in. Indices are 0-based in memory and 1-based
//! in alist files.

use std::fmt::Write as _;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest message length accepted by [`ml_decode_bruteforce`].
pub const ML_ENUMERATION_LIMIT: usize = 24;

/// Sparse M x N binary parity-check matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n_vars: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

/// Index gather for one check: the variables participating in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckSelector<'a> {
    pub check_index: usize,
    pub var_indices: &'a [usize],
}

impl CheckSelector<'_> {
    pub fn degree(&self) -> usize {
        self.var_indices.len()
    }

    /// Collects `x[i]` for every participating variable `i`.
    pub fn gather(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.var_indices.iter().map(|&i| x[i]));
    }
}

impl ParityCheckMatrix {
    /// Builds a matrix from per-check variable lists.
    ///
    /// Rows are sorted; duplicates, out-of-range indices and empty rows are
    /// rejected. Variables that appear in no check are accepted with a warning.
    pub fn from_rows(n_vars: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut rows = rows;
        let mut cols = vec![Vec::new(); n_vars];
        for (j, row) in rows.iter_mut().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidMatrix(format!("check {j} has no variables")));
            }
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidMatrix(format!(
                        "check {j} lists variable {} twice",
                        w[0]
                    )));
                }
            }
            for &i in row.iter() {
                if i >= n_vars {
                    return Err(Error::InvalidMatrix(format!(
                        "check {j} references variable {i} >= N={n_vars}"
                    )));
                }
                cols[i].push(j);
            }
        }
        let unchecked = cols.iter().filter(|c| c.is_empty()).count();
        if unchecked > 0 {
            log::warn!("{unchecked} variable(s) participate in no parity check");
        }
        Ok(Self { n_vars, rows, cols })
    }

    /// Builds a matrix from a dense 0/1 array, one inner vector per check.
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let n = dense.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(dense.len());
        for (j, r) in dense.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidMatrix(format!("row {j} has length {} != {n}", r.len())));
            }
            if let Some(i) = r.iter().position(|&b| b > 1) {
                return Err(Error::InvalidMatrix(format!("entry ({j}, {i}) is {}, not 0/1", r[i])));
            }
            rows.push(r.iter().enumerate().filter(|(_, &b)| b != 0).map(|(i, _)| i).collect());
        }
        Self::from_rows(n, rows)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.rows.len()
    }

    /// Variables in check `j` (N(j)).
    pub fn row(&self, j: usize) -> &[usize] {
        &self.rows[j]
    }

    /// Checks containing variable `i` (N(i)).
    pub fn col(&self, i: usize) -> &[usize] {
        &self.cols[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn check(&self, j: usize) -> CheckSelector<'_> {
        CheckSelector { check_index: j, var_indices: &self.rows[j] }
    }

    pub fn checks(&self) -> impl Iterator<Item = CheckSelector<'_>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(j, r)| CheckSelector { check_index: j, var_indices: r })
    }

    pub fn n_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn max_row_degree(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_col_degree(&self) -> usize {
        self.cols.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_col_degree(&self) -> usize {
        self.cols.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        BitMatrix::from_checks(self).reduce().len()
    }

    /// Dense 0/1 representation, one vector per check.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0u8; self.n_vars];
                for &i in r {
                    d[i] = 1;
                }
                d
            })
            .collect()
    }
}

/// Word over {0,1}, one byte per bit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Wraps `bits`, rejecting entries other than 0 and 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidParams(format!("bit {i} is {} (not 0/1)", bits[i])));
        }
        Ok(Self(bits))
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn xor(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    /// Number of positions where the two words differ.
    pub fn distance(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl std::fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.0 {
            f.write_char(if b == 0 { '0' } else { '1' })?;
        }
        Ok(())
    }
}

/// Syndrome `H w` over GF(2).
pub fn syndrome(h: &ParityCheckMatrix, w: &BinaryWord) -> Result<Vec<u8>> {
    if w.len() != h.n_vars() {
        return Err(Error::LengthMismatch { expected: h.n_vars(), got: w.len() });
    }
    let bits = w.bits();
    Ok(h.rows.iter().map(|r| r.iter().fold(0u8, |acc, &i| acc ^ bits[i])).collect())
}

pub fn is_codeword(h: &ParityCheckMatrix, w: &BinaryWord) -> Result<bool> {
    Ok(syndrome(h, w)?.iter().all(|&s| s == 0))
}

/// Allocation-free codeword check used inside decoder loops.
pub(crate) fn satisfies_all_checks(h: &ParityCheckMatrix, bits: &[u8]) -> bool {
    h.rows.iter().all(|r| r.iter().fold(0u8, |acc, &i| acc ^ bits[i]) == 0)
}

/// Basis of the null space of H over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    n: usize,
    basis: Vec<BinaryWord>,
}

impl GeneratorMatrix {
    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[BinaryWord] {
        &self.basis
    }
}

/// Bit-packed dense GF(2) rows.
struct BitMatrix {
    n_cols: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    fn from_checks(h: &ParityCheckMatrix) -> Self {
        let words = h.n_vars().div_ceil(64);
        let rows = h
            .rows
            .iter()
            .map(|r| {
                let mut packed = vec![0u64; words];
                for &i in r {
                    packed[i / 64] |= 1 << (i % 64);
                }
                packed
            })
            .collect();
        Self { n_cols: h.n_vars(), rows }
    }

    /// Reduced row echelon form; returns the pivot column of each
    /// surviving row (rows are truncated to the rank).
    fn reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.n_cols {
            if r == self.rows.len() {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (r..self.rows.len()).find(|&i| self.rows[i][w] & bit != 0) else {
                continue;
            };
            self.rows.swap(r, p);
            let pivot_row = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != r && row[w] & bit != 0 {
                    for (a, b) in row.iter_mut().zip(&pivot_row) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        self.rows.truncate(r);
        pivots
    }

    fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row][col / 64] >> (col % 64) & 1 == 1
    }
}

/// Null-space basis of H by Gaussian elimination; one basis word per free
/// column, in increasing column order.
pub fn derive_generator(h: &ParityCheckMatrix) -> GeneratorMatrix {
    let mut m = BitMatrix::from_checks(h);
    let pivots = m.reduce();
    let mut is_pivot = vec![false; h.n_vars()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let basis = (0..h.n_vars())
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut bits = vec![0u8; h.n_vars()];
            bits[free] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                if m.get(r, free) {
                    bits[p] = 1;
                }
            }
            BinaryWord(bits)
        })
        .collect();
    GeneratorMatrix { n: h.n_vars(), basis }
}

/// `msg^T G` over GF(2).
pub fn encode(g: &GeneratorMatrix, msg: &[u8]) -> Result<BinaryWord> {
    if msg.len() != g.k() {
        return Err(Error::LengthMismatch { expected: g.k(), got: msg.len() });
    }
    let mut out = vec![0u8; g.n];
    for (bit, row) in msg.iter().zip(&g.basis) {
        if *bit & 1 == 1 {
            for (o, b) in out.iter_mut().zip(row.bits()) {
                *o ^= b;
            }
        }
    }
    Ok(BinaryWord(out))
}

/// Exhaustive maximum-likelihood decoding: the codeword minimizing
/// `gamma . x`, ties broken towards the lexicographically smallest word.
pub fn ml_decode_bruteforce(g: &GeneratorMatrix, gamma: &[f64]) -> Result<BinaryWord> {
    if g.k() > ML_ENUMERATION_LIMIT {
        return Err(Error::TooManyCodewords { k: g.k(), limit: ML_ENUMERATION_LIMIT });
    }
    if gamma.len() != g.n {
        return Err(Error::LengthMismatch { expected: g.n, got: gamma.len() });
    }
    let objective = |w: &[u8]| -> f64 {
        w.iter().zip(gamma).filter(|(&b, _)| b == 1).map(|(_, &c)| c).sum()
    };
    let mut current = vec![0u8; g.n];
    let mut best = current.clone();
    let mut best_obj = objective(&best);
    // Gray-code walk: step t flips basis word trailing_zeros(t).
    for t in 1u64..(1u64 << g.k()) {
        let flip = t.trailing_zeros() as usize;
        for (c, b) in current.iter_mut().zip(g.basis[flip].bits()) {
            *c ^= b;
        }
        let obj = objective(&current);
        if obj < best_obj || (obj == best_obj && current < best) {
            best_obj = obj;
            best.copy_from_slice(&current);
        }
    }
    Ok(BinaryWord(best))
}

/// Random (col_deg, row_deg)-regular code.
///
/// Edges are placed variable by variable (in shuffled order), each time
/// picking among the least-filled checks one that does not close a 4-cycle.
/// Dead ends restart the construction; after many restarts 4-cycles are
/// tolerated so the call always succeeds for valid dimensions.
pub fn regular_code(n: usize, col_deg: usize, row_deg: usize, seed: u64) -> Result<ParityCheckMatrix> {
    if n == 0 || col_deg == 0 || row_deg == 0 || !(n * col_deg).is_multiple_of(row_deg) {
        return Err(Error::InvalidParams(format!(
            "cannot build ({col_deg},{row_deg})-regular code of length {n}"
        )));
    }
    let m = n * col_deg / row_deg;
    if col_deg > m {
        return Err(Error::InvalidParams(format!("column degree {col_deg} exceeds {m} checks")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0.. {
        let allow_cycles = attempt >= 500;
        if let Some(rows) = place_edges(n, m, col_deg, row_deg, allow_cycles, &mut rng) {
            return ParityCheckMatrix::from_rows(n, rows);
        }
    }
    unreachable!()
}

fn place_edges(
    n: usize,
    m: usize,
    col_deg: usize,
    row_deg: usize,
    allow_cycles: bool,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<usize>>> {
    let mut rows: Vec<Vec<usize>> = vec![Vec::with_capacity(row_deg); m];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut chosen = Vec::with_capacity(col_deg);
    let mut candidates = Vec::with_capacity(m);
    for &i in &order {
        chosen.clear();
        for _ in 0..col_deg {
            candidates.clear();
            let mut best_free = 0;
            for (c, row) in rows.iter().enumerate() {
                let free = row_deg - row.len();
                if free == 0 || chosen.contains(&c) {
                    continue;
                }
                let cycle = chosen.iter().any(|&o: &usize| row.iter().any(|v| rows[o].contains(v)));
                if cycle && !allow_cycles {
                    continue;
                }
                if free > best_free {
                    best_free = free;
                    candidates.clear();
                }
                if free == best_free {
                    candidates.push(c);
                }
            }
            let &c = candidates.choose(rng)?;
            chosen.push(c);
        }
        for &c in &chosen {
            rows[c].push(i);
        }
    }
    Some(rows)
}

/// Number of check pairs sharing two or more variables.
#[cfg(test)]
fn count_four_cycles(n: usize, rows: &[Vec<usize>]) -> usize {
    let mut member = vec![u64::MAX; n];
    let mut count = 0;
    for (a, ra) in rows.iter().enumerate() {
        for &i in ra {
            member[i] = a as u64;
        }
        for rb in &rows[a + 1..] {
            if rb.iter().filter(|&&i| member[i] == a as u64).count() >= 2 {
                count += 1;
            }
        }
    }
    count
}

/// Parses the alist format: "N M", "max_col max_row", the column degrees,
/// the row degrees, then N zero-padded 1-based check lists followed by M
/// zero-padded 1-based variable lists.
pub fn parse_alist(text: &str) -> Result<ParityCheckMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let last_line = text.lines().count().max(1);

    let mut next_ints = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (no, line) = lines.next().ok_or_else(|| Error::Alist {
            line: last_line,
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        let vals = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| Error::Alist {
                    line: no,
                    msg: format!("'{tok}' is not a non-negative integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((no, vals))
    };
    let expect_len = |no: usize, vals: &[usize], n: usize, what: &str| -> Result<()> {
        if vals.len() != n {
            return Err(Error::Alist {
                line: no,
                msg: format!("expected {n} values for {what}, found {}", vals.len()),
            });
        }
        Ok(())
    };

    let (no, dims) = next_ints("\"N M\" header")?;
    expect_len(no, &dims, 2, "\"N M\"")?;
    let (n, m) = (dims[0], dims[1]);
    let (no, maxes) = next_ints("maximum degrees")?;
    expect_len(no, &maxes, 2, "maximum degrees")?;
    let (max_col, max_row) = (maxes[0], maxes[1]);
    let (no, col_deg) = next_ints("column degrees")?;
    expect_len(no, &col_deg, n, "column degrees")?;
    if let Some(&d) = col_deg.iter().find(|&&d| d > max_col) {
        return Err(Error::Alist { line: no, msg: format!("column degree {d} exceeds maximum {max_col}") });
    }
    let (no, row_deg) = next_ints("row degrees")?;
    expect_len(no, &row_deg, m, "row degrees")?;
    if let Some(&d) = row_deg.iter().find(|&&d| d > max_row) {
        return Err(Error::Alist { line: no, msg: format!("row degree {d} exceeds maximum {max_row}") });
    }

    let mut read_lists = |count: usize, degrees: &[usize], bound: usize, what: &str| {
        let mut lists = Vec::with_capacity(count);
        for (idx, &deg) in degrees.iter().enumerate().take(count) {
            let (no, vals) = next_ints(what)?;
            let list: Vec<usize> = vals.iter().copied().filter(|&v| v != 0).collect();
            if list.len() != deg {
                return Err(Error::Alist {
                    line: no,
                    msg: format!("{what} {} has {} entries, degree line says {deg}", idx + 1, list.len()),
                });
            }
            if let Some(&v) = list.iter().find(|&&v| v > bound) {
                return Err(Error::Alist {
                    line: no,
                    msg: format!("index {v} out of range 1..={bound}"),
                });
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Alist { line: no, msg: format!("duplicate neighbor {}", w[0]) });
            }
            lists.push((no, sorted.into_iter().map(|v| v - 1).collect::<Vec<_>>()));
        }
        Ok::<_, Error>(lists)
    };
    let col_lists = read_lists(n, &col_deg, m, "variable")?;
    let row_lists = read_lists(m, &row_deg, n, "check")?;

    let rows: Vec<Vec<usize>> = row_lists.iter().map(|(_, r)| r.clone()).collect();
    if let Some((no, _)) = rows.iter().zip(&row_lists).find(|(r, _)| r.is_empty()).map(|(_, l)| l) {
        return Err(Error::Alist { line: *no, msg: "check has degree 0".into() });
    }
    let h = ParityCheckMatrix::from_rows(n, rows).map_err(|e| Error::Alist { line: 1, msg: e.to_string() })?;
    for (i, (no, list)) in col_lists.iter().enumerate() {
        if h.col(i) != list.as_slice() {
            return Err(Error::Alist {
                line: *no,
                msg: format!("variable {} neighbor list disagrees with the check lists", i + 1),
            });
        }
    }
    Ok(h)
}

/// Writes `h` in alist format with zero padding up to the maximum degrees.
pub fn emit_alist(h: &ParityCheckMatrix) -> String {
    let (max_col, max_row) = (h.max_col_degree(), h.max_row_degree());
    let join = |it: &mut dyn Iterator<Item = usize>| it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", h.n_vars(), h.n_checks());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut h.cols.iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut h.rows.iter().map(Vec::len)));
    for c in &h.cols {
        let _ = writeln!(out, "{}", join(&mut c.iter().map(|j| j + 1).chain(std::iter::repeat_n(0, max_col - c.len()))));
    }
    for r in &h.rows {
        let _ = writeln!(out, "{}", join(&mut r.iter().map(|i| i + 1).chain(std::iter::repeat_n(0, max_row - r.len()))));
    }
    out
}
