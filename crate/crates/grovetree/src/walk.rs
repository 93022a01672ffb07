//! Independent random-walk oracles on concrete trees.
//!
//! Hitting times are computed along four deliberately separate routes:
//!
//! 1. [`hitting_times_solve`] - per-target dense linear solve (Gaussian
//!    elimination with partial pivoting). The slow, assumption-free oracle.
//! 2. [`fpt_adjacent`] / [`fpt_pair`] - the split-size shortcut for adjacent
//!    pairs (`2 |E_u| + 1`) extended along tree paths by additivity. Exact
//!    integers, O(n) per query.
//! 3. [`laplacian_eigencheck`] - the spectral route `2 sum(1 / lambda_i)`
//!    via a cyclic Jacobi eigensolver.
//! 4. [`monte_carlo_fpt`] - direct walk simulation with seeded streams.
//!
//! None of these shares code with the others or with the closed-form
//! evaluators in [`crate::analytic`], which is the point: agreement between
//! routes is evidence, not tautology.

use rayon::prelude::*;
use thiserror::Error;

use crate::growth::RngStream;
use crate::tree::{SplitSizes, Tree, TreeError};

/// Largest tree the dense per-target solver accepts.
pub const SOLVER_SIZE_CAP: usize = 3000;
/// Largest tree the Jacobi eigensolver accepts.
pub const JACOBI_SIZE_CAP: usize = 400;
/// Per-equation residual bound for the linear solver.
pub const SOLVER_RESIDUAL_BOUND: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("tree has {n} vertices, over the {cap}-vertex cap for {what}")]
    SizeCap {
        n: usize,
        cap: usize,
        what: &'static str,
    },
    #[error("tree must have at least 2 vertices")]
    TooSmall,
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("linear solve left residual {residual:e} (bound {bound:e})")]
    ResidualTooLarge { residual: f64, bound: f64 },
    #[error("hitting-time system is singular; the graph is not connected")]
    Singular,
    #[error("walk exceeded {max_steps} steps; raise max_steps instead of censoring")]
    StepCapExceeded { max_steps: u64 },
    #[error("Jacobi sweep budget exhausted (off-diagonal norm {off:e})")]
    NonConvergence { off: f64 },
    #[error("smallest Laplacian eigenvalue {0:e} is not numerically zero")]
    GroundEigenvalue(f64),
    #[error("hitting-table average {table} disagrees with 2W/n = {fast}")]
    VerificationMismatch { table: f64, fast: f64 },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Expected steps from every source to every target, `f[u][v]`.
#[derive(Clone, Debug)]
pub struct HittingTable {
    n: usize,
    f: Vec<Vec<f64>>,
}

impl HittingTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, source: usize, target: usize) -> f64 {
        self.f[source][target]
    }

    /// Mean over all ordered pairs of distinct vertices.
    pub fn average(&self) -> f64 {
        let mut total = 0.0;
        for row in &self.f {
            for &x in row {
                total += x;
            }
        }
        total / (self.n as f64 * (self.n as f64 - 1.0))
    }

    /// CSV export with header `source,target,fpt`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("source,target,fpt\n");
        for (s, row) in self.f.iter().enumerate() {
            for (t, &x) in row.iter().enumerate() {
                if s != t {
                    out.push_str(&format!("{s},{t},{x}\n"));
                }
            }
        }
        out
    }
}

/// Hitting times to every target by dense Gaussian elimination with partial
/// pivoting, one grounded system per target. This is the oracle route; it
/// shares nothing with the split-size shortcut it is used to check.
pub fn hitting_times_solve(tree: &Tree) -> Result<HittingTable, WalkError> {
    let n = tree.n();
    if n < 2 {
        return Err(WalkError::TooSmall);
    }
    if n > SOLVER_SIZE_CAP {
        return Err(WalkError::SizeCap {
            n,
            cap: SOLVER_SIZE_CAP,
            what: "hitting-time solver",
        });
    }
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|target| solve_one_target(tree, target))
        .collect::<Result<_, _>>()?;
    let mut f = vec![vec![0.0; n]; n];
    for (target, column) in columns.into_iter().enumerate() {
        for (source, value) in column.into_iter().enumerate() {
            f[source][target] = value;
        }
    }
    Ok(HittingTable { n, f })
}

/// Solve `k_u f(u) - sum of f over neighbors (excluding the target) = k_u`
/// for all `u != target`; returns the full column, 0 at the target.
fn solve_one_target(tree: &Tree, target: usize) -> Result<Vec<f64>, WalkError> {
    let n = tree.n();
    let dim = n - 1;
    // Dense index map skipping the grounded target row/column.
    let index = |v: usize| if v < target { v } else { v - 1 };
    let mut a = vec![vec![0.0f64; dim]; dim];
    let mut b = vec![0.0f64; dim];
    for u in (0..n).filter(|&u| u != target) {
        let r = index(u);
        let degree = tree.degree(u) as f64;
        a[r][r] = degree;
        b[r] = degree;
        for &w in tree.neighbors(u) {
            if w != target {
                a[r][index(w)] = -1.0;
            }
        }
    }

    // Forward elimination with partial pivoting. Rows whose multiplier is a
    // structural zero are skipped; tree systems stay extremely sparse, which
    // is what keeps the oracle usable at n in the hundreds.
    for k in 0..dim {
        let mut pivot_row = k;
        let mut pivot_mag = a[k][k].abs();
        for i in k + 1..dim {
            let mag = a[i][k].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag == 0.0 {
            return Err(WalkError::Singular);
        }
        a.swap(k, pivot_row);
        b.swap(k, pivot_row);
        let (upper, lower) = a.split_at_mut(k + 1);
        let pivot = &upper[k];
        let pivot_b = b[k];
        for (offset, row) in lower.iter_mut().enumerate() {
            let i = k + 1 + offset;
            if row[k] == 0.0 {
                continue;
            }
            let factor = row[k] / pivot[k];
            row[k] = 0.0;
            for j in k + 1..dim {
                row[j] -= factor * pivot[j];
            }
            b[i] -= factor * pivot_b;
        }
    }
    let mut x = vec![0.0f64; dim];
    for k in (0..dim).rev() {
        let mut acc = b[k];
        for j in k + 1..dim {
            acc -= a[k][j] * x[j];
        }
        x[k] = acc / a[k][k];
    }

    let mut column = vec![0.0f64; n];
    for u in (0..n).filter(|&u| u != target) {
        column[u] = x[index(u)];
    }
    // Residual check against the original equations, straight off the graph.
    let mut worst: f64 = 0.0;
    for u in (0..n).filter(|&u| u != target) {
        let degree = tree.degree(u) as f64;
        let mut lhs = degree * column[u];
        for &w in tree.neighbors(u) {
            lhs -= column[w];
        }
        worst = worst.max((lhs - degree).abs());
    }
    if worst > SOLVER_RESIDUAL_BOUND {
        return Err(WalkError::ResidualTooLarge {
            residual: worst,
            bound: SOLVER_RESIDUAL_BOUND,
        });
    }
    Ok(column)
}

/// First-passage time across a single edge: `2 |E_u| + 1`, where `|E_u|`
/// counts the edges on `u`'s side after deleting `{u, v}`.
pub fn fpt_adjacent(tree: &Tree, u: usize, v: usize) -> Result<u64, WalkError> {
    let splits = tree.split_sizes();
    fpt_adjacent_with(tree, &splits, u, v)
}

/// [`fpt_adjacent`] with precomputed split sizes, for bulk queries.
pub fn fpt_adjacent_with(
    tree: &Tree,
    splits: &SplitSizes,
    u: usize,
    v: usize,
) -> Result<u64, WalkError> {
    let v_side = splits.get(u, v).ok_or(WalkError::NotAdjacent(u, v))?;
    let u_side_edges = (tree.n() - v_side - 1) as u64;
    Ok(2 * u_side_edges + 1)
}

/// First-passage time between any pair, summing the adjacent-edge values
/// along the unique path (first-passage times are additive through the
/// vertices of the path on a tree). Exact integer.
pub fn fpt_pair(tree: &Tree, u: usize, v: usize) -> Result<u64, WalkError> {
    if u == v {
        return Ok(0);
    }
    let splits = tree.split_sizes();
    let path = tree.path_between(u, v);
    let mut total = 0u64;
    for hop in path.windows(2) {
        total += fpt_adjacent_with(tree, &splits, hop[0], hop[1])?;
    }
    Ok(total)
}

/// Round-trip expected time `F(u -> v) + F(v -> u)`; equals
/// `2 |E| d(u, v)` on a tree.
pub fn commute_time(tree: &Tree, u: usize, v: usize) -> Result<u64, WalkError> {
    Ok(fpt_pair(tree, u, v)? + fpt_pair(tree, v, u)?)
}

/// Sum of first-passage times into `v` from its neighbors; always
/// `2 |E| - degree(v)`.
pub fn lemma1_sum(tree: &Tree, v: usize) -> Result<u64, WalkError> {
    let splits = tree.split_sizes();
    let mut total = 0u64;
    for &u in tree.neighbors(v) {
        total += fpt_adjacent_with(tree, &splits, u, v)?;
    }
    Ok(total)
}

/// Mean first-passage time over ordered pairs, via `2 W / n`.
pub fn mfpt_exact(tree: &Tree) -> Result<f64, TreeError> {
    if tree.n() < 2 {
        return Err(TreeError::SingleVertexAverage);
    }
    Ok(2.0 * tree.wiener_fast()? as f64 / tree.n() as f64)
}

/// [`mfpt_exact`], re-derived from the full solver table and required to
/// agree within 1e-9 relative.
pub fn mfpt_exact_verified(tree: &Tree) -> Result<f64, WalkError> {
    let fast = mfpt_exact(tree)?;
    let table = hitting_times_solve(tree)?.average();
    if (table - fast).abs() > 1e-9 * fast.abs().max(1.0) {
        return Err(WalkError::VerificationMismatch { table, fast });
    }
    Ok(fast)
}

/// Kirchhoff index under the ordered-pair convention: on a tree every
/// resistance equals the hop distance, so this is exactly `2 W`.
pub fn kirchhoff_index(tree: &Tree) -> Result<u128, TreeError> {
    tree.wiener_fast()?
        .checked_mul(2)
        .ok_or(TreeError::Overflow("kirchhoff index"))
}

/// Mean effective resistance `kirchhoff / (n (n - 1))`; smaller means a
/// more robust network.
pub fn network_criticality(tree: &Tree) -> Result<f64, TreeError> {
    if tree.n() < 2 {
        return Err(TreeError::SingleVertexAverage);
    }
    let k = kirchhoff_index(tree)? as f64;
    Ok(k / (tree.n() as f64 * (tree.n() as f64 - 1.0)))
}

/// Monte Carlo configuration. Trials are split into fixed-size chunks;
/// chunk `c` replays the stream `rng.substream(rng.stream() + c)`, so an
/// estimate consumes a contiguous block of stream indices and is
/// reproducible regardless of thread scheduling.
#[derive(Clone, Debug)]
pub struct WalkConfig {
    pub trials: u64,
    /// Per-trial step cap; `None` uses `100 * n^3 / 3`. A capped trial
    /// aborts the whole estimate rather than biasing the mean.
    pub max_steps: Option<u64>,
    pub rng: RngStream,
}

const MC_CHUNK: u64 = 4096;

/// Sample-mean estimate of a first-passage time.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Unbiased Monte Carlo estimate of the first-passage time from `u` to `v`.
pub fn monte_carlo_fpt(
    tree: &Tree,
    u: usize,
    v: usize,
    config: &WalkConfig,
) -> Result<McEstimate, WalkError> {
    assert!(config.trials >= 1, "at least one trial");
    if tree.n() < 2 {
        return Err(WalkError::TooSmall);
    }
    let max_steps = config.max_steps.unwrap_or_else(|| {
        let n = tree.n() as u128;
        (100 * n * n * n / 3).min(u64::MAX as u128) as u64
    });
    let chunks: Vec<(u64, u64)> = (0..config.trials.div_ceil(MC_CHUNK))
        .map(|c| (c, MC_CHUNK.min(config.trials - c * MC_CHUNK)))
        .collect();
    // Exact integer accumulation makes the aggregate independent of
    // scheduling order.
    let (steps_sum, steps_sq_sum) = chunks
        .into_par_iter()
        .map(|(chunk, size)| -> Result<(u128, u128), WalkError> {
            let mut rng = config.rng.substream(config.rng.stream().wrapping_add(chunk));
            let mut sum = 0u128;
            let mut sq = 0u128;
            for _ in 0..size {
                let steps = walk_until(tree, u, v, max_steps, &mut rng)?;
                sum += steps as u128;
                sq += (steps as u128) * (steps as u128);
            }
            Ok((sum, sq))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let trials = config.trials as f64;
    let mean = steps_sum as f64 / trials;
    let variance = if config.trials > 1 {
        (steps_sq_sum as f64 - (steps_sum as f64) * mean) / (trials - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_error: (variance.max(0.0) / trials).sqrt(),
        trials: config.trials,
    })
}

fn walk_until(
    tree: &Tree,
    u: usize,
    v: usize,
    max_steps: u64,
    rng: &mut RngStream,
) -> Result<u64, WalkError> {
    let mut position = u;
    let mut steps = 0u64;
    while position != v {
        if steps == max_steps {
            return Err(WalkError::StepCapExceeded { max_steps });
        }
        let neighbors = tree.neighbors(position);
        position = neighbors[rng.pick(neighbors.len())];
        steps += 1;
    }
    Ok(steps)
}

/// Laplacian spectrum (ascending) and the spectral MFPT `2 sum(1/lambda)`.
#[derive(Clone, Debug)]
pub struct SpectralCheck {
    pub eigenvalues: Vec<f64>,
    pub mfpt_spectral: f64,
}

/// Eigenvalues of the tree Laplacian by cyclic Jacobi rotations, plus the
/// spectral MFPT. Small-n cross-check for the combinatorial routes.
pub fn laplacian_eigencheck(tree: &Tree) -> Result<SpectralCheck, WalkError> {
    let n = tree.n();
    if n < 2 {
        return Err(WalkError::TooSmall);
    }
    if n > JACOBI_SIZE_CAP {
        return Err(WalkError::SizeCap {
            n,
            cap: JACOBI_SIZE_CAP,
            what: "Jacobi eigensolver",
        });
    }
    let mut a = vec![0.0f64; n * n];
    for v in 0..n {
        a[v * n + v] = tree.degree(v) as f64;
        for &w in tree.neighbors(v) {
            a[v * n + w] = -1.0;
        }
    }
    let mut eigenvalues = jacobi_eigenvalues(&mut a, n)?;
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    if eigenvalues[0].abs() >= 1e-8 {
        return Err(WalkError::GroundEigenvalue(eigenvalues[0]));
    }
    let mfpt_spectral = 2.0 * eigenvalues[1..].iter().map(|l| 1.0 / l).sum::<f64>();
    Ok(SpectralCheck {
        eigenvalues,
        mfpt_spectral,
    })
}

/// Cyclic Jacobi sweeps on a symmetric matrix until the off-diagonal
/// Frobenius norm falls below 1e-12 of the initial Frobenius norm.
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<f64>, WalkError> {
    const MAX_SWEEPS: usize = 75;
    let frobenius: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = 1e-12 * frobenius;
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= threshold {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                a[p * n + p] -= h;
                a[q * n + q] += h;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = aip - s * (aiq + tau * aip);
                        a[i * n + q] = aiq + s * (aip - tau * aiq);
                        a[p * n + i] = a[i * n + p];
                        a[q * n + i] = a[i * n + q];
                    }
                }
            }
        }
    }
    let mut off = 0.0f64;
    for p in 0..n {
        for q in p + 1..n {
            off += 2.0 * a[p * n + q] * a[p * n + q];
        }
    }
    Err(WalkError::NonConvergence { off: off.sqrt() })
}
