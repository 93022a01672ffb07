//! Stochastic uniform growth operations and the iteration framework.
//!
//! Three operations grow a tree one generation at a time:
//!
//! * **VUGM** (vertex-based): attach `mu` pendant paths to every vertex, the
//!   vertex count of each path drawn independently from the m-distribution.
//! * **EUGM** (edge-based): subdivide every edge by `m` new vertices (one
//!   m-draw per edge), then attach `nu` tentacle paths to each inserted
//!   vertex, each tentacle's vertex count drawn independently from the
//!   n-distribution.
//! * **MUGM** (mixture): subdivide every edge by `m_u + m_v` vertices (one
//!   independent m-draw per edge endpoint), then top up every vertex of
//!   degree `k < mu` with `mu - k` pendant paths, each with its own m-draw.
//!
//! The draw orders are fixed (edges in sorted order, vertices ascending,
//! path slots ascending) so that a given `(seed tree, spec, RngStream)`
//! always reproduces the same tree byte-for-byte. Sampling is injectable
//! through [`LengthSampler`], which lets verification code enumerate every
//! outcome of a step instead of drawing at random.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{Tree, TreeError};

/// Errors from distribution validation, spec validation, and growth.
#[derive(Debug, Error, PartialEq)]
pub enum GrowthError {
    #[error("values and probs must have equal length ({values} vs {probs})")]
    MismatchedLengths { values: usize, probs: usize },
    #[error("path lengths must be >= 1, got {0}")]
    ZeroValue(u64),
    #[error("duplicate length value {0}")]
    DuplicateValue(u64),
    #[error("probabilities must be nonnegative and finite, got {0}")]
    BadProbability(f64),
    #[error("probabilities sum to {0}, not 1 (tolerance 1e-12); refusing to renormalize")]
    ProbabilitySum(f64),
    #[error("operation requires a draw from an empty distribution")]
    EmptyDistribution,
    #[error("spec kind is {got:?}, operation expects {expected:?}")]
    KindMismatch {
        expected: GrowthKind,
        got: GrowthKind,
    },
    #[error("mu must be >= 1")]
    MuZero,
    #[error("mixture growth needs mu >= 2 to stay iterable, got {0}")]
    MuTooSmall(u64),
    #[error("nu = {nu} tentacles per inserted vertex but the n-distribution is {state}")]
    TentacleDistribution { nu: u64, state: &'static str },
    #[error("{kind:?} does not use parameter {param}, which must be zero/empty")]
    UnusedParameter { kind: GrowthKind, param: &'static str },
    #[error("seed max degree {max_degree} exceeds mu = {mu}")]
    DegreeExceedsMu { max_degree: usize, mu: u64 },
    #[error("grown tree would have {realized} vertices, over the cap {cap}")]
    TooLarge { realized: u64, cap: u64 },
    #[error("scripted sampler ran out of draws")]
    SamplerExhausted,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A finite discrete distribution over path vertex counts.
///
/// Values are distinct positive integers; probabilities must sum to 1 within
/// an absolute 1e-12 (rejected otherwise - silent renormalization would hide
/// config mistakes). The empty distribution is allowed and stands for
/// "unused" (the `nu = 0` case).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LengthDistributionRepr", into = "LengthDistributionRepr")]
pub struct LengthDistribution {
    values: Vec<u64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct LengthDistributionRepr {
    values: Vec<u64>,
    probs: Vec<f64>,
}

impl From<LengthDistribution> for LengthDistributionRepr {
    fn from(d: LengthDistribution) -> Self {
        LengthDistributionRepr {
            values: d.values,
            probs: d.probs,
        }
    }
}

impl TryFrom<LengthDistributionRepr> for LengthDistribution {
    type Error = GrowthError;
    fn try_from(r: LengthDistributionRepr) -> Result<Self, Self::Error> {
        LengthDistribution::new(r.values, r.probs)
    }
}

pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

impl LengthDistribution {
    pub fn new(values: Vec<u64>, probs: Vec<f64>) -> Result<Self, GrowthError> {
        if values.len() != probs.len() {
            return Err(GrowthError::MismatchedLengths {
                values: values.len(),
                probs: probs.len(),
            });
        }
        if values.is_empty() {
            return Ok(LengthDistribution {
                values,
                probs,
                cumulative: Vec::new(),
            });
        }
        let mut seen = values.clone();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(GrowthError::DuplicateValue(w[0]));
            }
        }
        if let Some(&v) = values.iter().find(|&&v| v == 0) {
            return Err(GrowthError::ZeroValue(v));
        }
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(GrowthError::BadProbability(p));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(GrowthError::ProbabilitySum(sum));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        Ok(LengthDistribution {
            values,
            probs,
            cumulative,
        })
    }

    /// The point mass at `value`.
    pub fn constant(value: u64) -> Result<Self, GrowthError> {
        LengthDistribution::new(vec![value], vec![1.0])
    }

    /// Equal probability on each of the given values.
    pub fn uniform_over(values: Vec<u64>) -> Result<Self, GrowthError> {
        let k = values.len();
        LengthDistribution::new(values, vec![1.0 / k as f64; k])
    }

    /// The unused distribution (for `nu = 0`).
    pub fn empty() -> Self {
        LengthDistribution {
            values: Vec::new(),
            probs: Vec::new(),
            cumulative: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn value_at(&self, index: usize) -> u64 {
        self.values[index]
    }

    pub fn prob_at(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Inverse-CDF lookup: smallest index whose cumulative probability is
    /// >= `u`. A `u` exactly on a boundary resolves to the lower index.
    pub fn index_for(&self, u: f64) -> usize {
        debug_assert!(!self.is_empty());
        for (i, &c) in self.cumulative.iter().enumerate() {
            if u <= c {
                return i;
            }
        }
        self.values.len() - 1
    }
}

/// Which growth operation a spec applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthKind {
    Vugm,
    Eugm,
    Mugm,
}

impl std::fmt::Display for GrowthKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GrowthKind::Vugm => "vugm",
            GrowthKind::Eugm => "eugm",
            GrowthKind::Mugm => "mugm",
        };
        f.write_str(s)
    }
}

/// Full description of one growth operation: kind, multiplicities, and the
/// length distributions. Together with a seed tree and a step count this
/// determines a tree family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GrowthSpecRepr", into = "GrowthSpecRepr")]
pub struct GrowthSpec {
    pub kind: GrowthKind,
    pub mu: u64,
    pub nu: u64,
    pub m_dist: LengthDistribution,
    pub n_dist: LengthDistribution,
}

#[derive(Serialize, Deserialize)]
struct GrowthSpecRepr {
    kind: GrowthKind,
    mu: u64,
    nu: u64,
    m: LengthDistribution,
    n: LengthDistribution,
}

impl From<GrowthSpec> for GrowthSpecRepr {
    fn from(s: GrowthSpec) -> Self {
        GrowthSpecRepr {
            kind: s.kind,
            mu: s.mu,
            nu: s.nu,
            m: s.m_dist,
            n: s.n_dist,
        }
    }
}

impl TryFrom<GrowthSpecRepr> for GrowthSpec {
    type Error = GrowthError;
    fn try_from(r: GrowthSpecRepr) -> Result<Self, Self::Error> {
        GrowthSpec::new(r.kind, r.mu, r.nu, r.m, r.n)
    }
}

impl GrowthSpec {
    pub fn new(
        kind: GrowthKind,
        mu: u64,
        nu: u64,
        m_dist: LengthDistribution,
        n_dist: LengthDistribution,
    ) -> Result<Self, GrowthError> {
        if mu == 0 {
            return Err(GrowthError::MuZero);
        }
        if m_dist.is_empty() {
            return Err(GrowthError::EmptyDistribution);
        }
        match kind {
            GrowthKind::Vugm | GrowthKind::Mugm => {
                if nu != 0 {
                    return Err(GrowthError::UnusedParameter { kind, param: "nu" });
                }
                if !n_dist.is_empty() {
                    return Err(GrowthError::UnusedParameter {
                        kind,
                        param: "n_dist",
                    });
                }
                if kind == GrowthKind::Mugm && mu < 2 {
                    return Err(GrowthError::MuTooSmall(mu));
                }
            }
            GrowthKind::Eugm => {
                if nu > 0 && n_dist.is_empty() {
                    return Err(GrowthError::TentacleDistribution { nu, state: "empty" });
                }
                if nu == 0 && !n_dist.is_empty() {
                    return Err(GrowthError::TentacleDistribution {
                        nu,
                        state: "nonempty",
                    });
                }
            }
        }
        Ok(GrowthSpec {
            kind,
            mu,
            nu,
            m_dist,
            n_dist,
        })
    }

    pub fn vugm(mu: u64, m_dist: LengthDistribution) -> Result<Self, GrowthError> {
        GrowthSpec::new(GrowthKind::Vugm, mu, 0, m_dist, LengthDistribution::empty())
    }

    /// Edge-based spec. `mu` plays no role in the operation itself (each
    /// edge takes a single m-draw), so it is fixed at 1 here.
    pub fn eugm(
        nu: u64,
        m_dist: LengthDistribution,
        n_dist: LengthDistribution,
    ) -> Result<Self, GrowthError> {
        GrowthSpec::new(GrowthKind::Eugm, 1, nu, m_dist, n_dist)
    }

    pub fn mugm(mu: u64, m_dist: LengthDistribution) -> Result<Self, GrowthError> {
        GrowthSpec::new(GrowthKind::Mugm, mu, 0, m_dist, LengthDistribution::empty())
    }
}

/// Reproducible stream of uniform deviates: a master seed plus a stream
/// index. Equal `(seed, index)` pairs replay the same sequence; distinct
/// indices give independent streams for parallel replicates.
#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
        rng.set_stream(stream);
        RngStream {
            master_seed,
            stream,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh stream with the same master seed and a different index,
    /// starting from the beginning of its sequence.
    pub fn substream(&self, stream: u64) -> Self {
        RngStream::new(self.master_seed, stream)
    }

    /// Uniform deviate in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    /// Uniform index in `0..k`.
    pub fn pick(&mut self, k: usize) -> usize {
        self.rng.random_range(0..k)
    }
}

/// Source of path-length draws. The production implementation is
/// [`RngStream`]; verification code substitutes scripted samplers to walk
/// the entire outcome space of a growth step.
pub trait LengthSampler {
    fn draw(&mut self, dist: &LengthDistribution) -> Result<u64, GrowthError>;
}

impl LengthSampler for RngStream {
    fn draw(&mut self, dist: &LengthDistribution) -> Result<u64, GrowthError> {
        if dist.is_empty() {
            return Err(GrowthError::EmptyDistribution);
        }
        Ok(dist.value_at(dist.index_for(self.uniform())))
    }
}

/// Edge accumulator for a tree under construction.
struct TreeBuilder {
    next_id: usize,
    edges: Vec<(usize, usize)>,
    cap: u64,
}

impl TreeBuilder {
    fn new(n: usize, cap: u64) -> Result<Self, GrowthError> {
        if n as u64 > cap {
            return Err(GrowthError::TooLarge {
                realized: n as u64,
                cap,
            });
        }
        Ok(TreeBuilder {
            next_id: n,
            edges: Vec::new(),
            cap,
        })
    }

    fn fresh_vertex(&mut self) -> Result<usize, GrowthError> {
        if self.next_id as u64 >= self.cap {
            return Err(GrowthError::TooLarge {
                realized: self.next_id as u64 + 1,
                cap: self.cap,
            });
        }
        let id = self.next_id;
        self.next_id += 1;
        Ok(id)
    }

    /// Attach a pendant path of `len` fresh vertices to `at`; returns the
    /// vertex ids in order of distance from `at`.
    fn attach_path(&mut self, at: usize, len: u64) -> Result<Vec<usize>, GrowthError> {
        let mut ids = Vec::with_capacity(len as usize);
        let mut prev = at;
        for _ in 0..len {
            let id = self.fresh_vertex()?;
            self.edges.push((prev, id));
            prev = id;
            ids.push(id);
        }
        Ok(ids)
    }

    fn finish(self) -> Result<Tree, GrowthError> {
        Ok(Tree::from_edges(self.next_id, self.edges)?)
    }
}

/// One step of the vertex-based mechanism: every vertex of the input gains
/// `mu` pendant paths, each path's vertex count drawn independently.
///
/// Draw order: vertices ascending, path slots ascending.
pub fn apply_vugm<S: LengthSampler>(
    tree: &Tree,
    spec: &GrowthSpec,
    sampler: &mut S,
) -> Result<Tree, GrowthError> {
    apply_vugm_capped(tree, spec, sampler, u64::MAX)
}

pub fn apply_vugm_capped<S: LengthSampler>(
    tree: &Tree,
    spec: &GrowthSpec,
    sampler: &mut S,
    cap: u64,
) -> Result<Tree, GrowthError> {
    expect_kind(spec, GrowthKind::Vugm)?;
    let mut builder = TreeBuilder::new(tree.n(), cap)?;
    builder.edges.extend_from_slice(tree.edges());
    for v in 0..tree.n() {
        for _slot in 0..spec.mu {
            let len = sampler.draw(&spec.m_dist)?;
            builder.attach_path(v, len)?;
        }
    }
    builder.finish()
}

/// One step of the edge-based mechanism: every edge is subdivided by `m`
/// fresh vertices (a single m-draw per edge), and each inserted vertex gains
/// `nu` tentacle paths with independently drawn vertex counts.
///
/// Draw order: edges in sorted order; per edge, the m-draw first, then the
/// tentacle draws for inserted vertices from the `u` side to the `v` side,
/// tentacle slots ascending.
pub fn apply_eugm<S: LengthSampler>(
    tree: &Tree,
    spec: &GrowthSpec,
    sampler: &mut S,
) -> Result<Tree, GrowthError> {
    apply_eugm_capped(tree, spec, sampler, u64::MAX)
}

pub fn apply_eugm_capped<S: LengthSampler>(
    tree: &Tree,
    spec: &GrowthSpec,
    sampler: &mut S,
    cap: u64,
) -> Result<Tree, GrowthError> {
    expect_kind(spec, GrowthKind::Eugm)?;
    let mut builder = TreeBuilder::new(tree.n(), cap)?;
    for &(u, v) in tree.edges() {
        let m = sampler.draw(&spec.m_dist)?;
        let inserted = subdivide(&mut builder, u, v, m)?;
        for w in inserted {
            for _tentacle in 0..spec.nu {
                let len = sampler.draw(&spec.n_dist)?;
                builder.attach_path(w, len)?;
            }
        }
    }
    builder.finish()
}

/// One step of the mixture mechanism: each edge `{u, v}` is subdivided by
/// `m_u + m_v` fresh vertices (independent draws per endpoint, the `u` block
/// adjacent to `u`), then every vertex of degree `k < mu` gains `mu - k`
/// pendant paths with independent draws. Requires seed max degree <= `mu`;
/// the output max degree is again <= `mu`, so the step iterates.
///
/// Draw order: edges in sorted order (per edge `m_u` then `m_v`), then
/// vertices ascending, path slots ascending.
pub fn apply_mugm<S: LengthSampler>(
    tree: &Tree,
    spec: &GrowthSpec,
    sampler: &mut S,
) -> Result<Tree, GrowthError> {
    apply_mugm_capped(tree, spec, sampler, u64::MAX)
}

pub fn apply_mugm_capped<S: LengthSampler>(
    tree: &Tree,
    spec: &GrowthSpec,
    sampler: &mut S,
    cap: u64,
) -> Result<Tree, GrowthError> {
    expect_kind(spec, GrowthKind::Mugm)?;
    let max_degree = tree.max_degree();
    if max_degree as u64 > spec.mu {
        return Err(GrowthError::DegreeExceedsMu {
            max_degree,
            mu: spec.mu,
        });
    }
    let mut builder = TreeBuilder::new(tree.n(), cap)?;
    for &(u, v) in tree.edges() {
        let m_u = sampler.draw(&spec.m_dist)?;
        let m_v = sampler.draw(&spec.m_dist)?;
        // One chain of m_u + m_v vertices; placement within the chain does
        // not affect any path length through or out of the edge.
        subdivide(&mut builder, u, v, m_u + m_v)?;
    }
    for v in 0..tree.n() {
        let deficit = spec.mu - tree.degree(v) as u64;
        for _slot in 0..deficit {
            let len = sampler.draw(&spec.m_dist)?;
            builder.attach_path(v, len)?;
        }
    }
    builder.finish()
}

/// Replace edge `{u, v}` by a chain `u - w1 - ... - wm - v` of fresh
/// vertices; returns the inserted ids in order from `u` to `v`.
fn subdivide(
    builder: &mut TreeBuilder,
    u: usize,
    v: usize,
    m: u64,
) -> Result<Vec<usize>, GrowthError> {
    if m == 0 {
        builder.edges.push((u, v));
        return Ok(Vec::new());
    }
    let inserted = builder.attach_path(u, m)?;
    builder.edges.push((*inserted.last().expect("m >= 1"), v));
    Ok(inserted)
}

/// Iterate the spec's operation `t` times starting from `seed`.
/// `t = 0` returns the seed unchanged.
pub fn grow(
    seed: &Tree,
    spec: &GrowthSpec,
    t: u64,
    rng: &mut RngStream,
) -> Result<Tree, GrowthError> {
    grow_capped(seed, spec, t, rng, u64::MAX)
}

/// Like [`grow`], refusing to build trees larger than `cap` vertices.
pub fn grow_capped(
    seed: &Tree,
    spec: &GrowthSpec,
    t: u64,
    rng: &mut RngStream,
    cap: u64,
) -> Result<Tree, GrowthError> {
    grow_with_sampler(seed, spec, t, rng, cap)
}

/// [`grow`] with an explicit sampling strategy (see [`LengthSampler`]).
pub fn grow_with_sampler<S: LengthSampler>(
    seed: &Tree,
    spec: &GrowthSpec,
    t: u64,
    sampler: &mut S,
    cap: u64,
) -> Result<Tree, GrowthError> {
    let mut current = seed.clone();
    for _ in 0..t {
        current = match spec.kind {
            GrowthKind::Vugm => apply_vugm_capped(&current, spec, sampler, cap)?,
            GrowthKind::Eugm => apply_eugm_capped(&current, spec, sampler, cap)?,
            GrowthKind::Mugm => apply_mugm_capped(&current, spec, sampler, cap)?,
        };
    }
    Ok(current)
}

fn expect_kind(spec: &GrowthSpec, expected: GrowthKind) -> Result<(), GrowthError> {
    if spec.kind != expected {
        return Err(GrowthError::KindMismatch {
            expected,
            got: spec.kind,
        });
    }
    Ok(())
}

/// Errors from preset lookup.
#[derive(Debug, Error, PartialEq)]
pub enum PresetError {
    #[error("unknown preset {0:?}; see preset_list()")]
    Unknown(String),
    #[error("preset {name} requires parameter {param}")]
    MissingParameter { name: &'static str, param: &'static str },
    #[error("preset {name}: parameter must be {requirement}, got {got}")]
    BadParameter {
        name: &'static str,
        requirement: &'static str,
        got: u64,
    },
    #[error(transparent)]
    Growth(#[from] GrowthError),
}

/// One entry of the preset catalog.
pub struct PresetInfo {
    pub name: &'static str,
    pub parameter: Option<&'static str>,
    pub description: &'static str,
}

/// The deterministic named families.
pub fn preset_list() -> Vec<PresetInfo> {
    vec![
        PresetInfo {
            name: "y1",
            parameter: Some("mu >= 1"),
            description: "deterministic uniform growth tree: edge seed, \
                          vertex-based, mu single-vertex paths per vertex",
        },
        PresetInfo {
            name: "t-graph",
            parameter: None,
            description: "T-graph: edge seed, edge-based with m=1, one \
                          single-vertex tentacle per inserted vertex",
        },
        PresetInfo {
            name: "vicsek",
            parameter: Some("mu >= 2"),
            description: "Vicsek fractal: star seed S_mu, mixture growth \
                          with m=1",
        },
        PresetInfo {
            name: "nu-fractal",
            parameter: Some("nu >= 1"),
            description: "nu-fractal tree: edge seed, edge-based with m=1 \
                          and nu single-vertex tentacles",
        },
        PresetInfo {
            name: "subdivision",
            parameter: Some("m >= 1"),
            description: "m-th order subdivision: edge seed, edge-based \
                          with m inserted vertices and no tentacles",
        },
    ]
}

/// Resolve a preset name (plus its parameter, where one is required) into a
/// seed tree and growth spec.
pub fn preset(name: &str, param: Option<u64>) -> Result<(Tree, GrowthSpec), PresetError> {
    let one = || LengthDistribution::constant(1).expect("constant(1) is valid");
    match name {
        "y1" => {
            let mu = param.unwrap_or(1);
            if mu < 1 {
                return Err(PresetError::BadParameter {
                    name: "y1",
                    requirement: ">= 1",
                    got: mu,
                });
            }
            let spec = GrowthSpec::vugm(mu, one())?;
            Ok((Tree::path(2).expect("edge seed is valid"), spec))
        }
        "t-graph" => {
            let spec = GrowthSpec::eugm(1, one(), one())?;
            Ok((Tree::path(2).expect("edge seed is valid"), spec))
        }
        "vicsek" => {
            let mu = param.ok_or(PresetError::MissingParameter {
                name: "vicsek",
                param: "mu",
            })?;
            if mu < 2 {
                return Err(PresetError::BadParameter {
                    name: "vicsek",
                    requirement: ">= 2",
                    got: mu,
                });
            }
            let spec = GrowthSpec::mugm(mu, one())?;
            Ok((Tree::star(mu as usize).expect("star seed is valid"), spec))
        }
        "nu-fractal" => {
            let nu = param.ok_or(PresetError::MissingParameter {
                name: "nu-fractal",
                param: "nu",
            })?;
            if nu < 1 {
                return Err(PresetError::BadParameter {
                    name: "nu-fractal",
                    requirement: ">= 1",
                    got: nu,
                });
            }
            let spec = GrowthSpec::eugm(nu, one(), one())?;
            Ok((Tree::path(2).expect("edge seed is valid"), spec))
        }
        "subdivision" => {
            let m = param.ok_or(PresetError::MissingParameter {
                name: "subdivision",
                param: "m",
            })?;
            if m < 1 {
                return Err(PresetError::BadParameter {
                    name: "subdivision",
                    requirement: ">= 1",
                    got: m,
                });
            }
            let spec = GrowthSpec::eugm(
                0,
                LengthDistribution::constant(m)?,
                LengthDistribution::empty(),
            )?;
            Ok((Tree::path(2).expect("edge seed is valid"), spec))
        }
        other => Err(PresetError::Unknown(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn const_dist(v: u64) -> LengthDistribution {
        LengthDistribution::constant(v).unwrap()
    }

    fn is_path(t: &Tree) -> bool {
        t.n() == 1 || (t.max_degree() <= 2 && t.diameter() as usize == t.n() - 1)
    }

    #[test]
    fn distribution_validation() {
        assert!(LengthDistribution::new(vec![1, 2], vec![0.5, 0.5]).is_ok());
        assert_eq!(
            LengthDistribution::new(vec![1], vec![0.5, 0.5]),
            Err(GrowthError::MismatchedLengths { values: 1, probs: 2 })
        );
        assert_eq!(
            LengthDistribution::new(vec![1, 1], vec![0.5, 0.5]),
            Err(GrowthError::DuplicateValue(1))
        );
        assert_eq!(
            LengthDistribution::new(vec![0], vec![1.0]),
            Err(GrowthError::ZeroValue(0))
        );
        assert_eq!(
            LengthDistribution::new(vec![1, 2], vec![-0.1, 1.1]),
            Err(GrowthError::BadProbability(-0.1))
        );
        assert_eq!(
            LengthDistribution::new(vec![1, 2], vec![0.5, 0.6]),
            Err(GrowthError::ProbabilitySum(1.1))
        );
        // No silent renormalization: off by more than tolerance is an error.
        assert!(LengthDistribution::new(vec![1], vec![1.0 + 1e-10]).is_err());
        assert!(LengthDistribution::new(vec![1], vec![1.0 + 1e-13]).is_ok());
    }

    #[test]
    fn inverse_cdf_tie_breaks_low() {
        let d = LengthDistribution::new(vec![3, 7], vec![0.25, 0.75]).unwrap();
        assert_eq!(d.index_for(0.0), 0);
        assert_eq!(d.index_for(0.2), 0);
        assert_eq!(d.index_for(0.25), 0); // boundary goes to the lower index
        assert_eq!(d.index_for(0.26), 1);
        assert_eq!(d.index_for(0.999999), 1);
    }

    #[test]
    fn spec_validation() {
        let m = const_dist(1);
        assert!(GrowthSpec::vugm(3, m.clone()).is_ok());
        assert_eq!(
            GrowthSpec::vugm(0, m.clone()),
            Err(GrowthError::MuZero)
        );
        assert_eq!(
            GrowthSpec::mugm(1, m.clone()),
            Err(GrowthError::MuTooSmall(1))
        );
        assert_eq!(
            GrowthSpec::eugm(1, m.clone(), LengthDistribution::empty()),
            Err(GrowthError::TentacleDistribution { nu: 1, state: "empty" })
        );
        assert_eq!(
            GrowthSpec::eugm(0, m.clone(), const_dist(1)),
            Err(GrowthError::TentacleDistribution { nu: 0, state: "nonempty" })
        );
        assert_eq!(
            GrowthSpec::new(GrowthKind::Vugm, 1, 1, m.clone(), LengthDistribution::empty()),
            Err(GrowthError::UnusedParameter { kind: GrowthKind::Vugm, param: "nu" })
        );
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = GrowthSpec::eugm(
            2,
            LengthDistribution::new(vec![1, 2], vec![0.5, 0.5]).unwrap(),
            const_dist(1),
        )
        .unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains(r#""kind":"eugm""#));
        assert!(text.contains(r#""m":{"values":[1,2]"#));
        let back: GrowthSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        // Deserialization re-validates.
        let bad = r#"{"kind":"vugm","mu":0,"nu":0,"m":{"values":[1],"probs":[1.0]},"n":{"values":[],"probs":[]}}"#;
        assert!(serde_json::from_str::<GrowthSpec>(bad).is_err());
    }

    #[test]
    fn vugm_deterministic_examples() {
        let edge = Tree::path(2).unwrap();
        let spec = GrowthSpec::vugm(3, const_dist(1)).unwrap();
        let mut rng = RngStream::new(7, 0);
        let grown = apply_vugm(&edge, &spec, &mut rng).unwrap();
        assert_eq!(grown.n(), 8);
        assert_eq!(grown.wiener_fast().unwrap(), 58);
        let mut degs = grown.degrees();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 1, 1, 1, 1, 1, 4, 4]);

        let single = Tree::single_vertex();
        let spec = GrowthSpec::vugm(1, const_dist(1)).unwrap();
        let grown = apply_vugm(&single, &spec, &mut rng).unwrap();
        assert_eq!(grown, Tree::path(2).unwrap());
    }

    #[test]
    fn vugm_stochastic_outcome_space() {
        // Edge seed, mu = 1, m uniform on {1, 2}: the four equiprobable
        // outcomes have 4, 5, 5, 6 vertices, mean 5.
        let edge = Tree::path(2).unwrap();
        let spec =
            GrowthSpec::vugm(1, LengthDistribution::uniform_over(vec![1, 2]).unwrap()).unwrap();
        let replicates = 4096;
        let mut counts = std::collections::HashMap::new();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for r in 0..replicates {
            let mut rng = RngStream::new(42, r);
            let grown = apply_vugm(&edge, &spec, &mut rng).unwrap();
            *counts.entry(grown.n()).or_insert(0u32) += 1;
            sum += grown.n() as f64;
            sum_sq += (grown.n() as f64).powi(2);
        }
        let mut sizes: Vec<usize> = counts.keys().copied().collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![4, 5, 6]);
        let mean = sum / replicates as f64;
        let var = (sum_sq - sum * sum / replicates as f64) / (replicates as f64 - 1.0);
        let se = (var / replicates as f64).sqrt();
        assert!((mean - 5.0).abs() < 4.0 * se, "mean={mean} se={se}");
    }

    #[test]
    fn eugm_examples() {
        let edge = Tree::path(2).unwrap();
        let mut rng = RngStream::new(1, 0);

        // T-graph generation 1 is the 3-leaf star.
        let (seed, spec) = preset("t-graph", None).unwrap();
        let grown = apply_eugm(&seed, &spec, &mut rng).unwrap();
        assert_eq!(grown.n(), 4);
        assert_eq!(grown.wiener_fast().unwrap(), 9);
        assert_eq!(grown.max_degree(), 3);

        // Pure subdivision by 2 turns an edge into a path on 4 vertices.
        let spec = GrowthSpec::eugm(0, const_dist(2), LengthDistribution::empty()).unwrap();
        let grown = apply_eugm(&edge, &spec, &mut rng).unwrap();
        assert_eq!(grown.n(), 4);
        assert!(is_path(&grown));

        // Path seed: n' = 2n + 1 under m=1, nu=1, n=1.
        let p3 = Tree::path(3).unwrap();
        let spec = GrowthSpec::eugm(1, const_dist(1), const_dist(1)).unwrap();
        let grown = apply_eugm(&p3, &spec, &mut rng).unwrap();
        assert_eq!(grown.n(), 7);
    }

    #[test]
    fn mugm_examples() {
        let mut rng = RngStream::new(3, 0);

        // Star S_2 (= P3) with mu = 2, m = 1 grows into the 9-path.
        let spec = GrowthSpec::mugm(2, const_dist(1)).unwrap();
        let grown = apply_mugm(&Tree::path(3).unwrap(), &spec, &mut rng).unwrap();
        assert_eq!(grown.n(), 9);
        assert!(is_path(&grown));

        // Star seeds give Vicsek generation 1 on (mu+1)^2 vertices.
        for mu in 2..=4u64 {
            let spec = GrowthSpec::mugm(mu, const_dist(1)).unwrap();
            let grown = apply_mugm(&Tree::star(mu as usize).unwrap(), &spec, &mut rng).unwrap();
            assert_eq!(grown.n(), ((mu + 1) * (mu + 1)) as usize);
            assert_eq!(grown.max_degree() as u64, mu);
        }

        // Edge seed with mu = 2: both endpoints have degree 1, so each gains
        // one pendant path; the edge gains two inserted vertices. P6 results.
        let spec = GrowthSpec::mugm(2, const_dist(1)).unwrap();
        let grown = apply_mugm(&Tree::path(2).unwrap(), &spec, &mut rng).unwrap();
        assert_eq!(grown.n(), 6);
        assert!(is_path(&grown));

        // Degree precondition.
        let spec = GrowthSpec::mugm(2, const_dist(1)).unwrap();
        let err = apply_mugm(&Tree::star(3).unwrap(), &spec, &mut rng);
        assert_eq!(
            err,
            Err(GrowthError::DegreeExceedsMu { max_degree: 3, mu: 2 })
        );
    }

    #[test]
    fn grow_examples() {
        let mut rng = RngStream::new(11, 0);

        let (seed, spec) = preset("t-graph", None).unwrap();
        let t2 = grow(&seed, &spec, 2, &mut rng).unwrap();
        assert_eq!(t2.n(), 10);

        let any = Tree::star(4).unwrap();
        let spec_v = GrowthSpec::vugm(2, const_dist(3)).unwrap();
        assert_eq!(grow(&any, &spec_v, 0, &mut rng).unwrap(), any);

        let (seed, spec) = preset("vicsek", Some(2)).unwrap();
        let v2 = grow(&seed, &spec, 2, &mut rng).unwrap();
        assert_eq!(v2.n(), 27);
    }

    #[test]
    fn grow_is_deterministic_per_stream() {
        let (seed, _) = preset("t-graph", None).unwrap();
        let spec = GrowthSpec::eugm(
            1,
            LengthDistribution::uniform_over(vec![1, 2, 3]).unwrap(),
            LengthDistribution::uniform_over(vec![1, 2]).unwrap(),
        )
        .unwrap();
        let a = grow(&seed, &spec, 3, &mut RngStream::new(99, 5)).unwrap();
        let b = grow(&seed, &spec, 3, &mut RngStream::new(99, 5)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = grow(&seed, &spec, 3, &mut RngStream::new(99, 6)).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn mugm_stays_iterable() {
        let spec = GrowthSpec::mugm(
            3,
            LengthDistribution::uniform_over(vec![1, 2]).unwrap(),
        )
        .unwrap();
        let mut rng = RngStream::new(8, 0);
        let mut tree = Tree::star(3).unwrap();
        for _ in 0..3 {
            tree = apply_mugm(&tree, &spec, &mut rng).unwrap();
            assert!(tree.max_degree() <= 3);
        }
    }

    #[test]
    fn vugm_and_mugm_consume_identical_draw_sequences() {
        // Both mechanisms take exactly mu * n draws per step, so matched
        // streams produce identical realized vertex counts.
        let m = LengthDistribution::uniform_over(vec![1, 2, 4]).unwrap();
        let seed = Tree::path(4).unwrap();
        for s in 0..20 {
            let spec_v = GrowthSpec::vugm(2, m.clone()).unwrap();
            let spec_m = GrowthSpec::mugm(2, m.clone()).unwrap();
            let a = apply_vugm(&seed, &spec_v, &mut RngStream::new(5, s)).unwrap();
            let b = apply_mugm(&seed, &spec_m, &mut RngStream::new(5, s)).unwrap();
            assert_eq!(a.n(), b.n());
        }
    }

    #[test]
    fn growth_respects_cap() {
        let (seed, spec) = preset("t-graph", None).unwrap();
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(
            grow_capped(&seed, &spec, 5, &mut rng, 100),
            Err(GrowthError::TooLarge { .. })
        ));
        let mut rng = RngStream::new(0, 0);
        assert_eq!(grow_capped(&seed, &spec, 3, &mut rng, 100).unwrap().n(), 28);
    }

    #[test]
    fn preset_configurations() {
        let (seed, spec) = preset("t-graph", None).unwrap();
        assert_eq!(seed, Tree::path(2).unwrap());
        assert_eq!(spec.kind, GrowthKind::Eugm);
        assert_eq!(spec.nu, 1);
        assert_eq!(spec.m_dist.values(), &[1]);
        assert_eq!(spec.n_dist.values(), &[1]);

        let (seed, spec) = preset("vicsek", Some(3)).unwrap();
        assert_eq!(seed, Tree::star(3).unwrap());
        assert_eq!(spec.kind, GrowthKind::Mugm);
        assert_eq!(spec.mu, 3);

        let (_, spec) = preset("subdivision", Some(1)).unwrap();
        assert_eq!(spec.kind, GrowthKind::Eugm);
        assert_eq!(spec.nu, 0);
        assert!(spec.n_dist.is_empty());

        let (_, spec) = preset("y1", Some(4)).unwrap();
        assert_eq!((spec.kind, spec.mu), (GrowthKind::Vugm, 4));

        assert!(matches!(preset("petersen", None), Err(PresetError::Unknown(_))));
        assert!(matches!(
            preset("vicsek", Some(1)),
            Err(PresetError::BadParameter { .. })
        ));
        assert!(matches!(
            preset("vicsek", None),
            Err(PresetError::MissingParameter { .. })
        ));
        assert_eq!(preset_list().len(), 5);
    }
}
