//! Experiment configuration and the command implementations behind the
//! `grovetree` binary.
//!
//! The binary itself only parses arguments and prints; everything it does is
//! a function here returning a serializable report, so library users and the
//! runnable examples get the same behavior.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{self, AnalyticReport, CriticalityClass, Family, SeedSummary};
use crate::growth::{
    self, grow_capped, GrowthError, GrowthKind, GrowthSpec, PresetError, RngStream,
};
use crate::tree::{Tree, TreeError};
use crate::walk::{
    self, HittingTable, McEstimate, WalkConfig, WalkError, JACOBI_SIZE_CAP, SOLVER_SIZE_CAP,
};

/// Environment variable capping the size of any constructed tree.
pub const MAX_N_ENV: &str = "GROVETREE_MAX_N";

/// Predicted Wiener indices above this refuse to run rather than risk
/// overflowing the 128-bit exact accumulators.
const WIENER_WIDTH_LIMIT: f64 = 1.5e38;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Growth(GrowthError),
    #[error(transparent)]
    Preset(#[from] PresetError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Walk(WalkError),
    #[error("resource cap: {0}")]
    ResourceCap(String),
}

impl From<GrowthError> for DriverError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::TooLarge { realized, cap } => DriverError::ResourceCap(format!(
                "tree would reach {realized} vertices (cap {cap}; see {MAX_N_ENV})"
            )),
            other => DriverError::Growth(other),
        }
    }
}

impl From<WalkError> for DriverError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::SizeCap { n, cap, what } => {
                DriverError::ResourceCap(format!("{what} capped at {cap} vertices, tree has {n}"))
            }
            other => DriverError::Walk(other),
        }
    }
}

impl DriverError {
    /// Process exit code: 1 usage/config, 3 resource caps.
    /// (Verification failures exit 2, decided from the reports, not errors.)
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::ResourceCap(_) => 3,
            DriverError::Tree(TreeError::Overflow(_)) => 3,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Seed tree: inline `{"n": ..., "edges": ...}` or `{"path": "..."}`
/// pointing at a JSON or edge-list file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSource {
    Inline(Tree),
    File { path: PathBuf },
}

impl SeedSource {
    pub fn resolve(&self) -> Result<Tree, DriverError> {
        match self {
            SeedSource::Inline(tree) => Ok(tree.clone()),
            SeedSource::File { path } => read_tree_file(path),
        }
    }
}

/// Read a tree from disk, JSON or edge-list text according to extension.
pub fn read_tree_file(path: &Path) -> Result<Tree, DriverError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DriverError::Config(format!("seed file {}: {e}", path.display())))?;
    if path.extension().is_some_and(|ext| ext == "json") {
        Ok(Tree::from_json(&text)?)
    } else {
        Ok(Tree::from_edge_list_text(&text)?)
    }
}

fn default_replicates() -> u64 {
    1
}

/// One experiment: a growth spec, a seed, the generation(s) to look at, and
/// sampling/output settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: GrowthSpec,
    pub seed: SeedSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_range: Option<(u64, u64)>,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, DriverError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DriverError::Config(format!("config {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| DriverError::Config(format!("config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Config for a named preset family at generation `t`.
    pub fn from_preset(name: &str, param: Option<u64>, t: u64) -> Result<Self, DriverError> {
        let (seed, spec) = growth::preset(name, param)?;
        Ok(ExperimentConfig {
            spec,
            seed: SeedSource::Inline(seed),
            t: Some(t),
            t_range: None,
            replicates: 1,
            rng_seed: 0,
            format: OutputFormat::Json,
            out: None,
        })
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        if self.replicates < 1 {
            return Err(DriverError::Config("replicates must be >= 1".into()));
        }
        match (self.t, self.t_range) {
            (None, None) => Err(DriverError::Config("one of t or t_range is required".into())),
            (Some(_), Some(_)) => Err(DriverError::Config(
                "t and t_range are mutually exclusive".into(),
            )),
            (_, Some((lo, hi))) if lo > hi => {
                Err(DriverError::Config(format!("empty t_range [{lo}, {hi}]")))
            }
            _ => Ok(()),
        }
    }

    /// The single generation this config points at (first of the range).
    pub fn first_t(&self) -> u64 {
        self.t.unwrap_or_else(|| self.t_range.map_or(0, |(lo, _)| lo))
    }

    pub fn t_values(&self) -> Vec<u64> {
        match (self.t, self.t_range) {
            (Some(t), _) => vec![t],
            (None, Some((lo, hi))) => (lo..=hi).collect(),
            (None, None) => vec![],
        }
    }
}

/// Size cap from `GROVETREE_MAX_N` (default: unlimited).
pub fn max_n_cap() -> Result<u64, DriverError> {
    match std::env::var(MAX_N_ENV) {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| DriverError::Config(format!("{MAX_N_ENV}={text} is not an integer"))),
        Err(_) => Ok(u64::MAX),
    }
}

/// Refuse configurations whose predicted Wiener index cannot fit the exact
/// 128-bit accumulators.
fn check_predicted_width(report: &AnalyticReport) -> Result<(), DriverError> {
    if !report.expected_w.is_finite() || report.expected_w > WIENER_WIDTH_LIMIT {
        return Err(DriverError::ResourceCap(format!(
            "predicted Wiener index {:.3e} exceeds the 128-bit accumulator",
            report.expected_w
        )));
    }
    Ok(())
}

fn grown_tree(config: &ExperimentConfig, t: u64, stream: u64) -> Result<Tree, DriverError> {
    let seed = config.seed.resolve()?;
    let mut rng = RngStream::new(config.rng_seed, stream);
    Ok(grow_capped(&seed, &config.spec, t, &mut rng, max_n_cap()?)?)
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

/// Result of `generate`: the tree plus its headline exact quantities.
#[derive(Clone, Debug, Serialize)]
pub struct GenerateOutput {
    pub n: usize,
    pub w: u128,
    pub mfpt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub written_to: Option<PathBuf>,
    #[serde(skip)]
    pub tree: Tree,
}

/// Grow the configured tree, write it to `config.out` (JSON or edge-list
/// text per `config.format`), and report n, W, MFPT.
pub fn generate(config: &ExperimentConfig) -> Result<GenerateOutput, DriverError> {
    let t = config.first_t();
    let seed = config.seed.resolve()?;
    let report = AnalyticReport::for_spec(&SeedSummary::from_tree(&seed)?, &config.spec, t);
    check_predicted_width(&report)?;
    let tree = grown_tree(config, t, 0)?;
    let w = tree.wiener_fast()?;
    let mfpt = if tree.n() > 1 {
        walk::mfpt_exact(&tree)?
    } else {
        0.0
    };
    if let Some(path) = &config.out {
        let payload = match config.format {
            OutputFormat::Json => tree.to_json(),
            OutputFormat::Csv => tree.to_edge_list_text(),
        };
        std::fs::write(path, payload)?;
    }
    Ok(GenerateOutput {
        n: tree.n(),
        w,
        mfpt,
        written_to: config.out.clone(),
        tree,
    })
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

/// Closed-form predictions for the configured generation.
pub fn predict(config: &ExperimentConfig) -> Result<AnalyticReport, DriverError> {
    let seed = config.seed.resolve()?;
    let summary = SeedSummary::from_tree(&seed)?;
    if config.spec.kind == GrowthKind::Mugm {
        let max_degree = seed.max_degree();
        if max_degree as u64 > config.spec.mu {
            return Err(DriverError::Growth(GrowthError::DegreeExceedsMu {
                max_degree,
                mu: config.spec.mu,
            }));
        }
    }
    Ok(AnalyticReport::for_spec(
        &summary,
        &config.spec,
        config.first_t(),
    ))
}

// ---------------------------------------------------------------------------
// verify-identities
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub detail: String,
}

impl CheckResult {
    fn passed(name: &str, max_error: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            max_error,
            detail: detail.into(),
        }
    }

    fn failed(name: &str, max_error: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            max_error,
            detail: detail.into(),
        }
    }

    fn skipped(name: &str, why: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            max_error: 0.0,
            detail: format!("skipped: {}", why.into()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub tree_n: usize,
    pub t: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Run the full identity suite on the configured instance: the first-passage
/// identities on the constructed tree (against the linear-solve oracle), the
/// spectral cross-check when the tree is small enough, and the closed-form
/// self-consistency identities for the spec's parameters.
pub fn verify_identities(config: &ExperimentConfig) -> Result<IdentityReport, DriverError> {
    let t = config.first_t();
    let seed = config.seed.resolve()?;
    let summary = SeedSummary::from_tree(&seed)?;
    let tree = grown_tree(config, t, 0)?;

    let mut checks = vec![
        check_wiener_consistency(&tree)?,
        check_lemma1(&tree)?,
        check_corollary3(&tree)?,
    ];
    if tree.n() <= SOLVER_SIZE_CAP && tree.n() >= 2 {
        let table = walk::hitting_times_solve(&tree)?;
        checks.push(check_proposition2(&tree, &table)?);
        checks.push(check_fpt_additivity(&tree, &table));
        checks.push(check_theorem4(&tree, &table)?);
    } else {
        let why = format!("n = {} over solver cap {SOLVER_SIZE_CAP}", tree.n());
        checks.push(CheckResult::skipped("proposition-2", why.clone()));
        checks.push(CheckResult::skipped("fpt-additivity", why.clone()));
        checks.push(CheckResult::skipped("theorem-4", why));
    }
    if tree.n() <= JACOBI_SIZE_CAP && tree.n() >= 2 {
        checks.push(check_spectral(&tree)?);
    } else {
        checks.push(CheckResult::skipped(
            "spectral",
            format!("n = {} over Jacobi cap {JACOBI_SIZE_CAP}", tree.n()),
        ));
    }
    checks.push(check_psi_sum(&config.spec));
    checks.push(check_w_polynomial_consistency(&summary, &config.spec));
    checks.push(check_wiener_identity_formulas(&summary, &config.spec));
    checks.push(check_corollary_reductions(&seed, &config.spec));

    let passed = checks.iter().all(|c| c.passed);
    Ok(IdentityReport {
        tree_n: tree.n(),
        t,
        passed,
        checks,
    })
}

fn check_wiener_consistency(tree: &Tree) -> Result<CheckResult, DriverError> {
    let fast = tree.wiener_fast()?;
    let bfs = tree.wiener_bfs()?;
    let name = "wiener-fast-vs-bfs";
    if fast == bfs {
        Ok(CheckResult::passed(
            name,
            0.0,
            format!("W = {fast} on both routes"),
        ))
    } else {
        Ok(CheckResult::failed(
            name,
            (fast as f64 - bfs as f64).abs(),
            format!("split-size route {fast} vs BFS route {bfs}"),
        ))
    }
}

fn check_lemma1(tree: &Tree) -> Result<CheckResult, DriverError> {
    let name = "lemma-1";
    if tree.n() < 2 {
        return Ok(CheckResult::skipped(name, "single vertex"));
    }
    let edges2 = 2 * (tree.n() as u64 - 1);
    for v in 0..tree.n() {
        let have = walk::lemma1_sum(tree, v)?;
        let want = edges2 - tree.degree(v) as u64;
        if have != want {
            return Ok(CheckResult::failed(
                name,
                have.abs_diff(want) as f64,
                format!("vertex {v}: sum {have}, expected 2|E| - k = {want}"),
            ));
        }
    }
    Ok(CheckResult::passed(
        name,
        0.0,
        format!("all {} vertices", tree.n()),
    ))
}

/// Commute identity over all ordered pairs in O(n^2): accumulate
/// first-passage times toward and away from each source along the BFS tree.
fn check_corollary3(tree: &Tree) -> Result<CheckResult, DriverError> {
    let name = "corollary-3";
    if tree.n() < 2 {
        return Ok(CheckResult::skipped(name, "single vertex"));
    }
    let n = tree.n();
    let splits = tree.split_sizes();
    let edge_term = 2 * (n as u64 - 1);
    for u in 0..n {
        let (parent, order) = tree.bfs_parents(u);
        let dist = tree.distances_from(u);
        let mut toward = vec![0u64; n]; // F(v -> u)
        let mut away = vec![0u64; n]; // F(u -> v)
        for &v in order.iter().skip(1) {
            let p = parent[v];
            toward[v] = walk::fpt_adjacent_with(tree, &splits, v, p)? + toward[p];
            away[v] = away[p] + walk::fpt_adjacent_with(tree, &splits, p, v)?;
            let commute = toward[v] + away[v];
            let want = edge_term * dist[v] as u64;
            if commute != want {
                return Ok(CheckResult::failed(
                    name,
                    commute.abs_diff(want) as f64,
                    format!("pair ({u}, {v}): commute {commute}, 2|E|d = {want}"),
                ));
            }
        }
    }
    Ok(CheckResult::passed(
        name,
        0.0,
        format!("all {} ordered pairs", n * (n - 1)),
    ))
}

fn check_proposition2(tree: &Tree, table: &HittingTable) -> Result<CheckResult, DriverError> {
    let name = "proposition-2";
    let splits = tree.split_sizes();
    let mut worst = 0.0f64;
    for &(u, v) in tree.edges() {
        for (a, b) in [(u, v), (v, u)] {
            let fast = walk::fpt_adjacent_with(tree, &splits, a, b)? as f64;
            let solve = table.get(a, b);
            worst = worst.max((fast - solve).abs());
        }
    }
    if worst <= 1e-9 {
        Ok(CheckResult::passed(name, worst, "adjacent pairs vs solver"))
    } else {
        Ok(CheckResult::failed(
            name,
            worst,
            format!("adjacent-pair mismatch up to {worst:e} vs solver"),
        ))
    }
}

/// Every pair entry of the solver table must equal the path-sum of
/// adjacent-edge first-passage times.
fn check_fpt_additivity(tree: &Tree, table: &HittingTable) -> CheckResult {
    let name = "fpt-additivity";
    let n = tree.n();
    let splits = tree.split_sizes();
    let mut worst = 0.0f64;
    for u in 0..n {
        let (parent, order) = tree.bfs_parents(u);
        let mut away = vec![0.0f64; n];
        for &v in order.iter().skip(1) {
            let p = parent[v];
            let step =
                walk::fpt_adjacent_with(tree, &splits, p, v).expect("parent edge exists") as f64;
            away[v] = away[p] + step;
            worst = worst.max((away[v] - table.get(u, v)).abs());
        }
    }
    let scale = table.average().abs().max(1.0);
    if worst <= 1e-9 * scale {
        CheckResult::passed(name, worst, "all pairs vs solver")
    } else {
        CheckResult::failed(name, worst, format!("path-sum mismatch up to {worst:e}"))
    }
}

fn check_theorem4(tree: &Tree, table: &HittingTable) -> Result<CheckResult, DriverError> {
    let name = "theorem-4";
    let fast = walk::mfpt_exact(tree)?;
    let solve = table.average();
    let err = (fast - solve).abs() / fast.abs().max(1.0);
    if err <= 1e-9 {
        Ok(CheckResult::passed(
            name,
            err,
            format!("2W/n = {fast}, solver average = {solve}"),
        ))
    } else {
        Ok(CheckResult::failed(
            name,
            err,
            format!("2W/n = {fast} vs solver average {solve}"),
        ))
    }
}

fn check_spectral(tree: &Tree) -> Result<CheckResult, DriverError> {
    let name = "spectral";
    let check = walk::laplacian_eigencheck(tree)?;
    let fast = walk::mfpt_exact(tree)?;
    let err = (check.mfpt_spectral - fast).abs() / fast.abs().max(1.0);
    if err <= 1e-6 {
        Ok(CheckResult::passed(
            name,
            err,
            format!(
                "2 sum(1/lambda) = {} vs 2W/n = {fast}",
                check.mfpt_spectral
            ),
        ))
    } else {
        Ok(CheckResult::failed(
            name,
            err,
            format!("spectral {} vs 2W/n {fast}", check.mfpt_spectral),
        ))
    }
}

fn check_psi_sum(spec: &GrowthSpec) -> CheckResult {
    let name = "psi-sum";
    let m = analytic::moments::<f64>(&spec.m_dist);
    let n = analytic::moments::<f64>(&spec.n_dist);
    let nu = if spec.kind == GrowthKind::Eugm {
        spec.nu
    } else {
        0
    };
    let pp = analytic::phi_psi_ii(nu, &m, &n);
    let scale = pp.psi1.abs().max(pp.psi2.abs()).max(pp.psi3.abs()).max(1.0);
    let sum = (pp.psi1 + pp.psi2 + pp.psi3).abs();
    if sum <= 1e-12 * scale {
        CheckResult::passed(name, sum, format!("|psi1+psi2+psi3| = {sum:e}"))
    } else {
        CheckResult::failed(
            name,
            sum,
            format!("|psi1+psi2+psi3| = {sum:e} at scale {scale:e}"),
        )
    }
}

/// The iterated closed form at t = 1 must reproduce the one-step
/// W-polynomial, and the polynomial must equal its own case sums.
fn check_w_polynomial_consistency(seed: &SeedSummary, spec: &GrowthSpec) -> CheckResult {
    let name = "w-polynomial";
    let m = analytic::moments::<f64>(&spec.m_dist);
    let (total, cases, closed) = match spec.kind {
        GrowthKind::Vugm => {
            let poly = analytic::w_poly_i::<f64>(seed, spec.mu, &m);
            let closed = analytic::wiener_i::<f64>(seed, spec.mu, &m, 1);
            (poly.total, poly.cases, closed)
        }
        GrowthKind::Eugm => {
            let n = analytic::moments::<f64>(&spec.n_dist);
            let (poly, _) = analytic::w_poly_ii::<f64>(seed, spec.nu, &m, &n);
            let closed = analytic::wiener_ii::<f64>(seed, spec.nu, &m, &n, 1);
            (poly.total, poly.cases, closed)
        }
        GrowthKind::Mugm => {
            let poly = analytic::w_poly_iii::<f64>(seed, spec.mu, &m);
            let closed = analytic::wiener_iii::<f64>(seed, spec.mu, &m, 1);
            (poly.total, poly.cases, closed)
        }
    };
    let case_sum: f64 = cases.iter().sum();
    let scale = total.abs().max(case_sum.abs()).max(1.0);
    let err = ((total - closed).abs()).max((total - case_sum).abs()) / scale;
    if err <= 1e-12 {
        CheckResult::passed(
            name,
            err,
            format!("total {total}, cases {case_sum}, closed {closed}"),
        )
    } else {
        CheckResult::failed(
            name,
            err,
            format!("total {total}, case sum {case_sum}, closed form {closed}"),
        )
    }
}

/// `mfpt * vertices = 2 * wiener` at the formula level for t = 0..=6.
fn check_wiener_identity_formulas(seed: &SeedSummary, spec: &GrowthSpec) -> CheckResult {
    let name = "wiener-mfpt-identity";
    let m = analytic::moments::<f64>(&spec.m_dist);
    let n = analytic::moments::<f64>(&spec.n_dist);
    let mut worst = 0.0f64;
    for t in 0..=6 {
        let (vertices, wiener, mfpt) = match spec.kind {
            GrowthKind::Vugm => (
                analytic::vertices_i::<f64>(seed.h, spec.mu, &m, t),
                analytic::wiener_i::<f64>(seed, spec.mu, &m, t),
                analytic::mfpt_i::<f64>(seed, spec.mu, &m, t),
            ),
            GrowthKind::Eugm => (
                analytic::vertices_ii::<f64>(seed.h, spec.nu, &m, &n, t),
                analytic::wiener_ii::<f64>(seed, spec.nu, &m, &n, t),
                analytic::mfpt_ii::<f64>(seed, spec.nu, &m, &n, t),
            ),
            GrowthKind::Mugm => (
                analytic::vertices_iii::<f64>(seed.h, spec.mu, &m, t),
                analytic::wiener_iii::<f64>(seed, spec.mu, &m, t),
                analytic::mfpt_iii::<f64>(seed, spec.mu, &m, t),
            ),
        };
        let err = (mfpt * vertices - 2.0 * wiener).abs() / (2.0 * wiener).abs().max(1.0);
        worst = worst.max(err);
    }
    if worst <= 1e-12 {
        CheckResult::passed(name, worst, "t = 0..=6")
    } else {
        CheckResult::failed(name, worst, format!("relative gap {worst:e}"))
    }
}

/// When the configured spec is one of the named deterministic families,
/// the special-case formula must match the general evaluator.
fn check_corollary_reductions(seed: &Tree, spec: &GrowthSpec) -> CheckResult {
    let name = "corollary-reductions";
    let summary = match SeedSummary::from_tree(seed) {
        Ok(s) => s,
        Err(e) => return CheckResult::failed(name, f64::NAN, e.to_string()),
    };
    let m = analytic::moments::<f64>(&spec.m_dist);
    let n = analytic::moments::<f64>(&spec.n_dist);
    let unit_m = spec.m_dist.values() == [1];
    let unit_n = spec.n_dist.values() == [1];
    let edge_seed = summary.h == 2;
    let mut worst = 0.0f64;
    let mut applied: Vec<&str> = Vec::new();
    match spec.kind {
        GrowthKind::Vugm if unit_m && edge_seed => {
            applied.push("deterministic family-I MFPT");
            for t in 0..=6 {
                let a = analytic::corollary8_y1::<f64>(spec.mu, t);
                let b = analytic::mfpt_i::<f64>(&summary, spec.mu, &m, t);
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
        GrowthKind::Eugm if spec.nu == 0 && spec.m_dist.len() == 1 => {
            applied.push("subdivision Wiener index");
            let (poly, _) = analytic::w_poly_ii::<f64>(&summary, 0, &m, &n);
            let direct =
                analytic::corollary11_subdivision::<f64>(&summary, spec.m_dist.values()[0]);
            worst = (poly.total - direct).abs() / direct.abs().max(1.0);
        }
        GrowthKind::Eugm if unit_m && unit_n && edge_seed => {
            applied.push("nu-fractal MFPT");
            for t in 0..=5 {
                let a = analytic::nu_fractal_mfpt::<f64>(spec.nu, t);
                let b = analytic::mfpt_ii::<f64>(&summary, spec.nu, &m, &n, t);
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
            if spec.nu == 1 {
                applied.push("T-graph MFPT");
                for t in 0..=5 {
                    let a = analytic::corollary13_tgraph::<f64>(t);
                    let b = analytic::mfpt_ii::<f64>(&summary, 1, &m, &n, t);
                    worst = worst.max((a - b).abs() / a.abs().max(1.0));
                }
            }
        }
        GrowthKind::Mugm
            if unit_m && summary.h == spec.mu + 1 && summary.w == (spec.mu * spec.mu) as u128 =>
        {
            applied.push("Vicsek MFPT");
            for t in 0..=4 {
                let a = analytic::corollary17_vicsek::<f64>(spec.mu, t);
                let b = analytic::mfpt_iii::<f64>(&summary, spec.mu, &m, t);
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
        _ => {}
    }
    if applied.is_empty() {
        CheckResult::skipped(name, "spec matches no named deterministic family")
    } else if worst <= 1e-12 {
        CheckResult::passed(name, worst, applied.join(", "))
    } else {
        CheckResult::failed(name, worst, format!("{}: gap {worst:e}", applied.join(", ")))
    }
}

// ---------------------------------------------------------------------------
// verify-ensemble
// ---------------------------------------------------------------------------

/// Sample statistics for one quantity against its prediction.
#[derive(Clone, Debug, Serialize)]
pub struct QuantityStats {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub replicates: u64,
    pub prediction: f64,
    /// `(mean - prediction) / std_error`; absent when the spread is zero
    /// (deterministic specs).
    pub z_score: Option<f64>,
    pub within_4_se: bool,
}

fn quantity_stats(samples: &[f64], prediction: f64) -> QuantityStats {
    let r = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / r;
    let variance = if samples.len() > 1 {
        samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (r - 1.0)
    } else {
        0.0
    };
    let std_error = (variance / r).sqrt();
    // A spread at the float noise floor of the mean is rounding dust from
    // identical samples, not statistics; no z-test can stand on it.
    let meaningful_spread = std_error > 1e-12 * mean.abs().max(1.0);
    let z_score = meaningful_spread.then(|| (mean - prediction) / std_error);
    let within_4_se = match z_score {
        Some(z) => z.abs() <= 4.0,
        None => (mean - prediction).abs() <= 1e-9 * prediction.abs().max(1.0),
    };
    QuantityStats {
        mean,
        variance,
        std_error,
        replicates: samples.len() as u64,
        prediction,
        z_score,
        within_4_se,
    }
}

/// Empirical means of n, W, MFPT over sampled trees vs the closed forms.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleStats {
    pub family: Family,
    pub t: u64,
    pub replicates: u64,
    pub passed: bool,
    pub n: QuantityStats,
    pub w: QuantityStats,
    pub mfpt: QuantityStats,
}

/// Sample `replicates` trees (stream index = replicate index), measure each
/// exactly, and compare the sample means to the predictions; a quantity
/// fails when its mean lands more than 4 standard errors away.
pub fn verify_ensemble(config: &ExperimentConfig) -> Result<EnsembleStats, DriverError> {
    let t = config.first_t();
    let seed = config.seed.resolve()?;
    let summary = SeedSummary::from_tree(&seed)?;
    let report = AnalyticReport::for_spec(&summary, &config.spec, t);
    check_predicted_width(&report)?;
    let cap = max_n_cap()?;
    let samples: Vec<(f64, f64, f64)> = (0..config.replicates)
        .into_par_iter()
        .map(|replicate| -> Result<(f64, f64, f64), DriverError> {
            let mut rng = RngStream::new(config.rng_seed, replicate);
            let tree = grow_capped(&seed, &config.spec, t, &mut rng, cap)?;
            let w = tree.wiener_fast()? as f64;
            let n = tree.n() as f64;
            Ok((n, w, 2.0 * w / n))
        })
        .collect::<Result<_, _>>()?;
    let ns: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ws: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let ms: Vec<f64> = samples.iter().map(|s| s.2).collect();
    let n_stats = quantity_stats(&ns, report.expected_n);
    let w_stats = quantity_stats(&ws, report.expected_w);
    // The MFPT prediction is a ratio of expectations, which the mean of
    // per-tree 2W/n matches exactly only for deterministic specs; for
    // stochastic specs the W and n channels carry the pass/fail decision.
    let mfpt_stats = quantity_stats(&ms, report.expected_mfpt);
    let deterministic = n_stats.std_error == 0.0 && w_stats.std_error == 0.0;
    let passed =
        n_stats.within_4_se && w_stats.within_4_se && (!deterministic || mfpt_stats.within_4_se);
    Ok(EnsembleStats {
        family: report.family,
        t,
        replicates: config.replicates,
        passed,
        n: n_stats,
        w: w_stats,
        mfpt: mfpt_stats,
    })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Monte Carlo first-passage estimate next to the exact value.
#[derive(Clone, Debug, Serialize)]
pub struct SimulateReport {
    pub source: usize,
    pub target: usize,
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    pub exact: f64,
    pub z_score: Option<f64>,
    pub within_4_se: bool,
}

/// Estimate the first-passage time on the configured tree by simulation and
/// compare against the exact split-size route.
pub fn simulate(
    config: &ExperimentConfig,
    source: usize,
    target: usize,
    trials: u64,
) -> Result<SimulateReport, DriverError> {
    let tree = grown_tree(config, config.first_t(), 0)?;
    if source >= tree.n() || target >= tree.n() {
        return Err(DriverError::Config(format!(
            "vertex pair ({source}, {target}) out of range for n = {}",
            tree.n()
        )));
    }
    let exact = walk::fpt_pair(&tree, source, target)? as f64;
    let walk_config = WalkConfig {
        trials,
        max_steps: None,
        // Simulation draws live far from the replicate streams.
        rng: RngStream::new(config.rng_seed, 1 << 32),
    };
    let estimate: McEstimate = walk::monte_carlo_fpt(&tree, source, target, &walk_config)?;
    let z_score = (estimate.std_error > 0.0).then(|| (estimate.mean - exact) / estimate.std_error);
    let within_4_se = match z_score {
        Some(z) => z.abs() <= 4.0,
        None => estimate.mean == exact,
    };
    Ok(SimulateReport {
        source,
        target,
        trials,
        mean: estimate.mean,
        std_error: estimate.std_error,
        exact,
        z_score,
        within_4_se,
    })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Ordinary least squares fit of `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> OlsFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "regression needs at least two points");
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    OlsFit {
        slope,
        intercept,
        r_squared,
    }
}

/// Scaling regression attached to a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRegression {
    /// `log-log`: slope of ln(MFPT) against ln(n), compared to theta.
    /// `ratio-vs-t`: slope of MFPT/n against t (family I), compared to the
    /// exact linear-growth coefficient.
    pub kind: String,
    pub fit: OlsFit,
    pub reference: f64,
    pub relative_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub family: Family,
    pub rows: Vec<AnalyticReport>,
    pub regression: SweepRegression,
    pub criticality_class: CriticalityClass,
}

/// Evaluate the closed forms across the configured t-range and regress the
/// predicted scaling: families II/III fit ln MFPT against ln n and compare
/// to theta; family I fits MFPT/n against t and compares to the exact
/// ratio coefficient.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepReport, DriverError> {
    let ts = config.t_values();
    if ts.len() < 2 {
        return Err(DriverError::Config(
            "sweep needs a t_range with at least two generations".into(),
        ));
    }
    let seed = config.seed.resolve()?;
    let summary = SeedSummary::from_tree(&seed)?;
    let rows: Vec<AnalyticReport> = ts
        .iter()
        .map(|&t| AnalyticReport::for_spec(&summary, &config.spec, t))
        .collect();
    for row in &rows {
        check_predicted_width(row)?;
    }
    let family: Family = config.spec.kind.into();
    let regression = match family {
        Family::II | Family::III => {
            let xs: Vec<f64> = rows.iter().map(|r| r.expected_n.ln()).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.expected_mfpt.ln()).collect();
            let fit = ols(&xs, &ys);
            let reference = rows.last().expect("nonempty").theta;
            SweepRegression {
                kind: "log-log".into(),
                fit,
                reference,
                relative_gap: (fit.slope - reference).abs()
                    / reference.abs().max(f64::MIN_POSITIVE),
            }
        }
        Family::I => {
            let xs: Vec<f64> = ts.iter().map(|&t| t as f64).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.expected_mfpt / r.expected_n).collect();
            let fit = ols(&xs, &ys);
            let m = analytic::moments::<f64>(&config.spec.m_dist);
            let reference = analytic::mfpt_growth_coeff_i::<f64>(config.spec.mu, &m);
            SweepRegression {
                kind: "ratio-vs-t".into(),
                fit,
                reference,
                relative_gap: (fit.slope - reference).abs()
                    / reference.abs().max(f64::MIN_POSITIVE),
            }
        }
    };
    Ok(SweepReport {
        family,
        rows,
        regression,
        criticality_class: analytic::criticality_asymptotics(&config.spec),
    })
}

/// CSV rows for a sweep, stable header
/// `family,t,n,w,mfpt,kirchhoff,criticality,theta`.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from(AnalyticReport::CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    out
}

/// CSV form of ensemble statistics, one quantity per row.
pub fn ensemble_csv(stats: &EnsembleStats) -> String {
    let mut out = String::from("quantity,mean,variance,std_error,replicates,prediction,z_score\n");
    for (name, q) in [("n", &stats.n), ("w", &stats.w), ("mfpt", &stats.mfpt)] {
        out.push_str(&format!(
            "{name},{},{},{},{},{},{}\n",
            q.mean,
            q.variance,
            q.std_error,
            q.replicates,
            q.prediction,
            q.z_score.map_or(String::new(), |z| z.to_string()),
        ));
    }
    out
}
