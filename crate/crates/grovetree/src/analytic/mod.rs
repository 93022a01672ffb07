//! Closed-form expectations for the three growth families.
//!
//! Everything a growth spec predicts about generation `t` - expected vertex
//! count, Wiener index, mean first-passage time, Kirchhoff index, network
//! criticality, scaling exponent, spectral dimension - is evaluated here
//! without constructing a single tree. The formulas only see the seed
//! summary `(h, w)` and the moment tables of the length distributions.
//!
//! Functions are generic over [`Scalar`]: call them at `f64` for everyday
//! use, or at `num::BigRational` for exact arithmetic (deterministic presets
//! and dyadic probabilities evaluate exactly, which the corollary-reduction
//! tests exploit).

mod formulas;
mod scalar;

pub use formulas::{MomentTable, PhiPsiII, WPolynomial};
pub use scalar::Scalar;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::growth::{GrowthKind, GrowthSpec, LengthDistribution};
use crate::tree::{Tree, TreeError};

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("invalid seed summary: h = {h}, w = {w} (w must be 0 exactly when h = 1)")]
    InvalidSeed { h: u64, w: u128 },
}

/// All the closed forms need from a seed tree: its vertex count and Wiener
/// index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub h: u64,
    pub w: u128,
}

impl SeedSummary {
    pub fn new(h: u64, w: u128) -> Result<Self, AnalyticError> {
        if h == 0 || (w == 0) != (h == 1) {
            return Err(AnalyticError::InvalidSeed { h, w });
        }
        Ok(SeedSummary { h, w })
    }

    pub fn from_tree(tree: &Tree) -> Result<Self, TreeError> {
        Ok(SeedSummary {
            h: tree.n() as u64,
            w: tree.wiener_fast()?,
        })
    }

    fn h_as<T: Scalar>(&self) -> T {
        T::from_u64(self.h)
    }

    fn w_as<T: Scalar>(&self) -> T {
        T::from_u128(self.w)
    }
}

/// Moment table of a length distribution (see [`MomentTable`] fields).
pub fn moments<T: Scalar>(dist: &LengthDistribution) -> MomentTable<T> {
    MomentTable::from_distribution(dist)
}

// --- Family I ---------------------------------------------------------------

/// One-step expected Wiener index under vertex-based growth, with the
/// four case sums and polynomial coefficients.
pub fn w_poly_i<T: Scalar>(seed: &SeedSummary, mu: u64, m: &MomentTable<T>) -> WPolynomial<T> {
    formulas::w_poly_i(&seed.h_as(), &seed.w_as(), mu, m)
}

pub fn vertices_i<T: Scalar>(h: u64, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    formulas::vertices_i(&T::from_u64(h), mu, m, t)
}

pub fn wiener_i<T: Scalar>(seed: &SeedSummary, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    formulas::wiener_i(&seed.h_as(), &seed.w_as(), mu, m, t)
}

pub fn mfpt_i<T: Scalar>(seed: &SeedSummary, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    formulas::mfpt_i(&seed.h_as(), &seed.w_as(), mu, m, t)
}

/// Deterministic family-I MFPT from an edge seed with unit paths.
pub fn corollary8_y1<T: Scalar>(mu: u64, t: u64) -> T {
    formulas::corollary8_y1(mu, t)
}

/// Family-I scaling coefficient (zero whenever every path has one vertex).
pub fn theta_i<T: Scalar>(mu: u64, m: &MomentTable<T>, t: u64) -> T {
    formulas::theta_i(mu, m, t)
}

/// Exact coefficient of `t` in the large-`t` ratio `MFPT / n` for family I.
pub fn mfpt_growth_coeff_i<T: Scalar>(mu: u64, m: &MomentTable<T>) -> T {
    formulas::mfpt_growth_coeff_i(mu, m)
}

// --- Family II --------------------------------------------------------------

/// The recurring family-II symbols and the W-polynomial coefficients they
/// induce (`psi1 + psi2 + psi3 = 0` identically).
pub fn phi_psi_ii<T: Scalar>(nu: u64, m: &MomentTable<T>, n: &MomentTable<T>) -> PhiPsiII<T> {
    formulas::phi_psi_ii(nu, m, n)
}

/// One-step expected Wiener index under edge-based growth.
pub fn w_poly_ii<T: Scalar>(
    seed: &SeedSummary,
    nu: u64,
    m: &MomentTable<T>,
    n: &MomentTable<T>,
) -> (WPolynomial<T>, PhiPsiII<T>) {
    formulas::w_poly_ii(&seed.h_as(), &seed.w_as(), nu, m, n)
}

pub fn vertices_ii<T: Scalar>(
    h: u64,
    nu: u64,
    m: &MomentTable<T>,
    n: &MomentTable<T>,
    t: u64,
) -> T {
    formulas::vertices_ii(&T::from_u64(h), nu, m, n, t)
}

pub fn wiener_ii<T: Scalar>(
    seed: &SeedSummary,
    nu: u64,
    m: &MomentTable<T>,
    n: &MomentTable<T>,
    t: u64,
) -> T {
    formulas::wiener_ii(&seed.h_as(), &seed.w_as(), nu, m, n, t)
}

pub fn mfpt_ii<T: Scalar>(
    seed: &SeedSummary,
    nu: u64,
    m: &MomentTable<T>,
    n: &MomentTable<T>,
    t: u64,
) -> T {
    formulas::mfpt_ii(&seed.h_as(), &seed.w_as(), nu, m, n, t)
}

pub fn corollary13_tgraph<T: Scalar>(t: u64) -> T {
    formulas::corollary13_tgraph(t)
}

pub fn nu_fractal_mfpt<T: Scalar>(nu: u64, t: u64) -> T {
    formulas::nu_fractal_mfpt(nu, t)
}

pub fn corollary11_subdivision<T: Scalar>(seed: &SeedSummary, m: u64) -> T {
    formulas::corollary11_subdivision(&seed.h_as(), &seed.w_as(), m)
}

pub fn theta_ii(nu: u64, m: &MomentTable<f64>, n: &MomentTable<f64>) -> f64 {
    formulas::theta_ii(nu, m, n)
}

pub fn spectral_dim_ii(nu: u64, m: &MomentTable<f64>, n: &MomentTable<f64>) -> f64 {
    formulas::spectral_dim_ii(nu, m, n)
}

// --- Family III -------------------------------------------------------------

/// One-step expected Wiener index under mixture growth (`mu >= 2`).
pub fn w_poly_iii<T: Scalar>(seed: &SeedSummary, mu: u64, m: &MomentTable<T>) -> WPolynomial<T> {
    formulas::w_poly_iii(&seed.h_as(), &seed.w_as(), mu, m)
}

pub fn vertices_iii<T: Scalar>(h: u64, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    formulas::vertices_iii(&T::from_u64(h), mu, m, t)
}

pub fn wiener_iii<T: Scalar>(seed: &SeedSummary, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    formulas::wiener_iii(&seed.h_as(), &seed.w_as(), mu, m, t)
}

pub fn mfpt_iii<T: Scalar>(seed: &SeedSummary, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    formulas::mfpt_iii(&seed.h_as(), &seed.w_as(), mu, m, t)
}

pub fn corollary17_vicsek<T: Scalar>(mu: u64, t: u64) -> T {
    formulas::corollary17_vicsek(mu, t)
}

pub fn theta_iii(mu: u64, m: &MomentTable<f64>) -> f64 {
    formulas::theta_iii(mu, m)
}

pub fn spectral_dim_iii(mu: u64, m: &MomentTable<f64>) -> f64 {
    formulas::spectral_dim_iii(mu, m)
}

// --- Reports ----------------------------------------------------------------

/// Which of the three families a spec generates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III")]
    III,
}

impl From<GrowthKind> for Family {
    fn from(kind: GrowthKind) -> Self {
        match kind {
            GrowthKind::Vugm => Family::I,
            GrowthKind::Eugm => Family::II,
            GrowthKind::Mugm => Family::III,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::I => "I",
            Family::II => "II",
            Family::III => "III",
        })
    }
}

/// Asymptotic behavior of network criticality as the family grows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum CriticalityClass {
    /// Family I: criticality grows linearly in the generation count.
    #[serde(rename = "O(t)")]
    LinearInT,
    /// Families II and III: criticality grows like `n^exponent`.
    #[serde(rename = "power-law")]
    PowerLaw { exponent: f64 },
}

/// Criticality growth class for a spec: `O(t)` for family I, a power law
/// with exponent `theta - 1` for families II and III.
pub fn criticality_asymptotics(spec: &GrowthSpec) -> CriticalityClass {
    let m = moments::<f64>(&spec.m_dist);
    match spec.kind {
        GrowthKind::Vugm => CriticalityClass::LinearInT,
        GrowthKind::Eugm => {
            let n = moments::<f64>(&spec.n_dist);
            CriticalityClass::PowerLaw {
                exponent: theta_ii(spec.nu, &m, &n) - 1.0,
            }
        }
        GrowthKind::Mugm => CriticalityClass::PowerLaw {
            exponent: theta_iii(spec.mu, &m) - 1.0,
        },
    }
}

/// Predicted quantities for generation `t` of a growth spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub family: Family,
    pub t: u64,
    pub expected_n: f64,
    pub expected_w: f64,
    pub expected_mfpt: f64,
    pub expected_kirchhoff: f64,
    pub expected_criticality: f64,
    pub theta: f64,
    pub spectral_dimension: Option<f64>,
}

impl AnalyticReport {
    pub const CSV_HEADER: &'static str = "family,t,n,w,mfpt,kirchhoff,criticality,theta";

    pub fn for_spec(seed: &SeedSummary, spec: &GrowthSpec, t: u64) -> AnalyticReport {
        let m = moments::<f64>(&spec.m_dist);
        let (expected_n, expected_w, expected_mfpt, theta, spectral_dimension) = match spec.kind {
            GrowthKind::Vugm => (
                vertices_i::<f64>(seed.h, spec.mu, &m, t),
                wiener_i::<f64>(seed, spec.mu, &m, t),
                mfpt_i::<f64>(seed, spec.mu, &m, t),
                theta_i::<f64>(spec.mu, &m, t),
                None,
            ),
            GrowthKind::Eugm => {
                let n = moments::<f64>(&spec.n_dist);
                (
                    vertices_ii::<f64>(seed.h, spec.nu, &m, &n, t),
                    wiener_ii::<f64>(seed, spec.nu, &m, &n, t),
                    mfpt_ii::<f64>(seed, spec.nu, &m, &n, t),
                    theta_ii(spec.nu, &m, &n),
                    Some(spectral_dim_ii(spec.nu, &m, &n)),
                )
            }
            GrowthKind::Mugm => (
                vertices_iii::<f64>(seed.h, spec.mu, &m, t),
                wiener_iii::<f64>(seed, spec.mu, &m, t),
                mfpt_iii::<f64>(seed, spec.mu, &m, t),
                theta_iii(spec.mu, &m),
                Some(spectral_dim_iii(spec.mu, &m)),
            ),
        };
        let expected_kirchhoff = 2.0 * expected_w;
        let expected_criticality = expected_kirchhoff / (expected_n * (expected_n - 1.0));
        AnalyticReport {
            family: spec.kind.into(),
            t,
            expected_n,
            expected_w,
            expected_mfpt,
            expected_kirchhoff,
            expected_criticality,
            theta,
            spectral_dimension,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.family,
            self.t,
            self.expected_n,
            self.expected_w,
            self.expected_mfpt,
            self.expected_kirchhoff,
            self.expected_criticality,
            self.theta
        )
    }
}
