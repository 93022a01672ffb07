//! Generic closed-form evaluators for the three growth families.
//!
//! Conventions shared by every formula here:
//!
//! * A seed tree enters only through its vertex count `h` and Wiener index
//!   `w`; one growth step maps `w` to a polynomial in `(w, h)` (the
//!   W-polynomial), and iterating the step yields geometric-sum closed
//!   forms in the step count `t`.
//! * `binom(a, b) = 0` whenever `a < b`, and empty sums are 0; both are
//!   baked into the moment functionals.
//! * All formulas are stated for `t >= 1`; `t = 0` returns the seed
//!   quantity directly. Path-length distributions put mass on integers
//!   >= 1, so every denominator below (`mu * E[m]`, step factors minus 1)
//!   is bounded away from zero.

use super::scalar::{binom2, Scalar};
use crate::growth::LengthDistribution;

/// Expectations of the combinatorial functionals of a length distribution
/// that appear in every closed form. For a distribution over `X`:
///
/// * `e1`  = E[X]
/// * `eb`  = E[binom(X+1, 2)]  (sum of 1..=X)
/// * `ei`  = E[sum over l in 2..=X of binom(l, 2)] = E[binom(X+1, 3)]
/// * `e2`  = E[X^2]
/// * `ebm` = E[binom(X, 2)]
///
/// The empty (unused) distribution has all moments zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable<T = f64> {
    pub e1: T,
    pub eb: T,
    pub ei: T,
    pub e2: T,
    pub ebm: T,
}

impl<T: Scalar> MomentTable<T> {
    pub fn from_distribution(dist: &LengthDistribution) -> Self {
        let mut table = MomentTable {
            e1: T::zero(),
            eb: T::zero(),
            ei: T::zero(),
            e2: T::zero(),
            ebm: T::zero(),
        };
        for (&v, &p) in dist.values().iter().zip(dist.probs()) {
            let p = T::from_f64(p);
            let v = v as u128;
            table.e1 = table.e1 + p.clone() * T::from_u128(v);
            table.eb = table.eb + p.clone() * T::from_u128(v * (v + 1) / 2);
            table.ei = table.ei + p.clone() * T::from_u128((v + 1) * v * (v - 1) / 6);
            table.e2 = table.e2 + p.clone() * T::from_u128(v * v);
            table.ebm = table.ebm + p * T::from_u128(v * (v - 1) / 2);
        }
        table
    }
}

/// A one-step W-polynomial evaluation: the per-case sums, the assembled
/// total, and the polynomial coefficients of `(w, h^2, h, 1)`.
#[derive(Clone, Debug)]
pub struct WPolynomial<T = f64> {
    pub total: T,
    pub cases: [T; 4],
    pub coeff_w: T,
    pub coeff_h2: T,
    pub coeff_h: T,
    pub coeff_const: T,
}

// ---------------------------------------------------------------------------
// Family I (vertex-based growth)
// ---------------------------------------------------------------------------

/// Per-step vertex multiplier `1 + mu * E[m]`.
fn step_factor_i<T: Scalar>(mu: u64, m: &MomentTable<T>) -> T {
    T::from_u64(mu) * m.e1.clone() + T::one()
}

/// Coefficient of `h` in the family-I W-polynomial: `mu*ei - mu*e1*eb`.
fn h_coeff_i<T: Scalar>(mu: u64, m: &MomentTable<T>) -> T {
    let mu_s = T::from_u64(mu);
    mu_s.clone() * m.ei.clone() - mu_s * m.e1.clone() * m.eb.clone()
}

pub fn w_poly_i<T: Scalar>(h: &T, w: &T, mu: u64, m: &MomentTable<T>) -> WPolynomial<T> {
    let one = T::one();
    let two = T::from_u64(2);
    let mu_s = T::from_u64(mu);
    let g = step_factor_i(mu, m);
    let pairs = binom2(h);

    let coeff_w = g.clone() * g.clone();
    let coeff_h2 = mu_s.clone() * g * m.eb.clone();
    let coeff_h = h_coeff_i(mu, m);

    // Original-original pairs keep their distances.
    let case1 = w.clone();
    // Pairs inside one vertex's attachment star (and to its center).
    let case2 = h.clone()
        * (mu_s.clone() * m.eb.clone()
            + m.e1.clone() * mu_s.clone() * (mu_s.clone() - one) * m.eb.clone()
            + mu_s.clone() * m.ei.clone());
    // Original vertex to another vertex's attachments.
    let case3 = two.clone()
        * mu_s.clone()
        * (pairs.clone() * m.eb.clone() + m.e1.clone() * w.clone());
    // Attachments of two distinct vertices.
    let case4 = (mu_s.clone() * m.e1.clone()).powu(2) * w.clone()
        + two * mu_s.clone() * m.e1.clone() * pairs * mu_s * m.eb.clone();

    let total = coeff_w.clone() * w.clone()
        + coeff_h2.clone() * h.clone() * h.clone()
        + coeff_h.clone() * h.clone();
    WPolynomial {
        total,
        cases: [case1, case2, case3, case4],
        coeff_w,
        coeff_h2,
        coeff_h,
        coeff_const: T::zero(),
    }
}

pub fn vertices_i<T: Scalar>(h: &T, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    h.clone() * step_factor_i(mu, m).powu(t)
}

pub fn wiener_i<T: Scalar>(h: &T, w: &T, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    if t == 0 {
        return w.clone();
    }
    let mu_s = T::from_u64(mu);
    let g = step_factor_i(mu, m);
    let geom = (g.powu(2 * t - 1) - g.powu(t - 1)) / (mu_s.clone() * m.e1.clone());
    w.clone() * g.powu(2 * t)
        + mu_s * T::from_u64(t) * h.clone() * h.clone() * m.eb.clone() * g.powu(2 * t - 1)
        + h.clone() * h_coeff_i(mu, m) * geom
}

pub fn mfpt_i<T: Scalar>(h: &T, w: &T, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    let two = T::from_u64(2);
    if t == 0 {
        return two * w.clone() / h.clone();
    }
    let mu_s = T::from_u64(mu);
    let g = step_factor_i(mu, m);
    let geom = (g.powu(t - 1) - T::one() / g.clone()) / (mu_s.clone() * m.e1.clone());
    two.clone() * w.clone() / h.clone() * g.powu(t)
        + two.clone() * mu_s * T::from_u64(t) * h.clone() * m.eb.clone() * g.powu(t - 1)
        + two * h_coeff_i(mu, m) * geom
}

/// Mean first-passage time of the deterministic family-I tree grown from an
/// edge with unit path lengths.
pub fn corollary8_y1<T: Scalar>(mu: u64, t: u64) -> T {
    if t == 0 {
        return T::one();
    }
    let mu_s = T::from_u64(mu);
    let base = T::one() + mu_s.clone();
    (T::from_u64(4 * mu * t) + mu_s - T::one()) * base.powu(t - 1)
        + T::from_u64(2) / base
}

/// Family-I scaling coefficient `mu * t * E[m(m-1)] / (1 + mu * E[m])`.
pub fn theta_i<T: Scalar>(mu: u64, m: &MomentTable<T>, t: u64) -> T {
    T::from_u64(mu) * T::from_u64(t) * (m.e2.clone() - m.e1.clone())
        / step_factor_i(mu, m)
}

/// Exact leading coefficient of `MFPT / (n * t)` for family I,
/// `mu * E[m(m+1)] / (1 + mu * E[m])` (twice the dominant MFPT term's
/// coefficient divided by the vertex-count factor).
pub fn mfpt_growth_coeff_i<T: Scalar>(mu: u64, m: &MomentTable<T>) -> T {
    T::from_u64(2 * mu) * m.eb.clone() / step_factor_i(mu, m)
}

// ---------------------------------------------------------------------------
// Family II (edge-based growth)
// ---------------------------------------------------------------------------

/// The recurring family-II symbols. `phi1` is the expected number of new
/// vertices per seed edge attributable to one m-draw with its tentacles;
/// `phi4` is the path-stretch factor `E[m] + 1`; `phi2` and `phi3` collect
/// the within-edge and cross-edge second-moment terms. The `psi` values are
/// the `(h^2, h, 1)` coefficients of the one-step W-polynomial and always
/// sum to zero.
#[derive(Clone, Debug)]
pub struct PhiPsiII<T = f64> {
    pub phi1: T,
    pub phi2: T,
    pub phi3: T,
    pub phi4: T,
    pub psi1: T,
    pub psi2: T,
    pub psi3: T,
}

pub fn phi_psi_ii<T: Scalar>(nu: u64, m: &MomentTable<T>, n: &MomentTable<T>) -> PhiPsiII<T> {
    let one = T::one();
    let two = T::from_u64(2);
    let three = T::from_u64(3);
    let nu_s = T::from_u64(nu);
    // s = nu * E[n] + 1: expected vertex count of one inserted vertex
    // together with its tentacles.
    let s = nu_s.clone() * n.e1.clone() + one.clone();

    let phi1 = m.e1.clone() * s.clone();
    let phi3 = m.eb.clone() * s.clone() + m.e1.clone() * nu_s.clone() * n.eb.clone();
    let phi4 = m.e1.clone() + one;
    let phi2 = m.ei.clone() * s.clone() * s
        + m.e2.clone() * nu_s.clone() * n.eb.clone()
        + (m.e1.clone() * binom2(&nu_s) + nu_s.clone() * nu_s.clone() * m.ebm.clone())
            * two.clone()
            * n.e1.clone()
            * n.eb.clone()
        + m.e1.clone() * nu_s * n.ei.clone();

    let sq = phi1.clone() * phi1.clone();
    let psi1 = phi1.clone() * phi3.clone() - phi4.clone() * sq.clone()
        - phi4.clone() * phi1.clone()
        + phi3.clone();
    let psi2 = two.clone() * phi4.clone() * sq.clone() - three * phi1.clone() * phi3.clone()
        + phi4.clone() * phi1.clone()
        + phi2.clone()
        - phi3.clone();
    let psi3 = two * phi1.clone() * phi3.clone() - phi4.clone() * sq - phi2.clone();

    PhiPsiII {
        phi1,
        phi2,
        phi3,
        phi4,
        psi1,
        psi2,
        psi3,
    }
}

pub fn w_poly_ii<T: Scalar>(
    h: &T,
    w: &T,
    nu: u64,
    m: &MomentTable<T>,
    n: &MomentTable<T>,
) -> (WPolynomial<T>, PhiPsiII<T>) {
    let one = T::one();
    let two = T::from_u64(2);
    let pp = phi_psi_ii(nu, m, n);
    let pairs = binom2(h);
    let pairs_less = binom2(&(h.clone() - one.clone()));
    let phi1_sq = pp.phi1.clone() * pp.phi1.clone();

    // Original-original pairs, stretched by the subdivisions.
    let case1 = w.clone() * pp.phi4.clone();
    // Pairs inside one edge's insertion group.
    let case2 = (h.clone() - one.clone()) * pp.phi2.clone();
    // Original vertex to an insertion group.
    let case3 = two.clone() * case1.clone() * pp.phi1.clone()
        - two.clone() * pairs.clone() * pp.phi4.clone() * pp.phi1.clone()
        + two.clone() * pairs * pp.phi3.clone();
    // Two distinct insertion groups.
    let case4 = (case1.clone() - (h.clone() - one.clone()) * pp.phi4.clone()) * phi1_sq.clone()
        - two.clone() * pp.phi4.clone() * phi1_sq.clone() * pairs_less.clone()
        + two * pp.phi1.clone() * pp.phi3.clone() * pairs_less;

    let coeff_w = pp.phi4.clone()
        * (one.clone() + pp.phi1.clone())
        * (one + pp.phi1.clone());
    let total = coeff_w.clone() * w.clone()
        + pp.psi1.clone() * h.clone() * h.clone()
        + pp.psi2.clone() * h.clone()
        + pp.psi3.clone();
    let poly = WPolynomial {
        total,
        cases: [case1, case2, case3, case4],
        coeff_w,
        coeff_h2: pp.psi1.clone(),
        coeff_h: pp.psi2.clone(),
        coeff_const: pp.psi3.clone(),
    };
    (poly, pp)
}

pub fn vertices_ii<T: Scalar>(
    h: &T,
    nu: u64,
    m: &MomentTable<T>,
    n: &MomentTable<T>,
    t: u64,
) -> T {
    let one = T::one();
    let growth = one.clone() + phi_psi_ii(nu, m, n).phi1;
    (h.clone() - one.clone()) * growth.powu(t) + one
}

pub fn wiener_ii<T: Scalar>(
    h: &T,
    w: &T,
    nu: u64,
    m: &MomentTable<T>,
    n: &MomentTable<T>,
    t: u64,
) -> T {
    if t == 0 {
        return w.clone();
    }
    let one = T::one();
    let two = T::from_u64(2);
    let pp = phi_psi_ii(nu, m, n);
    let growth = one.clone() + pp.phi1.clone();
    let step_w = pp.phi4.clone() * growth.clone() * growth.clone();
    let mixed = pp.phi4.clone() * growth.clone();
    let h1 = h.clone() - one.clone();

    // The W-polynomial's constant, linear, and quadratic h-terms each sum a
    // geometric series under iteration; the constant one multiplies
    // psi1 + psi2 + psi3 = 0 and drops.
    let linear = h1.clone()
        * (two.clone() * pp.psi1.clone() + pp.psi2.clone())
        * growth.powu(t - 1)
        * (mixed.powu(t) - one.clone())
        / (mixed - one.clone());
    let quadratic = pp.psi1.clone()
        * h1.clone()
        * h1
        * growth.powu(2 * (t - 1))
        * (pp.phi4.powu(t) - one.clone())
        / (pp.phi4.clone() - one);
    w.clone() * step_w.powu(t) + linear + quadratic
}

/// MFPT via the Wiener identity `2 W = n * MFPT`, which holds exactly on
/// trees and at the level of the expectation formulas.
pub fn mfpt_ii<T: Scalar>(
    h: &T,
    w: &T,
    nu: u64,
    m: &MomentTable<T>,
    n: &MomentTable<T>,
    t: u64,
) -> T {
    T::from_u64(2) * wiener_ii(h, w, nu, m, n, t) / vertices_ii(h, nu, m, n, t)
}

/// MFPT of the T-graph after `t` generations.
pub fn corollary13_tgraph<T: Scalar>(t: u64) -> T {
    let one = T::one();
    let two = T::from_u64(2);
    let p18 = T::from_u64(18).powu(t);
    let p9 = T::from_u64(9).powu(t);
    let p3 = T::from_u64(3).powu(t);
    two.clone() / (p3.clone() + one)
        * (p18.clone()
            - two * (p18.clone() - p3) / T::from_u64(5)
            - (p18 - p9) / T::from_u64(3))
}

/// MFPT of the nu-fractal tree (edge seed, unit subdivision, `nu` unit
/// tentacles) after `t` generations.
pub fn nu_fractal_mfpt<T: Scalar>(nu: u64, t: u64) -> T {
    if t == 0 {
        return T::one();
    }
    let one = T::one();
    let two = T::from_u64(2);
    let np1 = T::from_u64(nu + 1);
    let np2 = T::from_u64(nu + 2);
    let leading = (two.clone() * np2.clone() * np2.clone()).powu(t);
    let middle = np1 * np2.powu(t) * (T::from_u64(2 * nu + 4).powu(t) - one.clone())
        / T::from_u64(2 * nu + 3);
    let trailing = np2.powu(2 * t - 1) * (two.clone().powu(t) - one.clone());
    two / (np2.powu(t) + one) * (leading - middle - trailing)
}

/// Wiener index of the m-th order subdivision of a seed with summary
/// `(h, w)`.
pub fn corollary11_subdivision<T: Scalar>(h: &T, w: &T, m: u64) -> T {
    let m128 = m as u128;
    let mp1 = T::from_u128((m128 + 1) * (m128 + 1) * (m128 + 1));
    let half_quad = T::from_u128(m128 * (m128 + 1) * (m128 + 1)) / T::from_u64(2);
    // Sum over l in 2..=m of binom(l, 2) telescopes to binom(m+1, 3).
    let tail = T::from_u128((m128 + 1) * m128 * (m128 - 1) / 6);
    mp1 * w.clone() - half_quad.clone() * h.clone() * h.clone()
        + (half_quad + tail.clone()) * h.clone()
        - tail
}

/// Power-law exponent of MFPT against vertex count for family II.
pub fn theta_ii(nu: u64, m: &MomentTable<f64>, n: &MomentTable<f64>) -> f64 {
    let phi1 = phi_psi_ii(nu, m, n).phi1;
    1.0 + (m.e1 + 1.0).ln() / (1.0 + phi1).ln()
}

/// Spectral dimension of family II (always below 2).
pub fn spectral_dim_ii(nu: u64, m: &MomentTable<f64>, n: &MomentTable<f64>) -> f64 {
    let phi1 = phi_psi_ii(nu, m, n).phi1;
    2.0 * (1.0 + phi1).ln() / ((m.e1 + 1.0).ln() + (1.0 + phi1).ln())
}

// ---------------------------------------------------------------------------
// Family III (mixture growth)
// ---------------------------------------------------------------------------

/// Per-step path-stretch factor `2 E[m] + 1` (each edge absorbs two blocks
/// of inserted vertices).
fn stretch_iii<T: Scalar>(m: &MomentTable<T>) -> T {
    T::from_u64(2) * m.e1.clone() + T::one()
}

pub fn w_poly_iii<T: Scalar>(h: &T, w: &T, mu: u64, m: &MomentTable<T>) -> WPolynomial<T> {
    debug_assert!(mu >= 2, "mixture growth requires mu >= 2");
    let one = T::one();
    let two = T::from_u64(2);
    let mu_s = T::from_u64(mu);
    let kappa = stretch_iii(m);
    let g = step_factor_i(mu, m);
    let pairs = binom2(h);

    // Original-original pairs, stretched by the per-endpoint insertions.
    let case1 = w.clone() * kappa.clone();
    // Pairs inside one vertex's star of mu tentacles (identical to the
    // family-I case: each vertex carries mu independently drawn tentacles).
    let case2 = h.clone()
        * (mu_s.clone() * m.eb.clone()
            + m.e1.clone() * mu_s.clone() * (mu_s.clone() - one.clone()) * m.eb.clone()
            + mu_s.clone() * m.ei.clone());
    // Original vertex to another vertex's tentacles: mu - 1 tentacles extend
    // the connecting path, one lies on it (a contraction).
    let case3 = two.clone() * case1.clone() * mu_s.clone() * m.e1.clone()
        + two.clone() * (mu_s.clone() - two.clone()) * pairs.clone() * m.eb.clone();
    // Tentacle-to-tentacle across two vertices, combining the four
    // expansion/contraction orientations.
    let case4 = case1.clone() * (mu_s.clone() * m.e1.clone()).powu(2)
        + two.clone()
            * (mu_s.clone() * mu_s.clone() - two * mu_s.clone())
            * m.e1.clone()
            * pairs
            * m.eb.clone();

    let coeff_w = kappa * g.clone() * g.clone();
    let coeff_h2 = (mu_s.clone() - T::from_u64(2)) * g * m.eb.clone();
    let coeff_h = (mu_s.clone() * m.e1.clone() + T::from_u64(2)) * m.eb.clone()
        + mu_s * m.ei.clone();
    let total = coeff_w.clone() * w.clone()
        + coeff_h2.clone() * h.clone() * h.clone()
        + coeff_h.clone() * h.clone();
    WPolynomial {
        total,
        cases: [case1, case2, case3, case4],
        coeff_w,
        coeff_h2,
        coeff_h,
        coeff_const: T::zero(),
    }
}

pub fn vertices_iii<T: Scalar>(h: &T, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    vertices_i(h, mu, m, t)
}

pub fn wiener_iii<T: Scalar>(h: &T, w: &T, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    if t == 0 {
        return w.clone();
    }
    let one = T::one();
    let mu_s = T::from_u64(mu);
    let kappa = stretch_iii(m);
    let g = step_factor_i(mu, m);
    let geo_kappa =
        (kappa.powu(t) - one.clone()) / (T::from_u64(2) * m.e1.clone());
    let mixed = g.clone() * kappa.clone();
    let geo_mixed = (mixed.powu(t) - one.clone()) / (mixed - one);
    let h_coeff = (mu_s.clone() * m.e1.clone() + T::from_u64(2)) * m.eb.clone()
        + mu_s.clone() * m.ei.clone();

    w.clone() * kappa.powu(t) * g.powu(2 * t)
        + (mu_s - T::from_u64(2)) * h.clone() * h.clone() * m.eb.clone()
            * g.powu(2 * t - 1)
            * geo_kappa
        + h.clone() * h_coeff * g.powu(t - 1) * geo_mixed
}

pub fn mfpt_iii<T: Scalar>(h: &T, w: &T, mu: u64, m: &MomentTable<T>, t: u64) -> T {
    let two = T::from_u64(2);
    if t == 0 {
        return two * w.clone() / h.clone();
    }
    let one = T::one();
    let mu_s = T::from_u64(mu);
    let kappa = stretch_iii(m);
    let g = step_factor_i(mu, m);
    let geo_kappa = (kappa.powu(t) - one.clone()) / (two.clone() * m.e1.clone());
    let mixed = g.clone() * kappa.clone();
    let geo_mixed = (mixed.powu(t) - one.clone()) / (mixed - one);
    let h_coeff = (mu_s.clone() * m.e1.clone() + two.clone()) * m.eb.clone()
        + mu_s.clone() * m.ei.clone();

    two.clone() * w.clone() / h.clone() * kappa.powu(t) * g.powu(t)
        + two.clone() * (mu_s - two.clone()) * h.clone() * m.eb.clone()
            * g.powu(t - 1)
            * geo_kappa
        + two * h_coeff * geo_mixed / g
}

/// MFPT of the Vicsek fractal with functionality `mu` after `t` generations.
pub fn corollary17_vicsek<T: Scalar>(mu: u64, t: u64) -> T {
    let one = T::one();
    let mu_s = T::from_u64(mu);
    let mp1 = T::from_u64(mu + 1);
    let p3 = T::from_u64(3).powu(t);
    T::from_u64(2) * mu_s.clone() * mu_s.clone() / mp1.clone()
        * T::from_u64(3 * mu + 3).powu(t)
        + (mu_s - T::from_u64(2)) * mp1.powu(t) * (p3.clone() - one.clone())
        + T::from_u64(2 * mu + 4) * (p3 * mp1.powu(t) - one)
            / (mp1 * T::from_u64(3 * mu + 2))
}

/// Power-law exponent of MFPT against vertex count for family III.
pub fn theta_iii(mu: u64, m: &MomentTable<f64>) -> f64 {
    1.0 + (2.0 * m.e1 + 1.0).ln() / (mu as f64 * m.e1 + 1.0).ln()
}

/// Spectral dimension of family III (always below 2).
pub fn spectral_dim_iii(mu: u64, m: &MomentTable<f64>) -> f64 {
    let lg = (mu as f64 * m.e1 + 1.0).ln();
    2.0 * lg / (lg + (2.0 * m.e1 + 1.0).ln())
}
