//! Cross-module identity checks: closed forms against constructed trees,
//! the fast combinatorial routes against the dense solver, and the
//! stochastic expectation formulas against exhaustive outcome enumeration.

mod common;

use approx::assert_relative_eq;
use num::rational::BigRational;
use num::{FromPrimitive, ToPrimitive};

use common::{enumerated_expected_wiener, random_tree};
use grovetree::analytic::{self, SeedSummary};
use grovetree::growth::{self, preset, GrowthSpec, LengthDistribution, RngStream};
use grovetree::walk;
use grovetree::Tree;

fn unit() -> LengthDistribution {
    LengthDistribution::constant(1).unwrap()
}

fn coin(values: [u64; 2]) -> LengthDistribution {
    LengthDistribution::new(values.to_vec(), vec![0.5, 0.5]).unwrap()
}

/// Deterministic presets with `t` chosen to keep n at desk scale.
fn preset_instances() -> Vec<(&'static str, Option<u64>, u64)> {
    vec![
        ("y1", Some(1), 3),
        ("y1", Some(2), 3),
        ("y1", Some(3), 2),
        ("t-graph", None, 3),
        ("vicsek", Some(2), 2),
        ("vicsek", Some(3), 2),
        ("nu-fractal", Some(2), 2),
        ("nu-fractal", Some(3), 2),
        ("subdivision", Some(2), 3),
        ("subdivision", Some(3), 2),
    ]
}

#[test]
fn analytic_wiener_matches_constructed_trees_exactly() {
    // For deterministic specs the expectation formulas must reproduce the
    // constructed tree's Wiener index as exact integers (rational path).
    for (name, param, t_max) in preset_instances() {
        let (seed, spec) = preset(name, param).unwrap();
        let summary = SeedSummary::from_tree(&seed).unwrap();
        let m = analytic::moments::<BigRational>(&spec.m_dist);
        let n = analytic::moments::<BigRational>(&spec.n_dist);
        for t in 0..=t_max {
            let mut rng = RngStream::new(1, t);
            let tree = growth::grow(&seed, &spec, t, &mut rng).unwrap();
            let measured = BigRational::from_u128(tree.wiener_fast().unwrap()).unwrap();
            let predicted = match spec.kind {
                growth::GrowthKind::Vugm => {
                    analytic::wiener_i::<BigRational>(&summary, spec.mu, &m, t)
                }
                growth::GrowthKind::Eugm => {
                    analytic::wiener_ii::<BigRational>(&summary, spec.nu, &m, &n, t)
                }
                growth::GrowthKind::Mugm => {
                    analytic::wiener_iii::<BigRational>(&summary, spec.mu, &m, t)
                }
            };
            assert_eq!(predicted, measured, "{name} t={t}");
            // Vertex counts too.
            let n_predicted = match spec.kind {
                growth::GrowthKind::Vugm => {
                    analytic::vertices_i::<BigRational>(summary.h, spec.mu, &m, t)
                }
                growth::GrowthKind::Eugm => {
                    analytic::vertices_ii::<BigRational>(summary.h, spec.nu, &m, &n, t)
                }
                growth::GrowthKind::Mugm => {
                    analytic::vertices_iii::<BigRational>(summary.h, spec.mu, &m, t)
                }
            };
            assert_eq!(n_predicted.to_usize().unwrap(), tree.n(), "{name} t={t}");
        }
    }
}

#[test]
fn analytic_mfpt_matches_walk_oracle_on_presets() {
    for (name, param, t_max) in preset_instances() {
        let (seed, spec) = preset(name, param).unwrap();
        let summary = SeedSummary::from_tree(&seed).unwrap();
        let m = analytic::moments::<f64>(&spec.m_dist);
        let n = analytic::moments::<f64>(&spec.n_dist);
        let t = t_max.min(2);
        let mut rng = RngStream::new(2, 0);
        let tree = growth::grow(&seed, &spec, t, &mut rng).unwrap();
        let oracle = walk::mfpt_exact_verified(&tree).unwrap();
        let predicted = match spec.kind {
            growth::GrowthKind::Vugm => analytic::mfpt_i::<f64>(&summary, spec.mu, &m, t),
            growth::GrowthKind::Eugm => analytic::mfpt_ii::<f64>(&summary, spec.nu, &m, &n, t),
            growth::GrowthKind::Mugm => analytic::mfpt_iii::<f64>(&summary, spec.mu, &m, t),
        };
        assert_relative_eq!(predicted, oracle, max_relative = 1e-9);
    }
}

#[test]
fn wiener_i_two_steps_matches_a_grown_tree() {
    // Deterministic unit-path growth from an edge, two generations.
    let (seed, spec) = preset("y1", Some(1)).unwrap();
    let mut rng = RngStream::new(0, 0);
    let tree = growth::grow(&seed, &spec, 2, &mut rng).unwrap();
    let summary = SeedSummary::new(2, 1).unwrap();
    let m = analytic::moments::<f64>(&unit());
    assert_eq!(
        analytic::wiener_i::<f64>(&summary, 1, &m, 2),
        tree.wiener_bfs().unwrap() as f64
    );
    assert_relative_eq!(
        analytic::mfpt_i::<f64>(&summary, 1, &m, 2),
        walk::mfpt_exact(&tree).unwrap(),
        max_relative = 1e-12
    );
}

#[test]
fn family_i_one_step_expectation_matches_enumeration() {
    // Edge seed, one path per vertex, lengths 1 or 2 with equal odds: the
    // four outcomes are P4, P5, P5, P6, so E[W] = 21.25 exactly.
    let spec = GrowthSpec::vugm(1, coin([1, 2])).unwrap();
    let seed = Tree::path(2).unwrap();
    let enumerated = enumerated_expected_wiener(&seed, &spec, 1);
    assert_eq!(enumerated, 21.25);
    let summary = SeedSummary::new(2, 1).unwrap();
    let m = analytic::moments::<f64>(&spec.m_dist);
    assert_eq!(analytic::w_poly_i::<f64>(&summary, 1, &m).total, enumerated);

    // A second configuration with mu = 2 on a P3 seed.
    let spec = GrowthSpec::vugm(2, coin([1, 3])).unwrap();
    let seed = Tree::path(3).unwrap();
    let summary = SeedSummary::new(3, 4).unwrap();
    let m = analytic::moments::<f64>(&spec.m_dist);
    let enumerated = enumerated_expected_wiener(&seed, &spec, 1);
    assert_relative_eq!(
        analytic::w_poly_i::<f64>(&summary, 2, &m).total,
        enumerated,
        max_relative = 1e-12
    );
}

#[test]
fn family_ii_one_step_expectation_matches_enumeration() {
    // Edge seed: per-edge m-draw in {1,2}, one tentacle per inserted vertex
    // with length in {1,2}.
    let spec = GrowthSpec::eugm(1, coin([1, 2]), coin([1, 2])).unwrap();
    let seed = Tree::path(2).unwrap();
    let summary = SeedSummary::new(2, 1).unwrap();
    let m = analytic::moments::<f64>(&spec.m_dist);
    let n = analytic::moments::<f64>(&spec.n_dist);
    let (poly, _) = analytic::w_poly_ii::<f64>(&summary, 1, &m, &n);
    assert_eq!(poly.total, enumerated_expected_wiener(&seed, &spec, 1));

    // P3 seed, two tentacles.
    let spec = GrowthSpec::eugm(2, coin([1, 2]), coin([1, 2])).unwrap();
    let seed = Tree::path(3).unwrap();
    let summary = SeedSummary::new(3, 4).unwrap();
    let (poly, _) = analytic::w_poly_ii::<f64>(&summary, 2, &m, &n);
    assert_eq!(poly.total, enumerated_expected_wiener(&seed, &spec, 1));
}

#[test]
fn family_iii_one_step_expectation_matches_enumeration() {
    // P3 seed (star S_2), mu = 2, per-endpoint m-draws in {1,2}.
    let spec = GrowthSpec::mugm(2, coin([1, 2])).unwrap();
    let seed = Tree::path(3).unwrap();
    let summary = SeedSummary::new(3, 4).unwrap();
    let m = analytic::moments::<f64>(&spec.m_dist);
    let poly = analytic::w_poly_iii::<f64>(&summary, 2, &m);
    assert_eq!(poly.total, enumerated_expected_wiener(&seed, &spec, 1));

    // Star S_3 seed with mu = 3.
    let spec = GrowthSpec::mugm(3, coin([1, 2])).unwrap();
    let seed = Tree::star(3).unwrap();
    let summary = SeedSummary::new(4, 9).unwrap();
    let poly = analytic::w_poly_iii::<f64>(&summary, 3, &m);
    assert_relative_eq!(
        poly.total,
        enumerated_expected_wiener(&seed, &spec, 1),
        max_relative = 1e-12
    );
}

#[test]
fn stochastic_vertex_counts_match_closed_forms() {
    // Sample means of realized vertex counts against the expectation
    // formulas, 4-sigma band.
    let replicates = 3000u64;
    let seed = Tree::path(3).unwrap();
    let summary = SeedSummary::from_tree(&seed).unwrap();

    let configs: Vec<(GrowthSpec, f64)> = vec![
        {
            let spec = GrowthSpec::vugm(2, coin([1, 2])).unwrap();
            let m = analytic::moments::<f64>(&spec.m_dist);
            let expect = analytic::vertices_i::<f64>(summary.h, 2, &m, 2);
            (spec, expect)
        },
        {
            let spec = GrowthSpec::eugm(1, coin([1, 2]), coin([1, 2])).unwrap();
            let m = analytic::moments::<f64>(&spec.m_dist);
            let n = analytic::moments::<f64>(&spec.n_dist);
            let expect = analytic::vertices_ii::<f64>(summary.h, 1, &m, &n, 2);
            (spec, expect)
        },
        {
            let spec = GrowthSpec::mugm(2, coin([1, 2])).unwrap();
            let m = analytic::moments::<f64>(&spec.m_dist);
            let expect = analytic::vertices_iii::<f64>(summary.h, 2, &m, 2);
            (spec, expect)
        },
    ];
    for (spec, expect) in configs {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for r in 0..replicates {
            let mut rng = RngStream::new(13, r);
            let tree = growth::grow(&seed, &spec, 2, &mut rng).unwrap();
            sum += tree.n() as f64;
            sum_sq += (tree.n() as f64) * (tree.n() as f64);
        }
        let mean = sum / replicates as f64;
        let var = (sum_sq - sum * mean) / (replicates as f64 - 1.0);
        let se = (var / replicates as f64).sqrt();
        assert!(
            (mean - expect).abs() <= 4.0 * se,
            "{:?}: mean {mean} vs {expect} (se {se})",
            spec.kind
        );
    }
}

#[test]
fn solver_against_combinatorial_routes_on_random_trees() {
    // Scaled-down version of the acceptance identity suite: every adjacent
    // pair against the solver, additivity for all pairs, commute times,
    // neighborhood sums, and the 2W/n average.
    let mut rng = RngStream::new(404, 0);
    for trial in 0..12 {
        let n = 2 + rng.pick(119);
        let tree = random_tree(n, &mut rng);
        let table = walk::hitting_times_solve(&tree).unwrap();
        let splits = tree.split_sizes();

        for &(u, v) in tree.edges() {
            for (a, b) in [(u, v), (v, u)] {
                let fast = walk::fpt_adjacent_with(&tree, &splits, a, b).unwrap() as f64;
                assert!(
                    (fast - table.get(a, b)).abs() <= 1e-9,
                    "trial {trial}: edge ({a},{b})"
                );
            }
        }
        let distances = tree.all_distances();
        for u in 0..n {
            let want = 2 * (n as u64 - 1) - tree.degree(u) as u64;
            assert_eq!(walk::lemma1_sum(&tree, u).unwrap(), want);
            for v in u + 1..n {
                let commute = walk::commute_time(&tree, u, v).unwrap();
                assert_eq!(commute, 2 * (n as u64 - 1) * distances.get(u, v) as u64);
            }
        }
        let fast_avg = walk::mfpt_exact(&tree).unwrap();
        assert_relative_eq!(table.average(), fast_avg, max_relative = 1e-9);
        assert_eq!(tree.wiener_fast().unwrap(), tree.wiener_bfs().unwrap());
    }
}

#[test]
fn spectral_route_on_random_trees() {
    let mut rng = RngStream::new(505, 0);
    for _ in 0..6 {
        let n = 2 + rng.pick(150);
        let tree = random_tree(n, &mut rng);
        let check = walk::laplacian_eigencheck(&tree).unwrap();
        assert_relative_eq!(
            check.mfpt_spectral,
            walk::mfpt_exact(&tree).unwrap(),
            max_relative = 1e-6
        );
    }
}

#[test]
fn monte_carlo_against_solver_value() {
    // T-graph generation 2, a random-ish pair, 4-sigma agreement.
    let (seed, spec) = preset("t-graph", None).unwrap();
    let mut rng = RngStream::new(3, 0);
    let tree = growth::grow(&seed, &spec, 2, &mut rng).unwrap();
    let table = walk::hitting_times_solve(&tree).unwrap();
    let config = walk::WalkConfig {
        trials: 60_000,
        max_steps: None,
        rng: RngStream::new(21, 0),
    };
    let estimate = walk::monte_carlo_fpt(&tree, 3, 7, &config).unwrap();
    let exact = table.get(3, 7);
    assert!(
        (estimate.mean - exact).abs() <= 4.0 * estimate.std_error,
        "mc {} vs exact {exact} (se {})",
        estimate.mean,
        estimate.std_error
    );
}

#[test]
fn corollary8_against_brute_force_growth() {
    // Deterministic family-I MFPT for mu in 1..=3, t in 1..=3, via actual
    // trees and integer Wiener indices.
    for mu in 1..=3u64 {
        let (seed, spec) = preset("y1", Some(mu)).unwrap();
        for t in 1..=3u64 {
            let mut rng = RngStream::new(0, 0);
            let tree = growth::grow(&seed, &spec, t, &mut rng).unwrap();
            let measured = 2.0 * tree.wiener_fast().unwrap() as f64 / tree.n() as f64;
            assert_relative_eq!(
                measured,
                analytic::corollary8_y1::<f64>(mu, t),
                max_relative = 1e-9
            );
        }
    }
}

#[test]
fn theorem4_formula_vs_spectral_and_solver_small() {
    // One tree, three fully independent MFPT routes.
    let (seed, spec) = preset("nu-fractal", Some(2)).unwrap();
    let mut rng = RngStream::new(8, 0);
    let tree = growth::grow(&seed, &spec, 2, &mut rng).unwrap();
    let fast = walk::mfpt_exact(&tree).unwrap();
    let spectral = walk::laplacian_eigencheck(&tree).unwrap().mfpt_spectral;
    let solver = walk::hitting_times_solve(&tree).unwrap().average();
    assert_relative_eq!(fast, spectral, max_relative = 1e-6);
    assert_relative_eq!(fast, solver, max_relative = 1e-9);
    let summary = SeedSummary::new(2, 1).unwrap();
    let m = analytic::moments::<f64>(&spec.m_dist);
    let n = analytic::moments::<f64>(&spec.n_dist);
    assert_relative_eq!(
        fast,
        analytic::mfpt_ii::<f64>(&summary, 2, &m, &n, 2),
        max_relative = 1e-9
    );
    assert_relative_eq!(
        fast,
        analytic::nu_fractal_mfpt::<f64>(2, 2),
        max_relative = 1e-9
    );
}
