//! Acceptance suite. Each test pins one criterion with its tolerance and
//! prints a single PASS line; a failed assertion marks the criterion
//! FAIL through the harness.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

mod common;

use std::time::Instant;

use common::{companion_roots, hausdorff, ladder_model, random_models, resolvent_determinant};
use ebm_spectral::harness::{run_experiment, ExperimentConfig};
use ebm_spectral::inversion::{invert, MeasuredCluster};
use ebm_spectral::noise::{perturb_cluster, NoiseMode, NoiseSpec};
use ebm_spectral::relaxation::{EbmModel, Regime};
use ebm_spectral::spectral::{
    build_augmented_matrix, characteristic_polynomial, compute_cluster, interlacing_holds,
    secular_residual, Cluster, FrequencyIndex,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PAIRS: [(u32, u32); 3] = [(81, 91), (81, 501), (81, 1001)];
const MODULI: [f64; 3] = [0.5, 1.0, 5.0];
const TOL: f64 = 1e-12;

fn k(v: u32) -> FrequencyIndex {
    FrequencyIndex::new(v).unwrap()
}

fn forward(model: &EbmModel, kv: u32) -> Cluster {
    compute_cluster(model, k(kv), TOL).unwrap()
}

fn measured(model: &EbmModel, kv: u32) -> MeasuredCluster {
    MeasuredCluster::from_cluster(&forward(model, kv))
}

/// Absolute band on |D_inv − D| per frequency pair; the widest pair gets
/// a `max(1, D)`-proportional band.
fn noise_free_band(pair: (u32, u32), d: f64, wide: f64) -> f64 {
    match pair {
        (81, 1001) => 1e-3,
        (81, 501) => 2e-3,
        (81, 91) => wide * d.max(1.0),
        _ => unreachable!("pinned pairs only"),
    }
}

fn noise_free_errors(n: usize, d: f64) -> Vec<f64> {
    let model = ladder_model(n, d);
    PAIRS
        .iter()
        .map(|&(k1, k2)| {
            let c1 = measured(&model, k1);
            let c2 = measured(&model, k2);
            let result = invert(&c1, &c2, TOL).unwrap();
            (result.d_inv - model.d()).abs()
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[test]
fn criterion_1_table_one_noise_free_n5() {
    let started = Instant::now();
    for &d in &MODULI {
        let errors = noise_free_errors(5, d);
        for (&pair, &err) in PAIRS.iter().zip(&errors) {
            let band = noise_free_band(pair, d, 5e-3);
            assert!(
                err <= band,
                "D={d}, pair {pair:?}: |D_inv − D| = {err:e} > {band:e}"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "noise-free N=5 grid took {elapsed:?}"
    );
    println!(
        "criterion 1: PASS — N=5 noise-free D bands (1e-3 / 2e-3 / 5e-3·max(1,D)) in {elapsed:?}"
    );
}

#[test]
fn criterion_2_table_two_noise_free_n9() {
    let started = Instant::now();
    for &d in &MODULI {
        let errors = noise_free_errors(9, d);
        for (&pair, &err) in PAIRS.iter().zip(&errors) {
            let band = noise_free_band(pair, d, 1e-2);
            assert!(
                err <= band,
                "D={d}, pair {pair:?}: |D_inv − D| = {err:e} > {band:e}"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 2.0,
        "noise-free N=9 grid took {elapsed:?}"
    );
    println!(
        "criterion 2: PASS — N=9 noise-free D bands (1e-3 / 2e-3 / 1e-2·max(1,D)) in {elapsed:?}"
    );
}

#[test]
fn criterion_3_noisy_statistics() {
    // The published noisy tables behave exactly like one shared
    // multiplicative factor per run (the D rows scale together and the
    // values repeat across frequency pairs), so the statistical bounds
    // are checked in single-draw mode over 100 seeds per grid point.
    let started = Instant::now();
    let mode = NoiseMode::SingleDraw;
    for (delta, d_bound) in [(0.05, 0.05), (0.1, 0.15)] {
        let mut d_errors = Vec::new();
        let mut r_errors = Vec::new();
        let mut b_errors = Vec::new();
        for &d in &MODULI {
            let model = ladder_model(5, d);
            let exact1 = forward(&model, 81);
            let exact2 = forward(&model, 1001);
            for seed in 0..100 {
                let spec = NoiseSpec::new(delta, seed, mode).unwrap();
                let c1 = perturb_cluster(&exact1, &spec);
                let c2 = perturb_cluster(&exact2, &spec);
                match invert(&c1, &c2, TOL) {
                    Ok(result) => {
                        d_errors.push((result.d_inv - model.d()).abs() / model.d());
                        for (got, want) in result.r_inv.iter().zip(model.rates()) {
                            r_errors.push((got - want).abs() / want);
                        }
                        for (got, want) in result.b_inv.iter().zip(model.weights()) {
                            b_errors.push((got - want).abs() / want);
                        }
                    }
                    Err(_) => d_errors.push(f64::INFINITY),
                }
            }
        }
        let d_median = median(&mut d_errors);
        let r_median = median(&mut r_errors);
        let b_median = median(&mut b_errors);
        assert!(
            d_median <= d_bound,
            "δ={delta}: median D error {d_median} > {d_bound}"
        );
        assert!(
            r_median <= b_median,
            "δ={delta}: rate error median {r_median} above weight median {b_median}"
        );
        println!(
            "criterion 3 (δ={delta}): median rel err D={d_median:.4} r={r_median:.4} b={b_median:.4}"
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "statistical suite took {elapsed:?}"
    );
    println!(
        "criterion 3: PASS — 100-seed medians within 0.05 (δ=0.05) and 0.15 (δ=0.1), r ≤ b, in {elapsed:?}"
    );
}

#[test]
fn criterion_4_round_trip_two_hundred_models() {
    let models = random_models(200, 42, 9);
    let mut worst: f64 = 0.0;
    for (idx, model) in models.iter().enumerate() {
        let c1 = measured(model, 81);
        let c2 = measured(model, 1001);
        let result = invert(&c1, &c2, TOL)
            .unwrap_or_else(|e| panic!("model {idx} (N={}): {e}", model.dimension()));
        for (got, want) in result.r_inv.iter().zip(model.rates()) {
            worst = worst.max((got - want).abs() / want.abs());
        }
        for (got, want) in result.b_inv.iter().zip(model.weights()) {
            worst = worst.max((got - want).abs() / want.abs());
        }
        worst = worst.max((result.d_inv - model.d()).abs() / model.d().abs());
        assert!(
            worst <= 1e-5,
            "model {idx} (N={}) pushed the worst relative error to {worst:e}",
            model.dimension()
        );
    }
    println!(
        "criterion 4: PASS — 200 stratified models round-trip all parameters within 1e-5 (worst {worst:.2e})"
    );
}

#[test]
fn criterion_5_interlacing_and_secular_everywhere() {
    let mut clusters = 0usize;
    let mut check = |model: &EbmModel, kv: u32| {
        let cluster = forward(model, kv);
        assert!(
            interlacing_holds(model, &cluster),
            "interlacing failed: N={}, k={kv}",
            model.dimension()
        );
        let scale = model.d()
            + model
                .weights()
                .iter()
                .map(|b| b / model.rates()[0])
                .sum::<f64>();
        for &a in cluster.real_roots() {
            let residual = secular_residual(model, k(kv), a).unwrap();
            assert!(
                residual.abs() <= 1e-8 * scale,
                "secular residual {residual:e} at a={a}, N={}, k={kv}",
                model.dimension()
            );
        }
        clusters += 1;
    };
    // the forward clusters behind criteria 1–3
    for n in [5, 9] {
        for &d in &MODULI {
            let model = ladder_model(n, d);
            for &(k1, k2) in &PAIRS {
                check(&model, k1);
                check(&model, k2);
            }
        }
    }
    // and behind criterion 4
    for model in random_models(200, 42, 9) {
        check(&model, 81);
        check(&model, 1001);
    }
    println!(
        "criterion 5: PASS — strict interlacing and secular residual ≤ 1e-8 on {clusters} clusters"
    );
}

#[test]
fn criterion_6_oracle_equivalence() {
    // all-roots agreement for N ≤ 6
    let mut worst_distance: f64 = 0.0;
    for model in random_models(40, 7041776, 6) {
        for kv in [1, 2, 81, 501] {
            let p = characteristic_polynomial(&model, k(kv));
            let cluster = forward(&model, kv);
            let distance = hausdorff(&cluster.all_roots(), &companion_roots(&p));
            worst_distance = worst_distance.max(distance);
            assert!(
                distance <= 1e-8,
                "N={}, k={kv}: Hausdorff {distance:e}",
                model.dimension()
            );
        }
    }
    // determinant identity det(λI − A) = (2k−1)² P(λ) for N ≤ 4
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for model in random_models(12, 1066, 4) {
        for kv in [1, 3, 81] {
            let a = build_augmented_matrix(&model, k(kv));
            let p = characteristic_polynomial(&model, k(kv));
            let scale = k(kv).odd() * k(kv).odd();
            for _ in 0..20 {
                let lambda = rng.gen_range(-60.0..60.0);
                let det = resolvent_determinant(&a, lambda);
                let predicted = scale * p.evaluate(lambda);
                let magnitude = scale * p.evaluate_abs(lambda.abs().max(1.0));
                assert!(
                    (det - predicted).abs() <= 1e-9 * magnitude,
                    "N={}, k={kv}, λ={lambda}",
                    model.dimension()
                );
            }
        }
    }
    println!(
        "criterion 6: PASS — companion oracle within 1e-8 (worst {worst_distance:.2e}) and determinant identity within 1e-9"
    );
}

#[test]
fn criterion_7_glassy_consistency() {
    for n in [5, 9] {
        // glassy models both ways: the literal ladder with D set to its
        // own h, and the normalized ladder whose h is 1
        let (h_literal, _) = ladder_model(n, 1.0).modulus_h();
        let literal = ladder_model(n, h_literal);
        let normalized = ladder_model(n, 1.0).normalized_h();
        for model in [literal, normalized] {
            assert_eq!(model.modulus_h().1, Regime::Glassy);
            let reference = {
                let c1 = measured(&model, 81);
                let c2 = measured(&model, 1001);
                invert(&c1, &c2, TOL).unwrap().d_inv
            };
            for &(k1, k2) in &PAIRS {
                let c1 = measured(&model, k1);
                let c2 = measured(&model, k2);
                let result = invert(&c1, &c2, TOL).unwrap();
                assert!(
                    (result.d_inv - result.d_inv_glassy).abs() <= 1e-6,
                    "N={n}, pair ({k1},{k2}): routes differ"
                );
                // the glassy route at any pair reproduces the widest-pair value
                assert!(
                    (result.d_inv_glassy - reference).abs() <= 1e-6,
                    "N={n}, pair ({k1},{k2}): glassy route departs from (81,1001) value"
                );
            }
        }
    }
    println!(
        "criterion 7: PASS — recover_d and the glassy route agree within 1e-6 on glassy data, matching the (81,1001) value at every pair"
    );
}

#[test]
fn criterion_8_frequency_gap_monotonicity() {
    // Noise-free reconstruction errors bottom out at the double-precision
    // floor, where successive pairs differ by single ULPs in either
    // direction; the ordering is asserted up to that floor. 1e-13·max(1,D)
    // is ~450 ε at the table scale, five orders below the tightest
    // noise-free band of criteria 1–2.
    for n in [5, 9] {
        for &d in &MODULI {
            let errors = noise_free_errors(n, d);
            let floor = 1e-13 * d.max(1.0);
            println!(
                "criterion 8 data: N={n} D={d}: {:.3e} / {:.3e} / {:.3e} (floor {floor:.1e})",
                errors[0], errors[1], errors[2]
            );
            for step in 0..2 {
                assert!(
                    errors[step + 1] <= errors[step].max(floor),
                    "N={n}, D={d}: errors {errors:?} increase beyond the precision floor"
                );
            }
        }
    }
    println!(
        "criterion 8: PASS — noise-free |D_inv − D| non-increasing over (81,91) → (81,501) → (81,1001) up to the 1e-13·max(1,D) precision floor"
    );
}

#[test]
fn criterion_9_determinism() {
    let base = ExperimentConfig {
        seeds: vec![1, 2],
        out_dir: std::env::temp_dir().join("ebm-acceptance-det-a"),
        ..ExperimentConfig::default()
    };
    let mut second = base.clone();
    second.out_dir = std::env::temp_dir().join("ebm-acceptance-det-b");
    run_experiment(&base).unwrap();
    run_experiment(&second).unwrap();
    for name in ["d_table.csv", "params.csv", "records.jsonl"] {
        let a = std::fs::read(base.out_dir.join(name)).unwrap();
        let b = std::fs::read(second.out_dir.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    println!(
        "criterion 9: PASS — d_table.csv, params.csv, records.jsonl byte-identical across repeated runs"
    );
}
