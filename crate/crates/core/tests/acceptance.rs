//! Acceptance gate: eleven numbered criteria covering lag combinatorics,
//! coarray equivalence, capacity, statistical performance, estimation
//! bounds, resource rows, coupling levels and spectral occupancy.
//!
//! Each test prints one `criterion NN: PASS/FAIL` line (visible under
//! `--nocapture`, or on failure) and asserts its stated tolerance.

use std::collections::HashSet;

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use copulse::altdesigns::{
    coupling_leakage, coupling_matrix, occupancy_rate, CouplingModel, OccupancySpec,
};
use copulse::ccing::{ccing, CcingOptions};
use copulse::crb::{
    crb, crb_exists, crb_nuisance_projector, crb_nuisance_schur, fim,
    fim_via_weight_matrix, manifold_derivatives,
};
use copulse::geometry::{
    difference_profile, generate_index_set, lag_counts, SchemeSpec,
};
use copulse::linalg::C64;
use copulse::metrics::{hit_rate, random_scene, SceneBox, Tolerances};
use copulse::montecarlo::{
    realize_tag, run_montecarlo, CovarianceMode, Experiment, MetricsRow, SceneSource,
};
use copulse::scene::{min_resources, DesignTag, RadarConfig, Target, TargetScene};
use copulse::signal::{
    analytic_covariance, extract_coarray, sample_covariance, synthesize, CoarrayVectors,
};

// ---------------------------------------------------------------------------
// Shared fixtures
// ---------------------------------------------------------------------------

/// Carrier at 1 GHz, 20 kHz offset step, half-wavelength spacing, 50 us
/// fundamental interval, 0.5 us pulses, 100 samples per pulse.
fn reference_config(spatial: SchemeSpec, fo: Option<SchemeSpec>, pri: SchemeSpec) -> RadarConfig {
    RadarConfig {
        f_b: 1.0e9,
        delta_f: 20.0e3,
        d: 0.15,
        t: 5.0e-5,
        t_p: 5.0e-7,
        l_r: 100,
        sigma_n2: 1.0e-3,
        spatial,
        fo,
        pri,
    }
}

fn coprime(m: u32, n: u32) -> SchemeSpec {
    SchemeSpec::coprime(m, n).expect("valid co-prime pair")
}

/// Every axis on the (2,3) co-prime pattern.
fn ccube_config() -> RadarConfig {
    reference_config(coprime(2, 3), Some(coprime(2, 3)), coprime(2, 3))
}

fn tag(s: &str) -> DesignTag {
    s.parse().expect("valid design tag")
}

fn target(theta: f64, phi: f64, r: f64, v: f64) -> Target {
    Target { theta, phi, r, v, sigma2: 1.0 }
}

/// The fixed two-target scene used for the statistical sweeps.
fn two_target_scene() -> TargetScene {
    TargetScene::new(vec![
        target(10f64.to_radians(), 5f64.to_radians(), 1000.0, 100.0),
        target(45f64.to_radians(), 45f64.to_radians(), 3000.0, 250.0),
    ])
}

/// Largest error over targets and parameters, each normalized by the true
/// magnitude (floored at one unit so near-zero angles stay comparable).
fn max_normalized_error(est: &[copulse::ccing::TargetEstimate], truth: &TargetScene) -> f64 {
    let mut sorted_est: Vec<_> = est.to_vec();
    sorted_est.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let mut sorted_truth = truth.targets.clone();
    sorted_truth.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let mut worst = 0.0f64;
    for (e, t) in sorted_est.iter().zip(&sorted_truth) {
        for (have, want) in [(e.theta, t.theta), (e.phi, t.phi), (e.r, t.r), (e.v, t.v)] {
            let rel = (have - want).abs() / want.abs().max(1.0);
            worst = worst.max(rel);
        }
    }
    worst
}

fn frobenius(v: &Array1<C64>) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn rel_frobenius(a: &Array1<C64>, b: &Array1<C64>) -> f64 {
    let diff: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    diff / frobenius(b)
}

// ---------------------------------------------------------------------------
// 1. Lag triple counts
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_lag_triple_counts() {
    let spatial = generate_index_set(&coprime(3, 7)).expect("spatial set");
    let fo = generate_index_set(&coprime(3, 7)).expect("offset set");
    let pri = generate_index_set(&coprime(2, 3)).expect("pulse set");
    let (physical, coarray) = lag_counts(&spatial, &fo, &pri);
    assert_eq!(
        (physical, coarray),
        (864, 8100),
        "criterion 1: FAIL - lag triple counts off"
    );
    println!("criterion 1: PASS - lag triples ({physical}, {coarray})");
}

// ---------------------------------------------------------------------------
// 2. Contiguous halfwidth identity
// ---------------------------------------------------------------------------

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn criterion_02_contiguous_halfwidth_identity() {
    let mut checked = 0u32;
    for m in 1..15u32 {
        for n in (m + 1)..=15 {
            if gcd(m, n) != 1 {
                continue;
            }
            // Oracle pattern built from its definition: strides m and n.
            let mut values: Vec<u32> = (0..n).map(|i| m * i).collect();
            values.extend((1..2 * m).map(|j| n * j));
            values.sort_unstable();
            values.dedup();
            let diffs: HashSet<i64> = values
                .iter()
                .flat_map(|&a| values.iter().map(move |&b| i64::from(a) - i64::from(b)))
                .collect();
            let mut halfwidth = 0i64;
            while diffs.contains(&(halfwidth + 1)) {
                halfwidth += 1;
            }
            let expected = i64::from(m * n + m - 1);
            assert_eq!(
                halfwidth, expected,
                "criterion 2: FAIL - brute-force halfwidth for ({m},{n})"
            );
            let set = generate_index_set(&coprime(m, n)).expect("generated set");
            assert_eq!(set.values(), &values[..], "generated ({m},{n}) pattern");
            assert_eq!(
                i64::from(difference_profile(&set).contiguous_halfwidth),
                expected,
                "profile halfwidth for ({m},{n})"
            );
            checked += 1;
        }
    }
    println!("criterion 2: PASS - halfwidth identity on {checked} co-prime pairs");
}

// ---------------------------------------------------------------------------
// 3. Coarray extraction equals the virtual-manifold oracle
// ---------------------------------------------------------------------------

/// Independent difference-domain model: each virtual slot is the sum of
/// target powers rotated by the per-axis phase units times the lag values.
fn coarray_oracle(config: &RadarConfig, scene: &TargetScene, co: &CoarrayVectors) -> (Array1<C64>, Array1<C64>) {
    let c0 = 3.0e8;
    let lambda = c0 / config.f_b;
    let su = 2.0 * std::f64::consts::PI * config.d / lambda;
    let du = 4.0 * std::f64::consts::PI * config.t / lambda;
    let ru = 4.0 * std::f64::consts::PI * config.delta_f / c0;
    let cis = |p: f64| C64::new(p.cos(), p.sin());

    let mut rx = Array1::zeros(co.layout.len());
    let mut rz = Array1::zeros(co.layout.len());
    for (fi, &lf) in co.layout.fo.lags().iter().enumerate() {
        for (ti, &lt) in co.layout.time.lags().iter().enumerate() {
            for (si, &ls) in co.layout.spatial.lags().iter().enumerate() {
                let slot = co.layout.flat_index(fi, ti, si);
                for t in &scene.targets {
                    let ux = t.theta.sin() * t.phi.sin();
                    let uz = t.theta.sin() * t.phi.cos();
                    let shared = ru * lf as f64 * t.r + du * lt as f64 * t.v;
                    rx[slot] += cis(shared + su * ls as f64 * ux) * t.sigma2;
                    rz[slot] += cis(shared + su * ls as f64 * uz) * t.sigma2;
                }
            }
        }
    }
    (rx, rz)
}

#[test]
fn criterion_03_coarray_extraction_matches_manifold_oracle() {
    let coprime_small: [(u32, u32); 8] =
        [(1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (2, 3), (2, 5)];
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let draw_axis = |rng: &mut ChaCha8Rng| -> SchemeSpec {
        use rand::Rng;
        if rng.random_range(0..2) == 0 {
            SchemeSpec::Uniform { count: rng.random_range(2..=8) }
        } else {
            let (m, n) = coprime_small[rng.random_range(0..coprime_small.len())];
            coprime(m, n)
        }
    };

    let mut worst = 0.0f64;
    for inst in 0..24 {
        use rand::Rng;
        let spatial = draw_axis(&mut rng);
        let pri = draw_axis(&mut rng);
        // Each sensor owns one offset, so the offset axis must carry exactly
        // as many elements as the spatial axis.
        let sensors = generate_index_set(&spatial).expect("spatial set").len() as u32;
        let fo = match rng.random_range(0..4) {
            0 => None,
            1 => Some(SchemeSpec::Uniform { count: sensors }),
            _ => {
                let matching: Vec<SchemeSpec> = coprime_small
                    .iter()
                    .map(|&(m, n)| coprime(m, n))
                    .filter(|s| {
                        generate_index_set(s).is_ok_and(|set| set.len() as u32 == sensors)
                    })
                    .collect();
                if matching.is_empty() {
                    Some(SchemeSpec::Uniform { count: sensors })
                } else {
                    Some(matching[rng.random_range(0..matching.len())].clone())
                }
            }
        };
        let config = RadarConfig {
            sigma_n2: rng.random_range(0.1..2.0),
            spatial,
            fo,
            pri,
            ..reference_config(coprime(1, 2), None, coprime(1, 2))
        };
        let q = rng.random_range(1..=4);
        let sep = Tolerances::resolution_bins(&config).expect("bins");
        let scene = random_scene(&SceneBox::default(), q, &sep, &mut rng).expect("scene");

        let (r_x, r_z) = analytic_covariance(&config, &scene).expect("covariance");
        let co = extract_coarray(&r_x, &r_z, &config, config.sigma_n2).expect("extraction");
        let (ox, oz) = coarray_oracle(&config, &scene, &co);
        let err = rel_frobenius(&co.rx, &ox).max(rel_frobenius(&co.rz, &oz));
        assert!(
            err < 1e-10,
            "criterion 3: FAIL - instance {inst} disagrees with the oracle at {err:.3e}"
        );
        worst = worst.max(err);
    }
    println!("criterion 3: PASS - 24 instances, worst relative error {worst:.3e}");
}

// ---------------------------------------------------------------------------
// 4. Noiseless capacity
// ---------------------------------------------------------------------------

/// Noiseless round trip: ensemble covariance, extraction, estimation.
fn noiseless_estimate(
    config: &RadarConfig,
    scene: &TargetScene,
) -> copulse::Result<Vec<copulse::ccing::TargetEstimate>> {
    let (r_x, r_z) = analytic_covariance(config, scene)?;
    let co = extract_coarray(&r_x, &r_z, config, config.sigma_n2)?;
    Ok(ccing(&co, config, scene.len(), &CcingOptions::default())?.targets)
}

#[test]
fn criterion_04_capacity_noiseless_recovery() {
    let ccube = ccube_config();
    let bins = Tolerances::resolution_bins(&ccube).expect("bins");
    let bx = SceneBox::default();
    let mut rng = ChaCha8Rng::seed_from_u64(44);

    let mut worst = 0.0f64;
    for s in 0..50 {
        let scene = random_scene(&bx, 7, &bins, &mut rng).expect("scene");
        let est = noiseless_estimate(&ccube, &scene)
            .unwrap_or_else(|e| panic!("criterion 4: FAIL - scene {s} errored: {e}"));
        let err = max_normalized_error(&est, &scene);
        assert!(
            err < 1e-6,
            "criterion 4: FAIL - seven-target scene {s} recovered at {err:.3e}"
        );
        worst = worst.max(err);
    }

    let ucube = realize_tag(&ccube, tag("UUU")).expect("uniform variant");
    let ubins = Tolerances::resolution_bins(&ucube).expect("bins");
    for s in 0..10 {
        let scene = random_scene(&bx, 3, &ubins, &mut rng).expect("scene");
        let est = noiseless_estimate(&ucube, &scene)
            .unwrap_or_else(|e| panic!("criterion 4: FAIL - uniform three-target scene {s} errored: {e}"));
        let err = max_normalized_error(&est, &scene);
        assert!(
            err < 1e-6,
            "criterion 4: FAIL - uniform three-target scene {s} recovered at {err:.3e}"
        );
    }
    for s in 0..10 {
        let scene = random_scene(&bx, 7, &ubins, &mut rng).expect("scene");
        let overloaded = match noiseless_estimate(&ucube, &scene) {
            Err(_) => true,
            Ok(est) => max_normalized_error(&est, &scene) > 1e-3,
        };
        assert!(
            overloaded,
            "criterion 4: FAIL - uniform design should not recover seven targets (scene {s})"
        );
    }
    println!(
        "criterion 4: PASS - 50/50 seven-target recoveries (worst {worst:.3e}), \
         uniform design holds three and degrades at seven"
    );
}

// ---------------------------------------------------------------------------
// 5. Hit-rate gap
// ---------------------------------------------------------------------------

/// One sampled trial scored against the common bins; failures score zero.
fn trial_hits(cfg: &RadarConfig, scene: &TargetScene, seed: u64, tol: &Tolerances) -> f64 {
    let Ok(snaps) = synthesize(cfg, scene, seed, Some(10.0)) else { return 0.0 };
    let (rx, rz) = sample_covariance(&snaps);
    let Ok(co) = extract_coarray(&rx, &rz, cfg, snaps.sigma_n2) else { return 0.0 };
    let Ok(est) = ccing(&co, cfg, scene.len(), &CcingOptions::noisy()) else { return 0.0 };
    hit_rate(&est.targets, scene, tol).unwrap_or(0.0)
}

#[test]
fn criterion_05_hit_rate_gap_low_elevation() {
    // Low-elevation targets compress both direction cosines, which is where
    // the larger virtual aperture pays off at moderate noise.
    let scene = TargetScene::new(vec![
        target(0.14, 0.9, 1000.0, 100.0),
        target(0.23, -0.5, 3000.0, 250.0),
        target(0.35, 0.2, 4200.0, 330.0),
    ]);
    let ccube = ccube_config();
    let ucube = realize_tag(&ccube, tag("UUU")).expect("uniform variant");
    let tol = Tolerances::resolution_bins(&ccube).expect("bins");

    let trials = 150u64;
    let q = scene.len() as f64;
    let mut hits_c = 0.0;
    let mut hits_u = 0.0;
    for t in 0..trials {
        hits_c += trial_hits(&ccube, &scene, 910_000 + t, &tol) * q;
        hits_u += trial_hits(&ucube, &scene, 920_000 + t, &tol) * q;
    }
    let n = trials as f64 * q;
    let rate_c = hits_c / n;
    let rate_u = hits_u / n;
    let gap = rate_c - rate_u;

    // One-sided two-proportion z-test on per-target hits.
    let pooled = (hits_c + hits_u) / (2.0 * n);
    let z = gap / (pooled * (1.0 - pooled) * 2.0 / n).sqrt();
    let p = 1.0 - Normal::new(0.0, 1.0).unwrap().cdf(z);

    assert!(
        gap >= 0.10,
        "criterion 5: FAIL - hit rates {rate_c:.3} vs {rate_u:.3}, gap {:.1}pp",
        gap * 100.0
    );
    assert!(p < 0.01, "criterion 5: FAIL - gap not significant, p = {p:.2e}");
    println!(
        "criterion 5: PASS - hit rate {rate_c:.3} vs {rate_u:.3}, gap {:.1}pp, p = {p:.2e}",
        gap * 100.0
    );
}

// ---------------------------------------------------------------------------
// 6. Error trends against noise and the bound
// ---------------------------------------------------------------------------

fn rows_for<'a>(rows: &'a [MetricsRow], tag: &str) -> Vec<&'a MetricsRow> {
    let mut out: Vec<&MetricsRow> = rows.iter().filter(|r| r.tag == tag).collect();
    out.sort_by(|a, b| a.snr_db.unwrap().total_cmp(&b.snr_db.unwrap()));
    out
}

#[test]
fn criterion_06_rmse_trends_and_bounds() {
    let spec = Experiment {
        config: ccube_config(),
        scene: SceneSource::Fixed { scene: two_target_scene() },
        power_sd: None,
        tags: vec![tag("CCC"), tag("UUU")],
        snr_grid_db: (0..11).map(|i| -15.0 + 3.0 * f64::from(i)).collect(),
        trials: 200,
        master_seed: 2026,
        mode: CovarianceMode::Sampled,
        tolerances: None,
    };
    let report = run_montecarlo(&spec).expect("sweep");
    assert!(report.skipped.is_empty(), "no row should be skipped");

    let params: [(&str, fn(&MetricsRow) -> f64); 4] = [
        ("elevation", |r| r.rmse_theta),
        ("azimuth", |r| r.rmse_phi),
        ("range", |r| r.rmse_r),
        ("velocity", |r| r.rmse_v),
    ];

    // (a) Non-increasing curves, allowing one rise above 10% per curve.
    for design in ["CCC", "UUU"] {
        let rows = rows_for(&report.rows, design);
        assert_eq!(rows.len(), 11, "one row per level for {design}");
        for (name, get) in params {
            let curve: Vec<f64> = rows.iter().map(|r| get(r)).collect();
            assert!(
                curve.iter().all(|v| v.is_finite()),
                "criterion 6: FAIL - {design} {name} has unusable levels: {curve:?}"
            );
            let inversions = curve
                .windows(2)
                .filter(|w| w[1] > w[0] * 1.10)
                .count();
            assert!(
                inversions <= 1,
                "criterion 6: FAIL - {design} {name} rises {inversions} times: {curve:?}"
            );
        }
    }

    // (b) The co-prime rows dominate the uniform rows from 0 dB up.
    let ccc = rows_for(&report.rows, "CCC");
    let uuu = rows_for(&report.rows, "UUU");
    for (c, u) in ccc.iter().zip(&uuu) {
        let snr = c.snr_db.unwrap();
        if snr < 0.0 {
            continue;
        }
        for (name, get) in params {
            assert!(
                get(c) <= get(u),
                "criterion 6: FAIL - at {snr} dB {name} co-prime {:.3e} above uniform {:.3e}",
                get(c),
                get(u)
            );
        }
    }

    // (c) The averaged root bound sits below the best error at 9 dB and up.
    let bounds: [(&str, fn(&MetricsRow) -> f64, fn(&MetricsRow) -> f64); 4] = [
        ("elevation", |r| r.rcrb_theta, |r| r.rmse_theta),
        ("azimuth", |r| r.rcrb_phi, |r| r.rmse_phi),
        ("range", |r| r.rcrb_r, |r| r.rmse_r),
        ("velocity", |r| r.rcrb_v, |r| r.rmse_v),
    ];
    for (c, u) in ccc.iter().zip(&uuu) {
        let snr = c.snr_db.unwrap();
        if snr < 9.0 {
            continue;
        }
        for (name, bound, err) in bounds {
            let best = err(c).min(err(u));
            assert!(
                bound(c) <= best,
                "criterion 6: FAIL - at {snr} dB the {name} bound {:.3e} exceeds the best error {best:.3e}",
                bound(c)
            );
        }
    }
    println!("criterion 6: PASS - curves fall with SNR, co-prime dominates, bound holds");
}

// ---------------------------------------------------------------------------
// 7. Bound correctness
// ---------------------------------------------------------------------------

fn rel_matrix_err(a: &ndarray::Array2<f64>, b: &ndarray::Array2<f64>) -> f64 {
    let num: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    num / den
}

#[test]
fn criterion_07_bound_derivative_and_form_checks() {
    // (a) Analytic manifold derivatives against central differences,
    // checked per parameter family.
    let config = reference_config(coprime(1, 2), Some(coprime(1, 2)), coprime(1, 2));
    let scene = TargetScene::new(vec![
        target(30f64.to_radians(), 20f64.to_radians(), 1000.0, 100.0),
        target(55f64.to_radians(), -35f64.to_radians(), 2600.0, 220.0),
    ]);
    let md = manifold_derivatives(&config, &scene).expect("derivatives");
    let q = scene.len();
    let steps = [1e-6, 1e-6, 1e-3, 1e-4];
    for kind in 0..4 {
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for qi in 0..q {
            let h = steps[kind];
            let mut plus = scene.clone();
            let mut minus = scene.clone();
            let bump = |t: &mut Target, delta: f64| match kind {
                0 => t.theta += delta,
                1 => t.phi += delta,
                2 => t.r += delta,
                _ => t.v += delta,
            };
            bump(&mut plus.targets[qi], h);
            bump(&mut minus.targets[qi], -h);
            let sp = manifold_derivatives(&config, &plus).expect("plus").stacked;
            let sm = manifold_derivatives(&config, &minus).expect("minus").stacked;
            let analytic = md.derivs.column(kind * q + qi);
            for row in 0..sp.nrows() {
                let fd = (sp[(row, qi)] - sm[(row, qi)]) / C64::new(2.0 * h, 0.0);
                num += (fd - analytic[row]).norm_sqr();
                den += analytic[row].norm_sqr();
            }
        }
        let rel = (num / den).sqrt();
        assert!(
            rel < 1e-4,
            "criterion 7: FAIL - family {kind} differs from finite differences at {rel:.3e}"
        );
    }

    // (b) Doubling the snapshot count halves every variance bound.
    let cfg100 = ccube_config();
    let cfg200 = RadarConfig { l_r: 200, ..cfg100.clone() };
    let scene2 = two_target_scene();
    let b100 = crb(&cfg100, &scene2, 0.5).expect("bound");
    let b200 = crb(&cfg200, &scene2, 0.5).expect("bound");
    for (v100, v200) in [
        (&b100.theta_var, &b200.theta_var),
        (&b100.phi_var, &b200.phi_var),
        (&b100.r_var, &b200.r_var),
        (&b100.v_var, &b200.v_var),
    ] {
        for (a, b) in v100.iter().zip(v200) {
            let rel = (a / b - 2.0).abs() / 2.0;
            assert!(
                rel < 1e-12,
                "criterion 7: FAIL - snapshot doubling ratio {} off by {rel:.3e}",
                a / b
            );
        }
    }

    // (c) Miniature instance: the explicit weighted form against the trace
    // form, and the projector bound against the Schur-block bound.
    let micro = RadarConfig {
        l_r: 50,
        sigma_n2: 0.4,
        spatial: SchemeSpec::Uniform { count: 2 },
        fo: Some(SchemeSpec::Uniform { count: 2 }),
        pri: SchemeSpec::Uniform { count: 2 },
        ..reference_config(coprime(1, 2), None, coprime(1, 2))
    };
    let micro_scene = TargetScene::new(vec![target(
        40f64.to_radians(),
        25f64.to_radians(),
        2200.0,
        160.0,
    )]);
    let j_trace = fim(&micro, &micro_scene, 0.4).expect("information matrix");
    let j_weight = fim_via_weight_matrix(&micro, &micro_scene, 0.4).expect("weighted form");
    let fim_err = rel_matrix_err(&j_weight, &j_trace);
    assert!(
        fim_err < 1e-10,
        "criterion 7: FAIL - information forms disagree at {fim_err:.3e}"
    );
    let schur = crb_nuisance_schur(&micro, &micro_scene, 0.4).expect("Schur bound");
    let proj = crb_nuisance_projector(&micro, &micro_scene, 0.4).expect("projector bound");
    let bound_err = rel_matrix_err(&proj, &schur);
    assert!(
        bound_err < 1e-8,
        "criterion 7: FAIL - marginalized bounds disagree at {bound_err:.3e}"
    );
    println!(
        "criterion 7: PASS - derivatives, snapshot scaling, information and bound forms agree"
    );
}

// ---------------------------------------------------------------------------
// 8. Identifiability rank
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_identifiability_rank() {
    let config = ccube_config();
    let dup = TargetScene::new(vec![
        target(30f64.to_radians(), 20f64.to_radians(), 1500.0, 120.0),
        target(30f64.to_radians(), 20f64.to_radians(), 1500.0, 120.0),
    ]);
    let coincident = crb_exists(&config, &dup).expect("report");
    assert!(
        !coincident.exists,
        "criterion 8: FAIL - coinciding targets must not be identifiable"
    );

    let generic = crb_exists(&config, &two_target_scene()).expect("report");
    assert!(
        generic.exists && generic.rank == generic.required && generic.rank == 8,
        "criterion 8: FAIL - generic scene rank {} of {}",
        generic.rank,
        generic.required
    );
    println!("criterion 8: PASS - coinciding scene rejected, generic scene at full rank 8");
}

// ---------------------------------------------------------------------------
// 9. Minimum resource rows
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_minimum_resource_rows() {
    for row in DesignTag::all() {
        let name = row.to_string();
        let mut chars = name.chars();
        let spatial = chars.next().expect("spatial letter");
        let fo = chars.next().expect("offset letter");
        let pri = chars.next().expect("pulse letter");
        // Difference-domain bounds apply to co-prime sensors unless uniform
        // offsets pin the spatial axis, and to co-prime pulses always.
        let sensors_coarray = spatial == 'C' && fo != 'U';
        let pulses_coarray = pri == 'C';
        for q in 1..=50u32 {
            let count_bound = q + 1;
            let coarray_bound = (2.0 * f64::from(q + 1).sqrt() - 2.0).floor() as u32 + 1;
            let want = (
                if sensors_coarray { coarray_bound } else { count_bound },
                if pulses_coarray { coarray_bound } else { count_bound },
            );
            let got = min_resources(row, q).expect("resource row");
            assert_eq!(
                got, want,
                "criterion 9: FAIL - row {name} at {q} targets"
            );
        }
    }
    println!("criterion 9: PASS - all 12 resource rows match for 1..=50 targets");
}

// ---------------------------------------------------------------------------
// 10. Coupling leakage levels
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_coupling_leakage_table() {
    // Common-aperture layouts, one per design row of the comparison.
    let designs: [(&str, SchemeSpec); 8] = [
        ("uniform", SchemeSpec::Uniform { count: 36 }),
        ("cadis", SchemeSpec::Cadis { m: 3, n: 5, l: 3 }),
        ("nested", SchemeSpec::Nested { n1: 5, n2: 5 }),
        ("super-nested", SchemeSpec::SuperNested { n1: 5, n2: 5 }),
        ("cna", SchemeSpec::Cna { n1: 3, n2: 3 }),
        ("gna", SchemeSpec::Gna { n1: 5, n2: 5, alpha: 2, beta: 3 }),
        ("multi-coset", SchemeSpec::MultiCoset { pattern: vec![0, 1, 2, 5], block: 7, periods: 5 }),
        ("coprime", coprime(3, 7)),
    ];
    let model = CouplingModel::standard();
    let leakage_of = |spec: &SchemeSpec| -> f64 {
        let set = generate_index_set(spec).expect("layout");
        coupling_leakage(&coupling_matrix(&set, &model).expect("coupling matrix"))
    };
    let measured: Vec<(&str, f64)> =
        designs.iter().map(|(name, spec)| (*name, leakage_of(spec))).collect();
    let value = |name: &str| measured.iter().find(|(n, _)| *n == name).unwrap().1;

    let mut failures = Vec::new();
    // Expected ascending order of the eight designs.
    let expected_order = [
        "cadis", "coprime", "super-nested", "cna", "gna", "multi-coset", "nested", "uniform",
    ];
    for pair in expected_order.windows(2) {
        let (lo, hi) = (value(pair[0]), value(pair[1]));
        if lo >= hi {
            failures.push(format!("{} ({lo:.4}) should sit below {} ({hi:.4})", pair[0], pair[1]));
        }
    }
    let uniform = value("uniform");
    if (uniform - 0.76).abs() > 0.05 {
        failures.push(format!("uniform leakage {uniform:.4} outside 0.76 +/- 0.05"));
    }
    let cp = value("coprime");
    if (cp - 0.5340).abs() > 0.05 {
        failures.push(format!("coprime leakage {cp:.4} outside 0.5340 +/- 0.05"));
    }

    if failures.is_empty() {
        println!("criterion 10: PASS - coupling ordering and levels match");
    } else {
        let table: Vec<String> =
            measured.iter().map(|(n, v)| format!("{n} {v:.4}")).collect();
        println!(
            "criterion 10: FAIL - measured [{}]; {}",
            table.join(", "),
            failures.join("; ")
        );
        panic!(
            "criterion 10: FAIL - the stated coupling model does not reproduce the \
             expected levels: {}",
            failures.join("; ")
        );
    }
}

// ---------------------------------------------------------------------------
// 11. Offset occupancy dominance
// ---------------------------------------------------------------------------

#[test]
fn criterion_11_offset_occupancy_dominance() {
    let b = 0.1;
    let delta_f = 1.0;
    for l_f in 6..=40u32 {
        let cp = occupancy_rate(&OccupancySpec::CoprimeFo { b, delta_f, l_f }).expect("co-prime");
        let others = [
            occupancy_rate(&OccupancySpec::Logarithmic { b, delta_f }).expect("logarithmic"),
            occupancy_rate(&OccupancySpec::Cnfo { b, delta_f, l_f }).expect("nested"),
            occupancy_rate(&OccupancySpec::Gnfo { b, delta_f, l_f, alpha: 2, beta: 3 })
                .expect("generalized nested"),
        ];
        for (i, other) in others.iter().enumerate() {
            assert!(
                cp <= other + 1e-15,
                "criterion 11: FAIL - at {l_f} offsets co-prime {cp:.4} above scheme {i} ({other:.4})"
            );
        }
    }
    println!("criterion 11: PASS - co-prime occupancy dominates on 6..=40 offsets");
}
