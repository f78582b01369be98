//! Acceptance suite: one test per quantitative criterion, each printing a
//! PASS line with the measured numbers (run with `--nocapture` to see them).
//! Criterion 10 (byte-identical reruns through the CLI) lives in the CLI
//! crate's integration tests.

// negated comparisons keep NaN eigenvalues from slipping through inequality checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::time::Instant;
use traplab::eigen::{self, DEFAULT_TOL};
use traplab::geometry::{BoxRegion, SiteBox};
use traplab::hamiltonian::{assemble, assemble_region, cutoff_transfer, BoundaryCondition};
use traplab::ids::{
    asymptotic_inverse, estimate_ids, fit_lifshitz, ids_1d_hard_exact, ids_1d_hard_finite_r_bias,
    log_lambda_grid, IdsEstimate, RateFunction,
};
use traplab::random_media::{FieldSampler, ModelSpec, PotentialField, TrapProfile};
use traplab::rng::{SeedPath, StreamTag};
use traplab::survival::{
    best_subbox_scan, eigenvalue_tail_probability, exact_survival_dirichlet, mc_survival,
    quenched_curve, scaling_check, spectral_upper_bound, sup_potential_scan, Budget, PointStatus,
    SurvivalCurve, WallPolicy,
};

use std::f64::consts::PI;

fn principal(h: &traplab::hamiltonian::OperatorHandle) -> f64 {
    eigen::principal_eigenpair(h, DEFAULT_TOL, eigen::default_max_iter(h.dim()))
        .unwrap()
        .value
}

fn dirichlet_axis(n: usize, kappa: f64, k: usize) -> f64 {
    2.0 * kappa * (1.0 - (k as f64 * PI / (n as f64 + 1.0)).cos())
}

fn neumann_axis(n: usize, kappa: f64, k: usize) -> f64 {
    2.0 * kappa * (1.0 - (k as f64 * PI / n as f64).cos())
}

#[test]
fn criterion_01_closed_form_free_spectra() {
    let start = Instant::now();
    let kappa = 0.5;
    let mut worst = 0.0f64;

    // 1D path, both boundary conditions
    let region = BoxRegion::lattice(1, 12).unwrap();
    let field = PotentialField::zero(region);
    let sub = SiteBox::new(1, [-6, 0, 0], [6, 0, 0]).unwrap(); // 12 sites
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        let h = assemble_region(&field, &sub, bc, kappa).unwrap();
        let values = eigen::lowest_eigenvalues(&h, 12, 1e-12, 10_000).unwrap();
        for (k, v) in values.iter().enumerate() {
            let expect = match bc {
                BoundaryCondition::Dirichlet => dirichlet_axis(12, kappa, k + 1),
                BoundaryCondition::Neumann => neumann_axis(12, kappa, k),
            };
            worst = worst.max((v - expect).abs());
        }
    }

    // 2D rectangle 5 x 7, both boundary conditions
    let region2 = BoxRegion::lattice(2, 8).unwrap();
    let field2 = PotentialField::zero(region2);
    let rect = SiteBox::new(2, [-2, -3, 0], [3, 4, 0]).unwrap(); // 5 x 7
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        let h = assemble_region(&field2, &rect, bc, kappa).unwrap();
        let values = eigen::lowest_eigenvalues(&h, 35, 1e-12, 10_000).unwrap();
        let mut expect: Vec<f64> = Vec::new();
        for j in 0..5 {
            for k in 0..7 {
                expect.push(match bc {
                    BoundaryCondition::Dirichlet => {
                        dirichlet_axis(5, kappa, j + 1) + dirichlet_axis(7, kappa, k + 1)
                    }
                    BoundaryCondition::Neumann => {
                        neumann_axis(5, kappa, j) + neumann_axis(7, kappa, k)
                    }
                });
            }
        }
        expect.sort_by(f64::total_cmp);
        for (v, e) in values.iter().zip(&expect) {
            worst = worst.max((v - e).abs());
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(worst <= 1e-10, "worst deviation {worst:e}");
    assert!(elapsed < 1.0, "took {elapsed:.3} s, budget 1 s");
    println!(
        "acceptance criterion 1 (closed-form spectra d=1,2): PASS (worst abs error {worst:.2e}, {elapsed:.3} s)"
    );
}

fn criterion_02_models() -> Vec<(&'static str, usize, ModelSpec)> {
    let hard_spike = TrapProfile::spike(f64::INFINITY).unwrap();
    let soft_spike = TrapProfile::spike(1.2).unwrap();
    let ball = TrapProfile::ball(1.0, 2.0).unwrap();
    let small_ball = TrapProfile::ball(0.5, 1.0).unwrap();
    vec![
        ("bernoulli-1d", 1, ModelSpec::bernoulli(0.3, hard_spike, 0.5).unwrap()),
        ("bernoulli-2d", 2, ModelSpec::bernoulli(0.3, soft_spike, 0.5).unwrap()),
        ("iid-tail-1d", 1, ModelSpec::iid_tail(1.0, 0.5).unwrap()),
        ("iid-tail-2d", 2, ModelSpec::iid_tail(0.7, 0.5).unwrap()),
        ("poisson-1d", 1, ModelSpec::poisson(0.3, ball, 0.5).unwrap()),
        ("poisson-2d", 2, ModelSpec::poisson(0.2, ball, 0.5).unwrap()),
        ("perturbed-1d", 1, ModelSpec::perturbed_lattice(1.5, small_ball, 0.5).unwrap()),
        ("perturbed-2d", 2, ModelSpec::perturbed_lattice(2.0, small_ball, 0.5).unwrap()),
    ]
}

#[test]
fn criterion_02_bracketing_property_suite() {
    let start = Instant::now();
    let per_config = 26usize; // 8 configurations x 26 = 208 realizations
    let mut realizations = 0usize;
    let mut violations = 0usize;

    for (name, d, spec) in criterion_02_models() {
        let half = if d == 1 { 12 } else { 5 };
        let region = BoxRegion::lattice(d, half).unwrap();
        let inner = SiteBox::centered(d, [0, 0, 0], half / 2).unwrap();
        let sampler = FieldSampler::new(spec, d).unwrap();
        for i in 0..per_config as u64 {
            let seed = SeedPath::new(0xACC2, i, StreamTag::Field);
            let field = sampler.sample(&region, &seed).unwrap();
            if field.active_count() == 0 {
                realizations += 1;
                continue;
            }
            let tol = 2e-9 * {
                let h = assemble(&field, BoundaryCondition::Dirichlet, spec.kappa).unwrap();
                h.gershgorin_upper().max(1.0)
            };

            let hd = assemble(&field, BoundaryCondition::Dirichlet, spec.kappa).unwrap();
            let hn = assemble(&field, BoundaryCondition::Neumann, spec.kappa).unwrap();
            let (ld, ln) = (principal(&hd), principal(&hn));
            if !(ln <= ld + tol) {
                eprintln!("{name} {i}: Neumann {ln} above Dirichlet {ld}");
                violations += 1;
            }

            // potential monotonicity: a constant shift and a pointwise max
            let shifted = field.plus_constant(0.35).unwrap();
            let other = sampler
                .sample(&region, &SeedPath::new(0xACC3, i, StreamTag::Field))
                .unwrap();
            let maxed = field.pointwise_max(&other).unwrap();
            for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
                let base = principal(&assemble(&field, bc, spec.kappa).unwrap());
                let up = principal(&assemble(&shifted, bc, spec.kappa).unwrap());
                if !(base <= up + tol) {
                    eprintln!("{name} {i}: shift monotonicity failed under {bc:?}");
                    violations += 1;
                }
                if maxed.active_count() > 0 {
                    let up2 = principal(&assemble(&maxed, bc, spec.kappa).unwrap());
                    if !(base <= up2 + tol) {
                        eprintln!("{name} {i}: max monotonicity failed under {bc:?}");
                        violations += 1;
                    }
                }
            }

            // Dirichlet domain monotonicity: smaller box, larger eigenvalue
            match assemble_region(&field, &inner, BoundaryCondition::Dirichlet, spec.kappa) {
                Ok(hi) => {
                    if !(principal(&hi) + tol >= ld) {
                        eprintln!("{name} {i}: domain monotonicity failed");
                        violations += 1;
                    }
                }
                Err(traplab::Error::FullyTrapped) => {}
                Err(e) => panic!("{name} {i}: {e}"),
            }
            realizations += 1;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(realizations >= 200, "only {realizations} realizations");
    assert_eq!(violations, 0, "{violations} violations");
    assert!(elapsed < 120.0, "took {elapsed:.1} s, budget 2 min");
    println!(
        "acceptance criterion 2 (bracketing/monotonicity, {realizations} realizations, all 4 models): PASS (0 violations, {elapsed:.1} s)"
    );
}

#[test]
fn criterion_03_survival_oracle_equivalence() {
    let start = Instant::now();
    let soft = TrapProfile::spike(1.0).unwrap();
    let hard = TrapProfile::spike(f64::INFINITY).unwrap();
    let ball = TrapProfile::ball(1.0, 1.5).unwrap();

    // 10 one-dimensional and 10 two-dimensional fields, all under 400 sites
    let mut configs: Vec<(usize, i64, ModelSpec)> = Vec::new();
    for i in 0..10usize {
        let spec = match i % 3 {
            0 => ModelSpec::bernoulli(0.4, soft, 0.5).unwrap(),
            1 => ModelSpec::bernoulli(0.25, hard, 0.5).unwrap(),
            _ => ModelSpec::iid_tail(1.0, 0.5).unwrap(),
        };
        configs.push((1, 24, spec));
    }
    for i in 0..10usize {
        let spec = match i % 2 {
            0 => ModelSpec::poisson(0.15, ball, 0.5).unwrap(),
            _ => ModelSpec::bernoulli(0.3, soft, 0.5).unwrap(),
        };
        configs.push((2, 6, spec));
    }

    let n_paths = 100_000;
    let mut comparisons = 0usize;
    for (idx, (d, half, spec)) in configs.iter().enumerate() {
        let region = BoxRegion::lattice(*d, *half).unwrap();
        assert!(region.site_count() <= 400);
        let sampler = FieldSampler::new(*spec, *d).unwrap();
        let seed = SeedPath::new(0xACC4, idx as u64, StreamTag::Field);
        let field = sampler.sample(&region, &seed).unwrap();
        let sub = region.site_box();
        for t in [1.0, 2.0, 4.0, 8.0] {
            let exact = exact_survival_dirichlet(&field, spec.kappa, &sub, t, [0, 0, 0]).unwrap();
            let (mc, stderr) = mc_survival(
                &field,
                spec.kappa,
                t,
                [0, 0, 0],
                n_paths,
                &seed,
                WallPolicy::Absorbing,
            )
            .unwrap();
            assert!(
                (mc - exact).abs() <= 3.0 * stderr + 1e-9,
                "field {idx} t {t}: mc {mc} vs exact {exact} (stderr {stderr})"
            );
            comparisons += 1;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(comparisons, 80);
    assert!(elapsed < 300.0, "took {elapsed:.1} s, budget 5 min");
    println!(
        "acceptance criterion 3 (MC vs eigen-expansion, 20 fields x 4 horizons, 1e5 paths): PASS ({elapsed:.1} s)"
    );
}

#[test]
fn criterion_04_constant_potential_exactness() {
    let c = 0.3f64;
    let kappa = 0.5f64;
    let mut worst_exact = 0.0f64;
    let mut worst_mc = 0.0f64;
    for t in [1.0f64, 2.0, 4.0, 8.0] {
        let expect = (-c * t).exp();
        // box wide enough that the exit correction is far below 1e-10
        let half = (8.0 * (2.0 * kappa * t).sqrt()).ceil() as i64 + 16;
        let region = BoxRegion::lattice(1, half).unwrap();
        let field = PotentialField::zero(region).plus_constant(c).unwrap();

        let exact =
            exact_survival_dirichlet(&field, kappa, &region.site_box(), t, [0, 0, 0]).unwrap();
        worst_exact = worst_exact.max((exact - expect).abs());

        let (mc, stderr) = mc_survival(
            &field,
            kappa,
            t,
            [0, 0, 0],
            20_000,
            &SeedPath::new(0xACC5, 0, StreamTag::Field),
            WallPolicy::Strict,
        )
        .unwrap();
        assert!(
            (mc - expect).abs() <= 3.0 * stderr + 1e-10,
            "t {t}: mc {mc} vs {expect} (stderr {stderr})"
        );
        worst_mc = worst_mc.max((mc - expect).abs());

        let upper =
            spectral_upper_bound(&field, kappa, &region.site_box(), t, [0, 0, 0]).unwrap();
        assert!(upper >= expect - 1e-10, "upper bound {upper} below {expect}");
    }
    assert!(worst_exact <= 1e-10, "worst exact deviation {worst_exact:e}");
    println!(
        "acceptance criterion 4 (constant potential e^-ct): PASS (exact dev {worst_exact:.2e}, mc dev {worst_mc:.2e})"
    );
}

#[test]
fn criterion_05_lifshitz_exponent_1d_hard_traps() {
    let start = Instant::now();
    let p = 0.5;
    let kappa = 0.5;

    // fit on the exact series over the pinned window
    let grid = log_lambda_grid(1e-5, 1e-3, 16).unwrap();
    let values: Vec<f64> = grid
        .iter()
        .map(|&l| ids_1d_hard_exact(p, kappa, l, 1e-14).unwrap())
        .collect();
    let ids = IdsEstimate::from_exact(grid, values).unwrap();
    let fit = fit_lifshitz(&ids, (1e-5, 1e-3), false).unwrap();
    assert!(
        (0.45..=0.55).contains(&fit.l_hat),
        "L_hat {} outside [0.45, 0.55]",
        fit.l_hat
    );
    let fit_elapsed = start.elapsed().as_secs_f64();
    assert!(fit_elapsed < 10.0, "fit took {fit_elapsed:.1} s, budget 10 s");

    // cross-check: Monte Carlo counting on the 128-site box
    let hard = TrapProfile::spike(f64::INFINITY).unwrap();
    let spec = ModelSpec::bernoulli(p, hard, kappa).unwrap();
    let region = BoxRegion::lattice(1, 64).unwrap();
    let mc_grid = log_lambda_grid(0.05, 2.0, 4).unwrap();
    let est = estimate_ids(
        &spec,
        BoundaryCondition::Dirichlet,
        &region,
        &mc_grid,
        500,
        &SeedPath::new(0xACC6, 0, StreamTag::Field),
    )
    .unwrap();
    for (j, &lambda) in mc_grid.iter().enumerate() {
        let exact = ids_1d_hard_exact(p, kappa, lambda, 1e-13).unwrap();
        let bias = ids_1d_hard_finite_r_bias(p, kappa, lambda, 64);
        assert!(
            (est.mean[j] - exact).abs() <= 3.0 * est.stderr[j] + bias,
            "lambda {lambda}: mc {} vs series {exact} (3sigma {} bias {bias})",
            est.mean[j],
            3.0 * est.stderr[j]
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "acceptance criterion 5 (Lifshitz exponent d/2 = 0.5): PASS (L_hat {:.4}, series-MC agreement at R=64/n=500, {elapsed:.1} s)",
        fit.l_hat
    );
}

#[test]
fn criterion_06_poisson_psi_formula() {
    // phi(x) = nu omega_d lambda_d^{d/2} x^{d/2} at d = 1: lambda_1 = pi^2/8,
    // omega_1 = 2, nu = 1; the inverse must match 2 y^2 / pi^2
    let lambda_1 = PI * PI / 8.0;
    let phi = RateFunction::power_law(2.0 * lambda_1.sqrt(), 0.5).unwrap();
    let mut worst = 0.0f64;
    for y in [1.0, 10.0, 100.0] {
        let psi = asymptotic_inverse(&phi, y, 1e-12).unwrap();
        let expect = 2.0 * y * y / (PI * PI);
        worst = worst.max(((psi - expect) / expect).abs());
    }
    assert!(worst <= 1e-8, "worst relative error {worst:e}");
    println!(
        "acceptance criterion 6 (Poisson d=1 asymptotic inverse): PASS (worst rel error {worst:.2e})"
    );
}

#[test]
fn criterion_07a_scaling_fit_recovery() {
    let t_grid: Vec<f64> = (2..=8).map(|k| (k as f64).exp()).collect();
    let curve = SurvivalCurve::synthetic(
        t_grid.clone(),
        t_grid.iter().map(|&t| (-t / t.ln().powi(2)).exp()).collect(),
    )
    .unwrap();
    let check = scaling_check(&curve, 0.5).unwrap();
    assert!(
        (check.slope - 2.0).abs() <= 1e-2,
        "slope {} not within 1e-2 of 2",
        check.slope
    );

    let curve_exp = SurvivalCurve::synthetic(
        t_grid.clone(),
        t_grid.iter().map(|&t| (-0.2 * t).exp()).collect(),
    )
    .unwrap();
    let check_exp = scaling_check(&curve_exp, 1.0).unwrap();
    assert!(
        check_exp.slope.abs() <= check_exp.stderr.max(1e-9),
        "exponential slope {} +- {}",
        check_exp.slope,
        check_exp.stderr
    );
    println!(
        "acceptance criterion 7a (synthetic scaling recovery): PASS (slope {:.4} vs 2, exponential slope {:.1e})",
        check.slope, check_exp.slope
    );
}

#[test]
fn criterion_07b_eigenvalue_tail_probability_trend() {
    let start = Instant::now();
    // hard Bernoulli traps at p = 0.7: the fitted rate function puts the
    // four thresholds far from the run-length sawtooth, so the exact
    // probabilities (0.72, 0.52, 0.35, 0.23) decrease decisively
    let p = 0.7;
    let kappa = 0.5;
    let grid = log_lambda_grid(1e-4, 1e-2, 16).unwrap();
    let values: Vec<f64> = grid
        .iter()
        .map(|&l| ids_1d_hard_exact(p, kappa, l, 1e-14).unwrap())
        .collect();
    let ids = IdsEstimate::from_exact(grid, values).unwrap();
    let fit = fit_lifshitz(&ids, (1e-4, 1e-2), false).unwrap();
    let phi = fit.rate_function().unwrap();

    let hard = TrapProfile::spike(f64::INFINITY).unwrap();
    let spec = ModelSpec::bernoulli(p, hard, kappa).unwrap();
    let seed = SeedPath::new(0xACC7, 0, StreamTag::Field);
    let mut prev = f64::INFINITY;
    let mut observed = Vec::new();
    for t in [32.0, 64.0, 128.0, 256.0] {
        let tail = eigenvalue_tail_probability(&spec, 1, t, 0.45, &phi, 500, &seed).unwrap();
        assert!(
            tail.p_hat <= prev,
            "tail probability rose at t {t}: {} after {prev}",
            tail.p_hat
        );
        observed.push(tail.p_hat);
        prev = tail.p_hat;
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 900.0, "took {elapsed:.1} s");
    println!(
        "acceptance criterion 7b (eigenvalue tail probability nonincreasing over t=32..256): PASS ({observed:?}, {elapsed:.1} s)"
    );
}

#[test]
fn criterion_07c_subbox_cutoff_chain() {
    let start = Instant::now();
    let kappa = 0.5;
    let spike = TrapProfile::spike(1.0).unwrap();
    let region = BoxRegion::lattice(1, 32).unwrap();
    let mut passed = 0usize;
    for i in 0..50u64 {
        let seed = SeedPath::new(0xACC8, i, StreamTag::Field);
        let field =
            traplab::random_media::sample_bernoulli(&region, 0.5, &spike, &seed).unwrap();
        let scan = best_subbox_scan(&field, &region.site_box(), 16, 16, kappa).unwrap();
        let hn = assemble_region(&field, &scan.cell, BoundaryCondition::Neumann, kappa).unwrap();
        let pn = eigen::principal_eigenpair(&hn, DEFAULT_TOL, 10_000).unwrap();
        let bound = cutoff_transfer(&field, &scan.cell, &pn.vector, kappa, 0.25).unwrap();
        assert!(
            scan.lambda_dirichlet <= bound + 1e-9,
            "realization {i}: Dirichlet {} above cutoff bound {bound}",
            scan.lambda_dirichlet
        );
        passed += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(passed, 50);
    println!(
        "acceptance criterion 7c (best-cell Dirichlet below cutoff bound, 50/50): PASS ({elapsed:.1} s)"
    );
}

#[test]
fn criterion_08_sandwich_validity() {
    let start = Instant::now();
    let mut checked = 0usize;

    // trap strengths are chosen so the survival stays well above the
    // Monte Carlo resolution at the largest horizon; otherwise the
    // heavy-tailed Feynman-Kac weights make the stderr meaningless
    let mut run = |name: &str, spec: ModelSpec, d: usize, t_grid: &[f64], master: u64| {
        let curve = quenched_curve(
            &spec,
            d,
            &SeedPath::new(master, 0, StreamTag::Field),
            [0, 0, 0],
            t_grid,
            &Budget {
                paths_per_t: 20_000,
                wall_seconds: None,
            },
        )
        .unwrap();
        for i in 0..curve.t_grid.len() {
            assert_eq!(curve.status[i], PointStatus::Ok);
            let (lo, hi) = (curve.certified_lower[i], curve.spectral_upper[i]);
            assert!(
                lo <= hi + 1e-10,
                "{name} t {}: lower {lo} above upper {hi}",
                curve.t_grid[i]
            );
            let (mc, err) = (curve.mc_estimate[i], curve.mc_stderr[i]);
            assert!(
                mc >= lo - 3.0 * err - 1e-9 && mc <= hi + 3.0 * err + 1e-9,
                "{name} t {}: mc {mc} outside sandwich [{lo}, {hi}] (stderr {err})",
                curve.t_grid[i]
            );
            checked += 1;
        }
    };

    let soft = TrapProfile::spike(0.4).unwrap();
    run(
        "bernoulli-1d",
        ModelSpec::bernoulli(0.4, soft, 0.5).unwrap(),
        1,
        &[2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
        0xACC9,
    );
    run(
        "bernoulli-2d",
        ModelSpec::bernoulli(0.3, TrapProfile::spike(1.0).unwrap(), 0.5).unwrap(),
        2,
        &[2.0, 4.0, 8.0],
        0xACCA,
    );
    run(
        "constant",
        ModelSpec::bernoulli(1.0, TrapProfile::spike(0.25).unwrap(), 0.5).unwrap(),
        1,
        &[1.0, 2.0, 4.0],
        0xACCB,
    );
    let ball = TrapProfile::ball(1.0, 0.5).unwrap();
    run(
        "poisson-1d",
        ModelSpec::poisson(0.2, ball, 0.5).unwrap(),
        1,
        &[2.0, 4.0, 8.0, 16.0],
        0xACCC,
    );

    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "acceptance criterion 8 (sandwich lower <= mc <= upper on {checked} quenched points): PASS ({elapsed:.1} s)"
    );
}

#[test]
fn criterion_09_assumption_checkers() {
    use traplab::assumptions::{correlation_gap, moment_estimate, BoxLayout};
    let start = Instant::now();

    // 20 layouts over the two site-wise independent models: the bootstrap
    // interval for the signed gap must contain 0 in at least 19 cases
    let mut contain = 0usize;
    for k in 0..20usize {
        let spike = TrapProfile::spike(2.0).unwrap();
        let spec = if k % 2 == 0 {
            ModelSpec::bernoulli(0.4, spike, 0.5).unwrap()
        } else {
            ModelSpec::iid_tail(1.0, 0.5).unwrap()
        };
        let side = 4 + (k as i64 % 3); // sides 4..6
        let gap = 8 + 2 * (k as i64 % 4); // distances 9..15
        let a = SiteBox::new(1, [-side - gap / 2, 0, 0], [-gap / 2, 0, 0]).unwrap();
        let b = SiteBox::new(1, [gap / 2, 0, 0], [side + gap / 2, 0, 0]).unwrap();
        let r = (gap / 2 * 2) as f64 * 0.9;
        let layout = BoxLayout {
            boxes: vec![a, b],
            r,
        };
        let report = correlation_gap(
            &spec,
            &layout,
            0.2,
            1.0,
            0.0,
            1000,
            &SeedPath::new(0xACD0 + k as u64, 0, StreamTag::Field),
        )
        .unwrap();
        if report.ci.0 <= 0.0 && 0.0 <= report.ci.1 {
            contain += 1;
        } else {
            eprintln!(
                "layout {k}: CI {:?} misses 0 (gap {}, p1 {})",
                report.ci, report.gap, report.p_first
            );
        }
    }
    assert!(contain >= 19, "only {contain}/20 intervals contain 0");

    // the divergent moment must flag
    let heavy = ModelSpec::iid_tail(1.0, 0.5).unwrap();
    let m = moment_estimate(&heavy, 1, 2.0, 2000, &SeedPath::new(0xACE0, 0, StreamTag::Field))
        .unwrap();
    assert!(m.tail_flag, "heavy-tail moment must raise the divergence flag");

    // bounded model: no violations of the log-power envelope
    let bounded = ModelSpec::bernoulli(0.5, TrapProfile::spike(1.0).unwrap(), 0.5).unwrap();
    let scan = sup_potential_scan(
        &bounded,
        1,
        &[4.0, 8.0, 16.0, 32.0],
        1.0,
        100,
        &SeedPath::new(0xACE1, 0, StreamTag::Field),
    )
    .unwrap();
    assert!(
        scan.violation_frequency.iter().all(|&f| f == 0.0),
        "bounded model violated the sup bound: {:?}",
        scan.violation_frequency
    );

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "took {elapsed:.1} s, budget 5 min");
    println!(
        "acceptance criterion 9 (assumption checkers: {contain}/20 CIs contain 0, divergence flagged, 0 sup violations): PASS ({elapsed:.1} s)"
    );
}
