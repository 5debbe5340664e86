//! Pilot run behind the rate-check tolerances: prints the Monte-Carlo
//! quantities the acceptance thresholds were calibrated against, across a
//! few seeds, so the tolerance margins can be re-inspected.
//!
//! Run with `cargo run --release -p dtl-core --example rate_pilot`.

use dtl_core::evaluation::{
    classification_risk_experiment, consistency_experiment, interpolation_error_experiment,
    local_adaptivity_experiment, optimality_experiment, scaling_experiment, DatasetKind,
    RiskGenerator, SmoothTarget,
};
use dtl_core::optimizer::LossKind;

fn main() {
    for seed in [1u64, 2, 3] {
        let t0 = std::time::Instant::now();
        let r = scaling_experiment(2, &[100, 400, 1600, 6400], 200, seed).unwrap();
        println!(
            "scaling p=2 seed={seed}: slope {:.4} mean_t {:?} ({:?})",
            r.fitted_slope,
            r.mean_t,
            t0.elapsed()
        );
        let r = scaling_experiment(1, &[100, 400, 1600, 6400], 200, seed).unwrap();
        println!("scaling p=1 seed={seed}: slope {:.4}", r.fitted_slope);
    }

    for seed in [1u64, 2, 3] {
        let t0 = std::time::Instant::now();
        let r = consistency_experiment(
            DatasetKind::Saddle,
            0.0,
            LossKind::SquaredError,
            0.0,
            &[50, 200, 800],
            seed,
        )
        .unwrap();
        println!("consistency saddle seed={seed}: mse {:?} ({:?})", r.test_mse, t0.elapsed());
    }

    for seed in [1u64, 2, 3] {
        let r = consistency_experiment(
            DatasetKind::ArcTan,
            0.1,
            LossKind::SquaredError,
            0.0,
            &[50, 800],
            seed,
        )
        .unwrap();
        println!("consistency arctan seed={seed}: mse {:?}", r.test_mse);
    }

    for seed in [1u64, 2, 3] {
        let t0 = std::time::Instant::now();
        let r = local_adaptivity_experiment(DatasetKind::Saddle, &[100, 400, 1600], seed).unwrap();
        let ratio = r.mean_gradient_error[2] / r.mean_gradient_error[0];
        println!(
            "adaptivity saddle seed={seed}: err {:?} ratio(1600/100) {ratio:.3} ({:?})",
            r.mean_gradient_error,
            t0.elapsed()
        );
    }

    for seed in [1u64, 2, 3] {
        let r =
            interpolation_error_experiment(SmoothTarget::QuadraticBowl, &[100, 400, 1600], seed)
                .unwrap();
        let r1 = r.l2_error[0] / r.l2_error[1];
        let r2 = r.l2_error[1] / r.l2_error[2];
        println!(
            "interp quadratic seed={seed}: l2 {:?} ratios {r1:.2} {r2:.2}",
            r.l2_error
        );
    }

    for seed in [1u64, 2, 3] {
        let t0 = std::time::Instant::now();
        let r = classification_risk_experiment(
            RiskGenerator::MoonsFlip { flip: 0.1 },
            1000,
            2000,
            0.0,
            seed,
        )
        .unwrap();
        println!(
            "risk moons flip=0.1 seed={seed}: dtl {:.4} 1nn {:.4} bound {:.4} ({:?})",
            r.report.empirical_dtl_risk,
            r.empirical_1nn_risk,
            r.report.bound,
            t0.elapsed()
        );
    }

    let t0 = std::time::Instant::now();
    let r = optimality_experiment(200, 2, 500, 20, 1).unwrap();
    println!(
        "optimality n=200 q=500 alts=20: violations {} max_excess {:.2e} ({:?})",
        r.pointwise_violations,
        r.max_excess,
        t0.elapsed()
    );
}
