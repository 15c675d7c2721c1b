use mecke_core::fixedpoint::*;
use mecke_core::measure::{DiscreteMeasure, IntensityMeasure, MeasureKind, Partition};
use mecke_core::parallel::{monte_carlo_multi, with_threads};
use mecke_core::samplers::{sample_dirichlet_ferguson, StickBreakingConfig};
use mecke_core::stats::{agree, Estimate};
use mecke_core::RngStream;
use proptest::prelude::*;

const M: usize = 4000;

fn rng(i: u64) -> RngStream {
    RngStream::new(0xf1, i)
}

fn three_cells() -> Partition<f64> {
    Partition::new(vec![0.0, 0.3, 0.7, 1.0]).unwrap()
}

#[test]
fn one_step_from_a_dirac() {
    let sigma = IntensityMeasure::uniform(1.5).unwrap();
    let eta = DiscreteMeasure::<f64>::dirac(0.25).unwrap();
    let mut r = rng(0);
    for _ in 0..200 {
        let next = apply_operator(&eta, &sigma, &mut r).unwrap();
        assert_eq!(next.kind(), MeasureKind::ProbabilityMeasure);
        assert_eq!(next.len(), 2);
        let kept = next.atom_mass_at(0.25);
        assert!(kept > 0.0 && kept < 1.0);
        assert!((next.total_mass() - 1.0).abs() < 1e-15);
    }
    let finite = DiscreteMeasure::dirac(0.25).unwrap().scaled(2.0).unwrap();
    assert!(apply_operator(&finite, &sigma, &mut r).is_err());
}

#[test]
fn df_is_stationary() {
    let sigma = IntensityMeasure::uniform(1.0).unwrap();
    let cfg = OperatorTrajectory::new(InitialLaw::EmpiricalDf, 20, M).unwrap();
    let report = run_trajectory(&cfg, &sigma, &three_cells(), &rng(1)).unwrap();
    assert!(report.gaps_agree(0, 20, 3.0));
    for step in [0, 20] {
        let s = &report.steps[step];
        assert!(
            s.moment_gaps.iter().all(|g| g.gap.abs() <= 4.0 * g.std_err),
            "step {step}"
        );
    }
}

#[test]
fn starting_atoms_lose_mass_geometrically() {
    let sigma = IntensityMeasure::uniform(2.0).unwrap();
    let cfg =
        OperatorTrajectory::new(InitialLaw::PointMassAtUniformDiscretization(5), 15, M).unwrap();
    let report = run_trajectory(&cfg, &sigma, &three_cells(), &rng(2)).unwrap();
    assert!(report.surviving_mass_tracks(15, 3.0));
    assert_eq!(report.steps[0].surviving_mass.mean, 1.0);
    assert!((report.steps[3].surviving_mass_expected - 8.0 / 27.0).abs() < 1e-15);
}

#[test]
fn long_runs_match_stick_breaking() {
    // After 80 steps from δ_{1/2} the starting atom holds (2/3)^80 of the
    // mass on average; the ensemble should be indistinguishable from direct
    // stick-breaking draws.
    let beta = 2.0;
    let sigma = IntensityMeasure::uniform(beta).unwrap();
    let p = three_cells();
    let cfg = OperatorTrajectory::new(InitialLaw::PointMassAtDeltaHalf, 80, M).unwrap();
    let report = run_trajectory(&cfg, &sigma, &p, &rng(3)).unwrap();
    let sb = StickBreakingConfig::default();
    let direct = monte_carlo_multi(M, &rng(4), 9, |r, out| {
        let cells = p.cell_masses(&sample_dirichlet_ferguson(&sigma, &sb, r)?);
        for c in 0..3 {
            for n in 1..=3 {
                out[3 * c + n - 1] = cells[c].powi(n as i32);
            }
        }
        Ok(())
    })
    .unwrap();
    let last = report.final_step();
    for (i, (g, d)) in last.moment_gaps.iter().zip(&direct).enumerate() {
        assert_eq!((g.cell, g.order), (i / 3, i % 3 + 1));
        let chain = Estimate {
            mean: g.mean,
            std_err: g.std_err,
            count: M as u64,
        };
        assert!(
            agree(&chain, &d.estimate(), 3.0),
            "cell {} order {}",
            g.cell,
            g.order
        );
    }
}

#[test]
fn trajectories_do_not_depend_on_thread_count() {
    let sigma = IntensityMeasure::uniform(0.5).unwrap();
    let cfg = OperatorTrajectory::new(InitialLaw::EmpiricalDf, 5, 500).unwrap();
    let p = Partition::uniform(2).unwrap();
    let a = with_threads(Some(1), || run_trajectory(&cfg, &sigma, &p, &rng(5)))
        .unwrap()
        .unwrap();
    let b = with_threads(Some(3), || run_trajectory(&cfg, &sigma, &p, &rng(5)))
        .unwrap()
        .unwrap();
    assert_eq!(a, b);
}

#[test]
fn trajectory_csv_layout() {
    let sigma = IntensityMeasure::uniform(1.0).unwrap();
    let cfg = OperatorTrajectory::new(InitialLaw::PointMassAtDeltaHalf, 4, 50).unwrap();
    let report = run_trajectory(&cfg, &sigma, &three_cells(), &rng(6)).unwrap();
    let mut buf = Vec::new();
    write_trajectory_csv(&report, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,momentOrder,cellIndex,gap,ksDistance");
    assert_eq!(lines.len(), 1 + 5 * 3 * MAX_MOMENT_ORDER);
    assert!(lines[1].starts_with("0,1,0,"));
    assert!(lines.last().unwrap().starts_with("4,3,2,"));
}

#[test]
fn config_round_trips_through_json() {
    let cfg =
        OperatorTrajectory::new(InitialLaw::PointMassAtUniformDiscretization(3), 10, 20).unwrap();
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(
        serde_json::from_str::<OperatorTrajectory>(&text).unwrap(),
        cfg
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_keeps_probability_measures(beta in 0.1f64..5.0, steps in 1usize..40, seed in any::<u64>()) {
        let sigma = IntensityMeasure::uniform(beta).unwrap();
        let mut r = RngStream::new(seed, 0);
        let mut eta = DiscreteMeasure::<f64>::dirac(0.5).unwrap();
        let mut survivor = 1.0;
        for _ in 0..steps {
            let next = apply_operator(&eta, &sigma, &mut r).unwrap();
            prop_assert!(next.len() <= eta.len() + 1);
            prop_assert!((next.total_mass() - 1.0).abs() <= 1e-12);
            // The starting atom's mass can only shrink.
            let kept = next.atom_mass_at(0.5);
            prop_assert!(kept <= survivor);
            survivor = kept;
            eta = next;
        }
    }
}
