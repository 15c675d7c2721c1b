use mecke_core::measure::{
    Arity, Expr, IntensityMeasure, Partition, PiecewiseConstant, TestFunctional,
};
use mecke_core::mecke::*;
use mecke_core::parallel::{monte_carlo, with_threads};
use mecke_core::samplers::{sample_dirichlet_ferguson, StickBreakingConfig};
use mecke_core::stats::{agree, near};
use mecke_core::{Rational, RngStream};

const N: usize = 20_000;

fn rng(i: u64) -> RngStream {
    RngStream::new(0xdf, i)
}

fn functional(id: &str, arity: Arity, expr: Expr<f64>) -> TestFunctional<f64> {
    let p = Partition::new(vec![0.0, 0.4, 1.0]).unwrap();
    TestFunctional::new(id, arity, p, vec![vec![1.0, -0.5], vec![0.0, 2.0]], expr).unwrap()
}

#[test]
fn identities_hold_for_a_piecewise_intensity() {
    let sigma =
        IntensityMeasure::piecewise_normalized(1.5, vec![0.0, 0.2, 1.0], vec![4.0, 1.0]).unwrap();
    let cases = [
        (
            Identity::PoissonMecke,
            functional("f", Arity::F, Expr::point(0) * Expr::pairing(1)),
        ),
        (
            Identity::GammaMecke,
            functional("f", Arity::F, Expr::point(1) + Expr::pairing(0)),
        ),
        (
            Identity::DfMeckeG,
            functional("g", Arity::G, Expr::pairing(0) * Expr::pairing(1)),
        ),
        (
            Identity::DfMeckeF,
            functional("f", Arity::F, Expr::point(0) * Expr::pairing(0).pow(2)),
        ),
        (
            Identity::DfMeckeR,
            functional("r", Arity::R, Expr::mass() * Expr::pairing(1)),
        ),
        (
            Identity::FiniteDimG,
            functional("g", Arity::G, Expr::pairing(1).pow(3)),
        ),
        (
            Identity::FiniteDimF,
            functional("f", Arity::F, Expr::point(1) * Expr::pairing(0)),
        ),
    ];
    for (i, (identity, f)) in cases.into_iter().enumerate() {
        let case = IdentityCase::new(identity, sigma.clone(), f, N, rng(i as u64)).unwrap();
        let entry = run_case(&case).unwrap();
        assert!(entry.pass, "{identity}: {:?}", entry.report);
    }
}

#[test]
fn a_wrong_identity_is_caught() {
    // LHS under β = 1 against RHS under β = 2 must not agree.
    let f = functional("g", Arity::G, Expr::pairing(1).pow(2));
    let one = IdentityCase::new(
        Identity::DfMeckeG,
        IntensityMeasure::uniform(1.0).unwrap(),
        f.clone(),
        N,
        rng(10),
    )
    .unwrap();
    let two = IdentityCase::new(
        Identity::DfMeckeG,
        IntensityMeasure::uniform(2.0).unwrap(),
        f,
        N,
        rng(11),
    )
    .unwrap();
    let lhs = estimate_lhs(&one).unwrap();
    let rhs = estimate_rhs(&two).unwrap();
    assert!(!agree(&lhs, &rhs, PASS_SIGMAS), "{lhs:?} {rhs:?}");
}

#[test]
fn reweighted_rhs_is_consistent() {
    let f = functional("r", Arity::R, Expr::mass().pow(2) + Expr::point(1));
    for beta in [1.0, 2.0] {
        let case = IdentityCase::new(
            Identity::DfMeckeR,
            IntensityMeasure::uniform(beta).unwrap(),
            f.clone(),
            N,
            rng(20),
        )
        .unwrap();
        let plain = estimate_rhs(&case).unwrap();
        let weighted = estimate_rhs(
            &case
                .clone()
                .with_rhs_sampling(RhsSampling::UniformReweighted),
        )
        .unwrap();
        if beta == 1.0 {
            // Beta(1, 1) by inversion is the uniform draw itself, with weight one.
            assert_eq!(plain, weighted);
        } else {
            assert!(agree(&plain, &weighted, 3.0), "{plain:?} {weighted:?}");
        }
        assert!(
            verify_identity(&case.with_rhs_sampling(RhsSampling::UniformReweighted))
                .unwrap()
                .pass
        );
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let f = functional("f", Arity::F, Expr::point(0) * Expr::pairing(1));
    let case = IdentityCase::new(
        Identity::GammaMecke,
        IntensityMeasure::uniform(0.5).unwrap(),
        f,
        5000,
        rng(30),
    )
    .unwrap();
    let a = with_threads(Some(1), || verify_identity(&case))
        .unwrap()
        .unwrap();
    let b = with_threads(Some(4), || verify_identity(&case))
        .unwrap()
        .unwrap();
    assert_eq!(a, b);
}

#[test]
fn anchored_df_values() {
    let cfg = StickBreakingConfig::default();
    for (i, beta) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let sigma = IntensityMeasure::uniform(beta).unwrap();
        let stream = rng(40 + i as u64);
        let mass = monte_carlo(N, &stream, |r| {
            Ok(sample_dirichlet_ferguson(&sigma, &cfg, r)?.total_mass())
        })
        .unwrap();
        assert!((mass.mean - 1.0).abs() < 1e-12);
        let squared = monte_carlo(N, &stream, |r| {
            Ok(sample_dirichlet_ferguson(&sigma, &cfg, r)?
                .total_mass()
                .powi(2))
        })
        .unwrap();
        assert!((squared.mean - 1.0).abs() < 1e-12);
        // E Σ_j w_j² = 1/(β + 1).
        let sq = monte_carlo(N, &stream, |r| {
            Ok(sample_dirichlet_ferguson(&sigma, &cfg, r)?
                .atoms()
                .iter()
                .map(|a| a.mass * a.mass)
                .sum())
        })
        .unwrap();
        assert!(near(&sq, 1.0 / (beta + 1.0), 4.0, 0.0), "β {beta}: {sq:?}");
    }
}

#[test]
fn exact_values_against_direct_formulas() {
    let sigma = IntensityMeasure::uniform(2.0).unwrap();
    // E⟨g, η⟩ = ⟨g, σ̄⟩ = 0.4 · 1 + 0.6 · (−0.5). Exact for the binary
    // values of the inputs, so 0.1 only to double precision.
    let g = functional("g", Arity::G, Expr::pairing(0));
    let v = exact_value(Identity::DfMeckeG, &sigma, &g).unwrap();
    assert!((mecke_core::Field::to_real(&v) - 0.1).abs() < 1e-15);
    // On dyadic breakpoints it is exact: ⟨1_{[0,1/2)}, σ̄⟩ = 1/2.
    let half = TestFunctional::new(
        "h",
        Arity::G,
        Partition::uniform(2).unwrap(),
        vec![vec![1.0, 0.0]],
        Expr::pairing(0),
    )
    .unwrap();
    assert_eq!(
        exact_value(Identity::DfMeckeG, &sigma, &half).unwrap(),
        Rational::new(1.into(), 2.into())
    );
    // Poisson: E Σ_x g_1(x) = ⟨g_1, σ⟩ = 2 · 0.6 · 2.
    let f = functional("f", Arity::F, Expr::point(1));
    let v = exact_value(Identity::PoissonMecke, &sigma, &f).unwrap();
    assert!((mecke_core::Field::to_real(&v) - 2.4).abs() < 1e-15);
    // Arity mismatch has no exact value.
    assert!(exact_value(Identity::DfMeckeG, &sigma, &f).is_none());
}

#[test]
fn laplace_transforms() {
    let half = Partition::uniform(2).unwrap();
    let s2 = IntensityMeasure::uniform(2.0).unwrap();
    let pois = PiecewiseConstant::new(half.clone(), vec![-1.0, 0.0]).unwrap();
    let gam = PiecewiseConstant::constant(half, -0.5);
    let a = verify_laplace(LaplaceKind::Poisson, &s2, &pois, N, &rng(50)).unwrap();
    let b = verify_laplace(LaplaceKind::Gamma, &s2, &gam, N, &rng(51)).unwrap();
    assert!(a.pass, "{a:?}");
    assert!(b.pass, "{b:?}");
    assert!((b.rhs_mean - 4.0 / 9.0).abs() < 1e-15);
}

#[test]
fn simplicial_decomposition_holds() {
    let sigma = IntensityMeasure::uniform(2.0).unwrap();
    let p = Partition::new(vec![0.0, 0.3, 1.0]).unwrap();
    let report = verify_simplicial_decomposition(&sigma, N, &p, 1e-4, &rng(60)).unwrap();
    assert!(
        report.pass,
        "{:#?}",
        report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
    assert_eq!(report.checks.len(), 3 + 2 * 3 + 2);
}

#[test]
fn case_validation() {
    let sigma = IntensityMeasure::uniform(1.0).unwrap();
    let g = functional("g", Arity::G, Expr::pairing(0));
    assert!(IdentityCase::new(Identity::DfMeckeF, sigma.clone(), g.clone(), N, rng(0)).is_err());
    assert!(IdentityCase::new(
        Identity::DfMeckeG,
        sigma.clone(),
        g.clone(),
        MIN_SAMPLES - 1,
        rng(0)
    )
    .is_err());
    // A cell outside the support of σ.
    let sparse =
        IntensityMeasure::piecewise_normalized(1.0, vec![0.0, 0.5, 1.0], vec![0.0, 1.0]).unwrap();
    assert!(IdentityCase::new(Identity::FiniteDimG, sparse, g, N, rng(0)).is_err());
}

#[test]
fn identity_names_round_trip() {
    for identity in Identity::ALL {
        assert_eq!(identity.as_str().parse::<Identity>().unwrap(), identity);
        let json = serde_json::to_string(&identity).unwrap();
        assert_eq!(json, format!("\"{}\"", identity.as_str()));
    }
    assert!("df_mecke".parse::<Identity>().is_err());
}

#[test]
fn suite_csv_layout() {
    let sigmas = [IntensityMeasure::uniform(1.0).unwrap()];
    let cases = suite_cases(&[Identity::DfMeckeG], &sigmas, 1000, &rng(70)).unwrap();
    let report = run_suite(&cases).unwrap();
    let mut buf = Vec::new();
    write_suite_csv(&report, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "identity,beta,functionalId,n,lhsMean,rhsMean,zScore,pass"
    );
    assert_eq!(lines.count(), cases.len() + report.flagged);
}
