use std::collections::BTreeMap;
use std::path::PathBuf;

use dminmax::experiment::{
    AlgorithmName, AlgorithmSection, CouplingKind, ExperimentConfig, ExplicitCoupling, GraphSection, MixingSection,
    MixingSpec, ProblemSection, ProxSpec, RunSection, StartPoint, StepSpec, TopologySpec,
};
use dminmax::inclusion::InitVariant;
use dminmax::linalg::{Matrix, Vector};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, (-300i32..300).prop_map(|e| 1.7f64.powi(e)), Just(0.0)]
}

fn positive() -> impl Strategy<Value = f64> {
    prop_oneof![1e-6..1e3f64, (1u32..200).prop_map(|k| 1.0 / k as f64)]
}

fn prox() -> impl Strategy<Value = ProxSpec> {
    prop_oneof![
        Just(ProxSpec::Zero),
        Just(ProxSpec::ZeroSet),
        (0.0..10.0f64).prop_map(ProxSpec::L1),
        (finite(), 0.0..5.0f64).prop_map(|(lo, w)| ProxSpec::Box(lo, lo + w)),
    ]
}

fn topology() -> impl Strategy<Value = TopologySpec> {
    prop_oneof![
        Just(TopologySpec::Path),
        Just(TopologySpec::Ring),
        Just(TopologySpec::Star),
        Just(TopologySpec::Complete),
        (any::<u64>(), 0.0..=1.0f64).prop_map(|(seed, density)| TopologySpec::Random { seed, density }),
        "[a-z][a-z0-9_/]{0,12}\\.edges".prop_map(|p| TopologySpec::File(PathBuf::from(p))),
    ]
}

fn mixing() -> impl Strategy<Value = MixingSpec> {
    prop_oneof![Just(MixingSpec::Metropolis), positive().prop_map(MixingSpec::Laplacian)]
}

fn step() -> impl Strategy<Value = StepSpec> {
    prop_oneof![Just(StepSpec::Auto), positive().prop_map(StepSpec::Value)]
}

fn matrix(r: usize, c: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(finite(), r * c).prop_map(move |v| Matrix::from_row_slice(r, c, &v))
}

fn vector(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(finite(), n).prop_map(Vector::from_vec)
}

fn explicit(p: usize, d: usize) -> impl Strategy<Value = ExplicitCoupling> {
    (
        matrix(p, d),
        prop::option::of(matrix(p, p)),
        prop::option::of(matrix(d, d)),
        prop::option::of(vector(p)),
        prop::option::of(vector(d)),
    )
        .prop_map(|(m, p_mat, r_mat, a, b)| ExplicitCoupling { m: Some(m), p_mat, r_mat, a, b })
}

fn problem() -> impl Strategy<Value = ProblemSection> {
    (1usize..6, 1usize..4, 0usize..3)
        .prop_flat_map(|(agents, p, d)| {
            let kinds = prop_oneof![
                Just(CouplingKind::Bilinear),
                Just(CouplingKind::Skew),
                Just(CouplingKind::Quadratic),
                Just(CouplingKind::None),
                Just(CouplingKind::Explicit),
            ];
            (
                Just((agents, p, d)),
                prox(),
                prox(),
                prop::collection::btree_map(0..agents, prox(), 0..3),
                prop::collection::btree_map(0..agents, prox(), 0..3),
                kinds,
                prop::collection::vec(explicit(p, d), agents),
                any::<u64>(),
                0.0..10.0f64,
                any::<bool>(),
            )
        })
        .prop_map(|((agents, p, d), f, g, fo, go, coupling, ex, seed, scale, zero_start)| ProblemSection {
            agents,
            p,
            d,
            f,
            g,
            f_overrides: fo,
            g_overrides: go,
            coupling: if d == 0 && coupling == CouplingKind::Explicit { CouplingKind::None } else { coupling },
            explicit: if d > 0 && coupling == CouplingKind::Explicit {
                ex.into_iter().enumerate().collect()
            } else {
                BTreeMap::new()
            },
            seed,
            scale,
            start: if zero_start { StartPoint::Zero } else { StartPoint::Random },
        })
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    let names = prop::sample::select(AlgorithmName::ALL.to_vec());
    (
        problem(),
        topology(),
        prop::option::of(topology()),
        mixing(),
        prop::option::of(mixing()),
        (names.clone(), step(), step(), 0.01..0.99f64, any::<bool>(), any::<bool>()),
        (1usize..1_000_000, prop_oneof![Just(0.0), 1e-14..1e-2f64], 1usize..500, any::<bool>()),
        prop::collection::vec(names, 0..5),
    )
        .prop_map(|(problem, gx, gy, mx, my, alg, run, compare)| {
            let minimization = problem.is_minimization();
            let keep = |a: &AlgorithmName| minimization || *a != AlgorithmName::PgExtra;
            let name = if keep(&alg.0) { alg.0 } else { AlgorithmName::Alg2 };
            ExperimentConfig {
                problem,
                graph: GraphSection { x: gx, y: gy },
                mixing: MixingSection { x: mx, y: my },
                algorithm: AlgorithmSection {
                    name,
                    tau: alg.1,
                    sigma: alg.2,
                    safety: alg.3,
                    init: if alg.4 { InitVariant::Alt } else { InitVariant::Default },
                    allow_unsafe: alg.5,
                },
                run: RunSection { max_iters: run.0, tol: run.1, trace_every: run.2, reference: run.3 },
                compare: compare.into_iter().filter(keep).collect(),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn serialize_then_parse_is_identity(cfg in config()) {
        let text = cfg.to_ini_string();
        let back = ExperimentConfig::parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_ini_string(), text);
    }
}

#[test]
fn unknown_keys_and_sections_are_rejected_by_name() {
    let base = "[problem]\nagents = 2\np = 1\n[graph]\nx = path\n[algorithm]\nname = alg2\n";
    for (extra, field) in [
        ("[run]\nmax_iter = 5\n", "run.max_iter"),
        ("[solver]\nx = 1\n", "solver"),
        ("[problem]\nfoo.1 = 2\n", "problem"),
        ("[problem]\nd = 1\ncoupling = explicit\nm.0 = 1\nm.1 = 1,2\n", "problem"),
    ] {
        let err = ExperimentConfig::parse(&format!("{base}{extra}")).unwrap_err().to_string();
        assert!(err.contains(field), "{err}");
    }
    let base = "[graph]\nx = path\n[algorithm]\nname = alg2\n[problem]\nagents = 2\np = 1\n";
    for (extra, field) in [
        ("foo.1 = 2\n", "problem.foo.1"),
        ("d = 1\ncoupling = explicit\nm.0 = 1\nm.1 = 1,2\n", "problem.m.1"),
        ("d = 1\ncoupling = explicit\nm.0 = 1\nm.1 = 1\nrmat.0 = 1,0\n", "problem.rmat.0"),
        ("coupling = explicit\n", "problem.coupling"),
    ] {
        let err = ExperimentConfig::parse(&format!("{base}{extra}")).unwrap_err().to_string();
        assert!(err.contains(field), "{err}");
    }
}
