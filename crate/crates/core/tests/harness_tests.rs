use std::path::PathBuf;

use ggv_core::check::Verdict;
use ggv_core::expr::Expression;
use ggv_core::gcs::triple_values;
use ggv_core::geometry::Chart;
use ggv_core::harness::report::render_jsonl;
use ggv_core::harness::suites::{conf_gk_criteria, gk_criteria};
use ggv_core::harness::*;
use ggv_core::Error;

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.ggv"))
}

/// Passing residuals sit at rounding level and failing ones at least
/// `1e-3`, so the verdicts are far from the default threshold.
#[test]
fn every_fixture_reproduces_its_expectations() {
    let opts = SuiteOptions::default();
    for f in fixtures() {
        for (suite, want) in &f.expectations {
            let r = run_suite(&f.structure, *suite, &opts).unwrap();
            assert_eq!(r.verdict, *want, "{} / {suite}: {r:?}", f.name);
            assert_eq!(r.points_evaluated, opts.points, "{} / {suite}", f.name);
            match want {
                Verdict::Fail => assert!(r.max_residual() >= 1e-3, "{} / {suite}", f.name),
                Verdict::Pass => assert!(
                    r.max_residual() <= 1e-11,
                    "{} / {suite}: {}",
                    f.name,
                    r.max_residual()
                ),
            }
        }
    }
}

#[test]
fn inapplicable_suites_are_usage_errors() {
    let opts = SuiteOptions::default();
    let s = fixture("ex31_prime").unwrap().structure;
    assert!(matches!(
        run_suite(&s, Suite::Hypersurface, &opts),
        Err(Error::Usage(_))
    ));
    assert!(matches!(
        run_suite(&s, Suite::Gk, &opts),
        Err(Error::Usage(_))
    ));
    let s = fixture("ex31").unwrap().structure;
    assert!(matches!(
        run_suite(&s, Suite::ConfIntegrability, &opts),
        Err(Error::Usage(_))
    ));
    assert!(matches!("kahler".parse::<Suite>(), Err(Error::Usage(_))));
    assert_eq!(
        "conformal-integrability".parse::<Suite>().unwrap(),
        Suite::ConfIntegrability
    );
}

#[test]
fn combined_suite_covers_every_applicable_suite() {
    let opts = SuiteOptions::default();
    let s = fixture("ex32_rescaled").unwrap().structure;
    let reports = run_suites(&s, Suite::All, &opts).unwrap();
    let names: Vec<&str> = reports.iter().map(|r| r.suite.as_str()).collect();
    assert_eq!(
        names,
        [
            "algebraic",
            "integrability",
            "conf-integrability",
            "gk",
            "conf-gk",
            "hypersurface"
        ]
    );
    let all = run_suite(&s, Suite::All, &opts).unwrap();
    assert_eq!(all.verdict, Verdict::Fail);
    assert!(all
        .conditions
        .iter()
        .any(|c| c.condition.starts_with("gk/")));
    let ex31 = run_suites(&fixture("ex31").unwrap().structure, Suite::All, &opts).unwrap();
    assert_eq!(ex31.len(), 2);
}

#[test]
fn generalized_kahler_criteria_agree_on_every_fixture() {
    let opts = SuiteOptions::default();
    for f in fixtures() {
        if let Ok(reports) = gk_criteria(&f.structure, &opts) {
            let verdicts: Vec<Verdict> = reports.iter().map(|r| r.verdict).collect();
            assert!(
                verdicts.windows(2).all(|w| w[0] == w[1]),
                "{}: {verdicts:?}",
                f.name
            );
        }
        if let Ok(reports) = conf_gk_criteria(&f.structure, &opts) {
            let verdicts: Vec<Verdict> = reports.iter().map(|r| r.verdict).collect();
            assert!(
                verdicts.windows(2).all(|w| w[0] == w[1]),
                "{}: {verdicts:?}",
                f.name
            );
        }
    }
}

#[test]
fn sampling_contracts() {
    let square = Chart::cube(2, 0.0, 1.0).unwrap();
    let a = sample_points(&square, 3, 1).unwrap();
    assert_eq!(a.len(), 3);
    assert_eq!(a, sample_points(&square, 3, 1).unwrap());

    let annulus = Chart::cube(4, -2.0, 2.0)
        .unwrap()
        .with_exclusion(Expression::Norm2 - Expression::constant(0.25));
    for p in sample_points(&annulus, 500, 0x5EED_C0DE).unwrap() {
        assert!(p.iter().map(|x| x * x).sum::<f64>().sqrt() >= 0.5);
    }

    let nowhere = square.with_exclusion(Expression::constant(-1.0));
    assert!(matches!(
        sample_points(&nowhere, 4, 1),
        Err(Error::SamplingExhausted { requested: 4, .. })
    ));
}

#[test]
fn minimal_zero_file_fails_the_algebraic_suite() {
    let text = "chart dim = 2\nchart box x1 = -1 1\nchart box x2 = -1 1\nA 1 1 = 0\npi 1 2 = 0\nsigma 1 2 = 0\n";
    let s = parse_structure(text).unwrap();
    let r = run_suite(&s, Suite::Algebraic, &SuiteOptions::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!((r.residual("alg.square") - 1.0).abs() < 1e-15);
}

#[test]
fn shipped_files_match_the_built_in_fixtures() {
    for f in fixtures() {
        let loaded = load_structure_file(shipped(f.name)).unwrap();
        assert_eq!(loaded.chart.bounds, f.structure.chart.bounds);
        let pts = sample_points(&f.structure.chart, 10, 17).unwrap();
        let (a, b) = (loaded.gcs().unwrap(), f.structure.gcs().unwrap());
        for p in &pts {
            let (x, y) = (triple_values(&a, p).unwrap(), triple_values(&b, p).unwrap());
            let diff = x
                .iter()
                .zip(&y)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max);
            assert!(diff <= 1e-12, "{}: {diff}", f.name);
            if let (Some(m1), Some(m2)) = (&loaded.metric, &f.structure.metric) {
                assert!(
                    m1.gamma
                        .eval(p)
                        .unwrap()
                        .sub(&m2.gamma.eval(p).unwrap())
                        .max_abs()
                        <= 1e-12
                );
                assert!(
                    m1.psi
                        .eval(p)
                        .unwrap()
                        .sub(&m2.psi.eval(p).unwrap())
                        .max_abs()
                        <= 1e-12
                );
            }
            if let (Some(l1), Some(l2)) = (&loaded.lee, &f.structure.lee) {
                let (u, v) = (l1.form.values(p).unwrap(), l2.form.values(p).unwrap());
                assert!(u.iter().zip(&v).all(|(s, t)| (s - t).abs() <= 1e-12));
            }
        }
        assert_eq!(
            loaded.hypersurface.is_some(),
            f.structure.hypersurface.is_some()
        );
    }
}

#[test]
fn export_round_trip_is_a_fixpoint() {
    for f in fixtures() {
        let text = export_structure(&f.structure);
        let again = export_structure(&parse_structure(&text).unwrap());
        assert_eq!(text, again, "{}", f.name);
    }
}

#[test]
fn malformed_files_report_their_line() {
    let text = "chart dim = 2\nchart box x1 = -1 1\nchart box x2 = -1 1\n\nA 1 2 = x1 * (x2 +\n";
    match parse_structure(text) {
        Err(Error::Parse { line, source }) => {
            assert_eq!(line, 5);
            assert!(source.offset <= "x1 * (x2 +".len());
        }
        other => panic!("{other:?}"),
    }
    let text = "chart dim = 2\nchart box x1 = -1 1\nchart box x2 = -1 1\nA 3 1 = 1\n";
    assert!(matches!(
        parse_structure(text),
        Err(Error::DimensionMismatch(_))
    ));
    let text = "chart dim = 2\nchart box x1 = -1 1\nchart box x2 = -1 1\npi 2 1 = 1\n";
    assert!(matches!(
        parse_structure(text),
        Err(Error::Format { line: 4, .. })
    ));
    assert!(matches!(
        parse_structure("A 1 1 = 0\n"),
        Err(Error::Format { .. })
    ));
    assert!(matches!(
        load_structure_file("/nonexistent/structure.ggv"),
        Err(Error::Io(_))
    ));
}

#[test]
fn reports_do_not_depend_on_the_worker_count() {
    let s = fixture("ex32_rescaled").unwrap().structure;
    let render = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            run_suites(&s, Suite::All, &SuiteOptions::default())
                .unwrap()
                .iter()
                .map(render_jsonl)
                .collect::<String>()
        })
    };
    let one = render(1);
    assert_eq!(one, render(1));
    assert_eq!(one, render(3));
    assert_eq!(one, render(8));
    for line in one.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in [
            "suite",
            "condition",
            "max_residual",
            "worst_point",
            "points",
            "seed",
            "tol",
            "verdict",
        ] {
            assert!(v.get(key).is_some(), "{key} missing in {line}");
        }
    }
}
