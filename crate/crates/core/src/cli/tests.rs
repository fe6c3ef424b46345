use super::config::*;
use super::*;

const MINIMAL: &str = r#"
[instance]
sizes = [16]
p = 3.0
q = { fourier = { mean = 1.7, modes = [{ k = [1], cos = 0.1 }] } }
beta = 4.0
lambda = 0.1
"#;

fn parse(text: &str) -> Result<RunConfig> {
    RunConfig::from_toml(text, Path::new("test.toml"))
}

#[test]
fn defaults_fill_in() {
    let cfg = parse(MINIMAL).unwrap();
    assert_eq!(cfg.seed, 42);
    assert_eq!(cfg.instance.mu, FieldSpec::Constant(1.0));
    assert_eq!(cfg.instance.metric, MetricInput::Named("identity".into()));
    assert_eq!(cfg.solver, SolverConfig::default());
    assert_eq!(cfg.verify.trials, 1000);
    let ing = cfg.ingredients().unwrap();
    assert!((ing.exps.q_plus - 1.8).abs() < 1e-12);
}

#[test]
fn echo_round_trips() {
    let cfg = parse(MINIMAL).unwrap();
    let again = parse(&cfg.to_toml()).unwrap();
    assert_eq!(again.to_toml(), cfg.to_toml());
}

#[test]
fn field_specs_build() {
    let chart = std::sync::Arc::new(crate::manifold::Chart::unit(&[8, 4]).unwrap());
    let affine = FieldSpec::Affine { affine: vec![1.0, 2.0, -1.0] };
    let f = affine.build(&chart, "p").unwrap();
    let x = chart.coords(13);
    assert_eq!(f.values()[13], 1.0 + 2.0 * x[0] - x[1]);
    assert!(FieldSpec::Affine { affine: vec![1.0] }.build(&chart, "p").is_err());
    let fourier = FieldSpec::Fourier {
        fourier: FourierSpec {
            mean: 2.0,
            modes: vec![FourierMode { k: vec![1, 0], cos: 0.5, sin: 0.0 }],
        },
    };
    let f = fourier.build(&chart, "q").unwrap();
    assert!((f.values()[0] - 2.5).abs() < 1e-15);
}

#[test]
fn parse_errors_carry_line() {
    let bad = format!("{MINIMAL}\n[solver]\nmultistart = \"eight\"\n");
    match parse(&bad) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 10),
        other => panic!("{other:?}"),
    }
    match parse("[instance]\nsizes = [16]\nbogus = 1\n") {
        Err(Error::Parse { line, message, .. }) => {
            assert!(line >= 1, "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn lambda_grid_is_log_spaced_and_validated() {
    let grid = LambdaGrid {
        lo: LambdaSpec::Value(0.01),
        hi: LambdaSpec::Value(1.0),
        points: 3,
    };
    let v = grid.values(None).unwrap();
    assert_eq!(v[0], 0.01);
    assert!((v[1] - 0.1).abs() < 1e-15);
    assert_eq!(v[2], 1.0);
    let bad = LambdaGrid {
        lo: LambdaSpec::Value(1.0),
        hi: LambdaSpec::Value(0.5),
        points: 4,
    };
    assert!(bad.values(None).is_err());
    assert!(LambdaSpec::Relative { relative: 0.5 }.resolve(None).is_err());
}

#[test]
fn fault_keys() {
    assert_eq!(parse_faults(&["r_q=0.5".into()]).unwrap().r_q, Some(0.5));
    assert!(matches!(parse_faults(&["r_q".into()]), Err(Error::Usage(_))));
    assert!(matches!(parse_faults(&["tol=1".into()]), Err(Error::Usage(_))));
}

#[test]
fn zero_trials_is_usage_error() {
    let mut cfg = parse(MINIMAL).unwrap();
    cfg.verify.trials = 0;
    assert!(matches!(cmd_verify(&cfg, Default::default()), Err(Error::Usage(_))));
}
