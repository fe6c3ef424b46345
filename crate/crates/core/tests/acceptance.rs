//! One line per acceptance criterion.
//!
//! Criteria whose failure is understood are listed in `EXPECTED_FAILURES`;
//! the target fails if the set of failing criteria differs from that list in
//! either direction.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use nehari::cli::{config::RunConfig, verify};
use nehari::doublephase::{energy, Kind};
use nehari::nehari::{lambda_star_star, project, sample_projections, thresholds, NehariClass};
use nehari::orlicz::{estimate_constants, sobolev_norm};
use nehari::rng::{substream, Stream};
use nehari::spectral::Spectral;
use serde_json::Value;

/// Sampled Minus points with `J <= 0` exist at `λ**/2` for the reference
/// instance; see the decisions ledger.
const EXPECTED_FAILURES: &[u32] = &[4];

const LUXEMBURG_TOL: f64 = 1e-10;
const CLAUSE_MARGIN: f64 = -1e-12;
const FD_REL_TOL: f64 = 1e-6;
const PSI_TOL: f64 = 1e-12;
const GOLDEN_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-6;
const NONNEG_TOL: f64 = -1e-10;
const SEPARATION_TOL: f64 = 1e-6;
const SOLVE_BUDGET_S: f64 = 120.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn criterion_1_and_2() -> (Verdict, Verdict) {
    let cfg = RunConfig::load(&common::config("variable.toml")).unwrap();
    let ing = cfg.ingredients().unwrap();
    let e = &ing.exps;
    assert!(e.q_minus >= 1.5 && e.q_plus <= 1.9 && e.p_minus >= 2.5 && e.p_plus <= 3.5);
    assert_eq!(ing.metric.chart().sizes(), &[64]);
    let consts = cfg.constants(&ing).unwrap();
    let pb = ing.instance(cfg.instance.lambda.unwrap().resolve(None).unwrap()).unwrap();
    let spec = nehari::cli::config::VerifySpec {
        trials: 1000,
        derivative_trials: 100,
        ..cfg.verify.clone()
    };
    let rows = verify::run_suite(&ing, &pb, &consts, &spec, cfg.seed, Default::default()).unwrap();

    let holder: Vec<_> = rows.iter().filter(|r| r.property == "holder").collect();
    let holder_bad = holder.iter().filter(|r| !r.pass).count();
    let clause = |r: &&verify::Row| r.property.starts_with("modular:") || r.property.starts_with("weighted:");
    let lux: Vec<_> = rows.iter().filter(clause).filter(|r| r.property.contains(":luxemburg")).collect();
    let lux_worst = lux.iter().map(|r| r.lhs).fold(0.0, f64::max);
    let others: Vec<_> = rows.iter().filter(clause).filter(|r| !r.property.contains(":luxemburg")).collect();
    let worst_margin = others.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let c1 = Verdict {
        pass: holder.len() == 1000 && holder_bad == 0 && lux_worst <= LUXEMBURG_TOL && worst_margin >= CLAUSE_MARGIN,
        detail: format!(
            "{} Hölder trials, {holder_bad} violations (r_q = {:.6}); {} clause rows, worst margin {worst_margin:.3e}; worst |ρ(u/‖u‖) - 1| = {lux_worst:.2e}",
            holder.len(),
            consts.r_q,
            others.len()
        ),
    };

    let fd: Vec<_> = rows.iter().filter(|r| r.property == "gateaux-fd").collect();
    let fd_worst = fd.iter().map(|r| r.lhs / (r.rhs / FD_REL_TOL)).fold(0.0, f64::max);
    let psi: Vec<_> = rows.iter().filter(|r| r.property == "psi-gateaux").collect();
    let psi_worst = psi.iter().map(|r| r.lhs / (r.rhs / PSI_TOL)).fold(0.0, f64::max);
    let c2 = Verdict {
        pass: fd.len() == 100 && psi.len() == 100 && fd_worst <= FD_REL_TOL && psi_worst <= PSI_TOL,
        detail: format!(
            "{} pairs, worst |gateaux - fd|/(1+|gateaux|) = {fd_worst:.2e}; worst |ψ - <J'(u),u>|/(1+|ψ|) = {psi_worst:.2e}",
            fd.len()
        ),
    };
    (c1, c2)
}

fn criterion_3() -> Verdict {
    let (pb, u) = common::golden(64, 0.1);
    let roots = project(&pb, &u).unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let pass = roots.len() == 1 && (roots[0].t - golden).abs() <= GOLDEN_TOL && roots[0].class == NehariClass::Minus;
    Verdict {
        pass,
        detail: format!(
            "roots {:?}; |t* - (1+√5)/2| = {:.2e}",
            roots.iter().map(|r| (r.t, r.class)).collect::<Vec<_>>(),
            (roots[0].t - golden).abs()
        ),
    }
}

fn criterion_4() -> Verdict {
    let formula = lambda_star_star(1.0, 2.0, 2.0, 3.0, 1.0, 1.0);
    let pb = common::reference(64, 1.0, 1.0);
    let consts = estimate_constants(&pb.exps, &pb.weight, &pb.metric, 200, 42).unwrap();
    let th = thresholds(&pb, &consts);
    let count_bad = |lambda: f64| {
        let pb = pb.with_lambda(lambda).unwrap();
        let minus: Vec<_> = sample_projections(&pb, 400, 42, Kind::Full)
            .unwrap()
            .into_iter()
            .filter(|s| s.class == NehariClass::Minus)
            .take(200)
            .collect();
        let bad = minus.iter().filter(|s| !(s.energy > 0.0)).count();
        let worst = minus.iter().map(|s| s.energy).fold(f64::INFINITY, f64::min);
        (minus.len(), bad, worst)
    };
    let half = th.lambda_star_star / 2.0;
    let (n, bad, worst) = count_bad(half);
    let (n8, bad8, _) = count_bad(th.lambda_star_star / 8.0);
    Verdict {
        pass: n == 200 && bad == 0 && formula == 0.125,
        detail: format!(
            "λ** = {:.6} (c = {:.4}, D = {:.4}); at λ**/2 {bad}/{n} Minus samples have J <= 0 (min J = {worst:.3e}); \
             at λ**/8 {bad8}/{n8}; λ**(μ0=D=c=1, q=2, p=3) = {formula}",
            th.lambda_star_star, consts.c_poincare, consts.d_embed
        ),
    }
}

fn criterion_5() -> Verdict {
    let pb = common::reference(64, 4.0, 1.0);
    let consts = estimate_constants(&pb.exps, &pb.weight, &pb.metric, 200, 42).unwrap();
    let th = thresholds(&pb, &consts);
    let lambda = th.lambda_star / 2.0;
    let pb = pb.with_lambda(lambda).unwrap();
    let samples = sample_projections(&pb, 1000, 42, Kind::Full).unwrap();
    let zero = samples.iter().filter(|s| s.class == NehariClass::Zero).count();
    let closest = samples.iter().map(|s| (s.curvature / s.scale).abs()).fold(f64::INFINITY, f64::min);
    Verdict {
        pass: !th.lambda_star_clamped && zero == 0 && !samples.is_empty(),
        detail: format!(
            "μ ≡ 4, λ* = {:.4}, λ = λ*/2; 1000 fields, {} roots, {zero} Zero; min |<ψ'(u),u>|/scale = {closest:.2e}",
            th.lambda_star,
            samples.len()
        ),
    }
}

fn read_all(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap());
    }
    out
}

fn solve(config: &str, out: &Path) -> (i32, f64) {
    let t = Instant::now();
    let cfg = common::config(config);
    let code = common::cli(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    (code, t.elapsed().as_secs_f64())
}

fn criterion_6_and_8() -> (Verdict, Verdict) {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let (ref_code, ref_secs) = solve("reference.toml", &out);
    let ref_files = read_all(&out);
    let ref_json: Value = serde_json::from_slice(&ref_files["report_minus.json"]).unwrap();
    std::fs::remove_dir_all(&out).unwrap();
    let (ref_code2, _) = solve("reference.toml", &out);
    let ref_same = read_all(&out) == ref_files;
    std::fs::remove_dir_all(&out).unwrap();

    let (alt_code, alt_secs) = solve("alternate.toml", &out);
    let alt_files = read_all(&out);
    std::fs::remove_dir_all(&out).unwrap();
    let (alt_code2, _) = solve("alternate.toml", &out);
    let alt_same = read_all(&out) == alt_files;

    let plus: Value = serde_json::from_slice(&alt_files["report_plus.json"]).unwrap();
    let minus: Value = serde_json::from_slice(&alt_files["report_minus.json"]).unwrap();
    let f = |v: &Value, k: &str| v["report"][k].as_f64().unwrap_or(f64::NAN);
    let (jp, jm) = (f(&plus, "J_value"), f(&minus, "J_value"));
    let (rp, rm) = (f(&plus, "residual_norm"), f(&minus, "residual_norm"));
    let (mp, mm) = (f(&plus, "min_u"), f(&minus, "min_u"));
    let sep = minus["separation"].as_f64().unwrap_or(f64::NAN);
    let inconclusive = ref_code == 2 && ref_json["status"] == "inconclusive";
    let alt_ok = alt_code == 0
        && jp < 0.0
        && jm > 0.0
        && rp <= RESIDUAL_TOL
        && rm <= RESIDUAL_TOL
        && mp >= NONNEG_TOL
        && mm >= NONNEG_TOL
        && sep > SEPARATION_TOL
        && minus["distinct"] == true
        && alt_files.contains_key("u_plus.field")
        && alt_files.contains_key("u_minus.field");
    let c6 = Verdict {
        pass: (ref_code == 0 || inconclusive) && alt_ok && ref_secs <= SOLVE_BUDGET_S && alt_secs <= SOLVE_BUDGET_S,
        detail: format!(
            "reference λ = {:.4}: exit {ref_code} ({}), {ref_secs:.2}s; alternate λ = {:.4}: J+ = {jp:.4e}, J- = {jm:.4e}, \
             residuals {rp:.1e}/{rm:.1e}, min_u {mp:.3e}/{mm:.3e}, separation {sep:.3e}, {alt_secs:.2}s",
            ref_json["lambda"].as_f64().unwrap_or(f64::NAN),
            ref_json["status"].as_str().unwrap_or("?"),
            minus["lambda"].as_f64().unwrap_or(f64::NAN),
        ),
    };
    let c8 = Verdict {
        pass: ref_same && alt_same && ref_code == ref_code2 && alt_code == alt_code2,
        detail: format!(
            "single-thread reruns bit-identical: reference {ref_same} ({} files), alternate {alt_same} ({} files)",
            ref_files.len(),
            alt_files.len()
        ),
    };
    (c6, c8)
}

fn criterion_7() -> Verdict {
    let pb = common::reference(64, 1.0, 0.32);
    let chart = pb.chart().clone();
    let spectral = Spectral::new(chart, pb.metric.mean_inverse_diagonal());
    let band = spectral.quarter_band();
    let mut bad = 0;
    let mut min_ratio = f64::INFINITY;
    for k in 0..50 {
        let mut rng = substream(42, Stream::Directions, k);
        let z = spectral.band_limited(&mut rng, &band, None);
        let u = z.scaled(1.0 / sobolev_norm(&z, &pb.exps.p, &pb.metric).unwrap());
        let j: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&t| energy(&pb, &u.scaled(t)).unwrap().total)
            .collect();
        if !(j[1] < j[2] && j[2] > 0.0) {
            bad += 1;
        }
        min_ratio = min_ratio.min(j[2] / j[1]);
    }
    Verdict {
        pass: bad == 0,
        detail: format!("50 zero-mean unit-norm directions, {bad} violations; min J(10³u)/J(10²u) = {min_ratio:.3e}"),
    }
}

fn main() {
    let start = Instant::now();
    let (c1, c2) = criterion_1_and_2();
    let (c6, c8) = criterion_6_and_8();
    let verdicts = [
        (1, "function-space suite", c1),
        (2, "derivative consistency", c2),
        (3, "fibering oracle", criterion_3()),
        (4, "minus-branch sign at λ**/2", criterion_4()),
        (5, "no inflection points below λ*", criterion_5()),
        (6, "two-solution experiment", c6),
        (7, "coercivity witness", criterion_7()),
        (8, "determinism", c8),
    ];
    let mut failing = Vec::new();
    for (n, name, v) in &verdicts {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {n} [{tag}] {name}: {}", v.detail);
        if !v.pass {
            failing.push(*n);
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if failing != EXPECTED_FAILURES {
        eprintln!("failing criteria {failing:?}, expected {EXPECTED_FAILURES:?}");
        std::process::exit(1);
    }
}
