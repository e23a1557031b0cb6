//! One PASS/FAIL line per acceptance criterion. Failures are reported, not asserted.
//!
//! Runs without the test harness so the report is never captured.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use magic_cli::run_with;
use magic_core::exactnum::rational::{rat, to_f64};
use magic_core::exactnum::{parse_rational, CycloNum, PiPoly};
use magic_core::fredholm::{newton_elementary, plemelj_smithies};
use magic_core::model::{build_stencil, count_closed_walks, enumerate_theta, Potential};
use magic_core::spectra::{band_profile, flat_band_check, k_point, magic_angles, refine_alpha, MagicOptions, TraceSource};
use magic_core::traces::{
    residue_traces, trace_numeric, trace_oracle_walks, trace_t_even, traces_exact, TraceTable,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const TABLE: [&str; 7] = [
    "4",
    "96/7",
    "40",
    "28680/247",
    "2206080/6517",
    "1957475168/1983163",
    "39948260880/13882141",
];

type Verdict = Result<(bool, String), String>;

fn report(n: u8, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let (pass, detail) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => v,
        Ok(Err(e)) => (false, format!("error: {e}")),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    let secs = start.elapsed().as_secs_f64();
    println!(
        "criterion {n:>2}: {} ({secs:.1} s) {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn tbg(args: &[&str]) -> Result<Value, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tbg-magic").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    let text = String::from_utf8_lossy(&out);
    if code != 0 && text.is_empty() {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&err).trim()));
    }
    let v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok(v["payload"].clone())
}

fn q_strings(payload: &Value) -> Vec<String> {
    payload
        .as_array()
        .map(|a| a.iter().map(|e| e["q"].as_str().unwrap_or("").to_string()).collect())
        .unwrap_or_default()
}

fn approx(s: &Value) -> f64 {
    s.as_str().and_then(|x| parse_rational(x).ok()).map(|r| to_f64(&r)).unwrap_or(f64::NAN)
}

fn factorial(n: usize) -> BigRational {
    BigRational::from_integer((1..=n).fold(BigInt::one(), |a, k| a * k))
}

fn random_real_potential(seed: u64) -> Potential {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = || rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
    let s3 = CycloNum::sqrt3();
    let c0 = s3.scale(&r());
    let c1 = &s3.scale(&r()) * &CycloNum::omega2();
    Potential::symmetry_complete(&[((0, 0), c0), ((1, 1), c1)], true).expect("symmetric potential")
}

fn random_cyclo(rng: &mut ChaCha8Rng) -> CycloNum {
    let mut r = || rat(rng.gen_range(-9..=9), rng.gen_range(1..=6));
    CycloNum::from_coeffs([r(), r(), r(), r()])
}

fn crit1() -> Verdict {
    let p = tbg(&["traces", "--ell-max", "6"])?;
    let got = q_strings(&p);
    let want: Vec<String> = TABLE[..5].iter().map(|s| s.to_string()).collect();
    Ok((got == want, format!("q2..q6 = {}", got.join(", "))))
}

fn crit1_extended(full: &[String]) -> Verdict {
    let ok = full.len() >= 7 && full[5] == TABLE[5] && full[6] == TABLE[6];
    Ok((ok, format!("(extended, non-gating) q7 = {}, q8 = {}", full[5], full[6])))
}

fn crit2() -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, p) in [("canonical", Potential::canonical()), ("random", random_real_potential(11))] {
        let engine = traces_exact(&p, 4).map_err(|e| e.to_string())?;
        for ell in 2..=4 {
            let o = trace_oracle_walks(&p, ell).map_err(|e| e.to_string())?;
            ok &= o == engine[ell - 2];
        }
        details.push(format!("{name}: {}", engine.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")));
    }
    Ok((ok, format!("oracle = engine for ell 2..4 [{}]", details.join("; "))))
}

fn crit3() -> Verdict {
    let t = trace_t_even(&Potential::canonical(), 4).map_err(|e| e.to_string())?;
    let ok = t == PiPoly::monomial(rat(8, 1), 1);
    Ok((ok, format!("tr T^4 = {t}")))
}

fn crit4() -> Verdict {
    let p = Potential::canonical();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ks: Vec<_> = (0..3)
        .map(|_| k_point(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
        .collect();
    let pi = std::f64::consts::PI / 3f64.sqrt();
    let (mut worst_pair, mut worst_exact) = (0f64, 0f64);
    for (ell, q) in [(2usize, 4.0), (3, 96.0 / 7.0)] {
        let exact = q * pi;
        let v: Vec<_> = ks
            .iter()
            .map(|&k| trace_numeric(&p, ell, k, 60))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for i in 0..3 {
            worst_exact = worst_exact.max((v[i] - exact).norm() / exact);
            for j in i + 1..3 {
                worst_pair = worst_pair.max((v[i] - v[j]).norm() / v[i].norm());
            }
        }
    }
    Ok((
        worst_pair < 1e-8 && worst_exact < 1e-6,
        format!("max pairwise {worst_pair:.2e}, max vs exact {worst_exact:.2e}"),
    ))
}

fn crit5(t: &TraceTable) -> Verdict {
    let s: Vec<PiPoly> = (0..=10).map(|l| t.sigma(l).unwrap_or_else(PiPoly::zero)).collect();
    let det = plemelj_smithies(&s, 10);
    let mu1 = det.mu[1].is_zero();
    let mu2 = det.mu[2] == -&s[2];
    let mut p: Vec<PiPoly> = s[1..].to_vec();
    p[0] = PiPoly::zero();
    let e = newton_elementary(&p, 10);
    let mut literal_bad = Vec::new();
    let mut plain_ok = true;
    for j in 1..=10 {
        let sign = if j % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
        if det.mu[j] != e[j - 1].scale(&(&sign * &factorial(j))) {
            literal_bad.push(j.to_string());
        }
        plain_ok &= det.mu[j] == e[j - 1].scale(&factorial(j));
    }
    let literal = literal_bad.is_empty();
    Ok((
        mu1 && mu2 && literal,
        format!(
            "mu1 = 0: {mu1}; mu2 = -sigma2: {mu2}; mu_j = (-1)^j j! e_j: {} (differs at j = {}); mu_j = j! e_j for j <= 10: {plain_ok}",
            literal,
            if literal_bad.is_empty() { "none".into() } else { literal_bad.join(",") }
        ),
    ))
}

fn find<'a>(list: &'a Value, name: &str) -> Option<&'a Value> {
    list.as_array()?.iter().find(|c| c["name"] == name)
}

fn crit6(cache: &Path) -> Verdict {
    let report = cache.join("certificate.json");
    let c = tbg(&["--cache", cache.to_str().unwrap(), "certify", "--report", report.to_str().unwrap()])?;
    let line = |list: &Value, name: &str| -> (bool, String) {
        match find(list, name) {
            Some(k) => {
                let holds = k["holds"].as_bool().unwrap_or(false);
                let v = if k["relation"] == ">" { approx(&k["value"]["lo"]) } else { approx(&k["value"]["hi"]) };
                (holds, format!("[{}] {name} (value {v:.4})", if holds { "ok" } else { "FAILS" }))
            }
            None => (false, format!("[missing] {name}")),
        }
    };
    let items = [
        line(&c["checks"], "f(0.583) > 1/40"),
        line(&c["checks"], "f(0.589) < -1/40"),
        line(&c["checks"], "g(3/5) < -7/10"),
        line(&c["reference_checks"], "r0 closed form <= 1/50 at hs = 11/2"),
        line(&c["reference_checks"], "r1 closed form <= 1/2 at hs = 11/2"),
        line(&c["reference_checks"], "window bound <= 5"),
    ];
    let r0_series = line(&c["reference_checks"], "r0 series <= 1/50 at hs = 11/2");
    let r1_series = line(&c["reference_checks"], "r1 series <= 1/2 at hs = 11/2");
    let verdict = c["verdict"] == true;
    let interval_ok = approx(&c["interval"][0]) == 0.583 && approx(&c["interval"][1]) == 0.589;
    // a tail item is met if either form of the bound at hs = 11/2 holds
    let tails = (items[3].0 || r0_series.0) && (items[4].0 || r1_series.0);
    let ok = items[0].0 && items[1].0 && items[2].0 && tails && items[5].0 && verdict && interval_ok;
    let mut detail: Vec<String> = items.iter().map(|i| i.1.clone()).collect();
    detail.push(r0_series.1);
    detail.push(r1_series.1);
    detail.push(format!(
        "rigorous tails r0 <= {:.4}, r1 <= {:.4} at hs total {:.4}",
        approx(&c["tail_r0"]["hi"]),
        approx(&c["tail_r1"]["hi"]),
        approx(&c["hs_total_bound"])
    ));
    detail.push(format!("verdict {verdict}, interval (0.583, 0.589): {interval_ok}"));
    Ok((ok, detail.join("; ")))
}

fn crit7(t: &TraceTable) -> Verdict {
    let set = magic_angles(&TraceSource::Exact(t), &MagicOptions::default()).map_err(|e| e.to_string())?;
    let a = set.first_real().ok_or("no real root")?;
    let ok = a > 0.583 && a < 0.589 && (a - 0.5857).abs() < 2e-3;
    Ok((ok, format!("alpha = {a:.10}, error radius {:.1e}", set.alphas[0].error_radius)))
}

fn crit8(t: &TraceTable) -> Verdict {
    let r = to_f64(&(t.q(8).ok_or("q8 missing")? / t.q(7).ok_or("q7 missing")?));
    let dev = (r / 2.91507 - 1.0).abs();
    Ok((dev < 0.02, format!("exact q8/q7 = {r:.5} ({:.2}% from 2.91507)", 100.0 * dev)))
}

fn crit9(t: &TraceTable) -> Verdict {
    let p = Potential::canonical();
    let set = magic_angles(&TraceSource::Exact(t), &MagicOptions { trace_order: 20, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let a0 = set.first_real().ok_or("no real root")?;
    let a = refine_alpha(&p, a0 - 1e-4, a0 + 1e-4, k_point(0.3, -0.9), 10, 1e-12).map_err(|e| e.to_string())?;
    let flat = flat_band_check(&p, a, 5, 30).map_err(|e| e.to_string())?;
    let off = flat_band_check(&p, 0.3, 5, 30).map_err(|e| e.to_string())?;
    let second = band_profile(&p, a, 5, 2, 30)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|s| s.values[1])
        .fold(f64::INFINITY, f64::min);
    let ok = flat.max_min_singular < 1e-3 && off.max_min_singular > 10.0 * flat.max_min_singular && second > 0.1;
    Ok((
        ok,
        format!(
            "alpha* = {a:.10}: max s1 = {:.2e}; alpha 0.3: max s1 = {:.3}; min s2 at alpha* = {second:.3}",
            flat.max_min_singular, off.max_min_singular
        ),
    ))
}

fn crit10() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut fails = Vec::new();
    for _ in 0..64 {
        let (a, b, c) = (random_cyclo(&mut rng), random_cyclo(&mut rng), random_cyclo(&mut rng));
        let field = &(&a * &b) * &c == &a * &(&b * &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && (a.is_zero() || &a * &a.inv().unwrap() == CycloNum::one());
        let auto = (&a * &b).conj() == &a.conj() * &b.conj() && (&a + &b).conj() == &a.conj() + &b.conj();
        if !field {
            fails.push("field laws");
        }
        if !auto {
            fails.push("conjugation");
        }
    }
    for _ in 0..64 {
        let (x, y) = (rng.gen_range(-30i64..=30), rng.gen_range(-30i64..=30));
        let g = CycloNum::gamma(x, y);
        if &g * &g.conj() != CycloNum::from_int(x * x + x * y + y * y) {
            fails.push("gamma norm");
        }
    }
    for seed in 0..3 {
        let mut r = ChaCha8Rng::seed_from_u64(100 + seed);
        let (a, b) = (random_cyclo(&mut r), random_cyclo(&mut r));
        let Ok(p) = Potential::symmetry_complete(&[((0, 0), a), ((1, 1), b)], false) else {
            continue;
        };
        let st = build_stencil(&p);
        for ell in 1..=3 {
            let walks = enumerate_theta(&st, ell);
            if walks.len() as u128 != count_closed_walks(&st, ell) {
                fails.push("walk count");
            }
            for w in &walks {
                let (mut sx, mut sy, mut m) = (0i64, 0i64, 0i64);
                for &(i, j) in &w.steps {
                    let (pl, mi) = (st.plus[i as usize].shift, st.minus[j as usize].shift);
                    sx += pl.0 + mi.0;
                    sy += pl.1 + mi.1;
                    m += pl.1 + mi.0;
                }
                if (sx, sy) != (0, 0) {
                    fails.push("walk closure");
                }
                if (2 * m) % 3 != 0 || ((2 * m) / 3) % 2 != 0 {
                    fails.push("even m_pi");
                }
            }
        }
        let out = residue_traces(&p, 5);
        if !out.completeness[2..].iter().all(|(x, y)| x.is_zero() && y.is_zero()) {
            fails.push("residue completeness");
        }
    }
    let pi = std::f64::consts::PI / 3f64.sqrt();
    let base = [4.0, 96.0 / 7.0, 40.0, 28680.0 / 247.0, 2206080.0 / 6517.0, 1957475168.0 / 1983163.0, 39948260880.0 / 13882141.0];
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let mut sigma = vec![0.0; 16];
        for l in 2..16 {
            let q = if l - 2 < base.len() { base[l - 2] } else { base[6] * 2.915f64.powi(l as i32 - 8) };
            sigma[l] = q * pi * (1.0 + rng.gen_range(-5e-5..5e-5));
        }
        let opts = MagicOptions { count: 8, trace_order: 15, complex: true, ..Default::default() };
        let set = magic_angles(&TraceSource::Numeric(&sigma), &opts).map_err(|e| e.to_string())?;
        worst = worst.max(set.conjugation_defect());
    }
    if worst >= 1e-6 {
        fails.push("magic set conjugation");
    }
    fails.dedup();
    Ok((
        fails.is_empty(),
        format!(
            "field, automorphism, gamma norm, walk, residue and conjugation checks (seeded); conjugation defect {worst:.1e}; failing: {}",
            if fails.is_empty() { "none".into() } else { fails.join(", ") }
        ),
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let cache = dir.path();
    let mut results = Vec::new();

    results.push(report(1, crit1));
    let full = tbg(&["--cache", cache.to_str().unwrap(), "traces", "--ell-max", "20"]).map(|p| q_strings(&p));
    let table = full.as_ref().ok().map(|q| {
        let map = q
            .iter()
            .enumerate()
            .map(|(i, s)| (i + 2, parse_rational(s).expect("rational trace")))
            .collect();
        TraceTable::from_map(Potential::canonical().digest(), &map)
    });
    report(1, || match &full {
        Ok(q) => crit1_extended(q),
        Err(e) => Err(e.clone()),
    });
    let with_table = |f: fn(&TraceTable) -> Verdict| -> Verdict {
        match &table {
            Some(t) => f(t),
            None => Err("trace table unavailable".into()),
        }
    };
    results.push(report(2, crit2));
    results.push(report(3, crit3));
    results.push(report(4, crit4));
    results.push(report(5, || with_table(crit5)));
    results.push(report(6, || crit6(cache)));
    results.push(report(7, || with_table(crit7)));
    results.push(report(8, || with_table(crit8)));
    results.push(report(9, || with_table(crit9)));
    results.push(report(10, crit10));
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
}
