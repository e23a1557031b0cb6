use magic_core::model::Potential;
use magic_core::spectra::{
    band_profile, flat_band_check, k_point, magic_angles, ratio_diagnostic, refine_alpha, singular_values_at,
    MagicOptions, TraceSource,
};
use magic_core::traces::TraceTable;
use num_complex::Complex64;

fn table() -> TraceTable {
    serde_json::from_str(include_str!("data/canonical_traces.json")).unwrap()
}

#[test]
fn first_magic_angle_from_sixteen_traces() {
    let t = table();
    let set = magic_angles(&TraceSource::Exact(&t), &MagicOptions::default()).unwrap();
    let a = set.first_real().unwrap();
    assert!(a > 0.583 && a < 0.589);
    assert!((a - 0.5857).abs() < 2e-3);
    assert!(set.alphas[0].error_radius < 2e-3);
}

#[test]
fn higher_order_sharpens_the_root() {
    let t = table();
    let opts = |n| MagicOptions { trace_order: n, ..Default::default() };
    let a16 = magic_angles(&TraceSource::Exact(&t), &opts(16)).unwrap();
    let a20 = magic_angles(&TraceSource::Exact(&t), &opts(20)).unwrap();
    assert!(a20.alphas[0].error_radius < a16.alphas[0].error_radius);
    assert!((a20.first_real().unwrap() - a16.first_real().unwrap()).abs() < a16.alphas[0].error_radius);
}

#[test]
fn complex_set_is_closed_under_conjugation() {
    let t = table();
    let opts = MagicOptions { count: 6, trace_order: 20, complex: true, ..Default::default() };
    let set = magic_angles(&TraceSource::Exact(&t), &opts).unwrap();
    assert!(set.conjugation_defect() < 1e-12);
    // ±α both appear
    for a in &set.alphas {
        assert!(set.alphas.iter().any(|b| (b.value() + a.value()).norm() < 1e-12));
    }
}

#[test]
fn trace_ratios_settle() {
    let r = ratio_diagnostic(&table());
    let q8 = r.iter().find(|(l, _)| *l == 8).unwrap().1;
    assert!((q8 / 2.91507 - 1.0).abs() < 0.02);
    let last = r.last().unwrap().1;
    let a = 0.5856635583896f64;
    assert!((last - 1.0 / (a * a * a * a)).abs() / last < 1e-3 || (last * a * a - 1.0).abs() < 1e-2);
}

#[test]
fn flat_band_on_a_small_window() {
    let p = Potential::canonical();
    let k = k_point(0.3, -0.9);
    let a = refine_alpha(&p, 0.57, 0.60, k, 6, 1e-7).unwrap();
    assert!((a - 0.58566).abs() < 1e-4, "{a}");
    let flat = flat_band_check(&p, a, 3, 8).unwrap();
    assert!(flat.max_min_singular < 1e-3);
    let off = flat_band_check(&p, 0.3, 3, 8).unwrap();
    assert!(off.max_min_singular > 10.0 * flat.max_min_singular);
    let bands = band_profile(&p, a, 2, 2, 8).unwrap();
    assert!(bands.iter().all(|s| s.values[1] > 0.1));
}

#[test]
fn invalid_parameters_rejected() {
    let p = Potential::canonical();
    assert!(flat_band_check(&p, 0.5, 1, 4).is_err());
    assert!(flat_band_check(&p, 0.5, 3, 0).is_err());
    assert!(band_profile(&p, 0.5, 3, 0, 4).is_err());
    assert!(singular_values_at(&p, Complex64::new(0.5, 0.0), k_point(0.1, 0.1), 3, 2).is_ok());
}
