use magic_core::exactnum::rational::rat;
use magic_core::exactnum::{pi_over_sqrt3, CycloNum, LaurentSeries, PiPoly, RatInterval};
use magic_core::model::{build_stencil, count_closed_walks, enumerate_theta, Potential};
use magic_core::spectra::{magic_angles, MagicOptions, TraceSource};
use magic_core::traces::residue_traces;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-12i64..=12, 1i64..=7).prop_map(|(p, q)| rat(p, q))
}

fn cyclo() -> impl Strategy<Value = CycloNum> {
    [small_rat(), small_rat(), small_rat(), small_rat()].prop_map(CycloNum::from_coeffs)
}

fn interval() -> impl Strategy<Value = (RatInterval, BigRational)> {
    (small_rat(), small_rat(), 0u32..=8).prop_map(|(a, w, t)| {
        let w = if w < rat(0, 1) { -w } else { w };
        let lo = a.clone();
        let hi = &a + &w;
        let x = &lo + &(&w * &rat(t as i64, 8));
        (RatInterval::new(lo, hi).unwrap(), x)
    })
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn field_laws(a in cyclo(), b in cyclo(), c in cyclo()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), CycloNum::one());
        }
    }

    #[test]
    fn conjugation_is_an_automorphism(a in cyclo(), b in cyclo()) {
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &a.conj()).is_real(), true);
    }

    #[test]
    fn interval_ops_contain_exact_results((i, x) in interval(), (j, y) in interval(), e in 0u32..5) {
        prop_assert!((&i + &j).contains(&(&x + &y)));
        prop_assert!((&i - &j).contains(&(&x - &y)));
        prop_assert!((&i * &j).contains(&(&x * &y)));
        prop_assert!(i.pow(e).contains(&x.pow(e as i32)));
        if !j.contains(&rat(0, 1)) {
            prop_assert!(j.recip().unwrap().contains(&(rat(1, 1) / &y)));
        }
    }

    #[test]
    fn pipoly_enclosure_contains_rational_evaluation(c0 in small_rat(), c1 in small_rat(), c2 in small_rat(), t in 0i64..=10) {
        let p = PiPoly::new(vec![c0.clone(), c1.clone(), c2.clone()]);
        let pi = pi_over_sqrt3();
        let x = &pi.lo + &(&pi.width() * &rat(t, 10));
        let exact = &c0 + &(&c1 * &x) + &c2 * &x * &x;
        prop_assert!(p.eval_interval(&pi).contains(&exact));
    }

    #[test]
    fn laurent_residues_match_partial_fractions(a in proptest::collection::vec(small_rat(), 1..5)) {
        prop_assume!(a.iter().all(|x| *x != rat(0, 1)));
        let w = 4;
        let pole = LaurentSeries::inverse_linear(&CycloNum::zero(), w).unwrap();
        let mut f = pole.clone();
        let mut prod = rat(1, 1);
        let mut recip_sum = rat(0, 1);
        for x in &a {
            f = f.mul(&LaurentSeries::inverse_linear(&CycloNum::from_rational(x.clone()), w).unwrap());
            prod = prod / x;
            recip_sum = recip_sum + rat(1, 1) / x;
        }
        // Res_{t=0} 1/t · Π 1/(t+a) = Π 1/a
        prop_assert_eq!(f.residue().unwrap(), CycloNum::from_rational(prod.clone()));
        // Res_{t=0} 1/t² · Π 1/(t+a) = −Σ(1/a) · Π 1/a
        let g = f.mul(&pole);
        prop_assert_eq!(g.residue().unwrap(), CycloNum::from_rational(-(recip_sum * prod)));
    }
}

proptest! {
    #![proptest_config(config(441))]

    #[test]
    fn gamma_norm(a in -20i64..=20, b in -20i64..=20) {
        let g = CycloNum::gamma(a, b);
        prop_assert_eq!(&g * &g.conj(), CycloNum::from_int(a * a + a * b + b * b));
    }
}

/// Six-mode potential from two random rotation orbits.
fn random_potential() -> impl Strategy<Value = Potential> {
    (cyclo(), cyclo()).prop_filter_map("degenerate orbit", |(a, b)| {
        if a.is_zero() || b.is_zero() {
            return None;
        }
        Potential::symmetry_complete(&[((0, 0), a), ((1, 1), b)], false).ok()
    })
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn walk_invariants(p in random_potential(), ell in 1usize..=3) {
        let st = build_stencil(&p);
        let walks = enumerate_theta(&st, ell);
        prop_assert_eq!(walks.len() as u128, count_closed_walks(&st, ell));
        for w in &walks {
            prop_assert_eq!(w.a_sites[0], (0, 0));
            let (mut sx, mut sy, mut m) = (0i64, 0i64, 0i64);
            for &(i, j) in &w.steps {
                let (pl, mi) = (st.plus[i as usize].shift, st.minus[j as usize].shift);
                sx += pl.0 + mi.0;
                sy += pl.1 + mi.1;
                m += pl.1 + mi.0;
            }
            prop_assert_eq!((sx, sy), (0, 0));
            // m_π = (2/3)Σ(γ_i + β_i) is an even integer
            prop_assert_eq!((2 * m) % 3, 0);
            prop_assert_eq!(((2 * m) / 3) % 2, 0);
        }
    }

    #[test]
    fn residue_completeness(p in random_potential()) {
        let out = residue_traces(&p, 5);
        for (a, b) in &out.completeness[2..] {
            prop_assert!(a.is_zero() && b.is_zero());
        }
    }

    #[test]
    fn magic_set_is_conjugation_symmetric(d in proptest::collection::vec(-0.05f64..0.05, 14)) {
        let table = [4.0, 96.0 / 7.0, 40.0, 28680.0 / 247.0, 2206080.0 / 6517.0,
            1957475168.0 / 1983163.0, 39948260880.0 / 13882141.0];
        let pi = std::f64::consts::PI / 3f64.sqrt();
        let mut sigma = vec![0.0; 16];
        for l in 2..16 {
            // extend with the asymptotic ratio beyond the tabulated orders
            let q = if l - 2 < table.len() { table[l - 2] } else { table[6] * 2.915f64.powi(l as i32 - 8) };
            sigma[l] = q * pi * (1.0 + d[l - 2] * 1e-3);
        }
        let opts = MagicOptions { count: 8, trace_order: 15, complex: true, ..Default::default() };
        let set = magic_angles(&TraceSource::Numeric(&sigma), &opts).unwrap();
        prop_assert!(!set.alphas.is_empty());
        prop_assert!(set.conjugation_defect() < 1e-9, "{}", set.conjugation_defect());
    }
}
