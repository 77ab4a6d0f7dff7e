use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taydom_abel::*;
use taydom_core::scalar::{int, pow_q, q_to_f64, rat};
use taydom_core::{QPoly, Rational};

#[test]
fn truncated_map_matches_integrator_to_order_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(1931);
    let ys = default_samples();
    let mut worst = f64::INFINITY;
    for i in 0..50 {
        let eq = random_equation(&mut rng, 3);
        let exp = poincare_coefficients(&eq, DEFAULT_ORDER).unwrap();
        let ag = oracle_agreement(&eq, &exp, &ys, DEFAULT_BITS).unwrap();
        assert!(ag.pass, "case {i}: slope {} ({:?})", ag.slope, ag.ln_mismatch);
        worst = worst.min(ag.slope);
    }
    assert!(worst >= DEFAULT_ORDER as f64 + 0.5);
}

#[test]
fn riccati_coefficients_are_alternating_powers() {
    let eq = AbelEquation::from_ints(&[1], &[], 0, 1).unwrap();
    let exp = poincare_coefficients(&eq, 20).unwrap();
    for k in 1..=20 {
        assert_eq!(exp.v[k], QPoly::monomial(pow_q(&int(-1), k as i64 - 1), k - 1).renamed("x"));
    }
    // G(y) = y / (1 + y) up to y^21
    let y = rat(1, 10);
    let g = return_map_eval(&exp, &int(1), &y).unwrap();
    let exact = &y / (int(1) + &y);
    assert!(q_to_f64(&(g - exact)).abs() < 1e-20);
}

#[test]
fn orientation_is_backward() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let ys = default_samples();
    for _ in 0..8 {
        let eq = random_equation(&mut rng, 3);
        let exp = poincare_coefficients(&eq, 12).unwrap();
        if exp.leading_index(&eq.b).is_none() {
            continue;
        }
        let back = oracle_agreement_with(&eq, &exp, &ys, 300, Orientation::Backward).unwrap();
        let fwd = oracle_agreement_with(&eq, &exp, &ys, 300, Orientation::Forward).unwrap();
        assert!(back.pass);
        assert!(!fwd.pass && fwd.slope < 4.0, "forward slope {}", fwd.slope);
    }
    assert_eq!(ORIENTATION, Orientation::Backward);
}

#[test]
fn integrator_group_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let eq = random_equation(&mut rng, 3);
        let c = (&eq.a + &eq.b) / int(2);
        let y0 = 0.05f64;
        let full = integrate(&eq, &eq.a, &eq.b, y0, &OdeConfig::f64(), &|v| v).unwrap();
        let half = integrate(&eq, &eq.a, &c, y0, &OdeConfig::f64(), &|v| v).unwrap();
        let composed = integrate(&eq, &c, &eq.b, half, &OdeConfig::f64(), &|v| v).unwrap();
        assert!((full - composed).abs() <= 1e-12 * full.abs());

        let yq = rat(1, 20);
        let round = |v: Rational| taydom_core::scalar::round_bits(&v, 200);
        let cfg = OdeConfig::dyadic(200);
        let full_q = integrate(&eq, &eq.a, &eq.b, yq.clone(), &cfg, &round).unwrap();
        let half_q = integrate(&eq, &eq.a, &c, yq.clone(), &cfg, &round).unwrap();
        let comp_q = integrate(&eq, &c, &eq.b, half_q, &cfg, &round).unwrap();
        let rel = q_to_f64(&((&full_q - &comp_q) / &full_q)).abs();
        assert!(rel < 1e-50, "{rel:e}");
        // the f64 path agrees with the dyadic one
        assert!((q_to_f64(&full_q) - full).abs() <= 1e-12 * full.abs());
    }
}

#[test]
fn inverse_consistency() {
    let eq = AbelEquation::from_ints(&[1, -1, 2], &[0, 1], 0, 1).unwrap();
    let y1 = ode_oracle(&eq, 0.1, Direction::Forward).unwrap();
    let back = ode_oracle(&eq, y1, Direction::Backward).unwrap();
    assert!((back - 0.1).abs() < 1e-13);
}

#[test]
fn fixed_points_at_small_radius_equal_leading_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let eq = random_equation(&mut rng, 3);
        let exp = poincare_coefficients(&eq, DEFAULT_ORDER).unwrap();
        let c = displacement_coefficients(&exp, &eq.b);
        let Some(m) = exp.leading_index(&eq.b) else { continue };
        // nonzero roots of sum_{k>=m} c_k y^{k-m} satisfy |y| >= |c_m| / (|c_m| + max |c_k|)
        let cm = q_to_f64(&c[m]).abs();
        let mx = c[m + 1..].iter().map(|v| q_to_f64(v).abs()).fold(0.0, f64::max);
        let r = 0.5 * cm / (cm + mx);
        let rep = fixed_point_count(&exp, &eq.b, r).unwrap();
        let zc = rep.count.unwrap();
        assert!(zc.reliable);
        assert_eq!(zc.count, m);
        assert_eq!(rep.leading_index, Some(m));
    }
}

fn arb_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 0..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expansion_identity_and_degrees(p in arb_poly(), q in arb_poly(), a in -2i64..=2) {
        let eq = AbelEquation::from_ints(&p, &q, a, a + 1).unwrap();
        let exp = poincare_coefficients(&eq, 15).unwrap();
        prop_assert!(exp.check_identity(&eq).is_ok());
        let step = eq.max_degree() + 1;
        for (k, d) in exp.degrees().iter().enumerate().skip(1) {
            if let Some(d) = d {
                prop_assert!(*d <= (k - 1) * step);
            }
        }
        // v_k vanishes at the left endpoint in original coordinates
        for k in 2..=15 {
            prop_assert_eq!(exp.v_original(k).eval(&eq.a), int(0));
        }
    }

    #[test]
    fn moments_in_original_coordinates(p in arb_poly(), q in arb_poly(), a in -2i64..=2) {
        let eq = AbelEquation::from_ints(&p, &q, a, a + 2).unwrap();
        let m = moment_like(&eq, 6).values;
        let big_p = primitive(&eq);
        let mut pk = QPoly::one().renamed("x");
        for mk in m.iter().take(7) {
            let anti = (&pk * &eq.q).antiderivative();
            prop_assert_eq!(mk.clone(), anti.eval(&eq.b) - anti.eval(&eq.a));
            pk = &pk * &big_p;
        }
    }

    #[test]
    fn zero_is_invariant(p in arb_poly(), q in arb_poly()) {
        let eq = AbelEquation::from_ints(&p, &q, 0, 1).unwrap();
        prop_assert_eq!(ode_oracle(&eq, 0.0, Direction::Forward).unwrap(), 0.0);
        let exp = poincare_coefficients(&eq, 8).unwrap();
        prop_assert_eq!(return_map_eval(&exp, &eq.b, &Rational::from_integer(0.into())).unwrap(), int(0));
    }
}
