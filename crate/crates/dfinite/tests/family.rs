use num_complex::Complex64;
use num_traits::{Signed, Zero};
use taydom_core::domination::verify;
use taydom_core::recurrence::radius_estimate;
use taydom_core::roots::roots_exact;
use taydom_core::scalar::{int, pow_q, q_to_f64, rat};
use taydom_core::{CoefficientSequence, Rational};
use taydom_dfinite::*;

#[test]
fn direct_moment_examples() {
    let fam = test_family();
    let get = |name: &str| fam.iter().find(|c| c.name == name).unwrap().clone();
    let m = direct_moments(&get("constant").g, 20).unwrap().values.values;
    assert!((0..=20).all(|k| m[k] == rat(1, k as i64 + 1)));
    let m = direct_moments(&get("identity").g, 20).unwrap().values.values;
    assert!((0..=20).all(|k| m[k] == rat(1, k as i64 + 2)));
    let m = direct_moments(&get("step").g, 20).unwrap().values.values;
    let half = rat(1, 2);
    assert!((0..=20i64).all(|k| m[k as usize] == (int(1) - pow_q(&half, k + 1)) / int(k + 1)));
}

#[test]
fn family_is_annihilated() {
    let fam = test_family();
    assert!(fam.len() >= 10);
    assert!(fam.iter().filter(|c| c.g.breaks.len() > 2).count() >= 3);
    for c in &fam {
        assert!(c.g.annihilated_by(&c.op), "{}", c.name);
        for b in &c.basis {
            assert!(c.op.apply(b).is_zero(), "{}", c.name);
        }
    }
}

#[test]
fn master_oracle_and_companion_residual() {
    for c in test_family() {
        let pw = c.g.boundary_data(c.op.order()).unwrap();
        let rec = moment_recurrence(&c.op);
        let eps = epsilon_rule(&c.op, &pw);
        let m = direct_moments(&c.g, 110).unwrap().values.values;
        let res = recurrence_residuals(&rec, &eps, &m, 100);
        assert_eq!(res.len(), 101, "{}", c.name);
        assert!(res.iter().all(|r| r.is_zero()), "{}", c.name);
        for k in 0..=100 {
            assert_eq!(eps.eval(k), epsilon_direct(&c.op, &pw, k), "{} k={k}", c.name);
        }
        let sys = companion_system(&c.op, &pw);
        assert_eq!(sys.dim() as i64, c.op.alpha() + c.op.order() as i64 + pw.tau(c.op.order()) as i64);
        for k in 0..=100 {
            let r = sys.step_residual(k, &m).unwrap();
            assert!(r.iter().all(|v| v.is_zero()), "{} k={k}", c.name);
        }
    }
}

#[test]
fn spectrum_matches_singular_and_jump_points() {
    for c in test_family() {
        let pw = c.g.boundary_data(c.op.order()).unwrap();
        let sys = companion_system(&c.op, &pw);
        assert!(sys.poincare, "{}", c.name);
        assert_eq!(sys.charpoly(), sys.expected_charpoly(&c.op), "{}", c.name);
        let ev = sys.eigenvalues().unwrap();
        let mut expected: Vec<Complex64> = Vec::new();
        let n = c.op.order();
        if c.op.leading_degree() > 0 {
            expected.extend(roots_exact(c.op.p(n)).unwrap().expanded());
        }
        for x in pw.points() {
            for _ in 0..n {
                expected.push(Complex64::new(q_to_f64(x), 0.0));
            }
        }
        let got = ev.expanded();
        assert_eq!(got.len(), expected.len(), "{}", c.name);
        for z in &expected {
            let near = got.iter().map(|g| (g - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(near <= 1e-8, "{}: {z} missing", c.name);
        }
    }
}

#[test]
fn vanishing_bound_holds_on_solution_families() {
    for c in test_family() {
        let pw = c.g.boundary_data(c.op.order()).unwrap();
        let vb = vanishing_bound(&c.op, &pw, true).unwrap();
        let (rank, dim) = moment_map_rank(&c.g.breaks, &c.basis, vb.bound);
        assert_eq!(rank, dim, "{}: bound {} leaves a nonzero member with vanishing moments", c.name, vb.bound);
    }
}

#[test]
fn stieltjes_certificates() {
    let mut sharp = 0;
    for c in test_family() {
        let pw = c.g.boundary_data(c.op.order()).unwrap();
        let seq = direct_moments(&c.g, 300).unwrap().values;
        let cert = stieltjes_certificate(&c.op, &pw, &seq).unwrap();
        assert!(verify(&seq.values, &cert, 300).unwrap().pass, "{}", c.name);
        let rs = q_to_f64(&r_star(&c.op, &pw).unwrap());
        let est = radius_estimate(&seq, 150, None).unwrap();
        if c.sharp_radius {
            sharp += 1;
            assert!((est.estimate * rs - 1.0).abs() < 0.02, "{}: {} vs {}", c.name, 1.0 / est.estimate, rs);
        } else {
            // R* is only a lower bound on the radius
            assert!(1.0 / est.estimate >= rs * 0.98, "{}", c.name);
        }
    }
    assert!(sharp >= 5);
}

#[test]
fn half_support_radius_is_two() {
    let c = test_family().into_iter().find(|c| c.name == "half-support").unwrap();
    let pw = c.g.boundary_data(1).unwrap();
    assert_eq!(r_star(&c.op, &pw).unwrap(), int(2));
}

#[test]
fn exponential_member_satisfies_recurrence_within_error() {
    let (op, g) = exponential_case();
    assert!(g.annihilated_by(&op));
    assert!(!op.regular_at_infinity());
    let pw = g.boundary_data(1).unwrap();
    let dm = direct_moments(&g, 60).unwrap();
    let rec = moment_recurrence(&op);
    let eps = epsilon_rule(&op, &pw);
    // the recurrence is linear in m with |q_l(k)| <= k + 2, and eps carries
    // the rounding of e
    let tol = &dm.error_bound * int(200) + Rational::new(1.into(), num_bigint::BigInt::from(1) << 150usize);
    for (k, r) in recurrence_residuals(&rec, &eps, &dm.values.values, 50).iter().enumerate() {
        assert!(r.abs() <= tol, "k={k}: {}", q_to_f64(r));
    }
    // m_0 = e - 1
    assert!((q_to_f64(&dm.values.values[0]) - (std::f64::consts::E - 1.0)).abs() < 1e-15);
    assert!(stieltjes_certificate(&op, &pw, &dm.values).is_err());
}

#[test]
fn radius_law_on_companion_states() {
    for c in test_family() {
        let pw = c.g.boundary_data(c.op.order()).unwrap();
        let sys = companion_system(&c.op, &pw);
        let m = direct_moments(&c.g, 520).unwrap().values.values;
        let norms: Vec<f64> = (0..=500).map(|k| family::ln_state_norm(&sys.state(k, &m).unwrap()).exp()).collect();
        let seq = CoefficientSequence::external(norms, c.name);
        let moduli: Vec<f64> = sys.eigenvalues().unwrap().moduli();
        let est = radius_estimate(&seq, 250, Some(&moduli)).unwrap();
        let ok = est.eventually_zero || moduli.iter().any(|&r| (est.estimate - r).abs() <= 0.02 * r.max(1e-300));
        assert!(ok, "{}: {} vs {:?}", c.name, est.estimate, moduli);
    }
}
