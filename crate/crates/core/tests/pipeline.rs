use num_complex::Complex64;
use taydom_core::domination::{cert_bounded, cert_poincare, cert_trivial, cert_turan, verify};
use taydom_core::recurrence::radius_estimate;
use taydom_core::scalar::{int, q_to_f64, rat};
use taydom_core::zeros::{count_zeros, zero_bound};
use taydom_core::{IndexLaw, QSequence, Rational, RecurrenceSpec};

fn tribonacci() -> RecurrenceSpec {
    RecurrenceSpec::constant(vec![int(1), int(1), int(1)]).unwrap()
}

#[test]
fn exact_and_float_runs_agree() {
    let spec = tribonacci();
    let q: QSequence = spec.generate(&[int(0), int(0), int(1)], 120).unwrap();
    let f = spec.generate(&[0.0f64, 0.0, 1.0], 120).unwrap();
    let s = spec.generate(&[0.0f32, 0.0, 1.0], 60).unwrap();
    for k in 0..=120 {
        let exact = q_to_f64(&q.values[k]);
        assert!((f.values[k] - exact).abs() <= 1e-12 * exact.abs().max(1.0));
    }
    for k in 0..=60 {
        let exact = q_to_f64(&q.values[k]);
        assert!(((s.values[k] as f64) - exact).abs() <= 1e-5 * exact.abs().max(1.0));
    }
}

#[test]
fn every_constructor_passes_on_its_own_recurrence() {
    let spec = RecurrenceSpec::new(
        vec![int(2), rat(-1, 2), int(1)],
        vec![IndexLaw::harmonic(int(1)), IndexLaw::Zero, IndexLaw::dyadic_decay(int(3))],
    )
    .unwrap();
    let seq = spec.generate(&[int(1), int(-2), int(3)], 250).unwrap();
    for cert in [cert_bounded(&spec, &[]).unwrap(), cert_poincare(&spec).unwrap()] {
        let rep = verify(&seq.values, &cert, 250).unwrap();
        assert!(rep.pass, "{:?} failed at {:?}", cert.method, rep.first_failure);
    }
    let c = cert_turan(&tribonacci()).unwrap();
    let t = tribonacci().generate(&[int(1), int(0), int(0)], 250).unwrap();
    assert!(verify(&t.values, &c, 250).unwrap().pass);
}

#[test]
fn complex_sequences_verify() {
    let spec = RecurrenceSpec::constant(vec![int(0), int(-1)]).unwrap();
    let seq = spec
        .generate(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)], 100)
        .unwrap();
    let c = cert_turan(&spec).unwrap();
    assert!(verify(&seq.values, &c, 100).unwrap().pass);
}

#[test]
fn trivial_radius_tracks_estimate() {
    let seq = tribonacci().generate(&[int(0), int(0), int(1)], 400).unwrap();
    let est = radius_estimate(&seq, 200, None).unwrap();
    let tau = 1.839_286_755_214_161;
    assert!((est.estimate - tau).abs() < 1e-3 * tau);
    let r: Rational = rat(1, 2);
    let cert = cert_trivial(&seq, &r).unwrap();
    assert_eq!(cert.n, 2);
    assert!(verify(&seq.values, &cert, 400).unwrap().pass);
}

#[test]
fn zero_bound_agrees_with_counts() {
    // 1/(1 - z - z^2) has no zeros; certificate from the Turan constructor
    let fib = RecurrenceSpec::constant(vec![int(1), int(1)]).unwrap();
    let seq = fib.generate(&[int(1), int(1)], 80).unwrap();
    let cert = cert_turan(&fib).unwrap();
    let r = q_to_f64(&cert.r);
    let mut last_certified = None;
    for i in 1..40 {
        let rp = r * i as f64 / 40.0;
        let z = zero_bound(&cert, &seq.values, rp).unwrap();
        if z.certified {
            last_certified = Some(rp);
            let cnt = count_zeros(&seq.values, rp, None).unwrap();
            assert!(cnt.count <= cert.n);
        } else {
            // once lost, never regained at larger R'
            assert!(last_certified.is_none_or(|l| l < rp));
        }
    }
    assert!(last_certified.is_some());
}
