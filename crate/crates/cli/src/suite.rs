//! Randomized and family-based batteries, one per acceptance criterion.

use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use taydom_abel as abel;
use taydom_bautin as bautin;
use taydom_core::domination::{
    cert_bounded, cert_bounded_pair, cert_poincare, cert_poincare_delta, cert_turan, verify,
};
use taydom_core::recurrence::radius_estimate;
use taydom_core::roots::roots_exact;
use taydom_core::scalar::{int, pow_q, q_to_f64};
use taydom_core::zeros::{count_zeros, zero_bound};
use taydom_core::{
    CoefficientSequence, DominationCertificate, Dyadic, QPoly, Rational, RecurrenceSpec, SRule, Scalar,
};
use taydom_dfinite as dfinite;

use crate::random;

/// Verification horizon of the soundness batteries.
pub const HORIZON: usize = 300;
/// Index at which radius estimates are read.
pub const RADIUS_INDEX: usize = 500;
/// Relative tolerance of the radius law and the Stieltjes radius.
pub const RADIUS_TOL: f64 = 0.02;
/// Trailing terms fitted by the radius law. A long window separates the
/// `k` and `ln k` terms of the envelope fit; over `[K/2, K]` they are nearly
/// collinear and oscillation noise leaks into the slope.
pub const RADIUS_WINDOW: usize = 450;
/// Bits of the floating runs behind the radius law.
pub const RADIUS_BITS: u32 = 256;
/// Fractions `R'/R` tried by the zero-bound cross-check.
pub const ZERO_FRACTIONS: [f64; 2] = [0.01, 0.25];

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "Turan soundness"),
    (2, "bounded-class soundness"),
    (3, "Poincare-class soundness"),
    (4, "radius law"),
    (5, "D-finite master oracle"),
    (6, "vanishing-moment bound"),
    (7, "Stieltjes certificate"),
    (8, "Bautin witnesses"),
    (9, "Abel consistency"),
    (10, "zero-bound soundness"),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub pass: bool,
    pub detail: String,
    /// First few failure messages.
    #[serde(default)]
    pub examples: Vec<String>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<26} {}  ({} cases, {} failures) {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.cases,
            self.failures,
            self.detail
        )
    }
}

/// Zero-bound cross-checks gathered from every certificate the batteries
/// build with a summable rule.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroChecks {
    pub attempts: usize,
    pub certified: usize,
    pub agreed: usize,
    pub violations: usize,
    /// Certified, but the count itself was unreliable or hit the contour.
    pub inconclusive: usize,
    #[serde(default)]
    pub examples: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Multiplies every case count; 1.0 is the full battery.
    pub scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, scale: 1.0 }
    }
}

impl SuiteConfig {
    fn count(&self, n: usize) -> usize {
        ((n as f64 * self.scale).ceil() as usize).max(1)
    }
}

struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, label: impl FnOnce() -> String, r: Result<(), String>) {
        self.cases += 1;
        if let Err(e) = r {
            self.failures.push(format!("{}: {e}", label()));
        }
    }

    fn finish(self, id: u8, extra_ok: bool, detail: String) -> CriterionResult {
        let name = CRITERIA[id as usize - 1].1.to_string();
        CriterionResult {
            id,
            name,
            cases: self.cases,
            failures: self.failures.len(),
            pass: self.failures.is_empty() && extra_ok,
            detail,
            examples: self.failures.into_iter().take(5).collect(),
        }
    }
}

pub struct Suite {
    pub cfg: SuiteConfig,
    pub zeros: ZeroChecks,
}

impl Suite {
    pub fn new(cfg: SuiteConfig) -> Self {
        Suite {
            cfg,
            zeros: ZeroChecks::default(),
        }
    }

    fn rng(&self, id: u8) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_mul(1_000_003).wrapping_add(id as u64))
    }

    /// Runs the listed criteria in order (all when empty), calling `each`
    /// after every one.
    pub fn run(&mut self, only: &[u8], mut each: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
        let mut out = Vec::new();
        for (id, _) in CRITERIA {
            if !only.is_empty() && !only.contains(&id) {
                continue;
            }
            let r = self.criterion(id);
            each(&r);
            out.push(r);
        }
        out
    }

    pub fn criterion(&mut self, id: u8) -> CriterionResult {
        match id {
            1 => self.turan(),
            2 => self.bounded(),
            3 => self.poincare(),
            4 => self.radius_law(),
            5 => master_oracle(),
            6 => vanishing(),
            7 => stieltjes(),
            8 => self.bautin(),
            9 => self.abel(),
            10 => self.zero_bound(),
            _ => panic!("no criterion {id}"),
        }
    }

    /// Verifies `cert` on the exact sequence to [`HORIZON`] and feeds the
    /// zero-bound cross-check.
    fn sound(&mut self, spec: &RecurrenceSpec, init: &[Rational], cert: &DominationCertificate) -> Result<f64, String> {
        let seq = spec.generate(init, HORIZON).map_err(|e| e.to_string())?;
        let rep = verify(&seq.values, cert, HORIZON).map_err(|e| e.to_string())?;
        if !rep.pass {
            return Err(format!(
                "{:?} certificate fails at k = {:?} (worst ratio {:.3e})",
                cert.method,
                rep.first_failure,
                rep.worst_ratio()
            ));
        }
        self.cross_check_zeros(cert, &seq.values);
        Ok(rep.worst_log_ratio.unwrap_or(f64::NEG_INFINITY))
    }

    fn cross_check_zeros<T: Scalar>(&mut self, cert: &DominationCertificate, values: &[T]) {
        if !matches!(cert.s_rule, SRule::Constant { .. } | SRule::Turan { .. }) || cert.n >= values.len() {
            return;
        }
        let r = q_to_f64(&cert.r);
        for frac in ZERO_FRACTIONS {
            let rp = r * frac;
            let Ok(zb) = zero_bound(cert, values, rp) else { continue };
            self.zeros.attempts += 1;
            if !zb.certified {
                continue;
            }
            self.zeros.certified += 1;
            match count_zeros(values, rp, None) {
                Ok(c) if c.reliable => {
                    if c.count <= cert.n {
                        self.zeros.agreed += 1;
                    } else {
                        self.zeros.violations += 1;
                        if self.zeros.examples.len() < 5 {
                            self.zeros.examples.push(format!(
                                "{:?} N = {} at R' = {rp:.4e}: counted {}",
                                cert.method, cert.n, c.count
                            ));
                        }
                    }
                }
                _ => self.zeros.inconclusive += 1,
            }
        }
    }

    fn turan(&mut self) -> CriterionResult {
        let mut rng = self.rng(1);
        let mut t = Tally::new();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..self.cfg.count(500) {
            let spec = random::constant_spec(&mut rng, 5);
            let init = random::random_init(&mut rng, spec.d());
            let r = cert_turan(&spec)
                .map_err(|e| e.to_string())
                .and_then(|c| self.sound(&spec, &init, &c))
                .map(|w| worst = worst.max(w));
            t.record(|| format!("case {i} {:?}", spec.constant_part), r);
        }
        t.finish(1, true, format!("max ratio {:.4}", worst.exp()))
    }

    fn bounded(&mut self) -> CriterionResult {
        let mut rng = self.rng(2);
        let mut t = Tally::new();
        for i in 0..self.cfg.count(500) {
            let spec = random::bounded_spec(&mut rng, 5);
            let init = random::random_init(&mut rng, spec.d());
            let b = spec.declared_bounds.clone().expect("declared");
            let r = cert_bounded_pair(spec.d(), &b.k, &b.rho)
                .map_err(|e| e.to_string())
                .and_then(|c| self.sound(&spec, &init, &c))
                .and_then(|_| cert_bounded(&spec, &[]).map_err(|e| e.to_string()))
                .and_then(|c| self.sound(&spec, &init, &c))
                .map(|_| ());
            t.record(|| format!("case {i}"), r);
        }
        t.finish(2, true, "declared and grid-optimised pairs".into())
    }

    fn poincare(&mut self) -> CriterionResult {
        let mut rng = self.rng(3);
        let mut t = Tally::new();
        let mut max_n = 0;
        for i in 0..self.cfg.count(300) {
            let spec = random::poincare_spec(&mut rng, 5, false);
            let init = random::random_init(&mut rng, spec.d());
            let r = cert_poincare(&spec)
                .map_err(|e| e.to_string())
                .and_then(|c| {
                    max_n = max_n.max(c.n);
                    self.sound(&spec, &init, &c)
                })
                .map(|_| ());
            t.record(|| format!("case {i}"), r);
        }
        let delta_cases = self.cfg.count(100);
        for i in 0..delta_cases {
            let spec = random::delta_spec(&mut rng, 5);
            let init = random::random_init(&mut rng, spec.d());
            let r = cert_poincare_delta(&spec)
                .map_err(|e| e.to_string())
                .and_then(|c| self.sound(&spec, &init, &c))
                .map(|_| ());
            t.record(|| format!("delta case {i}"), r);
        }
        t.finish(3, true, format!("{delta_cases} of them delta_k = 1/k, largest N {max_n}"))
    }

    fn radius_law(&mut self) -> CriterionResult {
        let mut rng = self.rng(4);
        let mut t = Tally::new();
        let mut worst_gap: f64 = 0.0;
        let mut flagged = 0;
        for i in 0..self.cfg.count(100) {
            let spec = random::poincare_spec(&mut rng, 4, true);
            let init = random::random_init(&mut rng, spec.d());
            let r = Dyadic::with_precision(RADIUS_BITS, || {
                let init: Vec<Dyadic> = init.iter().map(Dyadic::from_rational).collect();
                let seq = spec.generate(&init, RADIUS_INDEX).map_err(|e| e.to_string())?;
                radius_estimate(&seq, RADIUS_WINDOW, None).map_err(|e| e.to_string())
            })
            .and_then(|est| {
                if est.eventually_zero {
                    flagged += 1;
                    return Ok(());
                }
                let gap = est.gap.unwrap_or(f64::INFINITY);
                worst_gap = worst_gap.max(gap);
                if gap <= RADIUS_TOL {
                    Ok(())
                } else {
                    Err(format!("estimate {} vs nearest modulus {:?}", est.estimate, est.nearest_modulus))
                }
            });
            t.record(|| format!("spec {i} {:?}", spec.constant_part), r);
        }
        let mut systems: Vec<(String, dfinite::DifferentialOperator, dfinite::TestFunction)> = dfinite::test_family()
            .into_iter()
            .map(|c| (c.name.to_string(), c.op, c.g))
            .collect();
        while systems.len() < 20 {
            let (op, g) = random::dfinite_case(&mut rng);
            systems.push((format!("random-{}", systems.len()), op, g));
        }
        for (name, op, g) in &systems {
            let r = companion_radius(op, g).map(|gap| worst_gap = worst_gap.max(gap));
            t.record(|| format!("system {name}"), r);
        }
        t.finish(
            4,
            true,
            format!("{} systems, worst gap {:.2e}, {flagged} eventually zero", systems.len(), worst_gap),
        )
    }

    fn bautin(&mut self) -> CriterionResult {
        let mut rng = self.rng(8);
        let mut t = Tally::new();
        let mut linear = 0;
        for i in 0..self.cfg.count(200) {
            let cfg = bautin::RandomConfig::draw(&mut rng, BAUTIN_K, i % 2 == 0);
            let (rec, init) = bautin::random_case(&mut rng, &cfg);
            linear += rec.linear as usize;
            t.record(|| format!("case {i} (d = {}, n = {})", cfg.d, cfg.nvars), bautin_case(&rec, &init));
        }
        t.finish(8, true, format!("k <= {BAUTIN_K}, {linear} linear"))
    }

    fn abel(&mut self) -> CriterionResult {
        let mut rng = self.rng(9);
        let mut t = Tally::new();
        let ys = abel::default_samples();
        let mut worst = f64::INFINITY;
        for i in 0..self.cfg.count(50) {
            let eq = abel::random_equation(&mut rng, 3);
            let r = abel::poincare_coefficients(&eq, abel::DEFAULT_ORDER)
                .and_then(|exp| abel::oracle_agreement(&eq, &exp, &ys, abel::DEFAULT_BITS))
                .map_err(|e| e.to_string())
                .and_then(|ag| {
                    worst = worst.min(ag.slope);
                    if ag.pass {
                        Ok(())
                    } else {
                        Err(format!("slope {:.2}", ag.slope))
                    }
                });
            t.record(|| format!("equation {i}"), r);
        }
        t.record(|| "p = 1, q = 0 closed form".into(), riccati_closed_form());
        t.finish(9, true, format!("K = {}, smallest slope {worst:.2}", abel::DEFAULT_ORDER))
    }

    fn zero_bound(&mut self) -> CriterionResult {
        if self.zeros.attempts == 0 {
            // run on its own: a dedicated sweep of constant-coefficient specs
            let mut rng = self.rng(10);
            for _ in 0..self.cfg.count(100) {
                let spec = random::constant_spec(&mut rng, 5);
                let init = random::random_init(&mut rng, spec.d());
                if let Ok(c) = cert_turan(&spec) {
                    let _ = self.sound(&spec, &init, &c);
                }
            }
        }
        let mut t = Tally::new();
        t.record(|| "geometric series".into(), geometric_zero_bound());
        for e in &self.zeros.examples {
            t.failures.push(e.clone());
        }
        let z = &self.zeros;
        let ok = z.violations == 0 && z.certified > 0;
        t.cases += z.certified;
        let mut r = t.finish(
            10,
            ok,
            format!(
                "{} attempts, {} certified, {} agreed, {} inconclusive",
                z.attempts, z.certified, z.agreed, z.inconclusive
            ),
        );
        r.failures = r.failures.max(z.violations);
        r
    }
}

/// Horizon of the Bautin battery.
pub const BAUTIN_K: usize = 30;

/// Witness identity, degree bounds, `deg a_k <= k` and the coefficient
/// recurrence on the linear subclass, and the `A_0` profile.
pub fn bautin_case(rec: &bautin::ParametricRecurrence, init: &[taydom_core::QMultiPoly]) -> Result<(), String> {
    let ps = bautin::generate_parametric(rec, init, BAUTIN_K).map_err(|e| e.to_string())?;
    let w = bautin::ideal_witness(rec, init, BAUTIN_K).map_err(|e| e.to_string())?;
    w.check(&ps.terms).map_err(|e| e.to_string())?;
    let degs: Vec<Option<u32>> = init.iter().map(|a| a.degree()).collect();
    let bounds = rec.degree_bounds(&degs, BAUTIN_K);
    for k in 0..=BAUTIN_K {
        if let Some(dk) = ps.degrees[k] {
            if bounds[k].is_none_or(|b| dk > b) {
                return Err(format!("degree {dk} of a_{k} exceeds bound {:?}", bounds[k]));
            }
        }
    }
    if rec.linear {
        if let Some(k) = (0..=BAUTIN_K).find(|&k| ps.degrees[k].is_some_and(|d| d as usize > k)) {
            return Err(format!("deg a_{k} > {k} on the linear subclass"));
        }
        let chk = bautin::coefficient_recurrence_check(&ps).map_err(|e| e.to_string())?;
        if !chk.exact() {
            return Err(format!("{} nonzero coefficient residuals, first {:?}", chk.nonzero_residuals, chk.first_failure));
        }
    }
    let prof = bautin::a0_profile(&ps).map_err(|e| e.to_string())?;
    if !prof.holds_on(&ps) {
        return Err("A0 profile does not hold on its own prefix".into());
    }
    Ok(())
}

fn riccati_closed_form() -> Result<(), String> {
    let eq = abel::AbelEquation::from_ints(&[1], &[], 0, 1).map_err(|e| e.to_string())?;
    let exp = abel::poincare_coefficients(&eq, abel::DEFAULT_ORDER).map_err(|e| e.to_string())?;
    for k in 1..=abel::DEFAULT_ORDER {
        let expected = QPoly::monomial(pow_q(&int(-1), k as i64 - 1), k - 1).renamed("x");
        if exp.v[k] != expected {
            return Err(format!("v_{k} = {:?}", exp.v[k]));
        }
    }
    Ok(())
}

/// `1/(1 - z)`: certified zero-free at `R'/R = 0.01`, not claimed at `0.9`.
pub fn geometric_zero_bound() -> Result<(), String> {
    let spec = RecurrenceSpec::constant(vec![int(1)]).map_err(|e| e.to_string())?;
    let seq = spec.generate(&[int(1)], HORIZON).map_err(|e| e.to_string())?;
    let cert = cert_turan(&spec).map_err(|e| e.to_string())?;
    let r = q_to_f64(&cert.r);
    let near = zero_bound(&cert, &seq.values, 0.01 * r).map_err(|e| e.to_string())?;
    let far = zero_bound(&cert, &seq.values, 0.9 * r).map_err(|e| e.to_string())?;
    if near.bound != Some(0) {
        return Err("not certified at R'/R = 0.01".into());
    }
    if far.certified {
        return Err("certified at R'/R = 0.9".into());
    }
    Ok(())
}

/// Gap between the growth of the companion states and the nearest
/// eigenvalue modulus; `0` when the states vanish eventually.
fn companion_radius(op: &dfinite::DifferentialOperator, g: &dfinite::TestFunction) -> Result<f64, String> {
    let pw = g.boundary_data(op.order()).map_err(|e| e.to_string())?;
    let sys = dfinite::companion_system(op, &pw);
    let m = dfinite::direct_moments(g, RADIUS_INDEX + sys.dim() + 4)
        .map_err(|e| e.to_string())?
        .values
        .values;
    let norms = (0..=RADIUS_INDEX)
        .map(|k| {
            sys.state(k, &m)
                .map(|w| dfinite::family::ln_state_norm(&w).exp())
                .ok_or_else(|| format!("no state at k = {k}"))
        })
        .collect::<Result<Vec<f64>, String>>()?;
    let moduli = sys.eigenvalues().map_err(|e| e.to_string())?.moduli();
    let seq = CoefficientSequence::external(norms, "companion states");
    let est = radius_estimate(&seq, RADIUS_WINDOW, Some(&moduli)).map_err(|e| e.to_string())?;
    if est.eventually_zero {
        return Ok(0.0);
    }
    let gap = moduli
        .iter()
        .map(|&r| (est.estimate - r).abs() / r.max(1e-300))
        .fold(f64::INFINITY, f64::min);
    if gap <= RADIUS_TOL {
        Ok(gap)
    } else {
        Err(format!("estimate {} vs moduli {moduli:?}", est.estimate))
    }
}

fn master_oracle() -> CriterionResult {
    let mut t = Tally::new();
    let fam = dfinite::test_family();
    let jumps = fam.iter().filter(|c| c.g.breaks.len() > 2).count();
    for c in &fam {
        t.record(|| c.name.to_string(), master_case(c));
    }
    let ok = fam.len() >= 10 && jumps >= 1;
    t.finish(5, ok, format!("{} functions, {jumps} with interior jumps, k <= 100", fam.len()))
}

fn master_case(c: &dfinite::TestCase) -> Result<(), String> {
    let n = c.op.order();
    let pw = c.g.boundary_data(n).map_err(|e| e.to_string())?;
    let rec = dfinite::moment_recurrence(&c.op);
    let eps = dfinite::epsilon_rule(&c.op, &pw);
    let sys = dfinite::companion_system(&c.op, &pw);
    let m = dfinite::direct_moments(&c.g, 100 + sys.dim() + 10)
        .map_err(|e| e.to_string())?
        .values
        .values;
    let res = dfinite::recurrence_residuals(&rec, &eps, &m, 100);
    if res.len() != 101 || res.iter().any(|r| !r.is_zero()) {
        return Err("moment recurrence residual".into());
    }
    for k in 0..=100 {
        let r = sys.step_residual(k, &m).ok_or_else(|| format!("no companion step at k = {k}"))?;
        if r.iter().any(|v| !v.is_zero()) {
            return Err(format!("companion residual at k = {k}"));
        }
    }
    let got = sys.eigenvalues().map_err(|e| e.to_string())?.expanded();
    let mut expected = Vec::new();
    if c.op.leading_degree() > 0 {
        expected.extend(roots_exact(c.op.p(n)).map_err(|e| e.to_string())?.expanded());
    }
    for x in pw.points() {
        expected.extend(std::iter::repeat_n(Complex64::new(q_to_f64(x), 0.0), n));
    }
    if got.len() != expected.len() {
        return Err(format!("{} eigenvalues, expected {}", got.len(), expected.len()));
    }
    for z in &expected {
        let near = got.iter().map(|g| (g - z).norm()).fold(f64::INFINITY, f64::min);
        if near > 1e-8 {
            return Err(format!("eigenvalue {z} missing (nearest {near:e})"));
        }
    }
    Ok(())
}

fn vanishing() -> CriterionResult {
    let mut t = Tally::new();
    for c in dfinite::test_family() {
        let r = c
            .g
            .boundary_data(c.op.order())
            .and_then(|pw| dfinite::vanishing_bound(&c.op, &pw, true))
            .map_err(|e| e.to_string())
            .and_then(|vb| {
                let (rank, dim) = dfinite::moment_map_rank(&c.g.breaks, &c.basis, vb.bound);
                if rank == dim {
                    Ok(())
                } else {
                    Err(format!("bound {} leaves a {}-dimensional kernel", vb.bound, dim - rank))
                }
            });
        t.record(|| c.name.to_string(), r);
    }
    t.finish(6, true, "exact rank of the moment map".into())
}

fn stieltjes() -> CriterionResult {
    let mut t = Tally::new();
    let mut sharp = 0;
    for c in dfinite::test_family() {
        let r = (|| {
            let pw = c.g.boundary_data(c.op.order()).map_err(|e| e.to_string())?;
            let seq = dfinite::direct_moments(&c.g, HORIZON).map_err(|e| e.to_string())?.values;
            let cert = dfinite::stieltjes_certificate(&c.op, &pw, &seq).map_err(|e| e.to_string())?;
            let rep = verify(&seq.values, &cert, HORIZON).map_err(|e| e.to_string())?;
            if !rep.pass {
                return Err(format!("certificate fails at k = {:?}", rep.first_failure));
            }
            let rs = q_to_f64(&dfinite::r_star(&c.op, &pw).map_err(|e| e.to_string())?);
            let est = radius_estimate(&seq, HORIZON / 2, None).map_err(|e| e.to_string())?;
            let radius = 1.0 / est.estimate;
            if c.sharp_radius {
                sharp += 1;
                if (radius / rs - 1.0).abs() > RADIUS_TOL {
                    return Err(format!("radius {radius} vs R* {rs}"));
                }
            } else if radius < rs * (1.0 - RADIUS_TOL) {
                return Err(format!("radius {radius} below the lower bound R* = {rs}"));
            }
            Ok(())
        })();
        t.record(|| c.name.to_string(), r);
    }
    t.finish(7, sharp >= 5, format!("{sharp} with sharp R*"))
}
