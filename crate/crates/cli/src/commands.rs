//! Input documents and the pipeline behind each subcommand.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use taydom_abel as abel;
use taydom_bautin as bautin;
use taydom_core::domination::{
    cert_bounded, cert_poincare, cert_poincare_delta, cert_trivial, cert_turan, verify,
};
use taydom_core::recurrence::radius_estimate;
use taydom_core::scalar::{format_rational, q_to_f64};
use taydom_core::zeros::{count_zeros, zero_bound};
use taydom_core::{
    serde_q, CoefficientSequence, DominationCertificate, Dyadic, QMultiPoly, Rational, RecurrenceSpec, Scalar,
    VerificationReport,
};
use taydom_dfinite as dfinite;

use crate::job::{CliError, Command, JobSpec, Mode};
use crate::report::{Report, Status, Table};
use crate::suite::{Suite, SuiteConfig};

/// Horizon used when the job gives none.
pub fn default_horizon(c: Command) -> usize {
    match c {
        Command::Bautin => 30,
        Command::Dfinite => 100,
        Command::Abel => abel::DEFAULT_ORDER,
        _ => 200,
    }
}

/// Rows of a ratio table: the first few indices past `N`, the worst one
/// and the first failure.
const LEADING_ROWS: usize = 8;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateDoc {
    pub spec: RecurrenceSpec,
    #[serde(with = "serde_q::vec")]
    pub init: Vec<Rational>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyDoc {
    pub spec: RecurrenceSpec,
    #[serde(with = "serde_q::vec")]
    pub init: Vec<Rational>,
    /// Overridden by `--method`.
    #[serde(default)]
    pub method: Option<String>,
    /// Radius of the trivial certificate.
    #[serde(default, with = "serde_q::opt")]
    pub r: Option<Rational>,
    /// Candidate `rho` values for the bounded-class optimiser.
    #[serde(default, with = "serde_q::vec")]
    pub overrides: Vec<Rational>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyDoc {
    pub certificate: DominationCertificate,
    #[serde(default)]
    pub spec: Option<RecurrenceSpec>,
    #[serde(default, with = "serde_q::opt_vec")]
    pub init: Option<Vec<Rational>>,
    /// Explicit coefficients instead of `spec` and `init`.
    #[serde(default, with = "serde_q::opt_vec")]
    pub values: Option<Vec<Rational>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerosDoc {
    #[serde(default)]
    pub spec: Option<RecurrenceSpec>,
    #[serde(default, with = "serde_q::opt_vec")]
    pub init: Option<Vec<Rational>>,
    #[serde(default, with = "serde_q::opt_vec")]
    pub values: Option<Vec<Rational>>,
    /// Radii for `count_zeros`.
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub certificate: Option<DominationCertificate>,
    /// Radius of the zero bound; needs `certificate`.
    #[serde(default)]
    pub r_prime: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfiniteDoc {
    /// Name of a built-in test case.
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub operator: Option<dfinite::DifferentialOperator>,
    #[serde(default)]
    pub function: Option<dfinite::TestFunction>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BautinDoc {
    pub recurrence: bautin::ParametricRecurrence,
    #[serde(with = "serde_q::multipoly::vec")]
    pub init: Vec<QMultiPoly>,
    /// Parameter points for the uniform-domination table.
    #[serde(default, with = "serde_q::vec_vec")]
    pub samples: Vec<Vec<Rational>>,
    #[serde(default, with = "serde_q::vec")]
    pub radii: Vec<Rational>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbelDoc {
    pub equation: abel::AbelEquation,
    /// Oracle sample points `y`; the default is `10^-2, 10^-3, 10^-4`.
    #[serde(default, with = "serde_q::vec")]
    pub samples: Vec<Rational>,
    /// Endpoint `x` of the fixed-point count; defaults to `b`.
    #[serde(default, with = "serde_q::opt")]
    pub x: Option<Rational>,
    #[serde(default)]
    pub radius: Option<f64>,
    /// Length of the moment-like sequence.
    #[serde(default)]
    pub moments: Option<usize>,
}

pub struct Outcome {
    pub report: Report,
    /// Sequence CSV, when the command produces one.
    pub csv: Option<String>,
}

fn parse_doc<D: DeserializeOwned>(job: &JobSpec) -> Result<D, CliError> {
    let v = job
        .document
        .clone()
        .ok_or_else(|| CliError::Schema(format!("{} needs an input document", job.command.name())))?;
    serde_json::from_value(v).map_err(|e| CliError::Schema(format!("document: {e}")))
}

fn to_value<S: Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("serializable")
}

/// Arithmetic behind float mode.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Numeric {
    Exact,
    F64,
    Dyadic(u32),
}

fn numeric(job: &JobSpec) -> Numeric {
    match (job.mode, job.precision) {
        (Mode::Exact, _) => Numeric::Exact,
        (Mode::Float, Some(b)) if b > 53 => Numeric::Dyadic(b),
        (Mode::Float, _) => Numeric::F64,
    }
}

/// Runs a generic body at the job's arithmetic.
macro_rules! at_numeric {
    ($num:expr, $T:ident => $body:expr) => {
        match $num {
            Numeric::Exact => {
                type $T = Rational;
                $body
            }
            Numeric::F64 => {
                type $T = f64;
                $body
            }
            Numeric::Dyadic(bits) => Dyadic::with_precision(bits, || {
                type $T = Dyadic;
                $body
            }),
        }
    };
}

/// Decimal with `digits` significant digits, `d.ddd...e+x`.
pub fn sci(q: &Rational, digits: usize) -> String {
    use num_traits::{Signed, Zero};
    if q.is_zero() {
        return "0".into();
    }
    let digits = digits.max(1);
    let neg = q.is_negative();
    let a = q.abs();
    let ten = Rational::from_integer(10.into());
    let mut e10 = (taydom_core::scalar::ln_abs_rational(&a) / std::f64::consts::LN_10).floor() as i64;
    let scale = |x: i64| -> Rational {
        if x >= 0 {
            Rational::from_integer(num_traits::pow(ten.numer().clone(), x as usize))
        } else {
            Rational::from_integer(1.into()) / Rational::from_integer(num_traits::pow(ten.numer().clone(), (-x) as usize))
        }
    };
    // fix the estimate so that 10^e10 <= a < 10^(e10+1)
    while scale(e10) > a {
        e10 -= 1;
    }
    while scale(e10 + 1) <= a {
        e10 += 1;
    }
    let mut m = (&a * scale(digits as i64 - 1 - e10)).round().to_integer();
    if m == num_traits::pow(ten.numer().clone(), digits) {
        m /= 10;
        e10 += 1;
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    format!(
        "{}{}{}{}e{}{}",
        if neg { "-" } else { "" },
        head,
        if tail.is_empty() { "" } else { "." },
        tail,
        if e10 < 0 { "-" } else { "+" },
        e10.abs()
    )
}

fn digits_for(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

fn fmt_q(q: &Rational) -> String {
    format_rational(q)
}

fn fmt_f(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.is_finite() {
        format!("{x:.6e}")
    } else {
        format!("{x}")
    }
}

/// Exact values as `"p/q"`; floats in decimal at their precision.
fn fmt_value<T: Scalar>(v: &T, n: Numeric) -> String {
    match n {
        Numeric::Exact => fmt_q(&v.to_rational().expect("exact")),
        Numeric::F64 => v.to_rational().map_or_else(|| "nan".into(), |q| sci(&q, 17)),
        Numeric::Dyadic(b) => v.to_rational().map_or_else(|| "nan".into(), |q| sci(&q, digits_for(b))),
    }
}

fn sequence_csv<T: Scalar>(values: &[T], n: Numeric) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    if n == Numeric::Exact {
        w.write_record(["k", "num", "den"]).map_err(io)?;
        for (k, v) in values.iter().enumerate() {
            let q = v.to_rational().expect("exact");
            w.write_record([k.to_string(), q.numer().to_string(), q.denom().to_string()])
                .map_err(io)?;
        }
    } else {
        w.write_record(["k", "re", "im"]).map_err(io)?;
        for (k, v) in values.iter().enumerate() {
            w.write_record([k.to_string(), fmt_value(v, n), "0".to_string()]).map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn init_as<T: Scalar>(init: &[Rational]) -> Vec<T> {
    init.iter().map(T::from_rational).collect()
}

fn base_report(job: &JobSpec, horizon: Option<usize>) -> Report {
    let mut r = Report::empty(job.command, job.mode);
    r.horizon = horizon;
    r.precision = job.precision;
    r.seed = job.seed;
    r
}

/// Runs one job. Failures of the checks themselves are reported through the
/// report status; `Err` is kept for unusable input and numeric breakdowns.
pub fn run_job(job: &JobSpec, progress: &mut dyn FnMut(&str)) -> Result<Outcome, CliError> {
    match job.command {
        Command::Generate => generate(job),
        Command::Certify => certify(job),
        Command::Verify => verify_cmd(job),
        Command::Zeros => zeros(job),
        Command::Dfinite => dfinite_cmd(job),
        Command::Bautin => bautin_cmd(job),
        Command::Abel => abel_cmd(job),
        Command::Suite => suite(job, progress),
    }
}

fn generate(job: &JobSpec) -> Result<Outcome, CliError> {
    let doc: GenerateDoc = parse_doc(job)?;
    let h = job.horizon.unwrap_or(default_horizon(job.command));
    let n = numeric(job);
    let mut report = base_report(job, Some(h));
    let (rows, csv) = at_numeric!(n, T => {
        let seq = doc.spec.generate(&init_as::<T>(&doc.init), h)?;
        let rows: Vec<Vec<String>> = seq.values.iter().enumerate().map(|(k, v)| vec![k.to_string(), fmt_value(v, n)]).collect();
        Ok::<_, CliError>((rows, sequence_csv(&seq.values, n)?))
    })?;
    let mut t = Table::new("sequence", &["k", "a_k"]);
    t.rows = rows;
    report.details = json!({ "spec": to_value(&doc.spec), "values": t.rows.iter().map(|r| r[1].clone()).collect::<Vec<_>>() });
    report.tables.push(t);
    Ok(Outcome { report, csv: Some(csv) })
}

fn build_certificate(doc: &CertifyDoc, method: &str, seq: &CoefficientSequence<Rational>) -> Result<DominationCertificate, CliError> {
    let spec = &doc.spec;
    let cert = match method {
        "turan" => cert_turan(spec)?,
        "bounded" => cert_bounded(spec, &doc.overrides)?,
        "poincare" => cert_poincare(spec)?,
        "poincare_delta" => cert_poincare_delta(spec)?,
        "trivial" => {
            let r = doc
                .r
                .clone()
                .ok_or_else(|| CliError::Schema("the trivial certificate needs a radius `r`".into()))?;
            cert_trivial(seq, &r)?
        }
        "auto" => {
            if spec.is_constant() {
                cert_turan(spec)?
            } else if spec.declared_bounds.is_some() {
                cert_bounded(spec, &doc.overrides)?
            } else if spec.delta.is_some() {
                cert_poincare_delta(spec)?
            } else {
                cert_poincare(spec)?
            }
        }
        other => {
            return Err(CliError::Schema(format!(
                "unknown method {other:?}; expected turan, bounded, poincare, poincare_delta, trivial or auto"
            )))
        }
    };
    Ok(cert)
}

fn certificate_table(c: &DominationCertificate) -> Table {
    let mut t = Table::new("certificate", &["N", "R", "R (approx)", "S-rule", "method"]);
    t.push(vec![
        c.n.to_string(),
        fmt_q(&c.r),
        fmt_f(q_to_f64(&c.r)),
        c.s_rule.name().to_string(),
        to_value(&c.method).as_str().unwrap_or("?").to_string(),
    ]);
    t
}

fn verification_tables(rep: &VerificationReport) -> Vec<Table> {
    let mut s = Table::new("verification", &["horizon", "worst k", "worst ratio", "first failure", "pass", "exact"]);
    s.push(vec![
        rep.horizon.to_string(),
        rep.worst_k.map_or("-".into(), |k| k.to_string()),
        fmt_f(rep.worst_ratio()),
        rep.first_failure.map_or("-".into(), |k| k.to_string()),
        rep.pass.to_string(),
        rep.exact.to_string(),
    ]);
    let mut ks: Vec<usize> = (rep.n + 1..=rep.horizon).take(LEADING_ROWS).collect();
    ks.extend(rep.worst_k);
    ks.extend(rep.first_failure);
    ks.sort_unstable();
    ks.dedup();
    let mut r = Table::new("ratios |a_k| R^k / (S(k) M)", &["k", "ratio"]);
    for k in ks {
        if Some(k) == rep.worst_k {
            r.highlight = Some(r.rows.len());
        }
        r.push(vec![k.to_string(), rep.ratio(k).map_or("-".into(), fmt_f)]);
    }
    vec![s, r]
}

fn flag_verification(report: &mut Report, rep: &VerificationReport) {
    if !rep.pass {
        report.flag(
            Status::VerificationFailed,
            format!("domination fails at k = {}", rep.first_failure.map_or("?".into(), |k| k.to_string())),
        );
    } else if rep.tight {
        report.flag(Status::NumericUnreliable, "a ratio is within the float tolerance of one");
    }
    if let Some(d) = &rep.diagnostic {
        report.flags.push(d.clone());
    }
}

fn verify_at<T: Scalar>(values: &[T], cert: &DominationCertificate, h: usize) -> Result<VerificationReport, CliError> {
    if values.len() <= h {
        return Err(CliError::Schema(format!("{} values do not reach horizon {h}", values.len())));
    }
    Ok(verify(values, cert, h)?)
}

fn certify(job: &JobSpec) -> Result<Outcome, CliError> {
    let doc: CertifyDoc = parse_doc(job)?;
    let h = job.horizon.unwrap_or(default_horizon(job.command));
    let method = job.method.clone().or_else(|| doc.method.clone()).unwrap_or_else(|| "auto".into());
    let exact_seq = doc.spec.generate(&doc.init, h)?;
    let cert = build_certificate(&doc, &method, &exact_seq)?;
    let n = numeric(job);
    let rep = at_numeric!(n, T => {
        if n == Numeric::Exact {
            verify_at(&exact_seq.values, &cert, h)
        } else {
            let seq = doc.spec.generate(&init_as::<T>(&doc.init), h)?;
            verify_at(&seq.values, &cert, h)
        }
    })?;
    let mut report = base_report(job, Some(h));
    report.tables.push(certificate_table(&cert));
    report.tables.extend(verification_tables(&rep));
    flag_verification(&mut report, &rep);
    report.details = json!({ "certificate": to_value(&cert), "verification": to_value(&rep) });
    Ok(Outcome { report, csv: None })
}

/// Coefficients from `values` or from `spec` and `init`, as exact rationals.
fn sequence_from(
    spec: &Option<RecurrenceSpec>,
    init: &Option<Vec<Rational>>,
    values: &Option<Vec<Rational>>,
    h: usize,
) -> Result<Vec<Rational>, CliError> {
    match (spec, init, values) {
        (_, _, Some(v)) if spec.is_none() && init.is_none() => Ok(v.clone()),
        (Some(s), Some(i), None) => Ok(s.generate(i, h)?.values),
        _ => Err(CliError::Schema("give either `values` or both `spec` and `init`".into())),
    }
}

fn verify_cmd(job: &JobSpec) -> Result<Outcome, CliError> {
    let doc: VerifyDoc = parse_doc(job)?;
    let given = doc.values.as_ref().map(|v| v.len().saturating_sub(1));
    let h = job.horizon.or(given).unwrap_or(default_horizon(job.command));
    let n = numeric(job);
    let values = sequence_from(&doc.spec, &doc.init, &doc.values, h)?;
    let rep = at_numeric!(n, T => {
        let v: Vec<T> = init_as(&values);
        verify_at(&v, &doc.certificate, h)
    })?;
    let mut report = base_report(job, Some(h));
    report.tables.push(certificate_table(&doc.certificate));
    report.tables.extend(verification_tables(&rep));
    flag_verification(&mut report, &rep);
    report.details = json!({ "certificate": to_value(&doc.certificate), "verification": to_value(&rep) });
    Ok(Outcome { report, csv: None })
}

fn zeros(job: &JobSpec) -> Result<Outcome, CliError> {
    let doc: ZerosDoc = parse_doc(job)?;
    let given = doc.values.as_ref().map(|v| v.len().saturating_sub(1));
    let h = job.horizon.or(given).unwrap_or(default_horizon(job.command));
    let values = sequence_from(&doc.spec, &doc.init, &doc.values, h)?;
    let mut report = base_report(job, Some(h));
    let mut counts = Vec::new();
    let mut t = Table::new("zeros of the truncation", &["radius", "count", "residual", "nodes", "reliable"]);
    for &r in &doc.radii {
        let c = count_zeros(&values, r, None)?;
        if !c.reliable {
            report.flag(Status::NumericUnreliable, format!("count at radius {r} is unreliable"));
        }
        t.push(vec![fmt_f(r), c.count.to_string(), fmt_f(c.residual), c.nodes.to_string(), c.reliable.to_string()]);
        counts.push(c);
    }
    report.tables.push(t);
    let mut bound = Value::Null;
    match (&doc.certificate, doc.r_prime) {
        (Some(cert), Some(rp)) => {
            let zb = zero_bound(cert, &values, rp)?;
            let mut b = Table::new("zero bound", &["N", "R'", "r*", "tail / M", "min |P_N| / M", "certified"]);
            b.push(vec![
                zb.n.to_string(),
                fmt_f(zb.r_prime),
                zb.r_star.map_or("-".into(), fmt_f),
                zb.tail_bound.map_or("-".into(), fmt_f),
                zb.min_modulus.map_or("-".into(), fmt_f),
                zb.certified.to_string(),
            ]);
            report.tables.push(b);
            bound = to_value(&zb);
        }
        (None, None) => {}
        _ => return Err(CliError::Schema("`certificate` and `r_prime` go together".into())),
    }
    report.details = json!({ "counts": to_value(&counts), "zero_bound": bound });
    Ok(Outcome { report, csv: None })
}

fn dfinite_cmd(job: &JobSpec) -> Result<Outcome, CliError> {
    let doc: DfiniteDoc = parse_doc(job)?;
    let h = job.horizon.unwrap_or(default_horizon(job.command));
    let (name, op, g) = match (&doc.family, &doc.operator, &doc.function) {
        (Some(name), None, None) => {
            let c = dfinite::test_family()
                .into_iter()
                .find(|c| c.name == name)
                .ok_or_else(|| CliError::Schema(format!("no built-in case {name:?}")))?;
            (name.clone(), c.op, c.g)
        }
        (None, Some(op), Some(g)) => ("custom".to_string(), op.clone(), g.clone()),
        _ => return Err(CliError::Schema("give either `family` or both `operator` and `function`".into())),
    };
    if !g.annihilated_by(&op) {
        return Err(CliError::Schema("the operator does not annihilate the function on its pieces".into()));
    }
    let pw = g.boundary_data(op.order())?;
    let mut report = base_report(job, Some(h));
    let an = dfinite::analyze_operator(&op, &pw)?;
    let rec = dfinite::moment_recurrence(&op);
    let eps = dfinite::epsilon_rule(&op, &pw);
    let sys = dfinite::companion_system(&op, &pw);
    let m = dfinite::direct_moments(&g, h.max(crate::suite::HORIZON) + sys.dim() + 4)?.values;
    let res = dfinite::recurrence_residuals(&rec, &eps, &m.values, h);
    let rec_zero = res.iter().filter(|r| num_traits::Zero::is_zero(*r)).count();
    let step_zero = (0..=h)
        .filter(|&k| sys.step_residual(k, &m.values).is_some_and(|r| r.iter().all(num_traits::Zero::is_zero)))
        .count();
    if rec_zero != res.len() || step_zero != h + 1 {
        report.flag(Status::VerificationFailed, "nonzero moment or companion residual");
    }
    let mut a = Table::new("operator", &["case", "order", "Poincare", "Fuchsian", "tau", "alpha", "Lambda"]);
    a.push(vec![
        name.clone(),
        op.order().to_string(),
        an.poincare_ok.to_string(),
        an.fuchsian.to_string(),
        an.tau.to_string(),
        an.alpha.to_string(),
        an.lambda.to_string(),
    ]);
    report.tables.push(a);
    let mut sp = Table::new("spectrum of A", &["re", "im", "multiplicity", "singular", "jump"]);
    for p in &an.spectrum {
        sp.push(vec![fmt_f(p.re), fmt_f(p.im), p.multiplicity.to_string(), p.singular_point.to_string(), p.jump_point.to_string()]);
    }
    report.tables.push(sp);
    let mut rt = Table::new("residuals", &["k max", "recurrence zero", "companion zero"]);
    rt.push(vec![h.to_string(), format!("{rec_zero}/{}", res.len()), format!("{step_zero}/{}", h + 1)]);
    report.tables.push(rt);

    let vb = dfinite::vanishing_bound(&op, &pw, true).ok();
    let mut details = json!({
        "case": name,
        "analysis": to_value(&an),
        "recurrence_residuals_zero": rec_zero == res.len(),
        "companion_residuals_zero": step_zero == h + 1,
        "vanishing_bound": to_value(&vb),
    });
    match dfinite::stieltjes_certificate(&op, &pw, &m) {
        Ok(cert) => {
            let vh = crate::suite::HORIZON;
            let rep = verify(&m.values, &cert, vh)?;
            let est = radius_estimate(&m, vh / 2, None)?;
            let mut st = Table::new("Stieltjes transform", &["N", "R*", "radius estimate", "verified to"]);
            st.push(vec![
                cert.n.to_string(),
                fmt_q(&cert.r),
                if est.eventually_zero { "inf".into() } else { fmt_f(1.0 / est.estimate) },
                vh.to_string(),
            ]);
            report.tables.push(st);
            report.tables.extend(verification_tables(&rep));
            flag_verification(&mut report, &rep);
            details["stieltjes"] = json!({ "certificate": to_value(&cert), "verification": to_value(&rep), "radius": to_value(&est) });
        }
        Err(e) => report.flags.push(format!("no Stieltjes certificate: {e}")),
    }
    report.details = details;
    let csv = sequence_csv(&m.values[..=h], Numeric::Exact)?;
    Ok(Outcome { report, csv: Some(csv) })
}

fn bautin_cmd(job: &JobSpec) -> Result<Outcome, CliError> {
    let doc: BautinDoc = parse_doc(job)?;
    let h = job.horizon.unwrap_or(default_horizon(job.command));
    let rec = &doc.recurrence;
    let ps = bautin::generate_parametric(rec, &doc.init, h)?;
    let mut report = base_report(job, Some(h));
    let w = bautin::ideal_witness(rec, &doc.init, h)?;
    let witness_ok = w.check(&ps.terms).is_ok();
    if !witness_ok {
        report.flag(Status::VerificationFailed, "ideal witness identity fails");
    }
    let degs: Vec<Option<u32>> = doc.init.iter().map(|a| a.degree()).collect();
    let bounds = rec.degree_bounds(&degs, h);
    let mut dt = Table::new("coefficients", &["k", "deg a_k", "bound", "terms"]);
    for k in 0..=h {
        let d = ps.degrees[k];
        if d.is_some_and(|d| bounds[k].is_none_or(|b| d > b)) {
            report.flag(Status::VerificationFailed, format!("deg a_{k} exceeds its bound"));
            dt.highlight = Some(k);
        }
        let show = |x: Option<u32>| x.map_or("-".into(), |v| v.to_string());
        dt.push(vec![k.to_string(), show(d), show(bounds[k]), ps.terms[k].len().to_string()]);
    }
    report.tables.push(dt);
    let check = if rec.linear {
        let c = bautin::coefficient_recurrence_check(&ps)?;
        if !c.exact() {
            report.flag(Status::VerificationFailed, "coefficient recurrence residuals are nonzero");
        }
        Some(c)
    } else {
        None
    };
    let prof = bautin::a0_profile(&ps)?;
    let mut pt = Table::new("A_0 profile", &["K1", "K2", "K3", "K4", "norm", "deg a_k <= k"]);
    pt.push(vec![
        fmt_q(&prof.k1),
        fmt_q(&prof.k2),
        fmt_q(&prof.k3),
        fmt_q(&prof.k4),
        prof.norm.clone(),
        prof.degree_at_most_k.map_or("-".into(), |b| b.to_string()),
    ]);
    report.tables.push(pt);
    let uniform = if !doc.samples.is_empty() && !doc.radii.is_empty() {
        let u = bautin::specialize_and_certify(&ps, &doc.samples, &doc.radii, h)?;
        let mut ut = Table::new("uniform domination", &["R", "sup C", "worst sample"]);
        for row in &u.rows {
            ut.push(vec![fmt_q(&row.r), fmt_q(&row.sup_c), row.worst_sample.map_or("-".into(), |s| s.to_string())]);
        }
        report.tables.push(ut);
        Some(u)
    } else {
        None
    };
    report.details = json!({
        "witness_holds": witness_ok,
        "degrees": to_value(&ps.degrees),
        "degree_bounds": to_value(&bounds),
        "coefficient_check": check.map(|c| json!({ "identities": c.identities, "nonzero_residuals": c.nonzero_residuals, "max_k": c.max_k })),
        "a0_profile": to_value(&prof),
        "uniform": to_value(&uniform),
    });
    Ok(Outcome { report, csv: None })
}

fn abel_cmd(job: &JobSpec) -> Result<Outcome, CliError> {
    let doc: AbelDoc = parse_doc(job)?;
    let order = job.horizon.unwrap_or(default_horizon(job.command));
    let bits = job.precision.unwrap_or(abel::DEFAULT_BITS);
    let eq = &doc.equation;
    let mut report = base_report(job, Some(order));
    let exp = abel::poincare_coefficients(eq, order)?;
    let mut vt = Table::new("Poincare coefficients (t = x - a)", &["k", "deg v_k", "v_k"]);
    for (k, v) in exp.v.iter().enumerate() {
        vt.push(vec![k.to_string(), v.degree().map_or("-".into(), |d| d.to_string()), v.to_string()]);
    }
    report.tables.push(vt);
    let ys = if doc.samples.is_empty() { abel::default_samples() } else { doc.samples.clone() };
    let ag = abel::oracle_agreement(eq, &exp, &ys, bits)?;
    let mut at = Table::new("truncated map against the ODE oracle", &["ln y", "ln mismatch", "ln floor"]);
    for i in 0..ag.ln_y.len() {
        at.push(vec![fmt_f(ag.ln_y[i]), fmt_f(ag.ln_mismatch[i]), fmt_f(ag.ln_floor[i])]);
    }
    report.tables.push(at);
    let mut st = Table::new("agreement", &["order", "slope", "required", "below floor", "pass"]);
    st.push(vec![
        ag.order.to_string(),
        fmt_f(ag.slope),
        fmt_f(ag.order as f64 + 0.5),
        ag.below_floor.to_string(),
        ag.pass.to_string(),
    ]);
    report.tables.push(st);
    if !ag.pass {
        report.flag(Status::NumericUnreliable, "truncated map and oracle disagree beyond the expected order");
    }
    let mut details = json!({ "expansion": to_value(&exp), "agreement": to_value(&ag) });
    if let Some(r) = doc.radius {
        let x = doc.x.as_ref().unwrap_or(&eq.b);
        let fp = abel::fixed_point_count(&exp, x, r)?;
        if fp.count.as_ref().is_some_and(|c| !c.reliable) {
            report.flag(Status::NumericUnreliable, "fixed-point count is unreliable");
        }
        let mut ft = Table::new("fixed points", &["x", "radius", "count", "leading index", "note"]);
        ft.push(vec![
            fmt_q(x),
            fmt_f(r),
            fp.count.as_ref().map_or("-".into(), |c| c.count.to_string()),
            fp.leading_index.map_or("-".into(), |k| k.to_string()),
            fp.note.clone(),
        ]);
        report.tables.push(ft);
        details["fixed_points"] = to_value(&fp);
    }
    if let Some(mh) = doc.moments {
        let ms = abel::moment_like(eq, mh);
        details["moments"] = to_value(&ms.values.iter().map(fmt_q).collect::<Vec<_>>());
    }
    report.details = details;
    Ok(Outcome { report, csv: None })
}

fn suite(job: &JobSpec, progress: &mut dyn FnMut(&str)) -> Result<Outcome, CliError> {
    let scale = job.scale.unwrap_or(1.0);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CliError::Schema(format!("scale must be positive, got {scale}")));
    }
    if let Some(bad) = job.only.iter().find(|&&i| !(1..=10).contains(&i)) {
        return Err(CliError::Schema(format!("no criterion {bad}")));
    }
    let mut s = Suite::new(SuiteConfig { seed: job.seed, scale });
    let results = s.run(&job.only, |r| progress(&r.line()));
    let mut report = base_report(job, None);
    let mut t = Table::new("acceptance criteria", &["id", "criterion", "cases", "failures", "result", "detail"]);
    for r in &results {
        if !r.pass {
            report.flag(Status::VerificationFailed, format!("criterion {} failed", r.id));
        }
        t.push(vec![
            r.id.to_string(),
            r.name.clone(),
            r.cases.to_string(),
            r.failures.to_string(),
            if r.pass { "PASS" } else { "FAIL" }.into(),
            r.detail.clone(),
        ]);
    }
    report.tables.push(t);
    let mut by_id = BTreeMap::new();
    for r in &results {
        by_id.insert(r.id.to_string(), to_value(r));
    }
    report.details = json!({ "criteria": by_id, "zero_checks": to_value(&s.zeros) });
    Ok(Outcome { report, csv: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use taydom_core::scalar::rat;

    #[test]
    fn sci_formatting() {
        assert_eq!(sci(&rat(1, 3), 5), "3.3333e-1");
        assert_eq!(sci(&rat(-1000, 1), 3), "-1e+3");
        assert_eq!(sci(&rat(9999, 10000), 2), "1e+0");
        assert_eq!(sci(&rat(0, 1), 2), "0");
    }

    fn fib_job(cmd: Command) -> JobSpec {
        let mut job = JobSpec::new(cmd);
        job.document = Some(json!({ "spec": { "constant_part": ["1", "1"] }, "init": ["0", "1"] }));
        job
    }

    #[test]
    fn fibonacci_turan() {
        let mut job = fib_job(Command::Certify);
        job.method = Some("turan".into());
        let out = run_job(&job, &mut |_| {}).unwrap();
        assert_eq!(out.report.status, Status::Ok);
        let cert: DominationCertificate = serde_json::from_value(out.report.details["certificate"].clone()).unwrap();
        assert_eq!(cert.n, 1);
        // 1/phi = (sqrt 5 - 1)/2, certified from below
        let r = q_to_f64(&cert.r);
        assert!(r <= 0.5f64 * (5f64.sqrt() - 1.0) && r > 0.618);
        assert_eq!(out.report.tables[0].rows[0][3], "turan");
    }

    #[test]
    fn zero_init_gives_zero_csv() {
        let mut job = fib_job(Command::Generate);
        job.document = Some(json!({ "spec": { "constant_part": ["1", "1"] }, "init": ["0", "0"] }));
        job.horizon = Some(5);
        let csv = run_job(&job, &mut |_| {}).unwrap().csv.unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,num,den"));
        assert!(lines.enumerate().all(|(k, l)| l == format!("{k},0,1")));
    }

    #[test]
    fn float_modes_agree_with_exact() {
        for precision in [None, Some(200)] {
            let mut job = fib_job(Command::Generate);
            job.mode = Mode::Float;
            job.precision = precision;
            job.horizon = Some(30);
            let out = run_job(&job, &mut |_| {}).unwrap();
            let last = &out.report.tables[0].rows[30][1];
            assert_eq!(last, "8.3204e+5");
        }
    }

    #[test]
    fn malformed_documents_are_schema_errors() {
        let mut job = fib_job(Command::Certify);
        job.document = Some(json!({ "spec": { "constant_part": ["1", "x"] }, "init": ["0", "1"] }));
        assert_eq!(run_job(&job, &mut |_| {}).err().unwrap().exit_code(), 2);
        job.document = Some(json!({ "spec": { "constant_part": ["1"] }, "init": ["0"], "extra": 1 }));
        assert_eq!(run_job(&job, &mut |_| {}).err().unwrap().exit_code(), 2);
        job.document = None;
        assert_eq!(run_job(&job, &mut |_| {}).err().unwrap().exit_code(), 2);
    }

    #[test]
    fn failed_verification_highlights_worst() {
        let mut job = JobSpec::new(Command::Verify);
        job.document = Some(json!({
            "certificate": { "n": 0, "r": "1", "s_rule": { "rule": "constant", "c": "1" }, "method": "manual" },
            "values": ["1", "1", "3", "1"]
        }));
        let out = run_job(&job, &mut |_| {}).unwrap();
        assert_eq!(out.report.status, Status::VerificationFailed);
        let t = &out.report.tables[2];
        let hi = t.highlight.unwrap();
        assert_eq!(t.rows[hi][0], "2");
        assert_eq!(out.report.details["verification"]["worst_k"], json!(2));
    }

    #[test]
    fn reports_are_deterministic() {
        let job = fib_job(Command::Certify);
        let a = crate::report::emit_report(&run_job(&job, &mut |_| {}).unwrap().report);
        let b = crate::report::emit_report(&run_job(&job, &mut |_| {}).unwrap().report);
        assert_eq!(a, b);
    }
}
