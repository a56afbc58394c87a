use melnikov::dynamics::{default_grid, verify_correspondence, FlowConfig};
use melnikov::exactalg::rational::{format_rational, to_decimal, to_f64, Rounding};
use melnikov::exactalg::Polynomial;
use melnikov::melnikov::evaluate_normal_form;
use melnikov::sample::dyadic_coeffs;
use melnikov::zerocount::{theorem_bound, ZeroCountError};
use melnikov::{
    assemble, count_zeros, NormalForm, Rational, SystemFamily, TheoremBound, ZeroReport,
};
use num_traits::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::render::{columns, csv, json, KeyValues};
use crate::{CliError, Format, InstanceSpec, Output, Status};

pub const DEFAULT_PRECISION: u32 = 15;
pub const DEFAULT_GRID: usize = 64;

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn q(x: &Rational) -> String {
    format_rational(x)
}

fn family_line(f: &SystemFamily) -> String {
    format!(
        "alpha1 = {}, alpha2 = {}, m1 = {}, m2 = {}",
        q(f.alpha1()),
        q(f.alpha2()),
        f.m1(),
        f.m2()
    )
}

fn family_json(f: &SystemFamily) -> Value {
    json!({
        "alpha1": q(f.alpha1()),
        "alpha2": q(f.alpha2()),
        "m1": f.m1(),
        "m2": f.m2(),
        "h0": q(&f.h0()),
    })
}

fn bound_json(b: TheoremBound) -> Value {
    match b {
        TheoremBound::Bound(v) => json!(v),
        TheoremBound::NotApplicable(_) => Value::Null,
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// A named polynomial of the normal form and the odd radical power dividing it.
struct Component<'a> {
    name: &'static str,
    var: &'static str,
    poly: &'a Polynomial,
    power: Option<u32>,
}

fn components(nf: &NormalForm) -> Vec<Component<'_>> {
    match nf {
        NormalForm::Generic(g) => {
            let mut v = vec![Component {
                name: "P",
                var: "h",
                poly: &g.p,
                power: Some(g.p_power()),
            }];
            if !g.merged {
                v.push(Component {
                    name: "Q",
                    var: "h",
                    poly: &g.q,
                    power: Some(g.q_power()),
                });
            }
            v.push(Component {
                name: "R",
                var: "h",
                poly: &g.r,
                power: None,
            });
            v
        }
        NormalForm::Confluent(c) => vec![Component {
            name: "Pr",
            var: "r",
            poly: &c.pr,
            power: Some(2 * c.m - 1),
        }],
    }
}

fn shape(nf: &NormalForm) -> &'static str {
    match nf {
        NormalForm::Generic(g) if g.merged => "merged",
        NormalForm::Generic(_) => "generic",
        NormalForm::Confluent(_) => "confluent",
    }
}

fn formula(nf: &NormalForm) -> String {
    match nf {
        NormalForm::Generic(g) if g.merged => format!(
            "Phi(h) = 2*pi*(P(h)/r1^{} + R(h)), r1 = sqrt(1 - alpha1^2*h)",
            g.p_power()
        ),
        NormalForm::Generic(g) => format!(
            "Phi(h) = 2*pi*(P(h)/r1^{} + Q(h)/r2^{} + R(h)), r_i = sqrt(1 - alpha_i^2*h)",
            g.p_power(),
            g.q_power()
        ),
        NormalForm::Confluent(c) => format!(
            "Phi(h) = 2*pi*Pr(r)/r^{}, r = sqrt(1 - alpha1^2*h)",
            2 * c.m - 1
        ),
    }
}

fn degree_text(p: &Polynomial) -> String {
    p.degree()
        .map_or_else(|| "-".to_string(), |d| d.to_string())
}

fn assemble_spec(spec: &InstanceSpec) -> Result<NormalForm, CliError> {
    assemble(&spec.family(), &spec.coeffs()).map_err(internal)
}

pub fn cmd_normal_form(spec: &InstanceSpec, format: Format) -> Result<Output, CliError> {
    let fam = spec.family();
    let nf = assemble_spec(spec)?;
    let status = if nf.is_zero() {
        Status::IdenticallyZero
    } else {
        Status::Ok
    };
    let comps = components(&nf);
    let summary = format!("normal form: {} ({})", shape(&nf), status.name());
    let body = match format {
        Format::Text => {
            let mut kv = KeyValues::new();
            kv.row("status", status.name())
                .row("family", family_line(&fam))
                .row("degree n", spec.n.to_string())
                .row("H0", q(&fam.h0()))
                .row("shape", shape(&nf))
                .row(
                    "merged",
                    yes_no(matches!(&nf, NormalForm::Generic(g) if g.merged)),
                )
                .row("form", formula(&nf));
            for c in &comps {
                kv.row(
                    format!("{}({})", c.name, c.var),
                    format!(
                        "{}    [degree {}]",
                        c.poly.display_in(c.var),
                        degree_text(c.poly)
                    ),
                );
            }
            match &nf {
                NormalForm::Confluent(c) => kv.row("Pr(1)", q(&c.value_at_r_one())),
                _ => kv.row("Phi(0)/2pi", q(&nf.value_at_origin())),
            };
            kv.render()
        }
        Format::Json => {
            let parts: serde_json::Map<String, Value> = comps
                .iter()
                .map(|c| {
                    (
                        c.name.to_string(),
                        json!({
                            "variable": c.var,
                            "radical_power": c.power,
                            "degree": c.poly.degree(),
                            "coefficients": c.poly.coeffs().iter().map(q).collect::<Vec<_>>(),
                        }),
                    )
                })
                .collect();
            let mut v = json!({
                "status": status.name(),
                "family": family_json(&fam),
                "n": spec.n,
                "shape": shape(&nf),
                "merged": matches!(&nf, NormalForm::Generic(g) if g.merged),
                "components": parts,
                "value_at_origin": q(&nf.value_at_origin()),
            });
            if let NormalForm::Confluent(c) = &nf {
                v["pr_at_one"] = json!(q(&c.value_at_r_one()));
            }
            json(&v)
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for c in &comps {
                for (k, a) in c.poly.coeffs().iter().enumerate() {
                    rows.push(vec![c.name.to_string(), k.to_string(), q(a)]);
                }
            }
            csv(&["component", "power", "coefficient"], &rows)?
        }
    };
    Ok(Output {
        body,
        summary,
        status,
    })
}

/// Outward decimal rendering of a certified interval.
fn interval_decimals(lo: &Rational, hi: &Rational, digits: usize) -> (String, String) {
    (
        to_decimal(lo, digits, Rounding::Floor),
        to_decimal(hi, digits, Rounding::Ceil),
    )
}

fn zero_rows(rep: &ZeroReport, digits: usize) -> Vec<Vec<String>> {
    rep.certified_zeros
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let (lo, hi) = interval_decimals(z.interval.lo(), z.interval.hi(), digits);
            vec![(k + 1).to_string(), lo, hi, z.sign_change.to_string()]
        })
        .collect()
}

const ZERO_HEADER: [&str; 4] = ["index", "lower", "upper", "sign_change"];

pub fn cmd_zeros(
    spec: &InstanceSpec,
    format: Format,
    precision: Option<u32>,
) -> Result<Output, CliError> {
    let digits = precision.or(spec.precision).unwrap_or(DEFAULT_PRECISION) as usize;
    let fam = spec.family();
    let nf = assemble_spec(spec)?;
    let bound = theorem_bound(&fam, spec.n);
    let rep = match count_zeros(&nf, spec.n) {
        Ok(r) => r,
        Err(ZeroCountError::IdenticallyZero) => {
            let body = match format {
                Format::Text => {
                    let mut kv = KeyValues::new();
                    kv.row("status", Status::IdenticallyZero.name())
                        .row("family", family_line(&fam))
                        .row("theorem bound", bound.to_string());
                    kv.render()
                }
                Format::Json => json(&json!({
                    "status": Status::IdenticallyZero.name(),
                    "family": family_json(&fam),
                    "n": spec.n,
                    "theorem_bound": bound_json(bound),
                })),
                Format::Csv => csv(&ZERO_HEADER, &[])?,
            };
            return Ok(Output {
                body,
                summary: "zeros: Phi is identically zero".into(),
                status: Status::IdenticallyZero,
            });
        }
        Err(e) => return Err(internal(e)),
    };
    let count = if rep.is_decided() {
        rep.count_hi.to_string()
    } else {
        format!("between {} and {} (undecided)", rep.count_lo, rep.count_hi)
    };
    let summary = format!("zeros: {count}, theorem bound {bound}");
    let rows = zero_rows(&rep, digits);
    let variable = match rep.variable {
        melnikov::zerocount::Variable::H => "h",
        melnikov::zerocount::Variable::R => "r",
    };
    let body = match format {
        Format::Text => {
            let mut kv = KeyValues::new();
            kv.row("status", Status::Ok.name())
                .row("family", family_line(&fam))
                .row("theorem bound", bound.to_string())
                .row("counted in", variable)
                .row(
                    "eliminant degree",
                    format!(
                        "{} (before stripping {}, formula {})",
                        rep.eliminant_degree, rep.raw_degree, rep.degree_formula
                    ),
                )
                .row("candidates", rep.candidates.to_string())
                .row("artifacts", rep.artifacts.to_string())
                .row("zeros", count)
                .row("multiple root", yes_no(rep.multiple_root));
            let mut s = kv.render();
            if !rows.is_empty() {
                s.push_str(&columns(&ZERO_HEADER, &rows));
            }
            s
        }
        Format::Json => json(&json!({
            "status": Status::Ok.name(),
            "family": family_json(&fam),
            "n": spec.n,
            "theorem_bound": bound_json(bound),
            "variable": variable,
            "eliminant_degree": rep.eliminant_degree,
            "raw_degree": rep.raw_degree,
            "degree_formula": rep.degree_formula,
            "candidates": rep.candidates,
            "artifacts": rep.artifacts,
            "count_lo": rep.count_lo,
            "count_hi": rep.count_hi,
            "multiple_root": rep.multiple_root,
            "zeros": rep.certified_zeros.iter().map(|z| json!({
                "lower": q(z.interval.lo()),
                "upper": q(z.interval.hi()),
                "lower_decimal": to_decimal(z.interval.lo(), digits, Rounding::Floor),
                "upper_decimal": to_decimal(z.interval.hi(), digits, Rounding::Ceil),
                "sign_change": z.sign_change,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(&ZERO_HEADER, &rows)?,
    };
    Ok(Output {
        body,
        summary,
        status: Status::Ok,
    })
}

#[derive(Clone, Debug, Default)]
pub struct VerifyParams {
    pub eps: Option<Rational>,
    pub grid: Option<usize>,
    pub precision: Option<u32>,
}

/// Distance allowed between a cycle label and its zero interval, in units of `H0`.
pub const MATCH_TOLERANCE: f64 = 5e-3;

pub fn cmd_verify(
    spec: &InstanceSpec,
    format: Format,
    params: &VerifyParams,
) -> Result<Output, CliError> {
    let eps = params
        .eps
        .clone()
        .or_else(|| spec.eps.clone())
        .ok_or_else(|| {
            CliError::Validation("verify needs epsilon: set `eps` under [run] or pass --eps".into())
        })?;
    if !eps.is_positive() || eps >= Rational::one() {
        return Err(CliError::Validation(format!(
            "epsilon must lie in (0, 1), got {}",
            q(&eps)
        )));
    }
    let points = params.grid.or(spec.grid).unwrap_or(DEFAULT_GRID);
    if points < 2 {
        return Err(CliError::Validation(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    let digits = params
        .precision
        .or(spec.precision)
        .unwrap_or(DEFAULT_PRECISION) as usize;
    let fam = spec.family();
    let coeffs = spec.coeffs();
    let nf = assemble_spec(spec)?;
    let h0 = to_f64(&fam.h0());
    let tol = MATCH_TOLERANCE * h0;

    let (rep, phi_zero) = match count_zeros(&nf, spec.n) {
        Ok(r) => (Some(r), false),
        Err(ZeroCountError::IdenticallyZero) => (None, true),
        Err(e) => return Err(internal(e)),
    };
    let zeros: Vec<(f64, f64)> = rep
        .iter()
        .flat_map(|r| &r.certified_zeros)
        .map(|z| (to_f64(z.interval.lo()), to_f64(z.interval.hi())))
        .collect();
    let decided = rep.as_ref().is_none_or(ZeroReport::is_decided);
    let cfg = FlowConfig::default().with_epsilon(to_f64(&eps));
    let grid = default_grid(&fam, points);
    let out = verify_correspondence(&fam, &coeffs, &cfg, &grid, &zeros, tol);
    let cycles = &out.report.cycles;

    let (status, verdict) = if phi_zero && !coeffs.is_zero() {
        (
            Status::IdenticallyZero,
            "not applicable: Phi vanishes identically".to_string(),
        )
    } else if !decided {
        (
            Status::Mismatch,
            "mismatch: zero count undecided".to_string(),
        )
    } else if out.matched {
        (Status::Ok, "match".to_string())
    } else {
        (
            Status::Mismatch,
            format!(
                "mismatch: {} certified zeros, {} detected cycles after halving epsilon",
                zeros.len(),
                cycles.len()
            ),
        )
    };

    let rows: Vec<Vec<String>> = (0..zeros.len().max(cycles.len()))
        .map(|k| {
            let (lo, hi) = rep
                .as_ref()
                .and_then(|r| r.certified_zeros.get(k))
                .map(|z| interval_decimals(z.interval.lo(), z.interval.hi(), digits))
                .unwrap_or_default();
            let (label, stability, within) = match cycles.get(k) {
                Some(c) => {
                    let within = zeros
                        .get(k)
                        .is_some_and(|&(a, b)| c.h >= a - tol && c.h <= b + tol);
                    (
                        format!("{:.12}", c.h),
                        c.stability.name().to_string(),
                        within.to_string(),
                    )
                }
                None => (String::new(), String::new(), "false".into()),
            };
            vec![(k + 1).to_string(), lo, hi, label, stability, within]
        })
        .collect();
    let header = [
        "index",
        "zero_lower",
        "zero_upper",
        "cycle_h",
        "stability",
        "within_tolerance",
    ];
    let eps_used = if out.retried {
        &eps / Rational::from_integer(2.into())
    } else {
        eps.clone()
    };
    let summary = format!("verify: {verdict}");
    let body = match format {
        Format::Text => {
            let mut kv = KeyValues::new();
            kv.row("family", family_line(&fam))
                .row(
                    "epsilon",
                    if out.retried {
                        format!("{} (retried after {})", q(&eps_used), q(&eps))
                    } else {
                        q(&eps_used)
                    },
                )
                .row(
                    "grid",
                    format!("{points} points, resolution {:.6e}", out.report.resolution),
                )
                .row("tolerance", format!("{tol:.6e}"))
                .row("certified zeros", zeros.len().to_string())
                .row("detected cycles", cycles.len().to_string());
            let mut s = kv.render();
            if !rows.is_empty() {
                s.push_str(&columns(&header, &rows));
            }
            for (h, e) in &out.report.failures {
                s.push_str(&format!("failure at h = {h:.12}: {e}\n"));
            }
            s.push_str(&format!("verdict  {verdict}\n"));
            s
        }
        Format::Json => json(&json!({
            "status": status.name(),
            "verdict": verdict,
            "family": family_json(&fam),
            "n": spec.n,
            "epsilon": q(&eps_used),
            "retried": out.retried,
            "grid_points": points,
            "resolution": out.report.resolution,
            "tolerance": tol,
            "rows": rows.iter().map(|r| json!({
                "index": k_of(r),
                "zero_lower": r[1],
                "zero_upper": r[2],
                "cycle_h": cycles.get(k_of(r) - 1).map(|c| c.h),
                "stability": r[4],
                "within_tolerance": r[5] == "true",
            })).collect::<Vec<_>>(),
            "failures": out.report.failures.iter().map(|(h, e)| json!({"h": h, "error": e.to_string()})).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(&header, &rows)?,
    };
    Ok(Output {
        body,
        summary,
        status,
    })
}

fn k_of(row: &[String]) -> usize {
    row[0].parse().expect("index column")
}

#[derive(Clone, Copy, Debug)]
pub struct ScanParams {
    pub samples: usize,
    pub seed: u64,
}

struct ScanRow {
    index: usize,
    count_lo: usize,
    count_hi: usize,
    candidates: usize,
    artifacts: usize,
    eliminant_degree: usize,
    status: String,
    coeffs: Vec<(String, String)>,
}

/// One sample of the scan. Each index has its own ChaCha stream so rows do not
/// depend on scheduling or on the other samples.
fn scan_sample(fam: &SystemFamily, n: u32, bound: &Rational, seed: u64, index: usize) -> ScanRow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let c = dyadic_coeffs(&mut rng, n, bound);
    let coeffs = c
        .entries()
        .map(|(w, i, j, v)| (format!("{}[{i},{j}]", w.name()), q(v)))
        .collect();
    let mut row = ScanRow {
        index,
        count_lo: 0,
        count_hi: 0,
        candidates: 0,
        artifacts: 0,
        eliminant_degree: 0,
        status: "ok".into(),
        coeffs,
    };
    match assemble(fam, &c)
        .map_err(ZeroCountError::from)
        .and_then(|nf| count_zeros(&nf, n))
    {
        Ok(rep) => {
            row.count_lo = rep.count_lo;
            row.count_hi = rep.count_hi;
            row.candidates = rep.candidates;
            row.artifacts = rep.artifacts;
            row.eliminant_degree = rep.eliminant_degree;
            if !rep.is_decided() {
                row.status = "undecided".into();
            }
        }
        Err(ZeroCountError::IdenticallyZero) => row.status = "identically zero".into(),
        Err(e) => row.status = format!("error: {e}"),
    }
    row
}

pub fn cmd_scan(
    spec: &InstanceSpec,
    format: Format,
    params: &ScanParams,
) -> Result<Output, CliError> {
    if params.samples == 0 {
        return Err(CliError::Validation("samples must be at least 1".into()));
    }
    let fam = spec.family();
    let bound = theorem_bound(&fam, spec.n);
    let rows: Vec<ScanRow> = (0..params.samples)
        .into_par_iter()
        .map(|k| scan_sample(&fam, spec.n, &spec.bound, params.seed, k))
        .collect();
    let max_hi = rows.iter().map(|r| r.count_hi).max().unwrap_or(0);
    let violations = rows.iter().filter(|r| !bound.admits(r.count_hi)).count();
    let undecided = rows.iter().filter(|r| r.status == "undecided").count();
    let zero = rows
        .iter()
        .filter(|r| r.status == "identically zero")
        .count();
    let errors = rows
        .iter()
        .filter(|r| r.status.starts_with("error"))
        .count();
    let status = if violations > 0 || errors > 0 {
        Status::Mismatch
    } else {
        Status::Ok
    };
    let summary = format!(
        "scan: {} samples, max count {max_hi}, theorem bound {bound}, {violations} over bound, {undecided} undecided",
        params.samples
    );
    let header = [
        "index",
        "count_lo",
        "count_hi",
        "within_bound",
        "candidates",
        "artifacts",
        "eliminant_degree",
        "status",
    ];
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.index.to_string(),
                r.count_lo.to_string(),
                r.count_hi.to_string(),
                bound.admits(r.count_hi).to_string(),
                r.candidates.to_string(),
                r.artifacts.to_string(),
                r.eliminant_degree.to_string(),
                r.status.clone(),
            ]
        })
        .collect();
    let body = match format {
        Format::Text => {
            let mut kv = KeyValues::new();
            kv.row("family", family_line(&fam))
                .row("degree n", spec.n.to_string())
                .row("box K", q(&spec.bound))
                .row("seed", params.seed.to_string())
                .row("samples", params.samples.to_string())
                .row("theorem bound", bound.to_string())
                .row("max count", max_hi.to_string())
                .row("over bound", violations.to_string())
                .row("undecided", undecided.to_string())
                .row("identically zero", zero.to_string())
                .row("errors", errors.to_string());
            kv.render() + &columns(&header, &table)
        }
        Format::Json => json(&json!({
            "status": status.name(),
            "family": family_json(&fam),
            "n": spec.n,
            "K": q(&spec.bound),
            "seed": params.seed,
            "samples": params.samples,
            "theorem_bound": bound_json(bound),
            "max_count": max_hi,
            "over_bound": violations,
            "undecided": undecided,
            "identically_zero": zero,
            "errors": errors,
            "rows": rows.iter().map(|r| json!({
                "index": r.index,
                "count_lo": r.count_lo,
                "count_hi": r.count_hi,
                "within_bound": bound.admits(r.count_hi),
                "candidates": r.candidates,
                "artifacts": r.artifacts,
                "eliminant_degree": r.eliminant_degree,
                "status": r.status,
                "coefficients": r.coeffs.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<String, Value>>(),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(&header, &table)?,
    };
    Ok(Output {
        body,
        summary,
        status,
    })
}

/// `points` labels `H0 (1 - 10^-3) k / (points + 1)`, `k = 1..=points`.
pub fn curve_grid(h0: &Rational, points: usize) -> Vec<Rational> {
    let top = h0 * Rational::new(999.into(), 1000.into());
    (1..=points)
        .map(|k| &top * Rational::new(k.into(), (points + 1).into()))
        .collect()
}

pub fn cmd_sample_curve(
    spec: &InstanceSpec,
    format: Format,
    points: usize,
    precision: Option<u32>,
) -> Result<Output, CliError> {
    if points < 2 {
        return Err(CliError::Validation(format!(
            "points must be at least 2, got {points}"
        )));
    }
    let precision = precision.or(spec.precision).unwrap_or(DEFAULT_PRECISION);
    let digits = precision as usize + 3;
    let fam = spec.family();
    let nf = assemble_spec(spec)?;
    let status = if nf.is_zero() {
        Status::IdenticallyZero
    } else {
        Status::Ok
    };
    let grid = curve_grid(&fam.h0(), points);
    let values: Vec<_> = grid
        .par_iter()
        .map(|h| evaluate_normal_form(&nf, h, precision))
        .collect::<Result<_, _>>()
        .map_err(internal)?;
    let rows: Vec<Vec<String>> = grid
        .iter()
        .zip(&values)
        .map(|(h, v)| {
            vec![
                to_decimal(h, digits, Rounding::Nearest),
                to_decimal(&v.midpoint(), digits, Rounding::Nearest),
                format!("{:.3e}", to_f64(&v.width())),
            ]
        })
        .collect();
    let header = ["h", "phi", "width"];
    let summary = format!("sample-curve: {points} points ({})", status.name());
    let body = match format {
        Format::Csv => {
            let mut s = String::new();
            if status == Status::IdenticallyZero {
                s.push_str("# status: identically zero\n");
            }
            s + &csv(&header, &rows)?
        }
        Format::Text => {
            let mut s = format!("status  {}\n", status.name());
            s.push_str(&columns(&header, &rows));
            s
        }
        Format::Json => json(&json!({
            "status": status.name(),
            "family": family_json(&fam),
            "n": spec.n,
            "precision": precision,
            "points": grid.iter().zip(&values).map(|(h, v)| json!({
                "h": q(h),
                "h_decimal": to_decimal(h, digits, Rounding::Nearest),
                "phi": to_decimal(&v.midpoint(), digits, Rounding::Nearest),
                "width": to_f64(&v.width()),
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(Output {
        body,
        summary,
        status,
    })
}
