//! Instance files.
//!
//! ```text
//! [family]
//! alpha1 = 1/2
//! alpha2 = -1/3
//! m1 = 1
//! m2 = 1
//!
//! [perturbation]
//! n = 2
//! K = 1
//! a[0,0] = 1
//! b[0,1] = -0.25
//!
//! [run]
//! eps = 1/1000
//! grid = 64
//! precision = 20
//! ```
//!
//! Values are exact: rationals are written `p/q`, integers or decimals.
//! `#` starts a comment. Coefficients not listed are zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use melnikov::exactalg::rational::{format_rational, parse_rational};
use melnikov::melnikov::Component;
use melnikov::{PerturbCoeffs, Rational, SystemFamily};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct SpecError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub alpha1: Rational,
    pub alpha2: Rational,
    pub m1: u32,
    pub m2: u32,
    pub n: u32,
    pub bound: Rational,
    pub a: BTreeMap<(u32, u32), Rational>,
    pub b: BTreeMap<(u32, u32), Rational>,
    pub eps: Option<Rational>,
    pub grid: Option<usize>,
    pub precision: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Family,
    Perturbation,
    Run,
}

fn err(line: usize, message: impl Into<String>) -> SpecError {
    SpecError {
        line,
        message: message.into(),
    }
}

/// `a[i,j]` or `b[i,j]`.
fn parse_coeff_key(key: &str) -> Option<(Component, u32, u32)> {
    let which = match key.chars().next()? {
        'a' => Component::A,
        'b' => Component::B,
        _ => return None,
    };
    let inner = key[1..].trim().strip_prefix('[')?.strip_suffix(']')?;
    let (i, j) = inner.split_once(',')?;
    Some((which, i.trim().parse().ok()?, j.trim().parse().ok()?))
}

impl InstanceSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut section = Section::None;
        let mut fields: BTreeMap<&'static str, (usize, String)> = BTreeMap::new();
        let mut entries: Vec<(usize, Component, u32, u32, Rational)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = match name.trim() {
                    "family" => Section::Family,
                    "perturbation" => Section::Perturbation,
                    "run" => Section::Run,
                    other => return Err(err(line, format!("unknown section [{other}]"))),
                };
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            let known: &[&'static str] = match section {
                Section::None => return Err(err(line, "entry outside any section")),
                Section::Family => &["alpha1", "alpha2", "m1", "m2"],
                Section::Perturbation => &["n", "K"],
                Section::Run => &["eps", "grid", "precision"],
            };
            if let Some(&name) = known.iter().find(|&&k| k == key) {
                if fields.insert(name, (line, value)).is_some() {
                    return Err(err(line, format!("duplicate key `{key}`")));
                }
            } else if section == Section::Perturbation {
                let (which, i, j) = parse_coeff_key(key)
                    .ok_or_else(|| err(line, format!("unknown key `{key}`")))?;
                let v = parse_rational(&value).map_err(|e| err(line, format!("`{key}`: {e}")))?;
                entries.push((line, which, i, j, v));
            } else {
                return Err(err(line, format!("unknown key `{key}`")));
            }
        }

        let need = |name: &str| -> Result<&(usize, String), SpecError> {
            fields
                .get(name)
                .ok_or_else(|| err(text.lines().count().max(1), format!("missing `{name}`")))
        };
        let rational = |name: &str| -> Result<Rational, SpecError> {
            let (line, v) = need(name)?;
            parse_rational(v).map_err(|e| err(*line, format!("`{name}`: {e}")))
        };
        let integer = |name: &str| -> Result<u32, SpecError> {
            let (line, v) = need(name)?;
            v.parse::<u32>().map_err(|_| {
                err(
                    *line,
                    format!("`{name}` must be a nonnegative integer, got `{v}`"),
                )
            })
        };
        let optional = |name: &str| fields.get(name).map(|(line, v)| (*line, v.clone()));

        let spec = InstanceSpec {
            alpha1: rational("alpha1")?,
            alpha2: rational("alpha2")?,
            m1: integer("m1")?,
            m2: integer("m2")?,
            n: integer("n")?,
            bound: rational("K")?,
            a: BTreeMap::new(),
            b: BTreeMap::new(),
            eps: optional("eps")
                .map(|(line, v)| parse_rational(&v).map_err(|e| err(line, format!("`eps`: {e}"))))
                .transpose()?,
            grid: optional("grid")
                .map(|(line, v)| {
                    v.parse::<usize>().ok().filter(|&g| g >= 2).ok_or_else(|| {
                        err(line, format!("`grid` must be an integer >= 2, got `{v}`"))
                    })
                })
                .transpose()?,
            precision: optional("precision")
                .map(|(line, v)| {
                    v.parse::<u32>().map_err(|_| {
                        err(
                            line,
                            format!("`precision` must be a nonnegative integer, got `{v}`"),
                        )
                    })
                })
                .transpose()?,
        };
        let mut spec = spec;
        let line_of = |name: &str| fields.get(name).map_or(0, |(l, _)| *l);
        SystemFamily::new(spec.alpha1.clone(), spec.alpha2.clone(), spec.m1, spec.m2).map_err(
            |e| {
                let line = if spec.m1 == 0 || spec.m2 == 0 {
                    line_of(if spec.m1 == 0 { "m1" } else { "m2" })
                } else {
                    line_of(if num_traits::Zero::is_zero(&spec.alpha1) {
                        "alpha1"
                    } else {
                        "alpha2"
                    })
                };
                err(line, e.to_string())
            },
        )?;
        let mut check = PerturbCoeffs::new(spec.n, spec.bound.clone())
            .map_err(|e| err(line_of("K"), e.to_string()))?;
        for (line, which, i, j, v) in entries {
            let map = match which {
                Component::A => &mut spec.a,
                Component::B => &mut spec.b,
            };
            if map.contains_key(&(i, j)) {
                return Err(err(
                    line,
                    format!("duplicate coefficient {}[{i},{j}]", which.name()),
                ));
            }
            check
                .set(which, i, j, v.clone())
                .map_err(|e| err(line, e.to_string()))?;
            map.insert((i, j), v);
        }
        Ok(spec)
    }

    pub fn family(&self) -> SystemFamily {
        SystemFamily::new(self.alpha1.clone(), self.alpha2.clone(), self.m1, self.m2)
            .expect("validated on parse")
    }

    pub fn coeffs(&self) -> PerturbCoeffs {
        let mut c = PerturbCoeffs::new(self.n, self.bound.clone()).expect("validated on parse");
        for ((i, j), v) in &self.a {
            c.set_a(*i, *j, v.clone()).expect("validated on parse");
        }
        for ((i, j), v) in &self.b {
            c.set_b(*i, *j, v.clone()).expect("validated on parse");
        }
        c
    }

    pub fn from_instance(family: &SystemFamily, coeffs: &PerturbCoeffs) -> Self {
        let (mut a, mut b) = (BTreeMap::new(), BTreeMap::new());
        for (which, i, j, v) in coeffs.entries() {
            match which {
                Component::A => a.insert((i, j), v.clone()),
                Component::B => b.insert((i, j), v.clone()),
            };
        }
        InstanceSpec {
            alpha1: family.alpha1().clone(),
            alpha2: family.alpha2().clone(),
            m1: family.m1(),
            m2: family.m2(),
            n: coeffs.n(),
            bound: coeffs.bound().clone(),
            a,
            b,
            eps: None,
            grid: None,
            precision: None,
        }
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let q = format_rational;
        let _ = writeln!(s, "[family]");
        let _ = writeln!(s, "alpha1 = {}", q(&self.alpha1));
        let _ = writeln!(s, "alpha2 = {}", q(&self.alpha2));
        let _ = writeln!(s, "m1 = {}", self.m1);
        let _ = writeln!(s, "m2 = {}", self.m2);
        let _ = writeln!(s, "\n[perturbation]");
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "K = {}", q(&self.bound));
        for ((i, j), v) in &self.a {
            let _ = writeln!(s, "a[{i},{j}] = {}", q(v));
        }
        for ((i, j), v) in &self.b {
            let _ = writeln!(s, "b[{i},{j}] = {}", q(v));
        }
        if self.eps.is_some() || self.grid.is_some() || self.precision.is_some() {
            let _ = writeln!(s, "\n[run]");
            if let Some(e) = &self.eps {
                let _ = writeln!(s, "eps = {}", q(e));
            }
            if let Some(g) = self.grid {
                let _ = writeln!(s, "grid = {g}");
            }
            if let Some(p) = self.precision {
                let _ = writeln!(s, "precision = {p}");
            }
        }
        s
    }
}
