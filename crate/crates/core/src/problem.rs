//! Plain-text problem files.
//!
//! ```text
//! # example A
//! [field]
//! p = 5
//!
//! [constants]
//! a = 1/25
//! c = 5
//!
//! [domain]
//! center = 0
//! log_radius = 0
//! punctures = 0, c
//! branch_floor = 3
//!
//! [module]
//! rank = 1
//! derivation = ddT          # or: centered 0
//! row = a/(T*(c-T))
//!
//! [matrix]                  # constant matrix for `project` / `topology-check`
//! row = 0, 1
//! row = 0, 1/5
//!
//! [task]
//! point = 0, 1              # center, t with radius p^-t
//! center = 0                # branch center
//! segment = 2, 1/2
//! steps = 21
//! twist = 0
//! epsilon = 1/5
//! lmax = 10
//! cluster = 0, 0            # closed disc: center, t
//! perturb = 1, 1, 1         # one row per line, scaled by p^l
//! offgraph = 1, 1/2         # disc center, t
//! ```
//!
//! Everything after `#` is a comment. Values in `[domain]` and `[task]` may
//! use the constants.

use std::collections::BTreeMap;

use crate::berkline::{BerkPoint, Disc};
use crate::diffmod::{Derivation, DiffModule};
use crate::error::{Error, Result};
use crate::expr::{parse_expr_at, parse_literal, Expr};
use crate::linalg::{QMatrix, RMatrix};
use crate::ratfun::RatFun;
use crate::scalars::{vp, LogMag, Prime, Q};
use crate::variation::PuncturedDisc;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Task {
    pub point: Option<BerkPoint>,
    pub center: Option<Q>,
    pub segment: Option<(Q, Q)>,
    pub steps: Option<usize>,
    pub twist: Option<Q>,
    pub epsilon: Option<LogMag>,
    pub lmax: Option<u32>,
    pub cluster: Option<Disc>,
    pub perturb: Vec<Vec<RatFun>>,
    pub offgraph: Vec<(Q, Q)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub p: Prime,
    /// In file order.
    pub constants: Vec<(String, Q)>,
    pub domain: Option<PuncturedDisc>,
    pub module: Option<DiffModule>,
    /// Source expressions of the module rows.
    pub rows: Vec<Vec<Expr>>,
    pub matrix: Option<QMatrix>,
    pub task: Task,
}

impl ProblemFile {
    pub fn require_module(&self) -> Result<&DiffModule> {
        self.module.as_ref().ok_or(Error::MissingField("[module]".into()))
    }

    pub fn require_matrix(&self) -> Result<&QMatrix> {
        self.matrix.as_ref().ok_or(Error::MissingField("[matrix]".into()))
    }

    pub fn perturbation(&self) -> Result<RMatrix> {
        if self.task.perturb.is_empty() {
            return Err(Error::MissingField("task.perturb".into()));
        }
        RMatrix::from_rows(self.task.perturb.clone())
    }
}

/// A rational power of `p` such as `1/5`, read as a magnitude.
pub fn logmag_of(p: Prime, x: &Q, line: usize) -> Result<LogMag> {
    match vp(p, x) {
        Some(v) if x == &p.pow(v) => Ok(LogMag::p_pow(v)),
        _ => Err(perr(
            line,
            1,
            format!("{} is not a power of {}", crate::scalars::fmt_q(x), p),
        )),
    }
}

struct Ctx {
    consts: BTreeMap<String, Q>,
}

impl Ctx {
    fn expr(&self, s: &str, line: usize, col: usize) -> Result<RatFun> {
        parse_expr_at(s, line, col)?.eval(&self.consts, line)
    }

    fn value(&self, s: &str, line: usize, col: usize) -> Result<Q> {
        parse_expr_at(s, line, col)?.eval_const(&self.consts, line)
    }

    /// Comma-separated constants.
    fn values(&self, s: &str, line: usize, col: usize) -> Result<Vec<Q>> {
        split(s, col)
            .into_iter()
            .map(|(v, c)| self.value(v, line, c))
            .collect()
    }

    fn pair(&self, s: &str, line: usize, col: usize) -> Result<(Q, Q)> {
        let v = self.values(s, line, col)?;
        match <[Q; 2]>::try_from(v) {
            Ok([a, b]) => Ok((a, b)),
            Err(_) => Err(perr(line, col + 1, "expected two comma-separated values")),
        }
    }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Split on commas, keeping each part's character offset.
fn split(s: &str, col: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if ch == ',' {
            out.push((&s[start..i], col + s[..start].chars().count()));
            start = i + 1;
        }
    }
    out.push((&s[start..], col + s[..start].chars().count()));
    out
}

fn parse_usize(s: &str, line: usize, col: usize) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| perr(line, col + 1, format!("expected a non-negative integer, got '{}'", s.trim())))
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let mut section = String::new();
    let mut p: Option<Prime> = None;
    let mut ctx = Ctx {
        consts: BTreeMap::new(),
    };
    let mut constants = Vec::new();
    let mut dom: BTreeMap<&str, (usize, usize, &str)> = BTreeMap::new();
    let mut rank: Option<(usize, usize)> = None;
    let mut derivation = Derivation::DdT;
    let mut rows: Vec<(usize, usize, &str)> = Vec::new();
    let mut mrows: Vec<(usize, usize, &str)> = Vec::new();
    let mut task_lines: Vec<(usize, usize, &str, &str)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap();
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| perr(line, raw.len(), "expected ']'"))?;
            if !["field", "constants", "domain", "module", "matrix", "task"].contains(&name) {
                return Err(perr(line, 2, format!("unknown section '{name}'")));
            }
            section = name.to_string();
            continue;
        }
        let eq = body
            .find('=')
            .ok_or_else(|| perr(line, 1, "expected 'key = value'"))?;
        let key = body[..eq].trim();
        let val = &body[eq + 1..];
        // Offset of the value, so that expression columns are 1-based.
        let vcol = body[..eq + 1].chars().count();
        match section.as_str() {
            "field" if key == "p" => {
                let v = parse_usize(val, line, vcol)? as u64;
                p = Some(Prime::new(v)?);
            }
            "constants" => {
                if !key.chars().all(|c| c.is_alphanumeric() || c == '_') || key.is_empty() || key == "T" {
                    return Err(perr(line, 1, format!("bad constant name '{key}'")));
                }
                let q = parse_literal(key, val)?;
                ctx.consts.insert(key.to_string(), q.clone());
                constants.push((key.to_string(), q));
            }
            "domain" if ["center", "log_radius", "punctures", "branch_floor"].contains(&key) => {
                dom.insert(key, (line, vcol, val));
            }
            "module" if key == "rank" => rank = Some((parse_usize(val, line, vcol)?, line)),
            "module" if key == "derivation" => {
                let v = val.trim();
                derivation = if v == "ddT" {
                    Derivation::DdT
                } else if let Some(c) = v.strip_prefix("centered") {
                    Derivation::Centered(ctx.value(c, line, vcol)?)
                } else {
                    return Err(perr(line, vcol + 1, format!("unknown derivation '{v}'")));
                };
            }
            "module" if key == "row" => rows.push((line, vcol, val)),
            "matrix" if key == "row" => mrows.push((line, vcol, val)),
            "task" => task_lines.push((line, vcol, key, val)),
            "" => return Err(perr(line, 1, "key outside of any section")),
            s => return Err(perr(line, 1, format!("unknown key '{key}' in [{s}]"))),
        }
    }
    let p = p.ok_or(Error::MissingField("field.p".into()))?;

    let mut exprs = Vec::new();
    let module = if rows.is_empty() && rank.is_none() {
        None
    } else {
        let (n, rline) = rank.ok_or(Error::MissingField("module.rank".into()))?;
        if rows.len() != n {
            return Err(perr(rline, 1, format!("rank {n} but {} rows", rows.len())));
        }
        let mut m = Vec::new();
        for (line, col, s) in &rows {
            let parts = split(s, *col);
            if parts.len() != n {
                return Err(perr(*line, *col + 1, format!("expected {n} entries")));
            }
            let mut er = Vec::new();
            let mut vr = Vec::new();
            for (v, c) in parts {
                let e = parse_expr_at(v, *line, c)?;
                vr.push(e.eval(&ctx.consts, *line)?);
                er.push(e);
            }
            exprs.push(er);
            m.push(vr);
        }
        Some(DiffModule::new(RMatrix::from_rows(m)?, derivation)?)
    };

    let matrix = if mrows.is_empty() {
        None
    } else {
        let m = mrows
            .iter()
            .map(|(line, col, s)| ctx.values(s, *line, *col))
            .collect::<Result<Vec<_>>>()?;
        let m = QMatrix::from_rows(m)?;
        if !m.is_square() {
            return Err(Error::Dimension("[matrix] must be square".into()));
        }
        Some(m)
    };

    let domain = if dom.is_empty() {
        None
    } else {
        let get = |k: &str| dom.get(k).ok_or(Error::MissingField(format!("domain.{k}")));
        let (l, c, v) = get("center")?;
        let center = ctx.value(v, *l, *c)?;
        let (l, c, v) = get("log_radius")?;
        let log_radius = ctx.value(v, *l, *c)?;
        let (l, c, v) = get("punctures")?;
        let punctures = ctx.values(v, *l, *c)?;
        let (l, c, v) = get("branch_floor")?;
        let floor = ctx.value(v, *l, *c)?;
        Some(PuncturedDisc {
            center,
            log_radius,
            punctures,
            floor,
        })
    };

    let mut task = Task::default();
    for (line, col, key, val) in task_lines {
        match key {
            "point" => {
                let (c, t) = ctx.pair(val, line, col)?;
                task.point = Some(BerkPoint::at(c, t));
            }
            "center" => task.center = Some(ctx.value(val, line, col)?),
            "segment" => task.segment = Some(ctx.pair(val, line, col)?),
            "steps" => task.steps = Some(parse_usize(val, line, col)?),
            "twist" => task.twist = Some(ctx.value(val, line, col)?),
            "epsilon" => task.epsilon = Some(logmag_of(p, &ctx.value(val, line, col)?, line)?),
            "lmax" => task.lmax = Some(parse_usize(val, line, col)? as u32),
            "cluster" => {
                let (c, t) = ctx.pair(val, line, col)?;
                task.cluster = Some(Disc::closed(c, LogMag::from_t(t)));
            }
            "perturb" => {
                let r = split(val, col)
                    .into_iter()
                    .map(|(v, c)| ctx.expr(v, line, c))
                    .collect::<Result<Vec<_>>>()?;
                task.perturb.push(r);
            }
            "offgraph" => task.offgraph.push(ctx.pair(val, line, col)?),
            _ => return Err(perr(line, 1, format!("unknown key '{key}' in [task]"))),
        }
    }

    Ok(ProblemFile {
        p,
        constants,
        domain,
        module,
        rows: exprs,
        matrix,
        task,
    })
}
