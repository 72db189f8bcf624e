//! Command dispatch and report formatting for the `berkspec` binary.

use std::fmt::Write as _;

use clap::ValueEnum;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::berkline::BerkPoint;
use crate::diffmod::{change_derivation, Derivation};
use crate::error::{Error, Result};
use crate::funcalc::{cauchy_idempotent, matrix_spectrum};
use crate::kompakt::{converges, neighborhood_basis};
use crate::linalg::QMatrix;
use crate::problem::{logmag_of, ProblemFile};
use crate::ratfun::{gauss_norm, laurent_split, pushforward_center_oracle};
use crate::scalars::{fmt_q, parse_q, q_to_wire, LogMag, Q};
use crate::spectra::{is_refined, multiradius, robba_decompose, spectrum_triangular};
use crate::variation::{approx_check, controlling_graph, scaled_schedule, vary_spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Spectrum,
    Radii,
    Decompose,
    Vary,
    Graph,
    Project,
    Approx,
    TopologyCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

/// Command-line overrides of the `[task]` section.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub point: Option<String>,
    pub twist: Option<String>,
    pub epsilon: Option<String>,
    pub lmax: Option<u32>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
}

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub csv: Option<String>,
    pub json: Value,
    /// False when a certification check failed; the exit code is then 2.
    pub certified: bool,
}

impl Report {
    pub fn render(&self, f: Format) -> Result<String> {
        match f {
            Format::Text => Ok(self.text.clone()),
            Format::Json => Ok(serde_json::to_string_pretty(&self.json).unwrap() + "\n"),
            Format::Csv => self
                .csv
                .clone()
                .ok_or(Error::Unsupported("this command has no CSV output".into())),
        }
    }
}

fn bad(flag: &str, v: &str) -> Error {
    Error::Parse {
        line: 0,
        column: 0,
        message: format!("bad value for --{flag}: '{v}'"),
    }
}

/// Apply overrides to the problem's task.
pub fn apply_overrides(pf: &mut ProblemFile, o: &Overrides) -> Result<()> {
    if let Some(s) = &o.point {
        let mut it = s.split(',');
        let (c, t) = match (it.next(), it.next(), it.next()) {
            (Some(c), Some(t), None) => (parse_q(c.trim()), parse_q(t.trim())),
            _ => return Err(bad("point", s)),
        };
        match (c, t) {
            (Some(c), Some(t)) => {
                // A point x_{c,r} is read on the branch of its own center.
                pf.task.center = None;
                pf.task.point = Some(BerkPoint::at(c, t));
            }
            _ => return Err(bad("point", s)),
        }
    }
    if let Some(s) = &o.twist {
        pf.task.twist = Some(parse_q(s.trim()).ok_or_else(|| bad("twist", s))?);
    }
    if let Some(s) = &o.epsilon {
        let x = parse_q(s.trim()).ok_or_else(|| bad("epsilon", s))?;
        pf.task.epsilon = Some(logmag_of(pf.p, &x, 0)?);
    }
    if let Some(l) = o.lmax {
        pf.task.lmax = Some(l);
    }
    if let Some(s) = o.steps {
        pf.task.steps = Some(s);
    }
    Ok(())
}

fn point(pf: &ProblemFile) -> Result<BerkPoint> {
    pf.task.point.clone().ok_or(Error::MissingField("task.point".into()))
}

fn branch(pf: &ProblemFile, x: &BerkPoint) -> Q {
    pf.task.center.clone().unwrap_or_else(|| x.center.clone())
}

pub fn run(cmd: Command, pf: &ProblemFile, seed: u64) -> Result<Report> {
    match cmd {
        Command::Spectrum => spectrum(pf, seed),
        Command::Radii => radii(pf),
        Command::Decompose => decompose(pf),
        Command::Vary => vary(pf),
        Command::Graph => graph(pf),
        Command::Project => project(pf),
        Command::Approx => approx(pf),
        Command::TopologyCheck => topology(pf),
    }
}

/// 0 on success, 2 when a certification failed, 1 on any other error.
pub fn exit_code(r: &Result<Report>) -> i32 {
    match r {
        Ok(rep) if rep.certified => 0,
        Ok(_) => 2,
        Err(e) if is_certified_failure(e) => 2,
        Err(_) => 1,
    }
}

pub fn is_certified_failure(e: &Error) -> bool {
    match e {
        Error::NotSeparated | Error::NeverStabilized(_) | Error::DiscontinuityDetected(_) => true,
        Error::AtSample { source, .. } => is_certified_failure(source),
        _ => false,
    }
}

fn spectrum(pf: &ProblemFile, seed: u64) -> Result<Report> {
    let p = pf.p;
    let m = pf.require_module()?;
    let x = point(pf)?;
    let c = branch(pf, &x);
    let s = spectrum_triangular(p, m, &x, &c)?;
    let refined = is_refined(p, &s);
    let rendered = s.orbits.render_with(&pf.constants);
    // Cross-check each Laurent constant against sampled values of the entry.
    let mc = change_derivation(m, &Derivation::Centered(c.clone()));
    let xc = BerkPoint::new(c.clone(), x.radius.clone());
    let mut oracle_ok = true;
    for i in 0..m.rank() {
        let g = &mc.matrix[(i, i)];
        if x.radius.is_zero() || !crate::ratfun::on_circle_poles(p, g, &c, &x.radius).is_empty() {
            continue;
        }
        let split = laurent_split(p, g, &c, &x.radius)?;
        let best = pushforward_center_oracle(p, g, &c, &xc.radius, 64, seed)?;
        oracle_ok &= gauss_norm(p, &split.remainder(), &c, &xc.radius)? == best;
    }
    let mut text = String::new();
    writeln!(text, "point: {}  branch: {}", x.render(p), fmt_q(&c)).unwrap();
    writeln!(text, "spectrum: {rendered}").unwrap();
    for (b, r) in s.blocks.iter().zip(&refined) {
        let idx: Vec<String> = b.indices.iter().map(|i| i.to_string()).collect();
        writeln!(
            text,
            "block {{{}}} rank {}: {}{}",
            idx.join(","),
            b.rank(),
            b.orbit.render_with(p, &pf.constants),
            if *r { " (refined)" } else { "" }
        )
        .unwrap();
    }
    writeln!(text, "separation certified: {}", s.separation_certified).unwrap();
    writeln!(text, "laurent constants minimal on samples: {oracle_ok}").unwrap();
    let json = json!({
        "point": x,
        "branch": q_to_wire(&c),
        "rendered": rendered,
        "spectrum": s,
        "refined": refined,
        "oracle_agrees": oracle_ok,
    });
    Ok(Report {
        text,
        csv: None,
        json,
        certified: oracle_ok,
    })
}

fn radii(pf: &ProblemFile) -> Result<Report> {
    let p = pf.p;
    let x = point(pf)?;
    let c = branch(pf, &x);
    let a = pf.task.twist.clone().unwrap_or_else(Q::zero);
    let s = spectrum_triangular(p, pf.require_module()?, &x, &c)?;
    let prof = multiradius(p, &s, &a);
    let mut text = format!("radii of nabla - {} at {}\n", fmt_q(&a), x.render(p));
    let mut csv = String::from("index,t_R\n");
    for (i, r) in prof.radii.iter().enumerate() {
        writeln!(text, "R_{} = {}", i + 1, r.render(p)).unwrap();
        writeln!(csv, "{},{}", i + 1, fmt_q(r.t().unwrap())).unwrap();
    }
    Ok(Report {
        text,
        csv: Some(csv),
        json: json!({ "point": x, "twist": q_to_wire(&a), "profile": prof }),
        certified: true,
    })
}

fn decompose(pf: &ProblemFile) -> Result<Report> {
    let p = pf.p;
    let x = point(pf)?;
    let c = branch(pf, &x);
    let s = spectrum_triangular(p, pf.require_module()?, &x, &c)?;
    let blocks = robba_decompose(&s)?;
    let mut text = String::new();
    for b in &blocks {
        let idx: Vec<String> = b.indices.iter().map(|i| i.to_string()).collect();
        writeln!(
            text,
            "{{{}}} rank {}: {}",
            idx.join(","),
            b.rank(),
            b.orbit.render_with(p, &pf.constants)
        )
        .unwrap();
    }
    Ok(Report {
        text,
        csv: None,
        json: json!({ "point": x, "blocks": blocks }),
        certified: true,
    })
}

fn vary(pf: &ProblemFile) -> Result<Report> {
    let p = pf.p;
    let m = pf.require_module()?;
    let (ta, tb) = pf.task.segment.clone().ok_or(Error::MissingField("task.segment".into()))?;
    let c = pf
        .task
        .center
        .clone()
        .or_else(|| pf.task.point.as_ref().map(|x| x.center.clone()))
        .unwrap_or_else(Q::zero);
    let tbl = vary_spectrum(p, m, &c, &ta, &tb, pf.task.steps.unwrap_or(21))?;
    let csv = tbl.to_csv();
    Ok(Report {
        text: csv.clone(),
        csv: Some(csv),
        json: serde_json::to_value(&tbl).unwrap(),
        certified: true,
    })
}

fn graph(pf: &ProblemFile) -> Result<Report> {
    let p = pf.p;
    let dom = pf.domain.as_ref().ok_or(Error::MissingField("[domain]".into()))?;
    let steps = pf.task.steps.unwrap_or(21);
    let g = controlling_graph(p, pf.require_module()?, dom, steps, &pf.task.offgraph)?;
    let mut text = String::new();
    let mut csv = String::from("center,t_start,t_end,spectrum_breakpoints,radii_breakpoints\n");
    let list = |v: &[Q]| v.iter().map(fmt_q).collect::<Vec<_>>().join(" ");
    for e in &g.edges {
        writeln!(
            text,
            "edge {}: spectrum breaks [{}], radii breaks [{}]",
            e.segment,
            list(&e.spectrum_breakpoints),
            list(&e.radii_breakpoints)
        )
        .unwrap();
        writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_q(&e.segment.center),
            fmt_q(&e.segment.t_start),
            fmt_q(&e.segment.t_end),
            list(&e.spectrum_breakpoints),
            list(&e.radii_breakpoints)
        )
        .unwrap();
    }
    for o in &g.off_graph {
        writeln!(
            text,
            "off-graph x_{{{},t={}}} hanging at t={}: {}",
            fmt_q(&o.center),
            fmt_q(&o.t),
            fmt_q(&o.attach_t),
            if o.ok { "ok" } else { "MISMATCH" }
        )
        .unwrap();
    }
    writeln!(text, "spectrum and radii graphs agree: {}", g.same_breakpoints).unwrap();
    let certified = g.same_breakpoints && g.off_graph.iter().all(|o| o.ok);
    Ok(Report {
        text,
        csv: Some(csv),
        json: serde_json::to_value(&g).unwrap(),
        certified,
    })
}

fn fmt_matrix(m: &QMatrix) -> String {
    (0..m.rows())
        .map(|i| {
            let r: Vec<String> = m.row(i).iter().map(fmt_q).collect();
            format!("[{}]", r.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn project(pf: &ProblemFile) -> Result<Report> {
    let p = pf.p;
    let a = pf.require_matrix()?;
    let disc = pf.task.cluster.clone().ok_or(Error::MissingField("task.cluster".into()))?;
    let e = cauchy_idempotent(p, a, &disc)?;
    let cl: Vec<String> = e.cluster.iter().map(|(l, m)| format!("{} (x{m})", fmt_q(l))).collect();
    let text = format!(
        "cluster in {}: {}\ne =\n{}\ncertified: {}\n",
        disc.render(p),
        cl.join(", "),
        fmt_matrix(&e.e),
        e.certified()
    );
    Ok(Report {
        text,
        csv: None,
        json: serde_json::to_value(&e).unwrap(),
        certified: e.certified(),
    })
}

fn approx(pf: &ProblemFile) -> Result<Report> {
    let p = pf.p;
    let m = pf.require_module()?;
    let x = point(pf)?;
    let c = branch(pf, &x);
    let eps = pf.task.epsilon.clone().unwrap_or(LogMag::p_pow(-1));
    let l_max = pf.task.lmax.unwrap_or(10);
    let r = approx_check(p, m, scaled_schedule(p, pf.perturbation()?), &x, &c, &eps, l_max)?;
    let mut text = format!("l0 = {} (l_max = {})\n", r.l0, r.l_max);
    for (i, (l, ex)) in r.radius_l0.iter().zip(&r.radius_exempt).enumerate() {
        let v = l.map_or("never".to_string(), |l| l.to_string());
        writeln!(text, "R_{} equal from l = {v}{}", i + 1, if *ex { " (limit radius 1)" } else { "" }).unwrap();
    }
    Ok(Report {
        text,
        csv: None,
        json: serde_json::to_value(&r).unwrap(),
        certified: true,
    })
}

fn topology(pf: &ProblemFile) -> Result<Report> {
    let p = pf.p;
    let a = pf.require_matrix()?;
    let b = pf.perturbation()?;
    let b = b.map(|f| f.as_constant().unwrap_or_default());
    let l_max = pf.task.lmax.unwrap_or(6);
    let limit = matrix_spectrum(p, a).points;
    let basis: Vec<_> = (1..=3).map(|n| neighborhood_basis(&limit, n)).collect();
    let seq = |l: u32| matrix_spectrum(p, &a.add(&b.scale(&p.pow(l as i64)))).points;
    let r = converges(seq, &limit, &basis, l_max)?;
    let l0: Vec<String> = r
        .l0
        .iter()
        .map(|l| l.map_or("never".into(), |l| l.to_string()))
        .collect();
    let text = format!(
        "limit: {}\nl0 per neighbourhood: {}\nconverged: {}\n",
        limit.render_with(&pf.constants),
        l0.join(", "),
        r.converged()
    );
    Ok(Report {
        text,
        csv: None,
        json: json!({ "limit": limit, "report": r }),
        certified: r.converged(),
    })
}
