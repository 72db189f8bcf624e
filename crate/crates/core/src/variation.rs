//! How spectra move along segments `[x_{c,p^-a}, x_{c,p^-b}]`: sampling,
//! exact piecewise log-affine fits, junction checks, controlling graphs and
//! the perturbation harness.

use num_traits::{One, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::berkline::{BerkPoint, Segment};
use crate::diffmod::DiffModule;
use crate::error::{Error, Result};
use crate::kompakt::{orbit_eq, CompactSet, Orbit};
use crate::linalg::RMatrix;
use crate::scalars::{dist_zp, fmt_q, q_to_wire, qi, vp, LogMag, Prime, Q};
use crate::spectra::{multiradius, sigma_from_radius, spectrum_triangular, SpectrumResult};

#[derive(Debug, Clone, PartialEq)]
pub struct VariationTable {
    pub p: Prime,
    pub segment: Segment,
    /// Sorted by `t`.
    pub rows: Vec<(Q, SpectrumResult)>,
}

impl VariationTable {
    /// One family per diagonal entry.
    pub fn families(&self) -> usize {
        self.rows.first().map_or(0, |(_, s)| s.diagonal.len())
    }

    pub fn family(&self, i: usize) -> Vec<(Q, Orbit)> {
        self.rows
            .iter()
            .map(|(t, s)| (t.clone(), s.diagonal[i].clone()))
            .collect()
    }

    /// Columns `t, center_i, t_sigma_i`; `t_sigma` is `inf` when the orbit has
    /// radius zero.
    pub fn to_csv(&self) -> String {
        let n = self.families();
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",center_{i},t_sigma_{i}"));
        }
        out.push('\n');
        for (t, s) in &self.rows {
            out.push_str(&fmt_q(t));
            for o in &s.diagonal {
                let ts = o.radius.t().map_or("inf".to_string(), fmt_q);
                out.push_str(&format!(",{},{}", fmt_q(&o.center), ts));
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for VariationTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            t: String,
            spectrum: &'a SpectrumResult,
        }
        let mut st = s.serialize_struct("VariationTable", 2)?;
        st.serialize_field(
            "segment",
            &serde_json::json!({
                "center": q_to_wire(&self.segment.center),
                "t_start": q_to_wire(&self.segment.t_start),
                "t_end": q_to_wire(&self.segment.t_end),
            }),
        )?;
        let rows: Vec<Row> = self
            .rows
            .iter()
            .map(|(t, sp)| Row {
                t: q_to_wire(t),
                spectrum: sp,
            })
            .collect();
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

/// Spectra at `steps` evenly spaced points between `t_a` and `t_b` on the
/// branch of `c`.
pub fn vary_spectrum(
    p: Prime,
    m: &DiffModule,
    c: &Q,
    t_a: &Q,
    t_b: &Q,
    steps: usize,
) -> Result<VariationTable> {
    if steps < 2 {
        return Err(Error::InsufficientSamples(format!("steps = {steps}")));
    }
    if t_a == t_b {
        return Err(Error::InvalidInterval(format!("empty segment at t = {}", fmt_q(t_a))));
    }
    let (lo, hi) = if t_a < t_b { (t_a, t_b) } else { (t_b, t_a) };
    let segment = Segment::new(c.clone(), lo.clone(), hi.clone());
    let rows = segment
        .ts(steps)
        .into_iter()
        .map(|t| {
            let x = BerkPoint::at(c.clone(), t.clone());
            spectrum_triangular(p, m, &x, c)
                .map(|s| (t.clone(), s))
                .map_err(|e| Error::AtSample {
                    t,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VariationTable { p, segment, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `t_sigma = slope * t + intercept`.
    Affine {
        #[serde(with = "crate::scalars::qstr")]
        slope: Q,
        #[serde(with = "crate::scalars::qstr")]
        intercept: Q,
    },
    /// `sigma = 0` throughout.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    #[serde(with = "crate::scalars::qstr")]
    pub lo: Q,
    #[serde(with = "crate::scalars::qstr")]
    pub hi: Q,
    pub shape: Shape,
}

impl Piece {
    fn eval(&self, t: &Q) -> LogMag {
        match &self.shape {
            Shape::Affine { slope, intercept } => LogMag::from_t(slope * t + intercept),
            Shape::Zero => LogMag::Zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLogAffine {
    #[serde(serialize_with = "ser_qs")]
    pub breakpoints: Vec<Q>,
    pub pieces: Vec<Piece>,
}

fn ser_qs<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(q_to_wire))
}

impl PiecewiseLogAffine {
    /// Largest slope denominator.
    pub fn max_denominator(&self) -> num_bigint::BigInt {
        self.pieces
            .iter()
            .filter_map(|pc| match &pc.shape {
                Shape::Affine { slope, .. } => Some(slope.denom().clone()),
                Shape::Zero => None,
            })
            .max()
            .unwrap_or_else(num_bigint::BigInt::one)
    }

    /// Limit from below at `t`.
    pub fn left_limit(&self, t: &Q) -> Option<LogMag> {
        self.pieces
            .iter()
            .find(|pc| &pc.lo < t && t <= &pc.hi)
            .map(|pc| pc.eval(t))
    }

    /// Limit from above at `t`.
    pub fn right_limit(&self, t: &Q) -> Option<LogMag> {
        self.pieces
            .iter()
            .find(|pc| &pc.lo <= t && t < &pc.hi)
            .map(|pc| pc.eval(t))
    }
}

/// Exact fit of sampled `(t, t_sigma)` pairs, `None` meaning `sigma = 0`.
///
/// A change of slope either happens at a sample, or inside one sampling
/// interval, in which case the breakpoint is the intersection of the two
/// neighbouring lines.
pub fn fit_samples(samples: &[(Q, Option<Q>)]) -> Result<PiecewiseLogAffine> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples(format!("{} samples", samples.len())));
    }
    let mut pieces = Vec::new();
    let mut breakpoints = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        let zero = samples[i].1.is_none();
        let mut j = i;
        while j + 1 < samples.len() && samples[j + 1].1.is_none() == zero {
            j += 1;
        }
        let run = &samples[i..=j];
        if zero {
            pieces.push(Piece {
                lo: run[0].0.clone(),
                hi: run[run.len() - 1].0.clone(),
                shape: Shape::Zero,
            });
        } else {
            fit_run(run, &mut pieces, &mut breakpoints)?;
        }
        if j + 1 < samples.len() {
            breakpoints.push(samples[j + 1].0.clone());
            // Extend across the gap so every t in range has a piece.
            let last = pieces.last_mut().unwrap();
            if last.shape == Shape::Zero {
                last.hi = samples[j + 1].0.clone();
            }
        }
        i = j + 1;
    }
    Ok(PiecewiseLogAffine {
        breakpoints,
        pieces,
    })
}

fn fit_run(run: &[(Q, Option<Q>)], pieces: &mut Vec<Piece>, bps: &mut Vec<Q>) -> Result<()> {
    let pt = |k: usize| (&run[k].0, run[k].1.as_ref().unwrap());
    if run.len() == 1 {
        let (t, y) = pt(0);
        pieces.push(Piece {
            lo: t.clone(),
            hi: t.clone(),
            shape: Shape::Affine {
                slope: Q::zero(),
                intercept: y.clone(),
            },
        });
        return Ok(());
    }
    let slopes: Vec<Q> = (0..run.len() - 1)
        .map(|k| {
            let (t0, y0) = pt(k);
            let (t1, y1) = pt(k + 1);
            (y1 - y0) / (t1 - t0)
        })
        .collect();
    let mut start = run[0].0.clone();
    let mut m = slopes[0].clone();
    let mut anchor = (pt(0).0.clone(), pt(0).1.clone());
    let mut k = 1;
    let line = |m: &Q, a: &(Q, Q)| (m.clone(), &a.1 - m * &a.0);
    while k < slopes.len() {
        if slopes[k] == m {
            k += 1;
            continue;
        }
        let (t_k, y_k) = pt(k);
        let next_same = k + 1 >= slopes.len() || slopes[k + 1] == slopes[k];
        if next_same {
            // Kink exactly at sample k.
            let (s, b) = line(&m, &anchor);
            pieces.push(Piece {
                lo: start,
                hi: t_k.clone(),
                shape: Shape::Affine {
                    slope: s,
                    intercept: b,
                },
            });
            bps.push(t_k.clone());
            start = t_k.clone();
            m = slopes[k].clone();
            anchor = (t_k.clone(), y_k.clone());
            k += 1;
        } else {
            // Slope k is a transition between m and slopes[k+1].
            let m2 = slopes[k + 1].clone();
            if k + 2 < slopes.len() && slopes[k + 2] != m2 {
                return Err(Error::NotPiecewiseAffine(
                    t_k.clone(),
                    pt(k + 1).0.clone(),
                    pt(k + 2).0.clone(),
                ));
            }
            let (t1, y1) = pt(k + 1);
            if m == m2 {
                return Err(Error::NotPiecewiseAffine(
                    pt(k - 1).0.clone(),
                    t_k.clone(),
                    t1.clone(),
                ));
            }
            let tau = (y1 - y_k + &m * t_k - &m2 * t1) / (&m - &m2);
            if !(&tau > t_k && &tau < t1) {
                return Err(Error::NotPiecewiseAffine(
                    pt(k - 1).0.clone(),
                    t_k.clone(),
                    t1.clone(),
                ));
            }
            let (s, b) = line(&m, &anchor);
            pieces.push(Piece {
                lo: start,
                hi: tau.clone(),
                shape: Shape::Affine {
                    slope: s,
                    intercept: b,
                },
            });
            bps.push(tau.clone());
            start = tau;
            m = m2;
            anchor = (t1.clone(), y1.clone());
            k += 2;
        }
    }
    let (s, b) = line(&m, &anchor);
    pieces.push(Piece {
        lo: start,
        hi: run[run.len() - 1].0.clone(),
        shape: Shape::Affine {
            slope: s,
            intercept: b,
        },
    });
    Ok(())
}

pub fn fit_log_affine(tbl: &VariationTable, family: usize) -> Result<PiecewiseLogAffine> {
    if family >= tbl.families() {
        return Err(Error::OutOfRange(format!("family {family}")));
    }
    let samples: Vec<(Q, Option<Q>)> = tbl
        .family(family)
        .into_iter()
        .map(|(t, o)| (t, o.radius.t().cloned()))
        .collect();
    fit_samples(&samples)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JunctionReport {
    #[serde(with = "crate::scalars::qstr")]
    pub t0: Q,
    pub left: Vec<Orbit>,
    pub right: Vec<Orbit>,
    /// Orbits of the row at `t0`, when `t0` is a sample.
    pub at: Option<Vec<Orbit>>,
    /// Per family: the one-sided center labels differ.
    pub labels_differ: Vec<bool>,
}

/// One-sided limits of every family at `t0`, compared as compact sets.
pub fn junction_check(tbl: &VariationTable, t0: &Q) -> Result<JunctionReport> {
    let p = tbl.p;
    let first = &tbl.rows.first().ok_or(Error::InsufficientSamples("empty table".into()))?.0;
    let last = &tbl.rows.last().unwrap().0;
    if t0 <= first || t0 >= last {
        return Err(Error::InvalidInterval(format!("{} is not interior", fmt_q(t0))));
    }
    let at_row = tbl.rows.iter().find(|(t, _)| t == t0);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut labels_differ = Vec::new();
    for i in 0..tbl.families() {
        let fit = fit_log_affine(tbl, i).map_err(|e| match e {
            Error::NotPiecewiseAffine(..) => Error::DiscontinuityDetected(t0.clone()),
            e => e,
        })?;
        let fam = tbl.family(i);
        let lab_l = fam.iter().rev().find(|(t, _)| t < t0).unwrap().1.center.clone();
        let lab_r = fam.iter().find(|(t, _)| t > t0).unwrap().1.center.clone();
        let sl = fit.left_limit(t0).ok_or(Error::DiscontinuityDetected(t0.clone()))?;
        let sr = fit.right_limit(t0).ok_or(Error::DiscontinuityDetected(t0.clone()))?;
        let ol = Orbit::new(lab_l.clone(), sl);
        let or = Orbit::new(lab_r.clone(), sr);
        if !orbit_eq(p, &ol, &or) {
            return Err(Error::DiscontinuityDetected(t0.clone()));
        }
        if let Some((_, s)) = at_row {
            if !orbit_eq(p, &ol, &s.diagonal[i]) {
                return Err(Error::DiscontinuityDetected(t0.clone()));
            }
        }
        labels_differ.push(lab_l != lab_r);
        left.push(ol);
        right.push(or);
    }
    if !CompactSet::new(p, left.clone()).set_eq(&CompactSet::new(p, right.clone())) {
        return Err(Error::DiscontinuityDetected(t0.clone()));
    }
    Ok(JunctionReport {
        t0: t0.clone(),
        left,
        right,
        at: at_row.map(|(_, s)| s.diagonal.clone()),
        labels_differ,
    })
}

/// A closed disc `D(center, p^-log_radius)` with open holes
/// `D^-(q, p^-floor)` around each puncture.
#[derive(Debug, Clone, PartialEq)]
pub struct PuncturedDisc {
    pub center: Q,
    pub log_radius: Q,
    pub punctures: Vec<Q>,
    pub floor: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub segment: Segment,
    pub spectrum_breakpoints: Vec<Q>,
    pub radii_breakpoints: Vec<Q>,
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Edge", 5)?;
        st.serialize_field("center", &q_to_wire(&self.segment.center))?;
        st.serialize_field("t_start", &q_to_wire(&self.segment.t_start))?;
        st.serialize_field("t_end", &q_to_wire(&self.segment.t_end))?;
        let qs = |v: &[Q]| v.iter().map(q_to_wire).collect::<Vec<_>>();
        st.serialize_field("spectrum_breakpoints", &qs(&self.spectrum_breakpoints))?;
        st.serialize_field("radii_breakpoints", &qs(&self.radii_breakpoints))?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffGraphCheck {
    #[serde(with = "crate::scalars::qstr")]
    pub center: Q,
    #[serde(with = "crate::scalars::qstr")]
    pub t: Q,
    /// Graph point the disc hangs from.
    #[serde(with = "crate::scalars::qstr")]
    pub attach_t: Q,
    pub predicted: Vec<LogMag>,
    pub computed: Vec<LogMag>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlGraph {
    pub edges: Vec<Edge>,
    pub samples_per_edge: usize,
    /// Spectrum and radii break at the same places on every edge.
    pub same_breakpoints: bool,
    pub off_graph: Vec<OffGraphCheck>,
}

fn sorted_union(mut v: Vec<Q>) -> Vec<Q> {
    v.sort();
    v.dedup();
    v
}

fn radius_fits(p: Prime, tbl: &VariationTable) -> Result<Vec<Q>> {
    let profiles: Vec<(Q, Vec<LogMag>)> = tbl
        .rows
        .iter()
        .map(|(t, s)| (t.clone(), multiradius(p, s, &Q::zero()).radii))
        .collect();
    let n = profiles[0].1.len();
    let mut bps = Vec::new();
    for i in 0..n {
        // t_R = 0 means R = 1; treat like a zero run so the fit stays exact.
        let samples: Vec<(Q, Option<Q>)> = profiles
            .iter()
            .map(|(t, r)| {
                let tr = r[i].t().cloned().unwrap_or_default();
                (t.clone(), (!tr.is_zero()).then_some(tr))
            })
            .collect();
        bps.extend(fit_samples(&samples)?.breakpoints);
    }
    Ok(sorted_union(bps))
}

/// Branches from the boundary to every hole, sampled, fitted and compared
/// with the radii; off-graph discs listed in `off` as `(center, t)` are
/// checked against the constant-radius formula.
pub fn controlling_graph(
    p: Prime,
    m: &DiffModule,
    dom: &PuncturedDisc,
    steps: usize,
    off: &[(Q, Q)],
) -> Result<ControlGraph> {
    let mut edges = Vec::new();
    for (k, q) in dom.punctures.iter().enumerate() {
        let mut start = dom.log_radius.clone();
        for q2 in &dom.punctures[..k] {
            if let Some(v) = vp(p, &(q - q2)) {
                start = start.max(qi(v));
            }
        }
        if start >= dom.floor {
            continue;
        }
        let tbl = vary_spectrum(p, m, q, &start, &dom.floor, steps)?;
        let mut sb = Vec::new();
        for i in 0..tbl.families() {
            sb.extend(fit_log_affine(&tbl, i)?.breakpoints);
        }
        edges.push(Edge {
            segment: tbl.segment.clone(),
            spectrum_breakpoints: sorted_union(sb),
            radii_breakpoints: radius_fits(p, &tbl)?,
        });
    }
    let same_breakpoints = edges
        .iter()
        .all(|e| e.spectrum_breakpoints == e.radii_breakpoints);
    let off_graph = off
        .iter()
        .map(|(y, t)| off_graph_check(p, m, dom, y, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ControlGraph {
        edges,
        samples_per_edge: steps,
        same_breakpoints,
        off_graph,
    })
}

/// Radii are constant on a disc hanging off the graph, so at `x_{y,rho}` the
/// normalised radius is `min(1, R_abs / rho)` and the orbit radius follows.
fn off_graph_check(p: Prime, m: &DiffModule, dom: &PuncturedDisc, y: &Q, t: &Q) -> Result<OffGraphCheck> {
    // The attaching point, read on the branch it belongs to.
    let (attach_t, branch) = dom
        .punctures
        .iter()
        .filter_map(|q| vp(p, &(y - q)).map(|v| (qi(v), q.clone())))
        .fold((dom.log_radius.clone(), dom.center.clone()), |a, b| if b.0 > a.0 { b } else { a });
    if t <= &attach_t {
        return Err(Error::InvalidInterval(format!(
            "x_{{{}, t={}}} is on the graph",
            fmt_q(y),
            fmt_q(t)
        )));
    }
    let z = BerkPoint::at(branch.clone(), attach_t.clone());
    let sz = spectrum_triangular(p, m, &z, &branch)?;
    let mut predicted = multiradius(p, &sz, &Q::zero())
        .radii
        .iter()
        .map(|r| {
            // Absolute radius at z, normalised at x_{y,rho}.
            let rn = r.mul(&LogMag::from_t(&attach_t - t));
            sigma_from_radius(p, &rn.min(LogMag::one()))
        })
        .collect::<Result<Vec<_>>>()?;
    let sy = spectrum_triangular(p, m, &BerkPoint::at(y.clone(), t.clone()), y)?;
    let mut computed: Vec<LogMag> = sy.diagonal.iter().map(|o| o.radius.clone()).collect();
    predicted.sort();
    computed.sort();
    Ok(OffGraphCheck {
        center: y.clone(),
        t: t.clone(),
        attach_t,
        ok: predicted == computed,
        predicted,
        computed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    /// Least `l0` such that every `l` in `l0..=l_max` matches.
    pub l0: u32,
    pub l_max: u32,
    /// Per sorted index: least `l` from which the radius equals the limit
    /// radius through `l_max`.
    pub radius_l0: Vec<Option<u32>>,
    /// Per sorted index: the limit radius is 1, where equality is not expected.
    pub radius_exempt: Vec<bool>,
    pub limit_radii: Vec<LogMag>,
    /// Radii of each perturbed module, indexed by `l`.
    pub radii: Vec<Vec<LogMag>>,
}

/// `p^l * base`, the usual perturbation schedule.
pub fn scaled_schedule(p: Prime, base: RMatrix) -> impl Fn(u32) -> RMatrix {
    move |l| base.scale(&crate::ratfun::RatFun::constant(p.pow(l as i64)))
}

fn in_tube(p: Prime, o: &Orbit, a: &Q, eps: &LogMag) -> bool {
    &o.radius < eps && &dist_zp(p, &(&o.center - a)) < eps
}

fn matches(p: Prime, base: &SpectrumResult, s: &SpectrumResult, eps: &LogMag) -> bool {
    let mut used = vec![false; s.blocks.len()];
    for b in &base.blocks {
        if b.orbit.radius.is_zero() {
            let mut rank = 0;
            for (k, bl) in s.blocks.iter().enumerate() {
                if !used[k] && in_tube(p, &bl.orbit, &b.orbit.center, eps) {
                    used[k] = true;
                    rank += bl.rank();
                }
            }
            if rank != b.rank() {
                return false;
            }
        } else {
            match s
                .blocks
                .iter()
                .enumerate()
                .find(|(k, bl)| !used[*k] && orbit_eq(p, &bl.orbit, &b.orbit))
            {
                Some((k, bl)) if bl.rank() == b.rank() => used[k] = true,
                _ => return false,
            }
        }
    }
    used.iter().all(|u| *u)
}

/// Perturb `m` by `delta(l)` for `l = 0..=l_max` and find where spectra settle.
pub fn approx_check(
    p: Prime,
    m: &DiffModule,
    delta: impl Fn(u32) -> RMatrix,
    x: &BerkPoint,
    c: &Q,
    eps: &LogMag,
    l_max: u32,
) -> Result<ApproxReport> {
    let base = spectrum_triangular(p, m, x, c)?;
    let limit_radii = multiradius(p, &base, &Q::zero()).radii;
    let mut ok = Vec::new();
    let mut radii = Vec::new();
    for l in 0..=l_max {
        let ml = DiffModule::new(m.matrix.add(&delta(l)), m.derivation.clone())?;
        let s = spectrum_triangular(p, &ml, x, c).map_err(|e| Error::AtSample {
            t: qi(l as i64),
            source: Box::new(e),
        })?;
        ok.push(matches(p, &base, &s, eps));
        radii.push(multiradius(p, &s, &Q::zero()).radii);
    }
    let l0 = match ok.iter().rposition(|b| !b) {
        None => 0,
        Some(k) if k as u32 == l_max => return Err(Error::NeverStabilized(l_max)),
        Some(k) => k as u32 + 1,
    };
    let radius_l0 = (0..limit_radii.len())
        .map(|i| {
            match radii.iter().rposition(|r| r[i] != limit_radii[i]) {
                None => Some(0),
                Some(k) if k as u32 == l_max => None,
                Some(k) => Some(k as u32 + 1),
            }
        })
        .collect();
    Ok(ApproxReport {
        l0,
        l_max,
        radius_l0,
        radius_exempt: limit_radii.iter().map(|r| r.is_one()).collect(),
        limit_radii,
        radii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmod::Derivation;
    use crate::poly::Poly;
    use crate::ratfun::RatFun;
    use crate::scalars::q;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    fn example_a() -> DiffModule {
        // a / (T (c - T)) with a = 1/25, c = 5.
        let den = &Poly::t() * &(-&Poly::linear(&qi(5)));
        let g = RatFun::new(Poly::constant(q(1, 25)), den).unwrap();
        DiffModule::new(RMatrix::from_rows(vec![vec![g]]).unwrap(), Derivation::DdT).unwrap()
    }

    #[test]
    fn fit_kink_between_samples() {
        let s = |t: Q| {
            let y = if t > qi(1) { &t - qi(4) } else { qi(-2) - &t };
            (t, Some(y))
        };
        let samples: Vec<_> = [q(1, 3), q(2, 3), q(4, 3), qi(2)].into_iter().map(s).collect();
        let f = fit_samples(&samples).unwrap();
        assert_eq!(f.breakpoints, vec![qi(1)]);
        assert_eq!(f.left_limit(&qi(1)), Some(LogMag::from_t(qi(-3))));
        assert_eq!(f.right_limit(&qi(1)), Some(LogMag::from_t(qi(-3))));
    }

    #[test]
    fn fit_rejects_jump() {
        let samples: Vec<_> = [(0, 0), (1, 1), (2, 5), (3, 3), (4, 4)]
            .into_iter()
            .map(|(t, y)| (qi(t), Some(qi(y))))
            .collect();
        assert!(matches!(fit_samples(&samples), Err(Error::NotPiecewiseAffine(..))));
    }

    #[test]
    fn example_a_variation() {
        let p = p5();
        let tbl = vary_spectrum(p, &example_a(), &qi(0), &qi(2), &q(1, 2), 7).unwrap();
        let f = fit_log_affine(&tbl, 0).unwrap();
        assert_eq!(f.breakpoints, vec![qi(1)]);
        let r = junction_check(&tbl, &qi(1)).unwrap();
        assert_eq!(r.labels_differ, vec![true]);
        assert_eq!(r.left[0].radius, LogMag::p_pow(3));
        assert!(tbl.to_csv().starts_with("t,center_1,t_sigma_1\n1/2,0,-5/2\n"));
    }

    #[test]
    fn corrupted_table() {
        let p = p5();
        let mut tbl = vary_spectrum(p, &example_a(), &qi(0), &qi(2), &q(1, 2), 7).unwrap();
        tbl.rows[5].1.diagonal[0].radius = LogMag::p_pow(7);
        assert!(matches!(
            junction_check(&tbl, &tbl.rows[4].0.clone()),
            Err(Error::DiscontinuityDetected(_))
        ));
    }
}
