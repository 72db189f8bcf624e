//! Points, discs and affinoid domains of the Berkovich projective line over
//! Q with the p-adic absolute value.
//!
//! Membership questions for Boolean combinations of discs are decided by
//! evaluating at a finite set of test points. Along the ray `x_{c,rho}` the
//! value `|T - a|` is `max(|c - a|, rho)`, so a set cut out by discs can only
//! change where `rho` crosses a disc radius or a pairwise distance.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kompakt::{orbit_meets, CompactSet, OrbitKind};
use crate::scalars::{abs, ceil_q, fmt_q, parse_q, q_to_wire, qi, to_i64, LogMag, Prime, Q};

/// `x_{c,r}`; type 1 when `r = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BerkPoint {
    pub center: Q,
    pub radius: LogMag,
}

impl BerkPoint {
    pub fn new(center: Q, radius: LogMag) -> Self {
        BerkPoint { center, radius }
    }

    /// `x_{c, p^-t}`.
    pub fn at(center: Q, t: Q) -> Self {
        BerkPoint::new(center, LogMag::from_t(t))
    }

    pub fn equiv(&self, p: Prime, o: &BerkPoint) -> bool {
        self.radius == o.radius && abs(p, &(&self.center - &o.center)) <= self.radius
    }

    /// `|T - a|` at this point.
    pub fn value(&self, p: Prime, a: &Q) -> LogMag {
        abs(p, &(&self.center - a)).max(self.radius.clone())
    }

    pub fn render(&self, p: Prime) -> String {
        format!("x_{{{},{}}}", fmt_q(&self.center), self.radius.render(p))
    }
}

impl Serialize for BerkPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("center", &q_to_wire(&self.center))?;
        match &self.radius {
            LogMag::Zero => m.serialize_entry("log_radius", "infinity")?,
            LogMag::Pow(t) => m.serialize_entry("log_radius", &q_to_wire(t))?,
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for BerkPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            center: String,
            log_radius: String,
        }
        let raw = Raw::deserialize(d)?;
        let center = parse_q(&raw.center)
            .ok_or_else(|| de::Error::custom(format!("bad rational {}", raw.center)))?;
        let radius = if raw.log_radius == "infinity" {
            LogMag::Zero
        } else {
            LogMag::Pow(
                parse_q(&raw.log_radius)
                    .ok_or_else(|| de::Error::custom(format!("bad rational {}", raw.log_radius)))?,
            )
        };
        Ok(BerkPoint { center, radius })
    }
}

pub fn point_type(x: &BerkPoint) -> u8 {
    if x.radius.is_zero() {
        1
    } else {
        2
    }
}

/// A point of the projective line: finite or the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PPoint {
    Finite(BerkPoint),
    Infinity,
}

/// Modulus `r1/r2` and length `-log_p` of it for the annulus `r1 <= |T-c| <= r2`.
pub fn annulus_invariants(r1: &LogMag, r2: &LogMag) -> Result<(LogMag, Q)> {
    if r1.is_zero() || r1 > r2 {
        return Err(Error::InvalidInterval(format!("{r1} > {r2} or zero inner radius")));
    }
    let m = r1.div(r2).expect("r2 > 0");
    let len = m.t().cloned().expect("nonzero modulus");
    Ok((m, len))
}

/// A disc of the projective line.
///
/// With `contains_infinity` the set is the complement of the stated disc:
/// `{|T-c| > r}` when `closed`, `{|T-c| >= r}` when not.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Disc {
    pub center: Q,
    pub radius: LogMag,
    pub closed: bool,
    pub contains_infinity: bool,
}

impl Disc {
    /// `{|T-c| <= r}`.
    pub fn closed(center: Q, radius: LogMag) -> Self {
        Disc {
            center,
            radius,
            closed: true,
            contains_infinity: false,
        }
    }

    /// `{|T-c| < r}`.
    pub fn open(center: Q, radius: LogMag) -> Self {
        Disc {
            center,
            radius,
            closed: false,
            contains_infinity: false,
        }
    }

    /// `P^1 minus {|T-c| < r}`, a closed disc through infinity.
    pub fn closed_outside(center: Q, radius: LogMag) -> Self {
        Disc {
            center,
            radius,
            closed: false,
            contains_infinity: true,
        }
    }

    /// `P^1 minus {|T-c| <= r}`, an open disc through infinity.
    pub fn open_outside(center: Q, radius: LogMag) -> Self {
        Disc {
            center,
            radius,
            closed: true,
            contains_infinity: true,
        }
    }

    /// Closed as a subset of `P^1`.
    pub fn is_closed_set(&self) -> bool {
        self.closed != self.contains_infinity
    }

    pub fn contains(&self, p: Prime, x: &PPoint) -> bool {
        match x {
            PPoint::Infinity => self.contains_infinity,
            PPoint::Finite(b) => self.contains_value(&b.value(p, &self.center)),
        }
    }

    fn contains_value(&self, v: &LogMag) -> bool {
        match (self.contains_infinity, self.closed) {
            (false, true) => v <= &self.radius,
            (false, false) => v < &self.radius,
            (true, true) => v > &self.radius,
            (true, false) => v >= &self.radius,
        }
    }

    /// The complementary disc at `margin` t-units, for closed discs of `P^1`.
    pub fn complementary(&self, margin: &Q) -> Disc {
        let t = self.radius.t().cloned().unwrap_or_else(Q::zero);
        if self.contains_infinity {
            Disc::closed(self.center.clone(), LogMag::from_t(t - margin))
        } else {
            Disc::closed_outside(self.center.clone(), LogMag::from_t(t + margin))
        }
    }

    pub fn render(&self, p: Prime) -> String {
        let c = fmt_q(&self.center);
        let r = self.radius.render(p);
        match (self.contains_infinity, self.closed) {
            (false, true) => format!("{{|T-{c}| <= {r}}}"),
            (false, false) => format!("{{|T-{c}| < {r}}}"),
            (true, true) => format!("{{|T-{c}| > {r}}}"),
            (true, false) => format!("{{|T-{c}| >= {r}}}"),
        }
    }
}

/// Boolean combination of discs.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    All,
    Empty,
    Disc(Disc),
    Union(Vec<Region>),
    Inter(Vec<Region>),
    Not(Box<Region>),
}

impl Region {
    pub fn contains(&self, p: Prime, x: &PPoint) -> bool {
        match self {
            Region::All => true,
            Region::Empty => false,
            Region::Disc(d) => d.contains(p, x),
            Region::Union(v) => v.iter().any(|r| r.contains(p, x)),
            Region::Inter(v) => v.iter().all(|r| r.contains(p, x)),
            Region::Not(r) => !r.contains(p, x),
        }
    }

    pub fn discs(&self) -> Vec<&Disc> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Disc>) {
        match self {
            Region::Disc(d) => out.push(d),
            Region::Union(v) | Region::Inter(v) => v.iter().for_each(|r| r.collect(out)),
            Region::Not(r) => r.collect(out),
            _ => {}
        }
    }

    pub fn not(self) -> Region {
        Region::Not(Box::new(self))
    }
}

/// Points on which every region built from `discs` is decided.
pub fn test_points(p: Prime, discs: &[&Disc]) -> Vec<PPoint> {
    let mut centers: Vec<Q> = discs.iter().map(|d| d.center.clone()).collect();
    centers.sort();
    centers.dedup();
    if centers.is_empty() {
        centers.push(Q::zero());
    }
    let radii: BTreeSet<Q> = discs.iter().filter_map(|d| d.radius.t().cloned()).collect();
    let mut out = vec![PPoint::Infinity];
    for c in &centers {
        let mut ts: BTreeSet<Q> = radii.clone();
        for a in &centers {
            if let Some(t) = abs(p, &(c - a)).t() {
                ts.insert(t.clone());
            }
        }
        let sorted: Vec<Q> = ts.into_iter().collect();
        let mut rs: Vec<LogMag> = vec![LogMag::Zero];
        if let (Some(lo), Some(hi)) = (sorted.first(), sorted.last()) {
            rs.push(LogMag::from_t(lo - qi(1)));
            rs.push(LogMag::from_t(hi + qi(1)));
        } else {
            rs.push(LogMag::one());
        }
        for w in sorted.windows(2) {
            rs.push(LogMag::from_t((&w[0] + &w[1]) / qi(2)));
        }
        rs.extend(sorted.iter().cloned().map(LogMag::from_t));
        for r in rs {
            out.push(PPoint::Finite(BerkPoint::new(c.clone(), r)));
        }
    }
    out
}

pub fn is_empty(p: Prime, r: &Region) -> bool {
    let d = r.discs();
    !test_points(p, &d).iter().any(|x| r.contains(p, x))
}

pub fn is_everything(p: Prime, r: &Region) -> bool {
    let d = r.discs();
    test_points(p, &d).iter().all(|x| r.contains(p, x))
}

pub fn is_subset(p: Prime, a: &Region, b: &Region) -> bool {
    is_empty(p, &Region::Inter(vec![a.clone(), b.clone().not()]))
}

/// Union of connected pieces, each an intersection of closed discs of `P^1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affinoid {
    pub components: Vec<Vec<Disc>>,
}

impl Affinoid {
    pub fn new(components: Vec<Vec<Disc>>) -> Self {
        Affinoid { components }
    }

    pub fn component_region(c: &[Disc]) -> Region {
        Region::Inter(c.iter().cloned().map(Region::Disc).collect())
    }

    pub fn region(&self) -> Region {
        Region::Union(self.components.iter().map(|c| Self::component_region(c)).collect())
    }

    /// The discs `D_i` with `V_j = cap D_i` and no `D_i` containing another
    /// intersection, per component.
    pub fn e_sets(&self, p: Prime) -> Vec<Vec<Disc>> {
        self.components.iter().map(|c| reduce(p, c)).collect()
    }

    pub fn render(&self, p: Prime) -> String {
        self.components
            .iter()
            .map(|c| {
                c.iter()
                    .map(|d| d.render(p))
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .collect::<Vec<_>>()
            .join("  U  ")
    }
}

fn reduce(p: Prime, c: &[Disc]) -> Vec<Disc> {
    let mut v: Vec<Disc> = c.to_vec();
    v.sort();
    v.dedup();
    let mut i = 0;
    while i < v.len() {
        let others: Vec<Disc> = v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, d)| d.clone()).collect();
        let rest = if others.is_empty() {
            Region::All
        } else {
            Affinoid::component_region(&others)
        };
        if is_subset(p, &rest, &Region::Disc(v[i].clone())) {
            v.remove(i);
        } else {
            i += 1;
        }
    }
    v
}

/// A complementary affinoid with its disc bijection.
#[derive(Debug, Clone, PartialEq)]
pub struct Complement {
    pub affinoid: Affinoid,
    pub pairs: Vec<(Disc, Disc)>,
}

/// Build `V'` with `V cup V' = P^1` by pushing every disc of `E(V)` across its
/// boundary by `margin` t-units and intersecting the per-component unions.
pub fn complementary(p: Prime, v: &Affinoid, margin: &Q) -> Result<Complement> {
    if margin <= &Q::zero() {
        return Err(Error::NoComplement("margin must be positive".into()));
    }
    let es = v.e_sets(p);
    let mut pairs = Vec::new();
    for comp in &es {
        if comp.is_empty() {
            return Err(Error::NoComplement("component is all of P^1".into()));
        }
        for d in comp {
            if !d.is_closed_set() || d.radius.is_zero() {
                return Err(Error::NoComplement(format!("{} is not a closed disc", d.render(p))));
            }
            pairs.push((d.clone(), d.complementary(margin)));
        }
    }
    if is_empty(p, &v.region()) {
        return Err(Error::NoComplement("empty affinoid".into()));
    }
    // distribute the intersection of unions, pruning empty terms as we go
    let mut terms: Vec<Vec<Disc>> = vec![vec![]];
    for comp in &es {
        let mut next = Vec::new();
        for t in &terms {
            for d in comp {
                let mut nt = t.clone();
                nt.push(d.complementary(margin));
                let reg = if nt.len() == 1 {
                    Region::Disc(nt[0].clone())
                } else {
                    Affinoid::component_region(&nt)
                };
                if !is_empty(p, &reg) {
                    next.push(reduce(p, &nt));
                }
            }
        }
        next.sort();
        next.dedup();
        terms = next;
    }
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let both = Region::Inter(vec![
                Affinoid::component_region(&terms[i]),
                Affinoid::component_region(&terms[j]),
            ]);
            if !is_empty(p, &both) {
                return Err(Error::NoComplement("pieces of the complement overlap".into()));
            }
        }
    }
    let mut used: Vec<Disc> = terms.iter().flatten().cloned().collect();
    used.sort();
    let mut wanted: Vec<Disc> = pairs.iter().map(|(_, d)| d.clone()).collect();
    wanted.sort();
    if used != wanted {
        return Err(Error::NoComplement("no disc bijection".into()));
    }
    let aff = Affinoid::new(terms);
    if !is_everything(p, &Region::Union(vec![v.region(), aff.region()])) {
        return Err(Error::NoComplement("union is not P^1".into()));
    }
    Ok(Complement {
        affinoid: aff,
        pairs,
    })
}

/// Closed annulus `lo <= |T - center| <= hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annulus {
    pub center: Q,
    pub lo: LogMag,
    pub hi: LogMag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub u: Affinoid,
    pub v: Affinoid,
    pub pairs: Vec<(Disc, Disc)>,
    pub annuli: Vec<Annulus>,
}

/// A contour `(U, V)` around `K`.
///
/// Type-1 atoms get discs of log-radius `outer_margin`; type-2 atoms at
/// `x_{c,s}` get the annulus `s p^-outer <= |T-c| <= s p^outer`. The discs of
/// `V` sit `inner_margin` t-units inside those of `U`.
pub fn contour(p: Prime, k: &CompactSet, inner_margin: &Q, outer_margin: &Q) -> Result<Contour> {
    if k.orbits().is_empty() {
        return Err(Error::MarginTooLarge("empty compact set".into()));
    }
    if inner_margin <= &Q::zero() || outer_margin <= &Q::zero() && !has_only_type1(k) {
        return Err(Error::MarginTooLarge("margins must be positive".into()));
    }
    let mut comps: Vec<Vec<Disc>> = Vec::new();
    for o in k.orbits() {
        match &o.radius {
            LogMag::Zero => {
                let r = LogMag::from_t(outer_margin.clone());
                let n = if o.kind == OrbitKind::Point {
                    0
                } else {
                    to_i64(&ceil_q(outer_margin)).max(0)
                };
                let count = num_traits::pow(p.get(), n as usize);
                for i in 0..count {
                    comps.push(vec![Disc::closed(&o.center + qi(i as i64), r.clone())]);
                }
            }
            LogMag::Pow(ts) => {
                let hi = LogMag::from_t(ts - outer_margin);
                let lo = LogMag::from_t(ts + outer_margin);
                let n = if o.kind == OrbitKind::Point || ts <= &Q::zero() {
                    0
                } else {
                    to_i64(&ceil_q(ts))
                };
                let count = num_traits::pow(p.get(), n as usize);
                for i in 0..count {
                    let c = &o.center + qi(i as i64);
                    comps.push(vec![
                        Disc::closed(c.clone(), hi.clone()),
                        Disc::closed_outside(c, lo.clone()),
                    ]);
                }
            }
        }
    }
    comps.sort();
    comps.dedup();
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            let both = Region::Inter(vec![
                Affinoid::component_region(&comps[i]),
                Affinoid::component_region(&comps[j]),
            ]);
            if !is_empty(p, &both) {
                return Err(Error::MarginTooLarge(format!(
                    "neighbourhood pieces {} and {} meet",
                    i, j
                )));
            }
        }
    }
    let u = Affinoid::new(comps);
    let comp = complementary(p, &u, inner_margin)
        .map_err(|e| Error::MarginTooLarge(e.to_string()))?;
    let vreg = comp.affinoid.region();
    for o in k.orbits() {
        if orbit_meets(p, o, &vreg) {
            return Err(Error::MarginTooLarge(format!(
                "the complement meets {}",
                o.render(p)
            )));
        }
    }
    let annuli = comp
        .pairs
        .iter()
        .map(|(d, dp)| {
            let (inner, outer) = if d.contains_infinity { (d, dp) } else { (dp, d) };
            Annulus {
                center: d.center.clone(),
                lo: inner.radius.clone(),
                hi: outer.radius.clone(),
            }
        })
        .collect();
    Ok(Contour {
        u,
        v: comp.affinoid,
        pairs: comp.pairs,
        annuli,
    })
}

fn has_only_type1(k: &CompactSet) -> bool {
    k.orbits().iter().all(|o| o.radius.is_zero())
}

/// Points `x_{c, p^-t}` along `t` from `t_start` to `t_end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub center: Q,
    pub t_start: Q,
    pub t_end: Q,
}

impl Segment {
    pub fn new(center: Q, t_start: Q, t_end: Q) -> Self {
        Segment {
            center,
            t_start,
            t_end,
        }
    }

    /// Evenly spaced log-radii, endpoints included.
    pub fn ts(&self, steps: usize) -> Vec<Q> {
        assert!(steps >= 2, "a segment needs at least two samples");
        let h = (&self.t_end - &self.t_start) / qi(steps as i64 - 1);
        (0..steps)
            .map(|i| &self.t_start + &h * qi(i as i64))
            .collect()
    }
}

pub fn segment_points(s: &Segment, steps: usize) -> Vec<BerkPoint> {
    s.ts(steps)
        .into_iter()
        .map(|t| BerkPoint::at(s.center.clone(), t))
        .collect()
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}: t={}..{}]",
            fmt_q(&self.center),
            fmt_q(&self.t_start),
            fmt_q(&self.t_end)
        )
    }
}
