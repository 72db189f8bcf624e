//! Compact sets made of finitely many `Z_p`-orbits of points, and the
//! exponential topology on them.

use std::fmt;

use num_traits::Zero;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::berkline::{BerkPoint, Disc, PPoint, Region};
use crate::error::{Error, Result};
use crate::scalars::{
    abs, ceil_q, dist_zp, fmt_q, padic_head, q_to_wire, qi, to_i64, LogMag, Prime, Q,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    /// `{x_{c+g, r} : g in Z_p}`.
    Zp,
    /// The single point `x_{c,r}`.
    Point,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orbit {
    pub center: Q,
    pub radius: LogMag,
    pub kind: OrbitKind,
}

impl Orbit {
    pub fn new(center: Q, radius: LogMag) -> Self {
        Orbit {
            center,
            radius,
            kind: OrbitKind::Zp,
        }
    }

    pub fn point(center: Q, radius: LogMag) -> Self {
        Orbit {
            center,
            radius,
            kind: OrbitKind::Point,
        }
    }

    /// A single point of the line: a plain point, or an orbit with radius `>= 1`.
    pub fn is_single_point(&self) -> bool {
        self.kind == OrbitKind::Point || self.radius >= LogMag::one()
    }

    /// Shortest center that names the same set.
    pub fn canonical_center(&self, p: Prime) -> Q {
        let k = match (&self.radius, self.kind) {
            (LogMag::Zero, OrbitKind::Point) => return self.center.clone(),
            (LogMag::Zero, OrbitKind::Zp) => 0,
            (LogMag::Pow(t), OrbitKind::Zp) => to_i64(&ceil_q(t)).min(0),
            (LogMag::Pow(t), OrbitKind::Point) => to_i64(&ceil_q(t)),
        };
        if k <= 0 {
            padic_head(p, &self.center, k)
        } else {
            // keep the integral digits below p^k as well
            let frac = padic_head(p, &self.center, 0);
            let rest = &self.center - &frac;
            let m = crate::scalars::mod_pk(p, &rest, k as u32);
            frac + Q::from_integer(m)
        }
    }

    pub fn canonical(&self, p: Prime) -> Orbit {
        Orbit {
            center: self.canonical_center(p),
            radius: self.radius.clone(),
            kind: self.kind,
        }
    }

    pub fn render(&self, p: Prime) -> String {
        self.render_with(p, &[])
    }

    /// Render, replacing centers that equal a named constant by the name.
    pub fn render_with(&self, p: Prime, names: &[(String, Q)]) -> String {
        let c = self.canonical_center(p);
        let name = names
            .iter()
            .find(|(_, v)| v == &self.center)
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| fmt_q(&c));
        match (&self.radius, self.is_single_point()) {
            (LogMag::Zero, true) => format!("{{{name}}}"),
            (LogMag::Zero, false) => format!("{{{name}}}+Z_p"),
            (r, true) => format!("{{x_{{{name},{}}}}}", r.render(p)),
            (r, false) => format!("{{x_{{{name},{}}}}}+Z_p", r.render(p)),
        }
    }
}

impl Serialize for Orbit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Orbit", 3)?;
        st.serialize_field("center", &q_to_wire(&self.center))?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field("kind", &self.kind)?;
        st.end()
    }
}

pub fn orbit_eq(p: Prime, a: &Orbit, b: &Orbit) -> bool {
    if a.radius != b.radius {
        return false;
    }
    let d = &a.center - &b.center;
    match (a.is_single_point(), b.is_single_point()) {
        (true, true) => abs(p, &d) <= a.radius,
        (false, false) => dist_zp(p, &d) <= a.radius,
        _ => false,
    }
}

pub fn orbit_disjoint(p: Prime, a: &Orbit, b: &Orbit) -> bool {
    if a.radius != b.radius {
        return true;
    }
    let d = &a.center - &b.center;
    if a.kind == OrbitKind::Point && b.kind == OrbitKind::Point {
        abs(p, &d) > a.radius
    } else {
        dist_zp(p, &d) > a.radius
    }
}

/// A finite union of orbits, deduplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSet {
    p: Prime,
    orbits: Vec<Orbit>,
}

impl CompactSet {
    pub fn new(p: Prime, orbits: Vec<Orbit>) -> Self {
        let mut s = CompactSet { p, orbits: vec![] };
        for o in orbits {
            s.insert(o);
        }
        s
    }

    pub fn empty(p: Prime) -> Self {
        CompactSet { p, orbits: vec![] }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn insert(&mut self, o: Orbit) {
        if !self.orbits.iter().any(|x| orbit_eq(self.p, x, &o)) {
            self.orbits.push(o);
        }
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn union(&self, o: &CompactSet) -> CompactSet {
        let mut s = self.clone();
        for x in &o.orbits {
            s.insert(x.clone());
        }
        s
    }

    /// Same set of orbits regardless of order or labels.
    pub fn set_eq(&self, o: &CompactSet) -> bool {
        self.orbits.len() == o.orbits.len()
            && self
                .orbits
                .iter()
                .all(|a| o.orbits.iter().any(|b| orbit_eq(self.p, a, b)))
    }

    pub fn render(&self) -> String {
        self.render_with(&[])
    }

    pub fn render_with(&self, names: &[(String, Q)]) -> String {
        if self.orbits.is_empty() {
            return "{}".into();
        }
        let mut v: Vec<&Orbit> = self.orbits.iter().collect();
        v.sort_by(|a, b| a.radius.cmp(&b.radius).then(a.center.cmp(&b.center)));
        v.iter()
            .map(|o| o.render_with(self.p, names))
            .collect::<Vec<_>>()
            .join(" U ")
    }
}

impl fmt::Display for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Serialize for CompactSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.orbits.serialize(s)
    }
}

/// One piece of an open region.
#[derive(Debug, Clone, PartialEq)]
pub enum OpenPiece {
    /// `|T - c| < r`
    Disc { center: Q, radius: LogMag },
    /// `lo < |T - c| < hi`
    Annulus { center: Q, lo: LogMag, hi: LogMag },
    /// `|T - c| > r`, containing infinity
    Outside { center: Q, radius: LogMag },
}

impl OpenPiece {
    pub fn region(&self) -> Region {
        match self {
            OpenPiece::Disc { center, radius } => {
                Region::Disc(Disc::open(center.clone(), radius.clone()))
            }
            OpenPiece::Annulus { center, lo, hi } => Region::Inter(vec![
                Region::Disc(Disc::open_outside(center.clone(), lo.clone())),
                Region::Disc(Disc::open(center.clone(), hi.clone())),
            ]),
            OpenPiece::Outside { center, radius } => {
                Region::Disc(Disc::open_outside(center.clone(), radius.clone()))
            }
        }
    }
}

/// Finite union of open pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OpenRegion {
    pub pieces: Vec<OpenPiece>,
}

impl OpenRegion {
    pub fn new(pieces: Vec<OpenPiece>) -> Self {
        OpenRegion { pieces }
    }

    pub fn single(piece: OpenPiece) -> Self {
        OpenRegion {
            pieces: vec![piece],
        }
    }

    pub fn region(&self) -> Region {
        Region::Union(self.pieces.iter().map(|x| x.region()).collect())
    }
}

/// Points of the orbit on which membership in `region` is decided.
///
/// The parameter `g` in `Z_p` is refined through residue discs
/// `k + p^N Z_p` until `|T - a|` is constant on the disc for every disc
/// center `a`, or the disc is smaller than every radius in sight.
pub fn orbit_representatives(p: Prime, o: &Orbit, region: &Region) -> Vec<BerkPoint> {
    if o.is_single_point() {
        return vec![BerkPoint::new(o.center.clone(), o.radius.clone())];
    }
    let discs = region.discs();
    let centers: Vec<Q> = discs.iter().map(|d| d.center.clone()).collect();
    let t_max = discs.iter().filter_map(|d| d.radius.t().cloned()).max();
    let mut out = Vec::new();
    let mut stack: Vec<(Q, i64)> = vec![(Q::zero(), 0)];
    while let Some((k, n)) = stack.pop() {
        let c = &o.center + &k;
        let width = LogMag::p_pow(-n);
        let small_enough = width <= o.radius
            || t_max.as_ref().is_none_or(|t| &qi(n) > t)
            || centers.iter().all(|a| abs(p, &(&c - a)) > width);
        if small_enough {
            out.push(BerkPoint::new(c, o.radius.clone()));
            continue;
        }
        let step = p.pow(n);
        for i in 0..p.get() as i64 {
            stack.push((&k + &step * qi(i), n + 1));
        }
    }
    out
}

pub fn orbit_subset(p: Prime, o: &Orbit, region: &Region) -> bool {
    orbit_representatives(p, o, region)
        .into_iter()
        .all(|x| region.contains(p, &PPoint::Finite(x)))
}

pub fn orbit_meets(p: Prime, o: &Orbit, region: &Region) -> bool {
    orbit_representatives(p, o, region)
        .into_iter()
        .any(|x| region.contains(p, &PPoint::Finite(x)))
}

/// `K` lies in `U` and meets every witness.
pub fn in_neighborhood(k: &CompactSet, u: &OpenRegion, witnesses: &[OpenRegion]) -> bool {
    let p = k.p;
    let ur = u.region();
    k.orbits.iter().all(|o| orbit_subset(p, o, &ur))
        && witnesses.iter().all(|w| {
            let wr = w.region();
            k.orbits.iter().any(|o| orbit_meets(p, o, &wr))
        })
}

/// An open set of the exponential topology: contained in `u`, meeting each witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub u: OpenRegion,
    pub witnesses: Vec<OpenRegion>,
}

/// The `n`-th member of a nested neighbourhood basis of `K`.
///
/// A type-1 orbit `a + Z_p` gets the discs `D^-(a+i, p^-n)`, `i < p^(n+1)`;
/// a plain type-1 point gets `D^-(c, p^-n)`; a type-2 atom gets one open
/// annulus of log-width `1/(n+1)` on each side per distinct point.
pub fn neighborhood_basis(k: &CompactSet, n: u32) -> Neighborhood {
    let p = k.p;
    let mut pieces = Vec::new();
    for o in &k.orbits {
        match (&o.radius, o.kind) {
            (LogMag::Zero, OrbitKind::Zp) => {
                let r = LogMag::p_pow(-(n as i64));
                for i in 0..num_traits::pow(p.get(), n as usize + 1) {
                    pieces.push(OpenPiece::Disc {
                        center: &o.center + qi(i as i64),
                        radius: r.clone(),
                    });
                }
            }
            (LogMag::Zero, OrbitKind::Point) => pieces.push(OpenPiece::Disc {
                center: o.center.clone(),
                radius: LogMag::p_pow(-(n as i64)),
            }),
            (LogMag::Pow(t), _) => {
                let eps = Q::new(1.into(), (n as i64 + 1).into());
                let count = if o.is_single_point() {
                    1
                } else {
                    num_traits::pow(p.get(), to_i64(&ceil_q(t)) as usize)
                };
                for i in 0..count {
                    pieces.push(OpenPiece::Annulus {
                        center: &o.center + qi(i as i64),
                        lo: LogMag::from_t(t + &eps),
                        hi: LogMag::from_t(t - &eps),
                    });
                }
            }
        }
    }
    let witnesses = pieces.iter().cloned().map(OpenRegion::single).collect();
    Neighborhood {
        u: OpenRegion::new(pieces),
        witnesses,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// Least `l0` per basis element, `None` if membership fails at `l_max`.
    pub l0: Vec<Option<u32>>,
    pub l_max: u32,
    /// Witness families are taken to cover `U` without checking.
    pub witness_cover_assumed: bool,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.l0.iter().all(|x| x.is_some())
    }
}

/// Eventual membership of `seq(l)` in each basis neighbourhood up to `l_max`.
pub fn converges(
    seq: impl Fn(u32) -> CompactSet,
    limit: &CompactSet,
    basis: &[Neighborhood],
    l_max: u32,
) -> Result<ConvergenceReport> {
    for (i, nb) in basis.iter().enumerate() {
        if !in_neighborhood(limit, &nb.u, &nb.witnesses) {
            return Err(Error::BasisNotNeighborhood(i));
        }
    }
    let members: Vec<CompactSet> = (0..=l_max).map(&seq).collect();
    let l0 = basis
        .iter()
        .map(|nb| {
            let mut first = None;
            for (l, k) in members.iter().enumerate().rev() {
                if in_neighborhood(k, &nb.u, &nb.witnesses) {
                    first = Some(l as u32);
                } else {
                    break;
                }
            }
            first
        })
        .collect();
    Ok(ConvergenceReport {
        l0,
        l_max,
        witness_cover_assumed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn equality_examples() {
        let p = p5();
        let z = LogMag::Zero;
        assert!(orbit_eq(p, &Orbit::new(qi(0), z.clone()), &Orbit::new(qi(1), z.clone())));
        assert!(!orbit_eq(p, &Orbit::new(q(1, 5), z.clone()), &Orbit::new(qi(0), z.clone())));
        let s = LogMag::p_pow(2);
        assert!(orbit_eq(p, &Orbit::new(q(1, 5), s.clone()), &Orbit::new(qi(0), s.clone())));
    }

    #[test]
    fn disjointness_examples() {
        let p = p5();
        assert!(orbit_disjoint(
            p,
            &Orbit::new(qi(0), LogMag::p_pow(1)),
            &Orbit::new(qi(0), LogMag::p_pow(2))
        ));
        assert!(orbit_disjoint(
            p,
            &Orbit::new(qi(0), LogMag::Zero),
            &Orbit::new(q(1, 5), LogMag::Zero)
        ));
        assert!(!orbit_disjoint(
            p,
            &Orbit::new(qi(0), LogMag::p_pow(-1)),
            &Orbit::new(qi(2), LogMag::p_pow(-1))
        ));
    }

    #[test]
    fn canonical_rendering() {
        let p = p5();
        let o = Orbit::new(q(1, 125), LogMag::p_pow(3));
        assert_eq!(o.render(p), "{x_{0,5^3}}");
        assert_eq!(Orbit::new(q(2, 5) + qi(3), LogMag::Zero).render(p), "{2/5}+Z_p");
        assert_eq!(
            Orbit::new(q(1, 5), LogMag::p_pow(-1)).render(p),
            "{x_{1/5,5^-1}}+Z_p"
        );
    }

    #[test]
    fn neighbourhood_examples() {
        let p = p5();
        let zp = CompactSet::new(p, vec![Orbit::new(qi(0), LogMag::Zero)]);
        let unit_discs: Vec<OpenPiece> = (0..5)
            .map(|i| OpenPiece::Disc {
                center: qi(i),
                radius: LogMag::one(),
            })
            .collect();
        let w: Vec<OpenRegion> = unit_discs.iter().cloned().map(OpenRegion::single).collect();
        assert!(in_neighborhood(&zp, &OpenRegion::new(unit_discs), &w));
        // radius 1/5 discs centred at 0..4 miss 5 + 25 Z_p
        let small: Vec<OpenPiece> = (0..5)
            .map(|i| OpenPiece::Disc {
                center: qi(i),
                radius: LogMag::p_pow(-1),
            })
            .collect();
        assert!(!in_neighborhood(&zp, &OpenRegion::new(small), &[]));

        let k = CompactSet::new(p, vec![Orbit::new(qi(0), LogMag::p_pow(-1))]);
        let d = OpenRegion::single(OpenPiece::Disc {
            center: qi(0),
            radius: LogMag::p_pow(-1),
        });
        assert!(!in_neighborhood(&k, &OpenRegion::single(OpenPiece::Outside { center: qi(0), radius: LogMag::Zero }), &[d]));

        let k = CompactSet::new(p, vec![Orbit::new(qi(0), LogMag::p_pow(2))]);
        let a = OpenRegion::single(OpenPiece::Annulus {
            center: qi(0),
            lo: LogMag::p_pow(1),
            hi: LogMag::p_pow(3),
        });
        assert!(in_neighborhood(&k, &a, &[a.clone()]));
    }

    #[test]
    fn shrinking_orbits_converge_to_zp() {
        let p = p5();
        let limit = CompactSet::new(p, vec![Orbit::new(qi(0), LogMag::Zero)]);
        let basis: Vec<Neighborhood> = (0..3).map(|n| neighborhood_basis(&limit, n)).collect();
        let rep = converges(
            |l| CompactSet::new(p, vec![Orbit::new(qi(0), LogMag::p_pow(-(l as i64)))]),
            &limit,
            &basis,
            6,
        )
        .unwrap();
        assert_eq!(rep.l0, vec![Some(1), Some(2), Some(3)]);
    }

    #[test]
    fn constant_sequences() {
        let p = p5();
        let limit = CompactSet::new(p, vec![Orbit::new(qi(0), LogMag::p_pow(2))]);
        let basis: Vec<Neighborhood> = (0..3).map(|n| neighborhood_basis(&limit, n)).collect();
        let rep = converges(|_| limit.clone(), &limit, &basis, 4).unwrap();
        assert_eq!(rep.l0, vec![Some(0); 3]);
        let other = CompactSet::new(p, vec![Orbit::new(q(1, 5), LogMag::p_pow(2))]);
        let rep = converges(|_| other.clone(), &limit, &basis, 4).unwrap();
        assert_eq!(rep.l0, vec![Some(0); 3]);
    }
}
