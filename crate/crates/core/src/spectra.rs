//! Spectra of triangular differential modules at type-2 points, and the
//! dictionary between spectra, the distance to the integers and radii of
//! convergence.
//!
//! All three quantities live in t-coordinates. With `w = 1/(p-1)`:
//!
//! * `R = 1` when `delta = 0`;
//! * otherwise `l = max(0, floor(t_delta) + 1)` and
//!   `t_R = (l + w - t_delta) / p^l`.
//!
//! `sigma_from_radius` inverts this band by band.

use num_traits::{Signed, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::berkline::BerkPoint;
use crate::diffmod::{change_derivation, Derivation, DiffModule};
use crate::error::{Error, Result};
use crate::kompakt::{orbit_disjoint, orbit_eq, CompactSet, Orbit};
use crate::poly::Poly;
use crate::ratfun::{gauss_norm, laurent_split_with, on_circle_poles, RatFun};
use crate::scalars::{abs, dist_zp, floor_q, qi, to_i64, vp, LogMag, Prime, Q};

/// `delta(T(z) - a) = max(dist_zp(center - a), radius)`.
pub fn delta_of(p: Prime, z: &Orbit, a: &Q) -> LogMag {
    dist_zp(p, &(&z.center - a)).max(z.radius.clone())
}

pub fn radius_from_delta(p: Prime, d: &LogMag) -> LogMag {
    let td = match d {
        LogMag::Zero => return LogMag::one(),
        LogMag::Pow(t) => t,
    };
    let l = (to_i64(&floor_q(td)) + 1).max(0);
    LogMag::from_t((qi(l) + p.w() - td) / p.pow(l))
}

pub fn sigma_from_radius(p: Prime, r: &LogMag) -> Result<LogMag> {
    let tr = match r {
        LogMag::Pow(t) if !t.is_negative() => t,
        _ => return Err(Error::OutOfRange(r.render(p))),
    };
    let w = p.w();
    if tr.is_zero() {
        return Ok(LogMag::Zero);
    }
    if tr >= &w {
        return Ok(LogMag::from_t(&w - tr));
    }
    let mut l = 1i64;
    while &(&w / p.pow(l)) > tr {
        l += 1;
    }
    Ok(LogMag::from_t(qi(l) + &w - p.pow(l) * tr))
}

/// `alpha (T - c)^i` when `h` is a single term in powers of `T - c`.
fn as_monomial(h: &RatFun, c: &Q) -> Option<(Q, i64)> {
    let single = |f: &Poly| -> Option<(Q, usize)> {
        let s = f.shift(c);
        if s.nonzero_terms() != 1 {
            return None;
        }
        let i = s.coeffs().iter().position(|x| !x.is_zero())?;
        Some((s.coeffs()[i].clone(), i))
    };
    let (a, i) = single(h.num())?;
    let (b, j) = single(h.den())?;
    let e = i as i64 - j as i64;
    (e != 0).then(|| (a / b, e))
}

/// Radius of convergence of `d_c - h` at `x = x_{c,r}`, for a remainder with
/// zero Laurent constant.
pub fn radius_rank1(p: Prime, h: &RatFun, x: &BerkPoint) -> Result<LogMag> {
    if h.is_zero() {
        return Ok(LogMag::one());
    }
    let nrm = gauss_norm(p, h, &x.center, &x.radius)?;
    let one = LogMag::one();
    if nrm > one {
        return Ok(crate::scalars::omega(p).div(&nrm).expect("nonzero norm"));
    }
    if x.radius.is_zero() {
        return Err(Error::Unsupported(format!(
            "nonzero remainder {h} at a type-1 point"
        )));
    }
    match as_monomial(h, &x.center) {
        Some((_, i)) => {
            let th = nrm.t().cloned().expect("nonzero norm");
            let vi = vp(p, &qi(i)).expect("nonzero exponent");
            let t = (p.w() + qi(vi) - th) / qi(i.abs());
            Ok(LogMag::from_t(if t.is_negative() { Q::zero() } else { t }))
        }
        None => Err(Error::Unsupported(format!(
            "remainder {h} has norm <= 1 and is not a monomial in T - {}",
            crate::scalars::fmt_q(&x.center)
        ))),
    }
}

fn orbit_for_split(p: Prime, g: &RatFun, x: &BerkPoint, inside: &[Q]) -> Result<Orbit> {
    let s = laurent_split_with(p, g, &x.center, &x.radius, inside)?;
    let h = s.remainder();
    let r = radius_rank1(p, &h, x)?;
    let sigma = sigma_from_radius(p, &r)?;
    Ok(Orbit::new(s.constant, sigma))
}

/// Spectrum of `d_c + g` at `x = x_{c,r}`, with `g` already written for the
/// derivation `(T - c) d/dT`.
///
/// Poles on the circle `|T - c| = r` are tried on both sides; every choice
/// must give the same orbit.
pub fn spectrum_rank1(p: Prime, g: &RatFun, x: &BerkPoint) -> Result<Orbit> {
    let on = if x.radius.is_zero() {
        vec![]
    } else {
        on_circle_poles(p, g, &x.center, &x.radius)
    };
    let choices: Vec<Vec<Q>> = if on.len() <= 4 {
        (0..1usize << on.len())
            .map(|mask| {
                on.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, q)| q.clone())
                    .collect()
            })
            .collect()
    } else {
        vec![vec![], on.clone()]
    };
    let first = orbit_for_split(p, g, x, &choices[0])?;
    for ch in &choices[1..] {
        let o = orbit_for_split(p, g, x, ch)?;
        if !orbit_eq(p, &first, &o) {
            return Err(Error::PoleOnCircle {
                pole: on[0].clone(),
                center: x.center.clone(),
            });
        }
    }
    Ok(first)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    /// 1-based row indices.
    pub indices: Vec<usize>,
    pub orbit: Orbit,
}

impl Block {
    pub fn rank(&self) -> usize {
        self.indices.len()
    }
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Block", 3)?;
        st.serialize_field("indices", &self.indices)?;
        st.serialize_field("rank", &self.rank())?;
        st.serialize_field("orbit", &self.orbit)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub orbits: CompactSet,
    pub blocks: Vec<Block>,
    pub separation_certified: bool,
    /// Orbit of each diagonal entry, in row order.
    pub diagonal: Vec<Orbit>,
}

/// Spectrum at `x` of a triangular module, computed along the branch of `c`.
pub fn spectrum_triangular(p: Prime, m: &DiffModule, x: &BerkPoint, c: &Q) -> Result<SpectrumResult> {
    let mc = change_derivation(m, &Derivation::Centered(c.clone()));
    if !mc.matrix.is_upper_triangular() && !mc.matrix.is_lower_triangular() {
        return Err(Error::NotTriangular);
    }
    if abs(p, &(&x.center - c)) > x.radius {
        return Err(Error::Unsupported(format!(
            "{} is not on the branch of {}",
            x.render(p),
            crate::scalars::fmt_q(c)
        )));
    }
    let xc = BerkPoint::new(c.clone(), x.radius.clone());
    let diagonal = (0..mc.rank())
        .map(|i| spectrum_rank1(p, &mc.matrix[(i, i)], &xc))
        .collect::<Result<Vec<_>>>()?;
    Ok(group(p, diagonal))
}

/// Group equal orbits into blocks and check pairwise disjointness.
pub fn group(p: Prime, diagonal: Vec<Orbit>) -> SpectrumResult {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, o) in diagonal.iter().enumerate() {
        match blocks.iter_mut().find(|b| orbit_eq(p, &b.orbit, o)) {
            Some(b) => b.indices.push(i + 1),
            None => blocks.push(Block {
                indices: vec![i + 1],
                orbit: o.clone(),
            }),
        }
    }
    let separation_certified = blocks.iter().enumerate().all(|(i, a)| {
        blocks[i + 1..]
            .iter()
            .all(|b| orbit_disjoint(p, &a.orbit, &b.orbit))
    });
    SpectrumResult {
        orbits: CompactSet::new(p, blocks.iter().map(|b| b.orbit.clone()).collect()),
        blocks,
        separation_certified,
        diagonal,
    }
}

pub fn robba_decompose(s: &SpectrumResult) -> Result<Vec<Block>> {
    if !s.separation_certified {
        return Err(Error::NotSeparated);
    }
    let total: usize = s.blocks.iter().map(|b| b.rank()).sum();
    if total != s.diagonal.len() {
        return Err(Error::NotSeparated);
    }
    Ok(s.blocks.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusProfile {
    /// Ascending, each in `(0, 1]`.
    pub radii: Vec<LogMag>,
}

/// Radii of `nabla - a`: one value per row, from each block's orbit.
pub fn multiradius(p: Prime, s: &SpectrumResult, a: &Q) -> RadiusProfile {
    let mut radii: Vec<LogMag> = s
        .blocks
        .iter()
        .flat_map(|b| {
            let r = radius_from_delta(p, &delta_of(p, &b.orbit, a));
            std::iter::repeat_n(r, b.rank())
        })
        .collect();
    radii.sort();
    RadiusProfile { radii }
}

/// A block is refined when its orbit is a single point `x_{c,s}` with
/// `dist_zp(c) <= s`, i.e. it can be centred at 0.
pub fn is_refined(p: Prime, s: &SpectrumResult) -> Vec<bool> {
    s.blocks
        .iter()
        .map(|b| b.orbit.radius > LogMag::one() && dist_zp(p, &b.orbit.center) <= b.orbit.radius)
        .collect()
}
