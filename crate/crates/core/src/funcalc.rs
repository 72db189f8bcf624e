//! Residues, resolvents and Cauchy idempotents for constant matrices.

use num_traits::{One, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::berkline::{is_everything, BerkPoint, Disc, PPoint, Region};
use crate::diffmod::newton_polygon_of;
use crate::error::{Error, Result};
use crate::kompakt::{CompactSet, Orbit};
use crate::linalg::{QMatrix, RMatrix};
use crate::poly::Poly;
use crate::ratfun::{partial_fractions, RatFun};
use crate::scalars::{abs, q_to_wire, qi, vp, LogMag, Prime, Q};

/// `R(S) = (A - S I)^(-1)` with entries in `Q(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventMatrix {
    pub source: QMatrix,
    pub entries: RMatrix,
}

impl ResolventMatrix {
    /// `(A - S I) R(S) = I`.
    pub fn verify(&self) -> bool {
        let n = self.source.rows();
        shifted(&self.source).mul(&self.entries) == RMatrix::identity(n)
    }
}

fn shifted(a: &QMatrix) -> RMatrix {
    let n = a.rows();
    let s = RatFun::t();
    RMatrix::from_fn(n, n, |i, j| {
        let x = RatFun::constant(a[(i, j)].clone());
        if i == j {
            &x - &s
        } else {
            x
        }
    })
}

pub fn resolvent(a: &QMatrix) -> Result<ResolventMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("resolvent of a non-square matrix".into()));
    }
    Ok(ResolventMatrix {
        source: a.clone(),
        entries: shifted(a).inverse()?,
    })
}

/// `det(S I - A)`.
pub fn char_poly(a: &QMatrix) -> Poly {
    let d = shifted(a).det();
    let sign = if a.rows() % 2 == 0 { Q::one() } else { -Q::one() };
    d.num().scale(&(sign / d.den().lead()))
}

fn on_boundary(p: Prime, d: &Disc, x: &Q) -> bool {
    abs(p, &(x - &d.center)) == d.radius
}

fn in_disc(p: Prime, d: &Disc, x: &Q) -> bool {
    d.contains(p, &PPoint::Finite(BerkPoint::new(x.clone(), LogMag::Zero)))
}

/// `Res_D(f)`: zero on discs of the affine line; on a disc through infinity,
/// the sum of the residues at the poles in the removed disc.
pub fn res_disc(p: Prime, f: &RatFun, d: &Disc) -> Result<Q> {
    let pf = partial_fractions(f)?;
    for pp in &pf.principal_parts {
        if on_boundary(p, d, &pp.pole) {
            return Err(Error::PoleOnBoundary(pp.pole.clone()));
        }
        if in_disc(p, d, &pp.pole) {
            return Err(Error::NotAnalytic(format!("pole {} inside the disc", q_to_wire(&pp.pole))));
        }
    }
    if !d.contains_infinity {
        return Ok(Q::zero());
    }
    if !pf.polynomial_part.is_zero() {
        return Err(Error::NotAnalytic("f does not vanish at infinity".into()));
    }
    Ok(pf.principal_parts.iter().map(|pp| pp.residue()).sum())
}

/// `Res_{D cap D'}(f) = Res_D(f_D) + Res_D'(f_D')` for a complementary pair,
/// with `f` split by where its poles lie.
pub fn res_intersection(p: Prime, f: &RatFun, d1: &Disc, d2: &Disc) -> Result<Q> {
    if !is_everything(p, &Region::Union(vec![Region::Disc(d1.clone()), Region::Disc(d2.clone())])) {
        return Err(Error::NoComplement("discs do not cover P^1".into()));
    }
    let pf = partial_fractions(f)?;
    let mut parts = [RatFun::zero(), RatFun::zero()];
    let mut poly_to = None;
    for (k, d) in [d1, d2].into_iter().enumerate() {
        if !d.contains_infinity {
            poly_to = Some(k);
        }
    }
    let poly_to = poly_to.ok_or(Error::NoComplement("both discs contain infinity".into()))?;
    parts[poly_to] = RatFun::from_poly(pf.polynomial_part.clone());
    for pp in &pf.principal_parts {
        if on_boundary(p, d1, &pp.pole) || on_boundary(p, d2, &pp.pole) {
            return Err(Error::PoleOnBoundary(pp.pole.clone()));
        }
        // A pole belongs to the part that is analytic where the pole is not.
        let k = match (in_disc(p, d1, &pp.pole), in_disc(p, d2, &pp.pole)) {
            (false, true) => 0,
            (true, false) => 1,
            _ => {
                return Err(Error::NotAnalytic(format!(
                    "pole {} in the intersection",
                    q_to_wire(&pp.pole)
                )))
            }
        };
        parts[k] = &parts[k] + &pp.to_ratfun();
    }
    Ok(res_disc(p, &parts[0], d1)? + res_disc(p, &parts[1], d2)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Idempotent {
    pub e: QMatrix,
    /// Eigenvalues inside the disc, with multiplicity.
    pub cluster: Vec<(Q, usize)>,
    /// Idempotent of the remaining eigenvalues.
    pub complement: QMatrix,
    pub squares_to_itself: bool,
    pub commutes: bool,
    pub trace_is_cluster_size: bool,
    pub sums_to_identity: bool,
}

impl Idempotent {
    pub fn certified(&self) -> bool {
        self.squares_to_itself && self.commutes && self.trace_is_cluster_size && self.sums_to_identity
    }
}

fn ser_matrix(m: &QMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(q_to_wire).collect())
        .collect()
}

impl Serialize for Idempotent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Idempotent", 4)?;
        st.serialize_field("e", &ser_matrix(&self.e))?;
        let cl: Vec<(String, usize)> = self.cluster.iter().map(|(x, m)| (q_to_wire(x), *m)).collect();
        st.serialize_field("cluster", &cl)?;
        st.serialize_field("complement", &ser_matrix(&self.complement))?;
        st.serialize_field("certified", &self.certified())?;
        st.end()
    }
}

fn residue_sum(r: &RMatrix, at: &[Q]) -> Result<QMatrix> {
    let n = r.rows();
    let mut out = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let pf = partial_fractions(&-&r[(i, j)])?;
            out[(i, j)] = pf
                .principal_parts
                .iter()
                .filter(|pp| at.contains(&pp.pole))
                .map(|pp| pp.residue())
                .sum();
        }
    }
    Ok(out)
}

/// The idempotent cut out by the eigenvalues of `a` lying in `disc`.
pub fn cauchy_idempotent(p: Prime, a: &QMatrix, disc: &Disc) -> Result<Idempotent> {
    let cp = char_poly(a);
    let (roots, rest) = cp.split_linear();
    if !rest.is_constant() {
        return Err(Error::NonSplitCharPoly);
    }
    if let Some((l, _)) = roots.iter().find(|(l, _)| on_boundary(p, disc, l)) {
        return Err(Error::EigenvalueOnBoundary(l.clone()));
    }
    let (cluster, other): (Vec<_>, Vec<_>) = roots.into_iter().partition(|(l, _)| in_disc(p, disc, l));
    let r = resolvent(a)?;
    let names = |v: &[(Q, usize)]| v.iter().map(|x| x.0.clone()).collect::<Vec<_>>();
    let e = residue_sum(&r.entries, &names(&cluster))?;
    let complement = residue_sum(&r.entries, &names(&other))?;
    let n = a.rows();
    let size: usize = cluster.iter().map(|x| x.1).sum();
    Ok(Idempotent {
        squares_to_itself: e.mul(&e) == e,
        commutes: a.mul(&e) == e.mul(a),
        trace_is_cluster_size: e.trace() == qi(size as i64),
        sums_to_identity: e.add(&complement) == QMatrix::identity(n),
        e,
        cluster,
        complement,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixSpectrum {
    pub points: CompactSet,
    /// Some eigenvalues are not rational.
    pub partial: bool,
    /// Magnitudes of the irrational eigenvalues, with multiplicity.
    pub newton: Vec<(LogMag, usize)>,
}

/// Eigenvalues of `a` as plain type-1 points.
pub fn matrix_spectrum(p: Prime, a: &QMatrix) -> MatrixSpectrum {
    let (roots, rest) = char_poly(a).split_linear();
    let points = CompactSet::new(
        p,
        roots
            .into_iter()
            .map(|(l, _)| Orbit::point(l, LogMag::Zero))
            .collect(),
    );
    let partial = !rest.is_constant();
    let newton = if partial {
        let ts: Vec<Option<Q>> = rest.coeffs().iter().map(|c| vp(p, c).map(qi)).collect();
        newton_polygon_of(&ts).root_magnitudes()
    } else {
        vec![]
    };
    MatrixSpectrum {
        points,
        partial,
        newton,
    }
}
