//! Differential modules `nabla = delta + G` over Q(T), cyclic vectors and
//! Newton polygons of the associated differential polynomials.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::berkline::BerkPoint;
use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::poly::Poly;
use crate::ratfun::{gauss_norm, RatFun};
use crate::scalars::{LogMag, Prime, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    /// `d/dT`
    DdT,
    /// `(T - c) d/dT`
    Centered(Q),
}

impl Derivation {
    /// The factor `f` with `this = f * d/dT`.
    pub fn factor(&self) -> RatFun {
        match self {
            Derivation::DdT => RatFun::one(),
            Derivation::Centered(c) => RatFun::from_poly(Poly::linear(c)),
        }
    }

    pub fn apply(&self, f: &RatFun) -> RatFun {
        let d = f.derivative();
        match self {
            Derivation::DdT => d,
            Derivation::Centered(_) => &self.factor() * &d,
        }
    }

    /// Default coordinate for the cyclic vector formula.
    pub fn coordinate(&self) -> RatFun {
        match self {
            Derivation::DdT => RatFun::t(),
            Derivation::Centered(c) => RatFun::from_poly(Poly::linear(c)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffModule {
    pub matrix: RMatrix,
    pub derivation: Derivation,
}

impl DiffModule {
    pub fn new(matrix: RMatrix, derivation: Derivation) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::Dimension("connection matrix must be square and nonempty".into()));
        }
        Ok(DiffModule { matrix, derivation })
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    /// `nabla v = delta(v) + G v` on a column vector.
    pub fn nabla(&self, v: &[RatFun]) -> Vec<RatFun> {
        let gv = self.matrix.mul_vec(v);
        v.iter()
            .zip(gv)
            .map(|(x, y)| &self.derivation.apply(x) + &y)
            .collect()
    }

    pub fn nabla_pow(&self, v: &[RatFun], k: usize) -> Vec<RatFun> {
        (0..k).fold(v.to_vec(), |acc, _| self.nabla(&acc))
    }
}

/// Same module over a different derivation: `G` is rescaled by the ratio of
/// the two factors.
pub fn change_derivation(m: &DiffModule, target: &Derivation) -> DiffModule {
    if &m.derivation == target {
        return m.clone();
    }
    let ratio = &target.factor() / &m.derivation.factor();
    DiffModule {
        matrix: m.matrix.scale(&ratio),
        derivation: target.clone(),
    }
}

pub fn twist(m: &DiffModule, a: &Q) -> DiffModule {
    let n = m.rank();
    let shift = RMatrix::identity(n).scale(&RatFun::constant(a.clone()));
    DiffModule {
        matrix: m.matrix.sub(&shift),
        derivation: m.derivation.clone(),
    }
}

pub fn dual(m: &DiffModule) -> DiffModule {
    DiffModule {
        matrix: m.matrix.transpose().map(|x| -x),
        derivation: m.derivation.clone(),
    }
}

fn binom(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `det[m, nabla m, ..., nabla^(n-1) m]`.
pub fn wronskian(m: &DiffModule, v: &[RatFun]) -> RatFun {
    let n = m.rank();
    let mut cols = vec![v.to_vec()];
    for _ in 1..n {
        let next = m.nabla(cols.last().unwrap());
        cols.push(next);
    }
    RMatrix::column_matrix(&cols).det_fraction_free()
}

/// `m = sum_j f^j/j! sum_k (-1)^k C(j,k) nabla^k(e_{j+1-k})`, certified by a
/// nonvanishing Wronskian.
pub fn cyclic_vector(m: &DiffModule, f: &RatFun) -> Result<Vec<RatFun>> {
    if m.derivation.apply(f).is_zero() {
        return Err(Error::NotCyclic);
    }
    let n = m.rank();
    let basis = |i: usize| -> Vec<RatFun> {
        (0..n)
            .map(|r| if r == i { RatFun::one() } else { RatFun::zero() })
            .collect()
    };
    let mut acc = vec![RatFun::zero(); n];
    let mut fj = RatFun::one();
    for j in 0..n {
        let mut inner = vec![RatFun::zero(); n];
        for k in 0..=j {
            let e = basis(j - k);
            let term = m.nabla_pow(&e, k);
            let c = Q::from_integer(if k % 2 == 0 { binom(j, k) } else { -binom(j, k) });
            for (x, y) in inner.iter_mut().zip(term) {
                *x = &*x + &y.scale(&c);
            }
        }
        let w = fj.scale(&Q::new(BigInt::one(), factorial(j)));
        for (x, y) in acc.iter_mut().zip(inner) {
            *x = &*x + &(&w * &y);
        }
        fj = &fj * f;
    }
    if wronskian(m, &acc).is_zero() {
        return Err(Error::NotCyclic);
    }
    Ok(acc)
}

/// Monic `d^n + sum g_i d^i` with `nabla^n m = -sum g_i nabla^i m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffPoly {
    pub coeffs: Vec<RatFun>,
}

impl DiffPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }
}

pub fn diff_polynomial(m: &DiffModule, v: &[RatFun]) -> Result<DiffPoly> {
    let n = m.rank();
    let mut cols = vec![v.to_vec()];
    for _ in 0..n {
        let next = m.nabla(cols.last().unwrap());
        cols.push(next);
    }
    let last = cols.pop().unwrap();
    let w = RMatrix::column_matrix(&cols);
    let rhs: Vec<RatFun> = last.iter().map(|x| -x).collect();
    Ok(DiffPoly {
        coeffs: w.solve_fraction_free(&rhs)?,
    })
}

/// `nabla^n m + sum g_i nabla^i m`; zero for a correct operator.
pub fn residual(m: &DiffModule, v: &[RatFun], p: &DiffPoly) -> Vec<RatFun> {
    let n = m.rank();
    let mut cur = v.to_vec();
    let mut acc = vec![RatFun::zero(); n];
    for g in &p.coeffs {
        for (a, x) in acc.iter_mut().zip(&cur) {
            *a = &*a + &(g * x);
        }
        cur = m.nabla(&cur);
    }
    acc.iter().zip(&cur).map(|(a, x)| a + x).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolygon {
    /// `(slope, multiplicity)` of each finite edge, slopes increasing.
    pub edges: Vec<(Q, usize)>,
    /// Number of roots equal to zero.
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Root magnitudes with multiplicity; an edge of slope `s` gives `p^s`.
    pub fn root_magnitudes(&self) -> Vec<(LogMag, usize)> {
        let mut out = Vec::new();
        if self.zero_roots > 0 {
            out.push((LogMag::Zero, self.zero_roots));
        }
        for (s, m) in &self.edges {
            out.push((LogMag::from_t(-s), *m));
        }
        out
    }

    pub fn total(&self) -> usize {
        self.zero_roots + self.edges.iter().map(|e| e.1).sum::<usize>()
    }
}

/// Lower convex hull of `(i, t(g_i))` read as a commutative polynomial in `S`.
pub fn newton_polygon_of(ts: &[Option<Q>]) -> NewtonPolygon {
    let zero_roots = ts.iter().take_while(|t| t.is_none()).count();
    let pts: Vec<(usize, Q)> = ts
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.clone().map(|t| (i, t)))
        .collect();
    let mut hull: Vec<(usize, Q)> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let (i1, t1) = &hull[hull.len() - 2];
            let (i2, t2) = &hull[hull.len() - 1];
            // drop the middle point if it lies on or above the chord
            let lhs = (t2 - t1) * Q::from_integer(BigInt::from(pt.0 - i1));
            let rhs = (&pt.1 - t1) * Q::from_integer(BigInt::from(i2 - i1));
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let edges = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            ((&w[1].1 - &w[0].1) / Q::from_integer(BigInt::from(len)), len)
        })
        .collect();
    NewtonPolygon { edges, zero_roots }
}

/// Newton polygon of `S^n + sum g_i S^i` at the point `x`.
pub fn newton_polygon(p: Prime, poly: &DiffPoly, x: &BerkPoint) -> Result<NewtonPolygon> {
    let mut ts = Vec::with_capacity(poly.degree() + 1);
    for g in &poly.coeffs {
        let nrm = gauss_norm(p, g, &x.center, &x.radius).map_err(|e| match e {
            Error::PoleAtTypeOnePoint(c) => Error::PoleAtPoint(c),
            e => e,
        })?;
        ts.push(nrm.t().cloned());
    }
    ts.push(Some(Q::zero()));
    Ok(newton_polygon_of(&ts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, qi};

    fn nilpotent() -> DiffModule {
        let m = RMatrix::from_rows(vec![
            vec![RatFun::zero(), RatFun::one()],
            vec![RatFun::zero(), RatFun::zero()],
        ])
        .unwrap();
        DiffModule::new(m, Derivation::DdT).unwrap()
    }

    #[test]
    fn change_of_derivation_example() {
        let a = q(1, 25);
        let c = qi(5);
        // a / (T (c - T))
        let den = &Poly::t() * &(-&Poly::linear(&c));
        let g = RatFun::new(Poly::constant(a.clone()), den).unwrap();
        let m = DiffModule::new(RMatrix::from_rows(vec![vec![g]]).unwrap(), Derivation::DdT).unwrap();
        let m0 = change_derivation(&m, &Derivation::Centered(qi(0)));
        let expect = RatFun::new(Poly::constant(a), -&Poly::linear(&c)).unwrap();
        assert_eq!(m0.matrix[(0, 0)], expect);
        assert_eq!(change_derivation(&m0, &Derivation::DdT), m);
        assert_eq!(change_derivation(&m, &Derivation::DdT), m);
    }

    #[test]
    fn twist_and_dual() {
        let m = nilpotent();
        assert_eq!(twist(&twist(&m, &q(1, 3)), &q(-1, 3)), m);
        assert_eq!(twist(&m, &qi(0)), m);
        assert_eq!(dual(&dual(&m)), m);
        assert_eq!(dual(&m).matrix[(1, 0)], RatFun::constant(qi(-1)));
    }

    #[test]
    fn cyclic_vector_example() {
        let m = nilpotent();
        let v = cyclic_vector(&m, &RatFun::t()).unwrap();
        assert_eq!(v, vec![RatFun::one(), RatFun::t()]);
        let w = wronskian(&m, &v);
        assert_eq!(w, &RatFun::one() - &(&RatFun::t() * &RatFun::t()));
        let dp = diff_polynomial(&m, &v).unwrap();
        assert!(residual(&m, &v, &dp).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn rank_one_operator() {
        let g = RatFun::constant(q(2, 7));
        let m = DiffModule::new(RMatrix::from_rows(vec![vec![g.clone()]]).unwrap(), Derivation::DdT)
            .unwrap();
        let v = cyclic_vector(&m, &RatFun::t()).unwrap();
        assert_eq!(v, vec![RatFun::one()]);
        let dp = diff_polynomial(&m, &v).unwrap();
        assert_eq!(dp.coeffs, vec![-g]);
    }

    #[test]
    fn newton_polygons() {
        let p = Prime::new(5).unwrap();
        let x = BerkPoint::at(qi(0), qi(0));
        // S^2 - (1/25) S
        let dp = DiffPoly {
            coeffs: vec![RatFun::zero(), RatFun::constant(q(-1, 25))],
        };
        let np = newton_polygon(p, &dp, &x).unwrap();
        assert_eq!(
            np.root_magnitudes(),
            vec![(LogMag::Zero, 1), (LogMag::p_pow(2), 1)]
        );
        let dp = DiffPoly {
            coeffs: vec![RatFun::constant(q(-1, 25))],
        };
        assert_eq!(
            newton_polygon(p, &dp, &x).unwrap().root_magnitudes(),
            vec![(LogMag::p_pow(2), 1)]
        );
        let dp = DiffPoly {
            coeffs: vec![RatFun::zero(), RatFun::zero()],
        };
        let np = newton_polygon(p, &dp, &x).unwrap();
        assert_eq!(np.root_magnitudes(), vec![(LogMag::Zero, 2)]);
        assert_eq!(np.total(), 2);
    }
}
