//! Rational functions over Q: Gauss norms, partial fractions and the
//! Laurent split on a circle.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalars::{abs, fmt_q, qi, vp, LogMag, Prime, Q};

/// `num / den` with `den` monic and coprime to `num`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFun::zero());
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let l = den.lead().recip();
        Ok(RatFun {
            num: num.scale(&l),
            den: den.scale(&l),
        })
    }

    pub fn zero() -> Self {
        RatFun {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFun::constant(Q::one())
    }

    pub fn constant(a: Q) -> Self {
        RatFun {
            num: Poly::constant(a),
            den: Poly::one(),
        }
    }

    pub fn t() -> Self {
        RatFun::from_poly(Poly::t())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Q> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::PoleAtTypeOnePoint(x.clone()));
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn derivative(&self) -> RatFun {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        RatFun::new(n, d).expect("nonzero denominator")
    }

    pub fn scale(&self, a: &Q) -> RatFun {
        if a.is_zero() {
            return RatFun::zero();
        }
        RatFun {
            num: self.num.scale(a),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFun> {
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: i64) -> Result<RatFun> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let k = k.unsigned_abs() as usize;
        Ok(RatFun {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// Poles over Q with their orders, plus the part of the denominator
    /// that does not split.
    pub fn poles(&self) -> (Vec<(Q, usize)>, Poly) {
        self.den.split_linear()
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return write!(f, "{}", self.num);
        }
        let n = if self.num.nonzero_terms() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        write!(f, "{}/({})", n, self.den)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a RatFun> for &'a RatFun {
            type Output = RatFun;
            fn $m(self, o: &RatFun) -> RatFun {
                let f: fn(&RatFun, &RatFun) -> RatFun = $body;
                f(self, o)
            }
        }
        impl $tr<RatFun> for RatFun {
            type Output = RatFun;
            fn $m(self, o: RatFun) -> RatFun {
                (&self).$m(&o)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    if a.den == b.den {
        return RatFun::new(&a.num + &b.num, a.den.clone()).unwrap();
    }
    RatFun::new(
        &(&a.num * &b.den) + &(&b.num * &a.den),
        &a.den * &b.den,
    )
    .unwrap()
});
binop!(Sub, sub, |a, b| a + &(-b));
binop!(Mul, mul, |a, b| {
    if a.is_zero() || b.is_zero() {
        return RatFun::zero();
    }
    RatFun::new(&a.num * &b.num, &a.den * &b.den).unwrap()
});
binop!(Div, div, |a, b| {
    RatFun::new(&a.num * &b.den, &a.den * &b.num).expect("division by zero rational function")
});

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}

/// Gauss norm of a polynomial at `x_{c,r}` for `r > 0`, as the exponent `t`.
fn poly_norm_t(p: Prime, f: &Poly, c: &Q, r_t: &Q) -> Option<Q> {
    let g = f.shift(c);
    g.coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| vp(p, a).map(|v| qi(v) + r_t * qi(i as i64)))
        .min()
}

/// `|f|` at the point `x_{c,r}`.
pub fn gauss_norm(p: Prime, f: &RatFun, c: &Q, r: &LogMag) -> Result<LogMag> {
    match r {
        LogMag::Zero => {
            let v = f.eval(c)?;
            Ok(abs(p, &v))
        }
        LogMag::Pow(rt) => {
            let n = poly_norm_t(p, &f.num, c, rt);
            let d = poly_norm_t(p, &f.den, c, rt).expect("nonzero denominator");
            Ok(match n {
                None => LogMag::Zero,
                Some(n) => LogMag::Pow(n - d),
            })
        }
    }
}

/// A pole and the coefficients of `(T - pole)^(-k)` for `k = 1..`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalPart {
    pub pole: Q,
    pub coeffs: Vec<Q>,
}

impl PrincipalPart {
    pub fn to_ratfun(&self) -> RatFun {
        let mut acc = RatFun::zero();
        let lin = RatFun::from_poly(Poly::linear(&self.pole));
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let term = lin.pow(-(k as i64 + 1)).unwrap().scale(a);
            acc = &acc + &term;
        }
        acc
    }

    /// Classical residue, the coefficient of `(T - pole)^(-1)`.
    pub fn residue(&self) -> Q {
        self.coeffs.first().cloned().unwrap_or_else(Q::zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PFDecomp {
    pub polynomial_part: Poly,
    pub principal_parts: Vec<PrincipalPart>,
}

impl PFDecomp {
    pub fn reassemble(&self) -> RatFun {
        self.principal_parts
            .iter()
            .fold(RatFun::from_poly(self.polynomial_part.clone()), |acc, pp| {
                &acc + &pp.to_ratfun()
            })
    }
}

/// Partial fractions over Q.
pub fn partial_fractions(f: &RatFun) -> Result<PFDecomp> {
    let (qpart, rem) = f.num.div_rem(&f.den);
    if f.den.is_constant() {
        return Ok(PFDecomp {
            polynomial_part: qpart,
            principal_parts: vec![],
        });
    }
    let (roots, rest) = f.poles();
    if !rest.is_constant() {
        return Err(Error::IrreducibleDenominator(rest.to_string()));
    }
    let mut parts = Vec::new();
    for (a, m) in &roots {
        // den = (T-a)^m * h; expand rem/h around a to order m.
        let h = f.den.div_rem(&Poly::linear(a).pow(*m)).0;
        let rn = rem.taylor(a);
        let hn = h.taylor(a);
        // series division rn / hn up to (T-a)^(m-1)
        let mut s: Vec<Q> = Vec::with_capacity(*m);
        let h0inv = hn[0].recip();
        for k in 0..*m {
            let mut acc = rn.get(k).cloned().unwrap_or_else(Q::zero);
            for j in 1..=k {
                if let Some(hj) = hn.get(j) {
                    acc -= hj * &s[k - j];
                }
            }
            s.push(acc * &h0inv);
        }
        // coefficient of (T-a)^(-k) is s[m-k]
        let coeffs: Vec<Q> = (1..=*m).map(|k| s[m - k].clone()).collect();
        parts.push(PrincipalPart {
            pole: a.clone(),
            coeffs,
        });
    }
    Ok(PFDecomp {
        polynomial_part: qpart,
        principal_parts: parts,
    })
}

/// Where a pole sits relative to the circle `|T - c| = r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleSide {
    Inside,
    OnCircle,
    Outside,
}

pub fn pole_side(p: Prime, pole: &Q, c: &Q, r: &LogMag) -> PoleSide {
    let d = abs(p, &(pole - c));
    match d.cmp(r) {
        std::cmp::Ordering::Less => PoleSide::Inside,
        std::cmp::Ordering::Equal => PoleSide::OnCircle,
        std::cmp::Ordering::Greater => PoleSide::Outside,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSplit {
    pub constant: Q,
    pub inner: Vec<PrincipalPart>,
    pub outer: RatFun,
}

impl LaurentSplit {
    /// `f - constant`.
    pub fn remainder(&self) -> RatFun {
        let inner = self
            .inner
            .iter()
            .fold(RatFun::zero(), |acc, pp| &acc + &pp.to_ratfun());
        &inner + &(&self.outer - &RatFun::constant(self.constant.clone()))
    }
}

/// The poles of `f` lying on the circle `|T - c| = r`.
pub fn on_circle_poles(p: Prime, f: &RatFun, c: &Q, r: &LogMag) -> Vec<Q> {
    if f.den.is_constant() {
        return vec![];
    }
    let (roots, _) = f.poles();
    roots
        .into_iter()
        .map(|(a, _)| a)
        .filter(|a| pole_side(p, a, c, r) == PoleSide::OnCircle)
        .collect()
}

/// Laurent split on the annulus just inside `|T - c| = r`.
///
/// `inside` lists on-circle poles that are to be treated as interior; the
/// remaining on-circle poles go to the outer part.
pub fn laurent_split_with(
    p: Prime,
    f: &RatFun,
    c: &Q,
    r: &LogMag,
    inside: &[Q],
) -> Result<LaurentSplit> {
    if f.den.is_constant() {
        let constant = f.eval(c)?;
        return Ok(LaurentSplit {
            constant,
            inner: vec![],
            outer: f.clone(),
        });
    }
    let pf = partial_fractions(f)?;
    let mut inner = Vec::new();
    let mut outer = RatFun::from_poly(pf.polynomial_part.clone());
    for pp in pf.principal_parts {
        let is_in = match pole_side(p, &pp.pole, c, r) {
            PoleSide::Inside => true,
            PoleSide::Outside => false,
            PoleSide::OnCircle => inside.contains(&pp.pole),
        };
        if is_in {
            if r.is_zero() {
                return Err(Error::PoleAtTypeOnePoint(pp.pole));
            }
            inner.push(pp);
        } else {
            outer = &outer + &pp.to_ratfun();
        }
    }
    let constant = outer.eval(c)?;
    Ok(LaurentSplit {
        constant,
        inner,
        outer,
    })
}

/// Laurent split with every on-circle pole treated as exterior.
pub fn laurent_split(p: Prime, f: &RatFun, c: &Q, r: &LogMag) -> Result<LaurentSplit> {
    laurent_split_with(p, f, c, r, &[])
}

/// Smallest `|f - beta|` at `x_{c,r}` over a grid of candidate values
/// `beta = f(c + tau)` with `|tau| <= r`, plus the Laurent constant.
pub fn pushforward_center_oracle(
    p: Prime,
    f: &RatFun,
    c: &Q,
    r: &LogMag,
    samples: usize,
    seed: u64,
) -> Result<LogMag> {
    let mut cands = vec![laurent_split(p, f, c, r)?.constant];
    let step = match r {
        LogMag::Zero => Q::zero(),
        LogMag::Pow(t) => p.pow(crate::scalars::to_i64(&crate::scalars::ceil_q(t))),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 0..samples {
        let n: i64 = if j < samples / 2 {
            j as i64
        } else {
            rng.gen_range(-1000..=1000)
        };
        let den: i64 = if j % 3 == 2 {
            let mut d = rng.gen_range(1..=50);
            while d as u64 % p.get() == 0 {
                d += 1;
            }
            d
        } else {
            1
        };
        let tau = &step * Q::new(n.into(), den.into());
        if let Ok(v) = f.eval(&(c + &tau)) {
            cands.push(v);
        }
    }
    cands
        .iter()
        .map(|b| gauss_norm(p, &(f - &RatFun::constant(b.clone())), c, r))
        .try_fold(None::<LogMag>, |best, m| {
            let m = m?;
            Ok(Some(match best {
                Some(b) if b <= m => b,
                _ => m,
            }))
        })
        .map(|b| b.expect("at least one candidate"))
}

pub fn fmt_ratfun(f: &RatFun) -> String {
    match f.as_constant() {
        Some(a) => fmt_q(&a),
        None => f.to_string(),
    }
}
