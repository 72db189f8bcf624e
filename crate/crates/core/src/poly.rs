//! Dense univariate polynomials over Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalars::{fmt_q, qi, Prime, Q};

/// Coefficients in ascending degree; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(a: Q) -> Self {
        Poly::new(vec![a])
    }

    /// The variable `T`.
    pub fn t() -> Self {
        Poly::new(vec![Q::zero(), Q::one()])
    }

    /// `T - a`.
    pub fn linear(a: &Q) -> Self {
        Poly::new(vec![-a.clone(), Q::one()])
    }

    /// `a * T^k`.
    pub fn monomial(a: Q, k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = a;
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, a: &Q) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.lead().recip())
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * qi(i as i64))
                .collect(),
        )
    }

    /// `f(T + a)`, i.e. the coefficients in powers of `T - a`.
    pub fn shift(&self, a: &Q) -> Poly {
        if a.is_zero() {
            return self.clone();
        }
        // Taylor shift by repeated synthetic division.
        let mut c = self.c.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * a;
                c[j] += t;
            }
        }
        Poly::new(c)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        if dd == 0 {
            return (self.scale(&d.c[0].recip()), Poly::zero());
        }
        let inv = d.lead().recip();
        let mut r = self.c.clone();
        let mut qv = vec![Q::zero(); r.len() - dd];
        for k in (0..qv.len()).rev() {
            let f = &r[k + dd] * &inv;
            if !f.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    let t = &f * b;
                    r[k + j] -= t;
                }
            }
            qv[k] = f;
        }
        r.truncate(dd);
        (Poly::new(qv), Poly::new(r))
    }

    /// Monic gcd, by a primitive remainder sequence over Z.
    pub fn gcd(&self, o: &Poly) -> Poly {
        if self.is_zero() {
            return o.monic();
        }
        if o.is_zero() {
            return self.monic();
        }
        let (mut a, mut b) = (primitive(self), primitive(o));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.len() > 1 {
            let r = prem(&a, &b);
            a = b;
            b = if r.is_empty() { r } else { primitive_int(r) };
        }
        if b.is_empty() {
            Poly::new(a.into_iter().map(Q::from_integer).collect()).monic()
        } else {
            Poly::one()
        }
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Primitive integer polynomial with the same roots.
    fn integer_primitive(&self) -> Vec<BigInt> {
        let l = self
            .c
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self
            .c
            .iter()
            .map(|x| (x * Q::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        ints.into_iter().map(|x| x / &g).collect()
    }

    /// Distinct rational roots with multiplicities, ascending.
    pub fn rational_roots(&self) -> Vec<(Q, usize)> {
        let mut out = Vec::new();
        if self.is_zero() {
            return out;
        }
        let mut f = self.clone();
        let zeros = f.c.iter().take_while(|x| x.is_zero()).count();
        if zeros > 0 {
            f = Poly::new(f.c[zeros..].to_vec());
            out.push((Q::zero(), zeros));
        }
        if f.c.len() <= 1 {
            return out;
        }
        let ints = f.integer_primitive();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let num_divs = divisors(&a0);
        let den_divs = divisors(&an);
        let mut cands: Vec<Q> = Vec::new();
        for u in &num_divs {
            for v in &den_divs {
                let r = Q::new(u.clone(), v.clone());
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            let lin = Poly::linear(&r);
            let mut m = 0;
            loop {
                let (qq, rem) = f.div_rem(&lin);
                if !rem.is_zero() {
                    break;
                }
                f = qq;
                m += 1;
            }
            if m > 0 {
                out.push((r, m));
            }
            if f.c.len() <= 1 {
                break;
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Split into linear factors over Q; the leftover factor is returned
    /// alongside (constant when the polynomial splits).
    pub fn split_linear(&self) -> (Vec<(Q, usize)>, Poly) {
        let roots = self.rational_roots();
        let mut rest = self.clone();
        for (r, m) in &roots {
            rest = rest.div_rem(&Poly::linear(r).pow(*m)).0;
        }
        (roots, rest)
    }

    /// Coefficient vector of `f` in powers of `T - a`, shifted back so that
    /// entry `i` multiplies `(T - a)^i`.
    pub fn taylor(&self, a: &Q) -> Vec<Q> {
        self.shift(a).c
    }

    /// Sum of `coeffs[i] * (T - a)^i`.
    pub fn from_taylor(coeffs: &[Q], a: &Q) -> Poly {
        Poly::new(coeffs.to_vec()).shift(&-a.clone())
    }

    pub fn nonzero_terms(&self) -> usize {
        self.c.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn fmt_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let coef = fmt_q(&a.abs());
            let body = if mon.is_empty() {
                coef
            } else if a.abs().is_one() {
                mon
            } else if a.is_integer() {
                format!("{coef}*{mon}")
            } else {
                format!("({coef})*{mon}")
            };
            let sign = if a.is_negative() { "-" } else { "+" };
            parts.push((sign, body));
        }
        let mut s = String::new();
        for (k, (sign, body)) in parts.into_iter().enumerate() {
            if k == 0 {
                if sign == "-" {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            s.push_str(&body);
        }
        s
    }

    /// Lowest `v_p` among coefficients; `None` for zero.
    pub fn min_vp(&self, p: Prime) -> Option<i64> {
        self.c.iter().filter_map(|a| crate::scalars::vp(p, a)).min()
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut fac: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.abs();
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        if (&m % &d).is_zero() {
            let mut e = 0;
            while (&m % &d).is_zero() {
                m /= &d;
                e += 1;
            }
            fac.push((d.clone(), e));
        }
        d += 1;
    }
    if m > BigInt::one() {
        fac.push((m, 1));
    }
    let mut out = vec![BigInt::one()];
    for (q, e) in fac {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for x in &out {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(x * &pw);
                pw *= &q;
            }
        }
        out = next;
    }
    out
}

/// Integer coefficients with content 1, low degree first, no trailing zeros.
fn primitive(f: &Poly) -> Vec<BigInt> {
    let l = f.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    primitive_int(f.c.iter().map(|x| x.numer() * (&l / x.denom())).collect())
}

fn primitive_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    let sg = if v.last().unwrap().is_negative() { -g } else { g };
    v.iter().map(|x| x / &sg).collect()
}

/// Pseudo-remainder of `a` by `b`, `deg a >= deg b`, trailing zeros trimmed.
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db {
        let k = r.len() - 1;
        let lr = r[k].clone();
        for x in r.iter_mut() {
            *x *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k - db + j] -= &lr * bj;
        }
        r.pop();
        while r.last().is_some_and(|x| x.is_zero()) {
            r.pop();
        }
    }
    r
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_in("T"))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.c.iter().map(|x| -x).collect())
    }
}
