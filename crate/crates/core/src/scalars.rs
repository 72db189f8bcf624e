//! Exact p-adic magnitudes on the rationals.
//!
//! A magnitude `p^(-t)` is stored by its exponent `t`. Zero is the point at
//! `t = +inf`. Nothing here touches floating point.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `num/den`, or the bare integer when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Always `num/den`; this is the wire format.
pub fn q_to_wire(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim().replace('\u{2212}', "-");
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().ok()?;
            let d: BigInt = b.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` as a rational, `k` of either sign.
    pub fn pow(self, k: i64) -> Q {
        let base = Q::from_integer(self.big());
        if k >= 0 {
            num_traits::pow(base, k as usize)
        } else {
            num_traits::pow(base.recip(), (-k) as usize)
        }
    }

    /// `1/(p-1)`, the exponent of omega.
    pub fn w(self) -> Q {
        q(1, self.0 as i64 - 1)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn vp_int(p: &BigInt, n: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (quo, rem) = n.div_rem(p);
        if !rem.is_zero() {
            return v;
        }
        n = quo;
        v += 1;
    }
}

/// p-adic valuation, `None` standing for `+inf` at zero.
pub fn vp(p: Prime, x: &Q) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = p.big();
    Some(vp_int(&pb, x.numer()) - vp_int(&pb, x.denom()))
}

/// Magnitude `p^(-t)`; ordered by size, so `Zero` is the least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LogMag {
    Zero,
    Pow(Q),
}

impl LogMag {
    pub fn one() -> Self {
        LogMag::Pow(Q::zero())
    }

    pub fn from_t(t: Q) -> Self {
        LogMag::Pow(t)
    }

    /// The magnitude `p^k`, i.e. `t = -k`.
    pub fn p_pow(k: i64) -> Self {
        LogMag::Pow(qi(-k))
    }

    pub fn t(&self) -> Option<&Q> {
        match self {
            LogMag::Zero => None,
            LogMag::Pow(t) => Some(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LogMag::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, LogMag::Pow(t) if t.is_zero())
    }

    pub fn mul(&self, o: &LogMag) -> LogMag {
        match (self, o) {
            (LogMag::Pow(a), LogMag::Pow(b)) => LogMag::Pow(a + b),
            _ => LogMag::Zero,
        }
    }

    /// `self / o`; `None` when `o` is zero.
    pub fn div(&self, o: &LogMag) -> Option<LogMag> {
        match (self, o) {
            (_, LogMag::Zero) => None,
            (LogMag::Zero, _) => Some(LogMag::Zero),
            (LogMag::Pow(a), LogMag::Pow(b)) => Some(LogMag::Pow(a - b)),
        }
    }

    /// Real power `|x|^e` for `e > 0`.
    pub fn powq(&self, e: &Q) -> LogMag {
        match self {
            LogMag::Zero => LogMag::Zero,
            LogMag::Pow(t) => LogMag::Pow(t * e),
        }
    }

    pub fn inv(&self) -> Option<LogMag> {
        LogMag::one().div(self)
    }

    /// `p^(-t)` rendered as `5`, `5^k`, `5^(a/b)`, `1` or `0`.
    pub fn render(&self, p: Prime) -> String {
        match self {
            LogMag::Zero => "0".into(),
            LogMag::Pow(t) if t.is_zero() => "1".into(),
            LogMag::Pow(t) => {
                let k = -t;
                if k.is_one() {
                    p.to_string()
                } else if k.is_integer() {
                    format!("{}^{}", p, k.numer())
                } else {
                    format!("{}^({})", p, fmt_q(&k))
                }
            }
        }
    }
}

impl PartialOrd for LogMag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogMag {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (LogMag::Zero, LogMag::Zero) => Ordering::Equal,
            (LogMag::Zero, _) => Ordering::Less,
            (_, LogMag::Zero) => Ordering::Greater,
            (LogMag::Pow(a), LogMag::Pow(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for LogMag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogMag::Zero => write!(f, "0"),
            LogMag::Pow(t) => write!(f, "p^(-{})", fmt_q(t)),
        }
    }
}

impl Serialize for LogMag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(1))?;
        match self {
            LogMag::Zero => m.serialize_entry("zero", &true)?,
            LogMag::Pow(t) => m.serialize_entry("log_p", &q_to_wire(t))?,
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for LogMag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = LogMag;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("{\"log_p\": \"num/den\"} or {\"zero\": true}")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> std::result::Result<LogMag, A::Error> {
                let key: String = a
                    .next_key()?
                    .ok_or_else(|| de::Error::custom("empty magnitude"))?;
                match key.as_str() {
                    "zero" => {
                        let _: bool = a.next_value()?;
                        Ok(LogMag::Zero)
                    }
                    "log_p" => {
                        let s: String = a.next_value()?;
                        parse_q(&s)
                            .map(LogMag::Pow)
                            .ok_or_else(|| de::Error::custom(format!("bad rational {s}")))
                    }
                    k => Err(de::Error::unknown_field(k, &["zero", "log_p"])),
                }
            }
        }
        d.deserialize_map(V)
    }
}

/// Serde adapter for rationals as `"num/den"` strings.
pub mod qstr {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q_to_wire(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| de::Error::custom(format!("bad rational {s}")))
    }
}

pub fn abs(p: Prime, x: &Q) -> LogMag {
    match vp(p, x) {
        None => LogMag::Zero,
        Some(v) => LogMag::Pow(qi(v)),
    }
}

pub fn omega(p: Prime) -> LogMag {
    LogMag::Pow(p.w())
}

/// Distance from `x` to `Z_p`: zero when `x` is integral, else `|x|`.
pub fn dist_zp(p: Prime, x: &Q) -> LogMag {
    match vp(p, x) {
        None => LogMag::Zero,
        Some(v) if v >= 0 => LogMag::Zero,
        Some(v) => LogMag::Pow(qi(v)),
    }
}

pub fn floor_q(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("exponent out of range")
}

/// Non-negative representative of `x` modulo `p^k` for integral `x` in `Z_(p)`.
pub fn mod_pk(p: Prime, x: &Q, k: u32) -> BigInt {
    let m = num_traits::pow(p.big(), k as usize);
    let inv = mod_inverse(x.denom(), &m);
    (x.numer() * inv).mod_floor(&m)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// Part of the p-adic expansion of `x` with exponents below `k`.
///
/// For `k <= 0` this is a rational with denominator a power of `p`, and
/// `x - head(x, k)` has valuation `>= k`.
pub fn padic_head(p: Prime, x: &Q, k: i64) -> Q {
    let v = match vp(p, x) {
        None => return Q::zero(),
        Some(v) => v,
    };
    if v >= k {
        return Q::zero();
    }
    // x = p^v * u with u a unit; scale to p^-v * x integral at p.
    let scaled = x * p.pow(-v);
    let n = (k - v) as u32;
    let r = mod_pk(p, &scaled, n);
    Q::from_integer(r) * p.pow(v)
}
