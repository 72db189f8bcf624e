#![allow(dead_code)]

use berkspec::diffmod::DiffModule;
use berkspec::linalg::QMatrix;
use berkspec::poly::Poly;
use berkspec::problem::{parse_problem, ProblemFile};
use berkspec::ratfun::RatFun;
use berkspec::scalars::{qi, Prime, Q};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const EXAMPLE_A: &str = include_str!("../../problems/example_a.txt");
pub const RANK3: &str = include_str!("../../problems/rank3.txt");
pub const RANK2: &str = include_str!("../../problems/rank2.txt");
pub const PROJECTOR: &str = include_str!("../../problems/projector.txt");

pub fn p5() -> Prime {
    Prime::new(5).unwrap()
}

pub fn problem(text: &str) -> ProblemFile {
    parse_problem(text).unwrap()
}

pub fn module(text: &str) -> DiffModule {
    problem(text).require_module().unwrap().clone()
}

pub fn konst(pf: &ProblemFile, name: &str) -> Q {
    pf.constants.iter().find(|(n, _)| n == name).unwrap().1.clone()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// `n/d` with `|n| <= num`, `1 <= d <= den`.
pub fn rand_q(r: &mut ChaCha8Rng, num: i64, den: i64) -> Q {
    Q::new(BigInt::from(r.gen_range(-num..=num)), BigInt::from(r.gen_range(1..=den)))
}

pub fn rand_nonzero_q(r: &mut ChaCha8Rng, num: i64, den: i64) -> Q {
    loop {
        let x = rand_q(r, num, den);
        if x != qi(0) {
            return x;
        }
    }
}

pub fn rand_poly(r: &mut ChaCha8Rng, deg: usize) -> Poly {
    Poly::new((0..=deg).map(|_| rand_q(r, 30, 30)).collect())
}

pub fn rand_nonzero_poly(r: &mut ChaCha8Rng, deg: usize) -> Poly {
    loop {
        let f = rand_poly(r, deg);
        if !f.is_zero() {
            return f;
        }
    }
}

/// A product of up to `k` linear factors times a constant.
pub fn rand_split_poly(r: &mut ChaCha8Rng, k: usize) -> Poly {
    let mut f = Poly::constant(rand_nonzero_q(r, 9, 9));
    for _ in 0..r.gen_range(0..=k) {
        f = &f * &Poly::linear(&rand_q(r, 30, 30));
    }
    f
}

pub fn rand_ratfun(r: &mut ChaCha8Rng) -> RatFun {
    let deg = r.gen_range(0..4);
    let num = rand_nonzero_poly(r, deg);
    let den = rand_split_poly(r, 3);
    RatFun::new(num, den).unwrap()
}

pub fn rand_invertible(r: &mut ChaCha8Rng, n: usize) -> QMatrix {
    loop {
        let rows: Vec<Vec<Q>> = (0..n)
            .map(|_| (0..n).map(|_| qi(r.gen_range(-4..=4))).collect())
            .collect();
        let m = QMatrix::from_rows(rows).unwrap();
        if m.det() != qi(0) {
            return m;
        }
    }
}

pub fn diag(v: &[Q]) -> QMatrix {
    let n = v.len();
    QMatrix::from_fn(n, n, |i, j| if i == j { v[i].clone() } else { qi(0) })
}
