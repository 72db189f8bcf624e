use berkspec::diffmod::newton_polygon_of;
use berkspec::expr::{parse_expr, Expr};
use berkspec::kompakt::{orbit_eq, Orbit};
use berkspec::linalg::RMatrix;
use berkspec::poly::Poly;
use berkspec::ratfun::{gauss_norm, partial_fractions, RatFun};
use berkspec::scalars::{abs, parse_q, q, q_to_wire, qi, vp, LogMag, Prime, Q};
use berkspec::spectra::{radius_from_delta, sigma_from_radius};
use berkspec::variation::{fit_samples, Shape};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| Prime::new(p).unwrap())
}

fn rat(num: i64, den: i64) -> impl Strategy<Value = Q> {
    (-num..=num, 1..=den).prop_map(|(n, d)| q(n, d))
}

fn nonzero_rat(num: i64, den: i64) -> impl Strategy<Value = Q> {
    rat(num, den).prop_filter("nonzero", |x| *x != qi(0))
}

fn poly(deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rat(20, 12), 1..=deg + 1).prop_map(Poly::new)
}

fn split_poly(k: usize) -> impl Strategy<Value = Poly> {
    (nonzero_rat(9, 9), prop::collection::vec(rat(20, 12), 0..=k)).prop_map(|(c, roots)| {
        roots
            .iter()
            .fold(Poly::constant(c), |acc, a| &acc * &Poly::linear(a))
    })
}

fn ratfun() -> impl Strategy<Value = RatFun> {
    (poly(3).prop_filter("nonzero", |f| !f.is_zero()), split_poly(3))
        .prop_map(|(n, d)| RatFun::new(n, d).unwrap())
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..50).prop_map(|k| Expr::Int(BigInt::from(k))),
        Just(Expr::T),
        prop::sample::select(vec!["a", "c", "a_1"]).prop_map(|s| Expr::Const(s.into())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner, -3i64..4).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn delta_radius_sigma(p in prime(), t in rat(40, 12)) {
        let d = LogMag::from_t(t);
        prop_assert_eq!(sigma_from_radius(p, &radius_from_delta(p, &d)).unwrap(), d);
    }

    #[test]
    fn radius_sigma_radius(p in prime(), t in nonzero_rat(40, 12)) {
        let r = LogMag::from_t(t.abs());
        prop_assert_eq!(radius_from_delta(p, &sigma_from_radius(p, &r).unwrap()), r);
    }

    #[test]
    fn radius_is_monotone(p in prime(), a in rat(30, 8), b in rat(30, 8)) {
        // Smaller distance to Z_p, larger radius.
        let (da, db) = (LogMag::from_t(a), LogMag::from_t(b));
        if da <= db {
            prop_assert!(radius_from_delta(p, &da) >= radius_from_delta(p, &db));
        }
    }

    #[test]
    fn gauss_norm_is_multiplicative(p in prime(), f in ratfun(), g in ratfun(), c in rat(20, 20), t in rat(6, 4)) {
        let r = LogMag::from_t(t);
        let nf = gauss_norm(p, &f, &c, &r).unwrap();
        let ng = gauss_norm(p, &g, &c, &r).unwrap();
        prop_assert_eq!(gauss_norm(p, &(&f * &g), &c, &r).unwrap(), nf.mul(&ng));
        prop_assert!(gauss_norm(p, &(&f + &g), &c, &r).unwrap() <= nf.max(ng));
    }

    #[test]
    fn gauss_norm_bounds_values(p in prime(), f in poly(4), c in rat(20, 20), t in 0i64..3, tau in rat(40, 1)) {
        // A point of the closed disc never beats the sup norm.
        let r = LogMag::p_pow(-t);
        let x = &c + &tau * p.pow(t);
        prop_assert!(abs(p, &f.eval(&x)) <= gauss_norm(p, &RatFun::from_poly(f.clone()), &c, &r).unwrap());
    }

    #[test]
    fn partial_fractions_reassemble(f in ratfun()) {
        let pf = partial_fractions(&f).unwrap();
        prop_assert_eq!(pf.reassemble(), f);
    }

    #[test]
    fn gcd_divides(f in poly(4), g in poly(4), h in split_poly(2)) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let a = &f * &h;
        let b = &g * &h;
        let d = a.gcd(&b);
        prop_assert!(a.div_rem(&d).1.is_zero());
        prop_assert!(b.div_rem(&d).1.is_zero());
        prop_assert!(d.div_rem(&h.monic()).1.is_zero());
    }

    #[test]
    fn newton_polygon_reads_root_sizes(p in prime(), roots in prop::collection::vec(rat(200, 60), 1..7)) {
        let f = roots.iter().fold(Poly::one(), |acc, x| &acc * &Poly::linear(x));
        let ts: Vec<Option<Q>> = f.coeffs().iter().map(|c| vp(p, c).map(qi)).collect();
        let np = newton_polygon_of(&ts);
        prop_assert_eq!(np.total(), roots.len());
        let mut got: Vec<LogMag> = np
            .root_magnitudes()
            .into_iter()
            .flat_map(|(m, k)| std::iter::repeat(m).take(k))
            .collect();
        let mut want: Vec<LogMag> = roots.iter().map(|x| abs(p, x)).collect();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn fraction_free_det_matches_elimination(m in prop::collection::vec(ratfun(), 4)) {
        let a = RMatrix::from_rows(vec![m[..2].to_vec(), m[2..].to_vec()]).unwrap();
        prop_assert_eq!(a.det_fraction_free(), a.det());
    }

    #[test]
    fn fraction_free_solve(m in prop::collection::vec(ratfun(), 4), b in prop::collection::vec(ratfun(), 2)) {
        let a = RMatrix::from_rows(vec![m[..2].to_vec(), m[2..].to_vec()]).unwrap();
        prop_assume!(!a.det().is_zero());
        let x = a.solve_fraction_free(&b).unwrap();
        prop_assert_eq!(a.mul_vec(&x), b);
    }

    #[test]
    fn fit_recovers_kinked_lines(
        s1 in rat(5, 3), s2 in rat(5, 3), b in rat(10, 4), k in 2usize..8, n in 10usize..20,
    ) {
        // Two lines meeting at sample k.
        let ts: Vec<Q> = (0..n).map(|i| q(i as i64, 2)).collect();
        let tk = ts[k].clone();
        let y = |t: &Q| if *t <= tk { &s1 * t + &b } else { &s2 * (t - &tk) + &s1 * &tk + &b };
        let samples: Vec<(Q, Option<Q>)> = ts.iter().map(|t| (t.clone(), Some(y(t)))).collect();
        let fit = fit_samples(&samples).unwrap();
        if s1 == s2 {
            prop_assert!(fit.breakpoints.is_empty());
        } else {
            prop_assert_eq!(&fit.breakpoints, &vec![tk.clone()]);
        }
        for piece in &fit.pieces {
            match &piece.shape {
                Shape::Affine { slope, .. } => prop_assert!(*slope == s1 || *slope == s2),
                Shape::Zero => prop_assert!(false, "no zero run expected"),
            }
        }
    }

    #[test]
    fn canonical_center_names_same_orbit(p in prime(), c in rat(500, 200), t in rat(8, 3)) {
        let o = Orbit::new(c, LogMag::from_t(t));
        prop_assert!(orbit_eq(p, &o, &o.canonical(p)));
        prop_assert!(orbit_eq(p, &o.canonical(p), &o));
    }

    #[test]
    fn expr_render_round_trip(e in expr()) {
        prop_assert_eq!(parse_expr(&e.render()).unwrap(), e);
    }

    #[test]
    fn wire_round_trip(x in rat(100000, 100000)) {
        prop_assert_eq!(parse_q(&q_to_wire(&x)).unwrap(), x);
    }
}
