//! Library results against independent constructions.

mod common;

use berkspec::berkline::{BerkPoint, Disc};
use berkspec::diffmod::{diff_polynomial, newton_polygon, Derivation, DiffModule};
use berkspec::funcalc::{cauchy_idempotent, char_poly, resolvent};
use berkspec::linalg::{QMatrix, RMatrix};
use berkspec::poly::Poly;
use berkspec::ratfun::{gauss_norm, laurent_split, on_circle_poles, pushforward_center_oracle, RatFun};
use berkspec::scalars::{abs, omega, q, qi, LogMag, Q};
use berkspec::spectra::{radius_rank1, spectrum_triangular};
use common::*;
use rand::Rng;

#[test]
fn laurent_constant_is_the_best_constant() {
    // No sampled value of f sits closer to f than the Laurent constant.
    let p = p5();
    let mut r = rng(11);
    let mut checked = 0;
    for k in 0..200 {
        let f = rand_ratfun(&mut r);
        let c = rand_q(&mut r, 10, 10);
        let x = LogMag::from_t(qi(r.gen_range(-2..=2)));
        if !on_circle_poles(p, &f, &c, &x).is_empty() {
            continue;
        }
        let split = laurent_split(p, &f, &c, &x).unwrap();
        let best = pushforward_center_oracle(p, &f, &c, &x, 48, k).unwrap();
        assert_eq!(gauss_norm(p, &split.remainder(), &c, &x).unwrap(), best, "case {k}");
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn idempotent_matches_eigenbasis() {
    // For A = P D P^-1 the cluster idempotent is P diag(1_cluster) P^-1.
    let p = p5();
    let mut r = rng(12);
    for k in 0..20 {
        let pm = rand_invertible(&mut r, 3);
        let pi = pm.inverse().unwrap();
        let eig = [qi(r.gen_range(-9..=9)) * qi(25), q(r.gen_range(1..=4), 1), q(1, 5) + qi(r.gen_range(0..=3))];
        let am = pm.mul(&diag(&eig)).mul(&pi);
        let disc = Disc::closed(qi(0), LogMag::p_pow(-1));
        let e = cauchy_idempotent(p, &am, &disc).unwrap();
        let ind: Vec<Q> = eig
            .iter()
            .map(|l| if abs(p, l) <= LogMag::p_pow(-1) { qi(1) } else { qi(0) })
            .collect();
        assert_eq!(e.e, pm.mul(&diag(&ind)).mul(&pi), "case {k}");
    }
}

#[test]
fn char_poly_and_resolvent() {
    let mut r = rng(13);
    for _ in 0..10 {
        let pm = rand_invertible(&mut r, 3);
        let eig: Vec<Q> = (0..3).map(|_| rand_q(&mut r, 9, 4)).collect();
        let am = pm.mul(&diag(&eig)).mul(&pm.inverse().unwrap());
        let want = eig.iter().fold(Poly::one(), |acc, l| &acc * &Poly::linear(l));
        assert_eq!(char_poly(&am), want);
        let res = resolvent(&am).unwrap();
        assert!(res.verify());
        // (A - S) R(S) = I at a sample S off the spectrum.
        let s = qi(101);
        let rs = QMatrix::from_fn(3, 3, |i, j| res.entries[(i, j)].eval(&s).unwrap());
        let shifted = am.sub(&QMatrix::identity(3).scale(&s));
        assert_eq!(shifted.mul(&rs), QMatrix::identity(3));
    }
}

#[test]
fn rank_one_radius_agrees_with_newton_polygon() {
    // Past omega the radius is omega over the unique slope of the operator.
    let p = p5();
    let mut r = rng(14);
    for k in 0..30 {
        let e = r.gen_range(0..4usize);
        let a = q(r.gen_range(1..=4), 5i64.pow(r.gen_range(1..=3)));
        let g = RatFun::from_poly(Poly::monomial(a, e));
        let x = BerkPoint::at(qi(0), qi(0));
        let m = DiffModule::new(RMatrix::from_rows(vec![vec![g.clone()]]).unwrap(), Derivation::DdT).unwrap();
        let op = diff_polynomial(&m, &[RatFun::one()]).unwrap();
        let np = newton_polygon(p, &op, &x).unwrap();
        let mags = np.root_magnitudes();
        assert_eq!(mags.len(), 1, "case {k}");
        let (mag, _) = &mags[0];
        assert_eq!(*mag, gauss_norm(p, &g, &qi(0), &LogMag::one()).unwrap());
        let want = omega(p).div(mag).unwrap();
        assert_eq!(radius_rank1(p, &g, &x).unwrap(), want, "case {k}");
    }
}

#[test]
fn spectrum_is_invariant_under_basis_scaling() {
    // Rescaling the second basis vector by a constant only moves the
    // off-diagonal entry, so the spectrum must not change.
    let p = p5();
    let m = module(RANK3);
    let x = BerkPoint::at(qi(0), qi(0));
    let base = spectrum_triangular(p, &m, &x, &qi(0)).unwrap();
    for lam in [qi(2), q(1, 5), qi(25)] {
        let mut rows: Vec<Vec<RatFun>> = (0..3).map(|i| (0..3).map(|j| m.matrix[(i, j)].clone()).collect()).collect();
        rows[0][1] = rows[0][1].scale(&lam);
        rows[1][2] = rows[1][2].scale(&lam.recip());
        let ms = DiffModule::new(RMatrix::from_rows(rows).unwrap(), m.derivation.clone()).unwrap();
        let s = spectrum_triangular(p, &ms, &x, &qi(0)).unwrap();
        assert!(s.orbits.set_eq(&base.orbits));
    }
}
