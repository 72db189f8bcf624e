//! One PASS/FAIL line per acceptance criterion. Every comparison is exact.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use berkspec::berkline::{BerkPoint, Disc};
use berkspec::diffmod::{cyclic_vector, diff_polynomial, newton_polygon_of, residual, wronskian, Derivation, DiffModule};
use berkspec::funcalc::{cauchy_idempotent, matrix_spectrum};
use berkspec::kompakt::{converges, neighborhood_basis, orbit_disjoint, CompactSet, Orbit};
use berkspec::linalg::{QMatrix, RMatrix};
use berkspec::poly::Poly;
use berkspec::ratfun::{gauss_norm, partial_fractions, RatFun};
use berkspec::scalars::{abs, q, qi, vp, LogMag, Prime, Q};
use berkspec::spectra::{
    is_refined, radius_from_delta, robba_decompose, sigma_from_radius, spectrum_triangular,
};
use berkspec::variation::{
    approx_check, controlling_graph, fit_log_affine, junction_check, scaled_schedule, vary_spectrum,
};
use common::*;
use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, Box<dyn std::error::Error>>;

macro_rules! ensure {
    ($c:expr, $($m:tt)*) => {
        if !$c {
            return Err(format!($($m)*).into());
        }
    };
}

fn gauss(c: Q) -> BerkPoint {
    BerkPoint::at(c, qi(0))
}

fn c1_worked_examples() -> Outcome {
    let p = p5();
    let pf = problem(EXAMPLE_A);
    let m = pf.require_module()?;
    let (a, c) = (konst(&pf, "a"), konst(&pf, "c"));
    // Inside the hole's circle, r < |c|.
    for t in [q(5, 4), q(3, 2), qi(2), q(5, 2), q(7, 2)] {
        let s = spectrum_triangular(p, m, &BerkPoint::at(qi(0), t.clone()), &qi(0))?;
        let want = Orbit::new(&a / &c, abs(p, &(&a / (&c * &c))).mul(&LogMag::from_t(t.clone())));
        ensure!(s.diagonal == vec![want.clone()], "example A at t = {t}: {:?}", s.diagonal);
    }
    // Outside it, r > |c|.
    for t in [qi(0), q(1, 4), q(1, 2), q(2, 3), q(9, 10)] {
        let s = spectrum_triangular(p, m, &BerkPoint::at(qi(0), t.clone()), &qi(0))?;
        let want = Orbit::new(qi(0), abs(p, &a).mul(&LogMag::from_t(-t.clone())));
        ensure!(s.diagonal == vec![want.clone()], "example A at t = {t}: {:?}", s.diagonal);
    }

    let pf = problem(RANK3);
    let a1 = konst(&pf, "a_1");
    let s = spectrum_triangular(p, pf.require_module()?, &gauss(qi(0)), &qi(0))?;
    let want = CompactSet::new(p, vec![Orbit::new(a1.clone(), LogMag::Zero), Orbit::new(qi(0), abs(p, &a1))]);
    ensure!(s.orbits.set_eq(&want), "rank 3 orbits {}", s.orbits.render());
    let ranks: Vec<usize> = robba_decompose(&s)?.iter().map(|b| b.rank()).collect();
    ensure!(ranks == vec![1, 2], "rank 3 block ranks {ranks:?}");

    let pf = problem(RANK2);
    let m = pf.require_module()?;
    let (a0, a1r) = (konst(&pf, "a_0"), konst(&pf, "a_1"));
    let s = spectrum_triangular(p, m, &gauss(qi(0)), &qi(0))?;
    let want = CompactSet::new(p, vec![Orbit::new(a0.clone(), abs(p, &a1r))]);
    ensure!(s.orbits.set_eq(&want) && s.orbits.orbits().len() == 1, "rank 2 at d_0: {}", s.orbits.render());
    ensure!(is_refined(p, &s).iter().all(|r| *r), "rank 2 at d_0 not refined");
    let s = spectrum_triangular(p, m, &gauss(qi(1)), &qi(1))?;
    let blocks = robba_decompose(&s)?;
    ensure!(
        blocks.len() == 2 && blocks.iter().all(|b| b.rank() == 1) && s.separation_certified,
        "rank 2 at d_1: {} blocks",
        blocks.len()
    );
    ensure!(orbit_disjoint(p, &blocks[0].orbit, &blocks[1].orbit), "rank 2 at d_1 blocks meet");
    let derived = Orbit::new(a1r.clone(), abs(p, &a0));
    ensure!(blocks[0].orbit == derived, "rank 2 first block at d_1: {:?}", blocks[0].orbit);
    Ok(format!(
        "example A at 10 radii, rank 3 blocks 1+2, rank 2 refined at d_0 and split 1+1 at d_1 \
         (first block derived {} where the stated value is {{a_1}}+Z_p)",
        blocks[0].orbit.render_with(p, &pf.constants)
    ))
}

fn c2_round_trips() -> Outcome {
    let mut r = rng(2);
    let mut n = 0;
    for pv in [2u64, 3, 5] {
        let p = Prime::new(pv)?;
        let w = p.w();
        let d = LogMag::Zero;
        ensure!(radius_from_delta(p, &d).is_one(), "delta 0 at p = {pv}");
        ensure!(sigma_from_radius(p, &LogMag::one())? == d, "R = 1 at p = {pv}");
        for k in 0..200 {
            let l = (k % 5) as i64;
            let den = r.gen_range(1..=12i64);
            let u = q(r.gen_range(0..den), den);
            // delta in band l, then back.
            let td = if l == 0 { -(&u + q(1, den)) * qi(3) } else { qi(l - 1) + &u };
            let d = LogMag::from_t(td.clone());
            let back = sigma_from_radius(p, &radius_from_delta(p, &d))?;
            ensure!(back == d, "p = {pv}, t_delta = {td}: got {back:?}");
            // radius in band l, then back.
            let tr = if l == 0 {
                &w + &u * qi(3)
            } else {
                &w / p.pow(l) * (Q::one() + &u * qi(pv as i64 - 1))
            };
            let rr = LogMag::from_t(tr.clone());
            let back = radius_from_delta(p, &sigma_from_radius(p, &rr)?);
            ensure!(back == rr, "p = {pv}, t_R = {tr}: got {back:?}");
            n += 2;
        }
    }
    Ok(format!("{n} exact round trips over l = 0..4 and p = 2, 3, 5"))
}

fn c3_junction() -> Outcome {
    let p = p5();
    let m = module(EXAMPLE_A);
    let tbl = vary_spectrum(p, &m, &qi(0), &qi(0), &qi(2), 21)?;
    let j = junction_check(&tbl, &qi(1))?;
    ensure!(j.labels_differ == vec![true], "labels {:?}", j.labels_differ);
    ensure!(
        CompactSet::new(p, j.left.clone()).set_eq(&CompactSet::new(p, j.right.clone())),
        "one-sided limits differ"
    );
    ensure!(j.left[0].radius == LogMag::p_pow(3), "limit radius {:?}", j.left[0].radius);
    Ok(format!(
        "limits {} and {} agree at t = 1",
        j.left[0].render(p),
        j.right[0].render(p)
    ))
}

fn c4_log_affine() -> Outcome {
    let p = p5();
    // Each segment stays inside the supported window of its module.
    let segs: [(&str, Q, Q, Q); 6] = [
        (EXAMPLE_A, qi(0), qi(0), qi(3)),
        (EXAMPLE_A, qi(5), qi(1), qi(3)),
        (RANK3, qi(0), q(-9, 10), q(9, 10)),
        (RANK3, qi(1), q(-9, 10), q(9, 10)),
        (RANK2, qi(0), q(-9, 10), q(19, 10)),
        (RANK2, qi(1), q(-9, 10), q(9, 10)),
    ];
    let mut worst = BigInt::one();
    let mut pieces = 0;
    for (src, c, ta, tb) in segs {
        let m = module(src);
        let tbl = vary_spectrum(p, &m, &c, &ta, &tb, 25)?;
        for i in 0..tbl.families() {
            let f = fit_log_affine(&tbl, i)?;
            let dmax = f.max_denominator();
            ensure!(
                dmax <= BigInt::from(m.rank()),
                "slope denominator {dmax} on branch {c}, family {i}"
            );
            worst = worst.max(dmax);
            pieces += f.pieces.len();
        }
    }
    Ok(format!("{pieces} affine pieces on 6 segments, largest slope denominator {worst}"))
}

fn c5_controlling_graph() -> Outcome {
    let p = p5();
    let pf = problem(EXAMPLE_A);
    let dom = pf.domain.as_ref().ok_or("example A has no domain")?;
    let g = controlling_graph(p, pf.require_module()?, dom, 21, &pf.task.offgraph)?;
    ensure!(g.samples_per_edge >= 20, "{} samples", g.samples_per_edge);
    ensure!(g.same_breakpoints, "breakpoints differ");
    ensure!(g.edges[0].spectrum_breakpoints == vec![qi(1)], "branch 0 breaks {:?}", g.edges[0].spectrum_breakpoints);
    ensure!(g.off_graph.iter().all(|o| o.ok), "off-graph mismatch");
    Ok(format!(
        "{} branches at {} samples each, breakpoints equal, {} off-graph discs agree",
        g.edges.len(),
        g.samples_per_edge,
        g.off_graph.len()
    ))
}

fn c6_approximation() -> Outcome {
    let p = p5();
    let pf = problem(RANK3);
    let m = pf.require_module()?;
    let x = gauss(qi(0));
    let eps = LogMag::p_pow(-1);
    let rep = approx_check(p, m, scaled_schedule(p, pf.perturbation()?), &x, &qi(0), &eps, 10)?;
    ensure!(rep.l0 <= 10, "l0 = {}", rep.l0);
    // Independent check of block dimensions and type-2 stability past l0.
    let base = spectrum_triangular(p, m, &x, &qi(0))?;
    let dims = |s: &berkspec::spectra::SpectrumResult| {
        let mut v: Vec<usize> = s.blocks.iter().map(|b| b.rank()).collect();
        v.sort();
        v
    };
    let type2 = |s: &berkspec::spectra::SpectrumResult| {
        CompactSet::new(p, s.orbits.orbits().iter().filter(|o| !o.radius.is_zero()).cloned().collect())
    };
    let sched = scaled_schedule(p, pf.perturbation()?);
    for l in rep.l0..=10 {
        let ml = DiffModule::new(m.matrix.add(&sched(l)), m.derivation.clone())?;
        let s = spectrum_triangular(p, &ml, &x, &qi(0))?;
        ensure!(dims(&s) == dims(&base), "block ranks change at l = {l}");
        ensure!(type2(&s).set_eq(&type2(&base)), "type-2 orbits move at l = {l}");
    }

    // d + p^(l-1) T^(p^l) against the trivial module.
    let zero = DiffModule::new(RMatrix::from_rows(vec![vec![RatFun::zero()]])?, Derivation::Centered(qi(0)))?;
    let delta = |l: u32| {
        let e = 5usize.pow(l);
        RMatrix::from_rows(vec![vec![RatFun::from_poly(Poly::monomial(p.pow(l as i64 - 1), e))]]).unwrap()
    };
    let rc = approx_check(p, &zero, delta, &x, &qi(0), &eps, 8)?;
    ensure!(rc.limit_radii == vec![LogMag::one()], "limit radius {:?}", rc.limit_radii);
    ensure!(rc.radius_exempt == vec![true], "limit radius not exempt");
    for l in 1..=8u32 {
        let want = LogMag::from_t((p.w() + Q::one()) / p.pow(l as i64));
        ensure!(rc.radii[l as usize] == vec![want.clone()], "l = {l}: R = {:?}", rc.radii[l as usize]);
        ensure!(want < LogMag::one(), "l = {l}: R = 1");
    }
    Ok(format!(
        "rank 3 stable from l0 = {}; counterexample R < 1 = R(limit) for l = 1..8",
        rep.l0
    ))
}

fn c7_functional_calculus() -> Outcome {
    let p = p5();
    let mut r = rng(7);
    let unit = |r: &mut rand_chacha::ChaCha8Rng| loop {
        let x = q(r.gen_range(-24..=24), r.gen_range(1..=4) * 2 + 1);
        if vp(p, &x) == Some(0) {
            return x;
        }
    };
    for k in 0..20 {
        let l1 = q(r.gen_range(-20..=20), 1);
        let a = r.gen_range(2..=4i64);
        let b = r.gen_range(0..=1i64);
        let mut eig = vec![
            l1.clone(),
            &l1 + p.pow(a) * unit(&mut r),
            &l1 + p.pow(b) * unit(&mut r),
        ];
        eig.shuffle(&mut r);
        let pm = rand_invertible(&mut r, 3);
        let am = pm.mul(&diag(&eig)).mul(&pm.inverse()?);
        // The disc around l1 of log-radius b + 1/2 holds two eigenvalues, or
        // its outside holds the far one.
        let inner = Disc::closed(l1.clone(), LogMag::from_t(qi(b) + q(1, 2)));
        let disc = if k % 2 == 0 { inner } else { Disc::closed_outside(l1.clone(), LogMag::from_t(qi(b) + q(1, 2))) };
        let want = if k % 2 == 0 { 2 } else { 1 };
        let e = cauchy_idempotent(p, &am, &disc)?;
        ensure!(e.e.mul(&e.e) == e.e, "case {k}: e^2 != e");
        ensure!(e.e.add(&e.complement) == QMatrix::identity(3), "case {k}: sum != I");
        ensure!(am.mul(&e.e) == e.e.mul(&am), "case {k}: Ae != eA");
        ensure!(e.e.trace() == qi(want), "case {k}: trace {}", e.e.trace());
    }

    let mut worst = 0;
    for k in 0..6 {
        let (am, bm) = if k == 0 {
            let pf = problem(PROJECTOR);
            let b = pf.perturbation()?.map(|f| f.as_constant().unwrap_or_default());
            (pf.require_matrix()?.clone(), b)
        } else {
            let pm = rand_invertible(&mut r, 3);
            let pi = pm.inverse()?;
            let mut d: Vec<Q> = Vec::new();
            while d.len() < 3 {
                let x = q(r.gen_range(-30..=30), [1, 5, 25][r.gen_range(0..3)]);
                if !d.contains(&x) {
                    d.push(x);
                }
            }
            let e: Vec<Q> = (0..3).map(|_| qi(r.gen_range(-9..=9))).collect();
            (pm.mul(&diag(&d)).mul(&pi), pm.mul(&diag(&e)).mul(&pi))
        };
        let limit = matrix_spectrum(p, &am).points;
        let basis: Vec<_> = (1..=3).map(|n| neighborhood_basis(&limit, n)).collect();
        let seq = |l: u32| matrix_spectrum(p, &am.add(&bm.scale(&p.pow(l as i64)))).points;
        let rep = converges(seq, &limit, &basis, 6)?;
        ensure!(rep.converged(), "continuity case {k}: {:?}", rep.l0);
        worst = worst.max(rep.l0.iter().flatten().copied().max().unwrap_or(0));
    }
    Ok(format!("20 idempotents certified; 6 perturbation families inside 3 neighbourhoods by l = {worst}"))
}

fn c8_properties() -> Outcome {
    let mut r = rng(8);
    let p = p5();
    for k in 0..500 {
        let f = rand_ratfun(&mut r);
        let g = rand_ratfun(&mut r);
        let c = rand_q(&mut r, 20, 20);
        let x = LogMag::from_t(rand_q(&mut r, 6, 4));
        let nf = gauss_norm(p, &f, &c, &x)?;
        let ng = gauss_norm(p, &g, &c, &x)?;
        ensure!(gauss_norm(p, &(&f * &g), &c, &x)? == nf.mul(&ng), "pair {k}: not multiplicative");
        ensure!(gauss_norm(p, &(&f + &g), &c, &x)? <= nf.max(ng), "pair {k}: not ultrametric");
        ensure!(partial_fractions(&f)?.reassemble() == f, "pair {k}: reassembly");
    }
    let mut cyclic = 0;
    for k in 0..100 {
        let n = 2 + k % 2;
        let rows: Vec<Vec<RatFun>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if j < i {
                            RatFun::zero()
                        } else {
                            let num = Poly::new(vec![rand_q(&mut r, 3, 2), rand_q(&mut r, 3, 2)]);
                            RatFun::new(num, Poly::linear(&qi(r.gen_range(-3..=3)))).unwrap()
                        }
                    })
                    .collect()
            })
            .collect();
        let m = DiffModule::new(RMatrix::from_rows(rows)?, Derivation::DdT)?;
        let v = (0..4)
            .find_map(|a| cyclic_vector(&m, &RatFun::from_poly(Poly::linear(&qi(a)))).ok())
            .ok_or(format!("module {k}: no cyclic vector"))?;
        ensure!(!wronskian(&m, &v).is_zero(), "module {k}: vanishing determinant");
        let op = diff_polynomial(&m, &v)?;
        ensure!(residual(&m, &v, &op).iter().all(|x| x.is_zero()), "module {k}: nonzero residual");
        cyclic += 1;
    }
    for k in 0..200 {
        let deg = r.gen_range(1..=6);
        let roots: Vec<Q> = (0..deg)
            .map(|_| if r.gen_bool(0.15) { qi(0) } else { rand_nonzero_q(&mut r, 200, 125) })
            .collect();
        let f = roots.iter().fold(Poly::one(), |acc, x| &acc * &Poly::linear(x));
        let ts: Vec<Option<Q>> = f.coeffs().iter().map(|c| vp(p, c).map(qi)).collect();
        let np = newton_polygon_of(&ts);
        ensure!(np.total() == deg, "poly {k}: multiplicities sum to {}", np.total());
        let mut got: Vec<LogMag> = np
            .root_magnitudes()
            .into_iter()
            .flat_map(|(m, k)| std::iter::repeat(m).take(k))
            .collect();
        let mut want: Vec<LogMag> = roots.iter().map(|x| abs(p, x)).collect();
        got.sort();
        want.sort();
        ensure!(got == want, "poly {k}: root magnitudes");
    }
    Ok(format!("500 Gauss-norm pairs, 500 reassemblies, {cyclic} cyclic modules, 200 Newton polygons"))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 8] = [
        ("worked-example spectra", c1_worked_examples),
        ("delta, radius and sigma round trips", c2_round_trips),
        ("junction continuity", c3_junction),
        ("piecewise log-affinity", c4_log_affine),
        ("controlling graph", c5_controlling_graph),
        ("approximation", c6_approximation),
        ("functional calculus", c7_functional_calculus),
        ("property suites", c8_properties),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}").into())
        });
        match out {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name}: {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
