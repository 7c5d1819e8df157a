use padic_epsilon::characters::{dwork_splitting_product, gauss_sum, AddChar, MultChar};
use padic_epsilon::epsilon::{working_context, RationalForm};
use padic_epsilon::global::{
    functional_equation_check, global_epsilon, global_epsilon_from, gos_chi, l_polynomial, l_polynomial_with,
    verify_product_formula, InfinityMode, LOptions, RankOneGlobalModule,
};
use padic_epsilon::local_modules::stationary_phase;
use padic_epsilon::{Ctx, PadicNumber};

fn ctx(p: u64, f: usize) -> Ctx {
    working_context(p, f, 20).unwrap()
}

fn unit(c: &Ctx, k: u64, j: i64) -> PadicNumber {
    let t = c.teichmuller(&c.residue_field().from_index(1 + k % (c.q() - 1)));
    &t * &(&c.one() + &(&c.from_int(j) * &c.uniformizer()))
}

fn kummer_pair(c: &Ctx, a: i64, b: i64) -> RankOneGlobalModule {
    let f = c.residue_field();
    RankOneGlobalModule::kummer(c, &[(f.zero(), a), (f.one(), b)]).unwrap()
}

#[test]
fn eigenvalues_on_rational_points() {
    for p in [3u64, 5, 7] {
        let c = ctx(p, 1);
        let f = c.residue_field().clone();
        let g = RankOneGlobalModule::new(&c, vec![(f.zero(), 1)], f.from_int(2), c.one(), 0, InfinityMode::Auto).unwrap();
        for x in f.elements().filter(|x| !f.is_zero(x)) {
            let direct = &MultChar::new(&c, 1).eval_base(&x).unwrap() * &dwork_splitting_product(&c, &f.from_int(2).clone()).unwrap();
            let via_psi = &MultChar::new(&c, 1).eval_base(&x).unwrap() * &AddChar::new(&c, f.from_int(2)).eval(&x, 1).unwrap();
            assert_eq!(g.frobenius_eigenvalue(&x, 1).unwrap(), via_psi);
            if x == f.one() {
                assert_eq!(via_psi, direct, "p={p}");
            }
        }
        assert!(g.frobenius_eigenvalue(&f.zero(), 1).is_err());
    }
}

#[test]
fn kummer_pair_l_function_is_first_power_sum() {
    for p in [3u64, 5, 7] {
        let c = ctx(p, 1);
        let f = c.residue_field().clone();
        for a in 1..c.q() as i64 - 1 {
            let g = kummer_pair(&c, a, -a);
            let l = l_polynomial(&g).unwrap();
            assert_eq!(l.dims(), (0, 1, 0));
            let mut s1 = c.zero();
            for x in f.elements() {
                if f.is_zero(&x) || x == f.one() {
                    continue;
                }
                let v = &MultChar::new(&c, a).eval_base(&x).unwrap() * &MultChar::new(&c, -a).eval_base(&f.sub(&x, &f.one())).unwrap();
                s1 = &s1 + &v;
            }
            assert_eq!(l.numerator[1], s1, "p={p} a={a}");
            assert_eq!(g.power_sum(1).unwrap(), s1);
        }
    }
}

#[test]
fn gauss_module_reciprocal_root_and_power_sums() {
    for (p, fd) in [(3u64, 1usize), (5, 1), (3, 2)] {
        let c = ctx(p, fd);
        let f = c.residue_field().clone();
        for a in 1..c.q() as i64 - 1 {
            let g = RankOneGlobalModule::gauss(&c, a, f.one()).unwrap();
            let l = l_polynomial(&g).unwrap();
            let beta = gauss_sum(&c, a).unwrap();
            assert_eq!(l.numerator, vec![c.one(), -beta.clone()], "q={} a={a}", c.q());
            for n in 1..=3 {
                assert_eq!(g.power_sum(n).unwrap(), -beta.pow(n as i64).unwrap(), "q={} a={a} n={n}", c.q());
            }
        }
    }
}

#[test]
fn tate_and_scalar_twist_covariance() {
    let c = ctx(5, 1);
    let f = c.residue_field().clone();
    let bases = [
        kummer_pair(&c, 1, 2),
        RankOneGlobalModule::gauss(&c, 3, f.from_int(2)).unwrap(),
        RankOneGlobalModule::trivial(&c),
        RankOneGlobalModule::kummer(&c, &[(f.zero(), 0)]).unwrap(),
    ];
    for g in &bases {
        let l = l_polynomial(g).unwrap();
        let eps = global_epsilon(g).unwrap();
        let chi = l.euler_characteristic();
        for k in [-2i64, 1, 3] {
            let lk = l_polynomial(&g.with_twist(k)).unwrap();
            for (i, (x, y)) in l.numerator.iter().zip(&lk.numerator).enumerate() {
                assert_eq!(y.clone(), x * &c.q_power(-k * i as i64), "{g} k={k} i={i}");
            }
            assert_eq!(global_epsilon(&g.with_twist(k)).unwrap(), &eps * &c.q_power(k * chi), "{g} k={k}");
        }
        let u = unit(&c, 2, 3);
        let gu = g.with_scalar(&u).unwrap();
        for n in 1..=2 {
            assert_eq!(gu.power_sum(n).unwrap(), &g.power_sum(n).unwrap() * &u.pow(n as i64).unwrap());
        }
        assert_eq!(global_epsilon(&gu).unwrap(), &eps * &u.pow(-chi).unwrap(), "{g}");
    }
}

#[test]
fn euler_characteristic_examples() {
    let c = ctx(7, 1);
    let f = c.residue_field().clone();
    let cases = [
        (RankOneGlobalModule::trivial(&c), (2, 1, 0, 1)),
        (RankOneGlobalModule::kummer(&c, &[(f.zero(), 0)]).unwrap(), (0, 0, 1, 1)),
        (RankOneGlobalModule::kummer(&c, &[(f.zero(), 2)]).unwrap(), (0, 0, 0, 0)),
        (kummer_pair(&c, 1, 2), (-1, 0, 1, 0)),
        (RankOneGlobalModule::gauss(&c, 0, f.one()).unwrap(), (-1, 0, 1, 0)),
        (
            RankOneGlobalModule::new(&c, vec![], f.one(), c.one(), 0, InfinityMode::Auto).unwrap(),
            (0, 0, 0, 0),
        ),
        (
            RankOneGlobalModule::kummer(&c, &[(f.zero(), 1), (f.one(), 2), (f.from_int(3), 3)]).unwrap(),
            (-2, 0, 2, 0),
        ),
    ];
    for (g, (chi, h0, h1, h2)) in cases {
        let pred = gos_chi(&g);
        assert_eq!((pred.chi_c, pred.h0, pred.h1, pred.h2), (chi, h0, h1, h2), "{g}");
        let l = l_polynomial(&g).unwrap();
        assert_eq!(l.degree(), h1);
        assert!(l.tail.len() >= 2);
    }
}

#[test]
fn stationary_phase_ranks() {
    let c = ctx(7, 1);
    let f = c.residue_field().clone();
    for pts in [vec![(f.zero(), 1)], vec![(f.zero(), 1), (f.one(), 3)], vec![(f.zero(), 0), (f.from_int(2), 5), (f.one(), 2)]] {
        let g = RankOneGlobalModule::kummer(&c, &pts).unwrap();
        let sp = stationary_phase(&g).unwrap();
        assert_eq!(sp.total_rank, sp.predicted_rank);
        assert_eq!(sp.total_rank, pts.len() as i64);
        assert!(sp.summands.iter().all(|(_, o)| o.rank_laws_hold()));
    }
    assert!(stationary_phase(&RankOneGlobalModule::gauss(&c, 1, f.one()).unwrap()).is_err());
}

#[test]
fn gauss_dual_reciprocal_roots() {
    for p in [5u64, 7] {
        let c = ctx(p, 1);
        let f = c.residue_field().clone();
        for a in 1..c.q() as i64 - 1 {
            let g = RankOneGlobalModule::gauss(&c, a, f.one()).unwrap();
            let d = g.dual_twisted().unwrap();
            let beta_g = -l_polynomial(&g).unwrap().numerator[1].clone();
            let beta_d = -l_polynomial(&d).unwrap().numerator[1].clone();
            assert_eq!(&beta_g * &beta_d, c.one(), "p={p} a={a}");
            let expected = (&MultChar::new(&c, a).at_minus_one() * &gauss_sum(&c, -a).unwrap()).checked_div(&c.from_int(p as i64)).unwrap();
            assert_eq!(beta_d, expected);
            assert!(functional_equation_check(&g, &LOptions::for_ctx(&c)).unwrap().pass);
        }
    }
}

#[test]
fn parallel_euler_product_matches_serial() {
    let c = ctx(3, 2);
    let f = c.residue_field().clone();
    let g = RankOneGlobalModule::kummer(&c, &[(f.zero(), 1), (f.one(), 3), (f.gen(), 6)]).unwrap();
    let serial = l_polynomial_with(&g, &LOptions { workers: 1, ..LOptions::for_ctx(&c) }).unwrap();
    let parallel = l_polynomial_with(&g, &LOptions { workers: 4, ..LOptions::for_ctx(&c) }).unwrap();
    assert_eq!(serial.numerator, parallel.numerator);
    assert_eq!(global_epsilon_from(&serial).unwrap(), global_epsilon_from(&parallel).unwrap());
}

#[test]
fn product_formula_over_quadratic_field() {
    let c = ctx(3, 2);
    let f = c.residue_field().clone();
    let g = RankOneGlobalModule::kummer(&c, &[(f.zero(), 2), (f.gen(), 5)]).unwrap();
    let opts = LOptions::for_ctx(&c);
    for omega in [RationalForm::dx(&f), RationalForm::from_indices(&f, &[1], &[0, 1]).unwrap()] {
        let r = verify_product_formula(&g, &omega, &opts).unwrap();
        assert!(r.pass, "{} {}", r.module, r.omega);
    }
}
