use padic_epsilon::{make_context, Ctx, PadicNumber};
use proptest::prelude::*;

const FIELDS: [(u64, usize); 6] = [(2, 1), (3, 1), (5, 1), (7, 1), (3, 2), (2, 3)];

fn ctx_for(i: usize, use_pi: bool, n: i64) -> Ctx {
    let (p, f) = FIELDS[i % FIELDS.len()];
    make_context(p, f, use_pi, n).unwrap()
}

/// Rebuilds a value of a finer context inside a coarser one through the text form.
fn coarsen(x: &PadicNumber, coarse: &Ctx) -> PadicNumber {
    let prec = x.precision().min(coarse.precision());
    coarse.parse(&x.with_precision(prec).to_string()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn teichmuller_is_multiplicative_and_fixed_by_q_power(i in 0usize..6, x in 0u64..1000, y in 0u64..1000) {
        let c = ctx_for(i, true, 20);
        let f = c.residue_field().clone();
        let (x, y) = (f.from_index(x % c.q()), f.from_index(y % c.q()));
        let tx = c.teichmuller(&x);
        prop_assert_eq!(c.teichmuller(&f.mul(&x, &y)), &tx * &c.teichmuller(&y));
        prop_assert_eq!(tx.pow(c.q() as i64).unwrap(), tx.clone());
        prop_assert!(tx.is_teichmuller());
    }

    #[test]
    fn ring_axioms_and_inverses(i in 0usize..6, use_pi: bool, a in -500i64..500, b in -500i64..500, k in 1u64..50) {
        let c = ctx_for(i, use_pi, 16);
        let f = c.residue_field().clone();
        let x = &c.from_int(a) + &c.teichmuller(&f.from_index(k % c.q()));
        let y = c.from_int(b);
        let z = c.uniformizer();
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&x - &x, c.zero());
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.inv().unwrap(), c.one());
        }
        prop_assert_eq!(c.parse(&x.to_string()).unwrap(), x.clone());
    }

    #[test]
    fn precision_soundness(i in 0usize..6, a in -10_000i64..10_000, b in -10_000i64..10_000, d in 1i64..200, s in 0u64..100) {
        let coarse = ctx_for(i, true, 12);
        let fine = ctx_for(i, true, 24);
        prop_assume!(d % coarse.p() as i64 != 0);
        let eval = |c: &Ctx| -> PadicNumber {
            let t = c.teichmuller(&c.residue_field().from_index(s % c.q()));
            let num = &(&c.from_int(a) * &t) + &(&c.from_int(b) * &c.pi().unwrap());
            num.checked_div(&c.from_int(d)).unwrap()
        };
        let low = eval(&coarse);
        let high = coarsen(&eval(&fine), &coarse);
        prop_assert!(low.agree_digits(&high) >= low.precision().min(high.precision()));
    }
}

#[test]
fn gamma_functional_equation_on_rational_grid() {
    for p in [3u64, 5, 7] {
        let c = make_context(p, 1, true, 24).unwrap();
        for den in [1i64, 2, 3, 4, 6, 8] {
            if den % p as i64 == 0 {
                continue;
            }
            for num in -12i64..12 {
                let g = c.padic_gamma(num, den).unwrap();
                let g1 = c.padic_gamma(num + den, den).unwrap();
                let x = c.from_rational(num, den).unwrap();
                let expected = if num.rem_euclid(p as i64) == 0 { -g } else { -(&x * &g) };
                assert_eq!(g1, expected, "p={p} x={num}/{den}");
            }
        }
    }
}

#[test]
fn pi_relation_in_every_context() {
    for (p, f) in FIELDS {
        let c = make_context(p, f, true, 30).unwrap();
        let pi = c.pi().unwrap();
        assert_eq!(pi.pow(p as i64 - 1).unwrap(), c.from_int(-(p as i64)));
        assert_eq!(pi.valuation(), Some(1));
        assert_eq!(pi.valuation_rational(), Some((1, p as i64 - 1)));
    }
}

#[test]
fn dwork_character_basics() {
    for p in [2u64, 3, 5, 7] {
        let c = make_context(p, 1, true, 30).unwrap();
        let zeta = c.dwork_theta(&c.one()).unwrap();
        assert_eq!(zeta.pow(p as i64).unwrap(), c.one());
        assert_ne!(zeta, c.one());
        let d = &zeta - &(&c.one() + &c.pi().unwrap());
        assert!(d.valuation().is_none_or(|v| v >= 2), "p={p}");
    }
}
