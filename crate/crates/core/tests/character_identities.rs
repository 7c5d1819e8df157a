use padic_epsilon::characters::{
    add_char_eval, dwork_splitting_product, gauss_sum, gauss_sum_extension, gross_koblitz_check, jacobi_sum,
    stickelberger_valuation, AddChar, MultChar,
};
use padic_epsilon::make_context;

#[test]
fn dwork_splitting_matches_trace_character() {
    for p in [2u64, 3, 5, 7] {
        for f in [1usize, 2] {
            let c = make_context(p, f, true, 24).unwrap();
            let psi = AddChar::standard(&c);
            for x in c.residue_field().elements() {
                let split = dwork_splitting_product(&c, &x).unwrap();
                assert_eq!(split, add_char_eval(&psi, &x, 1).unwrap(), "p={p} f={f}");
            }
        }
    }
}

#[test]
fn gauss_product_with_inverse_character() {
    for (p, f) in [(5u64, 1usize), (7, 1), (5, 2)] {
        let c = make_context(p, f, true, 30).unwrap();
        let field = c.residue_field().clone();
        let q = c.q() as i64;
        for a in 1..q - 1 {
            let chi = MultChar::new(&c, a);
            let chi_inv = chi.inverse();
            // oracle: Σ_{x,y≠0} χ(x)χ̄(y)ψ(x+y) by direct double summation
            let mut double = c.zero();
            for x in field.elements().skip(1) {
                for y in field.elements().skip(1) {
                    let t = &chi.eval_base(&x).unwrap() * &chi_inv.eval_base(&y).unwrap();
                    let s = c.zeta_power(field.abs_trace(&field.add(&x, &y))).unwrap();
                    double = &double + &(&t * &s);
                }
            }
            let prod = &gauss_sum(&c, a).unwrap() * &gauss_sum(&c, -a).unwrap();
            assert_eq!(prod, double);
            assert_eq!(prod, &chi.at_minus_one() * &c.from_int(q));
        }
    }
}

#[test]
fn jacobi_relation_and_stickelberger() {
    for (p, f) in [(5u64, 1usize), (7, 1), (3, 2)] {
        let c = make_context(p, f, true, 30).unwrap();
        let q1 = c.q() as i64 - 1;
        for a in 0..q1 {
            let g = gauss_sum(&c, a).unwrap();
            assert_eq!(g.valuation(), Some(stickelberger_valuation(&c, a)));
            for b in 1..q1 {
                if a == 0 || (a + b) % q1 == 0 {
                    continue;
                }
                let lhs = &g * &gauss_sum(&c, b).unwrap();
                let rhs = -(&jacobi_sum(&c, a, b).unwrap() * &gauss_sum(&c, a + b).unwrap());
                assert_eq!(lhs, rhs, "p={p} f={f} a={a} b={b}");
            }
        }
    }
}

#[test]
fn stickelberger_frozen_values_prime_field() {
    // q = p = 7: v_π(gauss_sum(a)) = (−a) mod 6, since all exponents are single digits.
    let c = make_context(7, 1, true, 30).unwrap();
    let vals: Vec<i64> = (0..6).map(|a| gauss_sum(&c, a).unwrap().valuation().unwrap()).collect();
    assert_eq!(vals, vec![0, 5, 4, 3, 2, 1]);
}

#[test]
fn hasse_davenport_low_degree() {
    let c = make_context(5, 1, true, 30).unwrap();
    for a in 0..4 {
        let g = gauss_sum(&c, a).unwrap();
        for n in 1..=3 {
            assert_eq!(gauss_sum_extension(&c, a, n).unwrap(), g.pow(n as i64).unwrap(), "a={a} n={n}");
        }
    }
}

#[test]
fn gross_koblitz_small() {
    let c = make_context(5, 1, true, 30).unwrap();
    for a in 0..4 {
        let r = gross_koblitz_check(&c, a).unwrap();
        assert!(r.agree_digits >= 26, "a={a}: {} vs {}", r.lhs, r.rhs);
    }
}
