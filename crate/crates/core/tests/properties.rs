use num_complex::Complex64;
use proptest::prelude::*;
use qdd::circuit::{gen_random, parse};
use qdd::complex::TagOp;
use qdd::oracle::{compare, dense_from_circuit};
use qdd::{Circuit, ComplexNumbers, Config, Package, TableMode};

fn pkg(n: usize) -> Package {
    Package::new(Config::compact().with_max_qubits(n)).unwrap()
}

fn circuit(max_qubits: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    (1..=max_qubits, 0..=max_gates, any::<u64>()).prop_map(|(n, g, seed)| gen_random(n, g, seed).unwrap())
}

fn same_width_pair(max_gates: usize) -> impl Strategy<Value = (Circuit, Circuit, Circuit)> {
    (1..=4usize, any::<u64>()).prop_flat_map(move |(n, seed)| {
        (0..=max_gates, 0..=max_gates, 0..=max_gates).prop_map(move |(a, b, c)| {
            (
                gen_random(n, a, seed).unwrap(),
                gen_random(n, b, seed ^ 1).unwrap(),
                gen_random(n, c, seed ^ 2).unwrap(),
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn functionality_matches_oracle(c in circuit(5, 25)) {
        let mut p = pkg(5);
        let u = p.build_functionality(&c).unwrap();
        let cmp = compare(&p, u, &dense_from_circuit(&c).unwrap(), 1e-10).unwrap();
        prop_assert!(cmp.passed, "{:?}", cmp);
        prop_assert!(p.check_normalization(u).is_ok());
    }

    #[test]
    fn rebuilding_is_identity_equal(c in circuit(4, 20)) {
        let mut p = pkg(4);
        let a = p.build_functionality(&c).unwrap();
        let b = p.build_functionality(&c).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn compute_tables_do_not_change_roots(c in circuit(4, 20)) {
        let mut p = pkg(4);
        let a = p.build_functionality(&c).unwrap();
        p.set_compute_tables_enabled(false);
        let b = p.build_functionality(&c).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn add_commutes((a, b, _) in same_width_pair(12)) {
        let mut p = pkg(4);
        let ua = p.build_functionality(&a).unwrap();
        let ub = p.build_functionality(&b).unwrap();
        prop_assert_eq!(p.add(ua, ub).unwrap(), p.add(ub, ua).unwrap());
    }

    #[test]
    fn add_associates_within_tolerance((a, b, c) in same_width_pair(12)) {
        let mut p = pkg(4);
        let n = a.qubits();
        let ua = p.build_functionality(&a).unwrap();
        let ub = p.build_functionality(&b).unwrap();
        let uc = p.build_functionality(&c).unwrap();
        let ab = p.add(ua, ub).unwrap();
        let left = p.add(ab, uc).unwrap();
        let bc = p.add(ub, uc).unwrap();
        let right = p.add(ua, bc).unwrap();
        let eps = p.config().epsilon;
        let l = p.to_dense_matrix(left, n).unwrap();
        let r = p.to_dense_matrix(right, n).unwrap();
        for (x, y) in l.iter().zip(&r) {
            prop_assert!((x - y).norm() <= 4.0 * eps, "{} vs {}", x, y);
        }
    }

    #[test]
    fn unitarity(c in circuit(4, 20)) {
        let mut p = pkg(4);
        let u = p.build_functionality(&c).unwrap();
        let ud = p.conjugate_transpose(u).unwrap();
        let prod = p.multiply(ud, u).unwrap();
        prop_assert_eq!(prod, p.identity_dd(c.qubits()).unwrap());
    }

    #[test]
    fn simulated_states_are_normalized(c in circuit(5, 25)) {
        let mut p = pkg(5);
        let v = p.simulate(&c).unwrap();
        let norm: f64 = p.to_dense_vector(v, c.qubits()).unwrap().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn text_round_trip(c in circuit(6, 30)) {
        prop_assert_eq!(parse(&c.render()).unwrap(), c);
    }

    #[test]
    fn tag_ops_are_exact(re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let mut cn = ComplexNumbers::new(1e-13, 65536, 16, TableMode::Bucketed).unwrap();
        let v = cn.lookup_complex(re, im).unwrap();
        let x = cn.value(v);
        let i = Complex64::i();
        prop_assert_eq!(cn.value(v.apply(TagOp::Negate)), -x);
        prop_assert_eq!(cn.value(v.apply(TagOp::Conjugate)), x.conj());
        prop_assert_eq!(cn.value(v.apply(TagOp::MulI)), x * i);
        prop_assert_eq!(cn.value(v.apply(TagOp::MulNegI)), x * -i);
        prop_assert_eq!(v.apply(TagOp::MulI).apply(TagOp::MulNegI), v);
    }

    #[test]
    fn lookups_stay_within_tolerance(r in -1.0f64..=1.0, jitter in -0.9f64..0.9) {
        let eps = 1e-13;
        let mut cn = ComplexNumbers::new(eps, 65536, 16, TableMode::Bucketed).unwrap();
        let h = cn.lookup_real(r).unwrap();
        prop_assert!((cn.real(h) - r).abs() <= eps);
        let again = cn.lookup_real(r + jitter * eps).unwrap();
        prop_assert!((cn.real(again) - r).abs() <= 2.0 * eps);
        prop_assert!(cn.check_table_invariants().is_ok());
    }
}
