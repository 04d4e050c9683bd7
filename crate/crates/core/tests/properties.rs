use iwasawa_core::characters::{format_fractions, parse_fractions, DirichletCharacter};
use iwasawa_core::modsym::{
    cd_chain, manin_decomposition, varpi_formal, Sign, SymbolRing, SymbolSpace, Twist,
};
use iwasawa_core::series::{diagonal_expansion, diagonalize, tilde_xi_1, xi_n, PowerSeries};
use iwasawa_core::{ExtRing, ExtScalar, ModulePresentation};
use proptest::prelude::*;

fn coeffs(n: usize, q: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0..q, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scalar_ring_laws(a in coeffs(2, 625), b in coeffs(2, 625), c in coeffs(2, 625)) {
        let r = ExtRing::cyclotomic(5, 3, 4);
        let (a, b, c) = (
            ExtScalar::from_coeffs(&r, &a, 4),
            ExtScalar::from_coeffs(&r, &b, 4),
            ExtScalar::from_coeffs(&r, &c, 4),
        );
        prop_assert!(a.mul(&b).agrees(&b.mul(&a)));
        prop_assert!(a.mul(&b.add(&c)).agrees(&a.mul(&b).add(&a.mul(&c))));
        if a.is_unit() {
            prop_assert!(a.mul(&a.inverse().unwrap()).agrees(&ExtScalar::one(&r, 4)));
        }
    }

    #[test]
    fn diagonalization_identity(c in coeffs(5, 625)) {
        let f = PowerSeries::from_ints(&ExtRing::zp(5, 4), &c, 5, 4);
        prop_assert!(diagonalize(&f).agrees(&diagonal_expansion(&f)));
    }

    #[test]
    fn derivative_identity(c in coeffs(5, 625)) {
        let f = PowerSeries::from_ints(&ExtRing::zp(5, 4), &c, 5, 4);
        let lhs = tilde_xi_1(&f).unwrap().at_x_zero().truncate(4);
        prop_assert!(lhs.agrees(&xi_n(&f, 1).truncate(4)));
    }

    #[test]
    fn fitting_order_is_invariant_under_row_operations(
        rows in prop::collection::vec(coeffs(3, 125), 1..4),
        f in 0..125i64,
    ) {
        let rows: Vec<Vec<u64>> = rows.into_iter().map(|r| r.into_iter().map(|x| x as u64).collect()).collect();
        let a = ModulePresentation::new(5, 3, 3, rows.clone());
        let mut mixed = rows.clone();
        let first = mixed[0].clone();
        for (x, y) in mixed.last_mut().unwrap().iter_mut().zip(&first) {
            *x = (*x + f as u64 * y) % 125;
        }
        if rows.len() > 1 {
            let b = ModulePresentation::new(5, 3, 3, mixed);
            prop_assert_eq!(a.order_exp(), b.order_exp());
        }
        prop_assert!(a.order_exp() <= 9);
    }

    #[test]
    fn character_group_laws(a in 0..6u64, b in 0..6u64) {
        let chi = DirichletCharacter::from_fractions(13, &[(a, 6)]).unwrap();
        let psi = DirichletCharacter::from_fractions(13, &[(b, 6)]).unwrap();
        let prod = chi.mul(&psi);
        prop_assert!(prod.mul(&psi.inv()).normalized() == chi.normalized());
        prop_assert_eq!(prod.is_even(), chi.is_even() == psi.is_even());
        let text = format_fractions(&chi.fractions());
        let back = DirichletCharacter::from_fractions(13, &parse_fractions(&text).unwrap()).unwrap();
        prop_assert!(back.normalized() == chi.normalized());
    }

    #[test]
    fn manin_paths_are_gamma1_invariant(
        x in -60i64..60,
        y in 1i64..60,
        m in 5i64..25,
        word in prop::collection::vec(0usize..3, 1..5),
    ) {
        // {0 -> g r} and {0 -> r} have the same boundary for g in Gamma_1(M)
        let space = SymbolSpace::build(m as u64, Twist::Gamma1, SymbolRing::rational(2), Sign::Full).unwrap();
        let path = |x: i64, y: i64| {
            let chain: Vec<(i64, u64, u64)> =
                manin_decomposition(x, y, m).into_iter().map(|(u, v, s)| (s, u, v)).collect();
            space.boundary_of(&space.chain(&chain).unwrap())
        };
        let gens = [[1i64, 1, 0, 1], [1, 0, m, 1], [1, -1, 0, 1]];
        let (mut gx, mut gy) = (x, y);
        for &i in &word {
            let [a, b, c, d] = gens[i];
            (gx, gy) = (a * gx + b * gy, c * gx + d * gy);
        }
        prop_assert_eq!(path(x, y), path(gx, gy));
    }

    #[test]
    fn cd_symbols_are_antisymmetric(c in 2u64..200, d in 2u64..200, u in 0u64..13, v in 0u64..13) {
        let space = SymbolSpace::build(13, Twist::Gamma1, SymbolRing::rational(2), Sign::Full).unwrap();
        let q = space.ring().modulus();
        if let Ok(a) = space.cd_symbol(c, d, u, v) {
            let b = space.cd_symbol(d, c, (13 - v) % 13, u).unwrap();
            prop_assert!(a.iter().zip(&b).all(|(x, y)| (x + y) % q == 0));
            prop_assert!(cd_chain(13, c, d, u, v).is_ok());
        }
        // varpi kills (u, v) + (v, u)
        if u % 13 != 0 && v % 13 != 0 {
            let f = varpi_formal(13, &[(1, u, v), (1, v, u)]).unwrap();
            prop_assert!(f.values().all(|&k| k == 0));
        }
    }
}
