use cubic_genus::equilibrium::{self, discriminant, endpoint_series};
use cubic_genus::exact::{rat, AlgebraicNumber, Precision, TruncatedSeries, Var};
use cubic_genus::hierarchy::StringHierarchy;
use cubic_genus::parallel::Execution;
use cubic_genus::toda::GenusCoeffTable;
use cubic_genus::wick;
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Float, Rational};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn series(len: usize) -> impl Strategy<Value = TruncatedSeries> {
    (0i64..3, proptest::collection::vec(small_rational(), len)).prop_map(|(offset, c)| TruncatedSeries::new(Var::W, offset, c))
}

/// Coefficientwise equality below the smaller horizon.
fn agree(a: &TruncatedSeries, b: &TruncatedSeries) -> bool {
    let top = a.horizon().min(b.horizon());
    let low = a.offset().min(b.offset());
    (low..top).all(|e| a.coeff(e).unwrap_or_default() == b.coeff(e).unwrap_or_default())
}

proptest! {
    #[test]
    fn multiplication_is_associative(a in series(7), b in series(7), c in series(7)) {
        let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
        let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(agree(&lhs, &rhs));
    }

    #[test]
    fn multiplication_distributes(a in series(7), b in series(7), c in series(7)) {
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(agree(&lhs, &rhs));
    }

    #[test]
    fn division_undoes_multiplication(a in series(8), b in series(8), lead in small_rational()) {
        prop_assume!(lead != 0);
        let mut coeffs = b.coeffs().to_vec();
        coeffs[0] = lead;
        let b = TruncatedSeries::new(Var::W, b.offset(), coeffs);
        let q = a.mul(&b).unwrap().div(&b).unwrap();
        prop_assert!(q.horizon() > a.offset());
        prop_assert!(agree(&q, &a));
    }
}

fn algebraic() -> impl Strategy<Value = AlgebraicNumber> {
    proptest::array::uniform4(small_rational()).prop_map(|[a, b, c, d]| AlgebraicNumber::new(a, b, c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn algebraic_products_match_floats(x in algebraic(), y in algebraic()) {
        let bits = Precision(50).bits();
        let exact = (&x * &y).to_float(bits);
        let float = x.to_float(bits) * y.to_float(bits);
        let scale = Float::with_val(bits, exact.abs_ref()).max(&Float::with_val(bits, 1));
        let err = Float::with_val(bits, &exact - &float).abs() / scale;
        prop_assert!(err < 1e-40);
    }
}

#[test]
fn c0_embedding() {
    let bits = Precision(50).bits();
    let c0 = AlgebraicNumber::monomial(rat(-1, 18), 1).to_float(bits);
    let two = Float::with_val(bits, 2).pow(Float::with_val(bits, -0.5));
    let three = Float::with_val(bits, 3).pow(Float::with_val(bits, -1.75));
    let expect = -(two * three);
    assert!(Float::with_val(bits, &c0 - &expect).abs() < 1e-40);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn subcritical_endpoints(frac in 0.0f64..1.0) {
        let p = Precision(30);
        let bits = p.bits();
        let uc = equilibrium::u_critical(bits);
        let top = Float::with_val(bits, &uc - 1e-3);
        let u = Float::with_val(bits, &top * frac);
        prop_assert!(discriminant(&u).is_sign_positive() || u.is_zero());
        let eq = equilibrium::solve_endpoints(&u, p).unwrap();
        let one_minus = Float::with_val(bits, 1) - Float::with_val(bits, &u * eq.x.value()) * 6u32;
        prop_assert!(one_minus > 0);
        if !u.is_zero() {
            prop_assert!(discriminant(&u) > 0);
            prop_assert!(eq.z0.value() > eq.b.value());
        }
    }
}

#[test]
fn gap_closes_at_the_critical_point() {
    let p = Precision(30);
    let bits = p.bits();
    let uc = equilibrium::u_critical(bits);
    let gaps: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8]
        .iter()
        .map(|d| {
            let u = Float::with_val(bits, &uc * (1.0 - d));
            let eq = equilibrium::solve_endpoints(&u, p).unwrap();
            Float::with_val(bits, eq.z0.value() - eq.b.value()).to_f64()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0), "{gaps:?}");
    assert!(gaps[3] < 1e-2);
}

#[test]
fn endpoint_series_is_the_genus0_hierarchy() {
    let order = 20;
    let h = StringHierarchy::compute(0, order + 2).unwrap();
    let (x, y) = endpoint_series(order).unwrap();
    let b0 = h.b_in_u(0, &rat(1, 1)).unwrap();
    let g0 = h.g_in_u(0, &rat(1, 1)).unwrap();
    for k in 0..order as i64 {
        assert_eq!(x.coeff_u(2 * k + 1), b0.coeff_u(2 * k + 1), "u^{}", 2 * k + 1);
    }
    // g₀(1, u) = y²/4
    let y2 = y.inner.square().scale(&rat(1, 4));
    for k in 0..order as i64 {
        assert_eq!(y2.coeff(k), g0.coeff_u(2 * k), "u^{}", 2 * k);
    }
}

#[test]
fn table_entries_are_nonnegative_integers() {
    let table = GenusCoeffTable::from_pipeline(3, 16).unwrap();
    assert!(table.non_integral().is_empty());
    for (g, j, f) in table.iter() {
        if j < g {
            assert_eq!(*f, 0, "g = {g}, j = {j}");
        }
    }
}

#[test]
fn oracle_does_not_depend_on_workers() {
    let seq = wick::enumerate(4, Execution::Sequential).unwrap();
    assert_eq!(seq, wick::enumerate(4, Execution::Parallel(Some(3))).unwrap());
    assert_eq!(seq, wick::enumerate(4, Execution::Auto).unwrap());
}
