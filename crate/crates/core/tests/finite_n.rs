use cubic_genus::exact::Precision;
use cubic_genus::finite_n::{self, ContourConfig};
use rug::float::Constant;
use rug::{Complex, Float};

fn cfg(digits: u32) -> ContourConfig {
    ContourConfig::with_precision(Precision(digits))
}

fn absdiff(a: &Complex, b: &Complex) -> Float {
    Float::with_val(64, Complex::with_val(a.prec().0, a - b).abs().real())
}

#[test]
fn gaussian_moments() {
    let c = cfg(60);
    let bits = c.precision.bits();
    let nn = 7usize;
    let m = finite_n::compute_moments(&c, &Float::new(bits), nn, 10).unwrap();
    let n = Float::with_val(bits, nn);
    let base = Float::with_val(bits, Float::with_val(bits, Constant::Pi) * 2u32 / &n).sqrt();
    let mut expect = base;
    for (j, cj) in m.iter().enumerate() {
        if j % 2 == 1 {
            assert!(Float::with_val(bits, cj.abs_ref()) < 1e-55, "odd moment {j}");
            continue;
        }
        if j > 0 {
            expect = expect * (j as u32 - 1) / &n;
        }
        let d = absdiff(cj, &Complex::with_val(bits, &expect));
        assert!(d < 1e-55, "moment {j}: {d}");
    }
}

#[test]
fn hermite_recurrence() {
    let c = cfg(60);
    let nn = 9;
    let data = finite_n::solve(&c, &Float::new(64), nn, 12).unwrap();
    let bits = data.working.bits();
    for n in 1..=12 {
        let g = &data.recurrence.gamma2[n];
        let expect = Complex::with_val(bits, Float::with_val(bits, n) / nn as u32);
        assert!(absdiff(g, &expect) < 1e-55, "γ²_{n}");
        assert!(Float::with_val(64, data.recurrence.beta[n].abs_ref()) < 1e-55, "β_{n}");
    }
    let ln_z = finite_n::log_partition(&data.recurrence, nn);
    let exact = finite_n::gaussian_log_partition(nn, bits);
    assert!(absdiff(&ln_z, &Complex::with_val(bits, exact)) < 1e-50);
}

#[test]
fn two_precisions_agree() {
    let u = Float::with_val(200, 0.1);
    let lo = finite_n::compute_moments(&cfg(60), &u, 10, 21).unwrap();
    let hi = finite_n::compute_moments(&cfg(120), &u, 10, 21).unwrap();
    for (j, (a, b)) in lo.iter().zip(&hi).enumerate() {
        let scale = Float::with_val(64, b.abs_ref()).max(&Float::with_val(64, 1e-30));
        assert!(absdiff(a, b) / scale < 1e-55, "moment {j}");
    }
}

#[test]
fn routes_agree_and_polynomials_are_orthogonal() {
    let c = cfg(80);
    let u = Float::with_val(200, 0.1);
    let data = finite_n::solve(&c, &u, 12, 10).unwrap();
    let route = finite_n::hankel_route(&data.moments, 10).unwrap();
    let tol = Float::with_val(64, 1e-60);
    for n in 1..=10 {
        assert!(absdiff(&data.recurrence.gamma2[n], &route.gamma2[n]) < tol, "γ² route, n = {n}");
        assert!(absdiff(&route.gamma2[n], &route.gamma2_three_term[n]) < tol, "three-term, n = {n}");
        assert!(absdiff(&data.recurrence.beta[n], &route.beta[n]) < tol, "β route, n = {n}");
        let hd = Complex::with_val(data.working.bits(), &data.recurrence.h[n] * &route.det[n]);
        let rel = absdiff(&hd, &route.det[n + 1]) / Float::with_val(64, route.det[n + 1].abs_ref());
        assert!(rel < tol, "h_n D_(n−1) = D_n at n = {n}");
    }
    for (n, m, r) in finite_n::orthogonality_residuals(&c, &data, 6).unwrap() {
        assert!(r.value().clone() < 1e-65, "⟨P_{n}, P_{m}⟩ = {r}");
    }
}

#[test]
fn string_equations_hold_at_moderate_precision() {
    let c = cfg(60);
    let u = Float::with_val(200, 0.1);
    let data = finite_n::solve(&c, &u, 10, 16).unwrap();
    for r in finite_n::string_residuals(&data.recurrence, &data.u, 10, 5..=15) {
        assert!(r.first.value().clone() < 1e-45, "first, n = {}: {}", r.n, r.first);
        assert!(r.second.value().clone() < 1e-45, "second, n = {}: {}", r.n, r.second);
    }
}

#[test]
fn gaussian_expansion_is_exact() {
    let rep = finite_n::check_asymptotic_expansion(&cfg(60), &Float::new(64), &[6, 12]).unwrap();
    for row in &rep.rows {
        assert!(row.eps_gamma.value().clone() < 1e-50);
    }
}

#[test]
fn rejects_bad_input() {
    assert!(finite_n::solve(&cfg(40), &Float::with_val(64, -0.1), 4, 4).is_err());
    assert!(finite_n::solve(&cfg(40), &Float::with_val(64, 0.1), 0, 4).is_err());
    let bad = ContourConfig { angle_divisor: 7, ..cfg(40) };
    assert!(finite_n::compute_moments(&bad, &Float::with_val(64, 0.1), 4, 4).is_err());
}

#[test]
fn expansion_remainder_is_fourth_order() {
    let rep = finite_n::check_asymptotic_expansion(&cfg(80), &Float::with_val(256, 0.1), &[16, 32]).unwrap();
    let r = rep.gamma_ratios[0];
    assert!((1.0 / 32.0..=1.0 / 8.0).contains(&r), "ratio {r}");
    let last = rep.rows.last().unwrap();
    let gap = last.leading_gap.value().to_f64();
    let g2 = last.g2_over_n2.value().to_f64();
    assert!((gap / g2 - 1.0).abs() < 0.25, "{gap} vs {g2}");
}

#[test]
fn toda_residual_is_second_order_in_h() {
    let u = Float::with_val(256, 0.08);
    let c = cfg(80);
    let a = finite_n::toda_residual(&c, &u, 12, &Float::with_val(256, 1e-3)).unwrap();
    let b = finite_n::toda_residual(&c, &u, 12, &Float::with_val(256, 5e-4)).unwrap();
    let (ra, rb) = (a.residual.value().to_f64(), b.residual.value().to_f64());
    assert!(ra < 1e-4);
    assert!((3.5..4.5).contains(&(ra / rb)), "{ra} {rb}");
}

#[test]
fn alpha_dependence_is_exponentially_small_below_critical() {
    let alphas = [(1.0, 0.0), (0.3, 0.2)];
    let below = finite_n::alpha_sweep(&cfg(60), &Float::with_val(256, 0.05), 16, 8, &alphas).unwrap();
    assert!(below.max_deviation.value().clone() < 1e-30, "{}", below.max_deviation);
    let longer = finite_n::alpha_sweep(&cfg(60), &Float::with_val(256, 0.05), 32, 16, &alphas).unwrap();
    assert!(longer.max_deviation.value().clone() < 1e-60, "{}", longer.max_deviation);
    // beyond u_c the two contours give visibly different recurrences
    let above = finite_n::alpha_sweep(&cfg(60), &Float::with_val(256, 0.1), 16, 8, &alphas).unwrap();
    println!("u = 0.1, N = 16: |Δγ²_8| = {}", above.max_deviation);
}
