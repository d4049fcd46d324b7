use xebspoof::theory::{
    closed_form_h_power_moments, closed_form_xe_id, closed_form_xe_idp, mc_h_power_ratio, mc_xe_id, pd_bound,
    pd_coefficients, pd_exact_xe_expectation,
};
use xebspoof::Seed;

fn fact(n: u128) -> u128 {
    (1..=n).product()
}

fn choose(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn ratio(num: u128, den: u128) -> f64 {
    num as f64 / den as f64
}

#[test]
fn closed_forms_match_integer_arithmetic() {
    for n in 1..=8u128 {
        for m in [n, 2 * n + 1, 20, 64] {
            if m < n {
                continue;
            }
            let m2n = m.pow(2 * n as u32);
            let xe = closed_form_xe_id(n as usize, m as usize).unwrap();
            let want_exact = ratio(choose(m, n) * fact(n) * fact(n + 1), m2n);
            let want_approx = ratio(fact(n + 1), m.pow(n as u32));
            let idp = ratio(fact(n), m.pow(n as u32));
            assert!((xe.exact / want_exact - 1.0).abs() < 1e-12, "N={n} M={m}");
            assert!((xe.approx / want_approx - 1.0).abs() < 1e-12);
            assert!((closed_form_xe_idp(n as usize, m as usize).unwrap() / idp - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn h_power_moments_match_integer_arithmetic() {
    for n in 1..=8u128 {
        for s in 0..=3u128 {
            let r = closed_form_h_power_moments(n as usize, s as usize).unwrap();
            let ns = n.pow((s * n) as u32);
            let e_h = ratio((fact(n + s - 1) / fact(n - 1)).pow(n as u32), ns);
            let e_ph = ratio((fact(n + s) / fact(n)).pow(n as u32), ns);
            assert!((r.e_h / e_h - 1.0).abs() < 1e-12, "N={n} s={s}");
            assert!((r.e_ph / e_ph - 1.0).abs() < 1e-12);
            assert!((r.e_ph / r.e_h / r.ratio - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn pd_expectation_interpolates_between_limits() {
    for n in 1..=8usize {
        let m = 40;
        let ideal = closed_form_xe_id(n, m).unwrap().exact;
        let at_one = pd_exact_xe_expectation(1.0, n, m).unwrap();
        assert!((at_one / ideal - 1.0).abs() < 1e-12);
        let coeffs = pd_coefficients(n);
        let want: f64 = coeffs.iter().sum();
        assert_eq!(want, (fact(n as u128) * fact(n as u128 + 1)) as f64);
        for rho in (0..10).map(|i| i as f64 / 10.0) {
            let ratio = pd_exact_xe_expectation(rho, n, m).unwrap() / closed_form_xe_idp(n, m).unwrap();
            assert!(ratio <= pd_bound(rho, n).unwrap(), "N={n} rho={rho}");
        }
    }
}

#[test]
fn monte_carlo_ideal_xe_within_four_sigma() {
    // The closed form is the Gaussian limit; its relative bias is of order
    // N^2/M, so M is chosen large enough that it stays well under 4σ.
    for (n, m, trials) in [(1, 400, 300), (2, 2000, 100), (3, 1200, 100)] {
        for seed in 0..5 {
            let r = mc_xe_id(n, m, trials, &Seed::new(seed).child(n as u64)).unwrap();
            assert!(r.z_score().abs() < 4.0, "N={n} seed={seed}: z={}", r.z_score());
        }
    }
}

#[test]
fn h_power_ratio_grows_with_s() {
    let seed = Seed::new(3);
    let r: Vec<_> = (0..=2)
        .map(|s| mc_h_power_ratio(4, s, 200_000, &seed.child(s as u64)).unwrap())
        .collect();
    // s = 0 estimates E[p~] = 1.
    assert!((r[0].estimate - 1.0).abs() < 4.0 * r[0].std_error);
    for w in r.windows(2) {
        assert!(w[1].estimate - w[0].estimate > -2.0 * (w[0].std_error + w[1].std_error));
        assert!(w[1].estimate > w[0].estimate);
    }
}
