use xebspoof::kernels::haar_unitary;
use xebspoof::metrics::{exact_xe, XeVariant};
use xebspoof::models::{FockModel, Model, Sector, SectorDistribution};
use xebspoof::noise::{lossy_probability, partially_distinguishable_probability, NoiseSpec};
use xebspoof::theory::{closed_form_xe_idp, mc_xe_pd, pd_bound};
use xebspoof::Seed;

fn fock(m: usize, n: usize, seed: u64) -> FockModel {
    FockModel::new(&haar_unitary(m, &Seed::new(seed)).unwrap(), n).unwrap()
}

#[test]
fn partially_distinguishable_sectors_normalize() {
    for (m, n) in [(4, 2), (6, 3), (8, 3)] {
        let model = fock(m, n, m as u64);
        for x in [0.0, 0.3, 0.7, 1.0] {
            let total: f64 = Sector::bosonic(m, n)
                .enumerate()
                .unwrap()
                .map(|o| partially_distinguishable_probability(&model, &o, x).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-6, "M={m} N={n} x={x}: {total}");
        }
    }
}

#[test]
fn probability_is_polynomial_in_distinguishability() {
    let model = fock(6, 3, 9);
    let o = Sector::bosonic(6, 3).enumerate().unwrap().nth(17).unwrap();
    let f = |x: f64| partially_distinguishable_probability(&model, &o, x).unwrap();
    let nodes = [0.0, 0.25, 0.5, 0.75, 1.0];
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    // Derivative of the Lagrange interpolant through the five nodes.
    let slope_at = |t: f64| -> f64 {
        let mut d = 0.0;
        for (i, &xi) in nodes.iter().enumerate() {
            let mut term = 0.0;
            for (k, &xk) in nodes.iter().enumerate() {
                if k == i {
                    continue;
                }
                let mut prod = 1.0 / (xi - xk);
                for (j, &xj) in nodes.iter().enumerate() {
                    if j != i && j != k {
                        prod *= (t - xj) / (xi - xj);
                    }
                }
                term += prod;
            }
            d += values[i] * term;
        }
        d
    };
    for t in [0.2, 0.4, 0.6, 0.9] {
        let h = 1e-4;
        let fd = (f(t + h) - f(t - h)) / (2.0 * h);
        assert!((fd - slope_at(t)).abs() < 1e-6, "t={t}: {fd} vs {}", slope_at(t));
    }
}

#[test]
fn loss_scales_linear_xe() {
    let model = fock(8, 3, 10);
    let sector = Sector::bosonic(8, 3);
    let p = SectorDistribution::from_model(&Model::Fock(model.clone()), sector).unwrap();
    let ideal = exact_xe(&p, &p, XeVariant::Linear).unwrap();
    for eta in [0.2, 0.5, 0.9] {
        let lossy: f64 = p
            .iter()
            .map(|(x, w)| lossy_probability(&model, x, eta).unwrap() * w)
            .sum();
        assert!((lossy - eta.powi(3) * ideal).abs() <= 1e-15 * ideal);
        let spec = NoiseSpec::new(eta, 1.0).unwrap();
        assert_eq!(
            spec.probability(&model, &p.outcomes()[5]).unwrap(),
            lossy_probability(&model, &p.outcomes()[5], eta).unwrap()
        );
    }
}

#[test]
fn sampled_partial_distinguishability_respects_bound() {
    for n in [3, 4] {
        let m = 50 * n;
        for rho in [0.0, 0.5, 0.9] {
            let r = mc_xe_pd(rho, n, m, 500, &Seed::new(11).child(n as u64)).unwrap();
            let ratio = r.estimate / closed_form_xe_idp(n, m).unwrap();
            assert!(ratio <= pd_bound(rho, n).unwrap(), "N={n} rho={rho}: {ratio}");
        }
    }
}
