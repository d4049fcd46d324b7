use num_complex::Complex64;
use proptest::prelude::*;
use xebspoof::kernels::{gaussian_matrix, haar_isometry, haar_unitary, ComplexMatrix, Interferometer};
use xebspoof::models::{
    first_order_marginals, squeezed_vacuum_distribution, total_photon_distribution, FermionModel, FockModel,
    GaussianModel, Model, Outcome, Sector, SectorDistribution,
};
use xebspoof::Seed;

fn fock(m: usize, n: usize, seed: u64) -> Model {
    Model::Fock(FockModel::new(&haar_unitary(m, &Seed::new(seed)).unwrap(), n).unwrap())
}

fn fermion(m: usize, n: usize, seed: u64) -> Model {
    Model::Fermion(FermionModel::new(&haar_unitary(m, &Seed::new(seed)).unwrap(), n).unwrap())
}

fn gaussian(m: usize, mean: f64, seed: u64) -> GaussianModel {
    GaussianModel::uniform_mean_photons(haar_unitary(m, &Seed::new(seed)).unwrap(), mean).unwrap()
}

#[test]
fn fixed_particle_sectors_normalize() {
    for (model, sector) in [
        (fock(8, 3, 1), Sector::bosonic(8, 3)),
        (fermion(12, 4, 2), Sector::fermionic(12, 4)),
    ] {
        let total = SectorDistribution::from_model(&model, sector).unwrap().total();
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }
}

#[test]
fn gaussian_sectors_match_total_photon_distribution() {
    let g = gaussian(4, 1.5, 3);
    let pr = total_photon_distribution(g.squeezing(), 8);
    let model = Model::Gaussian(g);
    for (n, want) in pr.iter().enumerate() {
        let total = SectorDistribution::from_model(&model, Sector::bosonic(4, n))
            .unwrap()
            .total();
        assert!((total - want).abs() < 1e-6, "N={n}: {total} vs {want}");
    }
}

#[test]
fn two_photon_amplitudes_by_hand() {
    let u = haar_unitary(5, &Seed::new(4)).unwrap();
    let a = u.matrix();
    let model = FockModel::new(&u, 2).unwrap();
    let bunched = a[(0, 3)] * a[(1, 3)];
    let p33 = Outcome::new(vec![0, 0, 0, 2, 0]);
    assert!((model.probability(&p33).unwrap() - 2.0 * bunched.norm_sqr()).abs() < 1e-14);
    let split = a[(0, 1)] * a[(1, 4)] + a[(0, 4)] * a[(1, 1)];
    let p14 = Outcome::new(vec![0, 1, 0, 0, 1]);
    assert!((model.probability(&p14).unwrap() - split.norm_sqr()).abs() < 1e-14);
}

#[test]
fn balanced_beam_splitter_has_no_coincidences() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bs = ComplexMatrix::from_rows(&[
        vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
    ])
    .unwrap();
    let u = Interferometer::new(bs).unwrap();
    let fbs = FockModel::new(&u, 2).unwrap();
    assert!(fbs.probability(&Outcome::new(vec![1, 1])).unwrap() < 1e-15);
    assert!((fbs.probability(&Outcome::new(vec![2, 0])).unwrap() - 0.5).abs() < 1e-15);
    let fs = FermionModel::new(&u, 2).unwrap();
    assert!((fs.probability(&Outcome::new(vec![1, 1])).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn unmixed_squeezers_give_products_of_single_mode_distributions() {
    let r = [0.3, 0.7, 0.5];
    let model = Model::Gaussian(GaussianModel::new(Interferometer::identity(3), r.to_vec()).unwrap());
    // (2k)! / (2^k k!)^2 tanh^{2k} / cosh, written out.
    let single = |r: f64, n: usize| -> f64 {
        if n % 2 == 1 {
            return 0.0;
        }
        let k = n / 2;
        let mut c = 1.0;
        for i in 0..k {
            c *= (2 * i + 1) as f64 / (2 * i + 2) as f64;
        }
        c * r.tanh().powi(n as i32) / r.cosh()
    };
    for x in [[0, 0, 0], [2, 0, 0], [2, 2, 0], [0, 4, 2], [1, 1, 0], [2, 0, 1]] {
        let want: f64 = x.iter().zip(r).map(|(&n, r)| single(r, n)).product();
        let got = model
            .probability(&Outcome::new(x.iter().map(|&v| v as u8).collect()))
            .unwrap();
        assert!((got - want).abs() < 1e-14, "{x:?}: {got} vs {want}");
    }
    let sv = squeezed_vacuum_distribution(0.7, 6);
    for (n, p) in sv.iter().enumerate() {
        assert!((p - single(0.7, n)).abs() < 1e-14);
    }
}

#[test]
fn fs_marginals_match_enumeration() {
    for (m, n, seed) in [(6, 2, 5), (10, 3, 6), (12, 4, 7)] {
        let model = fermion(m, n, seed);
        let dist = SectorDistribution::from_model(&model, Sector::fermionic(m, n)).unwrap();
        let table = first_order_marginals(&model, 1).unwrap();
        for (i, row) in table.iter().enumerate() {
            let occupied: f64 = dist
                .iter()
                .filter(|(x, _)| x.occupations()[i] == 1)
                .map(|(_, p)| p)
                .sum();
            assert!((occupied - row[1]).abs() < 1e-10);
        }
    }
}

#[test]
fn gbs_marginals_match_enumeration() {
    let g = gaussian(3, 0.3, 8);
    let model = Model::Gaussian(g);
    let cap = 4;
    let table = first_order_marginals(&model, cap).unwrap();
    // Mass beyond 16 photons in total is far below the tolerance.
    let mut brute = vec![vec![0.0; cap + 1]; 3];
    for total in 0..=16 {
        let dist = SectorDistribution::from_model(&model, Sector::bosonic(3, total)).unwrap();
        for (x, p) in dist.iter() {
            for (i, &k) in x.occupations().iter().enumerate() {
                if usize::from(k) <= cap {
                    brute[i][usize::from(k)] += p;
                }
            }
        }
    }
    for i in 0..3 {
        for k in 0..=cap {
            assert!(
                (brute[i][k] - table[i][k]).abs() < 1e-7,
                "mode {i} k={k}: {} vs {}",
                brute[i][k],
                table[i][k]
            );
        }
    }
}

fn perm_from(n: usize, key: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut k = key;
    for i in (1..n).rev() {
        p.swap(i, (k % (i as u64 + 1)) as usize);
        k /= i as u64 + 1;
        k ^= key.rotate_left(17);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fock_permutation_covariance(seed in any::<u64>(), key in any::<u64>(), occ in proptest::collection::vec(0u8..=2, 5)) {
        let n = occ.iter().map(|&v| usize::from(v)).sum::<usize>();
        prop_assume!((1..=5).contains(&n));
        let u = haar_unitary(5, &Seed::new(seed)).unwrap();
        let perm = perm_from(5, key);
        let x = Outcome::new(occ);
        let p = FockModel::new(&u, n).unwrap().probability(&x).unwrap();
        let up = u.permute_columns(&perm).unwrap();
        let q = FockModel::new(&up, n).unwrap().probability(&x.permuted(&perm)).unwrap();
        prop_assert!((p - q).abs() <= 1e-12 * p.max(1e-300));
    }

    #[test]
    fn fermion_probability_ignores_row_mixing(seed in any::<u64>(), mix in any::<u64>(), picks in proptest::sample::subsequence((0..7usize).collect::<Vec<_>>(), 3)) {
        let rows = haar_isometry(3, 7, &Seed::new(seed)).unwrap();
        let v = haar_unitary(3, &Seed::new(mix)).unwrap();
        let mixed = v.matrix().matmul(&rows).unwrap();
        let x = Outcome::from_modes(7, &picks).unwrap();
        let a = FermionModel::from_rows(rows).unwrap().probability(&x).unwrap();
        let b = FermionModel::from_rows(mixed).unwrap().probability(&x).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sector_enumeration_matches_cardinality(m in 1usize..=6, n in 0usize..=4, fermionic in any::<bool>()) {
        let sector = if fermionic { Sector::fermionic(m, n) } else { Sector::bosonic(m, n) };
        let all: Vec<Outcome> = sector.enumerate().unwrap().collect();
        prop_assert_eq!(all.len() as u128, sector.cardinality().unwrap());
        for (i, x) in all.iter().enumerate() {
            prop_assert!(sector.contains(x));
            prop_assert_eq!(sector.rank(x).unwrap(), i as u128);
        }
        prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn gaussian_matrix_has_unit_variance_entries() {
    let z = gaussian_matrix(200, &Seed::new(11)).unwrap();
    let mean_sq: f64 = z.as_slice().iter().map(|c| c.norm_sqr()).sum::<f64>() / 40_000.0;
    assert!((mean_sq - 1.0).abs() < 0.03, "{mean_sq}");
}
