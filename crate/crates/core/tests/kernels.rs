use num_complex::Complex64;
use proptest::prelude::*;
use xebspoof::kernels::{
    determinant, gaussian_matrix, haar_isometry, haar_unitary, hafnian, permanent, unitarity_error, ComplexMatrix,
};
use xebspoof::Seed;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn sign(p: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

fn leibniz(a: &ComplexMatrix, signed: bool) -> Complex64 {
    let n = a.rows();
    permutations(n)
        .iter()
        .map(|p| {
            let term: Complex64 = (0..n).map(|i| a[(i, p[i])]).product();
            if signed {
                term * sign(p)
            } else {
                term
            }
        })
        .sum()
}

fn matching_sum(b: &ComplexMatrix, free: &[usize]) -> Complex64 {
    let Some((&first, rest)) = free.split_first() else {
        return Complex64::new(1.0, 0.0);
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &j) in rest.iter().enumerate() {
        let remaining: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, &v)| v)
            .collect();
        acc += b[(first, j)] * matching_sum(b, &remaining);
    }
    acc
}

fn symmetric(n: usize, seed: &Seed) -> ComplexMatrix {
    let g = gaussian_matrix(n, seed).unwrap();
    ComplexMatrix::from_fn(n, n, |i, j| if i <= j { g[(i, j)] } else { g[(j, i)] })
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * b.norm().max(1e-300)
}

#[test]
fn permanent_and_determinant_match_leibniz() {
    for n in 1..=7 {
        for t in 0..20 {
            let a = gaussian_matrix(n, &Seed::new(t).child(n as u64)).unwrap();
            assert!(
                close(permanent(&a).unwrap(), leibniz(&a, false), 1e-10),
                "per n={n} t={t}"
            );
            assert!(
                close(determinant(&a).unwrap(), leibniz(&a, true), 1e-10),
                "det n={n} t={t}"
            );
        }
    }
}

#[test]
fn hafnian_matches_matching_expansion() {
    for n in (2..=10).step_by(2) {
        for t in 0..10 {
            let b = symmetric(n, &Seed::new(t).child(100 + n as u64));
            let all: Vec<usize> = (0..n).collect();
            assert!(close(hafnian(&b).unwrap(), matching_sum(&b, &all), 1e-9), "n={n} t={t}");
        }
    }
}

#[test]
fn hafnian_of_bipartite_block_is_permanent() {
    let a = gaussian_matrix(4, &Seed::new(9)).unwrap();
    let zero = Complex64::new(0.0, 0.0);
    let b = ComplexMatrix::from_fn(8, 8, |i, j| match (i < 4, j < 4) {
        (true, false) => a[(i, j - 4)],
        (false, true) => a[(j, i - 4)],
        _ => zero,
    });
    assert!(close(hafnian(&b).unwrap(), permanent(&a).unwrap(), 1e-10));
}

#[test]
fn empty_matrix_conventions() {
    let empty = ComplexMatrix::zeros(0, 0);
    assert_eq!(permanent(&empty).unwrap(), Complex64::new(1.0, 0.0));
    assert_eq!(determinant(&empty).unwrap(), Complex64::new(1.0, 0.0));
    assert_eq!(hafnian(&empty).unwrap(), Complex64::new(1.0, 0.0));
}

fn shuffled(n: usize, key: u64) -> Vec<usize> {
    let perms = permutations(n);
    perms[(key as usize) % perms.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permanent_invariant_under_row_and_column_permutation(n in 1usize..=6, seed in any::<u64>(), pk in any::<u64>(), qk in any::<u64>()) {
        let a = gaussian_matrix(n, &Seed::new(seed)).unwrap();
        let p = shuffled(n, pk);
        let q = shuffled(n, qk);
        let paq = a.select(&p, &q).unwrap();
        prop_assert!(close(permanent(&paq).unwrap(), permanent(&a).unwrap(), 1e-10));
    }

    #[test]
    fn hafnian_invariant_under_symmetric_permutation(half in 1usize..=4, seed in any::<u64>(), pk in any::<u64>()) {
        let n = 2 * half;
        let b = symmetric(n, &Seed::new(seed));
        let p = shuffled(n, pk);
        let pbp = b.select(&p, &p).unwrap();
        prop_assert!(close(hafnian(&pbp).unwrap(), hafnian(&b).unwrap(), 1e-9));
    }

    #[test]
    fn haar_output_is_unitary_and_prefix_consistent(m in 1usize..=12, seed in any::<u64>()) {
        let s = Seed::new(seed);
        let u = haar_unitary(m, &s).unwrap();
        prop_assert!(unitarity_error(u.matrix()) < 1e-10);
        let n = m.div_ceil(2);
        let iso = haar_isometry(n, m, &s).unwrap();
        prop_assert_eq!(iso, u.matrix().top_rows(n).unwrap());
    }

    #[test]
    fn seeded_draws_are_bitwise_deterministic(m in 1usize..=8, seed in any::<u64>(), branch in any::<u64>()) {
        let s = Seed::new(seed).child(branch);
        prop_assert_eq!(haar_unitary(m, &s).unwrap(), haar_unitary(m, &s.clone()).unwrap());
        prop_assert_eq!(gaussian_matrix(m, &s).unwrap(), gaussian_matrix(m, &s).unwrap());
    }
}
