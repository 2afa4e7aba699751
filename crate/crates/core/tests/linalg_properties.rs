mod common;

use common::*;
use leadcons_core::digraph::example;
use leadcons_core::linalg::{self, kron, unvec, vec_of};
use leadcons_core::Matrix;
use proptest::prelude::*;
use rand::Rng;

/// Characteristic polynomial coefficients `c[0] λ^n + c[1] λ^{n-1} + ...`
/// by Faddeev-LeVerrier, independent of any eigen-decomposition.
fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut c = vec![1.0];
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let am = &(a * &m) + &Matrix::identity(n).scale(*c.last().unwrap());
        m = am;
        let ck = -(a * &m).trace() / k as f64;
        c.push(ck);
    }
    c
}

fn poly_eval(c: &[f64], re: f64, im: f64) -> (f64, f64) {
    c.iter().fold((0.0, 0.0), |(pr, pi), &ck| {
        (pr * re - pi * im + ck, pr * im + pi * re)
    })
}

/// Durand-Kerner roots of a monic polynomial.
fn roots(c: &[f64]) -> Vec<(f64, f64)> {
    let n = c.len() - 1;
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let ang = 0.4 + k as f64 * std::f64::consts::TAU / n as f64;
            (3.0 * ang.cos(), 3.0 * ang.sin())
        })
        .collect();
    for _ in 0..2000 {
        for i in 0..n {
            let (pr, pi) = poly_eval(c, z[i].0, z[i].1);
            let (mut dr, mut di) = (1.0, 0.0);
            for j in 0..n {
                if j != i {
                    let (ar, ai) = (z[i].0 - z[j].0, z[i].1 - z[j].1);
                    (dr, di) = (dr * ar - di * ai, dr * ai + di * ar);
                }
            }
            let den = dr * dr + di * di;
            z[i].0 -= (pr * dr + pi * di) / den;
            z[i].1 -= (pi * dr - pr * di) / den;
        }
    }
    z
}

#[test]
fn l1_characteristic_polynomial_oracle() {
    let l1 = example::g1().laplacian();
    let c = char_poly(&l1);
    // λ²(λ-2)² = λ⁴ - 4λ³ + 4λ²
    let want = [1.0, -4.0, 4.0, 0.0, 0.0];
    for (a, b) in c.iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{c:?}");
    }
    let mut oracle: Vec<f64> = roots(&c).into_iter().map(|z| z.0).collect();
    oracle.sort_by(f64::total_cmp);
    let computed = linalg::eigenvalues(&l1).unwrap().sorted();
    for (e, r) in computed.iter().zip(&oracle) {
        assert!((e.re - r).abs() < 1e-5, "{computed:?} vs {oracle:?}");
        assert!(e.im.abs() < 1e-6);
    }
}

#[test]
fn random_eigenvalues_are_characteristic_roots() {
    let mut rng = rng(21);
    for _ in 0..40 {
        let n = rng.gen_range(2..=7);
        let a = random_matrix(&mut rng, n, n);
        let c = char_poly(&a);
        let spec = linalg::eigenvalues(&a).unwrap();
        assert_eq!(spec.len(), n);
        for e in &spec.values {
            let (pr, pi) = poly_eval(&c, e.re, e.im);
            assert!(pr.hypot(pi) < 1e-8, "{e:?} residual {}", pr.hypot(pi));
        }
        // complex eigenvalues come in conjugate pairs
        let sorted = spec.sorted();
        let im_sum: f64 = sorted.iter().map(|e| e.im).sum();
        assert!(im_sum.abs() < 1e-9);
    }
}

#[test]
fn solve_residual_random_8x8() {
    let mut rng = rng(8);
    for _ in 0..20 {
        // diagonally shifted for good conditioning
        let a = &random_matrix(&mut rng, 8, 8) + &Matrix::identity(8).scale(4.0);
        let b: Vec<f64> = (0..8).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let x = linalg::solve_linear(&a, &b).unwrap();
        let ax = a.mul_vec(&x);
        let res = ax
            .iter()
            .zip(&b)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        let bnorm = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(res <= 1e-9 * (1.0 + bnorm));
    }
}

fn power_iteration_norm(a: &Matrix) -> f64 {
    let ata = &a.transpose() * a;
    let mut v = vec![1.0; a.cols()];
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let w = ata.mul_vec(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        lambda = norm;
        v = w.into_iter().map(|x| x / norm).collect();
    }
    lambda.sqrt()
}

#[test]
fn spectral_norm_matches_power_iteration() {
    let mut rng = rng(6);
    for _ in 0..10 {
        let a = random_matrix(&mut rng, 6, 6);
        let s = linalg::spectral_norm(&a);
        assert!((s - power_iteration_norm(&a)).abs() < 1e-6);
    }
}

#[test]
fn kron_vectorization_identity() {
    let mut rng = rng(3);
    for _ in 0..20 {
        let a = random_matrix(&mut rng, 3, 3);
        let x = random_matrix(&mut rng, 3, 3);
        let b = random_matrix(&mut rng, 3, 3);
        let direct = vec_of(&(&(&a * &x) * &b));
        let via = kron(&b.transpose(), &a).mul_vec(&vec_of(&x));
        for (p, q) in direct.iter().zip(&via) {
            assert!((p - q).abs() < 1e-12);
        }
        assert_eq!(unvec(&vec_of(&x), 3, 3), x);
    }
}

#[test]
fn lyapunov_random_diagonally_dominant() {
    let mut rng = rng(13);
    for _ in 0..30 {
        let n = rng.gen_range(1..=6);
        let mut h = random_matrix(&mut rng, n, n);
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| h[(i, j)].abs()).sum();
            h[(i, i)] = off + rng.gen_range(0.1..2.0);
        }
        let p = linalg::solve_lyapunov(&h).unwrap();
        assert!(p.is_symmetric(0.0));
        let res = (&(&(&p * &h) + &(&h.transpose() * &p)) - &Matrix::identity(n)).norm_inf();
        assert!(res <= 1e-8, "residual {res}");
        assert!(linalg::is_positive_definite(&p).unwrap());
    }
}

fn random_symmetric(seed: u64, n: usize) -> Matrix {
    let a = random_matrix(&mut rng(seed), n, n);
    a.symmetrized()
}

proptest! {
    #[test]
    fn general_and_symmetric_solvers_agree(seed in any::<u64>(), n in 1usize..7) {
        let a = random_symmetric(seed, n);
        let general = linalg::eigenvalues(&a).unwrap().sorted();
        let sym = linalg::symmetric_eigenvalues(&a).unwrap();
        prop_assert_eq!(general.len(), n);
        for (g, s) in general.iter().zip(&sym) {
            prop_assert!((g.re - s).abs() < 1e-7);
            prop_assert!(g.im.abs() < 1e-7);
        }
        let scale = a.max_abs().max(1.0);
        prop_assert!((sym.iter().sum::<f64>() - a.trace()).abs() <= 1e-8 * scale);
    }

    #[test]
    fn eigenvalue_sum_is_trace(seed in any::<u64>(), n in 1usize..9) {
        let a = random_matrix(&mut rng(seed), n, n);
        let spec = linalg::eigenvalues(&a).unwrap();
        prop_assert_eq!(spec.len(), n);
        prop_assert!((spec.real_sum() - a.trace()).abs() <= 1e-8 * a.max_abs().max(1.0) * n as f64);
    }

    #[test]
    fn spectral_norm_transpose_invariant(seed in any::<u64>(), r in 1usize..6, c in 1usize..6) {
        let a = random_matrix(&mut rng(seed), r, c);
        prop_assert!((linalg::spectral_norm(&a) - linalg::spectral_norm(&a.transpose())).abs() <= 1e-9);
    }
}
