#![allow(dead_code)]

use qprospect_core::events::{DensityOperator, Observable};
use qprospect_core::{ComplexMatrix, ComplexVector, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussian_like(rng: &mut StdRng) -> f64 {
    // Sum of uniforms is plenty for generating test matrices.
    (0..6).map(|_| rng.random::<f64>()).sum::<f64>() - 3.0
}

pub fn random_complex(rng: &mut StdRng) -> C64 {
    C64::new(gaussian_like(rng), gaussian_like(rng))
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn random_hermitian(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let a = random_matrix(rng, dim, dim);
    (&a + &a.adjoint()).scale_real(0.5)
}

pub fn random_unit_vector(rng: &mut StdRng, dim: usize) -> ComplexVector {
    let v = ComplexVector::new((0..dim).map(|_| random_complex(rng)).collect()).unwrap();
    v.normalized().unwrap()
}

/// Modified Gram-Schmidt on the columns of a random matrix.
pub fn random_unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let a = random_matrix(rng, dim, dim);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<C64> = (0..dim).map(|i| a[(i, j)]).collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

pub fn random_density(rng: &mut StdRng, dim: usize) -> DensityOperator {
    let a = random_matrix(rng, dim, dim);
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    let m = m.scale_real(1.0 / tr);
    let m = (&m + &m.adjoint()).scale_real(0.5);
    DensityOperator::new(m).unwrap()
}

pub fn random_observable(rng: &mut StdRng, label: &str, dim: usize) -> Observable {
    let eigenvalues = (0..dim).map(|k| k as f64 + 0.5 * rng.random::<f64>()).collect();
    Observable::new(label, eigenvalues, random_unitary(rng, dim)).unwrap()
}

/// `exp(−iHt)` by Taylor series with scaling and squaring.
pub fn expm_taylor(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let dim = h.rows();
    let a = h.scale(C64::new(0.0, -t));
    let norm = a.as_slice().iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm.log2().ceil().max(0.0) as i32) + 4;
    let a = a.scale_real(0.5f64.powi(squarings));
    let mut result = ComplexMatrix::identity(dim);
    let mut term = ComplexMatrix::identity(dim);
    for k in 1..=30 {
        term = (&term * &a).scale_real(1.0 / k as f64);
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Largest singular value by power iteration on `M†M`.
pub fn power_norm(m: &ComplexMatrix, rng: &mut StdRng) -> f64 {
    let mtm = &m.adjoint() * m;
    let mut v = random_unit_vector(rng, m.cols());
    let mut estimate = 0.0;
    for _ in 0..5000 {
        let w = mtm.mul_vector(&v).unwrap();
        let n = w.norm();
        if n == 0.0 {
            return 0.0;
        }
        let next = n.sqrt();
        v = w.scaled(C64::new(1.0 / n, 0.0));
        if (next - estimate).abs() < 1e-15 * next.max(1.0) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Classical RK4 for `i ċ = H(t) c` with a piecewise-constant `H`.
pub fn rk4(h_at: &dyn Fn(f64) -> ComplexMatrix, c0: &ComplexVector, t0: f64, t1: f64, steps: usize) -> ComplexVector {
    let dt = (t1 - t0) / steps as f64;
    let minus_i = C64::new(0.0, -1.0);
    let deriv = |t: f64, c: &[C64]| -> Vec<C64> {
        let v = ComplexVector::new(c.to_vec()).unwrap();
        h_at(t).mul_vector(&v).unwrap().as_slice().iter().map(|z| minus_i * z).collect()
    };
    let axpy = |c: &[C64], k: &[C64], s: f64| -> Vec<C64> { c.iter().zip(k).map(|(a, b)| a + b * s).collect() };
    let mut c = c0.as_slice().to_vec();
    for i in 0..steps {
        // Sample H at the step midpoint so a step never straddles a switch.
        let t = t0 + (i as f64 + 0.5) * dt;
        let k1 = deriv(t, &c);
        let k2 = deriv(t, &axpy(&c, &k1, dt / 2.0));
        let k3 = deriv(t, &axpy(&c, &k2, dt / 2.0));
        let k4 = deriv(t, &axpy(&c, &k3, dt));
        c = c
            .iter()
            .enumerate()
            .map(|(j, z)| z + (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (dt / 6.0))
            .collect();
    }
    ComplexVector::new(c).unwrap()
}
