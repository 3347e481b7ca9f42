//! Random instances for the acceptance suite.

use qprospect_core::events::{DensityOperator, Observable};
use qprospect_core::{ComplexMatrix, ComplexVector, C64};
use rand::rngs::StdRng;
use rand::Rng;

/// Standard normal by Box-Muller.
fn normal(rng: &mut StdRng) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn complex(rng: &mut StdRng) -> C64 {
    C64::new(normal(rng), normal(rng))
}

pub fn unit_vector(rng: &mut StdRng, dim: usize) -> ComplexVector {
    let v = ComplexVector::new((0..dim).map(|_| complex(rng)).collect()).expect("finite");
    v.normalized().expect("nonzero")
}

/// Haar-distributed unitary: Gram-Schmidt on a Gaussian matrix.
pub fn unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| complex(rng)).collect();
        // Two passes keep the columns orthonormal to rounding.
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

pub fn observable(rng: &mut StdRng, label: &str, dim: usize) -> Observable {
    let eigenvalues = (0..dim).map(|k| k as f64 + 0.9 * rng.random::<f64>()).collect();
    Observable::new(label, eigenvalues, unitary(rng, dim)).expect("valid observable")
}

/// Mixed state `G G† / Tr` with a Gaussian `G`.
pub fn density(rng: &mut StdRng, dim: usize) -> DensityOperator {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex(rng));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let m = m.scale_real(1.0 / tr);
    DensityOperator::new((&m + &m.adjoint()).scale_real(0.5)).expect("valid state")
}
