//! Inputs shared by the benchmarks.

use virialkit::{FMatrix, Rational, Scalar};

/// Deterministic symmetric Mayer matrix mixing hard cores, attraction and repulsion.
pub fn sample_f(species: usize) -> FMatrix<Rational> {
    let rows = (0..species)
        .map(|i| {
            (0..species)
                .map(|j| match (i + j) % 4 {
                    0 => Rational::from_int(-1),
                    1 => Rational::from_ratio(-1, 4),
                    2 => Rational::from_ratio(3, 4),
                    _ => Rational::from_int(0),
                })
                .collect()
        })
        .collect();
    FMatrix::from_rows(rows).expect("square by construction")
}

pub fn sample_f64(species: usize) -> FMatrix<f64> {
    sample_f(species).map(|v| v.real_f64())
}
