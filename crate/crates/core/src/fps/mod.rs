//! Truncated formal power series over a finite species space.
//!
//! A series is a list of symmetric coefficient tensors `K_0, ..., K_N`; its
//! value at a measure `nu` is `sum_n (1/n!) sum_{x in X^n} K_n(x) prod nu(x_i) w(x_i)`.

mod layout;
mod series;
pub mod templates;

pub use layout::{layout, multiplicity_factorial, orbit_size, Idx, Layout};
pub use series::{compose_measure_order, exp_order, FormalSeries, Limits, RootedFamily, SymTensor, MAX_ORDER_ENV};
