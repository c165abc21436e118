//! Canonical storage of symmetric tensors: one slot per sorted multi-index.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Species index inside a multi-index tuple.
pub type Idx = u8;

/// Enumeration of the sorted multi-indices `x_1 <= ... <= x_n` over `S`
/// species, ranked in colexicographic order of `y_i = x_i + i`.
#[derive(Debug)]
pub struct Layout {
    species: usize,
    order: usize,
    binom: Vec<Vec<usize>>,
    tuples: Vec<Idx>,
}

impl Layout {
    fn build(species: usize, order: usize) -> Layout {
        let top = species + order;
        let mut binom = vec![vec![0usize; order + 2]; top + 1];
        for n in 0..=top {
            binom[n][0] = 1;
            for k in 1..=(order + 1).min(n) {
                binom[n][k] = binom[n - 1][k - 1] + if k < n { binom[n - 1][k] } else { 0 };
            }
        }
        let count = if order == 0 { 1 } else { binom[species + order - 1][order] };
        let mut layout = Layout { species, order, binom, tuples: vec![0; count * order] };
        if order > 0 {
            let mut buf = Vec::with_capacity(order);
            layout.fill(0, &mut buf);
        }
        layout
    }

    fn fill(&mut self, start: usize, buf: &mut Vec<Idx>) {
        if buf.len() == self.order {
            let r = self.rank(buf);
            self.tuples[r * self.order..(r + 1) * self.order].copy_from_slice(buf);
            return;
        }
        for x in start..self.species {
            buf.push(x as Idx);
            self.fill(x, buf);
            buf.pop();
        }
    }

    pub fn species(&self) -> usize {
        self.species
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of canonical multi-indices, `C(S+n-1, n)`.
    pub fn len(&self) -> usize {
        self.tuples.len().checked_div(self.order).unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rank of a sorted tuple.
    #[inline]
    pub fn rank(&self, sorted: &[Idx]) -> usize {
        debug_assert_eq!(sorted.len(), self.order);
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        sorted.iter().enumerate().map(|(i, &x)| self.binom[x as usize + i][i + 1]).sum()
    }

    #[inline]
    pub fn tuple(&self, rank: usize) -> &[Idx] {
        &self.tuples[rank * self.order..(rank + 1) * self.order]
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[Idx]> {
        (0..self.len()).map(move |r| self.tuple(r))
    }
}

type LayoutCache = Mutex<HashMap<(usize, usize), Arc<Layout>>>;

/// Shared layout for `(species, order)`.
pub fn layout(species: usize, order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<LayoutCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("layout cache poisoned");
    guard.entry((species, order)).or_insert_with(|| Arc::new(Layout::build(species, order))).clone()
}

/// Copies the entries of `x` at the positions set in `mask` into `out`;
/// returns how many were copied. The result stays sorted when `x` is.
#[inline]
pub fn gather(x: &[Idx], mask: u32, out: &mut [Idx]) -> usize {
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out[k] = x[i];
        k += 1;
        m &= m - 1;
    }
    k
}

/// `n! / prod_x mult(x)!` for a sorted tuple: the number of ordered tuples
/// represented by one canonical slot.
pub fn orbit_size(sorted: &[Idx]) -> u64 {
    let mut denom = 1u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
            denom *= run;
        } else {
            run = 1;
        }
    }
    crate::scalar::factorial(sorted.len()) / denom
}

/// `prod_x mult(x)!` for a sorted tuple.
pub fn multiplicity_factorial(sorted: &[Idx]) -> u64 {
    crate::scalar::factorial(sorted.len()) / orbit_size(sorted)
}
