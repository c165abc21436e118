//! Weight-independent index templates, memoized per order `n`.
//!
//! Every contraction in the algebra is a sum over one of three families of
//! combinatorial objects on `{0..n-1}`: subsets, set partitions, and
//! "rooted compositions" (a non-empty root set `J` together with an ordered
//! partition of the complement indexed by `J`, empty blocks allowed).

use std::sync::{Arc, OnceLock};

/// Largest order for which templates are available.
pub const MAX_TEMPLATE_ORDER: usize = 12;

/// A set partition as a list of non-empty block masks.
pub type SetPartition = Vec<u32>;

/// One term of the composition sum: the root set `J` and, for each root
/// position `j in J`, the mask of the block attached to it.
#[derive(Debug, Clone)]
pub struct RootedComposition {
    pub roots: u32,
    pub blocks: Vec<(u8, u32)>,
}

fn check(n: usize) {
    assert!(n <= MAX_TEMPLATE_ORDER, "template order {n} exceeds {MAX_TEMPLATE_ORDER}");
}

/// All set partitions of `{0..n-1}` (`Bell(n)` of them; one empty partition for `n = 0`).
pub fn set_partitions(n: usize) -> Arc<Vec<SetPartition>> {
    check(n);
    static MEMO: [OnceLock<Arc<Vec<SetPartition>>>; MAX_TEMPLATE_ORDER + 1] =
        [const { OnceLock::new() }; MAX_TEMPLATE_ORDER + 1];
    MEMO[n]
        .get_or_init(|| {
            let mut out = Vec::new();
            let mut blocks: Vec<u32> = Vec::new();
            partitions_rec(0, n, &mut blocks, &mut out);
            Arc::new(out)
        })
        .clone()
}

fn partitions_rec(i: usize, n: usize, blocks: &mut Vec<u32>, out: &mut Vec<SetPartition>) {
    if i == n {
        out.push(blocks.clone());
        return;
    }
    for b in 0..blocks.len() {
        blocks[b] |= 1 << i;
        partitions_rec(i + 1, n, blocks, out);
        blocks[b] &= !(1 << i);
    }
    blocks.push(1 << i);
    partitions_rec(i + 1, n, blocks, out);
    blocks.pop();
}

/// All rooted compositions of `{0..n-1}`.
pub fn rooted_compositions(n: usize) -> Arc<Vec<RootedComposition>> {
    check(n);
    static MEMO: [OnceLock<Arc<Vec<RootedComposition>>>; MAX_TEMPLATE_ORDER + 1] =
        [const { OnceLock::new() }; MAX_TEMPLATE_ORDER + 1];
    MEMO[n]
        .get_or_init(|| {
            let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
            let mut out = Vec::new();
            for roots in 1..=full {
                let root_pos: Vec<u8> = (0..n as u8).filter(|&i| roots & (1 << i) != 0).collect();
                let rest: Vec<u8> = (0..n as u8).filter(|&i| roots & (1 << i) == 0).collect();
                let m = root_pos.len();
                let total = m.pow(rest.len() as u32);
                for code in 0..total {
                    let mut blocks: Vec<(u8, u32)> = root_pos.iter().map(|&j| (j, 0)).collect();
                    let mut c = code;
                    for &v in &rest {
                        blocks[c % m].1 |= 1 << v;
                        c /= m;
                    }
                    out.push(RootedComposition { roots, blocks });
                }
            }
            Arc::new(out)
        })
        .clone()
}

/// All ordered partitions of `{0..n-1}` into `r` labelled blocks, empty blocks
/// allowed (`r^n` of them).
pub fn ordered_partitions(n: usize, r: usize) -> Vec<Vec<u32>> {
    check(n);
    let total = r.pow(n as u32);
    (0..total)
        .map(|code| {
            let mut blocks = vec![0u32; r];
            let mut c = code;
            for i in 0..n {
                blocks[c % r] |= 1 << i;
                c /= r;
            }
            blocks
        })
        .collect()
}
