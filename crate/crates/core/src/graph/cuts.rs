use crate::error::{Error, Result};

use super::{Edge, Graph};

/// Largest vertex count accepted by the exhaustive cut routines.
pub const MAX_BRUTEFORCE_N: usize = 20;

/// `2^floor(log2 d)`.
pub fn rounded_degree(d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "rounded degree is undefined for degree 0".into(),
        ));
    }
    Ok(1usize << (usize::BITS - 1 - d.leading_zeros()))
}

/// Cut edges whose rounded degree `min(rd(u), rd(v))` equals `k`.
pub fn k_projection(cut: &[Edge], k: usize, g: &Graph) -> Result<Vec<Edge>> {
    if !k.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("k = {k} is not a power of two")));
    }
    let mut out = Vec::new();
    for e in cut {
        let rd = rounded_degree(g.degree(e.u))?.min(rounded_degree(g.degree(e.v))?);
        if rd == k {
            out.push(*e);
        }
    }
    Ok(out)
}

/// Every non-trivial bipartition exactly once, as `(side mask, cut size)`.
/// Vertex `n - 1` is always outside the mask.
pub fn enumerate_cuts(g: &Graph) -> Result<CutIter> {
    if g.n() > MAX_BRUTEFORCE_N {
        return Err(Error::InvalidArgument(format!(
            "exhaustive cut enumeration needs n <= {MAX_BRUTEFORCE_N}, got {}",
            g.n()
        )));
    }
    let adj = g
        .degrees()
        .iter()
        .enumerate()
        .map(|(v, _)| g.neighbors(v).iter().fold(0u32, |m, &(u, _)| m | (1 << u)))
        .collect();
    let end = if g.n() == 0 { 1 } else { 1u32 << (g.n() - 1) };
    Ok(CutIter { adj, next: 1, end })
}

#[derive(Debug, Clone)]
pub struct CutIter {
    adj: Vec<u32>,
    next: u32,
    end: u32,
}

impl CutIter {
    fn cut_size(&self, side: u32) -> usize {
        let mut total = 0;
        let mut rest = side;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += (self.adj[v] & !side).count_ones() as usize;
        }
        total
    }
}

impl Iterator for CutIter {
    type Item = (u32, usize);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let side = self.next;
        self.next += 1;
        Some((side, self.cut_size(side)))
    }
}

pub fn max_cut_bruteforce(g: &Graph) -> Result<usize> {
    Ok(enumerate_cuts(g)?.map(|(_, size)| size).max().unwrap_or(0))
}
