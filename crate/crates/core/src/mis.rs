//! Exact maximum independent set by branch and bound with a greedy
//! clique-cover upper bound. Instances stay tiny (at most 60 vertices).

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 60;

/// Exact maximum independent set size plus one witness set (vertex indices).
pub fn max_independent_set(nvertices: usize, edges: &[(usize, usize)]) -> Result<(usize, Vec<usize>)> {
    if nvertices > MAX_VERTICES {
        return Err(Error::SizeCap(format!("{nvertices} vertices exceeds {MAX_VERTICES}")));
    }
    let mut adj = vec![0u64; nvertices];
    for &(a, b) in edges {
        if a >= nvertices || b >= nvertices {
            return Err(Error::OutOfRange("edge endpoint", format!("({a},{b})")));
        }
        if a == b {
            continue;
        }
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let all: u64 = if nvertices == 64 { u64::MAX } else { (1u64 << nvertices) - 1 };

    struct Search<'a> {
        adj: &'a [u64],
        best: u64,
        best_size: u32,
    }

    impl Search<'_> {
        /// Greedy clique cover of `cand`: each clique contributes at most one
        /// vertex to any independent set.
        fn upper_bound(&self, cand: u64) -> u32 {
            let mut rest = cand;
            let mut cliques = 0;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                let mut clique = 1u64 << v;
                let mut common = self.adj[v] & rest;
                rest &= !(1u64 << v);
                while common != 0 {
                    let u = common.trailing_zeros() as usize;
                    clique |= 1 << u;
                    common &= self.adj[u];
                    rest &= !(1u64 << u);
                }
                let _ = clique;
                cliques += 1;
            }
            cliques
        }

        fn go(&mut self, chosen: u64, cand: u64) {
            let size = chosen.count_ones();
            if size > self.best_size {
                self.best_size = size;
                self.best = chosen;
            }
            if cand == 0 || size + self.upper_bound(cand) <= self.best_size {
                return;
            }
            let v = cand.trailing_zeros() as usize;
            // include v
            self.go(chosen | 1 << v, cand & !self.adj[v] & !(1u64 << v));
            // exclude v
            self.go(chosen, cand & !(1u64 << v));
        }
    }

    let mut s = Search { adj: &adj, best: 0, best_size: 0 };
    s.go(0, all);
    let witness: Vec<usize> = (0..nvertices).filter(|&v| s.best >> v & 1 == 1).collect();
    Ok((s.best_size as usize, witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph() {
        let (size, witness) = max_independent_set(4, &[]).unwrap();
        assert_eq!(size, 4);
        assert_eq!(witness, vec![0, 1, 2, 3]);
    }

    #[test]
    fn complete_graph() {
        let edges: Vec<(usize, usize)> =
            (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let (size, _) = max_independent_set(5, &edges).unwrap();
        assert_eq!(size, 1);
    }

    #[test]
    fn five_cycle() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let (size, witness) = max_independent_set(5, &edges).unwrap();
        assert_eq!(size, 2);
        for w in witness.windows(2) {
            assert!(!edges.contains(&(w[0], w[1])));
        }
    }

    #[test]
    fn petersen_graph() {
        // outer 5-cycle, inner 5-star, spokes; independence number 4
        let mut edges = vec![];
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, 5 + i));
        }
        let (size, _) = max_independent_set(10, &edges).unwrap();
        assert_eq!(size, 4);
    }

    #[test]
    fn size_cap() {
        assert!(max_independent_set(61, &[]).is_err());
    }
}
