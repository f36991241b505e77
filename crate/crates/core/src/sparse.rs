//! Envelope (skyline) Cholesky factorization with reverse Cuthill–McKee
//! ordering.
//!
//! The symbolic phase is done once per sparsity pattern; afterwards values
//! are accumulated straight into the envelope storage, factored in place and
//! reused for any number of right-hand sides.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Reverse Cuthill–McKee ordering of an undirected graph given as adjacency
/// lists. Returns `perm` with `perm[new] = old`. Every connected component is
/// started from a pseudo-peripheral vertex.
pub fn reverse_cuthill_mckee(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let degree = |v: usize| adjacency[v].len();
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let root = pseudo_peripheral(adjacency, seed);
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adjacency[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree(w), w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Breadth-first levels from `root` within its component: returns the
/// eccentricity and a minimum-degree vertex of the last level.
fn last_level(adjacency: &[Vec<usize>], root: usize) -> (usize, usize) {
    let mut dist = vec![usize::MAX; adjacency.len()];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    let (mut ecc, mut far) = (0, root);
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        if d > ecc || (d == ecc && adjacency[v].len() < adjacency[far].len()) {
            ecc = d;
            far = v;
        }
        for &w in &adjacency[v] {
            if dist[w] == usize::MAX {
                dist[w] = d + 1;
                queue.push_back(w);
            }
        }
    }
    (ecc, far)
}

fn pseudo_peripheral(adjacency: &[Vec<usize>], seed: usize) -> usize {
    // George–Liu: hop to the far end while the eccentricity keeps growing.
    let (mut ecc, mut far) = last_level(adjacency, seed);
    for _ in 0..8 {
        let (e, next) = last_level(adjacency, far);
        if e <= ecc {
            break;
        }
        ecc = e;
        far = next;
    }
    far
}

/// Symmetric positive-definite matrix in envelope storage under a fill
/// reducing permutation.
#[derive(Clone, Debug)]
pub struct EnvelopeMatrix {
    /// `perm[new] = old`.
    perm: Vec<usize>,
    /// `inverse[old] = new`.
    inverse: Vec<usize>,
    /// First stored column of each permuted row.
    first: Vec<usize>,
    /// Offset of the first stored entry of each row; `start[n]` is the size.
    start: Vec<usize>,
    values: Vec<f64>,
    factored: bool,
}

impl EnvelopeMatrix {
    /// Symbolic phase from adjacency lists (self loops optional).
    pub fn new(adjacency: &[Vec<usize>]) -> Self {
        let n = adjacency.len();
        let perm = reverse_cuthill_mckee(adjacency);
        let mut inverse = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut first = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n + 1);
        let mut size = 0;
        for (i, &old) in perm.iter().enumerate() {
            let lo = adjacency[old]
                .iter()
                .map(|&w| inverse[w])
                .fold(i, usize::min);
            first.push(lo);
            start.push(size);
            size += i - lo + 1;
        }
        start.push(size);
        Self {
            perm,
            inverse,
            first,
            start,
            values: vec![0.0; size],
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Number of stored entries of the lower envelope.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    /// Largest row width `i − first[i]`.
    pub fn bandwidth(&self) -> usize {
        self.first
            .iter()
            .enumerate()
            .map(|(i, &f)| i - f)
            .max()
            .unwrap_or(0)
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
        self.factored = false;
    }

    /// Adds `value` to entry `(i, j)` in original numbering. Only one of the
    /// two symmetric positions should be added for off-diagonal entries.
    ///
    /// Panics if the entry lies outside the symbolic pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (a, b) = (self.inverse[i], self.inverse[j]);
        let (row, col) = if a >= b { (a, b) } else { (b, a) };
        assert!(col >= self.first[row], "entry ({i}, {j}) outside the envelope");
        self.values[self.start[row] + col - self.first[row]] += value;
    }

    /// Entry `(i, j)` of the assembled matrix in original numbering (zero
    /// outside the envelope). Meaningless after factoring.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.inverse[i], self.inverse[j]);
        let (row, col) = if a >= b { (a, b) } else { (b, a) };
        if col < self.first[row] {
            0.0
        } else {
            self.values[self.start[row] + col - self.first[row]]
        }
    }

    /// In-place `A = L Lᵀ`. Fill stays inside the envelope.
    pub fn factor(&mut self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let si = self.start[i];
            for j in fi..i {
                let fj = self.first[j];
                let sj = self.start[j];
                let k0 = fi.max(fj);
                let len = j - k0;
                let (head, row_i) = self.values.split_at_mut(si);
                let lj = &head[sj + k0 - fj..sj + k0 - fj + len];
                let li = &row_i[k0 - fi..k0 - fi + len];
                let dot = dot(li, lj);
                let diag = head[sj + j - fj];
                row_i[j - fi] = (row_i[j - fi] - dot) / diag;
            }
            let row = &self.values[si..si + i - fi];
            let pivot = self.values[si + i - fi] - dot(row, row);
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    row: self.perm[i],
                    pivot,
                });
            }
            self.values[si + i - fi] = math::sqrt(pivot);
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` with the stored factor; `b` in original numbering.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if !self.factored {
            return Err(Error::Mismatch("solve called before factor".into()));
        }
        if b.len() != n {
            return Err(Error::Mismatch(alloc::format!(
                "right-hand side has length {}, expected {n}",
                b.len()
            )));
        }
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let si = self.start[i];
            let s = dot(&self.values[si..si + i - fi], &y[fi..i]);
            y[i] = (y[i] - s) / self.values[si + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let si = self.start[i];
            y[i] /= self.values[si + i - fi];
            let yi = y[i];
            for (k, l) in self.values[si..si + i - fi].iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        Ok(x)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators so the loop vectorizes without fast-math
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1-D Laplacian with Dirichlet ends, numbered in scrambled order.
    fn scrambled_path(n: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
        let label: Vec<usize> = (0..n).map(|i| (i * 7) % n).collect();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n - 1 {
            adj[label[i]].push(label[i + 1]);
            adj[label[i + 1]].push(label[i]);
        }
        (adj, label)
    }

    #[test]
    fn rcm_recovers_narrow_band_on_a_path() {
        let (adj, _) = scrambled_path(50);
        let m = EnvelopeMatrix::new(&adj);
        assert_eq!(m.bandwidth(), 1);
        assert_eq!(m.envelope_size(), 50 + 49);
    }

    #[test]
    fn solves_tridiagonal_system() {
        let n = 50;
        let (adj, label) = scrambled_path(n);
        let mut m = EnvelopeMatrix::new(&adj);
        for i in 0..n {
            m.add(label[i], label[i], 2.0);
            if i + 1 < n {
                m.add(label[i + 1], label[i], -1.0);
            }
        }
        // x_i = i(n+1-i) solves -x'' = 2 in the discrete sense
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[label[i]] = 2.0;
        }
        m.factor().unwrap();
        let x = m.solve(&b).unwrap();
        for i in 0..n {
            let k = (i + 1) as f64;
            let exact = k * (n as f64 + 1.0 - k);
            assert!((x[label[i]] - exact).abs() < 1e-9 * exact);
        }
    }

    #[test]
    fn dense_block_against_direct_solution() {
        // A = I + v vᵀ on a complete graph, A⁻¹ b known in closed form
        let n = 6;
        let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect();
        let v: Vec<f64> = (0..n).map(|i| 0.3 + i as f64).collect();
        let mut m = EnvelopeMatrix::new(&adj);
        for i in 0..n {
            for j in 0..=i {
                m.add(i, j, v[i] * v[j] + if i == j { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(m.get(2, 4), v[2] * v[4]);
        m.factor().unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = m.solve(&b).unwrap();
        let vb: f64 = v.iter().zip(&b).map(|(a, c)| a * c).sum();
        let vv: f64 = v.iter().map(|a| a * a).sum();
        for i in 0..n {
            let exact = b[i] - v[i] * vb / (1.0 + vv);
            assert!((x[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_is_reported() {
        let adj = vec![vec![1], vec![0]];
        let mut m = EnvelopeMatrix::new(&adj);
        m.add(0, 0, 1.0);
        m.add(1, 1, 1.0);
        m.add(0, 1, 2.0);
        assert!(matches!(m.factor(), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn disconnected_components_are_all_ordered() {
        let adj = vec![vec![1], vec![0], vec![], vec![4], vec![3]];
        let perm = reverse_cuthill_mckee(&adj);
        let mut sorted = perm.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
    }
}
