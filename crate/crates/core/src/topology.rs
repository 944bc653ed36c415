use alloc::vec::Vec;

/// Disjoint-set forest with path halving and union by size.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: alloc::vec![1; n],
            components: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
    }

    pub(crate) fn components(&self) -> usize {
        self.components
    }
}

/// True when the graph on `nodes` vertices stays connected with edge `skip` removed.
pub(crate) fn connected_without(nodes: usize, edges: &[(usize, usize)], skip: Option<usize>) -> bool {
    if nodes == 0 {
        return true;
    }
    let mut uf = UnionFind::new(nodes);
    for (i, &(a, b)) in edges.iter().enumerate() {
        if Some(i) != skip {
            uf.union(a, b);
        }
    }
    uf.components() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_survives_any_single_cut() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        assert!(connected_without(4, &edges, None));
        for i in 0..edges.len() {
            assert!(connected_without(4, &edges, Some(i)));
        }
    }

    #[test]
    fn radial_edge_islands() {
        let edges = [(0, 1), (1, 2), (2, 0), (2, 3)];
        assert!(connected_without(4, &edges, None));
        assert!(!connected_without(4, &edges, Some(3)));
        assert!(connected_without(4, &edges, Some(0)));
    }
}
