/// Disjoint sets with path halving and union by size, tracking the largest
/// component as it grows.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
    largest: u32,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        assert!(n <= u32::MAX as usize, "too many elements");
        DisjointSet {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            largest: u32::from(n > 0),
        }
    }

    /// Back to `n` singletons without reallocating.
    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.size.fill(1);
        self.largest = u32::from(!self.parent.is_empty());
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        self.largest = self.largest.max(self.size[ra]);
        true
    }

    pub fn component_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }

    pub fn largest(&self) -> usize {
        self.largest as usize
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn basic_merging() {
        let mut ds = DisjointSet::new(5);
        assert_eq!(ds.largest(), 1);
        assert!(ds.union(0, 1));
        assert!(ds.union(3, 4));
        assert!(!ds.union(1, 0));
        assert_eq!(ds.largest(), 2);
        assert!(ds.union(1, 4));
        assert_eq!(ds.largest(), 4);
        assert_eq!(ds.component_size(3), 4);
        assert_eq!(ds.component_size(2), 1);
        ds.reset();
        assert_eq!(ds.largest(), 1);
        assert_eq!(ds.find(4), 4);
    }

    fn naive_largest(n: usize, edges: &[(usize, usize)]) -> usize {
        // label propagation until fixpoint
        let mut label: Vec<usize> = (0..n).collect();
        loop {
            let mut changed = false;
            for &(a, b) in edges {
                let m = label[a].min(label[b]);
                if label[a] != m || label[b] != m {
                    label[a] = m;
                    label[b] = m;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut counts = vec![0; n];
        for l in label {
            counts[l] += 1;
        }
        counts.into_iter().max().unwrap_or(0)
    }

    proptest! {
        #[test]
        fn largest_matches_label_propagation(
            n in 1usize..40,
            raw in proptest::collection::vec((0usize..40, 0usize..40), 0..80),
        ) {
            let edges: Vec<_> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
            let mut ds = DisjointSet::new(n);
            for &(a, b) in &edges {
                ds.union(a, b);
            }
            prop_assert_eq!(ds.largest(), naive_largest(n, &edges));
        }
    }
}
