use crate::dendrogram::NodeId;

/// Disjoint sets with union by size and path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    /// Root lookup without mutation; depth stays logarithmic thanks to union
    /// by size.
    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    pub fn find_mut(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets of `a` and `b`, returning the surviving root.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find_mut(a), self.find_mut(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        ra
    }

    pub fn set_size(&self, x: usize) -> usize {
        self.size[self.find(x)]
    }
}

/// Identifier of a blob: the union-find root of its members. Changes when
/// the blob is merged.
pub type BlobId = usize;

/// One recorded merge: the new tree node and the nodes it absorbed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeEvent {
    pub node: NodeId,
    pub children: Vec<NodeId>,
    pub blob: BlobId,
}

/// The evolving partition of the points into blobs.
///
/// Each blob remembers the tree node that represents it, so merging blobs
/// directly yields the events needed to build the dendrogram.
#[derive(Clone, Debug)]
pub struct BlobPartition {
    uf: UnionFind,
    members: Vec<Vec<usize>>,
    node: Vec<NodeId>,
    next_node: NodeId,
    count: usize,
}

impl BlobPartition {
    /// Every point in its own blob.
    pub fn singletons(n: usize) -> Self {
        BlobPartition {
            uf: UnionFind::new(n),
            members: (0..n).map(|p| vec![p]).collect(),
            node: (0..n).collect(),
            next_node: n,
            count: n,
        }
    }

    pub fn n_points(&self) -> usize {
        self.members.len()
    }

    /// Number of blobs.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    pub fn blob_of(&self, p: usize) -> BlobId {
        self.uf.find(p)
    }

    /// Sorted members of a blob.
    pub fn members(&self, b: BlobId) -> &[usize] {
        &self.members[b]
    }

    pub fn size(&self, b: BlobId) -> usize {
        self.members[b].len()
    }

    pub fn is_singleton(&self, b: BlobId) -> bool {
        self.members[b].len() == 1
    }

    pub fn node(&self, b: BlobId) -> NodeId {
        self.node[b]
    }

    pub fn min_member(&self, b: BlobId) -> usize {
        self.members[b][0]
    }

    /// Current blobs ordered by smallest member.
    pub fn ids(&self) -> Vec<BlobId> {
        let mut ids: Vec<BlobId> = (0..self.members.len())
            .filter(|&p| self.uf.find(p) == p)
            .collect();
        ids.sort_unstable_by_key(|&b| self.members[b][0]);
        ids
    }

    pub fn singleton_count(&self) -> usize {
        (0..self.members.len())
            .filter(|&p| self.uf.find(p) == p && self.members[p].len() == 1)
            .count()
    }

    /// Blob index per point, as dense labels in `0..len()` ordered by
    /// smallest member.
    pub fn assignment(&self) -> Vec<usize> {
        let ids = self.ids();
        let mut label = vec![0; self.members.len()];
        for (i, &b) in ids.iter().enumerate() {
            for &p in &self.members[b] {
                label[p] = i;
            }
        }
        label
    }

    /// Merges two or more distinct blobs into one.
    pub fn merge(&mut self, blobs: &[BlobId]) -> MergeEvent {
        let mut blobs: Vec<BlobId> = blobs.to_vec();
        blobs.sort_unstable_by_key(|&b| self.members[b][0]);
        blobs.dedup();
        assert!(blobs.len() >= 2, "merge needs at least two blobs");
        debug_assert!(blobs.iter().all(|&b| self.uf.find(b) == b));

        let children: Vec<NodeId> = blobs.iter().map(|&b| self.node[b]).collect();
        let mut all: Vec<usize> = Vec::new();
        let mut root = blobs[0];
        for &b in &blobs {
            all.append(&mut self.members[b]);
        }
        for &b in &blobs[1..] {
            root = self.uf.union(root, b);
        }
        all.sort_unstable();
        self.members[root] = all;
        let node = self.next_node;
        self.next_node += 1;
        self.node[root] = node;
        self.count -= blobs.len() - 1;
        MergeEvent {
            node,
            children,
            blob: root,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_joins_sets() {
        let mut uf = UnionFind::new(5);
        uf.union(0, 1);
        uf.union(3, 4);
        uf.union(1, 4);
        assert_eq!(uf.find(0), uf.find(3));
        assert_ne!(uf.find(0), uf.find(2));
        assert_eq!(uf.set_size(4), 4);
    }

    #[test]
    fn merges_track_nodes_and_members() {
        let mut b = BlobPartition::singletons(5);
        let e1 = b.merge(&[b.blob_of(3), b.blob_of(1)]);
        assert_eq!(e1.node, 5);
        assert_eq!(e1.children, vec![1, 3]);
        assert_eq!(b.members(e1.blob), &[1, 3]);
        let e2 = b.merge(&[b.blob_of(0), b.blob_of(3), b.blob_of(4)]);
        assert_eq!(e2.children, vec![0, 5, 4]);
        assert_eq!(b.members(e2.blob), &[0, 1, 3, 4]);
        assert_eq!(b.len(), 2);
        assert_eq!(b.singleton_count(), 1);
        assert_eq!(b.assignment(), vec![0, 0, 1, 0, 0]);
    }
}
