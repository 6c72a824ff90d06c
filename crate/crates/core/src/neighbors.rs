//! Exact k-nearest-neighbor search under the Euclidean distance.
//!
//! Two backends share one ordering: results are sorted by `(distance, index)`
//! where `index` is the position of the point in the dataset. Both backends
//! compute distances with the same function, so their outputs agree bit for
//! bit, ties included.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Brute,
    #[default]
    Tree,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
    pub label: u8,
}

/// Ordered neighbors, nearest first.
pub type NeighborList = Vec<Neighbor>;

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc.sqrt()
}

/// Candidate ordered by `(distance, index)`; the max-heap keeps the worst on top.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    distance: f64,
    index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.index.cmp(&other.index))
    }
}

struct BoundedHeap {
    k: usize,
    heap: BinaryHeap<Candidate>,
}

impl BoundedHeap {
    fn new(k: usize) -> Self {
        Self {
            k,
            heap: BinaryHeap::with_capacity(k + 1),
        }
    }

    fn offer(&mut self, c: Candidate) {
        if self.heap.len() < self.k {
            self.heap.push(c);
        } else if let Some(worst) = self.heap.peek() {
            if c < *worst {
                self.heap.pop();
                self.heap.push(c);
            }
        }
    }

    /// Whether a region whose points are all at distance >= `bound` could
    /// still contribute. Equal distances can win on index, so only a strictly
    /// larger bound prunes.
    fn admits(&self, bound: f64) -> bool {
        self.heap.len() < self.k || bound <= self.heap.peek().map_or(f64::INFINITY, |w| w.distance)
    }

    fn into_sorted(self) -> Vec<Candidate> {
        self.heap.into_sorted_vec()
    }
}

#[derive(Debug)]
struct Node {
    lo: Vec<f64>,
    hi: Vec<f64>,
    kind: NodeKind,
}

#[derive(Debug)]
enum NodeKind {
    Leaf { start: usize, end: usize },
    Split { left: usize, right: usize },
}

#[derive(Debug)]
struct KdTree {
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl KdTree {
    fn build(data: &Dataset) -> Self {
        let mut tree = KdTree {
            nodes: Vec::new(),
            order: (0..data.len()).collect(),
        };
        let n = data.len();
        tree.build_node(data, 0, n);
        tree
    }

    fn bounds(data: &Dataset, idx: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let d = data.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in idx {
            for (j, v) in data.x(i).iter().enumerate() {
                lo[j] = lo[j].min(*v);
                hi[j] = hi[j].max(*v);
            }
        }
        (lo, hi)
    }

    fn build_node(&mut self, data: &Dataset, start: usize, end: usize) -> usize {
        let (lo, hi) = Self::bounds(data, &self.order[start..end]);
        let id = self.nodes.len();
        self.nodes.push(Node {
            lo,
            hi,
            kind: NodeKind::Leaf { start, end },
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let node = &self.nodes[id];
        let (axis, spread) = node
            .lo
            .iter()
            .zip(&node.hi)
            .map(|(l, h)| h - l)
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (j, s)| if s > best.1 { (j, s) } else { best });
        if spread <= 0.0 {
            // All points coincide; a leaf scan is exact and cheap.
            return id;
        }
        let slice = &mut self.order[start..end];
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            data.x(a)[axis]
                .total_cmp(&data.x(b)[axis])
                .then(a.cmp(&b))
        });
        let left = self.build_node(data, start, start + mid);
        let right = self.build_node(data, start + mid, end);
        self.nodes[id].kind = NodeKind::Split { left, right };
        id
    }

    fn box_distance(node: &Node, query: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((q, lo), hi) in query.iter().zip(&node.lo).zip(&node.hi) {
            let gap = if q < lo {
                lo - q
            } else if q > hi {
                q - hi
            } else {
                0.0
            };
            acc += gap * gap;
        }
        acc.sqrt()
    }

    fn search(&self, data: &Dataset, node_id: usize, query: &[f64], heap: &mut BoundedHeap) {
        let node = &self.nodes[node_id];
        match node.kind {
            NodeKind::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    heap.offer(Candidate {
                        distance: euclidean(data.x(i), query),
                        index: i,
                    });
                }
            }
            NodeKind::Split { left, right } => {
                let dl = Self::box_distance(&self.nodes[left], query);
                let dr = Self::box_distance(&self.nodes[right], query);
                let (first, df, second, ds) = if dl <= dr {
                    (left, dl, right, dr)
                } else {
                    (right, dr, left, dl)
                };
                if heap.admits(df) {
                    self.search(data, first, query, heap);
                }
                if heap.admits(ds) {
                    self.search(data, second, query, heap);
                }
            }
        }
    }
}

/// Read-only neighbor index over a dataset.
#[derive(Debug)]
pub struct NeighborIndex<'a> {
    data: &'a Dataset,
    tree: Option<KdTree>,
}

impl<'a> NeighborIndex<'a> {
    pub fn build(data: &'a Dataset, backend: Backend) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let tree = match backend {
            Backend::Brute => None,
            Backend::Tree => Some(KdTree::build(data)),
        };
        Ok(Self { data, tree })
    }

    pub fn backend(&self) -> Backend {
        if self.tree.is_some() {
            Backend::Tree
        } else {
            Backend::Brute
        }
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    /// The `k` nearest points to `query`, sorted by `(distance, index)`.
    pub fn k_nearest(&self, query: &[f64], k: usize) -> Result<NeighborList> {
        search(self.data, self.tree.as_ref(), query, k)
    }
}

/// Index that owns its dataset, for callers that cannot hold a borrow.
#[derive(Debug)]
pub struct OwnedNeighborIndex {
    data: Dataset,
    tree: Option<KdTree>,
}

impl OwnedNeighborIndex {
    pub fn build(data: Dataset, backend: Backend) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let tree = match backend {
            Backend::Brute => None,
            Backend::Tree => Some(KdTree::build(&data)),
        };
        Ok(Self { data, tree })
    }

    pub fn backend(&self) -> Backend {
        if self.tree.is_some() {
            Backend::Tree
        } else {
            Backend::Brute
        }
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn k_nearest(&self, query: &[f64], k: usize) -> Result<NeighborList> {
        search(&self.data, self.tree.as_ref(), query, k)
    }
}

fn search(data: &Dataset, tree: Option<&KdTree>, query: &[f64], k: usize) -> Result<NeighborList> {
    let n = data.len();
    if query.len() != data.dim() {
        return Err(Error::DimMismatch {
            expected: data.dim(),
            found: query.len(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let mut heap = BoundedHeap::new(k);
    match tree {
        Some(tree) => tree.search(data, 0, query, &mut heap),
        None => {
            for i in 0..n {
                heap.offer(Candidate {
                    distance: euclidean(data.x(i), query),
                    index: i,
                });
            }
        }
    }
    Ok(heap
        .into_sorted()
        .into_iter()
        .map(|c| Neighbor {
            index: c.index,
            distance: c.distance,
            label: data.y(c.index),
        })
        .collect())
}

pub fn build_index(data: &Dataset, backend: Backend) -> Result<NeighborIndex<'_>> {
    NeighborIndex::build(data, backend)
}
