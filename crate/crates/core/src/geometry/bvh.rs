//! Bounding volume hierarchy over mesh triangles.
//!
//! Top-down build, median split on triangle centroids along the longest
//! axis of the centroid bounds, leaves of at most [`LEAF_SIZE`] triangles.

use super::{Aabb, TriangleMesh};

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, PartialEq)]
enum NodeKind {
    Leaf { start: u32, count: u32 },
    Inner { left: u32, right: u32 },
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    aabb: Aabb,
    kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

/// Triangle tests performed by instrumented queries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub queries: u64,
    pub triangles_tested: u64,
}

impl Bvh {
    pub fn build(mesh: &TriangleMesh) -> Self {
        let n = mesh.triangle_count();
        let boxes: Vec<Aabb> = (0..n).map(|t| mesh.triangle_aabb(t)).collect();
        let centers: Vec<_> = boxes.iter().map(|b| b.center()).collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        build_node(&mut nodes, &mut order, 0, n, &boxes, &centers);
        Self { nodes, order }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn bounds(&self) -> Aabb {
        self.nodes[0].aabb
    }

    /// Triangle ids per leaf.
    pub fn leaves(&self) -> Vec<Vec<u32>> {
        self.nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Leaf { start, count } => {
                    Some(self.order[start as usize..(start + count) as usize].to_vec())
                }
                NodeKind::Inner { .. } => None,
            })
            .collect()
    }

    /// Checks that every inner node's box contains its children's boxes.
    pub fn boxes_are_nested(&self) -> bool {
        self.nodes.iter().all(|n| match n.kind {
            NodeKind::Inner { left, right } => {
                n.aabb.contains(&self.nodes[left as usize].aabb)
                    && n.aabb.contains(&self.nodes[right as usize].aabb)
            }
            NodeKind::Leaf { .. } => true,
        })
    }

    /// Calls `visit` for every triangle whose leaf box passes `accept`.
    /// Returns the number of triangles visited.
    pub fn traverse(
        &self,
        mut accept: impl FnMut(&Aabb) -> bool,
        mut visit: impl FnMut(usize),
    ) -> u64 {
        let mut visited = 0;
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i as usize];
            if !accept(&node.aabb) {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    for &t in &self.order[start as usize..(start + count) as usize] {
                        visit(t as usize);
                        visited += 1;
                    }
                }
                NodeKind::Inner { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        visited
    }
}

fn build_node(
    nodes: &mut Vec<Node>,
    order: &mut [u32],
    start: usize,
    end: usize,
    boxes: &[Aabb],
    centers: &[crate::Vec3],
) -> u32 {
    let slice = &mut order[start..end];
    let aabb = slice
        .iter()
        .fold(Aabb::empty(), |b, &t| b.union(&boxes[t as usize]));
    let index = nodes.len() as u32;
    if slice.len() <= LEAF_SIZE {
        nodes.push(Node {
            aabb,
            kind: NodeKind::Leaf {
                start: start as u32,
                count: slice.len() as u32,
            },
        });
        return index;
    }

    let cb = Aabb::from_points(slice.iter().map(|&t| &centers[t as usize]));
    let ext = cb.extent();
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        centers[a as usize][axis]
            .total_cmp(&centers[b as usize][axis])
            .then(a.cmp(&b))
    });

    nodes.push(Node {
        aabb,
        kind: NodeKind::Leaf { start: 0, count: 0 },
    });
    let left = build_node(nodes, order, start, start + mid, boxes, centers);
    let right = build_node(nodes, order, start + mid, end, boxes, centers);
    nodes[index as usize].kind = NodeKind::Inner { left, right };
    index
}
