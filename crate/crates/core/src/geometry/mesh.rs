use std::io::BufRead;
use std::sync::Arc;

use nalgebra::Matrix3;
use thiserror::Error;

use super::distance::{point_triangle_distance, segment_triangle_distance};
use super::{Aabb, Bvh, Capsule, QueryStats};
use crate::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {triangle} references vertex {index}, mesh has {vertices}")]
    IndexOutOfRange {
        triangle: usize,
        index: u32,
        vertices: usize,
    },
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("OBJ parse error: {0}")]
    Obj(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    name: Option<String>,
}

impl TriangleMesh {
    pub fn new(
        vertices: Vec<Vec3>,
        triangles: Vec<[u32; 3]>,
        name: Option<String>,
    ) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        if let Some(i) = vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(MeshError::NonFinite(i));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&index) = tri.iter().find(|&&i| i as usize >= vertices.len()) {
                return Err(MeshError::IndexOutOfRange {
                    triangle: t,
                    index,
                    vertices: vertices.len(),
                });
            }
        }
        Ok(Self {
            vertices,
            triangles,
            name,
        })
    }

    /// Parses Wavefront OBJ text. Polygons are fan-triangulated, materials,
    /// normals and texture coordinates are ignored, all groups are merged.
    pub fn from_obj_reader(reader: &mut impl BufRead, name: Option<String>) -> Result<Self, MeshError> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut line = String::new();
        let mut line_no = 0;
        loop {
            line.clear();
            line_no += 1;
            if reader.read_line(&mut line).map_err(|e| MeshError::Obj(e.to_string()))? == 0 {
                break;
            }
            let bad = |what: &str| MeshError::Obj(format!("line {line_no}: {what}"));
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let mut c = [0.0; 3];
                    for slot in &mut c {
                        *slot = it
                            .next()
                            .and_then(|t| t.parse::<f64>().ok())
                            .ok_or_else(|| bad("vertex needs three numbers"))?;
                    }
                    vertices.push(Vec3::from(c));
                }
                Some("f") => {
                    // `i`, `i/t`, `i//n` or `i/t/n`; negative indices count
                    // back from the latest vertex
                    let idx = it
                        .map(|t| {
                            let i: i64 = t.split('/').next().unwrap_or("").parse().map_err(|_| bad("bad face index"))?;
                            let n = vertices.len() as i64;
                            let k = if i < 0 { n + i } else { i - 1 };
                            if i == 0 || k < 0 || k >= n {
                                return Err(bad("face index out of range"));
                            }
                            Ok(k as u32)
                        })
                        .collect::<Result<Vec<u32>, _>>()?;
                    if idx.len() < 3 {
                        return Err(bad("face needs at least three vertices"));
                    }
                    for k in 1..idx.len() - 1 {
                        triangles.push([idx[0], idx[k], idx[k + 1]]);
                    }
                }
                _ => {}
            }
        }
        Self::new(vertices, triangles, name)
    }

    pub fn from_obj_str(text: &str, name: Option<String>) -> Result<Self, MeshError> {
        Self::from_obj_reader(&mut std::io::Cursor::new(text.as_bytes()), name)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        self.triangles[t].map(|i| self.vertices[i as usize])
    }

    pub fn triangle_aabb(&self, t: usize) -> Aabb {
        Aabb::from_points(self.triangle(t).iter())
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter())
    }

    /// `rotation * (scale * v) + translation` on every vertex.
    pub fn transformed(&self, rotation: &Matrix3<f64>, translation: &Vec3, scale: f64) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| rotation * (v * scale) + translation)
                .collect(),
            triangles: self.triangles.clone(),
            name: self.name.clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.transformed(&Matrix3::identity(), &Vec3::zeros(), s)
    }

    /// X-negated copy. Winding flips, which no query depends on.
    pub fn mirrored_x(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| Vec3::new(-v.x, v.y, v.z)).collect(),
            triangles: self.triangles.clone(),
            name: self.name.clone(),
        }
    }

    /// Raw little-endian bytes of vertices and indices, for content hashing.
    pub fn content_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.vertices.len() * 24 + self.triangles.len() * 12);
        for v in &self.vertices {
            for c in v.iter() {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
        for t in &self.triangles {
            for i in t {
                out.extend_from_slice(&i.to_le_bytes());
            }
        }
        out
    }
}

/// A mesh together with its BVH. Cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshShape {
    mesh: Arc<TriangleMesh>,
    bvh: Arc<Bvh>,
}

impl MeshShape {
    pub fn new(mesh: TriangleMesh) -> Self {
        let bvh = Bvh::build(&mesh);
        Self {
            mesh: Arc::new(mesh),
            bvh: Arc::new(bvh),
        }
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    fn triangle_penetration(&self, c: &Capsule, t: usize) -> f64 {
        let [a, b, v] = self.mesh.triangle(t);
        c.radius - segment_triangle_distance(c.a, c.b, a, b, v)
    }

    /// `max(radius - distance(centerline, triangle))` over all triangles,
    /// clamped at zero.
    pub fn capsule_penetration(&self, c: &Capsule) -> f64 {
        self.capsule_penetration_counted(c, &mut QueryStats::default())
    }

    pub fn capsule_penetration_counted(&self, c: &Capsule, stats: &mut QueryStats) -> f64 {
        let query = c.aabb();
        let mut depth = 0.0f64;
        let visited = self.bvh.traverse(
            |b| b.overlaps(&query),
            |t| depth = depth.max(self.triangle_penetration(c, t)),
        );
        stats.queries += 1;
        stats.triangles_tested += visited;
        depth
    }

    /// Reference implementation over every triangle.
    pub fn capsule_penetration_brute(&self, c: &Capsule) -> f64 {
        (0..self.mesh.triangle_count())
            .map(|t| self.triangle_penetration(c, t))
            .fold(0.0f64, f64::max)
    }

    /// Smallest point-to-surface distance, if it is at most `within`.
    pub fn distance_to_point(&self, p: &Vec3, within: f64) -> Option<f64> {
        let best = std::cell::Cell::new(f64::INFINITY);
        self.bvh.traverse(
            |b| b.distance_to_point(p) <= within.min(best.get()),
            |t| {
                let [a, b, c] = self.mesh.triangle(t);
                best.set(best.get().min(point_triangle_distance(*p, a, b, c)));
            },
        );
        let best = best.get();
        (best <= within).then_some(best)
    }

    /// Ids of triangles within `r` of `p`, ascending.
    pub fn triangles_within(&self, p: &Vec3, r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.bvh.traverse(
            |b| b.distance_to_point(p) <= r,
            |t| {
                let [a, b, c] = self.mesh.triangle(t);
                if point_triangle_distance(*p, a, b, c) <= r {
                    out.push(t);
                }
            },
        );
        out.sort_unstable();
        out
    }

    /// Inside test by ray parity. Only meaningful for closed meshes.
    pub fn contains_point(&self, p: &Vec3) -> bool {
        // Skewed direction keeps the ray off edges and vertices of
        // axis-aligned geometry.
        let dir = Vec3::new(0.5773, 0.5779, 0.5769).normalize();
        let mut hits = 0usize;
        self.bvh.traverse(
            |b| ray_hits_box(p, &dir, b),
            |t| {
                let [a, b, c] = self.mesh.triangle(t);
                if ray_hits_triangle(p, &dir, a, b, c) {
                    hits += 1;
                }
            },
        );
        hits % 2 == 1
    }
}

fn ray_hits_box(o: &Vec3, d: &Vec3, b: &Aabb) -> bool {
    let (mut t0, mut t1) = (0.0f64, f64::INFINITY);
    for i in 0..3 {
        let inv = 1.0 / d[i];
        let mut ta = (b.min[i] - o[i]) * inv;
        let mut tb = (b.max[i] - o[i]) * inv;
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return false;
        }
    }
    true
}

fn ray_hits_triangle(o: &Vec3, d: &Vec3, a: Vec3, b: Vec3, c: Vec3) -> bool {
    let e1 = b - a;
    let e2 = c - a;
    let h = d.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() < 1e-14 {
        return false;
    }
    let f = 1.0 / det;
    let s = o - a;
    let u = f * s.dot(&h);
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let q = s.cross(&e1);
    let v = f * d.dot(&q);
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    f * e2.dot(&q) > 0.0
}

/// Axis-aligned box as 12 triangles.
pub(crate) fn box_mesh(min: Vec3, max: Vec3) -> TriangleMesh {
    let v = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { min.x } else { max.x },
                if i & 2 == 0 { min.y } else { max.y },
                if i & 4 == 0 { min.z } else { max.z },
            )
        })
        .collect();
    let t = vec![
        [0, 2, 1], [1, 2, 3], [4, 5, 6], [5, 7, 6], [0, 1, 4], [1, 5, 4],
        [2, 6, 3], [3, 6, 7], [0, 4, 2], [2, 4, 6], [1, 3, 5], [3, 7, 5],
    ];
    TriangleMesh::new(v, t, Some("box".into())).expect("box mesh is valid")
}
