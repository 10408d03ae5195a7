//! Post-processing on finished volumes. Everything here is a pure function
//! of its inputs.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Blocker, BlockerMode, MeshShape};
use crate::hand::FingerId;
use crate::simulator::{GravPoint, GravVolume};
use crate::Vec3;

pub const DEFAULT_BOUNDARY_VOXEL_MM: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VolumeError {
    #[error("volume has no points")]
    EmptyVolume,
    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("{name} must be non-negative and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

fn voxel_of(p: &Vec3, voxel: f64) -> [i64; 3] {
    [
        (p.x / voxel).floor() as i64,
        (p.y / voxel).floor() as i64,
        (p.z / voxel).floor() as i64,
    ]
}

/// Points whose voxel has at least one empty face neighbor.
pub fn motion_boundary(v: &GravVolume, voxel_mm: f64) -> Result<Vec<GravPoint>, VolumeError> {
    if !(voxel_mm > 0.0 && voxel_mm.is_finite()) {
        return Err(VolumeError::InvalidParameter {
            name: "voxel_mm",
            value: voxel_mm,
        });
    }
    if v.is_empty() {
        return Err(VolumeError::EmptyVolume);
    }
    let keys: Vec<[i64; 3]> = v.points.iter().map(|p| voxel_of(&p.position, voxel_mm)).collect();
    let occupied: HashSet<[i64; 3]> = keys.iter().copied().collect();
    const NEIGHBORS: [[i64; 3]; 6] = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]];
    let shell = |k: &[i64; 3]| {
        NEIGHBORS
            .iter()
            .any(|d| !occupied.contains(&[k[0] + d[0], k[1] + d[1], k[2] + d[2]]))
    };
    Ok(v.points
        .iter()
        .zip(&keys)
        .filter(|(_, k)| shell(k))
        .map(|(p, _)| p.clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HapticSurface {
    pub points: Vec<GravPoint>,
    /// Sorted triangle indices within contact distance of some kept point.
    pub triangles: Vec<usize>,
}

/// Volume points touching the object, and the object triangles they touch.
/// The triangle set doubles as the reachable part of the object boundary.
pub fn haptic_surface(v: &GravVolume, mesh: &MeshShape, contact_mm: f64) -> Result<HapticSurface, VolumeError> {
    if !(contact_mm >= 0.0 && contact_mm.is_finite()) {
        return Err(VolumeError::InvalidParameter {
            name: "contact_mm",
            value: contact_mm,
        });
    }
    let mut points = Vec::new();
    let mut triangles = BTreeSet::new();
    for p in &v.points {
        let near = mesh.triangles_within(&p.position, contact_mm);
        if !near.is_empty() {
            points.push(p.clone());
            triangles.extend(near);
        }
    }
    Ok(HapticSurface {
        points,
        triangles: triangles.into_iter().collect(),
    })
}

/// Drops points strictly inside any exclude-points blocker. Block-motion
/// blockers are ignored here.
pub fn apply_blockers(v: &GravVolume, blockers: &[Blocker]) -> GravVolume {
    let active: Vec<&Blocker> = blockers
        .iter()
        .filter(|b| b.mode == BlockerMode::ExcludePoints)
        .collect();
    let mut out = v.clone();
    if active.is_empty() {
        return out;
    }
    out.points
        .retain(|p| !active.iter().any(|b| b.contains_point(&p.position)));
    let removed = (v.len() - out.len()) as u64;
    out.metadata.excluded_points += removed;
    if removed > 0 {
        for r in &mut out.metadata.per_finger {
            r.points = out.points.iter().filter(|p| p.finger == r.finger).count() as u64;
        }
    }
    out
}

pub fn scale_volume(v: &GravVolume, s: f64) -> Result<GravVolume, VolumeError> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(VolumeError::NonPositiveScale(s));
    }
    let mut out = v.clone();
    for p in &mut out.points {
        p.position *= s;
    }
    out.metadata.scale *= s;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reachability {
    pub reachable: bool,
    pub min_cost: Option<f64>,
    pub fingers: Vec<FingerId>,
    pub points: usize,
}

/// Linear scan over points with `|p - center| <= radius`.
pub fn query_reachable(v: &GravVolume, center: &Vec3, radius: f64) -> Result<Reachability, VolumeError> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(VolumeError::InvalidParameter {
            name: "radius",
            value: radius,
        });
    }
    let mut min_cost: Option<f64> = None;
    let mut fingers = BTreeSet::new();
    let mut points = 0;
    for p in &v.points {
        if (p.position - center).norm() <= radius {
            points += 1;
            fingers.insert(p.finger);
            min_cost = Some(min_cost.map_or(p.cost, |c| c.min(p.cost)));
        }
    }
    Ok(Reachability {
        reachable: points > 0,
        min_cost,
        fingers: fingers.into_iter().collect(),
        points,
    })
}
