//! OBJ point export: one `v x y z` line per point, volume order. OBJ has no
//! per-vertex scalar, so cost, finger and configuration are dropped.

use super::{fmt6, Frame};
use crate::simulator::GravVolume;

pub fn export(volume: &GravVolume) -> Vec<u8> {
    export_in(volume, Frame::RightHanded)
}

pub fn export_in(volume: &GravVolume, frame: Frame) -> Vec<u8> {
    let mut out = String::with_capacity(40 * volume.len());
    for p in &volume.points {
        let v = frame.apply(&p.position);
        out.push_str(&format!("v {} {} {}\n", fmt6(v.x), fmt6(v.y), fmt6(v.z)));
    }
    out.into_bytes()
}

/// Counts `v` lines; enough to check an export against its volume.
pub fn count_vertices(bytes: &[u8]) -> usize {
    bytes
        .split(|&b| b == b'\n')
        .filter(|l| l.starts_with(b"v "))
        .count()
}
