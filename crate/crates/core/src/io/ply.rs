//! ASCII PLY export, colored by cost.
//!
//! Color ramps linearly from green `(0, 255, 0)` at cost 0 to red
//! `(255, 0, 0)` at the volume's maximum cost. Red is rounded half up and
//! green is its complement, so every vertex has `red + green = 255`.

use super::{fmt6, FormatError, Frame};
use crate::simulator::GravVolume;
use crate::Vec3;

pub fn cost_color(cost: f64, max_cost: f64) -> [u8; 3] {
    if !(max_cost > 0.0) {
        return [0, 255, 0];
    }
    let t = (cost / max_cost).clamp(0.0, 1.0);
    let red = (255.0 * t + 0.5).floor() as u8;
    [red, 255 - red, 0]
}

pub fn export(volume: &GravVolume) -> Vec<u8> {
    export_in(volume, Frame::RightHanded)
}

pub fn export_in(volume: &GravVolume, frame: Frame) -> Vec<u8> {
    let frame_name = match frame {
        Frame::RightHanded => "right_handed (+X right, +Y up, +Z forward)",
        Frame::LeftHanded => "left_handed (X negated)",
    };
    let mut out = format!(
        "ply\nformat ascii 1.0\ncomment gravkit grasp interaction volume\ncomment frame {frame_name}, units mm, cost in degrees\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nproperty float cost\nend_header\n",
        volume.len()
    );
    let max = volume.max_cost();
    for p in &volume.points {
        let v = frame.apply(&p.position);
        let [r, g, b] = cost_color(p.cost, max);
        out.push_str(&format!(
            "{} {} {} {r} {g} {b} {}\n",
            fmt6(v.x),
            fmt6(v.y),
            fmt6(v.z),
            fmt6(p.cost)
        ));
    }
    out.into_bytes()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlyVertex {
    pub position: Vec3,
    pub color: [u8; 3],
    pub cost: f64,
}

/// Reads back the vertex list written by [`export`].
pub fn parse(bytes: &[u8]) -> Result<Vec<PlyVertex>, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::Malformed {
        line: 1,
        message: format!("not UTF-8: {e}"),
    })?;
    let mut lines = text.lines().enumerate();
    let mut count = None;
    let mut header_ok = false;
    for (i, line) in lines.by_ref() {
        if i == 0 && line != "ply" {
            return Err(FormatError::Malformed {
                line: 1,
                message: "missing `ply` magic".into(),
            });
        }
        if let Some(n) = line.strip_prefix("element vertex ") {
            count = n.trim().parse::<usize>().ok();
        }
        if line == "end_header" {
            header_ok = true;
            break;
        }
    }
    let count = match (header_ok, count) {
        (true, Some(n)) => n,
        _ => {
            return Err(FormatError::Malformed {
                line: 1,
                message: "incomplete header".into(),
            })
        }
    };
    let mut out = Vec::with_capacity(count);
    for (i, line) in lines.take(count) {
        let bad = || FormatError::Malformed {
            line: i + 1,
            message: format!("bad vertex `{line}`"),
        };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 7 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let byte = |s: &str| s.parse::<u8>().map_err(|_| bad());
        out.push(PlyVertex {
            position: Vec3::new(num(f[0])?, num(f[1])?, num(f[2])?),
            color: [byte(f[3])?, byte(f[4])?, byte(f[5])?],
            cost: num(f[6])?,
        });
    }
    if out.len() != count {
        return Err(FormatError::Malformed {
            line: text.lines().count(),
            message: format!("expected {count} vertices, found {}", out.len()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand::{FingerConfiguration, FingerId};
    use crate::simulator::GravPoint;

    #[test]
    fn ramp_endpoints_and_midpoint() {
        assert_eq!(cost_color(0.0, 90.0), [0, 255, 0]);
        assert_eq!(cost_color(90.0, 90.0), [255, 0, 0]);
        assert_eq!(cost_color(45.0, 90.0), [128, 127, 0]);
        assert_eq!(cost_color(0.0, 0.0), [0, 255, 0]);
    }

    #[test]
    fn export_parses_back() {
        let v = GravVolume::new(
            (0..3)
                .map(|k| GravPoint {
                    position: Vec3::new(k as f64, 0.5, -2.0),
                    cost: 10.0 * k as f64,
                    finger: FingerId::Middle,
                    config: FingerConfiguration(vec![k, 0, 0, 0]),
                })
                .collect(),
        );
        let bytes = export(&v);
        let verts = parse(&bytes).unwrap();
        assert_eq!(verts.len(), 3);
        assert_eq!(verts[0].color, [0, 255, 0]);
        assert_eq!(verts[1].color, [128, 127, 0]);
        assert_eq!(verts[2].color, [255, 0, 0]);
        assert_eq!(verts[2].position, Vec3::new(2.0, 0.5, -2.0));
    }

    #[test]
    fn single_point_is_green() {
        let v = GravVolume::new(vec![GravPoint {
            position: Vec3::zeros(),
            cost: 0.0,
            finger: FingerId::Thumb,
            config: FingerConfiguration(vec![0]),
        }]);
        assert_eq!(parse(&export(&v)).unwrap()[0].color, [0, 255, 0]);
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(parse(b"plx\n").is_err());
        assert!(parse(b"ply\nformat ascii 1.0\n").is_err());
    }
}
