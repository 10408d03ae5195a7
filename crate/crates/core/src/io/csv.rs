//! CSV volume format.
//!
//! ```text
//! finger,x_mm,y_mm,z_mm,cost_deg,config
//! index,1.000000,2.000000,3.000000,0.000000,0;0;0;0
//! ```
//!
//! Six decimals, `.` separator, LF line endings, rows in volume order.

use super::{fmt6, FormatError, Frame};
use crate::hand::{FingerConfiguration, FingerId};
use crate::simulator::{GravPoint, GravVolume};
use crate::Vec3;

pub const HEADER: &str = "finger,x_mm,y_mm,z_mm,cost_deg,config";

pub fn export(volume: &GravVolume) -> Vec<u8> {
    export_in(volume, Frame::RightHanded)
}

pub fn export_in(volume: &GravVolume, frame: Frame) -> Vec<u8> {
    let mut out = String::with_capacity(64 * (volume.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for p in &volume.points {
        let v = frame.apply(&p.position);
        out.push_str(p.finger.name());
        for c in [v.x, v.y, v.z, p.cost] {
            out.push(',');
            out.push_str(&fmt6(c));
        }
        out.push(',');
        out.push_str(&p.config.to_string());
        out.push('\n');
    }
    out.into_bytes()
}

pub fn import(bytes: &[u8]) -> Result<GravVolume, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::Malformed {
        line: 1,
        message: format!("not UTF-8: {e}"),
    })?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        Some((_, h)) => {
            return Err(FormatError::Malformed {
                line: 1,
                message: format!("expected header `{HEADER}`, found `{h}`"),
            })
        }
        None => {
            return Err(FormatError::Malformed {
                line: 1,
                message: "empty file".into(),
            })
        }
    }

    let mut points = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| FormatError::Malformed {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(format!("expected 6 fields, found {}", fields.len())));
        }
        let finger: FingerId = fields[0].parse().map_err(bad)?;
        let mut nums = [0.0; 4];
        for (k, f) in fields[1..5].iter().enumerate() {
            nums[k] = f
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("bad number `{f}`")))?;
        }
        let config = if fields[5].is_empty() {
            Vec::new()
        } else {
            fields[5]
                .split(';')
                .map(|s| s.parse::<i32>().map_err(|_| bad(format!("bad config offset `{s}`"))))
                .collect::<Result<_, _>>()?
        };
        points.push(GravPoint {
            position: Vec3::new(nums[0], nums[1], nums[2]),
            cost: nums[3],
            finger,
            config: FingerConfiguration(config),
        });
    }
    Ok(GravVolume::new(points))
}
