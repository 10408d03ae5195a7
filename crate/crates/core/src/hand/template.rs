use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FingerId, HandError, Handedness, JointId};
use crate::Vec3;

/// Flat-hand template inputs.
///
/// The right-hand layout puts the wrist at the origin, the four MCPs on the
/// line `z = palm_length_mm` spaced `breadth_mm / 4` apart (index at +X,
/// little at -X) and extends every finger straight along +Z. The thumb CMC
/// sits at `(0.375 * breadth, 0, 0.2 * palm_length)` and the thumb bends
/// toward +Z inside the palm plane. A left hand is the X-mirror.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HandMeasurements {
    pub breadth_mm: f64,
    pub palm_length_mm: f64,
    /// Proximal, middle and distal lengths; for the thumb metacarpal,
    /// proximal and distal.
    pub segments: BTreeMap<FingerId, [f64; 3]>,
}

const THUMB_CMC_X: f64 = 0.375;
const THUMB_CMC_Z: f64 = 0.2;
// Directions of the three thumb segments in the XZ plane, (x, z).
const THUMB_DIRECTIONS: [(f64, f64); 3] = [(1.0, 1.0), (0.5, 1.0), (0.25, 1.0)];

impl Default for HandMeasurements {
    fn default() -> Self {
        let segments = BTreeMap::from([
            (FingerId::Thumb, [45.0, 32.0, 27.0]),
            (FingerId::Index, [43.0, 25.0, 20.0]),
            (FingerId::Middle, [48.0, 29.0, 21.0]),
            (FingerId::Ring, [45.0, 28.0, 21.0]),
            (FingerId::Little, [35.0, 20.0, 18.0]),
        ]);
        Self {
            breadth_mm: 80.0,
            palm_length_mm: 95.0,
            segments,
        }
    }
}

impl HandMeasurements {
    pub(super) fn layout(&self, handedness: Handedness) -> Result<[Vec3; JointId::COUNT], HandError> {
        for (name, v) in [("breadth", self.breadth_mm), ("palm length", self.palm_length_mm)] {
            if !v.is_finite() {
                return Err(HandError::NonFiniteInput(name.into()));
            }
            if v <= 0.0 {
                return Err(HandError::NonPositiveLength(format!("{name} {v} mm")));
            }
        }
        let mut table = [Vec3::zeros(); JointId::COUNT];
        let spacing = self.breadth_mm / 4.0;

        for finger in FingerId::ALL {
            let lengths = self.segments.get(&finger).ok_or_else(|| {
                HandError::NonPositiveLength(format!("{finger}: segment lengths missing"))
            })?;
            for (i, &l) in lengths.iter().enumerate() {
                if !l.is_finite() {
                    return Err(HandError::NonFiniteInput(format!("{finger} segment {i}")));
                }
                if l <= 0.0 {
                    return Err(HandError::NonPositiveLength(format!(
                        "{finger} segment {i}: {l} mm"
                    )));
                }
            }
            let chain = finger.chain();
            let (root, dirs) = match finger {
                FingerId::Thumb => (
                    Vec3::new(
                        THUMB_CMC_X * self.breadth_mm,
                        0.0,
                        THUMB_CMC_Z * self.palm_length_mm,
                    ),
                    THUMB_DIRECTIONS.map(|(x, z)| Vec3::new(x, 0.0, z).normalize()),
                ),
                _ => {
                    let slot = match finger {
                        FingerId::Index => 1.5,
                        FingerId::Middle => 0.5,
                        FingerId::Ring => -0.5,
                        _ => -1.5,
                    };
                    (
                        Vec3::new(slot * spacing, 0.0, self.palm_length_mm),
                        [Vec3::z(); 3],
                    )
                }
            };
            let mut p = root;
            table[chain[0].index()] = p;
            for i in 0..3 {
                p += dirs[i] * lengths[i];
                table[chain[i + 1].index()] = p;
            }
        }

        if handedness == Handedness::Left {
            for p in table.iter_mut() {
                p.x = -p.x;
            }
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand::{HandModel, RomSpec};

    #[test]
    fn index_tip_is_sum_of_segments() {
        let m = HandMeasurements::default();
        let hand = HandModel::from_measurements(&m, 20.0, RomSpec::defaults(), Handedness::Right).unwrap();
        let [l1, l2, l3] = m.segments[&FingerId::Index];
        let expected = hand.position(JointId::IndexMcp) + Vec3::new(0.0, 0.0, l1 + l2 + l3);
        assert_eq!(hand.position(JointId::IndexTip), expected);
    }

    #[test]
    fn mcp_line_spans_three_quarters_of_breadth() {
        let m = HandMeasurements {
            breadth_mm: 84.0,
            ..HandMeasurements::default()
        };
        let hand = HandModel::from_measurements(&m, 20.0, RomSpec::defaults(), Handedness::Right).unwrap();
        let d = (hand.position(JointId::IndexMcp) - hand.position(JointId::LittleMcp)).norm();
        assert!((d - 3.0 * 84.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn left_template_is_x_mirror() {
        let m = HandMeasurements::default();
        let r = HandModel::from_measurements(&m, 20.0, RomSpec::defaults(), Handedness::Right).unwrap();
        let l = HandModel::from_measurements(&m, 20.0, RomSpec::defaults(), Handedness::Left).unwrap();
        for j in JointId::ALL {
            let (a, b) = (r.position(j), l.position(j));
            assert_eq!(b, Vec3::new(-a.x, a.y, a.z), "{j}");
        }
    }

    #[test]
    fn non_positive_lengths_are_rejected() {
        let mut m = HandMeasurements::default();
        m.segments.insert(FingerId::Ring, [45.0, 0.0, 21.0]);
        assert!(matches!(
            HandModel::from_measurements(&m, 20.0, RomSpec::defaults(), Handedness::Right),
            Err(HandError::NonPositiveLength(_))
        ));
        let m = HandMeasurements {
            breadth_mm: -1.0,
            ..HandMeasurements::default()
        };
        assert!(matches!(
            HandModel::from_measurements(&m, 20.0, RomSpec::defaults(), Handedness::Right),
            Err(HandError::NonPositiveLength(_))
        ));
        assert!(matches!(
            HandModel::from_measurements(&HandMeasurements::default(), 0.0, RomSpec::defaults(), Handedness::Right),
            Err(HandError::NonPositiveLength(_))
        ));
    }
}
