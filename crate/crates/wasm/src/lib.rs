//! Browser demo: a canonical right hand above a ball, simulated in page.
//!
//! Build with `wasm-pack build crates/wasm --target web --out-dir www/pkg`
//! and serve `crates/wasm/www/`.

use gravkit::fixtures::uv_sphere;
use gravkit::io::ply::cost_color;
use gravkit::io::scene::SceneLabels;
use gravkit::volume::{motion_boundary, query_reachable};
use gravkit::{
    simulate, FingerId, GraspScene, GravVolume, HandModel, JointId, SimulationSettings, Vec3,
};
use wasm_bindgen::prelude::*;

const BALL_RADIUS_MM: f64 = 30.0;

#[wasm_bindgen]
pub struct Demo {
    hand: HandModel,
    volume: GravVolume,
    shown: Vec<usize>,
    ball_center: Vec3,
    error: Option<String>,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Demo {
        let mut demo = Demo {
            hand: HandModel::canonical_right(),
            volume: GravVolume::default(),
            shown: Vec::new(),
            ball_center: Vec3::zeros(),
            error: None,
        };
        demo.simulate(10.0, 2.0, "thumb,index,middle");
        demo
    }

    /// Re-runs the simulation. `gap_mm` is the clearance between the ball
    /// and the flat fingers. Returns the point count.
    pub fn simulate(&mut self, step_deg: f64, gap_mm: f64, fingers: &str) -> usize {
        let fingers: Vec<FingerId> = fingers
            .split(',')
            .filter_map(|f| f.trim().parse().ok())
            .collect();
        let r = self.hand.segment_radius();
        self.ball_center = Vec3::new(0.0, -(r + BALL_RADIUS_MM + gap_mm.max(0.0)), 125.0);
        let result = GraspScene::new(
            self.hand.clone(),
            Some(uv_sphere(self.ball_center, BALL_RADIUS_MM, 16, 32)),
            vec![],
            SimulationSettings {
                step_deg,
                fingers,
                ..SimulationSettings::default()
            },
            SceneLabels {
                object_name: Some("ball".into()),
                grasp_id: None,
            },
        )
        .map_err(|e| e.to_string())
        .and_then(|scene| simulate(&scene).map_err(|e| e.to_string()));
        match result {
            Ok(v) => {
                self.error = v.metadata.warnings.first().cloned();
                self.volume = v;
            }
            Err(e) => {
                self.error = Some(e);
                self.volume = GravVolume::default();
            }
        }
        self.shown = (0..self.volume.len()).collect();
        self.volume.len()
    }

    /// Restricts the displayed points to the voxel-shell boundary; a voxel
    /// of 0 shows everything again. Returns the displayed count.
    pub fn show_boundary(&mut self, voxel_mm: f64) -> usize {
        self.shown = if voxel_mm > 0.0 && !self.volume.is_empty() {
            let keep = motion_boundary(&self.volume, voxel_mm).unwrap_or_default();
            let mut it = keep.iter().peekable();
            (0..self.volume.len())
                .filter(|&i| {
                    if it.peek().is_some_and(|p| **p == self.volume.points[i]) {
                        it.next();
                        true
                    } else {
                        false
                    }
                })
                .collect()
        } else {
            (0..self.volume.len()).collect()
        };
        self.shown.len()
    }

    /// Displayed points as flat `x, y, z` triples.
    pub fn positions(&self) -> Vec<f32> {
        self.shown
            .iter()
            .flat_map(|&i| {
                let p = self.volume.points[i].position;
                [p.x as f32, p.y as f32, p.z as f32]
            })
            .collect()
    }

    /// Displayed points' cost colors as flat `r, g, b` bytes.
    pub fn colors(&self) -> Vec<u8> {
        let max = self.volume.max_cost();
        self.shown
            .iter()
            .flat_map(|&i| cost_color(self.volume.points[i].cost, max))
            .collect()
    }

    pub fn max_cost(&self) -> f64 {
        self.volume.max_cost()
    }

    pub fn point_count(&self) -> usize {
        self.volume.len()
    }

    pub fn error(&self) -> Option<String> {
        self.error.clone()
    }

    /// Bone segments of the rest hand as flat `x0, y0, z0, x1, y1, z1`.
    pub fn skeleton(&self) -> Vec<f32> {
        let mut out = Vec::new();
        for j in JointId::ALL {
            if let Some(parent) = j.parent() {
                for p in [self.hand.position(parent), self.hand.position(j)] {
                    out.extend([p.x as f32, p.y as f32, p.z as f32]);
                }
            }
        }
        out
    }

    pub fn ball(&self) -> Vec<f32> {
        let c = self.ball_center;
        vec![c.x as f32, c.y as f32, c.z as f32, BALL_RADIUS_MM as f32]
    }

    /// Reachability of a probe sphere as JSON.
    pub fn query(&self, x: f64, y: f64, z: f64, radius: f64) -> String {
        match query_reachable(&self.volume, &Vec3::new(x, y, z), radius) {
            Ok(r) => serde_json::to_string(&r).expect("reachability serializes"),
            Err(e) => serde_json::json!({ "error": e.to_string() }).to_string(),
        }
    }
}

impl Default for Demo {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_demo_has_points_and_colors() {
        let d = Demo::new();
        assert!(d.error().is_none(), "{:?}", d.error());
        let n = d.point_count();
        assert!(n > 100);
        assert_eq!(d.positions().len(), 3 * n);
        assert_eq!(d.colors().len(), 3 * n);
        assert_eq!(d.skeleton().len(), 20 * 6);
    }

    #[test]
    fn boundary_shrinks_and_resets() {
        let mut d = Demo::new();
        let all = d.point_count();
        let shell = d.show_boundary(6.0);
        assert!(shell > 0 && shell <= all);
        assert_eq!(d.show_boundary(0.0), all);
    }

    #[test]
    fn query_matches_seed_point() {
        let d = Demo::new();
        let tip = HandModel::canonical_right().position(JointId::IndexTip);
        let r: serde_json::Value = serde_json::from_str(&d.query(tip.x, tip.y, tip.z, 0.0)).unwrap();
        assert_eq!(r["reachable"], true);
        assert_eq!(r["min_cost"], 0.0);
        let far: serde_json::Value = serde_json::from_str(&d.query(0.0, 500.0, 0.0, 1.0)).unwrap();
        assert_eq!(far["reachable"], false);
    }

    #[test]
    fn coarser_step_gives_fewer_points() {
        let mut d = Demo::new();
        let fine = d.simulate(10.0, 2.0, "index");
        let coarse = d.simulate(20.0, 2.0, "index");
        assert!(coarse < fine);
        assert_eq!(d.simulate(10.0, 2.0, "nobody"), 0);
        assert!(d.error().is_some());
    }
}
