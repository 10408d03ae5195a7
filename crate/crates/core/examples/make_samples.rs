//! Regenerates the bundled sample scenes.
//!
//!     cargo run -p gravkit --example make_samples -- samples

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gravkit::fixtures::{box_mesh, cylinder_x, plane_mesh, uv_sphere};
use gravkit::{Handedness, HandModel, JointId, TriangleMesh, Vec3};
use serde_json::{json, Value};

fn write_obj(path: &Path, mesh: &TriangleMesh) {
    let mut s = format!("# {}\n", mesh.name().unwrap_or("mesh"));
    for v in mesh.vertices() {
        writeln!(s, "v {:.6} {:.6} {:.6}", v.x, v.y, v.z).unwrap();
    }
    for t in mesh.triangles() {
        writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    std::fs::write(path, s).unwrap();
}

fn joints(hand: &HandModel) -> Value {
    let map: BTreeMap<String, [f64; 3]> = JointId::ALL
        .iter()
        .map(|&j| {
            let p = hand.position(j);
            (j.name().to_string(), [p.x, p.y, p.z])
        })
        .collect();
    json!(map)
}

fn write_json(path: &Path, v: &Value) {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    std::fs::write(path, s).unwrap();
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "samples".into()));
    std::fs::create_dir_all(&dir).unwrap();
    let origin = Vec3::zeros();

    write_obj(&dir.join("screwdriver.obj"), &cylinder_x(origin, 12.0, 150.0, 32));
    write_obj(&dir.join("box.obj"), &box_mesh(Vec3::new(-40.0, -16.0, -45.0), Vec3::new(40.0, 16.0, 45.0)));
    write_obj(&dir.join("sphere.obj"), &uv_sphere(origin, 35.0, 24, 48));
    write_obj(&dir.join("plane.obj"), &plane_mesh(origin, 150.0));

    let right = HandModel::canonical_right();

    write_json(
        &dir.join("screwdriver_grasp17.json"),
        &json!({
            "schema_version": 1,
            "labels": { "object_name": "screwdriver", "grasp_id": 17 },
            "hand": { "handedness": "right", "thickness_mm": 22.0, "joints": joints(&right) },
            "object": {
                "mesh": "screwdriver.obj",
                "transform": { "translation": [0.0, -24.5, 125.0], "rotation_deg": [0.0, 0.0, 0.0], "scale": 1.0 }
            },
            "fingers": ["thumb", "index", "middle"],
            "blockers": [
                { "mode": "exclude_points", "shape": { "sphere": { "center": [75.0, -24.5, 125.0], "radius_mm": 15.0 } } }
            ],
            "settings": { "step_deg": 5.0, "epsilon_mm": 0.5 }
        }),
    );

    write_json(
        &dir.join("box_grasp03.json"),
        &json!({
            "schema_version": 1,
            "labels": { "object_name": "box", "grasp_id": 3 },
            "hand": { "handedness": "right", "measurements": { "breadth_mm": 80.0, "palm_length_mm": 95.0 } },
            "object": {
                "mesh": "box.obj",
                "transform": { "translation": [0.0, -29.0, 105.0] }
            },
            "fingers": ["index", "middle", "ring"],
            "blockers": [
                { "mode": "block_motion", "shape": { "box": { "min": [-60.0, 25.0, 110.0], "max": [60.0, 60.0, 200.0] } } }
            ],
            "settings": { "dedupe_mm": 1.0 }
        }),
    );

    write_json(
        &dir.join("sphere_grasp11.json"),
        &json!({
            "schema_version": 1,
            "labels": { "object_name": "sphere", "grasp_id": 11 },
            "hand": { "handedness": "right", "thickness_mm": 22.0, "joints": joints(&right) },
            "object": {
                "mesh": "sphere.obj",
                "transform": { "translation": [0.0, -47.0, 125.0] }
            },
            "fingers": ["thumb", "index"],
            "settings": { "step_deg": 5.0 }
        }),
    );

    write_json(
        &dir.join("plane_grasp02.json"),
        &json!({
            "schema_version": 1,
            "labels": { "object_name": "plane", "grasp_id": 2 },
            "hand": { "handedness": "right", "measurements": {} },
            "object": {
                "mesh": "plane.obj",
                "transform": { "translation": [0.0, -14.0, 100.0] }
            },
            "fingers": ["index", "little"],
            "settings": { "step_deg": 5.0 }
        }),
    );

    let left = HandModel::canonical_right().mirror();
    assert_eq!(left.handedness(), Handedness::Left);
    write_json(
        &dir.join("freehand_grasp01.json"),
        &json!({
            "schema_version": 1,
            "labels": { "object_name": "freehand", "grasp_id": 1 },
            "hand": { "handedness": "left", "thickness_mm": 20.0, "measurements": {} },
            "rom": [
                { "joint": "index_mcp", "axis": "x", "min_deg": -20.0, "max_deg": 70.0 },
                { "joint": "index_mcp", "axis": "y", "min_deg": -15.0, "max_deg": 15.0 },
                { "joint": "index_pip", "axis": "x", "min_deg": -10.0, "max_deg": 90.0 },
                { "joint": "index_dip", "axis": "x", "min_deg": 0.0, "max_deg": 70.0 },
                { "joint": "thumb_ip", "axis": "x", "min_deg": -15.0, "max_deg": 70.0 }
            ],
            "fingers": ["thumb", "index"],
            "settings": { "step_deg": 5.0 }
        }),
    );

    write_json(
        &dir.join("manifest.json"),
        &json!({
            "output_dir": "out",
            "formats": ["csv", "ply"],
            "jobs": [
                { "scene": "screwdriver_grasp17.json" },
                { "scene": "sphere_grasp11.json" },
                { "scene": "plane_grasp02.json" },
                { "scene": "freehand_grasp01.json" },
                { "object": "box", "grasp_id": 3 }
            ]
        }),
    );
    println!("wrote samples to {}", dir.display());
}
