use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::*;
use crate::fixtures::{arc_clip_plane, arc_scene, arc_tip, box_mesh, plane_mesh};
use crate::geometry::{Blocker, BlockerMode, BlockerShape};
use crate::hand::{Axis, HandModel, JointId, RomEntry, RomSpec};
use crate::io::scene::{rotation_from_degrees, GraspScene, SceneLabels};
use crate::geometry::TriangleMesh;

fn every_config(bounds: &[(i32, i32)]) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in bounds {
        out = out
            .into_iter()
            .flat_map(|c| {
                (lo..=hi).map(move |v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    out
}

/// Valid grid nodes, and the seed's component among them.
fn oracle(scene: &GraspScene, finger: FingerId) -> (BTreeSet<Vec<i32>>, BTreeSet<Vec<i32>>) {
    let bounds = scene.hand.chain(finger).bounds(scene.settings.step_deg);
    let valid: HashSet<Vec<i32>> = every_config(&bounds)
        .into_iter()
        .filter(|c| validate_configuration(scene, finger, &FingerConfiguration(c.clone())).is_valid())
        .collect();
    let seed = vec![0; bounds.len()];
    let mut seen = BTreeSet::new();
    if valid.contains(&seed) {
        let mut queue = VecDeque::from([seed.clone()]);
        seen.insert(seed);
        while let Some(c) = queue.pop_front() {
            for k in 0..c.len() {
                for d in [-1, 1] {
                    let mut n = c.clone();
                    n[k] += d;
                    if valid.contains(&n) && seen.insert(n.clone()) {
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    (valid.into_iter().collect(), seen)
}

fn config_set(points: &[GravPoint]) -> BTreeSet<Vec<i32>> {
    points.iter().map(|p| p.config.0.clone()).collect()
}

fn scene_with(rom: Vec<RomEntry>, fingers: Vec<FingerId>, object: Option<TriangleMesh>, blockers: Vec<Blocker>) -> GraspScene {
    let hand = HandModel::canonical_right()
        .with_rom(RomSpec::new(rom).unwrap())
        .unwrap();
    GraspScene::new(
        hand,
        object,
        blockers,
        SimulationSettings {
            fingers,
            ..SimulationSettings::default()
        },
        SceneLabels::default(),
    )
    .unwrap()
}

#[test]
fn arc_has_nineteen_points_on_closed_form() {
    let points = simulate_finger(&arc_scene(90.0, None, vec![]), FingerId::Index).unwrap();
    assert_eq!(points.len(), 19);
    for (k, p) in points.iter().enumerate() {
        assert_eq!(p.config.0, vec![0, 0, 0, k as i32]);
        assert_eq!(p.cost, 5.0 * k as f64);
        assert!((p.position - arc_tip(5.0 * k as f64)).norm() < 1e-6, "k={k}");
    }
}

#[test]
fn locked_rom_yields_seed_only() {
    let hand = HandModel::canonical_right().with_rom(RomSpec::locked()).unwrap();
    let scene = GraspScene::new(hand.clone(), None, vec![], SimulationSettings::default(), SceneLabels::default()).unwrap();
    let v = simulate(&scene).unwrap();
    assert_eq!(v.len(), 5);
    for (p, f) in v.points.iter().zip(FingerId::ALL) {
        assert_eq!(p.finger, f);
        assert_eq!(p.cost, 0.0);
        assert_eq!(p.position, hand.position(f.chain()[3]));
    }
}

#[test]
fn every_default_seed_is_valid() {
    let scene = GraspScene::new(
        HandModel::canonical_right(),
        None,
        vec![],
        SimulationSettings::default(),
        SceneLabels::default(),
    )
    .unwrap();
    for f in FingerId::ALL {
        let seed = scene.hand.chain(f).seed();
        assert_eq!(validate_configuration(&scene, f, &seed), Verdict::Valid, "{f}");
    }
}

#[test]
fn plane_clips_arc_after_nine_steps() {
    let scene = arc_scene(90.0, Some(arc_clip_plane(45.0)), vec![]);
    let points = simulate_finger(&scene, FingerId::Index).unwrap();
    let offsets: Vec<i32> = points.iter().map(|p| p.config.0[3]).collect();
    assert_eq!(offsets, (0..=9).collect::<Vec<_>>());
    assert!(matches!(
        validate_configuration(&scene, FingerId::Index, &FingerConfiguration(vec![0, 0, 0, 10])),
        Verdict::ObjectCollision(_)
    ));
}

/// Wall standing in the index's abduction sweep, 30 degrees out.
fn abduction_wall() -> TriangleMesh {
    let mcp = HandModel::canonical_right().position(JointId::IndexMcp);
    box_mesh(Vec3::new(-1.0, -30.0, 35.0), Vec3::new(1.0, 30.0, 120.0))
        .transformed(&rotation_from_degrees([0.0, 30.0, 0.0]), &mcp, 1.0)
}

#[test]
fn split_grid_matches_oracle() {
    let scene = scene_with(
        vec![
            RomEntry::new(JointId::IndexMcp, Axis::Y, -20.0, 90.0),
            RomEntry::new(JointId::IndexDip, Axis::X, 0.0, 90.0),
        ],
        vec![FingerId::Index],
        Some(abduction_wall()),
        vec![],
    );
    assert_eq!(scene.hand.chain(FingerId::Index).grid_size(5.0), 23 * 19);
    let (valid, component) = oracle(&scene, FingerId::Index);
    let got = config_set(&simulate_finger(&scene, FingerId::Index).unwrap());
    assert_eq!(got, component);
    assert!(component.len() < valid.len(), "wall should strand valid configurations");
}

#[test]
fn two_axis_plane_matches_oracle() {
    let scene = scene_with(
        vec![
            RomEntry::new(JointId::IndexMcp, Axis::Y, -60.0, 60.0),
            RomEntry::new(JointId::IndexDip, Axis::X, 0.0, 90.0),
        ],
        vec![FingerId::Index],
        Some(arc_clip_plane(45.0)),
        vec![],
    );
    assert_eq!(scene.hand.chain(FingerId::Index).grid_size(5.0), 25 * 19);
    let (_, component) = oracle(&scene, FingerId::Index);
    let got = config_set(&simulate_finger(&scene, FingerId::Index).unwrap());
    assert_eq!(got, component);
    assert!(got.iter().any(|c| c[1] == 0 && c[3] == 9));
    assert!(!got.iter().any(|c| c[1] == 0 && c[3] == 10));
}

#[test]
fn curled_finger_hits_its_own_hand() {
    let scene = scene_with(
        vec![
            RomEntry::new(JointId::IndexMcp, Axis::X, 0.0, 90.0),
            RomEntry::new(JointId::IndexPip, Axis::X, 0.0, 110.0),
            RomEntry::new(JointId::IndexDip, Axis::X, 0.0, 90.0),
        ],
        vec![FingerId::Index],
        None,
        vec![],
    );
    let step = 10.0;
    let scene = scene
        .with_settings(SimulationSettings {
            step_deg: step,
            ..scene.settings.clone()
        })
        .unwrap();
    let (valid, component) = oracle(&scene, FingerId::Index);
    let got = config_set(&simulate_finger(&scene, FingerId::Index).unwrap());
    assert_eq!(got, component);
    let grid = scene.hand.chain(FingerId::Index).grid_size(step) as usize;
    assert!(valid.len() < grid);
    assert!(matches!(
        validate_configuration(&scene, FingerId::Index, &FingerConfiguration(vec![0, 0, 11, 9])),
        Verdict::HandCollision(_)
    ));
}

#[test]
fn block_motion_blocker_truncates_and_exclude_filters() {
    let center = arc_tip(60.0);
    let sphere = |mode| {
        Blocker::new(
            BlockerShape::Sphere {
                center: center + Vec3::new(0.0, -12.0, 0.0),
                radius: 4.0,
            },
            mode,
        )
    };
    let scene = arc_scene(90.0, None, vec![sphere(BlockerMode::BlockMotion)]);
    let (_, component) = oracle(&scene, FingerId::Index);
    let got = simulate_finger(&scene, FingerId::Index).unwrap();
    assert_eq!(config_set(&got), component);
    assert!(got.len() < 19);

    let scene = arc_scene(90.0, None, vec![sphere(BlockerMode::ExcludePoints)]);
    assert_eq!(simulate_finger(&scene, FingerId::Index).unwrap().len(), 19);
}

#[test]
fn validate_configuration_cases() {
    let dip = HandModel::canonical_right().position(JointId::IndexDip);
    let floor = plane_mesh(dip - Vec3::new(0.0, 29.0, 0.0), 200.0);
    let scene = arc_scene(90.0, Some(floor), vec![]);
    let f = FingerId::Index;
    assert_eq!(validate_configuration(&scene, f, &FingerConfiguration(vec![0, 0, 0, 0])), Verdict::Valid);
    assert_eq!(validate_configuration(&scene, f, &FingerConfiguration(vec![0, 0, 0, 19])), Verdict::OutOfRom);
    assert_eq!(validate_configuration(&scene, f, &FingerConfiguration(vec![0, 1, 0, 0])), Verdict::OutOfRom);
    assert_eq!(validate_configuration(&scene, f, &FingerConfiguration(vec![0, 0])), Verdict::OutOfRom);
    match validate_configuration(&scene, f, &FingerConfiguration(vec![0, 0, 0, 18])) {
        Verdict::ObjectCollision(d) => assert!((d - 2.0).abs() < 1e-9, "{d}"),
        v => panic!("{v:?}"),
    }
}

#[test]
fn union_of_one_and_disjoint_union() {
    let mut scene = arc_scene(90.0, None, vec![]);
    let v = simulate(&scene).unwrap();
    assert_eq!(v.points, simulate_finger(&scene, FingerId::Index).unwrap());

    let mut rom = scene.hand.rom().clone();
    rom.set(RomEntry::new(JointId::ThumbIp, Axis::X, 0.0, 30.0));
    scene.hand = scene.hand.with_rom(rom).unwrap();
    scene.settings.fingers = vec![FingerId::Index, FingerId::Thumb];
    let v = simulate(&scene).unwrap();
    assert_eq!(v.len(), 19 + 7);
    assert_eq!(v.fingers(), vec![FingerId::Thumb, FingerId::Index]);
}

#[test]
fn dedupe_keeps_cheapest() {
    let p = |x: f64, cost: f64, finger| GravPoint {
        position: Vec3::new(x, 0.2, 0.2),
        cost,
        finger,
        config: FingerConfiguration(vec![cost as i32]),
    };
    let v = GravVolume::new(vec![p(0.7, 25.0, FingerId::Index), p(0.2, 10.0, FingerId::Index), p(5.0, 0.0, FingerId::Ring)]);
    let d = dedupe(v, 2.0);
    assert_eq!(d.len(), 2);
    assert_eq!(d.points[0].cost, 10.0);
    assert_eq!(d.points[1].finger, FingerId::Ring);
    assert_eq!(d.metadata.deduplicated_points, 1);

    let tie = GravVolume::new(vec![p(0.7, 5.0, FingerId::Ring), p(0.2, 5.0, FingerId::Index)]);
    assert_eq!(dedupe(tie, 2.0).points[0].finger, FingerId::Index);
}

fn coarse_default_scene() -> GraspScene {
    let object = crate::fixtures::uv_sphere(Vec3::new(0.0, -45.0, 130.0), 25.0, 12, 24);
    GraspScene::new(
        HandModel::canonical_right(),
        Some(object),
        vec![],
        SimulationSettings {
            step_deg: 15.0,
            ..SimulationSettings::default()
        },
        SceneLabels::default(),
    )
    .unwrap()
}

#[test]
fn emitted_points_obey_cost_law_validity_and_reach() {
    let scene = coarse_default_scene();
    let v = simulate(&scene).unwrap();
    assert!(v.metadata.warnings.is_empty(), "{:?}", v.metadata.warnings);
    for p in &v.points {
        let l1: i64 = p.config.0.iter().map(|&o| (o as i64).abs()).sum();
        assert_eq!(p.cost, 15.0 * l1 as f64);
        assert_eq!(validate_configuration(&scene, p.finger, &p.config), Verdict::Valid);
        let chain = scene.hand.chain(p.finger);
        let rest = chain.rest();
        let reach: f64 = (0..3).map(|i| (rest[i + 1] - rest[i]).norm()).sum::<f64>() + scene.hand.thickness() / 2.0;
        assert!((p.position - rest[0]).norm() <= reach + 1e-9);
    }
}

#[test]
fn enlarging_rom_only_adds_points() {
    let small = arc_scene(45.0, Some(arc_clip_plane(60.0)), vec![]);
    let large = arc_scene(90.0, Some(arc_clip_plane(60.0)), vec![]);
    let a = config_set(&simulate_finger(&small, FingerId::Index).unwrap());
    let b = config_set(&simulate_finger(&large, FingerId::Index).unwrap());
    assert!(a.is_subset(&b) && a.len() < b.len());
}

fn keyed(v: &GravVolume) -> BTreeMap<(FingerId, Vec<i32>), (Vec3, f64)> {
    v.points
        .iter()
        .map(|p| ((p.finger, p.config.0.clone()), (p.position, p.cost)))
        .collect()
}

#[test]
fn scaled_scene_scales_positions_only() {
    let scene = coarse_default_scene();
    let base = keyed(&simulate(&scene).unwrap());
    for s in [0.5, 2.0] {
        let scaled = keyed(&simulate(&scene.scaled(s).unwrap()).unwrap());
        assert_eq!(scaled.len(), base.len());
        for (k, (p, c)) in &base {
            let (q, d) = scaled[k];
            assert_eq!(*c, d);
            assert!((q - p * s).norm() <= 1e-6 * (p * s).norm().max(1.0));
        }
    }
}

#[test]
fn mirrored_scene_mirrors_points() {
    let scene = coarse_default_scene();
    let base = simulate(&scene).unwrap();
    let mirrored = keyed(&simulate(&scene.mirrored()).unwrap());
    assert_eq!(mirrored.len(), base.len());
    for p in &base.points {
        let chain = scene.hand.chain(p.finger);
        let cfg: Vec<i32> = p
            .config
            .0
            .iter()
            .zip(chain.axes())
            .map(|(&o, a)| if a.axis == Axis::Y { -o } else { o })
            .collect();
        let (q, c) = mirrored[&(p.finger, cfg)];
        assert_eq!(c, p.cost);
        let want = Vec3::new(-p.position.x, p.position.y, p.position.z);
        assert!((q - want).norm() <= 1e-6 * want.norm().max(1.0));
    }
}

#[test]
fn runs_are_deterministic() {
    let scene = coarse_default_scene();
    let a = simulate(&scene).unwrap();
    let b = simulate(&scene).unwrap();
    assert_eq!(crate::io::csv::export(&a), crate::io::csv::export(&b));
    assert_eq!(a.metadata, b.metadata);
}

#[test]
fn configuration_cap_is_per_finger() {
    let mut scene = arc_scene(90.0, None, vec![]);
    scene.settings.max_configurations = 3;
    assert_eq!(
        simulate_finger(&scene, FingerId::Index),
        Err(SimulationError::ConfigurationCap {
            finger: FingerId::Index,
            cap: 3
        })
    );
    let v = simulate(&scene).unwrap();
    assert!(v.is_empty() && v.all_seeds_invalid());
    assert_eq!(v.metadata.warnings.len(), 1);
}

#[test]
fn invalid_seed_is_reported_not_fatal() {
    let dip = HandModel::canonical_right().position(JointId::IndexDip);
    let through = plane_mesh(Vec3::new(30.0, 0.0, dip.z), 20.0);
    let mut scene = arc_scene(90.0, Some(through), vec![]);
    scene.settings.fingers = vec![FingerId::Index, FingerId::Little];
    let v = simulate(&scene).unwrap();
    assert_eq!(v.fingers(), vec![FingerId::Little]);
    assert!(!v.all_seeds_invalid());
    let index = &v.metadata.per_finger[0];
    assert_eq!(index.finger, FingerId::Index);
    assert!(index.error.as_deref().unwrap().contains("grasp pose"));
    assert!(matches!(
        simulate_finger(&scene, FingerId::Index),
        Err(SimulationError::InvalidSeed { verdict: Verdict::ObjectCollision(_), .. })
    ));
}

#[test]
fn no_fingers_is_an_error() {
    let mut scene = arc_scene(90.0, None, vec![]);
    scene.settings.fingers.clear();
    assert_eq!(simulate(&scene), Err(SimulationError::NoFingersEnabled));
}

#[test]
fn metadata_carries_labels() {
    let v = simulate(&arc_scene(90.0, None, vec![])).unwrap();
    assert_eq!(v.metadata.label.as_deref(), Some("arc"));
    assert_eq!(v.metadata.per_finger[0].points, 19);
    assert!(v.metadata.scene_hash.is_some());
}
