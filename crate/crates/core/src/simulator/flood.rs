use std::collections::HashSet;

use super::{FingerContext, GravPoint, SimulationError, Verdict};
use crate::hand::{FingerConfiguration, FingerId};
use crate::io::scene::GraspScene;

pub struct FloodResult {
    pub points: Vec<GravPoint>,
    /// Grid nodes whose validity was evaluated, including invalid ones.
    pub tested: u64,
}

/// Breadth-first flood fill from the grasp pose.
///
/// Each layer holds the configurations first discovered at that BFS depth,
/// sorted lexicographically, so the output order does not depend on the
/// order in which neighbors are generated or validated.
pub fn flood_fill(scene: &GraspScene, finger: FingerId) -> Result<FloodResult, SimulationError> {
    scene.settings.validate()?;
    let ctx = FingerContext::new(scene, finger);
    let step = scene.settings.step_deg;
    let cap = scene.settings.max_configurations;

    let seed = ctx.chain.seed();
    let seed_pose = ctx.pose(&seed);
    let verdict = ctx.verdict_for_pose(&seed_pose);
    if !verdict.is_valid() {
        return Err(SimulationError::InvalidSeed { finger, verdict });
    }

    let radix: Vec<u128> = ctx.bounds.iter().map(|(lo, hi)| (hi - lo + 1) as u128).collect();
    let key = |c: &FingerConfiguration| {
        c.0.iter()
            .zip(&ctx.bounds)
            .zip(&radix)
            .fold(0u128, |acc, ((&o, &(lo, _)), &r)| acc * r + (o - lo) as u128)
    };

    let mut visited: HashSet<u128> = HashSet::new();
    visited.insert(key(&seed));
    let mut points = vec![GravPoint {
        position: seed_pose.tip(),
        cost: 0.0,
        finger,
        config: seed.clone(),
    }];
    let mut layer = vec![seed];

    while !layer.is_empty() {
        let mut candidates = Vec::new();
        for config in &layer {
            for axis in 0..config.0.len() {
                let (lo, hi) = ctx.bounds[axis];
                for delta in [-1, 1] {
                    let v = config.0[axis] + delta;
                    if v < lo || v > hi {
                        continue;
                    }
                    let mut next = config.clone();
                    next.0[axis] = v;
                    if visited.insert(key(&next)) {
                        candidates.push(next);
                    }
                }
            }
        }
        if visited.len() as u64 > cap {
            return Err(SimulationError::ConfigurationCap { finger, cap });
        }
        candidates.sort_unstable();

        let judge = |c: &FingerConfiguration| {
            let pose = ctx.pose(c);
            (ctx.verdict_for_pose(&pose), pose.tip())
        };
        #[cfg(feature = "parallel")]
        let judged: Vec<_> = {
            use rayon::prelude::*;
            candidates.par_iter().map(judge).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let judged: Vec<_> = candidates.iter().map(judge).collect();

        layer = Vec::new();
        for (config, (verdict, tip)) in candidates.into_iter().zip(judged) {
            if verdict == Verdict::Valid {
                points.push(GravPoint {
                    position: tip,
                    cost: GravPoint::cost_for(&config, step),
                    finger,
                    config: config.clone(),
                });
                layer.push(config);
            }
        }
    }

    Ok(FloodResult {
        points,
        tested: visited.len() as u64,
    })
}
