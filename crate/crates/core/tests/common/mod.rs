#![allow(dead_code)]

use std::path::{Path, PathBuf};

use delay_repair::harness::{random_grid_map, random_scenario};
use delay_repair::io::{render_map, render_scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Writes a seeded grid map and scenario into `dir`, returning their paths.
pub fn write_grid_instance(dir: &Path, size: usize, agents: usize, seed: u64) -> (PathBuf, PathBuf) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = random_grid_map(size, size, 0.1, &mut rng);
    let map_path = dir.join("grid.map");
    std::fs::write(&map_path, render_map(&map)).unwrap();
    let scen = random_scenario(&map, "grid.map", agents, &mut rng);
    let scen_path = dir.join("grid.scen");
    std::fs::write(&scen_path, render_scenario(&scen)).unwrap();
    (map_path, scen_path)
}
