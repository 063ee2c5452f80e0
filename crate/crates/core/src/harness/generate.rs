use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::io::{GridMap, ScenarioEntry};

/// A `height × width` grid with `obstacle_ratio` of its cells blocked at
/// random, reduced to its largest 4-connected open region.
pub fn random_grid_map<R: Rng + ?Sized>(
    height: usize,
    width: usize,
    obstacle_ratio: f64,
    rng: &mut R,
) -> GridMap {
    let cells = height * width;
    let blocked = ((cells as f64) * obstacle_ratio).round() as usize;
    let mut order: Vec<usize> = (0..cells).collect();
    order.shuffle(rng);
    let mut map = GridMap::open(height, width);
    for &c in order.iter().take(blocked.min(cells)) {
        map.cells[c] = false;
    }
    keep_largest_region(&mut map);
    map
}

fn keep_largest_region(map: &mut GridMap) {
    let (h, w) = (map.height, map.width);
    let mut label = vec![usize::MAX; h * w];
    let mut best = (0, usize::MAX);
    let mut next = 0;
    for start in 0..h * w {
        if !map.cells[start] || label[start] != usize::MAX {
            continue;
        }
        let mut size = 0;
        let mut queue = VecDeque::from([start]);
        label[start] = next;
        while let Some(c) = queue.pop_front() {
            size += 1;
            let (r, col) = (c / w, c % w);
            let mut visit = |n: usize| {
                if map.cells[n] && label[n] == usize::MAX {
                    label[n] = next;
                    queue.push_back(n);
                }
            };
            if r > 0 {
                visit(c - w);
            }
            if r + 1 < h {
                visit(c + w);
            }
            if col > 0 {
                visit(c - 1);
            }
            if col + 1 < w {
                visit(c + 1);
            }
        }
        if size > best.0 {
            best = (size, next);
        }
        next += 1;
    }
    for (c, l) in label.iter().enumerate() {
        if *l != best.1 {
            map.cells[c] = false;
        }
    }
}

fn grid_distance(map: &GridMap, from: (usize, usize), to: (usize, usize)) -> Option<usize> {
    let w = map.width;
    let mut dist = vec![usize::MAX; map.height * w];
    let src = from.0 * w + from.1;
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(c) = queue.pop_front() {
        let (r, col) = (c / w, c % w);
        if (r, col) == to {
            return Some(dist[c]);
        }
        let cand = [
            (r.wrapping_sub(1), col),
            (r + 1, col),
            (r, col.wrapping_sub(1)),
            (r, col + 1),
        ];
        for (nr, nc) in cand {
            if map.passable(nr, nc) && dist[nr * w + nc] == usize::MAX {
                dist[nr * w + nc] = dist[c] + 1;
                queue.push_back(nr * w + nc);
            }
        }
    }
    None
}

/// `count` entries with pairwise distinct starts and pairwise distinct
/// goals, all on passable cells.
pub fn random_scenario<R: Rng + ?Sized>(
    map: &GridMap,
    map_name: &str,
    count: usize,
    rng: &mut R,
) -> Vec<ScenarioEntry> {
    let open: Vec<(usize, usize)> = (0..map.height)
        .flat_map(|r| (0..map.width).map(move |c| (r, c)))
        .filter(|&(r, c)| map.passable(r, c))
        .collect();
    assert!(count <= open.len(), "not enough open cells for {count} agents");
    let starts: Vec<_> = open.choose_multiple(rng, count).copied().collect();
    let goals: Vec<_> = open.choose_multiple(rng, count).copied().collect();
    starts
        .into_iter()
        .zip(goals)
        .map(|(start, goal)| {
            let d = grid_distance(map, start, goal).expect("open region is connected");
            ScenarioEntry {
                bucket: (d / 4) as u32,
                map_name: map_name.to_string(),
                map_width: map.width,
                map_height: map.height,
                start,
                goal,
                optimal_length: d as f64,
            }
        })
        .collect()
}
