use std::f64::consts::TAU;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geom::{cross, unit, Vec2};
use crate::par;
use crate::rng::{substream, Purpose};
use crate::vessel::VesselState;

use super::{DockGeometry, WallSegment};

/// 0.1° angular resolution over a full turn.
pub const BEAM_COUNT: usize = 3600;

/// Noisy ranges are clamped from below to stay physical.
const MIN_RANGE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct LidarConfig {
    pub max_range: f64,
    pub noise_sigma: f64,
    /// Scan rate [Hz].
    pub rate_hz: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self {
            max_range: 50.0,
            noise_sigma: 0.1,
            rate_hz: 5.0,
        }
    }
}

/// Beam `i` in the sensor frame, angle 0 along the bow.
pub fn beam_angle(i: usize) -> f64 {
    i as f64 * TAU / BEAM_COUNT as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beam {
    pub angle: f64,
    pub range: f64,
    pub hit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LidarScan {
    pub beams: Vec<Beam>,
    pub max_range: f64,
    pub timestamp: f64,
}

impl LidarScan {
    pub fn hits(&self) -> impl Iterator<Item = &Beam> {
        self.beams.iter().filter(|b| b.hit)
    }
}

/// Distance along the ray to the first crossing of the wall rectangle's
/// boundary, if any. `direction` must be a unit vector.
pub fn ray_segment_intersection(origin: &Vec2, direction: &Vec2, wall: &WallSegment) -> Option<f64> {
    let corners = wall.corners();
    let mut best: Option<f64> = None;
    for i in 0..4 {
        let a = corners[i];
        let e = corners[(i + 1) % 4] - a;
        let denom = cross(direction, &e);
        if denom == 0.0 {
            continue;
        }
        let ao = a - origin;
        let t = cross(&ao, &e) / denom;
        let s = cross(&ao, direction) / denom;
        if t > 0.0 && (0.0..=1.0).contains(&s) && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    }
    best
}

/// Raycasts all beams from the vessel origin against the dock walls.
///
/// Beam `i` draws its noise from substream `(seed, scan_index, i)`, so the
/// scan is identical however the beams are spread over workers.
pub fn simulate_lidar(
    state: &VesselState,
    dock: &DockGeometry,
    config: &LidarConfig,
    seed: u64,
    scan_index: u64,
    timestamp: f64,
) -> LidarScan {
    let origin = state.position();
    let beams = par::map_indexed(BEAM_COUNT, |i| {
        let angle = beam_angle(i);
        let dir = unit(state.psi + angle);
        let nearest = dock
            .walls
            .iter()
            .filter_map(|w| ray_segment_intersection(&origin, &dir, w))
            .fold(f64::INFINITY, f64::min);
        if nearest > config.max_range {
            return Beam {
                angle,
                range: config.max_range,
                hit: false,
            };
        }
        let range = if config.noise_sigma > 0.0 {
            let mut rng = substream(seed, Purpose::Lidar, scan_index, i as u64);
            let n: f64 = StandardNormal.sample(&mut rng);
            (nearest + config.noise_sigma * n).clamp(MIN_RANGE, config.max_range)
        } else {
            nearest
        };
        Beam {
            angle,
            range,
            hit: true,
        }
    });
    LidarScan {
        beams,
        max_range: config.max_range,
        timestamp,
    }
}

/// Writes `angle,range,hit` rows. Misses carry `max_range` as their range.
pub fn write_scan_csv(scan: &LidarScan, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "angle,range,hit")?;
        for b in &scan.beams {
            writeln!(w, "{},{},{}", b.angle, b.range, u8::from(b.hit))?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Reads a scan written by [`write_scan_csv`]. Any number of beams is
/// accepted so recorded scans from other sources can be replayed.
pub fn read_scan_csv(path: &Path, max_range: f64) -> Result<LidarScan> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, msg: &str| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {msg}"),
    };
    let mut beams = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with("angle")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(n + 1, "expected angle,range,hit"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| parse_err(n + 1, "bad number"));
        let hit = match fields[2] {
            "1" | "true" => true,
            "0" | "false" => false,
            _ => return Err(parse_err(n + 1, "hit must be 0/1")),
        };
        beams.push(Beam {
            angle: num(fields[0])?,
            range: num(fields[1])?,
            hit,
        });
    }
    Ok(LidarScan {
        beams,
        max_range,
        timestamp: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::build_dock;
    use std::f64::consts::FRAC_PI_4;

    fn face_at_x(x: f64) -> WallSegment {
        // rectangle whose near face sits at `x`, spanning y ∈ [−1, 1]
        WallSegment::new(Vec2::new(x + 0.05, -1.0), Vec2::new(x + 0.05, 1.0), 0.1).unwrap()
    }

    #[test]
    fn perpendicular_hit() {
        let t = ray_segment_intersection(&Vec2::zeros(), &Vec2::new(1.0, 0.0), &face_at_x(5.0));
        assert!((t.unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_miss() {
        let t = ray_segment_intersection(&Vec2::new(0.0, 3.0), &Vec2::new(1.0, 0.0), &face_at_x(5.0));
        assert_eq!(t, None);
    }

    #[test]
    fn oblique_hit() {
        let dir = unit(FRAC_PI_4);
        let t = ray_segment_intersection(&Vec2::zeros(), &dir, &face_at_x(1.0)).unwrap();
        assert!((t - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn noiseless_perpendicular_range() {
        // back wall inner face 5 m ahead of the vessel
        let dock = build_dock(Vec2::new(3.0, 0.0), 0.0, 4.0, 4.0, 0.1).unwrap();
        let cfg = LidarConfig {
            noise_sigma: 0.0,
            ..Default::default()
        };
        let scan = simulate_lidar(&VesselState::default(), &dock, &cfg, 0, 0, 0.0);
        assert_eq!(scan.beams.len(), BEAM_COUNT);
        assert!(scan.beams[0].hit);
        assert_eq!(scan.beams[0].range, 5.0);
    }

    #[test]
    fn misses_beyond_max_range() {
        let dock = build_dock(Vec2::new(80.0, 0.0), 0.0, 4.0, 4.0, 0.1).unwrap();
        let scan = simulate_lidar(&VesselState::default(), &dock, &LidarConfig::default(), 0, 0, 0.0);
        assert!(scan.beams.iter().all(|b| !b.hit));
    }

    #[test]
    fn angles_strictly_increasing() {
        let scan = simulate_lidar(
            &VesselState::default(),
            &DockGeometry::default(),
            &LidarConfig::default(),
            3,
            0,
            0.0,
        );
        assert!(scan.beams.windows(2).all(|w| w[0].angle < w[1].angle));
        assert!(scan.beams.last().unwrap().angle < TAU);
        assert!(scan.hits().all(|b| b.range > 0.0 && b.range <= scan.max_range));
    }

    #[test]
    fn same_seed_same_scan() {
        let state = VesselState::at_rest(1.0, -2.0, 0.3);
        let dock = DockGeometry::default();
        let cfg = LidarConfig::default();
        let a = simulate_lidar(&state, &dock, &cfg, 9, 4, 0.8);
        let b = simulate_lidar(&state, &dock, &cfg, 9, 4, 0.8);
        let c = simulate_lidar(&state, &dock, &cfg, 9, 5, 0.8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn csv_round_trip() {
        let scan = simulate_lidar(
            &VesselState::default(),
            &DockGeometry::default(),
            &LidarConfig::default(),
            1,
            0,
            0.0,
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.csv");
        write_scan_csv(&scan, &path).unwrap();
        let back = read_scan_csv(&path, scan.max_range).unwrap();
        assert_eq!(back.beams, scan.beams);
    }
}
