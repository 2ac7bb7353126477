//! Static dock geometry, simulated 2D LiDAR and ground-truth collision checks.

mod collision;
mod dock;
mod lidar;

pub use collision::{check_collision, polygons_intersect, vessel_corners, CollisionReport, Zone};
pub use dock::{build_dock, DockGeometry, WallSegment};
pub use lidar::{
    beam_angle, ray_segment_intersection, read_scan_csv, simulate_lidar, write_scan_csv, Beam, LidarConfig, LidarScan,
    BEAM_COUNT,
};

#[cfg(test)]
pub(crate) use lidar::test_support as lidar_test_support;
