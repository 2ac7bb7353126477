#![allow(dead_code)]

use std::collections::BTreeSet;

use mppi_dock::geom::Vec2;
use mppi_dock::perception::Labels;

/// Quadratic DBSCAN written for clarity, not speed.
///
/// A point's neighbourhood includes itself. Border points join the cluster of
/// their nearest core neighbour, lower index on ties.
pub fn dbscan_oracle(points: &[Vec2], eps: f64, min_pts: usize) -> Labels {
    let n = points.len();
    let near = |i: usize, j: usize| (points[i] - points[j]).norm_squared() <= eps * eps;
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_pts)
        .collect();

    // union-find over core-core edges
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..i {
            if core[i] && core[j] && near(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut root: Vec<Option<usize>> = (0..n).map(|i| core[i].then(|| find(&mut parent, i))).collect();
    for i in 0..n {
        if core[i] {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for j in 0..n {
            if core[j] && near(i, j) {
                let d = (points[i] - points[j]).norm_squared();
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, j));
                }
            }
        }
        root[i] = best.map(|(_, j)| find(&mut parent, j));
    }
    root
}

/// Labels as a set of member-index sets plus the noise set, so two labelings
/// compare equal up to renaming.
pub fn partition(labels: &Labels) -> (BTreeSet<BTreeSet<usize>>, BTreeSet<usize>) {
    let mut groups = std::collections::BTreeMap::<usize, BTreeSet<usize>>::new();
    let mut noise = BTreeSet::new();
    for (i, l) in labels.iter().enumerate() {
        match l {
            Some(c) => {
                groups.entry(*c).or_default().insert(i);
            }
            None => {
                noise.insert(i);
            }
        }
    }
    (groups.into_values().collect(), noise)
}
