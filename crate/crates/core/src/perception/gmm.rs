//! Gaussian mixture segmentation of dock points by expectation-maximization.

use nalgebra::Matrix2;
use rand::Rng;

use crate::geom::Vec2;

use super::{PerceptionFailure, PointCloud};

#[derive(Debug, Clone, PartialEq)]
pub struct GmmConfig {
    pub max_iter: usize,
    /// Stop once the mean per-point log-likelihood improves by less than this.
    pub tol: f64,
    /// Fresh initializations tried after a degenerate fit.
    pub max_restarts: usize,
    /// Added to every covariance diagonal [m²]; walls are nearly 1-D.
    pub reg_covar: f64,
}

impl Default for GmmConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-6,
            max_restarts: 5,
            reg_covar: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
struct Component {
    weight: f64,
    mean: Vec2,
    cov: Matrix2<f64>,
}

impl Component {
    /// `(log N(p | μ, Σ) + log π)`; `None` for a non-invertible covariance.
    fn log_density(&self, p: &Vec2) -> Option<f64> {
        let det = self.cov.determinant();
        if !(det > 0.0) {
            return None;
        }
        let inv = self.cov.try_inverse()?;
        let d = p - self.mean;
        let maha = d.dot(&(inv * d));
        Some(self.weight.ln() - 0.5 * maha - 0.5 * det.ln() - std::f64::consts::TAU.ln())
    }
}

/// k-means++ seeding: first centre uniform, the rest proportional to squared
/// distance from the nearest chosen centre.
fn kmeans_pp<R: Rng>(points: &[Vec2], k: usize, rng: &mut R) -> Vec<Vec2> {
    let mut centres = vec![points[rng.random_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|p| (p - centres[0]).norm_squared()).collect();
    while centres.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = points.len() - 1;
            for (i, w) in d2.iter().enumerate() {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            points[pick]
        } else {
            points[rng.random_range(0..points.len())]
        };
        centres.push(next);
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min((p - next).norm_squared());
        }
    }
    centres
}

fn initial_components<R: Rng>(points: &[Vec2], k: usize, reg: f64, rng: &mut R) -> Vec<Component> {
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec2::zeros(), |a, p| a + p) / n;
    let var = points.iter().map(|p| (p - mean).norm_squared()).sum::<f64>() / (2.0 * n);
    let iso = Matrix2::identity() * (var / k as f64 + reg);
    kmeans_pp(points, k, rng)
        .into_iter()
        .map(|mean| Component {
            weight: 1.0 / k as f64,
            mean,
            cov: iso,
        })
        .collect()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Runs EM from one initialization and returns hard assignments, or `None`
/// when a component collapses.
fn fit_once<R: Rng>(points: &[Vec2], k: usize, cfg: &GmmConfig, rng: &mut R) -> Option<Vec<usize>> {
    let n = points.len();
    let mut comps = initial_components(points, k, cfg.reg_covar, rng);
    let mut resp = vec![vec![0.0; k]; n];
    let mut prev_ll = f64::NEG_INFINITY;
    let mut logp = vec![0.0; k];

    for _ in 0..cfg.max_iter {
        // E step
        let mut ll = 0.0;
        for (i, p) in points.iter().enumerate() {
            for (j, c) in comps.iter().enumerate() {
                logp[j] = c.log_density(p)?;
            }
            let norm = log_sum_exp(&logp);
            ll += norm;
            for j in 0..k {
                resp[i][j] = (logp[j] - norm).exp();
            }
        }
        ll /= n as f64;

        // M step
        for (j, c) in comps.iter_mut().enumerate() {
            let nk: f64 = resp.iter().map(|r| r[j]).sum();
            if nk < 1e-9 {
                return None;
            }
            let mean = points.iter().zip(&resp).fold(Vec2::zeros(), |a, (p, r)| a + p * r[j]) / nk;
            let mut cov = points.iter().zip(&resp).fold(Matrix2::zeros(), |a, (p, r)| {
                let d = p - mean;
                a + d * d.transpose() * r[j]
            }) / nk;
            cov += Matrix2::identity() * cfg.reg_covar;
            *c = Component {
                weight: nk / n as f64,
                mean,
                cov,
            };
        }

        if ll - prev_ll < cfg.tol && prev_ll.is_finite() {
            break;
        }
        prev_ll = ll;
    }

    let mut assign = vec![0; n];
    let mut counts = vec![0usize; k];
    for (i, p) in points.iter().enumerate() {
        let best = comps
            .iter()
            .enumerate()
            .map(|(j, c)| (j, c.log_density(p).unwrap_or(f64::NEG_INFINITY)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(j, _)| j)?;
        assign[i] = best;
        counts[best] += 1;
    }
    if counts.contains(&0) {
        return None;
    }
    Some(assign)
}

/// Splits `dock_points` into `n_components` non-empty subsets by maximum
/// responsibility under a fitted Gaussian mixture.
pub fn segment_walls<R: Rng>(
    dock_points: &PointCloud,
    n_components: usize,
    cfg: &GmmConfig,
    rng: &mut R,
) -> Result<Vec<Vec<Vec2>>, PerceptionFailure> {
    let pts = &dock_points.points;
    if n_components == 0 || pts.len() < n_components {
        return Err(PerceptionFailure::InsufficientPoints {
            needed: n_components.max(1),
            got: pts.len(),
        });
    }
    if n_components == 1 {
        return Ok(vec![pts.clone()]);
    }
    for _ in 0..=cfg.max_restarts {
        if let Some(assign) = fit_once(pts, n_components, cfg, rng) {
            let mut out = vec![Vec::new(); n_components];
            for (p, a) in pts.iter().zip(assign) {
                out[a].push(*p);
            }
            return Ok(out);
        }
    }
    Err(PerceptionFailure::DegenerateMixture)
}
