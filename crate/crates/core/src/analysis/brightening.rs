use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::broadcast::DELIVERY_TOLERANCE;
use crate::convert::ConversionTrace;
use crate::error::{Error, Result};
use crate::net::{pow_from_sq, Network, Point2D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeDisk {
    pub center: Point2D,
    pub radius: f64,
}

impl FreeDisk {
    pub fn new(center: Point2D, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bad disk: center {center:?}, radius {radius}"
            )));
        }
        Ok(FreeDisk { center, radius })
    }
}

/// Disks separated by at least `gamma` times the sum of their radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrighteningInstance {
    disks: Vec<FreeDisk>,
    gamma: f64,
    alpha: f64,
}

impl BrighteningInstance {
    pub fn new(disks: Vec<FreeDisk>, gamma: f64, alpha: f64) -> Result<Self> {
        if !(gamma > 1.0) || !(alpha > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "need gamma > 1 and alpha > 2, got gamma {gamma}, alpha {alpha}"
            )));
        }
        for (i, a) in disks.iter().enumerate() {
            for b in &disks[i + 1..] {
                if a.center.dist(&b.center) < gamma * (a.radius + b.radius) {
                    return Err(Error::InvalidParameter(format!(
                        "disks at {:?} and {:?} are closer than gamma times their radii",
                        a.center, b.center
                    )));
                }
            }
        }
        Ok(BrighteningInstance {
            disks,
            gamma,
            alpha,
        })
    }

    pub fn disks(&self) -> &[FreeDisk] {
        &self.disks
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Every center transmits `r^alpha`, enough on its own to light its disk.
    pub fn simple_assignment(&self) -> Vec<(Point2D, f64)> {
        self.disks
            .iter()
            .map(|d| (d.center, pow_from_sq(d.radius * d.radius, self.alpha)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaConstants {
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
}

/// Constants of the lower bound on brightening power. `beta` may be negative
/// when `gamma` is small; the bound is only informative when it is positive.
pub fn beta_constants(alpha: f64, gamma: f64) -> Result<BetaConstants> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta constants need alpha > 2, got {alpha}"
        )));
    }
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta constants need gamma > 1, got {gamma}"
        )));
    }
    let beta1 = ((2.0 * gamma + 1.0) / (2.0 * gamma - 1.0)).powf(alpha)
        / ((alpha - 2.0) * gamma.powf(alpha - 2.0));
    let beta2 = beta1 * (gamma / (gamma - 1.0)).powf(alpha);
    Ok(BetaConstants {
        beta: 1.0 - beta1 - beta2,
        beta1,
        beta2,
    })
}

/// Where [`check_bright`] probes each disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    /// Evenly spaced points on the boundary circle.
    pub boundary_points: usize,
    /// Interior polar grid: rings at radii `r k / radial` for `k < radial`.
    pub radial: usize,
    /// Points per interior ring.
    pub angular: usize,
    /// A point is bright when it receives at least `threshold - tolerance`.
    pub tolerance: f64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            boundary_points: 256,
            radial: 64,
            angular: 64,
            tolerance: DELIVERY_TOLERANCE,
        }
    }
}

impl SamplingSpec {
    pub fn points(&self, disk: &FreeDisk) -> impl Iterator<Item = Point2D> + '_ {
        let c = disk.center;
        let r = disk.radius;
        let on_circle = move |radius: f64, k: usize, of: usize| {
            let t = std::f64::consts::TAU * k as f64 / of as f64;
            Point2D::new(c.x + radius * t.cos(), c.y + radius * t.sin())
        };
        let boundary =
            (0..self.boundary_points).map(move |k| on_circle(r, k, self.boundary_points));
        let interior = (1..self.radial).flat_map(move |i| {
            let radius = r * i as f64 / self.radial as f64;
            (0..self.angular).map(move |k| on_circle(radius, k, self.angular))
        });
        std::iter::once(c).chain(boundary).chain(interior)
    }
}

fn received_at(p: Point2D, transmitters: &[(Point2D, f64)], alpha: f64) -> f64 {
    let mut sum = 0.0;
    for &(q, power) in transmitters {
        if power <= 0.0 {
            continue;
        }
        let d2 = p.dist_sq(&q);
        if d2 == 0.0 {
            return f64::INFINITY;
        }
        sum += power / pow_from_sq(d2, alpha);
    }
    sum
}

/// Whether every sampled point of every disk receives at least `threshold`
/// in total from `transmitters`.
pub fn check_bright(
    disks: &[FreeDisk],
    transmitters: &[(Point2D, f64)],
    alpha: f64,
    threshold: f64,
    sampling: &SamplingSpec,
) -> bool {
    let floor = threshold - sampling.tolerance;
    disks.par_iter().all(|d| {
        sampling
            .points(d)
            .all(|p| received_at(p, transmitters, alpha) >= floor)
    })
}

/// Same centers, radii divided by `gamma`.
pub fn contract_disks(disks: &[FreeDisk], gamma: f64) -> Result<Vec<FreeDisk>> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "contraction factor must exceed 1, got {gamma}"
        )));
    }
    disks
        .iter()
        .map(|d| FreeDisk::new(d.center, d.radius / gamma))
        .collect()
}

/// The selected disks of a conversion, in selection order, as free disks.
pub fn selected_free_disks(net: &Network, trace: &ConversionTrace) -> Vec<FreeDisk> {
    trace
        .selected_disks()
        .map(|d| FreeDisk {
            center: net.position(d.center),
            radius: d.radius,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> SamplingSpec {
        SamplingSpec {
            boundary_points: 64,
            radial: 8,
            angular: 16,
            ..SamplingSpec::default()
        }
    }

    #[test]
    fn beta_example() {
        let b = beta_constants(3.0, 20.0).unwrap();
        assert!((b.beta1 - 0.058094).abs() < 1e-6);
        assert!((b.beta2 - 0.067758).abs() < 1e-6);
        assert!(b.beta >= 1.0 / 3.0);
        let far = beta_constants(3.0, 1e9).unwrap();
        assert!((far.beta - 1.0).abs() < 1e-6);
        assert!(beta_constants(2.0, 20.0).is_err());
        assert!(beta_constants(3.0, 1.0).is_err());
        assert!(beta_constants(3.0, 2.0).unwrap().beta < 0.0);
    }

    #[test]
    fn own_center_lights_its_disk() {
        let d = FreeDisk::new(Point2D::new(1.0, -2.0), 3.0).unwrap();
        let full = [(d.center, 27.0)];
        assert!(check_bright(&[d], &full, 3.0, 1.0, &coarse()));
        let half = [(d.center, 13.5)];
        assert!(!check_bright(&[d], &half, 3.0, 1.0, &coarse()));
        // An outside transmitter right on the boundary makes that point bright
        // but not the far side.
        let edge = [(Point2D::new(4.0, -2.0), 1.0)];
        assert!(!check_bright(&[d], &edge, 3.0, 1.0, &coarse()));
    }

    #[test]
    fn simple_assignment_is_bright() {
        let disks = vec![
            FreeDisk::new(Point2D::new(0.0, 0.0), 1.0).unwrap(),
            FreeDisk::new(Point2D::new(10.0, 0.0), 0.5).unwrap(),
            FreeDisk::new(Point2D::new(0.0, 12.0), 2.0).unwrap(),
        ];
        let inst = BrighteningInstance::new(disks, 3.0, 3.0).unwrap();
        assert!(check_bright(
            inst.disks(),
            &inst.simple_assignment(),
            3.0,
            1.0,
            &coarse()
        ));
        let close = vec![
            FreeDisk::new(Point2D::new(0.0, 0.0), 1.0).unwrap(),
            FreeDisk::new(Point2D::new(5.0, 0.0), 1.0).unwrap(),
        ];
        assert!(BrighteningInstance::new(close, 3.0, 3.0).is_err());
    }

    #[test]
    fn contraction() {
        let d = FreeDisk::new(Point2D::new(0.0, 0.0), 3.0).unwrap();
        assert_eq!(contract_disks(&[d], 3.0).unwrap()[0].radius, 1.0);
        assert!(contract_disks(&[d], 1.0).is_err());
        assert!(FreeDisk::new(Point2D::new(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn sampling_counts() {
        let s = SamplingSpec::default();
        let d = FreeDisk::new(Point2D::new(0.0, 0.0), 1.0).unwrap();
        assert_eq!(s.points(&d).count(), 1 + 256 + 63 * 64);
        assert!(s.points(&d).all(|p| p.dist(&d.center) <= 1.0 + 1e-12));
    }
}
