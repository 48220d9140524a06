use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of distance bins.
pub const N_BINS: usize = 4;

/// Upper edges of the first three distance bins, metres. The last bin is
/// open-ended and also holds sky.
pub const BIN_EDGES: [f64; 3] = [50.0, 250.0, 1000.0];

/// Zero-based distance bin of a hit at distance `t`.
pub fn distance_bin(t: f64) -> usize {
    BIN_EDGES.iter().position(|&edge| t < edge).unwrap_or(N_BINS - 1)
}

/// `[lower, upper)` bounds of a zero-based distance bin.
pub fn bin_range(bin: usize) -> (f64, f64) {
    let lo = if bin == 0 { 0.0 } else { BIN_EDGES[bin - 1] };
    let hi = BIN_EDGES.get(bin).copied().unwrap_or(f64::INFINITY);
    (lo, hi)
}

/// Layout of the view cone: an equal-angle grid of `n_azimuth` by
/// `n_elevation` rays, centred on the viewpoint normal and the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RayConfig {
    pub n_azimuth: u32,
    pub n_elevation: u32,
    /// Degrees.
    pub horizontal_fov: f64,
    /// Degrees.
    pub vertical_fov: f64,
    /// Metres.
    pub max_range: f64,
}

impl Default for RayConfig {
    fn default() -> Self {
        Self {
            n_azimuth: 65,
            n_elevation: 40,
            horizontal_fov: 120.0,
            vertical_fov: 120.0,
            max_range: 50_000.0,
        }
    }
}

impl RayConfig {
    pub fn total_rays(&self) -> u32 {
        self.n_azimuth * self.n_elevation
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_azimuth == 0 || self.n_elevation == 0 {
            return Err(Error::Config("ray grid must have at least one ray per axis".into()));
        }
        for (name, fov) in [
            ("horizontal_fov", self.horizontal_fov),
            ("vertical_fov", self.vertical_fov),
        ] {
            if !(fov > 0.0 && fov <= 180.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 180], got {fov}")));
            }
        }
        if !(self.max_range > 0.0) {
            return Err(Error::Config("max_range must be positive".into()));
        }
        Ok(())
    }

    /// Unit ray directions for a viewpoint facing `normal` (horizontal unit
    /// vector). Elevation rows run bottom to top, azimuth columns right to
    /// left within each row.
    pub fn directions(&self, normal: [f64; 2]) -> Vec<[f64; 3]> {
        let base = normal[1].atan2(normal[0]);
        let h = self.horizontal_fov.to_radians();
        let v = self.vertical_fov.to_radians();
        let mut out = Vec::with_capacity(self.total_rays() as usize);
        for i in 0..self.n_elevation {
            let el = -v / 2.0 + v * (i as f64 + 0.5) / self.n_elevation as f64;
            let (sin_el, cos_el) = el.sin_cos();
            for k in 0..self.n_azimuth {
                let az = base - h / 2.0 + h * (k as f64 + 0.5) / self.n_azimuth as f64;
                let (sin_az, cos_az) = az.sin_cos();
                out.push([cos_el * cos_az, cos_el * sin_az, sin_el]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cone_has_2600_rays() {
        let c = RayConfig::default();
        assert_eq!(c.total_rays(), 2600);
        assert_eq!(c.directions([1.0, 0.0]).len(), 2600);
    }

    #[test]
    fn directions_are_unit_and_inside_cone() {
        let c = RayConfig::default();
        let normal = [0.6, 0.8];
        for d in c.directions(normal) {
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
            assert!(d[2].asin().to_degrees().abs() <= 60.0);
            let horiz = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let cos_az = (d[0] * normal[0] + d[1] * normal[1]) / horiz;
            assert!(cos_az.clamp(-1.0, 1.0).acos().to_degrees() <= 60.0 + 1e-9);
        }
    }

    #[test]
    fn bins() {
        assert_eq!(distance_bin(0.0), 0);
        assert_eq!(distance_bin(49.999), 0);
        assert_eq!(distance_bin(50.0), 1);
        assert_eq!(distance_bin(999.0), 2);
        assert_eq!(distance_bin(1000.0), 3);
        assert_eq!(bin_range(3), (1000.0, f64::INFINITY));
    }

    #[test]
    fn rejects_bad_fov() {
        let mut c = RayConfig {
            horizontal_fov: 0.0,
            ..RayConfig::default()
        };
        assert!(c.validate().is_err());
        c.horizontal_fov = 181.0;
        assert!(c.validate().is_err());
    }
}
