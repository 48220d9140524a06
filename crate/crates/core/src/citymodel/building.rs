use serde::{Deserialize, Serialize};

use super::geometry::{Point2, Polygon};
use crate::{Error, Result};

/// Roof shape sitting on top of the façade prism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Roof {
    Flat,
    /// Two planes meeting at a ridge. `ridge_axis` is the ridge direction in
    /// degrees counter-clockwise from the +x axis; the ridge runs through the
    /// middle of the footprint across that direction.
    Gabled {
        ridge_height: f64,
        ridge_axis: f64,
    },
}

/// A building: extruded footprint up to the eave, plus its roof. Heights are
/// metres above `ground_elevation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub id: String,
    pub footprint: Polygon,
    pub ground_elevation: f64,
    pub eave_height: f64,
    pub roof: Roof,
    pub joint_group: String,
}

/// Precomputed gable geometry: `u` is the coordinate across the ridge.
#[derive(Debug, Clone, Copy)]
pub struct GableFrame {
    pub across: [f64; 2],
    pub ridge_u: f64,
    pub half_width: f64,
}

impl Building {
    pub fn new(
        id: impl Into<String>,
        footprint: Polygon,
        ground_elevation: f64,
        eave_height: f64,
        roof: Roof,
    ) -> Result<Self> {
        let id = id.into();
        let b = Self {
            joint_group: id.clone(),
            id,
            footprint: footprint.normalized(),
            ground_elevation,
            eave_height,
            roof,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::InvalidBuilding {
            id: self.id.clone(),
            reason,
        };
        if self.id.is_empty() {
            return Err(bad("empty id".into()));
        }
        self.footprint.validate().map_err(|reason| Error::InvalidPolygon {
            id: self.id.clone(),
            reason,
        })?;
        if !self.ground_elevation.is_finite() {
            return Err(bad("ground elevation is not finite".into()));
        }
        if !(self.eave_height > 0.0) || !self.eave_height.is_finite() {
            return Err(bad(format!("eave height must be > 0, got {}", self.eave_height)));
        }
        if let Roof::Gabled {
            ridge_height,
            ridge_axis,
        } = self.roof
        {
            if !(ridge_height >= self.eave_height) || !ridge_height.is_finite() {
                return Err(bad(format!(
                    "ridge height {ridge_height} is below eave height {}",
                    self.eave_height
                )));
            }
            if !ridge_axis.is_finite() {
                return Err(bad("ridge axis is not finite".into()));
            }
        }
        Ok(())
    }

    pub fn eave_z(&self) -> f64 {
        self.ground_elevation + self.eave_height
    }

    /// Highest absolute elevation of the building.
    pub fn top_z(&self) -> f64 {
        match self.roof {
            Roof::Flat => self.eave_z(),
            Roof::Gabled { ridge_height, .. } => self.ground_elevation + ridge_height,
        }
    }

    pub fn centroid(&self) -> Point2 {
        self.footprint.centroid()
    }

    pub fn gable_frame(&self) -> Option<GableFrame> {
        let Roof::Gabled { ridge_axis, .. } = self.roof else {
            return None;
        };
        let theta = ridge_axis.to_radians();
        let across = [-theta.sin(), theta.cos()];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &self.footprint.exterior {
            let u = across[0] * p[0] + across[1] * p[1];
            lo = lo.min(u);
            hi = hi.max(u);
        }
        Some(GableFrame {
            across,
            ridge_u: (lo + hi) / 2.0,
            half_width: (hi - lo) / 2.0,
        })
    }

    /// Absolute elevation of the top surface above a planar point of the
    /// footprint.
    pub fn top_at(&self, p: Point2) -> f64 {
        match (self.roof, self.gable_frame()) {
            (Roof::Gabled { ridge_height, .. }, Some(f)) if f.half_width > 0.0 => {
                let u = f.across[0] * p[0] + f.across[1] * p[1];
                let frac = ((u - f.ridge_u).abs() / f.half_width).min(1.0);
                self.ground_elevation + ridge_height - (ridge_height - self.eave_height) * frac
            }
            _ => self.eave_z(),
        }
    }

    /// Raises eave and ridge by `dz` metres, leaving the roof shape intact.
    pub(crate) fn raise(&mut self, dz: f64) {
        self.eave_height += dz;
        if let Roof::Gabled { ridge_height, .. } = &mut self.roof {
            *ridge_height += dz;
        }
    }
}
