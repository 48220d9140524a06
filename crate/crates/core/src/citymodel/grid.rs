//! Raster grids in ESRI ASCII format.
//!
//! Rows are stored north to south, the way the file lists them. `origin` is
//! the lower-left (south-west) corner of the grid.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Grid geometry shared by every raster of a city model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    pub origin_x: f64,
    pub origin_y: f64,
    pub cell_size: f64,
    pub ncols: usize,
    pub nrows: usize,
}

impl GridLayout {
    pub fn new(origin_x: f64, origin_y: f64, cell_size: f64, ncols: usize, nrows: usize) -> Result<Self> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(Error::InvalidGrid(format!("cell size must be > 0, got {cell_size}")));
        }
        if ncols == 0 || nrows == 0 {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if !origin_x.is_finite() || !origin_y.is_finite() {
            return Err(Error::InvalidGrid("origin is not finite".into()));
        }
        Ok(Self {
            origin_x,
            origin_y,
            cell_size,
            ncols,
            nrows,
        })
    }

    pub fn len(&self) -> usize {
        self.ncols * self.nrows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_x(&self) -> f64 {
        self.origin_x + self.ncols as f64 * self.cell_size
    }

    pub fn max_y(&self) -> f64 {
        self.origin_y + self.nrows as f64 * self.cell_size
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.origin_x && x <= self.max_x() && y >= self.origin_y && y <= self.max_y()
    }

    /// `(row, col)` of the cell containing `(x, y)`; points on the far
    /// boundary belong to the last cell.
    pub fn cell_at(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !self.contains(x, y) {
            return None;
        }
        let col = (((x - self.origin_x) / self.cell_size).floor() as usize).min(self.ncols - 1);
        let from_south = (((y - self.origin_y) / self.cell_size).floor() as usize).min(self.nrows - 1);
        Some((self.nrows - 1 - from_south, col))
    }

    /// Planar bounds `[x0, x1, y0, y1]` of a cell.
    pub fn cell_bounds(&self, row: usize, col: usize) -> [f64; 4] {
        let x0 = self.origin_x + col as f64 * self.cell_size;
        let y0 = self.origin_y + (self.nrows - 1 - row) as f64 * self.cell_size;
        [x0, x0 + self.cell_size, y0, y0 + self.cell_size]
    }
}

/// A raster of `f64` values with an optional nodata sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub layout: GridLayout,
    pub nodata: Option<f64>,
    values: Vec<f64>,
}

impl Raster {
    pub fn new(layout: GridLayout, values: Vec<f64>, nodata: Option<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                layout.len(),
                values.len()
            )));
        }
        Ok(Self { layout, nodata, values })
    }

    pub fn filled(layout: GridLayout, value: f64) -> Self {
        Self {
            layout,
            nodata: None,
            values: vec![value; layout.len()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.layout.ncols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.layout.ncols + col] = value;
    }

    /// Cell value, `None` for nodata.
    pub fn value(&self, row: usize, col: usize) -> Option<f64> {
        let v = self.get(row, col);
        match self.nodata {
            Some(nd) if v == nd => None,
            _ if v.is_nan() => None,
            _ => Some(v),
        }
    }

    pub fn sample(&self, x: f64, y: f64) -> Option<f64> {
        let (r, c) = self.layout.cell_at(x, y)?;
        self.value(r, c)
    }

    pub fn read_asc(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_asc(&text).map_err(|e| match e {
            Error::InvalidGrid(msg) => Error::parse(path, msg),
            other => other,
        })
    }

    pub fn parse_asc(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace().peekable();
        let mut ncols = None;
        let mut nrows = None;
        let mut xll = None;
        let mut yll = None;
        let mut centered = (false, false);
        let mut cell_size = None;
        let mut nodata = None;

        while let Some(tok) = tokens.peek() {
            if !tok.starts_with(|c: char| c.is_ascii_alphabetic()) {
                break;
            }
            let key = tokens.next().unwrap().to_ascii_lowercase();
            let value = tokens
                .next()
                .ok_or_else(|| Error::InvalidGrid(format!("header {key} has no value")))?;
            let num: f64 = value
                .parse()
                .map_err(|_| Error::InvalidGrid(format!("header {key}: bad number {value}")))?;
            match key.as_str() {
                "ncols" => ncols = Some(num as usize),
                "nrows" => nrows = Some(num as usize),
                "xllcorner" => xll = Some(num),
                "yllcorner" => yll = Some(num),
                "xllcenter" => {
                    xll = Some(num);
                    centered.0 = true;
                }
                "yllcenter" => {
                    yll = Some(num);
                    centered.1 = true;
                }
                "cellsize" => cell_size = Some(num),
                "nodata_value" => nodata = Some(num),
                other => return Err(Error::InvalidGrid(format!("unknown header key {other}"))),
            }
        }

        let missing = |k: &str| Error::InvalidGrid(format!("missing header {k}"));
        let ncols = ncols.ok_or_else(|| missing("ncols"))?;
        let nrows = nrows.ok_or_else(|| missing("nrows"))?;
        let cell_size = cell_size.ok_or_else(|| missing("cellsize"))?;
        let mut xll = xll.ok_or_else(|| missing("xllcorner"))?;
        let mut yll = yll.ok_or_else(|| missing("yllcorner"))?;
        if centered.0 {
            xll -= cell_size / 2.0;
        }
        if centered.1 {
            yll -= cell_size / 2.0;
        }
        let layout = GridLayout::new(xll, yll, cell_size, ncols, nrows)?;

        let mut values = Vec::with_capacity(layout.len());
        for tok in tokens {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::InvalidGrid(format!("bad cell value {tok}")))?;
            values.push(v);
        }
        Self::new(layout, values, nodata)
    }

    pub fn to_asc(&self) -> String {
        let l = &self.layout;
        let mut out = String::new();
        let _ = writeln!(out, "ncols {}", l.ncols);
        let _ = writeln!(out, "nrows {}", l.nrows);
        let _ = writeln!(out, "xllcorner {}", l.origin_x);
        let _ = writeln!(out, "yllcorner {}", l.origin_y);
        let _ = writeln!(out, "cellsize {}", l.cell_size);
        if let Some(nd) = self.nodata {
            let _ = writeln!(out, "NODATA_value {nd}");
        }
        for row in self.values.chunks(l.ncols) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn write_asc(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_asc()).map_err(|e| Error::io(path, e))
    }
}

/// Ground elevation in metres.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainGrid(pub Raster);

impl TerrainGrid {
    pub fn new(raster: Raster) -> Result<Self> {
        if (0..raster.layout.nrows)
            .flat_map(|r| (0..raster.layout.ncols).map(move |c| (r, c)))
            .all(|(r, c)| raster.value(r, c).is_none())
        {
            return Err(Error::InvalidGrid("terrain has no data cells".into()));
        }
        if let Some(v) = raster.values().iter().find(|v| v.is_infinite()) {
            return Err(Error::InvalidGrid(format!("terrain elevation {v} is not finite")));
        }
        Ok(Self(raster))
    }

    pub fn flat(layout: GridLayout, elevation: f64) -> Self {
        Self(Raster::filled(layout, elevation))
    }

    pub fn layout(&self) -> &GridLayout {
        &self.0.layout
    }

    pub fn elevation(&self, row: usize, col: usize) -> Option<f64> {
        self.0.value(row, col)
    }
}

/// Vegetation height above terrain in metres, 0 where there is none.
#[derive(Debug, Clone, PartialEq)]
pub struct CanopyGrid(pub Raster);

impl CanopyGrid {
    pub fn new(raster: Raster) -> Result<Self> {
        for r in 0..raster.layout.nrows {
            for c in 0..raster.layout.ncols {
                if let Some(v) = raster.value(r, c) {
                    if !(v >= 0.0) || !v.is_finite() {
                        return Err(Error::InvalidGrid(format!(
                            "canopy height {v} at row {r}, col {c} is negative"
                        )));
                    }
                }
            }
        }
        Ok(Self(raster))
    }

    pub fn empty(layout: GridLayout) -> Self {
        Self(Raster::filled(layout, 0.0))
    }

    pub fn layout(&self) -> &GridLayout {
        &self.0.layout
    }

    pub fn height(&self, row: usize, col: usize) -> f64 {
        self.0.value(row, col).unwrap_or(0.0)
    }
}

/// Landcover category codes for ground cells.
#[derive(Debug, Clone, PartialEq)]
pub struct LandcoverGrid(pub Raster);

impl LandcoverGrid {
    pub fn new(raster: Raster) -> Result<Self> {
        use crate::visibility::Category;
        for r in 0..raster.layout.nrows {
            for c in 0..raster.layout.ncols {
                if let Some(v) = raster.value(r, c) {
                    let ok = v.fract() == 0.0
                        && Category::from_code(v as u8).is_some_and(|cat| cat.is_ground())
                        && (1.0..=255.0).contains(&v);
                    if !ok {
                        return Err(Error::InvalidGrid(format!(
                            "landcover code {v} at row {r}, col {c} is not a registered ground category"
                        )));
                    }
                }
            }
        }
        Ok(Self(raster))
    }

    pub fn uniform(layout: GridLayout, category: crate::visibility::Category) -> Self {
        Self(Raster::filled(layout, category.code() as f64))
    }

    pub fn layout(&self) -> &GridLayout {
        &self.0.layout
    }

    pub fn category(&self, row: usize, col: usize) -> crate::visibility::Category {
        use crate::visibility::Category;
        self.0
            .value(row, col)
            .and_then(|v| Category::from_code(v as u8))
            .unwrap_or(Category::Other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str =
        "ncols 3\nnrows 2\nxllcorner 100\nyllcorner 200\ncellsize 10\nNODATA_value -9999\n1 2 3\n4 -9999 6\n";

    #[test]
    fn parses_header_and_rows() {
        let r = Raster::parse_asc(SAMPLE).unwrap();
        assert_eq!(r.layout.ncols, 3);
        assert_eq!(r.layout.nrows, 2);
        assert_eq!(r.value(0, 2), Some(3.0));
        assert_eq!(r.value(1, 1), None);
        // north row first
        assert_eq!(r.sample(105.0, 215.0), Some(1.0));
        assert_eq!(r.sample(105.0, 205.0), Some(4.0));
        assert_eq!(r.sample(99.0, 205.0), None);
    }

    #[test]
    fn roundtrips_through_text() {
        let r = Raster::parse_asc(SAMPLE).unwrap();
        let again = Raster::parse_asc(&r.to_asc()).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn center_registration_shifts_origin() {
        let text = "ncols 1\nnrows 1\nxllcenter 5\nyllcenter 5\ncellsize 10\n7\n";
        let r = Raster::parse_asc(text).unwrap();
        assert_eq!(r.layout.origin_x, 0.0);
        assert_eq!(r.layout.origin_y, 0.0);
    }

    #[test]
    fn rejects_short_data_and_bad_cell_size() {
        assert!(Raster::parse_asc("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n").is_err());
        assert!(Raster::parse_asc("ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 0\n1\n").is_err());
    }

    #[test]
    fn cell_bounds_match_lookup() {
        let l = GridLayout::new(0.0, 0.0, 5.0, 4, 3).unwrap();
        for r in 0..3 {
            for c in 0..4 {
                let [x0, x1, y0, y1] = l.cell_bounds(r, c);
                assert_eq!(l.cell_at((x0 + x1) / 2.0, (y0 + y1) / 2.0), Some((r, c)));
            }
        }
    }

    #[test]
    fn canopy_rejects_negative_heights() {
        let l = GridLayout::new(0.0, 0.0, 1.0, 1, 1).unwrap();
        assert!(CanopyGrid::new(Raster::new(l, vec![-1.0], None).unwrap()).is_err());
    }

    #[test]
    fn landcover_rejects_non_ground_codes() {
        let l = GridLayout::new(0.0, 0.0, 1.0, 2, 1).unwrap();
        assert!(LandcoverGrid::new(Raster::new(l, vec![9.0, 2.0], None).unwrap()).is_err());
        assert!(LandcoverGrid::new(Raster::new(l, vec![9.0, 5.0], None).unwrap()).is_ok());
    }
}
