use serde::{Deserialize, Serialize};

use super::primitives::Hit;
use super::rays::{distance_bin, N_BINS};
use super::{Category, N_CATEGORIES};

/// Ray counts of one viewpoint, indexed by category and distance bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HitCounts(#[serde(with = "counts_serde")] pub [[u32; N_BINS]; N_CATEGORIES]);

mod counts_serde {
    use super::{N_BINS, N_CATEGORIES};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[[u32; N_BINS]; N_CATEGORIES], s: S) -> Result<S::Ok, S::Error> {
        v.to_vec().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[u32; N_BINS]; N_CATEGORIES], D::Error> {
        let rows: Vec<[u32; N_BINS]> = Vec::deserialize(d)?;
        rows.try_into()
            .map_err(|_| serde::de::Error::custom("expected 20 category rows"))
    }
}

impl Default for HitCounts {
    fn default() -> Self {
        Self([[0; N_BINS]; N_CATEGORIES])
    }
}

impl HitCounts {
    /// Tallies traced rays; `None` is sky, which always lands in the last bin.
    pub fn from_hits(hits: impl IntoIterator<Item = Option<Hit>>) -> Self {
        let mut counts = Self::default();
        for hit in hits {
            match hit {
                Some(h) => counts.0[h.surface.category().index()][distance_bin(h.t)] += 1,
                None => counts.0[Category::Sky.index()][N_BINS - 1] += 1,
            }
        }
        counts
    }

    /// `bin` is zero-based.
    pub fn get(&self, category: Category, bin: usize) -> u32 {
        self.0[category.index()][bin]
    }

    pub fn category_total(&self, category: Category) -> u32 {
        self.0[category.index()].iter().sum()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().flatten().sum()
    }
}

/// Per-viewpoint hit counts of one building, in viewpoint order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualShareTensor {
    pub building_id: String,
    pub n_rays_per_viewpoint: u32,
    pub counts: Vec<HitCounts>,
}

impl VisualShareTensor {
    pub fn n_viewpoints(&self) -> usize {
        self.counts.len()
    }

    /// Visible proportion for a viewpoint, category and zero-based bin.
    pub fn share(&self, viewpoint: usize, category: Category, bin: usize) -> f64 {
        self.counts[viewpoint].get(category, bin) as f64 / self.n_rays_per_viewpoint as f64
    }

    /// Long-format rows with nonzero counts.
    pub fn write_csv_rows<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> csv::Result<()> {
        for (v, counts) in self.counts.iter().enumerate() {
            for cat in Category::ALL {
                for bin in 0..N_BINS {
                    let n = counts.get(cat, bin);
                    if n > 0 {
                        let share = n as f64 / self.n_rays_per_viewpoint as f64;
                        w.write_record([
                            self.building_id.clone(),
                            v.to_string(),
                            cat.code().to_string(),
                            (bin + 1).to_string(),
                            n.to_string(),
                            share.to_string(),
                        ])?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub const VISUAL_SHARE_CSV_HEADER: &str = "building_id,viewpoint_index,category_code,distance_bin,count,share";

/// Long-format CSV of several tensors.
pub fn visual_share_csv(tensors: &[VisualShareTensor]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(VISUAL_SHARE_CSV_HEADER.split(','))
        .expect("in-memory write");
    for t in tensors {
        t.write_csv_rows(&mut w).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
