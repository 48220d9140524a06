use serde::{Deserialize, Serialize};

/// Number of hit categories.
pub const N_CATEGORIES: usize = 20;

/// What a ray ends on. Codes 1..=4 come from geometry, 5..=20 from the
/// landcover raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Category {
    Sky = 1,
    Facade = 2,
    Roof = 3,
    Vegetation = 4,
    Water = 5,
    River = 6,
    Nature = 7,
    Agriculture = 8,
    Grass = 9,
    LocalRoad = 10,
    MajorRoad = 11,
    Rail = 12,
    Industrial = 13,
    Residential = 14,
    Commercial = 15,
    Rock = 16,
    Glacier = 17,
    Wetland = 18,
    UrbanGreen = 19,
    Other = 20,
}

impl Category {
    pub const ALL: [Category; N_CATEGORIES] = [
        Category::Sky,
        Category::Facade,
        Category::Roof,
        Category::Vegetation,
        Category::Water,
        Category::River,
        Category::Nature,
        Category::Agriculture,
        Category::Grass,
        Category::LocalRoad,
        Category::MajorRoad,
        Category::Rail,
        Category::Industrial,
        Category::Residential,
        Category::Commercial,
        Category::Rock,
        Category::Glacier,
        Category::Wetland,
        Category::UrbanGreen,
        Category::Other,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    /// Zero-based position, `code - 1`.
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_code(code: u8) -> Option<Category> {
        Self::ALL.get((code as usize).checked_sub(1)?).copied()
    }

    /// Categories that may appear in a landcover raster.
    pub fn is_ground(self) -> bool {
        self.code() >= Category::Water.code()
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Sky => "Sky",
            Category::Facade => "Facade",
            Category::Roof => "Roof",
            Category::Vegetation => "Vegetation",
            Category::Water => "Water",
            Category::River => "River",
            Category::Nature => "Nature",
            Category::Agriculture => "Agriculture",
            Category::Grass => "Grass",
            Category::LocalRoad => "LocalRoad",
            Category::MajorRoad => "MajorRoad",
            Category::Rail => "Rail",
            Category::Industrial => "Industrial",
            Category::Residential => "Residential",
            Category::Commercial => "Commercial",
            Category::Rock => "Rock",
            Category::Glacier => "Glacier",
            Category::Wetland => "Wetland",
            Category::UrbanGreen => "UrbanGreen",
            Category::Other => "Other",
        }
    }

    pub fn from_name(name: &str) -> Option<Category> {
        Self::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(name))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryEntry {
    pub code: u8,
    pub name: String,
    pub description: String,
}

/// The shipped category registry file.
pub const CATEGORY_REGISTRY_JSON: &str = include_str!("../../data/landcover_categories.json");

pub fn category_registry() -> Vec<CategoryEntry> {
    serde_json::from_str(CATEGORY_REGISTRY_JSON).expect("shipped category registry parses")
}
