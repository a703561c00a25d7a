//! Versioned JSON documents for tile and slat systems.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::asam::{Orientation, Placement, SlatSystem, SlatType};
use crate::atam::{Glue, TileAssembly, TileSystem, TileType};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Atam,
    Asam,
}

#[derive(Deserialize)]
struct Header {
    format_version: serde_json::Value,
    kind: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileDoc {
    pub name: String,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<(String, u8)>,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    pub e: Option<(String, u8)>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<(String, u8)>,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<(String, u8)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedTileDoc {
    pub x: i32,
    pub y: i32,
    pub tile: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileSystemDoc {
    pub temperature: u32,
    pub tiles: Vec<TileDoc>,
    pub seed: Vec<SeedTileDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtamDocument {
    pub format_version: String,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Asserted system class key, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub system: TileSystemDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlatDoc {
    pub name: String,
    pub orientation: Orientation,
    pub length: u32,
    /// `(position, label)` pairs.
    pub glues: Vec<(u32, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSlatDoc {
    pub x: i32,
    pub y: i32,
    pub slat: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlatSystemDoc {
    pub cooperativity: u32,
    pub slats: Vec<SlatDoc>,
    pub seed: Vec<SeedSlatDoc>,
}

/// A resolving slat: a placement of `slat` anchored at
/// `(i * scale + dx, j * scale + dy)` resolves block `(i, j)` to `tile`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvingDoc {
    pub slat: String,
    pub dx: i32,
    pub dy: i32,
    pub tile: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationDoc {
    pub scale: u32,
    pub tiles: Vec<TileDoc>,
    pub temperature: u32,
    pub resolving: Vec<ResolvingDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsamDocument {
    pub format_version: String,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub system: SlatSystemDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationDoc>,
    /// Slat types making up each macrotile, for resource audits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub macrotiles: Option<Vec<MacrotileDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacrotileDoc {
    pub tile: String,
    pub slats: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Atam(AtamDocument),
    Asam(AsamDocument),
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Schema { msg: e.to_string(), line: e.line(), column: e.column() }
}

/// Parse either document kind, checking the version before the body.
pub fn parse(text: &str) -> Result<Document> {
    let header: Header = serde_json::from_str(text).map_err(json_err)?;
    match header.format_version.as_str() {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(Error::VersionUnsupported(v.to_string())),
        None => return Err(Error::VersionUnsupported(header.format_version.to_string())),
    }
    match header.kind.as_ref().and_then(|k| k.as_str()) {
        Some("atam") => Ok(Document::Atam(serde_json::from_str(text).map_err(json_err)?)),
        Some("asam") => Ok(Document::Asam(serde_json::from_str(text).map_err(json_err)?)),
        Some(k) => Err(Error::schema(format!("unknown kind {k:?}, expected \"atam\" or \"asam\""))),
        None => Err(Error::schema("missing field `kind`")),
    }
}

pub fn parse_atam(text: &str) -> Result<AtamDocument> {
    match parse(text)? {
        Document::Atam(d) => Ok(d),
        Document::Asam(_) => Err(Error::schema("expected kind \"atam\", found \"asam\"")),
    }
}

pub fn parse_asam(text: &str) -> Result<AsamDocument> {
    match parse(text)? {
        Document::Asam(d) => Ok(d),
        Document::Atam(_) => Err(Error::schema("expected kind \"asam\", found \"atam\"")),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_canonical<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn glue_of(g: &Option<(String, u8)>) -> Glue {
    match g {
        Some((l, s)) => Glue::new(l.clone(), *s),
        None => Glue::null(),
    }
}

fn glue_doc(g: &Glue) -> Option<(String, u8)> {
    (!g.is_null()).then(|| (g.label.clone(), g.strength))
}

pub fn tiles_from_docs(tiles: &[TileDoc]) -> Vec<TileType> {
    tiles
        .iter()
        .map(|t| TileType::new(t.name.clone(), glue_of(&t.n), glue_of(&t.e), glue_of(&t.s), glue_of(&t.w)))
        .collect()
}

pub fn tiles_to_docs(tiles: &[TileType]) -> Vec<TileDoc> {
    tiles
        .iter()
        .map(|t| TileDoc {
            name: t.name.clone(),
            n: glue_doc(&t.glues[0]),
            e: glue_doc(&t.glues[1]),
            s: glue_doc(&t.glues[2]),
            w: glue_doc(&t.glues[3]),
        })
        .collect()
}

impl TileSystemDoc {
    pub fn to_system(&self) -> Result<TileSystem> {
        let tiles = tiles_from_docs(&self.tiles);
        let mut seed = TileAssembly::new();
        for s in &self.seed {
            let t = tiles
                .iter()
                .position(|t| t.name == s.tile)
                .ok_or_else(|| Error::InvalidSystem(format!("seed names unknown tile {:?}", s.tile)))?;
            if seed.insert((s.x, s.y), t).is_some() {
                return Err(Error::InvalidSystem(format!("seed position ({}, {}) given twice", s.x, s.y)));
            }
        }
        TileSystem::new(tiles, seed, self.temperature)
    }

    pub fn from_system(sys: &TileSystem) -> TileSystemDoc {
        TileSystemDoc {
            temperature: sys.temperature,
            tiles: tiles_to_docs(&sys.tiles),
            seed: sys
                .seed
                .iter()
                .map(|((x, y), t)| SeedTileDoc { x, y, tile: sys.tiles[t].name.clone() })
                .collect(),
        }
    }
}

impl AtamDocument {
    pub fn new(sys: &TileSystem) -> AtamDocument {
        AtamDocument {
            format_version: FORMAT_VERSION.into(),
            kind: Kind::Atam,
            name: None,
            class: None,
            provenance: None,
            system: TileSystemDoc::from_system(sys),
        }
    }
}

impl SlatSystemDoc {
    pub fn to_system(&self) -> Result<SlatSystem> {
        let mut slats = Vec::with_capacity(self.slats.len());
        for s in &self.slats {
            let mut glues = BTreeMap::new();
            for (i, l) in &s.glues {
                if glues.insert(*i, l.clone()).is_some() {
                    return Err(Error::InvalidSystem(format!("slat {}: position {i} given twice", s.name)));
                }
            }
            slats.push(SlatType { name: s.name.clone(), length: s.length, orientation: s.orientation, glues });
        }
        let mut seed = Vec::new();
        for p in &self.seed {
            let t = slats
                .iter()
                .position(|s| s.name == p.slat)
                .ok_or_else(|| Error::InvalidSystem(format!("seed names unknown slat {:?}", p.slat)))?;
            seed.push(Placement { slat: t, anchor: (p.x, p.y) });
        }
        SlatSystem::new(slats, seed, self.cooperativity)
    }

    pub fn from_system(sys: &SlatSystem) -> SlatSystemDoc {
        SlatSystemDoc {
            cooperativity: sys.cooperativity,
            slats: sys
                .slats
                .iter()
                .map(|s| SlatDoc {
                    name: s.name.clone(),
                    orientation: s.orientation,
                    length: s.length,
                    glues: s.glues.iter().map(|(i, l)| (*i, l.clone())).collect(),
                })
                .collect(),
            seed: sys
                .seed
                .iter()
                .map(|p| SeedSlatDoc { x: p.anchor.0, y: p.anchor.1, slat: sys.slats[p.slat].name.clone() })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_round_trip_byte_identical() {
        for name in crate::fixtures::NAMES {
            let text = crate::fixtures::text(name).unwrap();
            let doc = parse_atam(text).unwrap();
            assert_eq!(to_canonical(&doc), text, "{name}");
            let sys = doc.system.to_system().unwrap();
            assert_eq!(TileSystemDoc::from_system(&sys), doc.system);
        }
    }

    #[test]
    fn unknown_field_reports_position() {
        let text = "{\n  \"format_version\": \"v1\",\n  \"kind\": \"atam\",\n  \"bogus\": 1,\n  \"system\": {\"temperature\": 2, \"tiles\": [], \"seed\": []}\n}";
        match parse(text) {
            Err(Error::Schema { line, msg, .. }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn version_checked_first() {
        let text = r#"{"format_version": "v9", "kind": "atam", "whatever": []}"#;
        assert_eq!(parse(text), Err(Error::VersionUnsupported("v9".into())));
    }

    #[test]
    fn strength_above_two_rejected() {
        let text = r#"{"format_version": "v1", "kind": "atam", "system": {"temperature": 2,
            "tiles": [{"name": "a", "E": ["g", 3]}], "seed": [{"x": 0, "y": 0, "tile": "a"}]}}"#;
        let doc = parse_atam(text).unwrap();
        let err = doc.system.to_system().unwrap_err();
        assert!(matches!(err, Error::Schema { .. }), "{err:?}");
    }

    #[test]
    fn asam_round_trip() {
        let text = r#"{
  "format_version": "v1",
  "kind": "asam",
  "system": {
    "cooperativity": 2,
    "slats": [
      {
        "name": "a",
        "orientation": "V",
        "length": 2,
        "glues": [
          [
            0,
            "x"
          ]
        ]
      }
    ],
    "seed": [
      {
        "x": 0,
        "y": 0,
        "slat": "a"
      }
    ]
  }
}
"#;
        let doc = parse_asam(text).unwrap();
        assert_eq!(to_canonical(&doc), text);
        let sys = doc.system.to_system().unwrap();
        assert_eq!(SlatSystemDoc::from_system(&sys), doc.system);
    }
}
