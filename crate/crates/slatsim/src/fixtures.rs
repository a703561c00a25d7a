//! Bundled example tile systems.

use crate::atam::TileSystem;
use crate::doc;
use crate::error::{Error, Result};

pub const NAMES: [&str; 7] =
    ["zigzag-counter", "zigzag-tm", "sierpinski", "atg-ns", "atg-ew", "mismatch", "competition"];

pub fn text(name: &str) -> Option<&'static str> {
    Some(match name {
        "zigzag-counter" => include_str!("../fixtures/zigzag-counter.json"),
        "zigzag-tm" => include_str!("../fixtures/zigzag-tm.json"),
        "sierpinski" => include_str!("../fixtures/sierpinski.json"),
        "atg-ns" => include_str!("../fixtures/atg-ns.json"),
        "atg-ew" => include_str!("../fixtures/atg-ew.json"),
        "mismatch" => include_str!("../fixtures/mismatch.json"),
        "competition" => include_str!("../fixtures/competition.json"),
        _ => return None,
    })
}

pub fn document(name: &str) -> Result<doc::AtamDocument> {
    let t = text(name).ok_or_else(|| Error::InvalidSystem(format!("no fixture named {name:?}")))?;
    doc::parse_atam(t)
}

pub fn load(name: &str) -> Result<TileSystem> {
    document(name)?.system.to_system()
}
