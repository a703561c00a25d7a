//! Tile-to-slat compilation: label schemes, backend dispatch, template
//! instantiation and seed conversion.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::asam::{Placement, SlatSystem, SlatType};
use crate::atam::{Coord, Dir, TileSystem, TileType};
use crate::doc::{AsamDocument, Kind, MacrotileDoc, RepresentationDoc, ResolvingDoc, SlatSystemDoc, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::iomark::{self, MarkedSystem, SystemClass};

mod directed;
mod full;
mod standard;
pub(crate) mod template;
mod zigzag;

pub use template::Role;
use template::Template;

/// Version tag of the built-in template geometries.
pub const TEMPLATE_VERSION: &str = "v1";

/// Versioned description of every backend's template geometry.
pub fn template_manifest() -> &'static str {
    include_str!("../../templates/manifest.json")
}

pub fn interior_glue_label(tile: &str, cell: Coord, in_cell: Coord, horizontal: bool) -> String {
    let star = if horizontal { "*" } else { "" };
    format!("{tile}:({},{}):({},{}){star}", cell.0, cell.1, in_cell.0, in_cell.1)
}

pub fn io_glue_label(glue: &str, in_cell: Coord, marker: Option<u32>, horizontal: bool) -> String {
    let star = if horizontal { "*" } else { "" };
    match marker {
        Some(m) => format!("{glue}:({},{}):{m}{star}", in_cell.0, in_cell.1),
        None => format!("{glue}:({},{}){star}", in_cell.0, in_cell.1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Backend {
    ZigZag,
    Standard,
    StandardATG,
    DirectedT2,
    Full,
}

impl Backend {
    pub const ALL: [Backend; 5] =
        [Backend::ZigZag, Backend::Standard, Backend::StandardATG, Backend::DirectedT2, Backend::Full];

    pub fn key(self) -> &'static str {
        self.class().key()
    }

    pub fn class(self) -> SystemClass {
        match self {
            Backend::ZigZag => SystemClass::ZigZag,
            Backend::Standard => SystemClass::Standard,
            Backend::StandardATG => SystemClass::StandardATG,
            Backend::DirectedT2 => SystemClass::DirectedT2,
            Backend::Full => SystemClass::General,
        }
    }

    pub fn for_class(c: SystemClass) -> Backend {
        match c {
            SystemClass::ZigZag => Backend::ZigZag,
            SystemClass::Standard => Backend::Standard,
            SystemClass::StandardATG => Backend::StandardATG,
            SystemClass::DirectedT2 => Backend::DirectedT2,
            SystemClass::General => Backend::Full,
        }
    }

    pub fn from_key(s: &str) -> Option<Backend> {
        SystemClass::from_key(s).map(Backend::for_class)
    }

    /// Macrotile side in cells.
    pub fn k(self) -> u32 {
        match self {
            Backend::ZigZag => 2,
            Backend::Standard | Backend::StandardATG => 3,
            Backend::DirectedT2 => 4,
            Backend::Full => 5,
        }
    }

    /// Resource bounds as multiples of c: (macrotile side, slats per macrotile, max length).
    pub fn limits(self) -> (u32, u32, u32) {
        match self {
            Backend::ZigZag => (2, 4, 3),
            Backend::Standard => (3, 8, 3),
            Backend::StandardATG => (3, 8, 4),
            Backend::DirectedT2 => (4, 10, 4),
            Backend::Full => (5, 13, 5),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

pub fn check_cooperativity(c: usize) -> Result<()> {
    if c % 2 == 1 {
        return Err(Error::OddCooperativity(c));
    }
    if c <= 2 {
        return Err(Error::CooperativityTooSmall(c));
    }
    Ok(())
}

/// Partial map from macrotile blocks to (marked) tile types.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationMap {
    pub scale: i32,
    pub tiles: Vec<TileType>,
    pub temperature: u32,
    /// Resolving slat type -> (tile, anchor offset within its block).
    pub resolving: BTreeMap<usize, (usize, Coord)>,
}

impl RepresentationMap {
    pub fn to_doc(&self, sas: &SlatSystem) -> RepresentationDoc {
        RepresentationDoc {
            scale: self.scale as u32,
            tiles: crate::doc::tiles_to_docs(&self.tiles),
            temperature: self.temperature,
            resolving: self
                .resolving
                .iter()
                .map(|(&s, &(t, (dx, dy)))| ResolvingDoc {
                    slat: sas.slats[s].name.clone(),
                    dx,
                    dy,
                    tile: self.tiles[t].name.clone(),
                })
                .collect(),
        }
    }

    pub fn from_doc(d: &RepresentationDoc, sas: &SlatSystem) -> Result<RepresentationMap> {
        let tiles = crate::doc::tiles_from_docs(&d.tiles);
        let mut resolving = BTreeMap::new();
        for r in &d.resolving {
            let s = sas.slat_index(&r.slat).ok_or_else(|| Error::schema(format!("unknown resolving slat {:?}", r.slat)))?;
            let t = tiles
                .iter()
                .position(|t| t.name == r.tile)
                .ok_or_else(|| Error::schema(format!("unknown tile {:?}", r.tile)))?;
            resolving.insert(s, (t, (r.dx, r.dy)));
        }
        if d.scale == 0 {
            return Err(Error::schema("scale must be positive"));
        }
        Ok(RepresentationMap { scale: d.scale as i32, tiles, temperature: d.temperature, resolving })
    }
}

/// What a compiled slat type is for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlatInfo {
    pub role: Role,
    /// Template instance the slat belongs to.
    pub instance: usize,
    pub group: String,
    /// Anchor relative to the instance's block origin.
    pub offset: Coord,
}

/// One instantiated template: a tile's macrotile, or a glue-owned input set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub name: String,
    /// Marked tile for tile templates.
    pub tile: Option<usize>,
    /// Marked glue and its receiving side for glue-owned input sets.
    pub glue: Option<(String, Dir)>,
    pub slats: Vec<usize>,
}

/// Semantic identity of a glue slot, used to audit label injectivity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Intent(pub String);

#[derive(Clone, Debug)]
pub struct CompiledSystem {
    pub backend: Backend,
    pub c: u32,
    pub sas: SlatSystem,
    pub repr: RepresentationMap,
    /// Marked, pruned and promoted system the templates were built from.
    pub marked: MarkedSystem,
    pub info: Vec<SlatInfo>,
    pub instances: Vec<Instance>,
    /// Per slat type, the intent behind each glue slot.
    pub intents: Vec<BTreeMap<u32, Intent>>,
    /// Per marked tile, the instances holding its template (two for dual zig-zag tiles).
    pub tile_instances: Vec<Vec<usize>>,
    /// Glue-owned input and output sets, keyed by (marked glue, side).
    pub glue_instances: BTreeMap<(String, Dir), usize>,
}

impl CompiledSystem {
    pub fn scale(&self) -> i32 {
        self.repr.scale
    }

    /// Slat types that make up the macrotile of marked tile `t`: its own
    /// template plus the glue-owned slat sets of its marked sides.
    pub fn macrotile_slats(&self, t: usize) -> Vec<Vec<usize>> {
        self.tile_instances[t]
            .iter()
            .map(|&i| {
                let mut v = self.instances[i].slats.clone();
                for d in Dir::ALL {
                    if self.marked.markings[t][d.idx()].is_some() {
                        let g = self.marked.system.tiles[t].glue(d).label.clone();
                        if let Some(&gi) = self.glue_instances.get(&(g, d)) {
                            v.extend(self.instances[gi].slats.iter().copied());
                        }
                    }
                }
                v
            })
            .collect()
    }

    /// Every label maps to one intent and every intent to one label.
    pub fn check_label_injectivity(&self) -> Result<()> {
        let mut by_label: BTreeMap<&str, &Intent> = BTreeMap::new();
        let mut by_intent: BTreeMap<&Intent, &str> = BTreeMap::new();
        for (s, slat) in self.sas.slats.iter().enumerate() {
            for (pos, label) in &slat.glues {
                let intent = self.intents[s]
                    .get(pos)
                    .ok_or_else(|| Error::InvalidSystem(format!("{}:{pos} has no intent record", slat.name)))?;
                if *by_label.entry(label).or_insert(intent) != intent {
                    return Err(Error::InvalidSystem(format!("label {label:?} carries two intents")));
                }
                if *by_intent.entry(intent).or_insert(label) != label.as_str() {
                    return Err(Error::InvalidSystem(format!("intent {:?} rendered as two labels", intent.0)));
                }
            }
        }
        Ok(())
    }

    pub fn representation_doc(&self) -> RepresentationDoc {
        self.repr.to_doc(&self.sas)
    }

    pub fn to_document(&self) -> AsamDocument {
        let mut macrotiles = Vec::new();
        for t in 0..self.marked.system.tiles.len() {
            for (k, v) in self.macrotile_slats(t).into_iter().enumerate() {
                let inst = &self.instances[self.tile_instances[t][k]];
                let slats = v.iter().map(|&s| self.sas.slats[s].name.clone()).collect();
                macrotiles.push(MacrotileDoc { tile: inst.name.clone(), slats });
            }
        }
        AsamDocument {
            format_version: FORMAT_VERSION.into(),
            kind: Kind::Asam,
            name: None,
            class: Some(self.backend.key().to_string()),
            provenance: Some(format!("templates {TEMPLATE_VERSION}")),
            system: SlatSystemDoc::from_system(&self.sas),
            representation: Some(self.representation_doc()),
            macrotiles: Some(macrotiles),
        }
    }
}

/// Resource audit of a compiled slat document (needs its class, its
/// representation scale and the macrotile table).
pub fn document_bounds(doc: &AsamDocument) -> Result<BoundsReport> {
    let class = doc.class.as_deref().ok_or_else(|| Error::schema("document has no `class`"))?;
    let backend = Backend::from_key(class).ok_or_else(|| Error::schema(format!("unknown class {class:?}")))?;
    let repr = doc.representation.as_ref().ok_or_else(|| Error::schema("document has no `representation`"))?;
    let mts = doc.macrotiles.as_ref().ok_or_else(|| Error::schema("document has no `macrotiles`"))?;
    let c = doc.system.cooperativity;
    let (k, n, l) = backend.limits();
    let r = BoundsReport {
        backend,
        c,
        macrotile_side: repr.scale,
        max_slats_per_macrotile: mts.iter().map(|m| m.slats.len()).max().unwrap_or(0),
        max_slat_length: doc.system.slats.iter().map(|s| s.length).max().unwrap_or(0),
        bound_side: k * c,
        bound_slats: n * c,
        bound_length: l * c,
    };
    if !r.within() {
        return Err(Error::BoundViolated(format!(
            "side {} (want {}), {} slats per macrotile (max {}), slat length {} (max {})",
            r.macrotile_side, r.bound_side, r.max_slats_per_macrotile, r.bound_slats, r.max_slat_length, r.bound_length
        )));
    }
    Ok(r)
}

/// Resource audit of a compiled system against its backend limits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub backend: Backend,
    pub c: u32,
    pub macrotile_side: u32,
    pub max_slats_per_macrotile: usize,
    pub max_slat_length: u32,
    pub bound_side: u32,
    pub bound_slats: u32,
    pub bound_length: u32,
}

impl BoundsReport {
    pub fn within(&self) -> bool {
        self.macrotile_side == self.bound_side
            && self.max_slats_per_macrotile as u32 <= self.bound_slats
            && self.max_slat_length <= self.bound_length
    }
}

pub fn check_resource_bounds(cs: &CompiledSystem) -> Result<BoundsReport> {
    let c = cs.c;
    let (k, n, l) = cs.backend.limits();
    let side = cs.repr.scale as u32;
    let max_len = cs.sas.slats.iter().map(|s| s.length).max().unwrap_or(0);
    let max_count =
        (0..cs.marked.system.tiles.len()).flat_map(|t| cs.macrotile_slats(t)).map(|v| v.len()).max().unwrap_or(0);
    let r = BoundsReport {
        backend: cs.backend,
        c,
        macrotile_side: side,
        max_slats_per_macrotile: max_count,
        max_slat_length: max_len,
        bound_side: k * c,
        bound_slats: n * c,
        bound_length: l * c,
    };
    if side != k * c {
        return Err(Error::BoundViolated(format!("macrotile side {side} != {}", k * c)));
    }
    if max_count as u32 > n * c {
        return Err(Error::BoundViolated(format!("{max_count} slats in one macrotile > {}", n * c)));
    }
    if max_len > l * c {
        let s = cs.sas.slats.iter().find(|s| s.length == max_len).unwrap();
        return Err(Error::BoundViolated(format!("slat {} has length {max_len} > {}", s.name, l * c)));
    }
    Ok(r)
}

/// Mark, prune, promote and validate: the system the templates are built from.
pub fn prepare(sys: &TileSystem) -> Result<MarkedSystem> {
    for t in &sys.tiles {
        for g in &t.glues {
            if g.label.contains('*') || g.label.contains(':') {
                return Err(Error::InvalidSystem(format!(
                    "glue label {:?} of tile {} contains a reserved character ('*' or ':')",
                    g.label, t.name
                )));
            }
        }
        if t.name.contains(':') || t.name.contains('*') {
            return Err(Error::InvalidSystem(format!("tile name {:?} contains a reserved character", t.name)));
        }
    }
    if sys.seed.is_empty() {
        return Err(Error::SeedTileMissing("empty seed".into()));
    }
    let mut ms = iomark::io_mark(&split_mixed_strengths(sys))?;
    ms.unmarked = sys.clone();
    let live = iomark::live_tiles_capped(&ms, 256, 20_000);
    Ok(ms.restrict(&live).promoted())
}

/// Glues bind only on equal label and strength; slat labels carry no
/// strength, so a label used at two strengths becomes one label per strength.
fn split_mixed_strengths(sys: &TileSystem) -> TileSystem {
    let mut strengths: BTreeMap<&str, std::collections::BTreeSet<u8>> = BTreeMap::new();
    for t in &sys.tiles {
        for g in t.glues.iter().filter(|g| !g.is_null()) {
            strengths.entry(&g.label).or_default().insert(g.strength);
        }
    }
    let taken: std::collections::BTreeSet<&str> = strengths.keys().copied().collect();
    let mut rename: BTreeMap<(String, u8), String> = BTreeMap::new();
    for (l, ss) in strengths.iter().filter(|(_, ss)| ss.len() > 1) {
        let mut sep = "~".to_string();
        while ss.iter().any(|s| taken.contains(format!("{l}{sep}{s}").as_str())) {
            sep.push('~');
        }
        for s in ss {
            rename.insert((l.to_string(), *s), format!("{l}{sep}{s}"));
        }
    }
    let mut out = sys.clone();
    for t in &mut out.tiles {
        for g in &mut t.glues {
            if let Some(n) = rename.get(&(g.label.clone(), g.strength)) {
                g.label = n.clone();
            }
        }
    }
    out
}

pub fn compile(sys: &TileSystem, backend: Backend, c: usize) -> Result<CompiledSystem> {
    check_cooperativity(c)?;
    let ms = prepare(sys)?;
    compile_marked(ms, backend, c as u32)
}

pub fn compile_zigzag(sys: &TileSystem, c: usize) -> Result<CompiledSystem> {
    compile(sys, Backend::ZigZag, c)
}

pub fn compile_standard(sys: &TileSystem, c: usize) -> Result<CompiledSystem> {
    compile(sys, Backend::Standard, c)
}

pub fn compile_standard_atg(sys: &TileSystem, c: usize) -> Result<CompiledSystem> {
    compile(sys, Backend::StandardATG, c)
}

pub fn compile_directed_t2(sys: &TileSystem, c: usize) -> Result<CompiledSystem> {
    compile(sys, Backend::DirectedT2, c)
}

pub fn compile_full(sys: &TileSystem, c: usize) -> Result<CompiledSystem> {
    compile(sys, Backend::Full, c)
}

/// The arbitrary-temperature extension is not provided: strengths above 2
/// would be split across several glue slat groups.
pub fn compile_arbitrary_tau(_sys: &TileSystem, _c: usize) -> Result<CompiledSystem> {
    Err(Error::Unsupported(
        "arbitrary-temperature compilation (distribute a strength-s glue over s slat groups) is not implemented".into(),
    ))
}

fn compile_marked(ms: MarkedSystem, backend: Backend, c: u32) -> Result<CompiledSystem> {
    let built = match backend {
        Backend::ZigZag => zigzag::build(&ms, c)?,
        Backend::Standard => standard::build(&ms, c, false)?,
        Backend::StandardATG => standard::build(&ms, c, true)?,
        Backend::DirectedT2 => directed::build(&ms, c)?,
        Backend::Full => full::build(&ms, c)?,
    };
    instantiate(ms, backend, c, built)
}

/// Backend output before instantiation.
pub(crate) struct Built {
    /// Per marked tile, its templates.
    pub tiles: Vec<Vec<Template>>,
    /// Glue-owned input and output sets, keyed by (marked glue, side).
    pub glues: Vec<((String, Dir), Template)>,
    /// Per seed position, the template index used (within `tiles[t]`) and
    /// whether glue-owned input sets of its inputs join the seed (output sets
    /// always do).
    pub seed: Vec<(Coord, usize, usize, bool)>,
}

fn instantiate(ms: MarkedSystem, backend: Backend, c: u32, built: Built) -> Result<CompiledSystem> {
    let m = (backend.k() * c) as i32;
    let mut slats = Vec::new();
    let mut info = Vec::new();
    let mut intents = Vec::new();
    let mut instances = Vec::new();
    let mut resolving = BTreeMap::new();
    let mut tile_instances = vec![Vec::new(); ms.system.tiles.len()];
    let mut glue_instances = BTreeMap::new();
    let push = |tpl: &Template,
                    tile: Option<usize>,
                    glue: Option<(String, Dir)>,
                    slats: &mut Vec<SlatType>,
                    info: &mut Vec<SlatInfo>,
                    intents: &mut Vec<BTreeMap<u32, Intent>>,
                    instances: &mut Vec<Instance>|
     -> usize {
        let inst = instances.len();
        let mut ids = Vec::new();
        for s in &tpl.slats {
            let id = slats.len();
            slats.push(SlatType {
                name: format!("{}.{}.{}", tpl.name, s.group, s.index),
                length: s.len,
                orientation: s.o,
                glues: s.glues.iter().map(|(&i, (l, _))| (i, l.clone())).collect(),
            });
            intents.push(s.glues.iter().map(|(&i, (_, it))| (i, it.clone())).collect());
            info.push(SlatInfo { role: s.role.clone(), instance: inst, group: s.group.clone(), offset: s.anchor });
            ids.push(id);
        }
        instances.push(Instance { name: tpl.name.clone(), tile, glue, slats: ids });
        inst
    };
    for (t, tpls) in built.tiles.iter().enumerate() {
        for tpl in tpls {
            let inst = push(tpl, Some(t), None, &mut slats, &mut info, &mut intents, &mut instances);
            tile_instances[t].push(inst);
            for (j, s) in tpl.slats.iter().enumerate() {
                if s.role == Role::Resolving {
                    resolving.insert(instances[inst].slats[j], (t, s.anchor));
                }
            }
        }
    }
    for (key, tpl) in &built.glues {
        let inst = push(tpl, None, Some(key.clone()), &mut slats, &mut info, &mut intents, &mut instances);
        glue_instances.insert(key.clone(), inst);
    }

    let mut seed = Vec::new();
    for &(pos, t, variant, with_inputs) in &built.seed {
        let origin = (pos.0 * m, pos.1 * m);
        let inst = *tile_instances[t].get(variant).ok_or_else(|| Error::SeedTileMissing(ms.system.tiles[t].name.clone()))?;
        let tpl = &built.tiles[t][variant];
        for (j, s) in tpl.slats.iter().enumerate() {
            if s.in_seed {
                seed.push(Placement { slat: instances[inst].slats[j], anchor: (origin.0 + s.anchor.0, origin.1 + s.anchor.1) });
            }
        }
        for d in Dir::ALL {
            match ms.markings[t][d.idx()] {
                Some(iomark::Mark::Output) => {}
                Some(iomark::Mark::Input) if with_inputs => {}
                _ => continue,
            }
            {
                let key = (ms.system.tiles[t].glue(d).label.clone(), d);
                if let Some(&gi) = glue_instances.get(&key) {
                    for &id in &instances[gi].slats {
                        let off = info[id].offset;
                        seed.push(Placement { slat: id, anchor: (origin.0 + off.0, origin.1 + off.1) });
                    }
                }
            }
        }
    }
    if seed.is_empty() {
        return Err(Error::SeedTileMissing("seed converts to no slats".into()));
    }
    seed.sort();
    seed.dedup();
    let sas = SlatSystem::new(slats, seed, c)?;
    let repr = RepresentationMap {
        scale: m,
        tiles: ms.system.tiles.clone(),
        temperature: ms.system.temperature,
        resolving,
    };
    Ok(CompiledSystem { backend, c, sas, repr, marked: ms, info, instances, intents, tile_instances, glue_instances })
}

/// Seed slat placements for a compiled system (already part of its slat system).
pub fn convert_seed(cs: &CompiledSystem) -> Result<Vec<Placement>> {
    if cs.sas.seed.is_empty() {
        return Err(Error::SeedTileMissing("no seed slats".into()));
    }
    Ok(cs.sas.seed.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atam::{Glue, TileAssembly};
    use crate::fixtures;

    fn every_compilation() -> Vec<(String, CompiledSystem)> {
        let mut v = Vec::new();
        for name in fixtures::NAMES {
            let sys = fixtures::load(name).unwrap();
            for b in Backend::ALL {
                if let Ok(cs) = compile(&sys, b, 4) {
                    v.push((format!("{name}/{b}"), cs));
                }
            }
        }
        v
    }

    #[test]
    fn labels_are_injective() {
        for (name, cs) in every_compilation() {
            cs.check_label_injectivity().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn cooperativity_errors() {
        let sys = fixtures::load("zigzag-counter").unwrap();
        for c in [0, 1, 2, 3, 5] {
            let e = compile(&sys, Backend::ZigZag, c).unwrap_err();
            assert!(e.to_string().contains("cooperativity must be even and > 2"), "{e}");
        }
        assert!(compile(&sys, Backend::ZigZag, 6).is_ok());
    }

    #[test]
    fn class_mismatch_is_reported() {
        let sys = fixtures::load("sierpinski").unwrap();
        assert!(matches!(compile_zigzag(&sys, 4), Err(Error::SignatureNotZigZag { .. })));
        let atg = fixtures::load("atg-ns").unwrap();
        assert!(matches!(compile_standard(&atg, 4), Err(Error::SignatureNotStandard { .. })));
        assert!(matches!(compile_arbitrary_tau(&sys, 4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn reserved_characters_are_rejected() {
        let t = TileType::new("a", Glue::null(), Glue::new("x:y", 2), Glue::null(), Glue::null());
        let sys = TileSystem::new(vec![t], TileAssembly::single((0, 0), 0), 2).unwrap();
        assert!(matches!(prepare(&sys), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn label_at_two_strengths_does_not_bind_across() {
        let g = |l: &str, s| Glue::new(l, s);
        let n = Glue::null;
        let seed = TileType::new("seed", n(), g("a", 2), n(), n());
        let t0 = TileType::new("t0", n(), g("b", 2), n(), g("a", 2));
        let t1 = TileType::new("t1", n(), g("b", 1), n(), g("b", 2));
        let sys = TileSystem::new(vec![seed, t0, t1], TileAssembly::single((0, 0), 0), 2).unwrap();
        let cs = compile_full(&sys, 4).unwrap();
        assert_eq!(cs.marked.unmarked, sys);
        let run = crate::asam::run_asam(&cs.sas, 5000, 0);
        assert!(run.terminal);
        assert_eq!(crate::verify::represent_assembly(&cs, &run.assembly).unwrap().len(), 3);
    }

    #[test]
    fn seed_is_on_template_grid() {
        for (name, cs) in every_compilation() {
            let m = cs.scale();
            for p in &cs.sas.seed {
                let off = cs.info[p.slat].offset;
                let o = (p.anchor.0 - off.0, p.anchor.1 - off.1);
                assert!(o.0 % m == 0 && o.1 % m == 0, "{name}: {}", cs.sas.slats[p.slat].name);
            }
            assert_eq!(convert_seed(&cs).unwrap(), cs.sas.seed);
        }
    }

    #[test]
    fn document_round_trips_and_audits() {
        let cs = compile(&fixtures::load("zigzag-counter").unwrap(), Backend::ZigZag, 4).unwrap();
        let d = cs.to_document();
        let text = crate::doc::to_canonical(&d);
        let back = crate::doc::parse_asam(&text).unwrap();
        assert_eq!(crate::doc::to_canonical(&back), text);
        assert_eq!(document_bounds(&back).unwrap(), check_resource_bounds(&cs).unwrap());
        let sas = back.system.to_system().unwrap();
        assert_eq!(sas.slats, cs.sas.slats);
        let repr = RepresentationMap::from_doc(back.representation.as_ref().unwrap(), &sas).unwrap();
        assert_eq!(repr, cs.repr);
    }

    #[test]
    fn compilation_is_deterministic() {
        let sys = fixtures::load("sierpinski").unwrap();
        for b in [Backend::Standard, Backend::Full] {
            let a = crate::doc::to_canonical(&compile(&sys, b, 4).unwrap().to_document());
            let c = crate::doc::to_canonical(&compile(&sys, b, 4).unwrap().to_document());
            assert_eq!(a, c);
        }
    }

    #[test]
    fn manifest_names_every_backend() {
        let v: serde_json::Value = serde_json::from_str(template_manifest()).unwrap();
        assert_eq!(v["version"], TEMPLATE_VERSION);
        for b in Backend::ALL {
            assert_eq!(v["backends"][b.key()]["k"], b.k(), "{b}");
        }
    }

    #[test]
    fn strength_one_outputs_use_half_the_lanes() {
        let cs = compile(&fixtures::load("atg-ns").unwrap(), Backend::StandardATG, 4).unwrap();
        for (t, insts) in cs.tile_instances.iter().enumerate() {
            let sig = cs.marked.signature(t);
            for &i in insts {
                for &(d, k) in &sig.outputs {
                    let n = cs.instances[i].slats.iter().filter(|&&s| cs.info[s].role == Role::Output(d)).count();
                    assert_eq!(n, if k == 1 { 2 } else { 4 }, "{} {d:?}", cs.instances[i].name);
                }
            }
        }
    }
}
