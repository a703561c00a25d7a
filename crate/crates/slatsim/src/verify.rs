//! Macrotile representation and bounded checks of the simulation
//! definitions: follows, equivalent productions, models and clean mapping.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::asam::{run_asam_with, Orientation, Placement, SlatAssembly};
use crate::atam::{self, Coord, Dir, TileAssembly};
use crate::compiler::{CompiledSystem, Role};
use crate::error::{Error, Result};

/// Default cap on enumerated slat states.
pub const DEFAULT_STATE_CAP: usize = 400_000;

fn block_of(m: i32, cell: Coord) -> Coord {
    (cell.0.div_euclid(m), cell.1.div_euclid(m))
}

/// Block and marked tile resolved by a single placement, if it is a
/// resolving slat sitting at its template position.
pub fn represent_placement(cs: &CompiledSystem, p: &Placement) -> Option<(Coord, usize)> {
    let &(t, off) = cs.repr.resolving.get(&p.slat)?;
    let m = cs.repr.scale;
    let o = (p.anchor.0 - off.0, p.anchor.1 - off.1);
    if o.0.rem_euclid(m) != 0 || o.1.rem_euclid(m) != 0 {
        return None;
    }
    Some(((o.0 / m, o.1 / m), t))
}

fn ambiguous(cs: &CompiledSystem, b: Coord, a: usize, t: usize) -> Error {
    Error::AmbiguousResolution {
        x: b.0,
        y: b.1,
        a: cs.repr.tiles[a].name.clone(),
        b: cs.repr.tiles[t].name.clone(),
    }
}

/// Marked tile represented by the macrotile at `block`.
pub fn represent_macrotile(cs: &CompiledSystem, asm: &SlatAssembly, block: Coord) -> Result<Option<usize>> {
    let mut out = None;
    for p in asm.placements() {
        if let Some((b, t)) = represent_placement(cs, p) {
            if b != block {
                continue;
            }
            match out {
                Some(a) if a != t => return Err(ambiguous(cs, b, a, t)),
                _ => out = Some(t),
            }
        }
    }
    Ok(out)
}

/// Blockwise representation in marked tiles.
pub fn represent_marked(cs: &CompiledSystem, asm: &SlatAssembly) -> Result<TileAssembly> {
    let mut tr = Tracker::new(cs);
    for p in asm.placements() {
        tr.add(p)?;
    }
    Ok(tr.marked_image())
}

/// `R*`: the represented assembly over the original, unmarked tile set.
pub fn represent_assembly(cs: &CompiledSystem, asm: &SlatAssembly) -> Result<TileAssembly> {
    Ok(cs.marked.unmark(&represent_marked(cs, asm)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CleanReport {
    pub clean: bool,
    /// A nonempty block with no resolved block at distance ≤ 1.
    pub witness: Option<Coord>,
}

pub fn maps_cleanly(cs: &CompiledSystem, asm: &SlatAssembly) -> Result<CleanReport> {
    let mut tr = Tracker::new(cs);
    for p in asm.placements() {
        tr.add(p)?;
    }
    let witness = tr.unclean();
    Ok(CleanReport { clean: witness.is_none(), witness })
}

/// Incremental representation of a growing slat assembly.
#[derive(Clone, Debug)]
pub struct Tracker<'a> {
    cs: &'a CompiledSystem,
    image: BTreeMap<Coord, usize>,
    unclean: BTreeSet<Coord>,
}

impl<'a> Tracker<'a> {
    pub fn new(cs: &'a CompiledSystem) -> Tracker<'a> {
        Tracker { cs, image: BTreeMap::new(), unclean: BTreeSet::new() }
    }

    fn resolved_near(&self, b: Coord) -> bool {
        self.image.contains_key(&b) || Dir::ALL.iter().any(|d| self.image.contains_key(&d.step(b)))
    }

    /// Record a placement; returns the newly resolved block, if any.
    pub fn add(&mut self, p: &Placement) -> Result<Option<(Coord, usize)>> {
        let mut event = None;
        if let Some((b, t)) = represent_placement(self.cs, p) {
            match self.image.get(&b) {
                Some(&a) if a != t => return Err(ambiguous(self.cs, b, a, t)),
                Some(_) => {}
                None => {
                    self.image.insert(b, t);
                    self.unclean.remove(&b);
                    for d in Dir::ALL {
                        self.unclean.remove(&d.step(b));
                    }
                    event = Some((b, t));
                }
            }
        }
        let s = &self.cs.sas.slats[p.slat];
        let m = self.cs.repr.scale;
        let mut blocks = BTreeSet::new();
        for i in 0..s.length {
            blocks.insert(block_of(m, p.cell(s.orientation, i)));
        }
        for b in blocks {
            if !self.resolved_near(b) {
                self.unclean.insert(b);
            }
        }
        Ok(event)
    }

    pub fn resolved(&self, b: Coord) -> Option<usize> {
        self.image.get(&b).copied()
    }

    pub fn unclean(&self) -> Option<Coord> {
        self.unclean.iter().next().copied()
    }

    pub fn marked_image(&self) -> TileAssembly {
        TileAssembly::from_pairs(self.image.iter().map(|(&b, &t)| (b, t)))
    }

    pub fn image(&self) -> TileAssembly {
        TileAssembly::from_pairs(self.image.iter().map(|(&b, &t)| (b, self.cs.marked.origin[t])))
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }
}

/// Block origin of a placement under its template offset, if on the grid.
fn template_block(cs: &CompiledSystem, p: &Placement) -> Option<Coord> {
    let off = cs.info[p.slat].offset;
    let m = cs.repr.scale;
    let o = (p.anchor.0 - off.0, p.anchor.1 - off.1);
    (o.0.rem_euclid(m) == 0 && o.1.rem_euclid(m) == 0).then_some((o.0 / m, o.1 / m))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// The image changed by something other than one valid tile attachment.
    Follows,
    /// A nonempty block with no resolved block nearby.
    Unclean,
    /// A block's image changed after it was defined.
    Monotone,
    /// A non-resolving slat of a macrotile attached before the macrotile resolved.
    Precedence,
    /// A slat attached away from every template position.
    Unexpected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub run: usize,
    pub rng_seed: u64,
    pub step: usize,
    pub detail: String,
    /// Tile attachments of the image up to the violation.
    pub trace: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub runs: usize,
    pub steps: usize,
    pub tile_attachments: usize,
    pub terminal_runs: usize,
    pub violations: BTreeMap<String, usize>,
    pub first: Option<Violation>,
}

impl RunReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, k: &ViolationKind) -> usize {
        self.violations.get(&format!("{k:?}")).copied().unwrap_or(0)
    }

    fn record(&mut self, v: Violation) {
        *self.violations.entry(format!("{:?}", v.kind)).or_insert(0) += 1;
        if self.first.is_none() {
            self.first = Some(v);
        }
    }
}

/// Checks one placement against the tracker state before it is recorded.
fn precedence(cs: &CompiledSystem, tr: &Tracker, p: &Placement) -> Option<(ViolationKind, String)> {
    let info = &cs.info[p.slat];
    let inst = &cs.instances[info.instance];
    let gated = match info.role {
        Role::Resolving | Role::Decision | Role::Input(_) => false,
        Role::Output(_) => true,
        Role::Body | Role::Layout => inst.tile.is_some(),
    };
    let name = &cs.sas.slats[p.slat].name;
    let Some(b) = template_block(cs, p) else {
        return Some((ViolationKind::Unexpected, format!("{name} at {:?} is off the template grid", p.anchor)));
    };
    if !gated {
        return None;
    }
    match (tr.resolved(b), inst.tile) {
        (None, _) => Some((ViolationKind::Precedence, format!("{name} attached in unresolved block {b:?}"))),
        (Some(t), Some(u)) if t != u => Some((
            ViolationKind::Precedence,
            format!("{name} attached in block {b:?} resolved to {}", cs.repr.tiles[t].name),
        )),
        _ => None,
    }
}

/// Seeded runs checking, at every attachment: follows (image unchanged or a
/// single valid attachment in the original system), clean mapping,
/// monotonicity and resolution precedence.
pub fn check_runs(cs: &CompiledSystem, runs: usize, steps: usize, rng_seed: u64) -> RunReport {
    let mut rep = RunReport { runs, ..Default::default() };
    let unmarked = &cs.marked.unmarked;
    for r in 0..runs {
        let seed = rng_seed.wrapping_add(r as u64);
        let mut tr = Tracker::new(cs);
        let mut trace = Vec::new();
        let mut bad: Option<Violation> = None;
        for p in &cs.sas.seed {
            if let Err(e) = tr.add(p) {
                bad = Some(Violation {
                    kind: ViolationKind::Monotone,
                    run: r,
                    rng_seed: seed,
                    step: 0,
                    detail: e.to_string(),
                    trace: vec![],
                });
                break;
            }
        }
        if let Some(v) = bad.take() {
            rep.record(v);
            continue;
        }
        let mut step = 0;
        let mut attachments = 0;
        let run = run_asam_with(&cs.sas, steps, seed, |_, p| {
            step += 1;
            if bad.is_some() {
                return;
            }
            let mk = |kind, detail: String, trace: &Vec<String>| Violation {
                kind,
                run: r,
                rng_seed: seed,
                step,
                detail,
                trace: trace.clone(),
            };
            if let Some((kind, detail)) = precedence(cs, &tr, &p) {
                bad = Some(mk(kind, detail, &trace));
                return;
            }
            let before = tr.image();
            match tr.add(&p) {
                Err(e) => bad = Some(mk(ViolationKind::Monotone, e.to_string(), &trace)),
                Ok(Some((b, t))) => {
                    let u = cs.marked.origin[t];
                    let name = &unmarked.tiles[u].name;
                    trace.push(format!("{name}@{b:?}"));
                    attachments += 1;
                    let s = atam::binding_strength(&unmarked.tiles, &before, b, u);
                    if before.contains(b) || s < unmarked.temperature {
                        bad = Some(mk(
                            ViolationKind::Follows,
                            format!("{name} at {b:?} binds with strength {s} < {}", unmarked.temperature),
                            &trace,
                        ));
                        return;
                    }
                }
                Ok(None) => {}
            }
            if let Some(w) = tr.unclean() {
                bad = Some(mk(ViolationKind::Unclean, format!("block {w:?} is not near a resolved block"), &trace));
            }
        });
        rep.steps += run.events.len();
        rep.tile_attachments += attachments;
        if run.terminal {
            rep.terminal_runs += 1;
        }
        if let Some(v) = bad {
            rep.record(v);
        }
    }
    rep
}

/// Follows check: seeded runs, every step's image unchanged or one valid
/// attachment (also reports clean mapping, monotonicity and precedence).
pub fn check_follows(cs: &CompiledSystem, runs: usize, steps: usize, rng_seed: u64) -> RunReport {
    check_runs(cs, runs, steps, rng_seed)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LocalityReport {
    pub runs: usize,
    pub steps: usize,
    /// Attachments forming a bond count other than `c`.
    pub bond_count_violations: usize,
    /// Steps whose frontier bonds span more than one c×c cell.
    pub locality_violations: usize,
    pub first: Option<String>,
}

impl LocalityReport {
    pub fn ok(&self) -> bool {
        self.bond_count_violations == 0 && self.locality_violations == 0
    }
}

/// Zig-zag growth: every attachment forms exactly `c` bonds and every
/// frontier placement bonds inside one common c×c cell.
pub fn check_zigzag_locality(cs: &CompiledSystem, runs: usize, steps: usize, rng_seed: u64) -> LocalityReport {
    let c = cs.c as i32;
    let mut rep = LocalityReport { runs, ..Default::default() };
    let cells_of_frontier = |asm: &mut SlatAssembly| -> BTreeSet<Coord> {
        let f = asm.frontier();
        f.iter().flat_map(|(p, _)| asm.bond_cells(p)).map(|x| (x.0.div_euclid(c), x.1.div_euclid(c))).collect()
    };
    for r in 0..runs {
        let seed = rng_seed.wrapping_add(r as u64);
        let mut asm0 = cs.sas.seed_assembly();
        let first = cells_of_frontier(&mut asm0);
        if first.len() > 1 {
            rep.locality_violations += 1;
            rep.first.get_or_insert(format!("run {r}: seed frontier bonds in cells {first:?}"));
        }
        let mut step = 0;
        let run = run_asam_with(&cs.sas, steps, seed, |asm, p| {
            step += 1;
            let mut a = asm.clone();
            let cells = cells_of_frontier(&mut a);
            if cells.len() > 1 {
                rep.locality_violations += 1;
                rep.first.get_or_insert(format!("run {r} step {step} after {p:?}: frontier bonds in cells {cells:?}"));
            }
        });
        for (i, (p, n)) in run.events.iter().enumerate() {
            if *n != cs.c {
                rep.bond_count_violations += 1;
                rep.first.get_or_insert(format!("run {r} step {}: {p:?} formed {n} bonds", i + 1));
            }
        }
        rep.steps += run.events.len();
    }
    rep
}

/// Every template placement that can occur while images stay within
/// `tiles` tiles, plus input sets facing every output of those tiles.
pub fn potential_universe(cs: &CompiledSystem, tiles: usize, cap: usize) -> Result<HashSet<Placement>> {
    let ms = &cs.marked;
    let m = cs.repr.scale;
    let set = atam::producible_set_capped(&ms.system, tiles, cap)?;
    let mut seen = HashSet::new();
    let mut out: HashSet<Placement> = cs.sas.seed.iter().copied().collect();
    let add_inst = |out: &mut HashSet<Placement>, inst: usize, b: Coord| {
        for &s in &cs.instances[inst].slats {
            let off = cs.info[s].offset;
            out.insert(Placement { slat: s, anchor: (b.0 * m + off.0, b.1 * m + off.1) });
        }
    };
    for a in &set {
        for (b, t) in a.iter() {
            if !seen.insert((b, t)) {
                continue;
            }
            for &i in &cs.tile_instances[t] {
                add_inst(&mut out, i, b);
            }
            for d in Dir::ALL {
                let Some(mk) = ms.markings[t][d.idx()] else { continue };
                let g = ms.system.tiles[t].glue(d).label.clone();
                if let Some(&i) = cs.glue_instances.get(&(g.clone(), d)) {
                    add_inst(&mut out, i, b);
                }
                if mk == crate::iomark::Mark::Output {
                    if let Some(&i) = cs.glue_instances.get(&(g, d.opposite())) {
                        add_inst(&mut out, i, d.step(b));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Bounded slat state graph, reduced by taking a single independent,
/// image-preserving placement whenever one is enabled.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub tile_bound: usize,
    /// Interned images (original tiles).
    pub images: Vec<TileAssembly>,
    pub state_image: Vec<usize>,
    pub state_size: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
    /// Frontier empty (not merely truncated by the bound).
    pub terminal: Vec<bool>,
    pub truncated: usize,
    pub reduced_steps: usize,
    pub unclean: Vec<String>,
    pub unexpected: Vec<String>,
    pub ambiguous: Vec<String>,
}

pub fn enumerate_states(cs: &CompiledSystem, tile_bound: usize, state_cap: usize) -> Result<StateGraph> {
    let universe = potential_universe(cs, tile_bound + 1, atam::DEFAULT_STATE_CAP)?;
    let mut cover: HashMap<(bool, Coord), u32> = HashMap::new();
    for p in &universe {
        let s = &cs.sas.slats[p.slat];
        for i in 0..s.length {
            *cover.entry((s.orientation == Orientation::H, p.cell(s.orientation, i))).or_insert(0) += 1;
        }
    }
    let safe = |p: &Placement| {
        let s = &cs.sas.slats[p.slat];
        universe.contains(p)
            && (0..s.length).all(|i| cover[&(s.orientation == Orientation::H, p.cell(s.orientation, i))] == 1)
    };

    let mut g = StateGraph {
        tile_bound,
        images: Vec::new(),
        state_image: Vec::new(),
        state_size: Vec::new(),
        edges: Vec::new(),
        terminal: Vec::new(),
        truncated: 0,
        reduced_steps: 0,
        unclean: Vec::new(),
        unexpected: Vec::new(),
        ambiguous: Vec::new(),
    };
    let mut image_ids: HashMap<TileAssembly, usize> = HashMap::new();
    let mut ids: HashMap<Vec<Placement>, usize> = HashMap::new();
    let mut queue = VecDeque::new();

    let seed = cs.sas.seed_assembly();
    let mut tr = Tracker::new(cs);
    for p in seed.placements() {
        tr.add(p)?;
    }
    let mut new_state = |g: &mut StateGraph, asm: &SlatAssembly, tr: &Tracker| -> usize {
        let img = tr.image();
        let n = image_ids.len();
        let iid = *image_ids.entry(img.clone()).or_insert_with(|| {
            g.images.push(img);
            n
        });
        if let Some(w) = tr.unclean() {
            if g.unclean.len() < 10 {
                g.unclean.push(format!("state {} block {w:?}", g.state_image.len()));
            }
        }
        g.state_image.push(iid);
        g.state_size.push(asm.len());
        g.edges.push(Vec::new());
        g.terminal.push(false);
        g.state_image.len() - 1
    };
    let s0 = new_state(&mut g, &seed, &tr);
    ids.insert(seed.canonical(), s0);
    queue.push_back((s0, seed, tr));

    while let Some((id, mut asm, tr)) = queue.pop_front() {
        let frontier: Vec<Placement> = asm.frontier().into_iter().map(|x| x.0).collect();
        if frontier.is_empty() {
            g.terminal[id] = true;
            continue;
        }
        let changes = |p: &Placement| match represent_placement(cs, p) {
            Some((b, _)) => tr.resolved(b).is_none(),
            None => false,
        };
        let pick: Vec<Placement> = match frontier.iter().find(|p| !changes(p) && safe(p)) {
            Some(&p) => {
                g.reduced_steps += 1;
                vec![p]
            }
            None => frontier,
        };
        for p in pick {
            if changes(&p) && tr.len() >= tile_bound {
                g.truncated += 1;
                continue;
            }
            if !universe.contains(&p) {
                if g.unexpected.len() < 10 {
                    g.unexpected.push(format!("{} at {:?}", cs.sas.slats[p.slat].name, p.anchor));
                }
                continue;
            }
            let mut child = asm.clone();
            child.place_unchecked(p)?;
            let key = child.canonical();
            if let Some(&cid) = ids.get(&key) {
                g.edges[id].push(cid);
                continue;
            }
            let mut ctr = tr.clone();
            if let Err(e) = ctr.add(&p) {
                if g.ambiguous.len() < 10 {
                    g.ambiguous.push(e.to_string());
                }
                continue;
            }
            if ids.len() >= state_cap {
                return Err(Error::BoundTooLarge { cap: state_cap });
            }
            let cid = new_state(&mut g, &child, &ctr);
            ids.insert(key, cid);
            g.edges[id].push(cid);
            queue.push_back((cid, child, ctr));
        }
    }
    Ok(g)
}

fn show(sys: &atam::TileSystem, a: &TileAssembly) -> String {
    let v: Vec<String> = a.iter().map(|(p, t)| format!("{}@({},{})", sys.tiles[t].name, p.0, p.1)).collect();
    format!("{{{}}}", v.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub tile_bound: usize,
    pub states: usize,
    pub reduced_steps: usize,
    pub truncated: usize,
    pub tile_images: usize,
    pub slat_images: usize,
    pub missing: Vec<String>,
    pub extra: Vec<String>,
    pub tile_terminals: Vec<String>,
    pub slat_terminals: Vec<String>,
    pub terminals_agree: bool,
    pub unclean: Vec<String>,
    pub unexpected: Vec<String>,
    pub ambiguous: Vec<String>,
}

impl EquivalenceReport {
    pub fn ok(&self) -> bool {
        self.missing.is_empty()
            && self.extra.is_empty()
            && self.terminals_agree
            && self.unclean.is_empty()
            && self.unexpected.is_empty()
            && self.ambiguous.is_empty()
    }
}

pub fn equivalence_from_graph(cs: &CompiledSystem, g: &StateGraph) -> Result<EquivalenceReport> {
    let t = &cs.marked.unmarked;
    let tile_set = atam::producible_set(t, g.tile_bound)?;
    let slat_set: BTreeSet<TileAssembly> = g.images.iter().cloned().collect();
    let tile_terms: BTreeSet<TileAssembly> = atam::terminal_assemblies(t, &tile_set).into_iter().collect();
    let slat_terms: BTreeSet<TileAssembly> =
        (0..g.terminal.len()).filter(|&s| g.terminal[s]).map(|s| g.images[g.state_image[s]].clone()).collect();
    Ok(EquivalenceReport {
        tile_bound: g.tile_bound,
        states: g.state_image.len(),
        reduced_steps: g.reduced_steps,
        truncated: g.truncated,
        tile_images: tile_set.len(),
        slat_images: slat_set.len(),
        missing: tile_set.difference(&slat_set).map(|a| show(t, a)).collect(),
        extra: slat_set.difference(&tile_set).map(|a| show(t, a)).collect(),
        tile_terminals: tile_terms.iter().map(|a| show(t, a)).collect(),
        slat_terminals: slat_terms.iter().map(|a| show(t, a)).collect(),
        terminals_agree: tile_terms == slat_terms,
        unclean: g.unclean.clone(),
        unexpected: g.unexpected.clone(),
        ambiguous: g.ambiguous.clone(),
    })
}

pub fn check_equivalent_productions(cs: &CompiledSystem, tile_bound: usize) -> Result<EquivalenceReport> {
    let g = enumerate_states(cs, tile_bound, DEFAULT_STATE_CAP)?;
    equivalence_from_graph(cs, &g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelsReport {
    pub tile_bound: usize,
    /// (α, β) pairs checked.
    pub transitions: usize,
    pub preimages_checked: usize,
    pub condition1_failures: Vec<String>,
    pub condition2_failures: Vec<String>,
}

impl ModelsReport {
    pub fn ok(&self) -> bool {
        self.condition1_failures.is_empty() && self.condition2_failures.is_empty()
    }
}

pub fn models_from_graph(cs: &CompiledSystem, g: &StateGraph) -> Result<ModelsReport> {
    let t = &cs.marked.unmarked;
    let n = g.state_image.len();
    let ni = g.images.len();
    let words = ni.div_ceil(64);
    // Images reachable from each state; children are one placement larger.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&s| std::cmp::Reverse(g.state_size[s]));
    let mut reach = vec![0u64; n * words];
    for &s in &order {
        let i = g.state_image[s];
        reach[s * words + i / 64] |= 1 << (i % 64);
        for &c in &g.edges[s] {
            for w in 0..words {
                let v = reach[c * words + w];
                reach[s * words + w] |= v;
            }
        }
    }
    let has = |s: usize, i: usize| reach[s * words + i / 64] >> (i % 64) & 1 == 1;
    let image_id: HashMap<&TileAssembly, usize> = g.images.iter().enumerate().map(|(i, a)| (a, i)).collect();

    let mut pre: Vec<Vec<usize>> = vec![Vec::new(); ni];
    for s in 0..n {
        pre[g.state_image[s]].push(s);
    }
    let mut rep = ModelsReport {
        tile_bound: g.tile_bound,
        transitions: 0,
        preimages_checked: 0,
        condition1_failures: Vec::new(),
        condition2_failures: Vec::new(),
    };
    for (ai, alpha) in g.images.iter().enumerate() {
        if alpha.len() >= g.tile_bound {
            continue;
        }
        let succ = atam::tile_frontier(t, alpha)?;
        for (p, u, _) in succ {
            let mut beta = alpha.clone();
            beta.insert(p, u);
            rep.transitions += 1;
            let Some(&bi) = image_id.get(&beta) else {
                rep.condition1_failures.push(format!("{} never realized from {}", show(t, &beta), show(t, alpha)));
                continue;
            };
            for &s in &pre[ai] {
                rep.preimages_checked += 1;
                if !has(s, bi) && rep.condition1_failures.len() < 10 {
                    rep.condition1_failures.push(format!(
                        "state {s} maps to {} but cannot reach {}",
                        show(t, alpha),
                        show(t, &beta)
                    ));
                }
            }
            // Pre-images stepping directly into β must descend from Π_α,
            // here the enumerated pre-image of α.
            let members: HashSet<usize> = pre[ai].iter().copied().collect();
            for &s in &pre[ai] {
                for &c in &g.edges[s] {
                    if g.state_image[c] == bi && !members.contains(&s) && rep.condition2_failures.len() < 10 {
                        rep.condition2_failures.push(format!("state {s} steps to {} outside Π_α", show(t, &beta)));
                    }
                }
            }
        }
    }
    Ok(rep)
}

pub fn check_models(cs: &CompiledSystem, tile_bound: usize) -> Result<ModelsReport> {
    let g = enumerate_states(cs, tile_bound, DEFAULT_STATE_CAP)?;
    models_from_graph(cs, &g)
}

/// Combined machine-readable verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub backend: String,
    pub c: u32,
    pub rng_seed: u64,
    pub coverage: String,
    pub follows: RunReport,
    pub equivalent_productions: EquivalenceReport,
    pub models: ModelsReport,
    pub pass: bool,
}

pub fn verify_all(
    cs: &CompiledSystem,
    tile_bound: usize,
    runs: usize,
    steps: usize,
    rng_seed: u64,
) -> Result<VerifyReport> {
    let follows = check_runs(cs, runs, steps, rng_seed);
    let g = enumerate_states(cs, tile_bound, DEFAULT_STATE_CAP)?;
    let eq = equivalence_from_graph(cs, &g)?;
    let models = models_from_graph(cs, &g)?;
    let pass = follows.ok() && eq.ok() && models.ok();
    Ok(VerifyReport {
        backend: cs.backend.key().to_string(),
        c: cs.c,
        rng_seed,
        coverage: format!(
            "exhaustive up to {tile_bound} tiles ({} slat states); sampled {runs} runs x {steps} steps beyond",
            g.state_image.len()
        ),
        follows,
        equivalent_productions: eq,
        models,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleRun {
    pub rng_seed: u64,
    pub slats: usize,
    pub quiescent: bool,
    pub tiles: usize,
    pub equal: bool,
    pub detail: Option<String>,
}

/// Runs the slat system per seed and compares `R*` of the final assembly
/// with the tile run of the source system stopped at the same tile count.
pub fn oracle_equivalence(cs: &CompiledSystem, seeds: &[u64], max_slats: usize) -> Vec<OracleRun> {
    let t = &cs.marked.unmarked;
    seeds
        .iter()
        .map(|&seed| {
            let run = crate::asam::run_asam(&cs.sas, max_slats, seed);
            let base = OracleRun {
                rng_seed: seed,
                slats: run.assembly.len(),
                quiescent: run.terminal,
                tiles: 0,
                equal: false,
                detail: None,
            };
            match represent_assembly(cs, &run.assembly) {
                Err(e) => OracleRun { detail: Some(e.to_string()), ..base },
                Ok(img) => {
                    // One tile of headroom: a quiescent slat run must match a terminal tile run.
                    let tr = atam::run_atam(t, img.len() + 1, seed);
                    let want = tr.prefix(tr.events.len().min(img.len().saturating_sub(tr.seed.len())));
                    let stalled = run.terminal && tr.final_assembly().len() > img.len();
                    let equal = want == img && !stalled;
                    let detail = if stalled {
                        Some(format!("slat run halted at {} tiles while the tile run continues", img.len()))
                    } else {
                        (!equal).then(|| format!("R* = {}\ntile run = {}", show(t, &img), show(t, &want)))
                    };
                    OracleRun { tiles: img.len(), equal, detail, ..base }
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asam::SlatSystem;
    use crate::compiler::{compile, Backend};
    use crate::fixtures;

    fn compiled(name: &str, b: Backend) -> CompiledSystem {
        compile(&fixtures::load(name).unwrap(), b, 4).unwrap()
    }

    fn without_slat(cs: &CompiledSystem, name: &str) -> CompiledSystem {
        let mut slats = cs.sas.slats.clone();
        let i = cs.sas.slat_index(name).unwrap();
        slats[i].glues.clear();
        let mut out = cs.clone();
        out.sas = SlatSystem::new(slats, cs.sas.seed.clone(), cs.sas.cooperativity).unwrap();
        out
    }

    #[test]
    fn seed_represents_seed() {
        for b in Backend::ALL {
            if b == Backend::ZigZag {
                continue;
            }
            let cs = compiled("sierpinski", b);
            let a = represent_assembly(&cs, &cs.sas.seed_assembly()).unwrap();
            assert_eq!(a, cs.marked.unmarked.seed, "{b}");
            assert!(maps_cleanly(&cs, &cs.sas.seed_assembly()).unwrap().clean);
        }
    }

    #[test]
    fn oracle_runs_agree() {
        let cs = compiled("zigzag-tm", Backend::ZigZag);
        for r in oracle_equivalence(&cs, &[0, 1, 2], 5000) {
            assert!(r.equal && r.quiescent, "{r:?}");
        }
    }

    #[test]
    fn follows_holds_on_sierpinski() {
        for b in [Backend::Standard, Backend::DirectedT2, Backend::Full] {
            let rep = check_runs(&compiled("sierpinski", b), 3, 400, 7);
            assert!(rep.ok(), "{b}: {:?}", rep.first);
            assert!(rep.tile_attachments > 0);
        }
    }

    #[test]
    fn zigzag_locality_holds() {
        let rep = check_zigzag_locality(&compiled("zigzag-counter", Backend::ZigZag), 2, 300, 3);
        assert!(rep.ok(), "{:?}", rep.first);
    }

    #[test]
    fn competition_reaches_both_terminals() {
        let cs = compiled("competition", Backend::Full);
        let g = enumerate_states(&cs, 4, DEFAULT_STATE_CAP).unwrap();
        let eq = equivalence_from_graph(&cs, &g).unwrap();
        assert!(eq.ok(), "{eq:?}");
        assert_eq!(eq.slat_terminals.len(), 2);
        assert!(models_from_graph(&cs, &g).unwrap().ok());
    }

    #[test]
    fn models_detects_unreachable_successor() {
        let cs = compiled("competition", Backend::Full);
        let name = cs.sas.slats.iter().find(|s| s.name.starts_with("tY") && s.name.contains(".s0.")).unwrap().name.clone();
        let broken = without_slat(&cs, &name);
        let g = enumerate_states(&broken, 4, DEFAULT_STATE_CAP).unwrap();
        let m = models_from_graph(&broken, &g).unwrap();
        assert!(!m.condition1_failures.is_empty());
        assert!(!equivalence_from_graph(&broken, &g).unwrap().ok());
    }

    #[test]
    fn off_grid_resolving_slat_is_not_represented() {
        let cs = compiled("sierpinski", Backend::Standard);
        let p = cs.sas.seed[0];
        let q = Placement { slat: p.slat, anchor: (p.anchor.0 + 1, p.anchor.1) };
        if cs.repr.resolving.contains_key(&p.slat) {
            assert!(represent_placement(&cs, &p).is_some());
            assert!(represent_placement(&cs, &q).is_none());
        }
    }

    #[test]
    fn tracker_flags_conflicting_resolution() {
        let cs = compiled("competition", Backend::Full);
        let slat = |pre: &str| cs.sas.slats.iter().position(|s| s.name.starts_with(pre) && s.name.contains(".s0.")).unwrap();
        let m = cs.repr.scale;
        let (x, y) = (slat("tX"), slat("tY"));
        let at = |s: usize| {
            let off = cs.info[s].offset;
            Placement { slat: s, anchor: (m + off.0, off.1) }
        };
        let mut tr = Tracker::new(&cs);
        assert_eq!(tr.add(&at(x)).unwrap().map(|e| e.0), Some((1, 0)));
        assert!(matches!(tr.add(&at(y)), Err(Error::AmbiguousResolution { .. })));
    }
}
