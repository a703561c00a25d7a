//! The abstract Tile Assembly Model: tiles, assemblies, frontier, seeded runs
//! and a bounded producibility oracle.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Coord = (i32, i32);

/// Default state cap for `producible_set`.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    pub fn idx(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::E => Dir::W,
            Dir::S => Dir::N,
            Dir::W => Dir::E,
        }
    }

    pub fn delta(self) -> Coord {
        match self {
            Dir::N => (0, 1),
            Dir::E => (1, 0),
            Dir::S => (0, -1),
            Dir::W => (-1, 0),
        }
    }

    /// Rotate a quarter turn clockwise (N -> E -> S -> W).
    pub fn cw(self) -> Dir {
        Dir::ALL[(self.idx() + 1) % 4]
    }

    pub fn letter(self) -> char {
        match self {
            Dir::N => 'N',
            Dir::E => 'E',
            Dir::S => 'S',
            Dir::W => 'W',
        }
    }

    pub fn from_letter(c: char) -> Option<Dir> {
        match c {
            'N' => Some(Dir::N),
            'E' => Some(Dir::E),
            'S' => Some(Dir::S),
            'W' => Some(Dir::W),
            _ => None,
        }
    }

    pub fn step(self, p: Coord) -> Coord {
        let (dx, dy) = self.delta();
        (p.0 + dx, p.1 + dy)
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Glue {
    pub label: String,
    pub strength: u8,
}

impl Glue {
    pub fn new(label: impl Into<String>, strength: u8) -> Glue {
        Glue { label: label.into(), strength }
    }

    pub fn null() -> Glue {
        Glue::default()
    }

    pub fn is_null(&self) -> bool {
        self.strength == 0
    }

    /// Strength contributed when this glue abuts `other`.
    pub fn bond(&self, other: &Glue) -> u32 {
        if self.strength > 0 && self == other {
            self.strength as u32
        } else {
            0
        }
    }

    fn validate(&self) -> Result<()> {
        if (self.strength == 0) != self.label.is_empty() {
            return Err(Error::InvalidSystem(format!(
                "glue {:?} with strength {}: strength 0 iff empty label",
                self.label, self.strength
            )));
        }
        if self.strength > 2 {
            return Err(Error::schema(format!(
                "glue {:?} has strength {}; strengths above 2 are rejected since any such \
                 system reduces to an equivalent temperature-2 system",
                self.label, self.strength
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TileType {
    pub name: String,
    /// Indexed by `Dir::idx`.
    pub glues: [Glue; 4],
}

impl TileType {
    pub fn new(name: impl Into<String>, n: Glue, e: Glue, s: Glue, w: Glue) -> TileType {
        TileType { name: name.into(), glues: [n, e, s, w] }
    }

    pub fn glue(&self, d: Dir) -> &Glue {
        &self.glues[d.idx()]
    }
}

/// Partial map from coordinates to tile-type indices. Equality is on absolute
/// positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileAssembly {
    tiles: BTreeMap<Coord, usize>,
}

impl TileAssembly {
    pub fn new() -> TileAssembly {
        TileAssembly::default()
    }

    pub fn single(p: Coord, t: usize) -> TileAssembly {
        let mut a = TileAssembly::new();
        a.tiles.insert(p, t);
        a
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Coord, usize)>) -> TileAssembly {
        TileAssembly { tiles: pairs.into_iter().collect() }
    }

    pub fn get(&self, p: Coord) -> Option<usize> {
        self.tiles.get(&p).copied()
    }

    pub fn contains(&self, p: Coord) -> bool {
        self.tiles.contains_key(&p)
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coord, usize)> + '_ {
        self.tiles.iter().map(|(&p, &t)| (p, t))
    }

    /// Raw insert without any binding check.
    pub fn insert(&mut self, p: Coord, t: usize) -> Option<usize> {
        self.tiles.insert(p, t)
    }

    pub fn is_subassembly_of(&self, other: &TileAssembly) -> bool {
        self.iter().all(|(p, t)| other.get(p) == Some(t))
    }

    /// Edge-connectivity of the occupied positions (glues not considered).
    pub fn is_connected(&self) -> bool {
        let Some((&start, _)) = self.tiles.iter().next() else {
            return false;
        };
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for d in Dir::ALL {
                let q = d.step(p);
                if self.contains(q) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        seen.len() == self.tiles.len()
    }

    /// Binding-graph edges `(a, b, weight)` with positive weight.
    pub fn binding_edges(&self, tiles: &[TileType]) -> Vec<(Coord, Coord, u32)> {
        let mut out = Vec::new();
        for (p, t) in self.iter() {
            for d in [Dir::E, Dir::N] {
                let q = d.step(p);
                if let Some(u) = self.get(q) {
                    let w = tiles[t].glue(d).bond(tiles[u].glue(d.opposite()));
                    if w > 0 {
                        out.push((p, q, w));
                    }
                }
            }
        }
        out
    }
}

/// Strength with which tile `t` would bind at the empty position `p`.
pub fn binding_strength(tiles: &[TileType], asm: &TileAssembly, p: Coord, t: usize) -> u32 {
    Dir::ALL
        .iter()
        .map(|&d| match asm.get(d.step(p)) {
            Some(u) => tiles[t].glue(d).bond(tiles[u].glue(d.opposite())),
            None => 0,
        })
        .sum()
}

/// Minimum weight over all cuts of the binding graph (Stoer-Wagner).
/// Returns `None` for assemblies with fewer than two tiles.
pub fn min_cut(tiles: &[TileType], asm: &TileAssembly) -> Option<u32> {
    let n = asm.len();
    if n < 2 {
        return None;
    }
    let index: BTreeMap<Coord, usize> = asm.iter().enumerate().map(|(i, (p, _))| (p, i)).collect();
    let mut w = vec![vec![0u32; n]; n];
    for (a, b, x) in asm.binding_edges(tiles) {
        let (i, j) = (index[&a], index[&b]);
        w[i][j] += x;
        w[j][i] += x;
    }
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = u32::MAX;
    while alive.len() > 1 {
        let mut added = vec![false; n];
        let mut key = vec![0u32; n];
        let (mut prev, mut last) = (alive[0], alive[0]);
        for _ in 0..alive.len() {
            let next = *alive
                .iter()
                .filter(|&&v| !added[v])
                .max_by_key(|&&v| (key[v], std::cmp::Reverse(v)))
                .unwrap();
            added[next] = true;
            prev = last;
            last = next;
            for &v in &alive {
                if !added[v] {
                    key[v] += w[next][v];
                }
            }
        }
        best = best.min(key[last]);
        for &v in &alive {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        alive.retain(|&v| v != last);
    }
    Some(best)
}

/// True iff every cut of the binding graph has weight at least `tau`.
pub fn is_tau_stable(tiles: &[TileType], asm: &TileAssembly, tau: u32) -> bool {
    match min_cut(tiles, asm) {
        None => !asm.is_empty(),
        Some(c) => c >= tau,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileSystem {
    pub tiles: Vec<TileType>,
    pub seed: TileAssembly,
    pub temperature: u32,
}

impl TileSystem {
    pub fn new(tiles: Vec<TileType>, seed: TileAssembly, temperature: u32) -> Result<TileSystem> {
        let sys = TileSystem { tiles, seed, temperature };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.temperature) {
            return Err(Error::InvalidSystem(format!(
                "temperature {} not in {{1,2}}",
                self.temperature
            )));
        }
        let mut names = HashSet::new();
        for t in &self.tiles {
            if !names.insert(t.name.as_str()) {
                return Err(Error::InvalidSystem(format!("duplicate tile name {:?}", t.name)));
            }
            for g in &t.glues {
                g.validate()?;
            }
        }
        if self.seed.is_empty() {
            return Err(Error::SeedTileMissing("seed assembly is empty".into()));
        }
        if let Some((p, t)) = self.seed.iter().find(|&(_, t)| t >= self.tiles.len()) {
            return Err(Error::SeedTileMissing(format!("seed tile index {t} at {p:?}")));
        }
        if !self.seed.is_connected() {
            return Err(Error::MalformedAssembly("seed is not connected".into()));
        }
        if !is_tau_stable(&self.tiles, &self.seed, self.temperature) {
            return Err(Error::InvalidSystem("seed is not tau-stable".into()));
        }
        Ok(())
    }

    pub fn tile_index(&self, name: &str) -> Option<usize> {
        self.tiles.iter().position(|t| t.name == name)
    }

    pub fn is_tau_stable(&self, asm: &TileAssembly) -> bool {
        is_tau_stable(&self.tiles, asm, self.temperature)
    }

    fn candidates_at(&self, asm: &TileAssembly, p: Coord) -> Vec<(usize, u32)> {
        (0..self.tiles.len())
            .filter_map(|t| {
                let s = binding_strength(&self.tiles, asm, p, t);
                (s >= self.temperature).then_some((t, s))
            })
            .collect()
    }
}

/// Every `(position, tile, strength)` at which a tile binds with strength at
/// least the temperature, sorted.
pub fn tile_frontier(sys: &TileSystem, asm: &TileAssembly) -> Result<Vec<(Coord, usize, u32)>> {
    if !asm.is_connected() {
        return Err(Error::MalformedAssembly("assembly is empty or disconnected".into()));
    }
    let empties: BTreeSet<Coord> = asm
        .iter()
        .flat_map(|(p, _)| Dir::ALL.map(|d| d.step(p)))
        .filter(|q| !asm.contains(*q))
        .collect();
    let mut out = Vec::new();
    for p in empties {
        for (t, s) in sys.candidates_at(asm, p) {
            out.push((p, t, s));
        }
    }
    Ok(out)
}

pub fn attach_tile(sys: &TileSystem, asm: &TileAssembly, event: (Coord, usize)) -> Result<TileAssembly> {
    let (p, t) = event;
    if asm.contains(p) || t >= sys.tiles.len() {
        return Err(Error::NotInFrontier);
    }
    if binding_strength(&sys.tiles, asm, p, t) < sys.temperature {
        return Err(Error::NotInFrontier);
    }
    let mut out = asm.clone();
    out.insert(p, t);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileAssemblySequence {
    pub seed: TileAssembly,
    pub events: Vec<(Coord, usize)>,
    /// True when the run stopped because the frontier was empty.
    pub terminal: bool,
}

impl TileAssemblySequence {
    pub fn final_assembly(&self) -> TileAssembly {
        self.prefix(self.events.len())
    }

    /// Seed plus the first `k` events.
    pub fn prefix(&self, k: usize) -> TileAssembly {
        let mut a = self.seed.clone();
        for &(p, t) in &self.events[..k] {
            a.insert(p, t);
        }
        a
    }
}

/// Seeded run: repeatedly attach a uniformly chosen frontier element until the
/// assembly holds `max_tiles` tiles or the frontier is empty.
pub fn run_atam(sys: &TileSystem, max_tiles: usize, rng_seed: u64) -> TileAssemblySequence {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut asm = sys.seed.clone();
    let mut cands: BTreeMap<Coord, Vec<(usize, u32)>> = BTreeMap::new();
    let refresh = |asm: &TileAssembly, cands: &mut BTreeMap<Coord, Vec<(usize, u32)>>, p: Coord| {
        cands.remove(&p);
        for d in Dir::ALL {
            let q = d.step(p);
            if asm.contains(q) {
                continue;
            }
            let v = sys.candidates_at(asm, q);
            if v.is_empty() {
                cands.remove(&q);
            } else {
                cands.insert(q, v);
            }
        }
    };
    let seed_coords: Vec<Coord> = asm.iter().map(|(p, _)| p).collect();
    for p in seed_coords {
        refresh(&asm, &mut cands, p);
    }
    let mut events = Vec::new();
    let mut terminal = false;
    while asm.len() < max_tiles {
        let total: usize = cands.values().map(Vec::len).sum();
        if total == 0 {
            terminal = true;
            break;
        }
        let mut k = rng.gen_range(0..total);
        let mut pick = None;
        for (&p, v) in &cands {
            if k < v.len() {
                pick = Some((p, v[k].0));
                break;
            }
            k -= v.len();
        }
        let (p, t) = pick.expect("index within total");
        asm.insert(p, t);
        events.push((p, t));
        refresh(&asm, &mut cands, p);
    }
    if !terminal && cands.is_empty() {
        terminal = true;
    }
    TileAssemblySequence { seed: sys.seed.clone(), events, terminal }
}

/// All producible assemblies with at most `max_tiles` tiles (absolute
/// positions), by breadth-first search from the seed.
pub fn producible_set(sys: &TileSystem, max_tiles: usize) -> Result<BTreeSet<TileAssembly>> {
    producible_set_capped(sys, max_tiles, DEFAULT_STATE_CAP)
}

pub fn producible_set_capped(
    sys: &TileSystem,
    max_tiles: usize,
    cap: usize,
) -> Result<BTreeSet<TileAssembly>> {
    let mut seen = BTreeSet::new();
    seen.insert(sys.seed.clone());
    let mut queue = VecDeque::from([sys.seed.clone()]);
    while let Some(a) = queue.pop_front() {
        if a.len() >= max_tiles {
            continue;
        }
        for (p, t, _) in tile_frontier(sys, &a)? {
            let mut b = a.clone();
            b.insert(p, t);
            if !seen.contains(&b) {
                if seen.len() >= cap {
                    return Err(Error::BoundTooLarge { cap });
                }
                seen.insert(b.clone());
                queue.push_back(b);
            }
        }
    }
    Ok(seen)
}

/// Producible assemblies within the bound that have an empty frontier.
pub fn terminal_assemblies(sys: &TileSystem, set: &BTreeSet<TileAssembly>) -> Vec<TileAssembly> {
    set.iter()
        .filter(|a| tile_frontier(sys, a).map(|f| f.is_empty()).unwrap_or(false))
        .cloned()
        .collect()
}
