//! Two-plane slat assembly: horizontal slats on the top plane carry starred
//! labels, vertical slats below carry unstarred ones, every glue has strength
//! 1 and a slat attaches once it bonds with at least `c` distinct slats.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atam::Coord;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    H,
    V,
}

impl Orientation {
    pub fn step(self) -> Coord {
        match self {
            Orientation::H => (1, 0),
            Orientation::V => (0, 1),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::H => "H",
            Orientation::V => "V",
        })
    }
}

pub fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::EmptyLabel);
    }
    let stars = label.matches('*').count();
    if stars > 1 || (stars == 1 && !label.ends_with('*')) || label == "*" {
        return Err(Error::BadLabel(label.to_string()));
    }
    Ok(())
}

pub fn is_starred(label: &str) -> bool {
    label.ends_with('*')
}

/// Toggle the trailing star.
pub fn complement(label: &str) -> Result<String> {
    validate_label(label)?;
    Ok(match label.strip_suffix('*') {
        Some(base) => base.to_string(),
        None => format!("{label}*"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlatType {
    pub name: String,
    pub length: u32,
    pub orientation: Orientation,
    pub glues: BTreeMap<u32, String>,
}

impl SlatType {
    fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::InvalidSystem(format!("slat {} has length 0", self.name)));
        }
        for (&i, l) in &self.glues {
            validate_label(l)?;
            if i >= self.length {
                return Err(Error::InvalidSystem(format!("slat {}: glue position {i} out of range", self.name)));
            }
            let want = self.orientation == Orientation::H;
            if is_starred(l) != want {
                return Err(Error::InvalidSystem(format!(
                    "slat {}: {} slats carry only {} labels, found {l:?}",
                    self.name,
                    self.orientation,
                    if want { "starred" } else { "unstarred" }
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub slat: usize,
    /// Cell of position 0.
    pub anchor: Coord,
}

impl Placement {
    pub fn cell(&self, orientation: Orientation, i: u32) -> Coord {
        let (dx, dy) = orientation.step();
        (self.anchor.0 + dx * i as i32, self.anchor.1 + dy * i as i32)
    }
}

/// Label interning plus a complement index, built once per system.
#[derive(Debug)]
struct Index {
    /// Per slat type, the interned label id at each position.
    labels: Vec<Vec<Option<u32>>>,
    /// For each label id, the `(slat, position)` slots carrying its complement.
    partners: Vec<Vec<(usize, u32)>>,
    comp: Vec<Option<u32>>,
}

impl Index {
    fn build(slats: &[SlatType]) -> Index {
        let mut ids: HashMap<&str, u32> = HashMap::new();
        let mut names: Vec<String> = Vec::new();
        let mut labels = Vec::with_capacity(slats.len());
        for s in slats {
            let mut v = vec![None; s.length as usize];
            for (&i, l) in &s.glues {
                let id = *ids.entry(l.as_str()).or_insert_with(|| {
                    names.push(l.clone());
                    (names.len() - 1) as u32
                });
                v[i as usize] = Some(id);
            }
            labels.push(v);
        }
        let by_name: HashMap<&str, u32> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32)).collect();
        let comp: Vec<Option<u32>> = names
            .iter()
            .map(|n| by_name.get(complement(n).expect("validated").as_str()).copied())
            .collect();
        let mut partners = vec![Vec::new(); names.len()];
        for (t, v) in labels.iter().enumerate() {
            for (i, id) in v.iter().enumerate() {
                if let Some(id) = id {
                    let comp = complement(&names[*id as usize]).expect("validated");
                    if let Some(&cid) = by_name.get(comp.as_str()) {
                        partners[cid as usize].push((t, i as u32));
                    }
                }
            }
        }
        Index { labels, partners, comp }
    }
}

#[derive(Clone, Debug)]
pub struct SlatSystem {
    pub slats: Vec<SlatType>,
    pub seed: Vec<Placement>,
    pub cooperativity: u32,
    index: Arc<Index>,
}

impl PartialEq for SlatSystem {
    fn eq(&self, o: &Self) -> bool {
        self.slats == o.slats && self.seed == o.seed && self.cooperativity == o.cooperativity
    }
}

impl SlatSystem {
    pub fn new(slats: Vec<SlatType>, seed: Vec<Placement>, cooperativity: u32) -> Result<SlatSystem> {
        let mut names = BTreeSet::new();
        for s in &slats {
            s.validate()?;
            if !names.insert(s.name.as_str()) {
                return Err(Error::InvalidSystem(format!("duplicate slat name {:?}", s.name)));
            }
        }
        if cooperativity == 0 {
            return Err(Error::InvalidSystem("cooperativity must be positive".into()));
        }
        let index = Arc::new(Index::build(&slats));
        let sys = SlatSystem { slats, seed, cooperativity, index };
        let mut probe = SlatAssembly::empty(&sys);
        for &p in &sys.seed {
            if p.slat >= sys.slats.len() {
                return Err(Error::InvalidSystem(format!("seed slat index {} out of range", p.slat)));
            }
            probe.place_unchecked(p).map_err(|_| Error::InvalidSystem("seed slats overlap".into()))?;
        }
        Ok(sys)
    }

    pub fn slat_index(&self, name: &str) -> Option<usize> {
        self.slats.iter().position(|s| s.name == name)
    }

    pub fn orientation(&self, p: &Placement) -> Orientation {
        self.slats[p.slat].orientation
    }

    pub fn cells(&self, p: &Placement) -> impl Iterator<Item = Coord> + '_ {
        let o = self.slats[p.slat].orientation;
        let p = *p;
        (0..self.slats[p.slat].length).map(move |i| p.cell(o, i))
    }

    pub fn seed_assembly(&self) -> SlatAssembly {
        let mut a = SlatAssembly::empty(self);
        for &p in &self.seed {
            a.place_unchecked(p).expect("seed validated");
        }
        a
    }
}

/// A slat assembly with incrementally maintained attachment candidates.
#[derive(Clone, Debug)]
pub struct SlatAssembly {
    index: Arc<Index>,
    slats: Arc<Vec<SlatType>>,
    coop: u32,
    placements: Vec<Placement>,
    bonds: Vec<u32>,
    h_occ: HashMap<Coord, usize>,
    v_occ: HashMap<Coord, usize>,
    cand: HashMap<(usize, Coord), u32>,
    ready: BTreeSet<(usize, Coord)>,
}

impl SlatAssembly {
    pub fn empty(sys: &SlatSystem) -> SlatAssembly {
        SlatAssembly {
            index: sys.index.clone(),
            slats: Arc::new(sys.slats.clone()),
            coop: sys.cooperativity,
            placements: Vec::new(),
            bonds: Vec::new(),
            h_occ: HashMap::new(),
            v_occ: HashMap::new(),
            cand: HashMap::new(),
            ready: BTreeSet::new(),
        }
    }

    pub fn from_placements(sys: &SlatSystem, ps: &[Placement]) -> Result<SlatAssembly> {
        let mut a = SlatAssembly::empty(sys);
        for &p in ps {
            a.place_unchecked(p)?;
        }
        Ok(a)
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    /// Bond count recorded when each placement attached.
    pub fn bond_counts(&self) -> &[u32] {
        &self.bonds
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    fn cells_of(&self, p: &Placement) -> impl Iterator<Item = Coord> + '_ {
        let s = &self.slats[p.slat];
        let o = s.orientation;
        let p = *p;
        (0..s.length).map(move |i| p.cell(o, i))
    }

    fn occ(&self, o: Orientation) -> &HashMap<Coord, usize> {
        match o {
            Orientation::H => &self.h_occ,
            Orientation::V => &self.v_occ,
        }
    }

    pub fn overlaps(&self, p: &Placement) -> bool {
        let occ = self.occ(self.slats[p.slat].orientation);
        self.cells_of(p).any(|c| occ.contains_key(&c))
    }

    /// Occupant placement index at `cell` in the plane of `o`.
    pub fn occupant(&self, o: Orientation, cell: Coord) -> Option<usize> {
        self.occ(o).get(&cell).copied()
    }

    /// Label id at `cell` of placement `k`, if any.
    fn label_at(&self, k: usize, cell: Coord) -> Option<u32> {
        let p = &self.placements[k];
        let s = &self.slats[p.slat];
        let i = match s.orientation {
            Orientation::H => cell.0 - p.anchor.0,
            Orientation::V => cell.1 - p.anchor.1,
        };
        self.index.labels[p.slat][i as usize]
    }

    /// Count bonds a placement would form with the current assembly.
    pub fn count_bonds(&self, p: &Placement) -> u32 {
        self.bond_cells(p).len() as u32
    }

    /// Cells where a placement would bond with the current assembly.
    pub fn bond_cells(&self, p: &Placement) -> Vec<Coord> {
        let s = &self.slats[p.slat];
        let other = match s.orientation {
            Orientation::H => &self.v_occ,
            Orientation::V => &self.h_occ,
        };
        let mut out = Vec::new();
        for i in 0..s.length {
            let Some(id) = self.index.labels[p.slat][i as usize] else { continue };
            let c = p.cell(s.orientation, i);
            if let Some(&k) = other.get(&c) {
                if self.label_at(k, c).is_some() && self.label_at(k, c) == self.index.comp[id as usize] {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Add a placement without checking its bond count.
    pub fn place_unchecked(&mut self, p: Placement) -> Result<u32> {
        if self.overlaps(&p) {
            return Err(Error::Overlap);
        }
        let bonds = self.count_bonds(&p);
        let k = self.placements.len();
        self.placements.push(p);
        self.bonds.push(bonds);
        let s = self.slats[p.slat].clone();
        for i in 0..s.length {
            let c = p.cell(s.orientation, i);
            match s.orientation {
                Orientation::H => self.h_occ.insert(c, k),
                Orientation::V => self.v_occ.insert(c, k),
            };
            let Some(id) = self.index.labels[p.slat][i as usize] else { continue };
            let partners = &self.index.partners[id as usize];
            for &(t, j) in partners {
                let (dx, dy) = self.slats[t].orientation.step();
                let anchor = (c.0 - dx * j as i32, c.1 - dy * j as i32);
                let e = self.cand.entry((t, anchor)).or_insert(0);
                *e += 1;
                if *e == self.coop {
                    self.ready.insert((t, anchor));
                }
            }
        }
        Ok(bonds)
    }

    /// All non-overlapping placements forming at least `c` bonds, sorted.
    pub fn frontier(&mut self) -> Vec<(Placement, u32)> {
        let mut out = Vec::new();
        let mut dead = Vec::new();
        for &(t, a) in &self.ready {
            let p = Placement { slat: t, anchor: a };
            if self.overlaps(&p) {
                dead.push((t, a));
            } else {
                out.push((p, self.cand[&(t, a)]));
            }
        }
        for d in dead {
            self.ready.remove(&d);
        }
        out
    }

    pub fn is_terminal(&mut self) -> bool {
        self.frontier().is_empty()
    }

    pub fn attach(&mut self, p: Placement) -> Result<u32> {
        if self.overlaps(&p) {
            return Err(Error::Overlap);
        }
        let n = self.cand.get(&(p.slat, p.anchor)).copied().unwrap_or(0);
        if n < self.coop {
            return Err(Error::NotInFrontier);
        }
        self.place_unchecked(p)
    }

    /// Placements sorted, for set comparison.
    pub fn canonical(&self) -> Vec<Placement> {
        let mut v = self.placements.clone();
        v.sort();
        v
    }
}

/// Frontier of `asm` under `sys`.
pub fn slat_frontier(asm: &mut SlatAssembly) -> Vec<(Placement, u32)> {
    asm.frontier()
}

pub fn attach_slat(asm: &SlatAssembly, p: Placement) -> Result<SlatAssembly> {
    let mut out = asm.clone();
    out.attach(p)?;
    Ok(out)
}

pub fn is_terminal(asm: &mut SlatAssembly) -> bool {
    asm.is_terminal()
}

#[derive(Clone, Debug)]
pub struct SlatRun {
    pub seed_len: usize,
    pub events: Vec<(Placement, u32)>,
    pub terminal: bool,
    pub assembly: SlatAssembly,
}

/// Seeded run of at most `max_slats` attachments, each drawn uniformly from
/// the frontier. `observe` sees the assembly after every attachment.
pub fn run_asam_with(
    sys: &SlatSystem,
    max_slats: usize,
    rng_seed: u64,
    mut observe: impl FnMut(&SlatAssembly, Placement),
) -> SlatRun {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut asm = sys.seed_assembly();
    let mut events = Vec::new();
    let mut terminal = false;
    while events.len() < max_slats {
        let f = asm.frontier();
        if f.is_empty() {
            terminal = true;
            break;
        }
        let (p, n) = f[rng.gen_range(0..f.len())];
        asm.place_unchecked(p).expect("frontier placements do not overlap");
        events.push((p, n));
        observe(&asm, p);
    }
    if !terminal {
        terminal = asm.is_terminal();
    }
    SlatRun { seed_len: sys.seed.len(), events, terminal, assembly: asm }
}

pub fn run_asam(sys: &SlatSystem, max_slats: usize, rng_seed: u64) -> SlatRun {
    run_asam_with(sys, max_slats, rng_seed, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slat(name: &str, o: Orientation, len: u32, glues: &[(u32, &str)]) -> SlatType {
        SlatType {
            name: name.into(),
            length: len,
            orientation: o,
            glues: glues.iter().map(|&(i, l)| (i, l.to_string())).collect(),
        }
    }

    #[test]
    fn complement_toggles() {
        assert_eq!(complement("foo").unwrap(), "foo*");
        assert_eq!(complement("foo*").unwrap(), "foo");
        assert_eq!(complement(""), Err(Error::EmptyLabel));
        assert!(complement("a*b").is_err());
        assert!(complement("a**").is_err());
    }

    #[test]
    fn orientation_star_discipline() {
        let bad = slat("h", Orientation::H, 2, &[(0, "x")]);
        assert!(SlatSystem::new(vec![bad], vec![], 2).is_err());
        let bad = slat("v", Orientation::V, 2, &[(0, "x*")]);
        assert!(SlatSystem::new(vec![bad], vec![], 2).is_err());
    }

    /// c vertical seed slats at x=0..c; one horizontal slat type crossing all.
    fn comb(c: u32, crossing: u32) -> SlatSystem {
        let mut slats = Vec::new();
        let mut seed = Vec::new();
        for k in 0..c {
            slats.push(slat(&format!("v{k}"), Orientation::V, c, &[(0, &format!("g{k}"))]));
            seed.push(Placement { slat: k as usize, anchor: (k as i32, 0) });
        }
        let glues: Vec<(u32, String)> = (0..crossing).map(|k| (k, format!("g{k}*"))).collect();
        let g: Vec<(u32, &str)> = glues.iter().map(|(i, l)| (*i, l.as_str())).collect();
        slats.push(slat("h", Orientation::H, c, &g));
        SlatSystem::new(slats, seed, c).unwrap()
    }

    #[test]
    fn full_cell_gives_c_bonds() {
        let sys = comb(4, 4);
        let mut a = sys.seed_assembly();
        let f = a.frontier();
        assert_eq!(f, vec![(Placement { slat: 4, anchor: (0, 0) }, 4)]);
    }

    #[test]
    fn half_cell_gives_nothing() {
        let sys = comb(4, 2);
        let mut a = sys.seed_assembly();
        assert!(a.frontier().is_empty());
        assert!(a.is_terminal());
        let p = Placement { slat: 4, anchor: (0, 0) };
        assert_eq!(a.attach(p), Err(Error::NotInFrontier));
    }

    #[test]
    fn empty_assembly_has_empty_frontier() {
        let sys = comb(4, 4);
        let mut a = SlatAssembly::empty(&sys);
        assert!(a.frontier().is_empty());
    }

    #[test]
    fn attach_then_overlap() {
        let sys = comb(4, 4);
        let mut a = sys.seed_assembly();
        let p = Placement { slat: 4, anchor: (0, 0) };
        assert_eq!(a.attach(p), Ok(4));
        assert_eq!(a.attach(p), Err(Error::Overlap));
        assert!(a.frontier().is_empty());
    }

    #[test]
    fn run_zero_is_seed() {
        let sys = comb(4, 4);
        let r = run_asam(&sys, 0, 1);
        assert!(r.events.is_empty());
        assert_eq!(r.assembly.len(), 4);
        let r = run_asam(&sys, 10, 1);
        assert_eq!(r.events.len(), 1);
        assert!(r.terminal);
    }

    /// Brute-force frontier: every slat type at every anchor in a box.
    fn brute_frontier(sys: &SlatSystem, a: &SlatAssembly, lo: i32, hi: i32) -> Vec<(Placement, u32)> {
        let mut out = Vec::new();
        for t in 0..sys.slats.len() {
            for x in lo..hi {
                for y in lo..hi {
                    let p = Placement { slat: t, anchor: (x, y) };
                    if a.overlaps(&p) {
                        continue;
                    }
                    let n = brute_bonds(sys, a, &p);
                    if n >= sys.cooperativity {
                        out.push((p, n));
                    }
                }
            }
        }
        out.sort();
        out
    }

    fn brute_bonds(sys: &SlatSystem, a: &SlatAssembly, p: &Placement) -> u32 {
        let s = &sys.slats[p.slat];
        let mut n = 0;
        for q in a.placements() {
            let t = &sys.slats[q.slat];
            if t.orientation == s.orientation {
                continue;
            }
            for (&i, l) in &s.glues {
                for (&j, m) in &t.glues {
                    if p.cell(s.orientation, i) == q.cell(t.orientation, j) && complement(l).unwrap() == *m {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn incremental_frontier_matches_brute_force(
            labels in proptest::collection::vec(0u8..3, 24),
            steps in 0usize..6,
            rng in 0u64..1000,
        ) {
            // Small random system on a 6x6 box with c = 2.
            let mut slats = Vec::new();
            for k in 0..3 {
                let g: Vec<(u32, String)> = (0..3).filter(|i| labels[k * 3 + i] > 0)
                    .map(|i| (i as u32, format!("l{}", labels[k * 3 + i] as usize + i))).collect();
                slats.push(SlatType { name: format!("v{k}"), length: 3, orientation: Orientation::V,
                    glues: g.into_iter().collect() });
                let g: Vec<(u32, String)> = (0..3).filter(|i| labels[12 + k * 3 + i] > 0)
                    .map(|i| (i as u32, format!("l{}*", labels[12 + k * 3 + i] as usize + i))).collect();
                slats.push(SlatType { name: format!("h{k}"), length: 3, orientation: Orientation::H,
                    glues: g.into_iter().collect() });
            }
            let seed = vec![Placement { slat: 0, anchor: (1, 1) }, Placement { slat: 2, anchor: (2, 1) },
                            Placement { slat: 1, anchor: (0, 2) }];
            let sys = match SlatSystem::new(slats, seed, 2) { Ok(s) => s, Err(_) => return Ok(()) };
            let run = run_asam(&sys, steps, rng);
            let mut a = run.assembly.clone();
            let mut f = a.frontier();
            f.sort();
            let b = brute_frontier(&sys, &a, -6, 10);
            prop_assert_eq!(f, b);
            for (k, p) in a.placements().iter().enumerate().skip(sys.seed.len()) {
                prop_assert!(a.bond_counts()[k] >= sys.cooperativity);
                let _ = p;
            }
        }
    }
}
