//! Template representation and the group builder used by the geometric
//! backends.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{interior_glue_label, io_glue_label, Intent};
use crate::asam::Orientation;
use crate::atam::{Coord, Dir};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Role {
    /// Body slats whose presence resolves the macrotile.
    Resolving,
    Body,
    /// Slats presenting an output glue on the given side.
    Output(Dir),
    /// Slats carrying an input glue from the given side inward.
    Input(Dir),
    Decision,
    Layout,
}

#[derive(Clone, Debug)]
pub(crate) struct TSlat {
    pub group: String,
    pub index: usize,
    pub role: Role,
    pub o: Orientation,
    /// Anchor relative to the block origin.
    pub anchor: Coord,
    pub len: u32,
    pub glues: BTreeMap<u32, (String, Intent)>,
    pub in_seed: bool,
}

impl TSlat {
    pub fn cells(&self) -> impl Iterator<Item = Coord> + '_ {
        let (dx, dy) = self.o.step();
        (0..self.len as i32).map(move |i| (self.anchor.0 + dx * i, self.anchor.1 + dy * i))
    }

    /// Lane coordinate (y for H, x for V) and span along the slat.
    fn line(&self) -> (i32, i32, i32) {
        match self.o {
            Orientation::H => (self.anchor.1, self.anchor.0, self.anchor.0 + self.len as i32),
            Orientation::V => (self.anchor.0, self.anchor.1, self.anchor.1 + self.len as i32),
        }
    }

    pub fn set(&mut self, pos: u32, label: String, intent: String) -> Result<()> {
        match self.glues.get(&pos) {
            Some((l, _)) if *l != label => Err(Error::InvalidSystem(format!(
                "template slot {}.{}:{pos} assigned both {l:?} and {label:?}",
                self.group, self.index
            ))),
            _ => {
                self.glues.insert(pos, (label, Intent(intent)));
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Template {
    pub name: String,
    pub slats: Vec<TSlat>,
}

/// One straight slat in block coordinates: `lane` is y for H and x for V,
/// `start` the first coordinate along the slat.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Line {
    pub lane: i32,
    pub start: i32,
    pub len: u32,
}

/// Lines in cell row `row` (H) or cell column `col` (V) at the given in-cell
/// lanes, spanning cells `from..=to` along the slat.
pub(crate) fn lines(c: i32, line_cell: i32, lanes: impl IntoIterator<Item = i32>, from: i32, to: i32) -> Vec<Line> {
    lanes
        .into_iter()
        .map(|l| Line { lane: line_cell * c + l, start: from * c, len: ((to - from + 1) * c) as u32 })
        .collect()
}

/// A set of vertical slats standing in one cell column of the receiving
/// block, labelled in the listed cells.
#[derive(Clone, Debug)]
pub(crate) struct Pres {
    pub glue: String,
    pub col: i32,
    pub lanes: Vec<i32>,
    pub cells: Vec<(Coord, Option<u32>)>,
}

pub(crate) struct Builder {
    pub c: i32,
    pub name: String,
    pub slats: Vec<TSlat>,
    groups: Vec<(String, Vec<usize>)>,
    bonds: Vec<u32>,
    roots: Vec<bool>,
}

fn cell_of(c: i32, p: Coord) -> (Coord, Coord) {
    ((p.0.div_euclid(c), p.1.div_euclid(c)), (p.0.rem_euclid(c), p.1.rem_euclid(c)))
}

impl Builder {
    pub fn new(name: impl Into<String>, c: u32) -> Builder {
        Builder { c: c as i32, name: name.into(), slats: Vec::new(), groups: Vec::new(), bonds: Vec::new(), roots: Vec::new() }
    }

    pub fn group(&mut self, key: &str, role: Role, o: Orientation, ls: Vec<Line>) -> usize {
        let mut ids = Vec::new();
        for (i, l) in ls.into_iter().enumerate() {
            let anchor = match o {
                Orientation::H => (l.start, l.lane),
                Orientation::V => (l.lane, l.start),
            };
            ids.push(self.slats.len());
            self.slats.push(TSlat {
                group: key.to_string(),
                index: i,
                role: role.clone(),
                o,
                anchor,
                len: l.len,
                glues: BTreeMap::new(),
                in_seed: true,
            });
            self.bonds.push(0);
            self.roots.push(false);
        }
        self.groups.push((key.to_string(), ids));
        self.groups.len() - 1
    }

    /// Mark a group as bonding to nothing inside the template (seed roots).
    pub fn root(&mut self, g: usize) {
        for &i in &self.groups[g].1 {
            self.roots[i] = true;
        }
    }

    pub fn not_in_seed(&mut self, g: usize) {
        for i in self.groups[g].1.clone() {
            self.slats[i].in_seed = false;
        }
    }

    /// Interior labels at every crossing of `child` with `parent`.
    pub fn link(&mut self, child: usize, parent: usize) -> Result<()> {
        let c = self.c;
        for &a in &self.groups[child].1.clone() {
            for &b in &self.groups[parent].1.clone() {
                let (sa, sb) = (&self.slats[a], &self.slats[b]);
                if sa.o == sb.o {
                    continue;
                }
                let (la, a0, a1) = sa.line();
                let (lb, b0, b1) = sb.line();
                if !(a0 <= lb && lb < a1 && b0 <= la && la < b1) {
                    continue;
                }
                let pt = match sa.o {
                    Orientation::H => (lb, la),
                    Orientation::V => (la, lb),
                };
                let (cell, inc) = cell_of(c, pt);
                let ha = sa.o == Orientation::H;
                let la_ = interior_glue_label(&self.name, cell, inc, ha);
                let lb_ = interior_glue_label(&self.name, cell, inc, !ha);
                let ia = format!("interior|{}|{cell:?}|{inc:?}|{}", self.name, ha);
                let ib = format!("interior|{}|{cell:?}|{inc:?}|{}", self.name, !ha);
                let (pa, pb) = ((lb - a0) as u32, (la - b0) as u32);
                self.slats[a].set(pa, la_, ia)?;
                self.slats[b].set(pb, lb_, ib)?;
                self.bonds[a] += 1;
            }
        }
        Ok(())
    }

    /// IO labels on the horizontal `child` slats where they cross `p`.
    pub fn read(&mut self, child: usize, p: &Pres) -> Result<()> {
        let c = self.c;
        for &a in &self.groups[child].1.clone() {
            let s = &self.slats[a];
            assert_eq!(s.o, Orientation::H, "inputs are read by horizontal slats");
            let (y, x0, x1) = s.line();
            for &(cell, marker) in &p.cells {
                if y.div_euclid(c) != cell.1 {
                    continue;
                }
                for &l in &p.lanes {
                    let x = p.col * c + l;
                    if x < x0 || x >= x1 {
                        continue;
                    }
                    let inc = (l, y.rem_euclid(c));
                    let label = io_glue_label(&p.glue, inc, marker, true);
                    let intent = format!("io|{}|{inc:?}|{marker:?}|true", p.glue);
                    self.slats[a].set((x - x0) as u32, label, intent)?;
                    self.bonds[a] += 1;
                }
            }
        }
        Ok(())
    }

    /// IO labels on the vertical `group` slats presenting `p` to the block
    /// whose origin sits at `shift` relative to ours.
    pub fn emit(&mut self, group: usize, p: &Pres, shift: Coord) -> Result<()> {
        let c = self.c;
        for &a in &self.groups[group].1.clone() {
            let s = &self.slats[a];
            assert_eq!(s.o, Orientation::V, "outputs are presented by vertical slats");
            let (x, y0, y1) = s.line();
            let xr = x - shift.0;
            if xr.div_euclid(c) != p.col || !p.lanes.contains(&xr.rem_euclid(c)) {
                return Err(Error::InvalidSystem(format!("{}: output slat outside its presentation lanes", self.name)));
            }
            for &(cell, marker) in &p.cells {
                for v in 0..c {
                    let yr = cell.1 * c + v;
                    let ye = yr + shift.1;
                    if ye < y0 || ye >= y1 {
                        continue;
                    }
                    let inc = (xr.rem_euclid(c), v);
                    let label = io_glue_label(&p.glue, inc, marker, false);
                    let intent = format!("io|{}|{inc:?}|{marker:?}|false", p.glue);
                    self.slats[a].set((ye - y0) as u32, label, intent)?;
                }
            }
        }
        Ok(())
    }

    /// Check bond counts and in-template overlaps, then hand out the template.
    pub fn finish(self) -> Result<Template> {
        for (i, s) in self.slats.iter().enumerate() {
            let ok = self.bonds[i] == self.c as u32 || (self.roots[i] && self.bonds[i] == 0);
            if !ok {
                return Err(Error::InvalidSystem(format!(
                    "{}: slat {}.{} bonds with {} template neighbours, expected {}",
                    self.name, s.group, s.index, self.bonds[i], self.c
                )));
            }
        }
        let t = Template { name: self.name, slats: self.slats };
        t.check_overlaps()?;
        Ok(t)
    }
}

impl Template {
    /// No two slats of the template share a cell in the same plane.
    pub fn check_overlaps(&self) -> Result<()> {
        let mut occ: HashMap<(bool, Coord), usize> = HashMap::new();
        for (i, s) in self.slats.iter().enumerate() {
            for p in s.cells() {
                if let Some(j) = occ.insert((s.o == Orientation::H, p), i) {
                    let o = &self.slats[j];
                    return Err(Error::InvalidSystem(format!(
                        "{}: slats {}.{} and {}.{} overlap at {p:?}",
                        self.name, o.group, o.index, s.group, s.index
                    )));
                }
            }
        }
        Ok(())
    }
}
