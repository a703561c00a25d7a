//! Full backend for arbitrary (undirected) temperature-2 systems: 5c×5c
//! macrotiles built from glue-owned input sets, per-tile decision slats
//! `s^k` (row 2), layout slats `c^k` (column 2) and `d^k` (row 1), and
//! glue-owned output sets.
//!
//! Labels follow `PREFIX(arg)-row:col`, row counted from the north edge of
//! the cell and col from its west edge, starred on horizontal slats.
//! Decision slat sections run W, N, O, S, E from west to east.

use std::collections::BTreeMap;

use super::template::{TSlat, Template};
use super::{Built, Role};
use crate::asam::Orientation::{self, H, V};
use crate::atam::{Coord, Dir};
use crate::error::Result;
use crate::iomark::{Mark, MarkedSystem};

fn section(d: Dir) -> i32 {
    match d {
        Dir::W => 0,
        Dir::N => 1,
        Dir::S => 3,
        Dir::E => 4,
    }
}

fn put(s: &mut TSlat, c: i32, pt: Coord, prefix: &str) -> Result<()> {
    let row = c - 1 - pt.1.rem_euclid(c);
    let col = pt.0.rem_euclid(c);
    let star = if s.o == H { "*" } else { "" };
    let label = format!("{prefix}-{row}:{col}{star}");
    let pos = match s.o {
        H => pt.0 - s.anchor.0,
        V => pt.1 - s.anchor.1,
    };
    let intent = format!("full|{label}");
    s.set(pos as u32, label, intent)
}

/// `c` parallel slats through cell row/column `line`, spanning cells
/// `from..=to`; horizontal groups are indexed from the north.
fn group(key: &str, role: Role, o: Orientation, c: i32, line: i32, from: i32, to: i32) -> Vec<TSlat> {
    (0..c)
        .map(|k| {
            let lane = match o {
                H => line * c + c - 1 - k,
                V => line * c + k,
            };
            let anchor = match o {
                H => (from * c, lane),
                V => (lane, from * c),
            };
            TSlat {
                group: key.to_string(),
                index: k as usize,
                role: role.clone(),
                o,
                anchor,
                len: ((to - from + 1) * c) as u32,
                glues: BTreeMap::new(),
                in_seed: true,
            }
        })
        .collect()
}

/// Label every point of every slat of `g` that lies in `cell`.
fn mark(g: &mut [TSlat], c: i32, cell: Coord, prefix: &str) -> Result<()> {
    for s in g.iter_mut() {
        let pts: Vec<Coord> = s.cells().filter(|p| p.0.div_euclid(c) == cell.0 && p.1.div_euclid(c) == cell.1).collect();
        for p in pts {
            put(s, c, p, prefix)?;
        }
    }
    Ok(())
}

struct Span {
    line: i32,
    from: i32,
    to: i32,
}

const fn sp(line: i32, from: i32, to: i32) -> Span {
    Span { line, from, to }
}

/// Input set geometry for receiving side `d`: (f1, f2, f3) spans and the
/// IO, C1, C2 and GI cells.
fn input_geometry(d: Dir) -> ([Span; 3], [Coord; 4]) {
    match d {
        Dir::N => ([sp(2, 4, 5), sp(4, 1, 2), sp(1, 2, 4)], [(2, 5), (2, 4), (1, 4), (1, 2)]),
        Dir::S => ([sp(2, -1, 0), sp(0, 2, 3), sp(3, 0, 2)], [(2, -1), (2, 0), (3, 0), (3, 2)]),
        Dir::W => ([sp(-2, 3, 4), sp(3, -2, 0), sp(0, 2, 3)], [(-2, 4), (-2, 3), (0, 3), (0, 2)]),
        Dir::E => ([sp(3, 3, 4), sp(3, 3, 4), sp(4, 2, 3)], [(3, 4), (3, 3), (4, 3), (4, 2)]),
    }
}

/// Output set geometry for side `d`: (f4, f5) spans and the GO, C3 and IO cells.
fn output_geometry(d: Dir) -> ([Span; 2], [Coord; 3]) {
    match d {
        Dir::N => ([sp(1, 1, 4), sp(4, 1, 2)], [(1, 1), (1, 4), (2, 4)]),
        Dir::S => ([sp(3, 0, 1), sp(0, 2, 3)], [(3, 1), (3, 0), (2, 0)]),
        Dir::W => ([sp(0, 1, 4), sp(4, -2, 0)], [(0, 1), (0, 4), (-2, 4)]),
        Dir::E => ([sp(4, 1, 4), sp(4, 3, 4)], [(4, 1), (4, 4), (3, 4)]),
    }
}

fn input_set(g: &str, d: Dir, c: i32) -> Result<Template> {
    let ([a, b, e], [io, c1, c2, gi]) = input_geometry(d);
    let role = Role::Input(d);
    let mut f1 = group("f1", role.clone(), V, c, a.line, a.from, a.to);
    let mut f2 = group("f2", role.clone(), H, c, b.line, b.from, b.to);
    let mut f3 = group("f3", role, V, c, e.line, e.from, e.to);
    mark(&mut f1, c, io, &format!("IO({g})"))?;
    mark(&mut f1, c, c1, &format!("C1({g})"))?;
    mark(&mut f2, c, c1, &format!("C1({g})"))?;
    mark(&mut f2, c, c2, &format!("C2({g})"))?;
    mark(&mut f3, c, c2, &format!("C2({g})"))?;
    mark(&mut f3, c, gi, &format!("GI({g})"))?;
    let t = Template { name: format!("in:{g}"), slats: [f1, f2, f3].concat() };
    t.check_overlaps()?;
    Ok(t)
}

fn output_set(g: &str, d: Dir, c: i32) -> Result<Template> {
    let ([a, b], [go, c3, io]) = output_geometry(d);
    let role = Role::Output(d);
    let mut f4 = group("f4", role.clone(), V, c, a.line, a.from, a.to);
    let mut f5 = group("f5", role, H, c, b.line, b.from, b.to);
    mark(&mut f4, c, go, &format!("GO({g})"))?;
    mark(&mut f4, c, c3, &format!("C3({g})"))?;
    mark(&mut f5, c, c3, &format!("C3({g})"))?;
    mark(&mut f5, c, io, &format!("IO({g})"))?;
    let t = Template { name: format!("out:{g}"), slats: [f4, f5].concat() };
    t.check_overlaps()?;
    Ok(t)
}

fn tile_template(ms: &MarkedSystem, t: usize, c: i32) -> Result<Template> {
    let tile = &ms.system.tiles[t];
    let name = &tile.name;
    let sig = ms.signature(t);
    let half = sig.inputs.len() > 1;

    let mut s = group("s", Role::Decision, H, c, 2, 0, 4);
    s[0].group = "s0".into();
    s[0].role = Role::Resolving;
    for (k, slat) in s.iter_mut().enumerate() {
        let y = slat.anchor.1;
        for &(d, _) in &sig.inputs {
            let g = &tile.glue(d).label;
            let cols = if half { c / 2 } else { c };
            for j in 0..cols {
                put(slat, c, (section(d) * c + j, y), &format!("GI({g})"))?;
            }
        }
        for j in 0..c {
            let prefix = if k == 0 { format!("T({name})") } else { "TX".to_string() };
            put(slat, c, (2 * c + j, y), &prefix)?;
        }
    }

    let mut cs = group("c", Role::Layout, V, c, 2, 1, 2);
    for slat in cs.iter_mut() {
        let x = slat.anchor.0;
        for y in 2 * c..3 * c {
            let prefix = if y == 3 * c - 1 { format!("T({name})") } else { "TX".to_string() };
            put(slat, c, (x, y), &prefix)?;
        }
    }
    mark(&mut cs, c, (2, 1), &format!("D({name})"))?;

    let mut ds = group("d", Role::Layout, H, c, 1, 0, 4);
    mark(&mut ds, c, (2, 1), &format!("D({name})"))?;
    for &(d, _) in &sig.outputs {
        mark(&mut ds, c, (section(d), 1), &format!("GO({})", tile.glue(d).label))?;
    }

    let tpl = Template { name: name.clone(), slats: [s, cs, ds].concat() };
    tpl.check_overlaps()?;
    Ok(tpl)
}

pub(crate) fn build(ms: &MarkedSystem, c: u32) -> Result<Built> {
    let ci = c as i32;
    let mut tiles = Vec::new();
    let mut keys: BTreeMap<(String, Dir), Mark> = BTreeMap::new();
    for t in 0..ms.system.tiles.len() {
        tiles.push(vec![tile_template(ms, t, ci)?]);
        for d in Dir::ALL {
            if let Some(mk) = ms.markings[t][d.idx()] {
                keys.insert((ms.system.tiles[t].glue(d).label.clone(), d), mk);
            }
        }
    }
    let mut glues = Vec::new();
    for ((g, d), mk) in keys {
        let tpl = match mk {
            Mark::Input => input_set(&g, d, ci)?,
            Mark::Output => output_set(&g, d, ci)?,
        };
        glues.push(((g, d), tpl));
    }
    let seed = ms.system.seed.iter().map(|(p, t)| (p, t, 0, !ms.signature(t).inputs.is_empty())).collect();
    Ok(Built { tiles, glues, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asam::{Placement, SlatAssembly};
    use crate::compiler::{compile, Backend};
    use crate::fixtures;

    /// Over every subset of the input slats that reach the decision row, a
    /// tile's decision slats are attachable exactly when the read columns of
    /// every input are present.
    #[test]
    fn decision_slats_gate_on_inputs() {
        let cs = compile(&fixtures::load("sierpinski").unwrap(), Backend::Full, 4).unwrap();
        let c = cs.c as i32;
        let m = cs.scale();
        let origin = (m, m);
        let at = |s: usize| {
            let o = cs.info[s].offset;
            Placement { slat: s, anchor: (origin.0 + o.0, origin.1 + o.1) }
        };
        let mut tested = 0;
        for t in 0..cs.marked.system.tiles.len() {
            let sig = cs.marked.signature(t);
            if sig.inputs.is_empty() {
                continue;
            }
            let cols = if sig.inputs.len() > 1 { c / 2 } else { c };
            let mut f3 = Vec::new();
            let mut needed = Vec::new();
            for &(d, _) in &sig.inputs {
                let key = (cs.marked.system.tiles[t].glue(d).label.clone(), d);
                let gi = cs.glue_instances[&key];
                for &s in &cs.instances[gi].slats {
                    if cs.info[s].group == "f3" {
                        let x = cs.info[s].offset.0 - section(d) * c;
                        f3.push(s);
                        needed.push((0..cols).contains(&x));
                    }
                }
            }
            let dec: Vec<usize> = cs.instances[cs.tile_instances[t][0]]
                .slats
                .iter()
                .copied()
                .filter(|&s| cs.info[s].group.starts_with('s'))
                .collect();
            for mask in 0u32..(1 << f3.len()) {
                let ps: Vec<Placement> = (0..f3.len()).filter(|&i| mask >> i & 1 == 1).map(|i| at(f3[i])).collect();
                let mut asm = SlatAssembly::from_placements(&cs.sas, &ps).unwrap();
                let front: Vec<Placement> = asm.frontier().into_iter().map(|x| x.0).collect();
                let ready = (0..f3.len()).all(|i| !needed[i] || mask >> i & 1 == 1);
                for &s in &dec {
                    assert_eq!(front.contains(&at(s)), ready, "{} mask {mask:b}", cs.sas.slats[s].name);
                }
            }
            tested += 1;
        }
        assert!(tested > 0);
    }
}
