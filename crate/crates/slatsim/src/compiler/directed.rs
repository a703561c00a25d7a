//! Directed temperature-2 backend: 4c×4c macrotiles.
//!
//! Every cooperative pair is read in row 1: north and south glues arrive in
//! column 1 (the emitter's output slats run on into cell (1,1)), west and
//! east glues along the whole edge column. A lone strength-2 glue is read in
//! the cell it arrives in. From `B1` a vertical spine `B2` (column 2) reaches
//! the output hosts: `G0` (row 0, south output), `G2` (row 2, north output
//! and west helper) and `G3` (row 3, east helper).

use super::template::{lines, Builder, Pres, Role, Template};
use super::Built;
use crate::asam::Orientation::{H, V};
use crate::atam::Dir;
use crate::error::{Error, Result};
use crate::iomark::{is_directed_signature, MarkedSystem};

fn recv_lanes(c: i32, side: Dir, k: u8) -> Vec<i32> {
    match (k, side) {
        (2, _) => (0..c).collect(),
        (_, Dir::S | Dir::E) => (0..c / 2).collect(),
        _ => (c / 2..c).collect(),
    }
}

/// Presentation read on the receiver's `side`: a single labelled cell.
fn pres(c: i32, side: Dir, k: u8, glue: &str) -> Pres {
    let cell = match (side, k) {
        (Dir::S, 2) => (1, 0),
        (Dir::N, 2) => (1, 3),
        (Dir::S | Dir::N, _) => (1, 1),
        (Dir::W, _) => (0, 1),
        (Dir::E, _) => (3, 1),
    };
    Pres { glue: glue.to_string(), col: cell.0, lanes: recv_lanes(c, side, k), cells: vec![(cell, None)] }
}

fn span(v: &[i32]) -> (i32, i32) {
    (*v.iter().min().unwrap(), *v.iter().max().unwrap())
}

fn template(ms: &MarkedSystem, t: usize, c: u32) -> Result<Template> {
    let tile = &ms.system.tiles[t];
    let sig = ms.signature(t);
    if !is_directed_signature(&sig) {
        return Err(Error::SignatureNotDirected { tile: tile.name.clone(), signature: sig.to_string() });
    }
    let ci = c as i32;
    let m = 4 * ci;
    let all: Vec<i32> = (0..ci).collect();
    let label = |d: Dir| tile.glue(d).label.as_str();
    let mut b = Builder::new(tile.name.clone(), c);
    let (nk, sk, wk, ek) = (sig.output(Dir::N), sig.output(Dir::S), sig.output(Dir::W), sig.output(Dir::E));

    let row = match sig.inputs.iter().next() {
        Some(&(Dir::S, 2)) => 0,
        Some(&(Dir::N, 2)) => 3,
        _ => 1,
    };
    // Output host rows and their cell spans.
    let mut hosts: Vec<(i32, i32, i32)> = Vec::new();
    if sk > 0 {
        hosts.push((0, 1, 2));
    }
    if nk > 0 || wk > 0 {
        hosts.push((2, if wk > 0 { -1 } else { 1 }, 2));
    }
    if ek > 0 {
        hosts.push((3, 2, 4));
    }
    let merged = hosts.iter().find(|h| h.0 == row).copied();
    let spine: Vec<(i32, i32, i32)> = hosts.iter().filter(|h| h.0 != row).copied().collect();

    let mut cols: Vec<i32> = sig
        .inputs
        .iter()
        .map(|&(d, _)| match d {
            Dir::W => 0,
            Dir::E => 3,
            _ => 1,
        })
        .collect();
    if !spine.is_empty() {
        cols.push(2);
    }
    if let Some(h) = merged {
        cols.extend([h.1, h.2]);
    }
    if cols.is_empty() {
        cols.push(2);
    }
    let (lo, hi) = span(&cols);
    let b1 = b.group("B1", Role::Resolving, H, lines(ci, row, all.clone(), lo, hi));
    if sig.inputs.is_empty() {
        b.root(b1);
    }
    for &(d, k) in &sig.inputs {
        b.read(b1, &pres(ci, d, k, label(d)))?;
    }

    let mut host_of = std::collections::BTreeMap::new();
    if merged.is_some() {
        host_of.insert(row, b1);
    }
    if !spine.is_empty() {
        let mut rows: Vec<i32> = spine.iter().map(|h| h.0).collect();
        rows.push(row);
        let (r0, r1) = span(&rows);
        let b2 = b.group("B2", Role::Body, V, lines(ci, 2, all.clone(), r0, r1));
        b.link(b2, b1)?;
        b.not_in_seed(b2);
        for &(r, lo, hi) in &spine {
            let g = b.group(&format!("G{r}"), Role::Body, H, lines(ci, r, all.clone(), lo, hi));
            b.link(g, b2)?;
            b.not_in_seed(g);
            host_of.insert(r, g);
        }
    }

    if sk > 0 {
        let lo = if sk == 1 { -3 } else { -1 };
        let g = b.group("outS", Role::Output(Dir::S), V, lines(ci, 1, recv_lanes(ci, Dir::N, sk), lo, 0));
        b.link(g, host_of[&0])?;
        b.emit(g, &pres(ci, Dir::N, sk, label(Dir::S)), (0, -m))?;
    }
    if nk > 0 {
        let hi = if nk == 1 { 5 } else { 4 };
        let g = b.group("outN", Role::Output(Dir::N), V, lines(ci, 1, recv_lanes(ci, Dir::S, nk), 2, hi));
        b.link(g, host_of[&2])?;
        b.emit(g, &pres(ci, Dir::S, nk, label(Dir::N)), (0, m))?;
    }
    if wk > 0 {
        let g = b.group("outW", Role::Output(Dir::W), V, lines(ci, -1, recv_lanes(ci, Dir::E, wk), 0, 3));
        b.link(g, host_of[&2])?;
        b.emit(g, &pres(ci, Dir::E, wk, label(Dir::W)), (-m, 0))?;
    }
    if ek > 0 {
        let g = b.group("outE", Role::Output(Dir::E), V, lines(ci, 4, recv_lanes(ci, Dir::W, ek), 0, 3));
        b.link(g, host_of[&3])?;
        b.emit(g, &pres(ci, Dir::W, ek, label(Dir::E)), (m, 0))?;
    }
    b.finish()
}

pub(crate) fn build(ms: &MarkedSystem, c: u32) -> Result<Built> {
    let tiles = (0..ms.system.tiles.len()).map(|t| template(ms, t, c).map(|x| vec![x])).collect::<Result<_>>()?;
    let seed = ms.system.seed.iter().map(|(p, t)| (p, t, 0, false)).collect();
    Ok(Built { tiles, glues: Vec::new(), seed })
}
