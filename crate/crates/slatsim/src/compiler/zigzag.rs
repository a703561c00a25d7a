//! Zig-zag backend: 2c×2c macrotiles.
//!
//! Right-to-left template (left-to-right is its mirror image):
//!
//! ```text
//!   row 1 | red  red  |           gold hangs from red in the west
//!   row 0 | db   lb   | lb         neighbour's column 1
//!         +-----------+
//!          col 0 col 1
//! ```
//! `lb` reads the inputs in the input cell, `db` climbs column 0 (its output
//! lanes continue into the block above), `red` carries the row westward and
//! `gold` presents the west output inside the west neighbour.

use super::template::{lines, Builder, Pres, Role, Template};
use super::Built;
use crate::asam::Orientation::{H, V};
use crate::atam::Dir;
use crate::error::{Error, Result};
use crate::iomark::{zigzag_roles, MarkedSystem, Signature, ZigZagRole};

fn half_lo(c: i32) -> Vec<i32> {
    (0..c / 2).collect()
}

fn half_hi(c: i32) -> Vec<i32> {
    (c / 2..c).collect()
}

fn all(c: i32) -> Vec<i32> {
    (0..c).collect()
}

/// Presentation read by a receiver of `role` on its `side` (receiver coordinates).
fn pres(c: i32, role: ZigZagRole, side: Dir, glue: &str, strength: u8) -> Pres {
    let strong = strength == 2;
    let (col, lanes, marker) = match (side, role) {
        (Dir::S, ZigZagRole::LtoR) => (0, if strong { all(c) } else { half_lo(c) }, Some(0)),
        (Dir::S, _) => (1, if strong { all(c) } else { half_lo(c) }, Some(1)),
        (Dir::E, _) => (1, if strong { all(c) } else { half_hi(c) }, None),
        (Dir::W, _) => (0, if strong { all(c) } else { half_hi(c) }, None),
        (Dir::N, _) => unreachable!("zig-zag tiles never take north inputs"),
    };
    Pres { glue: glue.to_string(), col, lanes, cells: vec![((col, 0), marker)] }
}

fn template(ms: &MarkedSystem, t: usize, role: ZigZagRole, name: String, c: u32) -> Result<Template> {
    let ci = c as i32;
    let m = 2 * ci;
    let tile = &ms.system.tiles[t];
    let sig: Signature = ms.signature(t);
    let rtl = role != ZigZagRole::LtoR;
    // Column holding db, direction the row grows in.
    let (dcol, side_out) = if rtl { (0, Dir::W) } else { (1, Dir::E) };
    let mut b = Builder::new(name, c);

    let lb = b.group("lb", Role::Resolving, H, lines(ci, 0, all(ci), 0, 1));
    if role == ZigZagRole::Seed {
        b.root(lb);
    }
    for &(d, k) in &sig.inputs {
        b.read(lb, &pres(ci, role, d, &tile.glue(d).label, k))?;
    }

    let n_out = sig.output(Dir::N);
    let side = sig.output(side_out);
    if n_out == 0 && side == 0 {
        return b.finish();
    }
    let n_lanes = match n_out {
        0 => vec![],
        1 => half_lo(ci),
        _ => all(ci),
    };
    let rest: Vec<i32> = all(ci).into_iter().filter(|l| !n_lanes.contains(l)).collect();
    let db = b.group("db", Role::Body, V, lines(ci, dcol, rest, 0, 1));
    b.link(db, lb)?;
    let mut dbn = None;
    if n_out > 0 {
        let g = b.group("dbN", Role::Output(Dir::N), V, lines(ci, dcol, n_lanes, 0, 2));
        b.link(g, lb)?;
        dbn = Some(g);
        let recv = if rtl { ZigZagRole::LtoR } else { ZigZagRole::RtoL };
        let p = pres(ci, recv, Dir::S, &tile.glue(Dir::N).label, n_out);
        b.emit(g, &p, (0, m))?;
    }
    if side > 0 {
        let (x0, x1) = if rtl { (-1, 0) } else { (1, 2) };
        let red = b.group("red", Role::Body, H, lines(ci, 1, all(ci), x0, x1));
        b.link(red, db)?;
        if let Some(g) = dbn {
            b.link(red, g)?;
        }
        let (gcol, lanes) = match (rtl, side) {
            (true, 1) => (-1, half_hi(ci)),
            (false, 1) => (2, half_hi(ci)),
            (true, _) => (-1, all(ci)),
            (false, _) => (2, all(ci)),
        };
        let gold = b.group("gold", Role::Output(side_out), V, lines(ci, gcol, lanes, 0, 1));
        b.link(gold, red)?;
        let recv = if rtl { ZigZagRole::RtoL } else { ZigZagRole::LtoR };
        let p = pres(ci, recv, side_out.opposite(), &tile.glue(side_out).label, side);
        let shift = if rtl { (-m, 0) } else { (m, 0) };
        b.emit(gold, &p, shift)?;
    }
    b.finish()
}

pub(crate) fn build(ms: &MarkedSystem, c: u32) -> Result<Built> {
    let sys = &ms.system;
    if sys.seed.len() != 1 {
        return Err(Error::SignatureNotZigZag {
            tile: "seed".into(),
            signature: format!("{}-tile seed (a single seed tile is required)", sys.seed.len()),
        });
    }
    let (seed_pos, seed_tile) = sys.seed.iter().next().unwrap();
    let mut tiles = Vec::new();
    for t in 0..sys.tiles.len() {
        let sig = ms.signature(t);
        let roles = zigzag_roles(&sig);
        let ok = if t == seed_tile { roles == [ZigZagRole::Seed] } else { !roles.is_empty() && !roles.contains(&ZigZagRole::Seed) };
        if !ok {
            return Err(Error::SignatureNotZigZag { tile: sys.tiles[t].name.clone(), signature: sig.to_string() });
        }
        let name = &sys.tiles[t].name;
        let mut tpls = Vec::new();
        for &r in &roles {
            let inst = if roles.len() > 1 {
                format!("{name}#{}", if r == ZigZagRole::LtoR { "L" } else { "R" })
            } else {
                name.clone()
            };
            tpls.push(template(ms, t, r, inst, c)?);
        }
        tiles.push(tpls);
    }
    Ok(Built { tiles, glues: Vec::new(), seed: vec![(seed_pos, seed_tile, 0, false)] })
}
