//! Standard and ATG backends: 3c×3c macrotiles.
//!
//! Inputs are read by a horizontal resolving group `B1` in row 0 (row 2 when
//! the north side is an input). North and south glues are presented in the
//! middle column, west and east glues along the whole edge column of the
//! receiver, hung on a helper row that crosses row 1. Body groups:
//! `B2` (vertical, column `cb`), `M` (row 1), `F` (ATG detour through the
//! far row), `VX`/`EH` (second helper when both side outputs exist).
//!
//! Presentation labels carry the receiver row as marker.

use super::template::{lines, Builder, Pres, Role, Template};
use super::Built;
use crate::asam::Orientation::{H, V};
use crate::atam::Dir;
use crate::error::{Error, Result};
use crate::iomark::{is_standard_signature, MarkedSystem};

fn span(v: &[i32]) -> (i32, i32) {
    (*v.iter().min().unwrap(), *v.iter().max().unwrap())
}

/// Lanes of the presentation read on the receiver's `side`.
fn recv_lanes(c: i32, side: Dir, k: u8) -> Vec<i32> {
    match (k, side) {
        (2, _) => (0..c).collect(),
        (_, Dir::S | Dir::E) => (0..c / 2).collect(),
        _ => (c / 2..c).collect(),
    }
}

/// Presentation read on the receiver's `side`, in receiver coordinates.
fn pres(c: i32, side: Dir, k: u8, glue: &str, atg: bool) -> Pres {
    let lanes = recv_lanes(c, side, k);
    let ext = atg && k == 1;
    let (col, rows): (i32, Vec<i32>) = match side {
        Dir::S if ext => (1, vec![0, 1]),
        Dir::S => (1, vec![0]),
        Dir::N if ext => (1, vec![2, 1]),
        Dir::N => (1, vec![2]),
        Dir::W => (0, vec![0, 2]),
        Dir::E => (2, vec![0, 2]),
    };
    Pres { glue: glue.to_string(), col, lanes, cells: rows.into_iter().map(|r| ((col, r), Some(r as u32))).collect() }
}

struct Ctx<'a> {
    c: i32,
    m: i32,
    atg: bool,
    tile: &'a crate::atam::TileType,
}

impl Ctx<'_> {
    fn label(&self, d: Dir) -> &str {
        &self.tile.glue(d).label
    }

    /// Vertical N or S output in column 1 starting at cell row `from`.
    fn vert_out(&self, b: &mut Builder, d: Dir, k: u8, from: i32) -> Result<usize> {
        let ext = self.atg && k == 1;
        let lanes = recv_lanes(self.c, d.opposite(), k);
        let (lo, hi, shift) = match d {
            Dir::N => (from, if ext { 4 } else { 3 }, (0, self.m)),
            _ => (if ext { -2 } else { -1 }, from, (0, -self.m)),
        };
        let g = b.group(&format!("out{}", d.letter()), Role::Output(d), V, lines(self.c, 1, lanes, lo, hi));
        b.emit(g, &pres(self.c, d.opposite(), k, self.label(d), self.atg), shift)?;
        Ok(g)
    }

    /// Side output hung in the neighbour's edge column.
    fn side_out(&self, b: &mut Builder, d: Dir, k: u8) -> Result<usize> {
        let lanes = recv_lanes(self.c, d.opposite(), k);
        let (col, shift) = if d == Dir::W { (-1, (-self.m, 0)) } else { (3, (self.m, 0)) };
        let g = b.group(&format!("out{}", d.letter()), Role::Output(d), V, lines(self.c, col, lanes, 0, 2));
        b.emit(g, &pres(self.c, d.opposite(), k, self.label(d), self.atg), shift)?;
        Ok(g)
    }
}

fn template(ms: &MarkedSystem, t: usize, c: u32, atg: bool) -> Result<Template> {
    let tile = &ms.system.tiles[t];
    let sig = ms.signature(t);
    if !is_standard_signature(&sig, atg) {
        let (tile, signature) = (tile.name.clone(), sig.to_string());
        return Err(if atg {
            Error::SignatureNotStandardATG { tile, signature }
        } else {
            Error::SignatureNotStandard { tile, signature }
        });
    }
    let ci = c as i32;
    let cx = Ctx { c: ci, m: 3 * ci, atg, tile };
    let all: Vec<i32> = (0..ci).collect();
    let mut b = Builder::new(tile.name.clone(), c);
    let (nk, sk, wk, ek) = (sig.output(Dir::N), sig.output(Dir::S), sig.output(Dir::W), sig.output(Dir::E));
    let has = |d: Dir| sig.input(d) > 0;
    let read = |b: &mut Builder, g: usize| -> Result<()> {
        for &(d, k) in &sig.inputs {
            b.read(g, &pres(ci, d, k, cx.label(d), atg))?;
        }
        Ok(())
    };

    if sig.inputs.is_empty() {
        // Seed-only macrotile: everything is placed directly.
        let b1 = b.group("B1", Role::Resolving, H, lines(ci, 0, all.clone(), 0, 2));
        b.root(b1);
        let mut outs = Vec::new();
        if nk > 0 {
            outs.push(cx.vert_out(&mut b, Dir::N, nk, 1)?);
        }
        if sk > 0 {
            outs.push(cx.vert_out(&mut b, Dir::S, sk, 0)?);
        }
        if wk > 0 {
            outs.push(cx.side_out(&mut b, Dir::W, wk)?);
        }
        if ek > 0 {
            outs.push(cx.side_out(&mut b, Dir::E, ek)?);
        }
        for g in outs {
            b.root(g);
        }
        return b.finish();
    }

    if atg && has(Dir::N) && has(Dir::S) {
        let lo = if wk > 0 { -1 } else { 1 };
        let hi = if ek > 0 && wk == 0 { 3 } else { 1 };
        let b1 = b.group("B1", Role::Resolving, H, lines(ci, 1, all.clone(), lo, hi));
        read(&mut b, b1)?;
        if wk > 0 {
            let g = cx.side_out(&mut b, Dir::W, wk)?;
            b.link(g, b1)?;
        }
        if ek > 0 && wk == 0 {
            let g = cx.side_out(&mut b, Dir::E, ek)?;
            b.link(g, b1)?;
        } else if ek > 0 {
            let b2 = b.group("B2", Role::Body, V, lines(ci, 0, all.clone(), 0, 1));
            b.link(b2, b1)?;
            let b3 = b.group("B3", Role::Body, H, lines(ci, 0, all.clone(), 0, 2));
            b.link(b3, b2)?;
            let ve = b.group("VE", Role::Body, V, lines(ci, 2, all.clone(), 0, 1));
            b.link(ve, b3)?;
            let eh = b.group("EH", Role::Body, H, lines(ci, 1, all.clone(), 2, 3));
            b.link(eh, ve)?;
            let g = cx.side_out(&mut b, Dir::E, ek)?;
            b.link(g, eh)?;
            for g in [b2, b3, ve, eh] {
                b.not_in_seed(g);
            }
        }
        return b.finish();
    }

    if atg && has(Dir::W) && has(Dir::E) {
        let b1 = b.group("B1", Role::Resolving, H, lines(ci, 0, all.clone(), 0, 2));
        read(&mut b, b1)?;
        if sk > 0 {
            let g = cx.vert_out(&mut b, Dir::S, sk, 0)?;
            b.link(g, b1)?;
        }
        if nk > 0 {
            let b1b = b.group("B1b", Role::Resolving, H, lines(ci, 2, all.clone(), 0, 2));
            read(&mut b, b1b)?;
            let g = cx.vert_out(&mut b, Dir::N, nk, 2)?;
            b.link(g, b1b)?;
        }
        return b.finish();
    }

    let r0 = if has(Dir::N) { 2 } else { 0 };
    let (far_d, far_k) = if r0 == 0 { (Dir::N, nk) } else { (Dir::S, sk) };
    let near_k = if r0 == 0 { sk } else { 0 };
    let near_in = sig.input(if r0 == 0 { Dir::S } else { Dir::N });
    let via_f = atg && far_k > 0 && near_in == 1;
    let both = wk > 0 && ek > 0;
    let cb = if has(Dir::W) {
        2
    } else if has(Dir::E) {
        0
    } else if ek > 0 && wk == 0 {
        2
    } else {
        0
    };
    let body = far_k > 0 || wk > 0 || ek > 0;

    let mut cols: Vec<i32> = sig
        .inputs
        .iter()
        .map(|&(d, _)| match d {
            Dir::W => 0,
            Dir::E => 2,
            _ => 1,
        })
        .collect();
    if body {
        cols.push(cb);
    }
    if near_k > 0 {
        cols.push(1);
    }
    if both {
        cols.push(2);
    }
    let (lo, hi) = span(&cols);
    let b1 = b.group("B1", Role::Resolving, H, lines(ci, r0, all.clone(), lo, hi));
    read(&mut b, b1)?;

    if near_k > 0 {
        let g = cx.vert_out(&mut b, Dir::S, near_k, 0)?;
        b.link(g, b1)?;
    }
    if !body {
        return b.finish();
    }

    let (rlo, rhi) = if via_f { (0, 2) } else { (r0.min(1), r0.max(1)) };
    let b2 = b.group("B2", Role::Body, V, lines(ci, cb, all.clone(), rlo, rhi));
    b.link(b2, b1)?;
    b.not_in_seed(b2);

    let mut mcols = Vec::new();
    if far_k > 0 && !via_f {
        mcols.push(1);
    }
    if wk > 0 {
        mcols.push(-1);
    }
    if ek > 0 && !both {
        mcols.push(3);
    }
    let mut mg = None;
    if !mcols.is_empty() {
        mcols.push(cb);
        let (lo, hi) = span(&mcols);
        let g = b.group("M", Role::Body, H, lines(ci, 1, all.clone(), lo, hi));
        b.link(g, b2)?;
        b.not_in_seed(g);
        mg = Some(g);
    }

    if far_k > 0 {
        let (parent, from) = if via_f {
            let far_row = if r0 == 0 { 2 } else { 0 };
            let f = b.group("F", Role::Body, H, lines(ci, far_row, all.clone(), cb.min(1), cb.max(1)));
            b.link(f, b2)?;
            b.not_in_seed(f);
            (f, far_row)
        } else {
            (mg.unwrap(), 1)
        };
        let g = cx.vert_out(&mut b, far_d, far_k, from)?;
        b.link(g, parent)?;
    }
    if wk > 0 {
        let g = cx.side_out(&mut b, Dir::W, wk)?;
        b.link(g, mg.unwrap())?;
    }
    if ek > 0 {
        let parent = if both {
            let vx = b.group("VX", Role::Body, V, lines(ci, 2, all.clone(), r0.min(1), r0.max(1)));
            b.link(vx, b1)?;
            let eh = b.group("EH", Role::Body, H, lines(ci, 1, all.clone(), 2, 3));
            b.link(eh, vx)?;
            b.not_in_seed(vx);
            b.not_in_seed(eh);
            eh
        } else {
            mg.unwrap()
        };
        let g = cx.side_out(&mut b, Dir::E, ek)?;
        b.link(g, parent)?;
    }
    b.finish()
}

pub(crate) fn build(ms: &MarkedSystem, c: u32, atg: bool) -> Result<Built> {
    let tiles = (0..ms.system.tiles.len()).map(|t| template(ms, t, c, atg).map(|x| vec![x])).collect::<Result<_>>()?;
    let seed = ms.system.seed.iter().map(|(p, t)| (p, t, 0, false)).collect();
    Ok(Built { tiles, glues: Vec::new(), seed })
}
