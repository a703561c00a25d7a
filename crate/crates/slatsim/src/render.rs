//! SVG and text-grid rendering of tile and slat assemblies.
//!
//! North is up: lattice `y` grows upward, SVG rows grow downward.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::asam::{Orientation, SlatAssembly, SlatSystem};
use crate::atam::{Coord, Dir, TileAssembly, TileSystem};
use crate::compiler::{CompiledSystem, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Svg,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Palette {
    ByTile,
    BySlatGroup,
    ByRole,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderSpec {
    pub target: Target,
    pub cell_px: u32,
    pub palette: Palette,
    /// Macrotile grid spacing in lattice cells (`k·c`).
    pub macrotile_grid: Option<u32>,
    /// Cell grid spacing (`c`).
    pub cell_grid: Option<u32>,
    pub glue_dots: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            target: Target::Svg,
            cell_px: 6,
            palette: Palette::ByRole,
            macrotile_grid: None,
            cell_grid: None,
            glue_dots: false,
        }
    }
}

pub const GREEN: &str = "#2e9e44";
pub const RED: &str = "#d62728";
pub const GOLD: &str = "#d4a017";
pub const LIGHT_BLUE: &str = "#8ecae6";
pub const YELLOW: &str = "#f5e663";

pub fn role_color(role: &Role) -> &'static str {
    match role {
        Role::Resolving => GREEN,
        Role::Output(Dir::N) => RED,
        Role::Output(Dir::E) => GOLD,
        Role::Output(Dir::S) => LIGHT_BLUE,
        Role::Output(Dir::W) => YELLOW,
        Role::Input(_) => "#b39ddb",
        Role::Decision => "#f4a261",
        Role::Layout => "#c9ada7",
        Role::Body => "#9e9e9e",
    }
}

fn role_char(role: &Role) -> char {
    match role {
        Role::Resolving => 'R',
        Role::Output(d) => d.letter(),
        Role::Input(d) => d.letter().to_ascii_lowercase(),
        Role::Decision => 'd',
        Role::Layout => 'l',
        Role::Body => 'b',
    }
}

/// Stable colour for an arbitrary key (FNV-1a into a fixed hue wheel).
fn hashed_color(key: &str) -> String {
    let mut h: u32 = 0x811c9dc5;
    for b in key.bytes() {
        h = (h ^ b as u32).wrapping_mul(0x01000193);
    }
    format!("hsl({},55%,60%)", h % 360)
}

/// Slat group: the slat name with its trailing `.index` dropped.
fn group_of(name: &str) -> &str {
    name.rsplit_once('.').map_or(name, |x| x.0)
}

struct Cell {
    pos: Coord,
    fill: String,
    ch: char,
    title: String,
}

struct Canvas {
    cells: Vec<Cell>,
    dots: Vec<Coord>,
}

impl Canvas {
    fn bounds(&self) -> (i32, i32, i32, i32) {
        let xs = self.cells.iter().map(|c| c.pos.0);
        let ys = self.cells.iter().map(|c| c.pos.1);
        let (x0, x1) = (xs.clone().min().unwrap_or(0), xs.max().unwrap_or(0));
        let (y0, y1) = (ys.clone().min().unwrap_or(0), ys.max().unwrap_or(0));
        (x0, y0, x1, y1)
    }

    fn text(&self) -> String {
        let (x0, y0, x1, y1) = self.bounds();
        let mut grid: BTreeMap<Coord, char> = BTreeMap::new();
        for c in &self.cells {
            grid.entry(c.pos).and_modify(|x| *x = '+').or_insert(c.ch);
        }
        let mut out = String::new();
        for y in (y0..=y1).rev() {
            let row: String = (x0..=x1).map(|x| grid.get(&(x, y)).copied().unwrap_or('.')).collect();
            out.push_str(row.trim_end_matches('.'));
            out.push('\n');
        }
        out
    }

    fn svg(&self, spec: &RenderSpec) -> String {
        let (x0, y0, x1, y1) = self.bounds();
        let px = spec.cell_px as i32;
        let (w, h) = ((x1 - x0 + 1) * px, (y1 - y0 + 1) * px);
        let sx = |x: i32| (x - x0) * px;
        let sy = |y: i32| (y1 - y) * px;
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        for c in &self.cells {
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{px}" height="{px}" fill="{}" fill-opacity="0.8" stroke="black" stroke-width="0.2"><title>{}</title></rect>"#,
                sx(c.pos.0),
                sy(c.pos.1),
                c.fill,
                escape(&c.title)
            );
        }
        for &(x, y) in &self.dots {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{}" fill="black"/>"#, sx(x) + px / 2, sy(y) + px / 2, px.max(4) / 4);
        }
        for (step, color, width) in
            [(spec.cell_grid, "#888888", 0.5), (spec.macrotile_grid, "#000000", 1.5)]
        {
            let Some(k) = step.filter(|&k| k > 0) else { continue };
            let k = k as i32;
            let mut x = x0.div_euclid(k) * k;
            while x <= x1 + 1 {
                if x >= x0 {
                    let _ = writeln!(s, r#"<line x1="{0}" y1="0" x2="{0}" y2="{h}" stroke="{color}" stroke-width="{width}"/>"#, sx(x));
                }
                x += k;
            }
            let mut y = y0.div_euclid(k) * k;
            while y <= y1 + 1 {
                if y >= y0 {
                    let yy = sy(y) + px;
                    let _ = writeln!(s, r#"<line x1="0" y1="{yy}" x2="{w}" y2="{yy}" stroke="{color}" stroke-width="{width}"/>"#);
                }
                y += k;
            }
        }
        s.push_str("</svg>\n");
        s
    }

    fn finish(self, spec: &RenderSpec) -> String {
        match spec.target {
            Target::Svg => self.svg(spec),
            Target::Text => self.text(),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const TILE_CHARS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

/// One rectangle (or character) per tile.
pub fn render_tiles(sys: &TileSystem, asm: &TileAssembly, spec: &RenderSpec) -> String {
    let cells = asm
        .iter()
        .map(|(p, t)| {
            let name = &sys.tiles[t].name;
            Cell { pos: p, fill: hashed_color(name), ch: TILE_CHARS[t % TILE_CHARS.len()] as char, title: name.clone() }
        })
        .collect();
    Canvas { cells, dots: Vec::new() }.finish(spec)
}

/// One rectangle per slat cell. `roles` enables role colouring.
pub fn render_slats(sas: &SlatSystem, asm: &SlatAssembly, roles: Option<&[Role]>, spec: &RenderSpec) -> String {
    let mut cells = Vec::new();
    let mut dots = BTreeSet::new();
    for p in asm.placements() {
        let s = &sas.slats[p.slat];
        let role = roles.map(|r| &r[p.slat]);
        let fill = match (spec.palette, role) {
            (Palette::ByRole, Some(r)) => role_color(r).to_string(),
            _ => hashed_color(group_of(&s.name)),
        };
        let ch = match (role, s.orientation) {
            (Some(r), _) if spec.palette == Palette::ByRole => role_char(r),
            (_, Orientation::H) => '-',
            (_, Orientation::V) => '|',
        };
        for i in 0..s.length {
            let pos = p.cell(s.orientation, i);
            if spec.glue_dots && s.glues.contains_key(&i) {
                let other = match s.orientation {
                    Orientation::H => Orientation::V,
                    Orientation::V => Orientation::H,
                };
                if asm.occupant(other, pos).is_some() {
                    dots.insert(pos);
                }
            }
            cells.push(Cell { pos, fill: fill.clone(), ch, title: s.name.clone() });
        }
    }
    Canvas { cells, dots: dots.into_iter().collect() }.finish(spec)
}

/// Slat rendering with role colours and the `k·c` macrotile grid.
pub fn render_compiled(cs: &CompiledSystem, asm: &SlatAssembly, spec: &RenderSpec) -> String {
    let roles: Vec<Role> = cs.info.iter().map(|i| i.role.clone()).collect();
    render_slats(&cs.sas, asm, Some(&roles), spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{compile, Backend};
    use crate::fixtures;

    fn seed_cs() -> CompiledSystem {
        compile(&fixtures::load("zigzag-counter").unwrap(), Backend::ZigZag, 4).unwrap()
    }

    #[test]
    fn seed_render_has_one_rect_per_slat_cell() {
        let cs = seed_cs();
        let asm = cs.sas.seed_assembly();
        let want: u32 = asm.placements().iter().map(|p| cs.sas.slats[p.slat].length).sum();
        let svg = render_compiled(&cs, &asm, &RenderSpec::default());
        assert_eq!(svg.matches("<rect x=").count() as u32, want);
        assert!(svg.contains(GREEN));
    }

    #[test]
    fn macrotile_grid_lines_are_kc_spaced() {
        let cs = seed_cs();
        let asm = cs.sas.seed_assembly();
        let spec = RenderSpec { macrotile_grid: Some(8), cell_px: 1, ..Default::default() };
        let svg = render_compiled(&cs, &asm, &spec);
        let xs: Vec<i32> = svg
            .lines()
            .filter(|l| l.contains("stroke=\"#000000\"") && l.contains("y1=\"0\""))
            .map(|l| l.split('"').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(!xs.is_empty());
        assert!(xs.windows(2).all(|w| w[1] - w[0] == 8));
    }

    #[test]
    fn output_is_deterministic() {
        let cs = seed_cs();
        let run = crate::asam::run_asam(&cs.sas, 200, 5);
        let spec = RenderSpec { target: Target::Text, ..Default::default() };
        assert_eq!(render_compiled(&cs, &run.assembly, &spec), render_compiled(&cs, &run.assembly, &spec));
    }

    #[test]
    fn text_grid_is_one_char_per_cell() {
        let sys = fixtures::load("sierpinski").unwrap();
        let a = crate::atam::run_atam(&sys, 100, 0).final_assembly();
        let t = render_tiles(&sys, &a, &RenderSpec { target: Target::Text, ..Default::default() });
        let n = t.chars().filter(|c| *c != '.' && *c != '\n').count();
        assert_eq!(n, a.len());
    }
}
