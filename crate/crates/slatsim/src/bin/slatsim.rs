use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use slatsim::asam::{run_asam, SlatSystem};
use slatsim::atam::{run_atam, TileAssembly, TileSystem};
use slatsim::compiler::{self, Backend, CompiledSystem, RepresentationMap};
use slatsim::doc::{self, AtamDocument, Document};
use slatsim::iomark::{self, Certification};
use slatsim::render::{self, Palette, RenderSpec, Target};
use slatsim::verify;
use slatsim::{fixtures, Error};

#[derive(Parser)]
#[command(name = "slatsim", version, about = "Compile tile assembly systems into slat systems and verify the simulation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args)]
struct Opts {
    /// Target class for compilation
    #[arg(long, value_enum, default_value_t = ClassArg::Auto, global = true)]
    class: ClassArg,
    /// Slat cooperativity c (even, > 2; default 4)
    #[arg(long, global = true)]
    coop: Option<usize>,
    /// RNG seed for every randomized step
    #[arg(long, env = "SLATSIM_SEED", default_value_t = 0, global = true)]
    seed_rng: u64,
    /// Step limit for simulations and sampled checks
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    /// Tile bound for classification and exhaustive checks
    #[arg(long, global = true)]
    bound: Option<usize>,
    /// Output path (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Sampled runs for `verify`
    #[arg(long, default_value_t = 20, global = true)]
    runs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// IO-mark a tile system and print the marked system
    Iomark { input: String },
    /// Report the least class a tile system belongs to
    Classify { input: String },
    /// Compile a tile system into a slat system document
    Compile { input: String },
    /// Run the tile system
    SimAtam { input: String },
    /// Run a slat system (a slat document, or a tile system compiled first)
    SimAsam { input: String },
    /// Check follows, equivalent productions and models
    Verify { input: String },
    /// Render a simulated assembly
    Render { input: String },
    /// Audit macrotile resource bounds
    Bounds { input: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Auto,
    Zigzag,
    Standard,
    StandardAtg,
    Directed,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Text,
    JsonReport,
}

enum Failure {
    /// Verification or audit failed: exit 1.
    Check(String),
    /// Usage, schema or compile error: exit 2.
    Usage(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundViolated(_) => Failure::Check(e.to_string()),
            e => Failure::Usage(e),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// `-` reads stdin, `fixture:NAME` a shipped fixture, anything else a file.
fn read_input(input: &str) -> Res<String> {
    if let Some(name) = input.strip_prefix("fixture:") {
        return fixtures::text(name).map(str::to_string).ok_or_else(|| {
            Failure::Usage(Error::schema(format!("unknown fixture {name:?}; known: {}", fixtures::NAMES.join(", "))))
        });
    }
    let mut s = String::new();
    let r = if input == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(input).map(|x| s = x)
    };
    r.map_err(|e| Failure::Usage(Error::schema(format!("cannot read {input}: {e}"))))?;
    Ok(s)
}

fn read_tiles(input: &str) -> Res<TileSystem> {
    Ok(doc::parse_atam(&read_input(input)?)?.system.to_system()?)
}

impl Opts {
    fn emit(&self, text: &str) -> Res<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| Failure::Usage(Error::schema(format!("cannot write {}: {e}", p.display())))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn backend(&self, sys: &TileSystem) -> Res<Backend> {
        Ok(match self.class {
            ClassArg::Auto => {
                let ms = iomark::io_mark(sys)?;
                Backend::for_class(iomark::classify(&ms, self.bound.unwrap_or(8)).class)
            }
            ClassArg::Zigzag => Backend::ZigZag,
            ClassArg::Standard => Backend::Standard,
            ClassArg::StandardAtg => Backend::StandardATG,
            ClassArg::Directed => Backend::DirectedT2,
            ClassArg::Full => Backend::Full,
        })
    }

    fn compile(&self, sys: &TileSystem) -> Res<CompiledSystem> {
        let c = self.coop.unwrap_or(4);
        compiler::check_cooperativity(c)?;
        let b = self.backend(sys)?;
        Ok(compiler::compile(sys, b, c)?)
    }

    fn spec(&self, default: Target) -> RenderSpec {
        let target = match self.format {
            Some(Format::Text) => Target::Text,
            Some(Format::Svg) => Target::Svg,
            _ => default,
        };
        RenderSpec { target, ..Default::default() }
    }
}

fn tiles_json(sys: &TileSystem, a: &TileAssembly) -> serde_json::Value {
    let v: Vec<_> = a.iter().map(|(p, t)| json!({"x": p.0, "y": p.1, "tile": sys.tiles[t].name})).collect();
    json!(v)
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn run(cmd: &Cmd, o: &Opts) -> Res<()> {
    match cmd {
        Cmd::Iomark { input } => {
            let sys = read_tiles(input)?;
            let ms = iomark::io_mark(&sys)?;
            let mut d = AtamDocument::new(&ms.system);
            d.provenance = Some(format!("io-marked: {} tile types from {}", ms.system.tiles.len(), sys.tiles.len()));
            o.emit(&doc::to_canonical(&d))
        }
        Cmd::Classify { input } => {
            let sys = read_tiles(input)?;
            let ms = iomark::io_mark(&sys)?;
            let c = iomark::classify(&ms, o.bound.unwrap_or(8));
            let cert = match c.certification {
                Certification::SyntacticOnly => "syntactic-only".to_string(),
                Certification::CertifiedToBound(n) => format!("certified-to-bound {n}"),
                Certification::UserAsserted => "user-asserted".to_string(),
            };
            if o.format == Some(Format::JsonReport) {
                o.emit(&pretty(&json!({"class": c.class.key(), "certification": cert, "notes": c.notes})))
            } else {
                let mut s = format!("{} ({cert})\n", c.class.key());
                for n in &c.notes {
                    s.push_str(&format!("  {n}\n"));
                }
                o.emit(&s)
            }
        }
        Cmd::Compile { input } => {
            let cs = o.compile(&read_tiles(input)?)?;
            o.emit(&doc::to_canonical(&cs.to_document()))
        }
        Cmd::SimAtam { input } => {
            let sys = read_tiles(input)?;
            let run = run_atam(&sys, o.max_steps.unwrap_or(10_000), o.seed_rng);
            let a = run.final_assembly();
            match o.format {
                Some(Format::Svg) | Some(Format::Text) => o.emit(&render::render_tiles(
                    &sys,
                    &a,
                    &RenderSpec { palette: Palette::ByTile, ..o.spec(Target::Svg) },
                )),
                _ => o.emit(&pretty(&json!({
                    "rng_seed": o.seed_rng,
                    "terminal": run.terminal,
                    "tiles": a.len(),
                    "assembly": tiles_json(&sys, &a),
                }))),
            }
        }
        Cmd::SimAsam { input } => {
            let text = read_input(input)?;
            let steps = o.max_steps.unwrap_or(5000);
            match doc::parse(&text)? {
                Document::Atam(d) => {
                    let cs = o.compile(&d.system.to_system()?)?;
                    let run = run_asam(&cs.sas, steps, o.seed_rng);
                    match o.format {
                        Some(Format::Svg) | Some(Format::Text) => {
                            let spec = RenderSpec { macrotile_grid: Some(cs.scale() as u32), ..o.spec(Target::Svg) };
                            o.emit(&render::render_compiled(&cs, &run.assembly, &spec))
                        }
                        _ => {
                            let img = verify::represent_assembly(&cs, &run.assembly)?;
                            o.emit(&pretty(&json!({
                                "rng_seed": o.seed_rng,
                                "backend": cs.backend.key(),
                                "terminal": run.terminal,
                                "slats": run.assembly.len(),
                                "represented": tiles_json(&cs.marked.unmarked, &img),
                            })))
                        }
                    }
                }
                Document::Asam(d) => {
                    let sas: SlatSystem = d.system.to_system()?;
                    let run = run_asam(&sas, steps, o.seed_rng);
                    match o.format {
                        Some(Format::Svg) | Some(Format::Text) => {
                            let spec = RenderSpec {
                                palette: Palette::BySlatGroup,
                                macrotile_grid: d.representation.as_ref().map(|r| r.scale),
                                ..o.spec(Target::Svg)
                            };
                            o.emit(&render::render_slats(&sas, &run.assembly, None, &spec))
                        }
                        _ => {
                            let mut rep = json!({
                                "rng_seed": o.seed_rng,
                                "terminal": run.terminal,
                                "slats": run.assembly.len(),
                            });
                            if let Some(r) = &d.representation {
                                let repr = RepresentationMap::from_doc(r, &sas)?;
                                let mut img = TileAssembly::new();
                                for p in run.assembly.placements() {
                                    if let Some(&(t, off)) = repr.resolving.get(&p.slat) {
                                        let (x, y) = (p.anchor.0 - off.0, p.anchor.1 - off.1);
                                        if x.rem_euclid(repr.scale) == 0 && y.rem_euclid(repr.scale) == 0 {
                                            img.insert((x / repr.scale, y / repr.scale), t);
                                        }
                                    }
                                }
                                let v: Vec<_> = img
                                    .iter()
                                    .map(|(p, t)| json!({"x": p.0, "y": p.1, "tile": repr.tiles[t].name}))
                                    .collect();
                                rep["represented"] = json!(v);
                            }
                            o.emit(&pretty(&rep))
                        }
                    }
                }
            }
        }
        Cmd::Verify { input } => {
            let sys = read_tiles(input)?;
            let cs = o.compile(&sys)?;
            let rep = verify::verify_all(&cs, o.bound.unwrap_or(4), o.runs, o.max_steps.unwrap_or(1000), o.seed_rng)?;
            if o.format == Some(Format::Text) {
                let line = |name: &str, ok: bool| format!("{} {name}\n", if ok { "PASS" } else { "FAIL" });
                let mut s = String::new();
                s.push_str(&line("follows", rep.follows.ok()));
                s.push_str(&line("equivalent-productions", rep.equivalent_productions.ok()));
                s.push_str(&line("models", rep.models.ok()));
                s.push_str(&format!("coverage: {}\n", rep.coverage));
                o.emit(&s)?;
            } else {
                o.emit(&pretty(&rep))?;
            }
            if rep.pass {
                Ok(())
            } else {
                Err(Failure::Check("verification failed".into()))
            }
        }
        Cmd::Render { input } => {
            let text = read_input(input)?;
            let steps = o.max_steps.unwrap_or(5000);
            let spec = o.spec(Target::Svg);
            match doc::parse(&text)? {
                // Tiles unless a class or cooperativity asks for the compiled slats.
                Document::Atam(d) if o.class == ClassArg::Auto && o.coop.is_none() => {
                    let sys = d.system.to_system()?;
                    let a = run_atam(&sys, steps, o.seed_rng).final_assembly();
                    o.emit(&render::render_tiles(&sys, &a, &RenderSpec { palette: Palette::ByTile, ..spec }))
                }
                Document::Atam(d) => {
                    let cs = o.compile(&d.system.to_system()?)?;
                    let run = run_asam(&cs.sas, steps, o.seed_rng);
                    let spec = RenderSpec { macrotile_grid: Some(cs.scale() as u32), cell_grid: Some(cs.c), ..spec };
                    o.emit(&render::render_compiled(&cs, &run.assembly, &spec))
                }
                Document::Asam(d) => {
                    let sas = d.system.to_system()?;
                    let run = run_asam(&sas, steps, o.seed_rng);
                    let spec = RenderSpec {
                        palette: Palette::BySlatGroup,
                        macrotile_grid: d.representation.as_ref().map(|r| r.scale),
                        ..spec
                    };
                    o.emit(&render::render_slats(&sas, &run.assembly, None, &spec))
                }
            }
        }
        Cmd::Bounds { input } => {
            let text = read_input(input)?;
            let (rep, err) = match doc::parse(&text)? {
                Document::Atam(d) => {
                    let cs = o.compile(&d.system.to_system()?)?;
                    match compiler::check_resource_bounds(&cs) {
                        Ok(r) => (Some(r), None),
                        Err(e) => (None, Some(e)),
                    }
                }
                Document::Asam(d) => match compiler::document_bounds(&d) {
                    Ok(r) => (Some(r), None),
                    Err(e @ Error::BoundViolated(_)) => (None, Some(e)),
                    Err(e) => return Err(e.into()),
                },
            };
            if let Some(r) = rep {
                let s = if o.format == Some(Format::JsonReport) {
                    pretty(&json!({
                        "backend": r.backend.key(),
                        "c": r.c,
                        "macrotile_side": r.macrotile_side,
                        "max_slats_per_macrotile": r.max_slats_per_macrotile,
                        "max_slat_length": r.max_slat_length,
                        "bound_side": r.bound_side,
                        "bound_slats": r.bound_slats,
                        "bound_length": r.bound_length,
                        "within": r.within(),
                    }))
                } else {
                    format!(
                        "{} c={}: side {} (= {}), slats/macrotile {} (<= {}), max slat length {} (<= {})\n",
                        r.backend.key(),
                        r.c,
                        r.macrotile_side,
                        r.bound_side,
                        r.max_slats_per_macrotile,
                        r.bound_slats,
                        r.max_slat_length,
                        r.bound_length
                    )
                };
                o.emit(&s)
            } else {
                Err(err.unwrap().into())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.cmd, &cli.opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
