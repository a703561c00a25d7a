//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p slatsim --test acceptance` (release recommended
//! for the timing limits: `cargo test --release ...`).

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slatsim::asam::SlatSystem;
use slatsim::atam::{producible_set, Dir, Glue, TileAssembly, TileSystem, TileType};
use slatsim::compiler::{check_resource_bounds, compile, Backend, CompiledSystem};
use slatsim::fixtures;
use slatsim::iomark::io_mark;
use slatsim::verify::{
    check_runs, check_zigzag_locality, enumerate_states, equivalence_from_graph, models_from_graph,
    oracle_equivalence, ViolationKind, DEFAULT_STATE_CAP,
};

const C1_LIMIT: Duration = Duration::from_secs(10);
const C2_LIMIT: Duration = Duration::from_secs(60);
const C5_LIMIT: Duration = Duration::from_secs(300);
const C2_SEEDS: u64 = 20;
const C2_MAX_SLATS: usize = 5000;
const C3_RUNS: usize = 100;
const C3_STEPS: usize = 1000;
const C5_BOUND: usize = 4;
const C6_RANDOM: usize = 25;
const C6_BOUND: usize = 8;
const C7_RUNS: usize = 20;
const C7_STEPS: usize = 1000;
const C8_MUTATIONS: usize = 20;

/// One fixture per class.
const PER_CLASS: [(&str, Backend); 5] = [
    ("zigzag-counter", Backend::ZigZag),
    ("sierpinski", Backend::Standard),
    ("atg-ns", Backend::StandardATG),
    ("mismatch", Backend::DirectedT2),
    ("competition", Backend::Full),
];

const DIRECTED: [&str; 6] = ["zigzag-counter", "zigzag-tm", "sierpinski", "atg-ns", "atg-ew", "mismatch"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: u32, name: &str, o: &Outcome, dt: Duration) -> bool {
    println!("{} criterion {n} {name}: {} ({:.2}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail, dt.as_secs_f64());
    o.pass
}

fn cs(name: &str, b: Backend, c: usize) -> CompiledSystem {
    compile(&fixtures::load(name).unwrap(), b, c).unwrap()
}

/// Directed fixtures compilable by each backend.
fn directed_pairs() -> Vec<(&'static str, Backend, CompiledSystem)> {
    let mut v = Vec::new();
    for b in Backend::ALL {
        for name in DIRECTED {
            if let Ok(x) = compile(&fixtures::load(name).unwrap(), b, 4) {
                v.push((name, b, x));
            }
        }
    }
    v
}

fn limits() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for c in [4usize, 6, 8] {
        for (name, b) in PER_CLASS {
            n += 1;
            let (k, s, l) = b.limits();
            let c32 = c as u32;
            match check_resource_bounds(&cs(name, b, c)) {
                Ok(r) => {
                    let exact = r.macrotile_side == k * c32 && r.max_slat_length == l * c32;
                    if !exact || r.max_slats_per_macrotile as u32 > s * c32 {
                        bad.push(format!("{b} c={c}: {r:?}"));
                    }
                }
                Err(e) => bad.push(format!("{b} c={c}: {e}")),
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: if bad.is_empty() { format!("{n} compilations exact") } else { bad.join("; ") } }
}

fn oracle() -> Outcome {
    let seeds: Vec<u64> = (0..C2_SEEDS).collect();
    let mut bad = Vec::new();
    let mut n = 0;
    for (name, b, x) in directed_pairs() {
        for r in oracle_equivalence(&x, &seeds, C2_MAX_SLATS) {
            n += 1;
            if !r.equal {
                bad.push(format!("{name}/{b} seed {}: {}", r.rng_seed, r.detail.unwrap_or_default()));
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{}/{n} runs equal{}", n - bad.len(), first(&bad)) }
}

fn first(v: &[String]) -> String {
    v.first().map(|s| format!("; first: {s}")).unwrap_or_default()
}

/// Criteria 3 and 4 share their runs.
fn follows_and_clean() -> (Outcome, Outcome) {
    let mut follows = Vec::new();
    let mut clean = Vec::new();
    let mut steps = 0;
    let mut attach = 0;
    for (name, b) in PER_CLASS.iter().copied().chain([("atg-ew", Backend::StandardATG), ("zigzag-tm", Backend::ZigZag)]) {
        let rep = check_runs(&cs(name, b, 4), C3_RUNS, C3_STEPS, 1000);
        steps += rep.steps;
        attach += rep.tile_attachments;
        let tag = |k: &ViolationKind| format!("{name}/{b}: {} {k:?}", rep.count(k));
        for k in [ViolationKind::Follows, ViolationKind::Precedence, ViolationKind::Unexpected] {
            if rep.count(&k) > 0 {
                follows.push(tag(&k));
            }
        }
        for k in [ViolationKind::Unclean, ViolationKind::Monotone] {
            if rep.count(&k) > 0 {
                clean.push(tag(&k));
            }
        }
    }
    let base = format!("{steps} slat steps, {attach} tile attachments");
    (
        Outcome { pass: follows.is_empty(), detail: format!("{base}, {} follows violations{}", follows.len(), first(&follows)) },
        Outcome { pass: clean.is_empty(), detail: format!("{base}, {} clean/monotone violations{}", clean.len(), first(&clean)) },
    )
}

fn exhaustive() -> Outcome {
    let mut bad = Vec::new();
    let mut states = 0;
    for (name, b) in PER_CLASS.iter().copied().chain([("atg-ew", Backend::StandardATG)]) {
        let x = cs(name, b, 4);
        let g = match enumerate_states(&x, C5_BOUND, DEFAULT_STATE_CAP) {
            Ok(g) => g,
            Err(e) => {
                bad.push(format!("{name}/{b}: {e}"));
                continue;
            }
        };
        states += g.state_image.len();
        let eq = equivalence_from_graph(&x, &g).unwrap();
        let m = models_from_graph(&x, &g).unwrap();
        if !eq.ok() {
            bad.push(format!("{name}/{b}: equivalence {:?} missing, {:?} extra", eq.missing, eq.extra));
        }
        if !m.ok() {
            bad.push(format!("{name}/{b}: models {:?} {:?}", m.condition1_failures, m.condition2_failures));
        }
        if name == "competition" {
            let t = &x.marked.unmarked;
            let (tx, ty) = (t.tile_index("tX").unwrap(), t.tile_index("tY").unwrap());
            let terms: Vec<&TileAssembly> =
                (0..g.terminal.len()).filter(|&s| g.terminal[s]).map(|s| &g.images[g.state_image[s]]).collect();
            let has = |u| terms.iter().any(|a| a.get((1, 0)) == Some(u));
            if !(has(tx) && has(ty)) {
                bad.push("competition: both terminal images not realized".into());
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{states} slat states over 6 systems{}", first(&bad)) }
}

fn random_system(rng: &mut ChaCha8Rng) -> TileSystem {
    let n = rng.gen_range(2..5);
    let glue = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.4) {
            Glue::null()
        } else {
            Glue::new(format!("g{}", rng.gen_range(0..3)), rng.gen_range(1..3))
        }
    };
    let mut tiles: Vec<TileType> = (0..n)
        .map(|i| TileType::new(format!("t{i}"), glue(rng), glue(rng), glue(rng), glue(rng)))
        .collect();
    tiles[0].glues[Dir::E.idx()] = Glue::new("g0", 2);
    tiles[0].glues[Dir::N.idx()] = Glue::new("g1", 1);
    TileSystem::new(tiles, TileAssembly::single((0, 0), 0), 2).unwrap()
}

fn io_counts() -> Outcome {
    let mut bad = Vec::new();
    let single = |glues: [Glue; 4]| {
        let t = TileType { name: "t".into(), glues };
        let seed = TileType::new("s", Glue::null(), Glue::null(), Glue::null(), Glue::null());
        let sys = TileSystem::new(vec![seed, t], TileAssembly::single((0, 0), 0), 2).unwrap();
        io_mark(&sys).unwrap().system.tiles.iter().filter(|x| x.name.starts_with("t@")).count()
    };
    let g = |l: &str, s| Glue::new(l, s);
    let four = single([g("a", 1), g("b", 1), g("c", 1), g("d", 1)]);
    let mixed = single([g("a", 2), g("b", 2), g("c", 1), g("d", 1)]);
    if four != 6 {
        bad.push(format!("4×strength-1 tile gave {four}"));
    }
    if mixed != 3 {
        bad.push(format!("2×strength-2 + 2×strength-1 tile gave {mixed}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for _ in 0..C6_RANDOM {
        let sys = random_system(&mut rng);
        let ms = io_mark(&sys).unwrap();
        let (Ok(a), Ok(b)) = (producible_set(&sys, C6_BOUND), producible_set(&ms.system, C6_BOUND)) else {
            bad.push("producible set exceeded its cap".into());
            continue;
        };
        let b: BTreeSet<TileAssembly> = b.iter().map(|x| ms.unmark(x)).collect();
        checked += 1;
        if a != b {
            bad.push(format!("random system {checked} not preserved"));
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("counts {four} and {mixed}, {checked} random systems preserved{}", first(&bad)) }
}

fn zigzag_locality() -> Outcome {
    let mut bad = Vec::new();
    let mut steps = 0;
    for name in ["zigzag-counter", "zigzag-tm"] {
        let r = check_zigzag_locality(&cs(name, Backend::ZigZag, 4), C7_RUNS, C7_STEPS, 70);
        steps += r.steps;
        if !r.ok() {
            bad.push(format!("{name}: {} bond, {} locality: {}", r.bond_count_violations, r.locality_violations, r.first.unwrap_or_default()));
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{steps} attachments checked{}", first(&bad)) }
}

fn mutations() -> Outcome {
    let base = cs("zigzag-counter", Backend::ZigZag, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // Seed-only slat types are placed without bonding, so their labels are inert.
    let seeded: BTreeSet<usize> = base.sas.seed.iter().map(|p| p.slat).collect();
    let interior: Vec<(usize, u32)> = base
        .intents
        .iter()
        .enumerate()
        .filter(|(s, _)| !seeded.contains(s))
        .flat_map(|(s, m)| m.iter().filter(|(_, i)| i.0.starts_with("interior|")).map(move |(&p, _)| (s, p)))
        .collect();
    let seeds: Vec<u64> = (0..5).collect();
    let mut detected = 0;
    let mut missed = Vec::new();
    for (s, p) in interior.choose_multiple(&mut rng, C8_MUTATIONS).copied() {
        let mut slats = base.sas.slats.clone();
        let old = slats[s].glues[&p].clone();
        let star = if old.ends_with('*') { "*" } else { "" };
        slats[s].glues.insert(p, format!("mutant{star}"));
        let mut m = base.clone();
        m.sas = SlatSystem::new(slats, base.sas.seed.clone(), base.sas.cooperativity).unwrap();
        let c2 = oracle_equivalence(&m, &seeds, C2_MAX_SLATS).iter().all(|r| r.equal);
        let c3 = check_runs(&m, 5, C3_STEPS, 0).ok();
        if c2 && c3 {
            missed.push(format!("{}[{p}] = {old}", m.sas.slats[s].name));
        } else {
            detected += 1;
        }
    }
    Outcome {
        pass: detected >= C8_MUTATIONS && missed.is_empty(),
        detail: format!("{detected}/{C8_MUTATIONS} mutations detected (of {} attachable interior labels){}", interior.len(), if missed.is_empty() { String::new() } else { format!("; missed: {}", missed.join(", ")) }),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed())
}

fn within(o: Outcome, dt: Duration, limit: Duration) -> Outcome {
    if dt > limit {
        Outcome { pass: false, detail: format!("{} (over the {}s limit)", o.detail, limit.as_secs()) }
    } else {
        o
    }
}

fn main() {
    let mut ok = true;
    let (o, dt) = timed(limits);
    ok &= report(1, "resource bounds", &within(o, dt, C1_LIMIT), dt);
    let (o, dt) = timed(oracle);
    ok &= report(2, "oracle equivalence", &within(o, dt, C2_LIMIT), dt);
    let ((f, c), dt) = timed(follows_and_clean);
    ok &= report(3, "follows", &f, dt);
    ok &= report(4, "clean mapping and monotonicity", &c, dt);
    let (o, dt) = timed(exhaustive);
    ok &= report(5, "equivalent productions and models", &within(o, dt, C5_LIMIT), dt);
    let (o, dt) = timed(io_counts);
    ok &= report(6, "io-marking", &o, dt);
    let (o, dt) = timed(zigzag_locality);
    ok &= report(7, "zig-zag exactness and locality", &o, dt);
    let (o, dt) = timed(mutations);
    ok &= report(8, "mutation sensitivity", &o, dt);
    if !ok {
        std::process::exit(1);
    }
}
