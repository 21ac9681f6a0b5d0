#![allow(dead_code)]

use behaviorspec::environment::{AttributedGraph, Behavior, Event, Timestamp};
use behaviorspec::formula::{fragment_check, Formula};
use behaviorspec::miner::{AttributedFormula, Origin, Specification};
use behaviorspec::oracle::{default_max_prefix, find_model, Lasso, OracleError, DEFAULT_STATE_CAP};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const ATOMS: [&str; 3] = ["p", "q", "r"];

fn atom(rng: &mut TestRng, atoms: &[&str]) -> Formula {
    Formula::atom(*atoms.choose(rng).unwrap())
}

/// Temporal-free formula of bounded depth.
pub fn gen_plain(rng: &mut TestRng, atoms: &[&str], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.4) {
        let a = atom(rng, atoms);
        return if rng.gen_bool(0.3) {
            Formula::not(a)
        } else {
            a
        };
    }
    let a = gen_plain(rng, atoms, depth - 1);
    let b = gen_plain(rng, atoms, depth - 1);
    match rng.gen_range(0..4) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::implies(a, b),
        _ => Formula::not(a),
    }
}

/// Component with exactly `temporal` temporal operators (0, 1 or 2).
fn gen_component(rng: &mut TestRng, atoms: &[&str], temporal: usize, responses: bool) -> Formula {
    match temporal {
        0 => gen_plain(rng, atoms, 2),
        1 => {
            let body = gen_plain(rng, atoms, 1);
            if rng.gen_bool(0.5) {
                Formula::always(body)
            } else {
                Formula::eventually(body)
            }
        }
        _ => {
            debug_assert!(responses);
            Formula::always(Formula::implies(
                gen_plain(rng, atoms, 1),
                Formula::eventually(gen_plain(rng, atoms, 1)),
            ))
        }
    }
}

/// Random fragment formula over at most three atoms with at most
/// `max_temporal` temporal operators. With `responses` off, no `G (a -> F b)`
/// shapes are produced, so the negation stays inside the fragment.
pub fn gen_fragment(rng: &mut TestRng, max_temporal: usize, responses: bool) -> Formula {
    let n_atoms = rng.gen_range(1..=ATOMS.len());
    let atoms = &ATOMS[..n_atoms];
    let mut budget = rng.gen_range(0..=max_temporal);
    let mut parts = Vec::new();
    let n_parts = rng.gen_range(1..=4);
    for i in 0..n_parts {
        let last = i + 1 == n_parts;
        let mut t = if last {
            budget.min(2)
        } else {
            rng.gen_range(0..=budget.min(2))
        };
        if t == 2 && !responses {
            t = 1;
        }
        budget -= t;
        parts.push(gen_component(rng, atoms, t, responses));
    }
    let mut f = parts.pop().unwrap();
    while let Some(p) = parts.pop() {
        f = if rng.gen_bool(0.65) {
            Formula::and(p, f)
        } else {
            Formula::or(p, f)
        };
    }
    debug_assert!(fragment_check(&f).is_ok(), "{f}");
    f
}

pub fn negation_in_fragment(f: &Formula) -> bool {
    fragment_check(&Formula::not(f.clone()).push_negation()).is_ok()
}

pub fn gen_graph(rng: &mut TestRng, min: usize, max: usize) -> AttributedGraph {
    let n = rng.gen_range(min..=max);
    AttributedGraph::with_vertices((0..n).map(|i| format!("n{i}"))).unwrap()
}

fn timestamp(seconds: u32) -> Timestamp {
    let (m, s) = (seconds / 60, seconds % 60);
    let (h, m) = (m / 60, m % 60);
    let (d, h) = (h / 24, h % 24);
    Timestamp::new(2020, 1, 1 + d as u8, h as u8, m as u8, s as u8).unwrap()
}

/// Random behavior over the graph: up to `objects` objects and `max_events`
/// events each, with timestamps in January 2020, some repeated.
pub fn gen_behavior(
    rng: &mut TestRng,
    graph: &AttributedGraph,
    objects: usize,
    max_events: usize,
) -> Behavior {
    let mut events = Vec::new();
    let n_objects = rng.gen_range(1..=objects);
    for o in 0..n_objects {
        let n = rng.gen_range(1..=max_events);
        for _ in 0..n {
            let node = graph.vertices().choose(rng).unwrap().clone();
            let t = timestamp(rng.gen_range(0..3600));
            events.push(Event::new(format!("o{o}"), node, t));
        }
    }
    events.shuffle(rng);
    Behavior::new(events)
}

/// Random specification for `object` built from the usual pattern shapes over
/// `nodes`. May be inconsistent.
pub fn gen_spec(rng: &mut TestRng, object: &str, nodes: &[&str], size: usize) -> Specification {
    let mut spec = Specification::new();
    for _ in 0..size {
        let a = atom(rng, nodes);
        let b = atom(rng, nodes);
        let (f, origin) = match rng.gen_range(0..6) {
            0 => (Formula::always(Formula::not(a)), Origin::Saf),
            1 => (Formula::eventually(a), Origin::Liv1),
            2 => (
                Formula::always(Formula::implies(a, Formula::eventually(b))),
                Origin::Liv2,
            ),
            3 => (
                Formula::or(
                    Formula::implies(a.clone(), Formula::eventually(b)),
                    Formula::implies(a, Formula::eventually(atom(rng, nodes))),
                ),
                Origin::External,
            ),
            4 => (a, Origin::External),
            _ => (
                Formula::implies(a, Formula::eventually(b)),
                Origin::External,
            ),
        };
        spec.insert(AttributedFormula::new(f, object, origin));
    }
    spec
}

/// Random trigger over `nodes`: an atom, `G !a`, `F a` or a response.
pub fn gen_trigger(rng: &mut TestRng, nodes: &[&str]) -> Formula {
    let a = atom(rng, nodes);
    match rng.gen_range(0..4) {
        0 => a,
        1 => Formula::always(Formula::not(a)),
        2 => Formula::eventually(a),
        _ => Formula::always(Formula::implies(a, Formula::eventually(atom(rng, nodes)))),
    }
}

/// Oracle search with the largest prefix bound, up to the default, that fits
/// the candidate cap. Models are found shortest first.
pub fn oracle_model(f: &Formula) -> Result<Option<Lasso>, OracleError> {
    let n_atoms = f.atoms().len() as u32;
    let mut k = default_max_prefix(f);
    while k > 1 {
        let candidates: u128 = (1..=k as u32)
            .map(|i| {
                (1u128 << n_atoms)
                    .saturating_pow(i)
                    .saturating_mul(i as u128)
            })
            .fold(0u128, |a, b| a.saturating_add(b));
        if candidates <= DEFAULT_STATE_CAP as u128 {
            break;
        }
        k -= 1;
    }
    find_model(f, k, DEFAULT_STATE_CAP)
}
