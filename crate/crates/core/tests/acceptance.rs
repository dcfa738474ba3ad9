//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use choquet::capacity::{Attitude, Capacity, EventSet, Mask, StateSpace};
use choquet::corpus::{random_capacity, run_corpus, CorpusConfig, CorpusSummary};
use choquet::extended::{ExtendedGame, ExtendedRestriction};
use choquet::game::{parse_game, ProductSet, StrategicGame};
use choquet::rational::{int, ratio, Rational};
use choquet::solver::{
    build_polytope, choquet_rationalizable, classical_rationalizability, grid_oracle, grid_oracle_among,
    nonadditivity_gaps, AttitudeRestriction, PlayerRestriction, Shape, SolveReport,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Wall-clock budget for each worked example.
const EXAMPLE_BUDGET: Duration = Duration::from_secs(1);
/// Budget for the random-game corpus.
const CORPUS_BUDGET: Duration = Duration::from_secs(300);
/// Budget for the capacity property suite.
const CAPACITY_BUDGET: Duration = Duration::from_secs(60);
const CORPUS_GAMES: usize = 200;
const CORPUS_SEED: u64 = 42;
const CAPACITY_COUNT: usize = 1200;
const MIN_CAPACITIES: usize = 1000;
const MIN_TYPE_SPACES: usize = 100;
const GRID_BOUND: u32 = 16;
const ESCALATED_BOUND: u32 = 64;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn game(name: &str) -> StrategicGame {
    let path = format!("{}/../../games/{name}.game", env!("CARGO_MANIFEST_DIR"));
    parse_game(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn sets(raw: &[&[usize]]) -> ProductSet {
    ProductSet::new(raw.iter().map(|s| s.to_vec()).collect())
}

fn solve(game: &StrategicGame, r: &str) -> SolveReport {
    choquet_rationalizable(game, &AttitudeRestriction::parse(r, game.num_players()).unwrap()).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn reference_game() -> Verdict {
    let g = game("ref");
    let ((add, conc), elapsed) = timed(|| (solve(&g, "add"), solve(&g, "conc+na")));
    let mut problems = Vec::new();
    if *add.limit() != sets(&[&[0, 1, 2], &[0, 1]]) {
        problems.push(format!("add limit {:?}", add.limit()));
    }
    if *conc.level(1) != sets(&[&[0, 1], &[0, 1]]) || *conc.limit() != sets(&[&[0, 1], &[0, 1]]) {
        problems.push(format!("conc+na levels {:?} / {:?}", conc.level(1), conc.limit()));
    }
    // Narrated region: ν(l) = ν(r) = x with x in (1/2, 1] lies in the
    // level-1 polytope, is non-additive, and makes u and d best responses.
    let restriction = PlayerRestriction::new(Shape::Concave, true).unwrap();
    let poly = build_polytope(&g, 0, restriction, &ProductSet::full(&g)).unwrap();
    let space = poly.space().clone();
    for num in 0..=16 {
        let x = ratio(num, 16);
        let cap = Capacity::new(&space, vec![int(0), x.clone(), x.clone(), int(1)]).unwrap();
        let inside = poly.contains(&cap) && cap.nonadditivity_witness().is_some();
        let in_region = x > ratio(1, 2);
        if inside != in_region {
            problems.push(format!("x = {x}: polytope membership {inside}"));
        }
        if in_region && g.choquet_best_responses(0, &cap).unwrap() != vec![0, 1] {
            problems.push(format!("x = {x}: best responses differ from {{u,d}}"));
        }
    }
    // m's region in the concave polytope is additive only.
    match nonadditivity_gaps(&g, 0, 2, &poly).unwrap() {
        Some(gaps) if gaps.iter().all(|p| p.min.is_zero() && p.max.is_zero()) => {}
        other => problems.push(format!("m gaps {other:?}")),
    }
    for a in [0, 1] {
        let w = conc.witness(1, 0, a).unwrap();
        if !poly.contains(w) || w.classify_attitude() != Attitude::Concave {
            problems.push(format!("level-1 witness for action {a} is off the polytope"));
        }
    }
    if elapsed >= EXAMPLE_BUDGET {
        problems.push(format!("took {elapsed:?}"));
    }
    Verdict::new(
        problems.is_empty(),
        if problems.is_empty() {
            format!("add {{u,d,m}}x{{l,r}}, conc+na {{u,d}}x{{l,r}} in {elapsed:.2?}")
        } else {
            problems.join("; ")
        },
    )
}

fn nonexistence_game() -> Verdict {
    let g = game("nex");
    let ((add, conv), elapsed) = timed(|| (solve(&g, "add"), solve(&g, "conv+na")));
    let ok = *add.limit() == sets(&[&[0, 1, 2], &[0, 1]])
        && conv.level(1).player(0) == [2]
        && conv.empty_from(1) == Some(2)
        && conv.limit().player(1).is_empty()
        && elapsed < EXAMPLE_BUDGET;
    Verdict::new(
        ok,
        format!(
            "add limit {}; conv+na level 1 Rowena {}, Colin empty from level {}; {elapsed:.2?}",
            add.limit().display(&g),
            g.format_actions(0, conv.level(1).player(0)),
            conv.empty_from(1).map_or("-".into(), |k| k.to_string())
        ),
    )
}

fn coarse_game() -> Verdict {
    let g = game("coarse");
    let ((add, conv), elapsed) = timed(|| (solve(&g, "add"), solve(&g, "conv")));
    let ok = add.limit().player(0) == [0, 1]
        && conv.limit().player(0) == [0, 1, 2]
        && add.limit().player(1) == [0, 1]
        && conv.limit().player(1) == [0, 1]
        && elapsed < EXAMPLE_BUDGET;
    Verdict::new(
        ok,
        format!(
            "add limit {}, conv limit {} in {elapsed:.2?}",
            add.limit().display(&g),
            conv.limit().display(&g)
        ),
    )
}

fn corpus_properties(summary: &CorpusSummary, names: &[&str], elapsed: Option<Duration>) -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for name in names {
        let p = summary.property(name).unwrap();
        pass &= p.failed == 0 && p.passed > 0;
        parts.push(format!("{name} {}/{}", p.passed, p.passed + p.failed));
        if let Some(example) = &p.first_counterexample {
            parts.push(format!("first counterexample: {}", example.replace('\n', " | ")));
        }
    }
    if let Some(elapsed) = elapsed {
        pass &= elapsed < CORPUS_BUDGET;
        parts.push(format!("corpus of {} games in {elapsed:.1?}", summary.games));
    }
    Verdict::new(pass, parts.join(", "))
}

/// Every 2x2 game with payoffs in {0,1,2}, every base restriction, every
/// candidate action: never a best response among `Y_i` on the grid iff the
/// singleton is strictly dominated in the extended restriction.
fn never_best_response_suite() -> Verdict {
    // Both tests read only the candidate player's payoffs, so results are
    // cached on that player's matrix oriented as (own, other).
    let mut cache: HashMap<([i64; 4], u32, u32, usize), (bool, bool)> = HashMap::new();
    let mut cases = 0usize;
    let mut escalated = 0usize;
    let mut disagreements = Vec::new();
    for code in 0..3usize.pow(8) {
        let digits: Vec<i64> = (0..8).map(|k| (code / 3usize.pow(k)) as i64 % 3).collect();
        let cells: Vec<Vec<(Rational, Rational)>> = (0..2)
            .map(|row| (0..2).map(|col| (int(digits[2 * (2 * row + col)]), int(digits[2 * (2 * row + col) + 1]))).collect())
            .collect();
        let g = StrategicGame::bimatrix(["P1", "P2"], &["a1", "a2"], &["b1", "b2"], &cells).unwrap();
        let ext = ExtendedGame::build(&g).unwrap();
        for i in 0..2 {
            let oriented: [i64; 4] = std::array::from_fn(|k| {
                let (own, other) = (k / 2, k % 2);
                let (row, col) = if i == 0 { (own, other) } else { (other, own) };
                digits[2 * (2 * row + col) + i]
            });
            for own in 1u32..4 {
                for other in 1u32..4 {
                    let members = |m: u32| (0..2).filter(|k| m & (1 << k) != 0).collect::<Vec<usize>>();
                    let mut raw = vec![Vec::new(), Vec::new()];
                    raw[i] = members(own);
                    raw[1 - i] = members(other);
                    let base = ProductSet::new(raw);
                    for &a in base.player(i) {
                        cases += 1;
                        let key = (oriented, own, other, a);
                        let (found, dominated) = *cache.entry(key).or_insert_with(|| {
                            let rivals = base.player(i);
                            let r = PlayerRestriction::UNRESTRICTED;
                            let dominated = ext
                                .is_strictly_dominated(i, 1 << a, &ExtendedRestriction::from_base(&base))
                                .unwrap()
                                .is_some();
                            let mut found =
                                grid_oracle_among(&g, i, a, rivals, &base, r, GRID_BOUND).unwrap().is_some();
                            if !found && !dominated {
                                escalated += 1;
                                found = grid_oracle_among(&g, i, a, rivals, &base, r, ESCALATED_BOUND)
                                    .unwrap()
                                    .is_some();
                            }
                            (found, dominated)
                        });
                        if found == dominated && disagreements.len() < 3 {
                            disagreements.push(format!("game {code} player {i} action {a} base {base:?}"));
                        }
                    }
                }
            }
        }
    }
    Verdict::new(
        disagreements.is_empty(),
        format!(
            "{cases} cases, {} distinct, {escalated} escalated to bound {ESCALATED_BOUND}, unresolved: {}",
            cache.len(),
            if disagreements.is_empty() { "none".to_string() } else { disagreements.join("; ") }
        ),
    )
}

fn subsets(mask: Mask) -> Vec<Mask> {
    (0..=mask).filter(|s| s & !mask == 0).collect()
}

/// `v((Ω∖E) ∪ F) = v(F)` for every `F ⊆ E`.
fn believed_literal(v: &[Rational], full: Mask, e: Mask) -> bool {
    subsets(e).into_iter().all(|f| v[((full & !e) | f) as usize] == v[f as usize])
}

/// `v(G ∪ F) = v(F)` for every `F` and every `G ⊆ Ω∖E`.
fn complement_null_literal(v: &[Rational], full: Mask, e: Mask) -> bool {
    (0..=full).all(|f| subsets(full & !e).into_iter().all(|g| v[(g | f) as usize] == v[f as usize]))
}

/// `v(F) = v(F ∩ E) + v(F ∖ E)` for every `F`.
fn unambiguous_literal(v: &[Rational], full: Mask, e: Mask) -> bool {
    (0..=full).all(|f| v[f as usize] == &v[(f & e) as usize] + &v[(f & !e) as usize])
}

fn capacity_suite() -> Verdict {
    let (outcome, elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
        let mut checked = 0usize;
        let mut violations = Vec::new();
        for _ in 0..CAPACITY_COUNT {
            let n = rng.gen_range(1..=4);
            let space = StateSpace::new((0..n).map(|k| format!("s{k}"))).unwrap();
            let cap = random_capacity(&mut rng, &space);
            let v = cap.values();
            let full = space.full_mask();
            checked += 1;
            for e in 0..=full {
                let event = EventSet::new(&space, e);
                let literal = believed_literal(v, full, e);
                let via_unambiguous = unambiguous_literal(v, full, e) && v[e as usize] == int(1);
                let comp = full & !e;
                let via_complement = unambiguous_literal(v, full, comp) && v[comp as usize].is_zero();
                let null_form = complement_null_literal(v, full, e);
                let library = cap.is_believed(&event).unwrap();
                let library_null = cap.complement_is_null(&event).unwrap();
                if !(literal == via_unambiguous
                    && literal == via_complement
                    && literal == null_form
                    && literal == library
                    && literal == library_null)
                    && violations.len() < 3
                {
                    violations.push(format!("event {e:#b} of\n{}", cap.to_text()));
                }
            }
        }
        (checked, violations)
    });
    let (checked, violations) = outcome;
    Verdict::new(
        violations.is_empty() && checked >= MIN_CAPACITIES && elapsed < CAPACITY_BUDGET,
        format!(
            "{checked} capacities on 1 to 4 states in {elapsed:.2?}; violations: {}",
            if violations.is_empty() { "none".into() } else { violations.join(" | ").replace('\n', " ") }
        ),
    )
}

/// Enumerated grid capacities on up to three states plus random samples:
/// believing a singleton forces the point mass.
fn singleton_belief_suite() -> Verdict {
    let mut checked = 0usize;
    let mut violations = Vec::new();
    let mut examine = |cap: &Capacity, space: &StateSpace| {
        for s in 0..space.len() {
            if !believed_literal(cap.values(), space.full_mask(), 1 << s) {
                continue;
            }
            checked += 1;
            if cap.classify_attitude() != Attitude::Additive || *cap != Capacity::degenerate(space, s) {
                violations.push(cap.to_text());
            }
        }
    };
    for n in 1..=3usize {
        let space = StateSpace::new((0..n).map(|k| format!("s{k}"))).unwrap();
        let full = space.full_mask() as usize;
        let q = 4i64;
        let inner = full.saturating_sub(1);
        for code in 0..(q as usize + 1).pow(inner as u32) {
            let mut values = vec![0i64; full + 1];
            values[full] = q;
            for m in 1..full {
                values[m] = ((code / (q as usize + 1).pow(m as u32 - 1)) % (q as usize + 1)) as i64;
            }
            let monotone = (0..=full).all(|m| (0..n).all(|k| m & (1 << k) == 0 || values[m & !(1 << k)] <= values[m]));
            if !monotone {
                continue;
            }
            let cap = Capacity::new(&space, values.iter().map(|&x| ratio(x, q)).collect()).unwrap();
            examine(&cap, &space);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 1);
    for _ in 0..2000 {
        let n = rng.gen_range(1..=4);
        let space = StateSpace::new((0..n).map(|k| format!("s{k}"))).unwrap();
        let cap = random_capacity(&mut rng, &space);
        examine(&cap, &space);
    }
    Verdict::new(
        violations.is_empty() && checked > 0,
        format!("{checked} singleton beliefs, {} violations", violations.len()),
    )
}

/// Per example game, restriction, level, player and action: the grid
/// oracle and the LP route agree on witness existence (oracle-found
/// implies LP-found; LP-only cases are re-checked at the escalated bound),
/// and the additive levels equal classical rationalizability.
fn oracle_triangulation() -> Verdict {
    let restrictions = ["any", "add", "conv", "conc", "conv+na", "conc+na"];
    let mut checks = 0usize;
    let mut problems = Vec::new();
    for name in ["ref", "nex", "coarse", "pd"] {
        let g = game(name);
        for r in restrictions {
            let report = solve(&g, r);
            for k in 1..report.levels.len() {
                let previous = &report.levels[k - 1].survivors;
                if previous.any_empty() {
                    continue;
                }
                for i in 0..g.num_players() {
                    let pr = report.restriction.player(i);
                    for a in 0..g.action_count(i) {
                        checks += 1;
                        let lp = report.levels[k].survivors.contains(i, a);
                        let mut grid = grid_oracle(&g, i, a, previous, pr, GRID_BOUND).unwrap().is_some();
                        if lp && !grid {
                            grid = grid_oracle(&g, i, a, previous, pr, ESCALATED_BOUND).unwrap().is_some();
                        }
                        if lp != grid {
                            problems.push(format!("{name} {r} level {k} player {i} action {a}: LP {lp} grid {grid}"));
                        }
                    }
                }
            }
            if r == "add" {
                let classical = classical_rationalizability(&g).unwrap();
                let depth = classical.len().max(report.levels.len());
                if (0..depth).any(|k| classical[k.min(classical.len() - 1)] != *report.level(k)) {
                    problems.push(format!("{name}: classical levels differ"));
                }
            }
        }
    }
    Verdict::new(
        problems.is_empty(),
        format!(
            "{checks} witness checks on 4 games x {} restrictions; {}",
            restrictions.len(),
            if problems.is_empty() { "all agree".into() } else { problems.join("; ") }
        ),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut report = |id: usize, name: &'static str, verdict: Verdict| {
        println!(
            "{} [{id:>2}] {name}: {}",
            if verdict.pass { "PASS" } else { "FAIL" },
            verdict.detail
        );
        results.push((id, name, verdict));
    };

    report(1, "reference game under ambiguity love", reference_game());
    report(2, "non-existence under ambiguity aversion", nonexistence_game());
    report(3, "coarse game refinement", coarse_game());

    let config = CorpusConfig {
        count: CORPUS_GAMES,
        seed: CORPUS_SEED,
        ..CorpusConfig::default()
    };
    let (summary, elapsed) = timed(|| run_corpus(&config).unwrap());
    report(4, "direct and extended routes agree", corpus_properties(&summary, &["routes-agree"], Some(elapsed)));
    report(
        5,
        "concave equals additive within convex",
        corpus_properties(&summary, &["concave-equals-additive"], None),
    );
    report(
        6,
        "nonemptiness, monotone levels, singleton projection",
        corpus_properties(
            &summary,
            &["nonempty-levels", "levels-decrease", "trace-decreases", "singleton-projection"],
            None,
        ),
    );
    report(7, "never best response iff dominated", never_best_response_suite());
    report(8, "belief characterizations", capacity_suite());
    report(9, "singleton belief is a point mass", singleton_belief_suite());
    let mut epistemic = corpus_properties(&summary, &["epistemic-soundness", "witness-space"], None);
    let spaces = summary.property("epistemic-soundness").unwrap().passed;
    if spaces < MIN_TYPE_SPACES {
        epistemic.pass = false;
        epistemic.detail.push_str(&format!(", only {spaces} type spaces"));
    }
    report(10, "epistemic soundness and witness space", epistemic);
    report(11, "oracle triangulation", oracle_triangulation());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("{} of {} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
