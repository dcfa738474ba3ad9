//! Seeded random games, capacities and type spaces, and the property
//! suite run over them.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::capacity::{submasks, Attitude, Capacity, EventSet, Mask, SimpleAct, StateSpace};
use crate::extended::{ExtendedGame, ExtendedRestriction, Level};
use crate::game::{ProductSet, StrategicGame};
use crate::rational::{int, Rational};
use crate::solver::{
    best_response_capacity_among, build_polytope, choquet_rationalizable, classical_rationalizability,
    grid_oracle_among, singleton_belief_is_degenerate, verify_fixed_point, AttitudeRestriction,
    PlayerRestriction, Shape, SolveReport, SolverError,
};
use crate::types::{build_witness_space, CapacityTypeSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub count: usize,
    pub min_actions: usize,
    pub max_actions: usize,
    pub payoff_min: i64,
    pub payoff_max: i64,
    pub seed: u64,
    /// Random capacities checked per game.
    pub capacities_per_game: usize,
    /// Random type spaces checked per game.
    pub type_spaces_per_game: usize,
    /// Grid bound for the never-best-response comparison; 0 disables it.
    pub oracle_bound: u32,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            count: 200,
            min_actions: 2,
            max_actions: 3,
            payoff_min: -5,
            payoff_max: 5,
            seed: 42,
            capacities_per_game: 5,
            type_spaces_per_game: 1,
            oracle_bound: 16,
        }
    }
}

/// A two-player game with the given action counts and integer payoffs in
/// `[lo, hi]`.
pub fn random_game<R: Rng>(rng: &mut R, rows: usize, cols: usize, lo: i64, hi: i64) -> StrategicGame {
    let labels = |prefix: char, n: usize| -> Vec<String> { (1..=n).map(|k| format!("{prefix}{k}")).collect() };
    let payoffs = (0..rows * cols)
        .map(|_| vec![int(rng.gen_range(lo..=hi)), int(rng.gen_range(lo..=hi))])
        .collect();
    StrategicGame::new(
        vec!["P1".into(), "P2".into()],
        vec![labels('a', rows), labels('b', cols)],
        payoffs,
    )
    .expect("generated games are well formed")
}

/// Monotone values on the submasks of `top`, with `v(top) = q` and the
/// rest drawn uniformly between the largest lower cover and `q`.
fn monotone_on<R: Rng>(rng: &mut R, n: usize, top: Mask, q: i64) -> Vec<i64> {
    let mut values = vec![0i64; 1 << n];
    for s in submasks(top) {
        if s == 0 {
            continue;
        }
        if s == top {
            values[s as usize] = q;
            continue;
        }
        let lo = (0..n)
            .filter(|k| s & (1 << k) != 0)
            .map(|k| values[(s & !(1 << k)) as usize])
            .max()
            .unwrap_or(0);
        values[s as usize] = rng.gen_range(lo..=q);
    }
    values
}

fn from_scaled(space: &StateSpace, values: &[i64], q: i64) -> Capacity {
    Capacity::new(
        space,
        values.iter().map(|&v| Rational::new(v.into(), q.into())).collect(),
    )
    .expect("generated values are monotone and normalized")
}

/// A random capacity drawn from a mix of families: generic monotone,
/// additive, belief functions (convex), their duals (concave), capacities
/// believing a random event, and point masses.
pub fn random_capacity<R: Rng>(rng: &mut R, space: &StateSpace) -> Capacity {
    let n = space.len();
    let full = space.full_mask();
    let q = rng.gen_range(1..=12i64);
    match rng.gen_range(0..6) {
        0 => from_scaled(space, &monotone_on(rng, n, full, q), q),
        1 => {
            let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
            let total: i64 = weights.iter().sum::<i64>().max(1);
            let mut weights: Vec<Rational> =
                weights.iter().map(|&w| Rational::new(w.into(), total.into())).collect();
            if weights.iter().all(|w| *w == int(0)) {
                weights[0] = int(1);
            }
            Capacity::additive(space, &weights).expect("weights sum to one")
        }
        kind @ (2 | 3) => {
            // Mass function on random focal sets; its belief function is
            // convex and the dual plausibility is concave.
            let mut mass = vec![0i64; 1 << n];
            for _ in 0..rng.gen_range(1..=3) {
                mass[rng.gen_range(1..=full) as usize] += rng.gen_range(1..=3);
            }
            let total: i64 = mass.iter().sum();
            let belief: Vec<i64> = (0..=full)
                .map(|s| submasks(s).map(|b| mass[b as usize]).sum())
                .collect();
            let values: Vec<i64> = if kind == 2 {
                belief
            } else {
                (0..=full).map(|s| total - belief[(full & !s) as usize]).collect()
            };
            from_scaled(space, &values, total)
        }
        4 => {
            let event = rng.gen_range(1..=full);
            let inner = monotone_on(rng, n, event, q);
            let values: Vec<i64> = (0..=full).map(|s| inner[(s & event) as usize]).collect();
            from_scaled(space, &values, q)
        }
        _ => Capacity::degenerate(space, rng.gen_range(0..n)),
    }
}

/// Up to `max_types` types per player with random strategies and
/// capacities.
pub fn random_type_space<R: Rng>(rng: &mut R, game: &StrategicGame, max_types: usize) -> CapacityTypeSpace {
    let players = game.num_players();
    let types: Vec<Vec<String>> = (0..players)
        .map(|i| (1..=rng.gen_range(1..=max_types)).map(|k| format!("t{}_{k}", i + 1)).collect())
        .collect();
    let strategy: Vec<Vec<usize>> = (0..players)
        .map(|i| types[i].iter().map(|_| rng.gen_range(0..game.action_count(i))).collect())
        .collect();
    // Build once to learn each player's opponent type space.
    let placeholder: Vec<Vec<Capacity>> = (0..players)
        .map(|i| {
            let labels = opponent_type_labels(&types, i);
            let space = StateSpace::new(labels).expect("type labels are valid");
            types[i].iter().map(|_| Capacity::degenerate(&space, 0)).collect()
        })
        .collect();
    let skeleton = CapacityTypeSpace::new(game, types.clone(), strategy.clone(), placeholder)
        .expect("generated type spaces are well formed");
    let beliefs = (0..players)
        .map(|i| {
            let space = skeleton.opponent_type_space(i).clone();
            types[i].iter().map(|_| random_capacity(rng, &space)).collect()
        })
        .collect();
    CapacityTypeSpace::new(game, types, strategy, beliefs).expect("generated type spaces are well formed")
}

fn opponent_type_labels(types: &[Vec<String>], i: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for (j, list) in types.iter().enumerate() {
        if j == i {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |t| {
                    if prefix.is_empty() {
                        t.clone()
                    } else {
                        format!("{prefix}.{t}")
                    }
                })
            })
            .collect();
    }
    out
}

/// Pass/fail count of one property over the corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropertyTally {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub first_counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSummary {
    pub config: CorpusConfig,
    pub games: usize,
    pub properties: Vec<PropertyTally>,
}

impl CorpusSummary {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.failed == 0)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyTally> {
        self.properties.iter().find(|p| p.name == name)
    }
}

impl fmt::Display for CorpusSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(
            f,
            "corpus seed {} games {} actions {}..{} payoffs {}..{}",
            c.seed, self.games, c.min_actions, c.max_actions, c.payoff_min, c.payoff_max
        )?;
        for p in &self.properties {
            let verdict = if p.failed == 0 { "pass" } else { "FAIL" };
            writeln!(f, "{verdict} {:<24} passed {:>6} failed {:>4}", p.name, p.passed, p.failed)?;
            if let Some(example) = &p.first_counterexample {
                writeln!(f, "  first counterexample: {example}")?;
            }
        }
        Ok(())
    }
}

/// Property names in report order.
pub const PROPERTIES: &[&str] = &[
    "belief-characterization",
    "null-complement-form",
    "belief-has-value-one",
    "integral-monotone",
    "integral-affine",
    "additive-integral",
    "null-event-irrelevance",
    "attitude-witness",
    "best-response-nonempty",
    "best-response-affine",
    "additive-best-response",
    "routes-agree",
    "concave-equals-additive",
    "nonempty-levels",
    "levels-decrease",
    "trace-decreases",
    "singleton-projection",
    "classical-agrees",
    "restriction-nesting",
    "fixed-point",
    "witness-validity",
    "singleton-belief",
    "never-best-response",
    "epistemic-soundness",
    "belief-operator",
    "witness-space",
];

type Outcome = Result<(), String>;

struct Checks {
    results: Vec<(&'static str, Outcome)>,
}

impl Checks {
    fn record(&mut self, name: &'static str, outcome: Outcome) {
        debug_assert!(PROPERTIES.contains(&name), "unlisted property {name}");
        self.results.push((name, outcome));
    }
}

fn fail_if(cond: bool, message: impl FnOnce() -> String) -> Outcome {
    if cond {
        Err(message())
    } else {
        Ok(())
    }
}

/// Runs every property on `config.count` seeded games. Game `k` uses its
/// own generator seeded from `(seed, k)`, so results do not depend on
/// scheduling.
pub fn run_corpus(config: &CorpusConfig) -> Result<CorpusSummary, SolverError> {
    let per_game: Vec<Result<Vec<(&'static str, Outcome)>, SolverError>> = (0..config.count)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x9e37_79b9).wrapping_add(k as u64));
            let rows = rng.gen_range(config.min_actions..=config.max_actions);
            let cols = rng.gen_range(config.min_actions..=config.max_actions);
            let game = random_game(&mut rng, rows, cols, config.payoff_min, config.payoff_max);
            let mut checks = Checks { results: Vec::new() };
            check_game(&game, &mut rng, config, &mut checks)?;
            Ok(checks
                .results
                .into_iter()
                .map(|(name, outcome)| {
                    (name, outcome.map_err(|e| format!("game {k} ({}): {e}", one_line(&game))))
                })
                .collect())
        })
        .collect();
    let mut properties: Vec<PropertyTally> = PROPERTIES
        .iter()
        .map(|&name| PropertyTally {
            name,
            ..PropertyTally::default()
        })
        .collect();
    for game in per_game {
        for (name, outcome) in game? {
            let tally = properties.iter_mut().find(|p| p.name == name).expect("listed");
            match outcome {
                Ok(()) => tally.passed += 1,
                Err(e) => {
                    tally.failed += 1;
                    tally.first_counterexample.get_or_insert(e);
                }
            }
        }
    }
    Ok(CorpusSummary {
        config: config.clone(),
        games: config.count,
        properties,
    })
}

fn one_line(game: &StrategicGame) -> String {
    let rows: Vec<String> = game
        .payoffs()
        .iter()
        .map(|p| p.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
        .collect();
    format!(
        "{}x{} [{}]",
        game.action_count(0),
        game.action_count(1),
        rows.join(" ")
    )
}

fn check_game(
    game: &StrategicGame,
    rng: &mut ChaCha8Rng,
    config: &CorpusConfig,
    checks: &mut Checks,
) -> Result<(), SolverError> {
    for i in 0..game.num_players() {
        let space = game.opponent_space(i)?;
        for _ in 0..config.capacities_per_game {
            let cap = random_capacity(rng, &space);
            check_capacity(&cap, rng, checks);
            check_best_responses(game, i, &cap, rng, checks)?;
        }
    }

    let n = game.num_players();
    let solve = |r: Shape| choquet_rationalizable(game, &AttitudeRestriction::uniform(n, PlayerRestriction::shape(r)));
    let any = solve(Shape::Unrestricted)?;
    let add = solve(Shape::Additive)?;
    let conv = solve(Shape::Convex)?;
    let conc = solve(Shape::Concave)?;

    let ext = ExtendedGame::build(game).map_err(|e| SolverError::Internal(e.to_string()))?;
    let trace = ext.iesda().map_err(|e| SolverError::Internal(e.to_string()))?;
    let depth = any.fixed_point_index.max(trace.fixed_point_index) + 1;
    let mut routes = Ok(());
    let mut singleton = Ok(());
    for k in 0..=depth {
        let projection = trace
            .project_to_actions(Level::At(k.min(trace.levels.len() - 1)))
            .map_err(|e| SolverError::Internal(e.to_string()))?;
        if routes.is_ok() && projection.actions != *any.level(k) {
            routes = Err(format!(
                "level {k}: direct {:?} vs extended {:?}",
                any.level(k),
                projection.actions
            ));
        }
        if singleton.is_ok() && !projection.singleton_mismatches.is_empty() {
            singleton = Err(format!("level {k}: players {:?}", projection.singleton_mismatches));
        }
    }
    checks.record("routes-agree", routes);
    checks.record("singleton-projection", singleton);
    checks.record(
        "trace-decreases",
        fail_if(!trace.is_monotone(), || "extended levels grow".into()),
    );

    checks.record(
        "concave-equals-additive",
        fail_if(
            conc.limit() != add.limit() || !add.limit().is_subset_of(conv.limit()),
            || format!("conc {:?} add {:?} conv {:?}", conc.limit(), add.limit(), conv.limit()),
        ),
    );
    checks.record(
        "nonempty-levels",
        fail_if(
            any.levels.iter().any(|l| l.survivors.any_empty()),
            || "an unrestricted level is empty".into(),
        ),
    );
    checks.record(
        "levels-decrease",
        fail_if(
            ![&any, &add, &conv, &conc].iter().all(|r| r.is_monotone()),
            || "some level grows".into(),
        ),
    );
    let nesting_depth = [&add, &conv, &conc]
        .iter()
        .map(|r| r.fixed_point_index + 1)
        .max()
        .unwrap_or(1);
    checks.record(
        "restriction-nesting",
        fail_if(
            (0..=nesting_depth).any(|k| {
                !add.level(k).is_subset_of(conv.level(k)) || !add.level(k).is_subset_of(conc.level(k))
            }),
            || "additive survivors escape a shape restriction".into(),
        ),
    );
    let classical = classical_rationalizability(game)?;
    checks.record(
        "classical-agrees",
        fail_if(
            classical.iter().enumerate().any(|(k, l)| l != add.level(k)),
            || format!("classical {:?}", classical),
        ),
    );
    let fixed = verify_fixed_point(game, any.limit())?;
    checks.record(
        "fixed-point",
        fail_if(!fixed.holds(), || format!("{fixed:?}")),
    );
    for report in [&any, &add, &conv, &conc] {
        checks.record("witness-validity", witness_validity(game, report)?);
    }
    checks.record("singleton-belief", singleton_belief(game, &any));

    if config.oracle_bound > 0 {
        for i in 0..n {
            if game.opponent_profile_count(i) <= 2 {
                checks.record("never-best-response", never_best_response(game, i, &ext, config.oracle_bound)?);
            }
        }
    }

    for _ in 0..config.type_spaces_per_game {
        let space = random_type_space(rng, game, 2);
        let report = space
            .bkcr_fixpoint()
            .map_err(|e| SolverError::Internal(e.to_string()))?;
        let violations = report.soundness_violations(&any);
        checks.record(
            "epistemic-soundness",
            fail_if(!violations.is_empty() || !report.is_monotone(), || {
                format!("levels {violations:?} in\n{}", space.to_text())
            }),
        );
        checks.record("belief-operator", belief_operator(&space));
    }
    let witness = build_witness_space(game, &any).map_err(|e| SolverError::Internal(e.to_string()))?;
    let epistemic = witness
        .bkcr_fixpoint()
        .map_err(|e| SolverError::Internal(e.to_string()))?;
    checks.record(
        "witness-space",
        fail_if(epistemic.cbcr_projection() != any.limit(), || {
            format!("s(CBCR) {:?} vs limit {:?}", epistemic.cbcr_projection(), any.limit())
        }),
    );
    Ok(())
}

fn random_act<R: Rng>(rng: &mut R, space: &StateSpace) -> SimpleAct {
    let payoffs = (0..space.len()).map(|_| int(rng.gen_range(-3..=3))).collect();
    SimpleAct::new(space, payoffs).expect("arity matches")
}

fn check_capacity(cap: &Capacity, rng: &mut ChaCha8Rng, checks: &mut Checks) {
    let space = cap.space();
    let full = space.full_mask();
    let mut characterization = Ok(());
    let mut complement_form = Ok(());
    let mut value_one = Ok(());
    for e in 0..=full {
        let event = EventSet::new(space, e);
        let comp = event.complement();
        let believed = cap.is_believed(&event).expect("same space");
        let unambiguous = cap.is_unambiguous(&event).expect("same space") && *cap.value(e) == int(1);
        let complement_null = cap.is_unambiguous(&comp).expect("same space") && *cap.value(comp.mask()) == int(0);
        if characterization.is_ok() && !(believed == unambiguous && unambiguous == complement_null) {
            characterization = Err(format!("event {event}: {believed} {unambiguous} {complement_null}\n{}", cap.to_text()));
        }
        if complement_form.is_ok() && believed != cap.complement_is_null(&event).expect("same space") {
            complement_form = Err(format!("event {event}\n{}", cap.to_text()));
        }
        if value_one.is_ok() && believed && *cap.value(e) != int(1) {
            value_one = Err(format!("event {event}\n{}", cap.to_text()));
        }
    }
    checks.record("belief-characterization", characterization);
    checks.record("null-complement-form", complement_form);
    checks.record("belief-has-value-one", value_one);

    let f = random_act(rng, space);
    let bump: Vec<Rational> = f
        .payoffs()
        .iter()
        .map(|x| x + int(rng.gen_range(0..=2)))
        .collect();
    let g = SimpleAct::new(space, bump).expect("arity");
    let (fi, gi) = (
        cap.choquet_integral(&f).expect("same space"),
        cap.choquet_integral(&g).expect("same space"),
    );
    checks.record("integral-monotone", fail_if(gi < fi, || format!("{fi} > {gi}")));

    let alpha = Rational::new(rng.gen_range(1..=5).into(), rng.gen_range(1..=3).into());
    let shift = int(rng.gen_range(-4..=4));
    let scaled = SimpleAct::new(
        space,
        f.payoffs().iter().map(|x| &alpha * x + &shift).collect(),
    )
    .expect("arity");
    let si = cap.choquet_integral(&scaled).expect("same space");
    checks.record(
        "integral-affine",
        fail_if(si != &alpha * &fi + &shift, || format!("{si} vs {alpha}*{fi}+{shift}")),
    );

    if cap.is_additive() {
        let dot = f
            .payoffs()
            .iter()
            .enumerate()
            .fold(int(0), |acc, (k, x)| acc + x * cap.value(1 << k));
        checks.record("additive-integral", fail_if(dot != fi, || format!("{dot} vs {fi}")));
    }

    for e in 1..=full {
        let event = EventSet::new(space, e);
        if !cap.is_believed(&event).expect("same space") || e == full {
            continue;
        }
        let changed: Vec<Rational> = f
            .payoffs()
            .iter()
            .enumerate()
            .map(|(k, x)| if e & (1 << k) == 0 { x + int(rng.gen_range(-5..=5)) } else { x.clone() })
            .collect();
        let h = SimpleAct::new(space, changed).expect("arity");
        let hi = cap.choquet_integral(&h).expect("same space");
        checks.record(
            "null-event-irrelevance",
            fail_if(hi != fi, || format!("event {event}: {hi} vs {fi}\n{}", cap.to_text())),
        );
    }

    let additive = cap.classify_attitude() == Attitude::Additive;
    let witness = cap.nonadditivity_witness();
    checks.record(
        "attitude-witness",
        fail_if(additive == witness.is_some() || additive != cap.is_additive(), || cap.to_text()),
    );
}

fn check_best_responses(
    game: &StrategicGame,
    i: usize,
    cap: &Capacity,
    rng: &mut ChaCha8Rng,
    checks: &mut Checks,
) -> Result<(), SolverError> {
    let best = game.choquet_best_responses(i, cap)?;
    checks.record("best-response-nonempty", fail_if(best.is_empty(), || cap.to_text()));

    let alpha = int(rng.gen_range(1..=4));
    let shift = int(rng.gen_range(-3..=3));
    let payoffs = game
        .payoffs()
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p[i] = &alpha * &p[i] + &shift;
            p
        })
        .collect();
    let transformed = StrategicGame::new(
        game.player_names().to_vec(),
        (0..game.num_players()).map(|j| game.action_labels(j).to_vec()).collect(),
        payoffs,
    )?;
    let moved = transformed.choquet_best_responses(i, cap)?;
    checks.record("best-response-affine", fail_if(moved != best, || format!("{best:?} vs {moved:?}")));

    if cap.is_additive() {
        let expected: Vec<Rational> = (0..game.action_count(i))
            .map(|a| {
                game.act_payoffs(i, a)
                    .iter()
                    .enumerate()
                    .fold(int(0), |acc, (k, x)| acc + x * cap.value(1 << k))
            })
            .collect();
        let top = expected.iter().max().expect("actions exist");
        let eu: Vec<usize> = (0..expected.len()).filter(|&a| expected[a] == *top).collect();
        checks.record("additive-best-response", fail_if(eu != best, || format!("{eu:?} vs {best:?}")));
    }
    Ok(())
}

fn witness_validity(game: &StrategicGame, report: &SolveReport) -> Result<Outcome, SolverError> {
    for k in 1..report.levels.len() {
        let previous = &report.levels[k - 1].survivors;
        for i in 0..game.num_players() {
            let witnesses = &report.levels[k].witnesses[i];
            if witnesses.is_empty() {
                continue;
            }
            let poly = build_polytope(game, i, report.restriction.player(i), previous)?;
            for (a, cap) in witnesses {
                let best = game.choquet_best_responses(i, cap)?;
                if !poly.contains(cap) || !best.contains(a) {
                    return Ok(Err(format!(
                        "{} level {k} player {i} action {a}\n{}",
                        report.restriction,
                        cap.to_text()
                    )));
                }
            }
        }
    }
    Ok(Ok(()))
}

fn singleton_belief(game: &StrategicGame, report: &SolveReport) -> Outcome {
    for k in 1..report.levels.len() {
        let previous = &report.levels[k - 1].survivors;
        for i in 0..game.num_players() {
            let mask = game.opponent_mask(i, previous);
            if mask.count_ones() != 1 {
                continue;
            }
            let state = mask.trailing_zeros() as usize;
            for (a, cap) in &report.levels[k].witnesses[i] {
                if !singleton_belief_is_degenerate(cap, state) || cap.classify_attitude() != Attitude::Additive {
                    return Err(format!("level {k} player {i} action {a}\n{}", cap.to_text()));
                }
            }
        }
    }
    Ok(())
}

/// Never-best-response on every base restriction (grid oracle, escalating
/// the bound to 64 on disagreement) against dominance of the singleton in
/// the associated extended restriction.
fn never_best_response(
    game: &StrategicGame,
    i: usize,
    ext: &ExtendedGame,
    bound: u32,
) -> Result<Outcome, SolverError> {
    let j = 1 - i;
    let own_sets = 1u32..(1 << game.action_count(i));
    for own in own_sets {
        for other in 1u32..(1 << game.action_count(j)) {
            let members = |m: u32| (0..32).filter(|k| m & (1 << k) != 0).collect::<Vec<usize>>();
            let mut sets = vec![Vec::new(); 2];
            sets[i] = members(own);
            sets[j] = members(other);
            let base = ProductSet::new(sets);
            let extended = ExtendedRestriction::from_base(&base);
            for &a in base.player(i) {
                let rivals = base.player(i);
                let mut found =
                    grid_oracle_among(game, i, a, rivals, &base, PlayerRestriction::UNRESTRICTED, bound)?.is_some();
                let dominated = ext
                    .is_strictly_dominated(i, 1 << a, &extended)
                    .map_err(|e| SolverError::Internal(e.to_string()))?
                    .is_some();
                if !found && !dominated {
                    found = grid_oracle_among(game, i, a, rivals, &base, PlayerRestriction::UNRESTRICTED, 64)?
                        .is_some();
                }
                if found == dominated {
                    let lp = build_polytope(game, i, PlayerRestriction::UNRESTRICTED, &base)
                        .and_then(|poly| best_response_capacity_among(game, i, a, rivals, &poly))?;
                    return Ok(Err(format!(
                        "player {i} action {a} on {base:?}: grid witness {found}, dominated {dominated}, LP witness {}",
                        lp.is_some()
                    )));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// Necessitation, monotonicity and conjunction of the type-level belief
/// operator on every type and every pair of events.
fn belief_operator(space: &CapacityTypeSpace) -> Outcome {
    for i in 0..space.game().num_players() {
        let full = space.opponent_type_space(i).full_mask();
        for t in 0..space.type_count(i) {
            let believes = |e: Mask| space.type_believes(i, t, e).expect("known type");
            if !believes(full) {
                return Err(format!("type {t} of player {i} fails necessitation"));
            }
            let believed: Vec<bool> = (0..=full).map(believes).collect();
            for e in 0..=full {
                for f in 0..=full {
                    let (be, bf) = (believed[e as usize], believed[f as usize]);
                    if be && e & f == e && !bf {
                        return Err(format!("type {t} of player {i}: monotonicity {e:#b} {f:#b}"));
                    }
                    if be && bf && !believed[(e & f) as usize] {
                        return Err(format!("type {t} of player {i}: conjunction {e:#b} {f:#b}"));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_capacities_are_valid_and_varied() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let space = StateSpace::new(["x", "y", "z"]).unwrap();
        let mut additive = 0;
        let mut other = 0;
        for _ in 0..200 {
            let cap = random_capacity(&mut rng, &space);
            assert_eq!(*cap.value(space.full_mask()), int(1));
            if cap.is_additive() {
                additive += 1;
            } else {
                other += 1;
            }
        }
        assert!(additive > 0 && other > 0);
    }

    #[test]
    fn small_corpus_passes() {
        let config = CorpusConfig {
            count: 6,
            ..CorpusConfig::default()
        };
        let summary = run_corpus(&config).unwrap();
        assert!(summary.all_passed(), "{summary}");
        assert!(summary.property("routes-agree").unwrap().passed > 0);
    }
}
