//! Finite strategic-form games with exact rational payoffs.
//!
//! Opponent profiles `A_{-i}` are ordered lexicographically by player order
//! and then action order; that order defines the [`StateSpace`] on which
//! player `i`'s capacities live.

use std::fmt;

use thiserror::Error;

use crate::capacity::{valid_label, Capacity, CapacityError, Mask, SimpleAct, StateSpace};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("payoff tensor is ragged: {0}")]
    Arity(String),
    #[error("a game needs at least two players")]
    TooFewPlayers,
    #[error("player `{0}` has no actions")]
    NoActions(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("invalid label `{0}`")]
    InvalidLabel(String),
    #[error("unknown player {0}")]
    UnknownPlayer(String),
    #[error("unknown action {action} for player {player}")]
    UnknownAction { player: String, action: String },
    #[error("player {player} faces {profiles} opponent profiles; the limit is {limit}")]
    TooManyProfiles {
        player: usize,
        profiles: usize,
        limit: usize,
    },
    #[error(transparent)]
    Capacity(#[from] CapacityError),
}

/// A product of per-player action subsets, e.g. a restriction or a profile
/// of survivor sets. Each entry is sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductSet(Vec<Vec<usize>>);

impl ProductSet {
    pub fn new(mut sets: Vec<Vec<usize>>) -> Self {
        for set in &mut sets {
            set.sort_unstable();
            set.dedup();
        }
        Self(sets)
    }

    pub fn full(game: &StrategicGame) -> Self {
        Self(
            (0..game.num_players())
                .map(|i| (0..game.action_count(i)).collect())
                .collect(),
        )
    }

    pub fn empty(players: usize) -> Self {
        Self(vec![Vec::new(); players])
    }

    pub fn player(&self, i: usize) -> &[usize] {
        &self.0[i]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn set_player(&mut self, i: usize, mut actions: Vec<usize>) {
        actions.sort_unstable();
        actions.dedup();
        self.0[i] = actions;
    }

    pub fn contains(&self, i: usize, action: usize) -> bool {
        self.0[i].binary_search(&action).is_ok()
    }

    pub fn is_subset_of(&self, other: &ProductSet) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| a.iter().all(|x| b.binary_search(x).is_ok()))
    }

    pub fn any_empty(&self) -> bool {
        self.0.iter().any(Vec::is_empty)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Renders as `({u,d},{l,r})` using the game's labels.
    pub fn display<'a>(&'a self, game: &'a StrategicGame) -> impl fmt::Display + 'a {
        DisplayProduct { set: self, game }
    }
}

struct DisplayProduct<'a> {
    set: &'a ProductSet,
    game: &'a StrategicGame,
}

impl fmt::Display for DisplayProduct<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, set) in self.set.sets().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&self.game.format_actions(i, set))?;
        }
        f.write_str(")")
    }
}

/// A base-game restriction of player `i`: own actions `Y_i` and the product
/// of opponent action sets `Y_{-i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub player: usize,
    pub sets: ProductSet,
}

impl Restriction {
    pub fn own(&self) -> &[usize] {
        self.sets.player(self.player)
    }
}

/// `⟨I, (A_i), (u_i ∘ o_i)⟩` with payoffs stored per full action profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategicGame {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    /// `payoffs[profile][player]`, profiles in lexicographic order.
    payoffs: Vec<Vec<Rational>>,
    strides: Vec<usize>,
}

impl StrategicGame {
    pub fn new(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        payoffs: Vec<Vec<Rational>>,
    ) -> Result<Self, GameError> {
        if players.len() < 2 {
            return Err(GameError::TooFewPlayers);
        }
        if actions.len() != players.len() {
            return Err(GameError::Arity(format!(
                "{} players but {} action lists",
                players.len(),
                actions.len()
            )));
        }
        check_labels(&players)?;
        for (name, list) in players.iter().zip(&actions) {
            if list.is_empty() {
                return Err(GameError::NoActions(name.clone()));
            }
            check_labels(list)?;
        }
        let profiles: usize = actions.iter().map(Vec::len).product();
        if payoffs.len() != profiles {
            return Err(GameError::Arity(format!(
                "expected {profiles} payoff cells, found {}",
                payoffs.len()
            )));
        }
        if let Some((k, cell)) = payoffs
            .iter()
            .enumerate()
            .find(|(_, cell)| cell.len() != players.len())
        {
            return Err(GameError::Arity(format!(
                "cell {k} has {} payoffs, expected {}",
                cell.len(),
                players.len()
            )));
        }
        let mut strides = vec![1; players.len()];
        for i in (0..players.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * actions[i + 1].len();
        }
        Ok(Self {
            players,
            actions,
            payoffs,
            strides,
        })
    }

    /// Convenience constructor for two-player bimatrix games:
    /// `cells[row][col] = (u_1, u_2)`.
    pub fn bimatrix(
        names: [&str; 2],
        rows: &[&str],
        cols: &[&str],
        cells: &[Vec<(Rational, Rational)>],
    ) -> Result<Self, GameError> {
        let mut payoffs = Vec::new();
        for (r, row) in cells.iter().enumerate() {
            if row.len() != cols.len() {
                return Err(GameError::Arity(format!("row {r} has {} cells", row.len())));
            }
            payoffs.extend(row.iter().map(|(a, b)| vec![a.clone(), b.clone()]));
        }
        Self::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![
                rows.iter().map(|s| s.to_string()).collect(),
                cols.iter().map(|s| s.to_string()).collect(),
            ],
            payoffs,
        )
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn player_name(&self, i: usize) -> &str {
        &self.players[i]
    }

    pub fn player_names(&self) -> &[String] {
        &self.players
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p == name)
    }

    pub fn action_count(&self, i: usize) -> usize {
        self.actions[i].len()
    }

    pub fn action_label(&self, i: usize, a: usize) -> &str {
        &self.actions[i][a]
    }

    pub fn action_labels(&self, i: usize) -> &[String] {
        &self.actions[i]
    }

    pub fn action_index(&self, i: usize, label: &str) -> Result<usize, GameError> {
        self.actions[i]
            .iter()
            .position(|a| a == label)
            .ok_or_else(|| GameError::UnknownAction {
                player: self.players[i].clone(),
                action: label.to_string(),
            })
    }

    /// `{a,b}` in action order.
    pub fn format_actions(&self, i: usize, actions: &[usize]) -> String {
        let labels: Vec<&str> = actions.iter().map(|&a| self.action_label(i, a)).collect();
        format!("{{{}}}", labels.join(","))
    }

    pub fn profile_count(&self) -> usize {
        self.payoffs.len()
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn profile(&self, mut index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let a = index / s;
                index %= s;
                a
            })
            .collect()
    }

    pub fn payoff(&self, i: usize, profile: &[usize]) -> &Rational {
        &self.payoffs[self.profile_index(profile)][i]
    }

    pub fn payoffs(&self) -> &[Vec<Rational>] {
        &self.payoffs
    }

    /// Opponent profiles of player `i` in canonical order; each entry lists
    /// the actions of players `j != i` in player order.
    pub fn opponent_profiles(&self, i: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for j in (0..self.num_players()).filter(|&j| j != i) {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..self.action_count(j)).map(move |a| {
                        let mut p = prefix.clone();
                        p.push(a);
                        p
                    })
                })
                .collect();
        }
        out
    }

    pub fn opponent_profile_count(&self, i: usize) -> usize {
        (0..self.num_players())
            .filter(|&j| j != i)
            .map(|j| self.action_count(j))
            .product()
    }

    /// Full profile from player `i`'s action and an opponent profile.
    pub fn join(&self, i: usize, own: usize, opponents: &[usize]) -> Vec<usize> {
        let mut profile = Vec::with_capacity(self.num_players());
        profile.extend_from_slice(&opponents[..i]);
        profile.push(own);
        profile.extend_from_slice(&opponents[i..]);
        profile
    }

    /// State space `A_{-i}`. Profile labels join action labels with `.`.
    pub fn opponent_space(&self, i: usize) -> Result<StateSpace, GameError> {
        let labels: Vec<String> = self
            .opponent_profiles(i)
            .iter()
            .map(|p| {
                let opponents = (0..self.num_players()).filter(|&j| j != i);
                opponents
                    .zip(p)
                    .map(|(j, &a)| self.action_label(j, a))
                    .collect::<Vec<_>>()
                    .join(".")
            })
            .collect();
        Ok(StateSpace::new(labels)?)
    }

    /// Mask over `A_{-i}` of the opponent profiles inside `sets`.
    pub fn opponent_mask(&self, i: usize, sets: &ProductSet) -> Mask {
        let opponents: Vec<usize> = (0..self.num_players()).filter(|&j| j != i).collect();
        self.opponent_profiles(i)
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                opponents
                    .iter()
                    .zip(p.iter())
                    .all(|(&j, &a)| sets.contains(j, a))
            })
            .fold(0, |mask, (k, _)| mask | (1 << k))
    }

    /// Payoffs of action `a` of player `i` against each opponent profile.
    pub fn act_payoffs(&self, i: usize, a: usize) -> Vec<Rational> {
        self.opponent_profiles(i)
            .iter()
            .map(|opp| self.payoff(i, &self.join(i, a, opp)).clone())
            .collect()
    }

    /// The act `f^{a_i}` over `A_{-i}`.
    pub fn act_of(&self, i: usize, a: usize) -> Result<SimpleAct, GameError> {
        self.check_action(i, a)?;
        let space = self.opponent_space(i)?;
        Ok(SimpleAct::new(&space, self.act_payoffs(i, a))?)
    }

    pub(crate) fn check_player(&self, i: usize) -> Result<(), GameError> {
        if i < self.num_players() {
            Ok(())
        } else {
            Err(GameError::UnknownPlayer(i.to_string()))
        }
    }

    pub(crate) fn check_action(&self, i: usize, a: usize) -> Result<(), GameError> {
        self.check_player(i)?;
        if a < self.action_count(i) {
            Ok(())
        } else {
            Err(GameError::UnknownAction {
                player: self.players[i].clone(),
                action: a.to_string(),
            })
        }
    }

    /// Argmax of the Choquet expected utility over all of `A_i`.
    pub fn choquet_best_responses(&self, i: usize, cap: &Capacity) -> Result<Vec<usize>, GameError> {
        let all: Vec<usize> = (0..self.action_count(i)).collect();
        self.choquet_best_responses_among(i, &all, cap)
    }

    /// Argmax over the given candidate actions only.
    pub fn choquet_best_responses_among(
        &self,
        i: usize,
        candidates: &[usize],
        cap: &Capacity,
    ) -> Result<Vec<usize>, GameError> {
        self.check_player(i)?;
        let space = self.opponent_space(i)?;
        if !cap.space().same_as(&space) {
            return Err(CapacityError::SpaceMismatch.into());
        }
        let mut best: Option<Rational> = None;
        let mut argmax = Vec::new();
        for &a in candidates {
            let act = SimpleAct::new(&space, self.act_payoffs(i, a))?;
            let value = cap.choquet_integral(&act)?;
            match &best {
                Some(b) if value < *b => {}
                Some(b) if value == *b => argmax.push(a),
                _ => {
                    best = Some(value);
                    argmax = vec![a];
                }
            }
        }
        Ok(argmax)
    }

    /// Canonical text form; see [`parse_game`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("players");
        for p in &self.players {
            out.push(' ');
            out.push_str(p);
        }
        out.push('\n');
        for (p, list) in self.players.iter().zip(&self.actions) {
            out.push_str("actions ");
            out.push_str(p);
            for a in list {
                out.push(' ');
                out.push_str(a);
            }
            out.push('\n');
        }
        out.push_str("payoffs\n");
        for (k, cell) in self.payoffs.iter().enumerate() {
            let profile = self.profile(k);
            let labels: Vec<&str> = profile
                .iter()
                .enumerate()
                .map(|(i, &a)| self.action_label(i, a))
                .collect();
            let values: Vec<String> = cell.iter().map(ToString::to_string).collect();
            out.push_str(&format!("{} : {}\n", labels.join(" "), values.join(" ")));
        }
        out
    }
}

fn check_labels(labels: &[String]) -> Result<(), GameError> {
    for (k, label) in labels.iter().enumerate() {
        if !valid_label(label) || label.contains('.') {
            return Err(GameError::InvalidLabel(label.clone()));
        }
        if labels[..k].contains(label) {
            return Err(GameError::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

/// Parses a game file:
///
/// ```text
/// # comment
/// players Rowena Colin
/// actions Rowena u d m
/// actions Colin l r
/// payoffs
/// u l : 4 0
/// u r : 0 4
/// ...
/// ```
///
/// Payoff lines list every full profile in lexicographic order, followed by
/// one rational per player.
pub fn parse_game(text: &str) -> Result<StrategicGame, GameError> {
    let mut players: Option<Vec<String>> = None;
    let mut actions: Vec<Option<Vec<String>>> = Vec::new();
    let mut cells: Vec<(usize, Vec<String>, Vec<Rational>)> = Vec::new();
    let mut in_payoffs = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| GameError::Parse {
            line: line_no,
            message,
        };
        if in_payoffs {
            let (labels, values) = line
                .split_once(':')
                .ok_or_else(|| err("expected `<actions> : <payoffs>`".into()))?;
            let values = values
                .split_whitespace()
                .map(|v| parse_rational(v).ok_or_else(|| err(format!("invalid rational `{v}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let labels = labels.split_whitespace().map(str::to_string).collect();
            cells.push((line_no, labels, values));
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("players") => {
                if players.is_some() {
                    return Err(err("`players` given twice".into()));
                }
                let names: Vec<String> = words.map(str::to_string).collect();
                actions = vec![None; names.len()];
                players = Some(names);
            }
            Some("actions") => {
                let names = players
                    .as_ref()
                    .ok_or_else(|| err("`actions` before `players`".into()))?;
                let who = words.next().ok_or_else(|| err("missing player name".into()))?;
                let i = names
                    .iter()
                    .position(|p| p == who)
                    .ok_or_else(|| err(format!("unknown player `{who}`")))?;
                if actions[i].is_some() {
                    return Err(err(format!("actions for `{who}` given twice")));
                }
                actions[i] = Some(words.map(str::to_string).collect());
            }
            Some("payoffs") => {
                if words.next().is_some() {
                    return Err(err("unexpected text after `payoffs`".into()));
                }
                in_payoffs = true;
            }
            Some(other) => return Err(err(format!("unexpected keyword `{other}`"))),
            None => unreachable!(),
        }
    }

    let players = players.ok_or(GameError::Parse {
        line: 0,
        message: "missing `players` line".into(),
    })?;
    let actions: Vec<Vec<String>> = actions
        .into_iter()
        .zip(&players)
        .map(|(a, p)| {
            a.ok_or_else(|| GameError::Parse {
                line: 0,
                message: format!("missing actions for `{p}`"),
            })
        })
        .collect::<Result<_, _>>()?;
    if !in_payoffs {
        return Err(GameError::Parse {
            line: 0,
            message: "missing `payoffs` section".into(),
        });
    }

    let expected: usize = actions.iter().map(Vec::len).product();
    if cells.len() != expected {
        return Err(GameError::Arity(format!(
            "expected {expected} payoff lines, found {}",
            cells.len()
        )));
    }
    let mut payoffs = Vec::with_capacity(cells.len());
    let shape_only = StrategicGame::new(
        players.clone(),
        actions.clone(),
        vec![vec![Rational::default(); players.len()]; expected],
    )?;
    for (k, (line, labels, values)) in cells.into_iter().enumerate() {
        let profile = shape_only.profile(k);
        let want: Vec<&str> = profile
            .iter()
            .enumerate()
            .map(|(i, &a)| shape_only.action_label(i, a))
            .collect();
        if labels != want {
            return Err(GameError::Parse {
                line,
                message: format!("expected profile `{}`", want.join(" ")),
            });
        }
        if values.len() != players.len() {
            return Err(GameError::Arity(format!(
                "line {line}: {} payoffs for {} players",
                values.len(),
                players.len()
            )));
        }
        payoffs.push(values);
    }
    StrategicGame::new(players, actions, payoffs)
}

pub fn serialize_game(game: &StrategicGame) -> String {
    game.to_text()
}
