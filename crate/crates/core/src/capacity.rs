//! Capacities on finite state spaces.
//!
//! A capacity is a normalized, monotone set function. Subsets of a
//! [`StateSpace`] are encoded as bit patterns ([`Mask`]) over the fixed
//! element order, and a [`Capacity`] stores one exact rational per subset
//! in a dense table indexed by that pattern.
//!
//! Besides the Choquet integral this module provides the predicates used
//! throughout the solver: belief in an event, unambiguity of an event, and
//! the convex/concave/additive shape of a capacity.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::rational::{one, parse_rational, zero, Rational};

/// Bit pattern over the element indices of a [`StateSpace`].
pub type Mask = u32;

/// Largest supported state space. Dense tables have `2^n` entries.
pub const MAX_STATES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapacityError {
    #[error("state space must contain at least one state")]
    EmptySpace,
    #[error("state space has {0} states; at most {MAX_STATES} are supported")]
    TooManyStates(usize),
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("invalid state label `{0}`")]
    InvalidLabel(String),
    #[error("unknown state label `{0}`")]
    UnknownLabel(String),
    #[error("normalization violated: value of empty set is {empty}, value of full set is {full}")]
    NormalizationViolation { empty: Rational, full: Rational },
    #[error("monotonicity violated: {subset} has value {subset_value} > {superset_value} at superset {superset}")]
    MonotonicityViolation {
        smaller: Mask,
        larger: Mask,
        subset: String,
        superset: String,
        subset_value: Rational,
        superset_value: Rational,
    },
    #[error("no value given for subset {0}")]
    MissingSubset(String),
    #[error("subset {0} listed twice")]
    DuplicateSubset(String),
    #[error("operands live on different state spaces")]
    SpaceMismatch,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Ordered finite set of distinct state labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSpace {
    labels: Arc<Vec<String>>,
}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSpace{:?}", self.labels)
    }
}

/// Labels may not contain separators used by the text formats.
pub(crate) fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '{' | '}' | ',' | ':' | '#'))
}

impl StateSpace {
    pub fn new<I, S>(labels: I) -> Result<Self, CapacityError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(CapacityError::EmptySpace);
        }
        if labels.len() > MAX_STATES {
            return Err(CapacityError::TooManyStates(labels.len()));
        }
        for (k, label) in labels.iter().enumerate() {
            if !valid_label(label) {
                return Err(CapacityError::InvalidLabel(label.clone()));
            }
            if labels[..k].contains(label) {
                return Err(CapacityError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self {
            labels: Arc::new(labels),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full_mask(&self) -> Mask {
        ((1u64 << self.len()) - 1) as Mask
    }

    /// Number of subsets, `2^n`.
    pub fn subset_count(&self) -> usize {
        1usize << self.len()
    }

    pub fn same_as(&self, other: &StateSpace) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }

    pub fn event(&self, labels: &[&str]) -> Result<EventSet, CapacityError> {
        let mut mask = 0;
        for label in labels {
            let idx = self
                .index_of(label)
                .ok_or_else(|| CapacityError::UnknownLabel(label.to_string()))?;
            mask |= 1 << idx;
        }
        Ok(EventSet::new(self, mask))
    }

    pub fn event_from_mask(&self, mask: Mask) -> EventSet {
        EventSet::new(self, mask)
    }

    /// Renders a subset as `{a,b}` in element order.
    pub fn format_subset(&self, mask: Mask) -> String {
        let members: Vec<&str> = (0..self.len())
            .filter(|&k| mask & (1 << k) != 0)
            .map(|k| self.labels[k].as_str())
            .collect();
        format!("{{{}}}", members.join(","))
    }

    /// Parses `{a,b}` (whitespace tolerant) into a mask.
    pub fn parse_subset(&self, text: &str) -> Result<Mask, String> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| format!("expected `{{...}}`, found `{}`", text.trim()))?;
        let mut mask = 0;
        for part in inner.split(',') {
            let part = part.trim();
            if part.is_empty() {
                if inner.trim().is_empty() {
                    continue;
                }
                return Err("empty element in subset".to_string());
            }
            let idx = self
                .index_of(part)
                .ok_or_else(|| format!("unknown state `{part}`"))?;
            if mask & (1 << idx) != 0 {
                return Err(format!("state `{part}` repeated"));
            }
            mask |= 1 << idx;
        }
        Ok(mask)
    }
}

/// Iterates over all submasks of `mask`, including `0` and `mask` itself,
/// in increasing numeric order.
pub fn submasks(mask: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(0 as Mask);
    std::iter::from_fn(move || {
        let current = next?;
        next = if current == mask {
            None
        } else {
            Some((current.wrapping_sub(mask)) & mask)
        };
        Some(current)
    })
}

/// A subset of a state space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventSet {
    space: StateSpace,
    mask: Mask,
}

impl EventSet {
    pub fn new(space: &StateSpace, mask: Mask) -> Self {
        Self {
            space: space.clone(),
            mask: mask & space.full_mask(),
        }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn mask(&self) -> Mask {
        self.mask
    }

    pub fn complement(&self) -> EventSet {
        EventSet::new(&self.space, !self.mask)
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.space.format_subset(self.mask))
    }
}

/// An act with utilities already applied: one payoff per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleAct {
    space: StateSpace,
    payoffs: Vec<Rational>,
}

impl SimpleAct {
    pub fn new(space: &StateSpace, payoffs: Vec<Rational>) -> Result<Self, CapacityError> {
        if payoffs.len() != space.len() {
            return Err(CapacityError::SpaceMismatch);
        }
        Ok(Self {
            space: space.clone(),
            payoffs,
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn payoffs(&self) -> &[Rational] {
        &self.payoffs
    }

    pub fn payoff(&self, state: usize) -> &Rational {
        &self.payoffs[state]
    }
}

/// Shape of a capacity with respect to the convexity inequality
/// `v(E) + v(F) <= v(E ∪ F) + v(E ∩ F)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Attitude {
    /// Both convex and concave. On a one-state space this is the only
    /// possible outcome.
    Additive,
    Convex,
    Concave,
    Neither,
}

impl Attitude {
    pub fn is_convex(self) -> bool {
        matches!(self, Attitude::Additive | Attitude::Convex)
    }

    pub fn is_concave(self) -> bool {
        matches!(self, Attitude::Additive | Attitude::Concave)
    }

    pub fn is_additive(self) -> bool {
        self == Attitude::Additive
    }
}

impl fmt::Display for Attitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Attitude::Additive => "additive",
            Attitude::Convex => "convex",
            Attitude::Concave => "concave",
            Attitude::Neither => "neither",
        })
    }
}

/// Evaluates the Choquet integral of `payoffs` against the set function
/// `value`, merging states with equal payoff into one level set.
///
/// `value` is only queried on the cumulative upper level sets, so it may be
/// backed by a partially specified table.
pub(crate) fn choquet_sum<'a, F>(payoffs: &[Rational], mut value: F) -> Rational
where
    F: FnMut(Mask) -> &'a Rational,
{
    let mut levels: Vec<&Rational> = payoffs.iter().collect();
    levels.sort_by(|a, b| b.cmp(a));
    levels.dedup();

    let mut total = zero();
    let mut cumulative: Mask = 0;
    let mut previous = zero();
    for level in levels {
        for (state, payoff) in payoffs.iter().enumerate() {
            if payoff == level {
                cumulative |= 1 << state;
            }
        }
        let current = value(cumulative).clone();
        total += level * (&current - &previous);
        previous = current;
    }
    total
}

/// The cumulative upper level sets of an act, from the highest payoff down.
pub(crate) fn level_chain(payoffs: &[Rational]) -> Vec<Mask> {
    let mut levels: Vec<&Rational> = payoffs.iter().collect();
    levels.sort_by(|a, b| b.cmp(a));
    levels.dedup();
    let mut cumulative = 0;
    levels
        .into_iter()
        .map(|level| {
            for (state, payoff) in payoffs.iter().enumerate() {
                if payoff == level {
                    cumulative |= 1 << state;
                }
            }
            cumulative
        })
        .collect()
}

/// A validated capacity: `v(∅) = 0`, `v(Ω) = 1`, monotone under inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Capacity {
    space: StateSpace,
    values: Vec<Rational>,
}

impl Capacity {
    /// Validates a dense table indexed by subset mask.
    pub fn new(space: &StateSpace, values: Vec<Rational>) -> Result<Self, CapacityError> {
        if values.len() != space.subset_count() {
            let missing = values.len().min(space.subset_count()) as Mask;
            return Err(CapacityError::MissingSubset(space.format_subset(missing)));
        }
        check_monotone(space, &values)?;
        let full = &values[space.full_mask() as usize];
        if !values[0].is_zero() || *full != one() {
            return Err(CapacityError::NormalizationViolation {
                empty: values[0].clone(),
                full: full.clone(),
            });
        }
        Ok(Self {
            space: space.clone(),
            values,
        })
    }

    /// Validates a sparse assignment that must cover every subset.
    pub fn from_map(
        space: &StateSpace,
        values: &BTreeMap<Mask, Rational>,
    ) -> Result<Self, CapacityError> {
        let mut dense = Vec::with_capacity(space.subset_count());
        for mask in 0..space.subset_count() as Mask {
            match values.get(&mask) {
                Some(v) => dense.push(v.clone()),
                None => return Err(CapacityError::MissingSubset(space.format_subset(mask))),
            }
        }
        Self::new(space, dense)
    }

    /// The additive capacity with the given singleton weights.
    pub fn additive(space: &StateSpace, weights: &[Rational]) -> Result<Self, CapacityError> {
        if weights.len() != space.len() {
            return Err(CapacityError::SpaceMismatch);
        }
        let values = (0..space.subset_count() as Mask)
            .map(|mask| {
                (0..space.len())
                    .filter(|&k| mask & (1 << k) != 0)
                    .fold(zero(), |acc, k| acc + &weights[k])
            })
            .collect();
        Self::new(space, values)
    }

    /// The point mass on one state.
    pub fn degenerate(space: &StateSpace, state: usize) -> Self {
        let values = (0..space.subset_count() as Mask)
            .map(|mask| if mask & (1 << state) != 0 { one() } else { zero() })
            .collect();
        Self {
            space: space.clone(),
            values,
        }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn value(&self, mask: Mask) -> &Rational {
        &self.values[(mask & self.space.full_mask()) as usize]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    fn check_space(&self, other: &StateSpace) -> Result<(), CapacityError> {
        if self.space.same_as(other) {
            Ok(())
        } else {
            Err(CapacityError::SpaceMismatch)
        }
    }

    pub fn choquet_integral(&self, act: &SimpleAct) -> Result<Rational, CapacityError> {
        self.check_space(act.space())?;
        Ok(choquet_sum(act.payoffs(), |mask| self.value(mask)))
    }

    /// `v((Ω∖E) ∪ F) = v(F)` for every `F ⊆ E`.
    pub fn is_believed(&self, event: &EventSet) -> Result<bool, CapacityError> {
        self.check_space(event.space())?;
        let outside = self.space.full_mask() & !event.mask();
        Ok(submasks(event.mask()).all(|f| self.value(outside | f) == self.value(f)))
    }

    /// `v(G ∪ F) = v(F)` for every `F` and every `G ⊆ Ω∖E`: the complement
    /// of `E` is null. Equivalent to [`Capacity::is_believed`].
    pub fn complement_is_null(&self, event: &EventSet) -> Result<bool, CapacityError> {
        self.check_space(event.space())?;
        let outside = self.space.full_mask() & !event.mask();
        Ok((0..self.space.subset_count() as Mask).all(|f| {
            submasks(outside).all(|g| self.value(g | f) == self.value(f))
        }))
    }

    /// `v(F) = v(F ∩ E) + v(F ∖ E)` for every `F`.
    pub fn is_unambiguous(&self, event: &EventSet) -> Result<bool, CapacityError> {
        self.check_space(event.space())?;
        let e = event.mask();
        Ok((0..self.space.subset_count() as Mask)
            .all(|f| *self.value(f) == self.value(f & e) + self.value(f & !e)))
    }

    /// `v(S)` equals the sum of its singleton values for every `S`.
    pub fn is_additive(&self) -> bool {
        (0..self.space.subset_count() as Mask).all(|mask| {
            let sum = (0..self.space.len())
                .filter(|&k| mask & (1 << k) != 0)
                .fold(zero(), |acc, k| acc + self.value(1 << k));
            *self.value(mask) == sum
        })
    }

    pub fn classify_attitude(&self) -> Attitude {
        let n = self.space.subset_count() as Mask;
        let mut convex = true;
        let mut concave = true;
        'outer: for e in 0..n {
            for f in (e + 1)..n {
                let lhs = self.value(e) + self.value(f);
                let rhs = self.value(e | f) + self.value(e & f);
                if lhs > rhs {
                    convex = false;
                } else if lhs < rhs {
                    concave = false;
                }
                if !convex && !concave {
                    break 'outer;
                }
            }
        }
        match (convex, concave) {
            (true, true) => Attitude::Additive,
            (true, false) => Attitude::Convex,
            (false, true) => Attitude::Concave,
            (false, false) => Attitude::Neither,
        }
    }

    /// First disjoint pair of nonempty events `(E, F)` (in mask order) with
    /// `v(E) + v(F) != v(E ∪ F)`, or `None` when the capacity is additive.
    pub fn nonadditivity_witness(&self) -> Option<(EventSet, EventSet)> {
        let n = self.space.subset_count() as Mask;
        for e in 1..n {
            for f in (e + 1)..n {
                if e & f != 0 {
                    continue;
                }
                if self.value(e) + self.value(f) != *self.value(e | f) {
                    return Some((
                        self.space.event_from_mask(e),
                        self.space.event_from_mask(f),
                    ));
                }
            }
        }
        None
    }

    /// `v(E) + v(Ω∖E) = 1`. Unambiguous events satisfy this, but not
    /// conversely.
    pub fn is_additive_across(&self, event: &EventSet) -> Result<bool, CapacityError> {
        self.check_space(event.space())?;
        let e = event.mask();
        Ok(self.value(e) + self.value(self.space.full_mask() & !e) == one())
    }

    /// One `{labels}: p/q` line per subset in mask order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (mask, value) in self.values.iter().enumerate() {
            out.push_str(&format!(
                "{}: {}\n",
                self.space.format_subset(mask as Mask),
                value
            ));
        }
        out
    }

    /// Parses the format written by [`Capacity::to_text`]. Blank lines and
    /// `#` comments are ignored; every subset must appear exactly once.
    pub fn parse(space: &StateSpace, text: &str) -> Result<Self, CapacityError> {
        Self::parse_lines(space, text.lines().enumerate().map(|(k, l)| (k + 1, l)))
    }

    pub(crate) fn parse_lines<'a, I>(space: &StateSpace, lines: I) -> Result<Self, CapacityError>
    where
        I: IntoIterator<Item = (usize, &'a str)>,
    {
        let mut values = BTreeMap::new();
        for (line_no, raw) in lines {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| CapacityError::Parse {
                line: line_no,
                message,
            };
            let close = line
                .find('}')
                .ok_or_else(|| parse_err("expected `{...}: value`".into()))?;
            let (subset, rest) = line.split_at(close + 1);
            let value_text = rest
                .trim()
                .strip_prefix(':')
                .ok_or_else(|| parse_err("expected `:` after subset".into()))?;
            let mask = space.parse_subset(subset).map_err(parse_err)?;
            let value = parse_rational(value_text)
                .ok_or_else(|| parse_err(format!("invalid rational `{}`", value_text.trim())))?;
            if values.insert(mask, value).is_some() {
                return Err(CapacityError::DuplicateSubset(space.format_subset(mask)));
            }
        }
        Self::from_map(space, &values)
    }
}

/// Searches capacities on `states` states whose values lie on a grid
/// `k/q` with `q <= bound` for an event the capacity is additive across yet
/// ambiguous. Grids are tried by increasing `q`, capacities in value order
/// with the smallest masks varying fastest, events in mask order.
pub fn find_additive_ambiguous(states: usize, bound: i64) -> Option<(Capacity, EventSet)> {
    let labels: Vec<String> = (0..states).map(|k| format!("s{k}")).collect();
    let space = StateSpace::new(labels).ok()?;
    let full = space.full_mask() as usize;
    for q in 1..=bound {
        let mut values = vec![0i64; full + 1];
        values[full] = q;
        loop {
            let monotone = (1..=full).all(|m| {
                (0..states).all(|k| m & (1 << k) == 0 || values[m & !(1 << k)] <= values[m])
            });
            if monotone {
                let cap = Capacity {
                    space: space.clone(),
                    values: values.iter().map(|&v| Rational::new(v.into(), q.into())).collect(),
                };
                for e in 1..full as Mask {
                    let event = space.event_from_mask(e);
                    if cap.is_additive_across(&event).ok()? && !cap.is_unambiguous(&event).ok()? {
                        return Some((cap, event));
                    }
                }
            }
            // Odometer over the interior masks.
            let mut m = 1;
            while m < full && values[m] == q {
                values[m] = 0;
                m += 1;
            }
            if m >= full {
                break;
            }
            values[m] += 1;
        }
    }
    None
}

fn check_monotone(space: &StateSpace, values: &[Rational]) -> Result<(), CapacityError> {
    // Covering pairs S ⊂ S ∪ {k} suffice by transitivity.
    for smaller in 0..space.subset_count() as Mask {
        for k in 0..space.len() {
            let larger = smaller | (1 << k);
            if larger == smaller {
                continue;
            }
            let (a, b) = (&values[smaller as usize], &values[larger as usize]);
            if a > b {
                return Err(CapacityError::MonotonicityViolation {
                    smaller,
                    larger,
                    subset: space.format_subset(smaller),
                    superset: space.format_subset(larger),
                    subset_value: a.clone(),
                    superset_value: b.clone(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn lr() -> StateSpace {
        StateSpace::new(["l", "r"]).unwrap()
    }

    fn cap(space: &StateSpace, values: &[Rational]) -> Result<Capacity, CapacityError> {
        Capacity::new(space, values.to_vec())
    }

    fn cap1() -> Capacity {
        cap(&lr(), &[zero(), ratio(1, 4), ratio(1, 4), one()]).unwrap()
    }

    fn cap3() -> Capacity {
        cap(&lr(), &[zero(), ratio(1, 2), ratio(1, 2), one()]).unwrap()
    }

    /// On {a,b,c}; masks a=1, b=2, c=4.
    fn cap4() -> Capacity {
        let space = StateSpace::new(["a", "b", "c"]).unwrap();
        cap(
            &space,
            &[
                zero(),
                ratio(1, 2),
                zero(),
                ratio(1, 2),
                zero(),
                ratio(3, 4),
                ratio(1, 4),
                one(),
            ],
        )
        .unwrap()
    }

    /// On {l,r,x}; masks l=1, r=2, x=4.
    fn cap5() -> Capacity {
        let space = StateSpace::new(["l", "r", "x"]).unwrap();
        cap(
            &space,
            &[
                zero(),
                ratio(1, 3),
                ratio(1, 4),
                one(),
                zero(),
                ratio(1, 3),
                ratio(1, 4),
                one(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn space_rejects_bad_labels() {
        assert_eq!(
            StateSpace::new(Vec::<String>::new()),
            Err(CapacityError::EmptySpace)
        );
        assert_eq!(
            StateSpace::new(["a", "a"]),
            Err(CapacityError::DuplicateLabel("a".into()))
        );
        assert!(matches!(
            StateSpace::new(["a b"]),
            Err(CapacityError::InvalidLabel(_))
        ));
    }

    #[test]
    fn submask_enumeration_is_complete() {
        let subs: Vec<Mask> = submasks(0b101).collect();
        assert_eq!(subs, vec![0b000, 0b001, 0b100, 0b101]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(submasks(0b1111).count(), 16);
    }

    #[test]
    fn make_capacity_examples() {
        assert!(cap(&lr(), &[zero(), ratio(1, 4), ratio(1, 4), one()]).is_ok());
        assert!(cap3().is_additive());
        let err = cap(&lr(), &[zero(), ratio(3, 4), ratio(1, 2), ratio(1, 4)]).unwrap_err();
        match err {
            CapacityError::MonotonicityViolation { smaller, larger, .. } => {
                assert_eq!((smaller, larger), (0b01, 0b11));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn make_capacity_normalization_and_missing() {
        assert!(matches!(
            cap(&lr(), &[zero(), ratio(1, 4), ratio(1, 4), ratio(1, 2)]),
            Err(CapacityError::NormalizationViolation { .. })
        ));
        assert!(matches!(
            cap(&lr(), &[int(0), int(0), int(0)]),
            Err(CapacityError::MissingSubset(_))
        ));
        let mut sparse = BTreeMap::new();
        sparse.insert(0, zero());
        sparse.insert(3, one());
        assert_eq!(
            Capacity::from_map(&lr(), &sparse),
            Err(CapacityError::MissingSubset("{l}".into()))
        );
    }

    #[test]
    fn integral_of_constant_act_is_the_constant() {
        for c in [cap1(), cap3()] {
            let act = SimpleAct::new(&lr(), vec![ratio(7, 3), ratio(7, 3)]).unwrap();
            assert_eq!(c.choquet_integral(&act).unwrap(), ratio(7, 3));
        }
    }

    #[test]
    fn integral_examples() {
        let act = SimpleAct::new(&lr(), vec![int(4), int(0)]).unwrap();
        assert_eq!(cap3().choquet_integral(&act).unwrap(), int(2));

        let c = cap4();
        let act = SimpleAct::new(c.space(), vec![int(3), int(1), int(2)]).unwrap();
        // 3·(1/2) + 2·(3/4 − 1/2) + 1·(1 − 3/4)
        assert_eq!(c.choquet_integral(&act).unwrap(), ratio(9, 4));
    }

    #[test]
    fn integral_rejects_foreign_act() {
        let other = StateSpace::new(["x", "y"]).unwrap();
        let act = SimpleAct::new(&other, vec![int(1), int(2)]).unwrap();
        assert_eq!(
            cap1().choquet_integral(&act),
            Err(CapacityError::SpaceMismatch)
        );
    }

    #[test]
    fn belief_examples() {
        let c1 = cap1();
        assert!(c1.is_believed(&c1.space().event(&["l", "r"]).unwrap()).unwrap());
        assert!(!c1.is_believed(&c1.space().event(&["l"]).unwrap()).unwrap());
        let c5 = cap5();
        assert!(c5.is_believed(&c5.space().event(&["l", "r"]).unwrap()).unwrap());
        assert!(!c5.is_believed(&c5.space().event(&["l"]).unwrap()).unwrap());
    }

    #[test]
    fn unambiguity_examples() {
        let c1 = cap1();
        let c3 = cap3();
        assert!(c1.is_unambiguous(&c1.space().event(&[]).unwrap()).unwrap());
        assert!(c3.is_unambiguous(&c3.space().event(&["l"]).unwrap()).unwrap());
        assert!(!c1.is_unambiguous(&c1.space().event(&["l"]).unwrap()).unwrap());
    }

    #[test]
    fn attitude_examples() {
        assert_eq!(cap1().classify_attitude(), Attitude::Convex);
        let loving = cap(&lr(), &[zero(), ratio(3, 4), ratio(3, 4), one()]).unwrap();
        assert_eq!(loving.classify_attitude(), Attitude::Concave);
        assert_eq!(cap3().classify_attitude(), Attitude::Additive);
        assert!(Attitude::Additive.is_convex() && Attitude::Additive.is_concave());
        let single = Capacity::degenerate(&StateSpace::new(["s"]).unwrap(), 0);
        assert_eq!(single.classify_attitude(), Attitude::Additive);
    }

    #[test]
    fn nonadditivity_examples() {
        assert_eq!(cap3().nonadditivity_witness(), None);
        let (e, f) = cap1().nonadditivity_witness().unwrap();
        assert_eq!((e.mask(), f.mask()), (0b01, 0b10));
        let (e, f) = cap4().nonadditivity_witness().unwrap();
        assert_eq!((e.to_string(), f.to_string()), ("{a}".into(), "{c}".into()));
    }

    #[test]
    fn additive_across_an_event_can_still_be_ambiguous() {
        assert!(find_additive_ambiguous(2, 4).is_none());
        let (cap, event) = find_additive_ambiguous(3, 4).expect("an example on three states");
        assert!(cap.is_additive_across(&event).unwrap());
        assert!(!cap.is_unambiguous(&event).unwrap());
        assert!(!cap.is_believed(&event).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let c = cap5();
        let text = c.to_text();
        assert!(text.starts_with("{}: 0\n{l}: 1/3\n"));
        assert_eq!(Capacity::parse(c.space(), &text).unwrap(), c);
    }

    #[test]
    fn parser_rejects_missing_and_duplicate_subsets() {
        let space = lr();
        let missing = "{}: 0\n{l}: 1/4\n{l,r}: 1\n";
        assert_eq!(
            Capacity::parse(&space, missing),
            Err(CapacityError::MissingSubset("{r}".into()))
        );
        let dup = "{}: 0\n{l}: 1/4\n{r}: 1/4\n{r, l}: 1\n{l,r}: 1\n";
        assert_eq!(
            Capacity::parse(&space, dup),
            Err(CapacityError::DuplicateSubset("{l,r}".into()))
        );
        assert!(matches!(
            Capacity::parse(&space, "{q}: 1"),
            Err(CapacityError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn level_chain_merges_ties() {
        let payoffs = [int(2), int(5), int(2)];
        assert_eq!(level_chain(&payoffs), vec![0b010, 0b111]);
    }
}
