use super::*;
use crate::game::parse_game;
use crate::rational::{int, ratio, zero};
use crate::solver::{choquet_rationalizable, AttitudeRestriction};

fn pd() -> StrategicGame {
    parse_game(include_str!("../../../../games/pd.game")).unwrap()
}

fn reference() -> StrategicGame {
    parse_game(include_str!("../../../../games/ref.game")).unwrap()
}

/// One type per player, each a point mass on the other.
fn single_type_pd(first: usize) -> CapacityTypeSpace {
    let game = pd();
    let types = vec![vec!["a".to_string()], vec!["b".to_string()]];
    let s0 = StateSpace::new(["b"]).unwrap();
    let s1 = StateSpace::new(["a"]).unwrap();
    CapacityTypeSpace::new(
        &game,
        types,
        vec![vec![first], vec![1]],
        vec![vec![Capacity::degenerate(&s0, 0)], vec![Capacity::degenerate(&s1, 0)]],
    )
    .unwrap()
}

/// Rowena types r1 r2; Colin types c1 c2 c3 with a CAP5-style capacity.
fn three_profile_space() -> CapacityTypeSpace {
    let game = reference();
    let colin = StateSpace::new(["c1", "c2", "c3"]).unwrap();
    let rowena = StateSpace::new(["r1", "r2"]).unwrap();
    let third = ratio(1, 3);
    let quarter = ratio(1, 4);
    // Masks: c1=1, c2=2, c3=4.
    let cap5 = Capacity::new(
        &colin,
        vec![
            zero(),
            third.clone(),
            quarter.clone(),
            int(1),
            zero(),
            third,
            quarter,
            int(1),
        ],
    )
    .unwrap();
    let uniform = Capacity::additive(&rowena, &[ratio(1, 2), ratio(1, 2)]).unwrap();
    CapacityTypeSpace::new(
        &game,
        vec![
            vec!["r1".into(), "r2".into()],
            vec!["c1".into(), "c2".into(), "c3".into()],
        ],
        vec![vec![0, 2], vec![0, 1, 1]],
        vec![
            vec![cap5.clone(), Capacity::degenerate(&colin, 2)],
            vec![uniform.clone(), uniform.clone(), Capacity::degenerate(&rowena, 1)],
        ],
    )
    .unwrap()
}

#[test]
fn necessitation_and_degenerate_beliefs() {
    let space = three_profile_space();
    for t in 0..2 {
        assert!(space.type_believes(0, t, 0b111).unwrap());
    }
    // The point mass on c3 believes exactly the events containing c3.
    for event in 0..8u32 {
        assert_eq!(space.type_believes(0, 1, event).unwrap(), event & 0b100 != 0);
    }
    assert!(space.type_believes(0, 0, 0b011).unwrap());
    assert!(!space.type_believes(0, 0, 0b001).unwrap());
    assert!(matches!(
        space.type_believes(0, 5, 0b1),
        Err(TypeSpaceError::UnknownType(_))
    ));
}

#[test]
fn conjecture_merges_preimages() {
    let space = three_profile_space();
    // c2 and c3 both play r: v({r}) = τ({c2,c3}) = 1/4.
    let conj = space.conjecture(0, 0).unwrap();
    assert_eq!(conj.values(), &[zero(), ratio(1, 3), ratio(1, 4), int(1)][..]);
    let point = space.conjecture(0, 1).unwrap();
    assert_eq!(point, Capacity::degenerate(point.space(), 1));
}

#[test]
fn pd_rational_space_is_common_belief() {
    let space = single_type_pd(1);
    let report = space.bkcr_fixpoint().unwrap();
    assert_eq!(report.cbcr(), &[vec![0], vec![0]][..]);
    assert_eq!(report.cbcr_projection(), &ProductSet::new(vec![vec![1], vec![1]]));
    let solve = choquet_rationalizable(&pd(), &AttitudeRestriction::unrestricted(2)).unwrap();
    assert!(report.soundness_violations(&solve).is_empty());
}

#[test]
fn pd_cooperating_type_breaks_the_chain() {
    let report = single_type_pd(0).bkcr_fixpoint().unwrap();
    assert_eq!(report.level(1), &[vec![], vec![0]][..]);
    assert_eq!(report.level(2), &[vec![], vec![]][..]);
    assert!(report.cbcr().iter().all(Vec::is_empty));
    assert!(report.is_monotone());
}

#[test]
fn witness_space_for_reference_game() {
    let game = reference();
    let solve = choquet_rationalizable(&game, &AttitudeRestriction::unrestricted(2)).unwrap();
    let space = build_witness_space(&game, &solve).unwrap();
    assert_eq!(space.type_count(0), 3);
    assert_eq!(space.type_count(1), 2);
    let report = space.bkcr_fixpoint().unwrap();
    assert_eq!(report.cbcr(), &[vec![0, 1, 2], vec![0, 1]][..]);
    assert_eq!(report.cbcr_projection(), solve.limit());
}

#[test]
fn text_round_trip() {
    let space = three_profile_space();
    let text = space.to_text();
    assert!(text.starts_with("types Rowena r1 r2\ntypes Colin c1 c2 c3\nr1 -> u\n"));
    let parsed = parse_type_space(space.game(), &text).unwrap();
    assert_eq!(parsed.to_text(), text);
}

#[test]
fn parse_errors() {
    let game = pd();
    let missing = "types P1 a\ntypes P2 b\na -> D\nb -> D\ncapacity a\n{}: 0\n{b}: 1\nend\n";
    assert_eq!(
        parse_type_space(&game, missing).unwrap_err(),
        TypeSpaceError::MissingCapacity("b".into())
    );
    let open = "types P1 a\ntypes P2 b\na -> D\ncapacity a\n{}: 0\n";
    assert!(matches!(
        parse_type_space(&game, open),
        Err(TypeSpaceError::Parse { line: 4, .. })
    ));
    let bad_value = "types P1 a\ntypes P2 b\na -> D\nb -> D\ncapacity a\n{}: 0\n{b}: x\nend\n";
    assert!(matches!(
        parse_type_space(&game, bad_value),
        Err(TypeSpaceError::Parse { line: 7, .. })
    ));
    let bad_action = "types P1 a\ntypes P2 b\na -> Z\n";
    assert!(matches!(
        parse_type_space(&game, bad_action),
        Err(TypeSpaceError::Parse { line: 3, .. })
    ));
}
