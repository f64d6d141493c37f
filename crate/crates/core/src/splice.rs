//! Splices, states and the increasing moves RI+, S+ and the twist move.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::curvemap::{rot, rot_inv, CanonicalKey, CurveMap, DartRef, Pairing};
use crate::error::{Error, Result};

/// Which of the two reconnections to use at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SmoothingChoice {
    /// Respects the traversal orientation (the Seifert splice).
    Oriented,
    Disoriented,
}

/// The three splice types on a knot projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpliceKind {
    Seifert,
    RIminus,
    Sminus,
}

/// Side of the edge on which RI+ places its loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" | "left" => Ok(Side::Left),
            "R" | "r" | "right" => Ok(Side::Right),
            _ => Err(Error::MalformedToken(s.to_string())),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "L",
            Side::Right => "R",
        })
    }
}

/// Which arc receives the twist region's kinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TwistVariant {
    A,
    B,
}

impl FromStr for TwistVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(TwistVariant::A),
            "B" | "b" => Ok(TwistVariant::B),
            _ => Err(Error::MalformedToken(s.to_string())),
        }
    }
}

impl fmt::Display for TwistVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwistVariant::A => "A",
            TwistVariant::B => "B",
        })
    }
}

/// A smoothing choice for every crossing of a fixed projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    base: CanonicalKey,
    choices: BTreeMap<u32, SmoothingChoice>,
}

impl State {
    /// Builds a state; every crossing label of `map` must be assigned exactly once.
    pub fn new(map: &CurveMap, choices: impl IntoIterator<Item = (u32, SmoothingChoice)>) -> Result<Self> {
        let mut m = BTreeMap::new();
        for (label, choice) in choices {
            if m.insert(label, choice).is_some() {
                return Err(Error::StateMismatch(format!("crossing {label} assigned twice")));
            }
        }
        let mut labels: Vec<u32> = map.labels().to_vec();
        labels.sort_unstable();
        if labels.len() != m.len() || labels.iter().zip(m.keys()).any(|(a, b)| a != b) {
            return Err(Error::StateMismatch("state does not cover exactly the crossings".into()));
        }
        Ok(State { base: map.canonical_key(), choices: m })
    }

    pub fn uniform(map: &CurveMap, choice: SmoothingChoice) -> Self {
        State {
            base: map.canonical_key(),
            choices: map.labels().iter().map(|&l| (l, choice)).collect(),
        }
    }

    pub fn get(&self, label: u32) -> Option<SmoothingChoice> {
        self.choices.get(&label).copied()
    }

    pub fn choices(&self) -> &BTreeMap<u32, SmoothingChoice> {
        &self.choices
    }

    pub fn base(&self) -> &CanonicalKey {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}

/// Slot pairing realizing `choice` at crossing index `c`, given the oriented pairings.
fn pairing_of(oriented: &[Pairing], c: usize, choice: SmoothingChoice) -> Pairing {
    match choice {
        SmoothingChoice::Oriented => oriented[c],
        SmoothingChoice::Disoriented => oriented[c].other(),
    }
}

/// Smooths crossing `label`.
///
/// On multi-component maps, Oriented refers to the default orientation of
/// each component (see [`CurveMap::oriented_pairings`]).
pub fn smooth(map: &CurveMap, label: u32, choice: SmoothingChoice) -> Result<CurveMap> {
    let c = map.crossing_index(label)?;
    let oriented = map.oriented_pairings();
    Ok(map.smooth_index(c, pairing_of(&oriented, c, choice)))
}

/// True iff crossing index `c` is the sole corner of some 1-gon.
pub(crate) fn is_kink_index(map: &CurveMap, c: usize) -> bool {
    (0..4).any(|k| {
        let d = 4 * c as u32 + k;
        map.opp(d) == rot_inv(d)
    })
}

/// Type of the splice `(label, choice)` on a knot projection.
pub fn classify(map: &CurveMap, label: u32, choice: SmoothingChoice) -> Result<SpliceKind> {
    let comps = map.components();
    if comps != 1 {
        return Err(Error::MultiComponent(comps));
    }
    let c = map.crossing_index(label)?;
    Ok(match choice {
        SmoothingChoice::Oriented => SpliceKind::Seifert,
        SmoothingChoice::Disoriented if is_kink_index(map, c) => SpliceKind::RIminus,
        SmoothingChoice::Disoriented => SpliceKind::Sminus,
    })
}

/// Number of circles after smoothing every crossing with the given pairings.
pub(crate) fn count_circles(map: &CurveMap, pairings: &[Pairing]) -> usize {
    let nd = map.dart_count();
    let mut seen = vec![false; nd];
    let mut circles = map.free_circles();
    for s in 0..nd as u32 {
        if seen[s as usize] {
            continue;
        }
        circles += 1;
        let mut d = s;
        loop {
            seen[d as usize] = true;
            let o = map.opp(d);
            seen[o as usize] = true;
            let c = o / 4;
            let m = 4 * c + pairings[c as usize].mate(o % 4);
            if m == s {
                break;
            }
            d = m;
        }
    }
    circles
}

/// Circles of the state surface boundary, i.e. |S_sigma|.
pub fn apply_state(map: &CurveMap, state: &State) -> Result<usize> {
    if state.len() != map.crossing_count() {
        return Err(Error::StateMismatch(format!(
            "state has {} crossings, projection has {}",
            state.len(),
            map.crossing_count()
        )));
    }
    let oriented = map.oriented_pairings();
    let mut pairings = Vec::with_capacity(map.crossing_count());
    for (c, &label) in map.labels().iter().enumerate() {
        let choice = state
            .get(label)
            .ok_or_else(|| Error::StateMismatch(format!("crossing {label} not assigned")))?;
        pairings.push(pairing_of(&oriented, c, choice));
    }
    Ok(count_circles(map, &pairings))
}

/// Euler characteristic of a state surface with `circles` boundary circles.
pub fn state_chi(n: usize, circles: usize) -> i64 {
    circles as i64 - n as i64
}

pub fn is_seifert_state(state: &State) -> bool {
    state.choices.values().all(|&c| c == SmoothingChoice::Oriented)
}

/// Genus of the surface from Seifert's algorithm.
pub fn seifert_genus(map: &CurveMap) -> Result<usize> {
    let comps = map.components();
    if comps != 1 {
        return Err(Error::MultiComponent(comps));
    }
    let circles = count_circles(map, &map.oriented_pairings());
    let twice = 1 + map.crossing_count() - circles;
    assert!(twice.is_multiple_of(2), "Seifert circle parity violated");
    Ok(twice / 2)
}

fn new_map_from(labels: Vec<u32>, opp: Vec<u32>, free: u32) -> CurveMap {
    CurveMap::from_parts_unchecked(labels, opp, free)
}

/// Inserts a kink on the edge leaving dart `d`.
///
/// On a crossingless map one free circle becomes the one-crossing kink and `d`
/// is ignored.
pub fn ri_plus(map: &CurveMap, d: DartRef, side: Side) -> Result<CurveMap> {
    let label = map.max_label() + 1;
    if map.crossing_count() == 0 {
        if map.free_circles() == 0 {
            return Err(Error::InvalidDart(d.to_string()));
        }
        let (mut labels, mut opp, free) = map.clone().into_parts();
        let x = CurveMap::push_crossing(&mut labels, &mut opp, label);
        let b = 4 * x;
        let (p, q) = match side {
            Side::Left => ((2, 1), (3, 0)),
            Side::Right => ((2, 3), (1, 0)),
        };
        link(&mut opp, b + p.0, b + p.1);
        link(&mut opp, b + q.0, b + q.1);
        return Ok(new_map_from(labels, opp, free - 1));
    }
    let dart = map.dart(d)?;
    Ok(ri_plus_dart(map, dart, side, label).0)
}

/// RI+ on a dart index; returns the map and the new crossing index.
pub(crate) fn ri_plus_dart(map: &CurveMap, d: u32, side: Side, label: u32) -> (CurveMap, u32) {
    let e = map.opp(d);
    let (mut labels, mut opp, free) = map.clone().into_parts();
    let x = CurveMap::push_crossing(&mut labels, &mut opp, label);
    let b = 4 * x;
    link(&mut opp, d, b);
    match side {
        Side::Left => {
            link(&mut opp, b + 3, e);
            link(&mut opp, b + 2, b + 1);
        }
        Side::Right => {
            link(&mut opp, b + 1, e);
            link(&mut opp, b + 2, b + 3);
        }
    }
    (new_map_from(labels, opp, free), x)
}

#[inline]
fn link(opp: &mut [u32], a: u32, b: u32) {
    opp[a as usize] = b;
    opp[b as usize] = a;
}

/// Joins the edges leaving `d1` and `d2` through a new crossing placed in
/// their common face.
pub fn s_plus(map: &CurveMap, d1: DartRef, d2: DartRef) -> Result<CurveMap> {
    if map.crossing_count() == 0 {
        return Err(Error::DegenerateOnO);
    }
    let a = map.dart(d1)?;
    let b = map.dart(d2)?;
    Ok(s_plus_dart(map, a, b, map.max_label() + 1)?.0)
}

/// S+ on dart indices; returns the map and the new crossing index.
pub(crate) fn s_plus_dart(map: &CurveMap, a: u32, b: u32, label: u32) -> Result<(CurveMap, u32)> {
    let m = s_plus_raw(map, a, b, label)?;
    let comps = m.0.components();
    if comps != 1 {
        return Err(Error::WouldDisconnect(comps));
    }
    Ok(m)
}

/// S+ without the single-component requirement.
pub(crate) fn s_plus_raw(map: &CurveMap, a: u32, b: u32, label: u32) -> Result<(CurveMap, u32)> {
    if a == b || map.opp(a) == b {
        return Err(Error::SameEdge);
    }
    if !same_face(map, a, b) {
        return Err(Error::NotOnCommonFace);
    }
    let (oa, ob) = (map.opp(a), map.opp(b));
    let (mut labels, mut opp, free) = map.clone().into_parts();
    let x = CurveMap::push_crossing(&mut labels, &mut opp, label);
    let c = 4 * x;
    // the corner of the face between the two cut edges lies between slots 3 and 0
    link(&mut opp, a, c);
    link(&mut opp, c + 3, oa);
    link(&mut opp, b, c + 2);
    link(&mut opp, c + 1, ob);
    Ok((new_map_from(labels, opp, free), x))
}

fn same_face(map: &CurveMap, a: u32, b: u32) -> bool {
    let mut d = a;
    loop {
        d = rot(map.opp(d));
        if d == b {
            return true;
        }
        if d == a {
            return false;
        }
    }
}

/// Inserts a twist region of `i` crossings between the edges leaving `d1` and
/// `d2`: `i - 1` kinks stacked on one arc, then S+ to the other arc.
///
/// Variant A stacks the kinks on the arc of `d1`, variant B on the arc of `d2`.
pub fn twist_move(
    map: &CurveMap,
    d1: DartRef,
    d2: DartRef,
    i: usize,
    variant: TwistVariant,
) -> Result<CurveMap> {
    if i < 1 {
        return Err(Error::BadTwistLength);
    }
    if map.crossing_count() == 0 {
        return Err(Error::DegenerateOnO);
    }
    let (a, b) = match variant {
        TwistVariant::A => (map.dart(d1)?, map.dart(d2)?),
        TwistVariant::B => (map.dart(d2)?, map.dart(d1)?),
    };
    let mut cur = map.clone();
    let mut arc = a;
    let mut target = b;
    let mut label = map.max_label() + 1;
    let mut kinks = i - 1;
    if a == b || map.opp(a) == b {
        // both arcs on one edge: the first kink splits it and the S+ lands
        // on the part beyond the kink
        if i < 2 {
            return Err(Error::SameEdge);
        }
        let (m, outer, rest) = first_kink_on_edge(map, a, label);
        cur = m;
        arc = outer;
        target = rest;
        label += 1;
        kinks -= 1;
    } else if !same_face(map, a, b) {
        return Err(Error::NotOnCommonFace);
    }
    for _ in 0..kinks {
        let (m, outer) = kink_toward(&cur, arc, target, label);
        cur = m;
        arc = outer;
        label += 1;
    }
    Ok(s_plus_dart(&cur, arc, target, label)?.0)
}

/// Kink on the edge of `a` with its loop facing the rest of that edge;
/// returns the map, the loop dart and the dart continuing the edge.
fn first_kink_on_edge(map: &CurveMap, a: u32, label: u32) -> (CurveMap, u32, u32) {
    for side in [Side::Left, Side::Right] {
        let (m, x) = ri_plus_dart(map, a, side, label);
        let b = 4 * x;
        let (loop_darts, rest) = match side {
            Side::Left => ([b + 1, b + 2], b + 3),
            Side::Right => ([b + 2, b + 3], b + 1),
        };
        for d in loop_darts {
            if same_face(&m, d, rest) {
                return (m, d, rest);
            }
        }
    }
    unreachable!("the loop of a kink borders the face on its side of the edge")
}

/// Adds a kink on the edge of `arc` whose loop lies in the face of `target`;
/// returns the map and the loop dart facing that face.
fn kink_toward(map: &CurveMap, arc: u32, target: u32, label: u32) -> (CurveMap, u32) {
    for side in [Side::Left, Side::Right] {
        let (m, x) = ri_plus_dart(map, arc, side, label);
        let b = 4 * x;
        let loop_darts = match side {
            Side::Left => [b + 1, b + 2],
            Side::Right => [b + 2, b + 3],
        };
        for d in loop_darts {
            if same_face(&m, d, target) {
                return (m, d);
            }
        }
    }
    unreachable!("a kink on a face edge borders that face on one side")
}

#[cfg(test)]
mod tests {
    use super::*;
    use SmoothingChoice::*;

    fn m(code: &str) -> CurveMap {
        CurveMap::from_code_str(code).unwrap()
    }

    fn trefoil() -> CurveMap {
        m("1+ 2+ 3+ 1+ 2+ 3+")
    }

    fn kink() -> CurveMap {
        m("1+ 1+")
    }

    #[test]
    fn smoothing_trefoil() {
        let t = trefoil();
        for c in 1..=3 {
            let o = smooth(&t, c, Oriented).unwrap();
            assert_eq!(o.crossing_count(), 2);
            assert_eq!(o.components(), 2);
            let d = smooth(&t, c, Disoriented).unwrap();
            assert_eq!(d.components(), 1);
            assert!(d.equivalent(&m("1+ 1+ 2+ 2+")));
        }
    }

    #[test]
    fn smoothing_kink_gives_o() {
        let o = smooth(&kink(), 1, Disoriented).unwrap();
        assert!(o.is_simple_closed_curve());
        let two = smooth(&kink(), 1, Oriented).unwrap();
        assert_eq!(two.free_circles(), 2);
        assert!(matches!(smooth(&kink(), 7, Oriented), Err(Error::UnknownCrossing(7))));
    }

    #[test]
    fn splice_types() {
        assert_eq!(classify(&kink(), 1, Disoriented).unwrap(), SpliceKind::RIminus);
        for c in 1..=3 {
            assert_eq!(classify(&trefoil(), c, Disoriented).unwrap(), SpliceKind::Sminus);
            assert_eq!(classify(&trefoil(), c, Oriented).unwrap(), SpliceKind::Seifert);
        }
        let link = smooth(&trefoil(), 1, Oriented).unwrap();
        assert!(matches!(classify(&link, 2, Oriented), Err(Error::MultiComponent(2))));
    }

    #[test]
    fn states_and_circles() {
        let t = trefoil();
        let seifert = State::uniform(&t, Oriented);
        assert_eq!(apply_state(&t, &seifert).unwrap(), 2);
        assert!(is_seifert_state(&seifert));
        // S- at crossing 1, then RI- at the two kinks; against the original
        // orientation all three splices are disoriented
        let s = State::new(&t, [(1, Disoriented), (2, Disoriented), (3, Disoriented)]).unwrap();
        assert_eq!(apply_state(&t, &s).unwrap(), 3);
        assert!(!is_seifert_state(&s));
        let o = CurveMap::simple_closed_curve();
        let empty = State::uniform(&o, Oriented);
        assert_eq!(apply_state(&o, &empty).unwrap(), 1);
        assert!(is_seifert_state(&empty));
        assert!(State::new(&t, [(1, Oriented)]).is_err());
        assert!(apply_state(&kink(), &s).is_err());
        let mixed = State::new(&t, [(1, Disoriented), (2, Oriented), (3, Oriented)]).unwrap();
        assert_eq!(apply_state(&t, &mixed).unwrap(), 1);
    }

    #[test]
    fn chi_values() {
        assert_eq!(state_chi(3, 2), -1);
        assert_eq!(state_chi(3, 3), 0);
        assert_eq!(state_chi(0, 1), 1);
    }

    #[test]
    fn genus_values() {
        assert_eq!(seifert_genus(&trefoil()).unwrap(), 1);
        assert_eq!(seifert_genus(&CurveMap::simple_closed_curve()).unwrap(), 0);
        assert_eq!(seifert_genus(&kink()).unwrap(), 0);
    }

    #[test]
    fn ri_plus_on_o_and_inverse() {
        let o = CurveMap::simple_closed_curve();
        for side in [Side::Left, Side::Right] {
            let k = ri_plus(&o, DartRef { label: 0, slot: 0 }, side).unwrap();
            assert!(k.equivalent(&kink()));
        }
        let t = trefoil();
        for d in 0..12u32 {
            for side in [Side::Left, Side::Right] {
                let r = ri_plus(&t, t.dart_ref(d), side).unwrap();
                assert_eq!(r.crossing_count(), 4);
                assert_eq!(r.components(), 1);
                assert_eq!(classify(&r, 4, Disoriented).unwrap(), SpliceKind::RIminus);
                assert!(smooth(&r, 4, Disoriented).unwrap().equivalent(&t));
            }
        }
    }

    #[test]
    fn ri_plus_on_kink_gives_two_crossings() {
        let k = kink();
        for d in 0..4 {
            for side in [Side::Left, Side::Right] {
                let r = ri_plus(&k, k.dart_ref(d), side).unwrap();
                assert_eq!(r.crossing_count(), 2);
                assert_eq!(r.components(), 1);
            }
        }
    }

    #[test]
    fn s_plus_inverse_law() {
        let t = trefoil();
        let mut found = 0;
        for a in 0..12u32 {
            for b in 0..12u32 {
                match s_plus(&t, t.dart_ref(a), t.dart_ref(b)) {
                    Ok(r) => {
                        found += 1;
                        assert_eq!(r.components(), 1);
                        assert_eq!(classify(&r, 4, Disoriented).unwrap(), SpliceKind::Sminus);
                        assert!(smooth(&r, 4, Disoriented).unwrap().equivalent(&t));
                    }
                    Err(Error::NotOnCommonFace | Error::SameEdge | Error::WouldDisconnect(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn s_plus_errors() {
        let o = CurveMap::simple_closed_curve();
        let r = DartRef { label: 1, slot: 0 };
        assert!(matches!(s_plus(&o, r, r), Err(Error::DegenerateOnO)));
        let t = trefoil();
        assert!(matches!(s_plus(&t, r, r), Err(Error::SameEdge)));
    }

    #[test]
    fn twist_lengths() {
        let t = trefoil();
        let r = DartRef { label: 1, slot: 0 };
        assert!(matches!(twist_move(&t, r, r, 0, TwistVariant::A), Err(Error::BadTwistLength)));
        let mut hits = 0;
        for a in 0..12u32 {
            for b in 0..12u32 {
                for i in 1..=4 {
                    for v in [TwistVariant::A, TwistVariant::B] {
                        if let Ok(r) = twist_move(&t, t.dart_ref(a), t.dart_ref(b), i, v) {
                            hits += 1;
                            assert_eq!(r.crossing_count(), 3 + i);
                            assert_eq!(r.components(), 1);
                        }
                    }
                }
            }
        }
        assert!(hits > 0);
    }
}
