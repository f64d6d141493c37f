//! Descent search for u-minus, bounded search for u, witnesses.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::curvemap::{CanonicalKey, CurveMap, DartRef, Pairing};
use crate::error::{Error, Result};
use crate::splice::{
    classify, is_kink_index, ri_plus, s_plus, smooth, twist_move, Side, SmoothingChoice,
    SpliceKind, TwistVariant,
};

/// One line of a witness script.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Sminus(u32),
    RIminus(u32),
    Seifert(u32),
    RIplus(DartRef, Side),
    Splus(DartRef, DartRef),
    Twist(DartRef, DartRef, usize, TwistVariant),
}

impl Step {
    /// Number of S+/S- operations the step stands for.
    pub fn s_cost(&self) -> usize {
        match self {
            Step::Sminus(_) | Step::Splus(..) | Step::Twist(..) => 1,
            _ => 0,
        }
    }

    /// Number of RI+/RI- operations the step stands for.
    pub fn ri_cost(&self) -> usize {
        match self {
            Step::RIminus(_) | Step::RIplus(..) => 1,
            Step::Twist(_, _, i, _) => i - 1,
            _ => 0,
        }
    }

    /// Applies the step, checking that it is the move it claims to be.
    pub fn apply(&self, map: &CurveMap) -> Result<CurveMap> {
        match *self {
            Step::Sminus(l) => {
                if classify(map, l, SmoothingChoice::Disoriented)? != SpliceKind::Sminus {
                    return Err(Error::BadWitness(format!("crossing {l} is a kink, not an S- site")));
                }
                smooth(map, l, SmoothingChoice::Disoriented)
            }
            Step::RIminus(l) => {
                if classify(map, l, SmoothingChoice::Disoriented)? != SpliceKind::RIminus {
                    return Err(Error::BadWitness(format!("crossing {l} is not a kink")));
                }
                smooth(map, l, SmoothingChoice::Disoriented)
            }
            Step::Seifert(l) => {
                classify(map, l, SmoothingChoice::Oriented)?;
                smooth(map, l, SmoothingChoice::Oriented)
            }
            Step::RIplus(d, side) => ri_plus(map, d, side),
            Step::Splus(a, b) => s_plus(map, a, b),
            Step::Twist(a, b, i, v) => twist_move(map, a, b, i, v),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Sminus(l) => write!(f, "S- {l}"),
            Step::RIminus(l) => write!(f, "RI- {l}"),
            Step::Seifert(l) => write!(f, "Seifert {l}"),
            Step::RIplus(d, s) => write!(f, "RI+ {d} {s}"),
            Step::Splus(a, b) => write!(f, "S+ {a} {b}"),
            Step::Twist(a, b, i, v) => write!(f, "TWIST {a} {b} {i} {v}"),
        }
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::BadWitness(format!("cannot parse step `{s}`"));
        let label = |t: &str| t.parse::<u32>().map_err(|_| bad());
        match toks.as_slice() {
            ["S-", l] => Ok(Step::Sminus(label(l)?)),
            ["RI-", l] => Ok(Step::RIminus(label(l)?)),
            ["Seifert", l] => Ok(Step::Seifert(label(l)?)),
            ["RI+", d, side] => Ok(Step::RIplus(d.parse()?, side.parse()?)),
            ["S+", a, b] => Ok(Step::Splus(a.parse()?, b.parse()?)),
            ["TWIST", a, b, i, v] => {
                let i = i.parse::<usize>().map_err(|_| bad())?;
                Ok(Step::Twist(a.parse()?, b.parse()?, i, v.parse()?))
            }
            _ => Err(bad()),
        }
    }
}

/// A sequence of moves from a base projection, expected to end at `O`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Canonical key (hex) or a table name.
    pub base: String,
    pub steps: Vec<Step>,
    pub s_count: usize,
    pub ri_count: usize,
}

impl Witness {
    pub fn new(base: impl Into<String>, steps: Vec<Step>) -> Self {
        let s_count = steps.iter().map(Step::s_cost).sum();
        let ri_count = steps.iter().map(Step::ri_cost).sum();
        Witness { base: base.into(), steps, s_count, ri_count }
    }

    /// True iff only S- and RI- steps occur.
    pub fn is_pure_descent(&self) -> bool {
        self.steps
            .iter()
            .all(|s| matches!(s, Step::Sminus(_) | Step::RIminus(_)))
    }

    /// Parses a witness file: `BASE <key or name>` then one step per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut base = None;
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if base.is_none() {
                let rest = line.strip_prefix("BASE").ok_or_else(|| Error::Record {
                    line: i + 1,
                    msg: "expected `BASE <key or name>`".into(),
                })?;
                let rest = rest.trim();
                if rest.is_empty() {
                    return Err(Error::Record { line: i + 1, msg: "empty BASE".into() });
                }
                base = Some(rest.to_string());
                continue;
            }
            let step = line
                .parse::<Step>()
                .map_err(|e| Error::Record { line: i + 1, msg: e.to_string() })?;
            steps.push(step);
        }
        let base = base.ok_or_else(|| Error::BadWitness("missing BASE line".into()))?;
        Ok(Witness::new(base, steps))
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BASE {}", self.base)?;
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Outcome of replaying a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCheck {
    pub valid: bool,
    /// Index of the first illegal step, if any.
    pub failed_step: Option<usize>,
    pub reason: Option<String>,
    pub s_count: usize,
    pub ri_count: usize,
    pub endpoint: CanonicalKey,
}

/// Replays `w` from `p`. Never fails; illegal steps are reported in the result.
pub fn verify_witness(p: &CurveMap, w: &Witness) -> WitnessCheck {
    let mut cur = p.clone();
    let mut s_count = 0;
    let mut ri_count = 0;
    let looks_like_key = w.base.len() >= 8 && w.base.chars().all(|c| c.is_ascii_hexdigit());
    if looks_like_key && w.base != p.canonical_key().to_string() {
        return WitnessCheck {
            valid: false,
            failed_step: None,
            reason: Some("BASE key does not match the projection".into()),
            s_count,
            ri_count,
            endpoint: cur.canonical_key(),
        };
    }
    for (i, step) in w.steps.iter().enumerate() {
        match step.apply(&cur) {
            Ok(next) => {
                s_count += step.s_cost();
                ri_count += step.ri_cost();
                cur = next;
            }
            Err(e) => {
                return WitnessCheck {
                    valid: false,
                    failed_step: Some(i),
                    reason: Some(e.to_string()),
                    s_count,
                    ri_count,
                    endpoint: cur.canonical_key(),
                }
            }
        }
    }
    let endpoint = cur.canonical_key();
    let at_o = cur.is_simple_closed_curve();
    WitnessCheck {
        valid: at_o,
        failed_step: None,
        reason: if at_o { None } else { Some("replay does not end at O".into()) },
        s_count,
        ri_count,
        endpoint,
    }
}

/// Index of the lowest-label kink crossing.
fn first_kink(map: &CurveMap) -> Option<usize> {
    (0..map.crossing_count())
        .filter(|&c| is_kink_index(map, c))
        .min_by_key(|&c| map.labels()[c])
}

/// Disoriented pairing at crossing index `c` of a one-component map.
fn disoriented(map: &CurveMap, c: usize) -> Pairing {
    map.oriented_pairings()[c].other()
}

/// Removes kinks by RI- until none is left; returns the map and removed labels.
pub fn reduce_ri_steps(p: &CurveMap) -> (CurveMap, Vec<u32>) {
    let mut cur = p.clone();
    let mut removed = Vec::new();
    while let Some(c) = first_kink(&cur) {
        removed.push(cur.labels()[c]);
        let pairing = disoriented(&cur, c);
        cur = cur.smooth_index(c, pairing);
    }
    (cur, removed)
}

pub fn reduce_ri(p: &CurveMap) -> CurveMap {
    reduce_ri_steps(p).0
}

/// One descent successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descent {
    pub label: u32,
    pub kind: SpliceKind,
    pub successor: CanonicalKey,
}

/// All Disoriented smoothings of a knot projection, ordered by crossing label.
pub fn enumerate_descents(p: &CurveMap) -> Result<Vec<Descent>> {
    let comps = p.components();
    if comps != 1 {
        return Err(Error::MultiComponent(comps));
    }
    let oriented = p.oriented_pairings();
    let mut out: Vec<Descent> = (0..p.crossing_count())
        .map(|c| Descent {
            label: p.labels()[c],
            kind: if is_kink_index(p, c) { SpliceKind::RIminus } else { SpliceKind::Sminus },
            successor: p.smooth_index(c, oriented[c].other()).canonical_key(),
        })
        .collect();
    out.sort_by_key(|d| d.label);
    Ok(out)
}

/// Memoized exact u-minus over canonical forms.
///
/// Kinks are removed first at every node: an RI- never raises the minimum,
/// since a 1-gon survives every other splice and its own splice is free.
#[derive(Debug, Default, Clone)]
pub struct DescentSolver {
    memo: HashMap<CanonicalKey, u32>,
    /// Proven lower bounds for keys whose exact value is not known.
    floor: HashMap<CanonicalKey, u32>,
}

impl DescentSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// u-minus of a one-component map.
    pub fn value(&mut self, p: &CurveMap) -> Result<usize> {
        let comps = p.components();
        if comps != 1 {
            return Err(Error::MultiComponent(comps));
        }
        Ok(self.value_reduced(&reduce_ri(p)) as usize)
    }

    fn value_reduced(&mut self, q: &CurveMap) -> u32 {
        if q.crossing_count() == 0 {
            return 0;
        }
        let key = q.canonical_key();
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let oriented = q.oriented_pairings();
        let mut best = u32::MAX;
        let mut seen = Vec::new();
        for c in 0..q.crossing_count() {
            // q is kink-free, so every descent here is an S-
            let next = reduce_ri(&q.smooth_index(c, oriented[c].other()));
            let k = next.canonical_key();
            if seen.contains(&k) {
                continue;
            }
            seen.push(k);
            best = best.min(1 + self.value_reduced(&next));
            if best == 1 {
                break;
            }
        }
        self.memo.insert(key, best);
        best
    }

    /// `min(u_minus(p), t + 1)`; cheaper than the exact value when `t` is small.
    pub fn value_capped(&mut self, p: &CurveMap, t: usize) -> usize {
        self.capped_reduced(&reduce_ri(p), t as u32) as usize
    }

    fn capped_reduced(&mut self, q: &CurveMap, t: u32) -> u32 {
        if q.crossing_count() == 0 {
            return 0;
        }
        if t == 0 {
            return 1;
        }
        let key = q.canonical_key();
        if let Some(&v) = self.memo.get(&key) {
            return v.min(t + 1);
        }
        if self.floor.get(&key).is_some_and(|&f| f > t) {
            return t + 1;
        }
        let oriented = q.oriented_pairings();
        let mut best = t + 1;
        let mut seen = Vec::new();
        for c in 0..q.crossing_count() {
            let next = reduce_ri(&q.smooth_index(c, oriented[c].other()));
            let k = next.canonical_key();
            if seen.contains(&k) {
                continue;
            }
            seen.push(k);
            best = best.min(1 + self.capped_reduced(&next, best - 2));
            if best == 1 {
                break;
            }
        }
        if best <= t {
            self.memo.insert(key, best);
        } else {
            self.floor.insert(key, t + 1);
        }
        best
    }

    /// u-minus with the lexicographically least optimal descent script.
    pub fn solve(&mut self, p: &CurveMap) -> Result<(usize, Witness)> {
        let value = self.value(p)?;
        let mut steps = Vec::new();
        let mut cur = p.clone();
        let mut remaining = value;
        while cur.crossing_count() > 0 {
            let oriented = cur.oriented_pairings();
            let mut order: Vec<usize> = (0..cur.crossing_count()).collect();
            order.sort_by_key(|&c| cur.labels()[c]);
            let mut advanced = false;
            for c in order {
                let label = cur.labels()[c];
                let kink = is_kink_index(&cur, c);
                let cost = usize::from(!kink);
                if cost > remaining {
                    continue;
                }
                let next = cur.smooth_index(c, oriented[c].other());
                if cost + self.value(&next)? == remaining {
                    steps.push(if kink { Step::RIminus(label) } else { Step::Sminus(label) });
                    remaining -= cost;
                    cur = next;
                    advanced = true;
                    break;
                }
            }
            assert!(advanced, "descent reconstruction lost the optimum");
        }
        Ok((value, Witness::new(p.canonical_key().to_string(), steps)))
    }
}

/// Exact u-minus and a witness script.
pub fn u_minus(p: &CurveMap) -> Result<(usize, Witness)> {
    DescentSolver::new().solve(p)
}

/// Truncation limits for the u search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_crossings: usize,
    pub max_cost: usize,
    pub max_nodes: usize,
}

impl SearchBudget {
    /// Defaults: `n + 6` crossings, cost up to `u_minus`, 10^7 nodes.
    pub fn default_for(n: usize, u_minus: usize) -> Self {
        SearchBudget { max_crossings: n + 6, max_cost: u_minus.max(1), max_nodes: 10_000_000 }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.max_crossings == 0 || self.max_cost == 0 || self.max_nodes == 0 {
            return Err(Error::InvalidBudget("all limits must be positive".into()));
        }
        if self.max_crossings < n {
            return Err(Error::InvalidBudget(format!(
                "max_crossings {} is below the crossing number {n}",
                self.max_crossings
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UStatus {
    Exact,
    UpperBoundOnly,
    /// The node budget ran out before the value could be proven.
    Exhausted,
}

impl fmt::Display for UStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UStatus::Exact => "Exact",
            UStatus::UpperBoundOnly => "UpperBoundOnly",
            UStatus::Exhausted => "Exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UResult {
    pub value: Option<usize>,
    pub status: UStatus,
    pub witness: Option<Witness>,
    pub nodes: usize,
}

struct Node {
    /// Kept until the node is expanded.
    map: Option<CurveMap>,
    cost: usize,
    parent: Option<(usize, Vec<Step>)>,
}

/// Lower bound for u from u-minus: the two agree whenever either is at most 2.
fn u_lower_bound(u_minus: usize) -> usize {
    u_minus.min(3)
}

/// Bounded search for u.
///
/// RI moves are free in both directions, so u is constant on RI classes and
/// the search runs over RI-reduced projections. A move is an S- splice or a
/// twist move (kinks stacked on one arc, then S+), each followed by RI-
/// reduction, and costs 1. Projections above `budget.max_crossings` are never
/// formed. Every node `Q` reached at cost `c` gives the bound
/// `c + u_minus(Q)`. The value is reported Exact only when it meets the lower
/// bound `min(u_minus(P), 3)`.
pub fn u_upper(p: &CurveMap, budget: SearchBudget) -> Result<UResult> {
    u_upper_with(p, budget, &mut DescentSolver::new())
}

pub fn u_upper_with(p: &CurveMap, budget: SearchBudget, solver: &mut DescentSolver) -> Result<UResult> {
    let comps = p.components();
    if comps != 1 {
        return Err(Error::MultiComponent(comps));
    }
    budget.validate(p.crossing_count())?;
    let (um, descent) = solver.solve(p)?;
    let lower = u_lower_bound(um);
    let mut best = um;
    let mut best_path: Option<(usize, Witness)> = None;
    let mut nodes = 0usize;
    let mut exhausted = false;

    let (start, removed) = reduce_ri_steps(p);
    let head: Vec<Step> = removed.into_iter().map(Step::RIminus).collect();
    let mut arena = vec![Node { map: Some(start.clone()), cost: 0, parent: None }];
    let mut seen: HashSet<CanonicalKey> = HashSet::from([start.canonical_key()]);
    let mut queue = VecDeque::from([0usize]);
    'search: while let Some(i) = queue.pop_front() {
        let c = arena[i].cost + 1;
        if best <= lower || c >= best || c > budget.max_cost {
            break;
        }
        let cur = arena[i].map.take().expect("queued nodes keep their map");
        for (steps, next) in moves(&cur, budget.max_crossings) {
            if !seen.insert(next.canonical_key()) {
                continue;
            }
            nodes += 1;
            if nodes > budget.max_nodes {
                exhausted = true;
                break 'search;
            }
            // only u_minus(next) <= t can improve on best
            let t = best - c - 1;
            let v = solver.value_capped(&next, t);
            let j = arena.len();
            arena.push(Node { map: None, cost: c, parent: Some((i, steps)) });
            if v <= t {
                best = c + v;
                let (_, tail) = solver.solve(&next)?;
                best_path = Some((j, tail));
                if best <= lower {
                    break 'search;
                }
            }
            if c + u_lower_bound(v) < best {
                arena[j].map = Some(next);
                queue.push_back(j);
            }
        }
    }

    let witness = match best_path {
        None => descent,
        Some((j, tail)) => {
            let mut steps = head;
            steps.extend(path_to(&arena, j));
            steps.extend(tail.steps);
            Witness::new(p.canonical_key().to_string(), steps)
        }
    };
    let status = if best <= lower {
        UStatus::Exact
    } else if exhausted {
        UStatus::Exhausted
    } else {
        UStatus::UpperBoundOnly
    };
    Ok(UResult { value: Some(best), status, witness: Some(witness), nodes })
}

fn path_to(arena: &[Node], mut j: usize) -> Vec<Step> {
    let mut chunks = Vec::new();
    while let Some((i, steps)) = &arena[j].parent {
        chunks.push(steps.clone());
        j = *i;
    }
    chunks.into_iter().rev().flatten().collect()
}

/// Cost-1 moves from an RI-reduced projection, each followed by RI- steps
/// back to a reduced projection.
fn moves(q: &CurveMap, cap: usize) -> Vec<(Vec<Step>, CurveMap)> {
    let mut out = Vec::new();
    let n = q.crossing_count();
    let mut push = |step: Step, next: CurveMap| {
        let (r, removed) = reduce_ri_steps(&next);
        let mut steps = vec![step];
        steps.extend(removed.into_iter().map(Step::RIminus));
        out.push((steps, r));
    };
    let oriented = q.oriented_pairings();
    for c in 0..n {
        push(Step::Sminus(q.labels()[c]), q.smooth_index(c, oriented[c].other()));
    }
    if n == 0 {
        return out;
    }
    for face in q.face_orbits() {
        for (x, &a) in face.iter().enumerate() {
            for &b in &face[x + 1..] {
                let (da, db) = (q.dart_ref(a), q.dart_ref(b));
                for i in 1..=cap.saturating_sub(n) {
                    let variants: &[TwistVariant] =
                        if i == 1 { &[TwistVariant::A] } else { &[TwistVariant::A, TwistVariant::B] };
                    for &v in variants {
                        if let Ok(m) = twist_move(q, da, db, i, v) {
                            let step = if i == 1 { Step::Splus(da, db) } else { Step::Twist(da, db, i, v) };
                            push(step, m);
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(code: &str) -> CurveMap {
        CurveMap::from_code_str(code).unwrap()
    }

    #[test]
    fn small_u_minus() {
        assert_eq!(u_minus(&CurveMap::simple_closed_curve()).unwrap().0, 0);
        assert_eq!(u_minus(&m("1+ 1+")).unwrap().0, 0);
        let (v, w) = u_minus(&m("1+ 2+ 3+ 1+ 2+ 3+")).unwrap();
        assert_eq!(v, 1);
        assert_eq!(w.s_count, 1);
        assert_eq!(w.steps.len(), 3);
        assert_eq!(w.steps[0], Step::Sminus(1));
        assert!(w.is_pure_descent());
    }

    #[test]
    fn witness_replay() {
        let t = m("1+ 2+ 3+ 1+ 2+ 3+");
        let w = Witness::parse("BASE trefoil\nS- 1\nRI- 2\nRI- 3\n").unwrap();
        let r = verify_witness(&t, &w);
        assert!(r.valid);
        assert_eq!((r.s_count, r.ri_count), (1, 2));
        assert_eq!(r.endpoint, CanonicalKey::simple_closed_curve());
        let bad = Witness::parse("BASE trefoil\nRI- 1\n").unwrap();
        let r = verify_witness(&t, &bad);
        assert!(!r.valid);
        assert_eq!(r.failed_step, Some(0));
        let empty = Witness::parse("BASE O\n").unwrap();
        assert!(verify_witness(&CurveMap::simple_closed_curve(), &empty).valid);
    }

    #[test]
    fn witness_text_round_trip() {
        let text = "BASE x\nS- 1\nRI- 2\nSeifert 3\nRI+ 4.1 L\nS+ 1.0 2.3\nTWIST 1.0 2.2 3 B\n";
        let w = Witness::parse(text).unwrap();
        assert_eq!(w.to_string(), text);
        assert_eq!(w.s_count, 3);
        assert_eq!(w.ri_count, 4);
        assert!(Witness::parse("S- 1").is_err());
        assert!(Witness::parse("BASE x\nS+ 1.0").is_err());
    }

    #[test]
    fn reductions() {
        assert!(reduce_ri(&m("1+ 1+")).is_simple_closed_curve());
        let (o, removed) = reduce_ri_steps(&m("1+ 1+ 2+ 2+"));
        assert!(o.is_simple_closed_curve());
        assert_eq!(removed.len(), 2);
        let t = m("1+ 2+ 3+ 1+ 2+ 3+");
        assert!(reduce_ri(&t).equivalent(&t));
    }

    #[test]
    fn descents() {
        let t = m("1+ 2+ 3+ 1+ 2+ 3+");
        let d = enumerate_descents(&t).unwrap();
        assert_eq!(d.len(), 3);
        let dk = m("1+ 1+ 2+ 2+").canonical_key();
        assert!(d.iter().all(|x| x.kind == SpliceKind::Sminus && x.successor == dk));
        let k = enumerate_descents(&m("1+ 1+")).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].kind, SpliceKind::RIminus);
        assert_eq!(k[0].successor, CanonicalKey::simple_closed_curve());
        assert!(enumerate_descents(&CurveMap::simple_closed_curve()).unwrap().is_empty());
    }

    #[test]
    fn u_upper_small() {
        let t = m("1+ 2+ 3+ 1+ 2+ 3+");
        let r = u_upper(&t, SearchBudget::default_for(3, 1)).unwrap();
        assert_eq!(r.value, Some(1));
        assert_eq!(r.status, UStatus::Exact);
        assert!(verify_witness(&t, r.witness.as_ref().unwrap()).valid);
        let o = CurveMap::simple_closed_curve();
        let r = u_upper(&o, SearchBudget::default_for(0, 0)).unwrap();
        assert_eq!(r.value, Some(0));
        let bad = SearchBudget { max_crossings: 2, max_cost: 1, max_nodes: 10 };
        assert!(matches!(u_upper(&t, bad), Err(Error::InvalidBudget(_))));
    }
}
