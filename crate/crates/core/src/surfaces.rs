//! State surfaces of alternating diagrams: the minimal-genus branching
//! algorithm, crosscap numbers and the u-minus upper bound.

use std::collections::HashMap;

use crate::curvemap::{CurveMap, Pairing};
use crate::error::{Error, Result};
use crate::search::{reduce_ri, u_minus, verify_witness, Step, Witness};
use crate::splice::{seifert_genus, SmoothingChoice, State};

/// Partial run of the branching algorithm.
#[derive(Debug, Clone)]
pub struct PartialState {
    pub remaining: CurveMap,
    pub circles: usize,
    pub choices: HashMap<u32, SmoothingChoice>,
    pub any_disoriented: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AKResult {
    pub chi_max: i64,
    pub nonorientable_at_max: bool,
    pub crosscap: usize,
    /// Genus of the Seifert surface of the input.
    pub genus: usize,
    pub branch_count: usize,
}

/// Best value found below a node: circles minus crossings, and the best
/// value among completions that are not the Seifert state.
#[derive(Debug, Clone, Copy)]
struct Score {
    value: i64,
    non_seifert: Option<i64>,
    leaves: usize,
}

struct Ak {
    /// Oriented pairing of the input, by crossing label.
    oriented: HashMap<u32, Pairing>,
}

impl Ak {
    /// `seifert_so_far` is set while every choice made above this node
    /// agrees with the Seifert state.
    fn solve(&self, map: &CurveMap, seifert_so_far: bool) -> Score {
        if map.crossing_count() == 0 {
            let value = map.free_circles() as i64;
            let non_seifert = (!seifert_so_far).then_some(value);
            return Score { value, non_seifert, leaves: 1 };
        }
        let (parts, free) = map.split_connected();
        if parts.len() > 1 || free > 0 {
            let scores: Vec<Score> = parts.iter().map(|p| self.solve_connected(p, seifert_so_far)).collect();
            let value = free as i64 + scores.iter().map(|s| s.value).sum::<i64>();
            // one part leaves the Seifert state, the rest stay optimal
            let non_seifert = scores
                .iter()
                .filter_map(|s| s.non_seifert.map(|x| value - s.value + x))
                .max();
            let leaves = scores.iter().map(|s| s.leaves).sum();
            return Score { value, non_seifert, leaves };
        }
        self.solve_connected(map, seifert_so_far)
    }

    fn solve_connected(&self, map: &CurveMap, seifert_so_far: bool) -> Score {
        let face = smallest_face(map);
        let m = face.len();
        assert!(m <= 3, "connected 4-valent spherical map without a face of size at most 3");
        let forming = circle_forming(map, &face);
        let mut branches = vec![forming.clone()];
        if m == 3 {
            branches.push(forming.iter().map(|&(c, p)| (c, p.other())).collect());
        }
        let mut best: Option<Score> = None;
        for choice in branches {
            let mut labels_pairs: Vec<(u32, Pairing)> = choice
                .iter()
                .map(|&(c, p)| (map.labels()[c], p))
                .collect();
            labels_pairs.sort_unstable_by_key(|x| x.0);
            let seifert = seifert_so_far && labels_pairs.iter().all(|&(l, p)| self.oriented[&l] == p);
            let mut cur = map.clone();
            for &(label, p) in &labels_pairs {
                let c = cur.crossing_index(label).expect("crossing present");
                cur = cur.smooth_index(c, p);
            }
            let child = self.solve(&cur, seifert);
            let k = labels_pairs.len() as i64;
            let s = Score {
                value: child.value - k,
                non_seifert: child.non_seifert.map(|x| x - k),
                leaves: child.leaves,
            };
            best = Some(match best {
                None => s,
                Some(b) => Score {
                    value: b.value.max(s.value),
                    non_seifert: b.non_seifert.max(s.non_seifert),
                    leaves: b.leaves + s.leaves,
                },
            });
        }
        let mut best = best.expect("at least one branch");
        if seifert_so_far {
            // Moving an optimal non-Seifert state onto the branches above
            // can land on the Seifert state only if it differed from it at
            // the face corners alone, so those states are checked directly.
            let corners: Vec<u32> = forming.iter().map(|&(c, _)| map.labels()[c]).collect();
            let local = self.local_variants(map, &corners);
            best.non_seifert = best.non_seifert.max(local);
        }
        best
    }

    /// Best value, on the remaining map, of states that are Seifert except
    /// at a nonempty subset of `corners`.
    fn local_variants(&self, map: &CurveMap, corners: &[u32]) -> Option<i64> {
        let n = map.crossing_count() as i64;
        let mut best = None;
        for mask in 1u32..(1 << corners.len()) {
            let mut cur = map.clone();
            for &label in map.labels() {
                let base = self.oriented[&label];
                let flip = corners.iter().position(|&l| l == label).is_some_and(|i| mask >> i & 1 == 1);
                let c = cur.crossing_index(label).expect("crossing present");
                cur = cur.smooth_index(c, if flip { base.other() } else { base });
            }
            best = best.max(Some(cur.free_circles() as i64 - n));
        }
        best
    }
}

/// Smallest face; ties go to the least sorted multiset of corner labels.
fn smallest_face(map: &CurveMap) -> Vec<u32> {
    let faces = map.face_orbits();
    let min = faces.iter().map(Vec::len).min().expect("map has faces");
    faces
        .into_iter()
        .filter(|f| f.len() == min)
        .min_by_key(|f| {
            let mut ls: Vec<u32> = f.iter().map(|&d| map.labels()[(d / 4) as usize]).collect();
            ls.sort_unstable();
            ls
        })
        .expect("nonempty")
}

/// Pairing at each corner crossing that turns the face into a state circle.
fn circle_forming(map: &CurveMap, face: &[u32]) -> Vec<(usize, Pairing)> {
    let m = face.len();
    let mut out: Vec<(usize, Pairing)> = Vec::with_capacity(m);
    for k in 0..m {
        let prev = face[k];
        let d = face[(k + 1) % m];
        let c = (d / 4) as usize;
        let p = Pairing::joining(map.opp(prev) % 4, d % 4);
        match out.iter().find(|x| x.0 == c) {
            Some(&(_, q)) => assert_eq!(p, q, "face corners at one crossing disagree"),
            None => out.push((c, p)),
        }
    }
    out
}

/// Maximal Euler characteristic over the states produced by the branching
/// algorithm, with the crosscap number it determines.
pub fn ak_min_genus(p: &CurveMap) -> Result<AKResult> {
    let comps = p.components();
    if comps != 1 {
        return Err(Error::MultiComponent(comps));
    }
    let oriented = p
        .oriented_pairings()
        .into_iter()
        .enumerate()
        .map(|(c, q)| (p.labels()[c], q))
        .collect();
    let ak = Ak { oriented };
    let s = ak.solve(p, true);
    let chi_max = s.value;
    let nonorientable = s.non_seifert == Some(chi_max);
    let crosscap = if nonorientable { 1 - chi_max } else { 2 - chi_max };
    Ok(AKResult {
        chi_max,
        nonorientable_at_max: nonorientable,
        crosscap: crosscap.max(0) as usize,
        genus: seifert_genus(p)?,
        branch_count: s.leaves,
    })
}

/// Crosscap number of the alternating knot carried by `p`; 0 for the unknot.
pub fn crosscap_alt(p: &CurveMap) -> Result<usize> {
    let comps = p.components();
    if comps != 1 {
        return Err(Error::MultiComponent(comps));
    }
    if reduce_ri(p).is_simple_closed_curve() {
        return Ok(0);
    }
    Ok(ak_min_genus(p)?.crosscap)
}

/// The state read off a descent witness: the descent splice at each S- and
/// the loop-forming splice at each RI-.
pub fn sigma_from_witness(p: &CurveMap, w: &Witness) -> Result<State> {
    if !w.is_pure_descent() {
        return Err(Error::BadWitness("witness uses increasing moves".into()));
    }
    let check = verify_witness(p, w);
    if !check.valid {
        return Err(Error::BadWitness(check.reason.unwrap_or_default()));
    }
    let base: HashMap<u32, Pairing> = p
        .oriented_pairings()
        .into_iter()
        .enumerate()
        .map(|(c, q)| (p.labels()[c], q))
        .collect();
    let mut cur = p.clone();
    let mut choices = Vec::with_capacity(p.crossing_count());
    for step in &w.steps {
        let (label, kink) = match *step {
            Step::Sminus(l) => (l, false),
            Step::RIminus(l) => (l, true),
            _ => unreachable!(),
        };
        let c = cur.crossing_index(label)?;
        let oriented_here = cur.oriented_pairings()[c];
        let descent = oriented_here.other();
        let used = if kink { oriented_here } else { descent };
        let choice = if used == base[&label] {
            SmoothingChoice::Oriented
        } else {
            SmoothingChoice::Disoriented
        };
        choices.push((label, choice));
        cur = cur.smooth_index(c, descent);
    }
    State::new(p, choices)
}

/// Whether the crosscap number is at most u-minus.
pub fn check_upper_bound(p: &CurveMap) -> Result<bool> {
    Ok(crosscap_alt(p)? <= u_minus(p)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EqualityReport {
    pub crosscap: usize,
    pub u_minus: usize,
    pub equal: bool,
}

pub fn equality_report(p: &CurveMap) -> Result<EqualityReport> {
    let crosscap = crosscap_alt(p)?;
    let u = u_minus(p)?.0;
    Ok(EqualityReport { crosscap, u_minus: u, equal: crosscap == u })
}
