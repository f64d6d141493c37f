#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use splicekit::{ri_plus, s_plus, CanonicalKey, CurveMap, DartRef, Side, TableEntry};

pub fn m(code: &str) -> CurveMap {
    CurveMap::from_code_str(code).unwrap()
}

pub fn trefoil() -> CurveMap {
    m("1+ 2+ 3+ 1+ 2+ 3+")
}

pub fn table() -> Vec<TableEntry> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/projections_le8.gauss");
    splicekit::ingest_table(path).unwrap()
}

pub fn entry(name: &str) -> CurveMap {
    table().into_iter().find(|e| e.name == name).unwrap().map()
}

pub fn p74() -> CurveMap {
    entry("7_4")
}

fn successors(q: &CurveMap) -> Vec<CurveMap> {
    if q.crossing_count() == 0 {
        return vec![ri_plus(q, DartRef { label: 0, slot: 0 }, Side::Left).unwrap()];
    }
    let mut out = Vec::new();
    for d in 0..q.dart_count() as u32 {
        for side in [Side::Left, Side::Right] {
            out.push(ri_plus(q, q.dart_ref(d), side).unwrap());
        }
    }
    for face in q.face_orbits() {
        for (i, &a) in face.iter().enumerate() {
            for &b in &face[i + 1..] {
                if let Ok(x) = s_plus(q, q.dart_ref(a), q.dart_ref(b)) {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Every knot projection with 1..=max_n double points, one per class, by
/// crossing count. Every projection descends to O, so growing from O with
/// RI+ and S+ reaches all of them.
pub fn all_curves(max_n: usize) -> Vec<Vec<CurveMap>> {
    let mut layers = Vec::new();
    let mut layer = vec![CurveMap::simple_closed_curve()];
    for _ in 1..=max_n {
        let mut next: HashMap<CanonicalKey, CurveMap> = HashMap::new();
        for q in &layer {
            for s in successors(q) {
                next.entry(s.canonical_key()).or_insert(s);
            }
        }
        let mut v: Vec<(CanonicalKey, CurveMap)> = next.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        layer = v.into_iter().map(|x| x.1).collect();
        layers.push(layer.clone());
    }
    layers
}

/// The same map with crossings stored in another order and the slots of
/// each crossing rotated.
pub fn scramble(q: &CurveMap, rng: &mut impl Rng) -> CurveMap {
    let n = q.crossing_count();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let shift: Vec<u32> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let img = |d: u32| {
        let c = (d / 4) as usize;
        4 * perm[c] as u32 + (d % 4 + shift[c]) % 4
    };
    let mut labels = vec![0; n];
    let mut opp = vec![0; 4 * n];
    for c in 0..n {
        labels[perm[c]] = q.labels()[c] + 100;
    }
    for d in 0..4 * n as u32 {
        opp[img(d) as usize] = img(q.opp(d));
    }
    CurveMap::from_parts(labels, opp, q.free_circles() as u32).unwrap()
}

/// Maximum of circles minus crossings over all states, and whether a
/// non-Seifert state reaches it.
pub fn brute_chi(q: &CurveMap) -> (i64, bool) {
    let n = q.crossing_count();
    let base = q.oriented_pairings();
    let mut best = (i64::MIN, false);
    for mask in 0u32..(1 << n) {
        let mut cur = q.clone();
        for c in (0..n).rev() {
            let p = if mask >> c & 1 == 1 { base[c].other() } else { base[c] };
            cur = cur.smooth_index(c, p);
        }
        let chi = cur.free_circles() as i64 - n as i64;
        if chi > best.0 {
            best = (chi, mask != 0);
        } else if chi == best.0 {
            best.1 |= mask != 0;
        }
    }
    best
}
