//! Regenerates `data/projections_le8.gauss`.
//!
//! Every knot projection descends to the simple closed curve, so growing
//! layer by layer from `O` with RI+ and S+ reaches all of them. The layer
//! sizes are checked against the known counts of spherical curves.
//!
//! Usage: cargo run --release -p splicekit --example curate_table [OUT]

use std::collections::HashMap;
use std::fmt::Write as _;

use splicekit::{
    decompose_prime, pretzel_columns, ri_plus, s_plus, CanonicalKey, CurveMap, DartRef, Side,
};

const MAX_N: usize = 8;
// spherical curves with n double points, up to homeomorphism and mirror
const KNOWN: [usize; 8] = [1, 2, 6, 19, 76, 376, 2194, 14614];

fn successors(m: &CurveMap) -> Vec<CurveMap> {
    let mut out = Vec::new();
    if m.crossing_count() == 0 {
        out.push(ri_plus(m, DartRef { label: 0, slot: 0 }, Side::Left).unwrap());
        return out;
    }
    for d in 0..m.dart_count() as u32 {
        for side in [Side::Left, Side::Right] {
            out.push(ri_plus(m, m.dart_ref(d), side).unwrap());
        }
    }
    for face in m.face_orbits() {
        for (i, &a) in face.iter().enumerate() {
            for &b in &face[i + 1..] {
                if let Ok(x) = s_plus(m, m.dart_ref(a), m.dart_ref(b)) {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Renders with labels renumbered by first appearance.
fn dense_code(m: &CurveMap) -> String {
    let rebuilt = CurveMap::build(&m.extract_code()).unwrap();
    rebuilt.extract_code().to_string()
}

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| format!("{}/data/projections_le8.gauss", env!("CARGO_MANIFEST_DIR")));

    let named: Vec<(&str, Vec<usize>)> = vec![
        ("3_1", vec![1, 1, 1]),
        ("4_1", vec![2, 1, 1]),
        ("5_1", vec![1; 5]),
        ("5_2", vec![3, 1, 1]),
        ("6_1", vec![4, 1, 1]),
        ("6_2", vec![3, 1, 2]),
        ("7_1", vec![1; 7]),
        ("7_2", vec![5, 1, 1]),
        ("7_3", vec![4, 1, 1, 1]),
        ("7_4", vec![3, 1, 3]),
    ];
    let mut names: HashMap<CanonicalKey, String> = named
        .iter()
        .map(|(n, c)| (pretzel_columns(c).unwrap().canonical_key(), n.to_string()))
        .collect();
    names.insert(CurveMap::from_code_str("1+ 1+").unwrap().canonical_key(), "1_1".into());

    let mut layer: Vec<CurveMap> = vec![CurveMap::simple_closed_curve()];
    let mut text = String::new();
    writeln!(text, "# Prime knot projections with at most {MAX_N} double points.").unwrap();
    writeln!(text, "# Generated by examples/curate_table.rs; one record per projection up to").unwrap();
    writeln!(text, "# sphere homeomorphism and mirror image.").unwrap();
    for n in 1..=MAX_N {
        let mut next: HashMap<CanonicalKey, CurveMap> = HashMap::new();
        for m in &layer {
            for s in successors(m) {
                next.entry(s.canonical_key()).or_insert(s);
            }
        }
        let mut keys: Vec<&CanonicalKey> = next.keys().collect();
        keys.sort();
        let mut primes = Vec::new();
        for k in keys {
            let m = &next[k];
            if decompose_prime(m).unwrap().len() == 1 {
                primes.push((k.clone(), m.clone()));
            }
        }
        eprintln!("n={n}: {} curves ({} prime)", next.len(), primes.len());
        assert_eq!(next.len(), KNOWN[n - 1], "curve count mismatch at n={n}");
        let mut idx = 0;
        for (k, m) in &primes {
            let name = match names.get(k) {
                Some(s) => s.clone(),
                None => {
                    idx += 1;
                    format!("n{n}_{idx:03}")
                }
            };
            writeln!(text, "{name}: {}", dense_code(m)).unwrap();
        }
        let mut v: Vec<(CanonicalKey, CurveMap)> = next.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        layer = v.into_iter().map(|x| x.1).collect();
    }
    std::fs::write(&out, text).unwrap();
    eprintln!("wrote {out}");
}
