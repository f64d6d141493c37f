//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any fails.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{all_curves, brute_chi, entry, p74, scramble, table};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use splicekit::{
    ak_min_genus, classify, connected_sum, connected_sum_default, crosscap_alt, gen_family,
    ingest_external, u_minus, u_upper, verify_observation, verify_witness, CanonicalKey,
    ClassLabel, CurveMap, FamilySpec, Pairing, SearchBudget, Witness,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, || format!("took {:.1?}, limit {limit:?}", t.elapsed()))
}

fn fam(s: &FamilySpec) -> CurveMap {
    gen_family(s).unwrap()
}

/// Family members with at most `max_n` crossings, plus sums of two torus members.
fn members(max_n: usize) -> Vec<FamilySpec> {
    let mut v: Vec<FamilySpec> = (3..=max_n).flat_map(FamilySpec::members_with).collect();
    for a in 2.. {
        if 2 * (2 * a - 1) > max_n {
            break;
        }
        for b in a.. {
            if (2 * a - 1) + (2 * b - 1) > max_n {
                break;
            }
            v.push(FamilySpec::Sum(vec![FamilySpec::Torus(a), FamilySpec::Torus(b)]));
        }
    }
    v
}

fn u(p: &CurveMap) -> usize {
    u_minus(p).unwrap().0
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let vals: Vec<usize> = ["1_1", "3_1", "6_2"].iter().map(|n| u(&entry(n))).collect();
    ensure(vals == [0, 1, 2], || format!("got {vals:?}"))?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("u- = {vals:?} in {:.0?}", t.elapsed()))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let p = p74();
    let s = connected_sum_default(&p, &p).unwrap();
    let got = [u(&p), u(&s), crosscap_alt(&p).unwrap(), crosscap_alt(&s).unwrap()];
    ensure(got == [3, 6, 3, 5], || format!("got {got:?}"))?;
    within(t, Duration::from_secs(30))?;
    Ok(format!("u-, u- of sum, crosscap, crosscap of sum = {got:?}"))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for s in members(12) {
        let p = fam(&s);
        let (c, um) = (classify(&p).unwrap(), u(&p));
        ensure(c.index() == um && (um == 1 || um == 2), || format!("{s}: class {c}, u- {um}"))?;
        checked += 1;
    }
    for e in table() {
        let p = e.map();
        let (c, um) = (classify(&p).unwrap(), u(&p));
        ensure(c.index() == um.min(3), || format!("{}: class {c}, u- {um}", e.name))?;
        checked += 1;
    }
    within(t, Duration::from_secs(300))?;
    Ok(format!("{checked} projections"))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut maps: Vec<(String, CurveMap)> = members(12).iter().map(|s| (s.to_string(), fam(s))).collect();
    maps.extend(table().into_iter().map(|e| (e.name.clone(), e.map())));
    for (name, p) in &maps {
        let (c, um) = (crosscap_alt(p).unwrap(), u(p));
        ensure(c <= um, || format!("{name}: crosscap {c} > u- {um}"))?;
    }
    within(t, Duration::from_secs(600))?;
    Ok(format!("{} projections", maps.len()))
}

fn criterion_5() -> Outcome {
    for l in 2..=5 {
        let c = crosscap_alt(&fam(&FamilySpec::Torus(l))).unwrap();
        ensure(c == 1, || format!("torus({l}): crosscap {c}"))?;
    }
    let mut twos = 0;
    for s in members(10) {
        if matches!(s, FamilySpec::Torus(_)) {
            continue;
        }
        let c = crosscap_alt(&fam(&s)).unwrap();
        ensure(c == 2, || format!("{s}: crosscap {c}"))?;
        twos += 1;
    }
    for e in table() {
        let p = e.map();
        let c = crosscap_alt(&p).unwrap();
        let class = classify(&p).unwrap();
        let ok = match c {
            1 => matches!(class, ClassLabel::U1(_)),
            2 => matches!(class, ClassLabel::U2(_)),
            _ => class.index() != 1 && class.index() != 2 || c == 0,
        };
        ensure(ok, || format!("{}: crosscap {c}, class {class}", e.name))?;
    }
    Ok(format!("4 torus members, {twos} members with crosscap 2, table consistent"))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let ext = ingest_external(concat!(env!("CARGO_MANIFEST_DIR"), "/data/crosscap_snapshot.csv")).unwrap();
    let (rows, s) = verify_observation(&table(), &ext).unwrap();
    ensure(s.is_clean() && s.mismatches == 0, || format!("{s:?}"))?;
    ensure(s.external_matched == ext.len(), || format!("matched {} of {}", s.external_matched, ext.len()))?;
    for r in &rows {
        ensure(r.u_minus == r.crosscap_alt && r.u_upper_value == r.u_minus, || format!("{r:?}"))?;
    }
    within(t, Duration::from_secs(600))?;
    Ok(format!("{} prime entries, {} external rows matched", rows.len(), s.external_matched))
}

fn criterion_7() -> Outcome {
    let tab: Vec<(String, CurveMap)> = table().into_iter().map(|e| (e.name.clone(), e.map())).collect();
    let us: Vec<usize> = tab.iter().map(|(_, p)| u(p)).collect();
    let mut pairs = 0;
    for (i, (a, p)) in tab.iter().enumerate() {
        for (j, (b, q)) in tab.iter().enumerate() {
            if p.crossing_count() + q.crossing_count() > 10 {
                continue;
            }
            let s = connected_sum_default(p, q).unwrap();
            ensure(u(&s) == us[i] + us[j], || format!("{a} # {b}"))?;
            pairs += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let i = rng.gen_range(0..tab.len());
        let j = rng.gen_range(0..tab.len());
        let (p, q) = (&tab[i].1, &tab[j].1);
        let d1 = p.dart_ref(rng.gen_range(0..p.dart_count() as u32));
        let d2 = q.dart_ref(rng.gen_range(0..q.dart_count() as u32));
        let s = connected_sum(p, d1, q, d2).unwrap();
        ensure(u(&s) == us[i] + us[j], || format!("{} at {d1} # {} at {d2}", tab[i].0, tab[j].0))?;
    }
    Ok(format!("{pairs} table pairs, 100 random basepoints"))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let p = p74();
    let rec = splicekit::ingest_table(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sum_74x74.gauss")).unwrap();
    let s = rec[0].map();
    ensure(s.equivalent(&connected_sum_default(&p, &p).unwrap()), || "bundled sum differs".into())?;
    let budget = SearchBudget { max_crossings: 18, max_cost: 6, max_nodes: 100_000_000 };
    let r = u_upper(&s, budget).unwrap();
    let text = include_str!("../data/witness_74x74.txt");
    let w = Witness::parse(text).map_err(|e| e.to_string())?;
    let file = verify_witness(&s, &w);
    let file_ok = file.valid && file.s_count == 5;
    match r.value {
        Some(v) if v <= 5 => {
            let c = verify_witness(&s, r.witness.as_ref().unwrap());
            ensure(c.valid && c.s_count == v, || format!("search witness invalid: {:?}", c.reason))?;
            ensure(file_ok, || format!("checked-in witness rejected: {:?}", file.reason))?;
            within(t, Duration::from_secs(1800))?;
            Ok(format!(
                "search: {v} ({}, {} nodes, {:.0?}); checked-in witness valid",
                r.status,
                r.nodes,
                t.elapsed()
            ))
        }
        other => {
            ensure(file_ok, || format!("search gave {other:?}, witness file invalid: {:?}", file.reason))?;
            Ok(format!("search gave {other:?} ({}); checked-in witness with 5 S-moves is valid", r.status))
        }
    }
}

/// Each reduction order of kinks, as the set of final keys.
fn ri_outcomes(q: &CurveMap, out: &mut HashSet<CanonicalKey>) {
    let kinks: Vec<usize> = (0..q.crossing_count())
        .filter(|&c| {
            (0..4).any(|k| {
                let d = 4 * c as u32 + k;
                let o = q.opp(d);
                o / 4 == c as u32 && (o % 4 == (k + 1) % 4 || o % 4 == (k + 3) % 4)
            })
        })
        .collect();
    if kinks.is_empty() {
        out.insert(q.canonical_key());
        return;
    }
    let orient = q.oriented_pairings();
    for c in kinks {
        ri_outcomes(&q.smooth_index(c, orient[c].other()), out);
    }
}

fn smooth_label(q: &CurveMap, label: u32, p: Pairing) -> CurveMap {
    q.smooth_index(q.crossing_index(label).unwrap(), p)
}

fn criterion_9() -> Outcome {
    let layers = all_curves(8);
    let small: Vec<&CurveMap> = layers.iter().take(6).flatten().collect();
    let mut rng = StdRng::seed_from_u64(9);

    // commutativity and order independence
    for q in &small {
        let base = q.oriented_pairings();
        let n = q.crossing_count();
        let labels = q.labels().to_vec();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                for pa in [base[a], base[a].other()] {
                    for pb in [base[b], base[b].other()] {
                        let x = smooth_label(&smooth_label(q, labels[a], pa), labels[b], pb);
                        let y = smooth_label(&smooth_label(q, labels[b], pb), labels[a], pa);
                        ensure(x.equivalent(&y), || format!("smoothings do not commute on {}", q.extract_code()))?;
                    }
                }
            }
        }
        for mask in 0u32..(1 << n) {
            let pick = |c: usize| if mask >> c & 1 == 1 { base[c].other() } else { base[c] };
            let mut order: Vec<usize> = (0..n).collect();
            let mut counts = HashSet::new();
            for _ in 0..3 {
                order.shuffle(&mut rng);
                let mut cur = (*q).clone();
                for &c in &order {
                    cur = smooth_label(&cur, labels[c], pick(c));
                }
                counts.insert(cur.free_circles());
            }
            let choices = (0..n).map(|c| {
                let ch = if mask >> c & 1 == 1 { splicekit::SmoothingChoice::Disoriented } else { splicekit::SmoothingChoice::Oriented };
                (labels[c], ch)
            });
            let state = splicekit::State::new(q, choices).unwrap();
            counts.insert(splicekit::apply_state(q, &state).unwrap());
            ensure(counts.len() == 1, || format!("state circles depend on order on {}", q.extract_code()))?;
        }
    }

    // key invariance, exhaustive to 8
    let mut keys = 0;
    for q in layers.iter().flatten() {
        let k = q.canonical_key();
        let s = scramble(q, &mut rng);
        ensure(s.canonical_key() == k, || format!("key changes under relabeling on {}", q.extract_code()))?;
        ensure(q.mirror().canonical_key() == k, || format!("key changes under mirror on {}", q.extract_code()))?;
        keys += 1;
    }
    let distinct: HashSet<CanonicalKey> = layers.iter().flatten().map(|q| q.canonical_key()).collect();
    ensure(distinct.len() == keys, || "distinct curves share a key".into())?;

    // branching against all states
    for q in &small {
        let r = ak_min_genus(q).unwrap();
        ensure((r.chi_max, r.nonorientable_at_max) == brute_chi(q), || {
            format!("branching disagrees with brute force on {}", q.extract_code())
        })?;
    }

    // reconnection across a Seifert splice
    let mut pairs = 0;
    for q in layers.iter().flatten() {
        let base = q.oriented_pairings();
        let labels = q.labels().to_vec();
        for a in 0..labels.len() {
            let split = q.smooth_index(a, base[a]);
            if split.components() != 2 {
                return Err(format!("Seifert splice did not split {}", q.extract_code()));
            }
            for b in 0..labels.len() {
                if a == b || !q.interleaved(labels[a], labels[b]).unwrap() {
                    continue;
                }
                for p in [base[b], base[b].other()] {
                    let joined = smooth_label(&split, labels[b], p);
                    ensure(joined.components() == 1, || {
                        format!("{} and {} on {}", labels[a], labels[b], q.extract_code())
                    })?;
                }
                pairs += 1;
            }
        }
    }

    // kink removal order
    for q in &small {
        let mut out = HashSet::new();
        ri_outcomes(q, &mut out);
        ensure(out.len() == 1, || format!("RI reduction depends on order on {}", q.extract_code()))?;
    }

    Ok(format!(
        "{} curves up to 6, {keys} up to 8, {pairs} interleaved pairs",
        small.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("small u- values", criterion_1),
        ("7_4 and its double", criterion_2),
        ("classification", criterion_3),
        ("crosscap bound", criterion_4),
        ("crosscap 1 and 2", criterion_5),
        ("table observation", criterion_6),
        ("additivity", criterion_7),
        ("u bound for 7_4#7_4", criterion_8),
        ("property sweeps", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {} PASS  {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
