//! Torus, rational and pretzel projection families, connected sums, prime
//! decomposition and the low-u classifier.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use crate::curvemap::{CanonicalKey, CurveMap, DartRef};
use crate::error::{Error, Result};
use crate::search::reduce_ri;

/// A member of one of the three families, or a connected sum of members.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    /// (2, 2l-1)-torus projection, `l >= 2`.
    Torus(usize),
    /// (2m, 2n-1)-rational projection, `m >= 1`, `n >= 2`.
    Rational(usize, usize),
    /// (2p, 2q-1, 2r-1)-pretzel projection, `p, q, r >= 1`.
    Pretzel(usize, usize, usize),
    Sum(Vec<FamilySpec>),
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ParameterRange(m));
        match *self {
            FamilySpec::Torus(l) if l < 2 => bad(format!("torus needs l >= 2, got {l}")),
            FamilySpec::Rational(m, n) if m < 1 || n < 2 => {
                bad(format!("rational needs m >= 1 and n >= 2, got ({m}, {n})"))
            }
            FamilySpec::Pretzel(p, q, r) if p < 1 || q < 1 || r < 1 => {
                bad(format!("pretzel needs p, q, r >= 1, got ({p}, {q}, {r})"))
            }
            FamilySpec::Sum(ref parts) => {
                if parts.is_empty() {
                    return bad("empty sum".into());
                }
                parts.iter().try_for_each(FamilySpec::validate)
            }
            _ => Ok(()),
        }
    }

    /// Crossing number of the standard projection.
    pub fn crossing_count(&self) -> usize {
        match *self {
            FamilySpec::Torus(l) => 2 * l - 1,
            FamilySpec::Rational(m, n) => 2 * m + 2 * n - 1,
            FamilySpec::Pretzel(p, q, r) => 2 * p + 2 * q + 2 * r - 2,
            FamilySpec::Sum(ref parts) => parts.iter().map(FamilySpec::crossing_count).sum(),
        }
    }

    /// Column sizes of the pretzel diagram realizing a non-sum member.
    fn columns(&self) -> Vec<usize> {
        match *self {
            FamilySpec::Torus(l) => vec![1; 2 * l - 1],
            FamilySpec::Rational(m, n) => {
                let mut v = vec![2 * m];
                v.extend(std::iter::repeat_n(1, 2 * n - 1));
                v
            }
            FamilySpec::Pretzel(p, q, r) => vec![2 * p, 2 * q - 1, 2 * r - 1],
            FamilySpec::Sum(_) => unreachable!(),
        }
    }

    /// Every non-sum member with exactly `n` crossings.
    pub fn members_with(n: usize) -> Vec<FamilySpec> {
        let mut out = Vec::new();
        if n % 2 == 1 && n >= 3 {
            out.push(FamilySpec::Torus(n.div_ceil(2)));
        }
        // 2m + 2n' - 1 = n
        if n % 2 == 1 {
            for m in 1.. {
                let rest = n + 1;
                if 2 * m + 4 > rest {
                    break;
                }
                if (rest - 2 * m).is_multiple_of(2) {
                    out.push(FamilySpec::Rational(m, (rest - 2 * m) / 2));
                }
            }
        }
        // 2(p + q + r) - 2 = n, with q <= r since the two odd columns commute
        if n.is_multiple_of(2) {
            let s = (n + 2) / 2;
            for p in 1..s {
                for q in 1..s {
                    if p + 2 * q > s {
                        break;
                    }
                    let r = s - p - q;
                    if r >= q {
                        out.push(FamilySpec::Pretzel(p, q, r));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Torus(l) => write!(f, "torus({l})"),
            FamilySpec::Rational(m, n) => write!(f, "rational({m},{n})"),
            FamilySpec::Pretzel(p, q, r) => write!(f, "pretzel({p},{q},{r})"),
            FamilySpec::Sum(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join("#"))
            }
        }
    }
}

/// Result of the low-u classifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    U0,
    U1(FamilySpec),
    U2(FamilySpec),
    UAtLeast3,
}

impl ClassLabel {
    /// 0, 1, 2 or 3 (for three or more).
    pub fn index(&self) -> usize {
        match self {
            ClassLabel::U0 => 0,
            ClassLabel::U1(_) => 1,
            ClassLabel::U2(_) => 2,
            ClassLabel::UAtLeast3 => 3,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::U0 => write!(f, "U0"),
            ClassLabel::U1(s) => write!(f, "U1:{s}"),
            ClassLabel::U2(s) => write!(f, "U2:{s}"),
            ClassLabel::UAtLeast3 => write!(f, "U>=3"),
        }
    }
}

/// Pretzel diagram with vertical twist columns of the given sizes.
///
/// Slots are NE=0, NW=1, SW=2, SE=3. Inside a column consecutive crossings
/// share two edges; neighbouring columns are joined along the top and the
/// bottom, the last column wrapping round to the first.
pub fn pretzel_columns(cols: &[usize]) -> Result<CurveMap> {
    if cols.len() < 2 || cols.contains(&0) {
        return Err(Error::ParameterRange(format!("bad pretzel columns {cols:?}")));
    }
    let n: usize = cols.iter().sum();
    let mut opp = vec![u32::MAX; 4 * n];
    let mut link = |a: usize, b: usize| {
        opp[a] = b as u32;
        opp[b] = a as u32;
    };
    let mut start = Vec::with_capacity(cols.len());
    let mut next = 0;
    for &a in cols {
        start.push(next);
        for j in 0..a - 1 {
            let c = next + j;
            link(4 * c + 2, 4 * (c + 1) + 1);
            link(4 * c + 3, 4 * (c + 1));
        }
        next += a;
    }
    let k = cols.len();
    for i in 0..k {
        let top_i = start[i];
        let bot_i = start[i] + cols[i] - 1;
        let j = (i + 1) % k;
        let top_j = start[j];
        let bot_j = start[j] + cols[j] - 1;
        link(4 * top_i, 4 * top_j + 1);
        link(4 * bot_i + 3, 4 * bot_j + 2);
    }
    let m = CurveMap::from_parts((1..=n as u32).collect(), opp, 0)?;
    Ok(m)
}

/// The standard projection of a family member.
pub fn gen_family(spec: &FamilySpec) -> Result<CurveMap> {
    spec.validate()?;
    match spec {
        FamilySpec::Sum(parts) => {
            let mut acc = CurveMap::simple_closed_curve();
            for p in parts {
                let m = gen_family(p)?;
                acc = connected_sum_default(&acc, &m)?;
            }
            Ok(acc)
        }
        _ => {
            let m = pretzel_columns(&spec.columns())?;
            let comps = m.components();
            if comps != 1 {
                return Err(Error::MultiComponent(comps));
            }
            Ok(m)
        }
    }
}

/// Default basepoint: the edge leaving the lowest-labeled crossing at slot 2.
pub fn default_basepoint(p: &CurveMap) -> Option<DartRef> {
    p.labels().iter().min().map(|&label| DartRef { label, slot: 2 })
}

pub fn connected_sum_default(p1: &CurveMap, p2: &CurveMap) -> Result<CurveMap> {
    let d1 = default_basepoint(p1).unwrap_or(DartRef { label: 0, slot: 0 });
    let d2 = default_basepoint(p2).unwrap_or(DartRef { label: 0, slot: 0 });
    connected_sum(p1, d1, p2, d2)
}

/// Cuts the edge leaving `d1` in `p1` and the edge leaving `d2` in `p2` and
/// joins the loose ends. Labels of `p2` are shifted above those of `p1`.
///
/// A crossingless factor is the identity and its dart is ignored.
pub fn connected_sum(p1: &CurveMap, d1: DartRef, p2: &CurveMap, d2: DartRef) -> Result<CurveMap> {
    for p in [p1, p2] {
        let comps = p.components();
        if comps != 1 {
            return Err(Error::MultiComponent(comps));
        }
    }
    if p2.crossing_count() == 0 {
        p1.dart(d1).or_else(|e| if p1.crossing_count() == 0 { Ok(0) } else { Err(e) })?;
        return Ok(p1.clone());
    }
    if p1.crossing_count() == 0 {
        p2.dart(d2)?;
        return Ok(p2.clone());
    }
    let a = p1.dart(d1)?;
    let b = p2.dart(d2)?;
    let shift = p1.max_label();
    let off = p1.dart_count() as u32;
    let mut labels: Vec<u32> = p1.labels().to_vec();
    labels.extend(p2.labels().iter().map(|&l| l + shift));
    let mut opp: Vec<u32> = (0..p1.dart_count() as u32).map(|d| p1.opp(d)).collect();
    opp.extend((0..p2.dart_count() as u32).map(|d| p2.opp(d) + off));
    let (oa, ob) = (p1.opp(a), p2.opp(b) + off);
    let b = b + off;
    opp[a as usize] = ob;
    opp[ob as usize] = a;
    opp[oa as usize] = b;
    opp[b as usize] = oa;
    CurveMap::from_parts(labels, opp, 0)
}

/// Splits a knot projection into prime factors, sorted by canonical key.
///
/// A factor is a cyclic stretch of the traversal word that contains both
/// visits of each of its crossings; its two loose ends are joined.
pub fn decompose_prime(p: &CurveMap) -> Result<Vec<CurveMap>> {
    let comps = p.components();
    if comps != 1 {
        return Err(Error::MultiComponent(comps));
    }
    let mut out = Vec::new();
    let mut stack = vec![p.clone()];
    while let Some(q) = stack.pop() {
        match split_once(&q) {
            Some((u, v)) => {
                stack.push(u);
                stack.push(v);
            }
            None => out.push(q),
        }
    }
    out.sort_by_cached_key(|m| m.canonical_key());
    Ok(out)
}

/// Finds one nontrivial two-edge cut along the traversal.
fn split_once(q: &CurveMap) -> Option<(CurveMap, CurveMap)> {
    let n = q.crossing_count();
    if n < 2 {
        return None;
    }
    let orbit = q.strands().remove(0);
    let len = orbit.len();
    let word: Vec<usize> = orbit.iter().map(|&d| (d / 4) as usize).collect();
    let mut count = vec![0u8; n];
    for i in 0..len {
        count.iter_mut().for_each(|c| *c = 0);
        let mut open = 0usize;
        for l in 1..len - 1 {
            let c = word[(i + l - 1) % len];
            count[c] += 1;
            if count[c] == 1 {
                open += 1;
            } else {
                open -= 1;
            }
            if open == 0 && l % 2 == 0 {
                return Some(cut(q, &orbit, i, l));
            }
        }
    }
    None
}

/// Splits `q` at the stretch of `l` passes starting at orbit position `i`.
fn cut(q: &CurveMap, orbit: &[u32], i: usize, l: usize) -> (CurveMap, CurveMap) {
    let len = orbit.len();
    // orbit[k] is the exit dart of pass k; the pass's entry is orbit[k] ^ 2
    let in_entry = orbit[i] ^ 2;
    let out_exit = orbit[(i + l - 1) % len];
    let before_exit = q.opp(in_entry);
    let after_entry = q.opp(out_exit);
    let inside: Vec<bool> = {
        let mut v = vec![false; q.crossing_count()];
        for k in 0..l {
            v[(orbit[(i + k) % len] / 4) as usize] = true;
        }
        v
    };
    let part = |keep: bool, repl: [(u32, u32); 2]| {
        let idx: Vec<usize> = (0..q.crossing_count()).filter(|&c| inside[c] == keep).collect();
        let mut new_index = vec![u32::MAX; q.crossing_count()];
        for (k, &c) in idx.iter().enumerate() {
            new_index[c] = k as u32;
        }
        let map_dart = |d: u32| 4 * new_index[(d / 4) as usize] + d % 4;
        let mut opp = Vec::with_capacity(4 * idx.len());
        for &c in &idx {
            for s in 0..4 {
                opp.push(q.opp(4 * c as u32 + s));
            }
        }
        for o in opp.iter_mut() {
            if let Some(&(_, to)) = repl.iter().find(|(from, _)| *from == *o) {
                *o = to;
            }
        }
        let opp = opp.into_iter().map(map_dart).collect();
        let labels = idx.iter().map(|&c| q.labels()[c]).collect();
        CurveMap::from_parts(labels, opp, 0).expect("two-edge cut yields spherical factors")
    };
    let u = part(true, [(before_exit, out_exit), (after_entry, in_entry)]);
    let v = part(false, [(in_entry, after_entry), (out_exit, before_exit)]);
    (u, v)
}

type MemberCache = HashMap<usize, Vec<(CanonicalKey, FamilySpec)>>;

fn member_keys(n: usize) -> Vec<(CanonicalKey, FamilySpec)> {
    static CACHE: OnceLock<Mutex<MemberCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("member cache").get(&n) {
        return v.clone();
    }
    let v: Vec<(CanonicalKey, FamilySpec)> = FamilySpec::members_with(n)
        .into_iter()
        .map(|s| (gen_family(&s).expect("family generator").canonical_key(), s))
        .collect();
    cache.lock().expect("member cache").insert(n, v.clone());
    v
}

/// The family member equivalent to `q`, if any.
pub fn match_family(q: &CurveMap) -> Option<FamilySpec> {
    if q.crossing_count() < 3 || q.components() != 1 {
        return None;
    }
    let key = q.canonical_key();
    member_keys(q.crossing_count())
        .into_iter()
        .find(|(k, _)| *k == key)
        .map(|(_, s)| s)
}

/// Classifies a knot projection by the families its RI-reduction falls in.
pub fn classify(p: &CurveMap) -> Result<ClassLabel> {
    let comps = p.components();
    if comps != 1 {
        return Err(Error::MultiComponent(comps));
    }
    let q = reduce_ri(p);
    if q.is_simple_closed_curve() {
        return Ok(ClassLabel::U0);
    }
    let factors = decompose_prime(&q)?;
    let specs: Vec<Option<FamilySpec>> = factors.iter().map(match_family).collect();
    Ok(match specs.as_slice() {
        [Some(s @ FamilySpec::Torus(_))] => ClassLabel::U1(s.clone()),
        [Some(s)] => ClassLabel::U2(s.clone()),
        [Some(a @ FamilySpec::Torus(_)), Some(b @ FamilySpec::Torus(_))] => {
            ClassLabel::U2(FamilySpec::Sum(vec![a.clone(), b.clone()]))
        }
        _ => ClassLabel::UAtLeast3,
    })
}
