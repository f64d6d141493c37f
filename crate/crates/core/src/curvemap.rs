//! Knot and link projections on the sphere as 4-valent combinatorial maps.
//!
//! A crossing owns four darts, numbered `4 * crossing + slot`, with the slots
//! in counterclockwise order. `opp` pairs darts into edges. A strand passing
//! through a crossing enters at slot `k` and leaves at slot `k + 2 (mod 4)`.
//! Faces are the orbits of `d -> rot(opp(d))` where `rot` steps to the next
//! counterclockwise slot; each face lies to the right of the directed edges
//! `d -> opp(d)` on its boundary.
//!
//! Crossingless components are kept as a counter (`free_circles`); their
//! placement among the faces is not tracked.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Local crossing sense recorded in a signed Gauss code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Double-occurrence words with per-crossing signs, plus crossingless circles.
///
/// Text form: tokens `<label><sign>` separated by whitespace, components
/// separated by `|`, and a bare `O` for each crossingless circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGaussCode {
    pub components: Vec<Vec<(String, Sign)>>,
    pub free_circles: usize,
}

impl SignedGaussCode {
    /// Parses one code line (without a record name).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::EmptyCode);
        }
        let mut components = Vec::new();
        let mut free_circles = 0;
        for part in text.split('|') {
            let part = part.trim();
            if part == "O" {
                free_circles += 1;
                continue;
            }
            if part.is_empty() {
                return Err(Error::MalformedToken("|".into()));
            }
            let mut word = Vec::new();
            for tok in part.split_whitespace() {
                word.push(parse_token(tok)?);
            }
            components.push(word);
        }
        let code = SignedGaussCode { components, free_circles };
        code.validate()?;
        Ok(code)
    }

    /// Checks the double-occurrence and sign-consistency invariants.
    pub fn validate(&self) -> Result<()> {
        let mut seen: HashMap<&str, (usize, Sign)> = HashMap::new();
        let mut order = Vec::new();
        for (label, sign) in self.components.iter().flatten() {
            match seen.get_mut(label.as_str()) {
                Some((count, s)) => {
                    *count += 1;
                    if *s != *sign {
                        return Err(Error::InconsistentSign(label.clone()));
                    }
                }
                None => {
                    seen.insert(label, (1, *sign));
                    order.push(label.as_str());
                }
            }
        }
        for label in order {
            let count = seen[label].0;
            if count != 2 {
                return Err(Error::LabelCount { label: label.to_string(), count });
            }
        }
        if self.components.is_empty() && self.free_circles == 0 {
            return Err(Error::EmptyCode);
        }
        Ok(())
    }

    pub fn crossing_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Same code with every sign flipped (the mirror projection).
    pub fn mirror(&self) -> Self {
        SignedGaussCode {
            components: self
                .components
                .iter()
                .map(|w| w.iter().map(|(l, s)| (l.clone(), s.flip())).collect())
                .collect(),
            free_circles: self.free_circles,
        }
    }
}

fn parse_token(tok: &str) -> Result<(String, Sign)> {
    let (label, sign) = match tok.chars().last() {
        Some('+') => (&tok[..tok.len() - 1], Sign::Plus),
        Some('-') => (&tok[..tok.len() - 1], Sign::Minus),
        _ => return Err(Error::MalformedToken(tok.to_string())),
    };
    if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::MalformedToken(tok.to_string()));
    }
    Ok((label.to_string(), sign))
}

impl fmt::Display for SignedGaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .components
            .iter()
            .map(|w| {
                w.iter()
                    .map(|(l, s)| format!("{l}{}", s.as_char()))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        parts.extend(std::iter::repeat_n("O".to_string(), self.free_circles));
        write!(f, "{}", parts.join(" | "))
    }
}

impl FromStr for SignedGaussCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SignedGaussCode::parse(s)
    }
}

/// Parses a `name: tokens` record. Blank lines and `#` comments yield `None`.
pub fn parse_record(line: &str) -> Result<Option<(String, SignedGaussCode)>> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let line = line.trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (name, rest) = line
        .split_once(':')
        .ok_or_else(|| Error::MalformedToken(line.to_string()))?;
    let name = name.trim();
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::MalformedToken(name.to_string()));
    }
    Ok(Some((name.to_string(), SignedGaussCode::parse(rest)?)))
}

/// Which pairs of slots a smoothing joins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pairing {
    /// Slots 0-1 and 2-3.
    ZeroOne,
    /// Slots 0-3 and 1-2.
    ZeroThree,
}

impl Pairing {
    #[inline]
    pub fn mate(self, slot: u32) -> u32 {
        match self {
            Pairing::ZeroOne => slot ^ 1,
            Pairing::ZeroThree => 3 - slot,
        }
    }

    pub fn other(self) -> Pairing {
        match self {
            Pairing::ZeroOne => Pairing::ZeroThree,
            Pairing::ZeroThree => Pairing::ZeroOne,
        }
    }

    /// The pairing that joins the two adjacent slots `a` and `b`.
    pub fn joining(a: u32, b: u32) -> Pairing {
        debug_assert!((a + 1) % 4 == b || (b + 1) % 4 == a);
        if a ^ 1 == b {
            Pairing::ZeroOne
        } else {
            Pairing::ZeroThree
        }
    }
}

/// A dart addressed by crossing label and slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DartRef {
    pub label: u32,
    pub slot: u8,
}

impl fmt::Display for DartRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.label, self.slot)
    }
}

impl FromStr for DartRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDart(s.to_string());
        let (l, sl) = s.split_once('.').ok_or_else(bad)?;
        let label = l.parse().map_err(|_| bad())?;
        let slot: u8 = sl.parse().map_err(|_| bad())?;
        if slot > 3 {
            return Err(bad());
        }
        Ok(DartRef { label, slot })
    }
}

#[inline]
pub(crate) fn rot(d: u32) -> u32 {
    (d & !3) | ((d + 1) & 3)
}

#[inline]
pub(crate) fn rot_inv(d: u32) -> u32 {
    (d & !3) | ((d + 3) & 3)
}

/// One face of a projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Number of corners (edges) on the boundary.
    pub gon: usize,
    /// `(crossing label, slot)` of the dart leaving each corner, in boundary order.
    pub corners: Vec<(u32, u8)>,
    /// Dart indices of the face orbit.
    pub darts: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceReport {
    pub faces: Vec<Face>,
    pub free_circles: usize,
}

impl FaceReport {
    /// Sorted gon counts.
    pub fn gon_multiset(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.faces.iter().map(|f| f.gon).collect();
        v.sort_unstable();
        v
    }
}

/// Canonical form of a map up to relabeling, sphere homeomorphism and mirror image.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    /// The key of the simple closed curve.
    pub fn simple_closed_curve() -> Self {
        CurveMap::simple_closed_curve().canonical_key()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// A projection as a 4-valent combinatorial map on the sphere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveMap {
    labels: Vec<u32>,
    opp: Vec<u32>,
    free_circles: u32,
}

impl CurveMap {
    /// The simple closed curve `O`.
    pub fn simple_closed_curve() -> Self {
        CurveMap { labels: Vec::new(), opp: Vec::new(), free_circles: 1 }
    }

    /// Builds a map from raw parts, checking every structural invariant.
    pub fn from_parts(labels: Vec<u32>, opp: Vec<u32>, free_circles: u32) -> Result<Self> {
        let m = CurveMap { labels, opp, free_circles };
        m.check_structure()?;
        m.check_spherical()?;
        Ok(m)
    }

    pub(crate) fn from_parts_unchecked(labels: Vec<u32>, opp: Vec<u32>, free_circles: u32) -> Self {
        let m = CurveMap { labels, opp, free_circles };
        debug_assert!(m.check_structure().is_ok());
        debug_assert!(m.check_spherical().is_ok(), "non-spherical map {m:?}");
        m
    }

    fn check_structure(&self) -> Result<()> {
        let nd = self.opp.len();
        if nd != 4 * self.labels.len() {
            return Err(Error::InvalidDart("dart count is not 4n".into()));
        }
        for (d, &o) in self.opp.iter().enumerate() {
            if o as usize >= nd || o as usize == d || self.opp[o as usize] as usize != d {
                return Err(Error::InvalidDart(format!("opp is not a fixed-point-free involution at {d}")));
            }
        }
        let mut ls = self.labels.clone();
        ls.sort_unstable();
        ls.dedup();
        if ls.len() != self.labels.len() {
            return Err(Error::InvalidDart("duplicate crossing labels".into()));
        }
        Ok(())
    }

    fn check_spherical(&self) -> Result<()> {
        let parts = self.connected_crossing_sets().len() as i64;
        let v = self.labels.len() as i64;
        let e = 2 * v;
        let f = self.face_orbits_with(rot).len() as i64;
        let euler = v - e + f;
        if euler != 2 * parts {
            return Err(Error::NotRealizable { euler, expected: 2 * parts });
        }
        Ok(())
    }

    /// Realizes a signed code on the sphere.
    ///
    /// The first visit of a crossing enters at slot 0. The second visit enters
    /// at slot 1 or slot 3. Slot 1 is used for `+` when the first visit sits
    /// at an even position of its component word and for `-` otherwise, so the
    /// sign is the crossing sense of the alternating diagram on the projection.
    /// Labels are renumbered `1..=n` in order of first appearance.
    pub fn build(code: &SignedGaussCode) -> Result<Self> {
        code.validate()?;
        let mut index: HashMap<&str, u32> = HashMap::new();
        let mut next = 0u32;
        for (label, _) in code.components.iter().flatten() {
            if !index.contains_key(label.as_str()) {
                index.insert(label, next);
                next += 1;
            }
        }
        let n = next as usize;
        let mut opp = vec![u32::MAX; 4 * n];
        let mut first_odd: Vec<Option<bool>> = vec![None; n];
        for word in &code.components {
            // (entry dart, exit dart) for each visit
            let mut passes = Vec::with_capacity(word.len());
            for (pos, (label, sign)) in word.iter().enumerate() {
                let c = index[label.as_str()] as usize;
                let entry = match first_odd[c] {
                    None => {
                        first_odd[c] = Some(pos % 2 == 1);
                        0
                    }
                    Some(odd) => {
                        if (*sign == Sign::Plus) != odd {
                            1
                        } else {
                            3
                        }
                    }
                };
                let c = c as u32;
                passes.push((4 * c + entry, 4 * c + (entry ^ 2)));
            }
            for i in 0..passes.len() {
                let exit = passes[i].1;
                let entry = passes[(i + 1) % passes.len()].0;
                opp[exit as usize] = entry;
                opp[entry as usize] = exit;
            }
        }
        let labels = (1..=n as u32).collect();
        CurveMap::from_parts(labels, opp, code.free_circles as u32)
    }

    /// Parses and builds in one step.
    pub fn from_code_str(text: &str) -> Result<Self> {
        CurveMap::build(&SignedGaussCode::parse(text)?)
    }

    /// Serializes the map as a signed code using its crossing labels.
    pub fn extract_code(&self) -> SignedGaussCode {
        let n = self.crossing_count();
        let mut components = Vec::new();
        // (crossing, entry slot, position parity) of the first visit
        let mut first: Vec<Option<(u32, bool)>> = vec![None; n];
        let mut sign = vec![Sign::Plus; n];
        let mut words: Vec<Vec<usize>> = Vec::new();
        for orbit in self.strands() {
            let mut word = Vec::with_capacity(orbit.len());
            // orbit holds exit darts; the pass through the crossing of orbit[k]
            // comes first, so the entry of that pass is orbit[k] ^ 2
            for (pos, &exit) in orbit.iter().enumerate() {
                let c = (exit / 4) as usize;
                let e = (exit ^ 2) % 4;
                match first[c] {
                    None => first[c] = Some((e, pos % 2 == 1)),
                    Some((e1, odd)) => {
                        let slot1 = (e + 4 - e1) % 4 == 1;
                        sign[c] = if slot1 != odd { Sign::Plus } else { Sign::Minus };
                    }
                }
                word.push(c);
            }
            words.push(word);
        }
        for w in &words {
            components.push(w.iter().map(|&c| (self.labels[c].to_string(), sign[c])).collect());
        }
        SignedGaussCode { components, free_circles: self.free_circles as usize }
    }

    pub fn crossing_count(&self) -> usize {
        self.labels.len()
    }

    pub fn free_circles(&self) -> usize {
        self.free_circles as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn max_label(&self) -> u32 {
        self.labels.iter().copied().max().unwrap_or(0)
    }


    #[inline]
    pub fn opp(&self, d: u32) -> u32 {
        self.opp[d as usize]
    }

    pub fn dart_count(&self) -> usize {
        self.opp.len()
    }

    pub fn is_simple_closed_curve(&self) -> bool {
        self.labels.is_empty() && self.free_circles == 1
    }

    /// Index of the crossing carrying `label`.
    pub fn crossing_index(&self, label: u32) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownCrossing(label))
    }

    pub fn dart(&self, r: DartRef) -> Result<u32> {
        let c = self.crossing_index(r.label)?;
        Ok(4 * c as u32 + r.slot as u32)
    }

    pub fn dart_ref(&self, d: u32) -> DartRef {
        DartRef { label: self.labels[(d / 4) as usize], slot: (d % 4) as u8 }
    }

    pub(crate) fn face_orbits_with(&self, r: fn(u32) -> u32) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.opp.len()];
        let mut faces = Vec::new();
        for s in 0..self.opp.len() as u32 {
            if seen[s as usize] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = s;
            while !seen[d as usize] {
                seen[d as usize] = true;
                face.push(d);
                d = r(self.opp[d as usize]);
            }
            faces.push(face);
        }
        faces
    }

    /// Face orbits as dart lists.
    pub fn face_orbits(&self) -> Vec<Vec<u32>> {
        self.face_orbits_with(rot)
    }

    /// For each dart, the index of its face in [`Self::face_orbits`].
    pub fn face_index(&self) -> (Vec<Vec<u32>>, Vec<usize>) {
        let faces = self.face_orbits();
        let mut idx = vec![0; self.opp.len()];
        for (i, f) in faces.iter().enumerate() {
            for &d in f {
                idx[d as usize] = i;
            }
        }
        (faces, idx)
    }

    pub fn faces(&self) -> FaceReport {
        let faces = self
            .face_orbits()
            .into_iter()
            .map(|darts| Face {
                gon: darts.len(),
                corners: darts
                    .iter()
                    .map(|&d| (self.labels[(d / 4) as usize], (d % 4) as u8))
                    .collect(),
                darts,
            })
            .collect();
        FaceReport { faces, free_circles: self.free_circles as usize }
    }

    /// Traversal orbits as sequences of exit darts, one per direction-free component.
    pub fn strands(&self) -> Vec<Vec<u32>> {
        let mut used = vec![false; self.opp.len()];
        let mut out = Vec::new();
        for start in 0..self.opp.len() as u32 {
            if used[start as usize] {
                continue;
            }
            let mut orbit = Vec::new();
            let first = start ^ 2;
            let mut exit = first;
            loop {
                let entry = self.opp[exit as usize];
                used[exit as usize] = true;
                used[entry as usize] = true;
                orbit.push(exit);
                exit = entry ^ 2;
                if exit == first {
                    break;
                }
            }
            out.push(orbit);
        }
        out
    }

    /// Number of closed curves, crossingless circles included.
    pub fn components(&self) -> usize {
        self.strands().len() + self.free_circles as usize
    }

    /// For every crossing, the entry slots of its two passes in traversal order.
    ///
    /// Each component is oriented so that its smallest unvisited dart is an entry.
    pub fn entry_slots(&self) -> Vec<[u32; 2]> {
        let n = self.crossing_count();
        let mut entries = vec![[u32::MAX; 2]; n];
        for orbit in self.strands() {
            for exit in orbit {
                let entry = self.opp[exit as usize];
                let c = (entry / 4) as usize;
                let e = &mut entries[c];
                if e[0] == u32::MAX {
                    e[0] = entry % 4;
                } else {
                    e[1] = entry % 4;
                }
            }
        }
        entries
    }

    /// The orientation-respecting smoothing at each crossing.
    pub fn oriented_pairings(&self) -> Vec<Pairing> {
        self.entry_slots()
            .into_iter()
            .map(|[e1, e2]| Pairing::joining(e1, (e2 + 2) % 4))
            .collect()
    }

    /// Crossing sets of the connected pieces of the underlying 4-valent graph.
    pub fn connected_crossing_sets(&self) -> Vec<Vec<usize>> {
        let n = self.crossing_count();
        let mut comp = vec![usize::MAX; n];
        let mut sets = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = sets.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut set = Vec::new();
            while let Some(c) = stack.pop() {
                set.push(c);
                for k in 0..4 {
                    let o = (self.opp[4 * c + k] / 4) as usize;
                    if comp[o] == usize::MAX {
                        comp[o] = id;
                        stack.push(o);
                    }
                }
            }
            set.sort_unstable();
            sets.push(set);
        }
        sets
    }

    /// Splits into connected sub-maps (no free circles) plus the free-circle count.
    pub fn split_connected(&self) -> (Vec<CurveMap>, usize) {
        let sets = self.connected_crossing_sets();
        if sets.len() <= 1 && self.free_circles == 0 {
            return (vec![self.clone()], 0);
        }
        let parts = sets.iter().map(|set| self.restrict(set)).collect();
        (parts, self.free_circles as usize)
    }

    /// The sub-map on a union of connected pieces (crossing indices).
    fn restrict(&self, set: &[usize]) -> CurveMap {
        let mut new_index = vec![u32::MAX; self.crossing_count()];
        for (i, &c) in set.iter().enumerate() {
            new_index[c] = i as u32;
        }
        let map_dart = |d: u32| 4 * new_index[(d / 4) as usize] + d % 4;
        let mut opp = Vec::with_capacity(4 * set.len());
        for &c in set {
            for k in 0..4 {
                opp.push(map_dart(self.opp[4 * c + k]));
            }
        }
        let labels = set.iter().map(|&c| self.labels[c]).collect();
        CurveMap::from_parts_unchecked(labels, opp, 0)
    }

    /// Removes crossing `c`, reconnecting its four edge-ends by `pairing`.
    ///
    /// Any closed loop left without crossings becomes a free circle.
    pub fn smooth_index(&self, c: usize, pairing: Pairing) -> CurveMap {
        let base = 4 * c as u32;
        let is_internal = |d: u32| d / 4 == c as u32;
        let mut opp = self.opp.clone();
        let mut visited = [false; 4];
        for s in 0..4u32 {
            if visited[s as usize] {
                continue;
            }
            let p = self.opp[(base + s) as usize];
            if is_internal(p) {
                continue;
            }
            let mut cur = s;
            loop {
                visited[cur as usize] = true;
                let t = pairing.mate(cur);
                visited[t as usize] = true;
                let q = self.opp[(base + t) as usize];
                if !is_internal(q) {
                    opp[p as usize] = q;
                    opp[q as usize] = p;
                    break;
                }
                cur = q % 4;
            }
        }
        let mut free = self.free_circles;
        for s in 0..4u32 {
            if visited[s as usize] {
                continue;
            }
            let mut cur = s;
            while !visited[cur as usize] {
                visited[cur as usize] = true;
                let t = pairing.mate(cur);
                visited[t as usize] = true;
                cur = self.opp[(base + t) as usize] % 4;
            }
            free += 1;
        }
        let remap = |d: u32| if d / 4 > c as u32 { d - 4 } else { d };
        let mut new_opp = Vec::with_capacity(opp.len() - 4);
        for (d, &o) in opp.iter().enumerate() {
            if d / 4 == c {
                continue;
            }
            new_opp.push(remap(o));
        }
        let mut labels = self.labels.clone();
        labels.remove(c);
        CurveMap::from_parts_unchecked(labels, new_opp, free)
    }

    /// Appends a crossing with the given label; its darts are left unpaired.
    pub(crate) fn push_crossing(labels: &mut Vec<u32>, opp: &mut Vec<u32>, label: u32) -> u32 {
        let c = labels.len() as u32;
        labels.push(label);
        opp.extend_from_slice(&[u32::MAX; 4]);
        c
    }

    pub(crate) fn into_parts(self) -> (Vec<u32>, Vec<u32>, u32) {
        (self.labels, self.opp, self.free_circles)
    }

    /// Same map with labels replaced.
    pub fn relabeled(&self, f: impl Fn(u32) -> u32) -> CurveMap {
        CurveMap {
            labels: self.labels.iter().map(|&l| f(l)).collect(),
            opp: self.opp.clone(),
            free_circles: self.free_circles,
        }
    }

    /// Labels renumbered `1..=n` in crossing-index order.
    pub fn with_dense_labels(&self) -> CurveMap {
        CurveMap {
            labels: (1..=self.labels.len() as u32).collect(),
            opp: self.opp.clone(),
            free_circles: self.free_circles,
        }
    }

    /// The mirror image (reverses the cyclic order at every crossing).
    pub fn mirror(&self) -> CurveMap {
        let swap = |d: u32| match d % 4 {
            1 => d + 2,
            3 => d - 2,
            _ => d,
        };
        let mut opp = vec![0; self.opp.len()];
        for (d, &o) in self.opp.iter().enumerate() {
            opp[swap(d as u32) as usize] = swap(o);
        }
        CurveMap { labels: self.labels.clone(), opp, free_circles: self.free_circles }
    }

    /// Crossing indices in the order visited by the single traversal, both visits.
    pub fn traversal_word(&self) -> Result<Vec<usize>> {
        let strands = self.strands();
        if strands.len() != 1 || self.free_circles != 0 {
            return Err(Error::MultiComponent(self.components()));
        }
        Ok(strands[0].iter().map(|&d| (d / 4) as usize).collect())
    }

    /// True iff the visits of `c1` and `c2` alternate along the traversal.
    pub fn interleaved(&self, c1: u32, c2: u32) -> Result<bool> {
        if c1 == c2 {
            return Err(Error::IdenticalCrossings);
        }
        let i1 = self.crossing_index(c1)?;
        let i2 = self.crossing_index(c2)?;
        let word = self.traversal_word()?;
        let pattern: Vec<usize> = word.into_iter().filter(|&c| c == i1 || c == i2).collect();
        Ok(pattern[0] != pattern[1] && pattern[1] != pattern[2])
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        let mut bytes = Vec::new();
        push_u16(&mut bytes, self.free_circles as usize);
        let sets = self.connected_crossing_sets();
        let codes: Vec<Vec<u16>> = if sets.len() == 1 {
            vec![min_code(&self.opp, 0)]
        } else {
            let mut v: Vec<Vec<u16>> =
                sets.iter().map(|s| min_code(&self.opp, 4 * s[0] as u32)).collect();
            v.sort();
            v
        };
        push_u16(&mut bytes, codes.len());
        for code in codes {
            push_u16(&mut bytes, code.len());
            for x in code {
                push_u16(&mut bytes, x as usize);
            }
        }
        CanonicalKey(bytes)
    }

    pub fn equivalent(&self, other: &CurveMap) -> bool {
        self.crossing_count() == other.crossing_count()
            && self.free_circles == other.free_circles
            && self.canonical_key() == other.canonical_key()
    }
}

fn push_u16(out: &mut Vec<u8>, x: usize) {
    out.extend_from_slice(&(x as u16).to_be_bytes());
}

/// Collects the darts of the connected piece containing `seed`.
fn piece_darts(opp: &[u32], seed: u32) -> Vec<u32> {
    let mut seen_c = std::collections::HashSet::new();
    let mut stack = vec![seed / 4];
    seen_c.insert(seed / 4);
    let mut darts = Vec::new();
    while let Some(c) = stack.pop() {
        for k in 0..4 {
            let d = 4 * c + k;
            darts.push(d);
            let o = opp[d as usize] / 4;
            if seen_c.insert(o) {
                stack.push(o);
            }
        }
    }
    darts.sort_unstable();
    darts
}

/// Per-dart invariant used to restrict candidate start darts: sizes of the
/// faces on both sides of the dart's edge under the given rotation.
fn start_invariants(opp: &[u32], darts: &[u32], r: fn(u32) -> u32) -> HashMap<u32, (u32, u32)> {
    let mut face_size: HashMap<u32, u32> = HashMap::with_capacity(darts.len());
    for &s in darts {
        if face_size.contains_key(&s) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut d = s;
        loop {
            orbit.push(d);
            d = r(opp[d as usize]);
            if d == s {
                break;
            }
        }
        let len = orbit.len() as u32;
        for d in orbit {
            face_size.insert(d, len);
        }
    }
    darts
        .iter()
        .map(|&d| (d, (face_size[&d], face_size[&r(d)])))
        .collect()
}

/// Lexicographically least discovery code of a connected piece over every
/// start dart and both orientations.
fn min_code(opp: &[u32], seed: u32) -> Vec<u16> {
    let darts = piece_darts(opp, seed);
    let nd = opp.len();
    let mut label = vec![u32::MAX; nd];
    let mut order: Vec<u32> = Vec::with_capacity(darts.len());
    let mut best: Vec<u16> = Vec::new();
    let mut cur: Vec<u16> = Vec::with_capacity(2 * darts.len());

    let rots: [fn(u32) -> u32; 2] = [rot, rot_inv];
    let invs: Vec<HashMap<u32, (u32, u32)>> =
        rots.iter().map(|&r| start_invariants(opp, &darts, r)).collect();
    let min_inv = invs
        .iter()
        .flat_map(|m| m.values().copied())
        .min()
        .unwrap_or((0, 0));

    for (ri, &r) in rots.iter().enumerate() {
        for &s in &darts {
            if invs[ri][&s] != min_inv {
                continue;
            }
            for &d in &order {
                label[d as usize] = u32::MAX;
            }
            order.clear();
            cur.clear();
            label[s as usize] = 0;
            order.push(s);
            let mut cmp = if best.is_empty() {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Equal
            };
            let mut i = 0;
            let mut aborted = false;
            while i < order.len() {
                let d = order[i];
                for x in [opp[d as usize], r(d)] {
                    if label[x as usize] == u32::MAX {
                        label[x as usize] = order.len() as u32;
                        order.push(x);
                    }
                    let v = label[x as usize] as u16;
                    if cmp == std::cmp::Ordering::Equal {
                        let pos = cur.len();
                        cmp = v.cmp(&best[pos]);
                        if cmp == std::cmp::Ordering::Greater {
                            aborted = true;
                            break;
                        }
                    }
                    cur.push(v);
                }
                if aborted {
                    break;
                }
                i += 1;
            }
            if !aborted && cmp == std::cmp::Ordering::Less {
                std::mem::swap(&mut best, &mut cur);
            }
        }
    }
    for &d in &order {
        label[d as usize] = u32::MAX;
    }
    best
}
