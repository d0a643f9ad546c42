//! Oriented link diagrams given as PD codes.
//!
//! A diagram is a list of crossings `X(a,b,c,d)` plus a count of crossingless
//! free loops `O k`. The four slots of a crossing are listed counterclockwise
//! starting from the incoming under-strand edge `a`, so the under-strand runs
//! `a -> c` and the over-strand occupies slots `b` and `d`. Edge labels
//! `1..=edge_count` increase along the orientation of each component, which is
//! how the orientation is encoded.
//!
//! Marker conventions, fixed once for the whole crate:
//!
//! * a **positive** marker smooths the crossing by joining `a<->d` and `b<->c`;
//!   a **negative** marker joins `a<->b` and `c<->d`;
//! * a crossing is **positive** (local writhe `+1`) exactly when the
//!   under-strand direction rotated a quarter turn counterclockwise aligns
//!   with the over-strand direction, i.e. when the over-strand enters at
//!   slot `b`.
//!
//! With slots drawn at compass points (`a` south, `b` east, `c` north, `d`
//! west) the positive marker unites the NE/SW pair of vertical angles, the
//! pair swept when the over-strand line rotates counterclockwise onto the
//! under-strand line.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("edge multiplicity: edge {edge} occurs {count} times, expected 2")]
    EdgeMultiplicity { edge: u32, count: usize },
    #[error("open strand (orientation inconsistency): {0}")]
    OpenStrand(String),
    #[error("crossing index {index} out of range (diagram has {crossings} crossings)")]
    CrossingIndex { index: usize, crossings: usize },
    #[error("illegal move site: {0}")]
    IllegalSite(String),
}

/// One crossing: edge labels counterclockwise from the incoming under-edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub slots: [u32; 4],
}

impl Crossing {
    pub fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        Crossing { slots: [a, b, c, d] }
    }
}

/// A validated oriented link diagram.
///
/// Crossing order is part of the data: the differential sign rule and the
/// skein constructions consume it. All fields are immutable after
/// construction and every operation on diagrams is pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    free_loops: u32,
    edge_count: u32,
    /// Per crossing: true when the over-strand comes in at slot `b`.
    over_in_b: Vec<bool>,
    /// Oriented components as cyclic edge sequences, each starting at its
    /// minimal edge label, ordered by that label.
    components: Vec<Vec<u32>>,
}

impl LinkDiagram {
    /// Validate a list of crossings and a free-loop count.
    pub fn new(crossings: Vec<Crossing>, free_loops: u32) -> Result<Self, DiagramError> {
        // Every edge label occurs exactly twice.
        let mut occ: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (k, x) in crossings.iter().enumerate() {
            for (s, &e) in x.slots.iter().enumerate() {
                if e == 0 {
                    return Err(DiagramError::MalformedToken(format!("edge label {e}")));
                }
                occ.entry(e).or_default().push((k, s));
            }
        }
        for (&e, places) in &occ {
            if places.len() != 2 {
                return Err(DiagramError::EdgeMultiplicity {
                    edge: e,
                    count: places.len(),
                });
            }
        }
        let edge_count = occ.len() as u32;
        if !crossings.is_empty() && occ.keys().last() != Some(&edge_count) {
            return Err(DiagramError::OpenStrand(format!(
                "edge labels must be 1..={edge_count} without gaps"
            )));
        }
        if occ.keys().next().map(|&e| e != 1).unwrap_or(false) {
            return Err(DiagramError::OpenStrand("edge labels must start at 1".into()));
        }

        // Decide, for every slot, whether its edge is incoming. Under-slots
        // are forced (`a` in, `c` out); over-slots propagate through the
        // constraints "b and d are opposite" and "the two occurrences of an
        // edge are opposite".
        let n = crossings.len();
        let mut is_in: Vec<[Option<bool>; 4]> = vec![[None; 4]; n];
        let other = |k: usize, s: usize| -> (usize, usize) {
            let e = crossings[k].slots[s];
            let places = &occ[&e];
            if places[0] == (k, s) {
                places[1]
            } else {
                places[0]
            }
        };
        let mut queue: Vec<(usize, usize, bool)> = Vec::new();
        for k in 0..n {
            queue.push((k, 0, true));
            queue.push((k, 2, false));
        }
        let assign =
            |is_in: &mut Vec<[Option<bool>; 4]>,
             queue: &mut Vec<(usize, usize, bool)>,
             k: usize,
             s: usize,
             v: bool|
             -> Result<(), DiagramError> {
                match is_in[k][s] {
                    Some(old) if old != v => Err(DiagramError::OpenStrand(format!(
                        "edge {} at crossing {} has conflicting orientation",
                        crossings[k].slots[s],
                        k + 1
                    ))),
                    Some(_) => Ok(()),
                    None => {
                        is_in[k][s] = Some(v);
                        queue.push((k, s, v));
                        Ok(())
                    }
                }
            };
        // Numbering fallback for components that never pass under: the
        // over-strand leaves on the successor label, wrapping from the
        // component maximum back to its minimum.
        let mut pending: Vec<usize> = (0..n).collect();
        loop {
            while let Some((k, s, v)) = queue.pop() {
                is_in[k][s] = Some(v);
                if s == 1 || s == 3 {
                    assign(&mut is_in, &mut queue, k, 4 - s, !v)?;
                }
                let (k2, s2) = other(k, s);
                assign(&mut is_in, &mut queue, k2, s2, !v)?;
            }
            pending.retain(|&k| is_in[k][1].is_none());
            match pending.first().copied() {
                None => break,
                Some(k) => {
                    let (b, d) = (crossings[k].slots[1], crossings[k].slots[3]);
                    let b_in = if b == d + 1 {
                        false // d -> b traversal: d incoming
                    } else if d == b + 1 {
                        true
                    } else {
                        b > d // wraparound: larger label is the incoming edge
                    };
                    assign(&mut is_in, &mut queue, k, 1, b_in)?;
                }
            }
        }

        // Successor permutation: each strand consumes its in-edge and emits
        // its out-edge; the cycles are the oriented components.
        let mut succ: BTreeMap<u32, u32> = BTreeMap::new();
        let mut seen_in: BTreeMap<u32, ()> = BTreeMap::new();
        for (k, x) in crossings.iter().enumerate() {
            let over_pairs: [(usize, usize); 1] = if is_in[k][1] == Some(true) {
                [(1, 3)]
            } else {
                [(3, 1)]
            };
            let strands = [(0usize, 2usize), over_pairs[0]];
            for (si, so) in strands {
                let (e_in, e_out) = (x.slots[si], x.slots[so]);
                if succ.insert(e_in, e_out).is_some() || seen_in.insert(e_in, ()).is_some() {
                    return Err(DiagramError::OpenStrand(format!(
                        "edge {e_in} is consumed by two strands"
                    )));
                }
            }
        }
        // Edge numbering must increase along every component, wrapping once.
        let mut components = Vec::new();
        let mut visited: BTreeMap<u32, bool> = BTreeMap::new();
        for &start in occ.keys() {
            if visited.contains_key(&start) {
                continue;
            }
            let mut cyc = Vec::new();
            let mut e = start;
            loop {
                visited.insert(e, true);
                cyc.push(e);
                e = *succ.get(&e).ok_or_else(|| {
                    DiagramError::OpenStrand(format!("edge {e} has no successor"))
                })?;
                if e == start {
                    break;
                }
                if visited.contains_key(&e) {
                    return Err(DiagramError::OpenStrand(format!(
                        "edge {e} revisited before closing its component"
                    )));
                }
            }
            for w in cyc.windows(2) {
                if w[1] != w[0] + 1 {
                    return Err(DiagramError::OpenStrand(format!(
                        "edge {} is followed by edge {}, expected {}",
                        w[0],
                        w[1],
                        w[0] + 1
                    )));
                }
            }
            components.push(cyc);
        }

        let over_in_b = (0..n).map(|k| is_in[k][1] == Some(true)).collect();
        Ok(LinkDiagram {
            crossings,
            free_loops,
            edge_count,
            over_in_b,
            components,
        })
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn free_loops(&self) -> u32 {
        self.free_loops
    }

    pub fn edge_count(&self) -> u32 {
        self.edge_count
    }

    pub fn components(&self) -> &[Vec<u32>] {
        &self.components
    }

    /// True when the over-strand of crossing `k` (0-based) enters at slot `b`.
    pub(crate) fn over_in_b(&self, k: usize) -> bool {
        self.over_in_b[k]
    }

    /// Local writhe of crossing `k` (0-based).
    pub fn crossing_sign(&self, k: usize) -> Result<i64, DiagramError> {
        if k >= self.crossings.len() {
            return Err(DiagramError::CrossingIndex {
                index: k,
                crossings: self.crossings.len(),
            });
        }
        Ok(if self.over_in_b[k] { 1 } else { -1 })
    }

    /// Sum of local writhe numbers over all crossings.
    pub fn writhe(&self) -> i64 {
        (0..self.crossings.len())
            .map(|k| if self.over_in_b[k] { 1 } else { -1 })
            .sum()
    }

    /// The mirror diagram: slots `b` and `d` swapped at every crossing.
    pub fn mirror(&self) -> LinkDiagram {
        let crossings = self
            .crossings
            .iter()
            .map(|x| Crossing::new(x.slots[0], x.slots[3], x.slots[2], x.slots[1]))
            .collect();
        LinkDiagram::new(crossings, self.free_loops).expect("mirror of a valid diagram is valid")
    }

    /// The same diagram with its crossing list reordered by `perm`
    /// (`perm[i]` is the old index of the new crossing `i`).
    pub fn permute_crossings(&self, perm: &[usize]) -> LinkDiagram {
        assert_eq!(perm.len(), self.crossings.len(), "permutation length");
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            assert!(!seen[p], "not a permutation");
            seen[p] = true;
        }
        let crossings = perm.iter().map(|&i| self.crossings[i]).collect();
        LinkDiagram::new(crossings, self.free_loops).expect("permutation preserves validity")
    }

    /// Both occurrences of edge `e` as `(crossing, slot)` pairs.
    pub(crate) fn edge_occurrences(&self, e: u32) -> [(usize, usize); 2] {
        let mut found = [(usize::MAX, usize::MAX); 2];
        let mut idx = 0;
        for (k, x) in self.crossings.iter().enumerate() {
            for (s, &le) in x.slots.iter().enumerate() {
                if le == e {
                    found[idx] = (k, s);
                    idx += 1;
                }
            }
        }
        debug_assert_eq!(idx, 2);
        found
    }
}

/// Parse one diagram from one PD line.
///
/// Grammar: whitespace-separated tokens, each `X(a,b,c,d)` with positive
/// integers or `O k` for `k` crossingless free loops. `#` starts a comment.
pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    let text = match text.find('#') {
        Some(pos) => &text[..pos],
        None => text,
    };
    let mut crossings = Vec::new();
    let mut free_loops: u32 = 0;
    let mut tokens = text.split_whitespace().peekable();
    while let Some(tok) = tokens.next() {
        if tok == "O" {
            let k = tokens
                .next()
                .ok_or_else(|| DiagramError::MalformedToken("O".into()))?;
            let k: u32 = k
                .parse()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| DiagramError::MalformedToken(format!("O {k}")))?;
            free_loops += k;
        } else if let Some(body) = tok.strip_prefix("X(").and_then(|t| t.strip_suffix(')')) {
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 4 {
                return Err(DiagramError::MalformedToken(tok.into()));
            }
            let mut slots = [0u32; 4];
            for (i, p) in parts.iter().enumerate() {
                slots[i] = p
                    .parse()
                    .ok()
                    .filter(|&e| e >= 1)
                    .ok_or_else(|| DiagramError::MalformedToken(tok.into()))?;
            }
            crossings.push(Crossing { slots });
        } else {
            return Err(DiagramError::MalformedToken(tok.into()));
        }
    }
    LinkDiagram::new(crossings, free_loops)
}

/// One marker sign per crossing, indexed by crossing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkerVector(pub Vec<i8>);

impl MarkerVector {
    pub fn all_positive(n: usize) -> Self {
        MarkerVector(vec![1; n])
    }

    pub fn sign(&self, k: usize) -> i8 {
        self.0[k]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of positive markers minus number of negative markers.
    pub fn sigma(&self) -> i64 {
        self.0.iter().map(|&m| m as i64).sum()
    }

    pub fn flipped(&self, k: usize) -> Self {
        let mut m = self.clone();
        m.0[k] = -m.0[k];
        m
    }
}

impl fmt::Display for MarkerVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &m in &self.0 {
            write!(f, "{}", if m > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

/// Canonical identifier of a circle of a smoothing: the minimal edge label it
/// contains, or a reserved identifier for a crossingless free loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CircleId {
    Edge(u32),
    FreeLoop(u32),
}

/// The circles of the smoothing `D_s` determined by a marker vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleSet {
    /// Sorted by canonical identifier.
    circles: Vec<(CircleId, Vec<u32>)>,
    /// Edge label (1-based) to index into `circles`.
    edge_circle: Vec<usize>,
}

impl CircleSet {
    /// Number of circles `|s|`.
    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = CircleId> + '_ {
        self.circles.iter().map(|(id, _)| *id)
    }

    pub fn circles(&self) -> &[(CircleId, Vec<u32>)] {
        &self.circles
    }

    /// Index (in canonical order) of the circle containing edge `e`.
    pub fn circle_of_edge(&self, e: u32) -> usize {
        self.edge_circle[(e - 1) as usize]
    }

    pub fn id_of_edge(&self, e: u32) -> CircleId {
        self.circles[self.circle_of_edge(e)].0
    }
}

/// Smooth every crossing of `d` according to the markers and return the
/// circle decomposition. Positive markers join `a<->d` and `b<->c`.
pub fn resolve_state(d: &LinkDiagram, m: &MarkerVector) -> CircleSet {
    assert_eq!(m.len(), d.crossing_count(), "one marker per crossing");
    let ne = d.edge_count() as usize;
    let mut uf = UnionFind::new(ne);
    for (k, x) in d.crossings().iter().enumerate() {
        let pairs: [(usize, usize); 2] = if m.sign(k) > 0 {
            [(0, 3), (1, 2)]
        } else {
            [(0, 1), (2, 3)]
        };
        for (s1, s2) in pairs {
            uf.union((x.slots[s1] - 1) as usize, (x.slots[s2] - 1) as usize);
        }
    }
    let mut groups: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for e in 0..ne {
        groups.entry(uf.find(e)).or_default().push(e as u32 + 1);
    }
    let mut circles: Vec<(CircleId, Vec<u32>)> = groups
        .into_values()
        .map(|edges| (CircleId::Edge(edges[0]), edges))
        .collect();
    for l in 0..d.free_loops() {
        circles.push((CircleId::FreeLoop(l), Vec::new()));
    }
    circles.sort_by_key(|(id, _)| *id);
    let mut edge_circle = vec![usize::MAX; ne];
    for (i, (_, edges)) in circles.iter().enumerate() {
        for &e in edges {
            edge_circle[(e - 1) as usize] = i;
        }
    }
    CircleSet { circles, edge_circle }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Attach the larger root to the smaller so the minimal edge
            // stays the representative.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// A face of the diagram (a complementary region), as the set of
/// `(crossing, slot)` darts its boundary walk departs through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<(usize, usize)>,
}

impl Face {
    pub fn edges(&self, d: &LinkDiagram) -> Vec<u32> {
        self.darts
            .iter()
            .map(|&(k, s)| d.crossings()[k].slots[s])
            .collect()
    }
}

/// Enumerate the faces of the diagram from its rotation system.
///
/// The walk leaving crossing `k` through the edge in slot `s` arrives at the
/// other end `(k', s')` and continues through slot `s' + 1`; orbits of this
/// step are the complementary regions. Free loops do not contribute darts.
pub fn faces(d: &LinkDiagram) -> Vec<Face> {
    let n = d.crossing_count();
    let mut seen = vec![[false; 4]; n];
    let mut out = Vec::new();
    for k0 in 0..n {
        for s0 in 0..4 {
            if seen[k0][s0] {
                continue;
            }
            let mut darts = Vec::new();
            let (mut k, mut s) = (k0, s0);
            loop {
                seen[k][s] = true;
                darts.push((k, s));
                let e = d.crossings()[k].slots[s];
                let occ = d.edge_occurrences(e);
                let (k2, s2) = if occ[0] == (k, s) { occ[1] } else { occ[0] };
                k = k2;
                s = (s2 + 1) % 4;
                if (k, s) == (k0, s0) {
                    break;
                }
            }
            out.push(Face { darts });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    pub(crate) const HOPF: &str = "X(1,3,2,4) X(3,1,4,2)";

    #[test]
    fn parse_trefoil() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.edge_count(), 6);
        assert_eq!(d.free_loops(), 0);
        assert_eq!(d.components().len(), 1);
    }

    #[test]
    fn parse_free_loops() {
        let d = parse_pd("O 1").unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.free_loops(), 1);
        let d = parse_pd("O 2 # two-component unlink").unwrap();
        assert_eq!(d.free_loops(), 2);
    }

    #[test]
    fn parse_rejects_edge_multiplicity() {
        // edge 5 occurs once
        let err = parse_pd("X(1,4,2,5) X(3,6,4,1)").unwrap_err();
        assert!(matches!(err, DiagramError::EdgeMultiplicity { .. }));
    }

    #[test]
    fn parse_rejects_malformed_tokens() {
        assert!(matches!(
            parse_pd("X(1,2,3)"),
            Err(DiagramError::MalformedToken(_))
        ));
        assert!(matches!(
            parse_pd("Y(1,2,3,4)"),
            Err(DiagramError::MalformedToken(_))
        ));
        assert!(matches!(parse_pd("O x"), Err(DiagramError::MalformedToken(_))));
    }

    #[test]
    fn parse_rejects_open_strand() {
        // Edge 1 is followed by edge 3: numbering does not trace the strand.
        assert!(matches!(
            parse_pd("X(1,3,3,2) X(2,4,4,1)"),
            Err(DiagramError::OpenStrand(_))
        ));
    }

    #[test]
    fn trefoil_signs_and_writhe() {
        let d = parse_pd(TREFOIL).unwrap();
        for k in 0..3 {
            assert_eq!(d.crossing_sign(k).unwrap(), 1);
        }
        assert_eq!(d.writhe(), 3);
        let m = d.mirror();
        for k in 0..3 {
            assert_eq!(m.crossing_sign(k).unwrap(), -1);
        }
        assert_eq!(m.writhe(), -3);
    }

    #[test]
    fn kink_signs() {
        let pos = parse_pd("X(1,2,2,1)").unwrap();
        assert_eq!(pos.writhe(), 1);
        let neg = parse_pd("X(1,1,2,2)").unwrap();
        assert_eq!(neg.writhe(), -1);
    }

    #[test]
    fn zero_crossing_writhe() {
        assert_eq!(parse_pd("O 1").unwrap().writhe(), 0);
    }

    #[test]
    fn trefoil_smoothings() {
        let d = parse_pd(TREFOIL).unwrap();
        let all_plus = resolve_state(&d, &MarkerVector(vec![1, 1, 1]));
        assert_eq!(all_plus.len(), 2);
        let all_minus = resolve_state(&d, &MarkerVector(vec![-1, -1, -1]));
        assert_eq!(all_minus.len(), 3);
    }

    #[test]
    fn hopf_smoothings() {
        let d = parse_pd(HOPF).unwrap();
        assert_eq!(d.writhe(), -2);
        assert_eq!(resolve_state(&d, &MarkerVector(vec![1, 1])).len(), 2);
        assert_eq!(resolve_state(&d, &MarkerVector(vec![1, -1])).len(), 1);
        assert_eq!(resolve_state(&d, &MarkerVector(vec![-1, 1])).len(), 1);
        assert_eq!(resolve_state(&d, &MarkerVector(vec![-1, -1])).len(), 2);
    }

    #[test]
    fn free_loops_are_singleton_circles() {
        let d = parse_pd("X(1,2,2,1) O 2").unwrap();
        let cs = resolve_state(&d, &MarkerVector(vec![1]));
        assert_eq!(cs.len(), 4); // two kink circles + two free loops
        let ids: Vec<_> = cs.ids().collect();
        assert_eq!(
            ids,
            vec![
                CircleId::Edge(1),
                CircleId::Edge(2),
                CircleId::FreeLoop(0),
                CircleId::FreeLoop(1)
            ]
        );
    }

    #[test]
    fn resolve_is_deterministic() {
        let d = parse_pd(TREFOIL).unwrap();
        let m = MarkerVector(vec![1, -1, 1]);
        assert_eq!(resolve_state(&d, &m), resolve_state(&d, &m));
    }

    #[test]
    fn faces_satisfy_euler_formula() {
        for pd in [TREFOIL, HOPF, "X(1,2,2,1)", "X(1,1,2,2)"] {
            let d = parse_pd(pd).unwrap();
            let v = d.crossing_count() as i64;
            let e = 2 * v;
            let f = faces(&d).len() as i64;
            assert_eq!(v - e + f, 2, "sphere Euler count for {pd}");
        }
    }

    #[test]
    fn permute_crossings_keeps_writhe() {
        let d = parse_pd(TREFOIL).unwrap();
        let p = d.permute_crossings(&[2, 0, 1]);
        assert_eq!(p.writhe(), 3);
        assert_eq!(p.crossings()[0], d.crossings()[2]);
    }
}
