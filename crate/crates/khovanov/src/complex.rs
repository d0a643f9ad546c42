//! The Khovanov chain complex of a diagram: bigraded generator tables and
//! sparse integer differential matrices.
//!
//! Generators are enhanced states, placed in cell `(i(S), j(S))`. The
//! differential raises `i` by one and preserves `j`. Two states are incident
//! when their markers differ at exactly one crossing (positive in the source,
//! negative in the target), all untouched circles keep their signs, and the
//! signs at the difference point follow the five-case table below. A nonzero
//! incidence number is `(-1)^t` where `t` counts the negative markers of the
//! source at crossings numbered below the difference point; with that
//! convention the skein chain maps commute with the differential on the nose
//! when the smoothed crossing is last in the ordering.
//!
//! Case table at the difference point (merge = circle count drops, split =
//! circle count grows):
//!
//! | source signs | target signs        |
//! |--------------|---------------------|
//! | merge `-,-`  | `-`                 |
//! | merge `+,-`  | `+`                 |
//! | merge `+,+`  | none (incidence 0)  |
//! | split `+`    | `+,+`               |
//! | split `-`    | `+,-` and `-,+`     |

use crate::diagram::{resolve_state, CircleSet, LinkDiagram};
use crate::laurent::QPoly;
use crate::matrix::SparseIntegerMatrix;
use crate::states::{check_crossing_bound, gradings_from, EnhancedState, StateError};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// Target sign forced by a merge, if any.
fn merge_target_sign(s1: i8, s2: i8) -> Option<i8> {
    match (s1, s2) {
        (-1, -1) => Some(-1),
        (1, 1) => None,
        _ => Some(1),
    }
}

/// Target sign pairs allowed by a split of a circle with sign `s`.
fn split_target_signs(s: i8) -> &'static [(i8, i8)] {
    if s > 0 {
        &[(1, 1)]
    } else {
        &[(1, -1), (-1, 1)]
    }
}

/// The bigraded generator table and differentials of one diagram.
///
/// The table is frozen at construction; cells list generators in enumeration
/// order (markers lexicographic with `+` first, then circle signs
/// lexicographic by canonical circle identifier).
pub struct KhovanovComplex {
    diagram: LinkDiagram,
    writhe: i64,
    /// Circle decompositions indexed by marker bits.
    resolutions: Vec<CircleSet>,
    /// Global generator index of the first state of each marker block.
    marker_offset: Vec<usize>,
    total_generators: usize,
    /// `(i, j)` -> global generator indices, ascending (= enumeration order).
    cells: BTreeMap<(i64, i64), Vec<usize>>,
    /// Global generator index -> position inside its cell.
    pos_in_cell: Vec<usize>,
}

impl KhovanovComplex {
    pub fn new(d: &LinkDiagram, max_crossings: usize) -> Result<Self, StateError> {
        check_crossing_bound(d, max_crossings)?;
        let n = d.crossing_count();
        let writhe = d.writhe();
        let mut resolutions = Vec::with_capacity(1 << n);
        let mut marker_offset = Vec::with_capacity(1 << n);
        let mut total = 0usize;
        for bits in 0..(1u64 << n) {
            let markers = Self::markers_from_bits(n, bits);
            let circles = resolve_state(d, &markers);
            marker_offset.push(total);
            total += 1 << circles.len();
            resolutions.push(circles);
        }
        let mut cells: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        let mut pos_in_cell = vec![0usize; total];
        for m in 0..(1u64 << n) {
            let c = resolutions[m as usize].len();
            let sigma = n as i64 - 2 * (m.count_ones() as i64);
            for sign_bits in 0..(1u64 << c) {
                let tau = c as i64 - 2 * (sign_bits.count_ones() as i64);
                let g = gradings_from(writhe, sigma, tau);
                let idx = marker_offset[m as usize] + sign_bits as usize;
                let cell = cells.entry((g.i, g.j)).or_default();
                pos_in_cell[idx] = cell.len();
                cell.push(idx);
            }
        }
        Ok(KhovanovComplex {
            diagram: d.clone(),
            writhe,
            resolutions,
            marker_offset,
            total_generators: total,
            cells,
            pos_in_cell,
        })
    }

    fn markers_from_bits(n: usize, bits: u64) -> crate::diagram::MarkerVector {
        crate::diagram::MarkerVector(
            (0..n)
                .map(|k| if bits >> (n - 1 - k) & 1 == 0 { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn diagram(&self) -> &LinkDiagram {
        &self.diagram
    }

    pub fn total_generators(&self) -> usize {
        self.total_generators
    }

    pub fn writhe(&self) -> i64 {
        self.writhe
    }

    /// Circle decomposition of the smoothing with the given marker bits
    /// (crossing `k` is bit `n-1-k`, bit set = negative marker).
    pub(crate) fn resolution(&self, marker_bits: u64) -> &CircleSet {
        &self.resolutions[marker_bits as usize]
    }

    /// Global index of the generator with the given marker and sign bits.
    pub(crate) fn generator_index(&self, marker_bits: u64, sign_bits: u64) -> usize {
        self.marker_offset[marker_bits as usize] + sign_bits as usize
    }

    pub(crate) fn position_in_cell(&self, idx: usize) -> usize {
        self.pos_in_cell[idx]
    }

    /// The populated `(i, j)` cells with their generator counts.
    pub fn cell_dimensions(&self) -> BTreeMap<(i64, i64), usize> {
        self.cells.iter().map(|(&k, v)| (k, v.len())).collect()
    }

    pub fn cell_indices(&self, i: i64, j: i64) -> &[usize] {
        self.cells.get(&(i, j)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The enhanced state of the generator with global index `idx`.
    pub fn generator(&self, idx: usize) -> EnhancedState {
        let m = match self.marker_offset.binary_search(&idx) {
            Ok(m) => m,
            Err(ins) => ins - 1,
        };
        let sign_bits = (idx - self.marker_offset[m]) as u64;
        let c = self.resolutions[m].len();
        EnhancedState {
            markers: Self::markers_from_bits(self.diagram.crossing_count(), m as u64),
            circle_signs: (0..c)
                .map(|i| if sign_bits >> (c - 1 - i) & 1 == 0 { 1 } else { -1 })
                .collect(),
        }
    }

    fn gen_bits(&self, idx: usize) -> (u64, u64) {
        let m = match self.marker_offset.binary_search(&idx) {
            Ok(m) => m,
            Err(ins) => ins - 1,
        };
        (m as u64, (idx - self.marker_offset[m]) as u64)
    }

    /// All incident targets of generator `idx` with their incidence numbers.
    fn boundary_of(&self, idx: usize) -> Vec<(usize, i64)> {
        self.boundary_impl(idx, false)
    }

    /// Ordinary incidence targets, for consumers outside this module.
    pub(crate) fn state_boundary(&self, idx: usize) -> Vec<(usize, i64)> {
        self.boundary_impl(idx, false)
    }

    /// The power-raising adjacency of the `Z[c]` complex: targets reached by
    /// splitting a negative circle into two positive ones, with the same
    /// `(-1)^t` sign. The target state sits two `j`-degrees below the
    /// source, compensated by one extra power of `c`.
    pub(crate) fn power_raising_boundary(&self, idx: usize) -> Vec<(usize, i64)> {
        self.boundary_impl(idx, true)
    }

    fn boundary_impl(&self, idx: usize, power_raising: bool) -> Vec<(usize, i64)> {
        let n = self.diagram.crossing_count();
        let (m, sign_bits) = self.gen_bits(idx);
        let src = &self.resolutions[m as usize];
        let c_src = src.len();
        let sign_of = |bits: u64, pos: usize, count: usize| -> i8 {
            if bits >> (count - 1 - pos) & 1 == 0 {
                1
            } else {
                -1
            }
        };
        let mut out = Vec::new();
        let mut negatives_below = 0i64; // negative markers at crossings < k
        for k in 0..n {
            let bit = n - 1 - k;
            if m >> bit & 1 == 1 {
                negatives_below += 1;
                continue; // marker already negative at k
            }
            let m2 = m ^ (1 << bit);
            let tgt = &self.resolutions[m2 as usize];
            let c_tgt = tgt.len();
            let incidence_sign = if negatives_below % 2 == 0 { 1i64 } else { -1 };

            // circles of the source touched by crossing k
            let slots = self.diagram.crossings()[k].slots;
            let mut touched_src: Vec<usize> = slots.iter().map(|&e| src.circle_of_edge(e)).collect();
            touched_src.sort_unstable();
            touched_src.dedup();
            let mut touched_tgt: Vec<usize> = slots.iter().map(|&e| tgt.circle_of_edge(e)).collect();
            touched_tgt.sort_unstable();
            touched_tgt.dedup();

            // target sign bits shared by every case: untouched circles keep
            // their signs, matched by canonical identifier
            let mut base_bits = 0u64;
            for (ti, (t_id, t_edges)) in tgt.circles().iter().enumerate() {
                if touched_tgt.contains(&ti) {
                    continue;
                }
                debug_assert!(!t_edges.is_empty() || matches!(t_id, crate::diagram::CircleId::FreeLoop(_)));
                let si = match t_id {
                    crate::diagram::CircleId::Edge(e) => src.circle_of_edge(*e),
                    crate::diagram::CircleId::FreeLoop(_) => src
                        .circles()
                        .iter()
                        .position(|(id, _)| id == t_id)
                        .expect("free loop untouched by any crossing"),
                };
                debug_assert!(!touched_src.contains(&si));
                if sign_of(sign_bits, si, c_src) < 0 {
                    base_bits |= 1 << (c_tgt - 1 - ti);
                }
            }

            let expected_j_shift = if power_raising { -2 } else { 0 };
            let mut emit = |extra_bits: u64| {
                let tgt_idx = self.marker_offset[m2 as usize] + (base_bits | extra_bits) as usize;
                debug_assert!({
                    let gs = gradings_from(
                        self.writhe,
                        n as i64 - 2 * (m.count_ones() as i64),
                        c_src as i64 - 2 * (sign_bits.count_ones() as i64),
                    );
                    let (m2b, sb2) = self.gen_bits(tgt_idx);
                    let gt = gradings_from(
                        self.writhe,
                        n as i64 - 2 * (m2b.count_ones() as i64),
                        c_tgt as i64 - 2 * (sb2.count_ones() as i64),
                    );
                    gt.i == gs.i + 1
                        && gt.j == gs.j + expected_j_shift
                        && (c_tgt as i64 - c_src as i64).abs() == 1
                });
                out.push((tgt_idx, incidence_sign));
            };

            if c_tgt + 1 == c_src {
                // merge: two source circles joined into one target circle
                debug_assert_eq!(touched_src.len(), 2);
                debug_assert_eq!(touched_tgt.len(), 1);
                if power_raising {
                    continue;
                }
                let s1 = sign_of(sign_bits, touched_src[0], c_src);
                let s2 = sign_of(sign_bits, touched_src[1], c_src);
                if let Some(t) = merge_target_sign(s1, s2) {
                    let extra = if t < 0 { 1 << (c_tgt - 1 - touched_tgt[0]) } else { 0 };
                    emit(extra);
                }
            } else {
                // split: one source circle into two target circles
                debug_assert_eq!(c_tgt, c_src + 1);
                debug_assert_eq!(touched_src.len(), 1);
                debug_assert_eq!(touched_tgt.len(), 2);
                let s = sign_of(sign_bits, touched_src[0], c_src);
                if power_raising {
                    // negative circle splitting into two positive circles
                    if s < 0 {
                        emit(0);
                    }
                    continue;
                }
                for &(t1, t2) in split_target_signs(s) {
                    let mut extra = 0u64;
                    if t1 < 0 {
                        extra |= 1 << (c_tgt - 1 - touched_tgt[0]);
                    }
                    if t2 < 0 {
                        extra |= 1 << (c_tgt - 1 - touched_tgt[1]);
                    }
                    emit(extra);
                }
            }
        }
        out
    }

    /// The differential from cell `(i, j)` to `(i+1, j)`: one column per
    /// source generator, one row per target generator.
    pub fn differential_matrix(&self, i: i64, j: i64) -> SparseIntegerMatrix {
        let sources = self.cell_indices(i, j);
        let targets = self.cell_indices(i + 1, j);
        let mut entries = Vec::new();
        for (col, &src) in sources.iter().enumerate() {
            for (tgt, sign) in self.boundary_of(src) {
                entries.push((self.pos_in_cell[tgt], col, BigInt::from(sign)));
            }
        }
        SparseIntegerMatrix::new(targets.len(), sources.len(), entries)
    }

    /// The chain-level graded Euler characteristic
    /// `sum over cells of (-1)^i q^j rank C^(i,j)`.
    pub fn graded_euler_char(&self) -> QPoly {
        let mut p = QPoly::zero();
        for (&(i, j), gens) in &self.cells {
            let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(j, BigInt::from(sign * gens.len() as i64));
        }
        p
    }
}

/// Incidence number of an ordered pair of enhanced states of `d`, in
/// `{-1, 0, 1}`. Total on arbitrary pairs: everything outside the incidence
/// conditions returns 0.
pub fn incidence(
    d: &LinkDiagram,
    s1: &EnhancedState,
    s2: &EnhancedState,
) -> Result<i64, StateError> {
    let c1 = resolve_state(d, &s1.markers);
    let c2 = resolve_state(d, &s2.markers);
    if c1.len() != s1.circle_signs.len() {
        return Err(StateError::CircleSignMismatch { got: s1.circle_signs.len(), expected: c1.len() });
    }
    if c2.len() != s2.circle_signs.len() {
        return Err(StateError::CircleSignMismatch { got: s2.circle_signs.len(), expected: c2.len() });
    }
    // markers must differ at exactly one crossing, positive in s1
    let diffs: Vec<usize> = (0..d.crossing_count())
        .filter(|&k| s1.markers.sign(k) != s2.markers.sign(k))
        .collect();
    let [k] = diffs.as_slice() else { return Ok(0) };
    let k = *k;
    if s1.markers.sign(k) < 0 {
        return Ok(0);
    }
    // untouched circles keep their signs
    let slots = d.crossings()[k].slots;
    let touched1: Vec<usize> = {
        let mut v: Vec<usize> = slots.iter().map(|&e| c1.circle_of_edge(e)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let touched2: Vec<usize> = {
        let mut v: Vec<usize> = slots.iter().map(|&e| c2.circle_of_edge(e)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    for (i2, (id, edges)) in c2.circles().iter().enumerate() {
        if touched2.contains(&i2) {
            continue;
        }
        let i1 = match id {
            crate::diagram::CircleId::Edge(_) => c1.circle_of_edge(edges[0]),
            crate::diagram::CircleId::FreeLoop(_) => c1
                .circles()
                .iter()
                .position(|(id1, _)| id1 == id)
                .expect("free loops persist"),
        };
        if s1.circle_signs[i1] != s2.circle_signs[i2] {
            return Ok(0);
        }
    }
    // the five cases at the difference point
    let ok = if touched1.len() == 2 && touched2.len() == 1 {
        merge_target_sign(s1.circle_signs[touched1[0]], s1.circle_signs[touched1[1]])
            .is_some_and(|t| t == s2.circle_signs[touched2[0]])
    } else if touched1.len() == 1 && touched2.len() == 2 {
        split_target_signs(s1.circle_signs[touched1[0]])
            .iter()
            .any(|&(t1, t2)| (t1, t2) == (s2.circle_signs[touched2[0]], s2.circle_signs[touched2[1]]))
    } else {
        false
    };
    if !ok {
        return Ok(0);
    }
    let t = (0..k).filter(|&p| s1.markers.sign(p) < 0).count();
    Ok(if t % 2 == 0 { 1 } else { -1 })
}

/// Outcome of multiplying every pair of consecutive differentials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSquaredReport {
    pub cells_checked: usize,
    /// `(i, j)` of the first failing source cell, if any, with the entries of
    /// the nonzero product.
    pub first_failure: Option<((i64, i64), Vec<(usize, usize, BigInt)>)>,
}

impl DSquaredReport {
    pub fn is_zero(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Verify `d^2 = 0` by multiplying consecutive differential matrices in
/// every `j`-column. Failure is data, not a panic: it signals a sign-rule
/// implementation bug.
pub fn check_d_squared(complex: &KhovanovComplex) -> DSquaredReport {
    let mut cells_checked = 0;
    for (&(i, j), _) in &complex.cell_dimensions() {
        let d1 = complex.differential_matrix(i, j);
        let d2 = complex.differential_matrix(i + 1, j);
        cells_checked += 1;
        let prod = d2.multiply(&d1);
        if !prod.is_zero() {
            return DSquaredReport {
                cells_checked,
                first_failure: Some(((i, j), prod.entries().to_vec())),
            };
        }
    }
    DSquaredReport {
        cells_checked,
        first_failure: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_pd, MarkerVector};
    use crate::states::enumerate_enhanced_states;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    const HOPF: &str = "X(1,3,2,4) X(3,1,4,2)";

    #[test]
    fn hopf_incidence_examples() {
        let d = parse_pd(HOPF).unwrap();
        // markers (+,+) give circles {1,4} and {2,3}; (+,-) a single circle
        let s1 = EnhancedState {
            markers: MarkerVector(vec![1, 1]),
            circle_signs: vec![1, -1],
        };
        let s2 = EnhancedState {
            markers: MarkerVector(vec![1, -1]),
            circle_signs: vec![1],
        };
        assert_eq!(incidence(&d, &s1, &s2).unwrap(), 1);

        let s2_minus = EnhancedState {
            circle_signs: vec![-1],
            ..s2.clone()
        };
        assert_eq!(incidence(&d, &s1, &s2_minus).unwrap(), 0);

        // both joining circles positive: nothing is incident
        let s1_pp = EnhancedState {
            markers: MarkerVector(vec![1, 1]),
            circle_signs: vec![1, 1],
        };
        for t in [&s2, &s2_minus] {
            assert_eq!(incidence(&d, &s1_pp, t).unwrap(), 0);
        }
    }

    #[test]
    fn incidence_requires_single_difference() {
        let d = parse_pd(HOPF).unwrap();
        let s1 = EnhancedState {
            markers: MarkerVector(vec![1, 1]),
            circle_signs: vec![1, -1],
        };
        assert_eq!(incidence(&d, &s1, &s1).unwrap(), 0);
        let s2 = EnhancedState {
            markers: MarkerVector(vec![-1, -1]),
            circle_signs: vec![1, -1],
        };
        assert_eq!(incidence(&d, &s1, &s2).unwrap(), 0);
    }

    #[test]
    fn boundary_matches_pairwise_incidence() {
        // the generate-targets path and the pair predicate must agree entrywise
        for pd in [HOPF, "X(1,2,2,1)", TREFOIL] {
            let d = parse_pd(pd).unwrap();
            let cx = KhovanovComplex::new(&d, 16).unwrap();
            let states: Vec<_> = enumerate_enhanced_states(&d, 16).unwrap().collect();
            for (a, sa) in states.iter().enumerate() {
                let from_boundary: std::collections::BTreeMap<usize, i64> =
                    cx.boundary_of(a).into_iter().collect();
                for (b, sb) in states.iter().enumerate() {
                    let expect = incidence(&d, sa, sb).unwrap();
                    let got = from_boundary.get(&b).copied().unwrap_or(0);
                    assert_eq!(got, expect, "{pd}: pair {a} -> {b}");
                    assert_eq!(cx.generator(b), *sb); // enumeration order matches indices
                }
            }
        }
    }

    #[test]
    fn d_squared_is_zero_on_small_diagrams() {
        for pd in ["O 1", "X(1,2,2,1)", "X(1,1,2,2)", HOPF, TREFOIL] {
            let cx = KhovanovComplex::new(&parse_pd(pd).unwrap(), 16).unwrap();
            let report = check_d_squared(&cx);
            assert!(report.is_zero(), "d^2 != 0 for {pd}: {report:?}");
        }
    }

    #[test]
    fn unsigned_differential_breaks_d_squared() {
        // dropping the (-1)^t sign must be detected on the Hopf link
        let d = parse_pd(HOPF).unwrap();
        let cx = KhovanovComplex::new(&d, 16).unwrap();
        let mut found_nonzero = false;
        for (&(i, j), _) in &cx.cell_dimensions() {
            let strip = |m: &SparseIntegerMatrix| {
                SparseIntegerMatrix::new(
                    m.rows,
                    m.cols,
                    m.entries()
                        .iter()
                        .map(|(r, c, v)| (*r, *c, num_traits::abs(v.clone())))
                        .collect(),
                )
            };
            let d1 = strip(&cx.differential_matrix(i, j));
            let d2 = strip(&cx.differential_matrix(i + 1, j));
            if !d2.multiply(&d1).is_zero() {
                found_nonzero = true;
            }
        }
        assert!(found_nonzero, "sign rule is load-bearing on the Hopf link");
    }

    #[test]
    fn differential_stays_in_bidegree() {
        let d = parse_pd(TREFOIL).unwrap();
        let cx = KhovanovComplex::new(&d, 16).unwrap();
        let n = d.crossing_count();
        for (&(i, j), gens) in &cx.cell_dimensions() {
            let m = cx.differential_matrix(i, j);
            assert_eq!(m.cols, *gens);
            assert_eq!(m.rows, cx.cell_indices(i + 1, j).len());
            for (c, &src) in cx.cell_indices(i, j).iter().enumerate() {
                // at most two targets per positive marker: a merge or a
                // positive split has one, a split of a negative circle two
                let positives = cx
                    .generator(src)
                    .markers
                    .0
                    .iter()
                    .filter(|&&s| s > 0)
                    .count();
                assert!(m.nonzeros_in_col(c) <= 2 * positives);
                assert!(m.nonzeros_in_col(c) <= 2 * n);
            }
            for (_, _, v) in m.entries() {
                assert!(v.magnitude() == &1u32.into());
            }
        }
    }

    #[test]
    fn euler_char_equals_jones() {
        for pd in ["O 1", "O 2", "X(1,2,2,1)", HOPF, TREFOIL] {
            let d = parse_pd(pd).unwrap();
            let cx = KhovanovComplex::new(&d, 16).unwrap();
            let jones = crate::bracket::jones_k(&d, 16).unwrap();
            assert_eq!(cx.graded_euler_char(), jones, "Euler identity for {pd}");
        }
    }

    #[test]
    fn zero_crossing_diagram_has_empty_differentials() {
        let cx = KhovanovComplex::new(&parse_pd("O 1").unwrap(), 16).unwrap();
        assert_eq!(cx.total_generators(), 2);
        for (&(i, j), _) in &cx.cell_dimensions() {
            assert!(cx.differential_matrix(i, j).is_zero());
        }
    }
}
