//! The framed regrading of the complex and the categorified skein relation.
//!
//! Framed gradings are `I = sigma` and `J = sigma + 2 tau`; neither consults
//! the orientation, and the differential has bidegree `(-2, 0)`. For an
//! oriented diagram the framed cell `(I, J)` is the unframed cell
//! `((w-I)/2, (3w-J)/2)`.
//!
//! Smoothing a distinguished crossing `c` (renumbered last) produces the
//! skein triple `(D, D_+, D_-)`. The chain map `alpha` sends a state of
//! `D_-` to the state of `D` with a negative marker at `c` and the same
//! circle signs; `beta` kills states with a negative marker at `c` and
//! forgets the positive marker otherwise. Both have framed degree
//! `(-1, -1)`, commute with the differential, and form a short exact
//! sequence whose long homology sequence is checked here over the
//! rationals.

use crate::complex::KhovanovComplex;
use crate::diagram::{CircleId, Crossing, DiagramError, LinkDiagram};
use crate::homology::{cell_homology, AbelianGroupPresentation};
use crate::matrix::{smith_decompose, DenseMatrix, SparseIntegerMatrix};
use crate::qlinalg::{QCellHomology, QMat, Q};
use crate::states::StateError;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SkeinError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("zig-zag lift failed at framed cell ({i},{j}): {what}")]
    ZigZag { i: i64, j: i64, what: String },
}

/// Where an edge of `D` lands after smoothing the last crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeImage {
    /// Part of this edge of the smoothed diagram.
    Arc(u32),
    /// Swallowed into this free loop (0-based).
    Loop(u32),
}

/// A diagram with a distinguished crossing renumbered last, together with
/// its two smoothings there.
pub struct SkeinTriple {
    pub d: LinkDiagram,
    pub d_plus: LinkDiagram,
    pub d_minus: LinkDiagram,
    edge_to_plus: Vec<EdgeImage>,
    edge_to_minus: Vec<EdgeImage>,
}

/// Renumber crossing `c` (0-based) to be last and smooth `D` there along
/// both markers.
pub fn smooth_at(d: &LinkDiagram, c: usize) -> Result<SkeinTriple, DiagramError> {
    let n = d.crossing_count();
    if c >= n {
        return Err(DiagramError::CrossingIndex { index: c, crossings: n });
    }
    let mut perm: Vec<usize> = (0..n).filter(|&k| k != c).collect();
    perm.push(c);
    let d_last = d.permute_crossings(&perm);
    let (d_plus, edge_to_plus) = smooth_last(&d_last, true);
    let (d_minus, edge_to_minus) = smooth_last(&d_last, false);
    Ok(SkeinTriple {
        d: d_last,
        d_plus,
        d_minus,
        edge_to_plus,
        edge_to_minus,
    })
}

/// Remove the last crossing along the given marker, merging its edges into
/// arcs. Closed arcs become free loops. The smoothing ignores orientation,
/// so each new component is re-oriented along a deterministic traversal and
/// under-strand slots are rotated to keep `a` incoming.
fn smooth_last(d: &LinkDiagram, positive: bool) -> (LinkDiagram, Vec<EdgeImage>) {
    let n = d.crossing_count();
    debug_assert!(n >= 1);
    let last = d.crossings()[n - 1].slots;
    let ne = d.edge_count() as usize;
    let mut class: Vec<u32> = (0..=ne as u32).collect();
    fn find(class: &mut [u32], e: u32) -> u32 {
        if class[e as usize] == e {
            return e;
        }
        let root = find(class, class[e as usize]);
        class[e as usize] = root;
        root
    }
    let joins: [(usize, usize); 2] = if positive { [(0, 3), (1, 2)] } else { [(0, 1), (2, 3)] };
    let mut closed: Vec<u32> = Vec::new();
    for (s1, s2) in joins {
        let (a, b) = (find(&mut class, last[s1]), find(&mut class, last[s2]));
        if a == b {
            closed.push(a);
        } else {
            class[a.max(b) as usize] = a.min(b);
        }
    }
    let rep = |class: &mut Vec<u32>, e: u32| find(class, e);

    // remaining crossings with labels collapsed to class representatives
    let rem: Vec<[u32; 4]> = d.crossings()[..n - 1]
        .iter()
        .map(|x| {
            let mut t = [0u32; 4];
            for (i, &e) in x.slots.iter().enumerate() {
                t[i] = rep(&mut class, e);
            }
            t
        })
        .collect();

    let base_loops = d.free_loops();
    let loop_of_class: BTreeMap<u32, u32> = closed
        .iter()
        .enumerate()
        .map(|(i, &cl)| (rep(&mut class, cl), base_loops + i as u32))
        .collect();

    // deterministic re-orientation: walk each component starting from its
    // minimal class, relabeling arcs 1.. in traversal order; rotate a
    // crossing by two slots when the under-strand is entered at slot c
    let mut occ: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (k, t) in rem.iter().enumerate() {
        for (s, &cl) in t.iter().enumerate() {
            occ.entry(cl).or_default().push((k, s));
        }
    }
    let mut new_label: BTreeMap<u32, u32> = BTreeMap::new();
    let mut rotate = vec![0usize; rem.len()];
    let mut next = 1u32;
    let classes: Vec<u32> = occ.keys().copied().collect();
    for &start in &classes {
        if new_label.contains_key(&start) {
            continue;
        }
        // flow the strand into the first occurrence of the starting class
        let (mut k, mut s) = occ[&start][0];
        let mut cur = start;
        loop {
            new_label.insert(cur, next);
            next += 1;
            if s == 2 {
                rotate[k] = 2; // entered the under-strand at slot c
            }
            let exit = (s + 2) % 4;
            let out_class = rem[k][exit];
            let other = occ[&out_class]
                .iter()
                .copied()
                .find(|&p| p != (k, exit))
                .expect("class occurs twice");
            cur = out_class;
            (k, s) = other;
            if cur == start && (k, s) == occ[&start][0] {
                break;
            }
            if new_label.contains_key(&cur) {
                break;
            }
        }
    }

    let crossings: Vec<Crossing> = rem
        .iter()
        .zip(&rotate)
        .map(|(t, &r)| {
            Crossing::new(
                new_label[&t[r % 4]],
                new_label[&t[(r + 1) % 4]],
                new_label[&t[(r + 2) % 4]],
                new_label[&t[(r + 3) % 4]],
            )
        })
        .collect();
    let loops = base_loops + closed.len() as u32;
    let out = LinkDiagram::new(crossings, loops).expect("smoothing yields a valid diagram");

    let edge_map = (1..=ne as u32)
        .map(|e| {
            let cl = rep(&mut class, e);
            match loop_of_class.get(&cl) {
                Some(&l) => EdgeImage::Loop(l),
                None => EdgeImage::Arc(new_label[&cl]),
            }
        })
        .collect();
    (out, edge_map)
}

/// Generator index of a framed cell list, `(w - I)/2, (3w - J)/2` in
/// oriented coordinates; empty for parity mismatches.
fn framed_cell<'a>(cx: &'a KhovanovComplex, i: i64, j: i64) -> &'a [usize] {
    let w = cx.writhe();
    if (w - i).rem_euclid(2) != 0 || (3 * w - j).rem_euclid(2) != 0 {
        return &[];
    }
    cx.cell_indices((w - i) / 2, (3 * w - j) / 2)
}

/// The chain groups of a diagram in framed coordinates, with the
/// bidegree `(-2, 0)` differential.
pub struct FramedComplex {
    cx: KhovanovComplex,
}

impl FramedComplex {
    pub fn new(d: &LinkDiagram, max_crossings: usize) -> Result<Self, StateError> {
        Ok(FramedComplex {
            cx: KhovanovComplex::new(d, max_crossings)?,
        })
    }

    pub fn inner(&self) -> &KhovanovComplex {
        &self.cx
    }

    /// Populated framed cells `(I, J)` with generator counts.
    pub fn cell_dimensions(&self) -> BTreeMap<(i64, i64), usize> {
        let w = self.cx.writhe();
        self.cx
            .cell_dimensions()
            .into_iter()
            .map(|((i, j), dim)| ((w - 2 * i, 3 * w - 2 * j), dim))
            .collect()
    }

    pub fn cell(&self, i: i64, j: i64) -> &[usize] {
        framed_cell(&self.cx, i, j)
    }

    /// The differential `C_(I,J) -> C_(I-2,J)`.
    pub fn differential(&self, i: i64, j: i64) -> SparseIntegerMatrix {
        let w = self.cx.writhe();
        self.cx.differential_matrix((w - i) / 2, (3 * w - j) / 2)
    }

    /// Framed homology, keyed by `(I, J)`.
    pub fn homology(&self) -> FramedTable {
        let mut groups = BTreeMap::new();
        for (&(i, j), _) in &self.cell_dimensions() {
            let outgoing = self.differential(i, j).to_dense();
            let incoming = self.differential(i + 2, j).to_dense();
            let h = cell_homology(&outgoing, &incoming);
            if !h.is_trivial() {
                groups.insert((i, j), h);
            }
        }
        FramedTable { groups }
    }
}

/// Framed homology table keyed by `(I, J)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FramedTable {
    groups: BTreeMap<(i64, i64), AbelianGroupPresentation>,
}

impl FramedTable {
    pub fn get(&self, i: i64, j: i64) -> Option<&AbelianGroupPresentation> {
        self.groups.get(&(i, j))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &AbelianGroupPresentation)> {
        self.groups.iter()
    }

    pub fn to_json(&self) -> FramedJson {
        let mut rows: Vec<_> = self.groups.iter().collect();
        rows.sort_by_key(|(&(i, j), _)| (j, i));
        FramedJson {
            groups: rows
                .into_iter()
                .map(|(&(i, j), g)| FramedGroupJson {
                    #[allow(non_snake_case)]
                    I: i,
                    J: j,
                    free_rank: g.free_rank,
                    torsion: g.torsion.iter().map(|t| t.to_string().parse().expect("torsion fits")).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serialization cannot fail")
    }

    pub fn render_text(&self) -> String {
        if self.groups.is_empty() {
            return "all groups trivial\n".into();
        }
        let mut rows: Vec<_> = self.groups.iter().collect();
        rows.sort_by_key(|(&(i, j), _)| (j, i));
        let mut out = String::new();
        for (&(i, j), g) in rows {
            out.push_str(&format!("I={i:<4} J={j:<4} {g}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FramedJson {
    pub groups: Vec<FramedGroupJson>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[allow(non_snake_case)]
pub struct FramedGroupJson {
    pub I: i64,
    pub J: i64,
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

/// Framed homology of a diagram.
pub fn framed_homology_table(d: &LinkDiagram, max_crossings: usize) -> Result<FramedTable, StateError> {
    Ok(FramedComplex::new(d, max_crossings)?.homology())
}

/// The chain maps of a skein triple, realized on generators.
///
/// `alpha` includes a `D_-` state as the `D` state with a negative marker at
/// the last crossing; `beta` projects a positive-marker state to `D_+` and
/// kills the rest. Matrices are per framed cell of `D`.
pub struct SkeinMaps {
    pub cx_d: KhovanovComplex,
    pub cx_plus: KhovanovComplex,
    pub cx_minus: KhovanovComplex,
    /// `D_-` generator index -> `D` generator index.
    alpha_gen: Vec<usize>,
    /// `D` generator index -> `D_+` generator index, `None` when killed.
    beta_gen: Vec<Option<usize>>,
    /// `D` generator index -> `D_-` generator index, for pulling back
    /// through `alpha` (defined exactly on negative-marker states).
    alpha_inv: Vec<Option<usize>>,
}

impl SkeinMaps {
    pub fn new(t: &SkeinTriple, max_crossings: usize) -> Result<Self, StateError> {
        let cx_d = KhovanovComplex::new(&t.d, max_crossings)?;
        let cx_plus = KhovanovComplex::new(&t.d_plus, max_crossings)?;
        let cx_minus = KhovanovComplex::new(&t.d_minus, max_crossings)?;
        let n = t.d.crossing_count();

        // circle index map: resolution of D (markers m|eps) -> resolution of
        // the smoothed diagram (markers m)
        let circle_map = |d_res: &crate::diagram::CircleSet,
                          s_res: &crate::diagram::CircleSet,
                          edge_map: &[EdgeImage],
                          s_loops: u32|
         -> Vec<usize> {
            let s_edge_circles = s_res.len() - s_loops as usize;
            d_res
                .circles()
                .iter()
                .map(|(id, edges)| match edges.first() {
                    Some(&e) => match edge_map[(e - 1) as usize] {
                        EdgeImage::Arc(a) => s_res.circle_of_edge(a),
                        EdgeImage::Loop(l) => s_edge_circles + l as usize,
                    },
                    None => {
                        let CircleId::FreeLoop(l) = id else {
                            unreachable!("edge-free circle is a free loop")
                        };
                        s_edge_circles + *l as usize
                    }
                })
                .collect()
        };

        let mut alpha_gen = vec![usize::MAX; cx_minus.total_generators()];
        let mut alpha_inv = vec![None; cx_d.total_generators()];
        for m_minus in 0u64..(1 << (n - 1)) {
            let m_d = (m_minus << 1) | 1;
            let d_res = cx_d.resolution(m_d);
            let s_res = cx_minus.resolution(m_minus);
            let map = circle_map(d_res, s_res, &t.edge_to_minus, t.d_minus.free_loops());
            let (cd, cs) = (d_res.len(), s_res.len());
            debug_assert_eq!(cd, cs);
            for sign_bits in 0u64..(1 << cs) {
                let mut d_bits = 0u64;
                for (i, &ci) in map.iter().enumerate() {
                    if sign_bits >> (cs - 1 - ci) & 1 == 1 {
                        d_bits |= 1 << (cd - 1 - i);
                    }
                }
                let from = cx_minus.generator_index(m_minus, sign_bits);
                let to = cx_d.generator_index(m_d, d_bits);
                alpha_gen[from] = to;
                alpha_inv[to] = Some(from);
            }
        }

        let mut beta_gen = vec![None; cx_d.total_generators()];
        for m_plus in 0u64..(1 << (n - 1)) {
            let m_d = m_plus << 1;
            let d_res = cx_d.resolution(m_d);
            let s_res = cx_plus.resolution(m_plus);
            let map = circle_map(d_res, s_res, &t.edge_to_plus, t.d_plus.free_loops());
            let (cd, cs) = (d_res.len(), s_res.len());
            debug_assert_eq!(cd, cs);
            for d_bits in 0u64..(1 << cd) {
                let mut s_bits = 0u64;
                for (i, &ci) in map.iter().enumerate() {
                    if d_bits >> (cd - 1 - i) & 1 == 1 {
                        s_bits |= 1 << (cs - 1 - ci);
                    }
                }
                let from = cx_d.generator_index(m_d, d_bits);
                beta_gen[from] = Some(cx_plus.generator_index(m_plus, s_bits));
            }
        }

        Ok(SkeinMaps {
            cx_d,
            cx_plus,
            cx_minus,
            alpha_gen,
            beta_gen,
            alpha_inv,
        })
    }

    /// `alpha` into the framed `D`-cell `(I, J)`, from the `D_-`-cell
    /// `(I+1, J+1)`.
    pub fn alpha_matrix(&self, i: i64, j: i64) -> SparseIntegerMatrix {
        let domain = framed_cell(&self.cx_minus, i + 1, j + 1);
        let codomain = framed_cell(&self.cx_d, i, j);
        let mut entries = Vec::new();
        for (col, &g) in domain.iter().enumerate() {
            let img = self.alpha_gen[g];
            debug_assert!(codomain.contains(&img));
            entries.push((self.cx_d.position_in_cell(img), col, BigInt::one()));
        }
        SparseIntegerMatrix::new(codomain.len(), domain.len(), entries)
    }

    /// `beta` out of the framed `D`-cell `(I, J)`, into the `D_+`-cell
    /// `(I-1, J-1)`.
    pub fn beta_matrix(&self, i: i64, j: i64) -> SparseIntegerMatrix {
        let domain = framed_cell(&self.cx_d, i, j);
        let codomain = framed_cell(&self.cx_plus, i - 1, j - 1);
        let mut entries = Vec::new();
        for (col, &g) in domain.iter().enumerate() {
            if let Some(img) = self.beta_gen[g] {
                debug_assert!(codomain.contains(&img));
                entries.push((self.cx_plus.position_in_cell(img), col, BigInt::one()));
            }
        }
        SparseIntegerMatrix::new(codomain.len(), domain.len(), entries)
    }

    fn framed_differential(cx: &KhovanovComplex, i: i64, j: i64) -> SparseIntegerMatrix {
        let w = cx.writhe();
        if (w - i).rem_euclid(2) != 0 || (3 * w - j).rem_euclid(2) != 0 {
            return SparseIntegerMatrix::zero(0, 0);
        }
        cx.differential_matrix((w - i) / 2, (3 * w - j) / 2)
    }

    /// All framed `(I, J)` cells of `D` that could carry data for the maps.
    fn relevant_cells(&self) -> Vec<(i64, i64)> {
        let w = self.cx_d.writhe();
        let mut cells: Vec<(i64, i64)> = self
            .cx_d
            .cell_dimensions()
            .keys()
            .map(|&(i, j)| (w - 2 * i, 3 * w - 2 * j))
            .collect();
        cells.sort();
        cells
    }

    /// Chain-level verification of the short exact sequence at every cell.
    pub fn verify_ses(&self) -> SesReport {
        let mut cells = Vec::new();
        for (i, j) in self.relevant_cells() {
            let alpha = self.alpha_matrix(i, j);
            let beta = self.beta_matrix(i, j);

            let dec_a = smith_decompose(&alpha.to_dense());
            let alpha_injective =
                dec_a.rank == alpha.cols && dec_a.divisors.iter().all(|d| d.is_one());
            let dec_b = smith_decompose(&beta.to_dense());
            let beta_surjective =
                dec_b.rank == beta.rows && dec_b.divisors.iter().all(|d| d.is_one());

            // im alpha = ker beta as sublattices: mutual containment
            let kernel = dec_b.kernel_basis();
            let alpha_cols: Vec<Vec<BigInt>> =
                (0..alpha.cols).map(|c| alpha.to_dense().column(c)).collect();
            let kernel_mat = columns_to_dense(&kernel, beta.cols);
            let alpha_mat = columns_to_dense(&alpha_cols, alpha.rows);
            debug_assert_eq!(beta.cols, alpha.rows);
            let dec_k = smith_decompose(&kernel_mat);
            let dec_im = smith_decompose(&alpha_mat);
            let exact = alpha_cols.iter().all(|v| dec_k.lattice_contains(v))
                && kernel.iter().all(|v| dec_im.lattice_contains(v));

            // the maps commute with the differential (crossing `c` is last)
            let d_d = Self::framed_differential(&self.cx_d, i, j);
            let d_minus = Self::framed_differential(&self.cx_minus, i + 1, j + 1);
            let alpha_lower = self.alpha_matrix(i - 2, j);
            let alpha_commutes = d_d.multiply(&alpha) == alpha_lower.multiply(&d_minus);

            let d_plus = Self::framed_differential(&self.cx_plus, i - 1, j - 1);
            let beta_lower = self.beta_matrix(i - 2, j);
            let beta_commutes = d_plus.multiply(&beta) == beta_lower.multiply(&d_d);

            cells.push(SesCellReport {
                I: i,
                J: j,
                alpha_injective,
                beta_surjective,
                im_alpha_equals_ker_beta: exact,
                alpha_commutes,
                beta_commutes,
            });
        }
        let pass = cells.iter().all(SesCellReport::pass);
        SesReport { pass, cells }
    }

    /// Homology-level check of the induced long exact sequence over the
    /// rationals, with the connecting map computed by an explicit zig-zag.
    pub fn check_les(&self) -> Result<LesReport, SkeinError> {
        // rational homology of every populated framed cell of each complex
        let build = |cx: &KhovanovComplex| -> BTreeMap<(i64, i64), QCellHomology> {
            let w = cx.writhe();
            cx.cell_dimensions()
                .keys()
                .map(|&(i, j)| {
                    let (fi, fj) = (w - 2 * i, 3 * w - 2 * j);
                    let out = QMat::from_sparse(&Self::framed_differential(cx, fi, fj));
                    let inc = QMat::from_sparse(&Self::framed_differential(cx, fi + 2, fj));
                    ((fi, fj), QCellHomology::new(&out, &inc))
                })
                .collect()
        };
        let h_d = build(&self.cx_d);
        let h_plus = build(&self.cx_plus);
        let h_minus = build(&self.cx_minus);

        // alpha*: H(D_-)(i,j) -> H(D)(i-1,j-1), as columns of projections
        let mut alpha_star: BTreeMap<(i64, i64), QMat> = BTreeMap::new();
        for (&(i, j), h_src) in &h_minus {
            let Some(h_tgt) = h_d.get(&(i - 1, j - 1)) else {
                if h_src.dim() > 0 {
                    alpha_star.insert((i, j), QMat::zero(0, h_src.dim()));
                }
                continue;
            };
            let domain = framed_cell(&self.cx_minus, i, j);
            let codomain = framed_cell(&self.cx_d, i - 1, j - 1);
            let cols: Vec<Vec<Q>> = h_src
                .reps
                .iter()
                .map(|rep| {
                    let mut out = vec![Q::zero(); codomain.len()];
                    for (pos, coef) in rep.iter().enumerate() {
                        if !coef.is_zero() {
                            let img = self.alpha_gen[domain[pos]];
                            out[self.cx_d.position_in_cell(img)] = coef.clone();
                        }
                    }
                    h_tgt.try_project(&out).ok_or(((i, j), "alpha* image"))
                })
                .collect::<Result<_, _>>()
                .map_err(|((i, j), what)| SkeinError::ZigZag { i, j, what: what.into() })?;
            alpha_star.insert((i, j), QMat::from_columns(&cols, h_tgt.dim()));
        }

        // beta*: H(D)(i,j) -> H(D_+)(i-1,j-1)
        let mut beta_star: BTreeMap<(i64, i64), QMat> = BTreeMap::new();
        for (&(i, j), h_src) in &h_d {
            let Some(h_tgt) = h_plus.get(&(i - 1, j - 1)) else {
                if h_src.dim() > 0 {
                    beta_star.insert((i, j), QMat::zero(0, h_src.dim()));
                }
                continue;
            };
            let domain = framed_cell(&self.cx_d, i, j);
            let codomain = framed_cell(&self.cx_plus, i - 1, j - 1);
            let cols: Vec<Vec<Q>> = h_src
                .reps
                .iter()
                .map(|rep| {
                    let mut out = vec![Q::zero(); codomain.len()];
                    for (pos, coef) in rep.iter().enumerate() {
                        if coef.is_zero() {
                            continue;
                        }
                        if let Some(img) = self.beta_gen[domain[pos]] {
                            out[self.cx_plus.position_in_cell(img)] = coef.clone();
                        }
                    }
                    h_tgt.try_project(&out).ok_or(((i, j), "beta* image"))
                })
                .collect::<Result<_, _>>()
                .map_err(|((i, j), what)| SkeinError::ZigZag { i, j, what: what.into() })?;
            beta_star.insert((i, j), QMat::from_columns(&cols, h_tgt.dim()));
        }

        // connecting map: H(D_+)(i,j) -> H(D_-)(i,j+2) by lift through beta,
        // differential in D, pull back through alpha
        let mut partial_star: BTreeMap<(i64, i64), QMat> = BTreeMap::new();
        for (&(i, j), h_src) in &h_plus {
            let Some(h_tgt) = h_minus.get(&(i, j + 2)) else {
                if h_src.dim() > 0 {
                    partial_star.insert((i, j), QMat::zero(0, h_src.dim()));
                }
                continue;
            };
            let plus_cell = framed_cell(&self.cx_plus, i, j);
            let d_cell = framed_cell(&self.cx_d, i + 1, j + 1);
            let d_lower = framed_cell(&self.cx_d, i - 1, j + 1);
            let minus_cell = framed_cell(&self.cx_minus, i, j + 2);
            let diff = QMat::from_sparse(&Self::framed_differential(&self.cx_d, i + 1, j + 1));
            // generator-level section of beta
            let mut section = vec![None; self.cx_plus.total_generators()];
            for &g in d_cell {
                if let Some(img) = self.beta_gen[g] {
                    section[img] = Some(g);
                }
            }
            let cols: Vec<Vec<Q>> = h_src
                .reps
                .iter()
                .map(|rep| {
                    let mut lift = vec![Q::zero(); d_cell.len()];
                    for (pos, coef) in rep.iter().enumerate() {
                        if coef.is_zero() {
                            continue;
                        }
                        let g = section[plus_cell[pos]].ok_or(((i, j), "beta has no section"))?;
                        lift[self.cx_d.position_in_cell(g)] = coef.clone();
                    }
                    let bdry = diff.mul_vec(&lift);
                    let mut pulled = vec![Q::zero(); minus_cell.len()];
                    for (pos, coef) in bdry.iter().enumerate() {
                        if coef.is_zero() {
                            continue;
                        }
                        let g = d_lower[pos];
                        let back = self.alpha_inv[g].ok_or(((i, j), "boundary outside im alpha"))?;
                        pulled[self.cx_minus.position_in_cell(back)] = coef.clone();
                    }
                    h_tgt.try_project(&pulled).ok_or(((i, j), "connecting image"))
                })
                .collect::<Result<_, _>>()
                .map_err(|((i, j), what): ((i64, i64), &str)| SkeinError::ZigZag {
                    i,
                    j,
                    what: what.into(),
                })?;
            partial_star.insert((i, j), QMat::from_columns(&cols, h_tgt.dim()));
        }

        // exactness at every node with nonzero homology
        let rank = |m: Option<&QMat>| m.map_or(0, QMat::rank);
        let mut nodes = Vec::new();
        for (&(i, j), h) in &h_minus {
            if h.dim() == 0 {
                continue;
            }
            let rank_in = rank(partial_star.get(&(i, j - 2)));
            let rank_out = rank(alpha_star.get(&(i, j)));
            nodes.push(LesNodeReport::new("D-", i, j, h.dim(), rank_in, rank_out));
        }
        for (&(i, j), h) in &h_d {
            if h.dim() == 0 {
                continue;
            }
            let rank_in = rank(alpha_star.get(&(i + 1, j + 1)));
            let rank_out = rank(beta_star.get(&(i, j)));
            nodes.push(LesNodeReport::new("D", i, j, h.dim(), rank_in, rank_out));
        }
        for (&(i, j), h) in &h_plus {
            if h.dim() == 0 {
                continue;
            }
            let rank_in = rank(beta_star.get(&(i + 1, j + 1)));
            let rank_out = rank(partial_star.get(&(i, j)));
            nodes.push(LesNodeReport::new("D+", i, j, h.dim(), rank_in, rank_out));
        }
        // consecutive composites vanish
        let mut composites_zero = true;
        for (&(i, j), a) in &alpha_star {
            if let Some(b) = beta_star.get(&(i - 1, j - 1)) {
                composites_zero &= b.multiply(a).is_zero();
            }
        }
        for (&(i, j), b) in &beta_star {
            if let Some(p) = partial_star.get(&(i - 1, j - 1)) {
                composites_zero &= p.multiply(b).is_zero();
            }
        }
        for (&(i, j), p) in &partial_star {
            if let Some(a) = alpha_star.get(&(i, j + 2)) {
                composites_zero &= a.multiply(p).is_zero();
            }
        }
        let pass = composites_zero && nodes.iter().all(|n| n.exact);
        Ok(LesReport {
            pass,
            composites_zero,
            nodes,
        })
    }
}

fn columns_to_dense(cols: &[Vec<BigInt>], rows: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zero(rows, cols.len());
    for (c, col) in cols.iter().enumerate() {
        debug_assert_eq!(col.len(), rows);
        for (r, v) in col.iter().enumerate() {
            m.data[r][c] = v.clone();
        }
    }
    m
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[allow(non_snake_case)]
pub struct SesCellReport {
    pub I: i64,
    pub J: i64,
    pub alpha_injective: bool,
    pub beta_surjective: bool,
    pub im_alpha_equals_ker_beta: bool,
    pub alpha_commutes: bool,
    pub beta_commutes: bool,
}

impl SesCellReport {
    pub fn pass(&self) -> bool {
        self.alpha_injective
            && self.beta_surjective
            && self.im_alpha_equals_ker_beta
            && self.alpha_commutes
            && self.beta_commutes
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SesReport {
    pub pass: bool,
    pub cells: Vec<SesCellReport>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[allow(non_snake_case)]
pub struct LesNodeReport {
    pub complex: String,
    pub I: i64,
    pub J: i64,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub exact: bool,
}

impl LesNodeReport {
    fn new(complex: &str, i: i64, j: i64, dim: usize, rank_in: usize, rank_out: usize) -> Self {
        LesNodeReport {
            complex: complex.into(),
            I: i,
            J: j,
            dim,
            rank_in,
            rank_out,
            exact: rank_in + rank_out == dim,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LesReport {
    pub pass: bool,
    pub composites_zero: bool,
    pub nodes: Vec<LesNodeReport>,
}

/// Chain-level SES verification for a triple.
pub fn verify_skein_ses(t: &SkeinTriple, max_crossings: usize) -> Result<SesReport, StateError> {
    Ok(SkeinMaps::new(t, max_crossings)?.verify_ses())
}

/// Homology-level long-exact-sequence verification for a triple.
pub fn long_exact_sequence_check(
    t: &SkeinTriple,
    max_crossings: usize,
) -> Result<LesReport, SkeinError> {
    SkeinMaps::new(t, max_crossings)?.check_les()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;
    use crate::homology::homology_table;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    const HOPF: &str = "X(1,3,2,4) X(3,1,4,2)";

    #[test]
    fn unknot_framed_cells() {
        let f = FramedComplex::new(&parse_pd("O 1").unwrap(), 16).unwrap();
        let dims = f.cell_dimensions();
        assert_eq!(dims.get(&(0, 2)), Some(&1));
        assert_eq!(dims.get(&(0, -2)), Some(&1));
        assert_eq!(dims.len(), 2);
    }

    #[test]
    fn framed_reindexes_unframed() {
        for pd in [TREFOIL, HOPF] {
            let d = parse_pd(pd).unwrap();
            let w = d.writhe();
            let cx = KhovanovComplex::new(&d, 16).unwrap();
            let f = FramedComplex::new(&d, 16).unwrap();
            let unframed = cx.cell_dimensions();
            let framed = f.cell_dimensions();
            assert_eq!(unframed.len(), framed.len());
            for (&(i, j), &dim) in &unframed {
                assert_eq!(framed.get(&(w - 2 * i, 3 * w - 2 * j)), Some(&dim));
            }
            // homology matches under the same re-indexing
            let h = homology_table(&d, 16).unwrap();
            let fh = f.homology();
            assert_eq!(h.iter().count(), fh.iter().count());
            for (&(i, j), g) in h.iter() {
                assert_eq!(fh.get(w - 2 * i, 3 * w - 2 * j), Some(g));
            }
        }
    }

    #[test]
    fn framed_differential_bidegree() {
        let f = FramedComplex::new(&parse_pd(TREFOIL).unwrap(), 16).unwrap();
        for (&(i, j), &dim) in &f.cell_dimensions() {
            let m = f.differential(i, j);
            assert_eq!(m.cols, dim);
            assert_eq!(m.rows, f.cell(i - 2, j).len());
        }
    }

    #[test]
    fn smooth_hopf_gives_kinks() {
        let d = parse_pd(HOPF).unwrap();
        let t = smooth_at(&d, 1).unwrap();
        assert_eq!(t.d_plus.crossing_count(), 1);
        assert_eq!(t.d_minus.crossing_count(), 1);
        assert_eq!(t.d_plus.free_loops(), 0);
        assert_eq!(t.d_minus.free_loops(), 0);
    }

    #[test]
    fn smooth_kink_gives_free_loops() {
        let d = parse_pd("X(1,2,2,1)").unwrap();
        let t = smooth_at(&d, 0).unwrap();
        // positive marker splits the positive kink into two circles
        assert_eq!(t.d_plus.crossing_count(), 0);
        assert_eq!(t.d_plus.free_loops(), 2);
        assert_eq!(t.d_minus.free_loops(), 1);
    }

    #[test]
    fn smooth_trefoil_gives_two_crossing_diagrams() {
        let d = parse_pd(TREFOIL).unwrap();
        let t = smooth_at(&d, 2).unwrap();
        assert_eq!(t.d_plus.crossing_count(), 2);
        assert_eq!(t.d_minus.crossing_count(), 2);
    }

    #[test]
    fn skein_relation_for_brackets() {
        // <D> = A <D+> + A^{-1} <D->, with D's bracket unchanged by the
        // renumbering in smooth_at
        use crate::bracket::kauffman_bracket;
        for pd in [HOPF, TREFOIL, "X(1,2,2,1)"] {
            let d = parse_pd(pd).unwrap();
            for c in 0..d.crossing_count() {
                let t = smooth_at(&d, c).unwrap();
                let lhs = kauffman_bracket(&t.d, 16).unwrap();
                assert_eq!(lhs, kauffman_bracket(&d, 16).unwrap());
                let plus = kauffman_bracket(&t.d_plus, 16).unwrap();
                let minus = kauffman_bracket(&t.d_minus, 16).unwrap();
                let rhs = &plus.mul_monomial(1, 1) + &minus.mul_monomial(-1, 1);
                assert_eq!(lhs, rhs, "{pd} at {c}");
            }
        }
    }

    #[test]
    fn alpha_beta_commute_on_hopf() {
        let d = parse_pd(HOPF).unwrap();
        let t = smooth_at(&d, 1).unwrap();
        let maps = SkeinMaps::new(&t, 16).unwrap();
        let report = maps.verify_ses();
        assert!(report.pass, "{report:?}");
        for cell in &report.cells {
            assert!(cell.alpha_commutes && cell.beta_commutes, "{cell:?}");
        }
    }

    #[test]
    fn ses_exact_on_trefoil_all_crossings() {
        let d = parse_pd(TREFOIL).unwrap();
        for c in 0..3 {
            let t = smooth_at(&d, c).unwrap();
            let report = verify_skein_ses(&t, 16).unwrap();
            assert!(report.pass, "crossing {c}: {report:?}");
        }
    }

    #[test]
    fn mutated_beta_breaks_exactness() {
        // a beta that fails to kill negative-marker states has a smaller
        // kernel than im alpha
        let d = parse_pd(HOPF).unwrap();
        let t = smooth_at(&d, 1).unwrap();
        let maps = SkeinMaps::new(&t, 16).unwrap();
        let mut failed = false;
        for (i, j) in maps.relevant_cells() {
            let alpha = maps.alpha_matrix(i, j);
            let beta = maps.beta_matrix(i, j);
            if alpha.cols == 0 {
                continue;
            }
            // corrupt: send every killed generator to target row 0 as well
            let mut entries: Vec<_> = beta.entries().to_vec();
            for c in 0..beta.cols {
                if beta.entries().iter().all(|&(_, ec, _)| ec != c) && beta.rows > 0 {
                    entries.push((0, c, BigInt::one()));
                }
            }
            let corrupted = SparseIntegerMatrix::new(beta.rows, beta.cols, entries);
            if corrupted == beta {
                continue;
            }
            let dec_k = smith_decompose(&corrupted.to_dense());
            let kernel = dec_k.kernel_basis();
            let alpha_dense = alpha.to_dense();
            let dec_im = smith_decompose(&alpha_dense);
            let contained = kernel.iter().all(|v| dec_im.lattice_contains(v))
                && (0..alpha.cols).all(|c| {
                    let col = alpha_dense.column(c);
                    smith_decompose(&columns_to_dense(&kernel, beta.cols)).lattice_contains(&col)
                });
            if !contained {
                failed = true;
            }
        }
        assert!(failed, "corrupted beta must break im alpha = ker beta");
    }

    #[test]
    fn les_exact_on_hopf_and_trefoil() {
        for (pd, crossings) in [(HOPF, 2), (TREFOIL, 3)] {
            let d = parse_pd(pd).unwrap();
            for c in 0..crossings {
                let t = smooth_at(&d, c).unwrap();
                let report = long_exact_sequence_check(&t, 16).unwrap();
                assert!(report.pass, "{pd} at crossing {c}: {report:?}");
                assert!(report.composites_zero);
            }
        }
    }
}
