//! The `Z[c]` variant of the complex: generators are formal products
//! `c^k * S` with `k >= 0`, in bidegree `(i(S), j(S) + 2k)`.
//!
//! States adjacent in the ordinary complex stay adjacent at equal powers of
//! `c`. One extra adjacency raises the power: `c^(k+1) S2` is adjacent to
//! `c^k S1` when the markers differ at a single crossing (positive in `S1`),
//! the common circles keep their signs, and a negative circle of `S1` splits
//! into two positive circles of `S2`. The `(-1)^t` sign rule is shared with
//! the ordinary differential; `d^2 = 0` over every window is part of the
//! test suite.
//!
//! Every cell `(i, j)` is finitely generated even though infinitely many
//! cells are nonzero; a `JWindow` picks which `j` columns to compute, and
//! since the differential preserves `j` the window never truncates a cell's
//! data.

use crate::complex::KhovanovComplex;
use crate::diagram::LinkDiagram;
use crate::homology::{cell_homology, AbelianGroupPresentation, GroupJson};
use crate::matrix::SparseIntegerMatrix;
use crate::qlinalg::{QCellHomology, QMat, Q};
use crate::states::StateError;
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Closed `j`-window for `Z[c]` computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JWindow {
    pub j_min: i64,
    pub j_max: i64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WindowError {
    #[error("empty window: j_min {j_min} > j_max {j_max}")]
    Empty { j_min: i64, j_max: i64 },
}

impl JWindow {
    pub fn new(j_min: i64, j_max: i64) -> Result<Self, WindowError> {
        if j_min > j_max {
            return Err(WindowError::Empty { j_min, j_max });
        }
        Ok(JWindow { j_min, j_max })
    }

    pub fn contains(&self, j: i64) -> bool {
        self.j_min <= j && j <= self.j_max
    }
}

/// The `Z[c]`-module chain complex of a diagram.
pub struct ZcComplex {
    cx: KhovanovComplex,
    /// `i` range and the `j(S)` range over all enhanced states.
    i_range: (i64, i64),
    state_j_range: (i64, i64),
}

/// One generator `c^power * state`, identified by the underlying state's
/// global index in the ordinary complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CGenerator {
    pub power: u32,
    pub state_index: usize,
}

impl ZcComplex {
    pub fn new(d: &LinkDiagram, max_crossings: usize) -> Result<Self, StateError> {
        let cx = KhovanovComplex::new(d, max_crossings)?;
        let dims = cx.cell_dimensions();
        let mut i_range = (i64::MAX, i64::MIN);
        let mut j_range = (i64::MAX, i64::MIN);
        for &(i, j) in dims.keys() {
            i_range = (i_range.0.min(i), i_range.1.max(i));
            j_range = (j_range.0.min(j), j_range.1.max(j));
        }
        Ok(ZcComplex {
            cx,
            i_range,
            state_j_range: j_range,
        })
    }

    pub fn inner(&self) -> &KhovanovComplex {
        &self.cx
    }

    pub fn i_range(&self) -> (i64, i64) {
        self.i_range
    }

    /// The parity shared by `j(S)` over all states, hence by every nonzero
    /// `Z[c]` column.
    pub fn j_parity(&self) -> i64 {
        self.state_j_range.0.rem_euclid(2)
    }

    /// Generators of cell `(i, j)`: `c^k S` with `j(S) = j - 2k`, ordered by
    /// ascending power, then by state enumeration order.
    pub fn cell(&self, i: i64, j: i64) -> Vec<CGenerator> {
        let mut out = Vec::new();
        let mut k = 0u32;
        loop {
            let js = j - 2 * k as i64;
            if js < self.state_j_range.0 {
                break;
            }
            for &s in self.cx.cell_indices(i, js) {
                out.push(CGenerator {
                    power: k,
                    state_index: s,
                });
            }
            k += 1;
        }
        out
    }

    /// The differential `C^(i,j) -> C^(i+1,j)`: block diagonal in the power
    /// with the ordinary incidence, plus power-raising blocks for the
    /// negative-split-to-two-positives adjacency.
    pub fn differential(&self, i: i64, j: i64) -> SparseIntegerMatrix {
        let sources = self.cell(i, j);
        let targets = self.cell(i + 1, j);
        let tpos: BTreeMap<(u32, usize), usize> = targets
            .iter()
            .enumerate()
            .map(|(p, g)| ((g.power, g.state_index), p))
            .collect();
        let mut entries = Vec::new();
        for (col, g) in sources.iter().enumerate() {
            for (t, sign) in self.cx.state_boundary(g.state_index) {
                let row = tpos[&(g.power, t)];
                entries.push((row, col, BigInt::from(sign)));
            }
            for (t, sign) in self.cx.power_raising_boundary(g.state_index) {
                let row = tpos[&(g.power + 1, t)];
                entries.push((row, col, BigInt::from(sign)));
            }
        }
        SparseIntegerMatrix::new(targets.len(), sources.len(), entries)
    }

    /// Multiplication by `c` as the chain map `C^(i,j) -> C^(i,j+2)`,
    /// `c^k S -> c^(k+1) S`.
    pub fn mult_c(&self, i: i64, j: i64) -> SparseIntegerMatrix {
        let sources = self.cell(i, j);
        let targets = self.cell(i, j + 2);
        let tpos: BTreeMap<(u32, usize), usize> = targets
            .iter()
            .enumerate()
            .map(|(p, g)| ((g.power, g.state_index), p))
            .collect();
        let entries = sources
            .iter()
            .enumerate()
            .map(|(col, g)| (tpos[&(g.power + 1, g.state_index)], col, BigInt::one()))
            .collect();
        SparseIntegerMatrix::new(targets.len(), sources.len(), entries)
    }

    /// Exact homology of one cell.
    pub fn cell_homology(&self, i: i64, j: i64) -> AbelianGroupPresentation {
        let outgoing = self.differential(i, j).to_dense();
        let incoming = self.differential(i - 1, j).to_dense();
        cell_homology(&outgoing, &incoming)
    }

    /// Is the induced map `H^(i,j) -> H^(i,j+2)` of multiplication by `c`
    /// an isomorphism over the rationals?
    pub fn mult_c_is_iso(&self, i: i64, j: i64) -> bool {
        let h_src = QCellHomology::new(
            &QMat::from_sparse(&self.differential(i, j)),
            &QMat::from_sparse(&self.differential(i - 1, j)),
        );
        let h_tgt = QCellHomology::new(
            &QMat::from_sparse(&self.differential(i, j + 2)),
            &QMat::from_sparse(&self.differential(i - 1, j + 2)),
        );
        if h_src.dim() != h_tgt.dim() {
            return false;
        }
        if h_src.dim() == 0 {
            return true;
        }
        let c = QMat::from_sparse(&self.mult_c(i, j));
        let cols: Vec<Vec<Q>> = h_src
            .reps
            .iter()
            .map(|rep| {
                let image = c.mul_vec(rep);
                h_tgt.try_project(&image).expect("mult-c image is a cycle")
            })
            .collect();
        QMat::from_columns(&cols, h_tgt.dim()).rank() == h_src.dim()
    }
}

/// `Z[c]` homology over a window, with per-`i` stabilization witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZcTable {
    pub window: JWindow,
    groups: BTreeMap<(i64, i64), AbelianGroupPresentation>,
    stabilization: Vec<(i64, Option<i64>)>,
}

impl ZcTable {
    pub fn get(&self, i: i64, j: i64) -> Option<&AbelianGroupPresentation> {
        self.groups.get(&(i, j))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &AbelianGroupPresentation)> {
        self.groups.iter()
    }

    /// `stabilized_from` per `i`: the smallest in-window `j` from which all
    /// consecutive same-parity groups are isomorphic, witnessed by the
    /// multiplication-by-`c` map having full rank over the rationals.
    pub fn stabilization(&self) -> &[(i64, Option<i64>)] {
        &self.stabilization
    }

    pub fn to_json(&self) -> ZcJson {
        let mut rows: Vec<_> = self.groups.iter().collect();
        rows.sort_by_key(|(&(i, j), _)| (j, i));
        ZcJson {
            window: [self.window.j_min, self.window.j_max],
            groups: rows
                .into_iter()
                .map(|(&(i, j), g)| GroupJson {
                    i,
                    j,
                    free_rank: g.free_rank,
                    torsion: g.torsion.iter().map(|t| t.to_string().parse().expect("torsion fits")).collect(),
                })
                .collect(),
            stabilization: self
                .stabilization
                .iter()
                .map(|&(i, s)| StabilizationJson {
                    i,
                    stabilized_from: s,
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serialization cannot fail")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut rows: Vec<_> = self.groups.iter().collect();
        rows.sort_by_key(|(&(i, j), _)| (j, i));
        if rows.is_empty() {
            out.push_str("all in-window groups trivial\n");
        }
        for (&(i, j), g) in rows {
            out.push_str(&format!("i={i:<4} j={j:<4} {g}\n"));
        }
        for (i, s) in &self.stabilization {
            match s {
                Some(j0) => out.push_str(&format!("i={i:<4} stabilized from j={j0}\n")),
                None => out.push_str(&format!("i={i:<4} not stabilized in window\n")),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ZcJson {
    pub window: [i64; 2],
    pub groups: Vec<GroupJson>,
    pub stabilization: Vec<StabilizationJson>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct StabilizationJson {
    pub i: i64,
    pub stabilized_from: Option<i64>,
}

/// Compute the windowed `Z[c]` homology table of a diagram.
pub fn zc_homology_table(
    d: &LinkDiagram,
    window: JWindow,
    max_crossings: usize,
) -> Result<ZcTable, StateError> {
    let zc = ZcComplex::new(d, max_crossings)?;
    let mut groups = BTreeMap::new();
    let (i_min, i_max) = zc.i_range();
    let parity = zc.j_parity();
    let js: Vec<i64> = (window.j_min..=window.j_max)
        .filter(|j| j.rem_euclid(2) == parity)
        .collect();
    let mut stabilization = Vec::new();
    for i in i_min..=i_max {
        for &j in &js {
            let h = zc.cell_homology(i, j);
            if !h.is_trivial() {
                groups.insert((i, j), h);
            }
        }
        // scan for the stabilization threshold: all consecutive in-window
        // pairs from j0 on must be isomorphic with a full-rank c-map
        let mut stabilized_from = None;
        for (idx, &j0) in js.iter().enumerate() {
            let ok = js[idx..].windows(2).all(|w| {
                groups.get(&(i, w[0])) == groups.get(&(i, w[1])) && zc.mult_c_is_iso(i, w[0])
            });
            if ok && idx + 1 < js.len() {
                stabilized_from = Some(j0);
                break;
            }
        }
        stabilization.push((i, stabilized_from));
    }
    Ok(ZcTable {
        window,
        groups,
        stabilization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    const KINK: &str = "X(1,2,2,1)";

    fn window(a: i64, b: i64) -> JWindow {
        JWindow::new(a, b).unwrap()
    }

    #[test]
    fn window_validation() {
        assert!(JWindow::new(3, -3).is_err());
    }

    #[test]
    fn unknot_zc_groups_stabilize() {
        let d = parse_pd("O 1").unwrap();
        let t = zc_homology_table(&d, window(-1, 9), 16).unwrap();
        // Z at j = -1, then Z^2 at every odd j >= 1
        assert_eq!(t.get(0, -1).map(|g| (g.free_rank, g.torsion.len())), Some((1, 0)));
        for j in [1, 3, 5, 7, 9] {
            assert_eq!(
                t.get(0, j).map(|g| (g.free_rank, g.torsion.len())),
                Some((2, 0)),
                "j={j}"
            );
        }
        assert_eq!(t.stabilization(), &[(0, Some(1))]);
    }

    #[test]
    fn zero_power_block_reproduces_ordinary_differential() {
        let d = parse_pd(TREFOIL).unwrap();
        let zc = ZcComplex::new(&d, 16).unwrap();
        // at the minimal state j both cells consist of k=0 generators only
        // and no power-raising target exists, so the matrices coincide
        let j_min = zc.state_j_range.0;
        let (i_min, i_max) = zc.i_range();
        for i in i_min..=i_max {
            assert_eq!(
                zc.differential(i, j_min),
                zc.inner().differential_matrix(i, j_min),
                "cell ({i},{j_min})"
            );
        }
        // on every cell, the k=0 -> k=0 block agrees with the ordinary
        // differential entrywise
        let mut nontrivial = false;
        for (&(i, j), _) in &zc.inner().cell_dimensions() {
            let full = zc.differential(i, j);
            let plain = zc.inner().differential_matrix(i, j);
            nontrivial |= !plain.is_zero();
            for (r, c, v) in plain.entries() {
                assert!(
                    full.entries().iter().any(|(fr, fc, fv)| fr == r && fc == c && fv == v),
                    "k=0 block mismatch at ({i},{j})"
                );
            }
        }
        assert!(nontrivial);
    }

    #[test]
    fn negative_kink_has_power_raising_entries() {
        // the negative kink splits its single circle when the marker flips;
        // the negative-circle split carries the extra c-adjacency
        let d = parse_pd("X(1,1,2,2)").unwrap();
        let zc = ZcComplex::new(&d, 16).unwrap();
        let (i_min, i_max) = zc.i_range();
        let mut found = false;
        for i in i_min..=i_max {
            for j in -7..=7 {
                let m = zc.differential(i, j);
                let sources = zc.cell(i, j);
                let targets = zc.cell(i + 1, j);
                for (r, c, _) in m.entries() {
                    if targets[*r].power == sources[*c].power + 1 {
                        found = true;
                    }
                }
            }
        }
        assert!(found, "expected at least one power-raising adjacency");
    }

    #[test]
    fn zc_d_squared_zero_on_windows() {
        for pd in ["O 1", KINK, "X(1,1,2,2)", "X(1,3,2,4) X(3,1,4,2)", TREFOIL] {
            let d = parse_pd(pd).unwrap();
            let zc = ZcComplex::new(&d, 16).unwrap();
            let (i_min, i_max) = zc.i_range();
            for i in i_min..=i_max {
                for j in -12..=12 {
                    let d1 = zc.differential(i, j);
                    let d2 = zc.differential(i + 1, j);
                    assert!(
                        d2.multiply(&d1).is_zero(),
                        "zc d^2 != 0 for {pd} at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn window_monotonicity() {
        // enlarging the window does not change shared cells
        let d = parse_pd(TREFOIL).unwrap();
        let small = zc_homology_table(&d, window(1, 7), 16).unwrap();
        let large = zc_homology_table(&d, window(-3, 13), 16).unwrap();
        for (&(i, j), g) in small.iter() {
            assert_eq!(large.get(i, j), Some(g), "cell ({i},{j})");
        }
    }

    #[test]
    fn bidegree_preservation() {
        let d = parse_pd(KINK).unwrap();
        let zc = ZcComplex::new(&d, 16).unwrap();
        for j in -6..=6 {
            let m = zc.differential(0, j);
            assert_eq!(m.cols, zc.cell(0, j).len());
            assert_eq!(m.rows, zc.cell(1, j).len());
        }
    }
}
