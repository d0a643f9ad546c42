//! Exact integer homology of the bigraded complex via Smith normal form.

use crate::complex::KhovanovComplex;
use crate::diagram::LinkDiagram;
use crate::laurent::QPoly;
use crate::matrix::{smith_decompose, DenseMatrix};
use crate::states::StateError;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

pub use crate::matrix::smith_normal_form;

/// A finitely generated abelian group: free rank plus a divisor chain of
/// torsion coefficients, each `> 1` and dividing the next.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AbelianGroupPresentation {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroupPresentation {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Homology groups per `(i, j)`, trivial cells omitted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomologyTable {
    groups: BTreeMap<(i64, i64), AbelianGroupPresentation>,
}

impl HomologyTable {
    pub fn insert(&mut self, i: i64, j: i64, group: AbelianGroupPresentation) {
        if !group.is_trivial() {
            self.groups.insert((i, j), group);
        }
    }

    pub fn get(&self, i: i64, j: i64) -> Option<&AbelianGroupPresentation> {
        self.groups.get(&(i, j))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &AbelianGroupPresentation)> {
        self.groups.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn total_free_rank(&self) -> usize {
        self.groups.values().map(|g| g.free_rank).sum()
    }

    pub fn all_torsion(&self) -> Vec<BigInt> {
        let mut t: Vec<BigInt> = self
            .groups
            .values()
            .flat_map(|g| g.torsion.iter().cloned())
            .collect();
        t.sort();
        t
    }

    /// `sum over cells of (-1)^i q^j free_rank`.
    pub fn graded_euler_char(&self) -> QPoly {
        let mut p = QPoly::zero();
        for (&(i, j), g) in &self.groups {
            let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(j, BigInt::from(sign * g.free_rank as i64));
        }
        p
    }

    /// JSON schema: `{"groups":[{"i":..,"j":..,"free_rank":..,"torsion":[..]},..]}`
    /// sorted by `(j, i)`. Trivial groups are omitted by construction.
    pub fn to_json(&self) -> HomologyJson {
        let mut rows: Vec<_> = self.groups.iter().collect();
        rows.sort_by_key(|(&(i, j), _)| (j, i));
        HomologyJson {
            groups: rows
                .into_iter()
                .map(|(&(i, j), g)| GroupJson {
                    i,
                    j,
                    free_rank: g.free_rank,
                    torsion: g.torsion.iter().map(|t| t.to_string().parse().expect("torsion fits in JSON number")).collect(),
                })
                .collect(),
        }
    }

    /// Deterministic serialized form, used for byte-identical comparisons.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serialization cannot fail")
    }

    /// Plain-text rendering for the CLI, one populated cell per line.
    pub fn render_text(&self) -> String {
        if self.groups.is_empty() {
            return "all groups trivial\n".into();
        }
        let mut rows: Vec<_> = self.groups.iter().collect();
        rows.sort_by_key(|(&(i, j), _)| (j, i));
        let mut out = String::new();
        for (&(i, j), g) in rows {
            out.push_str(&format!("i={i:<4} j={j:<4} {g}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct HomologyJson {
    pub groups: Vec<GroupJson>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GroupJson {
    pub i: i64,
    pub j: i64,
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

/// Homology of one cell given its outgoing and incoming differentials.
///
/// `free_rank = dim ker - rank(incoming)`; torsion comes from the Smith
/// divisors of the incoming matrix expressed in a kernel basis.
pub fn cell_homology(outgoing: &DenseMatrix, incoming: &DenseMatrix) -> AbelianGroupPresentation {
    debug_assert_eq!(outgoing.cols, incoming.rows);
    let dec_out = smith_decompose(outgoing);
    let kernel_dim = outgoing.cols - dec_out.rank;
    if kernel_dim == 0 {
        return AbelianGroupPresentation::default();
    }
    // incoming image in kernel coordinates: rows rank.. of V^{-1} * incoming
    let y_full = dec_out.v_inv.multiply(incoming);
    debug_assert!(
        y_full.data[..dec_out.rank]
            .iter()
            .all(|row| row.iter().all(BigInt::is_zero)),
        "image must lie in the kernel (d^2 = 0)"
    );
    let y = DenseMatrix::from_rows(y_full.data[dec_out.rank..].to_vec());
    let dec_in = smith_decompose(&y);
    AbelianGroupPresentation {
        free_rank: kernel_dim - dec_in.rank,
        torsion: dec_in
            .divisors
            .into_iter()
            .filter(|d| d > &BigInt::from(1))
            .collect(),
    }
}

/// The full homology table of the complex.
pub fn homology_of_complex(cx: &KhovanovComplex) -> HomologyTable {
    let mut table = HomologyTable::default();
    for (&(i, j), _) in &cx.cell_dimensions() {
        let outgoing = cx.differential_matrix(i, j).to_dense();
        let incoming = cx.differential_matrix(i - 1, j).to_dense();
        table.insert(i, j, cell_homology(&outgoing, &incoming));
    }
    table
}

/// Khovanov homology of a diagram.
pub fn homology_table(d: &LinkDiagram, max_crossings: usize) -> Result<HomologyTable, StateError> {
    let cx = KhovanovComplex::new(d, max_crossings)?;
    Ok(homology_of_complex(&cx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::jones_k;
    use crate::diagram::parse_pd;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    const HOPF: &str = "X(1,3,2,4) X(3,1,4,2)";

    fn z() -> AbelianGroupPresentation {
        AbelianGroupPresentation {
            free_rank: 1,
            torsion: vec![],
        }
    }

    #[test]
    fn unknot_baseline() {
        let t = homology_table(&parse_pd("O 1").unwrap(), 16).unwrap();
        assert_eq!(t.get(0, -1), Some(&z()));
        assert_eq!(t.get(0, 1), Some(&z()));
        assert_eq!(t.iter().count(), 2);
    }

    #[test]
    fn kink_has_unknot_homology() {
        let unknot = homology_table(&parse_pd("O 1").unwrap(), 16).unwrap();
        for kink in ["X(1,2,2,1)", "X(1,1,2,2)"] {
            let t = homology_table(&parse_pd(kink).unwrap(), 16).unwrap();
            assert_eq!(t, unknot, "kink {kink}");
        }
    }

    #[test]
    fn right_trefoil_table() {
        let t = homology_table(&parse_pd(TREFOIL).unwrap(), 16).unwrap();
        assert_eq!(t.get(0, 1), Some(&z()));
        assert_eq!(t.get(0, 3), Some(&z()));
        assert_eq!(t.get(2, 5), Some(&z()));
        assert_eq!(t.get(3, 9), Some(&z()));
        assert_eq!(
            t.get(3, 7),
            Some(&AbelianGroupPresentation {
                free_rank: 0,
                torsion: vec![2.into()],
            })
        );
        assert_eq!(t.iter().count(), 5);
        assert_eq!(t.total_free_rank(), 4);
        assert_eq!(t.all_torsion(), vec![BigInt::from(2)]);
    }

    #[test]
    fn hopf_table() {
        // this PD is the negative Hopf link
        let t = homology_table(&parse_pd(HOPF).unwrap(), 16).unwrap();
        for (i, j) in [(0, 0), (0, -2), (-2, -4), (-2, -6)] {
            assert_eq!(t.get(i, j), Some(&z()), "cell ({i},{j})");
        }
        assert_eq!(t.iter().count(), 4);
    }

    #[test]
    fn euler_char_of_homology_equals_jones() {
        for pd in ["O 1", "O 2", "X(1,2,2,1)", HOPF, TREFOIL] {
            let d = parse_pd(pd).unwrap();
            let t = homology_table(&d, 16).unwrap();
            assert_eq!(t.graded_euler_char(), jones_k(&d, 16).unwrap(), "{pd}");
        }
    }

    #[test]
    fn ordering_independence() {
        let d = parse_pd(TREFOIL).unwrap();
        let base = homology_table(&d, 16).unwrap().to_json_string();
        for perm in [[1, 2, 0], [2, 1, 0], [0, 2, 1]] {
            let p = d.permute_crossings(&perm);
            assert_eq!(homology_table(&p, 16).unwrap().to_json_string(), base);
        }
    }

    #[test]
    fn json_schema_shape() {
        let t = homology_table(&parse_pd("O 1").unwrap(), 16).unwrap();
        assert_eq!(
            t.to_json_string(),
            r#"{"groups":[{"i":0,"j":-1,"free_rank":1,"torsion":[]},{"i":0,"j":1,"free_rank":1,"torsion":[]}]}"#
        );
    }

    #[test]
    fn mirror_flips_gradings() {
        let d = parse_pd(TREFOIL).unwrap();
        let t = homology_table(&d, 16).unwrap();
        let tm = homology_table(&d.mirror(), 16).unwrap();
        // free parts mirror as (i,j) -> (-i,-j)
        for (&(i, j), g) in t.iter() {
            if g.free_rank > 0 {
                let gm = tm.get(-i, -j).expect("mirrored cell");
                assert_eq!(gm.free_rank, g.free_rank);
            }
        }
    }
}
