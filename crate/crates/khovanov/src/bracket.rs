//! Kauffman bracket and Jones polynomial by exact state sums, plus an
//! independent skein-recursion oracle used for cross-validation.

use crate::diagram::LinkDiagram;
use crate::laurent::{APoly, QPoly};
use crate::states::{check_crossing_bound, gradings, marker_vectors, EnhancedState, StateError};

/// `-A^2 - A^{-2}`, the bracket of one circle.
pub fn circle_factor_a() -> APoly {
    APoly::from_terms([(2, -1), (-2, -1)])
}

/// `q + q^{-1}`.
pub fn circle_factor_q() -> QPoly {
    QPoly::from_terms([(1, 1), (-1, 1)])
}

/// Kauffman bracket by the state sum
/// `sum over states of A^sigma (-A^2 - A^{-2})^(circle count)`.
pub fn kauffman_bracket(d: &LinkDiagram, max_crossings: usize) -> Result<APoly, StateError> {
    check_crossing_bound(d, max_crossings)?;
    let delta = circle_factor_a();
    let mut acc = APoly::zero();
    for (markers, circles) in marker_vectors(d) {
        acc += &delta.pow(circles.len() as u32).mul_monomial(markers.sigma(), 1);
    }
    Ok(acc)
}

/// Jones polynomial in Khovanov's variable, by the per-state sum
/// `K(s)(q) = (-1)^((w - sigma)/2) q^((3w - sigma)/2) (q + q^{-1})^(circle count)`.
///
/// In debug builds the result is checked coefficientwise against
/// `(-A)^(-3w) <D>` under the substitution `q = -A^{-2}`.
pub fn jones_k(d: &LinkDiagram, max_crossings: usize) -> Result<QPoly, StateError> {
    check_crossing_bound(d, max_crossings)?;
    let w = d.writhe();
    let q_circle = circle_factor_q();
    let mut acc = QPoly::zero();
    for (markers, circles) in marker_vectors(d) {
        let sigma = markers.sigma();
        let sign = if (w - sigma) / 2 % 2 == 0 { 1 } else { -1 };
        acc += &q_circle
            .pow(circles.len() as u32)
            .mul_monomial((3 * w - sigma) / 2, sign);
    }
    debug_assert_eq!(
        acc.substitute_q_neg_a_inv_sq(),
        {
            let bracket = kauffman_bracket(d, max_crossings)?;
            let sign = if w.rem_euclid(2) == 0 { 1 } else { -1 };
            bracket.mul_monomial(-3 * w, sign)
        },
        "K(L)(-A^-2) must equal (-A)^(-3w) <D>"
    );
    Ok(acc)
}

/// The monomial `K(S)(q) = (-1)^(i(S)) q^(j(S))` contributed by one enhanced
/// state. Returns the coefficient sign and the `q`-exponent.
pub fn enhanced_monomial(d: &LinkDiagram, state: &EnhancedState) -> Result<(i8, i64), StateError> {
    let g = gradings(d, state)?;
    Ok((if g.i % 2 == 0 { 1 } else { -1 }, g.j))
}

/// Kauffman bracket by recursive smoothing at the highest-numbered remaining
/// crossing: `<D> = A <D_+> + A^{-1} <D_->`, with `(-A^2 - A^{-2})^k` for a
/// crossingless diagram of `k` loops.
///
/// Shares no traversal code with the state-sum path; used as its oracle.
pub fn bracket_skein_oracle(d: &LinkDiagram, max_crossings: usize) -> Result<APoly, StateError> {
    check_crossing_bound(d, max_crossings)?;
    let crossings: Vec<[u32; 4]> = d.crossings().iter().map(|x| x.slots).collect();
    let labels = Relabel::identity(d.edge_count());
    Ok(recurse(&crossings, labels, d.free_loops()))
}

fn recurse(crossings: &[[u32; 4]], labels: Relabel, loops: u32) -> APoly {
    let Some((last, rest)) = crossings.split_last() else {
        return circle_factor_a().pow(loops);
    };
    let mut acc = APoly::zero();
    for (coeff_exp, joins) in [(1i64, [(0usize, 3usize), (1, 2)]), (-1, [(0, 1), (2, 3)])] {
        let mut labels = labels.clone();
        let mut loops = loops;
        for (s1, s2) in joins {
            if !labels.join(last[s1], last[s2]) {
                loops += 1; // the join closed an arc into a circle
            }
        }
        acc += &recurse(rest, labels, loops).mul_monomial(coeff_exp, 1);
    }
    acc
}

/// Arc identification map used by the skein recursion: smoothing a crossing
/// merges pairs of edge labels into single arcs.
#[derive(Clone)]
struct Relabel {
    class: Vec<u32>,
}

impl Relabel {
    fn identity(edge_count: u32) -> Self {
        Relabel {
            class: (0..=edge_count).collect(),
        }
    }

    fn find(&mut self, e: u32) -> u32 {
        let p = self.class[e as usize];
        if p == e {
            return e;
        }
        let root = self.find(p);
        self.class[e as usize] = root;
        root
    }

    /// Merge the arcs of `a` and `b`. Returns false when they were already
    /// one arc, i.e. the join closes a circle.
    fn join(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.class[ra.max(rb) as usize] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;
    use crate::states::DEFAULT_MAX_CROSSINGS;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    const HOPF: &str = "X(1,3,2,4) X(3,1,4,2)";

    fn bracket(pd: &str) -> APoly {
        kauffman_bracket(&parse_pd(pd).unwrap(), DEFAULT_MAX_CROSSINGS).unwrap()
    }

    fn jones(pd: &str) -> QPoly {
        jones_k(&parse_pd(pd).unwrap(), DEFAULT_MAX_CROSSINGS).unwrap()
    }

    #[test]
    fn bracket_of_unknot_and_unlink() {
        assert_eq!(bracket("O 1"), circle_factor_a());
        assert_eq!(bracket("O 2"), APoly::from_terms([(4, 1), (0, 2), (-4, 1)]));
        // empty diagram: empty product
        assert_eq!(bracket(""), APoly::one());
    }

    #[test]
    fn bracket_of_kinks() {
        // positive kink: -A^3 (-A^2 - A^{-2}) = A^5 + A
        assert_eq!(bracket("X(1,2,2,1)"), APoly::from_terms([(5, 1), (1, 1)]));
        // negative kink: mirror image
        assert_eq!(bracket("X(1,1,2,2)"), APoly::from_terms([(-5, 1), (-1, 1)]));
    }

    #[test]
    fn jones_of_crossingless_diagrams() {
        assert_eq!(jones("O 1"), circle_factor_q());
        assert_eq!(jones("O 2"), QPoly::from_terms([(2, 1), (0, 2), (-2, 1)]));
    }

    #[test]
    fn jones_is_writhe_normalized() {
        // the writhe factor cancels the kink
        assert_eq!(jones("X(1,2,2,1)"), circle_factor_q());
        assert_eq!(jones("X(1,1,2,2)"), circle_factor_q());
    }

    #[test]
    fn jones_of_trefoil_and_hopf() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.writhe(), 3);
        assert_eq!(
            jones(TREFOIL),
            QPoly::from_terms([(1, 1), (3, 1), (5, 1), (9, -1)])
        );
        // this Hopf diagram has writhe -2
        assert_eq!(
            jones(HOPF),
            QPoly::from_terms([(0, 1), (-2, 1), (-4, 1), (-6, 1)])
        );
    }

    #[test]
    fn enhanced_monomials() {
        let unknot = parse_pd("O 1").unwrap();
        let state = |signs: Vec<i8>| EnhancedState {
            markers: crate::diagram::MarkerVector(vec![]),
            circle_signs: signs,
        };
        assert_eq!(enhanced_monomial(&unknot, &state(vec![1])).unwrap(), (1, -1));
        assert_eq!(enhanced_monomial(&unknot, &state(vec![-1])).unwrap(), (1, 1));

        let trefoil = parse_pd(TREFOIL).unwrap();
        let s = EnhancedState {
            markers: crate::diagram::MarkerVector(vec![1, 1, 1]),
            circle_signs: vec![1, 1],
        };
        assert_eq!(enhanced_monomial(&trefoil, &s).unwrap(), (1, 1));
    }

    #[test]
    fn oracle_matches_state_sum() {
        for pd in ["O 1", "X(1,2,2,1)", HOPF, TREFOIL] {
            let d = parse_pd(pd).unwrap();
            assert_eq!(
                bracket_skein_oracle(&d, DEFAULT_MAX_CROSSINGS).unwrap(),
                kauffman_bracket(&d, DEFAULT_MAX_CROSSINGS).unwrap(),
                "oracle disagrees on {pd}"
            );
        }
    }

    #[test]
    fn oracle_base_case() {
        let d = parse_pd("O 1").unwrap();
        assert_eq!(
            bracket_skein_oracle(&d, DEFAULT_MAX_CROSSINGS).unwrap(),
            circle_factor_a()
        );
    }
}
