//! Kauffman states, enhanced states, and their numerical characteristics.
//!
//! An enhanced state is a marker vector together with a sign on each circle
//! of the resulting smoothing. Enumeration is streamed and deterministic:
//! marker vectors in lexicographic order with `+` before `-`, then circle
//! signs in the same order, keyed by canonical circle identifier.

use crate::diagram::{resolve_state, CircleSet, LinkDiagram, MarkerVector};
use thiserror::Error;

/// Diagrams above this crossing count are refused by default; exponential
/// state enumeration makes larger inputs look like hangs.
pub const DEFAULT_MAX_CROSSINGS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("diagram has {crossings} crossings, above the bound {bound}; raise --max-crossings to proceed")]
    CrossingBound { crossings: usize, bound: usize },
    #[error("circle signs cover {got} circles, resolution has {expected}")]
    CircleSignMismatch { got: usize, expected: usize },
}

pub fn check_crossing_bound(d: &LinkDiagram, bound: usize) -> Result<(), StateError> {
    if d.crossing_count() > bound {
        Err(StateError::CrossingBound {
            crossings: d.crossing_count(),
            bound,
        })
    } else {
        Ok(())
    }
}

/// A chain-group generator: markers plus a sign per circle of the smoothing.
///
/// `circle_signs[i]` is the sign of the `i`-th circle in canonical order
/// (ascending circle identifier) of `resolve_state(d, markers)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnhancedState {
    pub markers: MarkerVector,
    pub circle_signs: Vec<i8>,
}

impl EnhancedState {
    /// Difference between the numbers of plus and minus circles.
    pub fn tau(&self) -> i64 {
        self.circle_signs.iter().map(|&s| s as i64).sum()
    }
}

/// `sigma`, `tau` and the circle count of one enhanced state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateStats {
    pub sigma: i64,
    pub tau: i64,
    pub circle_count: usize,
}

/// The four gradings of an enhanced state.
///
/// `i` and `j` are the oriented (Khovanov) gradings, `I` and `J` the framed
/// ones; the framed pair never consults the orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(non_snake_case)]
pub struct Gradings {
    pub i: i64,
    pub j: i64,
    pub I: i64,
    pub J: i64,
}

/// Compute `sigma`, `tau`, `|s|` for a state of `d`.
pub fn state_stats(d: &LinkDiagram, state: &EnhancedState) -> Result<StateStats, StateError> {
    let circles = resolve_state(d, &state.markers);
    if circles.len() != state.circle_signs.len() {
        return Err(StateError::CircleSignMismatch {
            got: state.circle_signs.len(),
            expected: circles.len(),
        });
    }
    Ok(StateStats {
        sigma: state.markers.sigma(),
        tau: state.tau(),
        circle_count: circles.len(),
    })
}

/// All four gradings of a state:
/// `i = (w - sigma)/2`, `j = (3w - sigma - 2 tau)/2`, `I = sigma`,
/// `J = sigma + 2 tau`.
pub fn gradings(d: &LinkDiagram, state: &EnhancedState) -> Result<Gradings, StateError> {
    let stats = state_stats(d, state)?;
    Ok(gradings_from(d.writhe(), stats.sigma, stats.tau))
}

pub(crate) fn gradings_from(writhe: i64, sigma: i64, tau: i64) -> Gradings {
    debug_assert_eq!((writhe - sigma).rem_euclid(2), 0, "sigma and writhe parity");
    Gradings {
        i: (writhe - sigma) / 2,
        j: (3 * writhe - sigma - 2 * tau) / 2,
        I: sigma,
        J: sigma + 2 * tau,
    }
}

/// Marker vectors of `d` in enumeration order, paired with their smoothings.
pub fn marker_vectors(d: &LinkDiagram) -> impl Iterator<Item = (MarkerVector, CircleSet)> + '_ {
    let n = d.crossing_count();
    (0u64..(1u64 << n)).map(move |bits| {
        let markers = MarkerVector(
            (0..n)
                .map(|k| if bits >> (n - 1 - k) & 1 == 0 { 1 } else { -1 })
                .collect(),
        );
        let circles = resolve_state(d, &markers);
        (markers, circles)
    })
}

/// Stream every enhanced state of `d` in deterministic order.
///
/// Yields `sum over markers of 2^(circle count)` states. Refuses diagrams
/// with more than `max_crossings` crossings.
pub fn enumerate_enhanced_states(
    d: &LinkDiagram,
    max_crossings: usize,
) -> Result<impl Iterator<Item = EnhancedState> + '_, StateError> {
    check_crossing_bound(d, max_crossings)?;
    Ok(marker_vectors(d).flat_map(|(markers, circles)| {
        let c = circles.len();
        (0u64..(1u64 << c)).map(move |bits| EnhancedState {
            markers: markers.clone(),
            circle_signs: (0..c)
                .map(|i| if bits >> (c - 1 - i) & 1 == 0 { 1 } else { -1 })
                .collect(),
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;
    use std::collections::HashSet;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    const HOPF: &str = "X(1,3,2,4) X(3,1,4,2)";

    #[test]
    fn unknot_has_two_enhanced_states() {
        let d = parse_pd("O 1").unwrap();
        let states: Vec<_> = enumerate_enhanced_states(&d, 16).unwrap().collect();
        assert_eq!(states.len(), 2);
    }

    #[test]
    fn hopf_has_twelve_enhanced_states() {
        let d = parse_pd(HOPF).unwrap();
        assert_eq!(enumerate_enhanced_states(&d, 16).unwrap().count(), 12);
    }

    #[test]
    fn trefoil_count_matches_circle_recount() {
        // Independent recount: sum of 2^(circle count) over marker vectors.
        let d = parse_pd(TREFOIL).unwrap();
        let expected: usize = marker_vectors(&d).map(|(_, c)| 1usize << c.len()).sum();
        assert_eq!(expected, 30); // 2^2 + 3*2 + 3*2^2 + 2^3
        assert_eq!(
            enumerate_enhanced_states(&d, 16).unwrap().count(),
            expected
        );
    }

    #[test]
    fn enumeration_is_duplicate_free() {
        for pd in [TREFOIL, HOPF, "X(1,2,2,1) O 1"] {
            let d = parse_pd(pd).unwrap();
            let states: Vec<_> = enumerate_enhanced_states(&d, 16).unwrap().collect();
            let set: HashSet<_> = states.iter().cloned().collect();
            assert_eq!(states.len(), set.len(), "duplicates for {pd}");
        }
    }

    #[test]
    fn crossing_bound_guard() {
        let d = parse_pd(TREFOIL).unwrap();
        assert!(matches!(
            enumerate_enhanced_states(&d, 2).map(|_| ()),
            Err(StateError::CrossingBound { crossings: 3, bound: 2 })
        ));
    }

    #[test]
    fn stats_definitions() {
        let d = parse_pd(TREFOIL).unwrap();
        let s = EnhancedState {
            markers: MarkerVector(vec![1, 1, 1]),
            circle_signs: vec![1, 1],
        };
        let st = state_stats(&d, &s).unwrap();
        assert_eq!((st.sigma, st.tau, st.circle_count), (3, 2, 2));

        let hopf = parse_pd(HOPF).unwrap();
        let s = EnhancedState {
            markers: MarkerVector(vec![1, -1]),
            circle_signs: vec![-1],
        };
        let st = state_stats(&hopf, &s).unwrap();
        assert_eq!((st.sigma, st.tau, st.circle_count), (0, -1, 1));
    }

    #[test]
    fn stats_rejects_sign_mismatch() {
        let d = parse_pd(HOPF).unwrap();
        let s = EnhancedState {
            markers: MarkerVector(vec![1, -1]), // one circle
            circle_signs: vec![1, -1],
        };
        assert!(matches!(
            state_stats(&d, &s),
            Err(StateError::CircleSignMismatch { .. })
        ));
    }

    #[test]
    fn grading_examples() {
        let unknot = parse_pd("O 1").unwrap();
        let plus = EnhancedState {
            markers: MarkerVector(vec![]),
            circle_signs: vec![1],
        };
        let g = gradings(&unknot, &plus).unwrap();
        assert_eq!((g.i, g.j, g.I, g.J), (0, -1, 0, 2));
        let minus = EnhancedState {
            markers: MarkerVector(vec![]),
            circle_signs: vec![-1],
        };
        let g = gradings(&unknot, &minus).unwrap();
        assert_eq!((g.i, g.j, g.I, g.J), (0, 1, 0, -2));

        let trefoil = parse_pd(TREFOIL).unwrap();
        let s = EnhancedState {
            markers: MarkerVector(vec![1, 1, 1]),
            circle_signs: vec![1, 1],
        };
        let g = gradings(&trefoil, &s).unwrap();
        assert_eq!((g.i, g.j, g.I, g.J), (0, 1, 3, 7));
    }

    #[test]
    fn grading_identities_hold_for_all_states() {
        for pd in [TREFOIL, HOPF, "X(1,2,2,1)", "X(1,1,2,2) O 1"] {
            let d = parse_pd(pd).unwrap();
            let w = d.writhe();
            let n = d.crossing_count() as i64;
            for s in enumerate_enhanced_states(&d, 16).unwrap() {
                let g = gradings(&d, &s).unwrap();
                assert_eq!(2 * g.j + g.J, 3 * w);
                assert_eq!(2 * g.i + g.I, w);
                let sigma = s.markers.sigma();
                assert_eq!(sigma.rem_euclid(2), w.rem_euclid(2));
                assert_eq!(sigma.rem_euclid(2), n.rem_euclid(2));
            }
        }
    }
}
