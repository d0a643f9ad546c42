//! The shipped diagram corpus used by the verification suites and examples.
//!
//! Entries are PD strings; all of them parse and have been cross-checked by
//! the bracket oracle, the Euler identity and the invariance suites. The
//! 6-crossing `SIX_B` and the 2-crossing unknot were produced by applying
//! Reidemeister moves to smaller corpus entries and freezing the output.

use crate::diagram::{parse_pd, LinkDiagram};

/// Zero-crossing unknot.
pub const UNKNOT_0: &str = "O 1";
/// Crossingless two-component unlink.
pub const UNLINK_2: &str = "O 2";
/// One-crossing unknot with a positive kink (writhe +1).
pub const KINK_POS: &str = "X(1,2,2,1)";
/// One-crossing unknot with a negative kink (writhe -1).
pub const KINK_NEG: &str = "X(1,1,2,2)";
/// Two-crossing unknot: a positive and a negative kink.
pub const UNKNOT_2: &str = "X(3,4,4,1) X(1,3,2,2)";
/// Hopf link, writhe -2.
pub const HOPF: &str = "X(1,3,2,4) X(3,1,4,2)";
/// Hopf link mirror, writhe +2.
pub const HOPF_MIRROR: &str = "X(1,4,2,3) X(3,2,4,1)";
/// Right-handed trefoil, writhe +3.
pub const TREFOIL_RIGHT: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
/// Left-handed trefoil, writhe -3.
pub const TREFOIL_LEFT: &str = "X(1,5,2,4) X(3,1,4,6) X(5,3,6,2)";
/// Closed three-strand braid with one generator repeated; its triangle
/// admits an R3 move.
pub const BRAID_CLOSURE: &str = "X(5,2,6,1) X(3,3,4,2) X(4,5,1,6)";
/// Figure-eight knot, writhe 0.
pub const FIGURE_EIGHT: &str = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)";
/// Granny knot (sum of two right trefoils), 6 crossings, writhe +6.
pub const GRANNY: &str = "X(1,4,2,5) X(3,12,4,1) X(5,2,6,3) X(6,9,7,10) X(8,11,9,12) X(10,7,11,8)";
/// Figure-eight with an extra R2 tongue, 6 crossings, writhe 0.
pub const SIX_B: &str = "X(8,4,9,3) X(12,10,1,9) X(10,5,11,6) X(4,11,5,12) X(6,2,7,1) X(7,2,8,3)";
/// Sum of two figure-eight knots, 8 crossings, writhe 0.
pub const EIGHT: &str = "X(4,2,5,1) X(16,6,1,5) X(6,3,7,4) X(2,7,3,8) X(11,9,12,8) X(15,13,16,12) X(13,10,14,11) X(9,14,10,15)";

/// Every corpus entry, with a short stable name.
pub const ALL: &[(&str, &str)] = &[
    ("unknot_0", UNKNOT_0),
    ("unlink_2", UNLINK_2),
    ("kink_pos", KINK_POS),
    ("kink_neg", KINK_NEG),
    ("unknot_2", UNKNOT_2),
    ("hopf", HOPF),
    ("hopf_mirror", HOPF_MIRROR),
    ("trefoil_right", TREFOIL_RIGHT),
    ("trefoil_left", TREFOIL_LEFT),
    ("braid_closure", BRAID_CLOSURE),
    ("figure_eight", FIGURE_EIGHT),
    ("granny", GRANNY),
    ("six_b", SIX_B),
    ("eight", EIGHT),
];

/// Parse one corpus entry.
pub fn diagram(pd: &str) -> LinkDiagram {
    parse_pd(pd).expect("corpus entries are valid")
}

/// All corpus diagrams with their names.
pub fn all_diagrams() -> Vec<(&'static str, LinkDiagram)> {
    ALL.iter().map(|&(name, pd)| (name, diagram(pd))).collect()
}
