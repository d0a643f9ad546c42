//! Reidemeister moves as PD surgeries.
//!
//! All moves grow or rearrange the diagram: `R1+`/`R1-` add a kink of the
//! given sign to an edge or a free loop, `R2` slides one strand over another
//! across a shared face, and `R3` toggles a triangular face between its two
//! configurations. Outputs are renumbered canonically and revalidated.

use crate::diagram::{faces, Crossing, DiagramError, LinkDiagram};

/// A strand a move can attach to: an edge of the diagram or one of its free
/// loops (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strand {
    Edge(u32),
    Loop(u32),
}

/// One Reidemeister move with its application site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RMove {
    /// Add a positive kink (writhe +1).
    R1Plus(Strand),
    /// Add a negative kink (writhe -1).
    R1Minus(Strand),
    /// Slide `over` across `under`, adding two canceling crossings.
    R2 { over: Strand, under: Strand },
    /// Toggle the triangular face spanned by these three crossings (0-based).
    R3 { crossings: [usize; 3] },
}

/// Working form for surgery: tuples plus explicit orientation flags, with
/// edge labels allowed to be arbitrary until renumbering.
struct Patch {
    crossings: Vec<[u32; 4]>,
    over_in_b: Vec<bool>,
    free_loops: u32,
    next_label: u32,
}

/// An R2 passage of one strand through the two new crossings: the label
/// entering the first crossing, the arc between them, and the continuation
/// leaving the second.
struct Passage {
    first: u32,
    mid: u32,
    cont: u32,
}

impl Patch {
    fn from_diagram(d: &LinkDiagram) -> Self {
        Patch {
            crossings: d.crossings().iter().map(|x| x.slots).collect(),
            over_in_b: (0..d.crossing_count()).map(|k| d.over_in_b(k)).collect(),
            free_loops: d.free_loops(),
            next_label: d.edge_count() + 1,
        }
    }

    fn fresh(&mut self) -> u32 {
        let l = self.next_label;
        self.next_label += 1;
        l
    }

    /// Split a strand for a two-crossing passage. For an edge this rewires
    /// the old head to the continuation label; a loop closes on itself.
    fn passage(&mut self, d: &LinkDiagram, s: Strand) -> Passage {
        match s {
            Strand::Edge(e) => {
                let head = in_occurrence(&self.crossings, d, e);
                let mid = self.fresh();
                let cont = self.fresh();
                self.crossings[head.0][head.1] = cont;
                Passage { first: e, mid, cont }
            }
            Strand::Loop(_) => {
                self.free_loops -= 1;
                let a = self.fresh();
                let b = self.fresh();
                Passage {
                    first: a,
                    mid: b,
                    cont: a,
                }
            }
        }
    }

    /// Renumber edges canonically (each component starts at its minimal
    /// label, components ordered by minimal label) and validate.
    fn finish(self) -> LinkDiagram {
        let mut succ = std::collections::BTreeMap::new();
        for (k, x) in self.crossings.iter().enumerate() {
            succ.insert(x[0], x[2]);
            if self.over_in_b[k] {
                succ.insert(x[1], x[3]);
            } else {
                succ.insert(x[3], x[1]);
            }
        }
        let mut remap = std::collections::BTreeMap::new();
        let mut next = 1u32;
        let mut seen = std::collections::BTreeSet::new();
        for &start in succ.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut e = start;
            loop {
                seen.insert(e);
                remap.insert(e, next);
                next += 1;
                e = succ[&e];
                if e == start {
                    break;
                }
            }
        }
        let crossings = self
            .crossings
            .iter()
            .map(|x| Crossing::new(remap[&x[0]], remap[&x[1]], remap[&x[2]], remap[&x[3]]))
            .collect();
        LinkDiagram::new(crossings, self.free_loops)
            .expect("surgery output must be a valid diagram")
    }
}

fn occurrences(crossings: &[[u32; 4]], e: u32) -> [(usize, usize); 2] {
    let mut out = [(usize::MAX, usize::MAX); 2];
    let mut n = 0;
    for (k, x) in crossings.iter().enumerate() {
        for (s, &le) in x.iter().enumerate() {
            if le == e {
                assert!(n < 2, "edge {e} occurs more than twice");
                out[n] = (k, s);
                n += 1;
            }
        }
    }
    assert_eq!(n, 2, "edge {e} must occur twice");
    out
}

/// Is the edge at `(k, s)` incoming there? Slots `a` and over-in slots are.
fn slot_is_in(d: &LinkDiagram, k: usize, s: usize) -> bool {
    match s {
        0 => true,
        2 => false,
        1 => d.over_in_b(k),
        3 => !d.over_in_b(k),
        _ => unreachable!(),
    }
}

fn in_occurrence(crossings: &[[u32; 4]], d: &LinkDiagram, e: u32) -> (usize, usize) {
    let occ = occurrences(crossings, e);
    if slot_is_in(d, occ[0].0, occ[0].1) {
        occ[0]
    } else {
        occ[1]
    }
}

fn out_occurrence(crossings: &[[u32; 4]], d: &LinkDiagram, e: u32) -> (usize, usize) {
    let occ = occurrences(crossings, e);
    if slot_is_in(d, occ[0].0, occ[0].1) {
        occ[1]
    } else {
        occ[0]
    }
}

fn check_site(d: &LinkDiagram, s: Strand) -> Result<(), DiagramError> {
    match s {
        Strand::Edge(e) if e == 0 || e > d.edge_count() => Err(DiagramError::IllegalSite(
            format!("edge {e} does not exist (diagram has edges 1..={})", d.edge_count()),
        )),
        Strand::Loop(l) if l >= d.free_loops() => Err(DiagramError::IllegalSite(format!(
            "free loop {} does not exist (diagram has {})",
            l + 1,
            d.free_loops()
        ))),
        _ => Ok(()),
    }
}

/// Apply one Reidemeister move at the given site. The result is a new,
/// validated diagram with canonically renumbered edges.
pub fn apply_r_move(d: &LinkDiagram, mv: &RMove) -> Result<LinkDiagram, DiagramError> {
    let mut p = Patch::from_diagram(d);
    match *mv {
        RMove::R1Plus(site) | RMove::R1Minus(site) => {
            check_site(d, site)?;
            let positive = matches!(mv, RMove::R1Plus(_));
            let (e_in, e_cont) = match site {
                Strand::Edge(e) => {
                    let head = in_occurrence(&p.crossings, d, e);
                    let cont = p.fresh();
                    p.crossings[head.0][head.1] = cont;
                    (e, cont)
                }
                Strand::Loop(_) => {
                    p.free_loops -= 1;
                    let e = p.fresh();
                    (e, e)
                }
            };
            let g = p.fresh();
            if positive {
                // under first, back over the top: X(e, g, g, e')
                p.crossings.push([e_in, g, g, e_cont]);
                p.over_in_b.push(true);
            } else {
                // X(e, e', g, g)
                p.crossings.push([e_in, e_cont, g, g]);
                p.over_in_b.push(false);
            }
        }
        RMove::R2 { over, under } => {
            if over == under {
                return Err(DiagramError::IllegalSite(
                    "R2 needs two distinct strands".into(),
                ));
            }
            check_site(d, over)?;
            check_site(d, under)?;
            // Which side of the under-strand does the over-strand poke from?
            // The shared face decides: a face walks an edge co-oriented
            // exactly when it lies to the right of it.
            let co_oriented = match (over, under) {
                (Strand::Edge(e), Strand::Edge(f)) => {
                    let f_out = out_occurrence(&p.crossings, d, f);
                    let shared = faces(d).into_iter().find(|face| {
                        let edges = face.edges(d);
                        edges.contains(&e) && edges.contains(&f)
                    });
                    let Some(face) = shared else {
                        return Err(DiagramError::IllegalSite(format!(
                            "edges {e} and {f} do not border a common face"
                        )));
                    };
                    face.darts.contains(&f_out)
                }
                // a free loop floats in whichever region we need
                _ => true,
            };
            let e = p.passage(d, over);
            let f = p.passage(d, under);
            if co_oriented {
                // the over-strand enters the first crossing at slot b
                p.crossings.push([f.first, e.first, f.mid, e.mid]);
                p.over_in_b.push(true);
                p.crossings.push([f.mid, e.cont, f.cont, e.mid]);
                p.over_in_b.push(false);
            } else {
                p.crossings.push([f.first, e.mid, f.mid, e.first]);
                p.over_in_b.push(false);
                p.crossings.push([f.mid, e.mid, f.cont, e.cont]);
                p.over_in_b.push(true);
            }
        }
        RMove::R3 { crossings } => {
            apply_r3(&mut p, d, crossings)?;
        }
    }
    Ok(p.finish())
}

fn apply_r3(p: &mut Patch, d: &LinkDiagram, site: [usize; 3]) -> Result<(), DiagramError> {
    let n = d.crossing_count();
    for &k in &site {
        if k >= n {
            return Err(DiagramError::CrossingIndex { index: k, crossings: n });
        }
    }
    let mut want: Vec<usize> = site.to_vec();
    want.sort_unstable();
    want.dedup();
    if want.len() != 3 {
        return Err(DiagramError::IllegalSite(
            "R3 needs three distinct crossings".into(),
        ));
    }
    let face = faces(d).into_iter().find(|f| {
        if f.darts.len() != 3 {
            return false;
        }
        let mut ks: Vec<usize> = f.darts.iter().map(|&(k, _)| k).collect();
        ks.sort_unstable();
        ks == want
    });
    let Some(face) = face else {
        return Err(DiagramError::IllegalSite(format!(
            "crossings {want:?} do not bound a triangular face"
        )));
    };
    let edges = face.edges(d);
    // legal only when some strand passes over both others, or under both
    let slidable = edges.iter().any(|&g| {
        let occ = occurrences(&p.crossings, g);
        let both_over = occ.iter().all(|&(_, s)| s == 1 || s == 3);
        let both_under = occ.iter().all(|&(_, s)| s == 0 || s == 2);
        occ[0].0 != occ[1].0 && (both_over || both_under)
    });
    if !slidable {
        return Err(DiagramError::IllegalSite(
            "no strand of the triangle passes over (or under) both others".into(),
        ));
    }
    // Each face edge is the middle arc of one strand passage through two of
    // the three crossings. Toggling the triangle swaps the order in which
    // every passage visits its crossings; slot positions and over/under
    // flags stay fixed, only the labels rewire.
    let old = p.crossings.clone();
    for &m in &edges {
        let occ = occurrences(&old, m);
        if occ[0].0 == occ[1].0 {
            return Err(DiagramError::IllegalSite(format!(
                "edge {m} begins and ends at the same crossing"
            )));
        }
        let (tail, head) = if slot_is_in(d, occ[0].0, occ[0].1) {
            (occ[1], occ[0])
        } else {
            (occ[0], occ[1])
        };
        let (c1, s1) = tail;
        let (c2, s2) = head;
        let sin = old[c1][(s1 + 2) % 4];
        let sout = old[c2][(s2 + 2) % 4];
        p.crossings[c2][s2] = sin;
        p.crossings[c2][(s2 + 2) % 4] = m;
        p.crossings[c1][s1] = sout;
        p.crossings[c1][(s1 + 2) % 4] = m;
    }
    Ok(())
}

/// All legal R3 sites of the diagram, each as three 0-based crossing indices.
pub fn r3_sites(d: &LinkDiagram) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for face in faces(d) {
        if face.darts.len() != 3 {
            continue;
        }
        let mut ks: Vec<usize> = face.darts.iter().map(|&(k, _)| k).collect();
        ks.sort_unstable();
        ks.dedup();
        if ks.len() != 3 {
            continue;
        }
        let crossings: Vec<[u32; 4]> = d.crossings().iter().map(|x| x.slots).collect();
        let slidable = face.edges(d).iter().any(|&g| {
            let occ = occurrences(&crossings, g);
            let both_over = occ.iter().all(|&(_, s)| s == 1 || s == 3);
            let both_under = occ.iter().all(|&(_, s)| s == 0 || s == 2);
            occ[0].0 != occ[1].0 && (both_over || both_under)
        });
        if slidable {
            let site = [ks[0], ks[1], ks[2]];
            if !out.contains(&site) {
                out.push(site);
            }
        }
    }
    out
}

/// Parse a move script: semicolon-separated applications, e.g.
/// `r1+ 3; r2 2 5; r3 1 2 4; r1- L1`. Edges are labels, `L<k>` is the
/// `k`-th free loop (1-based), R3 takes three 1-based crossing numbers.
pub fn parse_move_script(text: &str) -> Result<Vec<RMove>, DiagramError> {
    let mut moves = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let mut words = part.split_whitespace();
        let head = words.next().unwrap_or_default().to_lowercase();
        let args: Vec<&str> = words.collect();
        let bad = || DiagramError::MalformedToken(part.to_string());
        let strand = |w: &str| -> Result<Strand, DiagramError> {
            if let Some(l) = w.strip_prefix(['L', 'l']) {
                let l: u32 = l.parse().map_err(|_| bad())?;
                if l == 0 {
                    return Err(bad());
                }
                Ok(Strand::Loop(l - 1))
            } else {
                Ok(Strand::Edge(w.parse().map_err(|_| bad())?))
            }
        };
        let mv = match head.as_str() {
            "r1+" if args.len() == 1 => RMove::R1Plus(strand(args[0])?),
            "r1-" if args.len() == 1 => RMove::R1Minus(strand(args[0])?),
            "r2" if args.len() == 2 => RMove::R2 {
                over: strand(args[0])?,
                under: strand(args[1])?,
            },
            "r3" if args.len() == 3 => {
                let mut ks = [0usize; 3];
                for (i, a) in args.iter().enumerate() {
                    let k: usize = a.parse().map_err(|_| bad())?;
                    if k == 0 {
                        return Err(bad());
                    }
                    ks[i] = k - 1;
                }
                RMove::R3 { crossings: ks }
            }
            _ => return Err(bad()),
        };
        moves.push(mv);
    }
    Ok(moves)
}

/// Apply a whole script left to right.
pub fn apply_script(d: &LinkDiagram, moves: &[RMove]) -> Result<LinkDiagram, DiagramError> {
    let mut cur = d.clone();
    for mv in moves {
        cur = apply_r_move(&cur, mv)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::kauffman_bracket;
    use crate::diagram::parse_pd;
    use crate::laurent::APoly;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    const HOPF: &str = "X(1,3,2,4) X(3,1,4,2)";

    #[test]
    fn r1_on_unknot() {
        let d = parse_pd("O 1").unwrap();
        let plus = apply_r_move(&d, &RMove::R1Plus(Strand::Loop(0))).unwrap();
        assert_eq!((plus.crossing_count(), plus.writhe(), plus.free_loops()), (1, 1, 0));
        let minus = apply_r_move(&d, &RMove::R1Minus(Strand::Loop(0))).unwrap();
        assert_eq!(minus.writhe(), -1);
    }

    #[test]
    fn r1_then_r1_on_trefoil() {
        let d = parse_pd(TREFOIL).unwrap();
        let script = parse_move_script("r1- 2; r1+ 3").unwrap();
        let out = apply_script(&d, &script).unwrap();
        assert_eq!(out.crossing_count(), 5);
        assert_eq!(out.writhe(), 3);
    }

    #[test]
    fn r2_on_two_component_unlink() {
        let d = parse_pd("O 2").unwrap();
        let out = apply_r_move(
            &d,
            &RMove::R2 {
                over: Strand::Loop(0),
                under: Strand::Loop(1),
            },
        )
        .unwrap();
        assert_eq!(out.crossing_count(), 2);
        assert_eq!(out.writhe(), 0);
        assert_eq!(out.free_loops(), 0);
    }

    #[test]
    fn r1_bracket_covariance() {
        let d = parse_pd(TREFOIL).unwrap();
        let b = kauffman_bracket(&d, 16).unwrap();
        for e in 1..=6 {
            let plus = apply_r_move(&d, &RMove::R1Plus(Strand::Edge(e))).unwrap();
            assert_eq!(
                kauffman_bracket(&plus, 16).unwrap(),
                b.mul_monomial(3, -1),
                "R1+ on edge {e}"
            );
            let minus = apply_r_move(&d, &RMove::R1Minus(Strand::Edge(e))).unwrap();
            assert_eq!(
                kauffman_bracket(&minus, 16).unwrap(),
                b.mul_monomial(-3, -1),
                "R1- on edge {e}"
            );
        }
    }

    #[test]
    fn r2_bracket_invariance_all_legal_sites() {
        for pd in [HOPF, TREFOIL, "X(1,2,2,1)"] {
            let d = parse_pd(pd).unwrap();
            let b = kauffman_bracket(&d, 16).unwrap();
            let mut tried = 0;
            for e in 1..=d.edge_count() {
                for f in 1..=d.edge_count() {
                    if e == f {
                        continue;
                    }
                    let mv = RMove::R2 {
                        over: Strand::Edge(e),
                        under: Strand::Edge(f),
                    };
                    let Ok(out) = apply_r_move(&d, &mv) else { continue };
                    tried += 1;
                    assert_eq!(
                        kauffman_bracket(&out, 16).unwrap(),
                        b,
                        "R2 {e} over {f} on {pd}"
                    );
                }
            }
            assert!(tried > 0, "no legal R2 site found on {pd}");
        }
    }

    #[test]
    fn r2_loop_over_edge() {
        let d = parse_pd("X(1,2,2,1) O 1").unwrap();
        let b = kauffman_bracket(&d, 16).unwrap();
        for (over, under) in [
            (Strand::Loop(0), Strand::Edge(1)),
            (Strand::Edge(1), Strand::Loop(0)),
        ] {
            let out = apply_r_move(&d, &RMove::R2 { over, under }).unwrap();
            assert_eq!(out.crossing_count(), 3);
            assert_eq!(kauffman_bracket(&out, 16).unwrap(), b);
        }
    }

    /// Closed braid `s1 s2 s1`: its braid-relation triangle is an R3 site.
    const BRAID: &str = "X(5,2,6,1) X(3,3,4,2) X(4,5,1,6)";

    #[test]
    fn r3_toggles_the_braid_relation_triangle() {
        let d = parse_pd(BRAID).unwrap();
        let sites = r3_sites(&d);
        assert_eq!(sites, vec![[0, 1, 2]]);
        let b = kauffman_bracket(&d, 16).unwrap();
        let out = apply_r_move(&d, &RMove::R3 { crossings: [0, 1, 2] }).unwrap();
        assert_eq!(out.crossing_count(), 3);
        assert_eq!(out.writhe(), d.writhe());
        assert_eq!(kauffman_bracket(&out, 16).unwrap(), b);
        // the toggled triangle is again a legal site, and toggling twice
        // restores the bracket
        let back = apply_r_move(&out, &RMove::R3 { crossings: [0, 1, 2] }).unwrap();
        assert_eq!(kauffman_bracket(&back, 16).unwrap(), b);
    }

    #[test]
    fn r3_rejects_illegal_sites() {
        let d = parse_pd(TREFOIL).unwrap();
        assert!(matches!(
            apply_r_move(&d, &RMove::R3 { crossings: [0, 0, 1] }),
            Err(DiagramError::IllegalSite(_))
        ));
        // the trefoil's triangles are alternating, so nothing can slide
        assert!(apply_r_move(&d, &RMove::R3 { crossings: [0, 1, 2] }).is_err());
        assert!(r3_sites(&d).is_empty());
        let hopf = parse_pd(HOPF).unwrap();
        assert!(matches!(
            apply_r_move(&hopf, &RMove::R3 { crossings: [0, 1, 2] }),
            Err(DiagramError::CrossingIndex { .. })
        ));
    }

    #[test]
    fn moves_always_produce_valid_diagrams() {
        // validity is enforced in Patch::finish; spot-check bracket values too
        let d = parse_pd("O 1").unwrap();
        let k1 = apply_r_move(&d, &RMove::R1Plus(Strand::Loop(0))).unwrap();
        let k2 = apply_r_move(&k1, &RMove::R2 { over: Strand::Edge(1), under: Strand::Edge(2) });
        if let Ok(k2) = k2 {
            assert_eq!(
                kauffman_bracket(&k2, 16).unwrap(),
                APoly::from_terms([(5, 1), (1, 1)])
            );
        }
    }

    #[test]
    fn script_parsing() {
        let script = parse_move_script("r1+ 3; r2 L1 5 ;r3 1 2 4").unwrap();
        assert_eq!(script.len(), 3);
        assert_eq!(script[0], RMove::R1Plus(Strand::Edge(3)));
        assert_eq!(
            script[1],
            RMove::R2 {
                over: Strand::Loop(0),
                under: Strand::Edge(5)
            }
        );
        assert_eq!(script[2], RMove::R3 { crossings: [0, 1, 3] });
        assert!(parse_move_script("r4 1").is_err());
        assert!(parse_move_script("r2 1").is_err());
    }
}
