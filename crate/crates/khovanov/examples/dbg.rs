use std::time::Instant;
fn main() {
    for (name, pd) in [
        ("granny", "X(1,4,2,5) X(3,12,4,1) X(5,2,6,3) X(6,9,7,10) X(8,11,9,12) X(10,7,11,8)"),
        ("six_b", "X(8,4,9,3) X(12,10,1,9) X(10,5,11,6) X(4,11,5,12) X(6,2,7,1) X(7,2,8,3)"),
        ("fig8sum", "X(4,2,5,1) X(16,6,1,5) X(6,3,7,4) X(2,7,3,8) X(11,9,12,8) X(15,13,16,12) X(13,10,14,11) X(9,14,10,15)"),
    ] {
        let d = khovanov::parse_pd(pd).unwrap();
        let t0 = Instant::now();
        let h = khovanov::homology::homology_table(&d, 16).unwrap();
        let euler = h.graded_euler_char();
        let jones = khovanov::bracket::jones_k(&d, 16).unwrap();
        println!("{name}: {:?}  rank {}  torsion {:?}  euler==jones {}", t0.elapsed(), h.total_free_rank(), h.all_torsion(), euler == jones);
        println!("{}", h.render_text());
    }
}
