//! Probability that one fuzzy quantity is smaller than another, and the
//! resulting decision uncertainty.

use fuzzysim::comparison::{alpha_cut, Comparator};
use fuzzysim::Ofn;

fn main() {
    let pairs = [
        (Ofn::new(0, 1, 1, 2), Ofn::new(4, 5, 5, 6)),
        (Ofn::new(0, 0, 0, 2), Ofn::new(0, 2, 2, 2)),
        (Ofn::new(3, 10, 10, 12), Ofn::new(7, 8, 10, 11)),
        (Ofn::new(2, 4, 5, 9), Ofn::new(2, 4, 5, 9)),
        (Ofn::crisp(4), Ofn::crisp(4)),
    ];
    let coarse = Comparator::default();
    let fine = Comparator::new(1001);
    for (a, b) in pairs {
        let r = coarse.compare(a, b);
        println!(
            "{a} vs {b}: P(<) {:.4}  P(>) {:.4}  P(=) {:.1}  UNC {:.4}  (1001 levels: P(<) {:.4})",
            r.p_less,
            r.p_greater,
            r.p_equal,
            r.uncertainty(),
            fine.compare(a, b).p_less
        );
    }
    let cut = alpha_cut(Ofn::new(0, 2, 2, 4), 0.5);
    println!("0.5-cut of (0,2,2,4): [{}, {}]", cut.lo, cut.hi);
}
