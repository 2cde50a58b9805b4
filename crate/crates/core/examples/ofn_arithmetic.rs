//! Ordered fuzzy number arithmetic and the condition-satisfaction tuple.

use fuzzysim::{IntPredicate, Ofn};

fn main() {
    let x: Ofn = "(1,4,4,4)".parse().unwrap();
    let y = Ofn::new(0, 1, 1, 1);

    println!("{x} + {y} = {}", x + y);
    // Subtraction is componentwise and may give an improper tuple.
    let g = y - x - Ofn::ONE;
    println!("{y} - {x} - 1 = {g} (proper: {})", g.is_proper());
    println!("min({x}, {y}) = {}", x.min(y));
    println!(
        "(0,0,0,5) / 2 = {}",
        Ofn::new(0, 0, 0, 5).div_int(2).unwrap()
    );

    for v in [
        Ofn::new(1, 2, 2, 3),
        Ofn::new(0, 2, 2, 3),
        Ofn::new(0, 0, 1, 0),
    ] {
        println!(
            "stopped? {v} -> {}   moving? {v} -> {}",
            v.satisfies(IntPredicate::EqualsZero),
            v.satisfies(IntPredicate::GreaterThanZero)
        );
    }
}
