//! mu_2(6) <= mu_2(2) mu_4(3) = 15: Karatsuba over F_2 stacked under Toom over F_4.
use bilmult::constructor::{compose_decompositions, compose_decompositions_tower, toom_construct};
use bilmult::gf_core::field_of_order;

fn main() {
    let f2 = field_of_order(2).unwrap();
    let f4 = field_of_order(4).unwrap();
    let inner = toom_construct(&f2, 2).unwrap();
    let outer = toom_construct(&f4, 3).unwrap();

    let tower = compose_decompositions_tower(&outer, &inner).unwrap();
    println!("tower basis: rank {} over F_2, degree {}", tower.rank(), tower.n());
    let flat = compose_decompositions(&outer, &inner).unwrap();
    let m: Vec<String> = flat.modulus().unwrap().iter().map(ToString::to_string).collect();
    println!("flat model: x^6 + lower terms {} with rank {}", m.join(" "), flat.rank());
    println!("all 4096 products correct: {}", flat.verify_exhaustive().unwrap());
}
