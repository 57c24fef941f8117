//! Evaluation-interpolation algorithms of rank 2n-1 and their JSON form.
use bilmult::constructor::{karatsuba_truncated, toom_construct};
use bilmult::gf_core::field_of_order;
use bilmult::tensor_decomp::{decomposition_to_json, verify_decomposition};

fn main() {
    for (q, n) in [(2u64, 2usize), (5, 3), (7, 4), (9, 5)] {
        let base = field_of_order(q).unwrap();
        let d = toom_construct(&base, n).unwrap();
        println!("F_{}^{n}: rank {} verified={}", q, d.rank(), verify_decomposition(&d).unwrap());
    }
    let f2 = field_of_order(2).unwrap();
    print!("{}", decomposition_to_json(&toom_construct(&f2, 2).unwrap()));

    let k = karatsuba_truncated(&f2, 2).unwrap();
    println!("product mod x^2 over F_2 in {} multiplications, verified={}", k.rank(), k.verify_exhaustive().unwrap());
    match toom_construct(&f2, 3) {
        Ok(_) => unreachable!(),
        Err(e) => println!("F_8 over F_2: {e}"),
    }
}
