//! Arithmetic in F_16 built as a quotient of F_2[x], and in F_4096 as a tower over it.
use bilmult::gf_core::{field_extend, field_of_order};

fn main() {
    let f16 = field_of_order(16).unwrap();
    let l = f16.level();
    let g = f16.from_index(2); // the class of x
    let m: Vec<String> = f16.chain()[0].modulus.iter().map(ToString::to_string).collect();
    println!("F_16 = F_2[x]/(x^4 + lower terms {})", m.join(" "));
    let mut x = f16.one();
    for i in 0..16 {
        print!("x^{i} = {x}  ");
        x = l.mul(&x, &g);
    }
    println!();
    let y = f16.from_index(11);
    let inv = l.inv(&y).unwrap();
    println!("{y} * {inv} = {}", l.mul(&y, &inv));

    let tower = field_extend(&f16, 3).unwrap();
    let t = tower.from_index(1234);
    println!("F_4096 over F_16: {t} has coordinates {:?}", tower.coords_over(&t, 1));
    println!("{t}^4096 = {}", tower.level().pow(&t, 4096));
}
