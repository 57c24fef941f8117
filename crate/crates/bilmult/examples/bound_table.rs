//! Upper and lower bounds for mu_q(n) with the rule that produced each value.
use bilmult::bounds::{best_upper_bound, bound_table};

fn main() {
    let q = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4u64);
    let table = bound_table(q, 24).unwrap();
    print!("{}", table.to_csv());
    let r = best_upper_bound(2, 6).unwrap();
    println!("mu_2(6) <= {} via {} ({}), witness rank {:?}", r.value, r.method.id(), r.params_string(), r.witness.map(|w| w.rank()));
}
