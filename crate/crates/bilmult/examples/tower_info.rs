//! Genus and place bounds along the towers, the tabulated T3 steps and step selection.
use bilmult::towers::{check_lemma_inequalities, select_step, FamilyKind, TowerFamily, KASH_TABLE};

fn main() {
    let t2 = TowerFamily::for_order(FamilyKind::GsT2, 4).unwrap();
    for st in t2.steps().take_while(|s| s.k <= 3) {
        println!("T2/F_16 step {}: genus <= {}, N1 >= {}", st.label(), st.genus_bound(), st.places_lower);
    }
    for rec in &KASH_TABLE {
        println!("T3/F_{} step ({},{}): N1 = {}, N2 = {}, g = {}, Gamma = {}", rec.q, rec.k, rec.s, rec.n1, rec.n2, rec.genus, rec.gamma());
    }
    let kummer = TowerFamily::for_order(FamilyKind::KummerP2, 5).unwrap();
    let st = select_step(&kummer, 18).unwrap();
    println!("Kummer tower over F_25, n = 18: step {} with g = {}", st.label(), st.genus_bound());
    let rep = check_lemma_inequalities(&kummer, 10);
    println!("lemma checks: {} passed, {} failed", rep.passes(), rep.failures());
}
