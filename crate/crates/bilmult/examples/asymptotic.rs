//! Exact bounds on the slopes m_q and M_q.
use bilmult::bounds::{asymptotic_report, fmt_rat, parse_rational};

fn main() {
    for (q, aq) in [(2u64, None), (5, None), (7, Some("5/2")), (25, None)] {
        let rep = asymptotic_report(q, aq.map(|s| parse_rational(s).unwrap())).unwrap();
        let show = |x: Option<&num_rational::BigRational>| x.map(fmt_rat).unwrap_or_else(|| "-".into());
        println!("q = {q}: m_q <= {}, M_q <= {}", show(rep.best_upper("m_q")), show(rep.best_upper("M_q")));
        for e in rep.entries.iter().filter(|e| e.applicable) {
            println!("  {} {} {}  ({})", e.quantity, e.kind, show(e.value.as_ref()), e.citation);
        }
    }
}
