//! Exhaustive least-rank search on tiny extensions.
use bilmult::gf_core::field_of_order;
use bilmult::tensor_decomp::{brute_force_rank, SearchOutcome, DEFAULT_BUDGET};

fn main() {
    for (q, n, r_max) in [(2u64, 2usize, 3usize), (3, 2, 3), (2, 2, 2), (2, 3, 6)] {
        let f = field_of_order(q).unwrap();
        let rep = brute_force_rank(&f, n, r_max, DEFAULT_BUDGET).unwrap();
        let what = match &rep.outcome {
            SearchOutcome::Found(d) => format!("rank {}", d.rank()),
            SearchOutcome::ExhaustedNoneExists => format!("no decomposition of rank <= {r_max}"),
            SearchOutcome::Aborted { budget } => format!("aborted after {budget} nodes"),
        };
        println!("F_{q}^{n}: {what} ({} nodes)", rep.nodes_explored);
    }
}
