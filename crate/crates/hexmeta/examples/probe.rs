use hexmeta::energy::ModelParams;
use hexmeta::gates::GateShapes;
use hexmeta::lattice::LatticeTopology;
use hexmeta::metropolis::{default_max_steps, replica_ensemble};
use hexmeta::stats::exponential_law_test;

fn main() {
    let topo = LatticeTopology::new(12).unwrap();
    for beta in [0.55f64] {
        let params = ModelParams::new(3.8, 1.0, beta);
        let shapes = GateShapes::for_params(&params).unwrap();
        let e = replica_ensemble(&params, &topo, 200, 7_2024, default_max_steps(&params), Some(&shapes));
        let taus: Vec<f64> = e.records.iter().filter_map(|r| r.tau).map(|t| t as f64).collect();
        let law = exponential_law_test(&taus).unwrap();
        let ever = e.records.iter().filter(|r| r.gate_visited).count();
        let last = e.records.iter().filter(|r| r.gate_shape_last.is_some()).count();
        println!(
            "beta {beta}: mean {:.3e} KS {:.4} mean/Tb {:.3} gate-ever {}/200 gate-last {}/200",
            e.summary.mean_tau, law.ks_distance, e.summary.mean_over_t_beta, ever, last
        );
    }
}
