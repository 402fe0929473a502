//! Desk-scale comparison of the three embedders over a few seeds.
//!
//!     cargo run --release --example simulate_compare -- 1 2 3

use std::time::Instant;

use hcmvne::cli::{load_inputs, Preset, RunConfig};
use hcmvne::embedding::Algorithm;
use hcmvne::simulation::{run_simulation, SimSettings};

fn main() -> hcmvne::Result<()> {
    let seeds: Vec<u64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("seeds are integers"))
        .collect();
    let seeds = if seeds.is_empty() { vec![1] } else { seeds };
    println!("seed  algorithm   accept  avg_rev   rc_ratio  secs");
    for seed in seeds {
        let cfg = RunConfig::preset(Preset::Desk, seed);
        let (sn, workload) = load_inputs(&cfg)?;
        for algorithm in Algorithm::ALL {
            let start = Instant::now();
            let settings = SimSettings {
                algorithm,
                params: cfg.embed,
                horizon: cfg.horizon,
                sample_interval: cfg.sample_interval,
            };
            let rep = run_simulation(&mut sn.clone(), &workload, &settings)?;
            let last = rep.last();
            println!(
                "{seed:<5} {:<11} {:.3}   {:<8.1}  {:.3}     {:.2}",
                algorithm.to_string(),
                last.acceptance_ratio(),
                last.average_revenue(),
                last.revenue_cost_ratio(),
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
