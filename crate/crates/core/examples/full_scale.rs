//! One seed of the full-size setup (200-node substrate, 3000 requests,
//! horizon 30000), printing the metric trajectory every 5000 time units.
//!
//!     cargo run --release --example full_scale -- 1

use std::time::Instant;

use hcmvne::cli::{load_inputs, Preset, RunConfig};
use hcmvne::embedding::Algorithm;
use hcmvne::simulation::{run_simulation, SimSettings};

fn main() -> hcmvne::Result<()> {
    let seed = std::env::args().nth(1).map_or(1, |s| s.parse().expect("seed is an integer"));
    let cfg = RunConfig::preset(Preset::Full, seed);
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
        println!("{algorithm} ({:.1}s)", start.elapsed().as_secs_f64());
        for s in rep.samples.iter().filter(|s| s.time % 5000 == 0) {
            println!(
                "  t={:<6} accepted {:>4}/{:<4} ratio {:.3} avg_revenue {:>10.1} rc {:.3}",
                s.time,
                s.accepted,
                s.offered,
                s.acceptance_ratio(),
                s.average_revenue(),
                s.revenue_cost_ratio()
            );
        }
    }
    Ok(())
}
