use bethe_rc::rigged::Partition;
use bethe_rc::solver::{solve_sector, SolverConfig};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: u32 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(12);
    let ell: u32 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(6);
    let content: Option<Partition> = args.get(3).map(|s| {
        Partition::new(s.split(',').map(|p| p.parse().unwrap()).collect()).unwrap()
    });
    let max_seeds: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(200_000);
    let cfg = SolverConfig { max_seeds, ..SolverConfig::default() };
    let t = Instant::now();
    let census = solve_sector(n, ell, &cfg, content.as_ref());
    println!(
        "N={n} ell={ell}: {} sols ({}r {}c {}s) physical {}/{} in {:.1?}",
        census.solutions.len(), census.counts.real, census.counts.complex,
        census.counts.singular, census.counts.physical, census.rc_count, t.elapsed()
    );
}
