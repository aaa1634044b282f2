fn main() {
    use cortexvq::bench::*;

    // Full entropy experiment at the pinned seed, 50-epoch convergence.
    let t0 = std::time::Instant::now();
    let cfg = EntropyConfig::default();
    let report = entropy_experiment(&cfg).unwrap();
    println!(
        "entropy: K={} Hc={:.4} Hk={:.4} Hu={:.4} gap={:.4} km_margin={:+.4} ({:.1}s)",
        report.k_cortex, report.h_cortex, report.h_kmeans, report.h_uniform,
        report.h_cortex - report.h_uniform,
        report.h_cortex - (report.h_kmeans - 0.02),
        t0.elapsed().as_secs_f64()
    );
    let last_growth = report.new_nodes_per_epoch.iter().rposition(|&n| n > 0).map(|i| i + 1).unwrap_or(0);
    println!("convergence: last_growth_epoch={last_growth} series={:?}", report.new_nodes_per_epoch);
}
