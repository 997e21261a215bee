//! Run both economies with default parameters and write their mean/min/max
//! series side by side, plus the trend metrics of each.
//!
//! ```bash
//! cargo run --release -p gamefi-sim --example figure_one -- [repeats] [out_dir]
//! ```

use std::path::PathBuf;
use std::time::Instant;

use gamefi_sim::analysis::{trend_report, write_series_csv_file};
use gamefi_sim::{run_experiment, ExperimentSpec, ModelKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let repeats: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let out_dir = PathBuf::from(args.next().unwrap_or_else(|| "target/figure_one".into()));
    std::fs::create_dir_all(&out_dir)?;

    for model in [ModelKind::ServerFi, ModelKind::Retention] {
        let spec = ExperimentSpec::new(model).with_size(500, repeats).with_seed(2024);
        let started = Instant::now();
        let output = run_experiment(&spec)?;
        let elapsed = started.elapsed();

        let name = match model {
            ModelKind::ServerFi => "serverfi",
            ModelKind::Retention => "retention",
        };
        let path = out_dir.join(format!("{name}.csv"));
        write_series_csv_file(&output.series, &path)?;

        let s = &output.series;
        let trend = trend_report(s)?;
        println!("{name}: {repeats} repeats x 500 iterations in {elapsed:.2?} -> {}", path.display());
        for i in [1usize, 10, 25, 50, 100, 200, 300, 400, 500] {
            println!(
                "  iter {i:>3}  mean {:>10.1}  band [{:>10.1}, {:>10.1}]  players {:>8.1}",
                s.mean_total_value[i - 1],
                s.min_total_value[i - 1],
                s.max_total_value[i - 1],
                s.mean_active_players[i - 1],
            );
        }
        println!(
            "  late_slope {:.4}  peak at {}  final/peak {:.3}  early_peak {}  T500/T50 {:.3}",
            trend.late_slope,
            trend.peak_iteration,
            trend.final_to_peak_ratio,
            trend.early_peak,
            s.mean_total_value[499] / s.mean_total_value[49],
        );
    }
    Ok(())
}
