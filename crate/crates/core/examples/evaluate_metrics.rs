//! SROCC, PLCC, KROCC and RMSE for a handful of predictions against MOS,
//! including tied scores.

use rrvqa::metrics::MetricsReport;

fn main() -> rrvqa::Result<()> {
    let mos = [4.8, 4.1, 3.9, 3.0, 3.0, 2.2, 1.5, 1.1];
    let pred = [4.5, 4.3, 3.6, 3.1, 2.7, 2.7, 1.9, 1.0];
    let report = MetricsReport::compute(&pred, &mos)?;
    println!("{}\n{}", MetricsReport::CSV_HEADER, report.csv_row());
    Ok(())
}
