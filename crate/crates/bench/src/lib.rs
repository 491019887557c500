//! Synthetic inputs shared by the benchmarks.

use std::fmt::Write;

/// `rows` yearly values starting at 1900: a slow oscillation plus trend.
pub fn yearly_csv(rows: usize) -> String {
    let mut s = String::from("year,temperature anomaly\n");
    for i in 0..rows {
        let v = (i as f64 / 11.0).sin() * 0.4 + i as f64 * 0.01;
        writeln!(s, "{},{v:.3}", 1900 + i).unwrap();
    }
    s
}

/// `rows` records spread over `groups` teams with two count columns.
pub fn grouped_csv(groups: usize, rows: usize) -> String {
    let mut s = String::from("team,number of remote workers,number of office workers\n");
    for i in 0..rows {
        writeln!(s, "team {},{},{}", i % groups.max(1), (i * 7) % 23, (i * 5) % 17).unwrap();
    }
    s
}
