//! Communication load, file count and shuffle-group count of the binomial,
//! resolvable and flexible designs on 16, 22 and 25 nodes.
//!
//! `cargo run --example table_one -- csv` prints CSV instead of markdown.

use coded_shuffle::analysis::{generate_table, render_table, TableFormat, REFERENCE_CONFIGS};

fn main() {
    let format = match std::env::args().nth(1).as_deref() {
        Some("csv") => TableFormat::Csv,
        _ => TableFormat::Markdown,
    };
    let reports = generate_table(&REFERENCE_CONFIGS);
    print!("{}", render_table(&reports, format));
}
