//! ‖Eˢ‖ for s = 1..N² on an N x N checkerboard, driven by a key=value
//! configuration like the one the `oras` binary reads.
//!
//!     cargo run --release --example norm_decay

use helmholtz_oras::experiment::{run_fig1, write_norm_csv, ExperimentConfig};

const CONFIG: &str = "
geometry = checkerboard
k = 20
n = 2, 3
";

fn main() -> helmholtz_oras::Result<()> {
    let mut config = ExperimentConfig::default();
    config.apply_config_text(CONFIG)?;
    let fig = run_fig1(&config)?;
    write_norm_csv(&fig.rows, std::io::stdout().lock())?;
    for (k, n, first) in fig.first_contracting {
        println!("# k = {k}, {n}x{n}: first contracting power {first:?}");
    }
    Ok(())
}
