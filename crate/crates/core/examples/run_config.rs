//! Load an experiment file and run it, as the `run` subcommand does.
//!
//! cargo run --example run_config -- examples/configs/ring5_bilinear.ini

use std::path::PathBuf;

use dminmax::experiment::{cmd_run, load_config, Overrides};

fn main() -> dminmax::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/two_networks.ini")
    });
    let cfg = load_config(&path, Overrides::default())?;
    let report = cmd_run(&cfg, None, false)?;
    print!("{}", report.summary_text());
    println!("consensus point: {:?}", report.consensus_point().as_slice());
    Ok(())
}
