//! `synth`: generate a labeled dataset and write it in the canonical
//! CSV layout.

use sensorfuse::{canonical_csv_bytes, generate_synthetic};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::Artifacts;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let synth = config.synth.to_synth_config(config.seed);
    let dataset = generate_synthetic(&synth)?;
    let mut artifacts = Artifacts::new(&config.out);
    artifacts.add("synthetic.csv", canonical_csv_bytes(&dataset));
    artifacts.commit()?;
    println!(
        "generated {} rows across {} classes",
        dataset.len(),
        dataset.n_classes()
    );
    Ok(())
}
