//! `kalman`: write the dataset back out with the three filtered
//! estimate columns appended.

use sensorfuse::write_filtered_csv;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{load_dataset, Artifacts};
use crate::pipeline;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let dataset = load_dataset(config)?;
    let filtered = pipeline::filtered_view(&dataset, config)?;

    let mut bytes = Vec::new();
    write_filtered_csv(&filtered, &mut bytes)?;

    let mut artifacts = Artifacts::new(&config.out);
    artifacts.add("filtered.csv", bytes);
    artifacts.commit()?;
    println!(
        "filtered {} rows (q={}, r={})",
        dataset.len(),
        config.q_scale,
        config.r_scale
    );
    Ok(())
}
