//! One module per subcommand.

pub mod compare;
pub mod eval;
pub mod explore;
pub mod kalman;
pub mod synth;
pub mod train;

use crate::error::CliError;

/// Confusion counts as CSV: header names the predicted classes, one row
/// per true class.
pub fn confusion_csv(labels: &[String], counts: &[Vec<usize>]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["true_label".to_string()];
    header.extend(labels.iter().cloned());
    writer
        .write_record(&header)
        .map_err(|err| CliError::Runtime(format!("cannot render confusion table: {err}")))?;
    for (label, row) in labels.iter().zip(counts) {
        let mut fields = vec![label.clone()];
        fields.extend(row.iter().map(|count| count.to_string()));
        writer
            .write_record(&fields)
            .map_err(|err| CliError::Runtime(format!("cannot render confusion table: {err}")))?;
    }
    writer
        .into_inner()
        .map_err(|err| CliError::Runtime(format!("cannot render confusion table: {err}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_csv_names_classes_on_both_axes() {
        let labels = vec!["walking".to_string(), "sitting".to_string()];
        let counts = vec![vec![5, 1], vec![0, 6]];
        let bytes = confusion_csv(&labels, &counts).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            text,
            "true_label,walking,sitting\nwalking,5,1\nsitting,0,6\n"
        );
    }
}
