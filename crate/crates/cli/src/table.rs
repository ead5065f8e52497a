use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use sicorr::criteria::fmt_float;

use crate::CliError;

pub type Sink = csv::Writer<Box<dyn Write>>;

/// CSV writer on `path`, or on stdout when there is none.
pub fn sink(path: Option<&Path>) -> Result<Sink, CliError> {
    let out: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::at(p, e))?),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(out))
}

pub fn floats(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| fmt_float(v)).collect()
}
