//! Option resolution: command-line flags override the config file, which
//! overrides built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use sicorr::correlations::Mode;
use sicorr::povm::{self, Povm};
use sicorr::scenarios::Assignment;
use sicorr::states::{DensityState, StateDocument};
use sicorr::tolerance::Tolerances;

use crate::CliError;

#[derive(Args, Debug, Clone, Default)]
pub struct CommonOpts {
    /// Construction for three or more parties: blockdiag, marginal or unfolding.
    #[arg(long)]
    pub mode: Option<String>,
    /// Partition tree such as "A|(B|C)" or "AB|CD", or a preset nc1/nc2/nc3.
    /// Without it every partition is scanned.
    #[arg(long)]
    pub partition: Option<String>,
    /// sic2, gsic2:<t>, gsic3:<t> or file:<path>. Give one to use on every
    /// subsystem or one per subsystem.
    #[arg(long = "povm")]
    pub povms: Vec<String>,
    /// Per-subsystem N/C pattern; C applies the complex-conjugate POVM.
    #[arg(long)]
    pub conjugate_assignment: Option<String>,
    /// Margin a verdict must exceed to report entanglement.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Write CSV here instead of (or besides) the terminal.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with defaults for any of the options above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    mode: Option<String>,
    partition: Option<String>,
    povm: Option<Vec<String>>,
    conjugate_assignment: Option<String>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub mode: Mode,
    pub partition: Option<String>,
    pub povms: Vec<String>,
    pub assignment: Option<Assignment>,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(opts: &CommonOpts) -> Result<Self, CliError> {
        let file = match &opts.config {
            Some(path) => {
                let text = read(path)?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| CliError::at(path, e))?
            }
            None => ConfigFile::default(),
        };
        let mode = match opts.mode.clone().or(file.mode) {
            Some(m) => m.parse::<Mode>()?,
            None => Mode::Unfolding,
        };
        let povms = if opts.povms.is_empty() {
            file.povm.unwrap_or_default()
        } else {
            opts.povms.clone()
        };
        let assignment = opts
            .conjugate_assignment
            .clone()
            .or(file.conjugate_assignment)
            .map(|a| Assignment::parse(&a))
            .transpose()?;
        let mut tolerances = Tolerances::default();
        if let Some(t) = opts.tolerance.or(file.tolerance) {
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::Usage(format!(
                    "tolerance must be a non-negative number, got {t}"
                )));
            }
            tolerances.verdict = t;
        }
        Ok(Settings {
            mode,
            partition: opts.partition.clone().or(file.partition),
            povms,
            assignment,
            tolerances,
            out: opts.out.clone().or(file.out),
        })
    }

    /// POVMs for each subsystem of `dims`, with the conjugation pattern applied.
    pub fn povms_for(&self, dims: &[usize]) -> Result<Vec<Povm>, CliError> {
        let specs: Vec<&str> = match self.povms.len() {
            0 => vec!["sic2"; dims.len()],
            1 => vec![self.povms[0].as_str(); dims.len()],
            n if n == dims.len() => self.povms.iter().map(String::as_str).collect(),
            n => {
                return Err(CliError::Usage(format!(
                    "{n} POVMs given for {} subsystems",
                    dims.len()
                )))
            }
        };
        let mut out = Vec::with_capacity(specs.len());
        for (k, (spec, &d)) in specs.iter().zip(dims).enumerate() {
            let p = parse_povm(spec)?;
            if p.dim() != d {
                return Err(CliError::Usage(format!(
                    "POVM '{spec}' has dimension {} but subsystem {} has dimension {d}",
                    p.dim(),
                    sicorr::states::subsystem_letter(k)
                )));
            }
            out.push(p);
        }
        match &self.assignment {
            Some(a) => Ok(a.apply(&out)?),
            None => Ok(out),
        }
    }
}

/// `sic2`, `gsic2:<t>`, `gsic3:<t>` (all renormalized) or `file:<path>` (as stored).
pub fn parse_povm(spec: &str) -> Result<Povm, CliError> {
    let spec = spec.trim();
    if spec == "sic2" {
        return Ok(povm::renormalize(&povm::build_sic_qubit())?);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let path = Path::new(path);
        let text = read(path)?;
        return povm::from_json(&text).map_err(|e| CliError::at(path, e));
    }
    for d in [2usize, 3] {
        if let Some(t) = spec.strip_prefix(&format!("gsic{d}:")) {
            let t: f64 = t
                .parse()
                .map_err(|_| CliError::Usage(format!("bad GSIC parameter in '{spec}'")))?;
            return Ok(povm::renormalize(&povm::build_gsic(d, t)?)?);
        }
    }
    Err(CliError::Usage(format!(
        "unknown POVM '{spec}' (sic2, gsic2:<t>, gsic3:<t>, file:<path>)"
    )))
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::at(path, e))
}

pub fn load_state(path: &Path) -> Result<DensityState, CliError> {
    let text = read(path)?;
    let doc: StateDocument = serde_json::from_str(&text).map_err(|e| CliError::at(path, e))?;
    let state = doc.to_state().map_err(|e| CliError::at(path, e))?;
    Ok(match (&doc.name, path.file_stem()) {
        (None, Some(stem)) => state.with_label(stem.to_string_lossy()),
        _ => state,
    })
}
