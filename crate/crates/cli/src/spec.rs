//! The `RunSpec` file format and its validation.
//!
//! Every field has a default, so an empty object `{}` is a valid spec for any
//! command. Unknown keys are rejected at every nesting level.

use serde::{Deserialize, Serialize};
use spectral_lattice::calibration::CALIBRATION_DIM_CAP;
use spectral_lattice::continuum::{FourierMode, SmoothFieldSpec};
use spectral_lattice::{build_gammas, half_inverse_spacing, ConstrainedSpec, HermitianMatrix, TorusLattice};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Calibrate,
    Continuum,
    Generate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoppingSymbol {
    HalfInverseL,
}

/// Hopping normalisation: a number or the symbol `"half_inverse_l"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Hopping {
    Value(f64),
    Symbol(HoppingSymbol),
}

impl Default for Hopping {
    fn default() -> Self {
        Hopping::Symbol(HoppingSymbol::HalfInverseL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// Commutant construction around `D₀ = diag(spectrum)`.
    Constrained { spectrum: Vec<f64> },
    /// Independent GUE Higgs fields and Haar links.
    Unconstrained {
        #[serde(default = "one")]
        higgs_scale: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Wilson,
    Higgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub decomposition: f64,
    pub cancellation: f64,
    pub trace_constancy: f64,
    pub collapse: f64,
    pub gauge_invariance: f64,
    pub representation: f64,
    pub calibration: f64,
    /// Relative error below which a sweep counts as exact (no order needed).
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            decomposition: 1e-9,
            cancellation: 1e-10,
            trace_constancy: 1e-9,
            collapse: 1e-9,
            gauge_invariance: 1e-9,
            representation: 1e-10,
            calibration: 1e-8,
            exact: 1e-10,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 8] {
        [
            ("decomposition", self.decomposition),
            ("cancellation", self.cancellation),
            ("trace_constancy", self.trace_constancy),
            ("collapse", self.collapse),
            ("gauge_invariance", self.gauge_invariance),
            ("representation", self.representation),
            ("calibration", self.calibration),
            ("exact", self.exact),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub lattice: TorusLattice,
    #[serde(rename = "N")]
    pub n_mat: usize,
    pub c: Hopping,
    pub seed: u64,
    /// Number of configurations drawn by `verify`.
    pub configs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
    /// Random gauge transformations per configuration in `verify`.
    pub gauge_checks: usize,
    /// Run the edge-cancellation check even on unconstrained configurations.
    pub assert_cancellation: bool,
    /// Configurations in the calibration least-squares system.
    pub samples: usize,
    pub n_list: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields: Option<SmoothFieldSpec>,
    pub observables: Vec<Observable>,
    pub order_bracket: [f64; 2],
    pub tolerances: Tolerances,
    pub strict: bool,
    /// Output directory; `--out` takes precedence. Not embedded in outputs.
    #[serde(skip_serializing)]
    pub out: Option<String>,
}

fn one() -> f64 {
    1.0
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            command: None,
            lattice: TorusLattice::new(4, 2, 1.0).expect("default lattice is valid"),
            n_mat: 2,
            c: Hopping::default(),
            seed: 0,
            configs: 5,
            generator: None,
            gauge_checks: 5,
            assert_cancellation: false,
            samples: 6,
            n_list: vec![8, 16, 32, 64],
            fields: None,
            observables: vec![Observable::Wilson, Observable::Higgs],
            order_bracket: [1.6, 2.4],
            tolerances: Tolerances::default(),
            strict: false,
            out: None,
        }
    }
}

/// `A_1 = a·cos(2πx_0/T)` on a unit torus, plus `Φ = b·cos(2πx_0/T)`.
pub fn default_fields() -> SmoothFieldSpec {
    let mut f = SmoothFieldSpec::zero(2, 1, 1.0);
    f.gauge[1].push(FourierMode { k: vec![1, 0], coeff: HermitianMatrix::scalar(1, 0.5), phase: 0.0 });
    f.higgs.push(FourierMode { k: vec![1, 0], coeff: HermitianMatrix::scalar(1, 0.8), phase: 0.0 });
    f
}

/// Alternating `±1` eigenvalues, e.g. `{1, −1, 1}` for `N = 3`.
pub fn default_spectrum(n_mat: usize) -> Vec<f64> {
    (0..n_mat).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

impl RunSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid run spec: {e}")))
    }

    /// Default spec for a command, with `calibrate` on the smallest 4-d lattice.
    pub fn defaults_for(command: Command) -> Self {
        let mut spec = Self::default();
        if command == Command::Calibrate {
            spec.n_mat = 1;
        }
        spec
    }

    pub fn generator(&self) -> Generator {
        self.generator
            .clone()
            .unwrap_or_else(|| Generator::Constrained { spectrum: default_spectrum(self.n_mat) })
    }

    pub fn fields(&self) -> SmoothFieldSpec {
        self.fields.clone().unwrap_or_else(default_fields)
    }

    pub fn hopping(&self) -> f64 {
        match self.c {
            Hopping::Value(c) => c,
            Hopping::Symbol(HoppingSymbol::HalfInverseL) => half_inverse_spacing(&self.lattice),
        }
    }

    /// Checks everything a command will need, before any computation starts.
    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if let Some(declared) = self.command {
            if declared != command {
                return usage(format!("spec declares command {declared:?} but {command:?} was requested"));
            }
        }
        let lattice = self.lattice.validated().map_err(|e| CliError::Usage(e.to_string()))?;
        let defaults = Tolerances::default();
        for ((name, value), (_, default)) in self.tolerances.entries().iter().zip(defaults.entries()) {
            if !(value.is_finite() && *value > 0.0) {
                return usage(format!("tolerance {name} must be positive, got {value}"));
            }
            if self.strict && *value > default {
                return usage(format!("--strict forbids loosening tolerance {name} above {default:e}"));
            }
        }
        if command == Command::Continuum {
            return self.validate_continuum();
        }
        if self.n_mat == 0 {
            return usage("N must be at least 1".into());
        }
        let c = self.hopping();
        if !(c.is_finite() && c > 0.0) {
            return usage(format!("hopping normalisation c must be positive, got {c}"));
        }
        match self.generator() {
            Generator::Constrained { spectrum } => {
                ConstrainedSpec::from_eigenvalues(&spectrum, 0)
                    .validate(Some(self.n_mat))
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            Generator::Unconstrained { higgs_scale } => {
                if !(higgs_scale.is_finite() && higgs_scale >= 0.0) {
                    return usage(format!("higgs_scale must be non-negative, got {higgs_scale}"));
                }
            }
        }
        match command {
            Command::Verify if self.configs == 0 => usage("configs must be at least 1".into()),
            Command::Calibrate => {
                if self.samples < 6 {
                    return usage(format!("calibration needs samples >= 6, got {}", self.samples));
                }
                let spinor = build_gammas(lattice.dim()).map_err(|e| CliError::Usage(e.to_string()))?.spinor_dim();
                let dim = spinor * self.n_mat * lattice.num_vertices();
                if dim > CALIBRATION_DIM_CAP {
                    return usage(format!("calibration operator dimension {dim} exceeds {CALIBRATION_DIM_CAP}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn validate_continuum(&self) -> Result<(), CliError> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.n_list.len() < 3 {
            return usage(format!("n_list needs at least 3 sizes to fit an order, got {}", self.n_list.len()));
        }
        if self.n_list[0] < 2 || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return usage("n_list must be strictly increasing with every n >= 2".into());
        }
        let [lo, hi] = self.order_bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return usage(format!("order_bracket must be [lo, hi] with lo < hi, got [{lo}, {hi}]"));
        }
        if self.observables.is_empty() {
            return usage("observables must name at least one of wilson, higgs".into());
        }
        self.fields().validate().map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_default_spec() {
        assert_eq!(RunSpec::parse("{}").unwrap(), RunSpec::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunSpec::parse(r#"{"sede": 3}"#).is_err());
        assert!(RunSpec::parse(r#"{"tolerances": {"decomp": 1e-3}}"#).is_err());
        assert!(RunSpec::parse(r#"{"lattice": {"d": 2, "n": 3, "l": 1.0, "x": 0}}"#).is_err());
    }

    #[test]
    fn hopping_accepts_number_or_symbol() {
        let s = RunSpec::parse(r#"{"c": "half_inverse_l", "lattice": {"d": 2, "n": 3, "l": 0.25}}"#).unwrap();
        assert_eq!(s.hopping(), 2.0);
        let s = RunSpec::parse(r#"{"c": 0.7}"#).unwrap();
        assert_eq!(s.hopping(), 0.7);
        assert!(RunSpec::parse(r#"{"c": "one_over_l"}"#).is_err());
    }

    #[test]
    fn validation_catches_bad_inputs() {
        let bad = [
            r#"{"lattice": {"d": 3, "n": 2, "l": 1.0}}"#,
            r#"{"N": 3, "generator": {"kind": "constrained", "spectrum": [1.0, -1.0]}}"#,
            r#"{"c": -1.0}"#,
            r#"{"configs": 0}"#,
            r#"{"command": "calibrate"}"#,
        ];
        for text in bad {
            assert!(RunSpec::parse(text).unwrap().validate(Command::Verify).is_err(), "{text}");
        }
        let s = RunSpec::parse(r#"{"n_list": [4, 8]}"#).unwrap();
        assert!(s.validate(Command::Continuum).is_err());
        let s = RunSpec::parse(r#"{"lattice": {"d": 4, "n": 6, "l": 1.0}, "N": 1}"#).unwrap();
        assert!(s.validate(Command::Calibrate).is_err());
    }

    #[test]
    fn strict_forbids_loosened_tolerances() {
        let s = RunSpec::parse(r#"{"strict": true, "tolerances": {"decomposition": 1e-3}}"#).unwrap();
        assert!(s.validate(Command::Verify).is_err());
        let s = RunSpec::parse(r#"{"strict": true, "tolerances": {"decomposition": 1e-12}}"#).unwrap();
        assert!(s.validate(Command::Verify).is_ok());
    }
}
