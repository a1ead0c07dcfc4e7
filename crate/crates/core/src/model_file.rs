//! Versioned JSON serialization of a fitted classifier.

use std::fs;
use std::path::Path;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::data::FeatureScaling;
use crate::em::{predict_with, FittedModel, Prediction};
use crate::error::{Error, Result};
use crate::objective::{Coefficients, TuningParams};
use crate::ratio::ClipBounds;
use crate::select::Method;

pub const MODEL_FORMAT: &str = "covshift-model";
pub const MODEL_VERSION: u32 = 1;

/// On-disk model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub method: Method,
    pub n_features: usize,
    pub coefficients: Coefficients,
    pub params: TuningParams,
    pub clip: ClipBounds,
    /// Standardization applied to raw inputs before the linear predictor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<FeatureScaling>,
}

impl ModelFile {
    pub fn from_fit(model: &FittedModel, method: Method, clip: ClipBounds) -> Self {
        Self {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            method,
            n_features: model.w.n_features(),
            coefficients: model.w.clone(),
            params: model.params,
            clip,
            scaling: None,
        }
    }

    pub fn with_scaling(mut self, scaling: Option<FeatureScaling>) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Schema(e.to_string()))
    }

    /// Parse and validate a model document.
    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self =
            serde_json::from_str(text).map_err(|e| Error::Schema(format!("model file: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.format != MODEL_FORMAT {
            return Err(Error::Schema(format!(
                "unexpected format tag {:?}",
                self.format
            )));
        }
        if self.version != MODEL_VERSION {
            return Err(Error::Schema(format!(
                "unsupported model version {} (expected {MODEL_VERSION})",
                self.version
            )));
        }
        if self.coefficients.len() != self.n_features + 1 {
            return Err(Error::Schema(format!(
                "{} coefficients for {} features",
                self.coefficients.len(),
                self.n_features
            )));
        }
        Coefficients::new(self.coefficients.as_array().clone())
            .map_err(|e| Error::Schema(e.to_string()))?;
        TuningParams::new(self.params.gamma1, self.params.gamma2, self.params.lambda)
            .map_err(|e| Error::Schema(e.to_string()))?;
        if !(self.clip.floor > 0.0 && self.clip.floor <= self.clip.cap) {
            return Err(Error::Schema(format!(
                "invalid clip bounds [{}, {}]",
                self.clip.floor, self.clip.cap
            )));
        }
        if let Some(scaling) = &self.scaling {
            scaling.validate().map_err(|e| Error::Schema(e.to_string()))?;
            if scaling.n_features() != self.n_features {
                return Err(Error::Schema(format!(
                    "scaling covers {} features, model has {}",
                    scaling.n_features(),
                    self.n_features
                )));
            }
        }
        Ok(())
    }

    /// Probabilities and labels for raw (unscaled) inputs.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Prediction> {
        match &self.scaling {
            Some(scaling) => predict_with(&self.coefficients, scaling.apply(x)?.view()),
            None => predict_with(&self.coefficients, x),
        }
    }
}
