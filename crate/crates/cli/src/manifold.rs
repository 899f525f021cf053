use std::path::Path;

use clap::ValueEnum;
use confspace::lie::Variant;
use confspace::model::{parse_model_file, preset, preset_catalogue, CohomologyModel, PresetParams};

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Standard,
    /// Orientation-twisted coefficients (even or odd form chosen from n).
    Twisted,
    /// Relative to the boundary.
    Relative,
}

fn parse_params(raw: &[String]) -> Result<PresetParams, Failure> {
    let mut out = PresetParams::new();
    for item in raw.iter().filter(|s| !s.trim().is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Invalid(format!("parameter `{item}` is not key=value")))?;
        let value: i64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::Invalid(format!("parameter `{item}` needs an integer value")))?;
        if out.insert(key.trim().to_string(), value).is_some() {
            return Err(Failure::Invalid(format!("parameter `{}` given twice", key.trim())));
        }
    }
    Ok(out)
}

/// A preset by name, otherwise a model file by path. Models that fail
/// validation are rejected with every violation listed.
pub fn resolve_manifold(name: &str, params: &[String]) -> Result<CohomologyModel, Failure> {
    let params = parse_params(params)?;
    let model = if preset_catalogue().iter().any(|p| p.name == name) {
        preset(name, &params).map_err(|e| Failure::Invalid(e.to_string()))?
    } else if Path::new(name).is_file() {
        if !params.is_empty() {
            return Err(Failure::Invalid("--param applies to presets, not model files".into()));
        }
        let text = std::fs::read_to_string(name).map_err(|e| Failure::Invalid(format!("{name}: {e}")))?;
        parse_model_file(&text).map_err(|e| Failure::Invalid(format!("{name}: {e}")))?
    } else {
        return Err(Failure::Invalid(format!(
            "`{name}` is neither a preset (see `confspace presets`) nor a readable file"
        )));
    };
    let violations = model.validate();
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        return Err(Failure::Invalid(format!(
            "model `{}` is invalid:\n{}",
            model.name,
            lines.join("\n")
        )));
    }
    Ok(model)
}

pub fn resolve_variant(model: &CohomologyModel, arg: VariantArg) -> Result<Variant, Failure> {
    match arg {
        VariantArg::Standard => Ok(Variant::Standard),
        VariantArg::Twisted => Ok(Variant::twisted_for(model.n)),
        VariantArg::Relative if model.boundary => Ok(Variant::Relative),
        VariantArg::Relative => Err(Failure::Invalid(format!(
            "model `{}` has no boundary; use the standard variant",
            model.name
        ))),
    }
}
