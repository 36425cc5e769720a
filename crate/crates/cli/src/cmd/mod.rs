pub mod experiment;
pub mod rates;
pub mod solve;
pub mod verify;

use anyhow::Result;
use qdescent::{DistributionSpec, SymmetricMatrix};

/// Accepts either a recipe string (`clustered:…`, `uniform:…`, `expdecay:…`,
/// `file:…`) or a bare path to a matrix text file.
pub fn matrix_recipe_from_arg(arg: &str) -> String {
    let known_prefix = arg.starts_with("clustered:")
        || arg.starts_with("uniform:")
        || arg.starts_with("expdecay:")
        || arg.starts_with("file:");
    if !known_prefix && std::path::Path::new(arg).exists() {
        format!("file:{arg}")
    } else {
        arg.to_string()
    }
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| anyhow::anyhow!("cannot parse {t:?} as a number"))
        })
        .collect()
}

pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| anyhow::anyhow!("cannot parse {t:?} as an integer"))
        })
        .collect()
}

/// Builds the distribution spec named on the command line.
pub fn distribution_spec_from_flags(
    method: &str,
    k: Option<usize>,
    alpha: Option<f64>,
    betas: Option<&str>,
    p: Option<&str>,
    eps: f64,
    a: &SymmetricMatrix,
) -> Result<DistributionSpec> {
    let spec = match method {
        "uniform-coordinate" => DistributionSpec::UniformCoordinate,
        "diagonal-coordinate" => DistributionSpec::DiagonalCoordinate,
        "rownorm-coordinate" => DistributionSpec::RownormCoordinate,
        "custom-coordinate" => {
            let p = p.ok_or_else(|| anyhow::anyhow!("custom-coordinate requires --p"))?;
            DistributionSpec::CustomCoordinate {
                p: parse_f64_list(p)?,
            }
        }
        "spectral" => DistributionSpec::Spectral,
        "conjugate" => DistributionSpec::Conjugate { eps },
        "sscd" => {
            let k = k.ok_or_else(|| anyhow::anyhow!("sscd requires --k"))?;
            match betas {
                None | Some("optimal") => DistributionSpec::Sscd {
                    k,
                    alpha: None,
                    betas: None,
                },
                Some(list) => DistributionSpec::Sscd {
                    k,
                    alpha: Some(alpha.unwrap_or(1.0)),
                    betas: Some(parse_f64_list(list)?),
                },
            }
        }
        "sscd-largest" => {
            let k = k.ok_or_else(|| anyhow::anyhow!("sscd-largest requires --k"))?;
            let betas = match betas {
                Some(list) => parse_f64_list(list)?,
                None => vec![1.0; a.dim() - k],
            };
            DistributionSpec::SscdLargest {
                k,
                alpha: alpha.unwrap_or(1.0),
                betas,
            }
        }
        other => anyhow::bail!(
            "unknown method {other:?}; expected one of uniform-coordinate, \
             diagonal-coordinate, rownorm-coordinate, custom-coordinate, spectral, \
             conjugate, sscd, sscd-largest, iscond, issd"
        ),
    };
    Ok(spec)
}
