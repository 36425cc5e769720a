use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use qdescent::experiments::{
    monte_carlo, preset_spec, write_experiment_csvs, ExperimentSpec, MethodRun, PRESET_NAMES,
};

use crate::svg::{render_log_chart, Series};

#[derive(Args)]
pub struct ExperimentArgs {
    /// Preset name; see --list or pass --config instead
    preset: Option<String>,
    /// JSON experiment spec (overrides the preset)
    #[arg(long)]
    config: Option<PathBuf>,
    /// List available presets and exit
    #[arg(long)]
    list: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(args: ExperimentArgs) -> Result<()> {
    if args.list {
        for name in PRESET_NAMES {
            println!("{name}");
        }
        return Ok(());
    }
    let spec: ExperimentSpec = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let mut spec: ExperimentSpec =
                serde_json::from_str(&text).with_context(|| "parsing experiment config JSON")?;
            if let Some(t) = args.trials {
                spec.trials = t;
            }
            if let Some(i) = args.iterations {
                spec.iterations = i;
            }
            if let Some(s) = args.seed {
                spec.seed = s;
            }
            spec
        }
        (None, Some(name)) => {
            preset_spec(name, args.trials, args.iterations, args.seed.unwrap_or(0))?
        }
        (None, None) => anyhow::bail!(
            "pass a preset name ({}) or --config <file>",
            PRESET_NAMES.join(", ")
        ),
    };

    eprintln!("seed: {}", spec.seed);
    eprintln!(
        "experiment {}: matrix {}, {} methods, {} trials, {} iterations",
        spec.name,
        spec.matrix,
        spec.methods.len(),
        spec.trials,
        spec.iterations
    );
    let runs = monte_carlo(&spec)?;
    let paths = write_experiment_csvs(&args.out, &spec, &runs)?;
    for path in &paths {
        eprintln!("wrote {}", path.display());
    }

    for path in write_charts(&args.out, &spec, &runs)? {
        eprintln!("wrote {}", path.display());
    }
    for run in &runs {
        eprintln!(
            "{} k={} tau={}: final mean relative error {:.3e}",
            run.method.label(),
            run.method.k(),
            run.method.tau(),
            run.trace.mean.last().unwrap()
        );
    }
    Ok(())
}

fn series_label(run: &MethodRun) -> String {
    match run.method.label().as_str() {
        l if l.starts_with("sscd") => format!("{l} k={}", run.method.k()),
        l => l.to_string(),
    }
}

/// One chart per mini-batch size: a single `<prefix>.svg` when the experiment
/// uses one batch size, `<prefix>_tau<t>.svg` otherwise.
fn write_charts(
    out: &std::path::Path,
    spec: &ExperimentSpec,
    runs: &[MethodRun],
) -> Result<Vec<PathBuf>> {
    let mut taus: Vec<usize> = runs.iter().map(|r| r.method.tau()).collect();
    taus.sort_unstable();
    taus.dedup();

    let mut written = Vec::new();
    for &tau in &taus {
        let series: Vec<Series> = runs
            .iter()
            .filter(|r| r.method.tau() == tau)
            .map(|r| Series {
                label: series_label(r),
                points: r
                    .trace
                    .mean
                    .iter()
                    .enumerate()
                    .map(|(t, &m)| (t as f64, m))
                    .collect(),
            })
            .collect();
        let title = if taus.len() == 1 {
            spec.name.clone()
        } else {
            format!("{} (tau = {tau})", spec.name)
        };
        let svg = render_log_chart(&title, "iteration", "mean relative error", &series);
        let file = if taus.len() == 1 {
            format!("{}.svg", spec.prefix())
        } else {
            format!("{}_tau{tau}.svg", spec.prefix())
        };
        let path = out.join(file);
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}
