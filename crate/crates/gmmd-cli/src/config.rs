//! Power experiment config files: flat `key = value` lines, `#` comments.
//!
//! Either `case = 1..4` (a built-in scenario) or an explicit `distributions`
//! list must be present, not both. Parameterization conventions apply to how
//! distribution arguments are read, so they are interpreted first regardless
//! of line order.

use gmmd_core::kernel::KernelSpec;
use gmmd_core::samplers::{
    case_config_with, Conventions, DistributionSpec, GammaParam, NormalParam,
};

use crate::harness::{parse_kernel_family, ExperimentConfig, Method};
use crate::CliError;

const KNOWN_KEYS: [&str; 15] = [
    "case",
    "distributions",
    "group-sizes-grid",
    "methods",
    "alpha",
    "replications",
    "kernel",
    "gamma",
    "permutation-b",
    "subsampling-b",
    "subsample-fraction",
    "spectral-draws",
    "master-seed",
    "normal-parameterization",
    "gamma-parameterization",
];

struct Entry {
    key: String,
    value: String,
    line: usize,
}

fn collect_entries(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped.split_once('=').ok_or_else(|| {
            CliError::input(format!("config line {line}: expected key = value"))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::input(format!(
                "config line {line}: unknown key {key:?}"
            )));
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(CliError::input(format!(
                "config line {line}: key {key:?} already set on line {}",
                prev.line
            )));
        }
        entries.push(Entry { key, value, line });
    }
    Ok(entries)
}

fn lookup<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Entry> {
    entries.iter().find(|e| e.key == key)
}

fn parse_value<T: std::str::FromStr>(entry: &Entry, what: &str) -> Result<T, CliError> {
    entry.value.parse().map_err(|_| {
        CliError::input(format!(
            "config line {}: {what} {:?} is invalid",
            entry.line, entry.value
        ))
    })
}

fn parse_conventions(entries: &[Entry]) -> Result<Conventions, CliError> {
    let mut conv = Conventions::default();
    if let Some(e) = lookup(entries, "normal-parameterization") {
        conv.normal = match e.value.as_str() {
            "variance" => NormalParam::Variance,
            "stddev" => NormalParam::StdDev,
            other => {
                return Err(CliError::input(format!(
                    "config line {}: normal-parameterization must be variance or stddev, got {other:?}",
                    e.line
                )));
            }
        };
    }
    if let Some(e) = lookup(entries, "gamma-parameterization") {
        conv.gamma = match e.value.as_str() {
            "rate" => GammaParam::Rate,
            "scale" => GammaParam::Scale,
            other => {
                return Err(CliError::input(format!(
                    "config line {}: gamma-parameterization must be rate or scale, got {other:?}",
                    e.line
                )));
            }
        };
    }
    Ok(conv)
}

fn parse_distributions(
    entries: &[Entry],
    conv: Conventions,
) -> Result<(String, Vec<DistributionSpec>), CliError> {
    let case_entry = lookup(entries, "case");
    let dist_entry = lookup(entries, "distributions");
    match (case_entry, dist_entry) {
        (Some(c), Some(d)) => Err(CliError::input(format!(
            "config lines {} and {}: set either case or distributions, not both",
            c.line.min(d.line),
            c.line.max(d.line)
        ))),
        (None, None) => Err(CliError::input(
            "config must set either case or distributions",
        )),
        (Some(c), None) => {
            let case: u8 = parse_value(c, "case")?;
            let specs = case_config_with(case, conv).map_err(|_| {
                CliError::input(format!(
                    "config line {}: case must be 1, 2, 3, or 4, got {}",
                    c.line, c.value
                ))
            })?;
            Ok((format!("case-{case}"), specs.to_vec()))
        }
        (None, Some(d)) => {
            let mut specs = Vec::new();
            for part in d.value.split(';') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let spec = DistributionSpec::parse_with(part, conv).map_err(|e| {
                    CliError::input(format!("config line {}: {e}", d.line))
                })?;
                specs.push(spec);
            }
            if specs.is_empty() {
                return Err(CliError::input(format!(
                    "config line {}: distributions is empty",
                    d.line
                )));
            }
            Ok(("custom".to_string(), specs))
        }
    }
}

fn parse_grid(entries: &[Entry]) -> Result<Vec<Vec<usize>>, CliError> {
    let e = lookup(entries, "group-sizes-grid")
        .ok_or_else(|| CliError::input("config must set group-sizes-grid"))?;
    let mut grid = Vec::new();
    for tuple in e.value.split(';') {
        let tuple = tuple.trim();
        if tuple.is_empty() {
            continue;
        }
        let mut sizes = Vec::new();
        for s in tuple.split(',') {
            let n: usize = s.trim().parse().map_err(|_| {
                CliError::input(format!(
                    "config line {}: group size {:?} is invalid",
                    e.line,
                    s.trim()
                ))
            })?;
            sizes.push(n);
        }
        grid.push(sizes);
    }
    if grid.is_empty() {
        return Err(CliError::input(format!(
            "config line {}: group-sizes-grid is empty",
            e.line
        )));
    }
    Ok(grid)
}

fn parse_methods(entries: &[Entry]) -> Result<Vec<Method>, CliError> {
    match lookup(entries, "methods") {
        None => Ok(Method::ALL.to_vec()),
        Some(e) => {
            let mut methods = Vec::new();
            for part in e.value.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let m: Method = part.parse().map_err(|err| {
                    CliError::input(format!("config line {}: {err}", e.line))
                })?;
                methods.push(m);
            }
            if methods.is_empty() {
                return Err(CliError::input(format!(
                    "config line {}: methods is empty",
                    e.line
                )));
            }
            Ok(methods)
        }
    }
}

/// Parses an experiment config from text. Validation of cross-field
/// constraints happens in [`ExperimentConfig::validate`], which this calls.
pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let entries = collect_entries(text)?;
    let conv = parse_conventions(&entries)?;
    let (case, distributions) = parse_distributions(&entries, conv)?;
    let grid = parse_grid(&entries)?;
    let methods = parse_methods(&entries)?;

    let alpha = match lookup(&entries, "alpha") {
        Some(e) => parse_value(e, "alpha")?,
        None => 0.05,
    };
    let replications = match lookup(&entries, "replications") {
        Some(e) => parse_value(e, "replications")?,
        None => 100,
    };
    let family = match lookup(&entries, "kernel") {
        Some(e) => parse_kernel_family(&e.value).map_err(|err| {
            CliError::input(format!("config line {}: {err}", e.line))
        })?,
        None => gmmd_core::kernel::KernelFamily::GaussianRbf,
    };
    let gamma: f64 = match lookup(&entries, "gamma") {
        Some(e) => parse_value(e, "gamma")?,
        None => 2.0,
    };
    let kernel = KernelSpec::new(family, gamma).map_err(CliError::from)?;
    let permutation_b = match lookup(&entries, "permutation-b") {
        Some(e) => parse_value(e, "permutation-b")?,
        None => 199,
    };
    let subsampling_b = match lookup(&entries, "subsampling-b") {
        Some(e) => parse_value(e, "subsampling-b")?,
        None => 199,
    };
    let subsample_fraction = match lookup(&entries, "subsample-fraction") {
        Some(e) => parse_value(e, "subsample-fraction")?,
        None => 0.5,
    };
    let spectral_draws = match lookup(&entries, "spectral-draws") {
        Some(e) => parse_value(e, "spectral-draws")?,
        None => 10_000,
    };
    let master_seed = match lookup(&entries, "master-seed") {
        Some(e) => parse_value(e, "master-seed")?,
        None => 0,
    };

    let config = ExperimentConfig {
        case,
        distributions,
        grid,
        methods,
        alpha,
        replications,
        kernel,
        permutation_b,
        subsampling_b,
        subsample_fraction,
        spectral_draws,
        master_seed,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_case_config_with_defaults() {
        let text = "\
# three-group location scenario
case = 4
group-sizes-grid = 20,20,20; 40,40,40
methods = gmmd-permutation, kruskal-wallis
";
        let c = parse_experiment_config(text).unwrap();
        assert_eq!(c.case, "case-4");
        assert_eq!(c.distributions.len(), 3);
        assert_eq!(c.grid, vec![vec![20, 20, 20], vec![40, 40, 40]]);
        assert_eq!(
            c.methods,
            vec![Method::GmmdPermutation, Method::KruskalWallis]
        );
        assert_eq!(c.alpha, 0.05);
        assert_eq!(c.replications, 100);
        assert_eq!(c.kernel.bandwidth(), 2.0);
        assert_eq!(c.permutation_b, 199);
        assert_eq!(c.master_seed, 0);
    }

    #[test]
    fn parses_explicit_distributions_with_conventions() {
        let text = "\
distributions = normal(0, 2); gamma(3, 0.5)
normal-parameterization = stddev
gamma-parameterization = scale
group-sizes-grid = 30,30
methods = gmmd-permutation
replications = 7
master-seed = 11
";
        let c = parse_experiment_config(text).unwrap();
        assert_eq!(c.case, "custom");
        // stddev 2 means variance 4; scale 0.5 means rate 2
        assert_eq!(
            c.distributions[0],
            DistributionSpec::Normal {
                mean: 0.0,
                variance: 4.0
            }
        );
        assert_eq!(
            c.distributions[1],
            DistributionSpec::Gamma {
                shape: 3.0,
                rate: 2.0
            }
        );
        assert_eq!(c.replications, 7);
        assert_eq!(c.master_seed, 11);
    }

    #[test]
    fn rejects_case_and_distributions_together() {
        let text = "\
case = 1
distributions = normal(0,1); normal(0,1)
group-sizes-grid = 10,10,10
";
        let err = parse_experiment_config(text).unwrap_err();
        assert!(err.to_string().contains("not both"), "{err}");
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys_with_line_numbers() {
        let err = parse_experiment_config("case = 1\nbogus = 3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(err.to_string().contains("bogus"), "{err}");

        let err =
            parse_experiment_config("case = 1\n# note\ncase = 2\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn rejects_grid_size_mismatch() {
        let text = "\
case = 2
group-sizes-grid = 20,20
";
        let err = parse_experiment_config(text).unwrap_err();
        assert!(err.to_string().contains("2 sizes"), "{err}");
    }

    #[test]
    fn methods_default_to_all_five() {
        let text = "\
case = 1
group-sizes-grid = 10,10,10
spectral-draws = 1000
";
        let c = parse_experiment_config(text).unwrap();
        assert_eq!(c.methods, Method::ALL.to_vec());
    }
}
