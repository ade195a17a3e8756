//! Seeded scalar samplers and the four three-group simulation cases used by
//! the power studies.
//!
//! Canonical parameterizations: normal by mean and variance, gamma by shape
//! and rate (1/scale), uniform by half-open [lower, upper), beta by its two
//! shape parameters. [`Conventions`] lets configuration written in
//! standard-deviation or scale form be mapped onto these canonical forms at
//! the boundary; everything past the boundary is canonical.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Beta, Gamma, Normal};

use crate::Error;

/// A scalar sampling distribution in canonical parameterization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Normal { mean: f64, variance: f64 },
    Gamma { shape: f64, rate: f64 },
    /// Half-open support [lower, upper).
    Uniform { lower: f64, upper: f64 },
    Beta { alpha: f64, beta: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |name: &'static str, v: f64| {
            Err(Error::invalid(
                name,
                alloc::format!("must be a positive finite real, got {v}"),
            ))
        };
        match *self {
            DistributionSpec::Normal { mean, variance } => {
                if !mean.is_finite() {
                    return Err(Error::invalid("mean", "must be finite"));
                }
                if !variance.is_finite() || variance <= 0.0 {
                    return bad("variance", variance);
                }
            }
            DistributionSpec::Gamma { shape, rate } => {
                if !shape.is_finite() || shape <= 0.0 {
                    return bad("shape", shape);
                }
                if !rate.is_finite() || rate <= 0.0 {
                    return bad("rate", rate);
                }
            }
            DistributionSpec::Uniform { lower, upper } => {
                if !lower.is_finite() || !upper.is_finite() || !(lower < upper) {
                    return Err(Error::invalid(
                        "bounds",
                        alloc::format!("need finite lower < upper, got [{lower}, {upper})"),
                    ));
                }
            }
            DistributionSpec::Beta { alpha, beta } => {
                if !alpha.is_finite() || alpha <= 0.0 {
                    return bad("alpha", alpha);
                }
                if !beta.is_finite() || beta <= 0.0 {
                    return bad("beta", beta);
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Normal { mean, .. } => mean,
            DistributionSpec::Gamma { shape, rate } => shape / rate,
            DistributionSpec::Uniform { lower, upper } => 0.5 * (lower + upper),
            DistributionSpec::Beta { alpha, beta } => alpha / (alpha + beta),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            DistributionSpec::Normal { variance, .. } => variance,
            DistributionSpec::Gamma { shape, rate } => shape / (rate * rate),
            DistributionSpec::Uniform { lower, upper } => {
                let w = upper - lower;
                w * w / 12.0
            }
            DistributionSpec::Beta { alpha, beta } => {
                let s = alpha + beta;
                alpha * beta / (s * s * (s + 1.0))
            }
        }
    }

    /// Parses `family(a,b)` applying the given conventions to the second
    /// normal parameter and the second gamma parameter.
    pub fn parse_with(s: &str, conventions: Conventions) -> Result<Self, Error> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::invalid("distribution", bad_syntax(s)))?;
        if !s.ends_with(')') {
            return Err(Error::invalid("distribution", bad_syntax(s)));
        }
        let family = s[..open].trim().to_ascii_lowercase();
        let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').collect();
        if args.len() != 2 {
            return Err(Error::invalid("distribution", bad_syntax(s)));
        }
        let a: f64 = args[0]
            .trim()
            .parse()
            .map_err(|_| Error::invalid("distribution", bad_syntax(s)))?;
        let b: f64 = args[1]
            .trim()
            .parse()
            .map_err(|_| Error::invalid("distribution", bad_syntax(s)))?;
        let spec = match family.as_str() {
            "normal" => DistributionSpec::Normal {
                mean: a,
                variance: match conventions.normal {
                    NormalParam::Variance => b,
                    NormalParam::StdDev => b * b,
                },
            },
            "gamma" => DistributionSpec::Gamma {
                shape: a,
                rate: match conventions.gamma {
                    GammaParam::Rate => b,
                    GammaParam::Scale => 1.0 / b,
                },
            },
            "uniform" => DistributionSpec::Uniform { lower: a, upper: b },
            "beta" => DistributionSpec::Beta { alpha: a, beta: b },
            other => {
                return Err(Error::invalid(
                    "distribution",
                    alloc::format!("unknown family {other:?}"),
                ));
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn bad_syntax(s: &str) -> String {
    alloc::format!("expected family(a,b), e.g. normal(0,1), got {s:?}")
}

/// Displays in canonical form: `normal(mean,variance)`, `gamma(shape,rate)`,
/// `uniform(lower,upper)`, `beta(alpha,beta)`.
impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistributionSpec::Normal { mean, variance } => {
                write!(f, "normal({mean},{variance})")
            }
            DistributionSpec::Gamma { shape, rate } => write!(f, "gamma({shape},{rate})"),
            DistributionSpec::Uniform { lower, upper } => {
                write!(f, "uniform({lower},{upper})")
            }
            DistributionSpec::Beta { alpha, beta } => write!(f, "beta({alpha},{beta})"),
        }
    }
}

/// Parses under the default conventions (variance, rate), the inverse of
/// `Display`.
impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::parse_with(s, Conventions::default())
    }
}

/// How the second normal parameter is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalParam {
    #[default]
    Variance,
    StdDev,
}

/// How the second gamma parameter is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaParam {
    #[default]
    Rate,
    Scale,
}

/// Parameter-reading conventions applied at configuration boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Conventions {
    pub normal: NormalParam,
    pub gamma: GammaParam,
}

/// Draws `count` scalar values with a ChaCha12 generator seeded by `seed`.
pub fn sample(spec: &DistributionSpec, count: usize, seed: u64) -> Result<Vec<f64>, Error> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::invalid("count", "need at least 1 draw"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    match *spec {
        DistributionSpec::Normal { mean, variance } => {
            let d = Normal::new(mean, libm::sqrt(variance)).expect("validated");
            out.extend((0..count).map(|_| d.sample(&mut rng)));
        }
        DistributionSpec::Gamma { shape, rate } => {
            let d = Gamma::new(shape, 1.0 / rate).expect("validated");
            out.extend((0..count).map(|_| d.sample(&mut rng)));
        }
        DistributionSpec::Uniform { lower, upper } => {
            let d = Uniform::new(lower, upper);
            out.extend((0..count).map(|_| d.sample(&mut rng)));
        }
        DistributionSpec::Beta { alpha, beta } => {
            let d = Beta::new(alpha, beta).expect("validated");
            out.extend((0..count).map(|_| d.sample(&mut rng)));
        }
    }
    Ok(out)
}

/// The four standard three-group simulation cases under default conventions.
///
/// 1. normal(3,1), gamma(3,1), gamma(6,2): equal means, different shapes
/// 2. normal(0,1), normal(0,2), normal(0,4): scale-only differences
/// 3. uniform(0,1), beta(1,1.5), beta(1.5,1): bounded support, shape shifts
/// 4. normal(0,1), normal(0.3,1), normal(0.6,1): location-only differences
pub fn case_config(case: u8) -> Result<[DistributionSpec; 3], Error> {
    case_config_with(case, Conventions::default())
}

/// [`case_config`] with the case's literal parameters read under the given
/// conventions (e.g. gamma written in scale form).
pub fn case_config_with(case: u8, conv: Conventions) -> Result<[DistributionSpec; 3], Error> {
    let normal = |mean: f64, second: f64| DistributionSpec::Normal {
        mean,
        variance: match conv.normal {
            NormalParam::Variance => second,
            NormalParam::StdDev => second * second,
        },
    };
    let gamma = |shape: f64, second: f64| DistributionSpec::Gamma {
        shape,
        rate: match conv.gamma {
            GammaParam::Rate => second,
            GammaParam::Scale => 1.0 / second,
        },
    };
    match case {
        1 => Ok([normal(3.0, 1.0), gamma(3.0, 1.0), gamma(6.0, 2.0)]),
        2 => Ok([normal(0.0, 1.0), normal(0.0, 2.0), normal(0.0, 4.0)]),
        3 => Ok([
            DistributionSpec::Uniform {
                lower: 0.0,
                upper: 1.0,
            },
            DistributionSpec::Beta {
                alpha: 1.0,
                beta: 1.5,
            },
            DistributionSpec::Beta {
                alpha: 1.5,
                beta: 1.0,
            },
        ]),
        4 => Ok([normal(0.0, 1.0), normal(0.3, 1.0), normal(0.6, 1.0)]),
        other => Err(Error::invalid(
            "case",
            alloc::format!("simulation cases are numbered 1 through 4, got {other}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn display_parse_round_trip() {
        let specs = [
            DistributionSpec::Normal {
                mean: 0.3,
                variance: 1.0,
            },
            DistributionSpec::Gamma {
                shape: 6.0,
                rate: 2.0,
            },
            DistributionSpec::Uniform {
                lower: 0.0,
                upper: 1.0,
            },
            DistributionSpec::Beta {
                alpha: 1.5,
                beta: 1.0,
            },
        ];
        for s in specs {
            let back: DistributionSpec = s.to_string().parse().unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn conventions_change_the_reading() {
        let sd = Conventions {
            normal: NormalParam::StdDev,
            gamma: GammaParam::Scale,
        };
        let n = DistributionSpec::parse_with("normal(0,2)", sd).unwrap();
        assert_eq!(
            n,
            DistributionSpec::Normal {
                mean: 0.0,
                variance: 4.0
            }
        );
        let g = DistributionSpec::parse_with("gamma(6,2)", sd).unwrap();
        assert_eq!(
            g,
            DistributionSpec::Gamma {
                shape: 6.0,
                rate: 0.5
            }
        );
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!("normal(0,0)".parse::<DistributionSpec>().is_err());
        assert!("uniform(1,1)".parse::<DistributionSpec>().is_err());
        assert!("gamma(-1,1)".parse::<DistributionSpec>().is_err());
        assert!("cauchy(0,1)".parse::<DistributionSpec>().is_err());
        assert!("normal(0)".parse::<DistributionSpec>().is_err());
    }
}
