//! Where a run's data comes from: a CSV file or a seeded generator.

use std::path::PathBuf;
use std::str::FromStr;

use mcda::generate::{
    generate_gaussian_mixture, generate_multilabel, generate_nullspace_toy, MultiLabelSpec, ToyGenSpec,
};
use mcda::io::{load_csv, CsvSchema};
use mcda::{Dataset, Error, Result};

/// Generator spec as given on the command line:
///
/// * `toy` or `toy:K,per_class,p,intrinsic,noise`
/// * `mixture:K,per_class,p,separation`
/// * `multilabel:L,n,p`
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Toy(ToyGenSpec),
    Mixture {
        classes: usize,
        per_class: usize,
        dim: usize,
        separation: f64,
    },
    MultiLabel {
        labels: usize,
        n: usize,
        dim: usize,
    },
}

fn fields<T: FromStr>(kind: &str, text: &str, count: usize) -> Result<Vec<T>> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != count {
        return Err(Error::InvalidConfig(format!(
            "generator '{kind}' takes {count} comma-separated values, got '{text}'"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse()
                .map_err(|_| Error::InvalidConfig(format!("generator '{kind}': cannot parse '{p}'")))
        })
        .collect()
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "toy" if args.is_empty() => Ok(Generator::Toy(ToyGenSpec::default())),
            "toy" => {
                let v: Vec<f64> = fields(kind, args, 5)?;
                let count = |x: f64| {
                    if x >= 0.0 && x.fract() == 0.0 {
                        Ok(x as usize)
                    } else {
                        Err(Error::InvalidConfig(format!("toy: '{x}' is not a count")))
                    }
                };
                Ok(Generator::Toy(ToyGenSpec {
                    class_count: count(v[0])?,
                    points_per_class: count(v[1])?,
                    ambient_dim: count(v[2])?,
                    intrinsic_dim: count(v[3])?,
                    noise_scale: v[4],
                    ..ToyGenSpec::default()
                }))
            }
            "mixture" => {
                let (head, sep) = args.rsplit_once(',').unwrap_or((args, ""));
                let v: Vec<usize> = fields(kind, head, 3)?;
                let separation = sep
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("mixture: cannot parse separation '{sep}'")))?;
                Ok(Generator::Mixture {
                    classes: v[0],
                    per_class: v[1],
                    dim: v[2],
                    separation,
                })
            }
            "multilabel" => {
                let v: Vec<usize> = fields(kind, args, 3)?;
                Ok(Generator::MultiLabel {
                    labels: v[0],
                    n: v[1],
                    dim: v[2],
                })
            }
            _ => Err(Error::InvalidConfig(format!(
                "unknown generator '{s}' (expected toy, mixture:K,per,p,sep or multilabel:L,n,p)"
            ))),
        }
    }
}

impl Generator {
    pub fn generate(&self, seed: u64) -> Result<Dataset> {
        Ok(match self {
            Generator::Toy(spec) => generate_nullspace_toy(&ToyGenSpec { seed, ..spec.clone() })?.into(),
            Generator::Mixture {
                classes,
                per_class,
                dim,
                separation,
            } => generate_gaussian_mixture(*classes, *per_class, *dim, *separation, seed)?.into(),
            Generator::MultiLabel { labels, n, dim } => {
                generate_multilabel(&MultiLabelSpec::new(*labels, *n, *dim, seed))?.into()
            }
        })
    }
}

#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf, CsvSchema),
    Generated(Generator),
}

impl Source {
    pub fn new(data: Option<PathBuf>, generate: Option<Generator>, schema: CsvSchema) -> Result<Self> {
        match (data, generate) {
            (Some(path), None) => Ok(Source::File(path, schema)),
            (None, Some(g)) => Ok(Source::Generated(g)),
            _ => Err(Error::InvalidConfig(
                "exactly one of --data and --generate is required".into(),
            )),
        }
    }

    pub fn load(&self, seed: u64) -> Result<Dataset> {
        match self {
            Source::File(path, schema) => load_csv(path, *schema),
            Source::Generated(g) => g.generate(seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_generator() {
        assert_eq!("toy".parse::<Generator>().unwrap(), Generator::Toy(ToyGenSpec::default()));
        match "toy:4,5,30,2,0".parse::<Generator>().unwrap() {
            Generator::Toy(spec) => {
                assert_eq!((spec.class_count, spec.points_per_class, spec.ambient_dim), (4, 5, 30));
                assert_eq!(spec.noise_scale, 0.0);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            "mixture:7,30,50,2.5".parse::<Generator>().unwrap(),
            Generator::Mixture {
                classes: 7,
                per_class: 30,
                dim: 50,
                separation: 2.5
            }
        );
        assert_eq!(
            "multilabel:5,100,8".parse::<Generator>().unwrap(),
            Generator::MultiLabel {
                labels: 5,
                n: 100,
                dim: 8
            }
        );
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["gauss:1,2", "mixture:3,10", "mixture:3,10,5,x", "toy:3,10,40,3", "toy:3.5,10,40,3,0"] {
            assert!(matches!(bad.parse::<Generator>(), Err(Error::InvalidConfig(_))), "{bad}");
        }
    }
}
