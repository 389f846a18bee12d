use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::parse_real;
use crate::real_sets::SetDescription;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedSet {
    pub label: String,
    pub set: SetDescription,
}

impl NamedSet {
    pub fn new(label: impl Into<String>, set: SetDescription) -> Self {
        NamedSet {
            label: label.into(),
            set,
        }
    }
}

/// Built-in set names with their optional arguments.
pub const PRESET_NAMES: [(&str, &str); 8] = [
    ("integers", "the integers"),
    ("naturals", "{0, 1, 2, ...}"),
    ("reflected-naturals", "{0, -1, -2, ...}"),
    (
        "geometric-naturals",
        "{-2^m : m >= 1} together with {0, 1, 2, ...}",
    ),
    (
        "reflected-geometric-naturals",
        "mirror image of geometric-naturals",
    ),
    ("singleton(x=0)", "the single point x"),
    (
        "cantor(middle=1/3,depth=6)",
        "endpoints of the depth-th middle-fraction Cantor iterate on [0, 1]",
    ),
    (
        "random(count=16,seed=7)",
        "count seeded random points on the 1/64 grid of (-32, 32)",
    ),
];

fn args(text: &str) -> Result<(&str, Vec<f64>)> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        return Ok((text, Vec::new()));
    };
    let inner = text[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::Parse(format!("missing ')' in preset {text:?}")))?;
    let values = inner
        .split(',')
        .filter(|a| !a.trim().is_empty())
        .map(parse_real)
        .collect::<Result<Vec<f64>>>()?;
    Ok((text[..open].trim(), values))
}

fn count_arg(value: f64, name: &'static str) -> Result<u32> {
    if value >= 0.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX) {
        Ok(value as u32)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be a non-negative integer",
        })
    }
}

/// Seeded points on the `1/64` grid of `(-32, 32)`.
pub fn random_finite(count: u32, seed: u64) -> Result<SetDescription> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count.max(1))
        .map(|_| f64::from(rng.gen_range(-2048i32..2048)) / 64.0)
        .collect();
    SetDescription::finite(points)
}

/// Looks up a preset by name, e.g. `naturals` or `cantor(1/3, 10)`.
pub fn preset(text: &str) -> Result<NamedSet> {
    let (name, a) = args(text)?;
    let arity = |n: usize| -> Result<()> {
        if a.len() > n {
            Err(Error::Parse(format!(
                "preset {name:?} takes at most {n} arguments, got {}",
                a.len()
            )))
        } else {
            Ok(())
        }
    };
    let set = match name {
        "integers" => {
            arity(0)?;
            SetDescription::integers()
        }
        "naturals" => {
            arity(0)?;
            SetDescription::naturals()
        }
        "reflected-naturals" => {
            arity(0)?;
            SetDescription::naturals().reflect()
        }
        "geometric-naturals" => {
            arity(0)?;
            SetDescription::geometric_naturals()
        }
        "reflected-geometric-naturals" => {
            arity(0)?;
            SetDescription::geometric_naturals().reflect()
        }
        "singleton" => {
            arity(1)?;
            SetDescription::singleton(a.first().copied().unwrap_or(0.0))
        }
        "cantor" => {
            arity(2)?;
            let middle = a.first().copied().unwrap_or(1.0 / 3.0);
            let depth = count_arg(a.get(1).copied().unwrap_or(6.0), "depth")?;
            SetDescription::cantor(0.0, 1.0, middle, depth)?
        }
        "random" => {
            arity(2)?;
            let count = count_arg(a.first().copied().unwrap_or(16.0), "count")?;
            let seed = count_arg(a.get(1).copied().unwrap_or(7.0), "seed")?;
            random_finite(count, u64::from(seed))?
        }
        _ => {
            let names: Vec<&str> = PRESET_NAMES
                .iter()
                .map(|(n, _)| n.split('(').next().unwrap_or(n))
                .collect();
            return Err(Error::Parse(format!(
                "unknown preset {name:?} (expected one of {})",
                names.join(", ")
            )));
        }
    };
    Ok(NamedSet::new(text.trim(), set))
}

/// The eight reference sets: lattices, their one-sided cuts and mirrors, a
/// point, a Cantor iterate and a random finite set.
pub fn catalog() -> Vec<NamedSet> {
    [
        "integers",
        "naturals",
        "reflected-naturals",
        "geometric-naturals",
        "reflected-geometric-naturals",
        "singleton",
        "cantor",
        "random",
    ]
    .into_iter()
    .map(|name| preset(name).expect("built-in presets are valid"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        assert_eq!(preset("integers").unwrap().set, SetDescription::integers());
        assert_eq!(
            preset("cantor(1/3, 10)").unwrap().set,
            SetDescription::cantor(0.0, 1.0, 1.0 / 3.0, 10).unwrap()
        );
        assert_eq!(
            preset("singleton(2^-3)").unwrap().set,
            SetDescription::singleton(0.125)
        );
        assert!(preset("cantor(1/3, 2.5)").is_err());
        assert!(preset("integers(1)").is_err());
        assert!(preset("nothing").is_err());
        assert!(preset("cantor(1/3").is_err());
    }

    #[test]
    fn catalog_has_eight_distinct_sets() {
        let sets = catalog();
        assert_eq!(sets.len(), 8);
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                assert_ne!(a.set, b.set);
            }
        }
    }

    #[test]
    fn random_sets_are_seeded() {
        assert_eq!(random_finite(16, 3).unwrap(), random_finite(16, 3).unwrap());
        assert_ne!(random_finite(16, 3).unwrap(), random_finite(16, 4).unwrap());
    }
}
