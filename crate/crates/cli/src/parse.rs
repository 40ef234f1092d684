//! Parsing of surface descriptions like `sphere:radius=1` or
//! `torus:major=2,minor=1` into [`SurfaceSpec`] values.

use std::collections::BTreeMap;

use geodesy::error::{GeodesyError, Result};
use geodesy::surfaces::SurfaceSpec;

fn parse_err(msg: impl Into<String>) -> GeodesyError {
    GeodesyError::Parse(msg.into())
}

/// Key/value options following the surface name.
struct Options(BTreeMap<String, String>);

impl Options {
    fn from_text(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got {part:?}")))?;
            if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(parse_err(format!("duplicate surface option {:?}", k.trim())));
            }
        }
        Ok(Self(map))
    }

    fn real(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.0.remove(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| parse_err(format!("surface option {key}={v:?} is not a number"))),
        }
    }

    fn count(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.0.remove(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| parse_err(format!("surface option {key}={v:?} is not a count"))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.0.into_iter().next() {
            None => Ok(()),
            Some((k, _)) => Err(parse_err(format!("unknown surface option {k:?}"))),
        }
    }
}

/// Parses a surface description of the form `name[:key=value,...]`.
///
/// Recognized names and options (with defaults): `sphere:radius=1`,
/// `torus:major=2,minor=1`, `swiss`, `flat:k=2`, and
/// `bumped:k=1,amplitude=1,m=11`.
pub fn parse_surface(text: &str) -> Result<SurfaceSpec> {
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (text.trim(), ""),
    };
    let mut opts = Options::from_text(rest)?;
    let spec = match name {
        "sphere" => SurfaceSpec::sphere(opts.real("radius", 1.0)?)?,
        "torus" => SurfaceSpec::torus_with(opts.real("major", 2.0)?, opts.real("minor", 1.0)?)?,
        "swiss" | "swissroll" => SurfaceSpec::swiss_roll(),
        "flat" => SurfaceSpec::flat_square(opts.count("k", 2)?)?,
        "bumped" => SurfaceSpec::bumped_grid(
            opts.count("k", 1)?,
            opts.real("amplitude", 1.0)?,
            opts.count("m", 11)?,
        )?,
        other => {
            return Err(parse_err(format!(
                "unknown surface {other:?} (expected sphere, torus, swiss, flat, or bumped)"
            )))
        }
    };
    opts.finish()?;
    Ok(spec)
}

/// Parses a comma-separated list of positive reals, e.g. radii.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| parse_err(format!("{s:?} is not a number")))
        })
        .collect()
}

/// Parses a comma-separated list of counts, e.g. sample sizes.
pub fn parse_count_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| parse_err(format!("{s:?} is not a count")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_surfaces_parse_with_defaults_and_overrides() {
        assert_eq!(parse_surface("sphere").unwrap().name(), "sphere(1)");
        assert_eq!(parse_surface("sphere:radius=2.5").unwrap().name(), "sphere(2.5)");
        assert_eq!(parse_surface("torus").unwrap().name(), "torus(2,1)");
        assert_eq!(parse_surface("torus:minor=0.5").unwrap().name(), "torus(2,0.5)");
        assert_eq!(parse_surface("swiss").unwrap().name(), "swissroll");
        assert_eq!(parse_surface("flat:k=3").unwrap().name(), "flat(3)");
        assert_eq!(
            parse_surface("bumped:k=1,amplitude=1,m=21").unwrap().name(),
            "bumped(1,1,21)"
        );
    }

    #[test]
    fn malformed_descriptions_are_rejected() {
        assert!(parse_surface("cube").is_err());
        assert!(parse_surface("sphere:radius").is_err());
        assert!(parse_surface("sphere:radius=x").is_err());
        assert!(parse_surface("sphere:girth=1").is_err());
        assert!(parse_surface("torus:major=1,major=2").is_err());
        assert!(parse_surface("torus:major=0.5").is_err(), "radii order is validated");
    }

    #[test]
    fn lists_parse_and_reject_junk() {
        assert_eq!(parse_real_list("0.2, 0.3,0.4").unwrap(), vec![0.2, 0.3, 0.4]);
        assert_eq!(parse_count_list("500,1000").unwrap(), vec![500, 1000]);
        assert!(parse_real_list("0.2,abc").is_err());
        assert!(parse_count_list("10,-3").is_err());
    }
}
