//! JSON schemas for Ω sets, paths and germs.
//!
//! Complex numbers are `[re, im]` pairs. Every object here serializes back
//! to JSON that parses to an equal value.

use std::path::Path;

use resurgence_core::{Generator, Germ, GermSource, OmegaSet, Piece, PiecewisePath, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Complex = [f64; 2];

pub fn to_c(z: Complex) -> C64 {
    C64::new(z[0], z[1])
}

pub fn from_c(z: C64) -> Complex {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Ray {
        base: Complex,
        step: Complex,
    },
    Lattice {
        base: Complex,
        p1: Complex,
        #[serde(default)]
        p2: Complex,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaPreset {
    PositiveIntegers,
    GaussianIntegers,
    /// `2πiℤ`, origin included.
    TwoPiIZ,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<OmegaPreset>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Complex>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
}

impl OmegaSpec {
    pub fn build(&self) -> Result<OmegaSet, CliError> {
        let mut points: Vec<C64> = self.points.iter().copied().map(to_c).collect();
        let mut gens: Vec<Generator> = self
            .generators
            .iter()
            .map(|g| match *g {
                GeneratorSpec::Ray { base, step } => Generator::Ray { base: to_c(base), step: to_c(step) },
                GeneratorSpec::Lattice { base, p1, p2 } => {
                    Generator::Lattice { base: to_c(base), p1: to_c(p1), p2: to_c(p2) }
                }
            })
            .collect();
        if let Some(preset) = self.preset {
            let base = match preset {
                OmegaPreset::PositiveIntegers => OmegaSet::positive_integers(),
                OmegaPreset::GaussianIntegers => OmegaSet::gaussian_integers(),
                OmegaPreset::TwoPiIZ => OmegaSet::lattice_1d(C64::new(0.0, 2.0 * std::f64::consts::PI))?,
            };
            points.extend_from_slice(base.finite_points());
            gens.extend_from_slice(base.generators());
        }
        Ok(OmegaSet::new(points, gens)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PieceSpec {
    Segment { from: Complex, to: Complex },
    Arc { center: Complex, radius: f64, from_angle: f64, to_angle: f64 },
    Samples { points: Vec<Complex> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub pieces: Vec<PieceSpec>,
}

impl PathSpec {
    pub fn build(&self) -> Result<PiecewisePath, CliError> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| match p {
                PieceSpec::Segment { from, to } => Ok(Piece::segment(to_c(*from), to_c(*to))),
                PieceSpec::Arc { center, radius, from_angle, to_angle } => {
                    Ok(Piece::arc(to_c(*center), *radius, *from_angle, *to_angle))
                }
                PieceSpec::Samples { points } => Piece::sampled(points.iter().copied().map(to_c).collect()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PiecewisePath::new(pieces)?)
    }

    pub fn polyline(points: &[C64]) -> Self {
        let pieces = points.windows(2).map(|w| PieceSpec::Segment { from: from_c(w[0]), to: from_c(w[1]) }).collect();
        Self { pieces }
    }
}

/// A germ: a literal truncated series or a closed form with known
/// singular points. A bare `{center, coeffs, radius}` object is read as
/// `kind: "series"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GermSpec {
    One,
    Const {
        value: Complex,
    },
    Poly {
        coeffs: Vec<Complex>,
    },
    /// `1/(ζ − at)`.
    Geom {
        at: Complex,
    },
    /// `(ζ − at)^(−order)`.
    Pole {
        at: Complex,
        order: u32,
    },
    /// `log(ζ − at)`.
    Log {
        at: Complex,
    },
    /// `log(1 − ζ/at)`.
    Log1m {
        at: Complex,
    },
    Series {
        center: Complex,
        coeffs: Vec<Complex>,
        radius: f64,
    },
    Sum {
        terms: Vec<GermSpec>,
    },
    Product {
        factors: Vec<GermSpec>,
    },
    Scale {
        by: Complex,
        germ: Box<GermSpec>,
    },
}

impl GermSpec {
    pub fn source(&self) -> Result<GermSource, CliError> {
        Ok(match self {
            GermSpec::One => GermSource::one(),
            GermSpec::Const { value } => GermSource::Const(to_c(*value)),
            GermSpec::Poly { coeffs } => GermSource::Poly(coeffs.iter().copied().map(to_c).collect()),
            GermSpec::Geom { at } => GermSource::geom(to_c(*at)),
            GermSpec::Pole { at, order } => GermSource::Pole { at: to_c(*at), order: *order },
            GermSpec::Log { at } => GermSource::Log { at: to_c(*at) },
            GermSpec::Log1m { at } => GermSource::log1m(to_c(*at)),
            GermSpec::Series { center, coeffs, radius } => {
                GermSource::Series(Germ::new(to_c(*center), coeffs.iter().copied().map(to_c).collect(), *radius)?)
            }
            GermSpec::Sum { terms } => GermSource::Sum(terms.iter().map(|t| t.source()).collect::<Result<_, _>>()?),
            GermSpec::Product { factors } => {
                GermSource::Product(factors.iter().map(|t| t.source()).collect::<Result<_, _>>()?)
            }
            GermSpec::Scale { by, germ } => GermSource::Scale(to_c(*by), Box::new(germ.source()?)),
        })
    }

    pub fn from_germ(g: &Germ) -> Self {
        GermSpec::Series {
            center: from_c(g.center()),
            coeffs: g.coeffs().iter().copied().map(from_c).collect(),
            radius: g.radius(),
        }
    }
}

/// Named germs written as strings: `one`, `geom(ω)`, `log1m(ω)`, `log(ω)`
/// and `poly(a₀, a₁, …)`, with complex literals such as `2`, `1-0.5i`.
pub fn builtin_germ(text: &str) -> Result<GermSpec, String> {
    let text = text.trim();
    let (name, args) = match text.split_once('(') {
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| format!("missing ')' in '{text}'"))?;
            let args = inner
                .split(',')
                .map(|a| {
                    a.trim()
                        .replace(' ', "")
                        .parse::<C64>()
                        .map(from_c)
                        .map_err(|_| format!("bad complex number '{}'", a.trim()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (name.trim(), args)
        }
        None => (text, Vec::new()),
    };
    let one_arg = |args: &[Complex]| match args {
        [a] => Ok(*a),
        _ => Err(format!("'{name}' takes one argument")),
    };
    match name {
        "one" if args.is_empty() => Ok(GermSpec::One),
        "geom" => Ok(GermSpec::Geom { at: one_arg(&args)? }),
        "log1m" => Ok(GermSpec::Log1m { at: one_arg(&args)? }),
        "log" => Ok(GermSpec::Log { at: one_arg(&args)? }),
        "poly" if !args.is_empty() => Ok(GermSpec::Poly { coeffs: args }),
        _ => Err(format!("unknown germ '{text}' (expected one, geom(w), log1m(w), log(w) or poly(a0, a1, ...))")),
    }
}

/// Rewrites germ shorthands in place, recursively: strings become named
/// germs and `{center, coeffs, radius}` objects without a `kind` become
/// series.
fn expand_germ_shorthands(v: &mut serde_json::Value) -> Result<(), String> {
    match v {
        serde_json::Value::String(text) => {
            *v = serde_json::to_value(builtin_germ(text)?).expect("germs serialize");
        }
        serde_json::Value::Object(map) => {
            if !map.contains_key("kind") && map.contains_key("coeffs") && map.contains_key("center") {
                map.insert("kind".into(), "series".into());
            }
            for key in ["germ", "terms", "factors"] {
                match map.get_mut(key) {
                    Some(serde_json::Value::Array(items)) => items.iter_mut().try_for_each(expand_germ_shorthands)?,
                    Some(inner) => expand_germ_shorthands(inner)?,
                    None => {}
                }
            }
        }
        _ => {}
    }
    Ok(())
}

/// Deserializes with JSON-pointer locations in error messages.
fn from_value<T: DeserializeOwned>(v: serde_json::Value, what: &str, origin: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        use serde_path_to_error::Segment;
        // Tagged enums are buffered before dispatch, so the pointer stops at
        // the enclosing object for errors inside one.
        let pointer: String = e
            .path()
            .iter()
            .filter_map(|seg| match seg {
                Segment::Seq { index } => Some(format!("/{index}")),
                Segment::Map { key } => Some(format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
                Segment::Enum { .. } | Segment::Unknown => None,
            })
            .collect();
        let location = if pointer.is_empty() { "the document root".to_string() } else { format!("'{pointer}'") };
        CliError::Input(format!("{origin}: invalid {what} at {location}: {}", e.inner()))
    })
}

fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_germ(v: serde_json::Value, origin: &str) -> Result<GermSpec, CliError> {
    let mut v = v;
    expand_germ_shorthands(&mut v).map_err(|e| CliError::Input(format!("{origin}: invalid germ: {e}")))?;
    from_value(v, "germ", origin)
}

pub fn parse_path(v: serde_json::Value, origin: &str) -> Result<PathSpec, CliError> {
    from_value(v, "path", origin)
}

pub fn parse_omega(v: serde_json::Value, origin: &str) -> Result<OmegaSpec, CliError> {
    from_value(v, "omega set", origin)
}

/// A germ file, or a named germ such as `geom(1)` given in place of a path.
pub fn load_germ(path: &Path) -> Result<GermSpec, CliError> {
    if !path.exists() {
        if let Some(named) = path.to_str().and_then(|t| builtin_germ(t).ok()) {
            return Ok(named);
        }
    }
    parse_germ(read_json(path)?, &path.display().to_string())
}

pub fn load_path(path: &Path) -> Result<PathSpec, CliError> {
    parse_path(read_json(path)?, &path.display().to_string())
}

pub fn load_omega(path: &Path) -> Result<OmegaSpec, CliError> {
    parse_omega(read_json(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn literal_germ_without_kind() {
        let g =
            parse_germ(json!({"center": [0.0, 0.0], "coeffs": [[1.0, 0.0], [0.5, 0.0]], "radius": 1.0}), "t").unwrap();
        assert!(matches!(g, GermSpec::Series { .. }));
        let nested = parse_germ(
            json!({"kind": "sum", "terms": [{"kind": "geom", "at": [1.0, 0.0]}, {"center": [0.0, 0.0], "coeffs": [[1.0, 0.0]], "radius": 2.0}]}),
            "t",
        )
        .unwrap();
        assert!(nested.source().is_ok());
    }

    #[test]
    fn named_germs() {
        assert_eq!(builtin_germ("one").unwrap(), GermSpec::One);
        assert_eq!(builtin_germ("geom(1)").unwrap(), GermSpec::Geom { at: [1.0, 0.0] });
        assert_eq!(builtin_germ(" log1m(1 - 0.5i) ").unwrap(), GermSpec::Log1m { at: [1.0, -0.5] });
        assert_eq!(
            builtin_germ("poly(0, 2i, 1)").unwrap(),
            GermSpec::Poly { coeffs: vec![[0.0, 0.0], [0.0, 2.0], [1.0, 0.0]] }
        );
        assert!(builtin_germ("geom(1, 2)").is_err());
        assert!(builtin_germ("exp(1)").is_err());
        let nested = parse_germ(
            json!({"kind": "product", "factors": ["geom(2)", {"kind": "scale", "by": [2.0, 0.0], "germ": "log1m(1)"}]}),
            "t",
        );
        assert!(nested.unwrap().source().is_ok());
        assert_eq!(parse_germ(json!("geom(2)"), "t").unwrap(), GermSpec::Geom { at: [2.0, 0.0] });
    }

    #[test]
    fn errors_carry_pointers() {
        let e = parse_path(json!({"pieces": [{"kind": "segment", "from": [0.0, 0.0], "to": [1.0]}]}), "p.json")
            .unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("'/pieces/0'"), "{msg}");
        let e = parse_omega(json!({"preset": "primes"}), "o.json").unwrap_err();
        assert!(e.to_string().contains("/preset"), "{e}");
    }

    #[test]
    fn presets_build() {
        let o = parse_omega(json!({"preset": "two_pi_i_z"}), "o").unwrap().build().unwrap();
        assert!(o.contains_origin());
        let o = parse_omega(json!({"points": [[1.0, 0.0], [2.0, 0.0]]}), "o").unwrap().build().unwrap();
        assert_eq!(o.rho().unwrap(), 1.0);
    }
}
