//! Text format for target functions:
//!
//! | form | function |
//! |---|---|
//! | `affine:S,I` | `S t + I` |
//! | `poly:c0,c1,...` | polynomial, coefficients ascending, degree at most 6 |
//! | `fs:a=A,s=S` | `(A - t)^S` for `t < A`, zero after |
//! | `patch:affine:S,I;outside=O;window=LO,HI` | `S t + I`, plus `O` outside `(LO, HI)`; `HI` may be `inf` |
//! | `pwl:t0:y0,t1:y1,...` | piecewise affine through the knots, constant beyond them |

use ptail_core::szasz::{Affine, FunctionDescriptor, PiecewiseAffine, Polynomial, Window};

/// A parse failure, with the 1-based column where the offending token starts.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid function descriptor at column {column}: {message}")]
pub struct DescriptorError {
    pub column: usize,
    pub message: String,
}

type Piece<'a> = (usize, &'a str);

fn fail<T>(offset: usize, message: impl Into<String>) -> Result<T, DescriptorError> {
    Err(DescriptorError { column: offset + 1, message: message.into() })
}

fn split(piece: Piece<'_>, sep: char) -> Vec<Piece<'_>> {
    let (base, s) = piece;
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        if c == sep {
            out.push((base + start, &s[start..i]));
            start = i + c.len_utf8();
        }
    }
    out.push((base + start, &s[start..]));
    out
}

fn split_once(piece: Piece<'_>, sep: char) -> Option<(Piece<'_>, Piece<'_>)> {
    let (base, s) = piece;
    let i = s.find(sep)?;
    Some(((base, &s[..i]), (base + i + sep.len_utf8(), &s[i + sep.len_utf8()..])))
}

fn number(piece: Piece<'_>) -> Result<f64, DescriptorError> {
    let (offset, s) = piece;
    match s.parse::<f64>() {
        Ok(v) if v.is_nan() => fail(offset, "NaN is not allowed"),
        Ok(v) => Ok(v),
        Err(_) if s.is_empty() => fail(offset, "expected a number"),
        Err(_) => fail(offset, format!("'{s}' is not a number")),
    }
}

fn finite(piece: Piece<'_>) -> Result<f64, DescriptorError> {
    let v = number(piece)?;
    if v.is_finite() {
        Ok(v)
    } else {
        fail(piece.0, "value must be finite")
    }
}

fn numbers(piece: Piece<'_>, min: usize, max: usize) -> Result<Vec<f64>, DescriptorError> {
    let parts = split(piece, ',');
    if parts.len() < min || parts.len() > max {
        let want = if min == max { format!("{min}") } else { format!("{min} to {max}") };
        return fail(piece.0, format!("expected {want} comma-separated numbers, found {}", parts.len()));
    }
    parts.into_iter().map(finite).collect()
}

fn affine(piece: Piece<'_>) -> Result<Affine, DescriptorError> {
    let v = numbers(piece, 2, 2)?;
    Ok(Affine::new(v[0], v[1]))
}

/// Parses a descriptor string.
pub fn parse(input: &str) -> Result<FunctionDescriptor, DescriptorError> {
    let Some((kind, rest)) = split_once((0, input), ':') else {
        return fail(0, "expected '<kind>:...' with kind one of affine, poly, fs, patch, pwl");
    };
    match kind.1 {
        "affine" => Ok(FunctionDescriptor::Affine(affine(rest)?)),
        "poly" => {
            let c = numbers(rest, 1, ptail_core::szasz::MAX_POLY_DEGREE + 1)?;
            Polynomial::new(&c)
                .map(FunctionDescriptor::Polynomial)
                .or_else(|e| fail(rest.0, e.to_string()))
        }
        "fs" => parse_fs(rest),
        "patch" => parse_patch(rest),
        "pwl" => {
            let mut knots = Vec::new();
            for p in split(rest, ',') {
                let Some((t, y)) = split_once(p, ':') else {
                    return fail(p.0, "expected a knot 't:y'");
                };
                knots.push((finite(t)?, finite(y)?));
            }
            PiecewiseAffine::new(knots)
                .map(FunctionDescriptor::PiecewiseAffine)
                .or_else(|e| fail(rest.0, e.to_string()))
        }
        other => fail(kind.0, format!("unknown kind '{other}'")),
    }
}

fn parse_fs(rest: Piece<'_>) -> Result<FunctionDescriptor, DescriptorError> {
    let (mut a, mut s) = (None, None);
    for p in split(rest, ',') {
        let Some((key, value)) = split_once(p, '=') else {
            return fail(p.0, "expected 'a=<number>' or 's=<number>'");
        };
        let slot = match key.1 {
            "a" => &mut a,
            "s" => &mut s,
            other => return fail(key.0, format!("unknown key '{other}'")),
        };
        if slot.is_some() {
            return fail(key.0, format!("duplicate key '{}'", key.1));
        }
        *slot = Some(finite(value)?);
    }
    let (Some(a), Some(s)) = (a, s) else {
        return fail(rest.0, "both a and s are required");
    };
    FunctionDescriptor::power_deviation(a, s).or_else(|e| fail(rest.0, e.to_string()))
}

fn parse_patch(rest: Piece<'_>) -> Result<FunctionDescriptor, DescriptorError> {
    let parts = split(rest, ';');
    let Some((_, base)) = split_once(parts[0], ':').filter(|(k, _)| k.1 == "affine") else {
        return fail(parts[0].0, "a patch starts with 'affine:S,I'");
    };
    let base = affine(base)?;
    let (mut offset, mut window) = (None, None);
    for p in &parts[1..] {
        let Some((key, value)) = split_once(*p, '=') else {
            return fail(p.0, "expected 'outside=<number>' or 'window=<lo>,<hi>'");
        };
        match key.1 {
            "outside" if offset.is_none() => offset = Some(finite(value)?),
            "window" if window.is_none() => {
                let bounds = split(value, ',');
                if bounds.len() != 2 {
                    return fail(value.0, "expected 'window=<lo>,<hi>'");
                }
                let lo = finite(bounds[0])?;
                let hi = number(bounds[1])?;
                window = Some(Window::new(lo, hi).or_else(|e| fail(value.0, e.to_string()))?);
            }
            "outside" | "window" => return fail(key.0, format!("duplicate key '{}'", key.1)),
            other => return fail(key.0, format!("unknown key '{other}'")),
        }
    }
    match (offset, window) {
        (Some(offset), Some(window)) => Ok(FunctionDescriptor::Patch { base, offset, window }),
        _ => fail(rest.0, "a patch needs both 'outside=' and 'window='"),
    }
}

/// Canonical text for a descriptor; [`parse`] reads it back exactly.
pub fn format(descriptor: &FunctionDescriptor) -> String {
    let n = |v: f64| v.to_string();
    let list = |v: &[f64]| v.iter().map(|c| n(*c)).collect::<Vec<_>>().join(",");
    match descriptor {
        FunctionDescriptor::Affine(l) => format!("affine:{},{}", n(l.slope), n(l.intercept)),
        FunctionDescriptor::Polynomial(p) => format!("poly:{}", list(p.coefficients())),
        FunctionDescriptor::PowerDeviation { a, s } => format!("fs:a={},s={}", n(*a), n(*s)),
        FunctionDescriptor::Patch { base, offset, window } => format!(
            "patch:affine:{},{};outside={};window={},{}",
            n(base.slope),
            n(base.intercept),
            n(*offset),
            n(window.lo),
            n(window.hi)
        ),
        FunctionDescriptor::PiecewiseAffine(p) => {
            let knots: Vec<String> = p.knots().iter().map(|(t, y)| format!("{}:{}", n(*t), n(*y))).collect();
            format!("pwl:{}", knots.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_examples_parse() {
        assert_eq!(parse("affine:2,1").unwrap(), FunctionDescriptor::Affine(Affine::new(2.0, 1.0)));
        assert_eq!(parse("fs:a=1,s=1").unwrap(), FunctionDescriptor::PowerDeviation { a: 1.0, s: 1.0 });
        assert_eq!(parse("fs:s=2,a=0.5").unwrap(), FunctionDescriptor::PowerDeviation { a: 0.5, s: 2.0 });
        let p = parse("patch:affine:2,1;outside=+1;window=0.5,1.5").unwrap();
        assert_eq!(
            p,
            FunctionDescriptor::Patch {
                base: Affine::new(2.0, 1.0),
                offset: 1.0,
                window: Window::new(0.5, 1.5).unwrap()
            }
        );
        let p = parse("patch:affine:2,1;window=0.5,inf;outside=-3").unwrap();
        assert!(matches!(p, FunctionDescriptor::Patch { window, .. } if window.hi.is_infinite()));
        assert!(matches!(parse("poly:1,0,1").unwrap(), FunctionDescriptor::Polynomial(_)));
        assert!(matches!(parse("pwl:0:0,1:1,2:0").unwrap(), FunctionDescriptor::PiecewiseAffine(_)));
    }

    #[test]
    fn errors_point_at_the_bad_token() {
        let col = |s: &str| parse(s).unwrap_err().column;
        assert_eq!(col("affine:2,x"), 10);
        assert_eq!(col("affine:2"), 8);
        assert_eq!(col("cubic:1"), 1);
        assert_eq!(col("fs:a=1,q=2"), 8);
        assert_eq!(col("fs:a=1,a=2"), 8);
        assert_eq!(col("patch:affine:2,1;outside=1;window=0.5"), 35);
        assert_eq!(col("patch:affine:2,1;outside=1;window=2,1"), 35);
        assert_eq!(col("patch:affine:2,1;outside=1"), 7);
        assert_eq!(col("poly:1,2,3,4,5,6,7,8"), 6);
        assert_eq!(col("pwl:0:0,1"), 9);
        assert_eq!(col("nothing"), 1);
        assert!(parse("affine:2,inf").is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        for s in [
            "affine:2,1",
            "fs:a=1,s=1.5",
            "patch:affine:2,1;outside=1;window=0.5,1.5",
            "patch:affine:-0.1,3;outside=-2;window=0.25,inf",
            "poly:1,0,1",
            "pwl:0:0,1:1,2:0.5",
        ] {
            let d = parse(s).unwrap();
            assert_eq!(format(&d), s);
            assert_eq!(parse(&format(&d)).unwrap(), d);
        }
    }
}
