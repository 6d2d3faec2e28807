//! Text grammars for functions, measures and connections.
//!
//! ```text
//! function:   affine a b | power alpha | logmean | moebius lambda
//!             | sum w1 <function> + w2 <function> ...
//! measure:    one entry per line: atom0 m | atomInf m | atom lambda m
//!             | density <geometric|logmean-numeric> [weight]
//! connection: mean arithmetic|geometric|harmonic|logarithmic | parallel
//!             | function <function> | measure <file> | scale k <connection>
//!             | sum <connection> + <connection> ...
//! ```
//!
//! In a connection `sum`, a `+` followed by a weight rather than a keyword
//! continues the preceding function sum.

use std::path::Path;

use crate::connections::{Connection, NamedMean};
use crate::error::{Error, Result};
use crate::measures::{Density, QuadSpec, RepMeasure};
use crate::monotone::{OMFunction, OMKind};
use crate::scalar::Real;

fn parse_number<R: Real>(tok: Option<&str>, what: &str) -> Result<R> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} `{tok}`")))?;
    if v.is_finite() {
        Ok(R::lit(v))
    } else {
        Err(Error::Parse(format!("{what} must be finite, got `{tok}`")))
    }
}

fn expect_end<'a>(mut toks: impl Iterator<Item = &'a str>, ctx: &str) -> Result<()> {
    match toks.next() {
        None => Ok(()),
        Some(t) => Err(Error::Parse(format!("unexpected `{t}` after {ctx}"))),
    }
}

/// Invalid parameters in otherwise well-formed text are parse errors.
fn as_parse(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) => Error::Parse(m),
        Error::NegativeScalar(k) => Error::Parse(format!("weight must be nonnegative, got {k}")),
        e => e,
    }
}

pub fn parse_function<R: Real>(text: &str) -> Result<OMFunction<R>> {
    let text = text.trim();
    let mut toks = text.split_whitespace();
    let head = toks
        .next()
        .ok_or_else(|| Error::Parse("empty function spec".into()))?;
    let f = match head {
        "affine" => {
            let a = parse_number(toks.next(), "affine coefficient a")?;
            let b = parse_number(toks.next(), "affine coefficient b")?;
            expect_end(toks, "affine a b")?;
            OMFunction::affine(a, b)
        }
        "power" => {
            let alpha = parse_number(toks.next(), "power exponent")?;
            expect_end(toks, "power alpha")?;
            OMFunction::power(alpha)
        }
        "logmean" => {
            expect_end(toks, "logmean")?;
            Ok(OMFunction::log_mean())
        }
        "moebius" => {
            let l = parse_number(toks.next(), "moebius parameter")?;
            expect_end(toks, "moebius lambda")?;
            OMFunction::moebius(l)
        }
        "sum" => {
            let rest = text["sum".len()..].trim();
            let mut terms = Vec::new();
            for part in rest.split('+') {
                let part = part.trim();
                let (w, spec) = part.split_once(char::is_whitespace).ok_or_else(|| {
                    Error::Parse(format!("sum term `{part}` needs a weight and a function"))
                })?;
                terms.push((
                    parse_number::<R>(Some(w), "sum weight")?,
                    parse_function(spec)?,
                ));
            }
            OMFunction::cone_sum(terms)
        }
        other => return Err(Error::Parse(format!("unknown function `{other}`"))),
    };
    f.map_err(as_parse)
}

/// Parses the measure file format; densities are integrated with `quad`.
pub fn parse_measure<R: Real>(text: &str, quad: &QuadSpec<R>) -> Result<RepMeasure<R>> {
    let mut mu = RepMeasure::zero();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let ctx = |m: String| Error::Parse(format!("line {}: {m}", no + 1));
        let mut toks = line.split_whitespace();
        let part = match toks.next() {
            Some("atom0") => {
                let m = parse_number(toks.next(), "mass")?;
                expect_end(toks, "atom0 m")?;
                RepMeasure::atom_at_zero(m)
            }
            Some("atomInf") => {
                let m = parse_number(toks.next(), "mass")?;
                expect_end(toks, "atomInf m")?;
                RepMeasure::atom_at_infinity(m)
            }
            Some("atom") => {
                let l = parse_number(toks.next(), "atom location")?;
                let m = parse_number(toks.next(), "mass")?;
                expect_end(toks, "atom lambda m")?;
                RepMeasure::atom(l, m)
            }
            Some("density") => {
                let name = toks
                    .next()
                    .ok_or_else(|| ctx("missing density name".into()))?;
                let d = Density::from_name(name)
                    .ok_or_else(|| ctx(format!("unknown density `{name}`")))?;
                let w = match toks.next() {
                    None => R::one(),
                    t => parse_number(t, "density weight")?,
                };
                expect_end(toks, "density name weight")?;
                RepMeasure::density(d, w, quad.clone())
            }
            Some(other) => return Err(ctx(format!("unknown entry `{other}`"))),
            None => unreachable!(),
        };
        let part = part.map_err(|e| match as_parse(e) {
            Error::Parse(m) => ctx(m),
            e => e,
        })?;
        mu = mu.add(&part);
    }
    Ok(mu)
}

pub fn read_measure_file<R: Real>(
    path: impl AsRef<Path>,
    quad: &QuadSpec<R>,
) -> Result<RepMeasure<R>> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_measure(&text, quad)
}

const CONNECTION_KEYWORDS: [&str; 6] = ["mean", "parallel", "function", "measure", "scale", "sum"];

/// Parses a connection spec. `measure <file>` paths are read relative to
/// the working directory; densities use `quad`.
pub fn parse_connection<R: Real>(text: &str, quad: &QuadSpec<R>) -> Result<Connection<R>> {
    let text = text.trim();
    let (head, rest) = match text.split_once(char::is_whitespace) {
        Some((h, r)) => (h, r.trim()),
        None => (text, ""),
    };
    let c = match head {
        "" => return Err(Error::Parse("empty connection spec".into())),
        "mean" => {
            let m = match rest {
                "arithmetic" => NamedMean::Arithmetic,
                "geometric" => NamedMean::Geometric,
                "harmonic" => NamedMean::Harmonic,
                "logarithmic" => NamedMean::Logarithmic,
                other => return Err(Error::Parse(format!("unknown mean `{other}`"))),
            };
            Connection::named(m)
        }
        "parallel" if rest.is_empty() => Connection::parallel_sum(),
        "function" => Connection::from_function(parse_function(rest)?),
        "measure" => {
            if rest.is_empty() {
                return Err(Error::Parse("measure needs a file path".into()));
            }
            Connection::from_measure(read_measure_file(rest, quad)?)
                .with_label(format!("measure {rest}"))
        }
        "scale" => {
            let (k, spec) = rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse("scale needs a factor and a connection".into()))?;
            let k: R = parse_number(Some(k), "scale factor")?;
            parse_connection(spec, quad)?.scale(k).map_err(as_parse)?
        }
        "sum" => {
            let mut parts: Vec<String> = Vec::new();
            for piece in rest.split('+') {
                let piece = piece.trim();
                let first = piece.split_whitespace().next().unwrap_or("");
                match parts.last_mut() {
                    Some(prev) if !CONNECTION_KEYWORDS.contains(&first) => {
                        prev.push_str(" + ");
                        prev.push_str(piece);
                    }
                    _ => parts.push(piece.to_string()),
                }
            }
            let terms = parts
                .iter()
                .map(|p| Ok((R::one(), parse_connection(p, quad)?)))
                .collect::<Result<Vec<_>>>()?;
            Connection::cone(terms)?
        }
        other => return Err(Error::Parse(format!("unknown connection `{other}`"))),
    };
    Ok(c)
}

/// Function spec text of a function, resolving measure-backed parts with
/// catalog densities to closed forms.
///
/// Fails with `UnsupportedInversion` for custom densities, which have no
/// closed form in the grammar.
pub fn function_spec<R: Real>(f: &OMFunction<R>) -> Result<String> {
    match f.kind() {
        OMKind::MeasureBacked(mu) => Ok(closed_form(mu)?.label().to_string()),
        OMKind::ConeSum(terms) if terms.iter().any(|(_, g)| !matches!(spec_leaf(g), Ok(true))) => {
            let resolved = terms
                .iter()
                .map(|(w, g)| Ok((*w, parse_function::<R>(&function_spec(g)?)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(OMFunction::cone_sum(resolved)?.label().to_string())
        }
        _ => Ok(f.label().to_string()),
    }
}

fn spec_leaf<R: Real>(f: &OMFunction<R>) -> Result<bool> {
    Ok(match f.kind() {
        OMKind::MeasureBacked(_) => false,
        OMKind::ConeSum(t) => t.iter().all(|(_, g)| matches!(spec_leaf(g), Ok(true))),
        _ => true,
    })
}

/// The catalog function equal to `∫ (1 + λ) x/(x + λ) dμ(λ)`.
pub fn closed_form<R: Real>(mu: &RepMeasure<R>) -> Result<OMFunction<R>> {
    let mut terms = Vec::new();
    if mu.atom_zero() > R::zero() || mu.atom_infinity() > R::zero() {
        terms.push((
            R::one(),
            OMFunction::affine(mu.atom_zero(), mu.atom_infinity())?,
        ));
    }
    for &(l, w) in mu.interior_atoms() {
        terms.push((w, OMFunction::moebius(l)?));
    }
    if let Some(part) = mu.density_part() {
        for (w, d) in part.terms() {
            let f = match d {
                Density::Geometric => OMFunction::power(R::lit(0.5))?,
                Density::LogMean => OMFunction::log_mean(),
                Density::Custom(_) => {
                    return Err(Error::UnsupportedInversion(
                        "custom density to function spec".into(),
                    ))
                }
            };
            terms.push((*w, f));
        }
    }
    Ok(match terms.len() {
        0 => OMFunction::zero(),
        1 if terms[0].0 == R::one() => terms.pop().expect("one term").1,
        _ => OMFunction::cone_sum(terms)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::PsdMatrix;
    use std::io::Write;

    fn quad() -> QuadSpec<f64> {
        QuadSpec::default()
    }

    #[test]
    fn function_specs_round_trip() {
        for text in [
            "affine 0.5 0.5",
            "power 0.25",
            "logmean",
            "moebius 3",
            "sum 0.5 moebius 1 + 2 power 0.5",
            "sum 1 affine 1 0 + 3 moebius 2",
        ] {
            let f: OMFunction<f64> = parse_function(text).unwrap();
            assert_eq!(f.label(), text);
            let again: OMFunction<f64> = parse_function(f.label()).unwrap();
            for x in [0.0, 0.3, 1.0, 7.0] {
                assert_eq!(f.eval(x), again.eval(x));
            }
        }
        let f: OMFunction<f64> = parse_function("  sum 2 logmean +  1 affine 0 1 ").unwrap();
        assert!((f.eval(1.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn function_spec_errors() {
        for text in [
            "",
            "affine 1",
            "affine 1 2 3",
            "power 2",
            "power x",
            "moebius 0",
            "moebius -1",
            "sum",
            "sum logmean",
            "sum -1 logmean",
            "cosine",
            "logmean 1",
            "affine -1 0",
            "power inf",
        ] {
            assert!(
                matches!(parse_function::<f64>(text), Err(Error::Parse(_))),
                "{text:?}"
            );
        }
    }

    #[test]
    fn measure_files() {
        let mu = parse_measure::<f64>("# arithmetic\natom0 0.5\natomInf 0.5\n", &quad()).unwrap();
        assert_eq!((mu.atom_zero(), mu.atom_infinity()), (0.5, 0.5));
        let mu = parse_measure::<f64>("atom 1 1\natom 2 0.5\natom 1 1", &quad()).unwrap();
        assert_eq!(mu.interior_atoms(), &[(1.0, 2.0), (2.0, 0.5)]);
        let mu =
            parse_measure::<f64>("density geometric\ndensity logmean-numeric 2", &quad()).unwrap();
        assert!((mu.total_mass().unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(
            mu.to_string(),
            "density geometric 1\ndensity logmean-numeric 2"
        );
        let again = parse_measure::<f64>(&mu.to_string(), &quad()).unwrap();
        assert_eq!(again.to_string(), mu.to_string());
        for bad in [
            "atom 0 1",
            "atom 1",
            "atom0 -1",
            "density cauchy",
            "blob 1",
            "atom0 1 2",
        ] {
            assert!(
                matches!(parse_measure::<f64>(bad, &quad()), Err(Error::Parse(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn connection_specs() {
        let a = PsdMatrix::<f64>::from_diagonal(&[1.0, 2.0]).unwrap();
        let b = PsdMatrix::<f64>::from_diagonal(&[3.0, 0.5]).unwrap();
        let eval = |s: &str| {
            parse_connection::<f64>(s, &quad())
                .unwrap()
                .evaluate(&a, &b)
                .unwrap()
        };
        let close = |x: &PsdMatrix<f64>, y: &PsdMatrix<f64>| {
            x.as_hermitian().distance(y.as_hermitian()).unwrap() < 1e-12
        };
        assert!(close(
            &eval("mean arithmetic"),
            &PsdMatrix::from_diagonal(&[2.0, 1.25]).unwrap()
        ));
        assert!(close(&eval("scale 2 parallel"), &eval("mean harmonic")));
        assert!(close(&eval("function moebius 1"), &eval("mean harmonic")));
        let mixed = eval("sum scale 2 function sum 1 affine 1 0 + 1 logmean + mean harmonic");
        let parts = eval("scale 2 function affine 1 0")
            .add(&eval("scale 2 function logmean"))
            .unwrap()
            .add(&eval("mean harmonic"))
            .unwrap();
        assert!(close(&mixed, &parts));
        for bad in [
            "",
            "mean median",
            "parallel 2",
            "scale x mean harmonic",
            "scale -1 parallel",
            "measure",
            "blend",
        ] {
            assert!(
                matches!(parse_connection::<f64>(bad, &quad()), Err(Error::Parse(_))),
                "{bad:?}"
            );
        }
        assert!(matches!(
            parse_connection::<f64>("measure /nonexistent/m.txt", &quad()),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn measure_connection_from_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "atom 1 1").unwrap();
        let spec = format!("measure {}", file.path().display());
        let c = parse_connection::<f64>(&spec, &quad()).unwrap();
        assert_eq!(c.label(), spec);
        let id = PsdMatrix::<f64>::identity(2);
        let out = c.evaluate(&id, &id).unwrap();
        assert!(out.as_hermitian().distance(id.as_hermitian()).unwrap() < 1e-15);
    }

    #[test]
    fn labels_parse_back() {
        let h = Connection::<f64>::harmonic();
        let combos = [
            h.scale(3.0).unwrap(),
            h.add(&Connection::geometric()).scale(0.5).unwrap(),
            Connection::zero(),
            Connection::from_function(OMFunction::log_mean()).add(&Connection::parallel_sum()),
        ];
        let a = PsdMatrix::<f64>::from_diagonal(&[1.0, 4.0]).unwrap();
        let b = PsdMatrix::<f64>::from_diagonal(&[2.0, 0.0]).unwrap();
        for c in combos {
            let again = parse_connection(c.label(), &quad()).unwrap();
            assert_eq!(again.label(), c.label());
            let (x, y) = (c.evaluate(&a, &b).unwrap(), again.evaluate(&a, &b).unwrap());
            assert!(
                x.as_hermitian().distance(y.as_hermitian()).unwrap() < 1e-14,
                "{c}"
            );
        }
    }

    #[test]
    fn closed_forms_of_measures() {
        let mu = parse_measure::<f64>("atom0 0.5\natomInf 0.5", &quad()).unwrap();
        assert_eq!(closed_form(&mu).unwrap().label(), "affine 0.5 0.5");
        let mu = parse_measure::<f64>("atom 1 1", &quad()).unwrap();
        assert_eq!(closed_form(&mu).unwrap().label(), "moebius 1");
        let mu = parse_measure::<f64>("density geometric\natom 2 0.5", &quad()).unwrap();
        assert_eq!(
            closed_form(&mu).unwrap().label(),
            "sum 0.5 moebius 2 + 1 power 0.5"
        );
        let f =
            OMFunction::from_measure(RepMeasure::<f64>::harmonic()).add(&OMFunction::log_mean());
        assert_eq!(function_spec(&f).unwrap(), "sum 1 moebius 1 + 1 logmean");
        let custom = RepMeasure::density(
            Density::Custom(std::sync::Arc::new(|_l: f64| 0.0)),
            1.0,
            quad(),
        )
        .unwrap();
        assert!(matches!(
            closed_form(&custom),
            Err(Error::UnsupportedInversion(_))
        ));
    }
}
