use std::fmt::Write as _;

use nalgebra::Vector3;

use super::table::format_float;
use crate::error::{Error, Result};
use crate::sphere::{ShCoeffs, SphericalAngles};
use crate::vsh::{Channel, ChannelCoeffs, GridVectorField, VectorFieldCoeffs};

const SH_HEADER: &str = "# shcoeffs";
const VSH_HEADER: &str = "# vshcoeffs";
const CONVENTION: &str = "convention=real-orthonormal";

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("line {line}: {msg}"))
}

/// `# shcoeffs N=<N> convention=real-orthonormal` followed by `n k value` lines.
pub fn write_sh_coeffs(c: &ShCoeffs) -> String {
    let mut out = format!("{SH_HEADER} N={} {CONVENTION}\n", c.max_degree());
    for (n, k, v) in c.iter() {
        writeln!(out, "{n} {k} {}", format_float(v)).expect("write");
    }
    out
}

fn header_degree(line: &str, prefix: &str) -> Result<Option<usize>> {
    let rest = line
        .strip_prefix(prefix)
        .ok_or_else(|| parse_err(1, format!("expected header '{prefix} ...'")))?;
    let mut degree = None;
    let mut convention = false;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("N=") {
            degree = Some(v.parse().map_err(|_| parse_err(1, format!("bad degree '{v}'")))?);
        } else if tok == CONVENTION {
            convention = true;
        }
    }
    if !convention {
        return Err(parse_err(1, format!("missing '{CONVENTION}'")));
    }
    Ok(degree)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_nk(line: usize, n: &str, k: &str) -> Result<(usize, i64)> {
    let n = n.parse().map_err(|_| parse_err(line, format!("bad degree '{n}'")))?;
    let k = k.parse().map_err(|_| parse_err(line, format!("bad order '{k}'")))?;
    Ok((n, k))
}

fn parse_value(line: usize, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| parse_err(line, format!("bad value '{v}'")))
}

pub fn read_sh_coeffs(text: &str) -> Result<ShCoeffs> {
    let first = text.lines().next().unwrap_or("");
    let degree = header_degree(first, SH_HEADER)?.ok_or_else(|| parse_err(1, "missing N=<degree>"))?;
    let mut c = ShCoeffs::zeros(degree);
    for (line, l) in data_lines(text) {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(line, "expected 'n k value'"));
        }
        let (n, k) = parse_nk(line, f[0], f[1])?;
        c.set(n, k, parse_value(line, f[2])?).map_err(|e| parse_err(line, e))?;
    }
    Ok(c)
}

/// `# vshcoeffs ext=<N|none> int=<N|none> df=<N|none> convention=real-orthonormal`
/// followed by `channel n k value` lines.
pub fn write_vector_coeffs(c: &VectorFieldCoeffs) -> String {
    let deg = |ch: &ChannelCoeffs| ch.max_degree().map_or("none".to_string(), |n| n.to_string());
    let mut out = format!(
        "{VSH_HEADER} ext={} int={} df={} {CONVENTION}\n",
        deg(&c.ext),
        deg(&c.int),
        deg(&c.df)
    );
    for (ch, n, k, v) in c.iter() {
        writeln!(out, "{ch} {n} {k} {}", format_float(v)).expect("write");
    }
    out
}

pub fn read_vector_coeffs(text: &str) -> Result<VectorFieldCoeffs> {
    let first = text.lines().next().unwrap_or("");
    header_degree(first, VSH_HEADER)?;
    let mut out = VectorFieldCoeffs::empty();
    for tok in first.split_whitespace() {
        if let Some((name, v)) = tok.split_once('=') {
            if let Ok(ch) = name.parse::<Channel>() {
                if v != "none" {
                    let n = v.parse().map_err(|_| parse_err(1, format!("bad degree '{v}'")))?;
                    *out.channel_mut(ch) = ChannelCoeffs::zeros(ch, n);
                }
            }
        }
    }
    for (line, l) in data_lines(text) {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 4 {
            return Err(parse_err(line, "expected 'channel n k value'"));
        }
        let ch: Channel = f[0].parse().map_err(|e| parse_err(line, e))?;
        let (n, k) = parse_nk(line, f[1], f[2])?;
        out.channel_mut(ch)
            .set(n, k, parse_value(line, f[3])?)
            .map_err(|e| parse_err(line, e))?;
    }
    Ok(out)
}

/// CSV `theta,phi,bx,by,bz` with one row per node.
pub fn write_field_csv(points: &[Vector3<f64>], field: &GridVectorField) -> Result<String> {
    if points.len() != field.len() {
        return Err(Error::GridMismatch {
            expected: points.len(),
            found: field.len(),
        });
    }
    let mut out = String::from("theta,phi,bx,by,bz\n");
    for (p, v) in points.iter().zip(field.samples()) {
        let a = SphericalAngles::from_point(p);
        let row = [a.theta(), a.phi(), v.x, v.y, v.z].map(format_float);
        writeln!(out, "{}", row.join(",")).expect("write");
    }
    Ok(out)
}

/// Reads a field CSV and checks that its nodes coincide with `points` (in order).
pub fn read_field_csv(text: &str, points: &[Vector3<f64>]) -> Result<GridVectorField> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or("");
    if header != "theta,phi,bx,by,bz" {
        return Err(parse_err(1, "expected header 'theta,phi,bx,by,bz'"));
    }
    let mut samples = Vec::with_capacity(points.len());
    for (i, l) in lines {
        let f: Vec<&str> = l.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(parse_err(i + 1, "expected 5 columns"));
        }
        let v = f.iter().map(|s| parse_value(i + 1, s)).collect::<Result<Vec<_>>>()?;
        let j = samples.len();
        let node = points.get(j).ok_or(Error::GridMismatch {
            expected: points.len(),
            found: j + 1,
        })?;
        let (t, p) = (v[0], v[1]);
        let q = Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
        if (q - node).norm() > 1e-9 {
            return Err(parse_err(i + 1, format!("node ({t}, {p}) does not match grid node {j}")));
        }
        samples.push(Vector3::new(v[2], v[3], v[4]));
    }
    if samples.len() != points.len() {
        return Err(Error::GridMismatch {
            expected: points.len(),
            found: samples.len(),
        });
    }
    GridVectorField::new(samples)
}

/// Number of rows in a field CSV, without validation beyond the header.
pub fn field_csv_len(text: &str) -> usize {
    text.lines().skip(1).filter(|l| !l.trim().is_empty()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereGrid;

    #[test]
    fn sh_roundtrip_is_bit_exact() {
        let mut c = ShCoeffs::zeros(3);
        for (i, v) in c.values_mut().iter_mut().enumerate() {
            *v = (i as f64 + 0.1).sqrt() * 1e-7 / 3.0;
        }
        let back = read_sh_coeffs(&write_sh_coeffs(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn vector_roundtrip_is_bit_exact() {
        let mut c = VectorFieldCoeffs::zeros(2, 3, 0);
        c.ext.set(2, -1, 1.0 / 7.0).unwrap();
        c.int.set(0, 0, -std::f64::consts::PI).unwrap();
        let c = VectorFieldCoeffs {
            df: ChannelCoeffs::empty(Channel::Df),
            ..c
        };
        let back = read_vector_coeffs(&write_vector_coeffs(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn bad_files() {
        assert!(read_sh_coeffs("0 0 1").is_err());
        assert!(read_sh_coeffs("# shcoeffs N=1 convention=real-orthonormal\n2 0 1").is_err());
        assert!(read_sh_coeffs("# shcoeffs N=1 convention=real-orthonormal\n1 0 x").is_err());
    }

    #[test]
    fn field_csv_roundtrip() {
        let grid = SphereGrid::gauss(3);
        let f = GridVectorField::new(grid.nodes().iter().map(|p| p * 2.5).collect()).unwrap();
        let text = write_field_csv(grid.nodes(), &f).unwrap();
        let back = read_field_csv(&text, grid.nodes()).unwrap();
        assert_eq!(back.samples(), f.samples());
        assert_eq!(field_csv_len(&text), grid.len());
        let other = SphereGrid::gauss(4);
        assert!(read_field_csv(&text, other.nodes()).is_err());
    }
}
