//! Point-cloud and table serialization: ASCII XYZ-with-label, ASCII PLY
//! with a per-vertex label (and optional scalar fields), and CSV writing
//! with fixed float formatting so reports are byte-reproducible.

use crate::geom::{LabeledPointCloud, Point3, PointLabel};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

/// Formats a float with 6 decimal places; all CSV/cloud writers go through
/// this so identical inputs yield byte-identical files.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.6}")
}

/// Writes "x y z label" rows for live points.
pub fn write_xyz<W: Write>(mut w: W, cloud: &LabeledPointCloud) -> crate::Result<()> {
    let mut buf = String::new();
    for i in cloud.iter_alive() {
        let p = cloud.point(i);
        buf.clear();
        let _ = writeln!(
            buf,
            "{} {} {} {}",
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(p.z),
            cloud.label(i).as_int()
        );
        w.write_all(buf.as_bytes())?;
    }
    Ok(())
}

/// Reads "x y z [label]" rows; a missing label column defaults to ground.
pub fn read_xyz<R: Read>(r: R) -> crate::Result<LabeledPointCloud> {
    let mut cloud = LabeledPointCloud::new();
    for (lineno, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut coord = |name: &str| -> crate::Result<f64> {
            it.next()
                .ok_or_else(|| {
                    crate::Error::CloudFormat(format!("line {}: missing {name}", lineno + 1))
                })?
                .parse::<f64>()
                .map_err(|e| crate::Error::CloudFormat(format!("line {}: {e}", lineno + 1)))
        };
        let x = coord("x")?;
        let y = coord("y")?;
        let z = coord("z")?;
        let label = match it.next() {
            None => PointLabel::Ground,
            Some(tok) => {
                let v: i64 = tok.parse().map_err(|e| {
                    crate::Error::CloudFormat(format!("line {}: {e}", lineno + 1))
                })?;
                PointLabel::from_int(v).ok_or_else(|| {
                    crate::Error::CloudFormat(format!("line {}: unknown label {v}", lineno + 1))
                })?
            }
        };
        let p = Point3::new(x, y, z);
        if !p.is_finite() {
            return Err(crate::Error::CloudFormat(format!(
                "line {}: non-finite coordinate",
                lineno + 1
            )));
        }
        cloud.insert(p, label, 0);
    }
    Ok(cloud)
}

/// Extra per-point scalar column for PLY export (observability, guidance,
/// fractal dimension, visibility flags, ...).
pub struct PlyField<'a> {
    pub name: &'static str,
    pub values: &'a [f64],
}

/// Writes an ASCII PLY with per-vertex `label` plus any extra fields.
/// Extra field slices are indexed by point slot.
pub fn write_ply<W: Write>(
    mut w: W,
    cloud: &LabeledPointCloud,
    extra: &[PlyField<'_>],
) -> crate::Result<()> {
    for f in extra {
        assert_eq!(
            f.values.len(),
            cloud.slots(),
            "extra PLY field must cover every point slot"
        );
    }
    let mut header = String::new();
    let _ = writeln!(header, "ply");
    let _ = writeln!(header, "format ascii 1.0");
    let _ = writeln!(header, "element vertex {}", cloud.len());
    let _ = writeln!(header, "property double x");
    let _ = writeln!(header, "property double y");
    let _ = writeln!(header, "property double z");
    let _ = writeln!(header, "property int label");
    for f in extra {
        let _ = writeln!(header, "property double {}", f.name);
    }
    let _ = writeln!(header, "end_header");
    w.write_all(header.as_bytes())?;

    let mut buf = String::new();
    for i in cloud.iter_alive() {
        let p = cloud.point(i);
        buf.clear();
        let _ = write!(
            buf,
            "{} {} {} {}",
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(p.z),
            cloud.label(i).as_int()
        );
        for f in extra {
            let _ = write!(buf, " {}", fmt_f64(f.values[i as usize]));
        }
        buf.push('\n');
        w.write_all(buf.as_bytes())?;
    }
    Ok(())
}

/// Reads back an ASCII PLY written by [`write_ply`] (coordinates and label;
/// extra fields are ignored).
pub fn read_ply<R: Read>(r: R) -> crate::Result<LabeledPointCloud> {
    let mut lines = BufReader::new(r).lines();
    let magic = lines
        .next()
        .transpose()?
        .ok_or_else(|| crate::Error::CloudFormat("empty ply".into()))?;
    if magic.trim() != "ply" {
        return Err(crate::Error::CloudFormat("missing ply magic".into()));
    }
    let mut vertex_count: Option<usize> = None;
    for line in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("element vertex ") {
            vertex_count = Some(rest.trim().parse().map_err(|e| {
                crate::Error::CloudFormat(format!("bad vertex count: {e}"))
            })?);
        }
        if t == "end_header" {
            break;
        }
    }
    let n = vertex_count.ok_or_else(|| crate::Error::CloudFormat("no vertex element".into()))?;
    let mut cloud = LabeledPointCloud::new();
    for line in lines.take(n) {
        let line = line?;
        let mut it = line.split_whitespace();
        let x: f64 = parse_tok(&mut it)?;
        let y: f64 = parse_tok(&mut it)?;
        let z: f64 = parse_tok(&mut it)?;
        let label: i64 = parse_tok(&mut it)?;
        let label = PointLabel::from_int(label)
            .ok_or_else(|| crate::Error::CloudFormat(format!("unknown label {label}")))?;
        cloud.insert(Point3::new(x, y, z), label, 0);
    }
    if cloud.len() != n {
        return Err(crate::Error::CloudFormat(format!(
            "expected {n} vertices, found {}",
            cloud.len()
        )));
    }
    Ok(cloud)
}

fn parse_tok<'a, T: std::str::FromStr>(
    it: &mut impl Iterator<Item = &'a str>,
) -> crate::Result<T>
where
    T::Err: std::fmt::Display,
{
    it.next()
        .ok_or_else(|| crate::Error::CloudFormat("truncated row".into()))?
        .parse::<T>()
        .map_err(|e| crate::Error::CloudFormat(format!("{e}")))
}

/// Loads a cloud file by extension: `.xyz`/`.txt` or `.ply`.
pub fn load_cloud(path: &Path) -> crate::Result<LabeledPointCloud> {
    let f = std::fs::File::open(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("ply") => read_ply(f),
        _ => read_xyz(f),
    }
}
