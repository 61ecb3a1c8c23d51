//! Wavefront OBJ: `v` and `f` records only.

use std::io::{BufRead, Write};

use super::{IoError, RawMesh};
use crate::mesh::Point;

fn parse_index(token: &str, vertex_count: usize, line: usize) -> Result<usize, IoError> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|_| IoError::parse(line, format!("bad face index '{token}'")))?;
    let idx = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        vertex_count as i64 + raw
    } else {
        return Err(IoError::parse(line, "face index 0"));
    };
    if idx < 0 {
        return Err(IoError::parse(line, format!("face index {raw} before first vertex")));
    }
    Ok(idx as usize)
}

/// Reads vertices and faces; polygons are fan-triangulated, other records
/// are ignored. Index validity is left to mesh construction.
pub fn read_obj<R: BufRead>(reader: R) -> Result<RawMesh, IoError> {
    let mut out = RawMesh::default();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for slot in &mut c {
                    let t = tokens.next().ok_or_else(|| IoError::parse(line_no, "vertex needs three coordinates"))?;
                    *slot = t.parse().map_err(|_| IoError::parse(line_no, format!("bad coordinate '{t}'")))?;
                }
                out.vertices.push(Point::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx = tokens
                    .map(|t| parse_index(t, out.vertices.len(), line_no))
                    .collect::<Result<Vec<_>, _>>()?;
                if idx.len() < 3 {
                    return Err(IoError::parse(line_no, "face needs at least three vertices"));
                }
                for k in 1..idx.len() - 1 {
                    out.faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

pub fn write_obj<W: Write>(mut w: W, vertices: &[Point], faces: &[[usize; 3]]) -> Result<(), IoError> {
    for p in vertices {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z)?;
    }
    for f in faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_quads_slashes_and_negative_indices() {
        let text = "# cube corner\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\no thing\nf 1/1/1 2/2/2 3//3 4\nf -4 -2 -1\n";
        let m = read_obj(text.as_bytes()).unwrap();
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.faces, vec![[0, 1, 2], [0, 2, 3], [0, 2, 3]]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = read_obj("v 0 0 0\nv 1 x 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 2, .. }), "{err:?}");
        let err = read_obj("v 0 0 0\nf 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 2, .. }));
        assert!(read_obj("f 0 1 2\n".as_bytes()).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let v = vec![
            Point::new(0.1, -1.0 / 3.0, 1e-300),
            Point::new(f64::MAX, 2.5, -0.0),
            Point::new(1.0, 2.0, 3.0),
        ];
        let f = vec![[0, 1, 2]];
        let mut buf = Vec::new();
        write_obj(&mut buf, &v, &f).unwrap();
        let back = read_obj(buf.as_slice()).unwrap();
        assert_eq!(back.faces, f);
        for (a, b) in v.iter().zip(&back.vertices) {
            for k in 0..3 {
                assert_eq!(a[k].to_bits(), b[k].to_bits());
            }
        }
    }
}
