//! PLY, ascii and binary little-endian, `vertex` and `face` elements.

use std::io::{BufRead, Write};

use super::{IoError, RawMesh};
use crate::mesh::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Scalar> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn is_integer(self) -> bool {
        !matches!(self, Scalar::F32 | Scalar::F64)
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { ty: Scalar, name: String },
    List { count: Scalar, item: Scalar, name: String },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
}

struct Header {
    format: PlyFormat,
    elements: Vec<Element>,
    lines: usize,
}

fn read_header<R: BufRead>(reader: &mut R) -> Result<Header, IoError> {
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut line_no = 0;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            return Err(IoError::parse(line_no + 1, "header ends before end_header"));
        }
        line_no += 1;
        let line = String::from_utf8_lossy(&buf);
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if line_no == 1 {
            if tokens != ["ply"] {
                return Err(IoError::parse(1, "missing 'ply' magic"));
            }
            continue;
        }
        match tokens.as_slice() {
            [] => {}
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", fmt, _version] => {
                format = Some(match *fmt {
                    "ascii" => PlyFormat::Ascii,
                    "binary_little_endian" => PlyFormat::BinaryLittleEndian,
                    other => return Err(IoError::UnsupportedFormat(other.to_string())),
                });
            }
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| IoError::parse(line_no, format!("bad element count '{count}'")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    props: Vec::new(),
                });
            }
            ["property", "list", count, item, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| IoError::parse(line_no, "property before any element"))?;
                let count = Scalar::parse(count).filter(|s| s.is_integer());
                let item = Scalar::parse(item);
                let (Some(count), Some(item)) = (count, item) else {
                    return Err(IoError::parse(line_no, "bad list property types"));
                };
                el.props.push(Property::List {
                    count,
                    item,
                    name: name.to_string(),
                });
            }
            ["property", ty, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| IoError::parse(line_no, "property before any element"))?;
                let ty = Scalar::parse(ty).ok_or_else(|| IoError::parse(line_no, format!("unknown type '{ty}'")))?;
                el.props.push(Property::Scalar {
                    ty,
                    name: name.to_string(),
                });
            }
            ["end_header"] => break,
            _ => return Err(IoError::parse(line_no, format!("unexpected header line '{}'", line.trim()))),
        }
    }
    let format = format.ok_or_else(|| IoError::parse(line_no, "missing format line"))?;
    for el in &elements {
        match el.name.as_str() {
            "vertex" => {
                for axis in ["x", "y", "z"] {
                    let found = el
                        .props
                        .iter()
                        .any(|p| matches!(p, Property::Scalar { name, .. } if name == axis));
                    if !found {
                        return Err(IoError::parse(line_no, format!("vertex element lacks '{axis}'")));
                    }
                }
            }
            "face" => {
                let found = el.props.iter().any(
                    |p| matches!(p, Property::List { name, item, .. } if is_index_list(name) && item.is_integer()),
                );
                if !found {
                    return Err(IoError::parse(line_no, "face element lacks an integer vertex index list"));
                }
            }
            other => return Err(IoError::UnsupportedElement(other.to_string())),
        }
    }
    Ok(Header {
        format,
        elements,
        lines: line_no,
    })
}

fn is_index_list(name: &str) -> bool {
    name == "vertex_indices" || name == "vertex_index"
}

/// Source of scalar values in either encoding.
trait Values {
    fn next(&mut self, ty: Scalar) -> Result<f64, IoError>;
    fn end_record(&mut self) -> Result<(), IoError>;
}

struct AsciiValues<R> {
    reader: R,
    line_no: usize,
    tokens: Vec<String>,
    pos: usize,
}

impl<R: BufRead> AsciiValues<R> {
    fn fill(&mut self) -> Result<(), IoError> {
        while self.pos >= self.tokens.len() {
            let mut line = String::new();
            if self.reader.read_line(&mut line)? == 0 {
                return Err(IoError::parse(self.line_no + 1, "unexpected end of data"));
            }
            self.line_no += 1;
            self.tokens = line.split_whitespace().map(str::to_string).collect();
            self.pos = 0;
        }
        Ok(())
    }
}

impl<R: BufRead> Values for AsciiValues<R> {
    fn next(&mut self, ty: Scalar) -> Result<f64, IoError> {
        self.fill()?;
        let t = &self.tokens[self.pos];
        self.pos += 1;
        let v = if ty.is_integer() {
            t.parse::<i64>().map(|v| v as f64).ok()
        } else {
            t.parse::<f64>().ok()
        };
        v.ok_or_else(|| IoError::parse(self.line_no, format!("bad value '{t}'")))
    }

    fn end_record(&mut self) -> Result<(), IoError> {
        if self.pos < self.tokens.len() {
            return Err(IoError::parse(self.line_no, "extra values on line"));
        }
        // next record starts on a fresh line
        self.tokens.clear();
        self.pos = 0;
        Ok(())
    }
}

struct BinaryValues {
    data: Vec<u8>,
    offset: usize,
}

impl Values for BinaryValues {
    fn next(&mut self, ty: Scalar) -> Result<f64, IoError> {
        let size = ty.size();
        let Some(bytes) = self.data.get(self.offset..self.offset + size) else {
            return Err(IoError::Binary {
                offset: self.offset,
                reason: "unexpected end of data".into(),
            });
        };
        let mut b = [0u8; 8];
        b[..size].copy_from_slice(bytes);
        self.offset += size;
        Ok(match ty {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes(b),
        })
    }

    fn end_record(&mut self) -> Result<(), IoError> {
        Ok(())
    }
}

fn as_index(v: f64, err: impl Fn() -> IoError) -> Result<usize, IoError> {
    if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(err())
    }
}

fn read_body(elements: &[Element], values: &mut dyn Values) -> Result<RawMesh, IoError> {
    let mut out = RawMesh::default();
    for el in elements {
        let is_vertex = el.name == "vertex";
        let cap = el.count.min(1 << 20);
        if is_vertex {
            out.vertices.reserve(cap);
        } else {
            out.faces.reserve(cap);
        }
        for _ in 0..el.count {
            let mut xyz = [0.0; 3];
            let mut polygon: Option<Vec<usize>> = None;
            for prop in &el.props {
                match prop {
                    Property::Scalar { ty, name } => {
                        let v = values.next(*ty)?;
                        if is_vertex {
                            match name.as_str() {
                                "x" => xyz[0] = v,
                                "y" => xyz[1] = v,
                                "z" => xyz[2] = v,
                                _ => {}
                            }
                        }
                    }
                    Property::List { count, item, name } => {
                        let n = values.next(*count)?;
                        let n = as_index(n, || IoError::parse(0, "negative list length"))?;
                        let keep = !is_vertex && is_index_list(name) && polygon.is_none();
                        let mut items = Vec::with_capacity(if keep { n.min(64) } else { 0 });
                        for _ in 0..n {
                            let v = values.next(*item)?;
                            if keep {
                                items.push(as_index(v, || IoError::parse(0, format!("bad vertex index {v}")))?);
                            }
                        }
                        if keep {
                            polygon = Some(items);
                        }
                    }
                }
            }
            values.end_record()?;
            if is_vertex {
                out.vertices.push(Point::new(xyz[0], xyz[1], xyz[2]));
            } else if let Some(poly) = polygon {
                if poly.len() < 3 {
                    return Err(IoError::parse(0, "face with fewer than three vertices"));
                }
                for k in 1..poly.len() - 1 {
                    out.faces.push([poly[0], poly[k], poly[k + 1]]);
                }
            }
        }
    }
    Ok(out)
}

pub fn read_ply<R: BufRead>(mut reader: R) -> Result<RawMesh, IoError> {
    let header = read_header(&mut reader)?;
    match header.format {
        PlyFormat::Ascii => {
            let mut values = AsciiValues {
                reader,
                line_no: header.lines,
                tokens: Vec::new(),
                pos: 0,
            };
            read_body(&header.elements, &mut values).map_err(|e| match e {
                // list errors raised without position get the current line
                IoError::Parse { line: 0, reason } => IoError::Parse {
                    line: values.line_no,
                    reason,
                },
                e => e,
            })
        }
        PlyFormat::BinaryLittleEndian => {
            let mut data = Vec::new();
            reader.read_to_end(&mut data)?;
            let mut values = BinaryValues { data, offset: 0 };
            read_body(&header.elements, &mut values).map_err(|e| match e {
                IoError::Parse { line: 0, reason } => IoError::Binary {
                    offset: values.offset,
                    reason,
                },
                e => e,
            })
        }
    }
}

pub fn write_ply<W: Write>(
    mut w: W,
    vertices: &[Point],
    faces: &[[usize; 3]],
    format: PlyFormat,
) -> Result<(), IoError> {
    let fmt = match format {
        PlyFormat::Ascii => "ascii",
        PlyFormat::BinaryLittleEndian => "binary_little_endian",
    };
    write!(
        w,
        "ply\nformat {fmt} 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        vertices.len(),
        faces.len()
    )?;
    match format {
        PlyFormat::Ascii => {
            for p in vertices {
                writeln!(w, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z)?;
            }
            for f in faces {
                writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
            }
        }
        PlyFormat::BinaryLittleEndian => {
            let mut buf = Vec::with_capacity(vertices.len() * 24 + faces.len() * 13);
            for p in vertices {
                for c in [p.x, p.y, p.z] {
                    buf.extend_from_slice(&c.to_le_bytes());
                }
            }
            for f in faces {
                buf.push(3);
                for &i in f {
                    let i = i32::try_from(i).map_err(|_| IoError::IndexTooLarge(i))?;
                    buf.extend_from_slice(&i.to_le_bytes());
                }
            }
            w.write_all(&buf)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Vec<Point>, Vec<[usize; 3]>) {
        (
            vec![
                Point::new(0.0, 0.0, 0.0),
                Point::new(1.0, 0.1, -2.5e-7),
                Point::new(0.3, 1.0 / 3.0, 7.0),
                Point::new(-1.0, 2.0, 1e10),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
    }

    #[test]
    fn round_trips_both_formats() {
        let (v, f) = sample();
        for format in [PlyFormat::Ascii, PlyFormat::BinaryLittleEndian] {
            let mut buf = Vec::new();
            write_ply(&mut buf, &v, &f, format).unwrap();
            let back = read_ply(buf.as_slice()).unwrap();
            assert_eq!(back.faces, f);
            assert_eq!(back.vertices, v);
        }
    }

    #[test]
    fn reads_float_vertices_extra_properties_and_quads() {
        let text = "ply\nformat ascii 1.0\ncomment hi\nelement vertex 4\nproperty float x\nproperty float y\n\
                    property float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\n\
                    end_header\n0 0 0 255\n1 0 0 0\n1 1 0 0\n0 1 0 0\n4 0 1 2 3\n";
        let m = read_ply(text.as_bytes()).unwrap();
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.faces, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn rejects_bad_input_without_panicking() {
        let base = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\n";
        let unsupported = format!("{base}element edge 0\nproperty int vertex1\nend_header\n0 0 0\n");
        assert!(matches!(read_ply(unsupported.as_bytes()), Err(IoError::UnsupportedElement(e)) if e == "edge"));
        let truncated = format!("{base}end_header\n0 0\n");
        assert!(matches!(read_ply(truncated.as_bytes()), Err(IoError::Parse { .. })));
        let big_endian = "ply\nformat binary_big_endian 1.0\nend_header\n";
        assert!(matches!(read_ply(big_endian.as_bytes()), Err(IoError::UnsupportedFormat(_))));
        assert!(read_ply("plx\n".as_bytes()).is_err());
        let huge = "ply\nformat binary_little_endian 1.0\nelement vertex 99999999999\nproperty double x\n\
                    property double y\nproperty double z\nend_header\n";
        assert!(matches!(read_ply(huge.as_bytes()), Err(IoError::Binary { offset: 0, .. })));
    }
}
