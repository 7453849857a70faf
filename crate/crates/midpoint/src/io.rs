//! OBJ read/write and OFF read for triangle/quad/n-gon meshes.

use std::io::{BufRead, Write};

use crate::mesh::{build_mesh, MeshError, PolyMesh};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Read a Wavefront OBJ mesh (`v` and `f` records; 1-based and negative
/// indices; `v/vt/vn` slashes tolerated; other records ignored).
pub fn read_obj(reader: impl BufRead, allow_boundary: bool) -> Result<PolyMesh<[f64; 3]>, IoError> {
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for (ln, line) in reader.lines().enumerate() {
        let ln = ln + 1;
        let line = line?;
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in p.iter_mut() {
                    let tok = it.next().ok_or_else(|| parse_err(ln, "vertex needs 3 coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| parse_err(ln, format!("bad coordinate `{tok}`")))?;
                }
                vertices.push(p);
            }
            Some("f") => {
                let mut face = Vec::new();
                for tok in it {
                    let head = tok.split('/').next().unwrap_or("");
                    let ix: i64 = head
                        .parse()
                        .map_err(|_| parse_err(ln, format!("bad face index `{tok}`")))?;
                    let v = if ix > 0 {
                        ix as usize - 1
                    } else if ix < 0 && (-ix as usize) <= vertices.len() {
                        vertices.len() - (-ix as usize)
                    } else {
                        return Err(parse_err(ln, format!("face index `{ix}` out of range")));
                    };
                    face.push(v);
                }
                if face.len() < 3 {
                    return Err(parse_err(ln, "face needs at least 3 vertices"));
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok(build_mesh(vertices, faces, allow_boundary)?)
}

/// Read an OFF mesh (`OFF` header, counts line, vertices, faces).
pub fn read_off(reader: impl BufRead, allow_boundary: bool) -> Result<PolyMesh<[f64; 3]>, IoError> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        });
    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty OFF file"))?;
    let header = header?;
    if header.trim() != "OFF" {
        return Err(parse_err(ln, "expected OFF header"));
    }
    let (ln, counts) = lines.next().ok_or_else(|| parse_err(ln, "missing counts line"))?;
    let counts = counts?;
    let nums: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad count `{t}`"))))
        .collect::<Result<_, _>>()?;
    if nums.len() < 2 {
        return Err(parse_err(ln, "counts line needs vertex and face counts"));
    }
    let (nv, nf) = (nums[0], nums[1]);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = lines.next().ok_or_else(|| parse_err(ln, "missing vertex line"))?;
        let line = line?;
        let c: Vec<f64> = line
            .split_whitespace()
            .take(3)
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad coordinate `{t}`"))))
            .collect::<Result<_, _>>()?;
        if c.len() != 3 {
            return Err(parse_err(ln, "vertex needs 3 coordinates"));
        }
        vertices.push([c[0], c[1], c[2]]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, line) = lines.next().ok_or_else(|| parse_err(ln, "missing face line"))?;
        let line = line?;
        let ix: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad index `{t}`"))))
            .collect::<Result<_, _>>()?;
        let k = *ix.first().ok_or_else(|| parse_err(ln, "empty face line"))?;
        if ix.len() < k + 1 || k < 3 {
            return Err(parse_err(ln, "face line count mismatch"));
        }
        faces.push(ix[1..=k].to_vec());
    }
    Ok(build_mesh(vertices, faces, allow_boundary)?)
}

/// Write a mesh as OBJ with `%.15e` coordinates for byte-stable output.
pub fn write_obj(mesh: &PolyMesh<[f64; 3]>, mut w: impl Write) -> std::io::Result<()> {
    use crate::report::fmt_float;
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", fmt_float(v[0]), fmt_float(v[1]), fmt_float(v[2]))?;
    }
    for f in &mesh.faces {
        write!(w, "f")?;
        for &ix in f {
            write!(w, " {}", ix + 1)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::unit_cube;

    #[test]
    fn obj_roundtrip_cube() {
        let cube = unit_cube();
        let mut buf = Vec::new();
        write_obj(&cube, &mut buf).unwrap();
        let back = read_obj(buf.as_slice(), false).unwrap();
        assert_eq!(back.vertices.len(), 8);
        assert_eq!(back.faces, cube.faces);
        for (a, b) in back.vertices.iter().zip(&cube.vertices) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn obj_malformed_reports_line() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 x\n";
        match read_obj(text.as_bytes(), true) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn off_reads_quad() {
        let text = "OFF\n4 1 4\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        let mesh = read_off(text.as_bytes(), true).unwrap();
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.faces, vec![vec![0, 1, 2, 3]]);
        assert!(read_off(text.as_bytes(), false).is_err());
    }
}
