//! Two-manifold polygon meshes and the refinement (R), averaging (A) and
//! midpoint (M_n) operators on them.

use std::collections::BTreeMap;

use crate::scalar::Avg;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MeshError {
    #[error("face {face} refers to vertex {vertex} out of range")]
    IndexOutOfRange { face: usize, vertex: usize },
    #[error("face {0} repeats a vertex")]
    RepeatedVertex(usize),
    #[error("face {0} has fewer than 3 vertices")]
    ShortFace(usize),
    #[error("edge ({0}, {1}) borders more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("edge ({0}, {1}) is traversed twice in the same direction")]
    OrientationConflict(usize, usize),
    #[error("vertex {0} belongs to no face")]
    DanglingVertex(usize),
    #[error("edge ({0}, {1}) is a boundary edge but boundaries are not allowed")]
    UnexpectedBoundary(usize, usize),
    #[error("degree must be at least 1, got {0}")]
    DegreeOutOfRange(usize),
}

/// An oriented two-manifold polygon mesh. Immutable after `build`.
#[derive(Debug, Clone)]
pub struct PolyMesh<P> {
    pub vertices: Vec<P>,
    pub faces: Vec<Vec<usize>>,
    /// Undirected edge (min, max) -> incident faces.
    pub edge_faces: BTreeMap<(usize, usize), Vec<usize>>,
    pub vertex_faces: Vec<Vec<usize>>,
    pub has_boundary: bool,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Validate vertices + face cycles and derive the adjacency maps.
pub fn build_mesh<P: Avg>(
    vertices: Vec<P>,
    faces: Vec<Vec<usize>>,
    allow_boundary: bool,
) -> Result<PolyMesh<P>, MeshError> {
    let nv = vertices.len();
    let mut edge_faces: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut vertex_faces: Vec<Vec<usize>> = vec![Vec::new(); nv];

    for (fi, face) in faces.iter().enumerate() {
        if face.len() < 3 {
            return Err(MeshError::ShortFace(fi));
        }
        let mut seen = face.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(MeshError::RepeatedVertex(fi));
        }
        for (k, &v) in face.iter().enumerate() {
            if v >= nv {
                return Err(MeshError::IndexOutOfRange { face: fi, vertex: v });
            }
            vertex_faces[v].push(fi);
            let w = face[(k + 1) % face.len()];
            let e = edge_faces.entry(edge_key(v, w)).or_default();
            e.push(fi);
            if e.len() > 2 {
                return Err(MeshError::NonManifoldEdge(v.min(w), v.max(w)));
            }
            if directed.insert((v, w), fi).is_some() {
                return Err(MeshError::OrientationConflict(v, w));
            }
        }
    }

    let mut has_boundary = false;
    for (&(a, b), fs) in &edge_faces {
        if fs.len() == 1 {
            if !allow_boundary {
                return Err(MeshError::UnexpectedBoundary(a, b));
            }
            has_boundary = true;
        }
    }
    if let Some(v) = vertex_faces.iter().position(|fs| fs.is_empty()) {
        return Err(MeshError::DanglingVertex(v));
    }

    Ok(PolyMesh {
        vertices,
        faces,
        edge_faces,
        vertex_faces,
        has_boundary,
    })
}

impl<P: Avg> PolyMesh<P> {
    pub fn face_centroid(&self, fi: usize) -> P {
        let pts: Vec<&P> = self.faces[fi].iter().map(|&v| &self.vertices[v]).collect();
        P::mean(&pts)
    }

    pub fn vertex_valence(&self, v: usize) -> usize {
        self.edge_faces.keys().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// True if no incident edge of `v` is a boundary edge.
    pub fn is_inner_vertex(&self, v: usize) -> bool {
        self.edge_faces
            .iter()
            .all(|(&(a, b), fs)| (a != v && b != v) || fs.len() == 2)
    }

    /// Vertices with valence != 4 and faces with != 4 sides.
    pub fn extraordinary_counts(&self) -> (usize, usize) {
        let mut vert_valence = vec![0usize; self.vertices.len()];
        for &(a, b) in self.edge_faces.keys() {
            vert_valence[a] += 1;
            vert_valence[b] += 1;
        }
        let ev = vert_valence.iter().filter(|&&d| d != 4).count();
        let ef = self.faces.iter().filter(|f| f.len() != 4).count();
        (ev, ef)
    }
}

/// Refinement R: connect each face centroid with the midpoints of the face's
/// edges; each p-gon becomes p quads.
#[allow(non_snake_case)]
pub fn refine_R<P: Avg>(mesh: &PolyMesh<P>) -> PolyMesh<P> {
    let nv = mesh.vertices.len();
    let mut vertices = mesh.vertices.clone();

    let mut edge_mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&(a, b), _) in &mesh.edge_faces {
        let mid = P::mean(&[&mesh.vertices[a], &mesh.vertices[b]]);
        edge_mid.insert((a, b), vertices.len());
        vertices.push(mid);
    }
    let face_center_base = vertices.len();
    for fi in 0..mesh.faces.len() {
        vertices.push(mesh.face_centroid(fi));
    }
    let _ = nv;

    let mut faces = Vec::new();
    for (fi, face) in mesh.faces.iter().enumerate() {
        let p = face.len();
        let c = face_center_base + fi;
        for k in 0..p {
            let prev = face[(k + p - 1) % p];
            let v = face[k];
            let next = face[(k + 1) % p];
            let m_in = edge_mid[&edge_key(prev, v)];
            let m_out = edge_mid[&edge_key(v, next)];
            faces.push(vec![v, m_out, c, m_in]);
        }
    }
    build_mesh(vertices, faces, mesh.has_boundary).expect("refined mesh is valid")
}

/// Averaging A: vertices are the face centroids of the input; one face per
/// inner input vertex, the ordered cycle of the centroids of its incident
/// faces. Output faces at boundary vertices are dropped (the analysis
/// concerns interiors only) and unused centroids are pruned.
#[allow(non_snake_case)]
pub fn average_A<P: Avg>(mesh: &PolyMesh<P>) -> PolyMesh<P> {
    let centroids: Vec<P> = (0..mesh.faces.len()).map(|fi| mesh.face_centroid(fi)).collect();

    // successor map: at vertex v inside face f, the face across edge
    // (v, next-of-v-in-f); walking it enumerates the faces around v in a
    // consistent cyclic order
    let mut faces = Vec::new();
    for v in 0..mesh.vertices.len() {
        if !mesh.is_inner_vertex(v) {
            continue;
        }
        let start = mesh.vertex_faces[v][0];
        let mut cycle = Vec::new();
        let mut cur = start;
        loop {
            cycle.push(cur);
            let face = &mesh.faces[cur];
            let k = face.iter().position(|&x| x == v).unwrap();
            let next_v = face[(k + 1) % face.len()];
            let fs = &mesh.edge_faces[&edge_key(v, next_v)];
            cur = if fs[0] == cur { fs[1] } else { fs[0] };
            if cur == start {
                break;
            }
        }
        faces.push(cycle);
    }

    // prune centroids that ended up in no face
    let mut used = vec![false; centroids.len()];
    for f in &faces {
        for &c in f {
            used[c] = true;
        }
    }
    let mut remap = vec![usize::MAX; centroids.len()];
    let mut vertices = Vec::new();
    for (i, (c, u)) in centroids.into_iter().zip(&used).enumerate() {
        if *u {
            remap[i] = vertices.len();
            vertices.push(c);
        }
    }
    for f in &mut faces {
        for c in f.iter_mut() {
            *c = remap[*c];
        }
    }
    build_mesh(vertices, faces, mesh.has_boundary).expect("averaged mesh is valid")
}

/// Midpoint subdivision M_n = A^(n-1) R.
#[allow(non_snake_case)]
pub fn midpoint_Mn<P: Avg>(mesh: &PolyMesh<P>, n: usize) -> Result<PolyMesh<P>, MeshError> {
    if n < 1 {
        return Err(MeshError::DegreeOutOfRange(n));
    }
    let mut out = refine_R(mesh);
    for _ in 0..n - 1 {
        out = average_A(&out);
    }
    Ok(out)
}

/// The unit cube, a convenient closed test mesh.
pub fn unit_cube() -> PolyMesh<[f64; 3]> {
    let vertices = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 1.0, 1.0],
        [0.0, 1.0, 1.0],
    ];
    let faces = vec![
        vec![0, 3, 2, 1],
        vec![4, 5, 6, 7],
        vec![0, 1, 5, 4],
        vec![1, 2, 6, 5],
        vec![2, 3, 7, 6],
        vec![3, 0, 4, 7],
    ];
    build_mesh(vertices, faces, false).unwrap()
}

/// An axis-aligned `w x h` regular quad grid with unit spacing (open
/// boundary), vertex (x, y) at index `y*(w+1)+x`.
pub fn regular_grid<P: Avg>(w: usize, h: usize, point: impl Fn(usize, usize) -> P) -> PolyMesh<P> {
    let mut vertices = Vec::new();
    for y in 0..=h {
        for x in 0..=w {
            vertices.push(point(x, y));
        }
    }
    let idx = |x: usize, y: usize| y * (w + 1) + x;
    let mut faces = Vec::new();
    for y in 0..h {
        for x in 0..w {
            faces.push(vec![idx(x, y), idx(x + 1, y), idx(x + 1, y + 1), idx(x, y + 1)]);
        }
    }
    build_mesh(vertices, faces, true).unwrap()
}
