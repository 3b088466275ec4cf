use std::collections::HashMap;

use super::{MeshError, TriangleMesh};

/// The one-ring of a vertex.
///
/// `wedges[k]` holds the positions in `neighbors` of the two other corners of
/// `faces[k]`, in counterclockwise order around the center vertex. For a
/// closed star, `wedges[k] = [k, (k + 1) % n]`; an open fan has one more
/// neighbor than faces.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexStar {
    pub neighbors: Vec<usize>,
    pub faces: Vec<usize>,
    pub wedges: Vec<[usize; 2]>,
    pub closed: bool,
}

impl VertexStar {
    pub fn valence(&self) -> usize {
        self.neighbors.len()
    }

    /// Position of `vertex` in the neighbor list.
    pub fn slot_of(&self, vertex: usize) -> Option<usize> {
        self.neighbors.iter().position(|&n| n == vertex)
    }
}

/// Stars for every vertex of a mesh.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    stars: Vec<VertexStar>,
}

impl Adjacency {
    pub fn stars(&self) -> &[VertexStar] {
        &self.stars
    }

    pub fn star(&self, v: usize) -> &VertexStar {
        &self.stars[v]
    }

    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }

    /// True when every vertex has a closed fan.
    pub fn is_closed(&self) -> bool {
        self.stars.iter().all(|s| s.closed)
    }
}

impl std::ops::Index<usize> for Adjacency {
    type Output = VertexStar;

    fn index(&self, v: usize) -> &VertexStar {
        &self.stars[v]
    }
}

/// Builds cyclically ordered one-rings.
///
/// The walk for a closed fan starts at the incident face with the smallest
/// index, so the ordering depends only on the face list.
pub fn build_adjacency(mesh: &TriangleMesh) -> Result<Adjacency, MeshError> {
    let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
    for f in mesh.faces() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut worst: Option<((usize, usize), usize)> = None;
    for (&edge, &count) in &edge_count {
        if count > 2 && worst.is_none_or(|(e, _)| edge < e) {
            worst = Some((edge, count));
        }
    }
    if let Some(((a, b), count)) = worst {
        return Err(MeshError::NonManifoldEdge { a, b, count });
    }

    // Each incident face contributes a wedge (next, prev) around the vertex.
    let mut incident: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); mesh.n_vertices()];
    for (fi, f) in mesh.faces().iter().enumerate() {
        for k in 0..3 {
            incident[f[k]].push((fi, f[(k + 1) % 3], f[(k + 2) % 3]));
        }
    }

    let mut stars = Vec::with_capacity(mesh.n_vertices());
    for (v, wedges) in incident.iter().enumerate() {
        stars.push(order_star(v, wedges)?);
    }
    Ok(Adjacency { stars })
}

fn order_star(v: usize, wedges: &[(usize, usize, usize)]) -> Result<VertexStar, MeshError> {
    if wedges.is_empty() {
        return Ok(VertexStar::default());
    }
    let mut by_next: HashMap<usize, usize> = HashMap::with_capacity(wedges.len());
    for (w, &(_, next, _)) in wedges.iter().enumerate() {
        if by_next.insert(next, w).is_some() {
            return Err(MeshError::InconsistentOrientation { a: v, b: next });
        }
    }
    let prevs: Vec<usize> = wedges.iter().map(|w| w.2).collect();

    // An open fan starts at the wedge whose leading edge is not closed off by
    // another wedge.
    let open_starts: Vec<usize> = (0..wedges.len())
        .filter(|&w| !prevs.contains(&wedges[w].1))
        .collect();
    let closed = open_starts.is_empty();
    let start = if closed {
        (0..wedges.len()).min_by_key(|&w| wedges[w].0).unwrap()
    } else {
        if open_starts.len() > 1 {
            return Err(MeshError::NonManifoldVertex { vertex: v });
        }
        open_starts[0]
    };

    let mut star = VertexStar {
        closed,
        ..Default::default()
    };
    let mut visited = vec![false; wedges.len()];
    let mut current = start;
    loop {
        visited[current] = true;
        let (face, next, prev) = wedges[current];
        let k = star.faces.len();
        star.neighbors.push(next);
        star.faces.push(face);
        star.wedges.push([k, k + 1]);
        match by_next.get(&prev) {
            Some(&w) if w == start => break,
            Some(&w) if visited[w] => return Err(MeshError::NonManifoldVertex { vertex: v }),
            Some(&w) => current = w,
            None => {
                star.neighbors.push(prev);
                break;
            }
        }
    }
    if visited.iter().any(|&seen| !seen) {
        return Err(MeshError::NonManifoldVertex { vertex: v });
    }
    if closed {
        let n = star.neighbors.len();
        star.wedges[n - 1][1] = 0;
    }
    Ok(star)
}
