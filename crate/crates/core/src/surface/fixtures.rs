use std::collections::BTreeMap;

use super::TriSurface;
use crate::Rational;

fn unit_surface(n: usize, faces: Vec<[usize; 3]>) -> TriSurface {
    TriSurface::new(n, faces, &BTreeMap::new()).expect("fixture is a valid surface")
}

/// Boundary of a tetrahedron with unit edges.
pub fn tetrahedron() -> TriSurface {
    unit_surface(4, vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]])
}

/// Boundary of an octahedron with unit edges.
pub fn octahedron() -> TriSurface {
    // poles 0 and 5, equator 1 2 3 4
    let mut faces = Vec::new();
    for i in 0..4 {
        let (a, b) = (1 + i, 1 + (i + 1) % 4);
        faces.push([0, a, b]);
        faces.push([5, b, a]);
    }
    unit_surface(6, faces)
}

/// Seven-vertex torus with unit edges: faces `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
///
/// Its 1-skeleton is the complete graph on seven vertices.
pub fn torus7() -> TriSurface {
    let mut faces = Vec::new();
    for i in 0..7 {
        faces.push([i, (i + 1) % 7, (i + 3) % 7]);
        faces.push([i, (i + 3) % 7, (i + 2) % 7]);
    }
    unit_surface(7, faces)
}

/// Connected sum: removes face `fa` of `a` and face `fb` of `b` and glues the
/// two boundary triangles with opposite orientations.
pub fn connected_sum(a: &TriSurface, fa: usize, b: &TriSurface, fb: usize) -> Result<TriSurface, super::SurfaceError> {
    let [x, y, z] = a.faces()[fa];
    let [p, q, r] = b.faces()[fb];
    // b's removed face p -> q -> r is glued to x -> z -> y
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    map.insert(p, x);
    map.insert(q, z);
    map.insert(r, y);
    let mut next = a.vertex_count();
    for v in 0..b.vertex_count() {
        map.entry(v).or_insert_with(|| {
            next += 1;
            next - 1
        });
    }
    let mut faces: Vec<[usize; 3]> = a.faces().iter().enumerate().filter(|&(i, _)| i != fa).map(|(_, f)| *f).collect();
    faces.extend(b.faces().iter().enumerate().filter(|&(i, _)| i != fb).map(|(_, f)| f.map(|v| map[&v])));
    let mut lengths: BTreeMap<(usize, usize), Rational> = a.length_map();
    for ((u, w), l) in b.length_map() {
        let (mu, mw) = (map[&u], map[&w]);
        lengths.entry((mu.min(mw), mu.max(mw))).or_insert(l);
    }
    TriSurface::new(next, faces, &lengths)
}

/// Genus-two surface: connected sum of two seven-vertex tori (11 vertices, 39 edges, 26 faces).
pub fn genus2() -> TriSurface {
    let t = torus7();
    connected_sum(&t, 0, &t, 0).expect("connected sum of tori")
}

/// Midpoint subdivision: every face splits into four similar faces with halved sides.
pub fn subdivide(s: &TriSurface) -> TriSurface {
    let half = Rational::new(1.into(), 2.into());
    let n = s.vertex_count();
    let mid = |e: usize| n + e;
    let mut lengths = BTreeMap::new();
    for (e, &[u, w]) in s.edges().iter().enumerate() {
        let l = s.length(e) * &half;
        lengths.insert((u, mid(e)), l.clone());
        lengths.insert((w, mid(e)), l);
    }
    let mut faces = Vec::with_capacity(4 * s.face_count());
    for (fi, &[a, b, c]) in s.faces().iter().enumerate() {
        let [ab, bc, ca] = s.face_edges(fi);
        let (mab, mbc, mca) = (mid(ab), mid(bc), mid(ca));
        faces.push([a, mab, mca]);
        faces.push([mab, b, mbc]);
        faces.push([mca, mbc, c]);
        faces.push([mab, mbc, mca]);
        // each inner side is parallel to, and half as long as, the opposite outer side
        lengths.insert((mab.min(mca), mab.max(mca)), s.length(bc) * &half);
        lengths.insert((mab.min(mbc), mab.max(mbc)), s.length(ca) * &half);
        lengths.insert((mbc.min(mca), mbc.max(mca)), s.length(ab) * &half);
    }
    TriSurface::new(n + s.edge_count(), faces, &lengths).expect("subdivision of a valid surface")
}

/// `times` rounds of [`subdivide`].
pub fn refine(s: &TriSurface, times: usize) -> TriSurface {
    (0..times).fold(s.clone(), |acc, _| subdivide(&acc))
}

/// Seven-vertex torus scaled by 1/4 and subdivided three times: 448 vertices, edges 1/32.
pub fn fine_torus() -> TriSurface {
    let quarter = Rational::new(1.into(), 4.into());
    refine(&torus7().scaled(&quarter).expect("positive scale"), 3)
}

/// Genus-two surface scaled by 1/4 and subdivided three times: 830 vertices, edges 1/32.
pub fn fine_genus2() -> TriSurface {
    let quarter = Rational::new(1.into(), 4.into());
    refine(&genus2().scaled(&quarter).expect("positive scale"), 3)
}
