//! Surface file format.
//!
//! ```text
//! TSURF
//! # vertices faces
//! 4 4
//! el 0 1 1/2      # optional edge lengths, default 1
//! 3 0 1 2
//! 3 0 3 1
//! 3 0 2 3
//! 3 1 3 2
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::One;

use super::{SurfaceError, TriSurface};
use crate::scalar::{format_rational, parse_rational};

pub fn parse_surface(text: &str) -> Result<TriSurface, SurfaceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: String| SurfaceError::Parse { line, message };
    match lines.next() {
        Some((_, "TSURF")) => {}
        Some((line, other)) => return Err(err(line, format!("expected TSURF header, found `{other}`"))),
        None => return Err(err(0, "empty file".into())),
    }
    let (line, counts) = lines.next().ok_or_else(|| err(0, "missing counts line".into()))?;
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(line, format!("bad count `{t}`"))))
        .collect::<Result<_, _>>()?;
    let [nv, nf] = counts[..] else {
        return Err(err(line, "counts line must hold `<vertices> <faces>`".into()));
    };
    let mut faces = Vec::with_capacity(nf);
    let mut lengths = BTreeMap::new();
    let mut last = line;
    for (line, content) in lines {
        last = line;
        let fields: Vec<&str> = content.split_whitespace().collect();
        let index = |s: &str| s.parse::<usize>().map_err(|_| err(line, format!("bad vertex `{s}`")));
        match fields.as_slice() {
            ["el", u, w, len] => {
                let (u, w) = (index(u)?, index(w)?);
                let l = parse_rational(len).ok_or_else(|| err(line, format!("bad length `{len}`")))?;
                if lengths.insert((u.min(w), u.max(w)), l).is_some() {
                    return Err(err(line, format!("length of ({u}, {w}) given twice")));
                }
            }
            ["3", a, b, c] => faces.push([index(a)?, index(b)?, index(c)?]),
            _ => return Err(err(line, format!("unrecognized record `{content}`"))),
        }
    }
    if faces.len() != nf {
        return Err(err(last, format!("header declares {nf} faces, found {}", faces.len())));
    }
    TriSurface::new(nv, faces, &lengths)
}

/// Normalized rendering: lengths other than 1 in edge order, then faces in input order.
pub fn emit_surface(s: &TriSurface) -> String {
    let mut out = String::from("TSURF\n");
    writeln!(out, "{} {}", s.vertex_count(), s.face_count()).expect("string write");
    let mut sorted: Vec<(usize, usize, usize)> = s.edges().iter().enumerate().map(|(e, &[u, w])| (u, w, e)).collect();
    sorted.sort_unstable();
    for (u, w, e) in sorted {
        if !s.length(e).is_one() {
            writeln!(out, "el {u} {w} {}", format_rational(s.length(e))).expect("string write");
        }
    }
    for &[a, b, c] in s.faces() {
        writeln!(out, "3 {a} {b} {c}").expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{genus2, subdivide, torus7};

    #[test]
    fn round_trip_is_stable() {
        for s in [torus7(), genus2(), subdivide(&torus7())] {
            let text = emit_surface(&s);
            let again = parse_surface(&text).unwrap();
            assert_eq!(emit_surface(&again), text);
            assert_eq!(again.genus(), s.genus());
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(parse_surface("OFF\n"), Err(SurfaceError::Parse { line: 1, .. })));
        let text = "TSURF\n4 4\n3 0 1 2\nel 0 1 x\n";
        assert!(matches!(parse_surface(text), Err(SurfaceError::Parse { line: 4, .. })));
        let text = "TSURF\n4 2\n3 0 1 2\n3 0 3 1\n";
        assert!(matches!(parse_surface(text), Err(SurfaceError::NonManifold(_))));
    }
}
