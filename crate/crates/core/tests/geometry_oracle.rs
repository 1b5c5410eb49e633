//! Tracing-based equivalence against plain geometry: two words of equal
//! length with different parents are equivalent iff their cells share a
//! vertex, with the cells built from composed similitudes.

use b2scope_core::template::symmetry::isometry_matrix;
use b2scope_core::template::{builtin_template, FractalTemplate, Point2};
use b2scope_core::wordspace::{equivalent, Assignment, Word};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const TOL: f64 = 1e-9;

fn cell_vertices(t: &FractalTemplate, a: &Assignment, w: &Word) -> Vec<Point2> {
    let p = t.vertices.len();
    let start = t.vertices[0].y.atan2(t.vertices[0].x);
    t.vertices
        .iter()
        .map(|&v| {
            let mut x = v;
            for l in w.letters().collect::<Vec<_>>().into_iter().rev() {
                let g = isometry_matrix(t.group.element(a.get(l)).code, p, start);
                x = t.similitudes[l].apply(g.apply(x));
            }
            x
        })
        .collect()
}

fn touching(a: &[Point2], b: &[Point2]) -> bool {
    a.iter().any(|p| b.iter().any(|q| p.dist(*q) < TOL))
}

fn check(t: &FractalTemplate, a: &Assignment, len: usize) {
    let words: Vec<Word> = Word::all(t.n(), len).collect();
    let cells: Vec<Vec<Point2>> = words.iter().map(|w| cell_vertices(t, a, w)).collect();
    for (i, v) in words.iter().enumerate() {
        for (j, w) in words.iter().enumerate().skip(i + 1) {
            let geometric = v.parent() != w.parent() && touching(&cells[i], &cells[j]);
            assert_eq!(
                equivalent(t, a, v, w),
                geometric,
                "{} {} vs {} under {}",
                t.name,
                v.render(t.n()),
                w.render(t.n()),
                a.encode(t)
            );
        }
    }
}

fn random_assignment(t: &FractalTemplate, rng: &mut StdRng) -> Assignment {
    let elems = (0..t.n())
        .map(|_| rng.gen_range(0..t.group.len()))
        .collect();
    Assignment::new(t, elems).unwrap()
}

#[test]
fn tracing_matches_geometry() {
    let mut rng = StdRng::seed_from_u64(7);
    // (template, depth, random assignments)
    for (name, len, samples) in [
        ("sg", 3, 30),
        ("sg3", 3, 10),
        ("vicsek", 3, 10),
        ("pentagasket", 3, 10),
        ("hexagasket", 2, 10),
    ] {
        let t = builtin_template(name).unwrap();
        check(&t, &t.canonical_assignment(), len);
        for _ in 0..samples {
            let a = random_assignment(&t, &mut rng);
            check(&t, &a, len);
        }
    }
}

#[test]
fn every_sg_assignment_at_depth_three() {
    let t = builtin_template("sg").unwrap();
    for code in 0..216usize {
        let elems = vec![code % 6, (code / 6) % 6, code / 36];
        check(&t, &Assignment::new(&t, elems).unwrap(), 3);
    }
}
