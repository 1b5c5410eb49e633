use std::f64::consts::PI;

use super::geometry::{Point2, Similitude};
use super::FractalTemplate;
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: [&str; 6] = [
    "sg",
    "sg3",
    "vicsek",
    "pentagasket",
    "pentagasket-filled",
    "hexagasket",
];

/// Regular `p`-gon, vertices counterclockwise from angle `start`, scaled to
/// diameter 1.
fn regular_polygon(p: usize, start: f64) -> Vec<Point2> {
    let diameter = 2.0 * (PI * (p / 2) as f64 / p as f64).sin();
    (0..p)
        .map(|k| Point2::polar(1.0 / diameter, start + 2.0 * PI * k as f64 / p as f64))
        .collect()
}

fn corner_cells(vertices: &[Point2], ratio: f64) -> Vec<Similitude> {
    vertices
        .iter()
        .map(|&v| Similitude::homothety(ratio, v.scale(1.0 - ratio)))
        .collect()
}

fn corner_layout(p: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    ((0..p).map(Some).collect(), (0..p).collect())
}

pub fn builtin_template(name: &str) -> Result<FractalTemplate> {
    let golden = (3.0 - 5f64.sqrt()) / 2.0;
    let (vertices, sims, depth) = match name {
        "sg" => {
            let v = regular_polygon(3, PI / 2.0);
            let s = corner_cells(&v, 0.5);
            (v, s, 1)
        }
        "sg3" => {
            let v = regular_polygon(3, PI / 2.0);
            let mut s = corner_cells(&v, 1.0 / 3.0);
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                let mid = s[a].translation.add(s[b].translation).scale(0.5);
                s.push(Similitude::homothety(1.0 / 3.0, mid));
            }
            (v, s, 1)
        }
        "vicsek" => {
            let v = regular_polygon(4, PI / 4.0);
            let mut s = corner_cells(&v, 1.0 / 3.0);
            s.push(Similitude::homothety(1.0 / 3.0, Point2::ORIGIN));
            (v, s, 1)
        }
        "pentagasket" => {
            let v = regular_polygon(5, PI / 2.0);
            let s = corner_cells(&v, golden);
            (v, s, 1)
        }
        "pentagasket-filled" => {
            let v = regular_polygon(5, PI / 2.0);
            let mut s = corner_cells(&v, golden);
            s.push(Similitude {
                ratio: golden,
                rotation: PI / 5.0,
                reflected: false,
                translation: Point2::ORIGIN,
            });
            (v, s, 2)
        }
        "hexagasket" => {
            let v = regular_polygon(6, PI / 2.0);
            let s = corner_cells(&v, 1.0 / 3.0);
            (v, s, 1)
        }
        other => return Err(Error::NotFound(other.to_string())),
    };
    let (c, nu) = corner_layout(vertices.len());
    FractalTemplate::from_geometry(name, sims, vertices, true, c, nu, depth)
}
