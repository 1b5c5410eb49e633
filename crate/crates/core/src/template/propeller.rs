//! The n-diamond propeller: a vertical line of `n0` diamond cells from top
//! to bottom, plus `n - 2` extra cells arranged around the line's midpoint
//! `p`, so that `n` cells meet at `p`.

use std::f64::consts::PI;

use serde::Serialize;

use super::geometry::{Point2, Similitude};
use super::{ContactGroup, FractalTemplate, Incidence};
use crate::error::{Error, Result};

const TOP: usize = 0;
const BOTTOM: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PropellerShape {
    pub n: usize,
    pub alpha0: f64,
    pub c0: f64,
    pub ratio: f64,
    pub alpha: f64,
    pub line_cells: usize,
    pub cells: usize,
}

impl PropellerShape {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidParameter(format!(
                "propeller needs at least 4 cells at the centre, got {n}"
            )));
        }
        let alpha0 = PI / (4.0 * (n as f64 / 4.0).ceil());
        let c0 = 0.5 * (alpha0 / 2.0).tan();
        let blocks = (1.0 / (4.0 * c0) - 1e-12).ceil() as usize;
        let line_cells = 4 * blocks;
        let ratio = 1.0 / line_cells as f64;
        Ok(PropellerShape {
            n,
            alpha0,
            c0,
            ratio,
            alpha: 2.0 * (2.0 * ratio).atan(),
            line_cells,
            cells: line_cells - 2 + n,
        })
    }
}

/// Contacts are built combinatorially. The similitudes only sketch the
/// layout and are not used to derive contacts.
pub fn diamond_propeller(n: usize) -> Result<FractalTemplate> {
    let shape = PropellerShape::new(n)?;
    let n0 = shape.line_cells;
    let c = shape.ratio;
    let vertices = vec![Point2::new(0.0, 0.5), Point2::new(0.0, -0.5)];

    let mut sims = Vec::with_capacity(shape.cells);
    for b in 1..=n0 {
        let flipped = b % 2 == 0 && b != n0;
        sims.push(Similitude {
            ratio: c,
            rotation: if flipped { PI } else { 0.0 },
            reflected: false,
            translation: Point2::new(0.0, 0.5 - (b as f64 - 0.5) * c),
        });
    }
    // remaining cells point outward from p, split between both sides
    let extra = n - 2;
    let right = extra.div_ceil(2);
    let left = extra - right;
    for (count, side) in [(right, 0.0), (left, PI)] {
        for k in 0..count {
            let spread = PI * (k as f64 + 1.0) / (count as f64 + 1.0) - PI / 2.0;
            let dir = if side == 0.0 { spread } else { PI - spread };
            sims.push(Similitude {
                ratio: c,
                rotation: dir + PI / 2.0,
                reflected: false,
                translation: Point2::polar(c / 2.0, dir),
            });
        }
    }

    let mut groups = Vec::new();
    let pair = |a: usize, va: usize, b: usize, vb: usize| ContactGroup {
        incidences: vec![
            Incidence {
                cell: a,
                vertex: va,
                child_vertex: None,
            },
            Incidence {
                cell: b,
                vertex: vb,
                child_vertex: None,
            },
        ],
        point: Point2::ORIGIN,
    };
    for b in 1..=n0 - 2 {
        if b == n0 / 2 {
            continue;
        }
        let d = if b % 2 == 0 { TOP } else { BOTTOM };
        let mut g = pair(b - 1, d, b, d);
        g.point = Point2::new(0.0, 0.5 - b as f64 * c);
        groups.push(g);
    }
    let hub: Vec<usize> = [n0 / 2, n0 / 2 + 1]
        .into_iter()
        .chain(n0 + 1..=shape.cells)
        .collect();
    groups.push(ContactGroup {
        incidences: hub
            .iter()
            .map(|&a| Incidence {
                cell: a - 1,
                vertex: TOP,
                child_vertex: None,
            })
            .collect(),
        point: Point2::ORIGIN,
    });
    let mut closing = pair(n0 - 2, BOTTOM, n0 - 1, TOP);
    closing.point = Point2::new(0.0, 0.5 - (n0 - 1) as f64 * c);
    groups.push(closing);

    FractalTemplate::combinatorial(
        &format!("propeller-{n}"),
        sims,
        vertices,
        vec![Some(0), Some(n0 - 1)],
        vec![TOP, BOTTOM],
        groups,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_formulas() {
        let s4 = PropellerShape::new(4).unwrap();
        assert!((s4.alpha0 - PI / 4.0).abs() < 1e-15);
        assert!((s4.c0 - 0.5 * (PI / 8.0).tan()).abs() < 1e-15);
        assert_eq!((s4.line_cells, s4.cells), (8, 10));
        assert_eq!(s4.ratio, 1.0 / 8.0);
        let s5 = PropellerShape::new(5).unwrap();
        assert!((s5.alpha0 - PI / 8.0).abs() < 1e-15);
        assert_eq!((s5.line_cells, s5.cells), (12, 15));
        assert!((s5.alpha - 2.0 * (1.0f64 / 6.0).atan()).abs() < 1e-15);
    }

    #[test]
    fn small_n_is_rejected() {
        assert!(matches!(
            diamond_propeller(3),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn exactly_one_hub_group() {
        for n in [4, 5, 7] {
            let t = diamond_propeller(n).unwrap();
            let hubs: Vec<_> = t
                .contact_groups
                .iter()
                .filter(|g| g.incidences.len() > 2)
                .collect();
            assert_eq!(hubs.len(), 1);
            assert_eq!(hubs[0].incidences.len(), n);
        }
    }
}
