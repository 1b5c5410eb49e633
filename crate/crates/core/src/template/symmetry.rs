//! Symmetry groups acting on a template: the dihedral group of the boundary
//! polygon (or the trivial group for purely combinatorial templates), with
//! its action on vertex labels and on child slots.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::geometry::{Mat2, Point2, Similitude};
use crate::error::{Error, Result};

/// Index of an element inside its [`SymmetryGroup`].
pub type SymId = usize;

/// `rK` is rotation by `K` steps; `fK` is the reflection fixing vertex 1
/// followed by rotation by `K` steps, so it sends label `i` to `K - i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DihedralCode {
    pub k: usize,
    pub flip: bool,
}

impl DihedralCode {
    pub const IDENTITY: DihedralCode = DihedralCode { k: 0, flip: false };

    /// Action on 0-based vertex labels of a `p`-gon.
    pub fn act(self, p: usize, i: usize) -> usize {
        let i = if self.flip { (p - i % p) % p } else { i % p };
        (i + self.k) % p
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(self, other: DihedralCode, p: usize) -> DihedralCode {
        let k2 = if self.flip {
            (p - other.k % p) % p
        } else {
            other.k % p
        };
        DihedralCode {
            k: (self.k + k2) % p,
            flip: self.flip ^ other.flip,
        }
    }
}

impl fmt::Display for DihedralCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.flip { 'f' } else { 'r' }, self.k)
    }
}

impl FromStr for DihedralCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let flip = match s.chars().next() {
            Some('r') => false,
            Some('f') => true,
            _ => return Err(Error::Parse(format!("bad symmetry code `{s}`"))),
        };
        let k = s[1..]
            .parse()
            .map_err(|_| Error::Parse(format!("bad symmetry code `{s}`")))?;
        Ok(DihedralCode { k, flip })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryElement {
    pub code: DihedralCode,
    /// 0-based vertex permutation `ρ(g)`.
    pub vertex_action: Vec<usize>,
    /// 0-based cell permutation `σ(g)`.
    pub slot_action: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Dihedral,
    Trivial,
}

#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    kind: GroupKind,
    p: usize,
    n: usize,
    elements: Vec<SymmetryElement>,
    mul: Vec<SymId>,
    inv: Vec<SymId>,
    /// `twist[h * n + j]` is the element `S_{σ(h)j}⁻¹ ∘ h ∘ S_j`.
    twist: Vec<SymId>,
}

/// Orthogonal matrix of a dihedral code on a regular polygon whose vertex 1
/// sits at angle `start`.
pub fn isometry_matrix(code: DihedralCode, p: usize, start: f64) -> Mat2 {
    let rot = Mat2::rotation(2.0 * PI * code.k as f64 / p as f64);
    if code.flip {
        rot.mul(&Mat2::reflection(start))
    } else {
        rot
    }
}

impl SymmetryGroup {
    /// Group with only the identity; every action is trivial.
    pub fn trivial(vertex_count: usize, n: usize) -> Self {
        SymmetryGroup {
            kind: GroupKind::Trivial,
            p: vertex_count,
            n,
            elements: vec![SymmetryElement {
                code: DihedralCode::IDENTITY,
                vertex_action: (0..vertex_count).collect(),
                slot_action: (0..n).collect(),
            }],
            mul: vec![0],
            inv: vec![0],
            twist: vec![0; n],
        }
    }

    /// The dihedral group of the regular polygon `vertices`, acting on the
    /// cells of `similitudes` by conjugation.
    pub fn dihedral(
        vertices: &[Point2],
        similitudes: &[Similitude],
        tolerance: f64,
    ) -> Result<Self> {
        let p = vertices.len();
        let n = similitudes.len();
        if p < 3 {
            return Err(Error::InvalidTemplate(format!(
                "dihedral symmetry needs at least 3 vertices, got {p}"
            )));
        }
        let start = vertices[0].y.atan2(vertices[0].x);
        let codes: Vec<DihedralCode> = [false, true]
            .iter()
            .flat_map(|&flip| (0..p).map(move |k| DihedralCode { k, flip }))
            .collect();
        let matrices: Vec<Mat2> = codes
            .iter()
            .map(|&c| isometry_matrix(c, p, start))
            .collect();
        let centers: Vec<Point2> = similitudes
            .iter()
            .map(|s| s.apply(Point2::ORIGIN))
            .collect();

        let mut elements = Vec::with_capacity(codes.len());
        for (&code, m) in codes.iter().zip(&matrices) {
            let vertex_action: Vec<usize> = (0..p).map(|i| code.act(p, i)).collect();
            for (i, &v) in vertices.iter().enumerate() {
                if m.apply(v).dist(vertices[vertex_action[i]]) >= tolerance {
                    return Err(Error::InvalidTemplate(format!(
                        "vertices are not a regular polygon centred at the origin (symmetry {code})"
                    )));
                }
            }
            let slot_action = centers
                .iter()
                .map(|&c| {
                    let img = m.apply(c);
                    centers
                        .iter()
                        .position(|&d| d.dist(img) < tolerance)
                        .ok_or_else(|| Error::InvalidGlobalSymmetry(code.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            elements.push(SymmetryElement {
                code,
                vertex_action,
                slot_action,
            });
        }

        let size = codes.len();
        let index_of = |c: DihedralCode| c.k + if c.flip { p } else { 0 };
        let mut mul = vec![0; size * size];
        let mut inv = vec![0; size];
        for a in 0..size {
            for b in 0..size {
                let c = index_of(codes[a].compose(codes[b], p));
                mul[a * size + b] = c;
                if c == 0 {
                    inv[a] = b;
                }
            }
        }

        let mut twist = vec![0; size * n];
        for h in 0..size {
            for j in 0..n {
                let sj = &similitudes[j];
                let target = &similitudes[elements[h].slot_action[j]];
                if (sj.ratio - target.ratio).abs() >= tolerance {
                    return Err(Error::InvalidGlobalSymmetry(codes[h].to_string()));
                }
                let lin = target
                    .orthogonal()
                    .inverse()
                    .expect("orthogonal")
                    .mul(&matrices[h])
                    .mul(&sj.orthogonal());
                twist[h * n + j] = matrices
                    .iter()
                    .position(|m| m.max_abs_diff(&lin) < 1e-7)
                    .ok_or_else(|| Error::InvalidGlobalSymmetry(codes[h].to_string()))?;
            }
        }

        Ok(SymmetryGroup {
            kind: GroupKind::Dihedral,
            p,
            n,
            elements,
            mul,
            inv,
            twist,
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[SymmetryElement] {
        &self.elements
    }

    pub fn element(&self, id: SymId) -> &SymmetryElement {
        &self.elements[id]
    }

    pub fn identity(&self) -> SymId {
        0
    }

    /// `a ∘ b`.
    pub fn mul(&self, a: SymId, b: SymId) -> SymId {
        self.mul[a * self.elements.len() + b]
    }

    pub fn inv(&self, a: SymId) -> SymId {
        self.inv[a]
    }

    pub fn twist(&self, h: SymId, cell: usize) -> SymId {
        self.twist[h * self.n + cell]
    }

    pub fn vertex_action(&self, g: SymId, vertex: usize) -> usize {
        self.elements[g].vertex_action[vertex]
    }

    pub fn vertex_action_inv(&self, g: SymId, vertex: usize) -> usize {
        self.elements[self.inv[g]].vertex_action[vertex]
    }

    pub fn slot_action(&self, g: SymId, cell: usize) -> usize {
        self.elements[g].slot_action[cell]
    }

    /// True when distinct elements permute the cells differently.
    pub fn slot_action_is_faithful(&self) -> bool {
        let mut seen: Vec<&Vec<usize>> = self.elements.iter().map(|e| &e.slot_action).collect();
        seen.sort();
        seen.dedup();
        seen.len() == self.elements.len()
    }

    pub fn find(&self, code: DihedralCode) -> Option<SymId> {
        self.elements.iter().position(|e| e.code == code)
    }

    pub fn parse_code(&self, s: &str) -> Result<SymId> {
        let code: DihedralCode = s.parse()?;
        self.find(code).ok_or_else(|| {
            Error::Parse(format!(
                "symmetry code `{}` is not in the group of order {}",
                s.trim(),
                self.len()
            ))
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.p
    }
}
