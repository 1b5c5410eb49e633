//! Fractal templates: canonical similitudes, boundary vertices, the symmetry
//! group and the level-1 contact structure.

mod builtin;
pub mod format;
pub mod geometry;
mod propeller;
pub mod symmetry;

use serde::{Deserialize, Serialize};

pub use builtin::{builtin_template, BUILTIN_NAMES};
pub use format::{load_template_file, template_from_json, template_to_json, TemplateDoc};
pub use geometry::{essential_fixed_points, Mat2, Point2, Similitude};
pub use propeller::{diamond_propeller, PropellerShape};
pub use symmetry::{DihedralCode, GroupKind, SymId, SymmetryElement, SymmetryGroup};

use crate::error::{Error, Result};
use crate::wordspace::Assignment;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// One cell touching a contact point.
///
/// For a level-1 contact the point is `S_cell(v_vertex)` and `child_vertex`
/// is `None`. For a depth-2 contact the point is `S_cell(S_c(vertex)(v_q))`
/// with `child_vertex = Some(q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Incidence {
    pub cell: usize,
    pub vertex: usize,
    pub child_vertex: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactGroup {
    pub incidences: Vec<Incidence>,
    pub point: Point2,
}

impl ContactGroup {
    pub fn equation_count(&self) -> usize {
        let k = self.incidences.len();
        k * (k - 1) / 2
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.incidences.iter().map(|inc| inc.cell)
    }
}

#[derive(Clone, Debug)]
pub struct FractalTemplate {
    pub name: String,
    pub similitudes: Vec<Similitude>,
    pub vertices: Vec<Point2>,
    pub group: SymmetryGroup,
    /// `c`: vertex label → the canonical child containing that vertex.
    pub child_at_vertex: Vec<Option<usize>>,
    /// `ν`: vertex label → its local label inside that child.
    pub vertex_in_child: Vec<usize>,
    pub contact_groups: Vec<ContactGroup>,
    /// 1 for plain vertex coincidence, 2 when depth-2 contacts are added.
    pub contact_depth: usize,
    /// False when contact groups were supplied rather than derived.
    pub geometric_contacts: bool,
}

impl FractalTemplate {
    /// Builds a template from geometry, deriving the symmetry group (if
    /// `dihedral`) and the contact groups.
    pub fn from_geometry(
        name: &str,
        similitudes: Vec<Similitude>,
        vertices: Vec<Point2>,
        dihedral: bool,
        child_at_vertex: Vec<Option<usize>>,
        vertex_in_child: Vec<usize>,
        contact_depth: usize,
    ) -> Result<Self> {
        let group = if dihedral {
            SymmetryGroup::dihedral(&vertices, &similitudes, DEFAULT_TOLERANCE)?
        } else {
            SymmetryGroup::trivial(vertices.len(), similitudes.len())
        };
        let mut t = FractalTemplate {
            name: name.to_string(),
            similitudes,
            vertices,
            group,
            child_at_vertex,
            vertex_in_child,
            contact_groups: Vec::new(),
            contact_depth,
            geometric_contacts: true,
        };
        t.validate_layout()?;
        t.contact_groups = derive_contact_groups(&t, DEFAULT_TOLERANCE)?;
        t.validate_descent()?;
        Ok(t)
    }

    /// Builds a template whose contact groups are given explicitly.
    pub fn combinatorial(
        name: &str,
        similitudes: Vec<Similitude>,
        vertices: Vec<Point2>,
        child_at_vertex: Vec<Option<usize>>,
        vertex_in_child: Vec<usize>,
        mut contact_groups: Vec<ContactGroup>,
    ) -> Result<Self> {
        let group = SymmetryGroup::trivial(vertices.len(), similitudes.len());
        for g in &mut contact_groups {
            g.incidences.sort();
        }
        let t = FractalTemplate {
            name: name.to_string(),
            similitudes,
            vertices,
            group,
            child_at_vertex,
            vertex_in_child,
            contact_groups,
            contact_depth: 1,
            geometric_contacts: false,
        };
        t.validate_layout()?;
        t.validate_contacts()?;
        t.validate_descent()?;
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.similitudes.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn equation_count(&self) -> usize {
        self.contact_groups
            .iter()
            .map(ContactGroup::equation_count)
            .sum()
    }

    /// `|G|^N`, the number of IFS variants.
    pub fn total_assignments(&self) -> u64 {
        (self.group.len() as u64).pow(self.n() as u32)
    }

    pub fn canonical_assignment(&self) -> Assignment {
        Assignment::identity(self)
    }

    fn validate_layout(&self) -> Result<()> {
        let n = self.n();
        if n == 0 || n > u8::MAX as usize {
            return Err(Error::InvalidTemplate(format!(
                "cell count {n} out of range"
            )));
        }
        for s in &self.similitudes {
            s.validate()?;
        }
        if self.vertices.is_empty() {
            return Err(Error::InvalidTemplate("template has no vertices".into()));
        }
        if self.child_at_vertex.len() != self.vertices.len()
            || self.vertex_in_child.len() != self.vertices.len()
        {
            return Err(Error::InvalidTemplate(
                "child_at_vertex and vertex_in_child need one entry per vertex".into(),
            ));
        }
        let mut seen = vec![false; n];
        for c in self.child_at_vertex.iter().flatten() {
            if *c >= n {
                return Err(Error::InvalidTemplate(format!(
                    "child cell {} out of range",
                    c + 1
                )));
            }
            if std::mem::replace(&mut seen[*c], true) {
                return Err(Error::InvalidTemplate(format!(
                    "cell {} is the child at more than one vertex",
                    c + 1
                )));
            }
        }
        if self
            .vertex_in_child
            .iter()
            .any(|&v| v >= self.vertices.len())
        {
            return Err(Error::InvalidTemplate(
                "vertex_in_child label out of range".into(),
            ));
        }
        Ok(())
    }

    fn validate_contacts(&self) -> Result<()> {
        for g in &self.contact_groups {
            if g.incidences.len() < 2 {
                return Err(Error::InvalidTemplate(
                    "contact group with fewer than 2 cells".into(),
                ));
            }
            let mut cells: Vec<usize> = g.cells().collect();
            cells.sort_unstable();
            cells.dedup();
            if cells.len() != g.incidences.len() {
                return Err(Error::InvalidTemplate(
                    "contact group names the same cell twice".into(),
                ));
            }
            for inc in &g.incidences {
                if inc.cell >= self.n() || inc.vertex >= self.vertex_count() {
                    return Err(Error::InvalidTemplate(
                        "contact incidence out of range".into(),
                    ));
                }
                if inc.child_vertex.is_some_and(|q| q >= self.vertex_count()) {
                    return Err(Error::InvalidTemplate(
                        "contact child vertex out of range".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Checks that every vertex label reachable by descending from a contact
    /// incidence (under any assignment) has a child, so tracing never fails.
    fn validate_descent(&self) -> Result<()> {
        let group = &self.group;
        let mut seen = vec![false; self.vertex_count()];
        let mut work: Vec<usize> = Vec::new();
        for inc in self.contact_groups.iter().flat_map(|g| &g.incidences) {
            match inc.child_vertex {
                None => work.push(inc.vertex),
                Some(q) => {
                    self.corner_child(inc.vertex)?;
                    work.extend((0..group.len()).map(|h| group.vertex_action(h, q)));
                }
            }
        }
        while let Some(q) = work.pop() {
            if std::mem::replace(&mut seen[q], true) {
                continue;
            }
            for g in 0..group.len() {
                let base = group.vertex_action_inv(g, q);
                self.corner_child(base)?;
                let local = self.vertex_in_child[base];
                work.extend((0..group.len()).map(|h| group.vertex_action_inv(h, local)));
            }
        }
        Ok(())
    }

    /// Canonical child at vertex label `vertex`.
    pub fn corner_child(&self, vertex: usize) -> Result<usize> {
        self.child_at_vertex
            .get(vertex)
            .copied()
            .flatten()
            .ok_or(Error::NoChildAtVertex { vertex: vertex + 1 })
    }

    /// The letter of the sub-cell of `cell`, oriented by `g`, that contains
    /// the cell's local vertex `vertex`: `c(ρ(g)⁻¹(vertex))`.
    pub fn child_at_vertex(&self, _cell: usize, vertex: usize, g: SymId) -> Result<usize> {
        if vertex >= self.vertex_count() {
            return Err(Error::NoChildAtVertex { vertex: vertex + 1 });
        }
        self.corner_child(self.group.vertex_action_inv(g, vertex))
    }

    /// One step down from the local vertex `q` of a cell oriented by `g`:
    /// the child letter `x` containing the point and the point's local
    /// vertex label inside that child. The returned label already accounts
    /// for the child's orientation, so further steps pass the identity.
    pub fn vertex_descent(
        &self,
        q: usize,
        g: SymId,
        assignment: &Assignment,
    ) -> Result<(usize, usize)> {
        if q >= self.vertex_count() {
            return Err(Error::NoChildAtVertex { vertex: q + 1 });
        }
        let base = self.group.vertex_action_inv(g, q);
        let x = self.corner_child(base)?;
        let local = self.vertex_in_child[base];
        Ok((x, self.group.vertex_action_inv(assignment.get(x), local)))
    }

    /// First descent step of a contact incidence under `assignment`:
    /// the letter below `inc.cell` holding the contact point and the point's
    /// local vertex inside it.
    pub fn incidence_step(
        &self,
        inc: &Incidence,
        assignment: &Assignment,
    ) -> Result<(usize, usize)> {
        let g = assignment.get(inc.cell);
        match inc.child_vertex {
            None => self.vertex_descent(inc.vertex, g, assignment),
            Some(q) => {
                let child = self.corner_child(inc.vertex)?;
                let gi = self.group.inv(g);
                let x = self.group.slot_action(gi, child);
                let w = self.group.vertex_action(self.group.twist(gi, child), q);
                Ok((x, self.group.vertex_action_inv(assignment.get(x), w)))
            }
        }
    }

    /// Letters below `inc.cell` addressing the contact point down `len`
    /// further levels.
    pub fn trace_incidence(
        &self,
        inc: &Incidence,
        assignment: &Assignment,
        len: usize,
    ) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(len);
        if len == 0 {
            return Ok(out);
        }
        // after the first step `q` is already relative to the oriented child
        let (x, mut q) = self.incidence_step(inc, assignment)?;
        out.push(x);
        let id = self.group.identity();
        while out.len() < len {
            let (x, next) = self.vertex_descent(q, id, assignment)?;
            q = next;
            out.push(x);
        }
        Ok(out)
    }
}

fn cluster_points<T: Copy>(
    points: &[(Point2, T)],
    tolerance: f64,
) -> Result<Vec<(Point2, Vec<T>)>> {
    for (a, (p, _)) in points.iter().enumerate() {
        for (q, _) in &points[a + 1..] {
            let d = p.dist(*q);
            if d >= tolerance && d < 10.0 * tolerance {
                return Err(Error::GeometryAmbiguity {
                    distance: d,
                    tolerance,
                });
            }
        }
    }
    let mut clusters: Vec<(Point2, Vec<T>)> = Vec::new();
    for &(p, tag) in points {
        match clusters.iter_mut().find(|(c, _)| c.dist(p) < tolerance) {
            Some((_, members)) => members.push(tag),
            None => clusters.push((p, vec![tag])),
        }
    }
    Ok(clusters)
}

fn sort_groups(groups: &mut Vec<ContactGroup>) {
    for g in groups.iter_mut() {
        g.incidences.sort();
    }
    groups.sort_by(|a, b| a.incidences.cmp(&b.incidences));
}

/// Contact groups from coincident vertex images `S_i(v_q)`, plus depth-2
/// images `S_i S_j(v_q)` away from level-1 contacts when the template's
/// `contact_depth` is 2.
pub fn derive_contact_groups(
    template: &FractalTemplate,
    tolerance: f64,
) -> Result<Vec<ContactGroup>> {
    let sims = &template.similitudes;
    let verts = &template.vertices;
    let mut level1 = Vec::new();
    for (i, s) in sims.iter().enumerate() {
        for (q, &v) in verts.iter().enumerate() {
            level1.push((s.apply(v), (i, q)));
        }
    }
    let mut groups = Vec::new();
    for (point, members) in cluster_points(&level1, tolerance)? {
        let mut cells: Vec<usize> = members.iter().map(|m| m.0).collect();
        cells.sort_unstable();
        cells.dedup();
        if cells.len() < 2 {
            continue;
        }
        groups.push(ContactGroup {
            incidences: members
                .iter()
                .map(|&(cell, vertex)| Incidence {
                    cell,
                    vertex,
                    child_vertex: None,
                })
                .collect(),
            point,
        });
    }

    if template.contact_depth >= 2 {
        let mut level2 = Vec::new();
        for (i, si) in sims.iter().enumerate() {
            for (j, sj) in sims.iter().enumerate() {
                for (q, &v) in verts.iter().enumerate() {
                    level2.push((si.apply(sj.apply(v)), (i, j, q)));
                }
            }
        }
        let mut extra = Vec::new();
        for (point, members) in cluster_points(&level2, tolerance)? {
            if groups.iter().any(|g| g.point.dist(point) < tolerance) {
                continue;
            }
            // children touched, per cell; points inside a single cell are
            // contacts between its own children and do not concern us
            let mut by_cell: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
            for &(cell, child, q) in &members {
                match by_cell.iter_mut().find(|(c, _)| *c == cell) {
                    Some((_, v)) => v.push((child, q)),
                    None => by_cell.push((cell, vec![(child, q)])),
                }
            }
            if by_cell.len() < 2 {
                continue;
            }
            let mut incidences: Vec<Incidence> = Vec::new();
            for (cell, touches) in by_cell {
                let (child, q) = touches[0];
                if touches.iter().any(|&(c, _)| c != child) {
                    return Err(Error::InvalidTemplate(format!(
                        "depth-2 contact point lies in two children of cell {}",
                        cell + 1
                    )));
                }
                let vertex = template
                    .child_at_vertex
                    .iter()
                    .position(|&c| c == Some(child))
                    .ok_or_else(|| {
                        Error::InvalidTemplate(format!(
                            "depth-2 contact inside interior child {} of cell {}",
                            child + 1,
                            cell + 1
                        ))
                    })?;
                incidences.push(Incidence {
                    cell,
                    vertex,
                    child_vertex: Some(q),
                });
            }
            if incidences.len() >= 2 {
                extra.push(ContactGroup { incidences, point });
            }
        }
        sort_groups(&mut extra);
        sort_groups(&mut groups);
        groups.extend(extra);
    } else {
        sort_groups(&mut groups);
    }
    Ok(groups)
}
