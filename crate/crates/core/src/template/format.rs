//! JSON interchange format for templates. Cell and vertex labels are
//! 1-based in the document.

use serde::{Deserialize, Serialize};

use super::geometry::{Point2, Similitude};
use super::symmetry::GroupKind;
use super::{ContactGroup, FractalTemplate, Incidence};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidenceDoc {
    pub cell: usize,
    pub vertex: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub child_vertex: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateDoc {
    pub name: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub similitudes: Vec<Similitude>,
    pub vertices: Vec<Point2>,
    /// Order `p` of the boundary polygon.
    pub p: usize,
    #[serde(default = "default_kind")]
    pub symmetries: GroupKind,
    pub child_at_vertex: Vec<Option<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_in_child: Option<Vec<usize>>,
    /// Derived from geometry when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact_groups: Option<Vec<Vec<IncidenceDoc>>>,
    #[serde(default = "default_depth")]
    pub contact_depth: usize,
}

fn default_kind() -> GroupKind {
    GroupKind::Dihedral
}

fn default_depth() -> usize {
    1
}

fn one_based(label: usize, what: &str) -> Result<usize> {
    label
        .checked_sub(1)
        .ok_or_else(|| Error::InvalidTemplate(format!("{what} labels start at 1")))
}

impl TemplateDoc {
    pub fn from_template(t: &FractalTemplate) -> Self {
        let ratio = t.similitudes.first().map(|s| s.ratio);
        let uniform = t.similitudes.iter().all(|s| Some(s.ratio) == ratio);
        TemplateDoc {
            name: t.name.clone(),
            n: t.n(),
            ratio: if uniform { ratio } else { None },
            similitudes: t.similitudes.clone(),
            vertices: t.vertices.clone(),
            p: t.vertex_count(),
            symmetries: t.group.kind(),
            child_at_vertex: t.child_at_vertex.iter().map(|c| c.map(|c| c + 1)).collect(),
            vertex_in_child: Some(t.vertex_in_child.iter().map(|v| v + 1).collect()),
            contact_groups: Some(
                t.contact_groups
                    .iter()
                    .map(|g| {
                        g.incidences
                            .iter()
                            .map(|inc| IncidenceDoc {
                                cell: inc.cell + 1,
                                vertex: inc.vertex + 1,
                                child_vertex: inc.child_vertex.map(|q| q + 1),
                            })
                            .collect()
                    })
                    .collect(),
            ),
            contact_depth: t.contact_depth,
        }
    }

    pub fn into_template(self) -> Result<FractalTemplate> {
        if self.n != self.similitudes.len() {
            return Err(Error::InvalidTemplate(format!(
                "n = {} but {} similitudes given",
                self.n,
                self.similitudes.len()
            )));
        }
        if self.p != self.vertices.len() {
            return Err(Error::InvalidTemplate(format!(
                "p = {} but {} vertices given",
                self.p,
                self.vertices.len()
            )));
        }
        let child_at_vertex = self
            .child_at_vertex
            .iter()
            .map(|c| c.map(|c| one_based(c, "cell")).transpose())
            .collect::<Result<Vec<_>>>()?;
        let vertex_in_child = match self.vertex_in_child {
            Some(v) => v
                .into_iter()
                .map(|q| one_based(q, "vertex"))
                .collect::<Result<Vec<_>>>()?,
            None => (0..self.p).collect(),
        };
        let dihedral = self.symmetries == GroupKind::Dihedral;
        match self.contact_groups {
            None => FractalTemplate::from_geometry(
                &self.name,
                self.similitudes,
                self.vertices,
                dihedral,
                child_at_vertex,
                vertex_in_child,
                self.contact_depth,
            ),
            Some(groups) => {
                let groups = groups
                    .into_iter()
                    .map(|g| {
                        let incidences = g
                            .into_iter()
                            .map(|d| {
                                Ok(Incidence {
                                    cell: one_based(d.cell, "cell")?,
                                    vertex: one_based(d.vertex, "vertex")?,
                                    child_vertex: d
                                        .child_vertex
                                        .map(|q| one_based(q, "vertex"))
                                        .transpose()?,
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(ContactGroup {
                            incidences,
                            point: Point2::ORIGIN,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                if dihedral {
                    let mut t = FractalTemplate::from_geometry(
                        &self.name,
                        self.similitudes,
                        self.vertices,
                        true,
                        child_at_vertex,
                        vertex_in_child,
                        1,
                    )?;
                    t.contact_groups = groups;
                    t.geometric_contacts = false;
                    t.contact_depth = self.contact_depth;
                    t.validate_contacts()?;
                    t.validate_descent()?;
                    Ok(t)
                } else {
                    FractalTemplate::combinatorial(
                        &self.name,
                        self.similitudes,
                        self.vertices,
                        child_at_vertex,
                        vertex_in_child,
                        groups,
                    )
                }
            }
        }
    }
}

pub fn template_to_json(t: &FractalTemplate) -> Result<String> {
    Ok(serde_json::to_string_pretty(&TemplateDoc::from_template(
        t,
    ))?)
}

pub fn template_from_json(text: &str) -> Result<FractalTemplate> {
    let doc: TemplateDoc = serde_json::from_str(text)?;
    doc.into_template()
}

pub fn load_template_file(path: &std::path::Path) -> Result<FractalTemplate> {
    template_from_json(&std::fs::read_to_string(path)?)
}
