//! Equivalence classes of assignments under the global symmetries of the
//! attractor: conjugating every composed map by an isometry and renaming
//! the cells it permutes.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::template::{FractalTemplate, SymId};
use crate::wordspace::{word_space, Assignment};

/// `F'_{σ(h)j} = h ∘ F_j ∘ h⁻¹`, decomposed as `S_{σ(h)j} ∘ τ(h,j) g_j h⁻¹`.
pub fn global_action(
    template: &FractalTemplate,
    h: SymId,
    assignment: &Assignment,
) -> Result<Assignment> {
    let group = &template.group;
    if h >= group.len() {
        return Err(Error::InvalidGlobalSymmetry(format!(
            "element {h} is not in the group"
        )));
    }
    let mut out = vec![0; template.n()];
    act_into(template, h, assignment.elements(), &mut out);
    Assignment::new(template, out)
}

fn act_into(template: &FractalTemplate, h: SymId, a: &[SymId], out: &mut [SymId]) {
    let group = &template.group;
    let hinv = group.inv(h);
    for (j, &g) in a.iter().enumerate() {
        out[group.slot_action(h, j)] = group.mul(group.twist(h, j), group.mul(g, hinv));
    }
}

/// Canonical text of an orbit: the word space of its representative, with
/// the element codes appended when word spaces do not determine assignments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassKey(pub String);

impl std::fmt::Display for ClassKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub representative: Assignment,
    pub size: usize,
    pub members: Option<Vec<Assignment>>,
}

/// Orders elements by the level-2 word-space row they produce, so that
/// comparing assignments as digit strings compares their word spaces.
struct Ordering {
    rank: Vec<usize>,
    by_rank: Vec<SymId>,
    radix: u64,
    n: usize,
}

impl Ordering {
    fn new(template: &FractalTemplate) -> Self {
        let group = &template.group;
        let mut by_rank: Vec<SymId> = (0..group.len()).collect();
        let row = |g: SymId| -> Vec<usize> {
            let ginv = group.inv(g);
            (0..template.n())
                .map(|s| group.slot_action(ginv, s))
                .collect()
        };
        by_rank.sort_by_key(|&g| (row(g), g));
        let mut rank = vec![0; group.len()];
        for (r, &g) in by_rank.iter().enumerate() {
            rank[g] = r;
        }
        Ordering {
            rank,
            by_rank,
            radix: group.len() as u64,
            n: template.n(),
        }
    }

    fn encode(&self, a: &[SymId]) -> u64 {
        a.iter()
            .fold(0, |acc, &g| acc * self.radix + self.rank[g] as u64)
    }

    fn decode_into(&self, mut code: u64, out: &mut [SymId]) {
        for slot in out.iter_mut().rev() {
            *slot = self.by_rank[(code % self.radix) as usize];
            code /= self.radix;
        }
    }

    fn total(&self) -> u64 {
        self.radix
            .checked_pow(self.n as u32)
            .expect("assignment count overflows u64")
    }
}

pub fn class_key(template: &FractalTemplate, representative: &Assignment) -> ClassKey {
    let mut text = word_space(template, representative).render(template.n());
    if !template.group.slot_action_is_faithful() {
        text.push(';');
        text.push_str(&representative.encode(template));
    }
    ClassKey(text)
}

/// All images of `assignment`; the representative has the smallest word
/// space, ties broken by element index.
pub fn orbit_of(template: &FractalTemplate, assignment: &Assignment) -> OrbitRecord {
    let ord = Ordering::new(template);
    let mut buf = vec![0; template.n()];
    let mut members: Vec<(u64, Assignment)> = (0..template.group.len())
        .map(|h| {
            act_into(template, h, assignment.elements(), &mut buf);
            (
                ord.encode(&buf),
                Assignment::new(template, buf.clone()).expect("valid image"),
            )
        })
        .collect();
    members.sort();
    members.dedup_by_key(|(c, _)| *c);
    let members: Vec<Assignment> = members.into_iter().map(|(_, a)| a).collect();
    OrbitRecord {
        representative: members[0].clone(),
        size: members.len(),
        members: Some(members),
    }
}

/// One record per orbit, in increasing word-space order of representatives.
/// Every assignment is visited; it is kept iff it is the smallest image.
pub fn equivalence_classes(template: &FractalTemplate) -> Vec<OrbitRecord> {
    let ord = Ordering::new(template);
    let n = template.n();
    let group_len = template.group.len();
    (0..ord.total())
        .into_par_iter()
        .map_init(
            || (vec![0; n], vec![0; n], Vec::with_capacity(group_len)),
            |(a, img, codes), code| {
                ord.decode_into(code, a);
                codes.clear();
                for h in 0..group_len {
                    act_into(template, h, a, img);
                    let c = ord.encode(img);
                    if c < code {
                        return None;
                    }
                    codes.push(c);
                }
                codes.sort_unstable();
                codes.dedup();
                Some(OrbitRecord {
                    representative: Assignment::new(template, a.clone()).expect("valid assignment"),
                    size: codes.len(),
                    members: None,
                })
            },
        )
        .flatten()
        .collect()
}
