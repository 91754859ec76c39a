//! Reconstruction of the local flat folding: one isometry per face, found by
//! unfolding across creases breadth-first from face 0.

use std::collections::VecDeque;

use thiserror::Error;

use crate::geom::{compose, reflect_line, Isometry, Point, Segment};
use crate::pattern::{CreaseId, CreasePattern, FaceId, Label};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalFoldError {
    /// Reflections around some cycle of faces do not close up; no
    /// continuous piecewise isometry has this crease pattern.
    #[error("not locally flat-foldable: crease {crease} is inconsistent with the reflections around it")]
    NotLocallyFlat { crease: CreaseId },
}

#[derive(Clone, Debug)]
pub struct LocalFlatFolding {
    pub pattern: CreasePattern,
    pub phi: Vec<Isometry>,
    /// Face polygons mapped through `phi`, same vertex order as the face.
    pub images: Vec<Vec<Point>>,
}

impl LocalFlatFolding {
    pub fn sign(&self, face: FaceId) -> i8 {
        self.phi[face].sign()
    }
}

pub fn reconstruct(cp: &CreasePattern) -> Result<LocalFlatFolding, LocalFoldError> {
    let nfaces = cp.faces.len();
    let mut adjacency: Vec<Vec<CreaseId>> = vec![Vec::new(); nfaces];
    for c in &cp.creases {
        adjacency[c.faces[0]].push(c.id);
        adjacency[c.faces[1]].push(c.id);
    }

    let mut phi: Vec<Option<Isometry>> = vec![None; nfaces];
    let mut queue = VecDeque::new();
    if nfaces > 0 {
        phi[0] = Some(Isometry::identity());
        queue.push_back(0);
    }
    // Every crease is examined from both sides; each must agree exactly.
    while let Some(f) = queue.pop_front() {
        let phi_f = phi[f].clone().expect("queued faces are assigned");
        for &cid in &adjacency[f] {
            let crease = &cp.creases[cid];
            let g = cp.other_face(cid, f);
            let reflection = reflect_line(&crease.segment.a, &crease.segment.b)
                .expect("crease endpoints are distinct");
            let candidate = compose(&phi_f, &reflection);
            match &phi[g] {
                None => {
                    phi[g] = Some(candidate);
                    queue.push_back(g);
                }
                Some(existing) if *existing == candidate => {}
                Some(_) => return Err(LocalFoldError::NotLocallyFlat { crease: cid }),
            }
        }
    }

    let phi: Vec<Isometry> = phi.into_iter().map(|p| p.expect("face graph is connected")).collect();
    let images = cp
        .faces
        .iter()
        .map(|f| f.polygon.iter().map(|p| phi[f.id].apply(p)).collect())
        .collect();
    Ok(LocalFlatFolding { pattern: cp.clone(), phi, images })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CreaseImage {
    pub crease: CreaseId,
    pub segment: Segment,
    pub label: Label,
}

/// Each crease mapped into the folded plane.
pub fn crease_images(lff: &LocalFlatFolding) -> Vec<CreaseImage> {
    lff.pattern
        .creases
        .iter()
        .map(|c| {
            let [f, g] = c.faces;
            let via_f = lff.phi[f].apply_segment(&c.segment);
            let via_g = lff.phi[g].apply_segment(&c.segment);
            assert_eq!(via_f, via_g, "adjacent faces disagree on crease {}", c.id);
            CreaseImage { crease: c.id, segment: via_f, label: c.label }
        })
        .collect()
}
