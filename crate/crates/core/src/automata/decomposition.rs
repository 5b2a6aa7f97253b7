use std::collections::BTreeSet;

use super::{MachineError, MooreMachine};
use crate::sym::Output;

/// How a flat output tuple of `width` atoms splits into components.
///
/// Each component is a group of atom positions; the groups partition
/// `0..width`. Projection onto component `i` keeps the atoms of group `i` in
/// the listed order, and [`compose`](Self::compose) is its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputDecomposition {
    width: usize,
    groups: Vec<Vec<usize>>,
}

impl OutputDecomposition {
    pub fn from_groups(width: usize, groups: Vec<Vec<usize>>) -> Result<Self, MachineError> {
        if width == 0 || groups.is_empty() {
            return Err(MachineError::InvalidDecomposition(
                "at least one component and one atom required".into(),
            ));
        }
        let mut seen = vec![false; width];
        for group in &groups {
            if group.is_empty() {
                return Err(MachineError::InvalidDecomposition("empty group".into()));
            }
            for &p in group {
                if p >= width {
                    return Err(MachineError::InvalidDecomposition(format!(
                        "position {p} outside width {width}"
                    )));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return Err(MachineError::InvalidDecomposition(format!(
                        "position {p} used twice"
                    )));
                }
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(MachineError::InvalidDecomposition(format!(
                "position {p} not covered"
            )));
        }
        Ok(OutputDecomposition { width, groups })
    }

    /// One component per atom.
    pub fn bitwise(width: usize) -> Self {
        Self::from_groups(width, (0..width).map(|p| vec![p]).collect())
            .expect("bitwise split of a positive width")
    }

    /// A single component holding the whole tuple.
    pub fn whole(width: usize) -> Self {
        Self::from_groups(width, vec![(0..width).collect()]).expect("positive width")
    }

    /// Consecutive groups of `size` atoms; the last group may be shorter.
    pub fn contiguous(width: usize, size: usize) -> Result<Self, MachineError> {
        if size == 0 {
            return Err(MachineError::InvalidDecomposition("group size 0".into()));
        }
        let groups = (0..width)
            .collect::<Vec<_>>()
            .chunks(size)
            .map(<[usize]>::to_vec)
            .collect();
        Self::from_groups(width, groups)
    }

    /// Number of components, k.
    pub fn arity(&self) -> usize {
        self.groups.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub(crate) fn check_width(&self, width: usize) -> Result<(), MachineError> {
        if width != self.width {
            return Err(MachineError::ArityMismatch {
                expected: self.width,
                found: width,
            });
        }
        Ok(())
    }

    /// π_i: the `index`-th component of a full output tuple.
    pub fn project(&self, output: &Output, index: usize) -> Output {
        output.select(&self.groups[index])
    }

    /// Reassembles a full tuple from one value per component.
    pub fn compose(&self, parts: &[&Output]) -> Output {
        let mut atoms = vec![None; self.width];
        for (group, part) in self.groups.iter().zip(parts) {
            debug_assert_eq!(group.len(), part.arity());
            for (&p, &s) in group.iter().zip(part.atoms()) {
                atoms[p] = Some(s);
            }
        }
        Output::new(
            atoms
                .into_iter()
                .map(|a| a.expect("groups partition the tuple")),
        )
    }

    /// Values taken by component `index` over the outputs of `machine`.
    pub fn component_alphabet(&self, machine: &MooreMachine, index: usize) -> BTreeSet<Output> {
        machine
            .outputs()
            .iter()
            .map(|o| self.project(o, index))
            .collect()
    }
}
