use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// A partition of the dimension indices `0..dim` into disjoint, non-empty groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStructure {
    dim: usize,
    groups: Vec<Vec<usize>>,
}

impl GroupStructure {
    /// Validates that `groups` partitions `0..dim`.
    pub fn new(dim: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; dim];
        for (g, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return config(format!("group {g} is empty"));
            }
            for &i in group {
                if i >= dim {
                    return config(format!("index {i} in group {g} is out of range for dimension {dim}"));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return config(format!("index {i} appears in more than one group"));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return config(format!("index {i} is not covered by any group"));
        }
        Ok(Self { dim, groups })
    }

    /// Every index in its own group.
    pub fn singletons(dim: usize) -> Self {
        Self {
            dim,
            groups: (0..dim).map(|i| vec![i]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Groups with more than one member.
    pub fn nonseparable(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.groups.iter().filter(|g| g.len() > 1)
    }

    pub fn singleton_count(&self) -> usize {
        self.groups.iter().filter(|g| g.len() == 1).count()
    }

    /// Sorted members, groups ordered by their smallest member.
    pub fn canonical(&self) -> Self {
        let mut groups: Vec<Vec<usize>> = self
            .groups
            .iter()
            .map(|g| {
                let mut g = g.clone();
                g.sort_unstable();
                g
            })
            .collect();
        groups.sort_unstable_by_key(|g| g[0]);
        Self {
            dim: self.dim,
            groups,
        }
    }

    /// Equality as unordered partitions.
    pub fn same_partition(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for GroupStructure {
    /// One group per line, members separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.groups {
            let line: Vec<String> = g.iter().map(usize::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
