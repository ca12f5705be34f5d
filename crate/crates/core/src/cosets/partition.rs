use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::group::{FiniteGroup, Subgroup};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionKind {
    Double,
    PmDouble,
    Left,
    Right,
}

/// Blocks sorted internally and ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetPartition {
    kind: PartitionKind,
    blocks: Vec<Vec<usize>>,
}

/// `{"kind": "double", "blocks": [["e", "s", ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub kind: PartitionKind,
    pub blocks: Vec<Vec<String>>,
}

impl CosetPartition {
    fn from_labels(kind: PartitionKind, labels: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; labels.len()];
        for (x, &l) in labels.iter().enumerate() {
            if slot[l] == usize::MAX {
                slot[l] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[slot[l]].push(x);
        }
        CosetPartition { kind, blocks }
    }

    /// Partition into orbits of the maps `moves(x)`.
    fn orbits(kind: PartitionKind, n: usize, moves: impl Fn(usize) -> Vec<usize>) -> Self {
        let mut label = vec![usize::MAX; n];
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = start;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for y in moves(x) {
                    if label[y] == usize::MAX {
                        label[y] = start;
                        queue.push_back(y);
                    }
                }
            }
        }
        Self::from_labels(kind, &label)
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> &[usize] {
        self.blocks.iter().find(|b| b.contains(&x)).expect("partition covers the group")
    }

    pub fn same_blocks(&self, other: &CosetPartition) -> bool {
        self.blocks == other.blocks
    }

    /// Nonempty, disjoint, covering `0..n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for b in &self.blocks {
            if b.is_empty() {
                return false;
            }
            for &x in b {
                if x >= n || seen[x] {
                    return false;
                }
                seen[x] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_json(&self, g: &FiniteGroup) -> PartitionJson {
        PartitionJson {
            kind: self.kind,
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|&x| g.name(x).to_string()).collect())
                .collect(),
        }
    }

    pub fn render(&self, g: &FiniteGroup) -> String {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|&x| g.name(x)).collect::<Vec<_>>().join(", ")))
            .collect();
        blocks.join(" ")
    }
}

fn check_subgroup(h: &FiniteGroup, s: &Subgroup) -> Result<()> {
    h.subgroup(s.iter()).map(|_| ())
}

/// `C\H/D`: orbits of `(c, d)·h = c h d⁻¹`.
pub fn double_cosets(h: &FiniteGroup, c: &Subgroup, d: &Subgroup) -> Result<CosetPartition> {
    check_subgroup(h, c)?;
    check_subgroup(h, d)?;
    Ok(CosetPartition::orbits(PartitionKind::Double, h.order(), |x| {
        c.iter().flat_map(|ci| d.iter().map(move |di| (ci, di))).map(|(ci, di)| h.mul(h.mul(ci, x), di)).collect()
    }))
}

/// Left cosets `xD`.
pub fn left_cosets(h: &FiniteGroup, d: &Subgroup) -> Result<CosetPartition> {
    check_subgroup(h, d)?;
    Ok(CosetPartition::orbits(PartitionKind::Left, h.order(), |x| d.iter().map(|di| h.mul(x, di)).collect()))
}

/// Right cosets `Cx`.
pub fn right_cosets(h: &FiniteGroup, c: &Subgroup) -> Result<CosetPartition> {
    check_subgroup(h, c)?;
    Ok(CosetPartition::orbits(PartitionKind::Right, h.order(), |x| c.iter().map(|ci| h.mul(ci, x)).collect()))
}

/// `x ∈ C h D`.
pub fn in_double_coset(g: &FiniteGroup, c: &Subgroup, d: &Subgroup, h: usize, x: usize) -> bool {
    c.iter().any(|ci| d.iter().any(|di| g.mul(g.mul(ci, h), di) == x))
}

/// `(D,±)`-double cosets `DhD ∪ Dh⁻¹D`.
///
/// The partition is computed from the union formula and, independently, as
/// the orbit partition of the wreath product action; a disagreement is
/// reported as [`Error::Verification`].
pub fn pm_double_cosets(h: &FiniteGroup, d: &Subgroup) -> Result<CosetPartition> {
    let union = pm_by_union(h, d)?;
    let orbits = pm_by_wreath_orbits(h, d)?;
    if !union.same_blocks(&orbits) {
        return Err(Error::Verification(format!(
            "union formula {} differs from wreath orbits {}",
            union.render(h),
            orbits.render(h)
        )));
    }
    Ok(union)
}

/// Blocks `DhD ∪ Dh⁻¹D` assembled directly.
pub fn pm_by_union(h: &FiniteGroup, d: &Subgroup) -> Result<CosetPartition> {
    let dd = double_cosets(h, d, d)?;
    let n = h.order();
    let mut label = vec![usize::MAX; n];
    for x in 0..n {
        if label[x] != usize::MAX {
            continue;
        }
        for &y in dd.block_of(x).iter().chain(dd.block_of(h.inv(x))) {
            label[y] = x;
        }
    }
    Ok(CosetPartition::from_labels(PartitionKind::PmDouble, &label))
}

/// Orbits of `(a, b, δ)·h = a h^δ b⁻¹` over all of `D ≀ Z₂`.
pub fn pm_by_wreath_orbits(h: &FiniteGroup, d: &Subgroup) -> Result<CosetPartition> {
    check_subgroup(h, d)?;
    let elems = super::wreath::WreathElement::all(d);
    Ok(CosetPartition::orbits(PartitionKind::PmDouble, h.order(), |x| {
        elems.iter().map(|w| w.act(h, x)).collect()
    }))
}

/// `g ∈ ChD`, cross-checked against `C ∩ g D h⁻¹ ≠ ∅`.
pub fn coset_membership_equiv(
    grp: &FiniteGroup,
    c: &Subgroup,
    d: &Subgroup,
    g: usize,
    h: usize,
) -> Result<bool> {
    check_subgroup(grp, c)?;
    check_subgroup(grp, d)?;
    let direct = in_double_coset(grp, c, d, h, g);
    let h_inv = grp.inv(h);
    let via_intersection = d.iter().any(|di| c.contains(grp.mul(grp.mul(g, di), h_inv)));
    if direct != via_intersection {
        return Err(Error::Verification(format!(
            "membership of {} in C{}D disagrees with C ∩ gDh⁻¹",
            grp.name(g),
            grp.name(h)
        )));
    }
    Ok(direct)
}
