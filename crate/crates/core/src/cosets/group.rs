use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Groups are handled exhaustively, so their size is capped.
pub const MAX_ORDER: usize = 64;

/// A finite group given by its Cayley table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, the Latin-square property, the identity and
    /// associativity (all triples).
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 || n > MAX_ORDER {
            return Err(Error::domain(format!("group order must be in 1..={MAX_ORDER}, got {n}")));
        }
        if names.iter().collect::<HashSet<_>>().len() != n {
            return Err(Error::domain("element names must be distinct"));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::domain(format!("table must be {n}x{n}")));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::domain("table entry out of range"));
        }
        for i in 0..n {
            let row: HashSet<_> = table[i].iter().collect();
            let col: HashSet<_> = (0..n).map(|j| table[j][i]).collect();
            if row.len() != n || col.len() != n {
                return Err(Error::domain(format!("table is not a Latin square at {}", names[i])));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|j| table[e][j] == j && table[j][e] == j))
            .ok_or_else(|| Error::domain("table has no identity element"))?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::domain(format!(
                            "not associative: ({}{}){} != {}({}{})",
                            names[a], names[b], names[c], names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == identity).expect("Latin square"))
            .collect();
        Ok(FiniteGroup {
            names,
            table,
            identity,
            inverses,
        })
    }

    /// Builds the table from a multiplication rule on `0..n`.
    pub fn from_fn(names: Vec<String>, mul: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let n = names.len();
        let table = (0..n).map(|a| (0..n).map(|b| mul(a, b)).collect()).collect();
        Self::new(names, table)
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// The subgroup on `elements`, checked for identity and closure.
    pub fn subgroup(&self, elements: impl IntoIterator<Item = usize>) -> Result<Subgroup> {
        let mut mask = 0u64;
        for e in elements {
            if e >= self.order() {
                return Err(Error::domain(format!("element index {e} out of range")));
            }
            mask |= 1 << e;
        }
        let s = Subgroup { mask };
        if !s.contains(self.identity) {
            return Err(Error::domain("subset does not contain the identity"));
        }
        for a in s.iter() {
            if !s.contains(self.inv(a)) {
                return Err(Error::domain(format!("subset is not closed under inverse at {}", self.name(a))));
            }
            for b in s.iter() {
                if !s.contains(self.mul(a, b)) {
                    return Err(Error::domain(format!(
                        "subset is not closed: {}·{} = {}",
                        self.name(a),
                        self.name(b),
                        self.name(self.mul(a, b))
                    )));
                }
            }
        }
        Ok(s)
    }

    pub fn subgroup_by_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Subgroup> {
        let idx = names
            .iter()
            .map(|n| {
                self.index_of(n.as_ref())
                    .ok_or_else(|| Error::domain(format!("unknown element {:?}", n.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.subgroup(idx)
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup {
            mask: 1 << self.identity,
        }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            mask: if self.order() == 64 { u64::MAX } else { (1u64 << self.order()) - 1 },
        }
    }

    /// The subgroup generated by `gens`.
    pub fn closure(&self, gens: impl IntoIterator<Item = usize>) -> Subgroup {
        let mut mask = 1u64 << self.identity;
        let mut queue: VecDeque<usize> = VecDeque::from([self.identity]);
        let gens: Vec<usize> = gens.into_iter().collect();
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.mul(x, g);
                if mask & (1 << y) == 0 {
                    mask |= 1 << y;
                    queue.push_back(y);
                }
            }
        }
        Subgroup { mask }
    }

    /// Every subgroup, by closing known subgroups under one more element.
    pub fn all_subgroups(&self) -> Vec<Subgroup> {
        let start = self.trivial_subgroup();
        let mut seen: HashSet<u64> = HashSet::from([start.mask]);
        let mut queue = VecDeque::from([start]);
        let mut out = Vec::new();
        while let Some(s) = queue.pop_front() {
            for g in self.elements().filter(|&g| !s.contains(g)) {
                let t = self.closure(s.iter().chain([g]));
                if seen.insert(t.mask) {
                    queue.push_back(t);
                }
            }
            out.push(s);
        }
        out.sort_by_key(|s| (s.len(), s.mask));
        out
    }

    /// `g D g⁻¹ = D` for all `g`.
    pub fn is_normal(&self, d: &Subgroup) -> bool {
        self.elements()
            .all(|g| d.iter().all(|x| d.contains(self.mul(self.mul(g, x), self.inv(g)))))
    }
}

/// A subgroup as a bit set of element indices (groups have at most 64 elements).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    mask: u64,
}

impl Subgroup {
    pub fn contains(&self, x: usize) -> bool {
        x < 64 && self.mask & (1 << x) != 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(|&i| self.mask & (1 << i) != 0)
    }

    pub fn elements(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// A table entry or subgroup member given either by index or by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Name(String),
}

/// `{"elements": [...], "table": [[...]], "subgroups": {"A": [...]}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub elements: Vec<String>,
    pub table: Vec<Vec<ElementRef>>,
    #[serde(default)]
    pub subgroups: BTreeMap<String, Vec<ElementRef>>,
}

impl GroupSpec {
    pub fn from_group(g: &FiniteGroup, subgroups: &[(&str, &Subgroup)]) -> Self {
        GroupSpec {
            elements: g.names.clone(),
            table: g
                .table
                .iter()
                .map(|row| row.iter().map(|&x| ElementRef::Name(g.names[x].clone())).collect())
                .collect(),
            subgroups: subgroups
                .iter()
                .map(|(k, s)| {
                    (k.to_string(), s.iter().map(|x| ElementRef::Name(g.names[x].clone())).collect())
                })
                .collect(),
        }
    }

    fn resolve(names: &[String], r: &ElementRef) -> Result<usize> {
        match r {
            ElementRef::Index(i) if *i < names.len() => Ok(*i),
            ElementRef::Index(i) => Err(Error::Input(format!("element index {i} out of range"))),
            ElementRef::Name(n) => names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| Error::Input(format!("unknown element {n:?}"))),
        }
    }

    pub fn build(&self) -> Result<(FiniteGroup, BTreeMap<String, Subgroup>)> {
        let table = self
            .table
            .iter()
            .map(|row| row.iter().map(|r| Self::resolve(&self.elements, r)).collect())
            .collect::<Result<Vec<Vec<usize>>>>()?;
        let g = FiniteGroup::new(self.elements.clone(), table)?;
        let mut subs = BTreeMap::new();
        for (name, members) in &self.subgroups {
            let idx = members
                .iter()
                .map(|r| Self::resolve(&self.elements, r))
                .collect::<Result<Vec<_>>>()?;
            let s = g
                .subgroup(idx)
                .map_err(|e| Error::domain(format!("subgroup {name}: {e}")))?;
            subs.insert(name.clone(), s);
        }
        Ok((g, subs))
    }
}
