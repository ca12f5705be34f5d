use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::Real;
use crate::germs::{compose, in_diff, in_jdiff, make_wa, Germ, GermMap, Order, Orientation};
use crate::{Error, Result};

/// `Diff^k(R,0) ∩ w_b·Diff^k(R,0)·w_a`, up to which of four sets it is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionType {
    Empty,
    /// Orientation-preserving part of `J^k(R,0)`.
    JPlus,
    /// Orientation-reversing part of `J^k(R,0)`.
    JMinus,
    FullD,
}

impl fmt::Display for IntersectionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntersectionType::Empty => "empty",
            IntersectionType::JPlus => "J+",
            IntersectionType::JMinus => "J-",
            IntersectionType::FullD => "Diff",
        })
    }
}

fn check_positive(x: &Real, name: &str) -> Result<()> {
    if !x.is_positive() || !x.value().is_finite() {
        return Err(Error::domain(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

/// Type of `Diff^k ∩ w_b Diff^k w_a`; independent of `k`.
pub fn intersection_type(a: &Real, b: &Real) -> Result<IntersectionType> {
    check_positive(a, "a")?;
    check_positive(b, "b")?;
    Ok(match (a.is_one(), b.is_one()) {
        (true, true) => IntersectionType::FullD,
        (true, false) | (false, true) => IntersectionType::Empty,
        (false, false) if a.mul(b).is_one() => IntersectionType::JPlus,
        (false, false) if a.same_as(b) => IntersectionType::JMinus,
        (false, false) => IntersectionType::Empty,
    })
}

/// The four classes of diffeomorphisms between two structures: fixing or
/// exchanging the origins, preserving or reversing orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cell {
    #[serde(rename = "fix+")]
    FixPlus,
    #[serde(rename = "fix-")]
    FixMinus,
    #[serde(rename = "ex+")]
    ExPlus,
    #[serde(rename = "ex-")]
    ExMinus,
}

impl Cell {
    pub const ALL: [Cell; 4] = [Cell::FixPlus, Cell::FixMinus, Cell::ExPlus, Cell::ExMinus];

    pub fn label(self) -> &'static str {
        match self {
            Cell::FixPlus => "fix+",
            Cell::FixMinus => "fix-",
            Cell::ExPlus => "ex+",
            Cell::ExMinus => "ex-",
        }
    }

    pub fn exchanges(self) -> bool {
        matches!(self, Cell::ExPlus | Cell::ExMinus)
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Cell::FixPlus | Cell::ExPlus => Orientation::Preserving,
            Cell::FixMinus | Cell::ExMinus => Orientation::Reversing,
        }
    }

    pub fn from_parts(exchange: bool, orientation: Orientation) -> Cell {
        match (exchange, orientation) {
            (false, Orientation::Preserving) => Cell::FixPlus,
            (false, Orientation::Reversing) => Cell::FixMinus,
            (true, Orientation::Preserving) => Cell::ExPlus,
            (true, Orientation::Reversing) => Cell::ExMinus,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which explicit construction realizes a nonempty cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// The identity of `R∖0`.
    Identity,
    /// `x ↦ -x`.
    Flip,
    /// The identity of `R∖0`, exchanging the origins.
    Swap,
    /// `x ↦ -x`, exchanging the origins.
    SwapFlip,
    /// The order-two map `ψ`.
    Psi,
    /// `x ↦ -x` composed with `ψ`.
    FlipPsi,
}

/// Emptiness pattern of the four cells for `W_a → W_b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairClassification {
    pub a: String,
    pub b: String,
    pub k: String,
    pub cells: BTreeMap<Cell, bool>,
    pub fix_type: IntersectionType,
    pub ex_type: IntersectionType,
    pub witness_kinds: BTreeMap<Cell, WitnessKind>,
}

impl PairClassification {
    pub fn nonempty(&self, cell: Cell) -> bool {
        self.cells[&cell]
    }

    pub fn diffeomorphic(&self) -> bool {
        self.cells.values().any(|&v| v)
    }

    /// The `{fix, ex} × {+, -}` grid.
    pub fn table(&self) -> String {
        let mark = |c| if self.nonempty(c) { "nonempty" } else { "empty" };
        format!(
            "        +          -\nfix   {:<10} {}\nex    {:<10} {}\n",
            mark(Cell::FixPlus),
            mark(Cell::FixMinus),
            mark(Cell::ExPlus),
            mark(Cell::ExMinus)
        )
    }
}

fn cells_of(t: IntersectionType, exchange: bool) -> Vec<Cell> {
    let signs: &[Orientation] = match t {
        IntersectionType::Empty => &[],
        IntersectionType::JPlus => &[Orientation::Preserving],
        IntersectionType::JMinus => &[Orientation::Reversing],
        IntersectionType::FullD => &[Orientation::Preserving, Orientation::Reversing],
    };
    signs.iter().map(|&o| Cell::from_parts(exchange, o)).collect()
}

/// Classifies diffeomorphisms `W_a → W_b` between the structures of the
/// special minimal atlases of `w_a` and `w_b`.
///
/// A fixing diffeomorphism has chart presentations related by
/// `B = w_b ∘ A ∘ w_{1/a}`, an exchanging one by `B = w_{1/b} ∘ A ∘ w_{1/a}`,
/// so the cells are read off the two intersection types.
pub fn classify_wa_pair(a: &Real, b: &Real, k: Order) -> Result<PairClassification> {
    k.resolve()?;
    let fix_type = intersection_type(&a.recip()?, b)?;
    let ex_type = intersection_type(&a.recip()?, &b.recip()?)?;
    let mut cells: BTreeMap<Cell, bool> = Cell::ALL.iter().map(|&c| (c, false)).collect();
    for c in cells_of(fix_type, false).into_iter().chain(cells_of(ex_type, true)) {
        cells.insert(c, true);
    }
    let mut witness_kinds = BTreeMap::new();
    for (&c, _) in cells.iter().filter(|(_, &v)| v) {
        let kind = match (c, a.is_one() && b.is_one()) {
            (Cell::FixPlus, _) => WitnessKind::Identity,
            (Cell::FixMinus, _) => WitnessKind::Flip,
            (Cell::ExPlus, true) => WitnessKind::Swap,
            (Cell::ExMinus, true) => WitnessKind::SwapFlip,
            (Cell::ExPlus, false) => WitnessKind::FlipPsi,
            (Cell::ExMinus, false) => WitnessKind::Psi,
        };
        witness_kinds.insert(c, kind);
    }
    Ok(PairClassification {
        a: a.to_string(),
        b: b.to_string(),
        k: k.to_string(),
        cells,
        fix_type,
        ex_type,
        witness_kinds,
    })
}

/// Test germs for [`probe_intersection`].
pub fn probe_family() -> Vec<(&'static str, Germ)> {
    vec![
        ("id", Germ::identity()),
        ("-x", Germ::linear(-1.0).expect("valid")),
        ("x+x^2", Germ::polynomial(&[1.0, 1.0]).expect("valid")),
        ("x+x^3", Germ::polynomial(&[1.0, 0.0, 1.0]).expect("valid")),
        ("2x", Germ::linear(2.0).expect("valid")),
        ("-3x", Germ::linear(-3.0).expect("valid")),
    ]
}

/// One probe outcome: `q = w_b ∘ f ∘ w_a`, whether `q ∈ Diff^k`, and whether
/// the predicted type says it should be.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult {
    pub name: &'static str,
    pub in_diff: bool,
    pub predicted: bool,
}

/// Checks the closed-form type against direct germ computations on the
/// probe family. `q` lies in `w_b Diff^k w_a` by construction, so it lies in
/// the intersection exactly when it is in `Diff^k`.
pub fn probe_intersection(a: f64, b: f64, k: Order) -> Result<(IntersectionType, Vec<ProbeResult>)> {
    let t = intersection_type(&Real::from_f64(a), &Real::from_f64(b))?;
    let wa = GermMap::Exact(make_wa(a)?);
    let wb = GermMap::Exact(make_wa(b)?);
    let mut out = Vec::new();
    for (name, f) in probe_family() {
        let q = compose(&wb, &compose(&GermMap::Exact(f), &wa));
        let member = in_diff(&q, k)?;
        let predicted = match t {
            IntersectionType::Empty => false,
            IntersectionType::FullD => in_diff(&q, k)?,
            IntersectionType::JPlus => in_jdiff(&q, k)? && q.orientation() == Orientation::Preserving,
            IntersectionType::JMinus => in_jdiff(&q, k)? && q.orientation() == Orientation::Reversing,
        };
        out.push(ProbeResult {
            name,
            in_diff: member,
            predicted,
        });
    }
    Ok((t, out))
}
