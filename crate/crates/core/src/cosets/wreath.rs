use super::group::{FiniteGroup, Subgroup};

/// An element `(a, b, δ)` of `D ≀ Z₂ = (D × D) ⋊ Z₂`, with `a, b` indices
/// into the ambient group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WreathElement {
    pub a: usize,
    pub b: usize,
    pub delta: i8,
}

impl WreathElement {
    pub fn new(a: usize, b: usize, delta: i8) -> Self {
        assert!(delta == 1 || delta == -1, "delta must be ±1");
        WreathElement { a, b, delta }
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        WreathElement::new(g.identity(), g.identity(), 1)
    }

    /// All `2|D|²` elements.
    pub fn all(d: &Subgroup) -> Vec<WreathElement> {
        let mut out = Vec::with_capacity(2 * d.len() * d.len());
        for delta in [1, -1] {
            for a in d.iter() {
                for b in d.iter() {
                    out.push(WreathElement::new(a, b, delta));
                }
            }
        }
        out
    }

    /// `h ↦ a h^δ b⁻¹`.
    pub fn act(&self, g: &FiniteGroup, h: usize) -> usize {
        let hd = if self.delta == 1 { h } else { g.inv(h) };
        g.mul(g.mul(self.a, hd), g.inv(self.b))
    }
}

/// `(a,b,δ)(c,d,ε)` is `(ac, bd, δε)` for `δ = 1` and `(ad, bc, δε)` for `δ = -1`.
pub fn wreath_mul(g: &FiniteGroup, x: WreathElement, y: WreathElement) -> WreathElement {
    let delta = x.delta * y.delta;
    if x.delta == 1 {
        WreathElement::new(g.mul(x.a, y.a), g.mul(x.b, y.b), delta)
    } else {
        WreathElement::new(g.mul(x.a, y.b), g.mul(x.b, y.a), delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosets::library::dihedral;

    #[test]
    fn identity_and_flip_rule() {
        let d3 = dihedral(3);
        let i = |n| d3.index_of(n).unwrap();
        let e = WreathElement::identity(&d3);
        let y = WreathElement::new(i("r"), i("s"), -1);
        assert_eq!(wreath_mul(&d3, e, y), y);
        let x = WreathElement::new(i("sr"), i("r2"), -1);
        let p = wreath_mul(&d3, x, y);
        assert_eq!(p, WreathElement::new(d3.mul(i("sr"), i("s")), d3.mul(i("r2"), i("r")), 1));
    }

    #[test]
    fn action_is_compatible_with_multiplication() {
        let d3 = dihedral(3);
        let whole = d3.whole();
        let all = WreathElement::all(&whole);
        for &x in &all {
            for &y in &all {
                let xy = wreath_mul(&d3, x, y);
                for h in d3.elements() {
                    assert_eq!(x.act(&d3, y.act(&d3, h)), xy.act(&d3, h));
                }
            }
        }
    }

    #[test]
    fn multiplication_is_associative() {
        let d3 = dihedral(3);
        let all = WreathElement::all(&d3.whole());
        for &x in all.iter().step_by(5) {
            for &y in all.iter().step_by(3) {
                for &z in &all {
                    let l = wreath_mul(&d3, wreath_mul(&d3, x, y), z);
                    let r = wreath_mul(&d3, x, wreath_mul(&d3, y, z));
                    assert_eq!(l, r);
                }
            }
        }
    }
}
