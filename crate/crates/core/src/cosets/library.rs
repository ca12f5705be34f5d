//! Small groups by explicit multiplication rules.

use super::group::FiniteGroup;

/// `Z_n` with elements named `0..n`.
pub fn cyclic(n: usize) -> FiniteGroup {
    let names = (0..n).map(|i| i.to_string()).collect();
    FiniteGroup::from_fn(names, |a, b| (a + b) % n).expect("cyclic group")
}

/// Dihedral group of order `2n`, elements `s^j r^i` with `r s = s r⁻¹`.
///
/// For `n = 3` the names are `e, r, r2, s, sr, sr2`.
pub fn dihedral(n: usize) -> FiniteGroup {
    let name = |i: usize, j: usize| {
        let s = if j == 1 { "s" } else { "" };
        let r = match i {
            0 => String::new(),
            1 => "r".to_string(),
            _ => format!("r{i}"),
        };
        let out = format!("{s}{r}");
        if out.is_empty() {
            "e".to_string()
        } else {
            out
        }
    };
    let names = (0..2 * n).map(|x| name(x % n, x / n)).collect();
    FiniteGroup::from_fn(names, |x, y| {
        let (i1, j1) = (x % n, x / n);
        let (i2, j2) = (y % n, y / n);
        let i = if j2 == 1 { (n - i1 + i2) % n } else { (i1 + i2) % n };
        i + n * ((j1 + j2) % 2)
    })
    .expect("dihedral group")
}

/// Dicyclic group of order `4n`: `a^{2n} = 1`, `x² = a^n`, `x a x⁻¹ = a⁻¹`.
///
/// `n = 2` gives the quaternion group.
pub fn dicyclic(n: usize) -> FiniteGroup {
    let m = 2 * n;
    let names = (0..2 * m)
        .map(|e| {
            let (i, j) = (e % m, e / m);
            match (i, j) {
                (0, 0) => "e".to_string(),
                (_, 0) => format!("a{i}"),
                (0, _) => "x".to_string(),
                _ => format!("a{i}x"),
            }
        })
        .collect();
    FiniteGroup::from_fn(names, |p, q| {
        let (i1, j1) = (p % m, p / m);
        let (i2, j2) = (q % m, q / m);
        let mut i = if j1 == 1 { (i1 + m - i2) % m } else { (i1 + i2) % m };
        if j1 == 1 && j2 == 1 {
            i = (i + n) % m;
        }
        i + m * ((j1 + j2) % 2)
    })
    .expect("dicyclic group")
}

/// `G × H` with names `(g,h)`.
pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
    let (ng, nh) = (g.order(), h.order());
    let names = (0..ng * nh)
        .map(|x| format!("({},{})", g.name(x / nh), h.name(x % nh)))
        .collect();
    FiniteGroup::from_fn(names, |x, y| {
        g.mul(x / nh, y / nh) * nh + h.mul(x % nh, y % nh)
    })
    .expect("direct product")
}

fn is_even(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// Alternating group on four points; elements are named by their images
/// of `0123`, e.g. `1032`.
pub fn alternating4() -> FiniteGroup {
    let mut perms: Vec<[usize; 4]> = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&x| seen[x] = true);
                    if seen.iter().all(|&s| s) && is_even(&p) {
                        perms.push(p);
                    }
                }
            }
        }
    }
    let names = perms
        .iter()
        .map(|p| p.iter().map(|x| x.to_string()).collect::<String>())
        .collect();
    FiniteGroup::from_fn(names, |x, y| {
        // (x·y)(i) = x(y(i))
        let comp: [usize; 4] = std::array::from_fn(|i| perms[x][perms[y][i]]);
        perms.iter().position(|p| *p == comp).expect("closed")
    })
    .expect("alternating group")
}

/// One representative of every isomorphism class of groups of order at most 12.
pub fn groups_up_to_12() -> Vec<(String, FiniteGroup)> {
    let z = cyclic;
    let mut out: Vec<(String, FiniteGroup)> = Vec::new();
    for n in [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12] {
        out.push((format!("Z{n}"), z(n)));
    }
    out.push(("Z2xZ2".into(), direct_product(&z(2), &z(2))));
    out.push(("D3".into(), dihedral(3)));
    out.push(("Z4xZ2".into(), direct_product(&z(4), &z(2))));
    out.push(("Z2xZ2xZ2".into(), direct_product(&direct_product(&z(2), &z(2)), &z(2))));
    out.push(("D4".into(), dihedral(4)));
    out.push(("Q8".into(), dicyclic(2)));
    out.push(("Z3xZ3".into(), direct_product(&z(3), &z(3))));
    out.push(("D5".into(), dihedral(5)));
    out.push(("Z6xZ2".into(), direct_product(&z(6), &z(2))));
    out.push(("D6".into(), dihedral(6)));
    out.push(("A4".into(), alternating4()));
    out.push(("Dic3".into(), dicyclic(3)));
    out
}
