//! Jordan splitting of binary forms at an odd prime.

use crate::arith::valuation;
use crate::form::BinaryForm;

use super::legendre_unchecked;

/// One rank-1 Jordan component `<p^order * u>`; `unit_class` is the Legendre symbol of `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Component {
    pub order: u32,
    pub unit_class: i64,
}

/// `[a, b, c]` over `Z_p` (p odd) as `<p^r1 u1, p^r2 u2>` with `r1 <= r2`.
pub fn split_odd(form: &BinaryForm, p: i64) -> [Component; 2] {
    let (a, b, c) = (form.a as i128, form.b as i128, form.c as i128);
    let pp = p as i128;
    let v = |x: i128| valuation(x, pp).unwrap_or(u32::MAX);
    // pick a basis vector of minimal valuation; e1 + e2 works when b dominates
    let lead = if v(a) <= v(b) && v(a) <= v(c) {
        a
    } else if v(c) <= v(b) {
        c
    } else {
        a + 2 * b + c
    };
    let d = a * c - b * b;
    let r1 = v(lead);
    let rd = v(d);
    let u1 = lead / pp.pow(r1);
    let ud = d / pp.pow(rd);
    let e1 = legendre_unchecked(u1, pp);
    let e2 = legendre_unchecked(ud, pp) * e1;
    let first = Component { order: r1, unit_class: e1 as i64 };
    let second = Component { order: rd - r1, unit_class: e2 as i64 };
    [first, second]
}

/// Whether `form` is isometric over `Z_p` to a sublattice of `<p, -p delta>`,
/// where `delta` is a nonsquare unit.
///
/// `<p, -p delta>` is the lattice of all vectors with norm in `pZ_p` in an
/// anisotropic plane, so the sublattices are exactly the lattices in that
/// plane with norm in `pZ_p`: both orders odd and `-u1 u2` in the class of `delta`.
pub fn embeds_in_anisotropic(form: &BinaryForm, p: i64, delta: i64) -> bool {
    let [x, y] = split_odd(form, p);
    let minus_one = legendre_unchecked(-1, p as i128) as i64;
    let delta_class = legendre_unchecked(delta as i128, p as i128) as i64;
    debug_assert_eq!(delta_class, -1, "delta must be a nonsquare unit");
    x.order % 2 == 1 && y.order % 2 == 1 && minus_one * x.unit_class * y.unit_class == delta_class
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits() {
        // <5, 35> at 5: orders 1 and 1, units 1 and 7
        let [x, y] = split_odd(&BinaryForm::diag(5, 35), 5);
        assert_eq!((x.order, y.order), (1, 1));
        assert_eq!((x.unit_class, y.unit_class), (1, -1));
        // b dominant: [3, 1, 3] at 3 -> e1+e2 has norm 8
        let [x, y] = split_odd(&BinaryForm::new(3, 1, 3), 3);
        assert_eq!((x.order, y.order), (0, 0));
        let [x, y] = split_odd(&BinaryForm::new(9, 3, 9), 3);
        assert_eq!((x.order, y.order), (1, 1));
    }

    #[test]
    fn anisotropic_examples() {
        assert!(embeds_in_anisotropic(&BinaryForm::diag(5, 35), 5, 2));
        assert!(embeds_in_anisotropic(&BinaryForm::diag(5, 35), 5, 3));
        assert!(!embeds_in_anisotropic(&BinaryForm::new(2, 1, 3), 5, 2));
        // <5, 5>: -1 is a square mod 5, so the plane is isotropic
        assert!(!embeds_in_anisotropic(&BinaryForm::diag(5, 5), 5, 2));
        // <5, 25>: orders of different parity
        assert!(!embeds_in_anisotropic(&BinaryForm::diag(5, 25), 5, 2));
    }
}
