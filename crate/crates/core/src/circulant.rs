//! Regular representation of group-algebra elements as GF(2) matrices.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::ring::{GroupSpec, RingElem};

/// Builds the `n x n` matrix of multiplication by `f`.
///
/// Column `j` is decoded into per-variable positions (last variable first,
/// `idx[k] = j mod l_k`), each monomial shifts those positions, and the row
/// index is re-encoded with the first variable most significant. Entries
/// accumulate mod 2.
pub fn poly_to_circulant(f: &RingElem, spec: &GroupSpec) -> Result<BitMatrix> {
    if f.spec() != spec {
        return Err(Error::SpecMismatch {
            left: f.spec().orders().to_vec(),
            right: spec.orders().to_vec(),
        });
    }
    let orders = spec.orders();
    let d = orders.len();
    let n = spec.order();
    let terms = f.exponent_vectors();
    let mut c = BitMatrix::zeros(n, n);
    let mut idxs = vec![0usize; d];
    for j in 0..n {
        let mut tmp = j;
        for k in (0..d).rev() {
            idxs[k] = tmp % orders[k];
            tmp /= orders[k];
        }
        for e in &terms {
            let mut row = 0;
            for k in 0..d {
                row = row * orders[k] + (idxs[k] + e[k]) % orders[k];
            }
            c.toggle(row, j);
        }
    }
    Ok(c)
}

/// True iff every pair of the given square matrices commutes.
pub fn circulant_commute_check(mats: &[BitMatrix]) -> Result<bool> {
    if let Some(first) = mats.first() {
        let n = first.rows();
        for m in mats {
            if m.shape() != (n, n) {
                return Err(Error::ShapeMismatch {
                    op: "commute check",
                    left: (n, n),
                    right: m.shape(),
                });
            }
        }
    }
    Ok(first_non_commuting(mats)?.is_none())
}

/// First pair `(i, j)`, `i < j`, whose products differ.
pub(crate) fn first_non_commuting(mats: &[BitMatrix]) -> Result<Option<(usize, usize)>> {
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if mats[i].mul(&mats[j])? != mats[j].mul(&mats[i])? {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;
    use proptest::prelude::*;

    fn spec(o: &[usize]) -> GroupSpec {
        GroupSpec::new(o.to_vec()).unwrap()
    }

    fn shift(l: usize, p: usize) -> BitMatrix {
        let mut s = BitMatrix::zeros(l, l);
        for i in 0..l {
            s.toggle((i + p) % l, i);
        }
        s
    }

    fn kron(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
        let (ar, ac) = a.shape();
        let (br, bc) = b.shape();
        let mut out = BitMatrix::zeros(ar * br, ac * bc);
        for i in 0..ar {
            for j in 0..ac {
                if a.get(i, j) {
                    out.set_block(i * br, j * bc, b);
                }
            }
        }
        out
    }

    /// Independent construction: sum over monomials of Kronecker products of shifts.
    fn kron_oracle(f: &RingElem) -> BitMatrix {
        let orders = f.spec().orders();
        let n = f.spec().order();
        let mut acc = BitMatrix::zeros(n, n);
        for e in f.exponent_vectors() {
            let m = orders
                .iter()
                .zip(&e)
                .map(|(&l, &p)| shift(l, p))
                .reduce(|a, b| kron(&a, &b))
                .unwrap();
            acc = acc.add(&m).unwrap();
        }
        acc
    }

    #[test]
    fn one_maps_to_identity() {
        for o in [&[1usize][..], &[3], &[2, 3, 4]] {
            let s = spec(o);
            assert_eq!(poly_to_circulant(&RingElem::one(&s), &s).unwrap(), BitMatrix::identity(s.order()));
        }
    }

    #[test]
    fn x_over_z3_is_cyclic_shift() {
        let s = spec(&[3]);
        let c = poly_to_circulant(&parse_poly("x", &s).unwrap(), &s).unwrap();
        // hand trace: column i has its single 1 in row i+1 mod 3
        let expected = BitMatrix::from_rows(&[[0u8, 0, 1], [1, 0, 0], [0, 1, 0]], 3);
        assert_eq!(c, expected);
    }

    #[test]
    fn bivariate_example_matches_kronecker_form() {
        let s = spec(&[21, 18]);
        let f = parse_poly("x^3 + y^10 + y^17", &s).unwrap();
        let c = poly_to_circulant(&f, &s).unwrap();
        assert_eq!(c.shape(), (378, 378));
        let expected = kron(&shift(21, 3), &BitMatrix::identity(18))
            .add(&kron(&BitMatrix::identity(21), &shift(18, 10)))
            .unwrap()
            .add(&kron(&BitMatrix::identity(21), &shift(18, 17)))
            .unwrap();
        assert_eq!(c, expected);
    }

    #[test]
    fn spec_mismatch() {
        let f = RingElem::one(&spec(&[2]));
        assert!(poly_to_circulant(&f, &spec(&[3])).is_err());
    }

    #[test]
    fn commute_checks() {
        let i = BitMatrix::identity(4);
        assert!(circulant_commute_check(&[i.clone(), i.clone()]).unwrap());
        let s = spec(&[2, 2]);
        let x = poly_to_circulant(&parse_poly("x", &s).unwrap(), &s).unwrap();
        let y = poly_to_circulant(&parse_poly("y", &s).unwrap(), &s).unwrap();
        assert!(circulant_commute_check(&[x.clone(), y.clone()]).unwrap());

        // perturb one entry of a circulant and confirm the products now differ
        let s5 = spec(&[5]);
        let a = poly_to_circulant(&parse_poly("1 + x", &s5).unwrap(), &s5).unwrap();
        let b = poly_to_circulant(&parse_poly("x^2", &s5).unwrap(), &s5).unwrap();
        let mut bad = b.clone();
        bad.toggle(0, 0);
        assert_ne!(a.mul(&bad).unwrap(), bad.mul(&a).unwrap());
        assert!(!circulant_commute_check(&[a, bad]).unwrap());
        assert!(circulant_commute_check(&[x, BitMatrix::identity(3)]).is_err());
    }

    fn arb_pair() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>)> {
        proptest::collection::vec(1usize..6, 1..4).prop_flat_map(|orders| {
            let n: usize = orders.iter().product();
            (
                Just(orders),
                proptest::collection::vec(0..n, 0..7),
                proptest::collection::vec(0..n, 0..7),
            )
        })
    }

    proptest! {
        #[test]
        fn homomorphism((orders, a, b) in arb_pair()) {
            let s = spec(&orders);
            let f = RingElem::from_indices(&s, a);
            let g = RingElem::from_indices(&s, b);
            let cf = poly_to_circulant(&f, &s).unwrap();
            let cg = poly_to_circulant(&g, &s).unwrap();
            prop_assert_eq!(poly_to_circulant(&f.mul(&g).unwrap(), &s).unwrap(), cf.mul(&cg).unwrap());
            prop_assert_eq!(poly_to_circulant(&f.add(&g).unwrap(), &s).unwrap(), cf.add(&cg).unwrap());
            prop_assert_eq!(cf.mul(&cg).unwrap(), cg.mul(&cf).unwrap());
            prop_assert_eq!(&cf, &kron_oracle(&f));
            prop_assert!(cf.row_weights().iter().all(|&w| w == f.weight()));
            prop_assert!(cf.col_weights().iter().all(|&w| w == f.weight()));
            // transpose corresponds to the antipode
            prop_assert_eq!(cf.transpose(), poly_to_circulant(&f.antipode(), &s).unwrap());
        }

        #[test]
        fn variable_power_is_identity(orders in proptest::collection::vec(1usize..7, 1..4)) {
            let s = spec(&orders);
            for (i, &l) in orders.iter().enumerate() {
                let x = poly_to_circulant(&RingElem::variable(&s, i), &s).unwrap();
                let mut p = BitMatrix::identity(s.order());
                for _ in 0..l {
                    p = p.mul(&x).unwrap();
                }
                prop_assert_eq!(p, BitMatrix::identity(s.order()));
            }
        }
    }
}
