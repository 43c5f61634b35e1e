//! Pluggable word-problem oracles for quotients of the free group, with
//! canonical fixed-width element encodings, plus the shortest-relation
//! search that certifies the girth-like invariant `rho`.
//!
//! Every oracle evaluates words homomorphically and encodes elements as
//! little-endian byte strings that are injective on group elements, so the
//! rest of the crate can hash, sort, and deduplicate elements without
//! knowing which group it is working over.

mod rho;

pub use rho::{compute_rho, find_high_girth, GirthSearch, RhoCertificate, RhoOutcome};

use crate::error::{Error, Result};
use crate::words::{Letter, PhiSpec, Word};

/// Which construction an oracle is.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleKind {
    FreeAbelian,
    NilpotentClass2,
    FinitePerm,
    Subdirect,
    DirectProduct,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::FreeAbelian => "free_abelian",
            OracleKind::NilpotentClass2 => "nilpotent_class2",
            OracleKind::FinitePerm => "finite_perm",
            OracleKind::Subdirect => "subdirect",
            OracleKind::DirectProduct => "direct_product",
        }
    }
}

/// Generator images in a symmetric group, 0-based image tuples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PermGens {
    degree: usize,
    gens: Vec<Vec<u8>>,
    inverses: Vec<Vec<u8>>,
}

impl PermGens {
    /// `images[i]` is the 1-based image tuple of generator `a_{i+1}`.
    pub fn new(degree: usize, images: &[Vec<usize>]) -> Result<PermGens> {
        if degree == 0 || degree > 255 {
            return Err(Error::InvalidPermutation(format!(
                "degree {degree} out of supported range 1..=255"
            )));
        }
        if images.is_empty() {
            return Err(Error::InvalidPermutation("no generator images".into()));
        }
        let mut gens = Vec::with_capacity(images.len());
        let mut inverses = Vec::with_capacity(images.len());
        for (gi, img) in images.iter().enumerate() {
            if img.len() != degree {
                return Err(Error::InvalidPermutation(format!(
                    "generator a{} has {} images, degree is {degree}",
                    gi + 1,
                    img.len()
                )));
            }
            let mut fwd = vec![0u8; degree];
            let mut inv = vec![0u8; degree];
            let mut seen = vec![false; degree];
            for (x, &y) in img.iter().enumerate() {
                if y == 0 || y > degree || seen[y - 1] {
                    return Err(Error::InvalidPermutation(format!(
                        "generator a{} image tuple {img:?} is not a permutation of 1..={degree}",
                        gi + 1
                    )));
                }
                seen[y - 1] = true;
                fwd[x] = (y - 1) as u8;
                inv[y - 1] = x as u8;
            }
            gens.push(fwd);
            inverses.push(inv);
        }
        Ok(PermGens {
            degree,
            gens,
            inverses,
        })
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// 1-based image tuple of generator `index`.
    pub fn image_tuple(&self, index: usize) -> Vec<usize> {
        self.gens[index - 1].iter().map(|&y| y as usize + 1).collect()
    }

    fn apply(&self, state: &[u8], l: Letter) -> Vec<u8> {
        let table = if l.is_positive() {
            &self.gens[l.index() - 1]
        } else {
            &self.inverses[l.index() - 1]
        };
        state.iter().map(|&x| table[x as usize]).collect()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Repr {
    FreeAbelian { m: usize },
    NilpotentClass2 { m: usize },
    FinitePerm { perms: PermGens },
    Subdirect { phi: PhiSpec, perms: PermGens },
    DirectProduct { left: Box<GroupOracle>, right: Box<GroupOracle> },
}

/// A quotient group `G` of the rank-`m` free group with a decidable word
/// problem, exposed through evaluation and canonical encodings. Oracles are
/// immutable and cheap to share read-only.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupOracle {
    repr: Repr,
}

/// An element of an oracle's group, in the oracle's own normal form.
/// Compare only elements of the same oracle.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Element {
    /// Exponent vector in the free abelian group.
    Vector(Vec<i64>),
    /// Free nilpotent of class 2: generator exponents plus one integer per
    /// generator pair `i < j` counting basic commutators `[a_i, a_j]`.
    Nilpotent { exps: Vec<i64>, comms: Vec<i64> },
    /// Image tuple of `0..degree`.
    Perm(Vec<u8>),
    /// Height in the integers paired with a permutation image.
    Pair(i64, Vec<u8>),
    /// Componentwise pair for a direct product of oracles.
    Product(Box<Element>, Box<Element>),
}

/// Oracle for the free abelian group of rank `m`; generator `a_i` maps to
/// the `i`-th standard basis vector.
pub fn make_free_abelian(m: usize) -> Result<GroupOracle> {
    if m == 0 {
        return Err(Error::Domain("rank must be >= 1".into()));
    }
    Ok(GroupOracle {
        repr: Repr::FreeAbelian { m },
    })
}

/// Oracle for the free nilpotent group of class 2 and rank `m`, in normal
/// form `(e, c)` with central commutator coordinates.
pub fn make_nilpotent_class2(m: usize) -> Result<GroupOracle> {
    if m < 2 {
        return Err(Error::Domain(
            "free nilpotent class-2 oracle needs rank >= 2".into(),
        ));
    }
    Ok(GroupOracle {
        repr: Repr::NilpotentClass2 { m },
    })
}

/// Oracle for the permutation group generated by the given 1-based image
/// tuples on `1..=degree`.
pub fn make_finite_perm(degree: usize, images: &[Vec<usize>]) -> Result<GroupOracle> {
    Ok(GroupOracle {
        repr: Repr::FinitePerm {
            perms: PermGens::new(degree, images)?,
        },
    })
}

/// Oracle for the image of the free group in `Z x finite` under the pair of
/// the height homomorphism and a finite permutation oracle of the same rank.
pub fn make_subdirect(phi: PhiSpec, finite: GroupOracle) -> Result<GroupOracle> {
    let perms = match finite.repr {
        Repr::FinitePerm { perms } => perms,
        _ => {
            return Err(Error::Domain(
                "subdirect oracle needs a finite_perm oracle as its finite part".into(),
            ))
        }
    };
    if perms.rank() != phi.rank() {
        return Err(Error::RankMismatch {
            rank: phi.rank(),
            found: perms.rank(),
        });
    }
    Ok(GroupOracle {
        repr: Repr::Subdirect { phi, perms },
    })
}

/// Componentwise product of two oracles of the same rank.
pub fn make_direct_product(left: GroupOracle, right: GroupOracle) -> Result<GroupOracle> {
    if left.rank() != right.rank() {
        return Err(Error::RankMismatch {
            rank: left.rank(),
            found: right.rank(),
        });
    }
    Ok(GroupOracle {
        repr: Repr::DirectProduct {
            left: Box::new(left),
            right: Box::new(right),
        },
    })
}

impl GroupOracle {
    pub fn kind(&self) -> OracleKind {
        match &self.repr {
            Repr::FreeAbelian { .. } => OracleKind::FreeAbelian,
            Repr::NilpotentClass2 { .. } => OracleKind::NilpotentClass2,
            Repr::FinitePerm { .. } => OracleKind::FinitePerm,
            Repr::Subdirect { .. } => OracleKind::Subdirect,
            Repr::DirectProduct { .. } => OracleKind::DirectProduct,
        }
    }

    pub fn rank(&self) -> usize {
        match &self.repr {
            Repr::FreeAbelian { m } | Repr::NilpotentClass2 { m } => *m,
            Repr::FinitePerm { perms } => perms.rank(),
            Repr::Subdirect { phi, .. } => phi.rank(),
            Repr::DirectProduct { left, .. } => left.rank(),
        }
    }

    /// The height homomorphism baked into a subdirect oracle, if any.
    pub fn phi(&self) -> Option<&PhiSpec> {
        match &self.repr {
            Repr::Subdirect { phi, .. } => Some(phi),
            _ => None,
        }
    }

    /// Permutation data for finite_perm and subdirect oracles.
    pub fn perm_gens(&self) -> Option<&PermGens> {
        match &self.repr {
            Repr::FinitePerm { perms } | Repr::Subdirect { perms, .. } => Some(perms),
            _ => None,
        }
    }

    pub fn identity(&self) -> Element {
        match &self.repr {
            Repr::FreeAbelian { m } => Element::Vector(vec![0; *m]),
            Repr::NilpotentClass2 { m } => Element::Nilpotent {
                exps: vec![0; *m],
                comms: vec![0; m * (m - 1) / 2],
            },
            Repr::FinitePerm { perms } => {
                Element::Perm((0..perms.degree() as u8).collect())
            }
            Repr::Subdirect { perms, .. } => {
                Element::Pair(0, (0..perms.degree() as u8).collect())
            }
            Repr::DirectProduct { left, right } => Element::Product(
                Box::new(left.identity()),
                Box::new(right.identity()),
            ),
        }
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        *x == self.identity()
    }

    /// Right-multiply an element by the image of a single letter.
    pub fn apply(&self, x: &Element, l: Letter) -> Element {
        match (&self.repr, x) {
            (Repr::FreeAbelian { .. }, Element::Vector(v)) => {
                let mut v = v.clone();
                v[l.index() - 1] += l.sign();
                Element::Vector(v)
            }
            (Repr::NilpotentClass2 { m }, Element::Nilpotent { exps, comms }) => {
                // (e, c) * (s*unit_g, 0): c_{gj} -= s * e_j for j > g.
                let g = l.index() - 1;
                let s = l.sign();
                let mut exps = exps.clone();
                let mut comms = comms.clone();
                for j in (g + 1)..*m {
                    comms[pair_pos(*m, g, j)] -= s * exps[j];
                }
                exps[g] += s;
                Element::Nilpotent { exps, comms }
            }
            (Repr::FinitePerm { perms }, Element::Perm(p)) => Element::Perm(perms.apply(p, l)),
            (Repr::Subdirect { phi, perms }, Element::Pair(h, p)) => {
                Element::Pair(h + phi.letter_value(l), perms.apply(p, l))
            }
            (Repr::DirectProduct { left, right }, Element::Product(a, b)) => Element::Product(
                Box::new(left.apply(a, l)),
                Box::new(right.apply(b, l)),
            ),
            _ => panic!("element does not belong to this oracle"),
        }
    }

    /// Group multiplication in normal form.
    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        match (&self.repr, x, y) {
            (Repr::FreeAbelian { .. }, Element::Vector(a), Element::Vector(b)) => {
                Element::Vector(a.iter().zip(b).map(|(p, q)| p + q).collect())
            }
            (
                Repr::NilpotentClass2 { m },
                Element::Nilpotent { exps: e, comms: c },
                Element::Nilpotent { exps: e2, comms: c2 },
            ) => {
                let exps: Vec<i64> = e.iter().zip(e2).map(|(p, q)| p + q).collect();
                let mut comms = Vec::with_capacity(c.len());
                for i in 0..*m {
                    for j in (i + 1)..*m {
                        let k = pair_pos(*m, i, j);
                        comms.push(c[k] + c2[k] - e2[i] * e[j]);
                    }
                }
                Element::Nilpotent { exps, comms }
            }
            (Repr::FinitePerm { .. }, Element::Perm(p), Element::Perm(q)) => {
                Element::Perm(p.iter().map(|&i| q[i as usize]).collect())
            }
            (Repr::Subdirect { .. }, Element::Pair(h1, p), Element::Pair(h2, q)) => {
                Element::Pair(h1 + h2, p.iter().map(|&i| q[i as usize]).collect())
            }
            (
                Repr::DirectProduct { left, right },
                Element::Product(a1, b1),
                Element::Product(a2, b2),
            ) => Element::Product(
                Box::new(left.mul(a1, a2)),
                Box::new(right.mul(b1, b2)),
            ),
            _ => panic!("elements do not belong to this oracle"),
        }
    }

    pub fn inv(&self, x: &Element) -> Element {
        match (&self.repr, x) {
            (Repr::FreeAbelian { .. }, Element::Vector(v)) => {
                Element::Vector(v.iter().map(|a| -a).collect())
            }
            (Repr::NilpotentClass2 { m }, Element::Nilpotent { exps, comms }) => {
                // (e, c)^-1 = (-e, -c - e_i e_j).
                let mut inv_comms = Vec::with_capacity(comms.len());
                for i in 0..*m {
                    for j in (i + 1)..*m {
                        inv_comms.push(-comms[pair_pos(*m, i, j)] - exps[i] * exps[j]);
                    }
                }
                Element::Nilpotent {
                    exps: exps.iter().map(|a| -a).collect(),
                    comms: inv_comms,
                }
            }
            (Repr::FinitePerm { .. }, Element::Perm(p)) => {
                let mut inv = vec![0u8; p.len()];
                for (i, &y) in p.iter().enumerate() {
                    inv[y as usize] = i as u8;
                }
                Element::Perm(inv)
            }
            (Repr::Subdirect { .. }, Element::Pair(h, p)) => {
                let mut inv = vec![0u8; p.len()];
                for (i, &y) in p.iter().enumerate() {
                    inv[y as usize] = i as u8;
                }
                Element::Pair(-h, inv)
            }
            (Repr::DirectProduct { left, right }, Element::Product(a, b)) => {
                Element::Product(Box::new(left.inv(a)), Box::new(right.inv(b)))
            }
            _ => panic!("element does not belong to this oracle"),
        }
    }

    fn check_rank(&self, w: &Word) -> Result<()> {
        let found = w.max_index();
        if found > self.rank() {
            return Err(Error::RankMismatch {
                rank: self.rank(),
                found,
            });
        }
        Ok(())
    }

    /// Homomorphic image of a word.
    pub fn eval(&self, w: &Word) -> Result<Element> {
        self.check_rank(w)?;
        Ok(self.eval_letters(w.letters()))
    }

    /// Image of a raw letter sequence; rank is the caller's responsibility.
    pub fn eval_letters(&self, letters: &[Letter]) -> Element {
        let mut x = self.identity();
        for &l in letters {
            x = self.apply(&x, l);
        }
        x
    }

    /// Width of the canonical encoding in bytes. All integers are
    /// little-endian `i64`; permutations are one byte per point.
    pub fn element_width(&self) -> usize {
        match &self.repr {
            Repr::FreeAbelian { m } => 8 * m,
            Repr::NilpotentClass2 { m } => 8 * m + 8 * (m * (m - 1) / 2),
            Repr::FinitePerm { perms } => perms.degree(),
            Repr::Subdirect { perms, .. } => 8 + perms.degree(),
            Repr::DirectProduct { left, right } => {
                left.element_width() + right.element_width()
            }
        }
    }

    pub fn encode_into(&self, x: &Element, out: &mut Vec<u8>) {
        match (&self.repr, x) {
            (Repr::FreeAbelian { .. }, Element::Vector(v)) => {
                for a in v {
                    out.extend_from_slice(&a.to_le_bytes());
                }
            }
            (Repr::NilpotentClass2 { .. }, Element::Nilpotent { exps, comms }) => {
                for a in exps.iter().chain(comms) {
                    out.extend_from_slice(&a.to_le_bytes());
                }
            }
            (Repr::FinitePerm { .. }, Element::Perm(p)) => out.extend_from_slice(p),
            (Repr::Subdirect { .. }, Element::Pair(h, p)) => {
                out.extend_from_slice(&h.to_le_bytes());
                out.extend_from_slice(p);
            }
            (Repr::DirectProduct { left, right }, Element::Product(a, b)) => {
                left.encode_into(a, out);
                right.encode_into(b, out);
            }
            _ => panic!("element does not belong to this oracle"),
        }
    }

    /// Canonical fixed-width encoding; injective on group elements.
    pub fn encode(&self, x: &Element) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.element_width());
        self.encode_into(x, &mut out);
        out
    }

    pub fn decode(&self, bytes: &[u8]) -> Result<Element> {
        if bytes.len() != self.element_width() {
            return Err(Error::Domain(format!(
                "encoded element has {} bytes, oracle expects {}",
                bytes.len(),
                self.element_width()
            )));
        }
        Ok(self.decode_unchecked(bytes))
    }

    fn decode_unchecked(&self, bytes: &[u8]) -> Element {
        fn read_i64s(bytes: &[u8]) -> Vec<i64> {
            bytes
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                .collect()
        }
        match &self.repr {
            Repr::FreeAbelian { .. } => Element::Vector(read_i64s(bytes)),
            Repr::NilpotentClass2 { m } => {
                let all = read_i64s(bytes);
                let (exps, comms) = all.split_at(*m);
                Element::Nilpotent {
                    exps: exps.to_vec(),
                    comms: comms.to_vec(),
                }
            }
            Repr::FinitePerm { .. } => Element::Perm(bytes.to_vec()),
            Repr::Subdirect { .. } => Element::Pair(
                i64::from_le_bytes(bytes[..8].try_into().unwrap()),
                bytes[8..].to_vec(),
            ),
            Repr::DirectProduct { left, right } => {
                let (lb, rb) = bytes.split_at(left.element_width());
                Element::Product(
                    Box::new(left.decode_unchecked(lb)),
                    Box::new(right.decode_unchecked(rb)),
                )
            }
        }
    }

    /// Compact, whitespace-free rendering of an element for text output.
    pub fn display_element(&self, x: &Element) -> String {
        match x {
            Element::Vector(v) => join_i64(v),
            Element::Nilpotent { exps, comms } => {
                format!("e:{};c:{}", join_i64(exps), join_i64(comms))
            }
            Element::Perm(p) => join_perm(p),
            Element::Pair(h, p) => format!("{h}|{}", join_perm(p)),
            Element::Product(a, b) => {
                let (left, right) = match &self.repr {
                    Repr::DirectProduct { left, right } => (left, right),
                    _ => panic!("element does not belong to this oracle"),
                };
                format!("{}*{}", left.display_element(a), right.display_element(b))
            }
        }
    }

    /// One-line human description of the oracle.
    pub fn describe(&self) -> String {
        match &self.repr {
            Repr::FreeAbelian { m } => format!("free_abelian(m={m})"),
            Repr::NilpotentClass2 { m } => format!("nilpotent_class2(m={m})"),
            Repr::FinitePerm { perms } => {
                format!("finite_perm(m={}, degree={})", perms.rank(), perms.degree())
            }
            Repr::Subdirect { phi, perms } => format!(
                "subdirect(phi={}, degree={})",
                join_i64(phi.images()),
                perms.degree()
            ),
            Repr::DirectProduct { left, right } => {
                format!("direct_product({}, {})", left.describe(), right.describe())
            }
        }
    }
}

fn join_i64(v: &[i64]) -> String {
    v.iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_perm(p: &[u8]) -> String {
    p.iter()
        .map(|&a| (a as usize + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Position of the pair `(i, j)`, `i < j`, in row-major upper-triangle order.
fn pair_pos(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        parse_word(s, 26).unwrap()
    }

    fn raw_word(m: usize, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((1..=m, prop::bool::ANY), 0..=max_len)
            .prop_map(|v| Word::from_raw(v.into_iter().map(|(i, s)| Letter::new(i, s))))
    }

    fn all_kinds() -> Vec<GroupOracle> {
        vec![
            make_free_abelian(2).unwrap(),
            make_nilpotent_class2(3).unwrap(),
            make_finite_perm(3, &[vec![2, 3, 1], vec![2, 1, 3]]).unwrap(),
            make_subdirect(
                PhiSpec::new(vec![1, 0]).unwrap(),
                make_finite_perm(3, &[vec![2, 3, 1], vec![2, 1, 3]]).unwrap(),
            )
            .unwrap(),
            make_direct_product(
                make_free_abelian(2).unwrap(),
                make_finite_perm(2, &[vec![2, 1], vec![1, 2]]).unwrap(),
            )
            .unwrap(),
        ]
    }

    #[test]
    fn free_abelian_examples() {
        let o = make_free_abelian(2).unwrap();
        assert_eq!(o.eval(&w("a b a^-1")).unwrap(), Element::Vector(vec![0, 1]));
        assert_eq!(
            o.eval(&w("a^-1 b^-1 a b")).unwrap(),
            Element::Vector(vec![0, 0])
        );
        assert_eq!(o.eval(&w("a a b")).unwrap(), Element::Vector(vec![2, 1]));
        assert!(o.eval(&w("c")).is_err());
    }

    #[test]
    fn nilpotent_collection_examples() {
        let o = make_nilpotent_class2(2).unwrap();
        assert_eq!(
            o.eval(&w("a b")).unwrap(),
            Element::Nilpotent { exps: vec![1, 1], comms: vec![0] }
        );
        assert_eq!(
            o.eval(&w("b a")).unwrap(),
            Element::Nilpotent { exps: vec![1, 1], comms: vec![-1] }
        );
        // the basic commutator convention: [a, b] = a^-1 b^-1 a b has c = +1
        assert_eq!(
            o.eval(&w("a^-1 b^-1 a b")).unwrap(),
            Element::Nilpotent { exps: vec![0, 0], comms: vec![1] }
        );
        // [[a, b], a] dies in class 2
        let ab = w("a^-1 b^-1 a b");
        let gamma3 = ab.inverse().concat(&w("a^-1")).concat(&ab).concat(&w("a"));
        assert!(o.is_identity(&o.eval(&gamma3).unwrap()));
    }

    #[test]
    fn nilpotent_gamma3_relators_vanish_all_pairs() {
        let m = 3;
        let o = make_nilpotent_class2(m).unwrap();
        for i in 1..=m {
            for j in 1..=m {
                if i == j {
                    continue;
                }
                let basic = Word::from_raw([
                    Letter::negative(i),
                    Letter::negative(j),
                    Letter::positive(i),
                    Letter::positive(j),
                ]);
                for k in 1..=m {
                    let conj = basic
                        .inverse()
                        .concat(&Word::from_raw([Letter::negative(k)]))
                        .concat(&basic)
                        .concat(&Word::from_raw([Letter::positive(k)]));
                    assert!(
                        o.is_identity(&o.eval(&conj).unwrap()),
                        "[[a{i},a{j}],a{k}] should vanish"
                    );
                }
            }
        }
    }

    #[test]
    fn nilpotent_commutators_are_central() {
        let o = make_nilpotent_class2(3).unwrap();
        for i in 1..=3usize {
            for j in (i + 1)..=3 {
                let basic = Word::from_raw([
                    Letter::negative(i),
                    Letter::negative(j),
                    Letter::positive(i),
                    Letter::positive(j),
                ]);
                let c = o.eval(&basic).unwrap();
                for k in 1..=3 {
                    let g = o.eval(&Word::from_raw([Letter::positive(k)])).unwrap();
                    assert_eq!(o.mul(&c, &g), o.mul(&g, &c));
                }
            }
        }
    }

    #[test]
    fn finite_perm_examples() {
        // identity permutations generate the trivial group
        let o = make_finite_perm(3, &[vec![1, 2, 3], vec![1, 2, 3]]).unwrap();
        assert!(o.is_identity(&o.eval(&w("a b a b^-1 a^-1")).unwrap()));

        // equal images kill a b^-1
        let o = make_finite_perm(2, &[vec![2, 1], vec![2, 1]]).unwrap();
        assert!(o.is_identity(&o.eval(&w("a b^-1")).unwrap()));

        // a 3-cycle has order 3
        let o = make_finite_perm(3, &[vec![2, 3, 1], vec![2, 1, 3]]).unwrap();
        assert!(!o.is_identity(&o.eval(&w("a a")).unwrap()));
        assert!(o.is_identity(&o.eval(&w("a a a")).unwrap()));

        assert!(make_finite_perm(3, &[vec![2, 2, 1]]).is_err());
        assert!(make_finite_perm(3, &[vec![1, 2]]).is_err());
        assert!(make_finite_perm(300, &[vec![1; 300]]).is_err());
    }

    #[test]
    fn subdirect_pairs_phi_with_the_finite_image() {
        let phi = PhiSpec::new(vec![1, 0]).unwrap();
        let finite = make_finite_perm(3, &[vec![2, 3, 1], vec![2, 1, 3]]).unwrap();
        let o = make_subdirect(phi.clone(), finite.clone()).unwrap();
        for text in ["a", "b a b^-1", "a b a b^-1 a^-1", "b b a^-1"] {
            let word = w(text);
            let got = o.eval(&word).unwrap();
            let expected_h = phi.eval(&word).unwrap();
            let expected_p = finite.eval(&word).unwrap();
            match (got, expected_p) {
                (Element::Pair(h, p), Element::Perm(q)) => {
                    assert_eq!(h, expected_h);
                    assert_eq!(p, q);
                }
                other => panic!("unexpected element shapes {other:?}"),
            }
        }
        // rank mismatch is rejected
        let wide = make_finite_perm(2, &[vec![2, 1], vec![1, 2], vec![2, 1]]).unwrap();
        assert!(make_subdirect(PhiSpec::new(vec![1, 0]).unwrap(), wide).is_err());
        // non-permutation finite part is rejected
        assert!(make_subdirect(
            PhiSpec::new(vec![1, 0]).unwrap(),
            make_free_abelian(2).unwrap()
        )
        .is_err());
    }

    #[test]
    fn subdirect_with_trivial_finite_part_is_the_integers() {
        let phi = PhiSpec::new(vec![1, 0]).unwrap();
        let finite = make_finite_perm(1, &[vec![1], vec![1]]).unwrap();
        let o = make_subdirect(phi.clone(), finite).unwrap();
        // the kernel collapses to ker phi
        for text in ["a b", "b", "a a a", "b a^-1 b", "a b a^-1 b^-1"] {
            let word = w(text);
            assert_eq!(
                o.is_identity(&o.eval(&word).unwrap()),
                phi.eval(&word).unwrap() == 0,
                "{text}"
            );
        }
    }

    #[test]
    fn encodings_round_trip_and_are_fixed_width() {
        for o in all_kinds() {
            let width = o.element_width();
            for text in ["", "a", "a b^-1 a b", "b a b a a^-1"] {
                let word = parse_word(text, o.rank()).unwrap();
                let x = o.eval(&word).unwrap();
                let enc = o.encode(&x);
                assert_eq!(enc.len(), width, "{}", o.describe());
                assert_eq!(o.decode(&enc).unwrap(), x, "{}", o.describe());
            }
            assert!(o.decode(&vec![0u8; width + 1]).is_err());
        }
    }

    proptest! {
        #[test]
        fn eval_is_a_homomorphism(u in raw_word(2, 12), v in raw_word(2, 12)) {
            for o in all_kinds() {
                let eu = o.eval(&u).unwrap();
                let ev = o.eval(&v).unwrap();
                prop_assert_eq!(o.eval(&u.concat(&v)).unwrap(), o.mul(&eu, &ev));
                prop_assert_eq!(o.eval(&u.inverse()).unwrap(), o.inv(&eu));
                prop_assert_eq!(o.mul(&eu, &o.inv(&eu)), o.identity());
            }
        }

        #[test]
        fn eval_is_reduction_invariant(raw in prop::collection::vec((1..=2usize, prop::bool::ANY), 0..=16)) {
            let letters: Vec<Letter> = raw.into_iter().map(|(i, s)| Letter::new(i, s)).collect();
            for o in all_kinds() {
                let direct = o.eval_letters(&letters);
                let reduced = o.eval(&Word::from_raw(letters.clone())).unwrap();
                prop_assert_eq!(direct, reduced);
            }
        }

        #[test]
        fn nilpotent_product_is_associative(
            x in raw_word(3, 10),
            y in raw_word(3, 10),
            z in raw_word(3, 10),
        ) {
            let o = make_nilpotent_class2(3).unwrap();
            let (ex, ey, ez) = (
                o.eval(&x).unwrap(),
                o.eval(&y).unwrap(),
                o.eval(&z).unwrap(),
            );
            prop_assert_eq!(
                o.mul(&o.mul(&ex, &ey), &ez),
                o.mul(&ex, &o.mul(&ey, &ez))
            );
        }

        #[test]
        fn encoding_is_injective_on_elements(u in raw_word(2, 10), v in raw_word(2, 10)) {
            for o in all_kinds() {
                let (eu, ev) = (o.eval(&u).unwrap(), o.eval(&v).unwrap());
                prop_assert_eq!(o.encode(&eu) == o.encode(&ev), eu == ev);
            }
        }
    }
}
