//! Free-group word machinery: letters, freely reduced words, the height
//! homomorphism onto the integers, and good-word enumeration.
//!
//! Letters are ordered `a1 < a1^-1 < a2 < a2^-1 < ...`; every enumeration in
//! the crate is lexicographic with respect to that order.

use crate::error::{Error, Result};

/// A signed generator: `a_i` or `a_i^-1` with `i >= 1`.
///
/// Internally a letter is its rank in the fixed order
/// `a1 < a1^-1 < a2 < a2^-1 < ...`, so the derived `Ord` is the
/// enumeration order and `inverse` is a single bit flip.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    rank: u16,
}

impl Letter {
    /// Letter for generator `index` (1-based). `positive` picks `a_i` over `a_i^-1`.
    pub fn new(index: usize, positive: bool) -> Letter {
        assert!(index >= 1 && index <= u16::MAX as usize / 2, "generator index out of range");
        Letter {
            rank: 2 * (index as u16 - 1) + u16::from(!positive),
        }
    }

    pub fn positive(index: usize) -> Letter {
        Letter::new(index, true)
    }

    pub fn negative(index: usize) -> Letter {
        Letter::new(index, false)
    }

    /// 1-based generator index.
    pub fn index(self) -> usize {
        (self.rank / 2) as usize + 1
    }

    pub fn is_positive(self) -> bool {
        self.rank % 2 == 0
    }

    /// +1 for `a_i`, -1 for `a_i^-1`.
    pub fn sign(self) -> i64 {
        if self.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn inverse(self) -> Letter {
        Letter { rank: self.rank ^ 1 }
    }

    /// Position in the enumeration order, starting at 0 for `a1`.
    pub fn rank(self) -> usize {
        self.rank as usize
    }

    /// Inverse of [`Letter::rank`].
    pub fn from_rank(rank: usize) -> Letter {
        assert!(rank < u16::MAX as usize, "letter rank out of range");
        Letter { rank: rank as u16 }
    }

    /// All `2m` letters over rank `m`, in enumeration order.
    pub fn all(m: usize) -> impl Iterator<Item = Letter> {
        (1..=m).flat_map(|i| [Letter::positive(i), Letter::negative(i)])
    }

    fn write_name(self, out: &mut String, numbered: bool) {
        let idx = self.index();
        if !numbered && idx <= 26 {
            out.push((b'a' + (idx as u8 - 1)) as char);
        } else {
            out.push('a');
            out.push_str(&idx.to_string());
        }
        if !self.is_positive() {
            out.push_str("^-1");
        }
    }
}

impl std::fmt::Debug for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        self.write_name(&mut s, false);
        f.write_str(&s)
    }
}

/// A freely reduced word over `A^{+-1}`. The reduced form is enforced by
/// every constructor, so two `Word`s are equal iff they are the same group
/// element of the free group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word { letters: Vec::new() }
    }

    /// Freely reduce an arbitrary letter sequence. Stack-based single pass.
    pub fn from_raw<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
        let iter = raw.into_iter();
        let mut stack: Vec<Letter> = Vec::with_capacity(iter.size_hint().0);
        for l in iter {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { letters: stack }
    }

    /// Wrap a sequence that is already freely reduced.
    ///
    /// Panics when the invariant does not hold; use `from_raw` for
    /// untrusted input.
    pub fn from_reduced(letters: Vec<Letter>) -> Word {
        assert!(
            letters.windows(2).all(|w| w[0] != w[1].inverse()),
            "letter sequence is not freely reduced"
        );
        Word { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// Largest generator index used; 0 for the empty word.
    pub fn max_index(&self) -> usize {
        self.letters.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Product in the free group (concatenate, then reduce the junction).
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last() == Some(&l.inverse()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Strip matching first/last inverse pairs until none remain.
    pub fn cyclically_reduce(&self) -> Word {
        let mut lo = 0;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo] == self.letters[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        Word {
            letters: self.letters[lo..hi].to_vec(),
        }
    }

    /// Space-separated form, alphabetic names when the index allows
    /// (`a b^-1`); larger indices fall back to `a27` style.
    pub fn to_spaced(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            l.write_name(&mut out, false);
        }
        out
    }

    /// Space-separated numbered form: `a1 a2^-1 a1`.
    pub fn to_numbered(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            l.write_name(&mut out, true);
        }
        out
    }

    /// Compact form for rank <= 26: lower case for generators, upper case
    /// for inverses (`aB` = `a1 a2^-1`).
    pub fn to_compact(&self) -> String {
        self.letters
            .iter()
            .map(|l| {
                let c = b'a' + (l.index() as u8 - 1);
                if l.is_positive() {
                    c as char
                } else {
                    c.to_ascii_uppercase() as char
                }
            })
            .collect()
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_spaced())
    }
}

impl std::fmt::Debug for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Word({})", self.to_spaced())
    }
}

/// Parse a word in any of the supported text forms and validate it against
/// rank `m`. Accepts the spaced forms (`a b^-1`, `a1 a2^-1`) and the compact
/// form (`aB`). The input need not be reduced; it is reduced on the way in.
pub fn parse_word(text: &str, m: usize) -> Result<Word> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Word::empty());
    }
    let mut raw = Vec::new();
    if text.contains(char::is_whitespace) || text.contains('^') || text.contains(char::is_numeric) {
        for tok in text.split_whitespace() {
            raw.push(parse_token(tok, m)?);
        }
    } else {
        for c in text.chars() {
            raw.push(parse_compact_char(c, m)?);
        }
    }
    Ok(Word::from_raw(raw))
}

fn parse_token(tok: &str, m: usize) -> Result<Letter> {
    let (body, positive) = match tok.strip_suffix("^-1") {
        Some(b) => (b, false),
        None => (tok, true),
    };
    let mut chars = body.chars();
    let head = chars
        .next()
        .ok_or_else(|| Error::Parse(format!("empty letter token in {tok:?}")))?;
    let rest: String = chars.collect();
    let index = if rest.is_empty() {
        if !head.is_ascii_lowercase() {
            return Err(Error::Parse(format!("bad letter token {tok:?}")));
        }
        (head as u8 - b'a') as usize + 1
    } else {
        if head != 'a' {
            return Err(Error::Parse(format!("bad letter token {tok:?}")));
        }
        rest.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad generator index in {tok:?}")))?
    };
    if index == 0 || index > m {
        return Err(Error::RankMismatch { rank: m, found: index });
    }
    Ok(Letter::new(index, positive))
}

fn parse_compact_char(c: char, m: usize) -> Result<Letter> {
    let (index, positive) = if c.is_ascii_lowercase() {
        ((c as u8 - b'a') as usize + 1, true)
    } else if c.is_ascii_uppercase() {
        ((c as u8 - b'A') as usize + 1, false)
    } else {
        return Err(Error::Parse(format!("bad compact letter {c:?}")));
    };
    if index > m {
        return Err(Error::RankMismatch { rank: m, found: index });
    }
    Ok(Letter::new(index, positive))
}

/// Freely reduce a raw letter sequence. Alias for `Word::from_raw` under the
/// operation's own name.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    Word::from_raw(raw)
}

/// A surjective homomorphism from the rank-`m` free group onto the integers,
/// given by the images of the positive generators. Carries its derived data:
/// the peak value `C` over all signed letters and the distinguished letter
/// attaining it (lowest index wins ties).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhiSpec {
    images: Vec<i64>,
    peak: i64,
    distinguished: Letter,
}

impl PhiSpec {
    /// `images[i]` is the image of `a_{i+1}`. Fails unless the images
    /// generate all of the integers (gcd 1).
    pub fn new(images: Vec<i64>) -> Result<PhiSpec> {
        if images.is_empty() {
            return Err(Error::Domain("phi needs at least one generator image".into()));
        }
        let g = images.iter().fold(0u64, |acc, &v| gcd(acc, v.unsigned_abs()));
        if g != 1 {
            return Err(Error::Domain(format!(
                "phi images {images:?} have gcd {g}, not onto the integers"
            )));
        }
        let peak = images.iter().map(|v| v.abs()).max().unwrap();
        let idx = images
            .iter()
            .position(|v| v.abs() == peak)
            .expect("peak is attained");
        let distinguished = Letter::new(idx + 1, images[idx] > 0);
        Ok(PhiSpec {
            images,
            peak,
            distinguished,
        })
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[i64] {
        &self.images
    }

    /// `C`: the maximum of phi over the signed letters. Always >= 1.
    pub fn peak(&self) -> i64 {
        self.peak
    }

    /// The signed letter `a` with `phi(a) = C`.
    pub fn distinguished(&self) -> Letter {
        self.distinguished
    }

    pub fn letter_value(&self, l: Letter) -> i64 {
        self.images[l.index() - 1] * l.sign()
    }

    /// Evaluate phi on a word. Invariant under free reduction by linearity.
    pub fn eval(&self, w: &Word) -> Result<i64> {
        let found = w.max_index();
        if found > self.rank() {
            return Err(Error::RankMismatch {
                rank: self.rank(),
                found,
            });
        }
        Ok(w.letters().iter().map(|&l| self.letter_value(l)).sum())
    }

    /// The good-word predicate: freely reduced (guaranteed by `Word`),
    /// nonempty, starts with the distinguished letter, does not end with its
    /// inverse, and has positive phi value. Words over a larger rank are
    /// never good.
    pub fn is_good(&self, w: &Word) -> bool {
        if w.max_index() > self.rank() {
            return false;
        }
        let Some(first) = w.first() else { return false };
        first == self.distinguished
            && w.last() != Some(self.distinguished.inverse())
            && self.eval(w).expect("rank checked") > 0
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Visit every freely reduced word of exactly `len` letters over rank `m`,
/// in lexicographic order. The slice passed to `f` is reused between calls.
pub fn for_each_reduced_word<F: FnMut(&[Letter])>(m: usize, len: usize, f: &mut F) {
    let mut scratch = Vec::with_capacity(len);
    descend(m, len, &mut scratch, f);
}

fn descend<F: FnMut(&[Letter])>(m: usize, len: usize, scratch: &mut Vec<Letter>, f: &mut F) {
    if scratch.len() == len {
        f(scratch);
        return;
    }
    let forbidden = scratch.last().map(|l| l.inverse());
    for l in Letter::all(m) {
        if Some(l) == forbidden {
            continue;
        }
        scratch.push(l);
        descend(m, len, scratch, f);
        scratch.pop();
    }
}

/// All good words of length `k`, in lexicographic order.
pub fn enumerate_good(phi: &PhiSpec, k: usize) -> Result<Vec<Word>> {
    if k == 0 {
        return Err(Error::Domain("good words have length >= 1".into()));
    }
    let mut out = Vec::new();
    visit_good(phi, k, &mut |letters| {
        out.push(Word::from_reduced(letters.to_vec()))
    });
    Ok(out)
}

/// `d_k` without materializing the words.
pub fn count_good(phi: &PhiSpec, k: usize) -> Result<u64> {
    if k == 0 {
        return Err(Error::Domain("good words have length >= 1".into()));
    }
    let mut n = 0u64;
    visit_good(phi, k, &mut |_| n += 1);
    Ok(n)
}

fn visit_good<F: FnMut(&[Letter])>(phi: &PhiSpec, k: usize, f: &mut F) {
    let a = phi.distinguished();
    let mut scratch = vec![a];
    let value = phi.letter_value(a);
    descend_good(phi, k, value, &mut scratch, f);
}

fn descend_good<F: FnMut(&[Letter])>(
    phi: &PhiSpec,
    k: usize,
    value: i64,
    scratch: &mut Vec<Letter>,
    f: &mut F,
) {
    if scratch.len() == k {
        if value > 0 && *scratch.last().unwrap() != phi.distinguished().inverse() {
            f(scratch);
        }
        return;
    }
    let forbidden = scratch.last().unwrap().inverse();
    for l in Letter::all(phi.rank()) {
        if l == forbidden {
            continue;
        }
        scratch.push(l);
        descend_good(phi, k, value + phi.letter_value(l), scratch, f);
        scratch.pop();
    }
}

/// Number of freely reduced words of exactly `len` letters over rank `m`:
/// 1 for the empty word, otherwise `2m(2m-1)^(len-1)`. Exact, with overflow
/// reported rather than wrapped.
pub fn count_reduced(m: usize, len: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::Domain("rank must be >= 1".into()));
    }
    if len == 0 {
        return Ok(1);
    }
    let two_m = 2u64 * m as u64;
    let mut n = two_m;
    for _ in 1..len {
        n = n
            .checked_mul(two_m - 1)
            .ok_or(Error::Overflow { context: "count_reduced" })?;
    }
    Ok(n)
}
