//! Combinatorics of the n-punctured sphere: the pair-twist generating
//! family, twist words, and the sigma-to-tau rewriting.
//!
//! Generators c_1..c_n of the fundamental group satisfy c_1...c_n = 1. The
//! pure mapping class group is generated by the Dehn twists tau_{i,j} along
//! the curves (c_i...c_j)^-1 for 1 <= i < j <= n-1, excluding (1, n-1)
//! (that twist is trivial). Words act leftmost-letter-first.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("puncture count {n} admits no nontrivial pure mapping class action (need n >= 4)")]
    TrivialGroup { n: usize },
    #[error("invalid twist indices ({i},{j}) for n = {n}: need 1 <= i < j <= n-1")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("tau(1,{j}) is trivial for n = {n} and is rejected")]
    TrivialTwist { j: usize, n: usize },
    #[error("word syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// The sphere with n punctures and its geometric presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpherePresentation {
    pub n: usize,
}

impl SpherePresentation {
    pub fn new(n: usize) -> Result<SpherePresentation, SurfaceError> {
        if n < 3 {
            return Err(SurfaceError::TrivialGroup { n });
        }
        Ok(SpherePresentation { n })
    }
}

/// The Dehn twist tau_{i,j} along the simple closed curve (c_i...c_j)^-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwistGen {
    pub i: usize,
    pub j: usize,
}

impl TwistGen {
    pub fn new(i: usize, j: usize, n: usize) -> Result<TwistGen, SurfaceError> {
        if !(1 <= i && i < j && j <= n - 1) {
            return Err(SurfaceError::IndexOutOfRange { i, j, n });
        }
        if i == 1 && j == n - 1 {
            return Err(SurfaceError::TrivialTwist { j, n });
        }
        Ok(TwistGen { i, j })
    }
}

impl fmt::Display for TwistGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t({},{})", self.i, self.j)
    }
}

/// One letter of a twist word: a generator with exponent +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistLetter {
    pub gen: TwistGen,
    pub inverse: bool,
}

/// A word in the tau-generators, applied leftmost-letter-first.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TwistWord {
    pub letters: Vec<TwistLetter>,
}

impl TwistWord {
    pub fn empty() -> TwistWord {
        TwistWord::default()
    }

    pub fn single(gen: TwistGen) -> TwistWord {
        TwistWord {
            letters: vec![TwistLetter {
                gen,
                inverse: false,
            }],
        }
    }

    pub fn push(&mut self, gen: TwistGen, inverse: bool) {
        self.letters.push(TwistLetter { gen, inverse });
    }

    pub fn extend(&mut self, other: &TwistWord) {
        self.letters.extend_from_slice(&other.letters);
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The formal inverse: letters reversed with exponents flipped.
    pub fn inverse(&self) -> TwistWord {
        TwistWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| TwistLetter {
                    gen: l.gen,
                    inverse: !l.inverse,
                })
                .collect(),
        }
    }
}

impl fmt::Display for TwistWord {
    /// Renders with run-length compressed exponents, e.g. "t(1,2)^2 t(1,3)".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut k = 0;
        let mut first = true;
        while k < self.letters.len() {
            let l = self.letters[k];
            let mut run = 1;
            while k + run < self.letters.len() && self.letters[k + run] == l {
                run += 1;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let exp: i64 = if l.inverse { -(run as i64) } else { run as i64 };
            if exp == 1 {
                write!(f, "{}", l.gen)?;
            } else {
                write!(f, "{}^{}", l.gen, exp)?;
            }
            k += run;
        }
        Ok(())
    }
}

/// The generating family {tau_{i,j} : 1 <= i < j <= n-1} minus the trivial
/// (1, n-1), in lexicographic order.
pub fn generator_set(n: usize) -> Result<Vec<TwistGen>, SurfaceError> {
    if n < 4 {
        return Err(SurfaceError::TrivialGroup { n });
    }
    let mut gens = Vec::new();
    for i in 1..n - 1 {
        for j in i + 1..n {
            if j > n - 1 || (i == 1 && j == n - 1) {
                continue;
            }
            gens.push(TwistGen { i, j });
        }
    }
    Ok(gens)
}

/// Parses the grammar `(t(i,j)[^k])*` (whitespace between tokens allowed;
/// integer exponent k defaults to 1 and may be negative).
pub fn parse_word(text: &str, n: usize) -> Result<TwistWord, SurfaceError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut word = TwistWord::empty();
    let syntax = |pos: usize, msg: &str| SurfaceError::Syntax {
        pos,
        msg: msg.to_string(),
    };
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let parse_int = |pos: &mut usize| -> Result<i64, SurfaceError> {
        let start = *pos;
        if *pos < bytes.len() && (bytes[*pos] == b'-' || bytes[*pos] == b'+') {
            *pos += 1;
        }
        let digits_start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == digits_start {
            return Err(syntax(start, "expected integer"));
        }
        text[start..*pos]
            .parse::<i64>()
            .map_err(|_| syntax(start, "integer out of range"))
    };
    loop {
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            break;
        }
        if bytes[pos] != b't' {
            return Err(syntax(pos, "expected 't'"));
        }
        pos += 1;
        skip_ws(&mut pos);
        if pos >= bytes.len() || bytes[pos] != b'(' {
            return Err(syntax(pos, "expected '('"));
        }
        pos += 1;
        skip_ws(&mut pos);
        let i = parse_int(&mut pos)?;
        skip_ws(&mut pos);
        if pos >= bytes.len() || bytes[pos] != b',' {
            return Err(syntax(pos, "expected ','"));
        }
        pos += 1;
        skip_ws(&mut pos);
        let j = parse_int(&mut pos)?;
        skip_ws(&mut pos);
        if pos >= bytes.len() || bytes[pos] != b')' {
            return Err(syntax(pos, "expected ')'"));
        }
        pos += 1;
        let mut exp: i64 = 1;
        let save = pos;
        skip_ws(&mut pos);
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            skip_ws(&mut pos);
            exp = parse_int(&mut pos)?;
        } else {
            pos = save;
        }
        if i < 1 || j < 1 {
            return Err(syntax(save, "indices must be positive"));
        }
        let gen = TwistGen::new(i as usize, j as usize, n)?;
        let inverse = exp < 0;
        for _ in 0..exp.unsigned_abs() {
            word.push(gen, inverse);
        }
    }
    Ok(word)
}

/// Rewrites the half-twist sigma_{i,j} as a word in the tau-generators via
/// the relation tau_{i,j} = (sigma_{i,i+1}...sigma_{i,j}) (sigma_{i+1,i+2}
/// ...sigma_{i+1,j}) ... (sigma_{j-1,j}), solved recursively for
/// sigma_{i,j}; the base case is sigma_{i,i+1} = tau_{i,i+1}. The factor
/// tau_{1,n-1}, when it appears, is trivial and is omitted.
pub fn sigma_to_tau(i: usize, j: usize, n: usize) -> Result<TwistWord, SurfaceError> {
    if !(1 <= i && i < j && j <= n - 1) {
        return Err(SurfaceError::IndexOutOfRange { i, j, n });
    }
    if j == i + 1 {
        if i == 1 && j == n - 1 {
            // sigma_{1,2} with n = 3; the twist is trivial.
            return Ok(TwistWord::empty());
        }
        return Ok(TwistWord::single(TwistGen::new(i, j, n)?));
    }
    // tau_{i,j} = P sigma_{i,j} R with P = sigma_{i,i+1}...sigma_{i,j-1}
    // and R = prod_{k=i+1..j-1} (sigma_{k,k+1}...sigma_{k,j}), so
    // sigma_{i,j} = P^-1 tau_{i,j} R^-1.
    let mut p = TwistWord::empty();
    for m in i + 1..j {
        p.extend(&sigma_to_tau(i, m, n)?);
    }
    let mut r = TwistWord::empty();
    for k in i + 1..j {
        for m in k + 1..=j {
            r.extend(&sigma_to_tau(k, m, n)?);
        }
    }
    let mut word = p.inverse();
    if !(i == 1 && j == n - 1) {
        word.push(TwistGen::new(i, j, n)?, false);
    }
    word.extend(&r.inverse());
    Ok(word)
}
