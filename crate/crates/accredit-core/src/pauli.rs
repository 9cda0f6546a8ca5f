//! Exact symbolic algebra for Pauli strings and real-weighted Pauli sums.
//!
//! Phases are restricted to the fourth roots of unity and tracked as an
//! exponent of `i`, so every product and conjugation is exact. Weighted sums
//! keep a canonical term order (lexicographic over letter sequences) with
//! duplicate sequences merged on insert, which makes equality tests
//! deterministic.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{C64, CMat};

/// Qubit-count cap for dense matrix realization (`2^N x 2^N` output).
pub const MATRIX_QUBIT_CAP: usize = 12;

/// Coefficients with absolute value at or below this merge threshold are
/// dropped from weighted sums.
pub const COEFF_MERGE_TOL: f64 = 1e-12;

/// A single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// All four letters, in canonical order.
    pub const ALL: [PauliLetter; 4] = [
        PauliLetter::I,
        PauliLetter::X,
        PauliLetter::Y,
        PauliLetter::Z,
    ];

    pub fn is_identity(self) -> bool {
        self == PauliLetter::I
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(PauliLetter::I),
            'X' | 'x' => Some(PauliLetter::X),
            'Y' | 'y' => Some(PauliLetter::Y),
            'Z' | 'z' => Some(PauliLetter::Z),
            _ => None,
        }
    }

    /// Product `self * other` as `(phase, letter)` with `phase` a power of i.
    #[allow(clippy::should_implement_trait)] // the product carries a phase
    pub fn mul(self, other: PauliLetter) -> (Phase, PauliLetter) {
        use PauliLetter::*;
        match (self, other) {
            (I, b) => (Phase::ONE, b),
            (a, I) => (Phase::ONE, a),
            (a, b) if a == b => (Phase::ONE, I),
            // XY = iZ, YZ = iX, ZX = iY; reversed order picks up -i.
            (X, Y) => (Phase::PLUS_I, Z),
            (Y, Z) => (Phase::PLUS_I, X),
            (Z, X) => (Phase::PLUS_I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }

    /// Dense 2x2 realization.
    pub fn matrix(self) -> CMat {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            PauliLetter::I => CMat::from_row_slice(2, 2, &[l, o, o, l]),
            PauliLetter::X => CMat::from_row_slice(2, 2, &[o, l, l, o]),
            PauliLetter::Y => CMat::from_row_slice(2, 2, &[o, -i, i, o]),
            PauliLetter::Z => CMat::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }
}

impl fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A fourth root of unity, stored as the exponent `k` in `i^k`.
///
/// Products that would leave this set cannot occur in Pauli algebra; the
/// representation makes that structural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u8) -> Phase {
        Phase(k % 4)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    /// Complex conjugate, i.e. the inverse.
    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn negated(self) -> Phase {
        Phase((self.0 + 2) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// The phase as a real sign, for phases in `{+1, -1}`.
    pub fn real_sign(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn as_c64(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

impl core::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "+1"),
            1 => write!(f, "+i"),
            2 => write!(f, "-1"),
            _ => write!(f, "-i"),
        }
    }
}

/// Errors from Pauli-algebra operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    /// Two operands act on registers of different sizes.
    LengthMismatch { left: usize, right: usize },
    /// A dense realization was requested beyond [`MATRIX_QUBIT_CAP`].
    MatrixCapExceeded { qubits: usize, cap: usize },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::LengthMismatch { left, right } => {
                write!(f, "pauli operands have different lengths: {left} vs {right}")
            }
            AlgebraError::MatrixCapExceeded { qubits, cap } => {
                write!(f, "matrix realization of {qubits} qubits exceeds cap {cap}")
            }
        }
    }
}

impl core::error::Error for AlgebraError {}

/// Conjugation of one Pauli letter by another: `by * target * by†`.
///
/// The result is `(-1, target)` when both letters are non-identity and
/// distinct, and `(+1, target)` otherwise.
pub fn conjugate_letter(target: PauliLetter, by: PauliLetter) -> (f64, PauliLetter) {
    if !target.is_identity() && !by.is_identity() && target != by {
        (-1.0, target)
    } else {
        (1.0, target)
    }
}

/// A phase times a tensor product of single-qubit Pauli letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub phase: Phase,
    pub letters: Vec<PauliLetter>,
}

impl PauliString {
    pub fn identity(len: usize) -> Self {
        PauliString {
            phase: Phase::ONE,
            letters: alloc::vec![PauliLetter::I; len],
        }
    }

    pub fn new(phase: Phase, letters: Vec<PauliLetter>) -> Self {
        PauliString { phase, letters }
    }

    /// Phase-free string from a letter sequence.
    pub fn from_letters(letters: Vec<PauliLetter>) -> Self {
        PauliString {
            phase: Phase::ONE,
            letters,
        }
    }

    /// Single non-identity letter at 1-based `qubit` on a register of `len`.
    pub fn single(letter: PauliLetter, qubit: usize, len: usize) -> Self {
        assert!(qubit >= 1 && qubit <= len, "qubit index out of range");
        let mut letters = alloc::vec![PauliLetter::I; len];
        letters[qubit - 1] = letter;
        PauliString::from_letters(letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.phase == Phase::ONE && self.letters.iter().all(|l| l.is_identity())
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|l| !l.is_identity()).count()
    }

    /// Product `self * other` with exact phase tracking.
    #[allow(clippy::should_implement_trait)] // fallible: lengths must match
    pub fn mul(&self, other: &PauliString) -> Result<PauliString, AlgebraError> {
        if self.len() != other.len() {
            return Err(AlgebraError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let mut phase = self.phase * other.phase;
        let letters = self
            .letters
            .iter()
            .zip(other.letters.iter())
            .map(|(&a, &b)| {
                let (p, l) = a.mul(b);
                phase = phase * p;
                l
            })
            .collect();
        Ok(PauliString { phase, letters })
    }

    /// Hermitian adjoint: conjugates the phase, letters are self-adjoint.
    pub fn adjoint(&self) -> PauliString {
        PauliString {
            phase: self.phase.conj(),
            letters: self.letters.clone(),
        }
    }

    /// Conjugation `by * self * by†`, tracked exactly.
    ///
    /// Pauli conjugation never changes the letter sequence; it only flips the
    /// sign once per position where both letters are non-identity and differ.
    pub fn conjugated_by(&self, by: &PauliString) -> Result<PauliString, AlgebraError> {
        if self.len() != by.len() {
            return Err(AlgebraError::LengthMismatch {
                left: self.len(),
                right: by.len(),
            });
        }
        let mut sign = 1.0f64;
        for (&t, &b) in self.letters.iter().zip(by.letters.iter()) {
            sign *= conjugate_letter(t, b).0;
        }
        let phase = if sign < 0.0 {
            self.phase.negated()
        } else {
            self.phase
        };
        Ok(PauliString {
            phase,
            letters: self.letters.clone(),
        })
    }

    /// Dense `2^N x 2^N` realization, phase included.
    pub fn to_matrix(&self) -> Result<CMat, AlgebraError> {
        if self.len() > MATRIX_QUBIT_CAP {
            return Err(AlgebraError::MatrixCapExceeded {
                qubits: self.len(),
                cap: MATRIX_QUBIT_CAP,
            });
        }
        let mut m = CMat::identity(1, 1);
        for &l in &self.letters {
            m = m.kronecker(&l.matrix());
        }
        Ok(m * self.phase.as_c64())
    }

    /// Letter sequence as a string like `XIZ`.
    pub fn letters_string(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.phase, self.letters_string())
    }
}

/// One canonical term of a weighted Pauli sum.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTerm {
    pub coefficient: f64,
    pub letters: Vec<PauliLetter>,
}

/// A Hamiltonian as a real-weighted list of Pauli letter sequences.
///
/// Real coefficients keep the operator Hermitian by construction. Terms are
/// kept sorted lexicographically and merged, so two sums built in different
/// orders compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPauliSum {
    qubit_count: usize,
    terms: Vec<WeightedTerm>,
}

impl WeightedPauliSum {
    pub fn new(qubit_count: usize) -> Self {
        assert!(qubit_count > 0, "qubit_count must be positive");
        WeightedPauliSum {
            qubit_count,
            terms: Vec::new(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn terms(&self) -> &[WeightedTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Insert `coefficient * letters`, merging with an existing term of the
    /// same letter sequence. Terms whose merged coefficient falls inside the
    /// merge tolerance are dropped.
    pub fn add_term(
        &mut self,
        coefficient: f64,
        letters: Vec<PauliLetter>,
    ) -> Result<(), AlgebraError> {
        if letters.len() != self.qubit_count {
            return Err(AlgebraError::LengthMismatch {
                left: self.qubit_count,
                right: letters.len(),
            });
        }
        match self.terms.binary_search_by(|t| t.letters.cmp(&letters)) {
            Ok(pos) => {
                self.terms[pos].coefficient += coefficient;
                if self.terms[pos].coefficient.abs() <= COEFF_MERGE_TOL {
                    self.terms.remove(pos);
                }
            }
            Err(pos) => {
                if coefficient.abs() > COEFF_MERGE_TOL {
                    self.terms.insert(
                        pos,
                        WeightedTerm {
                            coefficient,
                            letters,
                        },
                    );
                }
            }
        }
        Ok(())
    }

    /// Term-by-term conjugation `by * H * by†` with merged duplicates.
    ///
    /// Since Pauli conjugation preserves letter sequences and only flips
    /// signs, the result stays real-weighted (Hermitian) exactly.
    pub fn conjugated_by(&self, by: &PauliString) -> Result<WeightedPauliSum, AlgebraError> {
        if by.len() != self.qubit_count {
            return Err(AlgebraError::LengthMismatch {
                left: self.qubit_count,
                right: by.len(),
            });
        }
        let mut out = WeightedPauliSum::new(self.qubit_count);
        for term in &self.terms {
            let mut sign = 1.0f64;
            for (&t, &b) in term.letters.iter().zip(by.letters.iter()) {
                sign *= conjugate_letter(t, b).0;
            }
            out.add_term(sign * term.coefficient, term.letters.clone())?;
        }
        Ok(out)
    }

    /// The negated sum.
    pub fn negated(&self) -> WeightedPauliSum {
        WeightedPauliSum {
            qubit_count: self.qubit_count,
            terms: self
                .terms
                .iter()
                .map(|t| WeightedTerm {
                    coefficient: -t.coefficient,
                    letters: t.letters.clone(),
                })
                .collect(),
        }
    }

    /// Dense Hermitian realization `sum_k c_k (⊗_j letters_kj)`.
    pub fn to_matrix(&self) -> Result<CMat, AlgebraError> {
        if self.qubit_count > MATRIX_QUBIT_CAP {
            return Err(AlgebraError::MatrixCapExceeded {
                qubits: self.qubit_count,
                cap: MATRIX_QUBIT_CAP,
            });
        }
        let dim = 1usize << self.qubit_count;
        let mut m = CMat::zeros(dim, dim);
        for term in &self.terms {
            let s = PauliString::from_letters(term.letters.clone());
            m += s.to_matrix()? * C64::new(term.coefficient, 0.0);
        }
        Ok(m)
    }

    /// Parse the textual fixture format: one `<coeff> <letters>` term per
    /// line, `#` starts a comment, blank lines ignored. All letter sequences
    /// must have equal length.
    pub fn parse_text(input: &str) -> Result<WeightedPauliSum, SumParseError> {
        let mut parsed: Vec<(f64, Vec<PauliLetter>)> = Vec::new();
        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let coeff_src = parts.next().expect("non-empty line has a first token");
            let letters_src = parts.next().ok_or(SumParseError {
                line: line_no,
                kind: SumParseErrorKind::MissingLetters,
            })?;
            if parts.next().is_some() {
                return Err(SumParseError {
                    line: line_no,
                    kind: SumParseErrorKind::TrailingTokens,
                });
            }
            let coefficient: f64 = coeff_src.parse().map_err(|_| SumParseError {
                line: line_no,
                kind: SumParseErrorKind::BadCoefficient,
            })?;
            let letters: Vec<PauliLetter> = letters_src
                .chars()
                .map(PauliLetter::from_char)
                .collect::<Option<_>>()
                .ok_or(SumParseError {
                    line: line_no,
                    kind: SumParseErrorKind::BadLetter,
                })?;
            parsed.push((coefficient, letters));
        }
        let qubit_count = match parsed.first() {
            Some((_, letters)) => letters.len(),
            None => {
                return Err(SumParseError {
                    line: 0,
                    kind: SumParseErrorKind::Empty,
                })
            }
        };
        let mut sum = WeightedPauliSum::new(qubit_count);
        for (idx, (coefficient, letters)) in parsed.into_iter().enumerate() {
            sum.add_term(coefficient, letters).map_err(|_| SumParseError {
                line: idx + 1,
                kind: SumParseErrorKind::LengthMismatch,
            })?;
        }
        Ok(sum)
    }
}

impl fmt::Display for WeightedPauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            let letters: String = t.letters.iter().map(|l| l.as_char()).collect();
            if t.coefficient >= 0.0 && k > 0 {
                write!(f, "+{} {letters}", t.coefficient)?;
            } else {
                write!(f, "{} {letters}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

/// Parse failure for the textual Pauli-sum format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumParseError {
    /// 1-based source line (0 for whole-file problems).
    pub line: usize,
    pub kind: SumParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SumParseErrorKind {
    Empty,
    MissingLetters,
    TrailingTokens,
    BadCoefficient,
    BadLetter,
    LengthMismatch,
}

impl fmt::Display for SumParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            SumParseErrorKind::Empty => "no terms in input",
            SumParseErrorKind::MissingLetters => "expected `<coeff> <letters>`",
            SumParseErrorKind::TrailingTokens => "unexpected tokens after letters",
            SumParseErrorKind::BadCoefficient => "coefficient is not a real number",
            SumParseErrorKind::BadLetter => "letters must be drawn from I, X, Y, Z",
            SumParseErrorKind::LengthMismatch => "letter sequence length differs from first term",
        };
        if self.line == 0 {
            write!(f, "pauli sum: {what}")
        } else {
            write!(f, "pauli sum line {}: {what}", self.line)
        }
    }
}

impl core::error::Error for SumParseError {}
