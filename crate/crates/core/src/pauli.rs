//! Bit-packed Pauli strings.
//!
//! Qubit `k` (1-based) occupies bits `2k-2` (x component) and `2k-1`
//! (z component) of a little-endian array of 64-bit words, so 32 qubits fit
//! in a word. A single-qubit operator is `i^(x*z) X^x Z^z`, which gives
//! `I = (0,0)`, `X = (1,0)`, `Z = (0,1)` and `Y = (1,1)`. The two-bit index
//! notation `I = 00, X = 01, Y = 10, Z = 11` is available through
//! [`PauliString::index_code`] and [`PauliString::from_index_codes`].
//!
//! Dense matrices use qubit 1 as the leftmost tensor factor, i.e. qubit `k`
//! of an `n`-qubit string maps to bit `n - k` of the computational basis
//! index.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::dense::{check_dense, C64};
use crate::error::{Error, Result};

const X_BITS: u64 = 0x5555_5555_5555_5555;
const QUBITS_PER_WORD: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A power of `i`, stored as the exponent mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(e: i64) -> Self {
        Phase(e.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    words: Vec<u64>,
}

/// A Pauli string with a phase in `{+1, -1, +i, -i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase: Phase,
    pub string: PauliString,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            n,
            words: vec![0; n.div_ceil(QUBITS_PER_WORD)],
        }
    }

    pub fn from_paulis(ops: &[Pauli]) -> Self {
        let mut s = Self::identity(ops.len());
        for (k, &p) in ops.iter().enumerate() {
            s.put(k, p);
        }
        s
    }

    /// `op` on a single (1-based) qubit, identity elsewhere.
    pub fn single(n: usize, qubit: usize, op: Pauli) -> Result<Self> {
        let mut s = Self::identity(n);
        s.set(qubit, op)?;
        Ok(s)
    }

    /// Builds a string from `(qubit, op)` pairs on `n` qubits.
    pub fn from_sparse(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n);
        for &(q, p) in ops {
            s.set(q, p)?;
        }
        Ok(s)
    }

    /// Builds a string from two-bit index codes (`0 = I, 1 = X, 2 = Y, 3 = Z`), qubit 1 first.
    pub fn from_index_codes(codes: &[u8]) -> Result<Self> {
        let ops = codes
            .iter()
            .map(|&c| match c {
                0 => Ok(Pauli::I),
                1 => Ok(Pauli::X),
                2 => Ok(Pauli::Y),
                3 => Ok(Pauli::Z),
                _ => Err(Error::InvalidArgument(format!("Pauli index code {c} > 3"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_paulis(&ops))
    }

    /// Enumeration index in `0..4^n` using the internal packing; only for `n <= 32`.
    pub fn from_ordinal(n: usize, ordinal: u64) -> Self {
        assert!(
            n <= QUBITS_PER_WORD,
            "ordinal enumeration limited to 32 qubits"
        );
        let mut s = Self::identity(n);
        if n > 0 {
            let mask = if n == QUBITS_PER_WORD {
                u64::MAX
            } else {
                (1u64 << (2 * n)) - 1
            };
            s.words[0] = ordinal & mask;
        }
        s
    }

    /// All `4^n` strings, identity first.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        assert!(n <= 16, "exhaustive enumeration limited to 16 qubits");
        (0..(1u64 << (2 * n))).map(move |o| Self::from_ordinal(n, o))
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let ops: Vec<Pauli> = (0..n)
            .map(|_| match rng.random_range(0..4) {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect();
        Self::from_paulis(&ops)
    }

    /// A uniformly random non-identity string.
    pub fn random_nonidentity<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let s = Self::random(n, rng);
            if !s.is_identity() {
                return s;
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit == 0 || qubit > self.n {
            return Err(Error::QubitIndex {
                index: qubit,
                n: self.n,
            });
        }
        Ok(())
    }

    fn put(&mut self, k: usize, op: Pauli) {
        let (x, z) = op.bits();
        let w = k / QUBITS_PER_WORD;
        let shift = 2 * (k % QUBITS_PER_WORD);
        self.words[w] &= !(0b11 << shift);
        self.words[w] |= ((x as u64) | ((z as u64) << 1)) << shift;
    }

    fn at(&self, k: usize) -> Pauli {
        let w = self.words[k / QUBITS_PER_WORD] >> (2 * (k % QUBITS_PER_WORD));
        Pauli::from_bits(w & 1 == 1, w & 2 == 2)
    }

    pub fn get(&self, qubit: usize) -> Result<Pauli> {
        self.check_qubit(qubit)?;
        Ok(self.at(qubit - 1))
    }

    pub fn set(&mut self, qubit: usize, op: Pauli) -> Result<()> {
        self.check_qubit(qubit)?;
        self.put(qubit - 1, op);
        Ok(())
    }

    pub fn with(mut self, qubit: usize, op: Pauli) -> Result<Self> {
        self.set(qubit, op)?;
        Ok(self)
    }

    /// Two-bit index code of the operator on `qubit`: `0 = I, 1 = X, 2 = Y, 3 = Z`.
    pub fn index_code(&self, qubit: usize) -> Result<u8> {
        Ok(match self.get(qubit)? {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        })
    }

    pub fn ops(&self) -> Vec<Pauli> {
        (0..self.n).map(|k| self.at(k)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words
            .iter()
            .map(|&w| ((w | (w >> 1)) & X_BITS).count_ones() as usize)
            .sum()
    }

    /// 1-based qubits on which the string acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&k| self.at(k) != Pauli::I)
            .map(|k| k + 1)
            .collect()
    }

    pub fn acts_on(&self, qubit: usize) -> bool {
        qubit >= 1 && qubit <= self.n && self.at(qubit - 1) != Pauli::I
    }

    /// Places this string on qubits `offset+1 ..= offset+n` of an `m`-qubit register.
    pub fn embed(&self, m: usize, offset: usize) -> Result<Self> {
        if offset + self.n > m {
            return Err(Error::SizeMismatch {
                left: offset + self.n,
                right: m,
            });
        }
        let mut out = Self::identity(m);
        for k in 0..self.n {
            out.put(offset + k, self.at(k));
        }
        Ok(out)
    }

    /// Restricts to qubits `offset+1 ..= offset+len`.
    pub fn slice(&self, offset: usize, len: usize) -> Result<Self> {
        if offset + len > self.n {
            return Err(Error::SizeMismatch {
                left: offset + len,
                right: self.n,
            });
        }
        let mut out = Self::identity(len);
        for k in 0..len {
            out.put(k, self.at(offset + k));
        }
        Ok(out)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Product `self * other` with its exact phase.
    pub fn mul(&self, other: &Self) -> Result<PhasedPauli> {
        self.check_same(other)?;
        let mut exponent: i64 = 0;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| {
                let c = a ^ b;
                let (xa, za) = (a & X_BITS, (a >> 1) & X_BITS);
                let (xb, zb) = (b & X_BITS, (b >> 1) & X_BITS);
                let (xc, zc) = (c & X_BITS, (c >> 1) & X_BITS);
                exponent += (xa & za).count_ones() as i64 + (xb & zb).count_ones() as i64
                    - (xc & zc).count_ones() as i64
                    + 2 * (za & xb).count_ones() as i64;
                c
            })
            .collect();
        Ok(PhasedPauli {
            phase: Phase::from_exponent(exponent),
            string: PauliString { n: self.n, words },
        })
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        let overlap: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| {
                let (xa, za) = (a & X_BITS, (a >> 1) & X_BITS);
                let (xb, zb) = (b & X_BITS, (b >> 1) & X_BITS);
                (xa & zb).count_ones() + (za & xb).count_ones()
            })
            .sum();
        Ok(overlap % 2 == 0)
    }

    /// Basis-index masks `(x, z)` and the phase exponent `#Y` such that
    /// `sigma |j> = i^y (-1)^{popcount(z & j)} |j ^ x>`.
    pub fn basis_masks(&self) -> (usize, usize, u8) {
        assert!(
            self.n < usize::BITS as usize,
            "basis masks need n < word size"
        );
        let (mut xm, mut zm, mut ys) = (0usize, 0usize, 0u8);
        for k in 0..self.n {
            let bit = 1usize << (self.n - 1 - k);
            match self.at(k) {
                Pauli::I => {}
                Pauli::X => xm |= bit,
                Pauli::Z => zm |= bit,
                Pauli::Y => {
                    xm |= bit;
                    zm |= bit;
                    ys += 1;
                }
            }
        }
        (xm, zm, ys % 4)
    }

    /// Writes `sigma * input` into `out`; both have length `2^n`.
    pub fn apply(&self, input: &[C64], out: &mut [C64]) {
        let (xm, zm, ys) = self.basis_masks();
        let base = Phase(ys).to_complex();
        let neg = -base;
        for (k, o) in out.iter_mut().enumerate() {
            let j = k ^ xm;
            let ph = if (zm & j).count_ones() % 2 == 0 {
                base
            } else {
                neg
            };
            *o = ph * input[j];
        }
    }

    /// Dense `2^n x 2^n` matrix, qubit 1 as the leftmost factor.
    pub fn matrix(&self) -> Result<DMatrix<Complex64>> {
        check_dense(self.n)?;
        let dim = 1usize << self.n;
        let (xm, zm, ys) = self.basis_masks();
        let base = Phase(ys).to_complex();
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let ph = if (zm & j).count_ones() % 2 == 0 {
                base
            } else {
                -base
            };
            m[(j ^ xm, j)] = ph;
        }
        Ok(m)
    }
}

impl PhasedPauli {
    pub fn new(phase: Phase, string: PauliString) -> Self {
        PhasedPauli { phase, string }
    }

    pub fn mul(&self, other: &PhasedPauli) -> Result<PhasedPauli> {
        let p = self.string.mul(&other.string)?;
        Ok(PhasedPauli {
            phase: self.phase * other.phase * p.phase,
            string: p.string,
        })
    }
}

pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PhasedPauli> {
    a.mul(b)
}

pub fn pauli_matrix(b: &PauliString) -> Result<DMatrix<Complex64>> {
    b.matrix()
}

pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes(b)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.n {
            write!(f, "{}", self.at(k).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.phase, self.string)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .enumerate()
            .map(|(i, c)| {
                Pauli::from_letter(c).ok_or_else(|| Error::Parse {
                    line: 1,
                    column: i + 1,
                    message: format!("invalid Pauli letter '{c}'"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "empty Pauli string".into(),
            });
        }
        Ok(Self::from_paulis(&ops))
    }
}
