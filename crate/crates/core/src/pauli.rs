//! N-qubit Pauli operators over F₂ bitmasks, graph-state vertex stabilizers
//! and their support partitions.
//!
//! A [`PauliString`] is `phase · ⊗_k σ_k` where qubit `k` carries `X` when only
//! its x-bit is set, `Z` when only its z-bit is set, `Y` when both are set
//! and `I` otherwise. `Y` is the Hermitian Pauli, not the product `XZ`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::dense::DenseState;
use crate::error::{MetroError, Result};
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

/// Global phase `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_power(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn power(self) -> i64 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Phase::PlusOne => "+",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.power() + rhs.power())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    /// Cyclic successor X → Y → Z → X; identity maps to itself.
    pub fn next(self) -> Self {
        match self {
            PauliLetter::X => PauliLetter::Y,
            PauliLetter::Y => PauliLetter::Z,
            PauliLetter::Z => PauliLetter::X,
            PauliLetter::I => PauliLetter::I,
        }
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
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }
}

impl fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: VertexSet,
    z: VertexSet,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: VertexSet::empty(n),
            z: VertexSet::empty(n),
            phase: Phase::PlusOne,
        }
    }

    pub fn from_masks(x: VertexSet, z: VertexSet, phase: Phase) -> Result<Self> {
        if x.universe() != z.universe() {
            return Err(MetroError::SizeMismatch {
                expected: x.universe(),
                found: z.universe(),
            });
        }
        Ok(Self {
            n: x.universe(),
            x,
            z,
            phase,
        })
    }

    /// A single-qubit Pauli embedded in `n` qubits.
    pub fn single(n: usize, qubit: usize, letter: PauliLetter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    /// The same letter on every qubit of `sites`.
    pub fn uniform(n: usize, sites: &VertexSet, letter: PauliLetter) -> Self {
        let mut p = Self::identity(n);
        for q in sites.iter() {
            p.set_letter(q, letter);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn x_mask(&self) -> &VertexSet {
        &self.x
    }
    pub fn z_mask(&self) -> &VertexSet {
        &self.z
    }
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn letter(&self, qubit: usize) -> PauliLetter {
        PauliLetter::from_bits(self.x.contains(qubit), self.z.contains(qubit))
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    pub fn set_letter(&mut self, qubit: usize, letter: PauliLetter) {
        let (x, z) = letter.bits();
        if x {
            self.x.insert(qubit)
        } else {
            self.x.remove(qubit)
        }
        if z {
            self.z.insert(qubit)
        } else {
            self.z.remove(qubit)
        }
    }

    pub fn support(&self) -> VertexSet {
        self.x.union(&self.z)
    }

    pub fn weight(&self) -> usize {
        self.support().len()
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(MetroError::SizeMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Exact product `self · other`, phase included.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        // Per qubit, cyclic pairs (XY, YZ, ZX) give +i, anti-cyclic give -i.
        let (x1, z1, x2, z2) = (&self.x, &self.z, &other.x, &other.z);
        let y1 = x1.intersection(z1);
        let y2 = x2.intersection(z2);
        let xo1 = x1.difference(z1);
        let xo2 = x2.difference(z2);
        let zo1 = z1.difference(x1);
        let zo2 = z2.difference(x2);
        let plus = xo1.intersection_len(&y2) + y1.intersection_len(&zo2) + zo1.intersection_len(&xo2);
        let minus = xo1.intersection_len(&zo2) + y1.intersection_len(&xo2) + zo1.intersection_len(&y2);
        let power = self.phase.power() + other.phase.power() + plus as i64 - minus as i64;
        Ok(Self {
            n: self.n,
            x: x1.symmetric_difference(x2),
            z: z1.symmetric_difference(z2),
            phase: Phase::from_power(power),
        })
    }

    /// Symplectic test: commute iff the anticommuting sites are even in number.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_size(other)?;
        let s = self.x.intersection_len(&other.z) + self.z.intersection_len(&other.x);
        Ok(s % 2 == 0)
    }

    /// Image of computational basis state `|b⟩`: `(coefficient, b')`.
    ///
    /// `P|b⟩ = phase · i^{|x∧z|} · (-1)^{|b∧z|} |b ⊕ x⟩`, qubit `k` ↔ bit `k`.
    pub fn act_on_basis(&self, b: usize) -> (Complex64, usize) {
        let x = self.x.to_mask().expect("dense action needs n ≤ 64") as usize;
        let z = self.z.to_mask().expect("dense action needs n ≤ 64") as usize;
        let y_count = (x & z).count_ones() as i64;
        let sign = if (b & z).count_ones() % 2 == 1 { 2 } else { 0 };
        let c = Phase::from_power(self.phase.power() + y_count + sign).to_complex();
        (c, b ^ x)
    }

    /// `P|ψ⟩` for a dense vector of length `2^n`.
    pub fn apply_to_vector(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (b, &a) in psi.iter().enumerate() {
            let (c, b2) = self.act_on_basis(b);
            out[b2] += c * a;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase.prefix())?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = MetroError;

    /// Optional phase prefix `+`, `-`, `+i`, `-i`, then one letter per qubit.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PlusI, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MinusI, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::PlusOne, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MinusOne, rest)
        } else {
            (Phase::PlusOne, s)
        };
        if body.is_empty() {
            return Err(MetroError::Parse(format!("empty Pauli string {s:?}")));
        }
        let n = body.chars().count();
        let mut p = PauliString::identity(n);
        for (q, c) in body.chars().enumerate() {
            let letter = PauliLetter::from_char(c)
                .ok_or_else(|| MetroError::Parse(format!("bad Pauli letter {c:?} in {s:?}")))?;
            p.set_letter(q, letter);
        }
        p.phase = phase;
        Ok(p)
    }
}

/// The sets `(S₁, S₂, S₃, S₄)` of X-, identity-, Y- and Z-sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportPartition {
    #[serde(rename = "S1")]
    pub s1: VertexSet,
    #[serde(rename = "S2")]
    pub s2: VertexSet,
    #[serde(rename = "S3")]
    pub s3: VertexSet,
    #[serde(rename = "S4")]
    pub s4: VertexSet,
}

impl SupportPartition {
    pub fn of(p: &PauliString) -> Self {
        let (x, z) = (p.x_mask(), p.z_mask());
        Self {
            s1: x.difference(z),
            s2: x.union(z).complement(),
            s3: x.intersection(z),
            s4: z.difference(x),
        }
    }

    /// `|S₁| + |S₃| + |S₄|`.
    pub fn support_size(&self) -> usize {
        self.s1.len() + self.s3.len() + self.s4.len()
    }
}

/// `S_i = X_i Z_{A_i}`.
pub fn vertex_stabilizer(g: &Graph, i: usize) -> Result<PauliString> {
    let nb = g.neighborhood(i)?;
    let mut p = PauliString::identity(g.n());
    p.x.insert(i);
    p.z = nb.clone();
    Ok(p)
}

/// `S_α = Π_{i∈α} S_i`, multiplied in increasing vertex order, and its
/// support partition.
pub fn stabilizer_element(g: &Graph, alpha: &VertexSet) -> Result<(PauliString, SupportPartition)> {
    if alpha.universe() != g.n() {
        return Err(MetroError::SizeMismatch {
            expected: g.n(),
            found: alpha.universe(),
        });
    }
    if alpha.is_empty() {
        return Err(MetroError::EmptySubset);
    }
    let mut acc = PauliString::identity(g.n());
    for i in alpha.iter() {
        acc = acc.multiply(&vertex_stabilizer(g, i)?)?;
    }
    let part = SupportPartition::of(&acc);
    Ok((acc, part))
}

/// Default tolerance for stabilizer checks on dense states.
pub const STABILIZE_TOL: f64 = 1e-10;

/// True iff `P` fixes every state in the support of `state`.
///
/// For mixed states this is tested as `Pρ = ρ`, which holds exactly when `P`
/// acts as the identity on the range of `ρ`.
pub fn stabilizes(p: &PauliString, state: &DenseState) -> Result<bool> {
    stabilizes_with_tol(p, state, STABILIZE_TOL)
}

pub fn stabilizes_with_tol(p: &PauliString, state: &DenseState, tol: f64) -> Result<bool> {
    if p.n() != state.n() {
        return Err(MetroError::SizeMismatch {
            expected: state.n(),
            found: p.n(),
        });
    }
    match state {
        DenseState::Pure { amps, .. } => {
            let out = p.apply_to_vector(amps);
            let dev: f64 = out
                .iter()
                .zip(amps)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            Ok(dev <= tol)
        }
        DenseState::Mixed { rho, .. } => {
            let dim = rho.dim();
            let mut dev = 0.0;
            for b in 0..dim {
                let (c, b2) = p.act_on_basis(b);
                // (Pρ)[b2, k] = c ρ[b, k]; compare against ρ[b2, k].
                for k in 0..dim {
                    dev += (c * rho.get(b, k) - rho.get(b2, k)).norm_sqr();
                }
            }
            Ok(dev.sqrt() <= tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{self, Mat2};
    use crate::fixtures;
    use crate::graph::StandardGraph;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(ps("X").multiply(&ps("Z")).unwrap(), ps("-iY"));
        assert_eq!(ps("Z").multiply(&ps("X")).unwrap(), ps("+iY"));
        assert_eq!(ps("X").multiply(&ps("Y")).unwrap(), ps("+iZ"));
        assert_eq!(ps("Y").multiply(&ps("Y")).unwrap(), ps("I"));
        assert_eq!(ps("-X").multiply(&ps("-X")).unwrap(), ps("+I"));
        assert_eq!(ps("XZ").multiply(&ps("ZX")).unwrap(), ps("YY"));
        assert!(ps("X").multiply(&ps("XX")).is_err());
    }

    #[test]
    fn commutation() {
        assert!(ps("X").commutes(&ps("X")).unwrap());
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("XZ").commutes(&ps("ZX")).unwrap());
        assert!(!ps("XZI").commutes(&ps("ZZZ")).unwrap());
    }

    #[test]
    fn text_form() {
        for s in ["+XYZI", "-ZZ", "+iY", "-iXI"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert_eq!(ps("XZ").to_string(), "+XZ");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    fn dense_matrix(p: &PauliString) -> Vec<Vec<Complex64>> {
        let dim = 1 << p.n();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for b in 0..dim {
            let (c, b2) = p.act_on_basis(b);
            m[b2][b] = c;
        }
        m
    }

    fn kron_letters(p: &PauliString) -> Vec<Vec<Complex64>> {
        // Independent route: Kronecker product of 2×2 matrices, qubit k ↔ bit k.
        let mut m = vec![vec![p.phase().to_complex()]];
        for q in 0..p.n() {
            let l = Mat2::pauli(p.letter(q));
            let d = m.len();
            let mut out = vec![vec![Complex64::new(0.0, 0.0); 2 * d]; 2 * d];
            for (r, row) in out.iter_mut().enumerate() {
                for (c, v) in row.iter_mut().enumerate() {
                    // bit q is the most significant bit of the enlarged index
                    *v = l.0[r / d][c / d] * m[r % d][c % d];
                }
            }
            m = out;
        }
        m
    }

    fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let d = a.len();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    fn all_paulis(n: usize) -> Vec<PauliString> {
        let mut out = Vec::new();
        for code in 0..(4usize.pow(n as u32)) {
            for ph in 0..4 {
                let mut p = PauliString::identity(n).with_phase(Phase::from_power(ph));
                let mut c = code;
                for q in 0..n {
                    let l = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z][c % 4];
                    p.set_letter(q, l);
                    c /= 4;
                }
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn multiply_matches_dense_products() {
        for n in 1..=2 {
            let all = all_paulis(n);
            for p in &all {
                assert_eq!(dense_matrix(p), kron_letters(p));
                for q in &all {
                    let prod = p.multiply(q).unwrap();
                    let expect = matmul(&kron_letters(p), &kron_letters(q));
                    assert_eq!(dense_matrix(&prod), expect, "{p} * {q}");
                }
            }
        }
        // n = 3: identity-phase strings only, all pairs.
        let all: Vec<_> = all_paulis(3).into_iter().filter(|p| p.phase() == Phase::PlusOne).collect();
        for p in &all {
            for q in &all {
                let prod = p.multiply(q).unwrap();
                assert_eq!(dense_matrix(&prod), matmul(&dense_matrix(p), &dense_matrix(q)));
                let anti = p.multiply(q).unwrap() == q.multiply(p).unwrap();
                assert_eq!(anti, p.commutes(q).unwrap());
            }
        }
    }

    #[test]
    fn vertex_stabilizer_examples() {
        let lg = fixtures::fig1a();
        let a = lg.resolve("A").unwrap();
        let c = lg.resolve("C").unwrap();
        let sa = vertex_stabilizer(&lg.graph, a).unwrap();
        assert_eq!(sa.letter(a), PauliLetter::X);
        assert_eq!(sa.letter(c), PauliLetter::Z);
        assert_eq!(sa.weight(), 2);

        let star = StandardGraph::Star { n: 5 }.build().unwrap();
        assert_eq!(vertex_stabilizer(&star, 0).unwrap(), ps("XZZZZ"));

        let iso = Graph::empty(3).unwrap();
        assert_eq!(vertex_stabilizer(&iso, 1).unwrap(), ps("IXI"));
        assert!(vertex_stabilizer(&iso, 3).is_err());
    }

    #[test]
    fn fig1a_stabilizer_partition() {
        let lg = fixtures::fig1a();
        let alpha = VertexSet::from_vertices(10, ["C", "F", "I", "J"].map(|s| lg.resolve(s).unwrap()));
        let (_, part) = stabilizer_element(&lg.graph, &alpha).unwrap();
        let names = |s: &VertexSet| -> Vec<String> { s.iter().map(|v| lg.vertex_name(v)).collect() };
        assert_eq!(names(&part.s1), ["C", "F"]);
        assert_eq!(names(&part.s2), ["E", "H"]);
        assert_eq!(names(&part.s3), ["I", "J"]);
        assert_eq!(names(&part.s4), ["A", "B", "D", "G"]);
        assert_eq!(part.support_size(), 8);
    }

    #[test]
    fn stabilizer_element_examples() {
        let g = fixtures::fig1c();
        for i in 0..g.n() {
            let (_, part) = stabilizer_element(&g, &VertexSet::from_vertices(6, [i])).unwrap();
            assert_eq!(part.s1.to_vec(), vec![i]);
            assert_eq!(&part.s4, g.adjacency(i));
            assert!(part.s3.is_empty());
        }
        for n in [2, 4, 6] {
            let k = StandardGraph::Complete { n }.build().unwrap();
            let (p, part) = stabilizer_element(&k, &VertexSet::full(n)).unwrap();
            assert_eq!(part.s3, VertexSet::full(n), "{p}");
        }
        assert_eq!(
            stabilizer_element(&g, &VertexSet::empty(6)),
            Err(MetroError::EmptySubset)
        );
    }

    #[test]
    fn stabilizes_examples() {
        let g = fixtures::fig1c();
        let psi = dense::graph_state(&g, 16).unwrap();
        for i in 0..g.n() {
            assert!(stabilizes(&vertex_stabilizer(&g, i).unwrap(), &psi).unwrap());
        }
        let ghz = dense::ghz(5);
        assert!(stabilizes(&ps("ZZZZZ"), &ghz).unwrap());
        assert!(!stabilizes(&ps("XIIII"), &ghz).unwrap());
        assert!(!stabilizes(&ps("-ZZZZZ"), &ghz).unwrap());
        let mixed = ghz.to_mixed();
        assert!(stabilizes(&ps("ZZZZZ"), &mixed).unwrap());
        assert!(!stabilizes(&ps("XIIII"), &mixed).unwrap());
        assert!(stabilizes(&ps("ZZZZ"), &ghz).is_err());
    }
}
