//! Finite-type Cartan data, weights, and the Weyl group as words.
//!
//! Node labels follow the conventions of the ambient library (see the
//! guide, chapter 2): type `A_n` is the chain `1..n`; types `B_n`/`C_n`
//! put the distinguished short/long node at position `n`; type `D_n`
//! attaches nodes `n-1` and `n` to node `n-2`; the exceptional types put
//! the branch node on top of the chain.  `I_bullet` is the distinguished
//! generator set used by the block machinery: node 1 for `A`, `C`, `E`,
//! `F`, `G`, node `n` for `B` and odd `D`, and the pair `n-1, n` for even
//! `D`.
//!
//! Nodes are 0-based everywhere inside the crate; parsing and printing
//! translate to the 1-based labels.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num::rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum CartanError {
    #[error("invalid finite type {letter}{rank}")]
    InvalidType { letter: char, rank: usize },
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("weight is not dominant")]
    NotDominant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeLetter {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for TypeLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            TypeLetter::A => 'A',
            TypeLetter::B => 'B',
            TypeLetter::C => 'C',
            TypeLetter::D => 'D',
            TypeLetter::E => 'E',
            TypeLetter::F => 'F',
            TypeLetter::G => 'G',
        };
        write!(f, "{c}")
    }
}

/// An integer weight in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn fundamental(rank: usize, node: usize) -> Self {
        let mut v = vec![0; rank];
        v[node] = 1;
        Weight(v)
    }

    pub fn from_coords(v: Vec<i64>) -> Self {
        Weight(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// The pairing `λ(h_i)`.
    pub fn eval(&self, node: usize) -> i64 {
        self.0[node]
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|a| a * k).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A word in the simple reflections.  The word `[i, j, k]` denotes the
/// product `s_i s_j s_k`, with the rightmost letter acting first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WeylWord(pub Vec<usize>);

impl WeylWord {
    pub fn identity() -> Self {
        WeylWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", s.join(" "))
    }
}

/// The τ-element shift tables of the block machinery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TauTables {
    /// `τ_{k,a} = ∏_{r ∈ t[k]} ω_{node, a ξ^r}` for the single
    /// distinguished node.
    Single { node: usize, t: [Vec<i64>; 3] },
    /// Even `D_n`: the two spin families with their three mixed products.
    DEven { minus_node: usize, plus_node: usize, n: usize },
}

impl TauTables {
    /// Indices `k` for which a τ-element exists.
    pub fn valid_k(&self) -> Vec<usize> {
        match self {
            TauTables::Single { t, .. } => {
                (1..=3).filter(|&k| !t[k - 1].is_empty()).collect()
            }
            TauTables::DEven { .. } => vec![1, 2, 3],
        }
    }
}

type Mat = Vec<Vec<i64>>;

fn mat_identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i][k];
            if x != 0 {
                for j in 0..n {
                    out[i][j] += x * b[k][j];
                }
            }
        }
    }
    out
}

fn mat_apply(m: &Mat, v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Cartan data for one finite type, with the constant tables the rest of
/// the crate consumes.
#[derive(Debug, Clone)]
pub struct CartanData {
    letter: TypeLetter,
    rank: usize,
    /// `cartan[i][j] = c_{ij} = α_j(h_i)`.
    cartan: Mat,
    /// Symmetrizers `d_i` (coprime, `D·C` symmetric).
    d: Vec<i64>,
    lacing: u32,
    dual_coxeter: u32,
    i_bullet: Vec<usize>,
    w0_involution: Vec<usize>,
    tau_tables: TauTables,
    /// Positive roots in simple-root coordinates.
    positive_roots: Vec<Vec<i64>>,
    /// A fixed reduced expression for the longest element.
    longest: WeylWord,
    /// Reflection matrices acting on simple-root coordinates.
    refl: Vec<Mat>,
}

/// Build the Cartan data for a valid finite type.
pub fn build_cartan(letter: TypeLetter, rank: usize) -> Result<CartanData, CartanError> {
    let bad = || CartanError::InvalidType { letter: letter_char(letter), rank };
    let n = rank;
    // adjacency with off-diagonal entries c_{ij}
    let mut c = vec![vec![0i64; n]; n];
    for i in 0..n {
        c[i][i] = 2;
    }
    let chain = |c: &mut Mat, i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    let (d, i_bullet, dual_coxeter): (Vec<i64>, Vec<usize>, u32) = match letter {
        TypeLetter::A => {
            if n < 1 {
                return Err(bad());
            }
            for i in 0..n.saturating_sub(1) {
                chain(&mut c, i, i + 1);
            }
            (vec![1; n], vec![0], (n + 1) as u32)
        }
        TypeLetter::B => {
            if n < 2 {
                return Err(bad());
            }
            for i in 0..n - 1 {
                chain(&mut c, i, i + 1);
            }
            // node n short: c_{n,n-1} = -2
            c[n - 1][n - 2] = -2;
            let mut d = vec![2; n];
            d[n - 1] = 1;
            (d, vec![n - 1], (2 * n - 1) as u32)
        }
        TypeLetter::C => {
            if n < 2 {
                return Err(bad());
            }
            for i in 0..n - 1 {
                chain(&mut c, i, i + 1);
            }
            // node n long: c_{n-1,n} = -2
            c[n - 2][n - 1] = -2;
            let mut d = vec![1; n];
            d[n - 1] = 2;
            (d, vec![0], (n + 1) as u32)
        }
        TypeLetter::D => {
            if n < 3 {
                return Err(bad());
            }
            for i in 0..n - 2 {
                if i + 1 <= n - 3 {
                    chain(&mut c, i, i + 1);
                }
            }
            chain(&mut c, n - 3, n - 2);
            chain(&mut c, n - 3, n - 1);
            let bullet = if n % 2 == 0 { vec![n - 2, n - 1] } else { vec![n - 1] };
            (vec![1; n], bullet, (2 * n - 2) as u32)
        }
        TypeLetter::E => {
            if !(6..=8).contains(&n) {
                return Err(bad());
            }
            for i in 0..n - 2 {
                chain(&mut c, i, i + 1);
            }
            // the top node attaches to the middle of the chain
            let branch = match n {
                6 => 2,
                7 => 3,
                _ => 4,
            };
            chain(&mut c, branch, n - 1);
            let h = match n {
                6 => 12,
                7 => 18,
                _ => 30,
            };
            (vec![1; n], vec![0], h)
        }
        TypeLetter::F => {
            if n != 4 {
                return Err(bad());
            }
            chain(&mut c, 0, 1);
            chain(&mut c, 1, 2);
            chain(&mut c, 2, 3);
            // nodes 1,2 short, 3,4 long
            c[1][2] = -2;
            c[2][1] = -1;
            (vec![1, 1, 2, 2], vec![0], 9)
        }
        TypeLetter::G => {
            if n != 2 {
                return Err(bad());
            }
            c[0][1] = -3;
            c[1][0] = -1;
            (vec![1, 3], vec![0], 4)
        }
    };

    // lacing number from the matrix
    let mut lacing = 1i64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                lacing = lacing.max(c[i][j] * c[j][i]);
            }
        }
    }
    // symmetrizability check
    for i in 0..n {
        for j in 0..n {
            debug_assert_eq!(d[i] * c[i][j], d[j] * c[j][i], "DC not symmetric");
        }
    }

    let t_sets: [Vec<i64>; 3] = match letter {
        TypeLetter::A => [(0..=n as i64).map(|j| 2 * j).collect(), vec![], vec![]],
        TypeLetter::B => [vec![0, 4 * n as i64 - 2], vec![], vec![]],
        TypeLetter::C => [vec![0, 2 * n as i64 + 2], vec![], vec![]],
        TypeLetter::D => [vec![0, 2, 2 * n as i64 - 2, 2 * n as i64], vec![], vec![]],
        TypeLetter::E => match n {
            6 => [vec![0, 8, 16], vec![0, 2, 4, 12, 14, 16], vec![]],
            7 => [vec![0, 18], vec![0, 2, 12, 14, 24, 26], vec![]],
            _ => [vec![0, 30], vec![0, 20, 40], vec![0, 12, 24, 36, 48]],
        },
        TypeLetter::F => [vec![0, 18], vec![0, 12, 24], vec![]],
        TypeLetter::G => [vec![0, 12], vec![0, 8, 16], vec![]],
    };
    let tau_tables = if letter == TypeLetter::D && n % 2 == 0 {
        TauTables::DEven { minus_node: n - 2, plus_node: n - 1, n }
    } else {
        TauTables::Single { node: i_bullet[0], t: t_sets }
    };

    // reflection matrices on simple-root coordinates
    let refl: Vec<Mat> = (0..n)
        .map(|i| {
            let mut m = mat_identity(n);
            for k in 0..n {
                m[i][k] = i64::from(i == k) - c[i][k];
            }
            m
        })
        .collect();

    // positive roots by closure
    let mut positive: BTreeSet<Vec<i64>> = (0..n)
        .map(|i| {
            let mut e = vec![0i64; n];
            e[i] = 1;
            e
        })
        .collect();
    loop {
        let mut new = Vec::new();
        for b in &positive {
            for s in &refl {
                let b2 = mat_apply(s, b);
                if b2.iter().all(|&x| x >= 0) && !positive.contains(&b2) {
                    new.push(b2);
                }
            }
        }
        if new.is_empty() {
            break;
        }
        positive.extend(new);
    }
    let positive_roots: Vec<Vec<i64>> = positive.into_iter().collect();

    let mut data = CartanData {
        letter,
        rank,
        cartan: c,
        d,
        lacing: lacing as u32,
        dual_coxeter,
        i_bullet,
        w0_involution: Vec::new(),
        tau_tables,
        positive_roots,
        longest: WeylWord::identity(),
        refl,
    };

    // longest element via the descent walk on a regular dominant weight
    let mut v: Vec<i64> = vec![1; n];
    let mut applied = Vec::new();
    loop {
        match (0..n).find(|&i| v[i] > 0) {
            None => break,
            Some(i) => {
                v = data.reflect_weight(i, &v);
                applied.push(i);
            }
        }
    }
    assert_eq!(applied.len(), data.positive_roots.len(), "longest word length");
    applied.reverse();
    data.longest = WeylWord(applied);

    // w0 acts as minus a diagram involution on fundamental weights
    let mut inv = vec![0usize; n];
    for i in 0..n {
        let img = data.weyl_act(&data.longest, &Weight::fundamental(n, i)).unwrap();
        let neg: Vec<i64> = img.coords().iter().map(|x| -x).collect();
        let j = (0..n)
            .find(|&j| neg.iter().enumerate().all(|(k, &x)| x == i64::from(k == j)))
            .expect("w0 image of a fundamental weight is minus a fundamental weight");
        inv[i] = j;
    }
    data.w0_involution = inv;

    Ok(data)
}

fn letter_char(l: TypeLetter) -> char {
    match l {
        TypeLetter::A => 'A',
        TypeLetter::B => 'B',
        TypeLetter::C => 'C',
        TypeLetter::D => 'D',
        TypeLetter::E => 'E',
        TypeLetter::F => 'F',
        TypeLetter::G => 'G',
    }
}

impl CartanData {
    pub fn letter(&self) -> TypeLetter {
        self.letter
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `c_{ij} = α_j(h_i)`.
    pub fn c(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    pub fn d(&self, i: usize) -> i64 {
        self.d[i]
    }

    pub fn lacing(&self) -> u32 {
        self.lacing
    }

    pub fn dual_coxeter(&self) -> u32 {
        self.dual_coxeter
    }

    /// The duality shift exponent `r∨ h∨`.
    pub fn rh(&self) -> i64 {
        self.lacing as i64 * self.dual_coxeter as i64
    }

    pub fn i_bullet(&self) -> &[usize] {
        &self.i_bullet
    }

    pub fn w0_node(&self, i: usize) -> usize {
        self.w0_involution[i]
    }

    pub fn tau_tables(&self) -> &TauTables {
        &self.tau_tables
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn check_node(&self, i: usize) -> Result<(), CartanError> {
        if i < self.rank {
            Ok(())
        } else {
            Err(CartanError::NodeOutOfRange(i))
        }
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.rank).filter(|&j| j != i && self.cartan[i][j] != 0).collect()
    }

    /// Coxeter exponent `m_{ij}` of the braid relation between `s_i`, `s_j`.
    pub fn coxeter_m(&self, i: usize, j: usize) -> usize {
        match self.cartan[i][j] * self.cartan[j][i] {
            0 => 2,
            1 => 3,
            2 => 4,
            3 => 6,
            _ => unreachable!("finite type"),
        }
    }

    fn reflect_weight(&self, i: usize, v: &[i64]) -> Vec<i64> {
        // s_i λ = λ - λ(h_i) α_i with α_i = Σ_j c_{ji} ω_j
        let coeff = v[i];
        (0..self.rank).map(|j| v[j] - coeff * self.cartan[j][i]).collect()
    }

    /// Apply a Weyl word to a weight, rightmost letter first.
    pub fn weyl_act(&self, w: &WeylWord, lambda: &Weight) -> Result<Weight, CartanError> {
        let mut v = lambda.coords().to_vec();
        for &i in w.0.iter().rev() {
            self.check_node(i)?;
            v = self.reflect_weight(i, &v);
        }
        Ok(Weight::from_coords(v))
    }

    fn word_matrices(&self, w: &WeylWord) -> (Mat, Mat) {
        let n = self.rank;
        let mut m = mat_identity(n);
        let mut minv = mat_identity(n);
        for &i in &w.0 {
            m = mat_mul(&m, &self.refl[i]);
        }
        for &i in w.0.iter().rev() {
            minv = mat_mul(&minv, &self.refl[i]);
        }
        (m, minv)
    }

    /// Reduce a word to the canonical reduced expression of the same group
    /// element (greedy least left descent).  Idempotent.
    pub fn reduce_word(&self, w: &WeylWord) -> Result<WeylWord, CartanError> {
        for &i in &w.0 {
            self.check_node(i)?;
        }
        let n = self.rank;
        let (mut m, mut minv) = self.word_matrices(w);
        let mut out = Vec::new();
        loop {
            if m == mat_identity(n) {
                break;
            }
            let mut descent = None;
            for i in 0..n {
                // left descent: w^{-1} α_i is a negative root
                let col: Vec<i64> = (0..n).map(|r| minv[r][i]).collect();
                if col.iter().all(|&x| x <= 0) {
                    descent = Some(i);
                    break;
                }
            }
            let i = descent.expect("nonidentity element has a left descent");
            out.push(i);
            m = mat_mul(&self.refl[i], &m);
            minv = mat_mul(&minv, &self.refl[i]);
        }
        Ok(WeylWord(out))
    }

    /// The length of the element represented by a word.
    pub fn word_length(&self, w: &WeylWord) -> Result<usize, CartanError> {
        Ok(self.reduce_word(w)?.len())
    }

    /// Whether two words represent the same group element.
    pub fn word_eq(&self, a: &WeylWord, b: &WeylWord) -> bool {
        self.word_matrices(a).0 == self.word_matrices(b).0
    }

    /// A fixed reduced expression for the longest element `w_0`.
    pub fn longest_element(&self) -> &WeylWord {
        &self.longest
    }

    /// Reduced expressions for `w_0`: the canonical one plus distinct words
    /// reached by braid moves, capped at `budget` words.
    pub fn w0_catalog(&self, budget: usize) -> Vec<WeylWord> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(self.longest.0.clone());
        queue.push_back(self.longest.0.clone());
        while let Some(word) = queue.pop_front() {
            out.push(WeylWord(word.clone()));
            if out.len() >= budget {
                break;
            }
            for p in 0..word.len() {
                for q in p + 1..word.len() {
                    let (i, j) = (word[p], word[q]);
                    if q != p + 1 {
                        break;
                    }
                    if i == j {
                        continue;
                    }
                    let m = self.coxeter_m(i, j);
                    if p + m > word.len() {
                        continue;
                    }
                    let mut matches = true;
                    for t in 0..m {
                        let expect = if t % 2 == 0 { i } else { j };
                        if word[p + t] != expect {
                            matches = false;
                            break;
                        }
                    }
                    if !matches {
                        continue;
                    }
                    let mut next = word.clone();
                    for t in 0..m {
                        next[p + t] = if t % 2 == 0 { j } else { i };
                    }
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        out
    }

    /// Minimal-length left-coset representatives of the stabilizer of a
    /// dominant weight, BFS-ordered by length.
    pub fn min_coset_reps(&self, lambda: &Weight) -> Result<Vec<WeylWord>, CartanError> {
        if !lambda.is_dominant() {
            return Err(CartanError::NotDominant);
        }
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue: VecDeque<(Vec<usize>, Vec<i64>)> = VecDeque::new();
        seen.insert(lambda.coords().to_vec());
        queue.push_back((Vec::new(), lambda.coords().to_vec()));
        while let Some((word, v)) = queue.pop_front() {
            out.push(WeylWord(word.clone()));
            for i in 0..self.rank {
                let v2 = self.reflect_weight(i, &v);
                if seen.insert(v2.clone()) {
                    let mut w2 = vec![i];
                    w2.extend_from_slice(&word);
                    queue.push_back((w2, v2));
                }
            }
        }
        Ok(out)
    }

    /// Simple-root coordinates of an element of the root lattice, if the
    /// weight lies in it.
    pub fn to_root_coords(&self, v: &Weight) -> Option<Vec<i64>> {
        let n = self.rank;
        // solve C x = v over the rationals, demanding integrality
        let mut a: Vec<Vec<Ratio<i64>>> = (0..n)
            .map(|r| (0..n).map(|c0| Ratio::from_integer(self.cartan[r][c0])).collect())
            .collect();
        let mut b: Vec<Ratio<i64>> = v.coords().iter().map(|&x| Ratio::from_integer(x)).collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r][col] != Ratio::from_integer(0))?;
            a.swap(col, piv);
            b.swap(col, piv);
            let p = a[col][col];
            for r in 0..n {
                if r != col && a[r][col] != Ratio::from_integer(0) {
                    let f = a[r][col] / p;
                    for c0 in 0..n {
                        let sub = f * a[col][c0];
                        a[r][c0] -= sub;
                    }
                    let sub = f * b[col];
                    b[r] -= sub;
                }
            }
        }
        let mut x = Vec::with_capacity(n);
        for r in 0..n {
            let val = b[r] / a[r][r];
            if !val.is_integer() {
                return None;
            }
            x.push(val.to_integer());
        }
        Some(x)
    }

    /// `μ ≤ λ` in dominance order: `λ - μ` is a nonnegative integer
    /// combination of simple roots.
    pub fn dominance_le(&self, mu: &Weight, lambda: &Weight) -> bool {
        match self.to_root_coords(&lambda.sub(mu)) {
            Some(x) => x.iter().all(|&c| c >= 0),
            None => false,
        }
    }

    /// The dominant representative of a weight's Weyl orbit.
    pub fn dominant_representative(&self, v: &Weight) -> Weight {
        let mut w = v.coords().to_vec();
        loop {
            match (0..self.rank).find(|&i| w[i] < 0) {
                None => return Weight::from_coords(w),
                Some(i) => w = self.reflect_weight(i, &w),
            }
        }
    }

    /// Full enumeration of the Weyl group as reduced words (tests and small
    /// ranks only).
    pub fn enumerate_group(&self) -> Vec<WeylWord> {
        let n = self.rank;
        let mut seen: BTreeSet<Mat> = BTreeSet::new();
        let mut queue: VecDeque<(Vec<usize>, Mat)> = VecDeque::new();
        let mut out = Vec::new();
        seen.insert(mat_identity(n));
        queue.push_back((Vec::new(), mat_identity(n)));
        while let Some((word, m)) = queue.pop_front() {
            out.push(WeylWord(word.clone()));
            for i in 0..n {
                let m2 = mat_mul(&self.refl[i], &m);
                if seen.insert(m2.clone()) {
                    let mut w2 = vec![i];
                    w2.extend_from_slice(&word);
                    queue.push_back((w2, m2));
                }
            }
        }
        out
    }
}

impl fmt::Display for CartanData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter, self.rank)
    }
}
