//! Cartan datum with Satake involution, iweights, the monoid `Λ` with its partial order, and
//! word bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a node of the Dynkin diagram.
pub type Node = usize;

/// A word `i_1 ... i_l` in the nodes.
pub type Word = Vec<Node>;

/// A divided-power word `i_1^(n_1) ... i_l^(n_l)`.
pub type DPWord = Vec<(Node, u32)>;

/// Severity of a [`Diagnostic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

/// A violated constraint found by [`SatakeDatum::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Short name of the constraint, e.g. `"recap"` for `ς_i + ς_{τi} = -a_{i,τi}`.
    pub constraint: String,
    pub message: String,
}

/// Symmetrizable Cartan matrix with an involution `τ` and parameters `ς`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SatakeDatum {
    names: Vec<String>,
    a: Vec<Vec<i64>>,
    d: Vec<i64>,
    tau: Vec<Node>,
    varsigma: Vec<i64>,
}

impl SatakeDatum {
    /// Builds a datum without validation; see [`SatakeDatum::new`].
    pub fn new_unchecked(
        names: Vec<String>,
        a: Vec<Vec<i64>>,
        d: Vec<i64>,
        tau: Vec<Node>,
        varsigma: Vec<i64>,
    ) -> Self {
        Self { names, a, d, tau, varsigma }
    }

    /// Builds a datum, rejecting it if [`SatakeDatum::validate`] reports an error.
    pub fn new(names: Vec<String>, a: Vec<Vec<i64>>, d: Vec<i64>, tau: Vec<Node>, varsigma: Vec<i64>) -> Result<Self> {
        let datum = Self::new_unchecked(names, a, d, tau, varsigma);
        let errors: Vec<String> = datum
            .validate()
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| format!("{}: {}", d.constraint, d.message))
            .collect();
        if errors.is_empty() {
            Ok(datum)
        } else {
            Err(Error::InvalidDatum(errors.join("; ")))
        }
    }

    /// Number of nodes.
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn nodes(&self) -> std::ops::Range<Node> {
        0..self.rank()
    }

    pub fn name(&self, i: Node) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Looks up a node by name.
    pub fn node(&self, name: &str) -> Option<Node> {
        self.names.iter().position(|n| n == name)
    }

    /// Cartan entry `a_{i,j}`.
    pub fn a(&self, i: Node, j: Node) -> i64 {
        self.a[i][j]
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.a
    }

    /// Symmetrizer `d_i`.
    pub fn d(&self, i: Node) -> i64 {
        self.d[i]
    }

    pub fn tau(&self, i: Node) -> Node {
        self.tau[i]
    }

    pub fn varsigma(&self, i: Node) -> i64 {
        self.varsigma[i]
    }

    pub fn is_fixed(&self, i: Node) -> bool {
        self.tau[i] == i
    }

    /// True when `d_i = 1` for every node.
    pub fn is_simply_laced(&self) -> bool {
        self.d.iter().all(|&d| d == 1)
    }

    /// Checks every defining constraint; returns an empty list when the datum is valid.
    ///
    /// The parity condition `a_{i,j} ≡ a_{j,i} (mod 2)` for τ-fixed `i, j` is reported as a
    /// warning only, since no formula computed here depends on it.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        fn push(out: &mut Vec<Diagnostic>, constraint: &str, message: String) {
            out.push(Diagnostic { severity: Severity::Error, constraint: constraint.to_string(), message })
        }
        macro_rules! err {
            ($c:expr, $m:expr $(,)?) => {
                push(&mut out, $c, $m)
            };
        }
        let n = self.names.len();
        if n == 0 {
            err!("nonempty", "the node set is empty".into());
        }
        let shape_ok = self.a.len() == n
            && self.a.iter().all(|row| row.len() == n)
            && self.d.len() == n
            && self.tau.len() == n
            && self.varsigma.len() == n;
        if !shape_ok {
            err!("dimensions", "cartan, d, tau and varsigma must all have one entry per node".into());
            return out;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.names[i] == self.names[j] {
                    err!("names", format!("node name {} is repeated", self.names[i]));
                }
            }
        }
        for i in 0..n {
            if self.d[i] < 1 {
                err!("symmetrizer", format!("d_{} = {} must be positive", self.names[i], self.d[i]));
            }
            if self.tau[i] >= n {
                err!("tau", format!("tau({}) is not a node", self.names[i]));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..n {
            let ni = &self.names[i];
            if self.a[i][i] != 2 {
                err!("cartan-diagonal", format!("a_{ni},{ni} = {} must be 2", self.a[i][i]));
            }
            for j in 0..n {
                let nj = &self.names[j];
                if i != j && self.a[i][j] > 0 {
                    err!("cartan-offdiagonal", format!("a_{ni},{nj} = {} must be <= 0", self.a[i][j]));
                }
                if (self.a[i][j] == 0) != (self.a[j][i] == 0) {
                    err!("cartan-zero", format!("a_{ni},{nj} = 0 must hold iff a_{nj},{ni} = 0"));
                }
                if self.d[i] * self.a[i][j] != self.d[j] * self.a[j][i] {
                    err!("symmetrizable", format!("d_{ni} a_{ni},{nj} != d_{nj} a_{nj},{ni}"));
                }
                if self.a[self.tau[i]][self.tau[j]] != self.a[i][j] {
                    err!("tau-cartan", format!("a_(tau {ni}),(tau {nj}) != a_{ni},{nj}"));
                }
            }
            if self.tau[self.tau[i]] != i {
                err!("tau-involution", format!("tau(tau({ni})) != {ni}"));
            }
            if self.d[self.tau[i]] != self.d[i] {
                err!("tau-symmetrizer", format!("d_(tau {ni}) != d_{ni}"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..n {
            let ni = &self.names[i];
            let ti = self.tau[i];
            let s = self.varsigma[i];
            if s + self.varsigma[ti] != -self.a[i][ti] {
                err!(
                    "recap",
                    format!(
                        "recap violated: varsigma_{ni} + varsigma_{} = {} but -a_{ni},{} = {}",
                        self.names[ti],
                        s + self.varsigma[ti],
                        self.names[ti],
                        -self.a[i][ti]
                    ),
                );
            }
            if ti != i && s < 0 {
                err!("varsigma-sign", format!("varsigma_{ni} = {s} must be >= 0 since tau({ni}) != {ni}"));
            }
            if ti == i && s != -1 {
                err!("varsigma-fixed", format!("varsigma_{ni} = {s} must be -1 since tau({ni}) = {ni}"));
            }
            if ti != i && self.a[i][ti] == 0 && s != 0 {
                err!("varsigma-zero", format!("varsigma_{ni} = {s} must be 0 since a_{ni},tau({ni}) = 0"));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.is_fixed(i) && self.is_fixed(j) && (self.a[i][j] - self.a[j][i]) % 2 != 0 {
                    out.push(Diagnostic {
                        severity: Severity::Warning,
                        constraint: "parity".into(),
                        message: format!(
                            "a_{0},{1} and a_{1},{0} have different parities at tau-fixed nodes",
                            self.names[i], self.names[j]
                        ),
                    });
                }
            }
        }
        out
    }

    /// The zero iweight with every parity set to `parity`.
    pub fn zero_weight(&self, parity: u8) -> IWeight {
        IWeight {
            lam: vec![0; self.rank()],
            par: self.nodes().map(|i| self.is_fixed(i).then_some(parity & 1)).collect(),
        }
    }

    /// Builds an iweight from `λ_i` for a set of orbit representatives and parities at
    /// τ-fixed nodes; `λ_{τi} = -λ_i` is filled in.
    pub fn weight(&self, lam: &[(Node, i64)], par: &[(Node, u8)]) -> Result<IWeight> {
        let mut w = self.zero_weight(0);
        for &(i, v) in lam {
            let t = self.tau(i);
            if t == i && v != 0 {
                return Err(Error::Precondition(format!("lambda_{} must be 0 at a tau-fixed node", self.name(i))));
            }
            w.lam[i] = v;
            w.lam[t] = -v;
        }
        for &(i, p) in par {
            if !self.is_fixed(i) {
                return Err(Error::Precondition(format!(
                    "parity given for node {} which is not tau-fixed",
                    self.name(i)
                )));
            }
            w.par[i] = Some(p & 1);
        }
        Ok(w)
    }

    /// Every iweight with `λ_i ∈ [lo, hi]` on orbit representatives and both parities at each
    /// τ-fixed node, in a fixed order.
    pub fn weight_sweep(&self, lo: i64, hi: i64) -> Vec<IWeight> {
        let reps: Vec<Node> = self.nodes().filter(|&i| self.tau(i) > i).collect();
        let fixed: Vec<Node> = self.nodes().filter(|&i| self.is_fixed(i)).collect();
        let mut out = Vec::new();
        let span = (hi - lo + 1).max(0) as usize;
        let lam_count = span.pow(reps.len() as u32);
        for code in 0..lam_count {
            let mut c = code;
            let lam: Vec<(Node, i64)> = reps
                .iter()
                .map(|&i| {
                    let v = lo + (c % span) as i64;
                    c /= span;
                    (i, v)
                })
                .collect();
            for pcode in 0..(1usize << fixed.len()) {
                let par: Vec<(Node, u8)> =
                    fixed.iter().enumerate().map(|(k, &i)| (i, ((pcode >> k) & 1) as u8)).collect();
                out.push(self.weight(&lam, &par).expect("sweep entries are well formed"));
            }
        }
        out
    }

    /// `λ + sign·α_j` as an iweight.
    pub fn shift(&self, lam: &IWeight, j: Node, sign: i64) -> IWeight {
        let mut out = lam.clone();
        let tj = self.tau(j);
        for i in self.nodes() {
            out.lam[i] += sign * (self.a(i, j) - self.a(i, tj));
            if let Some(p) = out.par[i].as_mut() {
                *p = ((*p as i64 + sign * self.a(i, j)).rem_euclid(2)) as u8;
            }
        }
        out
    }

    /// `|𝐢|` for a divided-power word.
    pub fn word_weight(&self, word: &[(Node, u32)]) -> LamVec {
        let mut mult = vec![0u32; self.rank()];
        for &(i, n) in word {
            mult[i] += n;
        }
        LamVec { mult }
    }

    /// `|𝐢|` for a plain word.
    pub fn plain_word_weight(&self, word: &[Node]) -> LamVec {
        let mut mult = vec![0u32; self.rank()];
        for &i in word {
            mult[i] += 1;
        }
        LamVec { mult }
    }

    /// `λ - |𝐢|`.
    pub fn apply_word(&self, lam: &IWeight, word: &[(Node, u32)]) -> IWeight {
        let mut out = lam.clone();
        for &(i, n) in word {
            for _ in 0..n {
                out = self.shift(&out, i, -1);
            }
        }
        out
    }

    /// `λ - |𝐢|` for a plain word.
    pub fn apply_plain_word(&self, lam: &IWeight, word: &[Node]) -> IWeight {
        self.apply_lamvec(lam, &self.plain_word_weight(word))
    }

    /// `λ - α` for `α ∈ Λ`.
    pub fn apply_lamvec(&self, lam: &IWeight, alpha: &LamVec) -> IWeight {
        let mut out = lam.clone();
        for (j, &m) in alpha.mult.iter().enumerate() {
            for _ in 0..m {
                out = self.shift(&out, j, -1);
            }
        }
        out
    }

    /// The order on `Λ`: `α ≤ β` iff `β - α ∈ Σ ℕ(α_i + α_{τi})`.
    pub fn leq_lambda(&self, alpha: &LamVec, beta: &LamVec) -> bool {
        self.nodes().all(|i| {
            let diff = beta.mult[i] as i64 - alpha.mult[i] as i64;
            let t = self.tau(i);
            if t == i {
                diff >= 0 && diff % 2 == 0
            } else {
                diff >= 0 && diff == beta.mult[t] as i64 - alpha.mult[t] as i64
            }
        })
    }

    /// All plain words of length exactly `len`, in lexicographic order.
    pub fn words_of_length(&self, len: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w: Word| {
                    self.nodes().map(move |i| {
                        let mut v = w.clone();
                        v.push(i);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// All plain words of length at most `max_len`, shortest first.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        (0..=max_len).flat_map(|l| self.words_of_length(l)).collect()
    }

    /// Renders a divided-power word with node names, e.g. `1^(2) 2`.
    pub fn format_dpword(&self, word: &[(Node, u32)]) -> String {
        word.iter()
            .map(|&(i, n)| if n == 1 { self.name(i).to_string() } else { format!("{}^({n})", self.name(i)) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Renders a plain word with node names separated by spaces.
    pub fn format_word(&self, word: &[Node]) -> String {
        word.iter().map(|&i| self.name(i)).collect::<Vec<_>>().join(" ")
    }

    /// Parses a whitespace-separated word with optional `^(n)` suffixes.
    pub fn parse_dpword(&self, text: &str) -> Result<DPWord> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let (name, n) = match tok.split_once("^(") {
                Some((name, rest)) => {
                    let n: u32 = rest
                        .strip_suffix(')')
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::Parse { what: "divided power", input: tok.into() })?;
                    (name, n)
                }
                None => (tok, 1),
            };
            let i = self.node(name).ok_or_else(|| Error::Parse { what: "node name", input: name.into() })?;
            if n > 0 {
                out.push((i, n));
            }
        }
        Ok(out)
    }
}

/// Flattens a divided-power word into a plain word.
pub fn flatten(word: &[(Node, u32)]) -> Word {
    word.iter().flat_map(|&(i, n)| std::iter::repeat_n(i, n as usize)).collect()
}

/// Views a plain word as a divided-power word with all multiplicities 1.
pub fn to_dpword(word: &[Node]) -> DPWord {
    word.iter().map(|&i| (i, 1)).collect()
}

/// An element of `X^ı`, recorded by `λ_i = (h_i - h_{τi})(λ̂)` and the parities of `h_i(λ̂)` at
/// τ-fixed nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IWeight {
    pub lam: Vec<i64>,
    /// `Some(parity)` exactly at τ-fixed nodes.
    pub par: Vec<Option<u8>>,
}

impl IWeight {
    pub fn lam(&self, i: Node) -> i64 {
        self.lam[i]
    }

    /// Parity of `h_i(λ̂)`; panics at a node that is not τ-fixed.
    pub fn parity(&self, i: Node) -> u8 {
        self.par[i].expect("parity is recorded only at tau-fixed nodes")
    }
}

/// An element `α = Σ m_i α_i` of `Λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LamVec {
    pub mult: Vec<u32>,
}

impl LamVec {
    pub fn zero(rank: usize) -> Self {
        Self { mult: vec![0; rank] }
    }

    pub fn height(&self) -> u32 {
        self.mult.iter().sum()
    }
}

/// The Satake data used throughout the tests and the self-test.
pub mod examples {
    use super::SatakeDatum;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|k| k.to_string()).collect()
    }

    /// Split rank one: `I = {1}`, `τ = id`, `ς_1 = -1`.
    pub fn split_a1() -> SatakeDatum {
        SatakeDatum::new(names(1), vec![vec![2]], vec![1], vec![0], vec![-1]).unwrap()
    }

    /// Diagonal type: `A1 × A1` with `τ` swapping the factors.
    pub fn diagonal_a1a1() -> SatakeDatum {
        SatakeDatum::new(names(2), vec![vec![2, 0], vec![0, 2]], vec![1, 1], vec![1, 0], vec![0, 0]).unwrap()
    }

    /// Quasi-split `A2` with `τ` swapping the nodes and `ς = (1, 0)`.
    pub fn quasi_split_a2() -> SatakeDatum {
        SatakeDatum::new(names(2), vec![vec![2, -1], vec![-1, 2]], vec![1, 1], vec![1, 0], vec![1, 0]).unwrap()
    }

    /// Quasi-split `A3`: `τ` swaps the end nodes and fixes the middle one.
    pub fn quasi_split_a3() -> SatakeDatum {
        SatakeDatum::new(
            names(3),
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
            vec![1, 1, 1],
            vec![2, 1, 0],
            vec![0, -1, 0],
        )
        .unwrap()
    }

    /// Split `A2`: `τ = id`.
    pub fn split_a2() -> SatakeDatum {
        SatakeDatum::new(names(2), vec![vec![2, -1], vec![-1, 2]], vec![1, 1], vec![0, 1], vec![-1, -1]).unwrap()
    }

    /// Split `A1 × A1`: `τ = id`, used for the Serre complex with `a_{i,j} = 0`.
    pub fn split_a1a1() -> SatakeDatum {
        SatakeDatum::new(names(2), vec![vec![2, 0], vec![0, 2]], vec![1, 1], vec![0, 1], vec![-1, -1]).unwrap()
    }

    /// Split affine `A1` (Kronecker quiver), used for the Serre complex with `a_{i,j} = -2`.
    pub fn split_affine_a1() -> SatakeDatum {
        SatakeDatum::new(names(2), vec![vec![2, -2], vec![-2, 2]], vec![1, 1], vec![0, 1], vec![-1, -1]).unwrap()
    }

    /// The five data of the acceptance suite, with display names.
    pub fn acceptance_data() -> Vec<(&'static str, SatakeDatum)> {
        vec![
            ("split A1", split_a1()),
            ("diagonal A1xA1", diagonal_a1a1()),
            ("quasi-split A2", quasi_split_a2()),
            ("quasi-split A3", quasi_split_a3()),
            ("split A2", split_a2()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn validate_examples() {
        assert!(split_a1().validate().is_empty());
        assert!(quasi_split_a2().validate().is_empty());
        let bad = SatakeDatum::new_unchecked(
            vec!["1".into(), "2".into()],
            vec![vec![2, -1], vec![-1, 2]],
            vec![1, 1],
            vec![1, 0],
            vec![0, 0],
        );
        let diags = bad.validate();
        assert!(diags.iter().any(|d| d.constraint == "recap" && d.message.contains("recap violated")));
        assert!(SatakeDatum::new(
            vec!["1".into(), "2".into()],
            vec![vec![2, -1], vec![-1, 2]],
            vec![1, 1],
            vec![1, 0],
            vec![0, 0]
        )
        .is_err());
    }

    #[test]
    fn parity_condition_only_warns() {
        // a_{12} = -1, a_{21} = -2 with both nodes fixed (type B2 split).
        let b2 = SatakeDatum::new(
            vec!["1".into(), "2".into()],
            vec![vec![2, -1], vec![-2, 2]],
            vec![2, 1],
            vec![0, 1],
            vec![-1, -1],
        )
        .unwrap();
        let diags = b2.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warning);
    }

    #[test]
    fn shift_examples() {
        let a2 = quasi_split_a2();
        let l = a2.zero_weight(0);
        let s = a2.shift(&l, 0, 1);
        assert_eq!(s.lam, vec![3, -3]);
        assert_eq!(a2.shift(&s, 0, -1), l);
        let a1 = split_a1();
        let l = a1.zero_weight(0);
        assert_eq!(a1.shift(&l, 0, -1).par, vec![Some(0)]);
    }

    #[test]
    fn order_examples() {
        let a1 = split_a1();
        let z = LamVec::zero(1);
        assert!(a1.leq_lambda(&z, &z));
        assert!(a1.leq_lambda(&z, &LamVec { mult: vec![2] }));
        assert!(!a1.leq_lambda(&z, &LamVec { mult: vec![1] }));
        let a2 = quasi_split_a2();
        assert!(a2.leq_lambda(&LamVec::zero(2), &LamVec { mult: vec![1, 1] }));
        assert!(!a2.leq_lambda(&LamVec::zero(2), &LamVec { mult: vec![1, 0] }));
    }

    #[test]
    fn words() {
        let a2 = quasi_split_a2();
        assert_eq!(a2.word_weight(&[]), LamVec::zero(2));
        assert_eq!(a2.word_weight(&[(0, 2), (1, 1)]).mult, vec![2, 1]);
        let w = a2.parse_dpword("1^(2) 2").unwrap();
        assert_eq!(w, vec![(0, 2), (1, 1)]);
        assert_eq!(a2.format_dpword(&w), "1^(2) 2");
        assert_eq!(a2.words_up_to(2).len(), 7);
        let l = a2.weight(&[(0, 2)], &[]).unwrap();
        let moved = a2.apply_word(&l, &w);
        let mut back = moved.clone();
        for &(i, n) in w.iter().rev() {
            for _ in 0..n {
                back = a2.shift(&back, i, 1);
            }
        }
        assert_eq!(back, l);
    }

    #[test]
    fn sweep_sizes() {
        assert_eq!(split_a1().weight_sweep(-4, 4).len(), 2);
        assert_eq!(quasi_split_a2().weight_sweep(-4, 4).len(), 9);
        assert_eq!(quasi_split_a3().weight_sweep(-4, 4).len(), 18);
        assert_eq!(split_a2().weight_sweep(-4, 4).len(), 4);
    }
}
