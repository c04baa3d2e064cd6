//! Coxeter matrices and their diagrams.
//!
//! A [`CoxeterMatrix`] is the symmetric matrix `(m_ij)` of a Coxeter
//! presentation `<S | (s_i s_j)^{m_ij} = 1>`. Off-diagonal entries are
//! integers `>= 2` or [`Entry::Infinity`]; the diagonal is all ones.
//!
//! Classification is table driven: an irreducible component is recognised
//! as spherical or affine by matching the shape of its labelled graph
//! against the finite and affine type lists (`A_n`, `B_n`, `D_n`, `E_6..8`,
//! `F_4`, `H_3`, `H_4`, `I_2(m)` and their affine counterparts).

use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

/// Largest supported rank. Index sets are stored as `u32` bit masks.
pub const MAX_RANK: usize = 32;

/// One entry of a Coxeter matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Finite(u32),
    Infinity,
}

impl Entry {
    pub fn finite(self) -> Option<u32> {
        match self {
            Entry::Finite(m) => Some(m),
            Entry::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Entry::Infinity)
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Finite(m) => write!(f, "{m}"),
            Entry::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Entry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            return Ok(Entry::Infinity);
        }
        s.parse::<u32>()
            .map(Entry::Finite)
            .map_err(|_| format!("malformed token `{s}`"))
    }
}

/// A set of generator indices (0-based internally).
///
/// Serialized as sorted, comma separated, 1-based indices; the empty set
/// serializes as `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            IndexSet(u32::MAX)
        } else {
            IndexSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn with(self, i: usize) -> Self {
        IndexSet(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        IndexSet(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        IndexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    /// All subsets of `self`, in increasing order of their bit masks.
    pub fn subsets(self) -> impl Iterator<Item = IndexSet> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(IndexSet(cur))
        })
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut set = IndexSet::EMPTY;
        for i in iter {
            set.insert(i);
        }
        set
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for IndexSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(IndexSet::EMPTY);
        }
        let mut set = IndexSet::EMPTY;
        for tok in s.split(',') {
            let i: usize = tok
                .trim()
                .parse()
                .map_err(|_| format!("malformed index `{tok}`"))?;
            if i == 0 || i > MAX_RANK {
                return Err(format!("index {i} out of range"));
            }
            set.insert(i - 1);
        }
        Ok(set)
    }
}

/// The symmetric matrix of a Coxeter presentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxeterMatrix {
    n: usize,
    m: Vec<Entry>,
}

impl CoxeterMatrix {
    /// Build from rows, validating symmetry, the unit diagonal and `m_ij >= 2`.
    pub fn new(rows: Vec<Vec<Entry>>) -> Result<Self, ParseError> {
        let n = rows.len();
        if n > MAX_RANK {
            return Err(ParseError::RankTooLarge(n));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ParseError::RowLength {
                    row: i + 1,
                    expected: n,
                    found: row.len(),
                });
            }
        }
        for i in 0..n {
            if rows[i][i] != Entry::Finite(1) {
                return Err(ParseError::Diagonal { index: i + 1 });
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if rows[i][j] != rows[j][i] {
                    return Err(ParseError::Asymmetric { i: i + 1, j: j + 1 });
                }
                if let Entry::Finite(v) = rows[i][j] {
                    if v < 2 {
                        return Err(ParseError::OffDiagonal { i: i + 1, j: j + 1, value: v });
                    }
                }
            }
        }
        Ok(CoxeterMatrix {
            n,
            m: rows.into_iter().flatten().collect(),
        })
    }

    /// Build from a closure giving `m_ij` for `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Entry) -> Self {
        let mut rows = vec![vec![Entry::Finite(1); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let e = f(i, j);
                rows[i][j] = e;
                rows[j][i] = e;
            }
        }
        CoxeterMatrix::new(rows).expect("from_fn produced an invalid Coxeter matrix")
    }

    /// Rank-`n` matrix with all off-diagonal entries 2, then overridden by
    /// `edges` (0-based pairs).
    pub fn from_edges(n: usize, edges: &[(usize, usize, Entry)]) -> Self {
        CoxeterMatrix::from_fn(n, |i, j| {
            edges
                .iter()
                .find(|&&(a, b, _)| (a, b) == (i, j) || (a, b) == (j, i))
                .map(|&(_, _, e)| e)
                .unwrap_or(Entry::Finite(2))
        })
    }

    /// The dihedral matrix `I_2(m)`.
    pub fn dihedral(m: Entry) -> Self {
        CoxeterMatrix::from_edges(2, &[(0, 1, m)])
    }

    /// Parse the text format: the rank on the first line, then `n` rows of
    /// `n` whitespace separated tokens (integers or `inf`).
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, first) = lines.next().ok_or(ParseError::Empty)?;
        let n: usize = first.parse().map_err(|_| ParseError::Token {
            line: line_no,
            token: first.to_string(),
        })?;
        if n > MAX_RANK {
            return Err(ParseError::RankTooLarge(n));
        }
        let mut rows = Vec::with_capacity(n);
        for r in 0..n {
            let (line_no, line) = lines.next().ok_or(ParseError::MissingRow { row: r + 1 })?;
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<Entry>().map_err(|_| ParseError::Token {
                        line: line_no,
                        token: tok.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if let Some((line, _)) = lines.next() {
            return Err(ParseError::TrailingInput { line });
        }
        CoxeterMatrix::new(rows)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn m(&self, i: usize, j: usize) -> Entry {
        self.m[i * self.n + j]
    }

    pub fn full_set(&self) -> IndexSet {
        IndexSet::full(self.n)
    }

    /// Whether generators `i` and `j` commute (`m_ij = 2`, or `i = j`).
    pub fn commute(&self, i: usize, j: usize) -> bool {
        i == j || self.m(i, j) == Entry::Finite(2)
    }

    fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, Entry)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.m(i, j))))
    }

    pub fn is_even(&self) -> bool {
        self.off_diagonal()
            .all(|(_, _, e)| e.finite().map_or(true, |m| m % 2 == 0))
    }

    pub fn is_right_angled(&self) -> bool {
        self.off_diagonal()
            .all(|(_, _, e)| matches!(e, Entry::Finite(2) | Entry::Infinity))
    }

    pub fn is_crystallographic(&self) -> bool {
        self.off_diagonal().all(|(_, _, e)| {
            matches!(e, Entry::Infinity | Entry::Finite(2 | 3 | 4 | 6))
        })
    }

    /// The submatrix on `subset`, with generators renumbered in increasing
    /// order. Returns the matrix and the map from new to old indices.
    pub fn restrict(&self, subset: IndexSet) -> (CoxeterMatrix, Vec<usize>) {
        let idx: Vec<usize> = subset.iter().filter(|&i| i < self.n).collect();
        let sub = CoxeterMatrix::from_fn(idx.len(), |a, b| self.m(idx[a], idx[b]));
        (sub, idx)
    }

    /// Text serialization, inverse of [`CoxeterMatrix::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.m(i, j).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Simultaneously permute rows and columns: new index `k` is old index `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> CoxeterMatrix {
        CoxeterMatrix::from_fn(self.n, |a, b| self.m(perm[a], perm[b]))
    }
}

impl FromStr for CoxeterMatrix {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CoxeterMatrix::parse(s)
    }
}

/// Structural flags of a Coxeter diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramClassification {
    pub is_even: bool,
    pub is_right_angled: bool,
    pub is_crystallographic: bool,
    /// Irreducible components, each sorted, listed by smallest element.
    pub components: Vec<IndexSet>,
    pub spherical: Vec<bool>,
    pub affine: Vec<bool>,
    pub has_442_triangle: bool,
    pub has_affine_subdiagram_rank_ge3: bool,
}

impl DiagramClassification {
    pub fn is_spherical(&self) -> bool {
        self.spherical.iter().all(|&s| s)
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }
}

/// Compute every classification flag for `m`.
pub fn classify(m: &CoxeterMatrix) -> DiagramClassification {
    let full = m.full_set();
    let components = components(m, full);
    let spherical = components.iter().map(|&c| is_spherical_irreducible(m, c)).collect();
    let affine = components.iter().map(|&c| is_affine_irreducible(m, c)).collect();
    let has_affine_subdiagram_rank_ge3 = full
        .subsets()
        .filter(|s| s.len() >= 3)
        .any(|s| is_irreducible(m, s) && is_affine_irreducible(m, s));
    DiagramClassification {
        is_even: m.is_even(),
        is_right_angled: m.is_right_angled(),
        is_crystallographic: m.is_crystallographic(),
        components,
        spherical,
        affine,
        has_442_triangle: has_442_triangle(m),
        has_affine_subdiagram_rank_ge3,
    }
}

/// Whether some three generators carry the labels `{4, 4, 2}`.
pub fn has_442_triangle(m: &CoxeterMatrix) -> bool {
    let n = m.rank();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let mut labels = [m.m(a, b), m.m(a, c), m.m(b, c)];
                labels.sort();
                if labels == [Entry::Finite(2), Entry::Finite(4), Entry::Finite(4)] {
                    return true;
                }
            }
        }
    }
    false
}

/// Even, with no `(4,4,2)`-triangle.
pub fn theorem12_applicable(m: &CoxeterMatrix) -> bool {
    m.is_even() && !has_442_triangle(m)
}

/// Generators outside `j` commuting with every element of `j`.
pub fn jperp(m: &CoxeterMatrix, j: IndexSet) -> IndexSet {
    (0..m.rank())
        .filter(|&s| !j.contains(s) && j.iter().all(|t| m.commute(s, t)))
        .collect()
}

/// Connected components of `subset` in the graph with an edge wherever `m_ij != 2`.
pub fn components(m: &CoxeterMatrix, subset: IndexSet) -> Vec<IndexSet> {
    let mut remaining = subset;
    let mut out = Vec::new();
    while let Some(start) = remaining.iter().next() {
        let mut comp = IndexSet::singleton(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in remaining.iter() {
                if !comp.contains(w) && !m.commute(v, w) {
                    comp.insert(w);
                    stack.push(w);
                }
            }
        }
        remaining = remaining.difference(comp);
        out.push(comp);
    }
    out
}

/// `subset` is non-empty and connected in the `m != 2` graph.
pub fn is_irreducible(m: &CoxeterMatrix, subset: IndexSet) -> bool {
    !subset.is_empty() && components(m, subset).len() == 1
}

/// Labelled graph of an irreducible component, vertices renumbered `0..k`.
struct ComponentGraph {
    k: usize,
    /// `adj[v]` lists `(w, label)` with `label = m_vw != 2`.
    adj: Vec<Vec<(usize, Entry)>>,
    edges: usize,
}

impl ComponentGraph {
    fn new(m: &CoxeterMatrix, subset: IndexSet) -> Self {
        let idx: Vec<usize> = subset.iter().collect();
        let k = idx.len();
        let mut adj = vec![Vec::new(); k];
        let mut edges = 0;
        for a in 0..k {
            for b in a + 1..k {
                let e = m.m(idx[a], idx[b]);
                if e != Entry::Finite(2) {
                    adj[a].push((b, e));
                    adj[b].push((a, e));
                    edges += 1;
                }
            }
        }
        ComponentGraph { k, adj, edges }
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn labels(&self) -> impl Iterator<Item = Entry> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(v, ns)| ns.iter().filter(move |(w, _)| *w > v).map(|&(_, e)| e))
    }

    /// Edge labels along a path graph, starting from one endpoint.
    fn path_labels(&self) -> Option<Vec<Entry>> {
        if self.k == 1 {
            return Some(Vec::new());
        }
        if self.edges != self.k - 1 || (0..self.k).any(|v| self.degree(v) > 2) {
            return None;
        }
        let start = (0..self.k).find(|&v| self.degree(v) == 1)?;
        let mut labels = Vec::new();
        let (mut prev, mut cur) = (usize::MAX, start);
        loop {
            let next = self.adj[cur].iter().find(|(w, _)| *w != prev);
            match next {
                Some(&(w, e)) => {
                    labels.push(e);
                    prev = cur;
                    cur = w;
                }
                None => break,
            }
        }
        Some(labels)
    }

    /// For a tree with exactly one vertex of degree 3: the arms as lists of
    /// labels ordered outwards from the branch vertex.
    fn arms(&self, centre: usize) -> Vec<Vec<Entry>> {
        self.adj[centre]
            .iter()
            .map(|&(first, e)| {
                let mut labels = vec![e];
                let (mut prev, mut cur) = (centre, first);
                while let Some(&(w, e)) = self.adj[cur].iter().find(|(w, _)| *w != prev) {
                    labels.push(e);
                    prev = cur;
                    cur = w;
                }
                labels
            })
            .collect()
    }

    fn is_tree(&self) -> bool {
        self.edges + 1 == self.k
    }
}

const THREE: Entry = Entry::Finite(3);

/// Table lookup against the irreducible finite types.
pub fn is_spherical_irreducible(m: &CoxeterMatrix, subset: IndexSet) -> bool {
    spherical_irreducible_order(m, subset).is_some()
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// Order of `W_J` for a connected `J` of finite type, `None` otherwise.
/// Saturates at `u128::MAX`.
pub fn spherical_irreducible_order(m: &CoxeterMatrix, subset: IndexSet) -> Option<u128> {
    let g = ComponentGraph::new(m, subset);
    match g.k {
        0 => return Some(1),
        1 => return Some(2),
        2 => {
            let label = g.labels().next().unwrap_or(Entry::Finite(2));
            return label.finite().map(|v| 2 * v as u128);
        }
        _ => {}
    }
    if g.labels().any(|e| e.is_infinite()) || !g.is_tree() {
        return None;
    }
    let k = g.k;
    let branch: Vec<usize> = (0..k).filter(|&v| g.degree(v) >= 3).collect();
    match branch.as_slice() {
        [] => {
            let labels = g.path_labels().expect("tree without branch vertex is a path");
            let odd: Vec<(usize, Entry)> =
                labels.iter().copied().enumerate().filter(|&(_, e)| e != THREE).collect();
            let last = labels.len() - 1;
            match odd.as_slice() {
                // A_n
                [] => Some(factorial(k + 1)),
                // B_n
                [(pos, Entry::Finite(4))] if *pos == 0 || *pos == last => {
                    Some((1u128 << k.min(127)).saturating_mul(factorial(k)))
                }
                // F_4
                [(1, Entry::Finite(4))] if k == 4 => Some(1152),
                // H_3, H_4
                [(pos, Entry::Finite(5))] if (k == 3 || k == 4) && (*pos == 0 || *pos == last) => {
                    Some(if k == 3 { 120 } else { 14400 })
                }
                _ => None,
            }
        }
        [centre] if g.degree(*centre) == 3 => {
            if g.labels().any(|e| e != THREE) {
                return None;
            }
            let mut lens: Vec<usize> = g.arms(*centre).iter().map(Vec::len).collect();
            lens.sort();
            match lens.as_slice() {
                [1, 1, _] => Some((1u128 << (k - 1).min(127)).saturating_mul(factorial(k))),
                [1, 2, 2] => Some(51_840),
                [1, 2, 3] => Some(2_903_040),
                [1, 2, 4] => Some(696_729_600),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Order of `W_J` when `J` is spherical, computed from the type table.
pub fn spherical_order(m: &CoxeterMatrix, subset: IndexSet) -> Option<u128> {
    components(m, subset)
        .into_iter()
        .try_fold(1u128, |acc, c| spherical_irreducible_order(m, c).map(|o| acc.saturating_mul(o)))
}

/// Table lookup against the irreducible affine types.
pub fn is_affine_irreducible(m: &CoxeterMatrix, subset: IndexSet) -> bool {
    let g = ComponentGraph::new(m, subset);
    match g.k {
        0 | 1 => return false,
        // Ã_1
        2 => return g.labels().all(|e| e.is_infinite()),
        _ => {}
    }
    if g.labels().any(|e| !matches!(e, Entry::Finite(3 | 4 | 6))) {
        return false;
    }
    let all_three = g.labels().all(|e| e == THREE);
    // Ã_n, n >= 2: a cycle
    if g.edges == g.k {
        return all_three && (0..g.k).all(|v| g.degree(v) == 2);
    }
    if !g.is_tree() {
        return false;
    }
    let branch: Vec<usize> = (0..g.k).filter(|&v| g.degree(v) >= 3).collect();
    match branch.as_slice() {
        [] => {
            let labels = g.path_labels().expect("tree without branch vertex is a path");
            let k = g.k;
            let mut rev = labels.clone();
            rev.reverse();
            let matches_either = |pat: &[u32]| {
                let pat: Vec<Entry> = pat.iter().map(|&v| Entry::Finite(v)).collect();
                labels == pat || rev == pat
            };
            // C̃_n (including B̃_2 = C̃_2)
            let c_tilde = labels.first() == Some(&Entry::Finite(4))
                && labels.last() == Some(&Entry::Finite(4))
                && labels[1..labels.len() - 1].iter().all(|&e| e == THREE);
            c_tilde
                || (k == 5 && matches_either(&[3, 3, 4, 3]))
                || (k == 3 && matches_either(&[3, 6]))
        }
        [centre] => {
            let deg = g.degree(*centre);
            if deg == 4 {
                // D̃_4
                return all_three && g.k == 5;
            }
            if deg != 3 {
                return false;
            }
            let arms = g.arms(*centre);
            let mut lens: Vec<usize> = arms.iter().map(Vec::len).collect();
            lens.sort();
            if all_three {
                // Ẽ_6, Ẽ_7, Ẽ_8
                return matches!(lens.as_slice(), [2, 2, 2] | [1, 3, 3] | [1, 2, 5]);
            }
            // B̃_n, n >= 3: a fork at one end, a 4 on the last edge at the other
            let non_three: Vec<(usize, usize)> = arms
                .iter()
                .enumerate()
                .flat_map(|(a, labels)| {
                    labels
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e != THREE)
                        .map(move |(p, _)| (a, p))
                })
                .collect();
            match non_three.as_slice() {
                [(a, p)] => {
                    let arm = &arms[*a];
                    let others_short = arms
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| b != a)
                        .all(|(_, l)| l.len() == 1);
                    arm[*p] == Entry::Finite(4) && *p == arm.len() - 1 && others_short
                }
                _ => false,
            }
        }
        [b1, b2] => {
            // D̃_n, n >= 5: forks at both ends of a path
            all_three
                && g.degree(*b1) == 3
                && g.degree(*b2) == 3
                && [*b1, *b2].iter().all(|&b| {
                    g.adj[b].iter().filter(|(w, _)| g.degree(*w) == 1).count() == 2
                })
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: u32) -> Entry {
        Entry::Finite(v)
    }

    fn path(labels: &[u32]) -> CoxeterMatrix {
        let edges: Vec<_> = labels.iter().enumerate().map(|(i, &l)| (i, i + 1, fin(l))).collect();
        CoxeterMatrix::from_edges(labels.len() + 1, &edges)
    }

    #[test]
    fn parse_dihedral() {
        let m = CoxeterMatrix::parse("2\n1 4\n4 1").unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.m(0, 1), fin(4));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            CoxeterMatrix::parse("2\n1 3\n4 1"),
            Err(ParseError::Asymmetric { .. })
        ));
        assert!(matches!(
            CoxeterMatrix::parse("2\n2 3\n3 1"),
            Err(ParseError::Diagonal { index: 1 })
        ));
        assert!(matches!(
            CoxeterMatrix::parse("2\n1 1\n1 1"),
            Err(ParseError::OffDiagonal { .. })
        ));
        assert!(matches!(
            CoxeterMatrix::parse("2\n1 x\nx 1"),
            Err(ParseError::Token { line: 2, .. })
        ));
        assert!(matches!(CoxeterMatrix::parse("3\n1 2 2\n2 1 2"), Err(ParseError::MissingRow { row: 3 })));
    }

    #[test]
    fn parse_442_and_round_trip() {
        let m = CoxeterMatrix::parse("3\n1 4 2\n4 1 4\n2 4 1").unwrap();
        assert!(has_442_triangle(&m));
        assert!(!theorem12_applicable(&m));
        let inf = CoxeterMatrix::parse("3\n1 inf 2\ninf 1 6\n2 6 1").unwrap();
        assert_eq!(CoxeterMatrix::parse(&inf.to_text()).unwrap(), inf);
    }

    #[test]
    fn classify_b2_tilde() {
        let m = CoxeterMatrix::from_edges(3, &[(0, 1, fin(4)), (0, 2, fin(4))]);
        let c = classify(&m);
        assert!(c.has_442_triangle);
        assert_eq!(c.components.len(), 1);
        assert_eq!(c.affine, vec![true]);
        assert_eq!(c.spherical, vec![false]);
        assert!(c.has_affine_subdiagram_rank_ge3);
    }

    #[test]
    fn classify_commuting_pair() {
        let c = classify(&CoxeterMatrix::dihedral(fin(2)));
        assert_eq!(c.components.len(), 2);
        assert_eq!(c.spherical, vec![true, true]);
        assert!(c.is_right_angled && c.is_even && c.is_crystallographic);
    }

    #[test]
    fn classify_b2() {
        let c = classify(&CoxeterMatrix::dihedral(fin(4)));
        assert!(c.is_spherical() && c.is_even && c.is_crystallographic && !c.is_right_angled);
    }

    #[test]
    fn applicability_examples() {
        let ra = CoxeterMatrix::from_edges(3, &[(0, 1, Entry::Infinity)]);
        assert!(theorem12_applicable(&ra));
        let m = CoxeterMatrix::from_edges(3, &[(0, 1, fin(6)), (0, 2, Entry::Infinity)]);
        assert!(theorem12_applicable(&m));
        assert!(!theorem12_applicable(&path(&[3])));
    }

    #[test]
    fn jperp_examples() {
        let m = CoxeterMatrix::from_edges(3, &[(0, 2, Entry::Infinity), (1, 2, Entry::Infinity)]);
        assert_eq!(jperp(&m, IndexSet::EMPTY), m.full_set());
        assert_eq!(jperp(&m, IndexSet::singleton(0)), IndexSet::singleton(1));
        assert_eq!(jperp(&m, m.full_set()), IndexSet::EMPTY);
    }

    #[test]
    fn irreducibility_examples() {
        let m = path(&[4, 4]);
        assert!(is_irreducible(&m, IndexSet::singleton(1)));
        assert!(is_irreducible(&m, m.full_set()));
        let c = CoxeterMatrix::dihedral(fin(2));
        assert!(!is_irreducible(&c, c.full_set()));
        assert!(!is_irreducible(&c, IndexSet::EMPTY));
    }

    #[test]
    fn finite_type_table() {
        assert!(is_spherical_irreducible(&path(&[3, 3, 3, 3]), IndexSet::full(5)));
        assert!(is_spherical_irreducible(&path(&[4, 3, 3]), IndexSet::full(4)));
        assert!(is_spherical_irreducible(&path(&[3, 4, 3]), IndexSet::full(4)));
        assert!(is_spherical_irreducible(&path(&[5, 3, 3]), IndexSet::full(4)));
        assert!(!is_spherical_irreducible(&path(&[5, 3, 3, 3]), IndexSet::full(5)));
        assert!(!is_spherical_irreducible(&path(&[3, 4, 3, 3]), IndexSet::full(5)));
        assert!(!is_spherical_irreducible(&path(&[4, 3, 4]), IndexSet::full(4)));
        assert!(!is_spherical_irreducible(&path(&[6, 3]), IndexSet::full(3)));
        // E_8: arms 1, 2, 4 around vertex 2 of a path 0-1-2-3-4-5-6 with 7 hanging off 2
        let mut edges: Vec<_> = (0..6).map(|i| (i, i + 1, fin(3))).collect();
        edges.push((2, 7, fin(3)));
        let e8 = CoxeterMatrix::from_edges(8, &edges);
        assert!(is_spherical_irreducible(&e8, e8.full_set()));
        // Ẽ_8: arms 1, 2, 5
        let mut edges: Vec<_> = (0..7).map(|i| (i, i + 1, fin(3))).collect();
        edges.push((2, 8, fin(3)));
        let e8t = CoxeterMatrix::from_edges(9, &edges);
        assert!(!is_spherical_irreducible(&e8t, e8t.full_set()));
        assert!(is_affine_irreducible(&e8t, e8t.full_set()));
    }

    #[test]
    fn affine_type_table() {
        let cycle = CoxeterMatrix::from_edges(3, &[(0, 1, THREE), (1, 2, THREE), (0, 2, THREE)]);
        assert!(is_affine_irreducible(&cycle, cycle.full_set()));
        assert!(is_affine_irreducible(&path(&[4, 3, 4]), IndexSet::full(4)));
        assert!(is_affine_irreducible(&path(&[3, 3, 4, 3]), IndexSet::full(5)));
        assert!(is_affine_irreducible(&path(&[6, 3]), IndexSet::full(3)));
        assert!(!is_affine_irreducible(&path(&[4, 3, 3]), IndexSet::full(4)));
        // B̃_3: centre 0, leaves 1, 2 and 3 with the edge 0-3 labelled 4
        let b3t = CoxeterMatrix::from_edges(4, &[(0, 1, THREE), (0, 2, THREE), (0, 3, fin(4))]);
        assert!(is_affine_irreducible(&b3t, b3t.full_set()));
        // D̃_4
        let d4t = CoxeterMatrix::from_edges(5, &[(0, 1, THREE), (0, 2, THREE), (0, 3, THREE), (0, 4, THREE)]);
        assert!(is_affine_irreducible(&d4t, d4t.full_set()));
        // D̃_5
        let d5t = CoxeterMatrix::from_edges(
            6,
            &[(0, 1, THREE), (0, 2, THREE), (0, 3, THREE), (3, 4, THREE), (3, 5, THREE)],
        );
        assert!(is_affine_irreducible(&d5t, d5t.full_set()));
    }

    #[test]
    fn index_set_serialization() {
        let s: IndexSet = "3,1".parse().unwrap();
        assert_eq!(s.to_string(), "1,3");
        assert_eq!("-".parse::<IndexSet>().unwrap(), IndexSet::EMPTY);
        assert_eq!(IndexSet::full(3).subsets().count(), 8);
        assert_eq!(IndexSet::from_bits(0b101).subsets().count(), 4);
    }
}
