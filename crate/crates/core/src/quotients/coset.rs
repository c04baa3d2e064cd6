//! Todd–Coxeter coset enumeration for Coxeter presentations.
//!
//! Generators are involutions, so every column of the table is its own
//! inverse column: defining `c · s = d` also defines `d · s = c`. The
//! relators are `(s_i s_j)^{m_ij}` for every finite off-diagonal entry.
//! Enumeration is HLT style (scan every relator at every live coset, then
//! fill the row), with coincidences merged through a union-find forwarding
//! array.

use std::collections::VecDeque;

use crate::diagram::{CoxeterMatrix, Entry};
use crate::words::Word;

use super::perm::Perm;

const NONE: u32 = u32::MAX;

/// A complete coset table: the action of each generator on `0..index`,
/// where coset 0 is the subgroup itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    actions: Vec<Perm>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.actions.first().map_or(1, Perm::degree)
    }

    pub fn action(&self, s: usize) -> &Perm {
        &self.actions[s]
    }

    pub fn actions(&self) -> &[Perm] {
        &self.actions
    }

    /// Coset reached from `coset` by reading `word`.
    pub fn trace(&self, coset: usize, word: &[u8]) -> usize {
        word.iter().fold(coset, |c, &s| self.actions[s as usize].apply(c))
    }

    /// One line per generator: the 1-based images of cosets `1..=index`.
    pub fn to_text(&self) -> String {
        self.actions
            .iter()
            .map(|p| {
                p.images()
                    .iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CosetEnumeration {
    Complete(CosetTable),
    CapExceeded(usize),
}

/// Relators of the Coxeter presentation, excluding the involution relators
/// which the table enforces structurally.
pub fn coxeter_relators(m: &CoxeterMatrix) -> Vec<Vec<u8>> {
    let n = m.rank();
    let mut rels = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if let Entry::Finite(k) = m.m(i, j) {
                let mut r = Vec::with_capacity(2 * k as usize);
                for _ in 0..k {
                    r.push(i as u8);
                    r.push(j as u8);
                }
                rels.push(r);
            }
        }
    }
    rels
}

struct Enumerator {
    n: usize,
    table: Vec<u32>,
    forward: Vec<u32>,
    live: usize,
    cap: usize,
    queue: VecDeque<u32>,
}

struct Overflow;

impl Enumerator {
    fn new(n: usize, cap: usize) -> Self {
        Enumerator {
            n,
            table: vec![NONE; n],
            forward: vec![0],
            live: 1,
            cap,
            queue: VecDeque::new(),
        }
    }

    fn get(&self, c: u32, s: u8) -> u32 {
        self.table[c as usize * self.n + s as usize]
    }

    fn set(&mut self, c: u32, s: u8, d: u32) {
        self.table[c as usize * self.n + s as usize] = d;
    }

    fn is_live(&self, c: u32) -> bool {
        self.forward[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.forward[r as usize] != r {
            r = self.forward[r as usize];
        }
        let mut cur = c;
        while self.forward[cur as usize] != r {
            let next = self.forward[cur as usize];
            self.forward[cur as usize] = r;
            cur = next;
        }
        r
    }

    fn define(&mut self, c: u32, s: u8) -> Result<u32, Overflow> {
        if self.live >= self.cap {
            return Err(Overflow);
        }
        let d = self.forward.len() as u32;
        self.forward.push(d);
        self.table.extend(std::iter::repeat(NONE).take(self.n));
        self.live += 1;
        self.set(c, s, d);
        self.set(d, s, c);
        Ok(d)
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, drop) = (a.min(b), a.max(b));
        self.forward[drop as usize] = keep;
        self.live -= 1;
        self.queue.push_back(drop);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(gamma) = self.queue.pop_front() {
            for s in 0..self.n as u8 {
                let delta = self.get(gamma, s);
                if delta == NONE {
                    continue;
                }
                self.set(gamma, s, NONE);
                if self.get(delta, s) == gamma {
                    self.set(delta, s, NONE);
                }
                let mu = self.rep(gamma);
                let nu = self.rep(delta);
                let mu_s = self.get(mu, s);
                if mu_s != NONE {
                    self.merge(nu, mu_s);
                } else {
                    let nu_s = self.get(nu, s);
                    if nu_s != NONE {
                        self.merge(mu, nu_s);
                    } else {
                        self.set(mu, s, nu);
                        self.set(nu, s, mu);
                    }
                }
            }
        }
    }

    /// Scan `word` at coset `c`, defining new cosets to complete it.
    fn scan_and_fill(&mut self, c: u32, word: &[u8]) -> Result<(), Overflow> {
        let mut f = c;
        let mut b = c;
        let mut i = 0isize;
        let mut j = word.len() as isize - 1;
        loop {
            while i <= j && self.get(f, word[i as usize]) != NONE {
                f = self.get(f, word[i as usize]);
                i += 1;
            }
            if i > j {
                if f != c {
                    self.coincidence(f, c);
                }
                return Ok(());
            }
            while j >= i && self.get(b, word[j as usize]) != NONE {
                b = self.get(b, word[j as usize]);
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                let s = word[i as usize];
                self.set(f, s, b);
                self.set(b, s, f);
                return Ok(());
            }
            self.define(f, word[i as usize])?;
        }
    }

    fn run(&mut self, relators: &[Vec<u8>], subgroup: &[Vec<u8>]) -> Result<(), Overflow> {
        for w in subgroup {
            let r = self.rep(0);
            self.scan_and_fill(r, w)?;
        }
        let mut alpha = 0u32;
        while (alpha as usize) < self.forward.len() {
            if self.is_live(alpha) {
                for rel in relators {
                    if !self.is_live(alpha) {
                        break;
                    }
                    self.scan_and_fill(alpha, rel)?;
                }
                for s in 0..self.n as u8 {
                    if self.is_live(alpha) && self.get(alpha, s) == NONE {
                        self.define(alpha, s)?;
                    }
                }
            }
            alpha += 1;
        }
        Ok(())
    }

    /// Renumber live cosets breadth-first from coset 0.
    fn compact(&mut self) -> CosetTable {
        let start = self.rep(0);
        let mut number = vec![NONE; self.forward.len()];
        let mut order = vec![start];
        number[start as usize] = 0;
        let mut k = 0;
        while k < order.len() {
            let c = order[k];
            for s in 0..self.n as u8 {
                let d = self.rep(self.get(c, s));
                if number[d as usize] == NONE {
                    number[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
            k += 1;
        }
        let actions = (0..self.n as u8)
            .map(|s| {
                let images = order
                    .iter()
                    .map(|&c| {
                        let d = self.get(c, s);
                        number[self.rep(d) as usize]
                    })
                    .collect();
                Perm::from_images(images).expect("completed coset table column is a permutation")
            })
            .collect();
        CosetTable { actions }
    }
}

/// Enumerate the cosets of the subgroup generated by `subgroup_gens` in the
/// Coxeter group of `m`, keeping at most `cap` live cosets.
///
/// A returned table has been checked: every relator closes at every coset
/// and every subgroup generator fixes coset 0.
pub fn todd_coxeter(m: &CoxeterMatrix, subgroup_gens: &[Word], cap: usize) -> CosetEnumeration {
    let relators = coxeter_relators(m);
    let subgroup: Vec<Vec<u8>> = subgroup_gens.iter().map(|w| w.letters().to_vec()).collect();
    let mut e = Enumerator::new(m.rank(), cap.max(1));
    if e.run(&relators, &subgroup).is_err() {
        return CosetEnumeration::CapExceeded(cap);
    }
    let table = e.compact();
    assert!(
        verify_table(&table, &relators, &subgroup),
        "coset enumeration produced a table that fails relator tracing"
    );
    CosetEnumeration::Complete(table)
}

/// Relator tracing at every coset plus subgroup generators fixing coset 0.
pub fn verify_table(table: &CosetTable, relators: &[Vec<u8>], subgroup: &[Vec<u8>]) -> bool {
    let involutive = table
        .actions()
        .iter()
        .all(|p| p.then(p).is_identity());
    involutive
        && (0..table.index()).all(|c| relators.iter().all(|r| table.trace(c, r) == c))
        && subgroup.iter().all(|w| table.trace(0, w) == 0)
}
