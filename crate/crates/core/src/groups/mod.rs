//! Group descriptors, canonical element forms, homomorphisms and generation
//! testing.
//!
//! Four atomic kinds are supported (finite abelian by invariant factors,
//! finite multiplication table, free, free product of cyclics) plus finite
//! direct products of atoms, which arise as limits of group diagrams.
//! Elements always live in canonical normal form, so equality is structural.

mod limit;
mod stallings;

pub use limit::{diagram_limit, certify_limit_iso, GroupDiagram, LimitCertificate, LimitResult};

use num_integer::Integer;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("malformed group descriptor: {0}")]
    MalformedDescriptor(String),
    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),
    #[error("bad element: {0}")]
    BadElement(String),
    #[error("element does not belong to this group: {0}")]
    MismatchedGroups(String),
    #[error("map is not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("homomorphism is not surjective")]
    NotSurjective,
    #[error("cannot parse element '{input}': {reason}")]
    Parse { input: String, reason: String },
    #[error("unsupported diagram shape: {0}")]
    UnsupportedShape(String),
    #[error("certificate failure: {0}")]
    CertificateFailure(String),
    #[error("cannot enumerate an infinite group without a radius")]
    InfiniteEnumeration,
}

/// Three-valued answer for generation questions on groups where the word
/// problem forces honesty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generates {
    Yes,
    No,
    Unknown,
}

/// One directly indecomposable-ish building block. `FiniteAbelian` carries a
/// divisor chain d1 | d2 | ...; the empty chain is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    FiniteAbelian { factors: Vec<u64> },
    FiniteTable { names: Vec<String>, table: Vec<Vec<usize>>, identity: usize },
    Free { names: Vec<String> },
    FreeProductCyclic { orders: Vec<Option<u64>>, names: Vec<String> },
}

/// A group: a direct product of atoms (usually just one).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupDescriptor {
    atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AtomElement {
    /// Residue per invariant factor.
    Residues(Vec<u64>),
    /// Index into the table.
    Index(usize),
    /// Reduced word, run-length encoded: exponents nonzero, adjacent
    /// generators distinct.
    Word(Vec<(usize, i64)>),
    /// Alternating syllables: adjacent factors distinct; finite-factor
    /// exponents lie in 1..order, infinite-factor exponents are nonzero.
    Syllables(Vec<(usize, i64)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub(crate) parts: Vec<AtomElement>,
}

impl Atom {
    fn is_trivial(&self) -> bool {
        match self {
            Atom::FiniteAbelian { factors } => factors.is_empty(),
            Atom::FiniteTable { names, .. } => names.len() == 1,
            Atom::Free { names } => names.is_empty(),
            Atom::FreeProductCyclic { orders, .. } => orders.is_empty(),
        }
    }

    fn order(&self) -> Option<u128> {
        match self {
            Atom::FiniteAbelian { factors } => {
                Some(factors.iter().map(|d| *d as u128).product())
            }
            Atom::FiniteTable { names, .. } => Some(names.len() as u128),
            Atom::Free { names } => {
                if names.is_empty() {
                    Some(1)
                } else {
                    None
                }
            }
            Atom::FreeProductCyclic { orders, .. } => match orders.len() {
                0 => Some(1),
                1 => orders[0].map(|n| n as u128),
                _ => None,
            },
        }
    }

    fn generator_names(&self) -> Vec<String> {
        match self {
            Atom::FiniteAbelian { factors } => match factors.len() {
                0 => vec![],
                1 => vec!["t".to_string()],
                k => (1..=k).map(|i| format!("t{i}")).collect(),
            },
            Atom::FiniteTable { names, .. } => names.clone(),
            Atom::Free { names } => names.clone(),
            Atom::FreeProductCyclic { names, .. } => names.clone(),
        }
    }

    fn generator_count(&self) -> usize {
        match self {
            Atom::FiniteAbelian { factors } => factors.len(),
            Atom::FiniteTable { names, .. } => names.len(),
            Atom::Free { names } => names.len(),
            Atom::FreeProductCyclic { orders, .. } => orders.len(),
        }
    }

    fn identity(&self) -> AtomElement {
        match self {
            Atom::FiniteAbelian { factors } => AtomElement::Residues(vec![0; factors.len()]),
            Atom::FiniteTable { identity, .. } => AtomElement::Index(*identity),
            Atom::Free { .. } => AtomElement::Word(vec![]),
            Atom::FreeProductCyclic { .. } => AtomElement::Syllables(vec![]),
        }
    }

    fn generator(&self, i: usize) -> AtomElement {
        match self {
            Atom::FiniteAbelian { factors } => {
                let mut r = vec![0; factors.len()];
                r[i] = if factors[i] == 1 { 0 } else { 1 };
                AtomElement::Residues(r)
            }
            Atom::FiniteTable { .. } => AtomElement::Index(i),
            Atom::Free { .. } => AtomElement::Word(vec![(i, 1)]),
            Atom::FreeProductCyclic { orders, .. } => {
                if orders[i] == Some(1) {
                    AtomElement::Syllables(vec![])
                } else {
                    AtomElement::Syllables(vec![(i, 1)])
                }
            }
        }
    }

    fn validate_element(&self, e: &AtomElement) -> Result<(), GroupError> {
        let bad = |msg: String| Err(GroupError::BadElement(msg));
        match (self, e) {
            (Atom::FiniteAbelian { factors }, AtomElement::Residues(r)) => {
                if r.len() != factors.len() {
                    return bad(format!("expected {} residues, got {}", factors.len(), r.len()));
                }
                for (a, d) in r.iter().zip(factors) {
                    if *a >= *d {
                        return bad(format!("residue {a} out of range mod {d}"));
                    }
                }
                Ok(())
            }
            (Atom::FiniteTable { names, .. }, AtomElement::Index(i)) => {
                if *i >= names.len() {
                    return bad(format!("index {i} out of range"));
                }
                Ok(())
            }
            (Atom::Free { names }, AtomElement::Word(w)) => {
                for (i, ((g, e), next)) in
                    w.iter().zip(w.iter().skip(1).map(Some).chain([None])).enumerate()
                {
                    if *g >= names.len() {
                        return bad(format!("generator {g} out of range"));
                    }
                    if *e == 0 {
                        return bad(format!("zero exponent at position {i}"));
                    }
                    if let Some((h, _)) = next {
                        if h == g {
                            return bad(format!("unreduced word at position {i}"));
                        }
                    }
                }
                Ok(())
            }
            (Atom::FreeProductCyclic { orders, .. }, AtomElement::Syllables(w)) => {
                for (i, (g, e)) in w.iter().enumerate() {
                    if *g >= orders.len() {
                        return bad(format!("factor {g} out of range"));
                    }
                    match orders[*g] {
                        Some(n) => {
                            if *e <= 0 || *e as u64 >= n {
                                return bad(format!(
                                    "syllable exponent {e} out of range mod {n}"
                                ));
                            }
                        }
                        None => {
                            if *e == 0 {
                                return bad(format!("zero syllable exponent at {i}"));
                            }
                        }
                    }
                    if i + 1 < w.len() && w[i + 1].0 == *g {
                        return bad(format!("non-alternating syllables at {i}"));
                    }
                }
                Ok(())
            }
            _ => bad("element shape does not match group kind".into()),
        }
    }

    fn multiply(&self, a: &AtomElement, b: &AtomElement) -> AtomElement {
        match (self, a, b) {
            (Atom::FiniteAbelian { factors }, AtomElement::Residues(x), AtomElement::Residues(y)) => {
                AtomElement::Residues(
                    x.iter().zip(y).zip(factors).map(|((a, b), d)| (a + b) % d).collect(),
                )
            }
            (Atom::FiniteTable { table, .. }, AtomElement::Index(i), AtomElement::Index(j)) => {
                AtomElement::Index(table[*i][*j])
            }
            (Atom::Free { .. }, AtomElement::Word(x), AtomElement::Word(y)) => {
                let mut acc = x.clone();
                for &(g, e) in y {
                    push_run_free(&mut acc, g, e);
                }
                AtomElement::Word(acc)
            }
            (Atom::FreeProductCyclic { orders, .. }, AtomElement::Syllables(x), AtomElement::Syllables(y)) => {
                let mut acc = x.clone();
                for &(g, e) in y {
                    push_syllable(&mut acc, orders, g, e);
                }
                AtomElement::Syllables(acc)
            }
            _ => unreachable!("elements validated before multiplication"),
        }
    }

    fn invert(&self, a: &AtomElement) -> AtomElement {
        match (self, a) {
            (Atom::FiniteAbelian { factors }, AtomElement::Residues(x)) => AtomElement::Residues(
                x.iter().zip(factors).map(|(a, d)| if *a == 0 { 0 } else { d - a }).collect(),
            ),
            (Atom::FiniteTable { table, identity, .. }, AtomElement::Index(i)) => {
                let j = (0..table.len())
                    .find(|j| table[*i][*j] == *identity)
                    .expect("validated table has inverses");
                AtomElement::Index(j)
            }
            (Atom::Free { .. }, AtomElement::Word(w)) => {
                AtomElement::Word(w.iter().rev().map(|&(g, e)| (g, -e)).collect())
            }
            (Atom::FreeProductCyclic { orders, .. }, AtomElement::Syllables(w)) => {
                let mut acc = Vec::with_capacity(w.len());
                for &(g, e) in w.iter().rev() {
                    push_syllable(&mut acc, orders, g, -e);
                }
                AtomElement::Syllables(acc)
            }
            _ => unreachable!("elements validated before inversion"),
        }
    }

    /// Letter length used for radius-bounded enumeration: 0 for finite kinds,
    /// total letter count for free words, and for free products the syllable
    /// count with infinite-factor syllables weighted by |exponent|.
    fn length(&self, e: &AtomElement) -> usize {
        match (self, e) {
            (Atom::Free { .. }, AtomElement::Word(w)) => {
                w.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
            }
            (Atom::FreeProductCyclic { orders, .. }, AtomElement::Syllables(w)) => w
                .iter()
                .map(|(g, e)| match orders[*g] {
                    Some(_) => 1,
                    None => e.unsigned_abs() as usize,
                })
                .sum(),
            _ => 0,
        }
    }

    fn element_order(&self, e: &AtomElement) -> Option<u64> {
        match (self, e) {
            (Atom::FiniteAbelian { factors }, AtomElement::Residues(r)) => {
                let mut ord = 1u64;
                for (a, d) in r.iter().zip(factors) {
                    let o = d / a.gcd(d).max(1);
                    let o = if *a == 0 { 1 } else { o };
                    ord = ord.lcm(&o);
                }
                Some(ord)
            }
            (Atom::FiniteTable { table, identity, .. }, AtomElement::Index(i)) => {
                // acc holds g^k at the top of iteration k.
                let mut acc = *i;
                for k in 1..=table.len() as u64 {
                    if acc == *identity {
                        return Some(k);
                    }
                    acc = table[acc][*i];
                }
                None
            }
            (Atom::Free { .. }, AtomElement::Word(w)) => {
                if w.is_empty() {
                    Some(1)
                } else {
                    None
                }
            }
            (Atom::FreeProductCyclic { orders, .. }, AtomElement::Syllables(w)) => {
                // Cyclically reduce, then read off: length 0 is the identity,
                // a single syllable is torsion inside its factor, and any
                // longer cyclically reduced word has infinite order.
                let mut w = w.clone();
                while w.len() >= 2 && w.first().map(|s| s.0) == w.last().map(|s| s.0) {
                    let (g, e_first) = w.remove(0);
                    let (_, e_last) = w.pop().expect("len >= 2");
                    let mut merged = Vec::new();
                    push_syllable(&mut merged, orders, g, e_last + e_first);
                    if let Some(&(_, e)) = merged.first() {
                        w.insert(0, (g, e));
                    }
                }
                match w.len() {
                    0 => Some(1),
                    1 => {
                        let (g, e) = w[0];
                        orders[g].map(|n| n / (e.unsigned_abs() % n).gcd(&n).max(1))
                    }
                    _ => None,
                }
            }
            _ => unreachable!("elements validated before order computation"),
        }
    }

    fn enumerate(&self, radius: Option<usize>) -> Result<Vec<AtomElement>, GroupError> {
        match self {
            Atom::FiniteAbelian { factors } => {
                let mut out = vec![vec![]];
                for d in factors {
                    let mut next = Vec::with_capacity(out.len() * *d as usize);
                    for prefix in &out {
                        for a in 0..*d {
                            let mut t = prefix.clone();
                            t.push(a);
                            next.push(t);
                        }
                    }
                    out = next;
                }
                Ok(out.into_iter().map(AtomElement::Residues).collect())
            }
            Atom::FiniteTable { names, .. } => {
                Ok((0..names.len()).map(AtomElement::Index).collect())
            }
            Atom::Free { names } => {
                if names.is_empty() {
                    return Ok(vec![AtomElement::Word(vec![])]);
                }
                let r = radius.ok_or(GroupError::InfiniteEnumeration)?;
                let mut out = vec![AtomElement::Word(vec![])];
                let mut frontier: Vec<Vec<(usize, i64)>> = vec![vec![]];
                for _ in 0..r {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for g in 0..names.len() {
                            for e in [1i64, -1] {
                                let last = w.last().copied();
                                if let Some((lg, le)) = last {
                                    if lg == g && (le > 0) != (e > 0) {
                                        continue;
                                    }
                                }
                                let mut t = w.clone();
                                push_run_free(&mut t, g, e);
                                next.push(t);
                            }
                        }
                    }
                    out.extend(next.iter().cloned().map(AtomElement::Word));
                    frontier = next;
                }
                Ok(out)
            }
            Atom::FreeProductCyclic { orders, .. } => {
                if orders.is_empty() {
                    return Ok(vec![AtomElement::Syllables(vec![])]);
                }
                if orders.len() == 1 {
                    if let Some(n) = orders[0] {
                        return Ok((0..n as i64)
                            .map(|e| {
                                if e == 0 {
                                    AtomElement::Syllables(vec![])
                                } else {
                                    AtomElement::Syllables(vec![(0, e)])
                                }
                            })
                            .collect());
                    }
                }
                let r = radius.ok_or(GroupError::InfiniteEnumeration)?;
                // Breadth-first over alternating syllable words in
                // lexicographic factor order.
                let mut out = vec![AtomElement::Syllables(vec![])];
                let mut frontier: Vec<Vec<(usize, i64)>> = vec![vec![]];
                let mut seen: HashSet<Vec<(usize, i64)>> = HashSet::new();
                seen.insert(vec![]);
                for _ in 0..r {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for (g, order) in orders.iter().enumerate() {
                            if w.last().map(|s| s.0) == Some(g) {
                                continue;
                            }
                            let exps: Vec<i64> = match order {
                                Some(n) => (1..*n as i64).collect(),
                                None => vec![1, -1],
                            };
                            for e in exps {
                                let mut t = w.clone();
                                t.push((g, e));
                                if self.length(&AtomElement::Syllables(t.clone())) <= r
                                    && seen.insert(t.clone())
                                {
                                    next.push(t);
                                }
                            }
                        }
                        // Infinite factors also extend an existing trailing
                        // syllable by one letter.
                        if let Some(&(g, e)) = w.last() {
                            if orders[g].is_none() {
                                let mut t = w.clone();
                                let step = if e > 0 { 1 } else { -1 };
                                t.last_mut().expect("nonempty").1 = e + step;
                                if self.length(&AtomElement::Syllables(t.clone())) <= r
                                    && seen.insert(t.clone())
                                {
                                    next.push(t);
                                }
                            }
                        }
                    }
                    out.extend(next.iter().cloned().map(AtomElement::Syllables));
                    frontier = next;
                }
                Ok(out)
            }
        }
    }

    fn is_abelian(&self) -> bool {
        match self {
            Atom::FiniteAbelian { .. } => true,
            Atom::FiniteTable { table, .. } => {
                let n = table.len();
                (0..n).all(|i| (0..n).all(|j| table[i][j] == table[j][i]))
            }
            Atom::Free { names } => names.len() <= 1,
            Atom::FreeProductCyclic { orders, .. } => orders.len() <= 1,
        }
    }
}

fn push_run_free(acc: &mut Vec<(usize, i64)>, g: usize, e: i64) {
    if e == 0 {
        return;
    }
    match acc.last_mut() {
        Some((lg, le)) if *lg == g => {
            *le += e;
            if *le == 0 {
                acc.pop();
            }
        }
        _ => acc.push((g, e)),
    }
}

fn push_syllable(acc: &mut Vec<(usize, i64)>, orders: &[Option<u64>], g: usize, e: i64) {
    let canon = |x: i64| -> i64 {
        match orders[g] {
            Some(n) => x.rem_euclid(n as i64),
            None => x,
        }
    };
    let e = canon(e);
    if e == 0 {
        return;
    }
    match acc.last().copied() {
        Some((lg, le)) if lg == g => {
            // Merging cannot cascade: acc was alternating, so after a full
            // cancellation the exposed last syllable has a different factor.
            let merged = canon(le + e);
            acc.pop();
            if merged != 0 {
                acc.push((g, merged));
            }
        }
        _ => acc.push((g, e)),
    }
}

/// Collapse an arbitrary list of moduli (each >= 1) to the canonical divisor
/// chain of the corresponding finite abelian group.
pub fn invariant_factors(moduli: &[u64]) -> Vec<u64> {
    let mut primary: HashMap<u64, Vec<u32>> = HashMap::new();
    for &m in moduli {
        let mut n = m;
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 {
                let mut k = 0u32;
                while n % d == 0 {
                    n /= d;
                    k += 1;
                }
                primary.entry(d).or_default().push(k);
            }
            d += 1;
        }
        if n > 1 {
            primary.entry(n).or_default().push(1);
        }
    }
    let mut width = 0;
    for v in primary.values_mut() {
        v.sort_unstable_by(|a, b| b.cmp(a));
        width = width.max(v.len());
    }
    let mut chain = vec![1u64; width];
    for (p, powers) in primary {
        for (slot, k) in powers.into_iter().enumerate() {
            chain[slot] *= p.pow(k);
        }
    }
    chain.reverse();
    chain
}

impl GroupDescriptor {
    pub fn trivial() -> Self {
        GroupDescriptor { atoms: vec![Atom::FiniteAbelian { factors: vec![] }] }
    }

    pub fn finite_abelian(factors: Vec<u64>) -> Result<Self, GroupError> {
        for w in factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(GroupError::MalformedDescriptor(format!(
                    "invariant factors must form a divisor chain: {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        if factors.iter().any(|d| *d < 2) {
            return Err(GroupError::MalformedDescriptor(
                "invariant factors must be >= 2 (trivial group is the empty list)".into(),
            ));
        }
        Ok(GroupDescriptor { atoms: vec![Atom::FiniteAbelian { factors }] })
    }

    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::MalformedDescriptor("cyclic order must be >= 1".into()));
        }
        if n == 1 {
            Ok(Self::trivial())
        } else {
            Self::finite_abelian(vec![n])
        }
    }

    pub fn finite_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = names.len();
        if n == 0 {
            return Err(GroupError::MalformedDescriptor("empty table".into()));
        }
        if names.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(GroupError::MalformedDescriptor("duplicate element names".into()));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(GroupError::NotAGroup("table is not n x n".into()));
        }
        if table.iter().flatten().any(|e| *e >= n) {
            return Err(GroupError::NotAGroup("table entry out of range".into()));
        }
        let identity = (0..n)
            .find(|e| (0..n).all(|i| table[*e][i] == i && table[i][*e] == i))
            .ok_or_else(|| GroupError::NotAGroup("no identity element".into()))?;
        for i in 0..n {
            if !(0..n).any(|j| table[i][j] == identity) {
                return Err(GroupError::NotAGroup(format!("{} has no inverse", names[i])));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAGroup(format!(
                            "associativity fails at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(GroupDescriptor { atoms: vec![Atom::FiniteTable { names, table, identity }] })
    }

    /// Table constructor for element sets already known to be groups
    /// (subgroup closures, compatible-tuple limits). Checks only shape and
    /// identity, not associativity.
    pub(crate) fn finite_table_unchecked(
        names: Vec<String>,
        table: Vec<Vec<usize>>,
    ) -> Result<Self, GroupError> {
        let n = names.len();
        if n == 0 || table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(GroupError::NotAGroup("table is not n x n".into()));
        }
        let identity = (0..n)
            .find(|e| (0..n).all(|i| table[*e][i] == i && table[i][*e] == i))
            .ok_or_else(|| GroupError::NotAGroup("no identity element".into()))?;
        Ok(GroupDescriptor { atoms: vec![Atom::FiniteTable { names, table, identity }] })
    }

    pub fn free(rank: usize, names: Option<Vec<String>>) -> Result<Self, GroupError> {
        let names = names.unwrap_or_else(|| (1..=rank).map(|i| format!("s{i}")).collect());
        if names.len() != rank {
            return Err(GroupError::MalformedDescriptor(format!(
                "expected {rank} generator names, got {}",
                names.len()
            )));
        }
        if names.iter().collect::<BTreeSet<_>>().len() != rank {
            return Err(GroupError::MalformedDescriptor("duplicate generator names".into()));
        }
        Ok(GroupDescriptor { atoms: vec![Atom::Free { names }] })
    }

    pub fn free_product_cyclic(
        orders: Vec<Option<u64>>,
        names: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        if orders.iter().any(|o| *o == Some(0) || *o == Some(1)) {
            return Err(GroupError::MalformedDescriptor(
                "cyclic factor orders must be >= 2 or infinite".into(),
            ));
        }
        let names = names.unwrap_or_else(|| {
            (0..orders.len())
                .map(|i| {
                    let c = (b'a' + (i % 26) as u8) as char;
                    if i < 26 {
                        c.to_string()
                    } else {
                        format!("{c}{}", i / 26)
                    }
                })
                .collect()
        });
        if names.len() != orders.len() {
            return Err(GroupError::MalformedDescriptor(format!(
                "expected {} generator names, got {}",
                orders.len(),
                names.len()
            )));
        }
        if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
            return Err(GroupError::MalformedDescriptor("duplicate generator names".into()));
        }
        Ok(GroupDescriptor { atoms: vec![Atom::FreeProductCyclic { orders, names }] })
    }

    /// Direct product; flattens nested products and drops trivial factors.
    pub fn direct_product(factors: Vec<GroupDescriptor>) -> Self {
        let mut atoms = Vec::new();
        for f in factors {
            for a in f.atoms {
                if !a.is_trivial() {
                    atoms.push(a);
                }
            }
        }
        if atoms.is_empty() {
            return Self::trivial();
        }
        GroupDescriptor { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_trivial(&self) -> bool {
        self.atoms.iter().all(|a| a.is_trivial())
    }

    /// Structural name for reports: "1", "Z", "F2", "C2 x C4", "C2*C3",
    /// "table(6)", products joined with " x ".
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for atom in &self.atoms {
            match atom {
                Atom::FiniteAbelian { factors } => {
                    parts.extend(factors.iter().map(|d| format!("C{d}")));
                }
                Atom::Free { names } => match names.len() {
                    0 => {}
                    1 => parts.push("Z".to_string()),
                    r => parts.push(format!("F{r}")),
                },
                Atom::FreeProductCyclic { orders, .. } => {
                    if !orders.is_empty() {
                        let syllables: Vec<String> = orders
                            .iter()
                            .map(|o| match o {
                                Some(n) => format!("C{n}"),
                                None => "Z".to_string(),
                            })
                            .collect();
                        parts.push(syllables.join("*"));
                    }
                }
                Atom::FiniteTable { names, .. } => parts.push(format!("table({})", names.len())),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" x ")
        }
    }

    pub fn order(&self) -> Option<u128> {
        self.atoms.iter().map(|a| a.order()).try_fold(1u128, |acc, o| o.map(|o| acc * o))
    }

    pub fn is_abelian(&self) -> bool {
        self.atoms.iter().all(|a| a.is_abelian())
    }

    /// Canonical generating list. For products with name collisions across
    /// atoms, names are qualified as `p<atom>.<name>`.
    pub fn generator_names(&self) -> Vec<String> {
        let bare: Vec<Vec<String>> = self.atoms.iter().map(|a| a.generator_names()).collect();
        let flat: Vec<&String> = bare.iter().flatten().collect();
        let unique = flat.iter().collect::<BTreeSet<_>>().len() == flat.len();
        if unique {
            bare.into_iter().flatten().collect()
        } else {
            bare.into_iter()
                .enumerate()
                .flat_map(|(i, names)| {
                    names.into_iter().map(move |n| format!("p{i}.{n}")).collect::<Vec<_>>()
                })
                .collect()
        }
    }

    pub fn generator_count(&self) -> usize {
        self.atoms.iter().map(|a| a.generator_count()).sum()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { parts: self.atoms.iter().map(|a| a.identity()).collect() }
    }

    /// The i-th canonical generator, indexed across atoms.
    pub fn generator(&self, mut i: usize) -> Result<GroupElement, GroupError> {
        let mut parts: Vec<AtomElement> = self.atoms.iter().map(|a| a.identity()).collect();
        for (k, a) in self.atoms.iter().enumerate() {
            let c = a.generator_count();
            if i < c {
                parts[k] = a.generator(i);
                return Ok(GroupElement { parts });
            }
            i -= c;
        }
        Err(GroupError::BadElement(format!("generator index {i} out of range")))
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.generator_count()).map(|i| self.generator(i).expect("in range")).collect()
    }

    pub fn validate(&self, e: &GroupElement) -> Result<(), GroupError> {
        if e.parts.len() != self.atoms.len() {
            return Err(GroupError::MismatchedGroups(format!(
                "element has {} parts, group has {} factors",
                e.parts.len(),
                self.atoms.len()
            )));
        }
        for (a, p) in self.atoms.iter().zip(&e.parts) {
            a.validate_element(p)?;
        }
        Ok(())
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(GroupElement {
            parts: self
                .atoms
                .iter()
                .zip(a.parts.iter().zip(&b.parts))
                .map(|(atom, (x, y))| atom.multiply(x, y))
                .collect(),
        })
    }

    pub fn invert(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.validate(a)?;
        Ok(GroupElement {
            parts: self.atoms.iter().zip(&a.parts).map(|(atom, x)| atom.invert(x)).collect(),
        })
    }

    pub fn power(&self, a: &GroupElement, e: i64) -> Result<GroupElement, GroupError> {
        let base = if e < 0 { self.invert(a)? } else { a.clone() };
        let mut acc = self.identity();
        for _ in 0..e.unsigned_abs() {
            acc = self.multiply(&acc, &base)?;
        }
        Ok(acc)
    }

    /// Canonical form of a raw word over the canonical generators, given as
    /// (generator index, exponent) pairs.
    pub fn normalize(&self, word: &[(usize, i64)]) -> Result<GroupElement, GroupError> {
        let mut acc = self.identity();
        for &(g, e) in word {
            let gen = self.generator(g)?;
            acc = self.multiply(&acc, &self.power(&gen, e)?)?;
        }
        Ok(acc)
    }

    pub fn element_order(&self, e: &GroupElement) -> Result<Option<u64>, GroupError> {
        self.validate(e)?;
        let mut ord = 1u64;
        for (atom, p) in self.atoms.iter().zip(&e.parts) {
            match atom.element_order(p) {
                Some(o) => ord = ord.lcm(&o),
                None => return Ok(None),
            }
        }
        Ok(Some(ord))
    }

    /// Letter length of the normal form (0 for finite parts).
    pub fn word_length(&self, e: &GroupElement) -> usize {
        self.atoms.iter().zip(&e.parts).map(|(a, p)| a.length(p)).sum()
    }

    /// All elements when finite; elements of word length <= radius otherwise.
    /// Deterministic order: per-atom enumeration, first atom slowest.
    pub fn enumerate(&self, radius: Option<usize>) -> Result<Vec<GroupElement>, GroupError> {
        let mut out: Vec<Vec<AtomElement>> = vec![vec![]];
        for atom in &self.atoms {
            let parts = atom.enumerate(radius)?;
            let mut next = Vec::with_capacity(out.len() * parts.len());
            for prefix in &out {
                for p in &parts {
                    let mut t = prefix.clone();
                    t.push(p.clone());
                    next.push(t);
                }
            }
            out = next;
        }
        let mut elements: Vec<GroupElement> =
            out.into_iter().map(|parts| GroupElement { parts }).collect();
        if let Some(r) = radius {
            elements.retain(|e| self.word_length(e) <= r);
        }
        Ok(elements)
    }

    // -- rendering and parsing ------------------------------------------------

    pub fn render(&self, e: &GroupElement) -> String {
        let parts: Vec<String> = self
            .atoms
            .iter()
            .zip(&e.parts)
            .map(|(a, p)| render_atom_element(a, p))
            .collect();
        if parts.len() == 1 {
            parts.into_iter().next().expect("single part")
        } else {
            format!("({})", parts.join("; "))
        }
    }

    pub fn parse(&self, input: &str) -> Result<GroupElement, GroupError> {
        let err = |reason: &str| GroupError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s = input.trim();
        let parts: Vec<&str> = if self.atoms.len() == 1 {
            vec![s]
        } else {
            let inner = s
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| err("product element must be parenthesized"))?;
            split_top_level(inner, ';')
        };
        if parts.len() != self.atoms.len() {
            return Err(err("wrong number of product components"));
        }
        let parsed: Result<Vec<AtomElement>, GroupError> = self
            .atoms
            .iter()
            .zip(parts)
            .map(|(a, p)| parse_atom_element(a, p.trim(), input))
            .collect();
        let e = GroupElement { parts: parsed? };
        self.validate(&e)?;
        Ok(e)
    }

    // -- generation -------------------------------------------------------------

    /// Does `subset` generate the whole group? Exact for finite groups
    /// (closure) and free groups (Stallings folding); for free products of
    /// cyclics a sufficient syllable test plus abelianization falsification;
    /// Unknown otherwise.
    pub fn generates(&self, subset: &[GroupElement]) -> Result<Generates, GroupError> {
        for e in subset {
            self.validate(e)?;
        }
        if self.is_trivial() {
            return Ok(Generates::Yes);
        }
        if self.order().is_some() {
            let total = self.order().expect("finite") as usize;
            let closure = self.closure(subset)?;
            return Ok(if closure.len() == total { Generates::Yes } else { Generates::No });
        }
        // A single infinite atom (plus possibly trivial atoms, already
        // dropped by construction).
        if self.atoms.len() == 1 {
            match &self.atoms[0] {
                Atom::Free { names } => {
                    let words: Vec<Vec<(usize, i64)>> = subset
                        .iter()
                        .map(|e| match &e.parts[0] {
                            AtomElement::Word(w) => w.clone(),
                            _ => unreachable!("validated"),
                        })
                        .collect();
                    return Ok(if stallings::generates_whole_free_group(names.len(), &words) {
                        Generates::Yes
                    } else {
                        Generates::No
                    });
                }
                Atom::FreeProductCyclic { orders, .. } => {
                    let words: Vec<Vec<(usize, i64)>> = subset
                        .iter()
                        .map(|e| match &e.parts[0] {
                            AtomElement::Syllables(w) => w.clone(),
                            _ => unreachable!("validated"),
                        })
                        .collect();
                    return Ok(fpc_generates(orders, &words));
                }
                _ => unreachable!("finite atoms handled above"),
            }
        }
        Ok(Generates::Unknown)
    }

    /// Subgroup closure of a subset of a finite group.
    pub fn closure(&self, subset: &[GroupElement]) -> Result<Vec<GroupElement>, GroupError> {
        if self.order().is_none() {
            return Err(GroupError::InfiniteEnumeration);
        }
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut out = vec![self.identity()];
        seen.insert(self.identity());
        let mut frontier = out.clone();
        while let Some(x) = frontier.pop() {
            for s in subset {
                for y in [self.multiply(&x, s)?, self.multiply(&x, &self.invert(s)?)?] {
                    if seen.insert(y.clone()) {
                        out.push(y.clone());
                        frontier.push(y);
                    }
                }
            }
        }
        out.sort_by_key(|e| self.render(e));
        Ok(out)
    }

    /// Abelian invariants of a finite abelian group, via order counting: the
    /// counts of elements killed by p^k determine the conjugate of the p-type
    /// partition. Returns None when the group is infinite or not abelian.
    pub fn abelian_invariants(&self) -> Option<Vec<u64>> {
        if !self.is_abelian() {
            return None;
        }
        self.order()?;
        let elements = self.enumerate(None).ok()?;
        let n = elements.len() as u64;
        let mut primes = Vec::new();
        let mut m = n;
        let mut d = 2u64;
        while d * d <= m {
            if m.is_multiple_of(d) {
                primes.push(d);
                while m.is_multiple_of(d) {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        let mut moduli = Vec::new();
        for p in primes {
            // counts[k] = #{g : g^(p^k) = 1} = p^f(k); the increments of f
            // form the conjugate of the p-type partition lambda.
            let mut counts = vec![1u64];
            let mut k = 0u32;
            loop {
                k += 1;
                let pk = p.checked_pow(k)?;
                let c = elements
                    .iter()
                    .filter(|e| {
                        self.element_order(e).ok().flatten().map(|o| pk % o == 0).unwrap_or(false)
                    })
                    .count() as u64;
                if c == *counts.last().expect("nonempty") {
                    break;
                }
                counts.push(c);
            }
            let logs: Vec<u32> = counts
                .iter()
                .map(|c| {
                    let mut l = 0u32;
                    let mut x = *c;
                    while x % p == 0 {
                        x /= p;
                        l += 1;
                    }
                    l
                })
                .collect();
            let conjugate: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
            let max_part = conjugate.first().copied().unwrap_or(0);
            for i in 1..=max_part {
                let lambda_i = conjugate.iter().filter(|c| **c >= i).count() as u32;
                if lambda_i > 0 {
                    moduli.push(p.pow(lambda_i));
                }
            }
        }
        Some(invariant_factors(&moduli))
    }
}

fn fpc_generates(orders: &[Option<u64>], words: &[Vec<(usize, i64)>]) -> Generates {
    // Sufficient yes-test: every factor is hit by a single-syllable word that
    // generates it (no conjugates considered).
    let mut covered = vec![false; orders.len()];
    for w in words {
        if w.len() == 1 {
            let (g, e) = w[0];
            let generates_factor = match orders[g] {
                Some(n) => (e.unsigned_abs() % n).gcd(&n) == 1,
                None => e.abs() == 1,
            };
            if generates_factor {
                covered[g] = true;
            }
        }
    }
    if covered.iter().all(|c| *c) {
        return Generates::Yes;
    }
    // Falsification through the abelianization C_{n_1} x ... x Z x ...
    // If some coordinate of every word's exponent sum vanishes, the subset
    // misses that factor entirely.
    for (g, order) in orders.iter().enumerate() {
        let all_zero = words.iter().all(|w| {
            let sum: i64 = w.iter().filter(|(h, _)| *h == g).map(|(_, e)| *e).sum();
            match order {
                Some(n) => sum.rem_euclid(*n as i64) == 0,
                None => sum == 0,
            }
        });
        if all_zero {
            return Generates::No;
        }
    }
    if orders.iter().all(|o| o.is_some()) {
        // Full closure test in the finite abelianization.
        let factors: Vec<u64> = orders.iter().map(|o| o.expect("finite")).collect();
        let total: u64 = factors.iter().product();
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut frontier = vec![vec![0u64; factors.len()]];
        seen.insert(frontier[0].clone());
        while let Some(x) = frontier.pop() {
            for w in words {
                for sign in [1i64, -1] {
                    let mut y = x.clone();
                    for (g, e) in w {
                        let n = factors[*g];
                        let delta = (sign * e).rem_euclid(n as i64) as u64;
                        y[*g] = (y[*g] + delta) % n;
                    }
                    if seen.insert(y.clone()) {
                        frontier.push(y);
                    }
                }
            }
        }
        if (seen.len() as u64) < total {
            return Generates::No;
        }
    }
    Generates::Unknown
}

fn render_atom_element(atom: &Atom, e: &AtomElement) -> String {
    match (atom, e) {
        (Atom::FiniteAbelian { .. }, AtomElement::Residues(r)) => match r.len() {
            0 => "1".to_string(),
            1 => render_power("t", r[0] as i64),
            _ => {
                let coords: Vec<String> =
                    r.iter().map(|a| render_power("t", *a as i64)).collect();
                format!("({})", coords.join(","))
            }
        },
        (Atom::FiniteTable { names, .. }, AtomElement::Index(i)) => names[*i].clone(),
        (Atom::Free { names }, AtomElement::Word(w)) => render_word(names, w),
        (Atom::FreeProductCyclic { names, .. }, AtomElement::Syllables(w)) => {
            render_word(names, w)
        }
        _ => unreachable!("validated"),
    }
}

fn render_power(name: &str, e: i64) -> String {
    match e {
        0 => "1".to_string(),
        1 => name.to_string(),
        _ => format!("{name}^{e}"),
    }
}

fn render_word(names: &[String], w: &[(usize, i64)]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut out = String::new();
    for (i, (g, e)) in w.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        let _ = write!(out, "{}", render_power(&names[*g], *e));
    }
    out
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_atom_element(atom: &Atom, s: &str, full: &str) -> Result<AtomElement, GroupError> {
    let err = |reason: String| GroupError::Parse { input: full.to_string(), reason };
    match atom {
        Atom::FiniteAbelian { factors } => {
            if factors.is_empty() {
                if s == "1" {
                    return Ok(AtomElement::Residues(vec![]));
                }
                return Err(err("trivial group element must be '1'".into()));
            }
            let coords: Option<Vec<&str>> = if factors.len() == 1 {
                Some(vec![s])
            } else {
                s.strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .map(|inner| split_top_level(inner, ','))
            };
            let Some(coords) = coords.filter(|c| c.len() == factors.len()) else {
                // Fall back to a word in the generators t or t1..tk.
                return parse_word_like(s, &atom.generator_names(), full).map(|w| {
                    let mut r = vec![0u64; factors.len()];
                    for (g, e) in w {
                        r[g] = (r[g] as i64 + e).rem_euclid(factors[g] as i64) as u64;
                    }
                    AtomElement::Residues(r)
                });
            };
            let mut r = Vec::with_capacity(factors.len());
            for (c, d) in coords.iter().zip(factors) {
                let c = c.trim();
                let e: i64 = if c == "1" {
                    0
                } else if c == "t" {
                    1
                } else if let Some(rest) = c.strip_prefix("t^") {
                    rest.parse().map_err(|_| err(format!("bad exponent in '{c}'")))?
                } else {
                    return Err(err(format!("bad coordinate '{c}'")));
                };
                r.push(e.rem_euclid(*d as i64) as u64);
            }
            Ok(AtomElement::Residues(r))
        }
        Atom::FiniteTable { names, .. } => {
            let i = names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| err(format!("unknown element name '{s}'")))?;
            Ok(AtomElement::Index(i))
        }
        Atom::Free { names } => {
            let w = parse_word_like(s, names, full)?;
            let mut acc: Vec<(usize, i64)> = Vec::new();
            for (g, e) in w {
                push_run_free(&mut acc, g, e);
            }
            Ok(AtomElement::Word(acc))
        }
        Atom::FreeProductCyclic { orders, names } => {
            let w = parse_word_like(s, names, full)?;
            let mut acc: Vec<(usize, i64)> = Vec::new();
            for (g, e) in w {
                push_syllable(&mut acc, orders, g, e);
            }
            Ok(AtomElement::Syllables(acc))
        }
    }
}

fn parse_word_like(
    s: &str,
    names: &[String],
    full: &str,
) -> Result<Vec<(usize, i64)>, GroupError> {
    let err = |reason: String| GroupError::Parse { input: full.to_string(), reason };
    let s = s.trim();
    if s == "1" {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    for piece in s.split('*') {
        let piece = piece.trim();
        let (name, exp) = match piece.find('^') {
            Some(i) => {
                let (n, e) = piece.split_at(i);
                let e: i64 =
                    e[1..].trim().parse().map_err(|_| err(format!("bad exponent in '{piece}'")))?;
                (n.trim(), e)
            }
            None => (piece, 1),
        };
        let g = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| err(format!("unknown generator '{name}'")))?;
        out.push((g, exp));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Homomorphisms.

/// A verified homomorphism: images of the canonical source generators whose
/// defining relations were checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: GroupDescriptor,
    target: GroupDescriptor,
    images: Vec<GroupElement>,
}

impl Homomorphism {
    pub fn new(
        source: GroupDescriptor,
        target: GroupDescriptor,
        images: Vec<GroupElement>,
    ) -> Result<Self, GroupError> {
        if images.len() != source.generator_count() {
            return Err(GroupError::NotAHomomorphism(format!(
                "expected {} generator images, got {}",
                source.generator_count(),
                images.len()
            )));
        }
        for img in &images {
            target.validate(img)?;
        }
        let h = Homomorphism { source, target, images };
        h.check_relations()?;
        Ok(h)
    }

    fn check_relations(&self) -> Result<(), GroupError> {
        let fail = |msg: String| Err(GroupError::NotAHomomorphism(msg));
        let names = self.source.generator_names();
        // Per-atom relations.
        let mut offset = 0usize;
        for atom in &self.source.atoms {
            let count = atom.generator_count();
            match atom {
                Atom::FiniteAbelian { factors } => {
                    for (i, d) in factors.iter().enumerate() {
                        let img = &self.images[offset + i];
                        let p = self.target.power(img, *d as i64)?;
                        if p != self.target.identity() {
                            return fail(format!(
                                "image of {} must have order dividing {d}",
                                names[offset + i]
                            ));
                        }
                    }
                    for i in 0..count {
                        for j in (i + 1)..count {
                            let a = &self.images[offset + i];
                            let b = &self.images[offset + j];
                            if self.target.multiply(a, b)? != self.target.multiply(b, a)? {
                                return fail(format!(
                                    "images of {} and {} must commute",
                                    names[offset + i],
                                    names[offset + j]
                                ));
                            }
                        }
                    }
                }
                Atom::FiniteTable { table, .. } => {
                    for i in 0..count {
                        for j in 0..count {
                            let lhs = self.target.multiply(
                                &self.images[offset + i],
                                &self.images[offset + j],
                            )?;
                            if lhs != self.images[offset + table[i][j]] {
                                return fail(format!(
                                    "table relation {}*{} broken",
                                    names[offset + i],
                                    names[offset + j]
                                ));
                            }
                        }
                    }
                }
                Atom::Free { .. } => {}
                Atom::FreeProductCyclic { orders, .. } => {
                    for (i, o) in orders.iter().enumerate() {
                        if let Some(n) = o {
                            let img = &self.images[offset + i];
                            if self.target.power(img, *n as i64)? != self.target.identity() {
                                return fail(format!(
                                    "image of {} must have order dividing {n}",
                                    names[offset + i]
                                ));
                            }
                        }
                    }
                }
            }
            offset += count;
        }
        // Cross-atom commutation: direct factors commute in the source.
        let mut starts = vec![0usize];
        for atom in &self.source.atoms {
            starts.push(starts.last().expect("nonempty") + atom.generator_count());
        }
        for ai in 0..self.source.atoms.len() {
            for aj in (ai + 1)..self.source.atoms.len() {
                for i in starts[ai]..starts[ai + 1] {
                    for j in starts[aj]..starts[aj + 1] {
                        let a = &self.images[i];
                        let b = &self.images[j];
                        if self.target.multiply(a, b)? != self.target.multiply(b, a)? {
                            return fail(format!(
                                "images of direct factors {} and {} must commute",
                                names[i], names[j]
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &GroupDescriptor {
        &self.source
    }

    pub fn target(&self) -> &GroupDescriptor {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn identity(group: &GroupDescriptor) -> Self {
        Homomorphism {
            source: group.clone(),
            target: group.clone(),
            images: group.generators(),
        }
    }

    pub fn trivial(source: &GroupDescriptor, target: &GroupDescriptor) -> Self {
        Homomorphism {
            source: source.clone(),
            target: target.clone(),
            images: vec![target.identity(); source.generator_count()],
        }
    }

    pub fn evaluate(&self, e: &GroupElement) -> Result<GroupElement, GroupError> {
        self.source.validate(e)?;
        let mut acc = self.target.identity();
        let mut offset = 0usize;
        for (atom, part) in self.source.atoms.iter().zip(&e.parts) {
            match (atom, part) {
                (Atom::FiniteAbelian { .. }, AtomElement::Residues(r)) => {
                    for (i, a) in r.iter().enumerate() {
                        let p = self.target.power(&self.images[offset + i], *a as i64)?;
                        acc = self.target.multiply(&acc, &p)?;
                    }
                }
                (Atom::FiniteTable { .. }, AtomElement::Index(i)) => {
                    acc = self.target.multiply(&acc, &self.images[offset + i])?;
                }
                (Atom::Free { .. }, AtomElement::Word(w))
                | (Atom::FreeProductCyclic { .. }, AtomElement::Syllables(w)) => {
                    for (g, e) in w {
                        let p = self.target.power(&self.images[offset + g], *e)?;
                        acc = self.target.multiply(&acc, &p)?;
                    }
                }
                _ => unreachable!("validated"),
            }
            offset += atom.generator_count();
        }
        Ok(acc)
    }

    pub fn is_surjective(&self) -> Result<Generates, GroupError> {
        self.target.generates(&self.images)
    }

    /// g . self, defined when self.target == g.source.
    pub fn compose(&self, g: &Homomorphism) -> Result<Homomorphism, GroupError> {
        if self.target != g.source {
            return Err(GroupError::MismatchedGroups(
                "composition requires matching middle group".into(),
            ));
        }
        let images: Result<Vec<GroupElement>, GroupError> =
            self.images.iter().map(|img| g.evaluate(img)).collect();
        Homomorphism::new(self.source.clone(), g.target.clone(), images?)
    }

    pub fn equal_on_generators(&self, other: &Homomorphism) -> bool {
        self.source == other.source && self.target == other.target && self.images == other.images
    }

    pub fn kernel_elements(&self) -> Result<Vec<GroupElement>, GroupError> {
        let all = self.source.enumerate(None)?;
        let id = self.target.identity();
        let mut out = Vec::new();
        for e in all {
            if self.evaluate(&e)? == id {
                out.push(e);
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Canonical forms for isomorphism matching.

/// Normal-form summary used to match computed limits against expected groups:
/// number of direct Z factors, multiset of free-product factors (sorted order
/// lists; None is an infinite cyclic free factor), invariant factors of the
/// finite abelian part, and any residual nonabelian table atoms (compared by
/// order and element-order multiset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub z_rank: u64,
    pub free_product_parts: Vec<Vec<Option<u64>>>,
    pub invariants: Vec<u64>,
    pub table_signatures: Vec<(u64, Vec<u64>)>,
}

pub fn canonical_form(g: &GroupDescriptor) -> CanonicalForm {
    let mut z_rank = 0u64;
    let mut fp: Vec<Vec<Option<u64>>> = Vec::new();
    let mut moduli: Vec<u64> = Vec::new();
    let mut tables: Vec<(u64, Vec<u64>)> = Vec::new();
    for atom in &g.atoms {
        match atom {
            Atom::FiniteAbelian { factors } => moduli.extend(factors.iter().copied()),
            Atom::Free { names } => match names.len() {
                0 => {}
                1 => z_rank += 1,
                r => {
                    let mut part = vec![None; r];
                    part.sort();
                    fp.push(part);
                }
            },
            Atom::FreeProductCyclic { orders, .. } => match orders.len() {
                0 => {}
                1 => match orders[0] {
                    Some(n) => moduli.push(n),
                    None => z_rank += 1,
                },
                _ => {
                    let mut part = orders.clone();
                    part.sort();
                    fp.push(part);
                }
            },
            Atom::FiniteTable { .. } => {
                let single = GroupDescriptor { atoms: vec![atom.clone()] };
                match single.abelian_invariants() {
                    Some(inv) => moduli.extend(inv),
                    None => {
                        let elements = single.enumerate(None).expect("finite");
                        let mut orders: Vec<u64> = elements
                            .iter()
                            .map(|e| {
                                single
                                    .element_order(e)
                                    .expect("valid")
                                    .expect("finite")
                            })
                            .collect();
                        orders.sort_unstable();
                        tables.push((elements.len() as u64, orders));
                    }
                }
            }
        }
    }
    fp.sort();
    tables.sort();
    CanonicalForm {
        z_rank,
        free_product_parts: fp,
        invariants: invariant_factors(&moduli),
        table_signatures: tables,
    }
}

/// Isomorphism matching by canonical forms. Yes/No is exact on products of
/// abelian, free and free-product-of-cyclic atoms; nonabelian table atoms
/// compare by invariants only and degrade the answer to Unknown when those
/// invariants agree.
pub fn isomorphic(a: &GroupDescriptor, b: &GroupDescriptor) -> Generates {
    let ca = canonical_form(a);
    let cb = canonical_form(b);
    if ca != cb {
        return Generates::No;
    }
    if ca.table_signatures.is_empty() {
        Generates::Yes
    } else {
        Generates::Unknown
    }
}
