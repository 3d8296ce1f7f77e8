//! Named lattices, exhaustive enumeration of small lattices, and the lattice file formats.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::Set;
use crate::lattice::{FiniteLattice, LatticeError};
use crate::presentation::{presentation_of, JoinPresentation};

/// Largest size enumerated without an explicit budget.
pub const DEFAULT_SIZE_BUDGET: usize = 6;
/// Largest size enumerated at all (with a warning above the default).
pub const HARD_SIZE_BUDGET: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown lattice {0:?} (try chain_k, boolean_k, M3, N5, paper_fig)")]
    UnknownName(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("not a lattice: {0}")]
    NotALattice(#[from] LatticeError),
    #[error("enumeration up to size {requested} exceeds the budget of {budget}")]
    BudgetExceeded { requested: usize, budget: usize },
    #[error("invalid JSON lattice: {0}")]
    Json(String),
}

/// Serializable description of a lattice by its Hasse diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    #[serde(default)]
    pub name: String,
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

impl LatticeSpec {
    pub fn of(name: &str, l: &FiniteLattice) -> LatticeSpec {
        LatticeSpec {
            name: name.to_string(),
            elements: l.labels().to_vec(),
            covers: l
                .hasse()
                .into_iter()
                .map(|(a, b)| (l.label(a).to_string(), l.label(b).to_string()))
                .collect(),
        }
    }

    pub fn build(&self) -> Result<FiniteLattice, CatalogError> {
        let idx = |s: &str| {
            self.elements.iter().position(|e| e == s).ok_or_else(|| CatalogError::Syntax {
                line: 0,
                column: 0,
                message: format!("unknown element {s:?} in covers"),
            })
        };
        let pairs = self
            .covers
            .iter()
            .map(|(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>, CatalogError>>()?;
        Ok(FiniteLattice::from_covers(self.elements.len(), &pairs, Some(self.elements.clone()))?)
    }
}

/// Names accepted by [`builtin`], for listings.
pub fn builtin_names() -> Vec<String> {
    let mut v: Vec<String> = (1..=8).map(|k| format!("chain_{k}")).collect();
    v.extend((0..=3).map(|k| format!("boolean_{k}")));
    v.extend(["M3", "N5", "paper_fig"].map(String::from));
    v
}

pub fn builtin(name: &str) -> Result<FiniteLattice, CatalogError> {
    let unknown = || CatalogError::UnknownName(name.to_string());
    if let Some(k) = name.strip_prefix("chain_") {
        let k: usize = k.parse().map_err(|_| unknown())?;
        if !(1..=8).contains(&k) {
            return Err(unknown());
        }
        return Ok(FiniteLattice::chain(k)?);
    }
    if let Some(k) = name.strip_prefix("boolean_") {
        let k: usize = k.parse().map_err(|_| unknown())?;
        if k > 3 {
            return Err(unknown());
        }
        return Ok(boolean(k));
    }
    match name.to_ascii_lowercase().as_str() {
        "m3" => Ok(five("bot<a bot<b bot<c a<top b<top c<top")),
        "n5" => Ok(five("bot<a a<top bot<b b<c c<top")),
        "paper_fig" => Ok(paper_fig()),
        _ => Err(unknown()),
    }
}

fn five(covers: &str) -> FiniteLattice {
    parse_lattice(&format!("elements: bot a b c top\ncovers: {covers}")).expect("builtin lattice")
}

fn boolean(k: usize) -> FiniteLattice {
    let n = 1usize << k;
    let label = |s: usize| {
        if s == 0 {
            "0".to_string()
        } else {
            (0..k).filter(|i| s >> i & 1 == 1).map(|i| (b'a' + i as u8) as char).collect()
        }
    };
    let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a & !b == 0).collect()).collect();
    FiniteLattice::from_leq(&leq, Some((0..n).map(label).collect())).expect("powerset is a lattice")
}

/// The presentation behind `paper_fig`: points `a..e`, order `a<e, b<d, c<e`,
/// `M(c) = {{c},{a,b}}`, `M(e) = {{e},{a,d},{c,d}}`, other covers trivial.
pub fn paper_fig_presentation() -> JoinPresentation {
    let labels = ["a", "b", "c", "d", "e"].map(String::from).to_vec();
    let (a, b, c, d, e) = (0, 1, 2, 3, 4);
    let s = |v: &[usize]| Set::from_indices(v.iter().copied());
    let covers = vec![
        vec![s(&[a])],
        vec![s(&[b])],
        vec![s(&[c]), s(&[a, b])],
        vec![s(&[d])],
        vec![s(&[e]), s(&[a, d]), s(&[c, d])],
    ];
    JoinPresentation::new(labels, &[(a, e), (b, d), (c, e)], covers).expect("valid presentation")
}

fn paper_fig() -> FiniteLattice {
    let p = paper_fig_presentation();
    let closed = p.closed_downsets().expect("closed downsets form a lattice");
    let labels = closed
        .members
        .iter()
        .map(|&m| {
            if m.is_empty() {
                "bot".to_string()
            } else if m == p.all() {
                "top".to_string()
            } else if let Some(x) = (0..p.size()).find(|&x| p.down_set(x) == m) {
                p.label(x).to_string()
            } else {
                m.iter().map(|x| p.label(x)).collect()
            }
        })
        .collect();
    closed.lattice.relabel(labels).expect("labels are distinct")
}

/// All naturally labelled lattices (order extends index order, `0` bottom, `n-1` top)
/// of each size up to `max_size`; with `dedup`, one per isomorphism class.
pub fn enumerate_lattices(max_size: usize, dedup: bool) -> Result<Vec<FiniteLattice>, CatalogError> {
    enumerate_lattices_with_budget(max_size, dedup, HARD_SIZE_BUDGET)
}

pub fn enumerate_lattices_with_budget(max_size: usize, dedup: bool, budget: usize) -> Result<Vec<FiniteLattice>, CatalogError> {
    if max_size > budget {
        return Err(CatalogError::BudgetExceeded { requested: max_size, budget });
    }
    let mut out = Vec::new();
    for n in 1..=max_size {
        out.extend(lattices_of_size(n, dedup));
    }
    Ok(out)
}

fn lattices_of_size(n: usize, dedup: bool) -> Vec<FiniteLattice> {
    if n <= 2 {
        return vec![FiniteLattice::chain(n).expect("chain")];
    }
    let inner: Vec<usize> = (1..n - 1).collect();
    let pairs: Vec<(usize, usize)> = inner
        .iter()
        .flat_map(|&i| inner.iter().filter(move |&&j| i < j).map(move |&j| (i, j)))
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
            row[n - 1] = true;
        }
        leq[0].iter_mut().for_each(|x| *x = true);
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                leq[i][j] = true;
            }
        }
        let transitive = pairs.iter().all(|&(i, j)| {
            !leq[i][j] || (j + 1..n - 1).all(|k| !leq[j][k] || leq[i][k])
        });
        if !transitive {
            continue;
        }
        let Ok(l) = FiniteLattice::from_leq(&leq, None) else { continue };
        if dedup && !seen.insert(canonical_code(&l)) {
            continue;
        }
        out.push(l);
    }
    out
}

/// Lexicographically least order code over all relabellings of the inner elements.
pub fn canonical_code(l: &FiniteLattice) -> Vec<bool> {
    let n = l.size();
    let mut slots = vec![l.bottom(); n];
    let inner: Vec<usize> = l.elements().filter(|&a| a != l.bottom() && a != l.top()).collect();
    for (i, &a) in inner.iter().enumerate() {
        slots[i + 1] = a;
    }
    slots[n - 1] = l.top();
    let mut best = None;
    permute_inner(l, &mut slots, 1, &mut best);
    best.unwrap_or_default()
}

fn permute_inner(l: &FiniteLattice, slots: &mut Vec<usize>, k: usize, best: &mut Option<Vec<bool>>) {
    let n = slots.len();
    if n <= 2 || k >= n - 1 {
        let map = &slots;
        let code: Vec<bool> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| l.leq(map[a], map[b]))
            .collect();
        if best.as_ref().map_or(true, |b| code < *b) {
            *best = Some(code);
        }
        return;
    }
    for i in k..n - 1 {
        slots.swap(k, i);
        permute_inner(l, slots, k + 1, best);
        slots.swap(k, i);
    }
}

/// All lattices with at most `max_j` join-irreducibles, one per isomorphism class,
/// built as intersection-closed families of downsets of posets on `J`.
pub fn lattices_with_join_irreducibles(max_j: usize) -> Vec<FiniteLattice> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for k in 0..=max_j {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        for mask in 0u64..(1u64 << pairs.len()) {
            // strict order i < j only when i < j as indices
            let mut down: Vec<Set> = (0..k).map(Set::singleton).collect();
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    down[j].insert(i);
                }
            }
            let transitive = (0..k).all(|x| down[x].iter().all(|y| down[y].is_subset(down[x])));
            if !transitive {
                continue;
            }
            let all = Set::full(k);
            let is_down = |s: Set| s.iter().all(|x| down[x].is_subset(s));
            let downsets: Vec<Set> = all.subsets().filter(|&s| is_down(s)).collect();
            let mandatory: Vec<Set> = {
                let mut m = vec![Set::EMPTY, all];
                m.extend(down.iter().copied());
                m.sort_unstable();
                m.dedup();
                m
            };
            let optional: Vec<Set> = downsets.iter().copied().filter(|s| !mandatory.contains(s)).collect();
            for opt in 0u64..(1u64 << optional.len()) {
                let mut fam = mandatory.clone();
                fam.extend(optional.iter().enumerate().filter(|(b, _)| opt >> b & 1 == 1).map(|(_, &s)| s));
                let closed = fam.iter().all(|&a| fam.iter().all(|&b| fam.contains(&a.inter(b))));
                if !closed {
                    continue;
                }
                fam.sort_by_key(|s| (s.len(), s.0));
                let m = fam.len();
                let leq: Vec<Vec<bool>> = (0..m).map(|a| (0..m).map(|b| fam[a].is_subset(fam[b])).collect()).collect();
                let l = FiniteLattice::from_leq(&leq, None).expect("intersection-closed family with top is a lattice");
                if l.join_irreducibles().len() != k {
                    continue;
                }
                if seen.insert(canonical_code(&l)) {
                    out.push(l);
                }
            }
        }
    }
    out
}

/// Parses the line-oriented text format.
pub fn parse_lattice(text: &str) -> Result<FiniteLattice, CatalogError> {
    parse_spec(text)?.build()
}

pub fn parse_spec(text: &str) -> Result<LatticeSpec, CatalogError> {
    let mut spec = LatticeSpec { name: String::new(), elements: Vec::new(), covers: Vec::new() };
    let mut saw_elements = false;
    let mut pending: Vec<(String, String, usize, usize)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some(colon) = line.find(':') else {
            let col = line.len() - line.trim_start().len() + 1;
            return Err(CatalogError::Syntax { line: line_no, column: col, message: "expected `key: value`".into() });
        };
        let key = line[..colon].trim();
        let body_start = colon + 1;
        let tokens = tokens_with_columns(&line[body_start..], body_start);
        match key {
            "name" => spec.name = tokens.iter().map(|(t, _)| t.as_str()).collect::<Vec<_>>().join(" "),
            "elements" => {
                for (t, col) in tokens {
                    if t.contains('<') {
                        return Err(CatalogError::Syntax { line: line_no, column: col, message: format!("label {t:?} contains '<'") });
                    }
                    if spec.elements.contains(&t) {
                        return Err(CatalogError::Syntax { line: line_no, column: col, message: format!("duplicate element {t:?}") });
                    }
                    spec.elements.push(t);
                }
                saw_elements = true;
            }
            "covers" => {
                for (t, col) in tokens {
                    let parts: Vec<&str> = t.split('<').collect();
                    if parts.len() != 2 || parts[0].is_empty() || parts[1].is_empty() {
                        return Err(CatalogError::Syntax { line: line_no, column: col, message: format!("expected `lower<upper`, found {t:?}") });
                    }
                    pending.push((parts[0].to_string(), parts[1].to_string(), line_no, col));
                }
            }
            other => {
                let col = line.len() - line.trim_start().len() + 1;
                return Err(CatalogError::Syntax { line: line_no, column: col, message: format!("unknown key {other:?}") });
            }
        }
    }
    if !saw_elements || spec.elements.is_empty() {
        return Err(CatalogError::Syntax { line: 1, column: 1, message: "missing `elements:` line".into() });
    }
    for (a, b, line, column) in pending {
        for x in [&a, &b] {
            if !spec.elements.contains(x) {
                return Err(CatalogError::Syntax { line, column, message: format!("unknown element {x:?}") });
            }
        }
        spec.covers.push((a, b));
    }
    Ok(spec)
}

fn tokens_with_columns(s: &str, offset: usize) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        if ch.is_whitespace() {
            if let Some(st) = start.take() {
                out.push((s[st..i].to_string(), offset + st + 1));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push((s[st..].to_string(), offset + st + 1));
    }
    out
}

/// Canonical text form: elements in index order, Hasse pairs sorted by index.
pub fn serialize(name: &str, l: &FiniteLattice) -> String {
    let spec = LatticeSpec::of(name, l);
    let mut out = String::new();
    if !name.is_empty() {
        out.push_str(&format!("name: {name}\n"));
    }
    out.push_str(&format!("elements: {}\n", spec.elements.join(" ")));
    let covers: Vec<String> = spec.covers.iter().map(|(a, b)| format!("{a}<{b}")).collect();
    out.push_str(&format!("covers: {}\n", covers.join(" ")));
    out
}

pub fn parse_lattice_json(text: &str) -> Result<FiniteLattice, CatalogError> {
    let spec: LatticeSpec = serde_json::from_str(text).map_err(|e| CatalogError::Json(e.to_string()))?;
    spec.build()
}

pub fn serialize_json(name: &str, l: &FiniteLattice) -> String {
    serde_json::to_string_pretty(&LatticeSpec::of(name, l)).expect("spec serializes")
}

/// Counts of join-irreducibles and size, handy for listings.
pub fn summary(l: &FiniteLattice) -> String {
    let p = presentation_of(l);
    format!("|L|={} |J|={} |M|={}", l.size(), p.size(), l.meet_irreducibles().len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::isomorphic_to;

    #[test]
    fn dedup_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| lattices_of_size(n, true).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 5, 15]);
    }

    #[test]
    fn parse_three_chain() {
        let l = parse_lattice("elements: bot a top\ncovers: bot<a a<top").unwrap();
        assert!(isomorphic_to(&l, &FiniteLattice::chain(3).unwrap()).is_some());
    }

    #[test]
    fn parse_errors() {
        let e = parse_lattice("elements: bot a b\ncovers: bot<a bot<b").unwrap_err();
        assert_eq!(e, CatalogError::NotALattice(LatticeError::NoJoin("a".into(), "b".into())));
        let e = parse_lattice("elements: x y\ncovers: x<y  y-x").unwrap_err();
        assert!(matches!(e, CatalogError::Syntax { line: 2, column: 14, .. }), "{e:?}");
        let e = parse_lattice("elements: x y\ncovers: x<z").unwrap_err();
        assert!(matches!(e, CatalogError::Syntax { line: 2, column: 9, .. }), "{e:?}");
    }

    #[test]
    fn round_trips() {
        for name in builtin_names() {
            let l = builtin(&name).unwrap();
            let back = parse_lattice(&serialize(&name, &l)).unwrap();
            assert_eq!(back, l, "{name}");
            let back = parse_lattice_json(&serialize_json(&name, &l)).unwrap();
            assert_eq!(back, l, "{name}");
        }
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(enumerate_lattices(8, true), Err(CatalogError::BudgetExceeded { .. })));
    }
}
