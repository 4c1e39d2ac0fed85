//! Stallings folding for subgroups of free groups.
//!
//! A finite set of words generates the whole free group exactly when the
//! folded core of the wedge-of-loops graph is the full rose: one vertex with
//! a loop for every generator.

use std::collections::BTreeSet;

/// Exact generation test for a subgroup of a free group of the given rank.
pub fn generates_whole_free_group(rank: usize, words: &[Vec<(usize, i64)>]) -> bool {
    if rank == 0 {
        return true;
    }
    // Edges are (source, target, generator label); one letter each.
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let base = 0usize;
    let mut next_vertex = 1usize;
    for word in words {
        let mut letters: Vec<(usize, bool)> = Vec::new();
        for &(g, e) in word {
            for _ in 0..e.unsigned_abs() {
                letters.push((g, e > 0));
            }
        }
        if letters.is_empty() {
            continue;
        }
        let mut cur = base;
        for (i, &(g, forward)) in letters.iter().enumerate() {
            let dest = if i + 1 == letters.len() {
                base
            } else {
                let v = next_vertex;
                next_vertex += 1;
                v
            };
            if forward {
                edges.push((cur, dest, g));
            } else {
                edges.push((dest, cur, g));
            }
            cur = dest;
        }
    }

    // Fold: identify endpoints of equally labeled edges sharing a source
    // (or sharing a target). Edges are scanned in sorted order so the fold
    // sequence is deterministic.
    let mut parent: Vec<usize> = (0..next_vertex).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    loop {
        let mut canon: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        for &(u, v, g) in &edges {
            canon.insert((find(&mut parent, u), find(&mut parent, v), g));
        }
        let list: Vec<(usize, usize, usize)> = canon.iter().copied().collect();
        let mut merged = false;
        'scan: for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                let (u1, v1, g1) = list[i];
                let (u2, v2, g2) = list[j];
                if g1 != g2 {
                    continue;
                }
                if u1 == u2 && v1 != v2 {
                    let (a, b) = (find(&mut parent, v1), find(&mut parent, v2));
                    parent[a.max(b)] = a.min(b);
                    merged = true;
                    break 'scan;
                }
                if v1 == v2 && u1 != u2 {
                    let (a, b) = (find(&mut parent, u1), find(&mut parent, u2));
                    parent[a.max(b)] = a.min(b);
                    merged = true;
                    break 'scan;
                }
            }
        }
        if !merged {
            edges = list;
            break;
        }
    }

    // Trim hanging trees: repeatedly remove non-base vertices of degree 1.
    let root = find(&mut parent, 0);
    loop {
        let mut verts: BTreeSet<usize> = BTreeSet::new();
        for &(u, v, _) in &edges {
            verts.insert(u);
            verts.insert(v);
        }
        let mut removed = false;
        for &w in &verts {
            if w == root {
                continue;
            }
            let deg = edges.iter().filter(|(u, v, _)| *u == w || *v == w).count();
            if deg == 1 {
                edges.retain(|(u, v, _)| *u != w && *v != w);
                removed = true;
                break;
            }
        }
        if !removed {
            break;
        }
    }

    // The subgroup is everything exactly when the core is the rose on the
    // base vertex with all rank labels present.
    if edges.iter().any(|(u, v, _)| *u != root || *v != root) {
        return false;
    }
    let labels: BTreeSet<usize> = edges.iter().map(|(_, _, g)| *g).collect();
    labels.len() == rank && labels.iter().all(|g| *g < rank)
}
