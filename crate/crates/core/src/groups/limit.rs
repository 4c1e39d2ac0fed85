//! Limits of finite diagrams of groups.
//!
//! `diagram_limit` computes the limit (inverse limit over the diagram shape)
//! for the shapes that actually arise from grading diagrams: after pruning
//! trivial nodes the diagram splits into connected components, each solved by
//! one of three exact strategies, and the total limit is the direct product
//! of the component limits. `certify_limit_iso` independently certifies a
//! claimed limit by exhaustive enumeration up to a word-length radius.

use super::{
    GroupDescriptor, GroupElement, GroupError, Homomorphism,
};
use std::collections::HashMap;
use std::fmt;

/// A finite diagram of groups: nodes and arrows labelled by verified
/// homomorphisms.
#[derive(Debug, Clone)]
pub struct GroupDiagram {
    nodes: Vec<GroupDescriptor>,
    arrows: Vec<(usize, usize, Homomorphism)>,
}

impl GroupDiagram {
    pub fn new(
        nodes: Vec<GroupDescriptor>,
        arrows: Vec<(usize, usize, Homomorphism)>,
    ) -> Result<Self, GroupError> {
        if nodes.is_empty() {
            return Err(GroupError::UnsupportedShape("diagram has no nodes".into()));
        }
        for (s, t, h) in &arrows {
            if *s >= nodes.len() || *t >= nodes.len() {
                return Err(GroupError::UnsupportedShape(format!(
                    "arrow {s} -> {t} references a missing node"
                )));
            }
            if h.source() != &nodes[*s] || h.target() != &nodes[*t] {
                return Err(GroupError::MismatchedGroups(format!(
                    "arrow {s} -> {t} does not match its endpoint groups"
                )));
            }
        }
        Ok(GroupDiagram { nodes, arrows })
    }

    pub fn nodes(&self) -> &[GroupDescriptor] {
        &self.nodes
    }

    pub fn arrows(&self) -> &[(usize, usize, Homomorphism)] {
        &self.arrows
    }
}

/// Limit of a group diagram together with one verified projection per node
/// and a human-readable account of how each component was solved.
#[derive(Debug, Clone)]
pub struct LimitResult {
    pub group: GroupDescriptor,
    pub projections: Vec<Homomorphism>,
    pub methods: Vec<String>,
    pub pruned_nodes: Vec<usize>,
}

/// Per-component solution: the component limit plus, for every node of the
/// component, the images of the component limit's generators in that node.
struct ComponentLimit {
    group: GroupDescriptor,
    images: HashMap<usize, Vec<GroupElement>>,
    method: String,
    /// When true the projection maps are valid by construction and too large
    /// to re-validate economically (exhaustive tuple tables).
    skip_validation: bool,
}

pub fn diagram_limit(d: &GroupDiagram) -> Result<LimitResult, GroupError> {
    let n = d.nodes.len();
    // Prune trivial nodes. A trivial node constrains nothing unless an arrow
    // leaves it towards a nontrivial node (the constraint "x_target = 1"),
    // in which case it must stay.
    let kept: Vec<bool> = (0..n)
        .map(|i| {
            !d.nodes[i].is_trivial()
                || d.arrows.iter().any(|(s, t, _)| *s == i && !d.nodes[*t].is_trivial())
        })
        .collect();
    let pruned_nodes: Vec<usize> = (0..n).filter(|i| !kept[*i]).collect();

    // Connected components of the kept subdiagram.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for (s, t, _) in &d.arrows {
        if kept[*s] && kept[*t] {
            let (rs, rt) = (find(&mut parent, *s), find(&mut parent, *t));
            if rs != rt {
                parent[rs.max(rt)] = rs.min(rt);
            }
        }
    }
    let mut comp_members: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &keep) in kept.iter().enumerate() {
        if keep {
            let r = find(&mut parent, i);
            comp_members.entry(r).or_default().push(i);
        }
    }
    let mut components: Vec<Vec<usize>> = comp_members.into_values().collect();
    components.sort_by_key(|c| c[0]);

    let mut solved: Vec<ComponentLimit> = Vec::new();
    for comp in &components {
        solved.push(solve_component(d, comp)?);
    }

    // Assemble the total limit. Trivial component limits contribute nothing.
    for s in &mut solved {
        if s.group.is_trivial() {
            s.group = GroupDescriptor::trivial();
            for imgs in s.images.values_mut() {
                imgs.clear();
            }
        }
    }
    let total = GroupDescriptor::direct_product(solved.iter().map(|s| s.group.clone()).collect());
    let mut offsets = vec![0usize];
    for s in &solved {
        offsets.push(offsets.last().expect("nonempty") + s.group.generator_count());
    }
    debug_assert_eq!(*offsets.last().expect("nonempty"), total.generator_count());

    let mut projections: Vec<Homomorphism> = Vec::with_capacity(n);
    for v in 0..n {
        let Some(ci) = components.iter().position(|c| c.contains(&v)) else {
            projections.push(Homomorphism::trivial(&total, &d.nodes[v]));
            continue;
        };
        let comp = &solved[ci];
        let local = &comp.images[&v];
        let mut images: Vec<GroupElement> =
            vec![d.nodes[v].identity(); total.generator_count()];
        images[offsets[ci]..offsets[ci + 1]].clone_from_slice(local);
        if comp.skip_validation {
            // Componentwise projection of a compatible-tuple group: a
            // homomorphism by construction of the tuple table.
            projections.push(Homomorphism {
                source: total.clone(),
                target: d.nodes[v].clone(),
                images,
            });
        } else {
            projections.push(Homomorphism::new(total.clone(), d.nodes[v].clone(), images)?);
        }
    }

    Ok(LimitResult {
        group: total,
        projections,
        methods: solved.into_iter().map(|s| s.method).collect(),
        pruned_nodes,
    })
}

fn solve_component(d: &GroupDiagram, comp: &[usize]) -> Result<ComponentLimit, GroupError> {
    let comp_arrows: Vec<&(usize, usize, Homomorphism)> = d
        .arrows
        .iter()
        .filter(|(s, t, _)| comp.contains(s) && comp.contains(t))
        .collect();

    // Lone node: the limit is the node itself.
    if comp.len() == 1 && comp_arrows.is_empty() {
        let v = comp[0];
        let g = d.nodes[v].clone();
        let mut images = HashMap::new();
        images.insert(v, g.generators());
        return Ok(ComponentLimit {
            group: g,
            images,
            method: format!("node {v}: lone node"),
            skip_validation: false,
        });
    }

    // All nodes finite: enumerate compatible tuples exhaustively.
    if comp.iter().all(|v| d.nodes[*v].order().is_some()) {
        return solve_finite_tuples(d, comp, &comp_arrows);
    }

    // An initial node whose arrows form a commuting cone.
    if let Some(sol) = try_initial_node(d, comp, &comp_arrows)? {
        return Ok(sol);
    }

    // Cospan with a finite corner and one finite leg: fibre product
    // G1 x_K G2 which splits as G1 x ker(phi2) when a section of phi2
    // centralising ker(phi2) exists.
    if let Some(sol) = try_split_cospan(d, comp, &comp_arrows)? {
        return Ok(sol);
    }

    Err(GroupError::UnsupportedShape(format!(
        "component {comp:?} has an infinite node but is neither a commuting cone \
         under an initial node nor a split cospan"
    )))
}

/// Exhaustive limit of an all-finite component: the subgroup of the direct
/// product cut out by the arrow constraints, materialised as a table.
fn solve_finite_tuples(
    d: &GroupDiagram,
    comp: &[usize],
    comp_arrows: &[&(usize, usize, Homomorphism)],
) -> Result<ComponentLimit, GroupError> {
    let elems: Vec<Vec<GroupElement>> = comp
        .iter()
        .map(|v| d.nodes[*v].enumerate(None))
        .collect::<Result<_, _>>()?;
    let pos: HashMap<usize, usize> = comp.iter().enumerate().map(|(k, v)| (*v, k)).collect();

    // Depth-first assignment in node order; every arrow is checked as soon as
    // both endpoints are assigned.
    let mut tuples: Vec<Vec<GroupElement>> = Vec::new();
    let mut current: Vec<GroupElement> = Vec::new();
    dfs_tuples(comp, comp_arrows, &pos, &elems, &mut current, &mut tuples)?;

    let index: HashMap<&[GroupElement], usize> =
        tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let names: Vec<String> = tuples
        .iter()
        .map(|t| {
            t.iter()
                .enumerate()
                .map(|(k, e)| d.nodes[comp[k]].render(e))
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect();
    let mut table = vec![vec![0usize; tuples.len()]; tuples.len()];
    for (i, a) in tuples.iter().enumerate() {
        for (j, b) in tuples.iter().enumerate() {
            let prod: Vec<GroupElement> = comp
                .iter()
                .enumerate()
                .map(|(k, v)| d.nodes[*v].multiply(&a[k], &b[k]))
                .collect::<Result<_, _>>()?;
            table[i][j] = *index.get(prod.as_slice()).ok_or_else(|| {
                GroupError::NotAGroup("compatible tuples not closed under product".into())
            })?;
        }
    }
    let group = GroupDescriptor::finite_table_unchecked(names, table)?;

    let mut images: HashMap<usize, Vec<GroupElement>> = HashMap::new();
    for (k, v) in comp.iter().enumerate() {
        images.insert(*v, tuples.iter().map(|t| t[k].clone()).collect());
    }
    Ok(ComponentLimit {
        group,
        images,
        method: format!(
            "nodes {comp:?}: exhaustive compatible tuples ({} elements)",
            tuples.len()
        ),
        skip_validation: true,
    })
}

fn dfs_tuples(
    comp: &[usize],
    comp_arrows: &[&(usize, usize, Homomorphism)],
    pos: &HashMap<usize, usize>,
    elems: &[Vec<GroupElement>],
    current: &mut Vec<GroupElement>,
    out: &mut Vec<Vec<GroupElement>>,
) -> Result<(), GroupError> {
    let k = current.len();
    if k == comp.len() {
        out.push(current.clone());
        return Ok(());
    }
    'cand: for e in &elems[k] {
        current.push(e.clone());
        for (s, t, h) in comp_arrows {
            let (ps, pt) = (pos[s], pos[t]);
            if ps < current.len() && pt < current.len()
                && h.evaluate(&current[ps])? != current[pt]
            {
                current.pop();
                continue 'cand;
            }
        }
        dfs_tuples(comp, comp_arrows, pos, elems, current, out)?;
        current.pop();
    }
    Ok(())
}

/// Looks for a node `i` such that every other node receives exactly one
/// consistent map from `i` and every arrow commutes with that cone; the limit
/// is then the node itself.
fn try_initial_node(
    d: &GroupDiagram,
    comp: &[usize],
    comp_arrows: &[&(usize, usize, Homomorphism)],
) -> Result<Option<ComponentLimit>, GroupError> {
    'cand: for &i in comp {
        // Build the cone: psi_v for every node of the component.
        let mut cone: HashMap<usize, Homomorphism> = HashMap::new();
        cone.insert(i, Homomorphism::identity(&d.nodes[i]));
        for &v in comp {
            if v == i {
                continue;
            }
            let mut arrows_iv = comp_arrows.iter().filter(|(s, t, _)| *s == i && *t == v);
            let Some((_, _, first)) = arrows_iv.next() else {
                continue 'cand;
            };
            if arrows_iv.any(|(_, _, h)| !h.equal_on_generators(first)) {
                continue 'cand;
            }
            cone.insert(v, (*first).clone());
        }
        // Every arrow u -> v must satisfy a . psi_u = psi_v.
        for (u, v, a) in comp_arrows {
            if !cone[u].compose(a)?.equal_on_generators(&cone[v]) {
                continue 'cand;
            }
        }
        let images: HashMap<usize, Vec<GroupElement>> =
            cone.iter().map(|(v, h)| (*v, h.images().to_vec())).collect();
        return Ok(Some(ComponentLimit {
            group: d.nodes[i].clone(),
            images,
            method: format!("nodes {comp:?}: initial node {i} with commuting cone"),
            skip_validation: false,
        }));
    }
    Ok(None)
}

/// Cospan G1 -> K <- G2 with K and G2 finite. A section s: K -> G2 of phi2
/// whose image centralises ker(phi2) splits the fibre product as
/// G1 x ker(phi2): the pair (g, c) maps to g in G1 and to s(phi1(g)) c in G2.
fn try_split_cospan(
    d: &GroupDiagram,
    comp: &[usize],
    comp_arrows: &[&(usize, usize, Homomorphism)],
) -> Result<Option<ComponentLimit>, GroupError> {
    if comp.len() != 3 || comp_arrows.len() != 2 {
        return Ok(None);
    }
    let (s1, t1, h1) = comp_arrows[0];
    let (s2, t2, h2) = comp_arrows[1];
    if t1 != t2 || s1 == s2 || *s1 == *t1 || *s2 == *t1 {
        return Ok(None);
    }
    let corner = *t1;
    if d.nodes[corner].order().is_none() {
        return Ok(None);
    }
    // One leg must be finite; call it G2.
    let (g1_node, phi1, g2_node, phi2) = if d.nodes[*s2].order().is_some() {
        (*s1, h1, *s2, h2)
    } else if d.nodes[*s1].order().is_some() {
        (*s2, h2, *s1, h1)
    } else {
        return Ok(None);
    };
    let g1 = &d.nodes[g1_node];
    let g2 = &d.nodes[g2_node];
    let k = &d.nodes[corner];

    let kernel = phi2.kernel_elements()?;
    let Some(section) = find_centralising_section(k, g2, phi2, &kernel)? else {
        return Ok(None);
    };

    // Kernel subgroup as a table atom (skipped when the kernel is trivial).
    let kernel_group = if kernel.len() == 1 {
        GroupDescriptor::trivial()
    } else {
        subgroup_table(g2, &kernel)?
    };
    let group =
        GroupDescriptor::direct_product(vec![g1.clone(), kernel_group.clone()]);

    // Projections on generators: G1 generators then kernel generators.
    let kernel_gens: Vec<GroupElement> =
        if kernel.len() == 1 { Vec::new() } else { kernel.clone() };
    let mut to_g1: Vec<GroupElement> = g1.generators();
    to_g1.extend(vec![g1.identity(); kernel_gens.len()]);
    let mut to_g2: Vec<GroupElement> = g1
        .generators()
        .iter()
        .map(|g| section.evaluate(&phi1.evaluate(g)?))
        .collect::<Result<_, _>>()?;
    to_g2.extend(kernel_gens.iter().cloned());
    let mut to_k: Vec<GroupElement> = g1
        .generators()
        .iter()
        .map(|g| phi1.evaluate(g))
        .collect::<Result<_, _>>()?;
    to_k.extend(vec![k.identity(); kernel_gens.len()]);

    let mut images = HashMap::new();
    // Homomorphism::new re-verifies the section's centralising property via
    // the cross-factor commutation checks.
    images.insert(g1_node, Homomorphism::new(group.clone(), g1.clone(), to_g1)?.images().to_vec());
    images.insert(g2_node, Homomorphism::new(group.clone(), g2.clone(), to_g2)?.images().to_vec());
    images.insert(corner, Homomorphism::new(group.clone(), k.clone(), to_k)?.images().to_vec());

    Ok(Some(ComponentLimit {
        group,
        images,
        method: format!(
            "nodes {comp:?}: cospan split through a centralising section \
             (kernel order {})",
            kernel.len()
        ),
        skip_validation: false,
    }))
}

/// Finds a homomorphic section s: K -> G2 of phi2 whose generator images
/// centralise the listed kernel elements, searching image tuples in
/// enumeration order for determinism.
fn find_centralising_section(
    k: &GroupDescriptor,
    g2: &GroupDescriptor,
    phi2: &Homomorphism,
    kernel: &[GroupElement],
) -> Result<Option<Homomorphism>, GroupError> {
    let gens = k.generator_count();
    let pool = g2.enumerate(None)?;
    let mut choice = vec![0usize; gens];
    loop {
        let images: Vec<GroupElement> = choice.iter().map(|i| pool[*i].clone()).collect();
        if let Ok(section) = Homomorphism::new(k.clone(), g2.clone(), images.clone()) {
            let splits = section
                .compose(phi2)?
                .equal_on_generators(&Homomorphism::identity(k));
            let centralises = images.iter().try_fold(true, |acc, s| {
                kernel.iter().try_fold(acc, |acc, c| {
                    Ok::<bool, GroupError>(acc && g2.multiply(s, c)? == g2.multiply(c, s)?)
                })
            })?;
            if splits && centralises {
                return Ok(Some(section));
            }
        }
        // Next tuple, odometer-style.
        let mut pos = 0;
        loop {
            if pos == gens {
                return Ok(None);
            }
            choice[pos] += 1;
            if choice[pos] < pool.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Materialises a subgroup (given as a closed element list) of a finite
/// ambient group as a standalone table group with ambient renders as names.
fn subgroup_table(
    ambient: &GroupDescriptor,
    elements: &[GroupElement],
) -> Result<GroupDescriptor, GroupError> {
    let index: HashMap<&GroupElement, usize> =
        elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let names: Vec<String> = elements.iter().map(|e| ambient.render(e)).collect();
    let mut table = vec![vec![0usize; elements.len()]; elements.len()];
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            let prod = ambient.multiply(a, b)?;
            table[i][j] = *index
                .get(&prod)
                .ok_or_else(|| GroupError::NotAGroup("element list is not closed".into()))?;
        }
    }
    GroupDescriptor::finite_table_unchecked(names, table)
}

// ---------------------------------------------------------------------------
// Bounded certification.

/// Evidence that a candidate group, equipped with a cone over the diagram,
/// maps bijectively onto the compatible tuples visible inside a word-length
/// window: every candidate element up to `radius` hits a distinct tuple, and
/// every compatible tuple with all coordinates up to `radius` is hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitCertificate {
    pub radius: usize,
    pub candidate_elements: usize,
    pub compatible_tuples: usize,
}

impl fmt::Display for LimitCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "radius {}: {} candidate elements inject into compatible tuples; \
             all {} window tuples are hit",
            self.radius, self.candidate_elements, self.compatible_tuples
        )
    }
}

/// Certifies that `candidate` with the given cone is a limit of the diagram,
/// by enumeration up to `radius`. Errors with `CertificateFailure` when the
/// cone does not commute, two candidate elements collide, or some compatible
/// tuple inside the window is missed.
pub fn certify_limit_iso(
    d: &GroupDiagram,
    candidate: &GroupDescriptor,
    cone: &[Homomorphism],
    radius: usize,
) -> Result<LimitCertificate, GroupError> {
    let n = d.nodes.len();
    if cone.len() != n {
        return Err(GroupError::MismatchedGroups(format!(
            "cone has {} legs, diagram has {} nodes",
            cone.len(),
            n
        )));
    }
    for (v, leg) in cone.iter().enumerate() {
        if leg.source() != candidate || leg.target() != &d.nodes[v] {
            return Err(GroupError::MismatchedGroups(format!(
                "cone leg {v} does not run from the candidate to node {v}"
            )));
        }
    }
    for (u, v, a) in &d.arrows {
        if !cone[*u].compose(a)?.equal_on_generators(&cone[*v]) {
            return Err(GroupError::CertificateFailure(format!(
                "cone does not commute with the arrow {u} -> {v}"
            )));
        }
    }

    // Injectivity of the candidate on the window.
    let candidates = candidate.enumerate(Some(radius))?;
    let mut seen: HashMap<Vec<GroupElement>, usize> = HashMap::new();
    for (i, x) in candidates.iter().enumerate() {
        let tuple: Vec<GroupElement> =
            cone.iter().map(|leg| leg.evaluate(x)).collect::<Result<_, _>>()?;
        if let Some(j) = seen.insert(tuple, i) {
            return Err(GroupError::CertificateFailure(format!(
                "candidate elements '{}' and '{}' map to the same tuple",
                candidate.render(&candidates[j]),
                candidate.render(x),
            )));
        }
    }

    // Surjectivity onto the compatible tuples whose coordinates all lie in
    // the window.
    let elems: Vec<Vec<GroupElement>> = d
        .nodes
        .iter()
        .map(|g| g.enumerate(Some(radius)))
        .collect::<Result<_, _>>()?;
    let mut compatible = 0usize;
    let mut current: Vec<GroupElement> = Vec::new();
    certify_dfs(d, &elems, &seen, &mut current, &mut compatible)?;

    Ok(LimitCertificate {
        radius,
        candidate_elements: candidates.len(),
        compatible_tuples: compatible,
    })
}

fn certify_dfs(
    d: &GroupDiagram,
    elems: &[Vec<GroupElement>],
    seen: &HashMap<Vec<GroupElement>, usize>,
    current: &mut Vec<GroupElement>,
    compatible: &mut usize,
) -> Result<(), GroupError> {
    let k = current.len();
    if k == d.nodes.len() {
        if !seen.contains_key(current) {
            return Err(GroupError::CertificateFailure(format!(
                "compatible tuple ({}) is not the image of any candidate element",
                current
                    .iter()
                    .enumerate()
                    .map(|(v, e)| d.nodes[v].render(e))
                    .collect::<Vec<_>>()
                    .join(" | ")
            )));
        }
        *compatible += 1;
        return Ok(());
    }
    'cand: for e in &elems[k] {
        current.push(e.clone());
        for (s, t, h) in &d.arrows {
            if *s < current.len()
                && *t < current.len()
                && h.evaluate(&current[*s])? != current[*t]
            {
                current.pop();
                continue 'cand;
            }
        }
        certify_dfs(d, elems, seen, current, compatible)?;
        current.pop();
    }
    Ok(())
}
