//! Group gradings of linear categories, represented by a degree label on
//! every hom-basis morphism. Covers the grading axiom check, support,
//! connectedness, quotients, walk degrees, the invertibility discriminator,
//! and diagrams of gradings linked by quotient arrows.

use crate::algebra::{AlgebraElement, AlgebraError, AlgebraMorphism, LinearCategory};
use crate::groups::{
    canonical_form, isomorphic, Generates, GroupDescriptor, GroupDiagram, GroupElement,
    GroupError, Homomorphism,
};
use rand::{Rng, SeedableRng};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GradingError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("basis morphism {0} has no degree assigned")]
    MissingDegree(String),
    #[error("degree map mentions unknown basis morphism {0}")]
    UnknownBasis(String),
    #[error("{0}")]
    Violation(GradingViolation),
    #[error("homomorphism is not surjective: {0}")]
    NotSurjective(String),
    #[error("walk does not chain: {0}")]
    BrokenChain(String),
    #[error("{0}")]
    Mismatch(String),
}

/// A concrete failure of the grading axiom or the identity-degree rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GradingViolation {
    /// Left factor h of the product h . f, when applicable.
    pub left: Option<String>,
    /// Right factor f.
    pub right: Option<String>,
    /// The basis vector where the product (or identity) has a coordinate of
    /// the wrong degree.
    pub offending: String,
    pub reason: String,
}

impl fmt::Display for GradingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.left, &self.right) {
            (Some(l), Some(r)) => write!(
                f,
                "product {l} . {r} has a component on {}: {}",
                self.offending, self.reason
            ),
            _ => write!(f, "component on {}: {}", self.offending, self.reason),
        }
    }
}

/// Summary returned by a successful grading verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradingCertificate {
    pub checked_pairs: usize,
    pub support_size: usize,
}

impl fmt::Display for GradingCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "grading axiom holds on {} composable basis pairs; support has {} degrees",
            self.checked_pairs, self.support_size
        )
    }
}

/// A grading: every basis morphism of the category carries a degree in the
/// group. Construction checks completeness of the degree map and validity of
/// the elements; the grading axiom itself is checked by `verify_grading`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grading {
    category: LinearCategory,
    group: GroupDescriptor,
    /// Degree per global basis index of `category`.
    degrees: Vec<GroupElement>,
}

impl Grading {
    pub fn new(
        category: LinearCategory,
        group: GroupDescriptor,
        degree: &HashMap<String, GroupElement>,
    ) -> Result<Self, GradingError> {
        for name in degree.keys() {
            if category.basis_index(name).is_none() {
                return Err(GradingError::UnknownBasis(name.clone()));
            }
        }
        let mut degrees = Vec::with_capacity(category.dimension());
        for b in category.basis() {
            let d = degree
                .get(&b.name)
                .ok_or_else(|| GradingError::MissingDegree(b.name.clone()))?;
            group.validate(d)?;
            degrees.push(d.clone());
        }
        Ok(Grading { category, group, degrees })
    }

    /// Degree map given in basis order rather than by name.
    pub fn from_degree_vec(
        category: LinearCategory,
        group: GroupDescriptor,
        degrees: Vec<GroupElement>,
    ) -> Result<Self, GradingError> {
        if degrees.len() != category.dimension() {
            return Err(GradingError::Mismatch(format!(
                "expected {} degrees, got {}",
                category.dimension(),
                degrees.len()
            )));
        }
        for d in &degrees {
            group.validate(d)?;
        }
        Ok(Grading { category, group, degrees })
    }

    /// Every basis morphism in trivial degree.
    pub fn trivial(category: LinearCategory, group: GroupDescriptor) -> Self {
        let degrees = vec![group.identity(); category.dimension()];
        Grading { category, group, degrees }
    }

    pub fn category(&self) -> &LinearCategory {
        &self.category
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn degree_by_index(&self, i: usize) -> &GroupElement {
        &self.degrees[i]
    }

    pub fn degree(&self, basis_name: &str) -> Result<&GroupElement, GradingError> {
        let i = self
            .category
            .basis_index(basis_name)
            .ok_or_else(|| GradingError::UnknownBasis(basis_name.to_string()))?;
        Ok(&self.degrees[i])
    }

    /// Basis indices of the component of a given degree (across all
    /// hom-spaces).
    pub fn component(&self, d: &GroupElement) -> Vec<usize> {
        (0..self.degrees.len()).filter(|i| &self.degrees[*i] == d).collect()
    }

    /// Whether an element is homogeneous, and of which degree. Zero elements
    /// are homogeneous of every degree, reported as None.
    pub fn homogeneous_degree(&self, a: &AlgebraElement) -> Result<Option<GroupElement>, GradingError> {
        let basis = self.category.hom_basis(a.source, a.target);
        let mut found: Option<GroupElement> = None;
        for (p, c) in a.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = &self.degrees[basis[p]];
            match &found {
                None => found = Some(d.clone()),
                Some(prev) if prev == d => {}
                Some(prev) => {
                    return Err(GradingError::Mismatch(format!(
                        "element is not homogeneous: components of degree {} and {}",
                        self.group.render(prev),
                        self.group.render(d)
                    )))
                }
            }
        }
        Ok(found)
    }
}

/// Checks the grading axiom: for composable basis morphisms f of degree s and
/// h of degree t, every nonzero coordinate of h . f sits on a basis vector of
/// degree ts; and each identity is concentrated in trivial degree.
pub fn verify_grading(g: &Grading) -> Result<GradingCertificate, GradingError> {
    let c = &g.category;
    let gp = &g.group;
    let one = gp.identity();
    for x in 0..c.object_count() {
        let id = c.identity_element(x);
        let basis = c.hom_basis(x, x);
        for (p, coeff) in id.coords.iter().enumerate() {
            if !coeff.is_zero() && g.degrees[basis[p]] != one {
                return Err(GradingError::Violation(GradingViolation {
                    left: None,
                    right: None,
                    offending: c.basis()[basis[p]].name.clone(),
                    reason: format!(
                        "identity of object {} has a component of degree {}",
                        c.objects()[x],
                        gp.render(&g.degrees[basis[p]])
                    ),
                }));
            }
        }
    }
    let mut checked = 0usize;
    for (h, bh) in c.basis().iter().enumerate() {
        for (f, bf) in c.basis().iter().enumerate() {
            if bf.target != bh.source {
                continue;
            }
            checked += 1;
            let expected = gp.multiply(&g.degrees[h], &g.degrees[f])?;
            for (k, coeff) in c.compose_basis(h, f) {
                debug_assert!(!coeff.is_zero());
                if g.degrees[*k] != expected {
                    return Err(GradingError::Violation(GradingViolation {
                        left: Some(bh.name.clone()),
                        right: Some(bf.name.clone()),
                        offending: c.basis()[*k].name.clone(),
                        reason: format!(
                            "degree {} where {} is required",
                            gp.render(&g.degrees[*k]),
                            gp.render(&expected)
                        ),
                    }));
                }
            }
        }
    }
    Ok(GradingCertificate { checked_pairs: checked, support_size: support(g).len() })
}

/// The degrees carrying a nonzero component, deduplicated, in a deterministic
/// order (word length, then rendering).
pub fn support(g: &Grading) -> Vec<GroupElement> {
    let mut seen = HashSet::new();
    let mut out: Vec<GroupElement> = Vec::new();
    for d in &g.degrees {
        if seen.insert(d.clone()) {
            out.push(d.clone());
        }
    }
    out.sort_by_key(|d| (g.group.word_length(d), g.group.render(d)));
    out
}

/// Dimension of the component of trivial degree.
pub fn trivial_component_dimension(g: &Grading) -> usize {
    g.component(&g.group.identity()).len()
}

/// Multiset of homogeneous component dimensions, sorted ascending.
pub fn component_dimensions(g: &Grading) -> Vec<usize> {
    let mut dims: Vec<usize> = support(g).iter().map(|d| g.component(d).len()).collect();
    dims.sort_unstable();
    dims
}

/// Connectedness of a grading. One object: the support must generate the
/// group. Several objects: the category must be walk-connected and the
/// degrees of closed homogeneous walks at the first object must exhaust the
/// group; for finite groups this is decided exactly by a state search, for
/// infinite groups walks are searched up to a length bound and `Unknown` is
/// returned when the bound is exhausted without a generating set.
pub fn is_connected(g: &Grading) -> Result<Generates, GradingError> {
    if g.category.is_single_object() {
        return Ok(g.group.generates(&support(g))?);
    }
    if !category_walk_connected(&g.category) {
        return Ok(Generates::No);
    }
    match g.group.order() {
        Some(order) if order <= 1 << 20 => {
            let degrees = closed_walk_degrees_exact(g)?;
            Ok(if degrees.len() as u128 == order { Generates::Yes } else { Generates::No })
        }
        _ => {
            let bound = walk_length_bound(g);
            let degrees = closed_walk_degrees_bounded(g, bound)?;
            match g.group.generates(&degrees)? {
                Generates::Yes => Ok(Generates::Yes),
                _ => Ok(Generates::Unknown),
            }
        }
    }
}

/// Default walk-length bound: 2 * objects * (max generator order, or 6 when
/// some generator has infinite order).
fn walk_length_bound(g: &Grading) -> usize {
    let mut max_order = 1u64;
    let mut infinite = g.group.generator_count() == 0;
    for i in 0..g.group.generator_count() {
        let gen = g.group.generator(i).expect("generator index in range");
        match g.group.element_order(&gen).expect("valid element") {
            Some(o) => max_order = max_order.max(o),
            None => infinite = true,
        }
    }
    let per_object = if infinite { 6 } else { max_order.max(6) as usize };
    2 * g.category.object_count() * per_object
}

pub(crate) fn category_walk_connected(c: &LinearCategory) -> bool {
    let n = c.object_count();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for (y, visited) in seen.iter_mut().enumerate() {
            if !*visited && (c.hom_dim(x, y) > 0 || c.hom_dim(y, x) > 0) {
                *visited = true;
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// All degrees of closed walks at object 0, via reachability over states
/// (object, accumulated degree). Exact for finite groups.
fn closed_walk_degrees_exact(g: &Grading) -> Result<Vec<GroupElement>, GradingError> {
    walk_state_search(g, None)
}

fn closed_walk_degrees_bounded(g: &Grading, bound: usize) -> Result<Vec<GroupElement>, GradingError> {
    walk_state_search(g, Some(bound))
}

fn walk_state_search(
    g: &Grading,
    bound: Option<usize>,
) -> Result<Vec<GroupElement>, GradingError> {
    let c = &g.category;
    let gp = &g.group;
    let start = (0usize, gp.identity());
    let mut seen: HashSet<(usize, GroupElement)> = HashSet::from([start.clone()]);
    let mut frontier = vec![start];
    let mut depth = 0usize;
    while !frontier.is_empty() {
        if let Some(b) = bound {
            if depth >= b {
                break;
            }
        }
        depth += 1;
        let mut next = Vec::new();
        for (x, acc) in frontier {
            for (i, b) in c.basis().iter().enumerate() {
                // Forward step along b, or backward against it.
                if b.source == x {
                    let d = gp.multiply(&g.degrees[i], &acc)?;
                    let state = (b.target, d);
                    if seen.insert(state.clone()) {
                        next.push(state);
                    }
                }
                if b.target == x {
                    let d = gp.multiply(&gp.invert(&g.degrees[i])?, &acc)?;
                    let state = (b.source, d);
                    if seen.insert(state.clone()) {
                        next.push(state);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<GroupElement> =
        seen.into_iter().filter(|(x, _)| *x == 0).map(|(_, d)| d).collect();
    out.sort_by_key(|d| (gp.word_length(d), gp.render(d)));
    Ok(out)
}

/// Relabels all degrees through a surjective homomorphism out of the grading
/// group.
pub fn quotient_grading(g: &Grading, map: &Homomorphism) -> Result<Grading, GradingError> {
    if map.source() != &g.group {
        return Err(GradingError::Mismatch(
            "homomorphism source is not the grading group".into(),
        ));
    }
    match map.target().generates(map.images())? {
        Generates::Yes => {}
        Generates::No => {
            return Err(GradingError::NotSurjective(
                "generator images do not generate the target".into(),
            ))
        }
        Generates::Unknown => {
            return Err(GradingError::NotSurjective(
                "surjectivity of the quotient map could not be established".into(),
            ))
        }
    }
    let degrees: Result<Vec<GroupElement>, GroupError> =
        g.degrees.iter().map(|d| map.evaluate(d)).collect();
    Grading::from_degree_vec(g.category.clone(), map.target().clone(), degrees?)
}

/// A walk: signed steps through basis morphisms. A step (f, +1) traverses f
/// from source to target, (f, -1) the other way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub steps: Vec<(String, i8)>,
}

impl Walk {
    pub fn new(steps: Vec<(String, i8)>) -> Self {
        Walk { steps }
    }
}

/// Endpoints (start object, end object) of a walk in the category, verifying
/// the chain condition.
pub fn walk_endpoints(c: &LinearCategory, w: &Walk) -> Result<(usize, usize), GradingError> {
    let mut ends: Option<(usize, usize)> = None;
    for (name, sign) in &w.steps {
        if *sign != 1 && *sign != -1 {
            return Err(GradingError::Mismatch(format!("step sign must be +1 or -1, got {sign}")));
        }
        let i = c
            .basis_index(name)
            .ok_or_else(|| GradingError::UnknownBasis(name.clone()))?;
        let b = &c.basis()[i];
        let (from, to) = if *sign == 1 { (b.source, b.target) } else { (b.target, b.source) };
        ends = match ends {
            None => Some((from, to)),
            Some((start, prev_end)) => {
                if prev_end != from {
                    return Err(GradingError::BrokenChain(format!(
                        "step {name} starts at {} but the walk is at {}",
                        c.objects()[from],
                        c.objects()[prev_end]
                    )));
                }
                Some((start, to))
            }
        };
    }
    ends.ok_or_else(|| GradingError::BrokenChain("empty walk".into()))
}

/// Degree of a walk: the signed product of step degrees, first step
/// rightmost.
pub fn walk_degree(g: &Grading, w: &Walk) -> Result<GroupElement, GradingError> {
    walk_endpoints(&g.category, w)?;
    let gp = &g.group;
    let mut acc = gp.identity();
    for (name, sign) in &w.steps {
        let d = g.degree(name)?;
        let step = if *sign == 1 { d.clone() } else { gp.invert(d)? };
        acc = gp.multiply(&step, &acc)?;
    }
    Ok(acc)
}

/// Discriminator between the two kinds of connected gradings of a one-object
/// algebra: does some homogeneous element of nontrivial degree have an
/// inverse? Tests every basis element, then per degree the all-ones
/// combination, then seeded random exact trials.
pub fn has_invertible_nontrivial_homogeneous(g: &Grading) -> Result<bool, GradingError> {
    g.category.require_algebra()?;
    let field = g.category.field().clone();
    let one = g.group.identity();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6772616421);
    for d in support(g) {
        if d == one {
            continue;
        }
        let indices = g.component(&d);
        for &i in &indices {
            if crate::algebra::is_invertible(&g.category, &g.category.basis_element(i))? {
                return Ok(true);
            }
        }
        let ones: Vec<(usize, crate::scalars::Scalar)> =
            indices.iter().map(|i| (*i, field.one())).collect();
        let candidate = g.category.element_from_terms(&ones)?;
        if crate::algebra::is_invertible(&g.category, &candidate)? {
            return Ok(true);
        }
        for _ in 0..8 {
            let terms: Vec<(usize, crate::scalars::Scalar)> = indices
                .iter()
                .map(|i| (*i, field.from_integer(rng.gen_range(1i64..=7))))
                .collect();
            let candidate = g.category.element_from_terms(&terms)?;
            if crate::algebra::is_invertible(&g.category, &candidate)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// The comparable invariants of a grading used by `distinguish`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradingInvariants {
    pub component_dimensions: Vec<usize>,
    pub trivial_component_dimension: usize,
    /// None for multi-object categories, where the discriminator is not
    /// defined.
    pub has_invertible_nontrivial: Option<bool>,
    pub group_name: String,
}

pub fn grading_invariants(g: &Grading) -> Result<GradingInvariants, GradingError> {
    let has_inv = if g.category.is_single_object() {
        Some(has_invertible_nontrivial_homogeneous(g)?)
    } else {
        None
    };
    Ok(GradingInvariants {
        component_dimensions: component_dimensions(g),
        trivial_component_dimension: trivial_component_dimension(g),
        has_invertible_nontrivial: has_inv,
        group_name: g.group.describe(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistinctionReport {
    pub left: GradingInvariants,
    pub right: GradingInvariants,
    /// (invariant name, left value, right value) of the first difference.
    pub distinguishing: Option<(String, String, String)>,
}

impl fmt::Display for DistinctionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.distinguishing {
            Some((name, l, r)) => write!(f, "distinguished by {name}: {l} vs {r}"),
            None => write!(f, "indistinguishable by these invariants"),
        }
    }
}

/// Compares two gradings of the same algebra by invariants, reporting the
/// first one that differs. The invariants are presentation-independent, so
/// the two gradings may live on different bases of the algebra; only field
/// and dimension compatibility is enforced here.
pub fn distinguish(g1: &Grading, g2: &Grading) -> Result<DistinctionReport, GradingError> {
    if g1.category.field() != g2.category.field()
        || g1.category.dimension() != g2.category.dimension()
    {
        return Err(GradingError::Mismatch(
            "gradings to distinguish must present one algebra: same field and dimension".into(),
        ));
    }
    let left = grading_invariants(g1)?;
    let right = grading_invariants(g2)?;
    let mut distinguishing = None;
    if left.component_dimensions != right.component_dimensions {
        distinguishing = Some((
            "component-dimension multiset".to_string(),
            format!("{:?}", left.component_dimensions),
            format!("{:?}", right.component_dimensions),
        ));
    } else if left.trivial_component_dimension != right.trivial_component_dimension {
        distinguishing = Some((
            "trivial component dimension".to_string(),
            left.trivial_component_dimension.to_string(),
            right.trivial_component_dimension.to_string(),
        ));
    } else if left.has_invertible_nontrivial != right.has_invertible_nontrivial {
        distinguishing = Some((
            "invertible homogeneous element of nontrivial degree".to_string(),
            format!("{:?}", left.has_invertible_nontrivial),
            format!("{:?}", right.has_invertible_nontrivial),
        ));
    } else if isomorphic(&g1.group, &g2.group) == Generates::No {
        distinguishing = Some((
            "group isomorphism class".to_string(),
            format!("{:?}", canonical_form(&g1.group)),
            format!("{:?}", canonical_form(&g2.group)),
        ));
    }
    Ok(DistinctionReport { left, right, distinguishing })
}

/// True iff the quotient of `source` along the map equals `target` degree by
/// degree. Both gradings must live on the same category.
pub fn check_quotient_arrow(
    source: &Grading,
    target: &Grading,
    map: &Homomorphism,
) -> Result<bool, GradingError> {
    if source.category != target.category {
        return Err(GradingError::Mismatch(
            "quotient arrows need a shared category".into(),
        ));
    }
    let q = quotient_grading(source, map)?;
    if q.group != target.group {
        return Ok(false);
    }
    Ok(q.degrees == target.degrees)
}

/// Quotient-arrow check across two presentations of the same algebra: the
/// bridge is a verified isomorphism from the source grading's category to the
/// target grading's. The arrow holds iff the bridge maps each source basis
/// morphism to a target-homogeneous element of the mapped degree.
pub fn check_quotient_arrow_via(
    source: &Grading,
    target: &Grading,
    map: &Homomorphism,
    bridge: &AlgebraMorphism,
) -> Result<bool, GradingError> {
    if bridge.source() != &source.category || bridge.target() != &target.category {
        return Err(GradingError::Mismatch(
            "bridge endpoints do not match the gradings' categories".into(),
        ));
    }
    if !bridge.is_bijective()? {
        return Err(GradingError::Mismatch("bridge is not an isomorphism".into()));
    }
    let q = quotient_grading(source, map)?;
    if q.group != target.group {
        return Ok(false);
    }
    for (i, d) in q.degrees.iter().enumerate() {
        let image = bridge.apply(&source.category.basis_element(i))?;
        match target.homogeneous_degree(&image) {
            Ok(Some(found)) if &found == d => {}
            Ok(None) => {
                // The bridge is injective, so a zero image is impossible.
                unreachable!("isomorphism sent a basis element to zero")
            }
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// An arrow of a grading diagram. `bridge` is required when the two node
/// gradings live on different presentations of the algebra.
#[derive(Debug, Clone)]
pub struct GradingArrow {
    pub source: usize,
    pub target: usize,
    pub map: Homomorphism,
    pub bridge: Option<AlgebraMorphism>,
}

/// A diagram of verified connected gradings of one algebra, with quotient
/// arrows. Every node passes `verify_grading`; every arrow is surjective and
/// passes the (possibly bridged) quotient check.
#[derive(Debug, Clone)]
pub struct GradingDiagram {
    nodes: Vec<Grading>,
    arrows: Vec<GradingArrow>,
}

impl GradingDiagram {
    pub fn new(nodes: Vec<Grading>, arrows: Vec<GradingArrow>) -> Result<Self, GradingError> {
        for g in &nodes {
            verify_grading(g)?;
        }
        for a in &arrows {
            if a.source >= nodes.len() || a.target >= nodes.len() {
                return Err(GradingError::Mismatch("arrow endpoint out of range".into()));
            }
            let s = &nodes[a.source];
            let t = &nodes[a.target];
            if a.map.source() != &s.group || a.map.target() != &t.group {
                return Err(GradingError::Mismatch(format!(
                    "arrow {} -> {} does not match the node groups",
                    a.source, a.target
                )));
            }
            let ok = match &a.bridge {
                None => check_quotient_arrow(s, t, &a.map)?,
                Some(b) => check_quotient_arrow_via(s, t, &a.map, b)?,
            };
            if !ok {
                return Err(GradingError::Mismatch(format!(
                    "arrow {} -> {} is not a quotient of gradings",
                    a.source, a.target
                )));
            }
        }
        Ok(GradingDiagram { nodes, arrows })
    }

    pub fn nodes(&self) -> &[Grading] {
        &self.nodes
    }

    pub fn arrows(&self) -> &[GradingArrow] {
        &self.arrows
    }

    /// The underlying diagram of grading groups and quotient maps.
    pub fn group_diagram(&self) -> Result<GroupDiagram, GroupError> {
        GroupDiagram::new(
            self.nodes.iter().map(|g| g.group.clone()).collect(),
            self.arrows
                .iter()
                .map(|a| (a.source, a.target, a.map.clone()))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        make_group_algebra, make_matrix_algebra, make_matrix_xy, make_truncated_poly,
        quiver_presentation_matrix, xy_to_matrix_units,
    };
    use crate::scalars::FieldDescriptor;
    use proptest::prelude::*;

    fn q() -> FieldDescriptor {
        FieldDescriptor::rational()
    }

    fn cyc(n: u64) -> GroupDescriptor {
        GroupDescriptor::cyclic(n).expect("valid")
    }

    fn pow(g: &GroupDescriptor, e: &GroupElement, k: usize) -> GroupElement {
        let mut acc = g.identity();
        for _ in 0..k {
            acc = g.multiply(e, &acc).unwrap();
        }
        acc
    }

    /// The fine C_n x C_n grading of the x,y-presentation of M_n:
    /// deg x^i y^j = (t^i, t^j).
    fn fine_grading(n: usize, field: &FieldDescriptor) -> Grading {
        let xy = make_matrix_xy(n, field).unwrap();
        let group = GroupDescriptor::finite_abelian(vec![n as u64, n as u64]).unwrap();
        let a = group.generator(0).unwrap();
        let b = group.generator(1).unwrap();
        let mut degrees = Vec::new();
        for i in 0..n {
            for j in 0..n {
                degrees.push(group.multiply(&pow(&group, &a, i), &pow(&group, &b, j)).unwrap());
            }
        }
        Grading::from_degree_vec(xy.category, group, degrees).unwrap()
    }

    /// Good grading of the matrix-unit algebra from object labels delta:
    /// deg E_j_i = delta[j-1] * delta[i-1]^{-1}.
    fn good_matrix_grading(
        n: usize,
        field: &FieldDescriptor,
        group: &GroupDescriptor,
        deltas: &[GroupElement],
    ) -> Grading {
        let units = make_matrix_algebra(n, field).unwrap();
        let mut degree = HashMap::new();
        for j in 1..=n {
            for i in 1..=n {
                let d = group
                    .multiply(&deltas[j - 1], &group.invert(&deltas[i - 1]).unwrap())
                    .unwrap();
                degree.insert(format!("E_{j}_{i}"), d);
            }
        }
        Grading::new(units, group.clone(), &degree).unwrap()
    }

    /// The good C_2 grading of M_2 (deg E_21 = deg E_12 = t).
    fn good_c2_m2() -> Grading {
        let group = cyc(2);
        let t = group.generator(0).unwrap();
        let deltas = vec![group.identity(), t];
        good_matrix_grading(2, &q(), &group, &deltas)
    }

    #[test]
    fn verification_accepts_valid_gradings() {
        let fine = fine_grading(2, &q());
        let cert = verify_grading(&fine).unwrap();
        assert_eq!(cert.support_size, 4);

        // x^2 = 0 lands vacuously in the degree-t^2 component.
        let a2 = make_truncated_poly(2, &q()).unwrap();
        let c3 = cyc(3);
        let t = c3.generator(0).unwrap();
        let g = Grading::from_degree_vec(a2, c3, vec![
            GroupDescriptor::cyclic(3).unwrap().identity(),
            t,
        ])
        .unwrap();
        verify_grading(&g).unwrap();
    }

    #[test]
    fn verification_reports_violations() {
        // An idempotent of nontrivial degree breaks the identity rule.
        let units = make_matrix_algebra(2, &q()).unwrap();
        let c2 = cyc(2);
        let t = c2.generator(0).unwrap();
        let mut degree = HashMap::new();
        degree.insert("E_1_1".to_string(), t.clone());
        degree.insert("E_2_2".to_string(), c2.identity());
        degree.insert("E_2_1".to_string(), c2.identity());
        degree.insert("E_1_2".to_string(), c2.identity());
        let g = Grading::new(units.clone(), c2.clone(), &degree).unwrap();
        match verify_grading(&g) {
            Err(GradingError::Violation(v)) => {
                assert_eq!(v.offending, "E_1_1");
                assert!(v.left.is_none());
            }
            other => panic!("expected identity violation, got {other:?}"),
        }

        // A product landing in the wrong component reports its triple.
        let mut degree = HashMap::new();
        degree.insert("E_1_1".to_string(), c2.identity());
        degree.insert("E_2_2".to_string(), c2.identity());
        degree.insert("E_2_1".to_string(), t.clone());
        degree.insert("E_1_2".to_string(), c2.identity());
        let g = Grading::new(units, c2, &degree).unwrap();
        // First violating triple in scan order: E_1_2 . E_2_1 = E_1_1 must
        // land in degree 1 * t = t but E_1_1 has degree 1.
        match verify_grading(&g) {
            Err(GradingError::Violation(v)) => {
                assert_eq!(v.left.as_deref(), Some("E_1_2"));
                assert_eq!(v.right.as_deref(), Some("E_2_1"));
                assert_eq!(v.offending, "E_1_1");
            }
            other => panic!("expected product violation, got {other:?}"),
        }
    }

    #[test]
    fn support_examples() {
        let m2 = make_matrix_algebra(2, &q()).unwrap();
        let trivial = Grading::trivial(m2, cyc(2));
        let s = support(&trivial);
        assert_eq!(s.len(), 1);
        assert!(s[0] == trivial.group().identity());

        let fine = fine_grading(2, &q());
        assert_eq!(support(&fine).len(), 4);

        let f1 = GroupDescriptor::free(1, None).unwrap();
        let s1 = f1.generator(0).unwrap();
        let deltas = vec![f1.identity(), s1.clone()];
        let good = good_matrix_grading(2, &q(), &f1, &deltas);
        let sup = support(&good);
        let rendered: Vec<String> = sup.iter().map(|d| f1.render(d)).collect();
        assert_eq!(rendered, vec!["1", "s1", "s1^-1"]);
    }

    #[test]
    fn connectedness_of_one_object_gradings() {
        assert_eq!(is_connected(&fine_grading(2, &q())).unwrap(), Generates::Yes);

        // Support {1, t^2} inside C_4 cannot generate.
        let c4 = cyc(4);
        let t = c4.generator(0).unwrap();
        let t2 = pow(&c4, &t, 2);
        let deltas = vec![c4.identity(), t2];
        let sparse = good_matrix_grading(2, &q(), &c4, &deltas);
        assert_eq!(is_connected(&sparse).unwrap(), Generates::No);

        let k1 = crate::algebra::make_diagonal(1, &q()).unwrap();
        let trivial = Grading::trivial(k1, GroupDescriptor::trivial());
        assert_eq!(is_connected(&trivial).unwrap(), Generates::Yes);
    }

    /// Two objects, two parallel arrows a, b: v1 -> v2 of degrees t and 1.
    fn parallel_arrows_grading(group: GroupDescriptor, da: GroupElement) -> Grading {
        let field = q();
        let basis = vec![
            ("id1".to_string(), 0, 0),
            ("id2".to_string(), 1, 1),
            ("a".to_string(), 0, 1),
            ("b".to_string(), 0, 1),
        ];
        let mut compose = HashMap::new();
        compose.insert((0, 0), vec![(0, field.one())]);
        compose.insert((1, 1), vec![(1, field.one())]);
        compose.insert((2, 0), vec![(2, field.one())]);
        compose.insert((1, 2), vec![(2, field.one())]);
        compose.insert((3, 0), vec![(3, field.one())]);
        compose.insert((1, 3), vec![(3, field.one())]);
        let c = LinearCategory::new(
            field.clone(),
            vec!["v1".into(), "v2".into()],
            basis,
            compose,
            vec![vec![(0, field.one())], vec![(1, field.one())]],
        )
        .unwrap();
        let id = group.identity();
        Grading::from_degree_vec(c, group, vec![id.clone(), id.clone(), da, id]).unwrap()
    }

    #[test]
    fn connectedness_of_multi_object_gradings() {
        // The good C_2 grading of the two-object matrix presentation: every
        // closed walk crosses an even number of degree-t arrows.
        let pres = quiver_presentation_matrix(2, &q()).unwrap();
        let c2 = cyc(2);
        let t = c2.generator(0).unwrap();
        let mut degree = HashMap::new();
        degree.insert("w_1_1".to_string(), c2.identity());
        degree.insert("w_2_2".to_string(), c2.identity());
        degree.insert("w_2_1".to_string(), t.clone());
        degree.insert("w_1_2".to_string(), t.clone());
        let g = Grading::new(pres.category.clone(), c2.clone(), &degree).unwrap();
        verify_grading(&g).unwrap();
        assert_eq!(is_connected(&g).unwrap(), Generates::No);

        // Parallel arrows of degrees t and 1 make the closed walks generate.
        let g = parallel_arrows_grading(cyc(2), cyc(2).generator(0).unwrap());
        verify_grading(&g).unwrap();
        assert_eq!(is_connected(&g).unwrap(), Generates::Yes);

        // Same picture over Z: the bounded search cannot certify generation
        // of an infinite group from walks that only reach t and t^{-1}...
        // it can: {s} generates Z. Use degree 2s instead, where closed walks
        // realize only even multiples.
        let z = GroupDescriptor::free(1, None).unwrap();
        let s = z.generator(0).unwrap();
        let s2 = pow(&z, &s, 2);
        let g = parallel_arrows_grading(z.clone(), s2);
        assert_eq!(is_connected(&g).unwrap(), Generates::Unknown);
        let g = parallel_arrows_grading(z.clone(), s);
        assert_eq!(is_connected(&g).unwrap(), Generates::Yes);

        // A category with no morphisms between its two objects.
        let field = q();
        let basis = vec![("id1".to_string(), 0, 0), ("id2".to_string(), 1, 1)];
        let mut compose = HashMap::new();
        compose.insert((0, 0), vec![(0, field.one())]);
        compose.insert((1, 1), vec![(1, field.one())]);
        let c = LinearCategory::new(
            field.clone(),
            vec!["v1".into(), "v2".into()],
            basis,
            compose,
            vec![vec![(0, field.one())], vec![(1, field.one())]],
        )
        .unwrap();
        let g = Grading::trivial(c, GroupDescriptor::trivial());
        assert_eq!(is_connected(&g).unwrap(), Generates::No);
    }

    #[test]
    fn quotients_relabel_degrees() {
        // Fine C_2 x C_2 grading of M_2 along (a, b) -> a.
        let fine = fine_grading(2, &q());
        let v4 = fine.group().clone();
        let c2 = cyc(2);
        let t = c2.generator(0).unwrap();
        let onto_first =
            Homomorphism::new(v4.clone(), c2.clone(), vec![t.clone(), c2.identity()]).unwrap();
        let quot = quotient_grading(&fine, &onto_first).unwrap();
        verify_grading(&quot).unwrap();
        assert_eq!(quot.degree("x").unwrap(), &t);
        assert_eq!(quot.degree("y").unwrap(), &c2.identity());
        assert_eq!(quot.degree("x*y").unwrap(), &t);
        assert_eq!(is_connected(&quot).unwrap(), Generates::Yes);

        // Quotient to the trivial group kills all degrees.
        let trivial = GroupDescriptor::trivial();
        let collapse = Homomorphism::new(v4, trivial.clone(), vec![
            trivial.identity(),
            trivial.identity(),
        ])
        .unwrap();
        let quot = quotient_grading(&fine, &collapse).unwrap();
        assert!(quot.degrees.iter().all(|d| d == &trivial.identity()));

        // Z-grading of k[x]/(x^3) along Z -> C_3.
        let a3 = make_truncated_poly(3, &q()).unwrap();
        let z = GroupDescriptor::free(1, None).unwrap();
        let s = z.generator(0).unwrap();
        let zg = Grading::from_degree_vec(
            a3,
            z.clone(),
            vec![z.identity(), s.clone(), pow(&z, &s, 2)],
        )
        .unwrap();
        let c3 = cyc(3);
        let t3 = c3.generator(0).unwrap();
        let red = Homomorphism::new(z, c3.clone(), vec![t3.clone()]).unwrap();
        let quot = quotient_grading(&zg, &red).unwrap();
        assert_eq!(quot.degree("x^2").unwrap(), &pow(&c3, &t3, 2));

        // Non-surjective maps are refused.
        let c4 = cyc(4);
        let embed = Homomorphism::new(
            c2.clone(),
            c4.clone(),
            vec![pow(&c4, &c4.generator(0).unwrap(), 2)],
        )
        .unwrap();
        let g2 = good_c2_m2();
        assert!(matches!(
            quotient_grading(&g2, &embed),
            Err(GradingError::NotSurjective(_))
        ));
    }

    #[test]
    fn walk_degrees_multiply_signed_steps() {
        let g = good_c2_m2();
        let t = g.group().generator(0).unwrap();
        let single = Walk::new(vec![("E_2_1".to_string(), 1)]);
        assert_eq!(walk_degree(&g, &single).unwrap(), t);

        let back_and_forth = Walk::new(vec![("E_2_1".to_string(), 1), ("E_2_1".to_string(), -1)]);
        assert_eq!(walk_degree(&g, &back_and_forth).unwrap(), g.group().identity());

        let closed = Walk::new(vec![("E_2_1".to_string(), 1), ("E_1_2".to_string(), 1)]);
        assert_eq!(walk_degree(&g, &closed).unwrap(), g.group().identity());

        // On a multi-object category, steps must chain.
        let pres = quiver_presentation_matrix(2, &q()).unwrap();
        let c2 = cyc(2);
        let mut degree = HashMap::new();
        for b in pres.category.basis() {
            degree.insert(b.name.clone(), c2.identity());
        }
        let g = Grading::new(pres.category.clone(), c2, &degree).unwrap();
        let w = Walk::new(vec![("w_2_1".to_string(), 1), ("w_2_1".to_string(), 1)]);
        assert!(matches!(walk_degree(&g, &w), Err(GradingError::BrokenChain(_))));
        let w = Walk::new(vec![("w_2_1".to_string(), 1), ("w_1_2".to_string(), 1)]);
        assert_eq!(walk_endpoints(&g.category, &w).unwrap(), (0, 0));
        assert!(matches!(
            walk_degree(&g, &Walk::new(vec![])),
            Err(GradingError::BrokenChain(_))
        ));
    }

    #[test]
    fn invertibility_discriminator() {
        // Group-like elements of kC_3 are invertible in every degree.
        let c3 = cyc(3);
        let kc3 = make_group_algebra(&c3, &q()).unwrap();
        let mut degree = HashMap::new();
        let elements = c3.enumerate(None).unwrap();
        for e in &elements {
            degree.insert(c3.render(e), e.clone());
        }
        let natural = Grading::new(kc3, c3, &degree).unwrap();
        verify_grading(&natural).unwrap();
        assert!(has_invertible_nontrivial_homogeneous(&natural).unwrap());

        // Every nontrivially-graded element of k[x]/(x^3) under the Z-grading
        // lies in the maximal ideal (x).
        let a3 = make_truncated_poly(3, &q()).unwrap();
        let z = GroupDescriptor::free(1, None).unwrap();
        let s = z.generator(0).unwrap();
        let zg = Grading::from_degree_vec(
            a3.clone(),
            z,
            vec![GroupDescriptor::free(1, None).unwrap().identity(), s.clone(), pow(&GroupDescriptor::free(1, None).unwrap(), &s, 2)],
        )
        .unwrap();
        assert!(!has_invertible_nontrivial_homogeneous(&zg).unwrap());

        // Trivial grading: no nontrivial degree at all.
        let m2 = make_matrix_algebra(2, &q()).unwrap();
        let trivial = Grading::trivial(m2, cyc(2));
        assert!(!has_invertible_nontrivial_homogeneous(&trivial).unwrap());

        // Good C_2 grading of M_2: no single basis element of degree t is
        // invertible, but E_21 + E_12 is; the generic fallback finds it.
        assert!(has_invertible_nontrivial_homogeneous(&good_c2_m2()).unwrap());
    }

    #[test]
    fn distinguishing_invariants() {
        // Fine versus good F_1 grading of M_2: component dimensions differ,
        // with trivial components of dimension 1 versus 2.
        let fine = fine_grading(2, &q());
        let f1 = GroupDescriptor::free(1, None).unwrap();
        let deltas = vec![f1.identity(), f1.generator(0).unwrap()];
        let good = good_matrix_grading(2, &q(), &f1, &deltas);
        let report = distinguish(&fine, &good).unwrap();
        assert!(report.distinguishing.is_some());
        assert_eq!(report.left.trivial_component_dimension, 1);
        assert_eq!(report.right.trivial_component_dimension, 2);

        // The two C_3-grading types of a three-dimensional algebra in
        // characteristic 3 share all dimension data and differ exactly in the
        // invertibility discriminator.
        let f3 = FieldDescriptor::prime(3).unwrap();
        let c3 = cyc(3);
        let t = c3.generator(0).unwrap();
        let kc3 = make_group_algebra(&c3, &f3).unwrap();
        let mut degree = HashMap::new();
        for e in c3.enumerate(None).unwrap() {
            degree.insert(c3.render(&e), e.clone());
        }
        let natural = Grading::new(kc3, c3.clone(), &degree).unwrap();
        let a3 = make_truncated_poly(3, &f3).unwrap();
        let modp = Grading::from_degree_vec(
            a3,
            c3.clone(),
            vec![c3.identity(), t.clone(), pow(&c3, &t, 2)],
        )
        .unwrap();
        let report = distinguish(&natural, &modp).unwrap();
        match &report.distinguishing {
            Some((name, l, r)) => {
                assert!(name.contains("invertible"), "distinguished by {name}");
                assert_eq!(l, "Some(true)");
                assert_eq!(r, "Some(false)");
            }
            None => panic!("expected a distinction"),
        }

        // A grading against itself is indistinguishable.
        let report = distinguish(&natural, &natural).unwrap();
        assert!(report.distinguishing.is_none());
        assert_eq!(report.to_string(), "indistinguishable by these invariants");
    }

    #[test]
    fn quotient_arrows_direct_and_bridged() {
        // Identity self-arrow.
        let g = good_c2_m2();
        let c2 = g.group().clone();
        let ident = Homomorphism::new(c2.clone(), c2.clone(), vec![c2.generator(0).unwrap()]).unwrap();
        assert!(check_quotient_arrow(&g, &g, &ident).unwrap());

        // Fine grading of M_2 maps onto the good C_2 grading along the first
        // projection, across the change of presentation.
        let fine = fine_grading(2, &q());
        let v4 = fine.group().clone();
        let t = c2.generator(0).unwrap();
        let bridge = xy_to_matrix_units(&make_matrix_xy(2, &q()).unwrap()).unwrap();
        let first = Homomorphism::new(v4.clone(), c2.clone(), vec![t.clone(), c2.identity()]).unwrap();
        assert!(check_quotient_arrow_via(&fine, &g, &first, &bridge).unwrap());

        // The second projection sends x to degree 1 but its image E_21 + E_12
        // has degree t: not a quotient arrow.
        let second = Homomorphism::new(v4, c2.clone(), vec![c2.identity(), t]).unwrap();
        assert!(!check_quotient_arrow_via(&fine, &g, &second, &bridge).unwrap());
    }

    #[test]
    fn grading_diagrams_validate_their_arrows() {
        let fine = fine_grading(2, &q());
        let v4 = fine.group().clone();
        let c2 = cyc(2);
        let t = c2.generator(0).unwrap();
        let f1 = GroupDescriptor::free(1, None).unwrap();
        let deltas = vec![f1.identity(), f1.generator(0).unwrap()];
        let free_good = good_matrix_grading(2, &q(), &f1, &deltas);
        let common = good_c2_m2();
        let bridge = xy_to_matrix_units(&make_matrix_xy(2, &q()).unwrap()).unwrap();
        let from_free = Homomorphism::new(f1.clone(), c2.clone(), vec![t.clone()]).unwrap();
        let from_fine = Homomorphism::new(v4.clone(), c2.clone(), vec![t.clone(), c2.identity()]).unwrap();
        let diagram = GradingDiagram::new(
            vec![free_good.clone(), fine.clone(), common.clone()],
            vec![
                GradingArrow { source: 0, target: 2, map: from_free.clone(), bridge: None },
                GradingArrow { source: 1, target: 2, map: from_fine, bridge: Some(bridge.clone()) },
            ],
        )
        .unwrap();
        assert_eq!(diagram.nodes().len(), 3);
        let gd = diagram.group_diagram().unwrap();
        assert_eq!(gd.nodes().len(), 3);
        assert_eq!(gd.arrows().len(), 2);

        // A wrong quotient map is rejected at construction.
        let wrong = Homomorphism::new(v4, c2.clone(), vec![c2.identity(), t]).unwrap();
        let bad = GradingDiagram::new(
            vec![fine, common],
            vec![GradingArrow { source: 0, target: 1, map: wrong, bridge: Some(bridge) }],
        );
        assert!(matches!(bad, Err(GradingError::Mismatch(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Good gradings of M_n over C_k: quotient support is the image of
        /// the support, validity and connectedness pass to quotients.
        #[test]
        fn quotient_support_and_connectedness(
            n in 2usize..=3,
            k in 1u64..=6,
            sel in any::<usize>(),
            exps in proptest::collection::vec(0u64..6, 2),
        ) {
            let group = cyc(k);
            let t = if k > 1 { group.generator(0).unwrap() } else { group.identity() };
            let mut deltas = vec![group.identity()];
            for i in 0..n - 1 {
                let step = pow(&group, &t, (exps[i] % k) as usize);
                deltas.push(group.multiply(&step, &deltas[i]).unwrap());
            }
            let g = good_matrix_grading(n, &q(), &group, &deltas);
            verify_grading(&g).unwrap();

            let divisors: Vec<u64> = (1..=k).filter(|d| k % d == 0).collect();
            let d = divisors[sel % divisors.len()];
            let cd = cyc(d);
            let image = if d > 1 { cd.generator(0).unwrap() } else { cd.identity() };
            let images = vec![image; group.generator_count()];
            let map = Homomorphism::new(group.clone(), cd.clone(), images).unwrap();
            let quot = quotient_grading(&g, &map).unwrap();
            verify_grading(&quot).unwrap();

            let image: HashSet<GroupElement> =
                support(&g).iter().map(|s| map.evaluate(s).unwrap()).collect();
            let qsupport: HashSet<GroupElement> = support(&quot).into_iter().collect();
            prop_assert_eq!(image, qsupport);

            if is_connected(&g).unwrap() == Generates::Yes {
                prop_assert_eq!(is_connected(&quot).unwrap(), Generates::Yes);
            }
        }
    }
}
