//! Constructors for the named connected gradings of the small algebras under
//! study (matrix, triangular, diagonal, group and truncated polynomial
//! algebras), the diagrams of their maximal gradings with quotient arrows,
//! and the classification-table reports.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::algebra::{
    self, make_group_algebra, make_matrix_algebra, make_matrix_xy, make_product_algebra,
    make_triangular, make_truncated_poly, xy_to_matrix_units, AlgebraError, AlgebraMorphism,
    LinearCategory,
};
use crate::grading::{
    self, check_quotient_arrow_via, quotient_grading, verify_grading, Grading, GradingArrow,
    GradingDiagram, GradingError,
};
use crate::groups::{Atom, Generates, GroupDescriptor, GroupElement, GroupError, Homomorphism};
use crate::scalars::{FieldDescriptor, Scalar, ScalarError};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog tag: {0}")]
    UnknownTag(String),
    #[error("certificate failure: {0}")]
    CertificateFailure(String),
    #[error("unsupported construction: {0}")]
    Unsupported(String),
    #[error("field characteristic must be {expected}, found {found}")]
    BadCharacteristic { expected: u64, found: u64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

fn require_characteristic(field: &FieldDescriptor, p: u64) -> Result<(), CatalogError> {
    let found = field.characteristic();
    if found != p {
        return Err(CatalogError::BadCharacteristic { expected: p, found });
    }
    Ok(())
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

// ---------------------------------------------------------------------------
// Matrix algebra gradings.

/// The fine grading of the matrix algebra in its root-of-unity presentation:
/// deg x^i y^j = (t^i, t^j) over C_n x C_n. Every homogeneous component is
/// one-dimensional and the support is the whole group.
pub fn fine_matrix_grading(n: usize, field: &FieldDescriptor) -> Result<Grading, CatalogError> {
    let xy = make_matrix_xy(n, field)?;
    let group = GroupDescriptor::finite_abelian(vec![n as u64, n as u64])?;
    let a = group.generator(0)?;
    let b = group.generator(1)?;
    let mut degrees = Vec::with_capacity(n * n);
    // Basis order of the presentation: x^i y^j at index i*n + j.
    for i in 0..n {
        for j in 0..n {
            let ai = group.power(&a, i as i64)?;
            let bj = group.power(&b, j as i64)?;
            degrees.push(group.multiply(&ai, &bj)?);
        }
    }
    Ok(Grading::from_degree_vec(xy.category, group, degrees)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoodKind {
    Matrix,
    Triangular,
}

/// A good grading from a map on adjacent transitions: deg E_{i+1,i} = m(i)
/// forces deg E_j_i = delta(j) delta(i)^-1 where delta(1) = 1 and
/// delta(i+1) = m(i) delta(i). Diagonal units get the trivial degree. For the
/// triangular kind only the upper-triangular units are present.
pub fn good_grading_from_map(
    kind: GoodKind,
    n: usize,
    group: &GroupDescriptor,
    m: &[GroupElement],
    field: &FieldDescriptor,
) -> Result<Grading, CatalogError> {
    if n < 1 || m.len() != n - 1 {
        return Err(CatalogError::Unsupported(format!(
            "a good grading of size {} needs {} transition degrees, got {}",
            n,
            n - 1,
            m.len()
        )));
    }
    for e in m {
        group.validate(e)?;
    }
    let mut delta = vec![group.identity()];
    for i in 0..n - 1 {
        let next = group.multiply(&m[i], &delta[i])?;
        delta.push(next);
    }
    let category = match kind {
        GoodKind::Matrix => make_matrix_algebra(n, field)?,
        GoodKind::Triangular => make_triangular(n, field)?,
    };
    let mut degrees = HashMap::new();
    for morphism in category.basis() {
        let (j, i) = parse_unit_name(&morphism.name)?;
        let d = group.multiply(&delta[j - 1], &group.invert(&delta[i - 1])?)?;
        degrees.insert(morphism.name.clone(), d);
    }
    Ok(Grading::new(category, group.clone(), &degrees)?)
}

fn parse_unit_name(name: &str) -> Result<(usize, usize), CatalogError> {
    let mut it = name.trim_start_matches("E_").split('_');
    let j = it.next().and_then(|s| s.parse().ok());
    let i = it.next().and_then(|s| s.parse().ok());
    match (j, i) {
        (Some(j), Some(i)) => Ok((j, i)),
        _ => Err(CatalogError::Unsupported(format!(
            "expected an elementary-matrix basis name, got {name}"
        ))),
    }
}

/// The finest good grading of the matrix algebra, over the free group on
/// n-1 generators with deg E_{i+1,i} = s_i.
pub fn free_good_matrix_grading(
    n: usize,
    field: &FieldDescriptor,
) -> Result<Grading, CatalogError> {
    let group = GroupDescriptor::free(n - 1, None)?;
    let m: Result<Vec<GroupElement>, GroupError> =
        (0..n - 1).map(|i| group.generator(i)).collect();
    good_grading_from_map(GoodKind::Matrix, n, &group, &m?, field)
}

// ---------------------------------------------------------------------------
// Group algebra and truncated polynomial gradings.

/// The natural grading of a finite group algebra: each group-element basis
/// vector is homogeneous of its own degree.
pub fn group_algebra_grading(
    group: &GroupDescriptor,
    field: &FieldDescriptor,
) -> Result<Grading, CatalogError> {
    let category = make_group_algebra(group, field)?;
    let mut degrees = HashMap::new();
    for e in group.enumerate(None)? {
        degrees.insert(group.render(&e), e);
    }
    Ok(Grading::new(category, group.clone(), &degrees)?)
}

/// The degree grading of k[x]/(x^p) over the free group on one generator:
/// deg x^i = s^i. Requires characteristic p, where the algebra also carries
/// the group-algebra grading it is compared against.
pub fn truncated_z_grading(p: usize, field: &FieldDescriptor) -> Result<Grading, CatalogError> {
    require_characteristic(field, p as u64)?;
    let category = make_truncated_poly(p, field)?;
    let group = GroupDescriptor::free(1, None)?;
    let s = group.generator(0)?;
    let mut degrees = Vec::with_capacity(p);
    let mut acc = group.identity();
    for _ in 0..p {
        degrees.push(acc.clone());
        acc = group.multiply(&s, &acc)?;
    }
    Ok(Grading::from_degree_vec(category, group, degrees)?)
}

/// A grading presented on a homogeneous basis together with a verified
/// change-of-basis isomorphism onto a standard presentation of the algebra.
#[derive(Debug, Clone)]
pub struct RealizedGrading {
    pub grading: Grading,
    pub realization: AlgebraMorphism,
}

/// The C_p-grading of k[x]/(x^p) in characteristic p, obtained by declaring
/// u = 1 + x a homogeneous unit of degree t: u^p = 1, so the powers of u form
/// a homogeneous basis isomorphic to the group algebra of C_p. The attached
/// morphism expands each u^i into the power basis {x^k}.
pub fn truncated_group_grading(
    p: usize,
    field: &FieldDescriptor,
) -> Result<RealizedGrading, CatalogError> {
    require_characteristic(field, p as u64)?;
    let group = GroupDescriptor::cyclic(p as u64)?;

    let name = |i: usize| match i {
        0 => "1".to_string(),
        1 => "1+x".to_string(),
        k => format!("(1+x)^{k}"),
    };
    let basis: Vec<(String, usize, usize)> = (0..p).map(|i| (name(i), 0, 0)).collect();
    let mut compose = HashMap::new();
    for i in 0..p {
        for j in 0..p {
            compose.insert((i, j), vec![((i + j) % p, field.one())]);
        }
    }
    let category = LinearCategory::new(
        field.clone(),
        vec!["*".into()],
        basis,
        compose,
        vec![vec![(0, field.one())]],
    )?;

    // Binomial expansion (1+x)^i = sum_k C(i,k) x^k; multiplicativity of the
    // resulting map is exactly the identity (1+x)^p = 1 available in
    // characteristic p, and is verified by the morphism constructor.
    let target = make_truncated_poly(p, field)?;
    let mut images = Vec::with_capacity(p);
    let mut row: Vec<i64> = vec![1];
    for _ in 0..p {
        let mut coords = vec![field.zero(); p];
        for (k, c) in row.iter().enumerate() {
            if k < p {
                coords[k] = field.from_integer(*c);
            }
        }
        images.push(target.element(0, 0, coords)?);
        let mut next = vec![1i64];
        for w in row.windows(2) {
            next.push(w[0] + w[1]);
        }
        next.push(1);
        row = next;
    }
    let realization = AlgebraMorphism::new(category.clone(), target, images)?;

    let mut degrees = HashMap::new();
    let mut acc = group.identity();
    let t = group.generator(0)?;
    for i in 0..p {
        degrees.insert(name(i), acc.clone());
        acc = group.multiply(&t, &acc)?;
    }
    let grading = Grading::new(category, group, &degrees)?;
    Ok(RealizedGrading { grading, realization })
}

// ---------------------------------------------------------------------------
// Diagonal algebra gradings.

/// The grading of the diagonal algebra k^{|G|} with one-dimensional trivial
/// component: the natural grading of the group algebra kG, realized on the
/// diagonal algebra through the character isomorphism.
pub fn ergodic_diagonal_grading(
    group: &GroupDescriptor,
    field: &FieldDescriptor,
) -> Result<RealizedGrading, CatalogError> {
    let realization = algebra::group_algebra_to_diagonal(group, field)?;
    let grading = group_algebra_grading(group, field)?;
    Ok(RealizedGrading { grading, realization })
}

/// Syllable shape of a group usable as a free-product factor: a list of
/// cyclic orders (None marking infinite factors).
fn cyclic_factors(g: &GroupDescriptor) -> Option<Vec<Option<u64>>> {
    if g.is_trivial() {
        return Some(Vec::new());
    }
    let [atom] = g.atoms() else {
        return None;
    };
    match atom {
        Atom::FiniteAbelian { factors } if factors.len() == 1 => Some(vec![Some(factors[0])]),
        Atom::FiniteAbelian { .. } => None,
        Atom::Free { names } => Some(vec![None; names.len()]),
        Atom::FreeProductCyclic { orders, .. } => Some(orders.clone()),
        Atom::FiniteTable { .. } => None,
    }
}

/// The free product of two groups, with the canonical embeddings, in the
/// syllable representation. Trivial factors disappear; otherwise both sides
/// must decompose into cyclic or infinite-cyclic free factors.
pub fn free_product_of(
    a: &GroupDescriptor,
    b: &GroupDescriptor,
) -> Result<(GroupDescriptor, Homomorphism, Homomorphism), CatalogError> {
    if a.is_trivial() {
        return Ok((b.clone(), Homomorphism::trivial(a, b), Homomorphism::identity(b)));
    }
    if b.is_trivial() {
        return Ok((a.clone(), Homomorphism::identity(a), Homomorphism::trivial(b, a)));
    }
    let fa = cyclic_factors(a).ok_or_else(|| {
        CatalogError::Unsupported(format!("{} is not a free product of cyclic groups", a.describe()))
    })?;
    let fb = cyclic_factors(b).ok_or_else(|| {
        CatalogError::Unsupported(format!("{} is not a free product of cyclic groups", b.describe()))
    })?;
    let mut orders = fa.clone();
    orders.extend(fb.iter().cloned());
    let combined = GroupDescriptor::free_product_cyclic(orders, None)?;
    let images_a: Result<Vec<GroupElement>, GroupError> =
        (0..fa.len()).map(|i| combined.generator(i)).collect();
    let images_b: Result<Vec<GroupElement>, GroupError> =
        (0..fb.len()).map(|i| combined.generator(fa.len() + i)).collect();
    let embed_a = Homomorphism::new(a.clone(), combined.clone(), images_a?)?;
    let embed_b = Homomorphism::new(b.clone(), combined.clone(), images_b?)?;
    Ok((combined, embed_a, embed_b))
}

/// The free-product grading of a product algebra A x B: in degree 1 the
/// product of the trivial components, in a nontrivial degree of a factor
/// group that factor's component paired with zero, and zero elsewhere.
/// Connectedness of both inputs makes the result connected.
pub fn free_product_grading(ga: &Grading, gb: &Grading) -> Result<Grading, CatalogError> {
    for (side, g) in [("left", ga), ("right", gb)] {
        if !g.category().is_single_object() {
            return Err(CatalogError::Unsupported(format!(
                "{side} factor must be a one-object algebra"
            )));
        }
        if grading::is_connected(g)? == Generates::No {
            return Err(CatalogError::Unsupported(format!(
                "{side} factor grading is not connected"
            )));
        }
    }
    let (combined, embed_a, embed_b) = free_product_of(ga.group(), gb.group())?;
    let category = make_product_algebra(ga.category(), gb.category(), "l.", "r.")?;
    let mut degrees = Vec::with_capacity(category.dimension());
    for i in 0..ga.category().dimension() {
        degrees.push(embed_a.evaluate(ga.degree_by_index(i))?);
    }
    for i in 0..gb.category().dimension() {
        degrees.push(embed_b.evaluate(gb.degree_by_index(i))?);
    }
    Ok(Grading::from_degree_vec(category, combined, degrees)?)
}

/// The specific grading of a diagonal algebra attached to a partition of its
/// point set: the free product of the one-dimensional-trivial-component
/// gradings over the blocks, one abelian group of matching order per block.
pub fn specific_diagonal_grading(
    blocks: &[Vec<usize>],
    groups: &[GroupDescriptor],
    field: &FieldDescriptor,
) -> Result<Grading, CatalogError> {
    if blocks.is_empty() || blocks.len() != groups.len() {
        return Err(CatalogError::Unsupported(
            "need one abelian group per partition block".into(),
        ));
    }
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut seen = vec![false; n + 1];
    for block in blocks {
        for &x in block {
            if x == 0 || x > n || seen[x] {
                return Err(CatalogError::Unsupported(format!(
                    "blocks must partition 1..={n}; point {x} is repeated or out of range"
                )));
            }
            seen[x] = true;
        }
    }
    for (block, group) in blocks.iter().zip(groups) {
        if group.order() != Some(block.len() as u128) {
            return Err(CatalogError::Unsupported(format!(
                "block {:?} needs a group of order {}, got {}",
                block,
                block.len(),
                group.describe()
            )));
        }
    }
    let mut acc: Option<Grading> = None;
    for group in groups {
        let next = ergodic_diagonal_grading(group, field)?.grading;
        acc = Some(match acc {
            None => next,
            Some(prev) => free_product_grading(&prev, &next)?,
        });
    }
    Ok(acc.expect("at least one block"))
}

// ---------------------------------------------------------------------------
// Diagrams of maximal connected gradings.

/// Tags of the algebras whose grading diagrams are built in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramTag {
    K2,
    K3,
    K4,
    Matrix(usize),
    Triangular(usize),
    Truncated(usize),
}

impl DiagramTag {
    pub fn parse(s: &str) -> Result<DiagramTag, CatalogError> {
        let unknown = || CatalogError::UnknownTag(s.to_string());
        match s {
            "k2" => return Ok(DiagramTag::K2),
            "k3" => return Ok(DiagramTag::K3),
            "k4" => return Ok(DiagramTag::K4),
            "M2" => return Ok(DiagramTag::Matrix(2)),
            "M3" => return Ok(DiagramTag::Matrix(3)),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("Mp:") {
            let p: u64 = p.parse().map_err(|_| unknown())?;
            if !is_prime(p) {
                return Err(unknown());
            }
            return Ok(DiagramTag::Matrix(p as usize));
        }
        if let Some(n) = s.strip_prefix("Tn:") {
            let n: usize = n.parse().map_err(|_| unknown())?;
            if n < 2 {
                return Err(unknown());
            }
            return Ok(DiagramTag::Triangular(n));
        }
        if let Some(p) = s.strip_prefix("trunc:") {
            let p: u64 = p.parse().map_err(|_| unknown())?;
            if !is_prime(p) {
                return Err(unknown());
            }
            return Ok(DiagramTag::Truncated(p as usize));
        }
        Err(unknown())
    }
}

/// The diagram of maximal connected gradings of the tagged algebra, with all
/// quotient arrows machine-verified.
pub fn grading_diagram_for(
    tag: &str,
    field: &FieldDescriptor,
) -> Result<GradingDiagram, CatalogError> {
    match DiagramTag::parse(tag)? {
        DiagramTag::Matrix(p) => matrix_diagram(p, field),
        DiagramTag::Triangular(n) => triangular_diagram(n, field),
        DiagramTag::Truncated(p) => truncated_diagram(p, field),
        DiagramTag::K2 => {
            let c2 = GroupDescriptor::cyclic(2)?;
            let node = ergodic_diagonal_grading(&c2, field)?.grading;
            Ok(GradingDiagram::new(vec![node], vec![])?)
        }
        DiagramTag::K3 => {
            let c2 = GroupDescriptor::cyclic(2)?;
            let c3 = GroupDescriptor::cyclic(3)?;
            let by_two = specific_diagonal_grading(
                &[vec![1, 2], vec![3]],
                &[c2, GroupDescriptor::trivial()],
                field,
            )?;
            let by_three = specific_diagonal_grading(&[vec![1, 2, 3]], &[c3], field)?;
            Ok(GradingDiagram::new(vec![by_two, by_three], vec![])?)
        }
        DiagramTag::K4 => k4_diagram(field),
    }
}

/// Cospan of the maximal matrix-algebra gradings: the free good grading and
/// the fine grading both map onto the good C_p-grading; the fine arrow is
/// bridged through the presentation isomorphism.
fn matrix_diagram(p: usize, field: &FieldDescriptor) -> Result<GradingDiagram, CatalogError> {
    let free = free_good_matrix_grading(p, field)?;
    let fine = fine_matrix_grading(p, field)?;
    let cp = GroupDescriptor::cyclic(p as u64)?;
    let t = cp.generator(0)?;
    let good = good_grading_from_map(
        GoodKind::Matrix,
        p,
        &cp,
        &vec![t.clone(); p - 1],
        field,
    )?;

    let fold = Homomorphism::new(free.group().clone(), cp.clone(), vec![t.clone(); p - 1])?;
    let project = Homomorphism::new(
        fine.group().clone(),
        cp.clone(),
        vec![t, cp.identity()],
    )?;
    let xy = make_matrix_xy(p, field)?;
    let bridge = xy_to_matrix_units(&xy)?;

    Ok(GradingDiagram::new(
        vec![free, fine, good],
        vec![
            GradingArrow { source: 0, target: 2, map: fold, bridge: None },
            GradingArrow { source: 1, target: 2, map: project, bridge: Some(bridge) },
        ],
    )?)
}

fn triangular_diagram(n: usize, field: &FieldDescriptor) -> Result<GradingDiagram, CatalogError> {
    let group = GroupDescriptor::free(n - 1, None)?;
    let m: Result<Vec<GroupElement>, GroupError> =
        (0..n - 1).map(|i| group.generator(i)).collect();
    let node = good_grading_from_map(GoodKind::Triangular, n, &group, &m?, field)?;
    Ok(GradingDiagram::new(vec![node], vec![])?)
}

fn truncated_diagram(p: usize, field: &FieldDescriptor) -> Result<GradingDiagram, CatalogError> {
    let by_degree = truncated_z_grading(p, field)?;
    let by_unit = truncated_group_grading(p, field)?.grading;
    Ok(GradingDiagram::new(vec![by_degree, by_unit], vec![])?)
}

fn k4_diagram(field: &FieldDescriptor) -> Result<GradingDiagram, CatalogError> {
    let c2 = GroupDescriptor::cyclic(2)?;
    let c3 = GroupDescriptor::cyclic(3)?;
    let c4 = GroupDescriptor::cyclic(4)?;
    let klein = GroupDescriptor::finite_abelian(vec![2, 2])?;

    let pairs = specific_diagonal_grading(
        &[vec![1, 2], vec![3, 4]],
        &[c2.clone(), c2.clone()],
        field,
    )?;
    // Collapsing the second free factor leaves the connected C_2-grading
    // with three-dimensional trivial component.
    let project = Homomorphism::new(
        pairs.group().clone(),
        c2.clone(),
        vec![c2.generator(0)?, c2.identity()],
    )?;
    let folded = quotient_grading(&pairs, &project)?;

    let by_three = specific_diagonal_grading(
        &[vec![1, 2, 3], vec![4]],
        &[c3, GroupDescriptor::trivial()],
        field,
    )?;
    let by_four = ergodic_diagonal_grading(&c4, field)?.grading;
    let by_klein = ergodic_diagonal_grading(&klein, field)?.grading;

    Ok(GradingDiagram::new(
        vec![pairs, folded, by_three, by_four, by_klein],
        vec![GradingArrow { source: 0, target: 1, map: project, bridge: None }],
    )?)
}

// ---------------------------------------------------------------------------
// Classification-table reports.

/// One row of the diagonal-algebra classification table: the grading group,
/// the dimension of the trivial component, and the dimensions of the other
/// nonzero components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecificRow {
    pub group: String,
    pub trivial_dimension: usize,
    pub other_dimensions: Vec<usize>,
}

fn row_of(grading: &Grading, label: String) -> SpecificRow {
    let identity = grading.group().identity();
    let mut others: Vec<usize> = grading::support(grading)
        .into_iter()
        .filter(|d| *d != identity)
        .map(|d| grading.component(&d).len())
        .collect();
    others.sort_unstable();
    SpecificRow {
        group: label,
        trivial_dimension: grading::trivial_component_dimension(grading),
        other_dimensions: others,
    }
}

/// All specific gradings of the four-point diagonal algebra, one row per
/// partition shape, in the classification order: trivial, two pair blocks,
/// one triple, one pair, and the two single-block gradings.
pub fn k4_table_report(field: &FieldDescriptor) -> Result<Vec<SpecificRow>, CatalogError> {
    let one = GroupDescriptor::trivial();
    let c2 = GroupDescriptor::cyclic(2)?;
    let c3 = GroupDescriptor::cyclic(3)?;
    let c4 = GroupDescriptor::cyclic(4)?;
    let klein = GroupDescriptor::finite_abelian(vec![2, 2])?;

    let singles: Vec<Vec<usize>> = (1..=4).map(|i| vec![i]).collect();
    let cases: Vec<(Vec<Vec<usize>>, Vec<GroupDescriptor>)> = vec![
        (singles, vec![one.clone(), one.clone(), one.clone(), one.clone()]),
        (vec![vec![1, 2], vec![3, 4]], vec![c2.clone(), c2.clone()]),
        (vec![vec![1, 2, 3], vec![4]], vec![c3, one.clone()]),
        (vec![vec![1, 2], vec![3], vec![4]], vec![c2, one.clone(), one]),
        (vec![vec![1, 2, 3, 4]], vec![c4]),
        (vec![vec![1, 2, 3, 4]], vec![klein]),
    ];
    let mut rows = Vec::with_capacity(cases.len());
    for (blocks, groups) in cases {
        let grading = specific_diagonal_grading(&blocks, &groups, field)?;
        let label = grading.group().describe();
        rows.push(row_of(&grading, label));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// The common quotient of the fine and good matrix gradings.

/// Certificate that the fine and free good gradings of a matrix algebra share
/// the good C_n-grading as their essentially unique common quotient.
#[derive(Debug, Clone)]
pub struct CommonQuotientCertificate {
    pub n: usize,
    /// The quotient of the fine grading by the second factor is good.
    pub quotient_is_good: bool,
    /// It equals the quotient of the free good grading collapsing every
    /// transition degree to the same generator.
    pub matches_free_quotient: bool,
    /// Distinct subgroups of C_n x C_n inspected.
    pub subgroups_checked: usize,
    /// Subgroups whose quotient leaves every elementary matrix homogeneous.
    pub good_subgroups: usize,
    /// Order of the smallest such subgroup (the second factor itself).
    pub minimal_order: usize,
    /// The diagonally embedded C_n fails goodness.
    pub diagonal_subgroup_good: bool,
}

impl std::fmt::Display for CommonQuotientCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "common quotient certificate (n = {}): fine quotient good: {}; matches the free-grading quotient: {}; {} of {} subgroups give good quotients, minimal order {}",
            self.n,
            self.quotient_is_good,
            self.matches_free_quotient,
            self.good_subgroups,
            self.subgroups_checked,
            self.minimal_order
        )
    }
}

pub fn verify_common_quotient(
    n: usize,
    field: &FieldDescriptor,
) -> Result<CommonQuotientCertificate, CatalogError> {
    let fail = |msg: String| CatalogError::CertificateFailure(msg);
    let fine = fine_matrix_grading(n, field)?;
    let cn = GroupDescriptor::cyclic(n as u64)?;
    let t = cn.generator(0)?;
    let good = good_grading_from_map(GoodKind::Matrix, n, &cn, &vec![t.clone(); n - 1], field)?;
    let xy = make_matrix_xy(n, field)?;
    let bridge = xy_to_matrix_units(&xy)?;

    // (i) Collapsing the second factor of C_n x C_n yields the good grading.
    let project = Homomorphism::new(
        fine.group().clone(),
        cn.clone(),
        vec![t.clone(), cn.identity()],
    )?;
    let quotient_is_good = check_quotient_arrow_via(&fine, &good, &project, &bridge)?;
    if !quotient_is_good {
        return Err(fail("the fine quotient is not the good grading".into()));
    }

    // (ii) The same grading arises from the free good grading by sending
    // every transition degree to the generator.
    let free = free_good_matrix_grading(n, field)?;
    let fold = Homomorphism::new(free.group().clone(), cn.clone(), vec![t; n - 1])?;
    let matches_free_quotient = quotient_grading(&free, &fold)? == good;
    if !matches_free_quotient {
        return Err(fail("free and fine quotients disagree".into()));
    }

    // (iii) Exhaustive minimality: a subgroup quotient leaves the elementary
    // matrices homogeneous exactly when it contains the second factor, and
    // the second factor itself is the smallest one that does.
    let group = fine.group();
    let elements = group.enumerate(None)?;
    let mut subgroups: Vec<Vec<GroupElement>> = Vec::new();
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    for a in &elements {
        for b in &elements {
            // Two generators suffice for every subgroup of C_n x C_n.
            let sub = group.closure(&[a.clone(), b.clone()])?;
            let key: Vec<String> = sub.iter().map(|e| group.render(e)).collect();
            if seen.insert(key) {
                subgroups.push(sub);
            }
        }
    }

    // Expansion of each elementary matrix in the homogeneous basis of the
    // fine grading, through the inverse of the presentation isomorphism.
    let dim = fine.category().dimension();
    let mut matrix: Vec<Vec<Scalar>> = vec![vec![field.zero(); dim]; dim];
    for (c, image) in bridge.images().iter().enumerate() {
        for (r, coeff) in image.coords.iter().enumerate() {
            matrix[r][c] = coeff.clone();
        }
    }
    let inverse = algebra::invert_matrix(&matrix, field)?
        .ok_or_else(|| fail("presentation isomorphism is singular".into()))?;
    let expansions: Vec<Vec<usize>> = (0..dim)
        .map(|r| (0..dim).filter(|&i| !inverse[i][r].is_zero()).collect())
        .collect();

    let second = group.generator(1)?;
    let mut good_subgroups = 0usize;
    let mut minimal_order = usize::MAX;
    let mut diagonal_subgroup_good = false;
    let diagonal = group.closure(&[group.multiply(&group.generator(0)?, &second)?])?;
    for sub in &subgroups {
        let members: HashSet<&GroupElement> = sub.iter().collect();
        let mut is_good = true;
        'units: for terms in &expansions {
            for &a in terms {
                for &b in terms {
                    let ratio = group
                        .multiply(fine.degree_by_index(a), &group.invert(fine.degree_by_index(b))?)?;
                    if !members.contains(&ratio) {
                        is_good = false;
                        break 'units;
                    }
                }
            }
        }
        let contains_second = members.contains(&second);
        if is_good != contains_second {
            return Err(fail(format!(
                "subgroup of order {} is {}good yet does {}contain the second factor",
                sub.len(),
                if is_good { "" } else { "not " },
                if contains_second { "" } else { "not " }
            )));
        }
        if is_good {
            good_subgroups += 1;
            minimal_order = minimal_order.min(sub.len());
        }
        if *sub == diagonal {
            diagonal_subgroup_good = is_good;
        }
    }
    if minimal_order != n {
        return Err(fail(format!(
            "expected the minimal good subgroup to have order {n}, found {minimal_order}"
        )));
    }
    if n > 1 && diagonal_subgroup_good {
        return Err(fail("the diagonal subgroup must not give a good quotient".into()));
    }

    Ok(CommonQuotientCertificate {
        n,
        quotient_is_good,
        matches_free_quotient,
        subgroups_checked: subgroups.len(),
        good_subgroups,
        minimal_order,
        diagonal_subgroup_good,
    })
}

// ---------------------------------------------------------------------------
// Named entries.

/// A named, verified, connected grading from the built-in list.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub summary: String,
    pub grading: Grading,
}

/// Names of the built-in gradings, usable with `build_entry`.
pub fn entry_names() -> Vec<&'static str> {
    vec![
        "k2:C2",
        "k3:C2",
        "k3:C3",
        "k4:1",
        "k4:C2*C2",
        "k4:C2",
        "k4:C3",
        "k4:C4",
        "k4:C2xC2",
        "M2:fine",
        "M2:free",
        "M2:good",
        "M3:fine",
        "M3:free",
        "M3:good",
        "T2:free",
        "T3:free",
        "trunc:2:Z",
        "trunc:2:Cp",
        "trunc:3:Z",
        "trunc:3:Cp",
    ]
}

/// Builds a named grading. Truncated-polynomial entries ignore the requested
/// field and use the prime field their characteristic demands.
pub fn build_entry(name: &str, field: &FieldDescriptor) -> Result<CatalogEntry, CatalogError> {
    let one = GroupDescriptor::trivial();
    let c2 = GroupDescriptor::cyclic(2)?;
    let c3 = GroupDescriptor::cyclic(3)?;
    let c4 = GroupDescriptor::cyclic(4)?;
    let klein = GroupDescriptor::finite_abelian(vec![2, 2])?;
    let (summary, grading) = match name {
        "k2:C2" => (
            "one-dimensional-trivial-component C2-grading of k^2",
            ergodic_diagonal_grading(&c2, field)?.grading,
        ),
        "k3:C2" => (
            "C2-grading of k^3 from the partition {1,2} | {3}",
            specific_diagonal_grading(&[vec![1, 2], vec![3]], &[c2, one], field)?,
        ),
        "k3:C3" => (
            "C3-grading of k^3 with one-dimensional trivial component",
            specific_diagonal_grading(&[vec![1, 2, 3]], &[c3], field)?,
        ),
        "k4:1" => (
            "trivial grading of k^4",
            specific_diagonal_grading(
                &[vec![1], vec![2], vec![3], vec![4]],
                &[one.clone(), one.clone(), one.clone(), one],
                field,
            )?,
        ),
        "k4:C2*C2" => (
            "free-product grading of k^4 from the partition {1,2} | {3,4}",
            specific_diagonal_grading(&[vec![1, 2], vec![3, 4]], &[c2.clone(), c2], field)?,
        ),
        "k4:C2" => (
            "C2-grading of k^4 from the partition {1,2} | {3} | {4}",
            specific_diagonal_grading(
                &[vec![1, 2], vec![3], vec![4]],
                &[c2, one.clone(), one],
                field,
            )?,
        ),
        "k4:C3" => (
            "C3-grading of k^4 from the partition {1,2,3} | {4}",
            specific_diagonal_grading(&[vec![1, 2, 3], vec![4]], &[c3, one], field)?,
        ),
        "k4:C4" => (
            "one-dimensional-component C4-grading of k^4",
            ergodic_diagonal_grading(&c4, field)?.grading,
        ),
        "k4:C2xC2" => (
            "one-dimensional-component C2 x C2 grading of k^4",
            ergodic_diagonal_grading(&klein, field)?.grading,
        ),
        "M2:fine" => ("fine C2 x C2 grading of M_2", fine_matrix_grading(2, field)?),
        "M3:fine" => ("fine C3 x C3 grading of M_3", fine_matrix_grading(3, field)?),
        "M2:free" => ("free good grading of M_2", free_good_matrix_grading(2, field)?),
        "M3:free" => ("free good grading of M_3", free_good_matrix_grading(3, field)?),
        "M2:good" => ("good C2-grading of M_2", good_cyclic_matrix(2, field)?),
        "M3:good" => ("good C3-grading of M_3", good_cyclic_matrix(3, field)?),
        "T2:free" => ("free good grading of T_2", free_good_triangular(2, field)?),
        "T3:free" => ("free good grading of T_3", free_good_triangular(3, field)?),
        "trunc:2:Z" => (
            "degree grading of k[x]/(x^2) in characteristic 2",
            truncated_z_grading(2, &FieldDescriptor::prime(2)?)?,
        ),
        "trunc:2:Cp" => (
            "unit grading of k[x]/(x^2) in characteristic 2",
            truncated_group_grading(2, &FieldDescriptor::prime(2)?)?.grading,
        ),
        "trunc:3:Z" => (
            "degree grading of k[x]/(x^3) in characteristic 3",
            truncated_z_grading(3, &FieldDescriptor::prime(3)?)?,
        ),
        "trunc:3:Cp" => (
            "unit grading of k[x]/(x^3) in characteristic 3",
            truncated_group_grading(3, &FieldDescriptor::prime(3)?)?.grading,
        ),
        _ => return Err(CatalogError::UnknownTag(name.to_string())),
    };
    verify_grading(&grading)?;
    if grading::is_connected(&grading)? == Generates::No {
        return Err(CatalogError::CertificateFailure(format!(
            "catalog entry {name} is not connected"
        )));
    }
    Ok(CatalogEntry {
        name: name.to_string(),
        summary: summary.to_string(),
        grading,
    })
}

fn good_cyclic_matrix(n: usize, field: &FieldDescriptor) -> Result<Grading, CatalogError> {
    let cn = GroupDescriptor::cyclic(n as u64)?;
    let t = cn.generator(0)?;
    good_grading_from_map(GoodKind::Matrix, n, &cn, &vec![t; n - 1], field)
}

fn free_good_triangular(n: usize, field: &FieldDescriptor) -> Result<Grading, CatalogError> {
    let group = GroupDescriptor::free(n - 1, None)?;
    let m: Result<Vec<GroupElement>, GroupError> =
        (0..n - 1).map(|i| group.generator(i)).collect();
    good_grading_from_map(GoodKind::Triangular, n, &group, &m?, field)
}

/// Builds every named grading over the given field.
pub fn catalog_entries(field: &FieldDescriptor) -> Result<Vec<CatalogEntry>, CatalogError> {
    entry_names().into_iter().map(|n| build_entry(n, field)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::{has_invertible_nontrivial_homogeneous, is_connected, support};

    fn rational() -> FieldDescriptor {
        FieldDescriptor::rational()
    }

    fn zeta(m: u64) -> FieldDescriptor {
        FieldDescriptor::cyclotomic(m).unwrap()
    }

    #[test]
    fn fine_gradings_have_singleton_components_and_full_support() {
        let g2 = fine_matrix_grading(2, &rational()).unwrap();
        verify_grading(&g2).unwrap();
        let group = g2.group();
        let tt = group
            .multiply(&group.generator(0).unwrap(), &group.generator(1).unwrap())
            .unwrap();
        let comp = g2.component(&tt);
        assert_eq!(comp.len(), 1);
        assert_eq!(g2.category().basis()[comp[0]].name, "x*y");
        assert_eq!(support(&g2).len(), 4);
        assert_eq!(is_connected(&g2).unwrap(), Generates::Yes);

        let g3 = fine_matrix_grading(3, &zeta(3)).unwrap();
        assert_eq!(grading::trivial_component_dimension(&g3), 1);
        assert_eq!(support(&g3).len(), 9);
    }

    #[test]
    fn good_gradings_follow_the_transition_map() {
        let c2 = GroupDescriptor::cyclic(2).unwrap();
        let t = c2.generator(0).unwrap();
        let g =
            good_grading_from_map(GoodKind::Matrix, 2, &c2, std::slice::from_ref(&t), &rational())
                .unwrap();
        verify_grading(&g).unwrap();
        assert_eq!(g.degree("E_2_1").unwrap(), &t);
        assert_eq!(g.degree("E_1_2").unwrap(), &t);
        assert_eq!(g.degree("E_1_1").unwrap(), &c2.identity());
        assert_eq!(grading::trivial_component_dimension(&g), 2);

        // The free variant used by the truncation machinery agrees.
        let free = free_good_matrix_grading(3, &rational()).unwrap();
        let f2 = GroupDescriptor::free(2, None).unwrap();
        assert_eq!(free.group(), &f2);
        let s1 = f2.generator(0).unwrap();
        let s2 = f2.generator(1).unwrap();
        assert_eq!(free.degree("E_2_1").unwrap(), &s1);
        assert_eq!(
            free.degree("E_3_1").unwrap(),
            &f2.multiply(&s2, &s1).unwrap()
        );
        assert_eq!(is_connected(&free).unwrap(), Generates::Yes);

        let tri = free_good_triangular(2, &rational()).unwrap();
        verify_grading(&tri).unwrap();
        assert_eq!(is_connected(&tri).unwrap(), Generates::Yes);
        assert_eq!(
            tri.degree("E_1_2").unwrap(),
            &tri.group().invert(&tri.group().generator(0).unwrap()).unwrap()
        );
    }

    #[test]
    fn group_algebra_gradings_are_supported_everywhere() {
        let c2 = GroupDescriptor::cyclic(2).unwrap();
        let g = group_algebra_grading(&c2, &rational()).unwrap();
        assert_eq!(support(&g).len(), 2);

        let c3 = GroupDescriptor::cyclic(3).unwrap();
        let g3 = group_algebra_grading(&c3, &rational()).unwrap();
        assert!(grading::component_dimensions(&g3).iter().all(|&d| d == 1));

        let klein = GroupDescriptor::finite_abelian(vec![2, 2]).unwrap();
        let g4 = group_algebra_grading(&klein, &rational()).unwrap();
        assert_eq!(support(&g4).len(), 4);
    }

    #[test]
    fn truncated_degree_grading_requires_matching_characteristic() {
        let f3 = FieldDescriptor::prime(3).unwrap();
        let g = truncated_z_grading(3, &f3).unwrap();
        verify_grading(&g).unwrap();
        let z = g.group();
        let s = z.generator(0).unwrap();
        assert_eq!(g.degree("x^2").unwrap(), &z.power(&s, 2).unwrap());
        assert_eq!(support(&g).len(), 3);
        assert_eq!(is_connected(&g).unwrap(), Generates::Yes);

        assert!(matches!(
            truncated_z_grading(3, &rational()),
            Err(CatalogError::BadCharacteristic { expected: 3, found: 0 })
        ));

        // Reduction mod 3 relabels the degrees in C_3.
        let c3 = GroupDescriptor::cyclic(3).unwrap();
        let map = Homomorphism::new(z.clone(), c3.clone(), vec![c3.generator(0).unwrap()]).unwrap();
        let q = quotient_grading(&g, &map).unwrap();
        assert_eq!(support(&q).len(), 3);
        assert_eq!(q.group(), &c3);
    }

    #[test]
    fn truncated_unit_grading_transports_the_cyclic_grading() {
        let f2 = FieldDescriptor::prime(2).unwrap();
        let r = truncated_group_grading(2, &f2).unwrap();
        verify_grading(&r.grading).unwrap();
        let names: Vec<&str> = r
            .grading
            .category()
            .basis()
            .iter()
            .map(|b| b.name.as_str())
            .collect();
        assert_eq!(names, vec!["1", "1+x"]);
        let c2 = r.grading.group();
        assert_eq!(r.grading.degree("1+x").unwrap(), &c2.generator(0).unwrap());
        // The realization expands 1+x into the power basis.
        let image = r
            .realization
            .apply(&r.grading.category().basis_element(1))
            .unwrap();
        assert_eq!(r.realization.target().render(&image), "1 + x");
        assert!(r.realization.is_bijective().unwrap());
        assert!(has_invertible_nontrivial_homogeneous(&r.grading).unwrap());

        // (1+x)^3 = 1 + 3x + 3x^2 + x^3 collapses to 1 only in char 3.
        let f3 = FieldDescriptor::prime(3).unwrap();
        let r3 = truncated_group_grading(3, &f3).unwrap();
        let cube = r3
            .realization
            .target()
            .power(
                &r3.realization
                    .apply(&r3.grading.category().basis_element(1))
                    .unwrap(),
                3,
            )
            .unwrap();
        assert_eq!(r3.realization.target().render(&cube), "1");
        assert!(matches!(
            truncated_group_grading(3, &rational()),
            Err(CatalogError::BadCharacteristic { .. })
        ));
    }

    #[test]
    fn ergodic_gradings_realize_on_the_diagonal_algebra() {
        let c2 = GroupDescriptor::cyclic(2).unwrap();
        let r = ergodic_diagonal_grading(&c2, &rational()).unwrap();
        assert_eq!(grading::trivial_component_dimension(&r.grading), 1);
        // The degree-t basis vector lands on delta_1 - delta_2.
        let idx = r.grading.category().basis_index("t").unwrap();
        let image = r
            .realization
            .apply(&r.grading.category().basis_element(idx))
            .unwrap();
        assert_eq!(r.realization.target().render(&image), "d1 + (-1)*d2");

        let c4 = GroupDescriptor::cyclic(4).unwrap();
        let r4 = ergodic_diagonal_grading(&c4, &zeta(4)).unwrap();
        assert_eq!(grading::component_dimensions(&r4.grading), vec![1, 1, 1, 1]);
        assert!(r4.realization.is_bijective().unwrap());

        let klein = GroupDescriptor::finite_abelian(vec![2, 2]).unwrap();
        let rk = ergodic_diagonal_grading(&klein, &rational()).unwrap();
        assert_eq!(grading::component_dimensions(&rk.grading), vec![1, 1, 1, 1]);
    }

    #[test]
    fn free_products_union_supports_and_embed_degrees() {
        let c2 = GroupDescriptor::cyclic(2).unwrap();
        let c3 = GroupDescriptor::cyclic(3).unwrap();
        let ga = group_algebra_grading(&c2, &zeta(3)).unwrap();
        let gb = group_algebra_grading(&c3, &zeta(3)).unwrap();
        let g = free_product_grading(&ga, &gb).unwrap();
        verify_grading(&g).unwrap();
        assert_eq!(g.category().dimension(), 5);
        assert_eq!(g.group().describe(), "C2*C3");
        // Support: identity plus one C_2 and two C_3 degrees.
        assert_eq!(support(&g).len(), 4);
        assert_eq!(grading::trivial_component_dimension(&g), 2);
        assert_eq!(is_connected(&g).unwrap(), Generates::Yes);

        // A C_6 quotient exists: send the factors to the elements of order
        // 2 and 3.
        let c6 = GroupDescriptor::cyclic(6).unwrap();
        let u = c6.generator(0).unwrap();
        let map = Homomorphism::new(
            g.group().clone(),
            c6.clone(),
            vec![c6.power(&u, 3).unwrap(), c6.power(&u, 2).unwrap()],
        )
        .unwrap();
        let q = quotient_grading(&g, &map).unwrap();
        assert_eq!(q.group(), &c6);
        assert_eq!(is_connected(&q).unwrap(), Generates::Yes);

        // Trivial factors disappear from the free product.
        let one = GroupDescriptor::trivial();
        let gt = group_algebra_grading(&one, &zeta(3)).unwrap();
        let right_trivial = free_product_grading(&ga, &gt).unwrap();
        assert_eq!(right_trivial.group().describe(), "C2");
    }

    #[test]
    fn specific_gradings_fold_partitions() {
        let c2 = GroupDescriptor::cyclic(2).unwrap();
        let one = GroupDescriptor::trivial();
        let g = specific_diagonal_grading(
            &[vec![1, 2], vec![3]],
            &[c2.clone(), one.clone()],
            &rational(),
        )
        .unwrap();
        assert_eq!(g.category().dimension(), 3);
        assert_eq!(grading::trivial_component_dimension(&g), 2);
        assert_eq!(g.group().describe(), "C2");

        let pairs = specific_diagonal_grading(
            &[vec![1, 2], vec![3, 4]],
            &[c2.clone(), c2.clone()],
            &rational(),
        )
        .unwrap();
        assert_eq!(pairs.group().describe(), "C2*C2");
        assert_eq!(grading::trivial_component_dimension(&pairs), 2);

        // Bad partitions are rejected.
        assert!(specific_diagonal_grading(
            &[vec![1, 2], vec![2]],
            &[c2.clone(), one.clone()],
            &rational()
        )
        .is_err());
        assert!(specific_diagonal_grading(&[vec![1, 2]], &[one], &rational()).is_err());
    }

    #[test]
    fn matrix_diagrams_form_verified_cospans() {
        let d = grading_diagram_for("M2", &rational()).unwrap();
        assert_eq!(d.nodes().len(), 3);
        assert_eq!(d.arrows().len(), 2);
        assert_eq!(d.arrows()[0].target, 2);
        assert_eq!(d.arrows()[1].target, 2);
        assert!(d.arrows()[1].bridge.is_some());

        let d3 = grading_diagram_for("M3", &zeta(3)).unwrap();
        assert_eq!(d3.nodes().len(), 3);
        assert_eq!(d3.nodes()[0].group().describe(), "F2");
        assert_eq!(d3.nodes()[1].group().describe(), "C3 x C3");
        assert_eq!(d3.nodes()[2].group().describe(), "C3");
    }

    #[test]
    fn diagonal_and_triangular_and_truncated_diagrams_have_the_stated_shapes() {
        let k2 = grading_diagram_for("k2", &rational()).unwrap();
        assert_eq!(k2.nodes().len(), 1);
        assert_eq!(k2.arrows().len(), 0);

        let k3 = grading_diagram_for("k3", &zeta(3)).unwrap();
        assert_eq!(k3.nodes().len(), 2);
        assert_eq!(k3.arrows().len(), 0);

        let k4 = grading_diagram_for("k4", &zeta(12)).unwrap();
        assert_eq!(k4.nodes().len(), 5);
        assert_eq!(k4.arrows().len(), 1);
        assert_eq!(k4.nodes()[0].group().describe(), "C2*C2");
        assert_eq!(grading::trivial_component_dimension(&k4.nodes()[1]), 3);

        let t3 = grading_diagram_for("Tn:3", &rational()).unwrap();
        assert_eq!(t3.nodes().len(), 1);
        assert_eq!(t3.nodes()[0].group().describe(), "F2");

        let tr = grading_diagram_for("trunc:3", &FieldDescriptor::prime(3).unwrap()).unwrap();
        assert_eq!(tr.nodes().len(), 2);
        assert_eq!(tr.arrows().len(), 0);

        assert!(matches!(
            grading_diagram_for("k5", &rational()),
            Err(CatalogError::UnknownTag(_))
        ));
        assert!(matches!(
            grading_diagram_for("Mp:4", &rational()),
            Err(CatalogError::UnknownTag(_))
        ));
    }

    #[test]
    fn k4_table_matches_the_classification() {
        let rows = k4_table_report(&zeta(12)).unwrap();
        let expected = vec![
            ("1", 4, vec![]),
            ("C2*C2", 2, vec![1, 1]),
            ("C3", 2, vec![1, 1]),
            ("C2", 3, vec![1]),
            ("C4", 1, vec![1, 1, 1]),
            ("C2 x C2", 1, vec![1, 1, 1]),
        ];
        assert_eq!(rows.len(), expected.len());
        for (row, (group, trivial, others)) in rows.iter().zip(expected) {
            assert_eq!(row.group, group);
            assert_eq!(row.trivial_dimension, trivial, "group {}", row.group);
            assert_eq!(row.other_dimensions, others, "group {}", row.group);
        }
    }

    #[test]
    fn common_quotient_certificates_hold_for_small_sizes() {
        let c = verify_common_quotient(2, &rational()).unwrap();
        assert!(c.quotient_is_good);
        assert!(c.matches_free_quotient);
        // C_2 x C_2 has the trivial subgroup, three of order 2, and itself.
        assert_eq!(c.subgroups_checked, 5);
        assert_eq!(c.good_subgroups, 2);
        assert_eq!(c.minimal_order, 2);
        assert!(!c.diagonal_subgroup_good);
        assert!(c.to_string().contains("minimal order 2"));

        let c3 = verify_common_quotient(3, &zeta(3)).unwrap();
        assert_eq!(c3.subgroups_checked, 6);
        assert_eq!(c3.good_subgroups, 2);
        assert_eq!(c3.minimal_order, 3);
    }

    #[test]
    fn every_entry_builds_verified_and_connected() {
        let entries = catalog_entries(&zeta(12)).unwrap();
        assert_eq!(entries.len(), entry_names().len());
        for e in &entries {
            // build_entry re-verifies; spot-check connectedness here too.
            assert_ne!(is_connected(&e.grading).unwrap(), Generates::No, "{}", e.name);
        }
        assert!(matches!(
            build_entry("M9:fine", &rational()),
            Err(CatalogError::UnknownTag(_))
        ));
    }
}
