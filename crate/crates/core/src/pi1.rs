//! Fundamental groups of the built-in algebras: the limit of the diagram of
//! maximal connected gradings, certified exactly for all-finite diagrams and
//! by bounded enumeration otherwise, plus the two-grading reports showing
//! that no universal covering exists.

use std::fmt;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::catalog::{self, CatalogError, DiagramTag};
use crate::grading::{self, GradingError};
use crate::groups::{
    certify_limit_iso, diagram_limit, isomorphic, Generates, GroupDescriptor, GroupError,
    Homomorphism, LimitCertificate,
};
use crate::scalars::{FieldDescriptor, ScalarError};
use crate::smash::{
    certify_schurian_simply_connected, certify_smash_rigidity, smash_product,
    RigidityCertificate, SchurianCertificate, SmashError,
};

#[derive(Debug, Error)]
pub enum Pi1Error {
    #[error("certificate failure: {0}")]
    CertificateFailure(String),
    #[error("unsupported tag for this computation: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Smash(#[from] SmashError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// How a fundamental-group answer is certified: exactly (all diagram nodes
/// finite, limit computed by exhaustion) or by bounded enumeration up to a
/// word-length radius.
#[derive(Debug, Clone)]
pub enum Certification {
    Exact,
    Bounded(LimitCertificate),
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certification::Exact => write!(f, "exact"),
            Certification::Bounded(c) => write!(f, "bounded, {c}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Pi1Result {
    pub tag: String,
    /// Describe strings of the diagram node groups, in node order.
    pub node_groups: Vec<String>,
    pub diagram_arrows: usize,
    /// Diagram nodes discarded as trivial before the limit computation.
    pub pruned_nodes: Vec<usize>,
    /// Per-component account of how the limit was computed.
    pub methods: Vec<String>,
    pub group: GroupDescriptor,
    /// One projection per diagram node, commuting with the diagram arrows.
    pub projections: Vec<Homomorphism>,
    /// The classification answer the computed limit was matched against.
    pub reference: GroupDescriptor,
    pub certification: Certification,
}

impl fmt::Display for Pi1Result {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pi1({}) = {} ({}; diagram: {} nodes [{}], {} arrows)",
            self.tag,
            self.group.describe(),
            self.certification,
            self.node_groups.len(),
            self.node_groups.join(", "),
            self.diagram_arrows
        )
    }
}

/// Computes the fundamental group of the tagged algebra as the limit of its
/// grading diagram and matches it against the classification answer. The
/// radius only matters when the limit is infinite.
pub fn fundamental_group(
    tag: &str,
    field: &FieldDescriptor,
    radius: usize,
) -> Result<Pi1Result, Pi1Error> {
    let diagram = catalog::grading_diagram_for(tag, field)?;
    let gd = diagram.group_diagram()?;
    let limit = diagram_limit(&gd)?;

    let reference = pi1_reference(tag)?;
    if isomorphic(&limit.group, &reference) != Generates::Yes {
        return Err(Pi1Error::CertificateFailure(format!(
            "computed limit {} does not match the expected group {}",
            limit.group.describe(),
            reference.describe()
        )));
    }

    let certification = if limit.group.order().is_some() {
        Certification::Exact
    } else {
        Certification::Bounded(certify_limit_iso(&gd, &limit.group, &limit.projections, radius)?)
    };

    Ok(Pi1Result {
        tag: tag.to_string(),
        node_groups: gd.nodes().iter().map(|g| g.describe()).collect(),
        diagram_arrows: gd.arrows().len(),
        pruned_nodes: limit.pruned_nodes,
        methods: limit.methods,
        group: limit.group,
        projections: limit.projections,
        reference,
        certification,
    })
}

/// The classification answer for each supported tag.
pub fn pi1_reference(tag: &str) -> Result<GroupDescriptor, Pi1Error> {
    let g = match DiagramTag::parse(tag)? {
        DiagramTag::K2 => GroupDescriptor::cyclic(2)?,
        DiagramTag::K3 => GroupDescriptor::direct_product(vec![
            GroupDescriptor::cyclic(2)?,
            GroupDescriptor::cyclic(3)?,
        ]),
        DiagramTag::K4 => GroupDescriptor::direct_product(vec![
            GroupDescriptor::free_product_cyclic(vec![Some(2), Some(2)], None)?,
            GroupDescriptor::cyclic(6)?,
            GroupDescriptor::cyclic(4)?,
            GroupDescriptor::cyclic(2)?,
        ]),
        DiagramTag::Matrix(n) => GroupDescriptor::direct_product(vec![
            GroupDescriptor::free(n - 1, None)?,
            GroupDescriptor::cyclic(n as u64)?,
        ]),
        DiagramTag::Triangular(n) => GroupDescriptor::free(n - 1, None)?,
        DiagramTag::Truncated(p) => GroupDescriptor::direct_product(vec![
            GroupDescriptor::free(1, None)?,
            GroupDescriptor::cyclic(p as u64)?,
        ]),
    };
    Ok(g)
}

// ---------------------------------------------------------------------------
// No-universal-covering reports.

/// Simple-connectedness evidence for one grading's covering category.
#[derive(Debug, Clone)]
pub enum SimplyConnectedEvidence {
    /// Every hom space is one-dimensional and all basis compositions are
    /// nonzero, so the covering admits no further connected grading.
    OneDimensionalHoms(SchurianCertificate),
    /// Idempotent-and-relation rigidity verified on a truncation window.
    BoundedRigidity(RigidityCertificate),
}

impl fmt::Display for SimplyConnectedEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplyConnectedEvidence::OneDimensionalHoms(c) => write!(f, "{c}"),
            SimplyConnectedEvidence::BoundedRigidity(c) => write!(f, "{c}"),
        }
    }
}

/// Two simply connected coverings of one algebra that are genuinely
/// different: together they rule out a universal covering, exactly when both
/// certificates are exact and up to the stated radius otherwise.
#[derive(Debug, Clone)]
pub struct NoUniversalReport {
    pub tag: String,
    pub left_name: String,
    pub left_evidence: SimplyConnectedEvidence,
    pub right_name: String,
    pub right_evidence: SimplyConnectedEvidence,
    /// The invariant separating the two gradings.
    pub discriminator: String,
    /// True when any evidence is radius-bounded rather than exact.
    pub bounded: bool,
}

impl fmt::Display for NoUniversalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "no universal covering for {} ({} conclusion):",
            self.tag,
            if self.bounded { "radius-bounded" } else { "exact" }
        )?;
        writeln!(f, "  {}: {}", self.left_name, self.left_evidence)?;
        writeln!(f, "  {}: {}", self.right_name, self.right_evidence)?;
        write!(f, "  distinguished by {}", self.discriminator)
    }
}

/// Walk enumeration is exponential in the walk bound, so rigidity evidence is
/// always gathered on this fixed small window.
const RIGIDITY_RADIUS: usize = 3;

/// Exhibits two simply connected coverings with different grading invariants
/// for the algebras that admit no universal covering: matrix algebras,
/// truncated polynomial algebras, and the four-point diagonal algebra.
pub fn check_no_universal(
    tag: &str,
    field: &FieldDescriptor,
) -> Result<NoUniversalReport, Pi1Error> {
    match DiagramTag::parse(tag)? {
        DiagramTag::Matrix(n) => no_universal_matrix(tag, n, field),
        DiagramTag::Truncated(p) => no_universal_truncated(tag, p),
        DiagramTag::K4 => no_universal_k4(tag, field),
        _ => Err(Pi1Error::Unsupported(format!(
            "{tag}: a universal covering may exist; nothing to refute"
        ))),
    }
}

fn require_distinct(
    left: &grading::Grading,
    right: &grading::Grading,
) -> Result<grading::DistinctionReport, Pi1Error> {
    let report = grading::distinguish(left, right)?;
    if report.distinguishing.is_none() {
        return Err(Pi1Error::CertificateFailure(
            "the two gradings were not separated by any invariant".into(),
        ));
    }
    Ok(report)
}

fn no_universal_matrix(
    tag: &str,
    n: usize,
    field: &FieldDescriptor,
) -> Result<NoUniversalReport, Pi1Error> {
    let fine = catalog::fine_matrix_grading(n, field)?;
    let smash = smash_product(&fine, None)?;
    let left = certify_schurian_simply_connected(smash.realization())?;

    let rigidity = crate::smash::certify_free_smash_rigidity(n, RIGIDITY_RADIUS, field)?;
    let free = catalog::free_good_matrix_grading(n, field)?;
    require_distinct(&fine, &free)?;
    let discriminator = format!(
        "trivial component dimension: {} vs {}",
        grading::trivial_component_dimension(&fine),
        grading::trivial_component_dimension(&free)
    );

    Ok(NoUniversalReport {
        tag: tag.to_string(),
        left_name: format!("fine grading of M_{n}"),
        left_evidence: SimplyConnectedEvidence::OneDimensionalHoms(left),
        right_name: format!("free good grading of M_{n}"),
        right_evidence: SimplyConnectedEvidence::BoundedRigidity(rigidity),
        discriminator,
        bounded: true,
    })
}

fn no_universal_truncated(tag: &str, p: usize) -> Result<NoUniversalReport, Pi1Error> {
    let fp = FieldDescriptor::prime(p as u64)?;
    let unit_grading = catalog::truncated_group_grading(p, &fp)?.grading;
    let smash = smash_product(&unit_grading, None)?;
    let left = certify_schurian_simply_connected(smash.realization())?;

    let degree_grading = catalog::truncated_z_grading(p, &fp)?;
    let truncated = smash_product(&degree_grading, Some(RIGIDITY_RADIUS))?;
    let group = degree_grading.group();
    let interior: Vec<usize> = truncated
        .objects()
        .iter()
        .enumerate()
        .filter(|(_, (_, g))| group.word_length(g) < RIGIDITY_RADIUS)
        .map(|(i, _)| i)
        .collect();
    let base = truncated
        .objects()
        .iter()
        .position(|(_, g)| *g == group.identity())
        .expect("the identity fibre is always materialized");
    let mut rigidity = certify_smash_rigidity(
        truncated.realization(),
        &interior,
        base,
        2 * RIGIDITY_RADIUS,
    )?;
    rigidity.radius = Some(RIGIDITY_RADIUS);

    require_distinct(&unit_grading, &degree_grading)?;
    let discriminator = format!(
        "invertible homogeneous element of nontrivial degree: present in the C{p} grading, \
         absent in the degree grading"
    );

    Ok(NoUniversalReport {
        tag: tag.to_string(),
        left_name: format!("C{p} unit grading of k[x]/(x^{p})"),
        left_evidence: SimplyConnectedEvidence::OneDimensionalHoms(left),
        right_name: format!("integer degree grading of k[x]/(x^{p})"),
        right_evidence: SimplyConnectedEvidence::BoundedRigidity(rigidity),
        discriminator,
        bounded: true,
    })
}

fn no_universal_k4(tag: &str, field: &FieldDescriptor) -> Result<NoUniversalReport, Pi1Error> {
    let c4 = GroupDescriptor::cyclic(4)?;
    let klein = GroupDescriptor::finite_abelian(vec![2, 2])?;
    // Realizability on the diagonal algebra needs the roots of unity; demand
    // them up front so the report genuinely concerns k^4.
    let by_c4 = catalog::ergodic_diagonal_grading(&c4, field)?.grading;
    let by_klein = catalog::ergodic_diagonal_grading(&klein, field)?.grading;

    let left = certify_schurian_simply_connected(smash_product(&by_c4, None)?.realization())?;
    let right =
        certify_schurian_simply_connected(smash_product(&by_klein, None)?.realization())?;

    let report = require_distinct(&by_c4, &by_klein)?;
    let (name, _, _) = report.distinguishing.as_ref().expect("checked nonempty");
    let discriminator = format!(
        "{name}: the groups C4 and C2 x C2 share the component profile but are not isomorphic"
    );

    Ok(NoUniversalReport {
        tag: tag.to_string(),
        left_name: "C4 grading of k^4 with one-dimensional components".to_string(),
        left_evidence: SimplyConnectedEvidence::OneDimensionalHoms(left),
        right_name: "C2 x C2 grading of k^4 with one-dimensional components".to_string(),
        right_evidence: SimplyConnectedEvidence::OneDimensionalHoms(right),
        discriminator,
        bounded: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupDiagram;

    fn rational() -> FieldDescriptor {
        FieldDescriptor::rational()
    }

    fn zeta(m: u64) -> FieldDescriptor {
        FieldDescriptor::cyclotomic(m).unwrap()
    }

    #[test]
    fn two_point_diagonal_algebra_is_exact() {
        let r = fundamental_group("k2", &rational(), 6).unwrap();
        assert!(matches!(r.certification, Certification::Exact));
        assert_eq!(r.group.describe(), "C2");
        assert_eq!(r.node_groups, vec!["C2"]);
        assert_eq!(r.diagram_arrows, 0);
        assert!(r.to_string().contains("pi1(k2) = C2"));
    }

    #[test]
    fn three_point_diagonal_algebra_is_exact() {
        let r = fundamental_group("k3", &zeta(3), 6).unwrap();
        assert!(matches!(r.certification, Certification::Exact));
        assert_eq!(r.group.describe(), "C2 x C3");
        // Both projections hit their nodes.
        for p in &r.projections {
            assert_eq!(p.is_surjective().unwrap(), Generates::Yes);
        }
    }

    #[test]
    fn four_point_diagonal_algebra_is_bounded_certified() {
        let r = fundamental_group("k4", &zeta(12), 4).unwrap();
        let Certification::Bounded(c) = &r.certification else {
            panic!("expected a bounded certificate");
        };
        // Ball of C2*C2 at radius 4 crossed with the full finite factors.
        assert_eq!(c.candidate_elements, 9 * 3 * 4 * 4);
        assert_eq!(c.candidate_elements, c.compatible_tuples);
        assert_eq!(r.pruned_nodes, Vec::<usize>::new());
        assert_eq!(
            isomorphic(&r.group, &pi1_reference("k4").unwrap()),
            Generates::Yes
        );
        for p in &r.projections {
            assert_ne!(p.is_surjective().unwrap(), Generates::No);
        }
    }

    #[test]
    fn matrix_algebra_limits_split_through_the_cospan() {
        let r = fundamental_group("M2", &rational(), 4).unwrap();
        assert!(r.methods.iter().any(|m| m.contains("cospan")));
        let Certification::Bounded(c) = &r.certification else {
            panic!("expected a bounded certificate");
        };
        // Z ball of radius 4 paired with the order-2 kernel.
        assert_eq!(c.candidate_elements, 9 * 2);
        assert_eq!(
            isomorphic(&r.group, &pi1_reference("M2").unwrap()),
            Generates::Yes
        );
    }

    #[test]
    fn triangular_algebras_are_free() {
        let r = fundamental_group("Tn:2", &rational(), 5).unwrap();
        assert!(r.methods.iter().any(|m| m.contains("lone node")));
        let Certification::Bounded(c) = &r.certification else {
            panic!("expected a bounded certificate");
        };
        assert_eq!(c.candidate_elements, 11);
        assert_eq!(
            isomorphic(&r.group, &GroupDescriptor::free(1, None).unwrap()),
            Generates::Yes
        );
    }

    #[test]
    fn truncated_polynomial_components_stay_disjoint() {
        let r = fundamental_group("trunc:2", &FieldDescriptor::prime(2).unwrap(), 4).unwrap();
        assert_eq!(r.node_groups.len(), 2);
        assert_eq!(r.methods.len(), 2);
        let Certification::Bounded(c) = &r.certification else {
            panic!("expected a bounded certificate");
        };
        assert_eq!(c.candidate_elements, 9 * 2);
        assert_eq!(
            isomorphic(&r.group, &pi1_reference("trunc:2").unwrap()),
            Generates::Yes
        );
    }

    #[test]
    fn references_cover_every_tag_family() {
        assert_eq!(pi1_reference("k2").unwrap().describe(), "C2");
        assert_eq!(
            isomorphic(
                &pi1_reference("Mp:5").unwrap(),
                &GroupDescriptor::direct_product(vec![
                    GroupDescriptor::free(4, None).unwrap(),
                    GroupDescriptor::cyclic(5).unwrap(),
                ])
            ),
            Generates::Yes
        );
        assert_eq!(pi1_reference("Tn:4").unwrap().describe(), "F3");
        assert!(pi1_reference("k9").is_err());
    }

    #[test]
    fn appending_a_trivial_node_changes_nothing() {
        // All-finite case: the limit order equals the brute-force product.
        let d = catalog::grading_diagram_for("k3", &zeta(3)).unwrap();
        let gd = d.group_diagram().unwrap();
        let plain = diagram_limit(&gd).unwrap();
        assert_eq!(plain.group.order(), Some(6));

        let mut nodes = gd.nodes().to_vec();
        nodes.push(GroupDescriptor::trivial());
        let padded = GroupDiagram::new(nodes, gd.arrows().to_vec()).unwrap();
        let padded_limit = diagram_limit(&padded).unwrap();
        assert_eq!(padded_limit.pruned_nodes, vec![2]);
        assert_eq!(isomorphic(&plain.group, &padded_limit.group), Generates::Yes);

        // Mixed finite/infinite case.
        let d4 = catalog::grading_diagram_for("k4", &zeta(12)).unwrap();
        let gd4 = d4.group_diagram().unwrap();
        let plain4 = diagram_limit(&gd4).unwrap();
        let mut nodes4 = gd4.nodes().to_vec();
        nodes4.push(GroupDescriptor::trivial());
        let padded4 = GroupDiagram::new(nodes4, gd4.arrows().to_vec()).unwrap();
        let padded4_limit = diagram_limit(&padded4).unwrap();
        assert_eq!(isomorphic(&plain4.group, &padded4_limit.group), Generates::Yes);
    }

    #[test]
    fn matrix_report_separates_fine_from_free() {
        let r = check_no_universal("M2", &rational()).unwrap();
        assert!(r.bounded);
        let SimplyConnectedEvidence::OneDimensionalHoms(c) = &r.left_evidence else {
            panic!("fine side should use the one-dimensional-homs certificate");
        };
        assert_eq!(c.objects, 4);
        let SimplyConnectedEvidence::BoundedRigidity(c) = &r.right_evidence else {
            panic!("free side should use the rigidity certificate");
        };
        assert!(!c.vacuous);
        assert_eq!(r.discriminator, "trivial component dimension: 1 vs 2");
    }

    #[test]
    fn truncated_report_uses_the_invertibility_discriminator() {
        let r = check_no_universal("trunc:3", &rational()).unwrap();
        assert!(r.discriminator.contains("invertible"));
        let SimplyConnectedEvidence::OneDimensionalHoms(c) = &r.left_evidence else {
            panic!("unit side should use the one-dimensional-homs certificate");
        };
        assert_eq!(c.objects, 3);
        let SimplyConnectedEvidence::BoundedRigidity(c) = &r.right_evidence else {
            panic!("degree side should use the rigidity certificate");
        };
        assert!(!c.vacuous);
        assert_eq!(c.radius, Some(RIGIDITY_RADIUS));
    }

    #[test]
    fn four_point_report_separates_the_two_group_structures() {
        let r = check_no_universal("k4", &zeta(12)).unwrap();
        assert!(!r.bounded);
        assert!(r.discriminator.contains("group isomorphism class"));
        for side in [&r.left_evidence, &r.right_evidence] {
            let SimplyConnectedEvidence::OneDimensionalHoms(c) = side else {
                panic!("both sides are finite certificates");
            };
            assert_eq!(c.objects, 4);
        }
        assert!(r.to_string().contains("no universal covering for k4"));
    }

    #[test]
    fn square_free_diagonal_tags_are_rejected() {
        assert!(matches!(
            check_no_universal("k3", &rational()),
            Err(Pi1Error::Unsupported(_))
        ));
        assert!(matches!(
            check_no_universal("Tn:3", &rational()),
            Err(Pi1Error::Unsupported(_))
        ));
    }
}
