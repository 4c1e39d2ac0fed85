//! Smash-product realizations of graded algebras and categories.
//!
//! Given a grading of a linear category by a group, the smash construction
//! spreads each object into one copy per group element and sorts morphisms
//! into hom spaces by degree: hom((b, g), (c, h)) is the degree h^-1 g
//! component of hom(b, c).  The projection back onto the base is a covering,
//! and when the grading is connected it is a Galois covering with the grading
//! group acting by left translation on the object fibres.
//!
//! For infinite groups the realization is truncated to the ball of a chosen
//! radius in the word metric; verification then distinguishes interior
//! objects, whose stars are fully materialized, from boundary objects.

use std::collections::HashMap;

use thiserror::Error;

use crate::algebra::{AlgebraError, LinearCategory};
use crate::grading::{self, verify_grading, Grading, GradingError};
use crate::groups::{Generates, GroupElement, GroupError};
use crate::scalars::Scalar;

#[derive(Debug, Error)]
pub enum SmashError {
    #[error("the grading group is infinite; a truncation radius is required")]
    InfiniteWithoutRadius,
    #[error("star dimensions do not match at {0}")]
    StarMismatch(String),
    #[error("the smash realization is not connected")]
    NotConnected,
    #[error("group action failure: {0}")]
    ActionFailure(String),
    #[error("connectedness criteria disagree: {0}")]
    MismatchBug(String),
    #[error("shape obstruction: {0}")]
    ShapeMismatch(String),
    #[error("rigidity check failed: {0}")]
    CheckFailure(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A materialized smash product, possibly truncated to a word-metric ball.
///
/// Objects are pairs (base object, group element); the morphism basis is in
/// bijection with pairs (base basis morphism, source group element) whose
/// endpoints both fall inside the truncation.
#[derive(Debug, Clone)]
pub struct SmashCategory {
    base: Grading,
    realization: LinearCategory,
    /// For each realization object: (base object index, fibre element).
    objects: Vec<(usize, GroupElement)>,
    /// For each realization basis index: the base basis index it covers.
    basis_to_base: Vec<usize>,
    radius: Option<usize>,
}

impl SmashCategory {
    pub fn base(&self) -> &Grading {
        &self.base
    }

    pub fn realization(&self) -> &LinearCategory {
        &self.realization
    }

    pub fn objects(&self) -> &[(usize, GroupElement)] {
        &self.objects
    }

    pub fn radius(&self) -> Option<usize> {
        self.radius
    }

    /// Base basis morphism covered by realization basis element `i`.
    pub fn covering_basis(&self, i: usize) -> usize {
        self.basis_to_base[i]
    }

    pub fn object_label(&self, i: usize) -> String {
        let (b, ref g) = self.objects[i];
        format!(
            "({}, {})",
            self.base.category().objects()[b],
            self.base.group().render(g)
        )
    }

    fn object_lookup(&self) -> HashMap<(usize, GroupElement), usize> {
        self.objects
            .iter()
            .enumerate()
            .map(|(i, (b, g))| ((*b, g.clone()), i))
            .collect()
    }

    /// Word length of the fibre element of object `i`.
    fn fibre_length(&self, i: usize) -> usize {
        self.base.group().word_length(&self.objects[i].1)
    }

    /// Longest word length among support degrees; stars of objects deeper
    /// than this below the truncation radius are fully materialized.
    fn support_reach(&self) -> usize {
        grading::support(&self.base)
            .iter()
            .map(|d| self.base.group().word_length(d))
            .max()
            .unwrap_or(0)
    }

    /// Indices of objects whose distance to the truncation boundary exceeds
    /// the support reach.  Without a radius every object is interior.
    pub fn interior_objects(&self) -> Vec<usize> {
        match self.radius {
            None => (0..self.objects.len()).collect(),
            Some(r) => {
                let reach = self.support_reach();
                let margin = r as isize - reach as isize - 1;
                (0..self.objects.len())
                    .filter(|&i| (self.fibre_length(i) as isize) <= margin)
                    .collect()
            }
        }
    }
}

/// Builds the smash product of a valid grading.  Finite groups may be
/// materialized in full (`radius: None`); infinite groups require a radius,
/// and only objects whose fibre element has word length at most the radius
/// are kept.
pub fn smash_product(g: &Grading, radius: Option<usize>) -> Result<SmashCategory, SmashError> {
    verify_grading(g)?;
    let group = g.group();
    let base = g.category();
    let elements = match radius {
        None => {
            if group.order().is_none() {
                return Err(SmashError::InfiniteWithoutRadius);
            }
            group.enumerate(None)?
        }
        Some(r) => group.enumerate(Some(r))?,
    };

    let mut objects: Vec<(usize, GroupElement)> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<(usize, GroupElement), usize> = HashMap::new();
    for e in &elements {
        for b in 0..base.object_count() {
            index.insert((b, e.clone()), objects.len());
            names.push(format!("({}, {})", base.objects()[b], group.render(e)));
            objects.push((b, e.clone()));
        }
    }

    // Basis: one copy of each base morphism per fibre element of its source,
    // kept only when the target fibre element also survives the truncation.
    let mut basis: Vec<(String, usize, usize)> = Vec::new();
    let mut basis_to_base: Vec<usize> = Vec::new();
    let mut smash_index: HashMap<(usize, GroupElement), usize> = HashMap::new();
    for (f, morphism) in base.basis().iter().enumerate() {
        let degree = g.degree_by_index(f);
        let inv = group.invert(degree)?;
        for e in &elements {
            let target_fibre = group.multiply(e, &inv)?;
            let (Some(&src), Some(&tgt)) = (
                index.get(&(morphism.source, e.clone())),
                index.get(&(morphism.target, target_fibre)),
            ) else {
                continue;
            };
            smash_index.insert((f, e.clone()), basis.len());
            basis_to_base.push(f);
            basis.push((format!("{}@{}", morphism.name, group.render(e)), src, tgt));
        }
    }

    // Composition inherits base structure constants fibrewise: (f', h).(f, g)
    // with h = g deg(f)^-1 lands on (k, g) for each base term k of f'.f.
    let mut compose: HashMap<(usize, usize), Vec<(usize, Scalar)>> = HashMap::new();
    for up in 0..basis.len() {
        for low in 0..basis.len() {
            if basis[low].2 != basis[up].1 {
                continue;
            }
            let combo = base.compose_basis(basis_to_base[up], basis_to_base[low]);
            if combo.is_empty() {
                continue;
            }
            let source_fibre = &objects[basis[low].1].1;
            let mut terms = Vec::with_capacity(combo.len());
            for (k, c) in combo {
                let Some(&s) = smash_index.get(&(*k, source_fibre.clone())) else {
                    return Err(SmashError::ShapeMismatch(format!(
                        "composite term {} escaped the truncation",
                        base.basis()[*k].name
                    )));
                };
                terms.push((s, c.clone()));
            }
            compose.insert((up, low), terms);
        }
    }

    // Identities copy the base identities into each fibre; their terms have
    // trivial degree, so the needed smash basis elements always exist.
    let mut identities: Vec<Vec<(usize, Scalar)>> = Vec::new();
    for (b, e) in &objects {
        let id = base.identity_element(*b);
        let hom = base.hom_basis(*b, *b);
        let mut terms = Vec::new();
        for (pos, c) in id.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = hom[pos];
            let s = smash_index[&(k, e.clone())];
            terms.push((s, c.clone()));
        }
        identities.push(terms);
    }

    let realization = LinearCategory::new(base.field().clone(), names, basis, compose, identities)?;
    Ok(SmashCategory {
        base: g.clone(),
        realization,
        objects,
        basis_to_base,
        radius,
    })
}

/// Row of the star-dimension table in a covering report.
#[derive(Debug, Clone)]
pub struct StarRow {
    pub object: String,
    pub out_dim: usize,
    pub in_dim: usize,
    pub base_out: usize,
    pub base_in: usize,
}

/// Outcome of checking the covering property object by object.
#[derive(Debug, Clone)]
pub struct CoveringReport {
    pub radius: Option<usize>,
    pub interior: Vec<String>,
    pub boundary: Vec<String>,
    pub stars: Vec<StarRow>,
    pub galois: Option<bool>,
}

impl std::fmt::Display for CoveringReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.radius {
            None => writeln!(f, "covering verified on all {} objects", self.interior.len())?,
            Some(r) => writeln!(
                f,
                "covering verified on {} interior objects at radius {} ({} boundary objects excluded)",
                self.interior.len(),
                r,
                self.boundary.len()
            )?,
        }
        for row in &self.stars {
            writeln!(
                f,
                "  {}: out {} = {}, in {} = {}",
                row.object, row.out_dim, row.base_out, row.in_dim, row.base_in
            )?;
        }
        match self.galois {
            Some(true) => writeln!(f, "Galois: yes"),
            Some(false) => writeln!(f, "Galois: no"),
            None => Ok(()),
        }
    }
}

/// Verifies that projection onto the base restricts to bijections on the
/// stars of interior objects: for (b, g) interior, the out-star dimensions
/// over the fibre of each base object sum to dim hom(b, c), and dually.
pub fn verify_covering(s: &SmashCategory) -> Result<CoveringReport, SmashError> {
    let base = s.base.category();
    let real = s.realization();
    let interior = s.interior_objects();
    let interior_set: Vec<bool> = {
        let mut v = vec![false; s.objects.len()];
        for &i in &interior {
            v[i] = true;
        }
        v
    };

    let base_out: Vec<usize> = (0..base.object_count())
        .map(|b| (0..base.object_count()).map(|c| base.hom_dim(b, c)).sum())
        .collect();
    let base_in: Vec<usize> = (0..base.object_count())
        .map(|b| (0..base.object_count()).map(|c| base.hom_dim(c, b)).sum())
        .collect();

    let mut stars = Vec::new();
    for &i in &interior {
        let (b, _) = s.objects[i];
        let out_dim: usize = (0..real.object_count()).map(|j| real.hom_dim(i, j)).sum();
        let in_dim: usize = (0..real.object_count()).map(|j| real.hom_dim(j, i)).sum();

        // The covering map sends the out-star of (b, g) into the out-star of
        // b; injectivity is structural (the base morphism determines the
        // smash morphism once the source fibre is fixed), so dimension
        // equality gives bijectivity.  Check distinctness anyway.
        let mut seen_out = std::collections::HashSet::new();
        let mut seen_in = std::collections::HashSet::new();
        for (k, morphism) in real.basis().iter().enumerate() {
            if morphism.source == i && !seen_out.insert(s.basis_to_base[k]) {
                return Err(SmashError::StarMismatch(format!(
                    "{} (duplicate covering image in out-star)",
                    s.object_label(i)
                )));
            }
            if morphism.target == i && !seen_in.insert(s.basis_to_base[k]) {
                return Err(SmashError::StarMismatch(format!(
                    "{} (duplicate covering image in in-star)",
                    s.object_label(i)
                )));
            }
        }

        if out_dim != base_out[b] || in_dim != base_in[b] {
            return Err(SmashError::StarMismatch(format!(
                "{} (out {} vs {}, in {} vs {})",
                s.object_label(i),
                out_dim,
                base_out[b],
                in_dim,
                base_in[b]
            )));
        }
        stars.push(StarRow {
            object: s.object_label(i),
            out_dim,
            in_dim,
            base_out: base_out[b],
            base_in: base_in[b],
        });
    }

    Ok(CoveringReport {
        radius: s.radius,
        interior: interior.iter().map(|&i| s.object_label(i)).collect(),
        boundary: (0..s.objects.len())
            .filter(|&i| !interior_set[i])
            .map(|i| s.object_label(i))
            .collect(),
        stars,
        galois: None,
    })
}

/// True when every pair of objects is linked by a chain of nonzero hom
/// spaces, ignoring direction.
pub fn is_connected_category(c: &LinearCategory) -> bool {
    grading::category_walk_connected(c)
}

/// Verifies the Galois property of a fully materialized smash product over a
/// finite group: the realization is connected, left translation by every
/// group element is a structure-preserving automorphism commuting with the
/// covering, the action is free, and it is transitive on each object fibre.
pub fn verify_galois(s: &SmashCategory) -> Result<bool, SmashError> {
    let group = s.base.group();
    let Some(order) = group.order() else {
        return Err(SmashError::ShapeMismatch(
            "the Galois check requires a finite grading group".into(),
        ));
    };
    let expected = (order as usize) * s.base.category().object_count();
    if s.objects.len() != expected {
        return Err(SmashError::ShapeMismatch(format!(
            "full materialization required: {} objects present, {} expected",
            s.objects.len(),
            expected
        )));
    }

    if !is_connected_category(s.realization()) {
        return Err(SmashError::NotConnected);
    }

    let lookup = s.object_lookup();
    let real = s.realization();
    let identity = group.identity();

    for u in group.enumerate(None)? {
        // Left translation on objects: (b, g) -> (b, u g).
        let mut object_image = Vec::with_capacity(s.objects.len());
        for (b, g) in &s.objects {
            let ug = group.multiply(&u, g)?;
            let Some(&j) = lookup.get(&(*b, ug)) else {
                return Err(SmashError::ActionFailure(format!(
                    "translation by {} leaves the object set",
                    group.render(&u)
                )));
            };
            object_image.push(j);
        }
        let mut hit = vec![false; s.objects.len()];
        for &j in &object_image {
            hit[j] = true;
        }
        if hit.iter().any(|h| !h) {
            return Err(SmashError::ActionFailure(format!(
                "translation by {} is not bijective on objects",
                group.render(&u)
            )));
        }
        if u != identity {
            for (i, &j) in object_image.iter().enumerate() {
                if i == j {
                    return Err(SmashError::ActionFailure(format!(
                        "translation by {} fixes {}",
                        group.render(&u),
                        s.object_label(i)
                    )));
                }
            }
        }

        // Induced map on the basis: (f, g) -> (f, u g).  It must cover the
        // same base morphism and transport every structure constant.
        let mut basis_image = Vec::with_capacity(real.basis().len());
        for (k, morphism) in real.basis().iter().enumerate() {
            let f = s.basis_to_base[k];
            let src = object_image[morphism.source];
            let tgt = object_image[morphism.target];
            let candidates = real.hom_basis(src, tgt);
            let image = candidates
                .iter()
                .copied()
                .find(|&m| s.basis_to_base[m] == f)
                .ok_or_else(|| {
                    SmashError::ActionFailure(format!(
                        "translation by {} has no image for {}",
                        group.render(&u),
                        real.basis()[k].name
                    ))
                })?;
            basis_image.push(image);
        }
        for ((g2, g1), combo) in real
            .composition_entries()
            .iter()
            .map(|(g2, g1, k, c)| ((*g2, *g1), (*k, c.clone())))
        {
            let mapped = real.compose_basis(basis_image[g2], basis_image[g1]);
            let (k, ref c) = combo;
            let found = mapped
                .iter()
                .find(|(m, _)| *m == basis_image[k])
                .map(|(_, cc)| cc.clone());
            if found.as_ref() != Some(c) {
                return Err(SmashError::ActionFailure(format!(
                    "translation by {} does not preserve the composition {} . {}",
                    group.render(&u),
                    real.basis()[g2].name,
                    real.basis()[g1].name
                )));
            }
        }
    }

    // Transitivity on fibres: u = h g^-1 moves (b, g) to (b, h).
    for b in 0..s.base.category().object_count() {
        let fibre: Vec<&GroupElement> = s
            .objects
            .iter()
            .filter(|(bb, _)| *bb == b)
            .map(|(_, g)| g)
            .collect();
        for g in &fibre {
            for h in &fibre {
                let u = group.multiply(h, &group.invert(g)?)?;
                let ug = group.multiply(&u, g)?;
                if &ug != *h {
                    return Err(SmashError::ActionFailure(
                        "fibre transitivity witness failed".into(),
                    ));
                }
            }
        }
    }

    Ok(true)
}

/// For finite groups, the smash realization is connected as a category
/// exactly when the grading is connected.  Checks both sides and reports a
/// disagreement as an internal error.
pub fn check_smash_connectedness_equivalence(g: &Grading) -> Result<bool, SmashError> {
    if g.group().order().is_none() {
        return Err(SmashError::ShapeMismatch(
            "the equivalence check requires a finite grading group".into(),
        ));
    }
    let graded_side = match grading::is_connected(g)? {
        Generates::Yes => true,
        Generates::No => false,
        Generates::Unknown => {
            return Err(SmashError::MismatchBug(
                "connectedness undecided for a finite group".into(),
            ))
        }
    };
    let s = smash_product(g, None)?;
    let smash_side = is_connected_category(s.realization());
    if graded_side != smash_side {
        return Err(SmashError::MismatchBug(format!(
            "grading connected: {}, smash connected: {}",
            graded_side, smash_side
        )));
    }
    Ok(graded_side)
}

/// Certificate that a category admits no nontrivial connected grading
/// because all hom spaces are one-dimensional and all compositions of basis
/// morphisms are nonzero: every degree assignment is forced by any one walk.
#[derive(Debug, Clone)]
pub struct SchurianCertificate {
    pub objects: usize,
    pub compositions_checked: usize,
}

impl std::fmt::Display for SchurianCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "simply connected: {} objects, all hom spaces one-dimensional, {} compositions nonzero",
            self.objects, self.compositions_checked
        )
    }
}

/// Checks the one-dimensional-homs criterion for simple connectedness.
pub fn certify_schurian_simply_connected(
    c: &LinearCategory,
) -> Result<SchurianCertificate, SmashError> {
    for b in 0..c.object_count() {
        for d in 0..c.object_count() {
            let dim = c.hom_dim(b, d);
            if dim != 1 {
                return Err(SmashError::ShapeMismatch(format!(
                    "hom({}, {}) has dimension {}, expected 1",
                    c.objects()[b],
                    c.objects()[d],
                    dim
                )));
            }
        }
    }
    let mut checked = 0;
    for g in 0..c.dimension() {
        for f in 0..c.dimension() {
            if c.basis()[f].target != c.basis()[g].source {
                continue;
            }
            if c.compose_basis(g, f).is_empty() {
                return Err(SmashError::ShapeMismatch(format!(
                    "composition {} . {} is zero",
                    c.basis()[g].name,
                    c.basis()[f].name
                )));
            }
            checked += 1;
        }
    }
    Ok(SchurianCertificate {
        objects: c.object_count(),
        compositions_checked: checked,
    })
}

// -- rigidity of smash realizations with idempotent endomorphism bases ------

/// Certificate that every closed walk between interior objects has degree
/// forced to the identity by idempotent-triviality and the composition
/// relations, so any connected grading of the realization collapses on the
/// materialized part.
#[derive(Debug, Clone)]
pub struct RigidityCertificate {
    pub radius: Option<usize>,
    pub interior_objects: usize,
    pub closed_walks_checked: usize,
    pub vacuous: bool,
}

impl std::fmt::Display for RigidityCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.vacuous {
            write!(
                f,
                "rigidity certificate is vacuous: no closed walks among {} interior objects",
                self.interior_objects
            )
        } else {
            match self.radius {
                Some(r) => write!(
                    f,
                    "radius-{} interior rigidity: {} closed walks over {} objects all reduce to the identity",
                    r, self.closed_walks_checked, self.interior_objects
                ),
                None => write!(
                    f,
                    "rigidity: {} closed walks over {} objects all reduce to the identity",
                    self.closed_walks_checked, self.interior_objects
                ),
            }
        }
    }
}

/// Freely reduced word over basis-index letters with integer exponents.
type Word = Vec<(usize, i64)>;

fn word_push(w: &mut Word, letter: usize, exponent: i64) {
    if exponent == 0 {
        return;
    }
    if let Some(last) = w.last_mut() {
        if last.0 == letter {
            last.1 += exponent;
            if last.1 == 0 {
                w.pop();
            }
            return;
        }
    }
    w.push((letter, exponent));
}

fn word_mul(a: &Word, b: &Word) -> Word {
    let mut out = a.clone();
    for &(l, e) in b {
        word_push(&mut out, l, e);
    }
    out
}

fn word_inv(a: &Word) -> Word {
    a.iter().rev().map(|&(l, e)| (l, -e)).collect()
}

fn word_pow(a: &Word, e: i64) -> Word {
    let base = if e < 0 { word_inv(a) } else { a.clone() };
    let mut out = Vec::new();
    for _ in 0..e.unsigned_abs() {
        out = word_mul(&out, &base);
    }
    out
}

fn word_substitute(w: &Word, letter: usize, replacement: &Word) -> Word {
    let mut out = Vec::new();
    for &(l, e) in w {
        if l == letter {
            out = word_mul(&out, &word_pow(replacement, e));
        } else {
            word_push(&mut out, l, e);
        }
    }
    out
}

fn word_contains(w: &Word, letter: usize) -> bool {
    w.iter().any(|&(l, _)| l == letter)
}

/// Verifies degree rigidity of a materialized category on a set of interior
/// objects.  Preconditions checked here: endomorphism hom spaces of interior
/// objects have bases of orthogonal idempotents (up to nonzero scalar), and
/// hom spaces between distinct objects are at most one-dimensional.
///
/// Under any grading, each endomorphism basis vector is then homogeneous of
/// trivial degree, and degrees of the remaining basis morphisms satisfy one
/// equation per nonzero composition.  The equations are solved by
/// elimination in a free group; every closed walk among interior objects up
/// to the length bound must reduce to the empty word.
pub fn certify_smash_rigidity(
    c: &LinearCategory,
    interior: &[usize],
    base_object: usize,
    walk_bound: usize,
) -> Result<RigidityCertificate, SmashError> {
    if !interior.contains(&base_object) {
        return Err(SmashError::ShapeMismatch(
            "the base object must be interior".into(),
        ));
    }
    let interior_flag = {
        let mut v = vec![false; c.object_count()];
        for &i in interior {
            if i >= c.object_count() {
                return Err(SmashError::ShapeMismatch("interior index out of range".into()));
            }
            v[i] = true;
        }
        v
    };

    // Endomorphism spaces must be diagonal: distinct basis vectors compose to
    // zero, and each composes with itself to a nonzero multiple of itself.
    for x in 0..c.object_count() {
        let endo = c.hom_basis(x, x);
        for &u in endo {
            for &v in endo {
                let combo = c.compose_basis(u, v);
                if u == v {
                    let ok = combo.len() == 1 && combo[0].0 == u;
                    if !ok {
                        return Err(SmashError::ShapeMismatch(format!(
                            "{} is not idempotent up to scale",
                            c.basis()[u].name
                        )));
                    }
                } else if !combo.is_empty() {
                    return Err(SmashError::ShapeMismatch(format!(
                        "endomorphism basis is not orthogonal at {}: {} . {} is nonzero",
                        c.objects()[x],
                        c.basis()[u].name,
                        c.basis()[v].name
                    )));
                }
            }
        }
    }
    for x in 0..c.object_count() {
        for y in 0..c.object_count() {
            if x != y && c.hom_dim(x, y) > 1 {
                return Err(SmashError::ShapeMismatch(format!(
                    "hom({}, {}) has dimension {} > 1",
                    c.objects()[x],
                    c.objects()[y],
                    c.hom_dim(x, y)
                )));
            }
        }
    }

    // Degree expressions: endomorphism basis vectors are pinned to the empty
    // word, every other basis morphism starts as its own free letter.
    let mut expr: Vec<Word> = (0..c.dimension())
        .map(|k| {
            let b = &c.basis()[k];
            if b.source == b.target {
                Vec::new()
            } else {
                vec![(k, 1)]
            }
        })
        .collect();

    // One equation per nonzero composition: expr(g) expr(f) = expr(k).
    let mut equations: Vec<(usize, usize, usize)> = Vec::new();
    for g in 0..c.dimension() {
        for f in 0..c.dimension() {
            if c.basis()[f].target != c.basis()[g].source {
                continue;
            }
            let combo = c.compose_basis(g, f);
            if combo.is_empty() {
                continue;
            }
            if combo.len() != 1 {
                return Err(SmashError::ShapeMismatch(format!(
                    "composition {} . {} is not supported on a single basis vector",
                    c.basis()[g].name,
                    c.basis()[f].name
                )));
            }
            equations.push((g, f, combo[0].0));
        }
    }

    // Elimination: while some equation fails, solve it for a still-free
    // letter and substitute everywhere.  Each round removes a letter, so the
    // loop terminates.  An unsatisfiable equation with no free letter left
    // means the relations do not force rigidity by this method.
    loop {
        let mut changed = false;
        for &(g, f, k) in &equations {
            let lhs = word_mul(&expr[g], &expr[f]);
            if lhs == expr[k] {
                continue;
            }
            let solve = |target: usize, solution: Word, expr: &mut Vec<Word>| -> bool {
                if expr[target] != vec![(target, 1)] || word_contains(&solution, target) {
                    return false;
                }
                for w in expr.iter_mut() {
                    *w = word_substitute(w, target, &solution);
                }
                true
            };
            let sg = word_mul(&expr[k], &word_inv(&expr[f]));
            let sf = word_mul(&word_inv(&expr[g]), &expr[k]);
            let sk = lhs.clone();
            if solve(g, sg, &mut expr) || solve(f, sf, &mut expr) || solve(k, sk, &mut expr) {
                changed = true;
                continue;
            }
            return Err(SmashError::CheckFailure(format!(
                "degree relation {} . {} = {} is not resolvable by elimination",
                c.basis()[g].name,
                c.basis()[f].name,
                c.basis()[k].name
            )));
        }
        if !changed {
            break;
        }
    }

    // Walk graph: signed steps along basis morphisms between interior
    // objects.  Endomorphism steps carry trivial degree and are skipped.
    let mut edges: Vec<Vec<(usize, i64, usize)>> = vec![Vec::new(); c.object_count()];
    for (k, b) in c.basis().iter().enumerate() {
        if b.source == b.target || !interior_flag[b.source] || !interior_flag[b.target] {
            continue;
        }
        edges[b.source].push((k, 1, b.target));
        edges[b.target].push((k, -1, b.source));
    }

    // Depth-first enumeration of walks from the base object; every return to
    // the base closes a walk whose accumulated degree word must vanish.
    let mut checked = 0usize;
    let mut stack: Vec<(String, i64)> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        at: usize,
        depth: usize,
        bound: usize,
        base: usize,
        acc: &Word,
        edges: &[Vec<(usize, i64, usize)>],
        expr: &[Word],
        c: &LinearCategory,
        stack: &mut Vec<(String, i64)>,
        checked: &mut usize,
    ) -> Result<(), SmashError> {
        if at == base && depth > 0 {
            *checked += 1;
            if !acc.is_empty() {
                let witness: Vec<String> = stack
                    .iter()
                    .map(|(n, s)| format!("{}{}", n, if *s > 0 { "" } else { "^-1" }))
                    .collect();
                return Err(SmashError::CheckFailure(format!(
                    "closed walk [{}] has unforced degree",
                    witness.join(", ")
                )));
            }
        }
        if depth == bound {
            return Ok(());
        }
        for &(k, sign, next) in &edges[at] {
            let step = word_pow(&expr[k], sign);
            let acc2 = word_mul(&step, acc);
            stack.push((c.basis()[k].name.clone(), sign));
            dfs(next, depth + 1, bound, base, &acc2, edges, expr, c, stack, checked)?;
            stack.pop();
        }
        Ok(())
    }
    dfs(
        base_object,
        0,
        walk_bound,
        base_object,
        &Vec::new(),
        &edges,
        &expr,
        c,
        &mut stack,
        &mut checked,
    )?;

    Ok(RigidityCertificate {
        radius: None,
        interior_objects: interior.len(),
        closed_walks_checked: checked,
        vacuous: checked == 0,
    })
}

/// Rigidity of the truncated smash realization of the free good grading of a
/// matrix algebra: degrees over the free group on n-1 generators assigned by
/// generator prefixes.  Interior objects are those at word length at most
/// radius - 1; closed walks are enumerated up to length 2 * radius.
pub fn certify_free_smash_rigidity(
    n: usize,
    radius: usize,
    field: &crate::scalars::FieldDescriptor,
) -> Result<RigidityCertificate, SmashError> {
    if n < 2 {
        return Err(SmashError::ShapeMismatch(
            "matrix rigidity needs n >= 2".into(),
        ));
    }
    if radius < 1 {
        return Err(SmashError::ShapeMismatch("radius must be positive".into()));
    }
    let grading = free_good_matrix_grading(n, field)?;
    let s = smash_product(&grading, Some(radius))?;

    let group = s.base.group();
    let interior: Vec<usize> = (0..s.objects.len())
        .filter(|&i| group.word_length(&s.objects[i].1) < radius)
        .collect();
    let base_object = s
        .objects
        .iter()
        .position(|(_, g)| *g == group.identity())
        .expect("the identity fibre is always materialized");

    let mut certificate =
        certify_smash_rigidity(s.realization(), &interior, base_object, 2 * radius)?;
    certificate.radius = Some(radius);
    Ok(certificate)
}

/// The finest good grading of the matrix algebra: degrees live in the free
/// group on n-1 generators, with deg E_j_i given by generator prefixes
/// delta(j) delta(i)^-1 where delta(i) = s_{i-1} ... s_1.
pub fn free_good_matrix_grading(
    n: usize,
    field: &crate::scalars::FieldDescriptor,
) -> Result<Grading, SmashError> {
    use crate::groups::GroupDescriptor;
    let category = crate::algebra::make_matrix_algebra(n, field)?;
    let group = GroupDescriptor::free(n - 1, None)?;
    let mut delta = vec![group.identity()];
    for i in 0..n - 1 {
        let prev = delta[i].clone();
        delta.push(group.multiply(&group.generator(i)?, &prev)?);
    }
    let mut degrees = HashMap::new();
    for j in 1..=n {
        for i in 1..=n {
            let d = group.multiply(&delta[j - 1], &group.invert(&delta[i - 1])?)?;
            degrees.insert(format!("E_{}_{}", j, i), d);
        }
    }
    Ok(Grading::new(category, group, &degrees)?)
}
