//! Finite-dimensional linear categories over an exact field, given by named
//! hom-space bases and composition structure constants. A one-object category
//! is an algebra. Construction always verifies associativity on all basis
//! triples and the identity laws, since structure-constant typos are the
//! dominant bug class in this kind of code.

use crate::scalars::{primitive_root, FieldDescriptor, Scalar, ScalarError};
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum AlgebraError {
    #[error("invalid category structure: {0}")]
    InvalidStructure(String),
    #[error("composition is not associative at ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("object {0} has no valid identity: {1}")]
    BadIdentity(String, String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("the zero element has no valuation")]
    ZeroElement,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("map is not an algebra morphism: {0}")]
    NotMultiplicative(String),
    #[error("bad characteristic: {0}")]
    BadCharacteristic(String),
    #[error("mismatched categories, objects or dimensions: {0}")]
    Mismatch(String),
}

/// One named basis morphism of a hom-space.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMorphism {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// An element of a single hom-space: dense coordinates over the basis of
/// hom(source -> target), in the category's basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub source: usize,
    pub target: usize,
    pub coords: Vec<Scalar>,
}

/// A finite k-linear category via structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCategory {
    field: FieldDescriptor,
    objects: Vec<String>,
    basis: Vec<BasisMorphism>,
    /// hom[target][source]: global indices of the basis of hom(source -> target).
    hom: Vec<Vec<Vec<usize>>>,
    /// Position of each global basis morphism inside its hom-space.
    pos_in_hom: Vec<usize>,
    /// compose[(g, f)] = g after f, as a sparse combination; absent means zero.
    compose: HashMap<(usize, usize), Vec<(usize, Scalar)>>,
    identities: Vec<AlgebraElement>,
}

impl LinearCategory {
    /// Builds and fully verifies a category: unique names, well-typed
    /// composition table (missing entries are zero), associativity on all
    /// composable basis triples, and two-sided identity laws.
    pub fn new(
        field: FieldDescriptor,
        objects: Vec<String>,
        basis: Vec<(String, usize, usize)>,
        compose: HashMap<(usize, usize), Vec<(usize, Scalar)>>,
        identities: Vec<Vec<(usize, Scalar)>>,
    ) -> Result<Self, AlgebraError> {
        let bad = |msg: String| Err(AlgebraError::InvalidStructure(msg));
        if objects.is_empty() {
            return bad("a category needs at least one object".into());
        }
        {
            let mut seen = std::collections::HashSet::new();
            if !objects.iter().all(|o| seen.insert(o)) {
                return bad("duplicate object names".into());
            }
        }
        {
            let mut seen = std::collections::HashSet::new();
            if !basis.iter().all(|(n, _, _)| seen.insert(n)) {
                return bad("duplicate basis morphism names".into());
            }
        }
        let n_obj = objects.len();
        let basis: Vec<BasisMorphism> = basis
            .into_iter()
            .map(|(name, source, target)| BasisMorphism { name, source, target })
            .collect();
        let mut hom = vec![vec![Vec::new(); n_obj]; n_obj];
        let mut pos_in_hom = vec![0usize; basis.len()];
        for (i, b) in basis.iter().enumerate() {
            if b.source >= n_obj || b.target >= n_obj {
                return bad(format!("basis morphism {} references a missing object", b.name));
            }
            pos_in_hom[i] = hom[b.target][b.source].len();
            hom[b.target][b.source].push(i);
        }

        // Canonicalize the composition table: keys composable, entries typed
        // into the right hom-space, coefficients in the field, zeros dropped.
        let mut canon: HashMap<(usize, usize), Vec<(usize, Scalar)>> = HashMap::new();
        for ((g, f), combo) in compose {
            if g >= basis.len() || f >= basis.len() {
                return bad(format!("composition entry ({g}, {f}) out of range"));
            }
            if basis[f].target != basis[g].source {
                return bad(format!(
                    "composition entry ({}, {}) is not composable",
                    basis[g].name, basis[f].name
                ));
            }
            let mut seen = std::collections::HashSet::new();
            let mut cleaned = Vec::new();
            for (k, c) in combo {
                if k >= basis.len()
                    || basis[k].source != basis[f].source
                    || basis[k].target != basis[g].target
                {
                    return bad(format!(
                        "composite of ({}, {}) lands outside its hom-space",
                        basis[g].name, basis[f].name
                    ));
                }
                if c.field() != &field {
                    return bad(format!(
                        "coefficient field mismatch in composite of ({}, {})",
                        basis[g].name, basis[f].name
                    ));
                }
                if !seen.insert(k) {
                    return bad(format!(
                        "duplicate basis index in composite of ({}, {})",
                        basis[g].name, basis[f].name
                    ));
                }
                if !c.is_zero() {
                    cleaned.push((k, c));
                }
            }
            if !cleaned.is_empty() {
                cleaned.sort_by_key(|(k, _)| *k);
                canon.insert((g, f), cleaned);
            }
        }

        let mut cat = LinearCategory {
            field,
            objects,
            basis,
            hom,
            pos_in_hom,
            compose: canon,
            identities: Vec::new(),
        };

        // Identity elements, validated below together with associativity.
        if identities.len() != cat.objects.len() {
            return bad("one identity element required per object".into());
        }
        let mut ids = Vec::with_capacity(identities.len());
        for (x, combo) in identities.into_iter().enumerate() {
            let mut e = cat.zero(x, x);
            for (k, c) in combo {
                if k >= cat.basis.len() || cat.basis[k].source != x || cat.basis[k].target != x {
                    return bad(format!(
                        "identity of object {} uses a non-endomorphism basis element",
                        cat.objects[x]
                    ));
                }
                if c.field() != &cat.field {
                    return bad(format!(
                        "identity coefficient field mismatch at object {}",
                        cat.objects[x]
                    ));
                }
                let p = cat.pos_in_hom[k];
                e.coords[p] = e.coords[p].add(&c)?;
            }
            ids.push(e);
        }
        cat.identities = ids;

        cat.verify_associativity()?;
        cat.verify_identities()?;
        Ok(cat)
    }

    fn verify_associativity(&self) -> Result<(), AlgebraError> {
        // Composable basis triples h.(g.f) vs (h.g).f, grouped by objects so
        // the loop only visits genuinely composable combinations.
        let n = self.objects.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        for &h in &self.hom[d][c] {
                            for &g in &self.hom[c][b] {
                                let hg = self.compose_basis(h, g).to_vec();
                                for &f in &self.hom[b][a] {
                                    let left = self.combo_then(&hg, f)?;
                                    let gf = self.compose_basis(g, f).to_vec();
                                    let right = self.then_combo(h, &gf)?;
                                    if left != right {
                                        return Err(AlgebraError::NotAssociative(
                                            self.basis[h].name.clone(),
                                            self.basis[g].name.clone(),
                                            self.basis[f].name.clone(),
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn verify_identities(&self) -> Result<(), AlgebraError> {
        for (x, id) in self.identities.iter().enumerate() {
            for (i, b) in self.basis.iter().enumerate() {
                let e = self.basis_element(i);
                if b.source == x && self.compose(&e, id)? != e {
                    return Err(AlgebraError::BadIdentity(
                        self.objects[x].clone(),
                        format!("{} . id != {}", b.name, b.name),
                    ));
                }
                if b.target == x && self.compose(id, &e)? != e {
                    return Err(AlgebraError::BadIdentity(
                        self.objects[x].clone(),
                        format!("id . {} != {}", b.name, b.name),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Sparse combination `combo . f` for a combination in hom(b -> c) and a
    /// basis morphism f: a -> b, as a sorted coordinate list.
    fn combo_then(&self, combo: &[(usize, Scalar)], f: usize) -> Result<Vec<(usize, Scalar)>, AlgebraError> {
        let mut acc: HashMap<usize, Scalar> = HashMap::new();
        for (g, c) in combo {
            for (k, d) in self.compose_basis(*g, f) {
                let term = c.mul(d)?;
                match acc.entry(*k) {
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        let sum = o.get().add(&term)?;
                        o.insert(sum);
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(term);
                    }
                }
            }
        }
        let mut out: Vec<(usize, Scalar)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.sort_by_key(|(k, _)| *k);
        Ok(out)
    }

    /// Sparse combination `h . combo` for a basis morphism h and a
    /// combination in its source hom-space.
    fn then_combo(&self, h: usize, combo: &[(usize, Scalar)]) -> Result<Vec<(usize, Scalar)>, AlgebraError> {
        let mut acc: HashMap<usize, Scalar> = HashMap::new();
        for (f, c) in combo {
            for (k, d) in self.compose_basis(h, *f) {
                let term = c.mul(d)?;
                match acc.entry(*k) {
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        let sum = o.get().add(&term)?;
                        o.insert(sum);
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(term);
                    }
                }
            }
        }
        let mut out: Vec<(usize, Scalar)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.sort_by_key(|(k, _)| *k);
        Ok(out)
    }

    // -- accessors ----------------------------------------------------------

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn basis(&self) -> &[BasisMorphism] {
        &self.basis
    }

    /// Total dimension: the sum of all hom-space dimensions.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Global indices of the basis of hom(source -> target).
    pub fn hom_basis(&self, source: usize, target: usize) -> &[usize] {
        &self.hom[target][source]
    }

    pub fn hom_dim(&self, source: usize, target: usize) -> usize {
        self.hom[target][source].len()
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    /// Raw structure constants of `g . f`; empty means the composite is zero.
    pub fn compose_basis(&self, g: usize, f: usize) -> &[(usize, Scalar)] {
        self.compose.get(&(g, f)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Iterates all nonzero structure constants as (g, f, k, coefficient).
    pub fn composition_entries(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let mut out: Vec<(usize, usize, usize, Scalar)> = self
            .compose
            .iter()
            .flat_map(|((g, f), combo)| {
                combo.iter().map(move |(k, c)| (*g, *f, *k, c.clone()))
            })
            .collect();
        out.sort_by_key(|(g, f, k, _)| (*g, *f, *k));
        out
    }

    pub fn is_single_object(&self) -> bool {
        self.objects.len() == 1
    }

    // -- elements -----------------------------------------------------------

    pub fn zero(&self, source: usize, target: usize) -> AlgebraElement {
        AlgebraElement {
            source,
            target,
            coords: vec![self.field.zero(); self.hom[target][source].len()],
        }
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement {
        let b = &self.basis[i];
        let mut e = self.zero(b.source, b.target);
        e.coords[self.pos_in_hom[i]] = self.field.one();
        e
    }

    pub fn element(
        &self,
        source: usize,
        target: usize,
        coords: Vec<Scalar>,
    ) -> Result<AlgebraElement, AlgebraError> {
        if source >= self.objects.len() || target >= self.objects.len() {
            return Err(AlgebraError::Mismatch("object index out of range".into()));
        }
        if coords.len() != self.hom[target][source].len() {
            return Err(AlgebraError::Mismatch(format!(
                "expected {} coordinates, got {}",
                self.hom[target][source].len(),
                coords.len()
            )));
        }
        if coords.iter().any(|c| c.field() != &self.field) {
            return Err(AlgebraError::Mismatch("coordinate field mismatch".into()));
        }
        Ok(AlgebraElement { source, target, coords })
    }

    /// Element from (global basis index, coefficient) pairs, all in one
    /// hom-space.
    pub fn element_from_terms(
        &self,
        terms: &[(usize, Scalar)],
    ) -> Result<AlgebraElement, AlgebraError> {
        let Some((first, _)) = terms.first() else {
            return Err(AlgebraError::Mismatch(
                "cannot infer the hom-space of an empty term list".into(),
            ));
        };
        let (source, target) = (self.basis[*first].source, self.basis[*first].target);
        let mut e = self.zero(source, target);
        for (k, c) in terms {
            if self.basis[*k].source != source || self.basis[*k].target != target {
                return Err(AlgebraError::Mismatch(
                    "terms spread over several hom-spaces".into(),
                ));
            }
            let p = self.pos_in_hom[*k];
            e.coords[p] = e.coords[p].add(c)?;
        }
        Ok(e)
    }

    pub fn identity_element(&self, x: usize) -> &AlgebraElement {
        &self.identities[x]
    }

    /// Identity of the unique object of an algebra.
    pub fn one(&self) -> Result<&AlgebraElement, AlgebraError> {
        self.require_algebra()?;
        Ok(&self.identities[0])
    }

    pub fn require_algebra(&self) -> Result<(), AlgebraError> {
        if self.is_single_object() {
            Ok(())
        } else {
            Err(AlgebraError::Mismatch(format!(
                "expected a one-object category, found {} objects",
                self.objects.len()
            )))
        }
    }

    pub fn is_zero(&self, a: &AlgebraElement) -> bool {
        a.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if a.source != b.source || a.target != b.target {
            return Err(AlgebraError::Mismatch("sum of elements in different hom-spaces".into()));
        }
        let coords: Result<Vec<Scalar>, ScalarError> =
            a.coords.iter().zip(&b.coords).map(|(x, y)| x.add(y)).collect();
        Ok(AlgebraElement { source: a.source, target: a.target, coords: coords? })
    }

    pub fn sub(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if a.source != b.source || a.target != b.target {
            return Err(AlgebraError::Mismatch(
                "difference of elements in different hom-spaces".into(),
            ));
        }
        let coords: Result<Vec<Scalar>, ScalarError> =
            a.coords.iter().zip(&b.coords).map(|(x, y)| x.sub(y)).collect();
        Ok(AlgebraElement { source: a.source, target: a.target, coords: coords? })
    }

    pub fn scale(&self, s: &Scalar, a: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        let coords: Result<Vec<Scalar>, ScalarError> =
            a.coords.iter().map(|x| s.mul(x)).collect();
        Ok(AlgebraElement { source: a.source, target: a.target, coords: coords? })
    }

    /// Composition `g . f` (f first). In a one-object category this is the
    /// algebra product g*f in matrix-product order.
    pub fn compose(&self, g: &AlgebraElement, f: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if f.target != g.source {
            return Err(AlgebraError::Mismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.objects[g.source], self.objects[g.target], self.objects[f.source],
                self.objects[f.target]
            )));
        }
        let mut out = self.zero(f.source, g.target);
        let g_basis = &self.hom[g.target][g.source];
        let f_basis = &self.hom[f.target][f.source];
        for (gp, gc) in g.coords.iter().enumerate() {
            if gc.is_zero() {
                continue;
            }
            for (fp, fc) in f.coords.iter().enumerate() {
                if fc.is_zero() {
                    continue;
                }
                let scale = gc.mul(fc)?;
                for (k, c) in self.compose_basis(g_basis[gp], f_basis[fp]) {
                    let p = self.pos_in_hom[*k];
                    out.coords[p] = out.coords[p].add(&scale.mul(c)?)?;
                }
            }
        }
        Ok(out)
    }

    /// a^k for a one-object element; k = 0 gives the unit.
    pub fn power(&self, a: &AlgebraElement, k: usize) -> Result<AlgebraElement, AlgebraError> {
        self.require_algebra()?;
        let mut acc = self.one()?.clone();
        for _ in 0..k {
            acc = self.compose(&acc, a)?;
        }
        Ok(acc)
    }

    pub fn render(&self, a: &AlgebraElement) -> String {
        let mut out = String::new();
        for (p, c) in a.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !out.is_empty() {
                out.push_str(" + ");
            }
            let name = &self.basis[self.hom[a.target][a.source][p]].name;
            if c.is_one() {
                out.push_str(name);
            } else {
                let _ = write!(out, "({c})*{name}");
            }
        }
        if out.is_empty() {
            "0".to_string()
        } else {
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Verified algebra morphisms.

/// A unital algebra homomorphism between one-object categories, stored as
/// images of the source basis and fully verified at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraMorphism {
    source: LinearCategory,
    target: LinearCategory,
    images: Vec<AlgebraElement>,
}

impl AlgebraMorphism {
    pub fn new(
        source: LinearCategory,
        target: LinearCategory,
        images: Vec<AlgebraElement>,
    ) -> Result<Self, AlgebraError> {
        source.require_algebra()?;
        target.require_algebra()?;
        if source.field() != target.field() {
            return Err(AlgebraError::Mismatch("source and target fields differ".into()));
        }
        if images.len() != source.dimension() {
            return Err(AlgebraError::Mismatch(format!(
                "expected {} basis images, got {}",
                source.dimension(),
                images.len()
            )));
        }
        for img in &images {
            if img.coords.len() != target.dimension() {
                return Err(AlgebraError::Mismatch(
                    "image coordinates do not match the target dimension".into(),
                ));
            }
        }
        let m = AlgebraMorphism { source, target, images };
        m.verify()?;
        Ok(m)
    }

    fn verify(&self) -> Result<(), AlgebraError> {
        // Unital.
        let one_img = self.apply(self.source.one()?)?;
        if one_img != *self.target.one()? {
            return Err(AlgebraError::NotMultiplicative("unit does not map to the unit".into()));
        }
        // Multiplicative on all basis pairs.
        for i in 0..self.source.dimension() {
            for j in 0..self.source.dimension() {
                let a = self.source.basis_element(i);
                let b = self.source.basis_element(j);
                let lhs = self.apply(&self.source.compose(&a, &b)?)?;
                let rhs = self.target.compose(&self.images[i], &self.images[j])?;
                if lhs != rhs {
                    return Err(AlgebraError::NotMultiplicative(format!(
                        "images of {} and {} do not multiply correctly",
                        self.source.basis()[i].name,
                        self.source.basis()[j].name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &LinearCategory {
        &self.source
    }

    pub fn target(&self) -> &LinearCategory {
        &self.target
    }

    pub fn images(&self) -> &[AlgebraElement] {
        &self.images
    }

    /// Linear extension to arbitrary elements of the source.
    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        let mut out = self.target.zero(0, 0);
        for (p, c) in a.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let img = &self.images[p];
            for (q, d) in img.coords.iter().enumerate() {
                out.coords[q] = out.coords[q].add(&c.mul(d)?)?;
            }
        }
        Ok(out)
    }

    /// Exact linear-independence test of the basis images.
    pub fn is_bijective(&self) -> Result<bool, AlgebraError> {
        if self.source.dimension() != self.target.dimension() {
            return Ok(false);
        }
        let rows: Vec<Vec<Scalar>> = self.images.iter().map(|e| e.coords.clone()).collect();
        Ok(matrix_rank(rows)? == self.source.dimension())
    }
}

/// Inverse of a square scalar matrix by Gauss-Jordan elimination, or None
/// when the matrix is singular.
// Pivot rows and eliminated rows are indexed side by side.
#[allow(clippy::needless_range_loop)]
pub(crate) fn invert_matrix(
    rows: &[Vec<Scalar>],
    field: &FieldDescriptor,
) -> Result<Option<Vec<Vec<Scalar>>>, ScalarError> {
    let n = rows.len();
    let mut work: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    for (r, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.len(), n, "inverse needs a square matrix");
        let mut extended = row.clone();
        for c in 0..n {
            extended.push(if c == r { field.one() } else { field.zero() });
        }
        work.push(extended);
    }
    for col in 0..n {
        let Some(pivot) = (col..n).find(|r| !work[*r][col].is_zero()) else {
            return Ok(None);
        };
        work.swap(col, pivot);
        let inv = work[col][col].inv()?;
        for c in 0..2 * n {
            work[col][c] = work[col][c].mul(&inv)?;
        }
        for r in 0..n {
            if r != col && !work[r][col].is_zero() {
                let factor = work[r][col].clone();
                for c in 0..2 * n {
                    let delta = factor.mul(&work[col][c])?;
                    work[r][c] = work[r][c].sub(&delta)?;
                }
            }
        }
    }
    Ok(Some(work.into_iter().map(|row| row[n..].to_vec()).collect()))
}

/// Rank of a matrix of scalars by exact Gaussian elimination.
#[allow(clippy::needless_range_loop)]
fn matrix_rank(mut rows: Vec<Vec<Scalar>>) -> Result<usize, ScalarError> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..ncols {
        let Some(pivot) = (row..nrows).find(|r| !rows[*r][col].is_zero()) else {
            continue;
        };
        rows.swap(row, pivot);
        let inv = rows[row][col].inv()?;
        for c in col..ncols {
            rows[row][c] = rows[row][c].mul(&inv)?;
        }
        for r in 0..nrows {
            if r != row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..ncols {
                    let delta = factor.mul(&rows[row][c])?;
                    rows[r][c] = rows[r][c].sub(&delta)?;
                }
            }
        }
        rank += 1;
        row += 1;
        if row == nrows {
            break;
        }
    }
    Ok(rank)
}

// ---------------------------------------------------------------------------
// Standard constructions.

/// Full matrix algebra M_n: basis of elementary matrices E_j_i (sending the
/// i-th basis vector to the j-th) with E_ji . E_lk = [i=l] E_jk.
pub fn make_matrix_algebra(n: usize, field: &FieldDescriptor) -> Result<LinearCategory, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::InvalidStructure("matrix size must be >= 1".into()));
    }
    let mut basis = Vec::with_capacity(n * n);
    for j in 1..=n {
        for i in 1..=n {
            basis.push((format!("E_{j}_{i}"), 0, 0));
        }
    }
    let idx = |j: usize, i: usize| (j - 1) * n + (i - 1);
    let mut compose = HashMap::new();
    for j in 1..=n {
        for i in 1..=n {
            for l in 1..=n {
                for k in 1..=n {
                    if i == l {
                        compose.insert(
                            (idx(j, i), idx(l, k)),
                            vec![(idx(j, k), field.one())],
                        );
                    }
                }
            }
        }
    }
    let identity = (1..=n).map(|i| (idx(i, i), field.one())).collect();
    LinearCategory::new(field.clone(), vec!["*".into()], basis, compose, vec![identity])
}

/// M_n presented by the two generators x (cyclic shift) and y (diagonal of
/// root-of-unity powers): basis x^i y^j with
/// (x^i y^j)(x^k y^l) = q^{jk} x^{i+k} y^{j+l}, exponents mod n.
pub struct MatrixXY {
    pub category: LinearCategory,
    pub x: AlgebraElement,
    pub y: AlgebraElement,
    pub q: Scalar,
}

fn xy_name(i: usize, j: usize) -> String {
    match (i, j) {
        (0, 0) => "1".to_string(),
        (i, 0) => power_name("x", i),
        (0, j) => power_name("y", j),
        (i, j) => format!("{}*{}", power_name("x", i), power_name("y", j)),
    }
}

fn power_name(base: &str, e: usize) -> String {
    if e == 1 {
        base.to_string()
    } else {
        format!("{base}^{e}")
    }
}

pub fn make_matrix_xy(n: usize, field: &FieldDescriptor) -> Result<MatrixXY, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::InvalidStructure("matrix size must be >= 1".into()));
    }
    let q = primitive_root(field, n as u64)?;
    let idx = |i: usize, j: usize| i * n + j;
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            basis.push((xy_name(i, j), 0, 0));
        }
    }
    let mut compose = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let coeff = q.pow((j * k) as i64)?;
                    compose.insert(
                        (idx(i, j), idx(k, l)),
                        vec![(idx((i + k) % n, (j + l) % n), coeff)],
                    );
                }
            }
        }
    }
    let identity = vec![(idx(0, 0), field.one())];
    let category =
        LinearCategory::new(field.clone(), vec!["*".into()], basis, compose, vec![identity])?;
    let x = category.basis_element(idx(1 % n, 0));
    let y = category.basis_element(idx(0, 1 % n));
    Ok(MatrixXY { category, x, y, q })
}

/// The verified isomorphism from the x,y-presentation onto the matrix-unit
/// presentation: x becomes the cyclic shift sum E_{i+1,i}, y the diagonal
/// sum q^i E_ii.
pub fn xy_to_matrix_units(xy: &MatrixXY) -> Result<AlgebraMorphism, AlgebraError> {
    let n2 = xy.category.dimension();
    let n = (1..).find(|m| m * m == n2).expect("square dimension");
    let field = xy.category.field().clone();
    let units = make_matrix_algebra(n, &field)?;
    let uidx = |j: usize, i: usize| (j - 1) * n + (i - 1);
    // Images of x and y.
    let mut x_img = units.zero(0, 0);
    for i in 1..=n {
        let j = i % n + 1;
        let p = uidx(j, i);
        x_img.coords[p] = x_img.coords[p].add(&field.one())?;
    }
    let mut y_img = units.zero(0, 0);
    for i in 1..=n {
        let p = uidx(i, i);
        y_img.coords[p] = y_img.coords[p].add(&xy.q.pow(i as i64)?)?;
    }
    // Images of the whole basis x^i y^j.
    let mut images = Vec::with_capacity(n2);
    for i in 0..n {
        for j in 0..n {
            let xi = units.power(&x_img, i)?;
            let yj = units.power(&y_img, j)?;
            images.push(units.compose(&xi, &yj)?);
        }
    }
    AlgebraMorphism::new(xy.category.clone(), units, images)
}

/// Upper-triangular matrix algebra T_n: the span of the units E_j_i with
/// j <= i, closed under the matrix-unit composition rule.
pub fn make_triangular(n: usize, field: &FieldDescriptor) -> Result<LinearCategory, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::InvalidStructure("matrix size must be >= 1".into()));
    }
    let mut names: Vec<(usize, usize)> = Vec::new();
    let mut basis = Vec::new();
    for j in 1..=n {
        for i in j..=n {
            names.push((j, i));
            basis.push((format!("E_{j}_{i}"), 0, 0));
        }
    }
    let idx = |j: usize, i: usize| names.iter().position(|p| *p == (j, i)).expect("present");
    let mut compose = HashMap::new();
    for &(j, i) in &names {
        for &(l, k) in &names {
            if i == l {
                compose.insert((idx(j, i), idx(l, k)), vec![(idx(j, k), field.one())]);
            }
        }
    }
    let identity = (1..=n).map(|i| (idx(i, i), field.one())).collect();
    LinearCategory::new(field.clone(), vec!["*".into()], basis, compose, vec![identity])
}

/// Diagonal algebra k^n with the pointwise product of Dirac masses.
pub fn make_diagonal(n: usize, field: &FieldDescriptor) -> Result<LinearCategory, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::InvalidStructure("need at least one point".into()));
    }
    let basis: Vec<(String, usize, usize)> =
        (1..=n).map(|i| (format!("d{i}"), 0, 0)).collect();
    let mut compose = HashMap::new();
    for i in 0..n {
        compose.insert((i, i), vec![(i, field.one())]);
    }
    let identity = (0..n).map(|i| (i, field.one())).collect();
    LinearCategory::new(field.clone(), vec!["*".into()], basis, compose, vec![identity])
}

/// Direct product A x B of two algebras with componentwise operations: the
/// basis is the disjoint union of the two bases (renamed by the prefixes),
/// mixed products vanish, and the unit is the pair of units.
pub fn make_product_algebra(
    a: &LinearCategory,
    b: &LinearCategory,
    left_prefix: &str,
    right_prefix: &str,
) -> Result<LinearCategory, AlgebraError> {
    if !a.is_single_object() || !b.is_single_object() {
        return Err(AlgebraError::InvalidStructure(
            "products are formed from one-object algebras".into(),
        ));
    }
    if a.field() != b.field() {
        return Err(AlgebraError::Mismatch(
            "product factors must share a scalar field".into(),
        ));
    }
    let offset = a.dimension();
    let mut basis: Vec<(String, usize, usize)> = Vec::with_capacity(offset + b.dimension());
    for m in a.basis() {
        basis.push((format!("{left_prefix}{}", m.name), 0, 0));
    }
    for m in b.basis() {
        basis.push((format!("{right_prefix}{}", m.name), 0, 0));
    }
    let mut compose = HashMap::new();
    for (g, f, k, c) in a.composition_entries() {
        compose
            .entry((g, f))
            .or_insert_with(Vec::new)
            .push((k, c));
    }
    for (g, f, k, c) in b.composition_entries() {
        compose
            .entry((g + offset, f + offset))
            .or_insert_with(Vec::new)
            .push((k + offset, c));
    }
    let mut identity: Vec<(usize, Scalar)> = Vec::new();
    for (pos, c) in a.identity_element(0).coords.iter().enumerate() {
        if !c.is_zero() {
            identity.push((a.hom_basis(0, 0)[pos], c.clone()));
        }
    }
    for (pos, c) in b.identity_element(0).coords.iter().enumerate() {
        if !c.is_zero() {
            identity.push((b.hom_basis(0, 0)[pos] + offset, c.clone()));
        }
    }
    LinearCategory::new(
        a.field().clone(),
        vec!["*".into()],
        basis,
        compose,
        vec![identity],
    )
}

/// Group algebra kG of a finite group, basis indexed by the group elements in
/// enumeration order, named by their renders.
pub fn make_group_algebra(
    group: &crate::groups::GroupDescriptor,
    field: &FieldDescriptor,
) -> Result<LinearCategory, AlgebraError> {
    if group.order().is_none() {
        return Err(AlgebraError::InvalidStructure(
            "group algebras here require a finite group".into(),
        ));
    }
    let elements = group
        .enumerate(None)
        .map_err(|e| AlgebraError::InvalidStructure(e.to_string()))?;
    let index: HashMap<&crate::groups::GroupElement, usize> =
        elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let basis: Vec<(String, usize, usize)> =
        elements.iter().map(|e| (group.render(e), 0, 0)).collect();
    let mut compose = HashMap::new();
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            let prod = group
                .multiply(a, b)
                .map_err(|e| AlgebraError::InvalidStructure(e.to_string()))?;
            compose.insert((i, j), vec![(index[&prod], field.one())]);
        }
    }
    let id_pos = index[&group.identity()];
    LinearCategory::new(
        field.clone(),
        vec!["*".into()],
        basis,
        compose,
        vec![vec![(id_pos, field.one())]],
    )
}

/// Truncated polynomial algebra k[x]/(x^p), basis 1, x, ..., x^{p-1} in
/// exponent order.
pub fn make_truncated_poly(p: usize, field: &FieldDescriptor) -> Result<LinearCategory, AlgebraError> {
    if p == 0 {
        return Err(AlgebraError::InvalidStructure("truncation exponent must be >= 1".into()));
    }
    let basis: Vec<(String, usize, usize)> = (0..p)
        .map(|k| {
            let name = match k {
                0 => "1".to_string(),
                k => power_name("x", k),
            };
            (name, 0, 0)
        })
        .collect();
    let mut compose = HashMap::new();
    for a in 0..p {
        for b in 0..p {
            if a + b < p {
                compose.insert((a, b), vec![(a + b, field.one())]);
            }
        }
    }
    LinearCategory::new(
        field.clone(),
        vec!["*".into()],
        basis,
        compose,
        vec![vec![(0, field.one())]],
    )
}

/// Valuation on a truncated polynomial algebra: the smallest exponent with a
/// nonzero coordinate (the basis of `make_truncated_poly` is in exponent
/// order). Errors on the zero element.
pub fn valuation(c: &LinearCategory, a: &AlgebraElement) -> Result<usize, AlgebraError> {
    c.require_algebra()?;
    a.coords
        .iter()
        .position(|x| !x.is_zero())
        .ok_or(AlgebraError::ZeroElement)
}

/// Invertibility of a one-object element, decided exactly through the rank of
/// the left-multiplication operator.
pub fn is_invertible(c: &LinearCategory, a: &AlgebraElement) -> Result<bool, AlgebraError> {
    c.require_algebra()?;
    let d = c.dimension();
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(d);
    for k in 0..d {
        let col = c.compose(a, &c.basis_element(k))?;
        rows.push(col.coords);
    }
    Ok(matrix_rank(rows)? == d)
}

/// Collapses a finite category to its one-object total algebra: basis is the
/// union of all hom bases, products of non-composable pairs are zero, and the
/// unit is the sum of the object identities.
pub fn total_algebra(c: &LinearCategory) -> Result<LinearCategory, AlgebraError> {
    let basis: Vec<(String, usize, usize)> =
        c.basis().iter().map(|b| (b.name.clone(), 0, 0)).collect();
    let mut compose = HashMap::new();
    for ((g, f), combo) in &c.compose {
        compose.insert((*g, *f), combo.clone());
    }
    let mut identity = Vec::new();
    for x in 0..c.object_count() {
        let id = c.identity_element(x);
        for (p, coeff) in id.coords.iter().enumerate() {
            if !coeff.is_zero() {
                identity.push((c.hom[x][x][p], coeff.clone()));
            }
        }
    }
    LinearCategory::new(c.field().clone(), vec!["*".into()], basis, compose, vec![identity])
}

/// Matches a finite category with n objects, all homs one-dimensional and all
/// structure constants nonzero, against M_n: rescales the basis morphisms
/// along the star of the first object and returns the verified isomorphism
/// from the total algebra onto the matrix-unit algebra.
// The gauge matrix mu is filled and checked by object indices on purpose.
#[allow(clippy::needless_range_loop)]
pub fn match_matrix_structure(
    c: &LinearCategory,
    n: usize,
) -> Result<AlgebraMorphism, AlgebraError> {
    let fail = |msg: String| Err(AlgebraError::ShapeMismatch(msg));
    if c.object_count() != n {
        return fail(format!("expected {n} objects, found {}", c.object_count()));
    }
    for y in 0..n {
        for x in 0..n {
            if c.hom_dim(x, y) != 1 {
                return fail(format!(
                    "hom({}, {}) has dimension {}, expected 1",
                    c.objects()[x],
                    c.objects()[y],
                    c.hom_dim(x, y)
                ));
            }
        }
    }
    let field = c.field().clone();
    let u = |x: usize, y: usize| c.hom[y][x][0];
    // t(z, y, x): the structure constant of u_{y->z} . u_{x->y}.
    let t = |x: usize, y: usize, z: usize| -> Result<Scalar, AlgebraError> {
        let combo = c.compose_basis(u(y, z), u(x, y));
        match combo {
            [(k, coeff)] if *k == u(x, z) => Ok(coeff.clone()),
            [] => Err(AlgebraError::ShapeMismatch(format!(
                "composition hom({y} -> {z}) . hom({x} -> {y}) is zero",
            ))),
            _ => Err(AlgebraError::ShapeMismatch(
                "composition leaves the one-dimensional lattice".into(),
            )),
        }
    };
    // Gauge factors mu[x][y] with rescaled v_{x->y} = mu * u_{x->y} obeying
    // v . v = v: derived from the star at object 0, then fully verified.
    let mut mu = vec![vec![field.one(); n]; n];
    mu[0][0] = t(0, 0, 0)?.inv()?;
    for x in 1..n {
        // Gauge freedom: morphisms out of object 0 keep factor 1; the
        // round trip 0 -> x -> 0 then pins the reverse factor.
        mu[0][x] = field.one();
        mu[x][0] = t(0, 0, 0)?.mul(&t(0, x, 0)?)?.inv()?;
    }
    for x in 1..n {
        for y in 1..n {
            // Factor x -> y through object 0.
            mu[x][y] = mu[0][y].mul(&mu[x][0])?.mul(&t(x, 0, y)?)?;
        }
    }
    // mu[x][y] is the factor for the morphism x -> y; check the matrix-unit
    // law on every object triple.
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let lhs = mu[y][z].mul(&mu[x][y])?.mul(&t(x, y, z)?)?;
                if lhs != mu[x][z] {
                    return fail(format!(
                        "structure constants do not close at objects ({x}, {y}, {z})"
                    ));
                }
            }
        }
    }
    // Identities must coincide with the rescaled idempotents.
    for x in 0..n {
        let mut idem = c.zero(x, x);
        idem.coords[0] = mu[x][x].clone();
        if &idem != c.identity_element(x) {
            return fail(format!(
                "identity of object {} is not the rescaled endomorphism basis vector",
                c.objects()[x]
            ));
        }
    }

    let total = total_algebra(c)?;
    let units = make_matrix_algebra(n, &field)?;
    let uidx = |j: usize, i: usize| (j - 1) * n + (i - 1);
    let mut images = vec![units.zero(0, 0); total.dimension()];
    for y in 0..n {
        for x in 0..n {
            // v_{x->y} = mu[x][y] u_{x->y} corresponds to E_{y+1, x+1}; so
            // u_{x->y} maps to E / mu.
            let global = u(x, y);
            let mut img = units.zero(0, 0);
            img.coords[uidx(y + 1, x + 1)] = mu[x][y].inv()?;
            images[global] = img;
        }
    }
    let iso = AlgebraMorphism::new(total, units, images)?;
    if !iso.is_bijective()? {
        return fail("rescaled map is not bijective".into());
    }
    Ok(iso)
}

/// The quiver-style presentation of M_n: a category with n objects, all homs
/// one-dimensional with unit structure constants, together with the verified
/// isomorphism of its total algebra onto M_n sending the arrow basis
/// w_{j}_{i} to E_ji. The adjacent arrows x_i = w_{i+1}_{i} and
/// y_i = w_{i}_{i+1} satisfy y_i x_i = e_i and x_i y_i = e_{i+1}.
pub struct MatrixPresentation {
    pub category: LinearCategory,
    pub onto: AlgebraMorphism,
}

impl MatrixPresentation {
    /// Evaluates a path word in the adjacent generators: letters (i, +1) for
    /// x_i: i -> i+1 and (i, -1) for y_i: i+1 -> i, applied right to left.
    /// Returns the corresponding element of the matrix-unit algebra.
    pub fn eval_path(&self, letters: &[(usize, i64)]) -> Result<AlgebraElement, AlgebraError> {
        let units = self.onto.target();
        let mut acc = units.one()?.clone();
        for (i, sign) in letters.iter().rev() {
            let name = if *sign >= 0 {
                format!("E_{}_{}", i + 1, i)
            } else {
                format!("E_{}_{}", i, i + 1)
            };
            let k = units
                .basis_index(&name)
                .ok_or_else(|| AlgebraError::Mismatch(format!("no generator {name}")))?;
            acc = units.compose(&units.basis_element(k), &acc)?;
        }
        Ok(acc)
    }
}

pub fn quiver_presentation_matrix(
    n: usize,
    field: &FieldDescriptor,
) -> Result<MatrixPresentation, AlgebraError> {
    if n < 2 {
        return Err(AlgebraError::InvalidStructure(
            "the presentation needs at least two vertices".into(),
        ));
    }
    let objects: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let mut basis = Vec::new();
    for j in 1..=n {
        for i in 1..=n {
            // w_{j}_{i}: the unique path class from vertex i to vertex j.
            basis.push((format!("w_{j}_{i}"), i - 1, j - 1));
        }
    }
    let idx = |j: usize, i: usize| (j - 1) * n + (i - 1);
    let mut compose = HashMap::new();
    for j in 1..=n {
        for i in 1..=n {
            for k in 1..=n {
                compose.insert((idx(j, i), idx(i, k)), vec![(idx(j, k), field.one())]);
            }
        }
    }
    let identities: Vec<Vec<(usize, Scalar)>> =
        (1..=n).map(|i| vec![(idx(i, i), field.one())]).collect();
    let category = LinearCategory::new(field.clone(), objects, basis, compose, identities)?;

    let total = total_algebra(&category)?;
    let units = make_matrix_algebra(n, field)?;
    let mut images = vec![units.zero(0, 0); total.dimension()];
    for j in 1..=n {
        for i in 1..=n {
            let g = total.basis_index(&format!("w_{j}_{i}")).expect("present");
            images[g] = units.basis_element(units.basis_index(&format!("E_{j}_{i}")).expect("present"));
        }
    }
    let onto = AlgebraMorphism::new(total, units, images)?;
    let pres = MatrixPresentation { category, onto };
    // Verify the defining relations y_i x_i = e_i and x_i y_i = e_{i+1}.
    for i in 1..n {
        let units = pres.onto.target();
        let e = |v: usize| {
            units.basis_element(units.basis_index(&format!("E_{v}_{v}")).expect("present"))
        };
        if pres.eval_path(&[(i, -1), (i, 1)])? != e(i) {
            return Err(AlgebraError::InvalidStructure(format!(
                "relation y_{i} x_{i} = e_{i} fails"
            )));
        }
        if pres.eval_path(&[(i, 1), (i, -1)])? != e(i + 1) {
            return Err(AlgebraError::InvalidStructure(format!(
                "relation x_{i} y_{i} = e_{} fails",
                i + 1
            )));
        }
    }
    Ok(pres)
}

/// The character-table isomorphism kG -> k^{|G|} for a finite abelian G given
/// by invariant-factor atoms: the idempotent e_chi = (1/|G|) sum chi(g)^{-1} g
/// maps to the Dirac mass at chi. Verifies orthogonality and completeness of
/// the idempotents, then the morphism axioms.
pub fn group_algebra_to_diagonal(
    group: &crate::groups::GroupDescriptor,
    field: &FieldDescriptor,
) -> Result<AlgebraMorphism, AlgebraError> {
    let factors = abelian_residue_factors(group).ok_or_else(|| {
        AlgebraError::InvalidStructure(
            "expected a finite abelian group in invariant-factor form".into(),
        )
    })?;
    let order: u64 = factors.iter().product::<u64>().max(1);
    let p = field.characteristic();
    if p != 0 && order.is_multiple_of(p) {
        return Err(AlgebraError::BadCharacteristic(format!(
            "characteristic {p} divides the group order {order}"
        )));
    }
    let roots: Vec<Scalar> = factors
        .iter()
        .map(|d| primitive_root(field, *d))
        .collect::<Result<_, _>>()?;

    let kg = make_group_algebra(group, field)?;
    let elements = group
        .enumerate(None)
        .map_err(|e| AlgebraError::InvalidStructure(e.to_string()))?;
    let residues: Vec<Vec<u64>> = elements.iter().map(residue_vector).collect();
    // Characters are indexed by the same residue tuples, in the same
    // mixed-radix enumeration order as the elements themselves.
    let chars: Vec<Vec<u64>> = residues.clone();
    let chi = |a: &[u64], r: &[u64]| -> Result<Scalar, AlgebraError> {
        let mut acc = field.one();
        for ((ai, ri), zeta) in a.iter().zip(r).zip(&roots) {
            acc = acc.mul(&zeta.pow((ai * ri) as i64)?)?;
        }
        Ok(acc)
    };

    // Idempotents inside kG, then their declared relations.
    let inv_order = field.from_integer(order as i64).inv()?;
    let mut idempotents = Vec::with_capacity(chars.len());
    for a in &chars {
        let mut e = kg.zero(0, 0);
        for (g, r) in residues.iter().enumerate() {
            // chi(g)^{-1} = chi(g^{-1}); exact inverse of a root of unity.
            e.coords[g] = chi(a, r)?.inv()?.mul(&inv_order)?;
        }
        idempotents.push(e);
    }
    let mut total = kg.zero(0, 0);
    for (i, e) in idempotents.iter().enumerate() {
        total = kg.add(&total, e)?;
        for (j, f) in idempotents.iter().enumerate() {
            let prod = kg.compose(e, f)?;
            let expected = if i == j { e.clone() } else { kg.zero(0, 0) };
            if prod != expected {
                return Err(AlgebraError::NotMultiplicative(
                    "character idempotents are not orthogonal".into(),
                ));
            }
        }
    }
    if &total != kg.one()? {
        return Err(AlgebraError::NotMultiplicative(
            "character idempotents do not sum to the unit".into(),
        ));
    }

    // The morphism sends the basis element g to (chi(g))_chi.
    let diag = make_diagonal(order as usize, field)?;
    let mut images = Vec::with_capacity(elements.len());
    for r in &residues {
        let mut img = diag.zero(0, 0);
        for (c, a) in chars.iter().enumerate() {
            img.coords[c] = chi(a, r)?;
        }
        images.push(img);
    }
    AlgebraMorphism::new(kg, diag, images)
}

/// Flattens a finite abelian descriptor into the list of cyclic factor
/// orders, in generator order. None when some atom is not in
/// invariant-factor form or the group is infinite.
fn abelian_residue_factors(group: &crate::groups::GroupDescriptor) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    for atom in group.atoms() {
        match atom {
            crate::groups::Atom::FiniteAbelian { factors } => out.extend(factors.iter().copied()),
            _ => return None,
        }
    }
    Some(out)
}

/// Residues of a finite abelian element across all atoms.
fn residue_vector(e: &crate::groups::GroupElement) -> Vec<u64> {
    let mut out = Vec::new();
    for part in &e.parts {
        if let crate::groups::AtomElement::Residues(r) = part {
            out.extend(r.iter().copied());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupDescriptor;

    fn q() -> FieldDescriptor {
        FieldDescriptor::rational()
    }

    fn be(c: &LinearCategory, name: &str) -> AlgebraElement {
        c.basis_element(c.basis_index(name).expect("basis name"))
    }

    #[test]
    fn matrix_units_multiply_by_index_matching() {
        let m2 = make_matrix_algebra(2, &q()).unwrap();
        let e21 = be(&m2, "E_2_1");
        let e12 = be(&m2, "E_1_2");
        let e22 = be(&m2, "E_2_2");
        assert_eq!(m2.compose(&e21, &e12).unwrap(), e22);
        assert!(m2.is_zero(&m2.compose(&e21, &e21).unwrap()));

        let m3 = make_matrix_algebra(3, &q()).unwrap();
        let unit = m3.one().unwrap();
        let nonzero = unit.coords.iter().filter(|c| !c.is_zero()).count();
        assert_eq!(nonzero, 3);
        assert_eq!(m3.render(unit), "E_1_1 + E_2_2 + E_3_3");
    }

    #[test]
    fn xy_presentation_relations() {
        let p2 = make_matrix_xy(2, &q()).unwrap();
        assert_eq!(p2.q, q().from_integer(-1));
        let xy = p2.category.compose(&p2.x, &p2.y).unwrap();
        let yx = p2.category.compose(&p2.y, &p2.x).unwrap();
        let minus_one = q().from_integer(-1);
        assert_eq!(yx, p2.category.scale(&minus_one, &xy).unwrap());
        // (xy)^2 = q * x^2 y^2 = -1.
        let sq = p2.category.compose(&xy, &xy).unwrap();
        assert_eq!(sq, p2.category.scale(&minus_one, p2.category.one().unwrap()).unwrap());

        let f3 = FieldDescriptor::cyclotomic(3).unwrap();
        let p3 = make_matrix_xy(3, &f3).unwrap();
        let x3 = p3.category.power(&p3.x, 3).unwrap();
        assert_eq!(&x3, p3.category.one().unwrap());
        let y3 = p3.category.power(&p3.y, 3).unwrap();
        assert_eq!(&y3, p3.category.one().unwrap());
        // yx = q xy.
        let xy = p3.category.compose(&p3.x, &p3.y).unwrap();
        let yx = p3.category.compose(&p3.y, &p3.x).unwrap();
        assert_eq!(yx, p3.category.scale(&p3.q, &xy).unwrap());
    }

    #[test]
    fn xy_presentation_is_isomorphic_to_matrix_units() {
        for (n, field) in [
            (2, q()),
            (3, FieldDescriptor::cyclotomic(3).unwrap()),
            (4, FieldDescriptor::cyclotomic(4).unwrap()),
        ] {
            let p = make_matrix_xy(n, &field).unwrap();
            // Construction verifies unitality and multiplicativity.
            let iso = xy_to_matrix_units(&p).unwrap();
            assert!(iso.is_bijective().unwrap(), "n = {n}");
        }
    }

    #[test]
    fn triangular_algebra_shape() {
        let t3 = make_triangular(3, &q()).unwrap();
        assert_eq!(t3.dimension(), 6);
        // E_1_2 . E_2_3 = E_1_3 (maps e_3 -> e_2 -> e_1); the other order is
        // not even present in the basis.
        let prod = t3.compose(&be(&t3, "E_1_2"), &be(&t3, "E_2_3")).unwrap();
        assert_eq!(prod, be(&t3, "E_1_3"));
        assert!(t3.basis_index("E_3_1").is_none());
        assert!(t3.is_zero(&t3.compose(&be(&t3, "E_2_3"), &be(&t3, "E_1_2")).unwrap()));
    }

    #[test]
    fn diagonal_and_group_algebra_products() {
        let k2 = make_diagonal(2, &q()).unwrap();
        let d1 = be(&k2, "d1");
        let d2 = be(&k2, "d2");
        assert!(k2.is_zero(&k2.compose(&d1, &d2).unwrap()));
        assert_eq!(k2.compose(&d1, &d1).unwrap(), d1);

        let c2 = GroupDescriptor::cyclic(2).unwrap();
        let kc2 = make_group_algebra(&c2, &q()).unwrap();
        let t = be(&kc2, "t");
        assert_eq!(&kc2.compose(&t, &t).unwrap(), kc2.one().unwrap());
    }

    #[test]
    fn truncated_polynomials_multiply_and_truncate() {
        let a3 = make_truncated_poly(3, &q()).unwrap();
        let x = be(&a3, "x");
        let x2 = be(&a3, "x^2");
        assert_eq!(a3.compose(&x, &x).unwrap(), x2);
        assert!(a3.is_zero(&a3.compose(&x2, &x).unwrap()));
    }

    #[test]
    fn valuations_on_truncated_polynomials() {
        let a5 = make_truncated_poly(5, &q()).unwrap();
        let x = be(&a5, "x");
        let x2 = be(&a5, "x^2");
        let one = a5.one().unwrap().clone();
        assert_eq!(valuation(&a5, &a5.add(&x, &x2).unwrap()).unwrap(), 1);
        assert_eq!(valuation(&a5, &a5.add(&one, &x).unwrap()).unwrap(), 0);
        // Valuation is additive under products away from the truncation.
        let prod = a5.compose(&x, &x2).unwrap();
        assert_eq!(valuation(&a5, &prod).unwrap(), 3);
        assert_eq!(valuation(&a5, &a5.zero(0, 0)), Err(AlgebraError::ZeroElement));
    }

    #[test]
    fn invertibility_by_left_multiplication_rank() {
        let a5 = make_truncated_poly(5, &q()).unwrap();
        let x = be(&a5, "x");
        let one_plus_x = a5.add(a5.one().unwrap(), &x).unwrap();
        assert!(is_invertible(&a5, &one_plus_x).unwrap());
        assert!(!is_invertible(&a5, &x).unwrap());

        let m2 = make_matrix_algebra(2, &q()).unwrap();
        assert!(!is_invertible(&m2, &be(&m2, "E_1_1")).unwrap());
        assert!(is_invertible(&m2, m2.one().unwrap()).unwrap());
        let swap = m2.add(&be(&m2, "E_1_2"), &be(&m2, "E_2_1")).unwrap();
        assert!(is_invertible(&m2, &swap).unwrap());
    }

    /// The arrow category v1 -> v2: identities plus one connecting morphism.
    fn arrow_category() -> LinearCategory {
        let field = q();
        let basis = vec![
            ("id1".to_string(), 0, 0),
            ("id2".to_string(), 1, 1),
            ("a".to_string(), 0, 1),
        ];
        let mut compose = HashMap::new();
        compose.insert((0, 0), vec![(0, field.one())]);
        compose.insert((1, 1), vec![(1, field.one())]);
        compose.insert((2, 0), vec![(2, field.one())]);
        compose.insert((1, 2), vec![(2, field.one())]);
        LinearCategory::new(
            field.clone(),
            vec!["v1".into(), "v2".into()],
            basis,
            compose,
            vec![vec![(0, field.one())], vec![(1, field.one())]],
        )
        .unwrap()
    }

    #[test]
    fn total_algebra_zeroes_non_composable_pairs() {
        let c = arrow_category();
        let total = total_algebra(&c).unwrap();
        assert_eq!(total.dimension(), 3);
        let a = be(&total, "a");
        // a . a was not composable in the category, so it is zero in the
        // total algebra.
        assert!(total.is_zero(&total.compose(&a, &a).unwrap()));
        let id1 = be(&total, "id1");
        let id2 = be(&total, "id2");
        assert_eq!(total.compose(&a, &id1).unwrap(), a);
        assert_eq!(total.compose(&id2, &a).unwrap(), a);
        assert_eq!(&total.add(&id1, &id2).unwrap(), total.one().unwrap());
    }

    #[test]
    fn quiver_presentation_maps_paths_to_matrix_units() {
        let p2 = quiver_presentation_matrix(2, &q()).unwrap();
        let units = p2.onto.target();
        // y_1 x_1 = e_1 and x_1 x_1 leaves the quiver (zero).
        assert_eq!(p2.eval_path(&[(1, -1), (1, 1)]).unwrap(), be(units, "E_1_1"));
        assert!(units.is_zero(&p2.eval_path(&[(1, 1), (1, 1)]).unwrap()));
        assert!(p2.onto.is_bijective().unwrap());

        let p3 = quiver_presentation_matrix(3, &q()).unwrap();
        let units = p3.onto.target();
        assert_eq!(p3.eval_path(&[(2, 1), (1, 1)]).unwrap(), be(units, "E_3_1"));
        assert!(p3.onto.is_bijective().unwrap());
    }

    #[test]
    fn match_matrix_structure_recovers_a_rescaled_category() {
        // Rescale the matrix units by s(x, y) and present only the structure
        // constants; the gauge search has to undo the rescaling.
        let field = q();
        let n = 3usize;
        let s = |x: usize, y: usize| field.from_integer((1 + x as i64) + 2 * (y as i64) + (x as i64) * (y as i64));
        let objects: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let mut basis = Vec::new();
        for y in 0..n {
            for x in 0..n {
                basis.push((format!("u_{y}_{x}"), x, y));
            }
        }
        let idx = |y: usize, x: usize| y * n + x;
        let mut compose = HashMap::new();
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    let t = s(y, z).mul(&s(x, y)).unwrap().mul(&s(x, z).inv().unwrap()).unwrap();
                    compose.insert((idx(z, y), idx(y, x)), vec![(idx(z, x), t)]);
                }
            }
        }
        let identities: Vec<Vec<(usize, Scalar)>> = (0..n)
            .map(|x| vec![(idx(x, x), s(x, x).inv().unwrap())])
            .collect();
        let c = LinearCategory::new(field, objects, basis, compose, identities).unwrap();
        let iso = match_matrix_structure(&c, n).unwrap();
        assert!(iso.is_bijective().unwrap());
        // u_{y x} maps to a multiple of E_{y+1, x+1}.
        let img = &iso.images()[idx(2, 0)];
        let units = iso.target();
        let pos = units.basis_index("E_3_1").unwrap();
        for (p, coeff) in img.coords.iter().enumerate() {
            assert_eq!(!coeff.is_zero(), p == pos);
        }
    }

    #[test]
    fn match_matrix_structure_rejects_wrong_shapes() {
        // One object with a two-dimensional endomorphism space.
        let k2 = make_diagonal(2, &q()).unwrap();
        assert!(matches!(
            match_matrix_structure(&k2, 2),
            Err(AlgebraError::ShapeMismatch(_))
        ));
        // Right object count but a hom-space of the wrong dimension.
        let c = arrow_category();
        assert!(matches!(
            match_matrix_structure(&c, 2),
            Err(AlgebraError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn characters_diagonalize_small_abelian_group_algebras() {
        // C_2 over Q: t maps to (1, -1).
        let c2 = GroupDescriptor::cyclic(2).unwrap();
        let iso = group_algebra_to_diagonal(&c2, &q()).unwrap();
        assert!(iso.is_bijective().unwrap());
        let t = be(iso.source(), "t");
        let img = iso.apply(&t).unwrap();
        assert_eq!(img.coords, vec![q().one(), q().from_integer(-1)]);

        // C_3 over Q(zeta_3) and C_2 x C_2 over Q.
        let f3 = FieldDescriptor::cyclotomic(3).unwrap();
        let c3 = GroupDescriptor::cyclic(3).unwrap();
        assert!(group_algebra_to_diagonal(&c3, &f3).unwrap().is_bijective().unwrap());
        let v4 = GroupDescriptor::finite_abelian(vec![2, 2]).unwrap();
        assert!(group_algebra_to_diagonal(&v4, &q()).unwrap().is_bijective().unwrap());

        // Missing roots of unity and bad characteristic are rejected.
        assert!(matches!(
            group_algebra_to_diagonal(&c3, &q()),
            Err(AlgebraError::Scalar(_))
        ));
        let f2 = FieldDescriptor::prime(2).unwrap();
        assert!(matches!(
            group_algebra_to_diagonal(&c2, &f2),
            Err(AlgebraError::BadCharacteristic(_))
        ));
    }

    #[test]
    fn construction_rejects_broken_structure() {
        let field = q();
        // Non-associative: a.a = b, a.b = e, b.a = 0.
        let basis = vec![
            ("e".to_string(), 0, 0),
            ("a".to_string(), 0, 0),
            ("b".to_string(), 0, 0),
        ];
        let mut compose = HashMap::new();
        for i in 0..3 {
            compose.insert((0, i), vec![(i, field.one())]);
            compose.insert((i, 0), vec![(i, field.one())]);
        }
        compose.insert((1, 1), vec![(2, field.one())]);
        compose.insert((1, 2), vec![(0, field.one())]);
        let result = LinearCategory::new(
            field.clone(),
            vec!["*".into()],
            basis.clone(),
            compose,
            vec![vec![(0, field.one())]],
        );
        assert!(matches!(result, Err(AlgebraError::NotAssociative(..))));

        // Identity element that only covers half the diagonal algebra.
        let dbasis = vec![("d1".to_string(), 0, 0), ("d2".to_string(), 0, 0)];
        let mut dcompose = HashMap::new();
        dcompose.insert((0, 0), vec![(0, field.one())]);
        dcompose.insert((1, 1), vec![(1, field.one())]);
        let result = LinearCategory::new(
            field.clone(),
            vec!["*".into()],
            dbasis,
            dcompose,
            vec![vec![(0, field.one())]],
        );
        assert!(matches!(result, Err(AlgebraError::BadIdentity(..))));

        // Composition table entry landing in the wrong hom-space.
        let c = arrow_category();
        let mut compose = c.compose.clone();
        compose.insert((2, 2), vec![(0, field.one())]);
        let basis: Vec<(String, usize, usize)> =
            c.basis().iter().map(|b| (b.name.clone(), b.source, b.target)).collect();
        let result = LinearCategory::new(
            field.clone(),
            c.objects().to_vec(),
            basis,
            compose,
            vec![vec![(0, field.one())], vec![(1, field.one())]],
        );
        assert!(matches!(result, Err(AlgebraError::InvalidStructure(_))));
    }

    #[test]
    fn morphism_construction_rejects_non_multiplicative_maps() {
        let c2 = GroupDescriptor::cyclic(2).unwrap();
        let kc2 = make_group_algebra(&c2, &q()).unwrap();
        let k2 = make_diagonal(2, &q()).unwrap();
        let one_img = k2.one().unwrap().clone();
        // t -> d2 alone squares to d2, but t.t = 1 must map to d1 + d2.
        let bad = AlgebraMorphism::new(
            kc2.clone(),
            k2.clone(),
            vec![one_img.clone(), be(&k2, "d2")],
        );
        assert!(matches!(bad, Err(AlgebraError::NotMultiplicative(_))));
        // t -> d1 - d2 is the character morphism and passes.
        let t_img = k2.sub(&be(&k2, "d1"), &be(&k2, "d2")).unwrap();
        let good = AlgebraMorphism::new(kc2, k2, vec![one_img, t_img]).unwrap();
        assert!(good.is_bijective().unwrap());
    }

    #[test]
    fn element_arithmetic_round_trips() {
        let m2 = make_matrix_algebra(2, &q()).unwrap();
        let a = m2
            .element(
                0,
                0,
                vec![
                    q().from_integer(1),
                    q().from_integer(2),
                    q().zero(),
                    q().from_integer(-1),
                ],
            )
            .unwrap();
        assert_eq!(m2.render(&a), "E_1_1 + (2)*E_1_2 + (-1)*E_2_2");
        let diff = m2.sub(&a, &a).unwrap();
        assert!(m2.is_zero(&diff));
        assert_eq!(m2.render(&diff), "0");
        // element_from_terms accumulates repeats.
        let b = m2
            .element_from_terms(&[(0, q().one()), (0, q().one())])
            .unwrap();
        assert_eq!(m2.render(&b), "(2)*E_1_1");
        assert!(m2.element(0, 0, vec![q().one()]).is_err());
    }
}
