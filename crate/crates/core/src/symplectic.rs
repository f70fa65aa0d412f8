//! Constant symplectic and presymplectic forms on `Qⁿ`.
//!
//! A form is stored by its matrix `Ω`, with `Ω(v, w) = vᵀ Ω w`. With the canonical
//! matrix `[[0, I], [-I, 0]]` on coordinates `(q, p)` this is `dq ∧ dp`, the flat of `∂/∂q`
//! is `dp`, and the Hamiltonian field of `H` has `q̇ = ∂H/∂p`, `ṗ = -∂H/∂q`.

use num_traits::{One, Zero};

use crate::error::{dim_check, Error, Result};
use crate::linalg::rational::{axpy, dot, scale, Rational, Vector};
use crate::linalg::{AffineSubspace, Matrix, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticSpace {
    omega: Matrix,
    poisson: Matrix,
}

impl SymplecticSpace {
    pub fn new(omega: Matrix) -> Result<Self> {
        if !omega.is_skew() {
            return Err(Error::Invalid("symplectic matrix is not skew".into()));
        }
        let inv = omega
            .transpose()
            .inverse()
            .ok_or_else(|| Error::Degenerate("symplectic matrix is singular".into()))?;
        Ok(SymplecticSpace {
            omega,
            poisson: inv,
        })
    }

    /// `Q²ⁿ` with coordinates `(q, p)` and `Ω = dq ∧ dp`.
    pub fn canonical(n: usize) -> Self {
        let mut j = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = Rational::one();
            j[(n + i, i)] = -Rational::one();
        }
        SymplecticSpace {
            poisson: j.clone(),
            omega: j,
        }
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    /// `Π = (Ωᵀ)⁻¹`, so that `{F, G} = dFᵀ Π dG`.
    pub fn poisson_tensor(&self) -> &Matrix {
        &self.poisson
    }

    pub fn pairing(&self, v: &[Rational], w: &[Rational]) -> Rational {
        dot(v, &self.omega.mul_vec(w))
    }

    /// `Ω♭(v) = Ω(v, ·)`
    pub fn flat(&self, v: &[Rational]) -> Vector {
        self.omega.left_mul_vec(v)
    }

    pub fn sharp(&self, a: &[Rational]) -> Vector {
        self.poisson.mul_vec(a)
    }

    pub fn omega_orthogonal(&self, w: &Subspace) -> Subspace {
        let rows: Vec<Vector> = w.basis().iter().map(|b| self.omega.mul_vec(b)).collect();
        Subspace::solutions_of(self.dim(), &rows)
    }

    pub fn pullback(&self, v: &Subspace) -> PresymplecticForm {
        let b = v.basis_matrix();
        let form = b.transpose().mul(&self.omega).mul(&b);
        PresymplecticForm {
            carrier: v.clone(),
            form,
        }
    }

    /// Adapted basis of `V°` whose Hamiltonian fields pair as `[[0, I, 0], [-I, 0, 0], [0, 0, 0]]`.
    pub fn canonical_basis(&self, v: &Subspace) -> CanonicalBasis {
        let alphas = v.annihilator().basis().to_vec();
        let fields: Vec<Vector> = alphas.iter().map(|a| self.sharp(a)).collect();
        let (es, fs, rest) = symplectic_gram_schmidt(fields, |x, y| self.pairing(x, y));
        let s = es.len();
        let mut ordered = es;
        ordered.extend(fs);
        ordered.extend(rest);
        let alphas = ordered.iter().map(|x| self.flat(x)).collect();
        CanonicalBasis {
            alphas,
            fields: ordered,
            s,
        }
    }

    /// Solutions `X ∈ V` of `(i_X Ω)|_V = β|_V`, or `None` when `β` does not vanish on `V ∩ V^Ω`.
    pub fn solve_presymplectic(&self, v: &Subspace, beta: &[Rational]) -> Option<AffineSubspace> {
        assert_eq!(beta.len(), self.dim(), "covector length");
        let cb = self.canonical_basis(v);
        let s = cb.s;
        let r = cb.fields.len();
        // The field pairing is canonical, so the multiplier system decouples.
        let b_of: Vec<Rational> = cb.fields.iter().map(|x| dot(beta, x)).collect();
        if b_of[2 * s..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = self.sharp(beta);
        for i in 0..s {
            axpy(&mut x, &b_of[i], &cb.fields[s + i]);
            axpy(&mut x, &-&b_of[s + i], &cb.fields[i]);
        }
        let dir = Subspace::span(self.dim(), &cb.fields[2 * s..r]);
        Some(AffineSubspace::new(x, dir))
    }
}

/// Pairs `(e_k, f_k)` with `ω(e_k, f_k) = 1`, all other pairings zero, plus the kernel remainder.
/// Pivots on the first nonzero pairing in input order.
pub(crate) fn symplectic_gram_schmidt<F>(
    mut vs: Vec<Vector>,
    pairing: F,
) -> (Vec<Vector>, Vec<Vector>, Vec<Vector>)
where
    F: Fn(&[Rational], &[Rational]) -> Rational,
{
    let mut es = Vec::new();
    let mut fs = Vec::new();
    loop {
        let hit = (0..vs.len()).find_map(|a| {
            (0..vs.len())
                .find(|&b| b != a && !pairing(&vs[a], &vs[b]).is_zero())
                .map(|b| (a, b))
        });
        let Some((a, b)) = hit else { break };
        let e = vs[a].clone();
        let w = pairing(&e, &vs[b]);
        let f = scale(&(Rational::one() / w), &vs[b]);
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        vs.remove(hi);
        vs.remove(lo);
        for x in vs.iter_mut() {
            let xf = pairing(x, &f);
            let xe = pairing(x, &e);
            axpy(x, &-xf, &e);
            axpy(x, &xe, &f);
        }
        es.push(e);
        fs.push(f);
    }
    (es, fs, vs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalBasis {
    /// Covectors spanning `V°`, ordered `e`-duals, `f`-duals, then kernel duals.
    pub alphas: Vec<Vector>,
    /// `alphas[i]^♯`
    pub fields: Vec<Vector>,
    pub s: usize,
}

impl CanonicalBasis {
    pub fn pairing_matrix(&self, space: &SymplecticSpace) -> Matrix {
        let r = self.fields.len();
        let mut m = Matrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                m[(i, j)] = space.pairing(&self.fields[i], &self.fields[j]);
            }
        }
        m
    }

    pub fn expected_pairing(r: usize, s: usize) -> Matrix {
        let mut m = Matrix::zeros(r, r);
        for i in 0..s {
            m[(i, s + i)] = Rational::one();
            m[(s + i, i)] = -Rational::one();
        }
        m
    }

    /// Fields spanning `V ∩ V^Ω`.
    pub fn kernel_fields(&self) -> &[Vector] {
        &self.fields[2 * self.s..]
    }
}

/// Constant skew form on a subspace, stored in the carrier's canonical basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PresymplecticForm {
    carrier: Subspace,
    form: Matrix,
}

impl PresymplecticForm {
    pub fn new(carrier: Subspace, form: Matrix) -> Result<Self> {
        dim_check(form.rows() == carrier.dim() && form.is_square(), || {
            format!(
                "form is {}x{} on a carrier of dimension {}",
                form.rows(),
                form.cols(),
                carrier.dim()
            )
        })?;
        if !form.is_skew() {
            return Err(Error::Invalid("presymplectic form is not skew".into()));
        }
        Ok(PresymplecticForm { carrier, form })
    }

    /// Form given by an ambient skew matrix on all of `Qⁿ`.
    pub fn on_full_space(form: Matrix) -> Result<Self> {
        let n = form.rows();
        PresymplecticForm::new(Subspace::full(n), form)
    }

    pub fn carrier(&self) -> &Subspace {
        &self.carrier
    }

    pub fn matrix(&self) -> &Matrix {
        &self.form
    }

    pub fn ambient_dim(&self) -> usize {
        self.carrier.ambient_dim()
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    pub fn is_symplectic(&self) -> bool {
        self.rank() == self.carrier.dim()
    }

    /// Evaluates on carrier vectors given in ambient coordinates.
    pub fn eval(&self, v: &[Rational], w: &[Rational]) -> Result<Rational> {
        let cv = self.coords(v)?;
        let cw = self.coords(w)?;
        Ok(dot(&cv, &self.form.mul_vec(&cw)))
    }

    fn coords(&self, v: &[Rational]) -> Result<Vector> {
        self.carrier
            .coordinates(v)
            .ok_or_else(|| Error::Invalid("vector is not in the carrier of the form".into()))
    }

    /// `ker ω` in ambient coordinates.
    pub fn kernel(&self) -> Subspace {
        let b = self.carrier.basis_matrix();
        let k = Subspace::kernel_of(&self.form);
        k.image(&b)
    }

    /// `{X ∈ carrier | ω(X, w) = 0 for all w ∈ W}`; `W` must lie in the carrier.
    pub fn orthogonal(&self, w: &Subspace) -> Result<Subspace> {
        let k = self.carrier.dim();
        let mut rows = Vec::with_capacity(w.dim());
        for b in w.basis() {
            let c = self.coords(b)?;
            rows.push(self.form.mul_vec(&c));
        }
        let t = Subspace::solutions_of(k, &rows);
        Ok(t.image(&self.carrier.basis_matrix()))
    }

    /// Restriction to a subspace of the carrier.
    pub fn restrict(&self, w: &Subspace) -> Result<PresymplecticForm> {
        let mut coords = Vec::with_capacity(w.dim());
        for b in w.basis() {
            coords.push(self.coords(b)?);
        }
        let c = Matrix::from_columns(self.carrier.dim(), &coords);
        let form = c.transpose().mul(&self.form).mul(&c);
        PresymplecticForm::new(w.clone(), form)
    }

    /// Ambient skew matrix whose restriction to the carrier is this form.
    pub fn lift(&self) -> Matrix {
        let n = self.ambient_dim();
        let k = self.carrier.dim();
        let mut sel = Matrix::zeros(k, n);
        for (j, &p) in self.carrier.pivots().iter().enumerate() {
            sel[(j, p)] = Rational::one();
        }
        sel.transpose().mul(&self.form).mul(&sel)
    }

    /// The covector `ω(v, ·)` on the carrier, extended by zero along the non-pivot coordinates.
    pub fn flat(&self, v: &[Rational]) -> Result<Vector> {
        let _ = self.coords(v)?;
        Ok(self.lift().left_mul_vec(v))
    }

    pub fn zero_on(carrier: Subspace) -> Self {
        let k = carrier.dim();
        PresymplecticForm {
            carrier,
            form: Matrix::zeros(k, k),
        }
    }
}
