//! Test functionals `G(η)`, `F(η, x)` and `R(η, x, m)`.
//!
//! A functional is a polynomial expression in
//!
//! - pairings `⟨g_i, η⟩` with piecewise-constant `g_i`,
//! - point values `g_i(x)` of the same functions,
//! - the mass argument `m`,
//!
//! where all `g_i` share one [`Partition`]. The same expression evaluates on
//! the simplex by reading `⟨g_i, η⟩` as `s_i · y` and `g_i(x)` as the
//! coefficient of `g_i` on the selected cell.
//!
//! JSON form:
//!
//! ```json
//! {
//!   "id": "mixed",
//!   "arity": "f",
//!   "partition": {"breakpoints": [0, 0.5, 1]},
//!   "functions": [[1, 0], [0.5, 2]],
//!   "expr": {"op": "product", "factors": [{"op": "point", "g": 0}, {"op": "pairing", "g": 1}]}
//! }
//! ```

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use super::discrete::DiscreteMeasure;
use super::partition::{Partition, PiecewiseConstant};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which arguments a functional takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arity {
    /// `G(η)`
    #[serde(rename = "g", alias = "g_of_eta")]
    G,
    /// `F(η, x)`
    #[serde(rename = "f", alias = "f_of_eta_x")]
    F,
    /// `R(η, x, m)`
    #[serde(rename = "r", alias = "r_of_eta_x_m")]
    R,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr<F> {
    Const {
        value: F,
    },
    /// `⟨g, η⟩`
    Pairing {
        g: usize,
    },
    /// `g(x)`
    Point {
        g: usize,
    },
    /// `m`
    Mass,
    Sum {
        terms: Vec<Expr<F>>,
    },
    Product {
        factors: Vec<Expr<F>>,
    },
    Pow {
        base: Box<Expr<F>>,
        exp: u32,
    },
}

impl<F: Real> Expr<F> {
    pub fn constant(value: F) -> Self {
        Expr::Const { value }
    }

    pub fn pairing(g: usize) -> Self {
        Expr::Pairing { g }
    }

    pub fn point(g: usize) -> Self {
        Expr::Point { g }
    }

    pub fn mass() -> Self {
        Expr::Mass
    }

    pub fn pow(self, exp: u32) -> Self {
        Expr::Pow {
            base: Box::new(self),
            exp,
        }
    }

    fn eval(&self, pairings: &[F], point: &[F], mass: F) -> F {
        match self {
            Expr::Const { value } => *value,
            Expr::Pairing { g } => pairings[*g],
            Expr::Point { g } => point[*g],
            Expr::Mass => mass,
            Expr::Sum { terms } => terms
                .iter()
                .fold(F::zero(), |acc, t| acc + t.eval(pairings, point, mass)),
            Expr::Product { factors } => factors
                .iter()
                .fold(F::one(), |acc, t| acc * t.eval(pairings, point, mass)),
            Expr::Pow { base, exp } => base.eval(pairings, point, mass).powi(*exp as i32),
        }
    }

    /// Total polynomial degree.
    pub fn degree(&self) -> u32 {
        match self {
            Expr::Const { .. } => 0,
            Expr::Pairing { .. } | Expr::Point { .. } | Expr::Mass => 1,
            Expr::Sum { terms } => terms.iter().map(Expr::degree).max().unwrap_or(0),
            Expr::Product { factors } => factors.iter().map(Expr::degree).sum(),
            Expr::Pow { base, exp } => base.degree() * exp,
        }
    }

    fn visit(&self, f: &mut impl FnMut(&Expr<F>)) {
        f(self);
        match self {
            Expr::Sum { terms } => terms.iter().for_each(|t| t.visit(f)),
            Expr::Product { factors } => factors.iter().for_each(|t| t.visit(f)),
            Expr::Pow { base, .. } => base.visit(f),
            _ => {}
        }
    }

    fn expand(&self, m: usize) -> Polynomial<F> {
        match self {
            Expr::Const { value } => Polynomial::constant(m, *value),
            Expr::Pairing { g } => Polynomial::variable(m, |k| k.pairing[*g] = 1),
            Expr::Point { g } => Polynomial::variable(m, |k| k.point[*g] = 1),
            Expr::Mass => Polynomial::variable(m, |k| k.mass = 1),
            Expr::Sum { terms } => terms
                .iter()
                .fold(Polynomial::constant(m, F::zero()), |acc, t| {
                    acc.add(&t.expand(m))
                }),
            Expr::Product { factors } => factors
                .iter()
                .fold(Polynomial::constant(m, F::one()), |acc, t| {
                    acc.mul(&t.expand(m))
                }),
            Expr::Pow { base, exp } => {
                let b = base.expand(m);
                (0..*exp).fold(Polynomial::constant(m, F::one()), |acc, _| acc.mul(&b))
            }
        }
    }
}

impl<F: Real> Add for Expr<F> {
    type Output = Expr<F>;

    fn add(self, rhs: Self) -> Self {
        match self {
            Expr::Sum { mut terms } => {
                terms.push(rhs);
                Expr::Sum { terms }
            }
            lhs => Expr::Sum {
                terms: vec![lhs, rhs],
            },
        }
    }
}

impl<F: Real> Mul for Expr<F> {
    type Output = Expr<F>;

    fn mul(self, rhs: Self) -> Self {
        match self {
            Expr::Product { mut factors } => {
                factors.push(rhs);
                Expr::Product { factors }
            }
            lhs => Expr::Product {
                factors: vec![lhs, rhs],
            },
        }
    }
}

/// Exponents of one monomial `Π⟨g_i,η⟩^{a_i} · Π g_i(x)^{b_i} · m^c`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialKey {
    pub pairing: Vec<u32>,
    pub point: Vec<u32>,
    pub mass: u32,
}

#[derive(Clone, Debug)]
struct Polynomial<F> {
    m: usize,
    terms: BTreeMap<MonomialKey, F>,
}

impl<F: Real> Polynomial<F> {
    fn unit_key(m: usize) -> MonomialKey {
        MonomialKey {
            pairing: vec![0; m],
            point: vec![0; m],
            mass: 0,
        }
    }

    fn constant(m: usize, c: F) -> Self {
        let mut terms = BTreeMap::new();
        if c != F::zero() {
            terms.insert(Self::unit_key(m), c);
        }
        Self { m, terms }
    }

    fn variable(m: usize, set: impl FnOnce(&mut MonomialKey)) -> Self {
        let mut key = Self::unit_key(m);
        set(&mut key);
        Self {
            m,
            terms: BTreeMap::from([(key, F::one())]),
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, &c) in &other.terms {
            let e = terms.entry(k.clone()).or_insert(F::zero());
            *e = *e + c;
        }
        terms.retain(|_, c| *c != F::zero());
        Self { m: self.m, terms }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<MonomialKey, F> = BTreeMap::new();
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                let key = MonomialKey {
                    pairing: ka
                        .pairing
                        .iter()
                        .zip(&kb.pairing)
                        .map(|(a, b)| a + b)
                        .collect(),
                    point: ka.point.iter().zip(&kb.point).map(|(a, b)| a + b).collect(),
                    mass: ka.mass + kb.mass,
                };
                let e = terms.entry(key).or_insert(F::zero());
                *e = *e + ca * cb;
            }
        }
        terms.retain(|_, c| *c != F::zero());
        Self { m: self.m, terms }
    }
}

/// A concrete test functional; see the module docs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawFunctional<F>",
    bound(deserialize = "F: Real + Deserialize<'de>")
)]
pub struct TestFunctional<F> {
    id: String,
    arity: Arity,
    partition: Partition<F>,
    functions: Vec<Vec<F>>,
    expr: Expr<F>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "F: Real + Deserialize<'de>"))]
struct RawFunctional<F> {
    id: String,
    arity: Arity,
    partition: Partition<F>,
    functions: Vec<Vec<F>>,
    expr: Expr<F>,
}

impl<F: Real> TryFrom<RawFunctional<F>> for TestFunctional<F> {
    type Error = Error;

    fn try_from(raw: RawFunctional<F>) -> Result<Self> {
        Self::new(raw.id, raw.arity, raw.partition, raw.functions, raw.expr)
    }
}

impl<F: Real> TestFunctional<F> {
    pub fn new(
        id: impl Into<String>,
        arity: Arity,
        partition: Partition<F>,
        functions: Vec<Vec<F>>,
        expr: Expr<F>,
    ) -> Result<Self> {
        let k = partition.cells();
        for f in &functions {
            if f.len() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    found: f.len(),
                });
            }
            if f.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidFunctional(
                    "coefficients must be finite".into(),
                ));
            }
        }
        let mut problem = None;
        expr.visit(&mut |e| {
            let msg = match e {
                Expr::Const { value } if !value.is_finite() => {
                    Some("non-finite constant".to_string())
                }
                Expr::Pairing { g } | Expr::Point { g } if *g >= functions.len() => {
                    Some(format!("function index {g} out of range"))
                }
                Expr::Point { .. } if arity == Arity::G => {
                    Some("point value g(x) needs arity f or r".to_string())
                }
                Expr::Mass if arity != Arity::R => Some("mass argument needs arity r".to_string()),
                _ => None,
            };
            if problem.is_none() {
                problem = msg;
            }
        });
        if let Some(msg) = problem {
            return Err(Error::InvalidFunctional(msg));
        }
        Ok(Self {
            id: id.into(),
            arity,
            partition,
            functions,
            expr,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn partition(&self) -> &Partition<F> {
        &self.partition
    }

    pub fn functions(&self) -> &[Vec<F>] {
        &self.functions
    }

    pub fn function(&self, i: usize) -> PiecewiseConstant<F> {
        PiecewiseConstant::new(self.partition.clone(), self.functions[i].clone())
            .expect("validated at construction")
    }

    pub fn expr(&self) -> &Expr<F> {
        &self.expr
    }

    pub fn degree(&self) -> u32 {
        self.expr.degree()
    }

    /// `⟨g_i, η⟩` for every function.
    pub fn pairings(&self, eta: &DiscreteMeasure<F>) -> Vec<F> {
        self.pairings_on_cells(&self.partition.cell_masses(eta))
    }

    /// `s_i · y` for every coefficient vector.
    pub fn pairings_on_cells(&self, y: &[F]) -> Vec<F> {
        self.functions
            .iter()
            .map(|s| s.iter().zip(y).fold(F::zero(), |acc, (&c, &v)| acc + c * v))
            .collect()
    }

    /// Evaluates with precomputed pairings, the cell of `x` (if any) and `m`.
    pub fn eval_with(&self, pairings: &[F], cell: Option<usize>, mass: F) -> F {
        match cell {
            Some(c) => {
                let point: Vec<F> = self.functions.iter().map(|s| s[c]).collect();
                self.expr.eval(pairings, &point, mass)
            }
            None => self.expr.eval(pairings, &[], mass),
        }
    }

    /// `G(η)`.
    pub fn eval_g(&self, eta: &DiscreteMeasure<F>) -> F {
        self.eval_with(&self.pairings(eta), None, F::zero())
    }

    /// `F(η, x)`.
    pub fn eval_f(&self, eta: &DiscreteMeasure<F>, x: F) -> F {
        self.eval_with(
            &self.pairings(eta),
            Some(self.partition.cell_of(x)),
            F::zero(),
        )
    }

    /// `R(η, x, m)`.
    pub fn eval_r(&self, eta: &DiscreteMeasure<F>, x: F, m: F) -> F {
        self.eval_with(&self.pairings(eta), Some(self.partition.cell_of(x)), m)
    }

    /// `∫ dη(x) F(η, x)`, or `∫ dη(x) R(η, x, η({x}))` for arity `r`,
    /// computed exactly as a sum over atoms.
    pub fn integrate_over_atoms(&self, eta: &DiscreteMeasure<F>) -> F {
        let pairings = self.pairings(eta);
        let with_mass = self.arity == Arity::R;
        // F is constant on cells, so group atoms by cell unless R needs each mass.
        if !with_mass {
            let cells = self.partition.cell_masses(eta);
            return cells
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != F::zero())
                .fold(F::zero(), |acc, (c, &w)| {
                    acc + w * self.eval_with(&pairings, Some(c), F::zero())
                });
        }
        eta.atoms().iter().fold(F::zero(), |acc, a| {
            // Locations are distinct, so η({x}) at an atom is its own mass.
            let c = self.partition.cell_of(a.location);
            acc + a.mass * self.eval_with(&pairings, Some(c), a.mass)
        })
    }

    /// Expands the expression into monomials.
    pub fn monomials(&self) -> Vec<(MonomialKey, F)> {
        self.expr
            .expand(self.functions.len())
            .terms
            .into_iter()
            .collect()
    }
}
