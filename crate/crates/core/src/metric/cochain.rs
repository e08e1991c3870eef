use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::SimplicialComplex;

/// A discrete k-form: one real value per oriented k-simplex, in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    degree: usize,
    values: DVector<f64>,
    complex_id: u64,
}

impl Cochain {
    pub fn new(complex: &SimplicialComplex, degree: usize, values: Vec<f64>) -> Result<Self> {
        Self::from_vector(complex, degree, DVector::from_vec(values))
    }

    pub fn from_vector(complex: &SimplicialComplex, degree: usize, values: DVector<f64>) -> Result<Self> {
        if degree > complex.dimension() {
            return Err(Error::DegreeOutOfRange {
                degree,
                max: complex.dimension(),
            });
        }
        let expected = complex.num_simplices(degree);
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                degree,
                expected,
                found: values.len(),
            });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("cochain values"));
        }
        Ok(Self {
            degree,
            values,
            complex_id: complex.id(),
        })
    }

    pub fn zeros(complex: &SimplicialComplex, degree: usize) -> Self {
        Self {
            degree,
            values: DVector::zeros(complex.num_simplices(degree)),
            complex_id: complex.id(),
        }
    }

    /// Entries drawn uniformly from [-1, 1).
    pub fn random(complex: &SimplicialComplex, degree: usize, rng: &mut impl Rng) -> Self {
        let n = complex.num_simplices(degree);
        Self {
            degree,
            values: DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)),
            complex_id: complex.id(),
        }
    }

    pub(crate) fn from_parts(degree: usize, values: DVector<f64>, complex_id: u64) -> Self {
        Self {
            degree,
            values,
            complex_id,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn complex_id(&self) -> u64 {
        self.complex_id
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            values: &self.values * a,
            ..self.clone()
        }
    }

    fn check_compatible(&self, other: &Cochain) {
        assert_eq!(self.degree, other.degree, "cochain degree mismatch");
        assert_eq!(self.complex_id, other.complex_id, "cochains from different complexes");
    }

    pub(crate) fn ensure_on(&self, complex_id: u64, degree: usize) -> Result<()> {
        if self.complex_id != complex_id {
            return Err(Error::ComplexMismatch);
        }
        if self.degree != degree {
            return Err(Error::DegreeMismatch {
                expected: degree,
                found: self.degree,
            });
        }
        Ok(())
    }
}

impl Add for &Cochain {
    type Output = Cochain;
    fn add(self, rhs: &Cochain) -> Cochain {
        self.check_compatible(rhs);
        Cochain::from_parts(self.degree, &self.values + &rhs.values, self.complex_id)
    }
}

impl Sub for &Cochain {
    type Output = Cochain;
    fn sub(self, rhs: &Cochain) -> Cochain {
        self.check_compatible(rhs);
        Cochain::from_parts(self.degree, &self.values - &rhs.values, self.complex_id)
    }
}

impl Neg for &Cochain {
    type Output = Cochain;
    fn neg(self) -> Cochain {
        self.scaled(-1.0)
    }
}

impl Mul<&Cochain> for f64 {
    type Output = Cochain;
    fn mul(self, rhs: &Cochain) -> Cochain {
        rhs.scaled(self)
    }
}

/// Cochain JSON: `{"degree": k, "values": [...], "ordering": "canonical"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CochainFile {
    pub degree: usize,
    pub values: Vec<f64>,
    #[serde(default = "canonical")]
    pub ordering: String,
}

fn canonical() -> String {
    "canonical".into()
}

impl CochainFile {
    pub fn from_cochain(c: &Cochain) -> Self {
        Self {
            degree: c.degree(),
            values: c.as_slice().to_vec(),
            ordering: canonical(),
        }
    }

    /// Validates ordering, degree and length against `complex`.
    pub fn to_cochain(&self, complex: &SimplicialComplex) -> Result<Cochain> {
        if self.ordering != "canonical" {
            return Err(Error::InvalidConfig(format!(
                "unsupported ordering '{}'",
                self.ordering
            )));
        }
        Cochain::new(complex, self.degree, self.values.clone())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
