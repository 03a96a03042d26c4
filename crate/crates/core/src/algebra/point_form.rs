use super::blade::{self, blade_count, blades, mask_of, ordinal, MetricSignature, DIM, TIME};
use crate::error::{Error, Result};

/// A single k-form value: dense coefficients over the canonical blades of
/// one degree, indexed by colex ordinal.
#[derive(Clone, Debug, PartialEq)]
pub struct PointForm {
    degree: usize,
    coeffs: Vec<f64>,
}

impl PointForm {
    pub fn zero(degree: usize) -> Result<Self> {
        if degree > DIM {
            return Err(Error::DegreeOverflow {
                left: degree,
                right: 0,
            });
        }
        Ok(PointForm {
            degree,
            coeffs: vec![0.0; blade_count(degree)],
        })
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree > DIM || coeffs.len() != blade_count(degree) {
            return Err(Error::Shape(format!(
                "degree {degree} expects {} coefficients, got {}",
                blade_count(degree),
                coeffs.len()
            )));
        }
        Ok(PointForm { degree, coeffs })
    }

    /// `c · e_S` for a single blade.
    pub fn basis(mask: u16, c: f64) -> Self {
        let degree = blade::degree(mask);
        let mut coeffs = vec![0.0; blade_count(degree)];
        coeffs[ordinal(mask)] = c;
        PointForm { degree, coeffs }
    }

    /// Unit blade from axis labels in any order; the sign of sorting them is
    /// absorbed into the coefficient. Repeated labels give the zero form.
    pub fn from_axes(axes: &[usize]) -> Result<Self> {
        let mut f = PointForm::basis(0, 1.0);
        for &a in axes {
            if a >= DIM {
                return Err(Error::InvalidAxis(a));
            }
            f = wedge(&f, &PointForm::basis(1 << a, 1.0))?;
        }
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u16) -> f64 {
        if blade::degree(mask) != self.degree {
            return 0.0;
        }
        self.coeffs[ordinal(mask)]
    }

    pub fn set(&mut self, mask: u16, value: f64) {
        assert_eq!(blade::degree(mask), self.degree);
        self.coeffs[ordinal(mask)] = value;
    }

    /// Nonzero terms as `(blade mask, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (u16, f64)> + '_ {
        let k = self.degree;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(move |(i, &c)| (mask_of(k, i), c))
    }

    pub fn scale(&self, c: f64) -> Self {
        PointForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(PointForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

pub fn wedge(a: &PointForm, b: &PointForm) -> Result<PointForm> {
    if a.degree + b.degree > DIM {
        return Err(Error::DegreeOverflow {
            left: a.degree,
            right: b.degree,
        });
    }
    let mut out = PointForm::zero(a.degree + b.degree)?;
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let s = blade::reorder_sign(ma, mb);
            if s != 0 {
                out.coeffs[ordinal(ma | mb)] += s as f64 * ca * cb;
            }
        }
    }
    Ok(out)
}

pub fn hodge_star(v: &PointForm, sig: &MetricSignature) -> PointForm {
    let mut out = PointForm {
        degree: DIM - v.degree,
        coeffs: vec![0.0; blade_count(DIM - v.degree)],
    };
    for (i, &m) in blades(v.degree).iter().enumerate() {
        let (mc, s) = blade::star_blade(m, sig);
        out.coeffs[ordinal(mc)] = s as f64 * v.coeffs[i];
    }
    out
}

/// Contraction with `∂_t`: `(v⌋∂t)_S = v_{0S}`.
pub fn interior_time(v: &PointForm) -> Result<PointForm> {
    if v.degree == 0 {
        return Err(Error::DegreeUnderflow { needed: 1, got: 0 });
    }
    let mut out = PointForm::zero(v.degree - 1)?;
    for (m, c) in v.terms() {
        if m & (1 << TIME) != 0 {
            // dx^0 is already the leading factor, so no reordering sign
            out.coeffs[ordinal(m & !(1 << TIME))] = c;
        }
    }
    Ok(out)
}

/// `g(u, v)` defined by `u ∧ *v = g(u, v) vol`.
pub fn minkowski_pairing(u: &PointForm, v: &PointForm, sig: &MetricSignature) -> Result<f64> {
    if u.degree != v.degree {
        return Err(Error::DegreeMismatch(u.degree, v.degree));
    }
    Ok(blades(u.degree)
        .iter()
        .enumerate()
        .map(|(i, &m)| sig.alpha_sign(m) as f64 * u.coeffs[i] * v.coeffs[i])
        .sum())
}

/// Unit volume form `dx^0 ∧ ... ∧ dx^10`.
pub fn volume() -> PointForm {
    PointForm::basis(blade::FULL, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ax(a: &[usize]) -> PointForm {
        PointForm::from_axes(a).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let sig = MetricSignature::lorentzian();
        let _ = sig;
        let a = wedge(&ax(&[0]), &ax(&[1])).unwrap();
        let b = wedge(&ax(&[1]), &ax(&[0])).unwrap();
        assert_eq!(a, b.scale(-1.0));
        assert!(wedge(&ax(&[0]), &ax(&[0])).unwrap().is_zero());
        let c = wedge(&ax(&[0, 1, 2]), &ax(&[3, 4, 5, 6, 7])).unwrap();
        assert_eq!(c.coeff(0xff), 1.0);
        assert!(wedge(&ax(&[0, 1, 2, 3, 4, 5]), &ax(&[6, 7, 8, 9, 10, 1])).is_err());
    }

    #[test]
    fn star_examples() {
        let sig = MetricSignature::lorentzian();
        assert_eq!(hodge_star(&PointForm::basis(0, 1.0), &sig), volume());
        let s = hodge_star(&ax(&[0]), &sig);
        assert_eq!(s.coeff(blade::FULL & !1), -1.0);
        assert_eq!(hodge_star(&volume(), &sig), PointForm::basis(0, -1.0));
    }

    #[test]
    fn interior_examples() {
        let r = interior_time(&ax(&[0, 1, 2])).unwrap();
        assert_eq!(r, ax(&[1, 2]));
        assert!(interior_time(&ax(&[1, 2])).unwrap().is_zero());
        let v = ax(&[0, 4]).scale(2.5).add(&ax(&[1, 4]).scale(-3.0)).unwrap();
        assert_eq!(interior_time(&v).unwrap(), ax(&[4]).scale(2.5));
        assert!(interior_time(&PointForm::basis(0, 1.0)).is_err());
    }

    #[test]
    fn pairing_examples() {
        let sig = MetricSignature::lorentzian();
        let s = ax(&[1, 2, 3]);
        let t = ax(&[0, 1, 2]);
        assert_eq!(minkowski_pairing(&s, &s, &sig).unwrap(), 1.0);
        assert_eq!(minkowski_pairing(&t, &t, &sig).unwrap(), -1.0);
        assert_eq!(minkowski_pairing(&s, &ax(&[1, 2, 4]), &sig).unwrap(), 0.0);
        assert!(minkowski_pairing(&s, &ax(&[1]), &sig).is_err());
    }
}
