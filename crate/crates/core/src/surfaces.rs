//! Unions of parallel planes, concentric spheres and concentric cylinders.
//!
//! Planes are `z = c`, spheres are centered at the origin and cylinders
//! share the z-axis. Each sheet is the zero set of a polynomial `h`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An exact point of space.
pub type ExactPoint = [BigRational; 3];

/// Newton projection iteration cap.
const PROJECT_MAX_ITERATIONS: usize = 50;
/// Rejection-sampling attempts per configuration.
const SAMPLING_ATTEMPTS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("a surface needs at least one sheet")]
    NoSheets,
    #[error("sheet parameters must be pairwise distinct")]
    DuplicateSheets,
    #[error("radius {0} is not positive")]
    NonPositiveRadius(String),
    #[error("sheet {sheet} does not exist (surface has {count})")]
    InvalidSheet { sheet: usize, count: usize },
    #[error("projection onto the sheet did not converge")]
    NoConvergence,
    #[error("could not place {0} well-separated points after repeated attempts")]
    SamplingFailed(usize),
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Planes,
    Spheres,
    Cylinders,
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceKind::Planes => "planes",
            SurfaceKind::Spheres => "spheres",
            SurfaceKind::Cylinders => "cylinders",
        })
    }
}

impl FromStr for SurfaceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "planes" => Ok(SurfaceKind::Planes),
            "spheres" => Ok(SurfaceKind::Spheres),
            "cylinders" => Ok(SurfaceKind::Cylinders),
            other => Err(format!("unknown surface kind {other:?}")),
        }
    }
}

/// Parses `"3"`, `"-3/2"` or `"0.25"` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, SurfaceError> {
    let t = text.trim();
    let err = || SurfaceError::Parse(text.to_string());
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        let numer: BigInt = digits.parse().map_err(|_| err())?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = BigRational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    let value: BigRational = t.parse().map_err(|_| err())?;
    Ok(value)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A family of sheets of one kind: plane offsets along z, or radii.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceFamily {
    kind: SurfaceKind,
    params: Vec<BigRational>,
}

/// A point with the sheet it lies on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfacePoint {
    pub coords: ExactPoint,
    pub sheet: usize,
}

impl SurfaceFamily {
    pub fn new(kind: SurfaceKind, params: Vec<BigRational>) -> Result<Self, SurfaceError> {
        if params.is_empty() {
            return Err(SurfaceError::NoSheets);
        }
        for (i, p) in params.iter().enumerate() {
            if params[..i].contains(p) {
                return Err(SurfaceError::DuplicateSheets);
            }
            if kind != SurfaceKind::Planes && !p.is_positive() {
                return Err(SurfaceError::NonPositiveRadius(p.to_string()));
            }
        }
        Ok(SurfaceFamily { kind, params })
    }

    /// Builds a family from rational strings such as `"3/2"`.
    pub fn parse(kind: SurfaceKind, params: &[&str]) -> Result<Self, SurfaceError> {
        let params = params.iter().map(|p| parse_rational(p)).collect::<Result<Vec<_>, _>>()?;
        SurfaceFamily::new(kind, params)
    }

    pub fn planes(offsets: &[i64]) -> Result<Self, SurfaceError> {
        SurfaceFamily::new(SurfaceKind::Planes, offsets.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn spheres(radii: &[i64]) -> Result<Self, SurfaceError> {
        SurfaceFamily::new(SurfaceKind::Spheres, radii.iter().map(|&r| BigRational::from_integer(r.into())).collect())
    }

    pub fn cylinders(radii: &[i64]) -> Result<Self, SurfaceError> {
        SurfaceFamily::new(SurfaceKind::Cylinders, radii.iter().map(|&r| BigRational::from_integer(r.into())).collect())
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn params(&self) -> &[BigRational] {
        &self.params
    }

    pub fn sheet_count(&self) -> usize {
        self.params.len()
    }

    /// Dimension of the isometries of space preserving every sheet.
    pub fn ambient_dof(&self) -> usize {
        match self.kind {
            SurfaceKind::Planes | SurfaceKind::Spheres => 3,
            SurfaceKind::Cylinders => 2,
        }
    }

    /// Length scale used for tolerances: the largest parameter magnitude,
    /// at least 1.
    pub fn scale(&self) -> f64 {
        self.params.iter().map(|p| to_f64(p).abs()).fold(1.0, f64::max)
    }

    fn check_sheet(&self, sheet: usize) -> Result<&BigRational, SurfaceError> {
        self.params.get(sheet).ok_or(SurfaceError::InvalidSheet { sheet, count: self.params.len() })
    }

    /// Exact residual `h(q)` of the sheet equation.
    pub fn h_value(&self, sheet: usize, q: &ExactPoint) -> Result<BigRational, SurfaceError> {
        let p = self.check_sheet(sheet)?;
        let [x, y, z] = q;
        Ok(match self.kind {
            SurfaceKind::Planes => z - p,
            SurfaceKind::Spheres => x * x + y * y + z * z - p * p,
            SurfaceKind::Cylinders => x * x + y * y - p * p,
        })
    }

    /// Exact gradient of `h` at `q`.
    pub fn h_gradient(&self, sheet: usize, q: &ExactPoint) -> Result<ExactPoint, SurfaceError> {
        self.check_sheet(sheet)?;
        let two = BigRational::from_integer(2.into());
        let [x, y, z] = q;
        Ok(match self.kind {
            SurfaceKind::Planes => [BigRational::zero(), BigRational::zero(), BigRational::one()],
            SurfaceKind::Spheres => [&two * x, &two * y, &two * z],
            SurfaceKind::Cylinders => [&two * x, &two * y, BigRational::zero()],
        })
    }

    pub fn h_value_f64(&self, sheet: usize, q: &[f64; 3]) -> Result<f64, SurfaceError> {
        let p = to_f64(self.check_sheet(sheet)?);
        let [x, y, z] = *q;
        Ok(match self.kind {
            SurfaceKind::Planes => z - p,
            SurfaceKind::Spheres => x * x + y * y + z * z - p * p,
            SurfaceKind::Cylinders => x * x + y * y - p * p,
        })
    }

    pub fn h_gradient_f64(&self, sheet: usize, q: &[f64; 3]) -> Result<[f64; 3], SurfaceError> {
        self.check_sheet(sheet)?;
        let [x, y, z] = *q;
        Ok(match self.kind {
            SurfaceKind::Planes => [0.0, 0.0, 1.0],
            SurfaceKind::Spheres => [2.0 * x, 2.0 * y, 2.0 * z],
            SurfaceKind::Cylinders => [2.0 * x, 2.0 * y, 0.0],
        })
    }

    /// The rational point of a sheet with parameters `(s, t)`: `(s, t, c)` on
    /// a plane; on a cylinder angle parameter `s` and height `t`; on a sphere
    /// longitude parameter `s` and latitude parameter `t`. Angles use the
    /// tangent half-angle map `s -> ((1 - s^2) / (1 + s^2), 2s / (1 + s^2))`.
    pub fn point_from_parameters(&self, sheet: usize, s: &BigRational, t: &BigRational) -> Result<ExactPoint, SurfaceError> {
        let p = self.check_sheet(sheet)?.clone();
        Ok(match self.kind {
            SurfaceKind::Planes => [s.clone(), t.clone(), p],
            SurfaceKind::Cylinders => {
                let (c, si) = half_angle(s);
                [&p * c, &p * si, t.clone()]
            }
            SurfaceKind::Spheres => {
                let (c1, s1) = half_angle(s);
                let (c2, s2) = half_angle(t);
                [&p * &c1 * &c2, &p * &s1 * &c2, &p * s2]
            }
        })
    }

    /// A random rational point on `sheet`.
    pub fn sample_point<R: Rng + ?Sized>(&self, sheet: usize, rng: &mut R) -> Result<SurfacePoint, SurfaceError> {
        let p = self.check_sheet(sheet)?;
        let three = BigRational::from_integer(3.into());
        let (s, t) = match self.kind {
            SurfaceKind::Planes => {
                let two = BigRational::from_integer(2.into());
                (random_rational(rng, &two), random_rational(rng, &two))
            }
            SurfaceKind::Cylinders => {
                let height = p.abs() * BigRational::from_integer(2.into());
                (random_rational(rng, &three), random_rational(rng, &height))
            }
            SurfaceKind::Spheres => (random_rational(rng, &three), random_rational(rng, &three)),
        };
        Ok(SurfacePoint { coords: self.point_from_parameters(sheet, &s, &t)?, sheet })
    }

    /// One random point per vertex on its assigned sheet. Configurations with
    /// two points closer than `1e-3` times the scale, or with two points of a
    /// sphere antipodal, are redrawn.
    pub fn sample_configuration<R: Rng + ?Sized>(
        &self,
        assignment: &[usize],
        rng: &mut R,
    ) -> Result<Vec<ExactPoint>, SurfaceError> {
        for &sheet in assignment {
            self.check_sheet(sheet)?;
        }
        let min_distance = 1e-3 * self.scale();
        'attempt: for _ in 0..SAMPLING_ATTEMPTS {
            let mut points: Vec<ExactPoint> = Vec::with_capacity(assignment.len());
            let mut floats: Vec<[f64; 3]> = Vec::with_capacity(assignment.len());
            for &sheet in assignment {
                let q = self.sample_point(sheet, rng)?.coords;
                let qf = q.clone().map(|c| to_f64(&c));
                for (other, of) in points.iter().zip(&floats) {
                    let d = ((qf[0] - of[0]).powi(2) + (qf[1] - of[1]).powi(2) + (qf[2] - of[2]).powi(2)).sqrt();
                    let antipodal = self.kind == SurfaceKind::Spheres && (0..3).all(|i| q[i] == -other[i].clone());
                    if d < min_distance || antipodal {
                        continue 'attempt;
                    }
                }
                points.push(q);
                floats.push(qf);
            }
            return Ok(points);
        }
        Err(SurfaceError::SamplingFailed(assignment.len()))
    }

    /// Newton projection of `q` onto `sheet` along the gradient direction.
    pub fn project(&self, sheet: usize, q: [f64; 3]) -> Result<[f64; 3], SurfaceError> {
        let tolerance = 1e-12 * self.scale();
        let mut q = q;
        for _ in 0..PROJECT_MAX_ITERATIONS {
            let h = self.h_value_f64(sheet, &q)?;
            if h.abs() <= tolerance {
                return Ok(q);
            }
            let g = self.h_gradient_f64(sheet, &q)?;
            let norm2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if norm2 == 0.0 || !norm2.is_finite() {
                return Err(SurfaceError::NoConvergence);
            }
            for i in 0..3 {
                q[i] -= h * g[i] / norm2;
            }
        }
        Err(SurfaceError::NoConvergence)
    }
}

fn half_angle(s: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let s2 = s * s;
    let denom = &one + &s2;
    ((&one - &s2) / &denom, (s * BigRational::from_integer(2.into())) / denom)
}

/// `num / den` with `den` in `1..=64` and `|num / den| <= bound`.
fn random_rational<R: Rng + ?Sized>(rng: &mut R, bound: &BigRational) -> BigRational {
    let den: i64 = rng.random_range(1..=64);
    let limit = (bound * BigRational::from_integer(den.into())).floor().to_integer().to_i64().unwrap_or(i64::MAX / 2);
    let num: i64 = rng.random_range(-limit..=limit);
    BigRational::new(num.into(), den.into())
}

/// Wire form `{"kind": "cylinders", "params": ["1", "3/2"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceJson {
    pub kind: SurfaceKind,
    pub params: Vec<String>,
}

impl From<&SurfaceFamily> for SurfaceJson {
    fn from(s: &SurfaceFamily) -> Self {
        SurfaceJson { kind: s.kind, params: s.params.iter().map(|p| p.to_string()).collect() }
    }
}

impl TryFrom<SurfaceJson> for SurfaceFamily {
    type Error = SurfaceError;

    fn try_from(json: SurfaceJson) -> Result<Self, Self::Error> {
        let params = json.params.iter().map(|p| parse_rational(p)).collect::<Result<Vec<_>, _>>()?;
        SurfaceFamily::new(json.kind, params)
    }
}

impl Serialize for SurfaceFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SurfaceJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SurfaceFamily {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        SurfaceFamily::try_from(SurfaceJson::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(x: &str) -> BigRational {
        parse_rational(x).unwrap()
    }

    fn pt(x: i64, y: i64, z: i64) -> ExactPoint {
        [x, y, z].map(|c| BigRational::from_integer(c.into()))
    }

    #[test]
    fn parsing() {
        assert_eq!(q("3/2"), BigRational::new(3.into(), 2.into()));
        assert_eq!(q("-0.25"), BigRational::new((-1).into(), 4.into()));
        assert_eq!(q("7"), BigRational::from_integer(7.into()));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn residuals() {
        let cyl = SurfaceFamily::cylinders(&[1]).unwrap();
        assert_eq!(cyl.h_value(0, &pt(1, 0, 5)).unwrap(), q("0"));
        let sph = SurfaceFamily::spheres(&[2]).unwrap();
        assert_eq!(sph.h_value(0, &pt(0, 0, 1)).unwrap(), q("-3"));
        let pla = SurfaceFamily::planes(&[0]).unwrap();
        assert_eq!(pla.h_value(0, &pt(3, 4, 0)).unwrap(), q("0"));
        assert!(matches!(pla.h_value(1, &pt(0, 0, 0)), Err(SurfaceError::InvalidSheet { .. })));
    }

    #[test]
    fn gradients() {
        let cyl = SurfaceFamily::cylinders(&[1]).unwrap();
        assert_eq!(cyl.h_gradient(0, &pt(1, 0, 5)).unwrap(), pt(2, 0, 0));
        let sph = SurfaceFamily::spheres(&[2]).unwrap();
        assert_eq!(sph.h_gradient(0, &pt(0, 0, 2)).unwrap(), pt(0, 0, 4));
        let pla = SurfaceFamily::planes(&[0]).unwrap();
        assert_eq!(pla.h_gradient(0, &pt(7, -3, 0)).unwrap(), pt(0, 0, 1));
    }

    #[test]
    fn ambient_dof() {
        assert_eq!(SurfaceFamily::cylinders(&[1]).unwrap().ambient_dof(), 2);
        assert_eq!(SurfaceFamily::spheres(&[1, 2]).unwrap().ambient_dof(), 3);
        assert_eq!(SurfaceFamily::planes(&[0]).unwrap().ambient_dof(), 3);
    }

    #[test]
    fn invalid_families() {
        assert_eq!(SurfaceFamily::planes(&[]), Err(SurfaceError::NoSheets));
        assert_eq!(SurfaceFamily::spheres(&[1, 1]), Err(SurfaceError::DuplicateSheets));
        assert!(matches!(SurfaceFamily::cylinders(&[0]), Err(SurfaceError::NonPositiveRadius(_))));
        assert!(SurfaceFamily::planes(&[-1, 0]).is_ok());
    }

    #[test]
    fn parametrized_points() {
        let cyl = SurfaceFamily::cylinders(&[1]).unwrap();
        assert_eq!(cyl.point_from_parameters(0, &q("0"), &q("0")).unwrap(), pt(1, 0, 0));
        assert_eq!(cyl.point_from_parameters(0, &q("1"), &q("2")).unwrap(), pt(0, 1, 2));
        let sph = SurfaceFamily::spheres(&[1]).unwrap();
        let p = sph.point_from_parameters(0, &q("1"), &q("0")).unwrap();
        assert_eq!(&p[0] * &p[0] + &p[1] * &p[1] + &p[2] * &p[2], q("1"));
    }

    #[test]
    fn samples_lie_exactly_on_sheets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let families = [
            SurfaceFamily::planes(&[0, 1]).unwrap(),
            SurfaceFamily::parse(SurfaceKind::Spheres, &["1", "2"]).unwrap(),
            SurfaceFamily::parse(SurfaceKind::Cylinders, &["1", "3/2"]).unwrap(),
        ];
        for family in &families {
            for i in 0..1000 {
                let sheet = i % 2;
                let p = family.sample_point(sheet, &mut rng).unwrap();
                assert!(family.h_value(sheet, &p.coords).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn configurations_are_separated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = SurfaceFamily::spheres(&[1]).unwrap();
        let points = s.sample_configuration(&[0; 8], &mut rng).unwrap();
        for i in 0..8 {
            for j in 0..i {
                assert_ne!(points[i], points[j]);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let cyl = SurfaceFamily::cylinders(&[1]).unwrap();
        let p = cyl.project(0, [1.1, 0.0, 3.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1] == 0.0 && p[2] == 3.0);
        let pla = SurfaceFamily::planes(&[0]).unwrap();
        assert_eq!(pla.project(0, [0.3, -2.0, 0.5]).unwrap(), [0.3, -2.0, 0.0]);
        let sph = SurfaceFamily::spheres(&[1]).unwrap();
        assert_eq!(sph.project(0, [0.0, 0.0, 0.0]), Err(SurfaceError::NoConvergence));
    }

    #[test]
    fn json_round_trip() {
        let s = SurfaceFamily::parse(SurfaceKind::Cylinders, &["1", "3/2"]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"kind":"cylinders","params":["1","3/2"]}"#);
        assert_eq!(serde_json::from_str::<SurfaceFamily>(&text).unwrap(), s);
    }

    fn family_strategy() -> impl Strategy<Value = SurfaceFamily> {
        prop_oneof![
            Just(SurfaceFamily::planes(&[0, 1]).unwrap()),
            Just(SurfaceFamily::parse(SurfaceKind::Spheres, &["1", "5/2"]).unwrap()),
            Just(SurfaceFamily::parse(SurfaceKind::Cylinders, &["1/2", "2"]).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn gradient_matches_finite_differences(
            family in family_strategy(),
            sheet in 0usize..2,
            x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0,
        ) {
            let p = [x, y, z];
            let g = family.h_gradient_f64(sheet, &p).unwrap();
            let step = 1e-5;
            for i in 0..3 {
                let mut plus = p;
                let mut minus = p;
                plus[i] += step;
                minus[i] -= step;
                let fd = (family.h_value_f64(sheet, &plus).unwrap() - family.h_value_f64(sheet, &minus).unwrap()) / (2.0 * step);
                prop_assert!((fd - g[i]).abs() < 1e-6, "{} vs {}", fd, g[i]);
            }
        }

        #[test]
        fn projection_is_idempotent(family in family_strategy(), sheet in 0usize..2, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = family.sample_point(sheet, &mut rng).unwrap().coords.map(|c| to_f64(&c));
            let once = family.project(sheet, p).unwrap();
            let twice = family.project(sheet, once).unwrap();
            prop_assert_eq!(once, twice);
            prop_assert!(family.h_value_f64(sheet, &once).unwrap().abs() <= 1e-12 * family.scale());
        }
    }
}
