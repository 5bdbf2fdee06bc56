//! Seminormed coefficient rings.
//!
//! Every coefficient is an exact rational. Rings that conceptually live
//! over ℤ_p, ℚ_p or ℝ are realised by dense subrings (ℤ_(p), ℚ, ℚ), which
//! leaves the ℓ¹-infima unchanged; residue rings keep a canonical
//! representative in `[0, p^m)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, SvolError};
use crate::rational::{self, format_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Carrier {
    Int,
    Rat,
    FiniteField(u64),
    ModPrimePower(u64, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeminormKind {
    Archimedean,
    PAdic(u64),
    Trivial,
    QuotientPAdic(u64, u32),
}

/// How linear algebra is carried out for a ring: the scalars a chain may
/// use and which divisions are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scalars {
    Integers,
    /// ℤ localised at `p`: rationals whose denominator is prime to `p`.
    Localized(u64),
    Rationals,
    Residues { p: u64, m: u32 },
}

impl Scalars {
    pub fn modulus(&self) -> Option<BigInt> {
        match *self {
            Scalars::Residues { p, m } => Some(rational::pow(p, m)),
            _ => None,
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, Scalars::Rationals | Scalars::Residues { m: 1, .. })
    }

    /// Brings a rational into canonical form for these scalars, if it is an element.
    pub fn reduce(&self, q: &Rational) -> Option<Rational> {
        match *self {
            Scalars::Integers => q.is_integer().then(|| q.clone()),
            Scalars::Localized(p) => (!(q.denom() % BigInt::from(p)).is_zero()).then(|| q.clone()),
            Scalars::Rationals => Some(q.clone()),
            Scalars::Residues { p, m } => {
                rational::reduce_mod(q, &rational::pow(p, m)).map(Rational::from_integer)
            }
        }
    }
}

/// A seminormed ring, identified by a parseable tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingSpec {
    pub carrier: Carrier,
    pub seminorm: SeminormKind,
}

/// An element of a ring's carrier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coefficient(Rational);

impl Coefficient {
    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_value(self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl RingSpec {
    pub const Z: RingSpec = RingSpec { carrier: Carrier::Int, seminorm: SeminormKind::Archimedean };
    pub const Q: RingSpec = RingSpec { carrier: Carrier::Rat, seminorm: SeminormKind::Archimedean };

    pub fn zp(p: u64) -> RingSpec {
        RingSpec { carrier: Carrier::Int, seminorm: SeminormKind::PAdic(p) }
    }

    pub fn qp(p: u64) -> RingSpec {
        RingSpec { carrier: Carrier::Rat, seminorm: SeminormKind::PAdic(p) }
    }

    pub fn fp(p: u64) -> RingSpec {
        RingSpec { carrier: Carrier::FiniteField(p), seminorm: SeminormKind::Trivial }
    }

    pub fn zmod(p: u64, m: u32) -> RingSpec {
        RingSpec { carrier: Carrier::ModPrimePower(p, m), seminorm: SeminormKind::QuotientPAdic(p, m) }
    }

    pub fn trivial(self) -> RingSpec {
        RingSpec { seminorm: SeminormKind::Trivial, ..self }
    }

    /// Validated construction.
    pub fn new(carrier: Carrier, seminorm: SeminormKind) -> Result<RingSpec> {
        let primes = [carrier_prime(carrier), seminorm_prime(seminorm)];
        for p in primes.into_iter().flatten() {
            if !rational::is_prime(p) {
                return Err(SvolError::NotPrime(p));
            }
        }
        let ok = match (carrier, seminorm) {
            (_, SeminormKind::Trivial) => true,
            (Carrier::Int | Carrier::Rat, SeminormKind::Archimedean | SeminormKind::PAdic(_)) => true,
            (Carrier::ModPrimePower(p, m), SeminormKind::QuotientPAdic(q, n)) => p == q && m == n,
            _ => false,
        };
        if let Carrier::ModPrimePower(_, 0) = carrier {
            return Err(SvolError::InvalidPairing("exponent m must be positive".into()));
        }
        if !ok {
            return Err(SvolError::InvalidPairing(format!("{seminorm:?} on {carrier:?}")));
        }
        Ok(RingSpec { carrier, seminorm })
    }

    pub fn scalars(&self) -> Scalars {
        match (self.carrier, self.seminorm) {
            (Carrier::Int, SeminormKind::PAdic(p)) => Scalars::Localized(p),
            (Carrier::Int, _) => Scalars::Integers,
            (Carrier::Rat, _) => Scalars::Rationals,
            (Carrier::FiniteField(p), _) => Scalars::Residues { p, m: 1 },
            (Carrier::ModPrimePower(p, m), _) => Scalars::Residues { p, m },
        }
    }

    /// The prime the ring is attached to, if any.
    pub fn prime(&self) -> Option<u64> {
        carrier_prime(self.carrier).or(seminorm_prime(self.seminorm))
    }

    /// True when `|x| ≤ 1` for every element.
    pub fn norms_bounded_by_one(&self) -> bool {
        match (self.carrier, self.seminorm) {
            (_, SeminormKind::Trivial) | (_, SeminormKind::QuotientPAdic(..)) => true,
            (Carrier::Int, SeminormKind::PAdic(_)) => true,
            _ => false,
        }
    }

    pub fn element(&self, q: &Rational) -> Result<Coefficient> {
        self.scalars().reduce(q).map(Coefficient).ok_or_else(|| SvolError::NotRepresentable {
            value: format_rational(q),
            ring: self.to_string(),
        })
    }

    pub fn element_int(&self, n: i64) -> Coefficient {
        self.element(&rational::rat(n)).expect("integers embed in every carrier")
    }

    pub fn zero(&self) -> Coefficient {
        Coefficient(Rational::zero())
    }

    pub fn one(&self) -> Coefficient {
        self.element_int(1)
    }

    pub fn add(&self, a: &Coefficient, b: &Coefficient) -> Coefficient {
        self.element(&(&a.0 + &b.0)).expect("carrier closed under addition")
    }

    pub fn mul(&self, a: &Coefficient, b: &Coefficient) -> Coefficient {
        self.element(&(&a.0 * &b.0)).expect("carrier closed under multiplication")
    }

    pub fn seminorm(&self, x: &Coefficient) -> Rational {
        seminorm_value(self.seminorm, &x.0)
    }

    /// Seminorm of a rational after bringing it into the carrier.
    pub fn norm_of(&self, q: &Rational) -> Result<Rational> {
        Ok(self.seminorm(&self.element(q)?))
    }
}

fn carrier_prime(c: Carrier) -> Option<u64> {
    match c {
        Carrier::FiniteField(p) | Carrier::ModPrimePower(p, _) => Some(p),
        _ => None,
    }
}

fn seminorm_prime(s: SeminormKind) -> Option<u64> {
    match s {
        SeminormKind::PAdic(p) | SeminormKind::QuotientPAdic(p, _) => Some(p),
        _ => None,
    }
}

fn seminorm_value(kind: SeminormKind, x: &Rational) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    match kind {
        SeminormKind::Archimedean => x.abs(),
        SeminormKind::Trivial => Rational::one(),
        SeminormKind::PAdic(p) => p_power(p, -padic_valuation(x, p).expect("nonzero")),
        SeminormKind::QuotientPAdic(p, m) => {
            let r = padic_valuation(x, p).expect("nonzero");
            if r >= m as i64 {
                Rational::zero()
            } else {
                p_power(p, -r)
            }
        }
    }
}

/// `p^e` as a rational, for any integer `e`.
pub fn p_power(p: u64, e: i64) -> Rational {
    let base = Rational::from_integer(rational::pow(p, e.unsigned_abs() as u32));
    if e >= 0 {
        base
    } else {
        base.recip()
    }
}

/// The p-adic valuation of a rational; `None` stands for +∞ (x = 0).
pub fn padic_valuation(x: &Rational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let num = rational::int_valuation(x.numer(), p) as i64;
    let den = rational::int_valuation(x.denom(), p) as i64;
    Some(num - den)
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Carrier::*;
        use SeminormKind::*;
        match (self.carrier, self.seminorm) {
            (Int, Archimedean) => write!(f, "Z"),
            (Rat, Archimedean) => write!(f, "Q"),
            (Int, PAdic(p)) => write!(f, "Zp:{p}"),
            (Rat, PAdic(p)) => write!(f, "Qp:{p}"),
            (FiniteField(p), _) => write!(f, "Fp:{p}"),
            (ModPrimePower(p, m), QuotientPAdic(..)) => write!(f, "Zmod:{p}^{m}"),
            (Int, Trivial) => write!(f, "triv:Z"),
            (Rat, Trivial) => write!(f, "triv:Q"),
            (ModPrimePower(p, m), _) => write!(f, "triv:Zmod:{p}^{m}"),
            (Int | Rat, QuotientPAdic(..)) => unreachable!("rejected by RingSpec::new"),
        }
    }
}

/// Parses `Z | Q | R | Zp:<p> | Qp:<p> | Fp:<p> | Zmod:<p>^<m> | triv:<inner>`.
pub fn parse_ring_spec(tag: &str) -> Result<RingSpec> {
    let bad = || SvolError::MalformedRingTag(tag.to_string());
    let tag = tag.trim();
    if let Some(inner) = tag.strip_prefix("triv:") {
        let inner = parse_ring_spec(inner).map_err(|e| match e {
            SvolError::MalformedRingTag(_) => bad(),
            other => other,
        })?;
        return Ok(inner.trivial());
    }
    let prime = |s: &str| -> Result<u64> { s.parse::<u64>().map_err(|_| bad()) };
    let (carrier, seminorm) = match tag {
        "Z" => (Carrier::Int, SeminormKind::Archimedean),
        "Q" | "R" => (Carrier::Rat, SeminormKind::Archimedean),
        _ => {
            let (head, arg) = tag.split_once(':').ok_or_else(bad)?;
            match head {
                "Zp" => {
                    let p = prime(arg)?;
                    (Carrier::Int, SeminormKind::PAdic(p))
                }
                "Qp" => {
                    let p = prime(arg)?;
                    (Carrier::Rat, SeminormKind::PAdic(p))
                }
                "Fp" => (Carrier::FiniteField(prime(arg)?), SeminormKind::Trivial),
                "Zmod" => {
                    let (p, m) = arg.split_once('^').ok_or_else(bad)?;
                    let p = prime(p)?;
                    let m: u32 = m.parse().map_err(|_| bad())?;
                    (Carrier::ModPrimePower(p, m), SeminormKind::QuotientPAdic(p, m))
                }
                _ => return Err(bad()),
            }
        }
    };
    RingSpec::new(carrier, seminorm)
}

impl FromStr for RingSpec {
    type Err = SvolError;

    fn from_str(s: &str) -> Result<Self> {
        parse_ring_spec(s)
    }
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let tag = String::deserialize(d)?;
        parse_ring_spec(&tag).map_err(serde::de::Error::custom)
    }
}

/// A failed seminorm axiom with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub s: String,
    pub t: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub pairs_checked: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|1| = 1`, submultiplicativity and the triangle inequality of the
/// ring's own seminorm on the sampled pairs.
pub fn check_seminorm_axioms(spec: &RingSpec, samples: &[(Coefficient, Coefficient)]) -> AxiomReport {
    check_axioms_with(spec, samples, |x| spec.seminorm(x))
}

/// As [`check_seminorm_axioms`], with the seminorm supplied by the caller.
pub fn check_axioms_with(
    spec: &RingSpec,
    samples: &[(Coefficient, Coefficient)],
    norm: impl Fn(&Coefficient) -> Rational,
) -> AxiomReport {
    let mut report = AxiomReport { pairs_checked: samples.len(), violations: Vec::new() };
    let one = spec.one();
    if norm(&one) != Rational::one() {
        report.violations.push(AxiomViolation {
            axiom: "unit",
            s: "1".into(),
            t: "1".into(),
            lhs: format_rational(&norm(&one)),
            rhs: "1".into(),
        });
    }
    for (s, t) in samples {
        let (ns, nt) = (norm(s), norm(t));
        let prod = norm(&spec.mul(s, t));
        if prod > &ns * &nt {
            report.violations.push(violation("submultiplicative", s, t, &prod, &(&ns * &nt)));
        }
        let sum = norm(&spec.add(s, t));
        if sum > &ns + &nt {
            report.violations.push(violation("triangle", s, t, &sum, &(&ns + &nt)));
        }
    }
    report
}

fn violation(axiom: &'static str, s: &Coefficient, t: &Coefficient, lhs: &Rational, rhs: &Rational) -> AxiomViolation {
    AxiomViolation {
        axiom,
        s: format_rational(s.value()),
        t: format_rational(t.value()),
        lhs: format_rational(lhs),
        rhs: format_rational(rhs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn grammar_cases() {
        assert_eq!(parse_ring_spec("Zp:5").unwrap(), RingSpec::zp(5));
        let zmod = parse_ring_spec("Zmod:3^2").unwrap();
        assert_eq!(zmod.carrier, Carrier::ModPrimePower(3, 2));
        assert_eq!(zmod.seminorm, SeminormKind::QuotientPAdic(3, 2));
        assert!(matches!(parse_ring_spec("Zp:6"), Err(SvolError::NotPrime(6))));
        assert_eq!(parse_ring_spec("R").unwrap(), RingSpec::Q);
        assert_eq!(parse_ring_spec("triv:Fp:2").unwrap(), RingSpec::fp(2));
        assert_eq!(parse_ring_spec("triv:Z").unwrap().to_string(), "triv:Z");
        assert_eq!(parse_ring_spec("triv:Zmod:2^3").unwrap().to_string(), "triv:Zmod:2^3");
        for bad in ["", "Zp", "Zp:", "Zmod:3", "Zmod:3^0", "X:2", "triv:", "Qp:1"] {
            assert!(parse_ring_spec(bad).is_err(), "{bad} should fail");
        }
    }

    #[test]
    fn tags_round_trip() {
        for tag in ["Z", "Q", "Zp:7", "Qp:2", "Fp:3", "Zmod:5^3", "triv:Z", "triv:Q", "triv:Zmod:2^2"] {
            assert_eq!(parse_ring_spec(tag).unwrap().to_string(), tag);
        }
    }

    #[test]
    fn pairing_rules() {
        assert!(RingSpec::new(Carrier::FiniteField(3), SeminormKind::Archimedean).is_err());
        assert!(RingSpec::new(Carrier::ModPrimePower(3, 2), SeminormKind::QuotientPAdic(3, 1)).is_err());
        assert!(RingSpec::new(Carrier::Int, SeminormKind::QuotientPAdic(3, 1)).is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_valuation(&rat(12), 2), Some(2));
        assert_eq!(padic_valuation(&rat(0), 7), None);
        assert_eq!(padic_valuation(&ratio(9, 10), 3), Some(2));
        assert_eq!(padic_valuation(&ratio(9, 10), 5), Some(-1));
    }

    #[test]
    fn seminorm_examples() {
        let zmod = parse_ring_spec("Zmod:3^2").unwrap();
        assert_eq!(zmod.norm_of(&rat(6)).unwrap(), ratio(1, 3));
        let triv = parse_ring_spec("triv:Z").unwrap();
        assert_eq!(triv.norm_of(&rat(5)).unwrap(), rat(1));
        assert_eq!(triv.norm_of(&rat(0)).unwrap(), rat(0));
        assert_eq!(RingSpec::qp(5).norm_of(&ratio(9, 10)).unwrap(), rat(5));
        assert!(RingSpec::zp(5).norm_of(&ratio(9, 10)).is_err());
        assert_eq!(RingSpec::zp(5).norm_of(&ratio(1, 3)).unwrap(), rat(1));
        assert!(RingSpec::Z.norm_of(&ratio(1, 3)).is_err());
        assert_eq!(zmod.element(&rat(-1)).unwrap().value(), &rat(8));
    }

    fn box_pairs(spec: &RingSpec, values: &[Rational]) -> Vec<(Coefficient, Coefficient)> {
        let elems: Vec<Coefficient> = values.iter().map(|v| spec.element(v).unwrap()).collect();
        elems.iter().flat_map(|s| elems.iter().map(move |t| (s.clone(), t.clone()))).collect()
    }

    #[test]
    fn zmod9_axioms_exhaustive() {
        let spec = parse_ring_spec("Zmod:3^2").unwrap();
        let values: Vec<Rational> = (0..9).map(rat).collect();
        let report = check_seminorm_axioms(&spec, &box_pairs(&spec, &values));
        assert_eq!(report.pairs_checked, 81);
        assert!(report.holds(), "{:?}", report.violations);
    }

    #[test]
    fn z2_axioms_on_box() {
        let spec = RingSpec::zp(2);
        let values: Vec<Rational> = (-4..=4).map(rat).collect();
        assert!(check_seminorm_axioms(&spec, &box_pairs(&spec, &values)).holds());
    }

    #[test]
    fn broken_unit_is_reported() {
        let spec = RingSpec::Z;
        let report = check_axioms_with(&spec, &[], |x| {
            if x.value() == &rat(1) {
                rat(2)
            } else {
                spec.seminorm(x)
            }
        });
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].axiom, "unit");
    }

    use proptest::prelude::*;

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-60i64..=60, 1i64..=12).prop_map(|(n, d)| ratio(n, d))
    }

    fn spec_for(tag: &str) -> RingSpec {
        parse_ring_spec(tag).unwrap()
    }

    proptest! {
        #[test]
        fn seminorms_are_subadditive_and_submultiplicative(
            x in -200i64..=200,
            y in -200i64..=200,
            tag in prop::sample::select(vec!["Z", "Zp:2", "Zp:3", "Fp:5", "Zmod:2^3", "Zmod:3^2", "triv:Z"]),
        ) {
            let spec = spec_for(tag);
            let (a, b) = (spec.element_int(x), spec.element_int(y));
            let (na, nb) = (spec.seminorm(&a), spec.seminorm(&b));
            prop_assert!(spec.seminorm(&spec.add(&a, &b)) <= &na + &nb);
            prop_assert!(spec.seminorm(&spec.mul(&a, &b)) <= &na * &nb);
            prop_assert!(check_seminorm_axioms(&spec, &[(a, b)]).holds());
        }

        #[test]
        fn padic_norm_is_multiplicative(x in small_rational(), y in small_rational(), p in prop::sample::select(vec![2u64, 3, 5])) {
            let spec = RingSpec::qp(p);
            let n = |q: &Rational| spec.norm_of(q).unwrap();
            prop_assert_eq!(n(&(&x * &y)), n(&x) * n(&y));
            let sum = n(&(&x + &y));
            prop_assert!(sum <= n(&x).max(n(&y)));
        }

        #[test]
        fn quotient_norm_is_least_lift_norm(x in -100i64..=100, p in prop::sample::select(vec![2u64, 3]), m in 1u32..4) {
            let spec = RingSpec::zmod(p, m);
            let modulus = rational::pow(p, m);
            let padic = RingSpec::zp(p);
            let least = (-3i64..=3)
                .map(|k| {
                    let residue = rational::modulo(&BigInt::from(x), &modulus);
                    let lift = Rational::from_integer(residue + BigInt::from(k) * &modulus);
                    padic.norm_of(&lift).unwrap()
                })
                .min()
                .unwrap();
            let q = spec.norm_of(&rat(x)).unwrap();
            prop_assert_eq!(&q, &least);
            let trivial = spec.trivial().norm_of(&rat(x)).unwrap();
            prop_assert!(q <= trivial);
            prop_assert!(trivial <= p_power(p, m as i64 - 1) * &q);
        }
    }
}
