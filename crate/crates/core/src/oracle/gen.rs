//! Deterministic generation of denominators and vectors aimed at each branch
//! of the reciprocal plan.
//!
//! Every case is drawn from its own ChaCha stream keyed by (seed, profile,
//! index), so any case can be regenerated alone and streams can be split
//! across threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::Complex;
use crate::error::Error;
use crate::real::Real;
use crate::scalar_core::{reciprocal_plan, CaseTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileName {
    Safe,
    HugeDenominator,
    TinyDenominator,
    MixedExtreme,
    SubnormalParts,
    SpecialValues,
}

impl ProfileName {
    pub const ALL: [ProfileName; 6] = [
        ProfileName::Safe,
        ProfileName::HugeDenominator,
        ProfileName::TinyDenominator,
        ProfileName::MixedExtreme,
        ProfileName::SubnormalParts,
        ProfileName::SpecialValues,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileName::Safe => "safe",
            ProfileName::HugeDenominator => "huge-denominator",
            ProfileName::TinyDenominator => "tiny-denominator",
            ProfileName::MixedExtreme => "mixed-extreme",
            ProfileName::SubnormalParts => "subnormal-parts",
            ProfileName::SpecialValues => "special-values",
        }
    }

    fn salt(self) -> u64 {
        (self as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }
}

impl fmt::Display for ProfileName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileName {
    type Err = Error;

    /// Accepts the full names and the short forms `huge`, `tiny`, `mixed`,
    /// `subnormal`, `special`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let short = |p: ProfileName| p.name().split('-').next() == Some(s);
        ProfileName::ALL
            .into_iter()
            .find(|p| p.name() == s || short(*p))
            .ok_or_else(|| Error::UnknownProfile(s.to_string()))
    }
}

/// A named generator with its seed and number of cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseProfile {
    pub name: ProfileName,
    pub seed: u64,
    pub count: usize,
}

impl CaseProfile {
    pub fn new(name: ProfileName, seed: u64, count: usize) -> Self {
        CaseProfile { name, seed, count }
    }
}

/// One denominator and the vector it divides.
#[derive(Clone, Debug, PartialEq)]
pub struct Case<T> {
    pub index: usize,
    pub a: Complex<T>,
    pub x: Vec<Complex<T>>,
}

pub const VECTOR_LENGTHS: [usize; 5] = [0, 1, 2, 7, 64];

/// `{±0, ±min subnormal, ±SFMIN, ±1, ±1/SFMIN, ±max finite, ±Inf, NaN}`.
pub fn special_values<T: Real>() -> [T; 15] {
    let pos = [
        T::zero(),
        T::MIN_SUBNORMAL,
        T::SFMIN,
        T::one(),
        T::SFMIN_RECIP,
        T::OVERFLOW,
        T::infinity(),
    ];
    let mut out = [T::nan(); 15];
    for (i, v) in pos.into_iter().enumerate() {
        out[2 * i] = v;
        out[2 * i + 1] = -v;
    }
    out
}

/// Number of distinct denominators the special-value profile cycles through.
pub const SPECIAL_PAIRS: usize = 225;

fn rng_for(profile: &CaseProfile, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed ^ profile.name.salt());
    rng.set_stream(index as u64);
    rng
}

fn min_sub_exp<T: Real>() -> i32 {
    T::min_exp() - T::FRACTION_BITS as i32
}

/// Positive value with unbiased exponent `e` and random trailing bits.
fn with_exp<T: Real>(rng: &mut ChaCha8Rng, e: i32) -> T {
    if e >= T::min_exp() {
        T::compose(false, e, rng.gen())
    } else {
        let lead = 1u64 << (e - min_sub_exp::<T>());
        T::from_bits_u64(lead | (rng.gen::<u64>() & (lead - 1)))
    }
}

fn signed<T: Real>(rng: &mut ChaCha8Rng, v: T) -> T {
    if rng.gen() {
        -v
    } else {
        v
    }
}

fn draw<T: Real>(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> T {
    let e = rng.gen_range(lo..=hi);
    let v = with_exp(rng, e);
    signed(rng, v)
}

fn pair<T: Real>(rng: &mut ChaCha8Rng, p: T, q: T) -> Complex<T> {
    if rng.gen() {
        Complex::new(p, q)
    } else {
        Complex::new(q, p)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Shape {
    Full,
    Real,
    Imaginary,
}

fn shape(rng: &mut ChaCha8Rng) -> Shape {
    match rng.gen_range(0..8) {
        0 => Shape::Real,
        1 => Shape::Imaginary,
        _ => Shape::Full,
    }
}

fn one_part<T: Real>(rng: &mut ChaCha8Rng, shape: Shape, v: T) -> Complex<T> {
    let zero = signed(rng, T::zero());
    match shape {
        Shape::Imaginary => Complex::new(zero, v),
        _ => Complex::new(v, zero),
    }
}

/// Redraws until `accept` holds.
fn until<T: Real>(
    rng: &mut ChaCha8Rng,
    mut make: impl FnMut(&mut ChaCha8Rng) -> Complex<T>,
    accept: impl Fn(Complex<T>) -> bool,
) -> Complex<T> {
    loop {
        let a = make(rng);
        if accept(a) {
            return a;
        }
    }
}

fn denominator<T: Real>(name: ProfileName, index: usize, rng: &mut ChaCha8Rng) -> Complex<T> {
    let (lo, hi, sub) = (T::min_exp(), T::max_exp(), min_sub_exp::<T>());
    let tag = |a: Complex<T>| reciprocal_plan(a).case;
    if name == ProfileName::SpecialValues {
        let s = special_values::<T>();
        let i = index % SPECIAL_PAIRS;
        return Complex::new(s[i / 15], s[i % 15]);
    }
    let shape = shape(rng);
    match (name, shape) {
        (ProfileName::Safe, Shape::Full) => until(
            rng,
            |r| Complex::new(draw(r, lo / 2, hi / 2), draw(r, lo / 2, hi / 2)),
            |a| tag(a) == CaseTag::FullSafe,
        ),
        (ProfileName::Safe, s) => {
            let v: T = draw(rng, lo / 2, hi / 2);
            one_part(rng, s, v)
        }
        (ProfileName::HugeDenominator, Shape::Full) => until(
            rng,
            |r| {
                let el = r.gen_range(hi / 2..=hi);
                let es = r.gen_range(sub..=el);
                let (p, q) = (draw(r, el, el), draw(r, es, es));
                pair(r, p, q)
            },
            |a| matches!(tag(a), CaseTag::FullInfRescue | CaseTag::FullLarge),
        ),
        (ProfileName::HugeDenominator, s) => until(
            rng,
            |r| {
                let v: T = draw(r, hi - 1, hi);
                one_part(r, s, v)
            },
            |a| a.re.abs().max(a.im.abs()) > T::SFMIN_RECIP,
        ),
        (ProfileName::TinyDenominator, Shape::Full) => until(
            rng,
            |r| {
                let el = r.gen_range(sub..=lo);
                let es = r.gen_range(sub..=el);
                let (p, q) = (draw(r, el, el), draw(r, es, es));
                pair(r, p, q)
            },
            |a| tag(a) == CaseTag::FullSmall,
        ),
        (ProfileName::TinyDenominator, s) => {
            let v: T = draw(rng, sub, lo - 1);
            one_part(rng, s, v)
        }
        (ProfileName::MixedExtreme, Shape::Full) => {
            let big = draw(rng, hi - 40, hi);
            let small = draw(rng, sub, lo + 40);
            pair(rng, big, small)
        }
        (ProfileName::MixedExtreme, s) => {
            let v: T = if rng.gen() {
                draw(rng, hi - 40, hi)
            } else {
                draw(rng, sub, lo + 40)
            };
            one_part(rng, s, v)
        }
        (ProfileName::SubnormalParts, Shape::Full) => {
            let p = draw(rng, sub, lo - 1);
            let q = if rng.gen() {
                draw(rng, sub, lo - 1)
            } else {
                draw(rng, sub, hi)
            };
            pair(rng, p, q)
        }
        (ProfileName::SubnormalParts, s) => {
            let v: T = draw(rng, sub, lo - 1);
            one_part(rng, s, v)
        }
        (ProfileName::SpecialValues, _) => unreachable!(),
    }
}

fn element<T: Real>(name: ProfileName, a: Complex<T>, rng: &mut ChaCha8Rng) -> Complex<T> {
    if name == ProfileName::SpecialValues {
        return Complex::new(draw(rng, -1, 0), draw(rng, -1, 0));
    }
    let (lo, hi) = (T::min_exp(), T::max_exp());
    let ea = a.re.abs().max(a.im.abs()).exponent();
    let e1 = (ea + rng.gen_range(-20..=20)).clamp(lo, hi);
    let e2 = (e1 - rng.gen_range(0..=30)).max(lo);
    let big = draw(rng, e1, e1);
    let small = match rng.gen_range(0..16) {
        0 => signed(rng, T::zero()),
        1..=3 if name == ProfileName::SubnormalParts => draw(rng, min_sub_exp::<T>(), lo - 1),
        _ => draw(rng, e2, e2),
    };
    pair(rng, big, small)
}

/// The `index`-th case of a profile.
pub fn gen_case<T: Real>(profile: &CaseProfile, index: usize) -> Case<T> {
    let mut rng = rng_for(profile, index);
    let a = denominator(profile.name, index, &mut rng);
    let n = VECTOR_LENGTHS[rng.gen_range(0..VECTOR_LENGTHS.len())];
    let x = (0..n).map(|_| element(profile.name, a, &mut rng)).collect();
    Case { index, a, x }
}

/// All `profile.count` cases in order.
pub fn gen_cases<T: Real>(profile: &CaseProfile) -> impl Iterator<Item = Case<T>> + '_ {
    (0..profile.count).map(move |i| gen_case(profile, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(name: ProfileName, count: usize) -> CaseProfile {
        CaseProfile::new(name, 7, count)
    }

    #[test]
    fn streams_are_reproducible() {
        let p = CaseProfile::new(ProfileName::Safe, 42, 1000);
        let a: Vec<Case<f32>> = gen_cases(&p).collect();
        let b: Vec<Case<f32>> = gen_cases(&p).collect();
        assert!(a.iter().zip(&b).all(|(u, v)| {
            u.a.bits_eq(v.a)
                && u.x.len() == v.x.len()
                && u.x.iter().zip(&v.x).all(|(p, q)| p.bits_eq(*q))
        }));
        let other: Vec<Case<f32>> =
            gen_cases(&CaseProfile::new(ProfileName::Safe, 43, 1000)).collect();
        assert_ne!(a, other);
    }

    #[test]
    fn special_enumeration_has_corners() {
        let cases: Vec<Case<f32>> =
            gen_cases(&profile(ProfileName::SpecialValues, SPECIAL_PAIRS)).collect();
        let has = |re: f32, im: f32| cases.iter().any(|c| c.a.bits_eq(Complex::new(re, im)));
        assert!(has(f32::INFINITY, f32::INFINITY));
        assert!(has(0.0, 0.0));
        assert!(has(-0.0, f32::NAN));
        assert!(cases.iter().any(|c| c.a.re.is_nan() && c.a.im.is_nan()));
        for c in &cases {
            assert!(c
                .x
                .iter()
                .all(|v| v.is_finite() && v.re != 0.0 && v.im != 0.0));
        }
    }

    fn histogram<T: Real>(
        name: ProfileName,
        n: usize,
    ) -> std::collections::BTreeMap<CaseTag, usize> {
        let mut h = std::collections::BTreeMap::new();
        for c in gen_cases::<T>(&profile(name, n)) {
            *h.entry(reciprocal_plan(c.a).case).or_insert(0) += 1;
        }
        h
    }

    #[test]
    fn tiny_profile_hits_small_branches() {
        for c in gen_cases::<f32>(&profile(ProfileName::TinyDenominator, 2000)) {
            let plan = reciprocal_plan(c.a);
            let ok = plan.case == CaseTag::FullSmall
                || (!plan.case.is_full() && plan.steps().len() == 2);
            assert!(ok, "{:?} -> {:?}", c.a, plan.case);
        }
        for c in gen_cases::<f64>(&profile(ProfileName::TinyDenominator, 500)) {
            let plan = reciprocal_plan(c.a);
            assert!(plan.case == CaseTag::FullSmall || plan.steps().len() == 2);
        }
    }

    #[test]
    fn huge_profile_hits_large_branches() {
        for c in gen_cases::<f32>(&profile(ProfileName::HugeDenominator, 2000)) {
            let plan = reciprocal_plan(c.a);
            let ok = matches!(plan.case, CaseTag::FullInfRescue | CaseTag::FullLarge)
                || (!plan.case.is_full() && plan.steps().len() == 2);
            assert!(ok, "{:?} -> {:?}", c.a, plan.case);
        }
        let h = histogram::<f32>(ProfileName::HugeDenominator, 2000);
        assert!(h[&CaseTag::FullLarge] > 0);
        assert!(h[&CaseTag::FullInfRescue] > 0);
    }

    #[test]
    fn safe_profile_stays_safe() {
        for c in gen_cases::<f64>(&profile(ProfileName::Safe, 2000)) {
            let plan = reciprocal_plan(c.a);
            assert!(matches!(
                plan.case,
                CaseTag::FullSafe | CaseTag::RealDenominator | CaseTag::ImaginaryDenominator
            ));
            assert_eq!(plan.steps().len(), 1);
        }
    }

    #[test]
    fn subnormal_profile_has_subnormal_parts() {
        for c in gen_cases::<f32>(&profile(ProfileName::SubnormalParts, 500)) {
            let sub = |v: f32| v != 0.0 && v.abs() < f32::SFMIN;
            assert!(sub(c.a.re) || sub(c.a.im), "{:?}", c.a);
        }
    }

    #[test]
    fn lengths_come_from_the_fixed_set() {
        let mut seen = std::collections::BTreeSet::new();
        for c in gen_cases::<f32>(&profile(ProfileName::MixedExtreme, 300)) {
            assert!(VECTOR_LENGTHS.contains(&c.x.len()));
            seen.insert(c.x.len());
        }
        assert_eq!(seen.len(), VECTOR_LENGTHS.len());
    }

    #[test]
    fn profile_names_parse() {
        for p in ProfileName::ALL {
            assert_eq!(p.name().parse::<ProfileName>().unwrap(), p);
        }
        assert_eq!(
            "special".parse::<ProfileName>().unwrap(),
            ProfileName::SpecialValues
        );
        assert_eq!(
            "huge".parse::<ProfileName>().unwrap(),
            ProfileName::HugeDenominator
        );
        assert!("bogus".parse::<ProfileName>().is_err());
    }
}
