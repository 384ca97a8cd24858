//! Exact arithmetic on intersection arrays.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders a rational as `p/q`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Intersection array `{b_0..b_{D-1}; c_1..c_D}` with its derived data.
///
/// Storage is padded so that `b(i)`, `c(i)` and `a(i)` are defined for
/// every `0 <= i <= D`, with `c_0 = 0` and `b_D = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionArray {
    d: usize,
    b: Vec<Rational>,
    c: Vec<Rational>,
    a: Vec<Rational>,
    valencies: Vec<Rational>,
    order: Rational,
}

impl IntersectionArray {
    /// Builds an array from `b_0..b_{D-1}` and `c_1..c_D`.
    pub fn new(b: Vec<Rational>, c: Vec<Rational>) -> Result<Self> {
        if b.len() != c.len() {
            return Err(Error::LengthMismatch {
                b: b.len(),
                c: c.len(),
            });
        }
        let d = b.len();
        if d < 3 {
            return Err(Error::DiameterTooSmall(d));
        }
        for (i, x) in b.iter().enumerate() {
            if !x.is_positive() {
                return Err(Error::NonPositive {
                    name: "b",
                    index: i,
                    value: x.to_string(),
                });
            }
        }
        for (i, x) in c.iter().enumerate() {
            if !x.is_positive() {
                return Err(Error::NonPositive {
                    name: "c",
                    index: i + 1,
                    value: x.to_string(),
                });
            }
        }
        if !c[0].is_one() {
            return Err(Error::FirstCNotOne(c[0].to_string()));
        }

        let mut bb = b;
        bb.push(Rational::zero());
        let mut cc = Vec::with_capacity(d + 1);
        cc.push(Rational::zero());
        cc.extend(c);

        let k = bb[0].clone();
        let mut a = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let ai = &k - &bb[i] - &cc[i];
            if ai.is_negative() {
                return Err(Error::NegativeA {
                    index: i,
                    value: ai.to_string(),
                });
            }
            a.push(ai);
        }

        let mut valencies = vec![Rational::one()];
        for i in 1..=d {
            let prev = valencies[i - 1].clone();
            valencies.push(prev * &bb[i - 1] / &cc[i]);
        }
        let order = valencies.iter().fold(Rational::zero(), |s, x| s + x);

        Ok(Self {
            d,
            b: bb,
            c: cc,
            a,
            valencies,
            order,
        })
    }

    pub fn from_integers(b: &[i64], c: &[i64]) -> Result<Self> {
        Self::new(
            b.iter().copied().map(rational).collect(),
            c.iter().copied().map(rational).collect(),
        )
    }

    pub fn diameter(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> &Rational {
        &self.b[0]
    }

    pub fn b(&self, i: usize) -> &Rational {
        &self.b[i]
    }

    pub fn c(&self, i: usize) -> &Rational {
        &self.c[i]
    }

    pub fn a(&self, i: usize) -> &Rational {
        &self.a[i]
    }

    /// `k_i = |Γ_i(x)|`.
    pub fn valency(&self, i: usize) -> &Rational {
        &self.valencies[i]
    }

    pub fn valencies(&self) -> &[Rational] {
        &self.valencies
    }

    /// `n = |X|`.
    pub fn order(&self) -> &Rational {
        &self.order
    }

    /// `b_0..b_{D-1}`.
    pub fn b_list(&self) -> &[Rational] {
        &self.b[..self.d]
    }

    /// `c_1..c_D`.
    pub fn c_list(&self) -> &[Rational] {
        &self.c[1..]
    }

    pub fn a_list(&self) -> &[Rational] {
        &self.a
    }

    pub fn integral_valencies(&self) -> Vec<bool> {
        self.valencies.iter().map(|x| x.is_integer()).collect()
    }

    pub fn all_valencies_integral(&self) -> bool {
        self.valencies.iter().all(|x| x.is_integer()) && self.order.is_integer()
    }

    pub fn k_f64(&self) -> f64 {
        to_f64(self.k())
    }

    pub fn order_f64(&self) -> f64 {
        to_f64(&self.order)
    }

    pub fn b_f64(&self) -> Vec<f64> {
        self.b.iter().map(to_f64).collect()
    }

    pub fn c_f64(&self) -> Vec<f64> {
        self.c.iter().map(to_f64).collect()
    }

    pub fn a_f64(&self) -> Vec<f64> {
        self.a.iter().map(to_f64).collect()
    }

    pub fn valencies_f64(&self) -> Vec<f64> {
        self.valencies.iter().map(to_f64).collect()
    }
}

impl fmt::Display for IntersectionArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[Rational]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{};{}", join(self.b_list()), join(self.c_list()))
    }
}

/// Parses `"b0,...,b_{D-1};c1,...,cD"`. Whitespace is ignored and entries
/// may be integers or rationals `p/q`.
pub fn parse_array(text: &str) -> Result<IntersectionArray> {
    let Some(semi) = text.find(';') else {
        return Err(Error::Parse {
            position: text.len(),
            message: "expected ';' separating the b-list from the c-list".into(),
        });
    };
    if let Some(extra) = text[semi + 1..].find(';') {
        return Err(Error::Parse {
            position: semi + 1 + extra,
            message: "more than one ';'".into(),
        });
    }
    let b = parse_list(&text[..semi], 0)?;
    let c = parse_list(&text[semi + 1..], semi + 1)?;
    IntersectionArray::new(b, c)
}

fn parse_list(s: &str, offset: usize) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in s.split(',') {
        out.push(parse_rational(piece, offset + start)?);
        start += piece.len() + 1;
    }
    Ok(out)
}

fn parse_rational(token: &str, offset: usize) -> Result<Rational> {
    let lead = token.len() - token.trim_start().len();
    let position = offset + lead;
    let t: String = token.chars().filter(|ch| !ch.is_whitespace()).collect();
    let err = |message: String| Error::Parse { position, message };
    if t.is_empty() {
        return Err(err("empty entry".into()));
    }
    let parse_int = |s: &str| {
        s.parse::<BigInt>()
            .map_err(|_| err(format!("'{s}' is not an integer")))
    };
    match t.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(&t)?)),
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(err("zero denominator".into()));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
    }
}

/// Rank-3 table `p^h_{ij}` with indices `0..=D`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionNumbers {
    d: usize,
    p: Vec<Rational>,
}

impl IntersectionNumbers {
    pub fn diameter(&self) -> usize {
        self.d
    }

    /// `p^h_{ij}`.
    pub fn get(&self, h: usize, i: usize, j: usize) -> &Rational {
        let s = self.d + 1;
        &self.p[(h * s + i) * s + j]
    }

    pub fn get_f64(&self, h: usize, i: usize, j: usize) -> f64 {
        to_f64(self.get(h, i, j))
    }
}

/// Multiplication by `λ` in the basis `v_0..v_D` of `R[λ]/(v_{D+1})`.
fn mul_lambda(ia: &IntersectionArray, w: &[Rational]) -> Vec<Rational> {
    let d = ia.diameter();
    let mut out = vec![Rational::zero(); d + 1];
    for i in 0..=d {
        if w[i].is_zero() {
            continue;
        }
        if i > 0 {
            out[i - 1] += &w[i] * ia.b(i - 1);
        }
        out[i] += &w[i] * ia.a(i);
        if i < d {
            out[i + 1] += &w[i] * ia.c(i + 1);
        }
    }
    out
}

/// Exact intersection numbers from the three-term recurrence of the `v_i`.
///
/// For each `i` the products `v_i v_j` are generated in turn via
/// `c_{j+1} v_{j+1} = (λ - a_j) v_j - b_{j-1} v_{j-1}`, and `p^h_{ij}` is
/// the coefficient of `v_h` in `v_i v_j`.
pub fn intersection_numbers(ia: &IntersectionArray) -> IntersectionNumbers {
    let d = ia.diameter();
    let s = d + 1;
    let mut p = vec![Rational::zero(); s * s * s];
    for i in 0..=d {
        let mut prev: Vec<Rational> = vec![Rational::zero(); s];
        let mut cur: Vec<Rational> = vec![Rational::zero(); s];
        cur[i] = Rational::one();
        for j in 0..=d {
            for h in 0..=d {
                p[(h * s + i) * s + j] = cur[h].clone();
            }
            if j == d {
                break;
            }
            let lam = mul_lambda(ia, &cur);
            let next: Vec<Rational> = (0..s)
                .map(|h| {
                    let mut x = &lam[h] - ia.a(j) * &cur[h];
                    if j > 0 {
                        x -= ia.b(j - 1) * &prev[h];
                    }
                    x / ia.c(j + 1)
                })
                .collect();
            prev = std::mem::replace(&mut cur, next);
        }
    }
    IntersectionNumbers { d, p }
}

/// One named feasibility condition with an exact witness.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityCheck {
    pub name: String,
    pub passed: bool,
    pub witness: String,
}

impl FeasibilityCheck {
    pub fn new(name: &str, passed: bool, witness: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            witness,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeasibilityReport {
    pub checks: Vec<FeasibilityCheck>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &FeasibilityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&FeasibilityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Exact feasibility screening: positivity, `c_1 = 1`, `a_i >= 0` and the
/// integrality and nonnegativity of `k_i`, `n` and every `p^h_{ij}`.
pub fn feasibility_report(ia: &IntersectionArray) -> FeasibilityReport {
    let d = ia.diameter();
    let mut checks = Vec::new();

    let join = |xs: &[Rational]| {
        xs.iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(", ")
    };
    checks.push(FeasibilityCheck::new(
        "positivity",
        ia.b_list().iter().chain(ia.c_list()).all(|x| x.is_positive()),
        format!("b = ({}), c = ({})", join(ia.b_list()), join(ia.c_list())),
    ));
    checks.push(FeasibilityCheck::new(
        "c1_is_one",
        ia.c(1).is_one(),
        format!("c_1 = {}", format_rational(ia.c(1))),
    ));
    checks.push(FeasibilityCheck::new(
        "a_nonnegative",
        ia.a_list().iter().all(|x| !x.is_negative()),
        format!("a = ({})", join(ia.a_list())),
    ));

    let bad_k: Vec<usize> = (0..=d).filter(|&i| !ia.valency(i).is_integer()).collect();
    let witness = match bad_k.first() {
        Some(&i) => format!("k_{i} = {}", format_rational(ia.valency(i))),
        None => format!("k = ({})", join(ia.valencies())),
    };
    checks.push(FeasibilityCheck::new(
        "valencies_integral",
        bad_k.is_empty(),
        witness,
    ));
    checks.push(FeasibilityCheck::new(
        "order_integral",
        ia.order().is_integer(),
        format!("n = {}", format_rational(ia.order())),
    ));

    let p = intersection_numbers(ia);
    let mut negative = None;
    let mut fractional = None;
    for h in 0..=d {
        for i in 0..=d {
            for j in 0..=d {
                let x = p.get(h, i, j);
                if negative.is_none() && x.is_negative() {
                    negative = Some((h, i, j, x.clone()));
                }
                if fractional.is_none() && !x.is_integer() {
                    fractional = Some((h, i, j, x.clone()));
                }
            }
        }
    }
    let describe = |w: &Option<(usize, usize, usize, Rational)>| match w {
        Some((h, i, j, x)) => format!("p^{h}_{{{i},{j}}} = {}", format_rational(x)),
        None => String::new(),
    };
    checks.push(FeasibilityCheck::new(
        "intersection_numbers_nonnegative",
        negative.is_none(),
        describe(&negative),
    ));
    checks.push(FeasibilityCheck::new(
        "intersection_numbers_integral",
        fractional.is_none(),
        describe(&fractional),
    ));

    FeasibilityReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        rational(n)
    }

    #[test]
    fn cube_array_derived_values() {
        let ia = parse_array("3,2,1;1,2,3").unwrap();
        assert_eq!(ia.diameter(), 3);
        assert_eq!(ia.k(), &r(3));
        assert_eq!(ia.valencies(), &[r(1), r(3), r(3), r(1)]);
        assert_eq!(ia.order(), &r(8));
        assert!(ia.a_list().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn heptagon_array_has_loop_free_last_shell() {
        let ia = parse_array("2,1,1;1,1,1").unwrap();
        assert_eq!(ia.a_list(), &[r(0), r(0), r(0), r(1)]);
        assert_eq!(ia.order(), &r(7));
    }

    #[test]
    fn negative_a_rejected() {
        let err = parse_array("3,2,1;1,2,4").unwrap_err();
        assert!(matches!(err, Error::NegativeA { index: 3, .. }), "{err:?}");
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(matches!(parse_array("garbage"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_array("3,x,1;1,2,3"),
            Err(Error::Parse { position: 2, .. })
        ));
        assert!(matches!(
            parse_array("2,1;1,2"),
            Err(Error::DiameterTooSmall(2))
        ));
        assert!(matches!(
            parse_array("3,0,1;1,2,3"),
            Err(Error::NonPositive { name: "b", index: 1, .. })
        ));
        assert!(matches!(
            parse_array("3,2,1;2,2,3"),
            Err(Error::FirstCNotOne(_))
        ));
        assert!(matches!(
            parse_array("3,2,1;1,2"),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(parse_array("3,2,1;1,2,3;4"), Err(Error::Parse { .. })));
        assert!(matches!(parse_array("3,2,1;1,2/0,3"), Err(Error::Parse { .. })));
    }

    #[test]
    fn whitespace_and_rationals_accepted() {
        let ia = parse_array(" 3 , 2, 1 ; 1, 4/2 ,3 ").unwrap();
        assert_eq!(ia, parse_array("3,2,1;1,2,3").unwrap());
        assert_eq!(ia.to_string(), "3,2,1;1,2,3");
    }

    #[test]
    fn valencies_of_non_bipartite_array() {
        let ia = parse_array("3,2,1;1,1,3").unwrap();
        assert_eq!(ia.valencies(), &[r(1), r(3), r(6), r(2)]);
        let rep = feasibility_report(&ia);
        assert!(rep.get("valencies_integral").unwrap().passed);
        assert!(rep.get("valencies_integral").unwrap().witness.contains("6/1"));
    }

    #[test]
    fn non_integral_valency_flagged() {
        let ia = parse_array("5,4,1;1,3,5").unwrap();
        assert!(!ia.all_valencies_integral());
        let rep = feasibility_report(&ia);
        assert!(!rep.feasible());
        let check = rep.get("valencies_integral").unwrap();
        assert!(!check.passed);
        assert_eq!(check.witness, "k_2 = 20/3");
    }

    #[test]
    fn cube_is_feasible() {
        let rep = feasibility_report(&parse_array("3,2,1;1,2,3").unwrap());
        assert!(rep.feasible(), "{rep:?}");
    }

    #[test]
    fn cube_intersection_numbers() {
        let ia = parse_array("3,2,1;1,2,3").unwrap();
        let p = intersection_numbers(&ia);
        assert_eq!(p.get(1, 1, 2), &r(2));
        assert_eq!(p.get(2, 1, 1), &r(2));
        assert_eq!(p.get(3, 1, 2), &r(3));
        assert_eq!(p.get(0, 3, 3), &r(1));
        assert_eq!(p.get(1, 1, 1), &r(0));
    }

    #[test]
    fn intersection_number_identities_hold_exactly() {
        for text in ["3,2,1;1,2,3", "2,1,1;1,1,1", "15,8,3;1,4,9", "6,4,2;1,2,3", "3,2,1;1,1,3"] {
            let ia = parse_array(text).unwrap();
            let d = ia.diameter();
            let p = intersection_numbers(&ia);
            for h in 0..=d {
                for i in 0..=d {
                    for j in 0..=d {
                        let x = p.get(h, i, j);
                        assert_eq!(x, p.get(h, j, i));
                        let delta = |a: usize, b: usize| if a == b { r(1) } else { r(0) };
                        if i == 0 {
                            assert_eq!(x, &delta(h, j));
                        }
                        if h == 0 {
                            assert_eq!(x, &(delta(i, j) * ia.valency(i)));
                        }
                        assert_eq!(ia.valency(h) * x, ia.valency(i) * p.get(i, j, h));
                        assert_eq!(ia.valency(h) * x, ia.valency(j) * p.get(j, h, i));
                        let (big, s1, s2) = sorted_triangle(h, i, j);
                        if big > s1 + s2 {
                            assert!(x.is_zero(), "{text}: p^{h}_{i}{j}");
                        }
                        if big == s1 + s2 {
                            assert!(!x.is_zero(), "{text}: p^{h}_{i}{j}");
                        }
                    }
                }
                for j in 0..=d {
                    let s = (0..=d).fold(r(0), |s, i| s + p.get(h, i, j));
                    assert_eq!(&s, ia.valency(j));
                }
            }
        }
    }

    fn sorted_triangle(h: usize, i: usize, j: usize) -> (usize, usize, usize) {
        let mut v = [h, i, j];
        v.sort_unstable();
        (v[2], v[0], v[1])
    }
}
