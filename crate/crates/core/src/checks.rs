//! The check registry: every congruence as a named verdict producer.
//!
//! Each check evaluates its two sides independently (sums through [`crate::binomsums`],
//! closed forms through [`crate::sequences`] and Jacobi symbols) at the declared prime-power
//! exponent and reports how far apart they are as a [`Verdict`].
//!
//! Check ids are a stable public contract.

use std::fmt;

use serde::Serialize;

use crate::binomsums::{
    alternating_harmonic, evaluate_sum, floor_fraction, power_over_square_sum, signed_central_sum,
    CentralBinomials, SumSpec, WeightKind,
};
use crate::error::{domain, Error, Result};
use crate::modarith::{
    inv_mod, jacobi, jacobi_prime_power, padic_normalize, Modulus, PadicFactored, ResidueClass,
};
use crate::sequences::{
    fermat_quotient, fibonacci, fibonacci_quotient, lucas_number, lucas_uv_mod, LucasParams,
};

pub const DEFAULT_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckKind {
    Theorem,
    Lemma,
    Auxiliary,
    Conjecture,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Theorem => "THEOREM",
            CheckKind::Lemma => "LEMMA",
            CheckKind::Auxiliary => "AUXILIARY",
            CheckKind::Conjecture => "CONJECTURE",
        })
    }
}

/// Which extra parameter a check consumes besides `p` (and possibly `a`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Plain,
    /// An integer `m` prime to `p`.
    M,
    /// Lucas parameters `(A, B)`.
    Lucas,
    /// A required index `n`; the prime is fixed to 3.
    Index,
    /// An optional index `k`; absent means "every admissible k".
    OptionalIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentRule {
    Fixed(u32),
    /// `p^(a+1)`
    APlusOne,
    /// Conjecture checks whose verdict lives modulo a fixed power of 3 but whose sums are
    /// evaluated at a higher working precision.
    ThreeAdic(u32),
}

impl fmt::Display for ExponentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentRule::Fixed(e) | ExponentRule::ThreeAdic(e) => write!(f, "{e}"),
            ExponentRule::APlusOne => f.write_str("a+1"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CheckParams {
    pub p: u64,
    pub a: u32,
    pub m: Option<i64>,
    pub n: Option<u64>,
    pub lucas: Option<(i64, i64)>,
    pub force: bool,
    pub budget: u64,
}

impl CheckParams {
    pub fn new(p: u64, a: u32) -> Self {
        CheckParams {
            p,
            a,
            m: None,
            n: None,
            lucas: None,
            force: false,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_m(mut self, m: i64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_lucas(mut self, a: i64, b: i64) -> Self {
        self.lucas = Some((a, b));
        self
    }

    pub fn forced(mut self) -> Self {
        self.force = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub check_id: String,
    pub params: CheckParams,
    pub modulus: Modulus,
    pub lhs: ResidueClass,
    pub rhs: ResidueClass,
    pub defect_valuation: u32,
    pub pass: bool,
}

impl Verdict {
    fn new(check_id: &str, params: CheckParams, lhs: ResidueClass, rhs: ResidueClass) -> Self {
        let modulus = lhs.modulus();
        let defect_valuation = (lhs - rhs).valuation();
        Verdict {
            check_id: check_id.to_string(),
            params,
            modulus,
            lhs,
            rhs,
            defect_valuation,
            pass: lhs == rhs,
        }
    }
}

struct Sides {
    lhs: ResidueClass,
    rhs: ResidueClass,
    /// The index a per-index check settled on, when the caller left it open.
    index: Option<u64>,
}

impl Sides {
    fn of(lhs: ResidueClass, rhs: ResidueClass) -> Result<Sides> {
        Ok(Sides {
            lhs,
            rhs,
            index: None,
        })
    }
}

type Eval = fn(&Ctx) -> Result<Sides>;
type DomainPredicate = fn(&CheckParams) -> bool;
type TermCount = fn(&CheckParams, u64) -> u64;

pub struct CheckSpec {
    pub id: &'static str,
    /// The congruence in plain notation.
    pub statement: &'static str,
    pub kind: CheckKind,
    pub exponent: ExponentRule,
    pub param: ParamKind,
    /// Whether the check depends on the power `a` (otherwise it is only run at `a = 1`).
    pub uses_a: bool,
    domain: DomainPredicate,
    domain_text: &'static str,
    terms: TermCount,
    eval: Eval,
}

impl fmt::Debug for CheckSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CheckSpec")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("exponent", &self.exponent)
            .finish()
    }
}

impl CheckSpec {
    pub fn domain_text(&self) -> &'static str {
        self.domain_text
    }

    /// Whether `params` lie in the declared domain (ignoring `force`).
    pub fn in_domain(&self, params: &CheckParams) -> bool {
        if !self.uses_a && params.a != 1 {
            return false;
        }
        (self.domain)(params)
    }

    pub fn exponent_for(&self, a: u32) -> u32 {
        match self.exponent {
            ExponentRule::Fixed(e) | ExponentRule::ThreeAdic(e) => e,
            ExponentRule::APlusOne => a + 1,
        }
    }

    /// Number of terms the longest sum of this check would take, or `None` on overflow.
    pub fn term_count(&self, params: &CheckParams) -> Option<u64> {
        let pa = checked_prime_power(params.p, params.a)?;
        Some((self.terms)(params, pa))
    }
}

fn checked_prime_power(p: u64, a: u32) -> Option<u64> {
    let pa = p.checked_pow(a)?;
    // indices such as 9 p^a / 10 must not overflow
    (pa < 1 << 58).then_some(pa)
}

struct Ctx<'a> {
    id: &'static str,
    params: &'a CheckParams,
    p: u64,
    a: u32,
    pa: u64,
    md: Modulus,
}

impl Ctx<'_> {
    fn r(&self, x: i128) -> ResidueClass {
        self.md.residue(x)
    }

    fn inv(&self, x: i128) -> Result<ResidueClass> {
        inv_mod(x, self.md)
    }

    fn half(&self) -> u64 {
        (self.pa - 1) / 2
    }

    fn m(&self) -> i64 {
        self.params.m.expect("validated before evaluation")
    }

    fn lucas(&self) -> LucasParams {
        let (a, b) = self.params.lucas.expect("validated before evaluation");
        LucasParams::new(a, b)
    }

    fn sum(&self, base: i64, upper: u64, weight: WeightKind) -> Result<ResidueClass> {
        evaluate_sum(&SumSpec {
            base,
            upper,
            weight,
            modulus: self.md,
        })
    }

    /// `(n/p^a)` as a residue.
    fn jpa(&self, n: i128) -> ResidueClass {
        self.r(jacobi_prime_power(n, self.p, self.a) as i128)
    }

    fn jp(&self, n: i128) -> i8 {
        jacobi(n, self.p as i128).expect("odd prime")
    }

    /// `(p^a/5) = (p/5)^a`.
    fn five_symbol(&self) -> i8 {
        let j = jacobi(self.p as i128, 5).expect("5 is odd");
        if self.a.is_multiple_of(2) && j == -1 {
            1
        } else {
            j
        }
    }

    /// `(-1)^((p-1)/2)`
    fn minus_one_power(&self) -> i128 {
        if self.p % 4 == 1 {
            1
        } else {
            -1
        }
    }
}

macro_rules! check {
    ($id:literal, $kind:ident, $exp:expr, $param:ident, $uses_a:expr,
     $stmt:literal, $dom_text:literal, $dom:expr, $terms:expr, $eval:expr) => {
        CheckSpec {
            id: $id,
            statement: $stmt,
            kind: CheckKind::$kind,
            exponent: $exp,
            param: ParamKind::$param,
            uses_a: $uses_a,
            domain: $dom,
            domain_text: $dom_text,
            terms: $terms,
            eval: $eval,
        }
    };
}

use ExponentRule::{APlusOne, Fixed, ThreeAdic};

fn any(_: &CheckParams) -> bool {
    true
}

fn half_terms(_: &CheckParams, pa: u64) -> u64 {
    (pa - 1) / 2 + 1
}

fn full_terms(_: &CheckParams, pa: u64) -> u64 {
    pa
}

fn prime_terms(params: &CheckParams, _: u64) -> u64 {
    params.p
}

fn no_terms(_: &CheckParams, _: u64) -> u64 {
    1
}

static REGISTRY: &[CheckSpec] = &[
    check!("T1_1", Theorem, Fixed(3), Plain, true,
        "sum_{k=0}^{(p^a-1)/2} C(2k,k)/(-16)^k = (p^a/5)(1 + F_{p^a-(p^a/5)}/2) mod p^3",
        "p != 5", |c| c.p != 5, half_terms, eval_t1_1),
    check!("T1_2", Theorem, Fixed(3), Plain, true,
        "sum_{k=0}^{(p^a-1)/2} C(2k,k)/(-32)^k = (2/p^a)(1 + (2^{p^a-1}-1)/6 - (2^{p^a-1}-1)^2/8) mod p^3",
        "p != 3", |c| c.p != 3, half_terms, eval_t1_2),
    check!("T2_MAIN", Theorem, Fixed(2), M, true,
        "sum_{k=0}^{(p^a-1)/2} C(2k,k)/m^k = (m(m-4)/p^a) + (-m/p)(m(m-4)/p^{a-1}) mbar u_{p-((4-m)/p)}(4,m) mod p^2",
        "p does not divide m", any, half_terms, eval_t2_main),
    check!("T2_CAT", Theorem, Fixed(2), M, true,
        "sum_{k=0}^{(p^a-1)/2} C_k/m^k = (4-m)/2 sum C(2k,k)/m^k + m/2 - 2p[a=1](-m/p) mod p^2",
        "p does not divide m", any, half_terms, eval_t2_cat),
    check!("C1_1_8", Theorem, Fixed(2), Plain, true,
        "sum_{k=0}^{(p^a-1)/2} C(2k,k)/8^k = (2/p^a) mod p^2",
        "all odd p", any, half_terms, eval_c1_1_8),
    check!("C1_1_16", Theorem, Fixed(2), Plain, true,
        "sum_{k=0}^{(p^a-1)/2} C(2k,k)/16^k = (3/p^a) mod p^2",
        "all odd p", any, half_terms, eval_c1_1_16),
    check!("C1_2", Theorem, Fixed(2), Plain, false,
        "sum_{k=0}^{(p-1)/2} C(2k,k)/((2k-1)^2 16^k) = (-1/p)(3(p/3)+1)/4 mod p^2, equivalently 1, -1/2, -1, 1/2 for p = 1, 5, 7, 11 mod 12",
        "p > 3, a = 1", |c| c.p > 3, |c, _| (c.p - 1) / 2 + 1, eval_c1_2),
    check!("BASIC_P", Theorem, Fixed(1), M, true,
        "sum_{k=0}^{(p^a-1)/2} C(2k,k)/m^k = (m(m-4)/p^a) mod p",
        "p does not divide m", any, half_terms, eval_basic_p),
    check!("WILLIAMS", Auxiliary, Fixed(1), Plain, false,
        "F_{p-(p/5)}/p = (2/5) sum_{k=1}^{floor(4p/5)} (-1)^k/k mod p",
        "p != 5", |c| c.p != 5, prime_terms, eval_williams),
    check!("PANSUN", Auxiliary, Fixed(3), Plain, true,
        "sum_{k=0}^{p^a-1} (-1)^k C(2k,k) = (p^a/5)(1 - 2F_{p^a-(p^a/5)}) mod p^3",
        "p != 5", |c| c.p != 5, full_terms, eval_pansun),
    check!("ADAMCHUK", Conjecture, Fixed(2), Plain, false,
        "sum_{k=1}^{floor(2p/3)} C(2k,k) = 0 mod p^2",
        "p = 1 mod 3", |c| c.p % 3 == 1, prime_terms, eval_adamchuk),
    check!("L2_1", Lemma, Fixed(3), OptionalIndex, true,
        "C((p^a-1)/2+k, 2k) - C(2k,k)/(-16)^k = (-1)^{k-1}(-1/p^a) C(p^a-1-2k, (p^a-1)/2-k) sum_{0<j<=k} p^{2a}/(2j-1)^2 mod p^3",
        "k <= (p^a-1)/2", any, half_terms, eval_l2_1),
    check!("L2_2A", Lemma, Fixed(3), Plain, true,
        "1 + (2^{p^a-1}-1)/6 + (2^{p^a-1}-1)^2/24 = (2/p^a)(2^{p^a}+1)/(3*2^{(p^a-1)/2}) mod p^3",
        "p > 3", |c| c.p > 3, no_terms, eval_l2_2a),
    check!("L2_2B", Lemma, Fixed(4), Plain, true,
        "(L_{p^a}-1)/5 - (p^a/5)F_{p^a} + 1 = -F_{p^a-(p^a/5)}^2/2 mod p^4",
        "p != 5", |c| c.p != 5, no_terms, eval_l2_2b),
    check!("L2_3A", Lemma, Fixed(1), Plain, false,
        "sum_{k=0}^{p-1} (-1)^k C(2k,k) H_k^(2) = (p/5)(5/2)q^2 mod p, q = F_{p-(p/5)}/p",
        "p > 5", |c| c.p > 5, prime_terms, eval_l2_3a),
    check!("L2_3B", Lemma, Fixed(1), Plain, false,
        "sum_{k=0}^{p-1} (-2)^k C(2k,k) H_k^(2) = (2/3)q_p(2)^2 mod p",
        "p > 3", |c| c.p > 3, prime_terms, eval_l2_3b),
    check!("MT_26", Auxiliary, Fixed(1), Plain, false,
        "sum_{k=0}^{p-1} (-1)^k C(2k,k) H_k^(2) = -2 sum_{k=1}^{p-1} u_k(3,1)/k^2 mod p",
        "p > 5", |c| c.p > 5, prime_terms, eval_mt_26),
    check!("MT_27", Auxiliary, Fixed(1), Plain, false,
        "sum_{k=0}^{p-1} (-2)^k C(2k,k) H_k^(2) = -2 sum_{k=1}^{p-1} u_k(5/2,1)/k^2 mod p",
        "p > 3", |c| c.p > 3, prime_terms, eval_mt_27),
    check!("AUX_GRANVILLE", Auxiliary, Fixed(1), Plain, false,
        "sum_{k=1}^{p-1} 2^k/k^2 = -q_p(2)^2 mod p",
        "p > 3", |c| c.p > 3, prime_terms, eval_aux_granville),
    check!("AUX_S08", Auxiliary, Fixed(1), Plain, false,
        "sum_{k=1}^{p-1} 1/(k^2 2^k) = -q_p(2)^2/2 mod p",
        "p > 3", |c| c.p > 3, prime_terms, eval_aux_s08),
    check!("AUX_ST", Auxiliary, Fixed(2), Plain, false,
        "2(L_p - 1) = 5F_{p-(p/5)} mod p^2",
        "p != 5", |c| c.p != 5, no_terms, eval_aux_st),
    check!("AUX_SS", Auxiliary, Fixed(2), Plain, false,
        "L_{p-(5/p)} = 2(p/5) mod p^2",
        "p != 5", |c| c.p != 5, no_terms, eval_aux_ss),
    check!("V_CONG_A", Auxiliary, Fixed(1), Lucas, false,
        "v_p(A,B) = A mod p",
        "all (A,B)", any, no_terms, eval_v_cong_a),
    check!("L3_2", Lemma, Fixed(2), Lucas, false,
        "u_p(A,B) = (A/2)B^{((D/p)-1)/2} u_{p-(D/p)}(A,B) + (D/p)(B^{p-1}+1)/2 mod p^2, D = A^2-4B",
        "p does not divide 2BD", |c| {
            let (a, b) = c.lucas.unwrap_or((0, 0));
            let delta = LucasParams::new(a, b).delta();
            (2 * b as i128 * delta) % c.p as i128 != 0
        }, no_terms, eval_l3_2),
    check!("L3_3", Lemma, Fixed(2), M, true,
        "sum_{k=0}^{(p^a-1)/2} C(2k,k+1)/m^k = (m-2)/2 sum C(2k,k)/m^k - m/2 + 2p[a=1](-m/p) mod p^2",
        "p does not divide m", any, half_terms, eval_l3_3),
    check!("P4_1A", Theorem, APlusOne, M, true,
        "(m-4)/2 sum_{k=0}^{(p^a-1)/2} k C(2k,k)/m^k = sum_{k=0}^{(p^a-1)/2} C(2k,k)/m^k - p^a(-m/p^a) mod p^{a+1}",
        "p does not divide m", any, half_terms, eval_p4_1a),
    check!("P4_1B", Theorem, APlusOne, M, true,
        "(m-4)/2 sum_{k=0}^{p^a-1} k C(2k,k)/m^k = sum_{k=0}^{p^a-1} C(2k,k)/m^k - p^a mod p^{a+1}",
        "p does not divide m", any, full_terms, eval_p4_1b),
    check!("E4_4", Theorem, Fixed(2), Plain, false,
        "sum_{k=0}^{p-1} k C(2k,k)/2^k = p - (-1/p) mod p^2",
        "p > 3", |c| c.p > 3, prime_terms, eval_e4_4),
    check!("E4_5", Theorem, Fixed(2), Plain, false,
        "sum_{k=0}^{p-1} k C(2k,k)/3^k = 2p - 2(p/3) mod p^2",
        "p > 3", |c| c.p > 3, prime_terms, eval_e4_5),
    check!("E4_6", Theorem, Fixed(2), Plain, false,
        "sum_{k=0}^{(p-1)/2} k C(2k,k)/8^k = (2/p)(1 - (-1)^{(p-1)/2} p)/2 mod p^2",
        "p > 3", |c| c.p > 3, prime_terms, eval_e4_6),
    check!("E4_7", Theorem, Fixed(2), Plain, false,
        "sum_{k=0}^{(p-1)/2} k C(2k,k)/16^k = ((3/p) - (-1)^{(p-1)/2} p)/6 mod p^2",
        "p > 3", |c| c.p > 3, prime_terms, eval_e4_7),
    check!("MORLEY", Auxiliary, Fixed(3), Plain, false,
        "C(p-1,(p-1)/2) = (-1)^{(p-1)/2} 4^{p-1} mod p^3",
        "p > 3", |c| c.p > 3, prime_terms, eval_morley),
    check!("CONJ1_1N", Conjecture, ThreeAdic(2), Index, false,
        "sum_{k=0}^n C(2k,k)/16^k / ((2n+1)^2 C(2n,n)) = 1 (3 | n) or 4 (3 does not divide n) mod 9, read 3-adically",
        "p = 3, any n", |c| c.p == 3, |c, _| c.n.unwrap_or(0) + 1, eval_conj1_1n),
    check!("CONJ1_1A", Conjecture, ThreeAdic(3), Plain, true,
        "3^{-2a} sum_{k=0}^{(3^a-1)/2} C(2k,k)/16^k = (-1)^a 10 mod 27",
        "p = 3", |c| c.p == 3, half_terms, eval_conj1_1a),
    check!("CONJ1_2_I", Conjecture, Fixed(2), Plain, true,
        "sum_{k=0}^{floor(5p^a/6)} C(2k,k)/16^k = (3/p^a) mod p^2",
        "p = 1 mod 3 or a > 1", |c| c.p % 3 == 1 || c.a > 1,
        |_, pa| floor_fraction(5, 6, pa) + 1, eval_conj1_2_i),
    check!("CONJ1_2_II_45", Conjecture, Fixed(2), Plain, true,
        "sum_{k=0}^{floor(4p^a/5)} (-1)^k C(2k,k) = (5/p^a) mod p^2",
        "p^a = 1, 2 mod 5, or a > 1 and p != 3 mod 5",
        |c| {
            let r = pow_small(c.p, c.a, 5);
            r == 1 || r == 2 || (c.a > 1 && c.p % 5 != 3)
        },
        |_, pa| floor_fraction(4, 5, pa) + 1, eval_conj1_2_ii_45),
    check!("CONJ1_2_II_35", Conjecture, Fixed(2), Plain, true,
        "sum_{k=0}^{floor(3p^a/5)} (-1)^k C(2k,k) = (5/p^a) mod p^2",
        "p^a = 1, 3 mod 5, or a > 1 and p != 2 mod 5",
        |c| {
            let r = pow_small(c.p, c.a, 5);
            r == 1 || r == 3 || (c.a > 1 && c.p % 5 != 2)
        },
        |_, pa| floor_fraction(3, 5, pa) + 1, eval_conj1_2_ii_35),
    check!("CONJ1_2_III_710", Conjecture, Fixed(2), Plain, true,
        "sum_{k=0}^{floor(7p^a/10)} C(2k,k)/(-16)^k = (5/p^a) mod p^2",
        "p = 1, 7 mod 10 or a > 2",
        |c| c.p % 10 == 1 || c.p % 10 == 7 || c.a > 2,
        |_, pa| floor_fraction(7, 10, pa) + 1, eval_conj1_2_iii_710),
    check!("CONJ1_2_III_910", Conjecture, Fixed(2), Plain, true,
        "sum_{k=0}^{floor(9p^a/10)} C(2k,k)/(-16)^k = (5/p^a) mod p^2",
        "p = 1, 3 mod 10 or a > 2",
        |c| c.p % 10 == 1 || c.p % 10 == 3 || c.a > 2,
        |_, pa| floor_fraction(9, 10, pa) + 1, eval_conj1_2_iii_910),
];

fn pow_small(base: u64, exp: u32, m: u64) -> u64 {
    (0..exp).fold(1 % m, |acc, _| acc * (base % m) % m)
}

/// The full registry in stable order.
pub fn list_checks() -> &'static [CheckSpec] {
    REGISTRY
}

pub fn find_check(id: &str) -> Result<&'static CheckSpec> {
    REGISTRY
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCheckId(id.to_string()))
}

/// Runs a check at its declared exponent.
pub fn run_check(id: &str, params: &CheckParams) -> Result<Verdict> {
    let spec = find_check(id)?;
    run_spec(spec, params, spec.exponent_for(params.a))
}

/// Runs a check at an explicit exponent `e` instead of the declared one.
pub fn run_check_at(id: &str, params: &CheckParams, e: u32) -> Result<Verdict> {
    let spec = find_check(id)?;
    if matches!(spec.exponent, ThreeAdic(_)) {
        return Err(domain(
            id,
            "3-adic conjecture checks have a fixed verdict modulus",
        ));
    }
    run_spec(spec, params, e)
}

fn validate(spec: &CheckSpec, params: &CheckParams) -> Result<()> {
    let id = spec.id;
    if params.a == 0 {
        return Err(domain(id, "a must be at least 1"));
    }
    match spec.param {
        ParamKind::M => {
            let m = params.m.ok_or(Error::MissingParameter {
                id: id.to_string(),
                param: "m",
            })?;
            if params.p != 0 && m as i128 % params.p as i128 == 0 {
                return Err(domain(id, format!("p = {} divides m = {m}", params.p)));
            }
        }
        ParamKind::Lucas => {
            params.lucas.ok_or(Error::MissingParameter {
                id: id.to_string(),
                param: "A,B",
            })?;
        }
        ParamKind::Index => {
            params.n.ok_or(Error::MissingParameter {
                id: id.to_string(),
                param: "n",
            })?;
        }
        ParamKind::Plain | ParamKind::OptionalIndex => {}
    }
    if matches!(spec.exponent, ThreeAdic(_)) && params.p != 3 {
        return Err(domain(id, "stated for p = 3 only"));
    }
    if !params.force && !spec.in_domain(params) {
        return Err(domain(id, format!("requires {}", spec.domain_text)));
    }
    let terms = spec.term_count(params).ok_or(Error::BudgetExceeded {
        terms: u64::MAX,
        budget: params.budget,
    })?;
    if !params.force && terms > params.budget {
        return Err(Error::BudgetExceeded {
            terms,
            budget: params.budget,
        });
    }
    Ok(())
}

fn run_spec(spec: &'static CheckSpec, params: &CheckParams, e: u32) -> Result<Verdict> {
    validate(spec, params)?;
    let md = match spec.exponent {
        // working precision is chosen by the evaluator
        ThreeAdic(_) => Modulus::new(3, 1)?,
        _ => Modulus::new(params.p, e)?,
    };
    let pa = checked_prime_power(params.p, params.a).ok_or(Error::BudgetExceeded {
        terms: u64::MAX,
        budget: params.budget,
    })?;
    let ctx = Ctx {
        id: spec.id,
        params,
        p: params.p,
        a: params.a,
        pa,
        md,
    };
    let sides = (spec.eval)(&ctx)?;
    let mut params = *params;
    if let Some(k) = sides.index {
        params.n = Some(k);
    }
    Ok(Verdict::new(spec.id, params, sides.lhs, sides.rhs))
}

fn eval_t1_1(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(-16, c.half(), WeightKind::None)?;
    let eps = c.five_symbol();
    let f = fibonacci((c.pa as i128 - eps as i128) as u64, c.md);
    let rhs = c.r(eps as i128) * (c.r(1) + f * c.inv(2)?);
    Sides::of(lhs, rhs)
}

/// `1 + t/6 - t^2/8` with `t = 2^{p^a-1} - 1`.
fn eval_t1_2(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(-32, c.half(), WeightKind::None)?;
    let t = c.r(2).pow(c.pa - 1) - c.r(1);
    let rhs = c.jpa(2) * (c.r(1) + t * c.inv(6)? - t * t * c.inv(8)?);
    Sides::of(lhs, rhs)
}

/// `mbar` from the main Theorem: 1, 2 or `2/m` according to `((4-m)/p)`.
pub fn mbar(m: i64, p: u64, e: u32) -> Result<ResidueClass> {
    let md = Modulus::new(p, e)?;
    match jacobi(4 - m as i128, p as i128)? {
        0 => Ok(md.one()),
        1 => Ok(md.residue(2)),
        _ => Ok(md.residue(2) * inv_mod(m as i128, md)?),
    }
}

fn eval_t2_main(c: &Ctx) -> Result<Sides> {
    let m = c.m();
    let lhs = c.sum(m, c.half(), WeightKind::None)?;
    let m128 = m as i128;
    let index = (c.p as i64 - c.jp(4 - m128) as i64) as u64;
    let u = lucas_uv_mod(LucasParams::new(4, m), index, c.md).u;
    let lower = c.r(jacobi_prime_power(m128 * (m128 - 4), c.p, c.a - 1) as i128);
    let rhs = c.jpa(m128 * (m128 - 4))
        + c.r(c.jp(-m128) as i128) * lower * mbar(m, c.p, c.md.exponent())? * u;
    Sides::of(lhs, rhs)
}

/// `2p δ_{a,1} (-m/p)`
fn catalan_correction(c: &Ctx) -> ResidueClass {
    if c.a == 1 {
        c.r(2 * c.p as i128 * c.jp(-(c.m() as i128)) as i128)
    } else {
        c.md.zero()
    }
}

fn eval_t2_cat(c: &Ctx) -> Result<Sides> {
    let m = c.m();
    let lhs = c.sum(m, c.half(), WeightKind::Catalan)?;
    let s = c.sum(m, c.half(), WeightKind::None)?;
    let inv2 = c.inv(2)?;
    let rhs = c.r(4 - m as i128) * inv2 * s + c.r(m as i128) * inv2 - catalan_correction(c);
    Sides::of(lhs, rhs)
}

fn eval_c1_1_8(c: &Ctx) -> Result<Sides> {
    Sides::of(c.sum(8, c.half(), WeightKind::None)?, c.jpa(2))
}

fn eval_c1_1_16(c: &Ctx) -> Result<Sides> {
    Sides::of(c.sum(16, c.half(), WeightKind::None)?, c.jpa(3))
}

/// The four-case table for the weighted sum, by `p mod 12`.
pub fn c1_2_case_table(p: u64, md: Modulus) -> Result<ResidueClass> {
    let half = inv_mod(2, md)?;
    Ok(match p % 12 {
        1 => md.one(),
        5 => -half,
        7 => -md.one(),
        11 => half,
        _ => return Err(domain("C1_2", "p must exceed 3")),
    })
}

fn eval_c1_2(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(16, (c.p - 1) / 2, WeightKind::Inv2kMinus1Sq)?;
    let symbol_form =
        c.r(c.jp(-1) as i128) * (c.r(3 * jacobi(c.p as i128, 3)? as i128) + c.r(1)) * c.inv(4)?;
    let table_form = c1_2_case_table(c.p, c.md)?;
    if symbol_form != table_form {
        return Err(Error::InconsistentForms {
            id: c.id.to_string(),
            p: c.p,
        });
    }
    Sides::of(lhs, symbol_form)
}

fn eval_basic_p(c: &Ctx) -> Result<Sides> {
    let m = c.m() as i128;
    Sides::of(
        c.sum(c.m(), c.half(), WeightKind::None)?,
        c.jpa(m * (m - 4)),
    )
}

fn eval_williams(c: &Ctx) -> Result<Sides> {
    let lhs = fibonacci_quotient(c.p, 1)?;
    let rhs = c.r(2) * c.inv(5)? * alternating_harmonic(floor_fraction(4, 5, c.p), c.md)?;
    Sides::of(lhs, rhs)
}

fn eval_pansun(c: &Ctx) -> Result<Sides> {
    let lhs = signed_central_sum(-1, c.pa - 1, c.md, WeightKind::None)?;
    let eps = c.five_symbol();
    let f = fibonacci((c.pa as i128 - eps as i128) as u64, c.md);
    let rhs = c.r(eps as i128) * (c.r(1) - c.r(2) * f);
    Sides::of(lhs, rhs)
}

fn eval_adamchuk(c: &Ctx) -> Result<Sides> {
    let upper = floor_fraction(2, 3, c.p);
    let lhs = signed_central_sum(1, upper, c.md, WeightKind::None)? - c.r(1);
    Sides::of(lhs, c.md.zero())
}

/// Both sides for every `k` in `0..=(p^a-1)/2`.
fn l2_1_all_sides(c: &Ctx) -> Result<Vec<(ResidueClass, ResidueClass)>> {
    let md = c.md;
    let n0 = c.half();
    // C(2j, j) for j = 0..=n0 serves as C(p^a-1-2k, (p^a-1)/2-k) with j = n0 - k.
    let central: Vec<PadicFactored> = CentralBinomials::new(md)
        .take(n0 as usize + 1)
        .collect::<Result<_>>()?;
    let inv_m16 = c.inv(-16)?;
    let sign_base = c.r(jacobi_prime_power(-1, c.p, c.a) as i128);
    let p2a = 2 * c.a;

    let mut out = Vec::with_capacity(n0 as usize + 1);
    let mut shifted = PadicFactored::one(md); // C(n0 + k, 2k)
    let mut power = md.one(); // (-16)^{-k}
    let mut tail = md.zero(); // sum_{0<j<=k} p^{2a}/(2j-1)^2
    for k in 0..=n0 {
        if k > 0 {
            let odd = padic_normalize(2 * k as i128 - 1, md)?;
            let term = PadicFactored::from_parts(md, p2a, 1)?.div(&odd.mul(&odd)?)?;
            tail += term.to_residue();
        }
        let lhs = shifted.to_residue() - central[k as usize].to_residue() * power;
        let sign = if k % 2 == 1 { md.one() } else { -md.one() };
        let rhs = sign * sign_base * central[(n0 - k) as usize].to_residue() * tail;
        out.push((lhs, rhs));

        if k < n0 {
            let num = padic_normalize((n0 + k + 1) as i128 * (n0 - k) as i128, md)?;
            let den = padic_normalize((2 * k + 1) as i128 * (2 * k + 2) as i128, md)?;
            shifted = shifted.mul(&num)?.div(&den)?;
            power *= inv_m16;
        }
    }
    Ok(out)
}

fn eval_l2_1(c: &Ctx) -> Result<Sides> {
    let all = l2_1_all_sides(c)?;
    let pick = match c.params.n {
        Some(k) => {
            if k > c.half() && !c.params.force {
                return Err(domain(c.id, format!("k = {k} exceeds (p^a-1)/2")));
            }
            k.min(c.half()) as usize
        }
        // the first index with the smallest defect
        None => (0..all.len())
            .min_by_key(|&k| (all[k].0 - all[k].1).valuation())
            .unwrap_or(0),
    };
    let (lhs, rhs) = all[pick];
    Ok(Sides {
        lhs,
        rhs,
        index: Some(pick as u64),
    })
}

fn l2_2a_lhs(c: &Ctx) -> Result<ResidueClass> {
    let t = c.r(2).pow(c.pa - 1) - c.r(1);
    Ok(c.r(1) + t * c.inv(6)? + t * t * c.inv(24)?)
}

fn eval_l2_2a(c: &Ctx) -> Result<Sides> {
    let lhs = l2_2a_lhs(c)?;
    let denom = c.r(3) * c.r(2).pow(c.half());
    let rhs = c.jpa(2) * (c.r(2).pow(c.pa) + c.r(1)) * denom.inv()?;
    Sides::of(lhs, rhs)
}

/// Both sides of the power-of-two lemma with the uncorrected right side
/// `(2/p^a) 2^{p^a+1} / (3 * 2^{(p^a-1)/2})`, which disagrees with direct computation.
pub fn l2_2a_uncorrected_sides(p: u64, a: u32) -> Result<(ResidueClass, ResidueClass)> {
    let params = CheckParams::new(p, a);
    let md = Modulus::new(p, 3)?;
    let pa = checked_prime_power(p, a).ok_or(Error::ModulusTooLarge { p, e: a })?;
    let c = Ctx {
        id: "L2_2A",
        params: &params,
        p,
        a,
        pa,
        md,
    };
    let lhs = l2_2a_lhs(&c)?;
    let denom = c.r(3) * c.r(2).pow(c.half());
    let rhs = c.jpa(2) * c.r(2).pow(pa + 1) * denom.inv()?;
    Ok((lhs, rhs))
}

fn eval_l2_2b(c: &Ctx) -> Result<Sides> {
    let eps = c.five_symbol();
    let pa = lucas_uv_mod(LucasParams::FIBONACCI, c.pa, c.md);
    let (f_pa, l_pa) = (pa.u, pa.v);
    let lhs = (l_pa - c.r(1)) * c.inv(5)? - c.r(eps as i128) * f_pa + c.r(1);
    let f = fibonacci((c.pa as i128 - eps as i128) as u64, c.md);
    let rhs = -(f * f * c.inv(2)?);
    Sides::of(lhs, rhs)
}

fn eval_l2_3a(c: &Ctx) -> Result<Sides> {
    let lhs = signed_central_sum(-1, c.p - 1, c.md, WeightKind::H2)?;
    let q = fibonacci_quotient(c.p, 1)?;
    let eps = jacobi(c.p as i128, 5)?;
    let rhs = c.r(eps as i128) * c.r(5) * c.inv(2)? * q * q;
    Sides::of(lhs, rhs)
}

fn eval_l2_3b(c: &Ctx) -> Result<Sides> {
    let lhs = signed_central_sum(-2, c.p - 1, c.md, WeightKind::H2)?;
    let q = fermat_quotient(2, c.p, 1)?;
    let rhs = c.r(2) * c.inv(3)? * q * q;
    Sides::of(lhs, rhs)
}

fn eval_mt_26(c: &Ctx) -> Result<Sides> {
    let lhs = signed_central_sum(-1, c.p - 1, c.md, WeightKind::H2)?;
    // u_k(3, 1) = F_{2k}, stepped by its own recurrence
    let (mut prev, mut cur) = (c.md.zero(), c.md.one());
    let mut acc = c.md.zero();
    for k in 1..c.p {
        let inv = c.inv(k as i128)?;
        acc += cur * inv * inv;
        (prev, cur) = (cur, c.r(3) * cur - prev);
    }
    Sides::of(lhs, -c.r(2) * acc)
}

fn eval_mt_27(c: &Ctx) -> Result<Sides> {
    let lhs = signed_central_sum(-2, c.p - 1, c.md, WeightKind::H2)?;
    let two = c.r(2);
    let half = c.inv(2)?;
    let scale = two * c.inv(3)?;
    let (mut up, mut down) = (c.md.one(), c.md.one());
    let mut acc = c.md.zero();
    for k in 1..c.p {
        up *= two;
        down *= half;
        let inv = c.inv(k as i128)?;
        acc += scale * (up - down) * inv * inv;
    }
    Sides::of(lhs, -two * acc)
}

fn eval_aux_granville(c: &Ctx) -> Result<Sides> {
    let q = fermat_quotient(2, c.p, 1)?;
    Sides::of(power_over_square_sum(2, 1, c.md)?, -(q * q))
}

fn eval_aux_s08(c: &Ctx) -> Result<Sides> {
    let q = fermat_quotient(2, c.p, 1)?;
    Sides::of(power_over_square_sum(1, 2, c.md)?, -(q * q) * c.inv(2)?)
}

fn eval_aux_st(c: &Ctx) -> Result<Sides> {
    let lhs = c.r(2) * (lucas_number(c.p, c.md) - c.r(1));
    let index = (c.p as i64 - jacobi(c.p as i128, 5)? as i64) as u64;
    Sides::of(lhs, c.r(5) * fibonacci(index, c.md))
}

fn eval_aux_ss(c: &Ctx) -> Result<Sides> {
    let index = (c.p as i64 - c.jp(5) as i64) as u64;
    let lhs = lucas_number(index, c.md);
    Sides::of(lhs, c.r(2 * jacobi(c.p as i128, 5)? as i128))
}

fn eval_v_cong_a(c: &Ctx) -> Result<Sides> {
    let params = c.lucas();
    let lhs = lucas_uv_mod(params, c.p, c.md).v;
    Sides::of(lhs, c.r(params.a as i128))
}

fn eval_l3_2(c: &Ctx) -> Result<Sides> {
    let params = c.lucas();
    let lhs = lucas_uv_mod(params, c.p, c.md).u;
    let s = c.jp(params.delta());
    let index = (c.p as i64 - s as i64) as u64;
    let b = c.r(params.b as i128);
    let b_shift = if s == 1 { c.md.one() } else { b.inv()? };
    let inv2 = c.inv(2)?;
    let rhs = c.r(params.a as i128) * inv2 * b_shift * lucas_uv_mod(params, index, c.md).u
        + c.r(s as i128) * (b.pow(c.p - 1) + c.r(1)) * inv2;
    Sides::of(lhs, rhs)
}

fn eval_l3_3(c: &Ctx) -> Result<Sides> {
    let m = c.m();
    let s = c.sum(m, c.half(), WeightKind::None)?;
    let lhs = s - c.sum(m, c.half(), WeightKind::Catalan)?;
    let inv2 = c.inv(2)?;
    let rhs = c.r(m as i128 - 2) * inv2 * s - c.r(m as i128) * inv2 + catalan_correction(c);
    Sides::of(lhs, rhs)
}

fn eval_p4_1a(c: &Ctx) -> Result<Sides> {
    let m = c.m();
    let lhs = c.r(m as i128 - 4) * c.inv(2)? * c.sum(m, c.half(), WeightKind::LinearK)?;
    let rhs = c.sum(m, c.half(), WeightKind::None)? - c.md.prime_power(c.a) * c.jpa(-(m as i128));
    Sides::of(lhs, rhs)
}

fn eval_p4_1b(c: &Ctx) -> Result<Sides> {
    let m = c.m();
    let lhs = c.r(m as i128 - 4) * c.inv(2)? * c.sum(m, c.pa - 1, WeightKind::LinearK)?;
    let rhs = c.sum(m, c.pa - 1, WeightKind::None)? - c.md.prime_power(c.a);
    Sides::of(lhs, rhs)
}

fn eval_e4_4(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(2, c.p - 1, WeightKind::LinearK)?;
    Sides::of(lhs, c.r(c.p as i128 - c.jp(-1) as i128))
}

fn eval_e4_5(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(3, c.p - 1, WeightKind::LinearK)?;
    let rhs = c.r(2 * c.p as i128 - 2 * jacobi(c.p as i128, 3)? as i128);
    Sides::of(lhs, rhs)
}

fn eval_e4_6(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(8, (c.p - 1) / 2, WeightKind::LinearK)?;
    let rhs = c.r(c.jp(2) as i128) * c.r(1 - c.minus_one_power() * c.p as i128) * c.inv(2)?;
    Sides::of(lhs, rhs)
}

fn eval_e4_7(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(16, (c.p - 1) / 2, WeightKind::LinearK)?;
    let rhs = c.r(c.jp(3) as i128 - c.minus_one_power() * c.p as i128) * c.inv(6)?;
    Sides::of(lhs, rhs)
}

fn eval_morley(c: &Ctx) -> Result<Sides> {
    let half = (c.p - 1) / 2;
    let lhs = CentralBinomials::new(c.md)
        .nth(half as usize)
        .expect("unbounded stream")?
        .to_residue();
    let rhs = c.r(c.minus_one_power()) * c.r(4).pow(c.p - 1);
    Sides::of(lhs, rhs)
}

/// Digit sum of `n` in base 3.
fn ternary_digit_sum(mut n: u64) -> u32 {
    let mut s = 0;
    while n > 0 {
        s += (n % 3) as u32;
        n /= 3;
    }
    s
}

/// Divides a working-precision residue by an exactly known `3^v * unit`, returning the quotient
/// modulo `3^keep`, or zero when the residue is not divisible by `3^v`.
fn three_adic_quotient(
    value: ResidueClass,
    valuation: u32,
    unit: ResidueClass,
    keep: u32,
) -> Result<ResidueClass> {
    let target = Modulus::new(3, keep)?;
    if value.valuation() < valuation {
        return Ok(target.zero());
    }
    let q = value.div_prime_power(valuation)?.reduce_to(target);
    Ok(q * unit.reduce_to(target).inv()?)
}

fn eval_conj1_1n(c: &Ctx) -> Result<Sides> {
    let n = c.params.n.expect("validated");
    let odd = 2 * n as i128 + 1;
    let (v_odd, _) = crate::modarith::split_valuation(odd, 3);
    // Legendre: v_3(C(2n,n)) = (2 s(n) - s(2n)) / 2
    let v_binom = (2 * ternary_digit_sum(n) - ternary_digit_sum(2 * n)) / 2;
    let v = 2 * v_odd + v_binom;
    let work = Modulus::new(3, v + 2)?;

    let inv16 = inv_mod(16, work)?;
    let mut power = work.one();
    let mut acc = work.zero();
    let mut last = PadicFactored::one(work);
    for (k, binom) in CentralBinomials::new(work).take(n as usize + 1).enumerate() {
        let binom = binom?;
        acc += binom.to_residue() * power;
        power *= inv16;
        if k as u64 == n {
            last = binom;
        }
    }
    debug_assert_eq!(last.valuation(), v_binom);
    let odd_f = padic_normalize(odd * odd, work)?;
    let divisor = odd_f.mul(&last)?;
    let lhs = three_adic_quotient(acc, divisor.valuation(), divisor.unit_residue(), 2)?;
    let rhs = lhs
        .modulus()
        .residue(if n.is_multiple_of(3) { 1 } else { 4 });
    Sides::of(lhs, rhs)
}

fn eval_conj1_1a(c: &Ctx) -> Result<Sides> {
    let work = Modulus::new(3, 2 * c.a + 3)?;
    let s = evaluate_sum(&SumSpec {
        base: 16,
        upper: c.half(),
        weight: WeightKind::None,
        modulus: work,
    })?;
    let lhs = three_adic_quotient(s, 2 * c.a, work.one(), 3)?;
    let sign = if c.a.is_multiple_of(2) { 1 } else { -1 };
    let rhs = lhs.modulus().residue(sign * 10);
    Sides::of(lhs, rhs)
}

fn eval_conj1_2_i(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(16, floor_fraction(5, 6, c.pa), WeightKind::None)?;
    Sides::of(lhs, c.jpa(3))
}

fn eval_conj1_2_ii_45(c: &Ctx) -> Result<Sides> {
    let lhs = signed_central_sum(-1, floor_fraction(4, 5, c.pa), c.md, WeightKind::None)?;
    Sides::of(lhs, c.jpa(5))
}

fn eval_conj1_2_ii_35(c: &Ctx) -> Result<Sides> {
    let lhs = signed_central_sum(-1, floor_fraction(3, 5, c.pa), c.md, WeightKind::None)?;
    Sides::of(lhs, c.jpa(5))
}

fn eval_conj1_2_iii_710(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(-16, floor_fraction(7, 10, c.pa), WeightKind::None)?;
    Sides::of(lhs, c.jpa(5))
}

fn eval_conj1_2_iii_910(c: &Ctx) -> Result<Sides> {
    let lhs = c.sum(-16, floor_fraction(9, 10, c.pa), WeightKind::None)?;
    Sides::of(lhs, c.jpa(5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(id: &str, params: CheckParams) -> Verdict {
        run_check(id, &params).unwrap_or_else(|e| panic!("{id}: {e}"))
    }

    #[test]
    fn registry_shape() {
        let checks = list_checks();
        assert!(checks.len() >= 30);
        let t = find_check("T1_1").unwrap();
        assert_eq!(t.kind, CheckKind::Theorem);
        assert_eq!(find_check("CONJ1_2_I").unwrap().kind, CheckKind::Conjecture);
        let mut ids: Vec<_> = checks.iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), checks.len());
        assert!(matches!(find_check("NOPE"), Err(Error::UnknownCheckId(_))));
    }

    #[test]
    fn theorem_one_at_seven() {
        let v = run("T1_1", CheckParams::new(7, 1));
        assert_eq!((v.lhs.value(), v.rhs.value()), (160, 160));
        assert_eq!(v.modulus.value(), 343);
        assert!(v.pass);
        assert_eq!(v.defect_valuation, 3);
    }

    #[test]
    fn spot_values() {
        let v = run("PANSUN", CheckParams::new(3, 1));
        assert_eq!(
            (v.lhs.value(), v.rhs.value(), v.modulus.value()),
            (5, 5, 27)
        );
        let v = run("C1_1_8", CheckParams::new(5, 1));
        assert_eq!((v.lhs.value(), v.rhs.value()), (24, 24));
        let v = run("L2_2A", CheckParams::new(5, 1));
        assert_eq!((v.lhs.value(), v.rhs.value()), (91, 91));
        let v = run("MORLEY", CheckParams::new(5, 1));
        assert_eq!((v.lhs.value(), v.rhs.value()), (6, 6));
    }

    #[test]
    fn uncorrected_power_of_two_form_disagrees() {
        let (lhs, rhs) = l2_2a_uncorrected_sides(5, 1).unwrap();
        assert_eq!((lhs.value(), rhs.value()), (91, 78));
    }

    #[test]
    fn harmonic_lemma_anomaly_at_three() {
        assert!(matches!(
            run_check("L2_3A", &CheckParams::new(3, 1)),
            Err(Error::Domain { .. })
        ));
        let v = run("L2_3A", CheckParams::new(3, 1).forced());
        assert_eq!((v.lhs.value(), v.rhs.value()), (1, 2));
        assert!(!v.pass);
        assert_eq!(v.defect_valuation, 0);
    }

    #[test]
    fn mbar_examples() {
        assert_eq!(mbar(4, 7, 2).unwrap().value(), 1);
        assert_eq!(mbar(4, 13, 1).unwrap().value(), 1);
        assert_eq!(mbar(3, 11, 1).unwrap().value(), 2);
        assert_eq!(mbar(8, 7, 2).unwrap().value(), 37);
    }

    #[test]
    fn domain_and_parameter_errors() {
        assert!(matches!(
            run_check("T1_1", &CheckParams::new(5, 1)),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            run_check("T2_MAIN", &CheckParams::new(7, 1)),
            Err(Error::MissingParameter { .. })
        ));
        assert!(matches!(
            run_check("T2_MAIN", &CheckParams::new(7, 1).with_m(14)),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            run_check("T2_MAIN", &CheckParams::new(7, 1).with_m(14).forced()),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            run_check("T1_1", &CheckParams::new(9, 1)),
            Err(Error::NotOddPrime(9))
        ));
        let mut tight = CheckParams::new(101, 2);
        tight.budget = 100;
        assert!(matches!(
            run_check("T1_1", &tight),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            run_check("CONJ1_1A", &CheckParams::new(5, 1)),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            run_check("C1_2", &CheckParams::new(7, 2)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn corrupted_right_side_fails() {
        // shift the right side by p^(e-1): the defect drops to exactly e-1
        for p in [7u64, 11, 13] {
            let v = run("T1_1", CheckParams::new(p, 1));
            let bumped = v.rhs + v.modulus.prime_power(2);
            let broken = Verdict::new("T1_1", v.params, v.lhs, bumped);
            assert!(!broken.pass);
            assert_eq!(broken.defect_valuation, 2);
        }
    }

    #[test]
    fn conjecture_one_spot_values() {
        let v = run("CONJ1_1N", CheckParams::new(3, 1).with_n(1));
        assert_eq!((v.lhs.value(), v.rhs.value(), v.modulus.value()), (4, 4, 9));
        let v = run("CONJ1_1N", CheckParams::new(3, 1).with_n(0));
        assert_eq!(v.lhs.value(), 1);
        let v = run("CONJ1_1A", CheckParams::new(3, 1));
        assert_eq!(
            (v.lhs.value(), v.rhs.value(), v.modulus.value()),
            (17, 17, 27)
        );
    }

    #[test]
    fn lemma_two_one_reports_index() {
        let v = run("L2_1", CheckParams::new(7, 1).with_n(2));
        assert_eq!(v.params.n, Some(2));
        assert!(v.pass);
        let v = run("L2_1", CheckParams::new(11, 1));
        assert!(v.pass);
        assert!(run_check("L2_1", &CheckParams::new(7, 1).with_n(4)).is_err());
    }

    #[test]
    fn downward_consistency_small() {
        for p in [7u64, 11, 13, 17] {
            for e in 1..=3 {
                assert!(
                    run_check_at("T1_1", &CheckParams::new(p, 1), e)
                        .unwrap()
                        .pass
                );
            }
        }
        assert!(run_check_at("CONJ1_1A", &CheckParams::new(3, 1), 1).is_err());
    }
}
