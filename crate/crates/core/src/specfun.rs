//! Gamma-law distribution functions at integer shape, order statistics of
//! i.i.d. Gamma variables and the multinomial power-series coefficients used to
//! expand them.

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::real::{CompensatedSum, Real};

const EXACT_FACTORIALS: usize = 21;

/// `ln(n!)`, summed directly.
pub fn ln_factorial<T: Real>(n: usize) -> T {
    (2..=n).map(|k| T::count(k).ln()).fold(T::zero(), |a, b| a + b)
}

/// `n!`, exact up to `20!` and through `exp(ln n!)` above.
pub fn factorial<T: Real>(n: usize) -> T {
    if n < EXACT_FACTORIALS {
        let mut f: u64 = 1;
        for k in 2..=n as u64 {
            f *= k;
        }
        T::from_u64(f).expect("factorial representable")
    } else {
        ln_factorial::<T>(n).exp()
    }
}

/// `Γ(n)` for a positive integer `n`.
pub fn gamma_int<T: Real>(n: usize) -> T {
    assert!(n >= 1, "gamma_int requires n >= 1");
    factorial(n - 1)
}

pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::count(n - i) / T::count(i + 1);
    }
    acc.round()
}

/// Coefficients of `x^n1` in `(Σ_{n<K} x^n / n!)^s1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialTable<T> {
    pub power: usize,
    pub terms: usize,
    coeffs: Vec<T>,
}

impl<T> MultinomialTable<T> {
    /// Highest power with a non-zero coefficient, `s1 (K - 1)`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn get(&self, n1: usize) -> Option<&T> {
        self.coeffs.get(n1)
    }
}

impl<T: Real> MultinomialTable<T> {
    /// Evaluates the polynomial at `x` by Horner's rule.
    pub fn evaluate(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }
}

/// Builds the table by repeated convolution with the truncated exponential
/// series. Works for any exact or floating field, including big rationals.
pub fn multinomial_coeffs<T>(s1: usize, k: usize) -> MultinomialTable<T>
where
    T: Num + Clone + FromPrimitive,
{
    assert!(k >= 1, "series length must be positive");
    let mut base: Vec<T> = Vec::with_capacity(k);
    base.push(T::one());
    for n in 1..k {
        let prev = base[n - 1].clone();
        base.push(prev / T::from_usize(n).expect("index representable"));
    }

    let mut coeffs = vec![T::one()];
    for _ in 0..s1 {
        let mut next = vec![T::zero(); coeffs.len() + k - 1];
        for (i, a) in coeffs.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                next[i + j] = next[i + j].clone() + a.clone() * b.clone();
            }
        }
        coeffs = next;
    }
    MultinomialTable {
        power: s1,
        terms: k,
        coeffs,
    }
}

/// Gamma distribution with positive integer shape, parameterised by rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLaw<T> {
    pub shape: usize,
    pub rate: T,
}

impl<T: Real> GammaLaw<T> {
    pub fn new(shape: usize, rate: T) -> Self {
        assert!(shape >= 1, "gamma shape must be a positive integer");
        assert!(rate > T::zero(), "gamma rate must be positive");
        Self { shape, rate }
    }

    pub fn with_scale(shape: usize, scale: T) -> Self {
        Self::new(shape, scale.recip())
    }

    pub fn mean(&self) -> T {
        T::count(self.shape) / self.rate
    }

    pub fn scale(&self) -> T {
        self.rate.recip()
    }

    pub fn cdf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        let t = x * self.rate;
        if t < T::count(self.shape) {
            lower_tail_series(self.shape, t)
        } else {
            T::one() - upper_tail_sum(self.shape, t)
        }
    }

    pub fn sf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::one();
        }
        let t = x * self.rate;
        if t < T::count(self.shape) {
            T::one() - lower_tail_series(self.shape, t)
        } else {
            upper_tail_sum(self.shape, t)
        }
    }

    pub fn pdf(&self, x: T) -> T {
        if x < T::zero() {
            return T::zero();
        }
        if x == T::zero() {
            return if self.shape == 1 { self.rate } else { T::zero() };
        }
        self.ln_pdf(x).exp()
    }

    pub fn ln_pdf(&self, x: T) -> T {
        let k = T::count(self.shape);
        k * self.rate.ln() + (k - T::one()) * x.ln() - self.rate * x - ln_factorial::<T>(self.shape - 1)
    }
}

/// `e^{-t} Σ_{n ≥ k} t^n / n!`, accurate when `t < k`.
fn lower_tail_series<T: Real>(k: usize, t: T) -> T {
    let lead = (T::count(k) * t.ln() - t - ln_factorial::<T>(k)).exp();
    if lead == T::zero() {
        return T::zero();
    }
    let mut sum = T::one();
    let mut term = T::one();
    let mut n = k;
    loop {
        n += 1;
        term = term * t / T::count(n);
        sum = sum + term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    lead * sum
}

/// `e^{-t} Σ_{n < k} t^n / n!`.
fn upper_tail_sum<T: Real>(k: usize, t: T) -> T {
    let mut sum = T::one();
    let mut term = T::one();
    for n in 1..k {
        term = term * t / T::count(n);
        sum = sum + term;
    }
    (-t).exp() * sum
}

/// `1 - e^{-x/θ} Σ_{n<k} (x/θ)^n / n!`.
pub fn gamma_norm_cdf<T: Real>(x: T, shape: usize, scale: T) -> T {
    GammaLaw::with_scale(shape, scale).cdf(x)
}

pub fn gamma_norm_pdf<T: Real>(x: T, shape: usize, scale: T) -> T {
    GammaLaw::with_scale(shape, scale).pdf(x)
}

/// One term `coef · x^power · e^{-rate_mult · β x}` of an order-statistic
/// expansion, with `β` the rate of the parent Gamma law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerm<T> {
    pub coef: T,
    pub power: usize,
    pub rate_mult: usize,
}

/// Distribution of the `order`-th smallest of `users` i.i.d. Gamma variables.
#[derive(Debug, Clone)]
pub struct OrderStatistic<T> {
    pub users: usize,
    pub order: usize,
    pub law: GammaLaw<T>,
    pdf_terms: Vec<ExpansionTerm<T>>,
    cdf_terms: Vec<ExpansionTerm<T>>,
}

impl<T: Real> OrderStatistic<T> {
    pub fn new(order: usize, users: usize, law: GammaLaw<T>) -> Result<Self> {
        if order == 0 || order > users {
            return Err(Error::Order { order, users });
        }
        let pdf_terms = expand_pdf(order, users, &law);
        let cdf_terms = expand_cdf(order, users, &law);
        Ok(Self {
            users,
            order,
            law,
            pdf_terms,
            cdf_terms,
        })
    }

    /// `L! / ((L-l)! (l-1)!)`.
    pub fn leading_factor(&self) -> T {
        order_factor(self.order, self.users)
    }

    /// Expansion of the density, grouped by `(power, rate multiple)`.
    pub fn pdf_terms(&self) -> &[ExpansionTerm<T>] {
        &self.pdf_terms
    }

    /// Expansion of `1 - F(x)` (the survival function), grouped likewise.
    pub fn sf_terms(&self) -> &[ExpansionTerm<T>] {
        &self.cdf_terms
    }

    pub fn pdf(&self, x: T) -> T {
        if x < T::zero() {
            return T::zero();
        }
        eval_terms(&self.pdf_terms, self.law.rate, x)
    }

    pub fn sf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::one();
        }
        clamp_unit(eval_terms(&self.cdf_terms, self.law.rate, x))
    }

    pub fn cdf(&self, x: T) -> T {
        T::one() - self.sf(x)
    }

    /// Density via `Q_l f F^{l-1} (1-F)^{L-l}`; no series expansion involved.
    pub fn pdf_binomial(&self, x: T) -> T {
        if x < T::zero() {
            return T::zero();
        }
        let f = self.law.pdf(x);
        let lower = self.law.cdf(x);
        let upper = self.law.sf(x);
        self.leading_factor() * f * lower.powi((self.order - 1) as i32) * upper.powi((self.users - self.order) as i32)
    }

    /// CDF via `Σ_{i ≥ l} C(L,i) F^i (1-F)^{L-i}`.
    pub fn cdf_binomial(&self, x: T) -> T {
        let lower = self.law.cdf(x);
        let upper = self.law.sf(x);
        (self.order..=self.users)
            .map(|i| {
                binomial::<T>(self.users, i) * lower.powi(i as i32) * upper.powi((self.users - i) as i32)
            })
            .fold(T::zero(), |a, b| a + b)
            .min(T::one())
    }

    pub fn sf_binomial(&self, x: T) -> T {
        let lower = self.law.cdf(x);
        let upper = self.law.sf(x);
        (0..self.order)
            .map(|i| {
                binomial::<T>(self.users, i) * lower.powi(i as i32) * upper.powi((self.users - i) as i32)
            })
            .fold(T::zero(), |a, b| a + b)
            .min(T::one())
    }
}

/// Rounding in a sum of probabilities can step an ulp outside `[0, 1]`.
fn clamp_unit<T: Real>(p: T) -> T {
    p.max(T::zero()).min(T::one())
}

fn order_factor<T: Real>(order: usize, users: usize) -> T {
    factorial::<T>(users) / (factorial::<T>(users - order) * factorial::<T>(order - 1))
}

fn eval_terms<T: Real>(terms: &[ExpansionTerm<T>], rate: T, x: T) -> T {
    let mut acc = CompensatedSum::new();
    let bx = rate * x;
    for t in terms {
        acc.add(t.coef * x.powi(t.power as i32) * (-(bx * T::count(t.rate_mult))).exp());
    }
    acc.value()
}

fn push_grouped<T: Real>(terms: &mut Vec<ExpansionTerm<T>>, coef: T, power: usize, rate_mult: usize) {
    if let Some(t) = terms
        .iter_mut()
        .find(|t| t.power == power && t.rate_mult == rate_mult)
    {
        t.coef = t.coef + coef;
    } else {
        terms.push(ExpansionTerm {
            coef,
            power,
            rate_mult,
        });
    }
}

fn sign<T: Real>(exponent: usize) -> T {
    if exponent % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

fn expand_pdf<T: Real>(order: usize, users: usize, law: &GammaLaw<T>) -> Vec<ExpansionTerm<T>> {
    let k = law.shape;
    let beta = law.rate;
    let q = order_factor::<T>(order, users);
    let head = beta.powi(k as i32) / gamma_int::<T>(k);
    let mut terms = Vec::new();
    for s in 0..=users - order {
        let top = order + s - 1;
        for s1 in 0..=top {
            let table = multinomial_coeffs::<T>(s1, k);
            let outer = q
                * binomial::<T>(users - order, s)
                * binomial::<T>(top, s1)
                * sign::<T>(s + s1)
                * head;
            for (n1, theta) in table.coeffs().iter().enumerate() {
                let coef = outer * *theta * beta.powi(n1 as i32);
                push_grouped(&mut terms, coef, n1 + k - 1, s1 + 1);
            }
        }
    }
    terms
}

fn expand_cdf<T: Real>(order: usize, users: usize, law: &GammaLaw<T>) -> Vec<ExpansionTerm<T>> {
    let k = law.shape;
    let beta = law.rate;
    let q = order_factor::<T>(order, users);
    let mut terms = Vec::new();
    for s in 0..=users - order {
        let top = order + s;
        for s1 in 1..=top {
            let table = multinomial_coeffs::<T>(s1, k);
            // 1 - F = Q Σ C(L-l,s) C(l+s,s1) (-1)^{s+s1-1} / (l+s) ...
            let outer = q * binomial::<T>(users - order, s) * binomial::<T>(top, s1) * sign::<T>(s + s1 - 1)
                / T::count(top);
            for (n1, theta) in table.coeffs().iter().enumerate() {
                let coef = outer * *theta * beta.powi(n1 as i32);
                push_grouped(&mut terms, coef, n1, s1);
            }
        }
    }
    terms
}

/// CDF of the `order`-th smallest of `users` i.i.d. Gamma(shape, scale) draws.
pub fn ordered_cdf<T: Real>(x: T, order: usize, users: usize, shape: usize, scale: T) -> Result<T> {
    Ok(OrderStatistic::new(order, users, GammaLaw::with_scale(shape, scale))?.cdf(x))
}

pub fn ordered_pdf<T: Real>(x: T, order: usize, users: usize, shape: usize, scale: T) -> Result<T> {
    Ok(OrderStatistic::new(order, users, GammaLaw::with_scale(shape, scale))?.pdf(x))
}
