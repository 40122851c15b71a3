use super::GraphError;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{CheckedMul, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Integer type usable for moduli and lengths.
pub trait ParamInt:
    Integer + Clone + Debug + Display + CheckedMul + FromPrimitive + ToPrimitive
{
}

impl<T> ParamInt for T where
    T: Integer + Clone + Debug + Display + CheckedMul + FromPrimitive + ToPrimitive
{
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamMode {
    Recipe,
    Explicit,
}

/// Row moduli, middle length and ear length of a cylinder compression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionParams<T> {
    pub k: usize,
    pub c: usize,
    /// Pairwise coprime bases; empty in explicit mode.
    pub bases: Vec<T>,
    pub moduli: Vec<T>,
    pub middle_length: T,
    pub ear_length: usize,
    pub mode: ParamMode,
}

pub type Params = CompressionParams<u64>;
pub type BigParams = CompressionParams<BigUint>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub detail: String,
}

impl Verdict {
    fn pass() -> Self {
        Verdict { holds: true, detail: String::new() }
    }

    fn fail(detail: String) -> Self {
        Verdict { holds: false, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub p1: Verdict,
    pub p2: Verdict,
    pub p3: Verdict,
    pub p4: Verdict,
}

impl PropertyReport {
    pub fn all_hold(&self) -> bool {
        self.p1.holds && self.p2.holds && self.p3.holds && self.p4.holds
    }
}

/// The `len` rows starting at `start` (0-based), wrapping modulo `k`.
pub(crate) fn cyclic_interval(k: usize, start: usize, len: usize) -> Vec<usize> {
    (0..len).map(|t| (start + t) % k).collect()
}

fn gcd_over<T: ParamInt>(moduli: &[T], rows: &[usize]) -> T {
    rows.iter()
        .fold(T::zero(), |acc, &i| acc.gcd(&moduli[i]))
}

fn lcm_over<T: ParamInt>(moduli: &[T], rows: &[usize]) -> T {
    rows.iter().fold(T::one(), |acc, &i| acc.lcm(&moduli[i]))
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The `k` smallest primes in `[n, 2n]`.
pub fn select_coprime_bases(n: u64, k: usize) -> Result<Vec<u64>, GraphError> {
    if n < 2 || k < 1 {
        return Err(GraphError::InvalidRange(format!("n = {n}, k = {k}")));
    }
    let primes: Vec<u64> = (n..=2 * n).filter(|&p| is_prime(p)).take(k).collect();
    if primes.len() < k {
        return Err(GraphError::NotEnoughCoprimes { n, k });
    }
    Ok(primes)
}

fn check_kc(k: usize, c: usize) -> Result<(), GraphError> {
    if k < 2 {
        return Err(GraphError::InvalidRange(format!("k = {k} < 2")));
    }
    if c < 1 || c >= k {
        return Err(GraphError::InvalidRange(format!("c = {c} outside [1, {}]", k - 1)));
    }
    Ok(())
}

/// Recipe parameters from `k` pairwise coprime bases.
pub fn derive_parameters_with_bases<T: ParamInt>(
    k: usize,
    c: usize,
    bases: Vec<T>,
) -> Result<CompressionParams<T>, GraphError> {
    check_kc(k, c)?;
    if bases.len() != k {
        return Err(GraphError::InvalidRange(format!("{} bases for k = {k}", bases.len())));
    }
    for i in 0..k {
        if bases[i] < T::from_u64(2).unwrap() {
            return Err(GraphError::InvalidRange(format!("base {} < 2", bases[i])));
        }
        for j in 0..i {
            if !bases[i].gcd(&bases[j]).is_one() {
                return Err(GraphError::InvalidRange(format!(
                    "bases {} and {} are not coprime",
                    bases[j], bases[i]
                )));
            }
        }
    }
    let lead = T::from_usize(2 * (k + c)).ok_or(GraphError::Overflow)?;
    let product = |rows: Vec<usize>| -> Result<T, GraphError> {
        rows.into_iter().try_fold(lead.clone(), |acc, i| {
            acc.checked_mul(&bases[i]).ok_or(GraphError::Overflow)
        })
    };
    let moduli = (0..k)
        .map(|i| product(cyclic_interval(k, i, c + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let middle_length = product((0..k).collect())?;
    Ok(CompressionParams {
        k,
        c,
        bases,
        moduli,
        middle_length,
        ear_length: k + c + 1,
        mode: ParamMode::Recipe,
    })
}

/// Recipe parameters with the smallest primes in `[n, 2n]` as bases.
pub fn derive_parameters<T: ParamInt>(
    n: u64,
    k: usize,
    c: usize,
) -> Result<CompressionParams<T>, GraphError> {
    check_kc(k, c)?;
    if n <= 4 * k as u64 + 2 {
        return Err(GraphError::InvalidRange(format!("n = {n} must exceed 4k+2 = {}", 4 * k + 2)));
    }
    let bases = select_coprime_bases(n, k)?
        .into_iter()
        .map(|p| T::from_u64(p).ok_or(GraphError::Overflow))
        .collect::<Result<Vec<_>, _>>()?;
    derive_parameters_with_bases(k, c, bases)
}

/// Explicit (toy) parameters. Properties P1–P4 are not enforced here.
pub fn make_explicit_parameters<T: ParamInt>(
    k: usize,
    c: usize,
    moduli: Vec<T>,
    middle_length: T,
    ear_length: usize,
) -> Result<CompressionParams<T>, GraphError> {
    check_kc(k, c)?;
    if moduli.len() != k {
        return Err(GraphError::InvalidRange(format!("{} moduli for k = {k}", moduli.len())));
    }
    if ear_length < 1 {
        return Err(GraphError::InvalidRange("ear length must be positive".into()));
    }
    let two = T::from_u64(2).unwrap();
    for m in &moduli {
        if *m <= two {
            return Err(GraphError::InvalidRange(format!("modulus {m} must exceed 2")));
        }
        if !middle_length.is_multiple_of(m) {
            return Err(GraphError::NonDivisorModulus {
                modulus: m.to_string(),
                middle: middle_length.to_string(),
            });
        }
    }
    Ok(CompressionParams {
        k,
        c,
        bases: Vec::new(),
        moduli,
        middle_length,
        ear_length,
        mode: ParamMode::Explicit,
    })
}

fn subsets_of_size(k: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(k: usize, size: usize, next: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in next..k {
            if k - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(k, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(k, size, 0, &mut cur, &mut out);
    out
}

pub fn verify_parameter_properties<T: ParamInt>(params: &CompressionParams<T>) -> PropertyReport {
    let k = params.k;
    let c = params.c;
    let m = &params.moduli;
    let all: Vec<usize> = (0..k).collect();

    let g_all = gcd_over(m, &all);
    let need = T::from_usize(2 * (k + c)).unwrap();
    let p1 = if g_all >= need {
        Verdict::pass()
    } else {
        Verdict::fail(format!("gcd of all moduli is {g_all} < 2(k+c) = {need}"))
    };

    let mut p2 = Verdict::pass();
    'outer: for i in 0..k {
        for a in 1..=c {
            for b in 1..=(c + 1 - a) {
                let before = cyclic_interval(k, (i + k - a) % k, a + 1);
                let after = cyclic_interval(k, i, b + 1);
                let l = gcd_over(m, &before).lcm(&gcd_over(m, &after));
                if !l.is_multiple_of(&m[i]) {
                    p2 = Verdict::fail(format!(
                        "row {}: m = {} does not divide lcm(g[{}..], g[..{}]) = {l}",
                        i + 1,
                        m[i],
                        a,
                        b
                    ));
                    break 'outer;
                }
            }
        }
    }

    // Monotonicity of lcm means checking sets of size exactly k-c suffices,
    // provided every modulus divides L.
    let mut p3 = Verdict::pass();
    if let Some(bad) = m.iter().find(|mi| !params.middle_length.is_multiple_of(mi)) {
        p3 = Verdict::fail(format!("modulus {bad} does not divide L"));
    } else {
        for set in subsets_of_size(k, k - c) {
            let l = lcm_over(m, &set);
            if l != params.middle_length {
                let rows: Vec<usize> = set.iter().map(|i| i + 1).collect();
                p3 = Verdict::fail(format!("lcm over rows {rows:?} is {l} != L"));
                break;
            }
        }
    }

    let p4 = if params.ear_length > k + c {
        Verdict::pass()
    } else {
        Verdict::fail(format!("r = {} is not greater than k+c = {}", params.ear_length, k + c))
    };
    PropertyReport { p1, p2, p3, p4 }
}

impl<T: ParamInt> CompressionParams<T> {
    /// gcd of the moduli over the given (0-based) rows.
    pub fn gcd_of_rows(&self, rows: &[usize]) -> T {
        gcd_over(&self.moduli, rows)
    }

    /// Converts to machine-word parameters, failing if any value does not fit.
    pub fn to_machine(&self) -> Result<CompressionParams<usize>, GraphError> {
        let conv = |x: &T| x.to_usize().ok_or_else(|| GraphError::TooLarge(x.to_string()));
        Ok(CompressionParams {
            k: self.k,
            c: self.c,
            bases: self.bases.iter().map(conv).collect::<Result<_, _>>()?,
            moduli: self.moduli.iter().map(conv).collect::<Result<_, _>>()?,
            middle_length: conv(&self.middle_length)?,
            ear_length: self.ear_length,
            mode: self.mode,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy3() -> Params {
        make_explicit_parameters(3, 1, vec![48, 120, 80], 240, 5).unwrap()
    }

    #[test]
    fn coprime_bases() {
        assert_eq!(select_coprime_bases(2, 2).unwrap(), vec![2, 3]);
        assert_eq!(select_coprime_bases(11, 3).unwrap(), vec![11, 13, 17]);
        assert_eq!(
            select_coprime_bases(5, 3),
            Err(GraphError::NotEnoughCoprimes { n: 5, k: 3 })
        );
    }

    #[test]
    fn recipe_with_injected_bases_matches_toy() {
        let p = derive_parameters_with_bases::<u64>(3, 1, vec![2, 3, 5]).unwrap();
        assert_eq!(p.moduli, vec![48, 120, 80]);
        assert_eq!(p.middle_length, 240);
        assert_eq!(p.ear_length, 5);
        assert!(verify_parameter_properties(&p).all_hold());
        assert!(verify_parameter_properties(&toy3()).all_hold());
    }

    #[test]
    fn no_compression_when_c_is_maximal() {
        let p = derive_parameters::<u64>(15, 3, 2).unwrap();
        assert!(p.moduli.iter().all(|m| *m == p.middle_length));
    }

    #[test]
    fn range_errors() {
        assert!(matches!(derive_parameters::<u64>(20, 2, 0), Err(GraphError::InvalidRange(_))));
        assert!(matches!(derive_parameters::<u64>(10, 2, 1), Err(GraphError::InvalidRange(_))));
        assert!(matches!(
            make_explicit_parameters::<u64>(2, 1, vec![7, 15], 30, 3),
            Err(GraphError::NonDivisorModulus { .. })
        ));
    }

    #[test]
    fn toy_two_row_report() {
        let p = make_explicit_parameters::<u64>(2, 1, vec![6, 15], 30, 3).unwrap();
        let rep = verify_parameter_properties(&p);
        assert!(!rep.p1.holds);
        assert!(!rep.p4.holds);
    }

    #[test]
    fn p2_instance_row_two() {
        let p = toy3();
        let l = p.gcd_of_rows(&[0, 1]).lcm(&p.gcd_of_rows(&[1, 2]));
        assert_eq!(l, 120);
    }

    #[test]
    fn p4_is_strict() {
        let p = make_explicit_parameters::<u64>(3, 1, vec![48, 120, 80], 240, 4).unwrap();
        assert!(!verify_parameter_properties(&p).p4.holds);
    }

    #[test]
    fn big_integer_recipe() {
        let p = derive_parameters::<BigUint>(101, 6, 3).unwrap();
        assert!(verify_parameter_properties(&p).all_hold());
        assert!(p.to_machine().is_ok());
        let huge = derive_parameters::<BigUint>(1_000_003, 8, 2).unwrap();
        assert!(verify_parameter_properties(&huge).all_hold());
    }

    #[test]
    fn u64_overflow_is_reported() {
        assert_eq!(derive_parameters::<u64>(1_000_003, 8, 2), Err(GraphError::Overflow));
    }
}
