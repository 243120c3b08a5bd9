//! Bounded real-valued genotypes and the variation operators applied to them.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Genotype {
    values: Vec<f64>,
    lb: f64,
    ub: f64,
}

fn check_bounds(lb: f64, ub: f64) -> Result<()> {
    if !(lb.is_finite() && ub.is_finite() && lb < ub) {
        return Err(Error::InvalidBounds { lb, ub });
    }
    Ok(())
}

impl Genotype {
    /// Wraps `values`, clamping each into `[lb, ub]`.
    pub fn new(values: Vec<f64>, lb: f64, ub: f64) -> Result<Self> {
        check_bounds(lb, ub)?;
        if values.is_empty() {
            return Err(Error::EmptyGenotype);
        }
        let mut g = Self { values, lb, ub };
        g.clamp();
        Ok(g)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lb, self.ub)
    }

    fn clamp(&mut self) {
        let (lb, ub) = (self.lb, self.ub);
        for v in &mut self.values {
            // NaN is not expected; map it to lb so the invariant still holds.
            *v = if v.is_nan() { lb } else { v.clamp(lb, ub) };
        }
    }

    fn check_compatible(&self, other: &Genotype) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        if self.bounds() != other.bounds() {
            return Err(Error::InvalidParam(format!(
                "parents have different bounds {:?} and {:?}",
                self.bounds(),
                other.bounds()
            )));
        }
        Ok(())
    }

    /// In-place Gaussian perturbation followed by clamping.
    pub fn mutate<R: Rng + ?Sized>(&mut self, mr: f64, rng: &mut R) -> Result<()> {
        check_mr(mr)?;
        for v in &mut self.values {
            let z: f64 = rng.sample(StandardNormal);
            *v += mr * z;
        }
        self.clamp();
        Ok(())
    }
}

/// Crossover probability, crossover rate and mutation standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub cp: f64,
    pub cr: f64,
    pub mr: f64,
}

impl OperatorParams {
    pub fn new(cp: f64, cr: f64, mr: f64) -> Result<Self> {
        let p = Self { cp, cr, mr };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.cp) {
            return Err(Error::InvalidParam(format!("cp = {} not in [0, 1]", self.cp)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::InvalidParam(format!("cr = {} not in [0, 1]", self.cr)));
        }
        check_mr(self.mr)
    }
}

fn check_mr(mr: f64) -> Result<()> {
    if !(mr > 0.0 && mr.is_finite()) {
        return Err(Error::InvalidParam(format!("mr = {mr} must be positive")));
    }
    Ok(())
}

/// Genotype of `len` genes drawn i.i.d. uniform on `[lb, ub]`.
pub fn random_init<R: Rng + ?Sized>(len: usize, lb: f64, ub: f64, rng: &mut R) -> Result<Genotype> {
    check_bounds(lb, ub)?;
    if len == 0 {
        return Err(Error::EmptyGenotype);
    }
    let values = (0..len).map(|_| rng.random_range(lb..=ub)).collect();
    Ok(Genotype { values, lb, ub })
}

/// Copies `partner`, then overwrites each position with the gene of
/// `self_g` with probability `cr`. The caller decides whether crossover
/// fires at all.
pub fn uniform_crossover<R: Rng + ?Sized>(
    self_g: &Genotype,
    partner: &Genotype,
    cr: f64,
    rng: &mut R,
) -> Result<Genotype> {
    self_g.check_compatible(partner)?;
    let mut child = partner.clone();
    for (c, &s) in child.values.iter_mut().zip(&self_g.values) {
        if rng.random::<f64>() < cr {
            *c = s;
        }
    }
    Ok(child)
}

/// Mean of two single-gene parents.
pub fn arithmetic_crossover(self_g: &Genotype, partner: &Genotype) -> Result<Genotype> {
    self_g.check_compatible(partner)?;
    if self_g.len() != 1 {
        return Err(Error::LengthMismatch {
            expected: 1,
            actual: self_g.len(),
        });
    }
    let mut child = self_g.clone();
    child.values[0] = (self_g.values[0] + partner.values[0]) / 2.0;
    Ok(child)
}

pub fn gaussian_mutate<R: Rng + ?Sized>(g: &Genotype, mr: f64, rng: &mut R) -> Result<Genotype> {
    let mut out = g.clone();
    out.mutate(mr, rng)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn g(values: &[f64], lb: f64, ub: f64) -> Genotype {
        Genotype::new(values.to_vec(), lb, ub).unwrap()
    }

    #[test]
    fn random_init_within_bounds() {
        let mut rng = seeded(1);
        let x = random_init(3, 0.0, 1.0, &mut rng).unwrap();
        assert_eq!(x.len(), 3);
        assert!(x.values().iter().all(|v| (0.0..=1.0).contains(v)));
        let y = random_init(1, 0.0, 50.0, &mut rng).unwrap();
        assert!((0.0..=50.0).contains(&y.values()[0]));
    }

    #[test]
    fn random_init_mean() {
        let mut rng = seeded(2);
        let x = random_init(100_000, 0.0, 1.0, &mut rng).unwrap();
        let mean = x.values().iter().sum::<f64>() / x.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn random_init_rejects_bad_input() {
        let mut rng = seeded(0);
        assert!(matches!(
            random_init(3, 1.0, 1.0, &mut rng),
            Err(Error::InvalidBounds { .. })
        ));
        assert!(matches!(
            random_init(3, 2.0, 1.0, &mut rng),
            Err(Error::InvalidBounds { .. })
        ));
        assert!(matches!(random_init(0, 0.0, 1.0, &mut rng), Err(Error::EmptyGenotype)));
    }

    #[test]
    fn crossover_rate_extremes() {
        let mut rng = seeded(3);
        let a = random_init(50, 0.0, 1.0, &mut rng).unwrap();
        let b = random_init(50, 0.0, 1.0, &mut rng).unwrap();
        assert_eq!(uniform_crossover(&a, &b, 0.0, &mut rng).unwrap(), b);
        assert_eq!(uniform_crossover(&a, &b, 1.0, &mut rng).unwrap(), a);
    }

    #[test]
    fn crossover_rate_half_mixes_evenly() {
        let n = 10_000;
        let a = g(&vec![1.0; n], 0.0, 1.0);
        let b = g(&vec![0.0; n], 0.0, 1.0);
        let child = uniform_crossover(&a, &b, 0.5, &mut seeded(4)).unwrap();
        let frac = child.values().iter().sum::<f64>() / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "fraction {frac}");
    }

    #[test]
    fn crossover_length_mismatch() {
        let a = g(&[0.1, 0.2], 0.0, 1.0);
        let b = g(&[0.1], 0.0, 1.0);
        assert!(matches!(
            uniform_crossover(&a, &b, 0.5, &mut seeded(0)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn arithmetic_crossover_mean() {
        let c = arithmetic_crossover(&g(&[3.0], 0.0, 50.0), &g(&[5.0], 0.0, 50.0)).unwrap();
        assert_eq!(c.values(), [4.0]);
        let c = arithmetic_crossover(&g(&[0.0], 0.0, 50.0), &g(&[50.0], 0.0, 50.0)).unwrap();
        assert_eq!(c.values(), [25.0]);
        let c = arithmetic_crossover(&g(&[17.25], 0.0, 50.0), &g(&[17.25], 0.0, 50.0)).unwrap();
        assert_eq!(c.values(), [17.25]);
        let long = g(&[1.0, 2.0], 0.0, 50.0);
        assert!(arithmetic_crossover(&long, &long).is_err());
    }

    #[test]
    fn mutation_tiny_sigma_is_identity() {
        let x = g(&[0.0, 0.25, 1.0], 0.0, 1.0);
        let y = gaussian_mutate(&x, 1e-300, &mut seeded(5)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn mutation_clamps_at_upper_bound() {
        let x = g(&[1.0; 64], 0.0, 1.0);
        let y = gaussian_mutate(&x, 1e6, &mut seeded(6)).unwrap();
        assert!(y.values().iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(y.values().contains(&1.0));
    }

    #[test]
    fn mutation_variance() {
        let n = 100_000;
        let mr = 0.01;
        let x = g(&vec![0.5; n], 0.0, 1.0);
        let y = gaussian_mutate(&x, mr, &mut seeded(7)).unwrap();
        let d: Vec<f64> = y.values().iter().map(|v| v - 0.5).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var / (mr * mr) - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn mutation_rejects_nonpositive_sigma() {
        let x = g(&[0.5], 0.0, 1.0);
        assert!(gaussian_mutate(&x, 0.0, &mut seeded(0)).is_err());
        assert!(gaussian_mutate(&x, -1.0, &mut seeded(0)).is_err());
    }

    #[test]
    fn operator_params_ranges() {
        assert!(OperatorParams::new(0.5, 0.5, 0.01).is_ok());
        assert!(OperatorParams::new(1.5, 0.5, 0.01).is_err());
        assert!(OperatorParams::new(0.5, -0.1, 0.01).is_err());
        assert!(OperatorParams::new(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn copy_then_mutate_equals_zero_rate_crossover_then_mutate() {
        let mut r = seeded(8);
        let a = random_init(20, 0.0, 1.0, &mut r).unwrap();
        let b = random_init(20, 0.0, 1.0, &mut r).unwrap();
        let via_xover = {
            let child = uniform_crossover(&a, &b, 0.0, &mut seeded(9)).unwrap();
            gaussian_mutate(&child, 0.05, &mut seeded(10)).unwrap()
        };
        let via_copy = gaussian_mutate(&b, 0.05, &mut seeded(10)).unwrap();
        assert_eq!(via_xover, via_copy);
    }

    proptest! {
        #[test]
        fn operators_preserve_bounds(
            seed in any::<u64>(),
            len in 1usize..40,
            lb in -5.0f64..0.0,
            width in 0.1f64..10.0,
            cr in 0.0f64..=1.0,
            mr in 1e-6f64..20.0,
        ) {
            let ub = lb + width;
            let mut rng = seeded(seed);
            let a = random_init(len, lb, ub, &mut rng).unwrap();
            let b = random_init(len, lb, ub, &mut rng).unwrap();
            let c = uniform_crossover(&a, &b, cr, &mut rng).unwrap();
            let m = gaussian_mutate(&c, mr, &mut rng).unwrap();
            for v in a.values().iter().chain(c.values()).chain(m.values()) {
                prop_assert!(*v >= lb && *v <= ub);
            }
        }

        #[test]
        fn operators_are_pure_given_seed(seed in any::<u64>(), mr in 1e-4f64..1.0) {
            let x = random_init(16, 0.0, 1.0, &mut seeded(seed)).unwrap();
            let p = random_init(16, 0.0, 1.0, &mut seeded(seed ^ 1)).unwrap();
            let run = || {
                let mut r = seeded(seed.wrapping_add(1));
                let c = uniform_crossover(&x, &p, 0.3, &mut r).unwrap();
                gaussian_mutate(&c, mr, &mut r).unwrap()
            };
            prop_assert_eq!(run(), run());
        }
    }
}
