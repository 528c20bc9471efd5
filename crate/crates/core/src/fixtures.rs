//! Named example varieties.

use crate::variety::{SparsePolynomial, Variety, Weights};

pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub build: fn() -> Variety,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "line2",
        description: "line {z2 = 0} in C^2, weights (1,1), dim 1",
        build: line2,
    },
    Fixture {
        name: "quadric-cone",
        description: "z1*z2 - z3^2 in C^3, weights (1,1,1), dim 2",
        build: quadric_cone,
    },
    Fixture {
        name: "cusp",
        description: "x1^2 - x2^3 in C^2, weights (3,2), dim 1",
        build: cusp,
    },
    Fixture {
        name: "cone6",
        description: "z1^6 - z2^6 in C^2, weights (1,1), dim 1 (cone of the cusp)",
        build: cone6,
    },
];

pub fn by_name(name: &str) -> Option<Variety> {
    FIXTURES.iter().find(|f| f.name == name).map(|f| (f.build)())
}

pub fn line2() -> Variety {
    let q = SparsePolynomial::from_real(2, &[(&[0, 1], 1.0)]).expect("valid polynomial");
    Variety::new(Weights::ones(2).expect("n = 2"), vec![q], Some(1)).expect("homogeneous")
}

pub fn quadric_cone() -> Variety {
    let q = SparsePolynomial::from_real(3, &[(&[1, 1, 0], 1.0), (&[0, 0, 2], -1.0)]).expect("valid polynomial");
    Variety::new(Weights::ones(3).expect("n = 3"), vec![q], Some(2)).expect("homogeneous")
}

pub fn cusp() -> Variety {
    let q = SparsePolynomial::from_real(2, &[(&[2, 0], 1.0), (&[0, 3], -1.0)]).expect("valid polynomial");
    Variety::new(Weights::new(vec![3, 2]).expect("positive"), vec![q], Some(1)).expect("homogeneous")
}

pub fn cone6() -> Variety {
    let q = SparsePolynomial::from_real(2, &[(&[6, 0], 1.0), (&[0, 6], -1.0)]).expect("valid polynomial");
    Variety::new(Weights::ones(2).expect("n = 2"), vec![q], Some(1)).expect("homogeneous")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build_and_cone6_is_theta_cone_of_cusp() {
        for f in FIXTURES {
            assert_eq!(by_name(f.name).unwrap(), (f.build)());
        }
        assert!(by_name("nope").is_none());
        let theta = cusp().theta_cone().unwrap();
        assert_eq!(theta.polynomials(), cone6().polynomials());
    }
}
