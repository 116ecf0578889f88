//! Ordered kita catalogs. Catalog order breaks ties between equally long
//! solutions, so it is part of the observable behaviour.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::kita::{Kita, Op};
use crate::value::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown catalog profile `{0}`")]
    UnknownProfile(String),
    #[error("catalog does not start with BAS")]
    MissingBas,
    #[error("kita `{0}` listed twice")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    kitas: Vec<Kita>,
}

/// Named built-in catalogs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Shallow-search catalog for short puzzle series.
    Iq,
    /// Same kitas as `Iq`, intended for depth-2 searches over OEIS data.
    OeisDepth2,
    /// Reduced catalog that keeps depth-4 searches tractable.
    OeisDeep,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::Iq, Profile::OeisDepth2, Profile::OeisDeep];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Iq => "iq",
            Profile::OeisDepth2 => "oeis-depth2",
            Profile::OeisDeep => "oeis-deep",
        }
    }
}

impl FromStr for Profile {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Profile, CatalogError> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CatalogError::UnknownProfile(s.to_string()))
    }
}

fn foc(skip: usize, arity: usize) -> Kita {
    Kita::Foc {
        skip,
        parts: vec![1; arity],
    }
}

const OP_PAIRS: [(Op, Op); 12] = [
    (Op::Add, Op::Sub),
    (Op::Add, Op::Mul),
    (Op::Add, Op::Div),
    (Op::Sub, Op::Add),
    (Op::Sub, Op::Mul),
    (Op::Sub, Op::Div),
    (Op::Mul, Op::Add),
    (Op::Mul, Op::Sub),
    (Op::Mul, Op::Div),
    (Op::Div, Op::Add),
    (Op::Div, Op::Sub),
    (Op::Div, Op::Mul),
];

fn iq_kitas() -> Vec<Kita> {
    let mut k = vec![Kita::Bas, Kita::Div];
    k.extend((1..=7).map(Kita::Red));
    k.extend([(0, 1), (1, 1), (2, 1)].map(|(dy, dx)| Kita::Ml { dy, dx }));
    for skip in 0..=1 {
        k.extend((2..=4).map(|a| foc(skip, a)));
    }
    k.extend((2..=5).map(|group| Kita::Ana { skip: 0, group }));
    k.extend(
        [Rat::int(2), Rat::int(3), Rat::new(1, 2), Rat::new(1, 3), Rat::new(1, 4)].map(Kita::Exp),
    );
    k.push(Kita::Log);
    k.extend(OP_PAIRS.map(|(a, b)| Kita::Dop(a, b)));
    k.extend([Kita::Ssym, Kita::Rsym, Kita::Dge, Kita::Dgd, Kita::Soe]);
    k
}

fn deep_kitas() -> Vec<Kita> {
    let mut k = vec![Kita::Bas, Kita::Div];
    k.extend((1..=6).map(Kita::Red));
    k.extend([(0, 1), (1, 1), (2, 1)].map(|(dy, dx)| Kita::Ml { dy, dx }));
    k.extend((2..=4).map(|a| foc(0, a)));
    k.extend((2..=5).map(|group| Kita::Ana { skip: 0, group }));
    k.extend([Rat::int(2), Rat::new(1, 2)].map(Kita::Exp));
    k.push(Kita::Log);
    k.extend([Kita::Dop(Op::Mul, Op::Add), Kita::Dop(Op::Sub, Op::Div)]);
    k.extend([Kita::Ssym, Kita::Rsym, Kita::Dge, Kita::Dgd, Kita::Soe]);
    k
}

impl Catalog {
    /// Builds a catalog; BAS must come first and entries must be unique.
    pub fn new(kitas: Vec<Kita>) -> Result<Catalog, CatalogError> {
        if kitas.first() != Some(&Kita::Bas) {
            return Err(CatalogError::MissingBas);
        }
        for (i, k) in kitas.iter().enumerate() {
            if kitas[..i].contains(k) {
                return Err(CatalogError::Duplicate(k.to_string()));
            }
        }
        Ok(Catalog { kitas })
    }

    pub fn profile(p: Profile) -> Catalog {
        let kitas = match p {
            Profile::Iq | Profile::OeisDepth2 => iq_kitas(),
            Profile::OeisDeep => deep_kitas(),
        };
        Catalog { kitas }
    }

    /// Catalog with BAS followed by `kitas`, for tests and experiments.
    pub fn with(kitas: &[Kita]) -> Catalog {
        let mut all = vec![Kita::Bas];
        all.extend(kitas.iter().filter(|k| **k != Kita::Bas).cloned());
        Catalog::new(all).expect("distinct kitas")
    }

    pub fn kitas(&self) -> &[Kita] {
        &self.kitas
    }

    pub fn len(&self) -> usize {
        self.kitas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kitas.is_empty()
    }

    pub fn rank(&self, kita: &Kita) -> Option<usize> {
        self.kitas.iter().position(|k| k == kita)
    }

    /// Parses the line format: one kita per line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Catalog, CatalogError> {
        let mut kitas = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let k: Kita = line.parse().map_err(|e: crate::kita::ParseKitaError| CatalogError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            kitas.push(k);
        }
        Catalog::new(kitas)
    }
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in &self.kitas {
            writeln!(f, "{k}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_sizes() {
        assert_eq!(Catalog::profile(Profile::Iq).len(), 45);
        assert!(Catalog::profile(Profile::OeisDeep).len() <= 34);
        for p in Profile::ALL {
            let c = Catalog::profile(p);
            assert_eq!(c.kitas()[0], Kita::Bas);
            assert_eq!(Catalog::new(c.kitas().to_vec()).unwrap(), c);
            assert_eq!(p.name().parse::<Profile>().unwrap(), p);
        }
    }

    #[test]
    fn text_round_trip() {
        for p in Profile::ALL {
            let c = Catalog::profile(p);
            assert_eq!(Catalog::parse(&c.to_string()).unwrap(), c);
        }
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Catalog::parse("RED 1\n"), Err(CatalogError::MissingBas));
        assert!(matches!(Catalog::parse("BAS\nRED x"), Err(CatalogError::Parse { line: 2, .. })));
        assert!(matches!(Catalog::parse("BAS\nLOG\nLOG"), Err(CatalogError::Duplicate(_))));
        let c = Catalog::parse("# mine\nBAS\n\nRED 2  # second row\n").unwrap();
        assert_eq!(c.kitas(), &[Kita::Bas, Kita::Red(2)]);
        assert_eq!(c.rank(&Kita::Red(2)), Some(1));
    }
}
