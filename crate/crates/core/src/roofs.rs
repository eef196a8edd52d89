//! Morphisms of the localized category: roofs `X ← X' → Y` whose left leg
//! is a quasi-isomorphism.
//!
//! Equality is decided on the minimal model of `X'_f ×_X X'_g`: two roofs
//! agree iff their right legs agree literally there.

use crate::classify::{is_quasi_iso, is_schematic_map, minimal_model, ClassReport, Verdict};
use crate::error::{Error, Result};
use crate::space::{fiber_product, FinSpace, SpaceMap};

#[derive(Clone, Debug)]
pub struct Roof {
    pub left: SpaceMap,
    pub right: SpaceMap,
    pub left_certificate: Certificate,
    pub right_certificate: Certificate,
}

/// Why a leg has its class: computed directly or derived from the laws
/// (base change, composition).
#[derive(Clone, Debug)]
pub enum Certificate {
    Computed(Box<ClassReport>),
    Derived(String),
}

fn require(report: ClassReport, what: &str) -> Result<Certificate> {
    match &report.verdict {
        Verdict::True => Ok(Certificate::Computed(Box::new(report))),
        Verdict::False => Err(Error::InvalidSpace(format!("{what} fails:\n{report}"))),
        Verdict::Undecided(r) => Err(Error::NotLocalizationPresented(format!("{what}: {r}"))),
    }
}

impl Roof {
    /// Certifies `left` as a quasi-isomorphism and `right` as schematic.
    pub fn new(left: SpaceMap, right: SpaceMap) -> Result<Roof> {
        if left.source().len() != right.source().len() || left.source().names() != right.source().names() {
            return Err(Error::InvalidSpace("roof legs start at different spaces".into()));
        }
        let left_certificate = require(is_quasi_iso(&left), "left leg quasi-isomorphism")?;
        let right_certificate = require(is_schematic_map(&right), "right leg schematic")?;
        Ok(Roof { left, right, left_certificate, right_certificate })
    }

    /// `(Id_X, f)`.
    pub fn from_map(f: &SpaceMap) -> Result<Roof> {
        let id = SpaceMap::identity(f.source());
        Ok(Roof {
            left: id,
            right: f.clone(),
            left_certificate: Certificate::Derived("identity".into()),
            right_certificate: require(is_schematic_map(f), "schematic map")?,
        })
    }

    pub fn identity(x: &FinSpace) -> Roof {
        let id = SpaceMap::identity(x);
        Roof {
            left: id.clone(),
            right: id,
            left_certificate: Certificate::Derived("identity".into()),
            right_certificate: Certificate::Derived("identity".into()),
        }
    }

    pub fn apex(&self) -> &FinSpace {
        self.left.source()
    }

    pub fn source(&self) -> &FinSpace {
        self.left.target()
    }

    pub fn target(&self) -> &FinSpace {
        self.right.target()
    }
}

/// `g ∘ f` through the apex `X'_f ×_Y Y'_g`.
pub fn compose(f: &Roof, g: &Roof) -> Result<Roof> {
    let fp = fiber_product(&f.right, &g.left)?;
    Ok(Roof {
        left: fp.p1.then(&f.left),
        right: fp.p2.then(&g.right),
        left_certificate: Certificate::Derived(
            "base change of a quasi-isomorphism along a schematic map, composed with a quasi-isomorphism".into(),
        ),
        right_certificate: Certificate::Derived("composition of schematic maps".into()),
    })
}

/// `[φ, f]⁻¹ = [f, φ]`, available when `f` is a quasi-isomorphism.
pub fn invert(f: &Roof) -> Result<Roof> {
    let r = is_quasi_iso(&f.right);
    match &r.verdict {
        Verdict::True => Ok(Roof {
            left: f.right.clone(),
            right: f.left.clone(),
            left_certificate: Certificate::Computed(Box::new(r)),
            right_certificate: Certificate::Derived("quasi-isomorphisms are schematic".into()),
        }),
        Verdict::False => Err(Error::NotInvertible(format!("right leg is not a quasi-isomorphism:\n{r}"))),
        Verdict::Undecided(why) => Err(Error::NotLocalizationPresented(why.clone())),
    }
}

fn same_space(a: &FinSpace, b: &FinSpace) -> bool {
    a.len() == b.len() && a.names() == b.names()
}

/// `[f] = [g]` decided on the minimal model of the fiber product of the
/// left legs.
pub fn roof_equal(f: &Roof, g: &Roof) -> Result<bool> {
    if !same_space(f.source(), g.source()) || !same_space(f.target(), g.target()) {
        return Err(Error::InvalidSpace("roofs between different spaces".into()));
    }
    let fp = fiber_product(&f.left, &g.left)?;
    let mm = minimal_model(&fp.space)?;
    let rho = mm.inclusion.then(&mm.kolmogorov.section);
    let a = rho.then(&fp.p1).then(&f.right);
    let b = rho.then(&fp.p2).then(&g.right);
    Ok(a.equals(&b))
}
