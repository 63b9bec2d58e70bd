//! Built-in example frameworks and what is known about them.

use crate::error::{Error, Result};
use crate::framework::document::parse_framework;
use crate::framework::CrystalFramework;
use crate::rum::Component;

const TRIANGLE: &str = include_str!("../fixtures/triangle.json");
const LOCALFLEX: &str = include_str!("../fixtures/localflex.json");
const ALTGRID: &str = include_str!("../fixtures/altgrid.json");
const DOUBLEGRID: &str = include_str!("../fixtures/doublegrid.json");
const RHOMBIC: &str = include_str!("../fixtures/rhombic.json");
const STAR: &str = include_str!("../fixtures/star.json");
const HEX_C2V: &str = include_str!("../fixtures/hex-c2v.json");
const HEX_5PI12: &str = include_str!("../fixtures/hex-5pi12.json");
const OCTAGON: &str = include_str!("../fixtures/octagon.json");

pub const FIXTURE_NAMES: [&str; 11] = [
    "triangle",
    "localflex",
    "altgrid",
    "doublegrid",
    "rhombic",
    "star",
    "hex-c2v",
    "hex-5pi12",
    "octagon",
    "product-rhombic",
    "product-octagon",
];

/// Printed octagon factors `p₁, p₂`.
pub const OCTAGON_FACTORS: [&str; 2] = [
    "(sqrt(3)-sqrt(2))*z^2*w - z*w^2 + 2*(sqrt(2)-sqrt(3)+1)*z*w + (sqrt(3)-sqrt(2))*w - z",
    "(sqrt(3)+sqrt(2))*z^2*w - z*w^2 - 2*(sqrt(2)+sqrt(3)-1)*z*w + (sqrt(3)+sqrt(2))*w - z",
];

/// Printed eleven-term polynomial for the 5π/12 hexagon framework.
pub const HEX_5PI12_POLYNOMIAL: &str = "z^4*w - 1/sqrt(3)*z^3*w^2 + (sqrt(3)/2 - 2)*z^3*w \
    - 1/(2*sqrt(3))*z^3 + (1/2 + 1/(2*sqrt(3)))*z^2*w^2 + 1/(2*sqrt(3))*z^2*w - 1/sqrt(3)*z^2 \
    - 1/2*z*w^2 + (3/2 - 1/sqrt(3))*z*w + 1/sqrt(3)*z - 1/2*w";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Rigid,
    /// Fails through a nontrivial strictly periodic flex.
    NotRigidPeriodic,
    /// Fails through a spectrum point other than `1̂`.
    NotRigidSpectrum,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumShape {
    /// Only `1̂`.
    Singleton,
    /// Every phase.
    Full,
    /// Finitely many phases, given as `t` coordinates.
    Points(Vec<Vec<f64>>),
    /// A union of the given components.
    Components(Vec<Component>),
    /// Nothing asserted beyond what the other fields state.
    Unspecified,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expectations {
    pub dimension: usize,
    pub vertices: usize,
    pub edges: usize,
    pub maxwell: bool,
    /// Factors of the crystal polynomial, up to unit.
    pub factors: Option<Vec<String>>,
    /// Expanded crystal polynomial, up to unit.
    pub polynomial: Option<String>,
    pub local_flex: Option<bool>,
    pub spectrum: SpectrumShape,
    pub periodic_rigid: Option<bool>,
    pub verdict: Option<Verdict>,
    pub rum_dimension: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub framework: CrystalFramework,
    pub expected: Expectations,
}

pub fn list_fixtures() -> Vec<&'static str> {
    FIXTURE_NAMES.to_vec()
}

/// Document text of a fixture; product fixtures are serialized on demand.
pub fn fixture_document(name: &str) -> Result<String> {
    Ok(match name {
        "triangle" => TRIANGLE.to_string(),
        "localflex" => LOCALFLEX.to_string(),
        "altgrid" => ALTGRID.to_string(),
        "doublegrid" => DOUBLEGRID.to_string(),
        "rhombic" => RHOMBIC.to_string(),
        "star" => STAR.to_string(),
        "hex-c2v" => HEX_C2V.to_string(),
        "hex-5pi12" => HEX_5PI12.to_string(),
        "octagon" => OCTAGON.to_string(),
        "product-rhombic" | "product-octagon" => load_fixture(name)?.framework.to_json(),
        other => return Err(Error::UnknownFixture(other.to_string())),
    })
}

fn strings(v: &[&str]) -> Option<Vec<String>> {
    Some(v.iter().map(|s| s.to_string()).collect())
}

fn base(c: &CrystalFramework) -> Expectations {
    Expectations {
        dimension: c.dim(),
        vertices: c.num_vertices(),
        edges: c.num_edges(),
        maxwell: c.is_maxwell(),
        factors: None,
        polynomial: None,
        local_flex: None,
        spectrum: SpectrumShape::Unspecified,
        periodic_rigid: None,
        verdict: None,
        rum_dimension: None,
    }
}

fn parsed(text: &str) -> CrystalFramework {
    parse_framework(text).expect("built-in fixture parses")
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    let (name, framework, expected) = match name {
        "triangle" => {
            let c = parsed(TRIANGLE);
            let e = Expectations {
                spectrum: SpectrumShape::Singleton,
                periodic_rigid: Some(true),
                verdict: Some(Verdict::Rigid),
                rum_dimension: Some(0),
                ..base(&c)
            };
            ("triangle", c, e)
        }
        "localflex" => {
            let c = parsed(LOCALFLEX);
            let e = Expectations {
                local_flex: Some(true),
                spectrum: SpectrumShape::Full,
                verdict: Some(Verdict::NotRigidSpectrum),
                rum_dimension: Some(2),
                ..base(&c)
            };
            ("localflex", c, e)
        }
        "altgrid" => {
            let c = parsed(ALTGRID);
            let e = Expectations {
                spectrum: SpectrumShape::Points(vec![vec![0.0, 0.0], vec![0.5, 0.0]]),
                periodic_rigid: Some(true),
                verdict: Some(Verdict::NotRigidSpectrum),
                rum_dimension: Some(0),
                ..base(&c)
            };
            ("altgrid", c, e)
        }
        "doublegrid" => {
            let c = parsed(DOUBLEGRID);
            let e = Expectations {
                spectrum: SpectrumShape::Singleton,
                periodic_rigid: Some(false),
                verdict: Some(Verdict::NotRigidPeriodic),
                rum_dimension: Some(0),
                ..base(&c)
            };
            ("doublegrid", c, e)
        }
        "rhombic" => {
            let c = parsed(RHOMBIC);
            let e = Expectations {
                factors: strings(&["z-1", "w-1", "z-w"]),
                local_flex: Some(false),
                spectrum: SpectrumShape::Components(vec![
                    Component::line(&[1, 0], 0.0),
                    Component::line(&[0, 1], 0.0),
                    Component::line(&[1, -1], 0.0),
                ]),
                verdict: Some(Verdict::NotRigidSpectrum),
                rum_dimension: Some(1),
                ..base(&c)
            };
            ("rhombic", c, e)
        }
        "star" => {
            let c = parsed(STAR);
            let e = Expectations {
                factors: strings(&["z-1", "z+1", "w-1", "w+1"]),
                local_flex: Some(false),
                spectrum: SpectrumShape::Components(vec![
                    Component::line(&[1, 0], 0.0),
                    Component::line(&[1, 0], 0.5),
                    Component::line(&[0, 1], 0.0),
                    Component::line(&[0, 1], 0.5),
                ]),
                verdict: Some(Verdict::NotRigidSpectrum),
                rum_dimension: Some(1),
                ..base(&c)
            };
            ("star", c, e)
        }
        "hex-c2v" => {
            let c = parsed(HEX_C2V);
            let e = Expectations {
                factors: strings(&["z+1", "z-1", "z-1", "z-1"]),
                local_flex: Some(false),
                spectrum: SpectrumShape::Components(vec![
                    Component::line(&[1, 0], 0.0),
                    Component::line(&[1, 0], 0.5),
                ]),
                verdict: Some(Verdict::NotRigidSpectrum),
                rum_dimension: Some(1),
                ..base(&c)
            };
            ("hex-c2v", c, e)
        }
        "hex-5pi12" => {
            let c = parsed(HEX_5PI12);
            let e = Expectations {
                polynomial: Some(HEX_5PI12_POLYNOMIAL.to_string()),
                local_flex: Some(false),
                rum_dimension: Some(0),
                ..base(&c)
            };
            ("hex-5pi12", c, e)
        }
        "octagon" => {
            let c = parsed(OCTAGON);
            let e = Expectations {
                factors: strings(&OCTAGON_FACTORS),
                local_flex: Some(false),
                spectrum: SpectrumShape::Components(vec![
                    Component::RealPartRelation {
                        a: 3f64.sqrt() - 2f64.sqrt(),
                    },
                    Component::RealPartRelation {
                        a: 3f64.sqrt() + 2f64.sqrt(),
                    },
                ]),
                verdict: Some(Verdict::NotRigidSpectrum),
                rum_dimension: Some(1),
                ..base(&c)
            };
            ("octagon", c, e)
        }
        "product-rhombic" => {
            let c = parsed(RHOMBIC).product_with_line();
            let e = Expectations {
                factors: strings(&["z1-1", "z2-1", "z1-z2", "z3-1", "z3-1", "z3-1"]),
                local_flex: Some(false),
                ..base(&c)
            };
            ("product-rhombic", c, e)
        }
        "product-octagon" => {
            let c = parsed(OCTAGON).product_with_line();
            let e = Expectations {
                local_flex: Some(false),
                spectrum: SpectrumShape::Components(vec![
                    Component::line(&[1, 0, 0], 0.0),
                    Component::line(&[0, 1, 0], 0.0),
                ]),
                ..base(&c)
            };
            ("product-octagon", c, e)
        }
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    Ok(Fixture {
        name,
        framework,
        expected,
    })
}

/// Resolves `gallery:<name>` sources; returns `None` for anything else.
pub fn resolve_source(source: &str) -> Option<Result<Fixture>> {
    source.strip_prefix("gallery:").map(load_fixture)
}
