//! Input schema and deterministic output formatting.

use std::collections::BTreeMap;
use std::io;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use spin_cover::{Mat2C, MembershipReport, Multivector};

/// Coefficients at or below this magnitude are left out of rotor maps.
pub const PRINT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Deserialize)]
pub struct MatrixInput {
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
pub struct RotorInput {
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub rotor: BTreeMap<String, f64>,
}

/// Blade-name keyed coefficients in `(grade, mask)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct BladeMap(pub Vec<(String, f64)>);

impl BladeMap {
    pub fn from_multivector(m: &Multivector) -> Self {
        let mut terms: Vec<_> = m.terms().filter(|(_, c)| c.abs() > PRINT_THRESHOLD).collect();
        terms.sort_by_key(|(b, _)| (b.grade(), b.mask()));
        BladeMap(terms.into_iter().map(|(b, c)| (b.name(), c)).collect())
    }
}

impl Serialize for BladeMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Serialize)]
pub struct Components {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[f64; 4]> for Components {
    fn from([a, b, c, d]: [f64; 4]) -> Self {
        Components { a, b, c, d }
    }
}

/// 2x2 complex matrix as nested `[re, im]` pairs.
pub fn complex_rows(m: &Mat2C) -> [[[f64; 2]; 2]; 2] {
    m.0.map(|row| row.map(|z| [z.re, z.im]))
}

#[derive(Debug, Serialize)]
pub struct MembershipJson {
    pub accepted: bool,
    pub tol: f64,
    pub scale: f64,
    pub orthogonality_residual: f64,
    pub determinant: f64,
    pub orthochronous_minor: f64,
    pub failed: Vec<&'static str>,
}

impl From<&MembershipReport> for MembershipJson {
    fn from(r: &MembershipReport) -> Self {
        MembershipJson {
            accepted: r.accepted(),
            tol: r.tol,
            scale: r.scale,
            orthogonality_residual: r.orthogonality_residual,
            determinant: r.determinant,
            orthochronous_minor: r.orthochronous_minor,
            failed: r.failed.iter().map(|c| c.name()).collect(),
        }
    }
}

/// Pretty printer that writes every float with 17 significant digits.
pub struct FixedDigits(serde_json::ser::PrettyFormatter<'static>);

impl FixedDigits {
    pub fn new() -> Self {
        FixedDigits(serde_json::ser::PrettyFormatter::with_indent(b"  "))
    }
}

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        // -0 prints as 0 so that sign flips of vanishing entries do not
        // change the bytes
        let value = if value == 0.0 { 0.0 } else { value };
        write!(w, "{value:.16e}")
    }

    forward! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits::new());
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_string(&vec![1.0, -0.0, std::f64::consts::FRAC_1_SQRT_2, 1e-300]);
        assert_eq!(s, "[\n  1.0000000000000000e0,\n  0.0000000000000000e0,\n  7.0710678118654757e-1,\n  1.0000000000000000e-300\n]");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[2], std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn rotor_input_reads_named_coefficients() {
        let r: RotorInput = serde_json::from_str(r#"{"p":2,"q":0,"rotor":{"e12":-0.5,"1":0.5}}"#).unwrap();
        assert_eq!(r.rotor["e12"], -0.5);
        assert_eq!(r.rotor["1"], 0.5);
    }
}
