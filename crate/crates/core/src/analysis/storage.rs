use serde::{Deserialize, Serialize};

use crate::rdf::Literal;
use crate::vocab::{self, xsd_local, XSD_INTEGER_FAMILY, XSD_REAL_FAMILY};

/// SQL storage class of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageClass {
    Text,
    Real,
    Integer,
    Blob,
}

impl StorageClass {
    pub fn sql_type(self) -> &'static str {
        match self {
            StorageClass::Text => "TEXT",
            StorageClass::Real => "REAL",
            StorageClass::Integer => "INTEGER",
            StorageClass::Blob => "BLOB",
        }
    }

    /// Inverse of [`StorageClass::sql_type`], by SQLite affinity rules.
    pub fn from_sql_type(decl: &str) -> StorageClass {
        let d = decl.to_ascii_uppercase();
        if d.contains("INT") {
            StorageClass::Integer
        } else if d.contains("CHAR") || d.contains("CLOB") || d.contains("TEXT") {
            StorageClass::Text
        } else if d.contains("BLOB") || d.is_empty() {
            StorageClass::Blob
        } else {
            StorageClass::Real
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, StorageClass::Integer | StorageClass::Real)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Category {
    Int,
    Real,
    Blob,
    Temporal,
    Other,
}

fn categorize(lit: &Literal) -> Category {
    if lit.lang().is_some() {
        return Category::Other;
    }
    let Some(dt) = lit.datatype() else {
        return if is_lexical_integer(lit.lexical()) { Category::Int } else { Category::Other };
    };
    match xsd_local(dt.as_str()) {
        Some(l) if XSD_INTEGER_FAMILY.contains(&l) => Category::Int,
        Some(l) if XSD_REAL_FAMILY.contains(&l) => Category::Real,
        Some("base64Binary" | "hexBinary") => Category::Blob,
        Some("dateTime" | "date" | "dateTimeStamp") => Category::Temporal,
        _ => Category::Other,
    }
}

pub(crate) fn is_lexical_integer(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Integer-family (or untyped all-integer) → Integer; numeric with at least
/// one decimal/float/double → Real; binary → Blob; date/dateTime → Integer
/// (epoch milliseconds); anything mixed or otherwise → Text.
pub fn infer_storage_class<'a>(literals: impl IntoIterator<Item = &'a Literal>) -> StorageClass {
    let mut cats = literals.into_iter().map(categorize).peekable();
    if cats.peek().is_none() {
        return StorageClass::Text;
    }
    let (mut int, mut real, mut blob, mut temporal, mut other) = (false, false, false, false, false);
    for c in cats {
        match c {
            Category::Int => int = true,
            Category::Real => real = true,
            Category::Blob => blob = true,
            Category::Temporal => temporal = true,
            Category::Other => other = true,
        }
    }
    match (int, real, blob, temporal, other) {
        (true, false, false, false, false) => StorageClass::Integer,
        (_, true, false, false, false) => StorageClass::Real,
        (false, false, true, false, false) => StorageClass::Blob,
        (false, false, false, true, false) => StorageClass::Integer,
        _ => StorageClass::Text,
    }
}

pub(crate) fn is_temporal(lit: &Literal) -> bool {
    categorize(lit) == Category::Temporal
}

pub(crate) fn is_binary_hex(lit: &Literal) -> bool {
    lit.datatype().is_some_and(|d| d.as_str() == vocab::XSD_HEX_BINARY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Iri;

    fn typed(lex: &str, dt: &str) -> Literal {
        Literal::typed(lex, Iri::new(dt).unwrap())
    }

    #[test]
    fn integers() {
        let lits = [typed("3", vocab::XSD_INTEGER), typed("7", vocab::XSD_INTEGER)];
        assert_eq!(infer_storage_class(&lits), StorageClass::Integer);
    }

    #[test]
    fn mixed_falls_back_to_text() {
        let lits = [typed("3", vocab::XSD_INTEGER), Literal::plain("hello")];
        assert_eq!(infer_storage_class(&lits), StorageClass::Text);
    }

    #[test]
    fn date_time_is_integer() {
        let lits = [typed("2008-06-20T00:00:00", vocab::XSD_DATE_TIME)];
        assert_eq!(infer_storage_class(&lits), StorageClass::Integer);
    }

    #[test]
    fn any_decimal_makes_real() {
        let lits = [typed("3", vocab::XSD_INTEGER), typed("2.5", vocab::XSD_DECIMAL)];
        assert_eq!(infer_storage_class(&lits), StorageClass::Real);
        assert_eq!(infer_storage_class(&[typed("1e3", vocab::XSD_DOUBLE)]), StorageClass::Real);
    }

    #[test]
    fn untyped_integers_and_plain_text() {
        assert_eq!(infer_storage_class(&[Literal::plain("-12"), Literal::plain("4")]), StorageClass::Integer);
        assert_eq!(infer_storage_class(&[Literal::plain("4.5")]), StorageClass::Text);
        assert_eq!(infer_storage_class(&[Literal::lang_tagged("4", "en")]), StorageClass::Text);
    }

    #[test]
    fn binaries() {
        let lits = [typed("CAFE", vocab::XSD_HEX_BINARY), typed("AAE=", vocab::XSD_BASE64_BINARY)];
        assert_eq!(infer_storage_class(&lits), StorageClass::Blob);
    }

    #[test]
    fn sql_type_names_round_trip() {
        for sc in [StorageClass::Text, StorageClass::Real, StorageClass::Integer, StorageClass::Blob] {
            assert_eq!(StorageClass::from_sql_type(sc.sql_type()), sc);
        }
    }
}
