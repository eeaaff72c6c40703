//! Identifier derivation for tables, columns and JSON attributes.

use std::collections::HashSet;

/// `ProductFeature` → `product_feature`, `readsBook` → `reads_book`,
/// `HTTPServer` → `http_server`. Non-alphanumerics become `_`.
pub fn snake_case(name: &str) -> String {
    let chars: Vec<char> = name.chars().collect();
    let mut out = String::with_capacity(name.len() + 4);
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            out.push('_');
            continue;
        }
        if c.is_uppercase() && i > 0 {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower) {
                out.push('_');
            }
        }
        out.extend(c.to_lowercase());
    }
    let collapsed = out.split('_').filter(|s| !s.is_empty()).collect::<Vec<_>>().join("_");
    if collapsed.is_empty() {
        "x".to_string()
    } else {
        collapsed
    }
}

/// `product_feature` → `productFeature`.
pub fn camel_case(snake: &str) -> String {
    let mut parts = snake.split('_').filter(|s| !s.is_empty());
    let mut out = parts.next().unwrap_or_default().to_string();
    for p in parts {
        out.push_str(&capitalize(p));
    }
    out
}

/// `product_feature` → `ProductFeature`.
pub fn pascal_case(snake: &str) -> String {
    snake.split('_').filter(|s| !s.is_empty()).map(capitalize).collect()
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Hands out names unique within one scope.
#[derive(Debug, Default, Clone)]
pub struct Scope {
    taken: HashSet<String>,
}

impl Scope {
    pub fn with_reserved<'a>(reserved: impl IntoIterator<Item = &'a str>) -> Self {
        Scope { taken: reserved.into_iter().map(str::to_string).collect() }
    }

    pub fn is_taken(&self, name: &str) -> bool {
        self.taken.contains(name)
    }

    /// `name` if free, else `name_2`, `name_3`, ...
    pub fn claim(&mut self, name: &str) -> String {
        self.claim_with(name, "_")
    }

    /// Like [`Scope::claim`] with a custom separator before the counter.
    pub fn claim_with(&mut self, name: &str, sep: &str) -> String {
        let mut candidate = name.to_string();
        let mut n = 2;
        while self.taken.contains(&candidate) {
            candidate = format!("{name}{sep}{n}");
            n += 1;
        }
        self.taken.insert(candidate.clone());
        candidate
    }
}

/// Names a group of candidates sharing the base name `base`, given in
/// preference order: the first gets `base`, the others
/// `base_<qualifier>`; anything still clashing gets a counter.
pub fn claim_group(scope: &mut Scope, base: &str, qualifiers: &[String]) -> Vec<String> {
    qualifiers
        .iter()
        .enumerate()
        .map(|(i, q)| {
            if i == 0 && !scope.is_taken(base) {
                scope.claim(base)
            } else {
                scope.claim(&format!("{base}_{q}"))
            }
        })
        .collect()
}
