use std::fmt;

/// Variable families of the flow model, in column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Edge-product flow.
    Y,
    /// Edge-product usage indicator.
    Beta,
    /// Satisfied demand.
    X,
    /// Production.
    P,
    /// Entity production switch.
    Zeta,
    /// Ending inventory.
    I,
    /// Unmet demand.
    Delta,
    /// Arrival time.
    A,
    /// Readiness time.
    O,
    /// Late-delivery indicator.
    Z,
    /// Late-delivery penalty.
    W,
    /// Product of the late indicator and the arrival time.
    V,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::Y,
        Family::Beta,
        Family::X,
        Family::P,
        Family::Zeta,
        Family::I,
        Family::Delta,
        Family::A,
        Family::O,
        Family::Z,
        Family::W,
        Family::V,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            Family::Y => "y",
            Family::Beta => "beta",
            Family::X => "x",
            Family::P => "p",
            Family::Zeta => "zeta",
            Family::I => "I",
            Family::Delta => "delta",
            Family::A => "a",
            Family::O => "o",
            Family::Z => "z",
            Family::W => "w",
            Family::V => "v",
        }
    }

    pub fn from_prefix(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.prefix() == s)
    }

    /// Number of index arguments: edge-product families take `(i,j,k)`.
    pub fn arity(self) -> usize {
        match self {
            Family::Y | Family::Beta | Family::A | Family::Z | Family::W | Family::V => 3,
            Family::X | Family::P | Family::I | Family::Delta | Family::O => 2,
            Family::Zeta => 1,
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, Family::Beta | Family::Zeta | Family::Z)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

/// `FAM(arg,arg,...)`.
pub fn format_name(prefix: &str, args: &[&str]) -> String {
    format!("{prefix}({})", args.join(","))
}

/// Inverse of [`format_name`].
pub fn parse_name(name: &str) -> Option<(&str, Vec<&str>)> {
    let (prefix, rest) = name.split_once('(')?;
    let inner = rest.strip_suffix(')')?;
    if prefix.is_empty() || inner.is_empty() {
        return None;
    }
    Some((prefix, inner.split(',').collect()))
}

/// Ids must survive the name grammar unchanged.
pub(crate) fn valid_id(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(|c| c == ',' || c == '(' || c == ')' || c.is_whitespace() || c == '#')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let n = format_name("y", &["S1", "A2", "engine"]);
        assert_eq!(n, "y(S1,A2,engine)");
        assert_eq!(parse_name(&n), Some(("y", vec!["S1", "A2", "engine"])));
        assert_eq!(parse_name("zeta"), None);
        assert_eq!(parse_name("zeta()"), None);
    }

    #[test]
    fn prefixes_are_distinct() {
        for f in Family::ALL {
            assert_eq!(Family::from_prefix(f.prefix()), Some(f));
        }
        assert!(!valid_id("a,b") && !valid_id("") && valid_id("S1"));
    }
}
